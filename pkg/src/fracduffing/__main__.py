import sys

from fracduffing.cli import main

sys.exit(main())
