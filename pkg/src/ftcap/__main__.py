import sys

from ftcap.cli import main

sys.exit(main())
