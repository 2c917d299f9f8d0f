import sys

from ewps.cli import main

sys.exit(main())
