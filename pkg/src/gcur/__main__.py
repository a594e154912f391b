import sys

from gcur.cli import main

sys.exit(main())
