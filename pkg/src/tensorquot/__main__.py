import sys

from tensorquot.cli import main

sys.exit(main())
