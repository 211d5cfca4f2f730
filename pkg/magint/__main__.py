import sys

from magint.cli import main

sys.exit(main())
