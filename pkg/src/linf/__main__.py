import sys

from linf.cli import main

sys.exit(main())
