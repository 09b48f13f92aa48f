import sys

from ans_carry.cli import main

sys.exit(main())
