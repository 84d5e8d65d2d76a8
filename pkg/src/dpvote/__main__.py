import sys

from dpvote.cli import main

sys.exit(main())
