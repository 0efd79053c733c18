import sys

from ratiocopula.cli import main

sys.exit(main())
