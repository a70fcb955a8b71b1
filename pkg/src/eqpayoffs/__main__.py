import sys

from eqpayoffs.cli import main

sys.exit(main())
