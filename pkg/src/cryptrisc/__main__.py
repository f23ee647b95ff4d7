import sys

from cryptrisc.cli import main

sys.exit(main())
