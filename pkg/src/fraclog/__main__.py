import sys

from fraclog.cli import main

sys.exit(main())
