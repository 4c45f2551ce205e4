"""Allow ``python -m advlin``."""
import sys

from advlin.cli.main import main

sys.exit(main())
