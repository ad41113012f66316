import sys

from nlskp.endpoints.cli import main

sys.exit(main())
