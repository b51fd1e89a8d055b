import sys

from dynplast.orchestrator import main

sys.exit(main())
