import sys

from hybridlattice.cli import main

sys.exit(main())
