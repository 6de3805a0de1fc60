# treesums - module entry point

import sys

from treesums.main import main

if __name__ == "__main__":
    sys.exit(main())
