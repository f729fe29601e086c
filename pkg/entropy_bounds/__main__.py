import sys

from entropy_bounds.cli import main

if __name__ == "__main__":
    sys.exit(main())
