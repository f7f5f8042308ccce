import sys

from vaesynth.cli.vaesynth import main

if __name__ == "__main__":
    sys.exit(main())
