"""Top-level entry point for the lens CRLB toolkit."""

import sys

from lens_crlb.cli import main


if __name__ == "__main__":
    sys.exit(main())
