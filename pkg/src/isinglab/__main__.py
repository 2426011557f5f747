"""Module entry point: python -m isinglab."""

import sys

from .cli import main

sys.exit(main())
