"""Entry point for `python -m ffdensity`"""
import sys

from ffdensity.cli import main

sys.exit(main())
