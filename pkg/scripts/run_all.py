#!/usr/bin/env python3
"""Run the full experiment pipeline with the default configuration.

Usage: python scripts/run_all.py [--out DIR] [--seed N]
"""

import sys
from pathlib import Path

from mwlp.cli import main

if __name__ == "__main__":
    config = Path(__file__).resolve().parent.parent / "configs" / "default.toml"
    sys.exit(main(["all", "--config", str(config)] + sys.argv[1:]))
