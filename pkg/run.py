#!/usr/bin/env python
"""Simple script to run the entstruct command line."""

import sys

from entstruct.main import main

if __name__ == "__main__":
    sys.exit(main())
