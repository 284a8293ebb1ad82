#!/usr/bin/env python3
"""
Main script for the dynamic-window supertagger.
"""

import sys

from supertag.cli import main

if __name__ == "__main__":
    sys.exit(main())
