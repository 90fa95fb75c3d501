#!/usr/bin/env python3
"""python -m mulab"""
import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
