#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Entry point for `python -m rrburden`.
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# local libraries
from rrburden.cli_builder import main

if __name__ == "__main__":
    main()
