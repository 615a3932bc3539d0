"""
For running a batch: python3 -m fockbounds <subcommand> [flags]
"""
import sys

from fockbounds.cli import main

sys.exit(main())
