#!/usr/bin/env python3
"""
cfdim - Main Entry Point
Certified Hausdorff dimensions of continued fraction sets with large partial quotients.
"""

import sys

from dotenv import load_dotenv
from loguru import logger

from cfdim.cli.main import execute


def main():
    """Main entry point for the application."""
    load_dotenv()
    try:
        code = execute(sys.argv[1:])
    except KeyboardInterrupt:
        logger.info("Received keyboard interrupt")
        code = 1
    except Exception as e:
        logger.critical(f"Application error: {e}")
        code = 1
    sys.exit(code)


if __name__ == "__main__":
    main()
