#!/usr/bin/env python3
# File: s3rec/s3rec.py

import logging
import os
import sys

from src.interfaces.cli import main as cli_main


def setup_logger():
    """Configure logging for the toolkit"""
    logger = logging.getLogger("s3rec")
    logger.setLevel(logging.DEBUG)

    # Console handler; stdout is reserved for command results
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(logging.INFO)

    # File handler
    file_handler = logging.FileHandler(os.getenv("S3REC_LOG_FILE", "s3rec.log"))
    file_handler.setLevel(logging.DEBUG)

    # Format
    formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    console_handler.setFormatter(formatter)
    file_handler.setFormatter(formatter)

    # Add handlers
    logger.addHandler(console_handler)
    logger.addHandler(file_handler)

    return logger


def main():
    logger = setup_logger()
    logger.debug(f"s3rec invoked with {sys.argv[1:]}")
    return cli_main(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
