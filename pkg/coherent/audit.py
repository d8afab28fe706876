# audit.py
# Audit logging for coherent runs: a file log under the coherent home directory plus a
# console copy on stderr, so JSON reports on stdout stay clean.
# Author: The Coherent Pairs Team

import logging
import sys

from rich.console import Console
from rich.logging import RichHandler

LOG_FILE_PATH = ""


def initialize_logging(log_path: str):
    """Sets up the logging configuration. Must be called once at startup."""
    global LOG_FILE_PATH
    LOG_FILE_PATH = log_path
    logging.basicConfig(
        level=logging.INFO,
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(LOG_FILE_PATH),
            RichHandler(console=Console(stderr=True), show_path=False, show_time=False),
        ],
        force=True,
    )


def log_info(message: str):
    """Logs an informational message."""
    logging.info(message)


def log_warning(message: str):
    """Logs a warning. The computation continues, but a result may need a second look."""
    logging.warning(message)


def log_error(message: str):
    logging.error(message)


def handle_critical_failure(error_message: str, exit_code: int = 1):
    """
    Logs an unrecoverable failure and exits with the status the CLI assigns to it.
    Only the command layer calls this; library code raises instead.
    """
    log_error(f"FAILURE: {error_message}")
    if LOG_FILE_PATH:
        log_error(f"See the audit log at {LOG_FILE_PATH} for details.")
    sys.exit(exit_code)
