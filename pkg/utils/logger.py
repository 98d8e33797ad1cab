"""
Logger setup for the Unruh pair-production simulator
"""

import logging
import os
from datetime import datetime
from logging.handlers import RotatingFileHandler

import colorlog

LOGGER_NAME = "unruh_sim"


def setup_logger(name: str = LOGGER_NAME, level: str = "INFO", logs_dir: str = "logs",
                 root: bool = False) -> logging.Logger:
    """Setup logger with file and coloured console handlers; root=True also catches the service loggers"""

    if not os.path.exists(logs_dir):
        os.makedirs(logs_dir)

    logger = logging.getLogger() if root else logging.getLogger(name)
    logger.setLevel(getattr(logging, level.upper()))

    # Drop only our own handlers so repeated runs in one process don't duplicate lines
    for handler in [h for h in logger.handlers if getattr(h, "unruh_sim", False)]:
        logger.removeHandler(handler)
        handler.close()

    detailed_formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s'
    )
    console_formatter = colorlog.ColoredFormatter(
        '%(log_color)s%(asctime)s - %(levelname)s%(reset)s - %(message)s',
        log_colors={
            'DEBUG': 'cyan',
            'INFO': 'green',
            'WARNING': 'yellow',
            'ERROR': 'red',
            'CRITICAL': 'bold_red',
        },
    )

    log_file = os.path.join(logs_dir, f"{name}.log")
    file_handler = RotatingFileHandler(
        log_file,
        maxBytes=10*1024*1024,  # 10MB
        backupCount=5
    )
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(detailed_formatter)

    console_handler = colorlog.StreamHandler()
    console_handler.setLevel(getattr(logging, level.upper()))
    console_handler.setFormatter(console_formatter)

    for handler in (file_handler, console_handler):
        handler.unruh_sim = True
        logger.addHandler(handler)

    logger.debug(f"Logger initialized for {name}")

    return logger


def log_error(logger: logging.Logger, error: Exception, context: str = ""):
    """Log error with context"""
    error_msg = f"{type(error).__name__}: {error}"
    if context:
        error_msg = f"{context}: {error_msg}"
    logger.error(error_msg, exc_info=True)


def log_scenario_run(logger: logging.Logger, scenario: str, status: str, duration: float = None):
    """Log one summary line for a scenario run"""
    if duration is not None:
        logger.info(f"Scenario - {scenario} - Status: {status} - Duration: {duration:.2f}s")
    else:
        logger.info(f"Scenario - {scenario} - Status: {status}")


def log_warnings(logger: logging.Logger, warnings: list, context: str = ""):
    """Log each collected physics warning"""
    for warning in warnings:
        logger.warning(f"{context}: {warning}" if context else warning)


class ContextLogger:
    """Context manager for logging function execution"""

    def __init__(self, logger: logging.Logger, func_name: str, log_level: str = "DEBUG"):
        self.logger = logger
        self.func_name = func_name
        self.log_level = getattr(logging, log_level.upper())
        self.start_time = None
        self.duration = None

    def __enter__(self):
        self.start_time = datetime.now()
        self.logger.log(self.log_level, f"Starting {self.func_name}")
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.duration = (datetime.now() - self.start_time).total_seconds()

        if exc_type:
            self.logger.error(f"Error in {self.func_name} after {self.duration:.2f}s: {exc_val}")
        else:
            self.logger.log(self.log_level, f"Completed {self.func_name} in {self.duration:.2f}s")
        return False

