import logging

class ComponentFilter(logging.Filter):
    """Filter to only allow log messages from one component family (solvers, analysis, ...)."""

    def __init__(self, family):
        super().__init__()
        self.family = family.lower()

    def filter(self, record):
        logger_name = record.name.lower()
        return logger_name.startswith(self.family) or f".{self.family}." in f".{logger_name}."

class ErrorOnlyFilter(logging.Filter):
    """Filter to only allow ERROR and CRITICAL messages."""

    def filter(self, record):
        return record.levelno >= logging.ERROR

class DebugModeFilter(logging.Filter):
    """Filter that changes behavior based on debug mode."""

    def __init__(self, debug_mode=False):
        super().__init__()
        self.debug_mode = debug_mode

    def filter(self, record):
        if self.debug_mode:
            return True
        return record.levelno >= logging.INFO
