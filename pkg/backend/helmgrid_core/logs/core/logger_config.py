import logging
import os
from .log_formatters import LogFormatters
from .log_filters import ComponentFilter, DebugModeFilter, ErrorOnlyFilter

COMPONENT_FAMILIES = ['solvers', 'analysis', 'discretization']

class LoggerConfig:
    """Configuration for the HelmGrid logging system."""

    def __init__(self, debug_mode=False, log_dir=None):
        env_debug = os.environ.get('HELMGRID_DEBUG', '').strip().lower() in ('1', 'true', 'yes')
        self.debug_mode = debug_mode or env_debug
        self.log_level = logging.DEBUG if self.debug_mode else logging.INFO
        self.log_dir = log_dir or os.environ.get('HELMGRID_LOG_DIR', 'logs')
        self._ensure_log_directories()

    def _ensure_log_directories(self):
        """Create log directories if they don't exist."""
        for directory in ['core'] + COMPONENT_FAMILIES:
            os.makedirs(os.path.join(self.log_dir, directory), exist_ok=True)

    def _setup_logging(self):
        root_logger = logging.getLogger()
        for handler in list(root_logger.handlers):
            root_logger.removeHandler(handler)
            handler.close()
        root_logger.setLevel(self.log_level)

        self._setup_console_handler()
        self._setup_application_handler()
        self._setup_error_handler()
        self._setup_component_handlers()
        self._configure_component_loggers()

        logging.getLogger('helmgrid_core').info(
            "Logging initialized (debug=%s, dir=%s)", self.debug_mode, self.log_dir)

    def _setup_console_handler(self):
        """Console shows warnings only, unless debugging; stdout stays free for CSV."""
        console_handler = logging.StreamHandler()
        console_handler.setLevel(logging.DEBUG if self.debug_mode else logging.WARNING)
        console_handler.setFormatter(LogFormatters.for_handler('console'))
        console_handler.addFilter(DebugModeFilter(self.debug_mode))
        logging.getLogger().addHandler(console_handler)

    def _setup_application_handler(self):
        app_handler = logging.FileHandler(os.path.join(self.log_dir, 'core', 'application.log'))
        app_handler.setLevel(self.log_level)
        app_handler.setFormatter(LogFormatters.for_handler('file'))
        logging.getLogger().addHandler(app_handler)

    def _setup_error_handler(self):
        error_handler = logging.FileHandler(os.path.join(self.log_dir, 'core', 'errors.log'))
        error_handler.setLevel(logging.ERROR)
        error_handler.setFormatter(LogFormatters.for_handler('error'))
        error_handler.addFilter(ErrorOnlyFilter())
        logging.getLogger().addHandler(error_handler)

    def _setup_component_handlers(self):
        """One log file per component family; analysis sweeps log as JSON lines."""
        for family in COMPONENT_FAMILIES:
            handler = logging.FileHandler(os.path.join(self.log_dir, family, f'{family}.log'))
            handler.setLevel(self.log_level)
            kind = 'sweep' if family == 'analysis' else 'file'
            handler.setFormatter(LogFormatters.for_handler(kind))
            handler.addFilter(ComponentFilter(family))
            logging.getLogger().addHandler(handler)

    def _configure_component_loggers(self):
        for family in COMPONENT_FAMILIES:
            logging.getLogger(f'helmgrid_core.{family}').setLevel(self.log_level)

def setup_logging(debug_mode=False, log_dir=None):
    """Convenience function to set up logging."""
    config = LoggerConfig(debug_mode=debug_mode, log_dir=log_dir)
    config._setup_logging()
    return config

def get_component_logger(component_name):
    """Get a logger for a specific component."""
    return logging.getLogger(component_name)
