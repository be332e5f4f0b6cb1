import json
import logging

FILE_DATEFMT = '%Y-%m-%d %H:%M:%S'


class JsonLineFormatter(logging.Formatter):
    """One JSON object per record; the message is escaped by json.dumps."""

    def format(self, record):
        payload = {
            "timestamp": self.formatTime(record, self.datefmt),
            "logger": record.name,
            "level": record.levelname,
            "thread": record.threadName,
            "message": record.getMessage(),
        }
        if record.exc_info:
            payload["exception"] = self.formatException(record.exc_info)
        return json.dumps(payload)


class LogFormatters():
    """Formatters for the console, run log, error log and sweep log handlers"""

    @staticmethod
    def get_console_formatter():
        return logging.Formatter('%(levelname)s - %(name)s - %(message)s')

    @staticmethod
    def get_file_formatter():
        return logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(module)s:%(lineno)d - %(message)s',
            datefmt=FILE_DATEFMT
        )

    @staticmethod
    def get_error_formatter():
        """Error records carry the full call site."""
        return logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(pathname)s:%(funcName)s:%(lineno)d - %(message)s',
            datefmt=FILE_DATEFMT
        )

    @staticmethod
    def get_sweep_formatter():
        """One JSON object per line; sweep logs are grepped and loaded by scripts."""
        return JsonLineFormatter(datefmt=FILE_DATEFMT)

    @classmethod
    def for_handler(cls, kind):
        """Look up a formatter by handler kind: console, file, error or sweep."""
        factories = {
            'console': cls.get_console_formatter,
            'file': cls.get_file_formatter,
            'error': cls.get_error_formatter,
            'sweep': cls.get_sweep_formatter,
        }
        try:
            return factories[kind]()
        except KeyError:
            raise ValueError(f"Unknown handler kind '{kind}'") from None
