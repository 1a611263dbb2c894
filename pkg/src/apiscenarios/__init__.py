"""Mine task-based API usage scenarios from developer-forum threads."""

__version__ = "0.1.0"
