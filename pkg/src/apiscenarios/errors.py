"""Exception hierarchy shared by the pipeline stages."""


class MiningError(Exception):
    """Base class for fatal pipeline errors."""


class CorpusError(MiningError):
    pass


class CatalogError(MiningError):
    pass


class LexiconError(MiningError):
    pass


class ConfigError(MiningError):
    pass


class EvaluationError(MiningError):
    pass


class OutputError(MiningError):
    """An output file or directory could not be written."""


class PipelineError(MiningError):
    """A stage failed on otherwise loadable input."""
