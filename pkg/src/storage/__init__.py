from .results_storage import ResultsStorage

__all__ = ["ResultsStorage"]
