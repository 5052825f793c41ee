from .logger import set_up_logger

__all__ = ["set_up_logger"]
