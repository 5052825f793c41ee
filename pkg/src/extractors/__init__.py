from . import synthetic_weather
from .wall_config_extractor import WallConfig, WallConfigExtractor
from .weather_extractor import WeatherExtractor

__all__ = [
    "WallConfig",
    "WallConfigExtractor",
    "WeatherExtractor",
    "synthetic_weather",
]
