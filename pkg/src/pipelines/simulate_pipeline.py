import logging
from pathlib import Path

from config import runtime_config
from src.core import InputValidationError
from src.extractors import WallConfig, WallConfigExtractor, WeatherExtractor
from src.solvers import SimulationResult, simulate, simulate_perturbed, simulate_radiative
from src.storage import ResultsStorage

logger = logging.getLogger("app")


class SimulatePipeline:
    """Wall configuration + weather file → interior surface temperature and flux table."""

    def __init__(
        self,
        config_path: Path,
        weather_path: Path,
        perturbed: bool = False,
        radiative: bool = False,
        out_path: Path | None = None,
        fmt: str = "csv",
        threads: int | None = None,
        history_path: Path | None = None,
    ):
        if perturbed and radiative:
            raise InputValidationError("--perturbed and --radiative cannot be combined")
        self.config_path = config_path
        self.weather_path = weather_path
        self.perturbed = perturbed
        self.radiative = radiative
        self.out_path = out_path
        self.fmt = fmt
        self.threads = threads
        self.history_path = history_path
        self.wall_config_extractor = WallConfigExtractor()
        self.weather_extractor = WeatherExtractor()
        self.results_storage = ResultsStorage()

    def run(self) -> SimulationResult:
        try:
            logger.info("=" * 3)
            logger.info("SIMULATE PIPELINE STARTED")
            logger.info("=" * 3)

            logger.info("[1/3] EXTRACTION")
            wall, weather, history = self._extract()

            logger.info("[2/3] TRANSFORMATION")
            result = self._transform(wall, weather, history)

            logger.info("[3/3] LOADING")
            self._load(result)

            logger.info("=" * 3)
            logger.info("PIPELINE COMPLETED SUCCESSFULLY")
            logger.info("=" * 3)
            return result

        except Exception as e:
            logger.error(f"PIPELINE ERROR : {e}")
            raise

    def _extract(self):
        wall = self.wall_config_extractor.extract(self.config_path, threads=self.threads)
        weather = self.weather_extractor.extract(self.weather_path)
        if wall.dt_s is not None and abs(weather.dt - wall.dt_s) > 1e-6 * wall.dt_s:
            raise InputValidationError(
                f"weather time step {weather.dt:g} s differs from sim.dt_s = {wall.dt_s:g} s"
            )
        history = None
        if self.history_path is not None:
            history = self.weather_extractor.extract(self.history_path)
            logger.info(f"Warm-up from history : {len(history)} samples")
        return wall, weather, history

    def _transform(self, wall: WallConfig, weather, history=None) -> SimulationResult:
        setpoint = weather.setpoint(runtime_config.default_setpoint_c)
        if self.perturbed:
            logger.info(f"Gradient correction, recombination {wall.recombination}")
            return simulate_perturbed(
                wall.assembly, weather, setpoint, wall.sim, wall.recombination, history=history
            )
        if self.radiative:
            logger.info(f"Radiative correction, closure {wall.radiative.closure}")
            return simulate_radiative(
                wall.assembly, weather, setpoint, wall.sim, wall.radiative, history=history
            )
        return simulate(wall.assembly, weather, setpoint, wall.sim, history=history)

    def _load(self, result: SimulationResult) -> None:
        logger.info(f"Simulation time : {result.diagnostics['elapsed_ms']:.1f} ms")
        self.results_storage.save(result.to_frame(), self.out_path, self.fmt)
