import logging
from pathlib import Path

import pandas as pd

from src.extractors import WallConfig, WallConfigExtractor
from src.solvers import dominant_time_constant, exact_stationary_resistance, fourier_diagnostic
from src.storage import ResultsStorage

logger = logging.getLogger("app")

DEFAULT_DT_S = 3600.0
WARMUP_FACTOR = 5.0


class ValidatePipeline:
    """Schema and physics checks of a wall configuration, with a per-layer report."""

    def __init__(self, config_path: Path, out_path: Path | None = None, fmt: str = "csv"):
        self.config_path = config_path
        self.out_path = out_path
        self.fmt = fmt
        self.wall_config_extractor = WallConfigExtractor()
        self.results_storage = ResultsStorage()

    def run(self) -> pd.DataFrame:
        try:
            logger.info("=" * 3)
            logger.info("VALIDATE PIPELINE STARTED")
            logger.info("=" * 3)

            logger.info("[1/3] EXTRACTION")
            wall = self.wall_config_extractor.extract(self.config_path)

            logger.info("[2/3] TRANSFORMATION")
            df = self._transform(wall)

            logger.info("[3/3] LOADING")
            self.results_storage.save(df, self.out_path, self.fmt)

            logger.info("=" * 3)
            logger.info("PIPELINE COMPLETED SUCCESSFULLY")
            logger.info("=" * 3)
            return df

        except Exception as e:
            logger.error(f"PIPELINE ERROR : {e}")
            raise

    def _transform(self, wall: WallConfig) -> pd.DataFrame:
        dt = wall.dt_s or DEFAULT_DT_S
        if wall.dt_s is None:
            logger.info(f"sim.dt_s not set, Fourier numbers use dt = {dt:g} s")

        rows = []
        for i, layer in enumerate(wall.assembly.layers):
            diagnostic = fourier_diagnostic(layer, dt)
            rows.append(
                {
                    "layer": layer.name or f"layer_{i}",
                    "thickness_m": layer.thickness_m,
                    "diffusivity_m2s": layer.diffusivity,
                    "resistance_m2KW": exact_stationary_resistance(layer),
                    "fourier_number": diagnostic.fourier_number,
                    "explicit_stable": diagnostic.stable,
                }
            )

        tau = dominant_time_constant(wall.assembly)
        suggested = WARMUP_FACTOR * tau
        logger.info(f"Dominant time constant : {tau:.0f} s ({tau / 3600:.2f} h)")
        logger.info(f"Suggested warm-up : {suggested:.0f} s")
        if wall.sim.warmup_duration < suggested:
            logger.warning(
                f"sim.warmup_s = {wall.sim.warmup_duration:g} s is shorter than the suggested warm-up"
            )
        return pd.DataFrame(rows)
