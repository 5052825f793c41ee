import logging
from pathlib import Path

import numpy as np
import pandas as pd

from config import phase_space_config
from src.core import InputValidationError
from src.solvers import overflow_boundary
from src.storage import ResultsStorage

logger = logging.getLogger("app")

COLUMNS = ["alpha_m2s", "period_s", "critical_thickness_m"]


class PhaseSpacePipeline:
    """Grid of thicknesses beyond which the transfer-matrix baseline overflows."""

    def __init__(
        self,
        alpha_min: float = phase_space_config.alpha_min,
        alpha_max: float = phase_space_config.alpha_max,
        periods: tuple[float, ...] = phase_space_config.periods_s,
        alpha_count: int = phase_space_config.alpha_count,
        out_path: Path | None = None,
        fmt: str = "csv",
    ):
        self.alpha_min = alpha_min
        self.alpha_max = alpha_max
        self.periods = tuple(periods)
        self.alpha_count = alpha_count
        self.out_path = out_path
        self.fmt = fmt
        self.results_storage = ResultsStorage()

    def run(self) -> pd.DataFrame:
        try:
            logger.info("=" * 3)
            logger.info("PHASE SPACE PIPELINE STARTED")
            logger.info("=" * 3)

            logger.info("[1/3] EXTRACTION")
            alphas = self._extract()

            logger.info("[2/3] TRANSFORMATION")
            df = self._transform(alphas)

            logger.info("[3/3] LOADING")
            self.results_storage.save(df, self.out_path, self.fmt)

            logger.info("=" * 3)
            logger.info("PIPELINE COMPLETED SUCCESSFULLY")
            logger.info("=" * 3)
            return df

        except Exception as e:
            logger.error(f"PIPELINE ERROR : {e}")
            raise

    def _extract(self) -> np.ndarray:
        if not 0 < self.alpha_min <= self.alpha_max:
            raise InputValidationError("need 0 < alpha-min <= alpha-max")
        if self.alpha_count < 1:
            raise InputValidationError("alpha count must be >= 1")
        if self.alpha_min == self.alpha_max:
            return np.array([self.alpha_min])
        return np.geomspace(self.alpha_min, self.alpha_max, self.alpha_count)

    def _transform(self, alphas: np.ndarray) -> pd.DataFrame:
        rows = [
            {
                "alpha_m2s": float(alpha),
                "period_s": float(period),
                "critical_thickness_m": overflow_boundary(alpha, period),
            }
            for period in self.periods
            for alpha in alphas
        ]
        logger.info(f"{len(rows)} grid point(s)")
        return pd.DataFrame(rows, columns=COLUMNS)
