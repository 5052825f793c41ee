import logging
from pathlib import Path

import numpy as np
import pandas as pd

from src.core import InputValidationError, WeatherSeries, first_irregular_sample

logger = logging.getLogger("app")

EXCEL_SUFFIXES = {".xlsx", ".xlsm", ".xls"}
COLUMNS = {
    "time_s": "time_s",
    "T_air_C": "t_air",
    "G_solar_Wm2": "g_solar",
    "T_sky_C": "t_sky",
    "T_set_C": "t_set",
}
REQUIRED_COLUMNS = ("time_s", "T_air_C", "G_solar_Wm2")


class WeatherExtractor:
    """Extractor for a weather table (CSV file or first sheet of an Excel workbook)."""

    def extract(self, file_path: Path, **kwargs) -> WeatherSeries:
        """Extract a uniformly sampled weather series.

        Args:
            file_path (Path): Path of the CSV or Excel file.

        Returns:
            WeatherSeries: Validated weather series.

        Raises:
            InputValidationError: Unreadable file, missing column, missing or
                non-numeric value, or non-uniform time step (row numbers count
                the header as row 1).
        """
        file_path = Path(file_path)
        try:
            logger.info(f"Attempting to extract weather from {file_path}.")
            df = self._read(file_path, **kwargs)
            weather = self._to_series(df)
            logger.info(
                f"Extraction completed : {len(weather)} samples, dt = {weather.dt:g} s."
            )
            return weather
        except InputValidationError as e:
            logger.error(f"weather_invalid: {e}")
            raise
        except (OSError, ValueError) as e:
            logger.error(f"weather_read_failed: {e}")
            raise InputValidationError(f"cannot read weather file {file_path}: {e}") from e

    def _read(self, file_path: Path, **kwargs) -> pd.DataFrame:
        if file_path.suffix.lower() in EXCEL_SUFFIXES:
            return pd.read_excel(io=file_path, sheet_name=0, **kwargs)
        return pd.read_csv(file_path, **kwargs)

    def _to_series(self, df: pd.DataFrame) -> WeatherSeries:
        df = df.rename(columns=lambda c: str(c).strip())
        missing = [c for c in REQUIRED_COLUMNS if c not in df.columns]
        if missing:
            raise InputValidationError(f"weather file lacks column(s) {', '.join(missing)}")
        extra = [c for c in df.columns if c not in COLUMNS]
        if extra:
            logger.warning(f"Ignored weather column(s): {', '.join(extra)}")

        values = {}
        for column, field_name in COLUMNS.items():
            if column not in df.columns:
                continue
            series = pd.to_numeric(df[column], errors="coerce")
            bad = np.flatnonzero(~np.isfinite(series.to_numpy(dtype=float)))
            if bad.size:
                raise InputValidationError(
                    f"missing or non-numeric {column} value at row {bad[0] + 2}"
                )
            values[field_name] = series.to_numpy(dtype=float)

        irregular = first_irregular_sample(values["time_s"])
        if irregular is not None:
            raise InputValidationError(
                f"non-uniform or non-ascending time_s at row {irregular + 2}"
            )
        return WeatherSeries(**values)
