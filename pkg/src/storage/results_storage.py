"""Writer for result tables."""

import json
import logging
import math
import sys
from pathlib import Path
from typing import Literal

import pandas as pd

from config import runtime_config

logger = logging.getLogger("app")

Format = Literal["csv", "json"]


class ResultsStorage:
    def __init__(self, float_digits: int = runtime_config.float_digits):
        self.float_digits = float_digits
        self.float_format = f"%.{float_digits}g"

    def render(self, df: pd.DataFrame, fmt: Format = "csv") -> str:
        """Serialise a table with fixed significant digits and a dot decimal.

        Args:
            df (pd.DataFrame): Table to serialise.
            fmt (Format, optional): "csv" or "json". Defaults to "csv".

        Returns:
            str: Serialised table; empty cells (NaN) are blank in CSV, null in JSON.
        """
        if fmt == "csv":
            return df.to_csv(
                index=False, float_format=self.float_format, na_rep="", lineterminator="\n"
            )
        if fmt == "json":
            records = [
                {key: self._json_value(value) for key, value in row.items()}
                for row in df.to_dict(orient="records")
            ]
            return json.dumps(records, indent=1) + "\n"
        raise ValueError(f"unknown output format {fmt!r}")

    def _json_value(self, value):
        if isinstance(value, float):
            if not math.isfinite(value):
                return None
            return float(f"{value:.{self.float_digits}g}")
        if hasattr(value, "item"):
            return self._json_value(value.item())
        return value

    def save(self, df: pd.DataFrame, destination: Path | None = None, fmt: Format = "csv") -> str | None:
        """Write a table to `destination`, or to standard output when it is None.

        Returns:
            str | None: Path written, or None for standard output.
        """
        text = self.render(df, fmt)
        if destination is None:
            sys.stdout.write(text)
            sys.stdout.flush()
            return None
        try:
            destination = Path(destination)
            destination.parent.mkdir(parents=True, exist_ok=True)
            destination.write_text(text, encoding="utf-8")
            logger.info(f"Results written : {destination} ({len(df)} rows)")
            return str(destination)
        except OSError as e:
            logger.error(f"results_write_failed: {e}")
            raise
