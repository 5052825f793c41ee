"""YAML wall configuration: assembly, films, simulation and correction settings."""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import yaml

from config import runtime_config, solver_config
from src.core import GradientSpec, InputValidationError, Layer, WallAssembly
from src.solvers.perturbation import RECOMBINATIONS
from src.solvers.radiative import RadiativeConfig
from src.solvers.spectral import SimConfig

logger = logging.getLogger("app")

TOP_KEYS = {"assembly", "h_int", "h_ext", "sim", "perturbation", "radiative"}
ASSEMBLY_KEYS = {"layers"}
LAYER_KEYS = {"name", "thickness_m", "conductivity", "density", "specific_heat", "gradient"}
GRADIENT_KEYS = {"conductivity_exterior", "vol_heat_capacity_interior", "vol_heat_capacity_exterior"}
SIM_KEYS = {
    "warmup_s",
    "detrend",
    "solar_absorptivity",
    "noise_threshold",
    "trend_response",
    "dt_s",
}
PERTURBATION_KEYS = {"recombination"}
RADIATIVE_KEYS = {"emissivity", "T_lin_K", "tau_noise", "closure"}


@dataclass(frozen=True)
class WallConfig:
    assembly: WallAssembly
    sim: SimConfig
    recombination: str
    radiative: RadiativeConfig
    dt_s: float | None = None


class _Reader:
    """Schema walk that collects every problem before failing."""

    def __init__(self):
        self.errors: list[str] = []

    def block(self, node: Any, path: str, allowed: set[str], required: set[str] = frozenset()) -> dict:
        if node is None:
            node = {}
        if not isinstance(node, dict):
            self.errors.append(f"{path}: expected a mapping")
            return {}
        for key in sorted(set(node) - allowed, key=str):
            self.errors.append(f"{path}.{key}: unknown key")
        for key in sorted(required - set(node)):
            self.errors.append(f"{path}.{key}: missing")
        return node

    def number(self, node: dict, key: str, path: str, default: float | None = None) -> float | None:
        value = node.get(key, default)
        if value is None:
            return None
        if isinstance(value, str):
            try:
                value = float(value)
            except ValueError:
                pass
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            self.errors.append(f"{path}.{key}: expected a number, got {value!r}")
            return None
        return float(value)

    def flag(self, node: dict, key: str, path: str, default: bool) -> bool:
        value = node.get(key, default)
        if not isinstance(value, bool):
            self.errors.append(f"{path}.{key}: expected true or false, got {value!r}")
            return default
        return value

    def choice(self, node: dict, key: str, path: str, options, default: str) -> str:
        value = node.get(key, default)
        if value not in options:
            self.errors.append(f"{path}.{key}: expected one of {', '.join(options)}, got {value!r}")
            return default
        return value

    def build(self, path: str, factory, **kwargs):
        if any(v is None for v in kwargs.values()):
            return None
        try:
            return factory(**kwargs)
        except InputValidationError as e:
            self.errors.append(f"{path}: {e}")
            return None


class WallConfigExtractor:
    """Extractor for a YAML wall configuration file."""

    def extract(self, file_path: Path, threads: int | None = None) -> WallConfig:
        """Load and validate a wall configuration.

        Args:
            file_path (Path): Path of the YAML file.
            threads (int | None, optional): Harmonic worker threads. Defaults
                to the runtime setting.

        Returns:
            WallConfig: Assembly and settings ready for the solvers.
        """
        file_path = Path(file_path)
        try:
            logger.info(f"Attempting to extract wall configuration from {file_path}.")
            with open(file_path, "r", encoding="utf-8") as f:
                document = yaml.safe_load(f)
            wall = self.parse(document, threads)
            logger.info(
                f"Extraction completed : {wall.assembly.n_layers} layer(s), "
                f"U = {wall.assembly.u_value:.4f} W/(m²·K)."
            )
            return wall
        except InputValidationError as e:
            logger.error(f"wall_config_invalid: {e}")
            raise
        except (OSError, yaml.YAMLError) as e:
            logger.error(f"wall_config_read_failed: {e}")
            raise InputValidationError(f"cannot read wall configuration {file_path}: {e}") from e

    def parse(self, document: Any, threads: int | None = None) -> WallConfig:
        reader = _Reader()
        root = reader.block(document, "config", TOP_KEYS, {"assembly", "h_int", "h_ext"})
        assembly_node = reader.block(root.get("assembly"), "assembly", ASSEMBLY_KEYS, {"layers"})

        layers = []
        layer_nodes = assembly_node.get("layers") or []
        if not isinstance(layer_nodes, list) or not layer_nodes:
            reader.errors.append("assembly.layers: expected a non-empty list")
            layer_nodes = []
        for i, layer_node in enumerate(layer_nodes):
            layer = self._layer(reader, layer_node, f"assembly.layers[{i}]")
            if layer is not None:
                layers.append(layer)

        h_int = reader.number(root, "h_int", "config")
        h_ext = reader.number(root, "h_ext", "config")
        assembly = None
        if len(layers) == len(layer_nodes) and layers:
            assembly = reader.build(
                "assembly", WallAssembly, layers=tuple(layers), h_int=h_int, h_ext=h_ext
            )

        sim_node = reader.block(root.get("sim"), "sim", SIM_KEYS)
        sim = reader.build(
            "sim",
            SimConfig,
            warmup_duration=reader.number(sim_node, "warmup_s", "sim", 2 * solver_config.day_s),
            detrend=reader.flag(sim_node, "detrend", "sim", True),
            solar_absorptivity=reader.number(sim_node, "solar_absorptivity", "sim", 0.6),
            noise_threshold=reader.number(sim_node, "noise_threshold", "sim", solver_config.tau_noise),
            trend_response=reader.choice(
                sim_node, "trend_response", "sim", ("lag", "quasi_static"), "lag"
            ),
            threads=runtime_config.threads if threads is None else threads,
        )
        dt_s = reader.number(sim_node, "dt_s", "sim")

        perturbation_node = reader.block(root.get("perturbation"), "perturbation", PERTURBATION_KEYS)
        recombination = reader.choice(
            perturbation_node, "recombination", "perturbation", RECOMBINATIONS, "reciprocal"
        )

        radiative_node = reader.block(root.get("radiative"), "radiative", RADIATIVE_KEYS)
        radiative = reader.build(
            "radiative",
            RadiativeConfig,
            emissivity=reader.number(radiative_node, "emissivity", "radiative", 0.9),
            tau_noise=reader.number(radiative_node, "tau_noise", "radiative", solver_config.tau_noise),
            closure=reader.choice(radiative_node, "closure", "radiative", ("exterior", "chain"), "exterior"),
        )
        t_lin = reader.number(radiative_node, "T_lin_K", "radiative")
        if radiative is not None and t_lin is not None:
            radiative = reader.build(
                "radiative",
                RadiativeConfig,
                emissivity=radiative.emissivity,
                linearization_temperature=t_lin,
                tau_noise=radiative.tau_noise,
                closure=radiative.closure,
            )

        if reader.errors:
            raise InputValidationError(
                "invalid wall configuration:\n  " + "\n  ".join(reader.errors)
            )
        return WallConfig(
            assembly=assembly,
            sim=sim,
            recombination=recombination,
            radiative=radiative,
            dt_s=dt_s,
        )

    def _layer(self, reader: _Reader, node: Any, path: str) -> Layer | None:
        node = reader.block(
            node, path, LAYER_KEYS, {"thickness_m", "conductivity", "density", "specific_heat"}
        )
        gradient = None
        if node.get("gradient") is not None:
            gradient_node = reader.block(node["gradient"], f"{path}.gradient", GRADIENT_KEYS, GRADIENT_KEYS)
            gradient = reader.build(
                f"{path}.gradient",
                GradientSpec,
                **{key: reader.number(gradient_node, key, f"{path}.gradient") for key in sorted(GRADIENT_KEYS)},
            )
            if gradient is None:
                return None

        name = node.get("name", "")
        if not isinstance(name, str):
            reader.errors.append(f"{path}.name: expected a string")
            name = ""
        properties = {
            key: reader.number(node, key, path)
            for key in ("thickness_m", "conductivity", "density", "specific_heat")
        }
        if any(value is None for value in properties.values()):
            return None
        try:
            return Layer(gradient=gradient, name=name, **properties)
        except InputValidationError as e:
            reader.errors.append(f"{path}: {e}")
            return None
