from pathlib import Path

import numpy as np
import pytest

from src.core import GradientSpec, Layer, WallAssembly

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"
DIURNAL = 2.0 * np.pi / 86400.0


@pytest.fixture
def aac_layer() -> Layer:
    """Moisture-graded aerated concrete, λ 0.12 → 0.20, ρc_p 0.49e6 → 1.03e6."""
    return Layer(
        thickness_m=0.2,
        conductivity=0.12,
        density=500.0,
        specific_heat=980.0,
        gradient=GradientSpec(
            conductivity_exterior=0.20,
            vol_heat_capacity_interior=0.49e6,
            vol_heat_capacity_exterior=1.03e6,
        ),
        name="aac",
    )


@pytest.fixture
def aac_wall(aac_layer) -> WallAssembly:
    return WallAssembly(layers=(aac_layer,), h_int=7.7, h_ext=18.0)


@pytest.fixture
def concrete() -> Layer:
    return Layer(thickness_m=0.4, conductivity=1.75, density=2400.0, specific_heat=880.0, name="concrete")


@pytest.fixture
def insulated_wall() -> WallAssembly:
    """20 cm concrete + 15 cm EPS, U ≈ 0.2188 W/(m²·K)."""
    return WallAssembly(
        layers=(
            Layer(thickness_m=0.20, conductivity=1.75, density=2400.0, specific_heat=880.0),
            Layer(thickness_m=0.15, conductivity=0.035, density=20.0, specific_heat=1450.0),
        ),
        h_int=7.7,
        h_ext=25.0,
    )


@pytest.fixture
def scenarios() -> Path:
    return SCENARIOS
