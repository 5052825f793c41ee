import math
import numbers
from dataclasses import dataclass, field, replace

from src.core.errors import InputValidationError


def _check_positive(owner: str, name: str, value: float) -> None:
    if isinstance(value, bool) or not isinstance(value, numbers.Real) or not (
        math.isfinite(value) and value > 0
    ):
        raise InputValidationError(
            f"{owner}.{name} must be a finite positive number, got {value!r}"
        )


@dataclass(frozen=True)
class GradientSpec:
    """Continuous property gradient across one layer.

    Conductivity grows exponentially from the owning layer's conductivity
    (interior face) to `conductivity_exterior`; volumetric heat capacity varies
    linearly between the two capacities. Both increase along +x, towards the
    exterior.
    """

    conductivity_exterior: float
    vol_heat_capacity_interior: float
    vol_heat_capacity_exterior: float

    def __post_init__(self):
        _check_positive("gradient", "conductivity_exterior", self.conductivity_exterior)
        _check_positive(
            "gradient", "vol_heat_capacity_interior", self.vol_heat_capacity_interior
        )
        _check_positive(
            "gradient", "vol_heat_capacity_exterior", self.vol_heat_capacity_exterior
        )

    def beta(self, conductivity_interior: float, thickness: float) -> float:
        """Exponential growth factor ln(λ(e)/λ_0)/e [1/m]."""
        beta = math.log(self.conductivity_exterior / conductivity_interior) / thickness
        if not math.isfinite(beta):
            raise InputValidationError(f"gradient growth factor is not finite: {beta}")
        return beta

    def d1(self, thickness: float) -> float:
        """Linear capacity gradient [J/(m⁴·K)]."""
        return (self.vol_heat_capacity_exterior - self.vol_heat_capacity_interior) / thickness

    def scaled(self, factor: float, conductivity_interior: float) -> "GradientSpec":
        """Same profile shape with the deviation amplitude multiplied by `factor`."""
        ratio = self.conductivity_exterior / conductivity_interior
        return GradientSpec(
            conductivity_exterior=conductivity_interior * ratio**factor,
            vol_heat_capacity_interior=self.vol_heat_capacity_interior,
            vol_heat_capacity_exterior=self.vol_heat_capacity_interior
            + factor * (self.vol_heat_capacity_exterior - self.vol_heat_capacity_interior),
        )


@dataclass(frozen=True)
class Layer:
    """Homogeneous stratum, optionally carrying a property gradient.

    With a gradient the zero-order medium is (conductivity,
    gradient.vol_heat_capacity_interior); density and specific heat describe
    the material otherwise.
    """

    thickness_m: float
    conductivity: float
    density: float
    specific_heat: float
    gradient: GradientSpec | None = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        owner = f"layer {self.name!r}" if self.name else "layer"
        _check_positive(owner, "thickness_m", self.thickness_m)
        _check_positive(owner, "conductivity", self.conductivity)
        _check_positive(owner, "density", self.density)
        _check_positive(owner, "specific_heat", self.specific_heat)
        if not (math.isfinite(self.diffusivity) and self.diffusivity > 0):
            raise InputValidationError(f"{owner} diffusivity is not finite and positive")
        if self.gradient is not None:
            self.gradient.beta(self.conductivity, self.thickness_m)

    @property
    def vol_heat_capacity(self) -> float:
        if self.gradient is not None:
            return self.gradient.vol_heat_capacity_interior
        return self.density * self.specific_heat

    @property
    def diffusivity(self) -> float:
        return self.conductivity / self.vol_heat_capacity

    @property
    def resistance(self) -> float:
        return self.thickness_m / self.conductivity

    @property
    def beta(self) -> float:
        if self.gradient is None:
            return 0.0
        return self.gradient.beta(self.conductivity, self.thickness_m)

    @property
    def d1(self) -> float:
        if self.gradient is None:
            return 0.0
        return self.gradient.d1(self.thickness_m)

    @property
    def has_gradient(self) -> bool:
        return self.gradient is not None and (self.beta != 0.0 or self.d1 != 0.0)

    def base(self) -> "Layer":
        """Zero-order homogeneous medium of this layer."""
        if self.gradient is None:
            return self
        return self.homogeneous(self.conductivity, self.vol_heat_capacity)

    def homogeneous(self, conductivity: float, vol_heat_capacity: float) -> "Layer":
        """Homogeneous layer of the same thickness and density."""
        return replace(
            self,
            conductivity=conductivity,
            specific_heat=vol_heat_capacity / self.density,
            gradient=None,
        )


@dataclass(frozen=True)
class WallAssembly:
    """Ordered layers from the interior (index 0) to the exterior, with films."""

    layers: tuple[Layer, ...]
    h_int: float
    h_ext: float

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if not self.layers:
            raise InputValidationError("assembly needs at least one layer")
        _check_positive("assembly", "h_int", self.h_int)
        _check_positive("assembly", "h_ext", self.h_ext)

    @property
    def n_layers(self) -> int:
        return len(self.layers)

    @property
    def has_gradients(self) -> bool:
        return any(layer.has_gradient for layer in self.layers)

    @property
    def total_resistance(self) -> float:
        """Zero-order surface-to-surface plus film resistance [m²·K/W]."""
        return 1.0 / self.h_int + sum(l.resistance for l in self.layers) + 1.0 / self.h_ext

    @property
    def u_value(self) -> float:
        return 1.0 / self.total_resistance

    def base(self) -> "WallAssembly":
        """Assembly of zero-order media (gradients stripped)."""
        return replace(self, layers=tuple(l.base() for l in self.layers))

    def mirrored(self) -> "WallAssembly":
        """Zero-order mirror image: reversed layers, swapped films."""
        return WallAssembly(
            layers=tuple(l.base() for l in reversed(self.layers)),
            h_int=self.h_ext,
            h_ext=self.h_int,
        )
