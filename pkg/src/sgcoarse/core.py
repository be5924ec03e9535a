"""Physical parameters, derived scales, and unit handling.

The model is a spin-1/2 particle in a transverse field gradient,

    H = p²/2m + F x σ,

where σ is the spin component along the gradient axis and F the gradient
coupling (units of force).  Everything downstream is controlled by three
timescales built from (m, F, σ_x):

    τ₁ = sqrt(2σ/|a|)   packet separation time      (a = F/m)
    τ₂ = mσ²/ħ          free spreading time
    τ₃ = τ₁²/τ₂         branch-distinguishability time

with σ the initial position spread.  Internally all computation is done in
scaled units (length σ, time τ₂, momentum ħ/σ), which makes m = ħ = σ = 1
and keeps every phase argument and prefactor near unity; SI enters and
leaves only at the API boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

HBAR = 1.054571817e-34  # J s

# Reference run: silver atom, 1 T/mm-class gradient, micron beam waist.
SILVER_MASS_KG = 1.79e-25
SILVER_FORCE_N = 9.27e-22
SILVER_SIGMA_M = 1e-6

_ROOT_HALF = 1.0 / math.sqrt(2.0)

VERSION = "0.1.0"

CONFIG_KEYS = (
    "mass_kg",
    "force_N",
    "sigma_m",
    "c_plus_re",
    "c_plus_im",
    "c_minus_re",
    "c_minus_im",
    "g",
    "mu_B",
    "B0",
)


class NoSeparationError(ValueError):
    """Raised when F = 0 leaves the separation timescale undefined."""


class InvalidWavenumberError(ValueError):
    """Raised for a non-positive longitudinal wavenumber."""


class ResolutionError(ValueError):
    """Raised when a grid is too coarse for the oscillations it must carry."""


@dataclass(frozen=True)
class PhysicalParams:
    """Inputs of a run: mass, gradient force, packet width, spin weights.

    ``force`` may be supplied directly or derived from a gradient triple
    (g, mu_B, B0) via F = -g·mu_B·(ħ/2)·B0; if both are given they must
    agree to 1e-12 relative.
    """

    mass: float
    force: float | None = None
    sigma: float = SILVER_SIGMA_M
    c_plus: complex = complex(_ROOT_HALF, 0.0)
    c_minus: complex = complex(_ROOT_HALF, 0.0)
    hbar: float = HBAR
    g: float | None = None
    mu_B: float | None = None
    B0: float | None = None

    def __post_init__(self) -> None:
        if not (self.mass > 0.0):
            raise ValueError(f"mass must be positive, got {self.mass}")
        if not (self.sigma > 0.0):
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not (self.hbar > 0.0):
            raise ValueError(f"hbar must be positive, got {self.hbar}")

        triple = (self.g, self.mu_B, self.B0)
        have_triple = all(v is not None for v in triple)
        if any(v is not None for v in triple) and not have_triple:
            raise ValueError("gradient triple (g, mu_B, B0) must be given together")

        if have_triple:
            derived = -self.g * self.mu_B * (self.hbar / 2.0) * self.B0
            if self.force is None:
                object.__setattr__(self, "force", derived)
            elif abs(self.force - derived) > 1e-12 * max(abs(self.force), abs(derived)):
                raise ValueError(
                    f"force {self.force!r} inconsistent with gradient triple "
                    f"value {derived!r}"
                )
        elif self.force is None:
            raise ValueError("either force or the full gradient triple is required")

        if not math.isfinite(self.force):
            raise ValueError(f"force must be finite, got {self.force}")

        norm = abs(self.c_plus) ** 2 + abs(self.c_minus) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"spin weights not normalized: |c+|^2+|c-|^2 = {norm!r}")

    @classmethod
    def silver(cls, **overrides) -> "PhysicalParams":
        """Reference silver-atom parameter set."""
        kw = dict(mass=SILVER_MASS_KG, force=SILVER_FORCE_N, sigma=SILVER_SIGMA_M)
        kw.update(overrides)
        return cls(**kw)

    @property
    def accel(self) -> float:
        """Branch acceleration magnitude carrier a = F/m (signed)."""
        return self.force / self.mass

    def weight(self, branch: str) -> complex:
        if branch == "+":
            return self.c_plus
        if branch == "-":
            return self.c_minus
        raise ValueError(f"branch must be '+' or '-', got {branch!r}")


@dataclass(frozen=True)
class DerivedScales:
    """The three timescales plus the signed acceleration they come from."""

    a: float
    tau1: float
    tau2: float
    tau3: float

    def __post_init__(self) -> None:
        for name in ("tau1", "tau2", "tau3"):
            if not (getattr(self, name) > 0.0):
                raise ValueError(f"{name} must be positive")


def derive_scales(params: PhysicalParams) -> DerivedScales:
    """Compute (a, τ₁, τ₂, τ₃) from the run parameters.

    τ₁ uses |a| so that the sign of F never leaks into a timescale.
    """
    if params.force == 0.0:
        raise NoSeparationError("F = 0: no separation timescale exists")
    a = params.accel
    tau1 = math.sqrt(2.0 * params.sigma / abs(a))
    tau2 = params.mass * params.sigma**2 / params.hbar
    tau3 = tau1**2 / tau2
    return DerivedScales(a=a, tau1=tau1, tau2=tau2, tau3=tau3)


@dataclass(frozen=True)
class UnitSystem:
    """Scaled units (length σ, time τ₂ = mσ²/ħ, momentum ħ/σ, action ħ).

    In these units m = ħ = σ = 1.  Conversions are plain multiplications,
    so round trips are exact to floating point.
    """

    sigma: float
    tau2: float
    hbar: float

    @classmethod
    def for_params(cls, params: PhysicalParams) -> "UnitSystem":
        return cls(
            sigma=params.sigma,
            tau2=params.mass * params.sigma**2 / params.hbar,
            hbar=params.hbar,
        )

    # unit values in SI
    @property
    def length(self) -> float:
        return self.sigma

    @property
    def time(self) -> float:
        return self.tau2

    @property
    def momentum(self) -> float:
        return self.hbar / self.sigma

    @property
    def force(self) -> float:
        return self.momentum / self.tau2

    @property
    def accel(self) -> float:
        return self.sigma / self.tau2**2

    @property
    def amplitude(self) -> float:
        """Unit of a 1D wavefunction value, σ^(-1/2)."""
        return self.sigma**-0.5

    @property
    def phase_space_density(self) -> float:
        """Unit of a Wigner density, 1/(σ · ħ/σ) = 1/ħ."""
        return 1.0 / self.hbar

    def scale_length(self, x):
        return x / self.sigma

    def unscale_length(self, x):
        return x * self.sigma

    def scale_time(self, t):
        return t / self.tau2

    def unscale_time(self, t):
        return t * self.tau2

    def scale_momentum(self, p):
        return p / self.momentum

    def unscale_momentum(self, p):
        return p * self.momentum

    def scale_force(self, f):
        return f / self.force

    def scale_accel(self, a):
        return a / self.accel

    def unscale_amplitude(self, phi):
        return phi * self.amplitude

    def unscale_density(self, rho):
        """Position density |φ|²: scaled -> SI (1/m)."""
        return rho / self.sigma

    def unscale_wigner(self, w):
        return w * self.phase_space_density


def paraxial_time(z: float, k: float, params: PhysicalParams) -> float:
    """Time of flight equivalent to propagation distance z at wavenumber k.

    A monochromatic beam along z with E = k²ħ²/(2m) maps the transverse
    problem onto a time-dependent one through t = z m/(k ħ).
    """
    if k <= 0.0:
        raise InvalidWavenumberError(f"wavenumber must be positive, got {k}")
    if z < 0.0:
        raise ValueError(f"propagation distance must be nonnegative, got {z}")
    return z * params.mass / (k * params.hbar)


def paraxial_distance(t: float, k: float, params: PhysicalParams) -> float:
    """Inverse of :func:`paraxial_time`."""
    if k <= 0.0:
        raise InvalidWavenumberError(f"wavenumber must be positive, got {k}")
    if t < 0.0:
        raise ValueError(f"time must be nonnegative, got {t}")
    return t * k * params.hbar / params.mass


def beam_energy(k: float, params: PhysicalParams) -> float:
    """Longitudinal kinetic energy E = k²ħ²/(2m)."""
    if k <= 0.0:
        raise InvalidWavenumberError(f"wavenumber must be positive, got {k}")
    return (k * params.hbar) ** 2 / (2.0 * params.mass)


def parse_config_text(text: str) -> dict[str, float]:
    """Parse ``key = value`` lines; '#' starts a comment; keys are fixed."""
    entries: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        if key in entries:
            raise ValueError(f"config line {lineno}: duplicate key {key!r}")
        try:
            entries[key] = float(value.strip())
        except ValueError as exc:
            raise ValueError(f"config line {lineno}: bad value for {key!r}") from exc
    return entries


def params_from_config(path: str) -> PhysicalParams:
    """Load run parameters from a UTF-8 config file."""
    with open(path, encoding="utf-8") as fh:
        entries = parse_config_text(fh.read())
    return params_from_entries(entries)


def params_from_entries(entries: dict[str, float]) -> PhysicalParams:
    for key in ("mass_kg", "sigma_m"):
        if key not in entries:
            raise ValueError(f"config missing required key {key!r}")
    c_plus = complex(entries.get("c_plus_re", _ROOT_HALF), entries.get("c_plus_im", 0.0))
    c_minus = complex(entries.get("c_minus_re", _ROOT_HALF), entries.get("c_minus_im", 0.0))
    return PhysicalParams(
        mass=entries["mass_kg"],
        force=entries.get("force_N"),
        sigma=entries["sigma_m"],
        c_plus=c_plus,
        c_minus=c_minus,
        g=entries.get("g"),
        mu_B=entries.get("mu_B"),
        B0=entries.get("B0"),
    )


def params_to_entries(params: PhysicalParams) -> dict[str, float]:
    """Serialize parameters to config entries (inverse of parsing)."""
    entries = {
        "mass_kg": params.mass,
        "force_N": params.force,
        "sigma_m": params.sigma,
        "c_plus_re": params.c_plus.real,
        "c_plus_im": params.c_plus.imag,
        "c_minus_re": params.c_minus.real,
        "c_minus_im": params.c_minus.imag,
    }
    if params.g is not None:
        entries.update(g=params.g, mu_B=params.mu_B, B0=params.B0)
    return entries
