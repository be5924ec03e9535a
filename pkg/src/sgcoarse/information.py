"""Entanglement entropy and the information carried by screen positions.

The spin subsystem of the two-branch state is a 2x2 density matrix whose
off-diagonal element is set by the branch overlap.  For equal weights its
von Neumann entropy has the closed form

    S(A) = ln2 - [(1+A)/2] ln(1+A) - [(1-A)/2] ln(1-A)

in nats, where A is the overlap magnitude.  A position measurement on a
pixelated screen reveals part of that correlation: a detection at pixel X
updates the spin probabilities to q_pm(X) and yields I(X) = ln2 - S(X)
nats, and the mean over arrival positions is bounded by the entanglement
entropy.  Everything here works in nats; divide by ln2 for bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .core import DerivedScales, PhysicalParams, derive_scales
from .dynamics import SpinorWavepacket, evolve_in_field
from .numerics import complex_quad, gauss_window, real_quad
from .phase_space import CoarsePixelSpec

__all__ = [
    "LN2",
    "CoverageError",
    "EntanglementSeries",
    "ScreenDistribution",
    "entropy_from_overlap",
    "entanglement_entropy",
    "entanglement_series",
    "overlap_decay",
    "reduced_spin_density",
    "von_neumann_entropy",
    "screen_distribution",
    "mean_information",
    "information_series",
]

LN2 = math.log(2.0)

# screen extent must capture at least this much probability
_COVERAGE_FLOOR = 1.0 - 1e-8

# half-width of integration windows in units of the branch std deviation
_TAIL_SIGMAS = 12.0


class CoverageError(ValueError):
    """Raised when the screen extent misses too much probability mass."""

    def __init__(self, captured: float, required: float = _COVERAGE_FLOOR):
        self.captured = float(captured)
        self.required = float(required)
        super().__init__(
            f"screen captures {self.captured:.12g} of the probability mass, "
            f"needs at least {self.required:.12g}; widen the extent"
        )


def entropy_from_overlap(A):
    """Equal-weight spin entropy (nats) for overlap magnitude A in [0, 1].

    The reduced spin matrix has eigenvalues (1 pm A)/2, so
    S = ln2 - [(1+A)/2]ln(1+A) - [(1-A)/2]ln(1-A), with 0 ln 0 = 0.
    """
    A = np.asarray(A, dtype=float)
    if np.any(A < -1e-12) or np.any(A > 1.0 + 1e-12):
        raise ValueError("overlap magnitude must lie in [0, 1]")
    A = np.clip(A, 0.0, 1.0)
    s = LN2 - 0.5 * (xlogy(1.0 + A, 1.0 + A) + xlogy(1.0 - A, 1.0 - A))
    out = np.clip(s, 0.0, LN2)
    return float(out) if out.ndim == 0 else out


def overlap_decay(t, scales: DerivedScales):
    """Closed-form branch contrast A(t) = exp[-t²(t² + τ₂²)/τ₁⁴].

    This is the decay law the entanglement entropy is defined through; it
    fixes the t ~ τ₃ entanglement timescale.  Times in seconds.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise ValueError("time must be nonnegative")
    expo = t * t * (t * t + scales.tau2**2) / scales.tau1**4
    out = np.exp(-expo)
    return float(out) if out.ndim == 0 else out


def entanglement_entropy(t, scales: DerivedScales):
    """(A, S_ent) at time t for the equal-weight state, S in nats.

    The closed form assumes c_pm = 1/sqrt(2); for general weights use
    :func:`reduced_spin_density` and :func:`von_neumann_entropy`.
    t may be a scalar or an array; t < 0 raises.
    """
    A = overlap_decay(t, scales)
    return A, entropy_from_overlap(A)


@dataclass(frozen=True)
class EntanglementSeries:
    """Entanglement history: times (s), contrast A(t), entropy (nats)."""

    times: np.ndarray
    A_values: np.ndarray
    S_ent: np.ndarray

    def __post_init__(self) -> None:
        if not (self.times.shape == self.A_values.shape == self.S_ent.shape):
            raise ValueError("series fields must share one shape")

    @property
    def S_ent_bits(self) -> np.ndarray:
        return self.S_ent / LN2


def entanglement_series(scales: DerivedScales, times) -> EntanglementSeries:
    times = np.atleast_1d(np.asarray(times, dtype=float))
    A, S = entanglement_entropy(times, scales)
    return EntanglementSeries(times=times, A_values=np.atleast_1d(A), S_ent=np.atleast_1d(S))


def reduced_spin_density(state: SpinorWavepacket) -> np.ndarray:
    """Trace out position: 2x2 spin density matrix, overlap by quadrature.

    rho[s, s'] = c_s c_s'* <phi_s'|phi_s> with the overlap integral done
    adaptively on the scaled axis.  Works for arbitrary weights.
    """
    cp, cm = state.params.c_plus, state.params.c_minus
    plus, minus = state.plus, state.minus

    # integration window: union of branch supports, scaled units
    centers = (plus.center, minus.center)
    widths = (math.sqrt(plus.variance), math.sqrt(minus.variance))
    lo = min(c - _TAIL_SIGMAS * w for c, w in zip(centers, widths))
    hi = max(c + _TAIL_SIGMAS * w for c, w in zip(centers, widths))

    def integrand(x):
        return plus.value(x) * np.conj(minus.value(x))

    overlap = complex_quad(integrand, lo, hi, epsabs=1e-13, points=centers)
    off = cp * np.conj(cm) * overlap
    return np.array(
        [[abs(cp) ** 2, off], [np.conj(off), abs(cm) ** 2]], dtype=complex
    )


def von_neumann_entropy(rho: np.ndarray) -> float:
    """-Tr rho ln rho in nats for a Hermitian density matrix."""
    lam = np.linalg.eigvalsh(np.asarray(rho))
    if lam.min() < -1e-10 or abs(lam.sum() - 1.0) > 1e-8:
        raise ValueError(f"not a density spectrum: {lam}")
    lam = np.clip(lam, 0.0, None)
    return float(-np.sum(xlogy(lam, lam)))


@dataclass(frozen=True)
class ScreenDistribution:
    """Per-pixel detection statistics on a position screen.

    X are pixel centers (m), Delta the common pixel width.  P_plus/P_minus
    are joint probabilities of (arrive in pixel, spin branch); q_plus and
    q_minus condition on arrival.  S is the conditional spin entropy and
    I = ln2 - S the information gained per event, both in nats.
    """

    X: np.ndarray
    Delta: float
    P_plus: np.ndarray
    P_minus: np.ndarray
    q_plus: np.ndarray
    q_minus: np.ndarray
    S: np.ndarray
    I: np.ndarray
    captured: float

    def total(self) -> float:
        """Probability mass inside the screen."""
        return float(np.sum(self.P_plus + self.P_minus))

    def mean_information(self) -> float:
        """Pixel-sum mean information per event, Σ_X P(X) I(X), nats."""
        return float(np.sum((self.P_plus + self.P_minus) * self.I))


def _density_form(state: SpinorWavepacket, branch: str):
    """|c_s phi_s(x)|² = C exp(-ar (x - mu)²) on the scaled axis."""
    g = state.branch(branch)
    ar = 2.0 * g.alpha.real
    mu = -g.beta.real / ar
    logC = 2.0 * math.log(abs(g.norm)) - 2.0 * g.gamma.real + ar * mu * mu
    w2 = abs(state.params.weight(branch)) ** 2
    return w2 * math.exp(logC), mu, ar, math.log(w2) + logC


def _pixel_grid(extent, Delta: float, alignment: str) -> np.ndarray:
    """Pixel centers tiling [extent[0], extent[1]] with width Delta."""
    lo, hi = float(extent[0]), float(extent[1])
    if not hi > lo:
        raise ValueError("extent must be an increasing (lo, hi) pair")
    if alignment == "center":
        # a pixel centered exactly at X = 0
        k_lo = math.floor((lo + 0.5 * Delta) / Delta)
        k_hi = math.ceil((hi - 0.5 * Delta) / Delta)
    elif alignment == "edge":
        # pixel edges on multiples of Delta; refinements by integer
        # factors nest, which makes coarse graining provably lossy
        k_lo = math.floor(lo / Delta) + 0.5
        k_hi = math.ceil(hi / Delta) - 0.5
    else:
        raise ValueError(f"alignment must be 'center' or 'edge', got {alignment!r}")
    return Delta * np.arange(k_lo, k_hi + 1)


def screen_distribution(
    state: SpinorWavepacket,
    pixels,
    extent=None,
    *,
    alignment: str = "center",
) -> ScreenDistribution:
    """Detection probabilities per pixel and the information they carry.

    ``pixels`` is a CoarsePixelSpec (its position width is used) or a bare
    width in meters.  ``extent`` is an (x_lo, x_hi) window in meters; by
    default it is grown to hold essentially all of the probability.  The
    pixel masses are exact error-function integrals of each Gaussian
    branch.  Raises CoverageError if the extent misses more than 1e-8 of
    the total mass.

    alignment='center' puts one pixel center at X = 0 (so a symmetric
    state gives I(0) = 0); alignment='edge' puts pixel boundaries on
    multiples of the width, so integer coarsenings nest.
    """
    Delta = float(pixels.Delta if isinstance(pixels, CoarsePixelSpec) else pixels)
    if not Delta > 0.0:
        raise ValueError(f"pixel width must be positive, got {Delta}")
    u = state.units
    dh = u.scale_length(Delta)

    forms = {b: _density_form(state, b) for b in "+-"}
    if extent is None:
        lo = min(f[1] - _TAIL_SIGMAS / math.sqrt(f[2]) for f in forms.values())
        hi = max(f[1] + _TAIL_SIGMAS / math.sqrt(f[2]) for f in forms.values())
    else:
        lo, hi = u.scale_length(float(extent[0])), u.scale_length(float(extent[1]))

    Xh = _pixel_grid((lo, hi), dh, alignment)
    edges_lo, edges_hi = Xh - 0.5 * dh, Xh + 0.5 * dh

    mass = {}
    for b, (C, mu, ar, _) in forms.items():
        mass[b] = C * gauss_window(edges_lo, edges_hi, mu, ar)
    p_plus, p_minus = mass["+"], mass["-"]

    captured = float(np.sum(p_plus + p_minus))
    if captured < _COVERAGE_FLOOR:
        raise CoverageError(captured)

    # conditional spin probabilities; far tails fall back to the exact
    # log-density ratio at the pixel center so 0/0 never appears
    tot = p_plus + p_minus
    safe = tot > 1e-300
    lp = forms["+"][3] - forms["+"][2] * (Xh - forms["+"][1]) ** 2
    lm = forms["-"][3] - forms["-"][2] * (Xh - forms["-"][1]) ** 2
    with np.errstate(divide="ignore", over="ignore"):
        q_plus = np.where(
            safe,
            np.divide(p_plus, tot, out=np.zeros_like(tot), where=safe),
            1.0 / (1.0 + np.exp(np.clip(lm - lp, -700.0, 700.0))),
        )
    q_plus = np.clip(q_plus, 0.0, 1.0)
    q_minus = 1.0 - q_plus

    S = -(xlogy(q_plus, q_plus) + xlogy(q_minus, q_minus))
    I = np.clip(LN2 - S, 0.0, LN2)

    return ScreenDistribution(
        X=u.unscale_length(Xh),
        Delta=Delta,
        P_plus=p_plus,
        P_minus=p_minus,
        q_plus=q_plus,
        q_minus=q_minus,
        S=S,
        I=I,
        captured=captured,
    )


def mean_information(
    state: SpinorWavepacket,
    fine_limit: bool = True,
    pixels=None,
    extent=None,
    *,
    alignment: str = "center",
) -> float:
    """Mean information per detection event, nats.

    fine_limit=True evaluates the continuum form
        H = ln2 - ∫P lnP + ∫P₊ lnP₊ + ∫P₋ lnP₋
    as ∫ P(x) I(x) dx, which is its numerically stable rearrangement (the
    dimensionful logs cancel exactly).  fine_limit=False sums P(X) I(X)
    over the pixels instead (default pixel spec if none given).
    """
    if not fine_limit:
        spec = CoarsePixelSpec.default() if pixels is None else pixels
        return screen_distribution(
            state, spec, extent, alignment=alignment
        ).mean_information()

    (Cp, mup, arp, lCp) = _density_form(state, "+")
    (Cm, mum, arm, lCm) = _density_form(state, "-")
    lo = min(mup - _TAIL_SIGMAS / math.sqrt(arp), mum - _TAIL_SIGMAS / math.sqrt(arm))
    hi = max(mup + _TAIL_SIGMAS / math.sqrt(arp), mum + _TAIL_SIGMAS / math.sqrt(arm))

    def integrand(x):
        pp = Cp * math.exp(-arp * (x - mup) ** 2)
        pm = Cm * math.exp(-arm * (x - mum) ** 2)
        # log-ratio is exact even where the densities underflow
        dl = (lCp - arp * (x - mup) ** 2) - (lCm - arm * (x - mum) ** 2)
        if dl >= 0.0:
            w_plus = 1.0 / (1.0 + math.exp(-dl))
        else:
            e = math.exp(dl)
            w_plus = e / (1.0 + e)
        w_minus = 1.0 - w_plus
        s = -(xlogy(w_plus, w_plus) + xlogy(w_minus, w_minus))
        return (pp + pm) * (LN2 - s)

    val = real_quad(integrand, lo, hi, epsabs=1e-11, points=(mup, mum))
    return float(min(max(val, 0.0), LN2))


def information_series(params: PhysicalParams, times, *, fine_limit: bool = True):
    """(times, H, S_ent) arrays over a sweep of in-field evolution times."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    scales = derive_scales(params)
    H = np.empty_like(times)
    for i, t in enumerate(times):
        H[i] = mean_information(evolve_in_field(params, float(t)), fine_limit=fine_limit)
    _, S = entanglement_entropy(times, scales)
    return times, H, np.atleast_1d(S)
