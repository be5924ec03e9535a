"""Spinor density matrices, Wigner matrices, and pixel-window coarse graining.

The spin-branch state c₊φ₊ ⊕ c₋φ₋ has the position-space density matrix

    ρ_αβ(x,x') = c_α φ_α(x) c_β* φ_β*(x'),   αβ ∈ {++, +-, -+, --},

and the Wigner matrix

    W_αβ(q,p) = (1/2πħ) ∫ ρ_αβ(q+y/2, q-y/2) e^{-ipy/ħ} dy.

Because every branch is a Gaussian exp(-(αx²+βx+γ)) the y-integral closes:
each W_αβ is exp of a quadratic form in (q,p).  For equal-width branch pairs
the quadratic coefficients are real and only the linear ones are complex, so
the off-diagonal blocks are Gaussian envelopes times a plane-wave phase; the
position wavenumber of that phase is 2mat/ħ, giving the fringe spacing scale
d = ħ/(2Ft).

Coarse graining averages each entry over a Δ×δ phase-space pixel.  The
q-side integral of envelope × oscillation is done with the damped-erf window
from numerics (stable at arbitrary wavenumber); the p-side is Gauss-Legendre
restricted to the overlap of the window with the Gaussian support, with the
full exponent assembled before a single exponentiation so that suppressed
pixels underflow cleanly to zero instead of producing inf·0.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .core import HBAR, PhysicalParams, ResolutionError, UnitSystem
from .dynamics import SpinorWavepacket, branch_sign
from .numerics import gauss_legendre_nodes, gauss_window, osc_gauss_window

SPIN_PAIRS = ("++", "--", "+-", "-+")

DEFAULT_PIXEL_DELTA_M = 1e-6
DEFAULT_CELL_RATIO = 100.0
_SUPPORT_SIGMAS = 12.0  # Gaussian reach kept in window intersections


# ---------------------------------------------------------------------------
# density matrix


@dataclass(frozen=True)
class DensityMatrixField:
    """ρ_αβ(x,x') sampled on an x-grid; blocks are rank-one outer products."""

    params: PhysicalParams
    t: float  # s
    x: np.ndarray  # m, strictly increasing
    amp_plus: np.ndarray  # c₊φ₊(x), 1/√m
    amp_minus: np.ndarray

    def amp(self, branch: str) -> np.ndarray:
        return self.amp_plus if branch_sign(branch) > 0 else self.amp_minus

    def block(self, pair: str) -> np.ndarray:
        """ρ_αβ(x,x') as a dense (n, n) array, row index x, column x'."""
        if pair not in SPIN_PAIRS:
            raise ValueError(f"pair must be one of {SPIN_PAIRS}, got {pair!r}")
        return np.outer(self.amp(pair[0]), np.conj(self.amp(pair[1])))

    def diagonal_density(self) -> np.ndarray:
        """Σ_α ρ_αα(x,x) = |c₊φ₊|² + |c₋φ₋|², 1/m."""
        return np.abs(self.amp_plus) ** 2 + np.abs(self.amp_minus) ** 2

    def hermiticity_defect(self) -> float:
        """max |ρ_αβ(x,x') - ρ_βα*(x',x)| over blocks and grid points.

        Relative to the largest matrix element, so the value is scale free
        (ρ carries units of 1/m on the position diagonal).
        """
        worst = 0.0
        scale = 0.0
        for pair in ("++", "--", "+-"):
            swapped = pair[::-1]
            b = self.block(pair)
            d = np.abs(b - np.conj(self.block(swapped)).T)
            worst = max(worst, float(d.max()))
            scale = max(scale, float(np.abs(b).max()))
        return worst / scale if scale > 0.0 else worst

    def purity(self) -> float:
        """Tr ρ² over the discretized joint (position ⊗ spin) space.

        For rank-one blocks ρ_αβ = a_α ⊗ a_β* the double integral collapses
        to (Σ_α ∫|a_α|²)², the squared total norm.
        """
        w = np.gradient(self.x)
        total = float(
            np.sum(w * (np.abs(self.amp_plus) ** 2 + np.abs(self.amp_minus) ** 2))
        )
        return total * total


def density_matrix(state: SpinorWavepacket, grid) -> DensityMatrixField:
    """Sample the spinor density matrix of `state` on a position grid (m)."""
    x = np.asarray(grid, dtype=float)
    if x.size == 0:
        raise ValueError("position grid is empty")
    if x.ndim != 1 or not np.all(np.isfinite(x)):
        raise ValueError("position grid must be a finite 1D array")
    if x.size > 1 and not np.all(np.diff(x) > 0):
        raise ValueError("position grid must be strictly increasing")
    return DensityMatrixField(
        params=state.params,
        t=state.t,
        x=x,
        amp_plus=state.amplitude("+", x),
        amp_minus=state.amplitude("-", x),
    )


# ---------------------------------------------------------------------------
# closed-form Wigner blocks


@dataclass(frozen=True)
class _PairForm:
    """Scaled W_αβ(q,p) = exp(log_pref - cqq q² - cpp p² - cqp qp - cq q - cp p - c0).

    cqq, cpp, cqp are real for equal-width branch pairs (enforced at build
    time); the linear coefficients carry the interference phase.
    """

    log_pref: complex
    cqq: float
    cpp: float
    cqp: float
    cq: complex
    cp: complex
    c0: complex

    def exponent(self, q, p):
        return (
            self.log_pref
            - self.cqq * q**2
            - self.cpp * p**2
            - self.cqp * q * p
            - self.cq * q
            - self.cp * p
            - self.c0
        )

    def value(self, q, p):
        return np.exp(self.exponent(q, p))


def _pair_form(state: SpinorWavepacket, pair: str) -> _PairForm:
    """Close the Wigner y-integral for one spin pair of a Gaussian state."""
    bs = state.branch(pair[0])
    bo = state.branch(pair[1])
    cs = state.params.weight(pair[0])
    co = state.params.weight(pair[1])
    a_sum = bs.alpha + np.conj(bo.alpha)
    a_dif = bs.alpha - np.conj(bo.alpha)
    b_sum = bs.beta + np.conj(bo.beta)
    b_dif = (bs.beta - np.conj(bo.beta)) / 2.0
    g_sum = bs.gamma + np.conj(bo.gamma)
    a2 = a_sum / 4.0  # y² coefficient of the integrand
    if a2.real <= 0.0:
        raise ValueError("branch pair has non-normalizable Wigner integrand")
    cqq = a_sum - a_dif**2 / (4.0 * a2)
    cpp = 1.0 / (4.0 * a2)
    cqp = -1j * a_dif / (2.0 * a2)
    if abs(cqq.imag) > 1e-10 * abs(cqq.real) + 1e-300:
        raise ValueError("unequal branch widths: quadratic form not real")
    pref = (
        cs
        * np.conj(co)
        * bs.norm
        * np.conj(bo.norm)
        / (2.0 * np.pi)
        * np.sqrt(np.pi / a2)
    )
    return _PairForm(
        log_pref=complex(np.log(pref)),
        cqq=float(cqq.real),
        cpp=float(cpp.real),
        cqp=float(cqp.real),
        cq=complex(b_sum - a_dif * b_dif / (2.0 * a2)),
        cp=complex(-1j * b_dif / (2.0 * a2)),
        c0=complex(g_sum - b_dif**2 / (4.0 * a2)),
    )


def _require_analytic(state: SpinorWavepacket) -> None:
    if not state.in_field:
        raise ValueError(
            "state has left the field region; the single-Gaussian closed form "
            "does not apply, use wigner_numeric on a sampled density matrix"
        )


@dataclass(frozen=True)
class WignerValue:
    """One 2x2 Hermitian Wigner matrix value (or an array of them), SI units."""

    w_pp: np.ndarray
    w_mm: np.ndarray
    w_pm: np.ndarray

    @property
    def w_mp(self) -> np.ndarray:
        return np.conj(self.w_pm)

    def block(self, pair: str):
        if pair == "++":
            return self.w_pp
        if pair == "--":
            return self.w_mm
        if pair == "+-":
            return self.w_pm
        if pair == "-+":
            return self.w_mp
        raise ValueError(f"pair must be one of {SPIN_PAIRS}, got {pair!r}")

    def matrix(self) -> np.ndarray:
        """2x2 array for scalar evaluations."""
        return np.array(
            [[complex(self.w_pp), complex(self.w_pm)],
             [complex(self.w_mp), complex(self.w_mm)]]
        )


def wigner_analytic(state: SpinorWavepacket, q, p) -> WignerValue:
    """Closed-form Wigner matrix of an in-field state at positions q (m) and
    momenta p (kg·m/s).  Array inputs are treated as coordinate axes: the
    result blocks have shape (len(q), len(p))."""
    _require_analytic(state)
    u = state.units
    qh = np.asarray(u.scale_length(q), dtype=float)
    ph = np.asarray(u.scale_momentum(p), dtype=float)
    scalar = qh.ndim == 0 and ph.ndim == 0
    qg = qh.reshape(-1, 1)
    pg = ph.reshape(1, -1)
    blocks = {}
    for pair in ("++", "--", "+-"):
        w = _pair_form(state, pair).value(qg, pg)
        blocks[pair] = u.unscale_wigner(w)
    w_pp = blocks["++"].real
    w_mm = blocks["--"].real
    w_pm = blocks["+-"]
    if scalar:
        return WignerValue(w_pp[0, 0], w_mm[0, 0], w_pm[0, 0])
    return WignerValue(w_pp, w_mm, w_pm)


# ---------------------------------------------------------------------------
# numeric Wigner transform


def _numeric_state_wavenumber(params: PhysicalParams, t: float) -> float:
    """Scaled bound on the phase gradient carried by the state itself."""
    u = UnitSystem.for_params(params)
    return abs(u.scale_accel(params.accel)) * u.scale_time(t) + 10.0


def wigner_numeric(rho: DensityMatrixField, q, p) -> WignerValue:
    """Wigner matrix by direct Fourier transform of a sampled density matrix.

    q values are snapped to the nearest node of rho's own grid so that
    q ± y/2 stays on the grid; the y-trapezoid is then spectrally accurate
    for the smooth decaying integrands produced by Gaussian packets.
    Array q, p are coordinate axes as in wigner_analytic.
    """
    x = rho.x
    if x.size < 3:
        raise ValueError("density matrix grid too small for a transform")
    dx = float(x[1] - x[0])
    if not np.allclose(np.diff(x), dx, rtol=1e-9):
        raise ValueError("wigner_numeric requires a uniform grid")
    qa = np.atleast_1d(np.asarray(q, dtype=float))
    pa = np.atleast_1d(np.asarray(p, dtype=float))
    scalar = np.ndim(q) == 0 and np.ndim(p) == 0

    u = UnitSystem.for_params(rho.params)
    hbar = rho.params.hbar
    k_state = _numeric_state_wavenumber(rho.params, rho.t) / rho.params.sigma
    p_max = float(np.max(np.abs(pa))) if pa.size else 0.0
    need = np.pi / (8.0 * (p_max / hbar + k_state))
    if dx > need:
        raise ResolutionError(
            f"Wigner transform undersampled at |p| = {p_max:.6e} kg m/s: "
            f"grid spacing {dx:.6e} m exceeds {need:.6e} m"
        )

    idx = np.clip(np.searchsorted(x, qa), 1, x.size - 1)
    idx = np.where(np.abs(x[idx] - qa) < np.abs(x[idx - 1] - qa), idx, idx - 1)

    out = {pair: np.empty((qa.size, pa.size), dtype=complex) for pair in SPIN_PAIRS}
    amps = {"+": rho.amp_plus, "-": rho.amp_minus}
    for row, i in enumerate(idx):
        m = min(i, x.size - 1 - i)
        j = np.arange(-m, m + 1)
        y = 2.0 * dx * j
        phase = np.exp(-1j * np.outer(y, pa) / hbar)  # (ny, np)
        for pair in SPIN_PAIRS:
            r = amps[pair[0]][i + j] * np.conj(amps[pair[1]][i - j])
            out[pair][row, :] = (r @ phase) * (2.0 * dx / (2.0 * np.pi * hbar))
    w_pp, w_mm = out["++"], out["--"]
    w_pm, w_mp = out["+-"], out["-+"]
    herm = float(np.max(np.abs(w_mp - np.conj(w_pm)))) if w_pm.size else 0.0
    diag_imag = float(max(np.max(np.abs(w_pp.imag)), np.max(np.abs(w_mm.imag))))
    val = WignerValue(w_pp.real, w_mm.real, w_pm)
    object.__setattr__(val, "_hermiticity_residue", herm * u.hbar)
    object.__setattr__(val, "_diag_imag_residue", diag_imag * u.hbar)
    if scalar:
        return WignerValue(val.w_pp[0, 0], val.w_mm[0, 0], val.w_pm[0, 0])
    return val


def density_grid_for_wigner(
    state: SpinorWavepacket,
    q: np.ndarray,
    p_max: float,
    pad_widths: float = 14.0,
) -> DensityMatrixField:
    """Sample a density matrix on a uniform grid aligned with the q nodes and
    fine enough for wigner_numeric at momenta up to |p_max|."""
    qa = np.asarray(q, dtype=float)
    dq = float(qa[1] - qa[0]) if qa.size > 1 else state.params.sigma
    hbar = state.params.hbar
    k_state = _numeric_state_wavenumber(state.params, state.t) / state.params.sigma
    need = np.pi / (8.0 * (abs(p_max) / hbar + k_state))
    r = max(1, math.ceil(dq / (0.9 * need)))
    dx = dq / r
    u = state.units
    th = u.scale_time(state.t)
    width = state.params.sigma * math.sqrt((1.0 + th * th) / 2.0)
    reach = pad_widths * width + abs(state.center("+")) + abs(state.center("-"))
    lo = qa[0] - reach
    hi = qa[-1] + reach
    n_lo = math.ceil((qa[0] - lo) / dx)
    n_hi = math.ceil((hi - qa[-1]) / dx)
    x = qa[0] + dx * np.arange(-n_lo, (qa.size - 1) * r + n_hi + 1)
    return density_matrix(state, x)


# ---------------------------------------------------------------------------
# Wigner fields and pixels


@dataclass(frozen=True)
class CoarsePixelSpec:
    """Phase-space pixel: Δ in position (m), δ in momentum (kg·m/s)."""

    Delta: float
    delta: float

    def __post_init__(self) -> None:
        if not (self.Delta > 0.0 and math.isfinite(self.Delta)):
            raise ValueError(f"Delta must be positive, got {self.Delta}")
        if not (self.delta > 0.0 and math.isfinite(self.delta)):
            raise ValueError(f"delta must be positive, got {self.delta}")

    @property
    def cell_ratio(self) -> float:
        """Pixel area in units of Planck's constant h."""
        return self.Delta * self.delta / (2.0 * np.pi * HBAR)

    @classmethod
    def default(cls, Delta: float = DEFAULT_PIXEL_DELTA_M, cell_ratio: float = DEFAULT_CELL_RATIO) -> "CoarsePixelSpec":
        """Pixel of width Δ whose area is `cell_ratio` Planck cells."""
        return cls(Delta=Delta, delta=cell_ratio * 2.0 * np.pi * HBAR / Delta)


@dataclass(frozen=True)
class WignerMatrixField:
    """2×2 Hermitian Wigner matrix on a (q, p) grid, SI units.

    Diagonal blocks are stored real; W₋₊ is the conjugate of the stored
    W₊₋, so the field is Hermitian by construction.  `source` keeps the
    generating state when the field came from the closed form (enabling
    exact marginals and analytic coarse graining); `pixels` is set on
    coarse-grained fields.
    """

    params: PhysicalParams
    t: float  # s
    q: np.ndarray  # m
    p: np.ndarray  # kg·m/s
    w_pp: np.ndarray  # (nq, np) real
    w_mm: np.ndarray
    w_pm: np.ndarray  # complex
    source: SpinorWavepacket | None = None
    pixels: CoarsePixelSpec | None = None
    diag_imag_residue: float = 0.0
    hermiticity_residue: float = 0.0

    @property
    def w_mp(self) -> np.ndarray:
        return np.conj(self.w_pm)

    def block(self, pair: str) -> np.ndarray:
        if pair == "++":
            return self.w_pp
        if pair == "--":
            return self.w_mm
        if pair == "+-":
            return self.w_pm
        if pair == "-+":
            return self.w_mp
        raise ValueError(f"pair must be one of {SPIN_PAIRS}, got {pair!r}")

    def value(self, iq: int, ip: int) -> WignerValue:
        return WignerValue(
            self.w_pp[iq, ip], self.w_mm[iq, ip], self.w_pm[iq, ip]
        )

    def marginal_position(self, pair: str = "++") -> np.ndarray:
        """∫ W_αβ(q,p) dp on the q nodes (1/m).

        Fields carrying an analytic source integrate p in closed form, so
        the result is exact regardless of the stored p sampling; other
        fields fall back to the trapezoid on their own p grid.
        """
        if self.source is not None and self.pixels is None and self.source.in_field:
            u = self.source.units
            form = _pair_form(self.source, pair)
            qh = np.asarray(u.scale_length(self.q), dtype=float)
            lp = form.cp + form.cqp * qh
            ex = (
                form.log_pref
                - form.cqq * qh**2
                - form.cq * qh
                - form.c0
                + lp**2 / (4.0 * form.cpp)
            )
            val = np.exp(ex) * np.sqrt(np.pi / form.cpp)
            return u.unscale_density(val)
        return np.trapezoid(self.block(pair), x=self.p, axis=1)

    def total(self) -> float:
        """∬ (W₊₊ + W₋₋) dq dp."""
        if self.source is not None and self.pixels is None and self.source.in_field:
            dens = self.marginal_position("++") + self.marginal_position("--")
            return float(np.trapezoid(dens.real, x=self.q))
        dens = self.w_pp + self.w_mm
        return float(np.trapezoid(np.trapezoid(dens, x=self.p, axis=1), x=self.q))

    def iter_csv_rows(self):
        """Rows `q,p,W_pp,W_mm,Re_W_pm,Im_W_pm`, row-major q then p."""
        for i in range(self.q.size):
            for j in range(self.p.size):
                yield (
                    self.q[i],
                    self.p[j],
                    self.w_pp[i, j],
                    self.w_mm[i, j],
                    self.w_pm[i, j].real,
                    self.w_pm[i, j].imag,
                )


WIGNER_CSV_HEADER = "q,p,W_pp,W_mm,Re_W_pm,Im_W_pm"


def default_phase_space_grid(
    params: PhysicalParams, t: float, n_q: int = 512, n_p: int = 512
) -> tuple[np.ndarray, np.ndarray]:
    """Grids containing both displaced packets and the kicked momenta ±Ft."""
    a = abs(params.accel)
    f = abs(params.force) if params.force is not None else 0.0
    q_half = 10.0 * params.sigma + 0.5 * a * t * t
    p_half = 10.0 * (params.hbar / params.sigma + f * t)
    return (
        np.linspace(-q_half, q_half, n_q),
        np.linspace(-p_half, p_half, n_p),
    )


def wigner_field(
    state: SpinorWavepacket,
    q: np.ndarray | None = None,
    p: np.ndarray | None = None,
    method: str = "analytic",
    n_q: int = 512,
    n_p: int = 512,
) -> WignerMatrixField:
    """Evaluate the Wigner matrix of `state` on a (q,p) grid."""
    if q is None or p is None:
        dq, dp = default_phase_space_grid(state.params, state.t, n_q, n_p)
        q = dq if q is None else np.asarray(q, dtype=float)
        p = dp if p is None else np.asarray(p, dtype=float)
    else:
        q = np.asarray(q, dtype=float)
        p = np.asarray(p, dtype=float)
    if method == "analytic":
        val = wigner_analytic(state, q, p)
        return WignerMatrixField(
            params=state.params, t=state.t, q=q, p=p,
            w_pp=val.w_pp, w_mm=val.w_mm, w_pm=val.w_pm, source=state,
        )
    if method == "numeric":
        rho = density_grid_for_wigner(state, q, float(np.max(np.abs(p))))
        val = wigner_numeric(rho, q, p)
        return WignerMatrixField(
            params=state.params, t=state.t, q=q, p=p,
            w_pp=val.w_pp, w_mm=val.w_mm, w_pm=val.w_pm, source=None,
            diag_imag_residue=getattr(val, "_diag_imag_residue", 0.0),
            hermiticity_residue=getattr(val, "_hermiticity_residue", 0.0),
        )
    raise ValueError(f"method must be 'analytic' or 'numeric', got {method!r}")


# ---------------------------------------------------------------------------
# coarse graining


def _box_average_form(
    form: _PairForm,
    qh: np.ndarray,
    ph: np.ndarray,
    hu: float,
    hv: float,
) -> np.ndarray:
    """Window average of exp(form) over [q±hu]×[p±hv], scaled units.

    Inner u-integral analytic (damped oscillatory erf window); outer
    v-integral by Gauss-Legendre on the overlap of the window with the
    integrand's Gaussian support.  qh, ph broadcast against each other.
    """
    cqq, cpp, cqp = form.cqq, form.cpp, form.cqp
    if cqq <= 0.0:
        raise ValueError("coarse graining needs a decaying position envelope")
    ki = float(form.cq.imag)  # u-phase rate, constant over the field

    # Re exponent as a quadratic in v (after closing the u integral):
    #   A_v v² + B_v(q,p) v + const,  A_v < 0 for normalizable blocks
    a_v = -cpp + cqp * cqp / (4.0 * cqq)
    if a_v >= 0.0:
        raise ValueError("coarse graining needs a decaying momentum envelope")
    l0 = 2.0 * cqq * qh + form.cq + cqp * ph  # u-linear coeff at v=0
    b_v = -2.0 * cpp * ph - cqp * qh - form.cp.real + cqp * l0.real / (2.0 * cqq)
    v_star = np.real(b_v) / (-2.0 * a_v)
    reach = _SUPPORT_SIGMAS / math.sqrt(-a_v)
    lo = np.maximum(-hv, v_star - reach)
    hi = np.minimum(hv, v_star + reach)
    live = hi > lo
    lo = np.where(live, lo, 0.0)
    hi = np.where(live, hi, 0.0)

    # Composite Gauss-Legendre in v: panel width short enough to resolve
    # both the Gaussian envelope (scale 1/sqrt|A_v|) and the v-phase rate.
    rate = abs(-form.cp.imag + ki * cqp / (2.0 * cqq))
    span = min(2.0 * hv, 2.0 * reach)
    panel = 2.0 / math.sqrt(-a_v)
    if rate > 0.0:
        panel = min(panel, 8.0 / rate)
    n_panels = min(max(1, math.ceil(span / panel)), 64)
    xg, wg = gauss_legendre_nodes(0.0, 1.0, 12)
    offsets = [(k + xk) / n_panels for k in range(n_panels) for xk in xg]
    weights = [wk / n_panels for _ in range(n_panels) for wk in wg]

    acc = np.zeros(np.broadcast(qh, ph).shape, dtype=complex)
    width = hi - lo
    for xk, wk in zip(offsets, weights):
        v = lo + width * xk
        pv = ph + v
        lu = 2.0 * cqq * qh + form.cq + cqp * pv
        lr = lu.real
        s = lr / (2.0 * cqq)
        j = osc_gauss_window(-hu + s, hu + s, cqq, -ki)
        e0 = (
            form.log_pref
            - cqq * qh**2
            - cpp * pv**2
            - cqp * qh * pv
            - form.cq * qh
            - form.cp * pv
            - form.c0
            + lr * lr / (4.0 * cqq)
            + 1j * ki * s
        )
        acc = acc + (wk * width) * np.exp(e0) * j
    return np.where(live, acc, 0.0) / (4.0 * hu * hv)


def coarse_grain(field: WignerMatrixField, pix: CoarsePixelSpec) -> WignerMatrixField:
    """Average every Wigner matrix entry over a Δ×δ pixel window.

    Fields with an analytic source are averaged in closed form (exact up to
    the Legendre momentum quadrature); sampled fields use a midpoint
    composite rule on their own grid with window clipping at the edges.
    """
    if field.source is not None and field.pixels is None and field.source.in_field:
        state = field.source
        u = state.units
        qh = np.asarray(u.scale_length(field.q), dtype=float).reshape(-1, 1)
        ph = np.asarray(u.scale_momentum(field.p), dtype=float).reshape(1, -1)
        hu = 0.5 * u.scale_length(pix.Delta)
        hv = 0.5 * u.scale_momentum(pix.delta)
        blocks = {}
        for pair in ("++", "--", "+-"):
            w = _box_average_form(_pair_form(state, pair), qh, ph, hu, hv)
            blocks[pair] = u.unscale_wigner(w)
        return WignerMatrixField(
            params=field.params, t=field.t, q=field.q, p=field.p,
            w_pp=blocks["++"].real, w_mm=blocks["--"].real, w_pm=blocks["+-"],
            source=None, pixels=pix,
            diag_imag_residue=float(
                max(np.max(np.abs(blocks["++"].imag)), np.max(np.abs(blocks["--"].imag)))
            ),
        )
    return _coarse_grain_sampled(field, pix)


def _coarse_grain_sampled(field: WignerMatrixField, pix: CoarsePixelSpec) -> WignerMatrixField:
    """Midpoint-composite window average over the field's own samples."""
    dq = float(field.q[1] - field.q[0]) if field.q.size > 1 else pix.Delta
    dp = float(field.p[1] - field.p[0]) if field.p.size > 1 else pix.delta
    m_u = max(3, 2 * math.ceil(pix.Delta / (2.0 * dq)) + 1)
    m_v = max(3, 2 * math.ceil(pix.delta / (2.0 * dp)) + 1)
    du = pix.Delta / m_u
    dv = pix.delta / m_v
    us = (np.arange(m_u) - (m_u - 1) / 2.0) * du
    vs = (np.arange(m_v) - (m_v - 1) / 2.0) * dv
    out = {}
    for pair in ("++", "--", "+-"):
        vals = field.block(pair)
        interp_r = RegularGridInterpolator(
            (field.q, field.p), vals.real, bounds_error=False, fill_value=0.0
        )
        interp_i = None
        if np.iscomplexobj(vals):
            interp_i = RegularGridInterpolator(
                (field.q, field.p), vals.imag, bounds_error=False, fill_value=0.0
            )
        acc = np.zeros((field.q.size, field.p.size), dtype=complex)
        qq, pp = np.meshgrid(field.q, field.p, indexing="ij")
        pts = np.empty(qq.shape + (2,))
        for uo in us:
            for vo in vs:
                pts[..., 0] = qq + uo
                pts[..., 1] = pp + vo
                acc += interp_r(pts)
                if interp_i is not None:
                    acc += 1j * interp_i(pts)
        out[pair] = acc / (m_u * m_v)
    return WignerMatrixField(
        params=field.params, t=field.t, q=field.q, p=field.p,
        w_pp=out["++"].real, w_mm=out["--"].real, w_pm=out["+-"],
        source=None, pixels=pix,
    )


# ---------------------------------------------------------------------------
# spin projections and fringe diagnostics


def project_spin_direction(w, n, strict: bool = False):
    """Tr[W(q,p)(𝟙 + n·σ)/2] for a spin direction n (unit 3-vector).

    Accepts a WignerValue or a WignerMatrixField; returns the projected
    real field.  Non-unit n is rejected when strict, otherwise normalized
    with a warning.
    """
    n = np.asarray(n, dtype=float)
    if n.shape != (3,):
        raise ValueError(f"n must be a 3-vector, got shape {n.shape}")
    norm = float(np.linalg.norm(n))
    if norm == 0.0:
        raise ValueError("n must be nonzero")
    if abs(norm - 1.0) > 1e-12:
        if strict:
            raise ValueError(f"|n| = {norm} is not 1 within 1e-12")
        warnings.warn(f"normalizing non-unit spin direction (|n| = {norm})")
        n = n / norm
    nx, ny, nz = n
    w_pp = w.block("++")
    w_mm = w.block("--")
    w_pm = w.block("+-")
    return (
        0.5 * (1.0 + ny) * np.real(w_pp)
        + 0.5 * (1.0 - ny) * np.real(w_mm)
        + nx * np.real(w_pm)
        + nz * np.imag(w_pm)
    )


def oscillation_scale(params: PhysicalParams, t: float) -> float:
    """Fringe spacing scale d = ħ/(2Ft) of the off-diagonal Wigner block (m)."""
    if t <= 0.0:
        raise ValueError(f"time must be positive, got {t}")
    f = abs(params.force) if params.force is not None else 0.0
    if f == 0.0:
        raise ValueError("no field, no interference fringes")
    return params.hbar / (2.0 * f * t)


def measure_oscillation_scale(
    state: SpinorWavepacket,
    p: float = 0.0,
    periods: float = 6.0,
    n: int = 8192,
) -> float:
    """Fringe scale from the zero crossings of Re W₊₋ along q at fixed p.

    Samples the closed form on a dense line through the envelope center;
    consecutive zero crossings of a cos(q/d + const) profile sit πd apart.
    """
    _require_analytic(state)
    d_est = oscillation_scale(state.params, state.t)
    half = 0.5 * periods * 2.0 * np.pi * d_est
    q = np.linspace(-half, half, n)
    w = wigner_analytic(state, q, np.array([p]))
    f = np.real(w.w_pm[:, 0])
    s = np.sign(f)
    flips = np.nonzero(s[:-1] * s[1:] < 0)[0]
    if flips.size < 3:
        raise ValueError("too few fringe zero crossings to measure a scale")
    # linear interpolation of each crossing position
    q0 = q[flips] - f[flips] * (q[flips + 1] - q[flips]) / (f[flips + 1] - f[flips])
    return float(np.mean(np.diff(q0)) / np.pi)


def coarse_position_density(
    state: SpinorWavepacket, q: np.ndarray, Delta: float, pair: str = "++"
) -> np.ndarray:
    """Δ-window average of |c_α φ_α|² at positions q (m): the reference curve
    for the position marginal of a coarse-grained field."""
    branch = pair[0]
    u = state.units
    qa = np.asarray(u.scale_length(q), dtype=float)
    hw = 0.5 * u.scale_length(Delta)
    b = state.branch(branch)
    c = abs(state.params.weight(branch)) ** 2
    # |φ|² = |N|² exp(-(2Re α x² + 2Re β x + 2Re γ))
    a2 = 2.0 * b.alpha.real
    b2 = 2.0 * b.beta.real
    g2 = 2.0 * b.gamma.real
    mu = -b2 / (2.0 * a2)
    amp = c * abs(b.norm) ** 2 * math.exp(-(g2 - a2 * mu * mu))
    mass = amp * gauss_window(qa - hw, qa + hw, mu, a2)
    return u.unscale_density(mass / (2.0 * hw))
