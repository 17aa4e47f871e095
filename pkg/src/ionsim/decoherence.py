"""Open-system motional dynamics and decoherence diagnostics.

The first half of the module integrates the thermal-reservoir master
equation for a single trapped mode (fixed-step RK4 on the elementwise
number-basis equations, hermiticity restored by symmetrization each
step) and provides the analytic mean-occupation law it must reproduce.

The second half collects the measurement-side tools: synthesis and
inversion of decaying Rabi flop signals, averaged-signal envelopes for
slow and fast drive-strength noise, Stark-shift phase-noise ratios,
off-resonant spectator-level leakage, qubit-frequency modulation
sidebands, and the two-pulse interference protocol that reads out the
motional 0-1 coherence.

Conventions: rates are angular (rad/s), populations are probabilities,
and every Monte Carlo style check lives in the test suite, not here.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import j0, jv
from scipy.optimize import nnls
from scipy import constants as _const

from .errors import (
    DimensionError,
    IllConditionedError,
    ModelInputError,
    RangeError,
    StiffnessError,
    TruncationError,
)
from .quantum_core import (
    SPIN_DOWN,
    SPIN_UP,
    DensityMatrix,
    QuantumState,
    index_of,
)
from .coupling import CouplingParams, rabi_frequency
from .pulse_engine import PulseSpec, apply_pulse

__all__ = [
    "BathParams",
    "RabiSignal",
    "master_equation_evolve",
    "mean_n_evolution",
    "rabi_decay_signal",
    "invert_populations",
    "slow_amplitude_noise_envelope",
    "fast_amplitude_noise_visibility",
    "stark_phase_noise_ratio",
    "spectator_leakage",
    "bfield_modulation",
    "coherence_tomography",
    "radiative_decay_rate",
]


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class BathParams:
    """Thermal reservoir coupled to one motional mode.

    gamma is the energy relaxation rate (1/s) and nbar the equilibrium
    occupation the mode relaxes toward. The derived t_star is the mean
    time to leave the motional ground state, 1/(nbar*gamma); it is
    infinite for a zero-temperature or decoupled bath.
    """

    gamma: float
    nbar: float

    def __post_init__(self):
        if self.gamma < 0:
            raise RangeError("relaxation rate gamma must be >= 0")
        if self.nbar < 0:
            raise RangeError("equilibrium occupation nbar must be >= 0")

    @property
    def t_star(self) -> float:
        if self.gamma > 0 and self.nbar > 0:
            return 1.0 / (self.nbar * self.gamma)
        return math.inf


@dataclass
class RabiSignal:
    """Sampled lower-state probability versus pulse duration.

    tau_grid must be strictly increasing and nonnegative. P_down is
    validated to lie in [0, 1] within 1e-9 and stored clipped; variance,
    when present, holds the per-point measurement variance of P_down.
    """

    tau_grid: np.ndarray
    P_down: np.ndarray
    variance: np.ndarray | None = field(default=None)

    def __post_init__(self):
        tau = np.asarray(self.tau_grid, dtype=float)
        p = np.asarray(self.P_down, dtype=float)
        if tau.ndim != 1 or p.shape != tau.shape:
            raise DimensionError(
                f"tau grid {tau.shape} and P_down {p.shape} must be equal 1-d shapes"
            )
        if tau.size < 2:
            raise ModelInputError("signal needs at least two samples")
        if tau[0] < 0 or np.any(np.diff(tau) <= 0):
            raise ModelInputError("tau grid must be nonnegative and strictly increasing")
        if np.min(p) < -1e-9 or np.max(p) > 1 + 1e-9:
            raise ModelInputError("P_down outside [0, 1] beyond 1e-9 tolerance")
        self.tau_grid = tau
        self.P_down = np.clip(p, 0.0, 1.0)
        if self.variance is not None:
            v = np.asarray(self.variance, dtype=float)
            if v.shape != tau.shape:
                raise DimensionError("variance shape must match tau grid")
            if np.min(v) < 0:
                raise ModelInputError("variance must be nonnegative")
            self.variance = v

    def to_csv(self) -> str:
        """Serialize as 'tau,P_down[,variance]' rows with a header line."""
        buf = io.StringIO()
        if self.variance is None:
            buf.write("tau,P_down\n")
            for t, p in zip(self.tau_grid, self.P_down):
                buf.write(f"{float(t)!r},{float(p)!r}\n")
        else:
            buf.write("tau,P_down,variance\n")
            for t, p, v in zip(self.tau_grid, self.P_down, self.variance):
                buf.write(f"{float(t)!r},{float(p)!r},{float(v)!r}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "RabiSignal":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        if not lines:
            raise ModelInputError("empty signal CSV")
        header = [h.strip() for h in lines[0].split(",")]
        if header[:2] != ["tau", "P_down"]:
            raise ModelInputError(f"unrecognized signal header {lines[0]!r}")
        has_var = len(header) == 3 and header[2] == "variance"
        rows = []
        for ln in lines[1:]:
            parts = ln.split(",")
            if len(parts) != len(header):
                raise ModelInputError(f"malformed signal row {ln!r}")
            rows.append([float(x) for x in parts])
        arr = np.asarray(rows, dtype=float)
        if has_var:
            return cls(arr[:, 0], arr[:, 1], arr[:, 2])
        return cls(arr[:, 0], arr[:, 1])


# ---------------------------------------------------------------------------
# thermal-reservoir master equation


def _number_basis_rhs_factory(n_max: int, gamma: float, nbar: float, dtype):
    """Vectorized elementwise derivative of the number-basis equations.

    For element (m, n):
        inflow  gamma*(nbar+1)*sqrt((m+1)(n+1)) * rho[m+1, n+1]
              + gamma*nbar*sqrt(m n)            * rho[m-1, n-1]
        loss   -gamma/2 * [2 nbar (m+n+1) + (m+n)] * rho[m, n]
    The truncation keeps the full loss coefficient at the top level, so
    any population reaching n_max drains trace; the evolve loop guards
    that population instead of renormalizing.
    """
    k = np.arange(n_max + 1, dtype=float)
    msum = k[:, None] + k[None, :]
    loss = -0.5 * gamma * (2.0 * nbar * (msum + 1.0) + msum)
    root = np.sqrt(np.outer(k + 1.0, k + 1.0))
    up = gamma * (nbar + 1.0) * root[:-1, :-1]  # multiplies rho[1:, 1:]
    down = gamma * nbar * np.sqrt(np.outer(k[1:], k[1:]))  # multiplies rho[:-1, :-1]
    # scratch buffer shared across the four RK4 stage evaluations
    tmp = np.empty((n_max, n_max), dtype=dtype)

    def rhs(r: np.ndarray, out: np.ndarray) -> np.ndarray:
        np.multiply(loss, r, out=out)
        np.multiply(up, r[1:, 1:], out=tmp)
        out[:-1, :-1] += tmp
        np.multiply(down, r[:-1, :-1], out=tmp)
        out[1:, 1:] += tmp
        return out

    return rhs


def master_equation_evolve(
    rho: DensityMatrix,
    b: BathParams,
    t: float,
    dt: float,
    eps_top: float = 1e-8,
) -> DensityMatrix:
    """Relax a motional density matrix against a thermal reservoir.

    Fixed-step RK4 on the elementwise number-basis equations, with the
    matrix symmetrized after every step. The step must respect
    dt <= 0.01 / (gamma*(nbar+1)*(n_max+1)) or StiffnessError is raised;
    TruncationError fires if the top Fock level accumulates population
    above eps_top, since the truncated equations leak trace through that
    level at rate gamma*nbar*(n_max+1)*rho[top]. The final trace must
    still sit within 1e-9 of one (TruncationError names the cure:
    raise n_max) and the returned matrix re-validates hermiticity and
    positivity.
    """
    if not isinstance(rho, DensityMatrix):
        raise ModelInputError("master_equation_evolve acts on a DensityMatrix")
    if t < 0:
        raise RangeError("evolution time must be >= 0")
    if dt <= 0:
        raise RangeError("step dt must be > 0")
    n_max = rho.n_max
    if t == 0.0 or b.gamma == 0.0:
        return rho.copy()       # no steps taken, so dt needs no vetting
    bound = 0.01 / (b.gamma * (b.nbar + 1.0) * (n_max + 1))
    if dt > bound:
        raise StiffnessError(
            f"dt={dt:.3e} exceeds the stability bound {bound:.3e} "
            f"for gamma={b.gamma:.3e}, nbar={b.nbar:.3e}, n_max={n_max}"
        )

    n_steps = max(1, math.ceil(t / dt))
    h = t / n_steps
    # the generator has real coefficients, so a real-symmetric matrix
    # (any diagonal initial state) never grows an imaginary part
    real_path = float(np.max(np.abs(rho.rho.imag))) == 0.0
    dtype = float if real_path else complex
    rhs = _number_basis_rhs_factory(n_max, b.gamma, b.nbar, dtype)

    r = rho.rho.real.copy() if real_path else rho.rho.copy()
    N = n_max + 1
    k1, k2, k3, k4, stage = (np.empty((N, N), dtype=dtype) for _ in range(5))
    for _ in range(n_steps):
        rhs(r, k1)
        np.multiply(0.5 * h, k1, out=stage)
        stage += r
        rhs(stage, k2)
        np.multiply(0.5 * h, k2, out=stage)
        stage += r
        rhs(stage, k3)
        np.multiply(h, k3, out=stage)
        stage += r
        rhs(stage, k4)
        # r += h/6 (k1 + 2 k2 + 2 k3 + k4), clobbering k2 as accumulator
        k2 += k3
        k2 *= 2.0
        k2 += k1
        k2 += k4
        k2 *= h / 6.0
        r += k2
        r += r.T if real_path else r.conj().T
        r *= 0.5
        top = float(r[n_max, n_max].real)
        if top > eps_top:
            raise TruncationError(
                f"top-level population {top:.2e} exceeds guard {eps_top:.1e}; "
                f"raise n_max"
            )
    drift = abs(float(np.trace(r).real) - 1.0)
    if drift > 1e-9:
        raise TruncationError(
            f"trace drifted by {drift:.2e} (> 1e-9): population is reaching "
            f"the truncation edge, raise n_max"
        )
    return DensityMatrix(r, n_max)


def mean_n_evolution(n0: float, b: BathParams, t):
    """Closed-form mean occupation nbar + (n0 - nbar) e^(-gamma t).

    Accepts a scalar or array of times; the steady state is nbar.
    """
    if n0 < 0:
        raise RangeError("initial occupation must be >= 0")
    tt = np.asarray(t, dtype=float)
    if np.any(tt < 0):
        raise RangeError("times must be >= 0")
    out = b.nbar + (n0 - b.nbar) * np.exp(-b.gamma * tt)
    return float(out) if np.isscalar(t) else out


# ---------------------------------------------------------------------------
# decaying flop signals


def _decay_rates(gamma_model, count: int) -> np.ndarray:
    """Per-level decay constants gamma_n for n = 0..count-1.

    None means no decay. A scalar gamma0 selects the default model
    gamma0*sqrt(n+1); a callable is evaluated per level; a sequence is
    taken verbatim (and must be long enough).
    """
    ns = np.arange(count)
    if gamma_model is None:
        return np.zeros(count)
    if callable(gamma_model):
        rates = np.asarray([float(gamma_model(int(n))) for n in ns], dtype=float)
    elif np.isscalar(gamma_model):
        rates = float(gamma_model) * np.sqrt(ns + 1.0)
    else:
        rates = np.asarray(gamma_model, dtype=float)
        if rates.size < count:
            raise DimensionError(
                f"need {count} decay constants, got {rates.size}"
            )
        rates = rates[:count]
    if np.any(rates < 0):
        raise RangeError("decay constants must be >= 0")
    return rates


def rabi_decay_signal(
    populations,
    gamma_model,
    coupling: CouplingParams,
    tau_grid,
) -> RabiSignal:
    """Synthesize the first-sideband flop signal of a mixed motional state.

    P_down(tau) = 1/2 * (1 + sum_n P_n e^(-gamma_n tau) cos(2 Omega_{n+1,n} tau))

    with exact matrix elements and phenomenological per-level decay
    constants from gamma_model (see _decay_rates for accepted forms).
    """
    P = np.asarray(populations, dtype=float)
    if P.ndim != 1 or P.size == 0:
        raise DimensionError("populations must be a nonempty 1-d sequence")
    if np.min(P) < -1e-12:
        raise ModelInputError("populations must be nonnegative")
    if P.sum() > 1 + 1e-9:
        raise ModelInputError(f"populations sum to {P.sum():.12f} > 1")
    tau = np.asarray(tau_grid, dtype=float)
    rates = _decay_rates(gamma_model, P.size)
    freqs = np.array(
        [rabi_frequency(n + 1, n, coupling) for n in range(P.size)]
    )
    comps = P[:, None] * np.exp(-rates[:, None] * tau) * np.cos(
        2.0 * freqs[:, None] * tau
    )
    return RabiSignal(tau, 0.5 * (1.0 + comps.sum(axis=0)))


def invert_populations(
    sig: RabiSignal,
    coupling: CouplingParams,
    n_cut: int,
    gamma_model=None,
) -> dict:
    """Recover Fock populations from a decaying flop signal.

    Nonnegative least squares on the known-frequency basis
    e^(-gamma_n tau) cos(2 Omega_{n+1,n} tau), n = 0..n_cut. The grid
    must sample the fastest component at Nyquist rate or better, and
    adjacent ladder frequencies must be separated by at least
    2*pi / (observation span) or the basis is declared unresolvable
    (IllConditionedError). If the raw solution overshoots unit total
    population it is rescaled onto the simplex boundary.

    Returns {"P": estimates, "residual": rms misfit of P_down,
    "P_fourier": matched-filter projections kept for comparison}.
    """
    if n_cut < 0:
        raise RangeError("n_cut must be >= 0")
    tau = sig.tau_grid
    span = float(tau[-1] - tau[0])
    freqs = np.array(
        [rabi_frequency(n + 1, n, coupling) for n in range(n_cut + 1)]
    )
    # fastest signal component oscillates at 2*max(Omega)
    dt_max = float(np.max(np.diff(tau)))
    omega_fast = 2.0 * float(np.max(np.abs(freqs)))
    if omega_fast > 0 and dt_max > math.pi / omega_fast:
        raise RangeError(
            f"tau spacing {dt_max:.3e} undersamples the fastest component "
            f"(limit {math.pi / omega_fast:.3e})"
        )
    if n_cut >= 1:
        min_gap = float(np.min(np.abs(np.diff(freqs))))
        if min_gap < 2.0 * math.pi / span:
            raise IllConditionedError(
                f"adjacent ladder frequencies separated by {min_gap:.3e} "
                f"< 2*pi/span = {2.0 * math.pi / span:.3e}"
            )
    rates = _decay_rates(gamma_model, n_cut + 1)
    basis = np.exp(-np.outer(tau, rates)) * np.cos(2.0 * np.outer(tau, freqs))
    y = 2.0 * sig.P_down - 1.0

    p_hat, _ = nnls(basis, y)
    total = p_hat.sum()
    if total > 1.0:
        p_hat = p_hat / total
    resid = basis @ p_hat - y
    residual = float(np.linalg.norm(resid) / (2.0 * math.sqrt(tau.size)))

    # matched-filter route: project each component independently
    p_fourier = np.empty(n_cut + 1)
    for n in range(n_cut + 1):
        col = basis[:, n]
        denom = float(np.trapezoid(col * col, tau))
        num = float(np.trapezoid(y * col, tau))
        p_fourier[n] = max(0.0, num / denom) if denom > 0 else 0.0

    return {"P": p_hat, "residual": residual, "P_fourier": p_fourier}


# ---------------------------------------------------------------------------
# drive-strength noise envelopes


def slow_amplitude_noise_envelope(dist: str, dOmega_rms: float, tau_grid, Omega0: float):
    """Ensemble-averaged flop when the drive strength is static per shot.

    The strength is drawn once per experiment from a distribution of rms
    width dOmega_rms around Omega0; averaging the cosine gives

        gaussian:        <P_down> = 1/2 [1 + cos(2 Omega0 tau) e^(-2 (dOmega_rms tau)^2)]
        laplacian-like:  <P_down> = 1/2 [1 + cos(2 Omega0 tau) / (1 + 2 (dOmega_rms tau)^2)]

    Both envelopes lose half their contrast within a factor of two of
    tau = 1/dOmega_rms (exactly at sqrt(ln 2 / 2) and 1/sqrt(2) times it).
    """
    if dOmega_rms < 0:
        raise RangeError("dOmega_rms must be >= 0")
    tau = np.asarray(tau_grid, dtype=float)
    kind = dist.lower().replace("_", "-")
    if kind == "gaussian":
        env = np.exp(-2.0 * (dOmega_rms * tau) ** 2)
    elif kind in ("laplacian", "laplacian-like", "laplace"):
        env = 1.0 / (1.0 + 2.0 * (dOmega_rms * tau) ** 2)
    else:
        raise ModelInputError(f"unknown distribution {dist!r}")
    return 0.5 * (1.0 + env * np.cos(2.0 * Omega0 * tau))


def fast_amplitude_noise_visibility(
    dOmega: float,
    omega_amp: float,
    tau_grid,
    Omega0: float,
    n_phi: int = 2048,
) -> dict:
    """Phase-averaged flop under sinusoidal drive-strength modulation.

    The drive is Omega0 + dOmega sin(omega_amp t + phase) with the phase
    uniform over shots. To second order in the small ratio
    r = dOmega/omega_amp the average is

        <P_down> = 1/2 + 1/2 cos(2 Omega0 tau) [1 - 2 r^2 (1 - cos(omega_amp tau))]

    so the visibility loss is bounded by 4 r^2. Returns the closed form
    together with the numerically exact phase average on a uniform grid
    (trapezoid on the periodic interval, spectrally accurate).

    RangeError when |r| > 0.3, where the expansion degrades.
    """
    if omega_amp <= 0:
        raise RangeError("omega_amp must be > 0")
    r = dOmega / omega_amp
    if abs(r) > 0.3:
        raise RangeError(f"|dOmega/omega_amp| = {abs(r):.3f} outside validity (<= 0.3)")
    tau = np.asarray(tau_grid, dtype=float)
    wt = omega_amp * tau
    closed = 0.5 + 0.5 * np.cos(2.0 * Omega0 * tau) * (
        1.0 - 2.0 * r * r * (1.0 - np.cos(wt))
    )
    phases = np.linspace(0.0, 2.0 * math.pi, n_phi, endpoint=False)
    # accumulated half-angle: Omega0 tau + r [cos(phase)(1-cos wt) + sin(phase) sin wt]
    half = Omega0 * tau[None, :] + r * (
        np.cos(phases)[:, None] * (1.0 - np.cos(wt))[None, :]
        + np.sin(phases)[:, None] * np.sin(wt)[None, :]
    )
    exact = 0.5 + 0.5 * np.mean(np.cos(2.0 * half), axis=0)
    return {"closed_form": closed, "phi_average": exact}


def stark_phase_noise_ratio(
    g1: float,
    g2: float,
    eta: float,
    Delta_R: float,
    correlated: bool = False,
) -> dict:
    """Light-shift phase noise relative to rotation-angle noise.

    Two fields of strengths g1, g2 detuned by Delta_R from their virtual
    level shift the qubit by omega_s = -(g2^2 - g1^2)/Delta_R while
    driving two-photon rotations at rate ~ eta g1 g2 / Delta_R. For
    independent (uncorrelated) fractional strength fluctuations the
    variance ratio of the Stark phase to the rotation angle is

        (g1^4 + g2^4) / (2 eta^2 g1^2 g2^2)

    which is exactly 1/eta^2 at g1 = g2. When both strengths ride the
    same fluctuation (correlated=True) the shifts partially cancel and
    the ratio becomes (g1^2 - g2^2)^2 / (2 eta^2 g1^2 g2^2), vanishing
    at matched strengths. A dead field makes the ratio infinite.
    """
    if Delta_R == 0:
        raise ModelInputError("Delta_R must be nonzero")
    if eta <= 0:
        raise RangeError("eta must be > 0")
    a, b2 = float(g1) ** 2, float(g2) ** 2
    omega_s = -(b2 - a) / Delta_R
    if a == 0.0 or b2 == 0.0:
        return {"omega_s": omega_s, "ratio": math.inf, "correlated": bool(correlated)}
    if correlated:
        ratio = (a - b2) ** 2 / (2.0 * eta * eta * a * b2)
    else:
        ratio = (a * a + b2 * b2) / (2.0 * eta * eta * a * b2)
    return {"omega_s": omega_s, "ratio": ratio, "correlated": bool(correlated)}


# ---------------------------------------------------------------------------
# spectator level leakage


def _raised_cosine(t: float, T: float, tau_r: float) -> float:
    if t <= 0.0 or t >= T:
        return 0.0
    if t < tau_r:
        return 0.5 * (1.0 - math.cos(math.pi * t / tau_r))
    if t > T - tau_r:
        return 0.5 * (1.0 - math.cos(math.pi * (T - t) / tau_r))
    return 1.0


def spectator_leakage(
    Omega: float,
    Omega_prime: float,
    Delta: float,
    envelope: str = "square",
    duration: float = 1.0,
    tau_r: float | None = None,
    compensate: bool = False,
    initial=None,
    steps_per_cycle: int = 60,
) -> dict:
    """Residual excitation of an off-resonant third level after a pulse.

    The drive couples the qubit pair at strength Omega and also reaches
    a spectator level detuned by Delta at strength Omega_prime. With
    amplitudes (C_dn, C_up, C_s) and laser offset delta from the qubit
    resonance, the rotating-frame equations

        dC_dn/dt = -i g(t) [Omega e^(+i delta t) C_up + Omega' e^(+i (delta-Delta) t) C_s]
        dC_up/dt = -i g(t) Omega  e^(-i delta t) C_dn
        dC_s/dt  = -i g(t) Omega' e^(-i (delta-Delta) t) C_dn

    are integrated by fixed-step RK4 under the chosen envelope g(t):
    "square" switches instantly, "smooth" ramps with a raised cosine of
    width tau_r at both ends (duration must cover both ramps). The
    spectator also pulls the lower qubit level down by Omega'^2/Delta;
    compensate=True retunes the drive onto the shifted resonance.

    Returns the final amplitude magnitudes |C_dn| and |C_s| (the full
    complex vector rides along under "amplitudes"), the
    adiabatic-following estimate |Omega' C_dn(T) / Delta| the spectator
    freezes at under a sudden turn-off, the shift itself, and the
    integrator norm defect.
    """
    if Delta == 0:
        raise ModelInputError("spectator detuning Delta must be nonzero")
    if duration <= 0:
        raise RangeError("duration must be > 0")
    if envelope not in ("square", "smooth"):
        raise ModelInputError(f"unknown envelope {envelope!r}")
    if envelope == "smooth":
        if tau_r is None or tau_r <= 0:
            raise ModelInputError("smooth envelope needs tau_r > 0")
        if duration < 2.0 * tau_r:
            raise ModelInputError("duration must cover both raised-cosine ramps")
    c = np.array([1.0, 0.0, 0.0], dtype=complex) if initial is None else np.asarray(
        initial, dtype=complex
    )
    if c.shape != (3,):
        raise DimensionError("initial amplitudes must be a 3-vector")
    if abs(np.linalg.norm(c) - 1.0) > 1e-9:
        raise ModelInputError("initial amplitudes must be normalized")

    stark = Omega_prime**2 / Delta
    delta = stark if compensate else 0.0
    T = float(duration)
    w_max = max(abs(Delta), abs(Delta - delta), 2 * abs(Omega), 2 * abs(Omega_prime), abs(delta))
    n_steps = max(400, int(math.ceil(steps_per_cycle * T * w_max / (2.0 * math.pi))))
    h = T / n_steps

    if envelope == "square":
        def g(_t: float) -> float:
            return 1.0
    else:
        def g(t: float) -> float:
            return _raised_cosine(t, T, tau_r)

    def rhs(t: float, v: np.ndarray) -> np.ndarray:
        gt = g(t)
        e_up = np.exp(1j * delta * t)
        e_s = np.exp(1j * (delta - Delta) * t)
        return np.array(
            [
                -1j * gt * (Omega * e_up * v[1] + Omega_prime * e_s * v[2]),
                -1j * gt * Omega * v[0] / e_up,
                -1j * gt * Omega_prime * v[0] / e_s,
            ]
        )

    v = c.copy()
    t = 0.0
    for _ in range(n_steps):
        k1 = rhs(t, v)
        k2 = rhs(t + 0.5 * h, v + 0.5 * h * k1)
        k3 = rhs(t + 0.5 * h, v + 0.5 * h * k2)
        k4 = rhs(t + h, v + h * k3)
        v = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += h

    return {
        "C_final": float(abs(v[0])),
        "C_s_final": float(abs(v[2])),
        "adiabatic_estimate": float(abs(Omega_prime * v[0] / Delta)),
        "stark_shift": stark,
        "norm_defect": abs(float(np.linalg.norm(v)) - 1.0),
        "amplitudes": v,
    }


# ---------------------------------------------------------------------------
# qubit-frequency modulation


def bfield_modulation(beta0: float, omega_m: float, Omega_nn: float, k_max: int = 10) -> dict:
    """Carrier strength under fast sinusoidal qubit-frequency modulation.

    beta0 is the peak angular-frequency excursion of the qubit splitting
    (carrier frequency times the fractional modulation depth, rad/s) and
    omega_m the modulation frequency. The accumulated phase has
    modulation index eta_m = beta0/omega_m, so the drive splits into
    harmonics weighted by Bessel values J_k(eta_m); when omega_m is fast
    compared to the drive strength everything but the k=0 term averages
    out and the flop proceeds at |Omega| J_0(eta_m).

    The average is only meaningful for omega_m >= 10 |Omega_nn|;
    RangeError otherwise.
    """
    if omega_m <= 0:
        raise RangeError("omega_m must be > 0")
    if beta0 < 0:
        raise RangeError("beta0 must be >= 0")
    if omega_m < 10.0 * abs(Omega_nn):
        raise RangeError(
            f"omega_m = {omega_m:.3e} too slow for averaging "
            f"(needs >= 10*|Omega| = {10.0 * abs(Omega_nn):.3e})"
        )
    eta_m = beta0 / omega_m
    weights = jv(np.arange(k_max + 1), eta_m)
    return {
        "eta_m": eta_m,
        "effective_Rabi_factor": float(j0(eta_m)),
        "sideband_weights": weights,
    }


# ---------------------------------------------------------------------------
# motional coherence readout


_TOMO_PHASES = (0.0, 0.5 * math.pi, math.pi, -0.5 * math.pi)


def coherence_tomography(
    state: QuantumState,
    coupling: CouplingParams,
    delta_phi=_TOMO_PHASES,
) -> dict:
    """Read out the 0-1 motional coherence of a lower-spin state.

    Protocol: a first-sideband pi pulse (full transfer on the lowest
    ladder rung) followed by a carrier pi/2 pulse, repeated at the four
    relative analysis phases 0, pi/2, pi, -pi/2; the lower-state
    probabilities then combine into

        Re rho_01 = 1/2 [P(pi)   - P(0)]
        Im rho_01 = 1/2 [P(pi/2) - P(-pi/2)]

    The relative phase is carried by the sideband pulse with a -pi/2
    reference offset, which is what makes the combinations above land
    on the real and imaginary parts exactly. Coherences between higher
    neighboring levels alias into the estimate unless they vanish or
    average out over repeated preparations.
    """
    if not isinstance(state, QuantumState):
        raise ModelInputError("coherence_tomography acts on a QuantumState")
    n_max = state.n_max
    up_pop = sum(
        abs(state.amplitude(SPIN_UP, n)) ** 2 for n in range(n_max + 1)
    )
    if up_pop > 1e-12:
        raise ModelInputError("prepared state must live in the lower-spin manifold")
    want = set()
    for ph in delta_phi:
        hit = [c for c in _TOMO_PHASES if abs(ph - c) < 1e-12]
        if not hit:
            raise ModelInputError(
                f"analysis phase {ph!r} is not one of 0, pi/2, pi, -pi/2"
            )
        want.add(hit[0])
    if want != set(_TOMO_PHASES):
        raise ModelInputError("all four analysis phases are required")

    N = n_max + 1
    p_down = {}
    for ph in _TOMO_PHASES:
        red = PulseSpec("red", math.pi, coupling, phi=ph - 0.5 * math.pi)
        carrier = PulseSpec("carrier", 0.5 * math.pi, coupling, phi=0.0)
        out = apply_pulse(apply_pulse(state, red), carrier)
        p_down[ph] = float(np.sum(np.abs(out.amplitudes[:N]) ** 2))

    re = 0.5 * (p_down[math.pi] - p_down[0.0])
    im = 0.5 * (p_down[0.5 * math.pi] - p_down[-0.5 * math.pi])
    return {"re": re, "im": im, "P_down": p_down}


# ---------------------------------------------------------------------------
# radiative decay


def radiative_decay_rate(transition: str, omega0: float, moment: float | None = None) -> float:
    """Free-space spontaneous decay rate of a two-level transition.

    electric_dipole: omega0^3 |mu|^2 / (3 pi eps0 hbar c^3), default
    moment one Bohr radius of electron charge displacement. The
    magnetic_dipole form carries c^5 in place of c^3 and defaults to one
    Bohr magneton. omega0 is angular (rad/s).
    """
    if omega0 <= 0:
        raise RangeError("omega0 must be > 0")
    if transition == "electric_dipole":
        if moment is None:
            moment = _const.e * _const.physical_constants["Bohr radius"][0]
        c_pow = _const.c**3
    elif transition == "magnetic_dipole":
        if moment is None:
            moment = _const.physical_constants["Bohr magneton"][0]
        c_pow = _const.c**5
    else:
        raise ModelInputError(f"unknown transition type {transition!r}")
    return (
        omega0**3
        * abs(moment) ** 2
        / (3.0 * math.pi * _const.epsilon_0 * _const.hbar * c_pow)
    )
