"""Matrix-element mathematics for spin-motion coupling.

Everything here is closed-form: generalized Laguerre polynomials, the
exact motional matrix elements and their small-confinement limits, magic
confinement-parameter roots, thermal (Debye-Waller style) reduction
statistics, standing-wave field tailoring, and figure-of-merit formulas
for addressing crosstalk and spontaneous emission.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import erf, gammaln, i0

from .errors import (
    ModelInputError,
    NoRootError,
    RangeError,
    SingularSystemError,
)


@dataclass(frozen=True)
class CouplingParams:
    """Base Rabi frequency (rad/s) and Lamb-Dicke parameter of one mode."""

    Omega: float
    eta: float

    def __post_init__(self):
        if self.Omega < 0 or self.eta < 0:
            raise RangeError("Omega and eta must be non-negative")


@dataclass(frozen=True)
class ModeEnsemble:
    """Collection of motional modes seen by one ion.

    etas and nbars are per-mode Lamb-Dicke parameters and thermal mean
    occupations. k, when given, is the index of the logic mode, which is
    excluded from the spectator statistics.
    """

    etas: np.ndarray
    nbars: np.ndarray
    k: int | None = None

    def __post_init__(self):
        e = np.asarray(self.etas, dtype=float)
        n = np.asarray(self.nbars, dtype=float)
        if e.shape != n.shape or e.ndim != 1:
            raise ModelInputError("etas and nbars must be 1-d arrays of equal length")
        if np.any(e < 0) or np.any(n < 0):
            raise RangeError("mode parameters must be non-negative")
        object.__setattr__(self, "etas", e)
        object.__setattr__(self, "nbars", n)

    def spectators(self) -> tuple[np.ndarray, np.ndarray]:
        if self.k is None:
            return self.etas, self.nbars
        keep = np.arange(len(self.etas)) != self.k
        return self.etas[keep], self.nbars[keep]


def laguerre(n: int, alpha: float, x: float) -> float:
    """Generalized Laguerre polynomial L_n^alpha(x).

    Upward three-term recurrence in n, stable for the small-argument
    regime this package uses (x = eta^2 <= 1).
    """
    if n < 0:
        raise RangeError("n must be >= 0")
    if alpha < 0:
        raise RangeError("alpha must be >= 0")
    if n == 0:
        return 1.0
    lm2, lm1 = 1.0, 1.0 + alpha - x
    for k in range(2, n + 1):
        lm2, lm1 = lm1, ((2 * k - 1 + alpha - x) * lm1 - (k - 1 + alpha) * lm2) / k
    return lm1


def rabi_frequency(
    n_hi: int, n_lo: int, c: CouplingParams, mode: str = "exact"
) -> float:
    """Spin-motion matrix element between Fock levels n_hi and n_lo.

    Symmetric in its level arguments. With n< = min, n> = max and
    dn = |n_hi - n_lo|:

    mode="exact"
        Omega * exp(-eta^2/2) * sqrt(n<!/n>!) * eta^dn * L_{n<}^{dn}(eta^2).
        The sign of the Laguerre factor is kept.
    mode="lamb_dicke"
        Leading order in eta: Omega * eta^dn * sqrt(n>!/n<!) / dn!
        (carrier Omega, first sidebands Omega*eta*sqrt(n>), ...).
    """
    if n_hi < 0 or n_lo < 0:
        raise RangeError("Fock labels must be >= 0")
    n_lt, n_gt = min(n_hi, n_lo), max(n_hi, n_lo)
    dn = n_gt - n_lt
    if mode == "exact":
        x = c.eta**2
        log_ratio = 0.5 * (gammaln(n_lt + 1) - gammaln(n_gt + 1))
        return (
            c.Omega
            * math.exp(-x / 2.0 + log_ratio + dn * _safe_log(c.eta))
            * laguerre(n_lt, dn, x)
            if c.eta > 0 or dn == 0
            else 0.0
        )
    if mode == "lamb_dicke":
        log_ratio = 0.5 * (gammaln(n_gt + 1) - gammaln(n_lt + 1))
        if c.eta == 0 and dn > 0:
            return 0.0
        return c.Omega * c.eta**dn * math.exp(log_ratio - gammaln(dn + 1))
    raise ModelInputError(f"unknown mode '{mode}'")


def _safe_log(x: float) -> float:
    return math.log(x) if x > 0 else 0.0


def magic_eta(level_n: int, k: int, m: int, branch: str = "flip_excited") -> list[float]:
    """Confinement parameters where a carrier pulse flips exactly one Fock level.

    Solves L_n(eta^2) = r on eta in (0,1), where the target ratio r of
    the two carrier matrix elements is

    branch="flip_excited" (default)
        r = (2k+1)/(2m), requiring m > k >= 0: a pulse of m full periods
        on the (0,0) element is a half-integer number of periods on the
        (n,n) element, flipping |n> and restoring |0>.
    branch="flip_ground"
        the reciprocal assignment r = 2m/(2k+1), requiring k >= m >= 1:
        the roles of the two levels swap.

    Returns the sorted real roots; each is checked to reproduce the
    target ratio through rabi_frequency to 1e-12.

    Raises NoRootError when the polynomial never meets r inside (0,1).
    """
    if level_n not in (1, 2, 3):
        raise RangeError("level_n must be 1, 2 or 3")
    if branch == "flip_excited":
        if not (m > k >= 0):
            raise RangeError("flip_excited branch needs m > k >= 0")
        r = (2 * k + 1) / (2 * m)
    elif branch == "flip_ground":
        if not (k >= m >= 1):
            raise RangeError("flip_ground branch needs k >= m >= 1")
        r = (2 * m) / (2 * k + 1)
    else:
        raise ModelInputError(f"unknown branch '{branch}'")

    def f(x):
        return laguerre(level_n, 0, x) - r

    xs = np.linspace(0.0, 1.0, 2001)
    vals = [f(x) for x in xs]
    roots = []
    for a, b, fa, fb in zip(xs[:-1], xs[1:], vals[:-1], vals[1:]):
        if fa == 0.0 and a > 0.0:
            roots.append(a)
        elif fa * fb < 0.0:
            roots.append(brentq(f, a, b, xtol=1e-15))
    roots = sorted(math.sqrt(x) for x in roots if 0.0 < x < 1.0)
    if not roots:
        raise NoRootError(
            f"L_{level_n}(eta^2) never reaches {r:.6g} for eta in (0,1)"
        )
    for eta in roots:
        c = CouplingParams(Omega=1.0, eta=eta)
        ratio = rabi_frequency(level_n, level_n, c) / rabi_frequency(0, 0, c)
        if abs(ratio - r) > 1e-12:
            raise NoRootError(f"root eta={eta} fails the ratio check ({ratio} vs {r})")
    return roots


@dataclass(frozen=True)
class DebyeWallerStats:
    """Thermal reduction statistics of the coupling strength.

    mean_factor: mean multiplicative reduction, prod exp(-eta^2(nbar+1/2)).
    rms_exact: fractional rms fluctuation from the exact Bessel product
        sqrt(prod I0(2 eta^2 sqrt(nbar(nbar+1))) - 1) (authoritative).
    rms_small_eta: leading-order form sqrt(sum eta^4 nbar(nbar+1)).
    """

    mean_factor: float
    rms_exact: float
    rms_small_eta: float
    _var_sum: float = field(repr=False, default=0.0)

    def prob_within(self, eps: float) -> float:
        """Probability that the fractional deviation is below eps (Gaussian model)."""
        if eps < 0:
            raise RangeError("eps must be >= 0")
        if self._var_sum == 0.0:
            return 1.0
        return float(erf(eps / math.sqrt(2.0 * self._var_sum)))


def debye_waller_stats(e: ModeEnsemble) -> DebyeWallerStats:
    """Mean and fluctuation statistics of the thermal coupling reduction.

    Spectator modes in thermal states multiply the coupling by random
    factors; this returns the mean factor, the exact and small-parameter
    fractional rms fluctuations, and (via prob_within) the probability
    that a single shot deviates by less than a given fraction.
    """
    etas, nbars = e.spectators()
    x = etas**2
    mean = float(np.exp(-np.sum(x * (nbars + 0.5))))
    bessel_args = 2.0 * x * np.sqrt(nbars * (nbars + 1.0))
    prod = float(np.prod(i0(bessel_args)))
    rms_exact = math.sqrt(max(prod - 1.0, 0.0))
    var_sum = float(np.sum(x**2 * nbars * (nbars + 1.0)))
    return DebyeWallerStats(
        mean_factor=mean,
        rms_exact=rms_exact,
        rms_small_eta=math.sqrt(var_sum),
        _var_sum=var_sum,
    )


@dataclass(frozen=True)
class StandingWaveDesign:
    """Superposition coefficients for standing-wave field tailoring.

    coefficients: C_m for the M component waves (leading term normalized
    to 1 in units of the first wavenumber). killed_orders lists the
    Taylor powers of the field forced to zero; leading_residual_order is
    the first surviving power beyond them. Residual sideband coupling
    scales as eta**suppression_exponent.
    """

    coefficients: np.ndarray
    parity: str
    killed_orders: tuple
    leading_residual_order: int
    suppression_exponent: int

    def suppression(self, eta: float) -> float:
        if eta < 0:
            raise RangeError("eta must be >= 0")
        return eta**self.suppression_exponent


def standing_wave_coefficients(k_list, parity: str) -> StandingWaveDesign:
    """Coefficients that null the low-order spatial derivatives of a field.

    For M superposed waves of wavenumbers k_list:

    parity="sine"   field sum C_m sin(k_m z): the odd Taylor powers
                    z^3, z^5, ..., z^(2M-1) are cancelled and the
                    gradient term is normalized (sum C_m k_m/k_1 = 1).
    parity="cosine" field sum C_m cos(k_m z): even powers z^2, ...,
                    z^(2M-2) cancelled, constant normalized (sum C_m = 1).

    Raises SingularSystemError for degenerate wavenumber sets.
    """
    k = np.asarray(k_list, dtype=float)
    if k.ndim != 1 or len(k) < 1:
        raise ModelInputError("k_list must be a non-empty 1-d sequence")
    if np.any(k <= 0):
        raise RangeError("wavenumbers must be positive")
    M = len(k)
    rho = k / k[0]
    if parity == "sine":
        killed = tuple(range(3, 2 * M, 2))
        rows = [rho]  # gradient normalization
        leading_residual = 2 * M + 1
    elif parity == "cosine":
        killed = tuple(range(2, 2 * M - 1, 2))
        rows = [np.ones(M)]  # constant-term normalization
        leading_residual = 2 * M
    else:
        raise ModelInputError(f"unknown parity '{parity}'")
    for n in killed:
        rows.append(rho**n)
    A = np.vstack(rows)
    b = np.zeros(M)
    b[0] = 1.0
    if np.linalg.cond(A) > 1e12:
        raise SingularSystemError(
            "wavenumber set is degenerate (condition number above 1e12)"
        )
    C = np.linalg.solve(A, b)
    return StandingWaveDesign(
        coefficients=C,
        parity=parity,
        killed_orders=killed,
        leading_residual_order=leading_residual,
        suppression_exponent=2 * M,
    )


@dataclass(frozen=True)
class EmissionRatio:
    """Spontaneous-emission figure of merit for one gate operation."""

    xi: float
    kappa: float | None
    kappa_opt: float | None
    xi_min: float | None


def spontaneous_emission_ratio(
    Gamma_s: float | None = None,
    Omega1: float | None = None,
    eta: float | None = None,
    Delta: float | None = None,
    kappa: float | None = None,
    raman: bool = False,
    Gamma: float | None = None,
    Delta_R: float | None = None,
) -> EmissionRatio:
    """Ratio of spontaneous-emission rate to gate Rabi frequency.

    Single-photon qubit with a nearby spectator level of linewidth
    Gamma_s detuned by Delta, driven sideband Rabi frequency Omega1,
    confinement parameter eta, and decay-rate ratio kappa between the
    upper qubit level and the spectator:

        xi(kappa) = (Gamma_s / (2 Omega1)) * (kappa + zeta/kappa),
        zeta = Omega1^2 / (eta Delta)^2.

    The optimum kappa is sqrt(zeta) = Omega1/(eta Delta), giving
    xi_min = Gamma_s/(eta Delta).
    With kappa=None the optimum is evaluated. All frequency inputs may be
    given consistently in either angular or ordinary units.

    raman=True switches to the two-photon variant: xi = Gamma/Delta_R,
    independent of intensity.
    """
    if raman:
        if Gamma is None or Delta_R is None:
            raise ModelInputError("raman variant needs Gamma and Delta_R")
        if Delta_R == 0:
            raise RangeError("Delta_R must be nonzero")
        x = Gamma / Delta_R
        return EmissionRatio(xi=x, kappa=None, kappa_opt=None, xi_min=x)
    if Gamma_s is None or Omega1 is None or eta is None or Delta is None:
        raise ModelInputError("need Gamma_s, Omega1, eta and Delta")
    if Omega1 <= 0 or Delta <= 0 or eta <= 0:
        raise RangeError("Omega1, eta and Delta must be positive")
    if Gamma_s == 0:
        return EmissionRatio(xi=0.0, kappa=kappa, kappa_opt=None, xi_min=0.0)
    zeta = Omega1**2 / (eta * Delta) ** 2
    kappa_opt = math.sqrt(zeta)
    xi_min = Gamma_s / (eta * Delta)
    if kappa is None:
        kappa = kappa_opt
    elif kappa <= 0:
        raise RangeError("kappa must be positive")
    xi = (Gamma_s / (2.0 * Omega1)) * (kappa + zeta / kappa)
    return EmissionRatio(xi=xi, kappa=kappa, kappa_opt=kappa_opt, xi_min=xi_min)


def beam_crosstalk(w0: float, r: float) -> dict:
    """Relative intensity and field of a Gaussian beam at radius r."""
    if w0 <= 0:
        raise RangeError("w0 must be positive")
    intensity = math.exp(-2.0 * r**2 / w0**2)
    return {"intensity_ratio": intensity, "field_ratio": math.sqrt(intensity)}


def stark_addressing_epsilon(theta: float, m: int) -> dict:
    """Intensity ratio that makes a neighbor close its off-resonant orbit.

    With the target ion driven through pulse area theta on resonance, a
    neighbor receiving relative intensity epsilon and a proportionate
    level shift returns exactly to its initial state after m full
    generalized-Rabi cycles when epsilon solves

        epsilon^2 - [1 + (2 m pi / theta)^2] epsilon + 1 = 0.

    (The integer in the printed quadratic is the cycle count m of the
    same sentence.) The root in (0,1) is returned along with the leftover
    relative phase xi = theta (1-epsilon)/sqrt(epsilon) on the neighbor,
    equal to theta*sqrt((2 m pi/theta)^2 - 1).

    Raises NoRootError when the quadratic has no root strictly inside
    (0,1) (the degenerate theta = 2 pi m case).
    """
    if not 0.0 < theta <= 2.0 * math.pi:
        raise RangeError("theta must be in (0, 2*pi]")
    if m < 1:
        raise RangeError("m must be >= 1")
    b = 1.0 + (2.0 * m * math.pi / theta) ** 2
    disc = b * b - 4.0
    if disc <= 0.0:
        raise NoRootError("no epsilon root strictly inside (0,1)")
    # rationalized root, stable when b is large (small theta)
    eps = 2.0 / (b + math.sqrt(disc))
    xi = theta * (1.0 - eps) / math.sqrt(eps)
    return {"epsilon": eps, "xi_phase": xi}


def shot_noise_floor(
    P_u: float, tau_op: float, wavelength: float, eta_det: float, eps_split: float
) -> float:
    """Photon shot-noise limit of fractional power stabilization.

    A pickoff fraction eps_split of the beam monitored with quantum
    efficiency eta_det bounds the achievable fractional power noise of a
    pulse of usable power P_u and duration tau_op:

        dP/P >= sqrt(hbar*omega / (P_u tau_op eta_det eps (1-eps))).
    """
    from scipy.constants import c as c_light, hbar

    if P_u <= 0 or tau_op <= 0 or wavelength <= 0:
        raise RangeError("P_u, tau_op and wavelength must be positive")
    if not (0.0 < eta_det <= 1.0) or not (0.0 < eps_split < 1.0):
        raise RangeError("eta_det in (0,1], eps_split in (0,1)")
    omega = 2.0 * math.pi * c_light / wavelength
    return math.sqrt(
        hbar * omega / (P_u * tau_op * eta_det * eps_split * (1.0 - eps_split))
    )
