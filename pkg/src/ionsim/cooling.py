"""Resolved-sideband cooling as an incoherent per-cycle rate model.

One cooling cycle is a red-sideband pulse followed by a repump. The pulse
moves population from level n to n-1 with probability sin^2 of the
accumulated pulse area on that transition; the repump resets the internal
state and kicks the moved population back up one quantum with probability
omega_R/omega_z per scattering event. The repump destroys coherence every
cycle, so diagonal (population-only) dynamics are exact here; a coherent
single cycle can be composed from pulse_engine when phase matters.

Pulse durations are tracked as areas on the lowest sideband transition
(area = |Omega_{1,0}| * t, radians), which keeps the model independent of
the absolute Rabi rate: only area ratios between ladder rungs enter the
transfer probabilities. An area of pi/2 empties n=1 completely.
"""

import io
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import constants as _const

from .coupling import CouplingParams, rabi_frequency
from .errors import (
    ModelInputError,
    RangeError,
    RegimeError,
    RegimeWarning,
    TruncationWarning,
)
from .quantum_core import DensityMatrix

__all__ = [
    "CoolingConfig",
    "CoolingResult",
    "cooling_limit",
    "recoil_frequency",
    "sideband_cool",
]

_STRATEGIES = ("fixed", "randomized", "schedule")


@dataclass(frozen=True)
class CoolingConfig:
    """Parameters of a sideband-cooling run.

    eta is the Lamb-Dicke parameter of the cooling transition, omega_z the
    motional frequency, omega_R the photon recoil frequency (both rad/s;
    only their ratio enters the cycle model), gamma_rad the repump
    linewidth used by the closed-form limit. pulse_strategy picks how the
    per-cycle pulse area is chosen:

      fixed       every cycle uses pulse_area (default pi/2)
      randomized  area drawn uniformly from [0.7, 1.3]*pi/2 each cycle
      schedule    areas taken from the schedule list, repeating cyclically

    scatters_per_cycle is the number of repump scattering events applied
    to the population the pulse moved (branching-ratio abstraction).
    """

    eta: float
    omega_z: float
    omega_R: float
    gamma_rad: float
    pulse_strategy: str = "randomized"
    cycles: int = 100
    pulse_area: float | None = None
    schedule: tuple = ()
    scatters_per_cycle: int = 2

    def __post_init__(self):
        if self.eta <= 0:
            raise RangeError("eta must be > 0")
        if self.omega_z <= 0 or self.omega_R < 0:
            raise RangeError("omega_z must be > 0 and omega_R >= 0")
        if self.gamma_rad < 0:
            raise RangeError("gamma_rad must be >= 0")
        if self.cycles < 1:
            raise RangeError("cycles must be >= 1")
        if self.pulse_strategy not in _STRATEGIES:
            raise ModelInputError(
                f"pulse_strategy must be one of {_STRATEGIES}, got {self.pulse_strategy!r}"
            )
        if self.pulse_strategy == "schedule":
            if len(self.schedule) == 0:
                raise ModelInputError("schedule strategy needs a nonempty schedule")
            if any(a <= 0 for a in self.schedule):
                raise RangeError("schedule areas must be > 0")
        if self.pulse_area is not None and self.pulse_area <= 0:
            raise RangeError("pulse_area must be > 0")
        if self.scatters_per_cycle < 0:
            raise RangeError("scatters_per_cycle must be >= 0")

    @property
    def recoil_ratio(self) -> float:
        """Heating probability per repump scattering event."""
        return self.omega_R / self.omega_z


@dataclass
class CoolingResult:
    """Trajectory record of one cooling run.

    populations is the final diagonal, mean_n and p0 have one entry per
    recorded cycle boundary (cycle 0 is the initial state), pulse_areas
    the area actually used in each cycle.
    """

    populations: np.ndarray
    mean_n: np.ndarray
    p0: np.ndarray
    pulse_areas: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("cycle,mean_n,P0\n")
        for k, (m, p) in enumerate(zip(self.mean_n, self.p0)):
            buf.write(f"{k},{float(m)!r},{float(p)!r}\n")
        return buf.getvalue()


def recoil_frequency(wavelength: float, mass: float) -> float:
    """Photon recoil frequency hbar*k^2/(2m) in rad/s.

    wavelength in meters, mass in kg. For a 313 nm photon on a 9.012 u
    ion this lands near 2*pi*230 kHz.
    """
    if wavelength <= 0 or mass <= 0:
        raise RangeError("wavelength and mass must be > 0")
    k = 2.0 * math.pi / wavelength
    return _const.hbar * k * k / (2.0 * mass)


def cooling_limit(gamma_rad: float, omega_z: float) -> float:
    """Closed-form sideband-cooling floor (gamma/(2*omega_z))^2.

    Valid only in the resolved-sideband regime gamma_rad < omega_z;
    RegimeError otherwise.
    """
    if gamma_rad < 0 or omega_z <= 0:
        raise RangeError("gamma_rad must be >= 0 and omega_z > 0")
    if gamma_rad >= omega_z:
        raise RegimeError(
            f"gamma_rad = {gamma_rad:.3e} not below omega_z = {omega_z:.3e}: "
            "sidebands unresolved, the closed-form limit does not apply"
        )
    return (gamma_rad / (2.0 * omega_z)) ** 2


def _cycle_areas(cfg: CoolingConfig, rng: np.random.Generator) -> np.ndarray:
    base = 0.5 * math.pi
    if cfg.pulse_strategy == "fixed":
        a = cfg.pulse_area if cfg.pulse_area is not None else base
        return np.full(cfg.cycles, a)
    if cfg.pulse_strategy == "schedule":
        sched = np.asarray(cfg.schedule, dtype=float)
        reps = -(-cfg.cycles // sched.size)
        return np.tile(sched, reps)[: cfg.cycles]
    return rng.uniform(0.7 * base, 1.3 * base, cfg.cycles)


def sideband_cool(initial: DensityMatrix, cfg: CoolingConfig, seed=None) -> CoolingResult:
    """Run the per-cycle rate model and record the trajectory.

    initial must be diagonal (populations only); off-diagonal weight above
    1e-12 raises ModelInputError since the model has no phase to act on.
    A RegimeWarning fires when eta^2 * <n>_initial exceeds 0.1 (the
    one-quantum recoil picture starts to blur), and a TruncationWarning
    when recoil pushes more than 1e-9 population against the top of the
    ladder, where it is held rather than lost (population is conserved
    exactly; the top level is a reflecting boundary).
    """
    if not isinstance(initial, DensityMatrix):
        raise ModelInputError("sideband_cool starts from a DensityMatrix")
    off = initial.rho - np.diag(np.diag(initial.rho))
    if np.abs(off).max() > 1e-12:
        raise ModelInputError("initial state must be diagonal (incoherent)")
    p = np.real(np.diag(initial.rho)).copy()
    n_max = initial.n_max
    levels = np.arange(n_max + 1, dtype=float)

    if cfg.eta ** 2 * float(p @ levels) > 0.1:
        warnings.warn(
            "eta^2 * <n> exceeds 0.1: outside the single-quantum recoil regime",
            RegimeWarning,
            stacklevel=2,
        )

    c = CouplingParams(Omega=1.0, eta=cfg.eta)
    # ladder rates relative to the 1<->0 sideband; area pi/2 empties n=1
    r10 = rabi_frequency(1, 0, c)
    ratio = np.array(
        [abs(rabi_frequency(n, n - 1, c)) / abs(r10) for n in range(1, n_max + 1)]
    )

    h = cfg.recoil_ratio
    if h >= 1.0:
        raise RegimeError("omega_R/omega_z >= 1: recoil dominates, model invalid")
    # distribution of quanta gained over the repump scatters (binomial)
    ks = np.arange(cfg.scatters_per_cycle + 1)
    kick = np.array(
        [math.comb(cfg.scatters_per_cycle, int(k)) * h ** k * (1 - h) ** (cfg.scatters_per_cycle - k)
         for k in ks]
    )

    rng = np.random.default_rng(seed)
    areas = _cycle_areas(cfg, rng)

    mean_traj = [float(p @ levels)]
    p0_traj = [float(p[0])]
    clipped = 0.0
    for a in areas:
        t_move = np.sin(a * ratio) ** 2          # transfer prob for n = 1..n_max
        moved = p[1:] * t_move
        p[1:] -= moved
        landed = np.zeros_like(p)
        landed[:-1] = moved                       # n -> n-1 before the repump
        for k, w in enumerate(kick):
            if k == 0:
                p += w * landed
                continue
            shifted = np.zeros_like(p)
            shifted[k:] = landed[:-k]
            # weight shoved past the top is held at the top level
            tail = landed[-k:].sum()
            shifted[-1] += tail
            clipped += w * tail
            p += w * shifted
        mean_traj.append(float(p @ levels))
        p0_traj.append(float(p[0]))

    if clipped > 1e-9:
        warnings.warn(
            f"recoil pressed {clipped:.2e} population against the top of the "
            "ladder; enlarge n_max for a faithful tail",
            TruncationWarning,
            stacklevel=2,
        )

    return CoolingResult(
        populations=p,
        mean_n=np.asarray(mean_traj),
        p0=np.asarray(p0_traj),
        pulse_areas=areas,
    )
