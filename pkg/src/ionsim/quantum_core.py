"""State containers and linear-algebra primitives.

The package works in the product space (two-level spin) x (harmonic
oscillator truncated at n_max). Pure states live in QuantumState;
motional mixtures (thermal states, damped evolutions) in DensityMatrix
over the Fock basis alone. Everything is dense: the physics of interest
involves a few quanta, so n_max rarely needs to exceed a couple hundred.

Spin convention, fixed across the codebase: "up" is the higher-energy
internal level, "down" the lower. Composite amplitudes are indexed
(s, n) -> s*(n_max+1) + n with s = 0 for down, 1 for up.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .errors import (
    DimensionError,
    ModelInputError,
    RangeError,
    TruncationError,
    TruncationWarning,
)

SPIN_DOWN = "down"
SPIN_UP = "up"
_SPIN_INDEX = {SPIN_DOWN: 0, SPIN_UP: 1, 0: 0, 1: 1}

DEFAULT_EPS_TRUNC = 1e-8


def index_of(spin, n: int, n_max: int) -> int:
    """Flat index of basis ket (spin, n)."""
    try:
        s = _SPIN_INDEX[spin]
    except KeyError:
        raise ModelInputError(f"unknown spin label {spin!r}")
    if not 0 <= n <= n_max:
        raise RangeError(f"n={n} outside 0..{n_max}")
    return s * (n_max + 1) + n


class QuantumState:
    """Pure state on the spin (x) truncated-oscillator space.

    Parameters
    ----------
    amplitudes : array_like, complex, length 2*(n_max+1)
        Basis ordering: all spin-down Fock amplitudes first, then spin-up.
    n_max : int
        Highest retained Fock level.

    The state is value-semantic: operations return new instances.
    """

    __slots__ = ("amplitudes", "n_max")

    def __init__(self, amplitudes, n_max: int):
        amps = np.asarray(amplitudes, dtype=complex)
        if amps.shape != (2 * (n_max + 1),):
            raise DimensionError(
                f"amplitude vector has shape {amps.shape}, expected ({2*(n_max+1)},)"
            )
        self.amplitudes = amps
        self.n_max = int(n_max)

    @property
    def dim(self) -> int:
        return 2 * (self.n_max + 1)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def amplitude(self, spin, n: int) -> complex:
        return complex(self.amplitudes[index_of(spin, n, self.n_max)])

    def truncation_tail(self) -> float:
        """Population in the top two Fock levels, summed over spin."""
        N = self.n_max + 1
        idx = [N - 2, N - 1, 2 * N - 2, 2 * N - 1] if N >= 2 else [N - 1, 2 * N - 1]
        return float(np.sum(np.abs(self.amplitudes[idx]) ** 2))

    def copy(self) -> "QuantumState":
        return QuantumState(self.amplitudes.copy(), self.n_max)


class DensityMatrix:
    """Hermitian unit-trace operator on the Fock basis 0..n_max.

    Construction validates hermiticity (1e-12), trace (1e-9) and
    positivity (eigenvalues >= -1e-9); pass validate=False only for
    intermediate algebra that re-validates afterwards.
    """

    __slots__ = ("rho", "n_max")

    def __init__(self, rho, n_max: int, validate: bool = True):
        r = np.asarray(rho, dtype=complex)
        if r.shape != (n_max + 1, n_max + 1):
            raise DimensionError(
                f"density matrix has shape {r.shape}, expected {(n_max+1, n_max+1)}"
            )
        if validate:
            if np.max(np.abs(r - r.conj().T)) > 1e-12:
                raise ModelInputError("density matrix is not Hermitian to 1e-12")
            tr = float(np.trace(r).real)
            if abs(tr - 1.0) > 1e-9:
                raise ModelInputError(f"density matrix trace {tr} is not 1 within 1e-9")
            if float(np.linalg.eigvalsh(r)[0]) < -1e-9:
                raise ModelInputError("density matrix has an eigenvalue below -1e-9")
        self.rho = r
        self.n_max = int(n_max)

    def trace(self) -> float:
        return float(np.trace(self.rho).real)

    def mean_n(self) -> float:
        return float(np.sum(np.arange(self.n_max + 1) * np.diag(self.rho).real))

    def copy(self) -> "DensityMatrix":
        return DensityMatrix(self.rho.copy(), self.n_max, validate=False)


def make_state(
    kind: str,
    n_max: int,
    spin=SPIN_DOWN,
    n: int = 0,
    alpha: complex | None = None,
    nbar: float | None = None,
    eps_trunc: float = DEFAULT_EPS_TRUNC,
):
    """Construct a standard initial state.

    kind = "fock"
        |spin, n>. Requires n <= n_max.
    kind = "coherent"
        Spin eigenstate times the coherent state of amplitude alpha,
        truncated at n_max and renormalized. The Poisson weight beyond
        n_max must stay below eps_trunc or TruncationError is raised.
    kind = "thermal"
        Diagonal DensityMatrix with populations proportional to
        nbar^n/(1+nbar)^(n+1), renormalized over the kept levels. The
        omitted geometric tail must stay below eps_trunc.

    Returns QuantumState for "fock"/"coherent", DensityMatrix for "thermal".
    """
    if n_max < 1:
        raise RangeError("n_max must be >= 1")
    N = n_max + 1

    if kind == "fock":
        amps = np.zeros(2 * N, dtype=complex)
        amps[index_of(spin, n, n_max)] = 1.0
        return QuantumState(amps, n_max)

    if kind == "coherent":
        if alpha is None:
            raise ModelInputError("coherent state needs alpha")
        a2 = abs(alpha) ** 2
        # Poisson tail mass beyond n_max
        tail = 1.0 - _poisson_cdf(n_max, a2)
        if tail >= eps_trunc:
            raise TruncationError(
                f"coherent tail {tail:.2e} beyond n_max={n_max} exceeds {eps_trunc:.1e}"
            )
        if alpha == 0:
            c = np.zeros(N, dtype=complex)
            c[0] = 1.0
        else:
            ns = np.arange(N)
            log_c = -0.5 * a2 + ns * np.log(complex(alpha)) - 0.5 * _log_factorial(ns)
            c = np.exp(log_c)
            c = c / np.linalg.norm(c)
        amps = np.zeros(2 * N, dtype=complex)
        s = _SPIN_INDEX[spin]
        amps[s * N : (s + 1) * N] = c
        return QuantumState(amps, n_max)

    if kind == "thermal":
        if nbar is None:
            raise ModelInputError("thermal state needs nbar")
        if nbar < 0:
            raise RangeError("nbar must be >= 0")
        if nbar == 0:
            p = np.zeros(N)
            p[0] = 1.0
        else:
            x = nbar / (1.0 + nbar)
            tail = x**N
            if tail >= eps_trunc:
                raise TruncationError(
                    f"thermal tail {tail:.2e} beyond n_max={n_max} exceeds {eps_trunc:.1e}"
                )
            p = (1.0 - x) * x ** np.arange(N)
            p = p / p.sum()
        return DensityMatrix(np.diag(p.astype(complex)), n_max)

    raise ModelInputError(f"unknown state kind '{kind}'")


def _log_factorial(ns: np.ndarray) -> np.ndarray:
    from scipy.special import gammaln

    return gammaln(np.asarray(ns, dtype=float) + 1.0)


def _poisson_cdf(n: int, mean: float) -> float:
    from scipy.special import gammaincc

    # P(X <= n) for X ~ Poisson(mean)
    return float(gammaincc(n + 1.0, mean))


def apply_unitary(
    state,
    U: np.ndarray,
    eps_trunc: float = DEFAULT_EPS_TRUNC,
    strict: bool = False,
):
    """Apply a unitary to a QuantumState (U psi) or DensityMatrix (U rho U+).

    The matrix must be unitary to 1e-10 (checked under __debug__). After
    the product, population in the top two Fock levels above eps_trunc
    triggers TruncationWarning, or TruncationError when strict is set.
    """
    U = np.asarray(U, dtype=complex)
    if isinstance(state, QuantumState):
        dim = state.dim
    elif isinstance(state, DensityMatrix):
        dim = state.n_max + 1
    else:
        raise ModelInputError(f"cannot apply a unitary to {type(state).__name__}")
    if U.shape != (dim, dim):
        raise DimensionError(f"operator shape {U.shape} does not match dimension {dim}")
    if __debug__:
        defect = float(np.max(np.abs(U.conj().T @ U - np.eye(dim))))
        if defect > 1e-10:
            raise ModelInputError(f"matrix is not unitary (defect {defect:.2e})")

    if isinstance(state, QuantumState):
        out = QuantumState(U @ state.amplitudes, state.n_max)
        if abs(out.norm() - 1.0) > 1e-12 and abs(state.norm() - 1.0) <= 1e-12:
            raise ModelInputError("unitary application failed to preserve the norm")
        tail = out.truncation_tail()
        if tail > eps_trunc:
            msg = f"population {tail:.2e} in the top two Fock levels (guard {eps_trunc:.1e})"
            if strict:
                raise TruncationError(msg)
            warnings.warn(msg, TruncationWarning)
        return out

    out_rho = U @ state.rho @ U.conj().T
    out = DensityMatrix(out_rho, state.n_max, validate=False)
    tail = float(np.sum(np.diag(out.rho).real[-2:]))
    if tail > eps_trunc:
        msg = f"population {tail:.2e} in the top two Fock levels (guard {eps_trunc:.1e})"
        if strict:
            raise TruncationError(msg)
        warnings.warn(msg, TruncationWarning)
    return out


def overlap(a: QuantumState, b: QuantumState) -> complex:
    """Inner product <a|b>."""
    if not isinstance(a, QuantumState) or not isinstance(b, QuantumState):
        raise ModelInputError("overlap takes two QuantumState objects")
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch {a.dim} vs {b.dim}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def populations(state) -> dict:
    """Basis populations.

    QuantumState -> {(spin_label, n): |c|^2}; DensityMatrix -> {n: rho_nn}.
    """
    if isinstance(state, QuantumState):
        N = state.n_max + 1
        p = np.abs(state.amplitudes) ** 2
        out = {}
        for s, label in ((0, SPIN_DOWN), (1, SPIN_UP)):
            for n in range(N):
                out[(label, n)] = float(p[s * N + n])
        return out
    if isinstance(state, DensityMatrix):
        d = np.diag(state.rho).real
        return {n: float(d[n]) for n in range(state.n_max + 1)}
    raise ModelInputError(f"cannot read populations of {type(state).__name__}")


def detection_false_negative(n_d: float) -> float:
    """Probability of detecting zero photons from a bright state.

    With n_d mean detected photons per interrogation the Poissonian
    no-count probability is exp(-n_d).
    """
    if n_d < 0:
        raise RangeError("mean photon number must be >= 0")
    return math.exp(-n_d)


def state_csv(state) -> str:
    """CSV dump of a state: one basis element per row.

    QuantumState rows: index, spin, n, re, im.
    DensityMatrix rows: row, col, re, im (upper triangle only).
    """
    lines = []
    if isinstance(state, QuantumState):
        lines.append("index,spin,n,re,im")
        N = state.n_max + 1
        for i, c in enumerate(state.amplitudes):
            s, n = divmod(i, N)
            label = SPIN_DOWN if s == 0 else SPIN_UP
            lines.append(f"{i},{label},{n},{c.real:.17g},{c.imag:.17g}")
    elif isinstance(state, DensityMatrix):
        lines.append("row,col,re,im")
        N = state.n_max + 1
        for i in range(N):
            for j in range(i, N):
                c = state.rho[i, j]
                lines.append(f"{i},{j},{c.real:.17g},{c.imag:.17g}")
    else:
        raise ModelInputError(f"cannot serialize {type(state).__name__}")
    return "\n".join(lines) + "\n"
