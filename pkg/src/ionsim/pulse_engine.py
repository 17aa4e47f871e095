"""Exact pulse propagators, gate constructions, and error accumulation.

Two layers share this module. The physical layer acts on a single ion's
(spin x oscillator) state: each pulse is a block-diagonal unitary built
from the exact detuned two-level propagator, one block per coupled
|down,n> <-> |up,n'> pair, each at its own matrix element. The symbolic
layer treats a register of L ions as qubits sharing one bus oscillator
mode and composes idealized gates (controlled-not between ions, register
rotations, maximally entangled state preparation) in that reduced space.

Phase conventions. The resonant propagator carries the -i e^{+-i(phi +
pi*dn/2)} factors of the interaction-picture solution; a pi carrier pulse
at phi=0 maps |down> to -i|up>. The symbolic rotation matrix uses the
mirrored field-phase sign that is conventional for Bloch rotations, so
the two layers differ by phi -> -phi in their off-diagonal phases. Global
phases are never stripped silently; fidelities compare |<a|b>|^2 so the
convention cannot leak into reported numbers.

Pulse areas. Because the matrix element depends on the Fock level, "a pi
pulse" is only meaningful against a named reference pair. PulseSpec.theta
is the pulse area accumulated on that pair (twice the Rabi angle); the
amplitude error zeta adds to the area and phi_err to the field phase.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import expm

from .coupling import CouplingParams, rabi_frequency
from .errors import (
    BusNotGroundError,
    InvalidTransitionError,
    MagicEtaError,
    ModelInputError,
    RangeError,
    RegisterSizeError,
    TimeOrderError,
)
from .quantum_core import (
    DEFAULT_EPS_TRUNC,
    SPIN_DOWN,
    SPIN_UP,
    QuantumState,
    apply_unitary,
    index_of,
    make_state,
    overlap,
)

TRANSITIONS = ("carrier", "red", "blue")

DEFAULT_REGISTER_CAP = 12


# ---------------------------------------------------------------------------
# pulse description


@dataclass(frozen=True)
class PulseSpec:
    """One rectangular pulse on the spin-motion ladder.

    Parameters
    ----------
    transition : {"carrier", "red", "blue"}
        Resonance class; sidebands change the Fock level by `order`.
    theta : float
        Pulse area in rad on the reference pair (twice the Rabi angle,
        so theta=pi inverts that pair).
    coupling : CouplingParams
        Base rate and Lamb-Dicke parameter of the driven mode.
    phi : float
        Field phase in rad.
    detuning_Delta : float
        Offset from the resonance class in rad/s, shared by all pairs.
    order : int
        Sideband order, >= 1; ignored for the carrier.
    zeta, phi_err : float
        Injected amplitude (area) and phase errors.
    reference_pair : (int, int), optional
        Fock levels (upper-spin n, lower-spin n) whose matrix element
        converts area to duration. Defaults: (0,0) carrier, (order,0)
        sidebands.
    """

    transition: str
    theta: float
    coupling: CouplingParams
    phi: float = 0.0
    detuning_Delta: float = 0.0
    order: int = 1
    zeta: float = 0.0
    phi_err: float = 0.0
    reference_pair: tuple | None = None

    def __post_init__(self):
        if self.transition not in TRANSITIONS:
            raise ModelInputError(
                f"unknown transition {self.transition!r}; expected one of {TRANSITIONS}"
            )
        if self.theta < 0:
            raise RangeError("pulse area theta must be >= 0")
        if self.order < 1:
            raise RangeError("sideband order must be >= 1")
        if self.reference_pair is not None:
            a, b = self.reference_pair
            if a < 0 or b < 0:
                raise ModelInputError("reference pair levels must be >= 0")
            dn = 0 if self.transition == "carrier" else self.order
            if abs(a - b) != dn:
                raise ModelInputError(
                    f"reference pair {self.reference_pair} does not match a "
                    f"{self.transition} transition of order {self.order}"
                )


def transition_class(p: PulseSpec) -> str:
    """Ledger key for the resonance class of a pulse."""
    if p.transition == "carrier":
        return "carrier"
    return f"{p.transition}{p.order}"


# ---------------------------------------------------------------------------
# two-level building block


def _rotation_block(Omega: float, Delta: float, t: float, phi: float, dn: int) -> np.ndarray:
    """Detuned propagator on one (upper, lower) pair, interaction picture."""
    if t == 0.0:
        return np.eye(2, dtype=complex)
    X = math.hypot(Delta, 2.0 * Omega)
    if X == 0.0:
        return np.eye(2, dtype=complex)
    half = 0.5 * X * t
    c, s = math.cos(half), math.sin(half)
    dphase = cmath.exp(-0.5j * Delta * t)
    ratio = Delta / X
    chi = 0.5 * Delta * t - phi - 0.5 * math.pi * dn
    off = -2j * (Omega / X) * s
    return np.array(
        [
            [dphase * (c + 1j * ratio * s), off * cmath.exp(-1j * chi)],
            [off * cmath.exp(1j * chi), dphase.conjugate() * (c - 1j * ratio * s)],
        ]
    )


def two_level_rotation(
    theta: float,
    phi: float = 0.0,
    Delta: float = 0.0,
    Omega_eff: float = 1.0,
    dn: int = 0,
) -> np.ndarray:
    """Exact propagator of one driven pair, basis (upper, lower).

    theta is the pulse area 2*Omega_eff*t; the duration is recovered as
    theta / (2|Omega_eff|) and the detuning acts over that duration. On
    resonance the matrix reduces to the sinusoidal flopping form with the
    i^dn sideband phase; theta=pi, phi=0, Delta=0, dn=0 sends the lower
    state to -i times the upper one.
    """
    if theta < 0:
        raise RangeError("pulse area theta must be >= 0")
    if theta == 0.0:
        return np.eye(2, dtype=complex)
    if Omega_eff == 0.0:
        raise RangeError("zero coupling cannot accumulate a finite pulse area")
    t = theta / (2.0 * abs(Omega_eff))
    U = _rotation_block(Omega_eff, Delta, t, phi, dn)
    _require_unitary(U)
    return U


def _require_unitary(U: np.ndarray, tol: float = 1e-10) -> None:
    if __debug__:
        d = U.shape[0]
        defect = float(np.max(np.abs(U.conj().T @ U - np.eye(d))))
        if defect > tol:
            raise ModelInputError(f"constructed matrix is not unitary (defect {defect:.2e})")


# ---------------------------------------------------------------------------
# phase ledger


@dataclass
class PhaseLedger:
    """Accumulated interaction-picture phase per (ion, resonance class).

    Between pulses each transition's frame advances by the integral of its
    detuning; apply_pulse adds the stored value to the field phase so a
    sequence separated by free evolution stays phase coherent.
    """

    phases: dict = field(default_factory=dict)
    clock: dict = field(default_factory=dict)
    history: list = field(default_factory=list)

    def phase(self, ion: int, klass: str = "carrier") -> float:
        return self.phases.get((ion, klass), 0.0)


def phase_ledger_advance(
    ledger: PhaseLedger,
    ion: int,
    Delta_t_profile,
    klass: str = "carrier",
) -> PhaseLedger:
    """Accumulate free-evolution phase for one ion.

    Delta_t_profile is an iterable of (t0, t1, Delta) segments with Delta
    constant on [t0, t1]. Segments must not step backwards in time for
    the same ion; a regression raises TimeOrderError. The ledger is
    mutated and returned.
    """
    for seg in Delta_t_profile:
        t0, t1, Delta = float(seg[0]), float(seg[1]), float(seg[2])
        if t1 < t0:
            raise TimeOrderError(f"segment ends at {t1} before it starts at {t0}")
        last = ledger.clock.get(ion)
        if last is not None and t0 < last:
            raise TimeOrderError(
                f"segment starting at {t0} precedes ion {ion}'s clock at {last}"
            )
        inc = Delta * (t1 - t0)
        key = (ion, klass)
        ledger.phases[key] = ledger.phases.get(key, 0.0) + inc
        ledger.clock[ion] = t1
        ledger.history.append((ion, klass, t0, t1, inc))
    return ledger


# ---------------------------------------------------------------------------
# pulses on a physical ion


def _transition_pairs(transition: str, order: int, n_max: int):
    """Coupled (upper-spin n, lower-spin n) Fock pairs for one resonance."""
    if transition == "carrier":
        return [(n, n) for n in range(n_max + 1)]
    if transition == "blue":
        return [(n + order, n) for n in range(n_max - order + 1)]
    return [(n, n + order) for n in range(n_max - order + 1)]


def pulse_unitary(p: PulseSpec, n_max: int, ledger_phase: float = 0.0) -> np.ndarray:
    """Full-space unitary of one pulse on the (spin x Fock) truncation.

    Every coupled pair evolves for the same duration at its own exact
    matrix element; uncoupled edge levels are left untouched. The caller
    is responsible for checking that those edge levels are unpopulated
    (apply_pulse does this).
    """
    theta_eff = p.theta + p.zeta
    if theta_eff < 0:
        raise RangeError("injected area error drives the pulse area negative")
    phi_tot = p.phi + p.phi_err + ledger_phase
    dn = 0 if p.transition == "carrier" else p.order

    ref = p.reference_pair
    if ref is None:
        ref = (0, 0) if p.transition == "carrier" else (p.order, 0)
    if max(ref) > n_max:
        raise ModelInputError(f"reference pair {ref} exceeds n_max={n_max}")
    Omega_ref = rabi_frequency(ref[0], ref[1], p.coupling)
    if Omega_ref == 0.0:
        raise RangeError(f"reference pair {ref} has a vanishing matrix element")
    t = theta_eff / (2.0 * abs(Omega_ref))

    dim = 2 * (n_max + 1)
    U = np.eye(dim, dtype=complex)
    for nu, nl in _transition_pairs(p.transition, p.order, n_max):
        blk = _rotation_block(
            rabi_frequency(nu, nl, p.coupling), p.detuning_Delta, t, phi_tot, dn
        )
        iu = index_of(SPIN_UP, nu, n_max)
        il = index_of(SPIN_DOWN, nl, n_max)
        U[iu, iu] = blk[0, 0]
        U[iu, il] = blk[0, 1]
        U[il, iu] = blk[1, 0]
        U[il, il] = blk[1, 1]
    _require_unitary(U)
    return U


def apply_pulse(
    state: QuantumState,
    p: PulseSpec,
    ledger: PhaseLedger | None = None,
    ion: int = 0,
    eps_trunc: float = DEFAULT_EPS_TRUNC,
    strict: bool = False,
) -> QuantumState:
    """Apply one pulse to a physical ion state.

    A sideband pulse whose topmost coupled partner would sit above the
    Fock truncation is refused (InvalidTransitionError) whenever the
    stranded edge levels carry population above 1e-12. With a ledger the
    accumulated phase for (ion, resonance class) offsets the field phase.
    """
    if not isinstance(state, QuantumState):
        raise ModelInputError("apply_pulse acts on a QuantumState")
    n_max = state.n_max
    if p.transition != "carrier":
        o = p.order
        if o > n_max:
            raise InvalidTransitionError(
                f"order-{o} sideband needs n_max >= {o}, have {n_max}"
            )
        # edge levels whose partner lies above the truncation
        spin = SPIN_DOWN if p.transition == "blue" else SPIN_UP
        for n in range(n_max - o + 1, n_max + 1):
            amp = state.amplitude(spin, n)
            if abs(amp) ** 2 > 1e-12:
                raise InvalidTransitionError(
                    f"{p.transition} sideband of order {o} from ({spin},{n}) "
                    f"would leave the truncation n_max={n_max}"
                )
    lphase = ledger.phase(ion, transition_class(p)) if ledger is not None else 0.0
    U = pulse_unitary(p, n_max, ledger_phase=lphase)
    return apply_unitary(state, U, eps_trunc=eps_trunc, strict=strict)


# ---------------------------------------------------------------------------
# gate reports


def gate_fidelity(U: np.ndarray, ideal: np.ndarray, inputs=None) -> float:
    """Mean squared overlap of gate outputs over basis inputs.

    Phase-insensitive per input state: each column pair contributes
    |<ideal e_j, U e_j>|^2, so a global or per-output phase never lowers
    the score of a permutation-class gate.
    """
    U = np.asarray(U, dtype=complex)
    V = np.asarray(ideal, dtype=complex)
    if U.shape != V.shape or U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ModelInputError("gate_fidelity needs two square matrices of equal size")
    cols = range(U.shape[0]) if inputs is None else inputs
    vals = [abs(np.vdot(V[:, j], U[:, j])) ** 2 for j in cols]
    return float(np.mean(vals))


@dataclass
class GateReport:
    """Constructed gate, its action on basis states, and a fidelity score."""

    unitary: np.ndarray
    truth_table: dict
    fidelity_vs_ideal: float
    basis: tuple

    def to_json(self) -> str:
        return json.dumps(
            {
                "basis": list(self.basis),
                "unitary_re": np.real(self.unitary).tolist(),
                "unitary_im": np.imag(self.unitary).tolist(),
                "truth_table": self.truth_table,
                "fidelity_vs_ideal": self.fidelity_vs_ideal,
            },
            indent=1,
        )

    def to_csv(self) -> str:
        lines = ["# gate report", f"# basis: {','.join(self.basis)}"]
        lines.append(f"# fidelity_vs_ideal: {self.fidelity_vs_ideal!r}")
        lines.append("row,col,re,im")
        d = self.unitary.shape[0]
        for i in range(d):
            for j in range(d):
                z = self.unitary[i, j]
                lines.append(f"{i},{j},{z.real!r},{z.imag!r}")
        lines.append("input,output")
        for k, v in self.truth_table.items():
            lines.append(f"{k},{v}")
        return "\n".join(lines) + "\n"


def _truth_table(U: np.ndarray, basis, inputs=None) -> dict:
    table = {}
    cols = range(U.shape[0]) if inputs is None else inputs
    for j in cols:
        col = U[:, j]
        k = int(np.argmax(np.abs(col)))
        table[basis[j]] = basis[k] if abs(col[k]) ** 2 >= 1.0 - 1e-9 else "superposition"
    return table


# ---------------------------------------------------------------------------
# phase gates


def phase_gate(phi: float) -> np.ndarray:
    """Diagonal two-qubit phase gate diag(1, 1, 1, e^{i phi}) on {e1 e2}."""
    return np.diag([1.0, 1.0, 1.0, cmath.exp(1j * phi)]).astype(complex)


def two_mode_phase_gate(phi: float) -> np.ndarray:
    """Idealized phase gate on two bus modes restricted to n in {0,1}.

    Experimental: the underlying pulse bookkeeping for driving a phase
    conditioned on two motional modes is not modeled; this returns the
    target diagonal diag(1,1,1,e^{i phi}) on the |n_a n_b> basis
    {00,01,10,11} so sequences can be prototyped against it.
    """
    return phase_gate(phi)


# ---------------------------------------------------------------------------
# controlled-not between the bus mode and a spin


_CN_BASIS = ("dn0", "up0", "dn1", "up1")
_CN_IDEAL = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


def cn_gate_three_pulse(aux_coupling: CouplingParams, phi_a: float = 0.0) -> GateReport:
    """Controlled-not (bus occupation controls the spin) via an auxiliary level.

    Composite of three pulses: a carrier pi/2 at phase phi_a, a 2*pi pulse
    on the blue sideband joining the auxiliary level to |up> (which flips
    the sign of |up,1> through its partner |aux,0>), and a second carrier
    pi/2 at phase phi_a + pi. Internally the space is three internal
    levels x bus {0,1}; the auxiliary level is never populated at the end
    (checked to 1e-12) and the report is restricted to the computational
    basis dn0, up0, dn1, up1.

    The carrier here is the symbolic-layer rotation, identical on both bus
    levels. The pair (aux,1) <-> (up,2) sits above the bus cap and idles;
    it is never reached from the computational subspace.
    """
    if rabi_frequency(1, 0, aux_coupling) == 0.0:
        raise RangeError("auxiliary sideband matrix element vanishes")

    # internal levels: 0 = dn, 1 = up, 2 = aux; index = level*2 + bus n
    def carrier(phi):
        c = s = math.sqrt(0.5)
        M = np.eye(6, dtype=complex)
        for n in (0, 1):
            lo, up = 0 * 2 + n, 1 * 2 + n
            M[up, up] = c
            M[up, lo] = -1j * cmath.exp(1j * phi) * s
            M[lo, up] = -1j * cmath.exp(-1j * phi) * s
            M[lo, lo] = c
        return M

    sign_flip = np.eye(6, dtype=complex)
    sign_flip[1 * 2 + 1, 1 * 2 + 1] = -1.0  # up,1
    sign_flip[2 * 2 + 0, 2 * 2 + 0] = -1.0  # aux,0

    U6 = carrier(phi_a + math.pi) @ sign_flip @ carrier(phi_a)
    comp = [0, 2, 1, 3]  # dn0, up0, dn1, up1
    leak = float(np.max(np.abs(U6[np.ix_([4, 5], comp)])))
    if leak > 1e-12:
        raise ModelInputError(f"auxiliary level retains amplitude {leak:.2e}")
    U = U6[np.ix_(comp, comp)]
    _require_unitary(U)
    return GateReport(
        unitary=U,
        truth_table=_truth_table(U, _CN_BASIS),
        fidelity_vs_ideal=gate_fidelity(U, _CN_IDEAL),
        basis=_CN_BASIS,
    )


def cn_gate_single_pulse(k: int, m: int, eta: float, phi: float = 0.0, Omega: float = 1.0) -> GateReport:
    """Controlled-not via one carrier pulse at a magic Lamb-Dicke value.

    At eta^2 = 1 - (2k+1)/(2m) the n=0 and n=1 carrier elements satisfy
    Omega_00 t = m*pi while Omega_11 t = (k+1/2)*pi, so one pulse inverts
    only the n=1 pair. The physical propagator carries a factor (-1)^m on
    the whole driven subspace; the report strips that global phase so the
    n=0 block reads as the identity, and drives the field at phase
    -phi - pi so the remaining n=1 block carries i e^{+-i phi} (-1)^{k-m}
    on its off-diagonal.
    """
    if not (isinstance(k, int) and isinstance(m, int)):
        raise ModelInputError("k and m must be integers")
    if k < 0 or m < k + 1:
        raise RangeError("need k >= 0 and m >= k+1")
    target = math.sqrt(1.0 - (2 * k + 1) / (2 * m))
    if abs(eta - target) > 1e-10:
        raise MagicEtaError(
            f"eta={eta!r} is not the magic value {target!r} for (k={k}, m={m})"
        )
    p = PulseSpec(
        transition="carrier",
        theta=(2 * k + 1) * math.pi,
        coupling=CouplingParams(Omega, eta),
        phi=-phi - math.pi,
        reference_pair=(1, 1),
    )
    U_full = pulse_unitary(p, n_max=1)
    # quantum_core ordering dn0,dn1,up0,up1 -> report ordering dn0,up0,dn1,up1
    perm = [0, 2, 1, 3]
    U = (-1.0) ** m * U_full[np.ix_(perm, perm)]
    _require_unitary(U)
    return GateReport(
        unitary=U,
        truth_table=_truth_table(U, _CN_BASIS),
        fidelity_vs_ideal=gate_fidelity(U, _CN_IDEAL),
        basis=_CN_BASIS,
    )


# ---------------------------------------------------------------------------
# symbolic register of L qubits sharing one bus mode


@dataclass
class RegisterState:
    """L spins plus one shared bus oscillator, amplitudes (2^L, n_bus+1).

    Bit j of the first index is the spin of ion j (0 = down). The register
    layer is symbolic: gates act as exact maps, there is no per-ion
    motional space.
    """

    L: int
    n_bus: int
    amps: np.ndarray

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def overlap(self, other: "RegisterState") -> complex:
        if self.amps.shape != other.amps.shape:
            raise ModelInputError("register shapes differ")
        return complex(np.vdot(self.amps, other.amps))

    def bus_excited_weight(self) -> float:
        return float(np.sum(np.abs(self.amps[:, 1:]) ** 2))

    def reduced_spin_purity(self, j: int) -> float:
        """Purity of ion j's reduced density matrix."""
        _check_ion(self, j)
        b = np.arange(2**self.L)
        lo = b[(b >> j) & 1 == 0]
        A0 = self.amps[lo, :].ravel()
        A1 = self.amps[lo | (1 << j), :].ravel()
        r00 = np.vdot(A0, A0)
        r11 = np.vdot(A1, A1)
        r01 = np.vdot(A1, A0)
        return float(abs(r00) ** 2 + abs(r11) ** 2 + 2 * abs(r01) ** 2)

    def copy(self) -> "RegisterState":
        return RegisterState(self.L, self.n_bus, self.amps.copy())


def _check_ion(reg: RegisterState, j: int) -> None:
    if not 0 <= j < reg.L:
        raise RangeError(f"ion index {j} outside register of {reg.L}")


def register_ground(L: int, n_bus: int = 1, cap: int = DEFAULT_REGISTER_CAP) -> RegisterState:
    """All spins down, bus in |0>."""
    if L < 1:
        raise RangeError("register needs at least one ion")
    if L > cap:
        raise RegisterSizeError(f"register of {L} ions exceeds the cap of {cap}")
    if n_bus < 1:
        raise RangeError("bus mode needs n_bus >= 1")
    amps = np.zeros((2**L, n_bus + 1), dtype=complex)
    amps[0, 0] = 1.0
    return RegisterState(L, n_bus, amps)


def register_rotation(reg: RegisterState, ion: int, theta: float, phi: float) -> RegisterState:
    """Bloch rotation of one ion's spin, leaving the bus untouched.

    Matrix convention (basis down, up):
        [[cos(theta/2),            -i e^{+i phi} sin(theta/2)],
         [-i e^{-i phi} sin(theta/2), cos(theta/2)          ]]
    Note the mirrored phi sign relative to the physical-layer propagator.
    """
    _check_ion(reg, ion)
    c = math.cos(0.5 * theta)
    s = math.sin(0.5 * theta)
    b = np.arange(2**reg.L)
    lo = b[(b >> ion) & 1 == 0]
    hi = lo | (1 << ion)
    out = reg.amps.copy()
    a_lo = reg.amps[lo, :]
    a_hi = reg.amps[hi, :]
    out[lo, :] = c * a_lo + (-1j * cmath.exp(1j * phi) * s) * a_hi
    out[hi, :] = (-1j * cmath.exp(-1j * phi) * s) * a_lo + c * a_hi
    return RegisterState(reg.L, reg.n_bus, out)


def _red_pi_map_in(amps: np.ndarray, lo, hi, n_bus: int) -> np.ndarray:
    """Red-sideband pi pulse on one ion at phase 0: |up,n> -> -|dn,n+1>."""
    out = np.zeros_like(amps)
    out[lo, 0] = amps[lo, 0]  # (dn,0) has no partner
    for n in range(1, n_bus + 1):
        out[hi, n - 1] = amps[lo, n]
    for n in range(n_bus):
        out[lo, n + 1] = -amps[hi, n]
    out[hi, n_bus] = amps[hi, n_bus]  # partner above the bus cap
    return out


def _red_pi_map_out(amps: np.ndarray, lo, hi, n_bus: int) -> np.ndarray:
    """Exact inverse of _red_pi_map_in."""
    out = np.zeros_like(amps)
    out[lo, 0] = amps[lo, 0]
    for n in range(1, n_bus + 1):
        out[lo, n] = amps[hi, n - 1]
    for n in range(n_bus):
        out[hi, n] = -amps[lo, n + 1]
    out[hi, n_bus] = amps[hi, n_bus]
    return out


def _bus_cn_on_spin(amps: np.ndarray, t_lo, t_hi) -> np.ndarray:
    """Flip spin t on the bus n=1 column; higher bus levels idle."""
    out = amps.copy()
    out[t_lo, 1] = amps[t_hi, 1]
    out[t_hi, 1] = amps[t_lo, 1]
    return out


def apply_cn_between_ions(reg: RegisterState, c: int, t: int) -> RegisterState:
    """Controlled-not of ion c onto ion t through the bus mode.

    Map-in: red-sideband pi pulse writes c's spin onto the bus (and must
    find the bus in |0>, else BusNotGroundError). Middle: the exact
    bus-controlled flip of t (the three-pulse composite at phase -pi/2,
    where it reduces to a pure permutation). Map-out: the exact inverse
    of the map-in. The composite is the textbook controlled-not with no
    residual phases and restores the bus to |0>.
    """
    _check_ion(reg, c)
    _check_ion(reg, t)
    if c == t:
        raise ModelInputError("control and target must differ")
    w = reg.bus_excited_weight()
    if w > 1e-12:
        raise BusNotGroundError(f"bus mode carries weight {w:.2e} outside |0>")
    b = np.arange(2**reg.L)
    c_lo = b[(b >> c) & 1 == 0]
    c_hi = c_lo | (1 << c)
    t_lo = b[(b >> t) & 1 == 0]
    t_hi = t_lo | (1 << t)
    a = _red_pi_map_in(reg.amps, c_lo, c_hi, reg.n_bus)
    a = _bus_cn_on_spin(a, t_lo, t_hi)
    a = _red_pi_map_out(a, c_lo, c_hi, reg.n_bus)
    return RegisterState(reg.L, reg.n_bus, a)


def cn_between_ions(c: int = 0, t: int = 1, n_bus: int = 1) -> GateReport:
    """Report form of the ion-to-ion controlled-not over (spin_c, spin_t, bus).

    The unitary covers the full 4*(n_bus+1) dimensional space in the basis
    ordering (s_c, s_t, n) with s_c slowest; the truth table and fidelity
    are taken over the four bus-ground inputs, where the action is the
    permutation that flips t exactly when c is up.
    """
    if c == t:
        raise ModelInputError("control and target must differ")
    if n_bus < 1:
        raise RangeError("bus mode needs n_bus >= 1")
    nb = n_bus + 1
    dim = 4 * nb
    spins = ("dn", "up")
    basis = tuple(
        f"{spins[sc]}{spins[st]}{n}" for sc in (0, 1) for st in (0, 1) for n in range(nb)
    )
    c_lo, c_hi = np.array([0, 2]), np.array([1, 3])  # bit 0 = ion c's spin
    t_lo, t_hi = np.array([0, 1]), np.array([2, 3])
    U = np.zeros((dim, dim), dtype=complex)
    for sc in (0, 1):
        for st in (0, 1):
            for n in range(nb):
                amps = np.zeros((4, nb), dtype=complex)
                amps[sc + 2 * st, n] = 1.0
                a = _red_pi_map_in(amps, c_lo, c_hi, n_bus)
                a = _bus_cn_on_spin(a, t_lo, t_hi)
                a = _red_pi_map_out(a, c_lo, c_hi, n_bus)
                col = (sc * 2 + st) * nb + n
                for b2 in range(4):
                    sc2, st2 = b2 & 1, (b2 >> 1) & 1
                    for n2 in range(nb):
                        U[(sc2 * 2 + st2) * nb + n2, col] = a[b2, n2]
    _require_unitary(U)
    ground_inputs = [(sc * 2 + st) * nb for sc in (0, 1) for st in (0, 1)]
    ideal = np.eye(dim, dtype=complex)
    # flip t on the c=up bus-ground columns
    for st in (0, 1):
        col = (1 * 2 + st) * nb
        row = (1 * 2 + (1 - st)) * nb
        ideal[:, col] = 0.0
        ideal[row, col] = 1.0
    table = _truth_table(U, basis, inputs=ground_inputs)
    fid = gate_fidelity(U, ideal, inputs=ground_inputs)
    return GateReport(unitary=U, truth_table=table, fidelity_vs_ideal=fid, basis=basis)


def prepare_max_entangled(
    L: int, cap: int = DEFAULT_REGISTER_CAP, n_bus: int = 1
) -> RegisterState:
    """Drive the register to (|dn...dn> + |up...up>)/sqrt(2) x |0>.

    A pi/2 rotation on ion 0 (field phase -pi/2, which in the rotation
    convention gives the real, plus-signed superposition) followed by a
    chain of controlled-nots from ion 0 onto each other ion.
    """
    if L < 2:
        raise RangeError("need at least two ions to entangle")
    reg = register_ground(L, n_bus=n_bus, cap=cap)
    reg = register_rotation(reg, 0, 0.5 * math.pi, -0.5 * math.pi)
    for i in range(1, L):
        reg = apply_cn_between_ions(reg, 0, i)
    return reg


# ---------------------------------------------------------------------------
# coherent drive


def displacement_drive(
    state: QuantumState,
    Omega1: complex,
    t: float,
    eps_trunc: float = DEFAULT_EPS_TRUNC,
    strict: bool = True,
) -> QuantumState:
    """Uniform force resonant with the mode: displacement by alpha = Omega1*t.

    Exponentiates alpha a+ - alpha* a on the truncation, identically for
    both spin components. Strict by default: pushing the coherent tail
    into the guard band raises TruncationError rather than warning.
    """
    if not isinstance(state, QuantumState):
        raise ModelInputError("displacement_drive acts on a QuantumState")
    if t < 0:
        raise RangeError("duration must be >= 0")
    alpha = complex(Omega1) * t
    N = state.n_max + 1
    a = np.diag(np.sqrt(np.arange(1, N)), 1).astype(complex)
    G = alpha * a.conj().T - np.conj(alpha) * a
    D = expm(G)
    U = np.zeros((2 * N, 2 * N), dtype=complex)
    U[:N, :N] = D
    U[N:, N:] = D
    return apply_unitary(state, U, eps_trunc=eps_trunc, strict=strict)


# ---------------------------------------------------------------------------
# error-injected sequences


def noisy_sequence_fidelity(
    seq,
    error_model: dict,
    trials: int,
    base_seed: int = 0,
    initial: QuantumState | None = None,
    n_max: int = 8,
) -> dict:
    """Monte Carlo fidelity of a pulse sequence under area and phase errors.

    error_model keys: zeta_rms and phi_rms (standard deviations of the
    per-pulse area and phase errors), systematic (bool; when set every
    pulse gets exactly zeta_rms and phi_rms instead of fresh draws, so all
    trials coincide). Per-pulse injections already present in the specs
    are kept and the drawn errors add to them. Trial k uses the
    deterministic stream base_seed + k.

    Returns F_mean, F_std and a quadratic_fit dict whose coefficient is
    (1 - F_mean) divided by M*zeta_rms^2 (random model) or by the squared
    total systematic area error (systematic model).
    """
    seq = list(seq)
    if not seq:
        raise ModelInputError("empty pulse sequence")
    if not isinstance(trials, int) or trials < 1:
        raise RangeError("trials must be a positive integer")
    known = {"zeta_rms", "phi_rms", "systematic"}
    unknown = set(error_model) - known
    if unknown:
        raise ModelInputError(f"unknown error_model keys: {sorted(unknown)}")
    zeta_rms = float(error_model.get("zeta_rms", 0.0))
    phi_rms = float(error_model.get("phi_rms", 0.0))
    systematic = bool(error_model.get("systematic", False))
    if zeta_rms < 0 or phi_rms < 0:
        raise RangeError("error magnitudes must be >= 0")

    psi0 = initial if initial is not None else make_state("fock", n_max=n_max)

    def run(pulses):
        psi = psi0
        for p in pulses:
            psi = apply_pulse(psi, p)
        return psi

    psi_ideal = run([replace(p, zeta=0.0, phi_err=0.0) for p in seq])

    M = len(seq)
    fids = np.empty(trials)
    for k in range(trials):
        rng = np.random.default_rng(base_seed + k)
        if systematic:
            dz = np.full(M, zeta_rms)
            df = np.full(M, phi_rms)
        else:
            dz = rng.normal(0.0, zeta_rms, M) if zeta_rms > 0 else np.zeros(M)
            df = rng.normal(0.0, phi_rms, M) if phi_rms > 0 else np.zeros(M)
        noisy = [
            replace(p, zeta=p.zeta + dz[i], phi_err=p.phi_err + df[i])
            for i, p in enumerate(seq)
        ]
        fids[k] = abs(overlap(psi_ideal, run(noisy))) ** 2

    F_mean = float(np.mean(fids))
    F_std = float(np.std(fids, ddof=1)) if trials > 1 else 0.0
    if systematic or zeta_rms == 0.0:
        S = sum(p.zeta for p in seq) + (M * zeta_rms if systematic else 0.0)
        denom = S * S
        against = "(sum_zeta)^2"
    else:
        denom = M * zeta_rms**2
        against = "M*zeta_rms^2"
    coeff = (1.0 - F_mean) / denom if denom > 0 else math.nan
    return {
        "F_mean": F_mean,
        "F_std": F_std,
        "quadratic_fit": {"coefficient": coeff, "against": against},
    }
