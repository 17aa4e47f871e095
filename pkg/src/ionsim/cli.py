"""Configuration-driven experiment runner.

``ionsim run <config>`` loads a JSON experiment file (or the name of a
bundled scenario), dispatches to the library, and writes a CSV table, an
optional SVG plot per ``plot`` block, and a manifest recording inputs,
versions, and pass/fail against the file's declared expectations.
``ionsim list`` enumerates the bundled scenarios.

Exit codes: 0 success, 2 configuration error (the message names the
offending key), 3 physics-model error raised by the library. A failed
expectation is recorded in the manifest but is not an error; pass
--strict to escalate model warnings (truncation, regime stretch) to
exit 3.

Unit conventions in config files: keys holding oscillation or drive
frequencies (omega_*, Omega*, drive_frequency, slow_rms, gamma_rad) are
cyclic Hz and are multiplied by 2*pi on the way in; keys holding decay
or relaxation rates (gamma, gamma0) are direct 1/s. Seeds make every
run reproducible: the same config and seed produce byte-identical CSV.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import warnings
from dataclasses import dataclass, field as dc_field
from importlib import resources

import numpy as np

from . import __version__
from ._config import ExperimentConfig, Field, load_config, parse_config_text, validate_block
from ._svg import line_plot
from .cooling import CoolingConfig, cooling_limit, sideband_cool
from .coupling import CouplingParams, ModeEnsemble, debye_waller_stats, magic_eta, rabi_frequency
from .decoherence import (
    BathParams,
    RabiSignal,
    coherence_tomography,
    fast_amplitude_noise_visibility,
    invert_populations,
    master_equation_evolve,
    mean_n_evolution,
    rabi_decay_signal,
    slow_amplitude_noise_envelope,
    spectator_leakage,
)
from .errors import ConfigError, IonsimError
from .pulse_engine import (
    PulseSpec,
    cn_gate_single_pulse,
    cn_gate_three_pulse,
    noisy_sequence_fidelity,
    prepare_max_entangled,
)
from .quantum_core import DensityMatrix, QuantumState, make_state
from .spectroscopy import ClockParams, clock_lock_analysis
from .trap_model import (
    TrapParams,
    axial_normal_modes,
    chain_equilibrium,
    collision_rates,
    critical_anisotropy,
    heating_time_estimate,
    mathieu_trajectory,
    secular_frequencies,
)

TWO_PI = 2.0 * math.pi


@dataclass
class RunResult:
    """One experiment's table, scalar metrics, and extra metadata lines."""

    columns: list                 # (name, unit) pairs
    rows: list
    metrics: dict
    meta: dict = dc_field(default_factory=dict)


def _require(params: dict, keys, op: str) -> None:
    for k in keys:
        if params.get(k) is None:
            raise ConfigError(f"params.{k}: required for op '{op}'")


def _diag_density(init: dict, path: str = "params.initial") -> DensityMatrix:
    n_max = init["n_max"]
    if n_max < 1:
        raise ConfigError(f"{path}.n_max: must be >= 1")
    if init["type"] == "thermal":
        if init["nbar"] is None:
            raise ConfigError(f"{path}.nbar: required for a thermal state")
        return make_state("thermal", n_max=n_max, nbar=init["nbar"])
    n = init["n"]
    if not 0 <= n <= n_max:
        raise ConfigError(f"{path}.n: must be within 0..n_max")
    r = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    r[n, n] = 1.0
    return DensityMatrix(r, n_max)


# ---------------------------------------------------------------------------
# per-kind schemas and handlers


_TAU_SCHEMA = {
    "stop": Field("quantity", unit="s", required=True),
    "points": Field("int", default=600),
}


def _tau_grid(block: dict, path: str) -> np.ndarray:
    if block["points"] < 2:
        raise ConfigError(f"{path}.points: must be >= 2")
    if block["stop"] <= 0:
        raise ConfigError(f"{path}.stop: must be > 0")
    return np.linspace(0.0, block["stop"], block["points"])


_TRAP_SCHEMA = {
    "V0": Field("quantity", unit="V", required=True),
    "U0": Field("quantity", unit="V", required=True),
    "Ur": Field("quantity", unit="V", default=0.0),
    "drive_frequency": Field("quantity", unit="Hz", angular=True, required=True),
    "R": Field("quantity", unit="m", required=True),
    "kappa": Field("number", required=True),        # endcap geometry, 1/m^2
    "charge": Field("quantity", unit="C", required=True),
    "mass": Field("quantity", unit="kg", required=True),
    "geometry_factor": Field("number", default=1.0),
    "trajectory": Field("block", schema={
        "amplitude": Field("quantity", unit="m", required=True),
        "phase": Field("number", default=0.0),
        "t_end": Field("quantity", unit="s", required=True),
        "points": Field("int", default=400),
    }),
    "chain": Field("block", schema={
        "L": Field("int", required=True),
        "s_c": Field("quantity", unit="m", required=True),
    }),
}


def _run_trap(p: dict, seed: int) -> RunResult:
    tp = TrapParams(
        V0=p["V0"], Ur=p["Ur"], U0=p["U0"], OmegaT=p["drive_frequency"],
        R=p["R"], kappa=p["kappa"], charge=p["charge"], mass=p["mass"],
        geometry_factor=p["geometry_factor"],
    )
    mc = secular_frequencies(tp)
    metrics = {
        "a_x": mc.a_x, "q_x": mc.q_x,
        "beta_x": mc.beta_x, "beta_y": mc.beta_y,
        "omega_x_Hz": mc.omega_x / TWO_PI,
        "omega_y_Hz": mc.omega_y / TWO_PI,
        "omega_z_Hz": mc.omega_z / TWO_PI,
    }
    if p["chain"] is not None:
        ch = p["chain"]
        if ch["L"] < 2:
            raise ConfigError("params.chain.L: must be >= 2")
        ca = critical_anisotropy(ch["L"], s_c=ch["s_c"],
                                 charge=p["charge"], mass=p["mass"])
        metrics["critical_ratio"] = ca.ratio_exact
        metrics["omega_r_bound_Hz"] = ca.omega_r_bound / TWO_PI
    if p["trajectory"] is not None:
        tj = p["trajectory"]
        if tj["points"] < 2:
            raise ConfigError("params.trajectory.points: must be >= 2")
        t = np.linspace(0.0, tj["t_end"], tj["points"])
        traj = mathieu_trajectory(tp, tj["amplitude"], tj["phase"], t)
        cols = [("t", "s"), ("x", "m"), ("y", "m")]
        rows = [
            (float(ti), float(xi), float(yi))
            for ti, xi, yi in zip(t, traj["x"], traj["y"])
        ]
    else:
        cols = [("quantity", ""), ("value", ""), ("unit", "")]
        rows = [(k, v, "Hz" if k.endswith("_Hz") else "")
                for k, v in metrics.items()]
    return RunResult(cols, rows, metrics)


_MODES_SCHEMA = {
    "L_values": Field("int_list", required=True),
    "omega_z": Field("quantity", unit="Hz", angular=True, required=True),
    "charge": Field("quantity", unit="C", required=True),
    "mass": Field("quantity", unit="kg", required=True),
}


def _run_modes(p: dict, seed: int) -> RunResult:
    cols = [("L", ""), ("mode", ""), ("ratio_to_axial", ""), ("frequency", "Hz")]
    rows, metrics = [], {}
    for L in p["L_values"]:
        if L < 1:
            raise ConfigError("params.L_values: entries must be >= 1")
        g = chain_equilibrium(L, p["omega_z"], p["charge"], p["mass"])
        am = axial_normal_modes(g, p["omega_z"])
        for k, w in enumerate(am.frequencies, start=1):
            ratio = float(w / p["omega_z"])
            rows.append((L, k, ratio, float(w / TWO_PI)))
            metrics[f"L{L}.ratio{k}"] = ratio
        metrics[f"L{L}.scale_s_m"] = g.scale_s
        if L >= 2:
            gaps = np.diff(g.positions)
            metrics[f"L{L}.min_gap_m"] = float(gaps.min())
            metrics[f"L{L}.central_gap_over_s"] = float(
                gaps[(L - 1) // 2] / g.scale_s
            )
            metrics[f"L{L}.min_gap_over_fit"] = float(gaps.min() / g.s_min)
    return RunResult(cols, rows, metrics)


_RABI_SCHEMA = {
    "op": Field("str", required=True, choices=("ladder", "decay")),
    "Omega": Field("quantity", unit="Hz", angular=True, required=True),
    "eta": Field("number", required=True),
    "n_top": Field("int", default=10),
    "populations": Field("number_list"),
    "gamma0": Field("quantity", unit="Hz"),         # base decay rate, 1/s
    "tau": Field("block", schema=_TAU_SCHEMA),
}


def _run_rabi(p: dict, seed: int) -> RunResult:
    c = CouplingParams(Omega=p["Omega"], eta=p["eta"])
    if p["op"] == "ladder":
        if p["n_top"] < 0:
            raise ConfigError("params.n_top: must be >= 0")
        cols = [("n", ""), ("carrier", "Hz"), ("red_sideband", "Hz"),
                ("blue_sideband", "Hz")]
        rows = []
        for n in range(p["n_top"] + 1):
            carrier = abs(rabi_frequency(n, n, c)) / TWO_PI
            red = abs(rabi_frequency(n - 1, n, c)) / TWO_PI if n > 0 else 0.0
            blue = abs(rabi_frequency(n + 1, n, c)) / TWO_PI
            rows.append((n, float(carrier), float(red), float(blue)))
        metrics = {
            "carrier0_Hz": rows[0][1],
            "blue0_Hz": rows[0][3],
            "blue0_over_carrier0": rows[0][3] / rows[0][1],
        }
        return RunResult(cols, rows, metrics)
    _require(p, ("populations", "gamma0", "tau"), "decay")
    tau = _tau_grid(p["tau"], "params.tau")
    sig = rabi_decay_signal(p["populations"], p["gamma0"], c, tau)
    cols = [("tau", "s"), ("P_down", "")]
    rows = [(float(t), float(v)) for t, v in zip(sig.tau_grid, sig.P_down)]
    metrics = {
        "P_down_t0": rows[0][1],
        "P_down_final": rows[-1][1],
        "P_down_min": float(np.min(sig.P_down)),
    }
    return RunResult(cols, rows, metrics)


_GATE_SCHEMA = {
    "op": Field("str", required=True,
                choices=("cn_single", "cn_three_pulse", "entangle",
                         "noisy_sequence")),
    "k": Field("int", default=0),
    "m": Field("int", default=1),
    "eta": Field("number"),              # default: solved magic value
    "phi": Field("number", default=0.0),
    "aux_eta": Field("number", default=0.2),
    "phi_a": Field("number", default=0.0),
    "L": Field("int", default=2),
    "n_bus": Field("int", default=1),
    "M_values": Field("int_list", default=(2, 4, 8, 16)),
    "theta": Field("number", default=math.pi / 2),
    "zeta_rms": Field("number", default=0.01),
    "phi_rms": Field("number", default=0.0),
    "systematic": Field("bool", default=False),
    "trials": Field("int", default=200),
}


def _unitary_rows(report):
    rows = []
    d = report.unitary.shape[0]
    for i in range(d):
        for j in range(d):
            z = report.unitary[i, j]
            rows.append((i, j, float(z.real), float(z.imag)))
    return rows


def _run_gate(p: dict, seed: int) -> RunResult:
    op = p["op"]
    if op in ("cn_single", "cn_three_pulse"):
        if op == "cn_single":
            eta = p["eta"]
            if eta is None:
                eta = magic_eta(1, p["k"], p["m"])[0]
            report = cn_gate_single_pulse(p["k"], p["m"], eta, phi=p["phi"])
            extra = {"eta_used": float(eta)}
        else:
            report = cn_gate_three_pulse(
                CouplingParams(Omega=1.0, eta=p["aux_eta"]), phi_a=p["phi_a"]
            )
            extra = {}
        cols = [("row", ""), ("col", ""), ("re", ""), ("im", "")]
        meta = {"basis": " ".join(report.basis)}
        for k, v in report.truth_table.items():
            meta[f"truth {k}"] = v
        metrics = {"fidelity_vs_ideal": report.fidelity_vs_ideal, **extra}
        return RunResult(cols, _unitary_rows(report), metrics, meta)
    if op == "entangle":
        if p["L"] < 2:
            raise ConfigError("params.L: must be >= 2 for op 'entangle'")
        reg = prepare_max_entangled(p["L"], n_bus=p["n_bus"])
        ideal = np.zeros_like(reg.amps)
        ideal[0, 0] = ideal[-1, 0] = 1.0 / math.sqrt(2.0)
        cols = [("spins", ""), ("bus_n", ""), ("re", ""), ("im", "")]
        rows = []
        for i in range(reg.amps.shape[0]):
            for nb in range(reg.amps.shape[1]):
                z = reg.amps[i, nb]
                rows.append((format(i, f"0{p['L']}b"), nb,
                             float(z.real), float(z.imag)))
        metrics = {
            "overlap_ideal": float(abs(np.vdot(ideal, reg.amps)) ** 2),
            "bus_excited_weight": reg.bus_excited_weight(),
            "purity_ion0": reg.reduced_spin_purity(0),
        }
        return RunResult(cols, rows, metrics)
    # noisy_sequence
    base = PulseSpec("carrier", p["theta"], CouplingParams(Omega=1.0, eta=0.0))
    model = {"zeta_rms": p["zeta_rms"], "phi_rms": p["phi_rms"],
             "systematic": p["systematic"]}
    cols = [("M", ""), ("F_mean", ""), ("F_std", ""), ("infidelity", ""),
            ("quad_coeff", "")]
    rows = []
    for M in p["M_values"]:
        if M < 1:
            raise ConfigError("params.M_values: entries must be >= 1")
        res = noisy_sequence_fidelity([base] * M, model, trials=p["trials"],
                                      base_seed=seed)
        rows.append((M, res["F_mean"], res["F_std"], 1.0 - res["F_mean"],
                     res["quadratic_fit"]["coefficient"]))
    metrics = {"infidelity_at_max_M": rows[-1][3],
               "quad_coeff_at_max_M": rows[-1][4]}
    logM = [math.log(r[0]) for r in rows if r[3] > 0]
    logI = [math.log(r[3]) for r in rows if r[3] > 0]
    if len(logM) >= 2:
        slope = np.polyfit(logM, logI, 1)[0]
        metrics["infidelity_slope_vs_M"] = float(slope)
    return RunResult(cols, rows, metrics)


_INITIAL_SCHEMA = {
    "type": Field("str", required=True, choices=("thermal", "fock")),
    "nbar": Field("number"),
    "n": Field("int", default=0),
    "n_max": Field("int", required=True),
}

_COOL_SCHEMA = {
    "eta": Field("number", required=True),
    "omega_z": Field("quantity", unit="Hz", angular=True, required=True),
    "omega_R": Field("quantity", unit="Hz", angular=True, required=True),
    "gamma_rad": Field("quantity", unit="Hz", angular=True, required=True),
    "strategy": Field("str", default="randomized",
                      choices=("fixed", "randomized", "schedule")),
    "cycles": Field("int", default=50),
    "pulse_area": Field("number"),
    "schedule": Field("number_list"),
    "scatters_per_cycle": Field("int", default=2),
    "initial": Field("block", required=True, schema=_INITIAL_SCHEMA),
}


def _run_cool(p: dict, seed: int) -> RunResult:
    dm = _diag_density(p["initial"])
    cfg = CoolingConfig(
        eta=p["eta"], omega_z=p["omega_z"], omega_R=p["omega_R"],
        gamma_rad=p["gamma_rad"], pulse_strategy=p["strategy"],
        cycles=p["cycles"], pulse_area=p["pulse_area"],
        schedule=tuple(p["schedule"] or ()),
        scatters_per_cycle=p["scatters_per_cycle"],
    )
    res = sideband_cool(dm, cfg, seed=seed)
    cols = [("cycle", ""), ("mean_n", ""), ("P0", "")]
    rows = [(k, float(m), float(q))
            for k, (m, q) in enumerate(zip(res.mean_n, res.p0))]
    metrics = {
        "final_mean_n": rows[-1][1],
        "final_P0": rows[-1][2],
        "limit_nbar": cooling_limit(cfg.gamma_rad, cfg.omega_z),
        "recoil_ratio": cfg.recoil_ratio,
    }
    return RunResult(cols, rows, metrics)


_HEAT_SCHEMA = {
    "op": Field("str", required=True, choices=("master_equation", "estimators")),
    # master_equation
    "gamma": Field("quantity", unit="Hz"),          # relaxation rate, 1/s
    "nbar": Field("number"),
    "initial": Field("block", schema=_INITIAL_SCHEMA),
    "t_end": Field("quantity", unit="s"),
    "points": Field("int", default=60),
    "dt": Field("quantity", unit="s"),
    # estimators (shared ion properties)
    "mass": Field("quantity", unit="kg"),
    "charge": Field("quantity", unit="C"),
    "resistive": Field("block", schema={
        "r": Field("quantity", unit="Ohm", required=True),
        "T": Field("quantity", unit="K", required=True),
        "omega_z": Field("quantity", unit="Hz", angular=True, required=True),
        "ell_L": Field("number"),                   # equivalent inductance, H
        "d": Field("quantity", unit="m"),
        "alpha": Field("number", default=0.8),
    }),
    "stray_field": Field("block", schema={
        "omega_z": Field("quantity", unit="Hz", angular=True, required=True),
        "S_U": Field("number", required=True),      # voltage noise, V^2 s
        "U0": Field("quantity", unit="V", required=True),
        "E_s": Field("number", required=True),      # static field, V/m
    }),
    "patch": Field("block", schema={
        "theta": Field("number", required=True),
        "D": Field("number", required=True),
        "kappa_patch": Field("number", required=True),
        "r_a": Field("quantity", unit="m", required=True),
        "a_p": Field("quantity", unit="m", required=True),
        "omega_z": Field("quantity", unit="Hz", angular=True, required=True),
        "ell_L": Field("number", required=True),
    }),
    "collisions": Field("block", schema={
        "polarizability": Field("number", required=True),   # volume, m^3
        "gas_mass": Field("quantity", unit="kg", required=True),
        "pressure": Field("quantity", unit="Pa", required=True),
        "T": Field("quantity", unit="K", required=True),
    }),
}


def _run_heat(p: dict, seed: int) -> RunResult:
    if p["op"] == "master_equation":
        _require(p, ("gamma", "nbar", "initial", "t_end"), "master_equation")
        if p["points"] < 2:
            raise ConfigError("params.points: must be >= 2")
        rho = _diag_density(p["initial"])
        n_max = rho.n_max
        b = BathParams(gamma=p["gamma"], nbar=p["nbar"])
        bound = 0.01 / (b.gamma * (b.nbar + 1.0) * (n_max + 1))
        dt = p["dt"] if p["dt"] is not None else 0.9 * bound
        grid = np.linspace(0.0, p["t_end"], p["points"])
        levels = np.arange(n_max + 1)
        cols = [("t", "s"), ("mean_n", ""), ("P0", ""), ("P1", ""), ("P2", "")]
        rows = []
        n0 = float(np.real(np.diag(rho.rho)) @ levels)

        def record(t, r):
            d = np.real(np.diag(r.rho))
            rows.append((float(t), float(d @ levels), float(d[0]),
                         float(d[1]) if n_max >= 1 else 0.0,
                         float(d[2]) if n_max >= 2 else 0.0))

        record(0.0, rho)
        for t_prev, t_next in zip(grid[:-1], grid[1:]):
            rho = master_equation_evolve(rho, b, float(t_next - t_prev), dt)
            record(t_next, rho)
        nb = b.nbar
        p_th = (1.0 / (1.0 + nb)) * (nb / (1.0 + nb)) ** levels
        diag = np.real(np.diag(rho.rho))
        closed = mean_n_evolution(n0, b, float(grid[-1]))
        metrics = {
            "final_mean_n": rows[-1][1],
            "final_tv_vs_thermal": float(0.5 * np.sum(np.abs(diag - p_th))),
            "mean_n_closed_abs_err": abs(rows[-1][1] - closed),
            "trace_defect": abs(rho.trace() - 1.0),
        }
        return RunResult(cols, rows, metrics)
    # estimators
    cols = [("estimate", ""), ("value", ""), ("unit", "")]
    rows, metrics = [], {}
    if p["resistive"] is not None:
        rr = p["resistive"]
        kw = {"r": rr["r"], "T": rr["T"], "omega_z": rr["omega_z"]}
        if rr["ell_L"] is not None:
            kw["ell_L"] = rr["ell_L"]
        elif rr["d"] is not None:
            _require(p, ("mass", "charge"), "estimators (resistive geometry)")
            kw.update(mass=p["mass"], d=rr["d"], charge=p["charge"],
                      alpha=rr["alpha"])
        else:
            raise ConfigError("params.resistive: needs ell_L or d")
        est = heating_time_estimate("resistive", **kw)
        rows.append(("resistive_t_star", est.t_star, "s"))
        metrics["resistive_t_star_s"] = est.t_star
    if p["stray_field"] is not None:
        sf = p["stray_field"]
        _require(p, ("mass", "charge"), "estimators (stray_field)")
        est = heating_time_estimate(
            "stray_field", mass=p["mass"], charge=p["charge"],
            omega_z=sf["omega_z"], S_U=sf["S_U"], U0=sf["U0"], E_s=sf["E_s"],
        )
        rows.append(("stray_field_t_star", est.t_star, "s"))
        metrics["stray_field_t_star_s"] = est.t_star
    if p["patch"] is not None:
        pa = p["patch"]
        est = heating_time_estimate(
            "patch", theta=pa["theta"], D=pa["D"],
            kappa_patch=pa["kappa_patch"], r_a=pa["r_a"], a_p=pa["a_p"],
            omega_z=pa["omega_z"], ell_L=pa["ell_L"],
        )
        rows.append(("patch_t_star", est.t_star, "s"))
        metrics["patch_t_star_s"] = est.t_star
    if p["collisions"] is not None:
        co = p["collisions"]
        _require(p, ("mass", "charge"), "estimators (collisions)")
        gas = {"polarizability": co["polarizability"], "mass": co["gas_mass"]}
        cr = collision_rates(gas, co["pressure"], co["T"], p["mass"],
                             charge=p["charge"])
        rows.extend([
            ("k_langevin", cr.k_langevin, "m^3/s"),
            ("gamma_langevin", cr.gamma_langevin, "1/s"),
            ("k_elastic", cr.k_elastic, "m^3/s"),
            ("gamma_elastic", cr.gamma_elastic, "1/s"),
            ("v_thermal", cr.v_thermal, "m/s"),
        ])
        metrics.update(
            k_langevin_m3_per_s=cr.k_langevin,
            gamma_langevin_per_s=cr.gamma_langevin,
            k_elastic_m3_per_s=cr.k_elastic,
            gamma_elastic_per_s=cr.gamma_elastic,
            v_thermal_m_per_s=cr.v_thermal,
        )
    if not rows:
        raise ConfigError(
            "params: estimators op needs at least one of "
            "resistive/stray_field/patch/collisions"
        )
    return RunResult(cols, rows, metrics)


_NOISE_SCHEMA = {
    "op": Field("str", required=True,
                choices=("debye_waller", "envelopes", "spectator")),
    # debye_waller
    "mode_count": Field("int"),
    "eta": Field("number"),
    "nbar": Field("number"),
    "epsilon": Field("number"),
    "epsilon_values": Field("number_list"),
    # envelopes
    "Omega": Field("quantity", unit="Hz", angular=True),
    "slow_rms": Field("quantity", unit="Hz", angular=True),
    "fast_ratio": Field("number"),
    "omega_amp": Field("quantity", unit="Hz", angular=True),
    "tau": Field("block", schema=_TAU_SCHEMA),
    # spectator
    "Omega_prime": Field("quantity", unit="Hz", angular=True),
    "Delta": Field("quantity", unit="Hz", angular=True),
    "duration": Field("quantity", unit="s"),
    "smooth_duration": Field("quantity", unit="s"),   # default: same as duration
    "ramp_width": Field("quantity", unit="s"),
}


def _run_noise(p: dict, seed: int) -> RunResult:
    op = p["op"]
    if op == "debye_waller":
        _require(p, ("mode_count", "eta", "nbar", "epsilon"), "debye_waller")
        if p["mode_count"] < 1:
            raise ConfigError("params.mode_count: must be >= 1")
        ens = ModeEnsemble(etas=[p["eta"]] * p["mode_count"],
                           nbars=[p["nbar"]] * p["mode_count"])
        st = debye_waller_stats(ens)
        eps_list = p["epsilon_values"] or [
            p["epsilon"] * f for f in (0.25, 0.5, 1.0, 2.0, 4.0)
        ]
        cols = [("epsilon", ""), ("prob_within", "")]
        rows = [(float(e), float(st.prob_within(e))) for e in eps_list]
        metrics = {
            "mean_factor": st.mean_factor,
            "rms_exact": st.rms_exact,
            "rms_small_eta": st.rms_small_eta,
            "prob_within": float(st.prob_within(p["epsilon"])),
        }
        return RunResult(cols, rows, metrics)
    if op == "envelopes":
        _require(p, ("Omega", "slow_rms", "fast_ratio", "omega_amp", "tau"),
                 "envelopes")
        tau = _tau_grid(p["tau"], "params.tau")
        gauss = slow_amplitude_noise_envelope("gaussian", p["slow_rms"], tau,
                                              p["Omega"])
        lap = slow_amplitude_noise_envelope("laplacian", p["slow_rms"], tau,
                                            p["Omega"])
        fast = fast_amplitude_noise_visibility(
            p["fast_ratio"] * p["omega_amp"], p["omega_amp"], tau, p["Omega"]
        )
        cols = [("tau", "s"), ("slow_gaussian", ""), ("slow_laplacian", ""),
                ("fast_closed", ""), ("fast_exact", "")]
        rows = [
            (float(t), float(a), float(b), float(c), float(d))
            for t, a, b, c, d in zip(tau, gauss, lap, fast["closed_form"],
                                     fast["phi_average"])
        ]
        metrics = {
            "gauss_half_contrast_s": math.sqrt(math.log(2.0) / 2.0) / p["slow_rms"],
            "laplace_half_contrast_s": 1.0 / (math.sqrt(2.0) * p["slow_rms"]),
            "fast_max_closed_err": float(
                np.max(np.abs(fast["closed_form"] - fast["phi_average"]))
            ),
        }
        return RunResult(cols, rows, metrics)
    # spectator
    _require(p, ("Omega", "Omega_prime", "Delta", "duration"), "spectator")
    smooth_T = (p["smooth_duration"] if p["smooth_duration"] is not None
                else p["duration"])
    tau_r = p["ramp_width"] if p["ramp_width"] is not None else smooth_T / 4.0
    sq = spectator_leakage(p["Omega"], p["Omega_prime"], p["Delta"],
                           envelope="square", duration=p["duration"])
    sm = spectator_leakage(p["Omega"], p["Omega_prime"], p["Delta"],
                           envelope="smooth", duration=smooth_T,
                           tau_r=tau_r)
    cols = [("envelope", ""), ("C_s_final", ""), ("adiabatic_estimate", ""),
            ("norm_defect", "")]
    rows = [
        ("square", sq["C_s_final"], sq["adiabatic_estimate"], sq["norm_defect"]),
        ("smooth", sm["C_s_final"], sm["adiabatic_estimate"], sm["norm_defect"]),
    ]
    metrics = {
        "square_C_s": sq["C_s_final"],
        "smooth_C_s": sm["C_s_final"],
        "suppression_ratio": (sq["C_s_final"] / sm["C_s_final"]
                              if sm["C_s_final"] > 0 else math.inf),
        "drive_ratio": p["Omega_prime"] / p["Delta"],
    }
    return RunResult(cols, rows, metrics)


_CLOCK_SCHEMA = {
    "L_values": Field("int_list", required=True),
    "n_values": Field("number_list", required=True),
    "epsilon_values": Field("number_list", default=(0.5, 1.0)),
    "C": Field("number", required=True),
    "K2": Field("number", default=2.0),
    "K3": Field("number", default=10.0),
    "tau": Field("quantity", unit="s", required=True),
    "mode": Field("str", default="constrained_K3",
                  choices=("constrained_K3", "constrained_K1")),
}


def _run_clock(p: dict, seed: int) -> RunResult:
    cols = [("L", ""), ("n_exp", ""), ("epsilon", ""), ("T_R", "s"),
            ("delta_omega", "rad/s"), ("margin", "")]
    rows, metrics = [], {}
    dw = {}
    for L in p["L_values"]:
        for n in p["n_values"]:
            for eps in p["epsilon_values"]:
                cp = ClockParams(L=L, tau=p["tau"], C=p["C"], n_exp=n,
                                 K2=p["K2"], K3=p["K3"], epsilon=eps)
                out = clock_lock_analysis(cp, mode=p["mode"])
                margin = out.get("K1", out.get("K3"))
                rows.append((L, float(n), float(eps), out["T_R"],
                             out["delta_omega"], float(margin)))
                dw[(L, n, eps)] = out["delta_omega"]
    for L in p["L_values"]:
        for n in p["n_values"]:
            a, b = dw.get((L, n, 0.5)), dw.get((L, n, 1.0))
            if a is not None and b is not None:
                metrics[f"gain.L{L}.n{n:g}"] = a / b
    return RunResult(cols, rows, metrics)


_TOMO_SCHEMA = {
    "op": Field("str", required=True, choices=("populations", "coherence")),
    "populations": Field("number_list"),
    "Omega": Field("quantity", unit="Hz", angular=True),
    "eta": Field("number"),
    "gamma0": Field("quantity", unit="Hz"),         # base decay rate, 1/s
    "tau": Field("block", schema=_TAU_SCHEMA),
    "n_cut": Field("int"),
    "noise_sigma": Field("number", default=0.0),
    "state": Field("str", choices=("plus", "fock0", "plus_i")),
}

_TOMO_STATES = {
    "plus": (1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0)),
    "fock0": (1.0, 0.0),
    "plus_i": (1.0 / math.sqrt(2.0), 1j / math.sqrt(2.0)),
}


def _run_tomography(p: dict, seed: int) -> RunResult:
    if p["op"] == "populations":
        _require(p, ("populations", "Omega", "eta", "gamma0", "tau", "n_cut"),
                 "populations")
        c = CouplingParams(Omega=p["Omega"], eta=p["eta"])
        tau = _tau_grid(p["tau"], "params.tau")
        sig = rabi_decay_signal(p["populations"], p["gamma0"], c, tau)
        if p["noise_sigma"] > 0:
            rng = np.random.default_rng(seed)
            noisy = np.clip(
                sig.P_down + rng.normal(0.0, p["noise_sigma"], tau.size),
                0.0, 1.0,
            )
            sig = RabiSignal(tau, noisy)
        est = invert_populations(sig, c, p["n_cut"], gamma_model=p["gamma0"])
        truth = np.zeros(p["n_cut"] + 1)
        src = np.asarray(p["populations"], dtype=float)
        take = min(src.size, truth.size)
        truth[:take] = src[:take]
        cols = [("n", ""), ("P_true", ""), ("P_recovered", ""), ("abs_err", "")]
        rows = [
            (n, float(truth[n]), float(est["P"][n]),
             float(abs(est["P"][n] - truth[n])))
            for n in range(p["n_cut"] + 1)
        ]
        metrics = {
            "max_abs_error": float(np.max(np.abs(est["P"] - truth))),
            "residual": float(est["residual"]),
            "sum_P_recovered": float(np.sum(est["P"])),
        }
        return RunResult(cols, rows, metrics)
    # coherence
    _require(p, ("state", "Omega", "eta"), "coherence")
    c = CouplingParams(Omega=p["Omega"], eta=p["eta"])
    c0, c1 = _TOMO_STATES[p["state"]]
    n_max = 4
    amps = np.zeros(2 * (n_max + 1), dtype=complex)
    amps[0], amps[1] = c0, c1
    out = coherence_tomography(QuantumState(amps, n_max), c)
    cols = [("analysis_phase", "rad"), ("P_down", "")]
    rows = [(float(ph), float(pd)) for ph, pd in sorted(out["P_down"].items())]
    metrics = {"re_rho01": out["re"], "im_rho01": out["im"]}
    return RunResult(cols, rows, metrics)


_HANDLERS = {
    "trap": (_TRAP_SCHEMA, _run_trap),
    "modes": (_MODES_SCHEMA, _run_modes),
    "rabi": (_RABI_SCHEMA, _run_rabi),
    "gate": (_GATE_SCHEMA, _run_gate),
    "cool": (_COOL_SCHEMA, _run_cool),
    "heat": (_HEAT_SCHEMA, _run_heat),
    "noise": (_NOISE_SCHEMA, _run_noise),
    "clock": (_CLOCK_SCHEMA, _run_clock),
    "tomography": (_TOMO_SCHEMA, _run_tomography),
}


# ---------------------------------------------------------------------------
# output rendering


def _cell(v) -> str:
    if isinstance(v, bool):
        return str(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def render_csv(name: str, cfg: ExperimentConfig, seed: int,
               result: RunResult) -> str:
    lines = [
        f"# ionsim {__version__}",
        f"# scenario: {name}",
        f"# kind: {cfg.kind}",
        f"# seed: {seed}",
    ]
    if cfg.description:
        lines.append(f"# description: {cfg.description}")
    for k, v in result.meta.items():
        lines.append(f"# {k}: {v}")
    for k, v in result.metrics.items():
        lines.append(f"# metric {k} = {_cell(v)}")
    lines.append(",".join(
        f"{n} [{u}]" if u else n for n, u in result.columns
    ))
    for row in result.rows:
        lines.append(",".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def evaluate_expectations(expect: list, metrics: dict) -> list[dict]:
    out = []
    for e in expect:
        name = e["metric"]
        if name not in metrics:
            out.append({"metric": name, "status": "FAIL",
                        "detail": "metric not produced by this run"})
            continue
        v = float(metrics[name])
        if "value" in e:
            target = e["value"]
            rtol = e.get("rtol", 0.0)
            atol = e.get("atol", 0.0)
            if rtol == 0.0 and atol == 0.0:
                rtol = 1e-9
            ok = abs(v - target) <= atol + rtol * abs(target)
            detail = (f"value {v!r} vs {target!r} "
                      f"(rtol={rtol:g}, atol={atol:g})")
        elif "min" in e:
            ok = v >= e["min"]
            detail = f"value {v!r} >= {e['min']!r}"
        else:
            ok = v <= e["max"]
            detail = f"value {v!r} <= {e['max']!r}"
        out.append({"metric": name, "status": "PASS" if ok else "FAIL",
                    "detail": detail})
    return out


def render_manifest(name: str, origin: str, sha: str,
                    cfg: ExperimentConfig, seed: int, strict: bool,
                    outputs: list[str], checks: list[dict],
                    metrics: dict) -> str:
    failed = sum(1 for c in checks if c["status"] == "FAIL")
    lines = [
        "ionsim run manifest",
        f"version: ionsim {__version__}",
        f"python: {sys.version.split()[0]}",
        f"numpy: {np.__version__}",
        f"scipy: {__import__('scipy').__version__}",
        f"config: {origin}",
        f"config_sha256: {sha}",
        f"scenario: {name}",
        f"kind: {cfg.kind}",
        f"seed: {seed}",
        f"strict: {strict}",
        "outputs:",
    ]
    lines.extend(f"  {o}" for o in outputs)
    lines.append("metrics:")
    lines.extend(f"  {k} = {_cell(v)}" for k, v in metrics.items())
    lines.append("expectations:")
    if checks:
        lines.extend(f"  {c['status']} {c['metric']}: {c['detail']}"
                     for c in checks)
        lines.append(
            f"result: {'PASS' if failed == 0 else 'FAIL'} "
            f"({len(checks) - failed}/{len(checks)} expectations)"
        )
    else:
        lines.append("  (none declared)")
        lines.append("result: PASS (no expectations declared)")
    return "\n".join(lines) + "\n"


def _plot_files(name: str, cfg: ExperimentConfig, result: RunResult) -> list:
    """(filename, svg text) per plot block; names resolved against columns."""
    out = []
    col_names = [n for n, _ in result.columns]
    col_units = {n: u for n, u in result.columns}

    def numeric_column(label: str, key: str) -> list[float]:
        if label not in col_names:
            raise ConfigError(f"{key}: no column named {label!r}")
        idx = col_names.index(label)
        try:
            return [float(r[idx]) for r in result.rows]
        except (TypeError, ValueError):
            raise ConfigError(f"{key}: column {label!r} is not numeric") from None

    for i, pl in enumerate(cfg.plots):
        x = numeric_column(pl["x"], "plot.x")
        series = [(yname, numeric_column(yname, "plot.y"))
                  for yname in pl["y"]]
        xu = col_units.get(pl["x"], "")
        xlabel = f"{pl['x']} [{xu}]" if xu else pl["x"]
        svg = line_plot(x, series, title=pl["title"], xlabel=xlabel,
                        ylabel=pl["y"][0] if len(pl["y"]) == 1 else "")
        default = f"{name}.svg" if len(cfg.plots) == 1 else f"{name}_{i}.svg"
        out.append((pl["file"] or default, svg))
    return out


# ---------------------------------------------------------------------------
# scenario discovery


def _scenario_dir():
    return resources.files("ionsim").joinpath("scenarios")


def list_scenarios() -> list[dict]:
    """Bundled scenario descriptors in stable (sorted) order."""
    out = []
    root = _scenario_dir()
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if not entry.name.endswith(".json"):
            continue
        cfg = parse_config_text(entry.read_text(encoding="utf-8"),
                                origin=entry.name)
        out.append({
            "name": entry.name[: -len(".json")],
            "kind": cfg.kind,
            "description": cfg.description,
            "expectations": len(cfg.expect),
        })
    return out


def _resolve_config(arg: str) -> tuple[str, str]:
    """(origin label, config text) for a path or bundled scenario name."""
    if os.path.isfile(arg):
        try:
            with open(arg, encoding="utf-8") as fh:
                return arg, fh.read()
        except OSError as err:
            raise ConfigError(f"{arg}: cannot read config ({err})") from err
    entry = _scenario_dir().joinpath(arg + ".json")
    if entry.is_file():
        return f"bundled:{arg}", entry.read_text(encoding="utf-8")
    raise ConfigError(
        f"{arg}: no such config file or bundled scenario "
        "(try 'ionsim list')"
    )


# ---------------------------------------------------------------------------
# commands


def _cmd_run(args) -> int:
    origin, text = _resolve_config(args.config)
    sha = hashlib.sha256(text.encode("utf-8")).hexdigest()
    cfg = parse_config_text(text, origin=origin)
    seed = args.seed if args.seed is not None else cfg.seed
    strict = bool(args.strict or cfg.strict)
    if args.config.endswith(".json") and os.path.isfile(args.config):
        default_name = os.path.splitext(os.path.basename(args.config))[0]
    else:
        default_name = os.path.basename(args.config)
    name = cfg.output or default_name

    schema, handler = _HANDLERS[cfg.kind]
    params = validate_block(cfg.params, schema, "params")
    if strict:
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            result = handler(params, seed)
    else:
        result = handler(params, seed)

    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    plots = _plot_files(name, cfg, result)

    csv_path = os.path.join(out_dir, f"{name}.csv")
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_csv(name, cfg, seed, result))
    outputs = [csv_path]
    for fname, svg in plots:
        svg_path = os.path.join(out_dir, fname)
        with open(svg_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(svg)
        outputs.append(svg_path)

    checks = evaluate_expectations(cfg.expect, result.metrics)
    manifest_path = os.path.join(out_dir, f"{name}.manifest.txt")
    with open(manifest_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_manifest(name, origin, sha, cfg, seed, strict,
                                 outputs, checks, result.metrics))
    outputs.append(manifest_path)

    failed = sum(1 for c in checks if c["status"] == "FAIL")
    if args.json:
        print(json.dumps({
            "scenario": name,
            "kind": cfg.kind,
            "seed": seed,
            "metrics": {k: float(v) for k, v in result.metrics.items()},
            "expectations": checks,
            "outputs": outputs,
            "result": "PASS" if failed == 0 else "FAIL",
        }, indent=1, sort_keys=True))
    else:
        print(f"scenario {name} (kind {cfg.kind}, seed {seed})")
        for o in outputs:
            print(f"wrote {o}")
        for c in checks:
            print(f"{c['status']} {c['metric']}: {c['detail']}")
        if checks:
            print(f"result: {'PASS' if failed == 0 else 'FAIL'} "
                  f"({len(checks) - failed}/{len(checks)} expectations)")
    return 0


def _cmd_list(args) -> int:
    scenarios = list_scenarios()
    if args.json:
        print(json.dumps(scenarios, indent=1, sort_keys=True))
        return 0
    width = max((len(s["name"]) for s in scenarios), default=4)
    print(f"{'name'.ljust(width)}  {'kind'.ljust(10)}  description")
    for s in scenarios:
        print(f"{s['name'].ljust(width)}  {s['kind'].ljust(10)}  "
              f"{s['description']}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ionsim",
        description="Trapped-ion coherent-control simulator: run experiment "
                    "configs, emit CSV/SVG/manifest outputs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="run one experiment config")
    run_p.add_argument("config",
                       help="path to a JSON config, or a bundled scenario name")
    run_p.add_argument("--strict", action="store_true",
                       help="escalate model warnings to errors (exit 3)")
    run_p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
    run_p.add_argument("--out", default=None, help="output directory")
    run_p.add_argument("--json", action="store_true",
                       help="print a JSON run summary")
    list_p = sub.add_parser("list", help="list bundled scenarios")
    list_p.add_argument("--json", action="store_true",
                        help="machine-readable listing")
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_list(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except Warning as warn:
        print(f"strict: {type(warn).__name__}: {warn}", file=sys.stderr)
        return 3
    except IonsimError as err:
        print(f"physics error: {type(err).__name__}: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
