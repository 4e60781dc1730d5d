"""Declarative scenario runner and the bundled figure presets.

A scenario is a strict JSON document (``schema_version`` 1) naming one of
five models (full-raman, engineered-ladder, ub-liouvillian,
selective-liouvillian, collision-model) together with its parameters,
initial state, sampling grid and requested observable columns.  All rates
are dimensionless multiples of the declared reference rate (lambda_1 for
Hamiltonian scenarios, gamma for dissipative ones); the grid is expressed
in the matching dimensionless time variable (``zeta1_t`` = |zeta_ref| t
for Hamiltonian runs, ``gamma_t`` for dissipative runs).

Outputs are an :class:`~fockladder.observables.ObservableSeries` plus a
summary record carrying derived couplings, the validity-regime report,
resonance residuals, deviation statistics and final-state diagnostics.
Runs are deterministic: identical configs produce byte-identical CSV.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass

import numpy as np

from .hilbert import (
    DensityOperator,
    StateVector,
    atom_field_layout,
    atom_state,
    field_layout,
    field_superposition,
    product_state,
    thermal_state,
)
from .lindblad import (
    IntegratorConfig,
    TimeGrid,
    evolve_density,
    evolve_state,
    liouvillian_matrix,
    steady_state,
)
from .observables import (
    ObservableSeries,
    detect_steady,
    fidelity_fock,
    fock_probabilities,
    mandel_q,
    mean_photon,
    purity,
    trace_distance,
)
from .raman import (
    LadderSpec,
    build_engineered_hamiltonian,
    build_full_hamiltonian,
    check_regime,
    derive_couplings,
    ladder_from_conditions,
    analytic_probabilities,
    raman_params,
    solve_resonance,
)
from .reservoir import (
    AtomInjectionParams,
    ThermalBathParams,
    collision_model_evolve,
    gamma_from_injection,
    selective_dissipators,
    thermal_terms,
    ub_dissipator,
)

SCHEMA_VERSION = 1

MODELS = (
    "full-raman",
    "engineered-ladder",
    "ub-liouvillian",
    "selective-liouvillian",
    "collision-model",
)

HAMILTONIAN_MODELS = ("full-raman", "engineered-ladder")

# steady-state detection defaults (dimensionless gamma t)
STEADY_WINDOW = 0.05
STEADY_EPS = 1e-3


class ScenarioValidationError(ValueError):
    """A scenario document violates the strict schema."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


def _check_keys(d: dict, where: str, required: set[str], optional: set[str] = frozenset()):
    if not isinstance(d, dict):
        raise ScenarioValidationError(where, f"expected an object, got {type(d).__name__}")
    unknown = set(d) - required - set(optional)
    if unknown:
        raise ScenarioValidationError(where, f"unknown keys {sorted(unknown)}")
    missing = required - set(d)
    if missing:
        raise ScenarioValidationError(where, f"missing keys {sorted(missing)}")


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioValidationError(where, f"expected a number, got {value!r}")
    return float(value)


def _amplitude(value, where: str) -> complex:
    """A real number or a [re, im] pair."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, list) and len(value) == 2:
        return complex(_number(value[0], where), _number(value[1], where))
    raise ScenarioValidationError(where, f"expected number or [re, im], got {value!r}")


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated scenario document; ``raw`` retains the source dict."""

    name: str
    model: str
    description: str
    reference_rate: dict
    parameters: dict
    initial_state: dict
    grid: TimeGrid
    cutoff: int
    outputs: tuple[str, ...]
    integrator: IntegratorConfig
    anchor: dict
    check: dict
    regime_only: bool
    raw: dict

    @property
    def time_column(self) -> str:
        return "zeta1_t" if self.model in HAMILTONIAN_MODELS else "gamma_t"


def parse_config(doc: dict) -> ScenarioConfig:
    """Validate a scenario document against the strict schema."""
    _check_keys(
        doc,
        "scenario",
        {"schema_version", "name", "model", "reference_rate", "parameters",
         "initial_state", "grid", "cutoff", "outputs"},
        {"description", "integrator", "anchor", "check", "regime_only"},
    )
    if doc["schema_version"] != SCHEMA_VERSION:
        raise ScenarioValidationError(
            "schema_version", f"expected {SCHEMA_VERSION}, got {doc['schema_version']!r}"
        )
    model = doc["model"]
    if model not in MODELS:
        raise ScenarioValidationError("model", f"unknown model {model!r}; have {MODELS}")

    ref = doc["reference_rate"]
    _check_keys(ref, "reference_rate", {"unit"}, {"value_hz"})
    if ref["unit"] not in ("lambda1", "gamma", "Hz"):
        raise ScenarioValidationError(
            "reference_rate.unit", f"must be lambda1 | gamma | Hz, got {ref['unit']!r}"
        )

    grid_doc = doc["grid"]
    _check_keys(grid_doc, "grid", {"start", "stop", "samples"})
    samples = grid_doc["samples"]
    if not isinstance(samples, int) or isinstance(samples, bool):
        raise ScenarioValidationError("grid.samples", "must be an integer")
    try:
        grid = TimeGrid(_number(grid_doc["start"], "grid.start"),
                        _number(grid_doc["stop"], "grid.stop"), samples)
    except ValueError as exc:
        raise ScenarioValidationError("grid", str(exc)) from None

    cutoff = doc["cutoff"]
    if not isinstance(cutoff, int) or isinstance(cutoff, bool) or cutoff < 2:
        raise ScenarioValidationError("cutoff", f"must be an integer >= 2, got {cutoff!r}")

    outputs = doc["outputs"]
    if not isinstance(outputs, list) or not all(isinstance(o, str) for o in outputs):
        raise ScenarioValidationError("outputs", "must be a list of column names")
    if len(set(outputs)) != len(outputs):
        raise ScenarioValidationError("outputs", "duplicate column names")
    for col in outputs:
        _validate_output_name(col, cutoff)

    integ_doc = doc.get("integrator", {})
    _check_keys(integ_doc, "integrator", set(), {"rel_tol", "abs_tol", "max_step", "method"})
    defaults = IntegratorConfig()
    try:
        integrator = IntegratorConfig(
            rel_tol=_number(integ_doc.get("rel_tol", defaults.rel_tol), "integrator.rel_tol"),
            abs_tol=_number(integ_doc.get("abs_tol", defaults.abs_tol), "integrator.abs_tol"),
            max_step=_number(integ_doc.get("max_step", defaults.max_step), "integrator.max_step"),
            method=str(integ_doc.get("method", defaults.method)),
        )
    except ValueError as exc:
        raise ScenarioValidationError("integrator", str(exc)) from None

    params = doc["parameters"]
    _validate_parameters(model, params, cutoff)
    initial = doc["initial_state"]
    _validate_initial_state(model, initial, cutoff)

    return ScenarioConfig(
        name=str(doc["name"]),
        model=model,
        description=str(doc.get("description", "")),
        reference_rate=dict(ref),
        parameters=copy.deepcopy(params),
        initial_state=copy.deepcopy(initial),
        grid=grid,
        cutoff=cutoff,
        outputs=tuple(outputs),
        integrator=integrator,
        anchor=copy.deepcopy(doc.get("anchor", {})),
        check=copy.deepcopy(doc.get("check", {})),
        regime_only=bool(doc.get("regime_only", False)),
        raw=copy.deepcopy(doc),
    )


def _validate_output_name(col: str, cutoff: int) -> None:
    if col in ("Q", "mean_n", "purity"):
        return
    if col.startswith("P") and col[1:].isdigit():
        if int(col[1:]) > cutoff:
            raise ScenarioValidationError("outputs", f"{col} beyond cutoff {cutoff}")
        return
    if col.startswith("F") and col[1:].isdigit():
        if int(col[1:]) > cutoff:
            raise ScenarioValidationError("outputs", f"{col} beyond cutoff {cutoff}")
        return
    raise ScenarioValidationError("outputs", f"unknown column {col!r}")


def _validate_ladder(doc: dict, where: str) -> None:
    _check_keys(doc, where, {"base", "weights"}, {"kind"})
    if not isinstance(doc["base"], int) or doc["base"] < 0:
        raise ScenarioValidationError(f"{where}.base", "must be a non-negative integer")
    weights = doc["weights"]
    if not isinstance(weights, list) or not weights:
        raise ScenarioValidationError(f"{where}.weights", "must be a non-empty list")
    for i, w in enumerate(weights):
        _amplitude(w, f"{where}.weights[{i}]")


def _validate_parameters(model: str, params: dict, cutoff: int) -> None:
    where = "parameters"
    if model == "full-raman":
        _check_keys(
            params, where,
            {"lambdas", "omegas", "deltas", "delta_tildes", "mode", "base"},
            {"kind", "solve_detunings", "compare_engineered", "analytic",
             "n_bar_regime", "regime_threshold"},
        )
        k = len(params["lambdas"])
        for key in ("lambdas", "omegas", "deltas", "delta_tildes"):
            vals = params[key]
            if not isinstance(vals, list) or len(vals) != k:
                raise ScenarioValidationError(f"{where}.{key}", f"must be a list of length {k}")
            for i, v in enumerate(vals):
                _number(v, f"{where}.{key}[{i}]")
        if params["mode"] not in ("upper-bounded", "sliced"):
            raise ScenarioValidationError(f"{where}.mode", "must be upper-bounded | sliced")
        if not isinstance(params["base"], int) or params["base"] < 0:
            raise ScenarioValidationError(f"{where}.base", "must be a non-negative integer")
    elif model == "engineered-ladder":
        _check_keys(params, where, {"ladder", "zeta_ref"}, {"analytic"})
        _validate_ladder(params["ladder"], f"{where}.ladder")
        _amplitude(params["zeta_ref"], f"{where}.zeta_ref")
    elif model == "ub-liouvillian":
        _check_keys(
            params, where,
            {"ladder", "Gamma", "gamma", "n_bar", "target_fock"},
            {"steady_window", "steady_eps"},
        )
        _validate_ladder(params["ladder"], f"{where}.ladder")
        for key in ("Gamma", "gamma", "n_bar"):
            _number(params[key], f"{where}.{key}")
        if not isinstance(params["target_fock"], int) or params["target_fock"] > cutoff:
            raise ScenarioValidationError(f"{where}.target_fock", "must be an integer <= cutoff")
    elif model == "selective-liouvillian":
        _check_keys(
            params, where,
            {"channels", "gamma", "n_bar", "target_fock"},
            {"steady_window", "steady_eps", "recipe"},
        )
        channels = params["channels"]
        if not isinstance(channels, list) or not channels:
            raise ScenarioValidationError(f"{where}.channels", "must be a non-empty list")
        for i, ch in enumerate(channels):
            if not (isinstance(ch, list) and len(ch) == 2 and isinstance(ch[0], int)):
                raise ScenarioValidationError(
                    f"{where}.channels[{i}]", "must be a [k, Gamma_k] pair"
                )
            _number(ch[1], f"{where}.channels[{i}][1]")
        if "recipe" in params:
            _check_keys(params["recipe"], f"{where}.recipe", {"tau", "zeta_unit"}, set())
            _number(params["recipe"]["tau"], f"{where}.recipe.tau")
            _number(params["recipe"]["zeta_unit"], f"{where}.recipe.zeta_unit")
        if not isinstance(params["target_fock"], int) or params["target_fock"] > cutoff:
            raise ScenarioValidationError(f"{where}.target_fock", "must be an integer <= cutoff")
    elif model == "collision-model":
        _check_keys(
            params, where,
            {"ladder", "Gamma", "zeta_tau", "gamma", "n_bar", "atom_state"},
            {"target_fock"},
        )
        _validate_ladder(params["ladder"], f"{where}.ladder")
        for key in ("Gamma", "zeta_tau", "gamma", "n_bar"):
            v = _number(params[key], f"{where}.{key}")
            if key in ("Gamma", "zeta_tau") and v <= 0:
                raise ScenarioValidationError(f"{where}.{key}", "must be positive")
        if not isinstance(params["atom_state"], dict):
            raise ScenarioValidationError(f"{where}.atom_state", "must be a label -> amplitude map")


def _validate_initial_state(model: str, initial: dict, cutoff: int) -> None:
    where = "initial_state"
    if model in HAMILTONIAN_MODELS:
        _check_keys(initial, where, {"field", "atom"})
        for n in initial["field"]:
            if not str(n).isdigit() or int(n) > cutoff:
                raise ScenarioValidationError(f"{where}.field", f"bad Fock index {n!r}")
            _amplitude(initial["field"][n], f"{where}.field[{n}]")
        for label, amp in initial["atom"].items():
            _amplitude(amp, f"{where}.atom[{label}]")
    else:
        _check_keys(initial, where, set(), {"thermal_n_bar", "fock"})
        if "thermal_n_bar" in initial and "fock" in initial:
            raise ScenarioValidationError(where, "give thermal_n_bar or fock, not both")
        if "thermal_n_bar" in initial:
            if _number(initial["thermal_n_bar"], f"{where}.thermal_n_bar") < 0:
                raise ScenarioValidationError(f"{where}.thermal_n_bar", "must be >= 0")
        elif "fock" in initial:
            n = initial["fock"]
            if not isinstance(n, int) or not 0 <= n <= cutoff:
                raise ScenarioValidationError(f"{where}.fock", f"bad Fock index {n!r}")
        else:
            raise ScenarioValidationError(where, "need thermal_n_bar or fock")


# ---------------------------------------------------------------------------
# observable columns


def _probe_columns(states, outputs, cutoff) -> dict[str, np.ndarray]:
    cols: dict[str, list[float]] = {name: [] for name in outputs}
    for state in states:
        pops = fock_probabilities(state)
        for name in outputs:
            if name.startswith("P") and name[1:].isdigit():
                cols[name].append(float(pops[int(name[1:])]))
            elif name.startswith("F") and name[1:].isdigit():
                cols[name].append(float(pops[int(name[1:])]))
            elif name == "Q":
                cols[name].append(mandel_q(state))
            elif name == "mean_n":
                cols[name].append(mean_photon(state))
            elif name == "purity":
                rho = state.to_density() if isinstance(state, StateVector) else state
                cols[name].append(purity(rho))
    return {k: np.asarray(v) for k, v in cols.items()}


def _ladder_from_doc(doc: dict, zeta_ref: complex) -> LadderSpec:
    weights = tuple(_amplitude(w, "ladder.weights") for w in doc["weights"])
    return LadderSpec(
        base=doc["base"], weights=weights, zeta_ref=zeta_ref, kind=doc.get("kind", "JC")
    )


def _complex_pair(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


# ---------------------------------------------------------------------------
# model runners


@dataclass
class RunResult:
    config: ScenarioConfig
    series: ObservableSeries | None
    summary: dict


def run_scenario(config: ScenarioConfig) -> RunResult:
    """Execute a validated scenario; deterministic for identical inputs."""
    summary: dict = {
        "schema_version": SCHEMA_VERSION,
        "name": config.name,
        "model": config.model,
        "description": config.description,
        "reference_rate": config.reference_rate,
        "cutoff": config.cutoff,
        "time_column": config.time_column,
        "anchor": config.anchor,
    }
    if config.model == "full-raman":
        series = _run_full_raman(config, summary)
    elif config.model == "engineered-ladder":
        series = _run_engineered(config, summary)
    elif config.model in ("ub-liouvillian", "selective-liouvillian"):
        series = _run_liouvillian(config, summary)
    else:
        series = _run_collision(config, summary)
    return RunResult(config, series, summary)


def _raman_setup(config: ScenarioConfig):
    p = config.parameters
    params = raman_params(
        p["lambdas"], p["omegas"], p["deltas"], p["delta_tildes"], kind=p.get("kind", "JC")
    )
    base = p["base"]
    input_tildes = [br.delta_tilde for br in params.branches]
    if p.get("solve_detunings", True):
        params = solve_resonance(params, base)
    derived = derive_couplings(params)
    spec = ladder_from_conditions(derived, p["mode"], base, params.n_branches)
    report = check_regime(
        params, derived, base, spec.steps,
        n_bar=p.get("n_bar_regime", 0.0),
        threshold=p.get("regime_threshold", 10.0),
    )
    residuals = [derived.big_phi(base + j, j + 1) for j in range(params.n_branches)]
    return params, derived, spec, report, input_tildes, residuals


def _couplings_record(derived, spec) -> dict:
    return {
        "chi": derived.chi,
        "chi_tilde": derived.chi_tilde,
        "varpi": derived.varpi,
        "omega_shift": derived.omega_shift,
        "chi_eff": derived.chi_eff,
        "zeta": [_complex_pair(z) for z in derived.zeta],
        "theta": list(derived.theta),
        "zeta_ref": _complex_pair(spec.zeta_ref),
        "ladder_weights": [_complex_pair(w) for w in spec.weights],
        "ladder_base": spec.base,
        "ladder_top": spec.top,
    }


def _run_full_raman(config: ScenarioConfig, summary: dict) -> ObservableSeries | None:
    p = config.parameters
    params, derived, spec, report, input_tildes, residuals = _raman_setup(config)
    summary["couplings"] = _couplings_record(derived, spec)
    summary["detunings"] = {
        "input_delta_tilde": input_tildes,
        "solved_delta_tilde": [br.delta_tilde for br in params.branches],
        "residuals": residuals,
    }
    summary["regime"] = report.as_dict()
    if config.regime_only:
        return None

    zr = abs(spec.zeta_ref)
    x_grid = config.grid
    t_grid = TimeGrid(x_grid.t_start / zr, x_grid.t_end / zr, x_grid.samples)

    field0 = {int(n): _amplitude(a, "field") for n, a in config.initial_state["field"].items()}
    atom_full = atom_state(
        {k: _amplitude(v, "atom") for k, v in config.initial_state["atom"].items()},
        params.atom_levels,
    )
    psi0 = product_state(atom_full, field_superposition(field0, config.cutoff))
    h_full = build_full_hamiltonian(params, atom_field_layout(2 + params.n_branches, config.cutoff))
    traj_full = evolve_state(h_full, psi0, t_grid, config.integrator)
    cols = {
        f"{name}_full": col
        for name, col in _probe_columns(traj_full.states, config.outputs, config.cutoff).items()
    }
    summary["leakage"] = {"full": traj_full.leakage}

    x_values = x_grid.times
    if p.get("compare_engineered", True):
        # The engineered reference is the ideal uniform-weight target ladder;
        # the drive parameters realize it only approximately, and the residual
        # weight mismatch is reported alongside the deviations.
        ideal = LadderSpec(
            base=spec.base, weights=(1.0,) * spec.steps,
            zeta_ref=spec.zeta_ref, kind=spec.kind,
        )
        summary["couplings"]["weight_mismatch"] = max(
            abs(w - 1.0) for w in spec.weights
        )
        layout2 = atom_field_layout(2, config.cutoff)
        h_eng = build_engineered_hamiltonian(ideal, layout2)
        atom_ge = atom_state(
            {k: _amplitude(v, "atom")
             for k, v in config.initial_state["atom"].items() if k in ("g", "e")},
            ("g", "e"),
        )
        psi0e = product_state(atom_ge, field_superposition(field0, config.cutoff))
        traj_eng = evolve_state(h_eng, psi0e, t_grid, config.integrator)
        eng_cols = _probe_columns(traj_eng.states, config.outputs, config.cutoff)
        cols.update({f"{name}_engineered": col for name, col in eng_cols.items()})
        summary["leakage"]["engineered"] = traj_eng.leakage

        subspace = set(range(spec.base, spec.top + 1))
        devs, outside = [], [0.0]
        full_pops = np.array([fock_probabilities(s) for s in traj_full.states])
        eng_pops = np.array([fock_probabilities(s) for s in traj_eng.states])
        for n in range(config.cutoff + 1):
            gap = float(np.max(np.abs(full_pops[:, n] - eng_pops[:, n])))
            if n in subspace:
                devs.append(gap)
            else:
                outside.append(float(np.max(full_pops[:, n])))
        summary["deviations"] = {
            "full_vs_engineered": max(devs),
            "outside_subspace": max(outside),
        }
        if p.get("analytic"):
            ana = analytic_probabilities(p["analytic"], x_values)
            ana_dev = 0.0
            for n, curve in ana.items():
                cols[f"P{n}_analytic"] = curve
                ana_dev = max(ana_dev, float(np.max(np.abs(eng_pops[:, n] - curve))))
            summary["deviations"]["engineered_vs_analytic"] = ana_dev

    summary["final"] = {name: float(col[-1]) for name, col in sorted(cols.items())}
    return ObservableSeries(x_values, cols)


def _run_engineered(config: ScenarioConfig, summary: dict) -> ObservableSeries:
    p = config.parameters
    zeta_ref = _amplitude(p["zeta_ref"], "zeta_ref")
    spec = _ladder_from_doc(p["ladder"], zeta_ref)
    summary["couplings"] = {
        "zeta_ref": _complex_pair(spec.zeta_ref),
        "ladder_weights": [_complex_pair(w) for w in spec.weights],
        "ladder_base": spec.base,
        "ladder_top": spec.top,
    }
    zr = abs(spec.zeta_ref)
    t_grid = TimeGrid(config.grid.t_start / zr, config.grid.t_end / zr, config.grid.samples)
    field0 = {int(n): _amplitude(a, "field") for n, a in config.initial_state["field"].items()}
    atom_ge = atom_state(
        {k: _amplitude(v, "atom") for k, v in config.initial_state["atom"].items()},
        ("g", "e"),
    )
    psi0 = product_state(atom_ge, field_superposition(field0, config.cutoff))
    h_eng = build_engineered_hamiltonian(spec, atom_field_layout(2, config.cutoff))
    traj = evolve_state(h_eng, psi0, t_grid, config.integrator)
    cols = _probe_columns(traj.states, config.outputs, config.cutoff)
    summary["leakage"] = {"engineered": traj.leakage}

    x_values = config.grid.times
    if p.get("analytic"):
        pops = np.array([fock_probabilities(s) for s in traj.states])
        ana = analytic_probabilities(p["analytic"], x_values)
        dev = 0.0
        for n, curve in ana.items():
            cols[f"P{n}_analytic"] = curve
            dev = max(dev, float(np.max(np.abs(pops[:, n] - curve))))
        summary["deviations"] = {"engineered_vs_analytic": dev}
    summary["final"] = {name: float(col[-1]) for name, col in sorted(cols.items())}
    return ObservableSeries(x_values, cols)


def _initial_field_density(config: ScenarioConfig) -> DensityOperator:
    init = config.initial_state
    if "thermal_n_bar" in init:
        return thermal_state(float(init["thermal_n_bar"]), config.cutoff)
    layout = field_layout(config.cutoff)
    amps = np.zeros(config.cutoff + 1, dtype=complex)
    amps[int(init["fock"])] = 1.0
    return StateVector(layout, amps).to_density()


def _run_liouvillian(config: ScenarioConfig, summary: dict) -> ObservableSeries:
    p = config.parameters
    layout = field_layout(config.cutoff)
    bath = ThermalBathParams(gamma=p["gamma"], n_bar=p["n_bar"])
    if config.model == "ub-liouvillian":
        spec = _ladder_from_doc(p["ladder"], zeta_ref=1.0)
        dissipator = ub_dissipator(spec, p["Gamma"], layout)
        summary["gamma_eff"] = {"configured": list(dissipator.gamma_eff)}
    else:
        channels = [(int(k), float(g)) for k, g in p["channels"]]
        dissipator = selective_dissipators(channels, layout)
        summary["gamma_eff"] = {"configured": list(dissipator.gamma_eff)}
        if "recipe" in p:
            summary["gamma_eff"]["recipe"] = _selective_recipe_rates(p, channels)

    terms = list(dissipator.terms) + thermal_terms(bath, layout)
    rho0 = _initial_field_density(config)
    traj = evolve_density(None, terms, rho0, config.grid, config.integrator)
    cols = _probe_columns(traj.states, config.outputs, config.cutoff)
    series = ObservableSeries(config.grid.times, cols)
    summary["leakage"] = {"density": traj.leakage}

    target = p["target_fock"]
    rho_ss = steady_state(liouvillian_matrix(None, terms))
    # settling is judged on the target-fidelity column; the remaining
    # diagnostics may still creep within eps at the end of the grid
    fid_col = f"F{target}"
    fid_series = (
        ObservableSeries(series.times, {fid_col: series.column(fid_col)})
        if fid_col in series.columns
        else series
    )
    summary["steady"] = {
        "window": p.get("steady_window", STEADY_WINDOW),
        "eps": p.get("steady_eps", STEADY_EPS),
        "detected_at": detect_steady(
            fid_series, p.get("steady_window", STEADY_WINDOW), p.get("steady_eps", STEADY_EPS)
        ),
        "null_space_trace_distance": trace_distance(traj.states[-1], rho_ss),
        "null_space_fidelity": fidelity_fock(rho_ss, target),
        "null_space_mandel_q": mandel_q(rho_ss),
    }
    summary["final"] = {name: float(col[-1]) for name, col in sorted(cols.items())}
    summary["final"][f"F{target}"] = fidelity_fock(traj.states[-1], target)
    summary["final"]["Q"] = mandel_q(traj.states[-1])
    return series


def _selective_recipe_rates(p: dict, channels) -> list[float]:
    """Gamma_k = r (zeta_k tau)^2 from the transit-time recipe, for comparison
    with the configured rates (the two differ in the source material).

    The recipe gives tau (in 1/gamma) and zeta_unit (in gamma) with
    zeta_k = zeta_unit sqrt(k+1); back-to-back windows mean r = 1/tau.
    """
    tau = float(p["recipe"]["tau"])
    zeta_unit = float(p["recipe"]["zeta_unit"])
    inj = AtomInjectionParams(
        tau=tau, rate=1.0 / tau,
        atom_state=atom_state({"e": 1.0}, ("g", "e")),
    )
    return [gamma_from_injection(zeta_unit * np.sqrt(k + 1), inj) for k, _ in channels]


def _run_collision(config: ScenarioConfig, summary: dict) -> ObservableSeries:
    p = config.parameters
    zeta_tau = float(p["zeta_tau"])
    big_gamma = float(p["Gamma"])
    tau = zeta_tau**2 / big_gamma
    zeta = zeta_tau / tau
    n_atoms = max(1, math.ceil((config.grid.t_end - config.grid.t_start) / tau))
    spec = _ladder_from_doc(p["ladder"], zeta_ref=zeta)
    layout = atom_field_layout(2, config.cutoff)
    h_eng = build_engineered_hamiltonian(spec, layout)
    inj = AtomInjectionParams(
        tau=tau, rate=1.0 / tau,
        atom_state=atom_state(
            {k: _amplitude(v, "atom_state") for k, v in p["atom_state"].items()}, ("g", "e")
        ),
    )
    bath = ThermalBathParams(gamma=p["gamma"], n_bar=p["n_bar"])
    rho0 = _initial_field_density(config)
    traj = collision_model_evolve(h_eng, inj, bath, rho0, n_atoms)
    cols = _probe_columns(traj.states, config.outputs, config.cutoff)
    summary["collision"] = {
        "tau": tau,
        "rate": 1.0 / tau,
        "zeta": zeta,
        "zeta_tau": zeta_tau,
        "n_atoms": n_atoms,
        "gamma_eff": gamma_from_injection(zeta, inj),
    }
    summary["leakage"] = {"density": traj.leakage}
    summary["final"] = {name: float(col[-1]) for name, col in sorted(cols.items())}
    return ObservableSeries(traj.times, cols)


# ---------------------------------------------------------------------------
# check targets


def evaluate_check(result: RunResult) -> list[dict]:
    """Compare the summary against the scenario's embedded check targets."""
    findings = []
    for key, rule in sorted(result.config.check.items()):
        if "target" in rule:
            actual = result.summary.get("final", {}).get(key)
            ok = actual is not None and abs(actual - rule["target"]) <= rule["tol"]
            findings.append(
                {"name": key, "target": rule["target"], "tol": rule["tol"],
                 "actual": actual, "pass": bool(ok)}
            )
        elif "max" in rule:
            actual = result.summary.get("deviations", {}).get(key)
            ok = actual is not None and actual <= rule["max"]
            findings.append(
                {"name": key, "max": rule["max"], "actual": actual, "pass": bool(ok)}
            )
        else:
            raise ScenarioValidationError(f"check.{key}", "need a target/tol or max rule")
    return findings


# ---------------------------------------------------------------------------
# presets

_S2 = math.sqrt(2.0)
_S3 = math.sqrt(3.0)
_S5 = math.sqrt(5.0)
_S6 = math.sqrt(6.0)

_TWO_PI = 2.0 * math.pi

_VALIDATION_CHECK = {
    "full_vs_engineered": {"max": 0.10},
    "outside_subspace": {"max": 0.05},
    "engineered_vs_analytic": {"max": 1e-8},
}

_HAMILTONIAN_INTEGRATOR = {"rel_tol": 1e-7, "abs_tol": 1e-9}


def _full_raman_preset(name, description, *, lambdas, omegas, deltas, delta_tildes,
                       mode, base, field, outputs, analytic, anchor):
    return {
        "schema_version": SCHEMA_VERSION,
        "name": name,
        "description": description,
        "model": "full-raman",
        "reference_rate": {"unit": "lambda1", "value_hz": 5.0e5},
        "cutoff": 15,
        "grid": {"start": 0.0, "stop": _TWO_PI, "samples": 201},
        "integrator": dict(_HAMILTONIAN_INTEGRATOR),
        "initial_state": {"field": field, "atom": {"g": 1.0, "e": 1.0}},
        "outputs": outputs,
        "parameters": {
            "lambdas": lambdas,
            "omegas": omegas,
            "deltas": deltas,
            "delta_tildes": delta_tildes,
            "mode": mode,
            "base": base,
            "solve_detunings": True,
            "compare_engineered": True,
            "analytic": analytic,
        },
        "anchor": anchor,
        "check": copy.deepcopy(_VALIDATION_CHECK),
    }


def _build_presets() -> dict[str, dict]:
    presets: dict[str, dict] = {}

    presets["fig2a"] = _full_raman_preset(
        "fig2a",
        "Two-step upper-bounded ladder on {|0>,|1>,|2>}: full two-branch Raman "
        "model vs engineered interaction vs closed-form Rabi curves.",
        lambdas=[1.0, 1.0],
        omegas=[1.0 / (5.0 * _S2), 1.0 / 20.0],
        deltas=[10.0, 5.0],
        delta_tildes=[9.9, 5.2],
        mode="upper-bounded",
        base=0,
        field={"0": 1.0, "2": 1.0},
        outputs=["P0", "P1", "P2", "P3"],
        analytic="fig2a",
        anchor={"figure": "2a", "targets": {"P1_peak": 0.5}},
    )
    presets["fig2b"] = _full_raman_preset(
        "fig2b",
        "Two-step sliced ladder on {|3>,|4>,|5>} (M=3): full model vs "
        "engineered interaction vs closed forms.",
        lambdas=[1.0, 1.0],
        omegas=[1.0 / (5.0 * _S5), 1.0 / 25.0],
        deltas=[20.0, 10.0],
        delta_tildes=[19.8, 10.25],
        mode="sliced",
        base=3,
        field={"3": 1.0, "5": 1.0},
        outputs=["P2", "P3", "P4", "P5", "P6"],
        analytic="fig2b",
        anchor={"figure": "2b", "targets": {"P4_peak": 0.5}},
    )
    presets["fig3a"] = _full_raman_preset(
        "fig3a",
        "Three-step upper-bounded ladder on {|0>..|3>}: three-branch full "
        "model vs engineered interaction vs closed forms.",
        lambdas=[1.0, 1.0, 1.0],
        omegas=[1.0 / 20.0, _S2 / 20.0, 1.0 / (20.0 * _S3)],
        deltas=[10.0, 20.0, 10.0],
        delta_tildes=[9.95, 20.1, 10.15],
        mode="upper-bounded",
        base=0,
        field={"1": 1.0, "3": 1.0},
        outputs=["P0", "P1", "P2", "P3", "P4"],
        analytic="fig3a",
        anchor={"figure": "3a", "targets": {"P1_peak": 0.5}},
    )
    presets["fig3b"] = _full_raman_preset(
        "fig3b",
        "Three-step sliced ladder on {|3>..|6>} (M=3): three-branch full "
        "model vs engineered interaction vs closed forms.",
        lambdas=[1.0, 1.0, 1.0],
        omegas=[1.0 / (20.0 * _S5), 4.0 / (20.0 * _S5 * _S5), 2.0 / (20.0 * _S5 * _S6)],
        deltas=[20.0, 40.0, 20.0],
        delta_tildes=[19.9, 40.125, 20.15],
        mode="sliced",
        base=3,
        field={"3": 1.0, "6": 1.0},
        outputs=["P2", "P3", "P4", "P5", "P6", "P7"],
        analytic="fig3b",
        anchor={"figure": "3b", "targets": {"P3_start": 0.5}},
    )

    for fig in ("fig2a", "fig2b", "fig3a", "fig3b"):
        variant = copy.deepcopy(presets[fig])
        variant["name"] = f"regime-check-{fig}"
        variant["description"] = (
            f"Validity-regime table for the {fig} parameter set (no evolution)."
        )
        variant["regime_only"] = True
        variant["check"] = {}
        presets[variant["name"]] = variant

    presets["fig4"] = {
        "schema_version": SCHEMA_VERSION,
        "name": "fig4",
        "description": "Steady Fock state |3> from the collective three-step "
        "ladder dissipator (Gamma = 63 gamma) against a thermal bath.",
        "model": "ub-liouvillian",
        "reference_rate": {"unit": "gamma", "value_hz": 10.0},
        "cutoff": 12,
        "grid": {"start": 0.0, "stop": 1.0, "samples": 201},
        "initial_state": {"thermal_n_bar": 0.05},
        "outputs": ["F3", "Q", "mean_n", "P0", "P1", "P2", "P3"],
        "parameters": {
            "ladder": {"base": 0, "weights": [1.0, 1.0, 1.0]},
            "Gamma": 63.0,
            "gamma": 1.0,
            "n_bar": 0.05,
            "target_fock": 3,
        },
        "anchor": {"figure": "4", "targets": {"F3": 0.92, "Q": -0.96, "Q_start": 0.05}},
        "check": {"F3": {"target": 0.92, "tol": 0.03}, "Q": {"target": -0.96, "tol": 0.03}},
    }
    presets["fig6a"] = {
        "schema_version": SCHEMA_VERSION,
        "name": "fig6a",
        "description": "Steady Fock state |2> from two independent selective "
        "pump channels (Gamma_0 = 176 gamma, Gamma_1 = 352 gamma).",
        "model": "selective-liouvillian",
        "reference_rate": {"unit": "gamma", "value_hz": 10.0},
        "cutoff": 12,
        "grid": {"start": 0.0, "stop": 1.0, "samples": 201},
        "initial_state": {"thermal_n_bar": 0.05},
        "outputs": ["F2", "Q", "mean_n", "P0", "P1", "P2"],
        "parameters": {
            "channels": [[0, 176.0], [1, 352.0]],
            "gamma": 1.0,
            "n_bar": 0.05,
            "target_fock": 2,
            "recipe": {"tau": 1.4142135623730951e-3, "zeta_unit": 500.0},
        },
        "anchor": {"figure": "6a", "targets": {"F2": 0.95, "Q": -0.98}},
        "check": {"F2": {"target": 0.95, "tol": 0.02}, "Q": {"target": -0.98, "tol": 0.02}},
    }
    presets["fig6b"] = {
        "schema_version": SCHEMA_VERSION,
        "name": "fig6b",
        "description": "Steady Fock state |3> from three independent selective "
        "pump channels (Gamma_k = 96, 192, 288 gamma).",
        "model": "selective-liouvillian",
        "reference_rate": {"unit": "gamma", "value_hz": 10.0},
        "cutoff": 12,
        "grid": {"start": 0.0, "stop": 1.0, "samples": 201},
        "initial_state": {"thermal_n_bar": 0.05},
        "outputs": ["F3", "Q", "mean_n", "P0", "P1", "P2", "P3"],
        "parameters": {
            "channels": [[0, 96.0], [1, 192.0], [2, 288.0]],
            "gamma": 1.0,
            "n_bar": 0.05,
            "target_fock": 3,
            "recipe": {"tau": 1.1547005383792516e-3, "zeta_unit": 500.0},
        },
        "anchor": {"figure": "6b", "targets": {"F3": 0.94, "Q": -0.97}},
        "check": {"F3": {"target": 0.94, "tol": 0.02}, "Q": {"target": -0.97, "tol": 0.02}},
    }
    return presets


_PRESETS = _build_presets()


def collision_document(zeta_tau: float, t_end: float = 0.3) -> dict:
    """Scenario document for the atom-by-atom micro-simulation of the fig4
    reservoir (regular arrivals, back-to-back windows tau = 1/r)."""
    return {
        "schema_version": SCHEMA_VERSION,
        "name": f"fig4-collisions-{zeta_tau:g}",
        "description": "Atom-by-atom micro-simulation of the fig4 reservoir.",
        "model": "collision-model",
        "reference_rate": {"unit": "gamma", "value_hz": 10.0},
        "cutoff": 12,
        "grid": {"start": 0.0, "stop": t_end, "samples": 2},
        "initial_state": {"thermal_n_bar": 0.05},
        "outputs": ["F3", "Q", "mean_n"],
        "parameters": {
            "ladder": {"base": 0, "weights": [1.0, 1.0, 1.0]},
            "Gamma": 63.0,
            "zeta_tau": zeta_tau,
            "gamma": 1.0,
            "n_bar": 0.05,
            "atom_state": {"e": 1.0},
        },
        "anchor": {"figure": "4", "targets": {"F3": 0.92}},
    }


def list_presets() -> list[tuple[str, str]]:
    """Preset names with one-line descriptions, in a stable order."""
    return [(name, _PRESETS[name]["description"]) for name in sorted(_PRESETS)]


def preset_document(name: str) -> dict:
    if name not in _PRESETS:
        raise ScenarioValidationError("scenario", f"unknown preset {name!r}")
    return copy.deepcopy(_PRESETS[name])


def load_scenario(source) -> ScenarioConfig:
    """Load a scenario from a preset name, a JSON file path, or a dict."""
    if isinstance(source, dict):
        return parse_config(source)
    source = str(source)
    if source in _PRESETS:
        return parse_config(preset_document(source))
    try:
        with open(source, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise ScenarioValidationError(
            "scenario", f"{source!r} is neither a preset nor a readable file"
        ) from None
    except json.JSONDecodeError as exc:
        raise ScenarioValidationError("scenario", f"invalid JSON: {exc}") from None
    return parse_config(doc)


# ---------------------------------------------------------------------------
# sweeps


def sweep(config: ScenarioConfig, param_path: str, values) -> list[dict]:
    """Run the scenario once per value of a dotted numeric parameter path."""
    rows = []
    for value in values:
        doc = copy.deepcopy(config.raw)
        _assign_path(doc, param_path, value)
        result = run_scenario(parse_config(doc))
        row = {"param": param_path, "value": value}
        row.update({k: v for k, v in result.summary.get("final", {}).items()})
        if "deviations" in result.summary:
            row.update(result.summary["deviations"])
        rows.append(row)
    return rows


def _assign_path(doc: dict, path: str, value) -> None:
    keys = path.split(".")
    node = doc
    for key in keys[:-1]:
        if isinstance(node, list):
            node = node[int(key)]
        elif isinstance(node, dict) and key in node:
            node = node[key]
        else:
            raise ScenarioValidationError(path, f"no such parameter segment {key!r}")
    last = keys[-1]
    if isinstance(node, list):
        node[int(last)] = value
    elif isinstance(node, dict) and last in node:
        node[last] = value
    else:
        raise ScenarioValidationError(path, f"no such parameter {last!r}")


# ---------------------------------------------------------------------------
# serialization


def series_to_csv(series: ObservableSeries, time_column: str) -> str:
    """CSV with a header row and 17-significant-digit values."""
    names = list(series.columns)
    lines = [",".join([time_column] + names)]
    for i, t in enumerate(series.times):
        row = [f"{t:.17g}"] + [f"{series.columns[n][i]:.17g}" for n in names]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def summary_to_json(summary: dict) -> str:
    return json.dumps(summary, indent=2, sort_keys=True, allow_nan=False) + "\n"
