"""Engineered atomic reservoirs: coarse-grained dissipators and the collision model.

A beam of two-level atoms crosses the cavity one at a time, each coupled
through an engineered ladder Hamiltonian for a transit time tau.  Coarse
graining yields a Lindblad pump with rate Gamma = r (|zeta| tau)^2; the
atom-by-atom micro-simulation is also available for consistency checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
import scipy.linalg

from .hilbert import (
    ComplexOperator,
    DensityOperator,
    HilbertLayout,
    StateVector,
    annihilation,
    atom_field_layout,
    partial_trace,
)
from .lindblad import (
    LEAKAGE_LIMIT,
    LeakageError,
    LindbladTerm,
    Trajectory,
    _top_two_population,
    liouvillian_matrix,
)
from .raman import LadderSpec, ladder_operator


@dataclass(frozen=True)
class AtomInjectionParams:
    """Atom beam parameters: transit time tau, arrival rate r, reset state."""

    tau: float
    rate: float
    atom_state: StateVector

    def __post_init__(self):
        if self.tau <= 0 or self.rate <= 0:
            raise ValueError("tau and rate must be positive")
        if self.atom_state.layout.dims != (2,):
            raise ValueError("atoms are two-level (g, e)")

    def weak_coupling_indicator(self, zeta: complex) -> float:
        """|zeta| tau; the coarse-grained pump assumes this is << 1."""
        return abs(zeta) * self.tau


@dataclass(frozen=True)
class ThermalBathParams:
    gamma: float
    n_bar: float

    def __post_init__(self):
        if self.gamma < 0 or self.n_bar < 0:
            raise ValueError("gamma and n_bar must be non-negative")


@dataclass(frozen=True)
class EngineeredDissipator:
    terms: tuple[LindbladTerm, ...]
    gamma_eff: tuple[float, ...]
    provenance: Literal["ub-ladder", "selective"]


def gamma_from_injection(zeta: complex, inj: AtomInjectionParams) -> float:
    """Coarse-grained pump rate Gamma = r (|zeta| tau)^2."""
    return inj.rate * (abs(zeta) * inj.tau) ** 2


def ub_dissipator(spec: LadderSpec, gamma: float, layout: HilbertLayout) -> EngineeredDissipator:
    """Single-jump pump with the full ladder operator A^dag at rate Gamma.

    Cross terms coupling neighbouring ladder steps are carried by the
    single collective jump operator.
    """
    if gamma < 0:
        raise ValueError("Gamma must be non-negative")
    cutoff = layout.dim_of("field") - 1
    adag = ladder_operator(spec, cutoff)
    jump = ComplexOperator(layout, adag.entries) if layout.labels == ("field",) else None
    if jump is None:
        raise ValueError("ub_dissipator acts on a field-only layout")
    return EngineeredDissipator(
        terms=(LindbladTerm(gamma, jump),),
        gamma_eff=(gamma,),
        provenance="ub-ladder",
    )


def selective_dissipators(
    channels: list[tuple[int, float]], layout: HilbertLayout
) -> EngineeredDissipator:
    """Independent one-step pumps |k+1><k| at rates Gamma_k (no cross terms)."""
    ks = [k for k, _ in channels]
    if len(set(ks)) != len(ks):
        raise ValueError(f"duplicate ladder steps in channels {ks}")
    cutoff = layout.dim_of("field") - 1
    terms = []
    rates = []
    for k, gamma_k in channels:
        if gamma_k < 0:
            raise ValueError("Gamma_k must be non-negative")
        mat = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
        mat[k + 1, k] = 1.0
        terms.append(LindbladTerm(gamma_k, ComplexOperator(layout, mat)))
        rates.append(gamma_k)
    return EngineeredDissipator(tuple(terms), tuple(rates), "selective")


def thermal_terms(bath: ThermalBathParams, layout: HilbertLayout) -> list[LindbladTerm]:
    """Natural-environment dissipator: decay at gamma(1+nbar), pumping at gamma*nbar."""
    cutoff = layout.dim_of("field") - 1
    a = annihilation(cutoff)
    down = ComplexOperator(layout, a.entries)
    terms = [LindbladTerm(bath.gamma * (1.0 + bath.n_bar), down)]
    if bath.n_bar > 0:
        terms.append(LindbladTerm(bath.gamma * bath.n_bar, down.dag()))
    return terms


def collision_model_evolve(
    engineered_h: ComplexOperator,
    inj: AtomInjectionParams,
    bath: ThermalBathParams,
    rho0_field: DensityOperator,
    n_atoms: int,
) -> Trajectory:
    """Atom-by-atom micro-simulation of the engineered reservoir.

    Interaction windows of length tau tile time back to back (tau = 1/r);
    the field bath acts during the windows.  Each window attaches a fresh
    atom in the injection state, evolves the joint state under the
    engineered Hamiltonian plus bath, and traces the atom out.
    """
    if n_atoms < 1:
        raise ValueError("need at least one atom")
    field_layout_ = rho0_field.layout
    cutoff = field_layout_.dim_of("field") - 1
    joint = atom_field_layout(2, cutoff)
    if engineered_h.layout != joint:
        raise ValueError("engineered Hamiltonian must act on the 2-level atom x field layout")

    eye2 = np.eye(2, dtype=complex)
    bath_joint = [
        LindbladTerm(t.rate, ComplexOperator(joint, np.kron(eye2, t.jump.entries)))
        for t in thermal_terms(bath, field_layout_)
    ]
    L = liouvillian_matrix(engineered_h, bath_joint).entries
    propagator = scipy.linalg.expm(L * inj.tau)

    atom_amp = inj.atom_state.amplitudes
    rho_atom = np.outer(atom_amp, atom_amp.conj())

    times = [0.0]
    states = [rho0_field]
    leakage = _top_two_population(rho0_field, field_layout_)
    rho_f = rho0_field.entries
    d = joint.dim
    for n in range(1, n_atoms + 1):
        rho_joint = np.kron(rho_atom, rho_f)
        rho_joint = (propagator @ rho_joint.ravel(order="F")).reshape((d, d), order="F")
        reduced = partial_trace(DensityOperator(joint, rho_joint), "field").symmetrized()
        rho_f = reduced.entries / np.real(np.trace(reduced.entries))
        leak = _top_two_population(rho_f, field_layout_)
        leakage = max(leakage, leak)
        if leak >= LEAKAGE_LIMIT:
            raise LeakageError(
                f"top-two Fock population {leak} >= {LEAKAGE_LIMIT} after {n} collisions"
            )
        times.append(n * inj.tau)
        states.append(DensityOperator(field_layout_, rho_f))
    return Trajectory(np.asarray(times), states, leakage)
