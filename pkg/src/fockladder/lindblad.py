"""Propagation of state vectors and density operators, Liouvillians, steady states.

Schroedinger and Lindblad dynamics are integrated with an adaptive
embedded Runge-Kutta scheme (DOP853 by default); the density operator is
propagated in matrix form and re-symmetrized only at the output samples.
The vectorized Liouvillian (column-stacking convention) exists for
steady-state extraction and structural checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.integrate import solve_ivp

from .hilbert import (
    ComplexOperator,
    DensityOperator,
    HilbertLayout,
    LayoutError,
    StateVector,
)
from .raman import TimeDependentHamiltonian

LEAKAGE_LIMIT = 1e-6
TRACE_DRIFT_LIMIT = 1e-8
NEGATIVITY_LIMIT = 1e-7

# Internal safety factor on the solver tolerances: the global error
# accumulated over long grids must stay within the advertised drift
# bounds, which are stated against the *requested* tolerances.
_TOL_SAFETY = 0.02


class LeakageError(RuntimeError):
    """Truncation guard: population reached the top of the Fock cutoff."""


class IntegrationError(RuntimeError):
    """The ODE solver failed or violated its conservation contract."""


class DegenerateSteadyStateError(RuntimeError):
    """The Liouvillian null space has dimension > 1."""

    def __init__(self, dimension: int):
        self.dimension = dimension
        super().__init__(f"steady-state manifold has dimension {dimension}")


@dataclass(frozen=True)
class TimeGrid:
    """Output sampling grid; internal integration steps remain adaptive."""

    t_start: float
    t_end: float
    samples: int

    def __post_init__(self):
        if self.t_end <= self.t_start:
            raise ValueError("t_end must exceed t_start")
        if self.samples < 2:
            raise ValueError("need at least 2 samples")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.samples)


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-11
    max_step: float = np.inf
    method: str = "DOP853"

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class LindbladTerm:
    rate: float
    jump: ComplexOperator

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError("dissipation rate must be non-negative")


@dataclass(frozen=True)
class LiouvillianMatrix:
    """d^2 x d^2 generator under the column-stacking convention vec(A rho B) = (B^T (x) A) vec(rho)."""

    entries: np.ndarray
    layout: HilbertLayout
    vectorization: str = "column-stacking"


@dataclass
class Trajectory:
    times: np.ndarray
    states: list
    leakage: float


def _top_two_population(state, layout: HilbertLayout) -> float:
    """Summed population of the two highest Fock levels of the field factor."""
    if "field" not in layout.labels:
        return 0.0
    dims = layout.dims
    axis = layout.axis("field")
    if isinstance(state, np.ndarray) and state.ndim == 1:
        probs = np.abs(state.reshape(dims)) ** 2
        pops = probs.sum(axis=tuple(i for i in range(len(dims)) if i != axis))
    else:
        mat = state if isinstance(state, np.ndarray) else state.entries
        diag = np.real(np.diag(mat)).reshape(dims)
        pops = diag.sum(axis=tuple(i for i in range(len(dims)) if i != axis))
    return float(pops[-1] + pops[-2])


def _hamiltonian_applier(H, layout: HilbertLayout):
    """Normalize the accepted Hamiltonian forms to a fast (t, vec) -> vec closure."""
    if H is None:
        return None
    if isinstance(H, TimeDependentHamiltonian):
        if H.layout != layout:
            raise LayoutError("Hamiltonian layout mismatch")
        return H.apply
    if isinstance(H, ComplexOperator):
        if H.layout != layout:
            raise LayoutError("Hamiltonian layout mismatch")
        mat = H.entries

        def apply_static(t, psi):
            return mat @ psi

        return apply_static
    if callable(H):

        def apply_callable(t, psi):
            op = H(t)
            mat = op.entries if isinstance(op, ComplexOperator) else np.asarray(op)
            return mat @ psi

        return apply_callable
    raise TypeError(f"unsupported Hamiltonian type {type(H)!r}")


def _hamiltonian_matrix(H, layout: HilbertLayout, t: float = 0.0) -> np.ndarray | None:
    if H is None:
        return None
    if isinstance(H, TimeDependentHamiltonian):
        return H.matrix(t)
    if isinstance(H, ComplexOperator):
        return H.entries
    op = H(t)
    return op.entries if isinstance(op, ComplexOperator) else np.asarray(op)


def evolve_state(
    H,
    psi0: StateVector,
    grid: TimeGrid,
    cfg: IntegratorConfig = IntegratorConfig(),
) -> Trajectory:
    """Integrate i dpsi/dt = H(t) psi (hbar = 1) over the sampling grid."""
    layout = psi0.layout
    apply_h = _hamiltonian_applier(H, layout)
    times = grid.times

    if apply_h is None:
        states = [psi0 for _ in times]
        return Trajectory(times, states, _top_two_population(psi0.amplitudes, layout))

    def rhs(t, psi):
        return -1j * apply_h(t, psi)

    sol = solve_ivp(
        rhs,
        (times[0], times[-1]),
        psi0.amplitudes.astype(complex),
        method=cfg.method,
        t_eval=times,
        rtol=_TOL_SAFETY * cfg.rel_tol,
        atol=_TOL_SAFETY * cfg.abs_tol,
        max_step=cfg.max_step,
    )
    if not sol.success:
        raise IntegrationError(f"state integration failed: {sol.message}")

    states = []
    leakage = 0.0
    for k in range(sol.y.shape[1]):
        amps = sol.y[:, k]
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 10.0 * cfg.rel_tol:
            raise IntegrationError(f"norm drift {abs(norm - 1.0)} exceeds 10*rel_tol")
        leak = _top_two_population(amps, layout)
        leakage = max(leakage, leak)
        if leak >= LEAKAGE_LIMIT:
            raise LeakageError(
                f"top-two Fock population {leak} >= {LEAKAGE_LIMIT}; raise the cutoff"
            )
        states.append(StateVector(layout, amps / norm))
    return Trajectory(times, states, leakage)


def evolve_density(
    H,
    terms: list[LindbladTerm],
    rho0: DensityOperator,
    grid: TimeGrid,
    cfg: IntegratorConfig = IntegratorConfig(),
) -> Trajectory:
    """Integrate the Lindblad master equation in matrix form.

    rho_dot = -i[H, rho] + sum_k (rate_k/2)(2 J rho J^dag - J^dag J rho - rho J^dag J).
    """
    layout = rho0.layout
    d = layout.dim
    static_h = None
    hmat_fn = None
    if isinstance(H, ComplexOperator):
        if H.layout != layout:
            raise LayoutError("Hamiltonian layout mismatch")
        static_h = H.entries
    elif H is not None:
        hmat_fn = lambda t: _hamiltonian_matrix(H, layout, t)

    jumps = []
    for term in terms:
        if term.jump.layout != layout:
            raise LayoutError("jump operator layout mismatch")
        j = term.jump.entries
        jumps.append((term.rate, j, j.conj().T, j.conj().T @ j))

    times = grid.times
    if static_h is None and hmat_fn is None and not jumps:
        return Trajectory(
            times, [rho0 for _ in times], _top_two_population(rho0, layout)
        )

    def rhs(t, flat):
        rho = flat.reshape(d, d)
        out = np.zeros_like(rho)
        hm = static_h if static_h is not None else (hmat_fn(t) if hmat_fn else None)
        if hm is not None:
            out += -1j * (hm @ rho - rho @ hm)
        for rate, j, jd, jdj in jumps:
            out += (rate / 2.0) * (2.0 * (j @ rho @ jd) - jdj @ rho - rho @ jdj)
        return out.ravel()

    sol = solve_ivp(
        rhs,
        (times[0], times[-1]),
        rho0.entries.astype(complex).ravel(),
        method=cfg.method,
        t_eval=times,
        rtol=_TOL_SAFETY * cfg.rel_tol,
        atol=_TOL_SAFETY * cfg.abs_tol,
        max_step=cfg.max_step,
    )
    if not sol.success:
        raise IntegrationError(f"density integration failed: {sol.message}")

    states = []
    leakage = 0.0
    for k in range(sol.y.shape[1]):
        rho = sol.y[:, k].reshape(d, d)
        rho = 0.5 * (rho + rho.conj().T)
        tr = float(np.real(np.trace(rho)))
        if abs(tr - 1.0) > TRACE_DRIFT_LIMIT:
            raise IntegrationError(f"trace drift {abs(tr - 1.0)} exceeds {TRACE_DRIFT_LIMIT}")
        lam_min = float(np.min(np.linalg.eigvalsh(rho)))
        if lam_min < -NEGATIVITY_LIMIT:
            raise IntegrationError(
                f"negative eigenvalue {lam_min}; truncation or step failure"
            )
        leak = _top_two_population(rho, layout)
        leakage = max(leakage, leak)
        if leak >= LEAKAGE_LIMIT:
            raise LeakageError(
                f"top-two Fock population {leak} >= {LEAKAGE_LIMIT}; raise the cutoff"
            )
        states.append(DensityOperator(layout, rho))
    return Trajectory(times, states, leakage)


def liouvillian_matrix(H, terms: list[LindbladTerm]) -> LiouvillianMatrix:
    """Vectorized generator: L vec(rho) = vec(rho_dot), columns stacked."""
    if H is None and not terms:
        raise ValueError("need a Hamiltonian or at least one dissipator")
    layout = H.layout if isinstance(H, ComplexOperator) else terms[0].jump.layout
    d = layout.dim
    eye = np.eye(d)
    L = np.zeros((d * d, d * d), dtype=complex)
    if H is not None:
        if not isinstance(H, ComplexOperator):
            raise TypeError("liouvillian_matrix requires a static Hamiltonian")
        hm = H.entries
        L += -1j * (np.kron(eye, hm) - np.kron(hm.T, eye))
    for term in terms:
        if term.jump.layout != layout:
            raise LayoutError("jump operator layout mismatch")
        j = term.jump.entries
        jd = j.conj().T
        jdj = jd @ j
        L += (term.rate / 2.0) * (
            2.0 * np.kron(j.conj(), j) - np.kron(eye, jdj) - np.kron(jdj.T, eye)
        )
    return LiouvillianMatrix(L, layout)


def steady_state(L: LiouvillianMatrix) -> DensityOperator:
    """Unique null-space density operator of a trace-preserving Liouvillian."""
    mat = L.entries
    d = L.layout.dim
    norm = np.linalg.norm(mat, ord=2)
    eigvals, eigvecs = scipy.linalg.eig(mat)
    order = np.argsort(np.abs(eigvals))
    lam_min = abs(eigvals[order[0]])
    if lam_min > 1e-9 * norm:
        raise IntegrationError(
            f"no null eigenvalue: smallest |lambda| = {lam_min}, |L| = {norm}"
        )
    if len(order) > 1 and abs(eigvals[order[1]]) <= 1e-9 * norm:
        dim = int(np.sum(np.abs(eigvals) <= 1e-9 * norm))
        raise DegenerateSteadyStateError(dim)
    vec = eigvecs[:, order[0]]
    if lam_min > 1e-12 * norm:
        # one inverse-iteration refinement about the located eigenvalue
        shifted = mat - eigvals[order[0]] * np.eye(mat.shape[0])
        refined, *_ = np.linalg.lstsq(shifted, vec, rcond=None)
        n = np.linalg.norm(refined)
        if n > 0:
            vec = refined / n
    rho = vec.reshape((d, d), order="F")
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho)
    if abs(tr) < 1e-12:
        raise IntegrationError("null vector is traceless; not a steady state")
    return DensityOperator(L.layout, rho / tr)
