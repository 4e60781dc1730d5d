"""Raman interaction models for engineered atom-field couplings.

Builds the full time-dependent multi-branch Raman Hamiltonians, derives
the second-order coupling parameters obtained after adiabatic elimination
of the auxiliary levels, constructs the engineered weighted-ladder
Hamiltonians (upper-bounded, sliced, selective), solves the resonance
conditions for the laser detunings, and checks the validity regime.

All rates are dimensionless multiples of a declared reference rate
(lambda_1 for Hamiltonian-validation scenarios).
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np

from .hilbert import (
    ATOM,
    ComplexOperator,
    HilbertLayout,
    LayoutError,
    annihilation,
    atomic_sigma,
)

Kind = Literal["JC", "AJC"]

AUX_LABELS = ("f", "h", "i", "i2")


class ResonanceError(RuntimeError):
    """The detuning fixed-point iteration failed to converge."""


@dataclass(frozen=True)
class RamanBranch:
    """One Raman branch: a cavity leg and a laser leg through one auxiliary level.

    ``sign_cavity`` / ``sign_laser`` are the signs of the detuning exponents
    e^{i * sign * Delta * t} multiplying the cavity and laser terms.
    """

    lam: float
    omega: float
    delta: float
    delta_tilde: float
    sign_cavity: int
    sign_laser: int
    cavity_transition: tuple[str, str]
    laser_transition: tuple[str, str]

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("cavity coupling lambda must be positive")
        if self.omega < 0:
            raise ValueError("laser coupling omega must be non-negative")
        if self.delta == 0 or self.delta_tilde == 0:
            raise ValueError("detunings must be nonzero")
        if self.sign_cavity not in (-1, 1) or self.sign_laser not in (-1, 1):
            raise ValueError("signs must be +1 or -1")


@dataclass(frozen=True)
class RamanLadderParams:
    """K-branch Raman configuration (K = 2, 3 or 4 auxiliary levels)."""

    branches: tuple[RamanBranch, ...]
    atom_levels: tuple[str, ...]
    kind: Kind = "JC"

    def __post_init__(self):
        k = len(self.branches)
        if k not in (2, 3, 4):
            raise ValueError(f"need 2, 3 or 4 branches, got {k}")
        if len(self.atom_levels) != 2 + k:
            raise ValueError("atom_levels must be (g, e) plus one label per branch")

    @property
    def n_branches(self) -> int:
        return len(self.branches)


def raman_params(
    lambdas,
    omegas,
    deltas,
    delta_tildes,
    kind: Kind = "JC",
) -> RamanLadderParams:
    """Build a standard K-branch configuration.

    Branch 1 carries negative detuning exponents, all further branches
    positive ones.  For JC the cavity drives g <-> aux_j and the laser
    drives e <-> aux_j; AJC interchanges the two roles.
    """
    k = len(lambdas)
    if not (len(omegas) == len(deltas) == len(delta_tildes) == k):
        raise ValueError("parameter lists must have equal length")
    aux = AUX_LABELS[:k]
    branches = []
    for j in range(k):
        sign = -1 if j == 0 else 1
        cavity_lower, laser_lower = ("g", "e") if kind == "JC" else ("e", "g")
        branches.append(
            RamanBranch(
                lam=float(lambdas[j]),
                omega=float(omegas[j]),
                delta=float(deltas[j]),
                delta_tilde=float(delta_tildes[j]),
                sign_cavity=sign,
                sign_laser=sign,
                cavity_transition=(aux[j], cavity_lower),
                laser_transition=(aux[j], laser_lower),
            )
        )
    return RamanLadderParams(tuple(branches), ("g", "e") + aux, kind)


@dataclass(frozen=True)
class DerivedCouplings:
    """Second-order couplings of the effective ladder interaction.

    chi and varpi are the cavity- and laser-induced level shifts from the
    first two branches; chi_tilde and omega_shift collect the same shifts
    from branches 3+ (zero for two branches).  zeta are the Raman ladder
    couplings and theta the engineered detunings.
    """

    chi: float
    chi_tilde: float
    varpi: float
    omega_shift: float
    zeta: tuple[complex, ...]
    theta: tuple[float, ...]

    @property
    def chi_eff(self) -> float:
        return self.chi - self.chi_tilde

    def xi(self, n: int) -> float:
        return (n + 1) * self.chi - self.varpi

    def big_xi(self, n: int) -> float:
        return self.xi(n) - (n + 1) * self.chi_tilde + self.omega_shift

    def phi(self, n: int, j: int) -> float:
        """Ladder-step detuning from the two-branch shifts (j is 1-based)."""
        return self.xi(n) + self.theta[j - 1]

    def big_phi(self, n: int, j: int) -> float:
        """Ladder-step detuning including the branch-3+ shifts (j is 1-based)."""
        return self.big_xi(n) + self.theta[j - 1]

    def zeta_n(self, n: int, j: int) -> complex:
        return np.sqrt(n + 1) * self.zeta[j - 1]


def derive_couplings(params: RamanLadderParams) -> DerivedCouplings:
    """Evaluate the adiabatic-elimination couplings from the raw drive parameters."""
    b = params.branches
    chi = b[0].lam ** 2 / b[0].delta - b[1].lam ** 2 / b[1].delta
    varpi = b[0].omega ** 2 / b[0].delta_tilde - b[1].omega ** 2 / b[1].delta_tilde
    chi_tilde = sum(br.lam ** 2 / br.delta for br in b[2:])
    omega_shift = sum(br.omega ** 2 / br.delta_tilde for br in b[2:])
    zeta = tuple(
        complex((br.lam * br.omega / 2.0) * (1.0 / br.delta + 1.0 / br.delta_tilde))
        for br in b
    )
    theta = tuple(
        (-1 if j == 0 else 1) * (br.delta_tilde - br.delta) for j, br in enumerate(b)
    )
    return DerivedCouplings(chi, chi_tilde, varpi, omega_shift, zeta, theta)


# ---------------------------------------------------------------------------
# full time-dependent Hamiltonian


class TimeDependentHamiltonian:
    """H(t) = sum_k c_k e^{i w_k t} T_k + H.c. over a fixed layout."""

    def __init__(self, layout: HilbertLayout, terms: list[tuple[complex, float, np.ndarray]]):
        self.layout = layout
        self.terms = [(complex(c), float(w), np.ascontiguousarray(m)) for c, w, m in terms]

    def matrix(self, t: float) -> np.ndarray:
        h = np.zeros((self.layout.dim, self.layout.dim), dtype=complex)
        for c, w, m in self.terms:
            h += (c * cmath.exp(1j * w * t)) * m
        return h + h.conj().T

    def __call__(self, t: float) -> ComplexOperator:
        return ComplexOperator(self.layout, self.matrix(t))

    def apply(self, t: float, psi: np.ndarray) -> np.ndarray:
        out = np.zeros_like(psi)
        for c, w, m in self.terms:
            phase = c * cmath.exp(1j * w * t)
            out += phase * (m @ psi)
            out += np.conj(phase) * (m.conj().T @ psi)
        return out


def build_full_hamiltonian(
    params: RamanLadderParams, layout: HilbertLayout
) -> TimeDependentHamiltonian:
    """Full multi-branch Raman Hamiltonian in the interaction picture."""
    if layout.dim_of(ATOM) != 2 + params.n_branches:
        raise LayoutError(
            f"atom factor dim {layout.dim_of(ATOM)} != {2 + params.n_branches}"
        )
    cutoff = layout.dim_of("field") - 1
    a = annihilation(cutoff)
    terms = []
    for br in params.branches:
        sig_c = atomic_sigma(*br.cavity_transition, params.atom_levels)
        sig_l = atomic_sigma(*br.laser_transition, params.atom_levels)
        cav = np.kron(sig_c.entries, a.entries)
        las = np.kron(sig_l.entries, np.eye(cutoff + 1))
        terms.append((br.lam, br.sign_cavity * br.delta, cav))
        terms.append((br.omega, br.sign_laser * br.delta_tilde, las))
    return TimeDependentHamiltonian(layout, terms)


# ---------------------------------------------------------------------------
# engineered ladders


@dataclass(frozen=True)
class LadderSpec:
    """Weighted Fock ladder A^dag = sum_i w_i |M+i+1><M+i| with w_0 = 1."""

    base: int
    weights: tuple[complex, ...]
    zeta_ref: complex
    kind: Kind = "JC"

    def __post_init__(self):
        if self.base < 0:
            raise ValueError("ladder base must be non-negative")
        if not 1 <= len(self.weights) <= 4:
            raise ValueError("ladder must have 1 to 4 steps")
        if self.weights[0] != 1:
            raise ValueError("first ladder weight must be exactly 1")
        object.__setattr__(self, "weights", tuple(complex(w) for w in self.weights))
        object.__setattr__(self, "zeta_ref", complex(self.zeta_ref))

    @property
    def steps(self) -> int:
        return len(self.weights)

    @property
    def top(self) -> int:
        """Fock index of the dark state at the top of the ladder."""
        return self.base + self.steps


def ladder_operator(spec: LadderSpec, cutoff: int) -> ComplexOperator:
    """The raising field operator A^dag of a ladder on a single field factor."""
    if cutoff < spec.top:
        raise ValueError(f"cutoff {cutoff} too small for ladder top {spec.top}")
    mat = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    for i, w in enumerate(spec.weights):
        mat[spec.base + i + 1, spec.base + i] = w
    return ComplexOperator(HilbertLayout((("field", cutoff + 1),)), mat)


def build_engineered_hamiltonian(spec: LadderSpec, layout: HilbertLayout) -> ComplexOperator:
    """Static engineered Hamiltonian zeta_ref sigma_ge A^dag + H.c. (sigma_eg for AJC).

    The atom factor uses the convention index 0 = g, index 1 = e.
    """
    atom_dim = layout.dim_of(ATOM)
    if atom_dim < 2:
        raise LayoutError("atom factor must contain levels g and e")
    cutoff = layout.dim_of("field") - 1
    if cutoff < spec.top + 2:
        raise ValueError(f"cutoff {cutoff} < ladder top {spec.top} + 2")
    sig = np.zeros((atom_dim, atom_dim), dtype=complex)
    if spec.kind == "JC":
        sig[0, 1] = 1.0  # |g><e|
    else:
        sig[1, 0] = 1.0  # |e><g|
    adag = ladder_operator(spec, cutoff).entries
    half = spec.zeta_ref * np.kron(sig, adag)
    return ComplexOperator(layout, half + half.conj().T)


def ladder_from_conditions(
    derived: DerivedCouplings,
    mode: Literal["upper-bounded", "sliced"],
    base: int,
    steps: int,
) -> LadderSpec:
    """Ladder weights selected by the resonance conditions.

    Step i+1 is carried by branch i+1, so w_i = zeta^(i+1)_{M+i} / zeta^(1)_M.
    """
    if steps != len(derived.zeta):
        raise ValueError(f"steps {steps} != number of branches {len(derived.zeta)}")
    if mode == "upper-bounded" and base != 0:
        raise ValueError("upper-bounded ladders start at the vacuum (base 0)")
    if derived.zeta[0] == 0:
        raise ValueError("zeta_1 vanishes; no reference coupling")
    zeta_ref = derived.zeta_n(base, 1)
    weights = (1.0,) + tuple(
        derived.zeta_n(base + i, i + 1) / zeta_ref for i in range(1, steps)
    )
    return LadderSpec(base=base, weights=weights, zeta_ref=zeta_ref)


# ---------------------------------------------------------------------------
# resonance solving and regime checks

RESONANCE_DAMPING = 0.5
RESONANCE_MAX_ITER = 200
RESONANCE_REL_TOL = 1e-12


def solve_resonance(params: RamanLadderParams, base: int) -> RamanLadderParams:
    """Adjust the K laser detunings so every ladder-step resonance closes.

    Branch j must satisfy big_phi(base + j - 1, j) = 0.  The required
    theta_j depends on the laser detunings through the laser level shifts,
    so the update is iterated (damped fixed point) to convergence.
    """
    current = params
    residuals: list[float] = []
    for _ in range(RESONANCE_MAX_ITER):
        derived = derive_couplings(current)
        new_branches = []
        for j, br in enumerate(current.branches):
            theta_req = -derived.big_xi(base + j)
            # theta_1 = Delta_1 - Delta~_1; theta_j = Delta~_j - Delta_j for j >= 2
            target = br.delta - theta_req if j == 0 else br.delta + theta_req
            updated = (1 - RESONANCE_DAMPING) * br.delta_tilde + RESONANCE_DAMPING * target
            new_branches.append(replace(br, delta_tilde=updated))
        current = replace(current, branches=tuple(new_branches))
        derived = derive_couplings(current)
        scale = abs(derived.chi_eff)
        residuals = [
            abs(derived.big_phi(base + j, j + 1)) for j in range(current.n_branches)
        ]
        if max(residuals) <= 1e-10 * scale:
            return current
    raise ResonanceError(
        f"no convergence after {RESONANCE_MAX_ITER} iterations "
        f"(residuals {residuals}); the parameter point is likely unphysical"
    )


@dataclass(frozen=True)
class RegimeEntry:
    name: str
    ratio: float
    threshold: float

    @property
    def ok(self) -> bool:
        return self.ratio >= self.threshold


@dataclass(frozen=True)
class RegimeReport:
    entries: tuple[RegimeEntry, ...]
    residuals: tuple[tuple[str, float], ...]

    @property
    def passed(self) -> bool:
        return all(e.ok for e in self.entries)

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "entries": [
                {"name": e.name, "ratio": e.ratio, "threshold": e.threshold, "pass": e.ok}
                for e in self.entries
            ],
            "residuals": [{"label": k, "value": v} for k, v in self.residuals],
        }


def _ratio(big: float, small: float) -> float:
    return float("inf") if small == 0 else float(abs(big) / abs(small))


def check_regime(
    params: RamanLadderParams,
    derived: DerivedCouplings,
    base: int,
    steps: int,
    n_bar: float = 0.0,
    threshold: float = 10.0,
    hierarchy_threshold: float = 1.0,
) -> RegimeReport:
    """Validity-regime report for the adiabatic elimination and the RWA.

    Both orientations of the elimination inequalities are reported (the
    primary one pairs lambda with Delta and Omega with Delta~; the ``alt``
    entries pair them the other way round).  ``threshold`` governs the
    elimination ratios; the coupling-hierarchy (RWA) ratios have their own
    ``hierarchy_threshold`` since their natural scale is weaker.
    """
    entries = []
    root = np.sqrt(n_bar + 1.0)
    for j, br in enumerate(params.branches, start=1):
        entries.append(
            RegimeEntry(f"Delta{j}/(sqrt(nbar+1)*lambda{j})", _ratio(br.delta, root * br.lam), threshold)
        )
        entries.append(RegimeEntry(f"Dtilde{j}/Omega{j}", _ratio(br.delta_tilde, br.omega), threshold))
        entries.append(
            RegimeEntry(
                f"Dtilde{j}/(sqrt(nbar+1)*lambda{j}) [alt]",
                _ratio(br.delta_tilde, root * br.lam),
                threshold,
            )
        )
        entries.append(RegimeEntry(f"Delta{j}/Omega{j} [alt]", _ratio(br.delta, br.omega), threshold))
    for j in range(1, steps + 1):
        small = abs(derived.zeta_n(base + j, j))
        entries.append(
            RegimeEntry(
                f"|chi_eff|/|zeta^{j}_{base + j}|",
                _ratio(derived.chi_eff, small),
                hierarchy_threshold,
            )
        )
    residuals = tuple(
        (f"big_phi({base + j},{j + 1})", derived.big_phi(base + j, j + 1))
        for j in range(steps)
    )
    return RegimeReport(tuple(entries), residuals)


# ---------------------------------------------------------------------------
# selective interaction


@dataclass(frozen=True)
class SelectiveRamanParams:
    """Three-level selective Raman configuration (one cavity leg, two lasers)."""

    lam: complex
    omega1: complex
    omega2: complex
    delta: float
    delta1: float
    delta2: float

    def __post_init__(self):
        if self.delta == 0 or self.delta1 == 0 or self.delta2 == 0:
            raise ValueError("detunings must be nonzero")

    @property
    def xi(self) -> float:
        return abs(self.lam) ** 2 / self.delta

    @property
    def varpi_g(self) -> float:
        return abs(self.omega1) ** 2 / self.delta1

    @property
    def varpi_e(self) -> float:
        return abs(self.omega2) ** 2 / self.delta2

    @property
    def zeta(self) -> complex:
        return np.conj(self.lam) * self.omega2 * (1.0 / self.delta + 1.0 / self.delta2) / 2.0

    @property
    def small_delta(self) -> float:
        return self.delta - self.delta2

    def phi(self, n: int) -> float:
        return (n + 1) * self.xi + self.small_delta - self.varpi_g - self.varpi_e


def derive_selective(params: SelectiveRamanParams, k: int) -> SelectiveRamanParams:
    """Enforce selectivity of the n = k ladder step.

    Sets |Omega_1| = sqrt((k+1) Delta_1 / Delta) |lambda| so the laser shift
    on g cancels the (k+1)-photon cavity shift, and moves Delta_2 so the
    residual detuning equals the laser shift on e.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    arg = (k + 1) * params.delta1 / params.delta
    if arg < 0:
        raise ValueError("Delta_1 and Delta must have the same sign")
    omega1_mag = np.sqrt(arg) * abs(params.lam)
    disc = params.delta ** 2 - 4.0 * abs(params.omega2) ** 2
    if disc < 0:
        raise ValueError("Delta too small to place delta = varpi_e")
    delta2 = 0.5 * (params.delta + np.sqrt(disc))
    phase = params.omega1 / abs(params.omega1) if params.omega1 != 0 else 1.0
    out = replace(params, omega1=phase * omega1_mag, delta2=float(delta2))
    if abs(out.phi(k)) > 1e-10 * abs(out.xi):
        raise ResonanceError(f"selectivity residual phi_{k} = {out.phi(k)} too large")
    return out


def selective_ladder(params: SelectiveRamanParams, k: int) -> LadderSpec:
    """One-step ladder |k+1><k| with coupling zeta_k = sqrt(k+1) zeta."""
    return LadderSpec(base=k, weights=(1.0,), zeta_ref=np.sqrt(k + 1) * params.zeta)


# ---------------------------------------------------------------------------
# closed-form validation curves

ANALYTIC_PRESETS = ("fig2a", "fig2b", "fig3a", "fig3b")


def analytic_probabilities(preset: str, x) -> dict[int, np.ndarray]:
    """Closed-form Fock probabilities of the engineered validation scenarios.

    ``x`` is the dimensionless interaction parameter (ladder reference
    coupling times time).  Probabilities of unlisted Fock indices vanish.
    """
    x = np.asarray(x, dtype=float)
    s2 = np.sin(x) ** 2
    c2 = np.cos(x) ** 2
    quarter = (1.0 + c2) / 4.0
    if preset == "fig2a":
        return {0: quarter, 1: s2 / 2.0, 2: quarter}
    if preset == "fig2b":
        return {3: quarter, 4: s2 / 2.0, 5: quarter}
    if preset == "fig3a":
        return {0: s2 / 4.0, 1: c2 / 2.0, 2: s2 / 2.0, 3: quarter}
    if preset == "fig3b":
        return {3: quarter, 4: s2 / 4.0, 5: s2 / 4.0, 6: quarter}
    raise ValueError(f"unknown analytic preset {preset!r}; have {ANALYTIC_PRESETS}")
