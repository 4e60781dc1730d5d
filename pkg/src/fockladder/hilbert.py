"""Complex linear algebra on truncated tensor-product Hilbert spaces.

Operators, state vectors and density operators live on a declared
:class:`HilbertLayout` of tensor factors.  The convention throughout is
atom factor first, field factor second (the atom index varies slowest),
so serialized states are reproducible.  All values are immutable after
construction; every operation returns a new value.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

ATOM = "atom"
FIELD = "field"

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-8
POSITIVITY_TOL = 1e-9
NORM_TOL = 1e-9


class LayoutError(ValueError):
    """Mismatched or unknown tensor factors."""


class StateValidityError(ValueError):
    """A state or density operator violates its defining invariants."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(arr, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class HilbertLayout:
    """Ordered tensor factors (label, dimension) of a product space."""

    factors: tuple[tuple[str, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple((str(l), int(d)) for l, d in self.factors))
        labels = [l for l, _ in self.factors]
        if len(set(labels)) != len(labels):
            raise LayoutError(f"duplicate factor labels in {labels}")
        for label, d in self.factors:
            if d < 2:
                raise LayoutError(f"factor {label!r} has dimension {d} < 2")

    @property
    def dim(self) -> int:
        return int(np.prod([d for _, d in self.factors]))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(l for l, _ in self.factors)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d for _, d in self.factors)

    def axis(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise LayoutError(f"unknown factor {label!r}; have {self.labels}") from None

    def dim_of(self, label: str) -> int:
        return self.dims[self.axis(label)]

    def __mul__(self, other: "HilbertLayout") -> "HilbertLayout":
        return HilbertLayout(self.factors + other.factors)


def atom_field_layout(atom_dim: int, cutoff: int) -> HilbertLayout:
    """Standard atom (x) field layout with Fock cutoff ``cutoff``."""
    return HilbertLayout(((ATOM, atom_dim), (FIELD, cutoff + 1)))


def field_layout(cutoff: int) -> HilbertLayout:
    return HilbertLayout(((FIELD, cutoff + 1),))


@dataclass(frozen=True)
class ComplexOperator:
    """Dense complex matrix acting on a declared layout."""

    layout: HilbertLayout
    entries: np.ndarray

    def __post_init__(self):
        mat = _frozen(np.asarray(self.entries))
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise LayoutError(f"operator entries must be square, got {mat.shape}")
        if mat.shape[0] != self.layout.dim:
            raise LayoutError(
                f"operator dimension {mat.shape[0]} != layout dimension {self.layout.dim}"
            )
        object.__setattr__(self, "entries", mat)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def dag(self) -> "ComplexOperator":
        return ComplexOperator(self.layout, self.entries.conj().T)

    def is_hermitian(self, tol: float = HERMITICITY_TOL) -> bool:
        return bool(np.max(np.abs(self.entries - self.entries.conj().T)) <= tol)

    def __add__(self, other: "ComplexOperator") -> "ComplexOperator":
        self._check_layout(other)
        return ComplexOperator(self.layout, self.entries + other.entries)

    def __sub__(self, other: "ComplexOperator") -> "ComplexOperator":
        self._check_layout(other)
        return ComplexOperator(self.layout, self.entries - other.entries)

    def __mul__(self, scalar: complex) -> "ComplexOperator":
        return ComplexOperator(self.layout, self.entries * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "ComplexOperator":
        return self * (-1.0)

    def __matmul__(self, other: "ComplexOperator") -> "ComplexOperator":
        self._check_layout(other)
        return ComplexOperator(self.layout, self.entries @ other.entries)

    def _check_layout(self, other: "ComplexOperator") -> None:
        if other.layout != self.layout:
            raise LayoutError("operator layouts differ")


@dataclass(frozen=True)
class StateVector:
    """Normalized pure state on a layout."""

    layout: HilbertLayout
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(np.asarray(self.amplitudes).ravel())
        if amps.shape[0] != self.layout.dim:
            raise LayoutError(
                f"state dimension {amps.shape[0]} != layout dimension {self.layout.dim}"
            )
        if abs(np.linalg.norm(amps) - 1.0) > NORM_TOL:
            raise StateValidityError(f"state norm {np.linalg.norm(amps)} != 1")
        object.__setattr__(self, "amplitudes", amps)

    def to_density(self) -> "DensityOperator":
        return DensityOperator(self.layout, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityOperator:
    """Density matrix on a layout.

    Construction does not validate; call :meth:`validate` to assert the
    Hermiticity / unit-trace / positivity invariants.
    """

    layout: HilbertLayout
    entries: np.ndarray

    def __post_init__(self):
        mat = _frozen(np.asarray(self.entries))
        if mat.ndim != 2 or mat.shape != (self.layout.dim, self.layout.dim):
            raise LayoutError(
                f"density matrix shape {mat.shape} incompatible with layout dim {self.layout.dim}"
            )
        object.__setattr__(self, "entries", mat)

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def validate(self) -> "DensityOperator":
        herm = np.max(np.abs(self.entries - self.entries.conj().T))
        if herm > HERMITICITY_TOL:
            raise StateValidityError(f"density matrix not Hermitian: max deviation {herm}")
        tr = self.trace
        if abs(tr - 1.0) > TRACE_TOL:
            raise StateValidityError(f"density matrix trace {tr} != 1")
        lam_min = float(np.min(np.linalg.eigvalsh(self.entries)))
        if lam_min < -POSITIVITY_TOL:
            raise StateValidityError(f"density matrix has eigenvalue {lam_min} < 0")
        return self

    def symmetrized(self) -> "DensityOperator":
        return DensityOperator(self.layout, 0.5 * (self.entries + self.entries.conj().T))


# ---------------------------------------------------------------------------
# operator constructors


def identity(layout: HilbertLayout) -> ComplexOperator:
    return ComplexOperator(layout, np.eye(layout.dim, dtype=complex))


def annihilation(cutoff: int) -> ComplexOperator:
    """Bosonic annihilation operator a on Fock states |0..cutoff>."""
    if cutoff < 1:
        raise ValueError(f"cutoff must be >= 1, got {cutoff}")
    a = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    for n in range(1, cutoff + 1):
        a[n - 1, n] = np.sqrt(n)
    return ComplexOperator(field_layout(cutoff), a)


def number_operator(cutoff: int) -> ComplexOperator:
    a = annihilation(cutoff)
    return a.dag() @ a


def fock_projector(m: int, n: int, cutoff: int) -> ComplexOperator:
    """Field transition operator |m><n| on a single field factor."""
    if not (0 <= m <= cutoff and 0 <= n <= cutoff):
        raise ValueError(f"Fock indices ({m}, {n}) out of range for cutoff {cutoff}")
    mat = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    mat[m, n] = 1.0
    return ComplexOperator(field_layout(cutoff), mat)


def atomic_sigma(r: str, s: str, levels: tuple[str, ...]) -> ComplexOperator:
    """Atomic transition operator |r><s| over an ordered level list."""
    levels = tuple(levels)
    for label in (r, s):
        if label not in levels:
            raise ValueError(f"unknown atomic level {label!r}; have {levels}")
    d = len(levels)
    mat = np.zeros((d, d), dtype=complex)
    mat[levels.index(r), levels.index(s)] = 1.0
    return ComplexOperator(HilbertLayout(((ATOM, d),)), mat)


def tensor(a: ComplexOperator, b: ComplexOperator) -> ComplexOperator:
    """Kronecker product; the layout is the concatenated factor list."""
    return ComplexOperator(a.layout * b.layout, np.kron(a.entries, b.entries))


def embed(op: ComplexOperator, layout: HilbertLayout, label: str) -> ComplexOperator:
    """Promote a single-factor operator to ``layout`` by padding with identities."""
    if len(op.layout.factors) != 1:
        raise LayoutError("embed expects a single-factor operator")
    axis = layout.axis(label)
    if op.dim != layout.dims[axis]:
        raise LayoutError(
            f"operator dim {op.dim} != dim {layout.dims[axis]} of factor {label!r}"
        )
    mats = [
        op.entries if i == axis else np.eye(d, dtype=complex)
        for i, d in enumerate(layout.dims)
    ]
    return ComplexOperator(layout, reduce(np.kron, mats))


# ---------------------------------------------------------------------------
# state constructors


def fock_state(n: int, cutoff: int) -> StateVector:
    if not 0 <= n <= cutoff:
        raise ValueError(f"Fock index {n} out of range for cutoff {cutoff}")
    amps = np.zeros(cutoff + 1, dtype=complex)
    amps[n] = 1.0
    return StateVector(field_layout(cutoff), amps)


def field_superposition(amplitudes: dict[int, complex], cutoff: int) -> StateVector:
    """Normalized superposition of Fock states from an index -> amplitude map."""
    amps = np.zeros(cutoff + 1, dtype=complex)
    for n, c in amplitudes.items():
        if not 0 <= int(n) <= cutoff:
            raise ValueError(f"Fock index {n} out of range for cutoff {cutoff}")
        amps[int(n)] = c
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise ValueError("all amplitudes vanish")
    return StateVector(field_layout(cutoff), amps / norm)


def atom_state(amplitudes: dict[str, complex], levels: tuple[str, ...]) -> StateVector:
    amps = np.zeros(len(levels), dtype=complex)
    for label, c in amplitudes.items():
        if label not in levels:
            raise ValueError(f"unknown atomic level {label!r}; have {levels}")
        amps[levels.index(label)] = c
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise ValueError("all amplitudes vanish")
    return StateVector(HilbertLayout(((ATOM, len(levels)),)), amps / norm)


def product_state(*states: StateVector) -> StateVector:
    layout = reduce(lambda a, b: a * b, (s.layout for s in states))
    amps = reduce(np.kron, (s.amplitudes for s in states))
    return StateVector(layout, amps)


def coherent_state(alpha: complex, cutoff: int) -> StateVector:
    """Truncated coherent state |alpha>, renormalized on the cutoff."""
    from scipy.special import gammaln

    if alpha == 0:
        return fock_state(0, cutoff)
    n = np.arange(cutoff + 1)
    amps = np.exp(n * np.log(complex(alpha)) - 0.5 * gammaln(n + 1.0))
    amps = np.asarray(amps, dtype=complex)
    amps /= np.linalg.norm(amps)
    return StateVector(field_layout(cutoff), amps)


def thermal_state(n_bar: float, cutoff: int) -> DensityOperator:
    """Truncated Bose-Einstein thermal field state, renormalized on the cutoff."""
    if n_bar < 0:
        raise ValueError("n_bar must be non-negative")
    if n_bar == 0:
        pops = np.zeros(cutoff + 1)
        pops[0] = 1.0
    else:
        n = np.arange(cutoff + 1)
        pops = (n_bar / (1.0 + n_bar)) ** n / (1.0 + n_bar)
        pops /= pops.sum()
    return DensityOperator(field_layout(cutoff), np.diag(pops).astype(complex))


# ---------------------------------------------------------------------------
# contractions


def partial_trace(rho: DensityOperator, keep: str) -> DensityOperator:
    """Reduced density operator on the kept factor (all others traced out)."""
    layout = rho.layout
    axis = layout.axis(keep)
    dims = layout.dims
    tens = rho.entries.reshape(dims + dims)
    n = len(dims)
    while n > 1:
        t = n - 1 if axis != n - 1 else n - 2
        tens = np.trace(tens, axis1=t, axis2=t + n)
        if t < axis:
            axis -= 1
        n -= 1
    kept = HilbertLayout((layout.factors[layout.axis(keep)],))
    return DensityOperator(kept, tens)


def expectation(op: ComplexOperator, state: StateVector | DensityOperator) -> complex:
    """<psi|O|psi> for a state vector, Tr(O rho) for a density operator."""
    if op.layout != state.layout:
        raise LayoutError("operator and state layouts differ")
    if isinstance(state, StateVector):
        return complex(state.amplitudes.conj() @ (op.entries @ state.amplitudes))
    return complex(np.trace(op.entries @ state.entries))
