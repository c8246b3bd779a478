"""Dense complex linear algebra on small labeled tensor-product spaces.

Everything here is immutable: amplitude and matrix arrays are copied on
construction and marked read-only, so all operations are pure functions and
values can be shared freely across threads.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

import numpy as np

# Construction-time tolerance for normalization, unitarity and hermiticity.
CONSTRUCTION_ATOL = 1e-12

__all__ = [
    "CONSTRUCTION_ATOL",
    "SpaceLabel",
    "StateVector",
    "Operator",
    "PhaseMatch",
    "basis_state",
    "tensor",
    "embed",
    "expm_hermitian",
    "born_distribution",
    "sample_shots",
    "equal_up_to_global_phase",
]


def _as_frozen_complex(values) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128)
    if not np.all(np.isfinite(arr)):
        raise ValueError("amplitudes must be finite (no NaN or Inf)")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SpaceLabel:
    """Ordered list of named subsystems; total dimension is their product."""

    subsystems: tuple[tuple[str, int], ...]

    def __post_init__(self):
        subs = tuple((str(name), int(dim)) for name, dim in self.subsystems)
        object.__setattr__(self, "subsystems", subs)
        if not subs:
            raise ValueError("a space needs at least one subsystem")
        names = [name for name, _ in subs]
        if len(set(names)) != len(names):
            raise ValueError(f"subsystem names must be unique, got {names}")
        if any(dim < 1 for _, dim in subs):
            raise ValueError("subsystem dimensions must be positive")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.subsystems)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(dim for _, dim in self.subsystems)

    @property
    def dim(self) -> int:
        return math.prod(self.dims)

    def index(self, name: str) -> int:
        for i, (sub, _) in enumerate(self.subsystems):
            if sub == name:
                return i
        raise ValueError(f"unknown subsystem {name!r}; have {self.names}")

    def concat(self, other: "SpaceLabel") -> "SpaceLabel":
        clash = set(self.names) & set(other.names)
        if clash:
            raise ValueError(f"subsystem name collision: {sorted(clash)}")
        return SpaceLabel(self.subsystems + other.subsystems)


@dataclass(frozen=True)
class StateVector:
    """Complex amplitude vector over a labeled space, in row-major subsystem order."""

    space: SpaceLabel
    amplitudes: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        amps = _as_frozen_complex(self.amplitudes).reshape(-1)
        if amps.size != self.space.dim:
            raise ValueError(
                f"amplitude length {amps.size} does not match space dimension {self.space.dim}"
            )
        if self.normalized:
            norm2 = float(np.vdot(amps, amps).real)
            if abs(norm2 - 1.0) > CONSTRUCTION_ATOL:
                raise ValueError(f"state flagged normalized but <psi|psi> = {norm2!r}")
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other: "StateVector") -> complex:
        """<self|other>; spaces must match."""
        if self.space != other.space:
            raise ValueError("states live on different spaces")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def renormalized(self) -> "StateVector":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.space, self.amplitudes / n, normalized=True)

    def tensor_view(self) -> np.ndarray:
        return self.amplitudes.reshape(self.space.dims)


@dataclass(frozen=True)
class Operator:
    """Dense square matrix over a labeled space, optionally asserted unitary."""

    space: SpaceLabel
    matrix: np.ndarray
    unitary_claim: bool = False

    def __post_init__(self):
        mat = _as_frozen_complex(self.matrix)
        dim = self.space.dim
        if mat.shape != (dim, dim):
            raise ValueError(f"matrix shape {mat.shape} does not match space dimension {dim}")
        if self.unitary_claim:
            dev = float(np.max(np.abs(mat.conj().T @ mat - np.eye(dim))))
            if dev > CONSTRUCTION_ATOL:
                raise ValueError(f"operator claimed unitary but max |U^dag U - I| = {dev:.3e}")
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.space.dim

    def dagger(self) -> "Operator":
        return Operator(self.space, self.matrix.conj().T, unitary_claim=self.unitary_claim)

    def apply(self, state: StateVector) -> StateVector:
        if state.space != self.space:
            raise ValueError("operator and state live on different spaces")
        return StateVector(
            self.space, self.matrix @ state.amplitudes, normalized=state.normalized and self.unitary_claim
        )

    def __matmul__(self, other: "Operator") -> "Operator":
        if self.space != other.space:
            raise ValueError("operators live on different spaces")
        return Operator(
            self.space,
            self.matrix @ other.matrix,
            unitary_claim=self.unitary_claim and other.unitary_claim,
        )


def basis_state(space: SpaceLabel, occupancy: Sequence[int]) -> StateVector:
    """Product basis state with the given per-subsystem level indices."""
    occ = tuple(int(i) for i in occupancy)
    if len(occ) != len(space.dims):
        raise ValueError("need one level index per subsystem")
    for level, dim in zip(occ, space.dims):
        if not 0 <= level < dim:
            raise ValueError(f"level {level} out of range for dimension {dim}")
    amps = np.zeros(space.dim, dtype=np.complex128)
    flat = 0
    for level, dim in zip(occ, space.dims):
        flat = flat * dim + level
    amps[flat] = 1.0
    return StateVector(space, amps)


def tensor(a, b):
    """Kronecker product of two states or two operators; labels concatenate."""
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(
            a.space.concat(b.space),
            np.kron(a.amplitudes, b.amplitudes),
            normalized=a.normalized and b.normalized,
        )
    if isinstance(a, Operator) and isinstance(b, Operator):
        return Operator(
            a.space.concat(b.space),
            np.kron(a.matrix, b.matrix),
            unitary_claim=a.unitary_claim and b.unitary_claim,
        )
    raise TypeError("tensor expects two StateVectors or two Operators")


def embed(op: Operator, targets, space: SpaceLabel) -> Operator:
    """Pad ``op`` with identity on every subsystem of ``space`` not named in ``targets``.

    ``targets`` names the subsystems (in the order the operator's own factors
    should map onto them); the result is reordered to ``space``'s layout.
    """
    if isinstance(targets, str):
        targets = (targets,)
    positions = [space.index(t) for t in targets]
    if len(set(positions)) != len(positions):
        raise ValueError("duplicate target subsystem")
    dims = space.dims
    target_dim = math.prod(dims[p] for p in positions)
    if op.dim != target_dim:
        raise ValueError(
            f"operator dimension {op.dim} does not match target subsystems of dimension {target_dim}"
        )
    rest = [p for p in range(len(dims)) if p not in positions]
    big = np.kron(op.matrix, np.eye(math.prod(dims[p] for p in rest) if rest else 1))
    current = positions + rest
    axis_of = {sub: i for i, sub in enumerate(current)}
    perm = [axis_of[p] for p in range(len(dims))]
    n = len(dims)
    shaped = big.reshape([dims[s] for s in current] * 2)
    shaped = shaped.transpose(perm + [n + i for i in perm])
    return Operator(space, shaped.reshape(space.dim, space.dim), unitary_claim=op.unitary_claim)


def expm_hermitian(h: Operator, theta: float) -> Operator:
    """exp(-i * theta * H) for Hermitian H, via eigendecomposition.

    ``theta`` carries the whole dimensionless evolution angle, so H should be
    supplied in dimensionless form.
    """
    mat = h.matrix
    scale = max(1.0, float(np.max(np.abs(mat))))
    dev = float(np.max(np.abs(mat - mat.conj().T)))
    if dev > CONSTRUCTION_ATOL * scale:
        raise ValueError(f"generator is not Hermitian: max |H - H^dag| = {dev:.3e}")
    w, v = np.linalg.eigh(mat)
    u = (v * np.exp(-1j * float(theta) * w)) @ v.conj().T
    return Operator(h.space, u, unitary_claim=True)


def born_distribution(
    state: StateVector,
    subsystems: Sequence[str] | None = None,
    renormalize: bool = False,
) -> dict:
    """Measurement probabilities over the product basis of the named subsystems.

    Unnamed subsystems are marginalized. Keys are level tuples, or plain ints
    when a single subsystem is requested. Raises on an unnormalized state
    unless ``renormalize`` is set.
    """
    probs = np.abs(state.amplitudes) ** 2
    total = float(probs.sum())
    if abs(total - 1.0) > 1e-9:
        if not renormalize:
            raise ValueError(
                f"state norm^2 = {total!r}; pass renormalize=True to measure it anyway"
            )
        probs = probs / total
    shaped = probs.reshape(state.space.dims)
    names = state.space.names
    if subsystems is None:
        subsystems = names
    keep = [state.space.index(s) for s in subsystems]
    if len(set(keep)) != len(keep):
        raise ValueError("duplicate subsystem in request")
    drop = tuple(i for i in range(len(names)) if i not in keep)
    marginal = shaped.sum(axis=drop) if drop else shaped
    # after the sum the surviving axes sit in ascending original order;
    # reorder them to match the requested subsystem order
    if len(keep) > 1:
        ascending = sorted(keep)
        marginal = marginal.transpose([ascending.index(k) for k in keep])
    kept_dims = [state.space.dims[i] for i in keep]
    out = {}
    single = len(keep) == 1
    for outcome in itertools.product(*[range(d) for d in kept_dims]):
        p = float(marginal[outcome])
        out[outcome[0] if single else outcome] = p
    return out


def sample_shots(dist: Mapping, shots: int, seed: int) -> dict:
    """Draw ``shots`` outcomes from a probability table, reproducibly.

    Splitting rule: the master seed spawns one child ``SeedSequence`` per shot
    (``SeedSequence(seed).spawn(shots)``); shot i consumes a single uniform
    from child i, so shot outcomes do not depend on evaluation order.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    outcomes = list(dist.keys())
    p = np.array([float(dist[o]) for o in outcomes])
    if p.size == 0 or np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError("malformed distribution: probabilities must be >= 0 and sum to 1")
    p = np.clip(p, 0.0, None)
    cdf = np.cumsum(p / p.sum())
    cdf[-1] = 1.0
    counts = {o: 0 for o in outcomes}
    for child in np.random.SeedSequence(int(seed)).spawn(int(shots)):
        u = np.random.Generator(np.random.PCG64(child)).random()
        idx = min(int(np.searchsorted(cdf, u, side="right")), len(outcomes) - 1)
        counts[outcomes[idx]] += 1
    return counts


class PhaseMatch(NamedTuple):
    equal: bool
    phase: float | None


def equal_up_to_global_phase(a: StateVector, b: StateVector, tol: float) -> PhaseMatch:
    """True iff |<a|b>| >= 1 - tol; also returns arg<a|b> on success."""
    if a.space.dims != b.space.dims:
        raise ValueError("dimension mismatch")
    for s, name in ((a, "a"), (b, "b")):
        if abs(s.norm() - 1.0) > 1e-9:
            raise ValueError(f"state {name} is not normalized")
    ov = complex(np.vdot(a.amplitudes, b.amplitudes))
    if abs(ov) >= 1.0 - tol:
        return PhaseMatch(True, float(np.angle(ov)))
    return PhaseMatch(False, None)
