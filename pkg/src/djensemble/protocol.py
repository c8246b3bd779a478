"""End-to-end two-qubit constant-vs-balanced discrimination protocol.

The pipeline follows the physical realization: both photons and the atomic
ensemble are Hadamard-rotated, a function-dependent oracle is applied (for
balanced functions: per-atom rotation, one medium traversal, then composite
photon rotations; for constant functions: identity or an atomic NOT), and a
final photon Hadamard maps the result onto a coincidence pattern.

Protocol states are tracked on the compact (atom, photon1, photon2) space
where the atom slot holds the shared single-atom state; the physical
ensemble state is its N-fold product, so the two agree up to a global phase
and coincide exactly at the collective extremes. The unreduced and
symmetric-sector simulators in ``manybody`` replay the same operation
sequence for cross-checks.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .ensemble import (
    HADAMARD_PULSES,
    NOT_PULSE,
    PROTOCOL_SPACE,
    EnsembleConfig,
    microwave_rotation,
    u_eff_exact,
    u_eff_paper,
)
from .manybody import AtomRotation, EnsembleEvolution, PhotonRotation
from .polarization import composite_h, embed_single, hadamard_variant
from .qstate import StateVector, born_distribution

MODES = ("exact", "paper")

TABLE1_TABLES = {
    "f1": (0, 0, 0, 0),
    "f2": (1, 1, 1, 1),
    "f3": (0, 0, 1, 1),
    "f4": (1, 1, 0, 0),
    "f5": (0, 1, 0, 1),
    "f6": (1, 0, 1, 0),
    "f7": (0, 1, 1, 0),
    "f8": (1, 0, 0, 1),
}

PATTERN_TO_PAIR = {
    (1, 1): ("f1", "f2"),
    (0, 1): ("f3", "f4"),
    (1, 0): ("f5", "f6"),
    (0, 0): ("f7", "f8"),
}

# Composite photon rotations selecting each balanced pair: (photon1, photon2).
H_EQ_ASSIGNMENTS = {
    "f3": ("double_prime", "prime"),
    "f4": ("double_prime", "prime"),
    "f5": ("prime", "double_prime"),
    "f6": ("prime", "double_prime"),
    "f7": ("double_prime", "double_prime"),
    "f8": ("double_prime", "double_prime"),
}


@dataclass(frozen=True)
class BooleanFunction:
    """Truth table of an n-bit binary-valued function."""

    n_bits: int
    table: tuple[int, ...]
    id: str | None = None

    def __post_init__(self):
        table = tuple(int(b) for b in self.table)
        object.__setattr__(self, "table", table)
        if self.n_bits < 1:
            raise ValueError("n_bits must be positive")
        if len(table) != 2**self.n_bits:
            raise ValueError(f"table must have 2^{self.n_bits} entries")
        if any(b not in (0, 1) for b in table):
            raise ValueError("table entries must be bits")
        if self.id is not None:
            expected = TABLE1_TABLES.get(self.id)
            if expected is None or self.n_bits != 2 or table != expected:
                raise ValueError(f"id {self.id!r} does not match this truth table")

    @property
    def classification(self) -> str:
        ones = sum(self.table)
        if ones in (0, len(self.table)):
            return "constant"
        if 2 * ones == len(self.table):
            return "balanced"
        return "neither"

    def value(self, x: int) -> int:
        return self.table[x]


def table1_function(fid: str) -> BooleanFunction:
    if fid not in TABLE1_TABLES:
        raise ValueError(f"unknown function id {fid!r}; expected f1..f8")
    return BooleanFunction(2, TABLE1_TABLES[fid], id=fid)


def table1_functions() -> tuple[BooleanFunction, ...]:
    return tuple(table1_function(f"f{i}") for i in range(1, 9))


def enumerate_functions(n_bits: int) -> tuple[BooleanFunction, ...]:
    """All constant and balanced truth tables on n_bits inputs (n_bits <= 4)."""
    if not 1 <= n_bits <= 4:
        raise ValueError("enumeration is guarded to 1 <= n_bits <= 4")
    if n_bits == 2:
        return table1_functions()
    size = 2**n_bits
    functions = [
        BooleanFunction(n_bits, (0,) * size),
        BooleanFunction(n_bits, (1,) * size),
    ]
    for ones in itertools.combinations(range(size), size // 2):
        table = tuple(1 if i in ones else 0 for i in range(size))
        functions.append(BooleanFunction(n_bits, table))
    return tuple(functions)


def _catalog_id(f: BooleanFunction) -> str | None:
    if f.id is not None:
        return f.id
    if f.n_bits == 2:
        for fid, table in TABLE1_TABLES.items():
            if f.table == table:
                return fid
    return None


def h_eq_for(f: BooleanFunction) -> tuple[str, str]:
    """Composite-rotation assignment (photon1, photon2) for a balanced function."""
    fid = _catalog_id(f)
    if fid not in H_EQ_ASSIGNMENTS:
        raise ValueError(
            "composite rotations are defined for the balanced catalog functions f3..f8"
        )
    return H_EQ_ASSIGNMENTS[fid]


def build_oracle(f: BooleanFunction, config: EnsembleConfig) -> tuple:
    """Operation steps realizing the function oracle.

    Balanced: per-atom Hadamard, one medium traversal, then the composite
    photon rotations. Constant: identity (all-zero function) or a per-atom
    NOT pulse (all-one function). No other classification is representable.
    """
    cls = f.classification
    if cls == "neither":
        raise ValueError("this realization only encodes constant or balanced functions")
    if cls == "constant":
        if f.value(0) == 0:
            return ()
        return (AtomRotation(microwave_rotation(NOT_PULSE).matrix),)
    kinds = h_eq_for(f)
    return (
        AtomRotation(microwave_rotation(HADAMARD_PULSES[1]).matrix),
        EnsembleEvolution(config.theta),
        PhotonRotation(1, composite_h(kinds[0]).matrix),
        PhotonRotation(2, composite_h(kinds[1]).matrix),
    )


def exact_operation_sequence(f: BooleanFunction, config: EnsembleConfig) -> tuple:
    """The full protocol as a replayable operation list for the oracles."""
    h1 = hadamard_variant(1).matrix
    pre = (AtomRotation(h1), PhotonRotation(1, h1), PhotonRotation(2, h1))
    post = (PhotonRotation(1, h1), PhotonRotation(2, h1))
    return pre + build_oracle(f, config) + post


@dataclass(frozen=True)
class Outcome:
    pattern: tuple[int, int]
    classification: str
    function_pair: tuple[str, str] | None


def classify(pattern) -> Outcome:
    """Constant iff both photons arrive vertical; the pattern also names the pair."""
    key = (int(pattern[0]), int(pattern[1]))
    if key not in PATTERN_TO_PAIR:
        raise ValueError(f"pattern must be two bits, got {pattern!r}")
    classification = "constant" if key == (1, 1) else "balanced"
    return Outcome(key, classification, PATTERN_TO_PAIR[key])


@dataclass(frozen=True)
class ProtocolTrace:
    """Ordered intermediate states of one protocol run.

    The atom subsystem of each state holds the shared single-atom vector;
    the primed intermediates are absent for constant functions, whose oracle
    involves no medium traversal.
    """

    function: BooleanFunction
    mode: str
    psi0: StateVector
    psi1: StateVector
    psi1_prime: StateVector | None
    psi1_double_prime: StateVector | None
    psi2: StateVector
    psi3: StateVector
    post_selection_probability: float
    ensemble_evolution_calls: int

    def distribution(self) -> dict:
        return born_distribution(self.psi3, ("photon1", "photon2"))

    def pattern(self) -> tuple[tuple[int, int], float]:
        dist = self.distribution()
        best = max(dist, key=dist.get)
        return best, dist[best]

    def deterministic(self, eps: float = 1e-9) -> bool:
        return self.pattern()[1] >= 1.0 - eps

    def named_states(self):
        yield "psi0", self.psi0
        yield "psi1", self.psi1
        if self.psi1_prime is not None:
            yield "psi1_prime", self.psi1_prime
        if self.psi1_double_prime is not None:
            yield "psi1_double_prime", self.psi1_double_prime
        yield "psi2", self.psi2
        yield "psi3", self.psi3


def _atom_extreme_level(state: StateVector) -> int:
    weights = np.linalg.norm(state.amplitudes.reshape(2, 4), axis=1)
    if min(weights) > 1e-12:
        raise ValueError(
            "medium traversal reached with atoms away from the collective extremes "
            "(protocol sequencing bug)"
        )
    return int(np.argmax(weights))


def run_protocol(f: BooleanFunction, mode: str, config: EnsembleConfig) -> ProtocolTrace:
    """Execute initialize -> Hadamards -> oracle -> Hadamards and record the trace."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    balanced = f.classification == "balanced"
    if balanced and abs(config.theta - math.pi / 2) > 1e-9:
        raise ValueError("balanced functions require the medium angle theta = pi/2")
    steps = build_oracle(f, config)

    h1 = hadamard_variant(1).matrix
    amps = np.kron(np.array([0.0, 1.0]), np.array([1.0, 0.0, 0.0, 0.0]))
    psi0 = StateVector(PROTOCOL_SPACE, amps)

    state = embed_single("photon1", h1, PROTOCOL_SPACE).apply(psi0)
    state = embed_single("photon2", h1, PROTOCOL_SPACE).apply(state)
    state = embed_single("atom", h1, PROTOCOL_SPACE).apply(state)
    psi1 = state

    psi1_prime = None
    psi1_double_prime = None
    post_selection = 1.0
    evolution_calls = 0
    for op in steps:
        if isinstance(op, AtomRotation):
            state = embed_single("atom", op.matrix, PROTOCOL_SPACE).apply(state)
            if balanced:
                psi1_prime = state
        elif isinstance(op, EnsembleEvolution):
            _atom_extreme_level(state)
            evolution_calls += 1
            if mode == "exact":
                state = u_eff_exact(config).apply(state)
            else:
                result = u_eff_paper(op.theta).apply(state)
                state = result.state
                post_selection = result.post_selection_probability
            psi1_double_prime = state
        elif isinstance(op, PhotonRotation):
            state = embed_single(f"photon{op.photon}", op.matrix, PROTOCOL_SPACE).apply(state)
        else:
            raise TypeError(f"unknown operation {op!r}")
    psi2 = state

    state = embed_single("photon1", h1, PROTOCOL_SPACE).apply(state)
    state = embed_single("photon2", h1, PROTOCOL_SPACE).apply(state)
    psi3 = state

    return ProtocolTrace(
        function=f,
        mode=mode,
        psi0=psi0,
        psi1=psi1,
        psi1_prime=psi1_prime,
        psi1_double_prime=psi1_double_prime,
        psi2=psi2,
        psi3=psi3,
        post_selection_probability=post_selection,
        ensemble_evolution_calls=evolution_calls,
    )


# ---------------------------------------------------------------------------
# Generic gate-model reference circuit.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReferenceCircuitResult:
    classification: str
    deterministic: bool
    classification_probability: float
    top_pattern: tuple[int, ...]
    top_probability: float
    query_distribution: dict
    oracle_calls: int


_H_GATE = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)


def reference_dj_circuit(f: BooleanFunction) -> ReferenceCircuitResult:
    """Textbook n-bit circuit: query qubits |0..0>, ancilla |1>, one oracle call.

    The function is constant iff every query qubit measures 0. That event has
    probability exactly 1 or 0 for constant/balanced inputs, so the verdict
    is deterministic even when the balanced measurement pattern itself is
    spread; other truth tables give a probabilistic verdict and are flagged.
    """
    n = f.n_bits
    n_qubits = n + 1
    state = np.zeros(2**n_qubits, dtype=complex)
    state[1] = 1.0  # query register all zero, ancilla one
    shaped = state.reshape((2,) * n_qubits)
    for axis in range(n_qubits):
        shaped = np.moveaxis(np.tensordot(_H_GATE, shaped, axes=([1], [axis])), 0, axis)
    flat = shaped.reshape(-1)

    oracle_calls = 0
    permuted = np.empty_like(flat)
    for idx in range(flat.size):
        x, y = idx >> 1, idx & 1
        permuted[(x << 1) | (y ^ f.value(x))] = flat[idx]
    oracle_calls += 1

    shaped = permuted.reshape((2,) * n_qubits)
    for axis in range(n):
        shaped = np.moveaxis(np.tensordot(_H_GATE, shaped, axes=([1], [axis])), 0, axis)
    probs = (np.abs(shaped) ** 2).sum(axis=-1).reshape(-1)

    p_all_zero = float(probs[0])
    top_index = int(np.argmax(probs))
    top_pattern = tuple((top_index >> (n - 1 - i)) & 1 for i in range(n))
    eps = 1e-9
    if p_all_zero >= 1.0 - eps:
        classification, p_class, deterministic = "constant", p_all_zero, True
    elif p_all_zero <= eps:
        classification, p_class, deterministic = "balanced", 1.0 - p_all_zero, True
    else:
        classification = "constant" if p_all_zero >= 0.5 else "balanced"
        p_class = max(p_all_zero, 1.0 - p_all_zero)
        deterministic = False
    dist = {
        tuple((i >> (n - 1 - k)) & 1 for k in range(n)): float(p)
        for i, p in enumerate(probs)
        if p > 1e-15
    }
    return ReferenceCircuitResult(
        classification=classification,
        deterministic=deterministic,
        classification_probability=p_class,
        top_pattern=top_pattern,
        top_probability=float(probs[top_index]),
        query_distribution=dist,
        oracle_calls=oracle_calls,
    )
