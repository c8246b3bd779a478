"""Jones-calculus layer for the two polarization qubits.

Conventions: every photonic state and matrix is expressed in the linear
polarization basis, index 0 horizontal and index 1 vertical, unless it has
been explicitly pushed through ``basis_convert``. The circular mode basis
orders the single-photon-in-plus mode before the single-photon-in-minus mode.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .qstate import (
    Operator,
    SpaceLabel,
    StateVector,
    born_distribution,
    embed,
    sample_shots,
    tensor,
)

PHOTON = SpaceLabel((("photon", 2),))
TWO_PHOTONS = SpaceLabel((("photon1", 2), ("photon2", 2)))

_SQRT2 = math.sqrt(2.0)

# Columns are the horizontal and vertical states written in circular-mode
# coordinates, so v_circular = LIN_TO_CIRC @ v_linear.
LIN_TO_CIRC = np.array([[1.0, -1.0j], [1.0, 1.0j]]) / _SQRT2

_HADAMARD_VARIANTS = {
    1: np.array([[1.0, -1.0], [1.0, 1.0]]) / _SQRT2,
    2: np.array([[1.0, 1.0j], [1.0j, 1.0]]) / _SQRT2,
    3: np.array([[1.0, 1.0], [-1.0, 1.0]]) / _SQRT2,
    4: np.array([[1.0, -1.0j], [-1.0j, 1.0]]) / _SQRT2,
}


class PhotonBasis(enum.Enum):
    LINEAR = "linear"
    CIRCULAR = "circular"


def quarter_wave(angle: float) -> Operator:
    """Quarter-wave plate aligned at ``angle`` radians."""
    c, s = math.cos(2.0 * angle), math.sin(2.0 * angle)
    m = (1.0j / _SQRT2) * np.array([[c - 1.0j, s], [s, -c - 1.0j]])
    return Operator(PHOTON, m, unitary_claim=True)


def half_wave(angle: float) -> Operator:
    """Half-wave plate aligned at ``angle`` radians; squares to -I."""
    c, s = math.cos(2.0 * angle), math.sin(2.0 * angle)
    m = 1.0j * np.array([[c, s], [s, -c]])
    return Operator(PHOTON, m, unitary_claim=True)


def _canonical_angle(angle: float) -> float:
    # map to [-pi, pi)
    if not math.isfinite(angle):
        raise ValueError("wave-plate angle must be finite")
    return (angle + math.pi) % (2.0 * math.pi) - math.pi


@dataclass(frozen=True)
class WavePlateSpec:
    """A retarder kind plus its alignment angle."""

    kind: str  # "quarter" or "half"
    angle: float

    def __post_init__(self):
        if self.kind not in ("quarter", "half"):
            raise ValueError(f"unknown wave-plate kind {self.kind!r}")
        object.__setattr__(self, "angle", _canonical_angle(float(self.angle)))

    def matrix(self) -> Operator:
        return quarter_wave(self.angle) if self.kind == "quarter" else half_wave(self.angle)


def hadamard_variant(i: int) -> Operator:
    """One of the four inequivalent single-qubit Hadamard rotations."""
    if i not in _HADAMARD_VARIANTS:
        raise ValueError(f"hadamard variant index must be 1..4, got {i}")
    return Operator(PHOTON, _HADAMARD_VARIANTS[i], unitary_claim=True)


def gadget_compose(plates) -> Operator:
    """Product of wave-plate matrices; the rightmost plate acts first on the photon."""
    plates = tuple(plates)
    if not plates:
        raise ValueError("wave-plate gadget needs at least one plate")
    result = plates[0].matrix()
    for plate in plates[1:]:
        result = result @ plate.matrix()
    return result


# Wave-plate realizations of the four Hadamard variants.
HADAMARD_GADGETS = {
    1: (WavePlateSpec("quarter", math.pi / 4), WavePlateSpec("quarter", math.pi / 4), WavePlateSpec("half", -3 * math.pi / 8)),
    2: (WavePlateSpec("quarter", math.pi / 4),),
    3: (WavePlateSpec("quarter", math.pi / 4), WavePlateSpec("quarter", math.pi / 4), WavePlateSpec("half", -math.pi / 8)),
    4: (WavePlateSpec("quarter", -math.pi / 4),),
}


def composite_h(kind: str) -> Operator:
    """Composite rotation h' = h1 h4 h3 or h'' = h1 h2 h3; both are diagonal phases."""
    if kind == "prime":
        ops = (hadamard_variant(1), hadamard_variant(4), hadamard_variant(3))
    elif kind == "double_prime":
        ops = (hadamard_variant(1), hadamard_variant(2), hadamard_variant(3))
    else:
        raise ValueError(f"kind must be 'prime' or 'double_prime', got {kind!r}")
    out = ops[0] @ ops[1] @ ops[2]
    off = max(abs(out.matrix[0, 1]), abs(out.matrix[1, 0]))
    if off > 1e-12:
        raise AssertionError(f"composite rotation is not diagonal, off-diagonal {off:.3e}")
    return out


def _photon_positions(space: SpaceLabel, subsystems) -> list[int]:
    if subsystems is None:
        subsystems = [n for n in space.names if n.startswith("photon")]
        if not subsystems:
            raise ValueError("no photon subsystems found in space")
    positions = []
    for name in subsystems:
        p = space.index(name)
        if not name.startswith("photon") or space.dims[p] != 2:
            raise ValueError(f"subsystem {name!r} is not a photon qubit")
        positions.append(p)
    return positions


def basis_convert(x, to: PhotonBasis, subsystems=None):
    """Re-express a state or operator in the requested photon basis.

    By default every subsystem whose name starts with ``photon`` is converted.
    Converting to CIRCULAR applies the linear-to-circular change of
    coordinates; converting to LINEAR applies its inverse.
    """
    space = x.space
    positions = _photon_positions(space, subsystems)
    b = LIN_TO_CIRC if to is PhotonBasis.CIRCULAR else LIN_TO_CIRC.conj().T
    result = x
    for p in positions:
        name = space.names[p]
        conv = embed_single(name, b, space)
        if isinstance(x, StateVector):
            result = conv.apply(result)
        elif isinstance(x, Operator):
            result = conv @ result @ conv.dagger()
        else:
            raise TypeError("basis_convert expects a StateVector or Operator")
    return result


def embed_single(name: str, matrix_2x2: np.ndarray, space: SpaceLabel) -> Operator:
    """Embed a 2x2 matrix acting on the named qubit subsystem."""
    op = Operator(SpaceLabel(((name, 2),)), matrix_2x2, unitary_claim=True)
    return embed(op, name, space)


def source_and_initialize() -> StateVector:
    """Two-photon source output after the preparation optics.

    The pair is born with photon 1 horizontal and photon 2 vertical; photon 2
    is then rotated by a half-wave plate at pi/4, leaving both photons
    horizontal up to a global phase.
    """
    photon1 = StateVector(SpaceLabel((("photon1", 2),)), np.array([1.0, 0.0]))
    vertical = np.array([0.0, 1.0], dtype=complex)
    rotated = half_wave(math.pi / 4).matrix @ vertical
    photon2 = StateVector(SpaceLabel((("photon2", 2),)), rotated)
    return tensor(photon1, photon2)


_DETECTORS = {(1, 0): "HD1", (1, 1): "VD1", (2, 0): "HD2", (2, 1): "VD2"}


def clicks_for_pattern(pattern) -> tuple[str, str]:
    b1, b2 = pattern
    return _DETECTORS[(1, int(b1))], _DETECTORS[(2, int(b2))]


def detect_coincidence(state: StateVector, seed: int):
    """Sample one coincidence pattern from the two-photon linear-basis Born rule.

    Any non-photon subsystems must be in a product with the photons; an
    entangled register signals a protocol-sequencing bug and raises.
    """
    space = state.space
    for name in ("photon1", "photon2"):
        if name not in space.names or space.dims[space.index(name)] != 2:
            raise ValueError("state must contain photon1 and photon2 qubits")
    p1, p2 = space.index("photon1"), space.index("photon2")
    others = [i for i in range(len(space.dims)) if i not in (p1, p2)]
    shaped = state.amplitudes.reshape(space.dims)
    shaped = np.transpose(shaped, others + [p1, p2])
    flat = shaped.reshape(-1, 4)
    if flat.shape[0] > 1:
        svals = np.linalg.svd(flat, compute_uv=False)
        if svals.size > 1 and svals[1] > 1e-9:
            raise ValueError(
                "photons are entangled with another register; measure or trace it explicitly first"
            )
        _, _, vh = np.linalg.svd(flat)
        photon_amps = vh[0]
    else:
        photon_amps = flat[0]
    photon_state = StateVector(TWO_PHOTONS, photon_amps / np.linalg.norm(photon_amps))
    dist = born_distribution(photon_state)
    counts = sample_shots(dist, 1, seed)
    pattern = next(o for o, c in counts.items() if c == 1)
    record = {
        "pattern": pattern,
        "clicks": clicks_for_pattern(pattern),
        "distribution": dist,
    }
    return pattern, record
