"""Dispersive ensemble dynamics on the collective atom + two-photon space.

Two evolutions of the photon pair through the medium are provided:

* ``u_eff_exact``: the unitary generated by the effective Stark-shift
  Hamiltonian, computed by exact eigendecomposition.
* ``u_eff_paper``: the polarizer-style rewrite the protocol's design assumes
  for the same interaction. It maps the four two-photon product rows onto a
  single circular polarization per photon and therefore cannot be unitary;
  ``check_phases_claim`` quantifies that conflict instead of hiding it.

The collective atom register is two-dimensional and is exact only while the
atoms sit at the all-ground or all-excited-ground extremes, which the
protocol guarantees whenever the medium is traversed. hbar = 1 throughout;
couplings and detunings are angular frequencies in rad/s.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .polarization import LIN_TO_CIRC
from .qstate import Operator, SpaceLabel, StateVector, expm_hermitian

logger = logging.getLogger(__name__)

ATOM = SpaceLabel((("atom", 2),))
PROTOCOL_SPACE = SpaceLabel((("atom", 2), ("photon1", 2), ("photon2", 2)))

# Projectors onto the circular photon modes, written in linear-basis
# coordinates via the basis change (the plus mode couples the plain ground
# level, the minus mode the primed one).
P_PLUS = LIN_TO_CIRC.conj().T @ np.diag([1.0, 0.0]) @ LIN_TO_CIRC
P_MINUS = LIN_TO_CIRC.conj().T @ np.diag([0.0, 1.0]) @ LIN_TO_CIRC

_I2 = np.eye(2)


@dataclass(frozen=True)
class EnsembleConfig:
    """Physical parameters of one photon-ensemble interaction.

    ``lambda_value`` is the per-atom light shift coupling^2/detuning and
    ``theta`` the dimensionless evolution angle lambda * n_atoms * time.
    """

    n_atoms: int
    coupling: float
    detuning: float
    interaction_time: float
    lambda_value: float
    theta: float
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        if self.n_atoms < 1:
            raise ValueError("n_atoms must be positive")
        lam = self.coupling**2 / self.detuning
        if abs(self.lambda_value - lam) > 1e-12 * max(1.0, abs(lam)):
            raise ValueError("lambda_value is inconsistent with coupling^2/detuning")
        theta = self.lambda_value * self.n_atoms * self.interaction_time
        if abs(self.theta - theta) > 1e-12 * max(1.0, abs(theta)):
            raise ValueError("theta is inconsistent with lambda * n_atoms * time")

    @classmethod
    def from_physics(
        cls,
        coupling: float,
        detuning: float,
        n_atoms: int,
        interaction_time: float,
        dispersive_threshold: float = 5.0,
    ) -> "EnsembleConfig":
        lam = coupling**2 / detuning
        theta = lam * n_atoms * interaction_time
        warns = ()
        ratio = detuning / coupling
        if ratio < dispersive_threshold:
            warns = (
                f"detuning/coupling = {ratio:.3g} is below the dispersive threshold "
                f"{dispersive_threshold:g}; the second-order treatment is unreliable",
            )
        return cls(int(n_atoms), coupling, detuning, interaction_time, lam, theta, warns)

    @classmethod
    def from_theta(
        cls,
        theta: float,
        n_atoms: int = 100_000,
        coupling: float = 1.0,
        detuning: float = 10.0,
    ) -> "EnsembleConfig":
        """Config with placeholder physics chosen to hit the requested angle."""
        lam = coupling**2 / detuning
        return cls.from_physics(coupling, detuning, n_atoms, theta / (lam * n_atoms))


@dataclass(frozen=True)
class MicrowavePulse:
    """Resonant two-level drive parameters: pulse area (Omega*t) and field phase."""

    area: float
    phase: float

    def __post_init__(self):
        if not (math.isfinite(self.area) and math.isfinite(self.phase)):
            raise ValueError("pulse parameters must be finite")
        p = math.remainder(float(self.phase), 2.0 * math.pi)
        if p <= -math.pi:
            p += 2.0 * math.pi
        object.__setattr__(self, "phase", p)


def microwave_rotation(pulse: MicrowavePulse) -> Operator:
    """Single-atom rotation exp(-i H t) for the resonant drive Hamiltonian.

    The generator, in units of the Rabi coupling, is
    -(e^{i phase}|g'><g| + h.c.), so the result is
    cos(area) I + i sin(area) (e^{i phase}|g'><g| + e^{-i phase}|g><g'|).
    """
    generator = -np.array(
        [[0.0, np.exp(-1j * pulse.phase)], [np.exp(1j * pulse.phase), 0.0]]
    )
    return expm_hermitian(Operator(ATOM, generator), pulse.area)


# Pulse settings realizing the four Hadamard variants, and the atomic NOT.
HADAMARD_PULSES = {
    1: MicrowavePulse(math.pi / 4, -math.pi / 2),
    2: MicrowavePulse(math.pi / 4, 0.0),
    3: MicrowavePulse(math.pi / 4, math.pi / 2),
    4: MicrowavePulse(math.pi / 4, math.pi),
}
NOT_PULSE = MicrowavePulse(math.pi / 2, math.pi / 2)


def _photon_pair_sum(single: np.ndarray) -> np.ndarray:
    return np.kron(single, _I2) + np.kron(_I2, single)


def h_eff_dimensionless() -> Operator:
    """Effective Hamiltonian divided by (lambda * n_atoms), collective form.

    Assembled from the circular-mode projectors: atoms at the plain-ground
    extreme shift photons in the plus mode, atoms at the primed extreme shift
    photons in the minus mode.
    """
    h = np.kron(np.diag([1.0, 0.0]), _photon_pair_sum(P_PLUS)) + np.kron(
        np.diag([0.0, 1.0]), _photon_pair_sum(P_MINUS)
    )
    return Operator(PROTOCOL_SPACE, h)


def build_h_eff(config: EnsembleConfig) -> Operator:
    """Effective Hamiltonian in rad/s on the collective atom + photon space."""
    scale = config.lambda_value * config.n_atoms
    return Operator(PROTOCOL_SPACE, scale * h_eff_dimensionless().matrix)


def build_h_eff_linear(config: EnsembleConfig) -> Operator:
    """The same Hamiltonian assembled directly from its linear-basis terms.

    The per-photon coupling matrices are written out literally here, with the
    +-i/2 off-diagonal structure of the horizontal/vertical rewrite, as an
    independent construction route for the equivalence check.
    """
    m_plain = np.array([[0.5, -0.5j], [0.5j, 0.5]])
    m_primed = np.array([[0.5, 0.5j], [-0.5j, 0.5]])
    scale = config.lambda_value * config.n_atoms
    h = np.kron(np.diag([1.0, 0.0]), _photon_pair_sum(m_plain)) + np.kron(
        np.diag([0.0, 1.0]), _photon_pair_sum(m_primed)
    )
    return Operator(PROTOCOL_SPACE, scale * h)


def u_eff_exact(config: EnsembleConfig) -> Operator:
    """Exact medium unitary exp(-i H t) at the configured evolution angle."""
    return expm_hermitian(h_eff_dimensionless(), config.theta)


# Global phases declared for the four two-photon product rows entering the
# medium with atoms at the plain-ground extreme (each times e^{-i theta}).
_ROW_PHASES_GROUND = {
    (0, 0): -1.0,
    (1, 1): 1.0,
    (0, 1): -1.0j,
    (1, 0): -1.0j,
}
# Mirror phases for the primed extreme, obtained from the symmetry that swaps
# the two circular modes together with the two atomic levels.
_ROW_PHASES_PRIMED = {
    (0, 0): -1.0,
    (1, 1): 1.0,
    (0, 1): 1.0j,
    (1, 0): 1.0j,
}
# Per-photon output of the declared rewrite: (-i|0> + |1>)/sqrt(2) for the
# ground extreme, which equals -i times the circular plus mode.
_TARGET_GROUND = np.array([-1.0j, 1.0]) / math.sqrt(2.0)
_TARGET_PRIMED = np.array([-1.0j, -1.0]) / math.sqrt(2.0)


@dataclass(frozen=True)
class PaperMapResult:
    state: StateVector
    post_selection_probability: float
    linear_extension_used: bool


@dataclass(frozen=True)
class PaperPolarizerMap:
    """The declared polarizer rewrite of the medium interaction.

    Defined row by row on the four two-photon product states; superposed
    inputs are resolved by linear extension, which is not norm-preserving,
    so the output is renormalized and the retained squared norm is reported
    as a post-selection probability.
    """

    theta: float = math.pi / 2

    def apply(self, state: StateVector) -> PaperMapResult:
        if state.space != PROTOCOL_SPACE:
            raise ValueError("polarizer map is defined on the atom + two-photon space")
        shaped = state.amplitudes.reshape(2, 4)
        weights = np.linalg.norm(shaped, axis=1)
        if min(weights) > 1e-12:
            raise ValueError(
                "atom register must be exactly at one collective extreme; "
                "got weight on both levels"
            )
        branch = int(np.argmax(weights))
        v = shaped[branch]
        phases = _ROW_PHASES_GROUND if branch == 0 else _ROW_PHASES_PRIMED
        target = _TARGET_GROUND if branch == 0 else _TARGET_PRIMED
        rows = [(0, 0), (0, 1), (1, 0), (1, 1)]
        coeff = sum(
            v[2 * r1 + r2] * phases[(r1, r2)] * np.exp(-1j * self.theta) for r1, r2 in rows
        )
        populated = int(np.sum(np.abs(v) > 1e-12))
        linear_extension = populated > 1
        if linear_extension:
            logger.warning(
                "polarizer rewrite applied to a superposition by linear extension; "
                "this map is not norm-preserving, output renormalized"
            )
        prob = float(abs(coeff) ** 2)
        if prob < 1e-24:
            raise ValueError("polarizer rewrite annihilates this input (zero post-selection weight)")
        photons = np.kron(target, target)
        out = np.zeros((2, 4), dtype=complex)
        out[branch] = (coeff / abs(coeff)) * photons
        return PaperMapResult(
            StateVector(PROTOCOL_SPACE, out.reshape(-1)),
            prob,
            linear_extension,
        )


def u_eff_paper(theta: float = math.pi / 2) -> PaperPolarizerMap:
    """The declared (non-unitary) polarizer rewrite at the given angle."""
    return PaperPolarizerMap(theta)


@dataclass(frozen=True)
class PhasesClaimReport:
    """Consistency audit of the declared rewrite against the exact unitary."""

    theta: float
    row_labels: tuple[str, ...]
    input_gram: np.ndarray
    claimed_abs_gram: np.ndarray
    fidelities: np.ndarray
    consistent: bool
    verdict: str

    def as_dict(self) -> dict:
        return {
            "theta": self.theta,
            "rows": list(self.row_labels),
            "input_gram_real": [[float(x.real) for x in row] for row in self.input_gram],
            "input_gram_imag": [[float(x.imag) for x in row] for row in self.input_gram],
            "claimed_abs_gram": [[float(x) for x in row] for row in self.claimed_abs_gram],
            "claimed_vs_exact_fidelities": [float(x) for x in self.fidelities],
            "consistent": self.consistent,
            "verdict": self.verdict,
        }


def check_phases_claim(config: EnsembleConfig) -> PhasesClaimReport:
    """Compare the declared rewrite with the exact unitary on the four rows.

    The four inputs are orthonormal while the declared outputs all share one
    polarization factor, so their pairwise absolute overlaps are 1: no
    unitary does that, and the report says so.
    """
    if abs(config.theta - math.pi / 2) > 1e-9:
        raise ValueError("the claim audit is defined at theta = pi/2")
    rows = [(0, 0), (1, 1), (0, 1), (1, 0)]
    labels = tuple(f"photons|{r1}{r2}> at ground extreme" for r1, r2 in rows)
    u = u_eff_exact(config)
    pmap = u_eff_paper(config.theta)
    inputs, claimed, exact = [], [], []
    for r1, r2 in rows:
        amps = np.zeros(8, dtype=complex)
        amps[2 * r1 + r2] = 1.0  # atom at index 0
        state = StateVector(PROTOCOL_SPACE, amps)
        inputs.append(state)
        claimed.append(pmap.apply(state).state)
        exact.append(u.apply(state))
    n = len(rows)
    input_gram = np.array([[inputs[i].overlap(inputs[j]) for j in range(n)] for i in range(n)])
    claimed_gram = np.array([[claimed[i].overlap(claimed[j]) for j in range(n)] for i in range(n)])
    fid = np.array([abs(claimed[i].overlap(exact[i])) for i in range(n)])
    inputs_orthonormal = np.max(np.abs(input_gram - np.eye(n))) <= 1e-12
    outputs_parallel = np.max(np.abs(np.abs(claimed_gram) - 1.0)) <= 1e-12
    consistent = not (inputs_orthonormal and outputs_parallel)
    verdict = (
        "claimed map not unitary: orthonormal inputs are sent to pairwise parallel outputs"
        if not consistent
        else "no inconsistency detected"
    )
    return PhasesClaimReport(
        theta=config.theta,
        row_labels=labels,
        input_gram=input_gram,
        claimed_abs_gram=np.abs(claimed_gram),
        fidelities=fid,
        consistent=consistent,
        verdict=verdict,
    )
