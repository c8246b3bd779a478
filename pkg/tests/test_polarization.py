import math

import numpy as np
import pytest

from djensemble.polarization import (
    HADAMARD_GADGETS,
    LIN_TO_CIRC,
    PhotonBasis,
    TWO_PHOTONS,
    WavePlateSpec,
    basis_convert,
    composite_h,
    detect_coincidence,
    gadget_compose,
    hadamard_variant,
    half_wave,
    quarter_wave,
    source_and_initialize,
)
from djensemble.qstate import (
    Operator,
    SpaceLabel,
    StateVector,
    born_distribution,
    equal_up_to_global_phase,
)

SQRT2 = math.sqrt(2.0)

# The four rotation matrices, written out independently of the constructors.
EXPECTED_VARIANTS = {
    1: np.array([[1, -1], [1, 1]]) / SQRT2,
    2: np.array([[1, 1j], [1j, 1]]) / SQRT2,
    3: np.array([[1, 1], [-1, 1]]) / SQRT2,
    4: np.array([[1, -1j], [-1j, 1]]) / SQRT2,
}


class TestWavePlates:
    def test_quarter_at_pi_over_4_is_h2(self):
        np.testing.assert_allclose(quarter_wave(math.pi / 4).matrix, EXPECTED_VARIANTS[2], atol=1e-15)

    def test_quarter_at_minus_pi_over_4_is_h4(self):
        np.testing.assert_allclose(quarter_wave(-math.pi / 4).matrix, EXPECTED_VARIANTS[4], atol=1e-15)

    def test_quarter_unitarity_and_det_random_angles(self):
        rng = np.random.default_rng(21)
        for angle in rng.uniform(-math.pi, math.pi, size=100):
            q = quarter_wave(angle).matrix
            np.testing.assert_allclose(q.conj().T @ q, np.eye(2), atol=1e-12)
            assert abs(abs(np.linalg.det(q)) - 1.0) < 1e-12

    def test_half_wave_at_pi_over_4_swaps_polarizations(self):
        h = half_wave(math.pi / 4).matrix
        np.testing.assert_allclose(h @ [0.0, 1.0], [1.0j, 0.0], atol=1e-15)
        np.testing.assert_allclose(h @ [1.0, 0.0], [0.0, 1.0j], atol=1e-15)

    def test_half_wave_at_zero(self):
        np.testing.assert_allclose(half_wave(0.0).matrix, 1j * np.diag([1.0, -1.0]), atol=1e-15)

    def test_half_wave_squares_to_minus_identity(self):
        rng = np.random.default_rng(22)
        for angle in rng.uniform(-math.pi, math.pi, size=50):
            h = half_wave(angle).matrix
            np.testing.assert_allclose(h @ h, -np.eye(2), atol=1e-12)

    def test_wave_plate_spec_canonicalizes_angle(self):
        spec = WavePlateSpec("half", 3 * math.pi)
        assert -math.pi <= spec.angle < math.pi
        np.testing.assert_allclose(spec.matrix().matrix, half_wave(math.pi).matrix, atol=1e-12)

    def test_wave_plate_spec_rejects_unknown_kind(self):
        with pytest.raises(ValueError):
            WavePlateSpec("third", 0.1)


class TestHadamardVariants:
    @pytest.mark.parametrize("i", [1, 2, 3, 4])
    def test_exact_matrices(self, i):
        np.testing.assert_array_equal(hadamard_variant(i).matrix, EXPECTED_VARIANTS[i])

    @pytest.mark.parametrize("i", [1, 2, 3, 4])
    def test_unitary(self, i):
        m = hadamard_variant(i).matrix
        np.testing.assert_allclose(m.conj().T @ m, np.eye(2), atol=1e-15)

    @pytest.mark.parametrize("i", [0, 5, -1])
    def test_out_of_range(self, i):
        with pytest.raises(ValueError):
            hadamard_variant(i)


class TestGadgets:
    @pytest.mark.parametrize("i", [1, 2, 3, 4])
    def test_gadget_reproduces_variant_exactly(self, i):
        built = gadget_compose(HADAMARD_GADGETS[i]).matrix
        np.testing.assert_allclose(built, EXPECTED_VARIANTS[i], atol=1e-12)

    def test_single_plate_gadget(self):
        built = gadget_compose([WavePlateSpec("quarter", math.pi / 4)]).matrix
        np.testing.assert_allclose(built, EXPECTED_VARIANTS[2], atol=1e-12)

    def test_rightmost_plate_acts_first(self):
        # a half plate at pi/4 then a quarter at 0: compare against explicit order
        plates = [WavePlateSpec("quarter", 0.0), WavePlateSpec("half", math.pi / 4)]
        expected = quarter_wave(0.0).matrix @ half_wave(math.pi / 4).matrix
        np.testing.assert_allclose(gadget_compose(plates).matrix, expected, atol=1e-15)

    def test_empty_gadget_rejected(self):
        with pytest.raises(ValueError):
            gadget_compose([])


class TestCompositeRotations:
    def test_prime_is_diagonal_phase(self):
        e = np.exp(1j * math.pi / 4)
        np.testing.assert_allclose(composite_h("prime").matrix, np.diag([e, e.conjugate()]), atol=1e-12)

    def test_double_prime_is_diagonal_phase(self):
        e = np.exp(1j * math.pi / 4)
        np.testing.assert_allclose(
            composite_h("double_prime").matrix, np.diag([e.conjugate(), e]), atol=1e-12
        )

    def test_prime_actions_on_basis(self):
        prime = composite_h("prime").matrix
        double = composite_h("double_prime").matrix
        np.testing.assert_allclose(prime @ [1, 0], np.exp(1j * math.pi / 4) * np.array([1, 0]), atol=1e-12)
        np.testing.assert_allclose(double @ [0, 1], np.exp(1j * math.pi / 4) * np.array([0, 1]), atol=1e-12)
        np.testing.assert_allclose(double @ [1, 0], np.exp(-1j * math.pi / 4) * np.array([1, 0]), atol=1e-12)

    def test_prime_times_double_prime_is_identity(self):
        product = composite_h("prime").matrix @ composite_h("double_prime").matrix
        np.testing.assert_allclose(product, np.eye(2), atol=1e-12)

    def test_unit_modulus_entries(self):
        for kind in ("prime", "double_prime"):
            diag = np.diag(composite_h(kind).matrix)
            np.testing.assert_allclose(np.abs(diag), 1.0, atol=1e-12)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            composite_h("triple_prime")


class TestBasisConvert:
    SPACE = SpaceLabel((("photon", 2),))

    def test_change_of_basis_matrix(self):
        np.testing.assert_allclose(LIN_TO_CIRC.conj().T @ LIN_TO_CIRC, np.eye(2), atol=1e-15)
        # columns are the horizontal and vertical states in mode coordinates
        np.testing.assert_allclose(LIN_TO_CIRC[:, 0], np.array([1.0, 1.0]) / SQRT2, atol=1e-15)
        np.testing.assert_allclose(
            LIN_TO_CIRC[:, 1], (1.0 / (1.0j * SQRT2)) * np.array([1.0, -1.0]), atol=1e-15
        )

    def test_horizontal_to_circular(self):
        state = StateVector(self.SPACE, np.array([1.0, 0.0]))
        converted = basis_convert(state, PhotonBasis.CIRCULAR)
        np.testing.assert_allclose(converted.amplitudes, np.array([1.0, 1.0]) / SQRT2, atol=1e-15)

    def test_plus_mode_to_linear(self):
        state = StateVector(self.SPACE, np.array([1.0, 0.0]))
        converted = basis_convert(state, PhotonBasis.LINEAR)
        np.testing.assert_allclose(converted.amplitudes, np.array([1.0, 1.0j]) / SQRT2, atol=1e-15)

    def test_round_trip(self):
        rng = np.random.default_rng(31)
        for _ in range(20):
            amps = rng.normal(size=2) + 1j * rng.normal(size=2)
            state = StateVector(self.SPACE, amps / np.linalg.norm(amps))
            back = basis_convert(basis_convert(state, PhotonBasis.CIRCULAR), PhotonBasis.LINEAR)
            np.testing.assert_allclose(back.amplitudes, state.amplitudes, atol=1e-15)

    def test_inner_products_preserved(self):
        rng = np.random.default_rng(32)
        for _ in range(20):
            amps = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            a = StateVector(self.SPACE, amps[0] / np.linalg.norm(amps[0]))
            b = StateVector(self.SPACE, amps[1] / np.linalg.norm(amps[1]))
            ca = basis_convert(a, PhotonBasis.CIRCULAR)
            cb = basis_convert(b, PhotonBasis.CIRCULAR)
            assert abs(a.overlap(b) - ca.overlap(cb)) < 1e-12

    def test_operator_conversion(self):
        plus_projector_linear = LIN_TO_CIRC.conj().T @ np.diag([1.0, 0.0]) @ LIN_TO_CIRC
        op = Operator(self.SPACE, plus_projector_linear)
        circ = basis_convert(op, PhotonBasis.CIRCULAR)
        np.testing.assert_allclose(circ.matrix, np.diag([1.0, 0.0]), atol=1e-15)

    def test_non_photon_subsystem_rejected(self):
        space = SpaceLabel((("atom", 2), ("photon1", 2)))
        state = StateVector(space, np.array([1.0, 0, 0, 0]))
        with pytest.raises(ValueError, match="not a photon"):
            basis_convert(state, PhotonBasis.CIRCULAR, subsystems=("atom",))


class TestSourceAndDetection:
    def test_source_equals_both_horizontal_up_to_phase(self):
        out = source_and_initialize()
        target = StateVector(TWO_PHOTONS, np.array([1.0, 0, 0, 0]))
        equal, phase = equal_up_to_global_phase(out, target, 1e-12)
        assert equal
        # the preparation plate contributes a quarter-turn phase
        assert abs(abs(phase) - math.pi / 2) < 1e-12

    def test_source_per_photon_distributions(self):
        out = source_and_initialize()
        for name in ("photon1", "photon2"):
            dist = born_distribution(out, (name,))
            assert dist[0] == pytest.approx(1.0, abs=1e-12)

    def test_source_norm(self):
        assert abs(source_and_initialize().norm() - 1.0) < 1e-12

    def test_detect_basis_state(self):
        state = StateVector(TWO_PHOTONS, np.array([0.0, 1.0, 0.0, 0.0]))  # |0,1>
        pattern, record = detect_coincidence(state, seed=5)
        assert pattern == (0, 1)
        assert record["clicks"] == ("HD1", "VD2")
        assert record["distribution"][(0, 1)] == pytest.approx(1.0)

    def test_detect_product_superposition(self):
        plus = np.array([1.0, 1.0]) / SQRT2
        state = StateVector(TWO_PHOTONS, np.kron(plus, [1.0, 0.0]))
        seen = set()
        for seed in range(30):
            pattern, record = detect_coincidence(state, seed=seed)
            assert pattern[1] == 0  # photon 2 is horizontal with certainty
            seen.add(pattern[0])
            assert record["distribution"][(0, 0)] == pytest.approx(0.5)
        assert seen == {0, 1}

    def test_detect_marginalizes_product_atom(self):
        space = SpaceLabel((("atom", 2), ("photon1", 2), ("photon2", 2)))
        amps = np.kron([0.0, 1.0], np.kron([1.0, 0.0], [1.0, 0.0]))
        pattern, _ = detect_coincidence(StateVector(space, amps), seed=0)
        assert pattern == (0, 0)

    def test_detect_rejects_entangled_atom(self):
        space = SpaceLabel((("atom", 2), ("photon1", 2), ("photon2", 2)))
        amps = np.zeros(8, dtype=complex)
        amps[0] = 1 / SQRT2  # atom 0, photons 00
        amps[7] = 1 / SQRT2  # atom 1, photons 11
        with pytest.raises(ValueError, match="entangled"):
            detect_coincidence(StateVector(space, amps), seed=0)

    def test_detect_same_seed_reproducible(self):
        plus = np.array([1.0, 1.0]) / SQRT2
        state = StateVector(TWO_PHOTONS, np.kron(plus, plus))
        a, _ = detect_coincidence(state, seed=123)
        b, _ = detect_coincidence(state, seed=123)
        assert a == b
