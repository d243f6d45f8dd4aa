import math

import numpy as np
import pytest

from oracles import binary_entropy, ptranspose_loops, schmidt_rank, werner_matrix
from sepscope.core import _trusted, maximally_mixed, pure_state, tensor_states, validate_density
from sepscope.errors import (
    BadParameterError,
    FactorNotPureError,
    InvalidDecompositionError,
    NoFactorDimsError,
    NotNormalizedError,
)
from sepscope.fano import sm_measure
from sepscope.geometry import hull_membership, is_css, polytope_equal, local_unitary_transform
from sepscope.io import decomposition_from_json, decomposition_to_json
from sepscope.separability import (
    SegmentVerdict,
    invariant_polytope,
    is_product,
    min_entropy_over,
    omega,
    p_pure_polytope,
    ppt_conclusive,
    ppt_min_eigenvalue,
    pure_separability,
    pure_separability_checks,
    segment,
    segment_scan,
    werner_pure_decomposition,
)
from sepscope.states import (
    SeparableDecomposition,
    computational_projector,
    make_bell,
    make_werner,
    random_pure_vector,
    random_separable,
    random_state,
    random_unitary,
)

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)


def classical_correlated():
    """0.5 |00><00| + 0.5 |11><11| with its two-term decomposition."""
    z0, z1 = computational_projector(2, 0), computational_projector(2, 1)
    return SeparableDecomposition.create([0.5, 0.5], [z0, z1], [z0, z1])


class TestOmega:
    def test_product_fixed(self, rng):
        rho = tensor_states(random_state(2, rng), random_state(3, rng))
        assert np.allclose(omega(rho).matrix, rho.matrix, atol=1e-14)

    def test_bell(self):
        assert np.allclose(omega(make_bell()).matrix, np.eye(4) / 4)

    def test_idempotent(self, rng):
        for _ in range(20):
            rho = random_state(6, rng, (2, 3))
            once = omega(rho)
            assert np.allclose(omega(once).matrix, once.matrix, atol=1e-14)

    def test_needs_dims(self):
        with pytest.raises(NoFactorDimsError):
            omega(maximally_mixed(4))


class TestIsProduct:
    def test_product(self, rng):
        assert is_product(tensor_states(random_state(2, rng), random_state(2, rng)))

    def test_bell(self):
        assert not is_product(make_bell())

    def test_separable_not_product(self):
        rho = classical_correlated().assemble()
        # omega gives the flat diagonal I/4, which differs from diag(1/2, 0, 0, 1/2)
        assert np.allclose(omega(rho).matrix, np.eye(4) / 4)
        assert not is_product(rho)


class TestPPT:
    def test_product_nonnegative(self, rng):
        for _ in range(20):
            rho = tensor_states(random_state(2, rng), random_state(3, rng))
            assert ppt_min_eigenvalue(rho) >= -1e-9

    def test_bell(self):
        pt = ptranspose_loops(make_bell().matrix, 2, 2)
        assert np.allclose(sorted(np.linalg.eigvalsh(pt)), [-0.5, 0.5, 0.5, 0.5])
        assert ppt_min_eigenvalue(make_bell()) == pytest.approx(-0.5, abs=1e-12)

    @pytest.mark.parametrize("p", np.linspace(0, 1, 21))
    def test_werner_formula(self, p):
        oracle = float(np.linalg.eigvalsh(ptranspose_loops(werner_matrix(p), 2, 2))[0])
        assert oracle == pytest.approx(min((1 - 3 * p) / 4, (1 + p) / 4), abs=1e-12)
        assert ppt_min_eigenvalue(make_werner(p)) == pytest.approx(oracle, abs=1e-12)
        assert (ppt_min_eigenvalue(make_werner(p)) < -1e-9) == (p > 1 / 3 + 1e-9)

    @pytest.mark.parametrize("dims", [(2, 3), (3, 2), (3, 3)])
    def test_matches_loop_oracle(self, rng, dims):
        rho = random_state(dims[0] * dims[1], rng, dims)
        oracle = np.linalg.eigvalsh(ptranspose_loops(rho.matrix, *dims))[0]
        assert ppt_min_eigenvalue(rho) == pytest.approx(oracle, abs=1e-12)

    def test_conclusive_dims(self):
        assert ppt_conclusive((2, 2)) and ppt_conclusive((2, 3)) and ppt_conclusive((3, 2))
        assert not ppt_conclusive((3, 3)) and not ppt_conclusive((2, 4))


class TestSegment:
    def test_product_constant(self, rng):
        rho = tensor_states(random_state(2, rng), random_state(2, rng))
        for pt in segment(rho, 5):
            assert np.allclose(pt.matrix, rho.matrix, atol=1e-14)

    def test_bell_three_points(self):
        bell = make_bell()
        pts = segment(bell, 3)
        assert np.allclose(pts[0].matrix, np.eye(4) / 4)
        assert np.allclose(pts[1].matrix, (bell.matrix + np.eye(4) / 4) / 2)
        assert np.array_equal(pts[2].matrix, bell.matrix)

    def test_midpoint_is_werner_half(self):
        pts = segment(make_bell(), 101)
        assert np.allclose(pts[50].matrix, werner_matrix(0.5), atol=1e-15)

    def test_points_are_states(self, rng):
        for pt in segment(random_state(6, rng, (3, 2)), 11):
            validate_density(pt.matrix, (3, 2))

    def test_bad_count(self):
        with pytest.raises(BadParameterError):
            segment(make_bell(), 1)

    def test_contained_in_invariant_polytope(self, rng):
        dec = random_separable(3, (2, 2), rng)
        poly = invariant_polytope(dec)
        for pt in segment(dec.assemble(), 21):
            assert hull_membership(pt, poly).inside


class TestSegmentScan:
    def test_werner_09(self):
        rep = segment_scan(make_werner(0.9), 101)
        assert rep.verdict is SegmentVerdict.ENTANGLED_DETECTED
        assert rep.conclusive
        # point x is Werner(0.9 x): violations exactly for 0.9 x > 1/3
        violated = rep.min_pt_eigenvalues < -1e-9
        assert np.array_equal(violated, 0.9 * rep.x_values > 1 / 3)
        assert np.allclose(rep.min_pt_eigenvalues, np.minimum((1 - 3 * 0.9 * rep.x_values) / 4, (1 + 0.9 * rep.x_values) / 4))

    def test_werner_02(self):
        rep = segment_scan(make_werner(0.2), 101)
        assert rep.verdict is SegmentVerdict.NO_VIOLATION_FOUND
        assert rep.conclusive
        assert np.all(rep.min_pt_eigenvalues > 0)

    def test_product(self, rng):
        rep = segment_scan(tensor_states(random_state(2, rng), random_state(2, rng)))
        assert rep.verdict is SegmentVerdict.NO_VIOLATION_FOUND and rep.conclusive

    def test_endpoints_included(self):
        rep = segment_scan(make_bell(), 7)
        assert rep.n_points == 7 and rep.x_values[0] == 0.0 and rep.x_values[-1] == 1.0

    def test_inconclusive_for_3x3(self, rng):
        dec = random_separable(2, (3, 3), rng)
        rep = segment_scan(dec.assemble(), 11)
        assert rep.verdict is SegmentVerdict.NO_VIOLATION_FOUND
        assert not rep.conclusive

    def test_csv(self):
        lines = segment_scan(make_werner(0.5), 3).to_csv().splitlines()
        assert lines[0] == "x,min_pt_eigenvalue"
        assert len(lines) == 4
        x, e = map(float, lines[2].split(","))
        assert x == 0.5 and e == pytest.approx((1 - 3 * 0.25) / 4)


class TestPureSeparability:
    def test_product(self):
        assert pure_separability(np.kron(KET0, PLUS))

    def test_bell(self):
        checks = pure_separability_checks(np.array([1, 0, 0, 1]) / np.sqrt(2), (2, 2))
        assert checks.reduced_entropy == pytest.approx(math.log(2))
        assert not pure_separability(np.array([1, 0, 0, 1]) / np.sqrt(2))

    def test_partially_entangled(self):
        psi = np.sqrt(0.9) * np.kron(KET0, KET0) + np.sqrt(0.1) * np.kron(KET1, KET1)
        expected = binary_entropy([0.9, 0.1])
        assert expected == pytest.approx(0.3251, abs=1e-4)
        assert pure_separability_checks(psi, (2, 2)).reduced_entropy == pytest.approx(expected, abs=1e-12)
        assert not pure_separability(psi)

    def test_not_normalized(self):
        with pytest.raises(NotNormalizedError):
            pure_separability(np.array([1, 0, 0, 1.0]))

    def test_qubit_qutrit(self, rng):
        a, b = random_pure_vector(2, rng), random_pure_vector(3, rng)
        assert pure_separability(np.kron(a, b), (2, 3))
        assert not pure_separability(random_pure_vector(6, rng), (2, 3))


class TestInvariantPolytope:
    def test_single_term(self, rng):
        a, b = random_state(2, rng), random_state(2, rng)
        dec = SeparableDecomposition.create([1.0], [a], [b])
        poly = invariant_polytope(dec)
        assert len(poly) == 1
        assert np.allclose(poly.vertices[0].matrix, np.kron(a.matrix, b.matrix))

    def test_classical_correlated(self):
        dec = classical_correlated()
        poly = invariant_polytope(dec)
        assert len(poly) == 4
        assert hull_membership(dec.assemble(), poly).inside
        assert is_css(poly)

    def test_random(self, rng):
        for n in range(1, 5):
            dec = random_separable(n, (2, 3), rng)
            poly = invariant_polytope(dec)
            assert len(poly) == n * n
            assert hull_membership(dec.assemble(), poly).inside
            assert is_css(poly)

    def test_unitary_covariance(self, rng):
        dec = random_separable(3, (2, 2), rng)
        u1, u2 = random_unitary(2, rng), random_unitary(2, rng)
        lhs = invariant_polytope(dec.transformed(u1, u2))
        rhs = local_unitary_transform(invariant_polytope(dec), u1, u2)
        assert polytope_equal(lhs, rhs)

    def test_vertices_ppt(self, rng):
        poly = invariant_polytope(random_separable(4, (2, 2), rng))
        assert all(ppt_min_eigenvalue(v) >= -1e-9 for v in poly.vertices)


class TestDecomposition:
    def test_invalid_weights(self, rng):
        a = [random_state(2, rng) for _ in range(2)]
        with pytest.raises(InvalidDecompositionError):
            SeparableDecomposition.create([0.7, 0.7], a, a)
        with pytest.raises(InvalidDecompositionError):
            SeparableDecomposition.create([1.5, -0.5], a, a)
        with pytest.raises(InvalidDecompositionError):
            SeparableDecomposition.create([1.0], a, a)

    def test_json_round_trip(self, rng):
        dec = random_separable(3, (2, 3), rng)
        back = decomposition_from_json(decomposition_to_json(dec))
        assert np.allclose(back.assemble().matrix, dec.assemble().matrix)

    def test_random_separable_is_ppt(self, rng):
        for _ in range(50):
            assert ppt_min_eigenvalue(random_separable(3, (2, 2), rng).assemble()) >= -1e-9

    def test_random_separable_bad_params(self):
        with pytest.raises(BadParameterError):
            random_separable(0, (2, 2))


class TestPPure:
    def test_classical_correlated(self):
        poly = p_pure_polytope(classical_correlated())
        assert len(poly) == 4
        assert min_entropy_over(poly) == 0.0

    def test_mixed_factor_rejected(self, rng):
        dec = SeparableDecomposition.create([1.0], [maximally_mixed(2)], [computational_projector(2, 0)])
        with pytest.raises(FactorNotPureError) as exc:
            p_pure_polytope(dec)
        assert exc.value.side == "factors_a" and exc.value.second_eigenvalue == pytest.approx(0.5)

    def test_werner_third(self):
        dec = werner_pure_decomposition(1 / 3)
        assert np.allclose(dec.assemble().matrix, werner_matrix(1 / 3), atol=1e-9)
        poly = p_pure_polytope(dec)
        assert hull_membership(make_werner(1 / 3), poly).inside
        assert min_entropy_over(poly) == 0.0

    @pytest.mark.parametrize("p", [0.0, 0.1, 0.25])
    def test_werner_below_threshold(self, p):
        dec = werner_pure_decomposition(p)
        assert np.allclose(dec.assemble().matrix, werner_matrix(p), atol=1e-9)

    def test_werner_entangled_rejected(self):
        with pytest.raises(BadParameterError):
            werner_pure_decomposition(0.5)

    def test_min_entropy_examples(self):
        mixed = maximally_mixed(4, (2, 2))
        from sepscope.geometry import ProductPolytope

        assert min_entropy_over(ProductPolytope.of([mixed])) == pytest.approx(math.log(4))
        ket00 = pure_state(np.kron(KET0, KET0), (2, 2))
        assert min_entropy_over(ProductPolytope.of([mixed, ket00])) == 0.0


class TestStates:
    def test_werner_endpoints(self):
        assert np.allclose(make_werner(0).matrix, np.eye(4) / 4)
        assert np.allclose(make_werner(1).matrix, make_bell().matrix)

    def test_werner_range(self):
        with pytest.raises(BadParameterError):
            make_werner(1.2)

    @pytest.mark.parametrize("kind", ["phi+", "phi-", "psi+", "psi-"])
    def test_bell_states_maximally_entangled(self, kind):
        rho = make_bell(kind)
        assert sm_measure(rho) == pytest.approx(0.75)
        assert ppt_min_eigenvalue(rho) == pytest.approx(-0.5)

    def test_bell_unknown(self):
        with pytest.raises(BadParameterError):
            make_bell("chi")

    def test_random_state_reproducible(self):
        a, b = random_state(4, 11), random_state(4, 11)
        assert np.array_equal(a.matrix, b.matrix)

    def test_schmidt_oracle_sanity(self):
        assert schmidt_rank(np.kron(KET0, PLUS), 2, 2) == 1
        assert schmidt_rank(np.array([1, 0, 0, 1]) / np.sqrt(2), 2, 2) == 2


class TestSoundness:
    @pytest.mark.parametrize("dims", [(2, 2), (2, 3)])
    def test_segment_never_flags_separable(self, dims):
        rng = np.random.default_rng(31337)
        flagged = 0
        for _ in range(10_000):
            dec = random_separable(int(rng.integers(1, 6)), dims, rng)
            if segment_scan(dec.assemble(), 101).verdict is SegmentVerdict.ENTANGLED_DETECTED:
                flagged += 1
        assert flagged == 0

    def test_pure_checks_agree(self, rng):
        for i in range(1000):
            dims = (2, 2) if i % 2 else (2, 3)
            if i % 4 < 2:
                psi = np.kron(random_pure_vector(dims[0], rng), random_pure_vector(dims[1], rng))
            else:
                psi = random_pure_vector(dims[0] * dims[1], rng)
            checks = pure_separability_checks(psi, dims)
            assert checks.by_entropy == checks.by_omega
            assert checks.by_entropy == (schmidt_rank(psi, *dims) == 1)
