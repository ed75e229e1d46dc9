"""Numerical kernels: Bessel J0, dense eigensolver, determinant phase, expm step."""

from __future__ import annotations

import math

import numpy as np
import pytest
import scipy.integrate
import scipy.special

import floquet_qc as fq
from floquet_qc import (
    Boundary,
    LatticeConfig,
    Model,
    ModelSpec,
    SingularMatrix,
    StepTooLarge,
    bessel_j0,
    build_real_space,
    det_phase_and_log_abs,
    eig_dense,
    expm_multiply_step,
    matrix_inf_norm,
)
from floquet_qc.numerics import (
    REAL_AXIS_SNAP,
    is_numerically_diagonal,
    parity_permutation,
    pt_parity_center,
    pt_real_form,
    pt_vectors_to_sites,
)

from helpers import assignment_max_distance, char_poly_roots


class TestBesselJ0:
    def test_at_zero(self):
        assert bessel_j0(0.0) == 1.0

    def test_first_zero(self):
        assert abs(bessel_j0(2.404825557695773)) <= 1e-12

    def test_at_one(self):
        assert bessel_j0(1.0) == pytest.approx(0.7651976865579666, abs=1e-13)

    def test_against_reference_over_contract_range(self):
        xs = np.linspace(-50.0, 50.0, 801)
        worst = max(abs(bessel_j0(float(x)) - scipy.special.j0(x)) for x in xs)
        assert worst <= 1e-12

    def test_bounded_and_matches_integral_representation(self):
        for x in np.linspace(0.0, 20.0, 41):
            val = bessel_j0(float(x))
            assert val * val <= 1.0 + 1e-15
            quad, _ = scipy.integrate.quad(lambda t: math.cos(x * math.sin(t)), 0.0, math.pi)
            assert val == pytest.approx(quad / math.pi, abs=1e-10)


class TestEigDense:
    def test_diagonal_example(self):
        d = eig_dense(np.diag([1.0 + 2.0j, 3.0 + 0.0j]))
        assert np.allclose(d.values, [1.0 + 2.0j, 3.0 + 0.0j], atol=1e-15)

    def test_symmetric_two_by_two(self):
        d = eig_dense(np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex))
        assert np.allclose(d.values, [-1.0, 1.0], atol=1e-14)

    def test_against_characteristic_polynomial_oracle(self, drive0):
        lat = LatticeConfig(5, 2, 3, Boundary.open())
        spec = ModelSpec(Model.M3, J=1.0, V=1.0, gamma=0.0)
        H = build_real_space(spec, lat, drive0).matrix
        mine = eig_dense(H).values
        oracle = char_poly_roots(H)
        assert assignment_max_distance(mine, oracle) <= 1e-8

    def test_values_sorted_lexicographically(self):
        rng = np.random.default_rng(2)
        H = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
        vals = eig_dense(H).values
        keys = [(v.real, v.imag) for v in vals]
        assert keys == sorted(keys)

    def test_residual_contract_random_and_model_matrices(self, lat89, drive0):
        rng = np.random.default_rng(7)
        cases = [rng.normal(size=(20, 20)) + 1j * rng.normal(size=(20, 20))]
        cases.append(
            build_real_space(ModelSpec(Model.M2, J=2.0, V=1.0, gamma=0.5), lat89, drive0).matrix
        )
        for H in cases:
            d = eig_dense(H, want_vectors=True)
            norm = np.linalg.norm(H, 2)
            for k in range(d.dim):
                v = d.right_vectors[:, k]
                assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)
                residual = np.linalg.norm(H @ v - d.values[k] * v)
                assert residual <= 1e-10 * norm

    def test_hermitian_spectrum_real(self, lat89, drive0):
        H = build_real_space(ModelSpec(Model.M2, J=2.0, V=1.0, gamma=0.0), lat89, drive0).matrix
        assert np.max(np.abs(H - H.conj().T)) == 0.0
        vals = eig_dense(H).values
        assert float(np.max(np.abs(vals.imag))) <= 1e-10 * np.linalg.norm(H, 2)

    def test_trace_identity(self):
        rng = np.random.default_rng(11)
        for dim in (3, 17, 40):
            H = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            vals = eig_dense(H).values
            assert abs(vals.sum() - np.trace(H)) <= 1e-9 * np.linalg.norm(H, 2)

    def test_phase_consistent_with_det_phase(self):
        rng = np.random.default_rng(13)
        for dim in (4, 9, 25):
            H = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            vals = eig_dense(H).values
            phase, _ = det_phase_and_log_abs(H)
            product_phase = float(np.sum(np.angle(vals)))
            diff = (product_phase - phase + math.pi) % (2.0 * math.pi) - math.pi
            assert abs(diff) <= 1e-8

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            eig_dense(np.zeros((2, 3)))

    def test_diagonal_fast_path_keeps_exact_values(self):
        # off-diagonal mass below machine noise: the exact diagonal answer wins
        H = np.diag([0.5 - 0.5j, -1.0 + 0.25j, 2.0 + 0j]).astype(complex)
        H[0, 1] = 1e-18
        assert is_numerically_diagonal(H)
        d = eig_dense(H, want_vectors=True)
        assert set(d.values) == {0.5 - 0.5j, -1.0 + 0.25j, 2.0 + 0j}
        for k in range(3):
            v = d.right_vectors[:, k]
            assert np.count_nonzero(v) == 1  # pristine basis vectors
        assert not is_numerically_diagonal(
            np.array([[1.0, 1e-3], [0.0, 2.0]], dtype=complex)
        )

    def test_real_matrix_tight_pair_resolution(self):
        # A real matrix whose 2x2 block has a tiny positive discriminant:
        # the real QR path may round the pair complex; the invariant-subspace
        # refinement must land both eigenvalues exactly on the real axis.
        H = np.array([[1.0, 1.0], [1e-14, 1.0]], dtype=complex)
        vals = eig_dense(H).values
        assert float(np.max(np.abs(vals.imag))) == 0.0
        # a genuinely complex pair of the same scale survives
        Hc = np.array([[1.0, 1.0], [-1e-10, 1.0]], dtype=complex)
        vals_c = eig_dense(Hc).values
        assert float(np.max(np.abs(vals_c.imag))) == pytest.approx(1e-5, rel=1e-3)
        # conjugate pairs below the snap threshold are structurally real
        Hs = np.array([[1.0, 1.0], [-1e-14, 1.0]], dtype=complex)
        vals_s = eig_dense(Hs).values
        assert float(np.max(np.abs(vals_s.imag))) <= REAL_AXIS_SNAP


class TestDetPhase:
    def test_identity(self):
        for dim in (1, 2, 7):
            phase, log_abs = det_phase_and_log_abs(np.eye(dim, dtype=complex))
            assert phase == pytest.approx(0.0, abs=1e-14)
            assert log_abs == pytest.approx(0.0, abs=1e-14)

    def test_one_by_one_imaginary_unit(self):
        phase, log_abs = det_phase_and_log_abs(np.array([[1j]]))
        assert phase == pytest.approx(math.pi / 2, abs=1e-14)
        assert log_abs == pytest.approx(0.0, abs=1e-14)

    def test_minus_identity_two_by_two(self):
        phase, log_abs = det_phase_and_log_abs(np.diag([-1.0, -1.0]).astype(complex))
        assert phase % (2.0 * math.pi) == pytest.approx(0.0, abs=1e-12)
        assert log_abs == pytest.approx(0.0, abs=1e-14)

    def test_log_abs_matches_eigenvalue_sum(self):
        rng = np.random.default_rng(3)
        for dim in (8, 33, 64):
            H = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            _, log_abs = det_phase_and_log_abs(H)
            vals = eig_dense(H).values
            assert log_abs == pytest.approx(float(np.sum(np.log(np.abs(vals)))), abs=1e-6)

    def test_no_overflow_at_large_dimension(self):
        H = 3.0 * np.eye(2000, dtype=complex)  # det = 3^2000, far beyond float range
        phase, log_abs = det_phase_and_log_abs(H)
        assert phase == pytest.approx(0.0, abs=1e-9)
        assert log_abs == pytest.approx(2000 * math.log(3.0), rel=1e-12)

    @pytest.mark.filterwarnings("ignore")
    def test_singular_matrix_raises(self):
        with pytest.raises(SingularMatrix):
            det_phase_and_log_abs(np.array([[1.0, 1.0], [1.0, 1.0]], dtype=complex))


class TestExpmStep:
    def test_zero_hamiltonian_gives_identity(self):
        U = expm_multiply_step(np.zeros((5, 5), dtype=complex), 0.3)
        assert np.allclose(U, np.eye(5), atol=1e-14)

    def test_diagonal_phases(self):
        w = np.array([0.3, -1.2, 2.0])
        U = expm_multiply_step(np.diag(w).astype(complex), 0.4)
        assert np.allclose(np.diag(U), np.exp(-1j * w * 0.4), atol=1e-13)

    def test_hermitian_gives_unitary(self):
        rng = np.random.default_rng(4)
        A = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
        H = (A + A.conj().T) / 2
        dt = 0.9 / matrix_inf_norm(H)
        U = expm_multiply_step(H, dt)
        assert np.linalg.norm(U.conj().T @ U - np.eye(12)) <= 1e-10

    def test_matches_exact_spectral_exponential(self):
        rng = np.random.default_rng(5)
        A = rng.normal(size=(10, 10)) + 1j * rng.normal(size=(10, 10))
        H = (A + A.conj().T) / 2
        w, W = np.linalg.eigh(H)
        dt = 0.8 / matrix_inf_norm(H)
        exact = W @ np.diag(np.exp(-1j * w * dt)) @ W.conj().T
        U = expm_multiply_step(H, dt)
        assert np.linalg.norm(U - exact) / np.linalg.norm(exact) <= 1e-12

    def test_step_norm_precondition(self):
        H = np.diag([4.0, 4.0]).astype(complex)
        with pytest.raises(StepTooLarge):
            expm_multiply_step(H, 0.3)  # ||H||_inf * dt = 1.2 > 1
        expm_multiply_step(H, 0.25)  # exactly at the bound: fine


class TestPTSimilarity:
    """Real similarity image of PT-symmetric rings (structural spectral reality)."""

    def test_parity_permutation_is_involution(self):
        for L, two_center in ((89, 0), (144, 1), (10, 4)):
            p = parity_permutation(L, two_center)
            assert np.array_equal(p[p], np.arange(L))

    def test_parity_center_solves_congruence(self, lat144):
        # bond-mirror sampling on an even ring: shift pi/L pairs sites with bonds
        two_center = pt_parity_center(lat144.alpha_num, 144, math.pi / 144)
        assert two_center is not None and two_center % 2 == 1
        site_center = pt_parity_center(55, 89, 0.0)
        assert site_center is not None
        assert pt_parity_center(55, 89, 0.123) is None  # not a half-quantum shift

    def test_real_form_preserves_spectrum(self, lat89, drive0):
        spec = ModelSpec(Model.M2, J=2.0, V=1.0, gamma=0.5)
        H = build_real_space(spec, lat89, drive0).matrix
        parity = parity_permutation(89, pt_parity_center(55, 89, 0.0))
        R = pt_real_form(H, parity)
        assert R is not None
        assert float(np.max(np.abs(R.imag))) == 0.0
        assert assignment_max_distance(eig_dense(R).values, np.linalg.eigvals(H)) <= 1e-8

    def test_real_form_rejects_broken_symmetry(self, lat89, drive0):
        spec = ModelSpec(Model.M2, J=2.0, V=1.0, gamma=0.5)
        H = build_real_space(spec, lat89, drive0).matrix.copy()
        H[3, 3] += 0.1j  # explicit symmetry breaking
        parity = parity_permutation(89, pt_parity_center(55, 89, 0.0))
        assert pt_real_form(H, parity) is None

    def test_vector_map_back_to_sites(self, lat89, drive0):
        spec = ModelSpec(Model.M2, J=2.0, V=1.0, gamma=0.3)
        H = build_real_space(spec, lat89, drive0).matrix
        parity = parity_permutation(89, pt_parity_center(55, 89, 0.0))
        R = pt_real_form(H, parity)
        d = eig_dense(R, want_vectors=True)
        site_vectors = pt_vectors_to_sites(d.right_vectors, parity)
        for k in (0, 44, 88):
            v = site_vectors[:, k]
            residual = np.linalg.norm(H @ v - d.values[k] * v)
            assert residual <= 1e-10 * np.linalg.norm(H, 2)
