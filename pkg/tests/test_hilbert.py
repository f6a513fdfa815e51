import json

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qgeo.errors import ConvergenceError, DimensionMismatchError, UnphysicalStateError
from qgeo.hilbert import (
    BELL_KINDS,
    EIGENVALUE_TOL,
    TRACE_TOL,
    BlochVector,
    DensityOperator,
    HermitianOperator,
    bell_state,
    bloch_from_density,
    bloch_from_json,
    bloch_to_json,
    canonical_bell_kind,
    density_from_bloch,
    eigendecompose,
    operator_from_json,
    operator_to_json,
    pauli_basis,
)
from strategies import ball_points


def random_hermitian(rng, n, scale=1.0):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (a + a.conj().T) / 2


class TestPauli:
    def test_sigma1_entries(self):
        s1, _, _ = pauli_basis()
        npt.assert_array_equal(s1.matrix, [[0, 1], [1, 0]])

    def test_orthogonality(self):
        sig = pauli_basis()
        for i, a in enumerate(sig):
            npt.assert_allclose(a.matrix @ a.matrix, np.eye(2))
            assert a.trace() == 0.0
            for j, b in enumerate(sig):
                assert np.trace(a.matrix @ b.matrix) == pytest.approx(2.0 * (i == j))

    def test_product(self):
        s1, s2, s3 = pauli_basis()
        npt.assert_allclose(s1.matrix @ s2.matrix, 1j * s3.matrix)


class TestHermitianOperator:
    def test_hermitized_exactly(self, rng):
        m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        h = HermitianOperator(m)
        assert np.array_equal(h.matrix, h.matrix.conj().T)

    def test_immutable(self):
        h = HermitianOperator(np.eye(2))
        with pytest.raises(ValueError):
            h.matrix[0, 0] = 3.0

    def test_not_square(self):
        with pytest.raises(DimensionMismatchError):
            HermitianOperator(np.zeros((2, 3)))

    def test_arithmetic_stays_hermitian(self):
        s1, s2, _ = pauli_basis()
        h = 0.5 * s1 + s2 - s1 / 4
        npt.assert_allclose(h.matrix, 0.25 * s1.matrix + s2.matrix)
        with pytest.raises(TypeError):
            s1 * 1j


class TestDensityOperator:
    def test_rejects_bad_trace(self):
        with pytest.raises(UnphysicalStateError):
            DensityOperator(np.eye(2))

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(UnphysicalStateError):
            DensityOperator(np.diag([1.5, -0.5]))

    def test_tolerances_exposed(self):
        assert TRACE_TOL == 1e-12 and EIGENVALUE_TOL == 1e-12
        DensityOperator(np.diag([1.0 + 0.5e-12, -0.5e-12]))


class TestDensityFromBloch:
    def test_center(self):
        npt.assert_array_equal(density_from_bloch([0, 0, 0]).matrix, np.eye(2) / 2)

    def test_north_pole(self):
        npt.assert_array_equal(density_from_bloch([0, 0, 1]).matrix, np.diag([1.0, 0.0]))

    def test_x_axis(self):
        npt.assert_allclose(density_from_bloch([0.6, 0, 0]).matrix, [[0.5, 0.3], [0.3, 0.5]], atol=1e-15)

    def test_outside_ball(self):
        with pytest.raises(UnphysicalStateError):
            density_from_bloch([0.8, 0.8, 0.0])

    @given(ball_points(cap=1.0))
    def test_spectrum(self, p):
        m = np.linalg.norm(p)
        w = eigendecompose(density_from_bloch(p)).eigenvalues
        npt.assert_allclose(w, [(1 - m) / 2, (1 + m) / 2], atol=1e-12)


class TestBlochFromDensity:
    def test_known(self):
        npt.assert_array_equal(bloch_from_density(DensityOperator(np.eye(2) / 2)).p, [0, 0, 0])
        npt.assert_array_equal(bloch_from_density(DensityOperator(np.diag([1.0, 0.0]))).p, [0, 0, 1])

    def test_round_trip_1000(self, rng):
        g = rng.normal(size=(1000, 3))
        v = g / np.linalg.norm(g, axis=1)[:, None] * rng.random(1000)[:, None] ** (1 / 3)
        err = max(np.max(np.abs(bloch_from_density(density_from_bloch(x)).p - x)) for x in v)
        assert err < 1e-12

    def test_round_trip_from_operator(self, rng):
        for _ in range(100):
            a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            rho = DensityOperator(a @ a.conj().T / np.trace(a @ a.conj().T).real)
            again = density_from_bloch(bloch_from_density(rho))
            assert again.allclose(rho, atol=1e-12)

    def test_wrong_dim(self):
        with pytest.raises(DimensionMismatchError):
            bloch_from_density(DensityOperator(np.eye(4) / 4))


class TestBell:
    def test_phi_plus(self):
        expect = 0.5 * np.array([[1, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0], [1, 0, 0, 1]])
        npt.assert_allclose(bell_state("φ+").matrix, expect, atol=1e-15)

    def test_orthogonal(self):
        assert abs(np.trace(bell_state("phi+").matrix @ bell_state("psi-").matrix)) < 1e-15

    def test_resolution_of_identity(self):
        total = sum(bell_state(k).matrix for k in BELL_KINDS)
        npt.assert_allclose(total, np.eye(4), atol=1e-15)

    @pytest.mark.parametrize("kind", BELL_KINDS)
    def test_projector(self, kind):
        r = bell_state(kind).matrix
        npt.assert_allclose(r @ r, r, atol=1e-12)
        assert np.trace(r).real == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("alias", ["φ−", "PHI-", "phi_minus"])
    def test_aliases(self, alias):
        assert canonical_bell_kind(alias) == "phi-"

    def test_unknown(self):
        with pytest.raises(ValueError):
            bell_state("chi+")


class TestEigendecompose:
    def test_diagonal(self):
        es = eigendecompose(np.diag([0.3, 0.7]))
        npt.assert_array_equal(es.eigenvalues, [0.3, 0.7])
        npt.assert_array_equal(es.eigenvectors, np.eye(2))

    def test_sigma1(self):
        npt.assert_allclose(eigendecompose(pauli_basis()[0]).eigenvalues, [-1, 1], atol=1e-15)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_random_reconstruction(self, rng, n):
        for _ in range(200):
            h = random_hermitian(rng, n)
            es = eigendecompose(h)
            assert np.linalg.norm(es.reconstruct() - h) < 1e-10
            u = es.eigenvectors
            assert np.linalg.norm(u.conj().T @ u - np.eye(n)) < 1e-10
            assert np.all(np.diff(es.eigenvalues) >= 0)

    def test_matches_lapack(self, rng):
        for _ in range(100):
            h = random_hermitian(rng, 4, scale=50.0)
            npt.assert_allclose(eigendecompose(h).eigenvalues, np.linalg.eigvalsh(h), atol=1e-10)

    def test_degenerate(self):
        h = np.diag([1.0, 1.0, 2.0]) + 0j
        h[0, 1] = h[1, 0] = 1e-14
        es = eigendecompose(h)
        assert np.linalg.norm(es.reconstruct() - h) < 1e-12

    def test_iteration_cap(self):
        with pytest.raises(ConvergenceError):
            eigendecompose(pauli_basis()[0], max_sweeps=0)

    @given(arrays(np.complex128, (3, 3), elements=st.complex_numbers(max_magnitude=10, allow_nan=False)))
    def test_property_reconstruction(self, m):
        h = (m + m.conj().T) / 2
        es = eigendecompose(h)
        scale = max(1.0, np.linalg.norm(h))
        assert np.linalg.norm(es.reconstruct() - h) < 1e-10 * scale


class TestJson:
    def test_operator_round_trip(self):
        r = density_from_bloch([0.1, -0.2, 0.3])
        obj = json.loads(json.dumps(operator_to_json(r)))
        assert obj["dim"] == 2 and set(obj) == {"dim", "re", "im"}
        back = operator_from_json(obj, DensityOperator)
        assert isinstance(back, DensityOperator)
        npt.assert_array_equal(back.matrix, r.matrix)

    def test_operator_shape_mismatch(self):
        with pytest.raises(ValueError):
            operator_from_json({"dim": 3, "re": [[1, 0], [0, 1]], "im": [[0, 0], [0, 0]]})

    def test_bloch_round_trip(self):
        b = BlochVector([0.1, 0.2, 0.3])
        assert bloch_to_json(b) == {"p": [0.1, 0.2, 0.3]}
        npt.assert_array_equal(bloch_from_json({"p": [0.1, 0.2, 0.3]}).p, b.p)
