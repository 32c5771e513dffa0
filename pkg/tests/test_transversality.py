"""Degeneracy strata, transversality tests, and splitting diagnostics."""

import numpy as np
import pytest

from magnodal.errors import StratumAmbiguousError
from magnodal.families import (
    complete_graph,
    cycle_graph,
    degenerate_ring_fixture,
    path_graph,
    random_connected_graph,
    random_join_fixture,
    random_operator,
    strong_diagonal_fixture,
    two_triangle_join,
)
from magnodal.graphs import Graph
from magnodal.operators import SupportedMatrix
from magnodal.transversality import (
    EigenspaceBasis,
    codim_stratum,
    eigenspace_basis,
    find_edge_separated_pair,
    is_transverse_at,
    projects_surjectively,
    splits_graph,
    support_of_eigenspace,
)


def manual_basis(vectors, eigenvalue=0.0):
    v = np.asarray(vectors, dtype=np.complex128)
    return EigenspaceBasis(eigenvalue=eigenvalue, k_first=1,
                           dim=v.shape[1], vectors=v)


class TestCodim:
    def test_values(self):
        assert codim_stratum(1) == 0
        assert codim_stratum(2) == 3
        assert codim_stratum(3) == 8

    def test_fixed_eigenvalue(self):
        assert codim_stratum(1, fixed_eigenvalue=True) == 1
        assert codim_stratum(2, fixed_eigenvalue=True) == 4
        assert codim_stratum(3, fixed_eigenvalue=True) == 9

    def test_positive_required(self):
        with pytest.raises(ValueError):
            codim_stratum(0)


class TestEigenspaceBasis:
    def test_simple_eigenvalues(self):
        h = strong_diagonal_fixture(cycle_graph(3))
        for k in (1, 2, 3):
            b = eigenspace_basis(h, k)
            assert b.dim == 1 and b.k_first == k
            assert b.vectors.shape == (3, 1)

    def test_orthonormal(self):
        h, k = two_triangle_join()
        b = eigenspace_basis(h, k)
        assert b.dim == 2
        gram = b.vectors.conj().T @ b.vectors
        np.testing.assert_allclose(gram, np.eye(2), atol=1e-12)

    def test_join_cluster_eigenvalue(self):
        h, k = two_triangle_join()
        b = eigenspace_basis(h, k)
        assert b.eigenvalue == pytest.approx(1.0, abs=1e-9)

    def test_interior_query_rejected(self):
        h, k = degenerate_ring_fixture(4)
        with pytest.raises(StratumAmbiguousError):
            eigenspace_basis(h, k + 1)


class TestSupport:
    def test_coordinate_vector(self):
        b = manual_basis(np.array([[1.0], [0.0], [0.0]]))
        assert support_of_eigenspace(b) == (0,)

    def test_plus_minus_pair(self):
        r = 1 / np.sqrt(2)
        b = manual_basis(np.array([[r, r], [r, -r], [0.0, 0.0]]))
        assert support_of_eigenspace(b) == (0, 1)

    def test_rotation_invariance(self):
        rng = np.random.default_rng(9)
        q, _ = np.linalg.qr(rng.normal(size=(5, 2)))
        c, s = np.cos(0.7), np.sin(0.7)
        rot = np.array([[c, -s], [s, c]])
        assert support_of_eigenspace(manual_basis(q)) \
            == support_of_eigenspace(manual_basis(q @ rot))

    def test_join_fixture_avoids_shared_vertex(self):
        h, k = two_triangle_join()
        b = eigenspace_basis(h, k)
        assert support_of_eigenspace(b) == (1, 2, 3, 4)


class TestSplitsGraph:
    def test_join_fixture_splits(self):
        h, k = two_triangle_join()
        assert splits_graph(h.graph, eigenspace_basis(h, k))

    def test_nowhere_vanishing_does_not_split(self):
        h = strong_diagonal_fixture(cycle_graph(3))
        assert not splits_graph(h.graph, eigenspace_basis(h, 1))

    def test_ring_cluster_does_not_split(self):
        h, k = degenerate_ring_fixture(4)
        assert not splits_graph(h.graph, eigenspace_basis(h, k))

    def test_empty_support_rejected(self):
        b = manual_basis(np.zeros((3, 1)))
        with pytest.raises(ValueError):
            splits_graph(path_graph(3), b)


class TestProjectsSurjectively:
    def test_coordinate_pair(self):
        b = manual_basis(np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]))
        assert projects_surjectively(b, (0, 1))

    def test_rank_one_block(self):
        b = manual_basis(np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]]))
        assert not projects_surjectively(b, (0, 1))

    def test_multiplicity_two_only(self):
        b = manual_basis(np.array([[1.0], [0.0]]))
        with pytest.raises(ValueError):
            projects_surjectively(b, (0, 1))

    def test_join_fixture_fails_on_every_edge(self):
        h, k = two_triangle_join()
        b = eigenspace_basis(h, k)
        assert not any(projects_surjectively(b, e) for e in h.graph.edges)


class TestIsTransverse:
    def test_simple_eigenvalues_always_transverse(self):
        rng = np.random.default_rng(14)
        for _ in range(12):
            n = int(rng.integers(3, 7))
            mmax = n * (n - 1) // 2
            g = random_connected_graph(n, int(rng.integers(n - 1, mmax + 1)),
                                       rng)
            h = random_operator(g, rng)
            rep = is_transverse_at(h, 1)
            assert rep.transverse and rep.multiplicity == 1
            assert rep.codimension == 0
            assert rep.compression_rank == 1
            assert rep.kernel_witness is None

    def test_complete_graph_has_no_offgraph_directions(self):
        h = strong_diagonal_fixture(complete_graph(4))
        rep = is_transverse_at(h, 2)
        assert rep.transverse
        assert rep.smallest_singular_value == np.inf
        assert rep.kernel_dimension == 0

    def test_join_fixture_not_transverse(self):
        h, k = two_triangle_join()
        rep = is_transverse_at(h, k)
        assert not rep.transverse
        assert rep.multiplicity == 2 and rep.codimension == 3
        assert rep.compression_rank < 4
        assert rep.kernel_dimension >= 1
        x = rep.kernel_witness
        assert x is not None
        scale = max(1.0, h.norm_fro)
        np.testing.assert_allclose(x, x.conj().T, atol=1e-12)
        assert np.max(np.abs(np.diag(x))) <= 1e-12
        for (r, s) in h.graph.edges:
            assert abs(x[r, s]) <= 1e-12
        assert np.linalg.norm(x) == pytest.approx(1.0)
        lam = rep.eigenvalue
        resid = np.linalg.norm((h.to_dense() - lam * np.eye(5)) @ x)
        assert resid <= 1e-8 * scale

    def test_random_join_fixtures_not_transverse(self):
        for seed in (0, 1, 2):
            h, k = random_join_fixture(np.random.default_rng(seed))
            rep = is_transverse_at(h, k)
            assert not rep.transverse and rep.multiplicity == 2

    def test_ring_cluster_transverse(self):
        h, k = degenerate_ring_fixture(4)
        rep = is_transverse_at(h, k)
        assert rep.transverse and rep.multiplicity == 2
        assert rep.compression_rank == 4

    def test_interior_query_rejected(self):
        h, k = degenerate_ring_fixture(4)
        with pytest.raises(StratumAmbiguousError):
            is_transverse_at(h, k + 1)


class TestEdgeSeparatedPair:
    def test_join_fixture_pair(self):
        h, k = two_triangle_join()
        b = eigenspace_basis(h, k)
        pair = find_edge_separated_pair(h.graph, b)
        assert pair is not None
        u, v = pair
        assert np.linalg.norm(u) == pytest.approx(1.0)
        assert np.linalg.norm(v) == pytest.approx(1.0)
        # supports never share an edge
        for (r, s) in h.graph.edges:
            assert min(abs(u[r]), abs(u[s])) * min(abs(v[r]), abs(v[s])) \
                <= 1e-12
        # both are genuine eigenvectors of the cluster
        shifted = h.to_dense() - b.eigenvalue * np.eye(5)
        assert np.linalg.norm(shifted @ u) <= 1e-9 * max(1.0, h.norm_fro)
        assert np.linalg.norm(shifted @ v) <= 1e-9 * max(1.0, h.norm_fro)
        # the outer-product witness kills transversality
        x = np.outer(u, v.conj()) + np.outer(v, u.conj())
        resid = np.linalg.norm(shifted @ x)
        assert resid <= 1e-9 * max(1.0, h.norm_fro) * np.linalg.norm(x)

    def test_manual_path_construction(self):
        g = path_graph(3)
        b = manual_basis(np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]]))
        pair = find_edge_separated_pair(g, b)
        assert pair is not None
        u, v = pair
        vecs = sorted([tuple(np.round(np.abs(u), 12)),
                       tuple(np.round(np.abs(v), 12))])
        assert vecs == [(0.0, 0.0, 1.0), (1.0, 0.0, 0.0)]

    def test_connected_support_gives_none(self):
        h, k = degenerate_ring_fixture(4)
        assert find_edge_separated_pair(h.graph,
                                        eigenspace_basis(h, k)) is None

    def test_single_component_simple(self):
        h = strong_diagonal_fixture(cycle_graph(3))
        assert find_edge_separated_pair(h.graph,
                                        eigenspace_basis(h, 1)) is None
