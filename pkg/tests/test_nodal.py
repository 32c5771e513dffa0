"""Nodal counts, surplus statistics, and signing averages."""

import numpy as np
import pytest

from magnodal.errors import (
    CapExceededError,
    DegenerateDistributionError,
    DegenerateEdgeProductError,
    EdgeProductNotRealError,
    InadmissibleSigningError,
    NonSimpleEigenvalueError,
    VanishingEigenvectorError,
)
from magnodal.families import (
    complete_graph,
    cycle_graph,
    path_graph,
    random_connected_graph,
    random_operator,
    star_graph,
    strong_diagonal_fixture,
)
from magnodal.graphs import Graph, betti_number
from magnodal.nodal import (
    NormalizedSurplus,
    SurplusDistribution,
    average_surplus_distribution,
    edge_products,
    nodal_count,
    nodal_surplus,
    normalized_distribution,
    surplus_distribution,
)
from magnodal.operators import GaugePhase, SupportedMatrix, gauge_transform
from magnodal.spectral import eigh


def triangle_op():
    # frozen fixture: counts per k are (0, 2, 2)
    g = cycle_graph(3)
    return SupportedMatrix(g, np.array([0.1, 0.2, 0.3]),
                           -np.ones(3, dtype=np.complex128))


def half_admissible_op():
    """Triangle whose flux-0 signings all carry a vanishing eigenvector.

    (2, 1, 0) is an eigenvector of the base matrix at -1/2, so the four
    signings gauge equivalent to the identity are inadmissible while the
    four in the other switching class are fine.
    """
    g = Graph(3, ((0, 1), (0, 2), (1, 2)))
    return SupportedMatrix(g, np.array([0.0, 1.5, 5.0]),
                           np.array([-1.0, 0.5, -1.0], dtype=np.complex128))


class TestEdgeProducts:
    def test_empty_graph(self):
        h = SupportedMatrix(Graph(2, ()), np.array([1.0, 2.0]),
                            np.zeros(0, dtype=np.complex128))
        assert edge_products(h, np.array([1.0, 1.0])).shape == (0,)

    def test_single_edge_value(self):
        g = path_graph(2)
        h = SupportedMatrix(g, np.zeros(2),
                            np.array([-2.0], dtype=np.complex128))
        v = np.array([3.0, 5.0])
        assert edge_products(h, v)[0] == pytest.approx(-30.0)

    def test_complex_conjugation_order(self):
        g = path_graph(2)
        h = SupportedMatrix(g, np.zeros(2),
                            np.array([1j], dtype=np.complex128))
        v = np.array([1.0 + 1.0j, 1.0])
        # conj(v_0) * h_01 * v_1 = (1 - i) * i = i + 1
        assert edge_products(h, v)[0] == pytest.approx(1.0 + 1.0j)


class TestNodalCount:
    def test_two_vertex_closed_form(self):
        g = path_graph(2)
        for coupling in (-1.3, 0.8):
            h = SupportedMatrix(g, np.array([0.2, 0.9]),
                                np.array([coupling], dtype=np.complex128))
            assert nodal_count(h, 1) == 0
            assert nodal_count(h, 2) == 1

    def test_tree_counts_are_position_minus_one(self):
        rng = np.random.default_rng(11)
        for g in (path_graph(5), star_graph(4)):
            h = random_operator(g, rng)
            for k in range(1, g.n + 1):
                assert nodal_count(h, k) == k - 1

    def test_triangle_frozen_counts(self):
        h = triangle_op()
        assert [nodal_count(h, k) for k in (1, 2, 3)] == [0, 2, 2]

    def test_triangle_matches_direct_computation(self):
        h = triangle_op()
        dense = h.to_dense()
        w, vecs = np.linalg.eigh(dense)
        for k in range(1, 4):
            v = vecs[:, k - 1]
            direct = sum(1 for (r, s) in h.graph.edges
                         if v[r] * dense[r, s] * v[s] > 0)
            assert nodal_count(h, k) == direct

    def test_gauge_invariance(self):
        h = strong_diagonal_fixture(complete_graph(4))
        rng = np.random.default_rng(5)
        theta = GaugePhase(rng.uniform(0, 2 * np.pi, size=4))
        hg = gauge_transform(theta, h)
        for k in range(1, 5):
            assert nodal_count(hg, k) == nodal_count(h, k)

    def test_bounds_on_random_instances(self):
        rng = np.random.default_rng(29)
        done = 0
        while done < 30:
            n = int(rng.integers(3, 9))
            mmax = n * (n - 1) // 2
            g = random_connected_graph(n, int(rng.integers(n - 1, mmax + 1)),
                                       rng)
            h = random_operator(g, rng)
            beta = betti_number(g)
            try:
                counts = [nodal_count(h, k) for k in range(1, n + 1)]
            except (NonSimpleEigenvalueError, VanishingEigenvectorError,
                    DegenerateEdgeProductError):
                continue
            for k, c in enumerate(counts, start=1):
                assert k - 1 <= c <= k - 1 + beta
            done += 1

    def test_precomputed_eigensystem(self):
        h = triangle_op()
        es = eigh(h)
        assert nodal_count(h, 2, es=es) == nodal_count(h, 2)


class TestNodalCountErrors:
    def test_degenerate_eigenvalue(self):
        g = cycle_graph(3)
        h = SupportedMatrix(g, np.zeros(3), -np.ones(3, dtype=np.complex128))
        with pytest.raises(NonSimpleEigenvalueError) as err:
            nodal_count(h, 2)
        assert err.value.multiplicity == 2

    def test_vanishing_eigenvector(self):
        g = path_graph(3)
        h = SupportedMatrix(g, np.zeros(3), -np.ones(2, dtype=np.complex128))
        with pytest.raises(VanishingEigenvectorError) as err:
            nodal_count(h, 2)
        assert tuple(err.value.vertices) == (1,)

    def test_complex_entries_off_critical(self):
        g = cycle_graph(3)
        off = np.array([-np.exp(1j * np.pi / 4), -1.0, -1.0])
        h = SupportedMatrix(g, np.array([0.1, 0.2, 0.3]), off)
        with pytest.raises(EdgeProductNotRealError):
            nodal_count(h, 1)

    def test_tiny_edge_product(self):
        g = path_graph(2)
        h = SupportedMatrix(g, np.array([0.0, 1e7]),
                            np.array([-1.0], dtype=np.complex128))
        with pytest.raises(DegenerateEdgeProductError) as err:
            nodal_count(h, 1)
        assert tuple(err.value.edges) == ((0, 1),)


class TestNodalSurplus:
    def test_triangle_surpluses(self):
        h = triangle_op()
        assert [nodal_surplus(h, k) for k in (1, 2, 3)] == [0, 1, 0]

    def test_tree_surplus_is_zero(self):
        rng = np.random.default_rng(2)
        h = random_operator(path_graph(4), rng)
        assert all(nodal_surplus(h, k) == 0 for k in range(1, 5))


class TestSurplusDistributionClass:
    def test_shape_validation(self):
        with pytest.raises(ValueError):
            SurplusDistribution(2, np.array([1, 2]), 3)

    def test_sum_validation(self):
        with pytest.raises(ValueError):
            SurplusDistribution(1, np.array([2, 3]), 4)

    def test_binomial_moments_exact(self):
        d = SurplusDistribution(3, np.array([32, 96, 96, 32]), 256)
        assert d.probs.tolist() == [0.125, 0.375, 0.375, 0.125]
        assert d.mean == 1.5
        assert d.variance == 0.75

    def test_counts_read_only(self):
        d = SurplusDistribution(1, np.array([1, 1]), 2)
        with pytest.raises(ValueError):
            d.counts[0] = 5


class TestSingleMatrixDistribution:
    def test_tree_concentrates_at_zero(self):
        rng = np.random.default_rng(7)
        h = random_operator(star_graph(3), rng)
        d = surplus_distribution(h)
        assert d.betti == 0 and d.counts.tolist() == [4]

    def test_triangle(self):
        d = surplus_distribution(triangle_op())
        assert d.counts.tolist() == [2, 1]
        assert d.n_samples == 3


class TestAveragedDistribution:
    def test_triangle_binomial_exact(self):
        h = strong_diagonal_fixture(complete_graph(3))
        d = average_surplus_distribution(h)
        assert d.counts.tolist() == [12, 12]
        assert d.probs.tolist() == [0.5, 0.5]
        assert d.mean == 0.5 and d.variance == 0.25

    def test_k4_binomial_exact(self):
        h = strong_diagonal_fixture(complete_graph(4))
        d = average_surplus_distribution(h)
        assert d.counts.tolist() == [32, 96, 96, 32]
        assert d.mean == 1.5 and d.variance == 0.75

    def test_class_weighted_agrees_with_full(self):
        h = strong_diagonal_fixture(complete_graph(4))
        full = average_surplus_distribution(h)
        classed = average_surplus_distribution(h, by_gauge_classes=True)
        assert classed.counts.tolist() == full.counts.tolist()
        assert classed.n_samples == full.n_samples

    def test_threads_agree(self):
        h = strong_diagonal_fixture(complete_graph(4))
        one = average_surplus_distribution(h, threads=1)
        three = average_surplus_distribution(h, threads=3)
        assert one.counts.tolist() == three.counts.tolist()

    def test_complex_matrix_rejected(self):
        g = path_graph(2)
        h = SupportedMatrix(g, np.zeros(2),
                            np.array([np.exp(0.3j)]))
        with pytest.raises(ValueError):
            average_surplus_distribution(h)

    def test_edge_cap(self):
        h = strong_diagonal_fixture(complete_graph(8))
        with pytest.raises(CapExceededError):
            average_surplus_distribution(h)

    def test_inadmissible_reports_lowest_index(self):
        h = half_admissible_op()
        with pytest.raises(InadmissibleSigningError) as err:
            average_surplus_distribution(h)
        assert tuple(int(s) for s in err.value.signs) == (1, 1, 1)
        assert "vanish" in err.value.reason

    def test_skip_inadmissible(self):
        d = average_surplus_distribution(half_admissible_op(),
                                         skip_inadmissible=True)
        assert d.skipped == 4
        assert d.n_samples == 12
        assert d.counts.tolist() == [8, 4]

    def test_skip_inadmissible_by_classes(self):
        d = average_surplus_distribution(half_admissible_op(),
                                         by_gauge_classes=True,
                                         skip_inadmissible=True)
        assert d.skipped == 4
        assert d.counts.tolist() == [8, 4]

    def test_threads_report_lowest_index_too(self):
        h = half_admissible_op()
        with pytest.raises(InadmissibleSigningError) as err:
            average_surplus_distribution(h, threads=2)
        assert tuple(int(s) for s in err.value.signs) == (1, 1, 1)

    def test_equal_diagonal_histogram_is_symmetric(self):
        rng = np.random.default_rng(3)
        g = complete_graph(4)
        off = -rng.uniform(0.5, 1.5, size=6)
        h = SupportedMatrix(g, np.zeros(4), off.astype(np.complex128))
        d = average_surplus_distribution(h)
        assert d.counts.tolist() == [16, 112, 112, 16]
        assert d.counts.tolist() == d.counts.tolist()[::-1]


class TestNormalizedDistribution:
    def test_single_cycle(self):
        d = average_surplus_distribution(
            strong_diagonal_fixture(complete_graph(3)))
        nd = normalized_distribution(d)
        assert nd.sigma == 0.5
        assert nd.points.tolist() == [-1.0, 1.0]
        assert nd.first_moment == 0.0
        assert nd.second_moment == 1.0

    def test_three_cycles(self):
        d = average_surplus_distribution(
            strong_diagonal_fixture(complete_graph(4)))
        nd = normalized_distribution(d)
        assert nd.sigma == pytest.approx(np.sqrt(0.75), abs=1e-15)
        assert abs(nd.first_moment) <= 1e-15
        assert abs(nd.second_moment - 1.0) <= 1e-12

    def test_asymmetric_counts(self):
        d = SurplusDistribution(1, np.array([3, 1]), 4)
        nd = normalized_distribution(d)
        assert nd.sigma == 0.5
        assert nd.first_moment == pytest.approx(-0.5)
        assert nd.second_moment == pytest.approx(1.0)

    def test_degenerate_rejected(self):
        with pytest.raises(DegenerateDistributionError):
            normalized_distribution(SurplusDistribution(2, np.array([0, 5, 0]),
                                                        5))
        with pytest.raises(DegenerateDistributionError):
            normalized_distribution(SurplusDistribution(0, np.array([4]), 4))
