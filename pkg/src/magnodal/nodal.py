"""Nodal edge counts and surplus statistics over signings.

The nodal count of an eigenvector is the number of edges on which the
product ``conj(v_r) h_rs v_s`` is positive.  At real matrices, and more
generally at critical points of the eigenvalue, these products are
real; the count then exceeds ``k - 1`` by a surplus between 0 and the
number of independent cycles.  Averaging the surplus over all signings
of a real matrix gives the distribution the rest of the library keeps
poking at from different directions.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateDistributionError,
    DegenerateEdgeProductError,
    EdgeProductNotRealError,
    InadmissibleSigningError,
    NonSimpleEigenvalueError,
    VanishingEigenvectorError,
)
from .graphs import betti_number, num_components
from .operators import SIGNING_CAP, SupportedMatrix, signs_for_index
from .spectral import (
    DEGENERACY_TOL,
    VANISH_TOL,
    EigenSystem,
    eigh,
    is_nowhere_vanishing,
    multiplicity,
)

#: Edge products must be real within this times the matrix norm.
PRODUCT_REAL_TOL = 1e-9

#: Edge products closer to zero than this times the matrix norm have no sign.
PRODUCT_DEGENERATE_TOL = 1e-12


def edge_products(h: SupportedMatrix, v: np.ndarray) -> np.ndarray:
    """The complex products ``conj(v_r) h_rs v_s`` per canonical edge."""
    if not h.graph.edges:
        return np.zeros(0, dtype=np.complex128)
    rs = np.array(h.graph.edges)
    return np.conj(v[rs[:, 0]]) * h.offdiag * v[rs[:, 1]]


def nodal_count(h: SupportedMatrix, k: int, *,
                es: EigenSystem | None = None,
                tol_degeneracy: float = DEGENERACY_TOL,
                tol_vanish: float = VANISH_TOL,
                tol_real: float = PRODUCT_REAL_TOL,
                tol_product: float = PRODUCT_DEGENERATE_TOL) -> int:
    """Number of edges with a positive edge product for eigenvector k.

    The eigenvalue must be simple, the eigenvector nowhere vanishing,
    and every edge product real and bounded away from zero; each
    failure raises its own error type.  On a connected graph the count
    lands in ``[k - 1, k - 1 + beta]``.
    """
    if es is None:
        es = eigh(h)
    m, _ = multiplicity(es, k, tol_degeneracy)
    if m != 1:
        raise NonSimpleEigenvalueError(
            f"eigenvalue {k} has multiplicity {m}; nodal count undefined",
            k=k, multiplicity=m)
    v = es.vector(k)
    ok, vanishing = is_nowhere_vanishing(v, tol_vanish)
    if not ok:
        raise VanishingEigenvectorError(
            f"eigenvector {k} vanishes at vertices {vanishing}",
            vertices=vanishing)
    products = edge_products(h, v)
    scale = h.norm_fro
    if products.size:
        worst = float(np.max(np.abs(products.imag)))
        if worst > tol_real * scale:
            raise EdgeProductNotRealError(
                f"edge products for eigenvector {k} are not real "
                f"(max imaginary part {worst:.3e}); the matrix is not at a "
                f"critical point")
        small = np.abs(products.real) < tol_product * scale
        if np.any(small):
            bad = [h.graph.edges[i] for i in np.nonzero(small)[0]]
            raise DegenerateEdgeProductError(
                f"edge products too close to zero on edges {bad}", edges=bad)
    count = int(np.count_nonzero(products.real > 0.0))
    if num_components(h.graph) == 1:
        beta = betti_number(h.graph)
        assert k - 1 <= count <= k - 1 + beta, (
            f"nodal count {count} violates bounds for k={k}, beta={beta}")
    return count


def nodal_surplus(h: SupportedMatrix, k: int, **kwargs) -> int:
    """Nodal count minus ``k - 1``; in ``[0, beta]`` on connected graphs."""
    surplus = nodal_count(h, k, **kwargs) - (k - 1)
    if num_components(h.graph) == 1:
        assert 0 <= surplus <= betti_number(h.graph)
    return surplus


@dataclass(frozen=True, eq=False)
class SurplusDistribution:
    """Histogram of surplus values with exact integer counts."""

    betti: int
    counts: np.ndarray
    n_samples: int
    skipped: int = 0

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64).copy()
        if c.shape != (self.betti + 1,):
            raise ValueError("count vector must have beta + 1 entries")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)
        if int(c.sum()) != self.n_samples:
            raise ValueError("counts do not sum to the sample count")

    @property
    def probs(self) -> np.ndarray:
        return self.counts / float(self.n_samples)

    @property
    def mean(self) -> float:
        s = np.arange(self.betti + 1)
        return float(np.dot(s, self.probs))

    @property
    def variance(self) -> float:
        s = np.arange(self.betti + 1)
        p = self.probs
        mu = float(np.dot(s, p))
        return float(np.dot((s - mu) ** 2, p))


def surplus_distribution(h: SupportedMatrix, **kwargs) -> SurplusDistribution:
    """Surplus histogram over all eigenvalue positions of one matrix."""
    es = eigh(h)
    beta = betti_number(h.graph)
    counts = np.zeros(beta + 1, dtype=np.int64)
    for k in range(1, h.graph.n + 1):
        counts[nodal_surplus(h, k, es=es, **kwargs)] += 1
    return SurplusDistribution(beta, counts, h.graph.n)


def _sweep_chunk(h: SupportedMatrix, start: int, stop: int, beta: int,
                 skip_inadmissible: bool, kwargs
                 ) -> tuple[np.ndarray, int, tuple | None]:
    """Count surpluses for signing indices in ``[start, stop)``.

    Returns the counts, the number of skipped signings, and the first
    failure as ``(index, k, message)`` when not skipping.
    """
    m = h.graph.num_edges
    counts = np.zeros(beta + 1, dtype=np.int64)
    skipped = 0
    for index in range(start, stop):
        signs = signs_for_index(index, m)
        hs = SupportedMatrix(h.graph, h.diag, h.offdiag * signs)
        es = eigh(hs)
        try:
            for k in range(1, h.graph.n + 1):
                counts[nodal_surplus(hs, k, es=es, **kwargs)] += 1
        except (NonSimpleEigenvalueError, VanishingEigenvectorError,
                EdgeProductNotRealError, DegenerateEdgeProductError) as exc:
            if skip_inadmissible:
                skipped += 1
                continue
            k = getattr(exc, "k", None)
            return counts, skipped, (index, k, str(exc))
    return counts, skipped, None


def average_surplus_distribution(h: SupportedMatrix, *,
                                 cap: int = SIGNING_CAP,
                                 by_gauge_classes: bool = False,
                                 skip_inadmissible: bool = False,
                                 threads: int = 1,
                                 **kwargs) -> SurplusDistribution:
    """Exact surplus histogram averaged over every signing.

    Counts are accumulated as integers and divided once, so the
    probabilities are exact ratios.  With ``by_gauge_classes`` only one
    representative per switching class is solved and its counts are
    weighted by the class size; the result must agree with the full
    sweep.  With ``skip_inadmissible`` failing signings are dropped and
    counted instead of aborting; the result then averages over the
    admissible signings only, which is a deliberate departure from the
    all-signings average.
    """
    if not h.is_real:
        raise ValueError("the signing average is defined for real matrices")
    beta = betti_number(h.graph)
    m = h.graph.num_edges

    if by_gauge_classes:
        from .operators import gauge_classes_of_signings

        classes = gauge_classes_of_signings(h, cap=cap)
        counts = np.zeros(beta + 1, dtype=np.int64)
        skipped = 0
        for rep in classes.representatives:
            hs = SupportedMatrix(h.graph, h.diag, h.offdiag * np.asarray(rep))
            es = eigh(hs)
            try:
                local = np.zeros(beta + 1, dtype=np.int64)
                for k in range(1, h.graph.n + 1):
                    local[nodal_surplus(hs, k, es=es, **kwargs)] += 1
            except (NonSimpleEigenvalueError, VanishingEigenvectorError,
                    EdgeProductNotRealError, DegenerateEdgeProductError) as exc:
                if skip_inadmissible:
                    skipped += (1 << m) // classes.num_classes
                    continue
                raise InadmissibleSigningError(
                    f"signing with pattern {rep} is inadmissible: {exc}",
                    signs=rep, k=getattr(exc, "k", None), reason=str(exc))
            counts += local * ((1 << m) // classes.num_classes)
        total = (1 << m) * h.graph.n - skipped * h.graph.n
        return SurplusDistribution(beta, counts, total, skipped=skipped)

    if m > cap:
        from .errors import CapExceededError

        raise CapExceededError(
            f"signing sweep over {m} edges exceeds the cap of {cap}")

    total_signings = 1 << m
    threads = max(1, int(threads))
    if threads == 1:
        chunks = [(0, total_signings)]
    else:
        step = max(1, total_signings // (threads * 8))
        chunks = [(i, min(i + step, total_signings))
                  for i in range(0, total_signings, step)]

    results = []
    if threads == 1:
        for start, stop in chunks:
            results.append(_sweep_chunk(h, start, stop, beta,
                                        skip_inadmissible, kwargs))
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(_sweep_chunk, h, start, stop, beta,
                                   skip_inadmissible, kwargs)
                       for start, stop in chunks]
            results = [f.result() for f in futures]

    counts = np.zeros(beta + 1, dtype=np.int64)
    skipped = 0
    failure = None
    for local, local_skipped, local_failure in results:
        counts += local
        skipped += local_skipped
        if local_failure is not None and (failure is None
                                          or local_failure[0] < failure[0]):
            failure = local_failure
    if failure is not None:
        index, k, message = failure
        signs = tuple(signs_for_index(index, m))
        raise InadmissibleSigningError(
            f"signing {index} with pattern {signs} is inadmissible at "
            f"k={k}: {message}", signs=signs, k=k, reason=message)
    total = total_signings * h.graph.n - skipped * h.graph.n
    return SurplusDistribution(beta, counts, total, skipped=skipped)


@dataclass(frozen=True, eq=False)
class NormalizedSurplus:
    """Surplus distribution recentred at beta/2 and scaled to unit spread."""

    points: np.ndarray
    weights: np.ndarray
    sigma: float

    @property
    def first_moment(self) -> float:
        return float(np.dot(self.points, self.weights))

    @property
    def second_moment(self) -> float:
        return float(np.dot(self.points ** 2, self.weights))


def normalized_distribution(dist: SurplusDistribution) -> NormalizedSurplus:
    """Map surplus value ``s`` to ``(s - beta/2) / sigma``.

    ``sigma`` is the root mean square deviation from ``beta/2``, so the
    second moment of the result is 1 by construction; the first moment
    is 0 exactly when the counts are symmetric about ``beta/2``.
    """
    beta = dist.betti
    s = np.arange(beta + 1, dtype=np.float64)
    p = dist.probs
    var = float(np.dot((s - beta / 2.0) ** 2, p))
    if var <= 0.0:
        raise DegenerateDistributionError(
            "distribution is concentrated at beta/2; nothing to normalize")
    sigma = float(np.sqrt(var))
    return NormalizedSurplus((s - beta / 2.0) / sigma, p.copy(), sigma)
