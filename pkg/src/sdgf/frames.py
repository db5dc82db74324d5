"""Spark computation and linear-dependency certificates for finite frames."""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceeded
from .gabor import Lattice, Window, gabor_atom

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class FrameMatrix:
    vectors: np.ndarray
    source: str = ""

    @property
    def P(self) -> int:
        return self.vectors.shape[0]

    @property
    def L(self) -> int:
        return self.vectors.shape[1]


@dataclass
class SparkReport:
    """Outcome of a spark search.

    ``spark`` is exact when ``exact`` is true; otherwise it is an upper bound
    certified by ``witness``.
    """

    spark: int | None
    exact: bool
    method: str
    witness: tuple[int, ...] | None = None
    trials: int = 0
    singular_gap: tuple[float, float] | None = None
    notes: list[str] = field(default_factory=list)

    def describe(self) -> str:
        if self.spark is None:
            value = "unknown (no dependency found)"
        elif self.exact:
            value = str(self.spark)
        else:
            value = f"<= {self.spark}"
        lines = [f"method: {self.method}", f"spark: {value}"]
        if self.witness is not None:
            lines.append("witness: " + " ".join(map(str, self.witness)))
        if self.trials:
            lines.append(f"trials: {self.trials}")
        if self.singular_gap is not None:
            lines.append("singular gap: smallest={:.3e} largest={:.3e}".format(*self.singular_gap))
        lines.extend(self.notes)
        return "\n".join(lines)


def build_frame_matrix(g: Window, lat: Lattice) -> FrameMatrix:
    rows = np.empty((lat.P, lat.L), dtype=complex)
    for m in range(lat.M):
        for n in range(lat.N):
            rows[m * lat.N + n] = gabor_atom(g, lat, n, m)
    return FrameMatrix(rows, f"{g.kind}:L={lat.L},a={lat.a},b={lat.b}")


def numerical_rank(rows, tol: float = DEFAULT_TOL) -> int:
    rows = np.atleast_2d(np.asarray(rows))
    if rows.size == 0:
        return 0
    s = np.linalg.svd(rows, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def is_dependent(rows, tol: float = DEFAULT_TOL) -> bool:
    rows = np.atleast_2d(rows)
    return numerical_rank(rows, tol) < rows.shape[0]


def spark_exhaustive(f: FrameMatrix, tol: float = DEFAULT_TOL, max_subsets: int = 10**6) -> SparkReport:
    """Exact spark by scanning subsets in increasing size."""
    P, L = f.vectors.shape
    kmax = min(L + 1, P)
    budget = sum(math.comb(P, k) for k in range(1, kmax + 1))
    if budget > max_subsets:
        raise BudgetExceeded(f"{budget} subsets exceed budget {max_subsets}; use randomized search")
    for k in range(1, kmax + 1):
        if k > L:
            # any L+1 vectors in C^L are dependent
            return SparkReport(k, True, "exhaustive", tuple(range(k)))
        for subset in itertools.combinations(range(P), k):
            s = np.linalg.svd(f.vectors[list(subset)], compute_uv=False)
            if s[0] == 0 or s[-1] <= tol * s[0]:
                return SparkReport(k, True, "exhaustive", subset, singular_gap=(float(s[-1]), float(s[0])))
    return SparkReport(kmax + 1, True, "exhaustive")


def find_dependent_subset(
    f: FrameMatrix,
    size: int,
    trials: int = 1000,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    *,
    groups: list[tuple[int, ...]] | None = None,
) -> SparkReport:
    """Randomized search for a dependent subset of at most ``size`` rows.

    Without ``groups``, candidates are uniform ``size``-subsets. With
    ``groups`` (disjoint index tuples, e.g. symmetry orbits), each candidate
    is a union of randomly chosen groups holding at most ``size`` rows.
    A returned witness always re-verifies with :func:`numerical_rank`.
    """
    if size > f.L:
        raise ValueError(f"size {size} exceeds ambient dimension {f.L}")
    rng = np.random.default_rng(seed)
    for trial in range(1, trials + 1):
        if groups:
            order = rng.permutation(len(groups))
            subset: list[int] = []
            for gi in order:
                if len(subset) + len(groups[gi]) > size:
                    break
                subset.extend(groups[gi])
        else:
            subset = list(rng.choice(f.P, size=size, replace=False))
        subset = sorted(int(i) for i in subset)
        if not subset:
            continue
        rows = f.vectors[subset]
        s = np.linalg.svd(rows, compute_uv=False)
        if s[0] > 0 and s[-1] <= tol * s[0] and len(s) == len(subset):
            log.info("dependency of size %d found at trial %d (s_min/s_max=%.2e)", len(subset), trial, s[-1] / s[0])
            return SparkReport(
                len(subset),
                False,
                "randomized" + ("-groups" if groups else ""),
                tuple(subset),
                trials=trial,
                singular_gap=(float(s[-1]), float(s[0])),
            )
    return SparkReport(None, False, "randomized" + ("-groups" if groups else ""), trials=trials)


def witness_csv(witness, lat: Lattice) -> str:
    """Witness rows as CSV ``index,m,n`` (row index is ``m*N + n``)."""
    lines = ["index,m,n"]
    for i in witness:
        lines.append(f"{i},{i // lat.N},{i % lat.N}")
    return "\n".join(lines) + "\n"
