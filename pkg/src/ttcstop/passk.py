"""Unbiased Pass@K estimation from per-problem correctness samples.

Drawing n samples per problem once yields estimates for every K <= n, so
a single evaluation at the largest probed K covers all smaller K for
free. Dataset-level numbers are reported in percentage points.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .errors import EmptyDataset, KExceedsSamples
from .fitting import AccuracyPoint


@dataclass(frozen=True)
class CorrectnessMatrix:
    """Boolean sample outcomes, one row per validation problem.

    Rows may have different lengths; every row needs at least one sample.
    """

    rows: tuple[tuple[bool, ...], ...]
    problem_ids: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(tuple(bool(v) for v in row) for row in self.rows))
        for i, row in enumerate(self.rows):
            if len(row) == 0:
                raise ValueError(f"problem {i}: at least one sample required")
        if self.problem_ids is not None:
            object.__setattr__(self, "problem_ids", tuple(str(p) for p in self.problem_ids))
            if len(self.problem_ids) != len(self.rows):
                raise ValueError("problem_ids length must match rows")

    @property
    def n_problems(self) -> int:
        return len(self.rows)

    def counts(self) -> list[tuple[int, int]]:
        """Per-problem (samples drawn, samples correct)."""
        return [(len(row), sum(row)) for row in self.rows]

    def min_samples(self) -> int:
        return min(len(row) for row in self.rows)


def pass_at_k(n: int, c: int, k: int) -> float:
    """Probability that a uniformly random size-k subset of n samples,
    c of them correct, contains at least one correct sample.

    Computed as 1 - C(n-c, k)/C(n, k) on exact integer binomials
    (factorial-free and bit-identical to exhaustive subset enumeration),
    with early exits for the all-wrong and not-enough-wrong cases.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > n:
        raise KExceedsSamples(f"k={k} exceeds n={n} samples")
    if not 0 <= c <= n:
        raise ValueError(f"c={c} outside [0, n={n}]")
    if c == 0:
        return 0.0
    if n - c < k:
        return 1.0
    return 1.0 - comb(n - c, k) / comb(n, k)


def passk_over_dataset(m: CorrectnessMatrix, k: int) -> float:
    """Mean per-problem pass@k over the dataset, in percentage points.

    Summation is in fixed row order so results are bit-stable.
    """
    if m.n_problems == 0:
        raise EmptyDataset("correctness matrix has no rows")
    if k > m.min_samples():
        raise KExceedsSamples(f"k={k} exceeds the smallest row ({m.min_samples()} samples)")
    total = 0.0
    for n, c in m.counts():
        total += pass_at_k(n, c, k)
    return 100.0 * total / m.n_problems


def probe_series(m: CorrectnessMatrix, ks: list[int]) -> list[AccuracyPoint]:
    """Pass@k points for each probed k, all from the one matrix.

    The matrix is consumed once; the FLOPs charge for the whole series is
    a single evaluation at max(ks), not the sum over ks.
    """
    if not ks:
        raise ValueError("ks must be nonempty")
    if list(ks) != sorted(set(ks)):
        raise ValueError("ks must be strictly increasing")
    return [AccuracyPoint(x=float(k), y=passk_over_dataset(m, k)) for k in ks]
