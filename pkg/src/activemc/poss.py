"""Budgeted batch selection as bi-objective Pareto subset optimization.

Candidates are missing entries with a score (to maximize) and a per-column
cost (to minimize). Subsets are bit vectors rated on two objectives:
j1 = minus the total score, with a +inf sentinel for the empty subset and
for subsets costing at least twice the budget; j2 = the total cost. An
evolutionary loop keeps an archive of mutually nondominated subsets, and
the final answer is the best-scoring archived subset within the budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError


@dataclass
class BiObjectiveProblem:
    candidates: list[tuple[int, int]]
    informativeness: np.ndarray
    costs: np.ndarray
    budget: float

    def __post_init__(self):
        self.informativeness = np.asarray(self.informativeness, dtype=float)
        self.costs = np.asarray(self.costs, dtype=float)
        n = len(self.candidates)
        if len(set(self.candidates)) != n:
            raise ValueError("candidate entries must be distinct")
        if self.informativeness.shape != (n,) or self.costs.shape != (n,):
            raise DimensionMismatchError("scores and costs must match the candidate count")
        if n and not (self.costs > 0).all():
            raise ValueError("all candidate costs must be positive")
        if n and not (self.informativeness >= 0).all():
            raise ValueError("informativeness must be nonnegative")
        if self.budget <= 0:
            raise ValueError("budget must be positive")

    def __len__(self) -> int:
        return len(self.candidates)


@dataclass
class Solution:
    bits: np.ndarray
    j1: float
    j2: float


def evaluate(problem: BiObjectiveProblem, bits) -> Solution:
    b = np.asarray(bits, dtype=bool)
    if b.shape != (len(problem),):
        raise DimensionMismatchError("bit vector length does not match candidate count")
    j2 = float(problem.costs[b].sum())
    if not b.any() or j2 >= 2.0 * problem.budget:
        j1 = math.inf
    else:
        j1 = -float(problem.informativeness[b].sum())
    return Solution(bits=b.copy(), j1=j1, j2=j2)


def dominates(a: Solution, b: Solution) -> bool:
    return (a.j1 <= b.j1 and a.j2 <= b.j2) and (a.j1 < b.j1 or a.j2 < b.j2)


def mutate(bits, flip_prob: float, rng: np.random.Generator) -> np.ndarray:
    """Flip each bit independently with probability ``flip_prob``."""
    if not 0.0 < flip_prob <= 1.0:
        raise ValueError("flip_prob must lie in (0, 1]")
    b = np.asarray(bits, dtype=bool)
    return b ^ (rng.random(b.shape) < flip_prob)


@dataclass
class SolutionArchive:
    """Mutually nondominated solutions, with vectorized dominance scans."""

    solutions: list[Solution] = field(default_factory=list)

    def __post_init__(self):
        self._j1 = np.array([s.j1 for s in self.solutions])
        self._j2 = np.array([s.j2 for s in self.solutions])

    def __len__(self) -> int:
        return len(self.solutions)

    def weakly_dominated(self, candidate: Solution) -> bool:
        """True when some archived solution is <= the candidate in both objectives."""
        if not self.solutions:
            return False
        return bool(np.any((self._j1 <= candidate.j1) & (self._j2 <= candidate.j2)))

    def insert(self, candidate: Solution) -> None:
        """Add a non-dominated candidate, evicting everything it weakly dominates."""
        if self.solutions:
            evict = (candidate.j1 <= self._j1) & (candidate.j2 <= self._j2)
            if evict.any():
                keep = ~evict
                self.solutions = [s for s, k in zip(self.solutions, keep) if k]
                self._j1 = self._j1[keep]
                self._j2 = self._j2[keep]
        self.solutions.append(candidate)
        self._j1 = np.append(self._j1, candidate.j1)
        self._j2 = np.append(self._j2, candidate.j2)

    def mutually_nondominated(self) -> bool:
        """Full pairwise check; used by tests and debug assertions."""
        for i, a in enumerate(self.solutions):
            for j, b in enumerate(self.solutions):
                if i != j and dominates(a, b):
                    return False
        return True


def default_iterations(problem: BiObjectiveProblem) -> int:
    """Mutation budget scaled to the largest subset the sentinel lets through."""
    n = len(problem)
    if n == 0:
        return 1
    cardinality_cap = min(n, math.ceil(2.0 * problem.budget / float(problem.costs.min())))
    return max(1, math.ceil(2.0 * math.e * cardinality_cap**2 * n))


def poss_optimize(problem: BiObjectiveProblem, iterations: int | None = None,
                  rng: np.random.Generator | None = None,
                  flip_prob: float | None = None) -> list[tuple[int, int]]:
    """Evolve the archive, then return the best in-budget subset's entries.

    Starts from the empty subset; each iteration mutates a uniformly chosen
    archived solution and keeps it only if nothing archived is at least as
    good in both objectives. Deterministic for a given seeded ``rng``.
    """
    n = len(problem)
    if n == 0:
        return []
    if iterations is None:
        iterations = default_iterations(problem)
    if iterations < 1:
        raise ValueError("iterations must be at least 1")
    if rng is None:
        rng = np.random.default_rng(0)
    if flip_prob is None:
        flip_prob = 1.0 / n

    archive = SolutionArchive([evaluate(problem, np.zeros(n, dtype=bool))])
    for _ in range(iterations):
        parent = archive.solutions[int(rng.integers(len(archive)))]
        child = evaluate(problem, mutate(parent.bits, flip_prob, rng))
        if archive.weakly_dominated(child):
            continue
        archive.insert(child)

    best: Solution | None = None
    for sol in archive.solutions:
        if sol.j2 <= problem.budget and math.isfinite(sol.j1):
            if best is None or (sol.j1, sol.j2) < (best.j1, best.j2):
                best = sol
    if best is None:
        return []
    return [problem.candidates[i] for i in np.nonzero(best.bits)[0]]


def exhaustive_optimum(problem: BiObjectiveProblem) -> tuple[float, np.ndarray]:
    """Brute-force best total score under the budget; small pools only."""
    n = len(problem)
    if n > 20:
        raise ValueError("exhaustive search is limited to 20 candidates")
    patterns = ((np.arange(2**n)[:, None] >> np.arange(n)) & 1).astype(bool)
    total_cost = patterns @ problem.costs
    total_gain = patterns @ problem.informativeness
    feasible = total_cost <= problem.budget
    total_gain[~feasible] = -np.inf
    best = int(np.argmax(total_gain))
    return float(total_gain[best]), patterns[best]
