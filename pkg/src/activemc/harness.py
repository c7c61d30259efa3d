"""Closed-loop acquisition experiments: complete, train, evaluate, query.

Each replicate splits the data, hides a fraction of the training matrix,
then repeats for a fixed number of rounds: fit the supervised completion
(warm-started from the previous round), snapshot the recovered matrix for
the variance scores, evaluate the trained model on the held-out rows, pick
the next batch of entries by the configured strategy, and buy their true
values from the oracle. Records carry the state *before* each round's
purchase, so the first row of every learning curve sits at zero cost.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .acquisition import (
    CostModel,
    InformativenessTracker,
    informativeness,
    select_cost_ratio,
    select_top_k,
)
from .completion import CompletionConfig, fit
from .errors import (
    DegenerateLabelsError,
    DimensionMismatchError,
    PoolExhausted,
    StratificationError,
)
from .linear_model import LabeledSplit, accuracy, auc, decision_values
from .matrix import PartialMatrix, _as_matrix
from .poss import BiObjectiveProblem, poss_optimize

STRATEGIES = ("variance", "cost_ratio", "poss", "random")
COST_SCHEMES = ("uniform", "random")

_SPLIT_RETRIES = 100


@dataclass
class Oracle:
    """Holds the full ground truth and answers entry queries at column cost."""

    ground_truth: np.ndarray
    costs: CostModel

    def __post_init__(self):
        self.ground_truth = _as_matrix(self.ground_truth).copy()
        if self.costs.column_costs.shape[0] != self.ground_truth.shape[1]:
            raise DimensionMismatchError("cost vector length does not match columns")

    def value(self, row: int, col: int) -> float:
        return float(self.ground_truth[row, col])

    def batch_cost(self, entries) -> float:
        return float(sum(self.costs.column_costs[col] for _, col in entries))


@dataclass
class ExperimentPlan:
    """Flat experiment configuration; mirrors the JSON config files 1:1."""

    # dataset reference (resolved by the CLI; tests inject arrays directly)
    data: str | None = None
    label_col: str = "last"
    positive_label: str | None = None
    delimiter: str = ","
    has_header: bool = False
    standardize: bool = True
    # split and masking
    train_fraction: float = 0.7
    observed_rate: float = 0.6
    # acquisition
    strategy: str = "variance"
    batch_size: int = 10
    budget_per_round: float = 50.0
    rounds: int = 10
    window: int = 0
    cost_scheme: str = "uniform"
    poss_pool: int = 200
    poss_iterations: int = 5000
    # completion solver
    lambda1: float = 1.0
    lambda2: float = 1.0
    ridge: float = 1.0
    tol: float = 1e-6
    max_inner: int = 300
    max_outer: int = 10
    # replication
    seed: int = 0
    replicates: int = 10

    def __post_init__(self):
        if not 0.0 < self.train_fraction <= 1.0:
            raise ValueError("train_fraction must lie in (0, 1]")
        if not 0.0 < self.observed_rate <= 1.0:
            raise ValueError("observed_rate must lie in (0, 1]")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}")
        if self.cost_scheme not in COST_SCHEMES:
            raise ValueError(f"cost_scheme must be one of {COST_SCHEMES}")
        if self.rounds < 1:
            raise ValueError("rounds must be at least 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        if self.budget_per_round <= 0:
            raise ValueError("budget_per_round must be positive")
        if self.window < 0:
            raise ValueError("window must be 0 (unbounded) or positive")
        if self.replicates < 1:
            raise ValueError("replicates must be at least 1")

    def completion_config(self) -> CompletionConfig:
        return CompletionConfig(
            lambda1=self.lambda1,
            lambda2=self.lambda2,
            tol=self.tol,
            max_inner=self.max_inner,
            max_outer=self.max_outer,
            ridge=self.ridge,
        )

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentPlan":
        return cls(**json.loads(text))


@dataclass
class RoundRecord:
    round: int
    cumulative_cost: float
    queried_entries: int | float
    recon_rel: float
    recon_msq: float
    train_objective: float
    test_accuracy: float
    test_auc: float


@dataclass
class ExperimentResult:
    replicates: list[list[RoundRecord]]
    mean: list[RoundRecord]
    # per replicate, per round: the entries bought after that round's record
    queries: list[list[list[tuple[int, int]]]] = field(default_factory=list)


def make_split(features, labels, train_fraction: float, seed) -> tuple[LabeledSplit, LabeledSplit]:
    """Seeded row partition; resamples until both sides hold both classes.

    The train side gets ``floor(train_fraction * n)`` rows. An empty test
    side (train_fraction close to 1) is allowed and skips the class check.
    """
    x = _as_matrix(features)
    y = np.asarray(labels, dtype=int)
    if x.shape[0] != y.shape[0]:
        raise DimensionMismatchError("feature rows and labels disagree in length")
    if not 0.0 < train_fraction <= 1.0:
        raise ValueError("train_fraction must lie in (0, 1]")
    if y.size == 0 or y.min() == y.max():
        raise DegenerateLabelsError("dataset must contain both classes")

    rng = np.random.default_rng(seed)
    n_train = int(np.floor(train_fraction * y.size))
    for _ in range(_SPLIT_RETRIES):
        perm = rng.permutation(y.size)
        tr, te = perm[:n_train], perm[n_train:]
        if len(tr) == 0 or y[tr].min() == y[tr].max():
            continue
        if len(te) > 0 and y[te].min() == y[te].max():
            continue
        return (
            LabeledSplit(x[tr], y[tr], role="train"),
            LabeledSplit(x[te], y[te], role="test"),
        )
    raise StratificationError(
        f"no two-class split found in {_SPLIT_RETRIES} attempts "
        f"(n={y.size}, train_fraction={train_fraction})"
    )


def init_mask(shape: tuple[int, int], observed_rate: float, seed) -> np.ndarray:
    """Boolean grid with exactly floor(rate * n * d) True cells, seeded."""
    if not 0.0 < observed_rate <= 1.0:
        raise ValueError("observed_rate must lie in (0, 1]")
    n, d = shape
    rng = np.random.default_rng(seed)
    k = int(np.floor(observed_rate * n * d))
    mask = np.zeros(n * d, dtype=bool)
    mask[rng.choice(n * d, size=k, replace=False)] = True
    return mask.reshape(n, d)


def reconstruction_errors(x_hat, x_true) -> tuple[float, float]:
    """(relative Frobenius error, squared Frobenius error per entry)."""
    a = _as_matrix(x_hat)
    b = _as_matrix(x_true)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shape mismatch: {a.shape} vs {b.shape}")
    num = float(np.linalg.norm(a - b, "fro"))
    den = float(np.linalg.norm(b, "fro"))
    if num == 0.0:
        rel = 0.0
    elif den == 0.0:
        rel = float("inf")
    else:
        rel = num / den
    return rel, num * num / (a.shape[0] * a.shape[1])


def observed_column_stats(values: np.ndarray, mask: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-column mean and std over observed cells; silent columns get std 1."""
    counts = mask.sum(axis=0)
    sums = np.where(mask, values, 0.0).sum(axis=0)
    means = np.divide(sums, counts, out=np.zeros_like(sums), where=counts > 0)
    sq = np.where(mask, (values - means) ** 2, 0.0).sum(axis=0)
    variances = np.divide(sq, counts, out=np.zeros_like(sq), where=counts > 0)
    stds = np.sqrt(variances)
    stds[stds <= 1e-12] = 1.0
    return means, stds


def _random_batch(missing, size, rng):
    chosen = rng.choice(len(missing), size=min(size, len(missing)), replace=False)
    return [missing[i] for i in sorted(chosen.tolist())]


def _random_within_budget(missing, costs, budget, rng):
    order = rng.permutation(len(missing))
    picked, spent = [], 0.0
    for i in order.tolist():
        row, col = missing[i]
        price = float(costs.column_costs[col])
        if spent + price <= budget:
            picked.append((row, col))
            spent += price
    return picked


def _select_batch(plan: ExperimentPlan, tracker: InformativenessTracker,
                  obs: PartialMatrix, costs: CostModel,
                  rng: np.random.Generator) -> list[tuple[int, int]]:
    missing = obs.missing_indices()
    if not missing:
        raise PoolExhausted("every entry is observed")

    if plan.strategy == "random":
        return _random_batch(missing, plan.batch_size, rng)

    # Variance scores need at least two snapshots; before that, fall back
    # to random selection among the missing entries.
    if tracker.retained < 2:
        if plan.strategy == "poss":
            return _random_within_budget(missing, costs, plan.budget_per_round, rng)
        return _random_batch(missing, plan.batch_size, rng)

    scored = informativeness(tracker, obs.mask)
    if plan.strategy == "variance":
        return select_top_k(scored, plan.batch_size)
    if plan.strategy == "cost_ratio":
        return select_cost_ratio(scored, costs, plan.batch_size)

    # poss: restrict the pool to the highest-variance entries so the bit
    # vectors stay short, then optimize the batch under the round budget.
    pool = sorted(scored, key=lambda e: (-e.score, e.row, e.col))[: plan.poss_pool]
    problem = BiObjectiveProblem(
        candidates=[(e.row, e.col) for e in pool],
        informativeness=[e.score for e in pool],
        costs=[costs.column_costs[e.col] for e in pool],
        budget=plan.budget_per_round,
    )
    return poss_optimize(problem, iterations=plan.poss_iterations, rng=rng)


def _replicate_streams(seed: int, replicate: int):
    base = np.random.SeedSequence([seed, replicate])
    return base.spawn(4)  # split, mask, costs, selection


def run_replicate(plan: ExperimentPlan, features: np.ndarray, labels: np.ndarray,
                  replicate: int) -> tuple[list[RoundRecord], list[list[tuple[int, int]]]]:
    """One seeded replicate of the closed loop."""
    split_ss, mask_ss, cost_ss, select_ss = _replicate_streams(plan.seed, replicate)

    train, test = make_split(features, labels, plan.train_fraction, split_ss)
    mask = init_mask(train.features.shape, plan.observed_rate, mask_ss)

    d = train.features.shape[1]
    if plan.cost_scheme == "random":
        column_costs = np.random.default_rng(cost_ss).integers(1, 11, size=d).astype(float)
    else:
        column_costs = np.ones(d)
    costs = CostModel(column_costs, plan.budget_per_round)

    x_true = train.features.copy()
    test_x = test.features.copy()
    if plan.standardize:
        means, stds = observed_column_stats(x_true, mask)
        x_true = (x_true - means) / stds
        test_x = (test_x - means) / stds

    oracle = Oracle(x_true, costs)
    obs = PartialMatrix(np.where(mask, x_true, 0.0), mask)
    tracker = InformativenessTracker(plan.window)
    cfg = plan.completion_config()
    select_rng = np.random.default_rng(select_ss)

    warm = None
    cumulative_cost = 0.0
    queried = 0
    records: list[RoundRecord] = []
    queries: list[list[tuple[int, int]]] = []

    for round_index in range(1, plan.rounds + 1):
        result = fit(obs, train.labels, cfg, warm_start=warm)
        warm = result.x_hat
        tracker.record_snapshot(result.x_hat)

        rel, msq = reconstruction_errors(result.x_hat, x_true)
        test_scores = decision_values(result.model, test_x)
        records.append(
            RoundRecord(
                round=round_index,
                cumulative_cost=cumulative_cost,
                queried_entries=queried,
                recon_rel=rel,
                recon_msq=msq,
                train_objective=result.objective_trace[-1],
                test_accuracy=accuracy(test_scores, test.labels),
                test_auc=auc(test_scores, test.labels),
            )
        )

        try:
            batch = _select_batch(plan, tracker, obs, costs, select_rng)
        except PoolExhausted:
            break
        if not batch:
            # nothing affordable this round; further rounds would stall too
            break
        for row, col in batch:
            obs.observe(row, col, oracle.value(row, col))
        cumulative_cost += oracle.batch_cost(batch)
        queried += len(batch)
        queries.append(batch)

    return records, queries


def _mean_series(replicates: list[list[RoundRecord]]) -> list[RoundRecord]:
    depth = min(len(r) for r in replicates)
    mean: list[RoundRecord] = []
    for i in range(depth):
        rows = [r[i] for r in replicates]
        mean.append(
            RoundRecord(
                round=rows[0].round,
                cumulative_cost=float(np.mean([r.cumulative_cost for r in rows])),
                queried_entries=float(np.mean([r.queried_entries for r in rows])),
                recon_rel=float(np.mean([r.recon_rel for r in rows])),
                recon_msq=float(np.mean([r.recon_msq for r in rows])),
                train_objective=float(np.mean([r.train_objective for r in rows])),
                test_accuracy=float(np.mean([r.test_accuracy for r in rows])),
                test_auc=float(np.mean([r.test_auc for r in rows])),
            )
        )
    return mean


def run_experiment(plan: ExperimentPlan, features=None, labels=None) -> ExperimentResult:
    """All replicates of the plan, plus the replicate-mean series.

    ``features``/``labels`` may be passed directly (tests, synthetic runs);
    otherwise the plan's dataset reference is loaded from disk.
    """
    if features is None or labels is None:
        if not plan.data:
            raise ValueError("plan has no dataset reference and no arrays were given")
        from .data_io import DatasetSpec, load_dataset

        features, labels = load_dataset(
            DatasetSpec(
                path=plan.data,
                label_column=plan.label_col,
                positive_label=plan.positive_label,
                delimiter=plan.delimiter,
                has_header=plan.has_header,
                standardize=plan.standardize,
            )
        )
    features = _as_matrix(features)
    labels = np.asarray(labels, dtype=int)

    all_records: list[list[RoundRecord]] = []
    all_queries: list[list[list[tuple[int, int]]]] = []
    for replicate in range(plan.replicates):
        records, queries = run_replicate(plan, features, labels, replicate)
        all_records.append(records)
        all_queries.append(queries)

    return ExperimentResult(
        replicates=all_records,
        mean=_mean_series(all_records),
        queries=all_queries,
    )
