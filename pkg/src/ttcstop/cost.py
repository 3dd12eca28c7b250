"""FLOPs accounting for training, inference, and TTC evaluation passes.

Conventions: training costs ``train_infer_ratio`` (default 6) times the
per-token inference FLOPs, and inference defaults to the standard 2N
forward-pass approximation for an N-parameter model. Both constants are
configurable. Accuracy elsewhere in the package is in percentage points;
everything here is raw FLOPs and token counts.
"""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class CostModel:
    """Per-token FLOPs conventions for one model plus its validation set.

    ``flops_per_infer_token`` defaults to ``2 * param_count`` when left
    unset. ``val_query_count`` and ``avg_tokens_per_sample`` size a full
    validation pass: one pass at K samples per query costs
    ``K * val_query_count * avg_tokens_per_sample * flops_per_infer_token``.
    """

    param_count: float
    val_query_count: int = 100
    avg_tokens_per_sample: float = 512.0
    flops_per_infer_token: float | None = None
    train_infer_ratio: float = 6.0

    def __post_init__(self):
        if self.flops_per_infer_token is None:
            object.__setattr__(self, "flops_per_infer_token", 2.0 * self.param_count)
        if self.param_count <= 0:
            raise ValueError("param_count must be > 0")
        if self.flops_per_infer_token <= 0:
            raise ValueError("flops_per_infer_token must be > 0")
        if self.train_infer_ratio <= 0:
            raise ValueError("train_infer_ratio must be > 0")
        if self.val_query_count < 1:
            raise ValueError("val_query_count must be >= 1")
        if self.avg_tokens_per_sample < 1:
            raise ValueError("avg_tokens_per_sample must be >= 1")

    @property
    def train_flops_per_token(self) -> float:
        return self.train_infer_ratio * self.flops_per_infer_token


def train_flops(tokens: float, model: CostModel) -> float:
    """Training FLOPs for ``tokens`` tokens under ``model``'s conventions."""
    if tokens < 0:
        raise ValueError("tokens must be >= 0")
    return tokens * model.train_infer_ratio * model.flops_per_infer_token


def infer_flops(tokens: float, model: CostModel) -> float:
    """Inference FLOPs for ``tokens`` tokens."""
    if tokens < 0:
        raise ValueError("tokens must be >= 0")
    return tokens * model.flops_per_infer_token


def eval_cost(k: int, model: CostModel) -> float:
    """FLOPs of one full validation pass with ``k`` samples per query.

    Exactly linear in ``k``; ``eval_cost(1, m)`` is the per-pass baseline
    deployment cost used on the right-hand side of the total-FLOPs check.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    return k * model.val_query_count * model.avg_tokens_per_sample * model.flops_per_infer_token


@dataclass
class FlopsLedger:
    """Cumulative FLOPs bookkeeping for one training run.

    ``train_flops`` and ``probe_flops`` only ever grow; ``eval_flops_k1``
    is the fixed cost of a single K=1 validation pass, so a K-sample
    deployment evaluation costs exactly ``k * eval_flops_k1``.
    """

    eval_flops_k1: float
    train_flops: float = 0.0
    probe_flops: float = 0.0

    def __post_init__(self):
        if self.eval_flops_k1 < 0 or self.train_flops < 0 or self.probe_flops < 0:
            raise ValueError("ledger entries must be nonnegative")

    def deploy_flops_per_eval(self, k: int) -> float:
        if k < 1:
            raise ValueError("k must be >= 1")
        return k * self.eval_flops_k1

    def charge_training(self, cumulative_flops: float) -> None:
        if cumulative_flops < self.train_flops:
            raise ValueError("cumulative training FLOPs may not decrease")
        self.train_flops = cumulative_flops

    def charge_probe(self, flops: float) -> None:
        if flops < 0:
            raise ValueError("probe charge must be nonnegative")
        self.probe_flops += flops

    def snapshot(self) -> "FlopsLedger":
        return replace(self)

    @classmethod
    def for_model(cls, model: CostModel) -> "FlopsLedger":
        return cls(eval_flops_k1=eval_cost(1, model))


@dataclass(frozen=True)
class SavingsReport:
    """Savings of stopping early, with and without probe/eval overhead.

    ``training_only`` ignores all inference costs; ``net`` charges the
    accumulated probe overhead and one K*-sample deployment evaluation
    against the baseline of full training plus one K=1 evaluation. ``r``
    is the stop/budget training-FLOPs ratio consumed by break-even
    planning.
    """

    training_only: float
    net: float
    r: float


def savings_report(
    ledger_at_stop: FlopsLedger,
    ledger_at_budget: FlopsLedger,
    kstar: int,
) -> SavingsReport:
    if ledger_at_budget.train_flops <= 0:
        raise ValueError("budget ledger has zero training FLOPs")
    if ledger_at_stop.train_flops > ledger_at_budget.train_flops:
        raise ValueError("stop ledger exceeds budget ledger training FLOPs")
    r = ledger_at_stop.train_flops / ledger_at_budget.train_flops
    spent = (
        ledger_at_stop.train_flops
        + ledger_at_stop.probe_flops
        + ledger_at_stop.deploy_flops_per_eval(kstar)
    )
    baseline = ledger_at_budget.train_flops + ledger_at_budget.deploy_flops_per_eval(1)
    return SavingsReport(training_only=1.0 - r, net=1.0 - spent / baseline, r=r)
