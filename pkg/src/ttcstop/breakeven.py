"""Break-even inference budgets for model-refresh planning.

How many inference tokens can a TTC-deployed early-stopped model serve
before its total compute (training + inference) exceeds a conventionally
trained baseline? The bound is linear in the training-token budget and
collapses to the standard special case when the baseline deployment has
no inference overhead (lambda_base = 1). The refresh frequency cancels
out of the algebra, so it never appears here.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, ROUND_DOWN

from .errors import InvalidQuery

# The illustrative (r, lambda_ttc) grid of the reference planning table.
TABLE1_ROWS: tuple[tuple[float, float], ...] = ((0.4, 8.0), (0.2, 16.0), (0.4, 1.2), (0.2, 1.2))


@dataclass(frozen=True)
class BreakEvenQuery:
    """Inputs of the break-even bound.

    ``r`` is the TTC-to-baseline training-FLOPs ratio, ``lambda_ttc`` and
    ``lambda_base`` the per-token inference-cost multipliers of TTC and
    baseline deployment. The bound is undefined unless
    ``lambda_ttc > lambda_base``.
    """

    r: float
    lambda_ttc: float
    lambda_base: float = 1.0
    n_train_tokens: float = 3e12
    sample_len_tokens: float = 1024.0
    train_infer_ratio: float = 6.0

    def __post_init__(self):
        if not 0.0 < self.r <= 1.0:
            raise InvalidQuery("r must be in (0, 1]")
        if self.lambda_base < 1.0:
            raise InvalidQuery("lambda_base must be >= 1")
        if self.lambda_ttc <= self.lambda_base:
            raise InvalidQuery(
                "lambda_ttc must exceed lambda_base for the bound to be meaningful"
            )
        if self.n_train_tokens <= 0:
            raise InvalidQuery("n_train_tokens must be > 0")
        if self.sample_len_tokens < 1:
            raise InvalidQuery("sample_len_tokens must be >= 1")
        if self.train_infer_ratio <= 0:
            raise InvalidQuery("train_infer_ratio must be > 0")


@dataclass(frozen=True)
class BreakEvenResult:
    """Maximum serveable inference tokens and whole samples."""

    max_infer_tokens: float
    max_samples: int


def max_inference_tokens(q: BreakEvenQuery) -> BreakEvenResult:
    """Largest inference-token budget keeping TTC total compute at or
    below the no-TTC baseline; samples use floor division (a partial
    sample cannot be served)."""
    tokens = q.train_infer_ratio * (1.0 - q.r) / (q.lambda_ttc - q.lambda_base) * q.n_train_tokens
    return BreakEvenResult(
        max_infer_tokens=tokens,
        max_samples=int(tokens // q.sample_len_tokens),
    )


def table1(n_train_tokens: float = 3e12, sample_len: float = 1024.0) -> list[dict]:
    """The four-row illustrative planning table (lambda_base = 1).

    Exact values are carried alongside display strings truncated to three
    significant figures, the published style.
    """
    rows = []
    for r, lam in TABLE1_ROWS:
        res = max_inference_tokens(
            BreakEvenQuery(
                r=r, lambda_ttc=lam,
                n_train_tokens=n_train_tokens, sample_len_tokens=sample_len,
            )
        )
        rows.append(
            {
                "r": r,
                "lambda_ttc": lam,
                "max_infer_tokens": res.max_infer_tokens,
                "max_samples": res.max_samples,
                "tokens_display": format_tokens(res.max_infer_tokens),
                "samples_display": format_samples(res.max_samples),
            }
        )
    return rows


def _truncate_sig(value: float, digits: int = 3) -> str:
    """Truncate toward zero to ``digits`` significant figures and strip
    trailing zeros.

    Truncation (not rounding) is the display rule: it is the only rule
    consistent with every published cell (937M, 1.5B). Exact decimal
    arithmetic on the shortest float repr avoids binary-fraction fuzz.
    """
    if value == 0:
        return "0"
    d = Decimal(repr(float(value)))
    shift = digits - 1 - d.adjusted()
    q = d.scaleb(shift).quantize(Decimal(1), rounding=ROUND_DOWN).scaleb(-shift)
    text = format(q.normalize(), "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return text


def format_tokens(tokens: float, digits: int = 3) -> str:
    """Token count in trillions, e.g. '1.54T', '0.96T', '54T'."""
    return _truncate_sig(tokens / 1e12, digits) + "T"


def format_samples(samples: int, digits: int = 3) -> str:
    """Sample count with the largest unit keeping the value >= 1."""
    for unit, scale in (("B", 1e9), ("M", 1e6), ("K", 1e3)):
        if samples >= scale:
            return _truncate_sig(samples / scale, digits) + unit
    return _truncate_sig(float(samples), digits)
