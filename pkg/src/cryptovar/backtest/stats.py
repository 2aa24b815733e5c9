"""Coverage and independence tests on VaR violation indicator series."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from cryptovar.backtest.distributions import binomial_sf, chi2_sf_1df, f_sf
from cryptovar.errors import DomainError

# chi-square(1) critical values at 10% / 5% / 1% significance
LR_CRITICAL = {0.10: 2.706, 0.05: 3.841, 0.01: 6.635}


@dataclass(frozen=True)
class TestReport:
    name: str
    statistic: float | None
    p_value: float | None
    decision: str  # "accept" | "reject" | "n/a"
    significance: float
    n: int
    group: int | None = None
    extras: dict = field(default_factory=dict)

    @property
    def applicable(self) -> bool:
        return self.decision != "n/a"

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "decision": self.decision,
            "significance": self.significance,
            "n": self.n,
            "group": self.group,
            **self.extras,
        }


def binomial_coverage(
    n: int, p: float, observed: int, significance: float = 0.05
) -> TestReport:
    """One-sided exact binomial coverage test (upper tail).

    The alternative is risk underestimation: p-value = P(X >= observed)
    under X ~ Binomial(n, p).
    """
    if observed < 0 or observed > n:
        raise DomainError(f"observed {observed} outside [0, {n}]")
    p_value = binomial_sf(observed, n, p)
    return TestReport(
        name="binomial_coverage",
        statistic=float(observed),
        p_value=p_value,
        decision="reject" if p_value < significance else "accept",
        significance=significance,
        n=n,
        extras={"expected": n * p, "rate": observed / n if n else math.nan},
    )


def transition_counts(indicators: np.ndarray) -> tuple[int, int, int, int]:
    """(N00, N01, N10, N11) over consecutive indicator pairs."""
    ind = np.asarray(indicators, dtype=int)
    prev, cur = ind[:-1], ind[1:]
    n00 = int(np.sum((prev == 0) & (cur == 0)))
    n01 = int(np.sum((prev == 0) & (cur == 1)))
    n10 = int(np.sum((prev == 1) & (cur == 0)))
    n11 = int(np.sum((prev == 1) & (cur == 1)))
    return n00, n01, n10, n11


def _xlogy(x: float, y: float) -> float:
    # 0 * log(0) = 0 convention; a zero conditional-count denominator
    # contributes a factor of one to the likelihood
    if x == 0.0:
        return 0.0
    return x * math.log(y)


def christoffersen_lr(
    indicators: np.ndarray, significance: float = 0.05, group: int | None = None
) -> TestReport:
    """First-order Markov independence LR test.

    LR = -2 ln[ (1-pi)^(N00+N10) pi^(N01+N11) /
                ((1-pi0)^N00 pi0^N01 (1-pi1)^N10 pi1^N11) ]
    asymptotically chi-square with 1 degree of freedom. Series without any
    violations are reported as not applicable.
    """
    ind = np.asarray(indicators, dtype=int)
    if len(ind) < 2:
        raise DomainError("need at least 2 indicators")
    if not ind.any():
        return TestReport(
            name="christoffersen_lr",
            statistic=None,
            p_value=None,
            decision="n/a",
            significance=significance,
            n=len(ind),
            group=group,
            extras={"reason": "no violations"},
        )
    n00, n01, n10, n11 = transition_counts(ind)
    total = n00 + n01 + n10 + n11
    pi = (n01 + n11) / total
    pi0 = n01 / (n00 + n01) if n00 + n01 else 0.0
    pi1 = n11 / (n10 + n11) if n10 + n11 else 0.0

    log_l0 = _xlogy(n00 + n10, 1.0 - pi) + _xlogy(n01 + n11, pi)
    log_l1 = (
        _xlogy(n00, 1.0 - pi0)
        + _xlogy(n01, pi0)
        + _xlogy(n10, 1.0 - pi1)
        + _xlogy(n11, pi1)
    )
    lr = max(-2.0 * (log_l0 - log_l1), 0.0)
    critical = LR_CRITICAL.get(significance, 3.841)
    return TestReport(
        name="christoffersen_lr",
        statistic=lr,
        p_value=chi2_sf_1df(lr),
        decision="reject" if lr > critical else "accept",
        significance=significance,
        n=len(ind),
        group=group,
        extras={
            "n00": n00, "n01": n01, "n10": n10, "n11": n11,
            "pi": pi, "pi0": pi0, "pi1": pi1, "critical": critical,
        },
    )


def regression_independence_f(
    indicators: np.ndarray,
    k: int = 4,
    significance: float = 0.05,
    group: int | None = None,
) -> TestReport:
    """F-test that the first k violation lags carry no information.

    Fits I_t = a + sum b_i I_{t-i} + u_t and tests b_1 = ... = b_k = 0 with
    F = [(RSS_r - RSS_f)/k] / [RSS_f/(n-k-1)].
    """
    ind = np.asarray(indicators, dtype=float)
    if len(ind) <= k + 5:
        raise DomainError(f"need more than {k + 5} indicators, got {len(ind)}")
    if not ind.any():
        return TestReport(
            name="regression_f",
            statistic=None,
            p_value=None,
            decision="n/a",
            significance=significance,
            n=len(ind),
            group=group,
            extras={"reason": "no violations"},
        )
    y = ind[k:]
    n = len(y)
    X = np.column_stack(
        [np.ones(n)] + [ind[k - lag : len(ind) - lag] for lag in range(1, k + 1)]
    )
    # lstsq tolerates the rank-deficient designs degenerate indicator
    # patterns produce; the minimized RSS is what the statistic needs
    beta, _, _, _ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ beta
    rss_full = float(resid @ resid)
    rss_restricted = float(np.sum((y - y.mean()) ** 2))
    dof = n - k - 1
    if dof <= 0 or rss_full <= 0.0:
        f_stat = math.inf if rss_restricted > rss_full else 0.0
    else:
        f_stat = ((rss_restricted - rss_full) / k) / (rss_full / dof)
    f_stat = max(f_stat, 0.0)
    p_value = f_sf(f_stat, k, max(dof, 1)) if math.isfinite(f_stat) else 0.0
    return TestReport(
        name="regression_f",
        statistic=f_stat,
        p_value=p_value,
        decision="reject" if p_value < significance else "accept",
        significance=significance,
        n=len(ind),
        group=group,
        extras={"k": k, "rss_full": rss_full, "rss_restricted": rss_restricted},
    )


def weighted_average_statistic(
    reports: list[TestReport], na_as_zero: bool = False
) -> float | None:
    """Sample-count weighted average of group statistics.

    With ``na_as_zero`` a not-applicable group contributes statistic 0 at
    full weight: a no-violation series has LR exactly 0 (both likelihoods
    are 1), whereas an F statistic is genuinely undefined and is excluded.
    """
    usable = []
    for r in reports:
        if r.applicable and r.statistic is not None:
            usable.append((r.statistic, r.n))
        elif na_as_zero:
            usable.append((0.0, r.n))
    if not usable:
        return None
    total = sum(n for _, n in usable)
    return sum(s * n for s, n in usable) / total
