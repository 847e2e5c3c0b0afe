"""Closed-form critical exponents and lifespan scaling exponents.

All functions are pure and return an ExponentReport echoing their inputs.
"All p > 1 blow up" outcomes are reported as an explicit unbounded variant
(value = math.inf together with unbounded=True), never a sentinel float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


class OutsideBlowupRange(ValueError):
    """Requested exponent lies outside the regime where blow-up is proved."""


@dataclass(frozen=True)
class ExponentReport:
    value: float                 # critical exponent or scaling exponent
    kind: str                    # strauss | glassey | slow_decay | shifted_quadratic | lifespan_kappa
    inputs: dict = field(default_factory=dict)
    unbounded: bool = False      # True means "every p > 1 blows up"
    note: str = ""

    def __post_init__(self) -> None:
        if self.unbounded and not math.isinf(self.value):
            raise ValueError("unbounded report must carry value = inf")


def strauss_glassey(n: int, j: int) -> ExponentReport:
    """Classical critical power for |u|^p (j=0) or |u_t|^p (j=1) in n dimensions.

    j=0 gives the positive root of (n-1)p^2 - (n+1)p - 2 = 0, j=1 gives (n+1)/(n-1).
    """
    if n < 2:
        raise ValueError(f"dimension n must be >= 2, got {n}")
    if j not in (0, 1):
        raise ValueError(f"nonlinearity index j must be 0 or 1, got {j}")
    if j == 0:
        value = (n + 1 + math.sqrt(n * n + 10 * n - 7)) / (2 * (n - 1))
        kind = "strauss"
    else:
        value = (n + 1) / (n - 1)
        kind = "glassey"
    return ExponentReport(value=value, kind=kind, inputs={"n": n, "j": j})


def slow_decay_critical(alpha: float) -> ExponentReport:
    """Critical power 1 + 2/alpha for data decaying like (1+r)^(-alpha-1).

    For alpha <= 0 the data decay too slowly for any power to be subcritical
    and the report is the unbounded variant.
    """
    if alpha <= 0.0:
        return ExponentReport(
            value=math.inf, kind="slow_decay", inputs={"alpha": alpha},
            unbounded=True, note="alpha <= 0: every p > 1 blows up")
    return ExponentReport(value=1.0 + 2.0 / alpha, kind="slow_decay", inputs={"alpha": alpha})


def shifted_critical(alpha: float, gamma: float, ell: float, j: int) -> ExponentReport:
    """Critical power shifted by the time-decay limit gamma and the log-potential slope ell.

    Returns the unique root > 1 of

        (alpha+gamma+ell) p^2 - (alpha+gamma+2 ell+2-j) p + ell = 0

    when alpha+gamma+ell > 0; the polynomial at p=1 equals j-2 < 0, so exactly one
    root exceeds 1. When alpha+gamma+ell <= 0 every p > 1 blows up (unbounded variant).
    """
    if j not in (0, 1):
        raise ValueError(f"nonlinearity index j must be 0 or 1, got {j}")
    for name, val in (("alpha", alpha), ("gamma", gamma), ("ell", ell)):
        if not math.isfinite(val):
            raise ValueError(f"{name} must be finite, got {val}")
    inputs = {"alpha": alpha, "gamma": gamma, "ell": ell, "j": j}
    s = alpha + gamma + ell
    if s <= 0.0:
        return ExponentReport(value=math.inf, kind="shifted_quadratic", inputs=inputs,
                              unbounded=True, note="alpha+gamma+ell <= 0: every p > 1 blows up")
    # Quadratic A p^2 + B p + C with A > 0 and A+B+C = j-2 < 0: real roots straddling 1.
    a = s
    b = -(alpha + gamma + 2.0 * ell + 2.0 - j)
    c = ell
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        raise OutsideBlowupRange(
            f"quadratic has no real root for alpha={alpha}, gamma={gamma}, ell={ell}, j={j}")
    # Cancellation-safe: q and the root pair (q/a, c/q) avoid subtracting nearby numbers,
    # which matters when ell ~ 0 makes the small root ill conditioned.
    q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
    roots = [q / a]
    if q != 0.0:
        roots.append(c / q)
    value = max(roots)
    if value <= 1.0:
        raise OutsideBlowupRange(
            f"no root > 1 for alpha={alpha}, gamma={gamma}, ell={ell}, j={j} (empty blow-up range)")
    return ExponentReport(value=value, kind="shifted_quadratic", inputs=inputs)


def lifespan_kappa(p: float, alpha: float, gamma: float, ell: float, j: int) -> ExponentReport:
    """Scaling exponent kappa in the lifespan bound T <= C * eps^(-kappa).

    kappa = ((2-j)/(p-1) - alpha - gamma - ell (1 - 1/p))^(-1), defined only when
    the denominator is positive, which is exactly p inside the blow-up range.
    """
    if p <= 1.0:
        raise ValueError(f"p must exceed 1, got {p}")
    if j not in (0, 1):
        raise ValueError(f"nonlinearity index j must be 0 or 1, got {j}")
    denom = (2.0 - j) / (p - 1.0) - alpha - gamma - ell * (1.0 - 1.0 / p)
    inputs = {"p": p, "alpha": alpha, "gamma": gamma, "ell": ell, "j": j}
    if denom <= 0.0:
        raise OutsideBlowupRange(
            f"p={p} is outside the blow-up range (denominator {denom:.6g} <= 0)")
    return ExponentReport(value=1.0 / denom, kind="lifespan_kappa", inputs=inputs)


def blowup_range_margin(p: float, alpha: float, gamma: float, ell: float, j: int) -> float:
    """Signed distance (2-j)/(p-1) - alpha - gamma - ell (1-1/p); positive inside the range.

    This is also the large-t slope of the interaction functional against log t,
    which is why the criterion module's divergence test keys off its sign.
    """
    if p <= 1.0:
        raise ValueError(f"p must exceed 1, got {p}")
    return (2.0 - j) / (p - 1.0) - alpha - gamma - ell * (1.0 - 1.0 / p)
