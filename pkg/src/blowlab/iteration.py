"""Lower-bound iteration: coefficient sequences, constants, and the pointwise envelope.

The blow-up proof runs an induction producing estimates

    u(t,r) >= C_k t^a_k / (r^m (r+t)^b_k) * exp(-l_k Gmax + d_k Umin - l_k Umax)

on the exterior region r - t >= max(sigma_n t, delta). The sequences obey

    a <- p a + (2-j),  b <- p b + m (p-1),  d <- p d,  l <- p l + (p-1),

with a_1 = m+1, b_1 = alpha+1, d_1 = 1, l_1 = 0, and the constant recursion
C_{k+1} = (C_k/2)^p / (2 (p a_k + 2)^2) for j=0 (first-power denominator
C_{k+1} = C_k^p / (8 (p a_k + 1)) for j=1). C_k is doubly exponential in k,
so every C computation here lives in log domain.

The derived constant K with C_{k+1} >= K C_k^p / p^{2k} feeds the geometric
series S_{p,K} = sum_{i>=1} (i log p^2 - log K) / p^i, which bounds
log C_{k+1} >= p^k (log C_0 - S_p(k)) from below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

from .model import ProblemSpec


@dataclass(frozen=True)
class IterationParams:
    """Constants of one iteration run (all derived from problem + region)."""
    p: float
    m: int
    j: int
    alpha: float
    M: float
    eps: float
    sigma_n: float
    delta: float
    C0: float
    K: float
    S_pK: float

    @staticmethod
    def from_problem(spec: ProblemSpec, sigma_n: float = 0.5, delta: float = 0.1) -> "IterationParams":
        if not (0.0 < sigma_n <= 1.0):
            raise ValueError(f"sigma_n must lie in (0, 1], got {sigma_n}")
        if delta <= 0.0:
            raise ValueError(f"delta must be positive, got {delta}")
        alpha = spec.field.data.alpha
        M = spec.field.data.M
        C0 = initial_constant(spec.eps, sigma_n, spec.m, M, delta, alpha)
        K, S = compute_K_and_S(spec.p, spec.m, spec.j)
        return IterationParams(p=spec.p, m=spec.m, j=spec.j, alpha=alpha, M=M,
                               eps=spec.eps, sigma_n=sigma_n, delta=delta,
                               C0=C0, K=K, S_pK=S)


@dataclass(frozen=True)
class IterationState:
    k: int
    a: float
    b: float
    d: float
    l: float
    logC: float


def initial_constant(eps: float, sigma_n: float, m: int, M: float,
                     delta: float, alpha: float) -> float:
    """C_0 = eps * (sigma_n^m M / 4) * (delta/(1+delta))^(alpha+1)."""
    return eps * (sigma_n ** m * M / 4.0) * (delta / (1.0 + delta)) ** (alpha + 1.0)


def initial_state(params: IterationParams) -> IterationState:
    return IterationState(k=1, a=params.m + 1.0, b=params.alpha + 1.0,
                          d=1.0, l=0.0, logC=math.log(params.C0))


def step(state: IterationState, params: IterationParams,
         intext_variant: bool = False) -> IterationState:
    """One induction step k -> k+1.

    j=0 canonical constant update: C' = (C/2)^p / (2 (p a + 2)^2); the
    `intext_variant` flag switches to the alternative C' = C^p/(8 (p a + 2)^2)
    (both are valid lower bounds; the canonical one feeds the K/S machinery).
    j=1: a' = p a + 1 and C' = C^p / (8 (p a + 1)).
    """
    p, m, j = params.p, params.m, params.j
    if j == 0:
        a_next = p * state.a + 2.0
        if intext_variant:
            logC_next = p * state.logC - math.log(8.0) - 2.0 * math.log(a_next)
        else:
            logC_next = (p * (state.logC - math.log(2.0))
                         - math.log(2.0) - 2.0 * math.log(a_next))
    else:
        a_next = p * state.a + 1.0
        logC_next = p * state.logC - math.log(8.0) - math.log(a_next)
    return IterationState(
        k=state.k + 1,
        a=a_next,
        b=p * state.b + m * (p - 1.0),
        d=p * state.d,
        l=p * state.l + (p - 1.0),
        logC=logC_next)


def run_to(k: int, params: IterationParams) -> IterationState:
    """State with index k (k-1 steps from the initial state)."""
    if k < 1:
        raise ValueError(f"index k must be >= 1, got {k}")
    state = initial_state(params)
    for _ in range(k - 1):
        state = step(state, params)
    return state


def closed_form(k: int, params: IterationParams) -> Tuple[float, float, float, float]:
    """(a, b, d, l) after k steps, i.e. the index-(k+1) values.

    a_{k+1} = p^k (m+1+(2-j)/(p-1)) - (2-j)/(p-1); b_{k+1} = p^k (alpha+1+m) - m;
    d_{k+1} = p^k (pure geometric from d <- p d, d_1 = 1); l_{k+1} = p^k - 1.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    p, m, j, alpha = params.p, params.m, params.j, params.alpha
    shift = (2.0 - j) / (p - 1.0)
    pk = p ** k
    a = pk * (m + 1.0 + shift) - shift
    b = pk * (alpha + 1.0 + m) - m
    d = pk
    l = pk - 1.0
    return (a, b, d, l)


def compute_K_and_S(p: float, m: int, j: int,
                    increment_tol: float = 1e-14, max_terms: int = 100_000) -> Tuple[float, float]:
    """Derived constant K with C_{k+1} >= K C_k^p / p^{2k}, and the series limit S_{p,K}.

    j=0: a_{k+1} = p a_k + 2 <= p^k (m+1+2/(p-1)), so
         C_{k+1} = (C_k/2)^p/(2 a_{k+1}^2) >= C_k^p 2^{-(p+1)} (m+1+2/(p-1))^{-2} p^{-2k}.
    j=1: a_{k+1} <= p^k (m+1+1/(p-1)) gives K = (1/8)(m+1+1/(p-1))^{-1}; the leftover
         p^{-k} slack is absorbed into the p^{-2k} of the bound (loose but valid).

    S_{p,K} = sum_{i>=1} sigma_i with sigma_i = (i log p^2 - log K)/p^i (sigma_0 = 0),
    summed until increments fall below `increment_tol`.
    """
    if p <= 1.0:
        raise ValueError(f"p must exceed 1, got {p}")
    shift = (2.0 - j) / (p - 1.0)
    amp = m + 1.0 + shift
    if j == 0:
        K = 2.0 ** (-(p + 1.0)) / (amp * amp)
    else:
        K = 0.125 / amp
    logK = math.log(K)
    log_p2 = 2.0 * math.log(p)
    total = 0.0
    i = 1
    while i <= max_terms:
        term = (i * log_p2 - logK) / p ** i
        total += term
        if abs(term) < increment_tol and i > 1:
            break
        i += 1
    else:
        raise RuntimeError(f"S_{{p,K}} series did not settle within {max_terms} terms (p={p})")
    return (K, total)


def partial_sum_S(p: float, K: float, k: int) -> float:
    """S_p(k) = sum_{i=0}^{k} (i log p^2 - log K)/p^i with the i=0 term set to 0."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    logK = math.log(K)
    log_p2 = 2.0 * math.log(p)
    return sum((i * log_p2 - logK) / p ** i for i in range(1, k + 1))


def log_envelope(t: float, r: float, k: int, params: IterationParams, envelopes) -> float:
    """log of the index-k lower-bound envelope at (t, r).

    envelopes must provide u_min(t, r), u_max(t, r) (extrema of U over the
    backward interval [r-t, r+t]) and g_max(t) (max of G over [0, t]).
    """
    if r - t < max(params.sigma_n * t, params.delta) - 1e-12:
        raise ValueError(
            f"(t={t}, r={r}) lies outside the exterior region r-t >= max(sigma_n t, delta)")
    if t <= 0.0:
        raise ValueError(f"t must be positive, got {t}")
    st = run_to(k, params)
    return (st.logC + st.a * math.log(t) - params.m * math.log(r)
            - st.b * math.log(r + t)
            - st.l * envelopes.g_max(t)
            + st.d * envelopes.u_min(t, r)
            - st.l * envelopes.u_max(t, r))


def envelope(t: float, r: float, k: int, params: IterationParams, envelopes) -> float:
    """exp of log_envelope; overflows to +inf rather than raising."""
    le = log_envelope(t, r, k, params, envelopes)
    try:
        return math.exp(le)
    except OverflowError:
        return math.inf
