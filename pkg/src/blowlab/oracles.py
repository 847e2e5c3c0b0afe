"""Independent closed-form and quadrature oracles.

Everything here is written straight from the defining formulas and shares no
code with the finite-difference solver or the hand-rolled Simpson quadrature
in the model module (scipy's adaptive quadrature is the only integrator used),
so solver/iteration outputs can be validated against a genuinely separate
evaluation path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from scipy.integrate import quad


@dataclass(frozen=True)
class OracleReport:
    name: str
    inputs: dict
    oracle_value: float
    candidate_value: float

    @property
    def abs_deviation(self) -> float:
        return abs(self.oracle_value - self.candidate_value)

    @property
    def rel_deviation(self) -> float:
        scale = max(abs(self.oracle_value), abs(self.candidate_value), 1e-300)
        return self.abs_deviation / scale


def spherical_means_n3(psi: Callable, t: float, r: float, abs_tol: float = 1e-12) -> float:
    """Exact three-dimensional linear free wave with u(0)=0, u_t(0)=psi:

        u(t, r) = (1/(2r)) * integral_{r-t}^{r+t} lambda psi(lambda) d lambda

    valid for r > t > 0 (no focusing through the origin).
    """
    if not (r > t > 0.0):
        raise ValueError(f"need r > t > 0, got t={t}, r={r}")
    val, err = quad(lambda lam: lam * psi(lam), r - t, r + t,
                    epsabs=abs_tol, epsrel=0.0, limit=200)
    if err > 100.0 * abs_tol + 1e-15 * abs(val):
        raise RuntimeError(f"quadrature error estimate {err:.3g} above tolerance")
    return val / (2.0 * r)


def weighted_cone_lower_bound(psi: Callable, t: float, r: float, m: int,
                         sigma_n: float = 0.5, abs_tol: float = 1e-12) -> float:
    """Weighted cone average (1/(8 r^m)) * integral_{r-t}^{r+t} lambda^m psi d lambda.

    A valid lower bound for the linear evolution on r - t >= sigma_n t > 0.
    """
    if t < 0.0:
        raise ValueError(f"t must be >= 0, got {t}")
    if t > 0.0 and r - t < sigma_n * t:
        raise ValueError(f"need r - t >= sigma_n t, got t={t}, r={r}, sigma_n={sigma_n}")
    if t == 0.0:
        return 0.0
    val, err = quad(lambda lam: lam ** m * psi(lam), r - t, r + t,
                    epsabs=abs_tol, epsrel=0.0, limit=200)
    if err > 100.0 * abs_tol + 1e-15 * abs(val):
        raise RuntimeError(f"quadrature error estimate {err:.3g} above tolerance")
    return val / (8.0 * r ** m)


def beta_integral(q: float, t: float) -> tuple:
    """integral_0^t (t - tau) tau^q d tau = t^(q+2)/((q+1)(q+2)).

    Returns (closed form, adaptive-quadrature cross-check).
    """
    if q <= -1.0:
        raise ValueError(f"q must exceed -1, got {q}")
    if t <= 0.0:
        raise ValueError(f"t must be positive, got {t}")
    exact = t ** (q + 2.0) / ((q + 1.0) * (q + 2.0))
    check, _ = quad(lambda tau: (t - tau) * tau ** q, 0.0, t, epsabs=1e-12, limit=200)
    return exact, check
