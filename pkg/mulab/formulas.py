"""mulab.formulas

Closed-form quantities compared against simulation.

Kept separate from the runners so that every transcription has its own unit
tests against hand-computed values.
"""

from __future__ import annotations

import math
from typing import Tuple

import numpy as np

from .errors import DomainError

LN2 = math.log(2.0)


def q(p: float) -> float:
    """Probability that a third vertex sees two fixed vertices alike: 1 - 2p(1-p)."""
    return 1.0 - 2.0 * p * (1.0 - p)


def alpha_n(n: int, p: float) -> float:
    return n * q(p)


def beta_n(n: int, p: float) -> float:
    if n < 2:
        return 0.0
    return math.sqrt(8.0 * n * p * (1.0 - p) * q(p) * math.log(n))


def second_order_prediction(n: int, p: float) -> float:
    """alpha_n + beta_n: predicted log2 of 2^n - mu(G(n,p))."""
    return alpha_n(n, p) + beta_n(n, p)


def xi_pair_mean(n: int, p: float) -> float:
    """Mean of xi_{x,x'} ~ Bin(n-2, q)."""
    return (n - 2) * q(p)


def xi_pair_variance(n: int, p: float) -> float:
    qq = q(p)
    return (n - 2) * qq * (1.0 - qq)


def subset_window(n: int) -> Tuple[float, float]:
    """[n/2 - sqrt(n ln n), n/2 + sqrt(n ln n)]."""
    if n < 2:
        return 0.0, float(n)
    r = math.sqrt(n * math.log(n))
    return n / 2.0 - r, n / 2.0 + r


def degree_window(n: int, p: float) -> Tuple[float, float]:
    """[np - sqrt(2np(1-p) ln n), np + sqrt(2np(1-p) ln n)]."""
    if n < 2:
        return n * p, n * p
    r = math.sqrt(2.0 * n * p * (1.0 - p) * math.log(n))
    return n * p - r, n * p + r


def _log_binom(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def expected_tree_components(n: int, k: int, p: float) -> float:
    """E X = C(n,k) k^(k-2) p^(k-1) (1-p)^(k(n-k) + C(k,2) - (k-1)) for size-k tree components."""
    if k < 1 or k > n:
        return 0.0
    p_exp = k - 1
    q_exp = k * (n - k) + k * (k - 1) // 2 - (k - 1)
    if p == 0.0:
        return float(n) if k == 1 else 0.0
    if p == 1.0:
        return math.exp(_log_binom(n, k) + (k - 2) * math.log(k)) if q_exp == 0 else 0.0
    log_e = _log_binom(n, k) + (k - 2) * math.log(k) + p_exp * math.log(p) + q_exp * math.log1p(-p)
    return math.exp(log_e)


def expected_outside_isolated(n: int, m: int, p: float) -> float:
    """E eta' = (n - m)(1 - p)^m: outside vertices with no neighbour in a fixed m-set."""
    if p >= 1.0:
        return float(n - m) if m == 0 else 0.0
    return (n - m) * math.exp(m * math.log1p(-p))


def tree_threshold_k(n: int) -> int:
    """k = floor(3 ln n), the component size used when 1 - eps > 1/2."""
    return int(math.floor(3.0 * math.log(n))) if n > 1 else 1


def c1(eps: float) -> float:
    """c_1 = 1 + 3(eps + ln(1 - eps))."""
    if not 0.0 < eps < 1.0:
        raise DomainError("eps must lie in (0, 1)")
    return 1.0 + 3.0 * (eps + math.log1p(-eps))


def tree_class_bound(k: int) -> int:
    """Upper bound k 4^k on isomorphism classes of trees on k vertices."""
    return k * 4**k


def small_class_bound(k: int) -> int:
    """k^3 4^k, the per-size class count used by the subcritical upper bound."""
    return k**3 * 4**k


def conjugate_fixed_point_residual(lam: float, lam_prime: float) -> float:
    return abs(lam_prime * math.exp(-lam_prime) - lam * math.exp(-lam))


def core_fraction(lam: float, lam_prime: float) -> float:
    """(1 - lambda')(1 - lambda'/lambda): limiting 2-core share of vertices."""
    return (1.0 - lam_prime) * (1.0 - lam_prime / lam)


def giant_fraction(lam: float, lam_prime: float) -> float:
    return 1.0 - lam_prime / lam


def gw_total_progeny_mean(lam: float) -> float:
    if not 0.0 < lam < 1.0:
        raise DomainError("subcritical mean progeny needs 0 < lambda < 1")
    return 1.0 / (1.0 - lam)


def gw_main_bound(eps: float) -> float:
    return 0.003 / eps


def gw_many_bound(forest_size: int, eps: float) -> float:
    return 0.002 * forest_size / eps


def regular_spectral_bound(d: int) -> float:
    return 2.0 * math.sqrt(d - 1) + 1.0


def comb_log2_floor(path_length: int) -> float:
    """log2 of 2^(n-3), the comb lower bound for an n-path comb."""
    return float(path_length - 3)


def moved_edges_log_bound(n: int, eps: float, p: float) -> float:
    """ln(2^n n! p^(eps^4 n^2 p / 4)): union bound over pairs of sets with many moved edges."""
    if not 0.0 < p < 1.0:
        raise DomainError("p must lie in (0, 1)")
    return n * LN2 + math.lgamma(n + 1) + 0.25 * eps**4 * n * n * p * math.log(p)


# The functions below accept floats or numpy arrays.


def boring_lhs(p):
    return 1.0 + np.power(1.0 - p, 5.4)


def boring_rhs(p):
    return np.exp2(1.0 - 2.0 * p * (1.0 - p))


def boring_gap(p):
    """RHS - LHS of 1 + (1-p)^5.4 < 2^(1 - 2p(1-p)), in a form accurate near p = 0."""
    return 2.0 * np.expm1(-2.0 * p * (1.0 - p) * LN2) - np.expm1(5.4 * np.log1p(-p))


def boring_majorant_gap(p):
    """RHS - (1 + e^(-5.4p)). Since e^(-5.4p) >= (1-p)^5.4, so a positive value implies the inequality."""
    return 2.0 * np.expm1(-2.0 * p * (1.0 - p) * LN2) - np.expm1(-5.4 * p)
