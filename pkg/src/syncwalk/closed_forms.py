"""Closed-form expected synchronization times for U_n and Cerny pairs.

Every formula accepts ``p`` as a :class:`~fractions.Fraction` (exact result)
or a float.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError

FORMULA_IDS = ("thm1", "thm2", "thm3", "thm4", "opt_poly_odd", "opt_poly_even", "leading_term")


def _p(p):
    if isinstance(p, bool) or not isinstance(p, (int, float, Fraction)):
        raise DomainError(f"p must be a Fraction or float, got {p!r}")
    if isinstance(p, int):
        p = Fraction(p)
    if not 0 < p < 1:
        raise DomainError(f"p must lie strictly between 0 and 1, got {p}")
    return p


def _n(n, lo, parity=None):
    if not isinstance(n, int) or isinstance(n, bool) or n < lo:
        raise DomainError(f"n must be an integer >= {lo}, got {n!r}")
    if parity == "odd" and n % 2 == 0:
        raise DomainError(f"n must be odd, got {n}")
    if parity == "even" and n % 2:
        raise DomainError(f"n must be even, got {n}")
    return n


def thm1_un_odd(n: int, p):
    """Expected sync time of U_n for odd n: ``1 / (p^((n+1)/2) q^((n-1)/2))``."""
    n, p = _n(n, 1, "odd"), _p(p)
    q = 1 - p
    return 1 / (p ** ((n + 1) // 2) * q ** ((n - 1) // 2))


def thm2_un_even(n: int, p):
    n, p = _n(n, 2, "even"), _p(p)
    return 1 / (p * (1 - p)) ** (n // 2)


def thm3_cerny_odd(n: int, p):
    """Expected merging time of the pair {1, (n+1)/2} of C_n, n odd."""
    n, p = _n(n, 3, "odd"), _p(p)
    q = 1 - p
    return (n - 1) * ((n - 1) ** 2 + q * (3 * n - 5) + 4 * q * q) / (8 * p * q * q)


def thm4_cerny_even(n: int, p):
    """Expected merging time of the pair {1, (n+2)/2 mod n} of C_n, n even."""
    n, p = _n(n, 2, "even"), _p(p)
    q = 1 - p
    return n * ((n - 1) * (n - 2) + q * (3 * n - 6) + 4 * q * q) / (8 * p * q * q)


def un_expected(n: int, p):
    return thm1_un_odd(n, p) if n % 2 else thm2_un_even(n, p)


def cerny_expected(n: int, p):
    return thm3_cerny_odd(n, p) if n % 2 else thm4_cerny_even(n, p)


def cerny_extremal_pair(n: int) -> tuple[int, int]:
    """The pair whose expectation the Cerny formulas give, reduced mod n."""
    _n(n, 2)
    other = (n + 1) // 2 if n % 2 else ((n + 2) // 2) % n
    return (min(1, other), max(1, other))


def opt_poly_odd(n: int) -> Fraction:
    """Odd-n Cerny expectation at p = 1/3, as a polynomial in n."""
    return Fraction(27 * n**3 - 27 * n**2 - 15 * n + 15, 32)


def opt_poly_even(n: int) -> Fraction:
    return Fraction(27 * n**3 - 27 * n**2 - 6 * n, 32)


def leading_term(n: int, p):
    p = _p(p)
    return n**3 / (8 * p * (1 - p) ** 2)


# Offset C: the hitting time at the end of the a-block of U_n is mu_1 - C.
def thm1_offset(n: int, p):
    n, p = _n(n, 1, "odd"), _p(p)
    h = (n + 1) // 2
    return (p**h - 1) / (p ** (h + 1) - p**h)


@dataclass(frozen=True)
class FormulaResult:
    value: object
    formula_id: str
    inputs: tuple


_FORMULAS = {
    "thm1": thm1_un_odd,
    "thm2": thm2_un_even,
    "thm3": thm3_cerny_odd,
    "thm4": thm4_cerny_even,
    "leading_term": leading_term,
}


def evaluate(formula_id: str, n: int, p=None) -> FormulaResult:
    if formula_id == "opt_poly_odd":
        _n(n, 3, "odd")
        return FormulaResult(opt_poly_odd(n), formula_id, (n, Fraction(1, 3)))
    if formula_id == "opt_poly_even":
        _n(n, 2, "even")
        return FormulaResult(opt_poly_even(n), formula_id, (n, Fraction(1, 3)))
    try:
        fn = _FORMULAS[formula_id]
    except KeyError:
        raise DomainError(f"unknown formula {formula_id!r}") from None
    return FormulaResult(fn(n, p), formula_id, (n, p))


def p_grid(step=Fraction(1, 1000)) -> list:
    """Grid ``step, 2*step, ...`` strictly inside (0, 1)."""
    if not isinstance(step, float):
        step = Fraction(step)
    if not 0 < step < 1:
        raise DomainError(f"grid step must lie in (0, 1), got {step}")
    slack = 1e-12 if isinstance(step, float) else 0
    return [k * step for k in range(1, int(1 / step) + 2) if k * step < 1 - slack]


@dataclass(frozen=True)
class OptimumReport:
    n: int
    p_grid_argmin: object
    value_at_argmin: object
    leading_argmin: object
    value_at_third: Fraction
    poly_at_third: Fraction


def optimal_p_analysis(n: int, step=Fraction(1, 1000)) -> OptimumReport:
    """Grid minimiser of the Cerny pair expectation against the p = 1/3
    polynomial."""
    _n(n, 3)
    grid = p_grid(step)
    values = [cerny_expected(n, p) for p in grid]
    k = min(range(len(grid)), key=values.__getitem__)
    lead = min(grid, key=lambda p: leading_term(n, p))
    poly = opt_poly_odd(n) if n % 2 else opt_poly_even(n)
    return OptimumReport(
        n=n, p_grid_argmin=grid[k], value_at_argmin=values[k], leading_argmin=lead,
        value_at_third=cerny_expected(n, Fraction(1, 3)), poly_at_third=poly,
    )
