"""Exact q-series: Gaussian polynomials, skew q-binomials, q-Narayana and q-Catalan
polynomials, double-column diagrams, and the finitized character formulas.

Exponents are Fractions whose denominators divide 24 (central-charge shift 1/12,
conformal weights in eighths, energies in halves). Coefficients are Python ints.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Mapping

from .statespace import DomainError

EXPONENT_DENOMINATOR = 24
CENTRAL_SHIFT = Fraction(1, 12)  # -c/24 at c = -2


class InexactDivisionError(ArithmeticError):
    """Polynomial division left a remainder; a formula was transcribed wrongly."""


def conformal_weight(s: int) -> Fraction:
    """Delta_s = ((2 - s)^2 - 1) / 8."""
    return Fraction((2 - s) ** 2 - 1, 8)


class QSeries:
    """Finite Laurent polynomial in q with rational exponents and integer coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Fraction, int] = {}
        for e, c in items:
            e = Fraction(e)
            if EXPONENT_DENOMINATOR % e.denominator:
                raise DomainError(f"exponent {e} has denominator not dividing 24")
            if int(c) != c:
                raise DomainError(f"coefficient {c} is not an integer")
            acc[e] = acc.get(e, 0) + int(c)
        self._terms = {e: c for e, c in sorted(acc.items()) if c}

    # -- constructors
    @classmethod
    def monomial(cls, exponent=0, coeff: int = 1) -> "QSeries":
        return cls({exponent: coeff})

    @classmethod
    def one(cls) -> "QSeries":
        return cls.monomial(0)

    @classmethod
    def zero(cls) -> "QSeries":
        return cls()

    # -- access
    @property
    def terms(self) -> dict[Fraction, int]:
        return dict(self._terms)

    def coeff(self, exponent) -> int:
        return self._terms.get(Fraction(exponent), 0)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def min_exponent(self) -> Fraction:
        if not self._terms:
            raise DomainError("zero series has no exponents")
        return next(iter(self._terms))

    @property
    def max_exponent(self) -> Fraction:
        if not self._terms:
            raise DomainError("zero series has no exponents")
        return next(reversed(self._terms))

    def at_one(self) -> int:
        return sum(self._terms.values())

    def evaluate(self, q: complex) -> complex:
        return sum(c * q ** float(e) for e, c in self._terms.items())

    def shift(self, exponent) -> "QSeries":
        e0 = Fraction(exponent)
        return QSeries({e + e0: c for e, c in self._terms.items()})

    def truncate(self, max_exponent) -> "QSeries":
        top = Fraction(max_exponent)
        return QSeries({e: c for e, c in self._terms.items() if e <= top})

    def nonnegative(self) -> bool:
        return all(e >= 0 for e in self._terms) and all(c > 0 for c in self._terms.values())

    # -- ring operations
    @staticmethod
    def _lift(other) -> "QSeries":
        if isinstance(other, QSeries):
            return other
        if isinstance(other, int):
            return QSeries.monomial(0, other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return QSeries(itertools.chain(self._terms.items(), other._terms.items()))

    __radd__ = __add__

    def __neg__(self):
        return QSeries({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return QSeries((e1 + e2, c1 * c2) for e1, c1 in self._terms.items()
                       for e2, c2 in other._terms.items())

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = QSeries.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self._terms == other._terms

    def __hash__(self):
        return hash(tuple(self._terms.items()))

    def exact_div(self, divisor: "QSeries") -> "QSeries":
        """Quotient of Laurent polynomials; raises if the remainder is nonzero."""
        divisor = self._lift(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero series")
        if self.is_zero():
            return QSeries()
        scale = EXPONENT_DENOMINATOR
        num = {int(e * scale): c for e, c in self._terms.items()}
        den = {int(e * scale): c for e, c in divisor._terms.items()}
        n0, d0 = min(num), min(den)
        num = {e - n0: c for e, c in num.items()}
        den = {e - d0: c for e, c in den.items()}
        d_top = max(den)
        lead = den[d_top]
        quot: dict[int, int] = {}
        while num and max(num) >= d_top:
            top = max(num)
            c, rem = divmod(num[top], lead)
            if rem:
                raise InexactDivisionError("leading coefficient does not divide")
            quot[top - d_top] = c
            for e, dc in den.items():
                k = e + top - d_top
                v = num.get(k, 0) - c * dc
                if v:
                    num[k] = v
                else:
                    num.pop(k, None)
        if num:
            raise InexactDivisionError(f"nonzero remainder {self} / {divisor}")
        return QSeries({Fraction(e + n0 - d0, scale): c for e, c in quot.items()})

    # -- text form "coeff*q^(p/r)" joined by '+', ascending exponents
    def to_text(self) -> str:
        if not self._terms:
            return "0"
        return "+".join(f"{c}*q^({e.numerator}/{e.denominator})" for e, c in self._terms.items())

    _TERM = re.compile(r"^(-?\d+)\*q\^\((-?\d+)/(\d+)\)$")

    @classmethod
    def from_text(cls, text: str) -> "QSeries":
        text = text.strip()
        if text == "0":
            return cls()
        terms = []
        for tok in re.split(r"\+(?=-?\d+\*q)", text):
            m = cls._TERM.match(tok)
            if not m:
                raise DomainError(f"malformed q-series term {tok!r}")
            terms.append((Fraction(int(m.group(2)), int(m.group(3))), int(m.group(1))))
        return cls(terms)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"QSeries({self.to_text()!r})"


q = QSeries.monomial(1)


# ---- Gaussian polynomials and friends -----------------------------------------

@lru_cache(maxsize=None)
def q_binomial(big_m: int, m: int) -> QSeries:
    """[M; m]_q by the recurrence [M; m] = [M-1; m-1] + q^m [M-1; m]."""
    if m < 0 or m > big_m or big_m < 0:
        return QSeries()
    if m == 0 or m == big_m:
        return QSeries.one()
    return q_binomial(big_m - 1, m - 1) + q_binomial(big_m - 1, m).shift(m)


def q_pochhammer(m: int) -> QSeries:
    """(q)_m = prod_{k=1}^m (1 - q^k)."""
    out = QSeries.one()
    for k in range(1, m + 1):
        out = out * (1 - QSeries.monomial(k))
    return out


def partition_series(order: int) -> QSeries:
    """1/(q)_inf truncated at q^order (partition numbers)."""
    p = [1] + [0] * order
    for k in range(1, order + 1):
        for n in range(k, order + 1):
            p[n] += p[n - k]
    return QSeries(enumerate(p))


@dataclass(frozen=True)
class DoubleColumnDiagram:
    """Occupied heights L (left) and R (right) in columns of height M."""

    big_m: int
    left: frozenset[int]
    right: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "left", frozenset(self.left))
        object.__setattr__(self, "right", frozenset(self.right))
        for j in self.left | self.right:
            if not 1 <= j <= self.big_m:
                raise DomainError(f"height {j} outside 1..{self.big_m}")

    @property
    def m(self) -> int:
        return len(self.left)

    @property
    def n(self) -> int:
        return len(self.right)

    @property
    def energy(self) -> int:
        return sum(self.left) + sum(self.right)

    @property
    def content(self) -> tuple[int, ...]:
        """Number of occupied sites at each height 1..M."""
        return tuple((j in self.left) + (j in self.right) for j in range(1, self.big_m + 1))

    def admissible(self) -> bool:
        # pair the j-th highest sites of the two columns; no segment may point down
        if self.m > self.n:
            return False
        lo = sorted(self.left, reverse=True)
        hi = sorted(self.right, reverse=True)
        return all(a <= b for a, b in zip(lo, hi))


def diagrams(big_m: int, m: int, n: int, admissible_only: bool = True):
    for left in itertools.combinations(range(1, big_m + 1), m):
        for right in itertools.combinations(range(1, big_m + 1), n):
            dia = DoubleColumnDiagram(big_m, frozenset(left), frozenset(right))
            if not admissible_only or dia.admissible():
                yield dia


def diagrams_with_content(content: tuple[int, ...]):
    """All double-column diagrams whose per-height occupation is ``content``."""
    big_m = len(content)
    singles = [j + 1 for j, c in enumerate(content) if c == 1]
    doubles = {j + 1 for j, c in enumerate(content) if c == 2}
    for choice in itertools.product((0, 1), repeat=len(singles)):
        left = doubles | {j for j, side in zip(singles, choice) if side == 0}
        right = doubles | {j for j, side in zip(singles, choice) if side == 1}
        yield DoubleColumnDiagram(big_m, frozenset(left), frozenset(right))


def _check_mn(big_m, m, n):
    if not 0 <= m <= n <= big_m:
        raise DomainError(f"need 0 <= m <= n <= M, got M={big_m}, m={m}, n={n}")


def _young_sum(big_m, m, n) -> QSeries:
    # nested partitions Y1 inside Y2: Y1 in a (M-m) x m box, Y2 in a (M-m) x n box
    # and Y2 containing n-m full rows of length n; rows listed as weakly decreasing parts
    def parts(rows, width):
        return itertools.combinations_with_replacement(range(width, -1, -1), rows)

    rows = big_m - m
    terms = []
    for y1 in parts(rows, m):
        for y2 in parts(rows, n):
            if all(a <= b for a, b in zip(y1, y2)) and all(b == n for b in y2[:n - m]):
                terms.append((sum(y1) + sum(y2), 1))
    return QSeries(terms).shift((m - n) * n)


def skew_q_binomial(big_m: int, m: int, n: int, method: str = "closed_form") -> QSeries:
    """{M; m, n}_q by closed form, admissible diagrams, or nested Young diagrams."""
    _check_mn(big_m, m, n)
    if method == "closed_form":
        return (q_binomial(big_m, m) * q_binomial(big_m, n)
                - q_binomial(big_m, m - 1) * q_binomial(big_m, n + 1) * q ** (n - m + 1))
    if method == "diagrams":
        base = m * (m + 1) // 2 + n * (n + 1) // 2
        return QSeries((d.energy - base, 1) for d in diagrams(big_m, m, n))
    if method == "young":
        if n - m > big_m - m:
            return QSeries()
        return _young_sum(big_m, m, n)
    raise DomainError(f"unknown method {method!r}")


def q_narayana(big_m: int, m: int, n: int) -> QSeries:
    """<M; m, n>_q = q^{m(m+1)/2 + n(n+1)/2} {M; m, n}_q; zero when m > n."""
    if m > n:
        return QSeries()
    _check_mn(big_m, m, n)
    return skew_q_binomial(big_m, m, n).shift(m * (m + 1) // 2 + n * (n + 1) // 2)


def q_narayana_diagrams(big_m: int, m: int, n: int) -> QSeries:
    return QSeries((d.energy, 1) for d in diagrams(big_m, m, n))


def _catalan_sum(big_m, r, kind):
    out = QSeries()
    for m in range(0, big_m - r + 2):
        term = q_narayana(big_m, m, m + r - 1)
        out = out + (term if kind == "odd" else term.shift(-m))
    return out if kind == "odd" else out.shift(Fraction(-(r - 1), 2))


def _catalan_closed(big_m, r, kind):
    if kind == "odd":
        pre = Fraction(r * (r - 1), 2)
        num = (1 - QSeries.monomial(r)) * q_binomial(2 * big_m + 2, big_m + 1 - r)
        den = 1 - QSeries.monomial(big_m + 1)
    else:
        pre = Fraction((r - 1) ** 2, 2)
        num = (1 - QSeries.monomial(2 * r)) * q_binomial(2 * big_m + 1, big_m + 1 - r)
        den = 1 - QSeries.monomial(big_m + r + 1)
    return num.exact_div(den).shift(pre)


def q_catalan(big_m: int, r: int, kind: str = "odd") -> QSeries:
    """C_{M,r}(q) (odd) or C'_{M,r}(q) (even); sum and closed form must agree."""
    if r < 1:
        raise DomainError("r must be >= 1")
    if kind not in ("odd", "even"):
        raise DomainError(f"kind must be 'odd' or 'even', not {kind!r}")
    summed = _catalan_sum(big_m, r, kind)
    closed = _catalan_closed(big_m, r, kind)
    if summed != closed:
        raise ArithmeticError(f"q-Catalan forms disagree at M={big_m}, r={r}, {kind}")
    return summed


# ---- selection rules and characters -----------------------------------------

def _check_ns(big_n, s):
    if big_n < 1 or s < 1 or s > big_n + 1 or (big_n + s) % 2 == 0:
        raise DomainError(f"s={s} is not admissible for {big_n} sites")


def selection_matrix(big_n: int, s: int) -> list[list[int]]:
    """Upper-triangular Toeplitz selection matrix A^(s) (s odd) or B^(s) (s even), 0-based (m, n).

    Entries with m > n multiply vanishing or inadmissible terms and are set to 0.
    """
    _check_ns(big_n, s)
    size = (big_n + 1) // 2
    k = s // 2
    out = [[0] * size for _ in range(size)]
    for m in range(size):
        for n in range(m, size):
            if s % 2:
                out[m][n] = 2 if n - m > k - 1 else (1 if n - m == k - 1 else 0)
            else:
                out[m][n] = 1 if n - m >= k - 1 else 0
    return out


def character_prefactor(s: int) -> Fraction:
    """-c/24 plus the base weight: 0 for s odd, -1/8 for s even."""
    return CENTRAL_SHIFT + (Fraction(0) if s % 2 else Fraction(-1, 8))


def character_closed_form(big_n: int, s: int) -> QSeries:
    """q^{1/12+Delta_s} (1 + q^{(s-1)/2}) / (1 + q^{N/2}) [N; (N+s-1)/2]_q."""
    _check_ns(big_n, s)
    num = (1 + QSeries.monomial(Fraction(s - 1, 2))) * q_binomial(big_n, (big_n + s - 1) // 2)
    den = 1 + QSeries.monomial(Fraction(big_n, 2))
    return num.exact_div(den).shift(CENTRAL_SHIFT + conformal_weight(s))


def narayana_decomposition(big_n: int, s: int) -> QSeries:
    _check_ns(big_n, s)
    big_m = (big_n - 1) // 2
    sel = selection_matrix(big_n, s)
    out = QSeries()
    for m in range(big_m + 1):
        for n in range(m, big_m + 1):
            if sel[m][n]:
                term = q_narayana(big_m, m, n)
                if s % 2 == 0:
                    term = term.shift(Fraction(-(m + n), 2))
                out = out + sel[m][n] * term
    return out.shift(character_prefactor(s))


def finitized_irreducible(big_m: int, r: int, kind: str = "odd") -> QSeries:
    """ch_{r,1}^{(M)} = q^{1/12} C_{M,r}; ch_{r,2}^{(M)} = q^{1/12 - 1/8} C'_{M,r}."""
    shift = CENTRAL_SHIFT if kind == "odd" else CENTRAL_SHIFT - Fraction(1, 8)
    return q_catalan(big_m, r, kind).shift(shift)


def catalan_decomposition(big_n: int, s: int) -> QSeries:
    """Sum over diagonals of the selection matrix against finitized irreducibles.

    The r-sum runs to floor((N+1)/2) = M+1; the last diagonal n - m = M holds the
    single cell (0, M), so no term is empty.
    """
    _check_ns(big_n, s)
    big_m = (big_n - 1) // 2
    sel = selection_matrix(big_n, s)
    kind = "odd" if s % 2 else "even"
    out = QSeries()
    for r in range(1, (big_n + 1) // 2 + 1):
        if sel[0][r - 1]:
            out = out + sel[0][r - 1] * finitized_irreducible(big_m, r, kind)
    return out


def character_limit_truncation(s: int, order) -> QSeries:
    """q^{1/12+Delta_s} (1 + q^{(s-1)/2}) / (q)_inf, keeping relative exponents <= order."""
    order = Fraction(order)
    body = (1 + QSeries.monomial(Fraction(s - 1, 2))) * partition_series(int(order) + 1)
    return body.truncate(order).shift(CENTRAL_SHIFT + conformal_weight(s))


def irreducible_limit_truncation(r: int, order, kind: str = "odd") -> QSeries:
    """Thermodynamic limit of ch_{r,1} (odd) or ch_{r,2} (even), keeping exponents up to
    ``order`` above its leading power."""
    order = Fraction(order)
    if kind == "odd":
        pre, factor = Fraction(r * (r - 1), 2), 1 - QSeries.monomial(r)
        base = CENTRAL_SHIFT
    else:
        pre, factor = Fraction((r - 1) ** 2, 2), 1 - QSeries.monomial(2 * r)
        base = CENTRAL_SHIFT - Fraction(1, 8)
    body = (factor * partition_series(int(order) + 1)).shift(pre)
    return body.truncate(order + pre).shift(base)


@dataclass(frozen=True)
class RefinementTerm:
    r: int
    multiplicity: int
    jordan: bool  # the two copies are tied by Jordan blocks


def character_refinement(s: int, r_max: int) -> list[RefinementTerm]:
    """Irreducible content of chi_s (s odd) with Jordan-block markers, r <= r_max."""
    if s < 1 or s % 2 == 0:
        raise DomainError("refinement is stated for odd s")
    first = max(1, (s - 1) // 2)
    out = []
    if s > 1:
        out.append(RefinementTerm((s - 1) // 2, 1, False))
        first = (s + 1) // 2
    for r in range(first, r_max + 1):
        out.append(RefinementTerm(r, 2, (r - first) % 2 == 0))
    return out


def refinement_truncation(s: int, order) -> QSeries:
    """Sum of multiplicity x limiting irreducible character, truncated at ``order``."""
    order = Fraction(order)
    shift = CENTRAL_SHIFT + conformal_weight(s)
    total = QSeries()
    r_max = 2
    while Fraction(r_max * (r_max - 1), 2) <= order + conformal_weight(s):
        r_max += 1
    for term in character_refinement(s, r_max):
        total = total + term.multiplicity * irreducible_limit_truncation(term.r, order + conformal_weight(s) + 1)
    return total.shift(-shift).truncate(order).shift(shift)


def binomial_count(big_n: int, s: int) -> int:
    return comb(big_n, (big_n + s - 1) // 2)
