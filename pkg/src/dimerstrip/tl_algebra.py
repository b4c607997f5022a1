"""Tile weights, fermion bilinears, Temperley-Lieb generators and face operators.

Operators act on (C^2)^{⊗𝒩} in the occupation basis of ``statespace`` (site 1 is
the least significant bit). Operators on different sites commute: there are no
Jordan-Wigner sign strings.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .statespace import ComplexOperator, DomainError

LAMBDA_FF = np.pi / 2
X_FF = 1j  # e^{i lambda} at the free-fermion point


class Orientation(str, Enum):
    BLUE = "blue"
    PINK = "pink"


def s_k(k: int, u, lam: float = LAMBDA_FF):
    """s_k(u) = sin(u + k lam) / sin(lam)."""
    return np.sin(u + k * lam) / np.sin(lam)


@dataclass(frozen=True)
class FaceWeightTable:
    """The six nonzero weights of one face, keyed by (left, bottom, right, top)."""

    u: float
    g: complex
    orientation: Orientation = Orientation.BLUE
    lam: float = LAMBDA_FF
    rho: float = 1.0

    @property
    def a(self):
        return self.rho * s_k(1, -self.u, self.lam)

    @property
    def b(self):
        return self.rho * s_k(0, self.u, self.lam)

    @property
    def c1(self):
        return self.g

    @property
    def c2(self):
        return 1 / self.g

    def entries(self) -> dict[tuple[int, int, int, int], complex]:
        return face_entries(self.orientation, self.a, self.b, self.c1, self.c2)

    def weight(self, left, bottom, right, top) -> complex:
        return self.entries().get((left, bottom, right, top), 0.0)

    def free_fermion_residual(self) -> float:
        # a^2 + b^2 = c1 c2 (holds for rho = 1 at lam = pi/2)
        return float(abs(self.a**2 + self.b**2 - self.c1 * self.c2 * self.rho**2))


def face_entries(orientation, a, b, g, g_inv) -> dict:
    """Edge labels (left, bottom, right, top) -> weight; values may be arrays."""
    if Orientation(orientation) == Orientation.BLUE:
        # particles travel up and to the right: left + bottom = right + top
        return {(0, 0, 0, 0): a, (1, 1, 1, 1): a, (0, 1, 0, 1): b, (1, 0, 1, 0): b,
                (1, 0, 0, 1): g, (0, 1, 1, 0): g_inv}
    # particles travel up and to the left: bottom + right = top + left
    return {(0, 0, 0, 0): a, (1, 1, 1, 1): a, (0, 1, 0, 1): b, (1, 0, 1, 0): b,
            (1, 1, 0, 0): g, (0, 0, 1, 1): g_inv}


# ---- single-site building blocks ---------------------------------------------

_LOCAL = {
    "annihilate": np.array([[0, 1], [0, 0]], complex),  # f|1> = |0>
    "create": np.array([[0, 0], [1, 0]], complex),
    "number": np.diag([0, 1]).astype(complex),
    "covacancy": np.diag([1, 0]).astype(complex),
}


@lru_cache(maxsize=None)
def _bit_reversal(big_n: int) -> np.ndarray:
    idx = np.arange(2**big_n)
    rev = np.zeros_like(idx)
    for j in range(big_n):
        rev |= ((idx >> j) & 1) << (big_n - 1 - j)
    return rev


def embed_local(mat: np.ndarray, big_n: int, first_site: int) -> np.ndarray:
    """Place a 2^k x 2^k matrix on sites first_site..first_site+k-1.

    ``mat`` is indexed with the first of its sites as the most significant bit,
    matching the (a_j, a_{j+1}) ordering of the 4x4 face arrays.
    """
    k = int(round(np.log2(mat.shape[0])))
    if not (1 <= first_site and first_site + k - 1 <= big_n):
        raise DomainError(f"sites {first_site}..{first_site + k - 1} outside 1..{big_n}")
    big_endian = np.kron(np.kron(np.eye(2**(first_site - 1)), mat),
                         np.eye(2**(big_n - first_site - k + 1)))
    perm = _bit_reversal(big_n)
    return big_endian[np.ix_(perm, perm)]


def _check_site(big_n, j, last):
    if not 1 <= j <= last:
        raise DomainError(f"site index {j} outside 1..{last} for {big_n} sites")


def fermion_op(big_n: int, j: int, kind: str) -> ComplexOperator:
    """f_j, f_j^dagger, n_j or 1 - n_j on the full space."""
    _check_site(big_n, j, big_n)
    if kind not in _LOCAL:
        raise DomainError(f"unknown operator kind {kind!r}")
    return ComplexOperator(embed_local(_LOCAL[kind], big_n, j), big_n)


def tl_generator(big_n: int, j: int, x: complex = X_FF) -> ComplexOperator:
    """e_j = x n_j + x^-1 n_{j+1} + f_j^† f_{j+1} + f_{j+1}^† f_j."""
    _check_site(big_n, j, big_n - 1)
    n = _LOCAL["number"]
    cr, an = _LOCAL["create"], _LOCAL["annihilate"]
    one = np.eye(2)
    local = x * np.kron(n, one) + np.kron(one, n) / x + np.kron(cr, an) + np.kron(an, cr)
    return ComplexOperator(embed_local(local, big_n, j), big_n)


def tl_generator_local(x: complex = X_FF) -> np.ndarray:
    return np.array([[0, 0, 0, 0], [0, 1 / x, 1, 0], [0, 1, x, 0], [0, 0, 0, x + 1 / x]], complex)


def x_matrix(u, g=None, lam: float = LAMBDA_FF) -> np.ndarray:
    """4x4 array X(u,g) in the basis (a_j, a_{j+1}) = 00, 01, 10, 11."""
    g = np.exp(1j * u) if g is None else g
    a, b = s_k(1, -u, lam), s_k(0, u, lam)
    return np.array([[a, 0, 0, 0], [0, 1 / g, b, 0], [0, b, g, 0], [0, 0, 0, a]], complex)


def xtilde_matrix(u, g=None, lam: float = LAMBDA_FF) -> np.ndarray:
    """4x4 array of the rotated face, same basis as x_matrix."""
    g = np.exp(1j * u) if g is None else g
    a, b = s_k(1, -u, lam), s_k(0, u, lam)
    return np.array([[a, 0, 0, 1 / g], [0, 0, b, 0], [0, b, 0, 0], [g, 0, 0, a]], complex)


def face_operator(big_n: int, j: int, u, g=None, variant: str = "X",
                  lam: float = LAMBDA_FF) -> ComplexOperator:
    """X_j(u,g) or Xtilde_j(u,g) acting on sites (j, j+1); default gauge g = e^{iu}."""
    _check_site(big_n, j, big_n - 1)
    if variant == "X":
        local = x_matrix(u, g, lam)
    elif variant in ("Xtilde", "Xt"):
        local = xtilde_matrix(u, g, lam)
    else:
        raise DomainError(f"unknown face variant {variant!r}")
    return ComplexOperator(embed_local(local, big_n, j), big_n)


def boundary_triangle(side: str, x: complex = X_FF) -> np.ndarray:
    """K^L = diag(x, 1/x), K^R = identity; both independent of u."""
    if side == "left":
        return np.diag([x, 1 / x]).astype(complex)
    if side == "right":
        return np.eye(2, dtype=complex)
    raise DomainError(f"side must be 'left' or 'right', not {side!r}")
