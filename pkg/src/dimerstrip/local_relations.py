"""Numerical checks of the local identities on minimal (2- or 3-site) spaces.

Every check returns a max-abs residual. Products are written in the vertical
linear action: the rightmost factor is the lowest face in a diagram.

Face conventions for the three boundary-field Yang-Baxter equations. Each relation
has the braid form  B_1 M_2 T_1 = T_2 M_1 B_2  (bottom B, middle M, top T,
subscript = first site acted on), with these faces:

    ybe1:  B = X(v-xi, e^{i(v-xi)})      M = X(u+v, e^{i(u+v)})     T = X(u+xi, e^{i(u+xi)})
    ybe2:  B = X(u-xi, e^{i(u-xi)})      M = Xt(v-u, e^{-i(v-u)})   T = Xt(v-xi, e^{-i(v-xi)})
    ybe3:  B = Xt(u+xi, e^{i(u+xi)})     M = Xt(u-v, e^{i(u-v)})    T = X(v+xi, e^{i(v+xi)})

Rotating a face by a quarter turn inverts its gauge, which is why the left-rotated
faces in ybe2 carry e^{-i(argument)}. All three close for any lambda.

Left reflection equation on sites (1,2), K^L acting on site 1, z = e^{iu}, w = e^{iv}:

    X(v-u, z/w) K X(2lam-u-v, zw) K = K X(2lam-u-v, zw) K X(v-u, z/w)

The second face is a rotated tile drawn in a diagram; in the vertical action its
matrix is the X array with gauge zw. The Xt array in that slot does not close.
"""
from __future__ import annotations

import numpy as np

from .statespace import DomainError
from .tl_algebra import (LAMBDA_FF, X_FF, boundary_triangle, embed_local, s_k,
                         x_matrix, xtilde_matrix)

RESIDUAL_TOL = 1e-11

YBE_VARIANTS = ("fundamental", "ybe1", "ybe2", "ybe3")


def _maxabs(m) -> float:
    return float(np.abs(m).max())


def _face(kind, u, g, lam):
    return x_matrix(u, g, lam) if kind == "X" else xtilde_matrix(u, g, lam)


def check_inversion_local(u, g=None, which: str = "inv1", big_n: int = 2, j: int = 1,
                          lam: float = LAMBDA_FF) -> float:
    """Residual of X(u,g)X(-u,1/g) = s1(u)s1(-u) or Xt(2lam-u,g)Xt(u,g) = s0(u)s2(-u)."""
    if not 1 <= j <= big_n - 1:
        raise DomainError(f"site {j} outside 1..{big_n - 1}")
    g = np.exp(1j * u) if g is None else g
    if which == "inv1":
        prod = x_matrix(u, g, lam) @ x_matrix(-u, 1 / g, lam)
        scalar = s_k(1, u, lam) * s_k(1, -u, lam)
    elif which == "inv2":
        prod = xtilde_matrix(2 * lam - u, g, lam) @ xtilde_matrix(u, g, lam)
        scalar = s_k(0, u, lam) * s_k(2, -u, lam)
    else:
        raise DomainError(f"unknown inversion relation {which!r}")
    full = embed_local(prod, big_n, j)
    return _maxabs(full - scalar * np.eye(2**big_n))


def ybe_faces(variant: str, u, v, xi=0.0, lam: float = LAMBDA_FF):
    """(bottom, middle, top) 4x4 arrays for one of the Yang-Baxter relations."""
    e = lambda t: np.exp(1j * t)
    if variant == "fundamental":
        layout = [("X", u, e(u)), ("X", u + v, e(u + v)), ("X", v, e(v))]
    elif variant == "ybe1":
        layout = [("X", v - xi, e(v - xi)), ("X", u + v, e(u + v)), ("X", u + xi, e(u + xi))]
    elif variant == "ybe2":
        layout = [("X", u - xi, e(u - xi)), ("Xt", v - u, e(u - v)), ("Xt", v - xi, e(xi - v))]
    elif variant == "ybe3":
        layout = [("Xt", u + xi, e(u + xi)), ("Xt", u - v, e(u - v)), ("X", v + xi, e(v + xi))]
    else:
        raise DomainError(f"unknown Yang-Baxter variant {variant!r}")
    return tuple(_face(k, a, g, lam) for k, a, g in layout)


def ybe_sides(variant: str, u, v, xi=0.0, big_n: int = 3, j: int = 1,
              lam: float = LAMBDA_FF, faces=None):
    if not 1 <= j <= big_n - 2:
        raise DomainError(f"site {j} outside 1..{big_n - 2}")
    bot, mid, top = faces if faces is not None else ybe_faces(variant, u, v, xi, lam)
    at = lambda m, k: embed_local(m, big_n, k)
    lhs = at(bot, j) @ at(mid, j + 1) @ at(top, j)
    rhs = at(top, j + 1) @ at(mid, j) @ at(bot, j + 1)
    return lhs, rhs


def check_ybe(u, v, big_n: int = 3, j: int = 1, variant: str = "fundamental", xi=0.0,
              lam: float = LAMBDA_FF) -> float:
    lhs, rhs = ybe_sides(variant, u, v, xi, big_n, j, lam)
    return _maxabs(lhs - rhs)


def reflection_sides(u, v, side: str, x: complex = X_FF, lam: float = LAMBDA_FF):
    one = np.eye(2)
    if side == "right":
        k = np.kron(one, boundary_triangle("right", x))
        a, b = x_matrix(u - v, None, lam), x_matrix(u + v, None, lam)
        return a @ k @ b @ k, k @ b @ k @ a
    if side == "left":
        z, w = np.exp(1j * u), np.exp(1j * v)
        k = np.kron(boundary_triangle("left", x), one)
        a = x_matrix(v - u, z / w, lam)
        b = x_matrix(2 * lam - u - v, z * w, lam)
        return a @ k @ b @ k, k @ b @ k @ a
    raise DomainError(f"side must be 'left' or 'right', not {side!r}")


def check_boundary_ybe(u, v, side: str = "left", x: complex = X_FF,
                       lam: float = LAMBDA_FF) -> float:
    lhs, rhs = reflection_sides(u, v, side, x, lam)
    return _maxabs(lhs - rhs)


def commutator_residual(a: np.ndarray, b: np.ndarray) -> float:
    return _maxabs(a @ b - b @ a)


def run_suite(rng: np.random.Generator, draws: int = 100,
              general_lam: float = np.pi / 3) -> dict[str, float]:
    """Max residual of each local relation over seeded random parameters."""
    out: dict[str, float] = {}

    def track(name, val):
        out[name] = max(out.get(name, 0.0), val)

    for _ in range(draws):
        u, v, xi = rng.uniform(-1.5, 1.5, 3)
        g = np.exp(1j * rng.uniform(0, 2 * np.pi))
        for lam, tag in ((LAMBDA_FF, ""), (general_lam, "@general_lambda")):
            track("inv1" + tag, check_inversion_local(u, g, "inv1", 2, 1, lam))
            track("inv2" + tag, check_inversion_local(u, g, "inv2", 2, 1, lam))
            for variant in YBE_VARIANTS:
                track(variant + tag, check_ybe(u, v, 3, 1, variant, xi, lam))
        track("rbybe", check_boundary_ybe(u, v, "right"))
        track("lbybe", check_boundary_ybe(u, v, "left"))
    return out
