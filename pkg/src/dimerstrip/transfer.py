"""Double-row transfer matrices on the strip and the two-double-row column algebra.

D(u)[b, a] is built by column transfer. Each column carries a 4-dim horizontal
channel indexed by 2e + f, where e is the top-row edge and f the bottom-row
edge. The bottom (blue) face sits at argument u, the top (pink) face at u, with
gauge e^{i argument}. For w = 1 the last column uses u - xi (bottom) and u + xi
(top). The left triangle carries x^{1-2e} on e = f, the right one weight 1.

Weights are handled as truncated Taylor series in the spectral parameter so the
same code yields D(u) and its first few derivatives. At u = 0 the transfer
matrix vanishes identically, and the normalized d(0) and the Hamiltonian come
out of the first and second Taylor coefficients exactly.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from importlib import resources
from math import factorial
from pathlib import Path

import numpy as np

from .statespace import (DENSE_MAX_SITES, ComplexOperator, DomainError, Sector,
                         occupation_bits, sector_indices, sectors)
from .tl_algebra import LAMBDA_FF, X_FF, Orientation, face_entries

POLE_EXCLUSION = 1e-6


@dataclass(frozen=True)
class StripModel:
    n: int
    w: int = 0
    xi: float | None = None
    x: complex = X_FF
    gauge_phase: float = 0.0  # extra constant phase on every gauge factor

    def __post_init__(self):
        if self.w not in (0, 1):
            raise DomainError("w must be 0 or 1")
        if self.n < 1:
            raise DomainError("need at least one bulk column")
        if self.w == 0 and self.xi is not None:
            raise DomainError("the boundary field xi only enters when w = 1")
        if self.w == 1 and self.xi is None:
            object.__setattr__(self, "xi", LAMBDA_FF / 2)

    @property
    def lam(self) -> float:
        return LAMBDA_FF

    @property
    def big_n(self) -> int:
        return self.n + self.w

    def normalization(self, u):
        base = np.sin(2 * u)
        if self.w:
            base = base * np.sin(self.xi + self.lam) ** 2
        return base

    def sectors(self) -> list[Sector]:
        return sectors(self.big_n, self.w)


# ---- truncated Taylor series -------------------------------------------------

def _trig_series(theta: float, order: int):
    k = np.arange(order + 1)
    fact = np.array([factorial(i) for i in k], float)
    cos = np.cos(theta + k * np.pi / 2) / fact
    sin = np.sin(theta + k * np.pi / 2) / fact
    up = np.exp(1j * theta) * (1j) ** k / fact
    down = np.exp(-1j * theta) * (-1j) ** k / fact
    return cos, sin, up, down


def _series_mul(p, q):
    return np.convolve(p, q)[: len(p)]


def _series_matmul(v: np.ndarray, c: np.ndarray) -> np.ndarray:
    # v (..., D, K), c (D, D', K)
    order = v.shape[-1]
    out = np.zeros(v.shape[:-2] + (c.shape[1], order), complex)
    for k in range(order):
        for k1 in range(k + 1):
            out[..., k] += v[..., k1] @ c[:, :, k - k1]
    return out


def _face_series(orientation, arg0: float, order: int, phase: float = 0.0):
    cos, sin, up, down = _trig_series(arg0, order)
    return face_entries(orientation, cos, sin, up * np.exp(1j * phase),
                        down * np.exp(-1j * phase))


def column_series(a: int, b: int, u_bottom: float, u_top: float, order: int = 0,
                  phase: float = 0.0) -> np.ndarray:
    """4x4 column matrix as Taylor coefficients, shape (4, 4, order+1).

    Bottom face edges (f, b, f', t), top face edges (e, t, e', a), summed over t.
    """
    blue = _face_series(Orientation.BLUE, u_bottom, order, phase)
    pink = _face_series(Orientation.PINK, u_top, order, phase)
    col = np.zeros((4, 4, order + 1), complex)
    for e, f, e2, f2, t in itertools.product((0, 1), repeat=5):
        wb = blue.get((f, b, f2, t))
        wp = pink.get((e, t, e2, a))
        if wb is not None and wp is not None:
            col[2 * e + f, 2 * e2 + f2] += _series_mul(wb, wp)
    return col


def column_matrix(a: int, b: int, u_bottom: float, u_top: float | None = None) -> np.ndarray:
    u_top = u_bottom if u_top is None else u_top
    return column_series(a, b, u_bottom, u_top)[:, :, 0]


def left_vector(x: complex = X_FF) -> np.ndarray:
    vec = np.zeros(4, complex)
    vec[0], vec[3] = x, 1 / x
    return vec


def right_vector() -> np.ndarray:
    vec = np.zeros(4, complex)
    vec[0] = vec[3] = 1
    return vec


def _column_sets(model: StripModel, u: float, order: int):
    bulk = {(a, b): column_series(a, b, u, u, order, model.gauge_phase)
            for a in (0, 1) for b in (0, 1)}
    sets = [bulk] * model.n
    if model.w:
        xi = model.xi
        edge = {(a, b): column_series(a, b, u - xi, u + xi, order, model.gauge_phase)
                for a in (0, 1) for b in (0, 1)}
        sets = sets + [edge]
    return sets


def _chain(bits_b, bits_a, colsets, left, right, order):
    """All elements <left| prod_j C_j(a_j, b_j) |right> as (nb, na, order+1)."""
    nb, na = len(bits_b), len(bits_a)
    dim = len(left)
    v = np.zeros((nb, na, dim, order + 1), complex)
    v[..., 0] = left
    for j, cols in enumerate(colsets):
        new = np.empty_like(v)
        for a in (0, 1):
            ma = np.nonzero(bits_a[:, j] == a)[0]
            for b in (0, 1):
                mb = np.nonzero(bits_b[:, j] == b)[0]
                if len(ma) and len(mb):
                    sel = np.ix_(mb, ma)
                    new[sel] = _series_matmul(v[sel], cols[(a, b)])
        v = new
    return np.einsum("bavk,v->bak", v, right)


def transfer_series(model: StripModel, u: float, order: int = 0,
                    sector: Sector | None = None) -> np.ndarray:
    """Taylor coefficients D_k with D(u + eps) = sum_k D_k eps^k; shape (order+1, dim, dim)."""
    if sector is None:
        if model.big_n > DENSE_MAX_SITES:
            raise DomainError(f"dense full-space matrices limited to {DENSE_MAX_SITES} sites")
        full = np.zeros((order + 1, 2**model.big_n, 2**model.big_n), complex)
        for sec in model.sectors():
            idx = sec.indices()
            full[:, idx[:, None], idx[None, :]] = transfer_series(model, u, order, sec)
        return full
    if sector.big_n != model.big_n:
        raise DomainError("sector does not belong to this model")
    bits = occupation_bits(sector.indices(), model.big_n)
    block = _chain(bits, bits, _column_sets(model, u, order), left_vector(model.x),
                   right_vector(), order)
    return np.moveaxis(block, -1, 0)


def double_row_transfer(model: StripModel, u: float,
                        sector: Sector | None = None) -> ComplexOperator:
    return ComplexOperator(transfer_series(model, u, 0, sector)[0], model.big_n, sector)


def _check_pole(u):
    if abs(np.sin(2 * u)) <= POLE_EXCLUSION:
        raise DomainError(f"u = {u} is within the exclusion zone of a normalization pole")


def normalized_transfer(model: StripModel, u: float,
                        sector: Sector | None = None) -> ComplexOperator:
    _check_pole(u)
    return double_row_transfer(model, u, sector) / model.normalization(u)


def _normalized_jet(model, sector):
    # D(eps) = D1 eps + D2 eps^2 + ..., normalization = 2 c eps + O(eps^3)
    coeffs = transfer_series(model, 0.0, 2, sector)
    c = 2.0 * (np.sin(model.xi + model.lam) ** 2 if model.w else 1.0)
    return coeffs, c


def initial_value(model: StripModel, sector: Sector | None = None) -> ComplexOperator:
    """d(0), from the exact first Taylor coefficient of D at u = 0."""
    coeffs, c = _normalized_jet(model, sector)
    return ComplexOperator(coeffs[1] / c, model.big_n, sector)


def transfer_hamiltonian(model: StripModel, sector: Sector | None = None) -> ComplexOperator:
    """H with d(u) = I - 2u H + O(u^2), read off the second Taylor coefficient."""
    coeffs, c = _normalized_jet(model, sector)
    return ComplexOperator(-coeffs[2] / c / 2, model.big_n, sector)


def transfer_at_zero_residual(model: StripModel) -> float:
    """max |D(0)|, which vanishes identically."""
    return float(max(np.abs(transfer_series(model, 0.0, 0, s)[0]).max() for s in model.sectors()))


# ---- global properties -------------------------------------------------------

def _blocks(model, u, normalized=False):
    f = normalized_transfer if normalized else double_row_transfer
    return [np.asarray(f(model, u, s)) for s in model.sectors()]


def check_commutation(model: StripModel, u: float, v: float) -> float:
    res = 0.0
    for du, dv in zip(_blocks(model, u), _blocks(model, v)):
        res = max(res, float(np.abs(du @ dv - dv @ du).max()))
    return res


def check_crossing(model: StripModel, u: float) -> float:
    res = 0.0
    for a, b in zip(_blocks(model, u, True), _blocks(model, model.lam - u, True)):
        res = max(res, float(np.abs(a - b).max()))
    return res


def check_initial_condition(model: StripModel) -> float:
    return max(float(np.abs(np.asarray(initial_value(model, s)) - np.eye(s.dim)).max())
               for s in model.sectors())


def _inversion_bracket(model: StripModel, u):
    c, s = np.cos(u), np.sin(u)
    n = model.n
    if model.w == 0:
        return c ** (2 * n) - s ** (2 * n)
    # With the boundary column at (u - xi, u + xi) the identity closes with
    # cos(u+xi)cos(u-xi) on the cos^{2N} term. Writing the same bracket with
    # sines in front of cos^{2N} corresponds to xi -> xi + lam; the two agree
    # up to sign at xi = lam/2.
    xi = model.xi
    return (np.cos(u + xi) * np.cos(u - xi) * c ** (2 * n)
            - np.sin(u + xi) * np.sin(u - xi) * s ** (2 * n))


def inversion_scalar(model: StripModel, u: float) -> complex:
    """Scalar f with D(u) D(u + lam) = f I."""
    return -np.tan(2 * u) ** 2 * _inversion_bracket(model, u) ** 2


def normalized_inversion_root(model: StripModel, u):
    """f(u) with d(u) d(u + lam) = f(u)^2 I."""
    bracket = _inversion_bracket(model, u) / np.cos(2 * u)
    if model.w:
        bracket = bracket / np.sin(model.xi + model.lam) ** 2
    return bracket


def check_inversion_identity(model: StripModel, u: float) -> dict[str, float]:
    _check_pole(u)
    lam = model.lam
    f = inversion_scalar(model, u)
    g2 = normalized_inversion_root(model, u) ** 2
    unnorm = norm = 0.0
    for sec in model.sectors():
        d0 = np.asarray(double_row_transfer(model, u, sec))
        d1 = np.asarray(double_row_transfer(model, u + lam, sec))
        prod = d0 @ d1
        eye = np.eye(sec.dim)
        unnorm = max(unnorm, float(np.abs(prod - f * eye).max()))
        scaled = prod / (model.normalization(u) * model.normalization(u + lam))
        norm = max(norm, float(np.abs(scaled - g2 * eye).max()))
    return {"unnormalized": unnorm, "normalized": norm}


def gauge_components(model: StripModel, u: float) -> dict[int, list[np.ndarray]]:
    """D^(k) with D(theta) = sum_k e^{2ik theta} D^(k), k = f_0 - f_N in {-1, 0, 1}.

    A constant phase e^{i theta} on every gauge factor weighs each configuration
    by g^{2(f_0 - f_N)}: on the strip a single row can gain or lose a particle at
    the boundary, so only the k = 0 part is gauge independent.
    """
    thetas = np.array([0.0, np.pi / 3, 2 * np.pi / 3])  # 2 theta on the cube roots of unity
    samples = []
    for th in thetas:
        shifted = StripModel(model.n, model.w, model.xi, model.x, model.gauge_phase + th)
        samples.append(_blocks(shifted, u))
    out = {}
    for k in (-1, 0, 1):
        phases = np.exp(-2j * k * thetas) / 3
        out[k] = [sum(p * s[i] for p, s in zip(phases, samples)) for i in range(len(samples[0]))]
    return out


def check_gauge_dependence(model: StripModel, u: float, theta: float) -> float:
    """Residual of D(theta) against its three gauge components."""
    comps = gauge_components(model, u)
    shifted = StripModel(model.n, model.w, model.xi, model.x, model.gauge_phase + theta)
    res = 0.0
    for i, blk in enumerate(_blocks(shifted, u)):
        pred = sum(np.exp(2j * k * theta) * comps[k][i] for k in (-1, 0, 1))
        res = max(res, float(np.abs(blk - pred).max()))
    return res


# ---- two stacked double rows -------------------------------------------------

# intermediate states (c, d, e, f): c, d on the upper double row, e, f on the lower
INTERMEDIATE_ORDER = [
    (0, 0, 0, 0), (0, 0, 1, 1), (1, 1, 0, 0), (1, 1, 1, 1), (0, 1, 1, 0), (1, 0, 0, 1),
    (0, 0, 0, 1), (0, 0, 1, 0), (0, 1, 0, 0), (0, 1, 0, 1), (0, 1, 1, 1), (1, 0, 0, 0),
    (1, 0, 1, 0), (1, 0, 1, 1), (1, 1, 0, 1), (1, 1, 1, 0),
]
V6 = slice(0, 6)
V10 = slice(6, 16)


def stacked_column(a: int, b: int, u: float) -> np.ndarray:
    """16x16 column of D(u) (lower, bottom edge b) under D(u + lam) (upper, top edge a)."""
    lam = LAMBDA_FF
    lower = {m: column_matrix(m, b, u) for m in (0, 1)}
    upper = {m: column_matrix(a, m, u + lam) for m in (0, 1)}
    out = np.zeros((16, 16), complex)
    for i, (c, d, e, f) in enumerate(INTERMEDIATE_ORDER):
        for k, (c2, d2, e2, f2) in enumerate(INTERMEDIATE_ORDER):
            out[i, k] = sum(lower[m][2 * e + f, 2 * e2 + f2] * upper[m][2 * c + d, 2 * c2 + d2]
                            for m in (0, 1))
    return out


def stacked_left() -> np.ndarray:
    vec = np.zeros(16, complex)
    vec[:4] = (-1, 1, 1, -1)
    return vec


def stacked_right() -> np.ndarray:
    vec = np.zeros(16, complex)
    vec[:4] = 1
    return vec


_TOKEN_FACTOR = re.compile(r"^(i|c|s|z)(?:\^(-?\d+))?$")


def _eval_token(tok: str, c, s, z) -> complex:
    if tok == "0":
        return 0.0
    sign = -1.0 if tok.startswith("-") else 1.0
    val: complex = sign
    for factor in tok.lstrip("-").split("*"):
        m = _TOKEN_FACTOR.match(factor)
        if m is None:
            raise ValueError(f"bad factor {factor!r} in token {tok!r}")
        base = {"i": 1j, "c": c, "s": s, "z": z}[m.group(1)]
        val *= base ** int(m.group(2) or 1)
    return val


def load_reference_tokens(path: str | Path | None = None) -> dict[tuple[int, int], list[list[str]]]:
    if path is None:
        text = resources.files("dimerstrip").joinpath("data/two_row_columns.txt").read_text()
    else:
        text = Path(path).read_text()
    out: dict[tuple[int, int], list[list[str]]] = {}
    current = None
    for line in text.splitlines():
        m = re.match(r"#\s*block a=(\d) b=(\d)", line)
        if m:
            current = (int(m.group(1)), int(m.group(2)))
            out[current] = []
        elif line.strip() and not line.startswith("#"):
            out[current].append(line.split())
    for key, rows in out.items():
        if len(rows) != 16 or any(len(r) != 16 for r in rows):
            raise ValueError(f"block {key} is not 16x16")
    return out


def reference_column(a: int, b: int, u: float, tokens=None) -> np.ndarray:
    tokens = load_reference_tokens() if tokens is None else tokens
    c, s, z = np.cos(u), np.sin(u), np.exp(1j * u)
    return np.array([[_eval_token(t, c, s, z) for t in row] for row in tokens[(a, b)]])


def similarity_matrix(u: float) -> np.ndarray:
    """S with S^-1 R(0/0)_6 S diagonal."""
    z4 = np.exp(4j * u)
    z8 = z4 * z4
    p, m = z4 + 1, z4 - 1
    h = (z8 - 1) / (2 * z4)
    return np.array([
        [0, 0, -m**2 * p / (4 * z8), (z8 - 1) / (2 * z8), 0, p / z4],
        [-p**2 / (2 * z4), 0, -m**2 / (2 * z4), m / z4, 0, p**2 / (2 * z4)],
        [0, -p**2 / (2 * z4), -m**2 / (2 * z4), m / z4, 0, p**2 / (2 * z4)],
        [-p, -p, 0, h, 0, p],
        [0, 0, 0, 0, 0, h],
        [h, h, h, 0, h, 0],
    ], complex)


def similarity_boundaries(u: float) -> tuple[np.ndarray, np.ndarray]:
    """Closed forms of <left|S and S^-1|right> on the six-dim block."""
    z4 = np.exp(4j * u)
    z8 = z4 * z4
    p, m = z4 + 1, z4 - 1
    left = np.array([(z8 - 1) / (2 * z4), (z8 - 1) / (2 * z4),
                     -m**2 * (3 * z4 - 1) / (4 * z8), -m**3 / (2 * z8), 0, 0])
    right = np.array([2 * z4 * m / p**3, 2 * z4 * m / p**3, -4 * z4 * m / p**3,
                      2 * z4 * (5 * z8 - 2 * z4 + 1) / (m * p**3), 0, 0])
    return left, right


def diagonal_spectrum(u: float) -> np.ndarray:
    c2, s2 = np.cos(u) ** 2, np.sin(u) ** 2
    return np.array([s2 * s2, c2 * c2, s2 * c2, s2 * c2, -s2 * c2, -s2 * c2])


def delta_column(u: float) -> np.ndarray:
    z = np.exp(1j * u)
    return 2 * z**2 / (1 - z**4) * (stacked_column(0, 0, u) - stacked_column(1, 1, u))


def delta_chain_vector(u: float) -> np.ndarray:
    """Direction of prod R(a_j/a_j)_6 DeltaR |right>_6 for any diagonal bits.

    The last entry is -i sin 2u: states 0110 and 1001 pick up opposite signs.
    Both vanish against <left|, so the diagonal-element argument is unaffected.
    """
    z = np.exp(1j * u)
    return np.array([z**-2, np.cos(2 * u), np.cos(2 * u), z**2,
                     1j * np.sin(2 * u), -1j * np.sin(2 * u)])


def _power_sum_distance(m: np.ndarray, spectrum: np.ndarray) -> float:
    """max_k |tr m^k - sum lambda^k| for k = 1..dim, relative to sum |lambda|^k.

    Power sums fix the eigenvalue multiset and stay well conditioned where the
    eigenvalues merge (u = pi/4), unlike a direct eigenvalue comparison.
    """
    worst, p = 0.0, np.eye(m.shape[0])
    for k in range(1, m.shape[0] + 1):
        p = p @ m
        scale = max(1.0, float(np.sum(np.abs(spectrum) ** k)))
        worst = max(worst, abs(np.trace(p) - np.sum(spectrum**k)) / scale)
    return worst


def two_row_suite(n: int, u: float) -> dict[str, float]:
    """Residuals of the six column-algebra facts behind the w = 0 inversion identity."""
    if not 2 <= n <= 8:
        raise DomainError("two-row suite supports 2 <= n <= 8")
    _check_pole(u)
    c, s, z = np.cos(u), np.sin(u), np.exp(1j * u)
    cols = {(a, b): stacked_column(a, b, u) for a in (0, 1) for b in (0, 1)}
    tokens = load_reference_tokens()
    report: dict[str, float] = {}

    report["reference_arrays"] = max(float(np.abs(cols[k] - reference_column(*k, u, tokens)).max())
                                   for k in cols)

    report["block_structure"] = max(
        max(float(np.abs(cols[(a, a)][V6, V10]).max()), float(np.abs(cols[(a, a)][V10, V6]).max()))
        for a in (0, 1))

    r6 = cols[(0, 0)][V6, V6]
    # S degenerates at u = pi/4, so every check is written without inverting it
    smat = similarity_matrix(u)
    lam6 = diagonal_spectrum(u)
    lS, Sr = similarity_boundaries(u)
    left6, right6 = stacked_left()[V6], stacked_right()[V6]
    snorm = float(np.abs(smat).max())
    report["similarity"] = max(
        float(np.abs(r6 @ smat - smat * lam6).max()) / max(1.0, snorm),
        _power_sum_distance(r6, lam6),
        float(np.abs(left6 @ smat - lS).max()),
        float(np.abs(smat @ Sr - right6).max()) / max(1.0, snorm * float(np.abs(Sr).max())))

    delta6 = delta_column(u)[V6, V6]
    target = delta_chain_vector(u)
    scale = (-(s * c) ** 2) ** (n - 1)
    worst_vec = worst_left = 0.0
    for bits in itertools.product((0, 1), repeat=n - 1):
        vec = delta6 @ right6
        for a in reversed(bits):
            vec = cols[(a, a)][V6, V6] @ vec
        worst_vec = max(worst_vec, float(np.abs(vec - scale * target).max()))
        worst_left = max(worst_left, float(abs(left6 @ vec)))
    report["delta_chain"] = worst_vec
    report["delta_left_orthogonal"] = worst_left

    expected = -np.tan(2 * u) ** 2 * (c ** (2 * n) - s ** (2 * n)) ** 2
    worst = 0.0
    for bits in itertools.product((0, 1), repeat=n):
        vec = right6.copy()
        for a in reversed(bits):
            vec = cols[(a, a)][V6, V6] @ vec
        worst = max(worst, float(abs(left6 @ vec - expected)))
    report["diagonal_elements"] = worst

    # full product through the 16-dim channel, compared with D(u) D(u+lam)
    model = StripModel(n)
    colsets = [{k: v[:, :, None] for k, v in cols.items()}] * n
    off = agree = 0.0
    for sec in model.sectors():
        bits = occupation_bits(sec.indices(), n)
        prod = _chain(bits, bits, colsets, stacked_left(), stacked_right(), 0)[..., 0]
        direct = (np.asarray(double_row_transfer(model, u, sec))
                  @ np.asarray(double_row_transfer(model, u + LAMBDA_FF, sec)))
        mask = ~np.eye(sec.dim, dtype=bool)
        if mask.any():
            off = max(off, float(np.abs(prod[mask]).max()))
        agree = max(agree, float(np.abs(prod - direct).max()))
    report["off_diagonal_vanish"] = off
    report["stacked_vs_product"] = agree
    return report


# ---- plain-text complex matrix files ----------------------------------------

def format_complex(val: complex) -> str:
    return f"{val.real:.17g}{val.imag:+.17g}i"


def parse_complex(tok: str) -> complex:
    return complex(tok.replace("i", "j"))


def write_matrix_file(path: str | Path, matrices: dict[str, np.ndarray],
                      comments: list[str] | None = None) -> None:
    lines = [f"# {c}" for c in comments or []]
    for name, mat in matrices.items():
        lines.append(f"# matrix {name} {mat.shape[0]}x{mat.shape[1]}")
        lines.extend(" ".join(format_complex(complex(v)) for v in row) for row in np.asarray(mat))
    Path(path).write_text("\n".join(lines) + "\n")


def read_matrix_file(path: str | Path) -> dict[str, np.ndarray]:
    out: dict[str, list] = {}
    current = None
    for line in Path(path).read_text().splitlines():
        m = re.match(r"#\s*matrix\s+(\S+)", line)
        if m:
            current = m.group(1)
            out[current] = []
        elif line.strip() and not line.startswith("#"):
            if current is None:
                raise ValueError("matrix rows before any '# matrix' header")
            out[current].append([parse_complex(t) for t in line.split()])
    return {k: np.array(v, complex) for k, v in out.items()}
