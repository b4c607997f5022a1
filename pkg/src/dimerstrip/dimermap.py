"""Vertex, particle and dimer pictures of one double row, with brute-force oracles.

Lattice sites of the dimer model are the edges of the face lattice (the medial
lattice, where occupations live). A dimer joins two adjacent sides of one face
and half-covers that face. Side tags: L, B, R, T; a dimer is a pair such as "BR".

Which sides a face covers follows from its occupations:

    blue (bottom row):  L if a_L = 1, B if a_B = 0, R if a_R = 0, T if a_T = 1
    pink (top row):     L if a_L = 0, B if a_B = 0, R if a_R = 1, T if a_T = 1

so every shared edge is covered by exactly one of its two faces. The face covering
all four sides has two dimer options and the face covering none has no dimer.
In a blue row the two-option face is the g-weighted tile (1,0,0,1); in a pink row
it is the g^{-1}-weighted tile (0,0,1,1). The dimer gauge is therefore g = rho on
blue faces and g = 1/rho on pink faces, which gives the two-option face rho^2 and
the empty face 1 in both rows.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .statespace import DomainError, OccupationState
from .tl_algebra import Orientation, face_entries
from .transfer import StripModel, left_vector

MAX_BRUTE_FORCE_COLUMNS = 6

# arrows: horizontal +1 = right, vertical +1 = up
_REFERENCE = {Orientation.BLUE: (1, 1, 1, 1), Orientation.PINK: (-1, 1, -1, 1)}

# face type by occupations (left, bottom, right, top)
_FACE_TYPES = {
    Orientation.BLUE: {(0, 0, 0, 0): "a1", (1, 1, 1, 1): "a2", (0, 1, 0, 1): "b1",
                       (1, 0, 1, 0): "b2", (1, 0, 0, 1): "c1", (0, 1, 1, 0): "c2"},
    Orientation.PINK: {(0, 0, 0, 0): "a1", (1, 1, 1, 1): "a2", (0, 1, 0, 1): "b1",
                       (1, 0, 1, 0): "b2", (0, 0, 1, 1): "c1", (1, 1, 0, 0): "c2"},
}

# dimer options per face type: (tag, weight kind); kinds "h", "v", "hh", "vv", "" (empty)
_OPTIONS = {
    Orientation.BLUE: {"a1": (("BR", "h"),), "a2": (("TL", "h"),), "b1": (("RT", "v"),),
                       "b2": (("LB", "v"),), "c1": (("BR+TL", "hh"), ("RT+LB", "vv")),
                       "c2": (("", ""),)},
    Orientation.PINK: {"a1": (("LB", "h"),), "a2": (("RT", "h"),), "b1": (("TL", "v"),),
                       "b2": (("BR", "v"),), "c1": (("RT+LB", "hh"), ("BR+TL", "vv")),
                       "c2": (("", ""),)},
}


def arrows_from_particles(occ: Sequence[int], orientation) -> tuple[int, ...]:
    """Edge arrows of a face: an edge carries a particle iff its arrow opposes the reference."""
    ref = _REFERENCE[Orientation(orientation)]
    return tuple(-r if a else r for a, r in zip(occ, ref))


def particles_from_arrows(arrows: Sequence[int], orientation) -> tuple[int, ...]:
    ref = _REFERENCE[Orientation(orientation)]
    return tuple(int(s != r) for s, r in zip(arrows, ref))


def ice_rule(arrows: Sequence[int]) -> bool:
    """Two arrows in, two out (left/bottom point in when +1, right/top when -1)."""
    left, bottom, right, top = arrows
    return (left > 0) + (bottom > 0) + (right < 0) + (top < 0) == 2


def face_type(occ: Sequence[int], orientation) -> str:
    try:
        return _FACE_TYPES[Orientation(orientation)][tuple(occ)]
    except KeyError:
        raise DomainError(f"{tuple(occ)} is not an allowed {Orientation(orientation).value} face")


def covered_sides(occ: Sequence[int], orientation) -> frozenset[str]:
    left, bottom, right, top = occ
    if Orientation(orientation) == Orientation.BLUE:
        flags = (left == 1, bottom == 0, right == 0, top == 1)
    else:
        flags = (left == 0, bottom == 0, right == 1, top == 1)
    return frozenset(s for s, f in zip("LBRT", flags) if f)


@dataclass(frozen=True)
class FaceDimerRule:
    """Dimer options of one face type: (placement tag, weight factor)."""

    face: str
    orientation: Orientation
    options: tuple[tuple[str, float], ...]

    @classmethod
    def build(cls, face: str, orientation, u: float, rho: float = 1.0) -> "FaceDimerRule":
        zh, zv = rho * np.cos(u), rho * np.sin(u)
        weight = {"h": zh, "v": zv, "hh": zh**2, "vv": zv**2, "": 1.0}
        ori = Orientation(orientation)
        if face not in _OPTIONS[ori]:
            raise DomainError(f"unknown face type {face!r}")
        return cls(face, ori, tuple((tag, float(weight[k])) for tag, k in _OPTIONS[ori][face]))

    @property
    def total_weight(self) -> float:
        return sum(w for _, w in self.options)

    @property
    def dimer_count(self) -> int:
        """Dimer configurations of this face; an empty face contributes one."""
        return len(self.options)


def check_weight_consistency(u: float, rho: float = 1.0) -> float:
    """Residual of c1 = zeta_h^2 + zeta_v^2 = rho^2 and c2 = 1 in the dimer gauge g = rho."""
    c1 = FaceDimerRule.build("c1", Orientation.BLUE, u, rho).total_weight
    c2 = FaceDimerRule.build("c2", Orientation.BLUE, u, rho).total_weight
    return float(max(abs(c1 - rho * rho), abs(c2 - 1.0)))


def isotropic_weights(rho: float = np.sqrt(2), u: float = np.pi / 4) -> tuple[float, ...]:
    """(a, b, c1, c2) in the dimer gauge."""
    return (rho * np.cos(u), rho * np.sin(u), rho * rho, 1.0)


# ---- double-row configurations -----------------------------------------------

@dataclass(frozen=True)
class DoubleRowConfig:
    """Edge occupations of one double row.

    bottom (b_j) and top (a_j) states, middle row t_j, and horizontal edges
    f_0..f_N (bottom row) and e_0..e_N (top row).
    """

    bottom: tuple[int, ...]
    middle: tuple[int, ...]
    top: tuple[int, ...]
    f: tuple[int, ...]
    e: tuple[int, ...]

    @property
    def columns(self) -> int:
        return len(self.bottom)

    def blue_face(self, j: int) -> tuple[int, int, int, int]:
        return (self.f[j], self.bottom[j], self.f[j + 1], self.middle[j])

    def pink_face(self, j: int) -> tuple[int, int, int, int]:
        return (self.e[j], self.middle[j], self.e[j + 1], self.top[j])

    def faces(self) -> Iterator[tuple[int, int, Orientation, tuple[int, int, int, int]]]:
        """(row, col, orientation, occupations); row 0 is the bottom row."""
        for j in range(self.columns):
            yield 0, j, Orientation.BLUE, self.blue_face(j)
        for j in range(self.columns):
            yield 1, j, Orientation.PINK, self.pink_face(j)

    @property
    def boundary_flux(self) -> int:
        return self.f[0] - self.f[-1]


def _face_args(model: StripModel, u: float):
    args = [(u, u)] * model.n
    if model.w:
        args = args + [(u - model.xi, u + model.xi)]
    return args


def _entries(orientation, arg, g):
    return face_entries(orientation, np.cos(arg), np.sin(arg), g, 1 / g)


def iter_double_row_configs(model: StripModel, a: OccupationState,
                            b: OccupationState) -> Iterator[DoubleRowConfig]:
    """Every edge assignment with all faces allowed and both boundary triangles closed."""
    cols = model.big_n
    if a.big_n != cols or b.big_n != cols:
        raise DomainError("states do not match the number of columns")
    if model.n > MAX_BRUTE_FORCE_COLUMNS:
        raise DomainError(f"brute force limited to N <= {MAX_BRUTE_FORCE_COLUMNS}")
    blue_ok = _FACE_TYPES[Orientation.BLUE]
    pink_ok = _FACE_TYPES[Orientation.PINK]

    def extend(j, f, e, t):
        if j == cols:
            if f[-1] == e[-1]:  # right triangle
                yield DoubleRowConfig(b.bits, tuple(t), a.bits, tuple(f), tuple(e))
            return
        for tj, f2, e2 in itertools.product((0, 1), repeat=3):
            if (f[-1], b.bits[j], f2, tj) in blue_ok and (e[-1], tj, e2, a.bits[j]) in pink_ok:
                yield from extend(j + 1, f + [f2], e + [e2], t + [tj])

    for edge in (0, 1):  # left triangle forces e_0 = f_0
        yield from extend(0, [edge], [edge], [])


def config_weight(model: StripModel, u: float, cfg: DoubleRowConfig) -> complex:
    """Transfer-matrix weight: gauge e^{i(arg + phase)} on every face, x^{1-2e_0} on the left."""
    w = complex(left_vector(model.x)[3 * cfg.e[0]])
    for j, (ub, ut) in enumerate(_face_args(model, u)):
        gb = np.exp(1j * (ub + model.gauge_phase))
        gt = np.exp(1j * (ut + model.gauge_phase))
        w *= _entries(Orientation.BLUE, ub, gb)[cfg.blue_face(j)]
        w *= _entries(Orientation.PINK, ut, gt)[cfg.pink_face(j)]
    return w


def dimer_weight(cfg: DoubleRowConfig, u: float, rho: float, x: complex,
                 modulus_boundary: bool = False) -> complex:
    """Dimer-gauge weight: sum over the c1 expansions of the product of option weights."""
    w = complex(abs(x) if modulus_boundary else left_vector(x)[3 * cfg.e[0]])
    for _, _, ori, occ in cfg.faces():
        w *= FaceDimerRule.build(face_type(occ, ori), ori, u, rho).total_weight
    return w


@dataclass(frozen=True)
class DoubleRowEnumeration:
    configs: int
    weighted_sum: complex  # transfer gauge, equals D(u)[b, a]
    dimer_sum: complex  # dimer gauge at (u, rho), boundary weights x^{+-1}
    dimer_count: int  # distinct dimer configurations
    isotropic_sum: float  # isotropic dimer weights, boundary weights replaced by |x|
    expansion_sum: float  # sum over emitted dimer configurations of their weights
    conserved_double_row: bool
    single_row_changes: bool


def enumerate_double_row_configs(model: StripModel, a: OccupationState, b: OccupationState,
                                 u: float | None = None, rho: float = np.sqrt(2)
                                 ) -> DoubleRowEnumeration:
    """Brute-force sums over one double row between bottom state b and top state a."""
    u = np.pi / 4 if u is None else u
    configs = list(iter_double_row_configs(model, a, b))
    total = sum((config_weight(model, u, c) for c in configs), 0j)
    dimer = sum((dimer_weight(c, u, rho, model.x) for c in configs), 0j)
    iso = float(sum(dimer_weight(c, np.pi / 4, np.sqrt(2), model.x, True).real for c in configs))
    count = 0
    expansion = 0.0
    for c in configs:
        for dc in map_vertex_to_dimers(c, np.pi / 4, np.sqrt(2)):
            count += 1
            expansion += dc.weight
    single = any(sum(c.middle) != sum(c.bottom) for c in configs)
    conserved = all(sum(c.top) == sum(c.bottom) for c in configs)
    return DoubleRowEnumeration(len(configs), total, dimer, count, iso, expansion, conserved, single)


# ---- dimer configurations ------------------------------------------------------

@dataclass(frozen=True)
class DimerConfiguration:
    tokens: tuple[tuple[int, int, str, int, str], ...]  # (row, col, type, option, tag)
    weight: float

    def to_text(self) -> str:
        return " ".join(f"{r}:{c}:{t}:{o}" for r, c, t, o, _ in self.tokens)

    def tags(self) -> dict[tuple[int, int], str]:
        return {(r, c): tag for r, c, _, _, tag in self.tokens}


def map_vertex_to_dimers(cfg: DoubleRowConfig, u: float = np.pi / 4,
                         rho: float = np.sqrt(2)) -> list[DimerConfiguration]:
    """Cartesian product of the per-face dimer options; 2^(number of c1 faces) entries."""
    per_face = []
    for row, col, ori, occ in cfg.faces():
        ftype = face_type(occ, ori)
        rule = FaceDimerRule.build(ftype, ori, u, rho)
        per_face.append([(row, col, ftype, k, tag, w) for k, (tag, w) in enumerate(rule.options)])
    out = []
    for choice in itertools.product(*per_face):
        weight = float(np.prod([c[5] for c in choice]))
        out.append(DimerConfiguration(tuple(c[:5] for c in choice), weight))
    return out


def parse_dimer_text(text: str) -> list[tuple[int, int, str, int]]:
    out = []
    for tok in text.split():
        parts = tok.split(":")
        if len(parts) != 4:
            raise DomainError(f"malformed dimer token {tok!r}")
        out.append((int(parts[0]), int(parts[1]), parts[2], int(parts[3])))
    return out


def _side_sites(row: int, col: int) -> dict[str, tuple]:
    """Global medial sites around face (row, col) of a stack of rows."""
    return {"L": ("h", row, col), "R": ("h", row, col + 1),
            "B": ("v", row, col), "T": ("v", row + 1, col)}


def coverage(stack: Sequence[DoubleRowConfig], dimers: Sequence[DimerConfiguration]
             ) -> dict[tuple, int]:
    """How often each medial site is covered, counting boundary zigzag dimers.

    Double row k occupies face rows 2k (blue) and 2k+1 (pink). A boundary dimer on
    each side of each double row covers whichever of its two boundary sites the
    faces leave open.
    """
    count: dict[tuple, int] = {}
    for k, (cfg, dim) in enumerate(zip(stack, dimers)):
        for (row, col), tag in dim.tags().items():
            sites = _side_sites(2 * k + row, col)
            for side in tag.replace("+", ""):
                count[sites[side]] = count.get(sites[side], 0) + 1
        for col in (0, cfg.columns):
            for row in (2 * k, 2 * k + 1):
                count.setdefault(("h", row, col), 0)
            open_sites = [("h", r, col) for r in (2 * k, 2 * k + 1) if count[("h", r, col)] == 0]
            if len(open_sites) == 1:
                count[open_sites[0]] += 1
    return count


def check_covering(stack: Sequence[DoubleRowConfig]) -> bool:
    """Every site strictly inside the stack is covered exactly once, for every expansion.

    Consecutive double rows must share their boundary state. The open bottom and
    top rows of sites are excluded; horizontal sites include both strip edges.
    """
    for lower, upper in zip(stack, stack[1:]):
        if lower.top != upper.bottom:
            raise DomainError("stacked double rows do not share their boundary state")
    rows, cols = 2 * len(stack), stack[0].columns
    sites = [("h", r, c) for r in range(rows) for c in range(cols + 1)]
    sites += [("v", r, c) for r in range(1, rows) for c in range(cols)]
    for expansion in itertools.product(*(map_vertex_to_dimers(c) for c in stack)):
        cov = coverage(stack, expansion)
        if any(cov.get(s, 0) != 1 for s in sites):
            return False
    return True
