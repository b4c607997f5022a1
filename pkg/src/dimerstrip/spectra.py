"""Hamiltonians, eigenvalues from the inversion identity, selection tables,
characters built from spectra, and Jordan-block censuses.

At the free-fermion point every normalized eigenvalue of d(u) is a product over
ordinates j = 1..M of (1 + k_j sin 2u)^{2-n_j} (1 - k_j sin 2u)^{n_j}, with
k_j = sin(E_j pi / N) and n_j in {0,1,2} counting 1-strings at ordinate j. The
candidate list is validated against the inversion identity (oracle O1) before use.
"""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .qcombi import (QSeries, character_prefactor, diagrams_with_content,
                     selection_matrix)
from .statespace import (DENSE_MAX_SITES, ComplexOperator, DomainError, Sector,
                         occupation_bits)
from .transfer import StripModel, normalized_inversion_root, normalized_transfer

O1_TOL = 1e-12
U0_DEFAULT = np.pi / 5
U0_STEP = 0.01
U0_RETRIES = 50
SEPARATION = 1e-6
TOL_MATCH = 1e-8
TOL_CLUSTER = 1e-7
RANK_THRESHOLD = 1e-8
MAX_JORDAN_DIM = 4000


class OracleFailure(RuntimeError):
    """The closed-form candidates disagree with the inversion identity."""


class SelectionFailure(RuntimeError):
    """A numerical eigenvalue could not be assigned to a candidate."""

    def __init__(self, message: str, value: complex | None = None):
        super().__init__(message)
        self.value = value


# ---- Hamiltonian -------------------------------------------------------------

def boundary_coefficient(xi: float, lam: float = np.pi / 2) -> float:
    """1/(s_0(xi) s_2(xi)), the extra weight on e_N when w = 1 (-2 at xi = lam/2).

    The second log-derivative of the constructed d(u) gives -1/cos^2 xi, which is
    this expression with xi -> xi + lam; the two coincide at xi = lam/2.
    """
    s0 = np.sin(xi) / np.sin(lam)
    s2 = np.sin(xi + 2 * lam) / np.sin(lam)
    return float(1.0 / (s0 * s2))


def _tl_sector_terms(big_n: int, d: int, x: complex):
    """Per generator: (diagonal, hop source positions, hop target positions)."""
    sec = Sector(big_n, d)
    idx = sec.indices()
    bits = occupation_bits(idx, big_n)
    out = []
    for j in range(big_n - 1):
        aj, ak = bits[:, j], bits[:, j + 1]
        diag = x * aj + ak / x
        hop = np.nonzero(aj != ak)[0]
        target = np.searchsorted(idx, idx[hop] ^ ((1 << j) | (1 << (j + 1))))
        out.append((diag, hop, target))
    return out


def hamiltonian(model: StripModel, sector: Sector | None = None) -> ComplexOperator:
    """-sum_{j<N} e_j for the bulk; for w = 1 the last generator e_N carries 1/(s_0(xi) s_2(xi))."""
    big_n = model.big_n
    if sector is None:
        if big_n > DENSE_MAX_SITES:
            raise DomainError(f"dense full-space matrices limited to {DENSE_MAX_SITES} sites")
        full = np.zeros((2**big_n, 2**big_n), complex)
        for sec in model.sectors():
            idx = sec.indices()
            full[np.ix_(idx, idx)] = np.asarray(hamiltonian(model, sec))
        return ComplexOperator(full, big_n)
    if sector.big_n != big_n:
        raise DomainError("sector does not belong to this model")
    coeffs = -np.ones(max(big_n - 1, 0))
    if model.w and big_n >= 2:
        coeffs[-1] = boundary_coefficient(model.xi, model.lam)
    h = np.zeros((sector.dim, sector.dim), complex)
    for c, (diag, hop, target) in zip(coeffs, _tl_sector_terms(big_n, sector.d, model.x)):
        h[np.arange(sector.dim), np.arange(sector.dim)] += c * diag
        h[target, hop] += c
    return ComplexOperator(h, big_n, sector)


# ---- string patterns and candidates -----------------------------------------

@dataclass(frozen=True, order=True)
class StringPattern:
    """1-string counts n_j at ordinates j = 1..M and the parity of the energies E_j."""

    content: tuple[int, ...]
    half_integer: bool = False

    def __post_init__(self):
        object.__setattr__(self, "content", tuple(int(c) for c in self.content))
        if any(c not in (0, 1, 2) for c in self.content):
            raise DomainError(f"string content must be in {{0,1,2}}, got {self.content}")

    @property
    def big_m(self) -> int:
        return len(self.content)

    def ordinate_energies(self) -> tuple[Fraction, ...]:
        shift = Fraction(1, 2) if self.half_integer else Fraction(0)
        return tuple(Fraction(j) - shift for j in range(1, self.big_m + 1))

    @property
    def energy(self) -> Fraction:
        return sum((n * e for n, e in zip(self.content, self.ordinate_energies())), Fraction(0))

    def __str__(self):
        return "".join(map(str, self.content)) or "-"


def ordinate_count(model: StripModel) -> int:
    return (model.big_n - 1) // 2


def half_integer_energies(model: StripModel) -> bool:
    return (model.n + model.w) % 2 == 1


def kappas(model: StripModel) -> np.ndarray:
    """k_j = sin(E_j pi / N), N the number of bulk columns."""
    e = np.arange(1, ordinate_count(model) + 1) - (0.5 if half_integer_energies(model) else 0.0)
    return np.sin(e * np.pi / model.n)


def candidate_patterns(model: StripModel) -> list[StringPattern]:
    half = half_integer_energies(model)
    return [StringPattern(c, half) for c in itertools.product((0, 1, 2), repeat=ordinate_count(model))]


def candidate_value(pattern: StringPattern, model: StripModel, u):
    t = np.multiply.outer(np.sin(2 * np.asarray(u, float)), kappas(model))
    n = np.array(pattern.content)
    return np.prod((1 + t) ** (2 - n) * (1 - t) ** n, axis=-1)


def oracle_o1(model: StripModel, rng: np.random.Generator, draws: int = 200) -> float:
    """Relative residual of prod_j (1 - k_j^2 sin^2 2u) against the inversion root."""
    u = rng.uniform(0.05, np.pi / 2 - 0.05, draws)
    u = u[np.abs(np.cos(2 * u)) > 1e-3]
    t = np.sin(2 * u)[:, None] * kappas(model)[None, :]
    lhs = np.prod(1 - t**2, axis=1)
    rhs = normalized_inversion_root(model, u)
    return float(np.max(np.abs(lhs - rhs) / np.maximum(1.0, np.abs(rhs))))


def candidate_eigenvalues(model: StripModel, rng: np.random.Generator | None = None,
                          draws: int = 200, tol: float = O1_TOL):
    """(pattern, u -> d_cand(u)) for every content vector, after the O1 check."""
    if model.w and not np.isclose(model.xi, model.lam / 2):
        raise DomainError("closed-form candidates hold at xi = lam/2")
    rng = np.random.default_rng(0) if rng is None else rng
    res = oracle_o1(model, rng, draws)
    if not res <= tol:
        raise OracleFailure(f"O1 residual {res:.3e} exceeds {tol:.1e} for N={model.n}, w={model.w}")
    return [(p, (lambda u, p=p: candidate_value(p, model, u))) for p in candidate_patterns(model)]


def hamiltonian_energy_from_pattern(pattern: StringPattern, model: StripModel) -> float:
    """H eigenvalue -(1/2) d/du log d_cand at 0, i.e. sum_j 2 (n_j - 1) k_j."""
    n = np.array(pattern.content, float)
    return float(np.sum(2 * (n - 1) * kappas(model)))


def grouped_residual(computed: np.ndarray, predicted: np.ndarray) -> float:
    """Distance between two eigenvalue multisets, robust to Jordan-block splitting.

    Computed values are grouped by nearest distinct predicted value; each group must
    have the predicted count, and its mean is compared with the predicted value.
    """
    computed, predicted = np.asarray(computed, complex), np.asarray(predicted, complex)
    if computed.shape != predicted.shape:
        return np.inf
    if computed.size == 0:
        return 0.0
    distinct = []
    for v in np.sort_complex(predicted):
        if not distinct or abs(v - distinct[-1]) > 1e-9:
            distinct.append(v)
    distinct = np.array(distinct)
    want = np.array([np.sum(np.abs(predicted - v) <= 1e-9) for v in distinct])
    nearest = np.argmin(np.abs(computed[:, None] - distinct[None, :]), axis=1)
    worst = 0.0
    for k, v in enumerate(distinct):
        grp = computed[nearest == k]
        if grp.size != want[k]:
            return np.inf
        worst = max(worst, float(abs(grp.mean() - v)))
    return worst


def pattern_energy_residual(model: StripModel, table: "SelectionTable") -> float:
    """Mismatch between the H spectrum on the sector and the pattern-implied energies."""
    h = np.asarray(hamiltonian(model, table.sector))
    predicted = np.concatenate([np.full(mu, hamiltonian_energy_from_pattern(p, model))
                                for p, mu in table.multiplicities.items()])
    return grouped_residual(np.linalg.eigvals(h), predicted)


# ---- selection tables --------------------------------------------------------

@dataclass(frozen=True)
class SelectionTable:
    sector: Sector
    u0: float
    multiplicities: dict[StringPattern, int]
    max_group_error: float = 0.0

    @property
    def total(self) -> int:
        return sum(self.multiplicities.values())

    def energies(self) -> dict[Fraction, int]:
        out: dict[Fraction, int] = {}
        for p, mu in self.multiplicities.items():
            out[p.energy] = out.get(p.energy, 0) + mu
        return out


def _separated_u0(model, u0):
    patterns = candidate_patterns(model)
    for k in range(U0_RETRIES):
        u = u0 + k * U0_STEP
        vals = np.array([candidate_value(p, model, u) for p in patterns])
        gaps = np.diff(np.sort(vals))
        if abs(np.sin(2 * u)) > 1e-3 and (gaps.size == 0 or gaps.min() > SEPARATION):
            return u, patterns, vals
    raise SelectionFailure(f"no u0 with candidates separated by {SEPARATION} after {U0_RETRIES} tries")


def match_spectrum(model: StripModel, sector: Sector, u0: float = U0_DEFAULT,
                   tol_match: float = TOL_MATCH, check_oracle: bool = True) -> SelectionTable:
    """Assign each eigenvalue of d(u0) on the sector to a candidate pattern.

    Each eigenvalue goes to its nearest candidate, which must lie within half the
    smallest candidate gap. The mean of each group must then equal the candidate
    within tol_match * scale; averaging cancels the square-root splitting of
    eigenvalues inside a Jordan block.
    """
    if check_oracle:
        candidate_eigenvalues(model)
    u, patterns, vals = _separated_u0(model, u0)
    order = np.argsort(vals)
    sorted_vals = vals[order]
    half_gap = 0.5 * (np.diff(sorted_vals).min() if len(vals) > 1 else np.inf)
    scale = max(1.0, float(np.abs(vals).max()))
    eig = np.linalg.eigvals(np.asarray(normalized_transfer(model, u, sector)))
    groups: dict[int, list[complex]] = {}
    for ev in eig:
        k = int(np.argmin(np.abs(vals - ev)))
        if abs(ev - vals[k]) > min(half_gap, 1e-4 * scale):
            raise SelectionFailure(f"eigenvalue {ev:.12g} matches no candidate at u0={u}", ev)
        groups.setdefault(k, []).append(ev)
    worst = 0.0
    for k, evs in groups.items():
        err = abs(np.mean(evs) - vals[k])
        worst = max(worst, err)
        if err > tol_match * scale:
            raise SelectionFailure(
                f"eigenvalue group at {np.mean(evs):.12g} misses candidate {vals[k]:.12g} "
                f"by {err:.2e}", complex(np.mean(evs)))
    mult = {patterns[k]: len(evs) for k, evs in sorted(groups.items(), key=lambda kv: patterns[kv[0]])}
    if sum(mult.values()) != sector.dim:
        raise SelectionFailure("matched multiplicities do not add up to the sector size")
    return SelectionTable(sector, float(u), mult, worst)


def sector_for_s(model: StripModel, s: int, sign: int = 1) -> Sector:
    return Sector.from_s(model.big_n, s, model.w, sign)


def character_from_spectrum(model: StripModel, s: int, u0: float = U0_DEFAULT,
                            table: SelectionTable | None = None) -> QSeries:
    """q^{1/12 + Delta_base} sum_patterns mu q^E, Delta_base = 0 (s odd) or -1/8 (s even).

    Equivalently q^{1/12 + Delta_s} q^{E - E_min}: the sector ground state carries
    E_min = Delta_s - Delta_base.
    """
    if table is None:
        table = match_spectrum(model, sector_for_s(model, s), u0)
    body = QSeries(table.energies().items())
    return body.shift(character_prefactor(s))


def predicted_multiplicity(pattern: StringPattern, big_n: int, s: int) -> int:
    """Sum over admissible double-column diagrams with this content of A/B[|L|, |R|]."""
    sel = selection_matrix(big_n, s)
    return sum(sel[d.m][d.n] for d in diagrams_with_content(pattern.content) if d.admissible())


# ---- Jordan censuses ---------------------------------------------------------

@dataclass(frozen=True)
class JordanCluster:
    center: complex
    multiplicity: int
    blocks: dict[int, int]  # block size -> count
    ranks: tuple[int, ...]  # rank of (A - center)^k, k = 0, 1, ...
    exact_ranks: tuple[int, ...] | None = None

    @property
    def largest_block(self) -> int:
        return max(self.blocks) if self.blocks else 0


@dataclass(frozen=True)
class JordanReport:
    dim: int
    clusters: tuple[JordanCluster, ...]
    warnings: tuple[str, ...] = field(default=())

    def count(self, size: int) -> int:
        return sum(c.blocks.get(size, 0) for c in self.clusters)

    @property
    def largest_block(self) -> int:
        return max((c.largest_block for c in self.clusters), default=0)

    @property
    def exact_agrees(self) -> bool | None:
        checked = [c for c in self.clusters if c.exact_ranks is not None]
        if not checked:
            return None
        return all(c.exact_ranks == c.ranks[:len(c.exact_ranks)] for c in checked)


def cluster_eigenvalues(vals: np.ndarray, tol: float) -> list[np.ndarray]:
    """Single-linkage groups of eigenvalues closer than tol."""
    vals = np.asarray(vals)
    order = np.argsort(vals.real)
    parent = list(range(len(vals)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a in range(len(order)):
        for b in range(a + 1, len(order)):
            i, j = order[a], order[b]
            if vals[j].real - vals[i].real > tol:
                break
            if abs(vals[i] - vals[j]) <= tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(len(vals)):
        groups.setdefault(find(i), []).append(i)
    return sorted((vals[g] for g in groups.values()), key=lambda g: (g.mean().real, g.mean().imag))


def numerical_rank(m: np.ndarray, rel: float = RANK_THRESHOLD, ref: float | None = None) -> int:
    """Count singular values above rel * ref * dim (ref defaults to the largest one)."""
    if m.size == 0:
        return 0
    sv = np.linalg.svd(m, compute_uv=False)
    ref = sv[0] if ref is None else ref
    return int(np.sum(sv > rel * ref * m.shape[0]))


def _gaussian_integer(m: np.ndarray) -> bool:
    return bool(np.abs(m - np.round(m.real) - 1j * np.round(m.imag)).max() < 1e-12)


def exact_power_ranks(m: np.ndarray, kmax: int) -> tuple[int, ...]:
    """Ranks of m^0..m^kmax over the Gaussian rationals (m must have Gaussian-integer entries)."""
    from sympy import I, Integer
    from sympy.polys.domains import QQ_I
    from sympy.polys.matrices import DomainMatrix

    rows = [[Integer(int(round(z.real))) + I * Integer(int(round(z.imag))) for z in row] for row in m]
    a = DomainMatrix.from_list_sympy(m.shape[0], m.shape[1], rows).convert_to(QQ_I)
    ranks = [m.shape[0]]
    p = a
    for k in range(1, kmax + 1):
        if k > 1:
            p = p * a
        ranks.append(p.rank())
    return tuple(ranks)


def jordan_structure(op: ComplexOperator | np.ndarray, tol_cluster: float = TOL_CLUSTER,
                     rank_threshold: float = RANK_THRESHOLD, exact: bool = True) -> JordanReport:
    """Block census from rank drops of (A - c)^k around each eigenvalue cluster c.

    The number of blocks of size >= k is rank((A-c)^{k-1}) - rank((A-c)^k).
    Clusters at 0 of Gaussian-integer matrices are cross-checked with exact ranks.
    """
    a = np.asarray(op, dtype=complex)
    dim = a.shape[0]
    if dim > MAX_JORDAN_DIM:
        raise DomainError(f"dimension {dim} exceeds {MAX_JORDAN_DIM}")
    if dim == 0:
        return JordanReport(0, ())
    vals = np.linalg.eigvals(a)
    radius = max(float(np.abs(vals).max()), 1.0)
    tol = tol_cluster * radius
    groups = cluster_eigenvalues(vals, tol)
    centers = np.array([g.mean() for g in groups])
    notes = []
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            if abs(centers[i] - centers[j]) < 10 * tol:
                notes.append(f"clusters at {centers[i]:.6g} and {centers[j]:.6g} closer than 10*tol_cluster")
    clusters = []
    integral = exact and _gaussian_integer(a)
    for g, c in zip(groups, centers):
        mult = len(g)
        if abs(c) < tol and integral:
            c = 0.0
        b = a - c * np.eye(dim)
        ranks = [dim]
        p = np.eye(dim, dtype=complex)
        # the threshold for (A-c)^k scales with sigma_max(A-c)^k, so a power that is
        # numerically zero is not mistaken for a full-rank matrix of rounding noise
        smax = float(np.linalg.norm(b, 2))
        while dim - ranks[-1] < mult and len(ranks) <= mult + 1:
            p = p @ b
            ranks.append(numerical_rank(p, rank_threshold, smax ** (len(ranks))))
        if dim - ranks[-1] != mult:
            notes.append(f"cluster at {c:.6g}: kernel dimension {dim - ranks[-1]} != multiplicity {mult}")
        at_least = [ranks[k - 1] - ranks[k] for k in range(1, len(ranks))] + [0]
        blocks = {k: at_least[k - 1] - at_least[k] for k in range(1, len(ranks))
                  if at_least[k - 1] - at_least[k]}
        exact_ranks = None
        if integral and c == 0.0:
            exact_ranks = exact_power_ranks(a, len(ranks) - 1)
        clusters.append(JordanCluster(complex(c), mult, blocks, tuple(ranks), exact_ranks))
    report = JordanReport(dim, tuple(clusters), tuple(notes))
    for n in notes:
        warnings.warn(n, RuntimeWarning, stacklevel=2)
    return report
