"""Occupation basis of the strip, particle-number sectors, and a small operator container.

Basis convention: a state on 𝒩 sites is the integer sum_j a_j 2^(j-1), so site 1 is
the least significant bit. Sector bases list states in increasing integer order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Sequence

import numpy as np

MAX_SITES = 14
DENSE_MAX_SITES = 10
TAU_OFFBLOCK = 1e-10


class DomainError(ValueError):
    """Raised when a parameter falls outside the supported range."""


class NotBlockDiagonalError(ValueError):
    """Raised when an operator leaks between particle-number sectors."""


def _check_sites(big_n: int, limit: int = MAX_SITES) -> None:
    if not (0 <= big_n <= limit):
        raise DomainError(f"number of sites {big_n} outside 0..{limit}")


@dataclass(frozen=True)
class OccupationState:
    bits: tuple[int, ...]  # (a_1, ..., a_N)

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.bits):
            raise DomainError(f"occupations must be 0 or 1, got {self.bits}")

    @property
    def big_n(self) -> int:
        return len(self.bits)

    @property
    def d(self) -> int:
        return sum(self.bits)

    @property
    def spins(self) -> tuple[int, ...]:
        # a_j = (1 - sigma_j)/2
        return tuple(1 - 2 * b for b in self.bits)

    @property
    def index(self) -> int:
        return sum(b << j for j, b in enumerate(self.bits))

    @classmethod
    def from_index(cls, index: int, big_n: int) -> "OccupationState":
        if not 0 <= index < 2**big_n:
            raise DomainError(f"index {index} out of range for {big_n} sites")
        return cls(tuple((index >> j) & 1 for j in range(big_n)))

    def __str__(self) -> str:
        # most significant site first, so string order equals integer order
        return "".join(str(b) for b in reversed(self.bits))


@dataclass(frozen=True)
class Sector:
    big_n: int
    d: int
    w: int = 0

    def __post_init__(self):
        _check_sites(self.big_n)
        if self.w not in (0, 1):
            raise DomainError("w must be 0 or 1")
        if not 0 <= self.d <= self.big_n:
            raise DomainError(f"particle number {self.d} outside 0..{self.big_n}")

    @classmethod
    def from_s(cls, big_n: int, s: int, w: int = 0, sign: int = 1) -> "Sector":
        """Sector with |S_z| = s - 1; sign=+1 picks S_z >= 0 (fewer particles)."""
        ell = s - 1
        if ell < 0 or ell > big_n or (big_n - ell) % 2:
            raise DomainError(f"s={s} is not admissible for {big_n} sites")
        s_z = ell if sign >= 0 else -ell
        return cls(big_n, (big_n - s_z) // 2, w)

    @property
    def n(self) -> int:
        return self.big_n - self.w

    @property
    def s_z(self) -> int:
        return self.big_n - 2 * self.d

    @property
    def ell(self) -> int:
        return abs(self.s_z)

    @property
    def s(self) -> int:
        return self.ell + 1

    @property
    def dim(self) -> int:
        return comb(self.big_n, self.d)

    def indices(self) -> np.ndarray:
        return sector_indices(self.big_n, self.d)


def sector_indices(big_n: int, d: int) -> np.ndarray:
    """Integer labels of all states with d particles, ascending."""
    _check_sites(big_n)
    if not 0 <= d <= big_n:
        raise DomainError(f"particle number {d} outside 0..{big_n}")
    # bit_count exists from 3.10 on ints; vectorised popcount via a uint8 view
    all_states = np.arange(2**big_n, dtype=np.int64)
    return all_states[popcount(all_states) == d]


def popcount(states: np.ndarray) -> np.ndarray:
    states = np.asarray(states, dtype=np.int64)
    as_bytes = states.astype("<u8").view(np.uint8).reshape(-1, 8)
    return np.unpackbits(as_bytes, axis=1).sum(axis=1).reshape(states.shape)


def occupation_bits(states: np.ndarray, big_n: int) -> np.ndarray:
    """(len(states), big_n) array with column j-1 holding a_j."""
    states = np.asarray(states, dtype=np.int64)
    return (states[:, None] >> np.arange(big_n)) & 1


def enumerate_sector(big_n: int, d: int) -> list[OccupationState]:
    return [OccupationState.from_index(int(i), big_n) for i in sector_indices(big_n, d)]


@dataclass(frozen=True)
class ComplexOperator:
    """Dense complex matrix on the full space or on a single sector."""

    entries: np.ndarray
    big_n: int
    sector: Sector | None = None
    leakage: float = field(default=0.0, compare=False)

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError(f"operator must be square, got shape {m.shape}")
        expected = self.sector.dim if self.sector is not None else 2**self.big_n
        if m.shape[0] != expected:
            raise DomainError(f"dimension {m.shape[0]} does not match basis size {expected}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def _wrap(self, m) -> "ComplexOperator":
        return ComplexOperator(m, self.big_n, self.sector)

    def _other(self, other):
        if isinstance(other, ComplexOperator):
            if other.sector != self.sector or other.big_n != self.big_n:
                raise DomainError("operators live on different bases")
            return other.entries
        return other

    def __matmul__(self, other):
        return self._wrap(self.entries @ self._other(other))

    def __add__(self, other):
        return self._wrap(self.entries + self._other(other))

    def __sub__(self, other):
        return self._wrap(self.entries - self._other(other))

    def __mul__(self, scalar):
        return self._wrap(self.entries * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self._wrap(self.entries / scalar)

    def __neg__(self):
        return self._wrap(-self.entries)

    def max_abs(self) -> float:
        return float(np.abs(self.entries).max()) if self.dim else 0.0


def identity(big_n: int, sector: Sector | None = None) -> ComplexOperator:
    dim = sector.dim if sector is not None else 2**big_n
    return ComplexOperator(np.eye(dim), big_n, sector)


def project_to_sector(op: ComplexOperator | np.ndarray, sec: Sector,
                      tol: float = TAU_OFFBLOCK) -> ComplexOperator:
    """Extract the d-block, refusing if the operator mixes particle numbers."""
    m = np.asarray(op, dtype=complex)
    if m.shape != (2**sec.big_n, 2**sec.big_n):
        raise DomainError("project_to_sector needs a full-space operator")
    idx = sec.indices()
    inside = np.zeros(m.shape[0], bool)
    inside[idx] = True
    off = np.concatenate([np.abs(m[np.ix_(inside, ~inside)]).ravel(),
                          np.abs(m[np.ix_(~inside, inside)]).ravel()])
    leak = float(off.max()) if off.size else 0.0
    if leak > tol:
        rows, cols = np.nonzero(np.abs(m) == leak)
        worst = next((r, c) for r, c in zip(rows, cols) if inside[r] != inside[c])
        raise NotBlockDiagonalError(
            f"not block-diagonal: |op[{worst[0]},{worst[1]}]| = {leak:.3e} > {tol:.1e}")
    return ComplexOperator(m[np.ix_(idx, idx)], sec.big_n, sec, leakage=leak)


def sector_leakage(op: ComplexOperator | np.ndarray) -> float:
    """Largest matrix element between states of different particle number."""
    m = np.asarray(op)
    big_n = int(round(np.log2(m.shape[0])))
    pc = popcount(np.arange(m.shape[0]))
    mask = pc[:, None] != pc[None, :]
    return float(np.abs(m[mask]).max()) if mask.any() else 0.0


def embed_sector(op: ComplexOperator) -> ComplexOperator:
    """Inverse of project_to_sector: zero outside the block."""
    if op.sector is None:
        raise DomainError("operator is already on the full space")
    full = np.zeros((2**op.big_n, 2**op.big_n), complex)
    idx = op.sector.indices()
    full[np.ix_(idx, idx)] = op.entries
    return ComplexOperator(full, op.big_n)


def sectors(big_n: int, w: int = 0) -> list[Sector]:
    return [Sector(big_n, d, w) for d in range(big_n + 1)]
