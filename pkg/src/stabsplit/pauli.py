"""n-qubit Pauli operators in the binary symplectic representation.

An operator is stored as ``i**phase * prod_q X_q**x_q Z_q**z_q`` with the X
factor to the left of the Z factor on every qubit. ``Y`` is therefore
``x = z = 1`` with one extra unit of phase (``Y = i X Z``).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

from . import gf2


class DimensionError(ValueError):
    """Operands live on different numbers of qubits."""


@dataclass(frozen=True)
class QubitSet:
    """Sorted, duplicate-free tuple of qubit indices."""

    indices: tuple[int, ...] = ()

    def __post_init__(self):
        idx = tuple(self.indices)
        if len(set(idx)) != len(idx):
            raise ValueError(f"duplicate qubit indices in {idx}")
        if any(q < 0 for q in idx):
            raise ValueError(f"negative qubit index in {idx}")
        object.__setattr__(self, "indices", tuple(sorted(idx)))

    @classmethod
    def of(cls, qubits: "Iterable[int] | QubitSet") -> "QubitSet":
        if isinstance(qubits, QubitSet):
            return qubits
        return cls(tuple(int(q) for q in qubits))

    def check(self, n: int) -> "QubitSet":
        if self.indices and self.indices[-1] >= n:
            raise IndexError(f"qubit {self.indices[-1]} out of range for {n} qubits")
        return self

    @cached_property
    def mask(self) -> int:
        return gf2.qubit_mask(self.indices)

    @cached_property
    def key_mask(self) -> int:
        return gf2.key_mask(self.indices)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, q: object) -> bool:
        return q in self.indices

    def __or__(self, other: "QubitSet") -> "QubitSet":
        return QubitSet(tuple(sorted(set(self.indices) | set(other.indices))))

    def __and__(self, other: "QubitSet") -> "QubitSet":
        return QubitSet(tuple(q for q in self.indices if q in other))


@dataclass(frozen=True)
class PauliOperator:
    n: int
    x: int
    z: int
    phase: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("negative qubit count")
        limit = 1 << self.n
        if not (0 <= self.x < limit and 0 <= self.z < limit):
            raise ValueError(f"bit arrays do not fit in {self.n} qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(n, 0, 0, 0)

    @classmethod
    def single(cls, n: int, qubit: int, kind: str, sign: int = 1) -> "PauliOperator":
        """Hermitian single-qubit operator ``sign * kind_qubit``."""
        if not 0 <= qubit < n:
            raise IndexError(f"qubit {qubit} out of range for {n} qubits")
        bit = 1 << qubit
        x = bit if kind in "XY" else 0
        z = bit if kind in "ZY" else 0
        phase = (1 if kind == "Y" else 0) + (0 if sign > 0 else 2)
        return cls(n, x, z, phase)

    @classmethod
    def from_key(cls, n: int, key: int, phase: int = 0) -> "PauliOperator":
        x, z = gf2.deinterleave(key, n)
        op = cls(n, x, z, phase)
        op.__dict__["key"] = key
        return op

    @cached_property
    def key(self) -> int:
        return gf2.interleave(self.x, self.z, self.n)

    @property
    def x_bits(self) -> list[int]:
        return [(self.x >> q) & 1 for q in range(self.n)]

    @property
    def z_bits(self) -> list[int]:
        return [(self.z >> q) & 1 for q in range(self.n)]

    @property
    def y_count(self) -> int:
        return (self.x & self.z).bit_count()

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    @property
    def support(self) -> QubitSet:
        m = self.x | self.z
        return QubitSet(tuple(q for q in range(self.n) if (m >> q) & 1))

    @property
    def coefficient(self) -> int:
        """Power of ``i`` in front of the tensor product of I/X/Y/Z letters."""
        return (self.phase - self.y_count) % 4

    def is_hermitian(self) -> bool:
        return self.coefficient in (0, 2)

    @property
    def sign(self) -> int:
        """+1 or -1 for Hermitian operators."""
        if not self.is_hermitian():
            raise ValueError("operator is not Hermitian")
        return 1 if self.coefficient == 0 else -1

    def with_sign(self, sign: int = 1) -> "PauliOperator":
        """Same Pauli letters, Hermitian with the requested sign."""
        phase = self.y_count + (0 if sign > 0 else 2)
        return PauliOperator(self.n, self.x, self.z, phase)

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        return multiply(self, other)

    def __neg__(self) -> "PauliOperator":
        return PauliOperator(self.n, self.x, self.z, self.phase + 2)

    def __str__(self) -> str:
        from .codec import format_pauli

        return format_pauli(self)

    def __repr__(self) -> str:
        return f"PauliOperator({self})"


def _check_same(p: PauliOperator, q: PauliOperator) -> None:
    if p.n != q.n:
        raise DimensionError(f"{p.n}-qubit operator combined with {q.n}-qubit operator")


def symplectic_product(p: PauliOperator, q: PauliOperator) -> int:
    """0 if ``p`` and ``q`` commute, 1 if they anticommute."""
    _check_same(p, q)
    return ((p.x & q.z) ^ (p.z & q.x)).bit_count() & 1


def commutes(p: PauliOperator, q: PauliOperator) -> bool:
    return symplectic_product(p, q) == 0


def multiply(p: PauliOperator, q: PauliOperator) -> PauliOperator:
    """Exact product ``p q``.

    Moving ``Z^{z_p}`` past ``X^{x_q}`` on each qubit costs a factor -1, so
    the phase grows by ``2 * |z_p & x_q|``.
    """
    _check_same(p, q)
    phase = p.phase + q.phase + 2 * (p.z & q.x).bit_count()
    return PauliOperator(p.n, p.x ^ q.x, p.z ^ q.z, phase)


def _gather(value: int, indices: Iterable[int]) -> int:
    out = 0
    for i, q in enumerate(indices):
        out |= ((value >> q) & 1) << i
    return out


def _scatter(value: int, indices: Iterable[int]) -> int:
    out = 0
    for i, q in enumerate(indices):
        out |= ((value >> i) & 1) << q
    return out


def restrict(p: PauliOperator, qubits: "Iterable[int] | QubitSet") -> PauliOperator:
    """Tensor factors of ``p`` on ``qubits`` as a ``len(qubits)``-qubit operator.

    The result is the Hermitian positive-sign operator with those letters;
    restrictions are only ever meaningful up to phase.
    """
    qs = QubitSet.of(qubits).check(p.n)
    x = _gather(p.x, qs)
    z = _gather(p.z, qs)
    return PauliOperator(len(qs), x, z, (x & z).bit_count())


def embed(p: PauliOperator, qubits: "Iterable[int] | QubitSet", n: int) -> PauliOperator:
    """Inverse of :func:`restrict`: place ``p`` on ``qubits`` of an n-qubit register."""
    qs = QubitSet.of(qubits).check(n)
    if len(qs) != p.n:
        raise DimensionError(f"{p.n}-qubit operator placed on {len(qs)} qubits")
    return PauliOperator(n, _scatter(p.x, qs), _scatter(p.z, qs), p.phase)


def acts_trivially_on(p: PauliOperator, qubits: "Iterable[int] | QubitSet") -> bool:
    qs = QubitSet.of(qubits).check(p.n)
    return ((p.x | p.z) & qs.mask) == 0
