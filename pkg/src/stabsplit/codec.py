"""Text formats: Pauli labels, ``.stab`` generator files, partition specs.

Pauli label: optional coefficient prefix (``+``, ``-``, ``+i``, ``-i``)
followed by one letter from ``IXYZ`` per qubit, qubit 0 first.

Stab file::

    n 3
    # GHZ state
    +XXX
    +ZZI
    +IZZ

Partition spec: ``A=0,1;B=2,3`` or ``A1=0;A2=1;B1=2;B2=3``. Every qubit
must appear exactly once; a block may be empty (``B=``).
"""

from __future__ import annotations

import re
from typing import Iterable

from .pauli import PauliOperator

_PREFIXES = {"+": 0, "-": 2, "+i": 1, "-i": 3, "i": 1, "": 0}
_COEFF_TEXT = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_LABEL = re.compile(r"^([+-]?i?)([IXYZ]*)$")


class ParseError(ValueError):
    """Malformed text input; ``lineno`` is 1-based when known."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


def format_pauli(p: PauliOperator) -> str:
    letters = []
    for q in range(p.n):
        xb = (p.x >> q) & 1
        zb = (p.z >> q) & 1
        letters.append("IXZY"[xb | (zb << 1)])
    return _COEFF_TEXT[p.coefficient] + "".join(letters)


def parse_pauli(text: str) -> PauliOperator:
    m = _LABEL.match(text.strip())
    if m is None:
        raise ParseError(f"not a Pauli label: {text!r}")
    prefix, letters = m.groups()
    x = z = 0
    for q, ch in enumerate(letters):
        if ch in "XY":
            x |= 1 << q
        if ch in "ZY":
            z |= 1 << q
    phase = _PREFIXES[prefix] + (x & z).bit_count()
    return PauliOperator(len(letters), x, z, phase)


def parse_stab_text(text: str):
    """Parse stab-file text into a :class:`~stabsplit.group.StabilizerGroup`."""
    from .group import InvalidGroupError, StabilizerGroup

    n = None
    gens: list[PauliOperator] = []
    lines: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if n is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "n" or not parts[1].isdigit():
                raise ParseError("expected header 'n <qubits>'", lineno)
            n = int(parts[1])
            if n < 1:
                raise ParseError("qubit count must be positive", lineno)
            continue
        if line[0] not in "+-":
            raise ParseError(f"generator must start with '+' or '-': {line!r}", lineno)
        body = line[1:]
        bad = set(body) - set("IXYZ")
        if bad:
            raise ParseError(f"bad symbol(s) {''.join(sorted(bad))!r}", lineno)
        if len(body) != n:
            raise ParseError(f"expected {n} symbols, found {len(body)}", lineno)
        gens.append(parse_pauli(line))
        lines.append(lineno)
    if n is None:
        raise ParseError("missing header 'n <qubits>'")
    for i, g in enumerate(gens):
        for j in range(i):
            if gf2_anticommute(g, gens[j]):
                raise ParseError(
                    f"generator anticommutes with line {lines[j]}", lines[i]
                )
    try:
        return StabilizerGroup(n, gens)
    except InvalidGroupError as exc:
        lineno = lines[exc.index] if exc.index is not None else None
        raise ParseError(str(exc), lineno) from exc


def gf2_anticommute(p: PauliOperator, q: PauliOperator) -> bool:
    return bool(((p.x & q.z) ^ (p.z & q.x)).bit_count() & 1)


def read_stab_file(path) -> "StabilizerGroup":  # noqa: F821
    with open(path, encoding="utf-8") as fh:
        return parse_stab_text(fh.read())


def format_stab(group, comment: str | None = None) -> str:
    out = [f"n {group.n}"]
    if comment:
        out.extend(f"# {line}" for line in comment.splitlines())
    for g in group.generators:
        if not g.is_hermitian():
            raise ValueError(f"generator {format_pauli(g)} is not Hermitian")
        out.append(format_pauli(g))
    return "\n".join(out) + "\n"


def _indices(block: str, name: str) -> list[int]:
    block = block.strip()
    if not block:
        return []
    out = []
    for tok in block.split(","):
        tok = tok.strip()
        if not tok.isdigit():
            raise ParseError(f"bad qubit index {tok!r} in block {name}")
        out.append(int(tok))
    return out


def _blocks(text: str) -> dict[str, list[int]]:
    blocks: dict[str, list[int]] = {}
    for part in text.strip().split(";"):
        if not part.strip():
            continue
        if "=" not in part:
            raise ParseError(f"expected NAME=indices, got {part!r}")
        name, _, body = part.partition("=")
        name = name.strip().upper()
        if name in blocks:
            raise ParseError(f"block {name} given twice")
        blocks[name] = _indices(body, name)
    return blocks


def _check_cover(blocks: dict[str, list[int]], n: int) -> None:
    seen: dict[int, str] = {}
    for name, qs in blocks.items():
        for q in qs:
            if q >= n:
                raise ParseError(f"qubit {q} out of range for {n} qubits")
            if q in seen:
                raise ParseError(f"qubit {q} appears in both {seen[q]} and {name}")
            seen[q] = name
    missing = sorted(set(range(n)) - set(seen))
    if missing:
        raise ParseError(f"qubits {missing} not assigned to any block")


def parse_partition(text: str, n: int):
    """``A=...;B=...`` into a :class:`~stabsplit.bipartite.Bipartition`.

    ``B`` may be omitted, in which case it is the complement of ``A``.
    """
    from .bipartite import Bipartition

    blocks = _blocks(text)
    if set(blocks) - {"A", "B"} or "A" not in blocks:
        raise ParseError(f"expected blocks A and B, got {sorted(blocks)}")
    if "B" not in blocks:
        blocks["B"] = [q for q in range(n) if q not in blocks["A"]]
    _check_cover(blocks, n)
    return Bipartition(n, blocks["A"], blocks["B"])


def parse_fourway(text: str, n: int):
    from .superadditivity import FourWayPartition

    blocks = _blocks(text)
    names = {"A1", "A2", "B1", "B2"}
    if set(blocks) != names:
        raise ParseError(f"expected blocks {sorted(names)}, got {sorted(blocks)}")
    _check_cover(blocks, n)
    return FourWayPartition(n, blocks["A1"], blocks["A2"], blocks["B1"], blocks["B2"])


def format_partition(blocks: dict[str, Iterable[int]]) -> str:
    return ";".join(f"{k}={','.join(str(q) for q in v)}" for k, v in blocks.items())
