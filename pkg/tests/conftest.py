import itertools

import numpy as np
import pytest
from hypothesis import settings, strategies as st

from stabsplit import Bipartition, FourWayPartition, PauliOperator, StabilizerGroup
from stabsplit.codec import parse_pauli

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
_COEFF = {"+": 1, "-": -1, "+i": 1j, "-i": -1j}


def kron_matrix(label: str) -> np.ndarray:
    """Matrix of a Pauli label built letter by letter (qubit 0 leftmost factor)."""
    for prefix in ("+i", "-i", "+", "-"):
        if label.startswith(prefix):
            coeff, letters = _COEFF[prefix], label[len(prefix):]
            break
    else:
        coeff, letters = 1, label
    m = np.array([[1]], dtype=complex)
    for ch in letters:
        m = np.kron(m, _MATS[ch])
    return coeff * m


def P(label: str) -> PauliOperator:
    return parse_pauli(label)


def G(*labels: str, **kw) -> StabilizerGroup:
    return StabilizerGroup.from_labels(labels, **kw)


def bip(n, a):
    return Bipartition(n, a)


def random_bipartition(n, rng):
    return Bipartition(n, [q for q in range(n) if rng.random() < 0.5])


def random_fourway(n, rng):
    order = list(rng.permutation(n))
    blocks = [[], [], [], []]
    for i, q in enumerate(order):
        blocks[i if i < 4 else int(rng.integers(0, 4))].append(int(q))
    return FourWayPartition(n, *blocks)


def all_labels(n):
    return ["".join(t) for t in itertools.product("IXYZ", repeat=n)]


@st.composite
def paulis(draw, n=None, hermitian=False):
    if n is None:
        n = draw(st.integers(1, 70))
    x = draw(st.integers(0, (1 << n) - 1))
    z = draw(st.integers(0, (1 << n) - 1))
    if hermitian:
        sign = draw(st.sampled_from([0, 2]))
        return PauliOperator(n, x, z, (x & z).bit_count() + sign)
    return PauliOperator(n, x, z, draw(st.integers(0, 3)))


@st.composite
def pauli_tuples(draw, k, hermitian=False, max_n=70):
    n = draw(st.integers(1, max_n))
    return tuple(draw(paulis(n=n, hermitian=hermitian)) for _ in range(k))


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


ACCEPTANCE_LINES: list[str] = []


def acceptance_line(number: int, ok: bool, detail: str) -> str:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
