"""Dense statevector reference for small systems.

Qubit 0 is the most significant bit of a basis index, so an amplitude vector
reshaped to ``(2,) * n`` has qubit ``q`` on axis ``q``.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from . import gf2
from .bipartite import Bipartition
from .group import StabilizerGroup, kernel_rows
from .pauli import PauliOperator, QubitSet

MAX_STATE_QUBITS = 14
MAX_OPERATOR_QUBITS = 12
MAX_SAMPLER_QUBITS = 6


class OracleSizeError(ValueError):
    """Request exceeds the dense oracle's size caps."""


def _cap(n: int, limit: int, what: str) -> None:
    if n > limit:
        raise OracleSizeError(f"{what} limited to {limit} qubits, got {n}")


def _big_endian(mask: int, n: int) -> int:
    out = 0
    for q in range(n):
        if (mask >> q) & 1:
            out |= 1 << (n - 1 - q)
    return out


def apply_pauli(p: PauliOperator, vec: np.ndarray) -> np.ndarray:
    """``p @ vec`` for a vector, or for every column of a ``(2**n, k)`` array."""
    n = p.n
    idx = np.arange(1 << n)
    xm = _big_endian(p.x, n)
    zm = _big_endian(p.z, n)
    sign = 1 - 2 * (np.bitwise_count(idx & zm) & 1).astype(np.int8)
    coeff = 1j ** p.phase
    out = np.empty_like(vec, dtype=complex)
    if vec.ndim == 1:
        out[idx ^ xm] = coeff * sign * vec
    else:
        out[idx ^ xm] = coeff * sign[:, None] * vec
    return out


def pauli_matrix(p: PauliOperator) -> np.ndarray:
    _cap(p.n, MAX_OPERATOR_QUBITS, "operator matrices")
    return apply_pauli(p, np.eye(1 << p.n, dtype=complex))


def expectation(p: PauliOperator, vec: np.ndarray) -> complex:
    return complex(np.vdot(vec, apply_pauli(p, vec)))


def _gauge(vec: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(vec) > 1e-12)
    if nz.size:
        first = vec[nz[0]]
        vec = vec * (abs(first) / first)
    return vec


def support_basis_index(S: StabilizerGroup) -> int:
    """A computational basis state with nonzero overlap with the stabilized state."""
    even = S._even
    zonly, _ = kernel_rows(S._rows, even, even)
    rows, rhs = [], []
    for key, phase in zonly:
        _, z = gf2.deinterleave(key, S.n)
        rows.append(z)
        rhs.append(1 if phase % 4 == 2 else 0)
    b = gf2.solve(rows, rhs, S.n)
    if b is None:
        raise AssertionError("Z-type stabilizers are inconsistent; invalid group")
    return _big_endian(b, S.n)


def statevector(S: StabilizerGroup) -> np.ndarray:
    """The unit vector stabilized by a maximal group (first nonzero amplitude real > 0)."""
    _cap(S.n, MAX_STATE_QUBITS, "statevectors")
    if not S.is_maximal:
        raise ValueError("statevector needs a maximal group")
    vec = np.zeros(1 << S.n, dtype=complex)
    vec[support_basis_index(S)] = 1.0
    for g in S.generators:
        vec = 0.5 * (vec + apply_pauli(g, vec))
    norm = np.linalg.norm(vec)
    if norm < 1e-9:
        raise AssertionError("projector annihilated a support basis state")
    return _gauge(vec / norm)


def _matrix_for(vec: np.ndarray, a: Sequence[int], b: Sequence[int]) -> np.ndarray:
    n = int(np.log2(vec.shape[-1]))
    lead = vec.shape[:-1]
    t = vec.reshape(lead + (2,) * n)
    off = len(lead)
    t = np.transpose(t, tuple(range(off)) + tuple(off + q for q in list(a) + list(b)))
    return t.reshape(lead + (1 << len(a), 1 << len(b)))


def _entropy_from_singular(s: np.ndarray) -> np.ndarray:
    p = s**2
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 1e-15, -p * np.log2(np.where(p > 1e-15, p, 1.0)), 0.0)
    return terms.sum(axis=-1)


def schmidt_entropy(vec: np.ndarray, part: Bipartition) -> float:
    """Entanglement entropy in ebits across ``part``."""
    norm = np.linalg.norm(vec)
    if abs(norm - 1) > 1e-9:
        raise ValueError(f"state is not normalized (norm {norm})")
    m = _matrix_for(vec, part.a.indices, part.b.indices)
    s = np.linalg.svd(m, compute_uv=False)
    return float(_entropy_from_singular(s))


def reduced_density_matrix(vec: np.ndarray, kept: Sequence[int]) -> np.ndarray:
    n = int(np.log2(vec.shape[0]))
    traced = [q for q in range(n) if q not in set(kept)]
    m = _matrix_for(vec, list(kept), traced)
    return m @ m.conj().T


def code_projector_matrix(H: StabilizerGroup) -> np.ndarray:
    """``2**-n * sum_{g in H} g`` as a dense matrix (trace one)."""
    _cap(H.n, MAX_OPERATOR_QUBITS, "code projectors")
    dim = 1 << H.n
    rho = np.eye(dim, dtype=complex) * 2.0 ** (H.rank - H.n)
    for g in H.generators:
        rho = 0.5 * (rho + apply_pauli(g, rho))
    return rho


def witness_decomposition(H: StabilizerGroup, witness: StabilizerGroup):
    """Equal-weight pure states obtained by flipping signs of the generators
    that ``witness`` adds on top of ``H`` (its first ``H.rank`` generators)."""
    _cap(witness.n, MAX_STATE_QUBITS, "witness decompositions")
    base = list(witness.generators[: H.rank])
    extra = list(witness.generators[H.rank :])
    weight = 2.0 ** -len(extra)
    out = []
    for signs in range(1 << len(extra)):
        gens = base + [(-g if (signs >> i) & 1 else g) for i, g in enumerate(extra)]
        G = StabilizerGroup(witness.n, gens, _trusted=True)
        out.append((weight, statevector(G)))
    return out


def mixture_matrix(ensemble) -> np.ndarray:
    return sum(w * np.outer(v, v.conj()) for w, v in ensemble)


def average_entropy(ensemble, part: Bipartition) -> float:
    return float(sum(w * schmidt_entropy(v, part) for w, v in ensemble))


def _haar_isometry(rng: np.random.Generator, count: int, rows: int, cols: int) -> np.ndarray:
    """``count`` independent Haar-random ``rows x cols`` isometries."""
    shape = (count, rows, cols)
    z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[:, None, :]


def decomposition_entropy_sampler(
    H: StabilizerGroup, part: Bipartition, trials: int, seed: int
) -> float:
    """Smallest average entanglement over sampled pure-state decompositions of the code projector.

    Decompositions of ``rho = sum_i l_i |e_i><e_i|`` are exactly
    ``|psi_j> = sum_i V_ji sqrt(l_i) |e_i>`` for isometries ``V``; trial 0 is
    the spectral decomposition itself, later trials draw Haar isometries into
    ``r`` or ``2r`` outcomes.
    """
    _cap(H.n, MAX_SAMPLER_QUBITS, "decomposition sampling")
    if trials < 1:
        raise ValueError("need at least one trial")
    rho = code_projector_matrix(H)
    evals, evecs = np.linalg.eigh(rho)
    keep = evals > 1e-12
    lam, vecs = evals[keep], evecs[:, keep]
    r = lam.size
    base = (vecs * np.sqrt(lam)).T  # (r, 2**n) rows sqrt(l_i) e_i
    rng = np.random.default_rng(seed)
    # trial 0 is the spectral decomposition; the rest alternate r and 2r outcomes
    square, tall = trials // 2, max(trials - 1, 0) // 2
    blocks = [np.eye(r, dtype=complex)[None], _haar_isometry(rng, square, r, r), _haar_isometry(rng, tall, 2 * r, r)]
    sizes = [r] + [r] * square + [2 * r] * tall
    blocks = [b.reshape(-1, r) for b in blocks]
    states = np.concatenate(blocks) @ base
    probs = np.sum(np.abs(states) ** 2, axis=1)
    live = probs > 1e-14
    normed = states[live] / np.sqrt(probs[live])[:, None]
    mats = _matrix_for(normed, part.a.indices, part.b.indices)
    ent = np.zeros(states.shape[0])
    ent[live] = _entropy_from_singular(np.linalg.svd(mats, compute_uv=False))
    per_trial = np.add.reduceat(probs * ent, np.cumsum([0] + sizes[:-1]))
    return float(per_trial.min())


def branch_states(vec: np.ndarray, ops: Sequence[PauliOperator], traced: QubitSet):
    """Split ``vec`` over the joint eigenspaces of commuting ``ops``.

    Returns ``(probability, kept_state)`` for every outcome string of nonzero
    probability; ``kept_state`` lives on the non-traced qubits in ascending
    order. The ops must form a complete set on ``traced`` so that every branch
    is a product with the traced register.
    """
    n = int(np.log2(vec.shape[0]))
    branches = vec[None, :]
    for op in ops:
        moved = apply_pauli(op, branches.T).T
        both = np.concatenate([(branches + moved) / 2, (branches - moved) / 2])
        weight = np.sum(np.abs(both) ** 2, axis=1)
        branches = both[weight > 1e-12]
    kept = [q for q in range(n) if q not in traced]
    out = []
    for b in branches:
        prob = float(np.vdot(b, b).real)
        m = _matrix_for(b, kept, list(traced))
        u, s, _ = np.linalg.svd(m)
        if s.size > 1 and s[1] > 1e-8:
            raise AssertionError("branch state is entangled with the traced register")
        out.append((prob, _gauge(u[:, 0])))
    return out
