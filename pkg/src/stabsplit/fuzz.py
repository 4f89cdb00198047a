"""Randomized driver: random states and four-way partitions through ``verify_ssa``,
with dense-oracle cross-checks on small systems."""

from __future__ import annotations

import hashlib
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .bipartite import Bipartition, entanglement_rank
from .codec import format_stab
from .group import StabilizerGroup, random_stabilizer
from .measurement import reduce_to_kept, measure_rows
from .pauli import PauliOperator, QubitSet
from .superadditivity import PART1, PART2, FourWayPartition, verify_ssa

THREADS_ENV = "STABSPLIT_THREADS"


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, trial]))


def random_fourway(n: int, rng: np.random.Generator) -> FourWayPartition:
    """Every block gets at least one qubit when ``n >= 4``."""
    order = rng.permutation(n).tolist()
    labels = rng.integers(0, 4, size=n).tolist()
    blocks: list[list[int]] = [[], [], [], []]
    for i, q in enumerate(order):
        blocks[i if i < 4 else labels[i]].append(q)
    return FourWayPartition(n, *blocks)


def oracle_check(S: StabilizerGroup, fw: FourWayPartition, report, tol: float = 1e-10) -> list[str]:
    """Dense checks of a report; returns a list of failure descriptions."""
    from . import oracle

    failures = []
    psi = oracle.statevector(S)
    ent = oracle.schmidt_entropy(psi, fw.bipartition)
    if abs(ent - report.e_global / 2) > 1e-6:
        failures.append(f"global entropy {ent} != e/2 = {report.e_global / 2}")
    for traced, e in ((PART2, report.e1), (PART1, report.e2)):
        tr = report.traces[traced]
        traced_set = fw.part2 if traced == PART2 else fw.part1
        kept = fw.part1 if traced == PART2 else fw.part2
        kept_part = fw.kept_bipartition(traced)
        branches = oracle.branch_states(psi, tr.selection.ops, traced_set)
        for prob, phi in branches:
            s = oracle.schmidt_entropy(phi, kept_part)
            if abs(s - e / 2) > 1e-6:
                failures.append(f"{traced}: branch entropy {s} != {e / 2}")
                break
            for g in tr.group.generators:
                if abs(abs(oracle.expectation(g, phi)) - 1) > 1e-9:
                    failures.append(f"{traced}: branch not stabilized by +-{g}")
                    break
        if not branches:
            failures.append(f"{traced}: no branches")
            continue
        mix = sum(p * np.outer(v, v.conj()) for p, v in branches)
        rho = oracle.reduced_density_matrix(psi, list(kept))
        if np.abs(mix - rho).max() > tol:
            failures.append(f"{traced}: branch mixture differs from partial trace")
    return failures


@dataclass
class TrialResult:
    trial: int
    ok: bool
    saturated: bool
    oracle_checked: bool
    e_global: int
    problem: str = ""
    stab: str = ""
    partition: str = ""


def _evaluate(S: StabilizerGroup, fw: FourWayPartition, use_oracle: bool) -> tuple[bool, str, object]:
    try:
        report = verify_ssa(S, fw)
    except AssertionError as exc:
        return False, f"internal assertion: {exc}", None
    if not report.holds:
        return False, "e1 + e2 > e_global", report
    failed = [k for k, v in report.checks.items() if not v]
    if failed:
        return False, f"intermediate checks failed: {failed}", report
    if use_oracle:
        problems = oracle_check(S, fw, report)
        if problems:
            return False, "; ".join(problems), report
    return True, "", report


def run_trial(args: tuple[int, int, int, int]) -> TrialResult:
    n, seed, trial, oracle_max = args
    rng = trial_rng(seed, trial)
    fw = random_fourway(n, rng)
    S = random_stabilizer(n, int(rng.integers(0, 2**63)))
    use_oracle = n <= oracle_max
    ok, problem, report = _evaluate(S, fw, use_oracle)
    res = TrialResult(
        trial=trial,
        ok=ok,
        saturated=bool(report is not None and report.e1 + report.e2 == report.e_global),
        oracle_checked=use_oracle,
        e_global=report.e_global if report is not None else -1,
        problem=problem,
    )
    if not ok:
        S_min, fw_min = minimize(S, fw, lambda s, f: not _evaluate(s, f, f.n <= oracle_max)[0])
        res.stab = format_stab(S_min, comment=f"partition {fw_min.spec()}\n{problem}")
        res.partition = fw_min.spec()
    return res


def drop_qubit(S: StabilizerGroup, fw: FourWayPartition, q: int):
    """Measure ``Z_q``, discard qubit ``q``, renumber the rest."""
    rows = measure_rows(S.rows, PauliOperator.single(S.n, q, "Z").key, S._even, S.n)
    kept = QubitSet(tuple(i for i in range(S.n) if i != q))
    reduced = reduce_to_kept(rows, S.n, QubitSet((q,)), kept)
    pos = {old: new for new, old in enumerate(kept)}
    blocks = [[pos[i] for i in blk if i != q] for blk in (fw.a1, fw.a2, fw.b1, fw.b2)]
    return StabilizerGroup(S.n - 1, reduced.generators, _trusted=True), FourWayPartition(S.n - 1, *blocks)


def minimize(
    S: StabilizerGroup,
    fw: FourWayPartition,
    fails: Callable[[StabilizerGroup, FourWayPartition], bool],
):
    """Greedily drop qubits while the failure persists."""
    changed = True
    while changed and S.n > 1:
        changed = False
        for q in range(S.n):
            S2, fw2 = drop_qubit(S, fw, q)
            if fails(S2, fw2):
                S, fw = S2, fw2
                changed = True
                break
    return S, fw


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def fuzz(
    qubits: int,
    trials: int,
    seed: int,
    oracle_max: int = 6,
    out: str | os.PathLike | None = None,
    threads: int | None = None,
) -> dict:
    """Run ``trials`` random trials; the summary depends only on the arguments."""
    if qubits < 4:
        raise ValueError("fuzzing four-way partitions needs at least 4 qubits")
    threads = thread_count() if threads is None else threads
    jobs = [(qubits, seed, t, oracle_max) for t in range(trials)]
    if threads > 1 and trials > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_trial, jobs, chunksize=max(1, trials // (4 * threads))))
    else:
        results = [run_trial(j) for j in jobs]
    failures = [r for r in results if not r.ok]
    reproducers = []
    if failures and out is not None:
        outdir = Path(out)
        outdir.mkdir(parents=True, exist_ok=True)
        for r in failures:
            digest = hashlib.sha256(r.stab.encode()).hexdigest()[:16]
            path = outdir / f"{digest}.stab"
            path.write_text(r.stab, encoding="utf-8")
            reproducers.append(str(path))
    summary = {
        "qubits": qubits,
        "seed": seed,
        "trials": trials,
        "violations": len(failures),
        "oracle_checked": sum(r.oracle_checked for r in results),
        "saturated": sum(r.saturated for r in results),
        "mean_e_global": round(sum(r.e_global for r in results) / max(trials, 1), 6),
    }
    if failures:
        summary["failures"] = [
            {"trial": r.trial, "problem": r.problem, "partition": r.partition} for r in failures
        ]
        summary["reproducers"] = sorted(set(reproducers))
    return summary
