"""Exact simulation of measurement schedules.

Two engines: a dense state-vector oracle (up to 20 qubits, and branch
enumeration up to 14) and a matrix-product-state engine for chains, GHZ
states, and composites of those, which measures single sites in any order
with bond dimension at most 2 and supports batched shots.  Outcomes are
sampled by inverse CDF on exact marginals from a seeded generator (numpy's
default PCG64 stream), so runs are reproducible bit for bit across
platforms.

The analytic path resolves the canonical adaptation symbolically: a compiled
schedule simulates a branch-independent single-qubit circuit whose rotation
angles depend only on the input, so success probabilities come from a
product of 2x2 matrices rather than from sampling.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .boolean import BooleanFunction, dot2, nchvm_bound, parse_input
from .mbqc import (MeasurementSchedule, PauliZBasis, QubitSpec, Resource,
                   ResourceReport, resources)
from .qsp import rot_x, rot_z

DENSE_CAP = 20
ENUM_CAP = 14
MARGINAL_TOL = 1e-12


class SideProcessorState:
    """Mod-2 linear side processor: records outcomes, serves setting bits."""

    def __init__(self, schedule: MeasurementSchedule, x: int, batch: int = 1):
        self.schedule = schedule
        self.x = x
        self.batch = batch
        self.outcomes: dict[int, np.ndarray] = {}

    def record(self, qid: int, outcome: np.ndarray) -> None:
        self.outcomes[qid] = outcome

    def setting(self, q: QubitSpec) -> np.ndarray:
        acc = np.full(self.batch, dot2(q.p_mask, self.x), dtype=np.int64)
        for a in q.a_ids:
            if a not in self.outcomes:
                raise RuntimeError(f"setting of qubit {q.id} requested before "
                                   f"its dependency {a} was measured")
            acc ^= self.outcomes[a]
        return acc

    def output(self) -> np.ndarray:
        acc = np.full(self.batch, self.schedule.c, dtype=np.int64)
        for qid in self.schedule.o_ids:
            acc ^= self.outcomes[qid]
        return acc


def xy_basis_vectors(angles: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvectors of cos(t)X + sin(t)Y for outcomes 0 and 1, batched."""
    e_minus = np.exp(-0.5j * angles)
    e_plus = np.exp(0.5j * angles)
    v0 = np.stack([e_minus, e_plus], axis=-1) / math.sqrt(2)
    v1 = np.stack([e_minus, -e_plus], axis=-1) / math.sqrt(2)
    return v0, v1


def _measurement_vectors(q: QubitSpec, setting: np.ndarray):
    if isinstance(q.basis, PauliZBasis):
        B = setting.shape[0]
        v0 = np.zeros((B, 2), dtype=complex)
        v1 = np.zeros((B, 2), dtype=complex)
        v0[:, 0] = 1.0
        v1[:, 1] = 1.0
        return v0, v1
    sign = 1.0 - 2.0 * ((setting ^ q.basis.bias) & 1)
    angles = q.basis.offset + sign * q.basis.theta
    return xy_basis_vectors(angles)


# ---------------------------------------------------------------------------
# dense engine


def dense_state(resource: Resource) -> np.ndarray:
    """State vector with site i on axis i-1 of the reshaped tensor."""
    if resource.kind == "composite":
        state = np.ones(1, dtype=complex)
        for part in resource.parts:
            state = np.kron(state, dense_state(part))
        return state
    N = resource.n_qubits
    if N == 0:
        return np.ones(1, dtype=complex)
    if N > DENSE_CAP:
        raise ValueError(f"dense engine capped at {DENSE_CAP} qubits")
    if resource.kind == "ghz":
        state = np.zeros(1 << N, dtype=complex)
        state[0] = state[-1] = 1 / math.sqrt(2)
        return state
    idx = np.arange(1 << N)
    # site i corresponds to bit (N - i) counted from the LSB
    sign = np.zeros(1 << N, dtype=np.int64)
    for i in range(1, N):
        b1 = (idx >> (N - i)) & 1
        b2 = (idx >> (N - i - 1)) & 1
        sign += b1 * b2
    return ((-1.0) ** sign).astype(complex) / math.sqrt(1 << N)


class DenseEngine:
    """Exact statevector with single-site projective measurement."""

    def __init__(self, resource: Resource, state: np.ndarray | None = None,
                 live: set[int] | None = None):
        self.resource = resource
        self.state = dense_state(resource) if state is None else state
        self.live = (set(range(1, resource.n_qubits + 1))
                     if live is None else live)

    def copy(self) -> "DenseEngine":
        return DenseEngine(self.resource, self.state.copy(), set(self.live))

    def _amp(self, qid: int, v: np.ndarray) -> np.ndarray:
        t = self.state.reshape((2,) * len(self.live))
        axis = sorted(self.live).index(qid)
        return np.tensordot(v.conj(), np.moveaxis(t, axis, 0), axes=(0, 0)).reshape(-1)

    def marginal(self, qid: int, v0: np.ndarray, v1: np.ndarray):
        a0 = self._amp(qid, v0[0] if v0.ndim == 2 else v0)
        a1 = self._amp(qid, v1[0] if v1.ndim == 2 else v1)
        p0 = float(np.sum(np.abs(a0) ** 2))
        p1 = float(np.sum(np.abs(a1) ** 2))
        return np.array([p0]), np.array([p1])

    def project(self, qid: int, v: np.ndarray, prob: np.ndarray) -> None:
        amp = self._amp(qid, v[0] if v.ndim == 2 else v)
        p = float(prob[0])
        if p <= 0:
            raise ZeroDivisionError("projection onto a zero-probability branch")
        self.live.discard(qid)
        self.state = amp / math.sqrt(p)


# ---------------------------------------------------------------------------
# MPS engine (batched)


def _ghz_tensors(N: int) -> list[np.ndarray]:
    if N == 1:
        t = np.zeros((1, 2, 1), dtype=complex)
        t[0, :, 0] = 1 / math.sqrt(2)
        return [t]
    first = np.zeros((1, 2, 2), dtype=complex)
    first[0, 0, 0] = first[0, 1, 1] = 1 / math.sqrt(2)
    mid = np.zeros((2, 2, 2), dtype=complex)
    mid[0, 0, 0] = mid[1, 1, 1] = 1.0
    last = np.zeros((2, 2, 1), dtype=complex)
    last[0, 0, 0] = last[1, 1, 0] = 1.0
    return [first] + [mid] * (N - 2) + [last]


def _cluster_tensors(N: int) -> list[np.ndarray]:
    if N == 1:
        t = np.zeros((1, 2, 1), dtype=complex)
        t[0, :, 0] = 1 / math.sqrt(2)
        return [t]
    first = np.zeros((1, 2, 2), dtype=complex)
    first[0, 0, 0] = first[0, 1, 1] = 1 / math.sqrt(2)
    mid = np.zeros((2, 2, 2), dtype=complex)
    for a in range(2):
        for s in range(2):
            mid[a, s, s] = (-1.0) ** (a * s) / math.sqrt(2)
    last = np.zeros((2, 2, 1), dtype=complex)
    for a in range(2):
        for s in range(2):
            last[a, s, 0] = (-1.0) ** (a * s) / math.sqrt(2)
    return [first] + [mid] * (N - 2) + [last]


MAX_BOND = 2


class _Part:
    def __init__(self, start: int, tensors: list[np.ndarray], batch: int):
        self.start = start
        self.tensors: dict[int, np.ndarray] = {}
        for i, t in enumerate(tensors):
            arr = np.broadcast_to(t, (batch,) + t.shape).copy()
            self.tensors[start + i] = arr
        self.live = sorted(self.tensors)

    def left_env(self, qid: int) -> np.ndarray:
        env = None
        for site in self.live:
            if site >= qid:
                break
            A = self.tensors[site]
            if env is None:
                env = np.einsum("bisk,bisl->bkl", A.conj(), A)
            else:
                env = np.einsum("bisk,bij,bjsl->bkl", A.conj(), env, A)
        if env is None:
            B, l = self.tensors[qid].shape[0], self.tensors[qid].shape[1]
            env = np.broadcast_to(np.eye(l, dtype=complex), (B, l, l)).copy()
        return env

    def right_env(self, qid: int) -> np.ndarray:
        env = None
        for site in reversed(self.live):
            if site <= qid:
                break
            A = self.tensors[site]
            if env is None:
                env = np.einsum("bisk,bjsk->bij", A, A.conj())
            else:
                env = np.einsum("bisk,bkl,bjsl->bij", A, env, A.conj())
        if env is None:
            B, r = self.tensors[qid].shape[0], self.tensors[qid].shape[3]
            env = np.broadcast_to(np.eye(r, dtype=complex), (B, r, r)).copy()
        return env

    def amplitude_probability(self, qid: int, v: np.ndarray) -> np.ndarray:
        A = self.tensors[qid]
        M = np.einsum("bs,blsr->blr", v.conj(), A)
        L = self.left_env(qid)
        R = self.right_env(qid)
        p = np.einsum("bij,bik,bjl,bkl->b", L, M.conj(), M, R)
        return np.maximum(p.real, 0.0)

    def project(self, qid: int, v: np.ndarray, prob: np.ndarray) -> None:
        A = self.tensors[qid]
        M = np.einsum("bs,blsr->blr", v.conj(), A)
        M = M / np.sqrt(prob)[:, None, None]
        pos = self.live.index(qid)
        del self.tensors[qid]
        self.live.pop(pos)
        if not self.live:
            return
        if pos > 0:
            left = self.live[pos - 1]
            merged = np.einsum("blsk,bkr->blsr", self.tensors[left], M)
            assert merged.shape[1] <= MAX_BOND and merged.shape[3] <= MAX_BOND
            self.tensors[left] = merged
        else:
            right = self.live[pos]
            merged = np.einsum("bkl,blsr->bksr", M, self.tensors[right])
            assert merged.shape[1] <= MAX_BOND and merged.shape[3] <= MAX_BOND
            self.tensors[right] = merged

    def _sweep_prob(self, L, M, R) -> np.ndarray:
        if L is None and R is None:
            p = np.einsum("bik,bik->b", M.conj(), M)
        elif L is None:
            p = np.einsum("bik,bil,bkl->b", M.conj(), M, R)
        elif R is None:
            p = np.einsum("bij,bik,bjk->b", L, M.conj(), M)
        else:
            p = np.einsum("bij,bik,bjl,bkl->b", L, M.conj(), M, R)
        return np.maximum(p.real, 0.0)

    def measure_sweep(self, items, rng) -> dict[int, np.ndarray]:
        """Measure several sites in one ascending pass.

        Right environments are computed once up front; the left environment
        folds forward incrementally, so a whole round costs one sweep instead
        of one full contraction per site.  Projected sites are absorbed into
        their left live neighbor when one exists (already behind the cursor),
        otherwise into the right neighbor (still ahead of it); either way the
        cursor state stays exact.
        """
        targets = {qid: (v0, v1) for qid, v0, v1 in items}
        B = self.tensors[self.live[0]].shape[0]
        right_after: dict[int, np.ndarray | None] = {}
        env = None
        for site in reversed(self.live):
            right_after[site] = env
            A = self.tensors[site]
            if env is None:
                env = np.einsum("bisk,bjsk->bij", A, A.conj())
            else:
                env = np.einsum("bisk,bkl,bjsl->bij", A, env, A.conj())
        results: dict[int, np.ndarray] = {}
        L = None
        for site in list(self.live):
            A = self.tensors[site]
            if site not in targets:
                L = (np.einsum("bisk,bisl->bkl", A.conj(), A) if L is None
                     else np.einsum("bisk,bij,bjsl->bkl", A.conj(), L, A))
                continue
            v0, v1 = targets[site]
            M0 = np.einsum("bs,blsr->blr", v0.conj(), A)
            M1 = np.einsum("bs,blsr->blr", v1.conj(), A)
            R = right_after[site]
            p0 = self._sweep_prob(L, M0, R)
            p1 = self._sweep_prob(L, M1, R)
            if np.max(np.abs(p0 + p1 - 1.0)) > MARGINAL_TOL:
                raise AssertionError("per-measurement marginals do not sum to 1")
            out = (rng.random(B) >= p0).astype(np.int64)
            pick = out[:, None, None].astype(bool)
            M = np.where(pick, M1, M0)
            M = M / np.sqrt(np.where(out == 1, p1, p0))[:, None, None]
            results[site] = out
            pos = self.live.index(site)
            del self.tensors[site]
            self.live.pop(pos)
            if pos > 0:
                left = self.live[pos - 1]
                self.tensors[left] = np.einsum("blsk,bkr->blsr",
                                               self.tensors[left], M)
                L = (np.einsum("bik,bil->bkl", M.conj(), M) if L is None
                     else np.einsum("bik,bij,bjl->bkl", M.conj(), L, M))
            elif pos < len(self.live):
                right = self.live[pos]
                merged = np.einsum("bkl,blsr->bksr", M, self.tensors[right])
                assert merged.shape[1] <= MAX_BOND and merged.shape[3] <= MAX_BOND
                self.tensors[right] = merged
        return results


class MpsEngine:
    """Bond-2 matrix product state over GHZ/cluster parts, batched over shots."""

    def __init__(self, resource: Resource, batch: int = 1):
        self.resource = resource
        self.batch = batch
        self.parts: list[_Part] = []
        self.part_of: dict[int, _Part] = {}
        self._build(resource, 1)

    def _build(self, resource: Resource, start: int) -> int:
        if resource.kind == "composite":
            for part in resource.parts:
                start = self._build(part, start)
            return start
        N = resource.n_qubits
        if N == 0:
            return start
        tensors = (_ghz_tensors(N) if resource.kind == "ghz"
                   else _cluster_tensors(N))
        part = _Part(start, tensors, self.batch)
        self.parts.append(part)
        for qid in range(start, start + N):
            self.part_of[qid] = part
        return start + N

    def copy(self) -> "MpsEngine":
        clone = MpsEngine.__new__(MpsEngine)
        clone.resource = self.resource
        clone.batch = self.batch
        clone.parts = []
        clone.part_of = {}
        for part in self.parts:
            p2 = _Part.__new__(_Part)
            p2.start = part.start
            p2.tensors = {k: v.copy() for k, v in part.tensors.items()}
            p2.live = list(part.live)
            clone.parts.append(p2)
            for qid, owner in self.part_of.items():
                if owner is part:
                    clone.part_of[qid] = p2
        return clone

    def marginal(self, qid: int, v0: np.ndarray, v1: np.ndarray):
        part = self.part_of[qid]
        p0 = part.amplitude_probability(qid, np.atleast_2d(v0))
        p1 = part.amplitude_probability(qid, np.atleast_2d(v1))
        return p0, p1

    def project(self, qid: int, v: np.ndarray, prob: np.ndarray) -> None:
        self.part_of[qid].project(qid, np.atleast_2d(v), prob)

    def measure_round(self, items, rng) -> dict[int, np.ndarray]:
        """Batch-measure one adaptive round (items ascending by qubit id).

        Parts occupy contiguous id ranges, so sweeping parts in order keeps
        the random-draw sequence identical to per-site measurement.
        """
        out: dict[int, np.ndarray] = {}
        grouped: dict[int, list] = {}
        for qid, v0, v1 in items:
            grouped.setdefault(self.part_of[qid].start, []).append((qid, v0, v1))
        for start in sorted(grouped):
            part = self.part_of[grouped[start][0][0]]
            out.update(part.measure_sweep(grouped[start], rng))
        return out


def make_engine(resource: Resource, kind: str = "auto", batch: int = 1):
    if kind == "auto":
        kind = "dense" if (resource.n_qubits <= ENUM_CAP and batch == 1) else "mps"
    if kind == "dense":
        if batch != 1:
            raise ValueError("dense engine is not batched")
        return DenseEngine(resource)
    if kind == "mps":
        return MpsEngine(resource, batch)
    raise ValueError(f"unknown engine {kind!r}")


# ---------------------------------------------------------------------------
# running schedules


def run_schedule_batch(s: MeasurementSchedule, x, shots: int, seed: int,
                       engine: str = "auto"):
    """Measure in round order, sampling outcomes by inverse CDF.

    Returns (outcome arrays keyed by qubit id, output bits), each of shape
    (shots,).  Identical seeds reproduce identical runs.
    """
    xi = parse_input(x, s.arity) if s.arity else 0
    if engine == "auto":
        engine = "mps" if (shots > 1 or s.n_qubits > DENSE_CAP) else "dense"
    eng = make_engine(s.resource, engine, shots if engine == "mps" else 1)
    if engine == "dense" and shots != 1:
        raise ValueError("dense runs are single-shot")
    rng = np.random.default_rng(seed)
    proc = SideProcessorState(s, xi, batch=shots)
    if isinstance(eng, MpsEngine):
        order = s.measurement_order()
        idx = 0
        while idx < len(order):
            rnd = order[idx].round
            items = []
            while idx < len(order) and order[idx].round == rnd:
                q = order[idx]
                v0, v1 = _measurement_vectors(q, proc.setting(q))
                items.append((q.id, v0, v1))
                idx += 1
            for qid, out in eng.measure_round(items, rng).items():
                proc.record(qid, out)
        return proc.outcomes, proc.output()
    for q in s.measurement_order():
        setting = proc.setting(q)
        v0, v1 = _measurement_vectors(q, setting)
        p0, p1 = eng.marginal(q.id, v0, v1)
        if np.max(np.abs(p0 + p1 - 1.0)) > MARGINAL_TOL:
            raise AssertionError("per-measurement marginals do not sum to 1")
        u = rng.random(shots)
        out = (u >= p0).astype(np.int64)
        pick = out[:, None].astype(bool)
        v_sel = np.where(pick, v1, v0)
        p_sel = np.where(out == 1, p1, p0)
        eng.project(q.id, v_sel, p_sel)
        proc.record(q.id, out)
    return proc.outcomes, proc.output()


def run_shot(s: MeasurementSchedule, x, seed: int,
             engine: str = "auto") -> tuple[dict[int, int], int]:
    """Single seeded shot; returns the outcome record and the output bit."""
    if engine == "auto":
        engine = "dense" if s.n_qubits <= DENSE_CAP else "mps"
    outcomes, y = run_schedule_batch(s, x, 1, seed, engine)
    return {qid: int(v[0]) for qid, v in outcomes.items()}, int(y[0])


def exact_distribution(s: MeasurementSchedule, x) -> dict[int, float]:
    """Output distribution by summing Born weights over all outcome branches."""
    if s.n_qubits > ENUM_CAP:
        raise ValueError(f"branch enumeration capped at {ENUM_CAP} qubits")
    xi = parse_input(x, s.arity) if s.arity else 0
    order = s.measurement_order()
    probs = {0: 0.0, 1: 0.0}

    def walk(eng: DenseEngine, idx: int, outcomes: dict[int, int], weight: float):
        if weight <= 1e-300:
            return
        if idx == len(order):
            y = s.c
            for qid in s.o_ids:
                y ^= outcomes[qid]
            probs[y] += weight
            return
        q = order[idx]
        setting = dot2(q.p_mask, xi)
        for a in q.a_ids:
            setting ^= outcomes[a]
        v0, v1 = _measurement_vectors(q, np.array([setting]))
        p0, p1 = eng.marginal(q.id, v0, v1)
        if abs(float(p0[0] + p1[0]) - 1.0) > MARGINAL_TOL:
            raise AssertionError("branch marginals do not sum to 1")
        for out, v, p in ((0, v0, p0), (1, v1, p1)):
            if p[0] <= 1e-300:
                continue
            sub = eng.copy()
            sub.project(q.id, v, p)
            outcomes[q.id] = out
            walk(sub, idx + 1, outcomes, weight * float(p[0]))
            del outcomes[q.id]

    walk(DenseEngine(s.resource), 0, {}, 1.0)
    return probs


def branch_distribution(s: MeasurementSchedule, x) -> dict[tuple[int, ...], float]:
    """Probability of every full outcome string (dense enumeration)."""
    if s.n_qubits > ENUM_CAP:
        raise ValueError(f"branch enumeration capped at {ENUM_CAP} qubits")
    xi = parse_input(x, s.arity) if s.arity else 0
    order = s.measurement_order()
    result: dict[tuple[int, ...], float] = {}

    def walk(eng: DenseEngine, idx: int, outcomes: dict[int, int], weight: float):
        if idx == len(order):
            key = tuple(outcomes[q.id] for q in sorted(s.qubits, key=lambda q: q.id))
            result[key] = result.get(key, 0.0) + weight
            return
        q = order[idx]
        setting = dot2(q.p_mask, xi)
        for a in q.a_ids:
            setting ^= outcomes[a]
        v0, v1 = _measurement_vectors(q, np.array([setting]))
        p0, p1 = eng.marginal(q.id, v0, v1)
        for out, v, p in ((0, v0, p0), (1, v1, p1)):
            if p[0] <= 1e-300:
                continue
            sub = eng.copy()
            sub.project(q.id, v, p)
            outcomes[q.id] = out
            walk(sub, idx + 1, outcomes, weight * float(p[0]))
            del outcomes[q.id]

    walk(DenseEngine(s.resource), 0, {}, 1.0)
    return result


# ---------------------------------------------------------------------------
# analytic effective circuit


@dataclass(frozen=True)
class EffectiveCircuit:
    unitary: np.ndarray
    output_distribution: tuple[float, float]  # over y, constant folded in


def effective_circuit(s: MeasurementSchedule, x) -> EffectiveCircuit:
    """Branch-independent circuit of a compiled schedule at a given input.

    Canonical adaptation makes the sign corrections cancel symbolically, so
    the rotation at each site is offset + (-1)^(P.x xor bias) * theta; on a
    chain, odd sites rotate about X and even sites about Z, and the output
    parity follows the final state's Z readout.
    """
    if not s.compiled:
        raise ValueError("schedule is not tagged as compiler-generated")
    xi = parse_input(x, s.arity) if s.arity else 0
    U = np.eye(2, dtype=complex)
    kind = s.resource.kind
    if kind == "composite":
        raise ValueError("no effective circuit for composite schedules")
    for q in sorted(s.qubits, key=lambda q: q.id):
        if isinstance(q.basis, PauliZBasis):
            raise ValueError("no effective circuit with Pauli-Z cuts")
        sign = -1.0 if (dot2(q.p_mask, xi) ^ q.basis.bias) else 1.0
        delta = q.basis.offset + sign * q.basis.theta
        if kind == "ghz":
            U = rot_x(delta) @ U
        else:
            U = (rot_x(delta) if q.id % 2 == 1 else rot_z(delta)) @ U
    p1 = float(abs(U[1, 0]) ** 2)
    dist = (p1, 1.0 - p1) if s.c else (1.0 - p1, p1)
    return EffectiveCircuit(U, dist)


def analytic_success(s: MeasurementSchedule, f: BooleanFunction, x) -> float:
    eff = effective_circuit(s, x)
    return eff.output_distribution[f(x)]


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class InputRecord:
    x: int
    target: int
    analytic_success: float | None
    exact_success: float | None
    shots: int
    correct: int


@dataclass(frozen=True)
class SimulationReport:
    function: str
    arity: int
    records: tuple[InputRecord, ...]
    resources: ResourceReport
    seed: int

    @property
    def min_analytic(self) -> float | None:
        vals = [r.analytic_success for r in self.records
                if r.analytic_success is not None]
        return min(vals) if vals else None

    @property
    def min_exact(self) -> float | None:
        vals = [r.exact_success for r in self.records
                if r.exact_success is not None]
        return min(vals) if vals else None

    @property
    def empirical_rate(self) -> float:
        total = sum(r.shots for r in self.records)
        good = sum(r.correct for r in self.records)
        return good / total if total else 1.0

    @property
    def all_shots_correct(self) -> bool:
        return all(r.correct == r.shots for r in self.records)

    def to_json(self) -> str:
        return json.dumps({
            "function": self.function,
            "arity": self.arity,
            "seed": self.seed,
            "resources": {"l_q": self.resources.l_q, "l_c": self.resources.l_c,
                          "t_q": self.resources.t_q, "t_c": self.resources.t_c,
                          "volume": self.resources.volume},
            "min_analytic": self.min_analytic,
            "min_exact": self.min_exact,
            "empirical_rate": self.empirical_rate,
            "inputs": [{"x": r.x, "target": r.target,
                        "analytic": r.analytic_success, "exact": r.exact_success,
                        "shots": r.shots, "correct": r.correct}
                       for r in self.records],
        }, indent=1)

    def to_csv(self) -> str:
        lines = ["x,target,analytic,exact,shots,correct"]
        for r in self.records:
            analytic = "" if r.analytic_success is None else f"{r.analytic_success:.12g}"
            exact = "" if r.exact_success is None else f"{r.exact_success:.12g}"
            lines.append(f"{r.x},{r.target},{analytic},{exact},{r.shots},{r.correct}")
        return "\n".join(lines) + "\n"


def verify_protocol(s: MeasurementSchedule, f: BooleanFunction,
                    shots_per_input: int = 100, seed: int = 2024,
                    use_exact: bool | None = None) -> SimulationReport:
    """Score a schedule against its target on every input.

    Runs the analytic effective circuit when the schedule supports it, branch
    enumeration when the register is small enough, and seeded sampling
    always.  Sampling is a smoke test; the determinism claims rest on the
    analytic values.
    """
    if f.n != s.arity:
        raise ValueError("arity mismatch")
    if use_exact is None:
        use_exact = s.n_qubits <= ENUM_CAP
    records = []
    for x in range(1 << f.n):
        target = f(x)
        analytic = None
        if s.compiled and s.resource.kind != "composite" and not any(
                isinstance(q.basis, PauliZBasis) for q in s.qubits):
            analytic = analytic_success(s, f, x)
        exact = None
        if use_exact and s.n_qubits <= ENUM_CAP:
            exact = exact_distribution(s, x)[target]
        correct = 0
        if shots_per_input:
            _, ys = run_schedule_batch(s, x, shots_per_input, seed + x, "mps")
            correct = int(np.sum(ys == target))
        for val in (analytic, exact):
            if val is not None and not -1e-12 <= val <= 1 + 1e-12:
                raise AssertionError(f"success probability {val} out of range")
        records.append(InputRecord(x, target, analytic, exact,
                                   shots_per_input, correct))
    return SimulationReport(f.kind, f.n, tuple(records), resources(s), seed)


@dataclass(frozen=True)
class BellScore:
    quantum_success: float
    classical_bound: float
    best_linear_success: float

    @property
    def violates(self) -> bool:
        return self.quantum_success > self.classical_bound + 1e-12


def bell_score(s: MeasurementSchedule, f: BooleanFunction,
               shots_per_input: int = 0, seed: int = 7) -> BellScore:
    """Quantum success versus the exact best-linear (hidden-variable) bound.

    The classical side is computed from the Fourier spectrum, never sampled:
    the best mod-2 linear strategy succeeds on exactly (1 + max |coeff|)/2
    of the inputs.
    """
    beta = nchvm_bound(f)
    report = verify_protocol(s, f, shots_per_input, seed)
    if report.min_analytic is not None:
        quantum = report.min_analytic
    elif report.min_exact is not None:
        quantum = report.min_exact
    else:
        quantum = report.empirical_rate
    return BellScore(quantum, beta, beta)


def compare_engines(s: MeasurementSchedule, x, seed: int = 11) -> float:
    """Drive both engines through one run with forced common outcomes.

    Returns the largest per-measurement marginal disagreement.
    """
    xi = parse_input(x, s.arity) if s.arity else 0
    dense = DenseEngine(s.resource)
    mps = MpsEngine(s.resource, 1)
    rng = np.random.default_rng(seed)
    outcomes: dict[int, int] = {}
    worst = 0.0
    for q in s.measurement_order():
        setting = dot2(q.p_mask, xi)
        for a in q.a_ids:
            setting ^= outcomes[a]
        v0, v1 = _measurement_vectors(q, np.array([setting]))
        d0, d1 = dense.marginal(q.id, v0, v1)
        m0, m1 = mps.marginal(q.id, v0, v1)
        worst = max(worst, abs(float(d0[0] - m0[0])), abs(float(d1[0] - m1[0])))
        out = 0 if rng.random() < d0[0] else 1
        v, p_d, p_m = (v0, d0, m0) if out == 0 else (v1, d1, m1)
        dense.project(q.id, v, p_d)
        mps.project(q.id, v, p_m)
        outcomes[q.id] = out
    return worst
