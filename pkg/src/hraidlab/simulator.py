"""Event-driven Monte Carlo estimation of mean time to data loss.

Each trial plays the failure process forward with competing exponentials:
the total rate of the surviving components sets the inter-event time, and
the failing component is chosen with probability proportional to its rate.
Restriping is instantaneous, so a trial's state is just the failed-disk
count per alive node and the dead-node count; the trial ends when more
than k nodes have died.

Internally time advances in units of the inverse disk rate (rates divide
out), and hours emerge from one final division by delta.  Every trial
draws from its own counter-based stream keyed by (seed, trial index), so
results are bit-identical for any execution order, thread count, chunk
size, and for the scalar and vectorized engines (the scalar engine calls
numpy's log1p on purpose: its last-ulp rounding can differ from the C
library's).
"""

from __future__ import annotations

import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from .config import FailureModel, HraidConfig, ValidationError
from .stream import TrialStream, trial_key, trial_keys, uniforms_at

#: Trials per work unit.  Chunking only batches the vectorized engine;
#: results are independent of it because streams are keyed by absolute
#: trial index.
CHUNK_TRIALS = 16384

#: Environment variable capping worker threads (0 means one per CPU).
THREADS_ENV_VAR = "HRAID_LAB_THREADS"

_F64 = np.float64
_CSV_HEADER = (
    "n,m,k,ell,delta_per_hour,gamma_per_hour,trials,seed,"
    "mttdl_hours,std_hours,ci95_low,ci95_high"
)


class EventKind(Enum):
    DISK = "disk"
    CONTROLLER = "controller"


class LossCause(Enum):
    DISK_CASCADE = "disk_cascade"
    CONTROLLER = "controller"


class TraceEvent(NamedTuple):
    time_hours: float
    node: int  # 1-based
    kind: EventKind


@dataclass(frozen=True)
class DataLossEvent:
    """One simulated lifetime: loss time, cause, and the event trace."""

    time_hours: float
    cause: LossCause
    trace: tuple[TraceEvent, ...]

    @property
    def disk_failures(self) -> int:
        return sum(1 for e in self.trace if e.kind is EventKind.DISK)


@dataclass(frozen=True)
class MttdlEstimate:
    """Aggregate of per-trial loss times with a normal-theory 95% interval."""

    trials: int
    mean_hours: float
    std_dev_hours: float
    ci95_low: float
    ci95_high: float
    seed: int

    @classmethod
    def from_times(cls, times_hours: np.ndarray, seed: int) -> "MttdlEstimate":
        trials = times_hours.size
        if trials < 1:
            raise ValidationError("estimate needs at least one trial")
        mean = float(np.mean(times_hours))
        if trials == 1:
            # dispersion is undefined from one sample; report a degenerate CI
            return cls(1, mean, 0.0, mean, mean, seed)
        std = float(np.std(times_hours, ddof=1))
        half = 1.96 * std / math.sqrt(trials)
        return cls(trials, mean, std, mean - half, mean + half, seed)


@dataclass(frozen=True)
class TrialResults:
    """Raw per-trial outcomes of one batch run."""

    times_hours: np.ndarray
    disk_failures: np.ndarray
    causes: np.ndarray  # 0 = disk cascade, 1 = controller

    @property
    def trials(self) -> int:
        return self.times_hours.size


def resolve_thread_count(threads: int | None = None) -> int:
    """Worker count: explicit argument, else the environment cap, else 1."""
    if threads is None:
        raw = os.environ.get(THREADS_ENV_VAR)
        if raw is None:
            return 1
        try:
            threads = int(raw)
        except ValueError as exc:
            raise ValidationError(
                f"{THREADS_ENV_VAR} must be an integer, got {raw!r}"
            ) from exc
    if threads == 0:
        return os.cpu_count() or 1
    if threads < 0:
        raise ValidationError(f"thread count must be >= 0, got {threads}")
    return threads


def simulate_trial(
    config: HraidConfig, rates: FailureModel, stream: TrialStream
) -> DataLossEvent:
    """Play one lifetime to data loss, recording the full event trace.

    This scalar engine is the readable reference; ``run_trials`` produces
    bit-identical times without traces.
    """
    n, m, k, ell = config.n, config.m, config.k, config.ell
    delta = rates.disk_rate
    rho = rates.controller_rate / delta
    f = [0] * n
    alive = [True] * n
    alive_n = n
    dead = 0
    t_unit = 0.0
    trace: list[TraceEvent] = []
    while True:
        wtot = 0
        for i in range(n):
            if alive[i]:
                wtot += m - f[i]
        w = float(wtot) + rho * float(alive_n)
        u1 = stream.next_uniform()
        u2 = stream.next_uniform()
        t_unit += float(-np.log1p(_F64(-u1))) / w
        x = u2 * w

        target = -1
        kind = EventKind.DISK
        acc = 0
        for i in range(n):
            if alive[i]:
                acc += m - f[i]
                if x < float(acc):
                    target = i
                    break
        if target < 0:
            kind = EventKind.CONTROLLER
            passed = 0
            for i in range(n):
                if alive[i]:
                    passed += 1
                    if x < float(wtot) + rho * float(passed):
                        target = i
                        break
        if target < 0:
            # u2 so close to 1 that rounding pushed x to the total weight;
            # charge the last alive component
            for i in range(n - 1, -1, -1):
                if alive[i]:
                    target = i
                    kind = EventKind.DISK if rho == 0.0 else EventKind.CONTROLLER
                    break

        if kind is EventKind.DISK:
            if f[target] == ell:
                alive[target] = False
                alive_n -= 1
                dead += 1
            else:
                f[target] += 1
        else:
            alive[target] = False
            alive_n -= 1
            dead += 1
        trace.append(TraceEvent(t_unit / delta, target + 1, kind))
        if dead > k:
            cause = (
                LossCause.DISK_CASCADE if kind is EventKind.DISK else LossCause.CONTROLLER
            )
            return DataLossEvent(
                time_hours=t_unit / delta, cause=cause, trace=tuple(trace)
            )


def _simulate_chunk(
    config: HraidConfig,
    rho: float,
    seed: int,
    start: int,
    count: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized engine: unit-time losses, disk-event counts, causes."""
    n, m, k, ell = config.n, config.m, config.k, config.ell
    keys = trial_keys(seed, start, count)
    f = np.zeros((count, n), dtype=np.int64)
    alive = np.ones((count, n), dtype=bool)
    dead = np.zeros(count, dtype=np.int64)
    t_unit = np.zeros(count, dtype=np.float64)
    disk_events = np.zeros(count, dtype=np.int64)
    causes = np.zeros(count, dtype=np.uint8)
    act = np.arange(count)
    it = 0
    while act.size:
        it += 1
        ka = keys[act]
        u1 = uniforms_at(ka, 2 * it - 1)
        u2 = uniforms_at(ka, 2 * it)
        fa = f[act]
        ala = alive[act]
        w = np.where(ala, m - fa, 0)
        cumw = np.cumsum(w, axis=1)
        wtot = cumw[:, -1]
        cumal = np.cumsum(ala, axis=1)
        total = wtot.astype(np.float64) + rho * cumal[:, -1].astype(np.float64)
        t_unit[act] += -np.log1p(-u1) / total
        x = u2 * total

        hit = x[:, None] < cumw.astype(np.float64)
        sel_disk = hit.any(axis=1)
        disk_idx = hit.argmax(axis=1)
        thr = wtot[:, None].astype(np.float64) + rho * cumal.astype(np.float64)
        hit2 = x[:, None] < thr
        sel_ctrl = hit2.any(axis=1) & ~sel_disk
        ctrl_idx = hit2.argmax(axis=1)
        fallback = ~sel_disk & ~sel_ctrl
        if fallback.any():
            last_alive = (n - 1) - np.argmax(ala[:, ::-1], axis=1)
            if rho == 0.0:
                sel_disk = sel_disk | fallback
                disk_idx = np.where(fallback, last_alive, disk_idx)
            else:
                sel_ctrl = sel_ctrl | fallback
                ctrl_idx = np.where(fallback, last_alive, ctrl_idx)

        rows_d = act[sel_disk]
        cols_d = disk_idx[sel_disk]
        disk_events[rows_d] += 1
        kills = f[rows_d, cols_d] == ell
        f[rows_d[~kills], cols_d[~kills]] += 1
        alive[rows_d[kills], cols_d[kills]] = False
        dead[rows_d[kills]] += 1

        rows_c = act[sel_ctrl]
        cols_c = ctrl_idx[sel_ctrl]
        alive[rows_c, cols_c] = False
        dead[rows_c] += 1

        absorbed = dead[act] > k
        if absorbed.any():
            causes[act[absorbed]] = np.where(sel_ctrl[absorbed], 1, 0).astype(np.uint8)
            act = act[~absorbed]
    return t_unit, disk_events, causes


def run_trials(
    config: HraidConfig,
    rates: FailureModel,
    trials: int,
    seed: int,
    threads: int | None = None,
) -> TrialResults:
    """Run ``trials`` independent lifetimes; deterministic in (config, rates,
    trials, seed) regardless of thread count."""
    if trials < 1:
        raise ValidationError(f"trials must be >= 1, got {trials}")
    delta = rates.disk_rate
    rho = rates.controller_rate / delta
    times = np.empty(trials, dtype=np.float64)
    dcounts = np.empty(trials, dtype=np.int64)
    causes = np.empty(trials, dtype=np.uint8)

    spans = [
        (start, min(CHUNK_TRIALS, trials - start))
        for start in range(0, trials, CHUNK_TRIALS)
    ]

    def work(span: tuple[int, int]) -> None:
        start, count = span
        t_unit, de, cz = _simulate_chunk(config, rho, seed, start, count)
        times[start : start + count] = t_unit / delta
        dcounts[start : start + count] = de
        causes[start : start + count] = cz

    workers = resolve_thread_count(threads)
    if workers <= 1 or len(spans) == 1:
        for span in spans:
            work(span)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(work, spans))
    return TrialResults(times_hours=times, disk_failures=dcounts, causes=causes)


def estimate_mttdl(
    config: HraidConfig,
    rates: FailureModel,
    trials: int,
    seed: int,
    threads: int | None = None,
) -> MttdlEstimate:
    """Monte Carlo MTTDL with a 95% confidence interval."""
    results = run_trials(config, rates, trials, seed, threads)
    return MttdlEstimate.from_times(results.times_hours, seed)


def cell_seed(seed: int, k: int, ell: int) -> int:
    """Per-cell seed for sweeps, independent of the ranges swept."""
    return trial_key(seed, (k << 16) | ell)


@dataclass(frozen=True)
class SweepCell:
    k: int
    ell: int
    estimate: MttdlEstimate
    trial_results: TrialResults | None = None


@dataclass(frozen=True)
class SweepResult:
    """MTTDL estimates over a (k, l) grid at fixed N, M, and rates."""

    n: int
    m: int
    rates: FailureModel
    trials: int
    seed: int
    cells: tuple[SweepCell, ...]

    def cell(self, k: int, ell: int) -> SweepCell:
        for c in self.cells:
            if c.k == k and c.ell == ell:
                return c
        raise KeyError(f"no cell (k={k}, l={ell}) in this sweep")

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(_CSV_HEADER + "\n")
        for c in self.cells:
            e = c.estimate
            out.write(
                f"{self.n},{self.m},{c.k},{c.ell},{self.rates.disk_rate!r},"
                f"{self.rates.controller_rate!r},{e.trials},{self.seed},"
                f"{e.mean_hours!r},{e.std_dev_hours!r},{e.ci95_low!r},{e.ci95_high!r}\n"
            )
        return out.getvalue()

    def to_json(self) -> str:
        obj = {
            "n": self.n,
            "m": self.m,
            "delta_per_hour": self.rates.disk_rate,
            "gamma_per_hour": self.rates.controller_rate,
            "trials": self.trials,
            "seed": self.seed,
            "cells": [
                {
                    "k": c.k,
                    "ell": c.ell,
                    "mttdl_hours": c.estimate.mean_hours,
                    "std_hours": c.estimate.std_dev_hours,
                    "ci95_low": c.estimate.ci95_low,
                    "ci95_high": c.estimate.ci95_high,
                }
                for c in self.cells
            ],
        }
        return json.dumps(obj, indent=2)

    def format_table(self) -> str:
        """Grid of mean MTTDL in thousands of hours, one decimal."""
        ks = sorted({c.k for c in self.cells})
        ells = sorted({c.ell for c in self.cells})
        lines = [
            f"MTTDL in thousands of hours: N={self.n}, M={self.m}, "
            f"delta={self.rates.disk_rate:g}/h, gamma={self.rates.controller_rate:g}/h, "
            f"trials={self.trials}, seed={self.seed}"
        ]
        lines.append("      " + "".join(f"{f'k={k}':>10}" for k in ks))
        by_pos = {(c.k, c.ell): c for c in self.cells}
        for ell in ells:
            row = [f"l={ell:<4}"]
            for k in ks:
                c = by_pos.get((k, ell))
                row.append(f"{c.estimate.mean_hours / 1000.0:>10.1f}" if c else f"{'-':>10}")
            lines.append("".join(row))
        return "\n".join(lines)


def sweep(
    n: int,
    m: int,
    rates: FailureModel,
    trials: int,
    seed: int,
    k_range: range = range(4),
    l_range: range = range(4),
    threads: int | None = None,
    keep_trials: bool = False,
) -> SweepResult:
    """Estimate MTTDL over the (k, l) grid.

    Every cell derives its own seed from (seed, k, l), so a cell's numbers
    match a standalone run with that derived seed and do not depend on
    which other cells are swept.  Grid cells that violate the geometry
    bounds (k >= N or k + l >= M) are skipped.
    """
    if trials < 1:
        raise ValidationError(f"trials must be >= 1, got {trials}")
    cells = []
    for k in k_range:
        for ell in l_range:
            if k >= n or k + ell >= m:
                continue
            config = HraidConfig(n, m, k, ell)
            cseed = cell_seed(seed, k, ell)
            results = run_trials(config, rates, trials, cseed, threads)
            est = MttdlEstimate.from_times(results.times_hours, cseed)
            cells.append(
                SweepCell(
                    k=k,
                    ell=ell,
                    estimate=est,
                    trial_results=results if keep_trials else None,
                )
            )
    return SweepResult(
        n=n, m=m, rates=rates, trials=trials, seed=seed, cells=tuple(cells)
    )


def trace_jsonl_line(trial_index: int, event: DataLossEvent) -> str:
    """One JSON line describing a traced trial, for the debug dump."""
    return json.dumps(
        {
            "trial": trial_index,
            "time_hours": event.time_hours,
            "cause": event.cause.value,
            "events": [
                {"time_hours": e.time_hours, "node": e.node, "kind": e.kind.value}
                for e in event.trace
            ],
        }
    )
