"""Experiment orchestration, persistence and the sampling analyses.

Configs are JSON objects with keys ``matrix``, ``algorithms``, ``horizon``,
``replicates``, ``seed``, ``checkpointRatio`` and ``output``.  Traces are
persisted as CSV with the exact header ``algorithm,replicate,step,
cumulative_regret`` sorted by (algorithm, replicate, step); regret is
written with 12 significant digits.  Replicate n of every algorithm runs
with seed ``derive_seed(master_seed, n)``, so re-running a config is
byte-identical regardless of worker count.
"""
from __future__ import annotations

import json
import re
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import ccb, rucb, scb
from .oracle import RegretTrace
from .prefmat import (
    MatrixError,
    PreferenceMatrix,
    copeland_scores,
    copeland_winners,
    borda_winners,
    fixture,
    FIXTURES,
    gap_summary,
    gen_cyclic_copeland,
    gen_random,
    is_condorcet,
    load_matrix,
    random_walk_winners,
    submatrix,
)
from .rng import Xoshiro256pp, derive_seed

CSV_HEADER = "algorithm,replicate,step,cumulative_regret"
ALGORITHMS = ("ccb", "scb", "rucb")


class ConfigError(ValueError):
    """Invalid experiment configuration (maps to CLI exit code 1)."""


# ---------------------------------------------------------------------------
# matrix sources


def parse_matrix_source(source) -> PreferenceMatrix:
    """Resolve a matrix source: fixture name, file path, or generator spec.

    Accepted forms: ``"P4"`` (builtin fixture), ``"path/to/matrix.csv"``,
    ``"cyclic(K=50,gamma=0.1)"``, ``"random(K=10,min_margin=0.05,seed=1)"``,
    or the JSON-object equivalents ``{"type": "cyclic", "K": 50, "gamma":
    0.1}`` and ``{"type": "random", "K": 10, "minMargin": 0.05, "seed": 1}``.
    """
    if isinstance(source, dict):
        kind = source.get("type")
        if kind == "cyclic":
            return gen_cyclic_copeland(int(source["K"]), float(source["gamma"]))
        if kind == "random":
            return gen_random(
                int(source["K"]),
                int(source.get("seed", 0)),
                float(source.get("minMargin", source.get("min_margin", 0.05))),
            )
        raise ConfigError(f"unknown matrix spec type: {kind!r}")
    if not isinstance(source, str):
        raise ConfigError(f"matrix source must be a string or object: {source!r}")
    if source.upper() in FIXTURES:
        return fixture(source)
    m = re.fullmatch(r"cyclic\(\s*K?=?\s*(\d+)\s*,\s*(?:gamma=)?([\d.eE+-]+)\s*\)", source)
    if m:
        return gen_cyclic_copeland(int(m.group(1)), float(m.group(2)))
    m = re.fullmatch(
        r"random\(\s*K?=?\s*(\d+)\s*,\s*(?:min_margin=)?([\d.eE+-]+)"
        r"\s*(?:,\s*(?:seed=)?(\d+)\s*)?\)",
        source,
    )
    if m:
        seed = int(m.group(3)) if m.group(3) else 0
        return gen_random(int(m.group(1)), seed, float(m.group(2)))
    path = Path(source)
    if not path.exists():
        raise ConfigError(
            f"matrix source {source!r} is not a fixture, generator spec or "
            "readable file"
        )
    try:
        return load_matrix(path)
    except (MatrixError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class AlgorithmSpec:
    name: str
    alpha: float | None = None

    @property
    def label(self) -> str:
        return self.name

    def validate(self) -> None:
        if self.name not in ALGORITHMS:
            raise ConfigError(
                f"unknown algorithm {self.name!r}; choose from {ALGORITHMS}"
            )
        if self.name in ("ccb", "rucb"):
            if self.alpha is None or self.alpha <= 0.5:
                raise ConfigError(
                    f"{self.name} needs an exploration parameter alpha > 0.5, "
                    f"got {self.alpha!r}"
                )


@dataclass(frozen=True)
class ExperimentConfig:
    matrix: PreferenceMatrix
    algorithms: tuple[AlgorithmSpec, ...]
    horizon: int
    replicates: int
    seed: int
    checkpoint_ratio: float = 1.2
    output: Path | None = None

    def validate(self) -> None:
        if self.horizon < 1:
            raise ConfigError(f"horizon must be >= 1, got {self.horizon}")
        if self.replicates < 1:
            raise ConfigError(f"replicates must be >= 1, got {self.replicates}")
        if self.checkpoint_ratio <= 1.0:
            raise ConfigError(
                f"checkpointRatio must exceed 1, got {self.checkpoint_ratio}"
            )
        if not self.algorithms:
            raise ConfigError("at least one algorithm is required")
        for spec in self.algorithms:
            spec.validate()

    @staticmethod
    def from_dict(d: dict) -> "ExperimentConfig":
        try:
            algos = []
            for a in d["algorithms"]:
                if isinstance(a, str):
                    algos.append(AlgorithmSpec(a))
                else:
                    algos.append(
                        AlgorithmSpec(
                            a["name"],
                            float(a["alpha"]) if "alpha" in a else None,
                        )
                    )
            cfg = ExperimentConfig(
                matrix=parse_matrix_source(d["matrix"]),
                algorithms=tuple(algos),
                horizon=int(d["horizon"]),
                replicates=int(d["replicates"]),
                seed=int(d["seed"]),
                checkpoint_ratio=float(d.get("checkpointRatio", 1.2)),
                output=Path(d["output"]) if d.get("output") else None,
            )
        except KeyError as exc:
            raise ConfigError(f"missing config key: {exc}") from exc
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        cfg.validate()
        return cfg

    @staticmethod
    def from_json(path) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
        return ExperimentConfig.from_dict(data)


# ---------------------------------------------------------------------------
# running


def _run_single(
    spec: AlgorithmSpec,
    matrix: PreferenceMatrix,
    horizon: int,
    seed: int,
    ratio: float,
    marks: tuple[int, ...],
) -> RegretTrace:
    if spec.name == "ccb":
        return ccb.run(
            matrix, spec.alpha, horizon, seed,
            checkpoint_ratio=ratio, mark_steps=marks,
        )
    if spec.name == "rucb":
        return rucb.run(
            matrix, spec.alpha, horizon, seed,
            checkpoint_ratio=ratio, mark_steps=marks,
        )
    if spec.name == "scb":
        return scb.run(
            matrix, horizon, seed,
            checkpoint_ratio=ratio, mark_steps=marks,
        )
    raise ConfigError(f"unknown algorithm {spec.name!r}")


def _worker(args) -> tuple[int, int, RegretTrace]:
    alg_idx, rep, spec, matrix, horizon, seed, ratio, marks = args
    trace = _run_single(spec, matrix, horizon, seed, ratio, marks)
    return alg_idx, rep, trace


def run_experiment(
    config: ExperimentConfig,
    threads: int = 1,
    mark_steps: tuple[int, ...] = (),
) -> list[RegretTrace]:
    """Run replicates x algorithms; write the merged CSV if configured.

    Results are ordered by (algorithm index, replicate) no matter how the
    worker pool schedules them; replicate n always uses
    ``derive_seed(config.seed, n)``.
    """
    config.validate()
    jobs = [
        (
            ai,
            rep,
            spec,
            config.matrix,
            config.horizon,
            derive_seed(config.seed, rep),
            config.checkpoint_ratio,
            mark_steps,
        )
        for ai, spec in enumerate(config.algorithms)
        for rep in range(config.replicates)
    ]
    results: dict[tuple[int, int], RegretTrace] = {}
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for ai, rep, trace in pool.map(_worker, jobs):
                results[(ai, rep)] = trace
    else:
        for job in jobs:
            ai, rep, trace = _worker(job)
            results[(ai, rep)] = trace
    traces = [results[key] for key in sorted(results)]
    if config.output is not None:
        config.output.parent.mkdir(parents=True, exist_ok=True)
        config.output.write_text(traces_to_csv(traces))
    return traces


# ---------------------------------------------------------------------------
# CSV persistence


def traces_to_csv(traces: list[RegretTrace]) -> str:
    """Serialize traces, sorted by (algorithm, replicate, step).

    The replicate column holds each trace's seed-deriving index inferred
    from order of appearance per algorithm.
    """
    rows = []
    rep_counter: Counter[str] = Counter()
    for trace in traces:
        rep = rep_counter[trace.algorithm]
        rep_counter[trace.algorithm] += 1
        for s, v in zip(trace.steps, trace.cumulative_regret):
            rows.append((trace.algorithm, rep, int(s), float(v)))
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    lines = [CSV_HEADER]
    lines.extend(f"{a},{r},{s},{v:.12g}" for a, r, s, v in rows)
    return "\n".join(lines) + "\n"


def parse_traces_csv(text: str) -> list[RegretTrace]:
    """Parse the harness CSV back into per-(algorithm, replicate) traces."""
    lines = text.strip().splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(
            f"bad header: expected {CSV_HEADER!r}, got {lines[0] if lines else ''!r}"
        )
    grouped: dict[tuple[str, int], list[tuple[int, float]]] = {}
    for ln, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 4:
            raise ValueError(f"line {ln}: expected 4 fields, got {len(parts)}")
        alg, rep, step_, reg = parts
        grouped.setdefault((alg, int(rep)), []).append((int(step_), float(reg)))
    traces = []
    for (alg, rep), pts in sorted(grouped.items()):
        steps = np.array([p[0] for p in pts], dtype=np.int64)
        values = np.array([p[1] for p in pts])
        traces.append(
            RegretTrace(
                algorithm=alg,
                seed=rep,
                matrix_id="csv",
                steps=steps,
                cumulative_regret=values,
            )
        )
    return traces


# ---------------------------------------------------------------------------
# sampling analyses


def _sample_subset(rng: Xoshiro256pp, n: int, k: int) -> list[int]:
    """Uniform k-subset of range(n) (partial Fisher-Yates), sorted."""
    arr = list(range(n))
    for pos in range(k):
        r = pos + rng.next_below(n - pos)
        arr[pos], arr[r] = arr[r], arr[pos]
    return sorted(arr[:k])


def condorcet_probability(
    master: PreferenceMatrix, K: int, n_samples: int, seed: int
) -> float:
    """Fraction of uniform K-subsets whose restriction has a Condorcet winner."""
    if not 2 <= K <= master.K:
        raise ValueError(f"K must lie in [2, {master.K}], got {K}")
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    rng = Xoshiro256pp(seed)
    hits = 0
    for _ in range(n_samples):
        sub = submatrix(master, _sample_subset(rng, master.K, K))
        if is_condorcet(sub) is not None:
            hits += 1
    return hits / n_samples


@dataclass(frozen=True)
class StructureStats:
    """Distributions of the winner count and winner loss count over subsets."""

    c_hist: Counter
    l_c_hist: Counter
    n_samples: int
    skipped_ties: int


def structure_stats(
    master: PreferenceMatrix, K: int, n_samples: int, seed: int
) -> StructureStats:
    rng = Xoshiro256pp(seed)
    c_hist: Counter = Counter()
    l_hist: Counter = Counter()
    skipped = 0
    for _ in range(n_samples):
        sub = submatrix(master, _sample_subset(rng, master.K, K))
        if not sub.no_ties():
            skipped += 1  # impossible when the master has no ties
            continue
        scores = copeland_scores(sub)
        best = int(scores.max())
        c_hist[int((scores == best).sum())] += 1
        l_hist[K - 1 - best] += 1
    return StructureStats(c_hist, l_hist, n_samples - skipped, skipped)


@dataclass(frozen=True)
class GapRatioStats:
    mean_ratio: float
    n_used: int
    skipped: int


def gap_ratio(
    master: PreferenceMatrix, K: int, n_samples: int, seed: int
) -> GapRatioStats:
    """Mean of (Delta / Delta_min)^2 over sampled K-subsets.

    Subsets where every arm is a winner have no suboptimal pair (Delta is
    undefined / infinite) and are skipped with a count, as are tied
    subsets under a tied master.
    """
    rng = Xoshiro256pp(seed)
    total = 0.0
    used = 0
    skipped = 0
    for _ in range(n_samples):
        sub = submatrix(master, _sample_subset(rng, master.K, K))
        if not sub.no_ties():
            skipped += 1
            continue
        gaps = gap_summary(sub)
        if gaps.C == sub.K:
            skipped += 1
            continue
        total += (gaps.big_delta / gaps.delta_min) ** 2
        used += 1
    return GapRatioStats(total / used if used else float("nan"), used, skipped)


_NOTIONS = ("copeland", "borda", "random_walk")


def winner_overlap(masters: list[PreferenceMatrix]) -> dict[str, dict[str, float]]:
    """Pairwise overlap percentages among the three winner notions.

    Overlap for a matrix means the two notions' winner sets intersect; the
    table entry is the percentage of matrices where that happens.
    """
    if not masters:
        raise ValueError("at least one matrix is required")
    sets: dict[str, list[frozenset[int]]] = {n: [] for n in _NOTIONS}
    for m in masters:
        sets["copeland"].append(copeland_winners(m))
        sets["borda"].append(borda_winners(m))
        sets["random_walk"].append(random_walk_winners(m))
    table: dict[str, dict[str, float]] = {}
    n = len(masters)
    for a in _NOTIONS:
        table[a] = {}
        for b in _NOTIONS:
            hits = sum(
                1 for sa, sb in zip(sets[a], sets[b]) if sa & sb
            )
            table[a][b] = 100.0 * hits / n
    return table
