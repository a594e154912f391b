"""Synthetic low-rank experiments with CSV output.

Each experiment fixes one set of test matrices (drawn from ``data_seed``)
and runs every algorithm for every target rank ``k`` and every sketch seed.
Three files are written to the output directory:

``runs.csv``
    one row per ``(algorithm, k, seed)``, sorted in that order. Contains
    everything except wall time, so identical configurations give
    byte-identical files.
``timings.csv``
    wall time of each decomposition call (input generation and IO excluded).
``summary.csv``
    per ``(algorithm, k)`` means over seeds of every error column and time.
"""
import csv
import json
import math
import os
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from gcur._parallel import ordered_map
from gcur.errors import GcurError, InputError
from gcur.factors import relative_error
from gcur.linalg import norm as matrix_norm
from gcur.pair import cur_pair, cur_pair_pass_efficient
from gcur.sketch import SketchPlan
from gcur.triplet import cur_triplet, cur_triplet_pass_efficient

ALGORITHMS = ("rand", "pass_efficient")
MATRICES = {"pair": ("A", "B"), "triplet": ("A", "B", "G")}
NORM_CHOICES = {"spectral": ("spectral",), "frobenius": ("frobenius",),
                "both": ("spectral", "frobenius")}

PRESETS = {
    "desk-pair": {"mode": "pair", "dims": {"m": 1000, "d": 800, "n": 500}, "true_rank": 100},
    "desk-triplet": {"mode": "triplet", "dims": {"m": 500, "n": 500, "t": 1000, "d": 1000},
             "true_rank": 100},
}
_DIM_KEYS = {"pair": ("m", "d", "n"), "triplet": ("m", "n", "t", "d")}


def _factor_rng(seed):
    return np.random.Generator(np.random.Philox(int(seed)))


def generate_lowrank_pair(dims, r, seed):
    """``A = A1 @ A2`` (m x n) and ``B = B1 @ B2`` (d x n) with Gaussian factors of inner size r."""
    m, d, n = (dims[key] for key in _DIM_KEYS["pair"]) if isinstance(dims, dict) else dims
    _check_rank(r, (m, d, n))
    rng = _factor_rng(seed)
    a = rng.standard_normal((m, r)) @ rng.standard_normal((r, n))
    b = rng.standard_normal((d, r)) @ rng.standard_normal((r, n))
    return a, b


def generate_lowrank_triplet(dims, r, seed):
    """``A`` (m x n), ``B`` (m x t), ``G`` (d x n), each a product of Gaussian factors."""
    m, n, t, d = (dims[key] for key in _DIM_KEYS["triplet"]) if isinstance(dims, dict) else dims
    _check_rank(r, (m, n, t, d))
    rng = _factor_rng(seed)
    a = rng.standard_normal((m, r)) @ rng.standard_normal((r, n))
    b = rng.standard_normal((m, r)) @ rng.standard_normal((r, t))
    g = rng.standard_normal((d, r)) @ rng.standard_normal((r, n))
    return a, b, g


def _check_rank(r, dims):
    if r < 1 or r > min(dims):
        raise InputError(f"rank {r} must lie in [1, {min(dims)}] for dimensions {dims}")


def generate(mode, dims, r, seed):
    if mode == "pair":
        return generate_lowrank_pair(dims, r, seed)
    if mode == "triplet":
        return generate_lowrank_triplet(dims, r, seed)
    raise InputError(f"unknown mode {mode!r}")


@dataclass
class ExperimentConfig:
    mode: str
    dims: dict
    true_rank: int
    ks: list
    p: int = 5
    seeds: list = field(default_factory=lambda: [0, 1, 2, 3, 4])
    algorithms: list = field(default_factory=lambda: list(ALGORITHMS))
    out: str = "gcur-out"
    data_seed: int = 0
    norm: str = "both"

    def __post_init__(self):
        if self.mode not in MATRICES:
            raise InputError(f"mode must be 'pair' or 'triplet', got {self.mode!r}")
        keys = _DIM_KEYS[self.mode]
        if set(self.dims) != set(keys):
            raise InputError(f"{self.mode} dims need keys {keys}, got {sorted(self.dims)}")
        self.dims = {key: int(self.dims[key]) for key in keys}
        self.ks = [int(k) for k in self.ks]
        self.seeds = [int(s) for s in self.seeds]
        if not self.ks or min(self.ks) < 1:
            raise InputError("k-sweep values must be >= 1")
        if not self.seeds:
            raise InputError("at least one seed is required")
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad or not self.algorithms:
            raise InputError(f"algorithms must be a nonempty subset of {ALGORITHMS}, got {bad}")
        need = max(self.ks) + self.p
        small = {key: v for key, v in self.dims.items() if v < need}
        if small:
            raise InputError(f"dimensions {small} are smaller than max(k)+p={need}")
        if self.norm not in NORM_CHOICES:
            raise InputError(f"norm must be one of {sorted(NORM_CHOICES)}")
        _check_rank(self.true_rank, tuple(self.dims.values()))

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        preset = d.pop("preset", None)
        if preset is not None:
            if preset not in PRESETS:
                raise InputError(f"unknown preset {preset!r}")
            base = json.loads(json.dumps(PRESETS[preset]))
            base.update(d)
            d = base
        try:
            return cls(**d)
        except TypeError as exc:
            raise InputError(f"bad experiment config: {exc}") from None

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            try:
                return cls.from_dict(json.load(fh))
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}: invalid JSON ({exc})") from None

    def norms(self):
        return NORM_CHOICES[self.norm]

    def matrices(self):
        return MATRICES[self.mode]


@dataclass
class RunRecord:
    algorithm: str
    k: int
    l: int  # noqa: E741
    p: int
    seed: int
    status: str
    passes: int
    errors: dict
    wall_time: float = math.nan
    message: str = ""


def _run_columns(config):
    cols = ["algorithm", "k", "l", "p", "seed", "status", "passes"]
    for name in config.matrices():
        for nk in config.norms():
            cols.append(f"err_{name}_{nk}")
    cols.append("message")
    return cols


def _fmt(v):
    return repr(float(v))


def decompose(mode, algorithm, mats, plan):
    """Run one decomposition; returns ``(result, passes)``.

    ``passes`` is ``None`` for the in-memory algorithms, which do not count
    traversals (recorded as 0 in ``runs.csv``).
    """
    if mode == "pair":
        if algorithm == "rand":
            return cur_pair(*mats, plan), None
        res, rep = cur_pair_pass_efficient(*mats, plan)
        return res, rep.passes
    if algorithm == "rand":
        return cur_triplet(*mats, plan), None
    res, rep = cur_triplet_pass_efficient(*mats, plan)
    return res, rep.passes


def _factors_by_name(res, mode):
    out = {"A": res.a_factors, "B": res.b_factors}
    if mode == "triplet":
        out["G"] = res.g_factors
    return out


def _one_run(config, mats, denoms, algorithm, k, seed):
    plan = SketchPlan(k, config.p, seed)
    names = config.matrices()
    errors = {(nm, nk): math.nan for nm in names for nk in config.norms()}
    t0 = time.perf_counter()
    try:
        res, passes = decompose(config.mode, algorithm, mats, plan)
    except GcurError as exc:
        wall = time.perf_counter() - t0
        return RunRecord(algorithm, k, plan.l, config.p, seed, "failed", 0, errors, wall, str(exc))
    wall = time.perf_counter() - t0
    if passes is None:
        passes = 0
    facs = _factors_by_name(res, config.mode)
    for nm, src in zip(names, mats):
        approx = facs[nm].approximation()
        for nk in config.norms():
            errors[(nm, nk)] = matrix_norm(src - approx, nk) / denoms[(nm, nk)]
    return RunRecord(algorithm, k, plan.l, config.p, seed, "ok", passes, errors, wall)


def run_experiment(config, write=True):
    """Run the sweep; returns ``(records, summary_rows)`` and writes the CSVs."""
    mats = generate(config.mode, config.dims, config.true_rank, config.data_seed)
    denoms = {(nm, nk): matrix_norm(src, nk)
              for nm, src in zip(config.matrices(), mats) for nk in config.norms()}
    tasks = [(alg, k, seed) for alg in sorted(config.algorithms)
             for k in sorted(config.ks) for seed in sorted(config.seeds)]
    records = ordered_map(lambda t: _one_run(config, mats, denoms, *t), tasks)
    summary = summarize(records, config)
    if write:
        write_outputs(config, records, summary)
    return records, summary


def summarize(records, config):
    groups = {}
    for rec in records:
        groups.setdefault((rec.algorithm, rec.k), []).append(rec)
    rows = []
    for (alg, k), recs in sorted(groups.items()):
        ok = [r for r in recs if r.status == "ok"]
        row = {"algorithm": alg, "k": k, "l": recs[0].l, "p": recs[0].p,
               "runs": len(recs), "ok": len(ok)}
        for nm in config.matrices():
            for nk in config.norms():
                vals = [r.errors[(nm, nk)] for r in ok]
                row[f"mean_err_{nm}_{nk}"] = float(np.mean(vals)) if vals else math.nan
        row["mean_passes"] = float(np.mean([r.passes for r in ok])) if ok else math.nan
        row["mean_wall_time"] = float(np.mean([r.wall_time for r in ok])) if ok else math.nan
        rows.append(row)
    return rows


def write_outputs(config, records, summary):
    try:
        os.makedirs(config.out, exist_ok=True)
        cols = _run_columns(config)
        with open(os.path.join(config.out, "runs.csv"), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(cols)
            for rec in records:
                row = [rec.algorithm, rec.k, rec.l, rec.p, rec.seed, rec.status, rec.passes]
                row += [_fmt(rec.errors[(nm, nk)]) for nm in config.matrices() for nk in config.norms()]
                row.append(rec.message)
                w.writerow(row)
        with open(os.path.join(config.out, "timings.csv"), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["algorithm", "k", "seed", "wall_time"])
            for rec in records:
                w.writerow([rec.algorithm, rec.k, rec.seed, _fmt(rec.wall_time)])
        with open(os.path.join(config.out, "summary.csv"), "w", newline="") as fh:
            if summary:
                w = csv.DictWriter(fh, fieldnames=list(summary[0]), lineterminator="\n")
                w.writeheader()
                for row in summary:
                    w.writerow({key: _fmt(v) if isinstance(v, float) else v for key, v in row.items()})
        with open(os.path.join(config.out, "config.json"), "w") as fh:
            json.dump(asdict(config), fh, indent=2, sort_keys=True)
    except OSError as exc:
        raise InputError(f"cannot write experiment output to {config.out!r}: {exc}") from None


def read_runs(out_dir):
    """Parse ``runs.csv`` (joined with ``timings.csv`` when present) back into RunRecords."""
    timings = {}
    tpath = os.path.join(out_dir, "timings.csv")
    if os.path.exists(tpath):
        with open(tpath, newline="") as fh:
            for row in csv.DictReader(fh):
                timings[(row["algorithm"], int(row["k"]), int(row["seed"]))] = float(row["wall_time"])
    out = []
    with open(os.path.join(out_dir, "runs.csv"), newline="") as fh:
        for row in csv.DictReader(fh):
            errors = {}
            for key, v in row.items():
                if key.startswith("err_"):
                    _, nm, nk = key.split("_", 2)
                    errors[(nm, nk)] = float(v)
            key = (row["algorithm"], int(row["k"]), int(row["seed"]))
            out.append(RunRecord(
                algorithm=row["algorithm"], k=int(row["k"]), l=int(row["l"]), p=int(row["p"]),
                seed=int(row["seed"]), status=row["status"], passes=int(row["passes"]),
                errors=errors, wall_time=timings.get(key, math.nan), message=row["message"],
            ))
    return out


def read_summary(out_dir):
    with open(os.path.join(out_dir, "summary.csv"), newline="") as fh:
        rows = []
        for row in csv.DictReader(fh):
            conv = {}
            for key, v in row.items():
                if key in ("algorithm",):
                    conv[key] = v
                elif key in ("k", "l", "p", "runs", "ok"):
                    conv[key] = int(v)
                else:
                    conv[key] = float(v)
            rows.append(conv)
    return rows
