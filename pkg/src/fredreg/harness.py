"""Experiment runner: seeded Monte-Carlo batches over signals, noise, methods.

Presets example1..example4 encode the reference experiments (signal, noise
bound, record length); each run synthesizes a dataset per seed, applies the
requested reconstruction methods, and records relative L2 errors on the grid
together with the cutoff indices and the selection report.  Outputs are
plain CSV/JSON and byte-deterministic for a fixed config.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .eigensystem import analytic_eigensystem, simpson_grid
from .selection import SelectionReport, build_selection, reconstruct_bhat
from .spectral import cumulative_profile, f0_approximation
from .synthesis import (
    NoisyDataset,
    SignalSpec,
    evaluate_signal,
    forward_coeffs,
    noise_dispersion,
    snr_db,
    synthesize_dataset,
    write_coeffs_csv,
)
from .variational import (
    ConstraintSpec,
    RegularizedSolution,
    VarianceProfile,
    best_linear_estimate,
    tikhonov_full,
    tikhonov_identity,
    truncated_k_alpha,
    truncated_k_beta,
)

__all__ = [
    "ExperimentConfig",
    "RunRecord",
    "ALL_METHODS",
    "preset",
    "PRESETS",
    "run_experiment",
    "summarize",
    "emit_outputs",
    "config_hash",
]

ALL_METHODS = ("tikhonov_full", "k_alpha", "tikhonov_identity", "k_beta", "blp", "f0", "bhat")


@dataclass(frozen=True)
class ExperimentConfig:
    signal: SignalSpec
    epsilon: float
    n_coeff: int = 512
    grid_size: int = 513
    n_max: int = 64  # reconstruction expansions truncate here; the record keeps n_coeff
    seeds: tuple[int, ...] = (0,)
    methods: tuple[str, ...] = ALL_METHODS
    E_override: float | None = None
    c1_override: float | None = None
    dispersion_mode: str = "eps_over_sqrt3"
    noise_mode: str = "coefficient"
    output_dir: str | None = None
    name: str = "experiment"

    def __post_init__(self):
        if self.grid_size < 65 or self.grid_size % 2 == 0:
            raise ValueError("grid_size must be odd and >= 65")
        if self.n_coeff < 1 or self.n_max < 1:
            raise ValueError("n_coeff and n_max must be >= 1")
        if not self.seeds:
            raise ValueError("seeds must be nonempty")
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        bad = set(self.methods) - set(ALL_METHODS)
        if bad:
            raise ValueError(f"unknown methods {sorted(bad)}; choose from {ALL_METHODS}")
        if self.dispersion_mode not in ("eps_over_sqrt3", "eps"):
            raise ValueError("dispersion_mode must be 'eps_over_sqrt3' or 'eps'")
        if self.noise_mode not in ("coefficient", "pointwise"):
            raise ValueError("noise_mode must be 'coefficient' or 'pointwise'")

    @staticmethod
    def seed_range(base_seed: int, count: int) -> tuple[int, ...]:
        return tuple(range(base_seed, base_seed + count))

    def dispersion(self) -> float:
        if self.dispersion_mode == "eps":
            return self.epsilon
        return noise_dispersion(self.epsilon)

    def to_json_dict(self, include_output_dir: bool = False) -> dict:
        # output_dir is a runtime destination, not part of the experiment
        # identity: leaving it out keeps outputs byte-identical across
        # destinations and makes the config hash destination-free
        d = {
            "name": self.name,
            "signal": self.signal.to_json_dict(),
            "epsilon": self.epsilon,
            "n_coeff": self.n_coeff,
            "grid_size": self.grid_size,
            "n_max": self.n_max,
            "seeds": list(self.seeds),
            "methods": list(self.methods),
            "E_override": self.E_override,
            "c1_override": self.c1_override,
            "dispersion_mode": self.dispersion_mode,
            "noise_mode": self.noise_mode,
        }
        if include_output_dir:
            d["output_dir"] = self.output_dir
        return d

    @staticmethod
    def from_json_dict(d: dict) -> "ExperimentConfig":
        return ExperimentConfig(
            signal=SignalSpec.from_json_dict(d["signal"]),
            epsilon=float(d["epsilon"]),
            n_coeff=int(d.get("n_coeff", 512)),
            grid_size=int(d.get("grid_size", 513)),
            n_max=int(d.get("n_max", 64)),
            seeds=tuple(d.get("seeds", [0])),
            methods=tuple(d.get("methods", ALL_METHODS)),
            E_override=d.get("E_override"),
            c1_override=d.get("c1_override"),
            dispersion_mode=d.get("dispersion_mode", "eps_over_sqrt3"),
            noise_mode=d.get("noise_mode", "coefficient"),
            output_dir=d.get("output_dir"),
            name=d.get("name", "experiment"),
        )


def config_hash(cfg: ExperimentConfig) -> str:
    canonical = json.dumps(cfg.to_json_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def preset(name: str, seeds: Iterable[int] = (0,), output_dir: str | None = None) -> ExperimentConfig:
    """Figure-legend experiment configurations."""
    table = {
        "example1": (SignalSpec.named("f1"), 1e-4, 512),
        "example2": (SignalSpec.named("f2"), 3e-3, 512),
        "example3": (SignalSpec.named("f3"), 1e-3, 1024),
        "example4": (SignalSpec.named("f4"), 1e-4, 512),
    }
    if name not in table:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(table)}")
    signal, epsilon, n_coeff = table[name]
    return ExperimentConfig(
        signal=signal, epsilon=epsilon, n_coeff=n_coeff,
        seeds=tuple(seeds), output_dir=output_dir, name=name,
    )


PRESETS = ("example1", "example2", "example3", "example4")


@dataclass
class RunRecord:
    seed: int
    snr_db: float
    rel_l2: dict[str, float] = field(default_factory=dict)
    failures: dict[str, str] = field(default_factory=dict)
    k_alpha: int | None = None
    k_beta: int | None = None
    k0: int | None = None
    selection: SelectionReport | None = None
    solutions: dict[str, RegularizedSolution] = field(default_factory=dict)
    wall_time_s: float = 0.0  # not serialized: outputs stay byte-deterministic

    def to_json_dict(self) -> dict:
        d = {
            "seed": self.seed,
            "snr_db": self.snr_db,
            "rel_l2": self.rel_l2,
            "failures": self.failures,
            "k_alpha": self.k_alpha,
            "k_beta": self.k_beta,
            "k0": self.k0,
        }
        if self.selection is not None:
            d["selection"] = self.selection.to_json_dict()
        return d


def _run_one_seed(cfg, es_data, es, grid, f_vals, f_norm, seed) -> tuple[RunRecord, NoisyDataset]:
    # es_data spans the full record for synthesis; es is the truncated
    # reconstruction basis (coefficients beyond it are noise-dominated)
    t0 = time.perf_counter()
    ds, _, _ = synthesize_dataset(
        cfg.signal, es_data, grid, cfg.epsilon, seed, cfg.n_coeff, cfg.noise_mode
    )
    d_eps = cfg.dispersion()
    E = cfg.E_override if cfg.E_override is not None else f_norm
    # 1e-9 headroom: quadrature-level Parseval rounding must not truncate the
    # last in-budget component of a noiseless band-limited record
    c1 = cfg.c1_override if cfg.c1_override is not None else f_norm**2 * (1.0 + 1e-9)
    record = RunRecord(seed=seed, snr_db=float("nan"))

    def errored(name: str, exc: Exception) -> None:
        record.failures[name] = f"{type(exc).__name__}: {exc}"

    for name in cfg.methods:
        try:
            if name == "tikhonov_full":
                sol = tikhonov_full(ds, es, ConstraintSpec(E=E, eps=d_eps))
            elif name == "k_alpha":
                sol = truncated_k_alpha(ds, es, ConstraintSpec(E=E, eps=d_eps))
                record.k_alpha = int(sol.params["k_alpha"])
            elif name == "tikhonov_identity":
                sol = tikhonov_identity(ds, es, E, d_eps)
            elif name == "k_beta":
                sol = truncated_k_beta(ds, es, E, d_eps)
                record.k_beta = int(sol.params["k_beta"])
            elif name == "blp":
                n = min(es.count, ds.n_coeff)
                vp = VarianceProfile(rho=np.full(n, E), nu=np.ones(n), eps=d_eps)
                sol = best_linear_estimate(ds, es, vp)
            elif name == "f0":
                sol = f0_approximation(ds, es, c1)
                record.k0 = int(sol.params["k0"])
            elif name == "bhat":
                report = build_selection(ds)
                record.selection = report
                sol = reconstruct_bhat(ds, es, report)
            else:  # pragma: no cover - guarded by config validation
                raise ValueError(name)
        except Exception as exc:
            errored(name, exc)
            continue
        record.solutions[name] = sol
        err = grid.norm(sol.to_grid(es, grid) - f_vals) / f_norm
        record.rel_l2[name] = float(err)
    record.wall_time_s = time.perf_counter() - t0
    return record, ds


def run_experiment(cfg: ExperimentConfig) -> list[RunRecord]:
    """Deterministic batch: per seed, synthesize, run each method, score errors.

    Per-method failures are recorded on the RunRecord, never fatal to the batch.
    """
    grid = simpson_grid(cfg.grid_size)
    es_data = analytic_eigensystem(cfg.n_coeff)
    es = analytic_eigensystem(min(cfg.n_max, cfg.n_coeff))
    f_vals = evaluate_signal(cfg.signal, grid)
    f_norm = grid.norm(f_vals)
    if f_norm == 0 and cfg.E_override is None:
        f_norm = 1.0  # zero signal: errors become absolute, bounds need overrides
    g_coeffs = forward_coeffs(f_vals, es_data, grid, cfg.n_coeff)
    base_snr = snr_db(g_coeffs, cfg.epsilon) if cfg.epsilon > 0 else float("inf")
    records = []
    for seed in cfg.seeds:
        record, _ = _run_one_seed(cfg, es_data, es, grid, f_vals, f_norm, seed)
        record.snr_db = base_snr
        records.append(record)
    return records


def _median_iqr(values: list[float]) -> dict:
    arr = np.asarray(values, dtype=float)
    return {
        "n": int(arr.size),
        "median": float(np.median(arr)),
        "q25": float(np.percentile(arr, 25)),
        "q75": float(np.percentile(arr, 75)),
    }


def _modal(items: list[tuple]) -> tuple[tuple, float]:
    from collections import Counter

    counts = Counter(items)
    value, hits = counts.most_common(1)[0]
    return value, hits / len(items)


def summarize(records: list[RunRecord], true_support: tuple[int, ...] | None = None) -> dict:
    """Per-method error statistics plus selection diagnostics for "bhat"."""
    if not records:
        raise ValueError("summarize needs at least one record")
    methods: dict[str, list[float]] = {}
    for rec in records:
        for name, err in rec.rel_l2.items():
            methods.setdefault(name, []).append(err)
    out: dict = {
        "n_seeds": len(records),
        "snr_db": records[0].snr_db,
        "methods": {name: _median_iqr(vals) for name, vals in methods.items()},
    }
    cutoffs = {}
    for attr in ("k_alpha", "k_beta", "k0"):
        vals = [getattr(r, attr) for r in records if getattr(r, attr) is not None]
        if vals:
            cutoffs[attr] = _median_iqr([float(v) for v in vals])
    if cutoffs:
        out["cutoffs"] = cutoffs
    selections = [r.selection for r in records if r.selection is not None]
    if selections:
        modal_I, frac_I = _modal([tuple(s.I_k) for s in selections])
        modal_Q, frac_Q = _modal([tuple(s.Q) for s in selections])
        modal_n0, frac_n0 = _modal([(s.n0,) for s in selections])
        sel = {
            "modal_I_k": list(modal_I),
            "modal_I_k_fraction": frac_I,
            "modal_Q": list(modal_Q),
            "modal_Q_fraction": frac_Q,
            "modal_n0": modal_n0[0],
            "modal_n0_fraction": frac_n0,
        }
        if true_support is not None:
            hits = sum(1 for s in selections if tuple(s.I_k) == tuple(true_support))
            sel["exact_support_fraction"] = hits / len(selections)
            sel["true_support"] = list(true_support)
        out["selection"] = sel
    return out


def _write_solutions_csv(path: Path, grid, f_vals, record: RunRecord, es) -> None:
    columns = ["x", "f_true"] + sorted(record.solutions)
    grids = {name: sol.to_grid(es, grid) for name, sol in record.solutions.items()}
    with open(path, "w", newline="") as fh:
        fh.write(",".join(columns) + "\n")
        for i, x in enumerate(grid.points):
            row = [repr(float(x)), repr(float(f_vals[i]))]
            row += [repr(float(grids[name][i])) for name in sorted(record.solutions)]
            fh.write(",".join(row) + "\n")


def emit_outputs(records: list[RunRecord], summary: dict, cfg: ExperimentConfig) -> list[Path]:
    """Write per-seed CSVs, summary and manifest JSON under cfg.output_dir.

    Top-level autocorr.csv / profile.csv / solutions.csv / coefficients.csv
    hold the first seed; every seed also gets copies under seeds/<seed>/.
    Returns the list of written paths (also recorded in manifest.json).
    """
    if cfg.output_dir is None:
        raise ValueError("config has no output_dir")
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    grid = simpson_grid(cfg.grid_size)
    es_data = analytic_eigensystem(cfg.n_coeff)
    es = analytic_eigensystem(min(cfg.n_max, cfg.n_coeff))
    f_vals = evaluate_signal(cfg.signal, grid)

    written: list[Path] = []

    def emit_seed(rec: RunRecord, ds: NoisyDataset, into: Path) -> None:
        into.mkdir(parents=True, exist_ok=True)
        write_coeffs_csv(str(into / "coefficients.csv"), ds.coeffs)
        written.append(into / "coefficients.csv")
        profile = cumulative_profile(ds, es_data)
        profile.write_csv(str(into / "profile.csv"))
        written.append(into / "profile.csv")
        if rec.selection is not None:
            rec.selection.write_autocorr_csv(str(into / "autocorr.csv"))
            written.append(into / "autocorr.csv")
        _write_solutions_csv(into / "solutions.csv", grid, f_vals, rec, es)
        written.append(into / "solutions.csv")

    for i, rec in enumerate(records):
        ds, _, _ = synthesize_dataset(
            cfg.signal, es_data, grid, cfg.epsilon, rec.seed, cfg.n_coeff, cfg.noise_mode
        )
        emit_seed(rec, ds, out_dir / "seeds" / str(rec.seed))
        if i == 0:
            emit_seed(rec, ds, out_dir)

    report_path = out_dir / "report.json"
    report_path.write_text(
        json.dumps(
            {"config": cfg.to_json_dict(), "records": [r.to_json_dict() for r in records]},
            indent=2,
        )
    )
    written.append(report_path)
    summary_path = out_dir / "summary.json"
    summary_path.write_text(json.dumps(summary, indent=2))
    written.append(summary_path)

    manifest = {
        "config": cfg.to_json_dict(),
        "config_hash": config_hash(cfg),
        "files": sorted(str(p.relative_to(out_dir)) for p in written),
    }
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2))
    written.append(manifest_path)
    return written
