"""Command-line front end: configured verification suites and one-off queries.

A suite run loads an experiment document (TOML, with JSON fallback), executes
the named suite cell by cell on a worker pool, and writes a CSV report plus a
JSON summary. Runs are reproducible: seeds are mandatory, every cell draws
from a substream keyed by its index, and rows are assembled in cell order, so
identical (config, seed) produce byte-identical outputs regardless of worker
scheduling. QLSI_THREADS caps the pool.

Exit codes: 0 all contracts pass, 2 a contract was violated (the summary
carries the worst offending cell as a witness), 1 operational error.
"""

from __future__ import annotations

import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import click
import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from . import converse as cv
from . import lsi as lsi_mod
from .entropy_dirichlet import (
    ent1_convexity_check,
    ent_p,
    norm_derivative_p,
)
from .errors import ParameterError, QlsiError
from .operator_core import matrix_from_doc
from .rng import substream
from .semigroups import (
    choi_kraus_decomposition,
    generator_from_doc,
)
from .weighted_lp import (
    WeightedSpace,
    check_reverse_holder,
    check_reverse_minkowski,
    holder_variational_check,
    weighted_norm,
)

__all__ = ["ExperimentConfig", "ReportRow", "ReportFile", "run", "emit_plot_data", "main"]

SUITE_NAMES = (
    "norms",
    "entropy",
    "semigroup",
    "lsi-estimate",
    "lsi-verify",
    "sv",
    "hc",
    "rhc",
    "qht",
    "cq",
)

_MACHINE_TOL = 1e-15


@dataclass
class ExperimentConfig:
    """A validated experiment document."""

    suite: str
    seed: int
    out: str = "report"
    samples: int = 200
    starts: int = 16
    beta: float = 0.0
    p_grid: list = field(default_factory=list)
    q_grid: list = field(default_factory=list)
    t_grid: list = field(default_factory=list)
    n_grid: list = field(default_factory=list)
    eps_grid: list = field(default_factory=list)
    generator: dict | None = None
    sigma: dict | None = None
    instance: dict | None = None
    code: dict | None = None
    tolerances: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if "suite" not in raw:
            raise ParameterError("config must name a suite")
        if raw["suite"] not in SUITE_NAMES:
            raise ParameterError(
                f"unknown suite {raw['suite']!r}; choose from {', '.join(SUITE_NAMES)}"
            )
        if "seed" not in raw:
            raise ParameterError("config must carry an explicit seed (no wall-clock seeding)")
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise ParameterError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**{k: raw[k] for k in raw})
        cfg._validate()
        return cfg

    def _validate(self) -> None:
        self.seed = int(self.seed)
        self.samples = int(self.samples)
        self.starts = int(self.starts)
        if self.samples < 1:
            raise ParameterError("samples must be positive")
        for name in ("p_grid", "q_grid", "t_grid", "eps_grid"):
            setattr(self, name, [float(v) for v in getattr(self, name)])
        self.n_grid = [int(v) for v in self.n_grid]
        for check, tol in self.tolerances.items():
            if float(tol) < _MACHINE_TOL:
                raise ParameterError(
                    f"tolerance override for {check!r} is below machine precision"
                )
        needs_grid = {
            "norms": ("p_grid",),
            "entropy": ("p_grid",),
            "semigroup": ("t_grid",),
            "lsi-estimate": ("p_grid",),
            "lsi-verify": ("p_grid",),
            "sv": ("p_grid",),
            "hc": ("p_grid", "q_grid", "t_grid"),
            "rhc": ("p_grid", "q_grid", "t_grid"),
            "qht": ("n_grid", "eps_grid"),
            "cq": (),
        }
        for name in needs_grid[self.suite]:
            if not getattr(self, name):
                raise ParameterError(f"suite {self.suite!r} requires a nonempty {name}")

    def tol(self, check: str, default: float) -> float:
        return float(self.tolerances.get(check, default))


@dataclass(frozen=True)
class ReportRow:
    """One verified cell: the check tag, the measured value, and the verdict."""

    suite: str
    cell: str
    check: str
    value: float
    threshold: float
    passed: bool
    exploratory: bool = False

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "threshold", float(self.threshold))
        object.__setattr__(self, "passed", bool(self.passed))
        object.__setattr__(self, "exploratory", bool(self.exploratory))

    @property
    def value_bits(self) -> float:
        return self.value / math.log(2.0)


@dataclass
class ReportFile:
    rows: list
    csv_path: Path
    json_path: Path
    passed: bool


def _load_doc(path: str) -> dict:
    text = Path(path).read_bytes()
    if path.endswith(".json"):
        return json.loads(text)
    try:
        return tomllib.loads(text.decode())
    except tomllib.TOMLDecodeError:
        return json.loads(text)


def load_config(path: str) -> ExperimentConfig:
    return ExperimentConfig.from_dict(_load_doc(path))


def _space_from_config(cfg: ExperimentConfig) -> WeightedSpace:
    if cfg.sigma is not None:
        return WeightedSpace(matrix_from_doc(cfg.sigma))
    if cfg.generator is not None:
        return WeightedSpace(generator_from_doc(cfg.generator).sigma)
    raise ParameterError(f"suite {cfg.suite!r} requires a sigma or generator document")


def _generator_from_config(cfg: ExperimentConfig):
    if cfg.generator is None:
        raise ParameterError(f"suite {cfg.suite!r} requires a generator document")
    return generator_from_doc(cfg.generator)


def _sample_pair(space, rng):
    x = lsi_mod.sample_definite(space.dim, rng)
    y = lsi_mod.sample_definite(space.dim, rng)
    return x, y


# --- suites ------------------------------------------------------------------


def _suite_norms(cfg: ExperimentConfig) -> list[ReportRow]:
    space = _space_from_config(cfg)
    rows = []
    for i, p in enumerate(sorted(cfg.p_grid)):
        if p == 0:
            raise ParameterError("p = 0 is not a supported exponent")
        if p < 1:
            tol = cfg.tol("reverse-holder", 1e-9)
            worst = math.inf
            worst_mink = math.inf
            for k in range(cfg.samples):
                rng = substream(cfg.seed, i, k)
                x, y = _sample_pair(space, rng)
                worst = min(worst, check_reverse_holder(space, x, y, p))
                worst_mink = min(worst_mink, check_reverse_minkowski(space, x, y, p))
            rows.append(ReportRow(cfg.suite, f"p={p}", "reverse-holder", worst, -tol, worst >= -tol))
            rows.append(
                ReportRow(cfg.suite, f"p={p}", "reverse-minkowski", worst_mink, -tol, worst_mink >= -tol)
            )
        else:
            x = lsi_mod.sample_definite(space.dim, substream(cfg.seed, i, 0))
            ok = holder_variational_check(space, x, p, sample_count=cfg.samples, seed=cfg.seed + i)
            rows.append(
                ReportRow(cfg.suite, f"p={p}", "holder-duality", 1.0 if ok else 0.0, 1.0, ok)
            )
    # monotonicity of the norm in p along the grid
    grid = sorted(cfg.p_grid)
    tol = cfg.tol("norm-monotone-p", 1e-9)
    worst = math.inf
    for k in range(cfg.samples):
        x = lsi_mod.sample_definite(space.dim, substream(cfg.seed, 999, k))
        vals = [weighted_norm(space, x, p) for p in grid]
        for a, b in zip(vals, vals[1:]):
            worst = min(worst, b - a)
    rows.append(ReportRow(cfg.suite, "grid", "norm-monotone-p", worst, -tol, worst >= -tol))
    return rows


def _suite_entropy(cfg: ExperimentConfig) -> list[ReportRow]:
    space = _space_from_config(cfg)
    rows = []
    tol_pos = cfg.tol("entropy-nonneg", 1e-9)
    tol_der = cfg.tol("norm-derivative", 1e-5)
    for i, p in enumerate(sorted(cfg.p_grid)):
        worst = math.inf
        worst_rel = 0.0
        for k in range(cfg.samples):
            rng = substream(cfg.seed, i, k)
            x = lsi_mod.sample_definite(space.dim, rng)
            worst = min(worst, ent_p(space, x, p).value)
            der = norm_derivative_p(space, x, p)
            h = 1e-4
            fd = (weighted_norm(space, x, p + h) - weighted_norm(space, x, p - h)) / (2 * h)
            worst_rel = max(worst_rel, abs(der - fd) / max(abs(fd), 1e-12))
        rows.append(
            ReportRow(cfg.suite, f"p={p}", "entropy-nonneg", worst, -tol_pos, worst >= -tol_pos)
        )
        rows.append(
            ReportRow(cfg.suite, f"p={p}", "norm-derivative", worst_rel, tol_der, worst_rel <= tol_der)
        )
    ok = True
    for k in range(min(cfg.samples, 64)):
        rng = substream(cfg.seed, 777, k)
        x, y = _sample_pair(space, rng)
        ok = ok and ent1_convexity_check(space, x, y, sample_count=4, seed=cfg.seed + k)
    rows.append(ReportRow(cfg.suite, "batch", "ent1-convexity", 1.0 if ok else 0.0, 1.0, ok))
    return rows


def _suite_semigroup(cfg: ExperimentConfig) -> list[ReportRow]:
    gen = _generator_from_config(cfg)
    from .semigroups import vec

    rows = []
    d = gen.dim
    scale = max(1.0, float(np.abs(gen.rep).max()))
    tol = cfg.tol("unitality", 1e-9)
    resid = float(np.abs(gen.rep @ vec(np.eye(d))).max()) / scale
    rows.append(ReportRow(cfg.suite, "generator", "unitality", resid, tol, resid <= tol))
    resid = float(np.abs(gen.rep.conj().T @ vec(gen.sigma.mat)).max()) / scale
    rows.append(ReportRow(cfg.suite, "generator", "stationarity", resid, tol, resid <= tol))

    tol_law = cfg.tol("semigroup-law", 1e-8)
    worst = 0.0
    for k in range(min(cfg.samples, 32)):
        rng = substream(cfg.seed, 1, k)
        x = lsi_mod.sample_definite(d, rng)
        for t in cfg.t_grid:
            lhs = gen.evolve(t / 2.0, gen.evolve(t / 2.0, x))
            rhs = gen.evolve(t, x)
            worst = max(worst, float(np.abs(lhs - rhs).max()) / max(1.0, np.abs(rhs).max()))
    rows.append(ReportRow(cfg.suite, "grid", "semigroup-law", worst, tol_law, worst <= tol_law))

    tol_ck = cfg.tol("choi-kraus", 1e-8)
    if gen.is_strongly_reversible:
        for t in cfg.t_grid:
            if t <= 0:
                continue
            pairs = choi_kraus_decomposition(gen, t)
            x = lsi_mod.sample_definite(d, substream(cfg.seed, 2, int(t * 1000)))
            rec = sum(p.r @ x @ p.r.conj().T for p in pairs)
            resid = float(np.abs(rec - gen.evolve(t, x)).max())
            rows.append(
                ReportRow(cfg.suite, f"t={t}", "choi-kraus", resid, tol_ck, resid <= tol_ck)
            )
    tol_c = cfg.tol("contractivity", 1e-9)
    for i, p in enumerate(sorted(cfg.p_grid) or [2.0]):
        from .semigroups import contractivity_check

        margin = contractivity_check(gen, p, cfg.t_grid, min(cfg.samples, 200), cfg.seed + i)
        rows.append(
            ReportRow(cfg.suite, f"p={p}", "contractivity", margin, -tol_c, margin >= -tol_c)
        )
    return rows


def _suite_lsi_estimate(cfg: ExperimentConfig) -> list[ReportRow]:
    gen = _generator_from_config(cfg)
    space = WeightedSpace(gen.sigma)
    rows = []
    for p in sorted(cfg.p_grid):
        est = lsi_mod.lsi_constant_estimate(
            space, gen, p, starts=cfg.starts, seed=cfg.seed
        )
        consistent = est.value <= est.sampled_floor + 1e-6
        rows.append(
            ReportRow(cfg.suite, f"p={p}", "lsi-constant", est.value, est.sampled_floor, consistent)
        )
    return rows


def _suite_lsi_verify(cfg: ExperimentConfig) -> list[ReportRow]:
    gen = _generator_from_config(cfg)
    space = WeightedSpace(gen.sigma)
    tol = cfg.tol("lsi-inequality", 1e-9)
    grid = sorted(cfg.p_grid)
    # p-cells are independent; fan out and reassemble in grid order
    with ThreadPoolExecutor(max_workers=_max_workers()) as pool:
        worsts = list(
            pool.map(
                lambda p: lsi_mod.lsi_verify(space, gen, p, cfg.beta, cfg.samples, cfg.seed),
                grid,
            )
        )
    return [
        ReportRow(
            cfg.suite, f"p={p}", "lsi-inequality", worst, cfg.beta - tol,
            worst >= cfg.beta - tol,
        )
        for p, worst in zip(grid, worsts)
    ]


def _suite_sv(cfg: ExperimentConfig) -> list[ReportRow]:
    gen = _generator_from_config(cfg)
    space = WeightedSpace(gen.sigma)
    tol = cfg.tol("dirichlet-monotone", 1e-8)
    ok = True
    for k in range(cfg.samples):
        x = lsi_mod.sample_definite(gen.dim, substream(cfg.seed, k))
        x = x / weighted_norm(space, x, 2.0)
        ok = ok and lsi_mod.sv_monotonicity_check(space, gen, x, cfg.p_grid, tol=tol)
    return [ReportRow(cfg.suite, "batch", "dirichlet-monotone", 1.0 if ok else 0.0, 1.0, ok)]


def _hc_cells(cfg: ExperimentConfig, forward: bool):
    for p in cfg.p_grid:
        for q in cfg.q_grid:
            valid = (1.0 <= q <= p) if forward else (p <= q < 1.0)
            if valid:
                for t in cfg.t_grid:
                    yield p, q, t


def _suite_hc(cfg: ExperimentConfig, forward: bool = True) -> list[ReportRow]:
    gen = _generator_from_config(cfg)
    space = WeightedSpace(gen.sigma)
    tol = cfg.tol("hypercontractivity", 1e-9)
    check = lsi_mod.hc_check if forward else lsi_mod.reverse_hc_check
    tag = "hypercontractivity" if forward else "reverse-hypercontractivity"
    cells = list(_hc_cells(cfg, forward))
    if not cells:
        raise ParameterError("no (p, q, t) cell satisfies the suite's exponent regime")
    with ThreadPoolExecutor(max_workers=_max_workers()) as pool:
        reports = list(
            pool.map(
                lambda item: check(
                    space, gen, *item[1], sample_count=cfg.samples, seed=cfg.seed + item[0]
                ),
                enumerate(cells),
            )
        )
    rows = []
    for (p, q, t), rep in zip(cells, reports):
        passed = rep.exploratory or rep.margin >= -tol
        rows.append(
            ReportRow(
                cfg.suite, f"p={p},q={q},t={t}", tag, rep.margin, -tol, passed,
                exploratory=rep.exploratory,
            )
        )
    return rows


def _suite_qht(cfg: ExperimentConfig) -> list[ReportRow]:
    if cfg.instance is None:
        raise ParameterError("qht suite requires an instance document")
    base = cv.instance_from_doc(cfg.instance)
    rows = []
    tol_dom = cfg.tol("type2-dominance", 1e-12)
    tol_state = cfg.tol("test-inequality", 1e-8)
    for n in sorted(cfg.n_grid):
        inst = cv.HypothesisInstance(base.rho, base.sigma, n)
        rho_n, sigma_n = inst.rho_n, inst.sigma_n
        for eps in sorted(cfg.eps_grid):
            cell = f"n={n},eps={eps}"
            beta_opt, _ = cv.np_oracle(base.rho, base.sigma, n, eps)
            bound = cv.beta_lower_bound(inst, eps)
            rows.append(
                ReportRow(cfg.suite, cell, "type2-exact", math.log(beta_opt), 0.0, True)
            )
            rows.append(
                ReportRow(cfg.suite, cell, "type2-bound", math.log(bound), 0.0, True)
            )
            margin = beta_opt - bound
            rows.append(
                ReportRow(cfg.suite, cell, "type2-dominance", margin, -tol_dom, margin >= -tol_dom)
            )
        worst = math.inf
        for k in range(cfg.samples):
            t_rand = cv.random_test(rho_n.shape[0], substream(cfg.seed, n, k))
            tr_r = float(np.real(np.trace(t_rand @ rho_n)))
            tr_s = float(np.real(np.trace(t_rand @ sigma_n)))
            if tr_r <= 0 or tr_s <= 0:
                continue
            worst = min(worst, math.log(tr_s) - cv.qht_bound_rhs(inst, tr_r))
        rows.append(
            ReportRow(cfg.suite, f"n={n}", "test-inequality", worst, -tol_state, worst >= -tol_state)
        )
    return rows


def _suite_cq(cfg: ExperimentConfig) -> list[ReportRow]:
    if cfg.code is None:
        raise ParameterError("cq suite requires a code document")
    code = cv.code_from_doc(cfg.code)
    tol = cfg.tol("cq-rate-bound", 1e-8)
    margin = cv.cq_converse_check(code)
    info = cv.code_mutual_information(code)
    return [
        ReportRow(cfg.suite, "code", "mutual-information", info, 0.0, True),
        ReportRow(cfg.suite, "code", "max-error", float(code.p_max), 1.0, code.p_max <= 1.0),
        ReportRow(cfg.suite, "code", "cq-rate-bound", margin, -tol, margin >= -tol),
    ]


_SUITES = {
    "norms": _suite_norms,
    "entropy": _suite_entropy,
    "semigroup": _suite_semigroup,
    "lsi-estimate": _suite_lsi_estimate,
    "lsi-verify": _suite_lsi_verify,
    "sv": _suite_sv,
    "hc": lambda cfg: _suite_hc(cfg, forward=True),
    "rhc": lambda cfg: _suite_hc(cfg, forward=False),
    "qht": _suite_qht,
    "cq": _suite_cq,
}

_NATS_SUITES = ("qht", "cq")  # their values get a bits column


def _max_workers() -> int:
    env = os.environ.get("QLSI_THREADS")
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def run(cfg: ExperimentConfig) -> ReportFile:
    """Execute the configured suite and write CSV + JSON reports."""
    rows = _SUITES[cfg.suite](cfg)
    passed = all(r.passed for r in rows)
    out = Path(cfg.out)
    csv_path = out.with_suffix(".csv")
    json_path = out.with_suffix(".json")
    _write_csv(cfg, rows, csv_path)
    _write_json(cfg, rows, json_path, passed)
    return ReportFile(rows=rows, csv_path=csv_path, json_path=json_path, passed=passed)


def _write_csv(cfg: ExperimentConfig, rows: list[ReportRow], path: Path) -> None:
    with_bits = cfg.suite in _NATS_SUITES
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        header = ["suite", "cell", "check", "value", "threshold", "passed", "exploratory"]
        if with_bits:
            header.insert(4, "value_bits")
        writer.writerow(header)
        for r in rows:
            record = [
                r.suite,
                r.cell,
                r.check,
                f"{r.value:.12e}",
                f"{r.threshold:.12e}",
                str(r.passed).lower(),
                str(r.exploratory).lower(),
            ]
            if with_bits:
                record.insert(4, f"{r.value_bits:.12e}")
            writer.writerow(record)


def _write_json(cfg: ExperimentConfig, rows, path: Path, passed: bool) -> None:
    payload = {
        "suite": cfg.suite,
        "seed": cfg.seed,
        "passed": passed,
        "rows": [
            {
                "cell": r.cell,
                "check": r.check,
                "value": f"{r.value:.12e}",
                "threshold": f"{r.threshold:.12e}",
                "passed": r.passed,
                "exploratory": r.exploratory,
            }
            for r in rows
        ],
    }
    failing = [r for r in rows if not r.passed]
    if failing:
        worst = min(failing, key=lambda r: r.value - r.threshold)
        payload["witness"] = {
            "cell": worst.cell,
            "check": worst.check,
            "value": f"{worst.value:.12e}",
            "threshold": f"{worst.threshold:.12e}",
        }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def emit_plot_data(report: ReportFile, checks: list[str] | None = None) -> list[tuple]:
    """Reshape a report into long-format (x, y, series) triples."""
    rows = [r for r in report.rows if checks is None or r.check in checks]
    if not rows:
        raise ParameterError("report has no rows to plot")
    return [(r.cell, r.value, r.check) for r in rows]


# --- entry points --------------------------------------------------------------


@click.group()
def main():
    """Verification suites for weighted-norm inequalities, semigroups,
    log-Sobolev constants, and strong-converse bounds."""


@main.command("run")
@click.argument("config_path", type=click.Path(exists=True))
def run_command(config_path):
    """Run the suite described by a TOML/JSON experiment document."""
    try:
        cfg = load_config(config_path)
        report = run(cfg)
    except QlsiError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    for row in report.rows:
        status = "pass" if row.passed else "FAIL"
        extra = " (exploratory)" if row.exploratory else ""
        click.echo(f"[{status}] {row.cell} {row.check} = {row.value:.6e}{extra}")
    click.echo(f"report: {report.csv_path} {report.json_path}")
    sys.exit(0 if report.passed else 2)


@main.command("norms")
@click.option("--sigma", "sigma_path", required=True, type=click.Path(exists=True))
@click.option("--x", "x_path", required=True, type=click.Path(exists=True))
@click.option("--p", type=float, required=True)
def norms_command(sigma_path, x_path, p):
    """Weighted p-norm of X against the state in SIGMA (matrix JSON files)."""
    try:
        space = WeightedSpace(matrix_from_doc(_load_doc(sigma_path)))
        x = matrix_from_doc(_load_doc(x_path))
        click.echo(f"{weighted_norm(space, x, p):.12e}")
    except QlsiError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


@main.command("qht")
@click.option("--instance", "instance_path", required=True, type=click.Path(exists=True))
@click.option("--n", type=int, default=None, help="override the copy count")
@click.option("--eps", type=float, required=True)
def qht_command(instance_path, n, eps):
    """Exact optimal type-II error and its lower bound for an instance."""
    try:
        doc = _load_doc(instance_path)
        if n is not None:
            doc["n"] = n
        inst = cv.instance_from_doc(doc)
        beta_opt, _ = cv.np_oracle(inst.rho, inst.sigma, inst.n, eps)
        bound = cv.beta_lower_bound(inst, eps)
    except QlsiError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(f"beta_exact {beta_opt:.12e}")
    click.echo(f"beta_bound {bound:.12e}")
    click.echo(f"margin {beta_opt - bound:.12e}")
    sys.exit(0 if beta_opt >= bound - 1e-12 else 2)


@main.group("lsi")
def lsi_group():
    """Log-Sobolev constant estimation and verification."""


@lsi_group.command("estimate")
@click.option("--gen", "gen_path", required=True, type=click.Path(exists=True))
@click.option("--p", type=float, default=2.0)
@click.option("--starts", type=int, default=32)
@click.option("--seed", type=int, required=True)
def lsi_estimate_command(gen_path, p, starts, seed):
    """Upper estimate of the p-log-Sobolev constant of a generator."""
    try:
        gen = generator_from_doc(_load_doc(gen_path))
        space = WeightedSpace(gen.sigma)
        est = lsi_mod.lsi_constant_estimate(space, gen, p, starts=starts, seed=seed)
    except QlsiError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(f"estimate {est.value:.12e}")
    click.echo(f"sampled_floor {est.sampled_floor:.12e}")
    click.echo(f"converged {est.converged}")


@main.command("plot-data")
@click.argument("report_json", type=click.Path(exists=True))
@click.option("--out", "out_path", default="plot.csv")
@click.option("--check", "checks", multiple=True, help="restrict to these check tags")
def plot_data_command(report_json, out_path, checks):
    """Reshape a JSON report into plot-ready (x, y, series) CSV rows."""
    try:
        payload = json.loads(Path(report_json).read_text())
        rows = [
            (r["cell"], float(r["value"]), r["check"])
            for r in payload.get("rows", [])
            if not checks or r["check"] in checks
        ]
        if not rows:
            raise ParameterError("report has no rows to plot")
    except (QlsiError, KeyError, json.JSONDecodeError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x", "y", "series"])
        for x, y, series in rows:
            writer.writerow([x, f"{y:.12e}", series])
    click.echo(out_path)


if __name__ == "__main__":
    main()
