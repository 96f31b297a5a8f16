"""Command line runner: ``tfmf <experiment> --config FILE``.

Every experiment reads one JSON config, writes CSV/JSON (and optionally
binary phase-space) files to the output directory and exits 0 when all of its
checks pass, 1 when a check fails and 2 when the config is invalid.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import io
from .errors import ConfigurationError, IterationError, PreconditionError
from .fields import CATALOG, ExternalFields, normalized_density
from .manybody import (
    CSV_HEADER,
    convergence_experiment,
    exact_ground_state_small,
    hf_exchange,
    lieb_oxford_check,
    rhf_minimize,
)
from .phasespace import Density, PhaseGrid, Scaling, SpatialGrid
from .semiclassic import (
    CoherentWindow,
    factorization_defect,
    husimi1,
    husimi2_summary,
    husimi_density_marginals,
    kinetic_identity_check,
    l1_distance,
    oscillator_state,
    resolution_identity_check,
    wigner1,
    wigner_husimi_convolution_check,
)
from .spectral import OneBodyDensityMatrix, build_magnetic_dirichlet, lowest_n_projector, weyl_report
from .tf import TFProblem, build_m_rho, subadditivity_check, tf_energy, tf_minimize
from .vlasov import bathtub_optimality_check, dilated_competitor, mollified_competitor, vlasov_energy

log = logging.getLogger("tfmeanfield")

EXPERIMENTS = (
    "tf-solve",
    "vlasov-check",
    "weyl",
    "husimi",
    "wigner",
    "check-identities",
    "rhf-converge",
    "lieb-oxford",
    "exact-small",
)

_PROFILE = {
    "type": "object",
    "properties": {
        "name": {"enum": sorted(CATALOG)},
        "params": {"type": "object", "additionalProperties": {"type": ["number", "integer"]}},
    },
    "required": ["name"],
    "additionalProperties": False,
}

_WINDOW = {
    "type": "object",
    "properties": {"kind": {"enum": ["gaussian", "sech", "cos2"]}, "scale": {"type": "number", "exclusiveMinimum": 0}},
    "required": ["kind"],
    "additionalProperties": False,
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "experiment": {"enum": list(EXPERIMENTS)},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "grid": {
            "type": "object",
            "properties": {
                "d": {"enum": [1, 2, 3]},
                "R": {"type": "number", "exclusiveMinimum": 0},
                "n": {"type": "integer", "minimum": 2},
                "pmax": {"type": "number", "exclusiveMinimum": 0},
                "n_p": {"type": "integer", "minimum": 2},
            },
            "required": ["d", "R", "n"],
            "additionalProperties": False,
        },
        "scaling": {
            "type": "object",
            "properties": {
                "N": {"type": "integer", "minimum": 1},
                "N_list": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
                "lam": {"type": "number", "exclusiveMinimum": 0},
            },
            "additionalProperties": False,
        },
        "fields": {
            "type": "object",
            "properties": {"V": _PROFILE, "A": _PROFILE, "w": _PROFILE, "rho": _PROFILE},
            "additionalProperties": False,
        },
        "solver": {
            "type": "object",
            "properties": {
                "mixing": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "max_iter": {"type": "integer", "minimum": 1},
                "tol": {"type": "number", "exclusiveMinimum": 0},
                "extrapolate": {"type": "boolean"},
                "basis_size": {"type": "integer", "minimum": 2, "maximum": 40},
            },
            "additionalProperties": False,
        },
        "options": {
            "type": "object",
            "properties": {
                "windows": {"type": "array", "items": _WINDOW, "minItems": 1, "maxItems": 2},
                "state": {"enum": ["oscillator", "ground"]},
                "lambdas": {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1}},
                "K": {"type": "integer", "minimum": 1},
                "configurations": {"type": "integer", "minimum": 1},
                "f_sigma": {"type": "number", "exclusiveMinimum": 0},
                "dilation": {"type": "number", "minimum": 1},
                "mollifier": {"type": "number", "exclusiveMinimum": 0},
            },
            "additionalProperties": False,
        },
        "output": {
            "type": "object",
            "properties": {
                "dir": {"type": "string"},
                "formats": {"type": "array", "items": {"enum": ["csv", "json", "bin"]}, "uniqueItems": True},
            },
            "additionalProperties": False,
        },
    },
    "required": ["grid", "scaling"],
    "additionalProperties": False,
}


class ConfigError(Exception):
    """Invalid config; the message is already line-anchored."""


def _line_of(text: str, path) -> int:
    pos = 0
    for part in path:
        if isinstance(part, str):
            hit = text.find(f'"{part}"', pos)
            if hit < 0:
                break
            pos = hit
    return text.count("\n", 0, pos) + 1


def load_config(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}:1: error: cannot read config ({exc.strerror})") from None
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: error: {exc.msg}") from None
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        lines = []
        for err in errors:
            where = "/".join(map(str, err.absolute_path)) or "<root>"
            lines.append(f"{path}:{_line_of(text, err.absolute_path)}: error: {where}: {err.message}")
        raise ConfigError("\n".join(lines))
    sc = cfg["scaling"]
    if "N" not in sc and "N_list" not in sc:
        raise ConfigError(f"{path}:{_line_of(text, ['scaling'])}: error: scaling: needs 'N' or 'N_list'")
    return cfg


# ---------------------------------------------------------------------------
# helpers


class Context:
    def __init__(self, cfg: dict, out: Path, seed: int, threads: int):
        self.cfg, self.out, self.seed, self.threads = cfg, out, seed, threads
        g = cfg["grid"]
        self.grid = SpatialGrid(int(g["d"]), float(g["R"]), int(g["n"]))
        self.formats = set(cfg.get("output", {}).get("formats", ["csv", "json"]))
        self.options = cfg.get("options", {})
        self.solver = cfg.get("solver", {})
        self.failures: list[str] = []

    @property
    def N_list(self) -> list[int]:
        sc = self.cfg["scaling"]
        return sorted(int(n) for n in sc.get("N_list", [sc.get("N")]))

    def profile(self, key, default="zero"):
        entry = self.cfg.get("fields", {}).get(key, {"name": default})
        return entry["name"], dict(entry.get("params", {}))

    def fields(self) -> ExternalFields:
        return ExternalFields.from_catalog(self.grid, V=self.profile("V"), A=self.profile("A"), w=self.profile("w"))

    def windows(self) -> list[CoherentWindow]:
        specs = self.options.get("windows", [{"kind": "gaussian"}])
        return [CoherentWindow(w["kind"], float(w.get("scale", 1.0)), d=self.grid.d) for w in specs]

    def tf_kwargs(self) -> dict:
        kw = {}
        if "mixing" in self.solver:
            kw["mixing"] = self.solver["mixing"]
        if "max_iter" in self.solver:
            kw["max_iter"] = self.solver["max_iter"]
        if "tol" in self.solver:
            kw["tol"] = self.solver["tol"]
        return kw

    def state(self, N: int) -> OneBodyDensityMatrix:
        if self.options.get("state", "oscillator") == "oscillator":
            return oscillator_state(self.grid, N)
        op = build_magnetic_dirichlet(self.grid, Scaling(N, self.grid.d).hbar, self.fields().A, self.fields().V)
        return lowest_n_projector(op, N)

    def csv(self, name, header, rows):
        if "csv" in self.formats:
            io.write_csv(self.out / name, header, rows)

    def json(self, name, payload):
        if "json" in self.formats:
            io.write_json(self.out / name, payload)

    def check(self, criterion: str, ok: bool, detail: str = ""):
        status = "pass" if ok else "FAIL"
        log.info("%s %s %s", status, criterion, detail)
        if not ok:
            self.failures.append(f"{criterion}{': ' + detail if detail else ''}")


def _non_increasing(values, slack=0.0) -> bool:
    return all(b <= a * (1 + slack) + 1e-15 for a, b in zip(values, values[1:]))


def _strictly_decreasing(values) -> bool:
    return all(b < a for a, b in zip(values, values[1:]))


def _phase_grid(ctx: Context, hbar: float | None = None) -> PhaseGrid:
    g = ctx.cfg["grid"]
    if hbar is not None:
        return PhaseGrid.for_hbar(ctx.grid, hbar)
    pmax = float(g.get("pmax", 4.0))
    return PhaseGrid(ctx.grid, pmax, int(g.get("n_p", ctx.grid.n)))


# ---------------------------------------------------------------------------
# experiments


def run_tf_solve(ctx: Context):
    lam = float(ctx.cfg["scaling"].get("lam", 1.0))
    fields = ctx.fields()
    sol = tf_minimize(TFProblem(fields, lam), **ctx.tf_kwargs())
    ctx.json(
        "tf_solution.json",
        {
            "mu": sol.mu,
            "energy": sol.energy,
            "mass": sol.rho.mass,
            "iterations": sol.iterations,
            "residual": sol.residual,
            "lam": lam,
            "grid": {"d": ctx.grid.d, "R": ctx.grid.R, "n": ctx.grid.n},
        },
    )
    coords = [c.ravel() for c in ctx.grid.coords()]
    header = [f"x{i + 1}" for i in range(ctx.grid.d)] + ["rho"]
    ctx.csv("tf_density.csv", header, zip(*coords, sol.rho.values.ravel()))
    ctx.check("tf residual", sol.residual <= ctx.solver.get("tol", 1e-7), f"{sol.residual:.3e}")
    ctx.check("tf mass", abs(sol.rho.mass - lam) <= 1e-8 * lam, f"{sol.rho.mass!r}")
    if "lambdas" in ctx.options:
        rows = subadditivity_check(TFProblem(fields, 1.0), ctx.options["lambdas"], **ctx.tf_kwargs())
        ctx.csv("tf_subadditivity.csv", ["lambda", "e1", "e_split", "holds"], ([r["lambda"], r["e1"], r["e_split"], r["holds"]] for r in rows))


def run_vlasov_check(ctx: Context):
    fields = ctx.fields()
    sol = tf_minimize(TFProblem(fields), **ctx.tf_kwargs())
    phase = _phase_grid(ctx)
    m_rho = build_m_rho(sol.rho, fields.A, phase)
    e_m = vlasov_energy(m_rho, fields)
    e_tf = tf_energy(sol.rho, TFProblem(fields))
    s = float(ctx.options.get("dilation", 1.1))
    sigma = float(ctx.options.get("mollifier", 4 * phase.h_p))
    comps = {"identity": m_rho, f"dilation {s:g}": dilated_competitor(m_rho, s), f"mollifier {sigma:g}": mollified_competitor(m_rho, sigma)}
    rep = bathtub_optimality_check(sol.rho, fields, list(comps.values()), phase)
    rows = [[name, e, mg, mg >= -rep.tol] for name, e, mg in zip(comps, rep.energies, rep.margins)]
    ctx.csv("vlasov_check.csv", ["competitor", "energy", "margin", "pass"], rows)
    ctx.json("vlasov_summary.json", {"vlasov_energy_m_rho": e_m, "tf_energy": e_tf, "relative_gap": abs(e_m - e_tf) / abs(e_tf)})
    ctx.check("vlasov energy of m_rho matches tf energy", abs(e_m - e_tf) <= 1e-2 * abs(e_tf), f"{e_m!r} vs {e_tf!r}")
    ctx.check("bathtub optimality", rep.passed, f"margins {rep.margins}")


def run_weyl(ctx: Context):
    name, params = ctx.profile("rho", "cos2_bump")
    rho = Density(ctx.grid, normalized_density(name, ctx.grid, **params))
    A = ctx.fields().A
    rows = weyl_report(rho, ctx.N_list, A=A if np.any(A) else None)
    header = ["N", "hbar", "count_ratio", "count_target", "count_error", "kinetic", "kinetic_target", "kinetic_error", "sup_density", "c_obs"]
    ctx.csv("weyl.csv", header, ([r.N, r.hbar, r.count_ratio, r.count_target, r.count_error, r.kinetic, r.kinetic_target, r.kinetic_error, r.sup_density, r.c_obs] for r in rows))
    last = rows[-1]
    ctx.check("weyl count within 10%", last.count_error <= 0.1, f"{last.count_error:.3e}")
    ctx.check("weyl kinetic within 10%", last.kinetic_error <= 0.1, f"{last.kinetic_error:.3e}")
    ctx.check("weyl count improving", _non_increasing([r.count_error for r in rows]))
    ctx.check("weyl kinetic improving", _non_increasing([r.kinetic_error for r in rows]))


def run_husimi(ctx: Context):
    wins = ctx.windows()
    if len(wins) == 1:
        wins.append(CoherentWindow("sech", d=ctx.grid.d))
    fields = ctx.fields()
    sol = tf_minimize(TFProblem(fields), **ctx.tf_kwargs())
    rows, m_last = [], None
    for N in ctx.N_list:
        hbar = Scaling(N, ctx.grid.d).hbar
        phase = PhaseGrid.for_hbar(ctx.grid, hbar)
        gam = ctx.state(N)
        m1 = husimi1(gam, wins[0], phase)
        target = build_m_rho(sol.rho, fields.A, phase)
        dist = l1_distance(m1, target)
        defect = factorization_defect(gam, wins[0], phase)
        disc = l1_distance(m1, husimi1(gam, wins[1], phase))
        rows.append([N, hbar, m1.mass, dist, defect, disc])
        m_last = m1
    ctx.csv("husimi.csv", ["N", "hbar", "mass", "l1_to_m_rho", "factorization_defect", "window_discrepancy"], rows)
    if "bin" in ctx.formats and m_last is not None:
        io.write_phase_binary(ctx.out / "husimi_m1.bin", m_last)
    ctx.check("husimi distance to m_rho decreasing", _strictly_decreasing([r[3] for r in rows]))
    ctx.check("factorization defect decreasing", _strictly_decreasing([r[4] for r in rows]))
    ctx.check("window discrepancy decreasing", _strictly_decreasing([r[5] for r in rows]))


def run_wigner(ctx: Context):
    rows, w_last = [], None
    for N in ctx.N_list:
        sc = Scaling(N, ctx.grid.d)
        phase = PhaseGrid.for_hbar(ctx.grid, sc.hbar)
        gam = ctx.state(N)
        W = wigner1(gam, sc, phase)
        mass = float(W.values.sum() * phase.weight)
        rep = wigner_husimi_convolution_check(gam, sc, phase)
        rows.append([N, sc.hbar, mass, float(W.values.min()), rep.error])
        w_last = W
        ctx.check(f"wigner mass N={N}", abs(mass - (2 * np.pi) ** ctx.grid.d) <= 1e-6 * (2 * np.pi) ** ctx.grid.d, repr(mass))
        ctx.check(f"wigner-husimi convolution N={N}", rep.passed, f"{rep.error:.3e}")
    ctx.csv("wigner.csv", ["N", "hbar", "mass", "min_value", "convolution_error"], rows)
    if "bin" in ctx.formats and w_last is not None:
        io.write_phase_binary(ctx.out / "wigner_w1.bin", w_last)


def run_check_identities(ctx: Context):
    rng = np.random.default_rng(ctx.seed)
    fields = ctx.fields()
    A = fields.A if np.any(fields.A) else None
    rows = []

    def record(name, N, window, error, tol):
        ok = bool(error <= tol)
        rows.append([name, N, window, error, tol, "pass" if ok else "fail"])
        ctx.check(f"{name} N={N} window={window}", ok, f"{error:.3e}")

    for N in ctx.N_list:
        sc = Scaling(N, ctx.grid.d)
        phase = PhaseGrid.for_hbar(ctx.grid, sc.hbar)
        gam = ctx.state(N)
        for win in ctx.windows():
            label = f"{win.kind}:{win.scale:g}"
            m1 = husimi1(gam, win, phase)
            v = m1.values
            record("m1 bounds", N, label, max(0.0, -v.min(), v.max() - 1), 1e-8)
            record("m1 normalization", N, label, abs(m1.mass - N * sc.hbar**ctx.grid.d) / (N * sc.hbar**ctx.grid.d), 1e-6)
            for rep in husimi_density_marginals(m1, gam, win):
                record(rep.name, N, label, rep.error, rep.tol)
            if N >= 2 and phase.xgrid.size**2 <= 2**14:
                s2 = husimi2_summary(gam, win, phase)
                record("m2 bounds", N, label, max(0.0, -s2["min"], s2["max"] - 1), 1e-8)
                record("m2 normalization", N, label, abs(s2["mass"] - s2["mass_target"]) / s2["mass_target"], 1e-6)
                record("m2 marginal", N, label, s2["marginal_error"], 1e-6)
                record("m2 symmetry", N, label, s2["symmetry_error"], 1e-12)
            rep = kinetic_identity_check(gam, win, phase, m1=m1)
            record(rep.name, N, label, rep.error, rep.tol)
            if A is not None:
                rep = kinetic_identity_check(gam, win, phase, A=A, m1=m1)
                record(rep.name, N, label, rep.error, rep.tol)
            probe = rng.standard_normal(ctx.grid.shape) + 1j * rng.standard_normal(ctx.grid.shape)
            if ctx.grid.size <= 256:
                err = max(resolution_identity_check(win, phase, [probe]))
                record("resolution of identity", N, label, err, 1e-10)
        if ctx.grid.d == 1:
            W = wigner1(gam, sc, phase)
            mass = float(W.values.sum() * phase.weight)
            record("wigner mass", N, "-", abs(mass - 2 * np.pi) / (2 * np.pi), 1e-6)
            rep = wigner_husimi_convolution_check(gam, sc, phase)
            record(rep.name, N, "gaussian:1", rep.error, rep.tol)
    ctx.csv("identities.csv", ["identity", "N", "window", "error", "tol", "status"], rows)


def run_rhf_converge(ctx: Context):
    fields = ctx.fields()
    tf = tf_minimize(TFProblem(fields), **ctx.tf_kwargs())
    kw = {}
    if "mixing" in ctx.solver:
        kw["mixing"] = ctx.solver["mixing"]
    if "max_iter" in ctx.solver:
        kw["max_iter"] = ctx.solver["max_iter"]
    rows = convergence_experiment(fields, ctx.N_list, tf, threads=ctx.threads, extrapolate=bool(ctx.solver.get("extrapolate", False)), **kw)
    ctx.csv("rhf_convergence.csv", CSV_HEADER, (r.as_tuple() for r in rows))
    ctx.json("rhf_summary.json", {"e_tf": tf.energy, "mu": tf.mu, "rows": [dict(zip(CSV_HEADER, r.as_tuple())) for r in rows]})
    ctx.check("scf converged", all(r.converged for r in rows), ", ".join(str(r.N) for r in rows if not r.converged))
    ctx.check("tf gap non-increasing", _non_increasing([abs(r.tf_gap) for r in rows]), str([abs(r.tf_gap) for r in rows]))


def gaussian_f(sigma: float):
    def f(z):
        z = np.asarray(z, dtype=float)
        return np.exp(-np.sum(z**2, axis=-1) / (2 * sigma**2))

    return f


def random_eta(grid: SpatialGrid, rng, mass: float) -> Density:
    """Random smooth positive density: a few Gaussian bumps inside the box."""
    coords = grid.coords()
    vals = np.zeros(grid.shape)
    for _ in range(int(rng.integers(1, 5))):
        centre = rng.uniform(-0.3 * grid.R, 0.3 * grid.R, grid.d)
        width = rng.uniform(0.05, 0.2) * grid.R
        vals += rng.uniform(0.2, 1.0) * np.exp(-sum((c - x0) ** 2 for c, x0 in zip(coords, centre)) / (2 * width**2))
    return Density(grid, vals * mass / (vals.sum() * grid.weight))


def run_lieb_oxford(ctx: Context):
    rng = np.random.default_rng(ctx.seed)
    K = int(ctx.options.get("K", 20))
    count = int(ctx.options.get("configurations", 1000))
    f = gaussian_f(float(ctx.options.get("f_sigma", 0.5)))
    half = 0.5 * ctx.grid.R
    rows, violations = [], 0
    for i in range(count):
        pts = rng.uniform(-half, half, (K, ctx.grid.d))
        eta = random_eta(ctx.grid, rng, float(rng.uniform(0.5, 1.5) * K))
        rep = lieb_oxford_check(pts, eta, f)
        violations += rep["violations"]
        rows.append([i, rep["min_margin"]])
    ctx.csv("lieb_oxford.csv", ["configuration", "margin"], rows)
    ctx.check("lieb-oxford violations", violations == 0, f"{violations} of {count}")


def run_exact_small(ctx: Context):
    fields = ctx.fields()
    free = ExternalFields(fields.grid, fields.V, fields.A, np.zeros_like(fields.w_doubled))
    basis = int(ctx.solver.get("basis_size", 20))
    rows = []
    for N in ctx.N_list:
        sc = Scaling(N, ctx.grid.d)
        ex = exact_ground_state_small(fields, sc, basis_size=basis)
        ex0 = exact_ground_state_small(free, sc, basis_size=basis)
        e_hf = float("nan")
        if not fields.w_is_zero:
            r = rhf_minimize(fields, sc)
            e_hf = r.energy * N + hf_exchange(r.gamma, fields, N)
        rows.append([N, basis, ex.dimension, ex.energy, ex.energy_per_particle, ex0.energy, e_hf])
        ctx.check(f"exact above non-interacting N={N}", ex.energy >= ex0.energy - 1e-10 or fields.w_doubled.min() < 0)
        if not fields.w_is_zero:
            ctx.check(f"exact below Hartree-Fock N={N}", ex.energy <= e_hf + 1e-10, f"{ex.energy!r} vs {e_hf!r}")
    ctx.csv("exact_small.csv", ["N", "basis_size", "dimension", "energy", "energy_per_particle", "free_energy", "hf_energy"], rows)


RUNNERS = {
    "tf-solve": run_tf_solve,
    "vlasov-check": run_vlasov_check,
    "weyl": run_weyl,
    "husimi": run_husimi,
    "wigner": run_wigner,
    "check-identities": run_check_identities,
    "rhf-converge": run_rhf_converge,
    "lieb-oxford": run_lieb_oxford,
    "exact-small": run_exact_small,
}


def run(config_path, experiment: str | None = None, out=None, seed=None, threads: int = 1) -> int:
    """Run one experiment; returns the process exit code."""
    try:
        cfg = load_config(config_path)
        name = experiment or cfg.get("experiment")
        if name is None:
            raise ConfigError(f"{config_path}:1: error: no experiment given on the command line or in the config")
        if experiment and cfg.get("experiment", experiment) != experiment:
            line = _line_of(Path(config_path).read_text(encoding="utf-8"), ["experiment"])
            raise ConfigError(f"{config_path}:{line}: error: config is for {cfg['experiment']!r}, not {experiment!r}")
        out_dir = Path(out or cfg.get("output", {}).get("dir", "out"))
        ctx = Context(cfg, out_dir, int(seed if seed is not None else cfg.get("seed", 0)), max(1, int(threads)))
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return 2
    except ConfigurationError as exc:
        print(f"{config_path}:1: error: {exc}", file=sys.stderr)
        return 2
    try:
        RUNNERS[name](ctx)
    except ConfigurationError as exc:
        print(f"{config_path}:1: error: {exc}", file=sys.stderr)
        return 2
    except (IterationError, PreconditionError) as exc:
        print(f"FAIL {name}: {exc}", file=sys.stderr)
        return 1
    if ctx.failures:
        for f in ctx.failures:
            print(f"FAIL {name}: {f}", file=sys.stderr)
        return 1
    print(f"PASS {name}")
    return 0


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="JSON experiment config")
    common.add_argument("--out", help="output directory (overrides output.dir)")
    common.add_argument("--seed", type=int, help="unsigned 64-bit seed for randomised checks")
    common.add_argument("--threads", type=int, default=1, help="worker threads over N_list")
    common.add_argument("-v", "--verbose", action="store_true")
    parser = argparse.ArgumentParser(prog="tfmf", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="run the experiment named in the config")
    for name in EXPERIMENTS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.seed is not None and not 0 <= args.seed < 2**64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return 2
    experiment = None if args.command == "run" else args.command
    return run(args.config, experiment, args.out, args.seed, args.threads)


if __name__ == "__main__":
    sys.exit(main())
