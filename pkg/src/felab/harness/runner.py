"""Experiment execution: configuration -> laws -> rows -> verdicts -> exit code.

Every experiment is split into a preparation step (all parsing, registry
lookups and law construction; any failure is a configuration error) and a
computation step that returns result rows.  Reports are written only after
the computation finished, each through a temporary file and ``os.replace``.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import jsonschema
import numpy as np

from felab.classical import MixtureXi
from felab.core import (
    HOLDS,
    PROBABILITY,
    VIOLATED,
    LawError,
    NumericalError,
    StateMC,
    annealed_bound,
    quenched_free_energy,
    subadditivity_report,
    two_point_counterexample,
    two_point_law,
)
from felab.core.results import COLUMNS, estimate_row, params_json, rows_to_csv, rows_to_json, write_atomic
from felab.harness.config import ConfigError, set_path, validate
from felab.harness.registry import RegistryError, build_law, is_quantum
from felab.parisi import (
    ControlConfig,
    GridConfig,
    GridError,
    OptimizerConfig,
    StepZeta,
    ZetaError,
    ac_simulate,
    corollary_parisi_check,
    parisi_functional,
    parisi_minimize,
    parisi_pde_solve,
)
from felab.parisi.control import FEEDBACK_DT, PDE_FEEDBACK
from felab.parisi.optimize import FLAG_NOT_MONOTONE
from felab.quantum import (
    golden_thompson_gap,
    quantum_free_energy,
    quantum_subadditivity_report,
    random_hermitian,
    symmetrizer_average,
)
from felab.quantum.operators import OperatorError
from felab.seeding import STREAM_DEFAULT, realization_seed, rng

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

EXPECTED_VIOLATION = "expected_violation"
UNEXPECTED_HOLD = "unexpected_hold"
PASSING = (HOLDS, EXPECTED_VIOLATION)

CONFIG_ERRORS = (
    ConfigError,
    RegistryError,
    jsonschema.ValidationError,
    LawError,
    OperatorError,
    GridError,
    ZetaError,
    ValueError,
    TypeError,
    KeyError,
)
NUMERICAL_ERRORS = (NumericalError, np.linalg.LinAlgError, FloatingPointError, OverflowError)

COUNTEREXAMPLE_TOL = 1e-12
GT_RELATIVE_TOL = 1e-9
GT_COMMUTING_TOL = 1e-10
AC_ALLOWANCE = 2e-3


@dataclass
class Context:
    experiment_id: str
    seed: int
    threads: Optional[int]
    z: float
    expect_violation: bool


def _row(ctx: Context, model: str, params, role: str, value, stderr=None, *, annealed=None, verdict="", n_disorder=None, convention="", n_state=None):
    return {
        "experiment_id": ctx.experiment_id,
        "model": model,
        "params_json": params_json(params),
        "convention": convention,
        "F_mean": value,
        "F_stderr": stderr,
        "n_disorder": n_disorder,
        "n_state_samples": n_state,
        "seed": ctx.seed,
        "role": role,
        "annealed": annealed,
        "verdict": verdict,
    }


def _expect(ctx: Context, verdict: str) -> str:
    """Invert a subadditivity verdict when the experiment declares an expected violation."""
    if not ctx.expect_violation:
        return verdict
    return EXPECTED_VIOLATION if verdict == VIOLATED else UNEXPECTED_HOLD


def _state_mc(cfg):
    sm = cfg.get("state_mc")
    return StateMC(**sm) if sm else None


def _check_measure(measure, laws):
    if measure != PROBABILITY:
        for law in laws:
            law.space.log_size()


def _model(cfg, key):
    block = cfg[key]
    params = block.get("params", {})
    return block["id"], params, build_law(block["id"], params)


# ---------------------------------------------------------------- experiment kinds


def prepare_free_energy(cfg, ctx: Context) -> Callable[[], list]:
    model_id, params, law = _model(cfg, "model")
    n = cfg.get("n_disorder", 1000)
    measure = cfg.get("convention", PROBABILITY)
    quantum = is_quantum(model_id)
    if quantum and measure != PROBABILITY:
        raise ConfigError("quantum free energies use the normalised trace (probability convention)")
    if not quantum:
        _check_measure(measure, [law])
    state_mc = _state_mc(cfg)
    if not quantum and not law.space.enumerable and state_mc is None:
        raise ConfigError(f"{law.space.describe()} needs a [state_mc] table")

    def compute():
        if quantum:
            est = quantum_free_energy(law, n, ctx.seed, STREAM_DEFAULT, ctx.threads)
            annealed = None
        else:
            est = quenched_free_energy(law, measure, n, ctx.seed, state_mc, STREAM_DEFAULT, ctx.threads)
            try:
                annealed = annealed_bound(law)
                if measure != PROBABILITY:
                    annealed += law.space.log_size()
            except NotImplementedError:
                annealed = None
        verdict = ""
        if annealed is not None:
            verdict = HOLDS if est.mean <= annealed + ctx.z * est.total_stderr else VIOLATED
        return [estimate_row(ctx.experiment_id, model_id, params, est, role="F", annealed=annealed, verdict=verdict)]

    return compute


def prepare_subadditivity(cfg, ctx: Context) -> Callable[[], list]:
    id1, p1, law1 = _model(cfg, "model1")
    id2, p2, law2 = _model(cfg, "model2")
    combined = _model(cfg, "combined") if "combined" in cfg else None
    ids = [id1, id2] + ([combined[0]] if combined else [])
    quantum = {is_quantum(i) for i in ids}
    if len(quantum) != 1:
        raise ConfigError("cannot mix classical and quantum laws")
    quantum = quantum.pop()
    measure = cfg.get("convention", PROBABILITY)
    if quantum and measure != PROBABILITY:
        raise ConfigError("quantum free energies use the normalised trace (probability convention)")
    if not quantum:
        _check_measure(measure, [law1, law2])
    coupling = cfg.get("coupling", "independent")
    if coupling == "common" and combined is not None:
        raise ConfigError("common coupling uses the independent sum; drop [combined]")
    state_mc = _state_mc(cfg)
    n = cfg.get("n_disorder", 1000)
    kw = dict(n_disorder=n, seed=ctx.seed, z=ctx.z, threads=ctx.threads, coupling=coupling)
    if combined is not None:
        kw["combined"] = combined[2]

    def compute():
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            if quantum:
                rep = quantum_subadditivity_report(law1, law2, **kw)
            else:
                rep = subadditivity_report(law1, law2, measure, state_mc=state_mc, **kw)
        rows = [
            estimate_row(ctx.experiment_id, id1, p1, rep.F1, role="F1"),
            estimate_row(ctx.experiment_id, id2, p2, rep.F2, role="F2"),
            estimate_row(
                ctx.experiment_id,
                combined[0] if combined else f"{id1}+{id2}",
                combined[1] if combined else {"summands": [p1, p2]},
                rep.F12,
                role="F12",
            ),
        ]
        rows.append(
            _row(
                ctx,
                f"{id1}|{id2}",
                {"model1": p1, "model2": p2, "coupling": coupling},
                "slack",
                rep.slack,
                rep.combined_stderr,
                verdict=_expect(ctx, rep.verdict),
                n_disorder=n,
                convention=rep.F12.convention,
            )
        )
        return rows

    return compute


def prepare_counterexample(cfg, ctx: Context) -> Callable[[], list]:
    xs = cfg["x"] if isinstance(cfg["x"], list) else [cfg["x"]]
    xs = [float(x) for x in xs]
    if not all(math.isfinite(x) for x in xs):
        raise ConfigError("x must be finite")
    n = cfg.get("n_disorder", 2)

    def compute():
        rows = []
        for x in xs:
            law = two_point_law(x)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                rep = subadditivity_report(law, law, n_disorder=n, seed=ctx.seed, z=ctx.z, threads=ctx.threads)
            lhs, rhs = two_point_counterexample(x)
            closed = rhs - lhs
            if abs(rep.slack - closed) > COUNTEREXAMPLE_TOL * max(1.0, abs(rhs)):
                raise NumericalError(f"engine slack {rep.slack} disagrees with closed form {closed} at x={x}")
            rows.append(_row(ctx, "two_point", {"x": x}, "F1+F2", rep.F1.mean + rep.F2.mean, n_disorder=n, convention=PROBABILITY))
            rows.append(_row(ctx, "two_point", {"x": x}, "F12", rep.F12.mean, n_disorder=n, convention=PROBABILITY))
            rows.append(
                _row(
                    ctx,
                    "two_point",
                    {"x": x},
                    "slack",
                    rep.slack,
                    rep.combined_stderr,
                    annealed=closed,
                    verdict=_expect(ctx, rep.verdict),
                    n_disorder=n,
                    convention=PROBABILITY,
                )
            )
        return rows

    return compute


def _haar_unitary(gen, dim):
    q, r = np.linalg.qr(gen.standard_normal((dim, dim)) + 1j * gen.standard_normal((dim, dim)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def prepare_golden_thompson(cfg, ctx: Context) -> Callable[[], list]:
    dim, n_pairs = cfg["dim"], cfg["n_pairs"]
    commuting = cfg.get("commuting", False)
    scale = cfg.get("scale", 1.0)
    params = {"dim": dim, "commuting": commuting, "scale": scale}

    def compute():
        rows = []
        for i in range(n_pairs):
            gen = rng(realization_seed(ctx.seed, STREAM_DEFAULT, i))
            if commuting:
                u = _haar_unitary(gen, dim)
                a = (u * (scale * gen.standard_normal(dim))) @ u.conj().T
                b = (u * (scale * gen.standard_normal(dim))) @ u.conj().T
                a, b = 0.5 * (a + a.conj().T), 0.5 * (b + b.conj().T)
            else:
                a, b = random_hermitian(dim, gen, scale), random_hermitian(dim, gen, scale)
            lhs, rhs, gap = golden_thompson_gap(a, b)
            rel = gap / abs(rhs)
            if commuting:
                ok = abs(gap) <= GT_COMMUTING_TOL * max(1.0, abs(rhs))
            else:
                ok = rel >= -GT_RELATIVE_TOL
            rows.append(_row(ctx, "golden_thompson", {**params, "pair": i}, "relative_gap", rel, verdict=HOLDS if ok else VIOLATED))
        return rows

    return compute


def prepare_symmetrizer(cfg, ctx: Context) -> Callable[[], list]:
    group, dim = cfg["group"], cfg["dim"]
    n_gen = cfg.get("n_generators")
    rep = cfg.get("rep", "jordan_wigner")
    tol = cfg.get("tolerance", 1e-12)
    # validate the group/dimension combination before computing
    symmetrizer_average(group, np.eye(dim), n_gen, rep)
    params = {"group": group, "dim": dim, "n_generators": n_gen, "rep": rep}

    def compute():
        rows = []
        for i in range(cfg["n_matrices"]):
            m = random_hermitian(dim, rng(realization_seed(ctx.seed, STREAM_DEFAULT, i)))
            avg = symmetrizer_average(group, m, n_gen, rep)
            dev = float(np.max(np.abs(avg - np.trace(m) / dim * np.eye(dim))))
            rows.append(_row(ctx, "symmetrizer", {**params, "matrix": i}, "max_deviation", dev, verdict=HOLDS if dev <= tol else VIOLATED))
        return rows

    return compute


def _grid(cfg, dt_max=None) -> GridConfig:
    return GridConfig(nx=cfg.get("nx", 2049), n_nodes=cfg.get("n_nodes", 64), dt_max=dt_max)


def _optimizer(cfg, ctx) -> OptimizerConfig:
    return OptimizerConfig(
        n_restarts=cfg.get("n_restarts", 2), max_iter=cfg.get("max_iter", 600), seed=ctx.seed, grid=_grid(cfg)
    )


def _xi(values) -> MixtureXi:
    xi = MixtureXi(tuple(values))
    if xi.degree >= 1 and xi.coefficients[0] != 0:
        raise ConfigError("xi must not contain a linear term")
    return xi


def prepare_parisi_minimize(cfg, ctx: Context) -> Callable[[], list]:
    xi, k = _xi(cfg["xi"]), cfg["k"]
    opt = _optimizer(cfg, ctx)

    def compute():
        res = parisi_minimize(xi, k, opt)
        anchors = [parisi_functional(xi, StepZeta.constant(m), opt.grid) for m in (0.0, 1.0)]
        ok = res.value <= min(anchors) + 1e-12 and FLAG_NOT_MONOTONE not in res.flags
        base = {"xi": list(xi.coefficients), "k": k}
        return [
            _row(ctx, "parisi", {**base, "zeta": 0.0}, "anchor", anchors[0]),
            _row(ctx, "parisi", {**base, "zeta": 1.0}, "anchor", anchors[1]),
            _row(
                ctx,
                "parisi",
                {**base, "zeta": res.zeta.to_dict(), "values_by_k": list(res.values_by_k), "flags": list(res.flags)},
                "minimum",
                res.value,
                verdict=HOLDS if ok else VIOLATED,
            ),
        ]

    return compute


def prepare_corollary_parisi(cfg, ctx: Context) -> Callable[[], list]:
    xi1, xi2, k = _xi(cfg["xi1"]), _xi(cfg["xi2"]), cfg["k"]
    opt = _optimizer(cfg, ctx)

    def compute():
        rep = corollary_parisi_check(xi1, xi2, k, opt)
        base = {"xi1": list(xi1.coefficients), "xi2": list(xi2.coefficients), "k": k}
        return [
            _row(ctx, "parisi", {"xi": base["xi1"], "k": k}, "F1", rep.F1),
            _row(ctx, "parisi", {"xi": base["xi2"], "k": k}, "F2", rep.F2),
            _row(ctx, "parisi", {"xi": list((xi1 + xi2).coefficients), "k": k}, "F12", rep.F12),
            _row(ctx, "parisi", base, "slack", rep.slack, verdict=HOLDS if rep.holds else VIOLATED),
            _row(ctx, "parisi", base, "phi_chain", rep.phi_bound - rep.phi_combined, verdict=HOLDS if rep.chain_holds else VIOLATED),
        ]

    return compute


def prepare_ac_control(cfg, ctx: Context) -> Callable[[], list]:
    xi = _xi(cfg["xi"])
    zeta = StepZeta(tuple(cfg["zeta"]["breakpoints"]), tuple(cfg["zeta"]["values"]))
    controls = [
        ControlConfig(
            n_steps=cfg.get("n_steps", 1000),
            n_paths=cfg.get("n_paths", 100_000),
            seed=ctx.seed,
            control=c["control"],
            u0=c.get("u0", 0.0),
            threads=ctx.threads,
        )
        for c in cfg["controls"]
    ]
    grid = _grid(cfg, FEEDBACK_DT)
    allowance = cfg.get("allowance", AC_ALLOWANCE)

    def compute():
        sol = parisi_pde_solve(xi, zeta, grid)
        rows = []
        for c in controls:
            est = ac_simulate(xi, zeta, c, solution=sol)
            if c.control == PDE_FEEDBACK:
                ok = abs(est.mean - sol.phi00) <= ctx.z * est.stderr + allowance
            else:
                ok = est.mean <= sol.phi00 + ctx.z * est.stderr
            params = {"xi": list(xi.coefficients), "zeta": zeta.to_dict(), "control": c.control, "u0": c.u0, "n_steps": c.n_steps}
            rows.append(
                _row(ctx, "ac_control", params, c.control, est.mean, est.stderr, annealed=sol.phi00, verdict=HOLDS if ok else VIOLATED, n_disorder=c.n_paths)
            )
        return rows

    return compute


PREPARE = {
    "free_energy": prepare_free_energy,
    "subadditivity": prepare_subadditivity,
    "counterexample": prepare_counterexample,
    "golden_thompson": prepare_golden_thompson,
    "symmetrizer": prepare_symmetrizer,
    "parisi_minimize": prepare_parisi_minimize,
    "corollary_parisi": prepare_corollary_parisi,
    "ac_control": prepare_ac_control,
}


# ---------------------------------------------------------------- driver


@dataclass
class RunResult:
    exit_code: int
    rows: list
    message: str = ""
    path: Optional[Path] = None


def _context(cfg, seed, threads) -> Context:
    return Context(
        experiment_id=cfg["id"],
        seed=cfg.get("seed", 0) if seed is None else int(seed),
        threads=threads if threads is not None else cfg.get("threads"),
        z=float(cfg.get("z", 3.0)),
        expect_violation=bool(cfg.get("expect_violation", False)),
    )


def prepare(cfg: dict, seed=None, threads=None) -> Callable[[], list]:
    """Validate and build everything; raise :class:`ConfigError` on any problem."""
    try:
        cfg = validate(cfg)
        return PREPARE[cfg["experiment"]](cfg, _context(cfg, seed, threads))
    except ConfigError:
        raise
    except CONFIG_ERRORS as exc:
        raise ConfigError(f"{type(exc).__name__}: {exc}") from exc


def exit_code_for(rows) -> int:
    verdicts = [r["verdict"] for r in rows if r.get("verdict")]
    return EXIT_OK if all(v in PASSING for v in verdicts) else EXIT_VERDICT


def execute(configs) -> RunResult:
    """Prepare every config first, then compute; no partial results on error."""
    try:
        jobs = [prepare(c) if not isinstance(c, tuple) else prepare(*c) for c in configs]
    except ConfigError as exc:
        return RunResult(EXIT_CONFIG, [], f"config error: {exc}")
    rows = []
    try:
        for job in jobs:
            rows.extend(job())
    except NUMERICAL_ERRORS as exc:
        return RunResult(EXIT_NUMERICAL, [], f"numerical failure: {type(exc).__name__}: {exc}")
    return RunResult(exit_code_for(rows), rows)


def report_paths(out) -> tuple[Path, Path]:
    out = Path(out)
    return out, out.with_suffix(".json")


def write_report(rows, out) -> None:
    csv_path, json_path = report_paths(out)
    write_atomic(csv_path, rows_to_csv(rows, COLUMNS))
    write_atomic(json_path, rows_to_json(rows, COLUMNS))


def run(cfg: dict, out=None, seed=None, threads=None) -> RunResult:
    """Run one experiment and write ``<out>`` (CSV) and its ``.json`` sibling."""
    result = execute([(cfg, seed, threads)])
    if result.exit_code in (EXIT_OK, EXIT_VERDICT):
        result.path = Path(out if out is not None else cfg.get("output", f"{cfg['id']}.csv"))
        write_report(result.rows, result.path)
    return result


def parse_grid(specs) -> list[tuple[str, list]]:
    """``["model.params.beta=0.1,0.2", ...]`` -> ``[(path, [values])]``; at most two axes."""
    axes = []
    for axis in specs or []:
        if "=" not in axis:
            raise ConfigError(f"grid axis {axis!r} must look like path=v1,v2,...")
        path, _, raw = axis.partition("=")
        values = [_scalar(v) for v in raw.split(",") if v.strip()]
        axes.append((path.strip(), values))
    if len(axes) > 2:
        raise ConfigError("a sweep takes one or two grid axes")
    return axes


def _scalar(text: str):
    text = text.strip()
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    if text in ("true", "false"):
        return text == "true"
    return text


def sweep(cfg: dict, axes, out=None, seed=None, threads=None) -> RunResult:
    """One run per grid point (Cartesian product of the axes), rows concatenated in grid order."""
    if not axes:
        raise ConfigError("sweep needs at least one grid axis")
    points = list(itertools.product(*[values for _, values in axes]))
    configs = []
    for point in points:
        c = cfg
        for (path, _), value in zip(axes, point):
            c = set_path(c, path, value)
        configs.append((c, seed, threads))
    result = execute(configs)
    if result.exit_code in (EXIT_OK, EXIT_VERDICT):
        result.path = Path(out if out is not None else f"{cfg['id']}_sweep.csv")
        write_report(result.rows, result.path)
    return result
