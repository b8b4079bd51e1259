# main.py
# loopk command line: every subcommand builds a CommandReport, prints canonical JSON on
# stdout and a short table on stderr, and appends to the run log when one is configured.

from __future__ import annotations
import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import wraps
from pathlib import Path
from typing import Any, List, Optional, Sequence, Tuple

import click

import config
from affine_weyl import act, fold_to_alcove
from config import ToolkitConfig, load_config
from errors import CapacityError, ConfigurationError, DomainError, InsufficientTruncation, ToolkitError
from gkm import (
    build_flag_gkm, check_membership, class_from_json, gkm_axiom_check, graph_from_json,
    restrict_line_bundle,
)
from lattice_core import (
    IntegralLattice, RootDatum, datum_to_json, parse_type, positive_roots, root_coords, root_length_sq,
)
from modular import SL2_S, SL2_T, UpperHalfPoint, descends_to_w_sl2, eta, is_even_lattice
from property_checks import cover_report, group_law_report, section_report, theta_report, witness_report
from report import (
    CommandReport, canonical_json, export_json, parse_complex, parse_complex_vector, parse_int_vector,
    parse_rational, parse_rational_vector, summarize,
)
from run_logger import log_event
from stalk import StalkPoint, free_space_support, support_descriptor, support_descriptor_at
from theta import LevelKCharacter, enumerate_level_k, invariant_theta_rank, theta_lambda

Rows = Optional[List[List[Any]]]


@dataclass
class RunContext:
    cfg: ToolkitConfig = field(default_factory=ToolkitConfig)
    json_output: bool = True
    out: Optional[str] = None
    report: Optional[CommandReport] = None


# ------------------------------
# Report plumbing
# ------------------------------

def _command_echo(ctx: click.Context, params: dict) -> List[str]:
    echo = ctx.command_path.split()[1:]
    flags = {p.name: p.opts[0] for p in ctx.command.params}
    for key in sorted(params):
        if params[key] is not None:
            echo.append(f"{flags.get(key, '--' + key)}={params[key]}")
    return echo


def _emit(run: RunContext, report: CommandReport, rows: Rows, elapsed: float) -> None:
    report.finalize()
    payload = report.to_json()
    if run.json_output:
        click.echo(canonical_json(payload))
        click.echo(summarize(report, rows), err=True)
    else:
        click.echo(summarize(report, rows))
    click.echo(f"elapsed_s {elapsed:.3f}", err=True)
    if run.out:
        export_json(payload, run.out)
    if config.ENABLE_RUN_LOG and run.cfg.log_file:
        log_event({"command": report.command, "status": report.status,
                   "report_hash": report.report_hash, "elapsed_s": round(elapsed, 6)},
                  Path(run.cfg.log_file))
    run.report = report


# Runs a command body (returning status, data, diagnostics, rows) and turns toolkit
# errors into structured reports; exits with the report's code
def reported(fn):
    @wraps(fn)
    def wrapper(**params):
        ctx = click.get_current_context()
        run: RunContext = ctx.find_object(RunContext)
        echo = _command_echo(ctx, params)
        start = time.perf_counter()
        rows: Rows = None
        try:
            status, data, diagnostics, rows = fn(run, **params)
            report = CommandReport(echo, status, data, diagnostics)
        except InsufficientTruncation as e:
            report = CommandReport(echo, "indeterminate", {}, {"error": e.to_dict()})
        except ToolkitError as e:
            report = CommandReport(echo, "fail", {}, {"error": e.to_dict()})
        _emit(run, report, rows, time.perf_counter() - start)
        ctx.exit(report.exit_code)
    return wrapper


def _datum(run: RunContext, type_name: str) -> RootDatum:
    d = parse_type(type_name)
    if d.rank > run.cfg.max_rank:
        raise CapacityError("rank exceeds the configured maximum", {"type": d.name, "max_rank": run.cfg.max_rank})
    return d


def _character(d: RootDatum, lam_text: Optional[str], level: int, energy: str = "0") -> LevelKCharacter:
    weight = parse_int_vector(lam_text) if lam_text else tuple(0 for _ in range(d.rank))
    if len(weight) != d.rank:
        raise DomainError("lambda needs one coordinate per fundamental weight", {"rank": d.rank, "lambda": list(weight)})
    return LevelKCharacter(weight, level, parse_rational(energy))


def _rational_for(d: RootDatum, text: str, name: str) -> Tuple[Fraction, ...]:
    vec = parse_rational_vector(text)
    if len(vec) != d.rank:
        raise DomainError(f"{name} needs one coordinate per simple coroot", {"rank": d.rank, name: text})
    return vec


def _progress(run: RunContext) -> bool:
    return config.ENABLE_PROGRESS and run.cfg.progress


type_option = click.option("--type", "type_name", required=True, help="Root type such as A1, A2, C2, G2.")
level_option = click.option("--level", type=click.IntRange(min=1), default=1, show_default=True)
lambda_option = click.option("--lambda", "lam", default=None, help='Finite weight, e.g. "1,0" (default 0).')
qorder_option = click.option("--qorder", type=click.IntRange(min=0), default=None, help="Truncation order N.")


# ------------------------------
# Root group
# ------------------------------

@click.group()
@click.option("--json/--text", "json_output", default=True, help="JSON on stdout (default) or a text table.")
@click.option("--seed", type=int, default=None, help="Seed for property sampling.")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None, help="YAML config file.")
@click.option("--log", "log_file", type=click.Path(dir_okay=False), default=None, help="Append to a hash-chained run log.")
@click.option("--progress/--no-progress", default=None, help="Progress bars on stderr.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Also write the report JSON here.")
@click.pass_context
def cli(ctx, json_output, seed, config_path, log_file, progress, out):
    """Level-k loop-group toolkit: root data, alcoves, theta series, M2(Z), GKM graphs, stalks.

    Numeric checks assume Im tau >= 0.5, where q-order 40 meets a 1e-8 tolerance.
    """
    run = ctx.ensure_object(RunContext)
    try:
        run.cfg = load_config(config_path).with_overrides(seed=seed, log_file=log_file, progress=progress)
    except ConfigurationError as e:
        raise click.BadParameter(e.message, param_hint="--config")
    run.json_output = json_output
    run.out = out


@cli.group()
def root():
    """Root data."""


@root.command("describe")
@type_option
@reported
def root_describe(run: RunContext, type_name):
    d = _datum(run, type_name)
    rows = [["root", "root coords", "length^2"]]
    for a in positive_roots(d):
        rows.append([list(a), list(root_coords(d, a)), root_length_sq(d, a)])
    return "pass", datum_to_json(d), {"positive_roots": len(rows) - 1}, rows


@cli.group()
def alcove():
    """Fundamental alcove."""


@alcove.command("fold")
@type_option
@click.option("--h", "h_text", required=True, help='Rational coroot coordinates, e.g. "7/10".')
@reported
def alcove_fold(run: RunContext, type_name, h_text):
    d = _datum(run, type_name)
    h = _rational_for(d, h_text, "h")
    point, witness = fold_to_alcove(d, h)
    ok = act(witness, h) == point.point
    data = {"input": [str(x) for x in h], "point": [str(x) for x in point.point],
            "walls": sorted(point.walls), "witness": witness.to_json(), "witness_ok": ok}
    return ("pass" if ok else "fail"), data, {}, None


@cli.group()
def weights():
    """Level-k weights."""


@weights.command("enumerate")
@type_option
@click.option("--level", type=click.IntRange(min=0), required=True)
@click.option("--cross-check/--no-cross-check", default=False, help="Compare with the symmetrized-theta rank.")
@qorder_option
@reported
def weights_enumerate(run: RunContext, type_name, level, cross_check, qorder):
    d = _datum(run, type_name)
    found = enumerate_level_k(d, level)
    data = {"level": level, "count": len(found), "weights": [list(w) for w in found]}
    diagnostics = {}
    status = "pass"
    if cross_check and level > 0:
        order = min(qorder if qorder is not None else run.cfg.qorder, 20)
        rank = invariant_theta_rank(d, level, order)
        diagnostics = {"invariant_theta_rank": rank, "qorder": order}
        status = "pass" if rank == len(found) else "fail"
    rows = [["weight"]] + [[list(w)] for w in found]
    return status, data, diagnostics, rows


# ------------------------------
# Theta
# ------------------------------

@cli.group()
def theta():
    """Theta series and Euler-theta divisibility."""


@theta.command("expand")
@type_option
@level_option
@lambda_option
@click.option("--energy", default="0", show_default=True, help="Energy offset n, rational.")
@qorder_option
@reported
def theta_expand(run: RunContext, type_name, level, lam, energy, qorder):
    d = _datum(run, type_name)
    order = qorder if qorder is not None else run.cfg.qorder
    th = theta_lambda(d, _character(d, lam, level, energy), order)
    rows = [["u", "q", "weight", "coeff"]]
    for m, c in th.series.sorted_terms():
        rows.append([m.level, m.energy, list(m.weight), c])
    return "pass", th.to_json(), {"qorder": order, "terms": len(th.terms)}, rows


@theta.command("verify")
@type_option
@level_option
@lambda_option
@qorder_option
@reported
def theta_verify(run: RunContext, type_name, level, lam, qorder):
    d = _datum(run, type_name)
    order = qorder if qorder is not None else run.cfg.qorder
    result = theta_report(d, _character(d, lam, level), order)
    rows = [["beta", "invariant"]] + [[b, ok] for b, ok in result["lattice_invariance"].items()]
    return ("pass" if result["passed"] else "fail"), result, {"qorder": order}, rows


@theta.command("cover-divisibility")
@type_option
@level_option
@lambda_option
@click.option("--length", "length_bound", type=click.IntRange(min=1), default=2, show_default=True)
@qorder_option
@click.option("--witness/--no-witness", default=False, help="Also check the factorization identity.")
@reported
def theta_cover_divisibility(run: RunContext, type_name, level, lam, length_bound, qorder, witness):
    d = _datum(run, type_name)
    if length_bound > run.cfg.max_cover_length:
        raise CapacityError("length bound exceeds the configured maximum",
                            {"length": length_bound, "max": run.cfg.max_cover_length})
    order = qorder if qorder is not None else run.cfg.qorder
    character = _character(d, lam, level)
    result = cover_report(d, character, length_bound, order, run.cfg.cover_margin,
                          run.cfg.max_refinements, _progress(run))
    if witness:
        result["witness"] = witness_report(d, character, min(length_bound, 2))
    rows = [["w", "v", "alpha", "m", "status"]]
    for c in result["certificates"]:
        rows.append([c["w"], c["v"], c["alpha"]["finite"], c["alpha"]["m"], c["certificate"]["status"]])
    return result["status"], result, {"qorder": order, "pairs": result["pairs"]}, rows


# ------------------------------
# Modular
# ------------------------------

@cli.group()
def modular():
    """The groups N, SL2(Z), M2(Z) and theta sections."""


@modular.command("verify-group")
@type_option
@click.option("--samples", type=click.IntRange(min=1), default=None)
@click.option("--tol", type=float, default=None)
@reported
def modular_verify_group(run: RunContext, type_name, samples, tol):
    d = _datum(run, type_name)
    result = group_law_report(d, samples or run.cfg.samples, run.cfg.seed, run.cfg.im_tau_floor,
                              tol or run.cfg.tolerance, _progress(run))
    rows = [["law", "failures"]] + [[k, v] for k, v in result["failures"].items()]
    return ("pass" if result["passed"] else "fail"), result, {"seed": run.cfg.seed}, rows


@modular.command("verify-section")
@type_option
@level_option
@lambda_option
@qorder_option
@click.option("--tol", type=float, default=None)
@click.option("--samples", type=click.IntRange(min=1), default=None)
@click.option("--tau", default=None, help='Point in the upper half plane, e.g. "0+1.1i".')
@click.option("--h", "h_text", default=None, help='Complex coroot coordinates, comma-separated.')
@click.option("--z", "z_text", default=None, help="Line coordinate (default 1).")
@click.option("--beta", default=None, help="Lattice vector (default: sampled from the first two shells).")
@reported
def modular_verify_section(run: RunContext, type_name, level, lam, qorder, tol, samples, tau, h_text, z_text, beta):
    d = _datum(run, type_name)
    order = qorder if qorder is not None else run.cfg.qorder
    point = None
    if tau is not None:
        t = UpperHalfPoint(parse_complex(tau)).tau
        if t.imag < run.cfg.im_tau_floor:
            raise DomainError("Im tau is below the configured floor", {"tau": tau, "floor": run.cfg.im_tau_floor})
        h = parse_complex_vector(h_text) if h_text else tuple(0j for _ in range(d.rank))
        if len(h) != d.rank:
            raise DomainError("h needs one coordinate per simple coroot", {"rank": d.rank})
        point = (t, h, parse_complex(z_text) if z_text else 1 + 0j)
    b = parse_int_vector(beta) if beta else None
    result = section_report(d, _character(d, lam, level), order, tol or run.cfg.tolerance,
                            samples or run.cfg.samples, run.cfg.seed, run.cfg.im_tau_floor,
                            point, b, _progress(run))
    rows = [["identity", "max relative error"]] + [[k, v] for k, v in sorted(result["max_errors"].items())]
    return ("pass" if result["passed"] else "fail"), result, {"qorder": order, "seed": run.cfg.seed}, rows


@modular.command("eta-table")
@click.option("--type", "type_name", default=None, help="Root type; or give --gram.")
@click.option("--gram", default=None, help='Gram matrix of an integral lattice as JSON, e.g. "[[1]]".')
@reported
def modular_eta_table(run: RunContext, type_name, gram):
    if gram is not None:
        try:
            lattice = IntegralLattice.from_rows(json.loads(gram))
        except DomainError:
            raise
        except (json.JSONDecodeError, TypeError, ValueError) as e:
            raise DomainError("cannot read Gram matrix", {"gram": gram, "reason": str(e)})
        label = f"gram {gram}"
    elif type_name is not None:
        lattice = _datum(run, type_name)
        label = lattice.name
    else:
        raise click.UsageError("give --type or --gram")
    n = lattice.rank
    zero = tuple(0 for _ in range(n))
    unit = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    pairs = [(u, zero) for u in unit] + [(zero, u) for u in unit] + [(u, v) for u in unit for v in unit]
    mats = {"S": SL2_S, "T": SL2_T, "ST": SL2_S @ SL2_T}
    entries = []
    for b1, b2 in pairs:
        for name, A in mats.items():
            entries.append({"beta1": list(b1), "beta2": list(b2), "A": name, "eta": eta(lattice, b1, b2, A)})
    even = is_even_lattice(lattice)
    data = {"lattice": label, "even_lattice": even, "entries": entries,
            "descends_to_w_sl2": {str(k): descends_to_w_sl2(lattice, k) for k in (1, 2)}}
    status = "fail" if even and any(e["eta"] for e in entries) else "pass"
    rows = [["beta1", "beta2", "A", "eta"]] + [[e["beta1"], e["beta2"], e["A"], e["eta"]] for e in entries]
    return status, data, {"even_lattice": even}, rows


# ------------------------------
# GKM
# ------------------------------

@cli.group()
def gkm():
    """GKM moment graphs."""


@gkm.command("build-flag")
@type_option
@reported
def gkm_build_flag(run: RunContext, type_name):
    d = _datum(run, type_name)
    g = build_flag_gkm(d)
    axioms = gkm_axiom_check(g)
    rows = [["src", "dst", "weights"]] + [[e.src, e.dst, [list(w) for w in e.weights]] for e in g.edges]
    return ("pass" if axioms["passed"] else "fail"), {"graph": g.to_json(), "axioms": axioms}, \
        {"vertices": len(g.vertices), "edges": len(g.edges)}, rows


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise DomainError("cannot read JSON input", {"path": path, "reason": str(e)})


@gkm.command("check")
@click.option("--graph", "graph_path", type=click.Path(dir_okay=False), default=None, help="Graph JSON file.")
@click.option("--class", "class_path", type=click.Path(dir_okay=False), default=None, help="Class JSON file.")
@click.option("--type", "type_name", default=None, help="Build the flag graph of this type instead of --graph.")
@lambda_option
@reported
def gkm_check(run: RunContext, graph_path, class_path, type_name, lam):
    d = _datum(run, type_name) if type_name else None
    if graph_path:
        g = graph_from_json(_load_json(graph_path))
    elif d is not None:
        g = build_flag_gkm(d)
    else:
        raise click.UsageError("give --graph or --type")
    if class_path:
        c = class_from_json(_load_json(class_path))
    elif d is not None:
        c = restrict_line_bundle(d, g, _character(d, lam, 1).weight)
    else:
        raise click.UsageError("give --class, or --type with --lambda")
    verdict = check_membership(g, c)
    data = {"verdict": verdict.to_json(), "axioms": gkm_axiom_check(g)}
    rows = [["edge", "src", "dst", "divisible"]] + \
        [[x["edge"], x["src"], x["dst"], x["divisible"]] for x in verdict.certificates]
    return ("pass" if verdict.passed else "fail"), data, {"edges": len(g.edges)}, rows


# ------------------------------
# Stalks
# ------------------------------

@cli.group()
def stalk():
    """Stalk-support descriptors on H x Sigma_C."""


@stalk.command("support")
@type_option
@click.option("--h1", default=None, help='Rational vector, e.g. "1/2".')
@click.option("--h2", default=None, help='Rational vector, e.g. "0".')
@click.option("--tau", default=None, help="Gaussian-rational tau, used with --h instead of --h1/--h2.")
@click.option("--h", "h_text", default=None, help="Gaussian-rational coroot coordinates, comma-separated.")
@reported
def stalk_support(run: RunContext, type_name, h1, h2, tau, h_text):
    d = _datum(run, type_name)
    if tau is not None:
        if h_text is None:
            raise click.UsageError("--tau needs --h")
        h = parse_complex_vector(h_text, exact=True)
        if len(h) != d.rank:
            raise DomainError("h needs one coordinate per simple coroot", {"rank": d.rank})
        desc = support_descriptor_at(d, StalkPoint(UpperHalfPoint(parse_complex(tau, exact=True)), h))
    elif h1 is not None and h2 is not None:
        desc = support_descriptor(d, _rational_for(d, h1, "h1"), _rational_for(d, h2, "h2"))
    else:
        raise click.UsageError("give --h1 and --h2, or --tau and --h")
    rows = [["m", "alpha"]] + [[m, list(a)] for m, a in desc.vanishing_roots]
    return "pass", desc.to_json(), {"walls": len(desc.walls), "vanishing_roots": len(desc.vanishing_roots)}, rows


@stalk.command("free-support")
@type_option
@click.option("--h1", required=True)
@click.option("--h2", required=True)
@reported
def stalk_free_support(run: RunContext, type_name, h1, h2):
    d = _datum(run, type_name)
    v1, v2 = _rational_for(d, h1, "h1"), _rational_for(d, h2, "h2")
    supported = free_space_support(d, v1, v2)
    data = {"h1": [str(x) for x in v1], "h2": [str(x) for x in v2], "supported": supported}
    return "pass", data, {}, None


# ------------------------------
# Programmatic entry
# ------------------------------

def run(argv: Sequence[str]) -> CommandReport:
    """Run one command in-process and return its report; click usage errors propagate."""
    holder = RunContext()
    cli.main(args=list(argv), prog_name="loopk", standalone_mode=False, obj=holder)
    if holder.report is None:
        raise click.UsageError("no command was run")
    return holder.report


def main():
    cli(prog_name="loopk")


if __name__ == "__main__":
    main()
