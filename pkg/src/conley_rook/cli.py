"""Command-line front end: ``conley-rook --input FILE --kind KIND --model MODEL --emit LIST``.

Exit codes: 0 success, 1 input or validation error, 2 theorem-violation
diagnostics (for example a grading extension without a unique minimum).
"""

from __future__ import annotations

import json
import os
import random
import sys
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction

import click

from .blowup import GradingExtensionError
from .conley import EnumerationBudgetError
from .cubical import ComplexError
from .dynamics import GradientConsistencyError, ModelError
from .pipeline import Analysis, analyze
from .ramp import (RampError, RampSystem, cell_geometry, check_admissible, global_bounds, h_membership,
                   load_ramp_system, suggest_uniform_h, wall_labeling_from_ramp)
from .walls import LabelingError, WallLabeling, load_wall_labeling

__all__ = ["RunConfig", "main", "run", "check_h", "EMITS", "KINDS", "MODELS"]

KINDS = ("wall-labeling", "ramp", "network")
MODELS = ("f0", "f1", "f2", "f3")
EMITS = ("stg", "grading", "morse", "conley", "enumerate", "h-report", "geometry")

INPUT_ERRORS = (RampError, LabelingError, ComplexError, ModelError, EnumerationBudgetError, ValueError, OSError)
THEOREM_ERRORS = (GradingExtensionError, GradientConsistencyError)


class ConfigError(ValueError):
    """Invalid combination of command-line options."""


@dataclass
class RunConfig:
    input: str
    kind: str = "wall-labeling"
    model: str = "f3"
    emit: tuple[str, ...] = ("morse", "conley")
    max_enum_bits: int = 20
    out: str | None = None
    level: int = 0
    report: bool = False
    extra: dict = field(default_factory=dict)

    def validate(self, N: int | None = None) -> None:
        if self.kind not in KINDS:
            raise ConfigError(f"unknown input kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}; expected one of {', '.join(MODELS)}")
        bad = [e for e in self.emit if e not in EMITS]
        if bad:
            raise ConfigError(f"unknown --emit selection {bad[0]!r}; expected a subset of {', '.join(EMITS)}")
        if "enumerate" in self.emit and "conley" not in self.emit:
            raise ConfigError("--emit enumerate requires conley")
        if self.kind == "wall-labeling" and ({"h-report", "geometry"} & set(self.emit)):
            raise ConfigError("h-report and geometry need ramp or network input")
        if self.level not in (0, 1, 2, 3):
            raise ConfigError(f"--level must be 0, 1, 2 or 3, got {self.level}")
        if self.report and not self.out:
            raise ConfigError("--report needs --out for its figure files")
        if N is not None and self.model == "f3" and N > 3:
            raise ConfigError(f"model f3 is defined for N <= 3, input has N = {N}")


# -- loading -----------------------------------------------------------------------

def load_input(path: str, kind: str) -> tuple[WallLabeling, RampSystem | None]:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if kind == "wall-labeling":
        try:
            return load_wall_labeling(text), None
        except LabelingError as exc:
            raise LabelingError(f"{path}: {exc}") from None
    try:
        sys_ = load_ramp_system(text)
        if kind == "network" and "network" not in json.loads(text):
            raise RampError("network input needs a 'network' key with the edge list")
        return wall_labeling_from_ramp(sys_), sys_
    except RampError as exc:
        raise RampError(f"{path}: {exc}") from None


# -- JSON sections ---------------------------------------------------------------

def _f(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def grading_json(res: Analysis) -> dict:
    gr = res.grading
    return {"sccs": [{"id": p, "cells": [c.text() for c in gr.fiber(p)], "recurrent": gr.recurrent[p],
                      "successors": sorted(gr.succ[p])} for p in range(gr.size)]}


def conley_json(res: Analysis) -> dict:
    doc = res.conley.to_json(res.N)
    doc["morse_node_of_grade"] = {str(nd.scc): nd.id for nd in res.morse.nodes}
    doc["connection_matrix"] = res.matrix_json(res.conley.delta)
    return doc


def enumerate_json(res: Analysis) -> dict:
    return {"count": len(res.matrices), "matrices": [res.matrix_json(m) for m in res.matrices]}


def h_report_json(sys_: RampSystem, level: int) -> dict:
    rep = h_membership(sys_, level)
    doc = rep.to_json()
    adm = check_admissible(sys_)
    doc["admissible"] = adm.ok
    doc["margins"] = [c.to_json() for c in rep.checks if c.ok]
    doc["suggested_h"] = {}
    for lv in (0, 1, 3):
        if lv == 3 and sys_.N != 3:
            continue
        try:
            doc["suggested_h"][str(lv)] = _f(suggest_uniform_h(sys_, lv))
        except RampError as exc:
            doc["suggested_h"][str(lv)] = f"unavailable: {exc}"
    return doc


def geometry_json(sys_: RampSystem) -> dict:
    GB = global_bounds(sys_)
    cx = sys_.complex()
    return {"global_bounds": [_f(g) for g in GB],
            "cells": [cell_geometry(sys_, c, n, GB).to_json() for c in cx.all_cells for n in range(cx.N)]}


def complex_json(omega: WallLabeling) -> dict:
    cx = omega.complex
    return {"dimension": cx.N, "K": list(cx.K), "cells": len(cx.all_cells)}


# -- run -----------------------------------------------------------------------------

def run(cfg: RunConfig) -> tuple[dict[str, dict], str]:
    """Compute every selected section; returns per-selection documents and the text report.

    Nothing is written here so that a failure leaves no partial output.
    """
    cfg.validate()
    omega, sys_ = load_input(cfg.input, cfg.kind)
    cfg.validate(omega.N)
    want = set(cfg.emit)
    need_pipeline = bool(want & {"stg", "grading", "morse", "conley", "enumerate"}) or cfg.report
    results: dict[str, dict] = {}
    res = None
    if need_pipeline:
        res = analyze(omega, cfg.model.upper(), conley=bool(want & {"morse", "conley"}) or cfg.report,
                      enumerate_matrices="enumerate" in want, max_bits=cfg.max_enum_bits)
        if "stg" in want:
            results["stg"] = res.stg.to_json()
        if "grading" in want:
            results["grading"] = grading_json(res)
        if "morse" in want:
            results["morse"] = res.morse.to_json()
        if "conley" in want:
            results["conley"] = conley_json(res)
        if "enumerate" in want:
            results["enumerate"] = enumerate_json(res)
    if "h-report" in want:
        results["h-report"] = h_report_json(sys_, cfg.level)
    if "geometry" in want:
        results["geometry"] = geometry_json(sys_)
    cdoc = complex_json(omega)
    docs = {k: {"version": 1, "complex": cdoc, "results": {k: v}} for k, v in results.items()}
    text = ""
    if cfg.report:
        from .report import render_text
        extra = {}
        if "h-report" in results:
            extra["h-report"] = check_h_lines(sys_, cfg.level)
        text = render_text(res, extra)
    cfg.extra["analysis"] = res
    cfg.extra["omega"] = omega
    return docs, text


def check_h_lines(sys_: RampSystem, level: int) -> list[str]:
    """Per-level verdicts, violated inequalities and suggested uniform h values."""
    lines = []
    for lv in range(level + 1):
        rep = h_membership(sys_, lv)
        lines.append(f"H{lv}: {'pass' if rep.ok else 'FAIL'} ({len(rep.checks)} checks, stage {rep.stage})")
        lines.extend("  violated: " + c.text() for c in rep.violations)
        lines.extend("  flagged: " + c.text() for c in rep.flagged)
        if lv == 0 and rep.ok:
            lines.extend("  margin: " + c.text() for c in rep.checks)
    for lv in (0, 1, 3):
        if lv > level or (lv == 3 and sys_.N != 3):
            continue
        try:
            lines.append(f"suggested uniform h for H{lv}: {_f(suggest_uniform_h(sys_, lv))}")
        except RampError as exc:
            lines.append(f"suggested uniform h for H{lv}: unavailable ({exc})")
    return lines


def check_h(sys_: RampSystem, level: int) -> str:
    from .report import section
    return section("h-report", check_h_lines(sys_, level))


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def _atomic_write(path: str, data: str | None = None, render=None) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.splitext(path)[1])
    os.close(fd)
    try:
        if render is not None:
            render(tmp)
        else:
            with open(tmp, "w", encoding="utf-8") as fh:
                fh.write(data)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.remove(tmp)


def write_outputs(cfg: RunConfig, docs: dict[str, dict], text: str) -> list[str]:
    os.makedirs(cfg.out, exist_ok=True)
    written = []
    for name, doc in docs.items():
        p = os.path.join(cfg.out, f"{name}.json")
        _atomic_write(p, dumps(doc))
        written.append(p)
    if cfg.report:
        from .report import plot_morse_graph, plot_wall_labeling
        res, omega = cfg.extra["analysis"], cfg.extra["omega"]
        p = os.path.join(cfg.out, "report.txt")
        _atomic_write(p, text)
        written.append(p)
        p = os.path.join(cfg.out, "morse_graph.png")
        _atomic_write(p, render=lambda t: plot_morse_graph(res.morse, t))
        written.append(p)
        if omega.N == 2:
            p = os.path.join(cfg.out, "wall_labeling.png")
            _atomic_write(p, render=lambda t: plot_wall_labeling(omega, t, res.morse))
            written.append(p)
    return written


# -- built-in example suite -------------------------------------------------------

def run_fixtures(seed: int, out=print) -> bool:
    """Run the built-in examples plus one seeded random instance; print one line each."""
    from .fixtures import FIXTURES, random_labeling, ramp_fixture
    from .walls import validate, vertex_monotonicity

    ok = True

    def summary(name, omega, model="F3"):
        nonlocal ok
        try:
            res = analyze(omega, model)
        except THEOREM_ERRORS as exc:
            ok = False
            out(f"{name}: theorem violation: {exc}")
            return
        idx = sorted(tuple(nd.conley_index) for nd in res.morse.nodes)
        out(f"{name}: N={omega.N} K={list(omega.complex.K)} morse nodes={len(res.morse.nodes)} "
            f"indices={[list(i) for i in idx]}")

    for name in ("set1", "ex2sec6", "periodic", "intro2"):
        summary(name, wall_labeling_from_ramp(ramp_fixture(name)))
    summary("running", FIXTURES["running"]())
    omega = FIXTURES["ex7"]()
    v = vertex_monotonicity(omega)
    out(f"ex7: valid={bool(validate(omega))} monotone={v is None}"
        + ("" if v is None else f" first failure at {v[0].text()} direction {v[1] + 1}"))
    rng = random.Random(seed)
    summary(f"random(seed={seed})", random_labeling(rng, (2, 2, 1)))
    return ok


# -- click entry point ----------------------------------------------------------------

@click.command(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--input", "input_", type=click.Path(dir_okay=False), help="Input file.")
@click.option("--kind", type=click.Choice(KINDS), default="wall-labeling", show_default=True)
@click.option("--model", type=click.Choice(MODELS, case_sensitive=False), default="f3", show_default=True)
@click.option("--emit", default="morse,conley", show_default=True,
              help=f"Comma-separated subset of {','.join(EMITS)}.")
@click.option("--level", type=int, default=0, show_default=True, help="h level for h-report (0-3).")
@click.option("--max-enum-bits", type=int, default=20, show_default=True,
              help="Largest number of perturbation pairs allowed when enumerating connection matrices.")
@click.option("--out", type=click.Path(file_okay=False), default=None,
              help="Output directory, one JSON file per selection. Without it one document goes to stdout.")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for randomized fixtures.")
@click.option("--fixtures", is_flag=True, help="Run the built-in example suite and exit.")
@click.option("--report", is_flag=True, help="Also print a text report and write figures into --out.")
def _cli(input_, kind, model, emit, level, max_enum_bits, out, seed, fixtures, report):
    """Combinatorial dynamics of wall labelings: models, Morse graphs, Conley complexes."""
    if fixtures:
        sys.exit(0 if run_fixtures(seed, click.echo) else 2)
    if not input_:
        raise ConfigError("--input is required unless --fixtures is given")
    cfg = RunConfig(input_, kind, model.lower(), tuple(e.strip() for e in emit.split(",") if e.strip()),
                    max_enum_bits, out, level, report)
    docs, text = run(cfg)
    if out:
        for p in write_outputs(cfg, docs, text):
            click.echo(f"wrote {p}", err=True)
    else:
        merged = {"version": 1, "complex": next(iter(docs.values()))["complex"] if docs else {},
                  "results": {k: d["results"][k] for k, d in docs.items()}}
        click.echo(dumps(merged), nl=False)
    if text:
        click.echo(text, nl=False)


def main(argv=None) -> int:
    """Console entry point; returns the process exit status."""
    try:
        _cli.main(args=argv, prog_name="conley-rook", standalone_mode=False)
    except SystemExit as exc:
        return int(exc.code or 0)
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except THEOREM_ERRORS as exc:
        click.echo(f"theorem violation: {exc}", err=True)
        return 2
    except INPUT_ERRORS as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
