"""Command-line front end: run, compile, check, sync and render."""
from __future__ import annotations

import json
import sys

import click

from .builtins import BUILTINS, builtin
from .engine import run_machine
from .fssp import build_sync, is_fire, simulate_sync
from .harness import OracleError, equiv_check, oracle_dpdt, oracle_fst_all_paths, step_cap
from .machine import (
    CatSpec,
    IatSpec,
    MachineParseError,
    MachineValidationError,
    SeqTransducerSpec,
    load_machine,
    serialize_machine,
)
from .render import TraceFormatError, parse_trace_text, table_to_svg, table_to_text, trace_to_svg, trace_to_text

ORACLE_NAMES = ("copy", "sort", "reverse", "square_marker")
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Usage(Exception):
    pass


def _load(path: str):
    try:
        return load_machine(path)
    except (OSError, MachineParseError, MachineValidationError) as exc:
        raise _Usage(f"cannot load {path}: {exc}") from None


def _machine(path, name):
    if (path is None) == (name is None):
        raise _Usage("give exactly one of a machine file or --builtin")
    if name is not None:
        try:
            return builtin(name)
        except KeyError as exc:
            raise _Usage(str(exc.args[0])) from None
    return _load(path)


def _oracle(ref: str):
    if ref in ORACLE_NAMES:
        return ref
    kind, sep, path = ref.partition(":")
    if not sep or kind not in ("fst", "pdt", "iat", "cat"):
        raise _Usage(f"bad oracle {ref!r}; use {'|'.join(ORACLE_NAMES)}|fst:<path>|pdt:<path>|iat:<path>|cat:<path>")
    machine = _load(path)
    got = machine.kind if isinstance(machine, SeqTransducerSpec) else ("cat" if isinstance(machine, CatSpec) else "iat")
    if got != kind:
        raise _Usage(f"{path} holds a {got}, not a {kind}")
    return machine


def _guard(fn):
    """Map library errors onto the exit-code contract."""

    def wrapper(*args, **kwargs):
        try:
            code = fn(*args, **kwargs)
        except _Usage as exc:
            click.echo(f"error: {exc}", err=True)
            code = EXIT_USAGE
        except (ValueError, TypeError, KeyError, OracleError) as exc:
            click.echo(f"error: {exc}", err=True)
            code = EXIT_USAGE
        sys.exit(code or EXIT_OK)

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@click.group()
def main():
    """Cellular automaton and iterative array transducer workbench."""


@main.command()
@click.argument("machine_file", required=False)
@click.option("--builtin", "builtin_name", type=click.Choice(sorted(BUILTINS)), help="Use a builtin CAT.")
@click.option("--input", "word", required=True, help="Input word.")
@click.option("--cap", type=int, default=None, help="Step cap (default depends on the machine).")
@click.option("--trace", "trace_path", type=click.Path(dir_okay=False), help="Write the text trace here.")
@click.option("--svg", "svg_path", type=click.Path(dir_okay=False), help="Write an SVG space-time diagram here.")
@_guard
def run(machine_file, builtin_name, word, cap, trace_path, svg_path):
    """Run a machine on one word; prints the output, t_i and t_o."""
    machine = _machine(machine_file, builtin_name)
    if any(ch not in machine.input_alphabet for ch in word):
        raise _Usage(f"input {word!r} leaves the alphabet {''.join(machine.input_alphabet)}")
    if isinstance(machine, SeqTransducerSpec):
        return _run_sequential(machine, word)
    trace = run_machine(machine, word, cap if cap is not None else step_cap(machine, len(word)))
    if trace_path:
        with open(trace_path, "w", encoding="utf-8") as fh:
            fh.write(trace_to_text(trace))
    if svg_path:
        with open(svg_path, "w", encoding="utf-8") as fh:
            fh.write(trace_to_svg(trace))
    if trace.success:
        click.echo(trace.final_output)
        click.echo(f"accepted: t_i={trace.accept_time}")
        click.echo(f"complete: t_o={trace.output_complete_time}")
        return EXIT_OK
    steps = len(trace.configurations) - 1
    if trace.accepted:
        click.echo(f"accepted: t_i={trace.accept_time}")
        click.echo(f"incomplete: output unfinished after {steps} steps")
    else:
        click.echo(f"rejected: not accepted within {steps} steps")
    return EXIT_FAIL


def _run_sequential(machine, word):
    if machine.kind == "fst":
        outs = sorted(oracle_fst_all_paths(machine, word))
    else:
        out = oracle_dpdt(machine, word)
        outs = [] if out is None else [out]
    if not outs:
        click.echo("rejected")
        return EXIT_FAIL
    for out in outs:
        click.echo(out)
    return EXIT_OK


@main.command(name="compile")
@click.option("--from", "source_kind", required=True, type=click.Choice(["iat", "cat", "sfst", "dpdt"]))
@click.argument("source")
@click.option("-o", "--output", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--ti", default="rt", show_default=True, help="t_i of an IAT source (rt or lt:k).")
@click.option("--to", "to_", default="rt", show_default=True, help="t_o of an IAT source (rt or lt:k).")
@click.option("--sv-check-len", type=int, default=10, show_default=True,
              help="Single-valuedness check length for an sfst source (0 skips it).")
@_guard
def compile_cmd(source_kind, source, out_path, ti, to_, sv_check_len):
    """Compile a machine file (or builtin:<name>) into the other model."""
    from .compilers import compile_machine, compile_report

    src = builtin(source[len("builtin:"):]) if source.startswith("builtin:") else _load(source)
    machine = compile_machine(source_kind, src, ti, to_, sv_check_len=sv_check_len)
    with open(out_path, "wb") as fh:
        fh.write(serialize_machine(machine))
    click.echo(json.dumps(compile_report(machine), sort_keys=True))
    return EXIT_OK


@main.command()
@click.option("--machine", "machine_file", help="Machine file to check.")
@click.option("--builtin", "builtin_name", type=click.Choice(sorted(BUILTINS)), help="Check a builtin CAT.")
@click.option("--oracle", "oracle_ref", required=True, help="copy|sort|reverse|square_marker|fst:P|pdt:P|iat:P|cat:P")
@click.option("--max-len", type=int, default=10, show_default=True)
@click.option("--ti", default=None, help="Also enforce this t_i bound (rt or lt:k).")
@click.option("--to", "to_", default=None, help="Also enforce this t_o bound (rt or lt:k).")
@click.option("--json", "as_json", is_flag=True, help="Print the report as JSON.")
@click.option("--report", "report_path", type=click.Path(dir_okay=False), help="Also write the JSON report here.")
@_guard
def check(machine_file, builtin_name, oracle_ref, max_len, ti, to_, as_json, report_path):
    """Compare a machine with an oracle on all words up to --max-len."""
    machine = _machine(machine_file, builtin_name)
    if isinstance(machine, SeqTransducerSpec):
        raise _Usage("check needs a CAT or IAT; sequential machines are oracles")
    oracle = _oracle(oracle_ref)
    try:
        report = equiv_check(machine, oracle, max_len=max_len, ti=ti, to=to_)
    except OracleError as exc:
        raise _Usage(str(exc)) from None
    doc = json.dumps(report.to_dict(), sort_keys=True)
    if report_path:
        with open(report_path, "w", encoding="utf-8") as fh:
            fh.write(doc + "\n")
    click.echo(doc if as_json else report.text())
    return EXIT_OK if report.passed else EXIT_FAIL


@main.command()
@click.option("--variant", type=click.Choice(["two-general", "single-general"]), default="two-general")
@click.option("-n", "n", type=int, required=True, help="Number of cells.")
@click.option("--diagram", is_flag=True, help="Also print the space-time diagram.")
@click.option("--render", "render_fmt", type=click.Choice(["text", "svg"]), default=None,
              help="Write the space-time diagram to --output in this format.")
@click.option("-o", "--output", "out_path", type=click.Path(dir_okay=False), default="sync.svg", show_default=True)
@_guard
def sync(variant, n, diagram, render_fmt, out_path):
    """Simulate firing-squad synchronization and print the fire time."""
    if n < 1:
        raise _Usage("n must be at least 1")
    comp = build_sync(variant)
    hist = simulate_sync(comp, n, 2 * n + 2)
    fire = None
    for t, conf in enumerate(hist):
        flags = [is_fire(s) for s in conf]
        if any(flags):
            if not all(flags):
                click.echo(f"partial firing at step {t}")
                return EXIT_FAIL
            fire = t
            break
    if diagram:
        from .fssp import sync_label

        for t, conf in enumerate(hist[: (fire if fire is not None else len(hist) - 1) + 1]):
            click.echo(f"{t:3d} " + " ".join(f"{sync_label(s):>3}" for s in conf))
    if render_fmt:
        _write_sync(hist[: (fire if fire is not None else len(hist) - 1) + 1], variant, render_fmt, out_path)
    if fire is None:
        click.echo("no firing")
        return EXIT_FAIL
    click.echo(fire)
    return EXIT_OK


def _write_sync(hist, variant, fmt, path):
    from .fssp import sync_label
    from .render import TraceTable

    table = TraceTable("cat", {"kind": "sync", "variant": variant, "n": str(len(hist[0]))})
    for t, conf in enumerate(hist):
        table.rows.append((t, [(sync_label(s), "" if is_fire(s) else None) for s in conf]))
    doc = table_to_svg(table) if fmt == "svg" else table_to_text(table)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(doc)


@main.command()
@click.argument("trace_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["text", "svg"]), default="svg", show_default=True)
@click.option("-o", "--output", "out_path", type=click.Path(dir_okay=False), help="Output file (default stdout).")
@_guard
def render(trace_file, fmt, out_path):
    """Convert a stored text trace into text or SVG."""
    with open(trace_file, encoding="utf-8") as fh:
        text = fh.read()
    try:
        table = parse_trace_text(text)
    except TraceFormatError as exc:
        raise _Usage(f"{trace_file}: {exc}") from None
    doc = table_to_svg(table) if fmt == "svg" else table_to_text(table)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(doc)
    else:
        click.echo(doc, nl=False)
    return EXIT_OK


if __name__ == "__main__":
    main()
