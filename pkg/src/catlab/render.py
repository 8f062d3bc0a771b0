"""Trace export: line-oriented text and SVG space-time diagrams."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

from .engine import RunTrace
from .machine import state_name


class TraceFormatError(ValueError):
    pass


@dataclass
class TraceTable:
    """Rows of (label, emitted chunk or None) per cell, one row per step."""

    kind: str
    header: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)


def trace_table(trace: RunTrace, label=state_name) -> TraceTable:
    header = {
        "kind": trace.kind,
        "word": trace.word,
        "accept": trace.accept_time,
        "complete": trace.output_complete_time,
        "output": trace.final_output,
    }
    table = TraceTable(trace.kind, header)
    prev = None
    for conf in trace.configurations:
        row = []
        if trace.kind == "cat":
            for i, s in enumerate(conf.cells):
                chunk = None
                if conf.outputs[i] is not None and (prev is None or prev.outputs[i] is None):
                    chunk = conf.outputs[i]
                row.append((label(s), chunk))
        else:
            for j, s in enumerate(conf.cells):
                chunk = conf.emitted if j == 0 and conf.time > 0 and conf.emitted else None
                row.append((label(s), chunk))
        table.rows.append((conf.time, row))
        prev = conf
    return table


def _fmt(value):
    return "-" if value is None else str(value)


def table_to_text(table: TraceTable) -> str:
    head = " ".join(f"{k}={_fmt(v)}" for k, v in table.header.items())
    lines = [f"# trace {head}"]
    for t, row in table.rows:
        cells = [lab if chunk is None else f"{lab}[{chunk}]" for lab, chunk in row]
        lines.append("\t".join([str(t)] + cells))
    return "\n".join(lines) + "\n"


def trace_to_text(trace: RunTrace, label=state_name) -> str:
    return table_to_text(trace_table(trace, label))


def parse_trace_text(text: str) -> TraceTable:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("# trace"):
        raise TraceFormatError("not a trace document")
    header = {}
    for item in lines[0][len("# trace"):].split():
        key, _, value = item.partition("=")
        header[key] = None if value == "-" else value
    table = TraceTable(header.get("kind") or "cat", header)
    for ln in lines[1:]:
        parts = ln.split("\t")
        try:
            t = int(parts[0])
        except ValueError:
            raise TraceFormatError(f"bad step number in {ln!r}") from None
        row = []
        for cell in parts[1:]:
            if cell.endswith("]") and "[" in cell:
                k = cell.rindex("[")
                row.append((cell[:k], cell[k + 1:-1]))
            else:
                row.append((cell, None))
        table.rows.append((t, row))
    if not table.rows:
        raise TraceFormatError("trace has no steps")
    return table


def _colour(label: str) -> str:
    h = hashlib.md5(label.encode("utf-8")).digest()
    return f"#{128 + h[0] // 2:02x}{128 + h[1] // 2:02x}{128 + h[2] // 2:02x}"


def table_to_svg(table: TraceTable, cell: int = 18) -> str:
    if not table.rows:
        raise TraceFormatError("trace has no steps")
    width = max(len(row) for _, row in table.rows)
    margin = 30
    w = margin + width * cell + 10
    h = margin + len(table.rows) * cell + 10
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}">',
        f'<text x="2" y="12" font-size="10">{escape(str(table.header.get("word", "")))}</text>',
    ]
    for k, (t, row) in enumerate(table.rows):
        y = margin + k * cell
        out.append(f'<text x="2" y="{y + cell - 5}" font-size="9">{t}</text>')
        for i, (lab, chunk) in enumerate(row):
            x = margin + i * cell
            stroke = 'stroke="#d00000" stroke-width="3"' if chunk is not None else 'stroke="#ffffff" stroke-width="1"'
            title = lab if chunk is None else f"{lab} emits {chunk}"
            out.append(
                f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="{_colour(lab)}" {stroke}>'
                f"<title>{escape(title)}</title></rect>"
            )
            if chunk is not None:
                out.append(
                    f'<text x="{x + 2}" y="{y + cell - 5}" font-size="9" class="emit">{escape(chunk)}</text>'
                )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def trace_to_svg(trace: RunTrace, label=state_name) -> str:
    return table_to_svg(trace_table(trace, label))
