"""Deterministic report rendering.

Two layouts: plain ``key: value`` text, and one JSON record per check
(``--format records``).  Timings are left out so that reports are
reproducible byte for byte.
"""

from __future__ import annotations

import json
from typing import Iterable, Mapping, Sequence

from .catalog import Check

__all__ = ["render", "render_text", "render_records", "summary_line"]


def summary_line(checks: Sequence[Check]) -> str:
    failed = sum(1 for c in checks if not c.verdict)
    return f"{len(checks) - failed} passed, {failed} failed"


def render_text(checks: Sequence[Check], header: Mapping[str, object] | None = None,
                notes: Iterable[str] = ()) -> str:
    lines = [f"{k}: {v}" for k, v in (header or {}).items()]
    for c in checks:
        lines.append(f"check: {c.name}")
        lines.append(f"  kind: {c.kind}")
        lines.append(f"  verdict: {'pass' if c.verdict else 'FAIL'}")
        lines.append(f"  residual: {c.residual}")
        if c.detail:
            lines.append(f"  detail: {c.detail}")
    for n in notes:
        lines.append(f"note: {n}")
    lines.append(f"summary: {summary_line(checks)}")
    return "\n".join(lines) + "\n"


def render_records(checks: Sequence[Check], header: Mapping[str, object] | None = None,
                   notes: Iterable[str] = ()) -> str:
    out = []
    if header:
        out.append(json.dumps({"record": "header", **{k: str(v) for k, v in header.items()}},
                              sort_keys=True))
    for c in checks:
        out.append(json.dumps({"record": "check", "name": c.name, "kind": c.kind,
                               "residual": c.residual, "verdict": c.verdict, "detail": c.detail},
                              sort_keys=True))
    for n in notes:
        out.append(json.dumps({"record": "note", "text": n}, sort_keys=True))
    failed = sum(1 for c in checks if not c.verdict)
    out.append(json.dumps({"record": "summary", "passed": len(checks) - failed, "failed": failed},
                          sort_keys=True))
    return "\n".join(out) + "\n"


def render(checks: Sequence[Check], fmt: str = "text", header: Mapping[str, object] | None = None,
           notes: Iterable[str] = ()) -> str:
    if fmt == "records":
        return render_records(checks, header, notes)
    return render_text(checks, header, notes)
