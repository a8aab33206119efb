"""One pass/fail line per acceptance criterion, filled in by test_acceptance."""

from __future__ import annotations

LINES: dict[int, str] = {}


def record(num: int, ok: bool, detail: str) -> bool:
    line = f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    LINES[num] = line
    print(line)
    return ok
