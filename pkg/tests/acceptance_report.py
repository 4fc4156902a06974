"""Collects one PASS/FAIL line per acceptance criterion for the terminal summary."""

LINES = {}


def record(number: int, ok: bool, detail: str) -> str:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    LINES[number] = line
    print(line, flush=True)
    return line
