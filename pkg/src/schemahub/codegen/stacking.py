from dataclasses import replace
from typing import List

from .base import Backend, GeneratedScript, Statement


def bulk_write(run: List[Statement]) -> Statement:
    entries = []
    for s in run:
        lines = [f" // {c}" for c in s.comments]
        lines.append(" {updateMany: {\n"
                     f"    filter: {s.filter},\n"
                     f"    update: {s.update}}}}}")
        entries.append("\n".join(lines))
    text = f"{run[0].collection}.bulkWrite([\n" + ",\n".join(entries) + "\n])"
    ops = tuple(op for s in run for op in s.ops)
    return Statement(text, ops, collection=run[0].collection, entries=tuple(run))


def stack_optimize(script: GeneratedScript) -> GeneratedScript:
    """Merge maximal runs of same-collection updateMany statements into bulkWrites.

    Pipeline statements ($lookup/$out/$merge) and anything else not in
    updateMany form break a run; a run of one is left as it is.
    """
    if script.target is not Backend.DOCUMENT:
        raise ValueError(f"stacking applies to document scripts, not {script.target.value}")
    out: List[Statement] = []
    run: List[Statement] = []

    def flush():
        if len(run) > 1:
            out.append(bulk_write(run))
        else:
            out.extend(run)
        run.clear()

    for s in script.statements:
        if s.stackable and (not run or run[0].collection == s.collection):
            run.append(s)
            continue
        flush()
        if s.stackable:
            run.append(s)
        else:
            out.append(s)
    flush()
    return replace(script, statements=tuple(out))


def flatten(script: GeneratedScript) -> List[Statement]:
    """Statements with every bulkWrite expanded back into its entries."""
    out: List[Statement] = []
    for s in script.statements:
        out.extend(s.entries or (s,))
    return out
