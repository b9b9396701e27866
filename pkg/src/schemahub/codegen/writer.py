import logging
from pathlib import Path
from typing import List, Tuple

from .base import AbstractGenerator, GeneratedScript

log = logging.getLogger(__name__)


def render_script(script: GeneratedScript, comment: str = "//") -> str:
    """Script text: header, then statements with unsupported markers in op order."""
    schema, version = script.using
    lines = [
        f"{comment} Script: {script.name}",
        f"{comment} Using: {schema}:{version}",
        f"{comment} Target: {script.target.value}",
    ]
    pending = sorted(script.unsupported, key=lambda u: u.op_index)
    blocks: List[str] = []
    for s in script.statements:
        while pending and pending[0].op_index < min(s.ops):
            blocks.append(_marker(pending.pop(0), comment))
        blocks.append(s.render(comment))
    blocks.extend(_marker(u, comment) for u in pending)
    return "\n".join(lines) + "\n\n" + "\n\n".join(blocks) + ("\n" if blocks else "")


def _marker(u, comment: str) -> str:
    return f"{comment} UNSUPPORTED [{u.op_index}] {u.operation} ({u.reason})"


def provenance_lines(script: GeneratedScript) -> List[str]:
    rows: List[Tuple[int, int]] = script.provenance()
    lines = [(op, str(stmt)) for op, stmt in rows] + [(u.op_index, "-") for u in script.unsupported]
    lines.sort(key=lambda row: (row[0], row[1] == "-", int(row[1]) if row[1] != "-" else 0))
    return [f"{op}\t{stmt}" for op, stmt in lines]


def write_script(script: GeneratedScript, generator: AbstractGenerator, out_dir) -> Tuple[Path, Path]:
    """Write ``<script>.<target>.<ext>`` and its ``<script>.<target>.map`` sidecar."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    text_path = out / f"{script.name}.{script.target.value}.{generator.extension}"
    map_path = out / f"{script.name}.{script.target.value}.map"
    text_path.write_text(render_script(script, generator.comment), encoding="utf-8")
    map_path.write_text("".join(line + "\n" for line in provenance_lines(script)), encoding="utf-8")
    log.info("wrote %s (%d statements, %d unsupported)", text_path, len(script.statements),
             len(script.unsupported))
    return text_path, map_path
