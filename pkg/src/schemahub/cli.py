"""``schemahub`` command line: check, evolve, codegen, migrate, propcheck.

Exit codes: 0 success, 1 semantic failure, 2 parse, format, I/O or
configuration failure. Logs go to standard error; standard output carries
command results only.
"""
import functools
import logging
import os
import sys
from pathlib import Path
from typing import Dict, List, Optional

import click

from .codegen.writer import write_script
from .core.errors import ConfigError, FormatError, ParseError, SchemaHubError
from .core.validation import validate
from .data.classify import census
from .data.database import StoreMode, load_database, store_database
from .data.migrate import migrate
from .data.values import Mode
from .engine.evolution import apply_script
from .frontends.athena import parse_athena_file, print_athena
from .frontends.orion import parse_orion_file
from .logging_config import configure_logging
from .pipeline import build_registry, generate_script
from .propcheck.checker import exhaustive_sweep, report_lines, run_suite
from .propcheck.generator import GenConfig
from .settings import Settings, load_settings

log = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILURE, EXIT_INPUT = 0, 1, 2


class _State:
    def __init__(self, config: Optional[str], log_level: Optional[str]):
        self.config = config
        self.log_level = log_level
        self._settings: Optional[Settings] = None

    @property
    def settings(self) -> Settings:
        if self._settings is None:
            self._settings = load_settings(self.config)
            if not self.log_level and not os.getenv('LOG_LEVEL'):
                logging.getLogger('schemahub').setLevel(self._settings.log_level.upper())
        return self._settings


def guarded(fn):
    """Run a command body and turn its outcome into the exit code contract."""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            code = fn(*args, **kwargs)
        except (ParseError, FormatError, ConfigError, OSError) as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(EXIT_INPUT)
        except SchemaHubError as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(EXIT_FAILURE)
        sys.exit(code or EXIT_OK)
    return wrapper


_schema_opt = click.option('--schema', 'schema_path', required=True, type=click.Path(dir_okay=False),
                           help='Athena schema file.')
_orion_opt = click.option('--orion', 'orion_path', required=True, type=click.Path(dir_okay=False),
                          help='Orion change script.')
_out_opt = click.option('--out', 'out_dir', required=True, type=click.Path(file_okay=False),
                        help='Output directory.')


@click.group()
@click.option('--config', type=click.Path(dir_okay=False), default=None,
              help='YAML configuration (defaults to $SCHEMAHUB_CONFIG or the packaged defaults).')
@click.option('--log-level', default=None, help='Overrides $LOG_LEVEL.')
@click.pass_context
def cli(ctx: click.Context, config: Optional[str], log_level: Optional[str]):
    configure_logging(log_level)
    ctx.obj = _State(config, log_level)


@cli.command()
@_schema_opt
@guarded
def check(schema_path: str) -> int:
    """Report well-formedness violations of a schema."""
    schema = parse_athena_file(schema_path, strict=False)
    violations = validate(schema)
    for v in violations:
        click.echo(f"{v.rule}\t{v.path}")
    return EXIT_FAILURE if violations else EXIT_OK


@cli.command()
@_schema_opt
@_orion_opt
@click.option('--out', 'out_path', required=True, type=click.Path(dir_okay=False),
              help='Where to write the evolved schema.')
@guarded
def evolve(schema_path: str, orion_path: str, out_path: str) -> int:
    """Apply a change script to a schema and write the evolved schema."""
    schema = parse_athena_file(schema_path)
    outcome = apply_script(schema, parse_orion_file(orion_path))
    for i, text in outcome.log:
        click.echo(f"{i}\t{text}")
    if not outcome.ok:
        raise outcome.failed_at[1]
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(print_athena(outcome.schema), encoding='utf-8')
    log.info("wrote %s", out)
    return EXIT_OK


@cli.command()
@_schema_opt
@_orion_opt
@click.option('--target', required=True, help='Generator target (document, columnar, graph).')
@_out_opt
@click.option('--stack/--no-stack', default=None, help='Merge document updates into bulk writes.')
@click.pass_obj
@guarded
def codegen(state: _State, schema_path: str, orion_path: str, target: str, out_dir: str,
            stack: Optional[bool]) -> int:
    """Generate a database-specific migration script and its provenance map."""
    settings = state.settings
    registry = build_registry(settings)
    if target not in registry.names():
        raise ConfigError(f"unknown target {target!r}; configured: {', '.join(registry.names())}")
    schema = parse_athena_file(schema_path)
    script = parse_orion_file(orion_path)
    stack = settings.codegen.stack if stack is None else stack
    generator, generated = generate_script(schema, script, target, registry, stack)
    text_path, map_path = write_script(generated, generator, out_dir)
    click.echo(f"{text_path}\t{len(generated.statements)} statements")
    click.echo(f"{map_path}\t{len(generated.unsupported)} unsupported")
    return EXIT_OK


def _census_lines(label: str, counts: Dict[str, Dict[int, int]]) -> List[str]:
    return [f"{label}\t{name}\t{var}\t{n}" for name, per_var in counts.items() for var, n in per_var.items()]


@cli.command(name='migrate')
@_schema_opt
@_orion_opt
@click.option('--db', 'db_dir', required=True, type=click.Path(file_okay=False, exists=True),
              help='Dataset directory (manifest.yaml plus one ndjson file per type).')
@_out_opt
@click.option('--mode', type=click.Choice([m.value for m in Mode]), default=None)
@click.option('--store', type=click.Choice([s.value for s in StoreMode]), default=None,
              help='Overrides the store mode of the dataset manifest.')
@click.pass_obj
@guarded
def migrate_cmd(state: _State, schema_path: str, orion_path: str, db_dir: str, out_dir: str,
                mode: Optional[str], store: Optional[str]) -> int:
    """Run the reference data migration over a dataset directory."""
    settings = state.settings
    schema = parse_athena_file(schema_path)
    script = parse_orion_file(orion_path)
    db = load_database(db_dir)
    if store is not None:
        db.mode = StoreMode(store)
    run_mode = Mode(mode) if mode else settings.migration.mode

    for line in _census_lines('before', census(db, schema)):
        click.echo(line)
    migrated, report = migrate(db, schema, script, run_mode)
    outcome = apply_script(schema, script)
    for line in report.lines():
        click.echo(line)
    for line in _census_lines('after', census(migrated, outcome.schema)):
        click.echo(line)

    store_database(migrated, out_dir)
    report_path = Path(out_dir) / 'migration.report'
    report_path.write_text("".join(line + "\n" for line in report.lines()), encoding='utf-8')
    log.info("wrote %s (%d warnings)", report_path, report.warnings)
    return EXIT_OK


@cli.command()
@click.option('--seed', type=int, default=None)
@click.option('--cases', type=int, default=None, help='Cases per operation kind.')
@click.option('--store', type=click.Choice([s.value for s in StoreMode]), default=None)
@click.option('--sweep/--no-sweep', default=True, help='Also run the exhaustive sweep over tiny schemas.')
@click.pass_obj
@guarded
def propcheck(state: _State, seed: Optional[int], cases: Optional[int], store: Optional[str],
              sweep: bool) -> int:
    """Check every operation kind against generated schemas."""
    p = state.settings.propcheck
    cases = p.cases if cases is None else cases
    if cases < 1:
        raise click.BadParameter('must be at least 1', param_hint='--cases')
    cfg = GenConfig(seed=p.seed if seed is None else seed, max_types=p.max_types,
                    max_variations=p.max_variations, max_features=p.max_features,
                    mode=StoreMode(store) if store else state.settings.migration.store)
    results = run_suite(cfg, cases, workers=p.workers)
    for line in report_lines(results):
        click.echo(line)
    failed = any(not r.ok for r in results.values())
    if sweep:
        swept = exhaustive_sweep()
        click.echo(f"sweep\t{swept.schemas}\t{swept.checked}\t{len(swept.failures)}")
        for f in swept.findings:
            click.echo(f"finding\t{f.kind.value}\t{f.clause}\t{f.example}")
        failed = failed or bool(swept.failures)
    return EXIT_FAILURE if failed else EXIT_OK


def main():
    cli(prog_name='schemahub')


if __name__ == '__main__':
    main()
