"""
Command-line driver: ``python -m qcoiso.main <command> ...``.

Reports go to stdout (or ``--output``) as JSON or a short text summary; logs
go to stderr. ``verify`` exits 0 on pass, 1 on fail and 2 when the result is
inconclusive or the case was skipped.
"""
import argparse
import json
import sys

import structlog
from pydantic import BaseModel, ValidationError

from qcoiso.core.config import settings
from qcoiso.core.exceptions import error_response_for
from qcoiso.core.logging_config import bind_run_context, setup_logging
from qcoiso.schemas.report_schemas import ClassicalReport, IdentityReport, RootEntry, RootListing, VerificationReport
from qcoiso.schemas.run_schemas import RunConfig
from qcoiso.services.recipes import builtin_recipe, parse_recipe, serialize_recipe
from qcoiso.services.rootsys import CartanType, is_admissible, root_system
from qcoiso.services.verify import (
    GOLDEN_NAMES, classical_report, run_full_verification, solve_golden, solve_identity_document,
)

logger = structlog.get_logger(__name__)

EXIT_CODES = {'pass': 0, 'fail': 1, 'inconclusive': 2, 'skipped': 2}
EXIT_ERROR = 3


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--format', choices=['text', 'json'], default='json')
    common.add_argument('--output', help='Write the report to this file instead of stdout.')
    common.add_argument('--log-level', default=None)

    parser = argparse.ArgumentParser(prog='qcoiso', description='Exact checks for quantum coisotropic subalgebras.')
    sub = parser.add_subparsers(dest='command', required=True)

    def case_args(p, beta=True):
        p.add_argument('--type', dest='type', help='Cartan series letter, e.g. A')
        p.add_argument('--rank', type=int)
        if beta:
            p.add_argument('--beta', help='Root literal such as L1-L4, 2L1 or 3a1+2a2')

    case_args(sub.add_parser('roots', parents=[common], help='List positive roots with admissibility marks.'), beta=False)

    p = sub.add_parser('classical', parents=[common], help='Coisotropic subalgebra of g attached to beta.')
    case_args(p)
    p.add_argument('--force', action='store_true', help='Compute even when beta is not admissible.')

    p = sub.add_parser('verify', parents=[common], help='Run the full verification pipeline.')
    case_args(p)
    p.add_argument('--recipe', help='JSON recipe file to verify instead of the built-in one.')
    p.add_argument('--max-degree', type=int, dest='max_degree')
    p.add_argument('--order', choices=['deglex', 'revlex'], default='deglex',
                   help='Word order used to pick quotient bases on the right leg.')
    p.add_argument('--force', action='store_true')
    p.add_argument('--no-timings', dest='timings', action='store_false')
    p.add_argument('--jobs', type=int, help='Worker threads for the coideal and flatness checks (0: one per core).')

    p = sub.add_parser('solve', parents=[common], help='Solve a built-in coefficient identity or one read from a template file.')
    p.add_argument('identity', nargs='?', choices=GOLDEN_NAMES)
    p.add_argument('--templates', help='JSON file with a target and template products to solve instead.')

    p = sub.add_parser('recipe', help='Recipe documents.')
    recipe_sub = p.add_subparsers(dest='recipe_command', required=True)
    v = recipe_sub.add_parser('validate', parents=[common], help='Parse and evaluate a recipe file.')
    v.add_argument('recipe')
    s = recipe_sub.add_parser('show', parents=[common], help='Print a built-in recipe as JSON.')
    case_args(s)
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    command = args.command if args.command != 'recipe' else f'recipe-{args.recipe_command}'
    values = {key: getattr(args, key, None) for key in
              ('type', 'rank', 'beta', 'max_degree', 'recipe', 'templates', 'jobs', 'output', 'format')}
    values = {k: v for k, v in values.items() if v is not None}
    return RunConfig(command=command, identity=getattr(args, 'identity', None),
                     order=getattr(args, 'order', 'deglex'), timings=getattr(args, 'timings', True),
                     force=getattr(args, 'force', False), **values)


def cmd_roots(config: RunConfig) -> RootListing:
    rs = root_system(CartanType.parse(f'{config.type}{config.rank}'))
    entries = []
    for beta in sorted(rs.positive_roots, key=lambda r: (r.height, r.simple_decomp)):
        entries.append(RootEntry(label=beta.label(), ambient=rs.ambient_label(beta), height=beta.height,
                                 admissible=is_admissible(rs, beta)))
    return RootListing(type=rs.ctype.series, rank=rs.rank, roots=entries,
                       admissible_count=sum(e.admissible for e in entries))


def cmd_classical(config: RunConfig) -> ClassicalReport:
    rs = root_system(CartanType.parse(f'{config.type}{config.rank}'))
    report, _, _ = classical_report(rs, rs.parse_root(config.beta), force=config.force)
    return report


def cmd_verify(config: RunConfig) -> VerificationReport:
    if config.recipe is not None:
        recipe = parse_recipe(config.recipe)
        return run_full_verification(recipe.rs.ctype, recipe=recipe, maxdeg=config.max_degree, force=config.force,
                                     timings=config.timings, order=config.order, jobs=config.jobs)
    ctype = CartanType.parse(f'{config.type}{config.rank}')
    return run_full_verification(ctype, config.beta, maxdeg=config.max_degree, force=config.force,
                                 timings=config.timings, order=config.order, jobs=config.jobs)


def cmd_solve(config: RunConfig) -> IdentityReport:
    if config.templates is not None:
        return solve_identity_document(config.templates)
    return solve_golden(config.identity)


def cmd_recipe_validate(config: RunConfig) -> dict:
    recipe = parse_recipe(config.recipe)
    return {'valid': True, 'case': recipe.case_label, 'generators': [name for name, _ in recipe.generators()],
            'degree': recipe.degree, 'power_assignment': recipe.schema.power_assignment}


def cmd_recipe_show(config: RunConfig) -> dict:
    return serialize_recipe(builtin_recipe(CartanType.parse(f'{config.type}{config.rank}'), config.beta))


COMMANDS = {
    'roots': cmd_roots,
    'classical': cmd_classical,
    'verify': cmd_verify,
    'solve': cmd_solve,
    'recipe-validate': cmd_recipe_validate,
    'recipe-show': cmd_recipe_show,
}


def render_text(result) -> str:
    if isinstance(result, RootListing):
        lines = [f'{result.type}{result.rank}: {result.admissible_count} admissible of {len(result.roots)} positive roots']
        lines += [f"  {'*' if r.admissible else ' '} {r.ambient:<12} {r.label}" for r in result.roots]
        return '\n'.join(lines)
    if isinstance(result, ClassicalReport):
        if result.message:
            return result.message
        lines = [f'{result.case.type}{result.case.rank} beta={result.case.beta}: dim h = {result.dim}, '
                 f'coisotropic={result.coisotropic}']
        lines += [f'  {g}' for g in result.generators]
        if result.checks and result.checks.witness:
            lines.append(f'  witness: {result.checks.witness}')
        return '\n'.join(lines)
    if isinstance(result, VerificationReport):
        lines = [f'{result.case.type}{result.case.rank} beta={result.case.beta}: {result.verdict}']
        if result.message:
            lines.append(f'  {result.message}')
        for part in (result.coideal, result.flatness):
            if part is not None:
                lines.append(f'  {type(part).__name__}: {part.verdict}')
        if result.coideal:
            lines += [f'    {g.name}: {g.witness}' for g in result.coideal.per_generator if g.witness]
        if result.flatness:
            lines += [f'    [{p.i}, {p.j}]: {p.verdict}' for p in result.flatness.per_pair if p.verdict != 'pass']
        lines += [f'  note: {n}' for n in result.recipe_notes]
        return '\n'.join(lines)
    if isinstance(result, IdentityReport):
        lines = [f'{result.name}: solvable={result.solvable} nullspace={result.nullspace_dim}']
        if result.certificate:
            lines += [f'  {t.label} = {t.coefficient}' for t in result.certificate.terms]
        if result.published_in_solution_set is not None:
            lines.append(f'  printed coefficients in solution set: {result.published_in_solution_set}')
        lines += [f'  note: {n}' for n in result.notes]
        return '\n'.join(lines)
    return json.dumps(result, indent=2)


def render(result, fmt: str) -> str:
    if fmt == 'text':
        return render_text(result)
    if isinstance(result, BaseModel):
        return result.model_dump_json(indent=2)
    return json.dumps(result, indent=2)


def emit(text: str, config: RunConfig | None) -> None:
    if config is not None and config.output is not None:
        config.output.parent.mkdir(parents=True, exist_ok=True)
        config.output.write_text(text + '\n', encoding='utf-8')
    else:
        sys.stdout.write(text + '\n')


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    config = None
    try:
        config = _run_config(args)
        bind_run_context(command=config.command)
        logger.info('Command started', command=config.command, app=settings.APP_NAME)
        result = COMMANDS[config.command](config)
    except ValidationError as exc:
        first = exc.errors()[0]
        emit(json.dumps({'success': False, 'error': {'code': 'INVALID_ARGUMENTS', 'message': first['msg']}}), None)
        return EXIT_ERROR
    except Exception as exc:
        emit(json.dumps(error_response_for(exc), indent=2), None)
        return EXIT_ERROR
    emit(render(result, config.format), config)
    if isinstance(result, VerificationReport):
        return EXIT_CODES[result.verdict]
    return 0


if __name__ == '__main__':
    sys.exit(main())
