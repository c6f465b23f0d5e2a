"""
Command-line driver for the Tracy-Widom laboratory
"""
import argparse
import json
import logging
import math
import sys
from typing import Dict, List, Optional, Sequence

import numpy as np

from cache_file import CacheManager
from config import Config, validate_config
from database import db_manager
from distributions import F4Convention, registry
from ensembles import (MODELS, ENTRY_LAWS, P_LAWS, SERVICE_LAWS, QueueConstants, SampleSet, ScalingSpec,
                       center_scale, sample_gaussian_ensemble, sample_growth_env, sample_lis,
                       sample_queue, sample_wigner)
from errors import EXIT_DATA, EXIT_OK, EXIT_USAGE, DataError, InvalidArgumentError, TwlabError, exit_code_for
from fredholm import fredholm_det_f2_grid
from gof import histogram, ks_distance, summary_stats
from painleve import solve_hastings_mcleod

logger = logging.getLogger(__name__)

TABLE_COLUMNS = {1: ('F1', 'f1'), 2: ('F2', 'f2'), 4: ('F4', 'f4')}

# Scalings whose values are compared against F_beta without an explicit --beta
TW_SCALINGS = ('edge', 'cube-root')


def configure_logging(level: Optional[str] = None):
    """Logs go to stderr (and LOG_FILE if set); stdout carries data only"""
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if Config.LOG_FILE:
        handlers.append(logging.FileHandler(Config.LOG_FILE))
    logging.basicConfig(
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        level=getattr(logging, (level or Config.LOG_LEVEL).upper(), logging.WARNING),
        handlers=handlers,
    )


def _betas(choice: str) -> Sequence[int]:
    return Config.BETAS if choice == 'all' else (int(choice),)


def _fmt(value: float, digits: int) -> str:
    return f"{value:.{digits}g}"


def _write(text: str, path: Optional[str]):
    if path:
        with open(path, 'w', encoding='utf-8', newline='\n') as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


class TwlabCommands:
    """Implementations of the CLI commands"""

    def __init__(self, cache_path: Optional[str] = None):
        self.logger = logging.getLogger(__name__)
        self.cache = CacheManager(cache_path)
        registry.use_loader(lambda: self.cache.load_or_build(solve_hastings_mcleod))

    # -- table ---------------------------------------------------------------

    def table(self, args) -> int:
        """Tabulate CDFs and densities on a regular grid"""
        if not (math.isfinite(args.start) and math.isfinite(args.stop)) or args.start >= args.stop:
            raise InvalidArgumentError(f"--from must be below --to, got [{args.start}, {args.stop}]")
        if not args.step > 0:
            raise InvalidArgumentError(f"--step must be positive, got {args.step}")

        rows = int(math.floor((args.stop - args.start) / args.step + 1e-9)) + 1
        grid = [args.start + i * args.step for i in range(rows)]
        betas = _betas(args.beta)
        evaluators = {beta: registry.evaluator(beta, args.convention) for beta in betas}

        header = ['s'] + [name for beta in betas for name in TABLE_COLUMNS[beta]]
        records: List[Dict[str, float]] = []
        clamped = 0
        for s in grid:
            record = {'s': s}
            for beta in betas:
                cdf_name, pdf_name = TABLE_COLUMNS[beta]
                value, outside = evaluators[beta].cdf_with_flag(s)
                clamped += outside
                record[cdf_name] = value
                record[pdf_name] = evaluators[beta].pdf(s)
            records.append(record)
        if clamped:
            self.logger.warning(f"{clamped} table entries outside the evaluation window were clamped")

        if args.format == 'json':
            payload = {'convention': F4Convention.parse(args.convention or Config.F4_CONVENTION).value,
                       'columns': header, 'rows': records}
            text = json.dumps(payload) + '\n'
        else:
            lines = [','.join(header)]
            lines.extend(','.join(_fmt(record[name], 12) for name in header) for record in records)
            text = '\n'.join(lines) + '\n'
        _write(text, args.out)
        return EXIT_OK

    # -- moments -------------------------------------------------------------

    def moments(self, args) -> int:
        """Mean, sd, skewness and excess kurtosis of F_beta"""
        results = {beta: registry.evaluator(beta, args.convention).moments() for beta in _betas(args.beta)}
        if args.json:
            payload = {str(beta): stats.to_dict() for beta, stats in results.items()}
            text = json.dumps(payload) + '\n'
        else:
            lines = [f"{'beta':>4} {'mean':>12} {'sd':>12} {'skew':>12} {'kurt':>12}"]
            for beta, stats in results.items():
                cells = (stats.mean, stats.sd, stats.skewness, stats.excess_kurtosis)
                lines.append(f"{beta:>4} " + ' '.join(f"{_fmt(c, 6):>12}" for c in cells))
            text = '\n'.join(lines) + '\n'
        _write(text, None)
        return EXIT_OK

    # -- sample --------------------------------------------------------------

    def build_sample(self, args) -> SampleSet:
        """Run the sampler selected by --model"""
        workers = args.workers or Config.WORKERS
        model = args.model
        constants = None
        if (args.c1 is None) != (args.c2 is None):
            raise InvalidArgumentError("--c1 and --c2 must be given together")

        if model in ('goe', 'gue', 'gse'):
            beta = Config.MODEL_LIMITS[model]
            raw = sample_gaussian_ensemble(beta, args.n, args.samples, args.seed, workers, fast=args.fast)
            convention = F4Convention.parse(args.convention or Config.F4_CONVENTION)
            return center_scale(raw, ScalingSpec(sigma=1.0, N=args.n, beta=beta, convention=convention))
        if model == 'wigner':
            return sample_wigner(args.n, args.entry_law, args.samples, args.seed, workers, symmetry=args.symmetry)
        if model == 'lis':
            return sample_lis(args.n, args.samples, args.seed, workers)
        if model == 'queue':
            if args.c1 is not None:
                constants = QueueConstants(c1=args.c1, c2=args.c2, estimated=False)
            return sample_queue(args.k, args.n, args.service, args.samples, args.seed, workers,
                                scaling=args.scaling, constants=constants)
        if model == 'growth':
            if args.c1 is not None:
                constants = (args.c1, args.c2)
            return sample_growth_env(args.p_law, args.t, args.samples, args.seed, workers, site=args.site,
                                     quenched=args.quenched, p_a=args.p_a, p_b=args.p_b,
                                     in_place=args.in_place_sweep, constants=constants)
        raise InvalidArgumentError(f"Unknown model '{model}'")

    def _record(self, args) -> bool:
        return bool(args.record or Config.RECORD_RUNS)

    def sample(self, args) -> int:
        """Draw a SampleSet and write it as JSON or CSV"""
        sample = self.build_sample(args)
        if args.format == 'csv':
            lines = ['index,value,raw']
            raw = sample.raw if sample.raw is not None else sample.values
            lines.extend(f"{i},{v:.17g},{r:.17g}" for i, (v, r) in enumerate(zip(sample.values, raw)))
            text = '\n'.join(lines) + '\n'
        else:
            text = json.dumps(sample.to_dict()) + '\n'
        _write(text, args.out)

        if self._record(args):
            stats = summary_stats(sample.values) if len(sample) >= 2 else None
            db_manager.record_sample_run(sample, stats)
        return EXIT_OK

    # -- compare -------------------------------------------------------------

    def load_sample(self, path: str) -> SampleSet:
        try:
            with open(path, 'r', encoding='utf-8') as handle:
                data = json.load(handle)
        except json.JSONDecodeError as e:
            raise DataError(f"{path} is not valid JSON: {e}") from e
        except OSError as e:
            raise DataError(f"Cannot read {path}: {e}") from e
        if not isinstance(data, dict):
            raise DataError(f"{path} does not hold a sample set object")
        return SampleSet.from_dict(data)

    def compare(self, args) -> int:
        """KS distance and moments of a sample against F_beta"""
        if args.input:
            sample = self.load_sample(args.input)
        elif args.model:
            sample = self.build_sample(args)
        else:
            raise InvalidArgumentError("compare needs --input PATH or --model")

        beta = args.beta
        if beta is None:
            scaling = sample.params.get('scaling')
            # brownian queue values and raw growth heights have no Tracy-Widom limit of their own
            if scaling not in TW_SCALINGS:
                raise InvalidArgumentError(
                    f"No default beta for {sample.model} samples with scaling '{scaling}'; pass --beta")
            beta = Config.MODEL_LIMITS.get(sample.model)
            if sample.model == 'wigner' and sample.params.get('symmetry') == 'hermitian':
                beta = 2
            if beta is None:
                raise InvalidArgumentError(f"No default beta for model '{sample.model}'; pass --beta")
        convention = sample.params.get('convention') or args.convention
        evaluator = registry.evaluator(beta, convention)

        ks = ks_distance(sample.values, evaluator.cdf_array, vectorized=True)
        stats = summary_stats(sample.values)
        reference = evaluator.moments()
        payload = {
            'model': sample.model,
            'beta': beta,
            'ks': ks,
            **stats.to_dict(),
            'reference': reference.to_dict(),
        }
        _write(json.dumps(payload) + '\n', None)

        if args.histogram:
            hist = histogram(sample.values, bins=args.bins)
            lines = ['s,density']
            lines.extend(f"{c:.12g},{d:.12g}" for c, d in zip(hist.centers, hist.density))
            _write('\n'.join(lines) + '\n', args.histogram)

        if self._record(args):
            run_id = None
            if not args.input:
                run_id = db_manager.record_sample_run(sample, stats).id
            db_manager.record_comparison(sample.model, beta, ks, stats, sample_run_id=run_id)
        return EXIT_OK

    # -- crosscheck ----------------------------------------------------------

    def crosscheck(self, args) -> int:
        """Maximum gap between the Painleve and Fredholm routes to F2"""
        if args.start >= args.stop or args.points < 2:
            raise InvalidArgumentError("crosscheck needs --from < --to and --points >= 2")
        grid = np.linspace(args.start, args.stop, args.points)
        evaluator = registry.evaluator(2)
        painleve = evaluator.cdf_array(grid)
        fredholm = fredholm_det_f2_grid(grid, n=args.nodes)
        gaps = np.abs(painleve - fredholm)
        worst = int(np.argmax(gaps))
        payload = {
            'max_abs_diff': float(gaps[worst]),
            'at': float(grid[worst]),
            'points': int(args.points),
            'nodes': int(args.nodes),
        }
        _write(json.dumps(payload) + '\n', None)
        return EXIT_OK

    # -- history -------------------------------------------------------------

    def history(self, args) -> int:
        """List the run ledger"""
        runs = db_manager.get_recent_runs(args.limit)
        comparisons = db_manager.get_comparisons()[:args.limit]
        lines = ['Sample runs:']
        for run in runs:
            mean = '-' if run.mean is None else _fmt(run.mean, 6)
            lines.append(f"  #{run.id} {run.created_at:%Y-%m-%d %H:%M} {run.model} "
                         f"seed={run.seed} count={run.count} mean={mean} params={run.params}")
        lines.append('Comparisons:')
        for comparison in comparisons:
            lines.append(f"  #{comparison.id} {comparison.created_at:%Y-%m-%d %H:%M} {comparison.model} "
                         f"beta={comparison.beta} ks={comparison.ks:.4f} n={comparison.n}")
        _write('\n'.join(lines) + '\n', None)
        return EXIT_OK


def add_model_arguments(parser: argparse.ArgumentParser, model_required: bool):
    parser.add_argument('--model', choices=MODELS, required=model_required)
    parser.add_argument('--n', type=int, default=100, help='matrix size, permutation length or stations')
    parser.add_argument('--k', type=int, default=2, help='customers (queue)')
    parser.add_argument('--t', type=int, default=100, help='time steps (growth)')
    parser.add_argument('--samples', type=int, default=1000)
    parser.add_argument('--seed', type=int, default=0)
    parser.add_argument('--workers', type=int, default=None)
    parser.add_argument('--fast', action='store_true', help='tridiagonal model for goe/gue/gse')
    parser.add_argument('--entry-law', choices=ENTRY_LAWS, default='rademacher')
    parser.add_argument('--symmetry', choices=('real', 'hermitian'), default='real')
    parser.add_argument('--service', choices=SERVICE_LAWS, default='exponential')
    parser.add_argument('--scaling', choices=('brownian', 'cube-root'), default='brownian')
    parser.add_argument('--c1', type=float, default=None)
    parser.add_argument('--c2', type=float, default=None)
    parser.add_argument('--site', type=int, default=0)
    parser.add_argument('--p-law', choices=P_LAWS, default='uniform')
    parser.add_argument('--p-a', type=float, default=0.5)
    parser.add_argument('--p-b', type=float, default=1.0)
    mode = parser.add_mutually_exclusive_group()
    mode.add_argument('--quenched', dest='quenched', action='store_true', default=True)
    mode.add_argument('--annealed', dest='quenched', action='store_false')
    parser.add_argument('--in-place-sweep', action='store_true',
                        help='growth: lateral moves read the already-updated left neighbour')
    parser.add_argument('--record', action='store_true', help='write the run to the ledger')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='twlab', description='Tracy-Widom distributions and universality checks')
    parser.add_argument('--version', action='version', version=f'%(prog)s {Config.VERSION}')
    parser.add_argument('--cache', default=None, help='Painleve table cache file')
    parser.add_argument('--database', default=None, help='run ledger database URL')
    parser.add_argument('--log-level', default=None)
    commands = parser.add_subparsers(dest='command', required=True)

    conventions = [c.value for c in F4Convention]
    beta_choices = ('1', '2', '4', 'all')

    table = commands.add_parser('table', help='tabulate F_beta and its density')
    table.add_argument('--beta', choices=beta_choices, default='all')
    table.add_argument('--from', dest='start', type=float, default=-8.0)
    table.add_argument('--to', dest='stop', type=float, default=4.0)
    table.add_argument('--step', type=float, default=0.05)
    table.add_argument('--format', choices=('csv', 'json'), default='csv')
    table.add_argument('--convention', choices=conventions, default=None)
    table.add_argument('--out', default=None)

    moments = commands.add_parser('moments', help='mean, sd, skewness, excess kurtosis')
    moments.add_argument('--beta', choices=beta_choices, default='all')
    moments.add_argument('--json', action='store_true')
    moments.add_argument('--convention', choices=conventions, default=None)

    sample = commands.add_parser('sample', help='draw scaled statistics from a model')
    add_model_arguments(sample, model_required=True)
    sample.add_argument('--format', choices=('json', 'csv'), default='json')
    sample.add_argument('--convention', choices=conventions, default=None)
    sample.add_argument('--out', default=None)

    compare = commands.add_parser('compare', help='KS distance of a sample against F_beta')
    compare.add_argument('--input', default=None, help='sample set JSON file')
    add_model_arguments(compare, model_required=False)
    compare.add_argument('--beta', type=int, choices=Config.BETAS, default=None)
    compare.add_argument('--convention', choices=conventions, default=None)
    compare.add_argument('--histogram', default=None, help='write s,density CSV here')
    compare.add_argument('--bins', type=int, default=50)

    crosscheck = commands.add_parser('crosscheck', help='Painleve vs Fredholm F2')
    crosscheck.add_argument('--from', dest='start', type=float, default=-8.0)
    crosscheck.add_argument('--to', dest='stop', type=float, default=4.0)
    crosscheck.add_argument('--points', type=int, default=121)
    crosscheck.add_argument('--nodes', type=int, default=Config.FREDHOLM_NODES)

    history = commands.add_parser('history', help='list the run ledger')
    history.add_argument('--limit', type=int, default=20)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run one command and return its exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    configure_logging(args.log_level)
    try:
        validate_config()
    except ValueError as e:
        logger.error(f"Configuration error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    try:
        if args.database:
            db_manager.configure(args.database)
        commands = TwlabCommands(args.cache)
        return getattr(commands, args.command)(args)
    except TwlabError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return exit_code_for(e)
    except OSError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == '__main__':
    sys.exit(main())
