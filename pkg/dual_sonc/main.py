import argparse
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from dual_sonc import __version__
from dual_sonc.bound import BoundResult, dual_sonc_bound, relaxed_bound
from dual_sonc.circuits import CircuitInstance, circuit_verdict
from dual_sonc.dual_cone import (
    DualVector,
    check_membership_lambda,
    check_membership_tau,
)
from dual_sonc.errors import (
    DualSoncError,
    OracleBudgetError,
    RelaxationUnboundedError,
)
from dual_sonc.example_instances.loader import InstanceLoader
from dual_sonc.oracle import OracleConfig, sample_min
from dual_sonc.reports import ReportMixin, to_json
from dual_sonc.support import ExponentialSum, parse_instance, sign_split

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_UNCERTIFIED = 2


@dataclass(frozen=True)
class Report(ReportMixin):
    instance: str
    status: str
    opt: Optional[float] = None
    lower_bound: Optional[float] = None
    branch: Optional[str] = None
    c_star: Optional[float] = None
    wall_time_ms: Optional[float] = None
    certificate: Dict = field(default_factory=dict)
    epsilon: Optional[float] = None
    tol: Optional[float] = None
    oracle_min: Optional[float] = None
    reference: Optional[float] = None
    deviation: Optional[float] = None
    error: Optional[str] = None

    @classmethod
    def from_result(cls, instance: str, result: BoundResult, elapsed: float, **extra):
        certificate = result.certificate.to_dict()['taus'] if result.certificate else {}
        return cls(
            instance=instance,
            status=result.status.value,
            opt=result.gamma_star if result.bounded else None,
            lower_bound=result.lower_bound if result.bounded else None,
            branch=result.branch.value if result.branch else None,
            c_star=result.c_star if result.bounded else None,
            wall_time_ms=elapsed * 1000.0,
            certificate=certificate,
            epsilon=getattr(result, 'epsilon', None),
            tol=getattr(result, 'tol', None),
            **extra,
        )


def _load(path: str) -> ExponentialSum:
    path = Path(path)
    return parse_instance(path.read_text(encoding='utf-8'), name=path.stem)


def _emit(args, payload: ReportMixin):
    if args.json:
        print(payload.to_json())
    else:
        print(payload.to_text())


def _solve(f: ExponentialSum, epsilon: Optional[float] = None):
    start = time.perf_counter()
    if epsilon is None:
        result = dual_sonc_bound(f)
    else:
        result = relaxed_bound(f, epsilon)
    return result, time.perf_counter() - start


def cmd_bound(args) -> int:
    f = _load(args.file)
    try:
        result, elapsed = _solve(f, args.relax)
    except RelaxationUnboundedError as exception:
        print(f'uncertified: {exception}', file=sys.stderr)
        return EXIT_UNCERTIFIED

    extra = {}
    if args.oracle:
        try:
            extra['oracle_min'] = sample_min(f, OracleConfig()).value
        except OracleBudgetError as exception:
            logger.warning('oracle skipped: %s', exception)

    _emit(args, Report.from_result(f.name, result, elapsed, **extra))

    if not result.bounded:
        print(
            'infeasible: no constant shift puts the instance into the dual cone',
            file=sys.stderr,
        )
        return EXIT_UNCERTIFIED
    if args.relax is not None and not result.certified:
        print(
            f'uncertified: constraints violated by tol={result.tol:.6g}',
            file=sys.stderr,
        )
        return EXIT_UNCERTIFIED
    return EXIT_OK


@dataclass(frozen=True)
class DualCheckReport(ReportMixin):
    instance: str
    verdict: str
    tau_member: bool
    lambda_member: bool
    agreement: bool
    reason: str
    certificate: Dict


def cmd_check_dual(args) -> int:
    f = _load(args.file)
    dec = sign_split(f)
    w = DualVector.from_sum(f)

    by_tau = check_membership_tau(w, dec)
    by_lambda = check_membership_lambda(w, dec)
    agreement = by_tau.member == by_lambda.member
    if not agreement:
        logger.error('membership representations disagree on %s', f.name)

    report = DualCheckReport(
        instance=f.name,
        verdict='member' if by_tau.member else 'not_member',
        tau_member=by_tau.member,
        lambda_member=by_lambda.member,
        agreement=agreement,
        reason=by_tau.reason or by_lambda.reason,
        certificate=by_tau.certificate.to_dict()['taus'] if by_tau.certificate else {},
    )
    _emit(args, report)
    return EXIT_OK if by_tau.member and agreement else EXIT_UNCERTIFIED


@dataclass(frozen=True)
class CircuitReport(ReportMixin):
    instance: str
    verdict: str
    theta: Optional[float]
    inner_coefficient: float
    equality: bool
    lambdas: Dict


def cmd_check_circuit(args) -> int:
    f = _load(args.file)
    verdict = circuit_verdict(CircuitInstance.from_sum(f))
    circuit = verdict.circuit

    report = CircuitReport(
        instance=f.name,
        verdict='nonnegative' if verdict.nonnegative else 'not certified',
        theta=circuit.theta if circuit else None,
        inner_coefficient=verdict.inner_coefficient,
        equality=verdict.equality,
        lambdas=circuit.lambda_used.to_dict() if circuit else {},
    )
    _emit(args, report)
    return EXIT_OK if verdict.nonnegative else EXIT_UNCERTIFIED


def _bench_row(path: Path, references: Dict[str, Optional[float]]) -> Report:
    reference = references.get(path.stem)
    try:
        f = parse_instance(path.read_text(encoding='utf-8'), name=path.stem)
        result, elapsed = _solve(f)
    except (DualSoncError, OSError) as exception:
        logger.warning('%s failed: %s', path.name, exception)
        return Report(
            instance=path.stem,
            status='Error',
            reference=reference,
            error=str(exception),
        )

    deviation = None
    if reference is not None and result.bounded:
        deviation = result.gamma_star - reference
    return Report.from_result(
        path.stem, result, elapsed, reference=reference, deviation=deviation
    )


def run_bench(directory: str, workers: int = 1) -> List[Report]:
    loader = InstanceLoader(directory)
    references = loader.references()
    paths = loader.instance_paths()
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        return list(executor.map(lambda path: _bench_row(path, references), paths))


def _format_cell(value, width):
    if value is None:
        text = '-'
    elif isinstance(value, float):
        text = f'{value:.6g}'
    else:
        text = str(value)
    return text.rjust(width)


def cmd_bench(args) -> int:
    if not Path(args.directory).is_dir():
        print(f'error: {args.directory} is not a directory', file=sys.stderr)
        return EXIT_INPUT_ERROR

    rows = run_bench(args.directory, args.workers)
    if args.json:
        print(to_json([row.to_dict() for row in rows]))
        return EXIT_OK

    columns = [
        ('instance', 18),
        ('status', 10),
        ('opt', 12),
        ('lower_bound', 12),
        ('wall_time_ms', 12),
        ('reference', 10),
        ('deviation', 12),
    ]
    print(' '.join(name.rjust(width) for name, width in columns))
    for row in rows:
        cells = [_format_cell(getattr(row, name), width) for name, width in columns]
        print(' '.join(cells))
        if row.error:
            print(f'    error: {row.error}')
    return EXIT_OK


def cmd_oracle(args) -> int:
    f = _load(args.file)
    cfg = OracleConfig(grid_points_per_axis=args.grid, box_radius=args.range)
    _emit(args, sample_min(f, cfg))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='dual-sonc',
        description='Certified lower bounds for sparse polynomials and '
        'exponential sums from the dual SONC cone.',
    )
    parser.add_argument(
        '--version', action='version', version=f'%(prog)s {__version__}'
    )
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument(
        '-v', '--verbose', action='store_true', help='log debug output'
    )
    verbosity.add_argument(
        '-q', '--quiet', action='store_true', help='log warnings only'
    )
    commands = parser.add_subparsers(dest='command', required=True)

    bound = commands.add_parser('bound', help='compute the dual SONC lower bound')
    bound.add_argument('file')
    bound.add_argument(
        '--relax', type=float, metavar='EPSILON', help='violation weight'
    )
    bound.add_argument(
        '--oracle', action='store_true', help='append the sampled minimum'
    )
    bound.add_argument('--json', action='store_true')
    bound.set_defaults(handler=cmd_bound)

    check_dual = commands.add_parser('check-dual', help='test dual cone membership')
    check_dual.add_argument('file')
    check_dual.add_argument('--json', action='store_true')
    check_dual.set_defaults(handler=cmd_check_dual)

    check_circuit = commands.add_parser('check-circuit', help='circuit number test')
    check_circuit.add_argument('file')
    check_circuit.add_argument('--json', action='store_true')
    check_circuit.set_defaults(handler=cmd_check_circuit)

    bench = commands.add_parser('bench', help='bound every instance in a directory')
    bench.add_argument('directory')
    bench.add_argument('--workers', type=int, default=1)
    bench.add_argument('--json', action='store_true')
    bench.set_defaults(handler=cmd_bench)

    oracle = commands.add_parser('oracle', help='sampled minimum on a grid')
    oracle.add_argument('file')
    oracle.add_argument('--grid', type=int, default=OracleConfig.grid_points_per_axis)
    oracle.add_argument('--range', type=float, default=OracleConfig.box_radius)
    oracle.add_argument('--json', action='store_true')
    oracle.set_defaults(handler=cmd_oracle)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    logging.basicConfig(
        level=level,
        format="%(asctime)s.%(msecs)03d %(levelname)s: %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )

    try:
        return args.handler(args)
    except (DualSoncError, OSError, ValueError) as exception:
        print(f'error: {exception}', file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == '__main__':
    sys.exit(main())
