"""Command-line front end: ``powerlevy price | table | converge``."""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import replace
from typing import Sequence

from .levy import FmlsModel, TemperedModel
from .oracle.closed_form import bs_price
from .oracle.gil_pelaez import OracleUnavailable, QuadConfig, QuadratureError, gil_pelaez_price
from .oracle.monte_carlo import McConfig, mc_price
from .pricing import OptionKind, price
from .scenario_file import ScenarioFileError, ScenarioSpec, load_scenario
from .tables import build_table, cap_sweep, lambda_sweep, order_trace, spot_sweep
from .tempered import price_digital_cn_tempered

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NOT_CONVERGED = 3
EXIT_NO_ORACLE = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits with 2 already; keep the message short
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def format_value(value, precision: str) -> str:
    """Six decimals below 1 in magnitude, two above; ``full`` keeps every digit."""
    if isinstance(value, str):
        return value
    if precision == "full":
        return repr(float(value))
    return f"{value:.6f}" if abs(value) < 1.0 else f"{value:.2f}"


def render_csv(header: Sequence[str], rows, precision: str) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v, precision) for v in row])
    return buf.getvalue()


def parse_grid(text: str) -> list[float]:
    """``lo:hi:step`` inclusive of both ends, or a comma list."""
    try:
        if ":" in text:
            lo, hi, step = (float(p) for p in text.split(":"))
            if not step > 0.0 or hi < lo:
                raise ValueError
            n = int(round((hi - lo) / step))
            grid = [lo + i * step for i in range(n + 1)]
            if grid[-1] < hi - 1e-9 * max(1.0, abs(hi)):
                grid.append(hi)
            return grid
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}; expected lo:hi:step or a comma list") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _series(spec: ScenarioSpec):
    if isinstance(spec.model, TemperedModel):
        return price_digital_cn_tempered(spec.scenario, spec.model, spec.config)
    return price(spec.scenario, spec.model, spec.config)


def _oracle(name: str, spec: ScenarioSpec, args) -> tuple[float, float | None]:
    model, sc = spec.model, spec.scenario
    if name == "gilpelaez":
        return gil_pelaez_price(sc, model, QuadConfig()), None
    if name == "bs":
        if not isinstance(model, FmlsModel) or model.alpha != 2.0:
            raise OracleUnavailable("the Black-Scholes closed form needs model = fmls with alpha = 2")
        return bs_price(sc, model), None
    if not isinstance(model, FmlsModel):
        raise OracleUnavailable("Monte Carlo supports model = fmls only")
    return mc_price(sc, model, McConfig(paths=args.paths, seed=args.seed))


def cmd_price(args) -> int:
    spec = load_scenario(args.scenario)
    if args.max_order is not None:
        spec = replace(spec, config=replace(spec.config, n_max=args.max_order, m_max=args.max_order))
    result = _series(spec)
    p = args.precision
    lines = [
        f"kind: {spec.scenario.kind.value}",
        f"price: {format_value(result.price, p)}",
        f"terms_used: {result.terms_used}",
        f"last_term_magnitude: {result.last_term_magnitude:.3e}",
        f"converged: {'yes' if result.converged else 'no'}",
    ]
    for note in result.notes:
        lines.append(f"note: {note}")
    status = EXIT_OK
    if args.oracle:
        try:
            value, se = _oracle(args.oracle, spec, args)
        except OracleUnavailable as exc:
            print("\n".join(lines))
            print(f"error: oracle {args.oracle} unavailable: {exc}", file=sys.stderr)
            return EXIT_NO_ORACLE
        except QuadratureError as exc:
            print("\n".join(lines))
            print(f"error: oracle {args.oracle} failed: {exc}", file=sys.stderr)
            return EXIT_NO_ORACLE
        lines.append(f"oracle_{args.oracle}: {format_value(value, p)}")
        if se is not None:
            lines.append(f"oracle_std_error: {format_value(se, p)}")
        lines.append(f"abs_gap: {abs(result.price - value):.3e}")
    print("\n".join(lines))
    if not result.converged:
        print("error: series did not converge within n_max/m_max", file=sys.stderr)
        status = EXIT_NOT_CONVERGED
    return status


def cmd_table(args) -> int:
    header, rows = build_table(args.table_id, jobs=args.jobs)
    _emit(render_csv(header, rows, args.precision), args.out)
    return EXIT_OK


def cmd_converge(args) -> int:
    spec = load_scenario(args.scenario)
    model, sc, cfg = spec.model, spec.scenario, spec.config
    grids = [g for g in (args.spot_grid, args.cap_grid, args.lambda_grid) if g is not None]
    if len(grids) > 1:
        raise ScenarioFileError("give at most one of --spot-grid, --cap-grid, --lambda-grid")
    if args.cap_grid is not None:
        if sc.kind is not OptionKind.CAPPED_EUROPEAN or isinstance(model, TemperedModel):
            raise ScenarioFileError("--cap-grid needs an fmls capped-european scenario")
        table = cap_sweep(sc, model, cfg, args.cap_grid, jobs=args.jobs)
    elif args.lambda_grid is not None:
        if not isinstance(model, TemperedModel):
            raise ScenarioFileError("--lambda-grid needs model = tempered")
        table = lambda_sweep(sc, model, cfg, args.lambda_grid, jobs=args.jobs)
    elif args.spot_grid is not None:
        table = spot_sweep(sc, model, cfg, args.max_order, args.spot_grid, jobs=args.jobs)
    else:
        table = order_trace(sc, model, cfg, args.max_order)
    _emit(render_csv(*table, args.precision), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="powerlevy", description="Residue-series pricing of power options under stable Levy models.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", choices=("table", "full"), default="table",
                        help="table: 6 decimals below 1, 2 above (default); full: every digit")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for tables and sweeps")

    p = sub.add_parser("price", parents=[common], help="price one scenario file")
    p.add_argument("scenario")
    p.add_argument("--oracle", choices=("gilpelaez", "mc", "bs"))
    p.add_argument("--seed", type=int, default=McConfig.seed)
    p.add_argument("--paths", type=int, default=McConfig.paths)
    p.add_argument("--max-order", type=int, help="override n_max = m_max")
    p.set_defaults(func=cmd_price)

    t = sub.add_parser("table", parents=[common], help="reproduce a numerical table as CSV")
    t.add_argument("table_id", type=int, choices=(1, 2, 3))
    t.add_argument("--out")
    t.set_defaults(func=cmd_table)

    c = sub.add_parser("converge", parents=[common], help="partial sums and figure sweeps as CSV")
    c.add_argument("scenario")
    c.add_argument("--max-order", type=int, default=10)
    c.add_argument("--spot-grid", type=parse_grid, help="lo:hi:step spots; one column per order")
    c.add_argument("--cap-grid", type=parse_grid, help="lo:hi:step caps K+ for a capped European")
    c.add_argument("--lambda-grid", type=parse_grid, help="lo:hi:step tempering for a tempered digital")
    c.add_argument("--seed", type=int, default=McConfig.seed, help="accepted for symmetry; sweeps are deterministic")
    c.add_argument("--out")
    c.set_defaults(func=cmd_converge)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScenarioFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
