"""Command-line interface.

Every subcommand writes exactly one document to standard output; usage
errors and diagnostics go to standard error.  Exit status is 0 on success,
1 when ``verify`` finds a failing check and 2 for invalid flags.
"""

import argparse
import io
import sys
import time

import numpy as np

from . import __version__, models, oracle, report
from .engine import GridSpec, build_layout, layout_midpoints
from .geometry import HALF_PI, LatitudeKernel, check_latitude, sigma_bounds

__all__ = ["main", "run", "parse_phi_list", "build_parser", "verify_checks"]


def parse_phi_list(text):
    """Parse comma-separated latitudes in radians, keeping their order.

    Raises
    ------
    ValueError
        For an empty list, a token that is not a number, or a latitude
        outside ``[0, pi/2)``; the message names the token and its 1-based
        position.
    """
    if text is None or not text.strip():
        raise ValueError("empty latitude list")
    out = []
    for pos, raw in enumerate(text.split(","), start=1):
        token = raw.strip()
        try:
            value = float(token)
        except ValueError:
            raise ValueError(f"token {token!r} at position {pos} is not a number") from None
        if not np.isfinite(value) or not 0.0 <= value < HALF_PI:
            raise ValueError(
                f"token {token!r} at position {pos} is outside the latitude range [0, pi/2)"
            )
        out.append(value)
    return out


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _latitude(text):
    try:
        return check_latitude(float(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _phi_list(text):
    try:
        return parse_phi_list(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


class _Parser(argparse.ArgumentParser):
    def exit(self, status=0, message=None):
        if message:
            self._print_message(message, sys.stderr)
        raise _Exit(status)


class _Exit(Exception):
    def __init__(self, code):
        super().__init__(code)
        self.code = code


def build_parser():
    parser = _Parser(prog="sphquant", description="Optimal quantizers on circles of the sphere.")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def add_format(p, choices=("json", "csv")):
        p.add_argument("--format", choices=choices, default="json")

    for verb in ("error", "quantize"):
        p = sub.add_parser(verb, help=f"closed-form {verb} report")
        p.add_argument("--model", choices=("equator", "one-circle", "two-circles"), required=True)
        p.add_argument("--points", type=_positive_int, required=True,
                       help="total sample count (2M for two-circles)")
        p.add_argument("--codes", type=_positive_int, required=True)
        p.add_argument("--phi", type=_latitude, default=None, help="latitude in radians")
        add_format(p)

    p = sub.add_parser("oracle", help="brute-force optimum on a uniform grid")
    p.add_argument("--method", choices=("dp", "exhaustive", "lloyd"), required=True)
    p.add_argument("--points", type=_positive_int, required=True)
    p.add_argument("--codes", type=_positive_int, required=True)
    p.add_argument("--phi", type=_latitude, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=_positive_int, default=50)
    add_format(p)

    p = sub.add_parser("curve", help="sample sigma(phi, dtheta) on [0, pi]")
    p.add_argument("--phis", type=_phi_list, default=[0.0, 0.5, 1.0])
    p.add_argument("--samples", type=_positive_int, default=240)
    add_format(p)

    p = sub.add_parser("table", help="errors across latitudes")
    p.add_argument("--points", type=_positive_int, default=120)
    p.add_argument("--codes", type=_positive_int, default=6)
    p.add_argument("--phis", type=_phi_list, default=[0.0, 0.6, 1.0])
    add_format(p)

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--budget", choices=("small", "full"), default="small")
    for p in sub.choices.values():
        p.set_defaults(subparser=p)
    return parser


def _model_report(args, parser):
    if args.model == "equator":
        if args.phi not in (None, 0.0):
            parser.error("--phi must be 0 (or omitted) for the equator model")
        return models.quantize_equator(args.points, args.codes)
    if args.phi is None:
        parser.error(f"--phi is required for --model {args.model}")
    if args.model == "one-circle":
        return models.quantize_one_circle(args.points, args.codes, args.phi)
    if args.points % 2:
        parser.error("--points must be even for two-circles (it counts both circles)")
    if args.codes % 2:
        parser.error("--codes must be even for two-circles")
    if args.phi == 0.0:
        parser.error("--phi must be positive for two-circles")
    return models.quantize_two_circles(args.points // 2, args.codes, args.phi)


def _oracle_document(args, parser):
    N, n, phi = args.points, args.codes, args.phi
    pts = GridSpec(N).longitudes()
    if args.method == "dp":
        if n > N:
            parser.error(f"--codes ({n}) exceeds --points ({N})")
        res = oracle.dp_optimal(pts, phi, n)
        return report.oracle_document(res, N, n, phi)
    if args.method == "exhaustive":
        try:
            res = oracle.exhaustive_optimal(pts, phi, n)
        except oracle.BudgetExceeded as exc:
            parser.error(str(exc))
        return report.oracle_document(res, N, n, phi)
    if n > N:
        parser.error(f"--codes ({n}) exceeds --points ({N})")
    res = oracle.lloyd_multistart(pts, phi, n, restarts=args.restarts, seed=args.seed)
    return report.oracle_document(res, N, n, phi)


def _emit(doc, fmt, out):
    if fmt == "csv":
        report.write_csv(doc, out)
    else:
        report.write_json(doc, out)


def _uniform(N):
    return GridSpec(N).longitudes()


def verify_checks(budget="small"):
    """Run the invariant suite; yields ``(name, passed, detail)`` tuples."""
    full = budget == "full"

    def grid_identities():
        k = 200 if full else 50
        phis = np.linspace(0.0, HALF_PI, k, endpoint=False)
        d = np.linspace(-np.pi, np.pi, k)
        worst = 0.0
        bounds_ok = True
        for phi in phis:
            ker = LatitudeKernel(phi)
            worst = max(worst, float(np.max(np.abs(ker.sigma_arccos(d) - ker.sigma_arcsin(d)))))
            lo, hi = sigma_bounds(phi, d)
            s = ker.sigma(d)
            bounds_ok &= bool(np.all(lo <= s * (1 + 1e-15)) and np.all(s <= hi * (1 + 1e-15)))
        return worst <= 1e-12 and bounds_ok, f"max |arccos - arcsin| = {worst:.3e}"

    def dp_agreement():
        top_n, top_k = (48, 8) if full else (16, 4)
        phis = (0.0, 0.3, 0.6, 1.0) if full else (0.0, 0.6)
        worst, count = 0.0, 0
        for phi in phis:
            for N in range(1, top_n + 1):
                for n in range(1, min(top_k, N) + 1):
                    ref = models.quantize_one_circle(N, n, phi).error
                    got = oracle.dp_optimal(_uniform(N), phi, n).error
                    rel = abs(got - ref) / ref if ref else abs(got)
                    worst = max(worst, rel)
                    count += 1
        return worst <= 1e-9, f"{count} instances, worst relative gap {worst:.3e}"

    def contiguity():
        top_n, top_k = (10, 4) if full else (7, 3)
        bad = []
        for phi in (0.0, 0.7):
            for N in range(1, top_n + 1):
                for n in range(1, top_k + 1):
                    ex = oracle.exhaustive_optimal(_uniform(N), phi, n)
                    dp = oracle.dp_optimal(_uniform(N), phi, min(n, N))
                    agree = abs(ex.error - dp.error) <= 1e-9 * dp.error + 1e-12
                    if not (agree and ex.metadata["all_optima_contiguous"]):
                        bad.append((N, n, phi))
        return not bad, f"failures: {bad}" if bad else "all optima contiguous"

    def extremes():
        bad = []
        for N in range(2, 65):
            if models.quantize_equator(N, N).error != 0.0:
                bad.append(("n=N", N))
            if abs(models.quantize_equator(N, 1).error - np.pi ** 2 / 3 * (1 - N ** -2.0)) > 1e-12:
                bad.append(("n=1", N))
        return not bad, f"failures: {bad}" if bad else "n=N and n=1 identities hold"

    def smoothing():
        bad = []
        for N in range(1, 21):
            for n in range(1, min(6, N) + 1):
                m, r = divmod(N, n)
                want = {tuple(sorted((m,) * (n - r) + (m + 1,) * r))}
                if oracle.composition_optimum(N, n) != want:
                    bad.append((N, n))
        return not bad, f"failures: {bad}" if bad else "minimal multisets are {m, m+1}"

    def cross_gap():
        k = 500 if full else 100
        phis = np.linspace(0.0, HALF_PI, k + 2)[1:-1]
        d = np.linspace(-np.pi, np.pi, k + 2)[1:-1]
        least = min(float(np.min(models.cross_circle_gap(phi, d))) for phi in phis)
        return least > 0.0, f"min gap {least:.3e}"

    def lloyd_fixed_point():
        N, n = 12, 5
        mids = layout_midpoints(GridSpec(N), build_layout(N, n))
        res = oracle.lloyd_iterate(_uniform(N), 0.0, mids)
        ref = models.quantize_equator(N, n).error
        ok = res.iterations == 1 and abs(res.error - ref) <= 1e-12 * ref
        return ok, f"iterations {res.iterations}, error {res.error!r}"

    def pairing():
        ok = all(
            models.quantize_two_circles(M, n, phi).codebook.is_antipodally_paired()
            for M in (5, 12, 24) for n in (2, 4, 6) for phi in (0.2, 0.9)
        )
        return ok, "two-circle codebooks antipodally paired"

    def monotone():
        bad = [
            (N, n, phi) for phi in (0.0, 0.6, 1.0) for N in range(1, 41) for n in range(1, 12)
            if models.quantize_one_circle(N, n + 1, phi).error
            > models.quantize_one_circle(N, n, phi).error
        ]
        return not bad, f"failures: {bad}" if bad else "error non-increasing in n"

    checks = [
        ("sigma_identities", grid_identities),
        ("extreme_cases", extremes),
        ("monotone_in_codes", monotone),
        ("antipodal_pairing", pairing),
        ("cross_circle_gap", cross_gap),
        ("smoothing", smoothing),
        ("lloyd_fixed_point", lloyd_fixed_point),
        ("dp_agreement", dp_agreement),
        ("contiguity", contiguity),
    ]
    for name, fn in checks:
        t0 = time.perf_counter()
        ok, detail = fn()
        yield name, bool(ok), detail, time.perf_counter() - t0


def run(argv, stdout=None, stderr=None):
    """Execute one command; returns the exit status."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    saved = sys.stderr
    sys.stderr = stderr
    try:
        args = parser.parse_args(argv)
        sub = args.subparser
        buffer = io.StringIO()
        if args.verb in ("error", "quantize"):
            try:
                rep = _model_report(args, sub)
            except ValueError as exc:
                sub.error(str(exc))
            doc = report.report_document(rep, include_layout=args.verb == "quantize")
            if args.model == "two-circles":
                doc.metadata["per_circle_points"] = args.points // 2
            _emit(doc, args.format, buffer)
        elif args.verb == "oracle":
            _emit(_oracle_document(args, sub), args.format, buffer)
        elif args.verb == "curve":
            samples = report.emit_curve(args.phis, args.samples)
            _emit(report.curve_document(samples, args.phis, args.samples), args.format, buffer)
        elif args.verb == "table":
            rows = models.latitude_table(args.points, args.codes, args.phis)
            _emit(report.table_document(rows, args.points, args.codes), args.format, buffer)
        else:
            results = []
            for name, ok, detail, secs in verify_checks(args.budget):
                print(f"{'PASS' if ok else 'FAIL'} {name}: {detail} ({secs:.2f}s)", file=stderr)
                results.append({"check": name, "passed": ok, "detail": detail})
            passed = all(r["passed"] for r in results)
            doc = report.OutputDocument(
                "verify", {"passed": passed, "checks": results},
                {"budget": args.budget, "tool_version": __version__},
            )
            report.write_json(doc, stdout)
            return 0 if passed else 1
        stdout.write(buffer.getvalue())
        return 0
    except _Exit as exc:
        return exc.code
    finally:
        sys.stderr = saved


def main(argv=None):
    return run(sys.argv[1:] if argv is None else list(argv))


if __name__ == "__main__":
    sys.exit(main())
