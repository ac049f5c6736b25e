"""Command-line front end.

Subcommands: check, polygon, directions, solve, borel, continue, square,
resum, verify, growth, report.  All artifacts are UTF-8; JSON is emitted
pretty-printed with sorted keys and CSV with a header row, so identical
inputs produce byte-identical files (timings are quarantined in their own
report field).

Exit codes: 0 success; 2 a polygon-level condition failed; 3 singular or
effectively singular direction; 4 numerical failure (grid too short, seed
unreachable, root finding); 5 usage or parse error.
"""

import argparse
import json
import math
import os
import sys

from .equation import from_json, parse_equation, to_json, validate
from .errors import (GridTooShortError, ParseError, QsumError,
                     RadiusTooSmallError, RootFindingError, SchemaError,
                     SingularDirectionError)
from .formal import gevrey_fit, solve_formal
from .growth import fit_growth
from .newton import (characteristic_polynomial, check_shape, newton_polygon,
                     reduced_coefficients, singular_directions)
from .pipeline import ConditionsFailed, Options, run_report, size_parse_window
from .qborel import (borel_transform, borel_transformed_equation,
                     continue_spiral, fit_spiral_bound)
from .qlaplace import q_laplace, asymptotic_check
from .report_schema import validate_report
from .square import substitute_square

EXIT_OK = 0
EXIT_CONDITION = 2
EXIT_SINGULAR = 3
EXIT_NUMERIC = 4
EXIT_USAGE = 5


def _read_equation_text(path):
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_equation(path, Kt, Kz):
    text = _read_equation_text(path)
    if text.lstrip().startswith("{"):
        return from_json(text)
    return parse_equation(text, Kt=Kt, Kz=Kz)


def _parse_complex(s):
    parts = s.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected 're,im'")
    return complex(float(parts[0]), float(parts[1]))


def _load_config(path):
    """Flat key = value text; '#' starts a comment."""
    config = {}
    if not path or not os.path.exists(path):
        return config
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line or "=" not in line:
                continue
            key, value = (x.strip() for x in line.split("=", 1))
            config[key] = value.strip('"')
    return config


def _json_default(o):
    if isinstance(o, complex):
        return {"re": o.real, "im": o.imag}
    raise TypeError(type(o).__name__)


def _emit_json(doc, path):
    text = json.dumps(doc, indent=2, sort_keys=True, default=_json_default)
    if path in (None, "-"):
        print(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _emit_csv(rows, header, path):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_csv_cell(x) for x in row))
    text = "\n".join(lines) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _csv_cell(x):
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, complex):
        return "%r%+ri" % (x.real, x.imag)
    return str(x)


def build_parser():
    ap = argparse.ArgumentParser(prog="qsum",
                                 description="Resummation toolkit for linear q-difference-differential equations")
    ap.add_argument("--config", default="qsum.toml", help="key=value config file (flags win)")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, with_lambda=True):
        p.add_argument("equation", help="equation file (.qde DSL text or .json)")
        p.add_argument("--orders", type=int, default=None, help="formal orders to compute (default 40)")
        p.add_argument("--zorder", type=int, default=None, help="requested z-window Kz (default 8)")
        p.add_argument("--json", nargs="?", const="-", default=None, metavar="PATH")
        p.add_argument("--emit-csv", dest="csv", default=None, metavar="PATH")
        if with_lambda:
            p.add_argument("--lambda", dest="lam", type=_parse_complex, default=None, metavar="RE,IM")

    for name in ("check", "polygon", "directions", "solve", "borel", "square"):
        common(sub.add_parser(name), with_lambda=False)
    for name in ("continue", "resum", "verify", "growth", "report"):
        p = sub.add_parser(name)
        common(p)
        p.add_argument("--mmax", type=int, default=None, help="top continuation index (default 40)")
    for name, p in sub.choices.items():
        if name in ("resum",):
            p.add_argument("--t", type=_parse_complex, required=True, metavar="RE,IM")
        if name in ("verify", "report"):
            p.add_argument("--epsilon", type=float, default=None)
            p.add_argument("--N", dest="n_check", type=int, default=None)
            p.add_argument("--jobs", type=int, default=None)
    return ap


def _options_from(args, config):
    def pick(flag, key, cast, default):
        if flag is not None:
            return flag
        if key in config:
            return cast(config[key])
        return default

    opt = Options()
    opt.orders = pick(getattr(args, "orders", None), "orders", int, 40)
    opt.Kz = pick(getattr(args, "zorder", None), "zorder", int, 8)
    opt.mmax = pick(getattr(args, "mmax", None), "mmax", int, 40)
    opt.epsilon = pick(getattr(args, "epsilon", None), "epsilon", float, 0.3)
    opt.n_check = pick(getattr(args, "n_check", None), "N", int, 12)
    opt.jobs = pick(getattr(args, "jobs", None), "jobs", int, 1)
    lam = getattr(args, "lam", None)
    if lam is None and "lambda" in config:
        lam = _parse_complex(config["lambda"])
    opt.lam = lam if lam is not None else complex(1.0, 0.0)
    opt.Kt = opt.orders + 1
    return opt


def main(argv=None):
    args = build_parser().parse_args(argv)
    config = _load_config(args.config)
    try:
        opt = _options_from(args, config)
        return _dispatch(args, opt)
    except (ParseError, SchemaError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except ConditionsFailed as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_CONDITION
    except SingularDirectionError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_SINGULAR
    except (GridTooShortError, RadiusTooSmallError, RootFindingError,
            ArithmeticError, QsumError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE


def _conditions(eq):
    polygon = newton_polygon(eq)
    shape = check_shape(polygon)
    return polygon, shape


def _dispatch(args, opt):
    cmd = args.command
    if cmd == "report":
        return _cmd_report(args, opt)

    eq = _load_equation(args.equation, opt.Kt, opt.Kz)

    if cmd == "check":
        report = validate(eq)
        polygon, shape = _conditions(eq)
        doc = {"validation": {"violations": report.violations, "warnings": report.warnings},
               "shape": {"ok": shape.ok, "m0": shape.m0, "reasons": shape.reasons}}
        if shape.ok:
            from .newton import check_interior, check_nondegeneracy, check_strong_margin
            interior = check_interior(eq, polygon, shape.m0)
            red = reduced_coefficients(eq, shape.m0)
            nondeg = check_nondegeneracy(eq, red, shape.m0)
            strong = check_strong_margin(eq, shape.m0)
            doc["interior"] = {"ok": interior.passed, "messages": interior.messages}
            doc["nondegeneracy"] = {"ok": nondeg.passed, "messages": nondeg.messages}
            doc["strong_margin"] = {"ok": strong.passed, "messages": strong.messages}
        _emit_json(doc, args.json)
        if not (report.ok and shape.ok and doc.get("interior", {}).get("ok")
                and doc.get("nondegeneracy", {}).get("ok")):
            return EXIT_CONDITION
        return EXIT_OK

    if cmd == "polygon":
        polygon, shape = _conditions(eq)
        if args.csv is not None:
            rows = []
            for p in polygon.support:
                on_boundary = p.ord_t == max(0, p.j - shape.m0) if shape.ok else ""
                interior = (p.j < eq.m and p.ord_t > max(0, p.j - shape.m0)) if shape.ok else ""
                rows.append((p.j, "|".join(map(str, p.alpha)), p.ord_t, on_boundary, interior))
            for v in polygon.vertices:
                rows.append((v[0], "vertex", v[1], "", ""))
            _emit_csv(rows, ("j", "alpha", "ord_t", "on_boundary", "interior"), args.csv)
        doc = {"support": [{"j": p.j, "alpha": list(p.alpha), "ord_t": p.ord_t} for p in polygon.support],
               "vertices": [list(v) for v in polygon.vertices],
               "slopes": [s if math.isfinite(s) else "inf" for s in polygon.slopes],
               "m0": shape.m0, "ok": shape.ok, "reasons": shape.reasons}
        _emit_json(doc, args.json)
        return EXIT_OK if shape.ok else EXIT_CONDITION

    if cmd == "directions":
        polygon, shape = _conditions(eq)
        if not shape.ok:
            print("error: polygon shape condition fails", file=sys.stderr)
            return EXIT_CONDITION
        red = reduced_coefficients(eq, shape.m0)
        P = characteristic_polynomial(eq, red, shape.m0)
        ds = singular_directions(P)
        _emit_json({"roots": [{"re": r.real, "im": r.imag} for r in ds.roots],
                    "rays": list(ds.rays)}, args.json)
        return EXIT_OK

    if cmd == "square":
        sq = substitute_square(eq)
        _emit_json(json.loads(to_json(sq.equation)), args.json)
        return EXIT_OK

    if cmd == "solve":
        # derivative terms consume z-window per order; repad DSL input
        text = _read_equation_text(args.equation)
        if not text.lstrip().startswith("{"):
            from dataclasses import replace
            eq = size_parse_window(text, replace(opt, mmax=0))
        sol = solve_formal(eq, opt.orders)
        fit = gevrey_fit(sol)
        if args.csv is not None:
            rows = [(n, m.log_abs() / math.log(10.0) if not m.is_zero() else "-inf",
                     fit.g[n] if fit.g[n] is not None else "")
                    for n, m in enumerate(fit.norms)]
            _emit_csv(rows, ("n", "log10_norm", "g_n"), args.csv)
        doc = {"orders": sol.count, "A": fit.A, "h": fit.h,
               "coefficients": [{"n": n,
                                 "v": [[k[0], list(k[1]), c.real, c.imag] for k, c in v.items()],
                                 "log10_norm": (fit.norms[n].log_abs() / math.log(10.0)
                                                if not fit.norms[n].is_zero() else None),
                                 "g": fit.g[n]}
                                for n, v in enumerate(sol.scaled)]}
        _emit_json(doc, args.json)
        return EXIT_OK

    # the remaining commands run the front half of the pipeline
    text = _read_equation_text(args.equation)
    eq = size_parse_window(text, opt)
    polygon, shape = _conditions(eq)
    if not shape.ok:
        print("error: polygon shape condition fails: %s" % shape, file=sys.stderr)
        return EXIT_CONDITION
    sol = solve_formal(eq, opt.orders)
    u = borel_transform(sol)

    if cmd == "borel":
        doc = {"radius_est": u.radius_est if math.isfinite(u.radius_est) else "inf",
               "coefficients": [[[k[0], list(k[1]), c.real, c.imag] for k, c in v.items()]
                                for v in u.coeffs]}
        _emit_json(doc, args.json)
        return EXIT_OK

    beq = borel_transformed_equation(eq, shape.m0)
    grid = continue_spiral(beq, u, opt.lam, opt.mmax)

    if cmd == "continue":
        fitb = fit_spiral_bound(grid, rz=u.R1)
        if args.csv is not None:
            rows = [(m, fitb.diag[m] if 0 <= m < len(fitb.diag) and fitb.diag[m] is not None else "")
                    for m in range(grid.m_min, grid.m_max + 1)]
            _emit_csv(rows, ("m", "diagnostic"), args.csv)
        doc = {"lambda": {"re": grid.lam.real, "im": grid.lam.imag},
               "m_min": grid.m_min, "m_max": grid.m_max, "seed_top": grid.seed_top,
               "C": fitb.C, "H": fitb.H, "bounded": fitb.bounded,
               "values": [{"m": m,
                           "value_z0": _split_value(grid, m),
                           "sup_logq": grid.values[m].norm_logq(grid.q, u.R1)}
                          for m in range(max(grid.m_min, -10), grid.m_max + 1)]}
        _emit_json(doc, args.json)
        return EXIT_OK

    if cmd == "resum":
        w = q_laplace(grid, args.t, epsilon=min(opt.epsilon, 0.1))
        _emit_json({"t": {"re": args.t.real, "im": args.t.imag},
                    "W": {"re": w.real, "im": w.imag}}, args.json)
        return EXIT_OK

    if cmd == "verify":
        rep = asymptotic_check(sol, grid, opt.epsilon, opt.n_check, jobs=opt.jobs)
        if args.csv is not None:
            rows = []
            for N in range(0, opt.n_check + 1):
                e_max = max(rep.EN[N]) if rep.EN[N] else 0.0
                bound = (rep.M * rep.H ** N / rep.epsilon
                         * grid.q ** (N * (N - 1) / 2.0)
                         * max(abs(t) for t in rep.samples) ** N)
                rows.append((N, e_max, bound, rep.rho[N] if rep.rho[N] is not None else ""))
            _emit_csv(rows, ("N", "max_E_N", "bound", "rho_N"), args.csv)
        _emit_json({"verdict": rep.verdict, "M": rep.M, "H": rep.H,
                    "epsilon": rep.epsilon, "reasons": rep.reasons,
                    "samples": len(rep.samples)}, args.json)
        return EXIT_OK if rep.passed else EXIT_NUMERIC

    if cmd == "growth":
        samples = [grid.lam * grid.q ** float(m) for m in range(0, grid.m_max + 1, 2)]
        norms = grid.norms_logq(u.R1)

        def ev(t):
            m = round(math.log(abs(t) / abs(grid.lam)) / math.log(grid.q))
            return math.exp(norms[m] * math.log(grid.q)) if math.isfinite(norms[m]) else 0.0

        fitg = fit_growth(ev, grid.q, samples)
        if args.csv is not None:
            rows = []
            for t in samples:
                lt = math.log(abs(t))
                fv = ev(t)
                bound = math.log(fitg.M) + lt * lt / (2 * math.log(grid.q)) + fitg.alpha * lt
                rows.append((lt, math.log(fv) if fv > 0 else "", bound))
            _emit_csv(rows, ("log_t", "log_f", "log_bound"), args.csv)
        _emit_json({"M": fitg.M, "alpha": fitg.alpha, "samples": len(samples)}, args.json)
        return EXIT_OK

    raise QsumError("unhandled command %r" % cmd)


def _split_value(grid, m):
    v = grid.values[m]
    c = v.series.constant_term()
    return {"mantissa": {"re": c.real, "im": c.imag}, "qexp": v.qexp}


def _cmd_report(args, opt):
    text = _read_equation_text(args.equation)
    report = run_report(text, opt)
    doc = report.to_dict()
    problems = validate_report(doc)
    if problems:
        raise QsumError("report schema violation: " + "; ".join(problems))
    _emit_json(doc, args.json if args.json is not None else "-")
    hard_fail = any(v["status"] == "fail" for k, v in report.verdicts.items()
                    if k in ("shape", "interior", "nondegeneracy"))
    return EXIT_CONDITION if hard_fail else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
