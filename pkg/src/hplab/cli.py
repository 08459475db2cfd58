"""Batch command line front-end: ``hplab <subcommand> [options]``.

Exit codes: 0 success with every asserted check passing, 1 usage or
configuration error, 2 a check failed (the JSON output names it).
Options may also come from a JSON file given by ``--config``; explicit flags
win over the file, which wins over built-in defaults.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import mpmath

from . import __version__
from .errors import (HPLabError, IntegerExponent, OnBoundary, OnBranchCut, OutsideSupport,
                     PathCrossesCut, TruncationTooShort)
from .regime import BigComplex, default_precision, parse_rational
from .semiclassical import from_json, two_point

SCHEMA_VERSION = "1"

DEFAULTS = {
    "alpha": "1/3",
    "n": 2,
    "n_list": None,
    "s": 2,
    "k": 2,
    "precision_bits": None,
    "truncation_order": None,
    "output": None,
    "format": "json",
    "constants": "printed",
    "order": 10,
    "kind": "lambda",
    "x": None,
    "z": None,
    "which": "eq1",
    "grid": None,
    "quad_n": 8,
    "tol": "1e-6",
    "function": None,
    "rho": False,
}


class UsageError(Exception):
    pass


class CheckFailed(Exception):
    def __init__(self, doc):
        self.doc = doc
        super().__init__("check failed")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- value formatting ----------------------------------------------------------------

def _num(x, digits: int = 30):
    """JSON-ready scalar: rationals as strings, floats as decimal strings.

    mpmath values are printed through their own context so no precision is
    lost to the global one.
    """
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, (int, Fraction)):
        return str(x)
    if isinstance(x, (float, complex)):
        x = mpmath.mpmathify(x)
    ctx = getattr(x, "context", mpmath.mp)
    if hasattr(x, "_mpc_"):
        if ctx.im(x) == 0:
            return ctx.nstr(ctx.re(x), digits)
        return {"re": ctx.nstr(ctx.re(x), digits), "im": ctx.nstr(ctx.im(x), digits)}
    if hasattr(x, "_mpf_"):
        return ctx.nstr(x, digits)
    return x


def _rational_text(r) -> str:
    if r.den.degree == 0 and r.den[0] == 1:
        return str(r.num)
    return f"({r.num}) / ({r.den})"


def _parse_complex(text, bits: int = 256):
    """'i', '2i', '0.5+0.5i', '1/2' and the like, read at ``bits`` precision."""
    t = str(text).replace(" ", "").replace("*", "").replace("j", "i")
    if not t:
        raise UsageError("empty complex number")
    cut = max(t.rfind("+", 1), t.rfind("-", 1))
    if t.endswith("i"):
        re_part, im_part = (t[:cut], t[cut:-1]) if cut > 0 else ("0", t[:-1])
        if im_part in ("", "+", "-"):
            im_part += "1"
    else:
        re_part, im_part = t, "0"
    ctx = BigComplex(bits).ctx
    try:
        to = lambda q: ctx.mpf(q.numerator) / q.denominator  # noqa: E731
        return ctx.mpc(to(parse_rational(re_part)), to(parse_rational(im_part)))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot read complex number {text!r}") from exc


def _parse_list(text, conv):
    if text is None:
        return None
    if isinstance(text, list):
        return [conv(t) for t in text]
    items = [t for t in str(text).split(",") if t.strip()]
    return [conv(t.strip()) for t in items]


# -- configuration ----------------------------------------------------------------

def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise UsageError("config file must hold a JSON object")
    return {k.replace("-", "_"): v for k, v in doc.items()}


def _resolve(args):
    cfg = _load_config(args.config)
    out = {}
    for key, default in DEFAULTS.items():
        val = getattr(args, key, None)
        if val is None or val is False:
            val = cfg.get(key, default if val is None else val)
        out[key] = val
    for key in cfg:
        if key not in out and key != "config":
            out[key] = cfg[key]
    bits = out["precision_bits"]
    if bits is None:
        bits = default_precision()
    bits = int(bits)
    if bits < 64:
        raise UsageError("precision_bits must be >= 64")
    out["precision_bits"] = bits
    try:
        out["alpha"] = parse_rational(out["alpha"])
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"alpha must be a rational like 1/3: {exc}") from exc
    out["n_list"] = _parse_list(out["n_list"], int)
    return out


def _function(cfg):
    """The semiclassical function: --function JSON or the two-point family."""
    doc = cfg.get("function")
    if doc is not None:
        if isinstance(doc, str):
            doc = json.loads(doc)
        regime = None
        if any(isinstance(a, str) and ("i" in a or "j" in a) for a in doc["branch_points"]):
            regime = BigComplex(cfg["precision_bits"])
        return from_json(doc, regime)
    return two_point(cfg["alpha"])


def _check_truncation(cfg, s, n):
    M = cfg.get("truncation_order")
    need = (s + 1) * n + s + 2
    if M is None:
        return need + 4
    M = int(M)
    if M < need:
        raise TruncationTooShort(f"truncation_order {M} < (s+1)n+s+2 = {need}")
    return M


# -- subcommands --------------------------------------------------------------------

def cmd_expand(cfg):
    from .semiclassical import expand_at_infinity

    f = _function(cfg)
    M = int(cfg["order"])
    t = expand_at_infinity(f, M)
    r = f.regime
    doc = {"function": f.to_json(), "order": M,
           "coefficients": [{"power": -k, "value": r.to_string(c)} for k, c in enumerate(t.coeffs)]}
    if not r.exact:
        doc["precision_bits"] = r.precision_bits
    return doc


def cmd_hp(cfg):
    from .hp import hp_solve
    from .semiclassical import power_tails

    f = _function(cfg)
    s, n = int(cfg["s"]), int(cfg["n"])
    M = _check_truncation(cfg, s, n)
    sol = hp_solve(power_tails(f, s, M), n)
    return {"function": f.to_json(), "truncation_order": M, "solution": sol.to_json()}


def cmd_pade(cfg):
    from .hp import jacobi_polynomial, pade_solve

    f = _function(cfg)
    n = int(cfg["n"])
    pp = pade_solve(f, n)
    r = f.regime
    doc = {
        "function": f.to_json(), "n": n,
        "P": [r.to_string(c) for c in pp.P.coeffs],
        "Q": [r.to_string(c) for c in pp.Q.coeffs],
        "normal": pp.normal, "defect": pp.defect, "M_n": r.to_string(pp.M_n),
    }
    if r.exact and cfg.get("function") is None:
        J = jacobi_polynomial(cfg["alpha"], -cfg["alpha"], n)
        doc["jacobi_proportional"] = pp.Q.proportional_to(J)
        if not doc["jacobi_proportional"]:
            raise CheckFailed({**doc, "failed": "Q proportional to P_n^(alpha,-alpha)"})
    if not r.exact:
        doc["precision_bits"] = r.precision_bits
    return doc


def cmd_ode_verify(cfg):
    from .ode import verify_p2_s2

    alpha, n = cfg["alpha"], int(cfg["n"])
    res = verify_p2_s2(alpha, n, cfg["constants"])
    doc = {
        "alpha": str(alpha), "n": n, "constants": cfg["constants"],
        "residuals": {k: _rational_text(v) for k, v in res.items()},
    }
    failed = [k for k, v in res.items() if not v.is_zero()]
    doc["all_zero"] = not failed
    if failed:
        raise CheckFailed({**doc, "failed": failed})
    return doc


def cmd_ode_extract(cfg):
    from .ode import build_ode_p2_s2, extract_ode_wronskian, structure_audit, wronskian_order
    from .hp import hp_solve
    from .semiclassical import power_tails

    f = _function(cfg)
    s, n = int(cfg["s"]), int(cfg["n"])
    M = wronskian_order(s, n, f.p)
    sys_ = power_tails(f, s, M, check=False)
    sol = hp_solve(sys_, n)
    ode = extract_ode_wronskian(sys_, sol)
    doc = {"function": f.to_json(), "s": s, "n": n, "ode": ode.to_json()}
    try:
        doc["audit"] = structure_audit(ode, f, s, n).to_json()
    except HPLabError as exc:
        doc["audit"] = {"error": str(exc)}
    if f.regime.exact and f.p == 2 and s == 2 and cfg.get("function") is None:
        doc["matches_explicit"] = {
            c: ode.proportional_to(build_ode_p2_s2(cfg["alpha"], n, constants=c))
            for c in ("printed", "derived")
        }
        if not doc["matches_explicit"][cfg["constants"]]:
            raise CheckFailed({**doc, "failed": f"extracted equation differs from the {cfg['constants']} one"})
    return doc


def _zeros_doc(cfg):
    from .asymptotics import roots, zero_location_audit
    from .hp import rho_zeros, solve_power_system

    f = two_point(cfg["alpha"])
    n = int(cfg["n"])
    bits = cfg["precision_bits"]
    sol = solve_power_system(f, 2, n)
    if cfg["rho"]:
        zs = rho_zeros(sol, cfg["alpha"], precision_bits=bits)
        return {"alpha": str(cfg["alpha"]), "n": n, "form": "rho", "count": len(zs),
                "zeros": [_num(z) for z in zs], "precision_bits": bits,
                "enough_sign_changes": len(zs) >= 2 * n + 1}, zs
    k = int(cfg["k"])
    Q = sol.Q[k]
    audit = zero_location_audit(Q, bits)
    emp = roots(Q, bits)
    return {"alpha": str(cfg["alpha"]), "n": n, "k": k,
            "zeros": [_num(z) for z in emp.points],
            "audit": {key: _num(v) for key, v in audit.items()},
            "precision_bits": bits}, emp.points


def cmd_zeros(cfg):
    doc, pts = _zeros_doc(cfg)
    if cfg["format"] == "csv":
        lines = ["index,re,im"]
        for i, z in enumerate(pts):
            v = _num(z)
            re_, im_ = (v["re"], v["im"]) if isinstance(v, dict) else (v, "0.0")
            lines.append(f"{i},{re_},{im_}")
        return "\n".join(lines) + "\n"
    if cfg["rho"] and not doc["enough_sign_changes"]:
        raise CheckFailed({**doc, "failed": "rho_n has fewer than 2n+1 zeros"})
    if not cfg["rho"] and not doc["audit"]["outside_E"]:
        raise CheckFailed({**doc, "failed": "zeros not real with |x| > 1"})
    return doc


def cmd_density(cfg):
    from .asymptotics import EmpiricalMeasure, LimitDensity, density, distance_csv, measure_distance, roots
    from .hp import rho_zeros, solve_power_system

    kind = cfg["kind"]
    if cfg["x"] is not None:
        x = parse_rational(cfg["x"])
        val = density(kind, x, cfg["precision_bits"])
        return {"kind": kind, "x": str(x), "value": _num(val), "precision_bits": cfg["precision_bits"]}
    n = int(cfg["n"])
    sol = solve_power_system(two_point(cfg["alpha"]), 2, n)
    if kind == "nu":
        emp = roots(sol.Q[2], cfg["precision_bits"])
    else:
        emp = EmpiricalMeasure.from_points(rho_zeros(sol, cfg["alpha"], precision_bits=cfg["precision_bits"]))
    lim = LimitDensity(kind)
    if cfg["format"] == "csv":
        return distance_csv(emp, lim)
    return {"kind": kind, "alpha": str(cfg["alpha"]), "n": n,
            "ks_distance": _num(measure_distance(emp, lim), 15), "precision_bits": cfg["precision_bits"]}


def _n_list(cfg):
    ns = cfg["n_list"]
    if not ns:
        raise UsageError("n_list must be a non-empty list such as 10,20,40")
    return ns


def _decreasing(seq, allowed=0):
    bad = sum(1 for a, b in zip(seq, seq[1:]) if not b < a)
    return bad <= allowed


def cmd_ratio(cfg):
    from .asymptotics import ratio_limit_check
    from .hp import solve_power_system

    ns = _n_list(cfg)
    z = _parse_complex(cfg["z"] if cfg["z"] is not None else "i", cfg["precision_bits"])
    f = two_point(cfg["alpha"])
    sols = [solve_power_system(f, 2, n) for n in ns]
    errs = ratio_limit_check(sols, z, cfg["alpha"], cfg["precision_bits"])
    doc = {"alpha": str(cfg["alpha"]), "z": _num(z), "precision_bits": cfg["precision_bits"],
           "errors": [{"n": n, "Q1/Q2": _num(a, 15), "Q0/Q2": _num(b, 15)} for n, a, b in errs]}
    e1 = [a for _, a, _ in errs if a is not None]
    e0 = [b for _, _, b in errs if b is not None]
    doc["decreasing"] = _decreasing(e1) and _decreasing(e0)
    if not doc["decreasing"]:
        raise CheckFailed({**doc, "failed": "ratio errors do not decrease"})
    return doc


def cmd_cubic(cfg):
    from .asymptotics import cubic_branches, cubic_residual

    z = _parse_complex(cfg["z"] if cfg["z"] is not None else "i", cfg["precision_bits"])
    cb = cubic_branches(z, cfg["precision_bits"])
    ys = cb.as_tuple()
    return {"z": _num(z), "precision_bits": cfg["precision_bits"],
            "y": [_num(y) for y in ys],
            "residuals": [_num(abs(cubic_residual(cb.z, y)), 5) for y in ys]}


def cmd_ordering(cfg):
    from .asymptotics import sheet_ordering

    z = _parse_complex(cfg["z"] if cfg["z"] is not None else "i", cfg["precision_bits"])
    phis = sheet_ordering(z, cfg["precision_bits"], check=False)
    doc = {"z": _num(z), "phi": [_num(p, 20) for p in phis],
           "ordered": bool(phis[2] < phis[1] < phis[0]), "precision_bits": cfg["precision_bits"]}
    if not doc["ordered"]:
        raise CheckFailed({**doc, "failed": "phi3 < phi2 < phi1"})
    return doc


def cmd_equilibrium(cfg):
    from .potential import balayage_check, equilibrium_check, equilibrium_csv

    which = cfg["which"]
    defaults = {"eq1": "-0.5,0,0.5", "eq2": "1.5,2,3", "balayage": "1.5,2,4"}
    if which not in defaults:
        raise UsageError("which must be eq1, eq2 or balayage")
    grid = _parse_list(cfg["grid"] or defaults[which], parse_rational)
    grid = [mpmath.mpf(g.numerator) / g.denominator for g in grid]
    qn = int(cfg["quad_n"])
    if cfg["format"] == "csv" and which != "balayage":
        return equilibrium_csv(which, grid, qn)
    if which == "balayage":
        vals, spread = balayage_check(grid, qn, return_values=True)
    else:
        vals, spread = equilibrium_check(which, grid, qn)
    tol = mpmath.mpf(str(cfg["tol"]))
    doc = {"which": which, "grid": [_num(g, 15) for g in grid], "values": [_num(v, 20) for v in vals],
           "spread": _num(spread, 5), "tolerance": str(cfg["tol"]), "quad_n": qn}
    if not spread < tol:
        raise CheckFailed({**doc, "failed": "spread above tolerance"})
    return doc


def cmd_report(cfg):
    from .asymptotics import (EmpiricalMeasure, LimitDensity, measure_distance, ratio_limit_check,
                              roots, zero_location_audit)
    from .hp import rho_zeros, solve_power_system
    from .ode import verify_p2_s2
    from .potential import balayage_check, equilibrium_check

    ns = _n_list(cfg)
    alpha = cfg["alpha"]
    bits = cfg["precision_bits"]
    f = two_point(alpha)
    failures = []
    sols = {n: solve_power_system(f, 2, n) for n in ns}
    doc = {"schema_version": SCHEMA_VERSION, "alpha": str(alpha), "n_list": ns, "precision_bits": bits}
    doc["normality"] = [{"n": n, "normal": s.normal, "defect": s.defect} for n, s in sols.items()]
    audits = []
    for n, s in sols.items():
        for k in range(3):
            a = zero_location_audit(s.Q[k], bits)
            audits.append({"n": n, "k": k, **{key: _num(v, 10) for key, v in a.items()}})
            if not a["outside_E"]:
                failures.append(f"zeros of Q_{{{n},{k}}} not real outside [-1,1]")
    doc["zero_location"] = audits
    lim_nu, lim_lam = LimitDensity("nu", 20), LimitDensity("lambda", 20)
    ks_nu, ks_lam = [], []
    for n, s in sols.items():
        ks_nu.append(measure_distance(roots(s.Q[2], bits), lim_nu))
        rz = rho_zeros(s, alpha, precision_bits=bits)
        ks_lam.append(measure_distance(EmpiricalMeasure.from_points(rz), lim_lam))
    doc["ks_distance"] = {"nu": [{"n": n, "value": _num(v, 10)} for n, v in zip(ns, ks_nu)],
                          "lambda": [{"n": n, "value": _num(v, 10)} for n, v in zip(ns, ks_lam)]}
    allowed = 1 if len(ns) > 3 else 0
    if not (_decreasing(ks_nu, allowed) and _decreasing(ks_lam, allowed)):
        failures.append("KS distances do not decrease")
    errs = ratio_limit_check([sols[n] for n in ns], 1j, alpha, bits)
    doc["ratio_errors_at_i"] = [{"n": n, "Q1/Q2": _num(a, 10), "Q0/Q2": _num(b, 10)} for n, a, b in errs]
    if not _decreasing([a for _, a, _ in errs]):
        failures.append("ratio errors do not decrease")
    statuses = []
    for n in ns:
        res = verify_p2_s2(alpha, n, cfg["constants"], sols[n])
        zero = {k: v.is_zero() for k, v in res.items()}
        statuses.append({"n": n, "constants": cfg["constants"], "residual_zero": zero})
        if not all(zero.values()):
            failures.append(f"ODE residuals nonzero at n={n} ({cfg['constants']} constants)")
    doc["ode_residuals"] = statuses
    _, s1 = equilibrium_check("eq1", [mpmath.mpf(-0.5), mpmath.mpf(0), mpmath.mpf(0.5)])
    _, s2 = equilibrium_check("eq2", [mpmath.mpf(1.5), mpmath.mpf(2), mpmath.mpf(3)])
    sb = balayage_check([mpmath.mpf(1.5), mpmath.mpf(2), mpmath.mpf(4)])
    doc["equilibrium_spreads"] = {"eq1": _num(s1, 5), "eq2": _num(s2, 5), "balayage": _num(sb, 5)}
    if max(s1, s2, sb) >= mpmath.mpf("1e-6"):
        failures.append("equilibrium spread above 1e-6")
    doc["failures"] = failures
    if failures:
        raise CheckFailed(doc)
    return doc


COMMANDS = {
    "expand": (cmd_expand, "Laurent expansion of f at infinity"),
    "hp": (cmd_hp, "type I Hermite-Pade polynomials"),
    "pade": (cmd_pade, "Pade denominators and the Jacobi cross-check"),
    "ode-verify": (cmd_ode_verify, "exact residuals of the explicit p=2, s=2 equation"),
    "ode-extract": (cmd_ode_extract, "Wronskian-extracted equation and structure audit"),
    "zeros": (cmd_zeros, "zeros of Q_{n,k} or of rho_n"),
    "density": (cmd_density, "limit densities and KS comparison"),
    "ratio": (cmd_ratio, "ratio asymptotics errors"),
    "cubic": (cmd_cubic, "branches of the limit cubic"),
    "ordering": (cmd_ordering, "Nuttall sheet ordering"),
    "equilibrium": (cmd_equilibrium, "equilibrium and balayage identities"),
    "report": (cmd_report, "aggregate report over n_list"),
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hplab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", help="JSON file with option values")
        sp.add_argument("--alpha", help="rational exponent such as 1/3")
        sp.add_argument("--n", type=int)
        sp.add_argument("--n-list", dest="n_list", help="comma separated degrees")
        sp.add_argument("--s", type=int)
        sp.add_argument("--k", type=int, help="which Q_{n,k}")
        sp.add_argument("--precision-bits", dest="precision_bits", type=int)
        sp.add_argument("--truncation-order", dest="truncation_order", type=int)
        sp.add_argument("--output", "-o")
        sp.add_argument("--format", choices=("json", "csv"))
        sp.add_argument("--function", help='JSON {"branch_points": [...], "exponents": [...]}')
        if name in ("ode-verify", "ode-extract", "report"):
            sp.add_argument("--constants", choices=("printed", "derived"))
        if name == "expand":
            sp.add_argument("--order", type=int)
        if name == "zeros":
            sp.add_argument("--rho", action="store_true", default=None)
        if name == "density":
            sp.add_argument("--kind", choices=("nu", "lambda"))
            sp.add_argument("--x")
        if name in ("ratio", "cubic", "ordering"):
            sp.add_argument("--z")
        if name == "equilibrium":
            sp.add_argument("--which", choices=("eq1", "eq2", "balayage"))
            sp.add_argument("--grid", help="comma separated points")
            sp.add_argument("--quad-n", dest="quad_n", type=int)
            sp.add_argument("--tol")
    return p


def _emit(result, cfg):
    text = result if isinstance(result, str) else json.dumps(result, indent=2, sort_keys=True) + "\n"
    if cfg and cfg.get("output"):
        with open(cfg["output"], "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    parser = build_parser()
    cfg = None
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        cfg = _resolve(args)
        func = COMMANDS[args.command][0]
        result = func(cfg)
    except UsageError as exc:
        sys.stderr.write(f"hplab: usage error: {exc}\n")
        return 1
    except IntegerExponent as exc:
        sys.stderr.write(f"hplab: {exc}; 2*alpha in Z makes the system degenerate\n")
        return 1
    except (TruncationTooShort, OutsideSupport, OnBranchCut, OnBoundary, PathCrossesCut,
            ValueError, ZeroDivisionError) as exc:
        sys.stderr.write(f"hplab: configuration error: {exc}\n")
        return 1
    except CheckFailed as exc:
        _emit(exc.doc, cfg)
        return 2
    except HPLabError as exc:
        _emit({"error": type(exc).__name__, "message": str(exc)}, cfg)
        return 2
    _emit(result, cfg)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
