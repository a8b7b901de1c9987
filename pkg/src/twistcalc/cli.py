"""Command line front end: ``twistcalc <command> [options]``.

Exit codes: 0 on success, 1 on usage errors (bad flags, unparsable input,
bad config), 2 on domain errors (root of unity, insufficient bounds,
non-integrable connection, ...).  Errors are reported on stderr as JSON
``{"error": {"code": ..., "type": ..., "message": ...}}``.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .banach import EtaRadius, eta_norm, operator_eta_norm, radius_estimate, rho_sigma
from .coefficients import format_valuation
from .config import AlgebraConfig
from .confluence import confluence_sweep, isometry_witness, to_classical_pair
from .connections import de_rham_dims
from .errors import DomainError, TwistcalcError, UsageError
from .operators import TwistedOperator, apply, compose, normal_form_sum
from .parsing import parse_operator, parse_poly, scalars_for
from .poly import format_poly
from .principal_parts import evaluate_pi, from_twisted_basis, symmetric_check, taylor
from .twist import TwistSpec, VariableTwist, check_coordinates, contractivity_check, sigma_power_apply

COMMANDS = ("check", "apply", "compose", "normalform", "taylor", "pi", "radius",
            "etanorm", "confluence", "derham", "symcheck")


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="algebra config (TOML or JSON)")
    common.add_argument("--f", metavar="EXPR", help="polynomial input")
    common.add_argument("--expr", metavar="EXPR", action="append", default=[],
                        help="operator expression (repeat for compose)")
    common.add_argument("--n", type=int, metavar="INT", help="jet order / truncation order")
    common.add_argument("--m", type=int, metavar="INT", help="second order for symcheck")
    common.add_argument("--k", metavar="CSV", help="multi-index, e.g. 2,0")
    common.add_argument("--eta", metavar="RATIONAL-LOG", help="eta = p^-ell, given as ell")
    common.add_argument("--bound", type=int, metavar="INT", help="degree bound")
    common.add_argument("--sweep", metavar="Q,Q,...", help="q values for a confluence sweep")
    common.add_argument("--strict", action="store_true", help="confluence: require exactness to N+D")
    common.add_argument("--json", action="store_true", help="emit JSON")
    common.add_argument("--out", metavar="PATH", help="write output to PATH")
    parser = _ArgumentParser(prog="twistcalc", description="Exact twisted differential calculus.")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True
    helps = {
        "check": "coordinate and contractivity report",
        "apply": "apply an operator to a polynomial",
        "compose": "compose operators (first --expr applied last)",
        "normalform": "divided-power normal form of an operator expression",
        "taylor": "twisted Taylor jet of a polynomial",
        "pi": "evaluate the pi_k map on the Taylor jet",
        "radius": "bounded-degree radius report",
        "etanorm": "eta-norm of an operator or of a Taylor jet",
        "confluence": "classical image of a twisted operator",
        "derham": "ranks of the truncated de Rham complex",
        "symcheck": "check the symmetric-coordinate identity",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


# helpers ------------------------------------------------------------------------

class Context:
    def __init__(self, args):
        self.args = args
        self.config = AlgebraConfig.load(args.config) if args.config else AlgebraConfig()
        self.spec = self.config.spec()
        self.ctx = self.spec.ctx
        self.scalars = scalars_for(self.spec)

    def poly(self, text: Optional[str] = None) -> object:
        text = text if text is not None else self.args.f
        if text is None:
            raise UsageError("this command needs --f")
        return parse_poly(text, d=self.spec.d, scalars=self.scalars)

    def operator(self, text: str, spec: TwistSpec | None = None) -> TwistedOperator:
        spec = spec or self.spec
        return normal_form_sum(parse_operator(text, d=spec.d, scalars=scalars_for(spec)), spec)

    def expr(self, count: int | None = 1) -> List[str]:
        e = self.args.expr
        if not e:
            raise UsageError("this command needs --expr")
        if count is not None and len(e) != count:
            raise UsageError(f"expected {count} --expr value(s), got {len(e)}")
        return e

    def eta(self) -> EtaRadius:
        if self.args.eta is None:
            return EtaRadius(Fraction(0))
        try:
            return EtaRadius(Fraction(self.args.eta))
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad --eta value {self.args.eta!r}: {exc}") from exc

    def multi_index(self) -> Tuple[int, ...]:
        if self.args.k is None:
            raise UsageError("this command needs --k")
        try:
            k = tuple(int(a) for a in self.args.k.split(","))
        except ValueError as exc:
            raise UsageError(f"bad --k value {self.args.k!r}") from exc
        if len(k) != self.spec.d or any(a < 0 for a in k):
            raise UsageError(f"--k needs {self.spec.d} nonnegative entries")
        return k

    def header(self, command: str) -> Dict:
        return {"command": command, "twists": list(self.config.twists), "norm": self.config.norm}


def _terms_text(rows: Sequence[Tuple[str, str]]) -> str:
    width = max((len(a) for a, _ in rows), default=0)
    return "\n".join(f"{a.ljust(width)}  {b}" for a, b in rows)


# commands -------------------------------------------------------------------------

def cmd_check(c: Context):
    bound = c.args.bound or c.config.N
    report = check_coordinates(c.spec, bound)
    contr = contractivity_check(c.spec, c.ctx, bound)
    rho = rho_sigma(c.spec, c.ctx)
    data = c.header("check")
    data.update({
        "report": report.to_json(),
        "contractive": contr.ok,
        "contractivity_witness": [contr.witness[0], list(contr.witness[1])] if contr.witness else None,
        "rho_valuation": format_valuation(rho.valuation),
    })
    lines = [f"coordinates checked to degree {bound}"]
    for v in report.variables:
        lines.append(f"x{v.index} [{v.twist}]: kind={v.kind} strong={v.strong} classical={v.classical}"
                     + (f" witness={v.witness}" if v.witness else "")
                     + ("".join(f" ({n})" for n in v.notes)))
    lines.append(f"contractive: {contr.ok}")
    lines.append(f"rho valuation: {format_valuation(rho.valuation)}")
    return data, "\n".join(lines)


def cmd_apply(c: Context):
    op = c.operator(c.expr()[0])
    f = c.poly()
    result = apply(op, f)
    data = c.header("apply")
    data.update({"operator": str(op), "f": format_poly(f), "result": format_poly(result)})
    return data, format_poly(result)


def cmd_compose(c: Context):
    exprs = c.expr(count=None)
    if len(exprs) < 2:
        raise UsageError("compose needs at least two --expr values")
    ops = [c.operator(e) for e in exprs]
    result = ops[-1]
    for op in reversed(ops[:-1]):
        result = compose(op, result)
    data = c.header("compose")
    data.update({"operators": [str(o) for o in ops], "result": str(result), "terms": result.to_json()["terms"]})
    return data, str(result)


def cmd_normalform(c: Context):
    op = c.operator(c.expr()[0])
    data = c.header("normalform")
    data.update({"result": str(op), "terms": op.to_json()["terms"]})
    return data, str(op)


def cmd_taylor(c: Context):
    f = c.poly()
    n = c.args.n if c.args.n is not None else c.config.N
    if n < 0:
        raise UsageError("--n must be >= 0")
    jet = taylor(f, n, c.spec)
    data = c.header("taylor")
    data.update({"f": format_poly(f), "jet": jet.to_json()})
    rows = [(f"k={list(k)}", format_poly(v)) for k, v in jet.items()]
    return data, _terms_text(rows) if rows else "0"


def cmd_pi(c: Context):
    f = c.poly()
    k = c.multi_index()
    n = c.args.n if c.args.n is not None else sum(k)
    if n < sum(k):
        raise UsageError("--n must be at least |k|")
    value = evaluate_pi(taylor(f, n, c.spec), k)
    agrees = value == sigma_power_apply(f, k, c.spec)
    data = c.header("pi")
    data.update({"f": format_poly(f), "k": list(k), "result": format_poly(value), "equals_sigma_k": agrees})
    return data, format_poly(value)


def cmd_radius(c: Context):
    f = c.poly()
    D = c.args.bound or c.config.D
    report = radius_estimate(f, c.spec, c.ctx, D)
    data = c.header("radius")
    data.update({"f": format_poly(f), "report": report.to_json(),
                 "everywhere_convergent": report.everywhere_convergent})
    rows = [(f"deg {r.deg}", f"min v = {format_valuation(r.min_valuation)}  evidence = {format_valuation(r.evidence)}")
            for r in report.rows]
    rows.append(("lower bound", f"radius >= p^-({format_valuation(report.lower_bound_log_radius)})"))
    return data, _terms_text(rows)


def cmd_etanorm(c: Context):
    eta = c.eta()
    data = c.header("etanorm")
    data["ell"] = format_valuation(eta.ell)
    if c.args.expr:
        op = c.operator(c.expr()[0])
        v = operator_eta_norm(op, eta, c.ctx).valuation
        data.update({"operator": str(op), "valuation": format_valuation(v)})
        return data, f"operator norm valuation: {format_valuation(v)}"
    f = c.poly()
    n = c.args.n if c.args.n is not None else c.config.N
    jet = taylor(f, n, c.spec)
    tw = eta_norm(jet, eta, c.ctx, cross_check=False).valuation
    mono = eta_norm(from_twisted_basis(jet), eta, c.ctx, cross_check=False).valuation
    rho = rho_sigma(c.spec, c.ctx)
    data.update({"f": format_poly(f), "order": n, "twisted_valuation": format_valuation(tw),
                 "monomial_valuation": format_valuation(mono),
                 "isometric_regime": eta.at_least(rho)})
    return data, f"twisted basis: {format_valuation(tw)}\nmonomial basis: {format_valuation(mono)}"


def _with_q(spec: TwistSpec, q: Fraction) -> TwistSpec:
    if not any(t.kind == "q" for t in spec.twists):
        raise UsageError("--sweep needs at least one q twist in the config")
    return TwistSpec([VariableTwist("q", q) if t.kind == "q" else t for t in spec.twists], spec.ctx)


def cmd_confluence(c: Context):
    text = c.expr()[0]
    N = c.args.n if c.args.n is not None else c.config.N
    D = c.args.bound or c.config.D
    eta = c.eta()
    data = c.header("confluence")
    if c.args.sweep:
        try:
            qs = [Fraction(s) for s in c.args.sweep.split(",")]
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad --sweep value {c.args.sweep!r}") from exc
        for q in qs:
            if q in (0, 1):
                raise UsageError("sweep q values must differ from 0 and 1")
        rows = confluence_sweep(lambda q: c.operator(text, _with_q(c.spec, q)), qs, N, D, eta, c.ctx)
        data.update({"N": N, "D": D, "ell": format_valuation(eta.ell), "rows": [r.to_json() for r in rows]})
        lines = []
        for r in rows:
            lines.append(f"q = {r.to_json()['q']}: {r.operator}  (eta-norm valuation {format_valuation(r.eta_norm_valuation)})")
        return data, "\n".join(lines)
    op = c.operator(text)
    pair = to_classical_pair(op, N, D, strict=c.args.strict)
    iso = isometry_witness(pair, eta, c.ctx)
    data.update({"pair": pair.to_json(), "isometry": iso.to_json()})
    lines = [f"classical image (order <= {N}): {pair.target}",
             f"agrees with source up to degree {N + D if pair.exact else N}",
             f"eta-norm valuations: source {format_valuation(iso.source_valuation)}, "
             f"classical {format_valuation(iso.target_valuation)} ({iso.caveat})"]
    return data, "\n".join(lines)


def cmd_derham(c: Context):
    D = c.args.bound or c.config.D
    mod = c.config.module(c.spec)
    res = de_rham_dims(mod, D)
    data = c.header("derham")
    data.update({"module": mod.to_json(), "result": res.to_json()})
    rows = [(f"C^{r.degree}", f"dim={r.dimension} ker={r.kernel_rank} im={r.image_rank} H={r.cohomology}")
            for r in res.rows]
    rows.append(("nabla^2 = 0", str(res.nabla_squared_zero)))
    return data, _terms_text(rows) + "\n" + "\n".join(res.notes)


def cmd_symcheck(c: Context):
    f = c.poly()
    n = c.args.n if c.args.n is not None else 1
    m = c.args.m if c.args.m is not None else n
    if n < 0 or m < 0:
        raise UsageError("orders must be >= 0")
    res = symmetric_check(f, n, m, c.spec)
    data = c.header("symcheck")
    data.update({"f": format_poly(f), "result": res.to_json()})
    text = f"symmetric up to orders ({n}, {m}): {res.ok}"
    if res.differing_index:
        text += f" (differs at {res.differing_index})"
    return data, text


HANDLERS: Dict[str, Callable] = {
    "check": cmd_check, "apply": cmd_apply, "compose": cmd_compose, "normalform": cmd_normalform,
    "taylor": cmd_taylor, "pi": cmd_pi, "radius": cmd_radius, "etanorm": cmd_etanorm,
    "confluence": cmd_confluence, "derham": cmd_derham, "symcheck": cmd_symcheck,
}


def _report_error(exc: BaseException, code: str) -> None:
    payload = {"error": {"code": code, "type": type(exc).__name__, "message": str(exc)}}
    sys.stderr.write(json.dumps(payload) + "\n")


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        c = Context(args)
        data, text = HANDLERS[args.command](c)
        out = json.dumps(data, indent=2) + "\n" if args.json else text + "\n"
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(out)
        else:
            sys.stdout.write(out)
        return 0
    except DomainError as exc:
        _report_error(exc, exc.code)
        return 2
    except UsageError as exc:
        _report_error(exc, exc.code)
        return 1
    except TwistcalcError as exc:  # pragma: no cover - every error is a usage or domain error
        _report_error(exc, exc.code)
        return 2
    except (ValueError, ZeroDivisionError) as exc:
        _report_error(exc, "E_INVALID_INPUT")
        return 1
    except OSError as exc:
        _report_error(exc, "E_IO")
        return 1


def main(argv: Optional[Sequence[str]] = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":  # pragma: no cover
    main()
