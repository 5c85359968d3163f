"""hornred command line: JSON in, JSON (or plain text) out.

Exit status 0 on success, 1 on any input or computation error (a JSON error
object goes to stderr), 2 when `check` finds a violated proposition.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Callable

from .config import Settings
from .epsilon import laurent_expand, pole_order
from .horn import HornSpec, PFQSpec, spec_from_json, sum_numeric, truncated_series
from .mellin_barnes import MBIntegrand, contour_quadrature, residue_sum
from .propositions import default_catalog_path, load_catalog, run_catalog
from .reduction import reduce, step_operator

COMMANDS = ("series", "eval", "reduce", "mb-sum", "mb-quad", "eps-expand", "check")


class PayloadError(ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.detail = message


def _section(field: str, fn: Callable[[], Any]):
    try:
        return fn()
    except PayloadError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise PayloadError(field, str(exc)) from None


def _require(payload: dict, key: str):
    if key not in payload:
        raise PayloadError(key, "missing")
    return payload[key]


def _number(payload: dict, key: str, default=None, kind=float):
    if key not in payload:
        if default is None:
            raise PayloadError(key, "missing")
        return default
    return _section(key, lambda: kind(payload[key]))


def _complex_json(v: complex) -> dict:
    return {"re": float(v.real), "im": float(v.imag)}


def _function(payload: dict):
    if "pFq" in payload:
        return _section("pFq", lambda: spec_from_json({"pFq": payload["pFq"]}))
    if "horn" in payload:
        return _section("horn", lambda: spec_from_json({"horn": payload["horn"]}))
    raise PayloadError("pFq", "missing (expected a 'pFq' or 'horn' object)")


def _pfq(payload: dict) -> PFQSpec:
    f = _function(payload)
    if not isinstance(f, PFQSpec):
        raise PayloadError("pFq", "this command needs a one-variable pFq")
    return f


# ---------------------------------------------------------------------------
# commands


def cmd_series(payload: dict, opts) -> dict:
    f = _function(payload)
    N = _number(payload, "N", opts.order, int)
    s = _section("N", lambda: truncated_series(f, N))
    if isinstance(f, HornSpec):
        return {"coefficients": {",".join(map(str, k)): str(v) for k, v in s.items()}}
    return {"coefficients": [str(c) for c in s.coeffs]}


def cmd_eval(payload: dict, opts) -> dict:
    f = _function(payload)
    z = _require(payload, "z")
    point = _section("z", lambda: [complex(v) for v in z] if isinstance(z, list) else complex(z))
    eps = _number(payload, "eps", 0.0)
    res = sum_numeric(f, point, eps, rel_tol=opts.rel_tol, term_cap=opts.term_cap)
    return {**_complex_json(res.value), "terms": res.terms, "last_term": res.last_term}


def cmd_reduce(payload: dict, opts) -> dict:
    f = _pfq(payload)
    if "step" in payload:
        st = payload["step"]
        if not isinstance(st, dict):
            raise PayloadError("step", "expected an object")
        res = _section(
            "step",
            lambda: step_operator(f, st.get("direction", "up"), st.get("side", "upper"), int(st.get("index", 0)), opts.order),
        )
        return res.to_json()
    ups = _section("upper_shifts", lambda: [int(x) for x in payload.get("upper_shifts", [0] * f.p)])
    los = _section("lower_shifts", lambda: [int(x) for x in payload.get("lower_shifts", [0] * f.q)])
    if len(ups) != f.p:
        raise PayloadError("upper_shifts", f"expected {f.p} entries")
    if len(los) != f.q:
        raise PayloadError("lower_shifts", f"expected {f.q} entries")
    return reduce(f, ups, los, order=opts.order).to_json()


def _mb(payload: dict) -> MBIntegrand:
    body = payload.get("mb", payload)
    return _section("mb", lambda: MBIntegrand.from_json(body))


def cmd_mb_sum(payload: dict, opts) -> dict:
    mb = _mb(payload)
    x = _number(payload, "at", None) if "at" in payload else None
    rs = residue_sum(mb, x=x, side=payload.get("side"))
    out = rs.to_json()
    if x is not None:
        out["value"] = _complex_json(rs.evaluate(x, _number(payload, "eps", 0.0)))
    return out


def cmd_mb_quad(payload: dict, opts) -> dict:
    mb = _mb(payload)
    x = _number(payload, "at")
    val = contour_quadrature(
        mb,
        x,
        _number(payload, "eps", 0.0),
        _number(payload, "t_max", 40.0),
        _number(payload, "n_points", 4001, int),
    )
    return _complex_json(val)


def cmd_eps_expand(payload: dict, opts) -> dict:
    f = _pfq(payload)
    K = _number(payload, "K", 0, int)
    N = _number(payload, "N", 10, int)
    L = laurent_expand(f, K, N)
    return {"min_order": L.min_order, "pole_order": pole_order(f), "z_order": N, "laurent": L.to_json()}


def cmd_check(opts) -> tuple[dict, int]:
    path = opts.catalog or default_catalog_path()
    report = run_catalog(load_catalog(path))
    return report, 0 if report["passed"] else 2


HANDLERS = {
    "series": cmd_series,
    "eval": cmd_eval,
    "reduce": cmd_reduce,
    "mb-sum": cmd_mb_sum,
    "mb-quad": cmd_mb_quad,
    "eps-expand": cmd_eps_expand,
}


# ---------------------------------------------------------------------------
# plumbing


def _scalar(v) -> bool:
    return v is None or isinstance(v, (str, int, float, bool))


def _text(obj, indent: str = "") -> list[str]:
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if _scalar(v):
                lines.append(f"{indent}{k}: {v}")
            elif isinstance(v, list) and all(_scalar(x) for x in v):
                lines.append(f"{indent}{k}: " + ", ".join(map(str, v)))
            else:
                lines.append(f"{indent}{k}:")
                lines.extend(_text(v, indent + "  "))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            lines.append(f"{indent}- [{i}]")
            lines.extend(_text(v, indent + "  "))
    else:
        lines.append(f"{indent}{obj}")
    return lines


def render(obj, fmt: str) -> str:
    if fmt == "text":
        return "\n".join(_text(obj)) + "\n"
    return json.dumps(obj, indent=2) + "\n"


def _read_payload(source: str) -> dict:
    text = sys.stdin.read() if source == "-" else open(source, encoding="utf-8").read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PayloadError("input", f"not valid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise PayloadError("input", "payload must be a JSON object")
    return data


class UsageError(ValueError):
    field = "command"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--input", default="-", help="payload file, or - for stdin (default)")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--order", type=int, default=50, help="series / verification order (default 50)")
    common.add_argument("--rel-tol", type=float, default=1e-10, help="numeric stopping tolerance (default 1e-10)")
    common.add_argument("--term-cap", type=int, default=10**6, help="maximum number of summed terms (default 1e6)")
    common.add_argument("--catalog", default=None, help="catalog file for `check` (default: shipped catalog)")
    parser = _Parser(prog="hornred", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=f"{name} (payload as JSON)")
    return parser


def _error(exc: BaseException) -> str:
    body = {"type": type(exc).__name__, "message": str(exc)}
    field = getattr(exc, "field", None)
    if field:
        body["field"] = field
        body["message"] = getattr(exc, "detail", str(exc))
    return json.dumps({"error": body}) + "\n"


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        opts = parser.parse_args(argv)
    except SystemExit as exc:  # --help
        return 0 if exc.code in (0, None) else 1
    except UsageError as exc:
        stderr.write(json.dumps({"error": {"type": "UsageError", "message": str(exc), "field": "command"}}) + "\n")
        return 1
    try:
        settings = Settings.from_namespace(opts)
        if opts.command == "check":
            report, code = cmd_check(settings)
            stdout.write(render(report, settings.fmt))
            return code
        payload = _read_payload(opts.input)
        result = HANDLERS[opts.command](payload, settings)
    except Exception as exc:  # every failure becomes a JSON object
        stderr.write(_error(exc))
        return 1
    stdout.write(render(result, settings.fmt))
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
