"""Command-line front end.

Every run reads a JSON config (``--config``; keys may be overridden with
``--set key=value``), dispatches one command and writes a JSON bundle::

    {"schema": "wittkit.result/1", "command": ..., "config": ..., "seed": ...,
     "result": ..., "assertions": [{"name": ..., "ok": ...}], "ok": ...}

The exit status is 0 only when every assertion holds, 1 when one fails and 2
for configuration errors.  Output is deterministic for a fixed config and
seed; wall-clock timing is added only with ``--timing``.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from typing import Any, Callable

from . import exponentials as ex
from . import framed as fr
from . import kummer as km
from . import witt as wt
from .ring import (
    QQ, ZZ, EisensteinRing, LocalRing, NotDivisible, NotIntegral, PolyRing, ring_from_description,
)

SCHEMA = "wittkit.result/1"
PRECISION_ENV = "WITTKIT_PRECISION"

log = logging.getLogger("wittkit")


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# config helpers


def default_precision() -> int:
    raw = os.environ.get(PRECISION_ENV)
    if raw is None:
        return 12
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"{PRECISION_ENV} must be an integer, got {raw!r}") from exc


def make_ring(spec, p: int | None = None):
    """Ring from a config entry: a dict description or a short name."""
    if spec is None:
        return LocalRing(p) if p else ZZ
    if isinstance(spec, str):
        name = spec.strip()
        if name == "ZZ":
            return ZZ
        if name == "QQ":
            return QQ
        if name in ("local", "ZZp"):
            return LocalRing(_need(p, "p"))
        if name == "O":
            return PolyRing.O(_need(p, "p"))
        raise ConfigError(f"unknown ring {spec!r}")
    if not isinstance(spec, dict):
        raise ConfigError("ring must be a name or an object")
    kind = spec.get("kind")
    if kind == "eisenstein":
        spec = {"K": default_precision(), **spec}
        if "p" not in spec and p is not None:
            spec["p"] = p
    if kind == "O":
        return PolyRing.O(int(spec.get("p", _need(p, "p"))), spec.get("extra", ()))
    if kind == "local":
        return LocalRing(int(spec.get("p", _need(p, "p"))))
    try:
        return ring_from_description(spec)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad ring description: {exc}") from exc


def _need(x, name):
    if x is None:
        raise ConfigError(f"missing required key {name!r}")
    return x


def value(ring, x):
    if isinstance(x, str):
        return ring.parse(x)
    if isinstance(x, bool) or x is None:
        raise ConfigError(f"not a ring element: {x!r}")
    return ring.coerce(x)


def witt_vector(ring, p, x) -> wt.WittVector:
    if isinstance(x, dict):
        coords, horizon = x.get("coords", []), x.get("horizon")
    else:
        coords, horizon = x, None
    if not isinstance(coords, list):
        raise ConfigError("a Witt vector is a list of coordinates")
    return wt.WittVector(ring, p, [value(ring, c) for c in coords], horizon)


def _fmt_series(s: ex.TruncSeries) -> str:
    parts = []
    for k, c in enumerate(s.coeffs):
        if s.ring.is_zero(c):
            continue
        cs = s.ring.fmt(c)
        mono = "" if k == 0 else ("T" if k == 1 else f"T^{k}")
        if not mono:
            parts.append(cs)
        elif cs == "1":
            parts.append(mono)
        else:
            parts.append(f"({cs})*{mono}")
    return " + ".join(parts) or "0"


class Run:
    """Collects results and assertion outcomes for one command."""

    def __init__(self, cfg: dict, seed: int):
        self.cfg = cfg
        self.seed = seed
        self.assertions: list[dict] = []

    def get(self, key, default=None, required=False):
        if key in self.cfg:
            return self.cfg[key]
        if required:
            raise ConfigError(f"missing required key {key!r}")
        return default

    def check(self, name: str, ok: bool, **detail):
        entry = {"name": name, "ok": bool(ok)}
        if detail:
            entry["detail"] = detail
        self.assertions.append(entry)
        log.info("%s %s", "PASS" if ok else "FAIL", name)
        return ok


# ---------------------------------------------------------------------------
# witt


def _witt_inputs(run: Run):
    p = int(run.get("p", required=True))
    ring = make_ring(run.get("ring"), p) if run.get("ring") is not None else ZZ
    return p, ring


def _ghost_ok(run, name, w, expected_fn, depth):
    ok = True
    g = wt.ghost(w, depth).values
    for r, val in enumerate(g):
        ok = ok and w.ring.is_zero(val - expected_fn(r))
    run.check(name, ok)


def cmd_witt_ghost(run: Run):
    p, ring = _witt_inputs(run)
    w = witt_vector(ring, p, run.get("vector", required=True))
    depth = int(run.get("depth", len(w.coords) - 1))
    g = wt.ghost(w, depth)
    back = wt.ghost_lift(g.values, p, ring)
    run.check("ghost_lift inverts ghost", back.equals(w, depth + 1))
    return {"ghost": [ring.fmt(v) for v in g.values]}


def _binary(op):
    def cmd(run: Run):
        p, ring = _witt_inputs(run)
        x = witt_vector(ring, p, run.get("x", required=True))
        y = witt_vector(ring, p, run.get("y", required=True))
        depth = run.get("depth")
        res = {"add": wt.witt_add, "sub": wt.witt_sub, "mul": wt.witt_mul}[op](x, y, depth)
        n = min(res.known(), x.known(), y.known(), 6)
        gx, gy = wt.ghost(x, n - 1).values, wt.ghost(y, n - 1).values
        combine = {"add": lambda a, b: a + b, "sub": lambda a, b: a - b, "mul": lambda a, b: a * b}[op]
        _ghost_ok(run, f"ghost components of {op} are {op} of ghost components", res,
                  lambda r: combine(gx[r], gy[r]), n - 1)
        return {"result": res.to_json()}
    return cmd


def cmd_witt_frobenius(run: Run):
    p, ring = _witt_inputs(run)
    x = witt_vector(ring, p, run.get("x", required=True))
    lam = run.get("lambda")
    if lam is None:
        res = wt.frobenius(x, run.get("depth"))
        n = min(res.known(), x.known() - 1, 5)
        gx = wt.ghost(x, n).values
        _ghost_ok(run, "Phi_r(F x) = Phi_{r+1}(x)", res, lambda r: gx[r + 1], n - 1)
    else:
        lam = value(ring, lam)
        res = wt.f_lambda(x, lam, run.get("depth"))
        n = min(res.known(), x.known() - 1, 5)
        gx = wt.ghost(x, n).values
        _ghost_ok(run, "Phi_r(F^lam x) = Phi_{r+1}(x) - lam^(p^r(p-1)) Phi_r(x)", res,
                  lambda r: gx[r + 1] - lam ** (p ** r * (p - 1)) * gx[r], n - 1)
    return {"result": res.to_json()}


def cmd_witt_tmap(run: Run):
    p, ring = _witt_inputs(run)
    a = witt_vector(ring, p, run.get("a", required=True))
    x = witt_vector(ring, p, run.get("x", required=True))
    res = wt.t_map(a, x, run.get("depth"))
    alt = wt.t_map_by_sum(a, x, run.get("depth"))
    run.check("T_a x agrees with sum of V^r([a_r] x)", res.equals(alt))
    return {"result": res.to_json()}


# ---------------------------------------------------------------------------
# exponentials


def _exp_ring(run):
    p = int(run.get("p", 2))
    return p, make_ring(run.get("ring"), p) if run.get("ring") is not None else LocalRing(p)


def _series_out(s):
    return {"series": _fmt_series(s), "coefficients": [s.ring.fmt(c) for c in s.coeffs]}


def cmd_exp_single(run: Run):
    p, ring = _exp_ring(run)
    u = value(ring, run.get("u", 1))
    lam = value(ring, run.get("lambda", 0))
    D = int(run.get("degree", 8))
    s = ex.ep_single(u, lam, D, p, ring)
    run.check("constant term is 1", ring.is_zero(s[0] - ring.one))
    return _series_out(s)


def cmd_exp_vector(run: Run):
    p, ring = _exp_ring(run)
    a = witt_vector(ring, p, run.get("a", required=True))
    lam = value(ring, run.get("lambda", 0))
    D = int(run.get("degree", 8))
    s = ex.ep_vector(a, lam, D, p, ring)
    run.check("constant term is 1", ring.is_zero(s[0] - ring.one))
    return _series_out(s)


def cmd_exp_truncated(run: Run):
    p, ring = _exp_ring(run)
    L, M, N = (int(run.get(k, required=True)) for k in ("L", "M", "N"))
    level = ex.TruncationLevel(L, M, N, p)
    out = {"B": level.B}
    if run.get("a") is not None:
        a = witt_vector(ring, p, run.get("a"))
        lam = value(ring, run.get("lambda", 0))
        out.update(_series_out(ex.ep_truncated(a, lam, level, ring)))
    if run.get("support_check", True):
        report: dict = {}
        ok = ex.degree_support_check(level, report=report)
        run.check("E_p vanishes above degree B modulo the truncation ideal", ok, **report)
        out["support"] = report
    return out


def cmd_exp_decompose(run: Run):
    p, ring = _exp_ring(run)
    coeffs = [value(ring, c) for c in run.get("series", required=True)]
    lam = value(ring, run.get("lambda", 0))
    G = ex.TruncSeries(ring, len(coeffs) - 1, coeffs)
    parts = ex.harmonic_decompose(G, lam, p)
    back = ex.harmonic_reconstruct(parts, lam, p, G.D, ring)
    run.check("product of harmonics reconstructs the series", back.equals(G))
    return {"harmonics": {str(k): w.to_json() for k, w in parts.items()}}


# ---------------------------------------------------------------------------
# towers


def _tower_ring(run):
    p = int(run.get("p", 2))
    spec = run.get("ring") or {"kind": "eisenstein", "p": p, "e": 2}
    return p, make_ring(spec, p)


def _lambdas(run, ring):
    lams = run.get("lambdas")
    if lams is None:
        lams = [run.get("lambda", required=True)]
    return [value(ring, l) for l in lams]


def cmd_tower_init(run: Run):
    p, ring = _tower_ring(run)
    lam = _lambdas(run, ring)[0]
    st = fr.init_tower(p, ring, lam, mode=run.get("mode", "algebraic"))
    X, Y = st.X(1), st.Y(1)
    run.check("law is X1 + Y1 + lambda X1 Y1", (st.law_symbolic()[0] - (X + Y + X * Y * st.lambdas[0])).vanishes())
    return {"tower": st.to_json()}


def _build(run, p, ring, lams):
    st = fr.init_tower(p, ring, lams[0], mode=run.get("mode", "algebraic"),
                       degree_cap=int(run.get("degree_cap", 12)))
    frames = run.get("frames", [])
    levels = run.get("levels", [])
    for k, lam in enumerate(lams[1:]):
        spec = frames[k] if k < len(frames) else None
        if spec is None:
            a = [wt.WittVector(ring, p, ()) for _ in range(st.n)]
        else:
            a = [witt_vector(ring, p, w) for w in spec]
        frame = fr.check_frame(st, a, lam)
        if not run.check(f"frame {k + 1} satisfies U(a) = lambda.b", frame is not None):
            return st, False
        lv = levels[k] if k < len(levels) else None
        st = fr.extend_tower(st, frame, lam, lv)
    return st, True


def cmd_tower_extend(run: Run):
    p, ring = _tower_ring(run)
    lams = _lambdas(run, ring)
    st, ok = _build(run, p, ring, lams)
    out = {"tower": st.to_json()}
    if ok and int(run.get("samples", 0)) and not isinstance(ring, PolyRing):
        rep = fr.verify_group_axioms(st, int(run.get("samples")), run.seed)
        run.check("group axioms at sampled points", rep["ok"], passed=rep["passed"])
        out["verification"] = rep
    return out


def cmd_tower_verify(run: Run):
    """Search frames in a box and verify every extension."""
    p, ring = _tower_ring(run)
    lams = _lambdas(run, ring)
    if len(lams) != 2:
        raise ConfigError("tower.verify takes lambdas = [lambda_1, lambda_2]")
    st = fr.init_tower(p, ring, lams[0])
    box = [value(ring, b) for b in run.get("box", required=True)]
    depth = int(run.get("depth", 2))
    samples = int(run.get("samples", 50))
    level = run.get("level", [2, 2, 2])
    frames = fr.frame_search(st, lams[1], box, depth)
    rows = []
    zero = fr.extend_tower(st, fr.check_frame(st, [wt.WittVector(ring, p, ())], lams[1]), lams[1], [level])
    X1, X2, Y1, Y2 = zero.X(1), zero.X(2), zero.Y(1), zero.Y(2)
    law = zero.law_symbolic()
    direct = [X1 + Y1 + X1 * Y1 * lams[0], X2 + Y2 + X2 * Y2 * lams[1]]
    run.check("zero frame gives the direct product law", all((a - b).vanishes() for a, b in zip(law, direct)))
    for frame in frames:
        try:
            ext = fr.extend_tower(st, frame, lams[1], [level])
            rep = fr.verify_group_axioms(ext, samples, run.seed)
            ok = rep["ok"]
            rows.append({"a": frame.a[0].to_json(), "K": str(ext.levels[0].K), "passed": rep["passed"], "ok": ok})
        except (NotDivisible, NotIntegral, fr.TruncationTooCoarse, ValueError) as exc:
            ok = False
            rows.append({"a": frame.a[0].to_json(), "error": str(exc), "ok": False})
        run.check(f"frame {[ring.fmt(c) for c in frame.a[0].coords]}", ok)
    return {"frames_found": len(frames), "frames": rows}


# ---------------------------------------------------------------------------
# kummer


def cmd_kummer_dim1(run: Run):
    p = int(run.get("p", 2))
    ring = make_ring(run.get("ring") or "O", p)
    lam = value(ring, run.get("lambda", "L" if isinstance(ring, PolyRing) else "pi"))
    res = km.kummer_dim1(lam, ring, p)
    if res.finite_flat:
        run.check("psi is a homomorphism", res.homomorphism_ok)
    return res.to_json()


def cmd_kummer_pexp(run: Run):
    p = int(run.get("p", required=True))
    res = km.p_witt_expansion(p, int(run.get("depth", 3)))
    run.check("valuation pattern", res.pattern_ok)
    return res.to_json()


def cmd_kummer_dvector(run: Run):
    p = int(run.get("p", 2))
    ring = make_ring(run.get("ring") or "O", p)
    lam = value(ring, run.get("lambda", "L" if isinstance(ring, PolyRing) else "pi"))
    d = km.d_vector(ring, lam, p, int(run.get("depth", 3)))
    run.check("lambda^p d_i = (p[lambda])_i", True)  # d_vector asserts the identity itself
    return d.to_json()


def _pair(run):
    p, ring = _tower_ring(run)
    lams = _lambdas(run, ring)
    if len(lams) != 2:
        raise ConfigError("give lambdas = [lambda_1, lambda_2]")
    return p, ring, lams, km.init_isogeny(p, ring, lams[0])


def cmd_kummer_bigframe(run: Run):
    p, ring, lams, pair = _pair(run)
    zero = [wt.WittVector(ring, p, ())]
    z0 = km.big_frame_check(pair.e_tower, pair.f_tower, pair.upsilon, zero, zero, lams[1],
                            run.get("c_convention", "printed"))
    res = km.big_frame_search(pair, lams[1], [value(ring, b) for b in run.get("box", required=True)],
                              int(run.get("depth", 2)), enlarge=bool(run.get("enlarge", True)),
                              samples=int(run.get("samples", 50)), seed=run.seed,
                              c_convention=run.get("c_convention", "printed"))
    run.check("zero frames give no witness", z0 is None)
    run.check("witness exists iff Psi_2 divisions succeed", res["agreement"])
    for row in res["positives"]:
        run.check("isogeny identities at sampled points", row["isogeny_checks"])
        run.check(f"kernel point count = p^2 (found {row['kernel_points']})", row["kernel_ok"])
    run.check("a positive big frame exists in the box", bool(res["positives"]),
              finding=res["finding"])
    return res


def cmd_kummer_isogeny(run: Run):
    p, ring, lams, pair = _pair(run)
    a = [witt_vector(ring, p, w) for w in run.get("a", [[]])]
    u = [witt_vector(ring, p, w) for w in run.get("u", [[]])]
    conv = run.get("c_convention", "printed")
    z = km.big_frame_check(pair.e_tower, pair.f_tower, pair.upsilon, a, u, lams[1], conv)
    out: dict[str, Any] = {"witness": None if z is None else [w.to_json() for w in z]}
    if not run.check("z-witness exists", z is not None):
        return out
    ef = fr.check_frame(pair.e_tower, a, lams[1])
    ff = fr.check_frame(pair.f_tower, u, lams[1] ** p)
    bf = km.BigFrame(ef.a, ef.b, ff.a, ff.b, tuple(z))
    ext = km.isogeny_extend(pair, bf, lams[1], run.get("e_levels"), run.get("f_levels"),
                            int(run.get("samples", 50)), run.seed)
    rep = km.check_isogeny(ext, int(run.get("samples", 50)), run.seed)
    run.check("Theta(alpha) = beta(Psi) at sampled points", rep["ok"])
    kc = km.kernel_count(ext)
    run.check(f"kernel point count = p^2 (found {kc['points']})", kc["points"] == p ** 2 and kc["pending"] == 0)
    out.update({"isogeny": ext.to_json(), "checks": rep, "kernel": kc})
    return out


def cmd_tprime(run: Run):
    p = int(run.get("p", 2))
    ring = make_ring(run.get("ring") or "O", p)
    lam = value(ring, run.get("lambda", "L"))
    R = int(run.get("R", 4))
    d = km.d_vector(ring, lam, p, R)
    t = km.tprime_d(d, R, witt_lift=bool(run.get("lift", True)))
    run.check("alpha_n lies in the span of the beta_k", all(ring.is_zero(r) for r in t.remainders))
    run.check("specialization annihilates alpha_n", t.specialization_ok)
    if t.intertwining_ok is not None:
        run.check("ghost intertwining", all(t.intertwining_ok))
    if t.lift_integral is not None:
        run.check("Witt-side lift is integral", t.lift_integral)
    return t.to_json(ring)


COMMANDS: dict[str, Callable[[Run], dict]] = {
    "witt.ghost": cmd_witt_ghost,
    "witt.add": _binary("add"),
    "witt.sub": _binary("sub"),
    "witt.mul": _binary("mul"),
    "witt.frobenius": cmd_witt_frobenius,
    "witt.tmap": cmd_witt_tmap,
    "exp.single": cmd_exp_single,
    "exp.vector": cmd_exp_vector,
    "exp.truncated": cmd_exp_truncated,
    "exp.decompose": cmd_exp_decompose,
    "tower.init": cmd_tower_init,
    "tower.extend": cmd_tower_extend,
    "tower.verify": cmd_tower_verify,
    "kummer.dim1": cmd_kummer_dim1,
    "kummer.p-expansion": cmd_kummer_pexp,
    "kummer.d-vector": cmd_kummer_dvector,
    "kummer.bigframe-search": cmd_kummer_bigframe,
    "kummer.isogeny": cmd_kummer_isogeny,
    "tprime": cmd_tprime,
}


# ---------------------------------------------------------------------------
# entry point


def run(config: dict, seed: int = 0, timing: bool = False) -> dict:
    """Execute one config and return the result bundle."""
    command = config.get("command")
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; choose from {sorted(COMMANDS)}")
    r = Run(config, seed)
    t0 = time.perf_counter()
    try:
        result = COMMANDS[command](r)
    except ConfigError:
        raise
    except (NotDivisible, NotIntegral, ArithmeticError, AssertionError, ValueError) as exc:
        r.check(f"{command} completed", False, error=f"{type(exc).__name__}: {exc}")
        result = None
    bundle = {
        "schema": SCHEMA, "command": command, "config": config, "seed": seed,
        "result": result, "assertions": r.assertions, "ok": all(a["ok"] for a in r.assertions),
    }
    if timing:
        bundle["timing_seconds"] = round(time.perf_counter() - t0, 3)
    return bundle


def _parse_set(items):
    out = {}
    for item in items or ():
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        try:
            out[k] = json.loads(v)
        except json.JSONDecodeError:
            out[k] = v
    return out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="wittkit", description="Witt vectors, deformed exponentials, framed groups, Kummer isogenies.")
    ap.add_argument("command", nargs="?", help=f"one of: {', '.join(COMMANDS)} (or give 'command' in the config)")
    ap.add_argument("--config", help="JSON config file")
    ap.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key (value parsed as JSON)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", help="write the JSON bundle here instead of stdout")
    ap.add_argument("--verbosity", type=int, default=1, help="0 silent, 1 summary, 2 per-assertion log")
    ap.add_argument("--timing", action="store_true", help="include wall-clock timing (breaks byte-identical output)")
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbosity >= 2 else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        cfg = {}
        if args.config:
            with open(args.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
            if not isinstance(cfg, dict):
                raise ConfigError("config must be a JSON object")
        cfg.update(_parse_set(args.set))
        if args.command:
            cfg["command"] = args.command
        bundle = run(cfg, args.seed, args.timing)
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"wittkit: configuration error: {exc}", file=sys.stderr)
        return 2
    text = json.dumps(bundle, indent=2, sort_keys=True, default=str) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.verbosity >= 1:
        n_ok = sum(a["ok"] for a in bundle["assertions"])
        print(f"{bundle['command']}: {n_ok}/{len(bundle['assertions'])} assertions passed", file=sys.stderr)
        for a in bundle["assertions"]:
            if not a["ok"]:
                print(f"  FAILED: {a['name']}", file=sys.stderr)
    return 0 if bundle["ok"] else 1


if __name__ == "__main__":
    sys.exit(main())
