"""Experiment runner: configs, seeded instances, sweeps, CSV/JSON records, CLI."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields, replace
from typing import Callable

import numpy as np

from . import bounds as bd
from .counting import (CosetCollision, RootMissing, count_family, count_points, composed_energy,
                       polynomial_energy)
from .ffield import Coset, FieldCtx, divisors, is_prime, subgroup_of_order
from .polyalg import BiPoly, parse_poly, uni_from_bipoly_x
from .stepanov import construct_certificate

COLUMNS = ("p", "t", "g1", "g2", "poly", "m", "n", "h", "q", "method", "count", "bound_th1", "bound_thsr",
           "bound_energy", "bound_hk", "bound_cz", "applicable", "passed", "cert_bound", "seed", "wall_ms")
_STR_COLUMNS = {"poly", "method", "applicable", "passed", "cert_bound"}

# spawn keys, one stream family per sweep kind
_STREAMS = {"oracle": 1, "th1": 2, "family": 6}


class ConfigError(ValueError):
    def __init__(self, key: str, msg: str):
        super().__init__(f"config key {key!r}: {msg}")
        self.key = key


@dataclass(frozen=True)
class ExperimentRecord:
    p: int
    t: int
    g1: int | None = None
    g2: int | None = None
    poly: str = ""
    m: int | None = None
    n: int | None = None
    h: int | None = None
    q: int | None = None
    method: str = ""
    count: int | None = None
    bound_th1: int | None = None
    bound_thsr: int | None = None
    bound_energy: int | None = None
    bound_hk: int | None = None
    bound_cz: int | None = None
    applicable: str = ""
    passed: str = ""
    cert_bound: str = ""
    seed: int | None = None
    wall_ms: int | None = None

    def row(self) -> list[str]:
        return ["" if v is None else str(v) for v in (getattr(self, c) for c in COLUMNS)]

    @classmethod
    def from_row(cls, row: dict[str, str]) -> "ExperimentRecord":
        vals = {}
        for c in COLUMNS:
            v = row.get(c, "")
            vals[c] = v if c in _STR_COLUMNS else (int(v) if v != "" else None)
        return cls(**vals)

    @property
    def violated(self) -> bool:
        return self.passed == "false"


def _judge(count: int | None, reports: dict[str, bd.BoundReport | None]) -> tuple[str, str]:
    """(applicable names, passed flag) for the reports whose hypotheses hold."""
    live = {k: r for k, r in reports.items() if r is not None and r.applicable}
    if count is None or not live:
        return ";".join(live), ""
    return ";".join(live), "true" if all(r.admits(count) for r in live.values()) else "false"


def _floor(r: bd.BoundReport | None) -> int | None:
    return None if r is None else r.floor()


# ------------------------------------------------------------------ config

@dataclass
class RunConfig:
    p: int | None = None
    t: int | str | None = None
    poly: tuple[str, ...] = ()
    g1: int = 1
    g2: int = 1
    q: tuple[int, ...] = (2,)
    h: int | None = None
    gamma: int = 1
    ls: tuple[int, ...] = ()
    f: str | None = None
    g: str | None = None
    chi: int | None = None
    seed: int = 0
    method: str = "rootfind"
    certify: bool = False
    criterion: str = "oracle"
    instances: int | None = None
    workers: int = 1
    timing: bool = False
    out: str | None = None
    cert_out: str | None = None
    format: str = "csv"


def _as_int(key, v):
    if isinstance(v, bool):
        raise ConfigError(key, "expected an integer")
    try:
        return int(v)
    except (TypeError, ValueError):
        raise ConfigError(key, f"expected an integer, got {v!r}") from None


def _as_int_tuple(key, v):
    if isinstance(v, str):
        v = [s for s in v.replace(",", " ").split() if s]
    elif not isinstance(v, (list, tuple)):
        v = [v]
    return tuple(_as_int(key, x) for x in v)


def _coerce(key: str, v):
    if key in ("p", "g1", "g2", "h", "gamma", "chi", "seed", "instances", "workers"):
        return None if v is None else _as_int(key, v)
    if key == "t":
        return v if v == "all" else _as_int(key, v)
    if key in ("q", "ls"):
        return _as_int_tuple(key, v)
    if key == "poly":
        return (v,) if isinstance(v, str) else tuple(str(s) for s in v)
    if key in ("certify", "timing"):
        if not isinstance(v, bool):
            raise ConfigError(key, "expected true or false")
        return v
    if key == "method" and v not in ("naive", "rootfind", "both"):
        raise ConfigError(key, "expected naive, rootfind or both")
    if key == "format" and v not in ("csv", "structured"):
        raise ConfigError(key, "expected csv or structured")
    if key == "criterion" and v not in _STREAMS:
        raise ConfigError(key, f"expected one of {sorted(_STREAMS)}")
    return v


def make_config(values: dict) -> RunConfig:
    known = {f.name for f in fields(RunConfig)}
    cfg = RunConfig()
    for key, v in values.items():
        if key not in known:
            raise ConfigError(key, "unknown key")
        setattr(cfg, key, _coerce(key, v))
    return cfg


def load_config(path: str) -> dict:
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "expected a flat JSON object")
    for k, v in doc.items():
        if isinstance(v, dict):
            raise ConfigError(k, "nested values are not allowed")
    return doc


def _need(cfg: RunConfig, *keys: str) -> None:
    for k in keys:
        v = getattr(cfg, k)
        if v is None or v == ():
            raise ConfigError(k, "required")


def _field(cfg: RunConfig) -> FieldCtx:
    _need(cfg, "p")
    try:
        return FieldCtx(cfg.p)
    except ValueError as e:
        raise ConfigError("p", str(e)) from None


def _orders(cfg: RunConfig, ctx: FieldCtx) -> list[int]:
    _need(cfg, "t")
    if cfg.t == "all":
        return divisors(ctx.p - 1)
    if (ctx.p - 1) % cfg.t:
        raise ConfigError("t", f"{cfg.t} does not divide p-1")
    return [cfg.t]


def _polys(cfg: RunConfig, ctx: FieldCtx) -> list[BiPoly]:
    _need(cfg, "poly")
    try:
        return [parse_poly(s, ctx) for s in cfg.poly]
    except (ValueError, SyntaxError) as e:
        raise ConfigError("poly", str(e)) from None


# ------------------------------------------------------------ record makers

def _ms(t0: float, timing: bool) -> int | None:
    return int((time.perf_counter() - t0) * 1000) if timing else None


def _is_linear_case(P: BiPoly, c1: Coset, c2: Coset) -> bool:
    # x - y + mu up to a scalar, on G x G
    if P.bidegree != (1, 1) or P.coeff(1, 1) or not P.coeff(0, 0):
        return False
    return (P.coeff(1, 0) + P.coeff(0, 1)) % P.p == 0 and c1.rep in c1.sub and c2.rep in c2.sub


def count_record(P: BiPoly, c1: Coset, c2: Coset, method: str, seed: int, chi: int | None = None,
                 certify: bool = False, timing: bool = False, certs: list | None = None) -> ExperimentRecord:
    """One solution count on c1 x c2 with every relevant bound attached."""
    t0 = time.perf_counter()
    p, t = P.p, c1.sub.t
    m, n = P.bidegree
    count = count_points(P, c1, c2, method, seed)
    th1 = None
    if m >= 1 and n >= 1:
        base = bd.bound_th1(m, n, t, p)
        pre = [name for name, ok in (("P(0,0) != 0", P.coeff(0, 0) != 0),
                                     ("deg P(x,0) >= 1", P.at_y(0).degree >= 1)) if not ok]
        th1 = replace(base, applicable=base.applicable and not pre, violated=base.violated + tuple(pre))
    hk, cz = bd.bound_comparators(max(m, 1), max(n, 1), t, p, chi, _is_linear_case(P, c1, c2))
    applicable, passed = _judge(count, {"th1": th1, "hk": hk, "cz": cz})
    cert = ""
    if certify:
        try:
            built = construct_certificate(P, c1, c2, seed=seed)
            cert = str(built.bound)
            if certs is not None:
                certs.append(built)
        except Exception as e:  # failure rows keep the sweep going
            cert = f"{type(e).__name__}: {e}"
    return ExperimentRecord(p, t, c1.rep, c2.rep, str(P), m, n, None, None, method, count, _floor(th1), None,
                            None, _floor(hk), _floor(cz), applicable, passed, cert, seed, _ms(t0, timing))


def _methods(method: str) -> tuple[str, ...]:
    return ("naive", "rootfind") if method == "both" else (method,)


def run_count(cfg: RunConfig, certs: list | None = None) -> list[ExperimentRecord]:
    ctx = _field(cfg)
    polys = _polys(cfg, ctx)
    out = []
    for t in _orders(cfg, ctx):
        G = subgroup_of_order(ctx, t)
        c1, c2 = Coset(cfg.g1, G), Coset(cfg.g2, G)
        for P in polys:
            for meth in _methods(cfg.method):
                out.append(count_record(P, c1, c2, meth, cfg.seed, cfg.chi, cfg.certify, cfg.timing, certs))
    return out


def energy_records(P: BiPoly, G, qs, seed: int, timing: bool = False) -> list[ExperimentRecord]:
    p, t = P.p, G.t
    m, n = P.bidegree
    hom = P.is_homogeneous() and P.at_y(0).degree >= 1
    deg = max(P.total_degree, 1)
    out = []
    for q in qs:
        t0 = time.perf_counter()
        e = polynomial_energy(P, G, q)
        rep = None
        if q >= 2:
            rep = bd.bound_energy(deg, q, t, p)
            if not hom:
                rep = replace(rep, applicable=False, violated=rep.violated + ("P homogeneous, deg P(x,0) >= 1",))
        applicable, passed = _judge(e, {rep.name if rep else "energy": rep})
        out.append(ExperimentRecord(p, t, 1, 1, str(P), m, n, None, q, "fiber", e, None, None, _floor(rep), None,
                                    None, applicable, passed, "", seed, _ms(t0, timing)))
    return out


def run_energy(cfg: RunConfig) -> list[ExperimentRecord]:
    ctx = _field(cfg)
    out = []
    if cfg.f is not None or cfg.g is not None:
        _need(cfg, "f", "g")
        try:
            f = uni_from_bipoly_x(parse_poly(cfg.f, ctx))
            g = uni_from_bipoly_x(parse_poly(cfg.g, ctx))
        except (ValueError, SyntaxError) as e:
            raise ConfigError("f", str(e)) from None
        for t in _orders(cfg, ctx):
            G = subgroup_of_order(ctx, t)
            t0 = time.perf_counter()
            e = composed_energy(f, g, G)
            _, rep = bd.bound_corollaries(f.degree, g.degree, t, ctx.p)
            applicable, passed = _judge(e, {rep.name: rep})
            text = f"f={parse_poly(cfg.f, ctx)}; g={parse_poly(cfg.g, ctx)}"
            out.append(ExperimentRecord(ctx.p, t, 1, 1, text, f.degree, g.degree, None, 2, "composed", e, None, None,
                                        rep.floor(), None, None, applicable, passed, "", cfg.seed,
                                        _ms(t0, cfg.timing)))
        return out
    polys = _polys(cfg, ctx)
    for t in _orders(cfg, ctx):
        G = subgroup_of_order(ctx, t)
        for P in polys:
            out.extend(energy_records(P, G, cfg.q, cfg.seed, cfg.timing))
    return out


def random_family_ls(P: BiPoly, gamma: int, h: int, sub, rng: np.random.Generator) -> tuple[int, ...]:
    """h values gamma * mu**n lying in pairwise distinct cosets of sub."""
    p, n = sub.p, P.total_degree
    ls: list[int] = []
    for _ in range(100 * h + 100):
        if len(ls) == h:
            break
        mu = int(rng.integers(1, p))
        l = gamma * pow(mu, n, p) % p
        if all(l * pow(o, -1, p) % p not in sub for o in ls):
            ls.append(l)
    if len(ls) < h:
        raise ConfigError("h", f"could not place {h} values in distinct cosets")
    return tuple(ls)


def family_record(P: BiPoly, gamma: int, ls, sub, method: str, seed: int,
                  timing: bool = False) -> ExperimentRecord:
    t0 = time.perf_counter()
    p, t = sub.p, sub.t
    m, n = P.bidegree
    h = len(ls)
    fc = count_family(P, gamma, ls, sub, method, seed)
    deg = P.total_degree
    rep = bd.bound_thsr(deg, h, t, p)
    # hypotheses are read for the curves P - l_i: (P - l)(0,0) = -l != 0 always
    if P.at_y(0).degree < 1:
        rep = replace(rep, applicable=False, violated=rep.violated + ("deg P(x,0) >= 1",))
    applicable, passed = _judge(fc.total, {"thsr": rep})
    return ExperimentRecord(p, t, 1, 1, str(P), m, n, h, None, method, fc.total, None, rep.floor(), None, None,
                            None, applicable, passed, "", seed, _ms(t0, timing))


def run_family(cfg: RunConfig) -> list[ExperimentRecord]:
    ctx = _field(cfg)
    (P,) = _polys(cfg, ctx)[:1]
    out = []
    for t in _orders(cfg, ctx):
        sub = subgroup_of_order(ctx, t)
        if cfg.ls:
            ls = cfg.ls
        else:
            _need(cfg, "h")
            rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(_STREAMS["family"], t)))
            ls = random_family_ls(P, cfg.gamma, cfg.h, sub, rng)
        for meth in _methods(cfg.method):
            out.append(family_record(P, cfg.gamma, ls, sub, meth, cfg.seed, cfg.timing))
    return out


def run_certify(cfg: RunConfig, certs: list | None = None) -> list[ExperimentRecord]:
    cfg = replace(cfg, certify=True, method="rootfind" if cfg.method == "both" else cfg.method)
    return run_count(cfg, certs)


# ------------------------------------------------------------------ sweeps

def _rng(kind: str, seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(_STREAMS[kind], index)))


def _random_prime(rng, lo: int, hi: int) -> int:
    while True:
        p = int(rng.integers(lo, hi))
        if is_prime(p) and p > 2:
            return p


def _random_poly(ctx: FieldCtx, rng, max_m: int, max_n: int) -> BiPoly:
    while True:
        m, n = int(rng.integers(1, max_m + 1)), int(rng.integers(1, max_n + 1))
        c = rng.integers(0, ctx.p, size=(m + 1, n + 1))
        P = BiPoly(ctx, c)
        if P.deg_x >= 1 and P.deg_y >= 1:
            return P


def oracle_instance(seed: int, i: int) -> list[ExperimentRecord]:
    """Random p <= 1e5, t <= 200, bidegree <= (3, 3); counted both ways."""
    rng = _rng("oracle", seed, i)
    while True:
        p = _random_prime(rng, 3, 10**5)
        ts = [d for d in divisors(p - 1) if d <= 200]
        if ts:
            break
    ctx = FieldCtx(p)
    t = int(rng.choice(ts))
    G = subgroup_of_order(ctx, t)
    g1, g2 = (int(v) for v in rng.integers(1, p, size=2))
    P = _random_poly(ctx, rng, 3, 3)
    c1, c2 = Coset(g1, G), Coset(g2, G)
    # pin one coset point onto the curve so counts are rarely zero
    x0, y0 = g1 * G.elements[int(rng.integers(t))] % p, g2 * G.elements[int(rng.integers(t))] % p
    P = P - P(x0, y0)
    return [count_record(P, c1, c2, meth, seed) for meth in ("naive", "rootfind")]


def th1_instance(seed: int, i: int) -> list[ExperimentRecord]:
    """P = x - y + mu on G x G with p in [1e5, 1e6], 100 < t and 81 t^4 < p^3."""
    rng = _rng("th1", seed, i)
    while True:
        p = _random_prime(rng, 10**5, 10**6)
        ts = [d for d in divisors(p - 1) if d > 100 and 81 * d**4 < p**3]
        if ts:
            break
    ctx = FieldCtx(p)
    t = int(rng.choice(ts))
    G = subgroup_of_order(ctx, t)
    mu = int(rng.integers(1, p))
    P = parse_poly(f"x - y + {mu}", ctx)
    return [count_record(P, Coset(1, G), Coset(1, G), "rootfind", seed)]


def family_instance(seed: int, i: int) -> list[ExperimentRecord]:
    """Homogeneous quadratic, h <= 4 values in distinct cosets, hypotheses of the family bound met."""
    rng = _rng("family", seed, i)
    h = int(rng.integers(1, 5))
    while True:
        p = _random_prime(rng, 10**4, 3 * 10**4)
        ts = [d for d in divisors(p - 1)
              if (81 * h) ** 3 < d**4 and d * d > 64 * h**3 and (3 * h) ** 3 * d**4 < p**3]
        if ts:
            break
    ctx = FieldCtx(p)
    t = int(rng.choice(ts))
    sub = subgroup_of_order(ctx, t)
    while True:
        a, b, c = (int(v) for v in rng.integers(0, p, size=3))
        if a and (b * b - 4 * a * c) % p:
            break
    P = BiPoly.from_terms(ctx, {(2, 0): a, (1, 1): b, (0, 2): c})
    gamma = int(rng.integers(1, p))
    ls = random_family_ls(P, gamma, h, sub, rng)
    return [family_record(P, gamma, ls, sub, "rootfind", seed)]


SWEEPS: dict[str, tuple[Callable[[int, int], list[ExperimentRecord]], int]] = {
    "oracle": (oracle_instance, 200),
    "th1": (th1_instance, 50),
    "family": (family_instance, 20),
}


def _sweep_chunk(args) -> list[tuple[int, list[ExperimentRecord]]]:
    kind, seed, idx = args
    fn = SWEEPS[kind][0]
    return [(i, fn(seed, i)) for i in idx]


def run_sweep(kind: str, seed: int = 0, instances: int | None = None, workers: int = 1) -> list[ExperimentRecord]:
    """Records for instances 0..N-1, ordered by instance index whatever the worker count."""
    if kind not in SWEEPS:
        raise ConfigError("criterion", f"expected one of {sorted(SWEEPS)}")
    n = SWEEPS[kind][1] if instances is None else instances
    if workers <= 1:
        parts = _sweep_chunk((kind, seed, range(n)))
    else:
        jobs = [(kind, seed, list(range(w, n, workers))) for w in range(workers)]
        with ProcessPoolExecutor(workers) as ex:
            parts = [item for chunk in ex.map(_sweep_chunk, jobs) for item in chunk]
    parts.sort(key=lambda item: item[0])
    return [rec for _, recs in parts for rec in recs]


# ----------------------------------------------------------------- emitters

def to_csv(records: list[ExperimentRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def from_csv(text: str) -> list[ExperimentRecord]:
    return [ExperimentRecord.from_row(row) for row in csv.DictReader(io.StringIO(text))]


def to_structured(records: list[ExperimentRecord]) -> str:
    return json.dumps({"columns": list(COLUMNS), "records": [asdict(r) for r in records]}, indent=1) + "\n"


def from_structured(text: str) -> list[ExperimentRecord]:
    return [ExperimentRecord(**r) for r in json.loads(text)["records"]]


# ---------------------------------------------------------------------- CLI

def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat JSON file; flags override its values")
    common.add_argument("--p", type=int)
    common.add_argument("--t", help="subgroup order, or 'all' for every divisor of p-1")
    common.add_argument("--poly", action="append", help="polynomial text (repeatable)")
    common.add_argument("--g1", type=int)
    common.add_argument("--g2", type=int)
    common.add_argument("--q", help="comma-separated energy exponents")
    common.add_argument("--h", type=int)
    common.add_argument("--gamma", type=int)
    common.add_argument("--ls", help="comma-separated right-hand sides")
    common.add_argument("--f")
    common.add_argument("--g")
    common.add_argument("--chi", type=int, help="Euler characteristic for the comparator bound")
    common.add_argument("--seed", type=int)
    common.add_argument("--method", choices=("naive", "rootfind", "both"))
    common.add_argument("--certify", action="store_true", default=None)
    common.add_argument("--timing", action="store_true", default=None, help="fill wall_ms (breaks byte-determinism)")
    common.add_argument("--out")
    common.add_argument("--format", choices=("csv", "structured"))
    ap = argparse.ArgumentParser(prog="cosetbounds", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("count", "energy", "family"):
        sub.add_parser(name, parents=[common])
    cp = sub.add_parser("certify", parents=[common])
    cp.add_argument("--cert-out", dest="cert_out", help="write the first certificate as JSON")
    sw = sub.add_parser("sweep", parents=[common])
    sw.add_argument("--criterion", choices=sorted(SWEEPS))
    sw.add_argument("--instances", type=int)
    sw.add_argument("--workers", type=int)
    ver = sub.add_parser("verify")
    ver.add_argument("certificate", help="certificate JSON written by certify --out")
    return ap


def _verify(path: str) -> int:
    from .counting import count_solutions
    from .stepanov import certificate_from_text, verify_certificate

    with open(path) as fh:
        cert, P, c1s, c2s = certificate_from_text(fh.read())
    pts = []
    for a, b in zip(c1s, c2s):
        pts.extend(count_solutions(P, a, b).points)
    ok = verify_certificate(cert, P, c1s, c2s, sorted(set(pts))) and cert.bound >= len(set(pts))
    print(f"certificate {'valid' if ok else 'INVALID'}: bound {cert.bound}, exact count {len(set(pts))}")
    return 0 if ok else 1


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "verify":
        return _verify(args.certificate)
    values = load_config(args.config) if args.config else {}
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config") and v is not None}
    values.update(flags)
    try:
        cfg = make_config(values)
        certs: list = []
        if args.command == "sweep":
            records = run_sweep(cfg.criterion, cfg.seed, cfg.instances, cfg.workers)
        elif args.command == "certify":
            records = run_certify(cfg, certs)
        else:
            records = {"count": run_count, "energy": run_energy, "family": run_family}[args.command](cfg)
    except (ConfigError, CosetCollision, RootMissing) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    if cfg.cert_out and certs:
        with open(cfg.cert_out, "w") as fh:
            fh.write(certs[0].to_json())
    text = to_csv(records) if cfg.format == "csv" else to_structured(records)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    bad = [r for r in records if r.violated]
    for r in bad:
        print(f"bound violated: p={r.p} t={r.t} poly={r.poly} count={r.count}", file=sys.stderr)
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
