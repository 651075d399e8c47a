"""``projconst`` command line: config parsing, dispatch and exit codes.

Exit codes: 0 when every verdict holds, 1 when a verdict is false or a
certificate fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import bounds, minproj, params, verify
from .errors import CertificateFailure, ParseError, ProjConstError, RankDeficient
from .numerics import log10_ratio, rational
from .optimize import SearchConfig
from .report import Report, render_text
from .space import FunctionalFamily, Hyperplane
from .verify.corollary import alpha_certified_distance

COMMANDS = ("space", "params", "ledger", "classify", "minproj", "verify", "corollary")
LEMMAS = ("funkcjonaly", "objetosc", "modul", "modul2", "markov", "vandermonde", "zawezenie")


@dataclass
class SpaceConfig:
    n: int
    m: int
    p: int
    functionals: list[list[Fraction]]
    hyperplane: list[Fraction] | None = None
    witnesses: dict = field(default_factory=dict)
    alpha: Fraction | None = None
    beta: Fraction | None = None
    search: SearchConfig = field(default_factory=SearchConfig)

    def family(self) -> FunctionalFamily:
        return FunctionalFamily.from_rows(self.functionals, self.p)


# -- parsing ----------------------------------------------------------------


def _int(obj, key: str, pointer: str, minimum: int | None = None) -> int:
    if key not in obj:
        raise ParseError(f"{pointer}/{key}", "missing")
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError(f"{pointer}/{key}", f"expected an integer, got {json.dumps(_plain(v))}")
    if minimum is not None and v < minimum:
        raise ParseError(f"{pointer}/{key}", f"must be >= {minimum}")
    return v


def _plain(v):
    return str(v) if isinstance(v, Fraction) else v


def _number(v, pointer: str) -> Fraction:
    if isinstance(v, bool) or not isinstance(v, (int, Fraction, str)):
        raise ParseError(pointer, f"expected a number or an \"a/b\" string, got {json.dumps(_plain(v))}")
    try:
        return rational.to_fraction(v)
    except (ValueError, ZeroDivisionError):
        raise ParseError(pointer, f"cannot read {v!r} as a rational") from None


def _vector(v, pointer: str, n: int) -> list[Fraction]:
    if not isinstance(v, list):
        raise ParseError(pointer, "expected a list")
    if len(v) != n:
        raise ParseError(pointer, f"expected {n} entries, got {len(v)}")
    return [_number(x, f"{pointer}/{i}") for i, x in enumerate(v)]


def parse_config(text: str) -> SpaceConfig:
    """Validate a JSON space definition; decimals are read exactly as rationals."""
    try:
        obj = json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise ParseError("", f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise ParseError("", "top level must be an object")
    n = _int(obj, "n", "", 1)
    m = _int(obj, "m", "", 1)
    p = _int(obj, "p", "", 1)
    rows = obj.get("functionals")
    if not isinstance(rows, list):
        raise ParseError("/functionals", "expected a list of rows")
    if len(rows) != m:
        raise ParseError("/functionals", f"expected m = {m} rows, got {len(rows)}")
    functionals = [_vector(r, f"/functionals/{i}", n) for i, r in enumerate(rows)]
    for i, r in enumerate(functionals):
        if not any(r):
            raise ParseError(f"/functionals/{i}", "functional is zero")
    r = rational.rank(functionals)
    if r < n:
        raise RankDeficient(r, n)
    hyperplane = None
    if obj.get("hyperplane") is not None:
        hyperplane = _vector(obj["hyperplane"], "/hyperplane", n)
        if not any(hyperplane):
            raise ParseError("/hyperplane", "functional is zero")
    witnesses = {}
    raw = obj.get("witnesses", [])
    if not isinstance(raw, list):
        raise ParseError("/witnesses", "expected a list of {i, others, vector}")
    for k, w in enumerate(raw):
        ptr = f"/witnesses/{k}"
        if not isinstance(w, dict):
            raise ParseError(ptr, "expected an object")
        i = _int(w, "i", ptr, 1)
        others = w.get("others")
        if not isinstance(others, list) or len(others) != 3 or not all(isinstance(x, int) and not isinstance(x, bool) for x in others):
            raise ParseError(f"{ptr}/others", "expected three indices")
        witnesses[(i, tuple(sorted(others)))] = _vector(w.get("vector"), f"{ptr}/vector", n)
    alpha = _number(obj["alpha"], "/alpha") if obj.get("alpha") is not None else None
    beta = _number(obj["beta"], "/beta") if obj.get("beta") is not None else None
    search = SearchConfig()
    s = obj.get("search", {})
    if not isinstance(s, dict):
        raise ParseError("/search", "expected an object")
    kwargs = {}
    for key in ("seed", "restarts", "max_iters"):
        if key in s:
            kwargs[key] = _int(s, key, "/search", 0 if key == "seed" else 1)
    if "tol" in s:
        tol = _number(s["tol"], "/search/tol")
        if tol <= 0:
            raise ParseError("/search/tol", "must be positive")
        kwargs["tol"] = float(tol)
    if kwargs:
        search = replace(search, **kwargs)
    return SpaceConfig(n, m, p, functionals, hyperplane, witnesses, alpha, beta, search)


# -- commands ---------------------------------------------------------------


def _corollary_config(n: int) -> SpaceConfig:
    return SpaceConfig(n, n + 2, (n + 3) // 2, verify.corollary_rows(n))


def _hypotheses(report: Report, cfg: SpaceConfig) -> None:
    report.verdict("n >= 4", cfg.n >= 4, cfg.n - 4)
    report.verdict("m >= n + 2", cfg.m >= cfg.n + 2, cfg.m - cfg.n - 2)
    report.verdict("p >= m/2", 2 * cfg.p >= cfg.m, (2 * cfg.p - cfg.m) / 2)


def cmd_space(cfg: SpaceConfig, args, report: Report) -> None:
    space = cfg.family()
    report.results.update({
        "n": space.n,
        "m": space.m,
        "p": space.p,
        "q": Fraction(2 * space.p, 2 * space.p - 1),
        "rank": rational.rank(cfg.functionals),
    })
    _hypotheses(report, cfg)


def _estimates(cfg: SpaceConfig, space: FunctionalFamily):
    a_num = params.alpha_estimate(space, config=cfg.search)
    a_wit = params.alpha_estimate(space, cfg.witnesses) if cfg.witnesses else None
    b_cert = params.beta_estimate(space, params.BetaMode.CERTIFICATE)
    return a_num, a_wit, b_cert


def _ledger_inputs(cfg: SpaceConfig, space: FunctionalFamily, report: Report):
    if cfg.alpha is not None and cfg.beta is not None:
        return cfg.alpha, cfg.beta
    a_num, a_wit, b_cert = _estimates(cfg, space)
    alpha = cfg.alpha if cfg.alpha is not None else (a_wit or a_num).value
    beta = cfg.beta if cfg.beta is not None else b_cert.value
    report.results["alpha_source"] = "config" if cfg.alpha is not None else (a_wit or a_num).mode
    report.results["beta_source"] = "config" if cfg.beta is not None else b_cert.mode
    return alpha, beta


def cmd_params(cfg: SpaceConfig, args, report: Report) -> None:
    space = cfg.family()
    a_num, a_wit, b_cert = _estimates(cfg, space)
    b_num = params.beta_estimate(space, params.BetaMode.NUMERIC)
    report.results["alpha_numeric"] = {"value": a_num.value, "raw": a_num.raw_value, "worst_tuple": a_num.worst_tuple}
    if a_wit is not None:
        report.results["alpha_witness"] = {"value": a_wit.value, "worst_tuple": a_wit.worst_tuple}
        report.verdict("alpha witness <= alpha numeric", a_wit.value <= a_num.value + 1e-7, a_num.value - a_wit.value)
    report.results["beta_certificate"] = {"value": b_cert.value, "exact": b_cert.exact_value, "worst_pair": b_cert.worst_pair, "cause": b_cert.cause}
    report.results["beta_numeric"] = {"value": b_num.value, "worst_pair": b_num.worst_pair, "cause": b_num.cause}
    report.verdict("alpha > 0", a_num.value > 0, a_num.value)
    if math.isfinite(b_cert.value):
        report.verdict("beta numeric <= beta certificate", b_num.value <= b_cert.value + 1e-7, b_cert.value - b_num.value)
    else:
        report.verdict("beta finite", False, b_cert.value, detail=str(b_cert.cause))


def _ledger_report(report: Report, ledger) -> None:
    report.results["ledger"] = {name: value for name, value in ledger.entries().items()}
    report.results["q"] = Fraction(2 * ledger.p, 2 * ledger.p - 1)
    for v in bounds.ledger_checks(ledger):
        report.verdict(v.name, v.holds, v.margin_log10, v.detail)


def cmd_ledger(cfg: SpaceConfig, args, report: Report) -> None:
    space = cfg.family()
    alpha, beta = _ledger_inputs(cfg, space, report)
    report.results["alpha"], report.results["beta"] = alpha, beta
    _ledger_report(report, bounds.compute_ledger(cfg.n, cfg.m, cfg.p, alpha, beta))


def _hyperplane(cfg: SpaceConfig, space: FunctionalFamily) -> Hyperplane:
    f = cfg.hyperplane if cfg.hyperplane is not None else cfg.functionals[0]
    return Hyperplane.normalized(space, [float(x) for x in f])


def cmd_classify(cfg: SpaceConfig, args, report: Report) -> None:
    space = cfg.family()
    alpha, beta = _ledger_inputs(cfg, space, report)
    ledger = bounds.compute_ledger(cfg.n, cfg.m, cfg.p, alpha, beta)
    h = _hyperplane(cfg, space)
    label = params.classify_hyperplane(space, h, ledger)
    report.results.update({
        "hyperplane": h.f,
        "tag": label.tag,
        "achieved_distance": label.achieved_distance,
        "k": label.k,
        "l": label.l,
        "a0": label.a0,
        "r0": label.r0,
        "K": ledger.K,
        "L": ledger.L,
    })
    excl = params.exclusivity_check(space, h, float(min(Fraction(alpha), Fraction(1, 2))), ledger.K, ledger.L, cfg.search)
    report.results["exclusivity_witness"] = excl.witness
    report.results["K*alpha > 4*L"] = excl.precondition_holds
    for c in excl.near_pair_checks + excl.alpha_half_checks:
        report.verdict(f"pair ({c.i}, {c.j}) >= {c.threshold:.3e}", not c.violated, c.min_residual)


def cmd_minproj(cfg: SpaceConfig, args, report: Report) -> None:
    space = cfg.family()
    h = _hyperplane(cfg, space)
    res = minproj.minimal_projection_search(space, h, cfg.search)
    report.results.update({
        "hyperplane": h.f,
        "w": res.projection.w,
        "norm_estimate": res.norm_estimate,
        "lower_model": res.lower_model,
        "crude_upper": res.crude_upper,
        "status": res.status,
        "rounds": len(res.trace),
    })
    report.verdict("norm >= 1", res.norm_estimate >= 1 - 1e-10, res.norm_estimate - 1)
    report.verdict("norm <= crude upper", res.norm_estimate <= res.crude_upper + 1e-9, res.crude_upper - res.norm_estimate)
    try:
        gap = minproj.smoothness_gap_check(space, res, 100)
        worst = max(gap.max_sampled, gap.max_searched)
        report.results["gap"] = {"epsilon": gap.epsilon, "t0": gap.t0, "max_f_y_w": worst, "w_norm": gap.w_norm, "samples": gap.samples}
        report.verdict("|f_y(w)| <= t0 (2 + eps)", worst <= gap.bound_lemma + 1e-7, gap.bound_lemma - worst)
        report.verdict("|f_y(w)| <= 8 sqrt(eps p)", worst <= gap.bound_eq + 1e-7, gap.bound_eq - worst)
    except ProjConstError as exc:
        report.verdict("smoothness gap", False, None, detail=str(exc))


def _lemma_space(cfg: SpaceConfig | None) -> FunctionalFamily:
    return cfg.family() if cfg is not None else verify.build_corollary_space(4)


def run_lemma(name: str, cfg: SpaceConfig | None, seed: int, report: Report, restarts: int | None = None) -> None:
    search = (cfg.search if cfg is not None else SearchConfig()).with_seed(seed)
    if restarts is not None:
        search = replace(search, restarts=restarts)
    if name == "funkcjonaly":
        space = _lemma_space(cfg)
        r = verify.maxmin_search(space, config=search)
        floor = verify.maxmin_floor(space.n, space.m)
        report.results[name] = {"value": r.value, "witness": r.point, "floor": floor}
        report.verdict("max-min >= 1/(sqrt(n)(n-1)m)", r.value >= floor, r.value - floor)
    elif name == "objetosc":
        rows = []
        for n in range(3, 7):
            for t in (0.05, 0.1, 0.2, 0.5):
                s = verify.cap_measure_mc(n, t, 1_000_000, seed)
                rows.append({"n": n, "t": t, "estimate": s.estimate, "std_error": s.std_error})
                report.verdict(f"cap n={n} t={t} <= t(n-1)", s.estimate <= t * (n - 1) + 3 * s.std_error, t * (n - 1) - s.estimate)
        report.results[name] = rows
    elif name == "modul":
        rows = []
        grid = (0.2, 0.5, 1.0, 1.5)
        for q in (1.2, 1.5, 2.0):
            for d in (2, 3, 4):
                for pr in verify.modulus_falsify(verify.LqSpec(q, d), grid, SearchConfig(seed, 64, 400)):
                    rows.append({"q": q, "d": d, "t": pr.t, "delta_upper": pr.delta_upper, "bound": pr.bound})
                    report.verdict(f"modulus q={q} d={d} t={pr.t}", not pr.violated, pr.delta_upper - pr.bound)
        report.results[name] = rows
    elif name == "modul2":
        rows = []
        if cfg is not None:
            specs = [("dual", verify.DualFamilySpec(cfg.family()))]
        else:
            rng = np.random.default_rng(seed)
            specs = [(f"quotient {k}", verify.quotient_spec(int(rng.integers(1, 4)), rng.standard_normal((int(rng.integers(1, 3)), 4)))) for k in range(20)]
        for label, spec in specs:
            for pr in verify.modulus_falsify(spec, (0.2, 0.5, 1.0, 1.5), SearchConfig(seed, 12, 50)):
                rows.append({"space": label, "t": pr.t, "delta_upper": pr.delta_upper, "bound": pr.bound})
                report.verdict(f"{label} t={pr.t}", not pr.violated, pr.delta_upper - pr.bound)
        report.results[name] = rows
    elif name == "markov":
        rows = []
        for d in range(1, 9):
            for k in range(1, min(4, d) + 1):
                r = verify.markov_chain_check(d, k, 1000, seed)
                rows.append({"degree": d, "k": k, "max_ratio": r.max_ratio})
                report.verdict(f"markov d={d} k={k}", r.holds, 1 - r.max_ratio)
        report.results[name] = rows
    elif name == "vandermonde":
        r = verify.vandermonde_check(200, range(2, 9), seed)
        report.results[name] = {"sets": r.sets, "max_ratio": r.max_ratio, "worst_nodes": r.worst_nodes}
        report.verdict("exact inverse norm <= Gautschi bound", r.holds, 1 - r.max_ratio)
    elif name == "zawezenie":
        r = verify.restriction_check(_lemma_space(cfg), 20, SearchConfig(seed, 1, 200, 1e-12))
        report.results[name] = {"pairs": r.pairs, "max_gap": r.max_gap}
        report.verdict("restricted norm >= min_r ||g - r h||* - 1e-7", r.holds, r.min_slack)
    else:
        raise ParseError("--lemma", f"unknown lemma {name!r}")


def cmd_verify(cfg: SpaceConfig | None, args, report: Report) -> None:
    names = [args.lemma] if args.lemma else list(LEMMAS)
    for name in names:
        run_lemma(name, cfg, args.seed if args.seed is not None else (cfg.search.seed if cfg else 0), report, args.restarts)


def cmd_corollary(cfg, args, report: Report) -> None:
    n = args.n
    if n is None:
        raise ParseError("--n", "corollary needs --n")
    cert = verify.corollary_exact_verify(n)
    n_, m, p, alpha, beta = bounds.corollary_inputs(n)
    ledger = bounds.compute_ledger(n_, m, p, alpha, beta)
    cb = bounds.corollary_bound(n)
    report.inputs.update({"n": n, "m": m, "p": p})
    report.results.update({
        "alpha_bound": cert.alpha_bound,
        "beta_bound": cert.beta_bound,
        "alpha_min_certified": alpha_certified_distance(cert),
        "beta_max_coefficient_sum": cert.beta_max_coefficient_sum,
        "alpha_cases": sum(1 for r in cert.witness_log if r["kind"] == "alpha"),
        "beta_identities": sum(1 for r in cert.witness_log if r["kind"] == "beta"),
        "eps0": ledger.eps0,
        "eps0_log10": ledger.eps0.log10,
        "corollary_bound": cb,
        "ledger": ledger.entries(),
    })
    # the certificate itself raised on any failure; record its margins
    report.verdict("alpha >= 1/(2n) (exact)", True, alpha_certified_distance(cert) - float(cert.alpha_bound))
    report.verdict("beta <= n^2 (exact)", True, float(cert.beta_bound - cert.beta_max_coefficient_sum))
    for v in bounds.ledger_checks(ledger):
        report.verdict(v.name, v.holds, v.margin_log10, v.detail)
    report.verdict("1 + eps0 > 1 + (2(n+3)^2)^(-100(n+3)^2)", ledger.eps0 > cb, log10_ratio(ledger.eps0, cb))


HANDLERS = {
    "space": cmd_space,
    "params": cmd_params,
    "ledger": cmd_ledger,
    "classify": cmd_classify,
    "minproj": cmd_minproj,
    "verify": cmd_verify,
    "corollary": cmd_corollary,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="projconst", description="Minimal-projection bounds on functional-family norms.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="JSON space definition")
    ap.add_argument("--json", action="store_true", help="print the JSON report on stdout")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--restarts", type=int)
    ap.add_argument("--n", type=int, help="dimension for the corollary command")
    ap.add_argument("--lemma", choices=LEMMAS)
    ap.add_argument("--timing", action="store_true", help="include wall time in the report")
    return ap


def run_suite(command: str, cfg: SpaceConfig | None, args) -> tuple[Report, int]:
    """Run one subcommand; returns the report and the exit code."""
    seed = args.seed if args.seed is not None else (cfg.search.seed if cfg else 0)
    if cfg is not None and (args.seed is not None or args.restarts is not None):
        cfg.search = replace(cfg.search, seed=seed, restarts=args.restarts or cfg.search.restarts)
    report = Report(command=command, seed=seed)
    if cfg is not None:
        report.inputs.update({"n": cfg.n, "m": cfg.m, "p": cfg.p, "functionals": cfg.functionals, "hyperplane": cfg.hyperplane})
    start = time.perf_counter()
    try:
        HANDLERS[command](cfg, args, report)
    except CertificateFailure as exc:
        report.verdict(exc.bullet, False, exc.residual, detail=str(exc))
    if args.timing:
        report.runtime = time.perf_counter() - start
    return report, (0 if report.ok else 1)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = None
        if args.config:
            with open(args.config, encoding="utf-8") as fh:
                cfg = parse_config(fh.read())
        elif args.command not in ("verify", "corollary"):
            raise ParseError("--config", f"{args.command} needs --config")
        report, code = run_suite(args.command, cfg, args)
    except (ProjConstError, OSError, UnicodeDecodeError) as exc:
        print(f"projconst: error: {exc}", file=sys.stderr)
        return 2
    if args.json:
        sys.stdout.write(report.to_json())
    else:
        sys.stdout.write(render_text(report))
    for v in report.verdicts:
        if not v["holds"]:
            print(f"projconst: verdict failed: {v['name']} {v['detail']}".rstrip(), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
