"""Batch experiment driver.

Subcommands expose each module: group-check (group law and margin
properties), lemma-check (skew inverse-norm sweep), geometry (rank and
curvature certification), counterexample (delta ladders, slope fits, and
the divergence diagnostic), region (exact rational regions as CSV/SVG).

Configuration is a flat key=value text file; --set key=value overrides
individual entries.  Exit codes: 0 success, 1 assertion failure, 2
usage or configuration error.
"""

import argparse
import sys
from fractions import Fraction

import numpy as np

from . import families, groups, phase, regions
from .groups import DomainError


class ConfigError(ValueError):
    pass


def load_config(path):
    """Flat key=value file; blank lines and # comments ignored."""
    cfg = {}
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"malformed config line: {line!r}")
            key, _, value = line.partition("=")
            cfg[key.strip()] = value.strip()
    return cfg


def apply_overrides(cfg, pairs):
    for item in pairs or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, _, value = item.partition("=")
        cfg[key.strip()] = value.strip()
    return cfg


def parse_rational(text):
    """'inf', 'a/b', integer, or decimal string to a number."""
    text = str(text).strip()
    if text in ("inf", "infinity", "oo"):
        return float("inf")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot parse rational {text!r}") from exc


def parse_deltas(text):
    """Comma list; entries are decimals or '2^-k' powers."""
    out = []
    for item in str(text).split(","):
        item = item.strip()
        if not item:
            continue
        try:
            if "^" in item:
                base, _, expo = item.partition("^")
                out.append(float(base) ** float(expo))
            else:
                out.append(float(item))
        except ValueError as exc:
            raise ConfigError(f"cannot parse delta {item!r}") from exc
    if not out:
        raise ConfigError("empty delta ladder")
    return out


def build_structure(cfg):
    kind = cfg.get("kind", "heisenberg")
    n = int(cfg.get("n", 2))
    if kind == "heisenberg":
        s = groups.standard_heisenberg(n)
    elif kind == "normalized":
        s = groups.normalized_heisenberg(n)
    elif kind == "quaternionic":
        blocks = int(cfg.get("blocks", 1))
        m = int(cfg.get("m", 3))
        s = groups.quaternionic_htype(blocks, m)
    else:
        raise ConfigError(f"unknown structure kind {kind!r}")
    tilt = cfg.get("tilt")
    if tilt:
        row = np.array([float(v) for v in str(tilt).split(",")])
        if row.shape != (2 * s.n,) or s.m != 1:
            raise ConfigError("tilt expects 2n comma-separated values "
                              "on a one-dimensional center")
        s = groups.MetivierStructure(n=s.n, m=1, J=s.J, Lambda=row[None, :])
    return s


def _emit(data, out_path):
    if isinstance(data, str):
        data = data.encode()
    if out_path:
        with open(out_path, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.write(data.decode())


# --- subcommands ---------------------------------------------------------

def cmd_group_check(cfg, seed, out_path, fmt):
    s = build_structure(cfg)
    samples = int(cfg.get("samples", 1000))
    tol = float(cfg.get("tolerance", 1e-12))
    rng = np.random.default_rng(seed)
    worst = {"associativity": 0.0, "identity": 0.0, "inverse": 0.0,
             "dilation": 0.0}

    def rand_point():
        return groups.GroupPoint(rng.uniform(-2, 2, 2 * s.n),
                                 rng.uniform(-2, 2, s.m))

    e = groups.identity_point(s)
    for _ in range(samples):
        x, y, z = rand_point(), rand_point(), rand_point()
        lhs = groups.group_multiply(s, groups.group_multiply(s, x, y), z)
        rhs = groups.group_multiply(s, x, groups.group_multiply(s, y, z))
        worst["associativity"] = max(
            worst["associativity"],
            float(np.max(np.abs(lhs.as_array() - rhs.as_array()))))
        xe = groups.group_multiply(s, x, e)
        worst["identity"] = max(
            worst["identity"],
            float(np.max(np.abs(xe.as_array() - x.as_array()))))
        xi = groups.group_multiply(s, x, groups.group_inverse(s, x))
        worst["inverse"] = max(worst["inverse"],
                               float(np.max(np.abs(xi.as_array()))))
        t = float(rng.uniform(0.5, 2.0))
        da = groups.dilate(s, t, groups.group_multiply(s, x, y))
        db = groups.group_multiply(s, groups.dilate(s, t, x),
                                   groups.dilate(s, t, y))
        worst["dilation"] = max(
            worst["dilation"],
            float(np.max(np.abs(da.as_array() - db.as_array()))))

    margin = groups.smallness_margin(s)
    lines = ["# schema=1", "check,worst_error,tolerance,status"]
    failed = False
    for name, err in worst.items():
        ok = err <= tol
        failed = failed or not ok
        lines.append(f"{name},{err!r},{tol!r},{'pass' if ok else 'FAIL'}")
    lines.append(f"margin,{float(margin)!r},,"
                 + ("ok" if float(margin) > 0 else "warning-nonpositive"))
    if s.m == 3 and not failed:
        worst_h = 0.0
        for _ in range(100):
            th = rng.standard_normal(3)
            Jt = s.J_theta(th)
            dev = Jt @ Jt + float(th @ th) * np.eye(2 * s.n)
            worst_h = max(worst_h, float(np.max(np.abs(dev))))
        ok = worst_h <= tol
        failed = failed or not ok
        lines.append(f"htype,{worst_h!r},{tol!r},{'pass' if ok else 'FAIL'}")
    _emit("\n".join(lines) + "\n", out_path)
    return 1 if failed else 0


def cmd_lemma_check(cfg, seed, out_path, fmt):
    count = int(cfg.get("samples", 200))
    tol = float(cfg.get("tolerance", 1e-10))
    rng = np.random.default_rng(seed)
    lines = ["# schema=1", "size,rho,formula,bruteforce,rel_error,status"]
    failed = False
    for _ in range(count):
        size = int(rng.integers(2, 9))
        raw = rng.standard_normal((size, size))
        B = raw - raw.T
        rho = float(rng.uniform(-2.0, 2.0))
        if rho == 0.0:
            rho = 1.0
        got = float(groups.skew_inverse_norm(rho, B))
        brute = float(np.linalg.norm(
            np.linalg.inv(rho * np.eye(size) + B), 2))
        rel = float(abs(got - brute) / brute)
        ok = rel <= tol
        if size % 2 == 1:
            ok = ok and abs(got - 1.0 / abs(rho)) <= tol / abs(rho)
        failed = failed or not ok
        lines.append(f"{size},{rho!r},{got!r},{brute!r},{rel!r},"
                     + ("pass" if ok else "FAIL"))
    _emit("\n".join(lines) + "\n", out_path)
    return 1 if failed else 0


def cmd_geometry(cfg, seed, out_path, fmt):
    s = build_structure(cfg)
    pm = phase.PhaseModel(structure=s)
    points = int(cfg.get("points", 100))
    fold_points = int(cfg.get("fold_points", 50))
    margin = groups.smallness_margin(s)
    certified = float(margin) > 0
    rng = np.random.default_rng(seed)
    reports = []
    deviations = 0
    for _ in range(points):
        x, t, y = phase.sample_chart_point(pm, rng)
        rep = phase.certify_point(pm, x, t, y, with_curvature=False)
        reports.append(rep)
        if rep.rank_xi != pm.d:
            deviations += 1
    for _ in range(fold_points):
        x, t, y = phase.sample_chart_point(pm, rng, on_fold=True,
                                           match_xprime=True)
        rep = phase.certify_point(pm, x, t, y)
        reports.append(rep)
        if (rep.rank_xi != pm.d or rep.rank_spatial != pm.d - 1
                or rep.rank_curv != pm.d - 1):
            deviations += 1
    text = phase.geometry_csv(reports, float(margin))
    status = "certified" if certified else "uncertified"
    text += f"# status={status} deviations={deviations}\n"
    _emit(text, out_path)
    if deviations and certified:
        return 1
    return 0


def cmd_counterexample(cfg, seed, out_path, fmt):
    family = cfg.get("family", "ball")
    tol = float(cfg.get("tolerance", 0.15))
    if family == "stein":
        alpha = float(cfg.get("alpha", 0.9))
        j_lo = int(cfg.get("j_lo", 10))
        j_hi = int(cfg.get("j_hi", 30))
        curve = families.stein_probe_curve(alpha, j_hi, j_lo=j_lo)
        expo = families.stein_growth_exponent(curve)
        mono = bool(np.all(np.diff(curve[:, 1]) > 0))
        lines = ["# schema=1", f"# alpha={alpha!r}", "j,value"]
        for j, v in curve:
            lines.append(f"{int(j)},{float(v)!r}")
        lines.append(f"# growth_exponent={expo!r} expected={1.0 - alpha!r}")
        verdict = mono and abs(expo - (1.0 - alpha)) <= 0.2
        lines.append(f"# verdict={'pass' if verdict else 'FAIL'}")
        _emit("\n".join(lines) + "\n", out_path)
        return 0 if verdict else 1

    s = build_structure(cfg)
    p = parse_rational(cfg.get("p", "2"))
    q = parse_rational(cfg.get("q", "2"))
    deltas = parse_deltas(cfg.get("deltas", "2^-3,2^-4,2^-5,2^-6,2^-7"))
    if family == "ball":
        make = lambda d: families.ball_example(s, d)
    elif family == "scaling":
        t_fixed = float(cfg.get("t", 1.5))
        make = lambda d: families.scaling_example(s, d, t_fixed)
    elif family == "knapp":
        make = lambda d: families.knapp_example(s, d)
    elif family == "moment":
        make = lambda d: families.moment_example(d)
        s = families.moment_structure()
    else:
        raise ConfigError(f"unknown family {family!r}")
    predicted = families.predicted_exponent(family, s.n, s.m, p, q)
    rows = families.run_ladder(make, deltas, p, q)
    fit = families.fit_exponent(rows)
    text = families.experiment_csv(family, s.n, s.m, p, q, rows, predicted)
    verdict = abs(fit.slope - float(predicted)) <= tol
    text += (f"# slope={fit.slope!r} intercept={fit.intercept!r} "
             f"r_squared={fit.r_squared!r}\n")
    text += f"# predicted={predicted} tolerance={tol!r}\n"
    text += f"# verdict={'pass' if verdict else 'FAIL'}\n"
    _emit(text, out_path)
    return 0 if verdict else 1


def cmd_region(cfg, seed, out_path, fmt):
    which = cfg.get("region", "maximal")
    n = int(cfg.get("n", 2))
    m = int(cfg.get("m", 1))
    if which == "maximal":
        reg = regions.maximal_region(n, m)
    elif which == "averaging":
        reg = regions.averaging_region(n, m)
    else:
        raise ConfigError(f"unknown region {which!r}")
    _emit(regions.export_region(reg, fmt or "csv"), out_path)
    return 0


COMMANDS = {
    "group-check": cmd_group_check,
    "lemma-check": cmd_lemma_check,
    "geometry": cmd_geometry,
    "counterexample": cmd_counterexample,
    "region": cmd_region,
}


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="heislab",
        description="Experiments with spherical averages on two-step groups")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", default=None, help="key=value file")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default=None, help="output path")
    parser.add_argument("--format", choices=["csv", "svg"], default=None)
    parser.add_argument("--set", action="append", default=[],
                        metavar="KEY=VALUE", dest="overrides")
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else {}
        cfg = apply_overrides(cfg, args.overrides)
        return COMMANDS[args.command](cfg, args.seed, args.out, args.format)
    except (ConfigError, DomainError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
