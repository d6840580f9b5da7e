"""Command-line interface: matrices, verifications, law reports, webs.

Exit codes: 0 all checks pass, 1 a verification failed, 2 operational
error (bad input, capacity, missing file). Outputs are deterministic for
a fixed config and cache state.
"""

from __future__ import annotations

import json
import math
import random
import sys
from pathlib import Path

import click

from . import laws as L
from . import sequences as seq
from . import w3system as w3
from . import web as webmod
from .cache import RayCache, default_cache_path
from .config import load_config
from .engine import PrimeIndexer, is_prime
from .errors import PrimewebError
from .filters import FAMILIES, make_filter
from .render import law_rows_to_csv, render_ray_law, render_web

DESK_BOUND = 10**9
DEEP_BOUND = 10**12


def _json_text(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True, default=str) + "\n"


def _emit(ctx, name: str, obj) -> Path:
    out_dir = Path(ctx.obj["cfg"].output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    if name.endswith(".json"):
        path.write_text(_json_text(obj))
    else:
        path.write_text(obj)
    return path


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--deep", is_flag=True, help="allow values above 1e9, up to 1e12")
@click.option("--output-dir", default=None)
@click.option("--cache-path", default=None)
@click.pass_context
def main(ctx, config_path, deep, output_dir, cache_path):
    cfg = load_config(config_path).with_overrides(
        output_dir=output_dir, cache_path=cache_path
    )
    ctx.obj = {
        "cfg": cfg,
        "deep": deep,
        "bound": DEEP_BOUND if deep else DESK_BOUND,
        "engine": PrimeIndexer(),
    }


def _cache(ctx) -> RayCache:
    p = ctx.obj["cfg"].cache_path
    return RayCache(p if p else default_cache_path())


def _fail(msg: str, code: int = 1):
    click.echo(f"FAIL: {msg}", err=True)
    sys.exit(code)


@main.command()
@click.argument("family", type=click.Choice(sorted(FAMILIES)))
@click.argument("rows", type=int)
@click.argument("cols", type=int)
@click.option("--value-bound", type=int, default=None)
@click.option("--fmt", type=click.Choice(["csv", "json"]), default="csv")
@click.option("--out", default=None)
@click.pass_context
def matrix(ctx, family, rows, cols, value_bound, fmt, out):
    """Emit the upper-left ROWS x COLS corner of a family matrix."""
    bound = value_bound if value_bound is not None else ctx.obj["bound"]
    try:
        flt = make_filter(family, ctx.obj["engine"])
        m = seq.build_matrix(flt, rows, cols, value_bound=bound)
    except PrimewebError as e:
        _fail(str(e), 2)
    truncated = any(len(r.values) < cols for r in m.rows)
    if fmt == "csv":
        text = m.to_csv()
        if truncated:
            text += f"# truncated at value bound {bound}\n"
    else:
        d = json.loads(m.to_json())
        d["truncated_at"] = bound if truncated else None
        text = _json_text(d)
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


# -- verifications ------------------------------------------------------------


def _verify_partition(ctx, family, bound):
    flt = make_filter(family, ctx.obj["engine"])
    rep = seq.verify_partition(flt, bound)
    return rep["exact"], {
        "family": family,
        "bound": bound,
        "members": rep["member_count"],
        "rays": rep["ray_count"],
        "problems": rep["problems"][:10],
    }


def _verify_eq6(ctx, family, bound, pairs, seed):
    # matrix values are served through the cache so a consistent-but-wrong
    # entry is caught by the identity itself, not by the checksum
    cache = _cache(ctx)
    engine = ctx.obj["engine"]
    flt = make_filter(family, engine)
    gens = flt.generators(12)
    rows = []
    for g in gens:
        vals = [cache.get_or_compute(family, g, d, engine) for d in range(1, 5)]
        rows.append(seq.Ray(family, g, vals))
    m = seq.MesmMatrix(family, rows)
    rng = random.Random(seed)
    addrs = [(g, d) for g in gens for d in range(1, 5)]
    bad = []
    for _ in range(pairs):
        a1, a2 = rng.sample(addrs, 2)
        r = seq.interval_count_identity(flt, m, a1, a2)
        if not (r["ok"] and r["below_first_ok"]):
            bad.append((a1, a2, r["between"], r["predicted"]))
    return not bad, {"pairs": pairs, "failures": bad[:10]}


def _verify_theorem2(ctx, family, bound):
    rep = seq.clusters(ctx.obj["engine"], bound)
    return rep["union_ok"], {
        "bound": bound,
        "covered": rep["covered_count"],
        "expected": rep["expected_count"],
    }


def _verify_theorem3(ctx, family, bound):
    engine = ctx.obj["engine"]
    twins = seq.classify_twins(engine, bound)
    bad = []
    for t in twins:
        i1, i2 = t.indices
        # independent read of the classification off index primality
        p1, p2 = is_prime(i1), is_prime(i2)
        want = (
            "special" if (p1 and p2)
            else "u" if (not p1 and not p2)
            else "b_right" if p1
            else "b_left"
        )
        if t.kind != want:
            bad.append((t.pair, t.kind, want))
        if t.pair != (3, 5) and t.kind == "special":
            bad.append((t.pair, "unexpected special"))
    return not bad, {"bound": bound, "twins": len(twins), "failures": bad[:10]}


def _verify_q1(ctx, family, bound):
    engine = ctx.obj["engine"]
    flt = make_filter("P", engine)
    m = seq.build_matrix(flt, 20, 5, value_bound=min(bound, DESK_BOUND))
    bad = []
    for r in m.rows:
        chain = [r.generator, *r.values]
        for prev, nxt in zip(chain, chain[1:]):
            if engine.prime_pi(nxt) != prev:
                bad.append((r.generator, prev, nxt))
    return not bad, {"rows": len(m.rows), "failures": bad[:10]}


_VERIFIERS = {
    "partition": _verify_partition,
    "theorem2": _verify_theorem2,
    "theorem3": _verify_theorem3,
    "q1": _verify_q1,
}


@main.command()
@click.argument(
    "what", type=click.Choice(["partition", "eq6", "theorem2", "theorem3", "q1"])
)
@click.argument("bound", type=int, default=10**6, required=False)
@click.option("--family", default="P", type=click.Choice(sorted(FAMILIES)))
@click.option("--pairs", type=int, default=1000)
@click.option("--seed", type=int, default=0)
@click.pass_context
def verify(ctx, what, bound, family, pairs, seed):
    """Run an exact identity check; exit 0 iff it passes."""
    try:
        if what == "eq6":
            ok, detail = _verify_eq6(ctx, family, bound, pairs, seed)
        else:
            ok, detail = _VERIFIERS[what](ctx, family, bound)
    except PrimewebError as e:
        _fail(str(e), 2)
    detail["check"] = what
    detail["ok"] = ok
    _emit(ctx, f"verify_{what}.json", detail)
    click.echo(f"{what}: {'pass' if ok else 'FAIL'}")
    if not ok:
        sys.exit(1)


# -- law reports ---------------------------------------------------------------


def _eq7_rows(engine, generator: int, depth: int) -> list[dict]:
    flt = make_filter("P", engine)
    ray = seq.extend_ray(flt, generator, depth)
    rows = []
    for n in range(1, len(ray.values)):
        integral, eps = L.ray_distribution_law(generator, ray.values, n)
        rows.append(
            {
                "depth": n,
                "value": ray.values[n - 1],
                "predicted": integral,
                "epsilon": eps,
            }
        )
    return rows


@main.command("laws")
@click.argument(
    "law", type=click.Choice(["eq7", "eq8", "eta", "zeta", "predict", "conj3"])
)
@click.option("--generator", "-g", type=int, default=9)
@click.option("--depth", type=int, default=6)
@click.option("--s", type=float, default=2.0)
@click.option("--m", type=int, default=12)
@click.option("--terms", type=int, default=6)
@click.option("--bound", type=int, default=10**5)
@click.option("--method", type=click.Choice(["L", "R"]), default="L")
@click.pass_context
def laws_cmd(ctx, law, generator, depth, s, m, terms, bound, method):
    """Evaluate one analytic law and write its report."""
    engine = ctx.obj["engine"]
    flt = make_filter("P", engine)
    try:
        if law == "eq7":
            rows = _eq7_rows(engine, generator, depth)
            csv_path = _emit(ctx, f"ray{generator}_law.csv", law_rows_to_csv(rows))
            fig_path = csv_path.with_suffix(".svg")
            render_ray_law(rows, fig_path, ray=generator)
            report = {
                "law": law,
                "generator": generator,
                "max_eps_shallow": max(
                    (abs(r["epsilon"]) for r in rows if r["depth"] <= 3), default=0.0
                ),
                "max_eps_deep": max(
                    (abs(r["epsilon"]) for r in rows if r["depth"] >= 4), default=0.0
                ),
                "csv": str(csv_path),
                "figure": str(fig_path),
            }
        elif law == "eq8":
            mu, mu_tilde, dev = L.column_distribution_law(engine, m)
            report = {"law": law, "m": m, "mu": mu, "mu_tilde": mu_tilde, "dev": dev}
        elif law == "eta":
            ray = seq.extend_ray(flt, generator if generator > 1 else 1, terms)
            val = L.eta_partial(s, ray.values, terms)
            report = {"law": law, "s": s, "value": val.value, "tail": val.tail}
        elif law == "zeta":
            part = seq.verify_partition(flt, bound)
            val = L.zeta_global(s, part["rays"])
            report = {
                "law": law,
                "s": s,
                "value": val.value,
                "tail": val.tail,
                "reference_pi2_6": math.pi**2 / 6 if s == 2.0 else None,
            }
        elif law == "predict":
            ray = seq.extend_ray(flt, generator, depth + 1)
            root, err = L.predict_next(engine, ray.values, depth, method=method)
            report = {
                "law": law,
                "generator": generator,
                "n": depth,
                "root": root,
                "truth": ray.values[depth],
                "rel_error": err,
            }
        elif law == "conj3":
            m_ = seq.build_matrix(flt, 20, 5, value_bound=ctx.obj["bound"])
            rows_d = {r.generator: r.values for r in m_.rows}
            scan = L.conjecture3_scan(rows_d)
            report = {
                "law": law,
                "max_ratio": scan["max_ratio"],
                "argmax": scan["argmax"],
                "points": len(scan["points"]),
            }
    except PrimewebError as e:
        _fail(str(e), 2)
    _emit(ctx, f"laws_{law}.json", report)
    click.echo(_json_text(report), nl=False)


# -- webs -----------------------------------------------------------------------


@main.command("web")
@click.argument("variant", type=click.Choice(["pure", "w3", "w4", "degenerate"]))
@click.option("--phi", type=float, default=None, help="slope angle in degrees")
@click.option("--rotations", type=int, default=2, help="turn count for the pure web")
@click.option("--trapezoid", "trap_mu", type=int, default=None)
@click.pass_context
def web_cmd(ctx, variant, phi, rotations, trap_mu):
    """Build a web and emit its SVG figure and JSON description."""
    engine = ctx.obj["engine"]
    phi_deg = phi if phi is not None else webmod.DEFAULT_PHI_DEG
    try:
        if variant == "pure":
            gens = webmod.web_generators()[0]["generators"]
            w = webmod.build_pure_log_web(
                engine, math.radians(phi_deg), rotations, gens
            )
        elif variant == "w3":
            w = webmod.build_approx_web(engine, rotations=3, phi_deg=phi_deg)
        elif variant == "w4":
            w = webmod.build_approx_web(engine, rotations=4, phi_deg=phi_deg)
        else:
            w = webmod.build_degenerate_web(engine, phi_deg=phi_deg)
        overlay = None
        if trap_mu is not None:
            overlay = webmod.trapezoid(engine, 1, trap_mu, 1, 2)
    except PrimewebError as e:
        _fail(str(e), 2)
    d = w.to_json_dict()
    d["prime_count"] = w.prime_count()
    if overlay is not None:
        d["trapezoid"] = {
            "mu": overlay.mu,
            "lower": overlay.lower,
            "upper": overlay.upper,
        }
    _emit(ctx, f"web_{variant}.json", d)
    out_dir = Path(ctx.obj["cfg"].output_dir)
    svg = render_web(w, out_dir / f"web_{variant}.svg", trapezoid=overlay)
    click.echo(f"{variant}: {w.prime_count()} primes -> {svg}")


@main.command("export-w3-system")
@click.argument("path", type=click.Path(), required=False, default=None)
@click.pass_context
def export_w3(ctx, path):
    """Assemble the three-rotation system and write its text model."""
    try:
        s = w3.assemble_w3_system(ctx.obj["engine"])
    except PrimewebError as e:
        _fail(str(e), 2)
    text = w3.export_text(s)
    header = (
        f"# variables={s.unknown_count} equations={s.equation_count}"
        f" inequalities={s.inequality_count}"
        f" (stated {w3.STATED_INEQUALITY_COUNT})\n"
    )
    text = header + text
    if path:
        Path(path).write_text(text)
        click.echo(f"wrote {path}")
    else:
        p = _emit(ctx, "w3_system.txt", text)
        click.echo(f"wrote {p}")


@main.command("cache")
@click.argument("action", type=click.Choice(["audit", "clear", "stats"]))
@click.option("--fraction", type=float, default=0.01)
@click.option("--seed", type=int, default=0)
@click.pass_context
def cache_cmd(ctx, action, fraction, seed):
    """Audit, clear, or summarize the on-disk ray cache."""
    c = _cache(ctx)
    if action == "clear":
        c.clear()
        click.echo("cache cleared")
        return
    if action == "stats":
        click.echo(_json_text(c.stats()), nl=False)
        return
    rep = c.audit(ctx.obj["engine"], fraction=fraction, seed=seed)
    click.echo(_json_text(rep), nl=False)
    if rep["mismatches"]:
        sys.exit(1)


if __name__ == "__main__":
    main()
