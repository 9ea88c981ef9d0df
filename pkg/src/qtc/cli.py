"""Command-line front end: sampling, threshold campaigns, percolation, fits."""

import json
import sys

import click

from .enhance import enhanced_hdrg_decode, init_step
from .hdrg import RegionParams, hdrg_decode
from .lattice import CodeParams, NoiseParams, compute_syndrome, make_rng, sample_errors
from .percolation import percolation_sample, site_percolation_sample
from .sdrg import sdrg_decode
from .stats import (
    CURVE_HEADER,
    estimate_success,
    fit_threshold,
    hashing_threshold,
    read_curve_csv,
    write_curve_csv,
)

SPAN_RULE = "all-columns-or-all-rows"


def parse_int_list(text):
    try:
        if isinstance(text, (list, tuple)):
            vals = [int(x) for x in text]
        else:
            vals = [int(tok) for tok in str(text).split(",") if tok != ""]
    except (TypeError, ValueError):
        raise click.ClickException(f"bad integer list {text!r}")
    if not vals:
        raise click.ClickException(f"empty integer list {text!r}")
    return vals


def parse_grid(text):
    """'a:b:step' inclusive of both ends (within half a step)."""
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    parts = str(text).split(":")
    if len(parts) == 1:
        try:
            return [float(parts[0])]
        except ValueError:
            raise click.ClickException(f"bad p value {text!r}")
    if len(parts) != 3:
        raise click.ClickException(f"bad grid {text!r}; expected a:b:step")
    try:
        a, b, step = (float(x) for x in parts)
    except ValueError:
        raise click.ClickException(f"bad grid {text!r}; expected a:b:step")
    if step <= 0 or b < a:
        raise click.ClickException(f"bad grid {text!r}; need step > 0 and b >= a")
    n = int((b - a) / step + 0.5) + 1
    return [round(a + i * step, 10) for i in range(n)]


def parse_init(text):
    if text is None:
        return None
    vals = parse_int_list(text)
    if len(vals) != 2:
        raise click.ClickException(f"bad init depth {text!r}; expected r,s")
    try:
        return RegionParams(*vals)
    except ValueError as err:
        raise click.ClickException(str(err))


def apply_config(ctx, config_path):
    """Fill parameters the user left at their defaults from a JSON config."""
    if config_path is None:
        return
    try:
        with open(config_path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise click.ClickException(f"cannot read config {config_path}: {err}")
    for key, value in cfg.items():
        name = key.replace("-", "_")
        if name == "config":
            continue
        if name not in ctx.params:
            raise click.ClickException(f"unknown config key {key!r} for {ctx.command.name}")
        if ctx.get_parameter_source(name) == click.core.ParameterSource.DEFAULT:
            ctx.params[name] = value


def header_comments(command, **settings):
    lines = [f"qtc {command}"]
    for key in sorted(settings):
        lines.append(f"{key}={settings[key]}")
    return lines


def _open_out(path):
    return open(path, "w") if path else sys.stdout


@click.group()
def main():
    """Qudit toric-code decoder simulations."""


@main.command()
@click.option("--decoder", type=click.Choice(["hdrg", "enhanced", "sdrg"]), default="hdrg", show_default=True)
@click.option("--d", "d", type=int, default=3, show_default=True, help="Qudit dimension (prime).")
@click.option("--L", "L", type=int, default=16, show_default=True, help="Lattice size.")
@click.option("--p", type=str, default="0.05", show_default=True, help="Error rate.")
@click.option("--n", type=int, default=100, show_default=True, help="Number of trials.")
@click.option("--seed", type=int, default=0, show_default=True, help="Master seed.")
@click.option("--init", type=str, default=None, help="Init depth r,s for the enhanced decoder.")
@click.option("--bp-rounds", type=int, default=5, show_default=True, help="Message rounds per level (sdrg).")
@click.option("--threads", type=int, default=1, envvar="QTC_THREADS", help="Worker processes.")
@click.option("--trace", is_flag=True, help="Dump decoder internals for trial 0 as JSON.")
@click.option("--out", type=str, default=None, help="Also write the point as a curve CSV.")
@click.option("--config", type=str, default=None, help="JSON file supplying defaults for these flags.")
@click.pass_context
def sample(ctx, decoder, d, L, p, n, seed, init, bp_rounds, threads, trace, out, config):
    """Estimate the success probability at a single (d, L, p)."""
    apply_config(ctx, config)
    pr = ctx.params
    try:
        params = CodeParams(pr["L"], pr["d"])
        noise = NoiseParams(float(pr["p"]))
        depth = parse_init(pr["init"])
        pt = estimate_success(pr["decoder"], params, noise, pr["n"], pr["seed"],
                              depth=depth, rounds=pr["bp_rounds"], workers=pr["threads"])
    except ValueError as err:
        raise click.ClickException(str(err))
    click.echo(f"d={pt.d} L={pt.L} p={pt.p} n_success={pt.n_success} "
               f"n_total={pt.n_total} p_succ={pt.p_succ} sigma={pt.sigma}")
    if pr["trace"]:
        click.echo(json.dumps(_trace_trial0(pr["decoder"], params, noise, pr["seed"], depth,
                                            pr["bp_rounds"])))
    if pr["out"]:
        comments = header_comments("sample", decoder=pr["decoder"], d=pt.d, L=pt.L, p=pt.p,
                                   n=pt.n_total, seed=pr["seed"], init=pr["init"],
                                   bp_rounds=pr["bp_rounds"])
        write_curve_csv(pr["out"], [pt], comments)


def _trace_trial0(decoder, params, noise, seed, depth, rounds):
    W = compute_syndrome(sample_errors(params, noise, make_rng(seed, 0)))
    trace = []
    if decoder == "hdrg":
        hdrg_decode(W, trace=trace)
    elif decoder == "enhanced":
        kwargs = {"depth": depth} if depth is not None else {}
        enhanced_hdrg_decode(W, trace=trace, **kwargs)
    else:
        sdrg_decode(W, noise, rounds=rounds, trace=trace)
    return {"decoder": decoder, "trial": 0, "levels": trace}


@main.command()
@click.option("--decoder", type=click.Choice(["hdrg", "enhanced", "sdrg"]), default="hdrg", show_default=True)
@click.option("--d", "d", type=str, default="2", show_default=True, help="Comma list of dimensions.")
@click.option("--L", "L", type=str, default="16,32,64", show_default=True, help="Comma list of sizes.")
@click.option("--p", type=str, default="0.06:0.10:0.005", show_default=True, help="Grid a:b:step.")
@click.option("--n", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--init", type=str, default=None)
@click.option("--bp-rounds", type=int, default=5, show_default=True)
@click.option("--threads", type=int, default=1, envvar="QTC_THREADS")
@click.option("--L-subset", "L_subset", type=str, default=None, help="Fit only these sizes.")
@click.option("--out", type=str, default="curve.csv", show_default=True, help="Curve CSV path.")
@click.option("--fit-out", type=str, default=None, help="Fit JSON path (default: <out> with _fit.json).")
@click.option("--config", type=str, default=None)
@click.pass_context
def threshold(ctx, decoder, d, L, p, n, seed, init, bp_rounds, threads, L_subset, out, fit_out, config):
    """Sweep a (L, p) grid, write the curve CSV, and fit the crossing."""
    apply_config(ctx, config)
    pr = ctx.params
    ds, Ls, ps = parse_int_list(pr["d"]), parse_int_list(pr["L"]), parse_grid(pr["p"])
    depth = parse_init(pr["init"])
    subset = parse_int_list(pr["L_subset"]) if pr["L_subset"] else None
    points = []
    try:
        for dval in ds:
            for Lval in Ls:
                params = CodeParams(Lval, dval)
                for pv in ps:
                    points.append(estimate_success(pr["decoder"], params, NoiseParams(pv),
                                                   pr["n"], pr["seed"], depth=depth,
                                                   rounds=pr["bp_rounds"], workers=pr["threads"]))
    except ValueError as err:
        raise click.ClickException(str(err))
    comments = header_comments("threshold", decoder=pr["decoder"], d=pr["d"], L=pr["L"],
                               p=pr["p"], n=pr["n"], seed=pr["seed"], init=pr["init"],
                               bp_rounds=pr["bp_rounds"], L_subset=pr["L_subset"])
    try:
        write_curve_csv(pr["out"], points, comments)
    except OSError as err:
        raise click.ClickException(f"cannot write {pr['out']}: {err}")
    for dval in ds:
        try:
            fit = fit_threshold([pt for pt in points if pt.d == dval], L_subset=subset)
        except ValueError as err:
            raise click.ClickException(f"fit failed for d={dval}: {err}")
        if pr["fit_out"]:
            if len(ds) == 1:
                fit_path = pr["fit_out"]
            else:
                stem = pr["fit_out"]
                stem = stem[:-5] if stem.endswith(".json") else stem
                fit_path = stem + f"_d{dval}.json"
        else:
            fit_path = _default_fit_path(pr["out"], dval if len(ds) > 1 else None)
        try:
            with open(fit_path, "w") as fh:
                fh.write(fit.to_json() + "\n")
        except OSError as err:
            raise click.ClickException(f"cannot write {fit_path}: {err}")
        click.echo(f"wrote {fit_path}")
        click.echo(f"d={dval} p_th={fit.p_th} nu={fit.nu} mu={fit.mu} rss={fit.rss}"
                   + (" (degenerate)" if fit.degenerate else "")
                   + (" (extrapolated)" if fit.extrapolated else ""))
    click.echo(f"wrote {pr['out']}")


def _default_fit_path(out, d=None):
    stem = out[:-4] if out.endswith(".csv") else out
    if d is not None:
        return stem + f"_d{d}_fit.json"
    return stem + "_fit.json"


@main.command()
@click.option("--d", "d", type=int, default=3, show_default=True)
@click.option("--L", "L", type=str, default="32", show_default=True, help="Comma list of sizes.")
@click.option("--p-grid", type=str, default="0.1:0.3:0.02", show_default=True)
@click.option("--n", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--init", type=str, default=None, help="Thin syndromes with this init depth first.")
@click.option("--site-mode", is_flag=True, help="Classic site percolation (d ignored, written as 0).")
@click.option("--out", type=str, default=None, help="CSV path (default: stdout).")
@click.option("--config", type=str, default=None)
@click.pass_context
def percolate(ctx, d, L, p_grid, n, seed, init, site_mode, out, config):
    """Spanning-probability sweep over a p grid."""
    apply_config(ctx, config)
    pr = ctx.params
    Ls, ps = parse_int_list(pr["L"]), parse_grid(pr["p_grid"])
    depth = parse_init(pr["init"])
    if pr["site_mode"] and depth is not None:
        raise click.ClickException("--init has no effect in --site-mode")
    rows = []
    try:
        for Lval in Ls:
            for pv in ps:
                if pr["site_mode"]:
                    hits = sum(
                        site_percolation_sample(Lval, pv, (pr["seed"], i))
                        for i in range(pr["n"])
                    )
                    rows.append((0, Lval, pv, hits, pr["n"]))
                else:
                    params, noise = CodeParams(Lval, pr["d"]), NoiseParams(pv)
                    hits = sum(
                        percolation_sample(params, noise, (pr["seed"], i), depth=depth).spans
                        for i in range(pr["n"])
                    )
                    rows.append((pr["d"], Lval, pv, hits, pr["n"]))
    except ValueError as err:
        raise click.ClickException(str(err))
    comments = header_comments("percolate", d=pr["d"], L=pr["L"], p_grid=pr["p_grid"],
                               n=pr["n"], seed=pr["seed"], init=pr["init"],
                               site_mode=pr["site_mode"], span_rule=SPAN_RULE)
    fh = _open_out(pr["out"])
    try:
        for line in comments:
            fh.write(f"# {line}\n")
        fh.write("d,L,p,n_span,n_total\n")
        for dd, Lval, pv, hits, total in rows:
            fh.write(f"{dd},{Lval},{pv!r},{hits},{total}\n")
    except OSError as err:
        raise click.ClickException(f"cannot write {pr['out']}: {err}")
    finally:
        if fh is not sys.stdout:
            fh.close()


@main.command()
@click.option("--d", "d", type=str, default="2", show_default=True, help="Comma list of primes.")
@click.option("--model", type=click.Choice(["independent", "depolarizing"]), default="independent",
              show_default=True)
def hashing(d, model):
    """Print hashing-bound thresholds for a list of d."""
    ds = parse_int_list(d)
    try:
        vals = [(dv, hashing_threshold(dv, model)) for dv in ds]
    except ValueError as err:
        raise click.ClickException(str(err))
    for dv, val in vals:
        click.echo(f"{val:.6f}" if len(vals) == 1 else f"{dv} {val:.6f}")


@main.command()
@click.argument("curve", type=str)
@click.option("--L-subset", "L_subset", type=str, default=None, help="Fit only these sizes.")
@click.option("--out", type=str, default=None, help="Fit JSON path (default: stdout).")
def fit(curve, L_subset, out):
    """Re-fit the scaling form to an existing curve CSV."""
    try:
        points = read_curve_csv(curve)
    except (OSError, ValueError) as err:
        raise click.ClickException(f"cannot read {curve}: {err}")
    subset = parse_int_list(L_subset) if L_subset else None
    try:
        result = fit_threshold(points, L_subset=subset)
    except ValueError as err:
        raise click.ClickException(f"fit failed: {err}")
    fh = _open_out(out)
    try:
        fh.write(result.to_json() + "\n")
    finally:
        if fh is not sys.stdout:
            fh.close()


@main.command()
@click.option("--fit", "fits", type=str, multiple=True, required=True,
              help="Fit JSON path; repeat for several decoders/dimensions.")
@click.option("--rescale", type=float, default=0.69, show_default=True,
              help="Factor applied to the hashing bound for comparison.")
@click.option("--model", type=click.Choice(["independent", "depolarizing"]), default="independent",
              show_default=True)
@click.option("--out", type=str, default=None, help="CSV path (default: stdout).")
def compare(fits, rescale, model, out):
    """Join fitted thresholds with (rescaled) hashing bounds."""
    rows = []
    for path in fits:
        try:
            with open(path) as fh:
                blob = json.load(fh)
        except (OSError, json.JSONDecodeError) as err:
            raise click.ClickException(f"cannot read {path}: {err}")
        dvals = blob.get("metadata", {}).get("d_values", [])
        if len(dvals) != 1:
            raise click.ClickException(f"{path} must cover exactly one d, found {dvals}")
        dv = dvals[0]
        try:
            bound = hashing_threshold(dv, model)
        except ValueError as err:
            raise click.ClickException(str(err))
        rows.append((dv, path, blob["p_th"], bound))
    comments = header_comments("compare", rescale=rescale, model=model,
                               fits=";".join(fits))
    fh = _open_out(out)
    try:
        for line in comments:
            fh.write(f"# {line}\n")
        fh.write("d,source,p_th,hashing,hashing_rescaled,ratio\n")
        for dv, path, p_th, bound in sorted(rows):
            fh.write(f"{dv},{path},{p_th!r},{bound!r},{rescale * bound!r},"
                     f"{p_th / (rescale * bound)!r}\n")
    finally:
        if fh is not sys.stdout:
            fh.close()


if __name__ == "__main__":
    main()
