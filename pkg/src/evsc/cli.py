"""Command-line front end: ``evsc report|table|stopping|family|threshold``.

Options may also come from ``EVSC_*`` environment variables; flags win.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from functools import wraps
from typing import Any, Callable

import click

from . import asymptotics as asy
from . import exact_core as ec
from . import lr_families as fam
from .errors import DomainError, EvscError, NumericError
from .special_fn import phi_cdf
from .stopping import (
    StoppingConfig,
    expected_lr_at_stopping,
    expected_lr_at_stopping_analytic,
    finiteness_threshold,
    shepp_moment,
    simulate_stopping,
)
from .stopping.simulate import available_backends

TABLE1_N = (20, 100, 1_000, 10_000, 100_000, 1_000_000)
# as printed: (k, u, LR, p-value)
TABLE1_PRINTED = {
    20: (6, "1.789", "1.288", "0.11532"),
    100: (40, "2.000", "0.913", "0.05689"),
    1_000: (460, "2.530", "0.972", "0.01244"),
    10_000: (4852, "2.960", "1.002", "0.00318"),
    100_000: (49474, "3.327", "1.003", "0.00089"),
    1_000_000: (498172, "3.656", "1.001", "0.00026"),
}
TABLE2_EXPERIMENTS = {"A": (10_000, 4_815), "B": (100_000_000_000, 49_999_214_176)}


# --------------------------------------------------------------------------
# output


@dataclass
class Column:
    key: str
    display_fmt: Callable[[Any], str] | None = None


def _fixed(places: int) -> Callable[[float], str]:
    return lambda v: f"{v:.{places}f}"


def _json_value(v: Any) -> Any:
    if isinstance(v, float):
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
    return v


def _plain(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        return "inf" if v == math.inf else repr(v)
    return str(v)


def _cells(row: dict, columns: list[Column], precision: str) -> dict:
    out = {}
    for col in columns:
        v = row.get(col.key)
        if precision == "paper" and col.display_fmt is not None and isinstance(v, (int, float)) \
                and not isinstance(v, bool) and v is not None and math.isfinite(v):
            out[col.key] = col.display_fmt(v)
        else:
            out[col.key] = _plain(v)
    return out


def render(rows: list[dict], columns: list[Column], fmt: str, precision: str,
           *, single: bool = False) -> str:
    if fmt == "json":
        if precision == "paper":
            data = []
            for row in rows:
                cells = _cells(row, columns, precision)
                data.append({k: _json_value(_parse_num(cells[k], row.get(k)))
                             for k in cells})
        else:
            data = [{c.key: _json_value(row.get(c.key)) for c in columns} for row in rows]
        return json.dumps(data[0] if single else data, indent=2) + "\n"
    cells = [_cells(row, columns, precision) for row in rows]
    keys = [c.key for c in columns]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(keys)
        for c in cells:
            writer.writerow([c[k] for k in keys])
        return buf.getvalue()
    if single:
        width = max(len(k) for k in keys)
        return "".join(f"{k.ljust(width)}  {cells[0][k]}\n" for k in keys)
    widths = {k: max(len(k), *(len(c[k]) for c in cells)) for k in keys}
    lines = ["  ".join(k.rjust(widths[k]) for k in keys)]
    lines.append("  ".join("-" * widths[k] for k in keys))
    lines += ["  ".join(c[k].rjust(widths[k]) for k in keys) for c in cells]
    return "\n".join(lines) + "\n"


def _parse_num(text: str, original: Any) -> Any:
    # rounded-precision JSON keeps numbers as numbers, rounded as displayed
    if isinstance(original, bool) or not isinstance(original, (int, float)):
        return original
    if isinstance(original, int):
        return original
    try:
        return float(text)
    except ValueError:
        return original


def emit(text: str, out: str | None) -> None:
    click.echo(text, nl=False)
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# --------------------------------------------------------------------------
# shared options and error mapping


def shared_options(default_format: str = "text"):
    def decorate(f):
        f = click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True,
                         envvar="EVSC_WORKERS", help="Parallel workers (stopping only).")(f)
        f = click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=42, show_default=True,
                         envvar="EVSC_SEED", help="Unsigned 64-bit seed (stopping only).")(f)
        f = click.option("--precision", type=click.Choice(["paper", "full"]), default="paper",
                         show_default=True, envvar="EVSC_PRECISION")(f)
        f = click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None,
                         envvar="EVSC_OUT", help="Also write the output to this file.")(f)
        f = click.option("--format", "fmt", type=click.Choice(["text", "csv", "json"]),
                         default=default_format, show_default=True, envvar="EVSC_FORMAT")(f)
        return f
    return decorate


def exits_on_error(f):
    @wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except click.ClickException:
            raise
        except EvscError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(exc.exit_code)
        except ArithmeticError as exc:
            click.echo(f"error: numeric failure: {exc}", err=True)
            sys.exit(NumericError.exit_code)
    return wrapper


def _usage(build: Callable[[], Any]) -> Any:
    """Argument validation failures are usage errors, not domain errors."""
    try:
        return build()
    except DomainError as exc:
        raise click.UsageError(str(exc)) from exc


class _Group(click.Group):
    """Every failure, click's own included, ends in one ``error:`` line."""

    def main(self, *args, **kwargs):
        kwargs["standalone_mode"] = False
        try:
            rv = super().main(*args, **kwargs)
        except click.ClickException as exc:
            click.echo(f"error: {exc.format_message()}", err=True)
            sys.exit(exc.exit_code)
        except click.Abort:
            click.echo("error: aborted", err=True)
            sys.exit(1)
        sys.exit(rv if isinstance(rv, int) else 0)


@click.group(cls=_Group, context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(package_name="artifact")
def main() -> None:
    """Likelihood ratios versus p-values for coin tossing."""


# --------------------------------------------------------------------------
# report


def evidence_report(e: ec.Experiment, p0: float = 0.5) -> dict:
    par = ec.standardize(e, p0)
    u = par.u
    row: dict[str, Any] = {"n": e.n, "k": e.k, "p0": p0, "u": u}
    row["exact_lr"] = ec.exact_lr_uniform_vs_point(e, p0)
    row["approx_lr"] = fam.lr_uniform_closed_form(e, p0)
    in_regime = p0 == 0.5 and abs(u) <= 0.5 * math.sqrt(e.n) * (1 + 1e-12)
    env = asy.lr_envelope(e.n, u) if in_regime else None
    row["lr_envelope_lower"] = env.lower if env else None
    row["lr_envelope_upper"] = env.upper if env else None
    row["lr_envelope_provenance"] = env.provenance.value if env else asy.Provenance.NONE.value
    row["exact_p_two_sided"] = ec.exact_p_value_fair(e, "two") if p0 == 0.5 else None
    if u != 0:
        pa = asy.p_approx(u)
        row["approx_p"], row["approx_p_lower"], row["approx_p_upper"] = pa.value, pa.lower, pa.upper
        row["approx_p_provenance"] = pa.provenance.value
    else:
        row["approx_p"] = row["approx_p_lower"] = row["approx_p_upper"] = None
        row["approx_p_provenance"] = asy.Provenance.NONE.value
    row["max_attainable_lr"] = math.exp(0.5 * u * u) if 0.5 * u * u < 709 else math.inf
    return row


def _sci(digits: int) -> Callable[[float], str]:
    # 2.2e-04 -> 2.2e-4
    def fmt(v: float) -> str:
        mant, exp = f"{v:.{digits}e}".split("e")
        return f"{mant}e{int(exp)}"
    return fmt


def _sig(digits: int) -> Callable[[float], str]:
    return lambda v: f"{v:.{digits}g}"


REPORT_COLUMNS = [
    Column("n"), Column("k"), Column("p0"),
    Column("u", _fixed(3)),
    Column("exact_lr", _fixed(3)), Column("approx_lr", _fixed(3)),
    Column("lr_envelope_lower", _fixed(3)), Column("lr_envelope_upper", _fixed(3)),
    Column("lr_envelope_provenance"),
    Column("exact_p_two_sided", _sig(5)),
    Column("approx_p", _sig(5)), Column("approx_p_lower", _sig(5)), Column("approx_p_upper", _sig(5)),
    Column("approx_p_provenance"),
    Column("max_attainable_lr", _fixed(3)),
]


@main.command()
@click.option("--n", "n", type=int, required=True, help="Number of tosses.")
@click.option("--k", "k", type=int, required=True, help="Number of heads.")
@click.option("--p0", type=float, default=0.5, show_default=True, help="Null success probability.")
@shared_options()
@exits_on_error
def report(n, k, p0, fmt, out, precision, seed, workers):
    """Evidence summary for k heads in n tosses."""
    e = _usage(lambda: ec.Experiment(n, k))
    if n < 1:
        raise click.UsageError("n must be positive")
    if not 0 < p0 < 1:
        raise click.UsageError("p0 must lie in (0, 1)")
    emit(render([evidence_report(e, p0)], REPORT_COLUMNS, fmt, precision, single=True), out)


# --------------------------------------------------------------------------
# tables


def table1_rows() -> list[dict]:
    rows = []
    for n in TABLE1_N:
        e = ec.find_neutral_k(n)
        u = ec.standardize(e).u
        row = {"n": n, "k": e.k, "u": u, "lr": ec.exact_lr_uniform_vs_fair(e),
               "p_value": ec.exact_p_value_fair(e, "two"),
               "p_normal": 2.0 * phi_cdf(-abs(u))}
        pk, pu, plr, pp = TABLE1_PRINTED[n]
        row["matches_printed"] = (e.k == pk and f"{u:.3f}" == pu and f"{row['lr']:.3f}" == plr
                                and f"{row['p_value']:.5f}" == pp)
        rows.append(row)
    return rows


TABLE1_COLUMNS = [Column("n"), Column("k"), Column("u", _fixed(3)), Column("lr", _fixed(3)),
                  Column("p_value", _fixed(5)), Column("p_normal", _fixed(5)),
                  Column("matches_printed")]


def table2_columns() -> dict[str, dict]:
    """One record per researcher, keyed "A" and "B"."""
    cols = {}
    for name, (n, k) in TABLE2_EXPERIMENTS.items():
        e = ec.Experiment(n, k)
        cols[name] = {"n": n, "k": k, "u": ec.standardize(e).u,
                      "p_value": ec.exact_p_value_fair(e, "two"),
                      "lr": ec.exact_lr_uniform_vs_fair(e)}
    return cols


# table 2 is transposed (one row per quantity), so formats are per row
TABLE2_FORMATS = {"n": None, "k": None, "u": _fixed(2), "p_value": _sci(1), "lr": _sig(3)}


def _render_table2(fmt: str, precision: str) -> str:
    cols = table2_columns()

    def shown(q: str, v: Any) -> Any:
        f = TABLE2_FORMATS[q]
        return f(v) if precision == "paper" and f is not None else v

    if fmt == "json":
        data = [{"experiment": side,
                 **{q: _json_value(_parse_num(str(shown(q, v)), v)) for q, v in rec.items()}}
                for side, rec in cols.items()]
        return json.dumps(data, indent=2) + "\n"
    table = [{"quantity": q, **{side: _plain(shown(q, cols[side][q])) for side in cols}}
             for q in TABLE2_FORMATS]
    return render(table, [Column("quantity"), Column("A"), Column("B")], fmt, "full")


def table3_rows() -> list[dict]:
    rows = []
    for sided in ("one", "two"):
        for p in fam.TABLE3_PVALUES:
            res = fam.max_lr_for_pvalue(p, sided)
            rows.append({"sided": sided, "p_value": p, "u": res.u, "sup_lr": res.sup_lr})
    return rows


TABLE3_COLUMNS = [Column("sided"), Column("p_value", _fixed(3)), Column("u", _fixed(3)),
                  Column("sup_lr", _fixed(1))]


@main.command()
@click.argument("which", type=click.Choice(["1", "2", "3"]))
@shared_options()
@exits_on_error
def table(which, fmt, out, precision, seed, workers):
    """Regenerate table 1, 2 or 3 from scratch."""
    if which == "1":
        text = render(table1_rows(), TABLE1_COLUMNS, fmt, precision)
    elif which == "2":
        text = _render_table2(fmt, precision)
    else:
        text = render(table3_rows(), TABLE3_COLUMNS, fmt, precision)
    emit(text, out)


# --------------------------------------------------------------------------
# stopping


def stopping_record(cfg: StoppingConfig, workers: int, backend: str | None) -> dict:
    res = simulate_stopping(cfg, workers=workers, backend=backend)
    rec: dict[str, Any] = {"m": cfg.m, "c": cfg.c, "trials": cfg.trials,
                           "max_tosses": cfg.max_tosses, "seed": cfg.seed,
                           "backend": res.backend}
    for key in ("mean_inv_sqrt_n", "se_inv_sqrt_n", "mean_lr", "se_lr", "truncated_fraction",
                "truncation_bias_bound", "lr_truncation_bias_bound", "mean_n_stopped"):
        rec[key] = getattr(res, key)
    rec["shepp_inv_sqrt_moment"] = shepp_moment(cfg.m, -0.5, cfg.c)
    rec["expected_lr_formula"] = expected_lr_at_stopping(cfg.m, cfg.c)
    rec["expected_lr_analytic"] = expected_lr_at_stopping_analytic(cfg.m, cfg.c)
    hist = res.stopped_n_histogram
    rec["stopped_trials"] = hist["stopped"]
    rec["truncated_trials"] = hist["truncated"]
    for b in hist["decades"]:
        rec[f"stopped_n_{b['from']}_{b['to']}"] = b["count"]
    for q, v in hist["quantiles"].items():
        rec[f"stopped_n_{q}"] = v
    return rec


@main.command()
@click.option("--m", "m", type=int, required=True, help="Initial tosses before checking.")
@click.option("--c", "c", type=float, required=True, help="Boundary in standard deviations.")
@click.option("--trials", type=int, default=100_000, show_default=True, envvar="EVSC_TRIALS")
@click.option("--max-tosses", type=int, default=10**8, show_default=True,
              envvar="EVSC_MAX_TOSSES", help="Per-trial truncation cap.")
@click.option("--backend", type=click.Choice(["compiled", "python"]), default=None,
              envvar="EVSC_BACKEND", help="Kernel (default: compiled when built).")
@shared_options(default_format="json")
@exits_on_error
def stopping(m, c, trials, max_tosses, backend, fmt, out, precision, seed, workers):
    """Monte Carlo of optional stopping at c sigma, beside the Brownian-motion values."""
    cfg = _usage(lambda: StoppingConfig(m=m, c=c, trials=trials, max_tosses=max_tosses,
                                        seed=seed))
    if backend and backend not in available_backends():
        raise click.UsageError(f"backend {backend!r} is not available")
    rec = stopping_record(cfg, workers, backend)
    cols = [Column(k, _sig(6)) for k in rec]
    emit(render([rec], cols, fmt, precision, single=True), out)


# --------------------------------------------------------------------------
# family


@main.command()
@click.option("--n", "n", type=int, required=True)
@click.option("--k", "k", type=int, required=True)
@click.option("--p0", type=float, default=0.5, show_default=True)
@click.option("--kind", type=click.Choice(["x", "uniform", "normal", "alpha"]), required=True)
@click.option("--x", "x", type=float, default=0.0, show_default=True, help="Point offset (kind=x).")
@click.option("--s", "s", type=float, default=0.01, show_default=True, help="Normal sd (kind=normal).")
@click.option("--shift", type=float, default=None,
              help="Normal mean is p0 - shift (kind=normal; default centres on k/n).")
@click.option("--alpha", type=float, default=0.1, show_default=True, help="Half-width (kind=alpha).")
@click.option("--exact/--approx", default=False, help="Exact binomial integrand in quadrature.")
@shared_options()
@exits_on_error
def family(n, k, p0, kind, x, s, shift, alpha, exact, fmt, out, precision, seed, workers):
    """Likelihood ratios of point or density alternatives against p = p0."""
    e = _usage(lambda: ec.Experiment(n, k))
    if n < 1 or not 0 < p0 < 1:
        raise click.UsageError("need n >= 1 and 0 < p0 < 1")
    par = ec.standardize(e, p0)
    rec: dict[str, Any] = {"n": n, "k": k, "p0": p0, "u": par.u, "kind": kind}
    if kind == "x":
        rec["x"] = x
        rec["lr_x_exact"] = fam.lr_x_exact(e, p0, x)
        rec["lr_x_approx"] = fam.lr_x_approx(par.u, x)
        rec["lr_x_bound"] = fam.lr_x_bound(e, p0, x)
    elif kind == "uniform":
        rec["lr_f"] = fam.lr_f(e, p0, fam.uniform_density(), exact=exact)
        rec["closed_form"] = fam.lr_uniform_closed_form(e, p0)
    elif kind == "normal":
        if shift is None:
            shift = p0 - k / n
        rec["shift"], rec["s"] = shift, s
        rec["lr_f"] = fam.lr_f(e, p0, fam.normal_density(p0 - shift, s), exact=exact)
        rec["closed_form"] = fam.lr_normal_family(e, p0, shift, s)
    else:
        rec["alpha"] = alpha
        rec["lr_alpha"] = fam.lr_alpha(e, p0, alpha, exact=exact)
        rec["closed_form"] = fam.lr_alpha_closed_form(par.u)
    cols = [Column(key, _sig(6)) for key in rec]
    emit(render([rec], cols, fmt, precision, single=True), out)


@main.command()
@click.option("--mu", type=float, required=True, help="Moment order (> 0).")
@shared_options()
@exits_on_error
def threshold(mu, fmt, out, precision, seed, workers):
    """Largest c for which E(T^mu) is finite."""
    if not mu > 0:
        raise click.UsageError("mu must be positive")
    rec = {"mu": mu, "c_star": finiteness_threshold(mu)}
    emit(render([rec], [Column("mu"), Column("c_star", _fixed(4))], fmt, precision,
                single=True), out)


if __name__ == "__main__":  # pragma: no cover
    main()
