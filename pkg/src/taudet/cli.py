"""Batch command-line front end.

Commands: det, tau, limits, constant, selftest.  Reports are written as
CSV (17-significant-digit decimals) or JSON (stable key order); when an
output path is given, a matplotlib figure is rendered next to the
delimited output unless --no-plot is passed.  Identical configurations
produce byte-identical CSV/JSON outputs.

Exit codes: 0 all requested checks pass, 1 failed check, 2 config error,
3 numerical nonconvergence.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import asymptotics, fredholm, kernels, painleve, selftest
from .errors import DomainError, NonConvergence, TaudetError

_FLOAT_FMT = "%.16e"   # 17 significant digits, round-trip exact

_CONFIG_KEYS = {
    "z", "zp", "w", "wp", "t0", "t1", "grid", "spacing", "order", "tol",
    "out", "format", "family", "lo", "hi", "window_lo", "window_hi",
}


def _write_text(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def emit_csv(path: Path, columns: dict):
    """Header row plus 17-significant-digit rows; byte-stable."""
    names = list(columns.keys())
    cols = [np.asarray(columns[k], float) for k in names]
    lines = [",".join(names)]
    for row in zip(*cols):
        lines.append(",".join(_FLOAT_FMT % v for v in row))
    _write_text(path, "\n".join(lines) + "\n")


def emit_json(path: Path, report: dict):
    _write_text(path, json.dumps(report, indent=2) + "\n")


def emit(report: dict, columns: dict | None, path: Path, fmt: str):
    if fmt == "json":
        emit_json(path, report)
    elif fmt == "csv":
        if columns is None:
            raise DomainError("this report has no tabular CSV form")
        emit_csv(path, columns)
    else:
        raise DomainError(f"unknown format {fmt!r}")


def _plot_columns(path: Path, columns: dict, title: str):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    names = list(columns.keys())
    x = np.asarray(columns[names[0]], float)
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    for name in names[1:]:
        y = np.asarray(columns[name], float)
        if np.all(np.isfinite(y)):
            ax.plot(x, y, lw=1.2, label=name)
    ax.set_xlabel(names[0])
    ax.set_title(title)
    ax.grid(True, ls=":", alpha=0.5)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path.with_suffix(".png"), dpi=140)
    plt.close(fig)


def _resolve_out(out: str | None) -> Path | None:
    if out is None:
        return None
    p = Path(out)
    if not p.is_absolute():
        base = os.environ.get("TAUDET_OUT_DIR", ".")
        p = Path(base) / p
    return p


def _params_from(ns) -> kernels.KernelParams:
    for f in ("z", "zp", "w", "wp"):
        if getattr(ns, f, None) is None:
            raise DomainError(f"missing required parameter --{f}")
    return kernels.KernelParams(ns.z, ns.zp, ns.w, ns.wp)


def _merge_config(ns, parser):
    """Optional JSON config file; explicit flags override file values."""
    if not getattr(ns, "config", None):
        return ns
    try:
        with open(ns.config) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config file: {exc}")
    unknown = set(cfg) - _CONFIG_KEYS
    if unknown:
        parser.error(f"unknown config keys: {sorted(unknown)}")
    for key, val in cfg.items():
        if getattr(ns, key, None) is None:
            setattr(ns, key, val)
    return ns


def _common_flags(sub, with_params=True):
    if with_params:
        sub.add_argument("--z", type=float)
        sub.add_argument("--zp", type=float)
        sub.add_argument("--w", type=float)
        sub.add_argument("--wp", type=float)
    sub.add_argument("--tol", type=float, default=None)
    sub.add_argument("--out", type=str, default=None)
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--no-plot", action="store_true")
    sub.add_argument("--config", type=str, default=None)


def _check_tol(tol):
    if tol is not None and not 1e-12 <= tol <= 1e-3:
        raise DomainError(f"tolerance must lie in [1e-12, 1e-3], got {tol}")


def cmd_det(ns) -> int:
    p = _params_from(ns)
    _check_tol(ns.tol)
    tol = ns.tol or 1e-9
    if ns.grid < 1:
        raise DomainError("--grid must be at least 1")
    if not 0.0 < ns.t0 <= ns.t1 < 1.0:
        raise DomainError("need 0 < t0 <= t1 < 1")
    kern = kernels.build_f21_kernel(p)
    if ns.grid == 1:
        ts = np.array([ns.t0])
    else:
        ts = painleve.grid_points(ns.t0, ns.t1, ns.grid, ns.spacing, log_endpoint=1.0)
    ds, errs = [], []
    for t in ts:
        res = fredholm.fredholm_det_finite(kern, float(t), n=ns.order, tol=tol)
        ds.append(res.value)
        errs.append(res.error_estimate)
    columns = {"t": ts, "d": ds, "error_estimate": errs}
    report = {"command": "det",
              "params": {"z": p.z, "zp": p.z_prime, "w": p.w, "wp": p.w_prime},
              "table": columns_to_lists(columns)}
    _deliver(ns, report, columns, "hypergeometric kernel determinant")
    return 0


def columns_to_lists(columns: dict) -> dict:
    return {k: [float(v) for v in vals] for k, vals in columns.items()}


def _deliver(ns, report, columns, title):
    out = _resolve_out(ns.out)
    if out is None:
        sys.stdout.write(json.dumps(report, indent=2) + "\n")
        return
    emit(report, columns, out, ns.format)
    if columns is not None and not ns.no_plot:
        _plot_columns(out, columns, title)


def cmd_tau(ns) -> int:
    p = _params_from(ns)
    _check_tol(ns.tol)
    tol = ns.tol or 1e-9
    curve = painleve.integrate_tau_pvi(p, t0=ns.t0, t1=ns.t1, tol=tol,
                                       n_grid=ns.grid, spacing=ns.spacing,
                                       init_quad=ns.order)
    columns = {"t": curve.t, "ln_d": curve.ln_d, "sigma": curve.sigma,
               "i1_drift": curve.i1_drift, "i2_drift": curve.i2_drift}
    report = {"command": "tau",
              "params": {"z": p.z, "zp": p.z_prime, "w": p.w, "wp": p.w_prime},
              "table": columns_to_lists(columns),
              "complete": curve.complete}
    _deliver(ns, report, columns, "tau-function route (Tracy-Widom system)")
    return 0


def cmd_limits(ns) -> int:
    _check_tol(ns.tol)
    tol = ns.tol or 1e-10
    if ns.z is None or ns.zp is None:
        raise DomainError("limits requires --z and --zp")
    if ns.family == "pv":
        if ns.w is None:
            raise DomainError("family pv requires --w")
        lo = ns.lo if ns.lo is not None else 0.5
        hi = ns.hi if ns.hi is not None else 20.0
        curve = painleve.whittaker_sigma_curve(ns.z, ns.zp, ns.w, lo, hi,
                                               n_points=ns.grid, order=ns.order, tol=tol)
        stats = painleve.sigma_form_residual(curve, "pv", (ns.z, ns.zp, ns.w))
        params = {"z": ns.z, "zp": ns.zp, "w": ns.w}
        title = "Whittaker determinant sigma curve (sigma-PV residual)"
    else:
        lo = ns.lo if ns.lo is not None else 0.2
        hi = ns.hi if ns.hi is not None else 10.0
        curve = painleve.macdonald_sigma_curve(ns.z, ns.zp, lo, hi,
                                               n_points=ns.grid, order=ns.order, tol=tol)
        stats = painleve.sigma_form_residual(curve, "piii", (ns.z, ns.zp))
        params = {"z": ns.z, "zp": ns.zp}
        title = "Macdonald determinant sigma curve (sigma-PIII residual)"
    columns = {"x": curve.grid, "d": np.exp(curve.lnd), "ln_d": curve.lnd,
               "sigma": curve.sigma, "sigma_prime": curve.sigma_prime,
               "sigma_second": curve.sigma_second}
    report = {"command": "limits", "family": ns.family, "params": params,
              "table": columns_to_lists(columns),
              "residual": {"max_scaled": stats.max_scaled,
                           "rms_scaled": stats.rms_scaled,
                           "n_points": stats.n_points}}
    _deliver(ns, report, columns, title)
    return 0


def cmd_constant(ns) -> int:
    p = _params_from(ns)
    _check_tol(ns.tol)
    tol = ns.tol or 1e-11
    window = (ns.window_lo, ns.window_hi)
    model = asymptotics.t1_expansion(p)
    conj = asymptotics.conjectured_C(p)
    t1 = 1.0 - window[0]
    curve = painleve.integrate_tau_pvi(p, t0=1e-3, t1=t1, tol=tol, n_grid=ns.grid)
    keep = (1.0 - curve.t >= window[0]) & (1.0 - curve.t <= window[1])
    samples = np.column_stack([curve.t[keep], np.exp(curve.ln_d[keep])])
    rep = asymptotics.extract_constant(samples, model, conjectured=conj, window=window)
    report = {"command": "constant",
              "params": {"z": p.z, "zp": p.z_prime, "w": p.w, "wp": p.w_prime},
              "extracted_C": rep.extracted_C,
              "conjectured_C": rep.conjectured_C,
              "abs_error": rep.abs_error,
              "window": [rep.fit_window[0], rep.fit_window[1]],
              "diagnostics": rep.diagnostics}
    columns = {"tau": 1.0 - samples[:, 0], "d": samples[:, 1]}
    _deliver(ns, report, columns if ns.format == "csv" else None, "constant extraction samples")
    rel = rep.abs_error / abs(conj)
    sys.stderr.write(f"extracted C = {rep.extracted_C:.12g}, conjectured = {conj:.12g}, "
                     f"relative error = {rel:.3e}\n")
    return 0 if rel <= 1e-3 else 1


def cmd_selftest(ns) -> int:
    results, passed = selftest.run_selftest()
    for name, ok, detail in results:
        sys.stdout.write(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}\n")
    report = {"command": "selftest", "passed": passed,
              "checks": [{"name": n, "passed": ok, "detail": d} for n, ok, d in results]}
    out = _resolve_out(ns.out)
    if out is not None:
        emit_json(out, report)
    sys.stdout.write(f"selftest: {'all checks passed' if passed else 'FAILURES present'}\n")
    return 0 if passed else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="taudet",
        description="Fredholm determinants of integrable kernels and Painleve tau functions")
    sub = ap.add_subparsers(dest="command", required=True)

    d = sub.add_parser("det", help="Nystrom determinant table over a t grid")
    _common_flags(d)
    d.add_argument("--t0", type=float, default=0.1)
    d.add_argument("--t1", type=float, default=0.9)
    d.add_argument("--grid", type=int, default=20)
    d.add_argument("--spacing", choices=("linear", "log"), default="linear")
    d.add_argument("--order", type=int, default=64)
    d.set_defaults(func=cmd_det)

    t = sub.add_parser("tau", help="Tracy-Widom ODE route: lnD, sigma, drifts")
    _common_flags(t)
    t.add_argument("--t0", type=float, default=1e-3)
    t.add_argument("--t1", type=float, default=1.0 - 1e-3)
    t.add_argument("--grid", type=int, default=200)
    t.add_argument("--spacing", choices=("linear", "log"), default="log")
    t.add_argument("--order", type=int, default=48,
                   help="quadrature order of the small-t initial state")
    t.set_defaults(func=cmd_tau)

    li = sub.add_parser("limits", help="Whittaker/Macdonald determinant curves and residuals")
    _common_flags(li)
    li.add_argument("--family", choices=("pv", "piii"), default="pv")
    li.add_argument("--lo", type=float, default=None)
    li.add_argument("--hi", type=float, default=None)
    li.add_argument("--grid", type=int, default=240)
    li.add_argument("--order", type=int, default=96)
    li.set_defaults(func=cmd_limits)

    c = sub.add_parser("constant", help="extract the t->1 constant and compare with the conjecture")
    _common_flags(c)
    c.add_argument("--window-lo", type=float, default=1e-3)
    c.add_argument("--window-hi", type=float, default=5e-2)
    c.add_argument("--grid", type=int, default=240)
    c.set_defaults(func=cmd_constant)

    st = sub.add_parser("selftest", help="run the golden self-test suite")
    st.add_argument("--out", type=str, default=None)
    st.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        ns = _merge_config(ns, parser)
    except SystemExit:
        return 2
    try:
        return ns.func(ns)
    except NonConvergence as exc:
        sys.stderr.write(f"numerical nonconvergence: {exc}\n")
        return 3
    except TaudetError as exc:
        sys.stderr.write(f"configuration error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
