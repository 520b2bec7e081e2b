"""Command-line harness: every study as a subcommand with CSV and SVG output.

Subcommands: painleve | groundstate | spectrum | bs | study.  Configuration is
a key=value text file (--config); results land in --out as CSV files with
fixed column schemas plus a summary.txt, and --plots adds minimal SVG line
plots.  TFP_THREADS caps the worker count; output is byte-identical for a
given config regardless of workers.  Exit codes: 0 success, 1 bad
configuration, 2 first failing stage (named on standard error).
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from ._io import format_float, parallel_map, write_csv
from .corrections import build_corrections
from .groundstate import composite_eta, energy, remainder_study, solve_ground_state
from .painleve import solve_hastings_mcleod, w0_min
from .semiclassics import bs_eigenvalue, from_solution
from .spectrum import assemble_M0, eig_smallest, scaling_study


class ConfigError(ValueError):
    """Invalid configuration: unknown key, bad value, or failed precondition."""


_DEFAULTS = {
    "dimension": 1,
    "eps": (0.1, 0.05, 0.025),
    "order": 2,
    "y_min": -20.0,
    "y_max": 40.0,
    "n_nodes": 6001,
    "tol": 1e-10,
    "gs_tol": 1e-8,
    "eig_tol": 1e-10,
    "nodes_per_layer": 40,
    "r_max": 2.5,
    "n_pairs": 3,
    "bs_levels": (1, 2, 3, 4, 5, 6, 7, 8),
    "out_dir": None,
}


def _parse_value(key: str, raw: str):
    try:
        if key in ("dimension", "order", "n_nodes", "nodes_per_layer", "n_pairs"):
            return int(raw)
        if key in ("y_min", "y_max", "tol", "gs_tol", "eig_tol", "r_max"):
            return float(raw)
        if key == "eps":
            return tuple(float(p) for p in raw.split(",") if p.strip())
        if key == "bs_levels":
            return tuple(int(p) for p in raw.split(",") if p.strip())
        if key == "out_dir":
            return raw
    except ValueError:
        raise ConfigError(f"bad value {raw!r} for key {key!r}") from None
    raise ConfigError(f"unknown configuration key {key!r}")


def load_config(path: str | None) -> dict:
    """Defaults overridden by key=value lines; '#' starts a comment."""
    cfg = dict(_DEFAULTS)
    if path is None:
        return cfg
    try:
        with open(path) as f:
            lines = f.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ConfigError(f"line {lineno}: expected key=value, got {text!r}")
        key, raw = (part.strip() for part in text.split("=", 1))
        if key not in _DEFAULTS:
            raise ConfigError(f"unknown configuration key {key!r}")
        cfg[key] = _parse_value(key, raw)
    return cfg


def validate_config(cfg: dict) -> None:
    """Check every numeric value against the module preconditions up front."""
    if cfg["dimension"] not in (1, 2, 3):
        raise ConfigError(f"dimension must be 1, 2 or 3, got {cfg['dimension']}")
    if not cfg["eps"]:
        raise ConfigError("eps list is empty")
    for e in cfg["eps"]:
        if not 0.0 < e <= 0.5:
            raise ConfigError(f"eps values must lie in (0, 0.5], got {e}")
    if not 0 <= cfg["order"] <= 3:
        raise ConfigError(f"order must be between 0 and 3, got {cfg['order']}")
    if cfg["y_min"] > -15.0 or cfg["y_max"] < 30.0:
        raise ConfigError(
            f"layer grid [{cfg['y_min']}, {cfg['y_max']}] must cover [-15, 30]"
        )
    if cfg["n_nodes"] < 2000:
        raise ConfigError(f"n_nodes must be at least 2000, got {cfg['n_nodes']}")
    for key in ("tol", "gs_tol", "eig_tol"):
        if not cfg[key] > 0.0:
            raise ConfigError(f"{key} must be positive, got {cfg[key]}")
    if cfg["nodes_per_layer"] < 20:
        raise ConfigError(f"nodes_per_layer must be at least 20, got {cfg['nodes_per_layer']}")
    if cfg["r_max"] < 2.0:
        raise ConfigError(f"r_max must be at least 2, got {cfg['r_max']}")
    if not 1 <= cfg["n_pairs"] <= 8:
        raise ConfigError(f"n_pairs must be between 1 and 8, got {cfg['n_pairs']}")
    if not cfg["bs_levels"] or any(n < 1 for n in cfg["bs_levels"]):
        raise ConfigError(f"bs_levels must be positive integers, got {cfg['bs_levels']}")


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _svg_plot(path, title, series, logx=False, logy=False):
    """Minimal SVG polyline plot: axes box, series, and a text legend."""
    width, height = 640, 480
    ml, mr, mt, mb = 60, 20, 40, 40
    xs_all, ys_all = [], []
    clean = []
    for name, xs, ys in series:
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        keep = np.isfinite(xs) & np.isfinite(ys)
        if logx:
            keep &= xs > 0.0
        if logy:
            keep &= ys > 0.0
        xs, ys = xs[keep], ys[keep]
        if xs.size == 0:
            continue
        px = np.log10(xs) if logx else xs
        py = np.log10(ys) if logy else ys
        clean.append((name, px, py))
        xs_all.append(px)
        ys_all.append(py)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.0f}" y="24" text-anchor="middle" font-size="16">{title}</text>',
        f'<rect x="{ml}" y="{mt}" width="{width - ml - mr}" height="{height - mt - mb}" '
        'fill="none" stroke="black"/>',
    ]
    if clean:
        x0 = min(float(p.min()) for p in xs_all)
        x1 = max(float(p.max()) for p in xs_all)
        y0 = min(float(p.min()) for p in ys_all)
        y1 = max(float(p.max()) for p in ys_all)
        if x1 == x0:
            x0, x1 = x0 - 0.5, x1 + 0.5
        if y1 == y0:
            y0, y1 = y0 - 0.5, y1 + 0.5
        pad_x, pad_y = 0.03 * (x1 - x0), 0.05 * (y1 - y0)
        x0, x1 = x0 - pad_x, x1 + pad_x
        y0, y1 = y0 - pad_y, y1 + pad_y

        def to_px(px, py):
            sx = ml + (px - x0) / (x1 - x0) * (width - ml - mr)
            sy = height - mb - (py - y0) / (y1 - y0) * (height - mt - mb)
            return sx, sy

        for i, (name, px, py) in enumerate(clean):
            sx, sy = to_px(px, py)
            pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(sx, sy))
            color = _COLORS[i % len(_COLORS)]
            parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
            parts.append(
                f'<text x="{width - mr - 10}" y="{mt + 18 + 16 * i}" text-anchor="end" '
                f'font-size="12" fill="{color}">{name}</text>'
            )
        for val, sx in ((x0, ml), (x1, width - mr)):
            label = f"{10.0 ** val:.3g}" if logx else f"{val:.3g}"
            parts.append(
                f'<text x="{sx}" y="{height - mb + 18}" text-anchor="middle" font-size="12">{label}</text>'
            )
        for val, sy in ((y0, height - mb), (y1, mt)):
            label = f"{10.0 ** val:.3g}" if logy else f"{val:.3g}"
            parts.append(
                f'<text x="{ml - 6}" y="{sy + 4}" text-anchor="end" font-size="12">{label}</text>'
            )
    parts.append("</svg>")
    tmp = f"{path}.tmp"
    with open(tmp, "w") as f:
        f.write("\n".join(parts) + "\n")
    os.replace(tmp, path)


def _write_summary(path, pairs) -> None:
    lines = [f"{key}={format_float(val) if isinstance(val, float) else val}" for key, val in pairs]
    tmp = f"{path}.tmp"
    with open(tmp, "w") as f:
        f.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


class _Stages:
    """Runs named stages so a failure can be reported as 'stage X failed'."""

    def __init__(self):
        self.current = None

    def run(self, name, fn):
        self.current = name
        return fn()


def _solve_painleve(cfg):
    return solve_hastings_mcleod(
        y_min=cfg["y_min"], y_max=cfg["y_max"], n_nodes=cfg["n_nodes"], tol=cfg["tol"]
    )


def cmd_painleve(cfg, out, plots, stages) -> None:
    sol = stages.run("painleve", lambda: _solve_painleve(cfg))
    stages.current = "output"
    sol.to_csv(os.path.join(out, "painleve.csv"))
    wloc, wmin = w0_min(sol)
    _write_summary(
        os.path.join(out, "summary.txt"),
        [
            ("nu0_at_0", float(sol.interp_nu0(0.0))),
            ("W_min", wmin),
            ("W_min_location", wloc),
            ("residual_max", sol.residual_max),
            ("newton_iterations", sol.newton_iterations),
        ],
    )
    if plots:
        y = sol.grid.nodes
        _svg_plot(
            os.path.join(out, "painleve.svg"),
            "Connection profile and layer potential",
            [("nu0", y, sol.nu0), ("W0", y, sol.w0)],
        )


def cmd_groundstate(cfg, out, plots, stages) -> None:
    d = cfg["dimension"]
    sol = stages.run("painleve", lambda: _solve_painleve(cfg))
    cset = stages.run(
        "corrections", lambda: build_corrections(sol, d, order=max(cfg["order"], 1))
    )

    def one(eps):
        gs = solve_ground_state(
            eps, d, tol=cfg["gs_tol"], r_max=cfg["r_max"],
            nodes_per_layer=cfg["nodes_per_layer"], painleve_sol=sol, correction_set=cset,
        )
        comp = composite_eta(sol, cset, eps, gs.grid.nodes)
        return gs, comp

    eps_list = sorted(set(cfg["eps"]), reverse=True)
    results = stages.run("groundstate", lambda: parallel_map(one, eps_list))
    stages.current = "output"
    summary = []
    for eps, (gs, comp) in zip(eps_list, results):
        gs.to_csv(os.path.join(out, f"groundstate_d{d}_eps{eps:g}.csv"), composite=comp)
        summary.append((f"energy_eps{eps:g}", energy(gs)))
        summary.append((f"residual_eps{eps:g}", gs.residual_max))
    _write_summary(os.path.join(out, "summary.txt"), summary)
    if plots:
        series = [
            (f"eta eps={eps:g}", gs.grid.nodes, gs.eta) for eps, (gs, _) in zip(eps_list, results)
        ]
        _svg_plot(os.path.join(out, "groundstate.svg"), f"Ground states, d={d}", series)


def cmd_spectrum(cfg, out, plots, stages) -> None:
    sol = stages.run("painleve", lambda: _solve_painleve(cfg))
    cset = stages.run("corrections", lambda: build_corrections(sol, 1, order=max(cfg["order"], 1)))
    table = stages.run(
        "scaling",
        lambda: scaling_study(
            sol, cset, cfg["eps"], n_pairs=cfg["n_pairs"],
            nodes_per_layer=cfg["nodes_per_layer"], gs_tol=cfg["gs_tol"], eig_tol=cfg["eig_tol"],
        ),
    )
    stages.current = "output"
    table.to_csv(os.path.join(out, "spectrum.csv"))
    mu = table.mu[: cfg["n_pairs"]]
    _write_summary(
        os.path.join(out, "summary.txt"),
        [(f"mu_{i + 1}", float(m)) for i, m in enumerate(mu)],
    )
    if plots:
        series = []
        for i in range(cfg["n_pairs"]):
            pick = table.n == i + 1
            series.append((f"scaled odd n={i + 1}", table.eps[pick], table.scaled_odd[pick]))
            series.append((f"scaled even n={i + 1}", table.eps[pick], table.scaled_even[pick]))
        _svg_plot(os.path.join(out, "spectrum.svg"), "Scaled eigenvalues vs eps", series)


def cmd_bs(cfg, out, plots, stages) -> None:
    sol = stages.run("painleve", lambda: _solve_painleve(cfg))
    levels = tuple(sorted(set(cfg["bs_levels"])))

    def table():
        profile = from_solution(sol)
        mu_bs = np.array([bs_eigenvalue(profile, n) for n in levels])
        report = eig_smallest(assemble_M0(sol), max(levels), tol=cfg["eig_tol"], label="M0")
        mu_m0 = np.array([report.eigenvalues[n - 1] for n in levels])
        return mu_bs, mu_m0

    mu_bs, mu_m0 = stages.run("bs", table)
    stages.current = "output"
    rel = np.abs(mu_bs - mu_m0) / mu_m0
    write_csv(
        os.path.join(out, "bs.csv"),
        ["n", "mu_bs", "mu_m0", "rel_err"],
        [np.asarray(levels, dtype=float), mu_bs, mu_m0, rel],
    )
    _write_summary(os.path.join(out, "summary.txt"), [("max_rel_err", float(rel.max()))])
    if plots:
        ns = np.asarray(levels, dtype=float)
        _svg_plot(
            os.path.join(out, "bs.svg"),
            "Bohr-Sommerfeld vs layer operator",
            [("mu_bs", ns, mu_bs), ("mu_m0", ns, mu_m0)],
        )


def cmd_study(cfg, out, plots, stages) -> None:
    d = cfg["dimension"]
    sol = stages.run("painleve", lambda: _solve_painleve(cfg))
    sol.to_csv(os.path.join(out, "painleve.csv"))
    order = max(cfg["order"], 1)
    cset = stages.run("corrections", lambda: build_corrections(sol, d, order=order))
    cset.to_csv(os.path.join(out, "corrections.csv"))
    remainder = stages.run(
        "remainder",
        lambda: remainder_study(sol, cset, cfg["eps"], d, nodes_per_layer=80),
    )
    remainder.to_csv(os.path.join(out, "remainder.csv"))
    cset1 = cset if d == 1 else stages.run(
        "corrections", lambda: build_corrections(sol, 1, order=order)
    )
    scaling = stages.run(
        "scaling",
        lambda: scaling_study(
            sol, cset1, cfg["eps"], n_pairs=cfg["n_pairs"],
            nodes_per_layer=cfg["nodes_per_layer"], gs_tol=cfg["gs_tol"], eig_tol=cfg["eig_tol"],
        ),
    )
    scaling.to_csv(os.path.join(out, "scaling.csv"))

    def bs_table():
        profile = from_solution(sol)
        levels = tuple(sorted(set(cfg["bs_levels"])))
        mu_bs = np.array([bs_eigenvalue(profile, n) for n in levels])
        report = eig_smallest(assemble_M0(sol), max(levels), tol=cfg["eig_tol"], label="M0")
        mu_m0 = np.array([report.eigenvalues[n - 1] for n in levels])
        return levels, mu_bs, mu_m0

    levels, mu_bs, mu_m0 = stages.run("bs", bs_table)
    stages.current = "output"
    write_csv(
        os.path.join(out, "bs.csv"),
        ["n", "mu_bs", "mu_m0", "rel_err"],
        [np.asarray(levels, dtype=float), mu_bs, mu_m0, np.abs(mu_bs - mu_m0) / mu_m0],
    )
    _write_summary(
        os.path.join(out, "summary.txt"),
        [
            ("dimension", d),
            ("order", order),
            ("remainder_fit_order", remainder.fit_order),
            ("mu_1", float(scaling.mu[0])),
        ],
    )
    if plots:
        _svg_plot(
            os.path.join(out, "remainder.svg"),
            f"Composite remainder, d={d}, N={order}",
            [("sup error", remainder.eps, remainder.err)],
            logx=True,
            logy=True,
        )
        series = []
        for i in range(cfg["n_pairs"]):
            pick = scaling.n == i + 1
            series.append((f"scaled odd n={i + 1}", scaling.eps[pick], scaling.scaled_odd[pick]))
            series.append((f"scaled even n={i + 1}", scaling.eps[pick], scaling.scaled_even[pick]))
        _svg_plot(os.path.join(out, "scaling.svg"), "Scaled eigenvalues vs eps", series)


_COMMANDS = {
    "painleve": cmd_painleve,
    "groundstate": cmd_groundstate,
    "spectrum": cmd_spectrum,
    "bs": cmd_bs,
    "study": cmd_study,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="tfp",
        description="Boundary-layer studies of the trapped ground state: "
        "connection profile, composite expansion, spectra, Bohr-Sommerfeld.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="key=value configuration file")
        p.add_argument("--out", default="tfp_out", help="output directory")
        p.add_argument("--plots", action="store_true", help="also write SVG plots")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
        validate_config(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1

    out = cfg["out_dir"] or args.out
    stages = _Stages()
    try:
        os.makedirs(out, exist_ok=True)
        _COMMANDS[args.command](cfg, out, args.plots, stages)
    except Exception as exc:  # noqa: BLE001 - every stage failure maps to exit 2
        stage = stages.current or "setup"
        print(f"stage {stage} failed: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
