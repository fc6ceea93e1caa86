"""Figure rendering: Wigner heatmaps and peak-decay curves with fit overlays."""

from __future__ import annotations

import argparse
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import (FitData, SchemaError, SweepData, read_fit_manifest,
                 read_sweep_csv, read_wigner_csv)

__all__ = ["render_wigner", "render_decay", "main_wigner", "main_decay"]

DPI = 200
_SERIES_STYLE = {
    "left": dict(marker="^", color="tab:blue", label="left CS peak"),
    "right": dict(marker="v", color="tab:green", label="right CS peak"),
    "central": dict(marker="o", color="tab:red", label="central negative peak"),
}


def render_wigner(grid_csv, out_png) -> None:
    """Heatmap of a Wigner grid with a diverging colormap centered at zero."""
    data = read_wigner_csv(grid_csv)
    vlim = float(np.abs(data.values).max()) or 1.0
    fig, ax = plt.subplots(figsize=(5.2, 4.2))
    mesh = ax.pcolormesh(data.x_axis, data.p_axis, data.values.T,
                         cmap="RdBu_r", vmin=-vlim, vmax=vlim,
                         shading="nearest", rasterized=True)
    fig.colorbar(mesh, ax=ax, label="W(x, p)")
    ax.set_xlim(data.x_axis[0], data.x_axis[-1])
    ax.set_ylim(data.p_axis[0], data.p_axis[-1])
    ax.set_xlabel("x")
    ax.set_ylabel("p")
    ax.set_title(f"t = {data.meta.get('time', 0):.4g} a.u., "
                 f"delta = {data.meta.get('delta', 0):.4g} a.u.")
    fig.tight_layout()
    fig.savefig(out_png, dpi=DPI)
    plt.close(fig)


def _exponential_overlay(ax, sweep: SweepData, fit: FitData) -> None:
    if fit.model != "exponential":
        raise SchemaError(f"coupling sweep needs an exponential fit manifest, "
                          f"got {fit.model!r}")
    grid = np.linspace(sweep.axis[0], sweep.axis[-1], 400)
    ax.plot(grid, fit.params["A"] * np.exp(-fit.params["c"] * grid / 1e3),
            color="k", lw=1.2, label="fit A exp(-c delta)")
    ax.set_xlabel("delta (a.u.)")


def _bose_model(params: dict, T: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        occ = 1.0 / np.expm1(np.minimum(params["T_c"] / T, 700.0))
    return params["a"] * np.exp(-params["b"] * occ)


def _bose_overlay(fig, ax, sweep: SweepData, fit: FitData) -> None:
    if fit.model != "bose":
        raise SchemaError(f"temperature sweep needs a bose fit manifest, "
                          f"got {fit.model!r}")
    grid = np.linspace(max(sweep.axis[0], 1e-6), sweep.axis[-1], 400)
    ax.plot(grid, _bose_model(fit.params, grid), color="k", lw=1.2,
            label="fit a exp{-b/[exp(T_c/T)-1]}")
    ax.set_xlabel("T (hbar w01 / kB)")
    # inset magnifying the region around the critical temperature
    t_hi = 2.0 * fit.params["T_c"]
    inset = ax.inset_axes([0.52, 0.14, 0.42, 0.42])
    near = sweep.axis <= t_hi
    inset.scatter(sweep.axis[near], np.abs(sweep.series["central"][near]),
                  s=12, color="tab:red")
    fine = np.linspace(max(sweep.axis[0], 1e-6), t_hi, 200)
    inset.plot(fine, _bose_model(fit.params, fine), color="k", lw=1.0)
    inset.set_xlim(0.0, t_hi)
    inset.set_title("near T_c", fontsize=8)
    inset.tick_params(labelsize=7)


def render_decay(sweep_csv, manifest_path, out_png) -> None:
    """Scatter of sweep amplitudes with the fitted decay law drawn on top.

    The overlay always evaluates the parameters stored in the fit manifest;
    nothing is re-fitted here.
    """
    sweep = read_sweep_csv(sweep_csv)
    fit = read_fit_manifest(manifest_path)
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    for name, values in sweep.series.items():
        ax.scatter(sweep.axis, np.abs(values), s=18, **_SERIES_STYLE[name])
    if sweep.kind == "delta":
        _exponential_overlay(ax, sweep, fit)
    else:
        _bose_overlay(fig, ax, sweep, fit)
    ax.set_ylabel("|peak amplitude|")
    ax.legend(fontsize=8, loc="upper right")
    fig.tight_layout()
    fig.savefig(out_png, dpi=DPI)
    plt.close(fig)


def main_wigner(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render_wigner",
        description="Render a Wigner grid CSV as a PNG heatmap (200 dpi)")
    parser.add_argument("grid_csv")
    parser.add_argument("out_png")
    args = parser.parse_args(argv)
    try:
        render_wigner(args.grid_csv, args.out_png)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    return 0


def main_decay(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render_decay",
        description="Render a sweep CSV plus fit manifest as a PNG (200 dpi)")
    parser.add_argument("sweep_csv")
    parser.add_argument("manifest")
    parser.add_argument("out_png")
    args = parser.parse_args(argv)
    try:
        render_decay(args.sweep_csv, args.manifest, args.out_png)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main_wigner())
