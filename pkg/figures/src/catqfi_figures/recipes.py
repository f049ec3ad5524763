"""One builder per figure panel, all consuming sweep CSVs only."""
from __future__ import annotations

import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import TwoSlopeNorm

from .schema import SchemaError, read_rows, require_experiment, series

# identical bytes across reruns: salt the SVG element ids and drop
# creation timestamps when saving (see render below)
plt.rcParams["svg.hashsalt"] = "catqfi-figures"

STYLE = {
    "coherent": dict(color="0.5", ls=":"),
    "even": dict(color="tab:green", ls="-."),
    "odd": dict(color="tab:red", ls="--"),
    "hhg": dict(color="tab:blue", ls="-"),
}
LABEL = {"coherent": "coherent", "even": "even cat", "odd": "odd cat",
         "hhg": "HHG-cat"}

FIGSIZE = (4.8, 3.4)


def crossover_eta(eta, diff):
    """First sign change of diff along eta, refined by linear interpolation."""
    sign = np.sign(diff)
    hits = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    if len(hits) == 0:
        return None
    k = int(hits[0])
    y0, y1 = float(diff[k]), float(diff[k + 1])
    return float(eta[k]) - y0 * (float(eta[k + 1]) - float(eta[k])) / (y1 - y0)


def _partner_state(rows):
    """The single parity series swept alongside hhg."""
    others = sorted({r.state for r in rows} - {"hhg"})
    if len(others) != 1:
        raise SchemaError(
            f"expected one parity series alongside hhg, found {others}")
    return others[0]


def _nearest(values, target):
    return min(values, key=lambda v: abs(v - target))


def build_purity(data):
    rows = data["purity.csv"]
    fig, ax = plt.subplots(figsize=FIGSIZE)
    for state in ("coherent", "even", "odd", "hhg"):
        if not any(r.state == state for r in rows):
            continue
        xs, ys = series(rows, state, "eta")
        ax.plot(xs, ys, label=LABEL[state], **STYLE[state])
    ax.legend(frameon=False)
    return fig, {}


def build_fidelity(data):
    rows = data["fidelity.csv"]
    fig, ax = plt.subplots(figsize=FIGSIZE)
    for state in ("even", "odd", "hhg"):
        if not any(r.state == state for r in rows):
            continue
        xs, ys = series(rows, state, "eta")
        ax.plot(xs, ys, label=LABEL[state], **STYLE[state])
    eta_odd, f_odd = series(rows, "odd", "eta")
    eta_hhg, f_hhg = series(rows, "hhg", "eta")
    if len(eta_odd) != len(eta_hhg) or np.max(np.abs(eta_odd - eta_hhg)) > 0:
        raise SchemaError("fidelity.csv: odd and hhg eta grids differ")
    x = crossover_eta(eta_odd, f_hhg - f_odd)
    if x is not None:
        ax.axvline(x, color="k", ls="--", lw=0.9)
        ax.annotate(f"$\\eta = {x:.3f}$", (x, 0.55), xytext=(4, 0),
                    textcoords="offset points", fontsize=8)
    ax.legend(frameon=False)
    return fig, {"crossover": x}


def build_qfi_ratio(data):
    rows = data["qfi-ratio.csv"]
    parity = _partner_state(rows)
    fig, ax = plt.subplots(figsize=FIGSIZE)
    for state in (parity, "hhg"):
        xs, ys = series(rows, state, "eta")
        ax.plot(xs, ys, label=LABEL[state], **STYLE[state])
    chi = rows[0].chi
    ax.set_title(f"$\\chi = {chi:.3f}$", fontsize=9)
    ax.legend(frameon=False)
    return fig, {}


def build_delta_map(data):
    rows = data["qfi-map.csv"]
    etas = sorted({r.eta for r in rows})
    chis = sorted({r.chi for r in rows})
    ei = {e: i for i, e in enumerate(etas)}
    ci = {c: i for i, c in enumerate(chis)}
    z = np.full((len(chis), len(etas)), np.nan)
    for r in rows:
        z[ci[r.chi], ei[r.eta]] = r.value
    if np.isnan(z).any():
        raise SchemaError("qfi-map.csv: (eta, chi) grid is incomplete")
    span = max(float(np.max(np.abs(z))), 1e-12)
    norm = TwoSlopeNorm(vcenter=0.0, vmin=-span, vmax=span)
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    mesh = ax.pcolormesh(etas, chis, z, norm=norm, cmap="RdBu_r",
                         shading="nearest", rasterized=True)
    if np.min(z) < 0.0 < np.max(z):
        ax.contour(etas, chis, z, levels=[0.0], colors="k", linewidths=0.7)
    fig.colorbar(mesh, ax=ax, label=r"$\Delta\mathcal{F}(\eta, \chi)$")
    return fig, {}


def build_chi_derivative(data):
    rows = data["chi-derivative.csv"]
    parity = _partner_state(rows)
    etas = sorted({r.eta for r in rows})
    fig, ax = plt.subplots(figsize=FIGSIZE)
    for target, ls in ((0.99, "-"), (0.9, "--")):
        eta = _nearest(etas, target)
        for state in (parity, "hhg"):
            sel = [r for r in rows if r.state == state and r.eta == eta]
            xs = np.array([r.chi for r in sel])
            ys = np.array([r.value for r in sel])
            order = np.argsort(xs)
            ax.plot(xs[order], ys[order], color=STYLE[state]["color"], ls=ls,
                    label=f"{LABEL[state]}, $\\eta = {eta:g}$")
    ax.legend(frameon=False, fontsize=8)
    return fig, {}


def build_pure_gain(data):
    rows = data["pure-qfi.csv"]
    parity = _partner_state(rows)
    a_par, f_par = series(rows, parity, "alpha")
    a_hhg, f_hhg = series(rows, "hhg", "alpha")
    if len(a_par) != len(a_hhg):
        raise SchemaError("pure-qfi.csv: parity and hhg series lengths differ")
    # rows are paired by target photon number; the parity amplitude squared
    # is that target to within the cat-state correction
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.plot(a_par ** 2, f_hhg / f_par, color="tab:blue", ls="-")
    return fig, {}


def _sensitivity_panel(data, y_field):
    rows = data["loss-sensitivity.csv"]
    a_coh, _ = series(rows, "coherent", "alpha")
    fig, ax = plt.subplots(figsize=FIGSIZE)
    for state in ("coherent", "even", "odd", "hhg"):
        _, ys = series(rows, state, "alpha", y_field)
        if len(ys) != len(a_coh):
            raise SchemaError(
                "loss-sensitivity.csv: family series lengths differ")
        # coherent amplitude squared equals the common target <n> exactly
        ax.plot(a_coh ** 2, ys, label=LABEL[state], **STYLE[state])
    ax.legend(frameon=False)
    return fig, {}


def build_purity_slope(data):
    return _sensitivity_panel(data, "value")


def build_fidelity_slope(data):
    return _sensitivity_panel(data, "value2")


@dataclass(frozen=True)
class FigureRecipe:
    """Plumbing for one panel: inputs, builder, axis dressing, output stem."""

    figure: str
    inputs: tuple
    builder: object
    stem: str
    xlabel: str
    ylabel: str
    xlim: tuple | None = None
    ylim: tuple | None = None


RECIPES = {r.figure: r for r in (
    FigureRecipe("1a", ("purity.csv",), build_purity, "fig1a_purity",
                 r"$\eta$", r"purity $\gamma^\eta$", (0.0, 1.0), (0.0, 1.02)),
    FigureRecipe("1b", ("fidelity.csv",), build_fidelity, "fig1b_fidelity",
                 r"$\eta$", r"fidelity $F(\eta)$", (0.0, 1.0), (0.0, 1.02)),
    FigureRecipe("2", ("qfi-ratio.csv",), build_qfi_ratio, "fig2_qfi_ratio",
                 r"$\eta$", r"$\mathcal{F}(\eta)/\mathcal{F}$"),
    FigureRecipe("3", ("qfi-map.csv",), build_delta_map, "fig3_delta_map",
                 r"$\eta$", r"$\chi$"),
    FigureRecipe("4", ("chi-derivative.csv",), build_chi_derivative,
                 "fig4_chi_derivative", r"$\chi$",
                 r"$\partial_\chi[\mathcal{F}(\eta)/\mathcal{F}]$"),
    FigureRecipe("5", ("pure-qfi.csv",), build_pure_gain, "fig5_pure_gain",
                 r"$\langle \hat N \rangle$",
                 r"$\mathcal{F}_{\mathrm{HHG}} / \mathcal{F}_{\pm}$"),
    FigureRecipe("6a", ("loss-sensitivity.csv",), build_purity_slope,
                 "fig6a_purity_slope", r"$\langle \hat N \rangle$",
                 r"$\partial_\eta \gamma|_{\eta=1}$"),
    FigureRecipe("6b", ("loss-sensitivity.csv",), build_fidelity_slope,
                 "fig6b_fidelity_slope", r"$\langle \hat N \rangle$",
                 r"$\partial_\eta F|_{\eta=1}$"),
)}


def render(figure, data_dir, out_dir):
    """Build one panel and write <stem>.svg plus <stem>.png under out_dir."""
    if figure not in RECIPES:
        raise SchemaError(f"unknown figure id {figure!r}")
    recipe = RECIPES[figure]
    data = {}
    for name in recipe.inputs:
        path = os.path.join(data_dir, name)
        rows = read_rows(path)
        require_experiment(rows, os.path.splitext(name)[0], path)
        data[name] = rows
    fig, extras = recipe.builder(data)
    ax = fig.axes[0]
    ax.set_xlabel(recipe.xlabel)
    ax.set_ylabel(recipe.ylabel)
    if recipe.xlim:
        ax.set_xlim(*recipe.xlim)
    if recipe.ylim:
        ax.set_ylim(*recipe.ylim)
    fig.tight_layout()
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for ext in ("svg", "png"):
        path = os.path.join(out_dir, f"{recipe.stem}.{ext}")
        fig.savefig(path, metadata={"Date": None} if ext == "svg" else None,
                    dpi=160)
        written.append(path)
    plt.close(fig)
    return {"files": written, **extras}
