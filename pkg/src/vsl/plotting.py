"""PNG figures rendered next to the CSV outputs."""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .optimizer import StopReason  # noqa: E402

_STYLE = {
    "figure.dpi": 110,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def _solution_1d(out, directory: Path) -> list[Path]:
    x = out.points[:, 0]
    fig, (ax_u, ax_e) = plt.subplots(1, 2, figsize=(9, 3.4))
    ax_u.plot(x, out.u_exact, "k-", lw=2.5, alpha=0.35, label="exact")
    for r in out.results:
        ax_u.plot(x, r.values, lw=1, label=r.label)
        err = np.abs(r.values - out.u_exact)
        ax_e.semilogy(x, np.maximum(err, 1e-17), lw=1, label=r.label)
    ax_u.set_xlabel("x")
    ax_u.set_ylabel("u")
    ax_u.legend(frameon=False)
    ax_e.set_xlabel("x")
    ax_e.set_ylabel("|u - u*|")
    ax_e.legend(frameon=False)
    return [_save(fig, directory / "solution.png")]


def _solution_2d(out, directory: Path) -> list[Path]:
    n = out.grid_shape[0]
    g = out.points[:, 0].reshape(out.grid_shape)
    h = out.points[:, 1].reshape(out.grid_shape)
    panels = [("exact", out.u_exact)] + [(r.label, r.values) for r in out.results]
    errs = [(r.label, np.abs(r.values - out.u_exact)) for r in out.results]
    fig, axes = plt.subplots(2, len(panels), figsize=(3.2 * len(panels), 6), squeeze=False)
    for ax, (name, v) in zip(axes[0], panels):
        cs = ax.contourf(g, h, v.reshape(n, n), levels=20)
        fig.colorbar(cs, ax=ax, shrink=0.8)
        ax.set_title(name)
        ax.set_aspect("equal")
    axes[1][0].axis("off")
    for ax, (name, e) in zip(axes[1][1:], errs):
        cs = ax.contourf(g, h, np.log10(np.maximum(e, 1e-17)).reshape(n, n), levels=20)
        fig.colorbar(cs, ax=ax, shrink=0.8)
        ax.set_title(f"log10 |error|, {name}")
        ax.set_aspect("equal")
    return [_save(fig, directory / "solution.png")]


def _history(result, path: Path) -> Path:
    hist = result.history
    epoch = hist.column("epoch")
    fig, axes = plt.subplots(1, 3, figsize=(11, 3.2))
    axes[0].semilogy(epoch, np.abs(hist.column("objective")), label="objective")
    axes[0].semilogy(epoch, np.abs(hist.column("energy")), lw=0.8, label="energy")
    if np.any(hist.column("ic_loss")):
        axes[0].semilogy(epoch, hist.column("ic_loss"), lw=0.8, label="ic loss")
    axes[0].legend(frameon=False)
    axes[1].semilogy(epoch, hist.column("diag_residual"))
    axes[1].set_ylabel("diagnostic residual")
    if result.details.get("returned_epoch") is not None:
        axes[1].axvline(result.details["returned_epoch"], color="k", ls=":", lw=0.8)
    if hist.stop_reason is StopReason.RESIDUAL_TOL:
        axes[1].set_title("stopped on residual tolerance")
    axes[2].plot(epoch, hist.column("lr"))
    axes[2].set_ylabel("learning rate")
    for ax in axes:
        ax.set_xlabel("epoch")
    fig.suptitle(result.label)
    return _save(fig, path)


def _compare(out, path: Path) -> Path:
    labels = [r.label for r in out.results]
    l2 = [max(r.errors.l2_rel, 1e-17) for r in out.results]
    linf = [max(r.errors.linf_rel, 1e-17) for r in out.results]
    pos = np.arange(len(labels))
    fig, ax = plt.subplots(figsize=(1.6 * len(labels) + 2.5, 3.2))
    ax.bar(pos - 0.2, l2, 0.4, label="relative L2")
    ax.bar(pos + 0.2, linf, 0.4, label="relative Linf")
    ax.set_yscale("log")
    ax.set_xticks(pos, labels)
    ax.legend(frameon=False)
    return _save(fig, path)


def render_figures(out, directory, compare: bool = False) -> list[Path]:
    directory = Path(directory)
    with plt.rc_context(_STYLE):
        if out.spec.id.space_dim == 1:
            paths = _solution_1d(out, directory)
        else:
            paths = _solution_2d(out, directory)
        vsl = [r for r in out.results if r.history is not None and len(r.history)]
        for i, r in enumerate(vsl):
            name = "history.png" if i == 0 else f"history_{r.label}.png"
            paths.append(_history(r, directory / name))
        if compare:
            paths.append(_compare(out, directory / "compare.png"))
    return paths
