"""SVG figures for a construction run."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .numeric import FloatMap  # noqa: E402


def _is_interval(g) -> bool:
    return len(g.edge_ids) == 1 and not g.edge(g.edge_ids[0]).is_loop


def map_graph(h, path: Path):
    eid = h.domain.edge_ids[0]
    xs, ys = [], []
    for s0, s1, _, u0, u1 in h.pieces(eid):
        xs += [float(s0), float(s1)]
        ys += [float(u0), float(u1)]
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.plot(xs, ys, lw=0.3, color="k")
    ax.plot([0, 1], [0, 1], lw=0.5, color="tab:red", ls="--")
    ax.set(xlim=(0, 1), ylim=(0, 1), title=f"h ({h.n_pieces} pieces)", aspect="equal")
    fig.savefig(path)
    plt.close(fig)


def cobweb(h, path: Path, starts=(0.1234, 0.5678, 0.9012), steps: int = 40):
    fm = FloatMap(h)
    eid = h.domain.edge_ids[0]
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.plot([0, 1], [0, 1], lw=0.5, color="0.6")
    for x0 in starts:
        E, T = np.array([eid]), np.array([x0])
        px, py = [x0], [0.0]
        for _ in range(steps):
            _, T2 = fm(E, T)
            y = float(T2[0])
            px += [float(T[0]), y]
            py += [y, y]
            T = T2
        ax.plot(px, py, lw=0.4)
    ax.set(xlim=(0, 1), ylim=(0, 1), title="cobweb of sample orbits", aspect="equal")
    fig.savefig(path)
    plt.close(fig)


def line_plot(xs, ys, path: Path, title: str, ylabel: str, logy: bool = False):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(xs, ys, marker="o")
    if logy:
        ax.set_yscale("log", base=2)
    ax.set(xlabel="stage", ylabel=ylabel, title=title)
    ax.set_xticks(list(xs))
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_all(res, out: Path) -> list:
    from .cli import entropy_table

    out.mkdir(parents=True, exist_ok=True)
    h = res.h_factored if res.h_factored is not None else res.h
    paths = []
    if _is_interval(h.domain):
        paths += [out / "map.svg", out / "cobweb.svg"]
        map_graph(h, paths[0])
        cobweb(h, paths[1])
    rows = entropy_table(res)
    p = out / "entropy.svg"
    line_plot([r["stage"] for r in rows], [r["log_lower"] for r in rows], p, "certified entropy lower bound", "log rho")
    paths.append(p)
    meshes = [float(max(F.diam for F in st.cover)) for st in res.stages]
    p = out / "mesh.svg"
    line_plot(range(len(meshes)), meshes, p, "cover mesh", "mesh", logy=True)
    paths.append(p)
    return paths
