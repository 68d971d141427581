"""Human-readable reports and matplotlib figures for pipeline results."""

from __future__ import annotations

import os
from typing import Iterable

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import networkx as nx  # noqa: E402

from .dynamics import MorseGraph  # noqa: E402
from .pipeline import Analysis  # noqa: E402
from .walls import WallLabeling, wall_direction  # noqa: E402

__all__ = ["plot_morse_graph", "plot_wall_labeling", "render_text", "section"]


def section(title: str, lines: Iterable[str]) -> str:
    """One delimited block of the text report."""
    body = "\n".join(lines)
    return f"==== {title} ====\n{body}\n==== end {title} ====\n"


def _index_text(ci) -> str:
    return "(" + ",".join(str(b) for b in ci) + ")" if ci is not None else "-"


def render_text(res: Analysis, extra: dict[str, list[str]] | None = None) -> str:
    """Text report: Morse nodes, edges, connection matrices and any extra sections."""
    mg = res.morse
    parts = [section("summary", [
        f"model: {res.stg.model}",
        f"dimension: {res.N}",
        f"extents K: {list(res.omega.complex.K)}",
        f"cells: {len(res.stg)}",
        f"edges: {res.stg.edge_count()}",
        f"strongly connected components: {res.grading.size}",
        f"morse nodes: {len(mg.nodes)}",
    ])]
    node_lines = [f"{nd.id}: index {_index_text(nd.conley_index)} cells {len(nd.cells)} "
                  f"[{' '.join(c.text() for c in nd.cells[:6])}{' ...' if len(nd.cells) > 6 else ''}]"
                  for nd in mg.nodes]
    parts.append(section("morse nodes", node_lines))
    parts.append(section("morse edges", [f"{a} -> {b}" for a, b in mg.edges] or ["(none)"]))
    if res.conley is not None:
        mats = res.matrices if res.matrices is not None else [tuple(res.conley.delta)]
        lines = [f"count: {len(mats)}"]
        for t, m in enumerate(mats):
            for k, blk in res.matrix_json(m).items():
                lines.append(f"matrix {t} degree {k} rows {blk['rows']} cols {blk['cols']}")
                lines.extend("  " + " ".join(str(x) for x in row) for row in blk["matrix"])
        parts.append(section("connection matrices", lines))
    for title, lines in (extra or {}).items():
        parts.append(section(title, lines))
    return "".join(parts)


def _layers(mg: MorseGraph) -> dict[int, int]:
    g = nx.DiGraph()
    g.add_nodes_from(nd.id for nd in mg.nodes)
    g.add_edges_from(mg.edges)
    height: dict[int, int] = {}
    for v in reversed(list(nx.topological_sort(g))):
        height[v] = 1 + max((height[w] for w in g.successors(v)), default=-1)
    return height


def plot_morse_graph(mg: MorseGraph, path: str) -> str:
    """Hasse diagram of the Morse graph, higher nodes on top, labeled by id and Conley index."""
    height = _layers(mg)
    by_level: dict[int, list[int]] = {}
    for v, h in sorted(height.items()):
        by_level.setdefault(h, []).append(v)
    pos = {}
    for h, vs in by_level.items():
        for i, v in enumerate(vs):
            pos[v] = (i - (len(vs) - 1) / 2, h)
    width = max((len(vs) for vs in by_level.values()), default=1)
    fig, ax = plt.subplots(figsize=(max(4.0, 1.6 * width), max(3.0, 1.4 * (len(by_level) + 1))))
    for a, b in mg.edges:
        (x0, y0), (x1, y1) = pos[a], pos[b]
        ax.annotate("", xy=(x1, y1 + 0.18), xytext=(x0, y0 - 0.18),
                    arrowprops=dict(arrowstyle="->", color="0.3"))
    for nd in mg.nodes:
        x, y = pos[nd.id]
        ax.text(x, y, f"{nd.id}\n{_index_text(nd.conley_index)}", ha="center", va="center", fontsize=8,
                bbox=dict(boxstyle="round", fc="white", ec="black"))
    ax.set_xlim(-width / 2 - 0.5, width / 2 + 0.5)
    ax.set_ylim(-0.7, len(by_level) - 0.3)
    ax.axis("off")
    ax.set_title("Morse graph")
    fig.tight_layout()
    _save(fig, path)
    return path


def plot_wall_labeling(omega: WallLabeling, path: str, mg: MorseGraph | None = None) -> str:
    """Two-dimensional wall labeling: one arrow per wall, Morse-node top cells shaded."""
    cx = omega.complex
    if cx.N != 2:
        raise ValueError("wall-labeling figures are drawn for two-dimensional complexes only")
    L = cx.limits
    fig, ax = plt.subplots(figsize=(1.2 * L[0] + 1.5, 1.2 * L[1] + 1.5))
    if mg is not None:
        cmap = plt.get_cmap("tab10")
        for nd in mg.nodes:
            for c in nd.cells:
                if c.dim == 2:
                    ax.add_patch(plt.Rectangle(c.v, 1, 1, color=cmap(nd.id % 10), alpha=0.35))
            ax.text(*_centroid(nd.cells), str(nd.id), ha="center", va="center", fontsize=9)
    for i in range(L[0] + 1):
        ax.plot([i, i], [0, L[1]], color="black", lw=0.8)
    for j in range(L[1] + 1):
        ax.plot([0, L[0]], [j, j], color="black", lw=0.8)
    for (xi, mu), s in omega.table.items():
        n = wall_direction(xi)
        side = 1 if xi.v[n] == mu.v[n] else -1      # +1: wall is the lower side of mu
        base = [mu.v[0] + 0.5, mu.v[1] + 0.5]
        base[1 - n] += 0.0
        base[n] = xi.v[n] + 0.18 * side
        d = [0.0, 0.0]
        d[n] = 0.12 * s
        ax.annotate("", xy=(base[0] + d[0], base[1] + d[1]), xytext=(base[0] - d[0], base[1] - d[1]),
                    arrowprops=dict(arrowstyle="->", color="tab:red" if s > 0 else "tab:blue", lw=1.2))
    ax.set_xlim(-0.2, L[0] + 0.2)
    ax.set_ylim(-0.2, L[1] + 0.2)
    ax.set_aspect("equal")
    ax.set_xlabel("x1 (vertex index)")
    ax.set_ylabel("x2 (vertex index)")
    ax.set_title("Wall labeling")
    fig.tight_layout()
    _save(fig, path)
    return path


def _centroid(cells):
    xs = [c.v[0] + c.w[0] / 2 for c in cells]
    ys = [c.v[1] + c.w[1] / 2 for c in cells]
    return sum(xs) / len(xs), sum(ys) / len(ys)


def _save(fig, path: str) -> None:
    tmp = f"{path}.tmp-{os.getpid()}.png"
    try:
        fig.savefig(tmp, dpi=120)
        os.replace(tmp, path)
    finally:
        plt.close(fig)
        if os.path.exists(tmp):
            os.remove(tmp)
