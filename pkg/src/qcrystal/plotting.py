"""PNG renderings for the report commands (matplotlib, Agg backend)."""

from __future__ import annotations

from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .crystal import CrystalGraph, alpha_tag  # noqa: E402

_SAVE = {"format": "png", "dpi": 100, "metadata": {"Software": None}}


def plot_dims(rows, path, title: str = "") -> None:
    """Bar chart of dim V_{lambda-alpha} and #B per alpha."""
    labels = [alpha_tag(a) for a, _, _ in rows]
    dims = [d for _, d, _ in rows]
    counts = [c for _, _, c in rows]
    xs = range(len(rows))
    fig, ax = plt.subplots(figsize=(max(4.0, 0.45 * len(rows)), 3.2))
    ax.bar([x - 0.2 for x in xs], dims, width=0.4, label="dim")
    ax.bar([x + 0.2 for x in xs], counts, width=0.4, label="#B")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels, rotation=60, fontsize=7)
    ax.set_ylabel("multiplicity")
    if title:
        ax.set_title(title)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, **_SAVE)
    plt.close(fig)


def plot_crystal(graph: CrystalGraph, path, title: str = "") -> None:
    """Layered drawing: one row per height, arrows colored by index."""
    levels = defaultdict(list)
    for node in graph.ordered().nodes:
        levels[sum(node.alpha)].append(node)
    pos = {}
    for h, nodes in levels.items():
        for k, node in enumerate(nodes):
            pos[node.id] = (k - (len(nodes) - 1) / 2.0, -h)
    width = max((len(v) for v in levels.values()), default=1)
    fig, ax = plt.subplots(figsize=(max(3.0, 1.1 * width), max(2.5, 1.0 * len(levels))))
    cmap = plt.get_cmap("tab10")
    for src, dst, i in sorted(graph.edges):
        (x0, y0), (x1, y1) = pos[src], pos[dst]
        ax.annotate("", xy=(x1, y1), xytext=(x0, y0), arrowprops={"arrowstyle": "->", "color": cmap(i % 10), "lw": 1.0})
    for node in graph.nodes:
        x, y = pos[node.id]
        ax.plot([x], [y], "o", color="black", ms=4)
        ax.text(x + 0.05, y + 0.08, alpha_tag(node.alpha), fontsize=6)
    labels = graph.meta.get("labels") or list(range(graph.n_index))
    for i, lab in enumerate(labels):
        ax.plot([], [], color=cmap(i % 10), label=f"f{lab}")
    ax.legend(fontsize=6, loc="upper right")
    ax.set_axis_off()
    if title:
        ax.set_title(title, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVE)
    plt.close(fig)
