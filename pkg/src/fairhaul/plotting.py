"""Figure rendering for benchmark runs.

Kept separate so library users never pay the matplotlib import; the CLI
loads this lazily when it writes a report.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def render_bench_figure(rows: list[dict], path: str) -> str:
    """Plot share and wall time against instance size, one series per agent
    count, and write a PNG next to the delimited output."""
    fig, (ax_share, ax_time) = plt.subplots(1, 2, figsize=(9, 3.6))
    by_n: dict[int, list[dict]] = {}
    for row in rows:
        by_n.setdefault(int(row["n"]), []).append(row)
    for n, group in sorted(by_n.items()):
        group = sorted(group, key=lambda r: (int(r["m"]), r["instance_id"]))
        ms = [int(r["m"]) for r in group]
        shares = [float(r["share_float"]) for r in group]
        times = [float(r["wall_time_ms"]) for r in group]
        ax_share.plot(ms, shares, marker="o", linewidth=1, label=f"n={n}")
        ax_time.plot(ms, times, marker=".", linewidth=1, label=f"n={n}")
    ax_share.set_xlabel("orders (m)")
    ax_share.set_ylabel("share")
    ax_share.legend(fontsize=8)
    ax_time.set_xlabel("orders (m)")
    ax_time.set_ylabel("wall time (ms)")
    ax_time.legend(fontsize=8)
    for ax in (ax_share, ax_time):
        ax.spines["top"].set_visible(False)
        ax.spines["right"].set_visible(False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
