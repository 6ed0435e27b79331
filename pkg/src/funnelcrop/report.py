"""Matplotlib report figures rendered next to the delimited/JSON outputs."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

LEVEL_BAR_COLORS = ("#0050ff", "#00c850", "#a03cdc", "#ffa000")


def save_hnorm_histogram(h_values, path):
    """Histogram of attention-entropy values across a batch."""
    fig, ax = plt.subplots(figsize=(6, 4))
    if h_values:
        ax.hist(h_values, bins=20, range=(0.0, 1.0), color="#3570b4",
                edgecolor="white")
    ax.set_xlim(0.0, 1.0)
    ax.set_xlabel("normalized attention entropy")
    ax.set_ylabel("images")
    ax.set_title(f"Entropy distribution (n={len(h_values)})")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_sweep_chart(rows, path):
    """Grouped bar chart of finalized crop sides per sweep config.

    ``rows`` are dicts with keys: label, levels, sides (list of ints).
    """
    fig, ax = plt.subplots(figsize=(max(6, 1.4 * len(rows)), 4))
    max_levels = max((r["levels"] for r in rows), default=0)
    width = 0.8 / max(max_levels, 1)
    for lvl in range(max_levels):
        xs, hs = [], []
        for i, row in enumerate(rows):
            if lvl < len(row["sides"]):
                xs.append(i + lvl * width)
                hs.append(row["sides"][lvl])
        if xs:
            ax.bar(xs, hs, width=width,
                   color=LEVEL_BAR_COLORS[lvl % len(LEVEL_BAR_COLORS)],
                   label=f"level {lvl}")
    ax.set_xticks([i + 0.4 - width / 2 for i in range(len(rows))])
    ax.set_xticklabels([r["label"] for r in rows], rotation=30, ha="right")
    ax.set_ylabel("crop side (px)")
    ax.set_title("Crop sides per configuration")
    if max_levels:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
