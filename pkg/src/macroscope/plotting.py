"""Figure rendering for the CLI report paths (file output only)."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def render_trajectory_figure(points, path: str) -> str:
    """Plot the entropy curves of an evolution run and save to ``path``."""
    ts = [p.t for p in points]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(ts, [p.observational_entropy_bits for p in points],
            label="observational entropy", lw=1.8)
    ax.plot(ts, [p.von_neumann_bits for p in points],
            label="von Neumann entropy", lw=1.8, ls="--")
    ax.plot(ts, [p.deficit_uniform_bits for p in points],
            label="deficit (uniform prior)", lw=1.2, ls=":")
    ax.set_xlabel("t")
    ax.set_ylabel("bits")
    ax.legend(frameon=False)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
