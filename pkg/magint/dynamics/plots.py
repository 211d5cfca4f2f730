"""SVG projections and gnuplot data blocks of trajectories."""
import logging

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

logger = logging.getLogger(__name__)

# equal trajectories must give byte-identical files
SVG_RC = {"svg.hashsalt": "magint", "svg.fonttype": "none"}


def _open(path_or_buf, mode="w"):
    if hasattr(path_or_buf, "write"):
        return path_or_buf, False
    return open(path_or_buf, mode, encoding="utf-8", newline="\n"), True


def write_svg(traj, path_or_buf):
    """Writes the xy, xz and t-z projections of `traj` side by side."""
    df = traj.to_frame()
    x, y, z = (str(q) for q in traj.system.chart.coords)
    with plt.rc_context(SVG_RC):
        fig, axes = plt.subplots(1, 3, figsize=(12, 4))
        panels = ((x, y), (x, z), ("t", z))
        for ax, (h, v) in zip(axes, panels):
            ax.plot(df[h], df[v], lw=0.6)
            ax.set_xlabel(h)
            ax.set_ylabel(v)
        axes[0].set_aspect("equal", adjustable="datalim")
        fig.suptitle(traj.system.id)
        fig.tight_layout()
        f, close = _open(path_or_buf)
        try:
            fig.savefig(f, format="svg", metadata={"Date": None})
        finally:
            if close:
                f.close()
            plt.close(fig)
    logger.info("wrote SVG projections of %r", traj)


def gnuplot_block(traj):
    """The spatial path as whitespace-separated columns, for ``splot``."""
    df = traj.to_frame()
    coords = [str(q) for q in traj.system.chart.coords]
    lines = ["# " + " ".join(coords)]
    for row in df[coords].itertuples(index=False):
        lines.append(" ".join("%.17g" % v for v in row))
    return "\n".join(lines) + "\n\n"


def write_gnuplot(traj, path_or_buf):
    f, close = _open(path_or_buf)
    try:
        f.write(gnuplot_block(traj))
    finally:
        if close:
            f.close()
