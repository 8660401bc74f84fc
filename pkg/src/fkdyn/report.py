"""Delimited output and figure rendering for CLI experiments.

Tables are written atomically with `#`-prefixed header comments carrying
the tool version, RNG version and the fully resolved configuration; reals
print with six fractional digits (round half to even), so identical
configurations produce byte-identical files.
"""

import os
import tempfile

from . import __version__
from .rng import RNG_VERSION

_SEPARATORS = {"csv": ",", "tsv": "\t"}


def format_value(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def table_text(config: dict, columns, rows, fmt: str = "csv") -> str:
    sep = _SEPARATORS[fmt]
    resolved = " ".join(f"{k}={v}" for k, v in config.items())
    lines = [
        f"# fkdyn {__version__}",
        f"# rng {RNG_VERSION}",
        f"# config: {resolved}",
        sep.join(columns),
    ]
    for row in rows:
        lines.append(sep.join(format_value(v) for v in row))
    return "\n".join(lines) + "\n"


def write_atomic(path: str, text: str):
    """Write via a temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".fkdyn-")
    try:
        with os.fdopen(fd, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)  # mkstemp is 0600; honor the umask instead
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _figure():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def render_figure(command: str, columns, rows, png_path: str, config: dict):
    """Render the table to a PNG next to the delimited output."""
    plt = _figure()
    fig, ax = plt.subplots(figsize=(6.0, 3.8))
    cols = {name: [row[i] for row in rows] for i, name in enumerate(columns)}
    if command == "profile":
        ax.step(cols["delta"], cols["fbar"], where="post", label="fbar(n, delta)")
        lim = max(cols["delta"])
        ax.plot([0, lim], [0, lim], linestyle="--", linewidth=0.8, label="delta")
        ax.set_xlabel("delta")
        ax.set_ylabel("fbar")
        ax.legend(frameon=False)
    elif command == "tlk-probe":
        for key in ("max", "median", "min"):
            ax.plot(cols["n"], cols[key], marker="o", label=key)
        ax.set_xscale("log", base=2)
        ax.set_xlabel("horizon n")
        ax.set_ylabel("rho_FK estimate")
        ax.legend(frameon=False)
    elif command == "dist":
        for key in ("rho_fk", "rho_b", "rho_b_prime"):
            ax.plot(cols["n"], cols[key], marker="o", label=key)
        if len(set(cols["n"])) > 1:
            ax.set_xscale("log", base=2)
        ax.set_xlabel("horizon n")
        ax.set_ylabel("estimate")
        ax.legend(frameon=False)
    elif command == "sensitivity":
        ax.plot(cols["epsilon"], cols["min_ball_sup"], marker="o",
                label="min ball sup")
        ax.plot(cols["epsilon"], cols["epsilon"], linestyle="--", linewidth=0.8,
                label="epsilon")
        ax.set_xlabel("epsilon")
        ax.set_ylabel("FK ball sup")
        ax.legend(frameon=False)
    elif command == "katok":
        ax.bar([0], [cols["fraction"][0]], width=0.4)
        ax.axhline(1.0 - cols["epsilon"][0], linestyle="--", linewidth=0.8)
        ax.set_xticks([0], ["best center"])
        ax.set_ylabel("close fraction")
        ax.set_ylim(0, 1.05)
    else:
        ax.axis("off")
        ax.text(0.5, 0.5, f"no figure for {command}", ha="center")
    ax.set_title(config.get("system", command))
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
