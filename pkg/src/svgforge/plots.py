"""Report figures rendered next to the delimited/JSON outputs."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def plot_filter_report(report, path, thresholds=(0.95,), title="SSIM filter"):
    """Histogram of per-item SSIM with the decision thresholds marked."""
    values = [i.ssim for i in report.items if i.ssim is not None]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    if values:
        ax.hist(values, bins=40, range=(0.0, 1.0), color="#4878a8", alpha=0.85)
    for t in thresholds:
        ax.axvline(t, color="#b03030", linestyle="--", linewidth=1.2,
                   label=f"threshold {t:g}")
    ax.set_xlabel("SSIM")
    ax.set_ylabel("pairs")
    ax.set_title(f"{title}: kept {report.kept} / rejected {report.rejected}")
    ax.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_group_report(report, path, title="GRPO objective"):
    """Per-trajectory advantages and diagnostics for one rollout group."""
    n = len(report.advantages)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8, 3.5))
    idx = range(n)
    colors = ["#4878a8" if a >= 0 else "#b03030" for a in report.advantages]
    ax1.bar(idx, report.advantages, color=colors)
    ax1.axhline(0, color="black", linewidth=0.8)
    ax1.set_xlabel("trajectory")
    ax1.set_ylabel("advantage")
    ax1.set_title(f"objective {report.objective:.4g}")
    ax2.bar(idx, [d.mean_kl for d in report.per_trajectory], color="#708070")
    ax2.set_xlabel("trajectory")
    ax2.set_ylabel("mean KL")
    ax2.set_title(f"clip fraction {report.clip_fraction:.3f}")
    fig.suptitle(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_reward_breakdown(breakdown, path, title="reward breakdown"):
    """Bar chart of the reward components and the gated total."""
    names = ["format", "dino", "lclip", "eff", "total"]
    values = [breakdown.r_format, breakdown.r_dino, breakdown.r_lclip,
              breakdown.r_eff, breakdown.r_total]
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    colors = ["#4878a8" if v >= 0 else "#b03030" for v in values]
    ax.bar(names, values, color=colors)
    ax.axhline(0, color="black", linewidth=0.8)
    ax.set_ylabel("reward")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
