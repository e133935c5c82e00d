"""Group-relative policy optimization mathematics.

Advantages are group-normalized rewards (population standard deviation);
the objective averages the clipped surrogate per token, then per
trajectory, and subtracts a per-token KL penalty estimate against the
reference policy aggregated the same way.  An analytic gradient with
respect to the new log-probabilities is provided for harness integration
and finite-difference verification.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EmptyGroupError,
    LengthMismatchError,
    NonFiniteRatioError,
    SchemaError,
)

_LOG_RATIO_LIMIT = 80.0  # exp(80) is the largest ratio we accept as finite


@dataclass(frozen=True)
class GrpoConfig:
    clip_gamma: float = 0.2
    kl_beta: float = 0.01
    adv_epsilon: float = 1e-4
    kl_estimator: str = "k3"  # "k1" | "k3"

    def __post_init__(self):
        if not 0.0 < self.clip_gamma < 1.0:
            raise ValueError(f"clip_gamma must be in (0, 1), got {self.clip_gamma}")
        if self.kl_beta < 0:
            raise ValueError(f"kl_beta must be non-negative, got {self.kl_beta}")
        if self.adv_epsilon <= 0:
            raise ValueError(f"adv_epsilon must be positive, got {self.adv_epsilon}")
        if self.kl_estimator not in ("k1", "k3"):
            raise ValueError(f"kl_estimator must be k1 or k3, got {self.kl_estimator}")


@dataclass(frozen=True)
class Trajectory:
    logp_new: tuple[float, ...]
    logp_old: tuple[float, ...]
    logp_ref: tuple[float, ...]

    def __post_init__(self):
        t = len(self.logp_new)
        if t == 0:
            raise ValueError("trajectory has no tokens")
        if len(self.logp_old) != t or len(self.logp_ref) != t:
            raise LengthMismatchError(
                f"log-prob arrays differ in length: {t}, {len(self.logp_old)}, "
                f"{len(self.logp_ref)}")
        for name, arr in (("logp_new", self.logp_new), ("logp_old", self.logp_old),
                          ("logp_ref", self.logp_ref)):
            for v in arr:
                if not math.isfinite(v) or v > 0.0:
                    raise ValueError(f"{name} entries must be finite and <= 0, got {v}")

    @property
    def token_count(self) -> int:
        return len(self.logp_new)


@dataclass(frozen=True)
class RolloutGroup:
    context_id: str
    trajectories: tuple[Trajectory, ...]
    rewards: tuple[float, ...]

    def __post_init__(self):
        if not self.trajectories:
            raise EmptyGroupError(f"group {self.context_id!r} has no trajectories")
        if len(self.rewards) != len(self.trajectories):
            raise LengthMismatchError(
                f"group {self.context_id!r}: {len(self.rewards)} rewards for "
                f"{len(self.trajectories)} trajectories")

    @property
    def size(self) -> int:
        return len(self.trajectories)


def group_advantages(rewards, epsilon: float = 1e-4) -> np.ndarray:
    """Normalize rewards within the group: (r - mean) / (population std + eps)."""
    r = np.asarray(rewards, dtype=np.float64)
    if r.size == 0:
        raise EmptyGroupError("cannot normalize an empty reward list")
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    mu = r.mean()
    sigma = r.std()  # population: divide by G
    return (r - mu) / (sigma + epsilon)


def prob_ratio(logp_new, logp_old) -> np.ndarray:
    """Per-token likelihood ratio exp(logp_new - logp_old), computed in log space."""
    a = np.asarray(logp_new, dtype=np.float64)
    b = np.asarray(logp_old, dtype=np.float64)
    if a.shape != b.shape:
        raise LengthMismatchError(f"length mismatch: {a.shape} vs {b.shape}")
    diff = a - b
    if np.any(diff > _LOG_RATIO_LIMIT):
        raise NonFiniteRatioError(
            f"log ratio exceeds {_LOG_RATIO_LIMIT}; ratio would overflow")
    return np.exp(diff)


def clipped_term(ratio: float, advantage: float, clip_gamma: float = 0.2) -> float:
    """min(ratio * A, clip(ratio, 1-gamma, 1+gamma) * A)."""
    if ratio < 0:
        raise ValueError(f"ratio must be non-negative, got {ratio}")
    clipped = min(max(ratio, 1.0 - clip_gamma), 1.0 + clip_gamma)
    return min(ratio * advantage, clipped * advantage)


def kl_penalty(logp_new, logp_ref, estimator: str = "k3") -> np.ndarray:
    """Per-token KL(new || ref) estimate from sampled log-probs.

    With d = logp_ref - logp_new: k1 returns -d (the naive sample estimate);
    k3 returns exp(d) - d - 1, which is non-negative everywhere.
    """
    a = np.asarray(logp_new, dtype=np.float64)
    b = np.asarray(logp_ref, dtype=np.float64)
    if a.shape != b.shape:
        raise LengthMismatchError(f"length mismatch: {a.shape} vs {b.shape}")
    d = b - a
    if estimator == "k1":
        return -d
    if estimator == "k3":
        return np.exp(d) - d - 1.0
    raise ValueError(f"unknown KL estimator: {estimator!r}")


@dataclass(frozen=True)
class TrajectoryDiagnostics:
    mean_ratio: float
    clip_fraction: float
    mean_kl: float


@dataclass(frozen=True)
class ObjectiveReport:
    objective: float
    advantages: tuple[float, ...]
    clip_fraction: float
    mean_kl: float
    per_trajectory: tuple[TrajectoryDiagnostics, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "objective": self.objective,
            "advantages": list(self.advantages),
            "clip_fraction": self.clip_fraction,
            "mean_kl": self.mean_kl,
            "per_trajectory": [
                {"mean_ratio": d.mean_ratio, "clip_fraction": d.clip_fraction,
                 "mean_kl": d.mean_kl}
                for d in self.per_trajectory
            ],
        }


def grpo_objective(group: RolloutGroup, config: GrpoConfig = GrpoConfig()
                   ) -> ObjectiveReport:
    """Evaluate the surrogate objective over one rollout group.

    objective = (1/G) sum_i (1/T_i) sum_t clip_term(rho_it, A_i)
              - beta * (1/G) sum_i (1/T_i) sum_t kl_t
    """
    adv = group_advantages(group.rewards, config.adv_epsilon)
    g = group.size
    lo, hi = 1.0 - config.clip_gamma, 1.0 + config.clip_gamma

    surrogate_sum = 0.0
    kl_sum = 0.0
    diags = []
    clipped_tokens = 0
    total_tokens = 0
    for i, traj in enumerate(group.trajectories):
        rho = prob_ratio(traj.logp_new, traj.logp_old)
        a_i = adv[i]
        terms = np.minimum(rho * a_i, np.clip(rho, lo, hi) * a_i)
        kl = kl_penalty(traj.logp_new, traj.logp_ref, config.kl_estimator)
        t_i = traj.token_count
        surrogate_sum += terms.mean()
        kl_sum += kl.mean()
        out_of_band = (rho < lo) | (rho > hi)
        clipped_tokens += int(out_of_band.sum())
        total_tokens += t_i
        diags.append(TrajectoryDiagnostics(
            mean_ratio=float(rho.mean()),
            clip_fraction=float(out_of_band.mean()),
            mean_kl=float(kl.mean()),
        ))

    objective = surrogate_sum / g - config.kl_beta * (kl_sum / g)
    return ObjectiveReport(
        objective=float(objective),
        advantages=tuple(float(a) for a in adv),
        clip_fraction=clipped_tokens / total_tokens,
        mean_kl=float(kl_sum / g),
        per_trajectory=tuple(diags),
    )


def objective_gradient(group: RolloutGroup, config: GrpoConfig = GrpoConfig()
                       ) -> list[np.ndarray]:
    """Analytic d(objective)/d(logp_new), one array per trajectory.

    The surrogate contributes A*rho/(G*T_i) where the unclipped branch is
    active (rho <= 1+gamma for A >= 0, rho >= 1-gamma for A < 0) and zero on
    the flat clipped region.  The KL term contributes -beta/(G*T_i) times
    d(kl)/d(logp_new): 1 for k1, 1 - exp(logp_ref - logp_new) for k3.
    """
    adv = group_advantages(group.rewards, config.adv_epsilon)
    g = group.size
    lo, hi = 1.0 - config.clip_gamma, 1.0 + config.clip_gamma

    grads = []
    for i, traj in enumerate(group.trajectories):
        rho = prob_ratio(traj.logp_new, traj.logp_old)
        a_i = adv[i]
        if a_i >= 0:
            active = rho <= hi
        else:
            active = rho >= lo
        surr_grad = np.where(active, a_i * rho, 0.0)

        d = np.asarray(traj.logp_ref, dtype=np.float64) - np.asarray(
            traj.logp_new, dtype=np.float64)
        if config.kl_estimator == "k1":
            kl_grad = np.ones_like(d)
        else:
            kl_grad = 1.0 - np.exp(d)

        scale = 1.0 / (g * traj.token_count)
        grads.append(scale * (surr_grad - config.kl_beta * kl_grad))
    return grads


# --------------------------------------------------------------------------
# Rollout-group file format
# --------------------------------------------------------------------------

def rollout_group_to_dict(group: RolloutGroup, reward_config_digest: str = "") -> dict:
    return {
        "context_id": group.context_id,
        "reward_config_digest": reward_config_digest,
        "trajectories": [
            {
                "tokens": t.token_count,
                "logp_new": list(t.logp_new),
                "logp_old": list(t.logp_old),
                "logp_ref": list(t.logp_ref),
                "reward": r,
            }
            for t, r in zip(group.trajectories, group.rewards)
        ],
    }


def rollout_group_from_dict(data: dict) -> RolloutGroup:
    try:
        context_id = data["context_id"]
        raw = data["trajectories"]
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"rollout group missing field: {exc}") from exc
    if not isinstance(raw, list) or not raw:
        raise SchemaError("trajectories must be a non-empty list")
    trajectories = []
    rewards = []
    for idx, entry in enumerate(raw):
        try:
            t = Trajectory(
                logp_new=tuple(float(v) for v in entry["logp_new"]),
                logp_old=tuple(float(v) for v in entry["logp_old"]),
                logp_ref=tuple(float(v) for v in entry["logp_ref"]),
            )
            declared = int(entry["tokens"])
            rewards.append(float(entry["reward"]))
        except (KeyError, TypeError, ValueError, LengthMismatchError) as exc:
            raise SchemaError(f"trajectory {idx}: {exc}") from exc
        if declared != t.token_count:
            raise SchemaError(
                f"trajectory {idx}: declared {declared} tokens but arrays have "
                f"{t.token_count}")
        trajectories.append(t)
    return RolloutGroup(context_id=str(context_id),
                        trajectories=tuple(trajectories), rewards=tuple(rewards))


def load_rollout_group(path) -> RolloutGroup:
    with open(path, encoding="utf-8") as fp:
        try:
            data = json.load(fp)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from exc
    return rollout_group_from_dict(data)
