"""GRPO math: advantages, ratios, clipping, KL, objective, gradient.

The objective is checked against an independent naive evaluator written
with scalar math only, and the analytic gradient against central finite
differences.
"""

import json
import math
import random

import numpy as np
import pytest

from svgforge.errors import (
    EmptyGroupError,
    LengthMismatchError,
    NonFiniteRatioError,
    SchemaError,
)
from svgforge.grpo import (
    GrpoConfig,
    RolloutGroup,
    Trajectory,
    clipped_term,
    group_advantages,
    grpo_objective,
    kl_penalty,
    load_rollout_group,
    objective_gradient,
    prob_ratio,
    rollout_group_from_dict,
    rollout_group_to_dict,
)


# --------------------------------------------------------------------------
# Independent naive evaluator (scalar math, no shared code paths)
# --------------------------------------------------------------------------

def naive_objective(rewards, logps_new, logps_old, logps_ref,
                    gamma, beta, eps, estimator):
    g = len(rewards)
    mu = sum(rewards) / g
    var = sum((r - mu) ** 2 for r in rewards) / g
    sigma = math.sqrt(var)
    advantages = [(r - mu) / (sigma + eps) for r in rewards]

    total = 0.0
    for i in range(g):
        t_i = len(logps_new[i])
        surr = 0.0
        kl = 0.0
        for t in range(t_i):
            rho = math.exp(logps_new[i][t] - logps_old[i][t])
            clipped = min(max(rho, 1 - gamma), 1 + gamma)
            surr += min(rho * advantages[i], clipped * advantages[i])
            d = logps_ref[i][t] - logps_new[i][t]
            kl += (-d) if estimator == "k1" else (math.exp(d) - d - 1.0)
        total += surr / t_i - beta * (kl / t_i)
    return total / g


def random_group(rng: random.Random, g_max=3, t_max=4):
    g = rng.randint(1, g_max)
    trajs = []
    for _ in range(g):
        t = rng.randint(1, t_max)
        trajs.append(Trajectory(
            logp_new=tuple(rng.uniform(-5.0, -0.05) for _ in range(t)),
            logp_old=tuple(rng.uniform(-5.0, -0.05) for _ in range(t)),
            logp_ref=tuple(rng.uniform(-5.0, -0.05) for _ in range(t)),
        ))
    rewards = tuple(rng.uniform(-1.0, 2.0) for _ in range(g))
    return RolloutGroup("ctx", tuple(trajs), rewards)


class TestGroupAdvantages:
    def test_zero_variance_group(self):
        assert group_advantages([1, 1, 1, 1]).tolist() == [0.0, 0.0, 0.0, 0.0]

    def test_two_element_hand_value(self):
        adv = group_advantages([0.0, 2.0], 1e-4)
        expected = 1.0 / (1.0 + 1e-4)
        assert adv[0] == pytest.approx(-expected, abs=1e-15)
        assert adv[1] == pytest.approx(expected, abs=1e-15)

    def test_single_element(self):
        assert group_advantages([7.5]).tolist() == [0.0]

    def test_empty_raises(self):
        with pytest.raises(EmptyGroupError):
            group_advantages([])

    def test_mean_zero_and_shift_invariance(self):
        rng = random.Random(11)
        for _ in range(1000):
            g = rng.randint(1, 8)
            rewards = [rng.uniform(-10, 10) for _ in range(g)]
            adv = group_advantages(rewards)
            assert abs(adv.mean()) <= 1e-12
            shifted = group_advantages([r + 3.7 for r in rewards])
            assert np.allclose(adv, shifted, atol=1e-12)

    def test_positive_scaling_preserves_order_and_limit(self):
        rng = random.Random(12)
        for _ in range(200):
            g = rng.randint(2, 8)
            rewards = [rng.uniform(-10, 10) for _ in range(g)]
            k = rng.uniform(0.1, 10.0)
            a = group_advantages(rewards, 1e-12)
            b = group_advantages([k * r for r in rewards], 1e-12)
            assert np.array_equal(np.argsort(a), np.argsort(b))
            assert np.all(np.sign(np.round(a, 12)) == np.sign(np.round(b, 12)))
            if np.std(rewards) > 1e-6:
                assert np.allclose(a, b, atol=1e-6)

    def test_std_approaches_one(self):
        adv = group_advantages([0.0, 1.0, 2.0, 3.0], 1e-12)
        assert adv.std() == pytest.approx(1.0, abs=1e-9)


class TestProbRatio:
    def test_equal_logps(self):
        assert prob_ratio([-1, -2], [-1, -2]).tolist() == [1.0, 1.0]

    def test_ln2_difference(self):
        r = prob_ratio([-1.0 + math.log(2)], [-1.0])
        assert r[0] == pytest.approx(2.0, rel=1e-15)

    def test_quarter(self):
        r = prob_ratio([-1.0 - math.log(4)], [-1.0])
        assert r[0] == pytest.approx(0.25, rel=1e-15)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            prob_ratio([-1.0], [-1.0, -2.0])

    def test_overflow_guard(self):
        with pytest.raises(NonFiniteRatioError):
            prob_ratio([-1.0], [-100.0])


class TestClippedTerm:
    @pytest.mark.parametrize("ratio,adv,gamma,expected", [
        (1.0, 2.0, 0.2, 2.0),
        (1.5, 1.0, 0.2, 1.2),
        (0.5, -1.0, 0.2, -0.8),
        (0.5, 1.0, 0.2, 0.5),
        (1.5, -1.0, 0.2, -1.5),
    ])
    def test_anchors(self, ratio, adv, gamma, expected):
        assert clipped_term(ratio, adv, gamma) == pytest.approx(expected, abs=1e-15)

    def test_upper_bound_property(self):
        rng = random.Random(13)
        for _ in range(500):
            rho = rng.uniform(0.0, 3.0)
            adv = rng.uniform(-2.0, 2.0)
            gamma = rng.uniform(0.05, 0.5)
            val = clipped_term(rho, adv, gamma)
            assert val <= rho * adv + 1e-15
            if 1 - gamma <= rho <= 1 + gamma:
                assert val == pytest.approx(rho * adv, abs=1e-15)


class TestKlPenalty:
    def test_identical_gives_zero(self):
        for est in ("k1", "k3"):
            assert kl_penalty([-1, -2], [-1, -2], est).tolist() == [0.0, 0.0]

    def test_k3_at_ln2(self):
        out = kl_penalty([-1.0], [-1.0 + math.log(2)], "k3")
        assert out[0] == pytest.approx(2 - math.log(2) - 1, abs=1e-15)

    def test_k3_nonnegative_random(self):
        rng = random.Random(14)
        for _ in range(1000):
            a = rng.uniform(-20, -0.01)
            b = rng.uniform(-20, -0.01)
            assert kl_penalty([a], [b], "k3")[0] >= 0.0

    def test_k1_sign(self):
        # new more likely than ref: positive KL estimate
        assert kl_penalty([-0.5], [-1.0], "k1")[0] == pytest.approx(0.5)


class TestObjective:
    def test_all_equal_logps_zero(self):
        t = Trajectory((-1.0, -0.5), (-1.0, -0.5), (-1.0, -0.5))
        group = RolloutGroup("c", (t, t, t), (0.3, 0.6, 0.9))
        rep = grpo_objective(group)
        assert rep.objective == pytest.approx(0.0, abs=1e-12)
        assert rep.mean_kl == 0.0
        assert rep.clip_fraction == 0.0

    def test_two_rewards_ratios_one_beta_zero(self):
        t1 = Trajectory((-1.0,), (-1.0,), (-1.0,))
        t2 = Trajectory((-2.0, -1.0), (-2.0, -1.0), (-2.0, -1.0))
        group = RolloutGroup("c", (t1, t2), (0.0, 2.0))
        rep = grpo_objective(group, GrpoConfig(kl_beta=0.0))
        assert rep.objective == pytest.approx(0.0, abs=1e-12)
        e = 1.0 / (1.0 + 1e-4)
        assert rep.advantages[0] == pytest.approx(-e)
        assert rep.advantages[1] == pytest.approx(e)

    def test_matches_naive_evaluator_1000_instances(self):
        rng = random.Random(20260809)
        for _ in range(1000):
            group = random_group(rng)
            config = GrpoConfig(
                clip_gamma=rng.choice((0.1, 0.2, 0.3)),
                kl_beta=rng.choice((0.0, 0.01, 0.1)),
                adv_epsilon=rng.choice((1e-4, 1e-2)),
                kl_estimator=rng.choice(("k1", "k3")),
            )
            expected = naive_objective(
                list(group.rewards),
                [t.logp_new for t in group.trajectories],
                [t.logp_old for t in group.trajectories],
                [t.logp_ref for t in group.trajectories],
                config.clip_gamma, config.kl_beta, config.adv_epsilon,
                config.kl_estimator)
            got = grpo_objective(group, config).objective
            assert got == pytest.approx(expected, abs=1e-10)

    def test_diagnostics_shape(self):
        rng = random.Random(5)
        group = random_group(rng)
        rep = grpo_objective(group)
        assert len(rep.per_trajectory) == group.size
        assert len(rep.advantages) == group.size
        assert 0.0 <= rep.clip_fraction <= 1.0


def _fd_gradient(group, config, h=1e-6):
    """Central finite differences over every logp_new entry."""
    def evaluate(logps_new):
        trajs = tuple(
            Trajectory(tuple(ln), t.logp_old, t.logp_ref)
            for ln, t in zip(logps_new, group.trajectories))
        return grpo_objective(
            RolloutGroup(group.context_id, trajs, group.rewards), config).objective

    base = [list(t.logp_new) for t in group.trajectories]
    grads = []
    for i, traj in enumerate(group.trajectories):
        g = np.zeros(traj.token_count)
        for t in range(traj.token_count):
            plus = [row[:] for row in base]
            minus = [row[:] for row in base]
            plus[i][t] += h
            minus[i][t] -= h
            g[t] = (evaluate(plus) - evaluate(minus)) / (2 * h)
        grads.append(g)
    return grads


def _min_clip_distance(group, config):
    dist = math.inf
    for t in group.trajectories:
        rho = np.exp(np.asarray(t.logp_new) - np.asarray(t.logp_old))
        dist = min(dist,
                   float(np.min(np.abs(rho - (1 - config.clip_gamma)))),
                   float(np.min(np.abs(rho - (1 + config.clip_gamma)))))
    return dist


class TestGradient:
    def test_zero_at_equal_logps_zero_advantage(self):
        t = Trajectory((-1.0, -2.0), (-1.0, -2.0), (-1.0, -2.0))
        group = RolloutGroup("c", (t, t), (1.0, 1.0))
        grads = objective_gradient(group, GrpoConfig(kl_beta=0.0))
        for g in grads:
            assert np.allclose(g, 0.0, atol=1e-15)

    def test_single_token_in_band(self):
        t = Trajectory((-1.0,), (-1.1,), (-1.0,))
        group = RolloutGroup("c", (t,), (1.0,))
        # single-element group: advantage 0, so surrogate gradient is 0
        grads = objective_gradient(group, GrpoConfig(kl_beta=0.0))
        assert grads[0][0] == pytest.approx(0.0, abs=1e-15)

    def test_hand_derivative_in_band(self):
        # two trajectories so the advantage is nonzero; T=1, beta=0
        t1 = Trajectory((-1.0,), (-1.1,), (-1.0,))
        t2 = Trajectory((-2.0,), (-2.0,), (-2.0,))
        group = RolloutGroup("c", (t1, t2), (2.0, 0.0))
        config = GrpoConfig(kl_beta=0.0)
        grads = objective_gradient(group, config)
        rho = math.exp(0.1)
        adv = 1.0 / (1.0 + config.adv_epsilon)
        assert grads[0][0] == pytest.approx(rho * adv / 2, rel=1e-12)

    def test_matches_finite_differences_100_instances(self):
        rng = random.Random(424242)
        checked = 0
        while checked < 100:
            group = random_group(rng)
            config = GrpoConfig(
                clip_gamma=0.2,
                kl_beta=rng.choice((0.0, 0.01, 0.1)),
                kl_estimator=rng.choice(("k1", "k3")),
            )
            if _min_clip_distance(group, config) < 1e-3:
                continue  # stay away from the clip kinks
            analytic = objective_gradient(group, config)
            numeric = _fd_gradient(group, config)
            for a, n in zip(analytic, numeric):
                scale = np.maximum(np.abs(n), 1e-8)
                assert np.all(np.abs(a - n) / scale < 1e-5)
            checked += 1


class TestRolloutFile:
    def test_round_trip(self, tmp_path):
        rng = random.Random(3)
        group = random_group(rng)
        path = tmp_path / "group.json"
        path.write_text(json.dumps(rollout_group_to_dict(group, "abc")))
        loaded = load_rollout_group(path)
        assert loaded == group

    def test_token_count_mismatch(self):
        data = {
            "context_id": "x",
            "trajectories": [{
                "tokens": 3,
                "logp_new": [-1.0], "logp_old": [-1.0], "logp_ref": [-1.0],
                "reward": 1.0,
            }],
        }
        with pytest.raises(SchemaError):
            rollout_group_from_dict(data)

    def test_array_length_mismatch(self):
        data = {
            "context_id": "x",
            "trajectories": [{
                "tokens": 2,
                "logp_new": [-1.0, -2.0], "logp_old": [-1.0], "logp_ref": [-1.0, -2.0],
                "reward": 1.0,
            }],
        }
        with pytest.raises(SchemaError):
            rollout_group_from_dict(data)

    def test_positive_logp_rejected(self):
        with pytest.raises(ValueError):
            Trajectory((0.5,), (-1.0,), (-1.0,))

    def test_empty_trajectory_rejected(self):
        with pytest.raises(ValueError):
            Trajectory((), (), ())

    def test_empty_group_rejected(self):
        with pytest.raises(EmptyGroupError):
            RolloutGroup("c", (), ())
