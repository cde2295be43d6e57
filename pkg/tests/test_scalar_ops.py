import math

import numpy as np
import pytest

from proxlab.scalar_ops import (
    SQRT2,
    FirmParams,
    MCParams,
    firm,
    hard,
    l0_envelope,
    l0_norm,
    mc_penalty,
    prox_l0,
    prox_l0_envelope,
    soft,
)
from proxlab.transform import Axis, GridSpec, brute_force_prox


def test_l0_norm_values():
    assert l0_norm(0.0) == 0.0
    assert l0_norm(0.001) == 1.0
    assert l0_norm(-7.0) == 1.0


def test_mc_penalty_values():
    p = MCParams(2.0)
    assert mc_penalty(0.0, p) == 0.0
    assert mc_penalty(3.0, p) == 1.0  # constant lambda2/2 past the knee
    assert mc_penalty(1.0, p) == pytest.approx(0.75, abs=1e-15)
    assert mc_penalty(-1.0, p) == mc_penalty(1.0, p)
    assert mc_penalty(2.0, p) == pytest.approx(1.0, abs=1e-15)  # continuous at the knee


def test_l0_envelope_values():
    assert l0_envelope(0.0) == 0.0
    assert l0_envelope(2.0) == 1.0
    assert l0_envelope(1.0) == pytest.approx(SQRT2 - 0.5, abs=1e-15)


def test_l0_envelope_is_scaled_mc():
    x = np.linspace(-4.0, 4.0, 1001)
    assert np.max(np.abs(l0_envelope(x) - SQRT2 * mc_penalty(x, MCParams(SQRT2)))) < 1e-14


def test_l0_envelope_minorant_and_weak_convexity():
    rng = np.random.default_rng(3)
    x = rng.uniform(-6.0, 6.0, size=5000)
    assert np.all(l0_envelope(x) <= l0_norm(x) + 1e-12)
    assert l0_envelope(0.0) == l0_norm(0.0)
    assert np.all(l0_envelope(x[np.abs(x) >= SQRT2]) == 1.0)

    a = rng.uniform(-6.0, 6.0, size=5000)
    b = rng.uniform(-6.0, 6.0, size=5000)
    g = lambda t: l0_envelope(t) + 0.5 * t * t
    assert np.all(g(0.5 * (a + b)) <= 0.5 * (g(a) + g(b)) + 1e-12)


def test_prox_l0_three_cases():
    assert prox_l0(1.0).values() == (0.0,)
    s = prox_l0(SQRT2)
    assert s.kind == "pair" and set(s.values()) == {0.0, SQRT2}
    assert prox_l0(2.0).values() == (2.0,)
    with pytest.raises(ValueError):
        prox_l0(1.0, gamma=0.0)


def test_prox_l0_threshold_scales_with_gamma():
    gamma = 2.0
    thr = math.sqrt(2.0 * gamma)
    assert prox_l0(thr - 1e-9, gamma).values() == (0.0,)
    assert prox_l0(thr + 1e-9, gamma).values() == (thr + 1e-9,)
    pair = prox_l0(thr, gamma)
    # both members attain the same prox objective
    obj = [l0_norm(v) + (thr - v) ** 2 / (2.0 * gamma) for v in pair.values()]
    assert abs(obj[0] - obj[1]) < 1e-12


def test_prox_l0_envelope_cases():
    assert prox_l0_envelope(1.0).values() == (0.0,)
    iv = prox_l0_envelope(SQRT2)
    assert iv.kind == "interval" and (iv.a, iv.b) == (0.0, SQRT2)
    neg = prox_l0_envelope(-SQRT2)
    assert neg.kind == "interval" and (neg.a, neg.b) == (-SQRT2, 0.0)
    assert prox_l0_envelope(3.0).values() == (3.0,)


def test_prox_l0_contained_in_envelope_prox():
    """Every point of the exact prox lies in the envelope's prox set."""
    xs = np.concatenate([np.linspace(-5.0, 5.0, 999), [SQRT2, -SQRT2]])
    for x in xs:
        env_set = prox_l0_envelope(float(x))
        for v in prox_l0(float(x)).values():
            assert env_set.contains(v, tol=1e-12)


def test_hard_boundary_belongs_to_zero_branch():
    assert hard(1.0, SQRT2) == 0.0
    assert hard(SQRT2, SQRT2) == 0.0
    assert hard(2.0, SQRT2) == 2.0
    assert hard(-2.0, SQRT2) == -2.0


def test_firm_values():
    p = FirmParams(1.0, 2.0)
    assert firm(0.5, p) == 0.0
    assert firm(1.5, p) == pytest.approx(1.0, abs=1e-15)
    assert firm(3.0, p) == 3.0
    assert firm(-1.5, p) == -firm(1.5, p)


def test_firm_params_validation():
    with pytest.raises(ValueError):
        FirmParams(2.0, 1.0)
    with pytest.raises(ValueError):
        FirmParams(0.0, 1.0)


def test_firm_monotone_and_lipschitz():
    p = FirmParams(1.0, 2.0)
    grid = np.sort(np.random.default_rng(11).uniform(-5.0, 5.0, size=2000))
    vals = firm(grid, p)
    diffs = np.diff(vals)
    steps = np.diff(grid)
    assert np.all(diffs >= -1e-12)
    bound = p.lambda2 / (p.lambda2 - p.lambda1)
    assert np.max(diffs / steps) <= bound + 1e-9


def test_firm_tends_to_hard_pointwise():
    """With lambda1 = sqrt(2)/(1+delta) and tiny delta, firm approaches hard."""
    delta = 1e-6
    p = FirmParams(SQRT2 / (1.0 + delta), SQRT2)
    xs = np.linspace(-4.0, 4.0, 4001)
    xs = xs[np.abs(np.abs(xs) - SQRT2) > 1e-3]
    h = np.array([hard(float(x), SQRT2) for x in xs])
    f = firm(xs, p)
    assert np.max(np.abs(f - h)) <= 1e-5


def test_firm_is_prox_of_scaled_mc_penalty():
    """Brute-force prox of lambda1 * MC(lambda2) reproduces firm shrinkage."""
    p = FirmParams(1.0, 2.0)
    pen = lambda y: p.lambda1 * mc_penalty(y, MCParams(p.lambda2))
    for q in (-2.5, -1.3, 0.4, 1.5, 2.2):
        box = GridSpec((Axis(q - 4.0, q + 4.0, 0.001),))
        got = brute_force_prox(pen, q, gamma=1.0, box=box)
        assert got.distance(firm(q, p)) <= 2e-3


def test_soft_values():
    assert soft(2.0, 1.0) == 1.0
    assert soft(-0.5, 1.0) == 0.0
    assert soft(1.7, 0.0) == 1.7
