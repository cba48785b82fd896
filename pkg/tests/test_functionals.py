import pytest

from cubeosc import (Candidate, CandidatePool, HalfPlane,
                     IndicatorShape, IntervalUnion, PackingConfig,
                     canonical_kind, cubes_disjoint, evaluate,
                     evaluate_1d_exact, exact_1d_argmax, get_preset,
                     row_from_estimate, unit_box)
from cubeosc.errors import InputError


def test_canonical_kind_aliases():
    assert canonical_kind("i") == "I"
    assert canonical_kind("axis") == "AxisB"
    assert canonical_kind("local") == "I_localized"
    assert canonical_kind("J") == "J"
    assert canonical_kind("k") == "K"
    assert canonical_kind("m") == "M"
    with pytest.raises(InputError):
        canonical_kind("nope")


def test_value_is_scaled_score_sum():
    est = evaluate(get_preset("square01").target, "I", 0.04)
    assert est.value == pytest.approx(
        0.04 * sum(est.per_cube_scores), abs=1e-15)
    assert est.doubled_value == pytest.approx(2.0 * est.value, abs=1e-15)


def test_cap_by_kind_on_halfplane():
    hp = HalfPlane((1.0, 0.0), 0.5)
    eps = 0.1
    box = unit_box(2)
    cfg = PackingConfig(orientations=4, offsets_per_orientation=2)
    est_i = evaluate(hp, "I", eps, region=box, config=cfg)
    assert est_i.cap == 10            # floor(eps^(1-n)) = 1/eps at n = 2
    assert est_i.n_cubes <= est_i.cap
    est_j = evaluate(hp, "J", eps, region=box, config=cfg)
    assert est_j.cap == 10            # floor(Per * eps^(1-n)) with Per = 1
    assert est_j.n_cubes <= 10
    est_m = evaluate(hp, "M", eps, region=box, m_value=0.5, config=cfg)
    assert est_m.cap == 5
    est_k = evaluate(hp, "K", eps, region=box, config=cfg)
    assert est_k.cap is None


def test_halfplane_values_by_kind():
    """A unit interface: every kind has the same per-cube limit score 1/2."""
    hp = HalfPlane((1.0, 0.0), 0.5)
    cfg = PackingConfig(orientations=4, offsets_per_orientation=2)
    box = unit_box(2)
    for kind, expect in (("I", 1.0), ("J", 1.0), ("K", 1.0)):
        est = evaluate(hp, kind, 0.05, region=box, config=cfg)
        assert est.doubled_value == pytest.approx(expect, abs=1e-9)
    est = evaluate(hp, "M", 0.05, region=box, m_value=0.5, config=cfg)
    assert est.doubled_value == pytest.approx(0.5, abs=1e-9)


def test_upper_bounds_bracket_lower_value():
    for name, kind in (("square01", "I"), ("twosquares", "K"),
                       ("disk05", "J")):
        est = evaluate(get_preset(name).target, kind, 0.04,
                       config=PackingConfig(orientations=4,
                                            offsets_per_orientation=2))
        ub = est.upper_bound()
        assert est.value <= ub + 1e-12
        assert est.quadrature_slack == 0.0
        assert set(est.upper_bounds) >= {"half_perimeter"}


def test_axis_kind_never_exceeds_rotating_kind():
    sq = get_preset("square01").target
    cfg = PackingConfig(orientations=8, offsets_per_orientation=2)
    for eps in (0.05, 0.02):
        pool = None
        est_full = evaluate(sq, "I", eps, config=cfg)
        est_axis = evaluate(sq, "AxisB", eps, config=cfg)
        assert est_axis.value <= est_full.value + 1e-12


def test_family_is_feasible_and_scores_match():
    est = evaluate(get_preset("twosquares").target, "I", 0.02,
                   config=PackingConfig(orientations=4,
                                        offsets_per_orientation=2))
    cubes = est.family.cubes
    for i in range(len(cubes)):
        for j in range(i + 1, len(cubes)):
            assert cubes_disjoint(cubes[i], cubes[j])
    assert len(est.per_cube_scores) == len(cubes)
    assert all(s > 0 for s in est.per_cube_scores)


def test_evaluate_1d_exact_reference_cases():
    # single interval, eps below the gaps: one interval catches one endpoint
    # at fraction 1/2, and the n = 1 cap is a single interval
    shape = IndicatorShape(IntervalUnion([(0.3, 0.6)]))
    assert evaluate_1d_exact(shape, 0.1) == pytest.approx(0.5)
    est = evaluate(shape, "I", 0.1)
    assert est.doubled_value == pytest.approx(1.0, abs=1e-12)
    # eps so large the interval sits strictly inside every candidate:
    # best fraction is 0.3 / 0.8
    wide = evaluate_1d_exact(shape, 0.8)
    t = 0.3 / 0.8
    assert wide == pytest.approx(2 * t * (1 - t), abs=1e-12)


def test_exact_1d_argmax_position():
    score, pos = exact_1d_argmax([(0.2, 0.5)], 0.1)
    assert score == pytest.approx(0.5)
    # the optimum straddles an endpoint at half coverage
    covered = min(0.5, pos + 0.05) - max(0.2, pos - 0.05)
    assert covered == pytest.approx(0.05, abs=1e-12)


def test_evaluate_matches_exact_on_interval_preset():
    iv = get_preset("interval1d")
    for eps in (0.05, 0.02, 0.01):
        est = evaluate(iv.target, "I", eps)
        assert est.value == pytest.approx(
            evaluate_1d_exact(iv.target, eps), abs=1e-9)


def test_k_kind_reaches_total_jump_on_intervals():
    shape = IndicatorShape(IntervalUnion([(0.2, 0.4), (0.6, 0.8)]))
    est = evaluate(shape, "K", 0.05)
    # four endpoints, each at fraction 1/2, no cap
    assert est.doubled_value == pytest.approx(4.0, abs=1e-9)


def test_m_kind_requires_m_value():
    with pytest.raises(InputError):
        evaluate(get_preset("square01").target, "M", 0.05)


def test_scaling_identity_exact():
    """Scaling target and cubes together multiplies the value by m^(n-1)."""
    sq = get_preset("square01").target
    eps = 0.05
    cfg = PackingConfig(orientations=4, offsets_per_orientation=2)
    base = evaluate(sq, "I", eps, config=cfg)
    from cubeosc import generate_pool, make_target
    for m in (0.25, 4.0):
        pool = generate_pool(make_target(sq), unit_box(2), eps, cfg)
        scaled_pool = CandidatePool(m * eps, [
            Candidate(c.cube.scaled(m), c.score, c.tag)
            for c in pool.candidates])
        target_m = make_target(sq).scaled(m)
        est_m = evaluate(target_m, "M", m * eps, m_value=m,
                         pool=scaled_pool, config=cfg)
        assert est_m.value == pytest.approx(m * base.value, abs=1e-12)


def test_row_from_estimate_fields():
    est = evaluate(get_preset("square01").target, "I", 0.05,
                   config=PackingConfig(orientations=4,
                                        offsets_per_orientation=2))
    row = row_from_estimate(est, target_limit=0.2)
    assert row.epsilon == 0.05
    assert row.value == pytest.approx(est.value)
    assert row.doubled_value == pytest.approx(est.doubled_value)
    assert row.cubes_used == est.n_cubes
    assert row.cap == est.cap
    assert row.gap_to_target == pytest.approx(0.2 - est.value)
    assert row.runtime_ms == 0


def test_invalid_epsilon_rejected():
    sq = get_preset("square01").target
    with pytest.raises(InputError):
        evaluate(sq, "I", 0.0)
    with pytest.raises(InputError):
        evaluate(sq, "I", -0.1)
