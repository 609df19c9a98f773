import math

import pytest
from hypothesis import given, strategies as st

from spotrank.scoring import (
    Bound,
    ConfigError,
    EXP,
    LINEAR,
    LOG10,
    Maxima,
    ScoringConfig,
    SiKind,
    SiTransform,
    VoteTally,
    WholeSiVariant,
    average_rating,
    combined_range,
    combined_score,
    effective_maxima,
    poly,
    si_range,
    spotlight_index,
    validate_config,
    wilson_interval,
)

from helpers import wilson_bisect

ALL_KINDS = list(SiKind)
ALL_TRANSFORMS = [LINEAR, LOG10, EXP, poly(2.0)]


def consistent_case(u, d, extra_n, extra_u, extra_d, floor):
    """A tally plus maxima that dominate it, as a live question would produce."""
    tally = VoteTally(u, d)
    maxima = effective_maxima(tally.n + extra_n, u + extra_u, d + extra_d, floor)
    return tally, maxima


tallies = st.builds(VoteTally, st.integers(0, 2000), st.integers(0, 2000))

consistent_cases = st.builds(
    consistent_case,
    st.integers(0, 500),
    st.integers(0, 500),
    st.integers(0, 500),
    st.integers(0, 500),
    st.integers(0, 500),
    st.integers(1, 20),
)


# --- wilson interval ---------------------------------------------------------


def test_zero_z_collapses_to_proportion():
    iv = wilson_interval(VoteTally(5, 5), 0)
    assert (iv.lower, iv.upper) == (0.5, 0.5)


def test_no_votes_is_total_uncertainty():
    iv = wilson_interval(VoteTally(0, 0), 2)
    assert (iv.lower, iv.upper) == (0.0, 1.0)


def test_unanimous_lower_closed_form():
    iv = wilson_interval(VoteTally(10, 0), 2)
    assert iv.lower == pytest.approx(10 / 14, abs=1e-12)
    assert iv.upper == 1.0


def test_against_frozen_bisection_value():
    # frozen output of wilson_bisect(1, 3, 1.96)
    iv = wilson_interval(VoteTally(1, 3), 1.96)
    assert iv.lower == pytest.approx(0.045586062644636216, abs=1e-10)
    assert iv.upper == pytest.approx(0.6993639475573634, abs=1e-10)


def test_negative_z_rejected():
    with pytest.raises(ValueError):
        wilson_interval(VoteTally(1, 1), -0.5)


@pytest.mark.parametrize("z", [1.0, 2.0, 5.0, 10.0])
@pytest.mark.parametrize("n", [1, 2, 3, 7, 10, 100, 999, 1000])
def test_extreme_proportion_closed_forms(n, z):
    unanimous = wilson_interval(VoteTally(n, 0), z)
    assert unanimous.lower == pytest.approx(n / (n + z * z), abs=1e-12)
    assert unanimous.upper == 1.0
    rejected = wilson_interval(VoteTally(0, n), z)
    assert rejected.lower == 0.0
    assert rejected.upper == pytest.approx(z * z / (n + z * z), abs=1e-12)


@given(u=st.integers(0, 60), d=st.integers(0, 60), z=st.sampled_from([0.5, 1.0, 1.96, 2.0, 5.0]))
def test_matches_bisection_oracle(u, d, z):
    iv = wilson_interval(VoteTally(u, d), z)
    lower, upper = wilson_bisect(u, d, z)
    assert iv.lower == pytest.approx(lower, abs=1e-10)
    assert iv.upper == pytest.approx(upper, abs=1e-10)


@given(u=st.integers(0, 1000), d=st.integers(0, 1000), z=st.floats(0, 50))
def test_interval_contains_proportion(u, d, z):
    tally = VoteTally(u, d)
    iv = wilson_interval(tally, z)
    assert 0.0 <= iv.lower <= iv.upper <= 1.0
    if tally.n > 0:
        assert iv.lower <= tally.p <= iv.upper


@given(u=st.integers(0, 1000), d=st.integers(0, 1000))
def test_zero_z_is_exact_proportion(u, d):
    tally = VoteTally(u, d)
    if tally.n == 0:
        return
    iv = wilson_interval(tally, 0.0)
    assert iv.lower == iv.upper == tally.p


@pytest.mark.parametrize("z", [0.0, 2.0, 5.0, 10.0])
def test_lower_bound_monotone_exhaustive(z):
    top = 200
    lower = [
        [wilson_interval(VoteTally(u, d), z).lower for d in range(top + 1)]
        for u in range(top + 2)
    ]
    for u in range(top + 1):
        for d in range(top + 1):
            assert lower[u + 1][d] >= lower[u][d]   # extra up-vote never hurts
            if d < top:
                assert lower[u][d + 1] <= lower[u][d]  # extra down-vote never helps


# --- average rating ----------------------------------------------------------


@pytest.mark.parametrize(
    "up,down,expected", [(3, 1, 0.75), (0, 0, 0.0), (0, 7, 0.0)]
)
def test_average_rating(up, down, expected):
    assert average_rating(VoteTally(up, down)) == expected


# --- effective maxima --------------------------------------------------------


def test_floor_replaces_zero():
    assert effective_maxima(0, 0, 0, 1) == Maxima(1, 1, 1)


def test_floor_shrinks_early_bias():
    assert effective_maxima(7, 3, 2, 10) == Maxima(10, 10, 10)


def test_floor_inactive_above_threshold():
    assert effective_maxima(500, 300, 200, 10) == Maxima(500, 300, 200)


def test_floor_must_be_positive():
    with pytest.raises(ValueError):
        effective_maxima(5, 5, 5, 0)


# --- spotlight index ---------------------------------------------------------


def test_whole_linear_worked_trio():
    maxima = Maxima(100, 100, 100)
    values = [
        spotlight_index(VoteTally(n, 0), maxima, SiKind.WHOLE) for n in (1, 50, 100)
    ]
    assert values == [0.01, 0.50, 1.00]


@pytest.mark.parametrize("n,expected", [(9, 0.25), (99, 0.5), (999, 0.75), (9999, 1.0)])
def test_log_whole_decade_ladder(n, expected):
    maxima = Maxima(9999, 9999, 9999)
    si = spotlight_index(VoteTally(n, 0), maxima, SiKind.WHOLE, LOG10)
    assert si == pytest.approx(expected, abs=1e-12)


def test_net_zero_at_even_split():
    maxima = Maxima(40, 40, 40)
    for transform in (LINEAR, LOG10, poly(2.0), poly(0.5)):
        assert spotlight_index(VoteTally(7, 7), maxima, SiKind.NET, transform) == 0.0
    # the exponential net form has no sign factor: exp(u - d - n_max) > 0 even at u = d
    assert spotlight_index(VoteTally(7, 7), maxima, SiKind.NET, EXP) == math.exp(-40)


def test_exp_whole_at_max_is_one():
    assert spotlight_index(VoteTally(5, 4), Maxima(9, 9, 9), SiKind.WHOLE, EXP) == 1.0


def test_poly_net_hand_value():
    si = spotlight_index(VoteTally(30, 10), Maxima(100, 100, 100), SiKind.NET, poly(2.0))
    assert si == pytest.approx(0.04, abs=1e-12)


def test_upvote_and_downvote_normalizers():
    maxima = Maxima(20, 10, 8)
    assert spotlight_index(VoteTally(5, 2), maxima, SiKind.UPVOTE) == 0.5
    assert spotlight_index(VoteTally(5, 2), maxima, SiKind.DOWNVOTE) == -0.25


def test_whole_variants():
    maxima = Maxima(9, 9, 9)
    tally = VoteTally(3, 2)
    assert spotlight_index(tally, maxima, SiKind.WHOLE) == 5 / 9
    assert (
        spotlight_index(tally, maxima, SiKind.WHOLE, whole_variant=WholeSiVariant.SHIFT_DENOM)
        == 0.5
    )
    assert (
        spotlight_index(tally, maxima, SiKind.WHOLE, whole_variant=WholeSiVariant.SHIFT_BOTH)
        == 0.6
    )


def test_variants_only_touch_linear_whole():
    maxima = Maxima(9, 9, 9)
    tally = VoteTally(3, 2)
    for kind in (SiKind.NET, SiKind.POSITIVE, SiKind.UPVOTE):
        plain = spotlight_index(tally, maxima, kind)
        shifted = spotlight_index(tally, maxima, kind, whole_variant=WholeSiVariant.SHIFT_BOTH)
        assert plain == shifted
    log_plain = spotlight_index(tally, maxima, SiKind.WHOLE, LOG10)
    log_shifted = spotlight_index(
        tally, maxima, SiKind.WHOLE, LOG10, whole_variant=WholeSiVariant.SHIFT_BOTH
    )
    assert log_plain == log_shifted


def test_log_net_is_odd_in_vote_swap():
    maxima = Maxima(30, 30, 30)
    assert spotlight_index(VoteTally(2, 7), maxima, SiKind.NET, LOG10) == -spotlight_index(
        VoteTally(7, 2), maxima, SiKind.NET, LOG10
    )


def test_exp_uses_difference_not_quotient():
    # e^800 / e^1000 would be inf/inf = nan; the difference form stays exact
    maxima = Maxima(1000, 1000, 1000)
    si = spotlight_index(VoteTally(800, 0), maxima, SiKind.POSITIVE, EXP)
    assert not math.isnan(si)
    assert si == math.exp(-200)


def test_exp_far_below_max_underflows_cleanly():
    maxima = Maxima(10**6, 10**6, 10**6)
    si = spotlight_index(VoteTally(0, 0), maxima, SiKind.WHOLE, EXP)
    assert si == 0.0  # true value is below the smallest double; no error, no nan
    near = spotlight_index(VoteTally(10**6 - 50, 0), maxima, SiKind.WHOLE, EXP)
    assert near == math.exp(-50)


# --- ranges ------------------------------------------------------------------


@pytest.mark.parametrize("transform", ALL_TRANSFORMS)
@pytest.mark.parametrize(
    "kind,expected",
    [
        (SiKind.WHOLE, (0.0, 1.0)),
        (SiKind.POSITIVE, (0.0, 1.0)),
        (SiKind.UPVOTE, (0.0, 1.0)),
        (SiKind.NET, (-1.0, 1.0)),
        (SiKind.NEGATIVE, (-1.0, 0.0)),
        (SiKind.DOWNVOTE, (-1.0, 0.0)),
    ],
)
def test_si_range_table(kind, expected, transform):
    assert si_range(kind, transform) == expected


@given(case=consistent_cases, kind=st.sampled_from(ALL_KINDS),
       transform=st.sampled_from(ALL_TRANSFORMS),
       variant=st.sampled_from(list(WholeSiVariant)))
def test_si_stays_in_range(case, kind, transform, variant):
    tally, maxima = case
    lo, hi = si_range(kind, transform)
    si = spotlight_index(tally, maxima, kind, transform, variant)
    assert lo <= si <= hi


@given(
    u=st.integers(0, 1000),
    d=st.integers(0, 1000),
    extra=st.integers(0, 1000),
    k=st.integers(1, 1000),
    kind=st.sampled_from(ALL_KINDS),
)
def test_linear_si_scale_invariant(u, d, extra, k, kind):
    tally = VoteTally(u, d)
    maxima = effective_maxima(u + d + extra, u + extra, d + extra)
    scaled_tally = VoteTally(k * u, k * d)
    scaled_maxima = Maxima(k * maxima.n_max, k * maxima.u_max, k * maxima.d_max)
    assert spotlight_index(tally, maxima, kind) == spotlight_index(
        scaled_tally, scaled_maxima, kind
    )


@given(
    case_a=st.tuples(st.integers(0, 400), st.integers(0, 400)),
    case_b=st.tuples(st.integers(0, 400), st.integers(0, 400)),
    n_max_extra=st.integers(0, 100),
    kind=st.sampled_from(ALL_KINDS),
    transform=st.sampled_from([LOG10, EXP, poly(0.5), poly(2.0), poly(3.0)]),
)
def test_transforms_preserve_strict_order(case_a, case_b, n_max_extra, kind, transform):
    # bounded counts keep every transformed value inside double range, where
    # the monotone reshaping provably cannot collapse a strict inequality
    n_max = max(case_a[0] + case_a[1], case_b[0] + case_b[1], 1) + n_max_extra
    maxima = Maxima(n_max, max(case_a[0], case_b[0], 1), max(case_a[1], case_b[1], 1))
    tally_a, tally_b = VoteTally(*case_a), VoteTally(*case_b)
    linear_a = spotlight_index(tally_a, maxima, kind)
    linear_b = spotlight_index(tally_b, maxima, kind)
    if linear_a > linear_b:
        assert spotlight_index(tally_a, maxima, kind, transform) > spotlight_index(
            tally_b, maxima, kind, transform
        )


# --- combined score ----------------------------------------------------------


def test_full_weight_is_pure_wilson():
    config = ScoringConfig(z=2.0, p_weight=1.0)
    b = combined_score(VoteTally(12, 4), Maxima(30, 20, 10), config)
    assert b.combined == b.wilson_used == b.wilson.lower


def test_zero_weight_is_pure_si():
    config = ScoringConfig(z=2.0, p_weight=0.0)
    b = combined_score(VoteTally(12, 4), Maxima(30, 20, 10), config)
    assert b.combined == b.si


def test_upper_bound_selection():
    config = ScoringConfig(z=2.0, p_weight=1.0, bound=Bound.UPPER)
    b = combined_score(VoteTally(3, 3), Maxima(10, 5, 5), config)
    assert b.wilson_used == b.wilson.upper
    assert b.combined == b.wilson.upper


def test_controversial_answer_outranks_small_unanimous_at_half_weight():
    maxima = Maxima(1000, 500, 500)
    controversial = VoteTally(500, 500)
    unanimous = VoteTally(10, 0)
    blend = ScoringConfig(z=2.0, p_weight=0.5)
    wilson_only = ScoringConfig(z=2.0, p_weight=1.0)
    assert (
        combined_score(controversial, maxima, blend).combined
        > combined_score(unanimous, maxima, blend).combined
    )
    assert (
        combined_score(controversial, maxima, wilson_only).combined
        < combined_score(unanimous, maxima, wilson_only).combined
    )


def test_negative_scores_survive_unclamped():
    config = ScoringConfig(z=2.0, p_weight=0.5, si_kind=SiKind.NET)
    b = combined_score(VoteTally(0, 90), Maxima(100, 50, 90), config)
    assert b.combined < 0.0


@given(case=consistent_cases, p_weight=st.floats(0, 1), z=st.floats(0, 25),
       kind=st.sampled_from(ALL_KINDS), transform=st.sampled_from(ALL_TRANSFORMS))
def test_combined_respects_blend_and_range(case, p_weight, z, kind, transform):
    tally, maxima = case
    config = ScoringConfig(z=z, p_weight=p_weight, si_kind=kind, si_transform=transform)
    b = combined_score(tally, maxima, config)
    assert b.combined == p_weight * b.wilson_used + (1.0 - p_weight) * b.si
    lo, hi = combined_range(kind, p_weight)
    assert lo - 1e-12 <= b.combined <= hi + 1e-12


@pytest.mark.parametrize(
    "kind,p_weight,expected",
    [
        (SiKind.WHOLE, 0.5, (0.0, 1.0)),
        (SiKind.NET, 0.25, (-0.75, 1.0)),
        (SiKind.NEGATIVE, 0.25, (-0.75, 0.25)),
        (SiKind.DOWNVOTE, 1.0, (0.0, 1.0)),
    ],
)
def test_combined_range_values(kind, p_weight, expected):
    assert combined_range(kind, p_weight) == pytest.approx(expected, abs=0)


# --- config validation -------------------------------------------------------


def test_valid_config_passes_through():
    config = ScoringConfig(z=2.0, p_weight=0.5)
    assert validate_config(config) is config


@pytest.mark.parametrize(
    "config,field",
    [
        (ScoringConfig(p_weight=1.5), "p_weight"),
        (ScoringConfig(p_weight=-0.1), "p_weight"),
        (ScoringConfig(z=-1.0), "z"),
        (ScoringConfig(si_transform=SiTransform("poly", 0.0)), "si_transform.exponent"),
        (ScoringConfig(si_transform=SiTransform("poly", -2.0)), "si_transform.exponent"),
        (ScoringConfig(n_max_floor=0), "n_max_floor"),
    ],
)
def test_invalid_configs_name_the_field(config, field):
    with pytest.raises(ConfigError) as exc_info:
        validate_config(config)
    assert exc_info.value.field == field
    assert field in str(exc_info.value)


# --- type invariants ---------------------------------------------------------


def test_negative_counts_rejected():
    with pytest.raises(ValueError):
        VoteTally(-1, 0)
    with pytest.raises(ValueError):
        VoteTally(0, -3)


def test_proportion_undefined_without_votes():
    with pytest.raises(ValueError):
        VoteTally(0, 0).p


def test_maxima_must_be_floored():
    with pytest.raises(ValueError):
        Maxima(0, 1, 1)


def test_unknown_transform_rejected():
    with pytest.raises(ValueError):
        SiTransform("cubic")
