from fractions import Fraction

import pytest

from conftest import fibonacci_sequence
from sadic_builder.errors import LanguageError
from sadic_builder.language import (
    ComplexityProfile,
    PrefixStability,
    boshernitzan_bound,
    complexity_bound,
    complexity_profile,
    factors,
    generate_word,
    is_prefix_stable,
    locate_level,
    prefix_stability,
    toeplitz_check,
)
from sadic_builder.morphisms import DirectiveSequence, Morphism, word


def period_doubling(depth: int) -> DirectiveSequence:
    return DirectiveSequence([Morphism([[1, 2], [1, 1]], 2)] * depth)


def test_fibonacci_prefix(fibonacci):
    assert generate_word(fibonacci, 0, 1, 10) == word([1, 2, 1, 1, 2, 1, 2, 1, 1, 2])
    assert is_prefix_stable(fibonacci, 0, 50)


def test_prefix_stability_on_left_proper_levels(fibonacci):
    assert prefix_stability(fibonacci, 0, 50) == PrefixStability(True, 50, True)
    assert prefix_stability(period_doubling(8), 0, 100).stable


def test_prefix_stability_needs_left_proper_levels():
    thue_morse = Morphism([[1, 2], [2, 1]], 2)
    assert prefix_stability(DirectiveSequence([thue_morse] * 6), 0, 20) == PrefixStability(False)
    # tau_0 is never inspected
    mixed = DirectiveSequence([thue_morse] + [Morphism([[1, 2], [1]], 2)] * 6)
    assert prefix_stability(mixed, 0, 20).stable


def test_generate_word_runs_prefix_check(fibonacci, caplog):
    with caplog.at_level("DEBUG", logger="sadic-builder"):
        generate_word(fibonacci, 0, 1, 10)
    assert "Prefix stability at level 0, length 10: True" in caplog.text
    caplog.clear()
    with caplog.at_level("DEBUG", logger="sadic-builder"):
        generate_word(DirectiveSequence([Morphism([[1, 2], [2, 1]], 2)] * 6), 0, 1, 10)
    assert "Prefix stability" not in caplog.text


def test_generate_word_matches_composition(fibonacci):
    full = fibonacci.compose(0, 9).image(2)
    assert generate_word(fibonacci, 0, 2, len(full), depth=9) == full
    assert generate_word(fibonacci, 3, 1, 7, depth=9) == fibonacci.compose(3, 9).image(1)[:7]


@pytest.mark.parametrize(
    "level, letter, length, depth",
    [(0, 1, 10**6, None), (0, 3, 5, None), (5, 1, 5, 5), (0, 1, 5, 13)],
)
def test_generate_word_errors(fibonacci, level, letter, length, depth):
    with pytest.raises(LanguageError):
        generate_word(fibonacci, level, letter, length, depth)


def test_fibonacci_factors(fibonacci):
    three = factors(fibonacci, 3)
    assert three.stabilized
    assert set(three) == {word([1, 1, 2]), word([1, 2, 1]), word([2, 1, 1]), word([2, 1, 2])}


def test_generated_windows_are_factors(fibonacci):
    five = factors(fibonacci, 5)
    prefix = generate_word(fibonacci, 0, 1, 200)
    assert len(five) == 6
    assert all(prefix[s : s + 5] in five for s in range(len(prefix) - 4))


def test_factor_errors(fibonacci):
    with pytest.raises(LanguageError):
        factors(fibonacci, 0)
    with pytest.raises(LanguageError):
        factors(DirectiveSequence([Morphism.identity(2)] * 3), 2)


def test_partial_factor_set():
    result = factors(fibonacci_sequence(3), 10)
    assert result.partial


def test_sturmian_profile(fibonacci):
    profile = complexity_profile(fibonacci, 50)
    assert profile.stabilized and not profile.partial
    assert all(p == n + 1 for n, p in profile.items())
    assert profile.p(50) == 51


def test_constant_profile():
    ds = DirectiveSequence([Morphism([[1, 1]], 1)] * 8)
    profile = complexity_profile(ds, 20)
    assert profile.values == (1,) * 20


def test_period_doubling_profile_is_linear():
    profile = complexity_profile(period_doubling(10), 64)
    assert profile.p(1) == 2
    assert all(p <= 3 * n for n, p in profile.items())


def test_profile_range():
    profile = ComplexityProfile((2, 3, 4))
    assert profile.n_max == 3
    with pytest.raises(LanguageError):
        profile.p(4)
    with pytest.raises(LanguageError):
        ComplexityProfile(())


def test_locate_level(fibonacci):
    assert locate_level(fibonacci, 2) == 1
    assert locate_level(fibonacci, 4) == 2
    assert locate_level(fibonacci, 5) == 3
    with pytest.raises(LanguageError):
        locate_level(fibonacci, 1)
    with pytest.raises(LanguageError):
        locate_level(fibonacci, 10**9)


def test_bound_regime_j(fibonacci):
    value = complexity_bound(fibonacci, 2)
    assert value.regime == "J"
    assert value.level == 1
    assert value.bound == (2 + 2 + 3 + 3 * 3) * 2
    assert value.coarse == 5 * 2**3 * 2


def test_bound_regime_i():
    value = complexity_bound(period_doubling(6), 2)
    assert value.regime == "I"
    assert value.bound == (2 + 3 * 3) * 2
    assert value.coarse == 3 * 2**3 * 2


def test_profile_below_bound(fibonacci):
    profile = complexity_profile(fibonacci, 40)
    for n, p in profile.items():
        if n >= 2:
            assert p <= complexity_bound(fibonacci, n).bound


def test_toeplitz_period_doubling():
    w = generate_word(period_doubling(6), 0, 1, 64)
    report = toeplitz_check(w, [2, 4, 8])
    assert [d for _, d in report.hole_densities] == [Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)]
    assert report.periods[0] == 2
    assert report.periods[1] == 4
    assert report.periods[3] == 8
    assert report.periods[7] is None
    assert 7 in report.unverified
    assert report.flag
    assert not report.strict


def test_verified_positions_repeat_along_their_period():
    w = generate_word(period_doubling(6), 0, 1, 64)
    report = toeplitz_check(w, [2, 4, 8])
    for p, q in enumerate(report.periods):
        if q is not None:
            assert len(set(w[p % q :: q])) == 1


def test_toeplitz_strict_on_periodic_word():
    report = toeplitz_check(word([1, 2] * 8), [2])
    assert report.flag and report.strict
    assert report.unverified == ()


def test_toeplitz_rejects_sturmian(fibonacci):
    w = generate_word(fibonacci, 0, 1, 64)
    report = toeplitz_check(w, [2, 3, 5])
    assert not report.flag
    assert report.hole_densities[-1][1] > Fraction(1, 4)


def test_toeplitz_ignores_long_candidates():
    w = generate_word(period_doubling(6), 0, 1, 64)
    report = toeplitz_check(w, [2, 4, 40])
    assert report.candidates == (2, 4)
    assert not toeplitz_check(word([1, 2]), [5]).flag


def test_toeplitz_density_threshold():
    w = generate_word(period_doubling(6), 0, 1, 64)
    assert not toeplitz_check(w, [2, 4], max_hole_density=Fraction(1, 8)).flag


@pytest.mark.parametrize("slope, expected", [(1, 1), (2, 2)])
def test_boshernitzan(slope, expected):
    profile = ComplexityProfile(tuple(slope * n + 1 for n in range(1, 101)))
    estimate = boshernitzan_bound(profile)
    assert estimate.measure_bound == expected
    assert estimate.alpha_estimate == slope + Fraction(2, 100)
