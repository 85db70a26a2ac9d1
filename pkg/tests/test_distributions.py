import math

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from expanderlab import (
    IntegerDistribution,
    InvalidArgumentError,
    bernoulli,
    binomial,
    centered_char_fn,
    centered_char_fn_grid,
    convolve,
    convolve_all,
    kolmogorov_distance,
    lp_distances,
    mean_variance,
    point_mass,
    tail_l1,
    tv_distance,
)
from expanderlab.distributions import char_grid_to_csv, from_csv, to_csv


@st.composite
def distributions(draw, max_len=12, min_len=1):
    """A random distribution on a short integer window."""
    n = draw(st.integers(min_len, max_len))
    raw = draw(st.lists(st.floats(0.0, 1.0), min_size=n, max_size=n))
    total = sum(raw)
    if total <= 0:
        raw = [1.0] * n
        total = float(n)
    offset = draw(st.integers(-20, 20))
    return IntegerDistribution(offset, np.array(raw) / total)


# ------------------------------------------------------------------ validation

def test_distribution_rejects_bad_mass():
    with pytest.raises(InvalidArgumentError):
        IntegerDistribution(0, np.array([0.5, 0.4]))


def test_distribution_clamps_dust_but_rejects_negatives():
    d = IntegerDistribution(0, np.array([0.5, 0.5, -1e-16]))
    assert d.probs[2] == 0.0
    with pytest.raises(InvalidArgumentError):
        IntegerDistribution(0, np.array([0.5, 0.5, -1e-9]))


def test_distribution_keeps_endpoints():
    d = IntegerDistribution(3, np.array([1e-18, 1.0 - 2e-18, 1e-18]))
    assert d.offset == 3
    assert d.probs.size == 3
    assert d.max_value == 5


# --------------------------------------------------------------------- metrics

def test_point_mass_distances():
    a, b = point_mass(0), point_mass(5)
    assert tv_distance(a, b) == 1.0
    l1, l2 = lp_distances(a, b)
    assert l1 == 2.0
    assert l2 == pytest.approx(math.sqrt(2.0))
    assert kolmogorov_distance(a, b) == 1.0
    assert tv_distance(a, a) == 0.0


def test_tail_l1_full_and_empty():
    a = binomial(4, 0.5)
    b = binomial(4, 0.25)
    full_l1 = lp_distances(a, b)[0]
    assert tail_l1(a, b, 2.0, 0.0) == pytest.approx(full_l1)
    assert tail_l1(a, b, 2.0, 100.0) == 0.0
    with pytest.raises(InvalidArgumentError):
        tail_l1(a, b, 2.0, -1.0)


def test_tail_l1_boundary_is_inclusive():
    a = IntegerDistribution(0, np.array([0.25, 0.5, 0.25]))
    b = IntegerDistribution(0, np.array([0.5, 0.25, 0.25]))
    # center 1, c=1: j=0 and j=2 are both at distance exactly 1 and must count
    assert tail_l1(a, b, 1.0, 1.0) == pytest.approx(0.25 + 0.25 - 0.25)


def test_convolve_bernoullis_gives_binomial():
    b = bernoulli(0.3)
    two = convolve(b, b)
    ref = binomial(2, 0.3)
    assert two.offset == 0
    assert np.abs(two.probs - ref.probs).max() <= 1e-15


def test_convolve_point_mass_shifts():
    d = binomial(3, 0.5)
    shifted = convolve(d, point_mass(7))
    assert shifted.offset == 7
    assert np.array_equal(shifted.probs, d.probs)


def test_convolve_all_requires_input():
    with pytest.raises(InvalidArgumentError):
        convolve_all([])


def test_mean_variance_binomial():
    for t, p in [(10, 0.5), (64, 0.25), (7, 0.9)]:
        mean, var = mean_variance(binomial(t, p))
        assert mean == pytest.approx(t * p, abs=1e-10)
        assert var == pytest.approx(t * p * (1 - p), abs=1e-10)
    assert mean_variance(point_mass(4)) == (4.0, 0.0)


# ---------------------------------------------------------- character function

def test_char_fn_at_zero_is_one():
    assert centered_char_fn(binomial(9, 0.4), 3.6, 0.0) == pytest.approx(1.0)


def test_char_fn_bernoulli_closed_form():
    p = 0.3
    d = bernoulli(p)
    for theta in (-3.0, -0.5, 0.7, math.pi):
        got = centered_char_fn(d, p, theta)
        want = (1 - p) * np.exp(1j * theta * p) + p * np.exp(-1j * theta * (1 - p))
        assert abs(got - want) <= 1e-14


def test_char_fn_rejects_out_of_range_theta():
    with pytest.raises(InvalidArgumentError):
        centered_char_fn(bernoulli(0.5), 0.5, 3.5)
    with pytest.raises(InvalidArgumentError):
        centered_char_fn_grid(bernoulli(0.5), 0.5, [0.0, -4.0])


def test_char_fn_grid_matches_scalar():
    d = binomial(12, 0.35)
    thetas = np.linspace(-math.pi, math.pi, 17)
    grid = centered_char_fn_grid(d, 12 * 0.35, thetas)
    for theta, value in zip(thetas, grid):
        assert abs(value - centered_char_fn(d, 12 * 0.35, theta)) <= 1e-13


# -------------------------------------------------------------------- binomial

def test_binomial_two_half_exact():
    d = binomial(2, 0.5)
    assert np.array_equal(d.probs, np.array([0.25, 0.5, 0.25]))


def test_binomial_degenerate_cases():
    assert binomial(5, 0.0).offset == 0
    assert binomial(5, 0.0).probs.size == 1
    assert binomial(5, 1.0).offset == 5
    assert binomial(0, 0.7).probs.size == 1
    with pytest.raises(InvalidArgumentError):
        binomial(-1, 0.5)
    with pytest.raises(InvalidArgumentError):
        binomial(3, 1.5)


@pytest.mark.parametrize("t,p", [(1, 0.5), (8, 0.25), (64, 0.75), (256, 0.5),
                                 (100, 0.01), (100, 0.99), (1024, 0.3)])
def test_binomial_against_scipy(t, p):
    ours = binomial(t, p).probs
    ref = scipy.stats.binom.pmf(np.arange(t + 1), t, p)
    scale = np.maximum(ref, 1e-300)
    assert (np.abs(ours - ref) / np.maximum(scale, 1e-18)).max() <= 1e-10


def test_bernoulli_support():
    d = bernoulli(0.25)
    assert d.offset == 0
    assert np.allclose(d.probs, [0.75, 0.25])


# ------------------------------------------------------------------ csv formats

def test_distribution_csv_round_trip():
    d = binomial(6, 0.3)
    text = to_csv(d)
    assert text.startswith("j,prob\n0,")
    back = from_csv(text)
    assert back.offset == d.offset
    assert np.array_equal(back.probs, d.probs)


def test_distribution_csv_rejects_gaps():
    with pytest.raises(InvalidArgumentError):
        from_csv("j,prob\n0,0.5\n2,0.5\n")


def test_char_grid_csv_shape():
    d = bernoulli(0.5)
    thetas = [0.0, 1.0]
    values = centered_char_fn_grid(d, 0.5, thetas)
    text = char_grid_to_csv(thetas, values)
    lines = text.strip().splitlines()
    assert lines[0] == "theta,re,im,abs"
    assert len(lines) == 3
    assert lines[1].split(",")[1] == "1"


# ------------------------------------------------------------------ properties

@settings(max_examples=100, deadline=None)
@given(a=distributions(), b=distributions())
def test_tv_axioms(a, b):
    t = tv_distance(a, b)
    assert 0.0 <= t <= 1.0 + 1e-12
    assert t == pytest.approx(tv_distance(b, a))
    assert tv_distance(a, a) <= 1e-15


@settings(max_examples=100, deadline=None)
@given(a=distributions(), b=distributions(), c=distributions())
def test_tv_triangle(a, b, c):
    assert tv_distance(a, c) <= tv_distance(a, b) + tv_distance(b, c) + 1e-12


@settings(max_examples=100, deadline=None)
@given(a=distributions(), b=distributions())
def test_kolmogorov_below_tv_and_l2_below_l1(a, b):
    assert kolmogorov_distance(a, b) <= tv_distance(a, b) + 1e-12
    l1, l2 = lp_distances(a, b)
    assert l2 <= l1 + 1e-12
    assert l1 <= 2.0 + 1e-12
    assert l1 == pytest.approx(2.0 * tv_distance(a, b))


@settings(max_examples=100, deadline=None)
@given(a=distributions(), b=distributions(), c=st.floats(0.0, 30.0), shift=st.floats(0.0, 3.0))
def test_tail_l1_monotone_in_c(a, b, c, shift):
    center = (a.offset + b.offset) / 2.0
    assert tail_l1(a, b, center, c + shift) <= tail_l1(a, b, center, c) + 1e-15


@settings(max_examples=60, deadline=None)
@given(a=distributions(max_len=8), b=distributions(max_len=8))
def test_convolution_multiplies_char_fns(a, b):
    conv = convolve(a, b)
    for theta in (-2.0, 0.5, 3.0):
        lhs = centered_char_fn(conv, 0.0, theta)
        rhs = centered_char_fn(a, 0.0, theta) * centered_char_fn(b, 0.0, theta)
        assert abs(lhs - rhs) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(a=distributions(), b=distributions())
def test_parseval_identity(a, b):
    # squared l2 distance equals the mean of |cf gap|^2 over [-pi, pi]
    thetas = np.linspace(-math.pi, math.pi, 4097)
    center = 0.0
    gap = np.abs(centered_char_fn_grid(a, center, thetas)
                 - centered_char_fn_grid(b, center, thetas)) ** 2
    integral = np.trapezoid(gap, thetas) / (2.0 * math.pi)
    l2 = lp_distances(a, b)[1]
    if l2 > 1e-9:
        assert integral == pytest.approx(l2 ** 2, rel=1e-6)
    else:
        assert integral <= 1e-12
