import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from midist.core import empirical_mi
from midist.errors import InputError, UndefinedFillError
from midist.missing import (
    fill_estimate,
    mi_mean_missing,
    mi_variance_missing,
    moments_with_missing,
)
from midist.moments import mi_moments
from midist.tables import ContingencyTable, PosteriorCounts, PriorSpec

# All worked examples are stated on the post-prior grid, so they are
# reproduced with a zero-weight prior on all-positive observed counts.
W0 = PriorSpec("custom", 0.0)


def transcribed_variance(counts, unlabeled):
    """Straight plain-loop transcription of the 1/N variance, kept
    deliberately independent of the package implementation."""
    r, s = len(counts), len(counts[0])
    row_sums = [sum(counts[i]) for i in range(r)]
    total = sum(row_sums) + sum(unlabeled)
    pi = [
        [
            (row_sums[i] + unlabeled[i]) / total * counts[i][j] / row_sums[i]
            if row_sums[i]
            else 0.0
            for j in range(s)
        ]
        for i in range(r)
    ]
    pi_rows = [sum(pi[i]) for i in range(r)]
    pi_cols = [sum(pi[i][j] for i in range(r)) for j in range(s)]
    rho = [
        [total * pi[i][j] ** 2 / counts[i][j] if counts[i][j] else 0.0 for j in range(s)]
        for i in range(r)
    ]
    rho_rows = [sum(rho[i]) for i in range(r)]
    k_bar = 0.0
    j_rows = [0.0] * r
    for i in range(r):
        for j in range(s):
            if pi[i][j] > 0:
                log_ratio = math.log(pi[i][j] / (pi_rows[i] * pi_cols[j]))
                k_bar += rho[i][j] * log_ratio**2
                j_rows[i] += rho[i][j] * log_ratio
    q_bar = j_bar = p_bar = 0.0
    for i in range(r):
        if unlabeled[i] > 0:
            rho_i = total * pi_rows[i] ** 2 / unlabeled[i]
            q_i = rho_i / (rho_i + rho_rows[i])
            p_bar += j_rows[i] ** 2 * q_i / rho_i
        else:
            q_i = 1.0
        q_bar += rho_rows[i] * q_i
        j_bar += j_rows[i] * q_i
    return (k_bar - j_bar**2 / q_bar - p_bar) / total


class TestFillEstimate:
    def test_spreads_unlabeled_mass_proportionally(self):
        t = ContingencyTable([[1, 1], [1, 1]], missing_class=[2, 0])
        pi = fill_estimate(t, W0)
        assert np.allclose(pi, [[1 / 3, 1 / 3], [1 / 6, 1 / 6]], atol=1e-15)
        assert pi.sum() == pytest.approx(1.0, abs=1e-12)

    def test_complete_case_gives_relative_frequencies(self):
        t = ContingencyTable([[8, 2], [4, 16]])
        assert np.allclose(fill_estimate(t, W0), np.array([[8, 2], [4, 16]]) / 30.0)

    def test_diagonal(self):
        t = ContingencyTable([[4, 0], [0, 4]], missing_class=[0, 0])
        assert np.allclose(fill_estimate(t, W0), [[0.5, 0], [0, 0.5]])

    def test_unobserved_row_with_unlabeled_mass_rejected(self):
        t = ContingencyTable([[0, 0], [1, 1]], missing_class=[3, 0])
        with pytest.raises(UndefinedFillError, match="row 0"):
            fill_estimate(t, W0)

    def test_feature_margin_rejected_here(self):
        t = ContingencyTable([[1, 1], [1, 1]], missing_feature=[1, 0])
        with pytest.raises(InputError):
            fill_estimate(t, W0)


class TestMeanMissing:
    def test_complete_case_equals_plugin_value(self):
        t = ContingencyTable([[8, 2], [4, 16]])
        expected = empirical_mi(PosteriorCounts.from_grid([[8, 2], [4, 16]]))
        assert mi_mean_missing(t, W0) == pytest.approx(expected, abs=1e-12)

    def test_rank_one_fill_is_zero(self):
        # the filled grid ((1/3,1/3),(1/6,1/6)) has proportional rows
        t = ContingencyTable([[1, 1], [1, 1]], missing_class=[2, 0])
        assert mi_mean_missing(t, W0) == 0.0


class TestVarianceMissing:
    def test_complete_case_reduction(self):
        t = ContingencyTable([[8, 2], [4, 16]])
        mom = mi_moments(PosteriorCounts.from_grid([[8, 2], [4, 16]]))
        mm = mi_variance_missing(t, W0)
        assert mm.variance == pytest.approx((mom.k_term - mom.j_term**2) / 30.0, abs=1e-12)
        assert mm.q_bar == pytest.approx(1.0, abs=1e-12)
        assert mm.p_bar == 0.0
        assert mm.k_bar == pytest.approx(mom.k_term, abs=1e-12)
        assert mm.j_bar == pytest.approx(mom.j_term, abs=1e-12)

    def test_rank_one_fill_gives_zero_variance(self):
        mm = mi_variance_missing(ContingencyTable([[1, 1], [1, 1]], missing_class=[2, 0]), W0)
        assert mm.k_bar == 0.0 and mm.j_bar == 0.0
        assert mm.variance == 0.0

    def test_against_plain_loop_transcription(self):
        mm = mi_variance_missing(ContingencyTable([[8, 2], [4, 16]], missing_class=[3, 5]), W0)
        assert mm.variance == pytest.approx(transcribed_variance([[8, 2], [4, 16]], [3, 5]), abs=1e-12)

    def test_randomised_against_transcription(self):
        rng = np.random.default_rng(17)
        for _ in range(40):
            r, s = rng.integers(2, 5, size=2)
            counts = rng.integers(1, 25, size=(r, s))
            unlabeled = rng.integers(0, 8, size=r)
            mm = mi_variance_missing(ContingencyTable(counts, missing_class=unlabeled), W0)
            expected = transcribed_variance(counts.tolist(), unlabeled.tolist())
            assert mm.variance == pytest.approx(max(0.0, expected), abs=1e-12)

    def test_sentinel_for_rows_without_unlabeled_mass(self):
        mm = mi_variance_missing(ContingencyTable([[3, 1], [2, 4]], missing_class=[2, 0]), W0)
        assert math.isinf(mm.rho_missing[1])
        assert mm.q_bar_i[1] == 1.0
        assert 0.0 < mm.q_bar_i[0] < 1.0

    def test_continuous_at_vanishing_unlabeled_mass(self):
        complete = mi_variance_missing(ContingencyTable([[8, 2], [4, 16]]), W0)
        tiny = mi_variance_missing(
            ContingencyTable([[8, 2], [4, 16]], missing_class=[1e-9, 0.0]), W0
        )
        assert tiny.variance == pytest.approx(complete.variance, abs=1e-9)
        assert tiny.mean == pytest.approx(complete.mean, abs=1e-9)

    def test_prior_extrapolation_flag(self):
        t = ContingencyTable([[3, 1], [2, 4]], missing_class=[1, 0])
        assert not mi_variance_missing(t, PriorSpec("uniform")).prior_extrapolation
        assert mi_variance_missing(t, PriorSpec("jeffreys")).prior_extrapolation


class TestDispatch:
    def test_feature_axis_routes_through_transpose(self):
        t = ContingencyTable([[8, 2], [4, 16]], missing_feature=[3, 5])
        direct = mi_variance_missing(
            ContingencyTable(np.array([[8, 2], [4, 16]]).T, missing_class=[3, 5]), W0
        )
        routed = moments_with_missing(t, W0)
        assert routed.missing_axis == "feature"
        assert routed.variance == direct.variance
        assert np.array_equal(routed.pi_hat, direct.pi_hat.T)

    def test_both_margins_rejected(self):
        t = ContingencyTable([[1, 1], [1, 1]], missing_class=[1, 0], missing_feature=[0, 1])
        with pytest.raises(InputError):
            moments_with_missing(t, W0)

    def test_complete_table_allowed(self):
        t = ContingencyTable([[3, 1], [2, 4]])
        assert moments_with_missing(t, W0).missing_axis == "class"


@given(
    st.integers(2, 4).flatmap(
        lambda r: st.tuples(
            st.lists(
                st.lists(st.integers(1, 20), min_size=2, max_size=4),
                min_size=r,
                max_size=r,
            ).filter(lambda g: len({len(row) for row in g}) == 1),
            st.lists(st.integers(0, 6), min_size=r, max_size=r),
        )
    )
)
@settings(max_examples=60)
def test_q_bar_i_in_unit_interval(payload):
    counts, unlabeled = payload
    mm = mi_variance_missing(ContingencyTable(counts, missing_class=unlabeled), W0)
    for q_i, u in zip(mm.q_bar_i, unlabeled):
        assert 0.0 < q_i <= 1.0
        if u == 0:
            assert q_i == 1.0
        else:
            assert q_i < 1.0
    assert mm.pi_hat.sum() == pytest.approx(1.0, abs=1e-12)
