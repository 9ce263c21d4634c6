import warnings
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wavecomove.coherence import wtc, xwt
from wavecomove.cwt import WaveletParams, cwt
from wavecomove.ingest import AR1Params, parse_month
from wavecomove.phase_lag import (Band, Direction, PhaseRelation, Region, Window, band_of,
                                  band_summary, classify_direction, missing_cells,
                                  significant_regions, time_lag)
from wavecomove.significance import monte_carlo_thresholds, wtc_mask, xwt_mask
from wavecomove.synthgen import SyntheticSpec, make_coupled_pair


def test_time_lag_examples():
    assert time_lag(np.pi / 2, 12) == pytest.approx(3.0)
    assert time_lag(0.0, 12) == 0.0
    assert time_lag(np.pi, 16) == pytest.approx(8.0)
    assert time_lag(-np.pi / 2, 12) == pytest.approx(3.0)


@given(phi=st.floats(-np.pi, np.pi), period=st.floats(0.5, 500))
def test_time_lag_formula(phi, period):
    assert time_lag(phi, period) == abs(phi) * period / (2 * np.pi)
    assert 0 <= time_lag(phi, period) <= period / 2 + 1e-12


def test_classify_direction_examples():
    assert classify_direction(np.pi / 4) is Direction.FIRST_LEADS
    assert classify_direction(-np.pi / 4) is Direction.FIRST_LAGS
    assert classify_direction(0.01, 0.05) is Direction.IN_PHASE
    assert classify_direction(np.pi - 0.01, 0.05) is Direction.ANTI_PHASE
    assert classify_direction(-np.pi + 0.01, 0.05) is Direction.ANTI_PHASE


@given(phi=st.floats(-np.pi + 0.2, np.pi - 0.2).filter(lambda v: abs(v) > 0.2))
def test_classification_is_antisymmetric(phi):
    swap = {Direction.FIRST_LEADS: Direction.FIRST_LAGS, Direction.FIRST_LAGS: Direction.FIRST_LEADS}
    a, b = PhaseRelation.from_phase(phi, 10.0), PhaseRelation.from_phase(-phi, 10.0)
    assert swap[a.direction] is b.direction
    assert a.lag_months == b.lag_months


def test_direction_phrases():
    assert Direction.FIRST_LEADS.phrase("GEPU", "oil") == "GEPU leads oil"
    assert Direction.FIRST_LAGS.phrase("GEPU", "oil") == "GEPU lags oil"
    assert "in phase" in Direction.IN_PHASE.phrase("GEPU", "oil")
    assert "anti-phase" in Direction.ANTI_PHASE.phrase("GEPU", "oil")


def _coherence(r2, phase, periods, start=0):
    rows, cols = r2.shape
    return SimpleNamespace(r2=r2, phase=phase, periods=np.asarray(periods, dtype=float),
                           months=start + np.arange(cols))


def test_regions_all_true_and_disjoint():
    periods = np.array([2.0, 4.0, 8.0, 16.0])
    coi = np.array([2.0, 5.0, 9.0, 17.0, 17.0, 9.0, 5.0, 2.0])
    coh = _coherence(np.ones((4, 8)), np.zeros((4, 8)), periods)
    full = np.ones((4, 8), dtype=bool)
    regions = significant_regions(full, full, coi, coh)
    inside = periods[:, None] < coi[None, :]
    assert len(regions) == 1 and regions[0].area == inside.sum()
    left = np.zeros((4, 8), dtype=bool)
    left[:, :4] = True
    assert significant_regions(left, ~left, coi, coh) == []


def test_regions_use_four_connectivity():
    m = np.zeros((3, 3), dtype=bool)
    m[0, 0] = m[1, 1] = m[2, 2] = True
    coh = _coherence(np.ones((3, 3)), np.zeros((3, 3)), [1.0, 2.0, 3.0])
    assert len(significant_regions(m, m, np.full(3, 10.0), coh)) == 3


def test_band_split_is_inclusive_low():
    assert band_of(5.99) is Band.HIGH
    assert band_of(6.0) is Band.LOW
    assert band_of(6.1) is Band.LOW


def _region(periods, phases, months, r2=None):
    periods = np.asarray(periods, dtype=float)
    n = periods.size
    return Region(np.zeros(n, int), np.arange(n), periods, np.asarray(phases, dtype=float),
                  np.ones(n) if r2 is None else np.asarray(r2, dtype=float),
                  np.asarray(months))


def test_band_summary_examples():
    assert band_summary([]) == []
    m = parse_month("2008-06")
    reg = _region([16.0] * 5, [np.pi / 2] * 5, [m] * 5, r2=[0.8, 0.9, 1.0, 0.9, 0.8])
    rows = band_summary([reg], names=("GEPU", "oil"))
    assert len(rows) == 1
    row = rows[0]
    assert (row.window, row.band, row.direction) == ("2008", Band.LOW, Direction.FIRST_LEADS)
    assert row.delay_range == pytest.approx((4.0, 4.0))
    assert row.area == 5 and row.mean_r2 == pytest.approx(0.88)
    assert row.direction_phrase == "GEPU leads oil"


def test_band_summary_splits_windows_and_bands():
    m01, m08 = parse_month("2001-05"), parse_month("2008-05")
    reg = _region([4.0, 4.0, 12.0, 12.0, 12.0], [-1.0, -1.0, 1.0, 1.0, -1.0],
                  [m01, m08, m08, m08, m08])
    rows = band_summary([reg])
    keys = [(r.window, r.band) for r in rows]
    assert keys == [("2001", Band.HIGH), ("2008", Band.HIGH), ("2008", Band.LOW)]
    low = rows[2]
    assert low.direction is Direction.FIRST_LEADS and low.area == 3
    assert missing_cells(rows, [Window("2001", "2000-03", "2002-12")]) == [("2001", Band.LOW)]


def test_tie_reports_in_phase_with_warning():
    m = parse_month("2008-01")
    reg = _region([10.0, 10.0], [1.0, -1.0], [m, m])
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rows = band_summary([reg])
    assert rows[0].direction is Direction.IN_PHASE
    assert any("tied" in str(w.message) for w in caught)


def test_window_validation():
    w = Window("x", "2007-06", "2009-12")
    assert w.start == parse_month("2007-06")
    with pytest.raises(ValueError):
        Window("bad", "2009-12", "2007-06")


N = 304
PARAMS = WaveletParams().resolved(N)


@pytest.fixture(scope="module")
def coupled():
    spec = SyntheticSpec(amplitude=3.0, shift=4, seed=3)
    x, y = make_coupled_pair(spec)
    fx, fy = cwt(x, PARAMS), cwt(y, PARAMS)
    ar = AR1Params(0.0, 1.0)
    t95 = monte_carlo_thresholds(PARAMS, ar, ar, N, 200, 0.95, rng_seed=9)
    t99 = monte_carlo_thresholds(PARAMS, ar, ar, N, 200, 0.99, rng_seed=9)
    return fx, fy, t95, t99


def _regions(fx, fy, thr, level):
    c = wtc(fx, fy)
    return significant_regions(wtc_mask(c, thr.wtc, level), xwt_mask(xwt(fx, fy), thr.xwt, level),
                               fx.coi, c)


def test_regions_shrink_with_level(coupled):
    fx, fy, t95, t99 = coupled
    loose, strict = _regions(fx, fy, t95, 0.95), _regions(fx, fy, t99, 0.99)
    cells = [{(int(r), int(c)) for r, c in zip(reg.rows, reg.cols)} for reg in loose]
    for reg in strict:
        cs = {(int(r), int(c)) for r, c in zip(reg.rows, reg.cols)}
        assert any(cs <= big for big in cells)


def test_swapping_series_negates_phase(coupled):
    fx, fy, t95, _ = coupled
    a = {(int(r), int(c)): (p, l) for reg in _regions(fx, fy, t95, 0.95)
         for r, c, p, l in zip(reg.rows, reg.cols, reg.phases, reg.lags)}
    b = {(int(r), int(c)): (p, l) for reg in _regions(fy, fx, t95, 0.95)
         for r, c, p, l in zip(reg.rows, reg.cols, reg.phases, reg.lags)}
    assert a.keys() == b.keys() and a
    for key, (p, lag) in a.items():
        q, lag2 = b[key]
        assert np.angle(np.exp(1j * (p + q))) == pytest.approx(0.0, abs=1e-12)
        assert lag == pytest.approx(lag2, abs=1e-12)


def test_lags_bounded_by_half_period(coupled):
    fx, fy, t95, _ = coupled
    for reg in _regions(fx, fy, t95, 0.95):
        assert np.all(reg.lags <= reg.periods / 2 + 1e-12)


def test_region_width_grows_with_period(coupled):
    fx, fy, t95, _ = coupled
    regs = _regions(fx, fy, t95, 0.95)
    box = max(regs, key=lambda r: np.sum((r.cols >= 150) & (r.cols < 200)))
    r16 = int(np.argmin(np.abs(fx.periods - 16)))
    r8 = int(np.argmin(np.abs(fx.periods - 8)))
    width = {row: np.sum(box.rows == row) for row in (r8, r16)}
    assert width[r16] >= width[r8] > 0
