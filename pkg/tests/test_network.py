import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pifilter import example_names, load_example, parse_netlist
from pifilter.elements import (
    LineSpec,
    TwoPort,
    abcd_series,
    abcd_shunt,
    abcd_tline,
    open_stub_admittance,
    pi_filter_abcd,
)
from pifilter.netlist import Branch, OpenStub, SeriesCap
from pifilter.network import (
    branch_admittance,
    cascade,
    chain_abcd,
    effective_series_impedance,
    find_extrema,
    pi_impedance_analytic,
    response_sweep,
    reversed_netlist,
    s_params,
    safe_ratio,
    terminated_impedance,
)

V = 299_792_458.0 / np.sqrt(5.95)
HEAD = "param eps_eff 5.95 ztl 50.48\nport in z=50.48\nport out z=50.48\n"
Z0 = 50.48


def mat(tp):
    return np.array([[tp.a, tp.b], [tp.c, tp.d]], dtype=complex)


def table_filter(inline=7.04e-3):
    return tuple(LineSpec(x, Z0, V) for x in (6.73e-3, 7.38e-3, inline))


# ---------------------------------------------------------------- cascade

def test_cascade_single_and_empty():
    tp = abcd_series(3j)
    assert cascade([tp]) is tp
    with pytest.raises(ValueError):
        cascade([])


def test_two_quarter_waves_make_a_half_wave():
    q = LineSpec(np.pi / 2 * V / 1e10, 50, V)
    assert np.allclose(mat(cascade([abcd_tline(q, 1e10)] * 2)), -np.eye(2), atol=1e-13)


def test_cascade_associative():
    rng = np.random.default_rng(7)
    parts = [TwoPort(*(rng.normal(size=4) + 1j * rng.normal(size=4))) for _ in range(8)]
    left = cascade(parts)
    right = parts[-1]
    for p in reversed(parts[:-1]):
        right = p @ right
    scale = np.max(np.abs(mat(left)))
    assert np.max(np.abs(mat(left) - mat(right))) <= 1e-12 * scale
    dets = np.prod([p.det() for p in parts])
    assert left.det() == pytest.approx(dets, rel=1e-10)


# ---------------------------------------------------------------- S-params

def test_identity_matched():
    sp = s_params(abcd_series(0), 50, 50)
    assert sp.s21 == pytest.approx(1) and abs(sp.s11) < 1e-15


def test_series_reactance_equal_to_reference():
    sp = s_params(abcd_series(1j * Z0), Z0, Z0)
    assert sp.s21 == pytest.approx(2 / (2 + 1j))
    assert sp.s11 == pytest.approx(1j / (2 + 1j))
    assert abs(sp.s21) ** 2 == pytest.approx(0.8)
    assert abs(sp.s11) ** 2 == pytest.approx(0.2)


def test_through_between_unequal_references():
    # textbook step discontinuity
    z1, z2 = 50.0, 75.0
    sp = s_params(abcd_series(0), z1, z2)
    assert sp.s11 == pytest.approx((z2 - z1) / (z2 + z1))
    assert sp.s21 == pytest.approx(2 * np.sqrt(z1 * z2) / (z1 + z2))
    assert abs(sp.s11) ** 2 + abs(sp.s21) ** 2 == pytest.approx(1)


def test_s_params_rejects_bad_reference():
    with pytest.raises(ValueError):
        s_params(abcd_series(0), 0, 50)


# ---------------------------------------------------------------- impedances

def test_terminated_identity_and_open():
    assert terminated_impedance(abcd_series(0), 33 + 2j) == pytest.approx(33 + 2j)
    stub_like = abcd_shunt(0.01j)
    assert terminated_impedance(stub_like, None) == pytest.approx(1 / 0.01j)
    assert terminated_impedance(stub_like, np.inf) == pytest.approx(1 / 0.01j)


def test_quarter_wave_inverter():
    q = LineSpec(np.pi / 2 * V / 1e10, 70.0, V)
    zl = 20 + 5j
    assert terminated_impedance(abcd_tline(q, 1e10), zl) == pytest.approx(70.0**2 / zl, rel=1e-12)


def test_safe_ratio_flags_poles():
    val, flag = safe_ratio(1.0, 0.0)
    assert flag and np.isfinite(val)
    val, flag = safe_ratio(np.array([1.0, 2.0]), np.array([1e-20, 1.0]))
    assert flag.tolist() == [True, False] and val[1] == 2


def random_lossless(rng, n):
    parts = []
    for _ in range(n):
        kind = rng.integers(3)
        w = rng.uniform(1e9, 5e10)
        if kind == 0:
            parts.append(abcd_tline(LineSpec(rng.uniform(0, 2e-2), rng.uniform(20, 120), V), w))
        elif kind == 1:
            parts.append(abcd_series(1j * rng.normal() * 100))
        else:
            parts.append(abcd_shunt(1j * rng.normal() / 50))
    return cascade(parts)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 500), st.floats(-500, 500))
def test_terminated_impedance_is_passive(seed, r, x):
    tp = random_lossless(np.random.default_rng(seed), 5)
    z = terminated_impedance(tp, complex(r, x))
    assert z.real >= -1e-12 * max(1.0, abs(z))


# ---------------------------------------------------------------- branches

def test_branch_single_stub_equals_stub():
    net = parse_netlist(HEAD + "branch b\n stub len=5e-3\nend\n")
    w = np.linspace(1e9, 3e10, 20)
    want = open_stub_admittance(LineSpec(5e-3, Z0, V), w)
    assert np.allclose(branch_admittance(net.chain[0], net, w), want)


def test_branch_cap_into_open_blocks():
    net = parse_netlist(HEAD + "branch b\n cap c=1e-13\nend\n")
    assert branch_admittance(net.chain[0], net, 2e10) == 0


def test_branch_short():
    net = parse_netlist(HEAD + "branch b\n cap c=1e-13\n short\nend\n")
    w = 2e10
    assert branch_admittance(net.chain[0], net, w) == pytest.approx(1j * w * 1e-13)


def test_resonator_branch_peaks_near_readout_frequency():
    net = load_example("fig1a.nl")
    f = np.linspace(5e9, 6.5e9, 15001)
    y = branch_admittance(net.element("rr1"), net, 2 * np.pi * f)
    peaks = find_extrema(f, y, "peak")
    assert len(peaks) == 1
    # loaded by the coupling capacitors, 2.1% below the bare half-wave 5.65 GHz
    assert peaks[0][0] == pytest.approx(5.53127e9, rel=2e-5)
    assert abs(peaks[0][0] - 5.65e9) / 5.65e9 < 0.03


def test_empty_chain_is_identity():
    net = parse_netlist(HEAD)
    tp = chain_abcd(net, 1e10)
    assert np.allclose(mat(tp), np.eye(2))
    sp = response_sweep(net, np.linspace(1e9, 2e9, 5))
    assert np.allclose(np.abs(sp.s21), 1)


def test_response_sweep_grid_validation():
    net = parse_netlist(HEAD)
    with pytest.raises(ValueError):
        response_sweep(net, [2e9, 1e9])
    with pytest.raises(ValueError):
        response_sweep(net, [0.0, 1e9])


def test_chain_matches_hand_cascade():
    net = load_example("pi-filter.nl")
    w = 2 * np.pi * np.linspace(2e9, 7e9, 101)
    lp, lm, li = table_filter()
    assert np.allclose(mat(chain_abcd(net, w)), mat(pi_filter_abcd(lp, lm, li, w)), rtol=1e-12, atol=1e-12)


# ---------------------------------------------------------------- Pi impedance

def test_pi_analytic_matches_cascade():
    rng = np.random.default_rng(3)
    lp, lm, li = table_filter()
    w = 2 * np.pi * rng.uniform(1e9, 8e9, 1000)
    z_eq = pi_impedance_analytic(lp, lm, li, Z0, w)
    z_tp = terminated_impedance(pi_filter_abcd(lp, lm, li, w), Z0)
    assert np.max(np.abs(z_eq - z_tp) / np.abs(z_tp)) <= 1e-10


def test_pi_degenerate_is_through():
    z = [LineSpec(0.0, Z0, V)] * 3
    assert pi_impedance_analytic(*z, Z0, 2e10) == pytest.approx(Z0)


def test_pi_reactive_at_stub_resonances():
    lp, lm, li = table_filter()
    for s in (lp, lm):
        w0 = np.pi / 2 / s.beta
        w = w0 * (1 + np.linspace(-1e-3, 1e-3, 201))
        z = pi_impedance_analytic(lp, lm, li, Z0, w)
        assert np.max(np.abs(z.real)) < 1e-6 * Z0


def test_pi_validation():
    lp, lm, li = table_filter()
    with pytest.raises(ValueError):
        pi_impedance_analytic(lp, lm, LineSpec(1e-3, 60, V), Z0, 1e10)
    with pytest.raises(ValueError):
        pi_impedance_analytic(lp, lm, li, 0.0, 1e10)


def test_sum_length_inline_passes_the_mean_frequency():
    # the in-line choice beta = beta+ + beta- opens a pass band where the
    # mean-length choice blocks
    lp, lm, _ = table_filter()
    f_mid = (lp.quarter_wave_frequency() + lm.quarter_wave_frequency()) / 2
    w = 2 * np.pi * f_mid * (1 + np.linspace(-5e-3, 5e-3, 1001))
    blocked = effective_series_impedance(pi_filter_abcd(lp, lm, LineSpec((6.73e-3 + 7.38e-3) / 2, Z0, V), w), Z0)
    opened = effective_series_impedance(pi_filter_abcd(lp, lm, LineSpec(6.73e-3 + 7.38e-3, Z0, V), w), Z0)
    s_blocked = np.abs(2 / (2 + blocked / Z0))
    s_opened = np.abs(2 / (2 + opened / Z0))
    assert s_blocked.max() < 0.02
    assert s_opened.max() > 0.999


def test_effective_impedance_peaks_at_stub_resonances():
    lp, lm, li = table_filter()
    f = np.linspace(2e9, 7e9, 5001)
    tp = pi_filter_abcd(lp, lm, li, 2 * np.pi * f)
    peaks = find_extrema(f, effective_series_impedance(tp, Z0), "peak", tp.saturated)
    got = [p[0] for p in peaks]
    want = [lm.quarter_wave_frequency(), lp.quarter_wave_frequency()]
    assert len(got) == 2
    assert np.allclose(got, want, rtol=1e-4)


# ---------------------------------------------------------------- extrema

def test_find_extrema_sin():
    x = np.linspace(0, 2 * np.pi, 101)
    peaks = find_extrema(x, np.sin(x), "peak")
    assert [round(p[0], 2) for p in peaks] == [round(np.pi / 2, 2), round(3 * np.pi / 2, 2)]
    assert find_extrema(x, x, "peak") == []


def test_find_extrema_refinement_beats_grid():
    f = lambda x: 1 / (1 + (x - 0.3137) ** 2 / 0.01)
    coarse = np.linspace(0, 1, 41)
    (xp, _), = find_extrema(coarse, f(coarse))
    grid_x = coarse[np.argmax(f(coarse))]
    fine = np.linspace(0, 1, 401)
    fine_x = fine[np.argmax(f(fine))]
    assert abs(xp - 0.3137) < abs(grid_x - 0.3137)
    assert abs(xp - 0.3137) < 10 * abs(fine_x - 0.3137) + 1e-4


def test_find_extrema_dips_and_saturation():
    x = np.linspace(0, 4, 9)
    y = np.array([3, 2, 1, 2, 3, 9, 99, 9, 3.0])
    assert [round(p[0], 6) for p in find_extrema(x, y, "dip")] == [1.0]
    sat = np.zeros(9, bool)
    sat[6] = True
    peaks = find_extrema(x, y, "peak", sat)
    assert peaks == [(3.0, 99.0)]
    with pytest.raises(ValueError):
        find_extrema(x, y, "valley")
    with pytest.raises(ValueError):
        find_extrema(x[:2], y[:2])


# ---------------------------------------------------------------- shipped circuits

@pytest.mark.parametrize("name", example_names())
def test_lossless_and_reciprocal(name):
    net = load_example(name)
    f = np.linspace(2e9, 7e9, 2001)
    sp = response_sweep(net, f)
    ok = ~np.asarray(sp.saturated, bool)
    power = np.abs(sp.s11) ** 2 + np.abs(sp.s21) ** 2
    assert np.max(np.abs(power - 1)[ok]) <= 1e-9
    back = response_sweep(reversed_netlist(net), f)
    ok &= ~np.asarray(back.saturated, bool)
    assert np.max(np.abs(back.s21 - sp.s21)[ok]) <= 1e-10
    assert np.max(np.abs(back.s11 - sp.s22)[ok]) <= 1e-9


def test_non_reciprocal_two_port_uses_determinant():
    tp = TwoPort(1 + 0j, 10j, 0j, 2 + 0j)
    sp = s_params(tp, 50, 50, reciprocal=False)
    assert sp.s12 == pytest.approx(sp.s21 * 2)
    assert s_params(tp, 50, 50).s12 == sp.s21


def test_filter_dips_inside_band_and_spares_readout_peak():
    f = np.linspace(2e9, 7e9, 5001)
    with_f = np.abs(response_sweep(load_example("fig1a.nl"), f).s21)
    bare = np.abs(response_sweep(load_example("fig1a-nofilter.nl"), f).s21)
    band = (f >= 4.2e9) & (f <= 4.5e9)
    assert with_f[band].max() < 1e-3
    diff_db = np.abs(20 * np.log10(with_f / bare))
    assert diff_db[band].min() > 20
    peak = min(find_extrema(f, bare), key=lambda p: abs(p[0] - 5.65e9))[0]
    k_peak = np.argmin(np.abs(f - peak))
    k_mid = np.argmin(np.abs(f - 4.364e9))
    assert diff_db[k_peak] < diff_db[k_mid]
