import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sgnoise.spectra import (
    Custom,
    DivergentPSDError,
    Flicker,
    White,
    evaluate_psd,
    normalize,
)


def test_white_value():
    assert evaluate_psd(White(2.9e-6), 123.0) == pytest.approx(8.41e-12)
    assert np.all(evaluate_psd(White(2.9e-6), np.array([0.0, 1.0, 1e6])) == 2.9e-6**2)


def test_flicker_at_omega0(params, dq):
    fl = Flicker.from_params(0.7e-13, params)
    s = evaluate_psd(fl, dq.omega0)
    # independent arithmetic: |eta0| K I / omega0
    assert s == pytest.approx(6e3 * 0.7e-13 * 12 / 424.359, rel=1e-4)
    assert s == pytest.approx(1.19e-11, rel=1e-2)


def test_flicker_halves_when_frequency_doubles(params):
    fl = Flicker.from_params(1e-13, params)
    assert evaluate_psd(fl, 200.0) == pytest.approx(evaluate_psd(fl, 100.0) / 2)


def test_flicker_dc_diverges(params):
    with pytest.raises(DivergentPSDError, match="divergent PSD at DC"):
        evaluate_psd(Flicker.from_params(1e-13, params), 0.0)


def test_custom_interpolation_and_range(tmp_path):
    c = Custom(omega=(1.0, 10.0, 100.0), S=(1.0, 0.1, 0.01))
    assert evaluate_psd(c, 10.0) == pytest.approx(0.1)
    assert evaluate_psd(c, math.sqrt(10.0)) == pytest.approx(10**-0.5)
    with pytest.raises(ValueError, match="outside"):
        evaluate_psd(c, 1000.0)
    f = tmp_path / "psd.csv"
    f.write_text("omega,S\n1,1\n10,0.1\n100,0.01\n")
    assert Custom.from_csv(f) == c
    g = tmp_path / "bad.csv"
    g.write_text("1,1\n10,0.1\n")
    with pytest.raises(ValueError, match="header"):
        Custom.from_csv(g)


@pytest.mark.parametrize(
    "make",
    [
        lambda: White(-1.0),
        lambda: Flicker(-1.0, 1.0, 1.0, 1.0),
        lambda: Flicker(1.0, 2.5, 1.0, 1.0),
        lambda: Custom((2.0, 1.0), (1.0, 1.0)),
        lambda: Custom((1.0, 2.0), (1.0, -1.0)),
    ],
)
def test_invalid_spectra(make):
    with pytest.raises(ValueError):
        make()


def test_normalized_ktilde(params, dq):
    fl = Flicker.from_params(0.7e-13, params)
    ns = normalize(fl, dq)
    assert ns.ktilde**2 == pytest.approx(evaluate_psd(fl, dq.omega0), rel=1e-12)
    assert ns(1.0) == pytest.approx(1.19e-11, rel=1e-2)
    assert normalize(White(3.0), dq).ktilde == 3.0


def test_normalized_matches_direct(params, dq):
    rng = np.random.default_rng(4)
    xi = 10 ** rng.uniform(-4, 3, 100)
    for spec in (White(2e-6), Flicker.from_params(1e-13, params), Flicker.from_params(1e-13, params, 0.6)):
        assert np.array_equal(normalize(spec, dq)(xi), evaluate_psd(spec, xi * dq.omega0))


def test_white_equals_flicker_alpha0(params):
    fl = Flicker.from_params(2e-13, params, alpha=0.0)
    w = White(math.sqrt(fl.prefactor))
    omega = np.logspace(-2, 4, 10)
    assert np.allclose(evaluate_psd(fl, omega), evaluate_psd(w, omega), rtol=1e-14)


def test_omega_ref_pins_spectra(params):
    ref = 400.0
    s = [evaluate_psd(Flicker.from_params(1e-13, params, a, omega_ref=ref), ref) for a in (0.5, 1.0, 1.5)]
    assert s[0] == pytest.approx(s[1]) and s[2] == pytest.approx(s[1])
    # alpha = 1 is unaffected by the reference frequency
    assert evaluate_psd(Flicker.from_params(1e-13, params, 1.0, omega_ref=ref), 7.0) == pytest.approx(
        evaluate_psd(Flicker.from_params(1e-13, params), 7.0)
    )


@settings(max_examples=60, deadline=None)
@given(w=st.floats(1e-3, 1e6), alpha=st.floats(0.0, 2.0), K=st.floats(0.0, 1e-10))
def test_psd_even_and_nonnegative(params, w, alpha, K):
    fl = Flicker.from_params(K, params, alpha)
    a, b = evaluate_psd(fl, w), evaluate_psd(fl, -w)
    assert a == b and a >= 0
