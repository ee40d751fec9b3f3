import json
import math

import pytest

import modefisher as mf


def test_quantum_fisher_values():
    assert mf.quantum_fisher(mf.sinc_psf()) == pytest.approx(1 / 3, abs=1e-9)
    assert mf.quantum_fisher(mf.gaussian_psf(1.0)) == pytest.approx(0.25, abs=1e-9)
    assert mf.quantum_fisher(mf.gaussian_psf(2.0)) == pytest.approx(0.0625, abs=1e-9)


def test_psf_accessors():
    psf = mf.gaussian_psf(1.0)
    assert psf.kind == "gaussian"
    assert len(psf.x) == len(psf.amp_x) == 2048
    assert psf.amplitude(0.0) == pytest.approx((2 * math.pi) ** -0.25)
    assert psf.intensity(2.0, 0.0) == pytest.approx(math.exp(-0.5) / math.sqrt(2 * math.pi), rel=1e-4)


def test_adapted_sinc_modes_match_closed_forms():
    psf = mf.sinc_psf()
    modes = mf.build_adapted_modes(psf, 4)
    assert len(modes) == 4
    assert modes.parity == [1, -1, 1, -1]
    x = modes.x
    for n in range(4):
        err = max(abs(modes.modes_x[n][j] - mf.sinc_mode_closed_form(n, x[j])) for j in range(0, len(x), 64))
        assert err < 1e-6
    gram = mf.gram_matrix(modes, momentum=True)
    for a in range(4):
        for b in range(4):
            assert gram[a][b] == pytest.approx(1.0 if a == b else 0.0, abs=1e-9)


def test_fisher_curve_conservation():
    psf = mf.sinc_psf()
    curve = mf.fisher_curve(psf, mf.build_adapted_modes(psf, 40), [0.5, 1.0, 5.0])
    for row in curve.cumulative:
        assert row[-1] == pytest.approx(1 / 3, abs=1e-6)
        assert row[10] >= 0.985 / 3
    assert mf.cumulative_fisher(curve.per_mode[0], 0) == 0.0
    total = sum(mf.sinc_per_mode_fisher_closed(n, 1.0) for n in range(41))
    assert total == pytest.approx(1 / 3, abs=1e-9)


def test_plane_wave_and_direct_imaging():
    pw = mf.plane_wave_fisher(mf.sinc_psf(), 1.0)
    assert pw["sine"] + pw["cosine"] == pytest.approx(1 / 3, abs=1e-9)
    assert mf.direct_imaging_fisher(mf.gaussian_psf(1.0), 0.1) == pytest.approx(1.25e-3, rel=0.05)


def test_errors_are_translated():
    with pytest.raises(mf.Error, match="non-sinc"):
        mf.plane_wave_fisher(mf.gaussian_psf(1.0), 1.0)
    with pytest.raises(mf.Error):
        mf.gaussian_psf(-1.0)


def test_run_study_is_reproducible():
    config = json.dumps(
        {
            "psf": {"kind": "gaussian"},
            "measurement": {"kind": "direct_imaging", "bins": 16, "window": 5.0},
            "true_separation": 2.0,
            "photons_per_trial": 5000,
            "trials": 10,
            "seed": 4,
        }
    )
    first = mf.run_study(config)
    second = mf.run_study(config)
    assert first["estimates"] == second["estimates"]
    assert len(first["estimates"]) == 10
    assert first["insufficient_trials"] is True
    assert first["crlb"] == pytest.approx(1 / (5000 * first["fisher"]))
