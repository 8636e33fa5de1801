import math

import numpy as np
import pytest

import twinbeam as tb


def test_tmsv_pair_is_ppt_entangled():
    state = tb.twin_beam_state(2.0, 2.0)
    nu = tb.ppt_pair(state, "probe_upper", "conjugate_lower")
    assert nu == pytest.approx(3.0 - 2.0 * math.sqrt(2.0), abs=1e-9)


def test_vacuum_spectrum_is_flat_at_sql():
    grid = tb.uniform_grid(-10.0, 10.0, 41)
    values = tb.single_beam_spectrum(tb.vacuum(), "probe", tb.CavityParams(), grid)
    assert np.allclose(values, 1.0, atol=1e-12)


def test_unbalanced_pairs_give_opposite_imbalances():
    state = tb.twin_beam_state(15.0, 9.0)
    assert tb.energy_imbalance(state, "probe") == pytest.approx(3.0, abs=1e-9)
    assert tb.energy_imbalance(state, "conjugate") == pytest.approx(-3.0, abs=1e-9)


def test_noiseless_fit_recovers_state():
    truth = tb.twin_beam_state(6.0, 3.0, 0.4, 0.9)
    result = tb.fit_synthetic(truth)
    assert result["status"] == "converged"
    error = np.max(np.abs(result["covariance"].matrix - truth.matrix))
    assert error < 1e-3


def test_library_errors_surface_as_twinbeam_error():
    with pytest.raises(tb.TwinbeamError) as info:
        tb.vacuum(4, "polar")
    assert isinstance(info.value, ValueError)
    assert ":" in str(info.value)


def test_cli_help_exits_cleanly(capfd):
    assert tb.run_cli(["--help"]) == 0
    assert "simulate" in capfd.readouterr().out
