import math

import pytest

from floqamp.errors import ParameterError
from floqamp.model import (
    DriveSpec,
    ModelParams,
    beta,
    scaled_params,
    scaled_params_at_beta,
    snr_params,
    transient_params,
    validate,
)


def test_beta_definition():
    p = ModelParams(10, 30, 30, 58.5)
    assert p.beta == pytest.approx(0.95)
    assert beta(p) == p.beta


def test_beta_undefined_without_modulated_loss():
    with pytest.raises(ParameterError):
        beta(ModelParams(1, 0, 1, 1))


def test_stability_threshold():
    assert ModelParams(1, 10, 10, 19.9).stable
    assert not ModelParams(1, 10, 10, 20.0).stable
    assert not ModelParams(1, 0, 1, 2).stable
    assert ModelParams(1, 0, 2, 1).stable


def test_presets():
    assert transient_params().beta == pytest.approx(0.98)
    assert scaled_params(19.5, 3).as_dict() == {
        "eta_omega": 10.0, "eta_kappa": 30.0, "eta_gamma": 30.0, "eta_p": 58.5,
        "phi": math.pi / 2, "omega_mod": 2 * math.pi,
    }
    for b in (0.14, 0.95, 1.0):
        for s in (1, 2, 3):
            assert scaled_params_at_beta(b, s).beta == pytest.approx(b)
    assert snr_params(15).beta == pytest.approx(0.5)


def test_derived_rates():
    p = ModelParams(1, 2, 3, 4, omega_mod=0.5)
    assert p.gamma == 1.5 and p.pump == 2.0
    assert p.period == pytest.approx(4 * math.pi)


def test_replace():
    p = transient_params()
    q = p.replace(eta_p=5.0)
    assert q.eta_p == 5.0 and q.eta_omega == p.eta_omega
    with pytest.raises(ParameterError):
        p.replace(eta_q=1.0)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"eta_omega": -1},
        {"eta_kappa": math.nan},
        {"eta_p": math.inf},
        {"omega_mod": 0.0},
        {"phi": math.nan},
    ],
)
def test_validate_rejects(kwargs):
    with pytest.raises(ParameterError):
        validate(transient_params().replace(**kwargs))


def test_drive_frequency_and_checks():
    d = DriveSpec(1.0, -3, 0.25)
    assert d.frequency(2.0) == pytest.approx(-5.75)
    d.check(2.0, 3)
    with pytest.raises(ParameterError):
        d.check(2.0, 2)
    with pytest.raises(ParameterError):
        DriveSpec(1.0, 0, 2.0).check(2.0)
    with pytest.raises(ParameterError):
        DriveSpec(1.0, 0, -0.1).check(2.0)
