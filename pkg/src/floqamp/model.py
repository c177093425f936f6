"""Model parameters and drive specification."""
import logging
import math
from dataclasses import dataclass

from .errors import ParameterError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModelParams:
    """Dimensionless modulation amplitudes of the driven mode.

    All rates are multiples of the modulation frequency ``omega_mod``:
    frequency modulation ``2 eta_omega Omega cos(Omega t + phi)``, modulated
    decay ``2 eta_kappa Omega cos^2(Omega t / 2)``, static loss
    ``eta_gamma Omega`` and incoherent pump ``eta_p Omega``.
    """

    eta_omega: float
    eta_kappa: float
    eta_gamma: float
    eta_p: float
    phi: float = math.pi / 2
    omega_mod: float = 2 * math.pi

    @property
    def beta(self):
        return beta(self)

    @property
    def stable(self):
        """True when the photon number has net loss (beta < 1)."""
        return is_stable(self)

    @property
    def gamma(self):
        return self.eta_gamma * self.omega_mod

    @property
    def pump(self):
        return self.eta_p * self.omega_mod

    @property
    def period(self):
        return 2 * math.pi / self.omega_mod

    def replace(self, **changes):
        fields = {
            "eta_omega": self.eta_omega,
            "eta_kappa": self.eta_kappa,
            "eta_gamma": self.eta_gamma,
            "eta_p": self.eta_p,
            "phi": self.phi,
            "omega_mod": self.omega_mod,
        }
        unknown = set(changes) - set(fields)
        if unknown:
            raise ParameterError(f"unknown ModelParams fields: {sorted(unknown)}")
        fields.update(changes)
        return ModelParams(**fields)

    def as_dict(self):
        return {
            "eta_omega": self.eta_omega,
            "eta_kappa": self.eta_kappa,
            "eta_gamma": self.eta_gamma,
            "eta_p": self.eta_p,
            "phi": self.phi,
            "omega_mod": self.omega_mod,
        }


FIELDS = ("eta_omega", "eta_kappa", "eta_gamma", "eta_p", "phi", "omega_mod")


@dataclass(frozen=True)
class DriveSpec:
    """Coherent tone at the static port, ``omega_d = omega_bar_d + n_d Omega``."""

    amplitude: complex = 1.0
    n_d: int = 0
    omega_bar_d: float = 0.0

    def frequency(self, omega_mod):
        return self.omega_bar_d + self.n_d * omega_mod

    def check(self, omega_mod, n_trunc=None):
        if not 0.0 <= self.omega_bar_d < omega_mod:
            raise ParameterError(
                f"omega_bar_d={self.omega_bar_d} outside the zone [0, {omega_mod})"
            )
        if n_trunc is not None and abs(self.n_d) > n_trunc:
            raise ParameterError(f"drive harmonic n_d={self.n_d} outside |n| <= {n_trunc}")
        return self


def beta(params):
    """Normalised pump-loss imbalance ``(eta_p - eta_gamma) / eta_kappa``."""
    if params.eta_kappa == 0:
        raise ParameterError("beta is undefined for eta_kappa = 0")
    return (params.eta_p - params.eta_gamma) / params.eta_kappa


def is_stable(params):
    if params.eta_kappa == 0:
        return params.eta_p < params.eta_gamma
    return beta(params) < 1


def validate(params):
    """Check the parameter invariants and return ``params`` unchanged."""
    for name in ("eta_omega", "eta_kappa", "eta_gamma", "eta_p"):
        value = getattr(params, name)
        if not math.isfinite(value) or value < 0:
            raise ParameterError(f"{name} must be finite and >= 0, got {value}")
    if not math.isfinite(params.phi):
        raise ParameterError(f"phi must be finite, got {params.phi}")
    if not math.isfinite(params.omega_mod) or params.omega_mod <= 0:
        raise ParameterError(f"omega_mod must be > 0, got {params.omega_mod}")
    if not is_stable(params):
        log.info("parameters lie in the dynamically unstable regime (net gain)")
    return params


def scaled_params(eta_p_unit, s=3.0):
    """Parameter family of the |G| maps: ``eta_p = s * eta_p_unit``,
    ``eta_omega = 10``, ``eta_kappa = eta_gamma = 10 s``."""
    return ModelParams(
        eta_omega=10.0, eta_kappa=10.0 * s, eta_gamma=10.0 * s, eta_p=s * eta_p_unit
    )


def scaled_params_at_beta(beta_value, s=3.0):
    return scaled_params(10.0 * (1.0 + beta_value), s)


def transient_params():
    """Parameters of the transient-dynamics comparison (beta = 0.98)."""
    return ModelParams(eta_omega=10.0, eta_kappa=10.0, eta_gamma=10.0, eta_p=19.8)


def snr_params(eta_p):
    return ModelParams(eta_omega=10.0, eta_kappa=10.0, eta_gamma=10.0, eta_p=eta_p)
