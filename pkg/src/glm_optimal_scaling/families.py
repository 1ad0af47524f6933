"""Response families: link, negative log-likelihood and working derivatives."""

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from scipy.special import expit

from glm_optimal_scaling.exceptions import ConfigError

FloatArray = npt.NDArray[np.float64]

PROBABILITY_EPS = 1e-12
HESSIAN_FLOOR = 1e-10


def logistic_pi(eta: npt.ArrayLike) -> FloatArray:
    """Success probabilities, clamped into [eps, 1 - eps]."""
    return np.clip(expit(np.asarray(eta, dtype=np.float64)), PROBABILITY_EPS, 1.0 - PROBABILITY_EPS)


def neg_loglik(eta: npt.ArrayLike, y: npt.ArrayLike) -> float:
    """Bernoulli negative log-likelihood, sum of log(1 + e^eta) - y * eta."""
    eta = np.asarray(eta, dtype=np.float64)
    return float(np.sum(np.logaddexp(0.0, eta) - np.asarray(y, dtype=np.float64) * eta))


def gradient_hessian(eta: npt.ArrayLike, y: npt.ArrayLike) -> tuple[FloatArray, FloatArray]:
    """Per-row derivatives of the negative log-likelihood with respect to eta."""
    pi = logistic_pi(eta)
    grad = pi - np.asarray(y, dtype=np.float64)
    hess = np.maximum(pi * (1.0 - pi), HESSIAN_FLOOR)
    return grad, hess


def classifies_perfectly(eta: npt.ArrayLike, y: npt.ArrayLike) -> bool:
    """True when the sign of eta matches every 0/1 response.

    The likelihood then has no finite maximum: scaling eta up keeps
    lowering it.
    """
    margin = (2.0 * np.asarray(y, dtype=np.float64) - 1.0) * np.asarray(eta, dtype=np.float64)
    return bool(np.all(margin > 0.0))


@dataclass(frozen=True)
class LogisticState:
    """Everything derived from the current linear predictor."""

    eta: FloatArray
    pi: FloatArray
    grad: FloatArray
    hess: FloatArray
    negloglik: float


class GlmFamily(ABC):
    """Seam for response families; only the logistic one is implemented."""

    name: str

    @abstractmethod
    def inverse_link(self, eta: npt.ArrayLike) -> FloatArray: ...

    @abstractmethod
    def neg_loglik(self, eta: npt.ArrayLike, y: npt.ArrayLike) -> float: ...

    @abstractmethod
    def gradient_hessian(
        self, eta: npt.ArrayLike, y: npt.ArrayLike
    ) -> tuple[FloatArray, FloatArray]: ...

    @abstractmethod
    def initial_intercept(self, y: FloatArray) -> float: ...

    def state(self, eta: FloatArray, y: FloatArray) -> LogisticState:
        grad, hess = self.gradient_hessian(eta, y)
        return LogisticState(
            eta=eta,
            pi=self.inverse_link(eta),
            grad=grad,
            hess=hess,
            negloglik=self.neg_loglik(eta, y),
        )


class LogisticFamily(GlmFamily):
    name = "logistic"

    def inverse_link(self, eta: npt.ArrayLike) -> FloatArray:
        return logistic_pi(eta)

    def neg_loglik(self, eta: npt.ArrayLike, y: npt.ArrayLike) -> float:
        return neg_loglik(eta, y)

    def gradient_hessian(
        self, eta: npt.ArrayLike, y: npt.ArrayLike
    ) -> tuple[FloatArray, FloatArray]:
        return gradient_hessian(eta, y)

    def initial_intercept(self, y: FloatArray) -> float:
        ybar = float(np.clip(np.mean(y), PROBABILITY_EPS, 1.0 - PROBABILITY_EPS))
        return float(np.log(ybar / (1.0 - ybar)))


_FAMILIES: dict[str, type[GlmFamily]] = {"logistic": LogisticFamily}


def get_family(name: str) -> GlmFamily:
    """Look up a GLM family by name.

    Raises:
        ConfigError: If no family is registered under ``name``
    """
    try:
        return _FAMILIES[name]()
    except KeyError:
        raise ConfigError(
            f"Unknown GLM family '{name}'; available: {', '.join(sorted(_FAMILIES))}"
        ) from None
