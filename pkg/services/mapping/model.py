"""
Environment -> weight mapping model.

Each player's first weight component is discretised into K uniform bins on
[0, 1]. A bin is a latent class with a prior and one Gaussian per observation
dimension; the mixture over bins is the Gaussian mixture the online phase
queries. lambda0 is explained by the pair geometry (d01_y, dv01_x, d01_x),
lambda1 by the ramp vehicle's constraints (d_ahead, v1_x, dv01_x).
"""
import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import logsumexp
from scipy.stats import norm

from services.errors import ContractViolation, MappingError
from services.game.payoffs import WeightVector
from services.mapping.observation import OBSERVATION_FIELDS, EnvironmentObservation

logger = logging.getLogger(__name__)

DEFAULT_BINS = 10
DEFAULT_VARIANCE_FLOOR = 1e-4
LATENT_DIMS = {
    "lambda0": ("d01_y", "dv01_x", "d01_x"),
    "lambda1": ("d_ahead", "v1_x", "dv01_x"),
}


def discretize_weight(w1: float, bins: int) -> int:
    if bins < 2:
        raise ContractViolation(f"need at least 2 bins, got {bins}")
    if not (math.isfinite(w1) and 0.0 <= w1 <= 1.0):
        raise ContractViolation(f"weight component must lie in [0, 1], got {w1}")
    return min(int(math.floor(w1 * bins)), bins - 1)


def bin_center(k: int, bins: int) -> float:
    return (k + 0.5) / bins


@dataclass(frozen=True)
class LatentEmissions:
    dims: tuple[str, ...]
    priors: np.ndarray      # (K,)
    means: np.ndarray       # (K, len(dims))
    variances: np.ndarray   # (K, len(dims))


@dataclass(frozen=True, eq=False)
class MappingModel:
    bins: int
    bin_centers: np.ndarray
    obs_mean: np.ndarray
    obs_std: np.ndarray
    latents: dict[str, LatentEmissions]
    variance_floor: float = DEFAULT_VARIANCE_FLOOR
    samples: int = 0

    def standardize(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.obs_mean) / self.obs_std

    @classmethod
    def uniform(cls, bins: int = DEFAULT_BINS) -> "MappingModel":
        """Flat prior, identical emissions in every bin."""
        latents = {
            name: LatentEmissions(
                dims=dims,
                priors=np.full(bins, 1.0 / bins),
                means=np.zeros((bins, len(dims))),
                variances=np.ones((bins, len(dims))),
            )
            for name, dims in LATENT_DIMS.items()
        }
        return cls(
            bins=bins,
            bin_centers=np.array([bin_center(k, bins) for k in range(bins)]),
            obs_mean=np.zeros(len(OBSERVATION_FIELDS)),
            obs_std=np.ones(len(OBSERVATION_FIELDS)),
            latents=latents,
        )


@dataclass(frozen=True, eq=False)
class WeightInference:
    lambda0: WeightVector
    lambda1: WeightVector
    posterior0: np.ndarray
    posterior1: np.ndarray


def _dim_index(dims: Sequence[str]) -> list[int]:
    return [OBSERVATION_FIELDS.index(d) for d in dims]


def _fit_latent(
    z: np.ndarray, w1: np.ndarray, dims: tuple[str, ...], bins: int, variance_floor: float
) -> LatentEmissions:
    cols = z[:, _dim_index(dims)]
    assignment = np.array([discretize_weight(float(w), bins) for w in w1])
    counts = np.bincount(assignment, minlength=bins)
    priors = (counts + 1.0) / (len(assignment) + bins)

    global_mean = cols.mean(axis=0)
    global_var = np.maximum(cols.var(axis=0), variance_floor)
    means = np.tile(global_mean, (bins, 1))
    variances = np.tile(global_var, (bins, 1))
    for k in np.flatnonzero(counts):
        members = cols[assignment == k]
        means[k] = members.mean(axis=0)
        variances[k] = np.maximum(members.var(axis=0), variance_floor)
    return LatentEmissions(dims=dims, priors=priors, means=means, variances=variances)


def train_mapping(
    samples: Sequence[tuple[EnvironmentObservation, WeightVector, WeightVector]],
    bins: int = DEFAULT_BINS,
    variance_floor: float = DEFAULT_VARIANCE_FLOOR,
) -> MappingModel:
    """Fit the per-bin emissions from (observation, lambda0, lambda1) samples."""
    if bins < 2:
        raise ContractViolation(f"need at least 2 bins, got {bins}")
    if len(samples) < bins:
        raise MappingError(
            f"only {len(samples)} samples for {bins} bins; reduce the bin count or add data"
        )

    x = np.array([obs.as_array() for obs, _, _ in samples])
    obs_mean = x.mean(axis=0)
    obs_std = x.std(axis=0)
    obs_std[obs_std == 0] = 1.0
    z = (x - obs_mean) / obs_std

    weights = {
        "lambda0": np.array([lam0.w1 for _, lam0, _ in samples]),
        "lambda1": np.array([lam1.w1 for _, _, lam1 in samples]),
    }
    latents = {
        name: _fit_latent(z, weights[name], dims, bins, variance_floor)
        for name, dims in LATENT_DIMS.items()
    }
    logger.info("Trained mapping model on %d samples with %d bins", len(samples), bins)
    return MappingModel(
        bins=bins,
        bin_centers=np.array([bin_center(k, bins) for k in range(bins)]),
        obs_mean=obs_mean,
        obs_std=obs_std,
        latents=latents,
        variance_floor=variance_floor,
        samples=len(samples),
    )


def latent_posterior(model: MappingModel, latent: str, z: np.ndarray) -> np.ndarray:
    emissions = model.latents[latent]
    values = z[_dim_index(emissions.dims)]
    log_lik = norm.logpdf(values, loc=emissions.means, scale=np.sqrt(emissions.variances)).sum(axis=1)
    log_joint = np.log(emissions.priors) + log_lik
    return np.exp(log_joint - logsumexp(log_joint))


def infer_weights(model: MappingModel, obs: EnvironmentObservation) -> WeightInference:
    """Posterior over bins per latent; point estimate is the posterior mean."""
    z = model.standardize(obs.as_array())
    posterior0 = latent_posterior(model, "lambda0", z)
    posterior1 = latent_posterior(model, "lambda1", z)
    w0 = float(np.clip(posterior0 @ model.bin_centers, 0.0, 1.0))
    w1 = float(np.clip(posterior1 @ model.bin_centers, 0.0, 1.0))
    return WeightInference(
        lambda0=WeightVector.from_w1(w0),
        lambda1=WeightVector.from_w1(w1),
        posterior0=posterior0,
        posterior1=posterior1,
    )
