"""
Moreau–Yosida envelope of the plastic dissipation.

H_µ(p) = inf_q {H(q) + µ|p − q|} is the inf-convolution of H with µ|·|. Its
conjugate is the indicator of K ∩ B_µ, so H_µ is the support function of
K ∩ B_µ and is evaluated that way.
"""

import logging

import numpy as np

from dynplast.common.exceptions import ConfigurationError
from dynplast.geometry.sets import ElasticitySet

logger = logging.getLogger(__name__)


def moreau_yosida_H(K: ElasticitySet, mu: float, p: np.ndarray) -> np.ndarray:
    """
    Evaluate H_µ(p); finite, µ-Lipschitz and nondecreasing in µ.

    Raises:
        ConfigurationError: if µ is not positive
        ConvergenceError: if the constrained search (halfspace sets) fails
    """
    if not mu > 0:
        raise ConfigurationError(f"Moreau–Yosida parameter must be positive, got {mu}", key="mu")
    return K.restricted_support(p, float(mu))
