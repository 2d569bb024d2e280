"""Simulation and spectral diagnostics for high-dimensional nonstationary
functional panels.

The heavy lifting happens in the C++ extension; this package adds a thin
dict-based convenience layer over the JSON config schema used by the CLI.
"""

import json as _json

from ._core import (
    FourierBasis,
    alignment,
    centering_matrix,
    cumulation_matrix,
    eigendecompose,
    eigenvector_acf,
    gram_matrix,
    mtheta_svd,
    sample_haar_orthogonal,
    spurious_vector,
    theory_eigenvalue,
    theory_share,
)
from ._core import rank_report_json as _rank_report_json
from ._core import simulate as _simulate

__all__ = [
    "FourierBasis",
    "alignment",
    "centering_matrix",
    "cumulation_matrix",
    "eigendecompose",
    "eigenvector_acf",
    "gram_matrix",
    "model_config",
    "mtheta_svd",
    "rank_report",
    "sample_haar_orthogonal",
    "simulate",
    "spurious_vector",
    "theory_eigenvalue",
    "theory_share",
]


def model_config(T=200, p=100, q=20, K=50, covariance="delocalized_flat",
                 loadings="full_rank", noise="default", seed=1, **extra):
    """Build a model config dict matching the CLI JSON schema.

    `covariance` may be a setting name or an explicit eigenvalue list;
    `loadings` a scheme name, ("rank_product", r), or a list of matrices.
    """
    cfg = {"schema_version": 1, "T": T, "p": p, "q": q, "K": K, "seed": seed}
    if isinstance(covariance, str):
        cfg["covariance"] = {"setting": covariance}
    else:
        cfg["covariance"] = {"setting": "custom", "c": list(covariance)}
    if isinstance(loadings, str):
        cfg["loadings"] = {"scheme": loadings}
    elif isinstance(loadings, tuple) and loadings[0] == "rank_product":
        cfg["loadings"] = {"scheme": "rank_product", "rank": int(loadings[1])}
    else:
        cfg["loadings"] = {"scheme": "custom",
                           "A": [[list(row) for row in mat] for mat in loadings]}
    if noise != "default":
        cfg["noise"] = noise if isinstance(noise, str) else list(noise)
    cfg.update(extra)
    return cfg


def simulate(model, replicate=None):
    """Simulate one panel draw; returns dict with panel/factors/innovations arrays."""
    return _simulate(_json.dumps(model), replicate)


def rank_report(model, k_grid=(5, 10, 20, 40)):
    """Effective-rank ledger (dict) for a model config dict."""
    return _json.loads(_rank_report_json(_json.dumps(model), list(k_grid)))
