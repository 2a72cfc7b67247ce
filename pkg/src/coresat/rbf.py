"""Gaussian radial-basis surface over the seriated distance matrix.

The normalized matrix is treated as a height field over 1-based index
coordinates.  Basis centers sit on a rectangular frame outside the index
square; fitting is regularized least squares on sample-averaged Gram
products, with an optional unpenalized constant term.  The smooth surface is
what the core block is delimited on.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DataError, SingularSystemError
from .seriation import SeriatedMatrix

COND_WARN_THRESHOLD = 1e12
COND_SINGULAR_THRESHOLD = 1e15


@dataclass(frozen=True)
class RbfModel:
    """Fitted surface: height(x) = c0 + sum_m weights[m] * exp(-shape * |x - centers[m]|^2)."""

    centers: np.ndarray
    weights: np.ndarray
    shape: float
    reg_alpha: float
    has_constant_term: bool
    constant: float = 0.0

    def __post_init__(self) -> None:
        if self.shape <= 0.0:
            raise DataError(f"shape parameter must be positive, got {self.shape}")
        if len(self.weights) != len(self.centers):
            raise DataError("one weight per center required")

    def to_dict(self) -> dict:
        return {
            "centers": [[float(x), float(y)] for x, y in self.centers],
            "weights": [float(w) for w in self.weights],
            "a": self.shape,
            "c0": self.constant if self.has_constant_term else None,
            "reg_alpha": self.reg_alpha,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "RbfModel":
        c0 = payload.get("c0")
        return cls(
            centers=np.asarray(payload["centers"], dtype=float),
            weights=np.asarray(payload["weights"], dtype=float),
            shape=float(payload["a"]),
            reg_alpha=float(payload.get("reg_alpha", 0.0)),
            has_constant_term=c0 is not None,
            constant=float(c0) if c0 is not None else 0.0,
        )


@dataclass(frozen=True)
class SurfaceSample:
    """Fit targets: (i, j) index points with their normalized heights."""

    points: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.points.shape[0] != self.values.shape[0]:
            raise DataError("points/values length mismatch")
        if self.values.size and (self.values.min() < 0.0 or self.values.max() > 1.0):
            raise DataError("surface values must lie in [0, 1]")

    @classmethod
    def from_seriated(cls, sm: SeriatedMatrix, mirror: bool = True) -> "SurfaceSample":
        """Upper-triangle cells including the diagonal as fit targets.

        With ``mirror`` (the default) each off-diagonal cell also appears at
        its transposed position.  The values are redundant, but without them
        the frame centers below the diagonal see no data at all and the
        unregularized Gram system is singular.
        """
        n = sm.size
        ii, jj = np.triu_indices(n)
        points = np.column_stack([ii + 1.0, jj + 1.0])
        values = sm.d_norm[ii, jj].astype(float)
        if mirror:
            off = ii != jj
            points = np.vstack([points, np.column_stack([jj[off] + 1.0, ii[off] + 1.0])])
            values = np.concatenate([values, sm.d_norm[ii[off], jj[off]]])
        return cls(points=points, values=values)


def frame_centers(n: int, spacing: float) -> np.ndarray:
    """Centers on the boundary of the square [1 - spacing, n + spacing]^2.

    Each side is divided evenly with step as close to ``spacing`` as possible
    without exceeding it; corners appear once.  ``spacing`` must stay below
    ``n`` or the frame degenerates.
    """
    if n < 2:
        raise DataError(f"need a matrix of size >= 2, got {n}")
    if spacing <= 0.0:
        raise DataError(f"spacing must be positive, got {spacing}")
    if spacing >= n:
        raise DataError(f"frame degenerate: spacing {spacing} >= matrix size {n}")
    lo, hi = 1.0 - spacing, float(n) + spacing
    n_intervals = max(1, math.ceil((hi - lo) / spacing))
    ticks = np.linspace(lo, hi, n_intervals + 1)
    pts = []
    for ix, x in enumerate(ticks):
        for iy, y in enumerate(ticks):
            if ix in (0, n_intervals) or iy in (0, n_intervals):
                pts.append((float(x), float(y)))
    return np.array(sorted(pts))


def shape_from_residual(spacing: float, residual: float) -> float:
    """Gaussian decay rate such that the kernel drops to ``residual`` at ``spacing``."""
    if not 0.0 < residual < 1.0:
        raise DataError(f"residual must be in (0, 1), got {residual}")
    if spacing <= 0.0:
        raise DataError(f"spacing must be positive, got {spacing}")
    return -math.log(residual) / (spacing * spacing)


def _design_matrix(points: np.ndarray, centers: np.ndarray, shape: float, with_constant: bool) -> np.ndarray:
    diff = points[:, None, :] - centers[None, :, :]
    phi = np.exp(-shape * np.sum(diff * diff, axis=2))
    if with_constant:
        return np.hstack([np.ones((len(points), 1)), phi])
    return phi


def fit(
    sample: SurfaceSample,
    centers: np.ndarray,
    shape: float,
    reg_alpha: float = 0.0,
    with_constant: bool = True,
) -> RbfModel:
    """Least-squares weights for the Gaussian basis over the sample.

    Solves (Phi + (reg_alpha / K) * E) w = v where Phi and v are the
    sample-averaged basis products <phi_k phi_m> and targets <y phi_m>, K the
    sample size.  The constant term, when present, is prepended as a basis
    function identically 1 and left out of the penalty so that heavy
    regularization flattens the surface onto the sample mean rather than 0.

    With reg_alpha = 0 the Gram system must be numerically solvable;
    otherwise a positive reg_alpha is advised in the raised error.
    """
    if reg_alpha < 0.0:
        raise DataError(f"reg_alpha must be >= 0, got {reg_alpha}")
    k = len(sample.values)
    if k == 0:
        raise DataError("empty sample")
    a_mat = _design_matrix(sample.points, centers, shape, with_constant)
    gram = a_mat.T @ a_mat / k
    rhs = a_mat.T @ sample.values / k
    penalty = np.eye(gram.shape[0])
    if with_constant:
        penalty[0, 0] = 0.0
    system = gram + (reg_alpha / k) * penalty

    cond = np.linalg.cond(system)
    if not np.isfinite(cond) or cond > COND_SINGULAR_THRESHOLD:
        if reg_alpha == 0.0:
            raise SingularSystemError(
                f"Gram system singular (cond ~ {cond:.2e}); retry with a positive reg_alpha"
            )
        warnings.warn(f"ill-conditioned system despite regularization (cond ~ {cond:.2e})")
    elif cond > COND_WARN_THRESHOLD:
        warnings.warn(f"Gram system badly conditioned (cond ~ {cond:.2e})")
    try:
        coef = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(
            f"linear solve failed ({exc}); retry with a positive reg_alpha"
        ) from exc

    if with_constant:
        return RbfModel(
            centers=np.asarray(centers, dtype=float),
            weights=coef[1:],
            shape=shape,
            reg_alpha=reg_alpha,
            has_constant_term=True,
            constant=float(coef[0]),
        )
    return RbfModel(
        centers=np.asarray(centers, dtype=float),
        weights=coef,
        shape=shape,
        reg_alpha=reg_alpha,
        has_constant_term=False,
    )


def evaluate(model: RbfModel, points) -> np.ndarray | float:
    """Surface height at one (x, y) point or an (..., 2) array of points."""
    pts = np.asarray(points, dtype=float)
    scalar = pts.ndim == 1
    pts = np.atleast_2d(pts)
    diff = pts[:, None, :] - model.centers[None, :, :]
    phi = np.exp(-model.shape * np.sum(diff * diff, axis=2))
    out = phi @ model.weights + (model.constant if model.has_constant_term else 0.0)
    return float(out[0]) if scalar else out


def evaluate_grid(model: RbfModel, n: int) -> np.ndarray:
    """Heights at every integer matrix cell (1..n) x (1..n)."""
    ii, jj = np.meshgrid(np.arange(1, n + 1), np.arange(1, n + 1), indexing="ij")
    pts = np.column_stack([ii.ravel(), jj.ravel()]).astype(float)
    return np.asarray(evaluate(model, pts)).reshape(n, n)


def write_model_json(model: RbfModel, path) -> None:
    with open(path, "w") as fh:
        json.dump(model.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_model_json(path) -> RbfModel:
    with open(path) as fh:
        return RbfModel.from_dict(json.load(fh))
