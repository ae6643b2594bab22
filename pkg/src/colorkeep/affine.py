"""Affine color maps that match one image's color statistics to another's.

A map (A, b) transforms every pixel x -> A x + b so that the transformed
mean and covariance equal the target's. The covariance constraint
A @ S @ A.T == C leaves a family of solutions; three variants are provided:

* ``cholesky``        A = L_C @ inv(L_S) from the triangular factors.
                      Depends on the channel ordering.
* ``image_analogies`` A = sqrt(C) @ inv_sqrt(S) with symmetric square
                      roots; permutation-equivariant.
* ``mkl``             the closed form built from nested square roots of
                      the source covariance; among all valid maps it
                      minimizes the expected squared pixel displacement.

Covariances are regularized as S + eps*I before factorization. By default
eps is 1e-8 * trace/3 per matrix, which keeps nearly flat color
distributions (grayscale photos, near-solid artwork) solvable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg3
from .colorstats import ColorStats
from .errors import (
    DegenerateStatsError,
    NotPositiveDefiniteError,
    NotPsdError,
    NumericError,
    SingularMatrixError,
)
from .imgio import FloatImage

VARIANTS = ("cholesky", "image_analogies", "mkl")

DEFAULT_EPS_REL = 1e-8

# pipeline warns when a solved map has a Frobenius norm above this
LARGE_MAP_NORM = 1e3


@dataclass(frozen=True, eq=False)
class AffineColorMap:
    """Pixel map x -> a @ x + b, with the regularization used to solve it."""

    a: np.ndarray
    b: np.ndarray
    variant: str
    eps_source: float
    eps_target: float


def _resolve_eps(cov: np.ndarray, eps: float | None) -> float:
    if eps is not None:
        return float(eps)
    trace = float(cov[0, 0] + cov[1, 1] + cov[2, 2])
    return DEFAULT_EPS_REL * trace / 3.0


def solve_affine_map(
    source: ColorStats,
    target: ColorStats,
    variant: str = "image_analogies",
    eps: float | None = None,
) -> AffineColorMap:
    """Solve for the map taking the source color distribution onto the target's.

    ``eps`` is added to both covariance diagonals before factorization;
    None picks the per-matrix default. Raises DegenerateStatsError when
    the regularized source covariance cannot be factorized.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}, expected one of {VARIANTS}")
    eps_s = _resolve_eps(source.cov, eps)
    eps_c = _resolve_eps(target.cov, eps)
    cs = source.cov + eps_s * np.eye(3)
    cc = target.cov + eps_c * np.eye(3)

    try:
        if variant == "cholesky":
            ls = linalg3.cholesky3(cs)
            lc = linalg3.cholesky3(cc)
            a = lc @ linalg3.inv_lower(ls)
        elif variant == "image_analogies":
            a = linalg3.sym_sqrt(cc) @ linalg3.sym_inv_sqrt(cs)
        else:  # mkl
            w, u = linalg3.psd_eig(cs)
            if float(w.min()) <= 0.0:
                raise SingularMatrixError("source covariance is singular")
            root = (u * np.sqrt(w)) @ u.T
            inv_root = (u / np.sqrt(w)) @ u.T
            mid = root @ cc @ root
            mid = 0.5 * (mid + mid.T)
            a = inv_root @ linalg3.sym_sqrt(mid) @ inv_root
    except (NotPositiveDefiniteError, NotPsdError, SingularMatrixError) as exc:
        raise DegenerateStatsError(
            f"color statistics too degenerate for variant {variant!r}: {exc}"
        ) from exc

    b = target.mean - a @ source.mean
    return AffineColorMap(
        a=a, b=b, variant=variant, eps_source=eps_s, eps_target=eps_c
    )


def transform_planes(planes: np.ndarray, amap: AffineColorMap) -> np.ndarray:
    """Apply the map per pixel without gamut clamping.

    This is the raw linear stage; moment contracts hold exactly here.
    """
    a, b = amap.a, amap.b
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise NumericError("affine map has non-finite entries")
    r, g, bl = planes[0], planes[1], planes[2]
    out = np.empty_like(planes)
    for c in range(3):
        out[c] = a[c, 0] * r + a[c, 1] * g + a[c, 2] * bl + b[c]
    return out


def apply_affine_map(img: FloatImage, amap: AffineColorMap) -> FloatImage:
    """Transform every pixel and clamp the result into [0, 1]."""
    out = transform_planes(img.planes, amap)
    np.clip(out, 0.0, 1.0, out=out)
    return FloatImage(out)


def verify_constraint(
    amap: AffineColorMap, source: ColorStats, target: ColorStats
) -> tuple[float, float]:
    """Residuals of the two moment constraints.

    Returns (mean_residual, cov_residual): the Euclidean norm of
    ``a @ mean_s + b - mean_c`` and the Frobenius norm of
    ``a @ S~ @ a.T - C~`` over the regularized covariances.
    """
    a, b = amap.a, amap.b
    cs = source.cov + amap.eps_source * np.eye(3)
    cc = target.cov + amap.eps_target * np.eye(3)
    mean_res = float(np.linalg.norm(a @ source.mean + b - target.mean))
    cov_res = linalg3.frobenius(a @ cs @ a.T - cc)
    return mean_res, cov_res


def transport_cost(amap: AffineColorMap, source: ColorStats) -> float:
    """Expected squared pixel displacement under the source distribution.

    E||(A - I) x + b||^2 for x with the source mean and covariance:
    ||(A - I) mean + b||^2 + trace((A - I) cov (A - I)^T).
    """
    d = amap.a - np.eye(3)
    shift = d @ source.mean + amap.b
    return float(shift @ shift) + float(np.trace(d @ source.cov @ d.T))


def map_report(
    amap: AffineColorMap, source: ColorStats, target: ColorStats
) -> dict:
    """JSON-ready description of a solved map, as stored in run reports."""
    mean_res, cov_res = verify_constraint(amap, source, target)
    return {
        "variant": amap.variant,
        "A": [[float(x) for x in row] for row in amap.a],
        "b": [float(x) for x in amap.b],
        "residuals": {"mean": mean_res, "cov": cov_res},
        "transport_cost": transport_cost(amap, source),
    }


def map_norm(amap: AffineColorMap) -> float:
    """Frobenius norm of A, used for the huge-gain warning."""
    return linalg3.frobenius(amap.a)


def relative_cov_residual(
    amap: AffineColorMap, source: ColorStats, target: ColorStats
) -> float:
    """Covariance residual scaled by the regularized target norm."""
    _, cov_res = verify_constraint(amap, source, target)
    cc = target.cov + amap.eps_target * np.eye(3)
    denom = linalg3.frobenius(cc)
    if denom == 0.0:
        return cov_res
    return cov_res / denom
