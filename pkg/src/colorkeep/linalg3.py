"""Fixed-size numerical kernels for 3-vectors and symmetric 3x3 matrices.

Everything operates on plain numpy float64 arrays: vectors are shape (3,),
matrices (3, 3). Symmetric arguments are read from their upper triangle,
so marginally asymmetric inputs are tolerated.

The eigensolver is a cyclic Jacobi iteration specialised to 3x3. It keeps
the numerical core free of LAPACK, converges in a handful of sweeps, and
its outputs are fully deterministic (fixed rotation order, fixed
eigenvalue ordering, fixed eigenvector sign convention).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NotPositiveDefiniteError, NotPsdError, SingularMatrixError

# Convergence and clamping policy for the symmetric kernels.
JACOBI_MAX_SWEEPS = 50
JACOBI_REL_TOL = 1e-14
PSD_CLAMP_REL = 1e-10


def frobenius(m) -> float:
    """Frobenius norm."""
    a = np.asarray(m, dtype=np.float64)
    return float(math.sqrt(float(np.sum(a * a))))


def det3(m) -> float:
    """Determinant of a 3x3 matrix."""
    a = np.asarray(m, dtype=np.float64)
    return float(
        a[0, 0] * (a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
        - a[0, 1] * (a[1, 0] * a[2, 2] - a[1, 2] * a[2, 0])
        + a[0, 2] * (a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0])
    )


def inv3(m) -> np.ndarray:
    """Inverse of a 3x3 matrix via the adjugate.

    Raises SingularMatrixError when the determinant vanishes.
    """
    a = np.asarray(m, dtype=np.float64)
    d = det3(a)
    if d == 0.0 or not math.isfinite(d):
        raise SingularMatrixError("3x3 matrix is singular")
    adj = np.array(
        [
            [
                a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1],
                a[0, 2] * a[2, 1] - a[0, 1] * a[2, 2],
                a[0, 1] * a[1, 2] - a[0, 2] * a[1, 1],
            ],
            [
                a[1, 2] * a[2, 0] - a[1, 0] * a[2, 2],
                a[0, 0] * a[2, 2] - a[0, 2] * a[2, 0],
                a[0, 2] * a[1, 0] - a[0, 0] * a[1, 2],
            ],
            [
                a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0],
                a[0, 1] * a[2, 0] - a[0, 0] * a[2, 1],
                a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0],
            ],
        ],
        dtype=np.float64,
    )
    return adj / d


def cholesky3(m, eps: float = 0.0) -> np.ndarray:
    """Lower-triangular Cholesky factor L of m + eps*I, so L @ L.T == m + eps*I.

    Raises NotPositiveDefiniteError when a pivot is not strictly positive.
    """
    a = np.asarray(m, dtype=np.float64)
    a00 = float(a[0, 0]) + eps
    a01 = float(a[0, 1])
    a02 = float(a[0, 2])
    a11 = float(a[1, 1]) + eps
    a12 = float(a[1, 2])
    a22 = float(a[2, 2]) + eps

    if a00 <= 0.0:
        raise NotPositiveDefiniteError("pivot 1 is not positive")
    l00 = math.sqrt(a00)
    l10 = a01 / l00
    l20 = a02 / l00
    d = a11 - l10 * l10
    if d <= 0.0:
        raise NotPositiveDefiniteError("pivot 2 is not positive")
    l11 = math.sqrt(d)
    l21 = (a12 - l20 * l10) / l11
    d = a22 - l20 * l20 - l21 * l21
    if d <= 0.0:
        raise NotPositiveDefiniteError("pivot 3 is not positive")
    l22 = math.sqrt(d)
    return np.array(
        [[l00, 0.0, 0.0], [l10, l11, 0.0], [l20, l21, l22]], dtype=np.float64
    )


def inv_lower(l) -> np.ndarray:
    """Invert a lower-triangular 3x3 matrix by forward substitution."""
    a = np.asarray(l, dtype=np.float64)
    l00 = float(a[0, 0])
    l10 = float(a[1, 0])
    l11 = float(a[1, 1])
    l20 = float(a[2, 0])
    l21 = float(a[2, 1])
    l22 = float(a[2, 2])
    if l00 == 0.0 or l11 == 0.0 or l22 == 0.0:
        raise SingularMatrixError("triangular matrix has a zero diagonal entry")
    x00 = 1.0 / l00
    x11 = 1.0 / l11
    x22 = 1.0 / l22
    x10 = -l10 * x00 / l11
    x21 = -l21 * x11 / l22
    x20 = -(l20 * x00 + l21 * x10) / l22
    return np.array(
        [[x00, 0.0, 0.0], [x10, x11, 0.0], [x20, x21, x22]], dtype=np.float64
    )


def jacobi_eig(m) -> tuple[np.ndarray, np.ndarray, int]:
    """Eigendecomposition of a symmetric 3x3 matrix by cyclic Jacobi rotations.

    Returns (values, vectors, sweeps): eigenvalues in descending order, the
    matching eigenvectors as columns of an orthonormal matrix, and the
    number of sweeps performed. Convergence is declared when the
    off-diagonal Frobenius norm drops below JACOBI_REL_TOL times the input
    norm, after at most JACOBI_MAX_SWEEPS sweeps.

    Determinism: the sweep order is fixed (01, 02, 12), eigenvalues are
    sorted descending with a stable tie-break, and each eigenvector is
    signed so its first significant component is positive.
    """
    a = np.asarray(m, dtype=np.float64)
    a00 = float(a[0, 0])
    a01 = float(a[0, 1])
    a02 = float(a[0, 2])
    a11 = float(a[1, 1])
    a12 = float(a[1, 2])
    a22 = float(a[2, 2])

    v00, v01, v02 = 1.0, 0.0, 0.0
    v10, v11, v12 = 0.0, 1.0, 0.0
    v20, v21, v22 = 0.0, 0.0, 1.0

    norm = math.sqrt(
        a00 * a00 + a11 * a11 + a22 * a22 + 2.0 * (a01 * a01 + a02 * a02 + a12 * a12)
    )
    tol = JACOBI_REL_TOL * norm
    sweeps = 0
    while sweeps < JACOBI_MAX_SWEEPS:
        off = math.sqrt(2.0 * (a01 * a01 + a02 * a02 + a12 * a12))
        if off <= tol:
            break
        sweeps += 1

        if a01 != 0.0:
            theta = (a11 - a00) / (2.0 * a01)
            if abs(theta) > 1e100:  # avoid overflow in theta*theta
                t = 1.0 / (2.0 * theta)
            else:
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
            c = 1.0 / math.sqrt(t * t + 1.0)
            s = t * c
            a00 -= t * a01
            a11 += t * a01
            a01 = 0.0
            g0, g1 = a02, a12
            a02 = c * g0 - s * g1
            a12 = s * g0 + c * g1
            g0, g1 = v00, v01
            v00 = c * g0 - s * g1
            v01 = s * g0 + c * g1
            g0, g1 = v10, v11
            v10 = c * g0 - s * g1
            v11 = s * g0 + c * g1
            g0, g1 = v20, v21
            v20 = c * g0 - s * g1
            v21 = s * g0 + c * g1

        if a02 != 0.0:
            theta = (a22 - a00) / (2.0 * a02)
            if abs(theta) > 1e100:
                t = 1.0 / (2.0 * theta)
            else:
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
            c = 1.0 / math.sqrt(t * t + 1.0)
            s = t * c
            a00 -= t * a02
            a22 += t * a02
            a02 = 0.0
            g0, g1 = a01, a12
            a01 = c * g0 - s * g1
            a12 = s * g0 + c * g1
            g0, g1 = v00, v02
            v00 = c * g0 - s * g1
            v02 = s * g0 + c * g1
            g0, g1 = v10, v12
            v10 = c * g0 - s * g1
            v12 = s * g0 + c * g1
            g0, g1 = v20, v22
            v20 = c * g0 - s * g1
            v22 = s * g0 + c * g1

        if a12 != 0.0:
            theta = (a22 - a11) / (2.0 * a12)
            if abs(theta) > 1e100:
                t = 1.0 / (2.0 * theta)
            else:
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
            c = 1.0 / math.sqrt(t * t + 1.0)
            s = t * c
            a11 -= t * a12
            a22 += t * a12
            a12 = 0.0
            g0, g1 = a01, a02
            a01 = c * g0 - s * g1
            a02 = s * g0 + c * g1
            g0, g1 = v01, v02
            v01 = c * g0 - s * g1
            v02 = s * g0 + c * g1
            g0, g1 = v11, v12
            v11 = c * g0 - s * g1
            v12 = s * g0 + c * g1
            g0, g1 = v21, v22
            v21 = c * g0 - s * g1
            v22 = s * g0 + c * g1

    vals = (a00, a11, a22)
    cols = (
        (v00, v10, v20),
        (v01, v11, v21),
        (v02, v12, v22),
    )
    order = sorted(range(3), key=lambda k: -vals[k])

    w = np.empty(3, dtype=np.float64)
    u = np.empty((3, 3), dtype=np.float64)
    for out_idx, k in enumerate(order):
        w[out_idx] = vals[k]
        c0, c1, c2 = cols[k]
        # sign convention: first significant component positive
        amax = max(abs(c0), abs(c1), abs(c2))
        thresh = 1e-12 * amax
        for comp in (c0, c1, c2):
            if abs(comp) > thresh:
                if comp < 0.0:
                    c0, c1, c2 = -c0, -c1, -c2
                break
        u[0, out_idx] = c0
        u[1, out_idx] = c1
        u[2, out_idx] = c2
    return w, u, sweeps


def eig_sym(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and orthonormal eigenvector columns of a symmetric 3x3 matrix."""
    w, u, _ = jacobi_eig(m)
    return w, u


def psd_eig(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a PSD matrix, clamping tiny negative eigenvalues.

    Covariance estimates can come out marginally indefinite in floating
    point; eigenvalues in [-PSD_CLAMP_REL*trace, 0) are clamped to zero.
    Anything more negative raises NotPsdError.
    """
    a = np.asarray(m, dtype=np.float64)
    trace = float(a[0, 0] + a[1, 1] + a[2, 2])
    w, u, _ = jacobi_eig(a)
    lo = -PSD_CLAMP_REL * trace
    wmin = float(w.min())
    if wmin < lo:
        raise NotPsdError(
            f"eigenvalue {wmin:.6e} below the PSD clamping threshold {lo:.6e}"
        )
    return np.maximum(w, 0.0), u


def sym_sqrt(m) -> np.ndarray:
    """Symmetric PSD square root: rebuilds the matrix from the root eigenvalues."""
    w, u = psd_eig(m)
    r = (u * np.sqrt(w)) @ u.T
    return 0.5 * (r + r.T)


def sym_inv_sqrt(m, eps: float = 0.0) -> np.ndarray:
    """Inverse of the symmetric square root, with eigenvalue flooring.

    Eigenvalues are floored at eps*trace(m)/3 before inversion so nearly
    singular matrices stay usable. If a floored eigenvalue is still not
    positive the matrix has no inverse square root and SingularMatrixError
    is raised.
    """
    a = np.asarray(m, dtype=np.float64)
    trace = float(a[0, 0] + a[1, 1] + a[2, 2])
    w, u = psd_eig(a)
    w = np.maximum(w, eps * trace / 3.0)
    if float(w.min()) <= 0.0:
        raise SingularMatrixError(
            "zero eigenvalue after flooring; inverse square root undefined"
        )
    r = (u / np.sqrt(w)) @ u.T
    return 0.5 * (r + r.T)
