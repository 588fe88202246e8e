"""Elementary symmetric functions of symmetric matrices, and friends.

Everything downstream rests on the quantities defined here: the elementary
symmetric functions sigma_k of a spectrum, their matrix form evaluated through
characteristic-polynomial coefficients, the Newton transforms T_l, membership
in the open cone where sigma_1, ..., sigma_k are all positive, and unit-sphere
volumes.

Conventions
-----------
For eigenvalues lam_1, ..., lam_n,

    sigma_k = sum over k-subsets of products,      sigma_0 = 1,

and the Newton transform satisfies T_0 = I and T_l = sigma_l I - M T_{l-1},
equivalently T_l = sum_{j=0}^{l} (-1)^j sigma_{l-j} M^j.  Two trace identities
pin the normalisation and are enforced by the test suite:

    trace(T_l)     = (n - l) sigma_l,
    trace(T_l @ M) = (l + 1) sigma_{l+1}.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "sigma_k",
    "sigma_k_matrix",
    "newton_tensor",
    "in_cone",
    "sphere_volume",
    "elementary_symmetric_all",
]


def _as_spectrum(values) -> np.ndarray:
    lam = np.asarray(values, dtype=float)
    if lam.ndim != 1 or lam.size < 1:
        raise ValueError("spectrum must be a non-empty 1-d sequence of reals")
    if not np.all(np.isfinite(lam)):
        raise ValueError("spectrum entries must be finite")
    return lam


def _as_symmetric(M) -> np.ndarray:
    A = np.asarray(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.array_equal(A, A.T):
        raise ValueError("matrix must be symmetric exactly as stored")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    return A


def elementary_symmetric_all(values) -> np.ndarray:
    """All elementary symmetric functions e_0..e_n of a spectrum.

    Computed by the stable coefficient recurrence (expanding
    prod_i (x + lam_i) one root at a time); the result agrees with the
    characteristic-polynomial coefficients of any matrix having these
    eigenvalues.
    """
    lam = _as_spectrum(values)
    e = np.zeros(lam.size + 1)
    e[0] = 1.0
    for i, x in enumerate(lam):
        for j in range(min(i + 1, lam.size), 0, -1):
            e[j] += x * e[j - 1]
    return e


def sigma_k(values, k: int) -> float:
    """k-th elementary symmetric function of a spectrum."""
    lam = _as_spectrum(values)
    if not 0 <= k <= lam.size:
        raise ValueError(f"order k={k} outside 0..{lam.size}")
    return float(elementary_symmetric_all(lam)[k])


def sigma_k_matrix(M, k: int) -> float:
    """sigma_k of the eigenvalue spectrum of a symmetric matrix.

    Eigenvalues come from a symmetric eigensolver; sigma_k is then read off
    the characteristic-polynomial coefficients, which is deterministic and
    independent of eigenvalue ordering.
    """
    A = _as_symmetric(M)
    if not 0 <= k <= A.shape[0]:
        raise ValueError(f"order k={k} outside 0..{A.shape[0]}")
    return sigma_k(np.linalg.eigvalsh(A), k)


def newton_tensor(M, l: int) -> np.ndarray:
    """Newton transform T_l of a symmetric matrix, 0 <= l <= n-1."""
    A = _as_symmetric(M)
    n = A.shape[0]
    if not 0 <= l <= n - 1:
        raise ValueError(f"order l={l} outside 0..{n - 1}")
    e = elementary_symmetric_all(np.linalg.eigvalsh(A))
    T = np.eye(n)
    for j in range(1, l + 1):
        T = e[j] * np.eye(n) - A @ T
    # exact symmetry for downstream consumers; T is symmetric in exact
    # arithmetic but matrix products can leave 1-ulp asymmetries
    return (T + T.T) / 2.0


def in_cone(M, k: int) -> bool:
    """True iff sigma_1(M) > 0, ..., sigma_k(M) > 0 (strict, no tolerance).

    The cone is open, so comparisons are exact on the computed values;
    callers wanting slack should shift the matrix themselves.
    """
    A = _as_symmetric(M)
    n = A.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"order k={k} outside 1..{n}")
    e = elementary_symmetric_all(np.linalg.eigvalsh(A))
    return all(e[j] > 0.0 for j in range(1, k + 1))


def sphere_volume(n: int) -> float:
    """Volume of the unit n-sphere, 2 pi^((n+1)/2) / Gamma((n+1)/2).

    For even n = 2m this satisfies the recurrence
    |S_n| = |S_{n-1}| * 2^(n-1) ((m-1)!)^2 / (n-1)!,
    e.g. |S_3| = 2 pi^2 and |S_4| = (4/3) |S_3| = 8 pi^2 / 3.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError("dimension n must be a positive integer")
    return 2.0 * math.pi ** ((n + 1) / 2.0) / math.gamma((n + 1) / 2.0)
