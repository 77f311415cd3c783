"""Dense complex linear algebra shared by every rate expression.

All determinants of I + (PSD) go through Cholesky so that loss of positive
definiteness is detected instead of silently producing garbage.  Logs are
natural-base internally; public rate functions convert to bits once.
"""
from __future__ import annotations

import warnings

import numpy as np

LN2 = float(np.log(2.0))

# Componentwise tolerance for "is Hermitian".
HERMITIAN_TOL = 1e-12
# Minimum-eigenvalue tolerance for "is PSD".
PSD_EIG_TOL = 1e-10
# Ridge applied to a singular conditioning block before giving up.
SCHUR_RIDGE = 1e-10


class NumericalDomainError(ArithmeticError):
    """Raised when a matrix leaves the domain of the requested quantity."""


def as_cmatrix(m) -> np.ndarray:
    """Coerce to a 2-D complex128 array."""
    return np.atleast_2d(np.asarray(m, dtype=np.complex128))


def hermitize(m) -> np.ndarray:
    """Average with the conjugate transpose; exact no-op on Hermitian input."""
    m = as_cmatrix(m)
    return 0.5 * (m + m.conj().T)


def herm_defect(m) -> float:
    """Largest componentwise deviation from Hermitian symmetry."""
    m = as_cmatrix(m)
    if m.shape[0] != m.shape[1]:
        return np.inf
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(m - m.conj().T)))


def check_hermitian_psd(m, *, herm_tol: float = HERMITIAN_TOL,
                        eig_tol: float = PSD_EIG_TOL) -> np.ndarray:
    """Validate the Hermitian-PSD invariants; return the symmetrized matrix.

    Raises ValueError on asymmetry beyond ``herm_tol`` or an eigenvalue
    below ``-eig_tol``.
    """
    m = as_cmatrix(m)
    d = herm_defect(m)
    if not d <= herm_tol:
        raise ValueError(f"matrix is not Hermitian (defect {d:.3e})")
    m = hermitize(m)
    if m.size:
        lo = float(np.min(np.linalg.eigvalsh(m)))
        if lo < -eig_tol:
            raise ValueError(f"matrix is not PSD (min eigenvalue {lo:.3e})")
    return m


def logdet_id_nats(m) -> float:
    """ln det(I + m) for Hermitian m with I + m positive definite.

    Cholesky-based: raises NumericalDomainError if I + m is not PD.
    """
    m = as_cmatrix(m)
    a = np.eye(m.shape[0], dtype=np.complex128) + hermitize(m)
    try:
        chol = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalDomainError("I + m is not positive definite") from exc
    return 2.0 * float(np.sum(np.log(np.real(np.diagonal(chol)))))


def log_det_plus_identity(m) -> float:
    """log2 det(I + m) in bits for a Hermitian (numerically PSD-ish) m."""
    m = as_cmatrix(m)
    d = herm_defect(m)
    if not d <= max(HERMITIAN_TOL, 1e-12 * (1.0 + float(np.max(np.abs(m))))):
        raise ValueError(f"matrix is not Hermitian (defect {d:.3e})")
    return logdet_id_nats(m) / LN2


def schur_conditional_cov(joint, split: int) -> np.ndarray:
    """Conditional covariance of the leading block given the trailing one.

    For a PSD ``joint`` partitioned as [[S_a, G], [G^H, S_b]] with ``split``
    leading dimensions, returns S_a - G S_b^{-1} G^H.  A singular S_b gets a
    ridge of SCHUR_RIDGE * I (with a warning); if that still fails, raises
    NumericalDomainError.
    """
    joint = as_cmatrix(joint)
    n = joint.shape[0]
    if joint.shape[1] != n:
        raise ValueError("joint covariance must be square")
    if not 0 < split < n:
        raise ValueError(f"split must lie strictly inside [0, {n}]")
    joint = hermitize(joint)
    s_a = joint[:split, :split]
    g = joint[:split, split:]
    s_b = joint[split:, split:]
    try:
        chol = np.linalg.cholesky(s_b)
    except np.linalg.LinAlgError:
        warnings.warn("singular conditioning block; applying ridge",
                      RuntimeWarning, stacklevel=2)
        try:
            chol = np.linalg.cholesky(
                s_b + SCHUR_RIDGE * np.eye(s_b.shape[0]))
        except np.linalg.LinAlgError as exc:
            raise NumericalDomainError(
                "conditioning block is singular even after ridge") from exc
    # Solve S_b X = G^H through the Cholesky factor.
    y = np.linalg.solve(chol, g.conj().T)
    x = np.linalg.solve(chol.conj().T, y)
    return hermitize(s_a - g @ x)


def project_psd_trace(factor, budget: float) -> np.ndarray:
    """F F^H, rescaled onto the trace budget when it exceeds it.

    PSD by construction; trace <= budget afterwards.  The zero factor maps
    to the zero matrix.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    f = as_cmatrix(factor)
    s = f @ f.conj().T
    tr = float(np.real(np.trace(s)))
    if tr > budget:
        s = s * (budget / tr)
    return hermitize(s)


def psd_tril_factor(s, tol: float = 1e-12) -> np.ndarray:
    """Lower-triangular L with L L^H = s for Hermitian PSD s (rank-deficient OK).

    Standard Cholesky recursion with zeroed columns at (numerically) zero
    pivots, so water-filling covariances with dead eigenmodes factor exactly.
    """
    s = hermitize(s)
    n = s.shape[0]
    scale = max(1.0, float(np.max(np.abs(s))) if s.size else 1.0)
    low = np.zeros((n, n), dtype=np.complex128)
    for j in range(n):
        d = np.real(s[j, j] - np.sum(np.abs(low[j, :j]) ** 2))
        if d <= tol * scale:
            continue
        low[j, j] = np.sqrt(d)
        if j + 1 < n:
            low[j + 1:, j] = (s[j + 1:, j]
                              - low[j + 1:, :j] @ low[j, :j].conj()) / low[j, j]
    return low
