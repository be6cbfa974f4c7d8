"""Small shared linear-algebra helpers."""

import numpy as np


def hermiticity_defect(m: np.ndarray) -> float:
    """Max-abs deviation of m from its conjugate transpose."""
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def spectral_norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m, 2)) if m.size else 0.0


def frobenius_norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m))


def numeric_rank(m: np.ndarray, rel_tol: float = 1e-10) -> int:
    """Rank counted as singular values above rel_tol * largest singular value."""
    if not np.any(m):
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    return int(np.count_nonzero(s > rel_tol * s[0]))


def symmetrize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)
