# File: s3rec/src/services/recommender/objective.py
"""
Social-regularised matrix factorisation objective and gradients.

Shapes: R and I are m x n (ratings and 0/1 indicator), U is k x m, V is
k x n. S is a symmetric m x m social matrix (see ``symmetrise``); the
social penalty counts each unordered tie once, gamma/4 * sum s_if ||u_i - u_f||^2,
so that gamma/2 U(D^T + E^T) - gamma U S^T is its exact gradient.
"""

from typing import Tuple, Union

import numpy as np

from ...linalg.sparse import SparseMatrix
from ...utils.error_handling import ShapeError

SocialLike = Union[SparseMatrix, np.ndarray]


def _dense(S: SocialLike) -> np.ndarray:
    return S.to_dense().astype(np.float64) if isinstance(S, SparseMatrix) else np.asarray(S, dtype=np.float64)


def symmetrise(S: SparseMatrix) -> SparseMatrix:
    """(S + S^T) / 2 with canonical support"""
    both = np.concatenate([S.loc, S.loc[:, ::-1]])
    values = np.concatenate([S.val, S.val]).astype(np.float64) / 2.0
    return SparseMatrix.from_coo(S.rows, S.cols, both[:, 0], both[:, 1], values)


def _check(R: np.ndarray, I: np.ndarray, U: np.ndarray, V: np.ndarray) -> None:
    if R.shape != I.shape:
        raise ShapeError(f"R {R.shape} and I {I.shape} differ")
    if U.ndim != 2 or V.ndim != 2 or U.shape[0] != V.shape[0]:
        raise ShapeError(f"U {U.shape} and V {V.shape} must share the latent dimension")
    if R.shape != (U.shape[1], V.shape[1]):
        raise ShapeError(f"R {R.shape} does not match U {U.shape} and V {V.shape}")


def _check_social(S: SocialLike, U: np.ndarray) -> None:
    shape = S.shape
    if shape != (U.shape[1], U.shape[1]):
        raise ShapeError(f"S {shape} does not match {U.shape[1]} users")


def residual(R: np.ndarray, I: np.ndarray, U: np.ndarray, V: np.ndarray) -> np.ndarray:
    """(R - U^T V) masked by I, m x n"""
    return (R - U.T @ V) * I


def social_penalty(S: SocialLike, U: np.ndarray) -> float:
    """sum_{i,f} s_if ||u_i - u_f||^2"""
    if isinstance(S, SparseMatrix):
        diff = U[:, S.row_idx] - U[:, S.col_idx]
        return float(np.sum(S.val.astype(np.float64) * np.sum(diff ** 2, axis=0)))
    dense = _dense(S)
    norms = np.sum(U ** 2, axis=0)
    return float(np.sum(dense * (norms[:, None] + norms[None, :])) - 2.0 * np.sum(dense * (U.T @ U)))


def objective(R: np.ndarray, I: np.ndarray, S: SocialLike, U: np.ndarray, V: np.ndarray,
              lam: float, gamma: float) -> float:
    """Squared rating error, both ridge terms and the social penalty

    S is expected symmetrised (``symmetrise``). The penalty is then
    gamma/4 over ordered pairs, i.e. gamma/2 per unordered tie, the scaling
    for which ``social_term`` is the exact gradient.

    Raises:
        ShapeError: On non-conforming shapes
    """
    _check(R, I, U, V)
    value = 0.5 * float(np.sum(residual(R, I, U, V) ** 2))
    value += 0.5 * lam * float(np.sum(U ** 2)) + 0.5 * lam * float(np.sum(V ** 2))
    if gamma:
        _check_social(S, U)
        value += 0.25 * gamma * social_penalty(S, U)
    return value


def social_term(U: np.ndarray, S: SocialLike, gamma: float) -> np.ndarray:
    """gamma/2 U(D^T + E^T) - gamma U S^T, the plaintext mirror of st_mpc

    Raises:
        ShapeError: If S is not m x m
    """
    _check_social(S, U)
    if isinstance(S, SparseMatrix):
        diagonal = S.row_sums() + S.col_sums()
        coupled = (S.to_csr() @ U.T).T
    else:
        dense = _dense(S)
        diagonal = dense.sum(axis=1) + dense.sum(axis=0)
        coupled = U @ dense.T
    return 0.5 * gamma * U * diagonal[None, :] - gamma * coupled


def rating_grad_u(R: np.ndarray, I: np.ndarray, U: np.ndarray, V: np.ndarray, lam: float) -> np.ndarray:
    """-V((R - U^T V)^T o I) + lam U, the part P0 computes alone"""
    _check(R, I, U, V)
    return -V @ residual(R, I, U, V).T + lam * U


def grad_u_terms(R: np.ndarray, I: np.ndarray, S: SocialLike, U: np.ndarray, V: np.ndarray,
                 lam: float, gamma: float) -> Tuple[np.ndarray, np.ndarray]:
    """(rating term, social term) of dL/dU; the social term is zero for gamma = 0"""
    rating = rating_grad_u(R, I, U, V, lam)
    social = social_term(U, S, gamma) if gamma else np.zeros_like(U)
    return rating, social


def grad_u(R: np.ndarray, I: np.ndarray, S: SocialLike, U: np.ndarray, V: np.ndarray,
           lam: float, gamma: float) -> np.ndarray:
    rating, social = grad_u_terms(R, I, S, U, V, lam, gamma)
    return rating + social


def grad_v(R: np.ndarray, I: np.ndarray, U: np.ndarray, V: np.ndarray, lam: float) -> np.ndarray:
    """-U((R - U^T V) o I) + lam V"""
    _check(R, I, U, V)
    return -U @ residual(R, I, U, V) + lam * V
