"""Small dense matrix helpers shared by the bundle modules.

Matrices are numpy arrays in one of two flavours: complex128 for numeric
work, or object dtype holding ints/Fractions for exact work.  Products and
conjugate transposes keep the exact flavour exact; residuals are always
reported as floats.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def exact_matrix(rows) -> np.ndarray:
    """Object-dtype matrix of Fractions (exact arithmetic under np.dot)."""
    n = len(rows)
    m = len(rows[0]) if n else 0
    out = np.empty((n, m), dtype=object)
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            out[i, j] = Fraction(v)
    return out


def is_exact_matrix(a: np.ndarray) -> bool:
    return a.dtype == object and all(isinstance(v, (int, Fraction)) for v in a.flat)


def identity(n: int, exact: bool = False) -> np.ndarray:
    if exact:
        out = np.empty((n, n), dtype=object)
        for i in range(n):
            for j in range(n):
                out[i, j] = Fraction(int(i == j))
        return out
    return np.eye(n, dtype=complex)


def conj_transpose(a: np.ndarray) -> np.ndarray:
    return np.conj(a).T


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # np.dot keeps object dtype exact; matmul is equivalent here.
    return np.dot(a, b)


def to_complex(a: np.ndarray) -> np.ndarray:
    return np.asarray(a, dtype=complex)


def matrix_residual(a: np.ndarray, b: np.ndarray) -> float:
    """Max-abs entry difference; 0.0 for empty matrices."""
    if a.shape != b.shape:
        raise ValueError(f"matrix shapes differ: {a.shape} vs {b.shape}")
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(to_complex(a) - to_complex(b))))


def matrices_equal(a: np.ndarray, b: np.ndarray) -> bool:
    return a.shape == b.shape and bool(np.array_equal(a, b))


def unitarity_residual(a: np.ndarray) -> float:
    """max(|a a* - I|, |a* a - I|) in max-norm, exact inputs included."""
    n = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise ValueError("unitarity is only defined for square matrices")
    if n == 0:
        return 0.0
    if is_exact_matrix(a):
        ident = identity(n, exact=True)
        left = matmul(a, conj_transpose(a))
        right = matmul(conj_transpose(a), a)
        if matrices_equal(left, ident) and matrices_equal(right, ident):
            return 0.0
        return max(matrix_residual(left, ident), matrix_residual(right, ident))
    c = to_complex(a)
    ident = np.eye(n)
    left = float(np.max(np.abs(c @ conj_transpose(c) - ident)))
    right = float(np.max(np.abs(conj_transpose(c) @ c - ident)))
    return max(left, right)


def haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed random unitary via QR of a complex Ginibre matrix."""
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
