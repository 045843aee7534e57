"""Spectral filters for inputs driven through a near-real marginally stable mode.

The Gram matrix integrates the outer product of damped power profiles
mu(a) = (1 - a^2) * (1, a, a^2, ...) over the sector {|a| <= 1,
|arg a| <= beta} of the complex plane with the polar area measure.  Exact
integration gives entry

    G_jk = S(m) (1/(j+k+2) + 1/(j+k+6)) - (S(m+2) + S(m-2)) / (j+k+4)

with m = j - k and S(m) = 2 sin(m beta) / m, S(0) = 2 beta.  Its spectrum
decays fast, so a handful of top eigenvectors span the profiles of every
admissible mode; projections of past inputs onto them are a compact
sufficient statistic for long-memory prediction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from seqprecond.poly import ComplexSector

# Beyond this the dense Gram matrix and its eigendecomposition stop being
# a desk-scale object (8192^2 doubles is already half a gigabyte).
MAX_HORIZON = 8192

DEFAULT_FILTER_COUNT = 24


def _pair_sine(m, beta: float):
    """S(m) = 2 sin(m beta) / m with the continuous limit 2 beta at m = 0."""
    m = np.asarray(m, dtype=float)
    safe = np.where(m == 0, 1.0, m)
    return np.where(m == 0, 2.0 * beta, 2.0 * np.sin(m * beta) / safe)


def gram_entry(j: int, k: int, sector: ComplexSector) -> float:
    """Closed-form sector Gram entry for row j, column k (both >= 0)."""
    if j < 0 or k < 0:
        raise ValueError("indices must be nonnegative")
    b = sector.beta
    m = j - k
    jk = j + k
    val = _pair_sine(m, b) * (1.0 / (jk + 2) + 1.0 / (jk + 6))
    val -= (_pair_sine(m + 2, b) + _pair_sine(m - 2, b)) / (jk + 4)
    return float(val)


def build_gram(horizon: int, sector: ComplexSector) -> np.ndarray:
    """Dense symmetric Gram matrix of size horizon x horizon."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if horizon > MAX_HORIZON:
        raise ValueError(
            f"horizon {horizon} exceeds the memory guard {MAX_HORIZON}"
        )
    b = sector.beta
    idx = np.arange(horizon)
    m = idx[:, None] - idx[None, :]
    jk = (idx[:, None] + idx[None, :]).astype(float)
    Z = _pair_sine(m, b) * (1.0 / (jk + 2) + 1.0 / (jk + 6))
    Z -= (_pair_sine(m + 2, b) + _pair_sine(m - 2, b)) / (jk + 4)
    return Z


@dataclass(frozen=True)
class FilterBank:
    """Top eigenvectors of the sector Gram matrix, fixed sign, unit norm."""

    horizon: int
    eigenvalues: np.ndarray  # full spectrum, descending
    filters: np.ndarray  # (k, horizon) rows
    sector: ComplexSector | None = None

    @property
    def k(self) -> int:
        return self.filters.shape[0]


def filter_bank(Z: np.ndarray, k: int, sector: ComplexSector | None = None) -> FilterBank:
    """Extract the top-k eigenvectors of a symmetric PSD Gram matrix.

    Sign convention: the first component of each filter whose magnitude is
    non-negligible is made positive, so the bank is reproducible bit for
    bit on one platform.
    """
    Z = np.asarray(Z, dtype=float)
    horizon = Z.shape[0]
    if Z.shape != (horizon, horizon):
        raise ValueError(f"Gram matrix must be square, got {Z.shape}")
    if not 0 <= k <= horizon:
        raise ValueError(f"need 0 <= k <= {horizon}, got k={k}")
    w, V = scipy.linalg.eigh(Z)
    w = w[::-1]
    V = V[:, ::-1]
    if w[0] <= horizon * 1e-15:
        raise ValueError(
            "degenerate filter bank: Gram matrix is numerically zero "
            "(zero-measure sector?)"
        )
    F = V[:, :k].T.copy()
    for row in F:
        nz = np.flatnonzero(np.abs(row) > 1e-12 * np.abs(row).max())
        if nz.size and row[nz[0]] < 0:
            row *= -1.0
    bank = FilterBank(horizon=horizon, eigenvalues=w, filters=F, sector=sector)
    _validate_bank(Z, bank)
    return bank


def _validate_bank(Z: np.ndarray, bank: FilterBank) -> None:
    F, w = bank.filters, bank.eigenvalues
    if bank.k:
        gram = F @ F.T
        if np.abs(gram - np.eye(bank.k)).max() > 1e-10:
            raise ValueError("filters are not orthonormal to 1e-10")
        resid = Z @ F.T - F.T * w[: bank.k]
        if np.abs(resid).max() > 1e-8 * w[0]:
            raise ValueError("eigenpair residual exceeds 1e-8 * largest eigenvalue")
    if np.any(np.diff(w) > 1e-12) or w[-1] < -1e-10:
        raise ValueError("eigenvalues must be descending and nonnegative to 1e-10")


def build_filter_bank(horizon: int, sector: ComplexSector, k: int) -> FilterBank:
    return filter_bank(build_gram(horizon, sector), k, sector)


def filter_project(
    bank: FilterBank, padded_inputs: np.ndarray, total_horizon: int | None = None
) -> np.ndarray:
    """Project a zero-padded reversed input block onto the filters.

    Row j of the result is filters[j] . padded_inputs, scaled by
    1/sqrt(total_horizon); the scale horizon defaults to the bank's own.
    """
    u = np.asarray(padded_inputs, dtype=float)
    if u.ndim == 1:
        u = u[:, None]
    if u.shape[0] != bank.horizon:
        raise ValueError(
            f"padded inputs have length {u.shape[0]}, bank expects {bank.horizon}"
        )
    T = bank.horizon if total_horizon is None else total_horizon
    return (bank.filters @ u) / np.sqrt(T)
