"""Dense complex linear algebra used by every other module.

The eigensolver is a cyclic Jacobi method for Hermitian matrices. Rotations
are scheduled in round-robin order so that each step applies a batch of
disjoint plane rotations as one unitary, which keeps the Python overhead per
sweep proportional to ``n`` rather than ``n**2``. Simultaneous
diagonalization, singular values, rank and whitening are built on top of it.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .config import settings
from .exceptions import NoConvergence, NotCommuting, NotHermitian, NotNormal, NotSquare, NumlinError

logger = logging.getLogger(__name__)

_MACHINE_EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class Tolerance:
    """Absolute and relative thresholds for every numerical decision."""
    abs_eps: float = settings.ABS_EPS
    rel_eps: float = settings.REL_EPS

    def __post_init__(self):
        if not (self.abs_eps > 0 and self.rel_eps > 0):
            raise ValueError(f"tolerances must be positive, got abs_eps={self.abs_eps}, rel_eps={self.rel_eps}")

    @classmethod
    def default(cls) -> "Tolerance":
        return cls(settings.ABS_EPS, settings.REL_EPS)

    @classmethod
    def coerce(cls, tol: Optional["Tolerance"]) -> "Tolerance":
        return cls.default() if tol is None else tol


# -------------------------------------------------
# Helpers
# -------------------------------------------------
def as_cmatrix(m) -> np.ndarray:
    """Return ``m`` as a finite 2-d complex array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise NotSquare(f"expected a matrix, got an array of shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NumlinError("matrix has non-finite entries")
    return a


def max_abs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def _off_diagonal(a: np.ndarray) -> float:
    return max_abs(a - np.diag(np.diag(a)))


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    # Circle method: m - 1 rounds of m // 2 disjoint pairs cover every pair once.
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        pairs = [(min(p, q), max(p, q)) for p, q in pairs if p < n and q < n]
        if pairs:
            ps, qs = zip(*pairs)
            rounds.append((np.array(ps), np.array(qs)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _rotation(a: np.ndarray, ps: np.ndarray, qs: np.ndarray) -> Optional[np.ndarray]:
    """Unitary annihilating a[p, q] for every (p, q) of one round."""
    apq = a[ps, qs]
    mag = np.abs(apq)
    active = mag > 0.0
    if not active.any():
        return None
    app = a[ps, ps].real
    aqq = a[qs, qs].real
    phase = np.where(active, apq / np.where(active, mag, 1.0), 1.0)
    theta = np.where(active, 0.5 * np.arctan2(2.0 * mag, aqq - app), 0.0)
    c, s = np.cos(theta), np.sin(theta)
    w = np.conj(phase)

    g = np.eye(a.shape[0], dtype=complex)
    g[ps, ps] = c
    g[ps, qs] = s
    g[qs, ps] = -s * w
    g[qs, qs] = c * w
    return g


# -------------------------------------------------
# Eigen-decomposition
# -------------------------------------------------
def hermitian_eig(m, tol: Optional[Tolerance] = None) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and a unitary of eigenvectors of a Hermitian matrix."""
    tol = Tolerance.coerce(tol)
    a = as_cmatrix(m)
    rows, cols = a.shape
    if rows != cols:
        raise NotSquare(f"expected a square matrix, got {rows}x{cols}")
    skew = max_abs(a - a.conj().T)
    if skew > tol.abs_eps:
        raise NotHermitian(f"‖M − M*‖_max = {skew:.3e} exceeds {tol.abs_eps:.1e}", witness={"deviation": skew})

    a = 0.5 * (a + a.conj().T)
    u = np.eye(rows, dtype=complex)
    if rows > 1:
        threshold = max(1e-3 * tol.abs_eps, 64 * _MACHINE_EPS) * (1.0 + max_abs(a))
        rounds = _round_robin(rows)
        converged = False
        for _ in range(settings.MAX_SWEEPS):
            if _off_diagonal(a) <= threshold:
                converged = True
                break
            for ps, qs in rounds:
                g = _rotation(a, ps, qs)
                if g is None:
                    continue
                a = g.conj().T @ a @ g
                a[ps, qs] = 0.0
                a[qs, ps] = 0.0
                u = u @ g
        if not converged and _off_diagonal(a) > threshold:
            raise NoConvergence(
                f"Jacobi did not converge in {settings.MAX_SWEEPS} sweeps",
                witness={"off_diagonal": _off_diagonal(a), "threshold": threshold},
            )

    eigenvalues = np.real(np.diag(a)).copy()
    order = np.argsort(eigenvalues, kind="stable")
    return eigenvalues[order], u[:, order]


# -------------------------------------------------
# Simultaneous diagonalization
# -------------------------------------------------
def _cluster_gap(h: np.ndarray, tol: Tolerance) -> float:
    return max(1e-6 * max_abs(h), 10.0 * tol.abs_eps)


def _clusters(values: np.ndarray, gap: float) -> list[list[int]]:
    groups = [[0]]
    for i in range(1, len(values)):
        if values[i] - values[i - 1] < gap:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _is_scalar(h: np.ndarray, tol: Tolerance) -> bool:
    k = h.shape[0]
    centre = np.trace(h) / k
    return max_abs(h - centre * np.eye(k)) < _cluster_gap(h, tol)


def _split(hermitians: list[np.ndarray], basis: np.ndarray, rng: np.random.Generator, tol: Tolerance) -> np.ndarray:
    k = basis.shape[1]
    if k <= 1:
        return basis
    compressed = []
    for h in hermitians:
        c = basis.conj().T @ h @ basis
        compressed.append(0.5 * (c + c.conj().T))
    if all(_is_scalar(c, tol) for c in compressed):
        return basis

    weights = rng.standard_normal(len(compressed))
    combination = sum(w * c for w, c in zip(weights, compressed))
    for candidate in [combination, *compressed]:
        values, vectors = hermitian_eig(candidate, tol)
        groups = _clusters(values, _cluster_gap(candidate, tol))
        if len(groups) > 1:
            return np.hstack([_split(hermitians, basis @ vectors[:, g], rng, tol) for g in groups])
    return basis


def simultaneous_diag(ms: Sequence, tol: Optional[Tolerance] = None) -> np.ndarray:
    """Unitary U with every U*·M·U diagonal, for commuting normal matrices M."""
    tol = Tolerance.coerce(tol)
    mats = [as_cmatrix(m) for m in ms]
    if not mats:
        raise ValueError("simultaneous_diag needs at least one matrix")
    n = mats[0].shape[0]
    for i, m in enumerate(mats):
        if m.shape != (n, n):
            raise NotSquare(f"matrix {i} has shape {m.shape}, expected {(n, n)}", witness={"index": i})
    if n == 0:
        return np.zeros((0, 0), dtype=complex)

    for i, m in enumerate(mats):
        deviation = max_abs(m @ m.conj().T - m.conj().T @ m)
        if deviation > tol.abs_eps * n * (1.0 + max_abs(m) ** 2):
            raise NotNormal(f"matrix {i} is not normal", witness={"index": i, "deviation": deviation})
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            deviation = max_abs(mats[i] @ mats[j] - mats[j] @ mats[i])
            if deviation > tol.abs_eps * n * (1.0 + max_abs(mats[i]) * max_abs(mats[j])):
                raise NotCommuting(
                    f"matrices {i} and {j} do not commute",
                    witness={"pair": [i, j], "deviation": deviation},
                )

    hermitians = []
    for m in mats:
        hermitians.append(m + m.conj().T)
        hermitians.append(1j * (m - m.conj().T))
    rng = np.random.default_rng(settings.DIAG_SEED)
    u = _split(hermitians, np.eye(n, dtype=complex), rng, tol)

    for i, m in enumerate(mats):
        off = _off_diagonal(u.conj().T @ m @ u)
        if off > 100 * tol.abs_eps * (1.0 + max_abs(m)):
            raise NoConvergence(
                f"joint diagonalization left off-diagonal mass {off:.3e} in matrix {i}",
                witness={"index": i, "off_diagonal": off},
            )
    return u


def joint_spectrum(ms: Sequence, u: np.ndarray) -> np.ndarray:
    """Row p holds the diagonal entries (U*·M_k·U)[p, p] for every k."""
    return np.array([np.diag(u.conj().T @ as_cmatrix(m) @ u) for m in ms]).T


# -------------------------------------------------
# Singular values, rank, whitening
# -------------------------------------------------
def _dilation_svd(m, tol: Tolerance) -> tuple[np.ndarray, np.ndarray]:
    a = as_cmatrix(m)
    rows, cols = a.shape
    k = min(rows, cols)
    if k == 0:
        return np.zeros(0), np.zeros((rows, 0), dtype=complex)
    dilation = np.zeros((rows + cols, rows + cols), dtype=complex)
    dilation[:rows, rows:] = a
    dilation[rows:, :rows] = a.conj().T
    values, vectors = hermitian_eig(dilation, tol)
    top = np.arange(rows + cols)[::-1][:k]
    sigma = np.clip(values[top], 0.0, None)
    left = vectors[:rows, top]
    norms = np.linalg.norm(left, axis=0)
    left = left / np.where(norms > 0, norms, 1.0)
    return sigma, left


def singular_values(m, tol: Optional[Tolerance] = None) -> np.ndarray:
    """Singular values in descending order.

    Computed from the Hermitian dilation [[0, M], [M*, 0]], whose eigenvalues
    are ±σ; this keeps the absolute error at machine precision times ‖M‖
    instead of its square root, which M*M would give.
    """
    sigma, _ = _dilation_svd(m, Tolerance.coerce(tol))
    return sigma


def _rank_cutoff(sigma: np.ndarray, tol: Tolerance) -> float:
    return tol.rel_eps * (sigma[0] if sigma.size else 0.0) + tol.abs_eps


def numeric_rank(m, tol: Optional[Tolerance] = None) -> int:
    tol = Tolerance.coerce(tol)
    sigma = singular_values(m, tol)
    if not sigma.size:
        return 0
    return int(np.count_nonzero(sigma > _rank_cutoff(sigma, tol)))


def image_basis(m, tol: Optional[Tolerance] = None) -> np.ndarray:
    """Orthonormal basis (as columns) of the column space of ``m``."""
    tol = Tolerance.coerce(tol)
    sigma, left = _dilation_svd(m, tol)
    if not sigma.size:
        return left
    rank = int(np.count_nonzero(sigma > _rank_cutoff(sigma, tol)))
    return left[:, :rank]


def whitening(gram, tol: Optional[Tolerance] = None) -> Optional[tuple[np.ndarray, np.ndarray]]:
    """(R, R⁻¹) with gram = R*·R, or None when gram is not positive definite."""
    tol = Tolerance.coerce(tol)
    g = as_cmatrix(gram)
    g = 0.5 * (g + g.conj().T)
    values, vectors = hermitian_eig(g, tol)
    if not values.size:
        return np.zeros((0, 0), dtype=complex), np.zeros((0, 0), dtype=complex)
    if values[0] <= tol.abs_eps * (1.0 + abs(values[-1])):
        return None
    root = np.sqrt(values)
    r = root[:, None] * vectors.conj().T
    r_inv = vectors / root[None, :]
    return r, r_inv
