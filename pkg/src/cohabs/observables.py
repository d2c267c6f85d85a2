"""Diagnostics on oscillator states: entropies, relative entropy of
coherence, excitation statistics, quadrature moments, Gaussian-shell removal,
Wigner grids and their negativity volume.

All entropies are in nats.  Quadratures use X = (b + b^dag)/sqrt(2),
P = i (b^dag - b)/sqrt(2) (hbar = 1), so the vacuum covariance is
diag(1/2, 1/2).  The Wigner convention is W(x, p) = (1/pi) <D(a) Pi D(a)^dag>
with a = (x + i p)/sqrt(2), normalized as integral W dx dp = 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np
import scipy.linalg

from .errors import ShellRemovalError, StateError
from .hilbert import QuantumState

EIGENVALUE_FLOOR = 1e-14
COHERENCE_FLOOR = -1e-10
NORMALIZATION_ATOL = 0.02
SHELL_RESIDUAL_ATOL = 1e-6
SHELL_LEAKAGE_ATOL = 1e-4


def _as_density(rho) -> np.ndarray:
    if isinstance(rho, QuantumState):
        return rho.density()
    rho = np.asarray(rho, complex)
    if rho.ndim == 1:
        return np.outer(rho, rho.conj())
    return rho


# ---------------------------------------------------------------------------
# entropies and coherence

def _entropy_of(probs: np.ndarray) -> float:
    p = probs[probs > EIGENVALUE_FLOOR]
    return float(-(p * np.log(p)).sum())


def von_neumann_entropy(rho) -> float:
    """-sum(lam ln lam) over eigenvalues above the clipping floor."""
    rho = _as_density(rho)
    lam = np.linalg.eigvalsh(rho)
    if lam[0] < -1e-6:
        raise StateError(f"density matrix has eigenvalue {lam[0]:.3e}")
    return _entropy_of(lam)


def diagonal_entropy(rho) -> float:
    return _entropy_of(np.real(np.diagonal(_as_density(rho))))


def coherence(rho) -> float:
    """Relative entropy of coherence in the Fock basis: S(diag) - S(rho)."""
    rho = _as_density(rho)
    value = diagonal_entropy(rho) - von_neumann_entropy(rho)
    if value < COHERENCE_FLOOR:
        raise StateError(f"coherence {value!r} below the numerical floor")
    return max(value, 0.0)


# ---------------------------------------------------------------------------
# moments

@lru_cache(maxsize=32)
def _quadrature_matrices(dim: int):
    b = np.diag(np.sqrt(np.arange(1.0, dim)), 1).astype(complex)
    x = (b + b.conj().T) / math.sqrt(2.0)
    p = 1j * (b.conj().T - b) / math.sqrt(2.0)
    n = b.conj().T @ b
    return b, x, p, n


def _expval(rho: np.ndarray, op: np.ndarray) -> complex:
    return complex(np.einsum("ij,ji->", rho, op))


def excitation_stats(rho) -> tuple[float, float]:
    """Mean and standard deviation of the excitation number."""
    rho = _as_density(rho)
    pops = np.real(np.diagonal(rho))
    n = np.arange(len(pops), dtype=float)
    mean = float(n @ pops)
    var = float((n * n) @ pops) - mean ** 2
    return mean, math.sqrt(max(var, 0.0))


def quadrature_stats(rho) -> tuple[np.ndarray, np.ndarray]:
    """First moments (<X>, <P>) and the symmetrized 2x2 covariance matrix."""
    rho = _as_density(rho)
    dim = rho.shape[0]
    _, x, p, _ = _quadrature_matrices(dim)
    mx = _expval(rho, x).real
    mp = _expval(rho, p).real
    xx = _expval(rho, x @ x).real - mx * mx
    pp = _expval(rho, p @ p).real - mp * mp
    xp = 0.5 * _expval(rho, x @ p + p @ x).real - mx * mp
    return np.array([mx, mp]), np.array([[xx, xp], [xp, pp]])


# ---------------------------------------------------------------------------
# Gaussian-shell removal

def _mode_expm(generator: np.ndarray) -> np.ndarray:
    return scipy.linalg.expm(generator)


def remove_gaussian_shell(rho, max_rounds: int = 8,
                          residual_atol: float = SHELL_RESIDUAL_ATOL,
                          leakage_atol: float = SHELL_LEAKAGE_ATOL) -> np.ndarray:
    """Strip the Gaussian envelope: displacement to zero means, phase rotation
    diagonalizing the covariance, and squeezing equalizing its diagonal.

    The three operations are applied in that order and repeated (truncation
    makes each pass slightly inexact) until the means and covariance residuals
    pass `residual_atol`.  Raises ShellRemovalError, carrying the partial
    state and achieved residuals, if the targets cannot be met or squeezing
    pushes population into the top Fock levels.
    """
    rho = _as_density(rho).copy()
    dim = rho.shape[0]
    b, _, _, n_op = _quadrature_matrices(dim)

    def residuals(r):
        means, cov = quadrature_stats(r)
        return {
            "mean_x": abs(means[0]), "mean_p": abs(means[1]),
            "cov_offdiag": abs(cov[0, 1]), "cov_imbalance": abs(cov[0, 0] - cov[1, 1]),
        }

    for _ in range(max_rounds):
        res = residuals(rho)
        if max(res.values()) < residual_atol:
            return rho
        # displacement D(-<b>)
        amp = -_expval(rho, b)
        d = _mode_expm(amp * b.conj().T - np.conj(amp) * b)
        rho = d @ rho @ d.conj().T
        # rotation zeroing the covariance off-diagonal
        _, cov = quadrature_stats(rho)
        theta = 0.5 * math.atan2(2.0 * cov[0, 1], cov[0, 0] - cov[1, 1])
        u = np.exp(-1j * theta * np.arange(dim))
        rho = (u[:, None] * rho) * u.conj()[None, :]
        # squeezing equalizing the diagonal
        _, cov = quadrature_stats(rho)
        xi = 0.25 * math.log(cov[0, 0] / cov[1, 1])
        b2 = b @ b
        s = _mode_expm(0.5 * xi * (b2 - b2.conj().T))
        rho = s @ rho @ s.conj().T
        rho = 0.5 * (rho + rho.conj().T)
        trace = float(np.trace(rho).real)
        if abs(trace - 1.0) > leakage_atol:
            raise ShellRemovalError(
                f"squeezing leaked {abs(trace-1.0):.2e} probability past the cutoff",
                state=rho / trace, residuals=residuals(rho / trace))
        rho = rho / trace

    res = residuals(rho)
    if max(res.values()) >= residual_atol:
        raise ShellRemovalError(
            f"shell removal stalled with residuals {res}", state=rho, residuals=res)
    return rho


# ---------------------------------------------------------------------------
# Wigner function

@dataclass(frozen=True)
class WignerGridSpec:
    extent: float = 8.0
    points: int = 201

    def axis(self) -> np.ndarray:
        return np.linspace(-self.extent, self.extent, self.points)

    @staticmethod
    def for_state(rho, points: int = 201, minimum: float = 8.0) -> "WignerGridSpec":
        """Extent covering 4 sqrt(mean_N + 1), never below the default."""
        mean_n, _ = excitation_stats(rho)
        return WignerGridSpec(extent=max(minimum, math.ceil(4.0 * math.sqrt(mean_n + 1.0))),
                              points=points)


@dataclass(frozen=True)
class WignerGrid:
    x: np.ndarray
    p: np.ndarray
    values: np.ndarray           # shape (len(p), len(x)); row = fixed p
    normalization_integral: float
    coverage_warning: bool = False

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def dp(self) -> float:
        return float(self.p[1] - self.p[0])


def _laguerre_series(level: int, x: np.ndarray, coeffs: np.ndarray,
                     scale: np.ndarray) -> np.ndarray:
    """Clenshaw evaluation of scale * sum_m c_m phi_m(x) for the
    orthonormalized associated Laguerre family

        phi_m(x) = (-1)^m sqrt(level! m! / (level+m)!) L_m^(level)(x),

    which obeys phi_{m+1} = -[(2m+level+1-x) phi_m + sqrt(m(m+level)) phi_{m-1}]
    / sqrt((m+1)(m+level+1)) with phi_0 = 1.  The scale factor is folded into
    the coefficients so large arguments never overflow the recursion.
    """
    b1 = np.zeros_like(x, dtype=complex)
    b2 = np.zeros_like(x, dtype=complex)
    for m in range(len(coeffs) - 1, -1, -1):
        alpha = -(2 * m + level + 1 - x) / math.sqrt((m + 1) * (m + level + 1))
        beta = -math.sqrt((m + 1) * (m + level + 1)
                          / ((m + 2) * (m + level + 2)))
        b1, b2 = coeffs[m] * scale + alpha * b1 + beta * b2, b1
    return b1


def wigner_values(rho, xs: np.ndarray, ps: np.ndarray) -> np.ndarray:
    """W(x, p) evaluated at paired coordinate arrays of any common shape.

    The displaced-parity kernel is expanded over density-matrix diagonals in
    orthonormalized associated Laguerre polynomials via Clenshaw recursion.
    The Gaussian envelope is split as exp(-B/4) * exp(-B/4) between the
    Laguerre series and the diagonal-offset prefactor, which keeps both
    within floating-point range at large phase-space radius.
    """
    rho = _as_density(rho)
    dim = rho.shape[0]
    xs = np.asarray(xs, float)
    ps = np.asarray(ps, float)
    beta = math.sqrt(2.0) * (xs + 1j * ps)     # 2 alpha
    babs2 = np.abs(beta) ** 2
    damp = np.exp(-0.25 * babs2)
    acc = np.zeros_like(beta, dtype=complex)
    offset_factor = damp.astype(complex)       # beta^L exp(-B/4) / sqrt(L!)
    for level in range(dim):
        diag = np.diagonal(rho, offset=level).copy()
        if level > 0:
            diag = 2.0 * diag
        acc = acc + _laguerre_series(level, babs2, diag, damp) * offset_factor
        offset_factor = offset_factor * beta / math.sqrt(level + 1.0)
    return np.real(acc) / math.pi


def wigner(rho, grid: WignerGridSpec | None = None) -> WignerGrid:
    """Wigner transform on a rectangular grid, with the normalization integral
    recorded and a coverage warning when the extent misses 4 sqrt(mean_N+1)."""
    rho = _as_density(rho)
    if grid is None:
        grid = WignerGridSpec()
    ax = grid.axis()
    x_mesh, p_mesh = np.meshgrid(ax, ax)
    values = wigner_values(rho, x_mesh, p_mesh)
    dx = ax[1] - ax[0]
    norm = float(values.sum() * dx * dx)
    mean_n, _ = excitation_stats(rho)
    coverage = grid.extent < 4.0 * math.sqrt(mean_n + 1.0)
    return WignerGrid(ax, ax.copy(), values, norm, bool(coverage))


def negativity_volume(grid: WignerGrid) -> float:
    """Volume of the negative part, integral of max(-W, 0), by Riemann sum."""
    neg = np.clip(-grid.values, 0.0, None)
    return float(neg.sum() * grid.dx * grid.dp)


def radial_asymmetry(rho, radii, n_angles: int = 64) -> float:
    """Largest spread of W around any sampled circle; ~0 for Fock-diagonal
    states, whose Wigner functions are rotationally symmetric."""
    rho = _as_density(rho)
    angles = np.linspace(0.0, 2.0 * math.pi, n_angles, endpoint=False)
    worst = 0.0
    for r in radii:
        xs = r * np.cos(angles)
        ps = r * np.sin(angles)
        vals = wigner_values(rho, xs, ps)
        worst = max(worst, float(vals.max() - vals.min()))
    return worst


# ---------------------------------------------------------------------------
# bundled per-time-point diagnostics

@dataclass(frozen=True)
class DiagnosticsRecord:
    coherence: float
    entropy: float
    mean_n: float
    std_n: float
    mean_x: float
    mean_p: float
    cov_xx: float
    cov_pp: float
    cov_xp: float
    leakage: float

    CSV_HEADER = "coherence,entropy,mean_N,std_N,mean_X,mean_P,V11,V22,V12,leakage"

    def csv_row(self) -> str:
        return ",".join(f"{v:.12g}" for v in (
            self.coherence, self.entropy, self.mean_n, self.std_n,
            self.mean_x, self.mean_p, self.cov_xx, self.cov_pp, self.cov_xp,
            self.leakage))


def diagnose(rho_osc, leakage: float = 0.0) -> DiagnosticsRecord:
    """Full diagnostics bundle for an oscillator density matrix."""
    rho = _as_density(rho_osc)
    lam = np.linalg.eigvalsh(rho)
    if lam[0] < -1e-6:
        raise StateError(f"density matrix has eigenvalue {lam[0]:.3e}")
    entropy = _entropy_of(lam)
    coh = max(_entropy_of(np.real(np.diagonal(rho))) - entropy, 0.0)
    mean_n, std_n = excitation_stats(rho)
    means, cov = quadrature_stats(rho)
    return DiagnosticsRecord(
        coherence=coh, entropy=entropy, mean_n=mean_n, std_n=std_n,
        mean_x=float(means[0]), mean_p=float(means[1]),
        cov_xx=float(cov[0, 0]), cov_pp=float(cov[1, 1]), cov_xp=float(cov[0, 1]),
        leakage=float(leakage))


# ---------------------------------------------------------------------------
# Wigner grid serialization (byte-stable for identical inputs)

def save_wigner_text(grid: WignerGrid, path) -> None:
    """Plain-text matrix with axis header lines."""
    with open(path, "w") as fh:
        fh.write("# wigner grid: rows are fixed p, columns fixed x\n")
        fh.write("# x: " + " ".join(f"{v:.12g}" for v in grid.x) + "\n")
        fh.write("# p: " + " ".join(f"{v:.12g}" for v in grid.p) + "\n")
        fh.write(f"# normalization_integral: {grid.normalization_integral:.12g}\n")
        for row in grid.values:
            fh.write(" ".join(f"{v:.12g}" for v in row) + "\n")


def save_wigner_csv(grid: WignerGrid, path) -> None:
    """CSV triplets (x, p, W)."""
    with open(path, "w") as fh:
        fh.write("x,p,W\n")
        for j, p in enumerate(grid.p):
            for i, x in enumerate(grid.x):
                fh.write(f"{x:.12g},{p:.12g},{grid.values[j, i]:.12g}\n")


def load_wigner_text(path) -> WignerGrid:
    with open(path) as fh:
        fh.readline()
        x = np.array([float(v) for v in fh.readline().split(":", 1)[1].split()])
        p = np.array([float(v) for v in fh.readline().split(":", 1)[1].split()])
        norm = float(fh.readline().split(":", 1)[1])
        values = np.loadtxt(fh)
    return WignerGrid(x, p, values.reshape(len(p), len(x)), norm)
