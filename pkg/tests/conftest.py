import numpy as np


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via phase-fixed QR of a complex Gaussian."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def trapezoid_ip(grid: np.ndarray, f: np.ndarray, g: np.ndarray) -> complex:
    h = grid[1] - grid[0]
    w = np.full(grid.shape, h)
    w[0] = w[-1] = 0.5 * h
    if f.ndim == 2:
        return complex(np.sum(w[:, None] * f.conj() * g))
    return complex(np.sum(w * f.conj() * g))
