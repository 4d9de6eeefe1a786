"""Wishart-Laguerre spectra and entropy samples.

Spectra come from Z Z^dagger with Z an m x n matrix of standard complex
Gaussians (E|Z_ij|^2 = 1).  Eigenvalues are computed by a batched cyclic Jacobi
sweep, vectorised over a stack of small Hermitian matrices.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

MAX_DIM = 64
CHUNK = 16384  # samples per RNG substream; fixed so output does not depend on workers
JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100
NEG_FLOOR = -1e-12
TINY = 1e-300


class EigensolverError(RuntimeError):
    """The Jacobi iteration did not reach the off-diagonal tolerance."""


def _rng(seed: int, chunk: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(chunk,))
    return np.random.Generator(np.random.Philox(ss))


def jacobi_eigvalsh(a: np.ndarray, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS) -> np.ndarray:
    """Eigenvalues (ascending) of a stack of Hermitian matrices, shape (..., m, m)."""
    a = np.array(a, dtype=np.complex128, copy=True)
    shape = a.shape
    m = shape[-1]
    a = a.reshape(-1, m, m)
    if m == 1:
        return a[:, 0, 0].real.reshape(shape[:-1])
    scale = np.sqrt(np.sum(np.abs(a) ** 2, axis=(1, 2)))
    scale[scale == 0] = 1.0
    off_mask = ~np.eye(m, dtype=bool)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(a[:, off_mask]) ** 2, axis=1))
        if np.all(off <= tol * scale):
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = a[:, p, q]
                mag = np.abs(apq)
                active = mag > 0
                if not active.any():
                    continue
                phase = np.where(active, apq / np.where(active, mag, 1.0), 1.0)
                # make a[p, q] real and non-negative
                a[:, :, q] *= np.conj(phase)[:, None]
                a[:, q, :] *= phase[:, None]
                app = a[:, p, p].real
                aqq = a[:, q, q].real
                safe = np.where(active, mag, 1.0)
                theta = (aqq - app) / (2.0 * safe)
                big = np.abs(theta) > 1e150
                th = np.where(big, 1.0, theta)
                t = np.sign(th) / (np.abs(th) + np.sqrt(th * th + 1.0))
                t = np.where(big, 0.5 / np.where(big, theta, 1.0), t)
                t = np.where(theta == 0, 1.0, t)
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                colp = a[:, :, p].copy()
                colq = a[:, :, q]
                a[:, :, p] = c[:, None] * colp - s[:, None] * colq
                a[:, :, q] = s[:, None] * colp + c[:, None] * colq
                rowp = a[:, p, :].copy()
                rowq = a[:, q, :]
                a[:, p, :] = c[:, None] * rowp - s[:, None] * rowq
                a[:, q, :] = s[:, None] * rowp + c[:, None] * rowq
                a[:, p, q] = 0.0
                a[:, q, p] = 0.0
    else:
        off = np.sqrt(np.sum(np.abs(a[:, off_mask]) ** 2, axis=1))
        if not np.all(off <= tol * scale):
            raise EigensolverError(f"Jacobi did not converge in {max_sweeps} sweeps")
    w = np.sort(np.diagonal(a, axis1=1, axis2=2).real, axis=1)
    return w.reshape(shape[:-1])


def _check_dims(m: int, n: int) -> None:
    if not (1 <= m <= n <= MAX_DIM):
        raise ValueError(f"need 1 <= m <= n <= {MAX_DIM}, got m={m}, n={n}")


def wishart_spectra(m: int, n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` eigenvalue vectors of Z Z^dagger, shape (count, m), clamped at 0."""
    _check_dims(m, n)
    z = (rng.standard_normal((count, m, n)) + 1j * rng.standard_normal((count, m, n))) / np.sqrt(2.0)
    w = z @ np.conj(np.swapaxes(z, 1, 2))
    eig = jacobi_eigvalsh(w)
    if np.any(eig < NEG_FLOOR * np.maximum(1.0, np.abs(eig).max(axis=1, keepdims=True))):
        raise EigensolverError("negative eigenvalue below the numerical floor")
    return np.clip(eig, 0.0, None)


def sample_spectrum(m: int, n: int, rng: np.random.Generator) -> np.ndarray:
    return wishart_spectra(m, n, 1, rng)[0]


def _xlogx(x: np.ndarray) -> np.ndarray:
    safe = np.where(x > TINY, x, 1.0)
    return np.where(x > TINY, x * np.log(safe), 0.0)


def entropy_S(eig: np.ndarray) -> np.ndarray:
    lam = eig / eig.sum(axis=-1, keepdims=True)
    return -_xlogx(lam).sum(axis=-1)


def induced_T(eig: np.ndarray) -> np.ndarray:
    return _xlogx(eig).sum(axis=-1)


@dataclass(frozen=True)
class SampleBatch:
    m: int
    n: int
    count: int
    seed: int
    values: np.ndarray
    statistic: str = "S"


def _chunk_job(args) -> np.ndarray:
    m, n, seed, chunk, size, statistic = args
    eig = wishart_spectra(m, n, size, _rng(seed, chunk))
    return entropy_S(eig) if statistic == "S" else induced_T(eig)


def sample_entropy(m: int, n: int, count: int, seed: int, workers: int = 1, statistic: str = "S") -> SampleBatch:
    """Entropy samples drawn in fixed-size substreams, concatenated in substream order."""
    _check_dims(m, n)
    if count < 1:
        raise ValueError("sample count must be positive")
    if statistic not in ("S", "T"):
        raise ValueError("statistic must be 'S' or 'T'")
    jobs = []
    done = 0
    chunk = 0
    while done < count:
        size = min(CHUNK, count - done)
        jobs.append((m, n, seed, chunk, size, statistic))
        done += size
        chunk += 1
    workers = max(1, min(workers, len(jobs), os.cpu_count() or 1))
    if workers == 1:
        parts = [_chunk_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_chunk_job, jobs))
    values = np.concatenate(parts)
    return SampleBatch(m, n, count, seed, values, statistic)
