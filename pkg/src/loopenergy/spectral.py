"""Adjacency spectra of self-loop graphs.

Eigenvalues come from cyclic Jacobi rotations. The solver is batched: a
stack of equally sized symmetric matrices is rotated in lockstep with the
batch axis innermost, which is what makes the exhaustive sweeps affordable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence
from .graph import SelfLoopGraph, adjacency_matrix

DEFAULT_TOL = 1e-10
MAX_SWEEPS = 100
_REL_OFF_TOL = 1e-13


@dataclass(frozen=True)
class Spectrum:
    values: tuple[float, ...]

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def largest(self) -> float:
        return self.values[0]

    @property
    def smallest(self) -> float:
        return self.values[-1]

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class ShiftedSpectrum:
    mu: tuple[float, ...]
    abs_order: tuple[float, ...]
    shift: float

    @property
    def abs_max(self) -> float:
        return abs(self.abs_order[0])

    @property
    def abs_min(self) -> float:
        return abs(self.abs_order[-1])


@dataclass(frozen=True)
class TraceResiduals:
    r1: float
    r2: float
    r3: float

    def max(self) -> float:
        return max(self.r1, self.r2, self.r3)


def jacobi_eigh_batch(mats, tol: float | None = None, with_vectors: bool = False,
                      max_sweeps: int = MAX_SWEEPS):
    """Eigen-decompose a stack of real symmetric matrices.

    ``mats`` has shape ``(B, n, n)``. Returns eigenvalues of shape ``(B, n)``
    sorted descending, plus eigenvectors ``(B, n, n)`` (columns, matching the
    value order) when ``with_vectors`` is set. A matrix is done once its
    off-diagonal Frobenius norm drops below ``1e-13 * max(1, ||A||_F)``
    (or ``tol``, whichever is tighter).
    """
    a = np.asarray(mats, dtype=np.float64)
    if a.ndim != 3 or a.shape[1] != a.shape[2]:
        raise ValueError(f"expected a (B, n, n) stack, got shape {a.shape}")
    batch, n, _ = a.shape
    # batch axis last keeps every a[p, q] a contiguous vector
    a = np.ascontiguousarray(a.transpose(1, 2, 0))
    v = None
    if with_vectors:
        v = np.repeat(np.eye(n)[:, :, None], batch, axis=2)
        v_out = np.empty((n, n, batch))

    thresh = _REL_OFF_TOL * np.maximum(1.0, np.sqrt((a * a).sum(axis=(0, 1))))
    if tol is not None:
        thresh = np.minimum(thresh, tol)
    out = np.empty((n, batch))
    pairs = list(itertools.combinations(range(n), 2))
    iu, ju = np.triu_indices(n, 1)
    diag = np.arange(n)
    active = np.arange(batch)

    for sweep in range(max_sweeps + 1):
        off = np.sqrt(2.0 * (a[iu, ju] ** 2).sum(axis=0))
        done = off < thresh[active]
        if done.any():
            out[:, active[done]] = a[diag, diag][:, done]
            if with_vectors:
                v_out[:, :, active[done]] = v[:, :, done]
            keep = ~done
            a = np.ascontiguousarray(a[:, :, keep])
            if with_vectors:
                v = np.ascontiguousarray(v[:, :, keep])
            active = active[keep]
        if active.size == 0:
            break
        if sweep == max_sweeps:
            raise NoConvergence(
                f"Jacobi did not converge within {max_sweeps} sweeps", positions=active
            )
        for p, q in pairs:
            apq = a[p, q].copy()
            nz = apq != 0.0
            if not nz.any():
                continue
            app = a[p, p].copy()
            aqq = a[q, q].copy()
            with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
                theta = (aqq - app) / (2.0 * np.where(nz, apq, 1.0))
                t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            t = np.where(nz & np.isfinite(t), t, 0.0)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            row_p = a[p].copy()
            row_q = a[q].copy()
            new_p = c * row_p - s * row_q
            new_q = s * row_p + c * row_q
            a[p] = new_p
            a[q] = new_q
            a[:, p] = new_p
            a[:, q] = new_q
            a[p, p] = app - t * apq
            a[q, q] = aqq + t * apq
            a[p, q] = 0.0
            a[q, p] = 0.0
            if with_vectors:
                col_p = v[:, p].copy()
                col_q = v[:, q].copy()
                v[:, p] = c * col_p - s * col_q
                v[:, q] = s * col_p + c * col_q

    order = np.argsort(-out.T, axis=1, kind="stable")
    values = np.take_along_axis(out.T, order, axis=1)
    if not with_vectors:
        return values
    vecs = v_out.transpose(2, 0, 1)
    vecs = np.take_along_axis(vecs, order[:, None, :], axis=2)
    return values, vecs


def eigenvalues(g: SelfLoopGraph, tol: float = DEFAULT_TOL) -> Spectrum:
    values = jacobi_eigh_batch(adjacency_matrix(g)[None], tol=tol)[0]
    return Spectrum(tuple(float(x) for x in values))


def eigh(g: SelfLoopGraph, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Descending eigenvalues and matching orthonormal eigenvector columns."""
    values, vecs = jacobi_eigh_batch(adjacency_matrix(g)[None], tol=tol, with_vectors=True)
    return values[0], vecs[0]


def shifted_spectrum(spec: Spectrum, n: int, sigma: int) -> ShiftedSpectrum:
    if len(spec) != n:
        raise ValueError(f"spectrum has {len(spec)} values, expected {n}")
    if not 0 <= sigma <= n:
        raise ValueError(f"sigma must lie in [0, {n}], got {sigma}")
    shift = sigma / n
    mu = tuple(x - shift for x in spec.values)
    # stable sort on (-|mu|, -mu): larger magnitude first, positive before negative
    abs_order = tuple(sorted(mu, key=lambda x: (-abs(x), -x)))
    return ShiftedSpectrum(mu=mu, abs_order=abs_order, shift=shift)


def trace_residuals(g: SelfLoopGraph, spec: Spectrum) -> TraceResiduals:
    lam = np.asarray(spec.values)
    n, m, sigma = g.n, g.m, g.sigma
    return TraceResiduals(
        r1=float(abs(lam.sum() - sigma)),
        r2=float(abs((lam ** 2).sum() - (2 * m + sigma))),
        r3=float(abs(((lam - sigma / n) ** 2).sum() - (2 * m + sigma - sigma ** 2 / n))),
    )


def spectral_radius(g: SelfLoopGraph) -> float:
    spec = eigenvalues(g)
    return max(abs(spec.largest), abs(spec.smallest))
