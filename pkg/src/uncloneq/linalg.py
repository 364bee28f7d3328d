"""Dense complex linear-algebra kernel.

Tensor products, Hermitian eigendecompositions, partial traces, Kraus
channels, pseudo-inverse square roots, and Haar / uniform-spherical random
sampling.  States and operators are plain complex ``numpy`` arrays; the
``assert_*`` validators enforce the validity contracts with the absolute
tolerances from :mod:`uncloneq.config`.

Randomness is drawn from ``numpy.random.Generator`` instances (PCG64),
which are seedable and splittable: create one with :func:`make_rng` and
derive independent worker streams with ``rng.spawn(n)`` or by passing a
distinct ``stream`` index.  A fixed ``(seed, stream)`` pair reproduces the
same outputs bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .config import TOL
from .errors import DimensionMismatch, InvalidOperator, NotHermitian

Array = np.ndarray

__all__ = [
    "Array",
    "KrausChannel",
    "apply_channel",
    "assert_density_operator",
    "assert_projector",
    "assert_unit_vector",
    "assert_unitary",
    "dagger",
    "haar_unitary",
    "herm_eig",
    "make_rng",
    "max_abs",
    "partial_trace",
    "pseudo_inv_sqrt",
    "tensor",
    "uniform_sphere_vector",
]


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Seeded PCG64 generator; ``stream`` selects an independent substream.

    Distinct ``(seed, stream)`` pairs yield statistically independent
    streams, so parallel workers can each receive ``make_rng(seed, i)``.
    """
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(stream,))
    return np.random.Generator(np.random.PCG64(ss))


def dagger(a: Array) -> Array:
    """Conjugate transpose."""
    return a.conj().T


def max_abs(a: Array) -> float:
    """Largest entry magnitude; 0.0 for empty arrays."""
    return float(np.max(np.abs(a))) if a.size else 0.0


# ---------------------------------------------------------------------------
# validators
# ---------------------------------------------------------------------------


def _require_square(a: Array) -> int:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    return a.shape[0]


def assert_finite(a: Array) -> None:
    if not np.all(np.isfinite(a.view(float) if np.iscomplexobj(a) else a)):
        raise InvalidOperator("array contains NaN or Inf entries")


def assert_unit_vector(psi: Array, tol: float = TOL.norm) -> None:
    """Check that ``psi`` is a unit vector within ``tol``."""
    assert_finite(psi)
    if psi.ndim != 1:
        raise DimensionMismatch(f"expected a vector, got shape {psi.shape}")
    nrm = float(np.linalg.norm(psi))
    if abs(nrm - 1.0) > tol:
        raise InvalidOperator(f"vector norm {nrm} deviates from 1 by more than {tol}")


def assert_hermitian(h: Array, tol: float = TOL.herm) -> None:
    """Check max-entry deviation of ``h`` from its conjugate transpose."""
    assert_finite(h)
    _require_square(h)
    dev = max_abs(h - dagger(h))
    if dev > tol:
        raise NotHermitian(f"Hermiticity deviation {dev} exceeds {tol}")


def assert_density_operator(
    rho: Array,
    herm_tol: float = TOL.herm,
    psd_tol: float = TOL.density_psd,
    trace_tol: float = TOL.trace,
) -> None:
    """Check Hermiticity, positivity and unit trace of a density operator."""
    assert_hermitian(rho, herm_tol)
    w = np.linalg.eigvalsh(rho)
    if w[0] < -psd_tol:
        raise InvalidOperator(f"smallest eigenvalue {w[0]} below -{psd_tol}")
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > trace_tol:
        raise InvalidOperator(f"trace {tr} deviates from 1 by more than {trace_tol}")


def assert_unitary(u: Array, tol: float = TOL.unitary) -> None:
    """Check ``u @ u.conj().T == I`` within ``tol`` (max entry deviation)."""
    assert_finite(u)
    d = _require_square(u)
    dev = max_abs(u @ dagger(u) - np.eye(d))
    if dev > tol:
        raise InvalidOperator(f"unitarity deviation {dev} exceeds {tol}")


def assert_projector(
    p: Array, herm_tol: float = TOL.herm, idem_tol: float = TOL.idempotent
) -> None:
    """Check Hermiticity and idempotence of a projector."""
    assert_hermitian(p, herm_tol)
    dev = max_abs(p @ p - p)
    if dev > idem_tol:
        raise InvalidOperator(f"idempotence deviation {dev} exceeds {idem_tol}")


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def tensor(a: Array, b: Array) -> Array:
    """Kronecker product with row index ordering ``(i_a, i_b)``."""
    return np.kron(a, b)


def herm_eig(h: Array, tol: float = TOL.herm) -> tuple[Array, Array]:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Parameters
    ----------
    h : Array
        Hermitian matrix (checked within ``tol`` max entry deviation).

    Returns
    -------
    (eigenvalues, eigenvectors)
        Real eigenvalues sorted in descending order and the matrix whose
        columns are the matching orthonormal eigenvectors, so that
        ``h == eigenvectors @ diag(eigenvalues) @ eigenvectors.conj().T``.

    Eigenvector choice inside degenerate subspaces is an arbitrary (but
    deterministic) orthonormal basis; callers must not rely on it.
    """
    assert_hermitian(h, tol)
    w, v = np.linalg.eigh(h)
    return w[::-1].copy(), v[:, ::-1].copy()


def haar_unitary(d: int, rng: np.random.Generator) -> Array:
    """Haar-distributed random unitary of dimension ``d``.

    QR decomposition of a complex Ginibre matrix with the phases of the
    R diagonal absorbed into Q; a plain QR is not Haar-distributed.
    """
    if d < 1:
        raise DimensionMismatch("dimension must be at least 1")
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def uniform_sphere_vector(d: int, rng: np.random.Generator) -> Array:
    """Unit vector drawn from the uniform spherical measure on C^d.

    A vector of independent standard complex normals, normalized.
    """
    if d < 1:
        raise DimensionMismatch("dimension must be at least 1")
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return z / np.linalg.norm(z)


def partial_trace(
    op: Array, dims: tuple[int, int], keep: Literal["first", "second"]
) -> Array:
    """Trace out one tensor factor of an operator on a bipartite space.

    Parameters
    ----------
    op : Array
        Operator on a space of dimension ``dims[0] * dims[1]``.
    dims : (int, int)
        Dimensions of the two tensor factors, in kron order.
    keep : "first" or "second"
        Which factor the result acts on.
    """
    d0, d1 = dims
    n = _require_square(op)
    if n != d0 * d1:
        raise DimensionMismatch(f"operator dim {n} != {d0}*{d1}")
    four = op.reshape(d0, d1, d0, d1)
    if keep == "first":
        return np.einsum("ijkj->ik", four)
    if keep == "second":
        return np.einsum("ijil->jl", four)
    raise ValueError(f"keep must be 'first' or 'second', got {keep!r}")


@dataclass(frozen=True)
class KrausChannel:
    """Completely positive trace-preserving map given by Kraus operators.

    Attributes
    ----------
    in_dim, out_dim : int
        Input and output dimensions.
    kraus_ops : tuple of Array
        Operators of shape ``(out_dim, in_dim)`` with
        ``sum(K.conj().T @ K) == I`` within the completeness tolerance.
    """

    in_dim: int
    out_dim: int
    kraus_ops: tuple[Array, ...]

    def __post_init__(self) -> None:
        if not self.kraus_ops:
            raise InvalidOperator("a channel needs at least one Kraus operator")
        for k in self.kraus_ops:
            if k.shape != (self.out_dim, self.in_dim):
                raise DimensionMismatch(
                    f"Kraus operator shape {k.shape} != ({self.out_dim}, {self.in_dim})"
                )
        acc = sum(dagger(k) @ k for k in self.kraus_ops)
        dev = max_abs(acc - np.eye(self.in_dim))
        if dev > TOL.completeness:
            raise InvalidOperator(f"Kraus completeness deviation {dev}")

    def __call__(self, rho: Array) -> Array:
        return apply_channel(self, rho)


def apply_channel(ch: KrausChannel, rho: Array) -> Array:
    """Apply a Kraus channel: ``sum(K @ rho @ K.conj().T)``."""
    n = _require_square(rho)
    if n != ch.in_dim:
        raise DimensionMismatch(f"state dim {n} != channel input dim {ch.in_dim}")
    out = np.zeros((ch.out_dim, ch.out_dim), dtype=complex)
    for k in ch.kraus_ops:
        out += k @ rho @ dagger(k)
    return out


def pseudo_inv_sqrt(rho: Array, cutoff: float = TOL.support_cutoff) -> Array:
    """Inverse square root on eigenspaces above ``cutoff``, zero elsewhere."""
    if cutoff <= 0:
        raise ValueError("cutoff must be positive")
    w, v = herm_eig(rho)
    inv = np.where(w > cutoff, 1.0 / np.sqrt(np.maximum(w, cutoff)), 0.0)
    out = (v * inv) @ dagger(v)
    return (out + dagger(out)) / 2


def support_projector(rho: Array, cutoff: float = TOL.support_cutoff) -> Array:
    """Projector onto eigenspaces of ``rho`` with eigenvalue above ``cutoff``."""
    w, v = herm_eig(rho)
    keep = v[:, w > cutoff]
    return keep @ dagger(keep)


def matrix_to_json(a: Array) -> list:
    """Row-major list of ``[re, im]`` pairs (JSON-friendly dense dump)."""
    flat = np.asarray(a, dtype=complex).ravel()
    return [[float(z.real), float(z.imag)] for z in flat]


def matrix_from_json(data: list, rows: int, cols: int) -> Array:
    """Inverse of :func:`matrix_to_json`."""
    if len(data) != rows * cols:
        raise DimensionMismatch(f"{len(data)} entries cannot fill a {rows}x{cols} matrix")
    flat = np.array([complex(re, im) for re, im in data])
    return flat.reshape(rows, cols)
