"""Full N-party correlation tensors of qubit states.

The tensor entry ``T[i1, ..., iN]`` (offsets 0, 1, 2 for the x, y, z
axes) is ``Tr[rho (sigma_i1 x ... x sigma_iN)]``.  Contracting the
tensor with one unit vector per party gives the quantum correlation
function at those settings.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np
from scipy.spatial.transform import Rotation

from .qcore import PAULI, DensityMatrix, Direction, Ket

__all__ = [
    "ZERO_THRESHOLD",
    "CorrelationTensor",
    "LocalFrame",
    "correlation_tensor",
    "correlation_tensor_dense",
    "rotate",
    "component",
    "contract_vectors",
    "restrict_to_plane",
    "cyclic_axis_rotation",
    "nonzero_components",
]

#: entries below this magnitude count as structural zeros
ZERO_THRESHOLD = 1e-10
IMAG_TOLERANCE = 1e-8


@dataclass(frozen=True)
class CorrelationTensor:
    """Real ``3 x 3 x ... x 3`` array of full N-party correlations."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim < 1 or any(s != 3 for s in v.shape):
            raise ValueError(f"correlation tensor must have shape (3,)*N, got {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def num_parties(self) -> int:
        return self.values.ndim

    @classmethod
    def zeros(cls, num_parties: int) -> "CorrelationTensor":
        return cls(np.zeros((3,) * num_parties))

    @classmethod
    def outer(cls, vectors, scale=1.0) -> "CorrelationTensor":
        """Rank-1 tensor ``scale * v1 x v2 x ... x vN``."""
        vecs = [np.asarray(v, dtype=float) for v in vectors]
        return cls(scale * reduce(np.multiply.outer, vecs))

    def frobenius_sq(self) -> float:
        return float(np.sum(self.values**2))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def nonzero_count(self, threshold: float = ZERO_THRESHOLD) -> int:
        return int(np.count_nonzero(np.abs(self.values) >= threshold))

    def __neg__(self):
        return CorrelationTensor(-self.values)

    def to_dict(self) -> dict:
        return {"num_parties": self.num_parties,
                "values": [float(x) for x in self.values.reshape(-1)]}

    @classmethod
    def from_dict(cls, data: dict) -> "CorrelationTensor":
        n = int(data["num_parties"])
        flat = np.asarray(data["values"], dtype=float)
        if flat.size != 3**n:
            raise ValueError(f"expected {3**n} values for {n} parties, got {flat.size}")
        return cls(flat.reshape((3,) * n))


@dataclass(frozen=True)
class LocalFrame:
    """One proper rotation per party.

    Column ``k`` of ``rotations[j]`` is the k-th new axis of party ``j``
    written in that party's old coordinates.
    """

    rotations: tuple

    def __post_init__(self):
        mats = []
        for r in self.rotations:
            r = np.array(r, dtype=float)
            if r.shape != (3, 3):
                raise ValueError(f"frame rotations must be 3x3, got {r.shape}")
            if np.max(np.abs(r.T @ r - np.eye(3))) > 1e-10:
                raise ValueError("frame matrix is not orthogonal")
            if abs(np.linalg.det(r) - 1.0) > 1e-10:
                raise ValueError("frame matrix is not a proper rotation")
            r.setflags(write=False)
            mats.append(r)
        object.__setattr__(self, "rotations", tuple(mats))

    def __len__(self):
        return len(self.rotations)

    @classmethod
    def identity(cls, num_parties: int) -> "LocalFrame":
        return cls(tuple(np.eye(3) for _ in range(num_parties)))

    @classmethod
    def random(cls, num_parties: int, rng=None) -> "LocalFrame":
        rng = np.random.default_rng(rng)
        mats = Rotation.random(num_parties, random_state=rng).as_matrix()
        return cls(tuple(mats))

    @classmethod
    def from_euler(cls, angles) -> "LocalFrame":
        """Build a frame from per-party ``(alpha, beta, gamma)`` z-y-z Euler angles."""
        angles = np.atleast_2d(np.asarray(angles, dtype=float))
        mats = Rotation.from_euler("ZYZ", angles).as_matrix()
        return cls(tuple(mats))

    def euler_angles(self) -> np.ndarray:
        """Per-party z-y-z Euler angles, shape ``(N, 3)``."""
        with warnings.catch_warnings():
            # degenerate beta = 0 or pi: scipy zeroes the third angle, which is fine here
            warnings.simplefilter("ignore", UserWarning)
            angles = Rotation.from_matrix(np.stack(self.rotations)).as_euler("ZYZ")
        return angles % (2 * np.pi)

    @classmethod
    def from_plane_normals(cls, normals) -> "LocalFrame":
        """Frame whose third axis for each party is the given plane normal.

        The in-plane axes are a fixed completion; a normal along +z gives
        the identity.
        """
        mats = []
        for a in normals:
            a = np.asarray(a, dtype=float)
            a = a / np.linalg.norm(a)
            e = np.eye(3)[np.argmin(np.abs(a))]
            u = e - (e @ a) * a
            u /= np.linalg.norm(u)
            w = np.cross(a, u)
            mats.append(np.column_stack([u, w, a]))
        return cls(tuple(mats))

    def to_dict(self) -> dict:
        return {"rotations": [r.tolist() for r in self.rotations],
                "euler_zyz": self.euler_angles().tolist()}


def _as_density(state) -> DensityMatrix:
    return state.density() if isinstance(state, Ket) else state


def correlation_tensor(state) -> CorrelationTensor:
    """All ``3^N`` full correlations of a state.

    Each qubit's row and column index is traced against the three Pauli
    matrices in turn, so the cost is ``O(3 * 4^N)`` per qubit rather
    than one dense trace per entry.

    Parameters
    ----------
    state : DensityMatrix or Ket

    Raises
    ------
    ValueError
        If an entry has an imaginary part above 1e-8.
    """
    rho = _as_density(state)
    n = rho.num_qubits
    # axes: (row_1..row_n, col_1..col_n); each step replaces the leading
    # (row, col) pair by a trailing Pauli index
    work = rho.entries.reshape((2,) * (2 * n))
    for j in range(n):
        # Tr[rho sigma] = sum_{a,b} rho[a,b] sigma[b,a]
        work = np.tensordot(work, PAULI, axes=([0, n - j], [2, 1]))
    values = work
    if np.max(np.abs(values.imag)) > IMAG_TOLERANCE:
        raise ValueError("correlation tensor has a large imaginary part; input not Hermitian?")
    return CorrelationTensor(values.real)


def correlation_tensor_dense(state) -> CorrelationTensor:
    """Reference path: one dense ``Tr[rho P]`` per entry.  Slow beyond ~7 qubits."""
    rho = _as_density(state)
    n = rho.num_qubits
    out = np.empty((3,) * n, dtype=complex)
    for idx in itertools.product(range(3), repeat=n):
        op = reduce(np.kron, [PAULI[i] for i in idx])
        out[idx] = np.trace(rho.entries @ op)
    if np.max(np.abs(out.imag)) > IMAG_TOLERANCE:
        raise ValueError("correlation tensor has a large imaginary part; input not Hermitian?")
    return CorrelationTensor(out.real)


def _mode_product(values, matrix, axis):
    # new[..., j, ...] = sum_i values[..., i, ...] * matrix[i, j]
    return np.moveaxis(np.tensordot(values, matrix, axes=([axis], [0])), -1, axis)


def rotate(tensor: CorrelationTensor, frame: LocalFrame) -> CorrelationTensor:
    """Express the tensor in the rotated local frames."""
    if len(frame) != tensor.num_parties:
        raise ValueError(
            f"frame has {len(frame)} rotations for a {tensor.num_parties}-party tensor"
        )
    values = tensor.values
    for axis, r in enumerate(frame.rotations):
        values = _mode_product(values, r, axis)
    return CorrelationTensor(values)


def contract_vectors(values: np.ndarray, vectors: Sequence[np.ndarray]) -> float:
    """``sum T[i1..iN] v1[i1] ... vN[iN]`` for plain arrays."""
    out = values
    for v in reversed(vectors):
        out = out @ np.asarray(v, dtype=float)
    return float(out)


def component(tensor: CorrelationTensor, directions: Sequence[Direction]) -> float:
    """Correlation function at the given measurement directions."""
    if len(directions) != tensor.num_parties:
        raise ValueError(
            f"need {tensor.num_parties} directions, got {len(directions)}"
        )
    return contract_vectors(tensor.values, [d.vector for d in directions])


def restrict_to_plane(tensor: CorrelationTensor) -> float:
    """Sum of squared entries with every index in {x, y} of the current frame."""
    sub = tensor.values[(slice(0, 2),) * tensor.num_parties]
    return float(np.sum(sub**2))


def cyclic_axis_rotation() -> np.ndarray:
    """Permutation matrix with ``R[i, pi(i)] = 1`` for ``pi: x->y, y->z, z->x``.

    Rotating a tensor by this matrix on every party moves the entry at
    ``(z, ..., z)`` to ``(x, ..., x)``.
    """
    r = np.zeros((3, 3))
    for i in range(3):
        r[i, (i + 1) % 3] = 1.0
    return r


def nonzero_components(tensor: CorrelationTensor, threshold: float = ZERO_THRESHOLD):
    """List ``(index, value)`` pairs of entries above ``threshold``.

    Indices are reported 1-based (1 = x, 2 = y, 3 = z).
    """
    out = []
    for idx in zip(*np.nonzero(np.abs(tensor.values) >= threshold)):
        out.append((tuple(int(i) + 1 for i in idx), float(tensor.values[idx])))
    return out
