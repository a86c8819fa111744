"""Dense qubit states, Pauli matrices and local unitaries.

Qubit 1 is the most significant bit of a basis index, so the six-qubit
state ``(|000001> + |111110>)/sqrt(2)`` has its amplitudes at indices 1
and 62.  Everything is dense and double precision; at most
``MAX_QUBITS`` qubits are supported.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "MAX_QUBITS",
    "PAULI",
    "Ket",
    "DensityMatrix",
    "Direction",
    "LocalUnitary",
    "build_ghz",
    "rotation_unitary",
    "cyclic_unitary",
    "apply_local_unitary",
    "conjugate_local",
    "fidelity",
    "mixed_ghz_states",
    "ghz_noise_mixture",
    "ghz_with_noise",
]

MAX_QUBITS = 10

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
#: sigma_1, sigma_2, sigma_3 stacked along the first axis
PAULI = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])
PAULI.setflags(write=False)


def _check_num_qubits(n):
    if int(n) != n or n < 1:
        raise ValueError(f"num_qubits must be a positive integer, got {n!r}")
    if n > MAX_QUBITS:
        raise ValueError(f"num_qubits={n} exceeds the dense limit of {MAX_QUBITS}")


def _frozen(a, dtype=complex):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Ket:
    """Normalized pure state of ``num_qubits`` qubits."""

    amplitudes: np.ndarray
    num_qubits: int

    def __post_init__(self):
        _check_num_qubits(self.num_qubits)
        amps = _frozen(self.amplitudes).reshape(-1)
        if amps.shape[0] != 2**self.num_qubits:
            raise ValueError(
                f"expected {2**self.num_qubits} amplitudes, got {amps.shape[0]}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"ket is not normalized (norm={norm!r})")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes, normalize=False) -> "Ket":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        n = int(round(np.log2(amps.shape[0])))
        if 2**n != amps.shape[0]:
            raise ValueError("amplitude count is not a power of two")
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(amps, n)

    def density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()),
                             self.num_qubits)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite ``2^N x 2^N`` operator."""

    entries: np.ndarray
    num_qubits: int

    def __post_init__(self):
        _check_num_qubits(self.num_qubits)
        rho = _frozen(self.entries)
        dim = 2**self.num_qubits
        if rho.shape != (dim, dim):
            raise ValueError(f"expected shape {(dim, dim)}, got {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-12:
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(rho)
        if abs(tr - 1.0) > 1e-12:
            raise ValueError(f"density matrix has trace {tr!r}")
        lowest = np.linalg.eigvalsh(rho)[0]
        if lowest < -1e-10:
            raise ValueError(f"density matrix has negative eigenvalue {lowest!r}")
        object.__setattr__(self, "entries", rho)

    @classmethod
    def maximally_mixed(cls, num_qubits: int) -> "DensityMatrix":
        _check_num_qubits(num_qubits)
        dim = 2**num_qubits
        return cls(np.eye(dim) / dim, num_qubits)

    @classmethod
    def mixture(cls, weights, states) -> "DensityMatrix":
        """Convex combination of kets and/or density matrices."""
        weights = np.asarray(weights, dtype=float)
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError("mixture weights must be non-negative and sum to 1")
        mats = [s.density() if isinstance(s, Ket) else s for s in states]
        n = mats[0].num_qubits
        if any(m.num_qubits != n for m in mats):
            raise ValueError("all mixture components need the same qubit count")
        rho = sum(w * m.entries for w, m in zip(weights, mats))
        # exact Hermitian symmetrization; summation order can leave 1e-17 asymmetry
        rho = 0.5 * (rho + rho.conj().T)
        return cls(rho, n)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)


@dataclass(frozen=True)
class Direction:
    """Measurement direction on the unit sphere, in spherical angles."""

    theta: float
    phi: float

    def __post_init__(self):
        theta, phi = float(self.theta), float(self.phi)
        if not (0.0 <= theta <= np.pi):
            raise ValueError(f"theta must lie in [0, pi], got {theta}")
        phi = phi % (2 * np.pi)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)

    @property
    def vector(self) -> np.ndarray:
        st = np.sin(self.theta)
        return np.array([st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)])

    @classmethod
    def from_vector(cls, v) -> "Direction":
        v = np.asarray(v, dtype=float)
        norm = np.linalg.norm(v)
        if norm == 0:
            raise ValueError("cannot take the direction of a zero vector")
        v = v / norm
        theta = float(np.arccos(np.clip(v[2], -1.0, 1.0)))
        phi = float(np.arctan2(v[1], v[0]))
        return cls(theta, phi)


@dataclass(frozen=True)
class LocalUnitary:
    """A single-qubit unitary, applied identically to every party."""

    entries: np.ndarray

    def __post_init__(self):
        u = _frozen(self.entries)
        if u.shape != (2, 2):
            raise ValueError(f"local unitary must be 2x2, got {u.shape}")
        if np.max(np.abs(u @ u.conj().T - np.eye(2))) > 1e-12:
            raise ValueError("matrix is not unitary")
        object.__setattr__(self, "entries", u)

    @classmethod
    def identity(cls) -> "LocalUnitary":
        return cls(np.eye(2))

    def power(self, k: int) -> "LocalUnitary":
        return LocalUnitary(np.linalg.matrix_power(self.entries, k))


def build_ghz(num_qubits: int, flip_last: bool = False) -> Ket:
    """GHZ state ``(|0...0 a> + |1...1 b>)/sqrt(2)``.

    With ``flip_last`` the last qubit is anti-aligned with the others,
    i.e. ``(a, b) = (1, 0)``; otherwise ``(a, b) = (0, 1)``.
    """
    if int(num_qubits) != num_qubits or num_qubits < 2:
        raise ValueError(f"GHZ state needs at least 2 qubits, got {num_qubits!r}")
    _check_num_qubits(num_qubits)
    dim = 2**num_qubits
    lo, hi = (1, dim - 2) if flip_last else (0, dim - 1)
    amps = np.zeros(dim, dtype=complex)
    amps[lo] = amps[hi] = 1 / np.sqrt(2)
    return Ket(amps, num_qubits)


def rotation_unitary(axis, angle: float) -> LocalUnitary:
    r"""Spin-1/2 rotation :math:`\exp(-i\,\alpha/2\;\hat m\cdot\vec\sigma)`.

    Parameters
    ----------
    axis : array_like, shape (3,)
        Unit rotation axis on the Bloch sphere.
    angle : float
        Rotation angle in radians.
    """
    axis = np.asarray(axis, dtype=float)
    if axis.shape != (3,) or abs(np.linalg.norm(axis) - 1.0) > 1e-10:
        raise ValueError(f"rotation axis must be a unit 3-vector, got {axis!r}")
    m_sigma = np.tensordot(axis, PAULI, axes=1)
    return LocalUnitary(np.cos(angle / 2) * np.eye(2) - 1j * np.sin(angle / 2) * m_sigma)


def cyclic_unitary() -> LocalUnitary:
    """The 2*pi/3 rotation about (1, 1, 1)/sqrt(3); permutes the Bloch axes cyclically."""
    return rotation_unitary(np.ones(3) / np.sqrt(3), 2 * np.pi / 3)


def _apply_to_each_axis(tensor, u, axes):
    for ax in axes:
        tensor = np.moveaxis(np.tensordot(u, tensor, axes=([1], [ax])), 0, ax)
    return tensor


def apply_local_unitary(state: Ket, u: LocalUnitary) -> Ket:
    """Return ``(u x u x ... x u) |state>``."""
    n = state.num_qubits
    psi = state.amplitudes.reshape((2,) * n)
    psi = _apply_to_each_axis(psi, u.entries, range(n))
    out = psi.reshape(-1)
    # u is unitary to 1e-12; renormalize so the Ket invariant survives repeated use
    return Ket(out / np.linalg.norm(out), n)


def conjugate_local(rho: DensityMatrix, u: LocalUnitary) -> DensityMatrix:
    """Return ``U rho U^dagger`` with ``U = u^{x N}``."""
    n = rho.num_qubits
    r = rho.entries.reshape((2,) * (2 * n))
    r = _apply_to_each_axis(r, u.entries, range(n))
    r = _apply_to_each_axis(r, u.entries.conj(), range(n, 2 * n))
    r = r.reshape(2**n, 2**n)
    return DensityMatrix(0.5 * (r + r.conj().T), n)


def fidelity(a: Ket, b: Ket) -> float:
    """Overlap ``|<a|b>|``; insensitive to global phase."""
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)))


def mixed_ghz_states(num_qubits: int = 6) -> list[Ket]:
    """The three GHZ states of the mixture, in the order psi_1, psi_2, psi_3.

    psi_3 is the GHZ state with the last qubit flipped, psi_1 is
    ``U^{x N} psi_3`` and psi_2 is ``U^{x N} psi_1``, with ``U`` the
    cyclic Bloch rotation.
    """
    u = cyclic_unitary()
    psi3 = build_ghz(num_qubits, flip_last=True)
    psi1 = apply_local_unitary(psi3, u)
    psi2 = apply_local_unitary(psi1, u)
    return [psi1, psi2, psi3]


def ghz_noise_mixture(visibility_f: float, num_qubits: int = 6) -> DensityMatrix:
    """Equal mixture of the three rotated GHZ states with weight ``f``,
    plus white noise with weight ``1 - f``."""
    f = float(visibility_f)
    if not (0.0 <= f <= 1.0):
        raise ValueError(f"visibility f must lie in [0, 1], got {visibility_f!r}")
    noise = DensityMatrix.maximally_mixed(num_qubits)
    return DensityMatrix.mixture([f / 3, f / 3, f / 3, 1 - f],
                                 mixed_ghz_states(num_qubits) + [noise])


def ghz_with_noise(visibility_f: float, num_qubits: int, flip_last: bool = False) -> DensityMatrix:
    """Single GHZ state with white noise, ``f |GHZ><GHZ| + (1 - f) Id / 2^N``."""
    f = float(visibility_f)
    if not (0.0 <= f <= 1.0):
        raise ValueError(f"visibility f must lie in [0, 1], got {visibility_f!r}")
    return DensityMatrix.mixture(
        [f, 1 - f],
        [build_ghz(num_qubits, flip_last), DensityMatrix.maximally_mixed(num_qubits)],
    )
