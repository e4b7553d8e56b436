"""Truncated-Fock-space linear algebra.

States, operators and qubit (x) oscillator composite spaces, plus the
reference-state constructors (coherent, cat, maximally entangled cat) and
the reduced-state quantities (partial trace, purity, entropies, mutual
information) everything else is built on.

Tensor ordering is fixed as qubit first, oscillator second; an embedded
oscillator operator is ``kron(identity(2), op)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Union

import numpy as np

from .errors import (
    DegenerateCatError,
    DimensionError,
    SpaceError,
    TruncationError,
)

NORM_TOL = 1e-10
HERM_TOL = 1e-12
EIG_FLOOR = 1e-14  # eigenvalues below this contribute 0 to entropies
TAIL_TOL = 1e-10  # max top-level population for coherent-state truncation


@dataclass(frozen=True)
class FockSpace:
    """Oscillator Hilbert space truncated to the lowest ``dim`` Fock levels."""

    dim: int

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError(f"FockSpace needs dim >= 2, got {self.dim}")


@dataclass(frozen=True)
class CompositeSpace:
    """Qubit (x) oscillator space; qubit factor first, oscillator second."""

    ho: FockSpace
    qubit_dim: int = 2

    def __post_init__(self):
        if self.qubit_dim != 2:
            raise ValueError("qubit factor is fixed to dimension 2")

    @property
    def dim(self) -> int:
        return self.qubit_dim * self.ho.dim


Space = Union[FockSpace, CompositeSpace]


def _dim(space: Space) -> int:
    return space.dim


def _readonly(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(arr)
    out.flags.writeable = False
    return out


def _complex_pairs(arr: np.ndarray) -> list:
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def _from_pairs(pairs) -> np.ndarray:
    a = np.asarray(pairs, dtype=float)
    return a[..., 0] + 1j * a[..., 1]


def _space_to_json(space: Space) -> dict:
    if isinstance(space, CompositeSpace):
        return {"kind": "composite", "ho_dim": space.ho.dim}
    return {"kind": "fock", "dim": space.dim}


def _space_from_json(d: dict) -> Space:
    if d["kind"] == "composite":
        return CompositeSpace(FockSpace(d["ho_dim"]))
    return FockSpace(d["dim"])


class StateVector:
    """Normalized complex amplitude vector over a (composite) Fock basis."""

    def __init__(self, space: Space, amplitudes: np.ndarray):
        amps = np.asarray(amplitudes, dtype=complex)
        if amps.shape != (space.dim,):
            raise DimensionError(
                f"amplitude vector of length {amps.shape} does not fit "
                f"space of dimension {space.dim}"
            )
        nrm = np.linalg.norm(amps)
        if abs(nrm - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: |norm - 1| = {abs(nrm - 1.0):.3e}")
        self.space = space
        self.amplitudes = _readonly(amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other: "StateVector") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def to_density(self) -> "DensityMatrix":
        return DensityMatrix(self.space, np.outer(self.amplitudes, self.amplitudes.conj()))

    def json_dict(self) -> dict:
        return {"space": _space_to_json(self.space), "amplitudes": _complex_pairs(self.amplitudes)}

    def to_json(self) -> str:
        return json.dumps(self.json_dict())

    @classmethod
    def from_json(cls, data) -> "StateVector":
        d = json.loads(data) if isinstance(data, str) else data
        return cls(_space_from_json(d["space"]), _from_pairs(d["amplitudes"]))


class DensityMatrix:
    """Hermitian, unit-trace, (numerically) positive matrix on a space."""

    def __init__(self, space: Space, matrix: np.ndarray, check_positive: bool = True):
        mat = np.asarray(matrix, dtype=complex)
        d = space.dim
        if mat.shape != (d, d):
            raise DimensionError(f"matrix shape {mat.shape} does not fit dimension {d}")
        if np.max(np.abs(mat - mat.conj().T)) > HERM_TOL:
            raise ValueError("density matrix not Hermitian to 1e-12")
        tr = np.trace(mat).real
        if abs(tr - 1.0) > NORM_TOL:
            raise ValueError(f"density matrix trace {tr} not within 1e-10 of 1")
        if check_positive:
            lam_min = float(np.linalg.eigvalsh(mat)[0])
            if lam_min < -1e-10:
                raise ValueError(f"density matrix has eigenvalue {lam_min:.3e} < -1e-10")
        self.space = space
        self.matrix = _readonly(mat)

    def json_dict(self) -> dict:
        return {"space": _space_to_json(self.space), "matrix": _complex_pairs(self.matrix)}

    def to_json(self) -> str:
        return json.dumps(self.json_dict())

    @classmethod
    def from_json(cls, data) -> "DensityMatrix":
        d = json.loads(data) if isinstance(data, str) else data
        return cls(_space_from_json(d["space"]), _from_pairs(d["matrix"]))


class OperatorMatrix:
    """Dense operator on a space, optionally tagged (and checked) Hermitian."""

    def __init__(self, space: Space, matrix: np.ndarray, hermitian: bool = False):
        mat = np.asarray(matrix, dtype=complex)
        d = space.dim
        if mat.shape != (d, d):
            raise DimensionError(f"matrix shape {mat.shape} does not fit dimension {d}")
        if hermitian and np.max(np.abs(mat - mat.conj().T)) > HERM_TOL:
            raise ValueError("operator tagged hermitian is not Hermitian to 1e-12")
        self.space = space
        self.matrix = _readonly(mat)
        self.hermitian = hermitian

    def dag(self) -> "OperatorMatrix":
        return OperatorMatrix(self.space, self.matrix.conj().T, self.hermitian)

    def json_dict(self) -> dict:
        return {
            "space": _space_to_json(self.space),
            "matrix": _complex_pairs(self.matrix),
            "hermitian": self.hermitian,
        }

    def to_json(self) -> str:
        return json.dumps(self.json_dict())

    @classmethod
    def from_json(cls, data) -> "OperatorMatrix":
        d = json.loads(data) if isinstance(data, str) else data
        return cls(_space_from_json(d["space"]), _from_pairs(d["matrix"]), d.get("hermitian", False))


@dataclass(frozen=True)
class CatStateSpec:
    """Displacement alpha and superposition phase of a two-branch cat."""

    alpha: complex
    phase: float = 0.0

    @property
    def normalization(self) -> float:
        """Norm of |alpha> + e^{i phase} |-alpha>."""
        return math.sqrt(2.0 * (1.0 + math.exp(-2.0 * abs(self.alpha) ** 2) * math.cos(self.phase)))


# ---------------------------------------------------------------------------
# operators


@lru_cache(maxsize=None)
def _annihilation(dim: int) -> np.ndarray:
    mat = np.zeros((dim, dim), dtype=complex)
    ns = np.arange(1, dim)
    mat[ns - 1, ns] = np.sqrt(ns)
    return _readonly(mat)


def annihilation_op(space: FockSpace) -> OperatorMatrix:
    """Ladder operator with <n-1|a|n> = sqrt(n)."""
    return OperatorMatrix(space, _annihilation(space.dim))


def number_op(space: FockSpace) -> OperatorMatrix:
    return OperatorMatrix(space, np.diag(np.arange(space.dim, dtype=float)).astype(complex), hermitian=True)


def identity_op(space: Space) -> OperatorMatrix:
    return OperatorMatrix(space, np.eye(space.dim, dtype=complex), hermitian=True)


def embed_ho_op(op: OperatorMatrix, space: CompositeSpace) -> OperatorMatrix:
    """identity(2) (x) op under the fixed qubit-first ordering."""
    if not isinstance(space, CompositeSpace):
        raise SpaceError("embed_ho_op needs a CompositeSpace")
    if op.space != space.ho:
        raise DimensionError("operator does not live on the composite's oscillator factor")
    return OperatorMatrix(space, np.kron(np.eye(2, dtype=complex), op.matrix), op.hermitian)


def embed_qubit_op(mat2: np.ndarray, space: CompositeSpace, hermitian: bool = False) -> OperatorMatrix:
    """op (x) identity(ho) under the fixed qubit-first ordering."""
    mat2 = np.asarray(mat2, dtype=complex)
    if mat2.shape != (2, 2):
        raise DimensionError("qubit operator must be 2x2")
    return OperatorMatrix(space, np.kron(mat2, np.eye(space.ho.dim, dtype=complex)), hermitian)


# Qubit convention: |0> is the ground state, sigma_z = |1><1| - |0><0|.
SIGMA_Z = np.diag([-1.0, 1.0]).astype(complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_PLUS = np.array([[0, 0], [1, 0]], dtype=complex)  # |1><0|
SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|


def parity_projectors(space: FockSpace) -> tuple[OperatorMatrix, OperatorMatrix]:
    """Projectors onto the even / odd photon-number subspaces."""
    diag_even = np.array([(n + 1) % 2 for n in range(space.dim)], dtype=complex)
    p_plus = np.diag(diag_even)
    p_minus = np.eye(space.dim, dtype=complex) - p_plus
    return (
        OperatorMatrix(space, p_plus, hermitian=True),
        OperatorMatrix(space, p_minus, hermitian=True),
    )


# ---------------------------------------------------------------------------
# reference states


def fock_state(n: int, space: Space) -> StateVector:
    amps = np.zeros(space.dim, dtype=complex)
    amps[n] = 1.0
    return StateVector(space, amps)


def coherent_amplitudes(alpha: complex, dim: int) -> np.ndarray:
    """Unnormalized truncated coherent amplitudes via the stable recurrence.

    c_{n+1} = c_n * alpha / sqrt(n+1), starting from c_0 = exp(-|alpha|^2/2);
    avoids factorial overflow for large |alpha| and dim.
    """
    amps = np.empty(dim, dtype=complex)
    amps[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(dim - 1):
        amps[n + 1] = amps[n] * alpha / math.sqrt(n + 1)
    return amps


def coherent_state(alpha: complex, space: FockSpace) -> StateVector:
    """Truncated coherent state |alpha>, renormalized after truncation."""
    amps = coherent_amplitudes(alpha, space.dim)
    if abs(amps[-1]) ** 2 >= TAIL_TOL:
        raise TruncationError(
            f"top Fock level carries weight {abs(amps[-1])**2:.2e} >= {TAIL_TOL:.0e} "
            f"for alpha={alpha}; increase dim"
        )
    return StateVector(space, amps / np.linalg.norm(amps))


def cat_state(spec: CatStateSpec, space: FockSpace) -> StateVector:
    """(|alpha> + e^{i phase}|-alpha>) / N_phase."""
    if spec.normalization < 1e-8:
        raise DegenerateCatError(
            f"cat normalization {spec.normalization:.2e} < 1e-8 for alpha={spec.alpha}, "
            f"phase={spec.phase}"
        )
    plus = coherent_amplitudes(spec.alpha, space.dim)
    if abs(plus[-1]) ** 2 >= TAIL_TOL:
        raise TruncationError(
            f"top Fock level carries weight {abs(plus[-1])**2:.2e} for alpha={spec.alpha}"
        )
    minus = coherent_amplitudes(-spec.alpha, space.dim)
    amps = plus + np.exp(1j * spec.phase) * minus
    return StateVector(space, amps / np.linalg.norm(amps))


def entangled_cat_state(
    alpha: complex,
    qubit_basis: tuple[np.ndarray, np.ndarray],
    space: CompositeSpace,
) -> StateVector:
    """(|b+> (x) |cat+> + |b-> (x) |cat->) / sqrt(2) for an orthonormal qubit basis."""
    b_plus = np.asarray(qubit_basis[0], dtype=complex)
    b_minus = np.asarray(qubit_basis[1], dtype=complex)
    if b_plus.shape != (2,) or b_minus.shape != (2,):
        raise DimensionError("qubit basis states must be 2-vectors")
    gram = np.array(
        [
            [np.vdot(b_plus, b_plus), np.vdot(b_plus, b_minus)],
            [np.vdot(b_minus, b_plus), np.vdot(b_minus, b_minus)],
        ]
    )
    if np.max(np.abs(gram - np.eye(2))) > 1e-10:
        raise ValueError("qubit basis not orthonormal to 1e-10")
    cat_p = cat_state(CatStateSpec(alpha, 0.0), space.ho).amplitudes
    cat_m = cat_state(CatStateSpec(alpha, math.pi), space.ho).amplitudes
    amps = (np.kron(b_plus, cat_p) + np.kron(b_minus, cat_m)) / math.sqrt(2.0)
    return StateVector(space, amps / np.linalg.norm(amps))


# ---------------------------------------------------------------------------
# reduced states and derived quantities


def _partial_trace_raw(mat: np.ndarray, ho_dim: int, keep: str) -> np.ndarray:
    r = mat.reshape(2, ho_dim, 2, ho_dim)
    if keep == "qubit":
        return np.einsum("iaja->ij", r)
    if keep == "ho":
        return np.einsum("iaib->ab", r)
    raise ValueError(f"keep must be 'qubit' or 'ho', got {keep!r}")


def partial_trace(rho: DensityMatrix, keep: str) -> DensityMatrix:
    """Reduced density matrix on the kept factor ('qubit' or 'ho')."""
    if not isinstance(rho.space, CompositeSpace):
        raise SpaceError("partial_trace needs a density matrix on a CompositeSpace")
    red = _partial_trace_raw(rho.matrix, rho.space.ho.dim, keep)
    sub = FockSpace(rho.space.ho.dim) if keep == "ho" else FockSpace(2)
    # reduced qubit state is represented on a 2-level FockSpace
    return DensityMatrix(sub, red)


def purity(rho: DensityMatrix) -> float:
    """Tr(rho^2)."""
    return float(np.vdot(rho.matrix, rho.matrix).real)


def linear_entropy(rho: DensityMatrix) -> float:
    """1 - Tr(rho^2)."""
    return 1.0 - purity(rho)


def _vn_entropy_raw(mat: np.ndarray) -> float:
    lam = np.linalg.eigvalsh(mat)
    lam = np.clip(lam, 0.0, None)
    lam = lam[lam > EIG_FLOOR]
    return float(-np.sum(lam * np.log(lam)))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """-sum lambda ln lambda over eigenvalues above the 1e-14 floor."""
    return _vn_entropy_raw(rho.matrix)


def mutual_information(rho: DensityMatrix) -> float:
    """S(rho_HO) + S(rho_qubit) - S(rho) for a composite density matrix."""
    if not isinstance(rho.space, CompositeSpace):
        raise SpaceError("mutual_information needs a composite density matrix")
    ho_dim = rho.space.ho.dim
    s_ho = _vn_entropy_raw(_partial_trace_raw(rho.matrix, ho_dim, "ho"))
    s_q = _vn_entropy_raw(_partial_trace_raw(rho.matrix, ho_dim, "qubit"))
    return s_ho + s_q - _vn_entropy_raw(rho.matrix)


def expectation(op: OperatorMatrix, state: Union[StateVector, DensityMatrix]) -> complex:
    """<psi|O|psi> or Tr(O rho)."""
    if op.space != state.space:
        raise DimensionError("operator and state live on different spaces")
    if isinstance(state, StateVector):
        return complex(np.vdot(state.amplitudes, op.matrix @ state.amplitudes))
    return complex(np.trace(op.matrix @ state.matrix))
