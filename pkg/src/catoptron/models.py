"""Physical models and their generators.

Kerr-nonlinear resonator with a complex two-photon drive, the resonant
driven Jaynes-Cummings system, and the oscillator-decay Lindblad
dissipator.  All Kerr quantities are in units of the Kerr strength K, all
JC quantities in units of the coupling g; hbar = 1 throughout.

The complex control is treated as two independent real quadratures; the
constant operators returned by ``control_derivative`` are the derivatives
of the Hamiltonian with respect to Re(eps) and Im(eps).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import DimensionError
from .spaces import (
    SIGMA_MINUS,
    SIGMA_PLUS,
    CompositeSpace,
    FockSpace,
    OperatorMatrix,
    _annihilation,
)

# physical coupling of the cavity-QED realization, metadata only
G_PHYSICAL_HZ = 2 * math.pi * 50e3


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid on [0, T] with n_steps intervals; samples live on midpoints."""

    duration: float
    n_steps: int

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        if self.n_steps < 2:
            raise ValueError("n_steps must be at least 2")

    @property
    def dt(self) -> float:
        return self.duration / self.n_steps

    def points(self) -> np.ndarray:
        return np.linspace(0.0, self.duration, self.n_steps + 1)

    def midpoints(self) -> np.ndarray:
        return (np.arange(self.n_steps) + 0.5) * self.dt


class ControlPulse:
    """Complex control samples, one per interval midpoint of a TimeGrid."""

    def __init__(self, grid: TimeGrid, samples: np.ndarray):
        samples = np.asarray(samples, dtype=complex)
        if samples.shape != (grid.n_steps,):
            raise DimensionError(
                f"pulse needs {grid.n_steps} samples, got shape {samples.shape}"
            )
        if not np.all(np.isfinite(samples)):
            raise ValueError("pulse samples must be finite")
        self.grid = grid
        self.samples = samples.copy()
        self.samples.flags.writeable = False

    def with_samples(self, samples: np.ndarray) -> "ControlPulse":
        return ControlPulse(self.grid, samples)

    def write_csv(self, path, time_unit: str = "model units") -> None:
        """CSV with header t,re,im plus a JSON sidecar declaring time units."""
        path = Path(path)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "re", "im"])
            for t, s in zip(self.grid.midpoints(), self.samples):
                writer.writerow([f"{t:.12g}", f"{s.real:.16g}", f"{s.imag:.16g}"])
        sidecar = {
            "time_unit": time_unit,
            "duration": self.grid.duration,
            "n_steps": self.grid.n_steps,
        }
        path.with_suffix(path.suffix + ".json").write_text(json.dumps(sidecar, indent=1))

    @classmethod
    def read_csv(cls, path) -> "ControlPulse":
        path = Path(path)
        sidecar = json.loads(path.with_suffix(path.suffix + ".json").read_text())
        grid = TimeGrid(sidecar["duration"], sidecar["n_steps"])
        samples = []
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                samples.append(float(row["re"]) + 1j * float(row["im"]))
        return cls(grid, np.array(samples))


# ---------------------------------------------------------------------------
# Kerr resonator with two-photon drive


@lru_cache(maxsize=None)
def _kerr_parts(dim: int):
    a = np.asarray(_annihilation(dim))
    a2 = a @ a
    drift = -(a2.conj().T @ a2)  # -a^dag a^dag a a, in units of K
    return drift, a2, a2.conj().T


@dataclass(frozen=True)
class KerrModel:
    """H/hbar = -K a^dag a^dag a a + eps a^2 + eps^* (a^dag)^2."""

    space: FockSpace
    kerr: float = 1.0

    def __post_init__(self):
        if self.kerr <= 0:
            raise ValueError("Kerr strength must be positive")

    def hamiltonian_raw(self, eps: complex) -> np.ndarray:
        drift, a2, a2d = _kerr_parts(self.space.dim)
        return self.kerr * drift + eps * a2 + np.conj(eps) * a2d

    def control_derivative_raw(self, quadrature: str) -> np.ndarray:
        _, a2, a2d = _kerr_parts(self.space.dim)
        if quadrature == "re":
            return a2 + a2d
        if quadrature == "im":
            return 1j * (a2 - a2d)
        raise ValueError(f"quadrature must be 're' or 'im', got {quadrature!r}")


# ---------------------------------------------------------------------------
# resonant Jaynes-Cummings model with qubit drive


@lru_cache(maxsize=None)
def _jc_parts(ho_dim: int):
    a = np.asarray(_annihilation(ho_dim))
    eye_ho = np.eye(ho_dim, dtype=complex)
    sp_a = np.kron(SIGMA_PLUS, a)  # sigma_+ (x) a
    coupling = sp_a + sp_a.conj().T
    sp_full = np.kron(SIGMA_PLUS, eye_ho)
    sm_full = np.kron(SIGMA_MINUS, eye_ho)
    return coupling, sp_full, sm_full


@dataclass(frozen=True)
class JCModel:
    """H/hbar = g (sigma_+ (x) a + sigma_- (x) a^dag) + eps sigma_+ + eps^* sigma_-."""

    space: CompositeSpace
    coupling: float = 1.0

    def __post_init__(self):
        if self.coupling <= 0:
            raise ValueError("coupling strength must be positive")

    def hamiltonian_raw(self, eps: complex) -> np.ndarray:
        coupling, sp, sm = _jc_parts(self.space.ho.dim)
        return self.coupling * coupling + eps * sp + np.conj(eps) * sm

    def control_derivative_raw(self, quadrature: str) -> np.ndarray:
        _, sp, sm = _jc_parts(self.space.ho.dim)
        if quadrature == "re":
            return sp + sm
        if quadrature == "im":
            return 1j * (sp - sm)
        raise ValueError(f"quadrature must be 're' or 'im', got {quadrature!r}")


def kerr_hamiltonian(model: KerrModel, eps: complex) -> OperatorMatrix:
    return OperatorMatrix(model.space, model.hamiltonian_raw(eps), hermitian=True)


def jc_hamiltonian(model: JCModel, eps: complex) -> OperatorMatrix:
    return OperatorMatrix(model.space, model.hamiltonian_raw(eps), hermitian=True)


def control_derivative(model, quadrature: str) -> OperatorMatrix:
    """Constant operator dH/d(eps quadrature); quadrature in {'re', 'im'}."""
    return OperatorMatrix(model.space, model.control_derivative_raw(quadrature), hermitian=True)


def jc_transition_frequencies(model: JCModel, n_max: int) -> list[tuple[float, str]]:
    """Adjacent dressed-manifold gaps g(sqrt(n+1) +- sqrt(n)), labeled and sorted.

    Type (i) gaps grow with n, type (ii) gaps shrink toward zero; together they
    are the frequencies a qubit drive can address.
    """
    g = model.coupling
    out = []
    for n in range(n_max + 1):
        out.append((g * (math.sqrt(n + 1) + math.sqrt(n)), "i"))
        out.append((g * (math.sqrt(n + 1) - math.sqrt(n)), "ii"))
    return sorted(out, key=lambda fr: fr[0])


# ---------------------------------------------------------------------------
# Lindblad dissipator


@dataclass(frozen=True)
class LindbladSpec:
    """Single collapse channel: kappa (L rho L^dag - {L^dag L, rho}/2)."""

    kappa: float
    collapse_op: OperatorMatrix

    def __post_init__(self):
        if not (self.kappa >= 0 and math.isfinite(self.kappa)):
            raise ValueError("kappa must be finite and non-negative")


def ho_decay(kappa: float, space: CompositeSpace) -> LindbladSpec:
    """Oscillator relaxation channel L = identity(2) (x) a."""
    L = np.kron(np.eye(2, dtype=complex), np.asarray(_annihilation(space.ho.dim)))
    return LindbladSpec(kappa, OperatorMatrix(space, L))


def liouvillian_apply(H: np.ndarray, diss: LindbladSpec | None, rho: np.ndarray) -> np.ndarray:
    """Right-hand side -i[H, rho] + kappa (L rho L^dag - {L^dag L, rho}/2)."""
    H = np.asarray(H)
    if H.shape != rho.shape:
        raise DimensionError("Hamiltonian and density matrix shapes differ")
    out = -1j * (H @ rho - rho @ H)
    if diss is not None and diss.kappa != 0.0:
        L = diss.collapse_op.matrix
        LdL = L.conj().T @ L
        out += diss.kappa * (L @ rho @ L.conj().T - 0.5 * (LdL @ rho + rho @ LdL))
    return out


def adjoint_liouvillian_apply(H: np.ndarray, diss: LindbladSpec | None, chi: np.ndarray) -> np.ndarray:
    """Adjoint generator +i[H, chi] + kappa (L^dag chi L - {L^dag L, chi}/2).

    Satisfies <adjoint(chi), rho>_HS = <chi, liouvillian(rho)>_HS.
    """
    H = np.asarray(H)
    if H.shape != chi.shape:
        raise DimensionError("Hamiltonian and costate shapes differ")
    out = 1j * (H @ chi - chi @ H)
    if diss is not None and diss.kappa != 0.0:
        L = diss.collapse_op.matrix
        LdL = L.conj().T @ L
        out += diss.kappa * (L.conj().T @ chi @ L - 0.5 * (LdL @ chi + chi @ LdL))
    return out
