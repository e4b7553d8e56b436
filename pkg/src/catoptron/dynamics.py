"""Time propagation on a shared uniform grid.

Forward state / density-matrix evolution under piecewise-constant controls
and backward costate propagation.  Hamiltonian steps are exact per interval
(eigendecomposition of the frozen Hamiltonian), which makes the backward
map the exact adjoint of the forward map at the discrete level -- the
property the monotonicity of the pulse updates rests on.

Lindblad steps use the dense d^2 x d^2 superoperator exponential for
d <= 32 and fall back to an embedded Dormand-Prince 4(5) integrator with
step control for larger d.
"""

from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg

from .errors import DimensionError, NonFiniteError, PositivityError
from .models import ControlPulse, LindbladSpec, adjoint_liouvillian_apply, liouvillian_apply
from .spaces import CompositeSpace, DensityMatrix, StateVector

EXPM_MAX_DIM = 32  # largest Hilbert dimension for the dense superoperator path
RK_RTOL = 1e-9
RK_ATOL = 1e-12
POSITIVITY_ABORT = -1e-6
POSITIVITY_CHECK_STRIDE = 20
TRUNCATION_POP_TOL = 1e-8


class TruncationWarning(UserWarning):
    """Trajectory populated the top two Fock levels above tolerance."""


class Trajectory:
    """Forward trajectory: snapshots at the n_steps+1 grid points."""

    def __init__(self, grid, snapshots, kind: str):
        self.grid = grid
        self.snapshots = snapshots  # list of raw arrays, or None if not stored
        self.kind = kind  # "pure" | "density"
        self.final = snapshots[-1]

    def states(self, space):
        """Wrap stored snapshots as StateVector/DensityMatrix objects."""
        if self.kind == "pure":
            return [StateVector(space, s) for s in self.snapshots]
        return [DensityMatrix(space, s) for s in self.snapshots]


class CostateTrajectory:
    """Backward trajectory of (unnormalized) costates at the grid points."""

    def __init__(self, grid, snapshots, kind: str):
        self.grid = grid
        self.snapshots = snapshots
        self.kind = kind

    def midpoint(self, k: int) -> np.ndarray:
        """Costate interpolated at the midpoint of interval k."""
        return 0.5 * (self.snapshots[k] + self.snapshots[k + 1])


class UnitaryStepper:
    """Exact exponential of a frozen Hamiltonian over one interval."""

    def __init__(self, H: np.ndarray, dt: float):
        lam, V = np.linalg.eigh(H)
        self._V = V
        self._phases_fwd = np.exp(-1j * lam * dt)

    def forward(self, psi: np.ndarray) -> np.ndarray:
        return self._V @ (self._phases_fwd * (self._V.conj().T @ psi))

    def backward(self, chi: np.ndarray) -> np.ndarray:
        # exact adjoint of forward
        return self._V @ (self._phases_fwd.conj() * (self._V.conj().T @ chi))


def _top_population_pure(psi: np.ndarray, space) -> float:
    if isinstance(space, CompositeSpace):
        m = space.ho.dim
        block = psi.reshape(2, m)
        return float(np.sum(np.abs(block[:, m - 2 :]) ** 2))
    return float(np.sum(np.abs(psi[-2:]) ** 2))


def _top_population_density(rho: np.ndarray, space) -> float:
    diag = np.abs(np.diag(rho).real)
    if isinstance(space, CompositeSpace):
        m = space.ho.dim
        block = diag.reshape(2, m)
        return float(np.sum(block[:, m - 2 :]))
    return float(np.sum(diag[-2:]))


def _warn_truncation(max_pop: float) -> None:
    if max_pop >= TRUNCATION_POP_TOL:
        warnings.warn(
            f"top two Fock levels reached population {max_pop:.2e} along the "
            f"trajectory; the truncation dim is too small",
            TruncationWarning,
            stacklevel=3,
        )


def propagate_state(model, pulse: ControlPulse, psi0: StateVector, store: bool = True) -> Trajectory:
    """Exact per-interval evolution psi_{k+1} = exp(-i H(eps_k) dt) psi_k."""
    if psi0.space != model.space:
        raise DimensionError("initial state does not live on the model space")
    dt = pulse.grid.dt
    psi = psi0.amplitudes.astype(complex)
    snaps = [psi]
    max_pop = _top_population_pure(psi, model.space)
    for eps in pulse.samples:
        stepper = UnitaryStepper(model.hamiltonian_raw(eps), dt)
        psi = stepper.forward(psi)
        max_pop = max(max_pop, _top_population_pure(psi, model.space))
        snaps.append(psi)
    if not np.all(np.isfinite(psi)):
        raise NonFiniteError("state amplitudes became non-finite during propagation")
    _warn_truncation(max_pop)
    return Trajectory(pulse.grid, snaps if store else [snaps[-1]], "pure")


def propagate_costate_backward(model, pulse: ControlPulse, chiT: np.ndarray) -> CostateTrajectory:
    """chi_k = exp(+i H(eps_k) dt) chi_{k+1}, the exact adjoint of the forward step."""
    chiT = np.asarray(chiT, dtype=complex)
    if chiT.shape != (model.space.dim,):
        raise DimensionError("costate boundary value has wrong length")
    dt = pulse.grid.dt
    n = pulse.grid.n_steps
    snaps = [None] * (n + 1)
    snaps[n] = chiT
    chi = chiT
    for k in range(n - 1, -1, -1):
        stepper = UnitaryStepper(model.hamiltonian_raw(pulse.samples[k]), dt)
        chi = stepper.backward(chi)
        snaps[k] = chi
    if not np.all(np.isfinite(chi)):
        raise NonFiniteError("costate became non-finite during backward propagation")
    return CostateTrajectory(pulse.grid, snaps, "pure")


# ---------------------------------------------------------------------------
# Lindblad propagation


def liouvillian_superop(H: np.ndarray, diss: LindbladSpec | None) -> np.ndarray:
    """Dense superoperator of the Lindblad generator for row-major vec(rho)."""
    d = H.shape[0]
    eye = np.eye(d, dtype=complex)
    M = -1j * (np.kron(H, eye) - np.kron(eye, H.T))
    if diss is not None and diss.kappa != 0.0:
        L = diss.collapse_op.matrix
        LdL = L.conj().T @ L
        M += diss.kappa * (
            np.kron(L, L.conj()) - 0.5 * (np.kron(LdL, eye) + np.kron(eye, LdL.T))
        )
    return M


# Dormand-Prince 4(5) coefficients
_DP_A = [
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


def _dopri45(rhs, y0: np.ndarray, span: float, rtol: float = RK_RTOL, atol: float = RK_ATOL) -> np.ndarray:
    """Integrate dy/dt = rhs(y) (autonomous) from 0 to span with step control."""
    t, y = 0.0, y0
    h = span
    k1 = rhs(y)
    while t < span:
        h = min(h, span - t)
        ks = [k1]
        for row in _DP_A[1:]:
            yi = y + h * sum(c * k for c, k in zip(row, ks))
            ks.append(rhs(yi))
        y5 = y + h * sum(b * k for b, k in zip(_DP_B5, ks) if b != 0.0)
        y4 = y + h * sum(b * k for b, k in zip(_DP_B4, ks) if b != 0.0)
        scale = atol + rtol * max(np.linalg.norm(y), np.linalg.norm(y5))
        err = np.linalg.norm(y5 - y4) / scale
        if err <= 1.0:
            t += h
            y = y5
            k1 = ks[-1]  # FSAL: k7 = rhs(y5)
        factor = 0.9 * (err + 1e-16) ** -0.2
        h *= min(5.0, max(0.2, factor))
    return y


class LindbladStepper:
    """One-interval Lindblad step under a frozen generator.

    ``forward`` advances rho; ``backward`` applies the exact (expm path) or
    continuum (RK path) adjoint to the costate, so that
    <backward(chi), rho> == <chi, forward(rho)> in the expm path.
    """

    def __init__(self, H: np.ndarray, diss: LindbladSpec | None, dt: float):
        self._d = H.shape[0]
        self._dt = dt
        if self._d <= EXPM_MAX_DIM:
            self._E = scipy.linalg.expm(liouvillian_superop(H, diss) * dt)
        else:
            self._E = None
            self._H = H
            self._diss = diss

    def forward(self, rho: np.ndarray) -> np.ndarray:
        if self._E is not None:
            return (self._E @ rho.reshape(-1)).reshape(self._d, self._d)
        return _dopri45(lambda y: liouvillian_apply(self._H, self._diss, y), rho, self._dt)

    def backward(self, chi: np.ndarray) -> np.ndarray:
        if self._E is not None:
            return (self._E.conj().T @ chi.reshape(-1)).reshape(self._d, self._d)
        return _dopri45(lambda y: adjoint_liouvillian_apply(self._H, self._diss, y), chi, self._dt)


def propagate_density(
    model,
    diss: LindbladSpec | None,
    pulse: ControlPulse,
    rho0: DensityMatrix,
    store: bool = True,
) -> Trajectory:
    """Per-interval Lindblad evolution; checks trace drift and positivity."""
    if rho0.space != model.space:
        raise DimensionError("initial density matrix does not live on the model space")
    dt = pulse.grid.dt
    rho = rho0.matrix.astype(complex)
    snaps = [rho]
    max_pop = _top_population_density(rho, model.space)
    for k, eps in enumerate(pulse.samples):
        stepper = LindbladStepper(model.hamiltonian_raw(eps), diss, dt)
        rho = stepper.forward(rho)
        rho = 0.5 * (rho + rho.conj().T)  # remove Hermiticity roundoff
        snaps.append(rho)
        max_pop = max(max_pop, _top_population_density(rho, model.space))
        if (k + 1) % POSITIVITY_CHECK_STRIDE == 0:
            _check_positivity(rho)
    if not np.all(np.isfinite(rho)):
        raise NonFiniteError("density matrix became non-finite during propagation")
    drift = abs(np.trace(rho).real - 1.0)
    if drift > 1e-9:
        raise NonFiniteError(f"trace drift {drift:.2e} exceeds 1e-9; reduce dt")
    _check_positivity(rho)
    _warn_truncation(max_pop)
    return Trajectory(pulse.grid, snaps if store else [snaps[-1]], "density")


def _check_positivity(rho: np.ndarray) -> None:
    lam_min = float(np.linalg.eigvalsh(rho)[0])
    if lam_min < POSITIVITY_ABORT:
        raise PositivityError(
            f"density matrix eigenvalue {lam_min:.2e} below {POSITIVITY_ABORT}; dt too large"
        )


def propagate_codm_backward(
    model,
    diss: LindbladSpec | None,
    pulse: ControlPulse,
    chiT: np.ndarray,
) -> CostateTrajectory:
    """Backward costate evolution under the adjoint Lindblad generator."""
    chiT = np.asarray(chiT, dtype=complex)
    d = model.space.dim
    if chiT.shape != (d, d):
        raise DimensionError("costate boundary value has wrong shape")
    dt = pulse.grid.dt
    n = pulse.grid.n_steps
    snaps = [None] * (n + 1)
    snaps[n] = chiT
    chi = chiT
    for k in range(n - 1, -1, -1):
        stepper = LindbladStepper(model.hamiltonian_raw(pulse.samples[k]), diss, dt)
        chi = stepper.backward(chi)
        snaps[k] = chi
    if not np.all(np.isfinite(chi)):
        raise NonFiniteError("costate became non-finite during backward propagation")
    return CostateTrajectory(pulse.grid, snaps, "density")
