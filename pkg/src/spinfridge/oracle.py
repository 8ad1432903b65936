"""Brute-force dense evolution on the full symmetric-sector Hilbert space.

Independent validator for the sector-resolved solvers: builds the joint
Hamiltonian with collective ladder operators on the (N+1)-dimensional
symmetric bath ladder, evolves the exact thermal product state by dense
eigendecomposition, and partial-traces explicitly.  Dimensions are capped
at 1000; this module is for small baths only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import RefrigeratorParams
from .linalg import eig_hermitian, evolve_density, Spectrum
from .spinstar import SingleStarParams

DIMENSION_CAP = 1000


@dataclass(frozen=True)
class DenseModel:
    """Full joint Hamiltonian and initial state, plus subsystem bookkeeping."""

    dims: tuple[int, ...]           # alternating (2, N1+1[, 2, N2+1, 2, N3+1])
    hamiltonian: np.ndarray
    initial_state: np.ndarray

    @property
    def dimension(self) -> int:
        return int(np.prod(self.dims))

    def spectrum(self) -> Spectrum:
        return eig_hermitian(self.hamiltonian)


def _collective_ladder(n_bath: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """J^z, J^+, J^- on the symmetric ladder, levels ascending m_B = -N/2..N/2."""
    j = 0.5 * n_bath
    m = np.arange(-j, j + 1)
    jz = np.diag(m)
    raise_factors = np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1))
    jp = np.diag(raise_factors, k=-1)  # |m+1><m| lives one row below the diagonal
    return jz, jp, jp.T


def _bath_shift(n_bath: int) -> np.ndarray:
    """Unit-element raising shift sum_m |m+1><m| on the bath ladder."""
    return np.eye(n_bath + 1, k=-1)


_SZ = np.diag([-0.5, 0.5])            # qubit levels ordered (ground, excited)
_SP = np.array([[0.0, 0.0], [1.0, 0.0]])
_SM = _SP.T


def _kron_all(ops) -> np.ndarray:
    out = ops[0]
    for op in ops[1:]:
        out = np.kron(out, op)
    return out


def _embed(op: np.ndarray, slot: int, dims: tuple[int, ...]) -> np.ndarray:
    return _kron_all([op if k == slot else np.eye(d) for k, d in enumerate(dims)])


def _pair_hamiltonian(p: SingleStarParams) -> np.ndarray:
    jz, jp, jm = _collective_ladder(p.n_bath)
    dim_b = p.n_bath + 1
    h = p.epsilon * np.kron(_SZ, np.eye(dim_b))
    h += p.bath_energy * np.kron(np.eye(2), jz)
    h += p.coupling * (np.kron(_SP, jm) + np.kron(_SM, jp))
    return h


def _thermal_weights(energies: np.ndarray, beta: float) -> np.ndarray:
    w = np.exp(-beta * (energies - energies.min()))
    return w / w.sum()


def _pair_thermal_state(p: SingleStarParams) -> np.ndarray:
    qubit = _thermal_weights(p.epsilon * np.array([-0.5, 0.5]), p.beta)
    j = 0.5 * p.n_bath
    bath = _thermal_weights(p.bath_energy * np.arange(-j, j + 1), p.beta)
    return np.diag(np.kron(qubit, bath))


def _check_cap(dim: int) -> None:
    if dim > DIMENSION_CAP:
        raise ValueError(
            f"dense model needs dimension {dim}, above the cap {DIMENSION_CAP}"
        )


def build_dense(params) -> DenseModel:
    """Dense model for SingleStarParams or RefrigeratorParams."""
    if isinstance(params, SingleStarParams):
        _check_cap(2 * (params.n_bath + 1))
        return DenseModel(
            (2, params.n_bath + 1),
            _pair_hamiltonian(params),
            _pair_thermal_state(params),
        )
    if isinstance(params, RefrigeratorParams):
        return _build_dense_refrigerator(params)
    raise TypeError(f"unsupported parameter type {type(params).__name__}")


def _build_dense_refrigerator(params: RefrigeratorParams) -> DenseModel:
    pairs = [params.pair(i) for i in (1, 2, 3)]
    dims = tuple(d for p in pairs for d in (2, p.n_bath + 1))
    dim = int(np.prod(dims))
    _check_cap(dim)
    pair_dims = [2 * (p.n_bath + 1) for p in pairs]
    h = np.zeros((dim, dim))
    for i, p in enumerate(pairs):
        h += _embed(_pair_hamiltonian(p), i, tuple(pair_dims))
    # Interaction: couples (qubit down, bath m+1/2) with (qubit up, bath m-1/2)
    # patterns across the three pairs, with unit bath matrix elements.
    lower = [np.kron(_SM, _bath_shift(p.n_bath)) for p in pairs]   # up -> down, bath +1
    raiser = [np.kron(_SP, _bath_shift(p.n_bath).T) for p in pairs]
    hop = _kron_all([lower[0], raiser[1], lower[2]])
    h += params.g * (hop + hop.T)
    rho0 = _kron_all([_pair_thermal_state(p) for p in pairs])
    return DenseModel(dims, h, rho0)


def dense_evolve(model: DenseModel, t: float, *, spectrum: Spectrum | None = None) -> np.ndarray:
    if spectrum is None:
        spectrum = model.spectrum()
    return evolve_density(model.hamiltonian, model.initial_state, t, spectrum=spectrum)


def partial_trace(rho: np.ndarray, dims: tuple[int, ...], keep: int) -> np.ndarray:
    """Reduced density matrix of subsystem ``keep`` of a product-structured state."""
    n = len(dims)
    rho = rho.reshape(dims + dims)
    for slot in reversed([k for k in range(n) if k != keep]):
        rho = np.trace(rho, axis1=slot, axis2=slot + rho.ndim // 2)
    return rho


def dense_evolve_and_trace(model: DenseModel, t: float, subsystem: int,
                           *, spectrum: Spectrum | None = None) -> np.ndarray:
    """Evolve then reduce to one subsystem.

    Subsystems are indexed in the dims order: 0 = qubit 1, 1 = bath 1,
    2 = qubit 2, ... (a single star has just 0 = qubit, 1 = bath).
    """
    if not 0 <= subsystem < len(model.dims):
        raise ValueError(f"subsystem {subsystem} out of range for dims {model.dims}")
    return partial_trace(dense_evolve(model, t, spectrum=spectrum), model.dims, subsystem)


def sector_basis_indices(params, label) -> list[int]:
    """Dense-basis indices of a sector's basis states, in canonical order.

    For a single star, ``label`` is two_m and the order is (ground, excited);
    for the refrigerator, ``label`` is the (two_m1, two_m2, two_m3) triple and
    the order is the engine's bit order (qubit 1 the most significant bit,
    bit 0 = ground).  Used to check that the dense Hamiltonian restricted to
    each sector reproduces the sector blocks.
    """
    if isinstance(params, SingleStarParams):
        return _single_sector_indices(params, label)
    pairs = [params.pair(i) for i in (1, 2, 3)]
    per_pair = [_single_sector_indices(p, two_m) for p, two_m in zip(pairs, label)]
    pair_dims = [2 * (p.n_bath + 1) for p in pairs]
    out = []
    for i1 in per_pair[0]:
        for i2 in per_pair[1]:
            for i3 in per_pair[2]:
                out.append((i1 * pair_dims[1] + i2) * pair_dims[2] + i3)
    return out


def _single_sector_indices(params: SingleStarParams, two_m: int) -> list[int]:
    n = params.n_bath
    indices = []
    two_m_b_ground = two_m + 1
    if abs(two_m_b_ground) <= n:
        indices.append(0 * (n + 1) + (two_m_b_ground + n) // 2)
    two_m_b_excited = two_m - 1
    if abs(two_m_b_excited) <= n:
        indices.append(1 * (n + 1) + (two_m_b_excited + n) // 2)
    return indices
