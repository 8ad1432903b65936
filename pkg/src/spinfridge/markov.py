"""Global-GKSL Markovian three-qubit refrigerator baseline.

Works in the computational basis |q1 q2 q3> (index q1*4 + q2*2 + q3) in
which |1> is the *lower* level of each qubit: the local Hamiltonians are
(eps_i/2) * sigma_z_i with sigma_z = |0><0| - |1><1|, the three-body
interaction couples |010> and |101>, and the tabulated jump operators then
lower the dressed energy by exactly their labelled frequency.  Rates follow
the Ohmic spectral density J(w) = alpha * w * exp(-w/cutoff) with the
Bose-Einstein occupation, which is the unique choice obeying detailed
balance gamma(-w) = exp(-beta w) * gamma(w).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import solve_ivp

from .spinstar import temperature_array

DEFAULT_CUTOFF = 1e3
DEFAULT_TIME_GRID = (0.0, 40.0, 0.05)
DEFAULT_ALPHA_RANGE = (0.0, 1e-4)
DEFAULT_G_RANGE = (0.0, 0.1)


class WeakCouplingWarning(UserWarning):
    """Largest decay rate above 1% of the smallest system scale."""


@dataclass(frozen=True)
class MarkovParams:
    """Qubit energies, three-body coupling, Ohmic strengths and bath temperatures."""

    epsilon: tuple[float, float, float]
    g: float
    alpha: tuple[float, float, float]
    beta: tuple[float, float, float]
    cutoff: float = DEFAULT_CUTOFF

    def __post_init__(self):
        for name in ("epsilon", "alpha", "beta"):
            value = tuple(getattr(self, name))
            if len(value) != 3:
                raise ValueError(f"{name} must have three entries, got {value}")
            object.__setattr__(self, name, value)
        if any(a < 0 for a in self.alpha):
            raise ValueError(f"alpha must be nonnegative, got {self.alpha}")
        if any(b <= 0 for b in self.beta):
            raise ValueError(f"beta must be positive, got {self.beta}")
        if self.cutoff <= 0:
            raise ValueError(f"cutoff must be positive, got {self.cutoff}")
        if self.g < 0:
            raise ValueError(f"g must be nonnegative, got {self.g}")


@dataclass(frozen=True)
class JumpChannel:
    """One dissipation channel: qubit, transition frequency, operator, rate."""

    qubit: int
    frequency: float
    operator: np.ndarray
    rate: float


def _ket(bits: str) -> np.ndarray:
    v = np.zeros(8)
    v[int(bits, 2)] = 1.0
    return v


def _outer(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.outer(a, b)


_PLUS = (_ket("101") + _ket("010")) / math.sqrt(2.0)
_MINUS = (_ket("101") - _ket("010")) / math.sqrt(2.0)


def _tabulated_operators() -> list[tuple[int, str, np.ndarray]]:
    """The nine positive-frequency jump operators in the dressed basis.

    Frequencies are tagged symbolically: "e" for eps_i, "e+g"/"e-g" for the
    dressed pair split by the interaction.
    """
    s = 1.0 / math.sqrt(2.0)
    return [
        (1, "e", _outer(_ket("111"), _ket("011")) + _outer(_ket("100"), _ket("000"))),
        (1, "e+g", s * (_outer(_ket("110"), _PLUS) + _outer(_MINUS, _ket("001")))),
        (1, "e-g", s * (_outer(_PLUS, _ket("001")) - _outer(_ket("110"), _MINUS))),
        (2, "e", _outer(_ket("110"), _ket("100")) + _outer(_ket("011"), _ket("001"))),
        (2, "e+g", s * (_outer(_ket("111"), _PLUS) - _outer(_MINUS, _ket("000")))),
        (2, "e-g", s * (_outer(_PLUS, _ket("000")) + _outer(_ket("111"), _MINUS))),
        (3, "e", _outer(_ket("111"), _ket("110")) + _outer(_ket("001"), _ket("000"))),
        (3, "e+g", s * (_outer(_ket("011"), _PLUS) + _outer(_MINUS, _ket("100")))),
        (3, "e-g", s * (_outer(_PLUS, _ket("100")) - _outer(_ket("011"), _MINUS))),
    ]


def spectral_density(omega: float, alpha: float, cutoff: float) -> float:
    """Ohmic density J(w) = alpha * w * exp(-w / cutoff) for w > 0."""
    return alpha * omega * math.exp(-omega / cutoff)


def bose_occupation(omega: float, beta: float) -> float:
    """Bose-Einstein occupation 1/(exp(beta*w) - 1)."""
    x = beta * omega
    if x > 700.0:
        return 0.0
    return 1.0 / math.expm1(x)


def decay_rate(omega: float, alpha: float, beta: float, cutoff: float) -> float:
    """Rate gamma(w): emission J(w)(1+f) for w > 0, absorption J(|w|)f for w < 0."""
    if omega > 0:
        return spectral_density(omega, alpha, cutoff) * (
            1.0 + bose_occupation(omega, beta)
        )
    mag = abs(omega)
    return spectral_density(mag, alpha, cutoff) * bose_occupation(mag, beta)


def build_jump_channels(params: MarkovParams) -> list[JumpChannel]:
    """All 18 channels: nine tabulated operators plus their adjoints.

    Positive-frequency channels carry gamma(w) = J(w)(1+f); the adjoint
    (absorption) channels carry gamma(-w).  Any nonpositive transition
    frequency is an error; a largest rate above 10% of min(eps_i, g) is an
    error and above 1% a WeakCouplingWarning.
    """
    channels = []
    for qubit, tag, op in _tabulated_operators():
        eps = params.epsilon[qubit - 1]
        frequency = {"e": eps, "e+g": eps + params.g, "e-g": eps - params.g}[tag]
        if frequency <= 0:
            raise ValueError(
                f"channel (qubit {qubit}, {tag}) has nonpositive frequency "
                f"{frequency}"
            )
        alpha = params.alpha[qubit - 1]
        beta = params.beta[qubit - 1]
        channels.append(JumpChannel(
            qubit, frequency, op,
            decay_rate(frequency, alpha, beta, params.cutoff),
        ))
        channels.append(JumpChannel(
            qubit, -frequency, op.T.copy(),
            decay_rate(-frequency, alpha, beta, params.cutoff),
        ))
    scale = min(min(params.epsilon), params.g) if params.g > 0 else min(params.epsilon)
    gamma_max = max(ch.rate for ch in channels)
    if gamma_max >= 0.1 * scale:
        raise ValueError(
            f"largest rate {gamma_max:.3e} breaks weak coupling "
            f"(>= 10% of the smallest system scale {scale:.3e})"
        )
    if gamma_max > 0.01 * scale:
        warnings.warn(
            f"largest rate {gamma_max:.3e} above 1% of the smallest system "
            f"scale {scale:.3e}; the weak-coupling description degrades",
            WeakCouplingWarning,
            stacklevel=2,
        )
    return channels


def system_hamiltonian(params: MarkovParams) -> np.ndarray:
    """Free part plus the three-body interaction g(|010><101| + h.c.)."""
    h = np.zeros((8, 8))
    for idx in range(8):
        bits = ((idx >> 2) & 1, (idx >> 1) & 1, idx & 1)
        h[idx, idx] = sum(
            0.5 * params.epsilon[k] * (1.0 - 2.0 * bits[k]) for k in range(3)
        )
    h[0b010, 0b101] += params.g
    h[0b101, 0b010] += params.g
    return h


def thermal_product_state(params: MarkovParams) -> np.ndarray:
    """Tensor product of single-qubit thermal states (|1> the lower level)."""
    rho = np.ones(1)
    for k in range(3):
        z = 2.0 * math.cosh(0.5 * params.beta[k] * params.epsilon[k])
        upper = math.exp(-0.5 * params.beta[k] * params.epsilon[k]) / z
        rho = np.kron(rho, np.array([upper, 1.0 - upper]))
    return np.diag(rho).astype(complex)


def liouvillian_matrix(params: MarkovParams) -> np.ndarray:
    """The GKSL generator as a 64x64 matrix acting on vec(rho), row-major."""
    h = system_hamiltonian(params).astype(complex)
    eye = np.eye(8)
    lv = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for ch in build_jump_channels(params):
        l_op = ch.operator.astype(complex)
        ld_l = l_op.conj().T @ l_op
        lv += ch.rate * (
            np.kron(l_op, l_op.conj())
            - 0.5 * np.kron(ld_l, eye)
            - 0.5 * np.kron(eye, ld_l.T)
        )
    return lv


@dataclass(frozen=True)
class MarkovTrajectory:
    """States sampled on a grid plus a continuous interpolant."""

    time: np.ndarray
    states: np.ndarray  # (n, 8, 8)
    _interpolant: object

    def state_at(self, t: float) -> np.ndarray:
        return np.asarray(self._interpolant(t)).reshape(8, 8)


def integrate_gksl(params: MarkovParams, initial_state, times) -> MarkovTrajectory:
    """Integrate the master equation with adaptive explicit Runge-Kutta.

    Tolerances rtol=1e-9 / atol=1e-12; the dynamics at weak rates is not
    stiff and the slowest relevant oscillation (the three-body swap, period
    about pi/g) is well resolved.  Trace and Hermiticity are checked at the
    requested sample times to 1e-8.
    """
    times = np.asarray(times, dtype=float)
    rho0 = np.asarray(initial_state, dtype=complex)
    if rho0.shape != (8, 8):
        raise ValueError(f"initial state must be 8x8, got {rho0.shape}")
    trace = complex(np.trace(rho0))
    if abs(trace - 1.0) > 1e-10:
        raise ValueError(f"initial state trace {trace} differs from 1")
    lv = liouvillian_matrix(params)

    def rhs(_t, y):
        return lv @ y

    solution = solve_ivp(
        rhs,
        (float(times[0]), float(times[-1])),
        rho0.ravel(),
        method="RK45",
        t_eval=times,
        rtol=1e-9,
        atol=1e-12,
        dense_output=True,
    )
    if not solution.success:
        raise RuntimeError(
            f"master-equation integration failed at t={solution.t[-1]:.6g}: "
            f"{solution.message}"
        )
    states = solution.y.T.reshape(-1, 8, 8)
    for k in (0, len(times) // 2, len(times) - 1):
        state = states[k]
        if abs(np.trace(state) - 1.0) > 1e-8 or np.max(np.abs(state - state.conj().T)) > 1e-8:
            raise RuntimeError(
                f"integrator lost trace or Hermiticity at t={times[k]:.6g}"
            )
    return MarkovTrajectory(times, states, solution.sol)


def ground_populations(state: np.ndarray) -> np.ndarray:
    """Ground (lower-level) population of each qubit for one 8x8 state."""
    diag = np.diag(state).real
    pops = np.empty(3)
    for k in range(3):
        mask = [(idx >> (2 - k)) & 1 == 1 for idx in range(8)]
        pops[k] = diag[mask].sum()
    return pops


def temperature_trajectories(params: MarkovParams, traj: MarkovTrajectory):
    """(r, T) arrays of shape (3, n) along the trajectory."""
    r = np.stack([ground_populations(s) for s in traj.states], axis=1)
    temps = np.stack([
        temperature_array(r[k], params.epsilon[k]) for k in range(3)
    ])
    return r, temps


def cold_qubit_temperature(params: MarkovParams, traj: MarkovTrajectory, t: float) -> float:
    r = ground_populations(traj.state_at(t))[0]
    return float(temperature_array(np.array([r]), params.epsilon[0])[0])


@dataclass(frozen=True)
class MarkovOptimum:
    """Best Ohmic strengths and coupling with the optimal time and temperature."""

    alpha: tuple[float, float, float]
    g: float
    best_time: float
    best_t1: float
    evaluations: int
    restarts: int


def markov_optimize(base: MarkovParams, alpha_range=DEFAULT_ALPHA_RANGE,
                    g_range=DEFAULT_G_RANGE, budget: int = 300, seed: int = 0,
                    time_grid=DEFAULT_TIME_GRID) -> MarkovOptimum:
    """Minimize the cold-qubit temperature over (alpha1..3, g) and time.

    Same search strategy as the spin-star optimizer: the time axis is a
    dense-grid scan of each integrated trajectory followed by golden
    polish, the four couplings a seeded Sobol multistart with Nelder-Mead
    refinement.  Weak-coupling warnings from exploratory parameter points
    are suppressed inside the objective.
    """
    from .analysis import golden_section_min, minimize_box

    t0, t1, dt = time_grid
    times = np.arange(t0, t1 + 0.5 * dt, dt)

    def objective(x) -> tuple[float, float]:
        params = replace(
            base, alpha=(float(x[0]), float(x[1]), float(x[2])), g=float(x[3])
        )
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", WeakCouplingWarning)
            traj = integrate_gksl(params, thermal_product_state(params), times)
            r, _ = temperature_trajectories(params, traj)
            k = int(np.argmax(r[0]))
            if 0 < k < len(times) - 1:
                t_best, neg = golden_section_min(
                    lambda t: -ground_populations(traj.state_at(t))[0],
                    float(times[k - 1]), float(times[k + 1]), tol=1e-4,
                )
                r_best = -neg
                if r_best < r[0][k]:
                    t_best, r_best = float(times[k]), float(r[0][k])
            else:
                t_best, r_best = float(times[k]), float(r[0][k])
        t1_value = float(temperature_array(np.array([r_best]), base.epsilon[0])[0])
        return t1_value, t_best

    cache: dict[tuple, tuple] = {}

    def value_only(x) -> float:
        key = tuple(np.round(np.asarray(x, dtype=float), 14))
        if key not in cache:
            cache[key] = objective(x)
        return cache[key][0]

    bounds = [alpha_range, alpha_range, alpha_range, g_range]
    x_best, f_best, evals, restarts, _ = minimize_box(
        value_only, bounds, budget, seed
    )
    t1_value, t_best = cache[tuple(np.round(np.asarray(x_best, dtype=float), 14))]
    return MarkovOptimum(
        alpha=(float(x_best[0]), float(x_best[1]), float(x_best[2])),
        g=float(x_best[3]),
        best_time=t_best,
        best_t1=t1_value,
        evaluations=evals,
        restarts=restarts,
    )
