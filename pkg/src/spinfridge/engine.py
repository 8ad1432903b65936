"""Sector-resolved dynamics of the three-qubit spin-star refrigerator.

The conserved per-pair total z spins split the joint Hilbert space into
(m1, m2, m3) sectors of dimension at most 8 = 2*2*2.  Basis convention
inside a sector: qubit i contributes bit b_i (0 = qubit in its lower level
paired with bath level m_i + 1/2, 1 = upper level with bath level
m_i - 1/2) and the basis index is b1*4 + b2*2 + b3 when all three pairs are
two-dimensional; one-dimensional edge pairs contribute no bit but keep the
same nesting order (qubit 1 most significant).  The collective interaction
couples indices 2 = (0,1,0) and 5 = (1,0,1) and exists only in full
eight-dimensional sectors.

Every sector is diagonalized once per parameter set; populations and
currents are then exact trigonometric sums over spectral gaps, so a dense
time grid costs one fused recurrence instead of repeated evolutions.
Weighted reductions run in a fixed lexicographic sector order, which keeps
repeated runs bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product as iter_product

import numpy as np

from .linalg import Spectrum
from .spinstar import SingleStarParams, sector_log_weights, temperature_array

DEFAULT_PRUNE_TOL = 1e-12
_INTERACTION_BITS = ((0, 1, 0), (1, 0, 1))


@dataclass(frozen=True)
class RefrigeratorParams:
    """All Hamiltonian and thermal parameters of the three-pair refrigerator."""

    epsilon: tuple[float, float, float]
    bath_energy: tuple[float, float, float]
    coupling: tuple[float, float, float]
    g: float
    n_bath: tuple[int, int, int]
    beta: tuple[float, float, float]

    def __post_init__(self):
        for name in ("epsilon", "bath_energy", "coupling", "n_bath", "beta"):
            value = tuple(getattr(self, name))
            if len(value) != 3:
                raise ValueError(f"{name} must have three entries, got {value}")
            object.__setattr__(self, name, value)
        if self.g < 0 or not math.isfinite(self.g):
            raise ValueError(f"g must be finite and nonnegative, got {self.g}")
        for i in (1, 2, 3):
            self.pair(i)  # delegates per-pair validation

    def pair(self, i: int) -> SingleStarParams:
        """Parameters of qubit-bath pair i (1-based)."""
        k = i - 1
        return SingleStarParams(
            epsilon=self.epsilon[k],
            bath_energy=self.bath_energy[k],
            coupling=self.coupling[k],
            n_bath=self.n_bath[k],
            beta=self.beta[k],
        )

    def is_autonomous(self, tol: float = 1e-12) -> bool:
        """Whether the two interaction-coupled states are degenerate."""
        gaps = [self.bath_energy[k] - self.epsilon[k] for k in range(3)]
        return abs(gaps[1] - (gaps[0] + gaps[2])) <= tol


@dataclass(frozen=True)
class TripleSectorLabel:
    """One (m1, m2, m3) sector: doubled labels, local dimensions, weight.

    ``weight`` is the sector's fraction of the total Boltzmann weight
    (thermal trace factors included).  Fractions rather than raw Boltzmann
    factors are stored because the raw products overflow double precision
    once beta*E*N grows past a few hundred.
    """

    two_m: tuple[int, int, int]
    dims: tuple[int, int, int]
    weight: float

    @property
    def dimension(self) -> int:
        return self.dims[0] * self.dims[1] * self.dims[2]


@dataclass(frozen=True)
class SectorSet:
    labels: list[TripleSectorLabel]
    retained_fraction: float
    total_labels: int


@dataclass(frozen=True)
class TripleSectorSystem:
    """One assembled sector: Hamiltonian block, spectrum and initial state."""

    label: TripleSectorLabel
    hamiltonian: np.ndarray
    spectrum: Spectrum
    initial_state: np.ndarray


@dataclass(frozen=True)
class TimeSeries:
    """Sampled trajectory of one qubit's ground population and temperature."""

    qubit: int
    time: np.ndarray
    ground_population: np.ndarray
    temperature: np.ndarray

    @property
    def inverted(self) -> np.ndarray:
        return self.ground_population < 0.5


# ---------------------------------------------------------------------------
# Per-pair sector arrays and sector enumeration
# ---------------------------------------------------------------------------

def _pair_sector_arrays(p: SingleStarParams) -> dict:
    """Vectorized per-sector data of one qubit-bath pair, ascending two_m."""
    two_m, logw = sector_log_weights(p)
    m = 0.5 * two_m
    n = p.n_bath
    dim = np.where(np.abs(two_m) == n + 1, 1, 2)
    b_minus = -0.5 * p.epsilon + p.bath_energy * (m + 0.5)
    b_plus = 0.5 * p.epsilon + p.bath_energy * (m - 0.5)
    inner = (0.5 * n + m + 0.5) * (0.5 * n - m + 0.5)
    u = p.coupling * np.sqrt(np.clip(inner, 0.0, None))
    edge_energy = np.where(two_m > 0, b_plus, b_minus)
    edge_state = np.where(two_m > 0, 1, 0)  # level surviving in an edge sector
    p_ground = 1.0 / (1.0 + math.exp(min(p.beta * (p.bath_energy - p.epsilon), 700.0)))
    return {
        "two_m": two_m,
        "m": m,
        "dim": dim,
        "b_minus": b_minus,
        "b_plus": b_plus,
        "u": u,
        "edge_energy": edge_energy,
        "edge_state": edge_state,
        "logw": logw,
        "p_ground": p_ground,
    }


def _enumerate_arrays(params: RefrigeratorParams, prune_tol: float):
    """Kept sector index triples, weight fractions and the retained total.

    Sector weights are products of per-pair Boltzmann weights (thermal trace
    factors included), normalized to the full sum.  Sectors are dropped
    greedily from the smallest weight up while the dropped cumulative
    fraction stays strictly below ``prune_tol``; the kept set is returned in
    lexicographic (two_m1, two_m2, two_m3) order.
    """
    if not 0.0 <= prune_tol < 1.0:
        raise ValueError(f"prune_tol must lie in [0, 1), got {prune_tol}")
    pairs = [_pair_sector_arrays(params.pair(i)) for i in (1, 2, 3)]
    logw = (
        pairs[0]["logw"][:, None, None]
        + pairs[1]["logw"][None, :, None]
        + pairs[2]["logw"][None, None, :]
    ).ravel()
    w = np.exp(logw - logw.max())
    fractions = w / w.sum()
    order = np.argsort(fractions, kind="stable")
    cum = np.cumsum(fractions[order])
    n_drop = int(np.searchsorted(cum, prune_tol, side="left"))
    dropped = float(cum[n_drop - 1]) if n_drop else 0.0
    keep = np.sort(order[n_drop:])
    shape = tuple(len(p["logw"]) for p in pairs)
    idx = np.unravel_index(keep, shape)
    return pairs, idx, fractions[keep], 1.0 - dropped


def enumerate_triple_sectors(
    params: RefrigeratorParams, prune_tol: float = DEFAULT_PRUNE_TOL
) -> SectorSet:
    """All (m1, m2, m3) sector labels above the pruning cut."""
    pairs, idx, fractions, retained = _enumerate_arrays(params, prune_tol)
    labels = []
    for a1, a2, a3, w in zip(*idx, fractions):
        two_m = (
            int(pairs[0]["two_m"][a1]),
            int(pairs[1]["two_m"][a2]),
            int(pairs[2]["two_m"][a3]),
        )
        dims = (
            int(pairs[0]["dim"][a1]),
            int(pairs[1]["dim"][a2]),
            int(pairs[2]["dim"][a3]),
        )
        labels.append(TripleSectorLabel(two_m, dims, float(w)))
    total = (params.n_bath[0] + 2) * (params.n_bath[1] + 2) * (params.n_bath[2] + 2)
    return SectorSet(labels, retained, total)


# ---------------------------------------------------------------------------
# Batched sector groups
# ---------------------------------------------------------------------------

def _basis_states(dims, sides) -> list[tuple[int, int, int]]:
    """Canonical basis as (s1, s2, s3) bit tuples, qubit 1 most significant."""
    choices = []
    for k in range(3):
        choices.append((0, 1) if dims[k] == 2 else (int(sides[k]),))
    return list(iter_product(*choices))


class SectorGroupData:
    """Batched eigendata of kept sectors sharing a (dims, edge-side) signature."""

    __slots__ = (
        "dims", "sides", "size", "dim", "basis", "weights", "m_values",
        "hamiltonians", "lam", "vecs", "m_matrix", "u_values", "p0",
    )

    def __init__(self, **kw):
        for name in self.__slots__:
            setattr(self, name, kw[name])


def _make_group(params, pairs, sel, weights, dims, sides) -> SectorGroupData:
    """Assemble and diagonalize the sectors selected by per-pair indices."""
    size = len(weights)
    dim = dims[0] * dims[1] * dims[2]
    basis = _basis_states(dims, sides)
    m_values = np.stack([pairs[k]["m"][sel[k]] for k in range(3)], axis=1)

    level_energy = []
    u_values = []
    p_level = []
    for k in range(3):
        pk = pairs[k]
        if dims[k] == 2:
            level_energy.append(
                np.stack([pk["b_minus"][sel[k]], pk["b_plus"][sel[k]]], axis=1)
            )
            u_values.append(np.asarray(pk["u"][sel[k]], dtype=float))
            p_level.append(np.array([pk["p_ground"], 1.0 - pk["p_ground"]]))
        else:
            e = pk["edge_energy"][sel[k]]
            level_energy.append(np.stack([e, e], axis=1))
            u_values.append(None)
            p_level.append(np.array([1.0, 1.0]))

    h = np.zeros((size, dim, dim))
    p0 = np.ones((size, dim))
    for b, state in enumerate(basis):
        for k in range(3):
            h[:, b, b] += level_energy[k][:, state[k]]
            p0[:, b] *= p_level[k][state[k]]
    for b, state in enumerate(basis):
        for c in range(b + 1, dim):
            flips = [k for k in range(3) if state[k] != basis[c][k]]
            if len(flips) == 1 and dims[flips[0]] == 2:
                h[:, b, c] = u_values[flips[0]]
                h[:, c, b] = u_values[flips[0]]
    if dims == (2, 2, 2):
        a = basis.index(_INTERACTION_BITS[0])
        b = basis.index(_INTERACTION_BITS[1])
        h[:, a, b] += params.g
        h[:, b, a] += params.g

    lam, vecs = np.linalg.eigh(h)
    m_matrix = np.einsum("gka,gk,gkb->gab", vecs, p0, vecs, optimize=True)
    return SectorGroupData(
        dims=dims, sides=sides, size=size, dim=dim, basis=basis,
        weights=np.asarray(weights, dtype=float), m_values=m_values,
        hamiltonians=h, lam=lam, vecs=vecs, m_matrix=m_matrix,
        u_values=u_values, p0=p0,
    )


def _build_groups(params, pairs, idx, fractions) -> list[SectorGroupData]:
    """Bucket kept sectors by (dims, edge-side) signature, preserving order."""
    dims_per_pair = [pairs[k]["dim"][idx[k]] for k in range(3)]
    side_per_pair = [
        np.where(dims_per_pair[k] == 1, pairs[k]["edge_state"][idx[k]], 0)
        for k in range(3)
    ]
    signature = np.stack(dims_per_pair + side_per_pair, axis=1)
    buckets: dict[tuple, list[int]] = {}
    for row in range(len(fractions)):
        key = tuple(int(x) for x in signature[row])
        buckets.setdefault(key, []).append(row)
    groups = []
    for key in sorted(buckets):
        rows = np.array(buckets[key])
        dims, sides = key[:3], key[3:]
        sel = [idx[k][rows] for k in range(3)]
        groups.append(_make_group(params, pairs, sel, fractions[rows], dims, sides))
    return groups


# ---------------------------------------------------------------------------
# Trigonometric series evaluation
# ---------------------------------------------------------------------------

def trig_series_uniform(const, amps, omegas, t0: float, dt: float, n: int,
                        kind: str = "cos") -> np.ndarray:
    """Evaluate const + sum_j amps[.,j]*trig(omegas[j]*t) on a uniform grid.

    Uses the exact two-term recurrence f(t+dt) = 2 cos(w dt) f(t) - f(t-dt),
    shared by cosine and sine, so a dense grid costs one multiply-add per
    term per step instead of a transcendental call.  ``amps`` may be a
    (k, m) matrix evaluating k series over shared frequencies; the output
    then has shape (k, n).
    """
    amps = np.asarray(amps, dtype=float)
    squeeze = amps.ndim == 1
    amps = np.atleast_2d(amps)
    omegas = np.asarray(omegas, dtype=float)
    const_vec = np.broadcast_to(np.asarray(const, dtype=float).ravel(), (amps.shape[0],))
    fun = np.cos if kind == "cos" else np.sin
    out = np.empty((amps.shape[0], n))
    if omegas.size == 0 or n == 0:
        out[:] = const_vec[:, None]
        return out[0] if squeeze else out
    prev = fun(omegas * t0)
    out[:, 0] = const_vec + amps @ prev
    if n > 1:
        cur = fun(omegas * (t0 + dt))
        out[:, 1] = const_vec + amps @ cur
        two_cos = 2.0 * np.cos(omegas * dt)
        scratch = np.empty_like(prev)
        for k in range(2, n):
            np.multiply(two_cos, cur, out=scratch)
            scratch -= prev
            prev, cur, scratch = cur, scratch, prev
            out[:, k] = const_vec + amps @ cur
    return out[0] if squeeze else out


def trig_series_at(const, amps, omegas, times, kind: str = "cos") -> np.ndarray:
    """Direct evaluation of the trigonometric sum at arbitrary times."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    fun = np.cos if kind == "cos" else np.sin
    out = np.full(times.shape, float(const))
    if omegas.size:
        chunk = max(1, int(4e6) // max(len(times), 1))
        for start in range(0, len(omegas), chunk):
            sl = slice(start, start + chunk)
            out += fun(np.outer(times, omegas[sl])) @ amps[sl]
    return out


@dataclass(frozen=True)
class SeriesTerms:
    """Aggregated trigonometric representation of one observable."""

    const: float
    amps: np.ndarray
    omegas: np.ndarray
    kind: str

    def at(self, times) -> np.ndarray:
        return trig_series_at(self.const, self.amps, self.omegas, times, self.kind)

    def on_grid(self, t0: float, dt: float, n: int) -> np.ndarray:
        return trig_series_uniform(self.const, self.amps, self.omegas, t0, dt, n, self.kind)


# ---------------------------------------------------------------------------
# The engine
# ---------------------------------------------------------------------------

class RefrigeratorEngine:
    """Immutable sector-resolved simulator for one parameter set.

    Spectra of all retained sectors are computed once at construction and
    cached; a parameter change means building a new engine.  All queries are
    pure, so concurrent reads are safe.

    ``series_amp_tol`` optionally compresses aggregated trigonometric
    series: the smallest-amplitude terms are dropped while their cumulative
    magnitude stays below ``series_amp_tol`` times the total magnitude,
    which bounds the absolute series error by the same relative amount.
    The default keeps every term.
    """

    def __init__(self, params: RefrigeratorParams,
                 prune_tol: float = DEFAULT_PRUNE_TOL,
                 series_amp_tol: float = 0.0):
        self.params = params
        self.prune_tol = prune_tol
        self.series_amp_tol = series_amp_tol
        pairs, idx, fractions, retained = _enumerate_arrays(params, prune_tol)
        self.retained_fraction = retained
        self.groups = _build_groups(params, pairs, idx, fractions)
        self.weight_total = float(sum(g.weights.sum() for g in self.groups))
        self._series_cache: dict[tuple, SeriesTerms] = {}

    # -- observables ----------------------------------------------------------

    def _diag_observable(self, group: SectorGroupData, key) -> np.ndarray:
        """Observable diagonal in the sector basis, shape (size, dim)."""
        kind, i = key
        k = i - 1
        bits = np.array([state[k] for state in group.basis], dtype=float)
        if kind == "pop":
            return np.broadcast_to(1.0 - bits, (group.size, group.dim))
        if kind == "hs":
            return np.broadcast_to(
                self.params.epsilon[k] * (bits - 0.5), (group.size, group.dim)
            )
        if kind == "hb":
            bath_level = group.m_values[:, k:k + 1] - (bits[None, :] - 0.5)
            return self.params.bath_energy[k] * bath_level
        raise KeyError(key)

    def _offdiag_observable(self, group: SectorGroupData, key) -> np.ndarray | None:
        """Dense coupling observable, shape (size, dim, dim); None if absent."""
        kind = key[0]
        if kind == "hsb":
            k = key[1] - 1
            if group.dims[k] != 2:
                return None
            o = np.zeros((group.size, group.dim, group.dim))
            for b, state in enumerate(group.basis):
                for c in range(b + 1, group.dim):
                    flips = [j for j in range(3) if state[j] != group.basis[c][j]]
                    if flips == [k]:
                        o[:, b, c] = group.u_values[k]
                        o[:, c, b] = group.u_values[k]
            return o
        if kind == "hint":
            if group.dims != (2, 2, 2) or self.params.g == 0.0:
                return None
            o = np.zeros((group.size, group.dim, group.dim))
            a = group.basis.index(_INTERACTION_BITS[0])
            b = group.basis.index(_INTERACTION_BITS[1])
            o[:, a, b] = self.params.g
            o[:, b, a] = self.params.g
            return o
        raise KeyError(key)

    def series_terms(self, key: tuple, kind: str) -> SeriesTerms:
        """Trig terms of Tr[rho(t) O] (kind="cos") or Tr[drho/dt O] ("sin").

        Keys: ("pop", i) ground projector of qubit i; ("hs", i) and
        ("hb", i) the local qubit/bath Hamiltonians; ("hsb", i) the XY
        coupling block; ("hint",) the collective interaction.  Values are
        normalized by the retained weight.
        """
        cache_key = (key, kind)
        if cache_key in self._series_cache:
            return self._series_cache[cache_key]
        const = 0.0
        amp_parts = []
        omega_parts = []
        for group in self.groups:
            if key[0] in ("pop", "hs", "hb"):
                diag = self._diag_observable(group, key)
                o_tilde = np.einsum(
                    "gka,gk,gkb->gab", group.vecs, diag, group.vecs, optimize=True
                )
            else:
                dense = self._offdiag_observable(group, key)
                if dense is None:
                    continue
                o_tilde = np.matmul(
                    np.matmul(group.vecs.transpose(0, 2, 1), dense), group.vecs
                )
            f = group.m_matrix * o_tilde
            if kind == "cos":
                const += float(np.dot(group.weights, np.trace(f, axis1=1, axis2=2)))
            if group.dim > 1:
                iu, ju = np.triu_indices(group.dim, k=1)
                gaps = group.lam[:, ju] - group.lam[:, iu]  # nonnegative
                pair_f = f[:, iu, ju]
                if kind == "cos":
                    amp = 2.0 * group.weights[:, None] * pair_f
                else:
                    amp = -2.0 * group.weights[:, None] * pair_f * gaps
                amp_parts.append(amp.ravel())
                omega_parts.append(gaps.ravel())
        amps = np.concatenate(amp_parts) if amp_parts else np.empty(0)
        omegas = np.concatenate(omega_parts) if omega_parts else np.empty(0)
        amps, omegas = self._compress(amps, omegas)
        scale = 1.0 / self.weight_total
        terms = SeriesTerms(const * scale, amps * scale, omegas, kind)
        self._series_cache[cache_key] = terms
        return terms

    def _compress(self, amps: np.ndarray, omegas: np.ndarray):
        if self.series_amp_tol <= 0.0 or amps.size == 0:
            return amps, omegas
        magnitude = np.abs(amps)
        order = np.argsort(magnitude, kind="stable")
        cum = np.cumsum(magnitude[order])
        n_drop = int(np.searchsorted(cum, self.series_amp_tol * cum[-1], side="left"))
        keep = np.sort(order[n_drop:])
        return amps[keep], omegas[keep]

    # -- populations and temperatures -------------------------------------------

    def ground_population(self, qubit: int, t: float) -> float:
        """Ground population r_i(t) of one qubit (1-based index)."""
        terms = self.series_terms(("pop", qubit), "cos")
        return float(terms.at([t])[0])

    def ground_population_series(self, qubit: int, times) -> np.ndarray:
        times = np.asarray(times, dtype=float)
        terms = self.series_terms(("pop", qubit), "cos")
        t0, dt, n = _uniform_grid(times)
        if n is not None:
            return terms.on_grid(t0, dt, n)
        return terms.at(times)

    def reduced_qubit_state(self, qubit: int, t: float) -> np.ndarray:
        r = self.ground_population(qubit, t)
        return np.diag([r, 1.0 - r])

    def temperature(self, qubit: int, t: float) -> float:
        r = np.array([self.ground_population(qubit, t)])
        return float(temperature_array(r, self.params.epsilon[qubit - 1])[0])

    def temperature_series(self, qubit: int, times) -> TimeSeries:
        times = np.asarray(times, dtype=float)
        r = self.ground_population_series(qubit, times)
        temperature = temperature_array(r, self.params.epsilon[qubit - 1])
        return TimeSeries(qubit, times, r, temperature)

    # -- per-sector evaluation (bath states and diagnostics) ---------------------

    def _group_rho_tilde(self, group: SectorGroupData, t: float) -> np.ndarray:
        phase = np.exp(-1j * group.lam * t)
        return group.m_matrix * (phase[:, :, None] * phase[:, None, :].conj())

    def _group_populations(self, group: SectorGroupData, t: float) -> np.ndarray:
        """Diagonal of rho(t) in the sector basis, shape (size, dim)."""
        return np.einsum(
            "gab,gka,gkb->gk",
            self._group_rho_tilde(group, t),
            group.vecs,
            group.vecs,
            optimize=True,
        ).real

    def reduced_bath_populations(self, bath: int, t: float) -> np.ndarray:
        """Bath level populations over m_B = -N/2..N/2 for one bath (1-based)."""
        k = bath - 1
        n = self.params.n_bath[k]
        pops = np.zeros(n + 1)
        for group in self.groups:
            diag = self._group_populations(group, t)
            two_m = np.rint(2.0 * group.m_values[:, k]).astype(int)
            for b, state in enumerate(group.basis):
                # ground bit pairs with level m + 1/2, excited with m - 1/2
                two_m_b = two_m + (1 if state[k] == 0 else -1)
                np.add.at(pops, (two_m_b + n) // 2, group.weights * diag[:, b])
        return pops / self.weight_total

    def total_trace(self, t: float) -> float:
        """Weighted total trace at time t; equals one up to rounding."""
        total = sum(
            float(np.dot(g.weights, self._group_populations(g, t).sum(axis=1)))
            for g in self.groups
        )
        return total / self.weight_total

    def conserved_charge(self, pair: int, t: float) -> float:
        """Weighted expectation of S^z_i + J^z_i, evaluated from rho(t)."""
        k = pair - 1
        total = sum(
            float(np.dot(
                g.weights * g.m_values[:, k],
                self._group_populations(g, t).sum(axis=1),
            ))
            for g in self.groups
        )
        return total / self.weight_total

    def total_energy(self, t: float) -> float:
        """Weighted Tr[rho(t) H] against the original-basis Hamiltonians."""
        total = 0.0
        for group in self.groups:
            rho_tilde = self._group_rho_tilde(group, t)
            rho = np.matmul(
                np.matmul(group.vecs.astype(complex), rho_tilde),
                group.vecs.transpose(0, 2, 1).astype(complex),
            )
            energies = np.einsum(
                "gab,gba->g", rho, group.hamiltonians.astype(complex)
            ).real
            total += float(np.dot(group.weights, energies))
        return total / self.weight_total


def _uniform_grid(times: np.ndarray):
    """(t0, dt, n) when ``times`` is a uniform ascending grid, else Nones."""
    if times.ndim != 1 or len(times) < 3:
        return None, None, None
    dt = times[1] - times[0]
    if dt <= 0:
        return None, None, None
    if np.max(np.abs(np.diff(times) - dt)) > 1e-12 * max(abs(dt), 1.0):
        return None, None, None
    return float(times[0]), float(dt), len(times)


# ---------------------------------------------------------------------------
# Public single-sector constructors
# ---------------------------------------------------------------------------

def build_sector_hamiltonian(
    params: RefrigeratorParams, label: TripleSectorLabel
) -> TripleSectorSystem:
    """Assemble one sector's Hamiltonian block, spectrum and initial state."""
    pairs = [_pair_sector_arrays(params.pair(i)) for i in (1, 2, 3)]
    sel = []
    for k in range(3):
        pos = np.where(pairs[k]["two_m"] == label.two_m[k])[0]
        if len(pos) != 1:
            raise ValueError(f"two_m={label.two_m[k]} is not a sector of pair {k + 1}")
        sel.append(pos)
    dims = tuple(int(pairs[k]["dim"][sel[k][0]]) for k in range(3))
    if dims != tuple(label.dims):
        raise ValueError(f"label dims {label.dims} disagree with parameters {dims}")
    sides = tuple(
        int(pairs[k]["edge_state"][sel[k][0]]) if dims[k] == 1 else 0 for k in range(3)
    )
    group = _make_group(params, pairs, sel, np.array([label.weight]), dims, sides)
    spectrum = Spectrum(group.lam[0].copy(), group.vecs[0].copy())
    return TripleSectorSystem(
        label, group.hamiltonians[0], spectrum, np.diag(group.p0[0])
    )


def initial_sector_state(
    params: RefrigeratorParams, label: TripleSectorLabel
) -> np.ndarray:
    """Unit-trace diagonal initial state of one sector."""
    return build_sector_hamiltonian(params, label).initial_state
