"""Brute-force dense model: construction, evolution, partial traces, sector maps."""

import math

import numpy as np
import pytest

from spinfridge import oracle
from spinfridge.engine import (
    RefrigeratorParams,
    build_sector_hamiltonian,
    enumerate_triple_sectors,
)
from spinfridge.spinstar import SingleStarParams, sector_hamiltonian, sector_labels
from spinfridge.spinstar import SectorCoupling


def single(n=1, **kw):
    defaults = dict(epsilon=1.0, bath_energy=2.0, coupling=0.5, beta=1.0)
    defaults.update(kw)
    return SingleStarParams(n_bath=n, **defaults)


def fridge(n=(1, 1, 1), **kw):
    defaults = dict(
        epsilon=(1.0, 2.0, 1.0),
        bath_energy=(2.0, 4.0, 2.0),
        coupling=(0.5, 0.4, 0.3),
        g=0.05,
        beta=(1.0, 1.0, 0.5),
    )
    defaults.update(kw)
    return RefrigeratorParams(n_bath=n, **defaults)


class TestBuildDense:
    def test_single_star_n1_ladder_factors(self):
        model = oracle.build_dense(single(n=1))
        assert model.dimension == 4
        # spin-1/2 ladder: <up,down| H_SB |down,up> = A * 1
        h = model.hamiltonian
        # basis: (qubit, bath) with qubit-major ordering, bath m_B in {-1/2, +1/2}
        idx_down_up = 0 * 2 + 1
        idx_up_down = 1 * 2 + 0
        assert h[idx_up_down, idx_down_up] == pytest.approx(0.5)
        assert np.max(np.abs(h - h.T)) == 0.0

    def test_single_star_spectrum_is_union_of_sector_spectra(self):
        p = single(n=2)
        model = oracle.build_dense(p)
        dense = np.sort(np.linalg.eigvalsh(model.hamiltonian))
        collected = []
        for two_m in sector_labels(p):
            block = sector_hamiltonian(p, two_m)
            if isinstance(block, SectorCoupling):
                collected.extend(np.linalg.eigvalsh(block.matrix()))
            else:
                collected.append(block.energy)
        assert np.allclose(dense, np.sort(collected), atol=1e-12)

    def test_refrigerator_dimension(self):
        assert oracle.build_dense(fridge()).dimension == 64
        assert oracle.build_dense(fridge(n=(2, 1, 1))).dimension == 96

    def test_dimension_cap_names_requirement(self):
        with pytest.raises(ValueError, match="1728"):
            oracle.build_dense(fridge(n=(5, 5, 5)))  # (2 * 6)^3 = 1728

    def test_initial_state_is_normalized_thermal(self):
        model = oracle.build_dense(single(n=3, beta=0.7))
        rho = model.initial_state
        assert np.trace(rho) == pytest.approx(1.0, abs=1e-13)
        assert np.max(np.abs(rho - np.diag(np.diag(rho)))) == 0.0


class TestSectorEmbedding:
    def test_sector_dimensions_cover_dense_space(self):
        p = fridge(n=(2, 1, 1))
        sectors = enumerate_triple_sectors(p, 0.0)
        total = sum(label.dimension for label in sectors.labels)
        assert total == oracle.build_dense(p).dimension

    def test_dense_hamiltonian_restricted_to_sectors(self):
        p = fridge(n=(2, 1, 1))
        model = oracle.build_dense(p)
        for label in enumerate_triple_sectors(p, 0.0).labels:
            idx = oracle.sector_basis_indices(p, label.two_m)
            assert len(idx) == label.dimension
            block = model.hamiltonian[np.ix_(idx, idx)]
            system = build_sector_hamiltonian(p, label)
            assert np.max(np.abs(block - system.hamiltonian)) < 1e-12

    def test_single_star_sector_blocks_match(self):
        p = single(n=3)
        model = oracle.build_dense(p)
        for two_m in sector_labels(p):
            idx = oracle.sector_basis_indices(p, two_m)
            block = model.hamiltonian[np.ix_(idx, idx)]
            expected = sector_hamiltonian(p, two_m)
            if isinstance(expected, SectorCoupling):
                assert np.max(np.abs(block - expected.matrix())) < 1e-12
            else:
                assert block[0, 0] == pytest.approx(expected.energy, abs=1e-12)

    def test_off_sector_blocks_vanish(self):
        p = fridge(n=(1, 1, 1))
        model = oracle.build_dense(p)
        labels = enumerate_triple_sectors(p, 0.0).labels
        idx_a = oracle.sector_basis_indices(p, labels[0].two_m)
        idx_b = oracle.sector_basis_indices(p, labels[5].two_m)
        assert np.max(np.abs(model.hamiltonian[np.ix_(idx_a, idx_b)])) == 0.0


class TestEvolution:
    def test_thermal_marginals_at_t0(self):
        p = single(n=2, beta=1.2)
        model = oracle.build_dense(p)
        spin = oracle.dense_evolve_and_trace(model, 0.0, 0)
        z = 2.0 * math.cosh(0.6)
        assert spin[0, 0].real == pytest.approx(math.exp(0.6) / z, abs=1e-12)

    def test_group_property(self):
        p = single(n=3)
        model = oracle.build_dense(p)
        spectrum = model.spectrum()
        one = oracle.dense_evolve(model, 1.3, spectrum=spectrum)
        import spinfridge.linalg as linalg

        stepped = linalg.evolve_density(model.hamiltonian, one, 2.1, spectrum=spectrum)
        direct = oracle.dense_evolve(model, 3.4, spectrum=spectrum)
        assert np.max(np.abs(stepped - direct)) < 1e-10

    def test_subsystem_selector_bounds(self):
        model = oracle.build_dense(single(n=1))
        with pytest.raises(ValueError, match="subsystem"):
            oracle.dense_evolve_and_trace(model, 0.0, 5)

    def test_partial_trace_partitions_unity(self):
        p = fridge(n=(1, 1, 1))
        model = oracle.build_dense(p)
        spectrum = model.spectrum()
        rho_q2 = oracle.dense_evolve_and_trace(model, 1.7, 2, spectrum=spectrum)
        assert np.trace(rho_q2).real == pytest.approx(1.0, abs=1e-12)
        assert rho_q2.shape == (2, 2)

    def test_unsupported_params_type(self):
        with pytest.raises(TypeError):
            oracle.build_dense(42)
