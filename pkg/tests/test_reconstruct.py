import json
import warnings

import numpy as np
import pytest

from stokespace import (
    CoherentEnsemble,
    CoherentSpec,
    ConvergenceWarning,
    Grid3,
    NumericalError,
    VacuumSpec,
    classicality_check,
    coherent_stokes,
    default_tau,
    dual_grid,
    ensemble_from_json,
    gaussian_ensemble,
    gaussian_pess_exact,
    invert_to_pess,
    l1_distance,
    load_pess,
    make_state,
    mgf_imaginary_grid,
    pess_mc_oracle,
    save_pess,
    stokes_points,
)
from conftest import rng_for


def reconstruct(source, grid, tau, quiet=False, **kw):
    values = mgf_imaginary_grid(source, dual_grid(grid), tau)
    with warnings.catch_warnings():
        if quiet:  # point-like densities ring to the boundary by design
            warnings.simplefilter("ignore", ConvergenceWarning)
        return invert_to_pess(values, grid, tau, **kw)


class TestGrids:
    def test_validation(self):
        with pytest.raises(ValueError):
            Grid3((0.0, 0.0, 0.0), (1.0, 1.0, 0.5), (8, 8, 7))  # odd count
        with pytest.raises(ValueError):
            Grid3((0.0, 0.0, 0.0), (1.0, 1.0, 1.0), (8, 8, 6))  # too few
        with pytest.raises(ValueError):
            Grid3((0.0, 0.0, 0.0), (1.0, 0.0, 1.0), (8, 8, 8))  # empty axis

    def test_geometry(self):
        g = Grid3((-2.0, 0.0, 1.0), (2.0, 8.0, 3.0), (8, 16, 10))
        hx, hy, hz = g.spacing()
        assert (hx, hy, hz) == pytest.approx((4 / 7, 8 / 15, 2 / 9))
        assert g.cell_volume == pytest.approx(hx * hy * hz)
        ax = g.axes()
        assert ax[0][0] == -2.0 and ax[0][-1] == 2.0 and len(ax[1]) == 16

    def test_dual_grid_matches_fft_frequencies(self):
        g = Grid3.cube(4.0, 16)
        kg = dual_grid(g)
        h = g.spacing()[0]
        dk = 2.0 * np.pi / (16 * h)
        kx = kg.axes()[0]
        assert np.max(np.abs(np.diff(kx) - dk)) < 1e-12
        assert kx[8] == pytest.approx(0.0, abs=1e-12)  # n/2 bin sits at zero

    def test_default_tau(self):
        g = Grid3((-3.0, -4.0, 0.0), (3.0, 2.0, 12.0), (8, 8, 8))
        r = np.sqrt(9.0 + 16.0 + 144.0)
        assert default_tau(g) == pytest.approx(0.5 / r)


class TestEnsembles:
    def test_needs_a_source(self):
        with pytest.raises(ValueError):
            CoherentEnsemble()
        with pytest.raises(ValueError):
            CoherentEnsemble(weights=np.array([1.0]))

    def test_weight_validation(self):
        pts = np.array([[1.0, 0.0], [0.0, 1.0]], dtype=complex)
        with pytest.raises(ValueError):
            CoherentEnsemble(points=pts, weights=np.array([0.5, 0.6]))
        with pytest.raises(ValueError):
            CoherentEnsemble(points=pts, weights=np.array([1.2, -0.2]))

    def test_from_json(self):
        ens = ensemble_from_json({
            "points": [[{"re": 1.0, "im": 0.5}, 0.0], [0.5, {"re": 0.0, "im": -1.0}]],
            "weights": [0.25, 0.75],
        })
        assert ens.points.shape == (2, 2)
        assert ens.points[0, 0] == 1.0 + 0.5j
        assert ens.weights[1] == 0.75
        gauss = ensemble_from_json({"gaussian": {"sigma": 0.3, "mean_alpha": 1.0}})
        assert gauss.char_kernel is not None and gauss.sampler is not None
        with pytest.raises(ValueError):
            ensemble_from_json({"something": 1})

    def test_stokes_points_matches_single_pair(self):
        pairs = np.array([[0.8 + 0.1j, -0.3j], [1.0, 0.5]], dtype=complex)
        svec = stokes_points(pairs)
        for row, (a, b) in zip(svec, pairs):
            assert np.max(np.abs(row - coherent_stokes(a, b).S)) < 1e-14


class TestMgfGrid:
    def test_state_route_matches_analytic_kernel(self):
        # Fock-box route vs closed form for one coherent pair; |z| > 1 at
        # the grid corners makes the kernel sum tail-sensitive, so the
        # cutoff carries margin beyond the photon-number leakage bound
        alpha, beta = 0.6, 0.3j
        state = make_state(CoherentSpec(alpha, beta), cutoff=40)
        g = Grid3.cube(3.0, 8)
        kg = dual_grid(g)
        tau = default_tau(g)
        from_state = mgf_imaginary_grid(state, kg, tau)
        point = CoherentEnsemble(points=np.array([[alpha, beta]]))
        from_points = mgf_imaginary_grid(point, kg, tau)
        assert np.max(np.abs(from_state - from_points)) < 1e-8

    def test_gaussian_kernel_small_sigma_limit(self):
        g = Grid3.cube(3.0, 8)
        kg = dual_grid(g)
        narrow = gaussian_ensemble(1e-8, 1.1, 0.4 - 0.2j)
        point = CoherentEnsemble(points=np.array([[1.1, 0.4 - 0.2j]]))
        a = mgf_imaginary_grid(narrow, kg, 0.05)
        b = mgf_imaginary_grid(point, kg, 0.05)
        assert np.max(np.abs(a - b)) < 1e-6

    def test_sampler_route_warns_and_agrees(self):
        g = Grid3.cube(3.0, 8)
        kg = dual_grid(g)
        full = gaussian_ensemble(0.2, 0.8, 0.0)
        sampler_only = CoherentEnsemble(sampler=full.sampler)
        exact = mgf_imaginary_grid(full, kg, 0.1)
        with pytest.warns(UserWarning):
            noisy = mgf_imaginary_grid(sampler_only, kg, 0.1, n_samples=200000, seed=4)
        assert np.max(np.abs(noisy - exact)) < 0.02

    def test_hermitian_symmetry(self):
        state = make_state(CoherentSpec(0.5, 0.2), cutoff=14)
        kg = dual_grid(Grid3.cube(2.0, 8))
        m = mgf_imaginary_grid(state, kg, 0.1)
        flipped = m[1:, 1:, 1:][::-1, ::-1, ::-1]
        assert np.max(np.abs(flipped - np.conj(m[1:, 1:, 1:]))) < 1e-12

    def test_argument_validation(self):
        kg = dual_grid(Grid3.cube(2.0, 8))
        with pytest.raises(ValueError):
            mgf_imaginary_grid(gaussian_ensemble(0.5), kg, -0.1)
        with pytest.raises(ValueError):
            mgf_imaginary_grid(gaussian_ensemble(0.5), kg, 0.0)  # unbounded support
        with pytest.raises(TypeError):
            mgf_imaginary_grid("not a state", kg, 0.1)
        # a finite point list is bounded: tau = 0 is allowed there
        point = CoherentEnsemble(points=np.array([[0.5, 0.0]]))
        mgf_imaginary_grid(point, kg, 0.0)


class TestInversion:
    def test_vacuum_peaks_at_origin(self):
        state = make_state(VacuumSpec(), cutoff=2)
        g = Grid3.cube(2.0, 16)
        pess = reconstruct(state, g, tau=0.0, quiet=True)
        assert abs(pess.total_mass - 1.0) < 0.02
        peak_idx = np.unravel_index(np.argmax(pess.values), pess.values.shape)
        centers = [np.abs(ax).argmin() for ax in g.axes()]
        assert peak_idx == tuple(centers)
        assert pess.min_value > -0.05 * pess.peak

    def test_two_point_mixture_recovers_peaks_and_weights(self):
        pts = np.array([[1.5, 0.0], [0.0, 1.2]], dtype=complex)  # S_z = 2.25, -1.44
        ens = CoherentEnsemble(points=pts, weights=np.array([0.3, 0.7]))
        g = Grid3.cube(4.0, 32)
        pess = reconstruct(ens, g, tau=default_tau(g), quiet=True)
        zax = g.axes()[2]
        dens_z = pess.values.sum(axis=(0, 1)) * g.cell_volume / g.spacing()[2]
        # split the z marginal at zero: upper lobe mass 0.3, lower 0.7
        upper = dens_z[zax > 0].sum() * g.spacing()[2]
        lower = dens_z[zax < 0].sum() * g.spacing()[2]
        assert upper == pytest.approx(0.3, abs=0.02)
        assert lower == pytest.approx(0.7, abs=0.02)
        assert zax[dens_z.argmax()] == pytest.approx(-1.44, abs=g.spacing()[2])

    def test_zero_mean_gaussian_against_exact_density(self):
        g = Grid3.cube(8.0, 32)
        tau = default_tau(g)
        ens = gaussian_ensemble(1.0)
        pess = reconstruct(ens, g, tau)
        exact = gaussian_pess_exact(1.0, g)
        # the 1/S cusp limits pointwise agreement; mass transport stays small
        assert l1_distance(pess, exact) < 0.15
        assert abs(pess.total_mass - 1.0) < 0.01
        report = classicality_check(pess)
        assert report.essentially_classical

    def test_offset_gaussian_matches_histogram(self):
        ens = gaussian_ensemble(0.15, 1.4, 0.0)
        g = Grid3((-1.6, -1.6, 0.3), (1.6, 1.6, 3.7), (24, 24, 24))
        tau = default_tau(g)
        with warnings.catch_warnings():
            warnings.simplefilter("error")  # clean run: no mass or edge warnings
            pess = reconstruct(ens, g, tau)
        oracle = pess_mc_oracle(ens, g, n=300000, seed=8)
        assert l1_distance(pess, oracle) < 0.13
        assert abs(pess.total_mass - 1.0) < 0.01

    def test_corrupted_values_raise(self):
        state = make_state(VacuumSpec(), cutoff=2)
        g = Grid3.cube(2.0, 8)
        values = mgf_imaginary_grid(state, dual_grid(g), 0.1)
        values = values + 0.3j * np.arange(values.size).reshape(values.shape)
        with pytest.raises(NumericalError):
            invert_to_pess(values, g, 0.1)

    def test_mass_deviation_warns(self):
        state = make_state(VacuumSpec(), cutoff=2)
        g = Grid3.cube(2.0, 16)
        values = 1.5 * mgf_imaginary_grid(state, dual_grid(g), 0.0)
        with pytest.warns(ConvergenceWarning):
            pess = invert_to_pess(values, g, 0.0)
        assert abs(pess.total_mass - 1.5) < 0.03

    def test_boundary_mass_warns(self):
        # density centered at S_z = 2.25 on a grid that clips it
        ens = CoherentEnsemble(points=np.array([[1.5, 0.0]]))
        g = Grid3((-1.0, -1.0, -1.0), (1.0, 1.0, 2.3), (16, 16, 16))
        values = mgf_imaginary_grid(ens, dual_grid(g), 0.1)
        with pytest.warns(ConvergenceWarning):
            invert_to_pess(values, g, 0.1, norm_tol=10.0)

    def test_window_options(self):
        g = Grid3.cube(8.0, 32)
        tau = default_tau(g)
        values = mgf_imaginary_grid(gaussian_ensemble(1.0), dual_grid(g), tau)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ConvergenceWarning)
            bare = invert_to_pess(values, g, tau, window="none")
        assert bare.window == "none"
        assert abs(bare.total_mass - 1.0) < 0.01
        with pytest.raises(ValueError):
            invert_to_pess(values, g, tau, window="hamming")
        smooth = invert_to_pess(values, g, tau)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ConvergenceWarning)
            tight = invert_to_pess(values, g, tau, k_cut=0.8)
        # lower cutoff smears the cusp peak; no window rings the hardest
        assert tight.peak < smooth.peak < bare.peak

    def test_shape_mismatch_rejected(self):
        g = Grid3.cube(2.0, 8)
        with pytest.raises(ValueError):
            invert_to_pess(np.ones((8, 8, 6), dtype=complex), g, 0.1)


class TestOracleAndReports:
    def test_mc_oracle_needs_samples_and_a_source(self):
        g = Grid3.cube(2.0, 8)
        ens = CoherentEnsemble(points=np.array([[0.5, 0.0]]))
        with pytest.raises(ValueError):
            pess_mc_oracle(ens, g, n=100, seed=0)
        kernel_only = CoherentEnsemble(char_kernel=lambda k, tau: np.ones(len(k)))
        with pytest.raises(ValueError):
            pess_mc_oracle(kernel_only, g, n=20000, seed=0)

    def test_mc_oracle_deterministic(self):
        ens = gaussian_ensemble(0.5)
        g = Grid3.cube(3.0, 8)
        a = pess_mc_oracle(ens, g, n=20000, seed=3)
        b = pess_mc_oracle(ens, g, n=20000, seed=3)
        assert np.array_equal(a.values, b.values)
        assert a.label == "mc-histogram"

    def test_mc_oracle_weighted_points(self):
        pts = np.array([[1.0, 0.0], [0.0, 1.0]], dtype=complex)
        ens = CoherentEnsemble(points=pts, weights=np.array([0.2, 0.8]))
        g = Grid3.cube(2.0, 8)
        oracle = pess_mc_oracle(ens, g, n=50000, seed=1)
        mass = oracle.values * g.cell_volume
        assert mass.sum() == pytest.approx(1.0)
        # all mass sits in the two cells holding S = +-z
        assert np.sort(mass[mass > 0])[-2:] == pytest.approx([0.2, 0.8], abs=0.01)

    def test_classicality_check(self):
        g = Grid3.cube(1.0, 8)
        values = np.full(g.ns, 0.5)
        values[0, 0, 0] = -0.005  # 1% of the peak: inside the default 2% band
        from stokespace import PessGrid

        pess = PessGrid(grid=g, values=values, tau_used=0.0, window="none",
                        label="test")
        assert classicality_check(pess).essentially_classical
        assert not classicality_check(pess, tol=0.001).essentially_classical
        assert classicality_check(pess).min_value == pytest.approx(-0.005)
        with pytest.raises(ValueError):
            classicality_check(pess, tol=-1.0)

    def test_l1_distance_requires_matching_grids(self):
        a = gaussian_pess_exact(1.0, Grid3.cube(4.0, 8))
        b = gaussian_pess_exact(1.0, Grid3.cube(5.0, 8))
        with pytest.raises(ValueError):
            l1_distance(a, b)
        assert l1_distance(a, a) == 0.0

    def test_exact_gaussian_density_normalizes(self):
        # cell quadrature near the 1/|S| cusp keeps the Riemann mass ~1%
        # short at this resolution
        g = Grid3.cube(10.0, 48)
        exact = gaussian_pess_exact(1.0, g)
        assert abs(exact.total_mass - 1.0) < 0.02
        assert np.all(np.isfinite(exact.values))


class TestPessIO:
    def test_round_trip(self, tmp_path):
        g = Grid3((-2.0, -1.0, 0.0), (2.0, 3.0, 4.0), (8, 10, 12))
        rng = rng_for(5)
        values = rng.random(g.ns)
        from stokespace import PessGrid

        pess = PessGrid(grid=g, values=values, tau_used=0.07,
                        window="raised-cosine", label="fft-inversion")
        path = tmp_path / "density.bin"
        save_pess(pess, path)
        again = load_pess(path)
        assert np.array_equal(again.values, values)
        assert again.grid == g
        assert again.tau_used == 0.07
        assert again.window == "raised-cosine"
        assert again.label == "fft-inversion"
        # header is a single JSON line readable on its own
        with open(path, "rb") as fh:
            header = json.loads(fh.readline())
        assert header["ns"] == [8, 10, 12]
