import numpy as np
import pytest

import isac_lab as il
from isac_lab.errors import DegeneracyError

C = il.SPEED_OF_LIGHT


def _problem(config, subcarriers, symbols, delay=50.0 / C,
             doppler=2 * 20.0 / C, beta=1.0 + 0j, noise=1.0):
    assignment = il.ResourceAssignment(ue_index=1, subcarriers=subcarriers,
                                       symbols=symbols)
    return il.FisherProblem(assignment=assignment, delay=delay,
                            doppler_ratio=doppler, beta=beta,
                            noise_power=noise, config=config)


class TestManifold:
    def test_zero_parameters_all_ones(self, config1):
        p = _problem(config1, (1, 5, 9), (1, 2), delay=0.0, doppler=0.0)
        assert np.allclose(il.build_manifold(p), 1.0)

    def test_full_cycle_phase_single_subcarrier(self, config1):
        delay = 1.0 / (3 * config1.subcarrier_spacing)
        p = _problem(config1, (3,), (1,), delay=delay, doppler=0.0)
        assert np.allclose(il.build_manifold(p), 1.0, atol=1e-12)

    def test_conjugate_symmetry(self, config1):
        p_pos = _problem(config1, (1, 4, 7), (1, 3, 5))
        p_neg = _problem(config1, (1, 4, 7), (1, 3, 5),
                         delay=-p_pos.delay, doppler=-p_pos.doppler_ratio)
        assert np.allclose(il.build_manifold(p_neg),
                           np.conj(il.build_manifold(p_pos)))

    def test_unit_modulus_and_entry_phase(self, config1):
        sub, sym = (2, 9, 30), (1, 7)
        p = _problem(config1, sub, sym)
        a = il.build_manifold(p)
        assert np.allclose(np.abs(a), 1.0)
        phases = -2 * np.pi * (
            config1.carrier_freq * (np.repeat(np.array(sym) - 1, 3))
            * config1.symbol_duration * p.doppler_ratio
            + np.tile(np.array(sub), 2) * config1.subcarrier_spacing * p.delay)
        assert np.allclose(np.angle(a), np.angle(np.exp(1j * phases)))

    def test_finite_difference_matches_analytic(self, config1):
        p = _problem(config1, il.TABLE1_SINGLE_UE["subband"],
                     il.TABLE1_SINGLE_UE["subband"])
        v = il.manifold_derivatives(p)
        h_tau, h_dop = 1e-9, 1e-12

        def manifold_at(delay, doppler):
            return il.build_manifold(_problem(
                config1, p.assignment.subcarriers, p.assignment.symbols,
                delay=delay, doppler=doppler))

        fd_tau = (manifold_at(p.delay + h_tau, p.doppler_ratio)
                  - manifold_at(p.delay - h_tau, p.doppler_ratio)) / (2 * h_tau)
        fd_dop = (manifold_at(p.delay, p.doppler_ratio + h_dop)
                  - manifold_at(p.delay, p.doppler_ratio - h_dop)) / (2 * h_dop)
        assert np.linalg.norm(fd_tau - v[:, 0]) <= 1e-4 * np.linalg.norm(v[:, 0])
        assert np.linalg.norm(fd_dop - v[:, 1]) <= 1e-4 * np.linalg.norm(v[:, 1])

    def test_richardson_difference_on_widest_lattice(self, config1):
        # fourth-order difference keeps truncation negligible even at the
        # largest delay phases of the pool
        p = _problem(config1, il.TABLE1_SINGLE_UE["edge-first"],
                     il.TABLE1_SINGLE_UE["interleaved"])
        v = il.manifold_derivatives(p)

        def manifold_at(delay):
            return il.build_manifold(_problem(
                config1, p.assignment.subcarriers, p.assignment.symbols,
                delay=delay, doppler=p.doppler_ratio))

        h = 1e-9
        fd = (8 * (manifold_at(p.delay + h) - manifold_at(p.delay - h))
              - (manifold_at(p.delay + 2 * h) - manifold_at(p.delay - 2 * h))) \
            / (12 * h)
        assert np.linalg.norm(fd - v[:, 0]) <= 1e-6 * np.linalg.norm(v[:, 0])


class TestProjectionResidual:
    def test_manifold_gram_is_lattice_size(self, config1):
        p = _problem(config1, (1, 4, 9, 20), (2, 5, 8))
        a = il.build_manifold(p)
        assert (a.conj() @ a).real == pytest.approx(12.0, rel=1e-14)

    def test_diagonal_structure(self, config1):
        p = _problem(config1, il.TABLE1_SINGLE_UE["interleaved"],
                     il.TABLE1_SINGLE_UE["subband"])
        res = il.projection_residual(p)
        zeta_var = il.index_variance(p.assignment.subcarriers)
        psi_var = il.index_variance(p.assignment.symbols)
        scale = 4 * np.pi ** 2 * 256
        assert res[0, 0].real == pytest.approx(
            scale * config1.subcarrier_spacing ** 2 * zeta_var, rel=1e-9)
        assert res[1, 1].real == pytest.approx(
            scale * (config1.carrier_freq * config1.symbol_duration) ** 2
            * psi_var, rel=1e-9)
        assert abs(res[0, 1]) <= 1e-9 * np.trace(res).real
        assert np.trace(res).real > 0

    def test_hand_computed_two_by_two(self, config1):
        # indices {1,2} x {1,2}: both variances are 1/4, lattice size 4,
        # so the residual is diag(pi^2 df^2 * 4, pi^2 (fc Ts)^2 * 4) exactly
        p = _problem(config1, (1, 2), (1, 2))
        res = il.projection_residual(p)
        df2 = config1.subcarrier_spacing ** 2
        fcts2 = (config1.carrier_freq * config1.symbol_duration) ** 2
        expected = np.diag([4 * np.pi ** 2 * df2, 4 * np.pi ** 2 * fcts2])
        assert np.allclose(res, expected, rtol=1e-12)

    def test_two_routes_agree(self, config1):
        from isac_lab.fisher import _projected_residual_numeric
        p = _problem(config1, (1, 3, 10, 31, 48), (2, 4, 9, 17))
        explicit = il.projection_residual(p)
        numeric = _projected_residual_numeric(p)
        # off-diagonals are pure cancellation noise; compare at trace scale
        scale = np.trace(explicit).real
        assert np.all(np.abs(numeric - explicit) <= 1e-9 * scale)
        assert np.diag(numeric).real == pytest.approx(np.diag(explicit).real,
                                                      rel=1e-9)


class TestFisherCrb:
    def test_matches_closed_forms(self, config1):
        rng = np.random.default_rng(3)
        for _ in range(10):
            n_k = int(rng.integers(2, 17))
            g_k = int(rng.integers(2, 17))
            sub = tuple(sorted(rng.choice(48, size=n_k, replace=False) + 1))
            sym = tuple(sorted(rng.choice(48, size=g_k, replace=False) + 1))
            beta = complex(rng.standard_normal(), rng.standard_normal()) or 1.0
            noise = float(rng.uniform(0.1, 10.0))
            p = _problem(config1, sub, sym, beta=beta, noise=noise)
            crb_r, crb_v = il.crb_range_velocity(p)
            inputs = il.CrbInputs(
                beta_power=abs(beta) ** 2, noise_power=noise, n_k=n_k, g_k=g_k,
                subcarrier_spacing=config1.subcarrier_spacing,
                carrier_freq=config1.carrier_freq,
                symbol_duration=config1.symbol_duration,
                zeta_variance=il.index_variance(sub),
                psi_variance=il.index_variance(sym))
            assert crb_r == pytest.approx(il.crb_range(inputs), rel=1e-9)
            assert crb_v == pytest.approx(il.crb_velocity(inputs), rel=1e-9)

    def test_normalized_identity(self, config1):
        p = _problem(config1, (1, 5, 9, 13), (2, 4, 6), beta=0.7 - 0.2j,
                     noise=2.5)
        crb = il.fisher_crb(p)
        zeta_var = il.index_variance(p.assignment.subcarriers)
        identity = crb[0, 0] * (8 * abs(p.beta) ** 2 * np.pi ** 2 * 12
                                * config1.subcarrier_spacing ** 2 * zeta_var
                                / p.noise_power)
        assert identity == pytest.approx(1.0, rel=1e-9)

    def test_symmetric_positive_definite(self, config1):
        p = _problem(config1, (1, 7, 20), (3, 9, 27))
        crb = il.fisher_crb(p)
        assert crb[0, 1] == pytest.approx(crb[1, 0])
        assert crb[0, 0] > 0 and crb[1, 1] > 0
        assert np.linalg.det(crb) > 0
        assert abs(crb[0, 1]) <= 1e-9 * np.trace(crb)

    def test_swapping_lattices_swaps_diagonal(self):
        # numerology chosen so df == fc*Ts exactly; swapping the subcarrier
        # and symbol sets must then swap the CRB diagonal
        n, df = 8, 1e5
        t_sam = 1.0 / (n * df)
        cfg = il.SystemConfig(
            n_subcarriers=n, subcarrier_spacing=df, carrier_freq=8e9,
            symbol_duration=10 * t_sam, cp_duration=2 * t_sam,
            sample_duration=t_sam, n_rx_antennas=1, n_tx_antennas=1,
            n_ues=1, n_symbols=8, antenna_spacing=1e-2, noise_power=1.0)
        assert cfg.carrier_freq * cfg.symbol_duration == pytest.approx(df, rel=1e-12)
        a = il.fisher_crb(_problem(cfg, (1, 2, 5), (1, 4, 6, 8)))
        b = il.fisher_crb(_problem(cfg, (1, 4, 6, 8), (1, 2, 5)))
        assert a[0, 0] == pytest.approx(b[1, 1], rel=1e-9)
        assert a[1, 1] == pytest.approx(b[0, 0], rel=1e-9)

    def test_reference_shift_invariance(self, config1):
        sub = (3, 9, 21, 33)
        shifted = tuple(i + 7 for i in sub)
        a = il.fisher_crb(_problem(config1, sub, (1, 5, 9)))
        b = il.fisher_crb(_problem(config1, shifted, (1, 5, 9)))
        assert np.allclose(a, b, rtol=1e-9)
        # the naive mean-square surrogate is NOT shift invariant
        ms = lambda idx: sum(i * i for i in idx) / len(idx)
        assert ms(sub) != ms(shifted)

    def test_monotone_in_subcarrier_variance(self, config1):
        sets = [il.TABLE1_SINGLE_UE["subband"],
                il.TABLE1_SINGLE_UE["interleaved"],
                il.TABLE1_SINGLE_UE["edge-first"]]
        sym = il.TABLE1_SINGLE_UE["subband"]
        crbs = [il.fisher_crb(_problem(config1, s, sym))[0, 0] for s in sets]
        variances = [il.index_variance(s) for s in sets]
        assert variances == sorted(variances)
        assert crbs == sorted(crbs, reverse=True)

    def test_degenerate_indices_rejected(self, config1):
        with pytest.raises(DegeneracyError):
            il.fisher_crb(_problem(config1, (5,), (1, 2)))
