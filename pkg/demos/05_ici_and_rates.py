# Why subcarrier placement is (almost) free for communications: the
# Doppler-induced inter-carrier interference is tiny at vehicular speeds,
# so achievable rates barely move across distribution schemes while the
# sensing bound moves by an order of magnitude.

import numpy as np

import isac_lab as il

# ---------------------------------------------------------------------------
# ICI magnitudes of the Doppler-perturbed demodulation matrix, N = 1024
# ---------------------------------------------------------------------------
n, df = 1024, 100e3
t_sam = 1.0 / (n * df)
config = il.SystemConfig(
    n_subcarriers=n, subcarrier_spacing=df, carrier_freq=28e9,
    symbol_duration=(n + 6) * t_sam, cp_duration=6 * t_sam,
    sample_duration=t_sam, n_rx_antennas=1, n_tx_antennas=1, n_ues=1,
    n_symbols=1, antenna_spacing=5e-3, noise_power=1e-2)
tau = 50.0 / config.speed_of_light

print("speed      max |off-diagonal|   (2v/c)(N-1) prediction")
for kmh in (0.0, 10.0, 20.0, 30.0):
    path = il.ChannelPath(gain=1.0, delay=tau, radial_velocity=kmh / 3.6,
                          aoa=1.0, aod=1.5)
    q = il.ici_matrix(path, config)
    pred = 2 * (kmh / 3.6) / config.speed_of_light * (n - 1)
    print(f"{kmh:4.0f} km/h  {q.max_off_diagonal():18.3e}   {pred:12.3e}")

# At rest the matrix is exactly the per-subcarrier delay phase:
path0 = il.ChannelPath(gain=1.0, delay=tau, radial_velocity=0.0, aoa=1.0, aod=1.5)
q0 = il.ici_matrix(path0, config).values
expected = np.diag(np.exp(-2j * np.pi * np.arange(n) * df * tau))
print(f"\nzero-velocity deviation from the phase diagonal: "
      f"{np.abs(q0 - expected).max():.1e}")

# ---------------------------------------------------------------------------
# Rates vs worst-case sensing bound across partition schemes (3 UEs)
# ---------------------------------------------------------------------------
cfg = il.desk_config()
channels = il.desk_channels(cfg)
snr_db = 20.0
print(f"\nscheme        sum rate (b/s/Hz)   worst-UE CRB(range) m^2")
for tag in ("subband", "interleaved", "edge-first"):
    assignments = il.scheme_assignments(il.SchemeKind(tag))
    data = il.random_qpsk_grid(cfg, assignments, seed=1)
    report = il.achievable_rates(channels, assignments, data, cfg,
                                 noise_power=cfg.n_rx_antennas
                                 * 10 ** (-snr_db / 10), n_draws=50)
    max_crb = max(
        il.crb_range(il.CrbInputs(
            beta_power=float(cfg.n_rx_antennas),
            noise_power=10 ** (-snr_db / 10),
            n_k=a.n_subcarriers, g_k=a.n_symbols,
            subcarrier_spacing=cfg.subcarrier_spacing,
            carrier_freq=cfg.carrier_freq, symbol_duration=cfg.symbol_duration,
            zeta_variance=il.index_variance(a.subcarriers),
            psi_variance=il.index_variance(a.symbols)))
        for a in assignments)
    print(f"{tag:12s}  {report.sum_rate():17.6f}   {max_crb:14.6e}")

print("\nthe rates are flat to a fraction of a percent; the sensing bound "
      "spans nearly an order of magnitude.")
