//! Monte Carlo harness: BER and secrecy-rate sweeps over channel
//! realizations and OFDM blocks, with the analytic bounds evaluated at the
//! same points.
//!
//! Random draws are keyed by `(master_seed, realization, block, purpose)`
//! and never by the sweep point, so every point of a sweep sees the same
//! channels, data, AN and unit-variance noise (common random numbers), and
//! a sweep is reproducible bit for bit whatever the thread count.

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::analytic::{self, AnalyticError, BoundInputs};
use crate::exec::Execution;
use crate::model::{
    complex_gaussian_vec, gen_spreading_code, noise_variance_from_ebn0_db, ChannelRealization,
    ModelError, Purpose, RngStream, SpreadingCode, SymbolBlock, SystemParams,
};
use crate::waveform::{self, AnVector, WaveformError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Waveform(#[from] WaveformError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
}

/// Monte Carlo configuration shared by all sweeps.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub params: SystemParams,
    pub realizations: usize,
    pub blocks: usize,
    pub master_seed: u64,
    /// Values of the swept variable: `Eb/N0` in dB for
    /// [`sweep_ber_vs_ebn0`], `alpha` for the other sweeps.
    pub axis: Vec<f64>,
    pub execution: Execution,
}

impl SimConfig {
    pub const DEFAULT_REALIZATIONS: usize = 100;
    pub const DEFAULT_BLOCKS: usize = 300;

    pub fn new(params: SystemParams, master_seed: u64) -> Self {
        Self {
            params,
            realizations: Self::DEFAULT_REALIZATIONS,
            blocks: Self::DEFAULT_BLOCKS,
            master_seed,
            axis: Vec::new(),
            execution: Execution::default(),
        }
    }

    pub fn with_counts(mut self, realizations: usize, blocks: usize) -> Self {
        self.realizations = realizations;
        self.blocks = blocks;
        self
    }

    pub fn with_axis(mut self, axis: Vec<f64>) -> Self {
        self.axis = axis;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    fn validate(&self) -> Result<(), SimError> {
        self.params.validate()?;
        if self.realizations == 0 || self.blocks == 0 {
            return Err(SimError::InvalidConfig(
                "realization and block counts must be positive".into(),
            ));
        }
        if self.axis.is_empty() {
            return Err(SimError::InvalidConfig("sweep axis is empty".into()));
        }
        Ok(())
    }

    fn check_alpha_axis(&self) -> Result<(), SimError> {
        match self.axis.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            Some(a) => Err(SimError::InvalidConfig(format!(
                "alpha axis value {a} not in [0, 1]"
            ))),
            None => Ok(()),
        }
    }
}

/// Per-block channel-dependent quantities of one link run.
#[derive(Debug, Clone, PartialEq)]
pub struct PerRealizationStats {
    /// Bob's focusing gains `K_n`.
    pub k_n: Vec<f64>,
    /// `Z_n = sum_i H_E H_B^*` over the subcarriers of symbol `n`.
    pub z_n: Vec<Complex64>,
    /// `|A_1,n|^2`, AN power leaking into Eve's symbol `n`.
    pub an_interference_power: Vec<f64>,
    /// `|A_2,n|^2 = alpha |Z_n / U|^2`, useful power at Eve.
    pub useful_power: Vec<f64>,
}

/// Outcome of one block through the full chain.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkOutcome {
    pub bob_bits: Vec<u8>,
    pub eve_bits: Vec<u8>,
    pub stats: PerRealizationStats,
    /// Symbols decoded by coin flip because Bob's ZF was singular
    /// (only when `alpha = 0`).
    pub bob_singular: Vec<usize>,
    /// Symbols decoded by coin flip because Eve's ZF was singular.
    pub eve_singular: Vec<usize>,
}

/// Channel state of one realization with its derived gains.
#[derive(Debug, Clone)]
pub struct Realization {
    pub code: SpreadingCode,
    pub h_b: ChannelRealization,
    pub h_e: ChannelRealization,
    pub k_n: Vec<f64>,
    pub z_n: Vec<Complex64>,
}

impl Realization {
    pub fn new(code: SpreadingCode, h_b: ChannelRealization, h_e: ChannelRealization) -> Self {
        let k_n = waveform::bob_gains(&code, &h_b);
        let z_n = waveform::eve_gains(&code, &h_b, &h_e);
        Self {
            code,
            h_b,
            h_e,
            k_n,
            z_n,
        }
    }

    /// Spreading code and both Rayleigh channels drawn from the
    /// realization's stream.
    pub fn draw(params: &SystemParams, root: RngStream) -> Result<Self, SimError> {
        let code = gen_spreading_code(params, root.lane(None, Purpose::SpreadingCode))?;
        let h_b = ChannelRealization::rayleigh(
            params.q_subcarriers,
            root.lane(None, Purpose::BobChannel),
        );
        let h_e = ChannelRealization::rayleigh(
            params.q_subcarriers,
            root.lane(None, Purpose::EveChannel),
        );
        Ok(Self::new(code, h_b, h_e))
    }
}

/// Everything random in one block except the data: AN, unit-variance noise
/// for both receivers, and coin-flip bits for singular symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDraws {
    pub an: AnVector,
    pub bob_noise: Vec<Complex64>,
    pub eve_noise: Vec<Complex64>,
    pub coins: Vec<u8>,
}

impl BlockDraws {
    pub fn draw(
        params: &SystemParams,
        real: &Realization,
        root: RngStream,
        block: u64,
    ) -> Result<Self, SimError> {
        let q = params.q_subcarriers;
        let lane = |p| root.lane(Some(block), p);
        let an = if params.bor >= 2 {
            waveform::synth_an(
                &real.code,
                &real.h_b,
                params,
                lane(Purpose::ArtificialNoise),
            )?
        } else {
            AnVector {
                w: vec![Complex64::new(0.0, 0.0); q],
            }
        };
        let bob_noise = complex_gaussian_vec(&mut lane(Purpose::BobNoise).rng(), q);
        let eve_noise = complex_gaussian_vec(&mut lane(Purpose::EveNoise).rng(), q);
        let mut coin_rng = lane(Purpose::CoinFlips).rng();
        let coins = (0..4 * params.n_symbols)
            .map(|_| u8::from(coin_rng.random::<bool>()))
            .collect();
        Ok(Self {
            an,
            bob_noise,
            eve_noise,
            coins,
        })
    }
}

fn decide(equalized: &[Complex64], singular: &[usize], coins: &[u8]) -> Vec<u8> {
    let mut bits = crate::model::qam4_demodulate(equalized);
    for &n in singular {
        bits[2 * n] = coins[2 * n];
        bits[2 * n + 1] = coins[2 * n + 1];
    }
    bits
}

/// Runs one block through the chain with pre-drawn randomness.
pub fn run_link(
    params: &SystemParams,
    real: &Realization,
    block: &SymbolBlock,
    draws: &BlockDraws,
) -> Result<LinkOutcome, SimError> {
    let alpha = params.alpha;
    let n = params.n_symbols;
    let precoded = waveform::modulate_block(&real.code, &real.h_b, block)?;
    let tx = waveform::assemble_tx(alpha, &precoded, &draws.an)?;
    let rx_b =
        waveform::apply_channel_with_noise(&real.h_b, &tx, params.sigma2_vb, &draws.bob_noise)?;
    let rx_e =
        waveform::apply_channel_with_noise(&real.h_e, &tx, params.sigma2_ve, &draws.eve_noise)?;

    let all: Vec<usize> = (0..n).collect();
    let (bob_eq, bob_singular) = if alpha == 0.0 {
        (vec![Complex64::new(0.0, 0.0); n], all.clone())
    } else {
        let obs = waveform::receive_bob(&real.code, &real.h_b, &rx_b, alpha)?;
        (obs.equalized, obs.singular)
    };
    let (eve_eq, eve_singular) = if alpha == 0.0 {
        (vec![Complex64::new(0.0, 0.0); n], all)
    } else {
        let obs = waveform::receive_eve(&real.code, &real.h_b, &real.h_e, &rx_e, alpha)?;
        (obs.equalized, obs.singular)
    };
    let (bob_coins, eve_coins) = draws.coins.split_at(2 * n);
    let bob_bits = decide(&bob_eq, &bob_singular, bob_coins);
    let eve_bits = decide(&eve_eq, &eve_singular, eve_coins);

    let an_at_eve = waveform::despread(
        &real.code,
        &waveform::apply_channel(&real.h_e, &draws.an.w)?,
    )?;
    let u = params.bor as f64;
    let stats = PerRealizationStats {
        k_n: real.k_n.clone(),
        z_n: real.z_n.clone(),
        an_interference_power: an_at_eve
            .iter()
            .map(|a| (1.0 - alpha) * a.norm_sqr())
            .collect(),
        useful_power: real
            .z_n
            .iter()
            .map(|z| alpha * (z / u).norm_sqr())
            .collect(),
    };
    Ok(LinkOutcome {
        bob_bits,
        eve_bits,
        stats,
        bob_singular,
        eve_singular,
    })
}

/// Draws AN, noise and coin flips for `block` of the realization keyed by
/// `root`, then runs the chain: spread, precode, add AN, both channels with
/// independent noise, ZF at Bob and Eve, hard decisions.
pub fn simulate_link_once(
    params: &SystemParams,
    code: &SpreadingCode,
    h_b: &ChannelRealization,
    h_e: &ChannelRealization,
    block: &SymbolBlock,
    root: RngStream,
    block_index: u64,
) -> Result<LinkOutcome, SimError> {
    params.validate()?;
    let real = Realization::new(code.clone(), h_b.clone(), h_e.clone());
    let draws = BlockDraws::draw(params, &real, root, block_index)?;
    run_link(params, &real, block, &draws)
}

/// Genie per-symbol SINRs: `gamma_B,n = alpha K_n^2 / sigma2_vb` and
/// `gamma_E,n = |A_2,n|^2 / (sigma2_ve + |A_1,n|^2)`.
pub fn empirical_sinrs(stats: &PerRealizationStats, params: &SystemParams) -> (Vec<f64>, Vec<f64>) {
    let gamma_b = stats
        .k_n
        .iter()
        .map(|k| params.alpha * k * k / params.sigma2_vb)
        .collect();
    let gamma_e = stats
        .useful_power
        .iter()
        .zip(&stats.an_interference_power)
        .map(|(s, i)| s / (params.sigma2_ve + i))
        .collect();
    (gamma_b, gamma_e)
}

/// One row of a sweep table.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub bor: usize,
    pub alpha: f64,
    pub ebn0_db: Option<f64>,
    pub sigma2_vb: f64,
    pub sigma2_ve: f64,
    pub bob_ber: f64,
    pub eve_ber: f64,
    /// Standard errors of the BERs across realizations.
    pub bob_ber_se: f64,
    pub eve_ber_se: f64,
    pub sinr_bob_emp: f64,
    pub sinr_eve_emp: f64,
    pub sinr_bob_emp_se: f64,
    pub sinr_eve_emp_se: f64,
    /// Mean per-symbol `log2(1 + gamma_B) - log2(1 + gamma_E)`.
    pub sr_emp: f64,
    pub sr_emp_se: f64,
    /// Same with each per-symbol difference clamped at zero.
    pub sr_emp_clamped: f64,
    /// `None` where the closed form is undefined (log argument <= 0).
    pub sr_bound: Option<f64>,
    pub sinr_bob_bound: Option<f64>,
    pub sinr_eve_bound: Option<f64>,
    pub bits: u64,
    pub bob_errors: u64,
    pub eve_errors: u64,
    pub bob_skipped: u64,
    pub eve_skipped: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct LinkPoint {
    alpha: f64,
    ebn0_db: Option<f64>,
    sigma2_vb: f64,
    sigma2_ve: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    bits: u64,
    bob_errors: u64,
    eve_errors: u64,
    bob_skipped: u64,
    eve_skipped: u64,
    sum_gamma_b: f64,
    n_gamma_b: u64,
    sum_gamma_e: f64,
    sum_sr: f64,
    sum_sr_clamped: f64,
    n_eve: u64,
}

fn count_errors(a: &[u8], b: &[u8]) -> u64 {
    a.iter().zip(b).filter(|(x, y)| x != y).count() as u64
}

fn simulate_realization(
    params: &SystemParams,
    seed: u64,
    r: usize,
    blocks: usize,
    points: &[LinkPoint],
) -> Result<Vec<Tally>, SimError> {
    let root = RngStream::new(seed, r as u64);
    let real = Realization::draw(params, root)?;
    let point_params: Vec<SystemParams> = points
        .iter()
        .map(|p| SystemParams {
            alpha: p.alpha,
            sigma2_vb: p.sigma2_vb,
            sigma2_ve: p.sigma2_ve,
            ..*params
        })
        .collect();
    let mut tallies = vec![Tally::default(); points.len()];
    // SINR at a symbol whose Eve coefficient is singular is dominated by the
    // ZF blow-up; those symbols are left out of the averages.
    let u = params.bor as f64;
    let eve_skip: Vec<bool> = real
        .z_n
        .iter()
        .map(|z| z.norm() / u < waveform::EVE_GAIN_FLOOR)
        .collect();
    for b in 0..blocks as u64 {
        let data = SymbolBlock::random(params.n_symbols, root.lane(Some(b), Purpose::DataBits));
        let draws = BlockDraws::draw(params, &real, root, b)?;
        for (p, t) in point_params.iter().zip(tallies.iter_mut()) {
            let out = run_link(p, &real, &data, &draws)?;
            t.bits += data.bits.len() as u64;
            t.bob_errors += count_errors(&out.bob_bits, &data.bits);
            t.eve_errors += count_errors(&out.eve_bits, &data.bits);
            t.bob_skipped += out.bob_singular.len() as u64;
            t.eve_skipped += out.eve_singular.len() as u64;

            let (gamma_b, gamma_e) = empirical_sinrs(&out.stats, p);
            for n in 0..params.n_symbols {
                t.sum_gamma_b += gamma_b[n];
                t.n_gamma_b += 1;
                if eve_skip[n] {
                    continue;
                }
                let diff = (gamma_b[n].ln_1p() - gamma_e[n].ln_1p()) / std::f64::consts::LN_2;
                t.sum_gamma_e += gamma_e[n];
                t.sum_sr += diff;
                t.sum_sr_clamped += diff.max(0.0);
                t.n_eve += 1;
            }
        }
    }
    Ok(tallies)
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn ratio(num: f64, den: u64) -> f64 {
    if den == 0 {
        f64::NAN
    } else {
        num / den as f64
    }
}

fn run_points(cfg: &SimConfig, points: &[LinkPoint]) -> Result<Vec<SweepPoint>, SimError> {
    let params = &cfg.params;
    let per_real: Vec<Vec<Tally>> = cfg
        .execution
        .map(cfg.realizations, |r| {
            simulate_realization(params, cfg.master_seed, r, cfg.blocks, points)
        })
        .into_iter()
        .collect::<Result<_, _>>()?;

    let a_const = if params.bor >= 2 {
        analytic::const_a(params.bor as u32, params.bessel_terms as u32).ok()
    } else {
        None
    };

    points
        .iter()
        .enumerate()
        .map(|(i, pt)| {
            let column: Vec<&Tally> = per_real.iter().map(|t| &t[i]).collect();
            let series =
                |f: &dyn Fn(&Tally) -> f64| column.iter().map(|t| f(t)).collect::<Vec<f64>>();
            let (bob_ber, bob_ber_se) =
                mean_and_se(&series(&|t| ratio(t.bob_errors as f64, t.bits)));
            let (eve_ber, eve_ber_se) =
                mean_and_se(&series(&|t| ratio(t.eve_errors as f64, t.bits)));
            let (sinr_bob_emp, sinr_bob_emp_se) =
                mean_and_se(&series(&|t| ratio(t.sum_gamma_b, t.n_gamma_b)));
            let (sinr_eve_emp, sinr_eve_emp_se) =
                mean_and_se(&series(&|t| ratio(t.sum_gamma_e, t.n_eve)));
            let (sr_emp, sr_emp_se) = mean_and_se(&series(&|t| ratio(t.sum_sr, t.n_eve)));
            let (sr_emp_clamped, _) = mean_and_se(&series(&|t| ratio(t.sum_sr_clamped, t.n_eve)));
            let total = |f: &dyn Fn(&Tally) -> u64| column.iter().map(|t| f(t)).sum::<u64>();

            let inputs = BoundInputs::new(
                params.bor as u32,
                pt.alpha,
                pt.sigma2_vb,
                pt.sigma2_ve,
                params.sigma2_an,
                params.bessel_terms as u32,
            )
            .ok();
            let bounds = inputs.filter(|_| a_const.is_some());
            Ok(SweepPoint {
                bor: params.bor,
                alpha: pt.alpha,
                ebn0_db: pt.ebn0_db,
                sigma2_vb: pt.sigma2_vb,
                sigma2_ve: pt.sigma2_ve,
                bob_ber,
                eve_ber,
                bob_ber_se,
                eve_ber_se,
                sinr_bob_emp,
                sinr_eve_emp,
                sinr_bob_emp_se,
                sinr_eve_emp_se,
                sr_emp,
                sr_emp_se,
                sr_emp_clamped,
                sr_bound: bounds
                    .as_ref()
                    .and_then(|b| analytic::secrecy_rate_bound(b).ok()),
                sinr_bob_bound: inputs
                    .as_ref()
                    .and_then(|b| analytic::sinr_bob_bound(b).ok()),
                sinr_eve_bound: bounds
                    .as_ref()
                    .and_then(|b| analytic::sinr_eve_bound(b).ok()),
                bits: total(&|t| t.bits),
                bob_errors: total(&|t| t.bob_errors),
                eve_errors: total(&|t| t.eve_errors),
                bob_skipped: total(&|t| t.bob_skipped),
                eve_skipped: total(&|t| t.eve_skipped),
            })
        })
        .collect()
}

/// BER against `Eb/N0` (`cfg.axis`, dB) for each power split in `alphas`.
/// Rows are ordered by `Eb/N0`, then by `alpha`.
pub fn sweep_ber_vs_ebn0(cfg: &SimConfig, alphas: &[f64]) -> Result<Vec<SweepPoint>, SimError> {
    cfg.validate()?;
    if let Some(a) = alphas.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(SimError::InvalidConfig(format!("alpha {a} not in [0, 1]")));
    }
    if let Some(e) = cfg.axis.iter().find(|e| !e.is_finite()) {
        return Err(SimError::InvalidConfig(format!(
            "Eb/N0 value {e} is not finite"
        )));
    }
    let points: Vec<LinkPoint> = cfg
        .axis
        .iter()
        .flat_map(|&ebn0| {
            let s2 = noise_variance_from_ebn0_db(ebn0);
            alphas.iter().map(move |&alpha| LinkPoint {
                alpha,
                ebn0_db: Some(ebn0),
                sigma2_vb: s2,
                sigma2_ve: s2,
            })
        })
        .collect();
    run_points(cfg, &points)
}

/// BER against `alpha` (`cfg.axis`) at a fixed `Eb/N0`.
pub fn sweep_ber_vs_alpha(cfg: &SimConfig, ebn0_db: f64) -> Result<Vec<SweepPoint>, SimError> {
    cfg.validate()?;
    cfg.check_alpha_axis()?;
    let s2 = noise_variance_from_ebn0_db(ebn0_db);
    let points: Vec<LinkPoint> = cfg
        .axis
        .iter()
        .map(|&alpha| LinkPoint {
            alpha,
            ebn0_db: Some(ebn0_db),
            sigma2_vb: s2,
            sigma2_ve: s2,
        })
        .collect();
    run_points(cfg, &points)
}

/// Empirical and analytic secrecy rate against `alpha` (`cfg.axis`), with
/// the noise variances of `cfg.params`.
pub fn sweep_sr_vs_alpha(cfg: &SimConfig) -> Result<Vec<SweepPoint>, SimError> {
    cfg.validate()?;
    cfg.check_alpha_axis()?;
    let points: Vec<LinkPoint> = cfg
        .axis
        .iter()
        .map(|&alpha| LinkPoint {
            alpha,
            ebn0_db: None,
            sigma2_vb: cfg.params.sigma2_vb,
            sigma2_ve: cfg.params.sigma2_ve,
        })
        .collect();
    run_points(cfg, &points)
}

/// Grid maximizer of the empirical secrecy rate.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalOptimum {
    pub alpha_star: f64,
    pub sr_max: f64,
    pub curve: Vec<SweepPoint>,
}

/// Runs [`sweep_sr_vs_alpha`] over `alpha_grid` and returns the grid point
/// with the largest `sr_emp` (first one on ties).
pub fn empirical_alpha_opt(
    cfg: &SimConfig,
    alpha_grid: &[f64],
) -> Result<EmpiricalOptimum, SimError> {
    let cfg = cfg.clone().with_axis(alpha_grid.to_vec());
    let curve = sweep_sr_vs_alpha(&cfg)?;
    let best = curve
        .iter()
        .fold(None::<&SweepPoint>, |best, p| match best {
            Some(b) if b.sr_emp >= p.sr_emp => Some(b),
            _ => Some(p),
        })
        .expect("non-empty grid");
    Ok(EmpiricalOptimum {
        alpha_star: best.alpha,
        sr_max: best.sr_emp,
        curve,
    })
}

/// `0, step, 2 step, ..., 1` with the last point pinned to exactly 1.
pub fn alpha_grid(step: f64) -> Vec<f64> {
    let n = (1.0 / step).round() as usize;
    (0..=n)
        .map(|i| (i as f64 * step).min(1.0))
        .map(|a| if (a - 1.0).abs() < 1e-12 { 1.0 } else { a })
        .collect()
}
