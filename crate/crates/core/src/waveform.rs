//! Frequency-domain transmit and receive chain: spreading, TR precoding,
//! artificial-noise synthesis in the null space of Bob's effective channel,
//! power split, channel plus AWGN, despreading and zero-forcing at Bob and
//! Eve.

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::model::{
    complex_gaussian, complex_gaussian_vec, ChannelRealization, RngStream, SpreadingCode,
    SymbolBlock, SystemParams,
};

/// Below this magnitude a channel gain is not used as the solved AN entry.
pub const PIVOT_FLOOR: f64 = 1e-6;
/// Smallest `K_n` Bob will divide by.
pub const BOB_GAIN_FLOOR: f64 = 1e-12;
/// Smallest `|Z_n| / U` Eve will divide by.
pub const EVE_GAIN_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WaveformError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("AN synthesis needs bor >= 2, got {0}")]
    InsufficientSpreading(usize),
    #[error("all {bor} channel gains of symbol group {group} are below {PIVOT_FLOOR}")]
    DegenerateChannel { group: usize, bor: usize },
    #[error("alpha = {0} outside [0, 1]")]
    AlphaOutOfRange(f64),
    #[error("zero-forcing equalizer is singular at symbol {symbol}")]
    SingularEqualizer { symbol: usize },
}

fn check_len(expected: usize, got: usize) -> Result<(), WaveformError> {
    if expected == got {
        Ok(())
    } else {
        Err(WaveformError::DimensionMismatch { expected, got })
    }
}

fn check_alpha(alpha: f64) -> Result<(), WaveformError> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(WaveformError::AlphaOutOfRange(alpha))
    }
}

/// AN vector `W`, built so that `S^H H_B W = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnVector {
    pub w: Vec<Complex64>,
}

/// Transmitted frequency-domain samples `X_TR`.
#[derive(Debug, Clone, PartialEq)]
pub struct TxFrame {
    pub samples: Vec<Complex64>,
}

impl TxFrame {
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|x| x.norm_sqr()).sum()
    }
}

/// Receiver output after despreading and zero forcing.
#[derive(Debug, Clone, PartialEq)]
pub struct RxObservation {
    pub despread: Vec<Complex64>,
    pub equalized: Vec<Complex64>,
    /// Symbols whose ZF coefficient fell below the floor. Their equalized
    /// value is left at zero and carries no information.
    pub singular: Vec<usize>,
}

/// `S X`: symbol `n` is repeated on subcarriers `n + iN` with sign and a
/// `1/sqrt(U)` scale.
pub fn spread(
    code: &SpreadingCode,
    symbols: &[Complex64],
) -> Result<Vec<Complex64>, WaveformError> {
    let n = code.n_symbols();
    check_len(n, symbols.len())?;
    let scale = 1.0 / (code.bor() as f64).sqrt();
    Ok((0..code.q_subcarriers())
        .map(|q| symbols[q % n] * (code.sign(q) * scale))
        .collect())
}

/// `S^H y`.
pub fn despread(code: &SpreadingCode, y: &[Complex64]) -> Result<Vec<Complex64>, WaveformError> {
    check_len(code.q_subcarriers(), y.len())?;
    let n = code.n_symbols();
    let scale = 1.0 / (code.bor() as f64).sqrt();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (q, &v) in y.iter().enumerate() {
        out[q % n] += v * code.sign(q);
    }
    out.iter_mut().for_each(|v| *v *= scale);
    Ok(out)
}

/// TR precoding `H_B^* x`.
pub fn precode(
    h_b: &ChannelRealization,
    xs: &[Complex64],
) -> Result<Vec<Complex64>, WaveformError> {
    check_len(h_b.len(), xs.len())?;
    Ok(h_b
        .gains
        .iter()
        .zip(xs)
        .map(|(h, x)| h.conj() * x)
        .collect())
}

/// Noiseless channel `H x`.
pub fn apply_channel(
    h: &ChannelRealization,
    xs: &[Complex64],
) -> Result<Vec<Complex64>, WaveformError> {
    check_len(h.len(), xs.len())?;
    Ok(h.gains.iter().zip(xs).map(|(h, x)| h * x).collect())
}

/// Synthesizes AN in the null space of `S^H H_B`.
///
/// In symbol group `n` (subcarriers `n + iN`), every entry except one pivot
/// is drawn from `CN(0, 1)` and the pivot is solved so the group sums to
/// zero. The pivot is the last block (`i = U - 1`) unless its gain is below
/// [`PIVOT_FLOOR`], in which case the strongest gain of the group is used.
/// The whole vector is then rescaled so its mean-square per element is
/// exactly `params.sigma2_an`.
pub fn synth_an(
    code: &SpreadingCode,
    h_b: &ChannelRealization,
    params: &SystemParams,
    stream: RngStream,
) -> Result<AnVector, WaveformError> {
    let mut rng = stream.rng();
    synth_an_with(code, h_b, params.sigma2_an, &mut rng)
}

pub fn synth_an_with<R: Rng + ?Sized>(
    code: &SpreadingCode,
    h_b: &ChannelRealization,
    sigma2_an: f64,
    rng: &mut R,
) -> Result<AnVector, WaveformError> {
    let q_len = code.q_subcarriers();
    check_len(q_len, h_b.len())?;
    let n = code.n_symbols();
    let bor = code.bor();
    if bor < 2 {
        return Err(WaveformError::InsufficientSpreading(bor));
    }
    // All Q entries are drawn so the stream position never depends on the
    // pivot choice; the pivot entries are overwritten.
    let mut w = complex_gaussian_vec(rng, q_len);
    let g = &h_b.gains;
    for group in 0..n {
        let last = group + (bor - 1) * n;
        let pivot = if g[last].norm() >= PIVOT_FLOOR {
            last
        } else {
            let best = (0..bor)
                .map(|i| group + i * n)
                .max_by(|&a, &b| g[a].norm().total_cmp(&g[b].norm()))
                .expect("bor >= 2");
            if g[best].norm() < PIVOT_FLOOR {
                return Err(WaveformError::DegenerateChannel { group, bor });
            }
            best
        };
        let partial: Complex64 = (0..bor)
            .map(|i| group + i * n)
            .filter(|&q| q != pivot)
            .map(|q| g[q] * w[q] * code.sign(q))
            .sum();
        w[pivot] = -partial / (g[pivot] * code.sign(pivot));
    }
    let mean_sq = w.iter().map(|x| x.norm_sqr()).sum::<f64>() / q_len as f64;
    if mean_sq > 0.0 {
        let scale = (sigma2_an / mean_sq).sqrt();
        w.iter_mut().for_each(|x| *x *= scale);
    }
    Ok(AnVector { w })
}

/// `max_n |(S^H H_B W)_n|`.
pub fn null_space_residual(
    code: &SpreadingCode,
    h_b: &ChannelRealization,
    an: &AnVector,
) -> Result<f64, WaveformError> {
    let seen = apply_channel(h_b, &an.w)?;
    Ok(despread(code, &seen)?
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max))
}

/// `sqrt(alpha) * precoded + sqrt(1 - alpha) * w`.
pub fn assemble_tx(
    alpha: f64,
    precoded: &[Complex64],
    an: &AnVector,
) -> Result<TxFrame, WaveformError> {
    check_alpha(alpha)?;
    check_len(precoded.len(), an.w.len())?;
    let (a, b) = (alpha.sqrt(), (1.0 - alpha).sqrt());
    Ok(TxFrame {
        samples: precoded
            .iter()
            .zip(&an.w)
            .map(|(x, w)| x * a + w * b)
            .collect(),
    })
}

/// `h ⊙ tx + v` with `v ~ CN(0, sigma2)` i.i.d. per subcarrier.
pub fn apply_channel_awgn(
    h: &ChannelRealization,
    tx: &TxFrame,
    sigma2: f64,
    stream: RngStream,
) -> Result<Vec<Complex64>, WaveformError> {
    let mut rng = stream.rng();
    let unit: Vec<Complex64> = (0..tx.samples.len())
        .map(|_| complex_gaussian(&mut rng))
        .collect();
    apply_channel_with_noise(h, tx, sigma2, &unit)
}

/// Same as [`apply_channel_awgn`] with caller-supplied unit-variance noise,
/// scaled by `sqrt(sigma2)`.
pub fn apply_channel_with_noise(
    h: &ChannelRealization,
    tx: &TxFrame,
    sigma2: f64,
    unit_noise: &[Complex64],
) -> Result<Vec<Complex64>, WaveformError> {
    check_len(h.len(), tx.samples.len())?;
    check_len(h.len(), unit_noise.len())?;
    let s = sigma2.max(0.0).sqrt();
    Ok(h.gains
        .iter()
        .zip(&tx.samples)
        .zip(unit_noise)
        .map(|((h, x), v)| h * x + v * s)
        .collect())
}

/// `K_n = (1/U) sum_i |H_{B, n+iN}|^2`, the diagonal of `S^H |H_B|^2 S`.
pub fn bob_gains(code: &SpreadingCode, h_b: &ChannelRealization) -> Vec<f64> {
    let n = code.n_symbols();
    let mut k = vec![0.0; n];
    for (q, h) in h_b.gains.iter().enumerate() {
        k[q % n] += h.norm_sqr();
    }
    let u = code.bor() as f64;
    k.iter_mut().for_each(|v| *v /= u);
    k
}

/// `Z_n = sum_i H_{E, n+iN} H^*_{B, n+iN}`; the diagonal of
/// `S^H H_E H_B^* S` is `Z_n / U`.
pub fn eve_gains(
    code: &SpreadingCode,
    h_b: &ChannelRealization,
    h_e: &ChannelRealization,
) -> Vec<Complex64> {
    let n = code.n_symbols();
    let mut z = vec![Complex64::new(0.0, 0.0); n];
    for (q, (he, hb)) in h_e.gains.iter().zip(&h_b.gains).enumerate() {
        z[q % n] += he * hb.conj();
    }
    z
}

/// Despread and ZF at Bob: division by `sqrt(alpha) K_n`.
pub fn receive_bob(
    code: &SpreadingCode,
    h_b: &ChannelRealization,
    rx: &[Complex64],
    alpha: f64,
) -> Result<RxObservation, WaveformError> {
    check_alpha(alpha)?;
    check_len(code.q_subcarriers(), h_b.len())?;
    let despread = despread(code, rx)?;
    let k = bob_gains(code, h_b);
    let root_alpha = alpha.sqrt();
    let mut equalized = Vec::with_capacity(despread.len());
    for (n, (y, k)) in despread.iter().zip(&k).enumerate() {
        let coeff = root_alpha * k;
        if alpha == 0.0 || *k < BOB_GAIN_FLOOR {
            return Err(WaveformError::SingularEqualizer { symbol: n });
        }
        equalized.push(y / coeff);
    }
    Ok(RxObservation {
        despread,
        equalized,
        singular: Vec::new(),
    })
}

/// Despread and ZF at Eve: division by `sqrt(alpha) Z_n / U`.
///
/// Symbols with `|Z_n| / U` below [`EVE_GAIN_FLOOR`] are listed in
/// `singular` instead of failing the whole block. `alpha = 0` is an error.
pub fn receive_eve(
    code: &SpreadingCode,
    h_b: &ChannelRealization,
    h_e: &ChannelRealization,
    rx: &[Complex64],
    alpha: f64,
) -> Result<RxObservation, WaveformError> {
    check_alpha(alpha)?;
    check_len(code.q_subcarriers(), h_b.len())?;
    check_len(code.q_subcarriers(), h_e.len())?;
    if alpha == 0.0 {
        return Err(WaveformError::SingularEqualizer { symbol: 0 });
    }
    let despread = despread(code, rx)?;
    let z = eve_gains(code, h_b, h_e);
    let u = code.bor() as f64;
    let root_alpha = alpha.sqrt();
    let mut singular = Vec::new();
    let equalized = despread
        .iter()
        .zip(&z)
        .enumerate()
        .map(|(n, (y, z))| {
            let coeff = z / u;
            if coeff.norm() < EVE_GAIN_FLOOR {
                singular.push(n);
                Complex64::new(0.0, 0.0)
            } else {
                y / (coeff * root_alpha)
            }
        })
        .collect();
    Ok(RxObservation {
        despread,
        equalized,
        singular,
    })
}

/// Spread then precode a symbol block: `H_B^* S X`.
pub fn modulate_block(
    code: &SpreadingCode,
    h_b: &ChannelRealization,
    block: &SymbolBlock,
) -> Result<Vec<Complex64>, WaveformError> {
    precode(h_b, &spread(code, &block.symbols)?)
}
