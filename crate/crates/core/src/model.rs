//! Domain types shared by every stage of the link: system parameters, the
//! spreading code, channel realizations, symbol blocks and the seeded RNG
//! stream contract.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// Errors raised while building or validating model values.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("parameter `{name}` out of range: {reason}")]
    OutOfRange { name: &'static str, reason: String },
    #[error("bit sequence has odd length {0}; 4-QAM needs pairs")]
    OddBitCount(usize),
}

fn out_of_range(name: &'static str, reason: impl Into<String>) -> ModelError {
    ModelError::OutOfRange {
        name,
        reason: reason.into(),
    }
}

/// Scalar parameters of the AN-aided frequency-domain TR OFDM link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Number of OFDM subcarriers `Q`.
    pub q_subcarriers: usize,
    /// Data symbols per block `N = Q / U`.
    pub n_symbols: usize,
    /// Back-off rate `U` (spreading factor).
    pub bor: usize,
    /// Fraction of transmit power carried by the useful signal.
    pub alpha: f64,
    /// Per-subcarrier noise variance at Bob.
    pub sigma2_vb: f64,
    /// Per-subcarrier noise variance at Eve.
    pub sigma2_ve: f64,
    /// Per-element AN variance `E[|W_q|^2]`.
    pub sigma2_an: f64,
    /// Number of Bessel expansion terms `D`.
    pub bessel_terms: usize,
    pub mod_order: usize,
}

impl SystemParams {
    pub const DEFAULT_BESSEL_TERMS: usize = 20;

    /// Builds parameters for `q` subcarriers and back-off rate `bor` with
    /// `alpha = 1`, unit noise, `sigma2_an = 1/U` and `D = 20`.
    pub fn new(q_subcarriers: usize, bor: usize) -> Result<Self, ModelError> {
        if bor == 0 {
            return Err(out_of_range("bor", "must be positive"));
        }
        if q_subcarriers == 0 || !q_subcarriers.is_multiple_of(bor) {
            return Err(out_of_range(
                "bor",
                format!("q = {q_subcarriers} is not a positive multiple of bor = {bor}"),
            ));
        }
        let params = Self {
            q_subcarriers,
            n_symbols: q_subcarriers / bor,
            bor,
            alpha: 1.0,
            sigma2_vb: 1.0,
            sigma2_ve: 1.0,
            sigma2_an: 1.0 / bor as f64,
            bessel_terms: Self::DEFAULT_BESSEL_TERMS,
            mod_order: 4,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self, ModelError> {
        self.alpha = alpha;
        self.validate()?;
        Ok(self)
    }

    /// Sets the same noise variance at Bob and Eve.
    pub fn with_noise(mut self, sigma2: f64) -> Result<Self, ModelError> {
        self.sigma2_vb = sigma2;
        self.sigma2_ve = sigma2;
        self.validate()?;
        Ok(self)
    }

    pub fn with_noise_split(mut self, sigma2_vb: f64, sigma2_ve: f64) -> Result<Self, ModelError> {
        self.sigma2_vb = sigma2_vb;
        self.sigma2_ve = sigma2_ve;
        self.validate()?;
        Ok(self)
    }

    pub fn with_bessel_terms(mut self, d: usize) -> Result<Self, ModelError> {
        self.bessel_terms = d;
        self.validate()?;
        Ok(self)
    }

    /// Noise variance for both receivers set from `Eb/N0` in dB.
    pub fn with_ebn0_db(self, ebn0_db: f64) -> Result<Self, ModelError> {
        self.with_noise(noise_variance_from_ebn0_db(ebn0_db))
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.bor == 0 || self.n_symbols == 0 {
            return Err(out_of_range("bor", "must be positive"));
        }
        if self.n_symbols * self.bor != self.q_subcarriers {
            return Err(out_of_range(
                "bor",
                format!(
                    "q = {} must equal n_symbols * bor = {} * {}",
                    self.q_subcarriers, self.n_symbols, self.bor
                ),
            ));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(out_of_range(
                "alpha",
                format!("{} not in [0, 1]", self.alpha),
            ));
        }
        for (name, v) in [
            ("sigma2_vb", self.sigma2_vb),
            ("sigma2_ve", self.sigma2_ve),
            ("sigma2_an", self.sigma2_an),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(out_of_range(name, format!("{v} must be finite and > 0")));
            }
        }
        if self.bessel_terms == 0 {
            return Err(out_of_range("bessel_terms", "must be positive"));
        }
        if self.mod_order != 4 {
            return Err(out_of_range("mod_order", "only 4-QAM is supported"));
        }
        Ok(())
    }
}

/// Per-subcarrier noise variance for a given `Eb/N0` (dB).
///
/// The transmitted block carries energy `N` whatever the power split, and
/// `2N` bits, so `Eb = 1/2` and `N0 = Eb / 10^(EbN0/10)`.
pub fn noise_variance_from_ebn0_db(ebn0_db: f64) -> f64 {
    0.5 * 10f64.powf(-ebn0_db / 10.0)
}

/// Deterministic random stream keyed by `(master_seed, stream_id, lane)`.
///
/// The generator is ChaCha8 seeded with `seed_from_u64(master_seed)`, using
/// `stream_id` as the ChaCha stream and starting at word position
/// `lane << 40`. Each lane therefore owns 2^40 words, so draws in one lane
/// never overlap another. Simulation code uses `stream_id = realization`
/// and [`RngStream::lane`] for the per-block, per-purpose sub-streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_id: u64,
    pub lane: u64,
}

/// What a sub-stream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    SpreadingCode = 0,
    BobChannel = 1,
    EveChannel = 2,
    DataBits = 3,
    ArtificialNoise = 4,
    BobNoise = 5,
    EveNoise = 6,
    CoinFlips = 7,
}

const LANES_PER_BLOCK: u64 = 8;

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self {
            master_seed,
            stream_id,
            lane: 0,
        }
    }

    /// Sub-stream for realization-level draws (`block = None`) or for one
    /// block of the realization. Lane index is
    /// `(block + 1) * 8 + purpose` for blocks and `purpose` otherwise.
    pub fn lane(&self, block: Option<u64>, purpose: Purpose) -> Self {
        let base = block.map_or(0, |b| (b + 1) * LANES_PER_BLOCK);
        Self {
            lane: base + purpose as u64,
            ..*self
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng.set_word_pos(u128::from(self.lane) << 40);
        rng
    }
}

/// Circularly-symmetric complex Gaussian sample with variance `E|z|^2 = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * FRAC_1_SQRT_2
}

pub fn complex_gaussian_vec<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<Complex64> {
    (0..len).map(|_| complex_gaussian(rng)).collect()
}

/// The Q diagonal signs of the spreading matrix `S`.
///
/// Column `n` of `S` has entries `signs[n + i*N] / sqrt(U)` on rows
/// `n + i*N`, `i = 0..U`, so `S^H S = I_N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpreadingCode {
    signs: Vec<i8>,
    n_symbols: usize,
}

impl SpreadingCode {
    pub fn from_signs(signs: Vec<i8>, n_symbols: usize) -> Result<Self, ModelError> {
        if n_symbols == 0 || signs.is_empty() || !signs.len().is_multiple_of(n_symbols) {
            return Err(out_of_range(
                "signs",
                format!(
                    "length {} is not a multiple of N = {n_symbols}",
                    signs.len()
                ),
            ));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(out_of_range("signs", "entries must be +1 or -1"));
        }
        Ok(Self { signs, n_symbols })
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn sign(&self, q: usize) -> f64 {
        f64::from(self.signs[q])
    }

    pub fn q_subcarriers(&self) -> usize {
        self.signs.len()
    }

    pub fn n_symbols(&self) -> usize {
        self.n_symbols
    }

    pub fn bor(&self) -> usize {
        self.signs.len() / self.n_symbols
    }

    /// Dense `Q x N` matrix `S`, row-major. Only used for checks.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        let scale = 1.0 / (self.bor() as f64).sqrt();
        let mut s = vec![vec![0.0; self.n_symbols]; self.signs.len()];
        for (q, row) in s.iter_mut().enumerate() {
            row[q % self.n_symbols] = self.sign(q) * scale;
        }
        s
    }
}

/// Draws Q independent equiprobable signs.
pub fn gen_spreading_code(
    params: &SystemParams,
    stream: RngStream,
) -> Result<SpreadingCode, ModelError> {
    params.validate()?;
    let mut rng = stream.rng();
    let signs = (0..params.q_subcarriers)
        .map(|_| if rng.random::<bool>() { 1 } else { -1 })
        .collect();
    SpreadingCode::from_signs(signs, params.n_symbols)
}

/// Frequency-domain gains of one link (diagonal of `H_B` or `H_E`).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub gains: Vec<Complex64>,
}

impl ChannelRealization {
    pub fn new(gains: Vec<Complex64>) -> Self {
        Self { gains }
    }

    /// Every subcarrier has gain `c`.
    pub fn flat(q: usize, c: Complex64) -> Self {
        Self { gains: vec![c; q] }
    }

    /// I.i.d. Rayleigh subcarriers, rescaled so the mean subcarrier energy
    /// of this realization is exactly one.
    pub fn rayleigh(q: usize, stream: RngStream) -> Self {
        let mut rng = stream.rng();
        let mut ch = Self::new(complex_gaussian_vec(&mut rng, q));
        ch.normalize();
        ch
    }

    /// Rescales to `(1/Q) sum |H_q|^2 = 1`. A zero channel is left as is.
    pub fn normalize(&mut self) {
        let energy = self.mean_energy();
        if energy > 0.0 {
            let scale = 1.0 / energy.sqrt();
            self.gains.iter_mut().for_each(|h| *h *= scale);
        }
    }

    pub fn mean_energy(&self) -> f64 {
        self.gains.iter().map(|h| h.norm_sqr()).sum::<f64>() / self.gains.len() as f64
    }

    pub fn len(&self) -> usize {
        self.gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gains.is_empty()
    }
}

/// One OFDM block of unit-energy 4-QAM symbols and the bits they carry.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolBlock {
    pub symbols: Vec<Complex64>,
    pub bits: Vec<u8>,
}

impl SymbolBlock {
    /// `2N` uniform bits mapped to `N` symbols.
    pub fn random(n_symbols: usize, stream: RngStream) -> Self {
        let mut rng = stream.rng();
        let bits: Vec<u8> = (0..2 * n_symbols)
            .map(|_| u8::from(rng.random::<bool>()))
            .collect();
        qam4_modulate(&bits).expect("even bit count")
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// Gray-mapped unit-energy 4-QAM: `(b0, b1) -> ((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2)`.
///
/// Any nonzero byte counts as bit 1.
pub fn qam4_modulate(bits: &[u8]) -> Result<SymbolBlock, ModelError> {
    if !bits.len().is_multiple_of(2) {
        return Err(ModelError::OddBitCount(bits.len()));
    }
    let bits: Vec<u8> = bits.iter().map(|&b| u8::from(b != 0)).collect();
    let symbols = bits
        .chunks_exact(2)
        .map(|pair| {
            let re = 1.0 - 2.0 * f64::from(pair[0]);
            let im = 1.0 - 2.0 * f64::from(pair[1]);
            Complex64::new(re, im) * FRAC_1_SQRT_2
        })
        .collect();
    Ok(SymbolBlock { symbols, bits })
}

/// Hard quadrant decision. A coordinate that is exactly zero decodes as 0.
pub fn qam4_demodulate(symbols: &[Complex64]) -> Vec<u8> {
    let mut bits = Vec::with_capacity(2 * symbols.len());
    for s in symbols {
        bits.push(u8::from(s.re < 0.0));
        bits.push(u8::from(s.im < 0.0));
    }
    bits
}
