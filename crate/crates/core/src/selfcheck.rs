//! Deterministic self-check suite: analytic identities and the AN null-space
//! property, each reduced to one number compared against a threshold.

use rand::Rng;

use crate::analytic::{self, lah, sinr_bob_bound, sinr_eve_bound, BoundInputs};
use crate::model::{gen_spreading_code, ChannelRealization, Purpose, RngStream, SystemParams};
use crate::waveform::{null_space_residual, synth_an};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    /// Pass condition is `value <= threshold`, or `lo <= value <= hi` when
    /// `range` is set.
    pub range: Option<(f64, f64)>,
    pub pass: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            range: None,
            pass: value <= threshold,
        }
    }

    fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold: lo,
            range: Some((lo, hi)),
            pass: (lo..=hi).contains(&value),
        }
    }
}

/// Random bound inputs for identity checks: `U` in 3..=16, `alpha` in
/// `[0, 1)`, noise variances log-uniform on `[1e-3, 10]`, AN variance `1/U`
/// half the time and uniform on `[0.01, 1)` otherwise.
pub fn random_bound_inputs<R: Rng + ?Sized>(rng: &mut R) -> BoundInputs {
    let u: u32 = rng.random_range(3..=16);
    let alpha: f64 = rng.random();
    let vb = 10f64.powf(rng.random_range(-3.0..1.0));
    let ve = 10f64.powf(rng.random_range(-3.0..1.0));
    let an = if rng.random::<bool>() {
        1.0 / f64::from(u)
    } else {
        rng.random_range(0.01..1.0)
    };
    BoundInputs::new(u, alpha, vb, ve, an, 20).expect("valid by construction")
}

/// Mismatch between the grouped closed form and `log2(1+gB) - log2(1+gE)`,
/// relative to the size of the log terms. Plain relative error is not
/// usable near `gB = gE`, where the reference difference itself cancels.
/// `None` when the bound is undefined at these inputs.
pub fn consistency_error(inputs: &BoundInputs) -> Option<f64> {
    let closed = analytic::secrecy_rate_bound(inputs).ok()?;
    let lb = sinr_bob_bound(inputs).ok()?.ln_1p() / std::f64::consts::LN_2;
    let le = sinr_eve_bound(inputs).ok()?.ln_1p() / std::f64::consts::LN_2;
    let direct = lb - le;
    let scale = direct.abs().max(lb).max(le);
    if scale == 0.0 {
        return Some(closed.abs());
    }
    Some((closed - direct).abs() / scale)
}

/// Largest [`consistency_error`] over `n` random inputs.
pub fn max_consistency_error(seed: u64, n: usize) -> f64 {
    let mut rng = RngStream::new(seed, 0).rng();
    (0..n)
        .filter_map(|_| consistency_error(&random_bound_inputs(&mut rng)))
        .fold(0.0, f64::max)
}

/// Number of `(l, q)` with `1 <= q <= l + 1 <= max_l` violating
/// `L(l+1, q) = (l + q) L(l, q) + L(l, q-1)`.
pub fn lah_recurrence_failures(max_l: u32) -> usize {
    let mut bad = 0;
    for l in 1..max_l {
        for q in 1..=l + 1 {
            let lhs = lah(l + 1, q).ok();
            let prev = if q == 1 { Some(0) } else { lah(l, q - 1).ok() };
            let rhs = lah(l, q)
                .ok()
                .zip(prev)
                .map(|(a, b)| u128::from(l + q) * a + b);
            if lhs.is_none() || lhs != rhs {
                bad += 1;
            }
        }
    }
    bad
}

/// Largest `|S^H H_B W|` over `n` random (code, channel, AN seed) triples
/// with `U` cycling through {2, 4, 8} on 64 subcarriers.
pub fn max_null_space_residual(seed: u64, n: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let bor = [2, 4, 8][i % 3];
        let params = SystemParams::new(64, bor).expect("valid");
        let root = RngStream::new(seed, i as u64);
        let code =
            gen_spreading_code(&params, root.lane(None, Purpose::SpreadingCode)).expect("valid");
        let h = ChannelRealization::rayleigh(64, root.lane(None, Purpose::BobChannel));
        let an = synth_an(
            &code,
            &h,
            &params,
            root.lane(None, Purpose::ArtificialNoise),
        )
        .expect("nondegenerate channel");
        worst = worst.max(null_space_residual(&code, &h, &an).expect("dimensions agree"));
    }
    worst
}

/// Runs every check with a fixed seed.
pub fn run_all(seed: u64) -> Vec<Check> {
    let mut checks = vec![
        Check::at_most(
            "sr_consistency_max_rel_err",
            max_consistency_error(seed, 1000),
            1e-12,
        ),
        Check::at_most(
            "lah_recurrence_failures_l15",
            lah_recurrence_failures(15) as f64,
            0.0,
        ),
    ];
    for u in 4..=16u32 {
        let value = analytic::const_a(u, 20)
            .map(|a| 4.0 * a * f64::from(u))
            .unwrap_or(f64::NAN);
        checks.push(Check::within(format!("four_a_u_u{u}"), value, 0.95, 1.05));
    }
    checks.push(Check::at_most(
        "null_space_max_residual",
        max_null_space_residual(seed, 1000),
        1e-10,
    ));
    checks
}
