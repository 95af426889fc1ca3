//! Subcommand drivers: each turns a [`RunConfig`] into one result table.

use serde::Serialize;
use trofdm::analytic::{alpha_opt_detailed, AlphaOptMethod, BoundInputs};
use trofdm::selfcheck;
use trofdm::simkit::{sweep_ber_vs_alpha, sweep_ber_vs_ebn0, sweep_sr_vs_alpha, SweepPoint};

use crate::config::RunConfig;
use crate::table::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    /// BER against Eb/N0 for several power splits.
    BerVsSnr,
    /// BER against the power split, one series per back-off rate.
    BerVsAlpha,
    /// Empirical and analytic secrecy rate against the power split.
    SrVsAlpha,
    /// Analytic optimal split versus the empirical grid optimum.
    AlphaOpt,
    /// Analytic self-check suite; fails the process when a check fails.
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::BerVsSnr => "ber-vs-snr",
            Command::BerVsAlpha => "ber-vs-alpha",
            Command::SrVsAlpha => "sr-vs-alpha",
            Command::AlphaOpt => "alpha-opt",
            Command::Validate => "validate",
        }
    }
}

/// Symbols and rows left out of averages, summed over the whole run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Exclusions {
    /// Bob symbols decoded by coin flip (`alpha = 0`).
    pub bob_coin_flip_symbols: u64,
    /// Eve symbols decoded by coin flip: singular equalizer or `alpha = 0`.
    /// Also excluded from SINR and secrecy-rate averages.
    pub eve_coin_flip_symbols: u64,
    /// Rows whose analytic secrecy-rate bound is undefined.
    pub rows_without_sr_bound: u64,
}

impl Exclusions {
    fn add(&mut self, points: &[SweepPoint]) {
        for p in points {
            self.bob_coin_flip_symbols += p.bob_skipped;
            self.eve_coin_flip_symbols += p.eve_skipped;
            self.rows_without_sr_bound += u64::from(p.sr_bound.is_none());
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub table: Table,
    pub exclusions: Exclusions,
    /// False only for a failing `validate`.
    pub passed: bool,
}

pub const BER_COLUMNS: &[&str] = &[
    "bor",
    "alpha",
    "ebn0_db",
    "bob_ber",
    "eve_ber",
    "bob_ci_halfwidth",
    "eve_ci_halfwidth",
    "bits",
    "bob_errors",
    "eve_errors",
    "bob_skipped",
    "eve_skipped",
];

pub const SR_COLUMNS: &[&str] = &[
    "bor",
    "alpha",
    "sr_emp",
    "sr_emp_clamped",
    "sr_bound",
    "sinr_bob_emp",
    "sinr_bob_bound",
    "sinr_eve_emp",
    "sinr_eve_bound",
    "ci_halfwidth",
];

pub const ALPHA_OPT_COLUMNS: &[&str] = &[
    "bor",
    "alpha_opt",
    "alpha_opt_method",
    "sr_bound_at_alpha_opt",
    "sr_emp_at_alpha_opt",
    "alpha_star_emp",
    "sr_max_emp",
    "sr_ratio",
];

pub const VALIDATE_COLUMNS: &[&str] = &["check", "value", "lower", "upper", "pass"];

/// Half-width of the two-sigma confidence interval from a standard error.
fn ci(se: f64) -> f64 {
    2.0 * se
}

fn ber_row(p: &SweepPoint) -> Vec<Cell> {
    vec![
        p.bor.into(),
        p.alpha.into(),
        p.ebn0_db.into(),
        p.bob_ber.into(),
        p.eve_ber.into(),
        ci(p.bob_ber_se).into(),
        ci(p.eve_ber_se).into(),
        p.bits.into(),
        p.bob_errors.into(),
        p.eve_errors.into(),
        p.bob_skipped.into(),
        p.eve_skipped.into(),
    ]
}

fn sr_row(p: &SweepPoint) -> Vec<Cell> {
    vec![
        p.bor.into(),
        p.alpha.into(),
        p.sr_emp.into(),
        p.sr_emp_clamped.into(),
        p.sr_bound.into(),
        p.sinr_bob_emp.into(),
        p.sinr_bob_bound.into(),
        p.sinr_eve_emp.into(),
        p.sinr_eve_bound.into(),
        ci(p.sr_emp_se).into(),
    ]
}

pub fn run(cmd: Command, cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let mut exclusions = Exclusions::default();
    let mut passed = true;
    let table = match cmd {
        Command::BerVsSnr => {
            let sim = cfg
                .sim_config(cfg.bor, cfg.ebn0_db)?
                .with_axis(cfg.ebn0_grid.clone());
            let points = sweep_ber_vs_ebn0(&sim, &cfg.alphas)?;
            exclusions.add(&points);
            collect(BER_COLUMNS, points.iter().map(ber_row))
        }
        Command::BerVsAlpha => {
            let mut t = Table::new(BER_COLUMNS);
            for &bor in &cfg.bors {
                let sim = cfg
                    .sim_config(bor, cfg.ebn0_db)?
                    .with_axis(cfg.alpha_axis());
                let points = sweep_ber_vs_alpha(&sim, cfg.ebn0_db)?;
                exclusions.add(&points);
                points.iter().for_each(|p| t.push(ber_row(p)));
            }
            t
        }
        Command::SrVsAlpha => {
            let mut t = Table::new(SR_COLUMNS);
            for &bor in &cfg.bors {
                let sim = cfg
                    .sim_config(bor, cfg.sr_ebn0_db)?
                    .with_axis(cfg.alpha_axis());
                let points = sweep_sr_vs_alpha(&sim)?;
                exclusions.add(&points);
                points.iter().for_each(|p| t.push(sr_row(p)));
            }
            t
        }
        Command::AlphaOpt => {
            let mut t = Table::new(ALPHA_OPT_COLUMNS);
            for &bor in &cfg.bors {
                t.push(alpha_opt_row(cfg, bor, &mut exclusions)?);
            }
            t
        }
        Command::Validate => {
            let checks = selfcheck::run_all(cfg.seed);
            passed = checks.iter().all(|c| c.pass);
            collect(
                VALIDATE_COLUMNS,
                checks.iter().map(|c| {
                    let (lo, hi) = c
                        .range
                        .map_or((None, Some(c.threshold)), |(lo, hi)| (Some(lo), Some(hi)));
                    vec![
                        c.name.as_str().into(),
                        c.value.into(),
                        lo.into(),
                        hi.into(),
                        c.pass.into(),
                    ]
                }),
            )
        }
    };
    Ok(Outcome {
        table,
        exclusions,
        passed,
    })
}

fn collect(header: &[&'static str], rows: impl Iterator<Item = Vec<Cell>>) -> Table {
    let mut t = Table::new(header);
    rows.for_each(|r| t.push(r));
    t
}

/// Analytic optimum and the empirical curve evaluated on the grid plus the
/// analytic point, all with the same random draws.
fn alpha_opt_row(
    cfg: &RunConfig,
    bor: usize,
    exclusions: &mut Exclusions,
) -> anyhow::Result<Vec<Cell>> {
    let sim = cfg.sim_config(bor, cfg.sr_ebn0_db)?;
    let analytic = BoundInputs::from_params(&sim.params)
        .and_then(|b| alpha_opt_detailed(&b))
        .ok();
    let grid = cfg.alpha_axis();
    let mut axis = grid.clone();
    axis.extend(analytic.map(|a| a.alpha));
    let curve = sweep_sr_vs_alpha(&sim.with_axis(axis))?;
    exclusions.add(&curve);

    let (on_grid, at_opt) = curve.split_at(grid.len());
    let best = on_grid
        .iter()
        .fold(None::<&SweepPoint>, |best, p| match best {
            Some(b) if b.sr_emp >= p.sr_emp => Some(b),
            _ => Some(p),
        })
        .expect("non-empty grid");
    let sr_at_opt = at_opt.first().map(|p| p.sr_emp);
    let method = analytic.map_or("", |a| match a.method {
        AlphaOptMethod::StationaryPoint => "stationary",
        AlphaOptMethod::Boundary => "boundary",
        AlphaOptMethod::GoldenSection => "golden-section",
    });
    Ok(vec![
        bor.into(),
        analytic.map(|a| a.alpha).into(),
        method.into(),
        analytic.map(|a| a.sr_bound).into(),
        sr_at_opt.into(),
        best.alpha.into(),
        best.sr_emp.into(),
        sr_at_opt.map(|s| s / best.sr_emp).into(),
    ])
}
