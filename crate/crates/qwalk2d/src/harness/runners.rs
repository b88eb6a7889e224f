//! The experiment implementations behind [`super::run`]. Each runner has a
//! structured entry point (used directly by the acceptance tests) and a
//! rendering step that turns the results into CSV/PGM artifacts.

use rayon::prelude::*;

use crate::analysis::{
    exponent_pairs, joint_moment, mean_radial, moment_report, std_radial, MomentMethod,
};
use crate::classical::{self, WalkEnsembleStats, WalkKind};
use crate::coins::{CoinFamily, CoinMatrix, NonRepeatingParams};
use crate::lattice::{InitialCoinState, ProbabilityField, WalkerState};
use crate::momentum::{self, MomentumPoint};

use super::config::*;
use super::output::{csv_bytes, fmt_f64, heatmap_csv_bytes, pgm_bytes, Artifact};
use super::{sample_state, stream_rng, HarnessError};

// Sub-stream purposes; every random draw in the harness is traceable to
// (config seed, purpose, index).
pub(super) const PURPOSE_STATES: u64 = 1;
pub(super) const PURPOSE_COINS_NONREP: u64 = 2;
pub(super) const PURPOSE_COINS_NONREV: u64 = 3;
pub(super) const PURPOSE_PAIR_BASE: u64 = 4;
pub(super) const PURPOSE_PAIR_PARTNER: u64 = 5;
pub(super) const PURPOSE_PAIR_PERTURBED: u64 = 6;
pub(super) const PURPOSE_FIXED_STATE: u64 = 7;

/// Radial statistics of one walk at every step 0..=t_max.
fn radial_curve(
    coin: &CoinMatrix,
    state: &InitialCoinState,
    t_max: usize,
) -> Result<Vec<(f64, f64)>, HarnessError> {
    let mut walker = WalkerState::new(state, t_max);
    let mut out = Vec::with_capacity(t_max + 1);
    loop {
        let field = walker.probability();
        out.push((mean_radial(&field), std_radial(&field)?));
        if walker.t() == t_max {
            break;
        }
        walker = walker.step(coin)?;
    }
    Ok(out)
}

fn evolved_field(
    coin: &CoinMatrix,
    state: &InitialCoinState,
    t: usize,
) -> Result<ProbabilityField, HarnessError> {
    Ok(WalkerState::new(state, t).evolve(coin, t)?.probability())
}

// ---------------------------------------------------------------------------
// figure2 / figure3: heatmap presets
// ---------------------------------------------------------------------------

fn heatmap_walks_figure2(t: usize) -> Vec<(String, CoinMatrix, InitialCoinState, usize)> {
    vec![
        (
            "hadamard4_symmetric".into(),
            CoinMatrix::hadamard4(),
            InitialCoinState::symmetric(),
            t,
        ),
        (
            "dft4_symmetric".into(),
            CoinMatrix::dft4(),
            InitialCoinState::symmetric(),
            t,
        ),
        (
            "grover4_minus_minus".into(),
            CoinMatrix::grover4(),
            InitialCoinState::minus_minus(),
            t,
        ),
    ]
}

fn heatmap_walks_figure3(t: usize) -> Vec<(String, CoinMatrix, InitialCoinState, usize)> {
    let params = NonRepeatingParams::balanced();
    vec![
        (
            "non_reversal_symmetric".into(),
            CoinMatrix::non_reversal(&params),
            InitialCoinState::symmetric(),
            t,
        ),
        (
            "non_repeating_minus_minus".into(),
            CoinMatrix::non_repeating(&params),
            InitialCoinState::minus_minus(),
            t,
        ),
    ]
}

fn render_heatmap_walks(
    walks: Vec<(String, CoinMatrix, InitialCoinState, usize)>,
) -> Result<Vec<Artifact>, HarnessError> {
    let fields: Vec<(String, ProbabilityField)> = walks
        .into_par_iter()
        .map(|(name, coin, state, t)| Ok((name, evolved_field(&coin, &state, t)?)))
        .collect::<Result<_, HarnessError>>()?;
    let mut artifacts = Vec::new();
    for (name, field) in fields {
        artifacts.push(Artifact::new(
            format!("{name}.csv"),
            heatmap_csv_bytes(&field),
        ));
        artifacts.push(Artifact::new(format!("{name}.pgm"), pgm_bytes(&field)));
    }
    Ok(artifacts)
}

pub(super) fn run_figure2(cfg: &Figure2Config) -> Result<Vec<Artifact>, HarnessError> {
    render_heatmap_walks(heatmap_walks_figure2(cfg.t))
}

pub(super) fn run_figure3(cfg: &Figure3Config) -> Result<Vec<Artifact>, HarnessError> {
    render_heatmap_walks(heatmap_walks_figure3(cfg.t))
}

// ---------------------------------------------------------------------------
// figure4: radial-statistics curves
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct Figure4Row {
    pub coin: &'static str,
    pub variant: &'static str,
    pub t: usize,
    pub mean_r: f64,
    pub sigma_r: f64,
}

#[derive(Debug, Clone)]
pub struct Figure4SpreadRow {
    pub coin: &'static str,
    pub t: usize,
    pub mean_r_spread: f64,
    pub sigma_r_spread: f64,
}

#[derive(Debug, Clone)]
pub struct Figure4Data {
    pub rows: Vec<Figure4Row>,
    pub spreads: Vec<Figure4SpreadRow>,
}

/// Curves for the five coins over a shared pool: the two named separable
/// states plus `n_states` sampled states. For Grover and DFT, whose radial
/// statistics depend on the initial state, the emitted max and min variants
/// are the full curves of the pool states with the largest and smallest
/// final mean radius; the other three coins emit a single variant. The
/// spread table reports the per-step pool spread for every coin.
pub fn figure4_data(cfg: &Figure4Config) -> Result<Figure4Data, HarnessError> {
    let mut pool = vec![InitialCoinState::symmetric(), InitialCoinState::minus_minus()];
    for j in 0..cfg.n_states {
        pool.push(sample_state(
            StateSampler::Gaussian,
            &mut stream_rng(cfg.seed, PURPOSE_STATES, j as u64),
        ));
    }

    let params = NonRepeatingParams::balanced();
    let coins: Vec<(&'static str, CoinMatrix, bool)> = vec![
        ("hadamard4", CoinMatrix::hadamard4(), false),
        ("grover4", CoinMatrix::grover4(), true),
        ("dft4", CoinMatrix::dft4(), true),
        ("non_repeating", CoinMatrix::non_repeating(&params), false),
        ("non_reversal", CoinMatrix::non_reversal(&params), false),
    ];

    let mut rows = Vec::new();
    let mut spreads = Vec::new();
    for (name, coin, state_dependent) in &coins {
        let curves: Vec<Vec<(f64, f64)>> = pool
            .par_iter()
            .map(|s| radial_curve(coin, s, cfg.t_max))
            .collect::<Result<_, _>>()?;
        let final_mean = |idx: usize| curves[idx][cfg.t_max].0;
        let argmax = (0..curves.len())
            .max_by(|&a, &b| final_mean(a).total_cmp(&final_mean(b)))
            .expect("pool is never empty");
        let argmin = (0..curves.len())
            .min_by(|&a, &b| final_mean(a).total_cmp(&final_mean(b)))
            .expect("pool is never empty");
        for t in 0..=cfg.t_max {
            if *state_dependent {
                rows.push(Figure4Row {
                    coin: name,
                    variant: "max",
                    t,
                    mean_r: curves[argmax][t].0,
                    sigma_r: curves[argmax][t].1,
                });
                rows.push(Figure4Row {
                    coin: name,
                    variant: "min",
                    t,
                    mean_r: curves[argmin][t].0,
                    sigma_r: curves[argmin][t].1,
                });
            } else {
                rows.push(Figure4Row {
                    coin: name,
                    variant: "single",
                    t,
                    mean_r: curves[0][t].0,
                    sigma_r: curves[0][t].1,
                });
            }
            let means: Vec<f64> = curves.iter().map(|c| c[t].0).collect();
            let sigmas: Vec<f64> = curves.iter().map(|c| c[t].1).collect();
            let max = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = |v: &[f64]| v.iter().cloned().fold(f64::INFINITY, f64::min);
            spreads.push(Figure4SpreadRow {
                coin: name,
                t,
                mean_r_spread: max(&means) - min(&means),
                sigma_r_spread: max(&sigmas) - min(&sigmas),
            });
        }
    }
    Ok(Figure4Data { rows, spreads })
}

pub(super) fn run_figure4(cfg: &Figure4Config) -> Result<Vec<Artifact>, HarnessError> {
    let data = figure4_data(cfg)?;
    let rows: Vec<Vec<String>> = data
        .rows
        .iter()
        .map(|r| {
            vec![
                r.coin.to_string(),
                r.variant.to_string(),
                r.t.to_string(),
                fmt_f64(r.mean_r),
                fmt_f64(r.sigma_r),
            ]
        })
        .collect();
    let spread_rows: Vec<Vec<String>> = data
        .spreads
        .iter()
        .map(|r| {
            vec![
                r.coin.to_string(),
                r.t.to_string(),
                fmt_f64(r.mean_r_spread),
                fmt_f64(r.sigma_r_spread),
            ]
        })
        .collect();
    Ok(vec![
        Artifact::new(
            "figure4.csv",
            csv_bytes(&["coin", "variant", "t", "mean_r", "sigma_r"], &rows),
        ),
        Artifact::new(
            "figure4_spread.csv",
            csv_bytes(
                &["coin", "t", "mean_r_spread", "sigma_r_spread"],
                &spread_rows,
            ),
        ),
    ])
}

// ---------------------------------------------------------------------------
// independence sweep
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct IndependenceRow {
    pub family: CoinFamily,
    pub coin_index: usize,
    pub xi: u32,
    pub chi: u32,
    /// max - min of the moment over the initial-state pool.
    pub spread: f64,
}

/// Exponents reported by the sweep: every even-total pair of degree <= 4
/// plus the odd moment <X> as a positive control.
pub fn sweep_exponents() -> Vec<(u32, u32)> {
    let mut pairs: Vec<(u32, u32)> = exponent_pairs(4)
        .into_iter()
        .filter(|(xi, chi)| (xi + chi) % 2 == 0)
        .collect();
    pairs.push((1, 0));
    pairs
}

/// For each seeded coin of each family, the spread of every reported moment
/// over the shared initial-state pool.
pub fn independence_rows(cfg: &IndependenceConfig) -> Result<Vec<IndependenceRow>, HarnessError> {
    let states: Vec<InitialCoinState> = (0..cfg.n_states)
        .map(|j| {
            sample_state(
                cfg.sampler,
                &mut stream_rng(cfg.seed, PURPOSE_STATES, j as u64),
            )
        })
        .collect();
    let pairs = sweep_exponents();

    let mut rows = Vec::new();
    for family in &cfg.families {
        let purpose = match family {
            CoinFamily::NonRepeating => PURPOSE_COINS_NONREP,
            CoinFamily::NonReversal => PURPOSE_COINS_NONREV,
            other => {
                return Err(HarnessError::Config(format!(
                    "independence sweep only samples the parametrized families, not {}",
                    other.label()
                )))
            }
        };
        let per_coin: Vec<Vec<IndependenceRow>> = (0..cfg.n_coins)
            .into_par_iter()
            .map(|i| -> Result<Vec<IndependenceRow>, HarnessError> {
                let params =
                    NonRepeatingParams::sample(&mut stream_rng(cfg.seed, purpose, i as u64));
                let coin = CoinMatrix::from_family(*family, Some(&params))
                    .expect("parametrized family");
                let mut lo = vec![f64::INFINITY; pairs.len()];
                let mut hi = vec![f64::NEG_INFINITY; pairs.len()];
                for state in &states {
                    let field = evolved_field(&coin, state, cfg.t)?;
                    for (slot, (xi, chi)) in pairs.iter().enumerate() {
                        let v = joint_moment(&field, *xi, *chi)?;
                        lo[slot] = lo[slot].min(v);
                        hi[slot] = hi[slot].max(v);
                    }
                }
                Ok(pairs
                    .iter()
                    .enumerate()
                    .map(|(slot, (xi, chi))| IndependenceRow {
                        family: *family,
                        coin_index: i,
                        xi: *xi,
                        chi: *chi,
                        spread: hi[slot] - lo[slot],
                    })
                    .collect())
            })
            .collect::<Result<_, _>>()?;
        rows.extend(per_coin.into_iter().flatten());
    }
    Ok(rows)
}

pub(super) fn run_independence(cfg: &IndependenceConfig) -> Result<Vec<Artifact>, HarnessError> {
    let rows: Vec<Vec<String>> = independence_rows(cfg)?
        .iter()
        .map(|r| {
            vec![
                r.family.label().to_string(),
                r.coin_index.to_string(),
                r.xi.to_string(),
                r.chi.to_string(),
                fmt_f64(r.spread),
            ]
        })
        .collect();
    Ok(vec![Artifact::new(
        "independence.csv",
        csv_bytes(&["family", "coin", "xi", "chi", "spread"], &rows),
    )])
}

// ---------------------------------------------------------------------------
// five-parameter test
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct FiveParamRow {
    pub family: CoinFamily,
    pub pair_index: usize,
    pub xi: u32,
    pub chi: u32,
    /// |moment(base) - moment(partner)| for the invariant-matched partner.
    pub diff_matched: f64,
    /// Same for the partner whose m1 was shifted by the configured
    /// perturbation. For the non-repeating family this is an exact symmetry
    /// direction: the moments do not respond.
    pub diff_perturbed_m1: f64,
    /// Same for an m3 shift, the direction the moments of both families
    /// actually depend on.
    pub diff_perturbed_m3: f64,
}

/// Construct coin pairs sharing (m1, m2, m3, lambda, gamma) but with
/// resampled constituent angles, plus partners with one invariant shifted,
/// and compare even moments at fixed t from one fixed sampled initial state.
pub fn five_param_rows(cfg: &FiveParamConfig) -> Result<Vec<FiveParamRow>, HarnessError> {
    let state = sample_state(
        StateSampler::Gaussian,
        &mut stream_rng(cfg.seed, PURPOSE_FIXED_STATE, 0),
    );
    let pairs: Vec<(u32, u32)> = exponent_pairs(4)
        .into_iter()
        .filter(|(xi, chi)| (xi + chi) % 2 == 0 && (xi, chi) != (&0, &0))
        .collect();

    let per_pair: Vec<Vec<FiveParamRow>> = (0..cfg.n_pairs)
        .into_par_iter()
        .map(|i| -> Result<Vec<FiveParamRow>, HarnessError> {
            let base =
                NonRepeatingParams::sample(&mut stream_rng(cfg.seed, PURPOSE_PAIR_BASE, i as u64));
            let resample = |dm1: f64, dm3: f64, purpose: u64| {
                NonRepeatingParams::from_invariants(
                    base.m1_raw() + dm1,
                    base.m2_raw(),
                    base.m3_raw() + dm3,
                    base.lambda(),
                    base.gamma(),
                    &mut stream_rng(cfg.seed, purpose, i as u64),
                )
            };
            let partner = resample(0.0, 0.0, PURPOSE_PAIR_PARTNER)?;
            let shifted_m1 = resample(cfg.perturbation, 0.0, PURPOSE_PAIR_PERTURBED)?;
            let shifted_m3 = resample(0.0, cfg.perturbation, PURPOSE_PAIR_PERTURBED)?;

            let mut rows = Vec::new();
            for family in [CoinFamily::NonRepeating, CoinFamily::NonReversal] {
                let build = |p: &NonRepeatingParams| {
                    CoinMatrix::from_family(family, Some(p)).expect("parametrized family")
                };
                let f_base = evolved_field(&build(&base), &state, cfg.t)?;
                let f_partner = evolved_field(&build(&partner), &state, cfg.t)?;
                let f_m1 = evolved_field(&build(&shifted_m1), &state, cfg.t)?;
                let f_m3 = evolved_field(&build(&shifted_m3), &state, cfg.t)?;
                for (xi, chi) in &pairs {
                    let m_base = joint_moment(&f_base, *xi, *chi)?;
                    rows.push(FiveParamRow {
                        family,
                        pair_index: i,
                        xi: *xi,
                        chi: *chi,
                        diff_matched: (m_base - joint_moment(&f_partner, *xi, *chi)?).abs(),
                        diff_perturbed_m1: (m_base - joint_moment(&f_m1, *xi, *chi)?).abs(),
                        diff_perturbed_m3: (m_base - joint_moment(&f_m3, *xi, *chi)?).abs(),
                    });
                }
            }
            Ok(rows)
        })
        .collect::<Result<_, _>>()?;
    Ok(per_pair.into_iter().flatten().collect())
}

pub(super) fn run_five_param(cfg: &FiveParamConfig) -> Result<Vec<Artifact>, HarnessError> {
    let rows: Vec<Vec<String>> = five_param_rows(cfg)?
        .iter()
        .map(|r| {
            vec![
                r.family.label().to_string(),
                r.pair_index.to_string(),
                r.xi.to_string(),
                r.chi.to_string(),
                fmt_f64(r.diff_matched),
                fmt_f64(r.diff_perturbed_m1),
                fmt_f64(r.diff_perturbed_m3),
            ]
        })
        .collect();
    Ok(vec![Artifact::new(
        "five_param.csv",
        csv_bytes(
            &[
                "family",
                "pair",
                "xi",
                "chi",
                "diff_matched",
                "diff_perturbed_m1",
                "diff_perturbed_m3",
            ],
            &rows,
        ),
    )])
}

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SpectrumRow {
    pub kx: f64,
    pub ky: f64,
    pub b: f64,
    pub omega: f64,
    /// None at band-edge nodes, where the gradient is singular.
    pub grad: Option<(f64, f64)>,
}

/// Band parameter, eigenphase and group velocity of the non-repeating walk
/// on a shifted midpoint grid.
pub fn spectrum_rows(cfg: &SpectrumConfig) -> Result<Vec<SpectrumRow>, HarnessError> {
    let params = match &cfg.params {
        Some(spec) => spec.build()?,
        None => NonRepeatingParams::balanced(),
    };
    let nodes: Vec<f64> = momentum::midpoint_nodes(cfg.grid).collect();
    let rows: Vec<Vec<SpectrumRow>> = nodes
        .par_iter()
        .map(|&kx| {
            nodes
                .iter()
                .map(|&ky| {
                    let k = MomentumPoint::new(kx, ky);
                    let phase = momentum::eigen_phase(&params, k);
                    SpectrumRow {
                        kx,
                        ky,
                        b: phase.b,
                        omega: phase.omega,
                        grad: momentum::grad_omega(&params, k).ok(),
                    }
                })
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

pub(super) fn run_spectrum(cfg: &SpectrumConfig) -> Result<Vec<Artifact>, HarnessError> {
    let rows: Vec<Vec<String>> = spectrum_rows(cfg)?
        .iter()
        .map(|r| {
            let (gx, gy) = match r.grad {
                Some((gx, gy)) => (fmt_f64(gx), fmt_f64(gy)),
                None => ("nan".to_string(), "nan".to_string()),
            };
            vec![
                fmt_f64(r.kx),
                fmt_f64(r.ky),
                fmt_f64(r.b),
                fmt_f64(r.omega),
                gx,
                gy,
            ]
        })
        .collect();
    Ok(vec![Artifact::new(
        "spectrum.csv",
        csv_bytes(
            &["kx", "ky", "b", "omega", "domega_dkx", "domega_dky"],
            &rows,
        ),
    )])
}

// ---------------------------------------------------------------------------
// classical baselines
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ClassicalData {
    pub msd: WalkEnsembleStats,
    /// (kind, n, exact count) for n = 1..=enum_max_n.
    pub counts: Vec<(WalkKind, usize, u64)>,
}

pub fn classical_data(cfg: &ClassicalConfig) -> Result<ClassicalData, HarnessError> {
    let msd = classical::msd_estimate(cfg.msd_n, cfg.msd_samples, cfg.seed);
    let mut counts = Vec::new();
    for kind in [WalkKind::NonReversal, WalkKind::SelfAvoiding] {
        for (i, count) in classical::enumerate_up_to(kind, cfg.enum_max_n)?
            .into_iter()
            .enumerate()
        {
            counts.push((kind, i + 1, count));
        }
    }
    Ok(ClassicalData { msd, counts })
}

pub(super) fn run_classical(cfg: &ClassicalConfig) -> Result<Vec<Artifact>, HarnessError> {
    let data = classical_data(cfg)?;
    let mut rows: Vec<Vec<String>> = Vec::new();
    rows.push(vec![
        data.msd.n.to_string(),
        "msd_non_reversal".into(),
        String::new(),
        fmt_f64(data.msd.mean_sq_displacement),
        fmt_f64(data.msd.std_error),
        data.msd.seed.to_string(),
    ]);
    for (kind, n, count) in &data.counts {
        rows.push(vec![
            n.to_string(),
            kind.label().to_string(),
            count.to_string(),
            String::new(),
            String::new(),
            String::new(),
        ]);
    }
    Ok(vec![Artifact::new(
        "classical.csv",
        csv_bytes(&["n", "kind", "count", "msd", "stderr", "seed"], &rows),
    )])
}

// ---------------------------------------------------------------------------
// evolve / heatmap / moments
// ---------------------------------------------------------------------------

pub(super) fn run_evolve(
    cfg: &EvolveConfig,
    include_stats: bool,
) -> Result<Vec<Artifact>, HarnessError> {
    let (coin, _) = cfg.coin.resolve()?;
    let state = cfg.state.resolve()?;

    let mut artifacts = Vec::new();
    let mut walker = WalkerState::new(&state, cfg.t);
    let mut rows = Vec::with_capacity(cfg.t + 1);
    let final_field = loop {
        let field = walker.probability();
        if include_stats {
            rows.push(vec![
                walker.t().to_string(),
                fmt_f64(mean_radial(&field)),
                fmt_f64(std_radial(&field)?),
                fmt_f64(field.total()),
            ]);
        }
        if walker.t() == cfg.t {
            break field;
        }
        walker = walker.step(&coin)?;
    };
    if include_stats {
        artifacts.push(Artifact::new(
            "evolve_stats.csv",
            csv_bytes(&["t", "mean_r", "sigma_r", "total_p"], &rows),
        ));
    }
    artifacts.push(Artifact::new("field.csv", heatmap_csv_bytes(&final_field)));
    artifacts.push(Artifact::new("field.pgm", pgm_bytes(&final_field)));
    Ok(artifacts)
}

pub(super) fn run_moments(cfg: &MomentsConfig) -> Result<Vec<Artifact>, HarnessError> {
    let (coin, params) = cfg.coin.resolve()?;
    let state = cfg.state.resolve()?;
    let field = evolved_field(&coin, &state, cfg.t)?;
    let direct = moment_report(&field, cfg.max_degree)?;

    let mut rows: Vec<Vec<String>> = Vec::new();
    for ((xi, chi), value) in &direct.joint {
        rows.push(vec![
            xi.to_string(),
            chi.to_string(),
            "direct".into(),
            fmt_f64(*value),
        ]);
    }
    // The asymptotic route is defined through the non-repeating eigenphase.
    if coin.family() == CoinFamily::NonRepeating {
        let params = params.expect("parametrized family has params");
        let asymptotic = momentum::asymptotic_moment_report(&params, cfg.max_degree, cfg.grid)?;
        debug_assert_eq!(asymptotic.method, MomentMethod::Asymptotic);
        for ((xi, chi), value) in &asymptotic.joint {
            rows.push(vec![
                xi.to_string(),
                chi.to_string(),
                "asymptotic".into(),
                fmt_f64(*value),
            ]);
        }
    }
    let radial_rows = vec![
        vec![
            "mean_r".to_string(),
            fmt_f64(direct.mean_r.expect("direct report")),
        ],
        vec![
            "sigma_r".to_string(),
            fmt_f64(direct.sigma_r.expect("direct report")),
        ],
    ];
    Ok(vec![
        Artifact::new(
            "moments.csv",
            csv_bytes(&["xi", "chi", "method", "value"], &rows),
        ),
        Artifact::new("radial.csv", csv_bytes(&["stat", "value"], &radial_rows)),
    ])
}
