//! Classical baselines: seeded Monte Carlo sampling of non-reversal walks
//! and exact backtracking enumeration of non-reversal and self-avoiding
//! walks on the square lattice.
//!
//! All randomness is ChaCha8 with explicit seeds; Monte Carlo statistics are
//! accumulated as exact integers per sub-stream so the result is independent
//! of thread count and platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::lattice::CoinChannel;

/// Exact enumeration is capped here: 4 * 3^15 nodes is desk scale, beyond it
/// is not.
pub const MAX_ENUMERATION_STEPS: usize = 16;

/// Which path family to enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WalkKind {
    SelfAvoiding,
    NonReversal,
}

impl WalkKind {
    pub fn label(self) -> &'static str {
        match self {
            WalkKind::SelfAvoiding => "self_avoiding",
            WalkKind::NonReversal => "non_reversal",
        }
    }
}

/// A lattice path from the origin: the move sequence and the site sequence
/// it visits (origin included, so `visited.len() == steps.len() + 1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePath {
    steps: Vec<CoinChannel>,
    visited: Vec<(i64, i64)>,
}

impl LatticePath {
    pub fn steps(&self) -> &[CoinChannel] {
        &self.steps
    }

    pub fn visited(&self) -> &[(i64, i64)] {
        &self.visited
    }

    pub fn endpoint(&self) -> (i64, i64) {
        *self.visited.last().expect("path always contains the origin")
    }

    /// Squared endpoint distance from the origin.
    pub fn r_squared(&self) -> u64 {
        let (x, y) = self.endpoint();
        (x * x + y * y) as u64
    }

    /// No move is immediately followed by its inverse.
    pub fn is_non_reversal(&self) -> bool {
        self.steps
            .windows(2)
            .all(|w| w[1] != w[0].inverse())
    }

    /// No site is visited twice.
    pub fn is_self_avoiding(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.visited.iter().all(|site| seen.insert(*site))
    }
}

/// Draw the next move: uniform over all four directions for the first step,
/// uniform over the three non-reversing directions afterwards.
fn next_move<R: Rng + ?Sized>(rng: &mut R, last: Option<CoinChannel>) -> CoinChannel {
    match last {
        None => CoinChannel::ALL[rng.random_range(0..4)],
        Some(prev) => {
            let banned = prev.inverse();
            let mut pick = rng.random_range(0..3);
            for ch in CoinChannel::ALL {
                if ch == banned {
                    continue;
                }
                if pick == 0 {
                    return ch;
                }
                pick -= 1;
            }
            unreachable!("three candidates always remain")
        }
    }
}

/// Sample one n-step non-reversal path, deterministic per seed.
pub fn sample_non_reversal(n: usize, seed: u64) -> LatticePath {
    assert!(n >= 1, "a path needs at least one step");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut steps = Vec::with_capacity(n);
    let mut visited = Vec::with_capacity(n + 1);
    let (mut x, mut y) = (0i64, 0i64);
    visited.push((x, y));
    let mut last = None;
    for _ in 0..n {
        let mv = next_move(&mut rng, last);
        let (dx, dy) = mv.offset();
        x += dx;
        y += dy;
        steps.push(mv);
        visited.push((x, y));
        last = Some(mv);
    }
    LatticePath { steps, visited }
}

/// Monte Carlo statistics of the squared endpoint distance over an ensemble
/// of non-reversal walks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WalkEnsembleStats {
    pub n: usize,
    pub samples: usize,
    pub mean_sq_displacement: f64,
    pub std_error: f64,
    pub seed: u64,
}

const MSD_BATCH: usize = 4096;

/// Estimate the mean squared displacement of the n-step non-reversal walk
/// from `samples` independent paths. Batches map to ChaCha sub-streams and
/// the per-batch sums are exact integers, so the estimate does not depend on
/// scheduling.
pub fn msd_estimate(n: usize, samples: usize, seed: u64) -> WalkEnsembleStats {
    assert!(n >= 1, "a path needs at least one step");
    assert!(samples >= 100, "need at least 100 samples");
    let batches = samples.div_ceil(MSD_BATCH);
    let (sum_r2, sum_r4) = (0..batches)
        .into_par_iter()
        .map(|batch| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(batch as u64);
            let count = MSD_BATCH.min(samples - batch * MSD_BATCH);
            let mut sum_r2: u128 = 0;
            let mut sum_r4: u128 = 0;
            for _ in 0..count {
                let (mut x, mut y) = (0i64, 0i64);
                let mut last = None;
                for _ in 0..n {
                    let mv = next_move(&mut rng, last);
                    let (dx, dy) = mv.offset();
                    x += dx;
                    y += dy;
                    last = Some(mv);
                }
                let r2 = (x * x + y * y) as u128;
                sum_r2 += r2;
                sum_r4 += r2 * r2;
            }
            (sum_r2, sum_r4)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));

    let m = samples as f64;
    let mean = sum_r2 as f64 / m;
    // Unbiased sample variance of r^2, then the standard error of the mean.
    let variance = ((sum_r4 as f64) - (sum_r2 as f64) * (sum_r2 as f64) / m) / (m - 1.0);
    let std_error = (variance.max(0.0) / m).sqrt();
    WalkEnsembleStats {
        n,
        samples,
        mean_sq_displacement: mean,
        std_error,
        seed,
    }
}

struct VisitGrid {
    side: usize,
    offset: i64,
    cells: Vec<bool>,
}

impl VisitGrid {
    fn new(n: usize) -> Self {
        let offset = n as i64;
        let side = 2 * n + 1;
        VisitGrid {
            side,
            offset,
            cells: vec![false; side * side],
        }
    }

    fn index(&self, x: i64, y: i64) -> usize {
        ((y + self.offset) as usize) * self.side + (x + self.offset) as usize
    }
}

struct Dfs<'a> {
    kind: WalkKind,
    max: usize,
    grid: VisitGrid,
    counts: &'a mut [u64],
}

impl Dfs<'_> {
    fn walk(&mut self, x: i64, y: i64, last: CoinChannel, depth: usize) {
        self.counts[depth] += 1;
        if depth == self.max {
            return;
        }
        for mv in CoinChannel::ALL {
            if mv == last.inverse() {
                continue;
            }
            let (dx, dy) = mv.offset();
            let (nx, ny) = (x + dx, y + dy);
            match self.kind {
                WalkKind::NonReversal => {
                    self.walk(nx, ny, mv, depth + 1);
                }
                WalkKind::SelfAvoiding => {
                    let idx = self.grid.index(nx, ny);
                    if self.grid.cells[idx] {
                        continue;
                    }
                    self.grid.cells[idx] = true;
                    self.walk(nx, ny, mv, depth + 1);
                    self.grid.cells[idx] = false;
                }
            }
        }
    }
}

/// Exact counts of distinct walks of every length 1..=n in one backtracking
/// sweep, parallelized over the four first moves. Self-avoiding walks are a
/// subset of non-reversal walks, so the non-reversal pruning applies to both.
pub fn enumerate_up_to(kind: WalkKind, n: usize) -> Result<Vec<u64>, Error> {
    if n > MAX_ENUMERATION_STEPS {
        return Err(Error::EnumerationBudget {
            n,
            max: MAX_ENUMERATION_STEPS,
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let totals = CoinChannel::ALL
        .into_par_iter()
        .map(|first| {
            let mut counts = vec![0u64; n + 1];
            let mut grid = VisitGrid::new(n);
            let origin = grid.index(0, 0);
            grid.cells[origin] = true;
            let (dx, dy) = first.offset();
            let idx = grid.index(dx, dy);
            grid.cells[idx] = true;
            let mut dfs = Dfs {
                kind,
                max: n,
                grid,
                counts: &mut counts,
            };
            dfs.walk(dx, dy, first, 1);
            counts
        })
        .reduce(
            || vec![0u64; n + 1],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(&b) {
                    *x += y;
                }
                a
            },
        );
    Ok(totals[1..].to_vec())
}

/// Exact count of distinct n-step walks of the given kind from the origin.
pub fn enumerate(kind: WalkKind, n: usize) -> Result<u64, Error> {
    if n == 0 {
        return Ok(1);
    }
    Ok(*enumerate_up_to(kind, n)?
        .last()
        .expect("n >= 1 yields at least one count"))
}
