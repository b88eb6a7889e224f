//! The walker's wave field on the square lattice and the exact
//! coin-then-shift evolution.
//!
//! The state is a four-channel complex amplitude field over a dense square
//! array of side 2*budget + 1, allocated up front from the requested step
//! budget; the lattice is logically infinite and the array is sized so the
//! light cone never reaches the boundary. Stepping past the budget is a hard
//! error, never a wraparound. The parity-zero half of each array is stored
//! anyway; simplicity won over the 2x memory saving.
//!
//! Channel ordering is fixed: (x+, y+, y-, x-). The shift displaces each
//! post-coin channel one site in its direction: x+ to (x+1, y), y+ to
//! (x, y+1), y- to (x, y-1), x- to (x-1, y).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coins::CoinMatrix;
use crate::error::Error;
use crate::linalg::{vec4_norm_sqr, CVec4, CompensatedSum, C_ZERO};

/// One of the four coin channels, in the fixed component order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoinChannel {
    #[serde(rename = "x+")]
    XPlus,
    #[serde(rename = "y+")]
    YPlus,
    #[serde(rename = "y-")]
    YMinus,
    #[serde(rename = "x-")]
    XMinus,
}

impl CoinChannel {
    pub const ALL: [CoinChannel; 4] = [
        CoinChannel::XPlus,
        CoinChannel::YPlus,
        CoinChannel::YMinus,
        CoinChannel::XMinus,
    ];

    pub fn index(self) -> usize {
        match self {
            CoinChannel::XPlus => 0,
            CoinChannel::YPlus => 1,
            CoinChannel::YMinus => 2,
            CoinChannel::XMinus => 3,
        }
    }

    pub fn from_index(index: usize) -> CoinChannel {
        Self::ALL[index]
    }

    /// The lattice displacement this channel shifts by.
    pub fn offset(self) -> (i64, i64) {
        match self {
            CoinChannel::XPlus => (1, 0),
            CoinChannel::YPlus => (0, 1),
            CoinChannel::YMinus => (0, -1),
            CoinChannel::XMinus => (-1, 0),
        }
    }

    /// The opposite direction.
    pub fn inverse(self) -> CoinChannel {
        match self {
            CoinChannel::XPlus => CoinChannel::XMinus,
            CoinChannel::YPlus => CoinChannel::YMinus,
            CoinChannel::YMinus => CoinChannel::YPlus,
            CoinChannel::XMinus => CoinChannel::XPlus,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CoinChannel::XPlus => "x+",
            CoinChannel::YPlus => "y+",
            CoinChannel::YMinus => "y-",
            CoinChannel::XMinus => "x-",
        }
    }
}

/// A unit-norm coin state placed at the origin at t = 0.
///
/// Inputs within 1e-9 of unit norm are accepted and renormalized, so the
/// stored components are unit to machine precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialCoinState {
    components: CVec4,
}

impl InitialCoinState {
    pub fn new(components: [Complex64; 4]) -> Result<Self, Error> {
        let norm = vec4_norm_sqr(&components).sqrt();
        let deviation = (norm - 1.0).abs();
        if deviation > 1e-9 {
            return Err(Error::NotNormalized { deviation });
        }
        let mut components = components;
        for c in &mut components {
            *c /= norm;
        }
        Ok(InitialCoinState { components })
    }

    /// Amplitude 1 in a single channel.
    pub fn basis(channel: CoinChannel) -> Self {
        let mut components = [C_ZERO; 4];
        components[channel.index()] = Complex64::new(1.0, 0.0);
        InitialCoinState { components }
    }

    /// (1, 1, 1, 1)/2 — the channel-uniform state, a Grover-coin fixed point.
    pub fn uniform() -> Self {
        InitialCoinState {
            components: [Complex64::new(0.5, 0.0); 4],
        }
    }

    /// (1, i, i, -1)/2, the tensor square of the balanced one-dimensional
    /// coin state (1, i)/sqrt(2); gives left-right symmetric spreading for
    /// separable coins.
    pub fn symmetric() -> Self {
        InitialCoinState {
            components: [
                Complex64::new(0.5, 0.0),
                Complex64::new(0.0, 0.5),
                Complex64::new(0.0, 0.5),
                Complex64::new(-0.5, 0.0),
            ],
        }
    }

    /// (1, -1, -1, 1)/2, the tensor square of (1, -1)/sqrt(2); under the
    /// Grover coin this is the state that pushes all amplitude into the
    /// outward-propagating ring.
    pub fn minus_minus() -> Self {
        InitialCoinState {
            components: [
                Complex64::new(0.5, 0.0),
                Complex64::new(-0.5, 0.0),
                Complex64::new(-0.5, 0.0),
                Complex64::new(0.5, 0.0),
            ],
        }
    }

    pub fn components(&self) -> &CVec4 {
        &self.components
    }
}

/// The four-channel amplitude field after `t` steps, stored on a dense
/// square array of half-width `budget`.
///
/// Values are immutable once produced; `step` and `evolve` return new states.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkerState {
    amp: Vec<Complex64>,
    budget: usize,
    t: usize,
}

fn site_base(budget: usize, x: i64, y: i64) -> usize {
    let side = 2 * budget + 1;
    let col = (x + budget as i64) as usize;
    let row = (y + budget as i64) as usize;
    (row * side + col) * 4
}

/// One coin-then-shift sweep: reads amplitudes at time `t` from `src`,
/// writes time t+1 into `dst`. Only the light-cone window is touched.
fn apply_step(src: &[Complex64], budget: usize, t: usize, coin: &CoinMatrix, dst: &mut [Complex64]) {
    let reach = t as i64;
    // Clear the destination window (one site wider than the source cone).
    for y in -(reach + 1)..=(reach + 1) {
        let base = site_base(budget, -(reach + 1), y);
        let len = (2 * (reach + 1) as usize + 1) * 4;
        dst[base..base + len].fill(C_ZERO);
    }
    for y in -reach..=reach {
        for x in -reach..=reach {
            let base = site_base(budget, x, y);
            let v: CVec4 = [src[base], src[base + 1], src[base + 2], src[base + 3]];
            let cv = coin.apply(&v);
            dst[site_base(budget, x + 1, y)] = cv[0];
            dst[site_base(budget, x, y + 1) + 1] = cv[1];
            dst[site_base(budget, x, y - 1) + 2] = cv[2];
            dst[site_base(budget, x - 1, y) + 3] = cv[3];
        }
    }
}

impl WalkerState {
    /// Place `initial` at the origin with t = 0, on an array sized for
    /// `step_budget` steps.
    pub fn new(initial: &InitialCoinState, step_budget: usize) -> Self {
        let side = 2 * step_budget + 1;
        let mut amp = vec![C_ZERO; side * side * 4];
        let base = site_base(step_budget, 0, 0);
        amp[base..base + 4].copy_from_slice(initial.components());
        WalkerState {
            amp,
            budget: step_budget,
            t: 0,
        }
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// The array half-width, equal to the step budget.
    pub fn extent(&self) -> usize {
        self.budget
    }

    /// Amplitude at a site and channel; zero outside the stored array.
    pub fn amplitude(&self, x: i64, y: i64, channel: CoinChannel) -> Complex64 {
        let e = self.budget as i64;
        if x.abs() > e || y.abs() > e {
            return C_ZERO;
        }
        self.amp[site_base(self.budget, x, y) + channel.index()]
    }

    #[cfg(test)]
    pub(crate) fn set_amplitude(&mut self, x: i64, y: i64, channel: CoinChannel, value: Complex64) {
        let base = site_base(self.budget, x, y);
        self.amp[base + channel.index()] = value;
    }

    /// Total squared norm over all sites and channels (compensated sum).
    pub fn norm_sqr(&self) -> f64 {
        let mut acc = CompensatedSum::new();
        for z in &self.amp {
            acc.add(z.norm_sqr());
        }
        acc.value()
    }

    /// One coin-then-shift step. Errors once the step budget is used up.
    pub fn step(&self, coin: &CoinMatrix) -> Result<WalkerState, Error> {
        self.evolve(coin, 1)
    }

    /// `steps` repeated applications of the one-step evolution.
    pub fn evolve(&self, coin: &CoinMatrix, steps: usize) -> Result<WalkerState, Error> {
        if self.t + steps > self.budget {
            return Err(Error::StepBudgetExhausted {
                t: self.t,
                budget: self.budget,
            });
        }
        if steps == 0 {
            return Ok(self.clone());
        }
        let mut cur = self.amp.clone();
        let mut nxt = vec![C_ZERO; self.amp.len()];
        for s in 0..steps {
            apply_step(&cur, self.budget, self.t + s, coin, &mut nxt);
            std::mem::swap(&mut cur, &mut nxt);
        }
        Ok(WalkerState {
            amp: cur,
            budget: self.budget,
            t: self.t + steps,
        })
    }

    /// The site-occupation distribution p(x, y) = sum over channels of
    /// |amplitude|^2, cropped to the light cone.
    pub fn probability(&self) -> ProbabilityField {
        let reach = self.t;
        let side = 2 * reach + 1;
        let mut p = vec![0.0f64; side * side];
        for y in -(reach as i64)..=reach as i64 {
            for x in -(reach as i64)..=reach as i64 {
                let base = site_base(self.budget, x, y);
                let v = &self.amp[base..base + 4];
                let row = (y + reach as i64) as usize;
                let col = (x + reach as i64) as usize;
                p[row * side + col] =
                    v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr() + v[3].norm_sqr();
            }
        }
        ProbabilityField {
            p,
            extent: reach,
            t: self.t,
        }
    }
}

/// A non-negative real field over the lattice window [-extent, extent]^2,
/// summing to 1, tagged with the step count it was measured at.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityField {
    p: Vec<f64>,
    extent: usize,
    t: usize,
}

impl ProbabilityField {
    /// Build a field from an explicit function of the site coordinates.
    /// Rejects negative entries and totals away from 1 by more than 1e-10.
    pub fn from_fn<F: FnMut(i64, i64) -> f64>(
        extent: usize,
        t: usize,
        mut f: F,
    ) -> Result<Self, Error> {
        let side = 2 * extent + 1;
        let mut p = vec![0.0f64; side * side];
        let e = extent as i64;
        for y in -e..=e {
            for x in -e..=e {
                let v = f(x, y);
                if v < 0.0 {
                    return Err(Error::InvalidField {
                        reason: format!("negative probability {v} at ({x}, {y})"),
                    });
                }
                p[((y + e) as usize) * side + (x + e) as usize] = v;
            }
        }
        let field = ProbabilityField { p, extent, t };
        let total = field.total();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidField {
                reason: format!("total probability {total} is not 1"),
            });
        }
        Ok(field)
    }

    pub fn extent(&self) -> usize {
        self.extent
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// p(x, y); zero outside the stored window.
    pub fn get(&self, x: i64, y: i64) -> f64 {
        let e = self.extent as i64;
        if x.abs() > e || y.abs() > e {
            return 0.0;
        }
        let side = 2 * self.extent + 1;
        self.p[((y + e) as usize) * side + (x + e) as usize]
    }

    /// Iterate over (x, y, p) in row-major order (y slow, x fast).
    pub fn iter(&self) -> impl Iterator<Item = (i64, i64, f64)> + '_ {
        let e = self.extent as i64;
        let side = 2 * self.extent + 1;
        self.p.iter().enumerate().map(move |(i, &v)| {
            let y = (i / side) as i64 - e;
            let x = (i % side) as i64 - e;
            (x, y, v)
        })
    }

    /// Compensated total; 1 within 1e-10 for any evolved state.
    pub fn total(&self) -> f64 {
        let mut acc = CompensatedSum::new();
        for &v in &self.p {
            acc.add(v);
        }
        acc.value()
    }

    pub fn max_value(&self) -> f64 {
        self.p.iter().cloned().fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coins::{CoinMatrix, NonRepeatingParams};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn init_basis_state() {
        let w = WalkerState::new(&InitialCoinState::basis(CoinChannel::XPlus), 3);
        assert_eq!(w.t(), 0);
        assert_eq!(w.amplitude(0, 0, CoinChannel::XPlus), c(1.0, 0.0));
        assert_eq!(w.amplitude(0, 0, CoinChannel::YPlus), c(0.0, 0.0));
        assert_eq!(w.amplitude(1, 0, CoinChannel::XPlus), c(0.0, 0.0));
        assert!((w.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn named_states_have_exact_unit_norm() {
        for s in [
            InitialCoinState::uniform(),
            InitialCoinState::symmetric(),
            InitialCoinState::minus_minus(),
        ] {
            assert_eq!(vec4_norm_sqr(s.components()), 1.0);
        }
    }

    #[test]
    fn rejects_non_normalized_input() {
        let err = InitialCoinState::new([c(1.0, 0.0), c(0.1, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(err, Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn renormalizes_tiny_drift() {
        let eps = 1e-10;
        let s = InitialCoinState::new([c(1.0 + eps, 0.0), C_ZERO, C_ZERO, C_ZERO]).unwrap();
        assert!((vec4_norm_sqr(s.components()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grover_fixed_point_single_step() {
        // The channel-uniform state is a Grover eigenvector: after one step
        // amplitude 1/2 sits at each neighbor in its moved-to channel.
        let w = WalkerState::new(&InitialCoinState::uniform(), 2);
        let w = w.step(&CoinMatrix::grover4()).unwrap();
        assert_eq!(w.t(), 1);
        assert_eq!(w.amplitude(1, 0, CoinChannel::XPlus), c(0.5, 0.0));
        assert_eq!(w.amplitude(0, 1, CoinChannel::YPlus), c(0.5, 0.0));
        assert_eq!(w.amplitude(0, -1, CoinChannel::YMinus), c(0.5, 0.0));
        assert_eq!(w.amplitude(-1, 0, CoinChannel::XMinus), c(0.5, 0.0));
        assert_eq!(w.amplitude(1, 0, CoinChannel::YPlus), c(0.0, 0.0));
    }

    #[test]
    fn hadamard_step_from_basis_state() {
        // First column of the Hadamard coin is (1,1,1,1)/2: probability 1/4
        // at each of the four neighbors.
        let w = WalkerState::new(&InitialCoinState::basis(CoinChannel::XPlus), 1);
        let w = w.step(&CoinMatrix::hadamard4()).unwrap();
        let p = w.probability();
        for (x, y) in [(1, 0), (0, 1), (0, -1), (-1, 0)] {
            assert!((p.get(x, y) - 0.25).abs() < 1e-15);
        }
        assert_eq!(p.get(0, 0), 0.0);
        assert!((p.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_repeating_blocks_repeated_direction() {
        // Zero diagonal: nothing can move +x twice in a row, so after two
        // steps from the x+ basis state the site (2, 0) is exactly empty.
        let p = NonRepeatingParams::balanced();
        let coin = CoinMatrix::non_repeating(&p);
        let w = WalkerState::new(&InitialCoinState::basis(CoinChannel::XPlus), 2);
        let w = w.evolve(&coin, 2).unwrap();
        for ch in CoinChannel::ALL {
            assert_eq!(w.amplitude(2, 0, ch), c(0.0, 0.0));
        }
    }

    #[test]
    fn non_reversal_never_returns_to_origin_at_t2() {
        let p = NonRepeatingParams::balanced();
        let coin = CoinMatrix::non_reversal(&p);
        for ch in CoinChannel::ALL {
            let w = WalkerState::new(&InitialCoinState::basis(ch), 2);
            let w = w.evolve(&coin, 2).unwrap();
            let field = w.probability();
            assert_eq!(field.get(0, 0), 0.0);
        }
    }

    #[test]
    fn evolve_zero_steps_is_identity() {
        let w = WalkerState::new(&InitialCoinState::symmetric(), 4);
        let same = w.evolve(&CoinMatrix::dft4(), 0).unwrap();
        assert_eq!(w, same);
    }

    #[test]
    fn evolve_matches_repeated_step() {
        let coin = CoinMatrix::dft4();
        let w = WalkerState::new(&InitialCoinState::symmetric(), 6);
        let direct = w.evolve(&coin, 6).unwrap();
        let mut stepped = w;
        for _ in 0..6 {
            stepped = stepped.step(&coin).unwrap();
        }
        assert_eq!(direct, stepped);
    }

    #[test]
    fn budget_exhaustion_is_hard_error() {
        let w = WalkerState::new(&InitialCoinState::uniform(), 2);
        assert!(w.evolve(&CoinMatrix::grover4(), 3).is_err());
        let w = w.evolve(&CoinMatrix::grover4(), 2).unwrap();
        assert!(matches!(
            w.step(&CoinMatrix::grover4()),
            Err(Error::StepBudgetExhausted { t: 2, budget: 2 })
        ));
    }

    #[test]
    fn light_cone_and_parity_are_exact() {
        let coin = CoinMatrix::hadamard4();
        let w = WalkerState::new(&InitialCoinState::symmetric(), 9)
            .evolve(&coin, 7)
            .unwrap();
        let t = 7i64;
        let e = w.extent() as i64;
        for y in -e..=e {
            for x in -e..=e {
                let outside = x.abs().max(y.abs()) > t;
                let odd_parity = (x + y + t) % 2 != 0;
                if outside || odd_parity {
                    for ch in CoinChannel::ALL {
                        assert_eq!(w.amplitude(x, y, ch), c(0.0, 0.0), "at ({x},{y})");
                    }
                }
            }
        }
    }

    #[test]
    fn norm_conserved_over_200_steps_for_every_family() {
        use rayon::prelude::*;
        let params = NonRepeatingParams::balanced();
        let coins = [
            CoinMatrix::hadamard4(),
            CoinMatrix::grover4(),
            CoinMatrix::dft4(),
            CoinMatrix::non_repeating(&params),
            CoinMatrix::non_reversal(&params),
        ];
        let worst = coins
            .par_iter()
            .map(|coin| {
                let w = WalkerState::new(&InitialCoinState::symmetric(), 200)
                    .evolve(coin, 200)
                    .unwrap();
                (w.probability().total() - 1.0).abs()
            })
            .reduce(|| 0.0, f64::max);
        assert!(worst <= 1e-10, "worst |sum p - 1| = {worst:.3e}");
    }

    #[test]
    fn grover_ring_morphology_at_t100() {
        // Under the Grover coin the (1,-1,-1,1)/2 state pushes the mass into
        // an outward ring, while the separable symmetric state leaves a
        // dominant central spike: compare where the mass and the peak sit.
        let coin = CoinMatrix::grover4();
        let field = |s: InitialCoinState| {
            WalkerState::new(&s, 100)
                .evolve(&coin, 100)
                .unwrap()
                .probability()
        };
        let ring = field(InitialCoinState::minus_minus());
        let spike = field(InitialCoinState::symmetric());

        let center_mass = |f: &ProbabilityField| {
            let mut acc = CompensatedSum::new();
            for (x, y, p) in f.iter() {
                if x * x + y * y <= 100 {
                    acc.add(p);
                }
            }
            acc.value()
        };
        assert!(center_mass(&ring) < center_mass(&spike));

        let peak_radius = |f: &ProbabilityField| {
            let (mut best_r2, mut best_p) = (0i64, 0.0f64);
            for (x, y, p) in f.iter() {
                if p > best_p {
                    best_p = p;
                    best_r2 = x * x + y * y;
                }
            }
            (best_r2 as f64).sqrt()
        };
        assert!(peak_radius(&ring) > 50.0, "ring peak at {}", peak_radius(&ring));
        assert!(peak_radius(&ring) > peak_radius(&spike));
    }

    #[test]
    fn evolution_is_bit_deterministic() {
        let p = NonRepeatingParams::balanced();
        let coin = CoinMatrix::non_reversal(&p);
        let run = || {
            WalkerState::new(&InitialCoinState::symmetric(), 40)
                .evolve(&coin, 40)
                .unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn probability_of_initial_state() {
        let w = WalkerState::new(&InitialCoinState::symmetric(), 5);
        let p = w.probability();
        assert_eq!(p.extent(), 0);
        assert_eq!(p.get(0, 0), 1.0);
        assert_eq!(p.total(), 1.0);
    }

    #[test]
    fn field_from_fn_validates() {
        let ok = ProbabilityField::from_fn(1, 1, |x, y| {
            if (x.abs() + y.abs()) == 1 {
                0.25
            } else {
                0.0
            }
        });
        assert!(ok.is_ok());
        let bad_total = ProbabilityField::from_fn(1, 1, |_, _| 0.2);
        assert!(bad_total.is_err());
        let negative = ProbabilityField::from_fn(1, 1, |x, _| x as f64);
        assert!(negative.is_err());
    }
}
