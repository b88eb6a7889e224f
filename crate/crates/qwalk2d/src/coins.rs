//! The coin operators driving the walk.
//!
//! Three standard unbiased coins (Hadamard⊗Hadamard, Grover, DFT) with exact
//! ±1/2 and ±i/2 entries, and the two parametrized families:
//!
//! - the non-repeating coin, the general special-unitary 4x4 with an exactly
//!   zero diagonal, built from six angles (α, β, δ, ψ, φ, θ) and two
//!   amplitudes (λ, γ) with λ² + γ² ≤ 1;
//! - the non-reversal coin, obtained from it by the anti-diagonal column
//!   permutation, which has an exactly zero anti-diagonal instead.
//!
//! The even position moments of walks driven by these families depend only
//! on five derived quantities: m₁ = α − β + δ + ψ, m₂ = φ + δ,
//! m₃ = φ + α − 2θ + ψ + β, together with λ and γ. [`DerivedInvariants`]
//! exposes them; [`NonRepeatingParams::from_invariants`] constructs fresh
//! constituent angles realizing a given set.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::linalg::{CMat4, CVec4, C_ZERO};

/// Which family a coin matrix was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoinFamily {
    Hadamard4,
    Grover4,
    Dft4,
    NonRepeating,
    NonReversal,
}

impl CoinFamily {
    pub fn label(self) -> &'static str {
        match self {
            CoinFamily::Hadamard4 => "hadamard4",
            CoinFamily::Grover4 => "grover4",
            CoinFamily::Dft4 => "dft4",
            CoinFamily::NonRepeating => "non_repeating",
            CoinFamily::NonReversal => "non_reversal",
        }
    }
}

/// The three fixed-entry coins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StandardCoin {
    Hadamard4,
    Grover4,
    Dft4,
}

/// Wrap an angle into (-pi, pi].
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Parameters of the non-repeating coin: six phase angles in radians and two
/// real amplitudes constrained by λ² + γ² ≤ 1. The third amplitude is the
/// non-negative root f = +sqrt(1 - λ² - γ²).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonRepeatingParams {
    alpha: f64,
    beta: f64,
    delta: f64,
    psi: f64,
    phi: f64,
    theta: f64,
    lambda: f64,
    gamma: f64,
}

impl NonRepeatingParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        alpha: f64,
        beta: f64,
        delta: f64,
        psi: f64,
        phi: f64,
        theta: f64,
        lambda: f64,
        gamma: f64,
    ) -> Result<Self, Error> {
        let sum = lambda * lambda + gamma * gamma;
        if sum > 1.0 || sum.is_nan() {
            return Err(Error::CoinParamsOutOfRange { sum });
        }
        Ok(NonRepeatingParams {
            alpha,
            beta,
            delta,
            psi,
            phi,
            theta,
            lambda,
            gamma,
        })
    }

    /// The balanced reference coin: θ = φ = 3π/4, all other angles -π/4 and
    /// λ = γ = f = 1/√3, so every nonzero entry has modulus 1/√3. Its
    /// non-reversal permutation is the coin used for the example heatmaps.
    pub fn balanced() -> Self {
        let third = 1.0 / 3.0f64.sqrt();
        NonRepeatingParams {
            alpha: -PI / 4.0,
            beta: -PI / 4.0,
            delta: -PI / 4.0,
            psi: -PI / 4.0,
            phi: 3.0 * PI / 4.0,
            theta: 3.0 * PI / 4.0,
            lambda: third,
            gamma: third,
        }
    }

    /// Independent uniform draws for every parameter: angles over (-π, π],
    /// amplitudes uniform over the quarter disk λ, γ ≥ 0, λ² + γ² ≤ 1
    /// (by rejection).
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut angle = || PI - rng.random::<f64>() * 2.0 * PI;
        let alpha = angle();
        let beta = angle();
        let delta = angle();
        let psi = angle();
        let phi = angle();
        let theta = angle();
        let (lambda, gamma) = loop {
            let l: f64 = rng.random();
            let g: f64 = rng.random();
            if l * l + g * g <= 1.0 {
                break (l, g);
            }
        };
        NonRepeatingParams {
            alpha,
            beta,
            delta,
            psi,
            phi,
            theta,
            lambda,
            gamma,
        }
    }

    /// Construct a parameter set realizing the given invariants
    /// (m₁, m₂, m₃, λ, γ) with freshly sampled constituents. The three
    /// invariant equations leave a three-angle family; α, δ and θ are drawn
    /// uniformly and the remaining angles solve the linear system:
    /// φ = m₂ − δ, ψ = (m₁ + m₃ − m₂)/2 − α + θ, β = α − m₁ + δ + ψ.
    pub fn from_invariants<R: Rng + ?Sized>(
        m1: f64,
        m2: f64,
        m3: f64,
        lambda: f64,
        gamma: f64,
        rng: &mut R,
    ) -> Result<Self, Error> {
        let mut angle = || PI - rng.random::<f64>() * 2.0 * PI;
        let alpha = angle();
        let delta = angle();
        let theta = angle();
        let phi = m2 - delta;
        let psi = (m1 + m3 - m2) / 2.0 - alpha + theta;
        let beta = alpha - m1 + delta + psi;
        NonRepeatingParams::new(alpha, beta, delta, psi, phi, theta, lambda, gamma)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn psi(&self) -> f64 {
        self.psi
    }
    pub fn phi(&self) -> f64 {
        self.phi
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// The non-negative third amplitude f = +sqrt(1 - λ² - γ²).
    pub fn f(&self) -> f64 {
        (1.0 - self.lambda * self.lambda - self.gamma * self.gamma).max(0.0).sqrt()
    }

    /// m₁ = α − β + δ + ψ, unwrapped.
    pub fn m1_raw(&self) -> f64 {
        self.alpha - self.beta + self.delta + self.psi
    }

    /// m₂ = φ + δ, unwrapped.
    pub fn m2_raw(&self) -> f64 {
        self.phi + self.delta
    }

    /// m₃ = φ + α − 2θ + ψ + β, unwrapped.
    pub fn m3_raw(&self) -> f64 {
        self.phi + self.alpha - 2.0 * self.theta + self.psi + self.beta
    }

    /// The five-parameter fingerprint (angles reduced to (-π, π]).
    pub fn derived_invariants(&self) -> DerivedInvariants {
        DerivedInvariants {
            m1: wrap_angle(self.m1_raw()),
            m2: wrap_angle(self.m2_raw()),
            m3: wrap_angle(self.m3_raw()),
        }
    }
}

/// The three angle combinations that, together with λ and γ, determine the
/// even position moments of non-repeating (and, numerically, non-reversal)
/// walks. Each is reduced to (-π, π] so that equality tests are well defined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedInvariants {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
}

/// A verified 4x4 unitary coin together with its family tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinMatrix {
    matrix: CMat4,
    family: CoinFamily,
}

fn polar(r: f64, theta: f64) -> Complex64 {
    Complex64::from_polar(r, theta)
}

impl CoinMatrix {
    /// One of the three fixed-entry coins; entries are exactly ±1/2 or ±i/2.
    pub fn standard(kind: StandardCoin) -> Self {
        let h = 0.5;
        let c = Complex64::new;
        let (rows, family) = match kind {
            StandardCoin::Hadamard4 => (
                [
                    [c(h, 0.0), c(h, 0.0), c(h, 0.0), c(h, 0.0)],
                    [c(h, 0.0), c(-h, 0.0), c(h, 0.0), c(-h, 0.0)],
                    [c(h, 0.0), c(h, 0.0), c(-h, 0.0), c(-h, 0.0)],
                    [c(h, 0.0), c(-h, 0.0), c(-h, 0.0), c(h, 0.0)],
                ],
                CoinFamily::Hadamard4,
            ),
            StandardCoin::Grover4 => (
                [
                    [c(-h, 0.0), c(h, 0.0), c(h, 0.0), c(h, 0.0)],
                    [c(h, 0.0), c(-h, 0.0), c(h, 0.0), c(h, 0.0)],
                    [c(h, 0.0), c(h, 0.0), c(-h, 0.0), c(h, 0.0)],
                    [c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)],
                ],
                CoinFamily::Grover4,
            ),
            StandardCoin::Dft4 => (
                [
                    [c(h, 0.0), c(h, 0.0), c(h, 0.0), c(h, 0.0)],
                    [c(h, 0.0), c(0.0, h), c(-h, 0.0), c(0.0, -h)],
                    [c(h, 0.0), c(-h, 0.0), c(h, 0.0), c(-h, 0.0)],
                    [c(h, 0.0), c(0.0, -h), c(-h, 0.0), c(0.0, h)],
                ],
                CoinFamily::Dft4,
            ),
        };
        CoinMatrix {
            matrix: CMat4::from_rows(rows),
            family,
        }
    }

    pub fn hadamard4() -> Self {
        Self::standard(StandardCoin::Hadamard4)
    }

    pub fn grover4() -> Self {
        Self::standard(StandardCoin::Grover4)
    }

    pub fn dft4() -> Self {
        Self::standard(StandardCoin::Dft4)
    }

    /// The non-repeating coin. All four diagonal entries are exactly zero, so
    /// no amplitude ever moves in the same direction twice in a row.
    pub fn non_repeating(p: &NonRepeatingParams) -> Self {
        let (a, b, d, s, ph, th) = (p.alpha, p.beta, p.delta, p.psi, p.phi, p.theta);
        let (l, g, f) = (p.lambda, p.gamma, p.f());
        let rows = [
            [
                C_ZERO,
                polar(l, a),
                polar(g, b),
                polar(f, th),
            ],
            [
                polar(l, -(ph + d + a)),
                C_ZERO,
                -polar(f, s - th + b),
                polar(g, s),
            ],
            [
                -polar(g, -(d + a + s)),
                -polar(f, ph - th + a),
                C_ZERO,
                polar(l, ph),
            ],
            [
                polar(f, th - a - s - ph - b),
                -polar(g, d + a - b),
                polar(l, d),
                C_ZERO,
            ],
        ];
        CoinMatrix {
            matrix: CMat4::from_rows(rows),
            family: CoinFamily::NonRepeating,
        }
    }

    /// The non-reversal coin: the non-repeating coin times the anti-diagonal
    /// permutation, i.e. column j is column 3-j of the non-repeating coin.
    /// Its anti-diagonal is exactly zero, so amplitude never steps back onto
    /// the site it just left.
    pub fn non_reversal(p: &NonRepeatingParams) -> Self {
        let rep = Self::non_repeating(p);
        let mut rows = [[C_ZERO; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                rows[i][j] = rep.matrix.entry(i, 3 - j);
            }
        }
        CoinMatrix {
            matrix: CMat4::from_rows(rows),
            family: CoinFamily::NonReversal,
        }
    }

    /// Build a family member; standard kinds ignore `params`, the
    /// parametrized kinds require it.
    pub fn from_family(family: CoinFamily, params: Option<&NonRepeatingParams>) -> Option<Self> {
        match family {
            CoinFamily::Hadamard4 => Some(Self::hadamard4()),
            CoinFamily::Grover4 => Some(Self::grover4()),
            CoinFamily::Dft4 => Some(Self::dft4()),
            CoinFamily::NonRepeating => params.map(Self::non_repeating),
            CoinFamily::NonReversal => params.map(Self::non_reversal),
        }
    }

    pub fn family(&self) -> CoinFamily {
        self.family
    }

    pub fn matrix(&self) -> &CMat4 {
        &self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix.entry(row, col)
    }

    /// ‖C†C − I‖_max.
    pub fn unitarity_residual(&self) -> f64 {
        self.matrix.unitarity_residual()
    }

    pub fn apply(&self, v: &CVec4) -> CVec4 {
        self.matrix.matvec(v)
    }
}
