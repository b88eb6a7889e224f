//! Fourier-space machinery for the parametrized coin families.
//!
//! With the transform Ψ̂(k) = Σ Ψ(x, y) e^{i(kx·x + ky·y)} the one-step
//! operator factorizes as U_c(k) = S(k)·C with
//! S(k) = diag(e^{ikx}, e^{iky}, e^{-iky}, e^{-ikx}).
//!
//! For the non-repeating coin the characteristic polynomial of U(k) is the
//! biquadratic p⁴ + 2b·p² + 1 with the real band parameter
//!
//!   b = γ²cosΘ₁ − λ²cosΘ₂ − f²cosΘ₃,
//!   Θ₁ = m₁ − kx + ky,  Θ₂ = m₂ − kx − ky,  Θ₃ = m₃,
//!
//! so the spectrum is the quadruple {±e^{±iω}} with cos(2ω) = −b and the
//! eigenphase ω(k) ∈ [0, π/2]. Even joint moments grow as
//! ⟨X^ξ Y^χ⟩ → c·t^{ξ+χ} with c the Brillouin-zone average of
//! (∂ω/∂kx)^ξ (∂ω/∂ky)^χ, evaluated here on a shifted midpoint grid.
//!
//! For the non-reversal coin the quartic is p⁴ + Δp³ + Ξp² + Δ*p + 1; it is
//! quasi-symmetric (real Δ, conjugate-paired spectrum) exactly when
//! b₁ = −b₂ for b₁ = α + φ − θ, b₂ = β + ψ − θ, and in general its spectrum
//! is not closed under negation, which is why that family is handled
//! numerically.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::analysis::{MomentMethod, MomentReport};
use crate::coins::{CoinMatrix, NonRepeatingParams};
use crate::error::Error;
use crate::linalg::{quartic_roots, CMat4, CompensatedSum, C_ONE};

/// A point of the Brillouin zone [-pi, pi)^2. Constructor wraps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumPoint {
    kx: f64,
    ky: f64,
}

fn wrap_half_open(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y >= PI {
        -PI
    } else {
        y
    }
}

impl MomentumPoint {
    pub fn new(kx: f64, ky: f64) -> Self {
        MomentumPoint {
            kx: wrap_half_open(kx),
            ky: wrap_half_open(ky),
        }
    }

    pub fn kx(&self) -> f64 {
        self.kx
    }

    pub fn ky(&self) -> f64 {
        self.ky
    }
}

/// The momentum-space one-step operator S(k)·C.
pub fn u_momentum(coin: &CoinMatrix, k: MomentumPoint) -> CMat4 {
    let mut m = *coin.matrix();
    m.scale_row(0, Complex64::from_polar(1.0, k.kx));
    m.scale_row(1, Complex64::from_polar(1.0, k.ky));
    m.scale_row(2, Complex64::from_polar(1.0, -k.ky));
    m.scale_row(3, Complex64::from_polar(1.0, -k.kx));
    m
}

fn phase_args(p: &NonRepeatingParams, k: MomentumPoint) -> (f64, f64, f64) {
    (
        p.m1_raw() - k.kx + k.ky,
        p.m2_raw() - k.kx - k.ky,
        p.m3_raw(),
    )
}

/// The band parameter b(k) of the non-repeating walk; |b| <= 1 by unitarity.
pub fn band_parameter(p: &NonRepeatingParams, k: MomentumPoint) -> f64 {
    let (t1, t2, t3) = phase_args(p, k);
    let f = p.f();
    p.gamma() * p.gamma() * t1.cos() - p.lambda() * p.lambda() * t2.cos() - f * f * t3.cos()
}

/// Closed-form characteristic quartic of U(k) for one of the two families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CharQuartic {
    /// p^4 + a p^2 + 1 with a = 2b real, |a| <= 2.
    NonRepeating { a: f64 },
    /// p^4 + delta p^3 + xi p^2 + conj(delta) p + 1 with xi real.
    NonReversal { delta: Complex64, xi: f64 },
}

impl CharQuartic {
    /// Monic coefficients, lowest degree first (matches
    /// [`crate::linalg::char_poly`]).
    pub fn coefficients(&self) -> [Complex64; 5] {
        match *self {
            CharQuartic::NonRepeating { a } => [
                C_ONE,
                Complex64::new(0.0, 0.0),
                Complex64::new(a, 0.0),
                Complex64::new(0.0, 0.0),
                C_ONE,
            ],
            CharQuartic::NonReversal { delta, xi } => {
                [C_ONE, delta.conj(), Complex64::new(xi, 0.0), delta, C_ONE]
            }
        }
    }

    /// The four roots. The biquadratic case is solved in closed form; the
    /// general quartic numerically.
    pub fn roots(&self) -> [Complex64; 4] {
        match *self {
            CharQuartic::NonRepeating { a } => {
                let b = a / 2.0;
                let omega = 0.5 * (-b).clamp(-1.0, 1.0).acos();
                eigenvalue_quadruple(omega)
            }
            CharQuartic::NonReversal { .. } => quartic_roots(&self.coefficients()),
        }
    }
}

/// Closed-form characteristic quartic of the non-repeating walk at `k`.
pub fn char_quartic_non_repeating(p: &NonRepeatingParams, k: MomentumPoint) -> CharQuartic {
    CharQuartic::NonRepeating {
        a: 2.0 * band_parameter(p, k),
    }
}

/// Closed-form characteristic quartic of the non-reversal walk at `k`.
pub fn char_quartic_non_reversal(p: &NonRepeatingParams, k: MomentumPoint) -> CharQuartic {
    let f = p.f();
    let (l2, g2) = (p.lambda() * p.lambda(), p.gamma() * p.gamma());
    let b1 = p.alpha() + p.phi() - p.theta();
    let b2 = p.beta() + p.psi() - p.theta();
    let e = |t: f64| Complex64::from_polar(1.0, t);
    let delta = f * (e(b1 - k.ky) + e(b2 + k.ky)
        - e(-(b1 + b2 + p.theta() + k.kx))
        - e(p.theta() + k.kx));
    let xi = 2.0
        * (f * f * (b1 + b2).cos()
            + (l2 - 1.0) * (k.kx + k.ky + b2 + p.theta()).cos()
            + (g2 - 1.0) * (k.kx - k.ky + b1 + p.theta()).cos());
    CharQuartic::NonReversal { delta, xi }
}

/// The eigenphase of the non-repeating walk at one momentum node, together
/// with the band parameter it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPhase {
    /// omega in [0, pi/2], defined by cos(2 omega) = -b.
    pub omega: f64,
    /// The band parameter b.
    pub b: f64,
}

/// The spectrum quadruple {e^{i omega}, -e^{i omega}, e^{-i omega},
/// -e^{-i omega}}.
pub fn eigenvalue_quadruple(omega: f64) -> [Complex64; 4] {
    let p = Complex64::from_polar(1.0, omega);
    [p, -p, p.conj(), -p.conj()]
}

/// Eigenphase of U_nonrep(k). Unitarity forces |b| <= 1 analytically;
/// floating drift up to 1e-14 is clamped and anything past 1e-12 means the
/// inputs were not a valid coin, which is a bug rather than an error.
pub fn eigen_phase(p: &NonRepeatingParams, k: MomentumPoint) -> EigenPhase {
    let b = band_parameter(p, k);
    assert!(
        b.abs() <= 1.0 + 1e-12,
        "band parameter |b| = {} exceeds 1: non-unitary coin parameters",
        b.abs()
    );
    EigenPhase {
        omega: 0.5 * (-b).clamp(-1.0, 1.0).acos(),
        b,
    }
}

/// Margin below which a node counts as sitting on a band edge, where the
/// gradient denominator sqrt(1 - b^2) vanishes.
pub const BAND_EDGE_MARGIN: f64 = 1e-9;

/// Analytic gradient (d omega/d kx, d omega/d ky) of the eigenphase, via the
/// chain rule through b(Theta_1, Theta_2). Errors within `BAND_EDGE_MARGIN`
/// of a band edge; quadrature callers must avoid such nodes.
pub fn grad_omega(p: &NonRepeatingParams, k: MomentumPoint) -> Result<(f64, f64), Error> {
    let (t1, t2, _) = phase_args(p, k);
    let b = band_parameter(p, k);
    if b.abs() >= 1.0 - BAND_EDGE_MARGIN {
        return Err(Error::BandEdge { b_abs: b.abs() });
    }
    let (l2, g2) = (p.lambda() * p.lambda(), p.gamma() * p.gamma());
    let db_dkx = g2 * t1.sin() - l2 * t2.sin();
    let db_dky = -g2 * t1.sin() - l2 * t2.sin();
    let denom = 2.0 * (1.0 - b * b).sqrt();
    Ok((db_dkx / denom, db_dky / denom))
}

/// Shifted midpoint nodes for an n-cell discretization of [-pi, pi).
pub fn midpoint_nodes(n: usize) -> impl Iterator<Item = f64> {
    let cell = 2.0 * PI / n as f64;
    (0..n).map(move |i| -PI + (i as f64 + 0.5) * cell)
}

/// Default quadrature grid (per axis) for asymptotic moments.
pub const DEFAULT_QUADRATURE_GRID: usize = 512;

/// The growth coefficient c of an even joint moment:
/// ⟨X^ξ Y^χ⟩ → c·t^{ξ+χ} with c the Brillouin-zone average of
/// (∂ω/∂kx)^ξ (∂ω/∂ky)^χ over a shifted midpoint grid of `grid`² nodes.
///
/// The node offset keeps band-edge loci (measure zero) away from the grid
/// for generic parameters; a node that still lands within the margin
/// surfaces as a `BandEdge` error so the caller can change the grid.
///
/// Nodes are evaluated in parallel rows with a fixed-order reduction, so the
/// result is independent of thread count.
pub fn asymptotic_even_moment(
    p: &NonRepeatingParams,
    xi: u32,
    chi: u32,
    grid: usize,
) -> Result<f64, Error> {
    let degree = xi + chi;
    if !degree.is_multiple_of(2) {
        return Err(Error::OddMomentDegree { degree });
    }
    assert!(grid >= 2, "quadrature grid must have at least 2 cells per axis");
    let kys: Vec<f64> = midpoint_nodes(grid).collect();
    let row_sums: Vec<Result<f64, Error>> = midpoint_nodes(grid)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|kx| {
            let mut acc = CompensatedSum::new();
            for &ky in &kys {
                let (gx, gy) = grad_omega(p, MomentumPoint::new(kx, ky))?;
                acc.add(gx.powi(xi as i32) * gy.powi(chi as i32));
            }
            Ok(acc.value())
        })
        .collect();
    let mut acc = CompensatedSum::new();
    for row in row_sums {
        acc.add(row?);
    }
    Ok(acc.value() / (grid * grid) as f64)
}

/// Asymptotic growth coefficients for every even-total exponent pair up to
/// `max_total_degree`, as a report tagged with asymptotic provenance.
pub fn asymptotic_moment_report(
    p: &NonRepeatingParams,
    max_total_degree: u32,
    grid: usize,
) -> Result<MomentReport, Error> {
    let mut joint = std::collections::BTreeMap::new();
    for (xi, chi) in crate::analysis::exponent_pairs(max_total_degree) {
        if (xi + chi) % 2 == 0 {
            joint.insert((xi, chi), asymptotic_even_moment(p, xi, chi, grid)?);
        }
    }
    Ok(MomentReport {
        mean_r: None,
        sigma_r: None,
        joint,
        method: MomentMethod::Asymptotic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coins::NonRepeatingParams;
    use crate::linalg::{char_poly, multiset_distance};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_k<R: Rng>(rng: &mut R) -> MomentumPoint {
        MomentumPoint::new(
            PI - rng.random::<f64>() * 2.0 * PI,
            PI - rng.random::<f64>() * 2.0 * PI,
        )
    }

    #[test]
    fn u_momentum_at_zero_is_the_coin() {
        let coin = CoinMatrix::grover4();
        let u = u_momentum(&coin, MomentumPoint::new(0.0, 0.0));
        assert_eq!(u.max_abs_diff(coin.matrix()), 0.0);
    }

    #[test]
    fn u_momentum_hadamard_first_row() {
        let u = u_momentum(&CoinMatrix::hadamard4(), MomentumPoint::new(PI / 2.0, 0.0));
        for j in 0..4 {
            assert!((u.entry(0, j) - Complex64::new(0.0, 0.5)).norm() < 1e-15);
        }
    }

    #[test]
    fn u_momentum_stays_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let k = random_k(&mut rng);
            let u = u_momentum(&CoinMatrix::grover4(), k);
            assert!(u.unitarity_residual() <= 1e-12);
            // |det| = 1: constant char-poly coefficient has unit modulus.
            let coeffs = char_poly(&u);
            assert!((coeffs[0].norm() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn flat_band_parameter_cases() {
        // lambda = gamma = 0 leaves b = -cos(m3), constant in k.
        let p = NonRepeatingParams::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let k = MomentumPoint::new(0.7, -1.3);
        match char_quartic_non_repeating(&p, k) {
            CharQuartic::NonRepeating { a } => assert!((a + 2.0).abs() < 1e-15),
            _ => unreachable!(),
        }
        assert_eq!(eigen_phase(&p, k).omega, 0.0);

        // phi = pi makes m3 = pi, so b = 1 and omega = pi/2.
        let p = NonRepeatingParams::new(0.0, 0.0, 0.0, 0.0, PI, 0.0, 0.0, 0.0).unwrap();
        assert!((eigen_phase(&p, k).omega - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn non_repeating_quartic_matches_numeric_char_poly() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut worst = 0.0f64;
        for _ in 0..300 {
            let p = NonRepeatingParams::sample(&mut rng);
            let k = random_k(&mut rng);
            let closed = char_quartic_non_repeating(&p, k).coefficients();
            let numeric = char_poly(&u_momentum(&CoinMatrix::non_repeating(&p), k));
            for (c, n) in closed.iter().zip(&numeric) {
                worst = worst.max((c - n).norm());
            }
            // the p^2 coefficient must come out real numerically
            assert!(numeric[2].im.abs() <= 1e-12);
        }
        assert!(worst <= 1e-10, "worst coefficient deviation {worst}");
    }

    #[test]
    fn balanced_coin_quartic_at_origin() {
        let p = NonRepeatingParams::balanced();
        let k = MomentumPoint::new(0.0, 0.0);
        let closed = char_quartic_non_repeating(&p, k).coefficients();
        let numeric = char_poly(&u_momentum(&CoinMatrix::non_repeating(&p), k));
        for (c, n) in closed.iter().zip(&numeric) {
            assert!((c - n).norm() <= 1e-12);
        }
    }

    #[test]
    fn non_reversal_quartic_matches_numeric_char_poly() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let mut worst = 0.0f64;
        for _ in 0..300 {
            let p = NonRepeatingParams::sample(&mut rng);
            let k = random_k(&mut rng);
            let closed = char_quartic_non_reversal(&p, k).coefficients();
            let numeric = char_poly(&u_momentum(&CoinMatrix::non_reversal(&p), k));
            for (c, n) in closed.iter().zip(&numeric) {
                worst = worst.max((c - n).norm());
            }
        }
        assert!(worst <= 1e-10, "worst coefficient deviation {worst}");
    }

    fn quasi_symmetric_params(rng: &mut ChaCha8Rng) -> NonRepeatingParams {
        // b1 = -b2 requires 2 theta = alpha + phi + beta + psi.
        let mut angle = || PI - rng.random::<f64>() * 2.0 * PI;
        let alpha = angle();
        let beta = angle();
        let delta = angle();
        let psi = angle();
        let phi = angle();
        let theta = (alpha + phi + beta + psi) / 2.0;
        let (lambda, gamma) = loop {
            let l: f64 = rng.random();
            let g: f64 = rng.random();
            if l * l + g * g <= 1.0 {
                break (l, g);
            }
        };
        NonRepeatingParams::new(alpha, beta, delta, psi, phi, theta, lambda, gamma).unwrap()
    }

    #[test]
    fn quasi_symmetric_case_has_real_delta_and_conjugate_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for _ in 0..100 {
            let p = quasi_symmetric_params(&mut rng);
            let k = random_k(&mut rng);
            match char_quartic_non_reversal(&p, k) {
                CharQuartic::NonReversal { delta, .. } => {
                    assert!(delta.im.abs() <= 1e-12, "delta.im = {}", delta.im);
                }
                _ => unreachable!(),
            }
            let roots = quartic_roots(&char_poly(&u_momentum(&CoinMatrix::non_reversal(&p), k)));
            let conjugated = [
                roots[0].conj(),
                roots[1].conj(),
                roots[2].conj(),
                roots[3].conj(),
            ];
            assert!(multiset_distance(&roots, &conjugated) <= 1e-10);
        }
    }

    #[test]
    fn generic_non_reversal_spectrum_not_negation_closed() {
        // Even-moment state independence hinges on a negation-closed
        // spectrum; generic non-reversal coins violate that visibly.
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        let mut max_violation = 0.0f64;
        for _ in 0..50 {
            let p = NonRepeatingParams::sample(&mut rng);
            let k = random_k(&mut rng);
            let roots = quartic_roots(&char_poly(&u_momentum(&CoinMatrix::non_reversal(&p), k)));
            let negated = [-roots[0], -roots[1], -roots[2], -roots[3]];
            max_violation = max_violation.max(multiset_distance(&roots, &negated));
        }
        assert!(max_violation >= 1e-3, "max violation {max_violation}");
    }

    #[test]
    fn eigenphase_quadruple_matches_numeric_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        for _ in 0..200 {
            let p = NonRepeatingParams::sample(&mut rng);
            let k = random_k(&mut rng);
            let quad = eigenvalue_quadruple(eigen_phase(&p, k).omega);
            let numeric = quartic_roots(&char_poly(&u_momentum(&CoinMatrix::non_repeating(&p), k)));
            assert!(multiset_distance(&quad, &numeric) <= 1e-10);
        }
    }

    #[test]
    fn non_repeating_spectrum_negation_and_conjugation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..100 {
            let p = NonRepeatingParams::sample(&mut rng);
            let k = random_k(&mut rng);
            let roots = quartic_roots(&char_poly(&u_momentum(&CoinMatrix::non_repeating(&p), k)));
            let negated = [-roots[0], -roots[1], -roots[2], -roots[3]];
            let conjugated = [
                roots[0].conj(),
                roots[1].conj(),
                roots[2].conj(),
                roots[3].conj(),
            ];
            assert!(multiset_distance(&roots, &negated) <= 1e-10);
            assert!(multiset_distance(&roots, &conjugated) <= 1e-10);
        }
    }

    #[test]
    fn gradient_vanishes_for_flat_band() {
        let p = NonRepeatingParams::new(0.3, -0.2, 0.9, 0.1, 0.4, 1.0, 0.0, 0.0).unwrap();
        let g = grad_omega(&p, MomentumPoint::new(0.8, -0.4)).unwrap();
        assert_eq!(g, (0.0, 0.0));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(48);
        let h = 1e-6;
        let mut checked = 0;
        while checked < 200 {
            let p = NonRepeatingParams::sample(&mut rng);
            let k = random_k(&mut rng);
            if band_parameter(&p, k).abs() > 1.0 - 1e-3 {
                continue;
            }
            let (gx, gy) = grad_omega(&p, k).unwrap();
            let om = |kx: f64, ky: f64| eigen_phase(&p, MomentumPoint::new(kx, ky)).omega;
            let fx = (om(k.kx() + h, k.ky()) - om(k.kx() - h, k.ky())) / (2.0 * h);
            let fy = (om(k.kx(), k.ky() + h) - om(k.kx(), k.ky() - h)) / (2.0 * h);
            let rel = |a: f64, f: f64| (a - f).abs() / a.abs().max(f.abs()).max(1e-6);
            assert!(rel(gx, fx) <= 1e-6, "gx {gx} vs fd {fx}");
            assert!(rel(gy, fy) <= 1e-6, "gy {gy} vs fd {fy}");
            checked += 1;
        }
    }

    #[test]
    fn gradient_bounded_by_group_velocity() {
        let mut rng = ChaCha8Rng::seed_from_u64(49);
        let p = NonRepeatingParams::sample(&mut rng);
        for kx in midpoint_nodes(128) {
            for ky in midpoint_nodes(128) {
                if let Ok((gx, gy)) = grad_omega(&p, MomentumPoint::new(kx, ky)) {
                    assert!(gx.abs() <= 1.0 + 1e-12 && gy.abs() <= 1.0 + 1e-12);
                }
            }
        }
    }

    #[test]
    fn band_edge_error_propagates() {
        // lambda = gamma = 0 with m3 = 0 sits exactly on a band edge.
        let p = NonRepeatingParams::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        assert!(matches!(
            grad_omega(&p, MomentumPoint::new(0.3, 0.4)),
            Err(Error::BandEdge { .. })
        ));
        assert!(asymptotic_even_moment(&p, 2, 0, 32).is_err());
    }

    #[test]
    fn asymptotic_moment_normalization() {
        let p = NonRepeatingParams::balanced();
        let c = asymptotic_even_moment(&p, 0, 0, 64).unwrap();
        assert!((c - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn asymptotic_moment_rejects_odd_degree() {
        let p = NonRepeatingParams::balanced();
        assert!(matches!(
            asymptotic_even_moment(&p, 2, 1, 32),
            Err(Error::OddMomentDegree { degree: 3 })
        ));
    }

    #[test]
    fn asymptotic_coefficient_depends_only_on_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        for _ in 0..5 {
            let base = NonRepeatingParams::sample(&mut rng);
            let partner = NonRepeatingParams::from_invariants(
                base.m1_raw(),
                base.m2_raw(),
                base.m3_raw(),
                base.lambda(),
                base.gamma(),
                &mut rng,
            )
            .unwrap();
            let ca = asymptotic_even_moment(&base, 2, 0, 128).unwrap();
            let cb = asymptotic_even_moment(&partner, 2, 0, 128).unwrap();
            assert!((ca - cb).abs() <= 1e-10, "{ca} vs {cb}");
        }
    }

    #[test]
    fn asymptotic_report_contains_even_pairs_only() {
        let p = NonRepeatingParams::balanced();
        let report = asymptotic_moment_report(&p, 2, 32).unwrap();
        assert_eq!(report.method, MomentMethod::Asymptotic);
        assert!(report.mean_r.is_none());
        let keys: Vec<_> = report.joint.keys().cloned().collect();
        assert_eq!(keys, vec![(0, 0), (0, 2), (1, 1), (2, 0)]);
    }
}
