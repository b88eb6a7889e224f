//! Radial statistics and joint position moments of probability fields.
//!
//! All sums are compensated; degree caps keep the integer powers exact.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::coins::CoinFamily;
use crate::error::Error;
use crate::lattice::{ProbabilityField, WalkerState};
use crate::linalg::CompensatedSum;

/// Moments above this total degree drown in floating-point cancellation at
/// desk-scale lattice sizes.
pub const MAX_MOMENT_DEGREE: u32 = 8;

/// Mean radial distance: sum of p(x, y) * sqrt(x^2 + y^2).
pub fn mean_radial(field: &ProbabilityField) -> f64 {
    let mut acc = CompensatedSum::new();
    for (x, y, p) in field.iter() {
        acc.add(p * (((x * x + y * y) as f64).sqrt()));
    }
    acc.value()
}

/// Standard deviation of the radial distance,
/// sqrt(<r^2> - <r>^2). Variance within -1e-12 of zero is clamped to zero;
/// anything lower indicates an invalid field and is an error.
pub fn std_radial(field: &ProbabilityField) -> Result<f64, Error> {
    let mean = mean_radial(field);
    let mut acc = CompensatedSum::new();
    for (x, y, p) in field.iter() {
        acc.add(p * ((x * x + y * y) as f64));
    }
    let variance = acc.value() - mean * mean;
    if variance < -1e-12 {
        return Err(Error::NegativeVariance { variance });
    }
    Ok(variance.max(0.0).sqrt())
}

fn check_degree(xi: u32, chi: u32) -> Result<(), Error> {
    let degree = xi + chi;
    if degree > MAX_MOMENT_DEGREE {
        return Err(Error::MomentDegreeTooHigh { degree });
    }
    Ok(())
}

/// Exact integer power product x^xi * y^chi, rounded once on conversion.
fn power_product(x: i64, xi: u32, y: i64, chi: u32) -> f64 {
    ((x as i128).pow(xi) * (y as i128).pow(chi)) as f64
}

/// The joint moment <X^xi Y^chi> = sum of p(x, y) x^xi y^chi.
pub fn joint_moment(field: &ProbabilityField, xi: u32, chi: u32) -> Result<f64, Error> {
    check_degree(xi, chi)?;
    let mut acc = CompensatedSum::new();
    for (x, y, p) in field.iter() {
        if p != 0.0 {
            acc.add(p * power_product(x, xi, y, chi));
        }
    }
    Ok(acc.value())
}

/// The rotated joint moment <(X+Y)^xi (X-Y)^chi>.
pub fn rotated_joint_moment(field: &ProbabilityField, xi: u32, chi: u32) -> Result<f64, Error> {
    check_degree(xi, chi)?;
    let mut acc = CompensatedSum::new();
    for (x, y, p) in field.iter() {
        if p != 0.0 {
            acc.add(p * power_product(x + y, xi, x - y, chi));
        }
    }
    Ok(acc.value())
}

/// Support bound for a coin family after t steps: the non-repeating walk is
/// confined to max(|x|, |y|) <= ceil(t/2); every other family only has the
/// light cone max(|x|, |y|) <= t.
pub fn support_bound(family: CoinFamily, t: usize) -> usize {
    match family {
        CoinFamily::NonRepeating => t.div_ceil(2),
        _ => t,
    }
}

/// True iff all probability mass respects the family's support bound
/// (entries outside are at or below the 1e-14 numeric floor).
pub fn support_check(state: &WalkerState, family: CoinFamily) -> bool {
    let bound = support_bound(family, state.t()) as i64;
    let field = state.probability();
    let ok = field
        .iter()
        .all(|(x, y, p)| x.abs().max(y.abs()) <= bound || p <= 1e-14);
    ok
}

/// How a set of moments was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentMethod {
    /// Direct-space sum over the evolved probability field (exact at its t).
    Direct,
    /// Large-t coefficients from the Brillouin-zone quadrature; the joint
    /// table holds c with <X^xi Y^chi> ~ c * t^(xi+chi). Radial statistics
    /// are not defined on this route.
    Asymptotic,
}

/// A batch of joint moments plus radial statistics, with provenance.
#[derive(Debug, Clone, Serialize)]
pub struct MomentReport {
    pub mean_r: Option<f64>,
    pub sigma_r: Option<f64>,
    pub joint: BTreeMap<(u32, u32), f64>,
    pub method: MomentMethod,
}

/// All exponent pairs with the given maximum total degree, in lexicographic
/// order.
pub fn exponent_pairs(max_total_degree: u32) -> Vec<(u32, u32)> {
    let mut pairs = Vec::new();
    for xi in 0..=max_total_degree {
        for chi in 0..=(max_total_degree - xi) {
            pairs.push((xi, chi));
        }
    }
    pairs.sort_unstable();
    pairs
}

/// Direct moment report over a field, all pairs of total degree at most
/// `max_total_degree`.
pub fn moment_report(field: &ProbabilityField, max_total_degree: u32) -> Result<MomentReport, Error> {
    let mut joint = BTreeMap::new();
    for (xi, chi) in exponent_pairs(max_total_degree) {
        joint.insert((xi, chi), joint_moment(field, xi, chi)?);
    }
    Ok(MomentReport {
        mean_r: Some(mean_radial(field)),
        sigma_r: Some(std_radial(field)?),
        joint,
        method: MomentMethod::Direct,
    })
}
