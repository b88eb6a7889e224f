//! Dense complex 4-vector / 4x4-matrix arithmetic plus the small polynomial
//! toolkit used by the spectral checks: characteristic polynomials extracted
//! by exact cofactor expansion and a Durand-Kerner quartic root finder.
//!
//! Everything here is deliberately fixed-size and allocation-free; the walk
//! only ever needs 4x4 operators.

use num_complex::Complex64;

pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A coin-space vector: one complex amplitude per channel.
pub type CVec4 = [Complex64; 4];

/// Squared norm of a coin-space vector.
pub fn vec4_norm_sqr(v: &CVec4) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// A 4x4 complex matrix in row-major order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMat4 {
    rows: [[Complex64; 4]; 4],
}

impl CMat4 {
    pub const fn from_rows(rows: [[Complex64; 4]; 4]) -> Self {
        CMat4 { rows }
    }

    pub fn zero() -> Self {
        CMat4 {
            rows: [[C_ZERO; 4]; 4],
        }
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.rows[i][i] = C_ONE;
        }
        m
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.rows[row][col]
    }

    pub fn row(&self, row: usize) -> &[Complex64; 4] {
        &self.rows[row]
    }

    pub fn matvec(&self, v: &CVec4) -> CVec4 {
        let mut out = [C_ZERO; 4];
        for (o, row) in out.iter_mut().zip(&self.rows) {
            *o = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
        }
        out
    }

    pub fn mul(&self, other: &CMat4) -> CMat4 {
        let mut out = Self::zero();
        for i in 0..4 {
            for k in 0..4 {
                let a = self.rows[i][k];
                for j in 0..4 {
                    out.rows[i][j] += a * other.rows[k][j];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> CMat4 {
        let mut out = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                out.rows[i][j] = self.rows[j][i].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> CMat4 {
        let mut out = *self;
        for row in &mut out.rows {
            for e in row {
                *e *= s;
            }
        }
        out
    }

    /// Multiply row `row` by `s` in place.
    pub fn scale_row(&mut self, row: usize, s: Complex64) {
        for e in &mut self.rows[row] {
            *e *= s;
        }
    }

    /// Largest entry-wise absolute difference to `other`.
    pub fn max_abs_diff(&self, other: &CMat4) -> f64 {
        let mut max = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                max = max.max((self.rows[i][j] - other.rows[i][j]).norm());
            }
        }
        max
    }

    /// Unitarity residual: the max-norm of A†A - I.
    pub fn unitarity_residual(&self) -> f64 {
        self.adjoint().mul(self).max_abs_diff(&Self::identity())
    }
}

/// Polynomial with complex coefficients, degree at most 4.
/// `coeffs[k]` is the coefficient of p^k.
#[derive(Debug, Clone, Copy)]
struct Poly {
    coeffs: [Complex64; 5],
}

impl Poly {
    fn constant(c: Complex64) -> Self {
        let mut coeffs = [C_ZERO; 5];
        coeffs[0] = c;
        Poly { coeffs }
    }

    /// a0 + a1 * p
    fn linear(a0: Complex64, a1: Complex64) -> Self {
        let mut coeffs = [C_ZERO; 5];
        coeffs[0] = a0;
        coeffs[1] = a1;
        Poly { coeffs }
    }

    fn add(&self, other: &Poly) -> Poly {
        let mut coeffs = self.coeffs;
        for (c, o) in coeffs.iter_mut().zip(&other.coeffs) {
            *c += o;
        }
        Poly { coeffs }
    }

    fn sub(&self, other: &Poly) -> Poly {
        let mut coeffs = self.coeffs;
        for (c, o) in coeffs.iter_mut().zip(&other.coeffs) {
            *c -= o;
        }
        Poly { coeffs }
    }

    /// Product of two polynomials whose degrees sum to at most 4.
    fn mul(&self, other: &Poly) -> Poly {
        let mut coeffs = [C_ZERO; 5];
        for i in 0..5 {
            if self.coeffs[i] == C_ZERO {
                continue;
            }
            for j in 0..5 - i {
                coeffs[i + j] += self.coeffs[i] * other.coeffs[j];
            }
        }
        Poly { coeffs }
    }
}

/// Coefficients of the characteristic polynomial det(pI - M), lowest degree
/// first, so `out[4]` is always 1. Computed by cofactor expansion of the
/// symbolic determinant; no iterative eigensolver is involved, which makes
/// this a clean oracle for the closed-form quartics.
pub fn char_poly(m: &CMat4) -> [Complex64; 5] {
    // B[i][j] = p*delta_ij - M[i][j], entries linear in p.
    let mut b = [[Poly::constant(C_ZERO); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let diag = if i == j { C_ONE } else { C_ZERO };
            b[i][j] = Poly::linear(-m.entry(i, j), diag);
        }
    }

    let det3 = |r: [usize; 3], c: [usize; 3]| -> Poly {
        let e = |i: usize, j: usize| b[r[i]][c[j]];
        let m00 = e(1, 1).mul(&e(2, 2)).sub(&e(1, 2).mul(&e(2, 1)));
        let m01 = e(1, 0).mul(&e(2, 2)).sub(&e(1, 2).mul(&e(2, 0)));
        let m02 = e(1, 0).mul(&e(2, 1)).sub(&e(1, 1).mul(&e(2, 0)));
        e(0, 0)
            .mul(&m00)
            .sub(&e(0, 1).mul(&m01))
            .add(&e(0, 2).mul(&m02))
    };

    let cols = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]];
    let mut det = Poly::constant(C_ZERO);
    for (j, minor_cols) in cols.iter().enumerate() {
        let minor = det3([1, 2, 3], *minor_cols);
        let term = b[0][j].mul(&minor);
        det = if j % 2 == 0 {
            det.add(&term)
        } else {
            det.sub(&term)
        };
    }
    det.coeffs
}

/// Evaluate a degree-4 polynomial (coefficients lowest first) at `z`.
pub fn poly_eval(coeffs: &[Complex64; 5], z: Complex64) -> Complex64 {
    let mut acc = coeffs[4];
    for k in (0..4).rev() {
        acc = acc * z + coeffs[k];
    }
    acc
}

/// All four roots of a quartic via Durand-Kerner iteration. The polynomial
/// need not be monic; `coeffs[4]` must be nonzero. Deterministic: fixed
/// starting points and a fixed iteration schedule.
pub fn quartic_roots(coeffs: &[Complex64; 5]) -> [Complex64; 4] {
    let lead = coeffs[4];
    let mut c = *coeffs;
    for e in &mut c {
        *e /= lead;
    }

    let seed = Complex64::new(0.4, 0.9);
    let mut z = [seed, seed * seed, seed * seed * seed, seed * seed * seed * seed];
    for _ in 0..200 {
        let mut max_step = 0.0f64;
        for i in 0..4 {
            let mut denom = C_ONE;
            for j in 0..4 {
                if j != i {
                    denom *= z[i] - z[j];
                }
            }
            let step = poly_eval(&c, z[i]) / denom;
            z[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-14 {
            break;
        }
    }
    z
}

/// Distance between two 4-element multisets of complex numbers: the minimum
/// over all pairings of the largest pairwise distance.
pub fn multiset_distance(a: &[Complex64; 4], b: &[Complex64; 4]) -> f64 {
    let mut best = f64::INFINITY;
    for p0 in 0..4 {
        for p1 in 0..4 {
            if p1 == p0 {
                continue;
            }
            for p2 in 0..4 {
                if p2 == p0 || p2 == p1 {
                    continue;
                }
                let p3 = 6 - p0 - p1 - p2;
                let worst = (a[0] - b[p0])
                    .norm()
                    .max((a[1] - b[p1]).norm())
                    .max((a[2] - b[p2]).norm())
                    .max((a[3] - b[p3]).norm());
                best = best.min(worst);
            }
        }
    }
    best
}

/// Neumaier-compensated summation. Fields at t = 100 have ~1e5 entries of
/// mixed magnitude; plain summation loses digits the moment tests care about.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of an iterator of f64 values.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn char_poly_of_identity() {
        // det(pI - I) = (p - 1)^4 = p^4 - 4p^3 + 6p^2 - 4p + 1
        let coeffs = char_poly(&CMat4::identity());
        let expected = [1.0, -4.0, 6.0, -4.0, 1.0];
        for (got, want) in coeffs.iter().zip(expected) {
            assert!((got - c(want, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn char_poly_of_fourth_roots_diagonal() {
        // diag(1, -1, i, -i) has characteristic polynomial p^4 - 1.
        let m = CMat4::from_rows([
            [c(1.0, 0.0), C_ZERO, C_ZERO, C_ZERO],
            [C_ZERO, c(-1.0, 0.0), C_ZERO, C_ZERO],
            [C_ZERO, C_ZERO, c(0.0, 1.0), C_ZERO],
            [C_ZERO, C_ZERO, C_ZERO, c(0.0, -1.0)],
        ]);
        let coeffs = char_poly(&m);
        let expected = [c(-1.0, 0.0), C_ZERO, C_ZERO, C_ZERO, C_ONE];
        for (got, want) in coeffs.iter().zip(expected) {
            assert!((got - want).norm() < 1e-15);
        }
    }

    #[test]
    fn quartic_roots_of_unity() {
        let coeffs = [c(-1.0, 0.0), C_ZERO, C_ZERO, C_ZERO, C_ONE];
        let roots = quartic_roots(&coeffs);
        let expected = [c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)];
        assert!(multiset_distance(&roots, &expected) < 1e-12);
    }

    #[test]
    fn quartic_roots_small_integers() {
        // (p-1)(p-2)(p-3)(p-4): e1=10, e2=35, e3=50, e4=24.
        let coeffs = [c(24.0, 0.0), c(-50.0, 0.0), c(35.0, 0.0), c(-10.0, 0.0), C_ONE];
        let roots = quartic_roots(&coeffs);
        let expected = [c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)];
        assert!(multiset_distance(&roots, &expected) < 1e-10);
    }

    #[test]
    fn matvec_against_identity() {
        let v = [c(1.0, 2.0), c(-0.5, 0.25), c(0.0, -1.0), c(3.0, 0.0)];
        assert_eq!(CMat4::identity().matvec(&v), v);
    }

    #[test]
    fn unitarity_residual_of_scaled_identity() {
        let m = CMat4::identity().scale(c(1.01, 0.0));
        // (1.01)^2 - 1 = 0.0201
        assert!((m.unitarity_residual() - 0.0201).abs() < 1e-12);
    }

    #[test]
    fn compensated_sum_cancellation() {
        let mut s = CompensatedSum::new();
        s.add(1e16);
        s.add(1.0);
        s.add(-1e16);
        assert_eq!(s.value(), 1.0);
    }

    #[test]
    fn multiset_distance_detects_mismatch() {
        let a = [c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)];
        let mut b = a;
        b[2] = c(0.0, 1.5);
        assert!((multiset_distance(&a, &b) - 0.5).abs() < 1e-15);
    }
}
