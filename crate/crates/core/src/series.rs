//! Truncated Taylor series with complex coefficients.
//!
//! A [`TaylorSeries`] of order `N` stores the coefficients `c_0 ... c_N`
//! of a polynomial truncation; arithmetic never reads beyond degree `N`
//! and results are truncated back. Binary operations pad the shorter
//! operand with zeros, so the result order is the larger of the two.
//!
//! Evaluation is exact polynomial evaluation of the truncation; the
//! caller owns the truncation-error budget. With the default order 64
//! the catalog functions are accurate to within 2e-8 for `|z| <= 0.7`
//! (the worst coefficient growth is linear, giving a tail of
//! `sum_{k>N} k r^k` = 1.9e-8 at the rim); trust them no further.

use num_complex::Complex64;
use thiserror::Error;

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 64;

/// Smallest constant term a divisor may have.
pub const DIV_EPS: f64 = 1e-12;

/// Evaluation is permitted up to this radius; accuracy is only promised
/// for `|z| <= 0.7` at the default order.
pub const EVAL_RADIUS_CAP: f64 = 0.999;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    /// Division requires the divisor's constant term to be a unit.
    #[error("division by series with near-zero constant term (|b0| = {magnitude:.3e})")]
    DivisionByNonUnit { magnitude: f64 },
    /// `exp` is only defined for series with vanishing constant term.
    #[error("exp of series with nonzero constant term (|a0| = {magnitude:.3e})")]
    NonzeroConstantTerm { magnitude: f64 },
}

/// A complex power series truncated at a fixed degree.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorSeries {
    coeffs: Vec<Complex64>,
}

impl TaylorSeries {
    /// Build from raw coefficients `c_0 ... c_N`.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zero(order: usize) -> Self {
        Self { coeffs: vec![Complex64::ZERO; order + 1] }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Complex64::ONE, order)
    }

    pub fn constant(c: Complex64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// The monomial `z`, padded to `order`.
    pub fn identity(order: usize) -> Self {
        let mut s = Self::zero(order.max(1));
        s.coeffs[1] = Complex64::ONE;
        s
    }

    /// Truncation degree `N`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `z^k`; zero beyond the truncation.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(Complex64::ZERO)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect();
        Self { coeffs }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// Cauchy product truncated to the larger operand order.
    pub fn mul(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = vec![Complex64::ZERO; n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == Complex64::ZERO {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                if i + j >= n {
                    break;
                }
                coeffs[i + j] += a * b;
            }
        }
        Self { coeffs }
    }

    /// Long division: the series `q` with `q * rhs = self` to the
    /// truncation order. Requires `|rhs.coeff(0)| > DIV_EPS`.
    pub fn div(&self, rhs: &Self) -> Result<Self, SeriesError> {
        let b0 = rhs.coeff(0);
        if b0.norm() <= DIV_EPS {
            return Err(SeriesError::DivisionByNonUnit { magnitude: b0.norm() });
        }
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut q = vec![Complex64::ZERO; n];
        for k in 0..n {
            let mut acc = self.coeff(k);
            for j in 1..=k {
                acc -= rhs.coeff(j) * q[k - j];
            }
            q[k] = acc / b0;
        }
        Ok(Self { coeffs: q })
    }

    /// Termwise derivative; the result keeps the same length, with the
    /// top coefficient padded to zero.
    pub fn derivative(&self) -> Self {
        let mut coeffs = vec![Complex64::ZERO; self.coeffs.len()];
        for k in 1..self.coeffs.len() {
            coeffs[k - 1] = self.coeffs[k] * k as f64;
        }
        Self { coeffs }
    }

    /// Termwise antiderivative with zero constant term. The order grows
    /// by one so that `derivative . integrate0` is the identity.
    pub fn integrate0(&self) -> Self {
        let mut coeffs = vec![Complex64::ZERO; self.coeffs.len() + 1];
        for (k, &c) in self.coeffs.iter().enumerate() {
            coeffs[k + 1] = c / (k + 1) as f64;
        }
        Self { coeffs }
    }

    /// Composition `exp(self)` via the recurrence `(exp a)' = a' exp a`.
    /// Requires a vanishing constant term.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        let a0 = self.coeff(0);
        if a0.norm() > 1e-14 {
            return Err(SeriesError::NonzeroConstantTerm { magnitude: a0.norm() });
        }
        let n = self.coeffs.len();
        let mut e = vec![Complex64::ZERO; n];
        e[0] = Complex64::ONE;
        for k in 1..n {
            let mut acc = Complex64::ZERO;
            for j in 1..=k {
                acc += self.coeff(j) * j as f64 * e[k - j];
            }
            e[k] = acc / k as f64;
        }
        Ok(Self { coeffs: e })
    }

    /// The series of `-log(1-z) = sum_{k>=1} z^k / k` (principal branch).
    pub fn log1m(order: usize) -> Self {
        let mut coeffs = vec![Complex64::ZERO; order + 1];
        for (k, c) in coeffs.iter_mut().enumerate().skip(1) {
            *c = Complex64::new(1.0 / k as f64, 0.0);
        }
        Self { coeffs }
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Divide by `z`: drops the constant term (which the caller asserts
    /// is negligible) and shifts every coefficient down one degree.
    pub fn shift_down(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero(0);
        }
        Self { coeffs: self.coeffs[1..].to_vec() }
    }

    /// Multiply by `z`; the order grows by one.
    pub fn shift_up(&self) -> Self {
        let mut coeffs = vec![Complex64::ZERO; self.coeffs.len() + 1];
        coeffs[1..].copy_from_slice(&self.coeffs);
        Self { coeffs }
    }

    /// Truncate (or zero-pad) to the given order.
    pub fn truncate(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, Complex64::ZERO);
        Self { coeffs }
    }

    /// Largest coefficient-wise distance to `rhs`, padding the shorter.
    pub fn coeff_distance(&self, rhs: &Self) -> f64 {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        (0..n)
            .map(|k| (self.coeff(k) - rhs.coeff(k)).norm())
            .fold(0.0, f64::max)
    }

    /// Largest coefficient magnitude.
    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_close(a: Complex64, b: Complex64, tol: f64) {
        assert!(
            (a - b).norm() <= tol,
            "expected {b} within {tol:e}, got {a} (|diff| = {:e})",
            (a - b).norm()
        );
    }

    /// Geometric series 1/(1-z) to the given order.
    fn geometric(order: usize) -> TaylorSeries {
        TaylorSeries::from_real(&vec![1.0; order + 1])
    }

    #[test]
    fn add_cancels_and_keeps_identity() {
        let a = TaylorSeries::from_real(&[1.0, 1.0]);
        let b = TaylorSeries::from_real(&[1.0, -1.0]);
        assert_eq!(a.add(&b), TaylorSeries::from_real(&[2.0, 0.0]));

        let s = TaylorSeries::from_real(&[0.3, -0.2, 0.7]);
        assert_eq!(TaylorSeries::zero(2).add(&s), s);

        // (z + z^2) + z^2 = z + 2z^2
        let u = TaylorSeries::from_real(&[0.0, 1.0, 1.0]);
        let v = TaylorSeries::from_real(&[0.0, 0.0, 1.0]);
        assert_eq!(u.add(&v), TaylorSeries::from_real(&[0.0, 1.0, 2.0]));
    }

    #[test]
    fn mul_truncates_geometric_telescope() {
        // (1-z) * (1 + z + ... + z^N) = 1 - z^{N+1} -> 1 after truncation
        let n = 16;
        let one_minus_z = TaylorSeries::from_real(&[1.0, -1.0]);
        let prod = one_minus_z.mul(&geometric(n));
        assert_eq!(prod.coeff(0), Complex64::ONE);
        for k in 1..=n {
            assert_eq!(prod.coeff(k), Complex64::ZERO, "coefficient {k}");
        }

        let s = TaylorSeries::from_real(&[0.5, 0.25, -3.0]);
        assert_eq!(s.mul(&TaylorSeries::one(2)), s);

        // (1+z)^2 = 1 + 2z + z^2, with the operand padded to make room
        let p = TaylorSeries::from_real(&[1.0, 1.0, 0.0]);
        let sq = p.mul(&p);
        assert_eq!(sq, TaylorSeries::from_real(&[1.0, 2.0, 1.0]));

        // unpadded, the same product truncates at the operand order
        let p = TaylorSeries::from_real(&[1.0, 1.0]);
        assert_eq!(p.mul(&p), TaylorSeries::from_real(&[1.0, 2.0]));
    }

    #[test]
    fn div_reproduces_geometric_and_factors() {
        let n = 24;
        let one = TaylorSeries::one(n);
        let one_minus_z = TaylorSeries::from_real(&[1.0, -1.0]).truncate(n);
        let q = one.div(&one_minus_z).unwrap();
        assert!(q.coeff_distance(&geometric(n)) < 1e-13);

        let s = TaylorSeries::from_real(&[2.0, -1.0, 0.5]);
        let q = s.div(&s).unwrap();
        assert!(q.coeff_distance(&TaylorSeries::one(2)) < 1e-14);

        // (1 - z^2) / (1 - z) = 1 + z
        let num = TaylorSeries::from_real(&[1.0, 0.0, -1.0]);
        let q = num.div(&TaylorSeries::from_real(&[1.0, -1.0])).unwrap();
        assert!(q.coeff_distance(&TaylorSeries::from_real(&[1.0, 1.0, 0.0])) < 1e-14);
    }

    #[test]
    fn div_rejects_non_unit_divisor() {
        let a = TaylorSeries::one(4);
        let b = TaylorSeries::identity(4);
        match a.div(&b) {
            Err(SeriesError::DivisionByNonUnit { .. }) => {}
            other => panic!("expected DivisionByNonUnit, got {other:?}"),
        }
    }

    #[test]
    fn derivative_basics() {
        // d/dz z^2 = 2z
        let z2 = TaylorSeries::from_real(&[0.0, 0.0, 1.0]);
        assert_eq!(z2.derivative(), TaylorSeries::from_real(&[0.0, 2.0, 0.0]));

        let k = TaylorSeries::constant(c(3.0, -1.0), 3);
        assert_eq!(k.derivative(), TaylorSeries::zero(3));

        // d/dz (z + 2z^2 + 3z^3) = 1 + 4z + 9z^2
        let s = TaylorSeries::from_real(&[0.0, 1.0, 2.0, 3.0]);
        assert_eq!(
            s.derivative(),
            TaylorSeries::from_real(&[1.0, 4.0, 9.0, 0.0])
        );
    }

    #[test]
    fn integrate0_basics() {
        let one = TaylorSeries::one(0);
        assert_eq!(one.integrate0(), TaylorSeries::from_real(&[0.0, 1.0]));

        let lin = TaylorSeries::from_real(&[0.0, 2.0]);
        assert_eq!(lin.integrate0(), TaylorSeries::from_real(&[0.0, 0.0, 1.0]));

        let s = TaylorSeries::from_real(&[1.0, 1.0]);
        assert_eq!(s.integrate0(), TaylorSeries::from_real(&[0.0, 1.0, 0.5]));
    }

    #[test]
    fn exp_of_zero_and_identity() {
        let e = TaylorSeries::zero(8).exp().unwrap();
        assert!(e.coeff_distance(&TaylorSeries::one(8)) == 0.0);

        // exp(z) = sum z^k / k!
        let e = TaylorSeries::identity(6).exp().unwrap();
        let mut fact = 1.0;
        for k in 0..=6 {
            if k > 0 {
                fact *= k as f64;
            }
            assert_close(e.coeff(k), c(1.0 / fact, 0.0), 1e-15);
        }
    }

    #[test]
    fn exp_rejects_nonzero_constant_term() {
        let s = TaylorSeries::from_real(&[0.5, 1.0]);
        match s.exp() {
            Err(SeriesError::NonzeroConstantTerm { .. }) => {}
            other => panic!("expected NonzeroConstantTerm, got {other:?}"),
        }
    }

    /// Independent binomial oracle: 1/(1-z)^2 = sum (n+1) z^n.
    #[test]
    fn exp_of_twice_log1m_matches_binomial_oracle() {
        let n = 32;
        let e = TaylorSeries::log1m(n).scale(c(2.0, 0.0)).exp().unwrap();
        let oracle =
            TaylorSeries::new((0..=n).map(|k| c((k + 1) as f64, 0.0)).collect());
        assert!(e.coeff_distance(&oracle) < 1e-10);
    }

    #[test]
    fn log1m_coefficients_and_log2() {
        let s = TaylorSeries::log1m(64);
        assert_eq!(s.coeff(0), Complex64::ZERO);
        assert_eq!(s.coeff(1), Complex64::ONE);
        assert_close(s.coeff(4), c(0.25, 0.0), 0.0);
        // scalar oracle: -log(1 - 1/2) = log 2
        let v = s.eval(c(0.5, 0.0));
        assert_close(v, c(2.0_f64.ln(), 0.0), 1e-12);
    }

    #[test]
    fn eval_examples() {
        assert_close(geometric(16).eval(Complex64::ZERO), Complex64::ONE, 0.0);

        // Koebe series sum n z^n at 0.5 -> 0.5/(1-0.5)^2 = 2
        let koebe =
            TaylorSeries::new((0..=64).map(|k| c(k as f64, 0.0)).collect());
        assert_close(koebe.eval(c(0.5, 0.0)), c(2.0, 0.0), 1e-12);

        let s = TaylorSeries::from_real(&[7.0, -1.0, 3.0]);
        assert_close(s.eval(Complex64::ZERO), c(7.0, 0.0), 0.0);
    }

    #[test]
    fn exp_log1m_inverts_one_minus_z() {
        // exp(log1m) = 1/(1-z); multiplying by (1-z) gives 1.
        let n = 64;
        let inv = TaylorSeries::log1m(n).exp().unwrap();
        let prod = inv.mul(&TaylorSeries::from_real(&[1.0, -1.0]));
        assert!(prod.coeff_distance(&TaylorSeries::one(n)) < 1e-11);
    }

    /// Series eval vs closed form stays within the analytic tail bound
    /// sum_{k>N} k r^k = r^{N+1}((N+1) - Nr)/(1-r)^2 for |z| <= 0.7 at
    /// the default order, even for the worst catalog coefficient
    /// growth (linear, c_n = n) — under 2e-8 everywhere.
    #[test]
    fn eval_truncation_error_within_budget_at_default_order() {
        use rand::prelude::*;
        let koebe = TaylorSeries::new(
            (0..=DEFAULT_ORDER).map(|k| c(k as f64, 0.0)).collect(),
        );
        let n = DEFAULT_ORDER as f64;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..200 {
            let r = 0.7 * rng.random::<f64>().sqrt();
            let th = std::f64::consts::TAU * rng.random::<f64>();
            let z = Complex64::from_polar(r, th);
            let closed = z / ((Complex64::ONE - z) * (Complex64::ONE - z));
            let err = (koebe.eval(z) - closed).norm();
            let tail = r.powi(DEFAULT_ORDER as i32 + 1) * (n + 1.0 - n * r)
                / ((1.0 - r) * (1.0 - r));
            assert!(
                err <= 1.05 * tail + 1e-13,
                "error {err:e} exceeds tail bound {tail:e} at z = {z}"
            );
            assert!(err < 2e-8, "truncation error too large at z = {z}");
        }
    }

    proptest! {
        #[test]
        fn ring_laws_to_truncation(
            a in proptest::collection::vec(-2.0..2.0f64, 9),
            b in proptest::collection::vec(-2.0..2.0f64, 9),
            d in proptest::collection::vec(-2.0..2.0f64, 9),
        ) {
            let mk = |v: &[f64]| {
                TaylorSeries::new(
                    v.chunks(3)
                        .map(|p| c(p[0], p[1]) * p[2])
                        .collect(),
                )
            };
            let (a, b, d) = (mk(&a), mk(&b), mk(&d));
            let scale = 1.0 + a.max_coeff() * b.max_coeff() + d.max_coeff();
            let tol = 1e-13 * scale;

            prop_assert!(a.mul(&b).coeff_distance(&b.mul(&a)) <= tol);
            prop_assert!(
                a.mul(&b).mul(&d).coeff_distance(&a.mul(&b.mul(&d))) <= tol * scale
            );
            prop_assert!(
                a.mul(&b.add(&d))
                    .coeff_distance(&a.mul(&b).add(&a.mul(&d))) <= tol
            );
        }

        #[test]
        fn div_round_trip(
            a in proptest::collection::vec(-2.0..2.0f64, 10),
            b in proptest::collection::vec(-2.0..2.0f64, 10),
            b0 in prop_oneof![-2.0..-1e-6f64, 1e-6..2.0f64],
        ) {
            let mk = |v: &[f64]| {
                TaylorSeries::new(v.chunks(2).map(|p| c(p[0], p[1])).collect())
            };
            let a = mk(&a);
            let mut b = mk(&b);
            b.coeffs[0] = c(b0, 0.0);
            let q = a.div(&b).unwrap();
            let back = q.mul(&b);
            // relative to the operand scale; quotient growth is bounded by |b0|^-k
            let scale = (1.0 + a.max_coeff()) * (1.0 + q.max_coeff()) * (1.0 + b.max_coeff());
            prop_assert!(back.coeff_distance(&a) <= 1e-11 * scale);
        }

        #[test]
        fn derivative_undoes_integrate0(
            v in proptest::collection::vec(-3.0..3.0f64, 12),
        ) {
            let mut coeffs: Vec<Complex64> =
                v.chunks(2).map(|p| c(p[0], p[1])).collect();
            coeffs[0] = Complex64::ZERO;
            let s = TaylorSeries::new(coeffs);
            // identity up to one rounding of c/(k+1)*(k+1) per term
            let err = s.integrate0().derivative().coeff_distance(&s);
            prop_assert!(err <= 1e-15 * (1.0 + s.max_coeff()));
        }
    }
}
