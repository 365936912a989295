//! Schwarz functions (analytic self-maps of the unit disk) and the
//! constructions that turn them into class members.
//!
//! The representations implemented here:
//!
//! - starlike:              `zf'/f = (1+w)/(1-w)`,
//! - starlike of order 1/2: `zf'/f = 1/(1-w)`,
//! - the 3/2-convexity cap: `zf'/f = (1-w)/(1-w/2)`,
//! - the defect class:      `(z/f)^2 f' = 1 + z^2 phi(z)`,
//!
//! with `w` a centered Schwarz function and `phi` any Schwarz function.
//! The module also carries the inequality gap evaluators used as
//! property oracles: the Schwarz-Pick derivative bound, its centered
//! variant `|zw'(z) - w(z)| <= (r^2 - |w|^2)/(1 - r^2)`, the `[0,r]`
//! maximum of `(r^2-t^2)/(1-t)`, and the arcsin addition identity.

use std::f64::consts::SQRT_2;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::catalog::ClassLabel;
use crate::series::TaylorSeries;
use crate::{DEFAULT_GRID_ANGLES, DEFAULT_GRID_RADII};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchwarzError {
    /// A construction needed w(0) = 0 and the input is not centered.
    #[error("schwarz function is not centered (|value at 0| = {magnitude:.3e})")]
    NotCentered { magnitude: f64 },
    /// `f_from_p` needs p(0) = 1.
    #[error("series is not a valid zf'/f (|p(0) - 1| = {magnitude:.3e})")]
    NonUnitP { magnitude: f64 },
    /// `p_from_f` needs a normalized f (f(0)=0, f'(0)=1).
    #[error("series is not a normalized function (defect {magnitude:.3e})")]
    NotNormalized { magnitude: f64 },
    /// Only the three represented classes can be generated from w.
    #[error("no generator representation for class {label}")]
    UnsupportedLabel { label: String },
    /// z/f(z) came out (numerically) zero on the reference grid — the
    /// would-be member has a pole in the disk.
    #[error("u = z/f vanishes near z = {re}+{im}i (|u| = {magnitude:.3e})")]
    UVanishes { re: f64, im: f64, magnitude: f64 },
    /// Parameter outside its allowed region.
    #[error("invalid schwarz parameter: {what}")]
    BadParameter { what: String },
    /// Unparseable micro-format spec.
    #[error("cannot parse schwarz spec {spec:?}: {what}")]
    BadSpec { spec: String, what: String },
}

/// An analytic self-map of the disk in one of three closed forms.
///
/// `Blaschke` is `zeta * [z] * prod (z + a_j)/(1 + conj(a_j) z)` with
/// `|a_j| < 1` and `|zeta| = 1`; the bracketed `z` is present when
/// `premul_z` is set. Values satisfy `|value| <= 1` on the disk (strict
/// inside for the z-premultiplied forms).
#[derive(Debug, Clone, PartialEq)]
pub enum SchwarzFunction {
    Constant(Complex64),
    Monomial { zeta: Complex64, degree: u32 },
    Blaschke { factors: Vec<Complex64>, zeta: Complex64, premul_z: bool },
}

fn one() -> Complex64 {
    Complex64::ONE
}

impl SchwarzFunction {
    pub fn constant(c: Complex64) -> Result<Self, SchwarzError> {
        if c.norm() > 1.0 + 1e-12 {
            return Err(SchwarzError::BadParameter {
                what: format!("constant must have |c| <= 1, got |c| = {}", c.norm()),
            });
        }
        Ok(SchwarzFunction::Constant(c))
    }

    /// `zeta * z^degree` with `|zeta| <= 1`.
    pub fn monomial(zeta: Complex64, degree: u32) -> Result<Self, SchwarzError> {
        if zeta.norm() > 1.0 + 1e-12 {
            return Err(SchwarzError::BadParameter {
                what: format!("monomial needs |zeta| <= 1, got {}", zeta.norm()),
            });
        }
        Ok(SchwarzFunction::Monomial { zeta, degree })
    }

    /// Finite Blaschke product with factors `(z+a)/(1+conj(a)z)`.
    pub fn blaschke(
        factors: Vec<Complex64>,
        zeta: Complex64,
        premul_z: bool,
    ) -> Result<Self, SchwarzError> {
        if (zeta.norm() - 1.0).abs() > 1e-9 {
            return Err(SchwarzError::BadParameter {
                what: format!("blaschke prefactor must be unimodular, got |zeta| = {}", zeta.norm()),
            });
        }
        for a in &factors {
            if a.norm() >= 1.0 {
                return Err(SchwarzError::BadParameter {
                    what: format!("blaschke factor needs |a| < 1, got |a| = {}", a.norm()),
                });
            }
        }
        Ok(SchwarzFunction::Blaschke { factors, zeta, premul_z })
    }

    /// The identity map z, as a degree-one monomial.
    pub fn identity() -> Self {
        SchwarzFunction::Monomial { zeta: Complex64::ONE, degree: 1 }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            SchwarzFunction::Constant(c) => *c,
            SchwarzFunction::Monomial { zeta, degree } => zeta * z.powu(*degree),
            SchwarzFunction::Blaschke { factors, zeta, premul_z } => {
                let mut v = *zeta;
                if *premul_z {
                    v *= z;
                }
                for &a in factors {
                    v *= (z + a) / (one() + a.conj() * z);
                }
                v
            }
        }
    }

    /// Closed-form derivative (product rule over the factors).
    pub fn eval_deriv(&self, z: Complex64) -> Complex64 {
        match self {
            SchwarzFunction::Constant(_) => Complex64::ZERO,
            SchwarzFunction::Monomial { zeta, degree } => {
                if *degree == 0 {
                    Complex64::ZERO
                } else {
                    zeta * *degree as f64 * z.powu(degree - 1)
                }
            }
            SchwarzFunction::Blaschke { factors, zeta, premul_z } => {
                let mut v = *zeta;
                let mut dv = Complex64::ZERO;
                if *premul_z {
                    // (v z)' with v constant so far
                    dv = v;
                    v *= z;
                }
                for &a in factors {
                    let den = one() + a.conj() * z;
                    let g = (z + a) / den;
                    let dg = (one() - a.conj() * a) / (den * den);
                    let nv = v * g;
                    dv = dv * g + v * dg;
                    v = nv;
                }
                dv
            }
        }
    }

    /// Taylor coefficients to the given order.
    pub fn series(&self, order: usize) -> TaylorSeries {
        match self {
            SchwarzFunction::Constant(c) => TaylorSeries::constant(*c, order),
            SchwarzFunction::Monomial { zeta, degree } => {
                let mut s = TaylorSeries::zero(order);
                let mut coeffs = s.coeffs().to_vec();
                if (*degree as usize) <= order {
                    coeffs[*degree as usize] = *zeta;
                    s = TaylorSeries::new(coeffs);
                }
                s
            }
            SchwarzFunction::Blaschke { factors, zeta, premul_z } => {
                let mut s = TaylorSeries::constant(*zeta, order);
                for &a in factors {
                    let num = TaylorSeries::new(vec![a, Complex64::ONE]).truncate(order);
                    let den =
                        TaylorSeries::new(vec![Complex64::ONE, a.conj()]).truncate(order);
                    let factor = num.div(&den).expect("unit constant term");
                    s = s.mul(&factor);
                }
                if *premul_z {
                    s = s.shift_up().truncate(order);
                }
                s
            }
        }
    }

    /// True when the map fixes the origin (within 1e-14).
    pub fn is_centered(&self) -> bool {
        self.eval(Complex64::ZERO).norm() <= 1e-14
    }

    /// Round-trippable one-line form, also the CLI micro-format:
    /// `const:c`, `monomial:zeta,m`, `blaschke:[a1,a2],zeta,premul_z:b`.
    pub fn spec_string(&self) -> String {
        match self {
            SchwarzFunction::Constant(c) => format!("const:{}", fmt_complex(*c)),
            SchwarzFunction::Monomial { zeta, degree } => {
                format!("monomial:{},{degree}", fmt_complex(*zeta))
            }
            SchwarzFunction::Blaschke { factors, zeta, premul_z } => {
                let fs: Vec<String> = factors.iter().map(|&a| fmt_complex(a)).collect();
                format!(
                    "blaschke:[{}],{},premul_z:{}",
                    fs.join(","),
                    fmt_complex(*zeta),
                    premul_z
                )
            }
        }
    }

    /// Parse the micro-format produced by [`SchwarzFunction::spec_string`].
    pub fn parse_spec(spec: &str) -> Result<Self, SchwarzError> {
        let bad = |what: &str| SchwarzError::BadSpec {
            spec: spec.to_string(),
            what: what.to_string(),
        };
        let s = spec.trim();
        if let Some(rest) = s.strip_prefix("const:") {
            let c = parse_complex(rest).ok_or_else(|| bad("bad complex constant"))?;
            return SchwarzFunction::constant(c);
        }
        if let Some(rest) = s.strip_prefix("monomial:") {
            let (zs, ds) = rest.rsplit_once(',').ok_or_else(|| bad("expected zeta,m"))?;
            let zeta = parse_complex(zs).ok_or_else(|| bad("bad zeta"))?;
            let degree: u32 = ds.trim().parse().map_err(|_| bad("bad degree"))?;
            return SchwarzFunction::monomial(zeta, degree);
        }
        if let Some(rest) = s.strip_prefix("blaschke:") {
            let rest = rest.trim();
            let close = rest.find(']').ok_or_else(|| bad("missing ]"))?;
            if !rest.starts_with('[') {
                return Err(bad("missing ["));
            }
            let inner = &rest[1..close];
            let mut factors = Vec::new();
            if !inner.trim().is_empty() {
                for part in inner.split(',') {
                    factors
                        .push(parse_complex(part).ok_or_else(|| bad("bad factor"))?);
                }
            }
            let tail = rest[close + 1..]
                .strip_prefix(',')
                .ok_or_else(|| bad("expected ,zeta after factors"))?;
            let (zs, ps) =
                tail.rsplit_once(',').ok_or_else(|| bad("expected zeta,premul_z"))?;
            let zeta = parse_complex(zs).ok_or_else(|| bad("bad zeta"))?;
            let premul_z = match ps.trim().strip_prefix("premul_z:") {
                Some("true") => true,
                Some("false") => false,
                _ => return Err(bad("expected premul_z:true|false")),
            };
            return SchwarzFunction::blaschke(factors, zeta, premul_z);
        }
        Err(bad("unknown kind (want const:/monomial:/blaschke:)"))
    }
}

impl fmt::Display for SchwarzFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec_string())
    }
}

impl serde::Serialize for SchwarzFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.spec_string())
    }
}

/// Format a complex number as `a+bi` without spaces, round-trippable
/// through [`parse_complex`].
pub fn fmt_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 {
        format!("{}i", c.im)
    } else if c.im < 0.0 {
        format!("{}{}i", c.re, c.im)
    } else {
        format!("{}+{}i", c.re, c.im)
    }
}

/// Parse `1`, `-0.5`, `0.3i`, `0.3+0.1i`, `1e-3-2e-4i`, `i`, `-i`.
pub fn parse_complex(s: &str) -> Option<Complex64> {
    let t = s.trim();
    if t.is_empty() {
        return None;
    }
    if !t.ends_with('i') {
        return t.parse::<f64>().ok().map(|re| Complex64::new(re, 0.0));
    }
    let body = &t[..t.len() - 1];
    // find the sign separating re from im: a '+'/'-' that is neither
    // leading nor part of an exponent
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        let b = bytes[i];
        if (b == b'+' || b == b'-') && bytes[i - 1] != b'e' && bytes[i - 1] != b'E' {
            split = Some(i);
            break;
        }
    }
    match split {
        Some(i) => {
            let re: f64 = body[..i].parse().ok()?;
            let imtxt = &body[i..];
            let im: f64 = match imtxt {
                "+" => 1.0,
                "-" => -1.0,
                _ => imtxt.parse().ok()?,
            };
            Some(Complex64::new(re, im))
        }
        None => {
            let im: f64 = match body {
                "" => 1.0,
                "-" => -1.0,
                _ => body.parse().ok()?,
            };
            Some(Complex64::new(0.0, im))
        }
    }
}

/// Slack in the Schwarz-Pick derivative bound at z:
/// `(1 - |s(z)|^2)/(1 - |z|^2) - |s'(z)|`. Nonnegative for any
/// analytic self-map of the disk; zero exactly for disk automorphisms.
pub fn schwarz_pick_gap(s: &SchwarzFunction, z: Complex64) -> f64 {
    let v = s.eval(z).norm();
    let dv = s.eval_deriv(z).norm();
    (1.0 - v * v) / (1.0 - z.norm_sqr()) - dv
}

/// Slack in the centered bound `|z s'(z) - s(z)| <= (r^2 - |s|^2)/(1 - r^2)`
/// (the Schwarz-Pick bound applied to s(z)/z). Requires s(0) = 0.
pub fn omega_centered_gap(
    s: &SchwarzFunction,
    z: Complex64,
) -> Result<f64, SchwarzError> {
    let at0 = s.eval(Complex64::ZERO).norm();
    if at0 > 1e-14 {
        return Err(SchwarzError::NotCentered { magnitude: at0 });
    }
    let r2 = z.norm_sqr();
    let v = s.eval(z);
    let lhs = (z * s.eval_deriv(z) - v).norm();
    let rhs = (r2 - v.norm_sqr()) / (1.0 - r2);
    Ok(rhs - lhs)
}

/// Maximum of `(r^2 - t^2)/(1 - t)` over `t` in `[0, r]`, with its
/// maximizer: the derivative vanishes at `t* = 1 - sqrt(1 - r^2)`,
/// where the value is `2(1 - sqrt(1 - r^2))`.
pub fn phi_t_max(r: f64) -> (f64, f64) {
    assert!(r > 0.0 && r < 1.0, "radius must lie in (0,1), got {r}");
    let s = (1.0 - r * r).sqrt();
    (2.0 * (1.0 - s), 1.0 - s)
}

/// Both sides of the arcsin addition identity
/// `arcsin(1-t^2) + arcsin(t/sqrt2) = arcsin(sqrt(1 - t^2/2))`,
/// valid for t in [0,1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcsinChain {
    pub lhs: f64,
    pub rhs: f64,
}

pub fn arcsin_chain(t: f64) -> ArcsinChain {
    assert!((0.0..=1.0).contains(&t), "t must lie in [0,1], got {t}");
    ArcsinChain {
        lhs: (1.0 - t * t).asin() + (t / SQRT_2).asin(),
        rhs: (1.0 - 0.5 * t * t).sqrt().asin(),
    }
}

/// Rebuild a normalized function from its logarithmic derivative data:
/// given p with p(0)=1, returns f = z exp(int_0^z (p(t)-1)/t dt), the
/// unique normalized solution of zf'/f = p.
pub fn f_from_p(p: &TaylorSeries) -> Result<TaylorSeries, SchwarzError> {
    let defect = (p.coeff(0) - Complex64::ONE).norm();
    if defect > 1e-12 {
        return Err(SchwarzError::NonUnitP { magnitude: defect });
    }
    let mut q = p.clone();
    // force the constant term to exactly 1 so exp sees a clean zero
    let correction = TaylorSeries::constant(Complex64::ONE - p.coeff(0), p.order());
    q = q.add(&correction);
    let integrand = q.sub(&TaylorSeries::one(q.order())).shift_down();
    let exponent = integrand.integrate0();
    let factor = exponent.exp().expect("constant term is zero by construction");
    Ok(factor.shift_up())
}

/// The logarithmic derivative series p = zf'/f of a normalized f.
pub fn p_from_f(f: &TaylorSeries) -> Result<TaylorSeries, SchwarzError> {
    let c0 = f.coeff(0).norm();
    let c1 = (f.coeff(1) - Complex64::ONE).norm();
    if c0 > 1e-12 || c1 > 1e-12 {
        return Err(SchwarzError::NotNormalized { magnitude: c0.max(c1) });
    }
    f.derivative()
        .div(&f.shift_down())
        .map_err(|_| SchwarzError::NotNormalized { magnitude: c1 })
}

/// The three generator representations: which Moebius-type map sends a
/// centered Schwarz function w to p = zf'/f.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarRep {
    /// p = (1+w)/(1-w): the full starlike cone.
    Starlike,
    /// p = 1/(1-w): starlike of order 1/2.
    StarlikeHalf,
    /// p = (1-w)/(1-w/2): the class capped by Re(1+zf''/f') < 3/2.
    HalfPlaneCap,
}

impl StarRep {
    pub fn for_label(label: ClassLabel) -> Option<StarRep> {
        match label {
            ClassLabel::Starlike => Some(StarRep::Starlike),
            ClassLabel::StarlikeOrder(a) if (a - 0.5).abs() < 1e-12 => {
                Some(StarRep::StarlikeHalf)
            }
            ClassLabel::G => Some(StarRep::HalfPlaneCap),
            _ => None,
        }
    }

    /// Pointwise map w -> p.
    pub fn p_of_w(&self, w: Complex64) -> Complex64 {
        match self {
            StarRep::Starlike => (one() + w) / (one() - w),
            StarRep::StarlikeHalf => (one() - w).inv(),
            StarRep::HalfPlaneCap => (one() - w) / (one() - 0.5 * w),
        }
    }

    /// Series of p from the series of w (w(0) = 0 keeps divisors unital).
    pub fn p_series(&self, w: &TaylorSeries) -> TaylorSeries {
        let one_s = TaylorSeries::one(w.order());
        match self {
            StarRep::Starlike => {
                one_s.add(w).div(&one_s.sub(w)).expect("unit constant term")
            }
            StarRep::StarlikeHalf => {
                one_s.div(&one_s.sub(w)).expect("unit constant term")
            }
            StarRep::HalfPlaneCap => one_s
                .sub(w)
                .div(&one_s.sub(&w.scale(Complex64::new(0.5, 0.0))))
                .expect("unit constant term"),
        }
    }
}

/// A constructed class member: the generator, the induced p = zf'/f,
/// and the normalized f, all to a fixed truncation order.
#[derive(Debug, Clone)]
pub struct FamilyMember {
    pub class_label: ClassLabel,
    pub generator: SchwarzFunction,
    /// Free z-coefficient of u = z/f; meaningful only for defect-class
    /// members (the construction determines f only up to this choice).
    pub u1: Complex64,
    pub p_series: TaylorSeries,
    pub f_series: TaylorSeries,
}

/// Build a member of a represented class from a centered Schwarz
/// function. Supports starlike, starlike of order 1/2, and the
/// 3/2-cap class.
pub fn make_member(
    label: ClassLabel,
    omega: &SchwarzFunction,
    order: usize,
) -> Result<FamilyMember, SchwarzError> {
    let at0 = omega.eval(Complex64::ZERO).norm();
    if at0 > 1e-14 {
        return Err(SchwarzError::NotCentered { magnitude: at0 });
    }
    let rep = StarRep::for_label(label).ok_or_else(|| SchwarzError::UnsupportedLabel {
        label: label.token(),
    })?;
    let w = omega.series(order);
    let p_series = rep.p_series(&w);
    let f_series = f_from_p(&p_series)?;
    Ok(FamilyMember {
        class_label: label,
        generator: omega.clone(),
        u1: Complex64::ZERO,
        p_series,
        f_series,
    })
}

/// Build a defect-class member from phi via the coefficient solution of
/// `u - z u' = 1 + z^2 phi`, then f = z/u. The z-coefficient u1 is a
/// genuinely free parameter; the defect `(z/f)^2 f' - 1 = z^2 phi` does
/// not depend on it.
///
/// Zero-freeness of u is checked on the default grid only — a guard
/// against poles, not a proof.
pub fn make_u_member(
    phi: &SchwarzFunction,
    u1: Complex64,
    order: usize,
) -> Result<FamilyMember, SchwarzError> {
    assert!(order >= 2, "order must be at least 2");
    let phis = phi.series(order);
    let mut u_coeffs = vec![Complex64::ZERO; order + 1];
    u_coeffs[0] = Complex64::ONE;
    u_coeffs[1] = u1;
    for (k, c) in u_coeffs.iter_mut().enumerate().skip(2) {
        *c = -phis.coeff(k - 2) / (k - 1) as f64;
    }
    let u = TaylorSeries::new(u_coeffs);

    for &r in DEFAULT_GRID_RADII.iter() {
        for j in 0..DEFAULT_GRID_ANGLES {
            let th = std::f64::consts::TAU * j as f64 / DEFAULT_GRID_ANGLES as f64;
            let z = Complex64::from_polar(r, th);
            let m = u.eval(z).norm();
            if m < 1e-9 {
                return Err(SchwarzError::UVanishes { re: z.re, im: z.im, magnitude: m });
            }
        }
    }

    let inv_u = TaylorSeries::one(order).div(&u).expect("unit constant term");
    let f_series = inv_u.shift_up();
    // p = zf'/f = (u - z u')/u = (1 + z^2 phi)/u
    let p_series = TaylorSeries::one(order)
        .add(&phis.shift_up().shift_up().truncate(order))
        .div(&u)
        .expect("unit constant term");
    Ok(FamilyMember {
        class_label: ClassLabel::U,
        generator: phi.clone(),
        u1,
        p_series,
        f_series,
    })
}

/// Uniform point in the closed disk of the given radius.
fn disk_point<R: Rng>(rng: &mut R, rmax: f64) -> Complex64 {
    let r = rmax * rng.random::<f64>().sqrt();
    let th = std::f64::consts::TAU * rng.random::<f64>();
    Complex64::from_polar(r, th)
}

/// Random Schwarz function for a phi-role: Blaschke product of 0-2
/// factors with |a| <= 0.8, unimodular prefactor, no z-premultiple.
pub fn sample_phi<R: Rng>(rng: &mut R) -> SchwarzFunction {
    let degree = rng.random_range(0..3usize);
    let factors = (0..degree).map(|_| disk_point(rng, 0.8)).collect();
    let zeta = Complex64::from_polar(1.0, std::f64::consts::TAU * rng.random::<f64>());
    SchwarzFunction::blaschke(factors, zeta, false).expect("parameters in range")
}

/// Random centered Schwarz function for an omega-role: as
/// [`sample_phi`] but premultiplied by z so that omega(0) = 0.
pub fn sample_omega<R: Rng>(rng: &mut R) -> SchwarzFunction {
    let degree = rng.random_range(0..3usize);
    let factors = (0..degree).map(|_| disk_point(rng, 0.8)).collect();
    let zeta = Complex64::from_polar(1.0, std::f64::consts::TAU * rng.random::<f64>());
    SchwarzFunction::blaschke(factors, zeta, true).expect("parameters in range")
}
