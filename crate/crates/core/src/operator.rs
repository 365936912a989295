//! The operator `D(f;z) = 2 zf'(z)/f(z) - zf''(z)/f'(z)` and the
//! functionals that accompany it.
//!
//! Every route works through p = zf'/f where possible, using the
//! identities
//!
//! - `zf''/f' = p - 1 + zp'/p`, hence `D = p + 1 - zp'/p`,
//! - `1 + zf''/f' = p + zp'/p`,
//!
//! and for members generated by a Schwarz function phi via
//! `(z/f)^2 f' = 1 + z^2 phi`, the closed form
//! `D = (2 - z^3 phi'(z)) / (1 + z^2 phi(z))`, which is independent of
//! the free coefficient left by that construction.
//!
//! All functionals take their exact normalized value at z = 0
//! (`D = 2`, defect `= 0`, `m_alpha = 1`, convexity `= 1`).

use num_complex::Complex64;
use thiserror::Error;

use crate::catalog::CatalogFunction;
use crate::schwarz::{FamilyMember, SchwarzFunction};
use crate::series::TaylorSeries;

/// Magnitude below which a denominator counts as vanished.
const SING_EPS: f64 = 1e-12;

/// Largest |z| at which raw coefficient data is trusted for pointwise
/// evaluation at default order; closed-form routes are good to the
/// evaluation cap.
pub const SERIES_TRUST_RADIUS: f64 = 0.7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpError {
    /// f' vanishes: D has a pole there.
    #[error("f' is numerically zero at z = {re}+{im}i")]
    CriticalPoint { re: f64, im: f64 },
    /// f vanishes away from the origin: D has a pole there.
    #[error("f is numerically zero at z = {re}+{im}i (away from 0)")]
    ZeroValue { re: f64, im: f64 },
    /// p = zf'/f vanishes: the p-route formula has a pole there.
    #[error("p is numerically zero at z = {re}+{im}i")]
    ZeroP { re: f64, im: f64 },
    /// 1 + z^2 phi vanishes (possible only for |z| = 1).
    #[error("1 + z^2 phi(z) is numerically zero at z = {re}+{im}i")]
    DenominatorVanish { re: f64, im: f64 },
    /// The requested functional is not determined by this input.
    #[error("{what} is not determined by this input")]
    Unsupported { what: String },
    /// Constructor-level rejection of malformed data.
    #[error("invalid input: {what}")]
    BadInput { what: String },
}

/// A function given in one of four forms, each with its own evaluation
/// route for D.
#[derive(Debug, Clone)]
pub enum AnalyticInput {
    /// A catalog entry: closed-form f, f', f'' and D.
    Catalog(CatalogFunction),
    /// Raw coefficient data for a normalized f, with precomputed
    /// derivative series.
    SeriesF { f: TaylorSeries, fp: TaylorSeries, fpp: TaylorSeries },
    /// Coefficient data for p = zf'/f (so p(0) = 1), with its
    /// derivative and the induced u = z/f.
    SeriesP { p: TaylorSeries, pp: TaylorSeries, u: TaylorSeries },
    /// A defect-class member generated by phi; evaluation is closed
    /// form in phi and phi'.
    Phi { phi: SchwarzFunction },
}

impl AnalyticInput {
    pub fn catalog(cf: CatalogFunction) -> Self {
        AnalyticInput::Catalog(cf)
    }

    /// Wrap coefficient data for f; requires f(0) = 0, f'(0) = 1.
    pub fn from_f_series(f: TaylorSeries) -> Result<Self, OpError> {
        let c0 = f.coeff(0).norm();
        let c1 = (f.coeff(1) - Complex64::ONE).norm();
        if c0 > 1e-12 || c1 > 1e-12 {
            return Err(OpError::BadInput {
                what: format!(
                    "series is not normalized (|f(0)| = {c0:.3e}, |f'(0)-1| = {c1:.3e})"
                ),
            });
        }
        let fp = f.derivative();
        let fpp = fp.derivative();
        Ok(AnalyticInput::SeriesF { f, fp, fpp })
    }

    /// Wrap coefficient data for p = zf'/f; requires p(0) = 1. The
    /// induced u = z/f = exp(-int (p-1)/t) is precomputed so that the
    /// defect functional is available on this route.
    pub fn from_p_series(p: TaylorSeries) -> Result<Self, OpError> {
        let defect = (p.coeff(0) - Complex64::ONE).norm();
        if defect > 1e-12 {
            return Err(OpError::BadInput {
                what: format!("p(0) must be 1 (|p(0)-1| = {defect:.3e})"),
            });
        }
        let pp = p.derivative();
        let u = p
            .sub(&TaylorSeries::one(p.order()))
            .shift_down()
            .integrate0()
            .neg()
            .exp()
            .expect("zero constant term by construction");
        Ok(AnalyticInput::SeriesP { p, pp, u })
    }

    pub fn from_phi(phi: SchwarzFunction) -> Self {
        AnalyticInput::Phi { phi }
    }

    /// A constructed member enters through its p series; u is recovered
    /// from the member's own f so the free coefficient is preserved.
    pub fn from_member(m: &FamilyMember) -> Self {
        let p = m.p_series.clone();
        let pp = p.derivative();
        let u = TaylorSeries::one(m.f_series.order())
            .div(&m.f_series.shift_down())
            .expect("members are normalized");
        AnalyticInput::SeriesP { p, pp, u }
    }

    /// Short identifier for reports.
    pub fn describe(&self) -> String {
        match self {
            AnalyticInput::Catalog(cf) => {
                if cf.rotation() == 0.0 {
                    format!("catalog:{}", cf.name().token())
                } else {
                    format!("catalog:{}(rot={})", cf.name().token(), cf.rotation())
                }
            }
            AnalyticInput::SeriesF { f, .. } => format!("series-f(order={})", f.order()),
            AnalyticInput::SeriesP { p, .. } => format!("series-p(order={})", p.order()),
            AnalyticInput::Phi { phi } => format!("phi:{}", phi.spec_string()),
        }
    }

    /// Largest |z| at which pointwise values from this input are
    /// trusted: the evaluation cap for closed-form routes, a fixed
    /// conservative radius for raw coefficient data.
    pub fn trust_radius(&self) -> f64 {
        match self {
            AnalyticInput::Catalog(_) | AnalyticInput::Phi { .. } => crate::MAX_GRID_RADIUS,
            AnalyticInput::SeriesF { .. } | AnalyticInput::SeriesP { .. } => {
                SERIES_TRUST_RADIUS
            }
        }
    }

    /// Evaluate D(f;z).
    pub fn eval_d(&self, z: Complex64) -> Result<Complex64, OpError> {
        match self {
            AnalyticInput::Catalog(cf) => {
                if z == Complex64::ZERO {
                    return Ok(Complex64::new(2.0, 0.0));
                }
                Ok(cf.eval_d(z))
            }
            AnalyticInput::SeriesF { f, fp, fpp } => {
                if z == Complex64::ZERO {
                    return Ok(Complex64::new(2.0, 0.0));
                }
                let fv = f.eval(z);
                if fv.norm() < SING_EPS {
                    return Err(OpError::ZeroValue { re: z.re, im: z.im });
                }
                let fpv = fp.eval(z);
                if fpv.norm() < SING_EPS {
                    return Err(OpError::CriticalPoint { re: z.re, im: z.im });
                }
                Ok(2.0 * z * fpv / fv - z * fpp.eval(z) / fpv)
            }
            AnalyticInput::SeriesP { p, pp, .. } => eval_d_from_p_parts(p, pp, z),
            AnalyticInput::Phi { phi } => eval_d_from_phi(phi, z),
        }
    }

    /// The defect `(z/f)^2 f'(z) - 1`; identically `z^2 phi(z)` on the
    /// phi route.
    pub fn u_defect(&self, z: Complex64) -> Result<Complex64, OpError> {
        if z == Complex64::ZERO {
            return Ok(Complex64::ZERO);
        }
        match self {
            AnalyticInput::Catalog(cf) => {
                let fv = cf.eval_f(z);
                if fv.norm() < SING_EPS {
                    return Err(OpError::ZeroValue { re: z.re, im: z.im });
                }
                let w = z / fv;
                Ok(w * w * cf.eval_fp(z) - Complex64::ONE)
            }
            AnalyticInput::SeriesF { f, fp, .. } => {
                let fv = f.eval(z);
                if fv.norm() < SING_EPS {
                    return Err(OpError::ZeroValue { re: z.re, im: z.im });
                }
                let w = z / fv;
                Ok(w * w * fp.eval(z) - Complex64::ONE)
            }
            // (z/f)^2 f' = p u with u = z/f
            AnalyticInput::SeriesP { p, u, .. } => {
                Ok(p.eval(z) * u.eval(z) - Complex64::ONE)
            }
            AnalyticInput::Phi { phi } => Ok(z * z * phi.eval(z)),
        }
    }

    /// `m_alpha = p + alpha zp'/p`, the weighted blend of zf'/f and the
    /// convexity quantity. `m_0 = p`, `m_1 = 1 + zf''/f'`,
    /// `m_{-1} = D - 1`. On the phi route only alpha = -1 is
    /// determined.
    pub fn m_alpha(&self, alpha: f64, z: Complex64) -> Result<Complex64, OpError> {
        match self {
            AnalyticInput::Catalog(cf) => {
                if z == Complex64::ZERO {
                    return Ok(Complex64::ONE);
                }
                let fv = cf.eval_f(z);
                if fv.norm() < SING_EPS {
                    return Err(OpError::ZeroValue { re: z.re, im: z.im });
                }
                let fpv = cf.eval_fp(z);
                if fpv.norm() < SING_EPS {
                    return Err(OpError::CriticalPoint { re: z.re, im: z.im });
                }
                let p = z * fpv / fv;
                // zp'/p = 1 + zf''/f' - p
                let zlogp = Complex64::ONE + z * cf.eval_fpp(z) / fpv - p;
                Ok(p + alpha * zlogp)
            }
            AnalyticInput::SeriesF { f, fp, fpp } => {
                if z == Complex64::ZERO {
                    return Ok(Complex64::ONE);
                }
                let fv = f.eval(z);
                if fv.norm() < SING_EPS {
                    return Err(OpError::ZeroValue { re: z.re, im: z.im });
                }
                let fpv = fp.eval(z);
                if fpv.norm() < SING_EPS {
                    return Err(OpError::CriticalPoint { re: z.re, im: z.im });
                }
                let p = z * fpv / fv;
                let zlogp = Complex64::ONE + z * fpp.eval(z) / fpv - p;
                Ok(p + alpha * zlogp)
            }
            AnalyticInput::SeriesP { p, pp, .. } => {
                if z == Complex64::ZERO {
                    return Ok(Complex64::ONE);
                }
                let pv = p.eval(z);
                if pv.norm() < SING_EPS {
                    return Err(OpError::ZeroP { re: z.re, im: z.im });
                }
                Ok(pv + alpha * z * pp.eval(z) / pv)
            }
            AnalyticInput::Phi { phi } => {
                if (alpha + 1.0).abs() < 1e-12 {
                    if z == Complex64::ZERO {
                        return Ok(Complex64::ONE);
                    }
                    eval_d_from_phi(phi, z).map(|d| d - Complex64::ONE)
                } else {
                    Err(OpError::Unsupported {
                        what: format!("m_alpha with alpha = {alpha}"),
                    })
                }
            }
        }
    }

    /// The convexity quantity `1 + zf''/f'`; equals `m_1`.
    pub fn convexity(&self, z: Complex64) -> Result<Complex64, OpError> {
        match self {
            AnalyticInput::Phi { .. } => Err(OpError::Unsupported {
                what: "convexity quantity".to_string(),
            }),
            _ => self.m_alpha(1.0, z),
        }
    }
}

/// D through the p route: `D = p + 1 - zp'/p`. Assumes p(0) = 1.
pub fn eval_d_from_p(p: &TaylorSeries, z: Complex64) -> Result<Complex64, OpError> {
    eval_d_from_p_parts(p, &p.derivative(), z)
}

fn eval_d_from_p_parts(
    p: &TaylorSeries,
    pp: &TaylorSeries,
    z: Complex64,
) -> Result<Complex64, OpError> {
    if z == Complex64::ZERO {
        return Ok(Complex64::new(2.0, 0.0));
    }
    let pv = p.eval(z);
    if pv.norm() < SING_EPS {
        return Err(OpError::ZeroP { re: z.re, im: z.im });
    }
    Ok(pv + Complex64::ONE - z * pp.eval(z) / pv)
}

/// D through the phi route: `D = (2 - z^3 phi') / (1 + z^2 phi)`. The
/// denominator is at least 1 - |z|^2 inside the disk, so the error is
/// reachable only on the boundary.
pub fn eval_d_from_phi(
    phi: &SchwarzFunction,
    z: Complex64,
) -> Result<Complex64, OpError> {
    let den = Complex64::ONE + z * z * phi.eval(z);
    if den.norm() < SING_EPS {
        return Err(OpError::DenominatorVanish { re: z.re, im: z.im });
    }
    let num = Complex64::new(2.0, 0.0) - z * z * z * phi.eval_deriv(z);
    Ok(num / den)
}
