//! Grid certification of pointwise class conditions.
//!
//! Each certifiable class has a real margin function that is positive
//! exactly where the defining condition holds: `Re zf'/f` for starlike
//! (minus the order for the order-alpha variant), `Re(1 + zf''/f')`
//! for convex, `1 - |(z/f)^2 f' - 1|` for the defect class,
//! `3/2 - Re(1 + zf''/f')` for the capped class, and `Re m_alpha` for
//! the blended family. A verdict reports either a clean sweep of the
//! grid or the first grid point (ascending radius, then angle) where
//! the margin drops to zero or below.
//!
//! Plain univalence has no pointwise criterion of this kind, so the
//! label `S` is rejected as uncertifiable rather than given a bogus
//! test.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::catalog::ClassLabel;
use crate::operator::{AnalyticInput, OpError};
use crate::{DEFAULT_GRID_ANGLES, DEFAULT_GRID_RADII, MAX_GRID_RADIUS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertifyError {
    #[error("invalid grid: {what}")]
    BadGrid { what: String },
    /// Membership in S is not a pointwise condition.
    #[error("class {label} has no pointwise criterion to certify")]
    UncertifiableClass { label: String },
    #[error("order parameter must lie in [0,1), got {value}")]
    BadOrderParameter { value: f64 },
    /// The real-part floor formula is only valid up to tanh(1/2).
    #[error("radius {radius} exceeds the floor formula's range (max {max})")]
    RadiusOutOfRange { radius: f64, max: f64 },
    #[error(transparent)]
    Eval(#[from] OpError),
}

/// Concentric evaluation circles: every grid point is
/// `r_i * exp(2 pi i j / n)` for a listed radius and `j < n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub radii: Vec<f64>,
    pub angles_per_circle: usize,
    pub max_radius: f64,
}

impl GridSpec {
    /// Validated constructor: radii strictly ascending in
    /// `(0, max_radius]`, at least 64 angles, cap at most 0.999.
    pub fn new(
        radii: Vec<f64>,
        angles_per_circle: usize,
        max_radius: f64,
    ) -> Result<Self, CertifyError> {
        let bad = |what: String| Err(CertifyError::BadGrid { what });
        if radii.is_empty() {
            return bad("no radii".to_string());
        }
        if angles_per_circle < 64 {
            return bad(format!("need at least 64 angles, got {angles_per_circle}"));
        }
        if !(max_radius > 0.0 && max_radius <= MAX_GRID_RADIUS) {
            return bad(format!(
                "max radius must lie in (0, {MAX_GRID_RADIUS}], got {max_radius}"
            ));
        }
        for w in radii.windows(2) {
            if w[1] <= w[0] {
                return bad(format!("radii must ascend strictly: {} then {}", w[0], w[1]));
            }
        }
        let lo = radii[0];
        let hi = *radii.last().expect("nonempty");
        if lo <= 0.0 || hi > max_radius {
            return bad(format!("radii must lie in (0, {max_radius}], got [{lo}, {hi}]"));
        }
        Ok(GridSpec { radii, angles_per_circle, max_radius })
    }

    /// Eleven circles to 0.99, 512 angles each.
    pub fn default_grid() -> Self {
        GridSpec {
            radii: DEFAULT_GRID_RADII.to_vec(),
            angles_per_circle: DEFAULT_GRID_ANGLES,
            max_radius: 0.99,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VerdictStatus {
    /// The margin stayed positive at every checked point.
    #[serde(rename = "grid-pass")]
    GridPass,
    /// At least one checked point has margin <= 0.
    #[serde(rename = "violated")]
    Violated,
}

/// The first offending grid point of a violated condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub re: f64,
    pub im: f64,
    pub value_re: f64,
    pub value_im: f64,
    /// The margin at the witness; at most zero.
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MembershipVerdict {
    pub label: ClassLabel,
    pub status: VerdictStatus,
    /// Present exactly when the status is `Violated`.
    pub witness: Option<Witness>,
    /// The grid actually swept (radii may have been clipped).
    pub grid: GridSpec,
    /// True when circles beyond the input's trust radius were dropped.
    pub clipped: bool,
    /// Smallest margin seen over the swept grid.
    pub min_margin: f64,
}

/// Margin and underlying functional value for one class at one point.
fn margin_at(
    input: &AnalyticInput,
    label: ClassLabel,
    z: Complex64,
) -> Result<(f64, Complex64), OpError> {
    match label {
        ClassLabel::Starlike => input.m_alpha(0.0, z).map(|v| (v.re, v)),
        ClassLabel::StarlikeOrder(a) => input.m_alpha(0.0, z).map(|v| (v.re - a, v)),
        ClassLabel::Convex => input.convexity(z).map(|v| (v.re, v)),
        ClassLabel::U => input.u_defect(z).map(|v| (1.0 - v.norm(), v)),
        ClassLabel::G => input.convexity(z).map(|v| (1.5 - v.re, v)),
        ClassLabel::MAlpha(a) => input.m_alpha(a, z).map(|v| (v.re, v)),
        ClassLabel::S => Err(OpError::Unsupported {
            what: "pointwise criterion for S".to_string(),
        }),
    }
}

struct CircleOutcome {
    min_margin: f64,
    witness: Option<Witness>,
}

fn sweep_circle(
    input: &AnalyticInput,
    label: ClassLabel,
    r: f64,
    angles: usize,
) -> Result<CircleOutcome, OpError> {
    let mut min_margin = f64::INFINITY;
    let mut witness = None;
    for j in 0..angles {
        let th = std::f64::consts::TAU * j as f64 / angles as f64;
        let z = Complex64::from_polar(r, th);
        let (margin, value) = margin_at(input, label, z)?;
        if margin < min_margin {
            min_margin = margin;
        }
        if margin <= 0.0 && witness.is_none() {
            witness = Some(Witness {
                re: z.re,
                im: z.im,
                value_re: value.re,
                value_im: value.im,
                margin,
            });
        }
    }
    Ok(CircleOutcome { min_margin, witness })
}

/// Sweep the grid for the class condition. Circles beyond the input's
/// trust radius are dropped (and the verdict marked clipped) rather
/// than evaluated on untrustworthy data.
pub fn certify(
    input: &AnalyticInput,
    label: ClassLabel,
    grid: &GridSpec,
) -> Result<MembershipVerdict, CertifyError> {
    match label {
        ClassLabel::S => {
            return Err(CertifyError::UncertifiableClass { label: label.token() })
        }
        ClassLabel::StarlikeOrder(a) if !(0.0..1.0).contains(&a) => {
            return Err(CertifyError::BadOrderParameter { value: a })
        }
        ClassLabel::MAlpha(a) if !a.is_finite() => {
            return Err(CertifyError::BadOrderParameter { value: a })
        }
        _ => {}
    }

    let trust = input.trust_radius();
    let radii: Vec<f64> =
        grid.radii.iter().copied().filter(|&r| r <= trust + 1e-12).collect();
    let clipped = radii.len() != grid.radii.len();
    if radii.is_empty() {
        return Err(CertifyError::BadGrid {
            what: format!("no grid radii within the trust radius {trust}"),
        });
    }
    let effective = GridSpec {
        radii: radii.clone(),
        angles_per_circle: grid.angles_per_circle,
        max_radius: grid.max_radius.min(trust),
    };

    let outcomes: Result<Vec<CircleOutcome>, OpError> = radii
        .par_iter()
        .map(|&r| sweep_circle(input, label, r, grid.angles_per_circle))
        .collect();
    let outcomes = outcomes?;

    let mut min_margin = f64::INFINITY;
    let mut witness = None;
    for o in &outcomes {
        min_margin = min_margin.min(o.min_margin);
        if witness.is_none() {
            witness = o.witness;
        }
    }
    let status = if witness.is_some() {
        VerdictStatus::Violated
    } else {
        VerdictStatus::GridPass
    };
    Ok(MembershipVerdict { label, status, witness, grid: effective, clipped, min_margin })
}

/// One inequality check at a point: `value <= bound`, with the
/// remaining slack `margin = bound - value`; holds iff the margin is
/// nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCheck {
    pub radius: f64,
    pub value: f64,
    pub bound: f64,
    pub margin: f64,
    pub holds: bool,
}

fn bound_check(radius: f64, value: f64, bound: f64) -> BoundCheck {
    let margin = bound - value;
    BoundCheck { radius, value, bound, margin, holds: margin >= 0.0 }
}

/// Check `|log(zf'/f)| <= log((1+r)/(1-r))` at z (principal branch),
/// a bound every normalized univalent function satisfies. The cusped
/// extremal attains equality on the positive real axis.
pub fn check_growth_bound(
    input: &AnalyticInput,
    z: Complex64,
) -> Result<BoundCheck, CertifyError> {
    let r = z.norm();
    let p = input.m_alpha(0.0, z)?;
    let value = p.ln().norm();
    Ok(bound_check(r, value, ((1.0 + r) / (1.0 - r)).ln()))
}

/// Check `|zf''/f' - 2r^2/(1-r^2)| <= 4r/(1-r^2)` at z, the
/// univalent distortion bound on the logarithmic derivative of f'.
pub fn check_distortion_bound(
    input: &AnalyticInput,
    z: Complex64,
) -> Result<BoundCheck, CertifyError> {
    let r = z.norm();
    let r2 = r * r;
    // zf''/f' = (1 + zf''/f') - 1
    let q = input.convexity(z)? - Complex64::ONE;
    let value = (q - Complex64::new(2.0 * r2 / (1.0 - r2), 0.0)).norm();
    Ok(bound_check(r, value, 4.0 * r / (1.0 - r2)))
}

/// Largest radius at which the real-part floor formula applies:
/// tanh(1/2), where log((1+r)/(1-r)) reaches 1.
pub fn max_floor_radius() -> f64 {
    0.5_f64.tanh()
}

/// Lower bound `(1-r)/(1+r)` for `Re zf'/f` over univalent f at
/// |z| = r. Valid for `r <= tanh(1/2)`, where the logarithm bound that
/// justifies it stays within the unit ball.
pub fn real_part_floor_s(r: f64) -> Result<f64, CertifyError> {
    let max = max_floor_radius();
    if !(0.0..=max + 1e-12).contains(&r) {
        return Err(CertifyError::RadiusOutOfRange { radius: r, max });
    }
    Ok((1.0 - r) / (1.0 + r))
}
