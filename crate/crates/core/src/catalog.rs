//! Catalog of closed-form reference functions in the unit disk.
//!
//! Four normalized analytic functions with known class memberships:
//!
//! | token | formula                      | role                                  |
//! |-------|------------------------------|---------------------------------------|
//! | `k`   | `z/(1-z)^2`                  | starlike extremal, in `U`             |
//! | `f1`  | `z/(1-z^2)`                  | odd starlike, in `U`                  |
//! | `f2`  | `-log(1-z)`                  | convex, outside `U`                   |
//! | `f3`  | `z(1-z/sqrt2)/(1-z^2)`       | starlike, outside `U`                 |
//!
//! Every function carries closed-form evaluators for `f`, `f'`, `f''`
//! and for `D(f;z) = 2zf'/f - zf''/f'`, a Taylor series, a rotation
//! parameter, and a list of membership facts used as ground truth by
//! the certifier tests.

use std::f64::consts::SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::series::{TaylorSeries, DEFAULT_ORDER};

/// Class membership labels.
///
/// `S` is plain univalence; `Starlike` and `Convex` are the classical
/// cones `Re(zf'/f) > 0` and `Re(1 + zf''/f') > 0`; `StarlikeOrder(a)`
/// shifts the starlikeness floor to `a`; `U` bounds the defect
/// `|(z/f)^2 f' - 1| < 1`; `G` caps `Re(1 + zf''/f') < 3/2`;
/// `MAlpha(a)` requires `Re((1-a) zf'/f + a(1 + zf''/f')) > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassLabel {
    S,
    Starlike,
    StarlikeOrder(f64),
    Convex,
    U,
    G,
    MAlpha(f64),
}

impl ClassLabel {
    /// Canonical short token, also used by the CLI.
    pub fn token(&self) -> String {
        match self {
            ClassLabel::S => "S".into(),
            ClassLabel::Starlike => "S*".into(),
            ClassLabel::StarlikeOrder(a) => format!("S*({a})"),
            ClassLabel::Convex => "K".into(),
            ClassLabel::U => "U".into(),
            ClassLabel::G => "G".into(),
            ClassLabel::MAlpha(a) => format!("M({a})"),
        }
    }

    /// Parse a token produced by [`ClassLabel::token`], plus a few
    /// spelled-out aliases.
    pub fn parse(s: &str) -> Option<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "s" => return Some(ClassLabel::S),
            "s*" | "starlike" => return Some(ClassLabel::Starlike),
            "k" | "convex" => return Some(ClassLabel::Convex),
            "u" => return Some(ClassLabel::U),
            "g" => return Some(ClassLabel::G),
            _ => {}
        }
        let inner = |prefix: &str| -> Option<f64> {
            t.strip_prefix(prefix)?
                .strip_suffix(')')?
                .trim()
                .parse::<f64>()
                .ok()
        };
        if let Some(a) = inner("S*(").or_else(|| inner("s*(")) {
            return Some(ClassLabel::StarlikeOrder(a));
        }
        if let Some(a) = inner("M(").or_else(|| inner("m(")) {
            return Some(ClassLabel::MAlpha(a));
        }
        None
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.token())
    }
}

impl Serialize for ClassLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.token())
    }
}

/// Recorded membership status. `Unknown` marks claims the catalog does
/// not commit to either way (no reliable source, and a grid check is
/// not proof).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MembershipStatus {
    Member,
    NonMember,
    Unknown,
}

impl MembershipStatus {
    pub fn token(&self) -> &'static str {
        match self {
            MembershipStatus::Member => "member",
            MembershipStatus::NonMember => "non-member",
            MembershipStatus::Unknown => "unknown",
        }
    }
}

impl Serialize for MembershipStatus {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.token())
    }
}

/// One ground-truth membership statement with a one-line reason.
///
/// These are stored facts, not recomputed claims; the certifier checks
/// them independently on a grid.
#[derive(Debug, Clone, Serialize)]
pub struct MembershipFact {
    pub label: ClassLabel,
    pub status: MembershipStatus,
    pub note: &'static str,
}

/// Identifiers for the four catalog functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CatalogName {
    Koebe,
    F1,
    F2,
    F3,
}

impl CatalogName {
    pub fn all() -> [CatalogName; 4] {
        [CatalogName::Koebe, CatalogName::F1, CatalogName::F2, CatalogName::F3]
    }

    pub fn token(&self) -> &'static str {
        match self {
            CatalogName::Koebe => "k",
            CatalogName::F1 => "f1",
            CatalogName::F2 => "f2",
            CatalogName::F3 => "f3",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "k" | "koebe" => Some(CatalogName::Koebe),
            "f1" => Some(CatalogName::F1),
            "f2" => Some(CatalogName::F2),
            "f3" => Some(CatalogName::F3),
            _ => None,
        }
    }

    /// Human-readable formula.
    pub fn formula(&self) -> &'static str {
        match self {
            CatalogName::Koebe => "z/(1-z)^2",
            CatalogName::F1 => "z/(1-z^2)",
            CatalogName::F2 => "-log(1-z)",
            CatalogName::F3 => "z(1 - z/sqrt2)/(1-z^2)",
        }
    }
}

impl fmt::Display for CatalogName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl Serialize for CatalogName {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.token())
    }
}

/// A catalog function, possibly rotated: `f_t(z) = e^{-it} f(e^{it} z)`.
///
/// Rotation preserves normalization and every class in [`ClassLabel`],
/// and acts on the operator by `D(f_t; z) = D(f; e^{it} z)`.
#[derive(Debug, Clone)]
pub struct CatalogFunction {
    name: CatalogName,
    rotation: f64,
    order: usize,
    f_series: TaylorSeries,
    d_series: TaylorSeries,
    memberships: Vec<MembershipFact>,
}

/// Below this radius the quotient form of `D(f2;z)` divides two tiny
/// logarithms; switch to the series of `D`, which is entire there.
const F2_SERIES_FALLBACK_RADIUS: f64 = 1e-3;

impl CatalogFunction {
    pub fn new(name: CatalogName) -> Self {
        Self::with_order(name, DEFAULT_ORDER)
    }

    pub fn with_order(name: CatalogName, order: usize) -> Self {
        let f_series = base_f_series(name, order);
        let d_series = base_d_series(name, order);
        Self {
            name,
            rotation: 0.0,
            order,
            f_series,
            d_series,
            memberships: memberships_of(name),
        }
    }

    /// The rotated function `z -> e^{-it} f(e^{it} z)`.
    pub fn rotate(&self, theta: f64) -> Self {
        let t = self.rotation + theta;
        let phase = |n: i32| Complex64::from_polar(1.0, t * n as f64);
        let f_series = TaylorSeries::new(
            base_f_series(self.name, self.order)
                .coeffs()
                .iter()
                .enumerate()
                .map(|(n, &c)| c * phase(n as i32 - 1))
                .collect(),
        );
        let d_series = TaylorSeries::new(
            base_d_series(self.name, self.order)
                .coeffs()
                .iter()
                .enumerate()
                .map(|(n, &c)| c * phase(n as i32))
                .collect(),
        );
        Self {
            name: self.name,
            rotation: t,
            order: self.order,
            f_series,
            d_series,
            memberships: self.memberships.clone(),
        }
    }

    pub fn name(&self) -> CatalogName {
        self.name
    }

    pub fn rotation(&self) -> f64 {
        self.rotation
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Taylor coefficients of the (rotated) function.
    pub fn series(&self) -> &TaylorSeries {
        &self.f_series
    }

    /// Taylor coefficients of `z -> D(f;z)` for the (rotated) function.
    pub fn d_series(&self) -> &TaylorSeries {
        &self.d_series
    }

    pub fn memberships(&self) -> &[MembershipFact] {
        &self.memberships
    }

    /// Recorded membership status for a label, if the catalog has one.
    pub fn membership(&self, label: ClassLabel) -> Option<MembershipStatus> {
        self.memberships.iter().find(|m| m.label == label).map(|m| m.status)
    }

    fn arg(&self, z: Complex64) -> Complex64 {
        z * Complex64::from_polar(1.0, self.rotation)
    }

    /// Closed-form `f(z)`.
    pub fn eval_f(&self, z: Complex64) -> Complex64 {
        let w = self.arg(z);
        base_f(self.name, w) * Complex64::from_polar(1.0, -self.rotation)
    }

    /// Closed-form `f'(z)`.
    pub fn eval_fp(&self, z: Complex64) -> Complex64 {
        base_fp(self.name, self.arg(z))
    }

    /// Closed-form `f''(z)`.
    pub fn eval_fpp(&self, z: Complex64) -> Complex64 {
        let w = self.arg(z);
        base_fpp(self.name, w) * Complex64::from_polar(1.0, self.rotation)
    }

    /// Closed-form `D(f;z)`, with a series fallback where the closed
    /// form is ill-conditioned (`f2` at tiny `|z|`).
    pub fn eval_d(&self, z: Complex64) -> Complex64 {
        let w = self.arg(z);
        if self.name == CatalogName::F2 && w.norm() < F2_SERIES_FALLBACK_RADIUS {
            return self.d_series.eval(z);
        }
        base_d(self.name, w)
    }
}

fn one() -> Complex64 {
    Complex64::ONE
}

fn base_f(name: CatalogName, z: Complex64) -> Complex64 {
    match name {
        CatalogName::Koebe => z / ((one() - z) * (one() - z)),
        CatalogName::F1 => z / (one() - z * z),
        CatalogName::F2 => -(one() - z).ln(),
        CatalogName::F3 => z * (one() - z / SQRT_2) / (one() - z * z),
    }
}

fn base_fp(name: CatalogName, z: Complex64) -> Complex64 {
    match name {
        CatalogName::Koebe => {
            let d = one() - z;
            (one() + z) / (d * d * d)
        }
        CatalogName::F1 => {
            let d = one() - z * z;
            (one() + z * z) / (d * d)
        }
        CatalogName::F2 => (one() - z).inv(),
        CatalogName::F3 => {
            let d = one() - z * z;
            (one() - SQRT_2 * z + z * z) / (d * d)
        }
    }
}

fn base_fpp(name: CatalogName, z: Complex64) -> Complex64 {
    match name {
        CatalogName::Koebe => {
            let d = one() - z;
            (Complex64::new(4.0, 0.0) + 2.0 * z) / (d * d * d * d)
        }
        CatalogName::F1 => {
            let d = one() - z * z;
            2.0 * z * (Complex64::new(3.0, 0.0) + z * z) / (d * d * d)
        }
        CatalogName::F2 => {
            let d = one() - z;
            (d * d).inv()
        }
        CatalogName::F3 => {
            let d = one() - z * z;
            (2.0 * z * z * z - 3.0 * SQRT_2 * z * z + 6.0 * z
                - Complex64::new(SQRT_2, 0.0))
                / (d * d * d)
        }
    }
}

fn base_d(name: CatalogName, z: Complex64) -> Complex64 {
    match name {
        CatalogName::Koebe => 2.0 * (one() - z * z).inv(),
        CatalogName::F1 => 2.0 * (one() + z * z).inv(),
        CatalogName::F2 => {
            let l = (one() - z).ln();
            -z * (Complex64::new(2.0, 0.0) + l) / ((one() - z) * l)
        }
        CatalogName::F3 => {
            let g = -SQRT_2 * z * z * z + 3.0 * z * z - 3.0 * SQRT_2 * z
                + Complex64::new(2.0, 0.0);
            let h = (one() - z / SQRT_2) * (one() - SQRT_2 * z + z * z);
            g / h
        }
    }
}

fn base_f_series(name: CatalogName, order: usize) -> TaylorSeries {
    let c = |x: f64| Complex64::new(x, 0.0);
    let coeffs: Vec<Complex64> = (0..=order)
        .map(|n| match name {
            CatalogName::Koebe => c(n as f64),
            CatalogName::F1 => c(if n % 2 == 1 { 1.0 } else { 0.0 }),
            CatalogName::F2 => {
                if n == 0 {
                    c(0.0)
                } else {
                    c(1.0 / n as f64)
                }
            }
            CatalogName::F3 => {
                if n == 0 {
                    c(0.0)
                } else if n % 2 == 1 {
                    c(1.0)
                } else {
                    c(-1.0 / SQRT_2)
                }
            }
        })
        .collect();
    TaylorSeries::new(coeffs)
}

fn base_d_series(name: CatalogName, order: usize) -> TaylorSeries {
    let c = |x: f64| Complex64::new(x, 0.0);
    match name {
        // 2/(1 - z^2) and 2/(1 + z^2)
        CatalogName::Koebe | CatalogName::F1 => {
            let coeffs = (0..=order)
                .map(|n| {
                    if n % 2 != 0 {
                        c(0.0)
                    } else if name == CatalogName::Koebe {
                        c(2.0)
                    } else {
                        c(if n % 4 == 0 { 2.0 } else { -2.0 })
                    }
                })
                .collect();
            TaylorSeries::new(coeffs)
        }
        // 2 f'/(f/z) - z f''/f'; both divisors are units.
        CatalogName::F2 => {
            let fp = TaylorSeries::from_real(&vec![1.0; order + 1]);
            let fpp = fp.mul(&fp);
            let f_over_z = TaylorSeries::log1m(order + 1).shift_down();
            let term1 = fp.scale(c(2.0)).div(&f_over_z).expect("unit divisor");
            let term2 = fpp.shift_up().div(&fp).expect("unit divisor");
            term1.sub(&term2).truncate(order)
        }
        // rational: g/h with polynomial g, h
        CatalogName::F3 => {
            let g = TaylorSeries::from_real(&[2.0, -3.0 * SQRT_2, 3.0, -SQRT_2])
                .truncate(order);
            let h = TaylorSeries::from_real(&[
                1.0,
                -3.0 / SQRT_2,
                2.0,
                -1.0 / SQRT_2,
            ])
            .truncate(order);
            g.div(&h).expect("unit divisor")
        }
    }
}

fn memberships_of(name: CatalogName) -> Vec<MembershipFact> {
    use MembershipStatus::{Member, NonMember, Unknown};
    let fact = |label, status, note| MembershipFact { label, status, note };
    match name {
        CatalogName::Koebe => vec![
            fact(ClassLabel::S, Member, "injective: k(a) = k(b) forces (a-b)(1-ab) = 0"),
            fact(
                ClassLabel::Starlike,
                Member,
                "z k'/k = (1+z)/(1-z) maps the disk onto Re w > 0",
            ),
            fact(
                ClassLabel::StarlikeOrder(0.5),
                NonMember,
                "Re (1+z)/(1-z) sinks to 0 along z = it",
            ),
            fact(
                ClassLabel::Convex,
                NonMember,
                "1 + z k''/k' tends to -infinity as z -> -1",
            ),
            fact(ClassLabel::U, Member, "(z/k)^2 k' = 1 - z^2, so the defect is |z|^2 < 1"),
            fact(
                ClassLabel::G,
                NonMember,
                "1 + z k''/k' tends to +infinity as z -> 1",
            ),
            fact(
                ClassLabel::MAlpha(-1.0),
                Member,
                "D(k;z) - 1 = (1+z^2)/(1-z^2) has positive real part",
            ),
        ],
        CatalogName::F1 => vec![
            fact(ClassLabel::S, Member, "injective: f1(a) = f1(b) forces (a-b)(1+ab) = 0"),
            fact(
                ClassLabel::Starlike,
                Member,
                "z f1'/f1 = (1+z^2)/(1-z^2), a right half-plane map of z^2",
            ),
            fact(
                ClassLabel::StarlikeOrder(0.5),
                NonMember,
                "Re (1+z^2)/(1-z^2) sinks to 0 along z = it",
            ),
            fact(
                ClassLabel::Convex,
                NonMember,
                "1 + z f1''/f1' tends to -infinity along z = it",
            ),
            fact(ClassLabel::U, Member, "(z/f1)^2 f1' = 1 + z^2, so the defect is |z|^2 < 1"),
            fact(
                ClassLabel::G,
                NonMember,
                "1 + z f1''/f1' tends to +infinity as z -> 1",
            ),
            fact(
                ClassLabel::MAlpha(-1.0),
                Member,
                "D(f1;z) - 1 = (1-z^2)/(1+z^2) has positive real part",
            ),
        ],
        CatalogName::F2 => vec![
            fact(ClassLabel::S, Member, "convex, hence univalent"),
            fact(ClassLabel::Starlike, Member, "convex, hence starlike"),
            fact(
                ClassLabel::StarlikeOrder(0.5),
                Member,
                "convex, hence starlike of order 1/2",
            ),
            fact(
                ClassLabel::Convex,
                Member,
                "1 + z f2''/f2' = 1/(1-z) has real part above 1/2",
            ),
            fact(
                ClassLabel::U,
                NonMember,
                "the defect |z^2/((1-z) log^2(1-z)) - 1| blows up as z -> 1",
            ),
            fact(ClassLabel::G, NonMember, "1 + z f2''/f2' = 1/(1-z) is unbounded above"),
            fact(
                ClassLabel::MAlpha(-1.0),
                NonMember,
                "D(f2;r) - 1 turns negative on (0,1): D vanishes where log(1-r) = -2",
            ),
        ],
        CatalogName::F3 => vec![
            fact(
                ClassLabel::S,
                Member,
                "close-to-convex (cited result), hence univalent",
            ),
            fact(
                ClassLabel::Starlike,
                Unknown,
                "only close-to-convexity is on record; starlikeness is not asserted",
            ),
            fact(
                ClassLabel::StarlikeOrder(0.5),
                NonMember,
                "Re z f3'/f3 at z = it falls to 1/3 as t -> 1",
            ),
            fact(
                ClassLabel::Convex,
                NonMember,
                "1 + z f3''/f3' tends to -infinity near z = e^{i pi/4}",
            ),
            fact(
                ClassLabel::U,
                NonMember,
                "(z/f3)^2 f3' - 1 = (z^2/2)/(1 - z/sqrt2)^2 exceeds 1 in modulus past 1/sqrt2",
            ),
            fact(
                ClassLabel::G,
                NonMember,
                "1 + z f3''/f3' tends to +infinity as z -> 1",
            ),
            fact(
                ClassLabel::MAlpha(-1.0),
                NonMember,
                "D(f3;z) - 1 turns negative on (0,1): D vanishes at z = 1/sqrt2",
            ),
        ],
    }
}

/// All four catalog functions at the default series order.
pub fn list() -> Vec<CatalogFunction> {
    CatalogName::all().iter().map(|&n| CatalogFunction::new(n)).collect()
}

/// Look a function up by token (`k`, `f1`, `f2`, `f3`).
pub fn get(token: &str) -> Option<CatalogFunction> {
    CatalogName::parse(token).map(CatalogFunction::new)
}
