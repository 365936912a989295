//! Invariants that tie the modules together: the certifier must agree
//! with the catalog's stored membership facts, constructed members
//! must certify cleanly in their own classes, and refinement must
//! never un-discover a violation.

use dfz_core::catalog::{CatalogFunction, CatalogName, ClassLabel, MembershipStatus};
use dfz_core::certify::{certify, GridSpec, VerdictStatus};
use dfz_core::operator::AnalyticInput;
use dfz_core::schwarz::{make_member, make_u_member, sample_omega, sample_phi};
use dfz_core::stream_seed;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Every stored membership fact is reproduced by the certifier on the
/// default grid: members grid-pass, non-members are violated with a
/// decisive witness. (Univalence itself is uncertifiable and carries
/// no grid verdict; unresolved facts are skipped.)
#[test]
fn certifier_agrees_with_every_catalog_fact() {
    let grid = GridSpec::default_grid();
    for name in CatalogName::all() {
        let cf = CatalogFunction::new(name);
        let facts = cf.memberships().to_vec();
        let input = AnalyticInput::catalog(cf);
        assert!(!facts.is_empty());
        for fact in facts {
            if fact.label == ClassLabel::S || fact.status == MembershipStatus::Unknown {
                continue;
            }
            let verdict = certify(&input, fact.label, &grid).unwrap();
            match fact.status {
                MembershipStatus::Member => {
                    assert_eq!(
                        verdict.status,
                        VerdictStatus::GridPass,
                        "{name} should pass {}: {verdict:?}",
                        fact.label
                    );
                    assert!(verdict.witness.is_none());
                    assert!(verdict.min_margin > 0.0);
                }
                MembershipStatus::NonMember => {
                    assert_eq!(
                        verdict.status,
                        VerdictStatus::Violated,
                        "{name} should violate {}: {verdict:?}",
                        fact.label
                    );
                    let w = verdict.witness.expect("violation carries a witness");
                    assert!(w.margin < -1e-12, "decisive witness: {w:?}");
                }
                MembershipStatus::Unknown => unreachable!(),
            }
        }
    }
}

/// Refining the default grid (more angles, extra radii) never turns a
/// violated catalog verdict into grid-pass.
#[test]
fn refinement_keeps_every_catalog_violation() {
    let coarse = GridSpec::default_grid();
    let mut radii = coarse.radii.clone();
    radii.extend([0.925, 0.975]);
    radii.sort_by(f64::total_cmp);
    let fine = GridSpec::new(radii, 2 * coarse.angles_per_circle, coarse.max_radius)
        .unwrap();
    for name in CatalogName::all() {
        let cf = CatalogFunction::new(name);
        let facts = cf.memberships().to_vec();
        let input = AnalyticInput::catalog(cf);
        for fact in facts {
            if fact.label == ClassLabel::S || fact.status != MembershipStatus::NonMember
            {
                continue;
            }
            let v0 = certify(&input, fact.label, &coarse).unwrap();
            let v1 = certify(&input, fact.label, &fine).unwrap();
            assert_eq!(v0.status, VerdictStatus::Violated);
            assert_eq!(
                v1.status,
                VerdictStatus::Violated,
                "{name} vs {}: refinement lost the violation",
                fact.label
            );
            // the finer grid sees at least as deep a violation
            assert!(v1.min_margin <= v0.min_margin + 1e-12);
        }
    }
}

/// One hundred random Blaschke-generated starlike members certify as
/// starlike on the (trust-clipped) default grid.
#[test]
fn random_starlike_members_grid_pass() {
    let grid = GridSpec::default_grid();
    for i in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(2001, i));
        let omega = sample_omega(&mut rng);
        let member = make_member(ClassLabel::Starlike, &omega, 192).unwrap();
        let input = AnalyticInput::from_member(&member);
        let verdict = certify(&input, ClassLabel::Starlike, &grid).unwrap();
        assert_eq!(
            verdict.status,
            VerdictStatus::GridPass,
            "member {i} ({omega}): {verdict:?}"
        );
        assert!(verdict.clipped, "series-backed grids are trust-clipped");
    }
}

/// Members constructed for the other generated classes certify in
/// their own class as well.
#[test]
fn constructed_members_certify_in_their_class() {
    let grid = GridSpec::default_grid();
    for (j, label) in [ClassLabel::StarlikeOrder(0.5), ClassLabel::G]
        .into_iter()
        .enumerate()
    {
        for i in 0..25 {
            let mut rng =
                ChaCha8Rng::seed_from_u64(stream_seed(3000 + j as u64, i));
            let omega = sample_omega(&mut rng);
            let member = make_member(label, &omega, 192).unwrap();
            let input = AnalyticInput::from_member(&member);
            let verdict = certify(&input, label, &grid).unwrap();
            assert_eq!(
                verdict.status,
                VerdictStatus::GridPass,
                "{label} member {i} ({omega}): {verdict:?}"
            );
        }
    }
}

/// Defect-class members built from phi have grid-sup |u-defect| equal
/// to |z^2 phi| <= |z|^2 < 1 by construction, and certify accordingly.
#[test]
fn u_members_stay_inside_the_defect_class() {
    let grid = GridSpec::default_grid();
    for i in 0..30 {
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(4001, i));
        let phi = sample_phi(&mut rng);
        let u1 = Complex64::new(
            0.6 * (rng.random::<f64>() - 0.5),
            0.6 * (rng.random::<f64>() - 0.5),
        );
        let member = match make_u_member(&phi, u1, 192) {
            Ok(m) => m,
            // a free-coefficient draw can park a zero of z/f on the
            // grid; that is a rejected input, not a class failure
            Err(_) => continue,
        };
        let input = AnalyticInput::from_member(&member);
        let verdict = certify(&input, ClassLabel::U, &grid).unwrap();
        assert_eq!(
            verdict.status,
            VerdictStatus::GridPass,
            "member {i} ({phi}, u1 = {u1}): {verdict:?}"
        );

        // sup over the effective grid, directly on the defect
        for &r in &verdict.grid.radii {
            for k in 0..64 {
                let th = std::f64::consts::TAU * k as f64 / 64.0;
                let z = Complex64::from_polar(r, th);
                let defect = input.u_defect(z).unwrap();
                assert!(defect.norm() <= r * r + 1e-9, "at {z}: {defect}");
            }
        }
    }
}
