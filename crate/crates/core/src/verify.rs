//! Self-contained verification suites with serializable reports.
//!
//! Every suite is deterministic: randomized inputs come from a fixed-seed
//! ChaCha generator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::common_cause::{commuting_jcc_obstruction, fibonacci_sphere, joint_candidate_check, CommonCauseCandidate};
use crate::dynamics::{
    expected_local_dimension, local_algebra_dimension, primitive_causality_check, primitive_causality_check_with, Dynamics, DynamicsParams,
};
use crate::element::{c64, commutator, AlgebraElement, SiteRange};
use crate::error::Result;
use crate::geometry::DoubleCone;
use crate::monomial::{mul_monomials, Monomial};
use crate::oracle::{normalized_trace, rep_element, rep_monomial, spectrum_bounds, QubitWindow};
use crate::scenario::{Scenario, UnitVector3};

pub const SEED: u64 = 0x5eed_c0de;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub check: String,
    pub pass: bool,
    pub tol: f64,
    pub details: Value,
}

pub fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED)
}

pub fn random_unit(rng: &mut impl Rng) -> UnitVector3 {
    let z: f64 = rng.random_range(-1.0..1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).sqrt();
    UnitVector3::new(r * phi.cos(), r * phi.sin(), z).expect("point on the sphere")
}

pub fn random_monomial(rng: &mut impl Rng, lo: i32, hi: i32) -> Monomial {
    let sites: Vec<i32> = (lo..=hi).filter(|_| rng.random_bool(0.5)).collect();
    Monomial::from_doubled(&sites).expect("ascending in-range sites")
}

/// A few random monomials over doubled sites `lo..=hi` with random complex coefficients.
pub fn random_element(rng: &mut impl Rng, lo: i32, hi: i32, terms: usize) -> AlgebraElement {
    AlgebraElement::from_terms((0..terms).map(|_| {
        let m = random_monomial(rng, lo, hi);
        (m, c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }))
}

/// Candidate-family check: every `c` with `c2 = 0` from `grid` points on the
/// `xz` great circle, paired with every `c~` of a `grid`-point Fibonacci sphere.
pub fn verify_prop1(scenario: &Scenario, grid: usize, tol: f64) -> Result<VerifyReport> {
    let circle: Vec<UnitVector3> = (0..grid)
        .map(|k| {
            let phi = std::f64::consts::TAU * k as f64 / grid as f64;
            UnitVector3::new(phi.cos(), 0.0, phi.sin()).expect("unit circle")
        })
        .collect();
    let tildes = fibonacci_sphere(grid);
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut max_residual: f64 = 0.0;
    let mut min_max_commutator = f64::INFINITY;
    for c in &circle {
        for ct in &tildes {
            let cand = CommonCauseCandidate::new(*c, *ct);
            let r = joint_candidate_check(&cand, scenario, tol)?;
            let max_comm = r.criterion.commutator_norms.values().cloned().fold(0.0, f64::max);
            checked += 1;
            max_residual = max_residual.max(r.criterion.max_residual);
            min_max_commutator = min_max_commutator.min(max_comm);
            if !(r.pass && r.localized_in_oc && r.oc_in_common_past && max_comm > 0.1) {
                failures.push(json!({ "c": c.components(), "c_tilde": ct.components(), "report": r }));
            }
        }
    }
    Ok(VerifyReport {
        check: "prop1".into(),
        pass: failures.is_empty(),
        tol,
        details: json!({
            "candidates": checked,
            "max_residual": max_residual,
            "min_max_commutator_norm": min_max_commutator,
            "failures": failures,
        }),
    })
}

pub fn verify_prop2(scenario: &Scenario, tol: f64) -> Result<VerifyReport> {
    let r = commuting_jcc_obstruction(scenario, tol)?;
    Ok(VerifyReport { check: "prop2".into(), pass: r.pass, tol, details: serde_json::to_value(&r).expect("serializable") })
}

/// Parameter tuples exercised by the dynamics suite.
pub fn dynamics_tuples() -> Vec<DynamicsParams> {
    let h = std::f64::consts::FRAC_PI_2;
    [
        (0.0, 0.0, 1, 1),
        (h, h, 1, 1),
        (0.3, 0.7, 1, -1),
        (-0.4, 0.2, -1, 1),
        (1.1, -1.2, -1, -1),
        (0.0, 0.9, 1, 1),
        (0.8, 0.0, -1, 1),
        (-1.5, 1.5, 1, -1),
    ]
    .into_iter()
    .map(|(a, b, e1, e2)| DynamicsParams::new(a, b, e1, e2).expect("valid tuple"))
    .collect()
}

/// Generator images are self-adjoint unitaries with the right commutation
/// relations; `beta` is multiplicative and trace preserving.
pub fn verify_dynamics(tol: f64) -> Result<VerifyReport> {
    let sites: Vec<i32> = (-10..10).collect();
    let mut worst_unitarity: f64 = 0.0;
    let mut worst_spectrum: f64 = 0.0;
    let mut worst_relation: f64 = 0.0;
    for p in dynamics_tuples() {
        let d = Dynamics::new(p);
        let images: Vec<AlgebraElement> =
            sites.iter().map(|&s| d.beta_generator(crate::SiteIndex::from_doubled(s).expect("site"))).collect::<Result<_>>()?;
        for (i, x) in images.iter().enumerate() {
            worst_unitarity = worst_unitarity.max(x.distance(&x.adjoint())).max((x * x).distance(&AlgebraElement::identity()));
            let (lo, hi) = spectrum_bounds(x, &QubitWindow::covering(x)?)?;
            worst_spectrum = worst_spectrum.max((lo + 1.0).abs()).max((hi - 1.0).abs());
            for (j, y) in images.iter().enumerate() {
                let dev = if (sites[i] - sites[j]).abs() == 1 { &(x * y) + &(y * x) } else { commutator(x, y) };
                worst_relation = worst_relation.max(dev.sup_norm());
            }
        }
    }
    let mut rng = rng();
    let tuples = dynamics_tuples();
    let mut worst_hom: f64 = 0.0;
    let mut worst_trace: f64 = 0.0;
    for k in 0..200 {
        let d = Dynamics::new(tuples[k % tuples.len()]);
        let x = random_element(&mut rng, -3, 3, 3);
        let y = random_element(&mut rng, -3, 3, 3);
        let bxy = d.beta(&(&x * &y))?;
        worst_hom = worst_hom.max(bxy.distance(&(&d.beta(&x)? * &d.beta(&y)?)));
        worst_trace = worst_trace.max((bxy.trace() - (&x * &y).trace()).norm());
    }
    let special = Dynamics::new(DynamicsParams::new(0.7, 0.0, -1, 1)?);
    let mut special_exact = true;
    for x in -5..5 {
        let img = special.beta_generator(crate::SiteIndex::half(x))?;
        special_exact &= img == AlgebraElement::product_of(&[2 * x, 2 * x + 1, 2 * x + 2])?;
    }
    let pass =
        worst_unitarity < tol && worst_spectrum < tol && worst_relation < tol && worst_hom < tol && worst_trace < tol && special_exact;
    Ok(VerifyReport {
        check: "dynamics".into(),
        pass,
        tol,
        details: json!({
            "generators": sites.len(),
            "tuples": dynamics_tuples().len(),
            "max_unitarity_deviation": worst_unitarity,
            "max_spectrum_deviation": worst_spectrum,
            "max_relation_deviation": worst_relation,
            "max_homomorphism_deviation": worst_hom,
            "max_trace_deviation": worst_trace,
            "special_bond_images_exact": special_exact,
        }),
    })
}

/// Symbolic products, adjoints and traces against the dense representation.
pub fn verify_oracle(tol: f64) -> Result<VerifyReport> {
    let mut rng = rng();
    let mut monomial_mismatches = 0;
    for _ in 0..1000 {
        let qubits = rng.random_range(1..=7);
        let lo = rng.random_range(-4..=0);
        let w = QubitWindow::new(lo, lo + qubits - 1)?;
        let a = random_monomial(&mut rng, 2 * w.lo, 2 * w.hi);
        let b = random_monomial(&mut rng, 2 * w.lo, 2 * w.hi);
        let (s, p) = mul_monomials(a, b);
        let lhs = rep_monomial(a, &w)? * rep_monomial(b, &w)?;
        let rhs = rep_monomial(p, &w)? * c64(s.value(), 0.0);
        if lhs != rhs {
            monomial_mismatches += 1;
        }
    }
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let qubits = rng.random_range(1..=7);
        let lo = rng.random_range(-4..=0);
        let w = QubitWindow::new(lo, lo + qubits - 1)?;
        let x = random_element(&mut rng, 2 * w.lo, 2 * w.hi, 4);
        let y = random_element(&mut rng, 2 * w.lo, 2 * w.hi, 4);
        let (mx, my) = (rep_element(&x, &w)?, rep_element(&y, &w)?);
        worst = worst.max((rep_element(&(&x * &y), &w)? - &mx * &my).camax());
        worst = worst.max((rep_element(&x.adjoint(), &w)? - mx.adjoint()).camax());
        worst = worst.max((x.trace() - normalized_trace(&mx)).norm());
    }
    Ok(VerifyReport {
        check: "oracle".into(),
        pass: monomial_mismatches == 0 && worst < tol,
        tol,
        details: json!({
            "monomial_products": 1000,
            "monomial_mismatches": monomial_mismatches,
            "element_checks": 200,
            "max_element_deviation": worst,
        }),
    })
}

/// Double cones with `n(O) <= max_n`, placed on both sublattices.
pub fn small_double_cones(max_n: u32) -> Vec<DoubleCone> {
    let mut out = Vec::new();
    for np in 1..=max_n as i32 {
        for nm in 1..=max_n as i32 {
            if np + nm - 1 > max_n as i32 {
                continue;
            }
            for (u0, v0) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                out.push(DoubleCone::new(u0, u0 + np - 1, v0, v0 + nm - 1).expect("ordered"));
            }
        }
    }
    out
}

/// The generic tuple paired with the default dynamics for dimension checks.
pub fn generic_tuple() -> DynamicsParams {
    DynamicsParams::new(0.3, 0.7, 1, -1).expect("valid tuple")
}

pub fn verify_dimensions(tol: f64) -> Result<VerifyReport> {
    let mut rows = Vec::new();
    let mut pass = true;
    for p in [DynamicsParams::default(), generic_tuple()] {
        let d = Dynamics::new(p);
        for o in small_double_cones(5) {
            let dim = local_algebra_dimension(&o, &d)?;
            let expected = expected_local_dimension(&o);
            pass &= dim == expected;
            rows.push(json!({
                "dynamics": p, "cone": o, "n": o.n(), "dimension": dim, "expected": expected,
            }));
        }
    }
    Ok(VerifyReport { check: "dimensions".into(), pass, tol, details: json!({ "cones": rows }) })
}

pub fn verify_primitive_causality(p: DynamicsParams, tol: f64) -> Result<VerifyReport> {
    let full = primitive_causality_check(p, tol)?;
    let shrunk = primitive_causality_check_with(&Dynamics::new(p), SiteRange::from_doubled(-1, 1)?, tol)?;
    Ok(VerifyReport {
        check: "primitive-causality".into(),
        pass: full.pass && !shrunk.pass,
        tol,
        details: json!({ "inclusion": full, "negative_control": shrunk }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::DEFAULT_TOL;
    use crate::scenario::ScenarioSpec;

    #[test]
    fn suites_pass_with_defaults() {
        let s = Scenario::new(ScenarioSpec::default()).unwrap();
        assert!(verify_prop1(&s, 6, DEFAULT_TOL).unwrap().pass);
        assert!(verify_prop2(&s, DEFAULT_TOL).unwrap().pass);
        assert!(verify_primitive_causality(DynamicsParams::default(), DEFAULT_TOL).unwrap().pass);
    }

    #[test]
    fn dimensions_suite() {
        let r = verify_dimensions(DEFAULT_TOL).unwrap();
        assert!(r.pass, "{}", serde_json::to_string_pretty(&r.details).unwrap());
    }

    #[test]
    fn deterministic_random_inputs() {
        let a = random_element(&mut rng(), -2, 2, 3);
        let b = random_element(&mut rng(), -2, 2, 3);
        assert_eq!(a, b);
    }
}
