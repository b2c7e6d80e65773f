//! Noncommutative common causes: partitions of unity, the conditional
//! expectation they induce, the screening-off criterion, the rank-2 candidate
//! family `C(c, c~)` localized over sites `-1/2..1/2`, and the obstruction
//! for commuting common causes.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::joint_basis;
use crate::element::{c64, commutant_within_span, commutator, AlgebraElement, SiteRange};
use crate::error::{Error, Result};
use crate::geometry::{past_region, region_a, region_b, region_c, supported_in, PastKind, RegionGeom};
use crate::monomial::SiteIndex;
use crate::oracle::{operator_norm, QubitWindow};
use crate::scenario::{Scenario, State, UnitVector3};

/// Mutually orthogonal projections summing to the unit.
#[derive(Clone, Debug)]
pub struct Partition {
    members: Vec<AlgebraElement>,
}

impl Partition {
    pub fn new(members: Vec<AlgebraElement>, tol: f64) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidPartition("no members".into()));
        }
        let mut sum = AlgebraElement::zero();
        for (j, c) in members.iter().enumerate() {
            if !c.is_projection(tol) {
                return Err(Error::InvalidPartition(format!("member {} is not a projection", j + 1)));
            }
            for (k, d) in members.iter().enumerate().skip(j + 1) {
                if (c * d).sup_norm() > tol {
                    return Err(Error::InvalidPartition(format!("members {} and {} are not orthogonal", j + 1, k + 1)));
                }
            }
            sum += c;
        }
        if !sum.approx_eq(&AlgebraElement::identity(), tol) {
            return Err(Error::InvalidPartition("members do not sum to the unit".into()));
        }
        Ok(Partition { members })
    }

    pub fn members(&self) -> &[AlgebraElement] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `E(x) = sum_k C_k x C_k`.
    pub fn expectation(&self, x: &AlgebraElement) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for c in &self.members {
            out += &(&(c * x) * c);
        }
        out
    }
}

pub fn conditional_expectation(p: &Partition, x: &AlgebraElement) -> AlgebraElement {
    p.expectation(x)
}

fn u(d: i32) -> AlgebraElement {
    AlgebraElement::generator(SiteIndex::from_doubled(d).expect("fixed site"))
}

/// The rank-2 projection
///
/// ```text
/// C(c, c~) = 1/4 (1 + P)(1 + c1 U_{1/2} + c2 U_0 + c3 i U_{1/2} U_0)
///          + 1/4 (1 - P)(1 + c~1 U_{-1/2} + c~2 U_0 + c~3 i U_{-1/2} U_0),   P = U_{-1/2} U_{1/2}.
/// ```
///
/// On each eigenspace of `P` the second factor is a Bloch-sphere projection,
/// so `C` is a projection of trace 1/2 and `C(-c, -c~) = 1 - C`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CommonCauseCandidate {
    pub c: UnitVector3,
    pub c_tilde: UnitVector3,
}

impl CommonCauseCandidate {
    pub fn new(c: UnitVector3, c_tilde: UnitVector3) -> Self {
        CommonCauseCandidate { c, c_tilde }
    }

    pub fn projection(&self) -> AlgebraElement {
        let one = AlgebraElement::identity();
        let p = &u(-1) * &u(1);
        let i = c64(0.0, 1.0);
        let sector = |x: &AlgebraElement, r: &UnitVector3| {
            &(&(&one + &x.scale_real(r.x())) + &u(0).scale_real(r.y())) + &(x * &u(0)).scale(i * r.z())
        };
        let upper = &(&one + &p) * &sector(&u(1), &self.c);
        let lower = &(&one - &p) * &sector(&u(-1), &self.c_tilde);
        (&upper + &lower).scale_real(0.25)
    }

    /// `C(-c, -c~)`.
    pub fn complement(&self) -> CommonCauseCandidate {
        CommonCauseCandidate { c: -self.c, c_tilde: -self.c_tilde }
    }

    /// `{C, C^perp}`.
    pub fn partition(&self) -> Partition {
        Partition { members: vec![self.projection(), self.complement().projection()] }
    }
}

/// `rho_k = 2 C_k rho C_k`.
pub fn rho_k(ck: &AlgebraElement, rho: &AlgebraElement) -> AlgebraElement {
    (&(ck * rho) * ck).scale_real(2.0)
}

/// Closed-form expansion of `2 C rho_lambda C` for `C = C(c, c~)` under the
/// dynamics `theta2 = 0, eta2 = 1`, term group by term group.
pub fn rho_c_groups(c: &UnitVector3, ct: &UnitVector3, lambda: f64) -> Vec<(&'static str, AlgebraElement)> {
    let m = |ds: &[i32]| AlgebraElement::product_of(ds).expect("fixed sites");
    let p = (1.0 + lambda) / 2.0;
    let q = (1.0 - lambda) / 2.0;
    let i = c64(0.0, 1.0);
    let [c1, c2, c3] = c.components();
    let [t1, t2, t3] = ct.components();
    vec![
        ("1", AlgebraElement::identity()),
        ("lambda", m(&[-1, 1]).scale_real(lambda)),
        ("c1", (&m(&[-1]) + &m(&[1])).scale_real(p * c1)),
        ("ct1", (&m(&[-1]) - &m(&[1])).scale_real(q * t1)),
        ("c2 (1+lambda)/2", (&m(&[0]) - &m(&[-1, 0, 1])).scale_real(p * c2)),
        ("c2 lambda", (&m(&[-2, 0, 2]) + &m(&[-2, -1, 0, 1, 2])).scale_real(-lambda * c2)),
        ("ct2", (&m(&[0]) + &m(&[-1, 0, 1])).scale_real(q * t2)),
        ("c3", (&m(&[-1, 0]) - &m(&[0, 1])).scale(i * p * c3)),
        ("ct3", (&m(&[-1, 0]) + &m(&[0, 1])).scale(i * q * t3)),
        ("c1 c2", (&m(&[-2, -1, 0, 2]) + &m(&[-2, 0, 1, 2])).scale_real(lambda * c1 * c2)),
        ("c2^2", (&m(&[-2, -1, 1, 2]) - &m(&[-2, 2])).scale_real(lambda * c2 * c2)),
        ("c2 c3", (&m(&[-2, -1, 2]) - &m(&[-2, 1, 2])).scale(i * lambda * c2 * c3)),
    ]
}

pub fn rho_c_expansion(c: &UnitVector3, ct: &UnitVector3, lambda: f64) -> AlgebraElement {
    let mut out = AlgebraElement::zero();
    for (_, g) in rho_c_groups(c, ct, lambda) {
        out += &g;
    }
    out
}

/// `lambda c1 c2 (-a1 b2 + a2 b1) - lambda c2^2 (a1 b1 + a2 b2)
///  - (lambda - (1+lambda)^2/4 c3^2 + (1-lambda)^2/4 c~3^2) a3 b3`,
/// equal to four times the trace-form residual for either member of `{C, C^perp}`.
pub fn residual_closed_form(a: &UnitVector3, b: &UnitVector3, c: &UnitVector3, ct: &UnitVector3, lambda: f64) -> f64 {
    let [a1, a2, a3] = a.components();
    let [b1, b2, b3] = b.components();
    let [c1, c2, c3] = c.components();
    let t3 = ct.z();
    lambda * c1 * c2 * (-a1 * b2 + a2 * b1)
        - lambda * c2 * c2 * (a1 * b1 + a2 * b2)
        - (lambda - (1.0 + lambda).powi(2) / 4.0 * c3 * c3 + (1.0 - lambda).powi(2) / 4.0 * t3 * t3) * a3 * b3
}

/// One screening-off equation: `lhs = X(AB) X(A'B')`, `rhs = X(AB') X(A'B)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResidualEntry {
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CandidateJson {
    pub c: [f64; 3],
    pub c_tilde: [f64; 3],
}

impl From<&CommonCauseCandidate> for CandidateJson {
    fn from(c: &CommonCauseCandidate) -> Self {
        CandidateJson { c: c.c.components(), c_tilde: c.c_tilde.components() }
    }
}

/// Screening-off equations per `(k, m, n)`.
///
/// `residuals` use `X = (phi o E)(. C_k)`. For members of trace 1/2 the
/// equivalent form with `X = Tr(rho_k .)` is reported in `trace_form`; its
/// residuals are four times larger. `max_residual` covers both forms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidate: Option<CandidateJson>,
    pub residuals: Vec<ResidualEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trace_form: Vec<ResidualEntry>,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
    pub commutator_norms: BTreeMap<String, f64>,
}

impl CriterionReport {
    fn finish(candidate: Option<CandidateJson>, residuals: Vec<ResidualEntry>, trace_form: Vec<ResidualEntry>, tol: f64) -> Self {
        let max_residual = residuals.iter().chain(&trace_form).map(|r| r.residual.abs()).fold(0.0, f64::max);
        CriterionReport { candidate, residuals, trace_form, max_residual, tol, pass: max_residual < tol, commutator_norms: BTreeMap::new() }
    }
}

fn ensure_commuting(a: &AlgebraElement, b: &AlgebraElement, tol: f64) -> Result<()> {
    let n = commutator(a, b).sup_norm();
    if n > tol {
        return Err(Error::NonCommutingEvents(n));
    }
    Ok(())
}

fn four_products(a: &AlgebraElement, b: &AlgebraElement) -> [AlgebraElement; 4] {
    let one = AlgebraElement::identity();
    let ap = &one - a;
    let bp = &one - b;
    [a * b, &ap * &bp, a * &bp, &ap * b]
}

fn entry(k: usize, m: usize, n: usize, vals: [f64; 4]) -> ResidualEntry {
    let lhs = vals[0] * vals[1];
    let rhs = vals[2] * vals[3];
    ResidualEntry { k, m, n, lhs, rhs, residual: lhs - rhs }
}

/// Entries for one pair `(A_m, B_n)`, labelled with 1-based indices.
fn criterion_entries(
    partition: &Partition,
    a: &AlgebraElement,
    b: &AlgebraElement,
    state: &State,
    (m, n): (usize, usize),
    tol: f64,
) -> (Vec<ResidualEntry>, Vec<ResidualEntry>) {
    let products = four_products(a, b);
    let mut general = Vec::new();
    let mut traced = Vec::new();
    for (idx, ck) in partition.members().iter().enumerate() {
        let k = idx + 1;
        if state.phi(ck).abs() <= tol {
            // both sides vanish for a member of zero probability
            general.push(ResidualEntry { k, m, n, lhs: 0.0, rhs: 0.0, residual: 0.0 });
            continue;
        }
        let vals = products.clone().map(|x| state.phi(&partition.expectation(&(&x * ck))));
        general.push(entry(k, m, n, vals));
        if (ck.trace().re - 0.5).abs() <= tol {
            let rk = rho_k(ck, state.density());
            let vals = products.clone().map(|x| rk.trace_product(&x).re);
            traced.push(entry(k, m, n, vals));
        }
    }
    (general, traced)
}

/// The screening-off criterion for a single correlating pair.
pub fn cc_criterion(partition: &Partition, a: &AlgebraElement, b: &AlgebraElement, state: &State, tol: f64) -> Result<CriterionReport> {
    ensure_commuting(a, b, tol)?;
    let (general, traced) = criterion_entries(partition, a, b, state, (1, 1), tol);
    Ok(CriterionReport::finish(None, general, traced, tol))
}

/// Noncommutativity witnesses: operator norms of `[C_1, X]` for the events.
pub fn commutator_norms(c: &AlgebraElement, scenario: &Scenario) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for (label, x) in [("A1", scenario.event_a(0)), ("A2", scenario.event_a(1)), ("B1", scenario.event_b(0)), ("B2", scenario.event_b(1))] {
        let comm = commutator(c, x);
        let norm = if comm.is_empty() { 0.0 } else { operator_norm(&comm, &QubitWindow::covering(&comm)?)? };
        out.insert(label.to_string(), norm);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JointReport {
    pub criterion: CriterionReport,
    /// Every member supported in `O_C = O_{-1/2} v O_{1/2}`.
    pub localized_in_oc: bool,
    pub oc_in_common_past: bool,
    pub noncommuting: bool,
    pub pass: bool,
}

/// The criterion for all four pairs `(A_m, B_n)` with one partition.
pub fn joint_cc_check(partition: &Partition, scenario: &Scenario, tol: f64) -> Result<JointReport> {
    let mut general = Vec::new();
    let mut traced = Vec::new();
    for m in 0..2 {
        for n in 0..2 {
            let (a, b) = (scenario.event_a(m), scenario.event_b(n));
            ensure_commuting(a, b, tol)?;
            let (g, t) = criterion_entries(partition, a, b, scenario.state(), (m + 1, n + 1), tol);
            general.extend(g);
            traced.extend(t);
        }
    }
    let mut criterion = CriterionReport::finish(None, general, traced, tol);
    criterion.commutator_norms = commutator_norms(&partition.members()[0], scenario)?;
    let oc = RegionGeom::Cone(region_c());
    let mut localized_in_oc = true;
    for c in partition.members() {
        localized_in_oc &= supported_in(c, 0, &oc)?;
    }
    let oc_in_common_past = past_region(PastKind::Common, &region_a(), &region_b()).contains_double_cone(&region_c());
    let noncommuting = criterion.commutator_norms.values().any(|&v| v > tol);
    let pass = criterion.pass;
    Ok(JointReport { criterion, localized_in_oc, oc_in_common_past, noncommuting, pass })
}

/// Joint check for the partition `{C(c, c~), C(-c, -c~)}`.
pub fn joint_candidate_check(candidate: &CommonCauseCandidate, scenario: &Scenario, tol: f64) -> Result<JointReport> {
    let mut report = joint_cc_check(&candidate.partition(), scenario, tol)?;
    report.criterion.candidate = Some(candidate.into());
    Ok(report)
}

/// Point `k` of the `n`-point Fibonacci sphere; point 0 lies in the `xz`-plane.
pub fn fibonacci_point(k: usize, n: usize) -> UnitVector3 {
    let golden_angle = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
    let r = (1.0 - z * z).sqrt();
    let phi = k as f64 * golden_angle;
    UnitVector3::new(r * phi.cos(), r * phi.sin(), z).expect("points on the sphere")
}

pub fn fibonacci_sphere(n: usize) -> Vec<UnitVector3> {
    (0..n).map(|k| fibonacci_point(k, n)).collect()
}

/// Typical distance between neighbouring points of an `n`-point grid.
pub fn grid_spacing(n: usize) -> f64 {
    (4.0 * std::f64::consts::PI / n as f64).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchHit {
    pub c_index: usize,
    pub c_tilde_index: usize,
    pub candidate: CommonCauseCandidate,
    pub max_residual: f64,
}

/// Maximum criterion residual (both forms) over all `(k, m, n)` for a candidate.
///
/// Uses `(phi o E)(X C_k) = Tr(C_k rho C_k X)` for the two-member partition.
pub fn candidate_max_residual(candidate: &CommonCauseCandidate, products: &[[AlgebraElement; 4]], rho: &AlgebraElement) -> f64 {
    let mut worst: f64 = 0.0;
    for ck in [candidate.projection(), candidate.complement().projection()] {
        let sandwiched = &(&ck * rho) * &ck;
        for p in products {
            let vals = p.clone().map(|x| sandwiched.trace_product(&x).re);
            // trace form doubles each factor
            worst = worst.max(4.0 * (vals[0] * vals[1] - vals[2] * vals[3]).abs());
        }
    }
    worst
}

/// Scans `grid_n^2` pairs `(c, c~)` from the Fibonacci sphere and returns
/// those passing the joint criterion, in grid order.
pub fn search_common_causes(scenario: &Scenario, grid_n: usize, tol: f64) -> Result<Vec<SearchHit>> {
    if grid_n < 2 {
        return Err(Error::GridTooSmall(grid_n));
    }
    let points = fibonacci_sphere(grid_n);
    let mut products = Vec::new();
    for m in 0..2 {
        for n in 0..2 {
            products.push(four_products(scenario.event_a(m), scenario.event_b(n)));
        }
    }
    let rho = scenario.state().density();
    let hits: Vec<Vec<SearchHit>> = (0..grid_n)
        .into_par_iter()
        .map(|i| {
            (0..grid_n)
                .filter_map(|j| {
                    let candidate = CommonCauseCandidate::new(points[i], points[j]);
                    let max_residual = candidate_max_residual(&candidate, &products, rho);
                    (max_residual < tol).then_some(SearchHit { c_index: i, c_tilde_index: j, candidate, max_residual })
                })
                .collect()
        })
        .collect();
    Ok(hits.into_iter().flatten().collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessCorrelation {
    pub m: usize,
    pub n: usize,
    pub original: f64,
    /// `phi(A B C_k) phi(C_k) - phi(A C_k) phi(B C_k)` for each member.
    pub with_c: Vec<f64>,
    /// `d_k^2` times the original correlation, `d_k = tr(C_k)`.
    pub expected: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CommutingWitness {
    pub name: String,
    pub members: usize,
    pub traces: Vec<f64>,
    pub commutes_with_events: bool,
    pub correlations: Vec<WitnessCorrelation>,
    pub max_deviation: f64,
    pub criterion_fails: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObstructionReport {
    /// Dimension of the commutant of `A(O_A) v A(O_B)` within its own span.
    pub commutant_dimension: usize,
    pub witnesses: Vec<CommutingWitness>,
    pub tol: f64,
    pub pass: bool,
}

fn witness(name: &str, partition: &Partition, scenario: &Scenario, tol: f64) -> Result<CommutingWitness> {
    let state = scenario.state();
    let events: Vec<&AlgebraElement> = (0..2).map(|m| scenario.event_a(m)).chain((0..2).map(|n| scenario.event_b(n))).collect();
    let commutes_with_events = partition.members().iter().all(|c| events.iter().all(|x| commutator(c, x).sup_norm() <= tol));
    let traces: Vec<f64> = partition.members().iter().map(|c| c.trace().re).collect();
    let mut correlations = Vec::new();
    let mut max_deviation: f64 = 0.0;
    let mut criterion_fails = false;
    for m in 0..2 {
        for n in 0..2 {
            let (a, b) = (scenario.event_a(m), scenario.event_b(n));
            let original = state.correlation(a, b);
            let mut with_c = Vec::new();
            let mut expected = Vec::new();
            for (ck, d) in partition.members().iter().zip(&traces) {
                let e = |x: &AlgebraElement| state.phi(&partition.expectation(&(x * ck)));
                let value = e(&(a * b)) * e(&AlgebraElement::identity()) - e(a) * e(b);
                max_deviation = max_deviation.max((value - d * d * original).abs());
                with_c.push(value);
                expected.push(d * d * original);
            }
            correlations.push(WitnessCorrelation { m: m + 1, n: n + 1, original, with_c, expected });
            criterion_fails |= !cc_criterion(partition, a, b, state, tol)?.pass;
        }
    }
    Ok(CommutingWitness {
        name: name.to_string(),
        members: partition.len(),
        traces,
        commutes_with_events,
        correlations,
        max_deviation,
        criterion_fails,
    })
}

/// No commuting partition screens off the correlations: the event algebra
/// has trivial relative commutant, and commuting projections only rescale
/// each correlation by `d_k^2`.
pub fn commuting_jcc_obstruction(scenario: &Scenario, tol: f64) -> Result<ObstructionReport> {
    let basis = joint_basis(scenario.dynamics())?;
    let commutant_dimension = commutant_within_span(&basis, &basis).len();
    let one = AlgebraElement::identity();
    let half = |x: AlgebraElement| (&one + &x).scale_real(0.5);
    let pair = |c: AlgebraElement| Partition::new(vec![c.clone(), &one - &c], tol);
    let witnesses = vec![
        witness("1", &Partition::new(vec![one.clone()], tol)?, scenario, tol)?,
        witness("(1 + U_3)/2", &pair(half(u(6)))?, scenario, tol)?,
        witness("(1 + U_{-1} U_0 U_1)/2", &pair(half(AlgebraElement::product_of(&[-2, 0, 2])?))?, scenario, tol)?,
    ];
    let correlated = scenario.spec().lambda() > tol && (0..2).any(|m| (0..2).any(|n| scenario.correlation(m, n).abs() > tol));
    let pass = commutant_dimension == 1
        && witnesses.iter().all(|w| w.commutes_with_events && w.max_deviation < tol && (!correlated || w.criterion_fails));
    Ok(ObstructionReport { commutant_dimension, witnesses, tol, pass })
}

/// Commutant of the event algebra over every monomial on `window`.
pub fn event_algebra_commutant(scenario: &Scenario, window: SiteRange) -> Result<Vec<AlgebraElement>> {
    let basis = joint_basis(scenario.dynamics())?;
    crate::element::relative_commutant_basis(&basis, window, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::DEFAULT_TOL;
    use crate::oracle::spectrum_bounds;
    use crate::scenario::ScenarioSpec;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn v(r1: f64, r2: f64, r3: f64) -> UnitVector3 {
        UnitVector3::new(r1, r2, r3).unwrap()
    }

    fn default_scenario() -> Scenario {
        Scenario::new(ScenarioSpec::default()).unwrap()
    }

    #[test]
    fn candidate_is_half_trace_projection() {
        let cand = CommonCauseCandidate::new(v(0.6, 0.0, 0.8), v(0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2));
        let c = cand.projection();
        assert!(c.is_projection(1e-12));
        assert!((c.trace().re - 0.5).abs() < 1e-12);
        assert!((&c + &cand.complement().projection()).approx_eq(&AlgebraElement::identity(), 1e-12));
        let (lo, hi) = spectrum_bounds(&c, &QubitWindow::covering(&c).unwrap()).unwrap();
        assert!(lo > -1e-9 && hi < 1.0 + 1e-9);
        assert!(Partition::new(cand.partition().members().to_vec(), 1e-9).is_ok());
    }

    #[test]
    fn partition_validation() {
        let one = AlgebraElement::identity();
        let p = (&one + &u(0)).scale_real(0.5);
        assert!(Partition::new(vec![p.clone()], 1e-9).is_err());
        assert!(Partition::new(vec![p.clone(), p.clone()], 1e-9).is_err());
        assert!(Partition::new(vec![u(0), &one - &u(0)], 1e-9).is_err());
        assert!(Partition::new(vec![p.clone(), &one - &p], 1e-9).is_ok());
    }

    #[test]
    fn expectation_properties() {
        let cand = CommonCauseCandidate::new(v(1.0, 0.0, 0.0), v(0.0, 0.0, 1.0));
        let part = cand.partition();
        let one = AlgebraElement::identity();
        assert!(part.expectation(&one).approx_eq(&one, 1e-12));
        let c = cand.projection();
        assert!(part.expectation(&c).approx_eq(&c, 1e-12));
        let x = AlgebraElement::product_of(&[-2, -1, 0, 2]).unwrap();
        let ex = part.expectation(&x);
        assert!(part.expectation(&ex).approx_eq(&ex, 1e-12));
        // bimodule property over the relative commutant of the partition
        let b1 = &c * &u(6);
        let lhs = part.expectation(&(&(&b1 * &x) * &b1));
        let rhs = &(&b1 * &ex) * &b1;
        assert!(lhs.approx_eq(&rhs, 1e-12));
        let pos = part.expectation(&(&x.adjoint() * &x));
        let (lo, _) = spectrum_bounds(&pos, &QubitWindow::covering(&pos).unwrap()).unwrap();
        assert!(lo > -1e-9);
    }

    #[test]
    fn rho_c_examples() {
        let lambda_zero = rho_c_expansion(&v(1.0, 0.0, 0.0), &v(1.0, 0.0, 0.0), 0.0);
        assert!(lambda_zero.approx_eq(&(&AlgebraElement::identity() + &u(-1)), 1e-15));
        let cand = CommonCauseCandidate::new(v(0.0, 0.0, 1.0), v(0.0, 0.0, 1.0));
        let s = default_scenario();
        let r1 = rho_k(&cand.projection(), s.state().density());
        assert!(r1.approx_eq(&rho_c_expansion(&cand.c, &cand.c_tilde, 1.0), 1e-12));
        assert!((r1.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn criterion_passes_for_prop1_candidate() {
        let s = default_scenario();
        let cand = CommonCauseCandidate::new(v(1.0, 0.0, 0.0), v(0.0, 0.0, 1.0));
        let report = joint_candidate_check(&cand, &s, DEFAULT_TOL).unwrap();
        assert!(report.pass, "{report:?}");
        assert_eq!(report.criterion.residuals.len(), 8);
        assert_eq!(report.criterion.trace_form.len(), 8);
        assert!(report.localized_in_oc && report.oc_in_common_past && report.noncommuting);
    }

    #[test]
    fn criterion_residual_example() {
        let x = v(1.0, 0.0, 0.0);
        let spec = ScenarioSpec::new([x, x], [x, x], 1.0, Default::default()).unwrap();
        let s = Scenario::new(spec).unwrap();
        let cand = CommonCauseCandidate::new(v(0.0, 1.0, 0.0), x);
        let r = cc_criterion(&cand.partition(), s.event_a(0), s.event_b(0), s.state(), DEFAULT_TOL).unwrap();
        assert!(!r.pass);
        for t in &r.trace_form {
            assert!((t.residual + 0.25).abs() < 1e-12, "{t:?}");
        }
        for g in &r.residuals {
            assert!((g.residual + 0.0625).abs() < 1e-12);
        }
    }

    #[test]
    fn tracial_state_always_passes() {
        let s = Scenario::new(ScenarioSpec::default().with_lambda(0.0).unwrap()).unwrap();
        let cand = CommonCauseCandidate::new(v(0.0, 1.0, 0.0), v(0.0, 0.0, 1.0));
        assert!(joint_candidate_check(&cand, &s, DEFAULT_TOL).unwrap().pass);
    }

    #[test]
    fn trivial_partition_fails() {
        let s = default_scenario();
        let p = Partition::new(vec![AlgebraElement::identity()], DEFAULT_TOL).unwrap();
        assert!(!joint_cc_check(&p, &s, DEFAULT_TOL).unwrap().pass);
    }

    #[test]
    fn noncommuting_events_rejected() {
        let s = default_scenario();
        let p = Partition::new(vec![AlgebraElement::identity()], DEFAULT_TOL).unwrap();
        let a = (&AlgebraElement::identity() + &u(0)).scale_real(0.5);
        let b = (&AlgebraElement::identity() + &u(1)).scale_real(0.5);
        assert!(matches!(cc_criterion(&p, &a, &b, s.state(), DEFAULT_TOL), Err(Error::NonCommutingEvents(_))));
    }

    #[test]
    fn refined_partition_and_null_members() {
        let s = default_scenario();
        let one = AlgebraElement::identity();
        let cand = CommonCauseCandidate::new(v(0.0, 0.0, 1.0), v(1.0, 0.0, 0.0));
        let c = cand.projection();
        let q = (&one + &u(8)).scale_real(0.5);
        let refined = Partition::new(vec![&c * &q, &c * &(&one - &q), &one - &c], DEFAULT_TOL).unwrap();
        let r = joint_cc_check(&refined, &s, DEFAULT_TOL).unwrap();
        assert!(r.pass);
        assert_eq!(r.criterion.residuals.len(), 12);
        // rho^s / 4 is a projection; its complement has probability zero
        let p = s.state().density().scale_real(0.25);
        let singlet = Partition::new(vec![p.clone(), &one - &p], DEFAULT_TOL).unwrap();
        let r = cc_criterion(&singlet, s.event_a(0), s.event_b(0), s.state(), DEFAULT_TOL).unwrap();
        assert_eq!(r.residuals[1].residual, 0.0);
        assert!(!r.pass);
    }

    #[test]
    fn closed_form_examples() {
        let z = v(0.0, 0.0, 1.0);
        let x = v(1.0, 0.0, 0.0);
        assert_eq!(residual_closed_form(&x, &v(0.0, 1.0, 0.0), &x, &z, 0.7), 0.0);
        assert!(residual_closed_form(&z, &z, &z, &z, 1.0).abs() < 1e-15);
        assert!((residual_closed_form(&x, &x, &v(0.0, 1.0, 0.0), &z, 0.5) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn search_finds_c2_zero_candidates() {
        let s = default_scenario();
        let hits = search_common_causes(&s, 12, DEFAULT_TOL).unwrap();
        assert!(!hits.is_empty());
        assert!(hits.iter().all(|h| h.candidate.c.y().abs() <= grid_spacing(12)));
        assert!(search_common_causes(&s, 1, DEFAULT_TOL).is_err());
        let tracial = Scenario::new(ScenarioSpec::default().with_lambda(0.0).unwrap()).unwrap();
        assert_eq!(search_common_causes(&tracial, 6, DEFAULT_TOL).unwrap().len(), 36);
    }

    #[test]
    fn obstruction_holds() {
        let r = commuting_jcc_obstruction(&default_scenario(), DEFAULT_TOL).unwrap();
        assert!(r.pass, "{r:#?}");
        assert_eq!(r.commutant_dimension, 1);
        let distant = &r.witnesses[1];
        assert!((distant.correlations[0].with_c[0] + 0.25 * FRAC_1_SQRT_2 / 4.0).abs() < 1e-12);
    }

    fn arb_unit() -> impl Strategy<Value = UnitVector3> {
        (-1.0f64..1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(z, phi)| {
            let r = (1.0 - z * z).sqrt();
            UnitVector3::new(r * phi.cos(), r * phi.sin(), z).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn closed_form_matches_traces(a in arb_unit(), b in arb_unit(), c in arb_unit(), ct in arb_unit(), lambda in 0.0f64..=1.0) {
            let spec = ScenarioSpec::new([a, a], [b, b], lambda, Default::default()).unwrap();
            let s = Scenario::new(spec).unwrap();
            let cand = CommonCauseCandidate::new(c, ct);
            let r = cc_criterion(&cand.partition(), s.event_a(0), s.event_b(0), s.state(), DEFAULT_TOL).unwrap();
            let expected = residual_closed_form(&a, &b, &c, &ct, lambda);
            for (g, t) in r.residuals.iter().zip(&r.trace_form) {
                prop_assert!((4.0 * t.residual - expected).abs() < 1e-9);
                prop_assert!((4.0 * g.residual - t.residual).abs() < 1e-9);
            }
            let rho1 = rho_k(&cand.projection(), s.state().density());
            prop_assert!(rho1.approx_eq(&rho_c_expansion(&c, &ct, lambda), 1e-9));
            let rho2 = rho_k(&cand.complement().projection(), s.state().density());
            prop_assert!(rho2.approx_eq(&rho_c_expansion(&-c, &-ct, lambda), 1e-9));
        }
    }
}
