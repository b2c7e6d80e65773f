//! Causal unit-time-translation automorphisms `beta(theta1, theta2, eta1, eta2)`.
//!
//! On generators:
//!
//! ```text
//! beta(U_{x+1/2}) = eta2 s2^2 U_{x+1/2} + eta2 c2^2 U_x U_{x+1/2} U_{x+1}
//!                   + i s2 c2 (U_x U_{x+1/2} - U_{x+1/2} U_{x+1})
//! beta(U_x)       = eta1 s1^2 U_x + eta1 c1^2 beta(U_{x-1/2}) U_x beta(U_{x+1/2})
//!                   + i s1 c1 (beta(U_{x-1/2}) U_x - U_x beta(U_{x+1/2}))
//! ```
//!
//! with `s_k = sin theta_k`, `c_k = cos theta_k`. Both families commute with
//! the unit space translation, so the images of `U_0` and `U_{1/2}` are built
//! once and translated.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::element::{c64, AlgebraElement, SiteRange};
use crate::error::{Error, Result};
use crate::geometry::DoubleCone;
use crate::linalg::SpanBasis;
use crate::monomial::SiteIndex;

/// Parameters of the causal dynamics: `theta_k` in `(-pi/2, pi/2]`, `eta_k = +-1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct DynamicsParams {
    theta1: f64,
    theta2: f64,
    eta1: i8,
    eta2: i8,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    theta1: f64,
    theta2: f64,
    eta1: i32,
    eta2: i32,
}

impl TryFrom<RawParams> for DynamicsParams {
    type Error = Error;
    fn try_from(r: RawParams) -> Result<Self> {
        DynamicsParams::new(r.theta1, r.theta2, r.eta1, r.eta2)
    }
}

impl From<DynamicsParams> for RawParams {
    fn from(p: DynamicsParams) -> Self {
        RawParams { theta1: p.theta1, theta2: p.theta2, eta1: p.eta1 as i32, eta2: p.eta2 as i32 }
    }
}

impl Default for DynamicsParams {
    /// `theta1 = theta2 = 0`, `eta1 = eta2 = 1`.
    fn default() -> Self {
        DynamicsParams { theta1: 0.0, theta2: 0.0, eta1: 1, eta2: 1 }
    }
}

impl DynamicsParams {
    pub fn new(theta1: f64, theta2: f64, eta1: i32, eta2: i32) -> Result<Self> {
        for (name, th) in [("theta1", theta1), ("theta2", theta2)] {
            if !(th > -FRAC_PI_2 && th <= FRAC_PI_2) {
                return Err(Error::InvalidDynamics(format!("{name} = {th} outside (-pi/2, pi/2]")));
            }
        }
        for (name, eta) in [("eta1", eta1), ("eta2", eta2)] {
            if eta != 1 && eta != -1 {
                return Err(Error::InvalidDynamics(format!("{name} = {eta} is not +-1")));
            }
        }
        Ok(DynamicsParams { theta1, theta2, eta1: eta1 as i8, eta2: eta2 as i8 })
    }

    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    pub fn theta2(&self) -> f64 {
        self.theta2
    }

    pub fn eta1(&self) -> i32 {
        self.eta1 as i32
    }

    pub fn eta2(&self) -> i32 {
        self.eta2 as i32
    }
}

/// A causal dynamics with precomputed images of `U_0` and `U_{1/2}`.
///
/// Immutable after construction, so it can be shared freely across threads.
#[derive(Clone, Debug)]
pub struct Dynamics {
    params: DynamicsParams,
    image_half: AlgebraElement,
    image_int: AlgebraElement,
}

fn gen(d: i32) -> AlgebraElement {
    AlgebraElement::generator(SiteIndex::from_doubled(d).expect("template site"))
}

/// `beta(U_{x+1/2})` for `x = doubled_x / 2`.
fn half_image(doubled_x: i32, p: &DynamicsParams) -> AlgebraElement {
    let (s, c) = p.theta2.sin_cos();
    let eta = p.eta2 as f64;
    let (ux, uh, ux1) = (gen(doubled_x), gen(doubled_x + 1), gen(doubled_x + 2));
    let flip = &(&ux * &uh) * &ux1;
    let cross = &(&ux * &uh) - &(&uh * &ux1);
    &(&uh.scale_real(eta * s * s) + &flip.scale_real(eta * c * c)) + &cross.scale(c64(0.0, s * c))
}

fn int_image(p: &DynamicsParams) -> AlgebraElement {
    let (s, c) = p.theta1.sin_cos();
    let eta = p.eta1 as f64;
    let left = half_image(-2, p);
    let right = half_image(0, p);
    let u0 = gen(0);
    let sandwich = &(&left * &u0) * &right;
    let cross = &(&left * &u0) - &(&u0 * &right);
    &(&u0.scale_real(eta * s * s) + &sandwich.scale_real(eta * c * c)) + &cross.scale(c64(0.0, s * c))
}

impl Dynamics {
    pub fn new(params: DynamicsParams) -> Self {
        Dynamics { params, image_half: half_image(0, &params), image_int: int_image(&params) }
    }

    pub fn params(&self) -> DynamicsParams {
        self.params
    }

    /// `beta(U_i)`, supported in `[i - 1, i + 1]` for integer `i` and in
    /// `[i - 1/2, i + 1/2]` for half-integer `i`.
    pub fn beta_generator(&self, site: SiteIndex) -> Result<AlgebraElement> {
        let d = site.doubled();
        if d.rem_euclid(2) == 0 {
            self.image_int.shifted(d)
        } else {
            self.image_half.shifted(d - 1)
        }
    }

    /// The *-homomorphic extension: each monomial maps to the ordered product
    /// of generator images.
    pub fn beta(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        let mut images: HashMap<SiteIndex, AlgebraElement> = HashMap::new();
        let mut out = AlgebraElement::zero();
        for (m, c) in x.terms() {
            let mut term = AlgebraElement::scalar(*c);
            for site in m.sites() {
                let image = match images.entry(site) {
                    Entry::Occupied(e) => e.into_mut(),
                    Entry::Vacant(e) => e.insert(self.beta_generator(site)?),
                };
                term = &term * image;
            }
            out += &term;
        }
        Ok(out)
    }

    /// `beta^t(x)`.
    pub fn beta_power(&self, x: &AlgebraElement, t: u32) -> Result<AlgebraElement> {
        let mut out = x.clone();
        for _ in 0..t {
            out = self.beta(&out)?;
        }
        Ok(out)
    }
}

impl Default for Dynamics {
    fn default() -> Self {
        Dynamics::new(DynamicsParams::default())
    }
}

pub fn beta_generator(site: SiteIndex, p: DynamicsParams) -> Result<AlgebraElement> {
    Dynamics::new(p).beta_generator(site)
}

pub fn beta(x: &AlgebraElement, p: DynamicsParams) -> Result<AlgebraElement> {
    Dynamics::new(p).beta(x)
}

pub fn beta_power(x: &AlgebraElement, p: DynamicsParams, t: u32) -> Result<AlgebraElement> {
    Dynamics::new(p).beta_power(x, t)
}

/// Space translation `alpha^sites`.
pub fn translate(x: &AlgebraElement, sites: i32) -> Result<AlgebraElement> {
    x.shifted(2 * sites)
}

/// Basis `{1, U_{-1}, beta(U_{-1/2}), U_{-1} beta(U_{-1/2})}` of `A(O_A)`.
pub fn region_a_basis(dynamics: &Dynamics) -> Result<Vec<AlgebraElement>> {
    let u = AlgebraElement::generator(SiteIndex::integer(-1));
    let b = dynamics.beta_generator(SiteIndex::half(-1))?;
    Ok(vec![AlgebraElement::identity(), u.clone(), b.clone(), &u * &b])
}

/// Basis `{1, U_1, beta(U_{1/2}), beta(U_{1/2}) U_1}` of `A(O_B)`.
pub fn region_b_basis(dynamics: &Dynamics) -> Result<Vec<AlgebraElement>> {
    let u = AlgebraElement::generator(SiteIndex::integer(1));
    let b = dynamics.beta_generator(SiteIndex::half(0))?;
    Ok(vec![AlgebraElement::identity(), u.clone(), b.clone(), &b * &u])
}

/// The 16 products spanning `A(O_A) v A(O_B)`.
pub fn joint_basis(dynamics: &Dynamics) -> Result<Vec<AlgebraElement>> {
    let a = region_a_basis(dynamics)?;
    let b = region_b_basis(dynamics)?;
    Ok(a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrimitiveCausalityReport {
    /// Doubled bounds of the Cauchy-surface piece `V_c`.
    pub base_lo: i32,
    pub base_hi: i32,
    pub span_dimension: usize,
    /// Least-squares residual of each basis element of `A(O_A) v A(O_B)`.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Checks `A(O_A) v A(O_B) in beta(A(O_c))` with `O_c = V_c'' - (1, 0)`.
///
/// `O_c` lies one step before the Cauchy surface, so `beta(A(O_c))` is the
/// algebra of `V_c''` itself: the span of the monomials over `base`.
pub fn primitive_causality_check_with(dynamics: &Dynamics, base: SiteRange, tol: f64) -> Result<PrimitiveCausalityReport> {
    let mut span = SpanBasis::new();
    for m in base.monomials() {
        span.insert(&AlgebraElement::monomial(m));
    }
    let residuals: Vec<f64> = joint_basis(dynamics)?.iter().map(|x| span.distance(x)).collect();
    let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
    Ok(PrimitiveCausalityReport {
        base_lo: base.lo.doubled(),
        base_hi: base.hi.doubled(),
        span_dimension: span.dim(),
        residuals,
        max_residual,
        tol,
        pass: max_residual < tol,
    })
}

/// [`primitive_causality_check_with`] for `V_c` = sites `-1..1`.
pub fn primitive_causality_check(p: DynamicsParams, tol: f64) -> Result<PrimitiveCausalityReport> {
    let base = SiteRange::from_doubled(-2, 2)?;
    primitive_causality_check_with(&Dynamics::new(p), base, tol)
}

/// Generators `beta^t(U_i)` of `A(O)`, one per minimal cone, time-shifted so
/// the earliest cone sits at step 0.
pub fn local_generators(o: &DoubleCone, dynamics: &Dynamics) -> Result<Vec<AlgebraElement>> {
    let cones = o.minimal_cones();
    let t0 = cones.iter().map(|c| c.t).min().expect("double cones are nonempty");
    cones.iter().map(|c| dynamics.beta_power(&AlgebraElement::generator(c.site), (c.t - t0) as u32)).collect()
}

/// Linear dimension of the algebra generated by [`local_generators`].
///
/// The span of words is closed under left multiplication by generators.
pub fn local_algebra_dimension(o: &DoubleCone, dynamics: &Dynamics) -> Result<usize> {
    let generators = local_generators(o, dynamics)?;
    // n(O) minimal cones give at most 2^n independent words
    let cap = 1usize << (o.n_plus() + o.n_minus()).min(24);
    let mut span = SpanBasis::new();
    let mut words = vec![AlgebraElement::identity()];
    span.insert(&words[0]);
    let mut next = 0;
    while next < words.len() {
        let w = words[next].clone();
        next += 1;
        for g in &generators {
            let x = g * &w;
            if span.insert(&x) {
                words.push(x);
                if words.len() > cap {
                    return Err(Error::WindowTooLarge { qubits: words.len() as u32, cap: cap as u32 });
                }
            }
        }
    }
    Ok(span.dim())
}

/// `2^{n(O)}`: `M_{2^{n/2}}` for even `n`, `M_{2^{(n-1)/2}} + M_{2^{(n-1)/2}}` for odd `n`.
pub fn expected_local_dimension(o: &DoubleCone) -> usize {
    1usize << o.n()
}

/// Monomials over a site range, as elements.
pub fn monomial_elements(range: SiteRange) -> Vec<AlgebraElement> {
    range.monomials().into_iter().map(AlgebraElement::monomial).collect()
}
