//! EPR-Bohm events in `A(O_A)` and `A(O_B)`, the singlet-type states
//! `rho_lambda`, correlations and the CH / CHSH functionals.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::dynamics::{Dynamics, DynamicsParams};
use crate::element::{c64, AlgebraElement, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::monomial::SiteIndex;
use crate::oracle::{spectrum_bounds, QubitWindow};

/// Tolerance on `|r|^2 - 1` for direction inputs.
pub const UNIT_TOL: f64 = 1e-9;

/// A unit vector in `R^3`. Inputs are validated, never renormalized.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct UnitVector3([f64; 3]);

impl TryFrom<[f64; 3]> for UnitVector3 {
    type Error = Error;
    fn try_from(r: [f64; 3]) -> Result<Self> {
        UnitVector3::new(r[0], r[1], r[2])
    }
}

impl From<UnitVector3> for [f64; 3] {
    fn from(v: UnitVector3) -> Self {
        v.0
    }
}

impl UnitVector3 {
    pub fn new(r1: f64, r2: f64, r3: f64) -> Result<Self> {
        let n2 = r1 * r1 + r2 * r2 + r3 * r3;
        if (n2 - 1.0).abs() > UNIT_TOL || n2.is_nan() {
            return Err(Error::NonUnitVector(r1, r2, r3));
        }
        Ok(UnitVector3([r1, r2, r3]))
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }

    pub fn y(&self) -> f64 {
        self.0[1]
    }

    pub fn z(&self) -> f64 {
        self.0[2]
    }

    pub fn dot(&self, other: &UnitVector3) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }
}

impl std::ops::Neg for UnitVector3 {
    type Output = UnitVector3;
    fn neg(self) -> UnitVector3 {
        UnitVector3([-self.0[0], -self.0[1], -self.0[2]])
    }
}

/// Measurement directions, mixing parameter and dynamics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct ScenarioSpec {
    pub a: [UnitVector3; 2],
    pub b: [UnitVector3; 2],
    lambda: f64,
    pub dynamics: DynamicsParams,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    a: [UnitVector3; 2],
    b: [UnitVector3; 2],
    lambda: f64,
    dynamics: DynamicsParams,
}

impl TryFrom<RawSpec> for ScenarioSpec {
    type Error = Error;
    fn try_from(r: RawSpec) -> Result<Self> {
        ScenarioSpec::new(r.a, r.b, r.lambda, r.dynamics)
    }
}

impl From<ScenarioSpec> for RawSpec {
    fn from(s: ScenarioSpec) -> Self {
        RawSpec { a: s.a, b: s.b, lambda: s.lambda, dynamics: s.dynamics }
    }
}

impl Default for ScenarioSpec {
    /// The maximally violating directions with `lambda = 1` and the default dynamics.
    fn default() -> Self {
        let (a, b) = default_directions();
        ScenarioSpec { a, b, lambda: 1.0, dynamics: DynamicsParams::default() }
    }
}

impl ScenarioSpec {
    pub fn new(a: [UnitVector3; 2], b: [UnitVector3; 2], lambda: f64, dynamics: DynamicsParams) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::LambdaOutOfRange(lambda));
        }
        Ok(ScenarioSpec { a, b, lambda, dynamics })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.a, self.b, lambda, self.dynamics)
    }

    pub fn with_dynamics(&self, dynamics: DynamicsParams) -> Self {
        ScenarioSpec { dynamics, ..*self }
    }
}

/// `a^1 = (0,1,0)`, `a^2 = (1,0,0)`, `b^1 = (1,1,0)/sqrt2`, `b^2 = (-1,1,0)/sqrt2`.
pub fn default_directions() -> ([UnitVector3; 2], [UnitVector3; 2]) {
    let h = 1.0 / SQRT_2;
    ([UnitVector3([0.0, 1.0, 0.0]), UnitVector3([1.0, 0.0, 0.0])], [UnitVector3([h, h, 0.0]), UnitVector3([-h, h, 0.0])])
}

fn u(d: i32) -> AlgebraElement {
    AlgebraElement::generator(SiteIndex::from_doubled(d).expect("fixed site"))
}

fn one() -> AlgebraElement {
    AlgebraElement::identity()
}

fn i_times(x: &AlgebraElement) -> AlgebraElement {
    x.scale(c64(0.0, 1.0))
}

/// `A(a) = 1/2 (1 + a1 U_{-1} + a2 beta(U_{-1/2}) + a3 i U_{-1} beta(U_{-1/2}))`.
pub fn event_a(a: &UnitVector3, dynamics: &Dynamics) -> Result<AlgebraElement> {
    let ul = u(-2);
    let x = dynamics.beta_generator(SiteIndex::half(-1))?;
    let sum = &(&(&one() + &ul.scale_real(a.x())) + &x.scale_real(a.y())) + &i_times(&(&ul * &x)).scale_real(a.z());
    Ok(sum.scale_real(0.5))
}

/// `B(b) = 1/2 (1 + b1 U_1 - b2 beta(U_{1/2}) + b3 i beta(U_{1/2}) U_1)`.
pub fn event_b(b: &UnitVector3, dynamics: &Dynamics) -> Result<AlgebraElement> {
    let ur = u(2);
    let y = dynamics.beta_generator(SiteIndex::half(0))?;
    let sum = &(&(&one() + &ur.scale_real(b.x())) - &y.scale_real(b.y())) + &i_times(&(&y * &ur)).scale_real(b.z());
    Ok(sum.scale_real(0.5))
}

/// Matrix units `e_{ij}` of the two `M_2` factors `A(O_A)` (left) and `A(O_B)` (right).
#[derive(Clone, Debug)]
pub struct MatrixUnits {
    pub left: [[AlgebraElement; 2]; 2],
    pub right: [[AlgebraElement; 2]; 2],
}

/// `e_11 = (1 + X)/2`, `e_22 = (1 - X)/2`, `e_12 = (1 + X) U / 2`, `e_21 = (1 - X) U / 2`
/// with `X = beta(U_{-1/2})`, `U = U_{-1}` on the left and `X = beta(U_{1/2})`,
/// `U = U_1` on the right.
pub fn matrix_units(dynamics: &Dynamics) -> Result<MatrixUnits> {
    let build = |x: AlgebraElement, ul: AlgebraElement| -> [[AlgebraElement; 2]; 2] {
        let plus = (&one() + &x).scale_real(0.5);
        let minus = (&one() - &x).scale_real(0.5);
        let e12 = &plus * &ul;
        let e21 = &minus * &ul;
        [[plus, e12], [e21, minus]]
    };
    Ok(MatrixUnits {
        left: build(dynamics.beta_generator(SiteIndex::half(-1))?, u(-2)),
        right: build(dynamics.beta_generator(SiteIndex::half(0))?, u(2)),
    })
}

/// `2 (e11 e11 + e22 e22 - e12 e12 - e21 e21)`, left factor first.
pub fn rho_singlet(dynamics: &Dynamics) -> Result<AlgebraElement> {
    let e = matrix_units(dynamics)?;
    let mut rho = AlgebraElement::zero();
    for (i, j, s) in [(0, 0, 1.0), (1, 1, 1.0), (0, 1, -1.0), (1, 0, -1.0)] {
        rho += &(&e.left[i][j] * &e.right[i][j]).scale_real(2.0 * s);
    }
    Ok(rho)
}

/// `1 + X Y - U_{-1} U_1 + U_{-1} X Y U_1` with `X = beta(U_{-1/2})`, `Y = beta(U_{1/2})`.
pub fn rho_singlet_expanded(dynamics: &Dynamics) -> Result<AlgebraElement> {
    let x = dynamics.beta_generator(SiteIndex::half(-1))?;
    let y = dynamics.beta_generator(SiteIndex::half(0))?;
    let xy = &x * &y;
    let (ul, ur) = (u(-2), u(2));
    Ok(&(&(&one() + &xy) - &(&ul * &ur)) + &(&(&ul * &xy) * &ur))
}

/// `lambda rho^s + (1 - lambda) 1`.
pub fn rho_lambda(dynamics: &Dynamics, lambda: f64) -> Result<AlgebraElement> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::LambdaOutOfRange(lambda));
    }
    Ok(&rho_singlet(dynamics)?.scale_real(lambda) + &one().scale_real(1.0 - lambda))
}

/// A density element: self-adjoint, unit trace, positive.
#[derive(Clone, Debug)]
pub struct State {
    rho: AlgebraElement,
}

impl State {
    pub fn new(rho: AlgebraElement, tol: f64) -> Result<Self> {
        let tr = rho.trace();
        if (tr - c64(1.0, 0.0)).norm() > tol {
            return Err(Error::NotAState(format!("trace {tr}")));
        }
        let w = QubitWindow::covering(&rho)?;
        let (lo, _) = spectrum_bounds(&rho, &w)?;
        if lo < -tol {
            return Err(Error::NotAState(format!("minimum eigenvalue {lo}")));
        }
        Ok(State { rho })
    }

    pub fn density(&self) -> &AlgebraElement {
        &self.rho
    }

    /// `phi(x) = Re Tr(rho x)`.
    pub fn phi(&self, x: &AlgebraElement) -> f64 {
        self.rho.trace_product(x).re
    }

    /// `phi(AB) - phi(A) phi(B)`.
    pub fn correlation(&self, a: &AlgebraElement, b: &AlgebraElement) -> f64 {
        self.phi(&(a * b)) - self.phi(a) * self.phi(b)
    }

    /// `phi(AB) phi(A'B') - phi(AB') phi(A'B)` with `X' = 1 - X`.
    pub fn correlation_product_form(&self, a: &AlgebraElement, b: &AlgebraElement) -> f64 {
        let ap = &one() - a;
        let bp = &one() - b;
        self.phi(&(a * b)) * self.phi(&(&ap * &bp)) - self.phi(&(a * &bp)) * self.phi(&(&ap * b))
    }
}

pub fn phi(x: &AlgebraElement, state: &State) -> f64 {
    state.phi(x)
}

pub fn correlation(a: &AlgebraElement, b: &AlgebraElement, state: &State) -> f64 {
    state.correlation(a, b)
}

/// `-lambda/4 <a, b>`.
pub fn correlation_closed_form(a: &UnitVector3, b: &UnitVector3, lambda: f64) -> f64 {
    -lambda / 4.0 * a.dot(b)
}

/// `-1/2 - lambda/4 (<a1,b1> + <a1,b2> + <a2,b1> - <a2,b2>)`; `-(1 + lambda sqrt2)/2`
/// for the default directions.
pub fn ch_closed_form(spec: &ScenarioSpec) -> f64 {
    let [a1, a2] = &spec.a;
    let [b1, b2] = &spec.b;
    -0.5 - spec.lambda / 4.0 * (a1.dot(b1) + a1.dot(b2) + a2.dot(b1) - a2.dot(b2))
}

/// `-lambda (<a1, b1 + b2> + <a2, b1 - b2>)`; `-2 sqrt2 lambda` for the default directions.
pub fn chsh_closed_form(spec: &ScenarioSpec) -> f64 {
    let [a1, a2] = &spec.a;
    let [b1, b2] = &spec.b;
    -spec.lambda * (a1.dot(b1) + a1.dot(b2) + a2.dot(b1) - a2.dot(b2))
}

/// Events and state built from a [`ScenarioSpec`].
#[derive(Clone, Debug)]
pub struct Scenario {
    spec: ScenarioSpec,
    dynamics: Dynamics,
    a: [AlgebraElement; 2],
    b: [AlgebraElement; 2],
    state: State,
}

impl Scenario {
    pub fn new(spec: ScenarioSpec) -> Result<Self> {
        let dynamics = Dynamics::new(spec.dynamics);
        let a = [event_a(&spec.a[0], &dynamics)?, event_a(&spec.a[1], &dynamics)?];
        let b = [event_b(&spec.b[0], &dynamics)?, event_b(&spec.b[1], &dynamics)?];
        let state = State::new(rho_lambda(&dynamics, spec.lambda)?, DEFAULT_TOL)?;
        Ok(Scenario { spec, dynamics, a, b, state })
    }

    pub fn spec(&self) -> &ScenarioSpec {
        &self.spec
    }

    pub fn dynamics(&self) -> &Dynamics {
        &self.dynamics
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    /// `A_m` for `m` in `{0, 1}`.
    pub fn event_a(&self, m: usize) -> &AlgebraElement {
        &self.a[m]
    }

    /// `B_n` for `n` in `{0, 1}`.
    pub fn event_b(&self, n: usize) -> &AlgebraElement {
        &self.b[n]
    }

    pub fn correlation(&self, m: usize, n: usize) -> f64 {
        self.state.correlation(&self.a[m], &self.b[n])
    }

    pub fn correlation_closed_form(&self, m: usize, n: usize) -> f64 {
        correlation_closed_form(&self.spec.a[m], &self.spec.b[n], self.spec.lambda)
    }

    /// `phi(A1B1 + A1B2 + A2B1 - A2B2 - A1 - B1)`.
    pub fn ch_value(&self) -> f64 {
        let [a1, a2] = &self.a;
        let [b1, b2] = &self.b;
        let x = &(&(&(a1 * b1) + &(a1 * b2)) + &(a2 * b1)) - &(&(&(a2 * b2) + a1) + b1);
        self.state.phi(&x)
    }

    /// `phi(U_A1 (U_B1 + U_B2) + U_A2 (U_B1 - U_B2))` with `U_X = 2X - 1`.
    pub fn chsh_value(&self) -> f64 {
        let contraction = |x: &AlgebraElement| &x.scale_real(2.0) - &one();
        let (ua1, ua2) = (contraction(&self.a[0]), contraction(&self.a[1]));
        let (ub1, ub2) = (contraction(&self.b[0]), contraction(&self.b[1]));
        let x = &(&ua1 * &(&ub1 + &ub2)) + &(&ua2 * &(&ub1 - &ub2));
        self.state.phi(&x)
    }
}

pub fn ch_value(spec: &ScenarioSpec) -> Result<f64> {
    Ok(Scenario::new(*spec)?.ch_value())
}

pub fn chsh_value(spec: &ScenarioSpec) -> Result<f64> {
    Ok(Scenario::new(*spec)?.chsh_value())
}
