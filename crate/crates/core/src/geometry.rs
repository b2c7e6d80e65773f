//! Causal geometry of the lattice of minimal double cones in two-dimensional
//! Minkowski space.
//!
//! Minimal cones have unit diameter and tile spacetime; in light-cone
//! coordinates `u = t + x`, `v = t - x` their centers form the integer lattice.
//! Cone `(u, v)` is the square `(u - 1/2, u + 1/2) x (v - 1/2, v + 1/2)`.
//! A double cone spanned by minimal cones is a lattice rectangle.
//!
//! The thickened Cauchy surface consists of the cones centered at `(0, x)`,
//! `x` integer, and `(-1/2, x)`, `x` half-integer; the cone of `U_i` at time
//! step `t` is the time-translate by `t` of the surface cone of site `i`.

use serde::{Deserialize, Serialize};

use crate::element::{AlgebraElement, SiteRange};
use crate::error::{Error, Result};
use crate::monomial::SiteIndex;

/// Minimal double cone carrying `beta^t(U_site)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MinimalCone {
    pub t: i32,
    pub site: SiteIndex,
}

impl MinimalCone {
    pub fn new(t: i32, site: SiteIndex) -> Self {
        MinimalCone { t, site }
    }

    /// Light-cone lattice coordinates `(u, v)` of the center.
    pub fn lightcone(&self) -> (i32, i32) {
        let d = self.site.doubled();
        if d.rem_euclid(2) == 0 {
            (self.t + d / 2, self.t - d / 2)
        } else {
            (self.t + (d - 1) / 2, self.t - (d + 1) / 2)
        }
    }

    pub fn from_lightcone(u: i32, v: i32) -> Result<Self> {
        let d = u - v;
        let t = (u + v + d.rem_euclid(2)) / 2;
        Ok(MinimalCone { t, site: SiteIndex::from_doubled(d)? })
    }

    /// Center in `(time, space)`.
    pub fn center(&self) -> (f64, f64) {
        let (u, v) = self.lightcone();
        ((u + v) as f64 / 2.0, (u - v) as f64 / 2.0)
    }
}

/// Double cone spanned by a lattice rectangle of minimal cones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DoubleCone {
    pub u_lo: i32,
    pub u_hi: i32,
    pub v_lo: i32,
    pub v_hi: i32,
}

impl DoubleCone {
    pub fn new(u_lo: i32, u_hi: i32, v_lo: i32, v_hi: i32) -> Result<Self> {
        if u_lo > u_hi || v_lo > v_hi {
            return Err(Error::MalformedRegion(format!("u [{u_lo}, {u_hi}], v [{v_lo}, {v_hi}]")));
        }
        Ok(DoubleCone { u_lo, u_hi, v_lo, v_hi })
    }

    pub fn minimal(cone: MinimalCone) -> Self {
        let (u, v) = cone.lightcone();
        DoubleCone { u_lo: u, u_hi: u, v_lo: v, v_hi: v }
    }

    /// Smallest double cone containing all the given minimal cones.
    pub fn spanned_by(cones: &[MinimalCone]) -> Result<Self> {
        let mut it = cones.iter().map(MinimalCone::lightcone);
        let (u0, v0) = it.next().ok_or_else(|| Error::MalformedRegion("no minimal cones".into()))?;
        let (mut u_lo, mut u_hi, mut v_lo, mut v_hi) = (u0, u0, v0, v0);
        for (u, v) in it {
            u_lo = u_lo.min(u);
            u_hi = u_hi.max(u);
            v_lo = v_lo.min(v);
            v_hi = v_hi.max(v);
        }
        Self::new(u_lo, u_hi, v_lo, v_hi)
    }

    /// Double cone `O_{i,j}` over a Cauchy-surface interval at time step 0.
    pub fn cauchy_interval(range: SiteRange) -> Result<Self> {
        Self::cauchy_interval_at(range, 0)
    }

    pub fn cauchy_interval_at(range: SiteRange, t: i32) -> Result<Self> {
        let cones: Vec<_> = (range.lo.doubled()..=range.hi.doubled())
            .map(|d| SiteIndex::from_doubled(d).map(|s| MinimalCone::new(t, s)))
            .collect::<Result<_>>()?;
        Self::spanned_by(&cones)
    }

    /// Double cone spanned by cones at time step 0 over `layer0` and at time
    /// step 1 over `layer1`.
    pub fn from_layers(layer0: Option<SiteRange>, layer1: Option<SiteRange>) -> Result<Self> {
        let mut cones = Vec::new();
        for (t, layer) in [(0, layer0), (1, layer1)] {
            if let Some(r) = layer {
                for d in r.lo.doubled()..=r.hi.doubled() {
                    cones.push(MinimalCone::new(t, SiteIndex::from_doubled(d)?));
                }
            }
        }
        Self::spanned_by(&cones)
    }

    /// Minimal cones along the right-moving lightlike direction.
    pub fn n_plus(&self) -> u32 {
        (self.u_hi - self.u_lo + 1) as u32
    }

    /// Minimal cones along the left-moving lightlike direction.
    pub fn n_minus(&self) -> u32 {
        (self.v_hi - self.v_lo + 1) as u32
    }

    /// `n(O) = n_+ + n_- - 1`.
    pub fn n(&self) -> u32 {
        self.n_plus() + self.n_minus() - 1
    }

    pub fn minimal_cones(&self) -> Vec<MinimalCone> {
        let mut out = Vec::new();
        for u in self.u_lo..=self.u_hi {
            for v in self.v_lo..=self.v_hi {
                out.push(MinimalCone::from_lightcone(u, v).expect("cone inside representable range"));
            }
        }
        out
    }

    pub fn contains_cone(&self, cone: MinimalCone) -> bool {
        let (u, v) = cone.lightcone();
        (self.u_lo..=self.u_hi).contains(&u) && (self.v_lo..=self.v_hi).contains(&v)
    }

    pub fn contains(&self, other: &DoubleCone) -> bool {
        self.u_lo <= other.u_lo && other.u_hi <= self.u_hi && self.v_lo <= other.v_lo && other.v_hi <= self.v_hi
    }

    /// Time translation by `dt` steps and space translation by `dx` sites.
    pub fn translated(&self, dt: i32, dx: i32) -> DoubleCone {
        DoubleCone { u_lo: self.u_lo + dt + dx, u_hi: self.u_hi + dt + dx, v_lo: self.v_lo + dt - dx, v_hi: self.v_hi + dt - dx }
    }

    /// Smallest double cone containing both.
    pub fn join(&self, other: &DoubleCone) -> DoubleCone {
        DoubleCone {
            u_lo: self.u_lo.min(other.u_lo),
            u_hi: self.u_hi.max(other.u_hi),
            v_lo: self.v_lo.min(other.v_lo),
            v_hi: self.v_hi.max(other.v_hi),
        }
    }

    /// Center in `(time, space)`.
    pub fn center(&self) -> (f64, f64) {
        let u = (self.u_lo + self.u_hi) as f64 / 2.0;
        let v = (self.v_lo + self.v_hi) as f64 / 2.0;
        ((u + v) / 2.0, (u - v) / 2.0)
    }
}

/// Open cones that share a light-cone coordinate range are causally
/// connected; this includes neighbouring cones of the Cauchy surface.
pub fn spacelike_separated(a: &DoubleCone, b: &DoubleCone) -> bool {
    (a.u_hi < b.u_lo && a.v_lo > b.v_hi) || (b.u_hi < a.u_lo && b.v_lo > a.v_hi)
}

/// Down-closed set of minimal cones `{(u, v) : u <= u_max, v <= v_max}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PastQuadrant {
    pub u_max: i32,
    pub v_max: i32,
}

impl PastQuadrant {
    fn contains_point(&self, u: i32, v: i32) -> bool {
        u <= self.u_max && v <= self.v_max
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PastKind {
    Weak,
    Common,
    Strong,
}

/// A region of the cone lattice: a double cone, or a union of past quadrants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionGeom {
    Cone(DoubleCone),
    Past(Vec<PastQuadrant>),
}

impl RegionGeom {
    pub fn contains_cone(&self, cone: MinimalCone) -> bool {
        match self {
            RegionGeom::Cone(o) => o.contains_cone(cone),
            RegionGeom::Past(qs) => {
                let (u, v) = cone.lightcone();
                qs.iter().any(|q| q.contains_point(u, v))
            }
        }
    }

    pub fn contains_double_cone(&self, o: &DoubleCone) -> bool {
        match self {
            RegionGeom::Cone(outer) => outer.contains(o),
            // down-closed: enough to test the top corner
            RegionGeom::Past(qs) => qs.iter().any(|q| q.contains_point(o.u_hi, o.v_hi)),
        }
    }

    pub fn contains_region(&self, other: &RegionGeom) -> bool {
        match other {
            RegionGeom::Cone(o) => self.contains_double_cone(o),
            RegionGeom::Past(qs) => match self {
                RegionGeom::Cone(_) => qs.is_empty(),
                RegionGeom::Past(mine) => qs.iter().all(|q| mine.iter().any(|m| m.contains_point(q.u_max, q.v_max))),
            },
        }
    }
}

/// Causal past `I_-(O)`.
pub fn causal_past(o: &DoubleCone) -> PastQuadrant {
    PastQuadrant { u_max: o.u_hi, v_max: o.v_hi }
}

/// Weak (union), common (intersection) or strong (pointwise) past of two regions.
pub fn past_region(kind: PastKind, a: &DoubleCone, b: &DoubleCone) -> RegionGeom {
    match kind {
        PastKind::Weak => RegionGeom::Past(vec![causal_past(a), causal_past(b)]),
        PastKind::Common => {
            let (pa, pb) = (causal_past(a), causal_past(b));
            RegionGeom::Past(vec![PastQuadrant { u_max: pa.u_max.min(pb.u_max), v_max: pa.v_max.min(pb.v_max) }])
        }
        // every point of the cone must precede every point of a and b
        PastKind::Strong => RegionGeom::Past(vec![PastQuadrant { u_max: a.u_lo.min(b.u_lo) - 1, v_max: a.v_lo.min(b.v_lo) - 1 }]),
    }
}

/// Whether `x`, read as an observable on the Cauchy surface at time step `t`,
/// is localized in `region`. Scalars are localized everywhere.
pub fn supported_in(x: &AlgebraElement, t: i32, region: &RegionGeom) -> Result<bool> {
    match x.support() {
        None => Ok(true),
        Some((lo, hi)) => {
            let o = DoubleCone::cauchy_interval_at(SiteRange::new(lo, hi)?, t)?;
            Ok(region.contains_double_cone(&o))
        }
    }
}

/// `O_A`: spanned by the cones of `U_{-1}` (step 0) and `beta(U_{-1/2})` (step 1).
pub fn region_a() -> DoubleCone {
    DoubleCone::spanned_by(&[MinimalCone::new(0, SiteIndex::integer(-1)), MinimalCone::new(1, SiteIndex::half(-1))]).expect("nonempty")
}

/// `O_B`: spanned by the cones of `beta(U_{1/2})` (step 1) and `U_1` (step 0).
pub fn region_b() -> DoubleCone {
    DoubleCone::spanned_by(&[MinimalCone::new(1, SiteIndex::half(0)), MinimalCone::new(0, SiteIndex::integer(1))]).expect("nonempty")
}

/// `O_C = O_{-1/2} v O_{1/2}`, the localization of the constructed common cause.
pub fn region_c() -> DoubleCone {
    DoubleCone::cauchy_interval(SiteRange::new(SiteIndex::half(-1), SiteIndex::half(0)).expect("ordered")).expect("nonempty")
}
