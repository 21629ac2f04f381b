//! Initial data for the growth models: particle configurations, down-right
//! curve profiles with their concave corners, and boundary-weight profiles
//! (stationary, tilted pairs, derived from a curve, custom).

use crate::environment::{Environment, STREAM_BOUNDARY, STREAM_PARTICLES};
use crate::error::{Error, Result};
use crate::lattice::LatticePoint;
use crate::numeric::consts;
use serde::{Deserialize, Serialize};

/// A particle configuration on a finite window `[-window, window]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParticleConfig {
    window: i64,
    /// eta_0(k) for k = -window..=window, indexed by k + window.
    occ: Vec<bool>,
    pub density_left: f64,
    pub density_right: f64,
}

impl ParticleConfig {
    /// Step initial data: particles on every site <= 0 (narrow wedge).
    pub fn step(window: i64) -> Self {
        Self::from_fn(window, |k| k <= 0, 1.0, 1.0)
    }

    /// Alternating occupation, eta_0(k) = 1 iff k is even (flat profile).
    pub fn alternating(window: i64) -> Self {
        Self::from_fn(window, |k| k % 2 == 0, 0.5, 0.5)
    }

    /// i.i.d. Bernoulli(rho) occupation, drawn from the environment's
    /// particle stream so the configuration is pure in (seed, site).
    pub fn bernoulli(env: &Environment, rho: f64, window: i64) -> Result<Self> {
        if !(0.0 < rho && rho < 1.0) {
            return Err(Error::InvalidRho(rho));
        }
        let s = env.stream(STREAM_PARTICLES);
        Ok(Self::from_fn(window, |k| s.uniform(k, 0) < rho, rho, 1.0 - rho))
    }

    /// Explicit occupancies for `k = -window..=window`.
    pub fn from_occupancies(occ: Vec<bool>, window: i64) -> Result<Self> {
        if occ.len() != (2 * window + 1) as usize {
            return Err(Error::InvalidConfig(format!(
                "need {} occupancies for window {window}",
                2 * window + 1
            )));
        }
        let left =
            occ[..window as usize].iter().filter(|&&b| b).count() as f64 / window.max(1) as f64;
        let right = occ[window as usize + 1..].iter().filter(|&&b| !b).count() as f64
            / window.max(1) as f64;
        Ok(Self {
            window,
            occ,
            density_left: left,
            density_right: right,
        })
    }

    fn from_fn(window: i64, f: impl Fn(i64) -> bool, dl: f64, dr: f64) -> Self {
        assert!(window >= 1);
        let occ = (-window..=window).map(f).collect();
        Self {
            window,
            occ,
            density_left: dl,
            density_right: dr,
        }
    }

    #[inline]
    pub fn eta(&self, k: i64) -> bool {
        debug_assert!(k.abs() <= self.window);
        self.occ[(k + self.window) as usize]
    }

    pub fn window(&self) -> i64 {
        self.window
    }

    /// The standing assumption for stationary machinery: particles to the
    /// left of the origin and holes to the right.
    pub fn has_positive_densities(&self) -> bool {
        let left = self.occ[..self.window as usize].iter().any(|&b| b);
        let right = self.occ[self.window as usize + 1..].iter().any(|&b| !b);
        left && right
    }
}

/// Serializable specification of a curve profile arm (used for mixed data).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ArmKind {
    /// All particles (the wedge arm).
    Wedge,
    /// Alternating particles/holes (the flat arm).
    Flat,
    /// i.i.d. Bernoulli occupation.
    Bernoulli { rho: f64 },
}

/// A down-right lattice path anchored at the origin, built from a particle
/// configuration: step k+1 is vertical iff eta_0(k+1) = 1.
#[derive(Debug, Clone)]
pub struct CurveProfile {
    window: i64,
    /// h(k) for k = -window..=window, indexed by k + window.
    pts: Vec<LatticePoint>,
}

impl CurveProfile {
    pub fn from_particles(cfg: &ParticleConfig) -> Self {
        let window = cfg.window();
        let mut pts = vec![LatticePoint::new(0, 0); (2 * window + 1) as usize];
        // Forward: h(k+1) = h(k) + eta(k+1)(0,-1) + (1-eta(k+1))(1,0).
        for k in 0..window {
            let p = pts[(k + window) as usize];
            pts[(k + 1 + window) as usize] = if cfg.eta(k + 1) {
                LatticePoint::new(p.k, p.l - 1)
            } else {
                LatticePoint::new(p.k + 1, p.l)
            };
        }
        // Backward: invert the same recursion.
        for k in (-window..0).rev() {
            let p = pts[(k + 1 + window) as usize];
            pts[(k + window) as usize] = if cfg.eta(k + 1) {
                LatticePoint::new(p.k, p.l + 1)
            } else {
                LatticePoint::new(p.k - 1, p.l)
            };
        }
        let prof = Self { window, pts };
        prof.assert_down_right();
        prof
    }

    /// Point-to-point initial data: the path runs along both axes.
    pub fn narrow_wedge(window: i64) -> Self {
        Self::from_particles(&ParticleConfig::step(window))
    }

    /// Point-to-line initial data: the staircase along the anti-diagonal.
    pub fn flat(window: i64) -> Self {
        Self::from_particles(&ParticleConfig::alternating(window))
    }

    /// Symmetric random-walk staircase (Bernoulli(1/2) particles).
    pub fn stationary_curve(env: &Environment, window: i64) -> Result<Self> {
        Ok(Self::from_particles(&ParticleConfig::bernoulli(
            env, 0.5, window,
        )?))
    }

    /// Mixed initial data: independent arm constructions for k <= 0 and
    /// k > 0.
    pub fn mixed(env: &Environment, left: ArmKind, right: ArmKind, window: i64) -> Result<Self> {
        let s = env.stream(STREAM_PARTICLES);
        let draw = |arm: ArmKind, k: i64| -> Result<bool> {
            Ok(match arm {
                ArmKind::Wedge => k <= 0,
                ArmKind::Flat => k % 2 == 0,
                ArmKind::Bernoulli { rho } => {
                    if !(0.0 < rho && rho < 1.0) {
                        return Err(Error::InvalidRho(rho));
                    }
                    s.uniform(k, 0) < rho
                }
            })
        };
        let mut occ = Vec::with_capacity((2 * window + 1) as usize);
        for k in -window..=window {
            occ.push(draw(if k <= 0 { left } else { right }, k)?);
        }
        Ok(Self::from_particles(&ParticleConfig::from_occupancies(
            occ, window,
        )?))
    }

    fn assert_down_right(&self) {
        for k in -self.window..self.window {
            let a = self.h(k);
            let b = self.h(k + 1);
            let step = (b.k - a.k, b.l - a.l);
            assert!(
                step == (1, 0) || step == (0, -1),
                "profile step at k={k} is {step:?}; not a down-right path"
            );
        }
        assert_eq!(self.h(0), LatticePoint::new(0, 0));
    }

    #[inline]
    pub fn h(&self, k: i64) -> LatticePoint {
        self.pts[(k + self.window) as usize]
    }

    pub fn window(&self) -> i64 {
        self.window
    }

    /// The concave corners: indices k with a vertical step into h(k) and a
    /// horizontal step out, each carrying the site h(k) + (1,1).
    pub fn corners(&self) -> CornerSet {
        let mut corners = Vec::new();
        for k in (-self.window + 1)..self.window {
            let prev = self.h(k - 1);
            let here = self.h(k);
            let next = self.h(k + 1);
            if here.l == prev.l - 1 && next.k == here.k + 1 {
                corners.push(Corner {
                    k,
                    site: LatticePoint::new(here.k + 1, here.l + 1),
                });
            }
        }
        CornerSet { corners }
    }
}

/// One concave corner: the profile index and the bulk site it seeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corner {
    pub k: i64,
    pub site: LatticePoint,
}

/// The ordered set of concave corners of a curve profile.
#[derive(Debug, Clone, Default)]
pub struct CornerSet {
    corners: Vec<Corner>,
}

impl CornerSet {
    pub fn from_corners(corners: Vec<Corner>) -> Self {
        Self { corners }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Corner> {
        self.corners.iter()
    }

    pub fn len(&self) -> usize {
        self.corners.len()
    }

    pub fn is_empty(&self) -> bool {
        self.corners.is_empty()
    }

    pub fn as_slice(&self) -> &[Corner] {
        &self.corners
    }

    /// True iff some corner is dominated by `p` (i.e. `p` lies in the
    /// growing region of the windowed profile).
    pub fn dominated_by(&self, p: LatticePoint) -> bool {
        // Corners are ordered by k with sites ascending in x, descending
        // in y: the lowest candidate is the last corner with site.k <= p.k.
        let idx = self.corners.partition_point(|c| c.site.k <= p.k);
        if idx == 0 {
            return false;
        }
        self.corners[idx - 1].site.l <= p.l
    }

    /// Split at `|k| <= r * n^{2/3}`: the near-origin corners and the rest.
    pub fn cutoff(&self, r: f64, n: u64) -> (CornerSet, CornerSet) {
        let thr = r * consts::n_2_3(n);
        let (near, far): (Vec<_>, Vec<_>) =
            self.corners.iter().partition(|c| (c.k as f64).abs() <= thr);
        (CornerSet { corners: near }, CornerSet { corners: far })
    }
}

/// Validated tilt parameters for the stationary pair around density 1/2.
///
/// `delta_t = a t^{-2/3}` and `rho_pm = 1/2 +- delta_t^{-alpha}/(t n)^{1/3}`,
/// defined for `t >= a^{3/2}` (so `delta_t <= 1`) and `alpha` in (0, 1/2).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TiltParameters {
    pub n: u64,
    pub t: f64,
    pub a: f64,
    pub alpha: f64,
    pub delta_t: f64,
    pub rho_plus: f64,
    pub rho_minus: f64,
}

impl TiltParameters {
    pub fn new(n: u64, t: f64, a: f64, alpha: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidTilt("n must be >= 1".into()));
        }
        if !(a > 0.0) {
            return Err(Error::InvalidTilt(format!("a = {a} must be positive")));
        }
        if !(0.0 < alpha && alpha < 0.5) {
            return Err(Error::InvalidTilt(format!(
                "alpha = {alpha} not in (0, 1/2)"
            )));
        }
        let t_23 = {
            let c = t.cbrt();
            c * c
        };
        let delta_t = a / t_23;
        if !(delta_t <= 1.0) {
            return Err(Error::InvalidTilt(format!(
                "t = {t} below a^(3/2) = {}; delta_t = {delta_t} exceeds 1",
                a.powf(1.5)
            )));
        }
        let eps = delta_t.powf(-alpha) / (t * n as f64).cbrt();
        let rho_plus = 0.5 + eps;
        let rho_minus = 0.5 - eps;
        if !(rho_minus > 0.0 && rho_plus < 1.0 && rho_minus < 0.5 && 0.5 < rho_plus) {
            return Err(Error::InvalidTilt(format!(
                "tilted densities ({rho_minus}, {rho_plus}) leave (0, 1); n or t too small"
            )));
        }
        Ok(Self {
            n,
            t,
            a,
            alpha,
            delta_t,
            rho_plus,
            rho_minus,
        })
    }
}

/// A boundary-weight profile on the coordinate axes. The origin always
/// carries weight zero.
#[derive(Debug, Clone)]
pub enum BoundaryProfile {
    /// Exponential axis weights read through the shared boundary uniforms:
    /// `-ln U / x_rate` at `(z, 0)` and `-ln U / y_rate` at `(0, z)`.
    /// Stationary density rho has `x_rate = 1 - rho`, `y_rate = rho`; the
    /// tilted pair rescales the same uniforms, so increments are ordered
    /// pathwise.
    Scaled {
        label: String,
        x_rate: f64,
        y_rate: f64,
    },
    /// Explicit per-site weights (derived-from-curve or custom data).
    Explicit {
        label: String,
        /// weight at (z, 0), z >= 1; index z - 1
        wx: Vec<f64>,
        /// weight at (0, z), z >= 1; index z - 1
        wy: Vec<f64>,
    },
}

impl BoundaryProfile {
    /// Stationary boundary of density `rho`: Exp(1 - rho) on the x-axis,
    /// Exp(rho) on the y-axis.
    pub fn stationary(rho: f64) -> Result<Self> {
        if !(0.0 < rho && rho < 1.0) {
            return Err(Error::InvalidRho(rho));
        }
        Ok(Self::Scaled {
            label: format!("stationary(rho={rho})"),
            x_rate: 1.0 - rho,
            y_rate: rho,
        })
    }

    /// The tilted pair (minus, plus) obtained by rescaling the density-1/2
    /// weights site by site: marginally each is the stationary boundary at
    /// its own density, and cumulative increments are ordered
    /// b^- <= b^(1/2) <= b^+ pathwise.
    pub fn tilted_pair(tp: &TiltParameters) -> (Self, Self) {
        let minus = Self::Scaled {
            label: format!("tilted-(rho={})", tp.rho_minus),
            x_rate: 1.0 - tp.rho_minus,
            y_rate: tp.rho_minus,
        };
        let plus = Self::Scaled {
            label: format!("tilted+(rho={})", tp.rho_plus),
            x_rate: 1.0 - tp.rho_plus,
            y_rate: tp.rho_plus,
        };
        (minus, plus)
    }

    /// All-zero boundary weights on `len` axis sites.
    pub fn zero(len: usize) -> Self {
        Self::Explicit {
            label: "zero".into(),
            wx: vec![0.0; len],
            wy: vec![0.0; len],
        }
    }

    /// Custom explicit weights (nonnegative).
    pub fn custom(wx: Vec<f64>, wy: Vec<f64>) -> Result<Self> {
        if wx.iter().chain(wy.iter()).any(|&w| !(w >= 0.0)) {
            return Err(Error::InvalidConfig(
                "boundary weights must be nonnegative".into(),
            ));
        }
        Ok(Self::Explicit {
            label: "custom".into(),
            wx,
            wy,
        })
    }

    pub fn label(&self) -> &str {
        match self {
            Self::Scaled { label, .. } => label,
            Self::Explicit { label, .. } => label,
        }
    }

    /// Single axis weight: z > 0 is the site (z, 0), z < 0 the site
    /// (0, |z|), z = 0 the origin (always 0).
    pub fn weight(&self, env: &Environment, z: i64) -> Result<f64> {
        if z == 0 {
            return Ok(0.0);
        }
        match self {
            Self::Scaled { x_rate, y_rate, .. } => {
                let s = env.stream(STREAM_BOUNDARY);
                Ok(if z > 0 {
                    s.exp1(z, 0) / x_rate
                } else {
                    s.exp1(0, -z) / y_rate
                })
            }
            Self::Explicit { wx, wy, .. } => {
                let (arr, idx) = if z > 0 {
                    (wx, (z - 1) as usize)
                } else {
                    (wy, (-z - 1) as usize)
                };
                arr.get(idx).copied().ok_or_else(|| {
                    Error::CoverageShortfall(format!("boundary weight at z = {z} not stored"))
                })
            }
        }
    }

    /// Materialize weights and cumulative sums along both axes up to
    /// `z_max` inclusive: `bx[z]` is b(z) and `by[z]` is b(-z).
    pub fn materialize(&self, env: &Environment, z_max: i64) -> Result<BoundaryArrays> {
        let len = (z_max + 1) as usize;
        let mut wx = vec![0.0; len];
        let mut wy = vec![0.0; len];
        match self {
            Self::Scaled { x_rate, y_rate, .. } => {
                let s = env.stream(STREAM_BOUNDARY);
                for z in 1..=z_max {
                    wx[z as usize] = s.exp1(z, 0) / x_rate;
                    wy[z as usize] = s.exp1(0, z) / y_rate;
                }
            }
            Self::Explicit { wx: ex, wy: ey, .. } => {
                if ex.len() < z_max as usize || ey.len() < z_max as usize {
                    return Err(Error::CoverageShortfall(format!(
                        "explicit boundary covers {} sites, need {z_max}",
                        ex.len().min(ey.len())
                    )));
                }
                wx[1..].copy_from_slice(&ex[..z_max as usize]);
                wy[1..].copy_from_slice(&ey[..z_max as usize]);
            }
        }
        let mut bx = vec![0.0; len];
        let mut by = vec![0.0; len];
        for z in 1..len {
            bx[z] = bx[z - 1] + wx[z];
            by[z] = by[z - 1] + wy[z];
        }
        Ok(BoundaryArrays { wx, wy, bx, by })
    }

    /// Cumulative profile b(z) per the sign convention: z > 0 sums x-axis
    /// weights, z < 0 sums y-axis weights, b(0) = 0.
    pub fn cumulative(&self, env: &Environment, z: i64) -> Result<f64> {
        let arrays = self.materialize(env, z.abs())?;
        Ok(arrays.b(z))
    }
}

/// Materialized boundary data: per-site weights and cumulative sums.
#[derive(Debug, Clone)]
pub struct BoundaryArrays {
    pub wx: Vec<f64>,
    pub wy: Vec<f64>,
    pub bx: Vec<f64>,
    pub by: Vec<f64>,
}

impl BoundaryArrays {
    /// Cumulative b(z) for signed z.
    pub fn b(&self, z: i64) -> f64 {
        if z >= 0 {
            self.bx[z as usize]
        } else {
            self.by[(-z) as usize]
        }
    }

    /// Build from cumulative axis passage times (the derived boundary of a
    /// curve model): weights are successive differences, cumulative values
    /// are kept bit-exact.
    pub fn from_cumulative(bx: Vec<f64>, by: Vec<f64>) -> Self {
        let wx = std::iter::once(0.0)
            .chain(bx.windows(2).map(|p| p[1] - p[0]))
            .collect();
        let wy = std::iter::once(0.0)
            .chain(by.windows(2).map(|p| p[1] - p[0]))
            .collect();
        Self { wx, wy, bx, by }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_config_gives_narrow_wedge_arms() {
        let prof = CurveProfile::narrow_wedge(16);
        for k in 0..=16 {
            assert_eq!(prof.h(k), LatticePoint::new(k, 0));
        }
        for k in -16..0 {
            assert_eq!(prof.h(k), LatticePoint::new(0, -k));
        }
        let c = prof.corners();
        assert_eq!(c.len(), 1);
        assert_eq!(c.as_slice()[0].site, LatticePoint::new(1, 1));
        assert_eq!(c.as_slice()[0].k, 0);
    }

    #[test]
    fn wedge_arm_without_transition_has_no_corner() {
        // All sites occupied: the path descends forever, no corner.
        let cfg = ParticleConfig::from_occupancies(vec![true; 33], 16).unwrap();
        let prof = CurveProfile::from_particles(&cfg);
        assert!(prof.corners().is_empty());
        assert!(!cfg.has_positive_densities());
    }

    #[test]
    fn flat_profile_corners_every_even_index() {
        let prof = CurveProfile::flat(20);
        let corners = prof.corners();
        let ks: Vec<i64> = corners.iter().map(|c| c.k).collect();
        let expect: Vec<i64> = (-18..=18).filter(|k| k % 2 == 0).collect();
        assert_eq!(ks, expect);
        // All corner sites lie on the anti-diagonal k + l = 2.
        for c in corners.iter() {
            assert_eq!(c.site.k + c.site.l, 2);
        }
    }

    #[test]
    fn bernoulli_half_drift_is_centred() {
        // Anti-diagonal displacement of h(k) is a +-1 random walk.
        let env = Environment::new(31);
        let prof = CurveProfile::stationary_curve(&env, 40000).unwrap();
        let p = prof.h(40000);
        let disp = (p.k + p.l) as f64;
        let sigma = (40000f64).sqrt();
        assert!(
            disp.abs() < 3.5 * sigma,
            "drift {disp} outside 3.5 sigma = {}",
            3.5 * sigma
        );
    }

    #[test]
    fn cutoff_partitions_corners() {
        let prof = CurveProfile::flat(300);
        let all = prof.corners();
        let (near, far) = all.cutoff(1.0, 1000);
        assert_eq!(near.len() + far.len(), all.len());
        let thr = consts::n_2_3(1000);
        for c in near.iter() {
            assert!((c.k as f64).abs() <= thr);
        }
        for c in far.iter() {
            assert!((c.k as f64).abs() > thr);
        }
        // Exhaustive cutoff leaves the complement empty.
        let (near_all, far_none) = all.cutoff(10.0, 1000);
        assert_eq!(near_all.len(), all.len());
        assert!(far_none.is_empty());

        // Tiny r on the narrow wedge keeps the single corner at k = 0.
        let wedge = CurveProfile::narrow_wedge(10);
        let (near_w, far_w) = wedge.corners().cutoff(1e-9, 1000);
        assert_eq!(near_w.len(), 1);
        assert!(far_w.is_empty());
    }

    #[test]
    fn stationary_boundary_weight_means() {
        let env = Environment::new(77);
        for (rho, want_x, want_y) in [(0.5, 2.0, 2.0), (0.7, 1.0 / 0.3, 1.0 / 0.7)] {
            let b = BoundaryProfile::stationary(rho).unwrap();
            let arrays = b.materialize(&env, 100_000).unwrap();
            let mean_x: f64 = arrays.wx[1..].iter().sum::<f64>() / 100_000.0;
            let mean_y: f64 = arrays.wy[1..].iter().sum::<f64>() / 100_000.0;
            assert!(
                (mean_x - want_x).abs() < 0.02 * want_x.max(1.0),
                "rho={rho} mean_x={mean_x}"
            );
            assert!(
                (mean_y - want_y).abs() < 0.02 * want_y.max(1.0),
                "rho={rho} mean_y={mean_y}"
            );
        }
        assert!(BoundaryProfile::stationary(0.0).is_err());
        assert!(BoundaryProfile::stationary(1.0).is_err());
    }

    #[test]
    fn cumulative_starts_at_zero() {
        let env = Environment::new(3);
        let b = BoundaryProfile::stationary(0.4).unwrap();
        assert_eq!(b.cumulative(&env, 0).unwrap(), 0.0);
        assert_eq!(b.weight(&env, 0).unwrap(), 0.0);
    }

    #[test]
    fn tilted_pair_increment_ordering_pathwise() {
        let env = Environment::new(5150);
        let tp = TiltParameters::new(200, 1.0, 1.0, 0.25).unwrap();
        let (minus, plus) = BoundaryProfile::tilted_pair(&tp);
        let half = BoundaryProfile::stationary(0.5).unwrap();
        let z_max = 400;
        let am = minus.materialize(&env, z_max).unwrap();
        let ah = half.materialize(&env, z_max).unwrap();
        let ap = plus.materialize(&env, z_max).unwrap();
        // Increment ordering of the cumulative profiles for all i < j
        // reduces to ordering of every single-site weight.
        for z in 1..=z_max as usize {
            assert!(am.wx[z] <= ah.wx[z] && ah.wx[z] <= ap.wx[z]);
            assert!(am.wy[z] >= ah.wy[z] && ah.wy[z] >= ap.wy[z]);
        }
        // Signed-z cumulative ordering, spot pairs i < j across the origin.
        for (i, j) in [(-7i64, 3i64), (-350, -2), (5, 380), (-1, 1)] {
            let dm = am.b(j) - am.b(i);
            let dh = ah.b(j) - ah.b(i);
            let dp = ap.b(j) - ap.b(i);
            assert!(dm <= dh + 1e-9 && dh <= dp + 1e-9, "i={i} j={j}");
        }
    }

    #[test]
    fn degenerate_tilt_reproduces_half() {
        // Equal rates must reproduce the density-1/2 boundary exactly.
        let env = Environment::new(8);
        let half = BoundaryProfile::stationary(0.5).unwrap();
        let same = BoundaryProfile::Scaled {
            label: "degenerate".into(),
            x_rate: 0.5,
            y_rate: 0.5,
        };
        let a = half.materialize(&env, 64).unwrap();
        let b = same.materialize(&env, 64).unwrap();
        assert_eq!(a.bx, b.bx);
        assert_eq!(a.by, b.by);
    }

    #[test]
    fn tilted_mean_scaling() {
        // Mean of the x-axis tilted-plus weight is 1/(1 - rho+).
        let env = Environment::new(99);
        let tp = TiltParameters::new(500, 4.0, 1.0, 0.25).unwrap();
        let (_, plus) = BoundaryProfile::tilted_pair(&tp);
        let arrays = plus.materialize(&env, 100_000).unwrap();
        let mean: f64 = arrays.wx[1..].iter().sum::<f64>() / 100_000.0;
        let want = 1.0 / (1.0 - tp.rho_plus);
        assert!((mean - want).abs() < 0.01 * want, "mean {mean} want {want}");
    }

    #[test]
    fn tilt_parameter_validation() {
        assert!(TiltParameters::new(500, 1.0, 1.0, 0.25).is_ok());
        // t below a^{3/2} makes delta_t > 1.
        assert!(TiltParameters::new(500, 0.5, 1.0, 0.25).is_err());
        // alpha outside (0, 1/2).
        assert!(TiltParameters::new(500, 1.0, 1.0, 0.5).is_err());
        // n so small the tilt leaves (0, 1).
        assert!(TiltParameters::new(1, 1.0, 1.0, 0.49).is_err());
    }

    #[test]
    fn mixed_profile_combines_arms() {
        let env = Environment::new(40);
        let prof = CurveProfile::mixed(&env, ArmKind::Wedge, ArmKind::Flat, 12).unwrap();
        // Left arm (k <= 0): wedge, so h(k) climbs the y-axis.
        for k in -12..0 {
            assert_eq!(prof.h(k), LatticePoint::new(0, -k));
        }
        // Right arm: flat staircase stays on or below the x-axis.
        for k in 1..=12 {
            assert!(prof.h(k).l <= 0);
            assert!(prof.h(k).k >= 1);
        }
    }
}
