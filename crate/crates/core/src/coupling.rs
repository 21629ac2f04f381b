//! Basic coupling across growth models on one shared environment, and the
//! comparison/attraction/sandwich machinery built on it: pathwise lemma
//! checks, the exit-ordering event, the increment sandwich with its
//! integrated bound, and the convergence-rate experiment.

use crate::environment::{Environment, STREAM_BULK};
use crate::error::{Error, Result};
use crate::lpp::{CurveAsBoundary, FieldMode, PassageField};
use crate::numeric::{consts, dp_roundoff, wilson_interval};
use crate::profiles::{
    ArmKind, BoundaryArrays, BoundaryProfile, CurveProfile, ParticleConfig, TiltParameters,
};
use crate::stats::{convergence_envelope, mean_and_se};
use crate::sweep::{boundary_frontiers, BoundaryData, FrontierOut};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Serializable curve-profile specification; binds to an environment and a
/// window at build time so coupled runs rebuild it per seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileSpec {
    NarrowWedge,
    Flat,
    StationaryCurve,
    Bernoulli { rho: f64 },
    Mixed { left: ArmKind, right: ArmKind },
    Particles { occupancies: String },
}

impl ProfileSpec {
    pub fn build(&self, env: &Environment, window: i64) -> Result<CurveProfile> {
        match self {
            Self::NarrowWedge => Ok(CurveProfile::narrow_wedge(window)),
            Self::Flat => Ok(CurveProfile::flat(window)),
            Self::StationaryCurve => CurveProfile::stationary_curve(env, window),
            Self::Bernoulli { rho } => Ok(CurveProfile::from_particles(
                &ParticleConfig::bernoulli(env, *rho, window)?,
            )),
            Self::Mixed { left, right } => CurveProfile::mixed(env, *left, *right, window),
            Self::Particles { occupancies } => {
                let occ: Vec<bool> = occupancies
                    .chars()
                    .map(|c| match c {
                        '1' => Ok(true),
                        '0' => Ok(false),
                        other => Err(Error::InvalidConfig(format!(
                            "occupancy strings are over {{0,1}}, got '{other}'"
                        ))),
                    })
                    .collect::<Result<_>>()?;
                if occ.len() % 2 == 0 {
                    return Err(Error::InvalidConfig(
                        "occupancy string must have odd length (window -W..=W)".into(),
                    ));
                }
                let w = (occ.len() as i64 - 1) / 2;
                Ok(CurveProfile::from_particles(
                    &ParticleConfig::from_occupancies(occ, w)?,
                ))
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::NarrowWedge => "narrow-wedge".into(),
            Self::Flat => "flat".into(),
            Self::StationaryCurve => "stationary-curve".into(),
            Self::Bernoulli { rho } => format!("bernoulli({rho})"),
            Self::Mixed { left, right } => format!("mixed({left:?},{right:?})"),
            Self::Particles { .. } => "particles".into(),
        }
    }
}

/// Default curve-profile window: n + 8 n^{2/3}, comfortably past the
/// O(n^{2/3}) localization scale of the maximizers. The window is part of
/// the simulated model and is echoed into outputs.
pub fn default_profile_window(n: u64) -> i64 {
    (n as f64 + 8.0 * consts::n_2_3(n)).ceil() as i64
}

/// One model entering a basic coupling.
#[derive(Debug, Clone)]
pub enum CoupledModel<'a> {
    Boundary(&'a BoundaryProfile),
    Curve(&'a CurveProfile),
}

/// A joint realization of several models on the identical bulk weights.
pub struct CoupledRun {
    pub env: Environment,
    pub n: u64,
    pub t: f64,
    pub fields: Vec<PassageField>,
}

/// Compute one field per model, all reading the same bulk environment, on
/// the anti-diagonal `m = floor(t n)` over offsets `|k| <= w`.
pub fn basic_couple(
    env: &Environment,
    models: &[CoupledModel<'_>],
    n: u64,
    t: f64,
    w: i64,
    track_labels: bool,
) -> Result<CoupledRun> {
    let m = (t * n as f64).floor() as i64;
    if m < 1 {
        return Err(Error::InvalidConfig("t n too small".into()));
    }
    if w > m {
        return Err(Error::OutsideQuadrant {
            x: w as f64,
            t: m as f64,
        });
    }
    let bulk = env.stream(STREAM_BULK);
    // Materialize every model's boundary data, then sweep them together.
    let mut storage: Vec<(BoundaryArrays, FieldMode)> = Vec::with_capacity(models.len());
    for model in models {
        match model {
            CoupledModel::Boundary(b) => {
                storage.push((b.materialize(env, m + w)?, FieldMode::Boundary));
            }
            CoupledModel::Curve(c) => {
                let cab = CurveAsBoundary::build(env, &c.corners(), m + w, false)?;
                storage.push((
                    BoundaryArrays::from_cumulative(cab.bx, cab.by),
                    FieldMode::Curve,
                ));
            }
        }
    }
    let data: Vec<BoundaryData> = storage
        .iter()
        .map(|(arr, _)| BoundaryData {
            bx: &arr.bx,
            by: &arr.by,
            lab_x: None,
            lab_y: None,
        })
        .collect();
    let fronts = boundary_frontiers(&bulk, &data, m, w, track_labels);
    let fields = fronts
        .into_iter()
        .zip(&storage)
        .map(|(f, (_, mode))| wrap_frontier(f, *mode, n, t, m, w))
        .collect();
    Ok(CoupledRun {
        env: *env,
        n,
        t,
        fields,
    })
}

fn wrap_frontier(
    f: FrontierOut,
    mode: FieldMode,
    n: u64,
    t: f64,
    m: i64,
    w: i64,
) -> PassageField {
    PassageField::from_frontier(mode, n, t, m, w, f.values, f.labels)
}

/// Outcome of a single comparison-lemma evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComparisonOutcome {
    /// The hypothesis `Z_1[i] <= Z_2[j]` failed; nothing is asserted.
    Skipped,
    Holds,
    Violated,
}

/// The comparison lemma at one pair `i <= j`: if `Z_1[i] <= Z_2[j]` then
/// `L_1[j] - L_1[i] <= L_2[j] - L_2[i]`, up to DP roundoff.
pub fn check_comparison(
    f1: &PassageField,
    f2: &PassageField,
    i: i64,
    j: i64,
) -> Result<ComparisonOutcome> {
    if i > j {
        return Err(Error::InvalidConfig(format!("need i <= j, got {i} > {j}")));
    }
    let z1 = f1.label(i)?;
    let z2 = f2.label(j)?;
    if z1 > z2 {
        return Ok(ComparisonOutcome::Skipped);
    }
    let lhs = f1.value(j) - f1.value(i);
    let rhs = f2.value(j) - f2.value(i);
    let tol = dp_roundoff(f1.m as u64, f1.value(j).abs().max(f2.value(j).abs()));
    Ok(if lhs <= rhs + tol {
        ComparisonOutcome::Holds
    } else {
        ComparisonOutcome::Violated
    })
}

/// Violation counts for the ordered-boundary lemmas on one coupled pair.
#[derive(Debug, Clone, Default, Serialize)]
pub struct OrderedPairChecks {
    /// Pairs (i, j) where the cumulative boundary increments were NOT
    /// ordered (the precondition; reported, never asserted against).
    pub precondition_failures: u64,
    /// Adjacent-offset violations of increment domination (attraction).
    pub attract_violations: u64,
    /// Violations of the two monotone difference chains through the origin.
    pub increase_violations: u64,
    pub offsets_checked: u64,
}

/// Check the attraction and increase lemmas for a coupled pair whose
/// cumulative boundaries should be increment-ordered (low <= high).
///
/// Both conclusions reduce to monotonicity of `g(k) = L_high[k] - L_low[k]`:
/// attraction is `g` nondecreasing over all pairs, and the two chains of
/// the increase lemma pivot that monotonicity around the origin.
pub fn check_attract_increase(
    b_low: &BoundaryArrays,
    b_high: &BoundaryArrays,
    f_low: &PassageField,
    f_high: &PassageField,
) -> Result<OrderedPairChecks> {
    let w = f_low.w.min(f_high.w);
    let mut out = OrderedPairChecks::default();
    let tol_b = dp_roundoff(
        w as u64,
        b_high.b(w.min(b_high.bx.len() as i64 - 1)).abs().max(1.0),
    );
    // Precondition: g_b(z) = b_high(z) - b_low(z) nondecreasing.
    let z_max = (b_low.bx.len().min(b_high.bx.len()) as i64 - 1)
        .min(b_low.by.len().min(b_high.by.len()) as i64 - 1);
    let mut prev = b_high.b(-z_max) - b_low.b(-z_max);
    for z in (-z_max + 1)..=z_max {
        let g = b_high.b(z) - b_low.b(z);
        if g < prev - tol_b {
            out.precondition_failures += 1;
        }
        prev = g;
    }
    if out.precondition_failures > 0 {
        return Ok(out); // conclusions not asserted when the premise fails
    }
    let tol = dp_roundoff(
        f_low.m as u64,
        f_low.value(0).abs().max(f_high.value(0).abs()),
    );
    let mut prev = f_high.value(-w) - f_low.value(-w);
    for k in (-w + 1)..=w {
        let g = f_high.value(k) - f_low.value(k);
        if g < prev - tol {
            out.attract_violations += 1;
        }
        prev = g;
        out.offsets_checked += 1;
    }
    // Increase lemma: D(k) = g(k) - g(0) is >= 0 and nondecreasing for
    // k >= 0, and <= 0 and nonincreasing toward the origin for k <= 0.
    let g0 = f_high.value(0) - f_low.value(0);
    for k in 0..=w {
        let d = (f_high.value(k) - f_low.value(k)) - g0;
        if d < -tol {
            out.increase_violations += 1;
        }
    }
    for k in -w..=0 {
        let d = (f_high.value(k) - f_low.value(k)) - g0;
        if d > tol {
            out.increase_violations += 1;
        }
    }
    Ok(out)
}

/// The coupled quadruple (or more): any number of curve models plus the
/// stationary half/tilted trio, all on one environment's bulk weights.
pub struct TiltedRun {
    pub env: Environment,
    pub tp: TiltParameters,
    /// Target half-window actually swept (>= wa).
    pub w: i64,
    /// The sandwich half-window floor(a n^{2/3}).
    pub wa: i64,
    pub m: i64,
    pub curves: Vec<PassageField>,
    pub half: PassageField,
    pub minus: PassageField,
    pub plus: PassageField,
    pub b_half: BoundaryArrays,
    pub b_minus: BoundaryArrays,
    pub b_plus: BoundaryArrays,
    pub b_curves: Vec<BoundaryArrays>,
}

/// Run the tilted coupling for the given curve profiles. `w` defaults to
/// the sandwich window `floor(a n^{2/3})`; pass a larger value (up to m)
/// for full anti-diagonal diagnostics.
pub fn tilted_coupled_run(
    env: &Environment,
    profiles: &[CurveProfile],
    tp: &TiltParameters,
    w: Option<i64>,
    track_exits: bool,
) -> Result<TiltedRun> {
    let n = tp.n;
    let m = (tp.t * n as f64).floor() as i64;
    let wa = (tp.a * consts::n_2_3(n)).floor() as i64;
    let w = w.unwrap_or(wa).max(wa).min(m);
    if wa < 1 {
        return Err(Error::InvalidConfig(
            "a n^{2/3} below one lattice step".into(),
        ));
    }
    let bulk = env.stream(STREAM_BULK);
    let half_profile = BoundaryProfile::stationary(0.5).unwrap();
    let (minus_profile, plus_profile) = BoundaryProfile::tilted_pair(tp);
    let b_half = half_profile.materialize(env, m + w)?;
    let b_minus = minus_profile.materialize(env, m + w)?;
    let b_plus = plus_profile.materialize(env, m + w)?;
    let mut b_curves = Vec::with_capacity(profiles.len());
    for c in profiles {
        let cab = CurveAsBoundary::build(env, &c.corners(), m + w, false)?;
        b_curves.push(BoundaryArrays::from_cumulative(cab.bx, cab.by));
    }
    let mut data: Vec<BoundaryData> = Vec::with_capacity(profiles.len() + 3);
    for arr in &b_curves {
        data.push(BoundaryData {
            bx: &arr.bx,
            by: &arr.by,
            lab_x: None,
            lab_y: None,
        });
    }
    for arr in [&b_half, &b_minus, &b_plus] {
        data.push(BoundaryData {
            bx: &arr.bx,
            by: &arr.by,
            lab_x: None,
            lab_y: None,
        });
    }
    let mut fronts = boundary_frontiers(&bulk, &data, m, w, track_exits);
    let plus = wrap_frontier(fronts.pop().unwrap(), FieldMode::Boundary, n, tp.t, m, w);
    let minus = wrap_frontier(fronts.pop().unwrap(), FieldMode::Boundary, n, tp.t, m, w);
    let half = wrap_frontier(fronts.pop().unwrap(), FieldMode::Boundary, n, tp.t, m, w);
    let curves = fronts
        .into_iter()
        .map(|f| wrap_frontier(f, FieldMode::Curve, n, tp.t, m, w))
        .collect();
    Ok(TiltedRun {
        env: *env,
        tp: *tp,
        w,
        wa,
        m,
        curves,
        half,
        minus,
        plus,
        b_half,
        b_minus,
        b_plus,
        b_curves,
    })
}

impl TiltedRun {
    fn norm(&self) -> f64 {
        consts::POW2_3_2 * consts::cbrt_n(self.tp.n)
    }

    fn tol(&self) -> f64 {
        dp_roundoff(self.m as u64, self.half.value(0).abs().max(1.0))
    }

    /// The integrated increment gap
    /// `I_n = Delta+(a) - Delta-(a) + Delta-(-a) - Delta+(-a)`, always >= 0.
    pub fn integrated_gap(&self) -> f64 {
        let wa = self.wa;
        ((self.plus.value(wa) - self.plus.value(-wa))
            - (self.minus.value(wa) - self.minus.value(-wa)))
            / self.norm()
    }

    /// Uniform distance between the profile's and the stationary increment
    /// processes over the sandwich window.
    pub fn sup_diff(&self, profile_idx: usize) -> f64 {
        let h = &self.curves[profile_idx];
        let wa = self.wa;
        let (h0, s0) = (h.value(0), self.half.value(0));
        let mut sup: f64 = 0.0;
        for k in -wa..=wa {
            let d = (h.value(k) - h0) - (self.half.value(k) - s0);
            sup = sup.max(d.abs());
        }
        sup / self.norm()
    }

    /// The exit-ordering event: `Z+[-a n^{2/3}] >= Z_h[a n^{2/3}]` and
    /// `Z-[a n^{2/3}] <= Z_h[-a n^{2/3}]`. Requires tracked exits.
    pub fn exit_ordering_event(&self, profile_idx: usize) -> Result<bool> {
        let h = &self.curves[profile_idx];
        let wa = self.wa;
        Ok(self.plus.label(-wa)? >= h.label(wa)? && self.minus.label(wa)? <= h.label(-wa)?)
    }

    /// Pathwise attraction chains for the tilted trio
    /// (they hold on every sample, event or not): counts violations of
    /// Delta- <= Delta(1/2) <= Delta+ for u >= 0 and the mirrored chain.
    pub fn attract_chain_violations(&self) -> u64 {
        let tol = self.tol();
        let wa = self.wa;
        let (m0, h0, p0) = (
            self.minus.value(0),
            self.half.value(0),
            self.plus.value(0),
        );
        let mut bad = 0;
        for k in 0..=wa {
            let dm = self.minus.value(k) - m0;
            let dh = self.half.value(k) - h0;
            let dp = self.plus.value(k) - p0;
            if !(dm <= dh + tol && dh <= dp + tol) {
                bad += 1;
            }
        }
        for k in -wa..=0 {
            let dm = self.minus.value(k) - m0;
            let dh = self.half.value(k) - h0;
            let dp = self.plus.value(k) - p0;
            if !(dp <= dh + tol && dh <= dm + tol) {
                bad += 1;
            }
        }
        bad
    }

    /// On the exit-ordering event, the profile increments are enclosed by
    /// the tilted pair and the uniform distance is bounded by the
    /// integrated gap. Returns the violation count (0 off-event).
    pub fn sandwich_violations(&self, profile_idx: usize, on_event: bool) -> u64 {
        if !on_event {
            return 0;
        }
        let tol = self.tol();
        let wa = self.wa;
        let h = &self.curves[profile_idx];
        let (h0, m0, p0, s0) = (
            h.value(0),
            self.minus.value(0),
            self.plus.value(0),
            self.half.value(0),
        );
        let gap = self.integrated_gap() * self.norm();
        let mut bad = 0;
        for k in -wa..=wa {
            let dh = h.value(k) - h0;
            let dm = self.minus.value(k) - m0;
            let dp = self.plus.value(k) - p0;
            let ds = self.half.value(k) - s0;
            let enclosed = if k >= 0 {
                dm <= dh + tol && dh <= dp + tol
            } else {
                dp <= dh + tol && dh <= dm + tol
            };
            if !enclosed {
                bad += 1;
            }
            if (dh - ds).abs() > gap + tol {
                bad += 1;
            }
        }
        bad
    }

    /// Full per-profile report of the sandwich machinery.
    pub fn sandwich_report(&self, profile_idx: usize) -> Result<SandwichReport> {
        let event = self.exit_ordering_event(profile_idx)?;
        let i_n = self.integrated_gap();
        Ok(SandwichReport {
            event,
            supnorm_h_vs_half: self.sup_diff(profile_idx),
            i_n,
            i_n_nonnegative: i_n >= -self.tol() / self.norm(),
            attract_violations: self.attract_chain_violations(),
            sandwich_violations: self.sandwich_violations(profile_idx, event),
        })
    }
}

/// Pathwise sandwich summary for one coupled sample.
#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub event: bool,
    pub supnorm_h_vs_half: f64,
    pub i_n: f64,
    pub i_n_nonnegative: bool,
    pub attract_violations: u64,
    pub sandwich_violations: u64,
}

/// Growing-window schedule for the rescaled convergence mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowSchedule {
    /// Fixed window a.
    Fixed,
    /// a_t = sqrt(t), which satisfies a_t t^{-2/3} -> 0.
    SqrtT,
}

impl Default for WindowSchedule {
    fn default() -> Self {
        Self::Fixed
    }
}

/// Configuration of the convergence-rate experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceConfig {
    pub profiles: Vec<ProfileSpec>,
    pub n: u64,
    pub t_ladder: Vec<f64>,
    pub a: f64,
    pub alpha: f64,
    pub eta: f64,
    pub seeds: u64,
    pub base_seed: u64,
    /// Envelope constants (the bound's c1, c2 are not computable from the
    /// theory; the envelope is shape-only).
    pub c1: f64,
    pub c2: f64,
    pub window: Option<i64>,
    pub track_exits: bool,
    #[serde(default)]
    pub schedule: WindowSchedule,
}

/// Per-rung results of the convergence experiment.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRung {
    pub t: f64,
    pub a_t: f64,
    pub delta_t: f64,
    pub rho_plus: f64,
    pub rho_minus: f64,
    /// P(||Delta_h - Delta_half|| > eta) with Wilson interval.
    pub tail_probability: f64,
    pub tail_low: f64,
    pub tail_high: f64,
    pub exceedances: u64,
    pub seeds: u64,
    /// The shape-only envelope 2 c2 d^{3a} + 22 sqrt(a) d^{1/2-a} / eta.
    pub envelope: f64,
    pub mean_i_n: f64,
    pub se_i_n: f64,
    /// LHS and RHS of the integrated-gap mean bound
    /// 2^{3/2} n^{1/3} E(I_n) <= 54 a n^{2/3} delta^{-alpha} (t n)^{-1/3}.
    pub i_n_bound_lhs: f64,
    pub i_n_bound_rhs: f64,
    pub negative_i_n: u64,
    pub event_frequency: Option<f64>,
    pub attract_violations: u64,
    pub sandwich_violations: u64,
    #[serde(skip)]
    pub per_seed_sup: Vec<f64>,
    #[serde(skip)]
    pub per_seed_i_n: Vec<f64>,
}

/// Results for one profile across the ladder.
#[derive(Debug, Clone, Serialize)]
pub struct ProfileConvergence {
    pub profile: String,
    pub rungs: Vec<ConvergenceRung>,
    /// Tail nonincreasing across the ladder within Monte Carlo noise.
    pub tail_trend_nonincreasing: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub config: ConvergenceConfig,
    pub profile_window: i64,
    pub per_profile: Vec<ProfileConvergence>,
}

struct SeedOutcome {
    sups: Vec<f64>,
    i_n: f64,
    events: Vec<Option<bool>>,
    attract: u64,
    sandwich: u64,
}

/// Run the convergence experiment: for each rung t, couple every profile
/// to the stationary half/tilted trio seed by seed (one shared sweep per
/// seed) and estimate the uniform-distance tail, the integrated-gap mean
/// bound, and (optionally) the exit-ordering event frequency.
pub fn convergence_experiment(cfg: &ConvergenceConfig) -> Result<ConvergenceReport> {
    if cfg.t_ladder.is_empty() {
        return Err(Error::InvalidConfig("empty t ladder".into()));
    }
    if cfg.seeds == 0 {
        return Err(Error::InvalidConfig("zero seeds requested".into()));
    }
    if cfg.profiles.is_empty() {
        return Err(Error::InvalidConfig("no profiles requested".into()));
    }
    let n13 = consts::cbrt_n(cfg.n);
    let window = cfg.window.unwrap_or_else(|| default_profile_window(cfg.n));
    let mut per_profile: Vec<ProfileConvergence> = cfg
        .profiles
        .iter()
        .map(|p| ProfileConvergence {
            profile: p.label(),
            rungs: Vec::new(),
            tail_trend_nonincreasing: true,
        })
        .collect();

    for &t in &cfg.t_ladder {
        let a_t = match cfg.schedule {
            WindowSchedule::Fixed => cfg.a,
            WindowSchedule::SqrtT => t.sqrt(),
        };
        if !(a_t > 0.0 && a_t <= n13) {
            return Err(Error::InvalidConfig(format!(
                "a_t = {a_t} outside (0, n^(1/3) = {n13}]"
            )));
        }
        let tp = TiltParameters::new(cfg.n, t, a_t, cfg.alpha)?;
        // Rescaled mode compares on the unit window: divide sups by a^{1/2}.
        let sup_scale = match cfg.schedule {
            WindowSchedule::Fixed => 1.0,
            WindowSchedule::SqrtT => 1.0 / a_t.sqrt(),
        };
        let outcomes: Vec<SeedOutcome> = (0..cfg.seeds)
            .into_par_iter()
            .map(|s| -> Result<SeedOutcome> {
                let env = Environment::new(cfg.base_seed.wrapping_add(s));
                let profiles: Vec<CurveProfile> = cfg
                    .profiles
                    .iter()
                    .map(|p| p.build(&env, window))
                    .collect::<Result<_>>()?;
                let run = tilted_coupled_run(&env, &profiles, &tp, None, cfg.track_exits)?;
                let mut sups = Vec::with_capacity(profiles.len());
                let mut events = Vec::with_capacity(profiles.len());
                let mut attract = run.attract_chain_violations();
                let mut sandwich = 0;
                for idx in 0..profiles.len() {
                    sups.push(run.sup_diff(idx) * sup_scale);
                    if cfg.track_exits {
                        let ev = run.exit_ordering_event(idx)?;
                        sandwich += run.sandwich_violations(idx, ev);
                        events.push(Some(ev));
                    } else {
                        events.push(None);
                    }
                }
                if run.integrated_gap() < -run.tol() / run.norm() {
                    attract += 1; // a negative integrated gap is impossible
                }
                Ok(SeedOutcome {
                    sups,
                    i_n: run.integrated_gap(),
                    events,
                    attract,
                    sandwich,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let i_ns: Vec<f64> = outcomes.iter().map(|o| o.i_n).collect();
        let (mean_i_n, se_i_n) = mean_and_se(&i_ns);
        let negative_i_n = i_ns.iter().filter(|&&v| v < 0.0).count() as u64;
        let envelope = convergence_envelope(a_t, tp.delta_t, cfg.alpha, cfg.eta, cfg.c2);
        let bound_lhs = consts::POW2_3_2 * n13 * mean_i_n;
        let bound_rhs = 54.0
            * a_t
            * consts::n_2_3(cfg.n)
            * tp.delta_t.powf(-cfg.alpha)
            / (t * cfg.n as f64).cbrt();

        for (pi, prof) in per_profile.iter_mut().enumerate() {
            let sups: Vec<f64> = outcomes.iter().map(|o| o.sups[pi]).collect();
            let exceed = sups.iter().filter(|&&s| s > cfg.eta).count() as u64;
            let (lo, hi) = wilson_interval(exceed, cfg.seeds);
            let event_frequency = if cfg.track_exits {
                let cnt = outcomes
                    .iter()
                    .filter(|o| o.events[pi] == Some(true))
                    .count();
                Some(cnt as f64 / cfg.seeds as f64)
            } else {
                None
            };
            prof.rungs.push(ConvergenceRung {
                t,
                a_t,
                delta_t: tp.delta_t,
                rho_plus: tp.rho_plus,
                rho_minus: tp.rho_minus,
                tail_probability: exceed as f64 / cfg.seeds as f64,
                tail_low: lo,
                tail_high: hi,
                exceedances: exceed,
                seeds: cfg.seeds,
                envelope,
                mean_i_n,
                se_i_n,
                i_n_bound_lhs: bound_lhs,
                i_n_bound_rhs: bound_rhs,
                negative_i_n,
                event_frequency,
                attract_violations: outcomes.iter().map(|o| o.attract).sum(),
                sandwich_violations: outcomes.iter().map(|o| o.sandwich).sum(),
                per_seed_sup: sups,
                per_seed_i_n: i_ns.clone(),
            });
        }
    }

    for prof in per_profile.iter_mut() {
        let probs: Vec<(u64, u64)> = prof
            .rungs
            .iter()
            .map(|r| (r.exceedances, r.seeds))
            .collect();
        let curve = crate::stats::TailCurve::from_exceedances(
            &prof.rungs.iter().map(|r| r.t).collect::<Vec<_>>(),
            &probs,
        );
        prof.tail_trend_nonincreasing = curve.nonincreasing_within_noise();
    }

    Ok(ConvergenceReport {
        config: cfg.clone(),
        profile_window: window,
        per_profile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lpp::FieldOptions;

    #[test]
    fn identical_profiles_identical_fields() {
        let env = Environment::new(777);
        let b = BoundaryProfile::stationary(0.5).unwrap();
        let run = basic_couple(
            &env,
            &[CoupledModel::Boundary(&b), CoupledModel::Boundary(&b)],
            20,
            1.0,
            20,
            true,
        )
        .unwrap();
        for k in -20..=20 {
            assert_eq!(
                run.fields[0].value(k).to_bits(),
                run.fields[1].value(k).to_bits()
            );
            assert_eq!(
                run.fields[0].label(k).unwrap(),
                run.fields[1].label(k).unwrap()
            );
        }
    }

    #[test]
    fn comparison_lemma_identical_models_hold_with_equality() {
        let env = Environment::new(42);
        let b = BoundaryProfile::stationary(0.5).unwrap();
        let run = basic_couple(&env, &[CoupledModel::Boundary(&b)], 15, 1.0, 15, true).unwrap();
        let f = &run.fields[0];
        for (i, j) in [(-10i64, -3i64), (0, 5), (-15, 15), (2, 2)] {
            match check_comparison(f, f, i, j).unwrap() {
                ComparisonOutcome::Violated => panic!("self-comparison violated at {i},{j}"),
                _ => {}
            }
        }
    }

    #[test]
    fn comparison_rejects_unordered_pairs() {
        let env = Environment::new(42);
        let b = BoundaryProfile::stationary(0.5).unwrap();
        let run = basic_couple(&env, &[CoupledModel::Boundary(&b)], 10, 1.0, 10, true).unwrap();
        assert!(check_comparison(&run.fields[0], &run.fields[0], 5, 1).is_err());
    }

    #[test]
    fn tilted_trio_lemmas_hold_pathwise() {
        for seed in 0..30 {
            let env = Environment::new(9_000 + seed);
            let tp = TiltParameters::new(60, 1.0, 1.0, 0.25).unwrap();
            let prof = CurveProfile::flat(default_profile_window(60));
            let run = tilted_coupled_run(&env, &[prof], &tp, Some(60), true).unwrap();
            assert_eq!(run.attract_chain_violations(), 0, "seed {seed}");
            let checks = check_attract_increase(&run.b_minus, &run.b_plus, &run.minus, &run.plus)
                .unwrap();
            assert_eq!(checks.precondition_failures, 0, "seed {seed}");
            assert_eq!(checks.attract_violations, 0, "seed {seed}");
            assert_eq!(checks.increase_violations, 0, "seed {seed}");
            assert!(run.integrated_gap() >= 0.0, "seed {seed}");
            let rep = run.sandwich_report(0).unwrap();
            assert_eq!(rep.sandwich_violations, 0, "seed {seed}");
            assert!(rep.i_n_nonnegative);
        }
    }

    #[test]
    fn misordered_profiles_fail_precondition_not_conclusion() {
        let env = Environment::new(4);
        let tp = TiltParameters::new(40, 1.0, 1.0, 0.25).unwrap();
        let run = tilted_coupled_run(
            &env,
            &[CurveProfile::flat(default_profile_window(40))],
            &tp,
            Some(40),
            true,
        )
        .unwrap();
        // Deliberately swap low and high.
        let checks =
            check_attract_increase(&run.b_plus, &run.b_minus, &run.plus, &run.minus).unwrap();
        assert!(checks.precondition_failures > 0);
        assert_eq!(checks.attract_violations, 0, "conclusion must not be asserted");
    }

    #[test]
    fn degenerate_tilt_event_reduces_to_exit_monotonicity() {
        // With the same boundary for h and the pair, the event holds by the
        // monotonicity of exit points.
        let env = Environment::new(123);
        let n = 50u64;
        let b = BoundaryProfile::stationary(0.5).unwrap();
        let field = crate::lpp::from_boundary(
            &env,
            &b,
            n,
            1.0,
            -10,
            10,
            FieldOptions {
                track_labels: true,
                full: false,
            },
        )
        .unwrap();
        // Z at -wa <= Z at +wa always.
        assert!(field.label(-10).unwrap() <= field.label(10).unwrap());
    }

    #[test]
    fn convergence_config_validation() {
        let cfg = ConvergenceConfig {
            profiles: vec![ProfileSpec::Flat],
            n: 50,
            t_ladder: vec![],
            a: 1.0,
            alpha: 0.25,
            eta: 0.25,
            seeds: 2,
            base_seed: 1,
            c1: 1.0,
            c2: 1.0,
            window: None,
            track_exits: false,
            schedule: WindowSchedule::Fixed,
        };
        assert!(convergence_experiment(&cfg).is_err());
        let cfg2 = ConvergenceConfig {
            t_ladder: vec![1.0],
            seeds: 0,
            ..cfg.clone()
        };
        assert!(convergence_experiment(&cfg2).is_err());
    }

    #[test]
    fn small_convergence_run_is_deterministic() {
        let cfg = ConvergenceConfig {
            profiles: vec![ProfileSpec::Flat, ProfileSpec::StationaryCurve],
            n: 40,
            t_ladder: vec![1.0, 4.0],
            a: 1.0,
            alpha: 0.25,
            eta: 0.25,
            seeds: 8,
            base_seed: 33,
            c1: 1.0,
            c2: 1.0,
            window: None,
            track_exits: true,
            schedule: WindowSchedule::Fixed,
        };
        let r1 = convergence_experiment(&cfg).unwrap();
        let r2 = convergence_experiment(&cfg).unwrap();
        let json1 = serde_json::to_string(&r1).unwrap();
        let json2 = serde_json::to_string(&r2).unwrap();
        assert_eq!(json1, json2);
        assert_eq!(r1.per_profile[0].rungs[0].per_seed_sup, r2.per_profile[0].rungs[0].per_seed_sup);
        // Zero pathwise violations at desk scale.
        for p in &r1.per_profile {
            for r in &p.rungs {
                assert_eq!(r.attract_violations, 0);
                assert_eq!(r.sandwich_violations, 0);
                assert_eq!(r.negative_i_n, 0);
            }
        }
    }
}
