//! The exclusion-process side of the correspondence: height functions,
//! a continuous-time discrete-event simulator, reconstruction of heights
//! from occupation times, and invariance diagnostics.

use crate::error::{Error, Result};
use crate::lattice::LatticePoint;
use crate::lpp::DenseField;
use crate::profiles::{CurveProfile, ParticleConfig};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A TASEP height function on a window, with +-1 increments.
#[derive(Debug, Clone)]
pub struct HeightFunction {
    pub time: f64,
    window: i64,
    /// h(k) for k = -window..=window.
    values: Vec<i64>,
}

impl HeightFunction {
    /// The initial height of a particle configuration (N_0 = 0):
    /// h(k) = sum_{j=1..k} (1 - 2 eta(j)) for k >= 1 and the mirrored sum
    /// for k <= -1.
    pub fn from_particles(cfg: &ParticleConfig) -> Self {
        let w = cfg.window();
        let mut values = vec![0i64; (2 * w + 1) as usize];
        let mut acc = 0i64;
        for k in 1..=w {
            acc += if cfg.eta(k) { -1 } else { 1 };
            values[(k + w) as usize] = acc;
        }
        acc = 0;
        for k in (-w..0).rev() {
            acc -= if cfg.eta(k + 1) { -1 } else { 1 };
            values[(k + w) as usize] = acc;
        }
        Self {
            time: 0.0,
            window: w,
            values,
        }
    }

    pub fn window(&self) -> i64 {
        self.window
    }

    pub fn get(&self, k: i64) -> Option<i64> {
        if k.abs() > self.window {
            return None;
        }
        Some(self.values[(k + self.window) as usize])
    }

    /// Height differences are +-1 everywhere.
    pub fn increments_valid(&self) -> bool {
        self.values.windows(2).all(|p| (p[1] - p[0]).abs() == 1)
    }
}

/// One height-flip event: at `time`, the local minimum at `site` rose by 2.
#[derive(Debug, Clone, Copy)]
pub struct GrowthEvent {
    pub time: f64,
    pub site: i64,
    pub new_height: i64,
}

/// Result of a direct TASEP run.
#[derive(Debug, Clone)]
pub struct TasepRun {
    pub final_heights: HeightFunction,
    pub snapshots: Vec<HeightFunction>,
    pub events: Vec<GrowthEvent>,
    /// Particles that crossed the bond 0 -> 1.
    pub n_t: u64,
}

/// Continuous-time TASEP on the configuration's window: admissible jumps
/// carry independent rate-1 clocks, realized by sampling the total-rate
/// exponential and a uniform pick (memorylessness justifies resampling
/// after each event). The window edges are frozen: a jump landing within
/// two sites of either edge aborts the run, so callers must pad the window
/// beyond the light cone (about 2 t_max sites).
pub fn direct_tasep(
    cfg: &ParticleConfig,
    t_max: f64,
    seed: u64,
    snapshot_times: &[f64],
) -> Result<TasepRun> {
    let w = cfg.window();
    let mut occ: Vec<bool> = (-w..=w).map(|k| cfg.eta(k)).collect();
    let idx = |site: i64| (site + w) as usize;

    // Admissible bonds (site k occupied, k+1 empty), with a position map.
    let mut bonds: Vec<i64> = Vec::new();
    let mut pos: Vec<usize> = vec![usize::MAX; occ.len()];
    let add = |bonds: &mut Vec<i64>, pos: &mut Vec<usize>, k: i64| {
        if pos[idx(k)] == usize::MAX {
            pos[idx(k)] = bonds.len();
            bonds.push(k);
        }
    };
    let remove = |bonds: &mut Vec<i64>, pos: &mut Vec<usize>, k: i64| {
        let p = pos[idx(k)];
        if p != usize::MAX {
            let last = *bonds.last().unwrap();
            bonds.swap_remove(p);
            pos[idx(last)] = if last == k { usize::MAX } else { p };
            pos[idx(k)] = usize::MAX;
        }
    };
    for k in -w..w {
        if occ[idx(k)] && !occ[idx(k + 1)] {
            add(&mut bonds, &mut pos, k);
        }
    }

    let mut heights = HeightFunction::from_particles(cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut time = 0.0f64;
    let mut n_t = 0u64;
    let mut events = Vec::new();
    let mut snapshots = Vec::new();
    let mut snap_iter = snapshot_times.iter().copied().peekable();

    loop {
        let rate = bonds.len() as f64;
        let dt = if rate > 0.0 {
            -rng.gen_range(f64::MIN_POSITIVE..1.0f64).ln() / rate
        } else {
            f64::INFINITY
        };
        let next_time = time + dt;
        while let Some(&ts) = snap_iter.peek() {
            if ts <= next_time.min(t_max) {
                let mut snap = heights.clone();
                snap.time = ts;
                snapshots.push(snap);
                snap_iter.next();
            } else {
                break;
            }
        }
        if next_time > t_max || rate == 0.0 {
            break;
        }
        time = next_time;
        let k = bonds[rng.gen_range(0..bonds.len())];
        if k <= -w + 1 || k >= w - 2 {
            return Err(Error::WindowExhausted(format!(
                "jump at site {k} touches the frozen edge (window {w}, t = {time:.3})"
            )));
        }
        // Move the particle k -> k+1.
        occ[idx(k)] = false;
        occ[idx(k + 1)] = true;
        if k == 0 {
            n_t += 1;
        }
        let hv = heights.values[idx(k)] + 2;
        heights.values[idx(k)] = hv;
        heights.time = time;
        events.push(GrowthEvent {
            time,
            site: k,
            new_height: hv,
        });
        // Update admissibility around the moved particle.
        remove(&mut bonds, &mut pos, k);
        if occ[idx(k - 1)] {
            add(&mut bonds, &mut pos, k - 1);
        }
        if k + 2 <= w && !occ[idx(k + 2)] {
            add(&mut bonds, &mut pos, k + 1);
        }
    }
    heights.time = t_max;
    Ok(TasepRun {
        final_heights: heights,
        snapshots,
        events,
        n_t,
    })
}

/// Reconstruct the TASEP height at time `t` from curve-model occupation
/// times: `h(x, t) = h0(x) + 2 #\{cells on diagonal x with L <= t\}`, which
/// is the threshold form of the growth correspondence.
///
/// `field` must be a full-storage curve field; the reconstruction errors
/// out if the growth cluster reaches the stored boundary.
pub fn height_from_occupation(
    field: &DenseField,
    profile: &CurveProfile,
    t: f64,
    window: i64,
) -> Result<HeightFunction> {
    if window > profile.window() {
        return Err(Error::CoverageShortfall(format!(
            "window {window} exceeds the profile window {}",
            profile.window()
        )));
    }
    let corners = field
        .corners
        .as_ref()
        .ok_or(Error::NotBoundaryMode)
        .map_err(|_| Error::InvalidConfig("occupation threshold needs a curve field".into()))?;
    let mut values = Vec::with_capacity((2 * window + 1) as usize);
    for x in -window..=window {
        // The path visits diagonal x exactly once, at index x.
        let base = profile.h(x);
        let mut h = base.k + base.l;
        let (mut k, mut l) = (base.k + 1, base.l + 1);
        loop {
            if !corners.dominated_by(LatticePoint::new(k, l)) {
                // still initially occupied along this diagonal
                h = k + l;
                k += 1;
                l += 1;
                continue;
            }
            if !field.contains(k, l) {
                return Err(Error::WindowExhausted(format!(
                    "occupation threshold leaves the stored grid at ({k}, {l})"
                )));
            }
            if field.value(k, l) <= t {
                h = k + l;
                k += 1;
                l += 1;
            } else {
                break;
            }
        }
        values.push(h);
    }
    Ok(HeightFunction {
        time: t,
        window,
        values,
    })
}

/// Empirical invariance diagnostics for the Bernoulli(rho) initial law:
/// occupation frequency at the origin and the two-point correlation at a
/// fixed distance, per time in the ladder.
#[derive(Debug, Clone, serde::Serialize)]
pub struct InvarianceReport {
    pub rho: f64,
    pub times: Vec<f64>,
    pub occupation_at_origin: Vec<f64>,
    pub pair_correlation_d3: Vec<f64>,
    pub standard_error: f64,
    pub seeds: u64,
}

pub fn invariance_check(
    rho: f64,
    t_ladder: &[f64],
    seeds: u64,
    base_seed: u64,
    window: i64,
) -> Result<InvarianceReport> {
    if !(0.0 < rho && rho < 1.0) {
        return Err(Error::InvalidRho(rho));
    }
    let mut occ_counts = vec![0u64; t_ladder.len()];
    let mut pair_counts = vec![0u64; t_ladder.len()];
    for s in 0..seeds {
        let env = crate::environment::Environment::new(base_seed.wrapping_add(s));
        let cfg = ParticleConfig::bernoulli(&env, rho, window)?;
        let run = direct_tasep(
            &cfg,
            *t_ladder.last().unwrap(),
            env.derive_seed(0x7a5e9, s),
            t_ladder,
        )?;
        for (ti, snap) in run.snapshots.iter().enumerate() {
            // Recover occupation from height differences:
            // eta(k) = (1 - (h(k) - h(k-1))) / 2.
            let eta = |k: i64| (1 - (snap.get(k).unwrap() - snap.get(k - 1).unwrap())) / 2;
            if eta(0) == 1 {
                occ_counts[ti] += 1;
            }
            if eta(0) == 1 && eta(3) == 1 {
                pair_counts[ti] += 1;
            }
        }
    }
    let n = seeds as f64;
    Ok(InvarianceReport {
        rho,
        times: t_ladder.to_vec(),
        occupation_at_origin: occ_counts.iter().map(|&c| c as f64 / n).collect(),
        pair_correlation_d3: pair_counts.iter().map(|&c| c as f64 / n).collect(),
        standard_error: (rho * (1.0 - rho) / n).sqrt(),
        seeds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::Environment;

    #[test]
    fn initial_height_of_step_data_is_absolute_value() {
        let cfg = ParticleConfig::step(20);
        let h = HeightFunction::from_particles(&cfg);
        for k in -20..=20 {
            assert_eq!(h.get(k).unwrap(), k.abs());
        }
        assert!(h.increments_valid());
    }

    #[test]
    fn flat_initial_height_alternates() {
        let cfg = ParticleConfig::alternating(10);
        let h = HeightFunction::from_particles(&cfg);
        for k in -10..=10 {
            assert_eq!(h.get(k).unwrap(), (k % 2 != 0) as i64, "k = {k}");
        }
    }

    #[test]
    fn initial_height_matches_curve_diagonal_sums() {
        // h0(x) equals the sum coordinate of the profile point at index x.
        let env = Environment::new(88);
        let cfg = ParticleConfig::bernoulli(&env, 0.5, 50).unwrap();
        let prof = CurveProfile::from_particles(&cfg);
        let h = HeightFunction::from_particles(&cfg);
        for x in -50..=50 {
            let p = prof.h(x);
            assert_eq!(h.get(x).unwrap(), p.k + p.l, "x = {x}");
        }
    }

    #[test]
    fn single_particle_jump_count_is_poisson() {
        // One particle, empty lane: jumps over [0, t] are Poisson(t).
        let t = 20.0;
        let reps = 400;
        let mut total = 0u64;
        for seed in 0..reps {
            let mut occ = vec![false; 241];
            occ[120] = true; // site 0 of window 120
            let cfg = ParticleConfig::from_occupancies(occ, 120).unwrap();
            let run = direct_tasep(&cfg, t, 31_000 + seed, &[]).unwrap();
            total += run.events.len() as u64;
        }
        let mean = total as f64 / reps as f64;
        let se = (t / reps as f64).sqrt();
        assert!(
            (mean - t).abs() < 3.5 * se,
            "mean jump count {mean}, want {t} +- {}",
            3.5 * se
        );
    }

    #[test]
    fn exclusion_rule_never_violated() {
        let env = Environment::new(5);
        let cfg = ParticleConfig::bernoulli(&env, 0.5, 60).unwrap();
        let run = direct_tasep(&cfg, 8.0, 99, &[]).unwrap();
        // Replay the event log onto the initial configuration.
        let mut occ: Vec<bool> = (-60..=60).map(|k| cfg.eta(k)).collect();
        for ev in &run.events {
            let i = (ev.site + 60) as usize;
            assert!(occ[i], "jump from empty site");
            assert!(!occ[i + 1], "jump onto occupied site");
            occ[i] = false;
            occ[i + 1] = true;
        }
    }

    #[test]
    fn events_flip_local_minima_by_two() {
        let env = Environment::new(6);
        let cfg = ParticleConfig::bernoulli(&env, 0.5, 60).unwrap();
        let run = direct_tasep(&cfg, 6.0, 123, &[]).unwrap();
        let mut h = HeightFunction::from_particles(&cfg);
        for ev in &run.events {
            let i = (ev.site + 60) as usize;
            // Local minimum before the flip.
            assert_eq!(h.values[i - 1], h.values[i] + 1);
            assert_eq!(h.values[i + 1], h.values[i] + 1);
            h.values[i] += 2;
            assert_eq!(h.values[i], ev.new_height);
        }
        assert!(h.increments_valid());
    }

    #[test]
    fn n_t_counts_origin_crossings_and_is_nondecreasing() {
        let cfg = ParticleConfig::step(80);
        let run = direct_tasep(&cfg, 10.0, 7, &[]).unwrap();
        let crossings = run.events.iter().filter(|e| e.site == 0).count() as u64;
        assert_eq!(run.n_t, crossings);
        assert!(run.n_t > 0);
    }

    #[test]
    fn window_exhaustion_detected() {
        // Tiny window, long time: the step front must hit the edge.
        let cfg = ParticleConfig::step(6);
        let r = direct_tasep(&cfg, 50.0, 3, &[]);
        assert!(matches!(r, Err(Error::WindowExhausted(_))));
    }
}
