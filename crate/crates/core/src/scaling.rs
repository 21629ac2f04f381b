//! KPZ-rescaled observables: the increment process, the rescaled height
//! process, the standardized TASEP height, and the growing-window rescaling.
//!
//! Spatial grids are kept in lattice units (integer anti-diagonal offsets);
//! real positions map onto the grid by the cadlag floor convention, so two
//! processes share a grid exactly when they share offsets.

use crate::error::{Error, Result};
use crate::lpp::PassageField;
use crate::numeric::consts;
use crate::tasep::HeightFunction;

/// A sampled cadlag process `x -> value` on `[-a, a]`, stored on lattice
/// offsets. `lattice_per_x` converts a real position to lattice units
/// (`n^{2/3}` for the raw increment process, `a n^{2/3}` after rescaling to
/// the unit window).
#[derive(Debug, Clone)]
pub struct IncrementPath {
    pub n: u64,
    pub t: f64,
    pub a: f64,
    pub lattice_per_x: f64,
    offsets: Vec<i64>,
    values: Vec<f64>,
}

impl IncrementPath {
    pub fn offsets(&self) -> &[i64] {
        &self.offsets
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Cadlag evaluation: the value at the lattice offset `floor(x * scale)`.
    pub fn value_at(&self, x: f64) -> f64 {
        let k = (x * self.lattice_per_x).floor() as i64;
        let k = k.clamp(self.offsets[0], *self.offsets.last().unwrap());
        let idx = self.offsets.partition_point(|&o| o <= k) - 1;
        self.values[idx]
    }

    /// Sup distance over the common grid (the paths must share offsets).
    pub fn sup_abs_diff(&self, other: &IncrementPath) -> Result<f64> {
        if self.offsets != other.offsets {
            return Err(Error::CoverageShortfall(
                "increment paths sampled on different grids".into(),
            ));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// The rescaled height process on its own lattice grid, stored as the value
/// at the origin plus increments so the displayed identity with the
/// increment process is exact by construction.
#[derive(Debug, Clone)]
pub struct HeightPath {
    pub n: u64,
    pub t: f64,
    /// Lattice offsets of the height grid; offset k is the position
    /// `x = k / (2^{2/3} n^{2/3})`.
    offsets: Vec<i64>,
    /// H_n(0, t), from the display `(L[0]_{tn} - 4nt) / (2^{4/3} n^{1/3})`.
    pub at_origin: f64,
    /// `H_n(x, t) - H_n(0, t)` per offset.
    increments: Vec<f64>,
}

impl HeightPath {
    pub fn offsets(&self) -> &[i64] {
        &self.offsets
    }

    pub fn value(&self, idx: usize) -> f64 {
        self.at_origin + self.increments[idx]
    }

    pub fn increment(&self, idx: usize) -> f64 {
        self.increments[idx]
    }
}

/// The increment process `Delta_n(x, t)` on the grid
/// `x = j * grid_step` in `[-a, a]` (default step: one lattice site).
///
/// Requires `0 < a <= n^{1/3}` and a field covering `|k| <= floor(a n^{2/3})`.
pub fn increment_process(
    field: &PassageField,
    a: f64,
    grid_step: Option<f64>,
) -> Result<IncrementPath> {
    let n = field.n;
    let n23 = consts::n_2_3(n);
    let n13 = consts::cbrt_n(n);
    if !(a > 0.0 && a <= n13) {
        return Err(Error::InvalidConfig(format!(
            "a = {a} outside (0, n^(1/3) = {n13}]"
        )));
    }
    let w_need = (a * n23).floor() as i64;
    if field.w < w_need {
        return Err(Error::CoverageShortfall(format!(
            "field window {} < required {w_need}",
            field.w
        )));
    }
    let offsets: Vec<i64> = match grid_step {
        None => (-w_need..=w_need).collect(),
        Some(step) => {
            if !(step > 0.0) {
                return Err(Error::InvalidConfig("grid step must be positive".into()));
            }
            let jmax = (a / step).floor() as i64;
            let mut offs: Vec<i64> = (-jmax..=jmax)
                .map(|j| ((j as f64 * step) * n23).floor() as i64)
                .collect();
            offs.dedup();
            offs
        }
    };
    let norm = consts::POW2_3_2 * n13;
    let center = field.value(0);
    let values = offsets
        .iter()
        .map(|&k| (field.value(k) - center) / norm)
        .collect();
    Ok(IncrementPath {
        n,
        t: field.t,
        a,
        lattice_per_x: n23,
        offsets,
        values,
    })
}

/// The rescaled height process `H_n(x, t)` for `x` in `[-a, a]`, built from
/// the same passage times: `H_n(0,t)` by its display and the increments via
/// the exact identity `H_n(x,t) = H_n(0,t) + 2^{1/6} Delta_n(2^{2/3} x, t)`.
pub fn height_process(field: &PassageField, a: f64) -> Result<HeightPath> {
    let n = field.n;
    let n23 = consts::n_2_3(n);
    let n13 = consts::cbrt_n(n);
    let w_need = (consts::POW2_2_3 * a * n23).floor() as i64;
    if field.w < w_need {
        return Err(Error::CoverageShortfall(format!(
            "field window {} < required {w_need}",
            field.w
        )));
    }
    let tn = field.t * n as f64;
    let at_origin = (field.value(0) - 4.0 * n as f64 * field.t) / (consts::POW2_4_3 * n13);
    let norm = consts::POW2_3_2 * n13;
    let center = field.value(0);
    let offsets: Vec<i64> = (-w_need..=w_need).collect();
    let increments = offsets
        .iter()
        .map(|&k| consts::POW2_1_6 * ((field.value(k) - center) / norm))
        .collect();
    let _ = tn;
    Ok(HeightPath {
        n,
        t: field.t,
        offsets,
        at_origin,
        increments,
    })
}

/// The standardized TASEP height
/// `h_n(x, t) = (t n / 2 - h(floor(2 x n^{2/3}), t n)) / n^{1/3}`
/// evaluated on the given positions. The height snapshot must be taken at
/// TASEP time `t * n`.
pub fn standardized_height(
    heights: &HeightFunction,
    n: u64,
    t: f64,
    xs: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let n23 = consts::n_2_3(n);
    let n13 = consts::cbrt_n(n);
    let tn = t * n as f64;
    if (heights.time - tn).abs() > 1e-9 * tn.max(1.0) {
        return Err(Error::InvalidConfig(format!(
            "height snapshot at time {} but t n = {tn}",
            heights.time
        )));
    }
    xs.iter()
        .map(|&x| {
            let site = (2.0 * x * n23).floor() as i64;
            let h = heights
                .get(site)
                .ok_or_else(|| Error::CoverageShortfall(format!("height at site {site}")))?;
            Ok((x, (0.5 * tn - h as f64) / n13))
        })
        .collect()
}

/// Rescale a coupled pair to the unit window: `v -> a^{-1/2} Delta(a v, t)`
/// for `v` in `[-1, 1]`. The grid offsets are preserved, so the sup-norm
/// identity `||rescaled diff||_{K_1} = a^{-1/2} ||diff||_{K_a}` is exact.
pub fn rescale_to_unit_window(
    pair: (&IncrementPath, &IncrementPath),
    a: f64,
) -> Result<(IncrementPath, IncrementPath)> {
    let scale = |p: &IncrementPath| -> Result<IncrementPath> {
        if p.a + 1e-12 < a {
            return Err(Error::CoverageShortfall(format!(
                "path covers [-{}, {}], need [-{a}, {a}]",
                p.a, p.a
            )));
        }
        let amp = 1.0 / a.sqrt();
        Ok(IncrementPath {
            n: p.n,
            t: p.t,
            a: 1.0,
            lattice_per_x: a * p.lattice_per_x,
            offsets: p.offsets.clone(),
            values: p.values.iter().map(|&v| amp * v).collect(),
        })
    };
    Ok((scale(pair.0)?, scale(pair.1)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::Environment;
    use crate::lpp::{from_boundary, FieldOptions};
    use crate::profiles::BoundaryProfile;

    fn half_field(seed: u64, n: u64, w: i64) -> PassageField {
        let env = Environment::new(seed);
        let b = BoundaryProfile::stationary(0.5).unwrap();
        from_boundary(&env, &b, n, 1.0, -w, w, FieldOptions::default()).unwrap()
    }

    #[test]
    fn increment_vanishes_at_origin() {
        let field = half_field(4, 125, 30);
        let path = increment_process(&field, 1.0, None).unwrap();
        assert_eq!(path.value_at(0.0), 0.0);
        let mid = path.offsets().iter().position(|&k| k == 0).unwrap();
        assert_eq!(path.values()[mid], 0.0);
    }

    #[test]
    fn increments_telescope_against_field() {
        let field = half_field(9, 125, 25);
        let path = increment_process(&field, 1.0, None).unwrap();
        let norm = consts::POW2_3_2 * consts::cbrt_n(125);
        for (&k, &v) in path.offsets().iter().zip(path.values()) {
            let want = (field.value(k) - field.value(0)) / norm;
            assert_eq!(v.to_bits(), want.to_bits());
        }
    }

    #[test]
    fn negative_side_is_negated_sum_of_increments() {
        let field = half_field(10, 125, 25);
        let zeta = {
            let env = Environment::new(10);
            let b = BoundaryProfile::stationary(0.5).unwrap();
            let full = from_boundary(&env, &b, 125, 1.0, -125, 125, FieldOptions::default())
                .unwrap();
            full.antidiagonal_increments().unwrap()
        };
        let path = increment_process(&field, 1.0, None).unwrap();
        let norm = consts::POW2_3_2 * consts::cbrt_n(125);
        // Delta(-j) = -(zeta_{-j+1} + ... + zeta_0) / norm, indices shifted:
        // zeta[idx] = L[idx-125+1] - L[idx-125].
        let sum_neg: f64 = (120..125).map(|idx| zeta[idx]).sum();
        let got = path.value_at(-5.0 / consts::n_2_3(125));
        assert!((got + sum_neg / norm).abs() < 1e-9);
    }

    #[test]
    fn height_identity_with_increment_process() {
        let n = 125u64;
        let field = half_field(77, n, 80);
        let hp = height_process(&field, 0.5).unwrap();
        let dp = increment_process(&field, 1.0, None).unwrap();
        // On shared lattice offsets: H(x) - H(0) - 2^{1/6} Delta(2^{2/3} x) = 0,
        // up to one rounding of the final combination.
        for (idx, &k) in hp.offsets().iter().enumerate() {
            let delta_idx = dp.offsets().iter().position(|&o| o == k).unwrap();
            let resid =
                hp.value(idx) - hp.at_origin - consts::POW2_1_6 * dp.values()[delta_idx];
            let scale = hp.at_origin.abs().max(1.0);
            assert!(
                resid.abs() <= 4.0 * f64::EPSILON * scale,
                "k={k} residual {resid}"
            );
        }
    }

    #[test]
    fn height_at_origin_matches_display() {
        let n = 125u64;
        let field = half_field(3, n, 10);
        let hp = height_process(&field, 0.1).unwrap();
        let want = (field.value(0) - 4.0 * n as f64 * 1.0)
            / (consts::POW2_4_3 * consts::cbrt_n(n));
        assert_eq!(hp.at_origin.to_bits(), want.to_bits());
    }

    #[test]
    fn rescale_identity_on_supnorm() {
        let field_a = half_field(21, 125, 50);
        let field_b = half_field(21, 125, 50);
        let a = 2.0;
        let pa = increment_process(&field_a, a, None).unwrap();
        let mut pb = increment_process(&field_b, a, None).unwrap();
        // Perturb one path so the difference is nontrivial.
        for v in pb.values.iter_mut() {
            *v *= 1.25;
        }
        let raw = pa.sup_abs_diff(&pb).unwrap();
        let (ra, rb) = rescale_to_unit_window((&pa, &pb), a).unwrap();
        let rescaled = ra.sup_abs_diff(&rb).unwrap();
        let want = raw / a.sqrt();
        assert!((rescaled - want).abs() <= f64::EPSILON * want.abs().max(1.0) * 4.0);
    }

    #[test]
    fn rescale_with_unit_a_is_identity() {
        let field = half_field(5, 125, 25);
        let p = increment_process(&field, 1.0, None).unwrap();
        let (r, _) = rescale_to_unit_window((&p, &p), 1.0).unwrap();
        assert_eq!(r.values(), p.values());
    }

    #[test]
    fn rejects_a_above_cbrt_n() {
        let field = half_field(6, 125, 125);
        assert!(increment_process(&field, 6.0, None).is_err()); // n^{1/3} = 5
    }
}
