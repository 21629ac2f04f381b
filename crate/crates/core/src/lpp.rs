//! Passage-time engines: point-to-point, boundary-profile and
//! point-to-curve last-passage times with exit points, geodesic
//! backtracking, and an exhaustive path-enumeration oracle.
//!
//! Two implementations coexist deliberately. The frontier engines in
//! [`crate::sweep`] power every large run; the dense engines here keep the
//! whole grid for geodesics and occupation-time queries and double as a
//! mid-scale cross-check of the frontier path. The [`oracle`] module is the
//! ground truth at desk scale: it enumerates every admissible path.

use crate::environment::{Environment, STREAM_BULK};
use crate::error::{Error, Result};
use crate::lattice::{antidiag_indices, LatticePoint};
use crate::profiles::{BoundaryArrays, BoundaryProfile, CornerSet, CurveProfile};
use crate::sweep::{self, BandCorner, BoundaryData};
use serde::{Deserialize, Serialize};

/// Label carried by cells unreachable from any corner.
pub const NO_LABEL: i64 = i64::MIN;

const DENSE_CELL_CAP: i64 = 40_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldMode {
    /// Weights prescribed on the axes; exit labels are the boundary exit z.
    Boundary,
    /// Multi-source from concave corners; labels are the corner index k.
    Curve,
}

/// Options controlling what a field computation records.
#[derive(Debug, Clone, Copy, Default)]
pub struct FieldOptions {
    /// Propagate exit labels through the recursion.
    pub track_labels: bool,
    /// Keep full storage (required for geodesic backtracking).
    pub full: bool,
}

/// Passage times along one target anti-diagonal, optionally with exit
/// labels and full storage.
#[derive(Debug, Clone)]
pub struct PassageField {
    pub mode: FieldMode,
    pub n: u64,
    pub t: f64,
    /// Targets are `[k]_m = (m + k, m - k)` for `|k| <= w`.
    pub m: i64,
    pub w: i64,
    values: Vec<f64>,
    labels: Option<Vec<i64>>,
    pub dense: Option<DenseField>,
}

impl PassageField {
    /// Wrap a computed frontier (values over `[-w, w]`).
    pub(crate) fn from_frontier(
        mode: FieldMode,
        n: u64,
        t: f64,
        m: i64,
        w: i64,
        values: Vec<f64>,
        labels: Option<Vec<i64>>,
    ) -> Self {
        debug_assert_eq!(values.len(), (2 * w + 1) as usize);
        Self {
            mode,
            n,
            t,
            m,
            w,
            values,
            labels,
            dense: None,
        }
    }

    /// L at `[k]_m`.
    pub fn value(&self, k: i64) -> f64 {
        assert!(k.abs() <= self.w, "target offset {k} outside window {}", self.w);
        self.values[(k + self.w) as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self, k: i64) -> Result<i64> {
        let labels = self.labels.as_ref().ok_or(Error::NoExitLabels)?;
        assert!(k.abs() <= self.w);
        Ok(labels[(k + self.w) as usize])
    }

    pub fn labels(&self) -> Option<&[i64]> {
        self.labels.as_deref()
    }

    /// Anti-diagonal increments `zeta_{k+1} = L[k+1]_m - L[k]_m` for
    /// k = -m..m-1; requires the field to cover the full anti-diagonal.
    pub fn antidiagonal_increments(&self) -> Result<Vec<f64>> {
        if self.w != self.m {
            return Err(Error::CoverageShortfall(format!(
                "increments need the full anti-diagonal (w = {} < m = {})",
                self.w, self.m
            )));
        }
        Ok(self.values.windows(2).map(|p| p[1] - p[0]).collect())
    }
}

/// Full-storage field over a lattice rectangle.
#[derive(Debug, Clone)]
pub struct DenseField {
    pub mode: FieldMode,
    pub k_lo: i64,
    pub k_hi: i64,
    pub l_lo: i64,
    pub l_hi: i64,
    vals: Vec<f64>,
    labs: Vec<i64>,
    /// Boundary mode: the materialized axis data.
    pub boundary: Option<BoundaryArrays>,
    /// Curve mode: the source corners.
    pub corners: Option<CornerSet>,
}

impl DenseField {
    fn idx(&self, k: i64, l: i64) -> usize {
        debug_assert!(self.contains(k, l), "({k},{l}) outside dense field");
        ((l - self.l_lo) * (self.k_hi - self.k_lo + 1) + (k - self.k_lo)) as usize
    }

    pub fn contains(&self, k: i64, l: i64) -> bool {
        (self.k_lo..=self.k_hi).contains(&k) && (self.l_lo..=self.l_hi).contains(&l)
    }

    /// Passage time at `(k, l)`; initially occupied cells report 0 in curve
    /// mode; cells of the initial region report the boundary data in
    /// boundary mode.
    pub fn value(&self, k: i64, l: i64) -> f64 {
        self.vals[self.idx(k, l)]
    }

    pub fn label(&self, k: i64, l: i64) -> i64 {
        self.labs[self.idx(k, l)]
    }
}

/// An up-right path certifying a passage time.
#[derive(Debug, Clone, PartialEq)]
pub struct Geodesic {
    pub points: Vec<LatticePoint>,
    pub weight_sum: f64,
}

impl Geodesic {
    pub fn is_up_right(&self) -> bool {
        self.points.windows(2).all(|p| {
            let d = (p[1].k - p[0].k, p[1].l - p[0].l);
            d == (1, 0) || d == (0, 1)
        })
    }
}

/// Exit record for one anti-diagonal target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExitRecord {
    /// The anti-diagonal offset i of the target `[i]_m`.
    pub i: i64,
    /// The exit coordinate `Z` (max-argmax over boundary entries).
    pub z: i64,
}

/// Point-to-point last-passage time over the raw environment; the weights
/// of both endpoints are included.
pub fn point_to_point(env: &Environment, start: LatticePoint, end: LatticePoint) -> Result<f64> {
    if !end.dominates(&start) {
        return Err(Error::UnorderedEndpoints(start.k, start.l, end.k, end.l));
    }
    let s = env.stream(STREAM_BULK);
    let width = (end.k - start.k + 1) as usize;
    let mut row = vec![f64::NEG_INFINITY; width];
    for l in start.l..=end.l {
        for ik in 0..width {
            let k = start.k + ik as i64;
            let w = s.exp1(k, l);
            let west = if ik > 0 { row[ik - 1] } else { f64::NEG_INFINITY };
            let south = row[ik];
            let best = west.max(south);
            row[ik] = if best == f64::NEG_INFINITY { w } else { w + best };
        }
    }
    Ok(row[width - 1])
}

/// Boundary-profile passage times on the anti-diagonal `m = floor(t n)`,
/// for target offsets `k_lo..=k_hi`.
pub fn from_boundary(
    env: &Environment,
    profile: &BoundaryProfile,
    n: u64,
    t: f64,
    k_lo: i64,
    k_hi: i64,
    opts: FieldOptions,
) -> Result<PassageField> {
    let m = (t * n as f64).floor() as i64;
    if m < 1 {
        return Err(Error::InvalidConfig(format!("t n = {m} too small")));
    }
    if k_lo > k_hi {
        return Err(Error::EmptyTargets);
    }
    if k_lo.abs().max(k_hi.abs()) > m {
        return Err(Error::OutsideQuadrant {
            x: k_lo.abs().max(k_hi.abs()) as f64,
            t: m as f64,
        });
    }
    let w = k_lo.abs().max(k_hi.abs()).max(1).min(m);
    let arrays = profile.materialize(env, m + w)?;
    let bulk = env.stream(STREAM_BULK);
    let out = sweep::boundary_frontiers(
        &bulk,
        &[BoundaryData {
            bx: &arrays.bx,
            by: &arrays.by,
            lab_x: None,
            lab_y: None,
        }],
        m,
        w,
        opts.track_labels,
    )
    .remove(0);
    let dense = if opts.full {
        Some(dense_boundary(env, arrays, m + w, m + w)?)
    } else {
        None
    };
    let (values, labels) = slice_window(out.values, out.labels, w, k_lo, k_hi);
    Ok(PassageField {
        mode: FieldMode::Boundary,
        n,
        t,
        m,
        w: k_lo.abs().max(k_hi.abs()),
        values,
        labels,
        dense,
    })
}

fn slice_window(
    values: Vec<f64>,
    labels: Option<Vec<i64>>,
    w: i64,
    k_lo: i64,
    k_hi: i64,
) -> (Vec<f64>, Option<Vec<i64>>) {
    // The sweep returns the symmetric window [-w, w]; keep the symmetric
    // hull of the requested range so indexing stays uniform.
    let w_req = k_lo.abs().max(k_hi.abs());
    let off = (w - w_req) as usize;
    let len = (2 * w_req + 1) as usize;
    let vals = values[off..off + len].to_vec();
    let labs = labels.map(|l| l[off..off + len].to_vec());
    (vals, labs)
}

/// Curve-profile passage times on the anti-diagonal `m = floor(t n)`.
/// Labels carry the maximizing corner index.
pub fn from_curve(
    env: &Environment,
    profile: &CurveProfile,
    n: u64,
    t: f64,
    k_lo: i64,
    k_hi: i64,
    opts: FieldOptions,
) -> Result<PassageField> {
    from_corners(env, &profile.corners(), n, t, k_lo, k_hi, opts)
}

/// Restricted variant: passage times seeded from an explicit corner set
/// (used by the cutoff decomposition).
pub fn from_corners(
    env: &Environment,
    corners: &CornerSet,
    n: u64,
    t: f64,
    k_lo: i64,
    k_hi: i64,
    opts: FieldOptions,
) -> Result<PassageField> {
    let m = (t * n as f64).floor() as i64;
    if m < 1 {
        return Err(Error::InvalidConfig(format!("t n = {m} too small")));
    }
    if k_lo > k_hi {
        return Err(Error::EmptyTargets);
    }
    let w = k_lo.abs().max(k_hi.abs()).max(1).min(m);
    let curve = CurveAsBoundary::build(env, corners, m + w, opts.track_labels)?;
    let bulk = env.stream(STREAM_BULK);
    let out = sweep::boundary_frontiers(&bulk, &[curve.data()], m, w, opts.track_labels).remove(0);
    // Targets must dominate at least one corner.
    for k in k_lo..=k_hi {
        let p = antidiag_indices(k, m);
        if !corners.dominated_by(p) {
            return Err(Error::NoCornerBelow(p.k, p.l));
        }
    }
    let dense = if opts.full {
        Some(dense_curve(env, corners, m + w, m + w)?)
    } else {
        None
    };
    let (values, labels) = slice_window(out.values, out.labels, w, k_lo, k_hi);
    Ok(PassageField {
        mode: FieldMode::Curve,
        n,
        t,
        m,
        w: k_lo.abs().max(k_hi.abs()),
        values,
        labels,
        dense,
    })
}

/// A curve model rewritten as a boundary model on the quadrant: the axis
/// arrays are the curve passage times along the axes (zero on the initially
/// occupied stretch), computed by the band sweeps between the staircase and
/// the axes. The rewrite is exact: the quadrant recurrence then reproduces
/// the point-to-curve passage times cell by cell.
pub(crate) struct CurveAsBoundary {
    pub bx: Vec<f64>,
    pub by: Vec<f64>,
    pub lab_x: Option<Vec<i64>>,
    pub lab_y: Option<Vec<i64>>,
}

impl CurveAsBoundary {
    pub fn data(&self) -> BoundaryData<'_> {
        BoundaryData {
            bx: &self.bx,
            by: &self.by,
            lab_x: self.lab_x.as_deref(),
            lab_y: self.lab_y.as_deref(),
        }
    }

    pub fn build(
        env: &Environment,
        corners: &CornerSet,
        z_max: i64,
        track_labels: bool,
    ) -> Result<Self> {
        let bulk = env.stream(STREAM_BULK);

        // Corners by region: below the x-axis, left of the y-axis, quadrant.
        // Corners past the axis range cannot influence any stored value.
        let mut bottom = Vec::new();
        let mut left = Vec::new();
        for c in corners.iter() {
            if c.site.l <= 0 {
                if c.site.k <= z_max {
                    bottom.push((c.k, BandCorner { u: c.site.k, v: c.site.l }));
                }
            } else if c.site.k <= 0 && c.site.l <= z_max {
                left.push((c.k, BandCorner { u: c.site.l, v: c.site.k }));
            }
        }

        let (bx, mut lab_x) =
            band_axis::<false>(&bulk, &bottom, z_max, track_labels)?;
        let (by, mut lab_y) = band_axis::<true>(&bulk, &left, z_max, track_labels)?;

        if track_labels {
            // A quadrant corner (c, 1) or (1, c) starts fresh off the zero
            // stretch of the axis; tag that axis cell with the corner index
            // so the label flows with the path.
            let lx = lab_x.as_mut().unwrap();
            let ly = lab_y.as_mut().unwrap();
            for c in corners.iter() {
                if c.site.k >= 1 && c.site.l >= 1 {
                    if c.site.l == 1 && c.site.k <= z_max {
                        lx[c.site.k as usize] = c.k;
                    }
                    if c.site.k == 1 && c.site.l <= z_max {
                        ly[c.site.l as usize] = c.k;
                    }
                }
            }
        }
        Ok(Self { bx, by, lab_x, lab_y })
    }
}

/// Axis passage times (and labels) for one band.
fn band_axis<const MIRROR: bool>(
    bulk: &crate::environment::StreamView,
    tagged: &[(i64, BandCorner)],
    u_max: i64,
    track_labels: bool,
) -> Result<(Vec<f64>, Option<Vec<i64>>)> {
    if tagged.is_empty() {
        let axis = vec![0.0; (u_max + 1) as usize];
        let labs = track_labels.then(|| vec![NO_LABEL; (u_max + 1) as usize]);
        return Ok((axis, labs));
    }
    let u_first = tagged.iter().map(|(_, c)| c.u).min().unwrap();
    if u_first < 1 {
        return Err(Error::InvalidConfig(
            "band corner on or behind the axis origin".into(),
        ));
    }
    // stair[u - u_first]: least admissible v in column u.
    let mut stair = vec![i64::MAX; (u_max - u_first + 1) as usize];
    let mut best = i64::MAX;
    let mut iter = tagged.iter().peekable();
    for u in u_first..=u_max {
        while let Some((_, c)) = iter.peek() {
            if c.u <= u {
                best = best.min(c.v);
                iter.next();
            } else {
                break;
            }
        }
        stair[(u - u_first) as usize] = best;
    }
    let corners: Vec<BandCorner> = tagged.iter().map(|&(_, c)| c).collect();
    let labels: Vec<i64> = tagged.iter().map(|&(k, _)| k).collect();
    let out = sweep::curve_band::<MIRROR>(
        bulk,
        &corners,
        if track_labels { Some(&labels) } else { None },
        &stair,
        u_first,
        u_max,
    );
    Ok((out.axis, out.labels))
}

/// Exit points `Z[i]_m` for the given offsets, ordered by i.
pub fn exit_points(field: &PassageField, i_lo: i64, i_hi: i64) -> Result<Vec<ExitRecord>> {
    if field.mode != FieldMode::Boundary {
        return Err(Error::NotBoundaryMode);
    }
    (i_lo..=i_hi)
        .map(|i| Ok(ExitRecord { i, z: field.label(i)? }))
        .collect()
}

/// Dense boundary field over `[0, k_hi] x [0, l_hi]` with exit labels.
pub fn dense_boundary(
    env: &Environment,
    arrays: BoundaryArrays,
    k_hi: i64,
    l_hi: i64,
) -> Result<DenseField> {
    if (k_hi + 1) * (l_hi + 1) > DENSE_CELL_CAP {
        return Err(Error::InvalidConfig(format!(
            "dense field {k_hi}x{l_hi} exceeds the full-storage cap"
        )));
    }
    if arrays.bx.len() <= k_hi as usize || arrays.by.len() <= l_hi as usize {
        return Err(Error::CoverageShortfall(
            "boundary arrays shorter than the dense window".into(),
        ));
    }
    let s = env.stream(STREAM_BULK);
    let width = (k_hi + 1) as usize;
    let mut field = DenseField {
        mode: FieldMode::Boundary,
        k_lo: 0,
        k_hi,
        l_lo: 0,
        l_hi,
        vals: vec![0.0; width * (l_hi + 1) as usize],
        labs: vec![0; width * (l_hi + 1) as usize],
        boundary: None,
        corners: None,
    };
    for k in 0..=k_hi {
        let i = field.idx(k, 0);
        field.vals[i] = arrays.bx[k as usize];
        field.labs[i] = k;
    }
    for l in 1..=l_hi {
        let i = field.idx(0, l);
        field.vals[i] = arrays.by[l as usize];
        field.labs[i] = -l;
    }
    for l in 1..=l_hi {
        for k in 1..=k_hi {
            let w = s.exp1(k, l);
            let (vw, lw) = (field.value(k - 1, l), field.label(k - 1, l));
            let (vs, ls) = (field.value(k, l - 1), field.label(k, l - 1));
            let i = field.idx(k, l);
            if vw > vs {
                field.vals[i] = w + vw;
                field.labs[i] = lw;
            } else if vs > vw {
                field.vals[i] = w + vs;
                field.labs[i] = ls;
            } else {
                field.vals[i] = w + vw;
                field.labs[i] = lw.max(ls);
            }
        }
    }
    field.boundary = Some(arrays);
    Ok(field)
}

/// Dense curve field over the rectangle spanned by the corners and
/// `(k_hi, l_hi)`. Initially occupied cells (dominating no corner) carry
/// value 0; they act as fresh-start parents in the recurrence, which is
/// exactly the corner-source rule.
pub fn dense_curve(
    env: &Environment,
    corners: &CornerSet,
    k_hi: i64,
    l_hi: i64,
) -> Result<DenseField> {
    if corners.is_empty() {
        return Err(Error::NoCornerBelow(k_hi, l_hi));
    }
    let k_lo = corners.iter().map(|c| c.site.k).min().unwrap().min(0);
    let l_lo = corners.iter().map(|c| c.site.l).min().unwrap().min(0);
    if (k_hi - k_lo + 1) * (l_hi - l_lo + 1) > DENSE_CELL_CAP {
        return Err(Error::InvalidConfig(format!(
            "dense field {}x{} exceeds the full-storage cap",
            k_hi - k_lo + 1,
            l_hi - l_lo + 1
        )));
    }
    let s = env.stream(STREAM_BULK);
    let width = (k_hi - k_lo + 1) as usize;
    let height = (l_hi - l_lo + 1) as usize;
    let mut field = DenseField {
        mode: FieldMode::Curve,
        k_lo,
        k_hi,
        l_lo,
        l_hi,
        vals: vec![0.0; width * height],
        labs: vec![NO_LABEL; width * height],
        boundary: None,
        corners: None,
    };
    let corner_at = |k: i64, l: i64| -> Option<i64> {
        corners
            .iter()
            .find(|c| c.site.k == k && c.site.l == l)
            .map(|c| c.k)
    };
    for l in l_lo..=l_hi {
        for k in k_lo..=k_hi {
            if !corners.dominated_by(LatticePoint::new(k, l)) {
                continue; // initially occupied: value 0, no label
            }
            let w = s.exp1(k, l);
            // Candidates: region parents and, at a corner, the fresh start.
            let mut best_v = f64::NEG_INFINITY;
            let mut best_l = NO_LABEL;
            let mut consider = |v: f64, lab: i64| {
                if v > best_v || (v == best_v && lab > best_l) {
                    best_v = v;
                    best_l = lab;
                }
            };
            if field.contains(k - 1, l) && field.label(k - 1, l) != NO_LABEL {
                consider(field.value(k - 1, l), field.label(k - 1, l));
            }
            if field.contains(k, l - 1) && field.label(k, l - 1) != NO_LABEL {
                consider(field.value(k, l - 1), field.label(k, l - 1));
            }
            if let Some(ck) = corner_at(k, l) {
                consider(0.0, ck);
            }
            if best_l == NO_LABEL {
                continue; // dominates a corner but it lies outside the rect
            }
            let i = field.idx(k, l);
            field.vals[i] = w + best_v;
            field.labs[i] = best_l;
        }
    }
    field.corners = Some(corners.clone());
    Ok(field)
}

/// Backtrack the rightmost geodesic to `target` from a full-storage field.
/// Value ties are broken toward the parent carrying the larger exit label,
/// implementing the max-argmax exit convention pathwise.
pub fn geodesic_backtrack(
    env: &Environment,
    field: &PassageField,
    target: LatticePoint,
) -> Result<Geodesic> {
    let dense = field.dense.as_ref().ok_or(Error::NotFullStorage)?;
    geodesic_backtrack_dense(env, dense, target)
}

pub fn geodesic_backtrack_dense(
    env: &Environment,
    dense: &DenseField,
    target: LatticePoint,
) -> Result<Geodesic> {
    if !dense.contains(target.k, target.l) {
        return Err(Error::CoverageShortfall(format!(
            "target ({}, {}) outside the stored grid",
            target.k, target.l
        )));
    }
    let mut rev = Vec::new();
    let mut p = target;
    match dense.mode {
        FieldMode::Boundary => {
            while p.k > 0 && p.l > 0 {
                rev.push(p);
                let (vw, lw) = (dense.value(p.k - 1, p.l), dense.label(p.k - 1, p.l));
                let (vs, ls) = (dense.value(p.k, p.l - 1), dense.label(p.k, p.l - 1));
                let go_south = vs > vw || (vs == vw && ls >= lw);
                p = if go_south {
                    LatticePoint::new(p.k, p.l - 1)
                } else {
                    LatticePoint::new(p.k - 1, p.l)
                };
            }
            // Walk the axis back to the origin.
            while p.k > 0 {
                rev.push(p);
                p.k -= 1;
            }
            while p.l > 0 {
                rev.push(p);
                p.l -= 1;
            }
            rev.push(p); // the origin
        }
        FieldMode::Curve => {
            if dense.label(p.k, p.l) == NO_LABEL {
                return Err(Error::NoCornerBelow(p.k, p.l));
            }
            let corners = dense.corners.as_ref().expect("curve field keeps corners");
            loop {
                rev.push(p);
                let corner_here = corners
                    .iter()
                    .any(|c| c.site == p && c.k == dense.label(p.k, p.l));
                let mut candidates = Vec::with_capacity(2);
                if dense.contains(p.k - 1, p.l) && dense.label(p.k - 1, p.l) != NO_LABEL {
                    candidates.push((
                        dense.value(p.k - 1, p.l),
                        dense.label(p.k - 1, p.l),
                        LatticePoint::new(p.k - 1, p.l),
                        false,
                    ));
                }
                if dense.contains(p.k, p.l - 1) && dense.label(p.k, p.l - 1) != NO_LABEL {
                    candidates.push((
                        dense.value(p.k, p.l - 1),
                        dense.label(p.k, p.l - 1),
                        LatticePoint::new(p.k, p.l - 1),
                        true,
                    ));
                }
                if corner_here {
                    candidates.push((0.0, dense.label(p.k, p.l), p, true));
                }
                let best = candidates
                    .into_iter()
                    .max_by(|a, b| {
                        a.0.partial_cmp(&b.0)
                            .unwrap()
                            .then(a.1.cmp(&b.1))
                            .then(a.3.cmp(&b.3))
                    })
                    .ok_or(Error::NoCornerBelow(p.k, p.l))?;
                if best.2 == p {
                    break; // fresh start: the geodesic begins here
                }
                p = best.2;
            }
        }
    }
    rev.reverse();
    // Accumulate forward in path order; this reproduces the recurrence's
    // additions bit for bit.
    let s = env.stream(STREAM_BULK);
    let mut sum = 0.0;
    match dense.mode {
        FieldMode::Boundary => {
            let arrays = dense.boundary.as_ref().expect("boundary field keeps axis data");
            for q in &rev {
                if q.l == 0 {
                    sum = arrays.bx[q.k as usize]; // cumulative along the axis
                } else if q.k == 0 {
                    sum = arrays.by[q.l as usize];
                } else {
                    sum += s.exp1(q.k, q.l);
                }
            }
        }
        FieldMode::Curve => {
            for q in &rev {
                sum += s.exp1(q.k, q.l);
            }
        }
    }
    Ok(Geodesic {
        points: rev,
        weight_sum: sum,
    })
}

/// Exhaustive enumeration oracles, independent of the DP engines.
pub mod oracle {
    use super::*;

    pub const MAX_SIDE: i64 = 8;

    fn check_side(dk: i64, dl: i64) -> Result<()> {
        let side = dk.max(dl);
        if side > MAX_SIDE {
            return Err(Error::OracleTooLarge {
                max: MAX_SIDE,
                got: side,
            });
        }
        Ok(())
    }

    /// Maximum over every up-right path from `start` to `end` of the sum of
    /// site weights, both endpoints included.
    pub fn point_to_point(
        env: &Environment,
        start: LatticePoint,
        end: LatticePoint,
    ) -> Result<f64> {
        if !end.dominates(&start) {
            return Err(Error::UnorderedEndpoints(start.k, start.l, end.k, end.l));
        }
        check_side(end.k - start.k, end.l - start.l)?;
        let s = env.stream(STREAM_BULK);
        let mut best = f64::NEG_INFINITY;
        fn walk(
            s: &crate::environment::StreamView,
            p: LatticePoint,
            end: LatticePoint,
            acc: f64,
            best: &mut f64,
        ) {
            if p == end {
                if acc > *best {
                    *best = acc;
                }
                return;
            }
            if p.k < end.k {
                let q = LatticePoint::new(p.k + 1, p.l);
                walk(s, q, end, acc + s.exp1(q.k, q.l), best);
            }
            if p.l < end.l {
                let q = LatticePoint::new(p.k, p.l + 1);
                walk(s, q, end, acc + s.exp1(q.k, q.l), best);
            }
        }
        walk(&s, start, end, s.exp1(start.k, start.l), &mut best);
        Ok(best)
    }

    /// Boundary-model passage time and max-argmax exit point by enumerating
    /// every admissible entry coordinate z and every bulk path after it.
    pub fn boundary(
        env: &Environment,
        arrays: &BoundaryArrays,
        target: LatticePoint,
    ) -> Result<(f64, i64)> {
        let (k, l) = (target.k, target.l);
        if k < 0 || l < 0 {
            return Err(Error::OutsideBulk(k, l));
        }
        check_side(k, l)?;
        if k == 0 || l == 0 {
            // Axis targets: the path runs along the axis.
            let v = if l == 0 {
                arrays.bx[k as usize]
            } else {
                arrays.by[l as usize]
            };
            return Ok((v, if l == 0 { k } else { -l }));
        }
        let mut best = f64::NEG_INFINITY;
        let mut best_z = 0;
        for z in -l..=k {
            if z == 0 {
                continue; // bulk targets always leave the axes at |z| >= 1
            }
            let entry = if z > 0 {
                LatticePoint::new(z, 1)
            } else {
                LatticePoint::new(1, -z)
            };
            let v = arrays.b(z) + point_to_point(env, entry, target)?;
            if v >= best {
                best = v;
                best_z = z;
            }
        }
        Ok((best, best_z))
    }

    /// Point-to-curve passage time and maximizing corner index.
    pub fn curve(
        env: &Environment,
        corners: &CornerSet,
        target: LatticePoint,
    ) -> Result<(f64, i64)> {
        let mut best = f64::NEG_INFINITY;
        let mut best_k = NO_LABEL;
        for c in corners.iter() {
            if !target.dominates(&c.site) {
                continue;
            }
            check_side(target.k - c.site.k, target.l - c.site.l)?;
            let v = point_to_point(env, c.site, target)?;
            if v >= best {
                best = v;
                best_k = c.k;
            }
        }
        if best_k == NO_LABEL {
            return Err(Error::NoCornerBelow(target.k, target.l));
        }
        Ok((best, best_k))
    }
}
