//! Anti-diagonal frontier sweeps.
//!
//! The passage-time recurrences are evaluated along anti-diagonals
//! `d = k + l`: every cell of diagonal `d` depends only on diagonal `d - 1`,
//! so the update is a two-point stencil over a frontier array with no
//! serial chain, and the whole pipeline (site hash, exponential transform,
//! max/add) vectorizes. Memory stays O(width).
//!
//! Two kernels live here:
//!
//! * [`boundary_frontiers`] — any number of boundary-profile models sharing
//!   the bulk environment on the first quadrant (the basic coupling), with
//!   optional exit-label propagation.
//! * [`curve_band`] — the strip between a down-right curve profile and a
//!   coordinate axis, producing the passage-time profile along that axis
//!   (which is exactly the boundary data that replays the curve model as a
//!   boundary model on the quadrant).

use crate::environment::StreamView;

const NEG_INF: f64 = f64::NEG_INFINITY;

/// Cumulative boundary data for one quadrant model.
///
/// `bx[z]` is the model's passage time at `(z, 0)` and `by[z]` at `(0, z)`;
/// both must cover `0..=m+w` and satisfy `bx[0] == by[0] == 0` for genuine
/// boundary profiles (curve-derived data may carry zeros further out).
pub struct BoundaryData<'a> {
    pub bx: &'a [f64],
    pub by: &'a [f64],
    /// Exit labels seeded on the x-axis cells (defaults to `+z`).
    pub lab_x: Option<&'a [i64]>,
    /// Exit labels seeded on the y-axis cells (defaults to `-z`).
    pub lab_y: Option<&'a [i64]>,
}

/// Values (and optionally exit labels) along the target anti-diagonal.
#[derive(Debug, Clone)]
pub struct FrontierOut {
    /// L at `[k]_m = (m + k, m - k)` for `k = -w..=w`, indexed by `k + w`.
    pub values: Vec<f64>,
    /// Exit labels `Z[k]_m` under the max-argmax rule, same indexing.
    pub labels: Option<Vec<i64>>,
}

/// Sweep `models.len()` coupled boundary models to anti-diagonal `2m` and
/// read off the window `|k| <= w`. All models consume the identical bulk
/// weights; only their axis data differ.
///
/// Exit labels are propagated when `track_labels` is set: axis cells carry
/// `z = +i` on the x-axis and `z = -j` on the y-axis, bulk cells inherit the
/// label of the strictly larger parent and the larger label on ties.
pub fn boundary_frontiers(
    bulk: &StreamView,
    models: &[BoundaryData<'_>],
    m: i64,
    w: i64,
    track_labels: bool,
) -> Vec<FrontierOut> {
    assert!(m >= 1 && w >= 0 && w <= m, "need 0 <= w <= m");
    let x_max = (m + w) as usize;
    for md in models {
        assert!(md.bx.len() > x_max && md.by.len() > x_max, "boundary data too short");
    }
    let width = x_max + 1;
    let nm = models.len();

    // The frontier is updated in place: diagonal d is written over diagonal
    // d-1, walking each chunk right to left so the west parent is still the
    // old value when read. Keeps the working set at one array per model.
    let mut cur: Vec<Vec<f64>> = vec![vec![NEG_INF; width]; nm];
    for c in cur.iter_mut() {
        c[0] = 0.0; // the origin, weight 0 by convention
    }
    let mut cur_lab: Vec<Vec<i64>> = if track_labels {
        vec![vec![0; width]; nm]
    } else {
        Vec::new()
    };

    const CHUNK: i64 = 4096;
    let mut wbuf = vec![0.0f64; CHUNK as usize];

    for d in 1..=2 * m {
        let lo = 1.max(d - m - w);
        let hi = (d - 1).min(m + w);
        let mut chi = hi;
        while chi >= lo {
            let clo = (chi - CHUNK + 1).max(lo);
            let len = (chi - clo + 1) as usize;
            bulk.fill_exp1_antidiag(d, clo, &mut wbuf[..len]);
            let base = clo as usize;
            for mm in 0..nm {
                let seg = &mut cur[mm][base - 1..=chi as usize];
                if track_labels {
                    let lab = &mut cur_lab[mm][base - 1..=chi as usize];
                    stencil_inplace_labels(seg, lab, &wbuf[..len]);
                } else {
                    stencil_inplace(seg, &wbuf[..len]);
                }
            }
            chi = clo - 1;
        }
        if d <= m + w {
            let du = d as usize;
            for mm in 0..nm {
                cur[mm][du] = models[mm].bx[du];
                cur[mm][0] = models[mm].by[du];
            }
            if track_labels {
                for (mm, lab) in cur_lab.iter_mut().enumerate() {
                    lab[du] = models[mm].lab_x.map_or(d, |lx| lx[du]);
                    lab[0] = models[mm].lab_y.map_or(-d, |ly| ly[du]);
                }
            }
        }
    }

    let lo = (m - w) as usize;
    (0..nm)
        .map(|mm| FrontierOut {
            values: cur[mm][lo..=x_max].to_vec(),
            labels: track_labels.then(|| cur_lab[mm][lo..=x_max].to_vec()),
        })
        .collect()
}

/// In-place frontier relaxation over `seg = [west boundary, cells...]`:
/// `seg[i] = w[i-1] + max(seg[i-1], seg[i])`. Blocks are walked right to
/// left so every read still sees the previous diagonal; within a block the
/// old values are staged through a fixed-size lane buffer, which keeps the
/// loop vectorizable despite the in-place update.
#[inline(never)]
fn stencil_inplace(seg: &mut [f64], w: &[f64]) {
    const B: usize = 8;
    let len = w.len();
    assert_eq!(seg.len(), len + 1);
    let mut end = len;
    // Full blocks with constant trip count vectorize; remainder runs scalar.
    while end >= B {
        let start = end - B + 1;
        let mut tmp = [0.0f64; B];
        for j in 0..B {
            tmp[j] = w[start - 1 + j] + seg[start - 1 + j].max(seg[start + j]);
        }
        seg[start..=end].copy_from_slice(&tmp);
        end = start - 1;
    }
    while end >= 1 {
        seg[end] = w[end - 1] + seg[end].max(seg[end - 1]);
        end -= 1;
    }
}

/// As [`stencil_inplace`] with exit-label propagation: the strictly larger
/// parent wins, ties keep the larger label (the max-argmax convention).
#[inline(never)]
fn stencil_inplace_labels(seg: &mut [f64], lab: &mut [i64], w: &[f64]) {
    const B: usize = 8;
    let len = w.len();
    assert_eq!(seg.len(), len + 1);
    assert_eq!(lab.len(), len + 1);
    let mut end = len;
    while end >= B {
        let start = end - B + 1;
        let mut tmp = [0.0f64; B];
        let mut ltmp = [0i64; B];
        for j in 0..B {
            let (a, b) = (seg[start - 1 + j], seg[start + j]);
            let (lw, ls) = (lab[start - 1 + j], lab[start + j]);
            tmp[j] = w[start - 1 + j] + a.max(b);
            // Branch-free three-way: strict winner, larger label on ties.
            let on_tie = lw.max(ls);
            let rhs = if b > a { ls } else { on_tie };
            ltmp[j] = if a > b { lw } else { rhs };
        }
        seg[start..=end].copy_from_slice(&tmp);
        lab[start..=end].copy_from_slice(&ltmp);
        end = start - 1;
    }
    while end >= 1 {
        let (a, b) = (seg[end - 1], seg[end]);
        let (lw, ls) = (lab[end - 1], lab[end]);
        seg[end] = w[end - 1] + a.max(b);
        let on_tie = lw.max(ls);
        let rhs = if b > a { ls } else { on_tie };
        lab[end] = if a > b { lw } else { rhs };
        end -= 1;
    }
}

/// A concave corner expressed in sweep coordinates: `u` runs along the axis
/// the band hangs off, `v <= 0` is the depth below (or left of) that axis.
#[derive(Debug, Clone, Copy)]
pub struct BandCorner {
    pub u: i64,
    pub v: i64,
}

/// Label carried by cells not reachable from any corner.
pub const NO_LABEL: i64 = i64::MIN;

/// Output of a band sweep: passage times along the axis the band hangs off
/// (zero where the column precedes every corner) and optional labels.
#[derive(Debug, Clone)]
pub struct BandOut {
    pub axis: Vec<f64>,
    pub labels: Option<Vec<i64>>,
}

/// Passage times along one coordinate axis for a curve profile, obtained by
/// sweeping the strip between a down-right staircase of corners and that
/// axis.
///
/// `MIRROR = false` sweeps the strip below the x-axis (corners with
/// `l <= 0`, sweep coordinate `u = k`), returning `L(u, 0)` for
/// `u = 0..=u_max`; `MIRROR = true` is the transposed strip left of the
/// y-axis, returning `L(0, u)`. Columns before the first corner belong to
/// the initially occupied region and report 0 (with [`NO_LABEL`]).
///
/// `stair[u - u_first]` is the least admissible `v` in column `u`, i.e. the
/// depth of the lowest corner dominated from that column;
/// `corner_labels[i]`, when given, is propagated from `corners[i]`.
pub fn curve_band<const MIRROR: bool>(
    bulk: &StreamView,
    corners: &[BandCorner],
    corner_labels: Option<&[i64]>,
    stair: &[i64],
    u_first: i64,
    u_max: i64,
) -> BandOut {
    let track = corner_labels.is_some();
    let mut axis = vec![0.0f64; (u_max + 1) as usize];
    let mut axis_lab = track.then(|| vec![NO_LABEL; (u_max + 1) as usize]);
    if corners.is_empty() || u_first > u_max {
        return BandOut {
            axis,
            labels: axis_lab,
        };
    }
    debug_assert_eq!(stair.len(), (u_max - u_first + 1) as usize);
    let v_min = corners.iter().map(|c| c.v).min().unwrap();
    let d_min = corners.iter().map(|c| c.u + c.v).min().unwrap();

    // Frontier indexed by u - u_first + 1 (slot 0 is a permanent -inf pad).
    let width = (u_max - u_first + 2) as usize;
    let mut cur = vec![NEG_INF; width];
    let mut lab = track.then(|| vec![NO_LABEL; width]);
    let mut wbuf = vec![0.0f64; width];

    // Corners in diagonal order, labels kept alongside.
    let mut order: Vec<usize> = (0..corners.len()).collect();
    order.sort_by_key(|&i| corners[i].u + corners[i].v);
    let mut corner_idx = 0usize;

    for d in d_min..=u_max {
        let lo = u_first.max(d);
        let hi = u_max.min(d - v_min);
        if lo <= hi {
            let len = (hi - lo + 1) as usize;
            fill_band_weights::<MIRROR>(bulk, d, lo, &mut wbuf[..len]);
            let base = (lo - u_first + 1) as usize;
            let stair_base = (lo - u_first) as usize;
            let st = &stair[stair_base..stair_base + len];
            if let Some(lab) = lab.as_mut() {
                band_stencil_inplace_labels(
                    &mut cur[base - 1..base + len],
                    &mut lab[base - 1..base + len],
                    &wbuf[..len],
                    st,
                    d,
                    lo,
                );
            } else {
                band_stencil_inplace(&mut cur[base - 1..base + len], &wbuf[..len], st, d, lo);
            }
        }
        // Inject corner sources on this diagonal: a path may start there.
        while corner_idx < order.len() {
            let ci = order[corner_idx];
            let c = corners[ci];
            if c.u + c.v != d {
                break;
            }
            let slot = (c.u - u_first + 1) as usize;
            let w = band_weight::<MIRROR>(bulk, c.u, c.v);
            let ck = corner_labels.map_or(NO_LABEL, |ls| ls[ci]);
            if w > cur[slot] {
                cur[slot] = w;
                if let Some(lab) = lab.as_mut() {
                    lab[slot] = ck;
                }
            } else if w == cur[slot] {
                if let Some(lab) = lab.as_mut() {
                    lab[slot] = lab[slot].max(ck);
                }
            }
            corner_idx += 1;
        }
        // Column d is finished (its v = 0 cell sits on this diagonal).
        if d >= u_first {
            let slot = (d - u_first + 1) as usize;
            axis[d as usize] = cur[slot];
            if let (Some(out), Some(lab)) = (axis_lab.as_mut(), lab.as_ref()) {
                out[d as usize] = lab[slot];
            }
        }
    }
    BandOut {
        axis,
        labels: axis_lab,
    }
}

/// Band relaxation, in place over `seg = [west pad, cells...]`, walked right
/// to left in constant-size blocks; cells below the staircase stay -inf.
#[inline(never)]
fn band_stencil_inplace(seg: &mut [f64], w: &[f64], stair: &[i64], d: i64, u_lo: i64) {
    let len = w.len();
    assert!(seg.len() == len + 1 && stair.len() == len);
    for idx in (1..=len).rev() {
        let v = d - (u_lo + idx as i64 - 1);
        let val = w[idx - 1] + seg[idx].max(seg[idx - 1]);
        seg[idx] = if v >= stair[idx - 1] { val } else { NEG_INF };
    }
}

#[inline(never)]
fn band_stencil_inplace_labels(
    seg: &mut [f64],
    lab: &mut [i64],
    w: &[f64],
    stair: &[i64],
    d: i64,
    u_lo: i64,
) {
    let len = w.len();
    assert!(seg.len() == len + 1 && lab.len() == len + 1 && stair.len() == len);
    for idx in (1..=len).rev() {
        let v = d - (u_lo + idx as i64 - 1);
        let inside = v >= stair[idx - 1];
        let (a, b) = (seg[idx - 1], seg[idx]);
        let (lw, ls) = (lab[idx - 1], lab[idx]);
        let val = w[idx - 1] + a.max(b);
        let on_tie = lw.max(ls);
        let rhs = if b > a { ls } else { on_tie };
        let chosen = if a > b { lw } else { rhs };
        seg[idx] = if inside { val } else { NEG_INF };
        lab[idx] = if inside { chosen } else { NO_LABEL };
    }
}

#[inline]
fn fill_band_weights<const MIRROR: bool>(bulk: &StreamView, d: i64, u_lo: i64, out: &mut [f64]) {
    if MIRROR {
        bulk.fill_exp1_antidiag_mirror(d, u_lo, out);
    } else {
        bulk.fill_exp1_antidiag(d, u_lo, out);
    }
}

#[inline]
fn band_weight<const MIRROR: bool>(bulk: &StreamView, u: i64, v: i64) -> f64 {
    if MIRROR {
        bulk.exp1(v, u)
    } else {
        bulk.exp1(u, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{Environment, STREAM_BULK};

    /// Dense reference for a single boundary model.
    fn dense_boundary(env: &Environment, bx: &[f64], by: &[f64], kmax: i64, lmax: i64) -> Vec<Vec<f64>> {
        let s = env.stream(STREAM_BULK);
        let mut grid = vec![vec![0.0; (lmax + 1) as usize]; (kmax + 1) as usize];
        for k in 0..=kmax {
            grid[k as usize][0] = bx[k as usize];
        }
        for l in 0..=lmax {
            grid[0][l as usize] = by[l as usize];
        }
        for k in 1..=kmax {
            for l in 1..=lmax {
                let w = s.exp1(k, l);
                grid[k as usize][l as usize] =
                    w + grid[(k - 1) as usize][l as usize].max(grid[k as usize][(l - 1) as usize]);
            }
        }
        grid
    }

    #[test]
    fn frontier_matches_dense_recurrence() {
        let env = Environment::new(2024);
        let m = 23i64;
        let w = 7i64;
        let x_max = (m + w) as usize;
        let bx: Vec<f64> = (0..=x_max).map(|z| z as f64 * 0.3).collect();
        let by: Vec<f64> = (0..=x_max).map(|z| (z as f64).sqrt()).collect();
        let out = boundary_frontiers(
            &env.stream(STREAM_BULK),
            &[BoundaryData { bx: &bx, by: &by, lab_x: None, lab_y: None }],
            m,
            w,
            false,
        );
        let grid = dense_boundary(&env, &bx, &by, m + w, m + w);
        for k in -w..=w {
            let p = ((m + k) as usize, (m - k) as usize);
            let got = out[0].values[(k + w) as usize];
            let want = grid[p.0][p.1];
            assert!((got - want).abs() < 1e-12, "k={k} got={got} want={want}");
        }
    }

    #[test]
    fn exit_labels_on_axis_targets() {
        let env = Environment::new(5);
        let m = 6i64;
        let w = 6i64; // window touches both axes
        let x_max = (m + w) as usize;
        let bx: Vec<f64> = (0..=x_max).map(|z| z as f64).collect();
        let by = bx.clone();
        let out = boundary_frontiers(
            &env.stream(STREAM_BULK),
            &[BoundaryData { bx: &bx, by: &by, lab_x: None, lab_y: None }],
            m,
            w,
            true,
        );
        let labels = out[0].labels.as_ref().unwrap();
        // Targets on the axes exit exactly at themselves.
        assert_eq!(labels[(w + w) as usize], 2 * m); // [w]_m = (2m, 0)
        assert_eq!(labels[0], -2 * m); // [-w]_m = (0, 2m)
    }

    #[test]
    fn band_reproduces_dense_multisource() {
        // Point-to-line style sources on the anti-diagonal u + v = 2.
        let env = Environment::new(99);
        let s = env.stream(STREAM_BULK);
        let u_first = 2i64;
        let u_max = 24i64;
        let corners: Vec<BandCorner> = (0..=10)
            .map(|j| BandCorner { u: 2 + j, v: -j })
            .collect();
        let stair: Vec<i64> = (u_first..=u_max)
            .map(|u| -(u - 2).min(10))
            .collect();
        let axis = curve_band::<false>(&s, &corners, None, &stair, u_first, u_max).axis;

        // Dense reference over the strip.
        let vmin = -10i64;
        let idx = |u: i64, v: i64| ((u + 1) as usize, (v - vmin) as usize);
        let mut grid = vec![vec![NEG_INF; (1 - vmin) as usize]; (u_max + 2) as usize];
        for u in 0..=u_max {
            for v in vmin..=0 {
                let inside = u >= 2 && v >= -(u - 2).min(10);
                if !inside {
                    continue;
                }
                let w = s.exp1(u, v);
                let west = if u > 0 { grid[idx(u - 1, v).0][idx(u - 1, v).1] } else { NEG_INF };
                let south = if v > vmin { grid[idx(u, v - 1).0][idx(u, v - 1).1] } else { NEG_INF };
                let mut val = w + west.max(south);
                if corners.iter().any(|c| c.u == u && c.v == v) {
                    val = val.max(w);
                }
                grid[idx(u, v).0][idx(u, v).1] = val;
            }
        }
        for u in 0..=u_max {
            let want = if u < 2 { 0.0 } else { grid[idx(u, 0).0][idx(u, 0).1] };
            assert!(
                (axis[u as usize] - want).abs() < 1e-12,
                "u={u} got={} want={want}",
                axis[u as usize]
            );
        }
    }
}
