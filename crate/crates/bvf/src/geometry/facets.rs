//! Jump-set decomposition and the L^2-jump product.
//!
//! Axis-box unions go through an exact coordinate-sweep overlay; general 2D
//! catalogs (polygons, disks, rotated boxes) go through a boundary
//! arrangement that splits every carrier at crossings and collinear-overlap
//! endpoints, so each resulting piece has constant one-sided values. Any
//! positive-measure overlap of a curved boundary with another boundary that
//! cannot be expressed this way raises `OverlapNotRepresentable`.

use crate::error::{Error, Result};
use crate::geometry::overlap::Resolved;
use crate::geometry::shape::BVFunction;
use crate::vec::Point;

/// Relative threshold below which facets are discarded as numerical slivers.
const SLIVER_REL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub enum Carrier {
    /// Line segment in the plane; the normal field is the left-hand normal
    /// of the direction a -> b rotated to (dy, -dx), i.e. the right normal.
    Segment { a: [f64; 2], b: [f64; 2] },
    /// Circle arc; `orient = +1` means the normal field is radially outward.
    Arc {
        c: [f64; 2],
        r: f64,
        th0: f64,
        th1: f64,
        orient: f64,
    },
    /// Axis-aligned rectangle at `coord` on `axis` (3D overlay facets);
    /// normal field is `orient * e_axis`.
    AxisFacet {
        axis: usize,
        coord: f64,
        lo: Point,
        hi: Point,
        orient: f64,
    },
    /// Full sphere; `orient` as for `Arc`.
    Sphere { c: Point, r: f64, orient: f64 },
    /// Planar rectangular patch of a rotated 3D box (plane + area only).
    PlanarPatch {
        origin: Point,
        normal: Point,
        area: f64,
    },
}

impl Carrier {
    pub fn measure(&self) -> f64 {
        match self {
            Carrier::Segment { a, b } => ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt(),
            Carrier::Arc { r, th0, th1, .. } => r * (th1 - th0),
            Carrier::AxisFacet { axis, lo, hi, .. } => {
                let mut m = 1.0;
                for k in 0..3 {
                    if k != *axis {
                        let w = hi[k] - lo[k];
                        if w > 0.0 {
                            m *= w;
                        }
                    }
                }
                m
            }
            Carrier::Sphere { r, .. } => 4.0 * std::f64::consts::PI * r * r,
            Carrier::PlanarPatch { area, .. } => *area,
        }
    }

    /// A point in the relative interior of the carrier.
    pub fn midpoint(&self) -> Point {
        match self {
            Carrier::Segment { a, b } => [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.0],
            Carrier::Arc { c, r, th0, th1, .. } => {
                let th = 0.5 * (th0 + th1);
                [c[0] + r * th.cos(), c[1] + r * th.sin(), 0.0]
            }
            Carrier::AxisFacet {
                axis,
                coord,
                lo,
                hi,
                ..
            } => {
                let mut p = [0.0; 3];
                for k in 0..3 {
                    p[k] = if k == *axis {
                        *coord
                    } else {
                        0.5 * (lo[k] + hi[k])
                    };
                }
                p
            }
            Carrier::Sphere { c, r, .. } => [c[0] + r, c[1], c[2]],
            Carrier::PlanarPatch { origin, .. } => *origin,
        }
    }

    /// Unit normal field evaluated at a carrier point.
    pub fn normal_at(&self, x: &Point) -> Point {
        match self {
            Carrier::Segment { a, b } => {
                let len = self.measure();
                [(b[1] - a[1]) / len, -(b[0] - a[0]) / len, 0.0]
            }
            Carrier::Arc { c, r, orient, .. } => {
                [orient * (x[0] - c[0]) / r, orient * (x[1] - c[1]) / r, 0.0]
            }
            Carrier::AxisFacet { axis, orient, .. } => {
                let mut n = [0.0; 3];
                n[*axis] = *orient;
                n
            }
            Carrier::Sphere { c, r, orient } => [
                orient * (x[0] - c[0]) / r,
                orient * (x[1] - c[1]) / r,
                orient * (x[2] - c[2]) / r,
            ],
            Carrier::PlanarPatch { normal, .. } => *normal,
        }
    }

    fn flipped(&self) -> Carrier {
        match self {
            Carrier::Segment { a, b } => Carrier::Segment { a: *b, b: *a },
            Carrier::Arc {
                c,
                r,
                th0,
                th1,
                orient,
            } => Carrier::Arc {
                c: *c,
                r: *r,
                th0: *th0,
                th1: *th1,
                orient: -orient,
            },
            Carrier::AxisFacet {
                axis,
                coord,
                lo,
                hi,
                orient,
            } => Carrier::AxisFacet {
                axis: *axis,
                coord: *coord,
                lo: *lo,
                hi: *hi,
                orient: -orient,
            },
            Carrier::Sphere { c, r, orient } => Carrier::Sphere {
                c: *c,
                r: *r,
                orient: -orient,
            },
            Carrier::PlanarPatch {
                origin,
                normal,
                area,
            } => Carrier::PlanarPatch {
                origin: *origin,
                normal: [-normal[0], -normal[1], -normal[2]],
                area: *area,
            },
        }
    }
}

/// A maximal piece of a jump set: carrier geometry, representative unit
/// normal (pointing from the u^- side to the u^+ side), one-sided values,
/// and (d-1)-measure.
#[derive(Clone, Debug)]
pub struct JumpFacet {
    pub carrier: Carrier,
    pub normal: Point,
    pub plus: f64,
    pub minus: f64,
    pub measure: f64,
}

impl JumpFacet {
    pub fn jump(&self) -> f64 {
        self.plus - self.minus
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exactness {
    Exact,
    Rejected,
}

/// Result of the L^2-jump product pairing.
#[derive(Clone, Debug)]
pub struct JumpProductResult {
    pub value: f64,
    /// (index into u facets, index into v facets, overlap measure, nu_u . nu_v)
    pub facet_pairs: Vec<(usize, usize, f64, f64)>,
    pub exactness: Exactness,
}

/// Decomposes the jump set of `u` into facets with constant one-sided values.
pub fn jump_facets(u: &BVFunction) -> Result<Vec<JumpFacet>> {
    if u.is_zero() {
        return Ok(vec![]);
    }
    let resolved: Vec<Resolved> = u
        .terms()
        .iter()
        .map(|(_, s)| Resolved::from_shape(s))
        .collect();
    let all_axis_boxes = resolved.iter().all(|r| matches!(r, Resolved::Box { .. }));
    if all_axis_boxes {
        return Ok(overlay_facets(u, &resolved));
    }
    match u.dim() {
        2 => arrangement_facets_2d(u, &resolved),
        3 => facets_3d_mixed(u, &resolved),
        _ => unreachable!(),
    }
}

/// L^2-jump product J(u, v), computed exactly by intersecting facet carriers.
/// J(u, u) recovers the squared-jump integral; J(1_A, 1_A) = Per(A).
pub fn jump_product(u: &BVFunction, v: &BVFunction) -> Result<JumpProductResult> {
    let fu = jump_facets(u)?;
    let fv = jump_facets(v)?;
    jump_product_of_facets(&fu, &fv)
}

pub fn jump_product_of_facets(fu: &[JumpFacet], fv: &[JumpFacet]) -> Result<JumpProductResult> {
    let mut value = 0.0;
    let mut pairs = Vec::new();
    for (i, a) in fu.iter().enumerate() {
        for (j, b) in fv.iter().enumerate() {
            if let Some((m, ndot)) = carrier_overlap(&a.carrier, &b.carrier)? {
                if m <= 0.0 {
                    continue;
                }
                value += a.jump() * b.jump() * ndot * m;
                pairs.push((i, j, m, ndot));
            }
        }
    }
    Ok(JumpProductResult {
        value,
        facet_pairs: pairs,
        exactness: Exactness::Exact,
    })
}

/// Overlap measure and pointwise normal product of two carriers; `None`
/// when the intersection has zero (d-1)-measure.
fn carrier_overlap(a: &Carrier, b: &Carrier) -> Result<Option<(f64, f64)>> {
    let tol = 1e-9;
    match (a, b) {
        (Carrier::Segment { a: a1, b: b1 }, Carrier::Segment { a: a2, b: b2 }) => {
            let d1 = [b1[0] - a1[0], b1[1] - a1[1]];
            let d2 = [b2[0] - a2[0], b2[1] - a2[1]];
            let l1 = (d1[0] * d1[0] + d1[1] * d1[1]).sqrt();
            let l2 = (d2[0] * d2[0] + d2[1] * d2[1]).sqrt();
            let u1 = [d1[0] / l1, d1[1] / l1];
            let u2 = [d2[0] / l2, d2[1] / l2];
            let cross = u1[0] * u2[1] - u1[1] * u2[0];
            let off = [a2[0] - a1[0], a2[1] - a1[1]];
            let offcross = u1[0] * off[1] - u1[1] * off[0];
            if cross.abs() > tol || offcross.abs() > tol * l1.max(1.0) {
                return Ok(None); // not collinear: finite intersection
            }
            let s0 = u1[0] * (a2[0] - a1[0]) + u1[1] * (a2[1] - a1[1]);
            let s1 = u1[0] * (b2[0] - a1[0]) + u1[1] * (b2[1] - a1[1]);
            let (s0, s1) = (s0.min(s1), s0.max(s1));
            let len = l1.min(s1) - 0.0f64.max(s0);
            if len <= tol {
                return Ok(None);
            }
            let mid = a.midpoint();
            let na = a.normal_at(&mid);
            let nb = b.normal_at(&mid);
            Ok(Some((len, na[0] * nb[0] + na[1] * nb[1])))
        }
        (
            Carrier::Arc {
                c: c1,
                r: r1,
                th0: t10,
                th1: t11,
                orient: o1,
            },
            Carrier::Arc {
                c: c2,
                r: r2,
                th0: t20,
                th1: t21,
                orient: o2,
            },
        ) => {
            let dc = ((c1[0] - c2[0]).powi(2) + (c1[1] - c2[1]).powi(2)).sqrt();
            if dc > tol || (r1 - r2).abs() > tol {
                return Ok(None); // distinct circles meet in finitely many points
            }
            let two_pi = 2.0 * std::f64::consts::PI;
            let mut total = 0.0;
            for shift in [-two_pi, 0.0, two_pi] {
                let lo = (t20 + shift).max(*t10);
                let hi = (t21 + shift).min(*t11);
                if hi > lo {
                    total += hi - lo;
                }
            }
            if total * r1 <= tol {
                return Ok(None);
            }
            Ok(Some((total * r1, o1 * o2)))
        }
        (
            Carrier::AxisFacet {
                axis: ax1,
                coord: c1,
                lo: l1,
                hi: h1,
                orient: o1,
            },
            Carrier::AxisFacet {
                axis: ax2,
                coord: c2,
                lo: l2,
                hi: h2,
                orient: o2,
            },
        ) => {
            if ax1 != ax2 || (c1 - c2).abs() > tol {
                return Ok(None);
            }
            let mut m = 1.0;
            for k in 0..3 {
                if k == *ax1 {
                    continue;
                }
                let w = h1[k].min(h2[k]) - l1[k].max(l2[k]);
                if w <= tol {
                    return Ok(None);
                }
                m *= w;
            }
            Ok(Some((m, o1 * o2)))
        }
        (
            Carrier::Sphere {
                c: c1,
                r: r1,
                orient: o1,
            },
            Carrier::Sphere {
                c: c2,
                r: r2,
                orient: o2,
            },
        ) => {
            let dc = crate::vec::dist(c1, c2, 3);
            if dc > tol || (r1 - r2).abs() > tol {
                return Ok(None);
            }
            Ok(Some((4.0 * std::f64::consts::PI * r1 * r1, o1 * o2)))
        }
        (Carrier::PlanarPatch { .. }, _) | (_, Carrier::PlanarPatch { .. }) => {
            let (na, pa) = (a.normal_at(&a.midpoint()), a.midpoint());
            let (nb, pb) = (b.normal_at(&b.midpoint()), b.midpoint());
            let ndot = crate::vec::dot(&na, &nb, 3);
            if ndot.abs() < 1.0 - 1e-9 {
                return Ok(None); // planes cross in a line
            }
            let gap = crate::vec::dot(&crate::vec::sub(&pb, &pa), &na, 3).abs();
            if gap > tol {
                return Ok(None); // parallel distinct planes
            }
            Err(Error::OverlapNotRepresentable(
                "coplanar oblique patches overlap; patch-patch intersection is not \
                 expressible as shared facets"
                    .into(),
            ))
        }
        // mixed straight/curved carriers meet in finitely many points
        _ => Ok(None),
    }
}

fn weight_scale(u: &BVFunction) -> f64 {
    u.terms()
        .iter()
        .map(|(w, _)| w.abs())
        .fold(1.0f64, f64::max)
}

/// Normalizes orientation (nu toward the larger one-sided value) and drops
/// zero-jump and sliver facets.
fn push_facet(
    carrier: Carrier,
    plus: f64,
    minus: f64,
    jump_tol: f64,
    diam: f64,
    out: &mut Vec<JumpFacet>,
) {
    let measure = carrier.measure();
    if (plus - minus).abs() <= jump_tol || measure < SLIVER_REL * diam {
        return;
    }
    let (carrier, plus, minus) = if plus >= minus {
        (carrier, plus, minus)
    } else {
        (carrier.flipped(), minus, plus)
    };
    let mid = carrier.midpoint();
    let normal = carrier.normal_at(&mid);
    out.push(JumpFacet {
        carrier,
        normal,
        plus,
        minus,
        measure,
    });
}

// ---------------------------------------------------------------------------
// axis-box overlay
// ---------------------------------------------------------------------------

/// Coordinate-sweep overlay of a finite union of axis boxes: the grid of all
/// box coordinates, with the summed weight constant on every open cell.
pub(crate) struct BoxOverlay {
    pub d: usize,
    pub cuts: Vec<Vec<f64>>,
    pub dims: Vec<usize>,
    pub values: Vec<f64>,
}

impl BoxOverlay {
    pub fn build(u: &BVFunction, resolved: &[Resolved]) -> BoxOverlay {
        let d = u.dim();
        let diam = u.diameter().max(1.0);
        let mut cuts: Vec<Vec<f64>> = vec![Vec::new(); d];
        for r in resolved {
            if let Resolved::Box { lo, hi, .. } = r {
                for k in 0..d {
                    cuts[k].push(lo[k]);
                    cuts[k].push(hi[k]);
                }
            }
        }
        for c in cuts.iter_mut() {
            c.sort_by(f64::total_cmp);
            c.dedup_by(|a, b| (*a - *b).abs() < SLIVER_REL * diam);
        }
        let dims: Vec<usize> = cuts.iter().map(|c| c.len().saturating_sub(1)).collect();
        let ncells: usize = dims.iter().product();
        let mut values = vec![0.0; ncells];
        let weights: Vec<f64> = u.terms().iter().map(|(w, _)| *w).collect();
        for (idx, val) in values.iter_mut().enumerate() {
            let mut rem = idx;
            let mut center = [0.0; 3];
            for k in 0..d {
                let i = rem % dims[k];
                rem /= dims[k];
                center[k] = 0.5 * (cuts[k][i] + cuts[k][i + 1]);
            }
            let mut v = 0.0;
            for (r, w) in resolved.iter().zip(&weights) {
                if let Resolved::Box { lo, hi, .. } = r {
                    if (0..d).all(|k| center[k] > lo[k] && center[k] < hi[k]) {
                        v += w;
                    }
                }
            }
            *val = v;
        }
        BoxOverlay {
            d,
            cuts,
            dims,
            values,
        }
    }

    #[inline]
    pub fn cell_value(&self, idx: &[usize]) -> f64 {
        let mut flat = 0;
        let mut stride = 1;
        for k in 0..self.d {
            flat += idx[k] * stride;
            stride *= self.dims[k];
        }
        self.values[flat]
    }

    pub fn cell_volume(&self, idx: &[usize]) -> f64 {
        let mut v = 1.0;
        for k in 0..self.d {
            v *= self.cuts[k][idx[k] + 1] - self.cuts[k][idx[k]];
        }
        v
    }

    pub fn cells(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let dims = self.dims.clone();
        let n: usize = dims.iter().product();
        (0..n).map(move |mut rem| {
            let mut idx = vec![0usize; dims.len()];
            for (k, d) in dims.iter().enumerate() {
                idx[k] = rem % d;
                rem /= d;
            }
            idx
        })
    }
}

fn overlay_facets(u: &BVFunction, resolved: &[Resolved]) -> Vec<JumpFacet> {
    let ov = BoxOverlay::build(u, resolved);
    let d = ov.d;
    let diam = u.diameter().max(1.0);
    let jump_tol = 1e-12 * weight_scale(u);
    let mut out = Vec::new();
    for axis in 0..d {
        let cross: Vec<usize> = (0..d).filter(|k| *k != axis).collect();
        for p in 0..=ov.dims[axis] {
            let coord = ov.cuts[axis][p];
            // collect jump pieces on this plane, keyed by cross-cell indices
            // (row-major in `cross` order)
            let value_at = |idx_cross: &[usize], cell: isize| -> f64 {
                if cell < 0 || cell as usize >= ov.dims[axis] {
                    return 0.0;
                }
                let mut idx = vec![0usize; d];
                idx[axis] = cell as usize;
                for (k, ca) in cross.iter().enumerate() {
                    idx[*ca] = idx_cross[k];
                }
                ov.cell_value(&idx)
            };
            if d == 2 {
                let ax0 = cross[0];
                // merge contiguous equal-jump intervals along ax0
                let mut run: Option<(usize, usize, f64, f64)> = None; // [i0, i1), plus, minus
                for i in 0..=ov.dims[ax0] {
                    let vals = if i < ov.dims[ax0] {
                        let right = value_at(&[i], p as isize);
                        let left = value_at(&[i], p as isize - 1);
                        Some((right, left))
                    } else {
                        None
                    };
                    let extend = match (&run, &vals) {
                        (Some((_, _, rp, rm)), Some((vp, vm))) => {
                            (rp - vp).abs() < 1e-12 && (rm - vm).abs() < 1e-12
                        }
                        _ => false,
                    };
                    if extend {
                        run.as_mut().unwrap().1 = i + 1;
                        continue;
                    }
                    if let Some((i0, i1, plus, minus)) = run.take() {
                        if (plus - minus).abs() > jump_tol {
                            let (s, e) = (ov.cuts[ax0][i0], ov.cuts[ax0][i1]);
                            // orient the segment so its normal is +e_axis
                            let (a, b) = if axis == 0 {
                                ([coord, s], [coord, e])
                            } else {
                                ([e, coord], [s, coord])
                            };
                            push_facet(
                                Carrier::Segment { a, b },
                                plus,
                                minus,
                                jump_tol,
                                diam,
                                &mut out,
                            );
                        }
                    }
                    if let Some((vp, vm)) = vals {
                        if (vp - vm).abs() > jump_tol {
                            run = Some((i, i + 1, vp, vm));
                        }
                    }
                }
            } else {
                // d == 3: merge runs along cross[0] within each cross[1] row
                let (ax0, ax1) = (cross[0], cross[1]);
                for j in 0..ov.dims[ax1] {
                    let mut run: Option<(usize, usize, f64, f64)> = None;
                    for i in 0..=ov.dims[ax0] {
                        let vals = if i < ov.dims[ax0] {
                            let right = value_at(&[i, j], p as isize);
                            let left = value_at(&[i, j], p as isize - 1);
                            Some((right, left))
                        } else {
                            None
                        };
                        let extend = match (&run, &vals) {
                            (Some((_, _, rp, rm)), Some((vp, vm))) => {
                                (rp - vp).abs() < 1e-12 && (rm - vm).abs() < 1e-12
                            }
                            _ => false,
                        };
                        if extend {
                            run.as_mut().unwrap().1 = i + 1;
                            continue;
                        }
                        if let Some((i0, i1, plus, minus)) = run.take() {
                            if (plus - minus).abs() > jump_tol {
                                let mut lo = [0.0; 3];
                                let mut hi = [0.0; 3];
                                lo[axis] = coord;
                                hi[axis] = coord;
                                lo[ax0] = ov.cuts[ax0][i0];
                                hi[ax0] = ov.cuts[ax0][i1];
                                lo[ax1] = ov.cuts[ax1][j];
                                hi[ax1] = ov.cuts[ax1][j + 1];
                                push_facet(
                                    Carrier::AxisFacet {
                                        axis,
                                        coord,
                                        lo,
                                        hi,
                                        orient: 1.0,
                                    },
                                    plus,
                                    minus,
                                    jump_tol,
                                    diam,
                                    &mut out,
                                );
                            }
                        }
                        if let Some((vp, vm)) = vals {
                            if (vp - vm).abs() > jump_tol {
                                run = Some((i, i + 1, vp, vm));
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// 2D boundary arrangement
// ---------------------------------------------------------------------------

struct SegElement {
    a: [f64; 2],
    b: [f64; 2],
    /// (term index, outward normal of that term along this piece)
    owners: Vec<(usize, [f64; 2])>,
}

struct CircleElement {
    c: [f64; 2],
    r: f64,
    /// (term index, +1 if the term's outward normal is radially outward)
    owners: Vec<(usize, f64)>,
    cut_angles: Vec<f64>,
}

fn arrangement_facets_2d(u: &BVFunction, resolved: &[Resolved]) -> Result<Vec<JumpFacet>> {
    let diam = u.diameter().max(1.0);
    let tol = 1e-9 * diam;
    let jump_tol = 1e-12 * weight_scale(u);

    let mut segs: Vec<SegElement> = Vec::new();
    let mut circles: Vec<CircleElement> = Vec::new();
    for (i, r) in resolved.iter().enumerate() {
        let poly = match r {
            Resolved::Poly2 { verts } => Some(verts.clone()),
            Resolved::Box { lo, hi, .. } => Some(vec![
                [lo[0], lo[1]],
                [hi[0], lo[1]],
                [hi[0], hi[1]],
                [lo[0], hi[1]],
            ]),
            Resolved::Ball { c, r, .. } => {
                let mut found = false;
                for ce in circles.iter_mut() {
                    if ((ce.c[0] - c[0]).powi(2) + (ce.c[1] - c[1]).powi(2)).sqrt() < tol
                        && (ce.r - r).abs() < tol
                    {
                        ce.owners.push((i, 1.0));
                        found = true;
                        break;
                    }
                }
                if !found {
                    circles.push(CircleElement {
                        c: [c[0], c[1]],
                        r: *r,
                        owners: vec![(i, 1.0)],
                        cut_angles: vec![],
                    });
                }
                None
            }
            Resolved::RotBox3 { .. } => unreachable!("3d shape in 2d arrangement"),
        };
        if let Some(verts) = poly {
            let n = verts.len();
            for k in 0..n {
                let a = verts[k];
                let b = verts[(k + 1) % n];
                let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
                let outward = [(b[1] - a[1]) / len, -(b[0] - a[0]) / len];
                segs.push(SegElement {
                    a,
                    b,
                    owners: vec![(i, outward)],
                });
            }
        }
    }

    // segment split parameters from crossings, T-junctions, collinear
    // overlaps, and circle intersections
    let nsegs = segs.len();
    let mut seg_cuts: Vec<Vec<f64>> = vec![Vec::new(); nsegs];
    for i in 0..nsegs {
        for j in 0..nsegs {
            if i != j {
                segment_cut_params(&segs[i], &segs[j], tol, &mut seg_cuts[i]);
            }
        }
    }
    for ce in circles.iter_mut() {
        for (i, s) in segs.iter().enumerate() {
            segment_circle_cuts(s, ce, &mut seg_cuts[i]);
        }
    }
    let nc = circles.len();
    for i in 0..nc {
        for j in 0..nc {
            if i == j {
                continue;
            }
            let (ci, cj) = (circles[i].c, circles[j].c);
            let (ri, rj) = (circles[i].r, circles[j].r);
            let d = ((ci[0] - cj[0]).powi(2) + (ci[1] - cj[1]).powi(2)).sqrt();
            if d > ri + rj - tol || d < (ri - rj).abs() + tol || d < tol {
                continue;
            }
            let alpha = ((ri * ri + d * d - rj * rj) / (2.0 * ri * d))
                .clamp(-1.0, 1.0)
                .acos();
            let base = (cj[1] - ci[1]).atan2(cj[0] - ci[0]);
            circles[i].cut_angles.push(normalize_angle(base + alpha));
            circles[i].cut_angles.push(normalize_angle(base - alpha));
        }
    }

    // split segments and merge coincident pieces across shapes
    let mut pieces: Vec<SegElement> = Vec::new();
    for (i, s) in segs.iter().enumerate() {
        let mut ts = seg_cuts[i].clone();
        ts.push(0.0);
        ts.push(1.0);
        ts.sort_by(f64::total_cmp);
        ts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        for w in ts.windows(2) {
            let (t0, t1) = (w[0], w[1]);
            let a = [
                s.a[0] + t0 * (s.b[0] - s.a[0]),
                s.a[1] + t0 * (s.b[1] - s.a[1]),
            ];
            let b = [
                s.a[0] + t1 * (s.b[0] - s.a[0]),
                s.a[1] + t1 * (s.b[1] - s.a[1]),
            ];
            let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
            if len < SLIVER_REL * diam {
                continue;
            }
            pieces.push(SegElement {
                a,
                b,
                owners: s.owners.clone(),
            });
        }
    }
    let mut merged: Vec<SegElement> = Vec::new();
    'outer: for p in pieces {
        for q in merged.iter_mut() {
            let fwd = pt_eq(&p.a, &q.a, tol) && pt_eq(&p.b, &q.b, tol);
            let rev = pt_eq(&p.a, &q.b, tol) && pt_eq(&p.b, &q.a, tol);
            if fwd || rev {
                q.owners.extend(p.owners.iter().cloned());
                continue 'outer;
            }
        }
        merged.push(p);
    }

    let mut out: Vec<JumpFacet> = Vec::new();
    for p in &merged {
        let carrier = Carrier::Segment { a: p.a, b: p.b };
        let mid = carrier.midpoint();
        let nu = carrier.normal_at(&mid);
        let (plus, minus) = one_sided_values(u, &mid, &nu, &p.owners, diam)?;
        push_facet(carrier, plus, minus, jump_tol, diam, &mut out);
    }
    for ce in &circles {
        let mut angles = ce.cut_angles.clone();
        angles.retain(|a| a.is_finite());
        angles.sort_by(f64::total_cmp);
        angles.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let spans: Vec<(f64, f64)> = if angles.is_empty() {
            vec![(0.0, 2.0 * std::f64::consts::PI)]
        } else {
            let mut v = Vec::new();
            for k in 0..angles.len() {
                let a0 = angles[k];
                let a1 = if k + 1 < angles.len() {
                    angles[k + 1]
                } else {
                    angles[0] + 2.0 * std::f64::consts::PI
                };
                if a1 - a0 > 1e-12 {
                    v.push((a0, a1));
                }
            }
            v
        };
        for (a0, a1) in spans {
            let carrier = Carrier::Arc {
                c: ce.c,
                r: ce.r,
                th0: a0,
                th1: a1,
                orient: 1.0,
            };
            if carrier.measure() < SLIVER_REL * diam {
                continue;
            }
            let mid = carrier.midpoint();
            let nu = carrier.normal_at(&mid);
            // owner normals for a circle: orientation times radial-out
            let radial_owners: Vec<(usize, [f64; 2])> = ce
                .owners
                .iter()
                .map(|(i, o)| (*i, [o * nu[0], o * nu[1]]))
                .collect();
            let (plus, minus) = one_sided_values(u, &mid, &nu, &radial_owners, diam)?;
            push_facet(carrier, plus, minus, jump_tol, diam, &mut out);
        }
    }
    Ok(out)
}

/// One-sided values of u at x0 across nu. `owners` lists terms whose
/// boundary carries this piece together with their outward normals there;
/// every other term is sampled with probe points just off the carrier.
fn one_sided_values(
    u: &BVFunction,
    x0: &Point,
    nu: &Point,
    owners: &[(usize, [f64; 2])],
    diam: f64,
) -> Result<(f64, f64)> {
    let mut plus = 0.0;
    let mut minus = 0.0;
    let eps = 1e-7 * diam;
    let pp = [x0[0] + eps * nu[0], x0[1] + eps * nu[1], 0.0];
    let pm = [x0[0] - eps * nu[0], x0[1] - eps * nu[1], 0.0];
    for (i, (w, shape)) in u.terms().iter().enumerate() {
        if let Some((_, outward)) = owners.iter().find(|(j, _)| *j == i) {
            let align = outward[0] * nu[0] + outward[1] * nu[1];
            if align.abs() < 0.5 {
                return Err(Error::OverlapNotRepresentable(format!(
                    "term {i} boundary is not consistently oriented along a shared facet"
                )));
            }
            // outward pointing along +nu means the shape lies on the minus side
            if align > 0.0 {
                minus += w;
            } else {
                plus += w;
            }
        } else {
            if shape.contains(&pp) {
                plus += w;
            }
            if shape.contains(&pm) {
                minus += w;
            }
        }
    }
    Ok((plus, minus))
}

fn pt_eq(a: &[f64; 2], b: &[f64; 2], tol: f64) -> bool {
    (a[0] - b[0]).abs() < tol && (a[1] - b[1]).abs() < tol
}

fn normalize_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut a = a % two_pi;
    if a < 0.0 {
        a += two_pi;
    }
    a
}

/// Appends parameters in (0,1) where segment `s` must be cut because the
/// closure of segment `t` meets its interior.
fn segment_cut_params(s: &SegElement, t: &SegElement, tol: f64, cuts: &mut Vec<f64>) {
    let d1 = [s.b[0] - s.a[0], s.b[1] - s.a[1]];
    let d2 = [t.b[0] - t.a[0], t.b[1] - t.a[1]];
    let l1 = (d1[0] * d1[0] + d1[1] * d1[1]).sqrt();
    let l2 = (d2[0] * d2[0] + d2[1] * d2[1]).sqrt();
    let denom = d1[0] * d2[1] - d1[1] * d2[0];
    let off = [t.a[0] - s.a[0], t.a[1] - s.a[1]];
    if denom.abs() < 1e-12 * l1 * l2 {
        // parallel; collinear overlap contributes projections of t's endpoints
        let crossoff = d1[0] * off[1] - d1[1] * off[0];
        if crossoff.abs() > tol * l1 {
            return;
        }
        let len2 = d1[0] * d1[0] + d1[1] * d1[1];
        for p in [t.a, t.b] {
            let tt = ((p[0] - s.a[0]) * d1[0] + (p[1] - s.a[1]) * d1[1]) / len2;
            if tt > 1e-9 && tt < 1.0 - 1e-9 {
                cuts.push(tt);
            }
        }
    } else {
        let tpar = (off[0] * d2[1] - off[1] * d2[0]) / denom;
        let spar = (off[0] * d1[1] - off[1] * d1[0]) / denom;
        if tpar > 1e-9 && tpar < 1.0 - 1e-9 && (-1e-9..=1.0 + 1e-9).contains(&spar) {
            cuts.push(tpar);
        }
    }
}

/// Cuts where a circle crosses a segment: parameters on the segment and
/// angles on the circle.
fn segment_circle_cuts(s: &SegElement, ce: &mut CircleElement, cuts: &mut Vec<f64>) {
    let d = [s.b[0] - s.a[0], s.b[1] - s.a[1]];
    let f = [s.a[0] - ce.c[0], s.a[1] - ce.c[1]];
    let qa = d[0] * d[0] + d[1] * d[1];
    let qb = 2.0 * (f[0] * d[0] + f[1] * d[1]);
    let qc = f[0] * f[0] + f[1] * f[1] - ce.r * ce.r;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc <= 0.0 {
        return;
    }
    let sq = disc.sqrt();
    for t in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
        if t > -1e-9 && t < 1.0 + 1e-9 {
            if t > 1e-9 && t < 1.0 - 1e-9 {
                cuts.push(t);
            }
            let p = [s.a[0] + t * d[0], s.a[1] + t * d[1]];
            ce.cut_angles
                .push(normalize_angle((p[1] - ce.c[1]).atan2(p[0] - ce.c[0])));
        }
    }
}

// ---------------------------------------------------------------------------
// 3D: axis boxes plus isolated spheres / rotated boxes
// ---------------------------------------------------------------------------

fn facets_3d_mixed(u: &BVFunction, resolved: &[Resolved]) -> Result<Vec<JumpFacet>> {
    let mut box_terms = Vec::new();
    let mut box_resolved = Vec::new();
    let mut other: Vec<(usize, &Resolved)> = Vec::new();
    for (i, r) in resolved.iter().enumerate() {
        match r {
            Resolved::Box { .. } => {
                box_terms.push(u.terms()[i].clone());
                box_resolved.push(r.clone());
            }
            _ => other.push((i, r)),
        }
    }
    // every non-box boundary must avoid every other boundary
    for (i, r) in other.iter() {
        match r {
            Resolved::Ball { c, r: rad, .. } => {
                for (j, s) in resolved.iter().enumerate() {
                    if j != *i && sphere_boundary_meets(c, *rad, s) {
                        return Err(Error::OverlapNotRepresentable(format!(
                            "sphere boundary of term {i} intersects the boundary of term {j}; \
                             spherical facet splitting is not supported in d = 3"
                        )));
                    }
                }
            }
            Resolved::RotBox3 { .. } => {
                if resolved.len() > 1 {
                    return Err(Error::OverlapNotRepresentable(format!(
                        "rotated 3d box (term {i}) must be the only term"
                    )));
                }
            }
            _ => unreachable!(),
        }
    }

    let diam = u.diameter().max(1.0);
    let jump_tol = 1e-12 * weight_scale(u);
    let mut out = Vec::new();
    if !box_terms.is_empty() {
        let ub = BVFunction::new(3, box_terms)?;
        let mut facets = overlay_facets(&ub, &box_resolved);
        // shift one-sided values by enclosing non-box terms (their boundaries
        // stay clear of the box facets, so the shift is constant per facet)
        for f in facets.iter_mut() {
            let mid = f.carrier.midpoint();
            let mut shift = 0.0;
            for (i, _) in &other {
                let (w, s) = &u.terms()[*i];
                if s.contains(&mid) {
                    shift += w;
                }
            }
            f.plus += shift;
            f.minus += shift;
        }
        out.extend(facets);
    }
    for (i, r) in &other {
        match r {
            Resolved::Ball { c, r: rad, .. } => {
                let probe_out = [c[0] + rad * (1.0 + 1e-7), c[1], c[2]];
                let probe_in = [c[0] + rad * (1.0 - 1e-7), c[1], c[2]];
                let mut plus = 0.0;
                let mut minus = 0.0;
                for (j, (wj, sj)) in u.terms().iter().enumerate() {
                    if j == *i {
                        minus += wj;
                        continue;
                    }
                    if sj.contains(&probe_out) {
                        plus += wj;
                    }
                    if sj.contains(&probe_in) {
                        minus += wj;
                    }
                }
                push_facet(
                    Carrier::Sphere {
                        c: *c,
                        r: *rad,
                        orient: 1.0,
                    },
                    plus,
                    minus,
                    jump_tol,
                    diam,
                    &mut out,
                );
            }
            Resolved::RotBox3 { center, axes, half } => {
                let w = u.terms()[*i].0;
                for k in 0..3 {
                    let others: Vec<usize> = (0..3).filter(|m| *m != k).collect();
                    let area = 4.0 * half[others[0]] * half[others[1]];
                    for sgn in [-1.0f64, 1.0] {
                        let normal = [sgn * axes[k][0], sgn * axes[k][1], sgn * axes[k][2]];
                        let origin = [
                            center[0] + sgn * half[k] * axes[k][0],
                            center[1] + sgn * half[k] * axes[k][1],
                            center[2] + sgn * half[k] * axes[k][2],
                        ];
                        push_facet(
                            Carrier::PlanarPatch {
                                origin,
                                normal,
                                area,
                            },
                            0.0,
                            w,
                            jump_tol,
                            diam,
                            &mut out,
                        );
                    }
                }
            }
            _ => unreachable!(),
        }
    }
    Ok(out)
}

/// Whether the sphere |x - c| = rad meets the boundary of `other`.
fn sphere_boundary_meets(c: &Point, rad: f64, other: &Resolved) -> bool {
    match other {
        Resolved::Ball { c: c2, r: r2, .. } => {
            let d = crate::vec::dist(c, c2, 3);
            d < rad + r2 + 1e-12 && d > (rad - r2).abs() - 1e-12
        }
        Resolved::Box { lo, hi, .. } => {
            let mut near2 = 0.0;
            let mut far2 = 0.0;
            for k in 0..3 {
                let n = (lo[k] - c[k]).max(c[k] - hi[k]).max(0.0);
                near2 += n * n;
                let f = (c[k] - lo[k]).abs().max((hi[k] - c[k]).abs());
                far2 += f * f;
            }
            if far2.sqrt() < rad - 1e-12 {
                return false; // box strictly inside the ball
            }
            if near2.sqrt() > rad + 1e-12 {
                return false; // box strictly outside
            }
            // unless the ball sits strictly inside the open box, they meet
            !(0..3).all(|k| c[k] - rad > lo[k] + 1e-12 && c[k] + rad < hi[k] - 1e-12)
        }
        _ => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shape::Shape;

    fn boxes(specs: &[(f64, [f64; 4])]) -> BVFunction {
        BVFunction::new(
            2,
            specs
                .iter()
                .map(|(w, b)| {
                    (
                        *w,
                        Shape::axis_box(2, &[b[0], b[1]], &[b[2], b[3]]).unwrap(),
                    )
                })
                .collect(),
        )
        .unwrap()
    }

    fn total_length(facets: &[JumpFacet]) -> f64 {
        facets.iter().map(|f| f.measure).sum()
    }

    fn total_variation(facets: &[JumpFacet]) -> f64 {
        facets.iter().map(|f| f.jump().abs() * f.measure).sum()
    }

    #[test]
    fn unit_square_facets() {
        let u = BVFunction::indicator(Shape::unit_square());
        let f = jump_facets(&u).unwrap();
        assert_eq!(f.len(), 4);
        assert!((total_length(&f) - 4.0).abs() < 1e-12);
        for facet in &f {
            assert!((facet.jump() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn shared_edge_cancels() {
        // two adjacent unit squares with equal value: interior edge dropped
        let u = boxes(&[(1.0, [0.0, 0.0, 1.0, 1.0]), (1.0, [1.0, 0.0, 2.0, 1.0])]);
        let f = jump_facets(&u).unwrap();
        assert!((total_length(&f) - 6.0).abs() < 1e-12);
        assert!(f
            .iter()
            .all(|fc| (fc.jump().abs() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn nested_squares_decomposition() {
        // u = 1_{[0,2]^2} + 1_{[0,1]^2}
        let u = boxes(&[(1.0, [0.0, 0.0, 2.0, 2.0]), (1.0, [0.0, 0.0, 1.0, 1.0])]);
        let f = jump_facets(&u).unwrap();
        let len_jump2: f64 = f
            .iter()
            .filter(|fc| (fc.jump().abs() - 2.0).abs() < 1e-12)
            .map(|fc| fc.measure)
            .sum();
        let len_jump1: f64 = f
            .iter()
            .filter(|fc| (fc.jump().abs() - 1.0).abs() < 1e-12)
            .map(|fc| fc.measure)
            .sum();
        assert!((len_jump2 - 2.0).abs() < 1e-12, "len2 = {len_jump2}");
        assert!((len_jump1 - 8.0).abs() < 1e-12, "len1 = {len_jump1}");
        assert!((total_variation(&f) - 12.0).abs() < 1e-12);
    }

    #[test]
    fn jump_products_match_closed_forms() {
        let sq = BVFunction::indicator(Shape::unit_square());
        assert!((jump_product(&sq, &sq).unwrap().value - 4.0).abs() < 1e-12);
        // adjacent squares: shared edge length 1 with opposite normals
        let right =
            BVFunction::indicator(Shape::axis_box(2, &[1.0, 0.0], &[2.0, 1.0]).unwrap());
        assert!((jump_product(&sq, &right).unwrap().value + 1.0).abs() < 1e-12);
        // nested example
        let u = boxes(&[(1.0, [0.0, 0.0, 2.0, 2.0]), (1.0, [0.0, 0.0, 1.0, 1.0])]);
        assert!((jump_product(&u, &u).unwrap().value - 16.0).abs() < 1e-12);
    }

    #[test]
    fn disk_facets_and_perimeter() {
        let u = BVFunction::indicator(Shape::unit_disk());
        let f = jump_facets(&u).unwrap();
        assert_eq!(f.len(), 1);
        assert!((total_length(&f) - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        let j = jump_product(&u, &u).unwrap().value;
        assert!((j - 2.0 * std::f64::consts::PI).abs() < 1e-10);
    }

    #[test]
    fn disk_in_square_arrangement() {
        // disk strictly inside a square: boundary pieces stay whole
        let sq = Shape::square(4.0);
        let disk = Shape::ball(2, &[2.0, 2.0], 1.0).unwrap();
        let u = BVFunction::new(2, vec![(1.0, sq), (2.0, disk)]).unwrap();
        let f = jump_facets(&u).unwrap();
        // square boundary: jump 1 (0 -> 1), circle: jump 2 (1 -> 3)
        let sq_tv: f64 = f
            .iter()
            .filter(|fc| matches!(fc.carrier, Carrier::Segment { .. }))
            .map(|fc| fc.jump().abs() * fc.measure)
            .sum();
        let circ_tv: f64 = f
            .iter()
            .filter(|fc| matches!(fc.carrier, Carrier::Arc { .. }))
            .map(|fc| fc.jump().abs() * fc.measure)
            .sum();
        assert!((sq_tv - 16.0).abs() < 1e-10);
        assert!((circ_tv - 2.0 * 2.0 * std::f64::consts::PI).abs() < 1e-10);
    }

    #[test]
    fn crossing_disks_split_into_arcs() {
        let a = Shape::ball(2, &[0.0, 0.0], 1.0).unwrap();
        let b = Shape::ball(2, &[1.0, 0.0], 1.0).unwrap();
        let u = BVFunction::new(2, vec![(1.0, a), (1.0, b)]).unwrap();
        let f = jump_facets(&u).unwrap();
        // every facet is an arc with jump 1 (outer) -- overlap arcs jump from
        // 1 to 2 across each circle, outer arcs 0 to 1; all jumps are 1
        assert!(f.iter().all(|fc| (fc.jump().abs() - 1.0).abs() < 1e-12));
        assert!((total_length(&f) - 4.0 * std::f64::consts::PI).abs() < 1e-9);
        // J(u,u) = total squared-jump length = full two circles
        let j = jump_product(&u, &u).unwrap().value;
        assert!((j - 4.0 * std::f64::consts::PI).abs() < 1e-9);
    }

    #[test]
    fn box_3d_overlay() {
        let u = BVFunction::indicator(
            Shape::axis_box(3, &[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0]).unwrap(),
        );
        let f = jump_facets(&u).unwrap();
        assert_eq!(f.len(), 6);
        assert!((total_length(&f) - 6.0).abs() < 1e-12);
        let j = jump_product(&u, &u).unwrap().value;
        assert!((j - 6.0).abs() < 1e-12);
    }

    #[test]
    fn sphere_and_disjoint_box_3d() {
        let ball = Shape::ball(3, &[5.0, 0.0, 0.0], 1.0).unwrap();
        let cube = Shape::axis_box(3, &[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0]).unwrap();
        let u = BVFunction::new(3, vec![(1.0, cube.clone()), (2.0, ball)]).unwrap();
        let f = jump_facets(&u).unwrap();
        let tv = total_variation(&f);
        let expect = 6.0 + 2.0 * 4.0 * std::f64::consts::PI;
        assert!((tv - expect).abs() < 1e-9, "tv = {tv}");
        // crossing sphere boundary is rejected (radius reaches past the
        // faces but not the corners)
        let ball2 = Shape::ball(3, &[0.5, 0.5, 0.5], 0.7).unwrap();
        let v = BVFunction::new(3, vec![(1.0, cube), (1.0, ball2)]).unwrap();
        assert!(matches!(
            jump_facets(&v),
            Err(Error::OverlapNotRepresentable(_))
        ));
    }

    #[test]
    fn t_junction_cut() {
        // big square with a half-width square on top: the shared boundary
        // portion cancels, the rest remains
        let u = boxes(&[(1.0, [0.0, 0.0, 2.0, 1.0]), (1.0, [0.0, 1.0, 1.0, 2.0])]);
        let f = jump_facets(&u).unwrap();
        // perimeter of the L-shaped union = 8
        assert!((total_length(&f) - 8.0).abs() < 1e-12);
        assert!((total_variation(&f) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn polygon_box_shared_edge_via_arrangement() {
        // triangle glued to the right edge of the unit square, as polygons
        let sq = Shape::polygon(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let tri = Shape::polygon(vec![[1.0, 0.0], [2.0, 0.5], [1.0, 1.0]]).unwrap();
        let u = BVFunction::new(2, vec![(1.0, sq), (1.0, tri)]).unwrap();
        let f = jump_facets(&u).unwrap();
        let expect = 3.0 + 2.0 * (1.0f64 + 0.25).sqrt();
        assert!((total_variation(&f) - expect).abs() < 1e-10);
    }
}
