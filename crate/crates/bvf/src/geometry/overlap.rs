//! Pairwise intersection measures of resolved shapes.
//!
//! Everything here is closed-form: axis boxes overlap per axis, disk pairs
//! via the lens formula, polygonal pairs by triangulated convex clipping,
//! and polygon/disk pairs by the classic signed circular-triangle
//! decomposition. These feed the L^2 inner products and the heat-content
//! cross-correlations.

use crate::error::{Error, Result};
use crate::geometry::shape::{shoelace, Shape, ShapeKind};
use crate::vec::{add, Point};

/// Shape resolved into world coordinates (rigid motion applied).
#[derive(Clone, Debug)]
pub enum Resolved {
    /// Axis-aligned box, d = 2 or 3.
    Box { d: usize, lo: Point, hi: Point },
    /// Ball, d = 2 or 3.
    Ball { d: usize, c: Point, r: f64 },
    /// Simple CCW polygon in the plane (also rotated 2D boxes).
    Poly2 { verts: Vec<[f64; 2]> },
    /// Rotated 3D box: center, orthonormal axes (columns), half-extents.
    RotBox3 {
        center: Point,
        axes: [[f64; 3]; 3],
        half: [f64; 3],
    },
}

impl Resolved {
    pub fn from_shape(s: &Shape) -> Resolved {
        let d = s.dim();
        let rot = s.rotation();
        let tau = s.translation();
        match s.kind() {
            ShapeKind::AxisBox { lo, hi } => {
                if rot.is_identity() {
                    let mut l = *tau;
                    let mut h = *tau;
                    for k in 0..d {
                        l[k] += lo[k];
                        h[k] += hi[k];
                    }
                    Resolved::Box { d, lo: l, hi: h }
                } else if d == 2 {
                    let corners = [
                        [lo[0], lo[1]],
                        [hi[0], lo[1]],
                        [hi[0], hi[1]],
                        [lo[0], hi[1]],
                    ];
                    let verts = corners
                        .iter()
                        .map(|c| {
                            let w = add(&rot.apply(&[c[0], c[1], 0.0]), tau);
                            [w[0], w[1]]
                        })
                        .collect();
                    Resolved::Poly2 { verts }
                } else {
                    let mut cc = [0.0; 3];
                    let mut half = [0.0; 3];
                    for k in 0..3 {
                        cc[k] = 0.5 * (lo[k] + hi[k]);
                        half[k] = 0.5 * (hi[k] - lo[k]);
                    }
                    let center = add(&rot.apply(&cc), tau);
                    let mut axes = [[0.0; 3]; 3];
                    for (k, axis) in axes.iter_mut().enumerate() {
                        let mut e = [0.0; 3];
                        e[k] = 1.0;
                        *axis = rot.apply(&e);
                    }
                    Resolved::RotBox3 { center, axes, half }
                }
            }
            ShapeKind::Ball { center, radius } => {
                let mut c0 = [0.0; 3];
                c0[..d].copy_from_slice(center);
                Resolved::Ball {
                    d,
                    c: add(&rot.apply(&c0), tau),
                    r: *radius,
                }
            }
            ShapeKind::Polygon { vertices } => {
                let verts = vertices
                    .iter()
                    .map(|v| {
                        let w = add(&rot.apply(&[v[0], v[1], 0.0]), tau);
                        [w[0], w[1]]
                    })
                    .collect();
                Resolved::Poly2 { verts }
            }
        }
    }

    /// Translate by z (used by heat-content cross-correlations).
    pub fn shifted(&self, z: &Point) -> Resolved {
        match self {
            Resolved::Box { d, lo, hi } => Resolved::Box {
                d: *d,
                lo: add(lo, z),
                hi: add(hi, z),
            },
            Resolved::Ball { d, c, r } => Resolved::Ball {
                d: *d,
                c: add(c, z),
                r: *r,
            },
            Resolved::Poly2 { verts } => Resolved::Poly2 {
                verts: verts.iter().map(|v| [v[0] + z[0], v[1] + z[1]]).collect(),
            },
            Resolved::RotBox3 { center, axes, half } => Resolved::RotBox3 {
                center: add(center, z),
                axes: *axes,
                half: *half,
            },
        }
    }

    fn as_poly2(&self) -> Option<Vec<[f64; 2]>> {
        match self {
            Resolved::Poly2 { verts } => Some(verts.clone()),
            Resolved::Box { d: 2, lo, hi } => Some(vec![
                [lo[0], lo[1]],
                [hi[0], lo[1]],
                [hi[0], hi[1]],
                [lo[0], hi[1]],
            ]),
            _ => None,
        }
    }
}

/// Measure of the intersection of two resolved shapes.
pub fn overlap_measure(a: &Resolved, b: &Resolved) -> Result<f64> {
    use Resolved::*;
    match (a, b) {
        (Box { d, lo: l1, hi: h1 }, Box { lo: l2, hi: h2, .. }) => {
            let mut v = 1.0;
            for k in 0..*d {
                let w = h1[k].min(h2[k]) - l1[k].max(l2[k]);
                if w <= 0.0 {
                    return Ok(0.0);
                }
                v *= w;
            }
            Ok(v)
        }
        (Ball { d, c: c1, r: r1 }, Ball { c: c2, r: r2, .. }) => {
            let dist = crate::vec::dist(c1, c2, *d);
            Ok(if *d == 2 {
                lens_area(*r1, *r2, dist)
            } else {
                lens_volume(*r1, *r2, dist)
            })
        }
        _ => {
            // 2D polygonal and disk combinations
            match (a.as_poly2(), b.as_poly2()) {
                (Some(p), Some(q)) => Ok(poly_poly_area(&p, &q)),
                (Some(p), None) => {
                    if let Ball { d: 2, c, r } = b {
                        Ok(circle_poly_area(&p, &[c[0], c[1]], *r))
                    } else {
                        Err(unsupported(a, b))
                    }
                }
                (None, Some(q)) => {
                    if let Ball { d: 2, c, r } = a {
                        Ok(circle_poly_area(&q, &[c[0], c[1]], *r))
                    } else {
                        Err(unsupported(a, b))
                    }
                }
                (None, None) => Err(unsupported(a, b)),
            }
        }
    }
}

fn unsupported(a: &Resolved, b: &Resolved) -> Error {
    Error::InvalidInput(format!(
        "no exact overlap formula for this shape pair: {:?} vs {:?}",
        discriminant_name(a),
        discriminant_name(b)
    ))
}

fn discriminant_name(r: &Resolved) -> &'static str {
    match r {
        Resolved::Box { .. } => "box",
        Resolved::Ball { .. } => "ball",
        Resolved::Poly2 { .. } => "polygon",
        Resolved::RotBox3 { .. } => "rotated 3d box",
    }
}

/// |S1 ∩ S2| for two shapes (world coordinates).
pub fn pairwise_area(s1: &Shape, s2: &Shape) -> Result<f64> {
    overlap_measure(&Resolved::from_shape(s1), &Resolved::from_shape(s2))
}

/// Intersection area of two disks at center distance `dist`.
pub fn lens_area(r1: f64, r2: f64, dist: f64) -> f64 {
    if dist >= r1 + r2 {
        return 0.0;
    }
    let rmin = r1.min(r2);
    if dist <= (r1 - r2).abs() {
        return std::f64::consts::PI * rmin * rmin;
    }
    let d2 = dist * dist;
    let a1 = ((d2 + r1 * r1 - r2 * r2) / (2.0 * dist * r1)).clamp(-1.0, 1.0);
    let a2 = ((d2 + r2 * r2 - r1 * r1) / (2.0 * dist * r2)).clamp(-1.0, 1.0);
    let t = (-dist + r1 + r2) * (dist + r1 - r2) * (dist - r1 + r2) * (dist + r1 + r2);
    r1 * r1 * a1.acos() + r2 * r2 * a2.acos() - 0.5 * t.max(0.0).sqrt()
}

/// Intersection volume of two balls at center distance `dist`.
pub fn lens_volume(r1: f64, r2: f64, dist: f64) -> f64 {
    use std::f64::consts::PI;
    if dist >= r1 + r2 {
        return 0.0;
    }
    let rmin = r1.min(r2);
    if dist <= (r1 - r2).abs() {
        return 4.0 / 3.0 * PI * rmin.powi(3);
    }
    PI * (r1 + r2 - dist).powi(2)
        * (dist * dist + 2.0 * dist * (r1 + r2) - 3.0 * (r1 - r2) * (r1 - r2))
        / (12.0 * dist)
}

// ---------------------------------------------------------------------------
// polygon boolean area via triangulated convex clipping
// ---------------------------------------------------------------------------

/// Area of the intersection of two simple CCW polygons.
pub fn poly_poly_area(p: &[[f64; 2]], q: &[[f64; 2]]) -> f64 {
    let tp = triangulate(p);
    let tq = triangulate(q);
    let mut area = 0.0;
    for a in &tp {
        for b in &tq {
            area += convex_clip_area(a, b);
        }
    }
    area
}

/// Fan/ear-clipping triangulation of a simple CCW polygon.
pub(crate) fn triangulate(poly: &[[f64; 2]]) -> Vec<[[f64; 2]; 3]> {
    let mut verts: Vec<[f64; 2]> = poly.to_vec();
    let mut out = Vec::new();
    let eps = {
        let mut m: f64 = 0.0;
        for v in poly {
            m = m.max(v[0].abs()).max(v[1].abs());
        }
        1e-12 * m.max(1.0)
    };
    'outer: while verts.len() > 3 {
        let n = verts.len();
        for i in 0..n {
            let a = verts[(i + n - 1) % n];
            let b = verts[i];
            let c = verts[(i + 1) % n];
            let cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
            if cross <= eps {
                continue; // reflex or degenerate corner
            }
            // no other vertex may lie inside the candidate ear
            let mut ok = true;
            for (j, v) in verts.iter().enumerate() {
                if j == (i + n - 1) % n || j == i || j == (i + 1) % n {
                    continue;
                }
                if point_in_triangle(v, &a, &b, &c, eps) {
                    ok = false;
                    break;
                }
            }
            if ok {
                out.push([a, b, c]);
                verts.remove(i);
                continue 'outer;
            }
        }
        // numerically degenerate leftovers: drop the flattest corner
        let mut best = 0;
        let mut best_abs = f64::INFINITY;
        for i in 0..verts.len() {
            let n = verts.len();
            let a = verts[(i + n - 1) % n];
            let b = verts[i];
            let c = verts[(i + 1) % n];
            let cr = ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])).abs();
            if cr < best_abs {
                best_abs = cr;
                best = i;
            }
        }
        verts.remove(best);
    }
    if verts.len() == 3 {
        out.push([verts[0], verts[1], verts[2]]);
    }
    out
}

fn point_in_triangle(p: &[f64; 2], a: &[f64; 2], b: &[f64; 2], c: &[f64; 2], eps: f64) -> bool {
    let s1 = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
    let s2 = (c[0] - b[0]) * (p[1] - b[1]) - (c[1] - b[1]) * (p[0] - b[0]);
    let s3 = (a[0] - c[0]) * (p[1] - c[1]) - (a[1] - c[1]) * (p[0] - c[0]);
    s1 > -eps && s2 > -eps && s3 > -eps
}

/// Area of the intersection of a triangle with a convex CCW polygon
/// (Sutherland-Hodgman clip of `a` against `b`).
fn convex_clip_area(a: &[[f64; 2]; 3], b: &[[f64; 2]; 3]) -> f64 {
    let mut subject: Vec<[f64; 2]> = a.to_vec();
    let nb = b.len();
    for i in 0..nb {
        if subject.is_empty() {
            return 0.0;
        }
        let p1 = b[i];
        let p2 = b[(i + 1) % nb];
        let mut next: Vec<[f64; 2]> = Vec::with_capacity(subject.len() + 2);
        let inside = |v: &[f64; 2]| {
            (p2[0] - p1[0]) * (v[1] - p1[1]) - (p2[1] - p1[1]) * (v[0] - p1[0]) >= 0.0
        };
        let ns = subject.len();
        for j in 0..ns {
            let cur = subject[j];
            let prev = subject[(j + ns - 1) % ns];
            let cur_in = inside(&cur);
            let prev_in = inside(&prev);
            if cur_in {
                if !prev_in {
                    next.push(line_intersect(&prev, &cur, &p1, &p2));
                }
                next.push(cur);
            } else if prev_in {
                next.push(line_intersect(&prev, &cur, &p1, &p2));
            }
        }
        subject = next;
    }
    if subject.len() < 3 {
        0.0
    } else {
        shoelace(&subject).max(0.0)
    }
}

fn line_intersect(a: &[f64; 2], b: &[f64; 2], p: &[f64; 2], q: &[f64; 2]) -> [f64; 2] {
    let r = [b[0] - a[0], b[1] - a[1]];
    let s = [q[0] - p[0], q[1] - p[1]];
    let denom = r[0] * s[1] - r[1] * s[0];
    let t = if denom.abs() < 1e-300 {
        0.0
    } else {
        ((p[0] - a[0]) * s[1] - (p[1] - a[1]) * s[0]) / denom
    };
    [a[0] + t * r[0], a[1] + t * r[1]]
}

// ---------------------------------------------------------------------------
// circle-polygon intersection area
// ---------------------------------------------------------------------------

/// Area of the intersection of a simple CCW polygon with the disk of radius
/// `r` centered at `c`. Exact: each edge contributes the signed area of the
/// circular triangle (c, a, b) ∩ disk.
pub fn circle_poly_area(poly: &[[f64; 2]], c: &[f64; 2], r: f64) -> f64 {
    let n = poly.len();
    let mut area = 0.0;
    for i in 0..n {
        let a = [poly[i][0] - c[0], poly[i][1] - c[1]];
        let b = [poly[(i + 1) % n][0] - c[0], poly[(i + 1) % n][1] - c[1]];
        area += circular_triangle_area(&a, &b, r);
    }
    area.max(0.0)
}

fn signed_angle(u: &[f64; 2], v: &[f64; 2]) -> f64 {
    (u[0] * v[1] - u[1] * v[0]).atan2(u[0] * v[0] + u[1] * v[1])
}

/// Signed area of triangle (0, a, b) intersected with the disk |x| <= r.
fn circular_triangle_area(a: &[f64; 2], b: &[f64; 2], r: f64) -> f64 {
    let r2 = r * r;
    let d = [b[0] - a[0], b[1] - a[1]];
    let qa = d[0] * d[0] + d[1] * d[1];
    if qa == 0.0 {
        return 0.0;
    }
    let qb = 2.0 * (a[0] * d[0] + a[1] * d[1]);
    let qc = a[0] * a[0] + a[1] * a[1] - r2;
    let disc = qb * qb - 4.0 * qa * qc;
    // split parameters where the chord crosses the circle
    let mut cuts = vec![0.0];
    if disc > 0.0 {
        let sq = disc.sqrt();
        for t in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
            if t > 0.0 && t < 1.0 {
                cuts.push(t);
            }
        }
    }
    cuts.push(1.0);
    cuts.sort_by(f64::total_cmp);
    let mut area = 0.0;
    for w in cuts.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        if t1 - t0 < 1e-15 {
            continue;
        }
        let p = [a[0] + t0 * d[0], a[1] + t0 * d[1]];
        let q = [a[0] + t1 * d[0], a[1] + t1 * d[1]];
        let tm = 0.5 * (t0 + t1);
        let m = [a[0] + tm * d[0], a[1] + tm * d[1]];
        if m[0] * m[0] + m[1] * m[1] <= r2 {
            // chord piece inside the disk: plain triangle with the center
            area += 0.5 * (p[0] * q[1] - p[1] * q[0]);
        } else {
            // outside: circular sector between the two directions
            area += 0.5 * r2 * signed_angle(&p, &q);
        }
    }
    area
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sq(side: f64) -> Vec<[f64; 2]> {
        vec![[0.0, 0.0], [side, 0.0], [side, side], [0.0, side]]
    }

    #[test]
    fn box_overlap() {
        let a = Resolved::Box {
            d: 2,
            lo: [0.0, 0.0, 0.0],
            hi: [2.0, 1.0, 0.0],
        };
        let b = Resolved::Box {
            d: 2,
            lo: [1.0, 0.5, 0.0],
            hi: [3.0, 2.0, 0.0],
        };
        assert!((overlap_measure(&a, &b).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn lens_formulas() {
        assert!((lens_area(1.0, 1.0, 0.0) - PI).abs() < 1e-14);
        assert_eq!(lens_area(1.0, 1.0, 2.0), 0.0);
        // symmetric half-overlap sanity: area monotone in distance
        assert!(lens_area(1.0, 1.0, 0.5) > lens_area(1.0, 1.0, 1.0));
        assert!((lens_volume(1.0, 1.0, 0.0) - 4.0 / 3.0 * PI).abs() < 1e-14);
        // one ball inside the other
        assert!((lens_volume(2.0, 0.5, 0.3) - 4.0 / 3.0 * PI * 0.125).abs() < 1e-14);
    }

    #[test]
    fn poly_clip_squares() {
        let a = sq(2.0);
        let b: Vec<[f64; 2]> = sq(2.0).iter().map(|v| [v[0] + 1.0, v[1] + 1.0]).collect();
        assert!((poly_poly_area(&a, &b) - 1.0).abs() < 1e-12);
        // L-shaped (non-convex) against square
        let ell = vec![
            [0.0, 0.0],
            [2.0, 0.0],
            [2.0, 1.0],
            [1.0, 1.0],
            [1.0, 2.0],
            [0.0, 2.0],
        ];
        let c: Vec<[f64; 2]> = sq(2.0).iter().map(|v| [v[0] + 0.5, v[1] + 0.5]).collect();
        // ell ∩ [0.5,2.5]^2: area of ell part right/above (0.5,0.5):
        // full ell area 3; remove strip x<0.5 (area 1) and y<0.5 of remainder
        // remaining region: x in [0.5,2], y in [0.5,1] -> 0.75 plus x in
        // [0.5,1], y in [1,2] -> 0.5
        assert!((poly_poly_area(&ell, &c) - 1.25).abs() < 1e-12);
    }

    #[test]
    fn circle_poly_cases() {
        // disk well inside polygon
        let p = sq(4.0);
        assert!((circle_poly_area(&p, &[2.0, 2.0], 1.0) - PI).abs() < 1e-13);
        // polygon well inside disk
        assert!((circle_poly_area(&p, &[2.0, 2.0], 10.0) - 16.0).abs() < 1e-12);
        // half disk: circle centered on an edge
        assert!((circle_poly_area(&p, &[0.0, 2.0], 1.0) - PI / 2.0).abs() < 1e-13);
        // quarter disk at a corner
        assert!((circle_poly_area(&p, &[0.0, 0.0], 1.0) - PI / 4.0).abs() < 1e-13);
    }

    #[test]
    fn circle_poly_matches_grid_oracle() {
        // irregular triangle vs offset disk, brute-force pixel oracle
        let tri = vec![[0.0, 0.0], [3.0, 0.5], [0.5, 2.5]];
        let (c, r) = ([1.2, 0.9], 1.1);
        let n = 2000;
        let (x0, x1, y0, y1) = (c[0] - r, c[0] + r, c[1] - r, c[1] + r);
        let mut hits = 0u64;
        for i in 0..n {
            for j in 0..n {
                let x = x0 + (x1 - x0) * (i as f64 + 0.5) / n as f64;
                let y = y0 + (y1 - y0) * (j as f64 + 0.5) / n as f64;
                if (x - c[0]).powi(2) + (y - c[1]).powi(2) <= r * r
                    && crate::geometry::shape::point_in_polygon(&[x, y], &tri)
                {
                    hits += 1;
                }
            }
        }
        let oracle = hits as f64 / (n * n) as f64 * (x1 - x0) * (y1 - y0);
        let exact = circle_poly_area(&tri, &c, r);
        assert!(
            (exact - oracle).abs() < 5e-3,
            "exact {exact} vs grid oracle {oracle}"
        );
    }
}
