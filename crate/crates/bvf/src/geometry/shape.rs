//! Shapes and piecewise-constant BV functions.

use crate::error::{Error, Result};
use crate::vec::{add, ball_volume, dist, norm, pt2, sub, Point, Rotation};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum ShapeKind {
    AxisBox { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    /// Simple, positively oriented polygon; d = 2 only.
    Polygon { vertices: Vec<[f64; 2]> },
}

/// An explicit region of R^d with rigid-motion parameters applied after the
/// canonical kind.
#[derive(Clone, Debug)]
pub struct Shape {
    d: usize,
    kind: ShapeKind,
    rotation: Rotation,
    translation: Point,
}

impl Shape {
    pub fn axis_box(d: usize, lo: &[f64], hi: &[f64]) -> Result<Self> {
        if !(2..=3).contains(&d) {
            return Err(Error::InvalidShape(format!("dimension {d} unsupported")));
        }
        if lo.len() != d || hi.len() != d {
            return Err(Error::InvalidShape("box corner dimension mismatch".into()));
        }
        for k in 0..d {
            if !(lo[k] < hi[k]) || !lo[k].is_finite() || !hi[k].is_finite() {
                return Err(Error::InvalidShape(format!(
                    "box needs lo < hi componentwise, got [{}, {}] on axis {k}",
                    lo[k], hi[k]
                )));
            }
        }
        Ok(Shape {
            d,
            kind: ShapeKind::AxisBox {
                lo: lo.to_vec(),
                hi: hi.to_vec(),
            },
            rotation: Rotation::identity(d),
            translation: [0.0; 3],
        })
    }

    pub fn square(side: f64) -> Shape {
        Shape::axis_box(2, &[0.0, 0.0], &[side, side]).unwrap()
    }

    pub fn unit_square() -> Shape {
        Shape::square(1.0)
    }

    pub fn ball(d: usize, center: &[f64], radius: f64) -> Result<Self> {
        if !(2..=3).contains(&d) {
            return Err(Error::InvalidShape(format!("dimension {d} unsupported")));
        }
        if center.len() != d {
            return Err(Error::InvalidShape("ball center dimension mismatch".into()));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidShape(format!("ball radius {radius} <= 0")));
        }
        Ok(Shape {
            d,
            kind: ShapeKind::Ball {
                center: center.to_vec(),
                radius,
            },
            rotation: Rotation::identity(d),
            translation: [0.0; 3],
        })
    }

    pub fn unit_disk() -> Shape {
        Shape::ball(2, &[0.0, 0.0], 1.0).unwrap()
    }

    pub fn polygon(vertices: Vec<[f64; 2]>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidShape("polygon needs >= 3 vertices".into()));
        }
        for v in &vertices {
            if !v[0].is_finite() || !v[1].is_finite() {
                return Err(Error::InvalidShape("polygon vertex not finite".into()));
            }
        }
        let scale = polygon_scale(&vertices);
        for i in 0..n {
            for j in (i + 1)..n {
                let dx = vertices[i][0] - vertices[j][0];
                let dy = vertices[i][1] - vertices[j][1];
                if (dx * dx + dy * dy).sqrt() < 1e-12 * scale {
                    return Err(Error::InvalidShape(format!("repeated vertices {i} and {j}")));
                }
            }
        }
        if shoelace(&vertices) <= 0.0 {
            return Err(Error::InvalidShape(
                "polygon must be positively oriented (counterclockwise)".into(),
            ));
        }
        if !is_simple(&vertices, scale) {
            return Err(Error::InvalidShape("polygon self-intersects".into()));
        }
        Ok(Shape {
            d: 2,
            kind: ShapeKind::Polygon { vertices },
            rotation: Rotation::identity(2),
            translation: [0.0; 3],
        })
    }

    pub fn with_rotation(mut self, rot: Rotation) -> Result<Self> {
        if rot.d != self.d {
            return Err(Error::InvalidShape("rotation dimension mismatch".into()));
        }
        rot.validate()?;
        self.rotation = rot;
        Ok(self)
    }

    pub fn with_translation(mut self, t: &[f64]) -> Result<Self> {
        if t.len() != self.d {
            return Err(Error::InvalidShape("translation dimension mismatch".into()));
        }
        let mut p = [0.0; 3];
        p[..self.d].copy_from_slice(t);
        self.translation = p;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn kind(&self) -> &ShapeKind {
        &self.kind
    }

    pub fn rotation(&self) -> &Rotation {
        &self.rotation
    }

    pub fn translation(&self) -> &Point {
        &self.translation
    }

    /// Applies a further rigid motion x -> Q x + v (composed after the
    /// shape's own transform).
    pub fn moved(&self, q: &Rotation, v: &Point) -> Shape {
        let mut s = self.clone();
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = 0.0;
                for k in 0..3 {
                    acc += q.m[i][k] * self.rotation.m[k][j];
                }
                m[i][j] = acc;
            }
        }
        s.rotation = Rotation { m, d: self.d };
        s.translation = add(&q.apply(&self.translation), v);
        s
    }

    /// The image of the shape under x -> lambda x (lambda > 0).
    pub fn scaled(&self, lambda: f64) -> Shape {
        let mut s = self.clone();
        s.translation = crate::vec::scale(&self.translation, lambda);
        s.kind = match &self.kind {
            ShapeKind::AxisBox { lo, hi } => ShapeKind::AxisBox {
                lo: lo.iter().map(|x| x * lambda).collect(),
                hi: hi.iter().map(|x| x * lambda).collect(),
            },
            ShapeKind::Ball { center, radius } => ShapeKind::Ball {
                center: center.iter().map(|x| x * lambda).collect(),
                radius: radius * lambda,
            },
            ShapeKind::Polygon { vertices } => ShapeKind::Polygon {
                vertices: vertices
                    .iter()
                    .map(|v| [v[0] * lambda, v[1] * lambda])
                    .collect(),
            },
        };
        s
    }

    /// Lebesgue measure.
    pub fn volume(&self) -> f64 {
        match &self.kind {
            ShapeKind::AxisBox { lo, hi } => lo.iter().zip(hi).map(|(a, b)| b - a).product(),
            ShapeKind::Ball { radius, .. } => ball_volume(self.d) * radius.powi(self.d as i32),
            ShapeKind::Polygon { vertices } => shoelace(vertices),
        }
    }

    /// Exact perimeter ((d-1)-measure of the boundary).
    pub fn perimeter(&self) -> f64 {
        match &self.kind {
            ShapeKind::AxisBox { lo, hi } => {
                let sides: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| b - a).collect();
                let mut p = 0.0;
                for i in 0..self.d {
                    let mut face = 1.0;
                    for (j, s) in sides.iter().enumerate() {
                        if j != i {
                            face *= s;
                        }
                    }
                    p += 2.0 * face;
                }
                p
            }
            ShapeKind::Ball { radius, .. } => {
                crate::vec::sphere_surface(self.d) * radius.powi(self.d as i32 - 1)
            }
            ShapeKind::Polygon { vertices } => {
                let n = vertices.len();
                (0..n)
                    .map(|i| {
                        let a = vertices[i];
                        let b = vertices[(i + 1) % n];
                        ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt()
                    })
                    .sum()
            }
        }
    }

    /// Closed-set membership in world coordinates.
    pub fn contains(&self, x: &Point) -> bool {
        let y = self.to_canonical(x);
        match &self.kind {
            ShapeKind::AxisBox { lo, hi } => {
                (0..self.d).all(|k| y[k] >= lo[k] && y[k] <= hi[k])
            }
            ShapeKind::Ball { center, radius } => {
                let mut c = [0.0; 3];
                c[..self.d].copy_from_slice(center);
                dist(&y, &c, self.d) <= *radius
            }
            ShapeKind::Polygon { vertices } => point_in_polygon(&[y[0], y[1]], vertices),
        }
    }

    /// Distance from `x` to the shape as a set (0 inside).
    pub fn distance(&self, x: &Point) -> f64 {
        let y = self.to_canonical(x);
        match &self.kind {
            ShapeKind::AxisBox { lo, hi } => {
                let mut s = 0.0;
                for k in 0..self.d {
                    let d = (lo[k] - y[k]).max(y[k] - hi[k]).max(0.0);
                    s += d * d;
                }
                s.sqrt()
            }
            ShapeKind::Ball { center, radius } => {
                let mut c = [0.0; 3];
                c[..self.d].copy_from_slice(center);
                (dist(&y, &c, self.d) - radius).max(0.0)
            }
            ShapeKind::Polygon { vertices } => {
                let p = [y[0], y[1]];
                if point_in_polygon(&p, vertices) {
                    0.0
                } else {
                    let n = vertices.len();
                    (0..n)
                        .map(|i| point_segment_dist(&p, &vertices[i], &vertices[(i + 1) % n]))
                        .fold(f64::INFINITY, f64::min)
                }
            }
        }
    }

    /// Axis-aligned bounding box in world coordinates.
    pub fn bounding_box(&self) -> (Point, Point) {
        match &self.kind {
            ShapeKind::AxisBox { lo, hi } => {
                if self.rotation.is_identity() {
                    let mut l = self.translation;
                    let mut h = self.translation;
                    for k in 0..self.d {
                        l[k] += lo[k];
                        h[k] += hi[k];
                    }
                    (l, h)
                } else {
                    // transform all corners
                    let mut l = [f64::INFINITY; 3];
                    let mut h = [f64::NEG_INFINITY; 3];
                    let corners = 1usize << self.d;
                    for mask in 0..corners {
                        let mut c = [0.0; 3];
                        for k in 0..self.d {
                            c[k] = if mask & (1 << k) != 0 { hi[k] } else { lo[k] };
                        }
                        let w = add(&self.rotation.apply(&c), &self.translation);
                        for k in 0..self.d {
                            l[k] = l[k].min(w[k]);
                            h[k] = h[k].max(w[k]);
                        }
                    }
                    for k in self.d..3 {
                        l[k] = 0.0;
                        h[k] = 0.0;
                    }
                    (l, h)
                }
            }
            ShapeKind::Ball { center, radius } => {
                let mut c = [0.0; 3];
                c[..self.d].copy_from_slice(center);
                let w = add(&self.rotation.apply(&c), &self.translation);
                let mut l = [0.0; 3];
                let mut h = [0.0; 3];
                for k in 0..self.d {
                    l[k] = w[k] - radius;
                    h[k] = w[k] + radius;
                }
                (l, h)
            }
            ShapeKind::Polygon { vertices } => {
                let mut l = [f64::INFINITY; 3];
                let mut h = [f64::NEG_INFINITY; 3];
                for v in vertices {
                    let w = add(&self.rotation.apply(&pt2(v[0], v[1])), &self.translation);
                    for k in 0..2 {
                        l[k] = l[k].min(w[k]);
                        h[k] = h[k].max(w[k]);
                    }
                }
                l[2] = 0.0;
                h[2] = 0.0;
                (l, h)
            }
        }
    }

    #[inline]
    fn to_canonical(&self, x: &Point) -> Point {
        let shifted = sub(x, &self.translation);
        if self.rotation.is_identity() {
            shifted
        } else {
            self.rotation.apply_t(&shifted)
        }
    }
}

fn polygon_scale(verts: &[[f64; 2]]) -> f64 {
    let mut m: f64 = 0.0;
    for v in verts {
        m = m.max(v[0].abs()).max(v[1].abs());
    }
    m.max(1.0)
}

/// Signed polygon area (positive for CCW).
pub(crate) fn shoelace(verts: &[[f64; 2]]) -> f64 {
    let n = verts.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = verts[i];
        let b = verts[(i + 1) % n];
        s += a[0] * b[1] - b[0] * a[1];
    }
    0.5 * s
}

fn is_simple(verts: &[[f64; 2]], scale: f64) -> bool {
    let n = verts.len();
    let eps = 1e-12 * scale;
    for i in 0..n {
        let (a1, a2) = (verts[i], verts[(i + 1) % n]);
        for j in (i + 1)..n {
            // skip adjacent edges
            if j == i || (j + 1) % n == i || (i + 1) % n == j {
                continue;
            }
            let (b1, b2) = (verts[j], verts[(j + 1) % n]);
            if segments_properly_intersect(&a1, &a2, &b1, &b2, eps) {
                return false;
            }
        }
    }
    true
}

fn orient(a: &[f64; 2], b: &[f64; 2], c: &[f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn segments_properly_intersect(
    a1: &[f64; 2],
    a2: &[f64; 2],
    b1: &[f64; 2],
    b2: &[f64; 2],
    eps: f64,
) -> bool {
    let d1 = orient(a1, a2, b1);
    let d2 = orient(a1, a2, b2);
    let d3 = orient(b1, b2, a1);
    let d4 = orient(b1, b2, a2);
    d1 * d2 < -eps * eps && d3 * d4 < -eps * eps
}

/// Winding-number point-in-polygon test; boundary points count as inside
/// up to rounding.
pub(crate) fn point_in_polygon(p: &[f64; 2], verts: &[[f64; 2]]) -> bool {
    let n = verts.len();
    let mut wn = 0i32;
    for i in 0..n {
        let a = verts[i];
        let b = verts[(i + 1) % n];
        if a[1] <= p[1] {
            if b[1] > p[1] && orient(&a, &b, p) > 0.0 {
                wn += 1;
            }
        } else if b[1] <= p[1] && orient(&a, &b, p) < 0.0 {
            wn -= 1;
        }
    }
    wn != 0
}

pub(crate) fn point_segment_dist(p: &[f64; 2], a: &[f64; 2], b: &[f64; 2]) -> f64 {
    let vx = b[0] - a[0];
    let vy = b[1] - a[1];
    let wx = p[0] - a[0];
    let wy = p[1] - a[1];
    let len2 = vx * vx + vy * vy;
    let t = if len2 > 0.0 {
        ((wx * vx + wy * vy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let dx = wx - t * vx;
    let dy = wy - t * vy;
    (dx * dx + dy * dy).sqrt()
}

// ---------------------------------------------------------------------------
// BVFunction
// ---------------------------------------------------------------------------

/// Finite weighted sum of shape indicators u = sum_i w_i 1_{S_i}; the only
/// BV class instantiated here. The empty sum is the zero function.
#[derive(Clone, Debug)]
pub struct BVFunction {
    d: usize,
    terms: Vec<(f64, Shape)>,
}

impl BVFunction {
    pub fn new(d: usize, terms: Vec<(f64, Shape)>) -> Result<Self> {
        if !(2..=3).contains(&d) {
            return Err(Error::InvalidInput(format!("dimension {d} unsupported")));
        }
        for (w, s) in &terms {
            if *w == 0.0 || !w.is_finite() {
                return Err(Error::InvalidInput(format!("weight {w} must be finite and nonzero")));
            }
            if s.dim() != d {
                return Err(Error::InvalidInput("term dimension mismatch".into()));
            }
        }
        Ok(BVFunction { d, terms })
    }

    pub fn zero(d: usize) -> Self {
        BVFunction { d, terms: vec![] }
    }

    pub fn indicator(shape: Shape) -> Self {
        let d = shape.dim();
        BVFunction {
            d,
            terms: vec![(1.0, shape)],
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> &[(f64, Shape)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Pointwise evaluation (boundary points resolve by closed membership).
    pub fn eval(&self, x: &Point) -> f64 {
        self.terms
            .iter()
            .map(|(w, s)| if s.contains(x) { *w } else { 0.0 })
            .sum()
    }

    /// u + v as a formal sum of terms.
    pub fn sum(&self, other: &BVFunction) -> Result<BVFunction> {
        if self.d != other.d {
            return Err(Error::InvalidInput("dimension mismatch in sum".into()));
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(BVFunction { d: self.d, terms })
    }

    pub fn scaled_weights(&self, c: f64) -> Result<BVFunction> {
        if c == 0.0 {
            return Ok(BVFunction::zero(self.d));
        }
        BVFunction::new(
            self.d,
            self.terms.iter().map(|(w, s)| (w * c, s.clone())).collect(),
        )
    }

    /// x -> u(x / lambda), i.e. the support dilates by lambda.
    pub fn dilated(&self, lambda: f64) -> Result<BVFunction> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidInput(format!("dilation {lambda} <= 0")));
        }
        BVFunction::new(
            self.d,
            self.terms
                .iter()
                .map(|(w, s)| (*w, s.scaled(lambda)))
                .collect(),
        )
    }

    pub fn translated(&self, v: &Point) -> BVFunction {
        let q = Rotation::identity(self.d);
        BVFunction {
            d: self.d,
            terms: self
                .terms
                .iter()
                .map(|(w, s)| (*w, s.moved(&q, v)))
                .collect(),
        }
    }

    pub fn rotated(&self, q: &Rotation) -> BVFunction {
        BVFunction {
            d: self.d,
            terms: self
                .terms
                .iter()
                .map(|(w, s)| (*w, s.moved(q, &[0.0; 3])))
                .collect(),
        }
    }

    /// Bounding box of the support; None for the zero function.
    pub fn support_bbox(&self) -> Option<(Point, Point)> {
        let mut out: Option<(Point, Point)> = None;
        for (_, s) in &self.terms {
            let (l, h) = s.bounding_box();
            out = Some(match out {
                None => (l, h),
                Some((mut cl, mut ch)) => {
                    for k in 0..3 {
                        cl[k] = cl[k].min(l[k]);
                        ch[k] = ch[k].max(h[k]);
                    }
                    (cl, ch)
                }
            });
        }
        out
    }

    /// Diameter of the support bounding box (an upper bound on the support
    /// diameter; used to size angular quadratures).
    pub fn diameter(&self) -> f64 {
        match self.support_bbox() {
            None => 0.0,
            Some((l, h)) => {
                let v = sub(&h, &l);
                norm(&v, self.d)
            }
        }
    }

    /// Total mass integral = u-hat at frequency zero.
    pub fn mass(&self) -> f64 {
        self.terms.iter().map(|(w, s)| w * s.volume()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perimeters_match_closed_forms() {
        assert_eq!(Shape::unit_square().perimeter(), 4.0);
        assert!((Shape::unit_disk().perimeter() - 2.0 * std::f64::consts::PI).abs() < 1e-15);
        let b = Shape::axis_box(2, &[0.0, 0.0], &[2.0, 3.0]).unwrap();
        assert_eq!(b.perimeter(), 10.0);
        let b3 = Shape::axis_box(3, &[0.0, 0.0, 0.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(b3.perimeter(), 2.0 * (2.0 + 3.0 + 6.0));
    }

    #[test]
    fn polygon_validation() {
        // clockwise rejected
        assert!(Shape::polygon(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0]]).is_err());
        // ccw triangle ok
        let t = Shape::polygon(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert!((t.volume() - 0.5).abs() < 1e-15);
        // bowtie rejected
        assert!(
            Shape::polygon(vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]).is_err()
        );
        // repeated vertex rejected
        assert!(
            Shape::polygon(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).is_err()
        );
    }

    #[test]
    fn membership_with_transform() {
        let rot = Rotation::from_angle_2d(std::f64::consts::FRAC_PI_4);
        let s = Shape::unit_square()
            .with_rotation(rot)
            .unwrap()
            .with_translation(&[5.0, 0.0])
            .unwrap();
        // center of the square maps to (5, sqrt(2)/2 * ...) -- just check the
        // image of (0.5, 0.5)
        let img = add(&rot.apply(&pt2(0.5, 0.5)), &pt2(5.0, 0.0));
        assert!(s.contains(&img));
        assert!(!s.contains(&pt2(5.0, -1.0)));
        let (l, h) = s.bounding_box();
        assert!((h[0] - l[0] - 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn bv_eval_and_mass() {
        let u = BVFunction::new(
            2,
            vec![
                (1.0, Shape::square(2.0)),
                (1.0, Shape::unit_square()),
            ],
        )
        .unwrap();
        assert_eq!(u.eval(&pt2(0.5, 0.5)), 2.0);
        assert_eq!(u.eval(&pt2(1.5, 1.5)), 1.0);
        assert_eq!(u.eval(&pt2(2.5, 0.5)), 0.0);
        assert!((u.mass() - 5.0).abs() < 1e-15);
        assert!((u.diameter() - 8.0f64.sqrt()).abs() < 1e-15);
    }
}
