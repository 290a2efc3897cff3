//! Closed-form Fourier transforms of shape indicators and perimeter
//! measures, with the radial shell quadrature and estimators built on them.
//!
//! Normalization: u-hat(xi) = ∫ u(x) e^{-2 pi i xi . x} dx, so Plancherel
//! holds with no extra constants and the transform of an indicator at 0 is
//! the measure of the set.

mod profile;

pub use profile::{
    cutoff_functional, cutoff_trace, finite_perimeter_diagnostic, gaussian_trace, shell_energy,
    tail_asymptote, tail_energy, tauberian_crosscheck, AsymptoteEstimate, DiagnosticReport,
    EstimatorKind, ProfileOpts, SpectralProfile, TauberianReport,
};

use crate::geometry::{BVFunction, Shape, ShapeKind};
use crate::special::{bessel_j0, bessel_j1};
use crate::vec::{Point, Rotation};
use num_complex::Complex64;
use std::f64::consts::PI;

/// sin(pi y) / (pi y) with a series branch for small arguments.
#[inline]
pub fn sinc_pi(y: f64) -> f64 {
    let z = PI * y;
    if z.abs() < 1e-4 {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// Precomputed per-shape Fourier evaluator. Rigid motions are folded in as
/// a phase times a rotated frequency, so the canonical closed forms stay
/// untransformed.
#[derive(Clone, Debug)]
pub struct ShapeFt {
    d: usize,
    rot: Option<Rotation>,
    tau: Point,
    kind: FtKind,
}

#[derive(Clone, Debug)]
enum FtKind {
    Box {
        lo: [f64; 3],
        hi: [f64; 3],
    },
    Ball {
        c: Point,
        r: f64,
    },
    Poly {
        edges: Vec<FtEdge>,
        centroid: [f64; 2],
        rho_max: f64,
        /// centroid-centered moments m[p][q] = ∫ (x-cx)^p (y-cy)^q, p+q <= MOM_ORDER
        moments: Vec<Vec<f64>>,
    },
}

#[derive(Clone, Debug)]
struct FtEdge {
    mid: [f64; 2],
    delta: [f64; 2],
    len: f64,
    normal: [f64; 2],
}

const MOM_ORDER: usize = 16;
/// Switch to the moment series when 2 pi |xi| rho_max is below this.
const POLY_SERIES_CUT: f64 = 0.8;

impl ShapeFt {
    pub fn new(shape: &Shape) -> ShapeFt {
        let d = shape.dim();
        let rot = if shape.rotation().is_identity() {
            None
        } else {
            Some(*shape.rotation())
        };
        let tau = *shape.translation();
        let kind = match shape.kind() {
            ShapeKind::AxisBox { lo, hi } => {
                let mut l = [0.0; 3];
                let mut h = [0.0; 3];
                l[..d].copy_from_slice(lo);
                h[..d].copy_from_slice(hi);
                FtKind::Box { lo: l, hi: h }
            }
            ShapeKind::Ball { center, radius } => {
                let mut c = [0.0; 3];
                c[..d].copy_from_slice(center);
                FtKind::Ball { c, r: *radius }
            }
            ShapeKind::Polygon { vertices } => poly_ft_kind(vertices),
        };
        ShapeFt { d, rot, tau, kind }
    }

    /// u-hat(xi) of the indicator.
    pub fn eval(&self, xi: &Point) -> Complex64 {
        let phase = cis(-2.0 * PI * crate::vec::dot(xi, &self.tau, self.d));
        let xic = match &self.rot {
            None => *xi,
            Some(r) => r.apply_t(xi),
        };
        phase * self.eval_canonical(&xic)
    }

    fn eval_canonical(&self, xi: &Point) -> Complex64 {
        match &self.kind {
            FtKind::Box { lo, hi } => {
                let mut out = Complex64::new(1.0, 0.0);
                for k in 0..self.d {
                    let len = hi[k] - lo[k];
                    let mid = 0.5 * (lo[k] + hi[k]);
                    out *= cis(-2.0 * PI * xi[k] * mid) * (len * sinc_pi(xi[k] * len));
                }
                out
            }
            FtKind::Ball { c, r } => {
                let rho = crate::vec::norm(xi, self.d);
                let phase = cis(-2.0 * PI * crate::vec::dot(xi, c, self.d));
                phase * ball_radial_ft(self.d, *r, rho)
            }
            FtKind::Poly {
                edges,
                centroid,
                rho_max,
                moments,
            } => {
                let rho2 = xi[0] * xi[0] + xi[1] * xi[1];
                let rho = rho2.sqrt();
                if 2.0 * PI * rho * rho_max <= POLY_SERIES_CUT {
                    let phase =
                        cis(-2.0 * PI * (xi[0] * centroid[0] + xi[1] * centroid[1]));
                    return phase * poly_moment_series(moments, xi);
                }
                let mut s = Complex64::new(0.0, 0.0);
                for e in edges {
                    let xin = xi[0] * e.normal[0] + xi[1] * e.normal[1];
                    if xin == 0.0 {
                        continue;
                    }
                    let phase = cis(-2.0 * PI * (xi[0] * e.mid[0] + xi[1] * e.mid[1]));
                    let y = xi[0] * e.delta[0] + xi[1] * e.delta[1];
                    s += phase * (xin * e.len * sinc_pi(y));
                }
                Complex64::new(0.0, 1.0) * s / (2.0 * PI * rho2)
            }
        }
    }
}

/// Radial profile of the ball transform (real-valued).
pub(crate) fn ball_radial_ft(d: usize, r: f64, rho: f64) -> f64 {
    let z = 2.0 * PI * r * rho;
    match d {
        2 => {
            if z < 1e-3 {
                let z2 = z * z;
                PI * r * r * (1.0 - z2 / 8.0 + z2 * z2 / 192.0)
            } else {
                r * bessel_j1(z) / rho
            }
        }
        3 => {
            if z < 1e-2 {
                let z2 = z * z;
                4.0 / 3.0 * PI * r.powi(3) * (1.0 - z2 / 10.0 + z2 * z2 / 280.0)
            } else {
                (z.sin() - z * z.cos()) / (2.0 * PI * PI * rho.powi(3))
            }
        }
        _ => unreachable!(),
    }
}

fn cis(t: f64) -> Complex64 {
    let (s, c) = t.sin_cos();
    Complex64::new(c, s)
}

fn poly_ft_kind(verts: &[[f64; 2]]) -> FtKind {
    let n = verts.len();
    // area centroid
    let mut area2 = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..n {
        let a = verts[i];
        let b = verts[(i + 1) % n];
        let w = a[0] * b[1] - b[0] * a[1];
        area2 += w;
        cx += (a[0] + b[0]) * w;
        cy += (a[1] + b[1]) * w;
    }
    let area = 0.5 * area2;
    let centroid = [cx / (6.0 * area), cy / (6.0 * area)];
    let centered: Vec<[f64; 2]> = verts
        .iter()
        .map(|v| [v[0] - centroid[0], v[1] - centroid[1]])
        .collect();
    let rho_max = centered
        .iter()
        .map(|v| (v[0] * v[0] + v[1] * v[1]).sqrt())
        .fold(0.0f64, f64::max);
    let edges = (0..n)
        .map(|i| {
            let a = verts[i];
            let b = verts[(i + 1) % n];
            let delta = [b[0] - a[0], b[1] - a[1]];
            let len = (delta[0] * delta[0] + delta[1] * delta[1]).sqrt();
            FtEdge {
                mid: [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])],
                delta,
                len,
                normal: [delta[1] / len, -delta[0] / len],
            }
        })
        .collect();
    FtKind::Poly {
        edges,
        centroid,
        rho_max,
        moments: polygon_moments(&centered, MOM_ORDER),
    }
}

/// Centered moments m[p][q] = ∫∫ x^p y^q dA for p + q <= order, by the
/// Green's-theorem edge formula.
fn polygon_moments(verts: &[[f64; 2]], order: usize) -> Vec<Vec<f64>> {
    let n = verts.len();
    let mut m = vec![vec![0.0; order + 1]; order + 1];
    // binomial table
    let mut binom = vec![vec![0.0f64; order + 2]; order + 2];
    for (i, row) in binom.iter_mut().enumerate() {
        row[0] = 1.0;
        for j in 1..=i {
            row[j] = row[j - 1] * ((i - j + 1) as f64) / (j as f64);
        }
    }
    for e in 0..n {
        let a = verts[e];
        let b = verts[(e + 1) % n];
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        if dy == 0.0 {
            continue;
        }
        for p in 0..=order {
            for q in 0..=(order - p) {
                // (1/(p+1)) ∫_0^1 (ax + t dx)^{p+1} (ay + t dy)^q dy dt
                let mut s = 0.0;
                for i in 0..=(p + 1) {
                    let ci = binom[p + 1][i] * a[0].powi((p + 1 - i) as i32) * dx.powi(i as i32);
                    if ci == 0.0 {
                        continue;
                    }
                    for j in 0..=q {
                        let cj = binom[q][j] * a[1].powi((q - j) as i32) * dy.powi(j as i32);
                        if cj == 0.0 {
                            continue;
                        }
                        s += ci * cj / ((i + j + 1) as f64);
                    }
                }
                m[p][q] += s * dy / ((p + 1) as f64);
            }
        }
    }
    m
}

fn poly_moment_series(moments: &[Vec<f64>], xi: &Point) -> Complex64 {
    // sum_j (-2 pi i)^j / j! * sum_{k} C(j,k) xix^k xiy^{j-k} m[k][j-k]
    let order = moments.len() - 1;
    let mut out = Complex64::new(0.0, 0.0);
    let mut coeff = Complex64::new(1.0, 0.0); // (-2 pi i)^j / j!
    for j in 0..=order {
        if j > 0 {
            coeff *= Complex64::new(0.0, -2.0 * PI) / j as f64;
        }
        // binomial expansion of (xi . x)^j
        let mut inner = 0.0;
        let mut bin = 1.0;
        for k in 0..=j {
            inner += bin * xi[0].powi(k as i32) * xi[1].powi((j - k) as i32) * moments[k][j - k];
            bin = bin * ((j - k) as f64) / ((k + 1) as f64);
        }
        out += coeff * inner;
    }
    out
}

/// Exact Fourier transform of a shape indicator.
pub fn fourier_indicator(shape: &Shape, xi: &Point) -> Complex64 {
    ShapeFt::new(shape).eval(xi)
}

/// Fourier evaluator for a BV function (weighted sum of shape transforms).
#[derive(Clone, Debug)]
pub struct BvFt {
    pub d: usize,
    terms: Vec<(f64, ShapeFt)>,
    /// Set when every term is a ball and all centers coincide: the modulus
    /// is radial, so spherical averages collapse to a single evaluation.
    radial: Option<Vec<(f64, f64)>>, // (weight, radius) with common center
}

impl BvFt {
    pub fn new(u: &BVFunction) -> BvFt {
        let d = u.dim();
        let terms: Vec<(f64, ShapeFt)> = u
            .terms()
            .iter()
            .map(|(w, s)| (*w, ShapeFt::new(s)))
            .collect();
        let mut radial = None;
        if !terms.is_empty() {
            let mut balls = Vec::new();
            let mut center: Option<Point> = None;
            let mut ok = true;
            for (w, s) in u.terms() {
                match s.kind() {
                    ShapeKind::Ball { center: c, radius } => {
                        let mut world = [0.0; 3];
                        world[..d].copy_from_slice(c);
                        let world = crate::vec::add(&s.rotation().apply(&world), s.translation());
                        match &center {
                            None => center = Some(world),
                            Some(c0) => {
                                if crate::vec::dist(c0, &world, d) > 1e-14 {
                                    ok = false;
                                }
                            }
                        }
                        balls.push((*w, *radius));
                    }
                    _ => ok = false,
                }
                if !ok {
                    break;
                }
            }
            if ok {
                radial = Some(balls);
            }
        }
        BvFt { d, terms, radial }
    }

    pub fn eval(&self, xi: &Point) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (w, t) in &self.terms {
            s += t.eval(xi) * *w;
        }
        s
    }

    /// |u-hat|(rho) when the modulus is radial.
    pub fn radial_abs(&self, rho: f64) -> Option<f64> {
        self.radial.as_ref().map(|balls| {
            balls
                .iter()
                .map(|(w, r)| w * ball_radial_ft(self.d, *r, rho))
                .sum::<f64>()
                .abs()
        })
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Fourier transform of the perimeter measure H^{d-1} restricted to the
/// boundary of the shape. At xi = 0 this is the perimeter.
pub fn fourier_perimeter_measure(shape: &Shape, xi: &Point) -> Complex64 {
    let d = shape.dim();
    let phase = cis(-2.0 * PI * crate::vec::dot(xi, shape.translation(), d));
    let xic = if shape.rotation().is_identity() {
        *xi
    } else {
        shape.rotation().apply_t(xi)
    };
    let xi = &xic;
    let v = match shape.kind() {
        ShapeKind::Ball { center, radius } => {
            let mut c = [0.0; 3];
            c[..d].copy_from_slice(center);
            let rho = crate::vec::norm(xi, d);
            let cphase = cis(-2.0 * PI * crate::vec::dot(xi, &c, d));
            let z = 2.0 * PI * radius * rho;
            let amp = match d {
                2 => 2.0 * PI * radius * bessel_j0(z),
                3 => 4.0 * PI * radius * radius * sinc_pi(2.0 * radius * rho),
                _ => unreachable!(),
            };
            cphase * amp
        }
        ShapeKind::Polygon { vertices } => {
            let n = vertices.len();
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..n {
                let a = vertices[i];
                let b = vertices[(i + 1) % n];
                s += edge_line_integral(&a, &b, xi);
            }
            s
        }
        ShapeKind::AxisBox { lo, hi } => {
            if d == 2 {
                let corners = [
                    [lo[0], lo[1]],
                    [hi[0], lo[1]],
                    [hi[0], hi[1]],
                    [lo[0], hi[1]],
                ];
                let mut s = Complex64::new(0.0, 0.0);
                for i in 0..4 {
                    s += edge_line_integral(&corners[i], &corners[(i + 1) % 4], xi);
                }
                s
            } else {
                // six faces, each a separable surface integral
                let mut s = Complex64::new(0.0, 0.0);
                for axis in 0..3 {
                    for coord in [lo[axis], hi[axis]] {
                        let mut f = cis(-2.0 * PI * xi[axis] * coord);
                        for k in 0..3 {
                            if k == axis {
                                continue;
                            }
                            let len = hi[k] - lo[k];
                            let mid = 0.5 * (lo[k] + hi[k]);
                            f *= cis(-2.0 * PI * xi[k] * mid) * (len * sinc_pi(xi[k] * len));
                        }
                        s += f;
                    }
                }
                s
            }
        }
    };
    phase * v
}

/// ∫_edge e^{-2 pi i xi . x} ds for a straight segment.
fn edge_line_integral(a: &[f64; 2], b: &[f64; 2], xi: &Point) -> Complex64 {
    let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
    let delta = [b[0] - a[0], b[1] - a[1]];
    let len = (delta[0] * delta[0] + delta[1] * delta[1]).sqrt();
    let y = xi[0] * delta[0] + xi[1] * delta[1];
    cis(-2.0 * PI * (xi[0] * mid[0] + xi[1] * mid[1])) * (len * sinc_pi(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{gauss_legendre, integrate_gl};
    use crate::vec::pt2;

    #[test]
    fn box_ft_values() {
        let sq = Shape::unit_square();
        let v0 = fourier_indicator(&sq, &pt2(0.0, 0.0));
        assert!((v0.re - 1.0).abs() < 1e-15 && v0.im.abs() < 1e-15);
        // integer frequency: sinc zero
        let v1 = fourier_indicator(&sq, &pt2(1.0, 0.0));
        assert!(v1.norm() < 1e-15);
    }

    #[test]
    fn disk_ft_matches_tensor_gauss_oracle() {
        // oracle: slice the disk in x and integrate the slice widths against
        // the phase; the substitution x = sin(phi) removes the sqrt endpoint
        // singularity so Gauss-Legendre converges spectrally
        let disk = Shape::unit_disk();
        let xi = pt2(0.7, 0.0);
        let rule = gauss_legendre(160);
        let mut re = 0.0;
        let mut im = 0.0;
        for (t, w) in rule.nodes.iter().zip(&rule.weights) {
            let phi = 0.5 * PI * t; // phi in [-pi/2, pi/2], jacobian pi/2
            let x = phi.sin();
            let width = 2.0 * phi.cos(); // 2 sqrt(1 - x^2)
            let jac = 0.5 * PI * phi.cos();
            re += w * jac * width * (2.0 * PI * 0.7 * x).cos();
            im += w * jac * width * -(2.0 * PI * 0.7 * x).sin();
        }
        let oracle = Complex64::new(re, im);
        let v = fourier_indicator(&disk, &xi);
        assert!(
            (v - oracle).norm() < 1e-10,
            "disk FT {v} vs oracle {oracle}"
        );
        // closed form J1(2 pi rho)/rho
        let expect = crate::special::bessel_j1(2.0 * PI * 0.7) / 0.7;
        assert!((v.re - expect).abs() < 1e-12);
    }

    #[test]
    fn polygon_ft_matches_box_ft() {
        // the unit square as a polygon must agree with the separable form
        let sq = Shape::unit_square();
        let poly =
            Shape::polygon(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        for xi in [
            pt2(0.3, -0.2),
            pt2(2.5, 1.0),
            pt2(1e-5, 2e-5),
            pt2(0.01, 0.0),
            pt2(10.0, 7.3),
        ] {
            let a = fourier_indicator(&sq, &xi);
            let b = fourier_indicator(&poly, &xi);
            assert!(
                (a - b).norm() < 1e-12,
                "xi = {xi:?}: box {a} vs poly {b}"
            );
        }
    }

    #[test]
    fn transform_folding() {
        // rotating and translating multiplies by a phase / rotates frequency
        let rot = Rotation::from_angle_2d(0.6);
        let s = Shape::unit_square()
            .with_rotation(rot)
            .unwrap()
            .with_translation(&[1.5, -2.0])
            .unwrap();
        let xi = pt2(0.8, 0.4);
        let direct = fourier_indicator(&s, &xi);
        // |u-hat| must be unchanged under rigid motion at rotated frequency
        let xirot = rot.apply_t(&xi);
        let base = fourier_indicator(&Shape::unit_square(), &xirot);
        assert!((direct.norm() - base.norm()).abs() < 1e-12);
    }

    #[test]
    fn perimeter_measure_values() {
        let sq = Shape::unit_square();
        let v0 = fourier_perimeter_measure(&sq, &pt2(0.0, 0.0));
        assert!((v0.re - 4.0).abs() < 1e-14);
        let disk = Shape::unit_disk();
        let v0 = fourier_perimeter_measure(&disk, &pt2(0.0, 0.0));
        assert!((v0.re - 2.0 * PI).abs() < 1e-13);
        // circle at |xi| = 1: 2 pi J0(2 pi), against an arc-length quadrature
        // oracle
        let rule = gauss_legendre(200);
        let mut re = 0.0;
        for (t, w) in rule.nodes.iter().zip(&rule.weights) {
            let th = PI * t; // theta in [-pi, pi], jacobian pi
            re += w * PI * (2.0 * PI * th.cos()).cos();
        }
        let v = fourier_perimeter_measure(&disk, &pt2(1.0, 0.0));
        assert!((v.re - re).abs() < 1e-10, "got {} oracle {re}", v.re);
        assert!((v.re - 2.0 * PI * bessel_j0(2.0 * PI)).abs() < 1e-12);
        assert!(v.im.abs() < 1e-12);
        // unit square at xi = (1,0): 4-edge sum against quadrature
        let mut o = Complex64::new(0.0, 0.0);
        for edge in [
            ([0.0, 0.0], [1.0, 0.0]),
            ([1.0, 0.0], [1.0, 1.0]),
            ([1.0, 1.0], [0.0, 1.0]),
            ([0.0, 1.0], [0.0, 0.0]),
        ] {
            let rule = gauss_legendre(60);
            let mut acc = Complex64::new(0.0, 0.0);
            let len = (((edge.1[0] - edge.0[0]) as f64).powi(2)
                + ((edge.1[1] - edge.0[1]) as f64).powi(2))
            .sqrt();
            for (t, w) in rule.nodes.iter().zip(&rule.weights) {
                let s = 0.5 * (t + 1.0);
                let x = edge.0[0] + s * (edge.1[0] - edge.0[0]);
                let ph = -2.0 * PI * x;
                acc += Complex64::new(ph.cos(), ph.sin()) * *w * (0.5 * len);
            }
            o += acc;
        }
        let v = fourier_perimeter_measure(&sq, &pt2(1.0, 0.0));
        assert!((v - o).norm() < 1e-12);
    }

    #[test]
    fn ball3_ft_at_zero_is_volume() {
        let b = Shape::ball(3, &[0.0, 0.0, 0.0], 0.8).unwrap();
        let v = fourier_indicator(&b, &[0.0, 0.0, 0.0]);
        assert!((v.re - 4.0 / 3.0 * PI * 0.8f64.powi(3)).abs() < 1e-13);
        // continuity across the small-argument branch of the radial form
        let rho_cut = 1e-2 / (2.0 * PI * 0.8);
        let v1 = fourier_indicator(&b, &[rho_cut * (1.0 - 1e-9), 0.0, 0.0]);
        let v2 = fourier_indicator(&b, &[rho_cut * (1.0 + 1e-9), 0.0, 0.0]);
        assert!((v1.re - v2.re).abs() < 1e-11, "{} vs {}", v1.re, v2.re);
    }

    #[test]
    fn whisker_ft_equals_disk_ft() {
        let w = crate::geometry::make_whisker_disk(1.0).unwrap();
        let s = w.as_shape();
        let xi = pt2(0.37, -0.81);
        let a = fourier_indicator(&s, &xi);
        let b = fourier_indicator(&Shape::unit_disk(), &xi);
        assert_eq!(a, b);
    }
}
