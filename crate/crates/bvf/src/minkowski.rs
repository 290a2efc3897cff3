//! Outer Minkowski content, dilation measures mu_h = (1_{Ω+hB} - 1_Ω)/h,
//! and the set-theoretic derivative of the Fourier transform.
//!
//! The positive branch (convex polygons, balls) evaluates 1-hat_{Ω+hB}
//! through the offset boundary (straight edges plus vertex arcs); the
//! negative branch is the whisker disk, whose dilation volume is closed
//! form, so the h -> 0 quotient at frequency zero exhibits the SM != Per
//! gap exactly.

use crate::error::{Error, Result};
use crate::geometry::{dilated_volume, McOpts, Region, Shape, ShapeKind, VolumeMethod};
use crate::quad::{gauss_legendre, Accum};
use crate::spectral::{fourier_indicator, fourier_perimeter_measure, sinc_pi};
use crate::vec::Point;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Default geometric h grid: ratio 1/2 from 0.2 down to 0.2 / 2^7.
pub fn default_h_grid() -> Vec<f64> {
    (0..8).map(|k| 0.2 / 2f64.powi(k)).collect()
}

/// Offset boundary of a convex region at distance h: translated edges plus
/// vertex arcs whose angular spans add up to a full turn.
#[derive(Clone, Debug)]
pub struct RoundedRegion {
    pub h: f64,
    pub edges: Vec<OffsetEdge>,
    pub arcs: Vec<VertexArc>,
    pub steiner_area: f64,
}

#[derive(Clone, Debug)]
pub struct OffsetEdge {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub normal: [f64; 2],
}

#[derive(Clone, Debug)]
pub struct VertexArc {
    pub center: [f64; 2],
    pub radius: f64,
    pub th0: f64,
    pub th1: f64,
}

impl RoundedRegion {
    /// Builds the offset boundary of a convex CCW polygon.
    pub fn from_convex_polygon(verts: &[[f64; 2]], h: f64) -> Result<RoundedRegion> {
        if !(h > 0.0) {
            return Err(Error::InvalidInput(format!("offset h = {h} must be > 0")));
        }
        let n = verts.len();
        if n < 3 {
            return Err(Error::InvalidInput("polygon needs >= 3 vertices".into()));
        }
        let mut area2 = 0.0;
        let mut per = 0.0;
        let mut edges = Vec::with_capacity(n);
        let mut arcs = Vec::with_capacity(n);
        for i in 0..n {
            let a = verts[i];
            let b = verts[(i + 1) % n];
            let c = verts[(i + 2) % n];
            area2 += a[0] * b[1] - b[0] * a[1];
            let d1 = [b[0] - a[0], b[1] - a[1]];
            let d2 = [c[0] - b[0], c[1] - b[1]];
            if d1[0] * d2[1] - d1[1] * d2[0] < -1e-12 {
                return Err(Error::InvalidInput(
                    "offset boundary requires a convex polygon".into(),
                ));
            }
            let len = (d1[0] * d1[0] + d1[1] * d1[1]).sqrt();
            per += len;
            let n1 = [d1[1] / len, -d1[0] / len];
            edges.push(OffsetEdge {
                a: [a[0] + h * n1[0], a[1] + h * n1[1]],
                b: [b[0] + h * n1[0], b[1] + h * n1[1]],
                normal: n1,
            });
            let len2 = (d2[0] * d2[0] + d2[1] * d2[1]).sqrt();
            let n2 = [d2[1] / len2, -d2[0] / len2];
            let th0 = n1[1].atan2(n1[0]);
            let mut th1 = n2[1].atan2(n2[0]);
            while th1 < th0 {
                th1 += 2.0 * PI;
            }
            arcs.push(VertexArc {
                center: b,
                radius: h,
                th0,
                th1,
            });
        }
        let area = 0.5 * area2;
        Ok(RoundedRegion {
            h,
            edges,
            arcs,
            steiner_area: area + h * per + PI * h * h,
        })
    }

    pub fn arc_span_total(&self) -> f64 {
        self.arcs.iter().map(|a| a.th1 - a.th0).sum()
    }
}

/// Fourier transform of the indicator of Ω + h B_1 via the boundary form
/// of the divergence theorem: closed form on offset edges, Gauss quadrature
/// with node doubling on the vertex arcs.
pub fn ft_rounded(region: &RoundedRegion, xi: &Point) -> Result<Complex64> {
    let rho2 = xi[0] * xi[0] + xi[1] * xi[1];
    if rho2.sqrt() < 1e-9 {
        return Ok(Complex64::new(region.steiner_area, 0.0));
    }
    let mut s = Complex64::new(0.0, 0.0);
    for e in &region.edges {
        let xin = xi[0] * e.normal[0] + xi[1] * e.normal[1];
        if xin == 0.0 {
            continue;
        }
        let mid = [0.5 * (e.a[0] + e.b[0]), 0.5 * (e.a[1] + e.b[1])];
        let delta = [e.b[0] - e.a[0], e.b[1] - e.a[1]];
        let len = (delta[0] * delta[0] + delta[1] * delta[1]).sqrt();
        let y = xi[0] * delta[0] + xi[1] * delta[1];
        let phase = cis(-2.0 * PI * (xi[0] * mid[0] + xi[1] * mid[1]));
        s += phase * (xin * len * sinc_pi(y));
    }
    for arc in &region.arcs {
        s += arc_flux(arc, xi)?;
    }
    Ok(Complex64::new(0.0, 1.0) * s / (2.0 * PI * rho2))
}

/// ∫_arc e^{-2 pi i xi . x} (xi . nu) ds with nu the outward radial field.
fn arc_flux(arc: &VertexArc, xi: &Point) -> Result<Complex64> {
    let eval = |n: usize| -> Complex64 {
        let rule = gauss_legendre(n);
        let mid = 0.5 * (arc.th0 + arc.th1);
        let half = 0.5 * (arc.th1 - arc.th0);
        let mut re = Accum::new();
        let mut im = Accum::new();
        for (t, w) in rule.nodes.iter().zip(&rule.weights) {
            let th = mid + half * t;
            let (sn, cs) = th.sin_cos();
            let x = [
                arc.center[0] + arc.radius * cs,
                arc.center[1] + arc.radius * sn,
            ];
            let flux = (xi[0] * cs + xi[1] * sn) * arc.radius;
            let ph = cis(-2.0 * PI * (xi[0] * x[0] + xi[1] * x[1]));
            re.add(w * flux * ph.re);
            im.add(w * flux * ph.im);
        }
        Complex64::new(re.value(), im.value()) * half
    };
    let mut n = 32;
    let mut prev = eval(n);
    for _ in 0..3 {
        n *= 2;
        let cur = eval(n);
        if (cur - prev).norm() <= 1e-10 * (1.0 + cur.norm()) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::quadrature(
        "ft_rounded",
        format!("arc quadrature did not settle at {n} nodes"),
    ))
}

fn cis(t: f64) -> Complex64 {
    let (s, c) = t.sin_cos();
    Complex64::new(c, s)
}

/// Fourier transform of 1_{Ω + h B_1} for the supported positive-branch
/// regions (convex polygon / axis box / ball).
pub fn ft_dilated(shape: &Shape, h: f64, xi: &Point) -> Result<Complex64> {
    match shape.kind() {
        ShapeKind::Ball { center, radius } => {
            let grown = Shape::ball(shape.dim(), center, radius + h)?
                .with_rotation(*shape.rotation())?
                .with_translation(&shape.translation()[..shape.dim()])?;
            Ok(fourier_indicator(&grown, xi))
        }
        _ => {
            let verts = convex_vertices(shape)?;
            let rr = RoundedRegion::from_convex_polygon(&verts, h)?;
            ft_rounded(&rr, xi)
        }
    }
}

/// World-coordinate vertices of a convex polygonal shape.
fn convex_vertices(shape: &Shape) -> Result<Vec<[f64; 2]>> {
    if shape.dim() != 2 {
        return Err(Error::InvalidInput(
            "rounded bodies are only offset in d = 2".into(),
        ));
    }
    let verts = match crate::geometry::Resolved::from_shape(shape) {
        crate::geometry::Resolved::Box { lo, hi, .. } => vec![
            [lo[0], lo[1]],
            [hi[0], lo[1]],
            [hi[0], hi[1]],
            [lo[0], hi[1]],
        ],
        crate::geometry::Resolved::Poly2 { verts } => verts,
        _ => return Err(Error::InvalidInput("unsupported region".into())),
    };
    Ok(verts)
}

/// One row of the dilation family.
#[derive(Clone, Debug)]
pub struct DilationRow {
    pub h: f64,
    pub volume: f64,
    /// mu_h total mass (|Ω_h| - |Ω|) / h.
    pub mu_mass: f64,
    pub ci99: Option<f64>,
    pub method: VolumeMethod,
}

/// Dilation family of a region over an h grid with the extrapolated outer
/// Minkowski content.
#[derive(Clone, Debug)]
pub struct DilationFamily {
    pub rows: Vec<DilationRow>,
    pub sm_estimate: f64,
    pub residual: f64,
}

/// Outer Minkowski content lim_h (|Ω_h| - |Ω|)/h by linear-in-h
/// extrapolation of the dilation family.
pub fn outer_minkowski_content(
    region: &Region,
    h_grid: &[f64],
    seed: u64,
) -> Result<DilationFamily> {
    let mut hs = h_grid.to_vec();
    hs.sort_by(|a, b| b.total_cmp(a));
    let base = region.volume();
    let mut rows = Vec::new();
    for (i, &h) in hs.iter().enumerate() {
        let dv = dilated_volume(
            region,
            h,
            McOpts {
                samples: 4_000_000,
                seed,
                stream: i as u64,
            },
        )?;
        rows.push(DilationRow {
            h,
            volume: dv.value,
            mu_mass: (dv.value - base) / h,
            ci99: dv.ci99.map(|c| c / h),
            method: dv.method,
        });
    }
    let n = rows.len();
    let (sm, residual) = if n >= 2 {
        let (h1, m1) = (rows[n - 2].h, rows[n - 2].mu_mass);
        let (h0, m0) = (rows[n - 1].h, rows[n - 1].mu_mass);
        let slope = (m1 - m0) / (h1 - h0);
        let lim = m0 - slope * h0;
        let ci = rows[n - 1].ci99.unwrap_or(0.0) + rows[n - 2].ci99.unwrap_or(0.0);
        (lim, (lim - m0).abs() * 0.5 + ci)
    } else {
        (rows[0].mu_mass, f64::INFINITY)
    };
    Ok(DilationFamily {
        rows,
        sm_estimate: sm,
        residual,
    })
}

/// Trace of the set-derivative difference quotient
/// (1-hat_{Ω+hB}(ξ) - 1-hat_Ω(ξ)) / h with its h -> 0 extrapolation and the
/// predicted limit F{|D 1_Ω|}(ξ).
#[derive(Clone, Debug)]
pub struct QuotientTrace {
    pub xi: Point,
    pub hs: Vec<f64>,
    pub values: Vec<Complex64>,
    pub limit: Complex64,
    pub target: Complex64,
}

pub fn ft_difference_quotient(
    region: &Region,
    xi: &Point,
    h_grid: &[f64],
) -> Result<QuotientTrace> {
    let mut hs = h_grid.to_vec();
    hs.sort_by(|a, b| b.total_cmp(a));
    match region {
        Region::Shape(shape) => {
            let base = fourier_indicator(shape, xi);
            let mut values = Vec::new();
            for &h in &hs {
                let v = ft_dilated(shape, h, xi)?;
                values.push((v - base) / h);
            }
            let limit = extrapolate_complex(&hs, &values);
            Ok(QuotientTrace {
                xi: *xi,
                hs,
                values,
                limit,
                target: fourier_perimeter_measure(shape, xi),
            })
        }
        Region::Whisker(w) => {
            let rho = crate::vec::norm(xi, 2);
            if rho > 1e-12 {
                return Err(Error::InvalidInput(
                    "the whisker-disk quotient is evaluated at xi = 0, where the \
                     Minkowski gap already shows"
                        .into(),
                ));
            }
            let base = PI;
            let mut values = Vec::new();
            for &h in &hs {
                let a = w.dilated_volume_exact(h).ok_or_else(|| {
                    Error::InvalidInput(format!("whisker closed form needs h < L, got {h}"))
                })?;
                values.push(Complex64::new((a - base) / h, 0.0));
            }
            let limit = extrapolate_complex(&hs, &values);
            Ok(QuotientTrace {
                xi: *xi,
                hs,
                values,
                // F{|D 1_Ω|}(0) = Per of the a.e.-equal disk, NOT the SM
                target: Complex64::new(w.perimeter(), 0.0),
                limit,
            })
        }
    }
}

fn extrapolate_complex(hs: &[f64], values: &[Complex64]) -> Complex64 {
    let n = values.len();
    if n < 2 {
        return values[0];
    }
    let (h1, v1) = (hs[n - 2], values[n - 2]);
    let (h0, v0) = (hs[n - 1], values[n - 1]);
    let slope = (v1 - v0) / (h1 - h0);
    v0 - slope * h0
}

/// Bounded continuous test functions for the weak-convergence probe.
#[derive(Clone, Debug)]
pub enum TestFn {
    /// Re part of x -> e^{-2 pi i xi . x}.
    ExpCos(Point),
    /// Im part of the same exponential.
    ExpSin(Point),
    /// Radial bump (1 - (|x-c|/rho)^2)^2 supported on |x-c| < rho.
    RadialBump { center: [f64; 2], radius: f64 },
}

impl TestFn {
    pub fn id(&self) -> String {
        match self {
            TestFn::ExpCos(xi) => format!("cos({:.3},{:.3})", xi[0], xi[1]),
            TestFn::ExpSin(xi) => format!("sin({:.3},{:.3})", xi[0], xi[1]),
            TestFn::RadialBump { center, radius } => {
                format!("bump({:.3},{:.3};{:.3})", center[0], center[1], radius)
            }
        }
    }

    fn eval(&self, x: &[f64; 2]) -> f64 {
        match self {
            TestFn::ExpCos(xi) => (-2.0 * PI * (xi[0] * x[0] + xi[1] * x[1])).cos(),
            TestFn::ExpSin(xi) => (-2.0 * PI * (xi[0] * x[0] + xi[1] * x[1])).sin(),
            TestFn::RadialBump { center, radius } => {
                let d2 = (x[0] - center[0]).powi(2) + (x[1] - center[1]).powi(2);
                let q = 1.0 - d2 / (radius * radius);
                if q > 0.0 {
                    q * q
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProbeRow {
    pub phi_id: String,
    pub h: f64,
    pub value: f64,
    pub target: f64,
    pub abs_err: f64,
}

#[derive(Clone, Debug)]
pub struct ProbeReport {
    pub rows: Vec<ProbeRow>,
    /// Per test function: (phi id, extrapolated value, target, converged).
    pub verdicts: Vec<(String, f64, f64, bool)>,
}

/// Weak-convergence probe: traces of ∫ φ dμ_h against ∫ φ d|D 1_Ω| for each
/// test function.
pub fn weak_convergence_probe(
    shape: &Shape,
    phis: &[TestFn],
    h_grid: &[f64],
) -> Result<ProbeReport> {
    let mut hs = h_grid.to_vec();
    hs.sort_by(|a, b| b.total_cmp(a));
    let mut rows = Vec::new();
    let mut verdicts = Vec::new();
    for phi in phis {
        let target = boundary_integral(shape, phi)?;
        let mut trace = Vec::new();
        for &h in &hs {
            let v = shell_integral(shape, phi, h)? / h;
            rows.push(ProbeRow {
                phi_id: phi.id(),
                h,
                value: v,
                target,
                abs_err: (v - target).abs(),
            });
            trace.push(v);
        }
        let n = trace.len();
        let extrap = if n >= 2 {
            let slope = (trace[n - 2] - trace[n - 1]) / (hs[n - 2] - hs[n - 1]);
            trace[n - 1] - slope * hs[n - 1]
        } else {
            trace[0]
        };
        let tol = 1e-3 * (1.0 + target.abs());
        verdicts.push((phi.id(), extrap, target, (extrap - target).abs() <= tol));
    }
    Ok(ProbeReport { rows, verdicts })
}

/// ∫_{Ω_h \ Ω} φ dx, decomposed exactly into edge strips and vertex sectors
/// for convex polygons, or an annulus for balls.
fn shell_integral(shape: &Shape, phi: &TestFn, h: f64) -> Result<f64> {
    let rule = gauss_legendre(48);
    match shape.kind() {
        ShapeKind::Ball { center, radius } => {
            let mut c = [0.0; 3];
            c[..2].copy_from_slice(center);
            let c = crate::vec::add(&shape.rotation().apply(&c), shape.translation());
            let mut acc = Accum::new();
            for (tt, wt) in rule.nodes.iter().zip(&rule.weights) {
                let th = PI * (tt + 1.0); // [0, 2 pi]
                let (sn, cs) = th.sin_cos();
                let mut inner = 0.0;
                for (tr, wr) in rule.nodes.iter().zip(&rule.weights) {
                    let r = radius + 0.5 * h * (tr + 1.0);
                    inner += wr * 0.5 * h * r * phi.eval(&[c[0] + r * cs, c[1] + r * sn]);
                }
                acc.add(wt * PI * inner);
            }
            Ok(acc.value())
        }
        _ => {
            let verts = convex_vertices(shape)?;
            let rr = RoundedRegion::from_convex_polygon(&verts, h)?;
            let mut acc = Accum::new();
            let n = verts.len();
            for i in 0..n {
                let a = verts[i];
                let b = verts[(i + 1) % n];
                let d = [b[0] - a[0], b[1] - a[1]];
                let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
                let nrm = [d[1] / len, -d[0] / len];
                for (ts, ws) in rule.nodes.iter().zip(&rule.weights) {
                    let s = 0.5 * (ts + 1.0);
                    let base = [a[0] + s * d[0], a[1] + s * d[1]];
                    let mut inner = 0.0;
                    for (tq, wq) in rule.nodes.iter().zip(&rule.weights) {
                        let q = 0.5 * h * (tq + 1.0);
                        inner += wq
                            * 0.5
                            * h
                            * phi.eval(&[base[0] + q * nrm[0], base[1] + q * nrm[1]]);
                    }
                    acc.add(ws * 0.5 * len * inner);
                }
            }
            for arc in &rr.arcs {
                let mid = 0.5 * (arc.th0 + arc.th1);
                let half = 0.5 * (arc.th1 - arc.th0);
                for (tt, wt) in rule.nodes.iter().zip(&rule.weights) {
                    let th = mid + half * tt;
                    let (sn, cs) = th.sin_cos();
                    let mut inner = 0.0;
                    for (tq, wq) in rule.nodes.iter().zip(&rule.weights) {
                        let q = 0.5 * h * (tq + 1.0);
                        inner += wq
                            * 0.5
                            * h
                            * q
                            * phi.eval(&[arc.center[0] + q * cs, arc.center[1] + q * sn]);
                    }
                    acc.add(wt * half * inner);
                }
            }
            Ok(acc.value())
        }
    }
}

/// ∫_{∂Ω} φ dH^1, adaptively (bump test functions are only C^1 at their
/// support edge).
fn boundary_integral(shape: &Shape, phi: &TestFn) -> Result<f64> {
    match shape.kind() {
        ShapeKind::Ball { center, radius } => {
            let mut c = [0.0; 3];
            c[..2].copy_from_slice(center);
            let c = crate::vec::add(&shape.rotation().apply(&c), shape.translation());
            let (v, _) = crate::quad::adaptive_gl(
                &mut |th: f64| {
                    let (sn, cs) = th.sin_cos();
                    radius * phi.eval(&[c[0] + radius * cs, c[1] + radius * sn])
                },
                0.0,
                2.0 * PI,
                1e-12,
                "weak_probe_target",
            )?;
            Ok(v)
        }
        _ => {
            let verts = convex_vertices(shape)?;
            let n = verts.len();
            let mut acc = Accum::new();
            for i in 0..n {
                let a = verts[i];
                let b = verts[(i + 1) % n];
                let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
                let (v, _) = crate::quad::adaptive_gl(
                    &mut |s: f64| {
                        phi.eval(&[a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]) * len
                    },
                    0.0,
                    1.0,
                    1e-12,
                    "weak_probe_target",
                )?;
                acc.add(v);
            }
            Ok(acc.value())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_whisker_disk;
    use crate::vec::pt2;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rounded_region_invariants() {
        let verts = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let rr = RoundedRegion::from_convex_polygon(&verts, 0.2).unwrap();
        assert!((rr.arc_span_total() - 2.0 * PI).abs() < 1e-12);
        assert!((rr.steiner_area - (1.0 + 0.8 + PI * 0.04)).abs() < 1e-12);
        let v = ft_rounded(&rr, &pt2(0.0, 0.0)).unwrap();
        assert!((v.re - rr.steiner_area).abs() < 1e-12);
    }

    #[test]
    fn ft_rounded_matches_monte_carlo_oracle() {
        // square, h = 0.1, xi = (1,1): 1e7-sample MC integration oracle
        let verts = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let h = 0.1;
        let rr = RoundedRegion::from_convex_polygon(&verts, h).unwrap();
        let xi = pt2(1.0, 1.0);
        let exact = ft_rounded(&rr, &xi).unwrap();
        let sq = Shape::unit_square();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 10_000_000u64;
        let (mut re, mut im) = (0.0f64, 0.0f64);
        let vol = (1.0 + 2.0 * h) * (1.0 + 2.0 * h);
        for _ in 0..n {
            let x = -h + rng.gen::<f64>() * (1.0 + 2.0 * h);
            let y = -h + rng.gen::<f64>() * (1.0 + 2.0 * h);
            if sq.distance(&pt2(x, y)) <= h {
                let ph = -2.0 * PI * (x + y);
                re += ph.cos();
                im += ph.sin();
            }
        }
        let oracle = Complex64::new(re, im) * (vol / n as f64);
        // MC standard error ~ vol/sqrt(n) ~ 4.5e-4 per component
        assert!(
            (exact - oracle).norm() < 3.0 * 9e-4,
            "exact {exact} vs oracle {oracle}"
        );
    }

    #[test]
    fn quotient_square_at_zero_gives_perimeter() {
        let r = Region::Shape(Shape::unit_square());
        let tr = ft_difference_quotient(&r, &pt2(0.0, 0.0), &default_h_grid()).unwrap();
        assert!((tr.limit.re - 4.0).abs() < 1e-9, "limit {}", tr.limit);
        assert!((tr.target.re - 4.0).abs() < 1e-12);
    }

    #[test]
    fn quotient_square_matches_perimeter_measure_ft() {
        let r = Region::Shape(Shape::unit_square());
        let xi = pt2(1.0, 0.0);
        let tr = ft_difference_quotient(&r, &xi, &default_h_grid()).unwrap();
        assert!(
            (tr.limit - tr.target).norm() < 1e-4,
            "limit {} target {}",
            tr.limit,
            tr.target
        );
    }

    #[test]
    fn quotient_ball_h_zero_consistency() {
        // ft_dilated at h -> 0 converges to the plain indicator transform
        let disk = Shape::unit_disk();
        let xi = pt2(0.6, -0.3);
        let base = fourier_indicator(&disk, &xi);
        let mut prev = f64::INFINITY;
        for k in 1..=6 {
            let h = 0.2 / 2f64.powi(k);
            let v = ft_dilated(&disk, h, &xi).unwrap();
            let err = (v - base).norm();
            assert!(err < prev + 1e-12);
            prev = err;
        }
        assert!(prev < 1e-2);
    }

    #[test]
    fn ft_rounded_tends_to_indicator_ft() {
        // 1-hat_{Omega+hB} -> 1-hat_Omega pointwise; linear h-extrapolation
        // of the trace lands within 1e-6 at ten sample frequencies
        let sq = Shape::unit_square();
        let grid = default_h_grid();
        let freqs = [
            (0.3, 0.0),
            (1.0, 0.0),
            (0.0, 0.7),
            (0.5, 0.5),
            (1.3, -0.4),
            (-0.8, 0.9),
            (2.0, 1.0),
            (0.1, -1.6),
            (1.7, 0.3),
            (-0.6, -0.6),
        ];
        for (fx, fy) in freqs {
            let xi = pt2(fx, fy);
            let base = fourier_indicator(&sq, &xi);
            let vals: Vec<Complex64> = grid
                .iter()
                .map(|h| ft_dilated(&sq, *h, &xi).unwrap())
                .collect();
            let n = vals.len();
            let slope = (vals[n - 2] - vals[n - 1]) / (grid[n - 2] - grid[n - 1]);
            let extrap = vals[n - 1] - slope * grid[n - 1];
            assert!(
                (extrap - base).norm() < 1e-6,
                "xi = ({fx},{fy}): extrapolated {extrap} vs {base}"
            );
        }
    }

    #[test]
    fn whisker_negative_branch() {
        let w = make_whisker_disk(1.0).unwrap();
        let r = Region::Whisker(w);
        let tr = ft_difference_quotient(&r, &pt2(0.0, 0.0), &default_h_grid()).unwrap();
        let sm = 2.0 * PI + 2.0;
        assert!(
            (tr.limit.re - sm).abs() < 0.01 * sm,
            "whisker quotient limit {} vs SM {sm}",
            tr.limit.re
        );
        // the quotient does NOT converge to the perimeter-measure transform
        assert!((tr.limit.re - tr.target.re).abs() > 1.9);
    }

    #[test]
    fn omc_convex_and_whisker() {
        let fam =
            outer_minkowski_content(&Region::Shape(Shape::unit_square()), &default_h_grid(), 1)
                .unwrap();
        assert!((fam.sm_estimate - 4.0).abs() < 1e-10, "{}", fam.sm_estimate);
        let fam =
            outer_minkowski_content(&Region::Shape(Shape::unit_disk()), &default_h_grid(), 1)
                .unwrap();
        assert!((fam.sm_estimate - 2.0 * PI).abs() < 1e-10);
        let fam = outer_minkowski_content(
            &Region::Whisker(make_whisker_disk(1.0).unwrap()),
            &default_h_grid(),
            1,
        )
        .unwrap();
        assert!(
            (fam.sm_estimate - (2.0 * PI + 2.0)).abs() < 1e-4,
            "{}",
            fam.sm_estimate
        );
        // dilation volumes are monotone in h (rows are h-descending)
        for w in fam.rows.windows(2) {
            assert!(w[1].volume <= w[0].volume);
        }
    }

    #[test]
    fn weak_probe_square() {
        let sq = Shape::unit_square();
        let phis = vec![
            TestFn::ExpCos(pt2(0.0, 0.0)), // phi = 1: mass condition
            TestFn::ExpCos(pt2(1.0, 0.5)),
            TestFn::ExpSin(pt2(1.0, 0.5)),
            TestFn::RadialBump {
                center: [0.5, 0.0],
                radius: 0.3,
            },
        ];
        let rep = weak_convergence_probe(&sq, &phis, &default_h_grid()).unwrap();
        for (id, got, want, ok) in &rep.verdicts {
            assert!(*ok, "probe {id}: {got} vs {want}");
        }
        // phi = 1 target is the perimeter
        assert!((rep.verdicts[0].2 - 4.0).abs() < 1e-12);
        // bump centered on an edge midpoint: independent 1D line quadrature
        // over the support piece of the bottom edge
        let mut oracle = 0.0;
        let rule = gauss_legendre(200);
        for (t, w) in rule.nodes.iter().zip(&rule.weights) {
            let x = 0.5 + 0.3 * t;
            let d2 = (x - 0.5) * (x - 0.5);
            let q: f64 = 1.0 - d2 / 0.09;
            oracle += w * 0.3 * q.max(0.0).powi(2);
        }
        let bump_target = rep.verdicts[3].2;
        assert!(
            (bump_target - oracle).abs() < 1e-10,
            "bump target {bump_target} vs line oracle {oracle}"
        );
    }
}
