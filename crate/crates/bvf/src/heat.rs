//! Heat-content functionals H(t) = ∫ (T(t^2) u) v and their short-time
//! jump-product estimators.
//!
//! The t^2 parametrization is used throughout, so H'(t) -> -J(u,v)/sqrt(pi)
//! and sqrt(pi) (H(0) - H(t))/t -> J(u,v) hold verbatim. Axis-box term pairs
//! evaluate through an exact separable erf closed form; ball pairs with a
//! common center reduce to a 1D radial Gaussian integral of the lens area;
//! everything else goes through tensor Gauss-Hermite in the Gaussian
//! variable with a node-doubling error estimate.

use crate::error::{Error, Result};
use crate::geometry::{
    inner_product, lens_area, lens_volume, overlap_measure, BVFunction, Region, Resolved, Shape,
};
use crate::quad::{gauss_hermite, gauss_legendre, integrate_gl, Accum};
use crate::spectral::{AsymptoteEstimate, EstimatorKind};
use crate::special::{erf, erfc};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeatMethod {
    ClosedForm,
    Quadrature,
}

#[derive(Clone, Copy, Debug)]
pub struct HeatEval {
    pub value: f64,
    pub err: f64,
    pub method: HeatMethod,
}

/// Second antiderivative of the 1D heat kernel at time t^2:
/// Psi(z) = (z/2)(1 + erf(z/(2t))) + (t/sqrt(pi)) exp(-z^2/(4t^2)).
fn psi(z: f64, t: f64) -> f64 {
    let w = z / (2.0 * t);
    let tail = t / PI.sqrt() * (-w * w).exp();
    if w >= 0.0 {
        0.5 * z * (1.0 + erf(w)) + tail
    } else {
        // 1 + erf(w) = erfc(-w); avoids cancellation for large negative z
        0.5 * z * erfc(-w) + tail
    }
}

/// ∫_a^b ∫_c^d G_{t^2}(x - y) dy dx.
fn axis_pair_factor(a: f64, b: f64, c: f64, d: f64, t: f64) -> f64 {
    psi(b - c, t) - psi(b - d, t) - psi(a - c, t) + psi(a - d, t)
}

fn pair_heat(r1: &Resolved, r2: &Resolved, d: usize, t: f64) -> Result<HeatEval> {
    match (r1, r2) {
        (Resolved::Box { lo: l1, hi: h1, .. }, Resolved::Box { lo: l2, hi: h2, .. }) => {
            let mut v = 1.0;
            for k in 0..d {
                v *= axis_pair_factor(l1[k], h1[k], l2[k], h2[k], t);
            }
            Ok(HeatEval {
                value: v,
                err: 1e-14 * v.abs().max(1.0),
                method: HeatMethod::ClosedForm,
            })
        }
        (Resolved::Ball { c: c1, r: ra, .. }, Resolved::Ball { c: c2, r: rb, .. })
            if crate::vec::dist(c1, c2, d) < 1e-14 =>
        {
            radial_pair_heat(*ra, *rb, d, t)
        }
        _ => {
            if d != 2 {
                return Err(Error::quadrature(
                    "heat_content",
                    "non-box term pairs are only integrated in d = 2 (or for \
                     concentric balls)",
                ));
            }
            gauss_hermite_pair_heat(r1, r2, t)
        }
    }
}

/// Concentric balls: H = ∫ G_{t^2}(z) lens(|z|) dz reduced to one radial
/// integral, split at the lens kinks.
fn radial_pair_heat(ra: f64, rb: f64, d: usize, t: f64) -> Result<HeatEval> {
    let s_max = ((ra + rb) / (2.0 * t)).min(6.5);
    let s_kink = ((ra - rb).abs() / (2.0 * t)).min(s_max);
    let integrand = |s: f64| -> f64 {
        let rho = 2.0 * t * s;
        match d {
            2 => 2.0 * s * (-s * s).exp() * lens_area(ra, rb, rho),
            _ => 4.0 / PI.sqrt() * s * s * (-s * s).exp() * lens_volume(ra, rb, rho),
        }
    };
    let r64 = gauss_legendre(64);
    let r128 = gauss_legendre(128);
    let mut value = 0.0;
    let mut err = 0.0;
    for (lo, hi) in [(0.0, s_kink), (s_kink, s_max)] {
        if hi - lo < 1e-15 {
            continue;
        }
        let coarse = integrate_gl(&mut |s| integrand(s), lo, hi, &r64);
        let fine = integrate_gl(&mut |s| integrand(s), lo, hi, &r128);
        value += fine;
        err += (fine - coarse).abs();
    }
    Ok(HeatEval {
        value,
        err,
        method: HeatMethod::Quadrature,
    })
}

/// General 2D pair: H = (1/pi) Σ_{ij} w_i w_j C(2 t s_i, 2 t s_j), where C
/// is the exact translated-overlap area. Nodes double until the change is
/// below 1e-8.
fn gauss_hermite_pair_heat(r1: &Resolved, r2: &Resolved, t: f64) -> Result<HeatEval> {
    let eval = |n: usize| -> Result<f64> {
        let rule = gauss_hermite(n);
        let mut acc = Accum::new();
        for (si, wi) in rule.nodes.iter().zip(&rule.weights) {
            for (sj, wj) in rule.nodes.iter().zip(&rule.weights) {
                let z = [2.0 * t * si, 2.0 * t * sj, 0.0];
                let c = overlap_measure(&r1.shifted(&z), r2)?;
                acc.add(wi * wj * c);
            }
        }
        Ok(acc.value() / PI)
    };
    let mut n = 64;
    let mut prev = eval(n)?;
    for _ in 0..2 {
        n *= 2;
        let cur = eval(n)?;
        let err = (cur - prev).abs();
        if err < 1e-8 * (1.0 + cur.abs()) {
            return Ok(HeatEval {
                value: cur,
                err,
                method: HeatMethod::Quadrature,
            });
        }
        prev = cur;
    }
    Err(Error::quadrature(
        "heat_content",
        format!("Gauss-Hermite did not settle at {n} nodes per axis"),
    ))
}

/// H(t) = ∫ (T(t^2) u)(x) v(x) dx.
pub fn heat_content(u: &BVFunction, v: &BVFunction, t: f64) -> Result<HeatEval> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput(format!("heat time {t} must be > 0")));
    }
    if u.dim() != v.dim() {
        return Err(Error::InvalidInput("dimension mismatch".into()));
    }
    let d = u.dim();
    let ru: Vec<Resolved> = u
        .terms()
        .iter()
        .map(|(_, s)| Resolved::from_shape(s))
        .collect();
    let rv: Vec<Resolved> = v
        .terms()
        .iter()
        .map(|(_, s)| Resolved::from_shape(s))
        .collect();
    let mut acc = Accum::new();
    let mut err = 0.0;
    let mut method = HeatMethod::ClosedForm;
    for (i, (wi, _)) in u.terms().iter().enumerate() {
        for (j, (wj, _)) in v.terms().iter().enumerate() {
            let pe = pair_heat(&ru[i], &rv[j], d, t)?;
            acc.add(wi * wj * pe.value);
            err += (wi * wj).abs() * pe.err;
            if pe.method == HeatMethod::Quadrature {
                method = HeatMethod::Quadrature;
            }
        }
    }
    Ok(HeatEval {
        value: acc.value(),
        err,
        method,
    })
}

/// Sampled heat-content curve on a decreasing t grid, with H(0) = ∫ u v.
#[derive(Clone, Debug)]
pub struct HeatContentCurve {
    pub ts: Vec<f64>,
    pub values: Vec<f64>,
    pub errs: Vec<f64>,
    pub methods: Vec<HeatMethod>,
    pub h0: f64,
}

pub fn heat_curve(u: &BVFunction, v: &BVFunction, ts: &[f64]) -> Result<HeatContentCurve> {
    let mut ts = ts.to_vec();
    ts.sort_by(|a, b| b.total_cmp(a));
    let h0 = inner_product(u, v)?;
    let mut values = Vec::new();
    let mut errs = Vec::new();
    let mut methods = Vec::new();
    for &t in &ts {
        let e = heat_content(u, v, t)?;
        values.push(e.value);
        errs.push(e.err);
        methods.push(e.method);
    }
    Ok(HeatContentCurve {
        ts,
        values,
        errs,
        methods,
        h0,
    })
}

/// sqrt(pi) (H(0) - H(t)) / t over a decreasing grid, Richardson-extrapolated
/// to t = 0 assuming a first-order correction. The unextrapolated trace
/// stays in `estimates`.
pub fn heat_jump_estimate(
    u: &BVFunction,
    v: &BVFunction,
    ts: &[f64],
) -> Result<AsymptoteEstimate> {
    let curve = heat_curve(u, v, ts)?;
    let estimates: Vec<f64> = curve
        .ts
        .iter()
        .zip(&curve.values)
        .map(|(t, h)| PI.sqrt() * (curve.h0 - h) / t)
        .collect();
    let n = estimates.len();
    let (limit, unc) = if n >= 2 {
        let (t1, e1) = (curve.ts[n - 2], estimates[n - 2]);
        let (t0, e0) = (curve.ts[n - 1], estimates[n - 1]);
        let slope = (e1 - e0) / (t1 - t0);
        let lim = e0 - slope * t0;
        (lim, 0.5 * (lim - e0).abs())
    } else {
        (estimates[0], f64::INFINITY)
    };
    Ok(AsymptoteEstimate {
        kind: EstimatorKind::Heat,
        params: curve.ts,
        estimates,
        limit,
        uncertainty: unc,
    })
}

/// H'(t) by central finite differences with step t * 1e-4.
pub fn heat_derivative(u: &BVFunction, v: &BVFunction, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput(format!("heat time {t} must be > 0")));
    }
    let h = t * 1e-4;
    let hp = heat_content(u, v, t + h)?;
    let hm = heat_content(u, v, t - h)?;
    Ok((hp.value - hm.value) / (2.0 * h))
}

/// The module's second estimator: -sqrt(pi) H'(t) -> J(u, v).
pub fn heat_derivative_estimate(
    u: &BVFunction,
    v: &BVFunction,
    ts: &[f64],
) -> Result<AsymptoteEstimate> {
    let mut params = ts.to_vec();
    params.sort_by(|a, b| b.total_cmp(a));
    let estimates: Vec<f64> = params
        .iter()
        .map(|t| heat_derivative(u, v, *t).map(|d| -PI.sqrt() * d))
        .collect::<Result<_>>()?;
    let n = estimates.len();
    let (limit, unc) = if n >= 2 {
        let slope = (estimates[n - 2] - estimates[n - 1]) / (params[n - 2] - params[n - 1]);
        let lim = estimates[n - 1] - slope * params[n - 1];
        (lim, 0.5 * (lim - estimates[n - 1]).abs())
    } else {
        (estimates[0], f64::INFINITY)
    };
    Ok(AsymptoteEstimate {
        kind: EstimatorKind::HeatDerivative,
        params,
        estimates,
        limit,
        uncertainty: unc,
    })
}

/// Relative heat content (1/t) ∫_{Ω^c} T(t^2) 1_Ω = (|Ω| - H(t)) / t;
/// bounded as t -> 0 exactly when Ω has finite perimeter, with limit
/// Per(Ω)/sqrt(pi) for catalog shapes.
pub fn relative_heat_content_set(omega: &Shape, t: f64) -> Result<f64> {
    let u = BVFunction::indicator(omega.clone());
    let h = heat_content(&u, &u, t)?;
    Ok((omega.volume() - h.value) / t)
}

/// Whisker regions delegate to their a.e.-equal shape (the heat semigroup
/// cannot see the Lebesgue-null whisker).
pub fn relative_heat_content_region(region: &Region, t: f64) -> Result<f64> {
    match region {
        Region::Shape(s) => relative_heat_content_set(s, t),
        Region::Whisker(w) => relative_heat_content_set(&w.as_shape(), t),
    }
}
