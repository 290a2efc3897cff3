//! Quadratic discrepancy of BV functions over affine transformations.
//!
//! D(u; P_N) = Σ_p 𝔓{u}(p) - N u-hat(0) for the periodization 𝔓, and
//! D_2(u; P_N) averages |D([τ,δ,ρ]u; P_N)|^2 over translations (mass 1),
//! dilations δ in (0,1] (mass 1), and rotations. The rotation measure
//! carries total mass |S^{d-1}|, which is the normalization under which the
//! exact lattice-sum identity
//!
//!   D_2 = Σ_{n != 0} |S(n)|^2 |n|^{-2d-1} ∫_{B_|n|} |ξ|^{d+1} |u-hat|^2 dξ
//!
//! holds with no extra constant; the Monte-Carlo estimator uses the same
//! convention, so the two methods are directly comparable.

use crate::error::{Error, Result};
use crate::geometry::BVFunction;
use crate::quad::Accum;
use crate::spectral::{ProfileOpts, SpectralProfile};
use crate::vec::{ball_volume, sphere_surface, Point, Rotation};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;

// ---------------------------------------------------------------------------
// point sets
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Lattice { m: u32 },
    Composite { seed: u64 },
    Random { seed: u64 },
    Explicit,
}

/// N points on the torus [0,1)^d, possibly with repetitions (composite
/// constructions may collide).
#[derive(Clone, Debug)]
pub struct PointSet {
    pub d: usize,
    pub pts: Vec<Point>,
    pub provenance: Provenance,
}

impl PointSet {
    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    pub fn explicit(d: usize, pts: Vec<Point>) -> Result<PointSet> {
        for p in &pts {
            for k in 0..d {
                if !(0.0..1.0).contains(&p[k]) {
                    return Err(Error::InvalidInput(format!(
                        "point coordinate {} outside [0,1)",
                        p[k]
                    )));
                }
            }
        }
        if pts.is_empty() {
            return Err(Error::InvalidInput("point set must be nonempty".into()));
        }
        Ok(PointSet {
            d,
            pts,
            provenance: Provenance::Explicit,
        })
    }
}

/// The m^d-point lattice {k/m : k in [0,m)^d}; its exponential sums vanish
/// off m Z^d and equal N on it.
pub fn lattice_pointset(m: u32, d: usize) -> Result<PointSet> {
    if m == 0 {
        return Err(Error::InvalidInput("lattice parameter m must be >= 1".into()));
    }
    let mut pts = Vec::with_capacity((m as usize).pow(d as u32));
    let mut idx = vec![0u32; d];
    loop {
        let mut p = [0.0; 3];
        for k in 0..d {
            p[k] = idx[k] as f64 / m as f64;
        }
        pts.push(p);
        let mut k = 0;
        loop {
            idx[k] += 1;
            if idx[k] < m {
                break;
            }
            idx[k] = 0;
            k += 1;
            if k == d {
                return Ok(PointSet {
                    d,
                    pts,
                    provenance: Provenance::Lattice { m },
                });
            }
        }
    }
}

/// N points placed uniformly at random (ChaCha-seeded, reproducible).
pub fn random_pointset(n: usize, d: usize, seed: u64) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::InvalidInput("point set must be nonempty".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::with_capacity(n);
    for _ in 0..n {
        let mut p = [0.0; 3];
        for item in p.iter_mut().take(d) {
            *item = rng.gen::<f64>();
        }
        pts.push(p);
    }
    Ok(PointSet {
        d,
        pts,
        provenance: Provenance::Random { seed },
    })
}

// ---------------------------------------------------------------------------
// recursive decomposition
// ---------------------------------------------------------------------------

/// Greedy decomposition of N into K+1 perfect d-th powers plus a remainder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionPlan {
    pub n: u64,
    pub d: u32,
    /// N_1 >= N_2 >= ... >= N_{K+1}, each a perfect d-th power (possibly 0).
    pub parts: Vec<u64>,
    pub remainder: u64,
    pub k: u32,
}

/// Smallest integer K with ((d-1)/d)^K <= (d-1)/(4d): K(2) = 3, K(3) = 5.
pub fn k_of_d(d: u32) -> u32 {
    let ratio = (d as f64 - 1.0) / d as f64;
    let target = (d as f64 - 1.0) / (4.0 * d as f64);
    let mut k = 1;
    let mut v = ratio;
    while v > target {
        k += 1;
        v *= ratio;
    }
    k
}

/// Exact floor of n^(1/d).
pub fn integer_dth_root(n: u64, d: u32) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).powf(1.0 / d as f64).round() as u64;
    while r.checked_pow(d).map(|v| v > n).unwrap_or(true) {
        r -= 1;
    }
    while (r + 1).checked_pow(d).map(|v| v <= n).unwrap_or(false) {
        r += 1;
    }
    r
}

pub fn recursive_decomposition(n: u64, d: u32) -> Result<DecompositionPlan> {
    if n == 0 {
        return Err(Error::InvalidInput("N must be >= 1".into()));
    }
    if !(2..=3).contains(&d) {
        return Err(Error::InvalidInput(format!("dimension {d} unsupported")));
    }
    let k = k_of_d(d);
    let mut remaining = n;
    let mut parts = Vec::with_capacity(k as usize + 1);
    for _ in 0..=k {
        let root = integer_dth_root(remaining, d);
        let part = root.pow(d);
        parts.push(part);
        remaining -= part;
    }
    let plan = DecompositionPlan {
        n,
        d,
        parts,
        remainder: remaining,
        k,
    };
    plan.validate()?;
    Ok(plan)
}

impl DecompositionPlan {
    pub fn validate(&self) -> Result<()> {
        let sum: u64 = self.parts.iter().sum::<u64>() + self.remainder;
        if sum != self.n {
            return Err(Error::InvalidInput(format!(
                "decomposition parts sum to {sum}, expected {}",
                self.n
            )));
        }
        let mut consumed = 0u64;
        for (i, &p) in self.parts.iter().enumerate() {
            let root = integer_dth_root(p, self.d);
            if root.pow(self.d) != p {
                return Err(Error::InvalidInput(format!(
                    "part {p} is not a perfect {}-th power",
                    self.d
                )));
            }
            if i > 0 && p > self.n - consumed {
                return Err(Error::InvalidInput(
                    "decomposition violates the remainder inequality".into(),
                ));
            }
            consumed += p;
        }
        Ok(())
    }
}

/// Union (as a multiset on the torus) of the lattices of a decomposition
/// plan plus uniformly random remainder points.
pub fn composite_pointset(plan: &DecompositionPlan, seed: u64) -> Result<PointSet> {
    plan.validate()?;
    let d = plan.d as usize;
    let mut pts = Vec::with_capacity(plan.n as usize);
    for &part in &plan.parts {
        if part == 0 {
            continue;
        }
        let m = integer_dth_root(part, plan.d) as u32;
        pts.extend(lattice_pointset(m, d)?.pts);
    }
    if plan.remainder > 0 {
        pts.extend(random_pointset(plan.remainder as usize, d, seed)?.pts);
    }
    Ok(PointSet {
        d,
        pts,
        provenance: Provenance::Composite { seed },
    })
}

// ---------------------------------------------------------------------------
// exponential sums
// ---------------------------------------------------------------------------

/// |S(n)|^2 = |Σ_p e^{2 pi i p . n}|^2 for lattice vectors 0 < |n| <= M,
/// stored on one representative per ± pair with multiplicity 2 and grouped
/// by |n|^2.
#[derive(Clone, Debug)]
pub struct ExpSumTable {
    pub d: usize,
    pub m_radius: f64,
    /// |n|^2 -> Σ over that shell (± multiplicity folded in) of |S(n)|^2.
    pub by_norm_sq: BTreeMap<u64, f64>,
    /// Representative entries (n, |S(n)|^2), n > 0 lexicographically.
    pub entries: Vec<([i64; 3], f64)>,
}

fn rep_vectors(d: usize, m: f64) -> Vec<[i64; 3]> {
    let mm = m.floor() as i64;
    let m2 = (m * m * (1.0 + 1e-12)).floor() as i64;
    let mut out = Vec::new();
    match d {
        2 => {
            for n1 in 0..=mm {
                for n2 in -mm..=mm {
                    if n1 == 0 && n2 <= 0 {
                        continue;
                    }
                    if n1 * n1 + n2 * n2 <= m2 {
                        out.push([n1, n2, 0]);
                    }
                }
            }
        }
        3 => {
            for n1 in 0..=mm {
                for n2 in -mm..=mm {
                    for n3 in -mm..=mm {
                        let positive = n1 > 0
                            || (n1 == 0 && n2 > 0)
                            || (n1 == 0 && n2 == 0 && n3 > 0);
                        if !positive {
                            continue;
                        }
                        if n1 * n1 + n2 * n2 + n3 * n3 <= m2 {
                            out.push([n1, n2, n3]);
                        }
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    out
}

impl ExpSumTable {
    pub fn build(points: &PointSet, m_radius: f64) -> ExpSumTable {
        let d = points.d;
        let reps = rep_vectors(d, m_radius);
        let entries: Vec<([i64; 3], f64)> = reps
            .par_iter()
            .map(|n| {
                let mut re = Accum::new();
                let mut im = Accum::new();
                for p in &points.pts {
                    let mut dot = 0.0;
                    for k in 0..d {
                        dot += p[k] * n[k] as f64;
                    }
                    let (s, c) = (2.0 * std::f64::consts::PI * dot).sin_cos();
                    re.add(c);
                    im.add(s);
                }
                (*n, re.value().powi(2) + im.value().powi(2))
            })
            .collect();
        let mut by_norm_sq: BTreeMap<u64, f64> = BTreeMap::new();
        for (n, s2) in &entries {
            let q = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]) as u64;
            // S(-n) = conj(S(n)): each representative counts twice
            *by_norm_sq.entry(q).or_insert(0.0) += 2.0 * s2;
        }
        ExpSumTable {
            d,
            m_radius,
            by_norm_sq,
            entries,
        }
    }

    /// Σ over 0 < |n| <= radius of |S(n)|^2.
    pub fn total_up_to(&self, radius: f64) -> f64 {
        let q_max = (radius * radius * (1.0 + 1e-12)).floor() as u64;
        let mut acc = Accum::new();
        for (_, v) in self.by_norm_sq.range(1..=q_max) {
            acc.add(*v);
        }
        acc.value()
    }

    /// Largest |S(n)| over representatives outside m Z^d (lattice
    /// annihilation diagnostic).
    pub fn max_off_lattice(&self, m: i64) -> f64 {
        self.entries
            .iter()
            .filter(|(n, _)| n.iter().any(|c| c % m != 0))
            .map(|(_, s2)| s2.sqrt())
            .fold(0.0, f64::max)
    }
}

// ---------------------------------------------------------------------------
// periodization and pointwise discrepancy
// ---------------------------------------------------------------------------

/// 𝔓{u}(x) = Σ_{n in Z^d} u(x + n): a finite sum over the translates that
/// meet the support.
pub fn periodize_eval(u: &BVFunction, x: &Point) -> f64 {
    let d = u.dim();
    let Some((lo, hi)) = u.support_bbox() else {
        return 0.0;
    };
    let mut ranges = Vec::with_capacity(d);
    for k in 0..d {
        let a = (lo[k] - x[k]).floor() as i64;
        let b = (hi[k] - x[k]).ceil() as i64;
        ranges.push((a, b));
    }
    let mut total = 0.0;
    let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    'outer: loop {
        let mut y = *x;
        for k in 0..d {
            y[k] += idx[k] as f64;
        }
        total += u.eval(&y);
        let mut k = 0;
        loop {
            idx[k] += 1;
            if idx[k] <= ranges[k].1 {
                break;
            }
            idx[k] = ranges[k].0;
            k += 1;
            if k == d {
                break 'outer;
            }
        }
    }
    total
}

/// D([τ,δ,ρ]u; P_N) = Σ_p 𝔓{[τ,δ,ρ]u}(p) - N δ^d u-hat(0), evaluated
/// exactly by shape membership.
pub fn discrepancy(
    u: &BVFunction,
    points: &PointSet,
    tau: &Point,
    delta: f64,
    rho: &Rotation,
) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::DegenerateDilation(delta));
    }
    if !(delta <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "dilation {delta} outside (0, 1]"
        )));
    }
    let d = u.dim();
    let Some((lo, hi)) = u.support_bbox() else {
        return Ok(0.0);
    };
    // support of x -> u(tau + rho x / delta): x in delta rho^T (bbox - tau)
    let mut tlo = [f64::INFINITY; 3];
    let mut thi = [f64::NEG_INFINITY; 3];
    let corners = 1usize << d;
    for mask in 0..corners {
        let mut c = [0.0; 3];
        for k in 0..d {
            c[k] = if mask & (1 << k) != 0 { hi[k] } else { lo[k] };
            c[k] -= tau[k];
        }
        let w = rho.apply_t(&c);
        for k in 0..d {
            tlo[k] = tlo[k].min(delta * w[k]);
            thi[k] = thi[k].max(delta * w[k]);
        }
    }
    let mut acc = Accum::new();
    for p in &points.pts {
        let mut ranges = Vec::with_capacity(d);
        for k in 0..d {
            let a = (tlo[k] - p[k]).floor() as i64;
            let b = (thi[k] - p[k]).ceil() as i64;
            ranges.push((a, b));
        }
        let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        'outer: loop {
            let mut y = *p;
            for k in 0..d {
                y[k] += idx[k] as f64;
            }
            let ry = rho.apply(&y);
            let mut arg = [0.0; 3];
            for k in 0..d {
                arg[k] = tau[k] + ry[k] / delta;
            }
            acc.add(u.eval(&arg));
            let mut k = 0;
            loop {
                idx[k] += 1;
                if idx[k] <= ranges[k].1 {
                    break;
                }
                idx[k] = ranges[k].0;
                k += 1;
                if k == d {
                    break 'outer;
                }
            }
        }
    }
    let n = points.len() as f64;
    Ok(acc.value() - n * delta.powi(d as i32) * u.mass())
}

// ---------------------------------------------------------------------------
// quadratic discrepancy
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum D2Method {
    FourierSum,
    MonteCarlo,
}

/// Value of D_2 with provenance: truncation or sample count, a rigorous
/// tail bound or confidence interval, and the profile constants that play
/// the roles of M(u) and m(u).
#[derive(Clone, Debug)]
pub struct DiscrepancyReport {
    pub value: f64,
    pub method: D2Method,
    /// Fourier path: lattice truncation radius M.
    pub m_cutoff: Option<f64>,
    /// Monte-Carlo path: sample count.
    pub samples: Option<u64>,
    /// Fourier: rigorous tail bound; Monte-Carlo: 99% CI half-width.
    pub tail_bound_or_ci: f64,
    /// False when the Φ_{d+1}/r^d plateau had not stabilized; the partial
    /// sum is then reported with this warning flag.
    pub tail_controlled: bool,
    /// max_n Φ_{d+1}(|n|)/|n|^d over integer radii (the M(u) constant).
    pub m_of_u: Option<f64>,
    /// min over lattice norms <= n0 of |n|^{-2d-1} Φ_{d+1}(|n|); zero iff
    /// u-hat vanishes near the origin.
    pub m_small_of_u: Option<f64>,
    /// Smallest radius beyond which the plateau holds within a factor 2.
    pub n0_estimate: Option<f64>,
    pub seed: Option<u64>,
}

pub struct FourierD2Opts {
    /// Override the truncation radius; otherwise adaptive (tail <= 1% of
    /// the partial sum), capped at 64.
    pub m_override: Option<f64>,
    pub profile_gl_order: usize,
}

impl Default for FourierD2Opts {
    fn default() -> Self {
        FourierD2Opts {
            m_override: None,
            profile_gl_order: 8,
        }
    }
}

/// D_2 by the exact lattice-sum identity with a rigorous tail bound.
pub fn quadratic_discrepancy_fourier(
    u: &BVFunction,
    points: &PointSet,
    opts: &FourierD2Opts,
) -> Result<DiscrepancyReport> {
    if points.d != u.dim() {
        return Err(Error::InvalidInput("dimension mismatch".into()));
    }
    let mut m = opts.m_override.unwrap_or(8.0);
    loop {
        let report = fourier_d2_at(u, points, m, opts)?;
        if opts.m_override.is_some() {
            return Ok(report);
        }
        let ok = report.tail_bound_or_ci <= 0.01 * report.value.abs().max(1e-300);
        if ok || m >= 64.0 {
            return Ok(report);
        }
        m = (m * 2.0).min(64.0);
    }
}

fn fourier_d2_at(
    u: &BVFunction,
    points: &PointSet,
    m: f64,
    opts: &FourierD2Opts,
) -> Result<DiscrepancyReport> {
    let d = u.dim();
    let table = ExpSumTable::build(points, m);
    let radii: Vec<f64> = table
        .by_norm_sq
        .keys()
        .map(|q| (*q as f64).sqrt())
        .collect();
    let mut popts = ProfileOpts::new(m.max(1.0));
    popts.required = radii;
    popts.gl_order = opts.profile_gl_order;
    let profile = SpectralProfile::build(u, &popts)?;
    let cum = profile.cumulative(d as f64 + 1.0);
    let phi_at = |r: f64| -> f64 {
        let tol = 1e-9 * r.max(1.0);
        // boundaries are sorted: binary search
        let idx = cum.partition_point(|(b, _)| *b < r - tol);
        cum.get(idx)
            .filter(|(b, _)| (b - r).abs() <= tol)
            .map(|(_, v)| *v)
            .unwrap_or(f64::NAN)
    };
    let mut acc = Accum::new();
    for (q, s2) in &table.by_norm_sq {
        if *q == 0 {
            continue;
        }
        let r = (*q as f64).sqrt();
        acc.add(s2 * r.powf(-(2.0 * d as f64 + 1.0)) * phi_at(r));
    }
    let value = acc.value();

    // plateau of Φ_{d+1}(r)/r^d over the outer half of the profile
    let mut plateau: f64 = 0.0;
    for (r, phi) in cum.iter() {
        if *r >= m / 2.0 && *r > 0.0 {
            plateau = plateau.max(phi / r.powi(d as i32));
        }
    }
    let pts_ll: Vec<(f64, f64)> = cum
        .iter()
        .filter(|(r, phi)| *r >= m / 2.0 && *r > 0.0 && *phi > 0.0)
        .map(|(r, phi)| (r.ln(), (phi / r.powi(d as i32)).ln()))
        .collect();
    let slope = lsq_slope(&pts_ll);
    let tail_controlled = slope.abs() < 0.2 && plateau > 0.0;

    // rigorous tail: N^2 sup_{r>M}(Φ/r^d) Σ_{|n|>M} |n|^{-d-1}, the lattice
    // sum bounded by a unit-cell integral comparison and the sup by twice
    // the observed plateau
    let nn = points.len() as f64;
    let sqrt_d = (d as f64).sqrt();
    let lattice_tail = if m > sqrt_d + 0.5 {
        sphere_surface(d) * (1.0 + sqrt_d / (2.0 * (m - sqrt_d))).powi(d as i32 - 1)
            / (m - sqrt_d)
    } else {
        f64::INFINITY
    };
    let tail_bound = nn * nn * 2.0 * plateau * lattice_tail;

    let mut m_of_u: f64 = 0.0;
    for k in 1..=(m.floor() as usize) {
        let r = k as f64;
        let phi = phi_at(r);
        if phi.is_finite() {
            m_of_u = m_of_u.max(phi / r.powi(d as i32));
        }
    }
    let n0 = estimate_n0(&cum, d, plateau);
    let mut m_small = f64::INFINITY;
    for q in table.by_norm_sq.keys() {
        if *q == 0 {
            continue;
        }
        let r = (*q as f64).sqrt();
        if r <= n0 {
            let phi = phi_at(r);
            m_small = m_small.min(r.powf(-(2.0 * d as f64 + 1.0)) * phi);
        }
    }

    Ok(DiscrepancyReport {
        value,
        method: D2Method::FourierSum,
        m_cutoff: Some(m),
        samples: None,
        tail_bound_or_ci: tail_bound,
        tail_controlled,
        m_of_u: Some(m_of_u),
        m_small_of_u: if m_small.is_finite() {
            Some(m_small)
        } else {
            None
        },
        n0_estimate: Some(n0),
        seed: None,
    })
}

fn estimate_n0(cum: &[(f64, f64)], d: usize, plateau: f64) -> f64 {
    if plateau <= 0.0 {
        return 1.0;
    }
    let mut r_star = cum.last().map(|(r, _)| *r).unwrap_or(1.0);
    for (r, phi) in cum.iter().rev() {
        if *r < 1.0 {
            break;
        }
        let ratio = phi / r.powi(d as i32);
        if ratio > 2.0 * plateau || ratio < 0.5 * plateau {
            break;
        }
        r_star = *r;
    }
    r_star.ceil().max(1.0)
}

fn lsq_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return 0.0;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in pts {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// D_2 by direct Monte-Carlo with a splittable counter-based stream per
/// sample, reproducible independently of thread count.
///
/// Translations are sampled on the torus AFTER periodization: the sampled
/// transform is x -> u(ρ(x + a)/δ) with a uniform on T^d, which is the
/// parametrization under which the Plancherel step diagonalizes and the
/// lattice-sum identity is exact. (In the [τ,δ,ρ] form this means
/// τ = ρ a / δ, not τ uniform.)
pub fn quadratic_discrepancy_mc(
    u: &BVFunction,
    points: &PointSet,
    samples: u64,
    seed: u64,
) -> Result<DiscrepancyReport> {
    let d = u.dim();
    if d != points.d {
        return Err(Error::InvalidInput("dimension mismatch".into()));
    }
    let haar_mass = sphere_surface(d);
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i + 1);
            let mut a = [0.0; 3];
            for item in a.iter_mut().take(d) {
                *item = rng.gen::<f64>();
            }
            let delta = 1.0 - rng.gen::<f64>(); // (0, 1]
            let rho = sample_rotation(d, &mut rng);
            let ra = rho.apply(&a);
            let tau = crate::vec::scale(&ra, 1.0 / delta);
            let dv = discrepancy(u, points, &tau, delta, &rho)?;
            Ok(dv * dv)
        })
        .collect::<Result<_>>()?;
    let mut acc = Accum::new();
    for v in &values {
        acc.add(*v);
    }
    let mean = acc.value() / samples as f64;
    let mut var = Accum::new();
    for v in &values {
        var.add((v - mean) * (v - mean));
    }
    let sd = (var.value() / (samples as f64 - 1.0).max(1.0)).sqrt();
    let ci = 2.576 * sd / (samples as f64).sqrt();
    Ok(DiscrepancyReport {
        value: haar_mass * mean,
        method: D2Method::MonteCarlo,
        m_cutoff: None,
        samples: Some(samples),
        tail_bound_or_ci: haar_mass * ci,
        tail_controlled: true,
        m_of_u: None,
        m_small_of_u: None,
        n0_estimate: None,
        seed: Some(seed),
    })
}

fn sample_rotation(d: usize, rng: &mut ChaCha8Rng) -> Rotation {
    if d == 2 {
        Rotation::from_angle_2d(2.0 * std::f64::consts::PI * rng.gen::<f64>())
    } else {
        // uniform unit quaternion via four normals (Box-Muller)
        let mut g = [0.0f64; 4];
        for k in 0..2 {
            let u1: f64 = rng.gen::<f64>().max(1e-300);
            let u2: f64 = rng.gen();
            let r = (-2.0 * u1.ln()).sqrt();
            let (s, c) = (2.0 * std::f64::consts::PI * u2).sin_cos();
            g[2 * k] = r * c;
            g[2 * k + 1] = r * s;
        }
        let n = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2] + g[3] * g[3]).sqrt();
        Rotation::from_quaternion(g[0] / n, g[1] / n, g[2] / n, g[3] / n)
    }
}

// ---------------------------------------------------------------------------
// Cassels-Montgomery
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct CmCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Σ_{n in B_M ∩ Z^d_*} |S(n)|^2 >= 2^{-d} |B_M| N - N^2.
pub fn cassels_montgomery_check(points: &PointSet, m_radius: f64) -> Result<CmCheck> {
    if !(m_radius >= 1.0) {
        return Err(Error::InvalidInput("radius must be >= 1".into()));
    }
    let d = points.d;
    let table = ExpSumTable::build(points, m_radius);
    let lhs = table.total_up_to(m_radius);
    let n = points.len() as f64;
    let rhs = 0.5f64.powi(d as i32) * ball_volume(d) * m_radius.powi(d as i32) * n - n * n;
    Ok(CmCheck {
        lhs,
        rhs,
        holds: lhs >= rhs - 1e-6 * (1.0 + rhs.abs()),
    })
}

#[derive(Clone, Debug)]
pub struct CmWitness {
    pub x: Point,
    pub count: u64,
    pub required: f64,
    /// Fourier coefficients of the averaging polynomial T on differences
    /// (k, T-hat(k)); all lie in [0, 1] with T-hat(0) = 1.
    pub coeffs: Vec<([i64; 3], f64)>,
    /// Lattice points of A = (x + B_{M/2}) ∩ Z^d.
    pub lattice_points: Vec<[i64; 3]>,
}

impl CmWitness {
    /// The non-negative trigonometric polynomial T(y) =
    /// |Σ_{n in A} e^{2 pi i n.y}|^2 / #A.
    pub fn t_eval(&self, y: &Point) -> f64 {
        let mut re = 0.0;
        let mut im = 0.0;
        for n in &self.lattice_points {
            let mut dot = 0.0;
            for k in 0..3 {
                dot += n[k] as f64 * y[k];
            }
            let (s, c) = (2.0 * std::f64::consts::PI * dot).sin_cos();
            re += c;
            im += s;
        }
        (re * re + im * im) / self.lattice_points.len() as f64
    }
}

/// Grid search for a torus point carrying at least the average number
/// 2^{-d} |B_M| of lattice points in x + B_{M/2}; existence is the
/// mean-value step of the Cassels-Montgomery proof.
pub fn cm_witness(m_radius: f64, d: usize, grid_per_axis: Option<usize>) -> Result<CmWitness> {
    let required = 0.5f64.powi(d as i32) * ball_volume(d) * m_radius.powi(d as i32);
    let res = grid_per_axis.unwrap_or(((4.0 * m_radius).ceil() as usize).max(4));
    let half = m_radius / 2.0;
    let reach = half.ceil() as i64 + 1;
    let mut idx = vec![0usize; d];
    loop {
        let mut x = [0.0; 3];
        for k in 0..d {
            x[k] = idx[k] as f64 / res as f64;
        }
        let mut pts = Vec::new();
        let mut n = vec![-reach; d];
        'outer: loop {
            let mut dist2 = 0.0;
            for k in 0..d {
                let dd = n[k] as f64 - x[k];
                dist2 += dd * dd;
            }
            if dist2 <= half * half {
                let mut v = [0i64; 3];
                for k in 0..d {
                    v[k] = n[k];
                }
                pts.push(v);
            }
            let mut k = 0;
            loop {
                n[k] += 1;
                if n[k] <= reach {
                    break;
                }
                n[k] = -reach;
                k += 1;
                if k == d {
                    break 'outer;
                }
            }
        }
        if pts.len() as f64 >= required {
            let mut counts: BTreeMap<[i64; 3], u64> = BTreeMap::new();
            for a in &pts {
                for b in &pts {
                    let k = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
                    *counts.entry(k).or_insert(0) += 1;
                }
            }
            let na = pts.len() as f64;
            let coeffs = counts
                .into_iter()
                .map(|(k, c)| (k, c as f64 / na))
                .collect();
            return Ok(CmWitness {
                x,
                count: pts.len() as u64,
                required,
                coeffs,
                lattice_points: pts,
            });
        }
        let mut k = 0;
        loop {
            idx[k] += 1;
            if idx[k] < res {
                break;
            }
            idx[k] = 0;
            k += 1;
            if k == d {
                return Err(Error::WitnessNotFound(format!(
                    "no torus point at resolution {res} reached the average count {required:.3}"
                )));
            }
        }
    }
}

// ---------------------------------------------------------------------------
// scaling study
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Construction {
    Lattice,
    Composite,
    Random,
}

#[derive(Clone, Debug)]
pub struct ScalingRow {
    pub n: u64,
    pub d2: f64,
    /// N^{(1-d)/d} D_2.
    pub normalized: f64,
    pub m_cutoff: f64,
    pub tail_bound: f64,
    pub tail_controlled: bool,
}

/// Per-N best-available D_2 with the normalized trace N^{(1-d)/d} D_2.
/// Lattice constructions pin the truncation to a fixed multiple of
/// m = N^{1/d}, so the k-space truncation is N-independent and the
/// normalized trace converges.
pub fn scaling_study(
    u: &BVFunction,
    construction: Construction,
    ns: &[u64],
    seed: u64,
) -> Result<Vec<ScalingRow>> {
    let d = u.dim();
    let mut rows = Vec::new();
    for &n in ns {
        let (points, m_override) = match construction {
            Construction::Lattice => {
                let m = integer_dth_root(n, d as u32);
                if m.pow(d as u32) != n {
                    return Err(Error::InvalidInput(format!(
                        "lattice construction needs N = m^{d}, got {n}"
                    )));
                }
                let pts = lattice_pointset(m as u32, d)?;
                (pts, Some((8 * m).max(64) as f64))
            }
            Construction::Composite => {
                let plan = recursive_decomposition(n, d as u32)?;
                (composite_pointset(&plan, seed)?, None)
            }
            Construction::Random => (random_pointset(n as usize, d, seed)?, None),
        };
        let rep = quadratic_discrepancy_fourier(
            u,
            &points,
            &FourierD2Opts {
                m_override,
                ..Default::default()
            },
        )?;
        rows.push(ScalingRow {
            n,
            d2: rep.value,
            normalized: (n as f64).powf((1.0 - d as f64) / d as f64) * rep.value,
            m_cutoff: rep.m_cutoff.unwrap_or(f64::NAN),
            tail_bound: rep.tail_bound_or_ci,
            tail_controlled: rep.tail_controlled,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Shape;
    use crate::vec::pt2;
    use std::f64::consts::PI;

    fn quarter_ball() -> BVFunction {
        BVFunction::indicator(Shape::ball(2, &[0.5, 0.5], 0.25).unwrap())
    }

    #[test]
    fn periodization_examples() {
        let u = BVFunction::indicator(Shape::unit_square());
        assert_eq!(periodize_eval(&u, &pt2(0.3, 0.9)), 1.0);
        let b = quarter_ball();
        assert_eq!(periodize_eval(&b, &pt2(0.5, 0.5)), 1.0);
        assert_eq!(periodize_eval(&b, &pt2(0.0, 0.0)), 0.0);
        let wide = BVFunction::indicator(Shape::axis_box(2, &[0.0, 0.0], &[1.5, 1.0]).unwrap());
        assert_eq!(periodize_eval(&wide, &pt2(0.25, 0.5)), 2.0);
    }

    #[test]
    fn discrepancy_examples() {
        let id = Rotation::identity(2);
        // tiling indicator: D = N - N = 0 for any points
        let u = BVFunction::indicator(Shape::unit_square());
        let pts = random_pointset(7, 2, 3).unwrap();
        let dv = discrepancy(&u, &pts, &[0.0; 3], 1.0, &id).unwrap();
        assert!(dv.abs() < 1e-12);
        // single point at the ball center, identity transform
        let b = quarter_ball();
        let one = PointSet::explicit(2, vec![pt2(0.5, 0.5)]).unwrap();
        let dv = discrepancy(&b, &one, &[0.0; 3], 1.0, &id).unwrap();
        assert!((dv - (1.0 - PI / 16.0)).abs() < 1e-12);
        // zero-mean function: D = Σ_p 𝔓{u}(p) exactly
        let zm = BVFunction::new(
            2,
            vec![
                (1.0, Shape::axis_box(2, &[0.0, 0.0], &[0.5, 0.5]).unwrap()),
                (-0.25, Shape::unit_square()),
            ],
        )
        .unwrap();
        assert!(zm.mass().abs() < 1e-15);
        let dv = discrepancy(&zm, &one, &[0.0; 3], 1.0, &id).unwrap();
        let direct = periodize_eval(&zm, &pt2(0.5, 0.5));
        assert!((dv - direct).abs() < 1e-12);
        assert!(matches!(
            discrepancy(&b, &one, &[0.0; 3], 0.0, &id),
            Err(Error::DegenerateDilation(_))
        ));
    }

    #[test]
    fn lattice_expsums() {
        let pts = lattice_pointset(2, 2).unwrap();
        assert_eq!(pts.len(), 4);
        let table = ExpSumTable::build(&pts, 3.0);
        for (n, s2) in &table.entries {
            if *n == [1, 0, 0] {
                assert!(s2.sqrt() < 1e-12);
            }
            if *n == [2, 0, 0] {
                assert!((s2.sqrt() - 4.0).abs() < 1e-12);
            }
        }
        assert!(table.max_off_lattice(2) < 1e-10);
        let p1 = lattice_pointset(1, 2).unwrap();
        assert_eq!(p1.len(), 1);
        assert_eq!(p1.pts[0], [0.0, 0.0, 0.0]);
    }

    #[test]
    fn conjugate_pairing_matches_full_sum() {
        // the ±-representative table equals a direct full enumeration
        let pts = random_pointset(6, 2, 41).unwrap();
        let table = ExpSumTable::build(&pts, 3.0);
        let mut full = 0.0;
        let mm = 3i64;
        for n1 in -mm..=mm {
            for n2 in -mm..=mm {
                if n1 == 0 && n2 == 0 {
                    continue;
                }
                if n1 * n1 + n2 * n2 > 9 {
                    continue;
                }
                let (mut re, mut im) = (0.0, 0.0);
                for p in &pts.pts {
                    let (s, c) =
                        (2.0 * PI * (p[0] * n1 as f64 + p[1] * n2 as f64)).sin_cos();
                    re += c;
                    im += s;
                }
                full += re * re + im * im;
            }
        }
        assert!((table.total_up_to(3.0) - full).abs() < 1e-8);
    }

    #[test]
    fn decomposition_examples() {
        assert_eq!(k_of_d(2), 3);
        assert_eq!(k_of_d(3), 5);
        let p = recursive_decomposition(4, 2).unwrap();
        assert_eq!(p.parts[0], 4);
        assert!(p.parts[1..].iter().all(|x| *x == 0));
        assert_eq!(p.remainder, 0);
        // greedy on 7 with K(2) = 3: parts 4, 1, 1, 1 and remainder 0
        let p = recursive_decomposition(7, 2).unwrap();
        assert_eq!(p.parts, vec![4, 1, 1, 1]);
        assert_eq!(p.remainder, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let n = 1 + (rng.gen::<u64>() % 1_000_000);
            for d in [2u32, 3] {
                let p = recursive_decomposition(n, d).unwrap();
                assert_eq!(p.parts.iter().sum::<u64>() + p.remainder, n);
                assert_eq!(p.parts.len() as u32, p.k + 1);
            }
        }
    }

    #[test]
    fn composite_matches_lattice_for_exact_powers() {
        let plan = recursive_decomposition(4, 2).unwrap();
        let c = composite_pointset(&plan, 9).unwrap();
        let l = lattice_pointset(2, 2).unwrap();
        assert_eq!(c.len(), 4);
        let mut a: Vec<_> = c.pts.iter().map(|p| (p[0], p[1])).collect();
        let mut b: Vec<_> = l.pts.iter().map(|p| (p[0], p[1])).collect();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_eq!(a, b);
        let plan = recursive_decomposition(9, 2).unwrap();
        assert_eq!(composite_pointset(&plan, 1).unwrap().len(), 9);
    }

    #[test]
    fn coincident_points_d2() {
        let n = 3usize;
        let pts = PointSet::explicit(2, vec![[0.0, 0.0, 0.0]; n]).unwrap();
        let table = ExpSumTable::build(&pts, 4.0);
        for (_, s2) in &table.entries {
            assert!((s2 - (n * n) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn fourier_vs_monte_carlo_small() {
        let u = quarter_ball();
        for (pts, tag) in [
            (
                PointSet::explicit(2, vec![pt2(0.31, 0.77)]).unwrap(),
                "N=1",
            ),
            (lattice_pointset(2, 2).unwrap(), "N=4"),
            (random_pointset(5, 2, 11).unwrap(), "N=5"),
        ] {
            let f = quadratic_discrepancy_fourier(&u, &pts, &Default::default()).unwrap();
            let mc = quadratic_discrepancy_mc(&u, &pts, 60_000, 17).unwrap();
            let budget = mc.tail_bound_or_ci + f.tail_bound_or_ci;
            assert!(
                (f.value - mc.value).abs() <= budget,
                "{tag}: fourier {} vs mc {} (budget {budget})",
                f.value,
                mc.value
            );
        }
    }

    #[test]
    fn d2_invariance_under_common_translation() {
        let u = quarter_ball();
        let base = random_pointset(6, 2, 23).unwrap();
        let shifted = PointSet {
            d: 2,
            pts: base
                .pts
                .iter()
                .map(|p| [(p[0] + 0.37).fract(), (p[1] + 0.81).fract(), 0.0])
                .collect(),
            provenance: Provenance::Explicit,
        };
        let a = quadratic_discrepancy_fourier(&u, &base, &Default::default()).unwrap();
        let b = quadratic_discrepancy_fourier(&u, &shifted, &Default::default()).unwrap();
        assert!(
            ((a.value - b.value) / a.value).abs() < 1e-9,
            "{} vs {}",
            a.value,
            b.value
        );
    }

    #[test]
    fn cassels_montgomery_examples() {
        // lattice m = 4, M = 3 < 4: lhs = 0, rhs = 36 pi - 256 < 0
        let pts = lattice_pointset(4, 2).unwrap();
        let c = cassels_montgomery_check(&pts, 3.0).unwrap();
        assert!(c.lhs < 1e-9);
        assert!((c.rhs - (36.0 * PI - 256.0)).abs() < 1e-9);
        assert!(c.holds);
        // coincident points: lhs = N^2 #(B_3 ∩ Z^2_*) = N^2 * 28
        let n = 4usize;
        let pts = PointSet::explicit(2, vec![[0.1, 0.2, 0.0]; n]).unwrap();
        let c = cassels_montgomery_check(&pts, 3.0).unwrap();
        assert!((c.lhs - 28.0 * (n * n) as f64).abs() < 1e-6);
        assert!(c.holds);
    }

    #[test]
    fn cassels_montgomery_random_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for trial in 0..200 {
            let n = 1 + (rng.gen::<u64>() % 12) as usize;
            let m = 1.0 + 9.0 * rng.gen::<f64>();
            let pts = random_pointset(n, 2, 1000 + trial).unwrap();
            let c = cassels_montgomery_check(&pts, m).unwrap();
            assert!(c.holds, "trial {trial}: lhs {} rhs {}", c.lhs, c.rhs);
        }
    }

    #[test]
    fn cm_witness_example() {
        // M = 2, d = 2: required 2^{-2} |B_2| = pi; the origin-centered unit
        // ball already holds 5 lattice points
        let w = cm_witness(2.0, 2, None).unwrap();
        assert!((w.required - PI).abs() < 1e-12);
        assert!(w.count >= 4);
        let t0 = w
            .coeffs
            .iter()
            .find(|(k, _)| *k == [0, 0, 0])
            .map(|(_, v)| *v)
            .unwrap();
        assert!((t0 - 1.0).abs() < 1e-12);
        for (_, v) in &w.coeffs {
            assert!(*v >= 0.0 && *v <= 1.0 + 1e-12);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let y = [rng.gen::<f64>(), rng.gen::<f64>(), 0.0];
            assert!(w.t_eval(&y) >= -1e-9);
        }
    }

    #[test]
    fn mc_ci_shrinks_like_inverse_sqrt_samples() {
        // CLT scaling of the estimator: quadrupling the samples roughly
        // halves the 99% confidence half-width
        let u = quarter_ball();
        let pts = random_pointset(4, 2, 5).unwrap();
        let a = quadratic_discrepancy_mc(&u, &pts, 8_000, 3).unwrap();
        let b = quadratic_discrepancy_mc(&u, &pts, 32_000, 3).unwrap();
        let ratio = a.tail_bound_or_ci / b.tail_bound_or_ci;
        assert!(
            (1.4..2.9).contains(&ratio),
            "CI ratio {ratio} should be near 2"
        );
    }

    #[test]
    fn weight_doubling_scales_d2_by_four() {
        let u = quarter_ball();
        let u2 = u.scaled_weights(2.0).unwrap();
        let pts = lattice_pointset(3, 2).unwrap();
        let a = quadratic_discrepancy_fourier(&u, &pts, &Default::default()).unwrap();
        let b = quadratic_discrepancy_fourier(&u2, &pts, &Default::default()).unwrap();
        assert!(((b.value - 4.0 * a.value) / b.value).abs() < 1e-9);
    }

    #[test]
    fn composite_bound_against_per_part_sum() {
        // D_2 of the composite set is controlled by (K+2) times the sum of
        // the per-part values (triangle step of the construction)
        let u = quarter_ball();
        let n = 7u64;
        let plan = recursive_decomposition(n, 2).unwrap();
        let comp = composite_pointset(&plan, 5).unwrap();
        let whole = quadratic_discrepancy_fourier(&u, &comp, &Default::default()).unwrap();
        let mut parts_sum = 0.0;
        for &part in plan.parts.iter().filter(|p| **p > 0) {
            let m = integer_dth_root(part, 2) as u32;
            let pts = lattice_pointset(m, 2).unwrap();
            let r = quadratic_discrepancy_fourier(&u, &pts, &Default::default()).unwrap();
            parts_sum += r.value;
        }
        // remainder placement is empty for N = 7 (see decomposition test)
        let bound = (plan.k as f64 + 2.0) * parts_sum;
        assert!(
            whole.value <= bound * (1.0 + 0.05) + whole.tail_bound_or_ci,
            "composite D2 {} vs (K+2) Σ parts {}",
            whole.value,
            bound
        );
    }
}
