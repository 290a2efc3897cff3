//! Subcommand implementations. Every argument has a config-file equivalent
//! (same name, snake_case) and command-line flags override the file.

use crate::output::{emit, write_csv};
use bvf::catalog::{named_function, CatalogDoc};
use bvf::discrepancy::{
    cassels_montgomery_check, cm_witness, composite_pointset, lattice_pointset,
    quadratic_discrepancy_fourier, quadratic_discrepancy_mc, random_pointset,
    recursive_decomposition, scaling_study, Construction, D2Method, FourierD2Opts, PointSet,
};
use bvf::geometry::{l2_norm_sq, make_whisker_disk, BVFunction, Region};
use bvf::heat::{heat_curve, heat_derivative_estimate, heat_jump_estimate, relative_heat_content_region};
use bvf::inequality::{averaged_bound_check, directional_bound_check, isoperimetric_check};
use bvf::minkowski::{default_h_grid, ft_difference_quotient, weak_convergence_probe, TestFn};
use bvf::spectral::{cutoff_trace, gaussian_trace, tail_asymptote, ProfileOpts, SpectralProfile};
use bvf::vec::pt2;
use bvf::{Error, Result};
use clap::Args;
use serde::de::DeserializeOwned;
use serde::Serialize;

pub struct Ctx {
    pub out_dir: Option<String>,
    pub config: Option<String>,
}

impl Ctx {
    fn config_value(&self) -> Result<Option<serde_json::Value>> {
        match &self.config {
            None => Ok(None),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::InvalidInput(format!("cannot read {path}: {e}")))?;
                serde_json::from_str(&text)
                    .map(Some)
                    .map_err(|e| Error::InvalidInput(format!("bad config {path}: {e}")))
            }
        }
    }
}

/// CLI value if present, else the config-file field.
fn cfg<T: DeserializeOwned>(config: &Option<serde_json::Value>, key: &str) -> Option<T> {
    config
        .as_ref()
        .and_then(|c| c.get(key))
        .and_then(|v| serde_json::from_value(v.clone()).ok())
}

fn pick<T: DeserializeOwned>(
    cli: Option<T>,
    config: &Option<serde_json::Value>,
    key: &str,
    default: T,
) -> T {
    cli.or_else(|| cfg(config, key)).unwrap_or(default)
}

fn pick_opt<T: DeserializeOwned>(
    cli: Option<T>,
    config: &Option<serde_json::Value>,
    key: &str,
) -> Option<T> {
    cli.or_else(|| cfg(config, key))
}

fn load_function(
    shape: &Option<String>,
    catalog: &Option<String>,
    default_name: &str,
) -> Result<BVFunction> {
    if let Some(path) = catalog {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {path}: {e}")))?;
        return CatalogDoc::from_json(&text)?.into_function();
    }
    named_function(shape.as_deref().unwrap_or(default_name))
}

fn parse_region(name: &str) -> Result<Region> {
    if let Some(rest) = name.strip_prefix("whisker") {
        let l = rest
            .strip_prefix(':')
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::InvalidInput(format!("bad whisker length in {name}")))
            })
            .transpose()?
            .unwrap_or(1.0);
        return Ok(Region::Whisker(make_whisker_disk(l)?));
    }
    let u = named_function(name)?;
    let (_, shape) = u
        .terms()
        .first()
        .ok_or_else(|| Error::InvalidInput("empty shape".into()))?;
    Ok(Region::Shape(shape.clone()))
}

fn parse_pointset(spec: &str, d: usize, seed: u64) -> Result<PointSet> {
    let parts: Vec<&str> = spec.split(':').collect();
    let argn = |i: usize| -> Result<u64> {
        parts
            .get(i)
            .ok_or_else(|| Error::InvalidInput(format!("{spec} needs a parameter")))?
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad number in {spec}")))
    };
    match parts[0] {
        "lattice" => lattice_pointset(argn(1)? as u32, d),
        "random" => random_pointset(argn(1)? as usize, d, seed),
        "composite" => {
            let plan = recursive_decomposition(argn(1)?, d as u32)?;
            composite_pointset(&plan, seed)
        }
        _ => Err(Error::InvalidInput(format!("unknown point set {spec}"))),
    }
}

fn linear_grid(r_max: f64, points: usize) -> Vec<f64> {
    (1..=points).map(|k| r_max * k as f64 / points as f64).collect()
}

fn geometric_grid(t_max: f64, t_min: f64, count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![t_max];
    }
    let ratio = (t_min / t_max).powf(1.0 / (count as f64 - 1.0));
    (0..count).map(|k| t_max * ratio.powi(k as i32)).collect()
}

fn trace_rows(params: &[f64], estimates: &[f64], unc: f64) -> Vec<String> {
    params
        .iter()
        .zip(estimates)
        .map(|(p, e)| format!("{p},{e},{unc}"))
        .collect()
}

// ---------------------------------------------------------------------------

#[derive(Args, Debug)]
pub struct CatalogArgs {
    /// Built-in name (square, disk, ball:R, box:x0,y0,x1,y1).
    #[arg(long)]
    name: Option<String>,
    /// Validate an existing catalog file instead.
    #[arg(long)]
    file: Option<String>,
}

#[derive(Serialize)]
struct CatalogOut {
    d: usize,
    terms: usize,
    mass: f64,
    diameter: f64,
    document: serde_json::Value,
}

pub fn catalog(a: CatalogArgs, ctx: &Ctx) -> Result<()> {
    let config = ctx.config_value()?;
    let name = pick_opt(a.name, &config, "name");
    let file = pick_opt(a.file, &config, "file");
    let u = load_function(&name, &file, "square")?;
    let doc = CatalogDoc::from_function(&u);
    let out = CatalogOut {
        d: u.dim(),
        terms: u.terms().len(),
        mass: u.mass(),
        diameter: u.diameter(),
        document: serde_json::to_value(&doc).expect("catalog json"),
    };
    emit("catalog", None, &format!("{name:?}{file:?}"), out);
    Ok(())
}

// ---------------------------------------------------------------------------

#[derive(Args, Debug)]
pub struct SpectralArgs {
    #[arg(long)]
    shape: Option<String>,
    #[arg(long)]
    catalog: Option<String>,
    /// cutoff | gaussian
    #[arg(long)]
    estimator: Option<String>,
    #[arg(long)]
    rmax: Option<f64>,
    #[arg(long)]
    grid_points: Option<usize>,
}

#[derive(Serialize)]
struct AsymptoteOut {
    estimator: String,
    limit: f64,
    uncertainty: f64,
    trace_csv: Option<String>,
}

pub fn spectral_asymptote(a: SpectralArgs, ctx: &Ctx) -> Result<()> {
    let config = ctx.config_value()?;
    let shape = pick_opt(a.shape, &config, "shape");
    let catalog = pick_opt(a.catalog, &config, "catalog");
    let estimator = pick(a.estimator, &config, "estimator", "cutoff".into());
    let rmax = pick(a.rmax, &config, "rmax", 500.0);
    let points = pick(a.grid_points, &config, "grid_points", 100);
    let u = load_function(&shape, &catalog, "square")?;
    let est = match estimator.as_str() {
        "cutoff" => {
            let grid = linear_grid(rmax, points);
            let prof = SpectralProfile::build(&u, &ProfileOpts::new(rmax).with_grid(&grid))?;
            cutoff_trace(&prof, &grid)?
        }
        "gaussian" => {
            let ts = geometric_grid(1e-2, 1.25e-3, 4);
            let r_needed = (0.97 / ts[ts.len() - 1] / 25.0).ceil() * 25.0;
            let prof = SpectralProfile::build(&u, &ProfileOpts::new(r_needed))?;
            gaussian_trace(&prof, &ts)?
        }
        other => return Err(Error::InvalidInput(format!("unknown estimator {other}"))),
    };
    let trace_csv = write_csv(
        &ctx.out_dir,
        "spectral_asymptote.csv",
        "param,estimate,uncertainty",
        &trace_rows(&est.params, &est.estimates, est.uncertainty),
    )?;
    emit(
        "spectral-asymptote",
        None,
        &format!("{shape:?}{catalog:?}{estimator}{rmax}{points}"),
        AsymptoteOut {
            estimator,
            limit: est.limit,
            uncertainty: est.uncertainty,
            trace_csv,
        },
    );
    Ok(())
}

// ---------------------------------------------------------------------------

#[derive(Args, Debug)]
pub struct TailArgs {
    #[arg(long)]
    shape: Option<String>,
    #[arg(long)]
    catalog: Option<String>,
    #[arg(long)]
    rmax: Option<f64>,
    #[arg(long)]
    grid_points: Option<usize>,
}

pub fn tail(a: TailArgs, ctx: &Ctx) -> Result<()> {
    let config = ctx.config_value()?;
    let shape = pick_opt(a.shape, &config, "shape");
    let catalog = pick_opt(a.catalog, &config, "catalog");
    let rmax = pick(a.rmax, &config, "rmax", 500.0);
    let points = pick(a.grid_points, &config, "grid_points", 100);
    let u = load_function(&shape, &catalog, "square")?;
    let grid = linear_grid(rmax, points);
    let prof = SpectralProfile::build(&u, &ProfileOpts::new(rmax).with_grid(&grid))?;
    let est = tail_asymptote(&prof, l2_norm_sq(&u)?, &grid)?;
    let trace_csv = write_csv(
        &ctx.out_dir,
        "tail.csv",
        "param,estimate,uncertainty",
        &trace_rows(&est.params, &est.estimates, est.uncertainty),
    )?;
    emit(
        "tail",
        None,
        &format!("{shape:?}{catalog:?}{rmax}{points}"),
        AsymptoteOut {
            estimator: "tail".into(),
            limit: est.limit,
            uncertainty: est.uncertainty,
            trace_csv,
        },
    );
    Ok(())
}

// ---------------------------------------------------------------------------

#[derive(Args, Debug)]
pub struct GaussianArgs {
    #[arg(long)]
    shape: Option<String>,
    #[arg(long)]
    catalog: Option<String>,
    #[arg(long)]
    tmin: Option<f64>,
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long)]
    tcount: Option<usize>,
}

pub fn gaussian_asymptote(a: GaussianArgs, ctx: &Ctx) -> Result<()> {
    let config = ctx.config_value()?;
    let shape = pick_opt(a.shape, &config, "shape");
    let catalog = pick_opt(a.catalog, &config, "catalog");
    let tmin = pick(a.tmin, &config, "tmin", 1.25e-3);
    let tmax = pick(a.tmax, &config, "tmax", 1e-2);
    let tcount = pick(a.tcount, &config, "tcount", 4);
    let u = load_function(&shape, &catalog, "square")?;
    let ts = geometric_grid(tmax, tmin, tcount);
    let r_needed = (0.97 / tmin / 25.0).ceil() * 25.0;
    let prof = SpectralProfile::build(&u, &ProfileOpts::new(r_needed))?;
    let est = gaussian_trace(&prof, &ts)?;
    let trace_csv = write_csv(
        &ctx.out_dir,
        "gaussian_asymptote.csv",
        "param,estimate,uncertainty",
        &trace_rows(&est.params, &est.estimates, est.uncertainty),
    )?;
    emit(
        "gaussian-asymptote",
        None,
        &format!("{shape:?}{catalog:?}{tmin}{tmax}{tcount}"),
        AsymptoteOut {
            estimator: "gaussian".into(),
            limit: est.limit,
            uncertainty: est.uncertainty,
            trace_csv,
        },
    );
    Ok(())
}

// ---------------------------------------------------------------------------

#[derive(Args, Debug)]
pub struct HeatArgs {
    /// Function u (name or catalog file via --catalog-u).
    #[arg(long)]
    u: Option<String>,
    /// Function v; defaults to u.
    #[arg(long)]
    v: Option<String>,
    #[arg(long)]
    catalog_u: Option<String>,
    #[arg(long)]
    catalog_v: Option<String>,
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long)]
    tmin: Option<f64>,
    #[arg(long)]
    tcount: Option<usize>,
}

#[derive(Serialize)]
struct HeatOut {
    difference_limit: f64,
    derivative_limit: f64,
    h0: f64,
    curve_csv: Option<String>,
}

pub fn heat_asymptote(a: HeatArgs, ctx: &Ctx) -> Result<()> {
    let config = ctx.config_value()?;
    let uname = pick_opt(a.u, &config, "u");
    let vname = pick_opt(a.v, &config, "v");
    let cat_u = pick_opt(a.catalog_u, &config, "catalog_u");
    let cat_v = pick_opt(a.catalog_v, &config, "catalog_v");
    let tmax = pick(a.tmax, &config, "tmax", 1e-2);
    let tmin = pick(a.tmin, &config, "tmin", 1.25e-3);
    let tcount = pick(a.tcount, &config, "tcount", 6);
    let u = load_function(&uname, &cat_u, "square")?;
    let v = if vname.is_none() && cat_v.is_none() {
        u.clone()
    } else {
        load_function(&vname, &cat_v, "square")?
    };
    let ts = geometric_grid(tmax, tmin, tcount);
    let est = heat_jump_estimate(&u, &v, &ts)?;
    let dest = heat_derivative_estimate(&u, &v, &ts)?;
    let curve = heat_curve(&u, &v, &ts)?;
    let rows: Vec<String> = curve
        .ts
        .iter()
        .zip(curve.values.iter().zip(&curve.errs))
        .zip(&curve.methods)
        .map(|((t, (h, e)), m)| format!("{t},{h},{m:?},{e}"))
        .collect();
    let curve_csv = write_csv(&ctx.out_dir, "heat_curve.csv", "t,H,method,err", &rows)?;
    emit(
        "heat-asymptote",
        None,
        &format!("{uname:?}{vname:?}{tmax}{tmin}{tcount}"),
        HeatOut {
            difference_limit: est.limit,
            derivative_limit: dest.limit,
            h0: curve.h0,
            curve_csv,
        },
    );
    Ok(())
}

// ---------------------------------------------------------------------------

#[derive(Args, Debug)]
pub struct RelativeHeatArgs {
    #[arg(long)]
    shape: Option<String>,
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long)]
    tmin: Option<f64>,
    #[arg(long)]
    tcount: Option<usize>,
}

#[derive(Serialize)]
struct RelativeHeatOut {
    limit: f64,
    perimeter_over_sqrt_pi: f64,
    trace_csv: Option<String>,
}

pub fn relative_heat(a: RelativeHeatArgs, ctx: &Ctx) -> Result<()> {
    let config = ctx.config_value()?;
    let shape = pick(a.shape, &config, "shape", "square".to_string());
    let tmax = pick(a.tmax, &config, "tmax", 1e-2);
    let tmin = pick(a.tmin, &config, "tmin", 1e-3);
    let tcount = pick(a.tcount, &config, "tcount", 5);
    let region = parse_region(&shape)?;
    let ts = geometric_grid(tmax, tmin, tcount);
    let mut rows = Vec::new();
    let mut vals = Vec::new();
    for &t in &ts {
        let v = relative_heat_content_region(&region, t)?;
        rows.push(format!("{t},{v}"));
        vals.push(v);
    }
    let n = vals.len();
    let limit = if n >= 2 {
        let slope = (vals[n - 2] - vals[n - 1]) / (ts[n - 2] - ts[n - 1]);
        vals[n - 1] - slope * ts[n - 1]
    } else {
        vals[0]
    };
    let trace_csv = write_csv(&ctx.out_dir, "relative_heat.csv", "t,value", &rows)?;
    emit(
        "relative-heat",
        None,
        &format!("{shape}{tmax}{tmin}{tcount}"),
        RelativeHeatOut {
            limit,
            perimeter_over_sqrt_pi: region.perimeter() / std::f64::consts::PI.sqrt(),
            trace_csv,
        },
    );
    Ok(())
}

// ---------------------------------------------------------------------------

#[derive(Args, Debug)]
pub struct MinkowskiArgs {
    /// square | disk | whisker:L | box:...
    #[arg(long)]
    shape: Option<String>,
    /// Probe frequencies "x,y"; defaults to a 10-frequency panel (or 0 for
    /// the whisker).
    #[arg(long)]
    xi: Vec<String>,
}

#[derive(Serialize)]
struct QuotientRow {
    xi: [f64; 2],
    limit_re: f64,
    limit_im: f64,
    target_re: f64,
    target_im: f64,
    abs_err: f64,
}

pub fn minkowski_derivative(a: MinkowskiArgs, ctx: &Ctx) -> Result<()> {
    let config = ctx.config_value()?;
    let shape = pick(a.shape, &config, "shape", "square".to_string());
    let xi_args = if a.xi.is_empty() {
        cfg::<Vec<String>>(&config, "xi").unwrap_or_default()
    } else {
        a.xi.clone()
    };
    let region = parse_region(&shape)?;
    let freqs: Vec<[f64; 2]> = if xi_args.is_empty() {
        if matches!(region, Region::Whisker(_)) {
            vec![[0.0, 0.0]]
        } else {
            vec![
                [0.0, 0.0],
                [0.5, 0.0],
                [1.0, 0.0],
                [0.0, 1.0],
                [0.7, 0.3],
                [1.0, 1.0],
                [-0.4, 0.9],
                [1.5, -0.5],
                [2.0, 0.25],
                [0.3, -1.7],
            ]
        }
    } else {
        xi_args
            .iter()
            .map(|s| {
                let p: Vec<f64> = s
                    .split(',')
                    .map(|x| x.parse().map_err(|_| Error::InvalidInput(format!("bad xi {s}"))))
                    .collect::<Result<_>>()?;
                if p.len() != 2 {
                    return Err(Error::InvalidInput(format!("xi needs two components: {s}")));
                }
                Ok([p[0], p[1]])
            })
            .collect::<Result<_>>()?
    };
    let grid = default_h_grid();
    let mut out_rows = Vec::new();
    let mut csv_rows = Vec::new();
    for f in &freqs {
        let tr = ft_difference_quotient(&region, &pt2(f[0], f[1]), &grid)?;
        for (h, v) in tr.hs.iter().zip(&tr.values) {
            csv_rows.push(format!("{},{},{h},{},{}", f[0], f[1], v.re, v.im));
        }
        out_rows.push(QuotientRow {
            xi: *f,
            limit_re: tr.limit.re,
            limit_im: tr.limit.im,
            target_re: tr.target.re,
            target_im: tr.target.im,
            abs_err: (tr.limit - tr.target).norm(),
        });
    }
    let trace_csv = write_csv(
        &ctx.out_dir,
        "minkowski_quotient.csv",
        "xi_x,xi_y,h,quotient_re,quotient_im",
        &csv_rows,
    )?;
    #[derive(Serialize)]
    struct Out {
        rows: Vec<QuotientRow>,
        trace_csv: Option<String>,
    }
    emit(
        "minkowski-derivative",
        None,
        &format!("{shape}{freqs:?}"),
        Out {
            rows: out_rows,
            trace_csv,
        },
    );
    Ok(())
}

// ---------------------------------------------------------------------------

#[derive(Args, Debug)]
pub struct WeakProbeArgs {
    #[arg(long)]
    shape: Option<String>,
    /// Exponential probe frequencies "x,y".
    #[arg(long)]
    freq: Vec<String>,
    /// Radial bumps "cx,cy,r".
    #[arg(long)]
    bump: Vec<String>,
}

pub fn weak_probe(a: WeakProbeArgs, ctx: &Ctx) -> Result<()> {
    let config = ctx.config_value()?;
    let shape_name = pick(a.shape, &config, "shape", "square".to_string());
    let region = parse_region(&shape_name)?;
    let Region::Shape(shape) = region else {
        return Err(Error::InvalidInput(
            "weak-probe expects an honest shape".into(),
        ));
    };
    let mut phis = vec![TestFn::ExpCos(pt2(0.0, 0.0))];
    let freqs = if a.freq.is_empty() {
        cfg::<Vec<String>>(&config, "freq").unwrap_or_else(|| vec!["1.0,0.5".into()])
    } else {
        a.freq.clone()
    };
    for s in &freqs {
        let p: Vec<f64> = s
            .split(',')
            .map(|x| x.parse().map_err(|_| Error::InvalidInput(format!("bad freq {s}"))))
            .collect::<Result<_>>()?;
        phis.push(TestFn::ExpCos(pt2(p[0], p[1])));
        phis.push(TestFn::ExpSin(pt2(p[0], p[1])));
    }
    let bumps = if a.bump.is_empty() {
        cfg::<Vec<String>>(&config, "bump").unwrap_or_else(|| vec!["0.5,0.0,0.3".into()])
    } else {
        a.bump.clone()
    };
    for s in &bumps {
        let p: Vec<f64> = s
            .split(',')
            .map(|x| x.parse().map_err(|_| Error::InvalidInput(format!("bad bump {s}"))))
            .collect::<Result<_>>()?;
        phis.push(TestFn::RadialBump {
            center: [p[0], p[1]],
            radius: p[2],
        });
    }
    let rep = weak_convergence_probe(&shape, &phis, &default_h_grid())?;
    let rows: Vec<String> = rep
        .rows
        .iter()
        .map(|r| format!("{},{},{},{},{}", r.phi_id, r.h, r.value, r.target, r.abs_err))
        .collect();
    let table_csv = write_csv(
        &ctx.out_dir,
        "weak_probe.csv",
        "phi_id,h,value,target,abs_err",
        &rows,
    )?;
    #[derive(Serialize)]
    struct Out {
        verdicts: Vec<(String, f64, f64, bool)>,
        table_csv: Option<String>,
    }
    emit(
        "weak-probe",
        None,
        &format!("{shape_name}{freqs:?}{bumps:?}"),
        Out {
            verdicts: rep.verdicts,
            table_csv,
        },
    );
    Ok(())
}

// ---------------------------------------------------------------------------

#[derive(Args, Debug)]
pub struct DiscrepancyArgs {
    #[arg(long)]
    u: Option<String>,
    #[arg(long)]
    pointset: Option<String>,
    /// fourier | mc | both
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Fourier truncation radius override.
    #[arg(long)]
    m_cutoff: Option<f64>,
}

#[derive(Serialize)]
struct D2Out {
    value: f64,
    method: String,
    m_or_samples: f64,
    tail_bound_or_ci: f64,
    tail_controlled: bool,
    m_of_u: Option<f64>,
    m_small_of_u: Option<f64>,
    n0_estimate: Option<f64>,
    u_catalog_id: String,
}

fn d2_out(rep: &bvf::discrepancy::DiscrepancyReport, uid: &str) -> D2Out {
    D2Out {
        value: rep.value,
        method: match rep.method {
            D2Method::FourierSum => "fourier_sum".into(),
            D2Method::MonteCarlo => "monte_carlo".into(),
        },
        m_or_samples: rep
            .m_cutoff
            .unwrap_or_else(|| rep.samples.unwrap_or(0) as f64),
        tail_bound_or_ci: rep.tail_bound_or_ci,
        tail_controlled: rep.tail_controlled,
        m_of_u: rep.m_of_u,
        m_small_of_u: rep.m_small_of_u,
        n0_estimate: rep.n0_estimate,
        u_catalog_id: uid.to_string(),
    }
}

pub fn discrepancy_cmd(a: DiscrepancyArgs, ctx: &Ctx) -> Result<()> {
    let config = ctx.config_value()?;
    let uname = pick(a.u, &config, "u", "ball:0.25".to_string());
    let pointset_spec = pick(a.pointset, &config, "pointset", "lattice:8".to_string());
    let method = pick(a.method, &config, "method", "both".to_string());
    let samples = pick(a.samples, &config, "samples", 200_000);
    let seed = pick(a.seed, &config, "seed", 7);
    let m_cutoff = pick_opt(a.m_cutoff, &config, "m_cutoff");
    let u = named_function(&uname)?;
    let pts = parse_pointset(&pointset_spec, u.dim(), seed)?;

    #[derive(Serialize)]
    struct Out {
        n_points: usize,
        reports: Vec<D2Out>,
        agree_within_budget: Option<bool>,
    }
    let mut reports = Vec::new();
    let mut fv = None;
    let mut mv = None;
    if method == "fourier" || method == "both" {
        let rep = quadratic_discrepancy_fourier(
            &u,
            &pts,
            &FourierD2Opts {
                m_override: m_cutoff,
                ..Default::default()
            },
        )?;
        fv = Some((rep.value, rep.tail_bound_or_ci));
        reports.push(d2_out(&rep, &uname));
    }
    if method == "mc" || method == "both" {
        let rep = quadratic_discrepancy_mc(&u, &pts, samples, seed)?;
        mv = Some((rep.value, rep.tail_bound_or_ci));
        reports.push(d2_out(&rep, &uname));
    }
    let agree = match (fv, mv) {
        (Some((f, ft)), Some((m, mc))) => Some((f - m).abs() <= ft + mc),
        _ => None,
    };
    emit(
        "discrepancy",
        Some(seed),
        &format!("{uname}{pointset_spec}{method}{samples}{seed}{m_cutoff:?}"),
        Out {
            n_points: pts.len(),
            reports,
            agree_within_budget: agree,
        },
    );
    Ok(())
}

// ---------------------------------------------------------------------------

#[derive(Args, Debug)]
pub struct PointsetArgs {
    /// lattice:m | random:n | composite:n
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

pub fn pointset(a: PointsetArgs, ctx: &Ctx) -> Result<()> {
    let config = ctx.config_value()?;
    let kind = pick(a.kind, &config, "kind", "lattice:4".to_string());
    let d = pick(a.d, &config, "d", 2);
    let seed = pick(a.seed, &config, "seed", 0);
    let pts = parse_pointset(&kind, d, seed)?;
    let rows: Vec<String> = pts
        .pts
        .iter()
        .map(|p| {
            (0..d)
                .map(|k| format!("{}", p[k]))
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect();
    let header = (0..d).map(|k| format!("x{k}")).collect::<Vec<_>>().join(",");
    let csv = write_csv(&ctx.out_dir, "pointset.csv", &header, &rows)?;
    #[derive(Serialize)]
    struct Out {
        n: usize,
        d: usize,
        provenance: String,
        csv: Option<String>,
    }
    emit(
        "pointset",
        Some(seed),
        &format!("{kind}{d}{seed}"),
        Out {
            n: pts.len(),
            d,
            provenance: format!("{:?}", pts.provenance),
            csv,
        },
    );
    Ok(())
}

// ---------------------------------------------------------------------------

#[derive(Args, Debug)]
pub struct CmArgs {
    #[arg(long)]
    pointset: Option<String>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    m_radius: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Also search for the averaging witness point.
    #[arg(long, default_value_t = false)]
    witness: bool,
}

pub fn cm_check(a: CmArgs, ctx: &Ctx) -> Result<()> {
    let config = ctx.config_value()?;
    let pointset_spec = pick(a.pointset, &config, "pointset", "random:8".to_string());
    let d = pick(a.d, &config, "d", 2);
    let m_radius = pick(a.m_radius, &config, "m_radius", 3.0);
    let seed = pick(a.seed, &config, "seed", 1);
    let pts = parse_pointset(&pointset_spec, d, seed)?;
    let check = cassels_montgomery_check(&pts, m_radius)?;
    #[derive(Serialize)]
    struct Out {
        lhs: f64,
        rhs: f64,
        holds: bool,
        witness: Option<(Vec<f64>, u64, f64)>,
    }
    let witness = if a.witness {
        let w = cm_witness(m_radius, d, None)?;
        Some((w.x[..d].to_vec(), w.count, w.required))
    } else {
        None
    };
    emit(
        "cm-check",
        Some(seed),
        &format!("{pointset_spec}{d}{m_radius}{seed}"),
        Out {
            lhs: check.lhs,
            rhs: check.rhs,
            holds: check.holds,
            witness,
        },
    );
    Ok(())
}

// ---------------------------------------------------------------------------

#[derive(Args, Debug)]
pub struct ScalingArgs {
    #[arg(long)]
    u: Option<String>,
    /// lattice | composite | random
    #[arg(long)]
    construction: Option<String>,
    /// Comma-separated N list; default m^2 for m = 2..16.
    #[arg(long)]
    ns: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
}

pub fn scaling(a: ScalingArgs, ctx: &Ctx) -> Result<()> {
    let config = ctx.config_value()?;
    let uname = pick(a.u, &config, "u", "ball:0.25".to_string());
    let construction = pick(a.construction, &config, "construction", "lattice".to_string());
    let ns_str = pick_opt(a.ns, &config, "ns");
    let seed = pick(a.seed, &config, "seed", 7);
    let u = named_function(&uname)?;
    let cons = match construction.as_str() {
        "lattice" => Construction::Lattice,
        "composite" => Construction::Composite,
        "random" => Construction::Random,
        other => return Err(Error::InvalidInput(format!("unknown construction {other}"))),
    };
    let ns: Vec<u64> = match &ns_str {
        Some(s) => s
            .split(',')
            .map(|x| x.parse().map_err(|_| Error::InvalidInput(format!("bad N {x}"))))
            .collect::<Result<_>>()?,
        None => (2..=16u64).map(|m| m * m).collect(),
    };
    let rows = scaling_study(&u, cons, &ns, seed)?;
    let csv_rows: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{},{}",
                r.n, r.d2, r.normalized, r.m_cutoff, r.tail_bound, r.tail_controlled
            )
        })
        .collect();
    let csv = write_csv(
        &ctx.out_dir,
        "scaling_study.csv",
        "n,d2,normalized,m_cutoff,tail_bound,tail_controlled",
        &csv_rows,
    )?;
    #[derive(Serialize)]
    struct Out {
        rows: usize,
        normalized_min: f64,
        normalized_max: f64,
        csv: Option<String>,
    }
    emit(
        "scaling-study",
        Some(seed),
        &format!("{uname}{construction}{ns:?}{seed}"),
        Out {
            rows: rows.len(),
            normalized_min: rows.iter().map(|r| r.normalized).fold(f64::INFINITY, f64::min),
            normalized_max: rows.iter().map(|r| r.normalized).fold(0.0, f64::max),
            csv,
        },
    );
    Ok(())
}

// ---------------------------------------------------------------------------

#[derive(Args, Debug)]
pub struct InequalitiesArgs {
    #[arg(long)]
    instances: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    rmax: Option<f64>,
}

pub fn inequalities(a: InequalitiesArgs, ctx: &Ctx) -> Result<()> {
    let config = ctx.config_value()?;
    let instances = pick(a.instances, &config, "instances", 50);
    let seed = pick(a.seed, &config, "seed", 1);
    let rmax = pick(a.rmax, &config, "rmax", 20.0);
    let catalog = bvf::catalog::box_union_catalog(instances, seed);
    let grid: Vec<f64> = (1..=10).map(|k| rmax * k as f64 / 10.0).collect();
    let dirs = [
        pt2(1.0, 0.0),
        pt2(std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2),
    ];
    let mut rows = Vec::new();
    let mut all_hold = true;
    for (i, u) in catalog.iter().enumerate() {
        for (k, v) in dirs.iter().enumerate() {
            let c = directional_bound_check(u, v, &grid)?;
            all_hold &= c.holds;
            rows.push(format!(
                "{i},directional{k},{},{},{},{}",
                c.max_lhs,
                c.rhs,
                c.rhs - c.max_lhs,
                c.holds
            ));
        }
        let c = averaged_bound_check(u, &grid)?;
        all_hold &= c.holds;
        rows.push(format!(
            "{i},averaged,{},{},{},{}",
            c.max_lhs,
            c.rhs,
            c.rhs - c.max_lhs,
            c.holds
        ));
        let c = isoperimetric_check(u)?;
        all_hold &= c.holds;
        rows.push(format!(
            "{i},isoperimetric,{},{},{},{}",
            c.lhs,
            c.rhs,
            c.rhs - c.lhs,
            c.holds
        ));
    }
    let csv = write_csv(
        &ctx.out_dir,
        "inequalities.csv",
        "catalog_id,check,lhs,rhs,margin,holds",
        &rows,
    )?;
    #[derive(Serialize)]
    struct Out {
        instances: usize,
        all_hold: bool,
        csv: Option<String>,
    }
    emit(
        "inequalities",
        Some(seed),
        &format!("{instances}{seed}{rmax}"),
        Out {
            instances,
            all_hold,
            csv,
        },
    );
    if !all_hold {
        std::process::exit(2);
    }
    Ok(())
}

// ---------------------------------------------------------------------------

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// trivial | acceptance
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
}

pub fn verify_all(a: VerifyArgs, ctx: &Ctx) -> Result<()> {
    let config = ctx.config_value()?;
    let suite = pick(a.suite, &config, "suite", "acceptance".to_string());
    let seed = pick(a.seed, &config, "seed", 20260810);
    let results = match suite.as_str() {
        "trivial" => bvf::verify::run_trivial()?,
        "acceptance" => bvf::verify::run_all(seed)?,
        other => return Err(Error::InvalidInput(format!("unknown suite {other}"))),
    };
    for r in &results {
        println!("{}", r.line());
    }
    let all = results.iter().all(|r| r.passed);
    #[derive(Serialize)]
    struct Out {
        suite: String,
        passed: usize,
        failed: usize,
        all_passed: bool,
    }
    emit(
        "verify-all",
        Some(seed),
        &format!("{suite}{seed}"),
        Out {
            suite,
            passed: results.iter().filter(|r| r.passed).count(),
            failed: results.iter().filter(|r| !r.passed).count(),
            all_passed: all,
        },
    );
    if !all {
        std::process::exit(2);
    }
    Ok(())
}
