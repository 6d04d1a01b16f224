use crate::output::Output;
use crate::Global;
use clap::{Args, ValueEnum};
use hbm::boundary_poincare::{
    bh_planar_estimate, bh_to_gap_bound, bh_upper_general, bh_upper_lq, cube_test_function_quotient, dk_upper_bound,
    q_kw, reilly_terms, steklov_ball_eigenvalue, test_function_quotient, BoundDirection, BoundReport, Domain,
    HarmonicBasis, Parity, PlanarBoundary, Quantity, TestFunction,
};
use hbm::brunn_minkowski::{mixed_table, volume};
use hbm::geometry::{parse_body, sample_field};
use hbm::hbm_spectrum::{assemble_with, default_cluster_tol, even_gap, geodesic_concavity, solve_spectrum};
use hbm::poly::Poly2;
use hbm::sphere_disc::Stencil;
use hbm::stability::{analyze, CorpusSpec, PChoice, StabilityOptions};
use hbm::{BodySpec, GridDescriptor, HbmError, Result, SphereGrid};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use std::sync::Arc;

fn bad(msg: impl Into<String>) -> HbmError {
    HbmError::Input(msg.into())
}

/// Dimension and grid with defaults filled: s1:N=512 in the plane, s2:L=4 in space.
fn resolve_grid(dim: Option<usize>, grid: Option<GridDescriptor>) -> Result<(usize, GridDescriptor)> {
    match (dim, grid) {
        (Some(d), Some(g)) if d != g.dim() => Err(bad(format!("--dim {d} does not match --grid {g}"))),
        (_, Some(g)) => Ok((g.dim(), g)),
        (Some(2) | None, None) => Ok((2, GridDescriptor::Circle { n: 512 })),
        (Some(3), None) => Ok((3, GridDescriptor::Icosphere { level: 4 })),
        (Some(d), None) => Err(bad(format!("--dim must be 2 or 3, got {d}"))),
    }
}

fn build(g: GridDescriptor) -> Result<Arc<SphereGrid>> {
    Ok(Arc::new(g.build()?))
}

fn config<T: Serialize>(args: &T, extra: &[(&str, Value)]) -> Value {
    let mut v = serde_json::to_value(args).expect("arguments serialize");
    if let Value::Object(m) = &mut v {
        for (k, x) in extra {
            m.insert(k.to_string(), x.clone());
        }
    }
    v
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum StencilArg {
    Second,
    Fourth,
}

impl From<StencilArg> for Stencil {
    fn from(s: StencilArg) -> Self {
        match s {
            StencilArg::Second => Stencil::SecondOrder,
            StencilArg::Fourth => Stencil::FourthOrder,
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct SpectrumArgs {
    /// Body description string.
    #[arg(long)]
    pub body: String,
    /// Ambient dimension (2 or 3); taken from --grid when given.
    #[arg(long)]
    pub dim: Option<usize>,
    /// s1:N=<n> or s2:L=<level>.
    #[arg(long)]
    pub grid: Option<GridDescriptor>,
    /// Restrict to even functions.
    #[arg(long)]
    pub even: bool,
    /// Number of eigenvalues, constant mode included.
    #[arg(long, default_value_t = 6)]
    pub k: usize,
    /// Difference stencil on the circle.
    #[arg(long, value_enum, default_value_t = StencilArg::Fourth)]
    pub stencil: StencilArg,
}

pub fn spectrum(a: &SpectrumArgs) -> Result<Output> {
    let (dim, gd) = resolve_grid(a.dim, a.grid)?;
    let grid = build(gd)?;
    let body = parse_body(&a.body, dim)?;
    let forms = assemble_with(&sample_field(&body, &grid)?, a.stencil.into())?;
    let r = solve_spectrum(&forms, a.k, a.even)?;
    // the first k distinct levels; solve for more pairs until the k-th level is closed
    let tol = default_cluster_tol(dim);
    let max = r.discretization.reduced_dim;
    let mut lv = levels(&r.eigenvalues, tol);
    let mut m = a.k;
    while lv.len() <= a.k && m < max {
        m = (2 * m).min(max);
        lv = levels(&solve_spectrum(&forms, m, a.even)?.eigenvalues, tol);
    }
    lv.truncate(a.k);
    let mut result = to_value(&r);
    result["distinct_eigenvalues"] = json!(lv.iter().map(|l| l.0).collect::<Vec<_>>());
    result["multiplicities"] = json!(lv.iter().map(|l| l.1).collect::<Vec<_>>());
    result["level_tol"] = json!(tol);
    Ok(Output::new("spectrum", config(a, &[("dim", json!(dim)), ("grid", json!(gd))]), result))
}

/// Group ascending eigenvalues whose gaps are within tol·max(1, |λ|); each
/// level reports its mean and size.
fn levels(values: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize, f64)> = Vec::new();
    for &v in values {
        match out.last_mut() {
            Some((sum, n, last)) if (v - *last).abs() <= tol * last.abs().max(1.0) => {
                *sum += v;
                *n += 1;
                *last = v;
            }
            _ => out.push((v, 1, v)),
        }
    }
    out.into_iter().map(|(s, n, _)| (s / n as f64, n)).collect()
}

#[derive(Args, Debug, Serialize)]
pub struct PbmArgs {
    /// Body whose even gap is checked.
    #[arg(long, alias = "body")]
    pub body0: String,
    /// Second body; adds the concavity sweep along the L^p combination.
    #[arg(long)]
    pub body1: Option<String>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub p: f64,
    /// Number of equispaced λ in the sweep.
    #[arg(long, default_value_t = 11)]
    pub lambdas: usize,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub grid: Option<GridDescriptor>,
}

pub fn pbm_check(a: &PbmArgs) -> Result<Output> {
    let (dim, gd) = resolve_grid(a.dim, a.grid)?;
    let grid = build(gd)?;
    let k0 = parse_body(&a.body0, dim)?;
    let gap = even_gap(&assemble_with(&sample_field(&k0, &grid)?, Stencil::default())?)?;
    let n = dim as f64;
    let threshold = (n - a.p) / (n - 1.0);
    let mut result = json!({
        "lambda_1e": gap.lambda_1e,
        "p_star": gap.p_star,
        "threshold": threshold,
        "holds": gap.lambda_1e >= threshold,
        "margin": gap.lambda_1e - threshold,
        "discretization": gap.discretization,
    });
    let mut rows = None;
    if let Some(b1) = &a.body1 {
        let k1 = parse_body(b1, dim)?;
        let c = geodesic_concavity(&k0, &k1, a.p, a.lambdas, &grid)?;
        rows = Some(c.rows.iter().map(to_value).collect());
        result["concavity"] = to_value(&c);
    }
    let mut out = Output::new("pbm-check", config(a, &[("dim", json!(dim)), ("grid", json!(gd))]), result);
    out.rows = rows;
    Ok(out)
}

#[derive(Args, Debug, Serialize)]
pub struct MixedArgs {
    /// Body strings separated by ';'.
    #[arg(long)]
    pub bodies: String,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub grid: Option<GridDescriptor>,
}

pub fn mixed(a: &MixedArgs) -> Result<Output> {
    let (dim, gd) = resolve_grid(a.dim, a.grid)?;
    let grid = build(gd)?;
    let specs: Vec<&str> = a.bodies.split(';').map(str::trim).filter(|s| !s.is_empty()).collect();
    if specs.is_empty() {
        return Err(bad("--bodies is empty"));
    }
    let fields = specs.iter().map(|s| sample_field(&parse_body(s, dim)?, &grid)).collect::<Result<Vec<_>>>()?;
    let table = mixed_table(&fields)?;
    let volumes: Vec<f64> = fields.iter().map(volume).collect();
    let rows = table
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut m = serde_json::Map::new();
            m.insert("body".into(), json!(specs[i]));
            for (j, v) in r.iter().enumerate() {
                m.insert(format!("v{j}"), json!(v));
            }
            Value::Object(m)
        })
        .collect();
    let result = json!({
        "bodies": specs,
        "table": table,
        "volumes": volumes,
        "discretization": { "grid": gd, "nodes": grid.len() },
    });
    let mut out = Output::new("mixed", config(a, &[("dim", json!(dim)), ("grid", json!(gd))]), result);
    out.rows = Some(rows);
    Ok(out)
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryQuantity {
    /// Harmonic-basis estimate of the boundary Poincaré constant (planar).
    BhEst,
    DkUpper,
    BhUpper,
    Steklov,
    Reilly,
    Quotient,
    Qkw,
    GapBound,
}

#[derive(Args, Debug, Serialize)]
pub struct BoundaryArgs {
    #[arg(long, value_enum)]
    pub quantity: BoundaryQuantity,
    /// Planar body (bh-est, quotient).
    #[arg(long)]
    pub body: Option<String>,
    /// Highest harmonic degree of the basis.
    #[arg(long, default_value_t = 8)]
    pub degree: usize,
    /// even, all or unconditional.
    #[arg(long, default_value = "even")]
    pub parity: String,
    /// Test function: half_norm_sq or half_x1_sq.
    #[arg(long, default_value = "half_norm_sq")]
    pub u: String,
    /// Use the cube [−1,1]^n instead of --body for the quotient.
    #[arg(long)]
    pub cube_n: Option<usize>,
    /// Inner radius.
    #[arg(long)]
    pub r: Option<f64>,
    /// Outer radius.
    #[arg(long = "big-r", alias = "R")]
    pub big_r: Option<f64>,
    /// Poincaré constant of K.
    #[arg(long)]
    pub c_poin: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    /// ℓ_q exponent for bh-upper (general bound when absent).
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub max_hess: Option<f64>,
    #[arg(long)]
    pub w_range: Option<f64>,
    /// Harmonic degree for steklov.
    #[arg(long)]
    pub k: Option<usize>,
    /// Upper bound on B_H fed to gap-bound.
    #[arg(long)]
    pub bh: Option<f64>,
    /// disk or square (reilly).
    #[arg(long, default_value = "disk")]
    pub domain: String,
    /// Polynomial in x, y (reilly).
    #[arg(long)]
    pub poly: Option<String>,
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| bad(format!("--{flag} is required for this quantity")))
}

fn planar(a: &BoundaryArgs) -> Result<PlanarBoundary> {
    let src = a.body.as_deref().ok_or_else(|| bad("--body is required for this quantity"))?;
    PlanarBoundary::from_spec(&parse_body(src, 2)?)
}

fn boundary_report(a: &BoundaryArgs) -> Result<Value> {
    let r: BoundReport = match a.quantity {
        BoundaryQuantity::BhEst => {
            let basis = HarmonicBasis::new(a.degree, a.parity.parse::<Parity>()?)?;
            bh_planar_estimate(&planar(a)?, &basis)?
        }
        BoundaryQuantity::DkUpper => {
            dk_upper_bound(need(a.r, "r")?, need(a.big_r, "big-r")?, need(a.c_poin, "c-poin")?, need(a.n, "n")?)?
        }
        BoundaryQuantity::BhUpper => match a.q {
            Some(q) => bh_upper_lq(q, need(a.n, "n")?, need(a.c_poin, "c-poin")?, need(a.r, "r")?)?,
            None => bh_upper_general(
                need(a.c_poin, "c-poin")?,
                need(a.r, "r")?,
                need(a.max_hess, "max-hess")?,
                need(a.w_range, "w-range")?,
            )?,
        },
        BoundaryQuantity::Steklov => {
            let (n, k) = (need(a.n, "n")?, need(a.k, "k")?);
            let mut r =
                BoundReport::new(Quantity::SteklovEigenvalue, BoundDirection::Exact, steklov_ball_eigenvalue(n, k)?);
            r.input("n", n as f64).input("k", k as f64);
            r
        }
        BoundaryQuantity::Reilly => {
            let poly = a.poly.as_deref().ok_or_else(|| bad("--poly is required for reilly"))?;
            return Ok(to_value(&reilly_terms(a.domain.parse::<Domain>()?, &Poly2::parse(poly)?)?));
        }
        BoundaryQuantity::Quotient => {
            let u = a.u.parse::<TestFunction>()?;
            match a.cube_n {
                Some(n) => cube_test_function_quotient(n, u)?,
                None => test_function_quotient(&planar(a)?, u),
            }
        }
        BoundaryQuantity::Qkw => {
            q_kw(need(a.c_poin, "c-poin")?, need(a.max_hess, "max-hess")?, need(a.w_range, "w-range")?)?
        }
        BoundaryQuantity::GapBound => bh_to_gap_bound(need(a.bh, "bh")?, need(a.n, "n")?)?,
    };
    Ok(to_value(&r))
}

pub fn boundary(a: &BoundaryArgs) -> Result<Output> {
    Ok(Output::new("boundary", config(a, &[]), boundary_report(a)?))
}

#[derive(Args, Debug, Serialize)]
pub struct StabilityArgs {
    #[arg(long = "bodyK", required_unless_present = "corpus")]
    pub body_k: Option<String>,
    #[arg(long = "bodyL", required_unless_present = "corpus")]
    pub body_l: Option<String>,
    /// 'auto' (p* from the even gap) or a number.
    #[arg(long, default_value = "0", allow_negative_numbers = true)]
    pub p: String,
    /// Polygon-level deficits δ, β and A.
    #[arg(long)]
    pub deficits: bool,
    /// Compare with the Bonnesen-type bound.
    #[arg(long)]
    pub bonnesen: bool,
    /// random:seed=<u64>,count=<k>; the seed defaults to --seed.
    #[arg(long, conflicts_with_all = ["body_k", "body_l"])]
    pub corpus: Option<String>,
    #[arg(long)]
    pub grid: Option<GridDescriptor>,
}

fn corpus_spec(s: &str, seed: u64) -> Result<CorpusSpec> {
    if s.contains("seed=") {
        return s.parse();
    }
    let rest = s.strip_prefix("random:").ok_or_else(|| bad(format!("corpus must start with 'random:', got '{s}'")))?;
    format!("random:seed={seed},{rest}").parse()
}

pub fn stability(a: &StabilityArgs, g: &Global) -> Result<Output> {
    let (_, gd) = resolve_grid(Some(2), a.grid)?;
    let grid = build(gd)?;
    let opts = StabilityOptions { p: a.p.parse::<PChoice>()?, deficits: a.deficits, bonnesen: a.bonnesen };
    let pairs: Vec<(BodySpec, BodySpec)> = match &a.corpus {
        Some(c) => {
            let spec = corpus_spec(c, g.seed)?;
            hbm::stability::random_pairs(spec.seed, spec.count)?
        }
        None => {
            let k = a.body_k.as_deref().ok_or_else(|| bad("--bodyK is required"))?;
            let l = a.body_l.as_deref().ok_or_else(|| bad("--bodyL is required"))?;
            vec![(parse_body(k, 2)?, parse_body(l, 2)?)]
        }
    };
    let reports = pairs.par_iter().map(|(k, l)| analyze(k, l, &grid, opts)).collect::<Result<Vec<_>>>()?;
    let rows: Vec<Value> = pairs
        .iter()
        .zip(&reports)
        .enumerate()
        .map(|(i, ((k, l), r))| {
            let mut v = json!({ "index": i, "body_k": k.to_string(), "body_l": l.to_string() });
            if let (Value::Object(m), Value::Object(r)) = (&mut v, to_value(r)) {
                m.extend(r);
            }
            v
        })
        .collect();
    let mut extra = vec![("grid", json!(gd))];
    if let Some(c) = &a.corpus {
        extra.push((
            "corpus",
            json!(corpus_spec(c, g.seed).map(|s| format!("random:seed={},count={}", s.seed, s.count))?),
        ));
    }
    let all_nonneg = reports.iter().all(|r| {
        let m = &r.margins;
        [m.minkowski2, m.minkowski2_variance, m.isoperimetric, m.isoperimetric_variance, m.bm, m.bm_variance]
            .iter()
            .all(|v| *v >= 0.0)
    });
    let result = if a.corpus.is_some() {
        json!({ "count": rows.len(), "all_margins_nonnegative": all_nonneg, "pairs": rows })
    } else {
        rows[0].clone()
    };
    let mut out = Output::new("stability", config(a, &extra), result);
    out.rows = Some(rows);
    Ok(out)
}

#[derive(Args, Debug, Serialize)]
pub struct SteklovArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
}

pub fn steklov(a: &SteklovArgs) -> Result<Output> {
    let v = steklov_ball_eigenvalue(a.n, a.k)?;
    let mut out = Output::new("steklov", config(a, &[]), json!({ "eigenvalue": v, "exact": true }));
    out.headline = Some(format!("{v}"));
    Ok(out)
}

#[derive(Args, Debug, Serialize)]
pub struct ReillyArgs {
    /// disk or square.
    #[arg(long, default_value = "disk")]
    pub domain: String,
    /// Polynomial in x, y of degree at most 10.
    #[arg(long)]
    pub poly: String,
}

pub fn reilly(a: &ReillyArgs) -> Result<Output> {
    let t = reilly_terms(a.domain.parse::<Domain>()?, &Poly2::parse(&a.poly)?)?;
    Ok(Output::new("reilly", config(a, &[]), to_value(&t)))
}
