use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use rdmgeom::bose::{bose_state, bose_tc, bose_v0_branch};
use rdmgeom::classical::{gibbs_observables, onsager_critical_temperature, onsager_point, ClassicalParams, CylinderSpec};
use rdmgeom::geometry::{
    convex_hull, project, spin_branch_points, support_point, theta_grid, theta_scan_refined, Backend,
};
use rdmgeom::io::{
    read_cloud, write_cloud, write_cloud_columns, write_curve, write_hull, write_json, CloudPoint, DatasetManifest,
    Source,
};
use rdmgeom::mps::spin_scatter;
use rdmgeom::spin::{critical_exponent_fit, pfeuty_point, Branch, ChainSpec};
use rdmgeom::{Direction3, Error, ExpectationPoint, ModelTag, SeededRng};

use crate::{Command, ExponentArgs, OpscanArgs, RunConfig, ScatterArgs, SurfaceArgs, EXIT_FAILURE, EXIT_USAGE};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Run(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Run(_) => EXIT_FAILURE,
        }
    }
}

/// Files written by a run and the items that could not be produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub failures: Vec<String>,
}

impl Outcome {
    fn cloud(&mut self, points: &[CloudPoint], manifest: &DatasetManifest, path: PathBuf) -> Result<(), Error> {
        write_cloud(points, manifest, &path)?;
        self.failures.extend(manifest.failures.iter().cloned());
        self.files.push(path);
        Ok(())
    }
}

/// Runs one subcommand on a pool of `config.workers` threads.
pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} workers: {e}", config.workers)))?;
    pool.install(|| match &config.command {
        Command::Surface(a) => surface(a),
        Command::Scatter(a) => scatter(a),
        Command::Opscan(a) => opscan(a),
        Command::Exponent(a) => exponent(a),
    })
}

/// Evaluates every cell in parallel, keeping grid order. Cells whose
/// direction the backend cannot handle are skipped when `skip_unsupported`.
fn evaluate<C, F>(cells: &[(String, C)], skip_unsupported: bool, f: F) -> (Vec<CloudPoint>, Vec<String>, usize)
where
    C: Sync,
    F: Fn(usize, &C) -> Result<ExpectationPoint, Error> + Sync,
{
    let results: Vec<Result<ExpectationPoint, Error>> =
        cells.par_iter().enumerate().map(|(i, (_, c))| f(i, c)).collect();
    let (mut points, mut failures, mut skipped) = (Vec::new(), Vec::new(), 0);
    for ((label, _), r) in cells.iter().zip(results) {
        match r {
            Ok(p) => points.push(CloudPoint::new(p, Source::Sweep)),
            Err(Error::UnsupportedDirection(_)) if skip_unsupported => skipped += 1,
            Err(e) => failures.push(format!("{label}: {e}")),
        }
    }
    (points, failures, skipped)
}

fn sphere_cells(count: usize) -> Vec<(String, Direction3)> {
    Direction3::sphere_grid(count).into_iter().enumerate().map(|(k, d)| (format!("direction {k}"), d)).collect()
}

fn product3(a: &[f64], b: &[f64], c: &[f64]) -> Vec<[f64; 3]> {
    let mut out = Vec::with_capacity(a.len() * b.len() * c.len());
    for &x in a {
        for &y in b {
            for &z in c {
                out.push([x, y, z]);
            }
        }
    }
    out
}

fn required_t(a: &SurfaceArgs) -> Result<Vec<f64>, CliError> {
    a.t.as_ref().map(|g| g.values()).ok_or_else(|| CliError::Usage(format!("--T is required for {}", a.model)))
}

fn branch_files(
    out: &mut Outcome,
    dir: &Path,
    stem: &str,
    base: &DatasetManifest,
    grid: &[f64],
    label: &str,
    f: impl Fn(f64, Branch) -> Result<ExpectationPoint, Error>,
) -> Result<(), Error> {
    for (branch, suffix) in [(Branch::Symmetric, ""), (Branch::Plus, "_plus"), (Branch::Minus, "_minus")] {
        let mut manifest = base.clone().with("branch", branch);
        let mut points = Vec::with_capacity(grid.len());
        for &x in grid {
            match f(x, branch) {
                Ok(p) => points.push(CloudPoint::new(p, Source::Oracle)),
                Err(e) => manifest.failures.push(format!("{label} = {x:?}: {e}")),
            }
        }
        out.cloud(&points, &manifest, dir.join(format!("{stem}{suffix}.csv")))?;
    }
    Ok(())
}

fn surface(a: &SurfaceArgs) -> Result<Outcome, CliError> {
    let tag = a.model;
    let mut manifest = DatasetManifest::new(tag.as_str(), &tag.axis_labels());
    let mut out = Outcome::default();
    let (points, failures, skipped) = match tag {
        ModelTag::Spin0d | ModelTag::Spin1d | ModelTag::SpinMf => {
            let backend = match tag {
                ModelTag::Spin0d => Backend::Spin0d,
                ModelTag::Spin1d => {
                    let chain = ChainSpec::new(a.sites, a.boundary.into())?;
                    manifest.set("chain", chain);
                    Backend::Spin1d { chain }
                }
                _ => {
                    manifest.set("restarts", a.restarts);
                    manifest.set("seed", a.seed);
                    Backend::SpinMf { restarts: a.restarts, rng: SeededRng::new(a.seed) }
                }
            };
            let cells: Vec<(String, Option<Direction3>)> = match a.sphere {
                Some(n) => sphere_cells(n).into_iter().map(|(l, d)| (l, Some(d))).collect(),
                None => {
                    manifest.set("J", &a.j);
                    manifest.set("Bz", &a.bz);
                    manifest.set("Bx", &a.bx);
                    manifest.set("order", "J, Bz, Bx; Bx varies fastest");
                    product3(&a.j.values(), &a.bz.values(), &a.bx.values())
                        .into_iter()
                        .map(|[j, bz, bx]| {
                            (format!("J = {j:?}, Bz = {bz:?}, Bx = {bx:?}"), Direction3::new(j, bz, bx).ok())
                        })
                        .collect()
                }
            };
            evaluate(&cells, false, |i, d| match d {
                Some(d) => support_point(d, &backend.for_item(i)),
                None => Err(Error::InvalidArgument("all couplings vanish".into())),
            })
        }
        ModelTag::Classical2d => {
            let cylinder = CylinderSpec::new(a.width)?;
            manifest.set("W", a.width);
            match a.sphere {
                Some(n) => {
                    manifest.set("T", 1.0);
                    let backend = Backend::Classical2d { cylinder };
                    evaluate(&sphere_cells(n), true, |_, d| support_point(d, &backend))
                }
                None => {
                    let ts = required_t(a)?;
                    manifest.set("J", &a.j);
                    manifest.set("h", &a.h);
                    manifest.set("T", a.t.as_ref());
                    manifest.set("order", "J, h, T; T varies fastest");
                    let cells: Vec<(String, [f64; 3])> = product3(&a.j.values(), &a.h.values(), &ts)
                        .into_iter()
                        .map(|c| (format!("J = {:?}, h = {:?}, T = {:?}", c[0], c[1], c[2]), c))
                        .collect();
                    evaluate(&cells, false, |_, &[j, h, t]| {
                        Ok(gibbs_observables(cylinder, ClassicalParams::new(j, h, t))?.point())
                    })
                }
            }
        }
        ModelTag::Bose3d => match a.sphere {
            Some(n) => evaluate(&sphere_cells(n), true, |_, d| support_point(d, &Backend::Bose3d)),
            None => {
                let ts = required_t(a)?;
                manifest.set("T", a.t.as_ref());
                manifest.set("v", &a.v);
                manifest.set("order", "v, T; T varies fastest");
                let mut cells = Vec::new();
                for &v in &a.v.values() {
                    for &t in &ts {
                        cells.push((format!("v = {v:?}, T = {t:?}"), (v, t)));
                    }
                }
                evaluate(&cells, false, |_, &(v, t)| Ok(bose_state(v, t)?.point()))
            }
        },
    };
    if let Some(n) = a.sphere {
        manifest.set("sphere", n);
        manifest.set("skipped", skipped);
    }
    manifest.failures = failures;
    out.cloud(&points, &manifest, a.out.join(format!("surface_{tag}.csv")))?;

    if a.sphere.is_none() {
        match tag {
            ModelTag::Spin1d => {
                // infinite-chain line at J = 1 and B_x = 0, parametrized by h = B_z
                let hs: Vec<f64> = a.bz.values().into_iter().filter(|h| *h >= 0.0).collect();
                let base = DatasetManifest::new("spin1d", &tag.axis_labels()).with("J", 1.0).with("h", &a.bz);
                branch_files(&mut out, &a.out, "pfeuty", &base, &hs, "h", pfeuty_point)?;
            }
            ModelTag::Classical2d => {
                let ts = required_t(a)?;
                let base = DatasetManifest::new("classical2d", &tag.axis_labels())
                    .with("J", 1.0)
                    .with("h", 0.0)
                    .with("T", a.t.as_ref());
                branch_files(&mut out, &a.out, "onsager", &base, &ts, "T", onsager_point)?;
            }
            ModelTag::Bose3d => {
                let ts = required_t(a)?;
                let base = DatasetManifest::new("bose3d", &tag.axis_labels()).with("v", 0.0).with("T", a.t.as_ref());
                branch_files(&mut out, &a.out, "condensate", &base, &ts, "T", |t, b| Ok(bose_v0_branch(t, b)?.point()))?;
            }
            _ => {}
        }
    }
    Ok(out)
}

fn scatter(a: &ScatterArgs) -> Result<Outcome, CliError> {
    let mut manifest = DatasetManifest::new("spin1d", &["XX", "Z", "X", "Y"])
        .with("count", a.count)
        .with("Dmin", a.d_min)
        .with("Dmax", a.d_max)
        .with("seed", a.seed);
    let samples = spin_scatter(a.count, a.d_min, a.d_max, SeededRng::new(a.seed))?;
    let mut points: Vec<CloudPoint> =
        samples.iter().map(|s| CloudPoint::with_y(s.point(), s.y, Source::Random)).collect();
    if a.augment {
        let chain = ChainSpec::periodic(a.sites)?;
        manifest.set("augment", serde_json::json!({ "J": a.augment_j, "Bz": &a.augment_bz, "chain": chain, "eps": a.eps }));
        for q in spin_branch_points(chain, a.augment_j, &a.augment_bz.values(), a.eps)? {
            points.push(CloudPoint::with_y(ExpectationPoint::new(q[0], q[1], q[2]), q[3], Source::Oracle));
        }
    }
    let path = a.out.join("scatter.csv");
    write_cloud_columns(&points, &manifest, true, &path)?;
    Ok(Outcome { files: vec![path], failures: Vec::new() })
}

#[derive(Debug, Serialize)]
struct OpscanReport {
    model_tag: String,
    cloud_hash: String,
    points: usize,
    theta_star: f64,
    d_max: f64,
    grid_step: f64,
    segment: Option<[ExpectationPoint; 2]>,
    curve: Vec<(f64, f64)>,
}

fn opscan(a: &OpscanArgs) -> Result<Outcome, CliError> {
    let (points, cloud_manifest) = read_cloud(&a.cloud)?;
    if points.is_empty() {
        return Err(Error::Schema("cloud has no rows".into()).into());
    }
    if points.iter().any(|p| p.y.is_none()) {
        return Err(Error::Schema("cloud has no `y` column; Θ scans need (a, b, c, y) rows".into()).into());
    }
    let base: Vec<[f64; 4]> = points.iter().map(CloudPoint::quad).collect();
    let thetas = a.thetas.as_ref().map(|g| g.values()).unwrap_or_else(|| theta_grid(64));
    let report = theta_scan_refined(&base, &thetas, a.refine)?;
    let theta_star = report.theta_star.expect("scan reports its maximum");
    let mut sorted = thetas.clone();
    sorted.sort_by(f64::total_cmp);
    let grid_step = sorted.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);

    let manifest = DatasetManifest::new(cloud_manifest.model_tag.clone(), &["theta", "d_max"])
        .with("cloud_hash", &cloud_manifest.content_hash)
        .with("thetas", a.thetas.as_ref().map(|g| g.to_string()).unwrap_or_else(|| "64 uniform in [0, pi)".into()))
        .with("refine", a.refine)
        .with("theta_star", theta_star)
        .with("d_max", report.d_max);
    let mut out = Outcome::default();
    let curve_path = a.out.join("opscan.csv");
    write_curve(&report.curve, &manifest, &curve_path)?;
    out.files.push(curve_path);

    let json_path = a.out.join("opscan.json");
    write_json(
        &OpscanReport {
            model_tag: cloud_manifest.model_tag,
            cloud_hash: cloud_manifest.content_hash,
            points: points.len(),
            theta_star,
            d_max: report.d_max,
            grid_step,
            segment: report.segment,
            curve: report.curve.clone(),
        },
        &json_path,
    )?;
    out.files.push(json_path);

    let hull_path = a.out.join("hull_theta_star.json");
    write_hull(&convex_hull(&project(&base, theta_star))?, &hull_path)?;
    out.files.push(hull_path);
    Ok(out)
}

#[derive(Debug, Serialize)]
struct ExponentReport {
    model_tag: String,
    control: &'static str,
    critical_value: f64,
    window: crate::Window,
    points: usize,
    exponent: f64,
}

/// Control parameter at interior rows, from the slope of the curve: the
/// support plane at field `h` satisfies `d⟨XX⟩ = -h d⟨Z⟩`, and thermal
/// points satisfy `dE = T dS`.
fn exponent(a: &ExponentArgs) -> Result<Outcome, CliError> {
    let (rows, manifest) = read_cloud(&a.surface)?;
    let tag: ModelTag = manifest.model_tag.parse()?;
    let j = manifest.get("J").and_then(|v| v.as_f64()).unwrap_or(1.0);
    let (control, critical) = match tag {
        t if t.is_spin() => ("h", 1.0),
        ModelTag::Classical2d => ("T/T_c", onsager_critical_temperature(j)),
        _ => ("T/T_c", bose_tc(1.0)?),
    };
    let mut data = Vec::new();
    for w in rows.windows(3) {
        let (p0, p, p1) = (w[0].point, w[1].point, w[2].point);
        let (da, db) = (p1.a - p0.a, p1.b - p0.b);
        if db == 0.0 {
            continue;
        }
        let (param, x) = match tag {
            t if t.is_spin() => {
                let h = -da / db;
                (h, 1.0 - h)
            }
            ModelTag::Classical2d => {
                let t = -2.0 * j * da / db;
                (t / critical, critical - t)
            }
            _ => {
                let t = da / db;
                (t / critical, critical - t)
            }
        };
        if a.window.contains(param) {
            data.push((x, p.c.abs()));
        }
    }
    let beta = critical_exponent_fit(&data)?;
    let report = ExponentReport {
        model_tag: manifest.model_tag,
        control,
        critical_value: critical,
        window: a.window,
        points: data.len(),
        exponent: beta,
    };
    let path = a.out.join("exponent.json");
    write_json(&report, &path)?;
    Ok(Outcome { files: vec![path], failures: Vec::new() })
}
