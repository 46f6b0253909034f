//! Python bindings for `rdmgeom`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use rdmgeom::bose::{self, BoseState};
use rdmgeom::classical::{self, ClassicalParams, CylinderSpec, GibbsPoint};
use rdmgeom::geometry::{self, Backend, ConvexHull3};
use rdmgeom::mps;
use rdmgeom::spin::{self, Boundary, Branch, ChainSpec, GroundStateResult};
use rdmgeom::{Direction3, ExpectationPoint, SeededRng, SpinParams};

type Point = (f64, f64, f64);

fn err(e: rdmgeom::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn tuple(p: ExpectationPoint) -> Point {
    (p.a, p.b, p.c)
}

fn branch(name: &str) -> PyResult<Branch> {
    match name {
        "plus" | "+" => Ok(Branch::Plus),
        "minus" | "-" => Ok(Branch::Minus),
        "symmetric" => Ok(Branch::Symmetric),
        _ => Err(PyValueError::new_err(format!("unknown branch `{name}`"))),
    }
}

fn chain(sites: usize, boundary: &str) -> PyResult<ChainSpec> {
    let boundary = match boundary {
        "periodic" => Boundary::Periodic,
        "open" => Boundary::Open,
        _ => return Err(PyValueError::new_err(format!("unknown boundary `{boundary}`"))),
    };
    ChainSpec::new(sites, boundary).map_err(err)
}

/// Ground state energy per site and its `(⟨XX⟩, ⟨Z⟩, ⟨X⟩)` point.
#[pyclass(frozen, get_all, module = "rdmgeom")]
pub struct GroundState {
    energy_per_site: f64,
    point: Point,
    gap: Option<f64>,
    degeneracy: usize,
}

impl From<GroundStateResult> for GroundState {
    fn from(g: GroundStateResult) -> Self {
        Self { energy_per_site: g.energy_per_site, point: tuple(g.point), gap: g.gap, degeneracy: g.degeneracy }
    }
}

#[pymethods]
impl GroundState {
    fn __repr__(&self) -> String {
        format!("GroundState(energy_per_site={}, point={:?}, degeneracy={})", self.energy_per_site, self.point, self.degeneracy)
    }
}

#[pyclass(frozen, get_all, module = "rdmgeom")]
pub struct Gibbs {
    zz: f64,
    s: f64,
    z: f64,
    f: f64,
    e: f64,
}

impl From<GibbsPoint> for Gibbs {
    fn from(g: GibbsPoint) -> Self {
        Self { zz: g.zz, s: g.s, z: g.z, f: g.f, e: g.e }
    }
}

#[pymethods]
impl Gibbs {
    fn point(&self) -> Point {
        (self.zz, self.s, self.z)
    }

    fn __repr__(&self) -> String {
        format!("Gibbs(zz={}, s={}, z={}, f={}, e={})", self.zz, self.s, self.z, self.f, self.e)
    }
}

#[pyclass(frozen, get_all, module = "rdmgeom")]
pub struct Bose {
    t: f64,
    v: f64,
    mu: f64,
    psi: f64,
    sign: f64,
    s: f64,
    ekin: f64,
}

impl From<BoseState> for Bose {
    fn from(b: BoseState) -> Self {
        Self { t: b.t, v: b.v, mu: b.mu, psi: b.psi, sign: b.sign, s: b.s, ekin: b.ekin }
    }
}

#[pymethods]
impl Bose {
    /// `(E_kin, S, ⟨ψ⟩)`.
    fn point(&self) -> Point {
        (self.ekin, self.s, self.sign * self.psi)
    }

    fn __repr__(&self) -> String {
        format!("Bose(t={}, v={}, mu={}, psi={})", self.t, self.v, self.mu, self.sign * self.psi)
    }
}

/// Convex hull of a 3D point cloud.
#[pyclass(frozen, module = "rdmgeom")]
pub struct Hull {
    inner: ConvexHull3,
}

#[pymethods]
impl Hull {
    #[new]
    fn new(points: Vec<Point>) -> PyResult<Self> {
        let pts: Vec<ExpectationPoint> = points.into_iter().map(|(a, b, c)| ExpectationPoint::new(a, b, c)).collect();
        geometry::convex_hull(&pts).map(|inner| Self { inner }).map_err(err)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind.as_str()
    }

    #[getter]
    fn vertices(&self) -> Vec<Point> {
        self.inner.vertices.iter().copied().map(tuple).collect()
    }

    #[getter]
    fn facets(&self) -> Vec<[usize; 3]> {
        self.inner.facets.clone()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges.clone()
    }

    /// Input positions of the hull vertices.
    #[getter]
    fn source_index(&self) -> Vec<usize> {
        self.inner.source_index.clone()
    }

    fn outside_distance(&self, point: Point) -> f64 {
        self.inner.outside_distance(&ExpectationPoint::new(point.0, point.1, point.2))
    }

    /// Longest edge length and its endpoints.
    fn d_max(&self) -> PyResult<(f64, Option<(Point, Point)>)> {
        let r = geometry::d_max(&self.inner).map_err(err)?;
        Ok((r.d_max, r.segment.map(|[p, q]| (tuple(p), tuple(q)))))
    }

    fn to_json(&self) -> String {
        rdmgeom::io::render_hull(&self.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.vertices.len()
    }

    fn __repr__(&self) -> String {
        format!("Hull(kind={}, vertices={}, facets={})", self.kind(), self.inner.vertices.len(), self.inner.facets.len())
    }
}

#[pyfunction]
#[pyo3(signature = (j, bz, bx = 0.0))]
fn two_spin_ground(j: f64, bz: f64, bx: f64) -> PyResult<GroundState> {
    spin::two_spin_ground(SpinParams::new(j, bz, bx)).map(Into::into).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (sites, j, bz, bx = 0.0, boundary = "periodic"))]
fn chain_ground(py: Python<'_>, sites: usize, j: f64, bz: f64, bx: f64, boundary: &str) -> PyResult<GroundState> {
    let spec = chain(sites, boundary)?;
    py.detach(|| spin::chain_ground(spec, SpinParams::new(j, bz, bx))).map(Into::into).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (j, bz, bx = 0.0, restarts = 32, seed = 0))]
fn mean_field_extreme(j: f64, bz: f64, bx: f64, restarts: usize, seed: u64) -> PyResult<GroundState> {
    spin::mean_field_extreme(SpinParams::new(j, bz, bx), restarts, SeededRng::new(seed))
        .map(|r| r.ground.into())
        .map_err(err)
}

/// Thermodynamic-limit transverse-field Ising point at field `h`.
#[pyfunction]
#[pyo3(signature = (h, branch = "plus"))]
fn pfeuty_point(h: f64, branch: &str) -> PyResult<Point> {
    spin::pfeuty_point(h, self::branch(branch)?).map(tuple).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (sites, boundary = "open"))]
fn fibonacci_degeneracy(sites: usize, boundary: &str) -> PyResult<u64> {
    spin::fibonacci_degeneracy(chain(sites, boundary)?).map_err(err)
}

/// `β` from a log-log fit of `(distance to criticality, order parameter)`.
#[pyfunction]
fn critical_exponent_fit(points: Vec<(f64, f64)>) -> PyResult<f64> {
    spin::critical_exponent_fit(&points).map_err(err)
}

/// `(⟨XX⟩, ⟨Z⟩, ⟨X⟩, ⟨Y⟩)` of `count` random uniform MPS.
#[pyfunction]
#[pyo3(signature = (count, d_min = 2, d_max = 10, seed = 0))]
fn spin_scatter(py: Python<'_>, count: usize, d_min: usize, d_max: usize, seed: u64) -> PyResult<Vec<(f64, f64, f64, f64)>> {
    let samples = py.detach(|| mps::spin_scatter(count, d_min, d_max, SeededRng::new(seed))).map_err(err)?;
    Ok(samples.into_iter().map(|s| (s.xx, s.z, s.x, s.y)).collect())
}

#[pyfunction]
#[pyo3(signature = (width, j, h, t))]
fn gibbs_observables(width: usize, j: f64, h: f64, t: f64) -> PyResult<Gibbs> {
    let spec = CylinderSpec::new(width).map_err(err)?;
    classical::gibbs_observables(spec, ClassicalParams::new(j, h, t)).map(Into::into).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (t, j = 1.0))]
fn onsager_free_energy(t: f64, j: f64) -> PyResult<f64> {
    classical::onsager_free_energy(t, j).map_err(err)
}

#[pyfunction]
fn onsager_magnetization(t: f64) -> PyResult<f64> {
    classical::onsager_magnetization(t).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (j = 1.0))]
fn onsager_critical_temperature(j: f64) -> f64 {
    classical::onsager_critical_temperature(j)
}

#[pyfunction]
fn bose_state(v: f64, t: f64) -> PyResult<Bose> {
    bose::bose_state(v, t).map(Into::into).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (rho = 1.0))]
fn bose_tc(rho: f64) -> PyResult<f64> {
    bose::bose_tc(rho).map_err(err)
}

/// Support point of a model's expectation set along `direction`.
#[pyfunction]
#[pyo3(signature = (direction, model, sites = 12, width = 8, restarts = 16, seed = 0))]
fn support_point(
    py: Python<'_>,
    direction: Point,
    model: &str,
    sites: usize,
    width: usize,
    restarts: usize,
    seed: u64,
) -> PyResult<Point> {
    let n = Direction3::new(direction.0, direction.1, direction.2).map_err(err)?;
    let backend = match model {
        "spin0d" => Backend::Spin0d,
        "spin1d" => Backend::Spin1d { chain: chain(sites, "periodic")? },
        "spinMF" => Backend::SpinMf { restarts, rng: SeededRng::new(seed) },
        "classical2d" => Backend::Classical2d { cylinder: CylinderSpec::new(width).map_err(err)? },
        "bose3d" => Backend::Bose3d,
        _ => return Err(err(rdmgeom::Error::UnknownModel(model.to_string()))),
    };
    py.detach(|| geometry::support_point(&n, &backend)).map(tuple).map_err(err)
}

/// Quasi-uniform unit vectors on the sphere.
#[pyfunction]
fn sphere_grid(count: usize) -> Vec<Point> {
    Direction3::sphere_grid(count)
        .iter()
        .map(|d| {
            let [x, y, z] = d.components();
            (x, y, z)
        })
        .collect()
}

/// `d_max(Θ)` over `thetas` for `(a, b, c, y)` rows; returns
/// `(theta_star, d_max at theta_star, [(Θ, d_max)])`.
#[pyfunction]
#[pyo3(signature = (base, thetas, refine = 0))]
fn theta_scan(py: Python<'_>, base: Vec<[f64; 4]>, thetas: Vec<f64>, refine: usize) -> PyResult<(Option<f64>, f64, Vec<(f64, f64)>)> {
    let r = py.detach(|| geometry::theta_scan_refined(&base, &thetas, refine)).map_err(err)?;
    Ok((r.theta_star, r.d_max, r.curve))
}

#[pymodule(name = "rdmgeom")]
fn rdmgeom_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("HULL_EPS", geometry::HULL_EPS)?;
    m.add_class::<GroundState>()?;
    m.add_class::<Gibbs>()?;
    m.add_class::<Bose>()?;
    m.add_class::<Hull>()?;
    m.add_function(wrap_pyfunction!(two_spin_ground, m)?)?;
    m.add_function(wrap_pyfunction!(chain_ground, m)?)?;
    m.add_function(wrap_pyfunction!(mean_field_extreme, m)?)?;
    m.add_function(wrap_pyfunction!(pfeuty_point, m)?)?;
    m.add_function(wrap_pyfunction!(fibonacci_degeneracy, m)?)?;
    m.add_function(wrap_pyfunction!(critical_exponent_fit, m)?)?;
    m.add_function(wrap_pyfunction!(spin_scatter, m)?)?;
    m.add_function(wrap_pyfunction!(gibbs_observables, m)?)?;
    m.add_function(wrap_pyfunction!(onsager_free_energy, m)?)?;
    m.add_function(wrap_pyfunction!(onsager_magnetization, m)?)?;
    m.add_function(wrap_pyfunction!(onsager_critical_temperature, m)?)?;
    m.add_function(wrap_pyfunction!(bose_state, m)?)?;
    m.add_function(wrap_pyfunction!(bose_tc, m)?)?;
    m.add_function(wrap_pyfunction!(support_point, m)?)?;
    m.add_function(wrap_pyfunction!(sphere_grid, m)?)?;
    m.add_function(wrap_pyfunction!(theta_scan, m)?)?;
    Ok(())
}
