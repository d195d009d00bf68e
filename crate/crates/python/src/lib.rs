//! Python module `uavcover`.

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

use uavcover::commands::{build_plan, cmd_evaluate, cmd_power, cmd_sweep, BeamSpec};
use uavcover::coverage::{self, DEFAULT_SAMPLES};
use uavcover::deployment::DeploymentDoc;
use uavcover::packing::{self, DEFAULT_MAX_ITERS, DEFAULT_RESTARTS};
use uavcover::placement::plan_coverage_summary;
use uavcover::{geometry, link_budget, scenario, BuildingDims, Error, Method};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(io) => PyOSError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for uavcover::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

fn parse_method(s: &str) -> PyResult<Method> {
    s.parse().py()
}

#[pyclass(name = "Building", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyBuilding {
    inner: BuildingDims,
}

#[pymethods]
impl PyBuilding {
    #[new]
    fn new(x_b: f64, y_b: f64, z_b: f64) -> PyResult<Self> {
        Ok(Self { inner: BuildingDims::new(x_b, y_b, z_b).py()? })
    }

    #[getter]
    fn x_b(&self) -> f64 {
        self.inner.x_b
    }

    #[getter]
    fn y_b(&self) -> f64 {
        self.inner.y_b
    }

    #[getter]
    fn z_b(&self) -> f64 {
        self.inner.z_b
    }

    fn volume(&self) -> f64 {
        self.inner.volume()
    }

    fn __repr__(&self) -> String {
        format!("Building(x_b={}, y_b={}, z_b={})", self.inner.x_b, self.inner.y_b, self.inner.z_b)
    }
}

/// One UAV of a deployment.
#[pyclass(name = "Uav", frozen, get_all)]
pub struct PyUav {
    position: (f64, f64, f64),
    axis: String,
    axis_foot: (f64, f64),
    r_near: f64,
    r_far: f64,
    clipped: bool,
    channel: u32,
}

#[pymethods]
impl PyUav {
    fn __repr__(&self) -> String {
        let (x, y, z) = self.position;
        format!("Uav(position=({x}, {y}, {z}), axis={:?}, r_far={}, channel={})", self.axis, self.r_far, self.channel)
    }
}

/// Deployment document, as written by `plan`.
#[pyclass(name = "Deployment", frozen)]
pub struct PyDeployment {
    doc: DeploymentDoc,
}

#[pymethods]
impl PyDeployment {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { doc: DeploymentDoc::parse(text).py()? })
    }

    fn to_json(&self) -> PyResult<String> {
        self.doc.to_json().py()
    }

    #[getter]
    fn method(&self) -> &'static str {
        self.doc.method.as_str()
    }

    #[getter]
    fn building(&self) -> PyResult<PyBuilding> {
        Ok(PyBuilding { inner: self.doc.building().py()? })
    }

    #[getter]
    fn theta_b_deg(&self) -> f64 {
        self.doc.parameters.theta_b_deg
    }

    #[getter]
    fn r_near(&self) -> f64 {
        self.doc.parameters.r_near_m
    }

    #[getter]
    fn r_far(&self) -> f64 {
        self.doc.parameters.r_far_m
    }

    #[getter]
    fn fraction(&self) -> f64 {
        self.doc.coverage.fraction
    }

    #[getter]
    fn diagnostic(&self) -> Option<String> {
        self.doc.diagnostic.clone()
    }

    #[getter]
    fn uavs(&self) -> Vec<PyUav> {
        self.doc
            .uavs
            .iter()
            .map(|u| PyUav {
                position: (u.position[0], u.position[1], u.position[2]),
                axis: u.axis.label().to_string(),
                axis_foot: (u.axis_foot[0], u.axis_foot[1]),
                r_near: u.r_near,
                r_far: u.r_far,
                clipped: u.clipped,
                channel: u.channel,
            })
            .collect()
    }

    fn __len__(&self) -> usize {
        self.doc.uavs.len()
    }

    /// Monte-Carlo estimate as a dict.
    #[pyo3(signature = (n_samples = DEFAULT_SAMPLES, seed = 0))]
    fn mc_coverage<'py>(&self, py: Python<'py>, n_samples: usize, seed: u64) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
        let (plan, building) = self.doc.to_plan().py()?;
        let rep = py.detach(|| coverage::mc_coverage(&plan, &building, n_samples, seed)).py()?;
        let d = pyo3::types::PyDict::new(py);
        d.set_item("analytic_fraction", rep.analytic_fraction)?;
        d.set_item("mc_fraction", rep.mc_fraction)?;
        d.set_item("mc_halfwidth_95", rep.mc_halfwidth_95)?;
        d.set_item("n_samples", rep.n_samples)?;
        d.set_item("seed", rep.seed)?;
        d.set_item("overlap_violations", rep.overlap_violations)?;
        Ok(d)
    }

    /// Uncovered voxels of the building, total and per connected hole.
    #[pyo3(signature = (voxel_size = coverage::DEFAULT_VOXEL_SIZE))]
    fn holes(&self, py: Python<'_>, voxel_size: f64) -> PyResult<(usize, Vec<usize>)> {
        let (plan, building) = self.doc.to_plan().py()?;
        let set = py.detach(|| coverage::find_holes(&plan, &building, voxel_size)).py()?;
        Ok((set.uncovered_voxels, set.components.iter().map(|c| c.voxel_count).collect()))
    }

    /// Extra UAVs needed to leave no hole.
    #[pyo3(signature = (voxel_size = coverage::DEFAULT_VOXEL_SIZE))]
    fn full_coverage_extra_uavs(&self, py: Python<'_>, voxel_size: f64) -> PyResult<usize> {
        let (plan, building) = self.doc.to_plan().py()?;
        let aug = py.detach(|| coverage::augment_full_coverage(&plan, &building, voxel_size)).py()?;
        Ok(aug.extra_uavs)
    }

    fn facade_coverage_index(&self) -> PyResult<f64> {
        let (plan, building) = self.doc.to_plan().py()?;
        coverage::facade_coverage_index(&plan, &building).py()
    }

    fn __repr__(&self) -> String {
        format!("Deployment(method={}, uavs={}, fraction={})", self.doc.method, self.doc.uavs.len(), self.doc.coverage.fraction)
    }
}

/// Parsed scenario file.
#[pyclass(name = "Scenario", frozen)]
pub struct PyScenario {
    inner: scenario::Scenario,
}

#[pymethods]
impl PyScenario {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self { inner: scenario::Scenario::parse(text).py()? })
    }

    #[staticmethod]
    fn from_path(path: std::path::PathBuf) -> PyResult<Self> {
        Ok(Self { inner: scenario::Scenario::from_path(&path).py()? })
    }

    #[getter]
    fn building(&self) -> PyBuilding {
        PyBuilding { inner: self.inner.building }
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[getter]
    fn methods(&self) -> Vec<&'static str> {
        self.inner.methods.iter().map(|m| m.as_str()).collect()
    }

    /// Give exactly one of `theta_b` (degrees) or `r_far` (metres).
    #[pyo3(signature = (method, theta_b = None, r_far = None))]
    fn plan(&self, py: Python<'_>, method: &str, theta_b: Option<f64>, r_far: Option<f64>) -> PyResult<PyDeployment> {
        let beam = match (theta_b, r_far) {
            (Some(t), None) => BeamSpec::ThetaB(t),
            (None, Some(r)) => BeamSpec::RFar(r),
            _ => return Err(PyValueError::new_err("give exactly one of theta_b or r_far")),
        };
        let method = parse_method(method)?;
        let s = &self.inner;
        let plan = py.detach(|| build_plan(s, method, beam)).py()?;
        Ok(PyDeployment { doc: DeploymentDoc::from_plan(&plan, &s.building, s.seed) })
    }

    fn sweep_csv(&self, py: Python<'_>) -> PyResult<String> {
        let s = &self.inner;
        py.detach(|| cmd_sweep(s)).py()
    }

    #[pyo3(signature = (deployment, full_coverage = false))]
    fn power_csv(&self, py: Python<'_>, deployment: &PyDeployment, full_coverage: bool) -> PyResult<String> {
        let s = &self.inner;
        let doc = &deployment.doc;
        py.detach(|| cmd_power(s, doc, full_coverage)).py()
    }

    fn evaluate_json(&self, py: Python<'_>, deployment: &PyDeployment) -> PyResult<String> {
        let s = &self.inner;
        let doc = &deployment.doc;
        py.detach(|| cmd_evaluate(s, doc)).py()
    }
}

#[pyfunction]
fn gamma_ratio() -> f64 {
    geometry::gamma_ratio()
}

#[pyfunction]
fn auda_offset(x_b: f64) -> PyResult<f64> {
    geometry::auda_offset(x_b).py()
}

/// (r_near, r_far) of a cone from its standoff, span and beamwidth.
#[pyfunction]
fn cone_radii(standoff: f64, span: f64, theta_b_deg: f64) -> PyResult<(f64, f64)> {
    geometry::cone_radii(standoff, span, theta_b_deg).py()
}

#[pyfunction]
fn beamwidth_for_far_radius(r_far: f64, standoff: f64, span: f64) -> PyResult<f64> {
    geometry::beamwidth_for_far_radius(r_far, standoff, span).py()
}

#[pyfunction]
fn truncated_cone_volume(span: f64, r_near: f64, r_far: f64) -> PyResult<f64> {
    geometry::truncated_cone_volume(span, r_near, r_far).py()
}

#[pyfunction]
fn tx_antenna_gain_db(theta_b_deg: f64) -> PyResult<f64> {
    link_budget::tx_antenna_gain_db(theta_b_deg).py()
}

#[pyfunction]
fn volume_to_facade_ratio() -> f64 {
    coverage::volume_to_facade_ratio()
}

#[pyfunction]
fn auda_fraction(building: &PyBuilding, r_far: f64) -> PyResult<f64> {
    let plan = uavcover::placement::plan_auda(&building.inner, r_far).py()?;
    Ok(plan_coverage_summary(&plan, &building.inner).fraction)
}

/// (count, centers) of the largest packing of radius-`r` circles found in a
/// `d1` by `d2` rectangle.
#[pyfunction]
#[pyo3(signature = (r, d1, d2, seed = 0, restarts = DEFAULT_RESTARTS, max_iters = DEFAULT_MAX_ITERS))]
fn max_circles(
    py: Python<'_>,
    r: f64,
    d1: f64,
    d2: f64,
    seed: u64,
    restarts: usize,
    max_iters: usize,
) -> (usize, Vec<(f64, f64)>) {
    let (n, sol) = py.detach(|| packing::max_circles(r, d1, d2, seed, restarts, max_iters));
    (n, sol.centers.iter().map(|c| (c[0], c[1])).collect())
}

#[pymodule]
#[pyo3(name = "uavcover")]
pub fn uavcover_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBuilding>()?;
    m.add_class::<PyUav>()?;
    m.add_class::<PyDeployment>()?;
    m.add_class::<PyScenario>()?;
    m.add_function(wrap_pyfunction!(gamma_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(auda_offset, m)?)?;
    m.add_function(wrap_pyfunction!(cone_radii, m)?)?;
    m.add_function(wrap_pyfunction!(beamwidth_for_far_radius, m)?)?;
    m.add_function(wrap_pyfunction!(truncated_cone_volume, m)?)?;
    m.add_function(wrap_pyfunction!(tx_antenna_gain_db, m)?)?;
    m.add_function(wrap_pyfunction!(volume_to_facade_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(auda_fraction, m)?)?;
    m.add_function(wrap_pyfunction!(max_circles, m)?)?;
    Ok(())
}
