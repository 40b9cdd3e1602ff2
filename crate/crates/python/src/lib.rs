//! Python bindings for `sfqrm`.
//!
//! Bit blocks cross the boundary as ASCII strings such as `"00110011"`.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

use sfqrm::mc::{self, CensusReport};
use sfqrm::{Arm, BitBlock, BitRole, DecodeMode, ExperimentSpec, FaultPlan, SimConfig, SpreadModel};

fn to_py(e: sfqrm::Error) -> PyErr {
    match e {
        sfqrm::Error::Io(io) => PyOSError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn bits(s: &str, role: BitRole) -> PyResult<BitBlock> {
    BitBlock::parse(s, role).map_err(to_py)
}

fn arm(name: &str) -> PyResult<Arm> {
    name.parse().map_err(to_py)
}

/// A Reed-Muller code RM(r, m).
#[pyclass(name = "RmCode", frozen, module = "pysfqrm")]
struct PyRmCode(sfqrm::RmCode);

#[pymethods]
impl PyRmCode {
    #[new]
    #[pyo3(signature = (r = 1, m = 3))]
    fn new(r: usize, m: usize) -> PyResult<Self> {
        sfqrm::RmCode::new(r, m).map(PyRmCode).map_err(to_py)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.0.k()
    }

    #[getter]
    fn d_min(&self) -> usize {
        self.0.d_min()
    }

    #[getter]
    fn correction_radius(&self) -> usize {
        self.0.correction_radius()
    }

    fn generator_rows(&self) -> Vec<String> {
        self.0.generator_rows()
    }

    fn encode(&self, message: &str) -> PyResult<String> {
        let m = bits(message, BitRole::Message)?;
        Ok(self.0.encode(&m).map_err(to_py)?.to_string())
    }

    /// Returns `(message or None, status, corrected_positions)`.
    #[pyo3(signature = (received, mode = "correct"))]
    fn decode(&self, received: &str, mode: &str) -> PyResult<(Option<String>, String, Vec<usize>)> {
        let mode: DecodeMode = mode.parse().map_err(to_py)?;
        let out = self
            .0
            .decode(&bits(received, BitRole::Codeword)?, mode)
            .map_err(to_py)?;
        Ok((
            out.decoded.map(|m| m.to_string()),
            out.status.to_string(),
            out.corrected_positions,
        ))
    }

    fn is_codeword(&self, block: &str) -> PyResult<bool> {
        self.0.is_codeword(&bits(block, BitRole::Codeword)?).map_err(to_py)
    }

    fn brute_force_min_distance(&self) -> PyResult<usize> {
        self.0.brute_force_min_distance().map_err(to_py)
    }

    /// Maps error weight to `(corrected_ok, miscorrected, detected)`.
    fn error_pattern_census(&self, max_weight: usize) -> PyResult<BTreeMap<usize, (u64, u64, u64)>> {
        let table = sfqrm::error_pattern_census(&self.0, max_weight).map_err(to_py)?;
        Ok(table
            .into_iter()
            .map(|(w, c)| (w, (c.corrected_ok, c.miscorrected, c.detected)))
            .collect())
    }

    fn __repr__(&self) -> String {
        format!("RmCode(r={}, m={})", self.0.r(), self.0.m())
    }
}

/// The literal XOR equations of the RM(1,3) encoder.
#[pyfunction]
fn encode_xor_oracle(message: &str) -> PyResult<String> {
    Ok(sfqrm::encode_xor_oracle(&bits(message, BitRole::Message)?)
        .map_err(to_py)?
        .to_string())
}

/// A validated gate-level netlist.
#[pyclass(name = "Netlist", frozen, module = "pysfqrm")]
struct PyNetlist(sfqrm::Netlist);

#[pymethods]
impl PyNetlist {
    #[staticmethod]
    fn reference() -> Self {
        PyNetlist(sfqrm::build_rm13_reference())
    }

    #[staticmethod]
    fn no_encoder() -> Self {
        PyNetlist(sfqrm::build_no_encoder())
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        sfqrm::Netlist::parse(text).map(PyNetlist).map_err(to_py)
    }

    fn serialize(&self) -> String {
        self.0.serialize()
    }

    fn census(&self) -> BTreeMap<String, usize> {
        self.0.census().into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    fn faultable_cells(&self) -> Vec<String> {
        self.0.faultable_cells().into_iter().map(String::from).collect()
    }

    fn pipeline_depth(&self) -> PyResult<usize> {
        self.0.pipeline_depth().map_err(to_py)
    }

    #[getter]
    fn inputs(&self) -> Vec<String> {
        self.0.inputs().to_vec()
    }

    #[getter]
    fn outputs(&self) -> Vec<String> {
        self.0.outputs().to_vec()
    }

    fn __len__(&self) -> usize {
        self.0.cell_count()
    }

    /// Streams `messages` through the netlist with the given cells open.
    #[allow(clippy::too_many_arguments)]
    #[pyo3(signature = (messages, open_cells = Vec::new(), cycles_per_message = 1, samples_per_cycle = 8, noise_sigma = 0.0, seed = 0))]
    fn simulate(
        &self,
        py: Python<'_>,
        messages: Vec<String>,
        open_cells: Vec<String>,
        cycles_per_message: usize,
        samples_per_cycle: usize,
        noise_sigma: f64,
        seed: u64,
    ) -> PyResult<Vec<String>> {
        let msgs = messages
            .iter()
            .map(|m| bits(m, BitRole::Message))
            .collect::<PyResult<Vec<_>>>()?;
        let plan = FaultPlan {
            seed,
            ..FaultPlan::open(open_cells)
        };
        let cfg = SimConfig {
            cycles_per_message,
            samples_per_cycle,
            noise_sigma,
            ..SimConfig::default()
        };
        let out = py
            .detach(|| sfqrm::simulate(&self.0, &plan, &msgs, &cfg))
            .map_err(to_py)?;
        Ok(out.received().iter().map(ToString::to_string).collect())
    }

    /// Every open-cell set of size 1..=max_size as
    /// `(fault_set, worst_bit_errors, class)` rows.
    fn fault_tolerance_census(&self, py: Python<'_>, max_size: usize) -> PyResult<Vec<(Vec<String>, usize, String)>> {
        let report: CensusReport = py
            .detach(|| mc::fault_tolerance_census(&self.0, max_size))
            .map_err(to_py)?;
        Ok(report
            .rows
            .into_iter()
            .map(|r| (r.fault_set, r.worst_bit_errors, r.class.name().to_string()))
            .collect())
    }

    fn __repr__(&self) -> String {
        format!("Netlist(cells={})", self.0.cell_count())
    }
}

/// Outcome of one Monte-Carlo arm.
#[pyclass(name = "ExperimentResult", frozen, module = "pysfqrm")]
struct PyExperimentResult(sfqrm::ExperimentResult);

#[pymethods]
impl PyExperimentResult {
    #[getter]
    fn arm(&self) -> &'static str {
        self.0.spec.arm.name()
    }

    #[getter]
    fn n_err(&self) -> Vec<u32> {
        self.0.n_err.clone()
    }

    /// `(n_err, cum_prob)` steps of the empirical CDF.
    #[getter]
    fn cdf(&self) -> Vec<(u32, f64)> {
        self.0.cdf.points.iter().map(|p| (p.n_err, p.cum_prob)).collect()
    }

    fn p_zero(&self) -> f64 {
        self.0.cdf.p_zero()
    }

    fn prob_at_most(&self, n_err: u32) -> f64 {
        self.0.cdf.prob_at_most(n_err)
    }

    fn to_csv(&self) -> String {
        self.0.cdf.to_csv()
    }

    fn to_json(&self) -> String {
        self.0.cdf.to_json()
    }

    fn __repr__(&self) -> String {
        format!("ExperimentResult(arm={}, p_zero={:.4})", self.arm(), self.p_zero())
    }
}

fn make_spec(
    arm: Arm,
    realizations: usize,
    messages: usize,
    fault_prob: f64,
    ppv: Option<f64>,
    seed: u64,
    workers: usize,
) -> PyResult<ExperimentSpec> {
    let spread = ppv
        .map(|pct| SpreadModel::reference().at_spread(pct / 100.0))
        .transpose()
        .map_err(to_py)?;
    Ok(ExperimentSpec {
        arm,
        realizations,
        messages_per_realization: messages,
        fault_prob,
        spread,
        seed,
        workers,
        ..ExperimentSpec::default()
    })
}

/// Runs one arm. `ppv` is the parameter spread in percent.
#[pyfunction]
#[pyo3(signature = (arm = "rm13_after_ecc", realizations = 1000, messages = 100, fault_prob = 0.0, ppv = None, seed = 0, workers = 0))]
#[allow(clippy::too_many_arguments)]
fn run_experiment(
    py: Python<'_>,
    arm: &str,
    realizations: usize,
    messages: usize,
    fault_prob: f64,
    ppv: Option<f64>,
    seed: u64,
    workers: usize,
) -> PyResult<PyExperimentResult> {
    let spec = make_spec(self::arm(arm)?, realizations, messages, fault_prob, ppv, seed, workers)?;
    py.detach(|| sfqrm::run_experiment(&spec))
        .map(PyExperimentResult)
        .map_err(to_py)
}

/// Runs several arms on shared random numbers. Returns
/// `(results by arm, dominance violations or None)`.
#[pyfunction]
#[pyo3(signature = (arms = vec!["rm13_after_ecc".to_string(), "rm13_before_ecc".to_string(), "no_encoder".to_string()], realizations = 1000, messages = 100, fault_prob = 0.0, ppv = None, seed = 0, workers = 0))]
#[allow(clippy::too_many_arguments)]
fn compare_arms(
    py: Python<'_>,
    arms: Vec<String>,
    realizations: usize,
    messages: usize,
    fault_prob: f64,
    ppv: Option<f64>,
    seed: u64,
    workers: usize,
) -> PyResult<(BTreeMap<String, PyExperimentResult>, Option<usize>)> {
    let specs = arms
        .iter()
        .map(|a| make_spec(arm(a)?, realizations, messages, fault_prob, ppv, seed, workers))
        .collect::<PyResult<Vec<_>>>()?;
    let cmp = py.detach(|| sfqrm::compare_arms(&specs)).map_err(to_py)?;
    let results = cmp
        .results
        .into_iter()
        .map(|r| (r.spec.arm.name().to_string(), PyExperimentResult(r)))
        .collect();
    Ok((results, cmp.dominance_violations))
}

#[pymodule]
fn pysfqrm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRmCode>()?;
    m.add_class::<PyNetlist>()?;
    m.add_class::<PyExperimentResult>()?;
    m.add_function(wrap_pyfunction!(encode_xor_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(compare_arms, m)?)?;
    Ok(())
}
