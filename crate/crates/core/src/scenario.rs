//! Scenario files, run orchestration, CSV output and comparison reports.
//!
//! A scenario is a TOML document:
//!
//! ```toml
//! name = "two-qubit"
//! observables = ["populations", "z", "concurrence", "energy", "norm"]
//!
//! [hamiltonian]
//! pauli = "1*ZI + 1*XI + 1*YI + 1*YY + 1*XY"   # or: real = [[...]], imag = [[...]]
//!
//! [initial_state]
//! real = [0.6324555320336759, 0.6324555320336759, 0.0, 0.4472135954999579]
//! imag = [0.0, 0.0, 0.0, 0.0]
//!
//! [grid]
//! t_end = 10.0
//! dt = 1e-3
//! output_stride = 10
//!
//! [flow]
//! switch_threshold = 0.6
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::chart::{from_chart, select_pivot, to_chart, ChartPoint};
use crate::classical_flow::{hamilton_rhs, integrate_classical_with, ClassicalTrajectory, FlowSettings};
use crate::observables::{Observable, ObservableSample};
use crate::pauli::{hamiltonian_from_terms, parse_hamiltonian, PauliTerm, DEFAULT_QUBIT_CAP};
use crate::quantum::{evolve_rk4, sample_exact, QuantumTrajectory, StateVector, TimeGrid};
use crate::{Error, HermitianOperator, Result, C64};

/// Tolerance on the initial state norm and on dense Hermiticity in scenario files.
pub const INPUT_TOL: f64 = 1e-9;
pub const DEFAULT_TOLERANCE: f64 = 1e-6;
pub const CSV_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Quantum,
    Classical,
    Both,
}

impl Method {
    fn quantum(self) -> bool {
        matches!(self, Method::Quantum | Method::Both)
    }

    fn classical(self) -> bool {
        matches!(self, Method::Classical | Method::Both)
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quantum" => Ok(Method::Quantum),
            "classical" => Ok(Method::Classical),
            "both" => Ok(Method::Both),
            other => Err(Error::Validation(format!("unknown method `{other}`"))),
        }
    }
}

/// Which reference solver produces the quantum trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuantumIntegrator {
    /// Spectral propagator, exact up to rounding.
    #[default]
    Exact,
    Rk4,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    #[serde(default)]
    description: Option<String>,
    hamiltonian: RawHamiltonian,
    initial_state: RawState,
    grid: TimeGrid,
    #[serde(default)]
    flow: FlowSettings,
    #[serde(default)]
    observables: Option<Vec<Observable>>,
    #[serde(default)]
    renormalize_before_observables: bool,
    #[serde(default)]
    quantum_integrator: QuantumIntegrator,
    #[serde(default)]
    tolerance: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHamiltonian {
    pauli: Option<String>,
    real: Option<Vec<Vec<f64>>>,
    imag: Option<Vec<Vec<f64>>>,
    max_qubits: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    real: Vec<f64>,
    imag: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum HamiltonianSource {
    Pauli(Vec<PauliTerm>),
    Dense,
}

/// A validated scenario.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub name: String,
    pub description: Option<String>,
    pub source: HamiltonianSource,
    pub hamiltonian: HermitianOperator,
    pub initial_state: StateVector,
    pub grid: TimeGrid,
    pub flow: FlowSettings,
    pub observables: BTreeSet<Observable>,
    pub renormalize_before_observables: bool,
    pub quantum_integrator: QuantumIntegrator,
    /// Gate used by [`compare`] unless overridden.
    pub tolerance: f64,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawScenario = toml::from_str(text)?;
        Self::from_raw(raw)
    }

    fn from_raw(raw: RawScenario) -> Result<Self> {
        let invalid = |msg: String| Error::Validation(msg);
        if raw.name.trim().is_empty() {
            return Err(invalid("name must not be empty".into()));
        }

        let cap = raw.hamiltonian.max_qubits.unwrap_or(DEFAULT_QUBIT_CAP);
        let (source, hamiltonian) = match (&raw.hamiltonian.pauli, &raw.hamiltonian.real) {
            (Some(text), None) => {
                if raw.hamiltonian.imag.is_some() {
                    return Err(invalid("hamiltonian.imag given without hamiltonian.real".into()));
                }
                let terms = parse_hamiltonian(text)?;
                let h = hamiltonian_from_terms(&terms, cap)?;
                (HamiltonianSource::Pauli(terms), h)
            }
            (None, Some(real)) => {
                let n = real.len();
                let zeros = vec![vec![0.0; n]; n];
                let imag = raw.hamiltonian.imag.as_ref().unwrap_or(&zeros);
                let h = HermitianOperator::from_parts(real, imag, INPUT_TOL).map_err(|e| match e {
                    Error::NotHermitian { deviation } => invalid(format!(
                        "dense Hamiltonian is not Hermitian (max |H - H^dagger| = {deviation:e}, tolerance {INPUT_TOL:e})"
                    )),
                    other => invalid(format!("dense Hamiltonian: {other}")),
                })?;
                (HamiltonianSource::Dense, h)
            }
            (Some(_), Some(_)) => {
                return Err(invalid("hamiltonian: give either `pauli` or `real`/`imag`, not both".into()))
            }
            (None, None) => return Err(invalid("hamiltonian: one of `pauli` or `real` is required".into())),
        };

        let n = raw.initial_state.real.len();
        let imag = raw.initial_state.imag.unwrap_or_else(|| vec![0.0; n]);
        if imag.len() != n {
            return Err(invalid(format!(
                "initial_state: real has {n} entries but imag has {}",
                imag.len()
            )));
        }
        if n != hamiltonian.dim() {
            return Err(invalid(format!(
                "initial_state has {n} amplitudes but the Hamiltonian acts on {} levels",
                hamiltonian.dim()
            )));
        }
        let amps = DVector::from_iterator(n, raw.initial_state.real.iter().zip(&imag).map(|(&r, &i)| C64::new(r, i)));
        let initial_state = match StateVector::with_tolerance(amps, INPUT_TOL) {
            Ok(s) => s.renormalized(),
            Err(Error::NotNormalized { norm }) => {
                return Err(invalid(format!(
                    "initial_state is not normalized (norm = {norm}, tolerance {INPUT_TOL:e})"
                )))
            }
            Err(e) => return Err(invalid(format!("initial_state: {e}"))),
        };

        raw.grid.validate().map_err(|e| invalid(e.to_string()))?;
        raw.flow.validate().map_err(|e| invalid(e.to_string()))?;

        let observables: BTreeSet<Observable> = match raw.observables {
            Some(list) => list.into_iter().collect(),
            None if n == 4 => Observable::ALL.into_iter().collect(),
            None => Observable::ALL.into_iter().filter(|o| !o.requires_two_qubits()).collect(),
        };
        if let Some(o) = observables.iter().find(|o| o.requires_two_qubits() && n != 4) {
            return Err(invalid(format!("observable `{o}` requires a two-qubit system (N = 4), got N = {n}")));
        }

        let tolerance = raw.tolerance.unwrap_or(DEFAULT_TOLERANCE);
        if !(tolerance.is_finite() && tolerance > 0.0) {
            return Err(invalid(format!("tolerance must be positive, got {tolerance}")));
        }

        Ok(Self {
            name: raw.name,
            description: raw.description,
            source,
            hamiltonian,
            initial_state,
            grid: raw.grid,
            flow: raw.flow,
            observables,
            renormalize_before_observables: raw.renormalize_before_observables,
            quantum_integrator: raw.quantum_integrator,
            tolerance,
        })
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    /// The chart the classical run starts in: pivot on the largest amplitude.
    pub fn initial_point(&self) -> Result<ChartPoint> {
        to_chart(&self.initial_state, select_pivot(&self.initial_state))
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)?;
    ScenarioConfig::from_toml_str(&text)
}

/// Observables of one recorded time step.
#[derive(Debug, Clone)]
pub struct Row {
    pub step: usize,
    pub time: f64,
    pub quantum: Option<ObservableSample>,
    pub classical: Option<ObservableSample>,
    pub pivot: Option<usize>,
    pub switches_so_far: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub method: Method,
    pub dim: usize,
    pub observables: BTreeSet<Observable>,
    pub quantum: Option<QuantumTrajectory>,
    pub classical: Option<ClassicalTrajectory>,
    pub rows: Vec<Row>,
}

pub fn run(config: &ScenarioConfig, method: Method) -> Result<RunOutput> {
    run_with_rhs(config, method, hamilton_rhs)
}

/// [`run`] with a substitute classical vector field.
pub fn run_with_rhs<F>(config: &ScenarioConfig, method: Method, rhs: F) -> Result<RunOutput>
where
    F: Fn(&HermitianOperator, &ChartPoint) -> Result<DVector<C64>>,
{
    let h = &config.hamiltonian;
    let quantum = if method.quantum() {
        Some(match config.quantum_integrator {
            QuantumIntegrator::Exact => sample_exact(h, &config.initial_state, &config.grid)?,
            QuantumIntegrator::Rk4 => evolve_rk4(h, &config.initial_state, &config.grid)?,
        })
    } else {
        None
    };
    let classical = if method.classical() {
        let p0 = config.initial_point()?;
        Some(integrate_classical_with(h, &p0, &config.grid, &config.flow, rhs)?)
    } else {
        None
    };

    let steps = config.grid.sampled_steps();
    let mut rows = Vec::with_capacity(steps.len());
    for (i, &step) in steps.iter().enumerate() {
        let time = config.grid.time(step);
        let q = match &quantum {
            Some(traj) => {
                let s = &traj.samples[i];
                debug_assert_eq!(s.step, step);
                let state = if config.renormalize_before_observables {
                    s.state.renormalized()
                } else {
                    s.state.clone()
                };
                let mut obs = ObservableSample::from_state(h, &state, time)?;
                obs.norm_drift = s.norm_drift;
                Some(obs)
            }
            None => None,
        };
        let (c, pivot, switches) = match &classical {
            Some(traj) => {
                let s = &traj.samples[i];
                debug_assert_eq!(s.step, step);
                let obs = ObservableSample::from_point(h, &s.state.point, time)?;
                (Some(obs), Some(s.state.point.pivot()), Some(s.switches_so_far))
            }
            None => (None, None, None),
        };
        rows.push(Row {
            step,
            time,
            quantum: q,
            classical: c,
            pivot,
            switches_so_far: switches,
        });
    }

    Ok(RunOutput {
        method,
        dim: config.dim(),
        observables: config.observables.clone(),
        quantum,
        classical,
        rows,
    })
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

impl RunOutput {
    /// CSV column names in output order.
    pub fn csv_columns(&self) -> Vec<String> {
        let q = self.method.quantum();
        let c = self.method.classical();
        let mut cols = vec!["t".to_string()];
        let pair = |cols: &mut Vec<String>, base: &str| {
            if q {
                cols.push(format!("{base}_q"));
            }
            if c {
                cols.push(format!("{base}_c"));
            }
        };
        if self.observables.contains(&Observable::Populations) {
            if q {
                cols.extend((0..self.dim).map(|i| format!("p{i}_q")));
            }
            if c {
                cols.extend((0..self.dim).map(|i| format!("p{i}_c")));
            }
        }
        if self.observables.contains(&Observable::Z) {
            pair(&mut cols, "z");
        }
        if self.observables.contains(&Observable::Concurrence) {
            pair(&mut cols, "C");
        }
        if self.observables.contains(&Observable::Energy) {
            pair(&mut cols, "E");
        }
        if self.observables.contains(&Observable::Norm) && q {
            cols.push("norm_drift_q".into());
        }
        if c {
            cols.push("pivot".into());
            cols.push("n_switches_cum".into());
        }
        cols
    }

    fn csv_row(&self, row: &Row) -> Vec<String> {
        let mut out = vec![fmt_f64(row.time)];
        let sides = [row.quantum.as_ref(), row.classical.as_ref()];
        let has = |o: Observable| self.observables.contains(&o);
        if has(Observable::Populations) {
            for s in sides.iter().flatten() {
                out.extend(s.populations.iter().map(|&p| fmt_f64(p)));
            }
        }
        if has(Observable::Z) {
            out.extend(sides.iter().flatten().map(|s| fmt_f64(s.z.expect("validated N = 4"))));
        }
        if has(Observable::Concurrence) {
            out.extend(
                sides
                    .iter()
                    .flatten()
                    .map(|s| fmt_f64(s.concurrence.expect("validated N = 4"))),
            );
        }
        if has(Observable::Energy) {
            out.extend(sides.iter().flatten().map(|s| fmt_f64(s.energy)));
        }
        if has(Observable::Norm) {
            if let Some(q) = &row.quantum {
                out.push(fmt_f64(q.norm_drift));
            }
        }
        if let (Some(p), Some(n)) = (row.pivot, row.switches_so_far) {
            out.push(p.to_string());
            out.push(n.to_string());
        }
        out
    }

    /// Writes `# schema=1`, the header row, then one row per recorded time.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# schema={CSV_SCHEMA}")?;
        writeln!(w, "{}", self.csv_columns().join(","))?;
        for row in &self.rows {
            writeln!(w, "{}", self.csv_row(row).join(","))?;
        }
        w.flush()
    }
}

pub fn emit_csv(output: &RunOutput, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path)?;
    output.write_csv(BufWriter::new(file))?;
    Ok(())
}

/// Quantum-versus-classical agreement over one scenario.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub scenario: String,
    pub tolerance: f64,
    pub samples: usize,
    /// Largest `|classical - quantum|` over time, per observable.
    pub max_deviation: BTreeMap<String, f64>,
    /// Largest `1 - |<psi_q|psi_c>|` over time.
    pub fidelity_gap_max: f64,
    pub energy_drift_quantum: f64,
    pub energy_drift_classical: f64,
    pub norm_drift_max: f64,
    pub chart_switches: usize,
    pub switch_times: Vec<f64>,
    /// Quantities that exceeded `tolerance`.
    pub breaches: Vec<String>,
    pub passed: bool,
}

impl ComparisonReport {
    pub fn summary(&self) -> String {
        let mut s = format!(
            "scenario {}: {} (tolerance {:e}, {} samples)\n",
            self.scenario,
            if self.passed { "PASS" } else { "FAIL" },
            self.tolerance,
            self.samples
        );
        for (k, v) in &self.max_deviation {
            s.push_str(&format!("  max |{k}_c - {k}_q| = {v:.3e}\n"));
        }
        s.push_str(&format!("  fidelity gap max   = {:.3e}\n", self.fidelity_gap_max));
        s.push_str(&format!("  energy drift q / c = {:.3e} / {:.3e}\n", self.energy_drift_quantum, self.energy_drift_classical));
        s.push_str(&format!("  norm drift max     = {:.3e}\n", self.norm_drift_max));
        s.push_str(&format!("  chart switches     = {}\n", self.chart_switches));
        if !self.breaches.is_empty() {
            s.push_str(&format!("  breaches: {}\n", self.breaches.join(", ")));
        }
        s
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = File::create(path)?;
        let mut w = BufWriter::new(file);
        serde_json::to_writer_pretty(&mut w, self).map_err(std::io::Error::from)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }
}

/// Runs both methods on the scenario's grid and measures their disagreement.
pub fn compare(config: &ScenarioConfig, tolerance: Option<f64>) -> Result<ComparisonReport> {
    compare_with_rhs(config, tolerance, hamilton_rhs)
}

pub fn compare_with_rhs<F>(config: &ScenarioConfig, tolerance: Option<f64>, rhs: F) -> Result<ComparisonReport>
where
    F: Fn(&HermitianOperator, &ChartPoint) -> Result<DVector<C64>>,
{
    let tolerance = tolerance.unwrap_or(config.tolerance);
    let out = run_with_rhs(config, Method::Both, rhs)?;
    let qt = out.quantum.as_ref().expect("both methods ran");
    let ct = out.classical.as_ref().expect("both methods ran");

    let mut dev: BTreeMap<String, f64> = BTreeMap::new();
    let mut bump = |k: &str, v: f64| {
        let e = dev.entry(k.to_string()).or_insert(0.0);
        // NaN must surface as a breach rather than vanish under max().
        if v.is_nan() || v > *e {
            *e = v;
        }
    };
    let mut fidelity_gap_max = 0.0f64;
    let (mut e0q, mut e0c) = (None, None);
    let (mut drift_q, mut drift_c) = (0.0f64, 0.0f64);

    for (i, row) in out.rows.iter().enumerate() {
        let q = row.quantum.as_ref().expect("quantum row");
        let c = row.classical.as_ref().expect("classical row");
        let pop = q
            .populations
            .iter()
            .zip(&c.populations)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        bump("populations", pop);
        if let (Some(a), Some(b)) = (q.z, c.z) {
            bump("z", (a - b).abs());
        }
        if let (Some(a), Some(b)) = (q.concurrence, c.concurrence) {
            bump("concurrence", (a - b).abs());
        }
        bump("energy", (q.energy - c.energy).abs());

        let psi_q = &qt.samples[i].state;
        let psi_c = from_chart(&ct.samples[i].state.point);
        let gap = psi_q.renormalized().fidelity_gap(&psi_c);
        if gap.is_nan() || gap > fidelity_gap_max {
            fidelity_gap_max = gap;
        }

        let e0q = *e0q.get_or_insert(q.energy);
        let e0c = *e0c.get_or_insert(c.energy);
        drift_q = drift_q.max((q.energy - e0q).abs());
        drift_c = drift_c.max((c.energy - e0c).abs());
    }

    let mut breaches: Vec<String> = dev
        .iter()
        .filter(|(_, &v)| !(v <= tolerance))
        .map(|(k, _)| k.clone())
        .collect();
    if !(fidelity_gap_max <= tolerance) {
        breaches.push("fidelity_gap".into());
    }

    Ok(ComparisonReport {
        scenario: config.name.clone(),
        tolerance,
        samples: out.rows.len(),
        max_deviation: dev,
        fidelity_gap_max,
        energy_drift_quantum: drift_q,
        energy_drift_classical: drift_c,
        norm_drift_max: qt.max_norm_drift(),
        chart_switches: ct.switch_count(),
        switch_times: ct.switches.iter().map(|s| s.time).collect(),
        passed: breaches.is_empty(),
        breaches,
    })
}
