//! Open-system dynamics: dephasing (Lindblad) and intrinsic-decoherence
//! solvers, the Bures fidelity, and the transfer/blockade fidelity
//! experiments.
//!
//! Each solver has two independent numerical paths. Dephasing runs through
//! the vectorized-superoperator exponential in production with RK4 as the
//! cross-check; intrinsic decoherence has an exact eigenbasis closed form
//! with RK4 as the cross-check.

mod lindblad;
mod milburn;

pub use lindblad::{
    dephasing_liouvillian, lindblad_evolve, lindblad_liouvillian, lindblad_trace, LindbladMethod,
};
pub use milburn::{eigenbasis_populations, milburn_evolve, milburn_evolve_rk4, milburn_trace};

use num_complex::Complex64;

use crate::error::Error;
use crate::qmatrix::{eigh, ComplexMatrix};
use crate::spinchain::{drain_target_state, encoded_input_state, ChainParams, PureState};
use crate::Result;

const HERMITICITY_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-9;
const POSITIVITY_TOL: f64 = -1e-8;
/// Positivity drift beyond this magnitude is flagged as a solver warning.
const POSITIVITY_WARNING: f64 = -1e-6;
/// Negative Bures overlaps beyond this magnitude indicate an invalid state.
const OVERLAP_REJECT: f64 = -1e-6;

/// Hermitian, unit-trace, positive-semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validate Hermiticity (1e-10), unit trace (1e-9) and positivity
    /// (minimum eigenvalue >= -1e-8).
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidDensity("matrix is not square".into()));
        }
        let herm = matrix.hermiticity_error();
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidDensity(format!(
                "hermiticity deviation {herm:.3e}"
            )));
        }
        let trace_dev = (matrix.trace().re - 1.0).abs() + matrix.trace().im.abs();
        if trace_dev > TRACE_TOL {
            return Err(Error::InvalidDensity(format!(
                "trace deviation {trace_dev:.3e}"
            )));
        }
        let candidate = Self { matrix };
        let min_eig = candidate.min_eigenvalue()?;
        if min_eig < POSITIVITY_TOL {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(candidate)
    }

    /// `|psi><psi|`.
    pub fn from_pure(psi: &PureState) -> Self {
        let n = psi.dim();
        let matrix =
            ComplexMatrix::from_fn(n, n, |i, j| psi.amplitude(i) * psi.amplitude(j).conj());
        Self { matrix }
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(n_sites: usize) -> Self {
        let dim = 1usize << n_sites;
        Self {
            matrix: ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64),
        }
    }

    /// Wrap solver output: re-Hermitize and report the correction norm.
    /// Validation is deferred to the caller's diagnostics.
    pub(crate) fn hermitized(matrix: ComplexMatrix) -> (Self, f64) {
        let (m, correction) = matrix.hermitized();
        (Self { matrix: m }, correction)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn trace_deviation(&self) -> f64 {
        let tr = self.matrix.trace();
        (tr.re - 1.0).abs() + tr.im.abs()
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let eig = eigh(&self.matrix)?;
        Ok(eig.eigenvalues[0])
    }

    /// `trace(rho^2)`; 1 for pure states.
    pub fn purity(&self) -> f64 {
        self.matrix.matmul(&self.matrix).trace().re
    }

    /// `<psi| rho |psi>` as a real number.
    pub fn expectation(&self, psi: &PureState) -> f64 {
        let v = self.matrix.matvec(psi.amplitudes());
        crate::qmatrix::vdot(psi.amplitudes(), &v).re
    }
}

/// Per-site dephasing rates (rad/s), one per spin.
#[derive(Debug, Clone, PartialEq)]
pub struct DephasingRates {
    lambdas: Vec<f64>,
}

impl DephasingRates {
    pub fn new(lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.iter().any(|l| !(*l >= 0.0)) {
            return Err(Error::InvalidParameter(
                "dephasing rates must be non-negative".into(),
            ));
        }
        Ok(Self { lambdas })
    }

    /// Identical rate on every site.
    pub fn uniform(lambda: f64, n_sites: usize) -> Result<Self> {
        Self::new(vec![lambda; n_sites])
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn total(&self) -> f64 {
        self.lambdas.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.lambdas.iter().all(|l| *l == 0.0)
    }
}

/// Intrinsic decoherence rate (seconds).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MilburnRate {
    gamma: f64,
}

impl MilburnRate {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0) {
            return Err(Error::InvalidParameter(
                "intrinsic decoherence rate must be non-negative".into(),
            ));
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// Numerical health of a solver output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverDiagnostics {
    /// Max-norm of the re-Hermitization correction applied to the output.
    pub hermiticity_correction: f64,
    /// `|trace(rho) - 1|` before any correction.
    pub trace_deviation: f64,
    /// Smallest eigenvalue observed.
    pub min_eigenvalue: f64,
}

impl SolverDiagnostics {
    pub(crate) fn exact() -> Self {
        Self {
            hermiticity_correction: 0.0,
            trace_deviation: 0.0,
            min_eigenvalue: 0.0,
        }
    }

    pub(crate) fn absorb(&mut self, other: &SolverDiagnostics) {
        self.hermiticity_correction = self
            .hermiticity_correction
            .max(other.hermiticity_correction);
        self.trace_deviation = self.trace_deviation.max(other.trace_deviation);
        self.min_eigenvalue = self.min_eigenvalue.min(other.min_eigenvalue);
    }

    /// True when positivity drifted beyond the warning threshold (-1e-6).
    pub fn positivity_warning(&self) -> bool {
        self.min_eigenvalue < POSITIVITY_WARNING
    }
}

/// Solver output: the evolved state plus numerical diagnostics.
#[derive(Debug, Clone)]
pub struct Evolved {
    pub rho: DensityMatrix,
    pub diagnostics: SolverDiagnostics,
}

pub(crate) fn diagnose(
    rho: &DensityMatrix,
    hermiticity_correction: f64,
) -> Result<SolverDiagnostics> {
    Ok(SolverDiagnostics {
        hermiticity_correction,
        trace_deviation: rho.trace_deviation(),
        min_eigenvalue: rho.min_eigenvalue()?,
    })
}

/// Uniform time grid `[t_start, t_end]` with `n_points` samples including
/// both endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_start: f64,
    t_end: f64,
    n_points: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, n_points: usize) -> Result<Self> {
        if n_points < 2 {
            return Err(Error::InvalidParameter(format!(
                "time grid needs at least 2 points, got {n_points}"
            )));
        }
        if !(t_start >= 0.0) || !(t_end > t_start) {
            return Err(Error::InvalidParameter(format!(
                "time grid requires 0 <= t_start < t_end, got [{t_start}, {t_end}]"
            )));
        }
        Ok(Self {
            t_start,
            t_end,
            n_points,
        })
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn step(&self) -> f64 {
        (self.t_end - self.t_start) / (self.n_points - 1) as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n_points)
            .map(|k| {
                self.t_start + (self.t_end - self.t_start) * k as f64 / (self.n_points - 1) as f64
            })
            .collect()
    }
}

/// Density matrices along a time grid with aggregated diagnostics.
#[derive(Debug, Clone)]
pub struct DensityTrace {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub worst: SolverDiagnostics,
}

/// Fidelity samples along a time grid.
#[derive(Debug, Clone)]
pub struct FidelityTrace {
    pub times: Vec<f64>,
    pub fidelity: Vec<f64>,
}

/// Bures fidelity against a pure target: `sqrt(<psi_tar| rho |psi_tar>)`.
///
/// Overlaps in `[-1e-6, 0)` are treated as numerical noise and clamped to
/// zero; anything more negative rejects the state.
pub fn bures_fidelity(target: &PureState, rho: &DensityMatrix) -> Result<f64> {
    let q = rho.expectation(target);
    if q < OVERLAP_REJECT {
        return Err(Error::InvalidDensity(format!(
            "target overlap {q:.3e} is negative beyond numerical noise"
        )));
    }
    Ok(q.max(0.0).sqrt())
}

/// Which transistor operation an experiment exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    /// Gate open (`delta = 0`); the target carries the input on the drain.
    Transfer,
    /// Gate closed (large `delta`); the target is the input state itself.
    Blockade,
}

/// Decoherence channel and its rate parameters. The channel selects the
/// solver: dephasing runs the vectorized Lindblad paths, intrinsic
/// decoherence the eigenbasis closed form.
#[derive(Debug, Clone, PartialEq)]
pub enum Decoherence {
    Dephasing(DephasingRates),
    Intrinsic(MilburnRate),
}

/// A configured fidelity experiment.
#[derive(Debug, Clone)]
pub struct FidelityExperiment {
    pub kind: ExperimentKind,
    pub params: ChainParams,
    pub decoherence: Decoherence,
    /// Source amplitudes of the encoded input `alpha |up> + beta |down>`.
    pub alpha: Complex64,
    pub beta: Complex64,
    pub grid: TimeGrid,
    /// Permit detunings that contradict the experiment kind (transfer with
    /// `delta != 0`, blockade with `delta = 0`).
    pub allow_detuning_mismatch: bool,
}

/// Experiment result: the fidelity curve and the solver health over it.
#[derive(Debug, Clone)]
pub struct FidelityOutcome {
    pub trace: FidelityTrace,
    pub diagnostics: SolverDiagnostics,
}

impl FidelityExperiment {
    fn check_consistency(&self) -> Result<()> {
        if self.allow_detuning_mismatch {
            return Ok(());
        }
        match self.kind {
            ExperimentKind::Transfer if self.params.delta() != 0.0 => Err(Error::Misconfigured(
                "transfer requires delta = 0; set allow_detuning_mismatch to override".into(),
            )),
            ExperimentKind::Blockade if self.params.delta() == 0.0 => Err(Error::Misconfigured(
                "blockade requires a nonzero detuning; set allow_detuning_mismatch to override"
                    .into(),
            )),
            _ => Ok(()),
        }
    }

    /// Target state scored by the Bures fidelity.
    pub fn target(&self) -> Result<PureState> {
        match self.kind {
            ExperimentKind::Blockade => {
                encoded_input_state(self.alpha, self.beta, self.params.n_sites())
            }
            ExperimentKind::Transfer => {
                drain_target_state(self.alpha, self.beta, self.params.n_sites())
            }
        }
    }

    pub fn run(&self) -> Result<FidelityOutcome> {
        self.check_consistency()?;
        let psi0 = encoded_input_state(self.alpha, self.beta, self.params.n_sites())?;
        let rho0 = DensityMatrix::from_pure(&psi0);
        let target = self.target()?;

        let density = match &self.decoherence {
            Decoherence::Dephasing(rates) => {
                lindblad_trace(&self.params, rates, &rho0, &self.grid)?
            }
            Decoherence::Intrinsic(rate) => milburn_trace(&self.params, rate, &rho0, &self.grid)?,
        };

        let mut fidelity = Vec::with_capacity(density.times.len());
        for rho in &density.states {
            fidelity.push(bures_fidelity(&target, rho)?);
        }
        Ok(FidelityOutcome {
            trace: FidelityTrace {
                times: density.times,
                fidelity,
            },
            diagnostics: density.worst,
        })
    }
}

/// Fourth-order Runge-Kutta over density matrices with a fixed step count.
pub(crate) fn rk4_integrate(
    rho0: &ComplexMatrix,
    t: f64,
    n_steps: usize,
    rhs: impl Fn(&ComplexMatrix) -> ComplexMatrix,
) -> ComplexMatrix {
    let dt = t / n_steps as f64;
    let half = Complex64::new(0.5 * dt, 0.0);
    let sixth = Complex64::new(dt / 6.0, 0.0);
    let two = Complex64::new(2.0, 0.0);
    let full = Complex64::new(dt, 0.0);

    let mut rho = rho0.clone();
    for _ in 0..n_steps {
        let k1 = rhs(&rho);
        let k2 = rhs(&(&rho + &k1.scale(half)));
        let k3 = rhs(&(&rho + &k2.scale(half)));
        let k4 = rhs(&(&rho + &k3.scale(full)));
        let increment = &(&k1 + &k4) + &(&k2 + &k3).scale(two);
        rho = &rho + &increment.scale(sixth);
    }
    rho
}

/// Run RK4 with successive step halving until two refinements agree to
/// 1e-8 in max-norm. Errors out if eight doublings do not converge.
pub(crate) fn rk4_refined(
    rho0: &ComplexMatrix,
    t: f64,
    base_steps: usize,
    rhs: impl Fn(&ComplexMatrix) -> ComplexMatrix,
) -> Result<ComplexMatrix> {
    const AGREEMENT: f64 = 1e-8;
    const MAX_DOUBLINGS: usize = 8;

    let mut steps = base_steps.max(1);
    let mut prev = rk4_integrate(rho0, t, steps, &rhs);
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_DOUBLINGS {
        steps *= 2;
        let cur = rk4_integrate(rho0, t, steps, &rhs);
        residual = prev.max_diff(&cur);
        if residual <= AGREEMENT {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Rk4NoConvergence { steps, residual })
}
