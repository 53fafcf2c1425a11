//! Newton-Raphson driver and load stepping with bisection.

use super::assembly::{assemble, ElemStates, Formulation, Model};
use super::dirichlet::{apply_dirichlet, DirichletSet};
use super::sparse::{BandLu, CsrMatrix};
use crate::error::{AxiError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NrSettings {
    pub tol: f64,
    pub k_max: usize,
    /// Consecutive error increases treated as divergence.
    pub diverge_after: usize,
}

impl Default for NrSettings {
    fn default() -> Self {
        NrSettings { tol: 1e-8, k_max: 25, diverge_after: 3 }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NrReport {
    /// `||r_free^(k)|| / ||r_free^(1)||`, one entry per residual evaluation.
    pub errors: Vec<f64>,
    /// Number of residual evaluations.
    pub iterations: usize,
    pub converged: bool,
}

/// Stiffness and residual of the last evaluation at a converged state.
#[derive(Debug, Clone)]
pub struct Linearisation {
    pub k: CsrMatrix,
    pub residual: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct NrOutcome {
    pub u: Vec<f64>,
    pub states: Vec<ElemStates>,
    pub report: NrReport,
    /// Residual at constrained dofs, per radian.
    pub reactions: Vec<(usize, f64)>,
    pub last: Linearisation,
}

/// Evaluates stiffness and residual at a converged state with zero increment.
pub fn linearise(model: &Model, form: Formulation, states: &[ElemStates], u: &[f64]) -> Result<Linearisation> {
    let asm = assemble(model, form, states, u, u, true)?;
    Ok(Linearisation { k: asm.stiffness.expect("stiffness requested"), residual: asm.residual })
}

/// First iterate of a step.
///
/// With `prev`, the prescribed increments are pushed through the last stiffness:
/// `K_ff du_f = -(r_f + K_fc du_c)`. Without it the constrained values are imposed and
/// free dofs keep their converged values.
pub fn predict(u_n: &[f64], bc: &DirichletSet, prev: Option<&Linearisation>) -> Result<Vec<f64>> {
    let mut u = u_n.to_vec();
    bc.impose(&mut u);
    if let Some(lin) = prev {
        let du: Vec<f64> = u.iter().zip(u_n).map(|(a, b)| a - b).collect();
        let kdu = lin.k.mul_vec(&du);
        let free = bc.free_dofs(u.len());
        let mut rhs: Vec<f64> = free.iter().map(|&d| -(lin.residual[d] + kdu[d])).collect();
        BandLu::factor(&lin.k.submatrix(&free))?.solve(&mut rhs);
        for (i, &d) in free.iter().enumerate() {
            u[d] += rhs[i];
        }
    }
    Ok(u)
}

/// Solves one load increment starting from the converged state `(u_n, states_n)`.
///
/// Iterations count residual evaluations after the predictor.
pub fn nr_solve(
    model: &Model,
    form: Formulation,
    states_n: &[ElemStates],
    u_n: &[f64],
    bc: &DirichletSet,
    set: &NrSettings,
    prev: Option<&Linearisation>,
) -> Result<NrOutcome> {
    if !(set.tol > 0.0) || set.k_max == 0 {
        return Err(AxiError::Invalid("NR needs tol > 0 and k_max >= 1".into()));
    }
    let mut u = predict(u_n, bc, prev)?;
    let mut report = NrReport::default();
    let mut r1 = 0.0;
    let mut growth = 0;
    loop {
        let asm = assemble(model, form, states_n, &u, u_n, true)?;
        let k = asm.stiffness.expect("stiffness requested");
        let red = apply_dirichlet(&k, &asm.residual, bc);
        let norm = red.rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !norm.is_finite() {
            return Err(AxiError::Solver("non-finite residual".into()));
        }
        if report.errors.is_empty() {
            r1 = norm;
        }
        let err = if r1 > 0.0 { norm / r1 } else { 0.0 };
        if let Some(&prev) = report.errors.last() {
            growth = if err > prev { growth + 1 } else { 0 };
        }
        report.errors.push(err);
        report.iterations = report.errors.len();
        if err <= set.tol {
            report.converged = true;
            let last = Linearisation { k, residual: asm.residual };
            return Ok(NrOutcome { u, states: asm.states, report, reactions: red.reactions, last });
        }
        if growth >= set.diverge_after {
            return Err(AxiError::Solver(format!("divergence after {} iterations (err {err:e})", report.iterations)));
        }
        if report.iterations >= set.k_max {
            return Err(AxiError::Solver(format!("no convergence in {} iterations (err {err:e})", set.k_max)));
        }
        let mut du = red.rhs;
        BandLu::factor(&red.k)?.solve(&mut du);
        for (i, &d) in red.free.iter().enumerate() {
            u[d] += du[i];
        }
    }
}

/// One accepted increment, possibly a bisected piece of a load step.
#[derive(Debug, Clone)]
pub struct Increment {
    pub step: usize,
    pub t_frac: f64,
    pub depth: usize,
    pub report: NrReport,
}

/// Converged configuration at the end of a full load step.
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub step: usize,
    pub t_frac: f64,
    pub increments: Vec<Increment>,
    pub u: Vec<f64>,
    pub states: Vec<ElemStates>,
    pub reactions: Vec<(usize, f64)>,
}

#[derive(Debug, Clone)]
pub struct StepControl {
    pub n_steps: usize,
    pub max_bisect: usize,
    pub nr: NrSettings,
    /// Start each step from the tangent predictor.
    pub predictor: bool,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl { n_steps: 30, max_bisect: 4, nr: NrSettings::default(), predictor: true }
    }
}

struct Cursor {
    u: Vec<f64>,
    states: Vec<ElemStates>,
    reactions: Vec<(usize, f64)>,
    last: Option<Linearisation>,
}

#[allow(clippy::too_many_arguments)]
fn advance(
    model: &Model,
    form: Formulation,
    bcs: &dyn Fn(f64) -> Result<DirichletSet>,
    ctl: &StepControl,
    cur: &mut Cursor,
    step: usize,
    t_b: f64,
    t_a: f64,
    depth: usize,
    log: &mut Vec<Increment>,
) -> Result<()> {
    let bc = bcs(t_b)?;
    let prev = if ctl.predictor { cur.last.as_ref() } else { None };
    match nr_solve(model, form, &cur.states, &cur.u, &bc, &ctl.nr, prev) {
        Ok(out) => {
            cur.u = out.u;
            cur.states = out.states;
            cur.reactions = out.reactions;
            cur.last = Some(out.last);
            log.push(Increment { step, t_frac: t_b, depth, report: out.report });
            Ok(())
        }
        Err(e @ AxiError::Config { .. }) | Err(e @ AxiError::Invalid(_)) => Err(e),
        Err(e) if depth >= ctl.max_bisect => {
            Err(AxiError::Solver(format!("step {step} failed after {depth} bisections: {e}")))
        }
        Err(_) => {
            let mid = 0.5 * (t_a + t_b);
            advance(model, form, bcs, ctl, cur, step, mid, t_a, depth + 1, log)?;
            advance(model, form, bcs, ctl, cur, step, t_b, mid, depth + 1, log)
        }
    }
}

/// Runs `n_steps` equal increments of the load fraction `t/T` from 0 to 1.
///
/// `bcs(t_frac)` returns the prescribed set at that load fraction. `on_step` sees each
/// converged step; an error from it aborts the run.
pub fn run_steps(
    model: &Model,
    form: Formulation,
    bcs: &dyn Fn(f64) -> Result<DirichletSet>,
    ctl: &StepControl,
    mut on_step: impl FnMut(&StepRecord) -> Result<()>,
) -> Result<StepRecord> {
    if ctl.n_steps == 0 {
        return Err(AxiError::Invalid("at least one load step is required".into()));
    }
    let u0 = vec![0.0; model.n_dofs()];
    let states0 = model.initial_states();
    let last = if ctl.predictor { Some(linearise(model, form, &states0, &u0)?) } else { None };
    let mut cur = Cursor { u: u0, states: states0, reactions: Vec::new(), last };
    let mut last = None;
    for step in 1..=ctl.n_steps {
        let t_a = (step - 1) as f64 / ctl.n_steps as f64;
        let t_b = step as f64 / ctl.n_steps as f64;
        let mut log = Vec::new();
        advance(model, form, bcs, ctl, &mut cur, step, t_b, t_a, 0, &mut log)?;
        let rec = StepRecord {
            step,
            t_frac: t_b,
            increments: log,
            u: cur.u.clone(),
            states: cur.states.clone(),
            reactions: cur.reactions.clone(),
        };
        on_step(&rec)?;
        last = Some(rec);
    }
    Ok(last.expect("n_steps >= 1"))
}
