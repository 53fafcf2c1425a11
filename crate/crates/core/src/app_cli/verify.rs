//! Oracle suites behind `axifep verify`.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::commands::{build_model, step_control};
use super::config::RunConfig;
use crate::error::{AxiError, Result};
use crate::fem_axisym::solver::{run_steps, StepRecord};
use crate::fem_axisym::{assemble, benchmark_bcs, gen_cylinder_mesh, Formulation, Model};
use crate::material_mcc::{invariants, return_map_strain, tangent_fd_check_strain, MatParams, RM_TOL};
use crate::oracles::{fd_global_stiffness, quadrature_oracle, random_plastic_trials, substep_integrate, Integrand};
use crate::tensor::Mat3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    /// `value <= limit` unless `at_least` is set.
    pub at_least: bool,
    pub passed: bool,
}

impl Check {
    pub fn le(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check { name: name.into(), value, limit, at_least: false, passed: value <= limit }
    }

    pub fn ge(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check { name: name.into(), value, limit, at_least: true, passed: value >= limit }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    fn new(suite: &str, checks: Vec<Check>) -> Self {
        SuiteReport { suite: suite.to_string(), passed: checks.iter().all(|c| c.passed), checks }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

pub const SUITES: [&str; 4] = ["tangent", "ul-vs-tl", "quadrature", "constitutive"];

/// Every converged step of the benchmark configuration.
pub fn benchmark_records(cfg: &RunConfig) -> Result<(Model, Vec<StepRecord>)> {
    let model = build_model(cfg)?;
    let bcs = |t: f64| benchmark_bcs(&model.mesh, cfg.ubar, cfg.height, t, cfg.fix_inner_z);
    let mut recs = Vec::with_capacity(cfg.steps);
    run_steps(&model, cfg.formulation, &bcs, &step_control(cfg), |r| {
        recs.push(r.clone());
        Ok(())
    })?;
    Ok((model, recs))
}

/// Least-squares slope of `log err` against `log h`.
pub fn loglog_slope(pts: &[(f64, f64)]) -> f64 {
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Uniformly compressed state of a small mesh with a seeded perturbation; elastic everywhere.
pub fn elastic_probe() -> Result<(Model, Vec<f64>)> {
    let mesh = gen_cylinder_mesh(10.0, 12.0, 2.0, 2, 2)?;
    let model = Model::new(mesh, MatParams::benchmark())?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut u = vec![0.0; model.n_dofs()];
    for (i, p) in model.mesh.nodes.iter().enumerate() {
        u[2 * i] = -0.01 * p[0] + rng.random_range(-1e-3..1e-3);
        u[2 * i + 1] = -0.01 * p[1] + rng.random_range(-1e-3..1e-3);
    }
    Ok((model, u))
}

/// Shear-dominated trial strain far enough past the yield surface (with `z = -0.01`)
/// that finite-difference probes up to `1e-3` stay plastic.
pub fn deep_plastic_trial() -> Mat3 {
    Mat3::new(-0.04, 0.15, 0.06, 0.15, -0.02, 0.09, 0.06, 0.09, -0.03)
}

pub fn suite_tangent(cfg: &RunConfig) -> Result<SuiteReport> {
    let mp = cfg.params()?;
    let mut checks = Vec::new();
    let trials = random_plastic_trials(10, 7, 1e-2, &mp);
    let mut worst = 0.0_f64;
    for t in &trials {
        let c = tangent_fd_check_strain(&t.eps_trial, t.z_n, &mp, 1e-7)?;
        worst = worst.max(c.err_d_alg);
    }
    checks.push(Check::le("material D_alg FD, plastic trials", worst, 1e-5));
    let el = Mat3::from_diagonal(&[-2e-3, -1e-3, -1.5e-3].into()) + Mat3::from_fn(|i, j| if i != j { 2e-4 } else { 0.0 });
    let c = tangent_fd_check_strain(&el, -0.01, &mp, 1e-7)?;
    checks.push(Check::le("material D_alg FD, elastic trial", c.err_d_alg, 1e-5));
    let deep = deep_plastic_trial();
    let mut pts = Vec::new();
    for h in [1e-3, 5e-4, 2.5e-4, 1.25e-4] {
        pts.push((h, tangent_fd_check_strain(&deep, -0.01, &mp, h)?.err_d_alg));
    }
    checks.push(Check::ge("material FD error decay order", loglog_slope(&pts), 1.8));

    let (em, eu) = elastic_probe()?;
    let zero = vec![0.0; eu.len()];
    let states0 = em.initial_states();
    let h0 = 1e-7 * em.mesh.size();
    for form in [Formulation::UL, Formulation::TL] {
        let r = fd_global_stiffness(&em, form, &states0, &eu, &zero, h0)?;
        checks.push(Check::le(format!("global FD {form:?}, elastic state"), r.max_rel_err, 1e-5));
    }
    let mut pts = Vec::new();
    for k in 0..4 {
        let h = 1e-3 * em.mesh.size() / 2f64.powi(k);
        pts.push((h, fd_global_stiffness(&em, Formulation::UL, &states0, &eu, &zero, h)?.max_rel_err));
    }
    checks.push(Check::ge("global FD error decay order, elastic state", loglog_slope(&pts), 1.8));

    for form in [Formulation::UL, Formulation::TL] {
        let c = RunConfig { formulation: form, ..cfg.clone() };
        let (model, recs) = benchmark_records(&c)?;
        let k = (c.steps / 2).max(1);
        let (states_n, u_n) = if k >= 2 {
            (recs[k - 2].states.clone(), recs[k - 2].u.clone())
        } else {
            (model.initial_states(), vec![0.0; model.n_dofs()])
        };
        let h = 1e-7 * model.mesh.size();
        let r = fd_global_stiffness(&model, form, &states_n, &recs[k - 1].u, &u_n, h)?;
        checks.push(Check::le(format!("global FD {form:?}, benchmark step {k}"), r.max_rel_err, 1e-5));
    }
    Ok(SuiteReport::new("tangent", checks))
}

pub fn suite_ul_vs_tl(cfg: &RunConfig) -> Result<SuiteReport> {
    let (_, ul) = benchmark_records(&RunConfig { formulation: Formulation::UL, ..cfg.clone() })?;
    let (_, tl) = benchmark_records(&RunConfig { formulation: Formulation::TL, ..cfg.clone() })?;
    let mut worst = 0.0_f64;
    for (a, b) in ul.iter().zip(&tl) {
        let scale = a.u.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let d = a.u.iter().zip(&b.u).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
        worst = worst.max(d / scale);
    }
    let checks = vec![
        Check::ge("steps completed UL", ul.len() as f64, cfg.steps as f64),
        Check::ge("steps completed TL", tl.len() as f64, cfg.steps as f64),
        Check::le("max per-step relative displacement difference", worst, 1e-8),
    ];
    Ok(SuiteReport::new("ul-vs-tl", checks))
}

pub fn suite_quadrature() -> Result<SuiteReport> {
    let mesh = gen_cylinder_mesh(10.0, 12.0, 3.0, 1, 1)?;
    let model = Model::new(mesh, MatParams::benchmark())?;
    let xe = model.mesh.elem_coords(0);
    let vol: f64 = model.gps[0].iter().map(|g| g.dv0).sum();
    let vol_ref = quadrature_oracle(&xe, Integrand::Volume, 64);
    let mut checks = vec![Check::le("element volume", (vol - vol_ref).abs() / vol_ref, 1e-13)];

    let alpha = 0.99;
    let mut u = vec![0.0; model.n_dofs()];
    for (i, p) in model.mesh.nodes.iter().enumerate() {
        u[2 * i] = (alpha - 1.0) * p[0];
    }
    let zero = vec![0.0; u.len()];
    let asm = assemble(&model, Formulation::UL, &model.initial_states(), &u, &zero, false)?;
    let s = &asm.states[0][0];
    let zeta = [s.mat.zeta[(0, 0)], s.mat.zeta[(1, 1)], s.mat.zeta[(2, 2)]];
    let scale = asm.residual.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut worst = 0.0_f64;
    for node in 0..8 {
        for dir in 0..2 {
            let what = Integrand::FintUniformRadial { alpha, zeta, j_p: s.j_p, node, dir };
            let want = quadrature_oracle(&xe, what, 64);
            let got = asm.residual[2 * model.mesh.elems[0][node] + dir];
            worst = worst.max((got - want).abs() / scale);
        }
    }
    checks.push(Check::le("internal force, uniform radial stretch", worst, 1e-10));

    let big = gen_cylinder_mesh(10.0, 15.0, 10.0, 5, 10)?;
    let bm = Model::new(big, MatParams::benchmark())?;
    let total: f64 = bm.gps.iter().flatten().map(|g| g.dv0).sum();
    let exact = 0.5 * (15.0f64.powi(2) - 10.0f64.powi(2)) * 10.0;
    checks.push(Check::le("benchmark mesh volume per radian", (total - exact).abs() / exact, 1e-13));
    Ok(SuiteReport::new("quadrature", checks))
}

pub fn suite_constitutive(mp: &MatParams) -> Result<SuiteReport> {
    let trials = random_plastic_trials(20, 2024, 1e-3, mp);
    let (mut ez, mut ezz, mut kkt, mut min_dg) = (0.0_f64, 0.0_f64, 0.0_f64, f64::INFINITY);
    for t in &trials {
        let (st, _) = return_map_strain(&t.eps_trial, t.z_n, mp, RM_TOL)?;
        let o = substep_integrate(&[t.eps_n, t.eps_trial], t.z_n, mp, 10_000)?;
        ez = ez.max((st.zeta - o.zeta).abs().max() / o.zeta.abs().max());
        ezz = ezz.max((st.z - o.z).abs());
        kkt = kkt.max(st.phi.abs() / (mp.pc0 * mp.pc0));
        min_dg = min_dg.min(st.dgamma);
        if !(invariants(&st.zeta).p.is_finite()) {
            return Err(AxiError::Solver("non-finite stress in return map".into()));
        }
    }
    let checks = vec![
        Check::le("zeta relative difference to substepping", ez, 1e-5),
        Check::le("z difference to substepping", ezz, 1e-5),
        Check::le("|Phi| / pc0^2 at converged states", kkt, 1e-10),
        Check::ge("minimum plastic multiplier", min_dg, 0.0),
    ];
    Ok(SuiteReport::new("constitutive", checks))
}

/// Runs one suite or `all`, writes `verify.json` into `out_dir` and returns the report.
pub fn cmd_verify(which: &str, cfg: &RunConfig, out_dir: &Path) -> Result<VerifyReport> {
    let names: Vec<&str> = match which {
        "all" => SUITES.to_vec(),
        s if SUITES.contains(&s) => vec![s],
        other => {
            return Err(AxiError::Invalid(format!(
                "unknown suite '{other}', expected one of {} or all",
                SUITES.join(", ")
            )))
        }
    };
    let mut suites = Vec::new();
    for n in names {
        suites.push(match n {
            "tangent" => suite_tangent(cfg)?,
            "ul-vs-tl" => suite_ul_vs_tl(cfg)?,
            "quadrature" => suite_quadrature()?,
            _ => suite_constitutive(&cfg.params()?)?,
        });
    }
    let report = VerifyReport { passed: suites.iter().all(|s| s.passed), suites };
    std::fs::create_dir_all(out_dir).map_err(|e| AxiError::Io(format!("{}: {e}", out_dir.display())))?;
    let p = out_dir.join("verify.json");
    let body = serde_json::to_string_pretty(&report).map_err(|e| AxiError::Io(e.to_string()))?;
    std::fs::write(&p, body + "\n").map_err(|e| AxiError::Io(format!("{}: {e}", p.display())))?;
    Ok(report)
}
