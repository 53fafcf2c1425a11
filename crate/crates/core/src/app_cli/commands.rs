//! Drivers behind the `axifep` subcommands.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

use super::config::RunConfig;
use super::output::{f, vtk_string, CONVERGENCE_HEADER, SUMMARY_HEADER, TRACK_HEADER};
use crate::error::{AxiError, Result};
use crate::fem_axisym::solver::{run_steps, StepControl, StepRecord};
use crate::fem_axisym::{benchmark_bcs, gen_cylinder_mesh, Formulation, Model, NrSettings};
use crate::material_mcc::{return_map_strain, MatParams, RM_TOL};
use crate::oracles::cavity_fixture;
use crate::tensor::Mat3;

/// Quantities logged at a tracked Gauss point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrackRow {
    pub step: usize,
    pub t_frac: f64,
    pub label: String,
    pub u_r: f64,
    pub p_sigma: f64,
    pub rho_sigma: f64,
    pub j_e: f64,
    pub j_p: f64,
    pub j: f64,
    pub yielded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrackedGp {
    pub label: String,
    pub elem: usize,
    pub gp: usize,
    pub r0: f64,
    pub z0: f64,
}

/// Per-step log of a simulation.
#[derive(Debug, Clone)]
pub struct StepLog {
    pub step: usize,
    pub t_frac: f64,
    /// NR error histories, one per accepted increment.
    pub errors: Vec<Vec<f64>>,
    pub u: Vec<f64>,
    pub track: Vec<TrackRow>,
    /// `max |J_e J_p - J|` over all Gauss points.
    pub split_defect: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterStats {
    pub increments: usize,
    pub min: usize,
    pub max: usize,
    pub avg: f64,
    pub total: usize,
    pub bisected_steps: usize,
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub formulation: Formulation,
    pub tracked: Vec<TrackedGp>,
    pub steps: Vec<StepLog>,
}

impl Simulation {
    pub fn stats(&self) -> IterStats {
        let its: Vec<usize> = self.steps.iter().flat_map(|s| s.errors.iter().map(|e| e.len())).collect();
        let total: usize = its.iter().sum();
        IterStats {
            increments: its.len(),
            min: its.iter().copied().min().unwrap_or(0),
            max: its.iter().copied().max().unwrap_or(0),
            avg: if its.is_empty() { 0.0 } else { total as f64 / its.len() as f64 },
            total,
            bisected_steps: self.steps.iter().filter(|s| s.errors.len() > 1).count(),
        }
    }
}

pub fn build_model(cfg: &RunConfig) -> Result<Model> {
    let mesh = gen_cylinder_mesh(cfg.r_int, cfg.r_ext, cfg.height, cfg.n_r, cfg.n_z)?;
    let mut model = Model::new(mesh, cfg.params()?)?;
    model.rm_tol = RM_TOL;
    Ok(model)
}

pub fn step_control(cfg: &RunConfig) -> StepControl {
    StepControl {
        n_steps: cfg.steps,
        max_bisect: cfg.max_bisect,
        nr: NrSettings { tol: cfg.tol, k_max: cfg.k_max, diverge_after: 3 },
        predictor: cfg.predictor,
    }
}

/// Runs the stepped solve; `sink` sees every converged step together with its log.
pub fn simulate(cfg: &RunConfig, mut sink: impl FnMut(&Model, &StepRecord, &StepLog) -> Result<()>) -> Result<Simulation> {
    let model = build_model(cfg)?;
    let tracked: Vec<TrackedGp> = cfg
        .track
        .iter()
        .map(|p| {
            let (e, k) = model.nearest_gp(p.r, p.z);
            let g = &model.gps[e][k];
            TrackedGp { label: p.label.clone(), elem: e, gp: k, r0: g.r0, z0: g.z0 }
        })
        .collect();
    let bcs = |t: f64| benchmark_bcs(&model.mesh, cfg.ubar, cfg.height, t, cfg.fix_inner_z);
    let mut steps = Vec::with_capacity(cfg.steps);
    run_steps(&model, cfg.formulation, &bcs, &step_control(cfg), |rec| {
        let track = tracked
            .iter()
            .map(|t| {
                let s = &rec.states[t.elem][t.gp];
                TrackRow {
                    step: rec.step,
                    t_frac: rec.t_frac,
                    label: t.label.clone(),
                    u_r: model.gp_displacement(&rec.u, t.elem, t.gp)[0],
                    p_sigma: s.cauchy_pressure(),
                    rho_sigma: s.cauchy_rho(),
                    j_e: s.mat.j_e,
                    j_p: s.j_p,
                    j: s.j,
                    yielded: s.mat.yielded,
                }
            })
            .collect();
        let split_defect =
            rec.states.iter().flatten().map(|s| (s.mat.j_e * s.j_p - s.j).abs()).fold(0.0, f64::max);
        let log = StepLog {
            step: rec.step,
            t_frac: rec.t_frac,
            errors: rec.increments.iter().map(|i| i.report.errors.clone()).collect(),
            u: rec.u.clone(),
            track,
            split_defect,
        };
        sink(&model, rec, &log)?;
        steps.push(log);
        Ok(())
    })?;
    Ok(Simulation { formulation: cfg.formulation, tracked, steps })
}

fn io(path: &Path, e: std::io::Error) -> AxiError {
    AxiError::Io(format!("{}: {e}", path.display()))
}

/// Runs a configuration and writes `convergence.csv`, `track.csv`, `summary.csv` and
/// `field_####.vtk` into the output directory. Files are flushed step by step so a
/// failed run keeps what it reached.
pub fn cmd_run(cfg: &RunConfig) -> Result<Simulation> {
    let dir = &cfg.out_dir;
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let open = |name: &str| -> Result<(fs::File, std::path::PathBuf)> {
        let p = dir.join(name);
        Ok((fs::File::create(&p).map_err(|e| io(&p, e))?, p))
    };
    let (mut conv, conv_p) = open("convergence.csv")?;
    let (mut track, track_p) = open("track.csv")?;
    writeln!(conv, "{CONVERGENCE_HEADER}").map_err(|e| io(&conv_p, e))?;
    let model = build_model(cfg)?;
    for p in &cfg.track {
        let (e, k) = model.nearest_gp(p.r, p.z);
        let g = &model.gps[e][k];
        writeln!(track, "# {} requested R={} Z={} gauss point elem={e} gp={k} R={} Z={}", p.label, p.r, p.z, f(g.r0), f(g.z0))
            .map_err(|e| io(&track_p, e))?;
    }
    writeln!(track, "{TRACK_HEADER}").map_err(|e| io(&track_p, e))?;
    let result = simulate(cfg, |model, rec, log| {
        let mut c = String::new();
        for inc in &rec.increments {
            for (k, e) in inc.report.errors.iter().enumerate() {
                writeln!(c, "{},{},{},{}", rec.step, f(inc.t_frac), k + 1, f(*e)).unwrap();
            }
        }
        conv.write_all(c.as_bytes()).map_err(|e| io(&conv_p, e))?;
        let mut t = String::new();
        for r in &log.track {
            writeln!(
                t,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.step,
                f(r.t_frac),
                f(cfg.ubar * r.t_frac),
                r.label,
                f(r.u_r),
                f(r.p_sigma),
                f(r.rho_sigma),
                f(r.j_e),
                f(r.j_p),
                f(r.j),
                r.yielded as u8
            )
            .unwrap();
        }
        track.write_all(t.as_bytes()).map_err(|e| io(&track_p, e))?;
        if cfg.vtk {
            let p = dir.join(format!("field_{:04}.vtk", rec.step));
            let title = format!("axifep step {} t/T={}", rec.step, rec.t_frac);
            fs::write(&p, vtk_string(&model.mesh, &rec.u, &rec.states, &title)).map_err(|e| io(&p, e))?;
        }
        conv.flush().map_err(|e| io(&conv_p, e))?;
        track.flush().map_err(|e| io(&track_p, e))
    })?;
    let s = result.stats();
    let p = dir.join("summary.csv");
    let body = format!(
        "{SUMMARY_HEADER}\n{:?},{},{},{},{},{},{},{}\n",
        cfg.formulation,
        result.steps.len(),
        s.increments,
        s.min,
        s.max,
        f(s.avg),
        s.total,
        s.bisected_steps
    );
    fs::write(&p, body).map_err(|e| io(&p, e))?;
    Ok(result)
}

/// Printed report of the cavity-expansion fixture.
pub fn cmd_cavity(alpha: f64) -> Result<String> {
    let c = cavity_fixture(alpha, 1.0, 0.7)?;
    let want = Mat3::new(alpha, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0);
    let mut s = String::new();
    let row = |m: &Mat3, i: usize| format!("  [{:>12.9} {:>12.9} {:>12.9}]", m[(i, 0)], m[(i, 1)], m[(i, 2)]);
    writeln!(s, "alpha = {alpha}").unwrap();
    writeln!(s, "F cartesian:").unwrap();
    for i in 0..3 {
        writeln!(s, "{}", row(&c.f_cart, i)).unwrap();
    }
    writeln!(s, "F cylindrical:").unwrap();
    for i in 0..3 {
        writeln!(s, "{}", row(&c.f_cyl, i)).unwrap();
    }
    let ok_f = (c.f_cyl - want).abs().max() <= 1e-13;
    let ok_j = (c.j_cart - c.j_cyl).abs() <= 1e-12 && (c.j_cart - alpha * alpha).abs() <= 1e-12;
    writeln!(s, "F cylindrical = diag(alpha, 1, 1): {}", if ok_f { "ok" } else { "MISMATCH" }).unwrap();
    writeln!(s, "J det(F cart) = {:.15}", c.j_cart).unwrap();
    writeln!(s, "J det(F cyl) r/R = {:.15}", c.j_cyl).unwrap();
    writeln!(s, "J routes agree: {}", if ok_j { "ok" } else { "MISMATCH" }).unwrap();
    Ok(s)
}

pub const MATPOINT_HEADER: &str = "row,p,q,z,dgamma,phi,yielded,iterations";

/// Material-point driver over a strain path.
///
/// Input: optional `# key = value` header lines (`e`, `nu`, `h`, `kappa`, `alpha`, `m`,
/// `pc0`, `z0`), then rows of 3 (diagonal) or 6 (`rr tt zz rz rt tz`) log-strain
/// components. Rows are total strains; the trial elastic strain of each row adds the
/// row-to-row increment to the last converged elastic strain.
pub fn cmd_matpoint(text: &str) -> Result<String> {
    let mut vals = [1.375e9, 0.375, 765e6, 0.0, 1.0, 1.0, 2.4e8, 0.0];
    let keys = ["e", "nu", "h", "kappa", "alpha", "m", "pc0", "z0"];
    let mut rows: Vec<(usize, Mat3)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(h) = line.strip_prefix('#') {
            if let Some((k, v)) = h.split_once('=') {
                let k = k.trim();
                let idx = keys
                    .iter()
                    .position(|x| *x == k)
                    .ok_or_else(|| AxiError::Config { line: ln, msg: format!("unknown header key '{k}'") })?;
                vals[idx] = v
                    .trim()
                    .parse()
                    .map_err(|_| AxiError::Config { line: ln, msg: format!("bad value for '{k}'") })?;
            }
            continue;
        }
        let nums: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| AxiError::Config { line: ln, msg: "non-numeric entry".into() })?;
        let m = match nums.as_slice() {
            [a, b, c] => Mat3::from_diagonal(&nalgebra::Vector3::new(*a, *b, *c)),
            [rr, tt, zz, rz, rt, tz] => Mat3::new(*rr, *rt, *rz, *rt, *tt, *tz, *rz, *tz, *zz),
            _ => {
                return Err(AxiError::Config {
                    line: ln,
                    msg: format!("expected 3 or 6 components, found {}", nums.len()),
                })
            }
        };
        if !m.iter().all(|v| v.is_finite()) {
            return Err(AxiError::Config { line: ln, msg: "non-finite entry".into() });
        }
        rows.push((ln, m));
    }
    let mp = MatParams::new(vals[0], vals[1], vals[2], vals[3], vals[4], vals[5], vals[6])?;
    let mut out = String::from(MATPOINT_HEADER);
    out.push('\n');
    let mut eps_e = Mat3::zeros();
    let mut z = vals[7];
    let mut prev = Mat3::zeros();
    for (k, (ln, m)) in rows.iter().enumerate() {
        let trial = eps_e + (m - prev);
        let (st, _) = return_map_strain(&trial, z, &mp, RM_TOL).map_err(|e| match e {
            AxiError::Constitutive { iters, residual, .. } => {
                AxiError::Config { line: *ln, msg: format!("return map failed ({iters} iterations, residual {residual:e})") }
            }
            other => other,
        })?;
        let inv = crate::material_mcc::invariants(&st.zeta);
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            k + 1,
            f(inv.p),
            f(inv.q),
            f(st.z),
            f(st.dgamma),
            f(st.phi),
            st.yielded as u8,
            st.iters
        )
        .unwrap();
        eps_e = st.eps_e;
        z = st.z;
        prev = *m;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(csv: &str) -> Vec<Vec<f64>> {
        csv.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
    }

    #[test]
    fn matpoint_zero_row_is_stress_free() {
        let r = rows(&cmd_matpoint("0 0 0\n0 0 0 0 0 0\n").unwrap());
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|x| x[1] == 0.0 && x[2] == 0.0 && x[6] == 0.0));
    }

    #[test]
    fn matpoint_hydrostatic_crossing() {
        let mp = MatParams::benchmark();
        let mut text = String::from("# pc0 = 2.4e8\n");
        for k in 0..40 {
            let d = -0.005 * k as f64;
            text.push_str(&format!("{d} {d} {d}\n"));
        }
        let r = rows(&cmd_matpoint(&text).unwrap());
        let first = r.iter().position(|x| x[6] == 1.0).unwrap();
        let analytic = (mp.pc0 / mp.k / (3.0 * -0.005)).ceil() as usize;
        assert_eq!(first, analytic);
        assert!(r[first][4] > 0.0 && r[first - 1][4] == 0.0);
    }

    #[test]
    fn matpoint_reports_bad_line() {
        match cmd_matpoint("# e = 1e9\n0 0 0\n\n1 2\n") {
            Err(AxiError::Config { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(cmd_matpoint("# what = 1\n"), Err(AxiError::Config { line: 1, .. })));
    }

    #[test]
    fn cavity_report_flags() {
        let s = cmd_cavity(1.1).unwrap();
        assert!(s.contains("J routes agree: ok") && s.contains("diag(alpha, 1, 1): ok"));
        assert!(s.contains("1.210000000000000"));
        assert!(cmd_cavity(-1.0).is_err());
    }
}
