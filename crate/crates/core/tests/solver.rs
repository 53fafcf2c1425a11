use axifep::app_cli::verify::benchmark_records;
use axifep::app_cli::RunConfig;
use axifep::fem_axisym::solver::run_steps;
use axifep::fem_axisym::{benchmark_bcs, gen_cylinder_mesh, Formulation, Model, NrSettings, StepControl};
use axifep::material_mcc::MatParams;

#[test]
fn predictor_changes_iterations_not_solution() {
    let base = RunConfig { steps: 6, ubar: 0.2, ..RunConfig::default() };
    let (_, with) = benchmark_records(&base).unwrap();
    let (_, without) = benchmark_records(&RunConfig { predictor: false, ..base }).unwrap();
    let a = &with.last().unwrap().u;
    let b = &without.last().unwrap().u;
    let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let d = a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
    assert!(d <= 1e-8 * scale, "{d:e}");
}

#[test]
fn bisection_recovers_from_tight_iteration_cap() {
    let mesh = gen_cylinder_mesh(10.0, 15.0, 10.0, 2, 4).unwrap();
    let model = Model::new(mesh, MatParams::benchmark()).unwrap();
    let bcs = |t: f64| benchmark_bcs(&model.mesh, 1.0, 10.0, t, true);
    let ctl = StepControl { n_steps: 2, max_bisect: 6, nr: NrSettings { k_max: 5, ..NrSettings::default() }, predictor: true };
    let mut seen = Vec::new();
    let last = run_steps(&model, Formulation::UL, &bcs, &ctl, |r| {
        seen.push(r.increments.len());
        Ok(())
    })
    .unwrap();
    assert_eq!(seen.len(), 2);
    assert!(seen.iter().any(|&n| n > 1), "{seen:?}");
    for inc in &last.increments {
        assert!(inc.report.converged && inc.report.iterations <= 5);
    }
    let fracs: Vec<f64> = last.increments.iter().map(|i| i.t_frac).collect();
    assert!(fracs.windows(2).all(|w| w[1] > w[0]) && (fracs.last().unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn reactions_balance_axially() {
    let cfg = RunConfig { steps: 5, ubar: 0.2, ..RunConfig::default() };
    let (model, recs) = benchmark_records(&cfg).unwrap();
    let rec = recs.last().unwrap();
    let fz: f64 = rec.reactions.iter().filter(|(d, _)| d % 2 == 1).map(|(_, v)| v).sum();
    let fz_abs: f64 = rec.reactions.iter().filter(|(d, _)| d % 2 == 1).map(|(_, v)| v.abs()).sum();
    assert!(fz.abs() <= 1e-6 * fz_abs, "{fz:e} vs {fz_abs:e}");
    assert_eq!(rec.u.len(), model.n_dofs());
}

#[test]
fn total_and_updated_agree_on_coarse_mesh() {
    let cfg = RunConfig { n_r: 2, n_z: 3, steps: 4, ubar: 0.3, ..RunConfig::default() };
    let (_, ul) = benchmark_records(&cfg).unwrap();
    let (_, tl) = benchmark_records(&RunConfig { formulation: Formulation::TL, ..cfg }).unwrap();
    for (a, b) in ul.iter().zip(&tl) {
        let scale = a.u.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let d = a.u.iter().zip(&b.u).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(d <= 1e-9 * scale);
    }
}
