//! Central finite differences of the assembled residual against the consistent
//! stiffness, at the converged mid-ramp state of the benchmark.

use axifep::app_cli::verify::benchmark_records;
use axifep::app_cli::RunConfig;
use axifep::fem_axisym::Formulation;
use axifep::oracles::fd_global_stiffness;

fn main() -> axifep::Result<()> {
    for form in [Formulation::UL, Formulation::TL] {
        let cfg = RunConfig { formulation: form, steps: 30, ..RunConfig::default() };
        let (model, recs) = benchmark_records(&cfg)?;
        let (prev, cur) = (&recs[13], &recs[14]);
        for scale in [1e-5, 1e-6, 1e-7, 1e-8] {
            let h = scale * model.mesh.size();
            let r = fd_global_stiffness(&model, form, &prev.states, &cur.u, &prev.u, h)?;
            println!("{form:?} step {} h = {h:.1e}: max rel err {:.3e} at {:?}", cur.step, r.max_rel_err, r.worst);
        }
    }
    Ok(())
}
