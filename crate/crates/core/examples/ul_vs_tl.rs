//! Runs the benchmark with both discrete functionals and compares the converged
//! displacements step by step.

use axifep::app_cli::RunConfig;
use axifep::app_cli::verify::benchmark_records;
use axifep::fem_axisym::Formulation;

fn main() -> axifep::Result<()> {
    let base = RunConfig::default();
    let (_, ul) = benchmark_records(&RunConfig { formulation: Formulation::UL, ..base.clone() })?;
    let (_, tl) = benchmark_records(&RunConfig { formulation: Formulation::TL, ..base })?;
    println!("step  max|u_UL|     max|u_UL - u_TL|  relative");
    for (a, b) in ul.iter().zip(&tl) {
        let scale = a.u.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let d = a.u.iter().zip(&b.u).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
        println!("{:>4}  {scale:.6e}  {d:.3e}         {:.3e}", a.step, d / scale);
    }
    Ok(())
}
