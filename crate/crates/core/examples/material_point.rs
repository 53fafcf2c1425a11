//! Drives the return map along a hydrostatic compression ramp followed by shear,
//! then checks one plastic step against forward-Euler sub-stepping.

use axifep::material_mcc::{invariants, return_map_strain, MatParams, RM_TOL};
use axifep::oracles::substep_integrate;
use axifep::tensor::Mat3;

fn main() -> axifep::Result<()> {
    let mp = MatParams::benchmark();
    let mut eps_e = Mat3::zeros();
    let mut z = 0.0;
    let mut prev = Mat3::zeros();
    println!("{:>4} {:>13} {:>13} {:>11} {:>6}", "row", "p", "q", "z", "yield");
    for k in 0..=30 {
        let t = k as f64 / 30.0;
        let vol = -0.16 * t.min(0.5) * 2.0;
        let shear = 0.06 * (2.0 * t - 1.0).max(0.0);
        let total = Mat3::new(vol / 3.0, shear, 0.0, shear, vol / 3.0, 0.0, 0.0, 0.0, vol / 3.0);
        let (st, _) = return_map_strain(&(eps_e + total - prev), z, &mp, RM_TOL)?;
        let inv = invariants(&st.zeta);
        println!("{k:>4} {:>13.5e} {:>13.5e} {:>11.4e} {:>6}", inv.p, inv.q, st.z, st.yielded);
        eps_e = st.eps_e;
        z = st.z;
        prev = total;
    }

    let start = eps_e;
    let trial = start + Mat3::new(-1e-3, 5e-4, 0.0, 5e-4, 0.0, 0.0, 0.0, 0.0, 2e-4);
    let (st, _) = return_map_strain(&trial, z, &mp, RM_TOL)?;
    let sub = substep_integrate(&[start, trial], z, &mp, 10_000)?;
    let rel = (st.zeta - sub.zeta).abs().max() / sub.zeta.abs().max();
    println!("\nreturn map vs 1e4 sub-steps: zeta rel diff {rel:.2e}, z diff {:.2e}", (st.z - sub.z).abs());
    Ok(())
}
