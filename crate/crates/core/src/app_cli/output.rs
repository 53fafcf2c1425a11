//! CSV and legacy VTK writers. Forces and volumes are per radian.

use std::fmt::Write as _;

use crate::fem_axisym::{ElemStates, MeshAxi};

pub const CONVERGENCE_HEADER: &str = "step,t_frac,iteration,err";
pub const TRACK_HEADER: &str = "step,t_frac,ubar_t,label,u_r,p_sigma,rho_sigma,j_e,j_p,j,yielded";
pub const SUMMARY_HEADER: &str =
    "formulation,steps,increments,min_iterations,max_iterations,avg_iterations,total_iterations,bisected_steps";

/// Fixed-width scientific format so repeated runs give identical bytes.
pub fn f(v: f64) -> String {
    format!("{v:.12e}")
}

/// Legacy ASCII unstructured grid on the reference configuration.
///
/// Point data: displacement `(u_r, u_z, 0)`. Cell data: Gauss-point averages of
/// `-p_sigma` and `J`.
pub fn vtk_string(mesh: &MeshAxi, u: &[f64], states: &[ElemStates], title: &str) -> String {
    let mut s = String::new();
    let n = mesh.nodes.len();
    let ne = mesh.elems.len();
    writeln!(s, "# vtk DataFile Version 3.0\n{title}\nASCII\nDATASET UNSTRUCTURED_GRID").unwrap();
    writeln!(s, "POINTS {n} double").unwrap();
    for p in &mesh.nodes {
        writeln!(s, "{} {} 0", f(p[0]), f(p[1])).unwrap();
    }
    writeln!(s, "CELLS {ne} {}", ne * 9).unwrap();
    for e in &mesh.elems {
        let ids: Vec<String> = e.iter().map(|i| i.to_string()).collect();
        writeln!(s, "8 {}", ids.join(" ")).unwrap();
    }
    writeln!(s, "CELL_TYPES {ne}").unwrap();
    for _ in 0..ne {
        writeln!(s, "23").unwrap();
    }
    writeln!(s, "CELL_DATA {ne}\nSCALARS neg_pressure double 1\nLOOKUP_TABLE default").unwrap();
    for st in states {
        let v = st.iter().map(|g| -g.cauchy_pressure()).sum::<f64>() / st.len() as f64;
        writeln!(s, "{}", f(v)).unwrap();
    }
    writeln!(s, "SCALARS jacobian double 1\nLOOKUP_TABLE default").unwrap();
    for st in states {
        let v = st.iter().map(|g| g.j).sum::<f64>() / st.len() as f64;
        writeln!(s, "{}", f(v)).unwrap();
    }
    writeln!(s, "POINT_DATA {n}\nVECTORS displacement double").unwrap();
    for i in 0..n {
        writeln!(s, "{} {} 0", f(u[2 * i]), f(u[2 * i + 1])).unwrap();
    }
    s
}
