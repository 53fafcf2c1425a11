//! Residual and consistent stiffness for the updated and total Lagrangian forms.
//!
//! Integrals are per radian: the `2 pi` factor is dropped everywhere.

use nalgebra::{Matrix2, SMatrix};
use rayon::prelude::*;

use super::mesh::MeshAxi;
use super::q8::{gauss_3x3, q8_shape};
use super::sparse::CsrMatrix;
use crate::cylgeo::{christoffel, covariant_derivative_vector, shape_grad, shifter, R, Z};
use crate::error::{AxiError, Result};
use crate::kinematics::{
    defgrad_inverse_spatial, defgrad_total, hat_to_mixed, hat_to_mixed_lower, mixed_to_hat, trial_elastic_b, DefGrad,
};
use crate::material_mcc::{return_map, MatParams, MatState, TangentPack, RM_TOL};
use crate::tensor::{ddot, dlog, flatten, ix, sym, sym_eigen, Mat3, T4, V9};

pub const NGP: usize = 9;
const DIRS: [usize; 2] = [R, Z];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    UL,
    TL,
}

impl std::str::FromStr for Formulation {
    type Err = AxiError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "UL" => Ok(Formulation::UL),
            "TL" => Ok(Formulation::TL),
            _ => Err(AxiError::Invalid(format!("unknown formulation '{s}'"))),
        }
    }
}

/// Reference-configuration data of one Gauss point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpGeom {
    pub xi: [f64; 2],
    pub weight: f64,
    pub psi: [f64; 8],
    pub dpsi_dxi: [[f64; 2]; 8],
    /// `d psi / d(R, Z)`
    pub dpsi_dx0: [[f64; 2]; 8],
    pub r0: f64,
    pub z0: f64,
    /// `R w det(dX/dxi)`
    pub dv0: f64,
}

/// Converged state at a Gauss point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpState {
    /// Total deformation gradient, reference radius to current radius.
    pub f: DefGrad,
    /// Elastic left Cauchy-Green tensor, mixed components at `f.r_cur`.
    pub b_e: Mat3,
    pub mat: MatState,
    pub j: f64,
    pub j_p: f64,
}

impl GpState {
    pub fn natural(r0: f64) -> Self {
        GpState { f: DefGrad::identity(r0), b_e: Mat3::identity(), mat: MatState::natural(), j: 1.0, j_p: 1.0 }
    }

    pub fn radius(&self) -> f64 {
        self.f.r_cur
    }

    /// Cauchy pressure `tr(sigma)/3` with `sigma = zeta / J_e`.
    pub fn cauchy_pressure(&self) -> f64 {
        self.mat.zeta.trace() / (3.0 * self.mat.j_e)
    }

    /// Norm of the Cauchy deviator.
    pub fn cauchy_rho(&self) -> f64 {
        let s = self.mat.zeta / self.mat.j_e;
        let d = s - Mat3::identity() * (s.trace() / 3.0);
        ddot(&d, &d).sqrt()
    }
}

pub type ElemStates = [GpState; NGP];

#[derive(Debug, Clone)]
pub struct Model {
    pub mesh: MeshAxi,
    pub params: MatParams,
    pub gps: Vec<[GpGeom; NGP]>,
    pub rm_tol: f64,
    pattern: CsrMatrix,
}

impl Model {
    pub fn new(mesh: MeshAxi, params: MatParams) -> Result<Self> {
        let mut gps = Vec::with_capacity(mesh.elems.len());
        for e in 0..mesh.elems.len() {
            let xe = mesh.elem_coords(e);
            let mut arr = [None; NGP];
            for (k, (x, y, w)) in gauss_3x3().into_iter().enumerate() {
                let sh = q8_shape([x, y]);
                let (jinv, det) = inv_jac(&sh.partials, &xe).map_err(|er| er.at(e, k))?;
                let dpsi_dx0 = spatial(&sh.partials, &jinv);
                let r0: f64 = (0..8).map(|n| sh.values[n] * xe[n][0]).sum();
                let z0: f64 = (0..8).map(|n| sh.values[n] * xe[n][1]).sum();
                if !(r0 > 0.0) {
                    return Err(AxiError::Domain { radius: r0 });
                }
                arr[k] = Some(GpGeom {
                    xi: [x, y],
                    weight: w,
                    psi: sh.values,
                    dpsi_dxi: sh.partials,
                    dpsi_dx0,
                    r0,
                    z0,
                    dv0: r0 * w * det,
                });
            }
            gps.push(arr.map(|g| g.expect("all points filled")));
        }
        let pattern = CsrMatrix::from_connectivity(mesh.nodes.len(), &mesh.elems);
        Ok(Model { mesh, params, gps, rm_tol: RM_TOL, pattern })
    }

    pub fn n_dofs(&self) -> usize {
        self.mesh.n_dofs()
    }

    pub fn initial_states(&self) -> Vec<ElemStates> {
        self.gps.iter().map(|g| g.map(|gp| GpState::natural(gp.r0))).collect()
    }

    pub fn pattern(&self) -> &CsrMatrix {
        &self.pattern
    }

    /// Nearest Gauss point `(element, local)` to a reference position.
    pub fn nearest_gp(&self, r: f64, z: f64) -> (usize, usize) {
        let mut best = (0, 0, f64::INFINITY);
        for (e, arr) in self.gps.iter().enumerate() {
            for (k, g) in arr.iter().enumerate() {
                let d = (g.r0 - r).powi(2) + (g.z0 - z).powi(2);
                if d < best.2 {
                    best = (e, k, d);
                }
            }
        }
        (best.0, best.1)
    }

    /// Interpolated displacement `(u_r, u_z)` at a Gauss point.
    pub fn gp_displacement(&self, u: &[f64], e: usize, k: usize) -> [f64; 2] {
        let g = &self.gps[e][k];
        let mut out = [0.0; 2];
        for (n, &node) in self.mesh.elems[e].iter().enumerate() {
            for d in 0..2 {
                out[d] += g.psi[n] * u[2 * node + d];
            }
        }
        out
    }
}

fn inv_jac(dpsi: &[[f64; 2]; 8], x: &[[f64; 2]; 8]) -> Result<(Matrix2<f64>, f64)> {
    // J[a][j] = d x^a / d xi^j
    let mut j = Matrix2::zeros();
    for n in 0..8 {
        for a in 0..2 {
            for jj in 0..2 {
                j[(a, jj)] += x[n][a] * dpsi[n][jj];
            }
        }
    }
    let det = j.determinant();
    if !(det > 0.0) {
        return Err(AxiError::Inverted { det, at: None });
    }
    Ok((j.try_inverse().ok_or(AxiError::Inverted { det, at: None })?, det))
}

fn spatial(dpsi: &[[f64; 2]; 8], jinv: &Matrix2<f64>) -> [[f64; 2]; 8] {
    let mut out = [[0.0; 2]; 8];
    for n in 0..8 {
        for a in 0..2 {
            out[n][a] = dpsi[n][0] * jinv[(0, a)] + dpsi[n][1] * jinv[(1, a)];
        }
    }
    out
}

/// Output of one Gauss-point evaluation.
#[derive(Debug, Clone)]
pub struct GpEval {
    /// Spatial shape-gradient blocks in hat components, indexed `[node][dir]`.
    pub g_sp: [[Mat3; 2]; 8],
    /// Internal force contributions per unit `dV0` (already multiplied by `J_p`).
    pub f: [f64; 16],
    pub state: GpState,
    pub tangent: TangentPack,
    pub b_trial_hat: Mat3,
}

fn eval_gp(
    model: &Model,
    form: Formulation,
    geo: &GpGeom,
    st: &GpState,
    ue: &[[f64; 2]; 8],
    une: &[[f64; 2]; 8],
    xe: &[[f64; 2]; 8],
) -> Result<GpEval> {
    let psi = &geo.psi;
    let interp = |v: &[[f64; 2]; 8], d: usize| -> f64 { (0..8).map(|n| psi[n] * v[n][d]).sum() };
    let mut g_mixed = [[Mat3::zeros(); 2]; 8];
    let mut f_int = [0.0; 16];
    let (f, x_inc, r, finv_tl);
    match form {
        Formulation::UL => {
            let xcur: [[f64; 2]; 8] = std::array::from_fn(|n| [xe[n][0] + ue[n][0], xe[n][1] + ue[n][1]]);
            let (jinv, _) = inv_jac(&geo.dpsi_dxi, &xcur)?;
            let dx = spatial(&geo.dpsi_dxi, &jinv);
            r = geo.r0 + interp(ue, 0);
            let chr = christoffel(r)?;
            let mut upart = Mat3::zeros();
            for n in 0..8 {
                for (d, &dir) in DIRS.iter().enumerate() {
                    g_mixed[n][d] = shape_grad(psi[n], dx[n], &chr, dir);
                    upart += g_mixed[n][d] * (ue[n][d] - une[n][d]);
                }
            }
            let r_n = st.f.r_cur;
            let xinv = defgrad_inverse_spatial(&upart, &shifter(r_n, r)?.inverse())?;
            let xi = xinv.try_inverse().ok_or(AxiError::Inverted { det: 0.0, at: None })?;
            x_inc = DefGrad::new(xi, r_n, r)?;
            let fc = x_inc.compose(&st.f);
            f = DefGrad::new(fc.comp, fc.r_ref, fc.r_cur)?;
            finv_tl = None;
        }
        Formulation::TL => {
            let big_r = geo.r0;
            r = big_r + interp(ue, 0);
            let chr_ref = christoffel(big_r)?;
            let chr = christoffel(r)?;
            let mut part = Mat3::zeros();
            for n in 0..8 {
                for (d, &dir) in DIRS.iter().enumerate() {
                    part[(dir, R)] += ue[n][d] * geo.dpsi_dx0[n][0];
                    part[(dir, Z)] += ue[n][d] * geo.dpsi_dx0[n][1];
                    g_mixed[n][d] = shape_grad(psi[n], geo.dpsi_dx0[n], &chr, dir);
                }
            }
            let upart = covariant_derivative_vector(&part, &[interp(ue, 0), 0.0, interp(ue, 1)], &chr_ref);
            f = defgrad_total(&upart, &shifter(big_r, r)?)?;
            x_inc = f.compose(&st.f.inverse()?);
            let finv = f.inverse()?.comp;
            for n in 0..8 {
                for d in 0..2 {
                    g_mixed[n][d] *= finv;
                }
            }
            finv_tl = Some(finv);
        }
    }

    let b_tr = sym(&mixed_to_hat(&trial_elastic_b(&x_inc, &st.b_e), r));
    let (ms, tp) = return_map(&b_tr, st.mat.z, &model.params, model.rm_tol)?;
    let j = f.jacobian();
    let j_p = j / ms.j_e;
    let g_sp: [[Mat3; 2]; 8] = std::array::from_fn(|n| [0, 1].map(|d| mixed_to_hat(&g_mixed[n][d], r)));

    match finv_tl {
        None => {
            for n in 0..8 {
                for d in 0..2 {
                    f_int[2 * n + d] = j_p * ddot(&g_sp[n][d], &ms.zeta);
                }
            }
        }
        Some(finv) => {
            // first Piola-Kirchhoff route: P_a^A = J_p zeta_a^b (F^-1)^A_b
            let zeta_m = hat_to_mixed_lower(&ms.zeta, r);
            let p = zeta_m * finv.transpose() * j_p;
            for n in 0..8 {
                for d in 0..2 {
                    let g_ref = g_mixed[n][d] * f.comp;
                    f_int[2 * n + d] = ddot(&g_ref, &p);
                }
            }
        }
    }
    let state = GpState { f, b_e: hat_to_mixed(&ms.b_e, r), mat: ms, j, j_p };
    Ok(GpEval { g_sp, f: f_int, state, tangent: tp, b_trial_hat: b_tr })
}

/// Spatial fourth-order tensor of the linearised internal force, hat components.
pub fn spatial_tangent(zeta: &Mat3, j_p: f64, tp: &TangentPack, b_trial_hat: &Mat3) -> T4 {
    let l = dlog(&sym_eigen(b_trial_hat));
    let mut bb = T4::zeros();
    for g in 0..3 {
        for h in 0..3 {
            for c in 0..3 {
                for d in 0..3 {
                    let mut v = 0.0;
                    if g == c {
                        v += b_trial_hat[(d, h)];
                    }
                    if h == c {
                        v += b_trial_hat[(g, d)];
                    }
                    bb[(ix(g, h), ix(c, d))] = v;
                }
            }
        }
    }
    let mut t = V9::zeros();
    for m in 0..3 {
        t += tp.de_detr.row(ix(m, m)).transpose();
    }
    let q = tp.d_alg - flatten(zeta) * t.transpose();
    let mut a = q * (l * bb) * 0.5;
    for aa in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                for d in 0..3 {
                    let mut v = 0.0;
                    if c == b {
                        v -= zeta[(aa, d)];
                    }
                    if c == d {
                        v += zeta[(aa, b)];
                    }
                    a[(ix(aa, b), ix(c, d))] += v;
                }
            }
        }
    }
    a * j_p
}

pub struct ElemOut {
    pub fe: [f64; 16],
    pub ke: Option<SMatrix<f64, 16, 16>>,
    pub states: ElemStates,
}

pub fn element(
    model: &Model,
    form: Formulation,
    e: usize,
    states: &ElemStates,
    u: &[f64],
    u_n: &[f64],
    want_k: bool,
) -> Result<ElemOut> {
    let conn = &model.mesh.elems[e];
    let xe = model.mesh.elem_coords(e);
    let ue: [[f64; 2]; 8] = conn.map(|n| [u[2 * n], u[2 * n + 1]]);
    let une: [[f64; 2]; 8] = conn.map(|n| [u_n[2 * n], u_n[2 * n + 1]]);
    let mut fe = [0.0; 16];
    let mut ke = want_k.then(SMatrix::<f64, 16, 16>::zeros);
    let mut out_states = *states;
    for k in 0..NGP {
        let geo = &model.gps[e][k];
        let ev = eval_gp(model, form, geo, &states[k], &ue, &une, &xe).map_err(|er| er.at(e, k))?;
        for i in 0..16 {
            fe[i] += ev.f[i] * geo.dv0;
        }
        if let Some(km) = ke.as_mut() {
            let a = spatial_tangent(&ev.state.mat.zeta, ev.state.j_p, &ev.tangent, &ev.b_trial_hat);
            let ag: Vec<V9> = (0..16).map(|j| a * flatten(&ev.g_sp[j / 2][j % 2])).collect();
            for i in 0..16 {
                let gi = flatten(&ev.g_sp[i / 2][i % 2]);
                for j in 0..16 {
                    km[(i, j)] += gi.dot(&ag[j]) * geo.dv0;
                }
            }
        }
        out_states[k] = ev.state;
    }
    Ok(ElemOut { fe, ke, states: out_states })
}

pub struct Assembly {
    pub residual: Vec<f64>,
    pub stiffness: Option<CsrMatrix>,
    pub states: Vec<ElemStates>,
}

/// Global internal-force residual (no external loads) and optional stiffness.
pub fn assemble(
    model: &Model,
    form: Formulation,
    states: &[ElemStates],
    u: &[f64],
    u_n: &[f64],
    want_k: bool,
) -> Result<Assembly> {
    let outs: Vec<Result<ElemOut>> = (0..model.mesh.elems.len())
        .into_par_iter()
        .map(|e| element(model, form, e, &states[e], u, u_n, want_k))
        .collect();
    let mut residual = vec![0.0; model.n_dofs()];
    let mut k = want_k.then(|| {
        let mut m = model.pattern.clone();
        m.clear();
        m
    });
    let mut new_states = Vec::with_capacity(outs.len());
    for (e, out) in outs.into_iter().enumerate() {
        let out = out?;
        let conn = &model.mesh.elems[e];
        let dof = |i: usize| 2 * conn[i / 2] + i % 2;
        for i in 0..16 {
            residual[dof(i)] += out.fe[i];
        }
        if let (Some(km), Some(ke)) = (k.as_mut(), out.ke.as_ref()) {
            for i in 0..16 {
                for j in 0..16 {
                    km.add(dof(i), dof(j), ke[(i, j)]);
                }
            }
        }
        new_states.push(out.states);
    }
    Ok(Assembly { residual, stiffness: k, states: new_states })
}

pub fn assemble_ul(model: &Model, states: &[ElemStates], u: &[f64], u_n: &[f64], want_k: bool) -> Result<Assembly> {
    assemble(model, Formulation::UL, states, u, u_n, want_k)
}

pub fn assemble_tl(model: &Model, states: &[ElemStates], u: &[f64], want_k: bool) -> Result<Assembly> {
    assemble(model, Formulation::TL, states, u, u, want_k)
}

/// `zeta` with mixed components `zeta_a^b`.
pub fn zeta_mixed(st: &GpState) -> Mat3 {
    hat_to_mixed_lower(&st.mat.zeta, st.radius())
}
