//! Hencky-type hyperelasticity with Modified Cam-Clay plasticity.
//!
//! All tensors here are symmetric components in an orthonormal frame (the hat
//! form of [`crate::kinematics`]). Stresses are tensile positive; the initial
//! consolidation pressure is stored negative so the yield ellipse spans the
//! compressive side `p in [p_c, 0]`.

use nalgebra::{SMatrix, SVector};

use crate::error::{AxiError, Result};
use crate::tensor::{
    ddot, flatten, hencky_modulus, identity_sym, left_apply, outer, sym, sym_eigen, Mat3, Spectral, T4, V9,
};

pub const RM_TOL: f64 = 1e-10;
pub const RM_MAX_ITER: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatParams {
    pub e: f64,
    pub nu: f64,
    pub k: f64,
    pub g: f64,
    pub h: f64,
    pub kappa: f64,
    pub alpha_h: f64,
    pub m: f64,
    /// Signed initial consolidation pressure (negative).
    pub pc0: f64,
}

impl MatParams {
    /// `pc0_magnitude` is the positive tabulated value; it is stored negated.
    pub fn new(e: f64, nu: f64, h: f64, kappa: f64, alpha_h: f64, m: f64, pc0_magnitude: f64) -> Result<Self> {
        let bad = |m: &str| Err(AxiError::Invalid(m.to_string()));
        if !(e > 0.0) {
            return bad("E must be positive");
        }
        if !(nu > -1.0 && nu < 0.5) {
            return bad("nu must lie in (-1, 0.5)");
        }
        if !(m > 0.0) {
            return bad("m must be positive");
        }
        if !(h >= 0.0) {
            return bad("H must be non-negative");
        }
        if !(pc0_magnitude > 0.0) {
            return bad("consolidation pressure must be non-zero");
        }
        if kappa != 0.0 && !(alpha_h > 0.0) {
            return bad("alpha must be positive when kappa is non-zero");
        }
        Ok(MatParams {
            e,
            nu,
            k: e / (3.0 * (1.0 - 2.0 * nu)),
            g: e / (2.0 * (1.0 + nu)),
            h,
            kappa,
            alpha_h,
            m,
            pc0: -pc0_magnitude.abs(),
        })
    }

    /// Boulder clay set used by the thick cylinder benchmark.
    pub fn benchmark() -> Self {
        MatParams::new(1.375e9, 0.375, 765e6, 0.0, 1.0, 1.0, 2.4e8).expect("valid constants")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Invariants {
    pub p: f64,
    pub s: Mat3,
    pub rho: f64,
    pub q: f64,
}

pub fn invariants(t: &Mat3) -> Invariants {
    let p = t.trace() / 3.0;
    let s = t - Mat3::identity() * p;
    let rho = ddot(&s, &s).sqrt();
    Invariants { p, s, rho, q: 1.5f64.sqrt() * rho }
}

pub fn hardening_energy(z: f64, p: &MatParams) -> f64 {
    if p.kappa == 0.0 {
        return 0.5 * p.h * z * z;
    }
    let e = (-p.alpha_h * z).exp() - 1.0;
    0.5 * p.h * (z * z + p.kappa / p.alpha_h * e * e)
}

/// `beta = dPsi_hard/dz`
pub fn hardening_beta(z: f64, p: &MatParams) -> f64 {
    if p.kappa == 0.0 {
        return p.h * z;
    }
    let e = (-p.alpha_h * z).exp();
    p.h * (z + p.kappa * e * (1.0 - e))
}

/// `d beta/dz`
pub fn hardening_modulus(z: f64, p: &MatParams) -> f64 {
    if p.kappa == 0.0 {
        return p.h;
    }
    let e = (-p.alpha_h * z).exp();
    p.h * (1.0 + p.kappa * p.alpha_h * e * (2.0 * e - 1.0))
}

pub fn consolidation_pressure(z: f64, p: &MatParams) -> f64 {
    p.pc0 + hardening_beta(z, p)
}

/// `(Psi, Psi_hard)`
pub fn stored_energy(eps: &Mat3, z: f64, p: &MatParams) -> (f64, f64) {
    let ev = eps.trace();
    let e = eps - Mat3::identity() * (ev / 3.0);
    (0.5 * p.k * ev * ev + p.g * ddot(&e, &e), hardening_energy(z, p))
}

pub fn zeta_stress(eps: &Mat3, p: &MatParams) -> Mat3 {
    let ev = eps.trace();
    let e = eps - Mat3::identity() * (ev / 3.0);
    Mat3::identity() * (p.k * ev) + e * (2.0 * p.g)
}

pub fn eshelby_zeta(zeta: &Mat3, psi_total: f64) -> Mat3 {
    zeta - Mat3::identity() * psi_total
}

pub fn yield_fn(xi: &Mat3, beta: f64, p: &MatParams) -> f64 {
    let inv = invariants(xi);
    let pc = p.pc0 + beta;
    (inv.q / p.m).powi(2) + inv.p * (inv.p - pc)
}

/// `dPhi/dxi`
pub fn yield_normal(xi: &Mat3, beta: f64, p: &MatParams) -> Mat3 {
    let inv = invariants(xi);
    let pc = p.pc0 + beta;
    inv.s * (3.0 / (p.m * p.m)) + Mat3::identity() * ((2.0 * inv.p - pc) / 3.0)
}

/// Converged Gauss-point constitutive state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatState {
    pub b_e: Mat3,
    pub eps_e: Mat3,
    pub z: f64,
    pub zeta: Mat3,
    pub j_e: f64,
    pub beta: f64,
    pub dgamma: f64,
    pub phi: f64,
    pub yielded: bool,
    pub iters: usize,
}

impl MatState {
    pub fn natural() -> Self {
        MatState {
            b_e: Mat3::identity(),
            eps_e: Mat3::zeros(),
            z: 0.0,
            zeta: Mat3::zeros(),
            j_e: 1.0,
            beta: 0.0,
            dgamma: 0.0,
            phi: 0.0,
            yielded: false,
            iters: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentPack {
    /// `d zeta / d eps_tr`
    pub d_alg: T4,
    /// `d eps_e / d eps_tr`
    pub de_detr: T4,
}

struct Pt {
    zeta: [f64; 3],
    p: f64,
    s: [f64; 3],
    pc: f64,
    beta: f64,
    dbeta: f64,
    phi: f64,
    n: [f64; 3],
}

fn eval_principal(eps: &[f64; 3], z: f64, mp: &MatParams) -> Pt {
    let ev = eps[0] + eps[1] + eps[2];
    let e = [eps[0] - ev / 3.0, eps[1] - ev / 3.0, eps[2] - ev / 3.0];
    let ee = e[0] * e[0] + e[1] * e[1] + e[2] * e[2];
    let psi = 0.5 * mp.k * ev * ev + mp.g * ee + hardening_energy(z, mp);
    let zeta = [0, 1, 2].map(|i| mp.k * ev + 2.0 * mp.g * e[i]);
    let p = mp.k * ev - psi;
    let s = [0, 1, 2].map(|i| 2.0 * mp.g * e[i]);
    let beta = hardening_beta(z, mp);
    let pc = mp.pc0 + beta;
    let q2 = 1.5 * (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]);
    let m2 = mp.m * mp.m;
    let phi = q2 / m2 + p * (p - pc);
    let n = [0, 1, 2].map(|i| 3.0 * s[i] / m2 + (2.0 * p - pc) / 3.0);
    Pt { zeta, p, s, pc, beta, dbeta: hardening_modulus(z, mp), phi, n }
}

/// Return map from a trial elastic left Cauchy-Green tensor.
pub fn return_map(b_trial: &Mat3, z_prev: f64, mp: &MatParams, tol: f64) -> Result<(MatState, TangentPack)> {
    let sp = sym_eigen(&sym(b_trial));
    if let Some(&bad) = sp.vals.iter().find(|&&l| !(l > 0.0)) {
        return Err(AxiError::State(bad));
    }
    let eps = sp.vals.map(|l| 0.5 * l.ln());
    return_map_principal(&Spectral { vals: eps, vecs: sp.vecs }, z_prev, mp, tol)
}

/// Return map from a trial logarithmic elastic strain.
pub fn return_map_strain(eps_trial: &Mat3, z_prev: f64, mp: &MatParams, tol: f64) -> Result<(MatState, TangentPack)> {
    return_map_principal(&sym_eigen(&sym(eps_trial)), z_prev, mp, tol)
}

fn return_map_principal(tr: &Spectral, z_n: f64, mp: &MatParams, tol: f64) -> Result<(MatState, TangentPack)> {
    let eps_tr = tr.vals;
    let trial = eval_principal(&eps_tr, z_n, mp);
    if trial.phi <= 0.0 {
        let de = hencky_modulus(mp.k, mp.g);
        let state = finish(tr, &eps_tr, z_n, &trial, 0.0, false, 0);
        return Ok((state, TangentPack { d_alg: de, de_detr: identity_sym() }));
    }

    // unknowns (eps_1, eps_2, eps_3, z, g) with dgamma = g / |pc0|
    let c = 1.0 / mp.pc0.abs();
    let pc2 = mp.pc0 * mp.pc0;
    let mut x = SVector::<f64, 5>::new(eps_tr[0], eps_tr[1], eps_tr[2], z_n, 0.0);
    let resid = |x: &SVector<f64, 5>| -> (SVector<f64, 5>, Pt) {
        let e = [x[0], x[1], x[2]];
        let pt = eval_principal(&e, x[3], mp);
        let mut r = SVector::<f64, 5>::zeros();
        for i in 0..3 {
            r[i] = e[i] - eps_tr[i] + c * x[4] * pt.n[i];
        }
        r[3] = x[3] - z_n - c * x[4] * pt.p;
        r[4] = pt.phi / pc2;
        (r, pt)
    };

    let (mut r, mut pt) = resid(&x);
    let mut norm = r.norm();
    let mut polished = false;
    let mut iters = 0;
    loop {
        if norm <= tol {
            if polished || norm == 0.0 {
                break;
            }
            polished = true;
        }
        if iters >= RM_MAX_ITER {
            return Err(AxiError::Constitutive { iters, residual: norm, at: None });
        }
        iters += 1;
        let g = x[4];
        let m6 = 6.0 * mp.g / (mp.m * mp.m);
        let two_p_pc = 2.0 * pt.p - pt.pc;
        let mut jac = SMatrix::<f64, 5, 5>::zeros();
        for i in 0..3 {
            for j in 0..3 {
                let dn = m6 * (if i == j { 1.0 } else { 0.0 } - 1.0 / 3.0) + 2.0 / 3.0 * (mp.k - pt.zeta[j]);
                jac[(i, j)] = if i == j { 1.0 } else { 0.0 } + c * g * dn;
            }
            jac[(i, 3)] = c * g * (-(2.0 / 3.0) * pt.beta - pt.dbeta / 3.0);
            jac[(i, 4)] = c * pt.n[i];
        }
        for j in 0..3 {
            jac[(3, j)] = -c * g * (mp.k - pt.zeta[j]);
            jac[(4, j)] = (m6 * pt.s[j] + two_p_pc * (mp.k - pt.zeta[j])) / pc2;
        }
        jac[(3, 3)] = 1.0 + c * g * pt.beta;
        jac[(3, 4)] = -c * pt.p;
        jac[(4, 3)] = (-two_p_pc * pt.beta - pt.p * pt.dbeta) / pc2;
        jac[(4, 4)] = 0.0;

        let dx = jac
            .lu()
            .solve(&(-r))
            .ok_or(AxiError::Constitutive { iters, residual: norm, at: None })?;
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let xt = x + dx * step;
            let (rt, ptt) = resid(&xt);
            let nt = rt.norm();
            if nt.is_finite() && (nt < norm || polished || step < 1.0 / 1024.0) {
                x = xt;
                r = rt;
                pt = ptt;
                norm = nt;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            return Err(AxiError::Constitutive { iters, residual: norm, at: None });
        }
    }
    let dgamma = c * x[4];
    if dgamma < 0.0 {
        return Err(AxiError::Consistency(dgamma));
    }
    let eps = [x[0], x[1], x[2]];
    let state = finish(tr, &eps, x[3], &pt, dgamma, true, iters);
    let tang = plastic_tangent(&state, &tr.compose_vals(&pt.n), pt.p, pt.beta, pt.dbeta, dgamma, mp)?;
    Ok((state, tang))
}

fn finish(tr: &Spectral, eps: &[f64; 3], z: f64, pt: &Pt, dgamma: f64, yielded: bool, iters: usize) -> MatState {
    MatState {
        b_e: tr.compose_vals(&eps.map(|e| (2.0 * e).exp())),
        eps_e: tr.compose_vals(eps),
        z,
        zeta: tr.compose_vals(&pt.zeta),
        j_e: (eps[0] + eps[1] + eps[2]).exp(),
        beta: pt.beta,
        dgamma,
        phi: pt.phi,
        yielded,
        iters,
    }
}

/// Strain-driven linear system of the return map, inverted for `d eps_e / d eps_tr`.
fn plastic_tangent(
    st: &MatState,
    n: &Mat3,
    p_xi: f64,
    beta: f64,
    dbeta: f64,
    dgamma: f64,
    mp: &MatParams,
) -> Result<TangentPack> {
    let id = Mat3::identity();
    let one = outer(&id, &id);
    let isym = identity_sym();
    let de = hencky_modulus(mp.k, mp.g);
    let varsigma = de - outer(&id, &st.zeta);
    let xi_z = id * (-beta);
    let phi_xx = (isym - one / 3.0) * (3.0 / (mp.m * mp.m)) + one * (2.0 / 9.0);
    let phi_xb = id * (-1.0 / 3.0);

    let mut a = SMatrix::<f64, 11, 11>::zeros();
    let e11 = T4::identity() + phi_xx * varsigma * dgamma;
    let e12: V9 = (phi_xx * flatten(&xi_z) + flatten(&phi_xb) * dbeta) * dgamma;
    let e13 = flatten(n);
    let e21 = left_apply(&phi_xb, &varsigma) * dgamma;
    let e22 = 1.0 + dgamma * ddot(&phi_xb, &xi_z);
    let e31 = left_apply(n, &varsigma);
    let e32 = ddot(n, &xi_z) - p_xi * dbeta;
    a.fixed_view_mut::<9, 9>(0, 0).copy_from(&e11);
    a.fixed_view_mut::<9, 1>(0, 9).copy_from(&e12);
    a.fixed_view_mut::<9, 1>(0, 10).copy_from(&e13);
    a.fixed_view_mut::<1, 9>(9, 0).copy_from(&flatten(&e21).transpose());
    a[(9, 9)] = e22;
    a[(9, 10)] = -p_xi;
    a.fixed_view_mut::<1, 9>(10, 0).copy_from(&flatten(&e31).transpose());
    a[(10, 9)] = e32;
    a[(10, 10)] = 0.0;

    // column scaling of the multiplier keeps the pivots comparable
    let sc = mp.pc0.abs();
    for i in 0..11 {
        a[(i, 10)] *= sc;
    }
    let inv = a.try_inverse().ok_or(AxiError::Singular(0))?;
    let de_detr: T4 = inv.fixed_view::<9, 9>(0, 0).into_owned() * isym;
    Ok(TangentPack { d_alg: de * de_detr, de_detr })
}

/// Finite-difference check of the return-map tangents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdCheck {
    pub h: f64,
    /// Max error of `D_alg` relative to its largest entry.
    pub err_d_alg: f64,
    /// Max error of `d eps_e / d eps_tr` relative to its largest entry.
    pub err_de: f64,
}

pub fn tangent_fd_check(b_trial: &Mat3, z_prev: f64, mp: &MatParams, h: f64) -> Result<FdCheck> {
    let eps_tr = sym_eigen(&sym(b_trial)).compose(|l| 0.5 * l.ln());
    tangent_fd_check_strain(&eps_tr, z_prev, mp, h)
}

pub fn tangent_fd_check_strain(eps_tr: &Mat3, z_prev: f64, mp: &MatParams, h: f64) -> Result<FdCheck> {
    let (_, tp) = return_map_strain(eps_tr, z_prev, mp, RM_TOL)?;
    let (mut ed, mut ee) = (0.0_f64, 0.0_f64);
    let sd = tp.d_alg.abs().max();
    let se = tp.de_detr.abs().max();
    for k in 0..3 {
        for l in k..3 {
            let mut dir = Mat3::zeros();
            dir[(k, l)] = 1.0;
            dir[(l, k)] = 1.0;
            let (sp, _) = return_map_strain(&(eps_tr + dir * h), z_prev, mp, RM_TOL)?;
            let (sm, _) = return_map_strain(&(eps_tr - dir * h), z_prev, mp, RM_TOL)?;
            let fd_z = (sp.zeta - sm.zeta) / (2.0 * h);
            let fd_e = (sp.eps_e - sm.eps_e) / (2.0 * h);
            let an_z = crate::tensor::apply(&tp.d_alg, &dir);
            let an_e = crate::tensor::apply(&tp.de_detr, &dir);
            ed = ed.max((fd_z - an_z).abs().max() / sd);
            ee = ee.max((fd_e - an_e).abs().max() / se);
        }
    }
    Ok(FdCheck { h, err_d_alg: ed, err_de: ee })
}
