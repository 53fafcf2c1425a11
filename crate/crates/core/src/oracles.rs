//! Brute-force reference computations used by the tests and `axifep verify`.
//!
//! Nothing here calls the code it checks: the cavity fixture builds its own basis
//! matrices, the sub-stepping integrator has its own energy and yield evaluation
//! with finite-difference gradients, and the quadrature oracle has its own shape
//! functions and Gauss-Legendre rule.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{AxiError, Result};
use crate::fem_axisym::assembly::{assemble, ElemStates, Formulation, Model};
use crate::material_mcc::MatParams;

type M3 = Matrix3<f64>;

/// Uniform radial expansion `r = alpha R` of a hollow cylinder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cavity {
    pub f_cart: M3,
    pub f_cyl: M3,
    /// `det F_cart`
    pub j_cart: f64,
    /// `det F_cyl * r / R`
    pub j_cyl: f64,
}

pub fn cavity_fixture(alpha: f64, big_r: f64, theta: f64) -> Result<Cavity> {
    if !(alpha > 0.0) || !(big_r > 0.0) {
        return Err(AxiError::Invalid(format!("cavity needs alpha > 0 and R > 0, got {alpha}, {big_r}")));
    }
    let r = alpha * big_r;
    let (s, c) = theta.sin_cos();
    let f_cart = M3::new(alpha, 0.0, 0.0, 0.0, alpha, 0.0, 0.0, 0.0, 1.0);
    // d(X, Y, Z)/d(R, Theta, Z) at the reference point
    let ref_basis = M3::new(c, -big_r * s, 0.0, s, big_r * c, 0.0, 0.0, 0.0, 1.0);
    // d(r, theta, z)/d(x, y, z) at the current point
    let cur_dual = M3::new(c, s, 0.0, -s / r, c / r, 0.0, 0.0, 0.0, 1.0);
    let f_cyl = cur_dual * f_cart * ref_basis;
    Ok(Cavity { f_cart, f_cyl, j_cart: f_cart.determinant(), j_cyl: f_cyl.determinant() * r / big_r })
}

// ---------------------------------------------------------------------------
// sub-stepping constitutive integration

fn hard_energy(z: f64, mp: &MatParams) -> f64 {
    let w = (-mp.alpha_h * z).exp() - 1.0;
    let extra = if mp.kappa == 0.0 { 0.0 } else { mp.kappa / mp.alpha_h * w * w };
    0.5 * mp.h * (z * z + extra)
}

fn elastic_energy(e: &[f64; 3], mp: &MatParams) -> f64 {
    let tr = e[0] + e[1] + e[2];
    let dev2: f64 = e.iter().map(|x| (x - tr / 3.0).powi(2)).sum();
    0.5 * mp.k * tr * tr + mp.g * dev2
}

fn d1(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

fn stress(e: &[f64; 3], mp: &MatParams) -> [f64; 3] {
    let h = 1e-7;
    std::array::from_fn(|i| {
        d1(
            |t| {
                let mut x = *e;
                x[i] = t;
                elastic_energy(&x, mp)
            },
            e[i],
            h,
        )
    })
}

fn beta_of(z: f64, mp: &MatParams) -> f64 {
    d1(|t| hard_energy(t, mp), z, 1e-7)
}

fn yield_xi(xi: &[f64; 3], beta: f64, mp: &MatParams) -> f64 {
    let p = (xi[0] + xi[1] + xi[2]) / 3.0;
    let q2 = 1.5 * xi.iter().map(|x| (x - p).powi(2)).sum::<f64>();
    q2 / (mp.m * mp.m) + p * (p - (mp.pc0 + beta))
}

fn xi_of(e: &[f64; 3], z: f64, mp: &MatParams) -> [f64; 3] {
    let z_s = stress(e, mp);
    let w = elastic_energy(e, mp) + hard_energy(z, mp);
    z_s.map(|v| v - w)
}

/// Yield function in terms of principal elastic log strains and the internal variable.
pub fn yield_of_strain(e: &[f64; 3], z: f64, mp: &MatParams) -> f64 {
    yield_xi(&xi_of(e, z, mp), beta_of(z, mp), mp)
}

/// Result of explicit integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubstepResult {
    pub eps_e: M3,
    pub zeta: M3,
    pub z: f64,
    /// Accumulated plastic multiplier.
    pub gamma: f64,
    pub phi: f64,
}

/// Forward-Euler integration of the flow and hardening rules along a piecewise
/// linear elastic-strain path.
///
/// `path[0]` is the starting elastic strain; each later entry is reached by `n_sub`
/// equal increments. All path entries must share principal directions with the last.
pub fn substep_integrate(path: &[M3], z0: f64, mp: &MatParams, n_sub: usize) -> Result<SubstepResult> {
    if n_sub < 100 {
        return Err(AxiError::Invalid(format!("n_sub must be at least 100, got {n_sub}")));
    }
    let last = path.last().ok_or_else(|| AxiError::Invalid("empty strain path".into()))?;
    let eig = SymmetricEigen::new(0.5 * (last + last.transpose()));
    let v = eig.eigenvectors;
    let proj = |m: &M3| -> [f64; 3] { std::array::from_fn(|i| (v.column(i).transpose() * m * v.column(i))[(0, 0)]) };
    let pts: Vec<[f64; 3]> = path.iter().map(proj).collect();

    let mut e = pts[0];
    let mut z = z0;
    let mut gamma = 0.0;
    let hz = 1e-6;
    for seg in pts.windows(2) {
        let de: [f64; 3] = std::array::from_fn(|i| (seg[1][i] - seg[0][i]) / n_sub as f64);
        for _ in 0..n_sub {
            let trial: [f64; 3] = std::array::from_fn(|i| e[i] + de[i]);
            if yield_of_strain(&trial, z, mp) <= 0.0 {
                e = trial;
                continue;
            }
            let phi_n = yield_of_strain(&e, z, mp);
            let he = 1e-6;
            let phi_e: [f64; 3] = std::array::from_fn(|i| {
                d1(
                    |t| {
                        let mut x = e;
                        x[i] = t;
                        yield_of_strain(&x, z, mp)
                    },
                    e[i],
                    he,
                )
            });
            let phi_z = d1(|t| yield_of_strain(&e, t, mp), z, hz);
            let xi = xi_of(&e, z, mp);
            let beta = beta_of(z, mp);
            let hx = 1e-3 * mp.pc0.abs();
            let n: [f64; 3] = std::array::from_fn(|i| {
                d1(
                    |t| {
                        let mut x = xi;
                        x[i] = t;
                        yield_xi(&x, beta, mp)
                    },
                    xi[i],
                    hx,
                )
            });
            let phi_beta = d1(|t| yield_xi(&xi, t, mp), beta, hx);
            let num = phi_n + (0..3).map(|i| phi_e[i] * de[i]).sum::<f64>();
            let den = (0..3).map(|i| phi_e[i] * n[i]).sum::<f64>() + phi_z * phi_beta;
            if !(den > 0.0) {
                return Err(AxiError::Consistency(den));
            }
            let dg = num / den;
            if dg <= 0.0 {
                e = trial;
                continue;
            }
            for i in 0..3 {
                e[i] += de[i] - dg * n[i];
            }
            z -= dg * phi_beta;
            gamma += dg;
        }
    }
    let zeta_p = stress(&e, mp);
    let back = |d: [f64; 3]| -> M3 { v * M3::from_diagonal(&Vector3::from(d)) * v.transpose() };
    Ok(SubstepResult { eps_e: back(e), zeta: back(zeta_p), z, gamma, phi: yield_of_strain(&e, z, mp) })
}

/// Elastic state on the yield surface plus a small outward trial increment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlasticTrial {
    pub eps_n: M3,
    pub z_n: f64,
    pub eps_trial: M3,
}

fn random_rotation(rng: &mut ChaCha8Rng) -> M3 {
    let a = M3::from_fn(|_, _| rng.random_range(-1.0..1.0));
    a.qr().q()
}

/// Random trial states for the constitutive oracle.
///
/// Each starts on the yield surface, found by bisection along a random ray in
/// principal strain space, and adds an outward increment of norm `step_rel |eps_n|`.
pub fn random_plastic_trials(n: usize, seed: u64, step_rel: f64, mp: &MatParams) -> Vec<PlasticTrial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let z_n = rng.random_range(-0.03..0.0);
        let dir: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let at = |s: f64| dir.map(|d| s * d);
        if yield_of_strain(&at(0.0), z_n, mp) > 0.0 {
            continue;
        }
        let mut hi = 1e-4;
        while yield_of_strain(&at(hi), z_n, mp) <= 0.0 && hi < 1.0 {
            hi *= 2.0;
        }
        if hi >= 1.0 {
            continue;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if yield_of_strain(&at(mid), z_n, mp) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let e_n = at(lo);
        let xi = xi_of(&e_n, z_n, mp);
        let beta = beta_of(z_n, mp);
        let hx = 1e-3 * mp.pc0.abs();
        let n_xi: [f64; 3] = std::array::from_fn(|i| {
            d1(
                |t| {
                    let mut x = xi;
                    x[i] = t;
                    yield_xi(&x, beta, mp)
                },
                xi[i],
                hx,
            )
        });
        let nn = n_xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        let w: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let wn = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        let d: [f64; 3] = std::array::from_fn(|i| n_xi[i] / nn + 0.5 * w[i] / wn);
        let dn = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        let step = step_rel * e_n.iter().map(|x| x * x).sum::<f64>().sqrt();
        let e_tr: [f64; 3] = std::array::from_fn(|i| e_n[i] + step * d[i] / dn);
        if yield_of_strain(&e_tr, z_n, mp) <= 0.0 {
            continue;
        }
        let q = random_rotation(&mut rng);
        let rot = |p: [f64; 3]| q * M3::from_diagonal(&Vector3::from(p)) * q.transpose();
        out.push(PlasticTrial { eps_n: rot(e_n), z_n, eps_trial: rot(e_tr) });
    }
    out
}

// ---------------------------------------------------------------------------
// global finite-difference stiffness

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdReport {
    pub h: f64,
    /// `max |K_fd - K| / max |K|`
    pub max_rel_err: f64,
    /// `(row, column)` of the largest error.
    pub worst: (usize, usize),
}

/// Central differences of the assembled residual against the assembled stiffness.
pub fn fd_global_stiffness(
    model: &Model,
    form: Formulation,
    states: &[ElemStates],
    u: &[f64],
    u_n: &[f64],
    h: f64,
) -> Result<FdReport> {
    let k = assemble(model, form, states, u, u_n, true)?.stiffness.expect("stiffness requested");
    let scale = k.max_abs();
    let n = model.n_dofs();
    let mut rep = FdReport { h, max_rel_err: 0.0, worst: (0, 0) };
    let mut up = u.to_vec();
    for j in 0..n {
        up[j] = u[j] + h;
        let rp = assemble(model, form, states, &up, u_n, false)?.residual;
        up[j] = u[j] - h;
        let rm = assemble(model, form, states, &up, u_n, false)?.residual;
        up[j] = u[j];
        for i in 0..n {
            let e = ((rp[i] - rm[i]) / (2.0 * h) - k.get(i, j)).abs() / scale;
            if !e.is_finite() {
                return Err(AxiError::Solver(format!("non-finite FD entry ({i}, {j})")));
            }
            if e > rep.max_rel_err {
                rep.max_rel_err = e;
                rep.worst = (i, j);
            }
        }
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// tensor-product quadrature

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

const CORNERS: [(f64, f64); 4] = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)];

/// Serendipity values and parent derivatives, same node order as the solver.
fn serendipity(x: f64, y: f64) -> ([f64; 8], [[f64; 2]; 8]) {
    let mut v = [0.0; 8];
    let mut d = [[0.0; 2]; 8];
    for (n, &(a, b)) in CORNERS.iter().enumerate() {
        let (fa, fb) = (1.0 + a * x, 1.0 + b * y);
        v[n] = 0.25 * fa * fb * (a * x + b * y - 1.0);
        d[n] = [0.25 * a * fb * (2.0 * a * x + b * y), 0.25 * b * fa * (a * x + 2.0 * b * y)];
    }
    // midsides of edges 0-1 (y=-1), 1-2 (x=1), 2-3 (y=1), 3-0 (x=-1)
    for (k, s) in [-1.0, 1.0].into_iter().enumerate() {
        let n = 4 + 2 * k;
        v[n] = 0.5 * (1.0 - x * x) * (1.0 + s * y);
        d[n] = [-x * (1.0 + s * y), 0.5 * s * (1.0 - x * x)];
    }
    for (k, s) in [1.0, -1.0].into_iter().enumerate() {
        let n = 5 + 2 * k;
        v[n] = 0.5 * (1.0 + s * x) * (1.0 - y * y);
        d[n] = [0.5 * s * (1.0 - y * y), -y * (1.0 + s * x)];
    }
    (v, d)
}

/// Integrands known to the quadrature oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Integrand {
    /// `int R dR dZ`
    Volume,
    /// Internal force component of `(node, dir)` under `r = alpha R, z = Z`, with a
    /// uniform diagonal `zeta` (orthonormal `r, theta, z`) and plastic Jacobian `j_p`.
    FintUniformRadial { alpha: f64, zeta: [f64; 3], j_p: f64, node: usize, dir: usize },
}

/// Integral over one Q8 element with `n` points per axis (per radian).
pub fn quadrature_oracle(xe: &[[f64; 2]; 8], what: Integrand, n: usize) -> f64 {
    let gl = gauss_legendre(n);
    let mut acc = 0.0;
    for &(x, wx) in &gl {
        for &(y, wy) in &gl {
            let (v, d) = serendipity(x, y);
            let mut jac = [[0.0; 2]; 2];
            let (mut big_r, mut _z) = (0.0, 0.0);
            for k in 0..8 {
                big_r += v[k] * xe[k][0];
                _z += v[k] * xe[k][1];
                for a in 0..2 {
                    for b in 0..2 {
                        jac[a][b] += xe[k][a] * d[k][b];
                    }
                }
            }
            let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
            let f = match what {
                Integrand::Volume => 1.0,
                Integrand::FintUniformRadial { alpha, zeta, j_p, node, dir } => {
                    // d psi / d(R, Z) through the inverse Jacobian
                    let inv = [[jac[1][1] / det, -jac[0][1] / det], [-jac[1][0] / det, jac[0][0] / det]];
                    let dr = d[node][0] * inv[0][0] + d[node][1] * inv[1][0];
                    let dz = d[node][0] * inv[0][1] + d[node][1] * inv[1][1];
                    let r = alpha * big_r;
                    let g = if dir == 0 {
                        zeta[0] * dr / alpha + zeta[1] * v[node] / r
                    } else {
                        zeta[2] * dz
                    };
                    j_p * g
                }
            };
            acc += f * big_r * det * wx * wy;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cavity_examples() {
        for th in [0.0, 0.3, 1.7, -2.5] {
            let c = cavity_fixture(1.1, 3.0, th).unwrap();
            let want = M3::new(1.1, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0);
            assert!((c.f_cyl - want).abs().max() < 1e-13);
            assert!((c.j_cart - 1.21).abs() < 1e-12 && (c.j_cyl - 1.21).abs() < 1e-12);
        }
        let one = cavity_fixture(1.0, 2.0, 0.4).unwrap();
        assert!((one.f_cyl - M3::identity()).abs().max() < 1e-15 && (one.j_cyl - 1.0).abs() < 1e-15);
        for a in [0.5, 2.0] {
            let c = cavity_fixture(a, 1.3, 0.9).unwrap();
            assert!((c.j_cyl - c.j_cart).abs() < 1e-12);
        }
        assert!(cavity_fixture(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let gl = gauss_legendre(64);
        let w: f64 = gl.iter().map(|p| p.1).sum();
        assert!((w - 2.0).abs() < 1e-13);
        let x10: f64 = gl.iter().map(|p| p.1 * p.0.powi(10)).sum();
        assert!((x10 - 2.0 / 11.0).abs() < 1e-14);
        let g3 = gauss_legendre(3);
        assert!((g3[0].0.abs() - 0.6f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn unit_square_volume() {
        let xe = [[1.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.5, 0.0], [2.0, 0.5], [1.5, 1.0], [1.0, 0.5]];
        assert!((quadrature_oracle(&xe, Integrand::Volume, 64) - 1.5).abs() < 1e-13);
    }

    #[test]
    fn substep_elastic_path_has_no_flow() {
        let mp = MatParams::benchmark();
        let a = M3::from_diagonal(&Vector3::new(-1e-3, -1e-3, -1e-3));
        let r = substep_integrate(&[M3::zeros(), a], -0.01, &mp, 100).unwrap();
        assert_eq!(r.gamma, 0.0);
        assert!((r.eps_e - a).abs().max() < 1e-15);
        assert!(substep_integrate(&[M3::zeros(), a], 0.0, &mp, 10).is_err());
    }

    #[test]
    fn trials_start_on_surface() {
        let mp = MatParams::benchmark();
        for t in random_plastic_trials(5, 3, 1e-3, &mp) {
            let e = SymmetricEigen::new(t.eps_n).eigenvalues;
            let phi = yield_of_strain(&[e[0], e[1], e[2]], t.z_n, &mp);
            assert!(phi.abs() < 1e-6 * mp.pc0 * mp.pc0);
        }
    }
}
