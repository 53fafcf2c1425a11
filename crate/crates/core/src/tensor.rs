//! Small dense tensor helpers shared by the kinematics, material and element code.
//!
//! Second-order tensors are `Matrix3<f64>`; fourth-order tensors are 9x9 matrices
//! with the index pair `(i, j)` flattened row-major to `3 * i + j`.

use nalgebra::{Matrix3, SMatrix, SVector, SymmetricEigen};

pub type Mat3 = Matrix3<f64>;
pub type T4 = SMatrix<f64, 9, 9>;
pub type V9 = SVector<f64, 9>;

#[inline]
pub fn ix(i: usize, j: usize) -> usize {
    3 * i + j
}

pub fn flatten(m: &Mat3) -> V9 {
    let mut v = V9::zeros();
    for i in 0..3 {
        for j in 0..3 {
            v[ix(i, j)] = m[(i, j)];
        }
    }
    v
}

pub fn unflatten(v: &V9) -> Mat3 {
    Mat3::from_fn(|i, j| v[ix(i, j)])
}

/// Symmetric fourth-order identity, `(d_ik d_jl + d_il d_jk) / 2`.
pub fn identity_sym() -> T4 {
    let mut t = T4::zeros();
    for i in 0..3 {
        for j in 0..3 {
            t[(ix(i, j), ix(i, j))] += 0.5;
            t[(ix(i, j), ix(j, i))] += 0.5;
        }
    }
    t
}

pub fn outer(a: &Mat3, b: &Mat3) -> T4 {
    flatten(a) * flatten(b).transpose()
}

pub fn ddot(a: &Mat3, b: &Mat3) -> f64 {
    a.component_mul(b).sum()
}

/// `T : m`
pub fn apply(t: &T4, m: &Mat3) -> Mat3 {
    unflatten(&(t * flatten(m)))
}

/// `m : T`
pub fn left_apply(m: &Mat3, t: &T4) -> Mat3 {
    unflatten(&(t.transpose() * flatten(m)))
}

/// Isotropic elastic modulus of the Hencky energy.
pub fn hencky_modulus(k: f64, g: f64) -> T4 {
    let one = outer(&Mat3::identity(), &Mat3::identity());
    one * k + (identity_sym() - one / 3.0) * (2.0 * g)
}

pub fn sym(m: &Mat3) -> Mat3 {
    (m + m.transpose()) * 0.5
}

/// Spectral data of a symmetric 3x3 matrix; eigenvectors are the columns of `vecs`.
#[derive(Debug, Clone, Copy)]
pub struct Spectral {
    pub vals: [f64; 3],
    pub vecs: Mat3,
}

impl Spectral {
    pub fn compose(&self, f: impl Fn(f64) -> f64) -> Mat3 {
        let mut out = Mat3::zeros();
        for k in 0..3 {
            let n = self.vecs.column(k);
            out += n * n.transpose() * f(self.vals[k]);
        }
        out
    }

    pub fn compose_vals(&self, v: &[f64; 3]) -> Mat3 {
        let mut out = Mat3::zeros();
        for k in 0..3 {
            let n = self.vecs.column(k);
            out += n * n.transpose() * v[k];
        }
        out
    }
}

/// Eigen-decomposition of a symmetric matrix.
///
/// When the hoop row and column (index 1) are decoupled, the in-plane block is
/// solved in closed form; otherwise falls back to a Jacobi-type solver.
pub fn sym_eigen(m: &Mat3) -> Spectral {
    let scale = m.abs().max().max(f64::MIN_POSITIVE);
    let coupled = [m[(0, 1)], m[(1, 0)], m[(1, 2)], m[(2, 1)]]
        .iter()
        .any(|v| v.abs() > 1e-15 * scale);
    if coupled {
        let se = SymmetricEigen::new(sym(m));
        return Spectral {
            vals: [se.eigenvalues[0], se.eigenvalues[1], se.eigenvalues[2]],
            vecs: se.eigenvectors,
        };
    }
    let a = m[(0, 0)];
    let d = m[(2, 2)];
    let c = 0.5 * (m[(0, 2)] + m[(2, 0)]);
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + c * c).sqrt();
    let th = 0.5 * (2.0 * c).atan2(a - d);
    let (cs, sn) = (th.cos(), th.sin());
    let mut vecs = Mat3::zeros();
    vecs[(0, 0)] = cs;
    vecs[(2, 0)] = sn;
    vecs[(1, 1)] = 1.0;
    vecs[(0, 2)] = -sn;
    vecs[(2, 2)] = cs;
    Spectral { vals: [mean + rad, m[(1, 1)], mean - rad], vecs }
}

/// Derivative of the matrix logarithm at a symmetric positive-definite matrix.
///
/// Component `[(e,f),(g,h)]` is `d ln(b)_ef / d b_gh` for an arbitrary
/// (not necessarily symmetric) perturbation.
pub fn dlog(sp: &Spectral) -> T4 {
    let lam = sp.vals;
    let lmax = lam.iter().fold(0.0_f64, |a, b| a.max(b.abs()));
    let mut f = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (a, b) = (lam[i], lam[j]);
            f[i][j] = if (a - b).abs() < 1e-8 * lmax {
                2.0 / (a + b)
            } else {
                (a.ln() - b.ln()) / (a - b)
            };
        }
    }
    let n = &sp.vecs;
    let mut t = T4::zeros();
    for e in 0..3 {
        for ff in 0..3 {
            for g in 0..3 {
                for h in 0..3 {
                    let mut s = 0.0;
                    for i in 0..3 {
                        for j in 0..3 {
                            s += f[i][j] * n[(e, i)] * n[(g, i)] * n[(h, j)] * n[(ff, j)];
                        }
                    }
                    t[(ix(e, ff), ix(g, h))] = s;
                }
            }
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_eigen_matches_reconstruction() {
        let m = Mat3::new(2.0, 0.0, 0.3, 0.0, 1.5, 0.0, 0.3, 0.0, 0.7);
        let sp = sym_eigen(&m);
        let back = sp.compose(|x| x);
        assert!((back - m).abs().max() < 1e-14);
    }

    #[test]
    fn coupled_matrix_uses_general_solver() {
        let m = Mat3::new(2.0, 0.1, 0.3, 0.1, 1.5, 0.2, 0.3, 0.2, 0.7);
        let sp = sym_eigen(&m);
        assert!((sp.compose(|x| x) - m).abs().max() < 1e-13);
    }

    #[test]
    fn dlog_matches_finite_difference() {
        let m = Mat3::new(1.3, 0.0, 0.2, 0.0, 0.9, 0.0, 0.2, 0.0, 1.1);
        let l = dlog(&sym_eigen(&m));
        let h = 1e-6;
        for g in 0..3 {
            for hh in g..3 {
                let mut dir = Mat3::zeros();
                dir[(g, hh)] = 1.0;
                dir[(hh, g)] = 1.0;
                let lp = sym_eigen(&(m + dir * h)).compose(f64::ln);
                let lm = sym_eigen(&(m - dir * h)).compose(f64::ln);
                let fd = (lp - lm) / (2.0 * h);
                let an = apply(&l, &dir);
                assert!((fd - an).abs().max() < 1e-8);
            }
        }
    }

    #[test]
    fn hencky_modulus_volumetric_part() {
        let c = hencky_modulus(3.0, 2.0);
        let out = apply(&c, &Mat3::identity());
        assert!((out - Mat3::identity() * 9.0).abs().max() < 1e-14);
    }
}
