//! Deformation gradients from displacements, transposes, Cauchy-Green tensors,
//! logarithmic strain and the elastic/plastic Jacobian split.
//!
//! Mixed components `T^a_b` are converted to orthonormal ("hat") components by the
//! diagonal similarity `D T D^-1`, `D = diag(1, r, 1)`. The hat form of a symmetric
//! tensor is a symmetric matrix, which is what the spectral routines work on.

use crate::cylgeo::{metric, Shifter};
use crate::error::{AxiError, Result};
use crate::tensor::{sym, sym_eigen, Mat3, Spectral};

fn scale(r: f64) -> [f64; 3] {
    [1.0, r, 1.0]
}

/// `T^a_b -> D T D^-1`
pub fn mixed_to_hat(t: &Mat3, r: f64) -> Mat3 {
    let d = scale(r);
    Mat3::from_fn(|a, b| t[(a, b)] * d[a] / d[b])
}

/// Inverse of [`mixed_to_hat`].
pub fn hat_to_mixed(t: &Mat3, r: f64) -> Mat3 {
    let d = scale(r);
    Mat3::from_fn(|a, b| t[(a, b)] * d[b] / d[a])
}

/// Hat components to `T_a^b` (first index covariant).
pub fn hat_to_mixed_lower(t: &Mat3, r: f64) -> Mat3 {
    mixed_to_hat(t, r)
}

/// `T_a^b` to hat components.
pub fn mixed_lower_to_hat(t: &Mat3, r: f64) -> Mat3 {
    hat_to_mixed(t, r)
}

/// Two-point tensor `X^a_A` with its reference and current radii.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefGrad {
    pub comp: Mat3,
    pub r_ref: f64,
    pub r_cur: f64,
}

impl DefGrad {
    pub fn new(comp: Mat3, r_ref: f64, r_cur: f64) -> Result<Self> {
        if !(r_ref > 0.0) || !(r_cur > 0.0) {
            return Err(AxiError::Domain { radius: r_ref.min(r_cur) });
        }
        let det = comp.determinant();
        if !(det > 0.0) {
            return Err(AxiError::Inverted { det, at: None });
        }
        Ok(DefGrad { comp, r_ref, r_cur })
    }

    pub fn identity(r: f64) -> Self {
        DefGrad { comp: Mat3::identity(), r_ref: r, r_cur: r }
    }

    pub fn jacobian(&self) -> f64 {
        self.comp.determinant() * self.r_cur / self.r_ref
    }

    /// `self . prev`, where `prev` ends where `self` starts.
    pub fn compose(&self, prev: &DefGrad) -> DefGrad {
        DefGrad { comp: self.comp * prev.comp, r_ref: prev.r_ref, r_cur: self.r_cur }
    }

    pub fn inverse(&self) -> Result<DefGrad> {
        let inv = self
            .comp
            .try_inverse()
            .ok_or(AxiError::Inverted { det: 0.0, at: None })?;
        Ok(DefGrad { comp: inv, r_ref: self.r_cur, r_cur: self.r_ref })
    }

    /// Components in orthonormal bases at both ends.
    pub fn physical(&self) -> Mat3 {
        let (dc, dr) = (scale(self.r_cur), scale(self.r_ref));
        Mat3::from_fn(|a, b| self.comp[(a, b)] * dc[a] / dr[b])
    }
}

/// `X^a_A = S^a_B (delta^B_A + U^B|_A)`
pub fn defgrad_total(u_partials: &Mat3, s: &Shifter) -> Result<DefGrad> {
    DefGrad::new(s.mat * (Mat3::identity() + u_partials), s.r_ref, s.r_cur)
}

/// Composes the increment `S_inc (I + U_inc|)` with the previous total gradient.
pub fn defgrad_incremental(u_inc_partials: &Mat3, s_inc: &Shifter, f_prev: &DefGrad) -> Result<DefGrad> {
    let inc = defgrad_total(u_inc_partials, s_inc)?;
    let f = inc.compose(f_prev);
    DefGrad::new(f.comp, f.r_ref, f.r_cur)
}

/// `(X^-1)^A_d = S_inv^A_a (delta^a_d - u^a|_d)`
pub fn defgrad_inverse_spatial(u_partials: &Mat3, s_inv: &Shifter) -> Result<Mat3> {
    let m = s_inv.mat * (Mat3::identity() - u_partials);
    let det = m.determinant();
    if !(det > 0.0) {
        return Err(AxiError::Inverted { det, at: None });
    }
    Ok(m)
}

/// `(X^T)^A_a = X^b_B g^{BA} g_ab`
pub fn transpose(f: &DefGrad) -> Mat3 {
    let g_ref = metric(f.r_ref).expect("radius checked at construction");
    let g_cur = metric(f.r_cur).expect("radius checked at construction");
    g_ref.contra * f.comp.transpose() * g_cur.cov
}

pub fn left_cauchy_green(f: &DefGrad) -> Mat3 {
    f.comp * transpose(f)
}

pub fn right_cauchy_green(f: &DefGrad) -> Mat3 {
    transpose(f) * f.comp
}

/// `X b X^T`, with `b_prev` given at `f_inc.r_ref`.
pub fn trial_elastic_b(f_inc: &DefGrad, b_prev: &Mat3) -> Mat3 {
    f_inc.comp * b_prev * transpose(f_inc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticState {
    pub b_e: Mat3,
    pub eps_e: Mat3,
    pub j_e: f64,
}

/// Spectral decomposition of the hat form of a mixed tensor.
pub fn spectral_mixed(b_mixed: &Mat3, r: f64) -> Result<Spectral> {
    let sp = sym_eigen(&sym(&mixed_to_hat(b_mixed, r)));
    if let Some(&bad) = sp.vals.iter().find(|&&l| !(l > 0.0)) {
        return Err(AxiError::State(bad));
    }
    Ok(sp)
}

/// `eps = ln(b) / 2` in mixed components.
pub fn log_strain(b_mixed: &Mat3, r: f64) -> Result<ElasticState> {
    let sp = spectral_mixed(b_mixed, r)?;
    let eps = hat_to_mixed(&sp.compose(|l| 0.5 * l.ln()), r);
    Ok(ElasticState { b_e: *b_mixed, eps_e: eps, j_e: eps.trace().exp() })
}

/// `(J, J_e, J_p)`
pub fn jacobian_split(f: &DefGrad, es: &ElasticState) -> (f64, f64, f64) {
    let j = f.jacobian();
    let j_e = es.eps_e.trace().exp();
    (j, j_e, j / j_e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cylgeo::{christoffel, covariant_derivative_vector, shifter};

    fn radial(alpha: f64) -> DefGrad {
        // U^r = (alpha - 1) R with dU/dR = alpha - 1
        let big_r = 3.0;
        let mut p = Mat3::zeros();
        p[(0, 0)] = alpha - 1.0;
        let u = covariant_derivative_vector(&p, &[(alpha - 1.0) * big_r, 0.0, 0.0], &christoffel(big_r).unwrap());
        defgrad_total(&u, &shifter(big_r, alpha * big_r).unwrap()).unwrap()
    }

    #[test]
    fn zero_displacement_is_identity() {
        let f = defgrad_total(&Mat3::zeros(), &shifter(2.0, 2.0).unwrap()).unwrap();
        assert_eq!(f.comp, Mat3::identity());
        assert_eq!(f.jacobian(), 1.0);
    }

    #[test]
    fn cavity_expansion_defgrad() {
        let f = radial(1.1);
        assert!((f.comp - Mat3::from_diagonal(&[1.1, 1.0, 1.0].into())).abs().max() < 1e-15);
        assert!((f.jacobian() - 1.21).abs() < 1e-14);
        let cart = Mat3::from_diagonal(&[1.1, 1.1, 1.0].into());
        assert!((f.jacobian() - cart.determinant()).abs() < 1e-14);
    }

    #[test]
    fn incremental_composition() {
        let (a1, a) = (1.05, 1.1);
        let f1 = radial(a1);
        let big_r = 3.0;
        let r1 = a1 * big_r;
        let ratio = a / a1;
        let mut p = Mat3::zeros();
        p[(0, 0)] = ratio - 1.0;
        let du = covariant_derivative_vector(&p, &[(ratio - 1.0) * r1, 0.0, 0.0], &christoffel(r1).unwrap());
        let f = defgrad_incremental(&du, &shifter(r1, a * big_r).unwrap(), &f1).unwrap();
        assert!((f.comp - radial(a).comp).abs().max() < 1e-12);
        let same = defgrad_incremental(&Mat3::zeros(), &shifter(r1, r1).unwrap(), &f1).unwrap();
        assert_eq!(same.comp, f1.comp);
    }

    #[test]
    fn spatial_inverse_of_expansion() {
        let f = radial(1.1);
        // u^r = (1 - 1/alpha) r, du/dr = 1 - 1/alpha, hoop u/r
        let r = f.r_cur;
        let mut p = Mat3::zeros();
        p[(0, 0)] = 1.0 - 1.0 / 1.1;
        let u = covariant_derivative_vector(&p, &[(1.0 - 1.0 / 1.1) * r, 0.0, 0.0], &christoffel(r).unwrap());
        let inv = defgrad_inverse_spatial(&u, &shifter(f.r_ref, r).unwrap().inverse()).unwrap();
        assert!((inv - Mat3::from_diagonal(&[1.0 / 1.1, 1.0, 1.0].into())).abs().max() < 1e-15);
        assert!((inv * f.comp - Mat3::identity()).abs().max() < 1e-14);
        assert_eq!(
            defgrad_inverse_spatial(&Mat3::zeros(), &shifter(2.0, 2.0).unwrap()).unwrap(),
            Mat3::identity()
        );
    }

    #[test]
    fn transpose_of_expansion() {
        let f = radial(1.1);
        let t = transpose(&f);
        assert!((t - Mat3::from_diagonal(&[1.1, 1.21, 1.0].into())).abs().max() < 1e-14);
        assert_eq!(transpose(&DefGrad::identity(2.0)), Mat3::identity());
    }

    #[test]
    fn cauchy_green_of_expansion() {
        // the hoop mixed component carries (r/R)^2
        let f = radial(1.1);
        let want = Mat3::from_diagonal(&[1.21, 1.21, 1.0].into());
        assert!((left_cauchy_green(&f) - want).abs().max() < 1e-14);
        assert!((right_cauchy_green(&f) - want).abs().max() < 1e-14);
        assert!((left_cauchy_green(&f).determinant().sqrt() - f.jacobian()).abs() < 1e-12);
        assert!((trial_elastic_b(&f, &Mat3::identity()) - want).abs().max() < 1e-14);
    }

    #[test]
    fn log_strain_examples() {
        let es = log_strain(&Mat3::identity(), 2.0).unwrap();
        assert_eq!(es.eps_e, Mat3::zeros());
        assert_eq!(es.j_e, 1.0);
        let es = log_strain(&Mat3::from_diagonal(&[1.21, 1.0, 1.0].into()), 2.0).unwrap();
        assert!((es.eps_e[(0, 0)] - 1.1f64.ln()).abs() < 1e-15);
        assert!((es.j_e - 1.1).abs() < 1e-14);
        assert!(log_strain(&Mat3::from_diagonal(&[-1.0, 1.0, 1.0].into()), 1.0).is_err());
    }

    #[test]
    fn hat_round_trip() {
        let t = Mat3::new(1.0, 0.2, 0.3, 0.4, 1.5, 0.6, 0.7, 0.8, 1.9);
        assert!((hat_to_mixed(&mixed_to_hat(&t, 3.7), 3.7) - t).abs().max() < 1e-15);
        assert!((mixed_lower_to_hat(&hat_to_mixed_lower(&t, 0.3), 0.3) - t).abs().max() < 1e-15);
    }

    #[test]
    fn jacobian_split_elastic() {
        let f = radial(1.1);
        let es = log_strain(&left_cauchy_green(&f), f.r_cur).unwrap();
        let (j, je, jp) = jacobian_split(&f, &es);
        assert!((j - 1.21).abs() < 1e-14);
        assert!((je - 1.21).abs() < 1e-12);
        assert!((jp - 1.0).abs() < 1e-10);
        assert_eq!(jacobian_split(&DefGrad::identity(1.0), &log_strain(&Mat3::identity(), 1.0).unwrap()), (1.0, 1.0, 1.0));
    }
}
