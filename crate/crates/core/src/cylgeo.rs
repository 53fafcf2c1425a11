//! Cylindrical-coordinate geometry: metrics, Christoffel symbols, shifter,
//! basis changes and covariant derivatives.
//!
//! Component index order is `(r, theta, z)` mapped to `0, 1, 2`.

use crate::error::{AxiError, Result};
use crate::tensor::Mat3;

pub const R: usize = 0;
pub const T: usize = 1;
pub const Z: usize = 2;

fn check_radius(radius: f64) -> Result<()> {
    if radius > 0.0 && radius.is_finite() {
        Ok(())
    } else {
        Err(AxiError::Domain { radius })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricCyl {
    pub radius: f64,
    pub cov: Mat3,
    pub contra: Mat3,
}

pub fn metric(radius: f64) -> Result<MetricCyl> {
    check_radius(radius)?;
    Ok(MetricCyl {
        radius,
        cov: Mat3::from_diagonal(&[1.0, radius * radius, 1.0].into()),
        contra: Mat3::from_diagonal(&[1.0, 1.0 / (radius * radius), 1.0].into()),
    })
}

/// Non-zero Christoffel symbols of the second kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Christoffel {
    pub radius: f64,
    /// `Gamma^theta_{r theta} = Gamma^theta_{theta r}`
    pub t_rt: f64,
    /// `Gamma^r_{theta theta}`
    pub r_tt: f64,
}

impl Christoffel {
    /// `Gamma^a_{bc}`
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        match (a, b, c) {
            (T, R, T) | (T, T, R) => self.t_rt,
            (R, T, T) => self.r_tt,
            _ => 0.0,
        }
    }
}

pub fn christoffel(radius: f64) -> Result<Christoffel> {
    check_radius(radius)?;
    Ok(Christoffel { radius, t_rt: 1.0 / radius, r_tt: -radius })
}

/// Shifter from a reference radius to a current radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shifter {
    pub r_ref: f64,
    pub r_cur: f64,
    pub mat: Mat3,
}

impl Shifter {
    pub fn inverse(&self) -> Shifter {
        Shifter {
            r_ref: self.r_cur,
            r_cur: self.r_ref,
            mat: Mat3::from_diagonal(&[1.0, self.r_cur / self.r_ref, 1.0].into()),
        }
    }
}

pub fn shifter(r_ref: f64, r_cur: f64) -> Result<Shifter> {
    check_radius(r_ref)?;
    check_radius(r_cur)?;
    Ok(Shifter { r_ref, r_cur, mat: Mat3::from_diagonal(&[1.0, r_ref / r_cur, 1.0].into()) })
}

/// Jacobians between Cartesian `(x, y, z)` and cylindrical `(r, theta, z)` coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisChange {
    pub angle: f64,
    pub radius: f64,
    /// `d(cyl)/d(cart)`
    pub cart_to_cyl: Mat3,
    /// `d(cart)/d(cyl)`
    pub cyl_to_cart: Mat3,
}

pub fn basis_change(radius: f64, angle: f64) -> Result<BasisChange> {
    check_radius(radius)?;
    let (s, c) = angle.sin_cos();
    let cyl_to_cart = Mat3::new(c, -radius * s, 0.0, s, radius * c, 0.0, 0.0, 0.0, 1.0);
    let cart_to_cyl = Mat3::new(c, s, 0.0, -s / radius, c / radius, 0.0, 0.0, 0.0, 1.0);
    Ok(BasisChange { angle, radius, cart_to_cyl, cyl_to_cart })
}

/// Cylindrical mixed components of a deformation gradient given in Cartesian components.
pub fn transform_defgrad_components(f_cart: &Mat3, bc_ref: &BasisChange, bc_cur: &BasisChange) -> Mat3 {
    bc_cur.cart_to_cyl * f_cart * bc_ref.cyl_to_cart
}

/// Inverse of [`transform_defgrad_components`].
pub fn defgrad_components_to_cart(f_cyl: &Mat3, bc_ref: &BasisChange, bc_cur: &BasisChange) -> Mat3 {
    bc_cur.cyl_to_cart * f_cyl * bc_ref.cart_to_cyl
}

/// `W^A|_B = dW^A/dx^B + Gamma^A_{BC} W^C`
pub fn covariant_derivative_vector(partials: &Mat3, comps: &[f64; 3], chr: &Christoffel) -> Mat3 {
    let mut out = *partials;
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                out[(a, b)] += chr.get(a, b, c) * comps[c];
            }
        }
    }
    out
}

/// Covariant gradient of `delta^a_dir psi`, for `dir` in `{R, Z}`.
///
/// `partials` holds `(d psi/dr, d psi/dz)` in the configuration the Christoffel
/// symbols belong to.
pub fn shape_grad(value: f64, partials: [f64; 2], chr: &Christoffel, dir: usize) -> Mat3 {
    let mut g = Mat3::zeros();
    g[(dir, R)] = partials[0];
    g[(dir, Z)] = partials[1];
    for a in 0..3 {
        for c in 0..3 {
            g[(a, c)] += chr.get(a, dir, c) * value;
        }
    }
    g
}
