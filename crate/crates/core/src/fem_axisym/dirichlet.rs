//! Prescribed displacements, elimination and reactions.

use std::collections::BTreeMap;

use super::mesh::MeshAxi;
use super::sparse::CsrMatrix;
use crate::error::{AxiError, Result};

/// Prescribed dof values keyed by global dof index `2 node + dir`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DirichletSet {
    vals: BTreeMap<usize, f64>,
}

impl DirichletSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, dof: usize, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(AxiError::Invalid(format!("non-finite prescribed value on dof {dof}")));
        }
        match self.vals.get(&dof) {
            Some(&old) if (old - value).abs() > 1e-14 * (1.0 + old.abs()) => Err(AxiError::Invalid(format!(
                "dof {dof} prescribed twice with conflicting values {old} and {value}"
            ))),
            _ => {
                self.vals.insert(dof, value);
                Ok(())
            }
        }
    }

    pub fn fix(&mut self, node: usize, dir: usize, value: f64) -> Result<()> {
        self.set(2 * node + dir, value)
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    pub fn contains(&self, dof: usize) -> bool {
        self.vals.contains_key(&dof)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.vals.iter().map(|(&d, &v)| (d, v))
    }

    pub fn free_dofs(&self, n: usize) -> Vec<usize> {
        (0..n).filter(|d| !self.vals.contains_key(d)).collect()
    }

    /// Writes the prescribed values into `u`.
    pub fn impose(&self, u: &mut [f64]) {
        for (d, v) in self.iter() {
            u[d] = v;
        }
    }
}

/// Reduced linear system on the free dofs.
#[derive(Debug, Clone)]
pub struct Reduced {
    pub k: CsrMatrix,
    pub rhs: Vec<f64>,
    pub free: Vec<usize>,
    /// Residual entries at the constrained dofs, `(dof, value)`.
    pub reactions: Vec<(usize, f64)>,
}

/// Eliminates constrained rows and columns of `K du = -r`.
///
/// The constrained values are assumed already imposed in the iterate, so the
/// constrained increments are zero and no column transfer to the right-hand side is needed.
pub fn apply_dirichlet(k: &CsrMatrix, r: &[f64], bc: &DirichletSet) -> Reduced {
    let free = bc.free_dofs(k.n);
    let rhs = free.iter().map(|&d| -r[d]).collect();
    let reactions = bc.iter().map(|(d, _)| (d, r[d])).collect();
    Reduced { k: k.submatrix(&free), rhs, free, reactions }
}

/// Boundary conditions of the thick-cylinder benchmark at load fraction `t_frac`.
///
/// Inner wall: `u_r = ubar (Z - H/2)(2/H) t_frac`, and `u_z = 0` when `fix_inner_z`.
/// Top and bottom: `u_z = 0`. Nodes on the axis: `u_r = 0`.
pub fn benchmark_bcs(mesh: &MeshAxi, ubar: f64, h: f64, t_frac: f64, fix_inner_z: bool) -> Result<DirichletSet> {
    let mut bc = DirichletSet::new();
    for &n in mesh.bset("inner") {
        let z = mesh.nodes[n][1];
        bc.fix(n, 0, ubar * (z - 0.5 * h) * (2.0 / h) * t_frac)?;
        if fix_inner_z {
            bc.fix(n, 1, 0.0)?;
        }
    }
    for name in ["top", "bottom"] {
        for &n in mesh.bset(name) {
            bc.fix(n, 1, 0.0)?;
        }
    }
    for &n in mesh.bset("axis") {
        bc.fix(n, 0, 0.0)?;
    }
    Ok(bc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem_axisym::mesh::gen_cylinder_mesh;

    #[test]
    fn conflicting_values_rejected() {
        let mut bc = DirichletSet::new();
        bc.set(3, 1.0).unwrap();
        bc.set(3, 1.0).unwrap();
        assert!(bc.set(3, 2.0).is_err());
        assert!(bc.set(4, f64::NAN).is_err());
    }

    #[test]
    fn empty_set_keeps_system() {
        let m = gen_cylinder_mesh(1.0, 2.0, 1.0, 1, 1).unwrap();
        let mut k = CsrMatrix::from_connectivity(m.nodes.len(), &m.elems);
        for (i, v) in k.vals.iter_mut().enumerate() {
            *v = i as f64;
        }
        let r: Vec<f64> = (0..16).map(|i| i as f64).collect();
        let red = apply_dirichlet(&k, &r, &DirichletSet::new());
        assert_eq!(red.k, k);
        assert_eq!(red.rhs, r.iter().map(|v| -v).collect::<Vec<_>>());
        assert!(red.reactions.is_empty());
    }

    #[test]
    fn ramp_values() {
        let m = gen_cylinder_mesh(10.0, 15.0, 10.0, 5, 10).unwrap();
        let bc = benchmark_bcs(&m, 1.0, 10.0, 0.5, true).unwrap();
        for &n in m.bset("inner") {
            let z = m.nodes[n][1];
            let want = (z - 5.0) * 0.2 * 0.5;
            assert!((bc.vals[&(2 * n)] - want).abs() < 1e-15);
        }
        // 21 inner nodes x 2, plus top and bottom rows minus the shared inner corners
        assert_eq!(bc.len(), 42 + 2 * 11 - 2);
    }
}
