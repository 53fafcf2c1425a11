use std::collections::BTreeMap;

use crate::error::{AxiError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MeshAxi {
    /// `(R, Z)`
    pub nodes: Vec<[f64; 2]>,
    pub elems: Vec<[usize; 8]>,
    /// Named node sets: `inner`, `outer`, `bottom`, `top`, `axis`.
    pub bsets: BTreeMap<String, Vec<usize>>,
}

impl MeshAxi {
    pub fn n_dofs(&self) -> usize {
        2 * self.nodes.len()
    }

    pub fn bset(&self, name: &str) -> &[usize] {
        self.bsets.get(name).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn elem_coords(&self, e: usize) -> [[f64; 2]; 8] {
        self.elems[e].map(|n| self.nodes[n])
    }

    /// Largest extent in the R-Z plane.
    pub fn size(&self) -> f64 {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &self.nodes {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        (hi[0] - lo[0]).max(hi[1] - lo[1])
    }
}

/// Structured Q8 mesh of the meridian section of a hollow cylinder.
///
/// Nodes are numbered row by row in `Z`, fastest along `R`.
pub fn gen_cylinder_mesh(r_int: f64, r_ext: f64, h: f64, n_r: usize, n_z: usize) -> Result<MeshAxi> {
    if !(r_int >= 0.0 && r_ext > r_int && h > 0.0) {
        return Err(AxiError::Invalid(format!(
            "bad cylinder geometry R_int={r_int}, R_ext={r_ext}, H={h}"
        )));
    }
    if n_r == 0 || n_z == 0 {
        return Err(AxiError::Invalid("element counts must be at least 1".into()));
    }
    let (nr2, nz2) = (2 * n_r, 2 * n_z);
    let mut id = vec![vec![usize::MAX; nr2 + 1]; nz2 + 1];
    let mut nodes = Vec::new();
    for (j, row) in id.iter_mut().enumerate() {
        for (i, slot) in row.iter_mut().enumerate() {
            if i % 2 == 1 && j % 2 == 1 {
                continue;
            }
            *slot = nodes.len();
            let r = if i == 0 {
                r_int
            } else if i == nr2 {
                r_ext
            } else {
                r_int + (r_ext - r_int) * i as f64 / nr2 as f64
            };
            let z = if j == nz2 { h } else { h * j as f64 / nz2 as f64 };
            nodes.push([r, z]);
        }
    }
    let mut elems = Vec::with_capacity(n_r * n_z);
    for ez in 0..n_z {
        for er in 0..n_r {
            let (i, j) = (2 * er, 2 * ez);
            elems.push([
                id[j][i],
                id[j][i + 2],
                id[j + 2][i + 2],
                id[j + 2][i],
                id[j][i + 1],
                id[j + 1][i + 2],
                id[j + 2][i + 1],
                id[j + 1][i],
            ]);
        }
    }
    let mut bsets = BTreeMap::new();
    let pick = |f: &dyn Fn(usize, usize) -> bool| -> Vec<usize> {
        let mut v = Vec::new();
        for (j, row) in id.iter().enumerate() {
            for (i, &n) in row.iter().enumerate() {
                if n != usize::MAX && f(i, j) {
                    v.push(n);
                }
            }
        }
        v
    };
    bsets.insert("inner".to_string(), pick(&|i, _| i == 0));
    bsets.insert("outer".to_string(), pick(&|i, _| i == nr2));
    bsets.insert("bottom".to_string(), pick(&|_, j| j == 0));
    bsets.insert("top".to_string(), pick(&|_, j| j == nz2));
    let axis = if r_int == 0.0 { pick(&|i, _| i == 0) } else { Vec::new() };
    bsets.insert("axis".to_string(), axis);
    Ok(MeshAxi { nodes, elems, bsets })
}
