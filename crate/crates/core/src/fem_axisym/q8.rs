//! Eight-node serendipity quadrilateral and 3x3 Gauss rule.

/// Parent coordinates: corners counter-clockwise, then midsides of edges 0-1, 1-2, 2-3, 3-0.
pub const NODES: [[f64; 2]; 8] = [
    [-1.0, -1.0],
    [1.0, -1.0],
    [1.0, 1.0],
    [-1.0, 1.0],
    [0.0, -1.0],
    [1.0, 0.0],
    [0.0, 1.0],
    [-1.0, 0.0],
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shape {
    pub values: [f64; 8],
    /// `d psi_N / d(xi, eta)`
    pub partials: [[f64; 2]; 8],
}

pub fn q8_shape(xi: [f64; 2]) -> Shape {
    let (x, y) = (xi[0], xi[1]);
    let mut values = [0.0; 8];
    let mut partials = [[0.0; 2]; 8];
    for (n, &[a, b]) in NODES.iter().enumerate() {
        if n < 4 {
            values[n] = 0.25 * (1.0 + a * x) * (1.0 + b * y) * (a * x + b * y - 1.0);
            partials[n][0] = 0.25 * a * (1.0 + b * y) * (2.0 * a * x + b * y);
            partials[n][1] = 0.25 * b * (1.0 + a * x) * (a * x + 2.0 * b * y);
        } else if a == 0.0 {
            values[n] = 0.5 * (1.0 - x * x) * (1.0 + b * y);
            partials[n][0] = -x * (1.0 + b * y);
            partials[n][1] = 0.5 * b * (1.0 - x * x);
        } else {
            values[n] = 0.5 * (1.0 + a * x) * (1.0 - y * y);
            partials[n][0] = 0.5 * a * (1.0 - y * y);
            partials[n][1] = -y * (1.0 + a * x);
        }
    }
    Shape { values, partials }
}

/// 3x3 Gauss points as `(xi, eta, weight)`.
pub fn gauss_3x3() -> [(f64, f64, f64); 9] {
    let a = (0.6f64).sqrt();
    let pts = [(-a, 5.0 / 9.0), (0.0, 8.0 / 9.0), (a, 5.0 / 9.0)];
    let mut out = [(0.0, 0.0, 0.0); 9];
    for (j, &(eta, wj)) in pts.iter().enumerate() {
        for (i, &(xi, wi)) in pts.iter().enumerate() {
            out[3 * j + i] = (xi, eta, wi * wj);
        }
    }
    out
}
