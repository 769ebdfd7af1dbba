//! Eight-node serendipity quadrilateral.
//!
//! ```text
//! 3-----6-----2
//! |     η     |
//! 7     +--ξ  5
//! |           |
//! 0-----4-----1
//! ```

pub const NODES: usize = 8;

/// Parent coordinates of the eight nodes.
#[rustfmt::skip]
pub const NODE_COORDS: [[f64; 2]; NODES] = [
    [-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0],
    [0.0, -1.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0],
];

/// Shape function values and their `(d/dxi, d/deta)` derivatives.
pub fn shape_functions(xi: f64, eta: f64) -> ([f64; NODES], [[f64; 2]; NODES]) {
    let mut n = [0.0; NODES];
    let mut dn = [[0.0; 2]; NODES];
    for (i, &[xi_i, eta_i]) in NODE_COORDS.iter().enumerate() {
        if i < 4 {
            let a = 1.0 + xi * xi_i;
            let b = 1.0 + eta * eta_i;
            let c = xi * xi_i + eta * eta_i - 1.0;
            n[i] = 0.25 * a * b * c;
            dn[i][0] = 0.25 * xi_i * b * (c + a);
            dn[i][1] = 0.25 * eta_i * a * (c + b);
        } else if xi_i == 0.0 {
            n[i] = 0.5 * (1.0 - xi * xi) * (1.0 + eta * eta_i);
            dn[i][0] = -xi * (1.0 + eta * eta_i);
            dn[i][1] = 0.5 * (1.0 - xi * xi) * eta_i;
        } else {
            n[i] = 0.5 * (1.0 + xi * xi_i) * (1.0 - eta * eta);
            dn[i][0] = 0.5 * xi_i * (1.0 - eta * eta);
            dn[i][1] = -eta * (1.0 + xi * xi_i);
        }
    }
    (n, dn)
}
