//! Structured meshes of eight-node quadrilaterals over the full plate.

use crate::error::{Error, Result};
use crate::fem::shape::{shape_functions, NODES};

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub nodes: Vec<[f64; 2]>,
    pub elements: Vec<[usize; NODES]>,
    pub a: f64,
    pub b: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Mesh {
    /// `nx` by `ny` rectangular grid over `[0, a] x [0, b]`.
    ///
    /// Nodes are numbered along the shorter side first to keep the profile narrow.
    pub fn rectangular(a: f64, b: f64, nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::Domain(format!("mesh needs at least one element per side, got {nx}x{ny}")));
        }
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::Domain("plate dimensions must be positive".into()));
        }
        let (gx, gy) = (2 * nx + 1, 2 * ny + 1);
        let mut id = vec![usize::MAX; gx * gy];
        let mut nodes = Vec::new();
        let by_rows = nx <= ny;
        let (outer, inner) = if by_rows { (gy, gx) } else { (gx, gy) };
        for o in 0..outer {
            for n in 0..inner {
                let (i, j) = if by_rows { (n, o) } else { (o, n) };
                if i % 2 == 1 && j % 2 == 1 {
                    continue;
                }
                id[j * gx + i] = nodes.len();
                nodes.push([a * i as f64 / (gx - 1) as f64, b * j as f64 / (gy - 1) as f64]);
            }
        }
        let at = |i: usize, j: usize| id[j * gx + i];
        let mut elements = Vec::with_capacity(nx * ny);
        for ey in 0..ny {
            for ex in 0..nx {
                let (i, j) = (2 * ex, 2 * ey);
                elements.push([
                    at(i, j),
                    at(i + 2, j),
                    at(i + 2, j + 2),
                    at(i, j + 2),
                    at(i + 1, j),
                    at(i + 2, j + 1),
                    at(i + 1, j + 2),
                    at(i, j + 1),
                ]);
            }
        }
        Ok(Self {
            nodes,
            elements,
            a,
            b,
            nx,
            ny,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn element_coords(&self, e: usize) -> [[f64; 2]; NODES] {
        self.elements[e].map(|n| self.nodes[n])
    }

    fn tol(&self) -> f64 {
        1e-9 * self.a.max(self.b)
    }

    pub fn on_x_edge(&self, node: usize) -> bool {
        let x = self.nodes[node][0];
        x.abs() <= self.tol() || (x - self.a).abs() <= self.tol()
    }

    pub fn on_y_edge(&self, node: usize) -> bool {
        let y = self.nodes[node][1];
        y.abs() <= self.tol() || (y - self.b).abs() <= self.tol()
    }

    /// Element and parent coordinates of the in-plane point `(x, y)`.
    pub fn locate(&self, x: f64, y: f64) -> Result<(usize, f64, f64)> {
        Ok(self.locate_all(x, y)?[0])
    }

    /// Every element containing `(x, y)`; points on shared edges or nodes
    /// return all neighbours.
    pub fn locate_all(&self, x: f64, y: f64) -> Result<Vec<(usize, f64, f64)>> {
        let tol = self.tol();
        if x < -tol || x > self.a + tol || y < -tol || y > self.b + tol {
            return Err(Error::Domain(format!("point ({x}, {y}) outside the plate")));
        }
        let mut hits = Vec::new();
        for e in 0..self.elements.len() {
            let xe = self.element_coords(e);
            let (lo_x, hi_x) = bounds(xe.iter().map(|p| p[0]));
            let (lo_y, hi_y) = bounds(xe.iter().map(|p| p[1]));
            if x < lo_x - tol || x > hi_x + tol || y < lo_y - tol || y > hi_y + tol {
                continue;
            }
            if let Some((xi, eta)) = inverse_map(&xe, x, y) {
                if xi.abs() <= 1.0 + 1e-9 && eta.abs() <= 1.0 + 1e-9 {
                    hits.push((e, xi.clamp(-1.0, 1.0), eta.clamp(-1.0, 1.0)));
                }
            }
        }
        if hits.is_empty() {
            return Err(Error::Domain(format!("no element contains ({x}, {y})")));
        }
        Ok(hits)
    }
}

fn bounds(it: impl Iterator<Item = f64>) -> (f64, f64) {
    it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Newton iteration for the parent coordinates of `(x, y)`.
pub fn inverse_map(xe: &[[f64; 2]; NODES], x: f64, y: f64) -> Option<(f64, f64)> {
    let (mut xi, mut eta) = (0.0, 0.0);
    let scale = xe.iter().map(|p| p[0].abs().max(p[1].abs())).fold(1e-300, f64::max);
    for _ in 0..50 {
        let (n, dn) = shape_functions(xi, eta);
        let mut r = [-x, -y];
        let mut j = [[0.0; 2]; 2];
        for k in 0..NODES {
            r[0] += n[k] * xe[k][0];
            r[1] += n[k] * xe[k][1];
            j[0][0] += dn[k][0] * xe[k][0];
            j[0][1] += dn[k][1] * xe[k][0];
            j[1][0] += dn[k][0] * xe[k][1];
            j[1][1] += dn[k][1] * xe[k][1];
        }
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-300 {
            return None;
        }
        let dxi = (j[1][1] * r[0] - j[0][1] * r[1]) / det;
        let deta = (-j[1][0] * r[0] + j[0][0] * r[1]) / det;
        xi -= dxi;
        eta -= deta;
        if r[0].abs().max(r[1].abs()) <= 1e-14 * scale && dxi.abs().max(deta.abs()) < 1e-14 {
            return Some((xi, eta));
        }
        if xi.abs() > 10.0 || eta.abs() > 10.0 {
            return None;
        }
    }
    Some((xi, eta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn node_and_element_counts() {
        let m = Mesh::rectangular(1.0, 1.0, 8, 8).unwrap();
        assert_eq!(m.elements.len(), 64);
        assert_eq!(m.num_nodes(), 17 * 17 - 64);
        let m = Mesh::rectangular(2.0, 1.0, 3, 2).unwrap();
        assert_eq!(m.num_nodes(), 7 * 5 - 6);
    }

    #[test]
    fn zero_elements_is_an_error() {
        assert!(Mesh::rectangular(1.0, 1.0, 0, 4).is_err());
    }

    #[test]
    fn shared_nodes_coincide() {
        let m = Mesh::rectangular(1.0, 0.5, 4, 3).unwrap();
        for (e, conn) in m.elements.iter().enumerate() {
            let xe = m.element_coords(e);
            // Mid-edge nodes sit half way between their corners.
            for (k, (p, q)) in [(0, 1), (1, 2), (2, 3), (3, 0)].into_iter().enumerate() {
                assert_relative_eq!(xe[4 + k][0], 0.5 * (xe[p][0] + xe[q][0]), epsilon = 1e-15);
                assert_relative_eq!(xe[4 + k][1], 0.5 * (xe[p][1] + xe[q][1]), epsilon = 1e-15);
            }
            let mut sorted = conn.to_vec();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), 8);
        }
        // Element 0's right edge is element 1's left edge.
        assert_eq!(m.elements[0][1], m.elements[1][0]);
        assert_eq!(m.elements[0][5], m.elements[1][7]);
        assert_eq!(m.elements[0][2], m.elements[1][3]);
    }

    #[test]
    fn locate_interior_and_shared_points() {
        let m = Mesh::rectangular(1.0, 1.0, 4, 4).unwrap();
        let (e, xi, eta) = m.locate(0.1, 0.2).unwrap();
        assert_eq!(e, 0);
        assert_relative_eq!(xi, -0.2, epsilon = 1e-12);
        assert_relative_eq!(eta, 0.6, epsilon = 1e-12);
        assert_eq!(m.locate_all(0.5, 0.5).unwrap().len(), 4);
        assert_eq!(m.locate_all(0.0, 0.5).unwrap().len(), 2);
        assert!(m.locate(1.2, 0.5).is_err());
    }
}
