//! Structured periodic triangulation of the surface torus chart.
//!
//! The chart domain [0, 2π)² is cut into an m₁×m₂ grid of cells, each
//! split along its lower-left to upper-right diagonal, giving 2·m₁·m₂
//! triangles on m₁·m₂ nodes with every node of valence six. Node (i, j)
//! has id i·m₂ + j. Triangle corner coordinates are reported unwrapped
//! (the right/top edges of boundary cells run past 2π), so element
//! geometry is affine while periodicity lives entirely in the node ids.

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct TorusMesh {
    pub m1: usize,
    pub m2: usize,
}

/// One triangle: node ids and unwrapped chart coordinates of its corners.
#[derive(Clone, Copy, Debug)]
pub struct Triangle {
    pub nodes: [usize; 3],
    pub coords: [[f64; 2]; 3],
}

impl TorusMesh {
    pub fn num_nodes(&self) -> usize {
        self.m1 * self.m2
    }

    pub fn num_triangles(&self) -> usize {
        2 * self.m1 * self.m2
    }

    pub fn node_id(&self, i: usize, j: usize) -> usize {
        (i % self.m1) * self.m2 + (j % self.m2)
    }

    /// Chart coordinates of a node.
    pub fn node_coords(&self, id: usize) -> [f64; 2] {
        let (i, j) = (id / self.m2, id % self.m2);
        let h1 = std::f64::consts::TAU / self.m1 as f64;
        let h2 = std::f64::consts::TAU / self.m2 as f64;
        [i as f64 * h1, j as f64 * h2]
    }

    /// Triangles in a fixed cell order: for each cell first the lower
    /// triangle (corner, right, diagonal), then the upper one.
    pub fn triangles(&self) -> impl Iterator<Item = Triangle> + '_ {
        let h1 = std::f64::consts::TAU / self.m1 as f64;
        let h2 = std::f64::consts::TAU / self.m2 as f64;
        (0..self.m1).flat_map(move |i| {
            (0..self.m2).flat_map(move |j| {
                let (u0, v0) = (i as f64 * h1, j as f64 * h2);
                let a = self.node_id(i, j);
                let b = self.node_id(i + 1, j);
                let c = self.node_id(i, j + 1);
                let d = self.node_id(i + 1, j + 1);
                let pa = [u0, v0];
                let pb = [u0 + h1, v0];
                let pc = [u0, v0 + h2];
                let pd = [u0 + h1, v0 + h2];
                [
                    Triangle {
                        nodes: [a, b, d],
                        coords: [pa, pb, pd],
                    },
                    Triangle {
                        nodes: [a, d, c],
                        coords: [pa, pd, pc],
                    },
                ]
            })
        })
    }
}

/// Build the periodic mesh; each direction needs at least three cells so
/// that no edge coincides with its own periodic image.
pub fn build_mesh(m1: usize, m2: usize) -> Result<TorusMesh> {
    for m in [m1, m2] {
        if !(3..=1024).contains(&m) {
            return Err(Error::Parameter(format!(
                "mesh resolution must lie in [3, 1024] per direction, got {m1}x{m2}"
            )));
        }
    }
    Ok(TorusMesh { m1, m2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn counts_and_validation() {
        let mesh = build_mesh(4, 4).unwrap();
        assert_eq!(mesh.num_nodes(), 16);
        assert_eq!(mesh.num_triangles(), 32);
        assert_eq!(mesh.triangles().count(), 32);
        assert!(build_mesh(2, 8).is_err());
        assert!(build_mesh(8, 2000).is_err());
    }

    #[test]
    fn every_node_has_valence_six() {
        let mesh = build_mesh(5, 7).unwrap();
        let mut hits = vec![0usize; mesh.num_nodes()];
        for t in mesh.triangles() {
            for n in t.nodes {
                hits[n] += 1;
            }
        }
        assert!(hits.iter().all(|&h| h == 6));
    }

    #[test]
    fn euler_characteristic_is_zero() {
        let mesh = build_mesh(6, 4).unwrap();
        let mut edges = HashSet::new();
        for t in mesh.triangles() {
            for (x, y) in [(0, 1), (1, 2), (2, 0)] {
                let (a, b) = (t.nodes[x], t.nodes[y]);
                edges.insert((a.min(b), a.max(b)));
            }
        }
        let v = mesh.num_nodes() as i64;
        let e = edges.len() as i64;
        let f = mesh.num_triangles() as i64;
        assert_eq!(v - e + f, 0, "V={v} E={e} F={f}");
    }

    #[test]
    fn triangles_are_positively_oriented_and_tile_the_area() {
        let mesh = build_mesh(4, 6).unwrap();
        let mut total = 0.0;
        for t in mesh.triangles() {
            let [p0, p1, p2] = t.coords;
            let det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
            assert!(det > 0.0, "orientation flip in {:?}", t.nodes);
            total += det / 2.0;
        }
        let want = std::f64::consts::TAU * std::f64::consts::TAU;
        assert!((total - want).abs() < 1e-10);
    }

    #[test]
    fn node_ids_wrap_periodically() {
        let mesh = build_mesh(4, 4).unwrap();
        assert_eq!(mesh.node_id(4, 0), mesh.node_id(0, 0));
        assert_eq!(mesh.node_id(3, 4), mesh.node_id(3, 0));
        let c = mesh.node_coords(mesh.node_id(1, 2));
        assert!((c[0] - std::f64::consts::TAU / 4.0).abs() < 1e-15);
        assert!((c[1] - std::f64::consts::TAU / 2.0).abs() < 1e-15);
    }
}
