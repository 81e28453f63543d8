//! Quad meshes of equivariant tori, OBJ round trips and a brute-force self-intersection test.

use crate::elastica::TorusImmersion;
use crate::error::{Error, Result};
use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    /// Zero-based vertex indices, counter-clockwise.
    pub quads: Vec<[usize; 4]>,
}

/// `(u(x), v(x) cos y, v(x) sin y)` over the curve samples and `ny` angles, wrapped in both directions.
pub fn torus_mesh(torus: &TorusImmersion, ny: usize) -> Result<Mesh> {
    let c = &torus.curve;
    let nx = c.n_samples;
    if ny < 3 || nx < 3 {
        return Err(Error::Input(format!("mesh {nx}x{ny} is too coarse")));
    }
    if let Some(v) = c.v.iter().find(|v| !(**v > 1e-12)) {
        return Err(Error::Degenerate(format!("profile touches the axis (v = {v:e})")));
    }
    let mut vertices = Vec::with_capacity(nx * ny);
    for i in 0..nx {
        for k in 0..ny {
            let y = 2.0 * std::f64::consts::PI * k as f64 / ny as f64;
            vertices.push([c.u[i], c.v[i] * y.cos(), c.v[i] * y.sin()]);
        }
    }
    let id = |i: usize, k: usize| (i % nx) * ny + k % ny;
    let quads = (0..nx).flat_map(|i| (0..ny).map(move |k| [id(i, k), id(i + 1, k), id(i + 1, k + 1), id(i, k + 1)])).collect();
    Ok(Mesh { vertices, quads })
}

impl Mesh {
    pub fn edge_count(&self) -> usize {
        let mut edges: Vec<(usize, usize)> = self
            .quads
            .iter()
            .flat_map(|q| (0..4).map(move |e| (q[e].min(q[(e + 1) % 4]), q[e].max(q[(e + 1) % 4]))))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edge_count() as i64 + self.quads.len() as i64
    }

    pub fn to_obj(&self) -> String {
        let mut s = String::with_capacity(64 * (self.vertices.len() + self.quads.len()));
        for v in &self.vertices {
            let _ = writeln!(s, "v {:.16e} {:.16e} {:.16e}", v[0], v[1], v[2]);
        }
        for q in &self.quads {
            let _ = writeln!(s, "f {} {} {} {}", q[0] + 1, q[1] + 1, q[2] + 1, q[3] + 1);
        }
        s
    }

    /// Parses `v` and quad `f` records; other records are ignored.
    pub fn from_obj(text: &str) -> Result<Self> {
        let mut vertices = Vec::new();
        let mut quads = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let mut parts = line.split_whitespace();
            let bad = |what: &str| Error::Input(format!("line {}: {what}", n + 1));
            match parts.next() {
                Some("v") => {
                    let xs: Vec<f64> = parts.map(|p| p.parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad("bad vertex"))?;
                    if xs.len() != 3 {
                        return Err(bad("vertex needs three coordinates"));
                    }
                    vertices.push([xs[0], xs[1], xs[2]]);
                }
                Some("f") => {
                    let ids: Vec<usize> = parts
                        .map(|p| p.split('/').next().unwrap_or("").parse::<usize>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| bad("bad face"))?;
                    if ids.len() != 4 || ids.iter().any(|&i| i == 0) {
                        return Err(bad("expected a quad with 1-based indices"));
                    }
                    quads.push([ids[0] - 1, ids[1] - 1, ids[2] - 1, ids[3] - 1]);
                }
                _ => {}
            }
        }
        if quads.iter().flatten().any(|&i| i >= vertices.len()) {
            return Err(Error::Input("face index out of range".into()));
        }
        Ok(Mesh { vertices, quads })
    }

    fn triangles(&self) -> Vec<[usize; 3]> {
        self.quads.iter().flat_map(|q| [[q[0], q[1], q[2]], [q[0], q[2], q[3]]]).collect()
    }

    /// Pairs of vertex-disjoint triangles that intersect, after bounding-box pruning.
    pub fn self_intersections(&self) -> usize {
        let tris = self.triangles();
        let bbox: Vec<([f64; 3], [f64; 3])> = tris
            .iter()
            .map(|t| {
                let mut lo = [f64::INFINITY; 3];
                let mut hi = [f64::NEG_INFINITY; 3];
                for &i in t {
                    for d in 0..3 {
                        lo[d] = lo[d].min(self.vertices[i][d]);
                        hi[d] = hi[d].max(self.vertices[i][d]);
                    }
                }
                (lo, hi)
            })
            .collect();
        let mut order: Vec<usize> = (0..tris.len()).collect();
        order.sort_by(|&a, &b| bbox[a].0[0].total_cmp(&bbox[b].0[0]));
        let mut count = 0;
        for (pos, &a) in order.iter().enumerate() {
            for &b in &order[pos + 1..] {
                if bbox[b].0[0] > bbox[a].1[0] {
                    break;
                }
                if (1..3).any(|d| bbox[b].0[d] > bbox[a].1[d] || bbox[a].0[d] > bbox[b].1[d]) {
                    continue;
                }
                if tris[a].iter().any(|i| tris[b].contains(i)) {
                    continue;
                }
                if triangles_intersect(&self.tri(&tris[a]), &self.tri(&tris[b])) {
                    count += 1;
                }
            }
        }
        count
    }

    fn tri(&self, t: &[usize; 3]) -> [[f64; 3]; 3] {
        [self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]]
    }
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Möller–Trumbore restricted to the closed segment `p → q`.
fn segment_hits(p: [f64; 3], q: [f64; 3], t: &[[f64; 3]; 3]) -> bool {
    let d = sub(q, p);
    let (e1, e2) = (sub(t[1], t[0]), sub(t[2], t[0]));
    let h = cross(d, e2);
    let a = dot(e1, h);
    if a.abs() < 1e-14 * dot(d, d).sqrt() * dot(e1, e1).sqrt() * dot(e2, e2).sqrt() {
        return false;
    }
    let s = sub(p, t[0]);
    let u = dot(s, h) / a;
    if !(0.0..=1.0).contains(&u) {
        return false;
    }
    let qv = cross(s, e1);
    let v = dot(d, qv) / a;
    if v < 0.0 || u + v > 1.0 {
        return false;
    }
    (0.0..=1.0).contains(&(dot(e2, qv) / a))
}

fn triangles_intersect(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> bool {
    (0..3).any(|e| segment_hits(a[e], a[(e + 1) % 3], b) || segment_hits(b[e], b[(e + 1) % 3], a))
}
