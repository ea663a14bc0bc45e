//! Triangulated surfaces in `R^d` and P1 fields on them.

mod curvature;
mod off;

use std::collections::HashMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::measure_space::{DiscreteMeasuredFunction, Sample};

pub use curvature::CurvatureReport;
pub use off::{load_mesh, write_off, MeshFormat};

/// Relative area below which a triangle counts as degenerate, in units of
/// the squared bounding-box diagonal.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

/// A consistently oriented triangle mesh with manifold edges.
#[derive(Clone, Debug)]
pub struct TriMesh {
    dim: usize,
    coords: Vec<f64>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<[usize; 2]>,
    boundary_vertex: Vec<bool>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Area of the triangle spanned by `e1`, `e2` from the Gram determinant.
fn gram_area(e1: &[f64], e2: &[f64]) -> f64 {
    let (a, b, c) = (dot(e1, e1), dot(e1, e2), dot(e2, e2));
    0.5 * (a * c - b * b).max(0.0).sqrt()
}

impl TriMesh {
    /// Builds and validates a mesh from flat `d`-dimensional coordinates.
    pub fn new(dim: usize, coords: Vec<f64>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if dim < 3 {
            return domain(format!("ambient dimension must be at least 3, got {dim}"));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::SizeMismatch {
                expected: coords.len().div_ceil(dim) * dim,
                found: coords.len(),
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return domain("vertex coordinates must be finite");
        }
        let nv = coords.len() / dim;
        for (t, tri) in triangles.iter().enumerate() {
            if let Some(&bad) = tri.iter().find(|&&i| i >= nv) {
                return domain(format!("triangle {t} references vertex {bad} of {nv}"));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::DegenerateTriangle(t));
            }
        }
        let mut mesh = Self {
            dim,
            coords,
            triangles,
            boundary_edges: Vec::new(),
            boundary_vertex: vec![false; nv],
        };
        let diag2 = mesh.bounding_box_diagonal().powi(2);
        for t in 0..mesh.triangles.len() {
            if mesh.triangle_area(t) <= DEGENERACY_THRESHOLD * diag2 {
                return Err(Error::DegenerateTriangle(t));
            }
        }
        mesh.build_topology()?;
        if mesh.component_count() > 1 {
            log::warn!("mesh has {} connected components", mesh.component_count());
        }
        Ok(mesh)
    }

    fn build_topology(&mut self) -> Result<()> {
        // directed uses of each undirected edge
        let mut edges: HashMap<(usize, usize), (u8, bool)> = HashMap::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let forward = a < b;
                let entry = edges.entry(key).or_insert((0, forward));
                entry.0 += 1;
                if entry.0 > 2 {
                    return Err(Error::NonManifold(key.0, key.1));
                }
                if entry.0 == 2 && entry.1 == forward {
                    return Err(Error::Orientation(key.0, key.1));
                }
            }
        }
        let mut boundary: Vec<[usize; 2]> = edges
            .into_iter()
            .filter(|(_, (count, _))| *count == 1)
            .map(|((a, b), _)| [a, b])
            .collect();
        boundary.sort_unstable();
        for e in &boundary {
            self.boundary_vertex[e[0]] = true;
            self.boundary_vertex[e[1]] = true;
        }
        self.boundary_edges = boundary;
        Ok(())
    }

    fn component_count(&self) -> usize {
        let nv = self.vertex_count();
        let mut parent: Vec<usize> = (0..nv).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        let mut used = vec![false; nv];
        for tri in &self.triangles {
            for &v in tri {
                used[v] = true;
            }
            for k in 1..3 {
                let (a, b) = (find(&mut parent, tri[0]), find(&mut parent, tri[k]));
                parent[a] = b;
            }
        }
        (0..nv).filter(|&i| used[i] && find(&mut parent, i) == i).count()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertex_count(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn vertex(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn vertices(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_edges(&self) -> &[[usize; 2]] {
        &self.boundary_edges
    }

    pub fn is_boundary_vertex(&self, i: usize) -> bool {
        self.boundary_vertex[i]
    }

    pub fn is_closed(&self) -> bool {
        self.boundary_edges.is_empty()
    }

    pub fn bounding_box_diagonal(&self) -> f64 {
        let mut d2 = 0.0;
        for k in 0..self.dim {
            let (lo, hi) = self
                .vertices()
                .map(|v| v[k])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
            if hi > lo {
                d2 += (hi - lo) * (hi - lo);
            }
        }
        d2.sqrt()
    }

    /// Copy with every coordinate multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return domain(format!("scale factor must be positive, got {c}"));
        }
        let mut out = self.clone();
        out.coords.iter_mut().for_each(|x| *x *= c);
        Ok(out)
    }

    fn edge_vectors(&self, t: usize) -> (Vec<f64>, Vec<f64>) {
        let [a, b, c] = self.triangles[t];
        let pa = self.vertex(a);
        (sub(self.vertex(b), pa), sub(self.vertex(c), pa))
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let (e1, e2) = self.edge_vectors(t);
        gram_area(&e1, &e2)
    }

    /// Total area of the given triangles, or of the whole mesh.
    pub fn hausdorff_measure(&self, region: Option<&[usize]>) -> f64 {
        match region {
            Some(ts) => ts.iter().map(|&t| self.triangle_area(t)).sum(),
            None => (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum(),
        }
    }

    /// Length of the boundary of a triangle subset (or of the whole mesh).
    pub fn boundary_measure(&self, region: Option<&[usize]>) -> f64 {
        let edge_len = |a: usize, b: usize| dot(&sub(self.vertex(a), self.vertex(b)), &sub(self.vertex(a), self.vertex(b))).sqrt();
        match region {
            None => self.boundary_edges.iter().map(|e| edge_len(e[0], e[1])).sum(),
            Some(ts) => {
                let mut count: HashMap<(usize, usize), u8> = HashMap::new();
                for &t in ts {
                    let tri = self.triangles[t];
                    for k in 0..3 {
                        let (a, b) = (tri[k], tri[(k + 1) % 3]);
                        *count.entry((a.min(b), a.max(b))).or_default() += 1;
                    }
                }
                let mut edges: Vec<(usize, usize)> =
                    count.into_iter().filter(|&(_, c)| c == 1).map(|(e, _)| e).collect();
                edges.sort_unstable();
                edges.into_iter().map(|(a, b)| edge_len(a, b)).sum()
            }
        }
    }

    /// Norm of the tangential gradient of the affine interpolant on triangle `t`.
    pub fn gradient_norm(&self, t: usize, field: &VertexField) -> f64 {
        let [a, b, c] = self.triangles[t];
        let (e1, e2) = self.edge_vectors(t);
        let u = field.values();
        let (d1, d2) = (u[b] - u[a], u[c] - u[a]);
        let (g11, g12, g22) = (dot(&e1, &e1), dot(&e1, &e2), dot(&e2, &e2));
        let det = g11 * g22 - g12 * g12;
        // du^T G^{-1} du
        let q = (g22 * d1 * d1 - 2.0 * g12 * d1 * d2 + g11 * d2 * d2) / det;
        q.max(0.0).sqrt()
    }

    fn check_field(&self, field: &VertexField) -> Result<()> {
        if field.len() != self.vertex_count() {
            return Err(Error::SizeMismatch {
                expected: self.vertex_count(),
                found: field.len(),
            });
        }
        Ok(())
    }

    /// `sum_T area(T) |grad u|_T^p`.
    pub fn p1_gradient_lp(&self, field: &VertexField, p: f64) -> Result<f64> {
        self.check_field(field)?;
        if !(p >= 1.0) || !p.is_finite() {
            return domain(format!("exponent must be a finite real >= 1, got {p}"));
        }
        Ok((0..self.triangles.len())
            .map(|t| self.triangle_area(t) * self.gradient_norm(t, field).powf(p))
            .sum())
    }

    /// Triangles on which the P1 field is strictly above `t` at every corner.
    pub fn superlevel_triangles(&self, field: &VertexField, t: f64) -> Result<Vec<usize>> {
        self.check_field(field)?;
        let u = field.values();
        Ok((0..self.triangles.len())
            .filter(|&i| self.triangles[i].iter().all(|&v| u[v] > t))
            .collect())
    }

    /// Samples the P1 interpolant at the centroids of the `4^s` congruent
    /// sub-triangles of every triangle, each weighted by its area.
    pub fn sample_field(&self, field: &VertexField, subdivision: u32) -> Result<DiscreteMeasuredFunction> {
        self.check_field(field)?;
        if subdivision > 12 {
            return domain(format!("subdivision level {subdivision} is unreasonably large"));
        }
        let m = 1usize << subdivision;
        let mf = m as f64;
        let cell_count = (m * m) as f64;
        let u = field.values();
        let mut samples = Vec::with_capacity(self.triangles.len() * m * m);
        for (t, tri) in self.triangles.iter().enumerate() {
            let weight = self.triangle_area(t) / cell_count;
            let (u0, u1, u2) = (u[tri[0]], u[tri[1]], u[tri[2]]);
            let at = |l1: f64, l2: f64| (u0 + l1 * (u1 - u0) + l2 * (u2 - u0)).max(0.0);
            for i in 0..m {
                for j in 0..m - i {
                    let (fi, fj) = (i as f64, j as f64);
                    samples.push(Sample {
                        value: at((3.0 * fi + 1.0) / (3.0 * mf), (3.0 * fj + 1.0) / (3.0 * mf)),
                        weight,
                    });
                    if i + j + 1 < m {
                        samples.push(Sample {
                            value: at((3.0 * fi + 2.0) / (3.0 * mf), (3.0 * fj + 2.0) / (3.0 * mf)),
                            weight,
                        });
                    }
                }
            }
        }
        DiscreteMeasuredFunction::new(samples)
    }

    /// Evaluates `f` at every vertex.
    pub fn field_from_fn<F: FnMut(&[f64]) -> f64>(&self, f: F) -> Result<VertexField> {
        VertexField::new(self.vertices().map(f).collect())
    }
}

/// Non-negative values at the vertices of a mesh.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct VertexField {
    values: Vec<f64>,
}

impl TryFrom<Vec<f64>> for VertexField {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<VertexField> for Vec<f64> {
    fn from(f: VertexField) -> Self {
        f.values
    }
}

#[derive(Deserialize, Serialize)]
struct FieldRow {
    vertex_index: usize,
    value: f64,
}

impl VertexField {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !(*v >= 0.0) || !v.is_finite()) {
            return domain(format!("field value at vertex {i} is not a finite non-negative number"));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// True when the field is zero on every boundary vertex of `mesh`.
    pub fn vanishes_on_boundary(&self, mesh: &TriMesh) -> bool {
        self.values
            .iter()
            .enumerate()
            .all(|(i, &v)| v == 0.0 || !mesh.is_boundary_vertex(i))
    }

    /// Copy with every boundary vertex set to zero.
    pub fn with_zero_boundary(&self, mesh: &TriMesh) -> VertexField {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| if mesh.is_boundary_vertex(i) { 0.0 } else { v })
            .collect();
        VertexField { values }
    }

    /// Reads `vertex_index,value` rows; every vertex must appear exactly once.
    pub fn read_csv<R: Read>(reader: R, vertex_count: usize) -> Result<Self> {
        let mut values = vec![None; vertex_count];
        let mut rdr = csv::Reader::from_reader(reader);
        for (line, row) in rdr.deserialize::<FieldRow>().enumerate() {
            let row = row?;
            let slot = values.get_mut(row.vertex_index).ok_or_else(|| Error::Parse {
                line: line + 2,
                message: format!("vertex index {} out of range", row.vertex_index),
            })?;
            if slot.replace(row.value).is_some() {
                return Err(Error::Parse {
                    line: line + 2,
                    message: format!("vertex {} listed twice", row.vertex_index),
                });
            }
        }
        let values: Option<Vec<f64>> = values.into_iter().collect();
        let values = values.ok_or_else(|| Error::Domain("field CSV does not cover every vertex".into()))?;
        Self::new(values)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        for (vertex_index, &value) in self.values.iter().enumerate() {
            wtr.serialize(FieldRow { vertex_index, value })?;
        }
        wtr.flush()?;
        Ok(())
    }
}
