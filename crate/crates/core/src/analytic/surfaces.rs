//! Parametric test surfaces.

use std::collections::HashMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::mesh::TriMesh;

/// Surfaces with known area, boundary and curvature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Surface {
    /// Unit sphere from a subdivided icosahedron.
    Sphere { subdivision: u32 },
    /// Flat disk in the `z = 0` plane with concentric rings of `6k` vertices.
    Disk { radius: f64, rings: usize },
    /// Cap of the unit sphere around the north pole, `aperture` = polar angle.
    Cap { aperture: f64, rings: usize },
    /// `(cosh v cos u, cosh v sin u, v)` for `|v| <= height`.
    Catenoid { height: f64, rings: usize, segments: usize },
    /// `(cos s, sin s, cos t, sin t) / sqrt 2` in `R^4`.
    CliffordTorus { subdivision: usize },
    /// Open cylinder of the given radius around the `z` axis.
    Cylinder {
        radius: f64,
        height: f64,
        rings: usize,
        segments: usize,
    },
}

impl fmt::Display for Surface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Surface::Sphere { subdivision } => write!(f, "sphere:{subdivision}"),
            Surface::Disk { radius, rings } => write!(f, "disk:{radius}:{rings}"),
            Surface::Cap { aperture, rings } => write!(f, "cap:{aperture}:{rings}"),
            Surface::Catenoid {
                height,
                rings,
                segments,
            } => write!(f, "catenoid:{height}:{rings}:{segments}"),
            Surface::CliffordTorus { subdivision } => write!(f, "clifford:{subdivision}"),
            Surface::Cylinder {
                radius,
                height,
                rings,
                segments,
            } => write!(f, "cylinder:{radius}:{height}:{rings}:{segments}"),
        }
    }
}

impl FromStr for Surface {
    type Err = Error;

    /// Parses `sphere:5`, `disk:1:64`, `cap:0.5:32`, `catenoid:1:32:64`,
    /// `clifford:64` or `cylinder:1:2:16:64`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let bad = || Error::Domain(format!("cannot parse surface '{s}'"));
        let f = |i: usize| -> Result<f64> { parts.get(i).and_then(|x| x.parse().ok()).ok_or_else(bad) };
        let u = |i: usize| -> Result<usize> { parts.get(i).and_then(|x| x.parse().ok()).ok_or_else(bad) };
        let expect = |n: usize| if parts.len() == n { Ok(()) } else { Err(bad()) };
        match parts[0].to_ascii_lowercase().as_str() {
            "sphere" => {
                expect(2)?;
                Ok(Surface::Sphere { subdivision: u(1)? as u32 })
            }
            "disk" => {
                expect(3)?;
                Ok(Surface::Disk { radius: f(1)?, rings: u(2)? })
            }
            "cap" => {
                expect(3)?;
                Ok(Surface::Cap { aperture: f(1)?, rings: u(2)? })
            }
            "catenoid" => {
                expect(4)?;
                Ok(Surface::Catenoid {
                    height: f(1)?,
                    rings: u(2)?,
                    segments: u(3)?,
                })
            }
            "clifford" => {
                expect(2)?;
                Ok(Surface::CliffordTorus { subdivision: u(1)? })
            }
            "cylinder" => {
                expect(5)?;
                Ok(Surface::Cylinder {
                    radius: f(1)?,
                    height: f(2)?,
                    rings: u(3)?,
                    segments: u(4)?,
                })
            }
            _ => Err(bad()),
        }
    }
}

/// Builds the mesh of a [`Surface`].
pub fn make_surface(kind: &Surface) -> Result<TriMesh> {
    match *kind {
        Surface::Sphere { subdivision } => {
            if subdivision > 8 {
                return domain(format!("sphere subdivision {subdivision} exceeds 8"));
            }
            icosphere(subdivision)
        }
        Surface::Disk { radius, rings } => {
            if !(radius > 0.0) || rings < 1 {
                return domain("disk needs a positive radius and at least one ring");
            }
            let (coords, tris) = ring_disk(rings, |rho, theta| {
                let r = radius * rho;
                vec![r * theta.cos(), r * theta.sin(), 0.0]
            });
            TriMesh::new(3, coords, tris)
        }
        Surface::Cap { aperture, rings } => {
            if !(aperture > 0.0 && aperture < PI) || rings < 1 {
                return domain("cap aperture must lie in (0, pi) with at least one ring");
            }
            let (coords, tris) = ring_disk(rings, |rho, theta| {
                let phi = aperture * rho;
                vec![phi.sin() * theta.cos(), phi.sin() * theta.sin(), phi.cos()]
            });
            TriMesh::new(3, coords, tris)
        }
        Surface::Catenoid {
            height,
            rings,
            segments,
        } => {
            if !(height > 0.0) || rings < 1 || segments < 3 {
                return domain("catenoid needs positive height, one ring and three segments");
            }
            let (coords, tris) = tube(rings, segments, |v, u| {
                let z = height * (2.0 * v - 1.0);
                vec![z.cosh() * u.cos(), z.cosh() * u.sin(), z]
            });
            TriMesh::new(3, coords, tris)
        }
        Surface::Cylinder {
            radius,
            height,
            rings,
            segments,
        } => {
            if !(radius > 0.0 && height > 0.0) || rings < 1 || segments < 3 {
                return domain("cylinder needs positive size, one ring and three segments");
            }
            let (coords, tris) = tube(rings, segments, |v, u| {
                vec![radius * u.cos(), radius * u.sin(), height * (v - 0.5)]
            });
            TriMesh::new(3, coords, tris)
        }
        Surface::CliffordTorus { subdivision: n } => {
            if n < 3 {
                return domain("Clifford torus needs at least 3 divisions");
            }
            let mut coords = Vec::with_capacity(4 * n * n);
            for i in 0..n {
                let s = 2.0 * PI * i as f64 / n as f64;
                for j in 0..n {
                    let t = 2.0 * PI * j as f64 / n as f64;
                    coords.extend([s.cos(), s.sin(), t.cos(), t.sin()].map(|x| x * FRAC_1_SQRT_2));
                }
            }
            let idx = |i: usize, j: usize| (i % n) * n + (j % n);
            let mut tris = Vec::with_capacity(2 * n * n);
            for i in 0..n {
                for j in 0..n {
                    tris.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
                    tris.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
                }
            }
            TriMesh::new(4, coords, tris)
        }
    }
}

fn icosphere(levels: u32) -> Result<TriMesh> {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut pts: Vec<[f64; 3]> = vec![
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let normalize = |p: [f64; 3]| {
        let l = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        [p[0] / l, p[1] / l, p[2] / l]
    };
    pts.iter_mut().for_each(|p| *p = normalize(*p));
    let mut tris: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..levels {
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |a: usize, b: usize, pts: &mut Vec<[f64; 3]>| {
            *midpoint.entry((a.min(b), a.max(b))).or_insert_with(|| {
                let (p, q) = (pts[a], pts[b]);
                pts.push(normalize([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                pts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(tris.len() * 4);
        for [a, b, c] in tris {
            let (ab, bc, ca) = (mid(a, b, &mut pts), mid(b, c, &mut pts), mid(c, a, &mut pts));
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        tris = next;
    }
    TriMesh::new(3, pts.into_iter().flatten().collect(), tris)
}

/// Disk topology: a centre vertex and `rings` rings of `6k` vertices, mapped
/// through `place(rho, theta)` with `rho in [0, 1]`.
fn ring_disk<F: Fn(f64, f64) -> Vec<f64>>(rings: usize, place: F) -> (Vec<f64>, Vec<[usize; 3]>) {
    let mut coords = place(0.0, 0.0);
    let mut starts = vec![0usize];
    let mut counts = vec![1usize];
    for k in 1..=rings {
        starts.push(coords.len() / 3);
        counts.push(6 * k);
        let rho = k as f64 / rings as f64;
        for j in 0..6 * k {
            coords.extend(place(rho, 2.0 * PI * j as f64 / (6 * k) as f64));
        }
    }
    let mut tris = Vec::new();
    for k in 1..=rings {
        let (s0, n0, s1, n1) = (starts[k - 1], counts[k - 1], starts[k], counts[k]);
        zip_rings(&mut tris, (s0, n0), (s1, n1));
    }
    (coords, tris)
}

/// Triangulates the band between an inner and an outer ring, both starting
/// at angle zero, by advancing along whichever ring's next vertex comes first.
fn zip_rings(tris: &mut Vec<[usize; 3]>, inner: (usize, usize), outer: (usize, usize)) {
    let (s0, n0) = inner;
    let (s1, n1) = outer;
    if n0 == 1 {
        for j in 0..n1 {
            tris.push([s0, s1 + j, s1 + (j + 1) % n1]);
        }
        return;
    }
    let (mut i, mut j) = (0, 0);
    while i < n0 || j < n1 {
        let next_inner = (i + 1) as f64 / n0 as f64;
        let next_outer = (j + 1) as f64 / n1 as f64;
        if j < n1 && (i == n0 || next_outer <= next_inner) {
            tris.push([s0 + i % n0, s1 + j, s1 + (j + 1) % n1]);
            j += 1;
        } else {
            tris.push([s0 + i % n0, s1 + j % n1, s0 + (i + 1) % n0]);
            i += 1;
        }
    }
}

/// Periodic band: `rings + 1` circles of `segments` vertices, placed by
/// `place(v, u)` with `v in [0, 1]`, `u in [0, 2 pi)`.
fn tube<F: Fn(f64, f64) -> Vec<f64>>(rings: usize, segments: usize, place: F) -> (Vec<f64>, Vec<[usize; 3]>) {
    let mut coords = Vec::new();
    for i in 0..=rings {
        let v = i as f64 / rings as f64;
        // stagger alternate circles for better-shaped triangles
        let shift = if i % 2 == 1 { 0.5 } else { 0.0 };
        for j in 0..segments {
            coords.extend(place(v, 2.0 * PI * (j as f64 + shift) / segments as f64));
        }
    }
    let idx = |i: usize, j: usize| i * segments + j % segments;
    let mut tris = Vec::new();
    for i in 0..rings {
        for j in 0..segments {
            if i % 2 == 0 {
                tris.push([idx(i, j), idx(i, j + 1), idx(i + 1, j)]);
                tris.push([idx(i, j + 1), idx(i + 1, j + 1), idx(i + 1, j)]);
            } else {
                tris.push([idx(i, j), idx(i, j + 1), idx(i + 1, j + 1)]);
                tris.push([idx(i, j), idx(i + 1, j + 1), idx(i + 1, j)]);
            }
        }
    }
    (coords, tris)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn sphere_area_and_curvature() {
        let m = make_surface(&Surface::Sphere { subdivision: 4 }).unwrap();
        assert!(m.is_closed());
        assert!(rel(m.hausdorff_measure(None), 4.0 * PI) < 5e-3);
        assert!(rel(m.total_mean_curvature(), 4.0 * PI.sqrt()) < 0.02);
        assert_eq!(m.boundary_measure(None), 0.0);
    }

    #[test]
    fn sphere_curvature_converges_pointwise() {
        let errors: Vec<f64> = (2..=5)
            .map(|l| {
                make_surface(&Surface::Sphere { subdivision: l })
                    .unwrap()
                    .mean_curvature()
                    .max_relative_error(2.0)
            })
            .collect();
        assert!(errors[3] < 0.02);
        for w in errors.windows(2) {
            assert!(w[1] <= 0.6 * w[0], "{errors:?}");
        }
    }

    #[test]
    fn disk() {
        let m = make_surface(&Surface::Disk { radius: 1.0, rings: 64 }).unwrap();
        assert!(rel(m.hausdorff_measure(None), PI) < 5e-3);
        assert!(rel(m.boundary_measure(None), 2.0 * PI) < 5e-3);
        assert!(m.total_mean_curvature() < 1e-10);
    }

    #[test]
    fn hemisphere_boundary_is_the_equator() {
        let m = make_surface(&Surface::Cap { aperture: PI / 2.0, rings: 48 }).unwrap();
        assert!(rel(m.boundary_measure(None), 2.0 * PI) < 5e-3);
        assert!(rel(m.hausdorff_measure(None), 2.0 * PI) < 5e-3);
    }

    #[test]
    fn cylinder_and_catenoid() {
        let cyl = make_surface(&Surface::Cylinder {
            radius: 1.0,
            height: 2.0,
            rings: 24,
            segments: 64,
        })
        .unwrap();
        let report = cyl.mean_curvature();
        assert!(report.max_relative_error(1.0) < 0.02, "{}", report.max_relative_error(1.0));
        let cat = make_surface(&Surface::Catenoid {
            height: 1.0,
            rings: 48,
            segments: 96,
        })
        .unwrap();
        assert!(cat.mean_curvature().max_interior() < 0.05);
    }

    #[test]
    fn clifford_torus_in_r4() {
        let m = make_surface(&Surface::CliffordTorus { subdivision: 64 }).unwrap();
        assert_eq!(m.dim(), 4);
        assert!(m.is_closed());
        assert!(rel(m.hausdorff_measure(None), 2.0 * PI * PI) < 5e-3);
        assert!(m.mean_curvature().max_relative_error(2.0) < 0.03);
    }

    #[test]
    fn parse_round_trip() {
        for s in [
            Surface::Sphere { subdivision: 3 },
            Surface::Disk { radius: 1.5, rings: 8 },
            Surface::Cap { aperture: 0.5, rings: 8 },
            Surface::Catenoid {
                height: 1.0,
                rings: 4,
                segments: 16,
            },
            Surface::CliffordTorus { subdivision: 8 },
        ] {
            assert_eq!(s.to_string().parse::<Surface>().unwrap(), s);
        }
        assert!("sphere".parse::<Surface>().is_err());
        assert!("torus:3".parse::<Surface>().is_err());
        assert!(make_surface(&Surface::Disk { radius: -1.0, rings: 3 }).is_err());
    }
}
