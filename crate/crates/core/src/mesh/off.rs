use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use super::TriMesh;
use crate::error::{Error, Result};

/// Accepted mesh file formats.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeshFormat {
    /// Plain `OFF` with three coordinates per vertex.
    Off,
    /// `nOFF d` with `d` coordinates per vertex.
    ExtendedOff,
}

struct Tokens {
    items: Vec<(usize, String)>,
    pos: usize,
}

impl Tokens {
    fn read<R: Read>(source: R) -> Result<Self> {
        let mut items = Vec::new();
        for (i, line) in BufReader::new(source).lines().enumerate() {
            let line = line?;
            let content = line.split('#').next().unwrap_or("");
            items.extend(content.split_whitespace().map(|t| (i + 1, t.to_string())));
        }
        Ok(Self { items, pos: 0 })
    }

    fn line(&self) -> usize {
        self.items
            .get(self.pos)
            .or_else(|| self.items.last())
            .map_or(1, |(l, _)| *l)
    }

    fn next_raw(&mut self, what: &str) -> Result<(usize, String)> {
        let item = self.items.get(self.pos).cloned().ok_or_else(|| Error::Parse {
            line: self.line(),
            message: format!("unexpected end of file while reading {what}"),
        })?;
        self.pos += 1;
        Ok(item)
    }

    fn next<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        let (line, tok) = self.next_raw(what)?;
        tok.parse().map_err(|_| Error::Parse {
            line,
            message: format!("expected {what}, found '{tok}'"),
        })
    }
}

/// Parses an OFF or nOFF stream into a validated mesh.
///
/// Polygons with more than three corners are fan-triangulated.
pub fn load_mesh<R: Read>(source: R, format: MeshFormat) -> Result<TriMesh> {
    let mut tok = Tokens::read(source)?;
    let (line, header) = tok.next_raw("header")?;
    let dim = match (format, header.as_str()) {
        (MeshFormat::Off, "OFF") => 3,
        (MeshFormat::ExtendedOff, "nOFF") => tok.next::<usize>("ambient dimension")?,
        (MeshFormat::ExtendedOff, "OFF") => 3,
        _ => {
            return Err(Error::Parse {
                line,
                message: format!("unexpected header '{header}' for {format:?}"),
            })
        }
    };
    if dim < 3 {
        return Err(Error::Parse {
            line,
            message: format!("ambient dimension must be at least 3, got {dim}"),
        });
    }
    let nv: usize = tok.next("vertex count")?;
    let nf: usize = tok.next("face count")?;
    let _edges: usize = tok.next("edge count")?;
    let mut coords = Vec::with_capacity(nv * dim);
    for _ in 0..nv * dim {
        coords.push(tok.next::<f64>("coordinate")?);
    }
    let mut triangles = Vec::with_capacity(nf);
    for _ in 0..nf {
        let line = tok.line();
        let k: usize = tok.next("polygon size")?;
        if k < 3 {
            return Err(Error::Parse {
                line,
                message: format!("polygon with {k} corners"),
            });
        }
        let corners = (0..k)
            .map(|_| tok.next::<usize>("vertex index"))
            .collect::<Result<Vec<_>>>()?;
        if let Some(&bad) = corners.iter().find(|&&i| i >= nv) {
            return Err(Error::Parse {
                line,
                message: format!("vertex index {bad} out of range ({nv} vertices)"),
            });
        }
        for j in 1..k - 1 {
            triangles.push([corners[0], corners[j], corners[j + 1]]);
        }
        // optional colour values run to the end of the line
        while tok.pos < tok.items.len() && tok.items[tok.pos].0 == line {
            tok.pos += 1;
        }
    }
    TriMesh::new(dim, coords, triangles)
}

/// Writes `OFF` for meshes in `R^3` and `nOFF d` otherwise.
pub fn write_off<W: Write>(mesh: &TriMesh, mut out: W) -> Result<()> {
    if mesh.dim() == 3 {
        writeln!(out, "OFF")?;
    } else {
        writeln!(out, "nOFF {}", mesh.dim())?;
    }
    writeln!(out, "{} {} 0", mesh.vertex_count(), mesh.triangle_count())?;
    for v in mesh.vertices() {
        let row: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
        writeln!(out, "{}", row.join(" "))?;
    }
    for t in mesh.triangles() {
        writeln!(out, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const OCTAHEDRON: &str = "OFF
# regular octahedron
6 8 12
1 0 0
-1 0 0
0 1 0
0 -1 0
0 0 1
0 0 -1
3 0 2 4
3 2 1 4
3 1 3 4
3 3 0 4
3 2 0 5
3 1 2 5
3 3 1 5
3 0 3 5
";

    #[test]
    fn octahedron() {
        let m = load_mesh(OCTAHEDRON.as_bytes(), MeshFormat::Off).unwrap();
        assert_eq!(m.vertex_count(), 6);
        assert_eq!(m.triangle_count(), 8);
        assert!(m.is_closed());
        assert!((m.hausdorff_measure(None) - 4.0 * 3f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn extended_off_in_r4() {
        let src = "nOFF 4\n3 1 0\n0 0 0 0\n1 0 0 1\n0 1 0 0\n3 0 1 2\n";
        let m = load_mesh(src.as_bytes(), MeshFormat::ExtendedOff).unwrap();
        assert_eq!(m.dim(), 4);
        // dimension on its own line is accepted too
        let split = "nOFF\n4\n3 1 0\n0 0 0 0\n1 0 0 1\n0 1 0 0\n3 0 1 2\n";
        assert_eq!(load_mesh(split.as_bytes(), MeshFormat::ExtendedOff).unwrap().dim(), 4);
        let mut buf = Vec::new();
        write_off(&m, &mut buf).unwrap();
        let back = load_mesh(buf.as_slice(), MeshFormat::ExtendedOff).unwrap();
        assert_eq!(back.vertex(1), m.vertex(1));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let src = "OFF\n3 1 0\n0 0 0\n1 x 0\n0 1 0\n3 0 1 2\n";
        match load_mesh(src.as_bytes(), MeshFormat::Off) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        let degenerate = "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 1\n";
        assert!(matches!(
            load_mesh(degenerate.as_bytes(), MeshFormat::Off),
            Err(Error::DegenerateTriangle(0))
        ));
        let truncated = "OFF\n3 1 0\n0 0 0\n";
        assert!(matches!(
            load_mesh(truncated.as_bytes(), MeshFormat::Off),
            Err(Error::Parse { .. })
        ));
        assert!(load_mesh("PLY\n".as_bytes(), MeshFormat::Off).is_err());
    }

    #[test]
    fn quads_are_split() {
        let src = "OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n";
        let m = load_mesh(src.as_bytes(), MeshFormat::Off).unwrap();
        assert_eq!(m.triangle_count(), 2);
        assert_eq!(m.hausdorff_measure(None), 1.0);
    }
}
