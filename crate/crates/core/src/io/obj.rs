use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::mesh::{CutMesh, DualCycle, FaceId, HalfedgeMesh, VertexId};

/// Triangle mesh as read from an OBJ file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObjMesh {
    pub positions: Vec<[f64; 3]>,
    pub uvs: Vec<[f64; 2]>,
    pub faces: Vec<[VertexId; 3]>,
    /// Texture-coordinate indices per face, when every face has them.
    pub face_uvs: Option<Vec<[usize; 3]>>,
    /// Loops given as `# loop <index> <face ids...>` comments, by index.
    pub loops: Vec<(usize, Vec<FaceId>)>,
}

impl ObjMesh {
    pub fn build(&self) -> Result<HalfedgeMesh> {
        crate::mesh::build_mesh(self.positions.len(), &self.faces)
    }

    /// Loop face sequences ordered by their index.
    pub fn loop_faces(&self) -> Vec<Vec<FaceId>> {
        let mut loops = self.loops.clone();
        loops.sort_by_key(|l| l.0);
        loops.into_iter().map(|l| l.1).collect()
    }
}

pub fn read_obj(path: impl AsRef<Path>) -> Result<ObjMesh> {
    parse_obj(&std::fs::read_to_string(path)?)
}

fn resolve(token: &str, count: usize, line: usize) -> Result<usize> {
    let parse_err = |message: String| Error::Parse { line, message };
    let raw: i64 = token.parse().map_err(|_| parse_err(format!("bad index '{token}'")))?;
    let idx = match raw {
        0 => return Err(parse_err("index 0 is not valid".into())),
        r if r > 0 => r - 1,
        r => count as i64 + r,
    };
    if idx < 0 {
        return Err(parse_err(format!("index {raw} out of range")));
    }
    Ok(idx as usize)
}

fn floats<const N: usize>(parts: &[&str], line: usize) -> Result<[f64; N]> {
    if parts.len() < N {
        return Err(Error::Parse {
            line,
            message: format!("expected {N} coordinates"),
        });
    }
    let mut out = [0.0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad number '{p}'"),
        })?;
    }
    Ok(out)
}

pub fn parse_obj(text: &str) -> Result<ObjMesh> {
    let mut obj = ObjMesh::default();
    let mut face_uvs = Vec::new();
    let mut all_uv = true;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let raw = raw.trim();
        if let Some(comment) = raw.strip_prefix('#') {
            let parts: Vec<&str> = comment.split_whitespace().collect();
            if parts.first() == Some(&"loop") {
                let nums = parts[1..]
                    .iter()
                    .map(|p| p.parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| Error::Parse {
                        line,
                        message: "malformed loop comment".into(),
                    })?;
                let Some((&index, faces)) = nums.split_first() else {
                    return Err(Error::Parse {
                        line,
                        message: "loop comment without index".into(),
                    });
                };
                obj.loops.push((index, faces.to_vec()));
            }
            continue;
        }
        let parts: Vec<&str> = raw.split_whitespace().collect();
        let Some((&tag, rest)) = parts.split_first() else { continue };
        match tag {
            "v" => obj.positions.push(floats::<3>(rest, line)?),
            "vt" => obj.uvs.push(floats::<2>(rest, line)?),
            "f" => {
                if rest.len() != 3 {
                    return Err(Error::Parse {
                        line,
                        message: format!("only triangles are supported, got {} vertices", rest.len()),
                    });
                }
                let mut vs = [0; 3];
                let mut ts = [0; 3];
                for (k, corner) in rest.iter().enumerate() {
                    let mut fields = corner.split('/');
                    vs[k] = resolve(fields.next().unwrap_or(""), obj.positions.len(), line)?;
                    match fields.next() {
                        Some(t) if !t.is_empty() => ts[k] = resolve(t, obj.uvs.len(), line)?,
                        _ => all_uv = false,
                    }
                }
                obj.faces.push(vs);
                face_uvs.push(ts);
            }
            _ => {}
        }
    }
    for (f, face) in obj.faces.iter().enumerate() {
        if let Some(&v) = face.iter().find(|&&v| v >= obj.positions.len()) {
            return Err(Error::InvalidVertex {
                face: f,
                vertex: v,
                vertex_count: obj.positions.len(),
            });
        }
    }
    if all_uv && !obj.faces.is_empty() {
        if face_uvs.iter().flatten().any(|&t| t >= obj.uvs.len()) {
            return Err(Error::Parse {
                line: 0,
                message: "texture index out of range".into(),
            });
        }
        obj.face_uvs = Some(face_uvs);
    }
    Ok(obj)
}

fn write_loops(out: &mut String, loops: &[DualCycle]) {
    for (s, l) in loops.iter().enumerate() {
        let _ = write!(out, "# loop {s}");
        for f in l.faces() {
            let _ = write!(out, " {f}");
        }
        out.push('\n');
    }
}

/// Plain OBJ with loop comments.
pub fn write_obj(positions: &[[f64; 3]], mesh: &HalfedgeMesh, loops: &[DualCycle]) -> String {
    let mut out = String::new();
    for p in positions {
        let _ = writeln!(out, "v {} {} {}", p[0], p[1], p[2]);
    }
    for f in 0..mesh.face_count() {
        let [a, b, c] = mesh.face_vertices(f);
        let _ = writeln!(out, "f {} {} {}", a + 1, b + 1, c + 1);
    }
    write_loops(&mut out, loops);
    out
}

/// OBJ with one position per original vertex and one texture coordinate per
/// cut-mesh vertex.
pub fn write_textured_obj(positions: &[[f64; 3]], cut: &CutMesh, uv: &[Complex<f64>], loops: &[DualCycle]) -> String {
    let mut out = String::new();
    for p in positions {
        let _ = writeln!(out, "v {} {} {}", p[0], p[1], p[2]);
    }
    for z in uv {
        let _ = writeln!(out, "vt {:.17e} {:.17e}", z.re, z.im);
    }
    let mesh = &cut.mesh;
    for f in 0..mesh.face_count() {
        let _ = write!(out, "f");
        for t in mesh.face_vertices(f) {
            let _ = write!(out, " {}/{}", cut.vertex_origin[t] + 1, t + 1);
        }
        out.push('\n');
    }
    write_loops(&mut out, loops);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_index_forms() {
        let text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nvt 0 0\nvt 1 0\nvt 0 1\nf 1/1 2/2/ 3/3\nf -3//1 -1 -2\n# loop 0 1 0\n";
        let obj = parse_obj(text).unwrap();
        assert_eq!(obj.faces, vec![[0, 1, 2], [0, 2, 1]]);
        assert!(obj.face_uvs.is_none());
        assert_eq!(obj.loops, vec![(0, vec![1, 0])]);
    }

    #[test]
    fn rejects_quads() {
        let err = parse_obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 5, .. }));
    }

    #[test]
    fn round_trip_tetrahedron() {
        let f = crate::fixtures::tetrahedron();
        let text = write_obj(&f.positions, &f.mesh, &[]);
        let obj = parse_obj(&text).unwrap();
        assert_eq!(obj.faces, f.faces);
        assert_eq!(obj.positions, f.positions);
    }
}
