use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{ScalarField, SimplicialComplex};
use crate::error::{Error, Result};

/// Parses an ASCII OFF mesh.
///
/// Face records with 1, 2, 3 or 4 indices are read as a vertex, an edge, a
/// triangle or a tetrahedron; the result is closed under faces. Anything
/// after the indices on a face line (colors) is ignored, as is `#` comment
/// text.
///
/// OFF always stores three coordinates, so trailing coordinate columns that
/// are zero at every vertex are dropped: a planar mesh comes back 2-D and its
/// height field is `y`.
pub fn parse_off(text: &str) -> Result<SimplicialComplex> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (header_line, header) = lines.next().ok_or_else(|| Error::parse(1, "empty input"))?;
    let mut header_tokens = header.split_whitespace();
    if header_tokens.next() != Some("OFF") {
        return Err(Error::parse(header_line, format!("expected `OFF` header, found `{header}`")));
    }
    let rest: Vec<&str> = header_tokens.collect();
    let (count_line, count_tokens): (usize, Vec<&str>) = if rest.is_empty() {
        let (n, l) = lines
            .next()
            .ok_or_else(|| Error::parse(header_line, "missing counts line"))?;
        (n, l.split_whitespace().collect())
    } else {
        (header_line, rest)
    };
    if count_tokens.len() < 2 {
        return Err(Error::parse(count_line, "counts line needs vertex and face counts"));
    }
    let parse_count = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::parse(count_line, format!("invalid count `{s}`")))
    };
    let nv = parse_count(count_tokens[0])?;
    let nf = parse_count(count_tokens[1])?;

    let mut coords = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (n, l) = lines
            .next()
            .ok_or_else(|| Error::parse(count_line, "unexpected end of input in vertex list"))?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() < 3 {
            return Err(Error::parse(n, "vertex line needs 3 coordinates"));
        }
        let mut c = Vec::with_capacity(3);
        for t in &toks[..3] {
            let x: f64 = t
                .parse()
                .map_err(|_| Error::parse(n, format!("non-numeric coordinate `{t}`")))?;
            if !x.is_finite() {
                return Err(Error::parse(n, format!("non-finite coordinate `{t}`")));
            }
            c.push(x);
        }
        coords.push(c);
    }

    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (n, l) = lines
            .next()
            .ok_or_else(|| Error::parse(count_line, "unexpected end of input in face list"))?;
        let mut toks = l.split_whitespace();
        let k: usize = toks
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::parse(n, "face line must start with a vertex count"))?;
        if !(1..=4).contains(&k) {
            return Err(Error::parse(n, format!("faces must have 1 to 4 vertices, found {k}")));
        }
        let mut face = Vec::with_capacity(k);
        for _ in 0..k {
            let t = toks
                .next()
                .ok_or_else(|| Error::parse(n, "face line has too few indices"))?;
            let v: usize = t
                .parse()
                .map_err(|_| Error::parse(n, format!("invalid vertex index `{t}`")))?;
            if v >= nv {
                return Err(Error::parse(n, format!("vertex index {v} out of range (0..{nv})")));
            }
            face.push(v);
        }
        faces.push((n, face));
    }

    let mut width = 3;
    while width > 1 && !coords.is_empty() && coords.iter().all(|c| c[width - 1] == 0.0) {
        width -= 1;
    }
    for c in &mut coords {
        c.truncate(width);
    }

    for (n, face) in &faces {
        let mut s = face.clone();
        s.sort_unstable();
        if s.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::parse(*n, "face repeats a vertex"));
        }
    }
    SimplicialComplex::from_simplices(coords, faces.into_iter().map(|(_, f)| f))
}

/// Writes the maximal simplices of `complex` as an OFF mesh. Coordinates
/// are padded to three entries.
pub fn write_off(complex: &SimplicialComplex) -> String {
    let faces = complex.maximal_simplices();
    let mut out = String::new();
    let _ = writeln!(out, "OFF\n{} {} 0", complex.num_vertices(), faces.len());
    for c in complex.all_coords() {
        let mut padded = c.clone();
        padded.resize(3, 0.0);
        let _ = writeln!(out, "{:?} {:?} {:?}", padded[0], padded[1], padded[2]);
    }
    for f in faces {
        let idx: Vec<String> = f.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{} {}", f.len(), idx.join(" "));
    }
    out
}

/// Parses one value per vertex, one per line, in vertex order. Blank lines
/// and `#` comments are skipped.
pub fn parse_field_csv(text: &str, complex: &SimplicialComplex) -> Result<ScalarField> {
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| Error::parse(i + 1, format!("expected one number, found `{line}`")))?;
        if !v.is_finite() {
            return Err(Error::parse(i + 1, format!("non-finite value `{line}`")));
        }
        values.push(v);
    }
    if values.len() != complex.num_vertices() {
        return Err(Error::invalid(format!(
            "field has {} values for {} vertices",
            values.len(),
            complex.num_vertices()
        )));
    }
    ScalarField::new(values)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexEntry {
    pub id: usize,
    pub coords: Vec<f64>,
}

/// The native JSON form of a complex with an optional vertex field.
///
/// `simplices` is keyed by dimension ("1", "2", "3").
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexDocument {
    pub vertices: Vec<VertexEntry>,
    #[serde(default)]
    pub simplices: BTreeMap<String, Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<Vec<f64>>,
}

impl ComplexDocument {
    pub fn from_complex(complex: &SimplicialComplex, field: Option<&ScalarField>) -> Self {
        let vertices = complex
            .all_coords()
            .iter()
            .enumerate()
            .map(|(id, c)| VertexEntry { id, coords: c.clone() })
            .collect();
        let mut simplices = BTreeMap::new();
        simplices.insert("1".to_string(), complex.edges().iter().map(|s| s.to_vec()).collect());
        simplices.insert("2".to_string(), complex.triangles().iter().map(|s| s.to_vec()).collect());
        simplices.insert("3".to_string(), complex.tetrahedra().iter().map(|s| s.to_vec()).collect());
        ComplexDocument {
            vertices,
            simplices,
            field: field.map(|f| f.values().to_vec()),
        }
    }

    /// Converts back, closing the simplex lists. Vertex ids must be a
    /// permutation of `0..n`.
    pub fn into_complex(self) -> Result<(SimplicialComplex, Option<ScalarField>)> {
        let n = self.vertices.len();
        let mut coords: Vec<Option<Vec<f64>>> = vec![None; n];
        for v in self.vertices {
            if v.id >= n || coords[v.id].is_some() {
                return Err(Error::invalid(format!("vertex ids must be a permutation of 0..{n}, found {}", v.id)));
            }
            coords[v.id] = Some(v.coords);
        }
        let coords: Vec<Vec<f64>> = coords.into_iter().map(|c| c.unwrap_or_default()).collect();
        let mut all = Vec::new();
        for (key, list) in self.simplices {
            let d: usize = key
                .parse()
                .map_err(|_| Error::invalid(format!("simplex dimension key `{key}` is not a number")))?;
            for s in list {
                if s.len() != d + 1 {
                    return Err(Error::invalid(format!("simplex {s:?} listed under dimension {d}")));
                }
                all.push(s);
            }
        }
        let complex = SimplicialComplex::from_simplices(coords, all)?;
        let field = self.field.map(|f| ScalarField::on(&complex, f)).transpose()?;
        Ok((complex, field))
    }
}
