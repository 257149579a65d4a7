//! JSON colex files and the canonical hash.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{validate, Color, ColorSet, Colex, Edge, Face};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct EdgeRecord {
    a: usize,
    b: usize,
    color: String,
}

#[derive(Serialize, Deserialize)]
struct FaceRecord {
    vertices: Vec<usize>,
    colors: String,
}

#[derive(Serialize, Deserialize)]
struct ColexFile {
    name: String,
    dimension: usize,
    vertices: usize,
    edges: Vec<EdgeRecord>,
    plaquettes: Vec<FaceRecord>,
    #[serde(default)]
    cells: Vec<FaceRecord>,
}

impl From<&Colex> for ColexFile {
    fn from(c: &Colex) -> Self {
        let c = Colex::new(
            c.name.clone(),
            c.dimension,
            c.num_vertices,
            c.edges.clone(),
            c.plaquettes.clone(),
            c.cells.clone(),
        );
        let face = |f: &Face| FaceRecord {
            vertices: f.vertices.clone(),
            colors: f.colors.to_string(),
        };
        ColexFile {
            name: c.name.clone(),
            dimension: c.dimension,
            vertices: c.num_vertices,
            edges: c
                .edges
                .iter()
                .map(|e| EdgeRecord {
                    a: e.a,
                    b: e.b,
                    color: e.color.to_string(),
                })
                .collect(),
            plaquettes: c.plaquettes.iter().map(face).collect(),
            cells: c.cells.iter().map(face).collect(),
        }
    }
}

fn convert(file: ColexFile) -> Result<Colex> {
    let n = file.vertices;
    let mut edges = Vec::with_capacity(file.edges.len());
    let mut seen = HashSet::new();
    for (i, e) in file.edges.iter().enumerate() {
        let mut chars = e.color.chars();
        let color = match (chars.next().and_then(Color::from_char), chars.next()) {
            (Some(c), None) => c,
            _ => return Err(Error::Format(format!("edge {i}: unknown color token \"{}\"", e.color))),
        };
        for v in [e.a, e.b] {
            if v >= n {
                return Err(Error::Format(format!("edge {i}: references missing vertex {v} (file declares {n})")));
            }
        }
        let edge = Edge::new(e.a, e.b, color);
        if !seen.insert((edge.a, edge.b)) {
            return Err(Error::Format(format!("edge {i}: duplicate edge {}-{}", edge.a, edge.b)));
        }
        edges.push(edge);
    }
    let faces = |kind: &str, recs: &[FaceRecord]| -> Result<Vec<Face>> {
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(recs.len());
        for (i, f) in recs.iter().enumerate() {
            let colors = ColorSet::parse(&f.colors)
                .ok_or_else(|| Error::Format(format!("{kind} {i}: unknown color token \"{}\"", f.colors)))?;
            if let Some(&v) = f.vertices.iter().find(|&&v| v >= n) {
                return Err(Error::Format(format!("{kind} {i}: references missing vertex {v} (file declares {n})")));
            }
            let face = Face::new(f.vertices.clone(), colors);
            if face.vertices.len() != f.vertices.len() {
                return Err(Error::Format(format!("{kind} {i}: repeated vertex")));
            }
            if !seen.insert(face.clone()) {
                return Err(Error::Format(format!("{kind} {i}: duplicate {kind}")));
            }
            out.push(face);
        }
        Ok(out)
    };
    let plaquettes = faces("plaquette", &file.plaquettes)?;
    let cells = faces("cell", &file.cells)?;
    Ok(Colex::new(file.name, file.dimension, n, edges, plaquettes, cells))
}

/// Parses a colex document without validating its invariants.
pub fn parse(text: &str) -> Result<Colex> {
    let file: ColexFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    convert(file)
}

pub fn load_unchecked(path: impl AsRef<Path>) -> Result<Colex> {
    parse(&fs::read_to_string(path)?)
}

/// Reads and validates a colex file.
pub fn load(path: impl AsRef<Path>) -> Result<Colex> {
    let c = load_unchecked(path)?;
    let report = validate(&c);
    if !report.is_valid() {
        return Err(Error::InvalidColex(report.to_string()));
    }
    Ok(c)
}

pub fn save(colex: &Colex, path: impl AsRef<Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(&ColexFile::from(colex)).map_err(|e| Error::Format(e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Compact JSON with every list in canonical order.
pub fn to_canonical_json(colex: &Colex) -> String {
    serde_json::to_string(&ColexFile::from(colex)).expect("plain data serializes")
}

/// Hex SHA-256 of the canonical JSON.
pub fn hash(colex: &Colex) -> String {
    Sha256::digest(to_canonical_json(colex).as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
