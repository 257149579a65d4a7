//! Triangular 2-colexes cut from the hexagonal lattice.

use std::collections::{BTreeMap, HashMap};

use super::{Color, ColorSet, Colex, Edge, Face};
use crate::error::{Error, Result};

const NEIGHBORS: [(i64, i64); 6] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)];

fn is_center(a: i64, b: i64) -> bool {
    (a - b + 1).rem_euclid(3) == 0
}

fn center_color(a: i64) -> Color {
    Color::from_index(a.rem_euclid(3) as usize).unwrap()
}

/// The triangular color code lattice of odd distance `d` (`n = (3d² + 1) / 4`).
///
/// Points `(a, b)` of the triangular lattice with `a, b ≥ 0`, `a + b ≤ 3(d-1)/2`
/// are split into plaquette centers and qubits by a 3-coloring. Qubits adjacent
/// in the lattice are joined by an edge; along each side, the two qubits next
/// to a boundary center are joined as well, closing its plaquette.
pub fn triangular_hex(d: usize) -> Result<Colex> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("distance must be odd and at least 3, got {d}")));
    }
    let l = (3 * (d - 1) / 2) as i64;
    let inside = |a: i64, b: i64| a >= 0 && b >= 0 && a + b <= l;
    let mut qubits = Vec::new();
    let mut centers = Vec::new();
    for a in 0..=l {
        for b in 0..=l - a {
            if is_center(a, b) {
                centers.push((a, b));
            } else {
                qubits.push((a, b));
            }
        }
    }
    let index: HashMap<(i64, i64), usize> = qubits.iter().enumerate().map(|(i, &q)| (q, i)).collect();
    let nbrs = |(a, b): (i64, i64)| NEIGHBORS.iter().map(move |&(da, db)| (a + da, b + db));

    let mut edges: BTreeMap<(usize, usize), Color> = BTreeMap::new();
    for &q in &qubits {
        for r in nbrs(q) {
            if is_center(r.0, r.1) || !inside(r.0, r.1) {
                continue;
            }
            let common: Vec<(i64, i64)> = nbrs(q).filter(|s| nbrs(r).any(|t| t == *s)).collect();
            let used = ColorSet::of(&common.iter().map(|&(a, _)| center_color(a)).collect::<Vec<_>>());
            let color = ColorSet::RGB.difference(used).sole().expect("two differently colored centers");
            let (i, j) = (index[&q], index[&r]);
            edges.insert((i.min(j), i.max(j)), color);
        }
    }

    let on_side = |(a, b): (i64, i64)| -> Option<[(i64, i64); 2]> {
        if b == 0 {
            Some([(a - 1, 0), (a + 1, 0)])
        } else if a == 0 {
            Some([(0, b - 1), (0, b + 1)])
        } else if a + b == l {
            Some([(a - 1, b + 1), (a + 1, b - 1)])
        } else {
            None
        }
    };
    let mut plaquettes = Vec::new();
    for &c in &centers {
        let pair = ColorSet::RGB.difference(ColorSet::single(center_color(c.0)));
        let verts: Vec<usize> = nbrs(c).filter(|&(a, b)| inside(a, b)).map(|q| index[&q]).collect();
        if let Some([u, w]) = on_side(c) {
            let (u, w) = (index[&u], index[&w]);
            // color alternates around the plaquette
            let other = edges
                .iter()
                .find(|(&(x, y), _)| (x == u || y == u) && verts.contains(&x) && verts.contains(&y))
                .map(|(_, &col)| col)
                .expect("side qubit has a plaquette edge");
            let color = pair.difference(ColorSet::single(other)).sole().unwrap();
            edges.insert((u.min(w), u.max(w)), color);
        }
        plaquettes.push(Face::new(verts, pair));
    }
    let edges = edges.into_iter().map(|((a, b), c)| Edge::new(a, b, c)).collect();
    Ok(Colex::new(format!("tri-hex-d{d}"), 2, qubits.len(), edges, plaquettes, Vec::new()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colex::{boundary_structure, validate};

    #[test]
    fn sizes_and_validity() {
        for (d, n) in [(3, 7), (5, 19), (7, 37)] {
            let c = triangular_hex(d).unwrap();
            assert_eq!(c.num_vertices, n);
            let rep = validate(&c);
            assert!(rep.is_valid(), "d={d}: {rep}");
            let b = boundary_structure(&c).unwrap();
            assert!(b.is_triangular(), "d={d}: {b:?}");
        }
        assert!(triangular_hex(4).is_err());
    }

    #[test]
    fn d3_matches_minimal_shape() {
        let c = triangular_hex(3).unwrap();
        assert_eq!(c.edges.len(), 9);
        assert!(c.plaquettes.iter().all(|p| p.vertices.len() == 4));
        let corners: Vec<usize> = (0..7).filter(|&v| c.degree(v) == 2).collect();
        assert_eq!(corners.len(), 3);
    }
}
