//! Splitting a tetrahedral 3-colex at one facet into an outer 2-colex and an inner 3-colex.

use std::fmt;

use super::{boundary_structure, Color, ColorSet, Colex};
use crate::error::{Error, Result};

/// Where a dual edge ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DualEndpoint {
    /// A cell of the inner colex, by inner cell index.
    InnerCell(usize),
    /// The unique outer plaquette of an interface cell, by outer plaquette index.
    OuterPlaquette(usize),
    /// A facet of the tetrahedron other than the split one.
    Facet,
}

impl fmt::Display for DualEndpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DualEndpoint::InnerCell(c) => write!(f, "inner-cell:{c}"),
            DualEndpoint::OuterPlaquette(p) => write!(f, "outer-plaquette:{p}"),
            DualEndpoint::Facet => write!(f, "facet"),
        }
    }
}

/// The edge dual to an inner plaquette.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DualEdge {
    /// Inner plaquette index.
    pub plaquette: usize,
    pub a: DualEndpoint,
    pub b: DualEndpoint,
}

/// A cell of the 3-colex touching both the outer and the inner vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterfaceCell {
    /// Cell index in the 3-colex.
    pub cell: usize,
    pub colors: ColorSet,
    /// Its unique outer plaquette, by outer plaquette index.
    pub outer_plaquette: usize,
    /// Its inner vertices, by inner vertex index.
    pub inner_vertices: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Split {
    pub colex3: Colex,
    pub facet: ColorSet,
    /// The color absent from the facet.
    pub apex: Color,
    /// Outer 2-colex, recolored so that its palette is `rgb`.
    pub outer: Colex,
    pub inner: Colex,
    /// 3-colex vertex of each outer vertex.
    pub outer_vertices: Vec<usize>,
    /// 3-colex vertex of each inner vertex.
    pub inner_vertices: Vec<usize>,
    /// 3-colex plaquette of each outer plaquette.
    pub outer_plaquettes: Vec<usize>,
    /// 3-colex plaquette of each inner plaquette.
    pub inner_plaquettes: Vec<usize>,
    /// 3-colex cell of each inner cell.
    pub inner_cells: Vec<usize>,
    pub interface: Vec<InterfaceCell>,
}

fn find_face(faces: &[super::Face], target: &super::Face) -> Option<usize> {
    faces.iter().position(|f| f == target)
}

/// Splits a tetrahedral 3-colex at the facet colored `facet`.
pub fn split_colex(colex3: &Colex, facet: ColorSet) -> Result<Split> {
    if colex3.dimension != 3 {
        return Err(Error::UnsupportedDimension(colex3.dimension));
    }
    let bs = boundary_structure(colex3)?;
    if !bs.is_tetrahedral() {
        return Err(Error::InvalidColex(format!(
            "{} is not tetrahedral: regions {:?}",
            colex3.name,
            bs.regions.iter().map(|r| r.colors.to_string()).collect::<Vec<_>>()
        )));
    }
    let region = match bs.region_with_colors(facet).as_slice() {
        [r] => *r,
        _ => {
            return Err(Error::InvalidParameter(format!(
                "{facet} is not a facet of {}",
                colex3.name
            )))
        }
    };
    let apex = ColorSet::RGBY.difference(facet).sole().expect("facet is a triple");
    let outer_vertices = bs.regions[region].vertices.clone();
    let mut is_outer = vec![false; colex3.num_vertices];
    for &v in &outer_vertices {
        is_outer[v] = true;
    }
    let inner_vertices: Vec<usize> = (0..colex3.num_vertices).filter(|&v| !is_outer[v]).collect();

    let to_rgb = |c: Color| if c == Color::Y { apex } else { c };
    let outer_raw = colex3.restrict(format!("{}-outer-{facet}", colex3.name), 2, &outer_vertices);
    let outer = outer_raw.recolor(to_rgb);
    let inner = colex3.restrict(format!("{}-inner-{facet}", colex3.name), 3, &inner_vertices);

    let lift = |local: &[usize], verts: &[usize]| -> Vec<usize> { verts.iter().map(|&v| local[v]).collect() };
    let outer_plaquettes: Vec<usize> = outer_raw
        .plaquettes
        .iter()
        .map(|p| {
            let f = super::Face::new(lift(&outer_vertices, &p.vertices), p.colors);
            find_face(&colex3.plaquettes, &f).expect("restricted plaquette exists")
        })
        .collect();
    let inner_plaquettes: Vec<usize> = inner
        .plaquettes
        .iter()
        .map(|p| {
            let f = super::Face::new(lift(&inner_vertices, &p.vertices), p.colors);
            find_face(&colex3.plaquettes, &f).expect("restricted plaquette exists")
        })
        .collect();
    let inner_cells: Vec<usize> = inner
        .cells
        .iter()
        .map(|c| {
            let f = super::Face::new(lift(&inner_vertices, &c.vertices), c.colors);
            find_face(&colex3.cells, &f).expect("restricted cell exists")
        })
        .collect();

    let mut interface = Vec::new();
    for (ci, cell) in colex3.cells.iter().enumerate() {
        let touches_outer = cell.vertices.iter().any(|&v| is_outer[v]);
        if !touches_outer {
            continue;
        }
        if !cell.colors.contains(apex) {
            return Err(Error::Pathological(format!(
                "cell {ci} ({}) touches the {facet} facet but has no {apex}-edges",
                cell.colors
            )));
        }
        let outer_ps: Vec<usize> = outer_plaquettes
            .iter()
            .enumerate()
            .filter(|(_, &p)| colex3.plaquettes[p].is_subset_of(cell))
            .map(|(i, _)| i)
            .collect();
        if outer_ps.len() != 1 {
            return Err(Error::Pathological(format!(
                "interface cell {ci} ({}) contains {} outer plaquettes (expected exactly 1)",
                cell.colors,
                outer_ps.len()
            )));
        }
        let inner_local: Vec<usize> = cell
            .vertices
            .iter()
            .filter(|&&v| !is_outer[v])
            .map(|v| inner_vertices.binary_search(v).unwrap())
            .collect();
        interface.push(InterfaceCell {
            cell: ci,
            colors: cell.colors,
            outer_plaquette: outer_ps[0],
            inner_vertices: inner_local,
        });
    }

    Ok(Split {
        colex3: colex3.clone(),
        facet,
        apex,
        outer,
        inner,
        outer_vertices,
        inner_vertices,
        outer_plaquettes,
        inner_plaquettes,
        inner_cells,
        interface,
    })
}

impl Split {
    pub fn n3(&self) -> usize {
        self.colex3.num_vertices
    }

    pub fn n_outer(&self) -> usize {
        self.outer_vertices.len()
    }

    pub fn n_inner(&self) -> usize {
        self.inner_vertices.len()
    }

    /// Color in the outer colex of a color of the 3-colex.
    pub fn outer_color(&self, c: Color) -> Color {
        if c == Color::Y {
            self.apex
        } else {
            c
        }
    }

    pub fn outer_pair(&self, pair: ColorSet) -> ColorSet {
        ColorSet::of(&pair.iter().map(|c| self.outer_color(c)).collect::<Vec<_>>())
    }

    /// The facet color not in `pair`: the color of the strings whose endpoints
    /// are `pair`-plaquettes.
    pub fn string_color(&self, pair: ColorSet) -> Color {
        self.facet.difference(pair).sole().expect("pair inside facet")
    }

    pub fn check_pair(&self, pair: ColorSet) -> Result<()> {
        if pair.len() != 2 || !pair.is_subset(self.facet) {
            return Err(Error::IncompatiblePair {
                pair: pair.to_string(),
                facet: self.facet.to_string(),
            });
        }
        Ok(())
    }

    /// Inner plaquette indices of the given pair.
    pub fn inner_plaquettes_of(&self, pair: ColorSet) -> Vec<usize> {
        (0..self.inner.plaquettes.len())
            .filter(|&p| self.inner.plaquettes[p].colors == pair)
            .collect()
    }

    /// Outer plaquette indices whose 3-colex color pair is `pair`.
    pub fn outer_plaquettes_of(&self, pair: ColorSet) -> Vec<usize> {
        (0..self.outer_plaquettes.len())
            .filter(|&i| self.colex3.plaquettes[self.outer_plaquettes[i]].colors == pair)
            .collect()
    }

    /// Inner cells containing every color of `pair`.
    pub fn inner_cells_of(&self, pair: ColorSet) -> Vec<usize> {
        (0..self.inner.cells.len())
            .filter(|&c| pair.is_subset(self.inner.cells[c].colors))
            .collect()
    }

    /// One dual edge per inner plaquette of `pair`, in inner plaquette order.
    pub fn dual_edges(&self, pair: ColorSet) -> Result<Vec<DualEdge>> {
        self.check_pair(pair)?;
        let mut out = Vec::new();
        for p in self.inner_plaquettes_of(pair) {
            let p3 = self.inner_plaquettes[p];
            let mut ends: Vec<DualEndpoint> = self
                .colex3
                .cells_of_plaquette(p3)
                .into_iter()
                .map(|c| {
                    if let Some(i) = self.inner_cells.iter().position(|&x| x == c) {
                        DualEndpoint::InnerCell(i)
                    } else {
                        let ic = self.interface.iter().find(|ic| ic.cell == c).expect("cell is inner or interface");
                        DualEndpoint::OuterPlaquette(ic.outer_plaquette)
                    }
                })
                .collect();
            while ends.len() < 2 {
                ends.push(DualEndpoint::Facet);
            }
            ends.sort();
            out.push(DualEdge {
                plaquette: p,
                a: ends[0],
                b: ends[1],
            });
        }
        Ok(out)
    }
}

/// Dual edges of the inner `pair`-plaquettes when splitting `colex3` at `facet`.
pub fn dual_edges(colex3: &Colex, pair: ColorSet, facet: ColorSet) -> Result<Vec<DualEdge>> {
    split_colex(colex3, facet)?.dual_edges(pair)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colex::{boundary_structure, minimal_colex, validate, RegionClass};

    fn tetra_split() -> Split {
        split_colex(&minimal_colex(3).unwrap(), ColorSet::RGB).unwrap()
    }

    #[test]
    fn split_counts() {
        let s = tetra_split();
        assert_eq!(s.n_outer(), 7);
        assert_eq!(s.n_inner(), 8);
        assert_eq!(s.outer_vertices, (0..7).collect::<Vec<_>>());
        assert!(validate(&s.outer).is_valid());
        assert!(validate(&s.inner).is_valid());
        assert_eq!(s.outer.plaquettes.len(), 3);
        assert_eq!(s.inner.plaquettes.len(), 6);
        assert_eq!(s.inner.cells.len(), 1);
        assert_eq!(s.interface.len(), 3);
    }

    #[test]
    fn interface_cells_map_to_matching_pairs() {
        let s = tetra_split();
        for ic in &s.interface {
            let op = s.colex3.plaquettes[s.outer_plaquettes[ic.outer_plaquette]].colors;
            assert_eq!(op.with(Color::Y), ic.colors);
            assert_eq!(ic.inner_vertices.len(), 4);
        }
    }

    #[test]
    fn inner_colex_is_frozen_with_y_corners() {
        let s = tetra_split();
        let b = boundary_structure(&s.inner).unwrap();
        assert_eq!(b.regions.len(), 6);
        assert!(b.regions.iter().all(|r| r.class == RegionClass::Frozen));
        assert_eq!(b.corners.len(), 8);
        assert!(b.corners.iter().all(|c| c.color == Color::Y));
    }

    #[test]
    fn rg_dual_edges() {
        let s = tetra_split();
        let rg = ColorSet::of(&[Color::R, Color::G]);
        let duals = s.dual_edges(rg).unwrap();
        assert_eq!(duals.len(), s.inner_plaquettes_of(rg).len());
        assert_eq!(duals.len(), 2);
        let ends: Vec<(DualEndpoint, DualEndpoint)> = duals.iter().map(|d| (d.a, d.b)).collect();
        assert!(ends.contains(&(DualEndpoint::InnerCell(0), DualEndpoint::Facet)));
        assert!(ends.iter().any(|e| matches!(e, (DualEndpoint::InnerCell(0), DualEndpoint::OuterPlaquette(_)))));
        let ry = ColorSet::of(&[Color::R, Color::Y]);
        assert!(matches!(s.dual_edges(ry), Err(Error::IncompatiblePair { .. })));
    }

    #[test]
    fn other_facets_split_too() {
        let c = minimal_colex(3).unwrap();
        for facet in ["rgy", "rby", "gby"] {
            let s = split_colex(&c, facet.parse().unwrap()).unwrap();
            assert_eq!(s.n_outer() + s.n_inner(), 15);
            assert!(validate(&s.outer).is_valid());
            assert!(boundary_structure(&s.outer).unwrap().is_triangular());
        }
    }
}
