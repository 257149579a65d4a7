//! Regions, borders and corners of a colex boundary, computed intrinsically.

use std::collections::{BTreeMap, HashMap};

use super::{validate, Color, ColorSet, Colex};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RegionClass {
    Free,
    Frozen,
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    /// Colors of the missing cell this region would glue to.
    pub colors: ColorSet,
    pub vertices: Vec<usize>,
    pub plaquettes: Vec<usize>,
    pub class: RegionClass,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Border {
    pub colors: ColorSet,
    pub edges: Vec<usize>,
    /// The two regions it separates (3D only).
    pub regions: Option<(usize, usize)>,
    /// Indices into [`BoundaryStructure::corners`] of its endpoints.
    pub corners: Vec<usize>,
    pub odd: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Corner {
    pub color: Color,
    pub vertex: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryStructure {
    pub regions: Vec<Region>,
    pub borders: Vec<Border>,
    pub corners: Vec<Corner>,
}

impl BoundaryStructure {
    pub fn borders_of(&self, region: usize) -> impl Iterator<Item = &Border> {
        self.borders
            .iter()
            .filter(move |b| matches!(b.regions, Some((x, y)) if x == region || y == region))
    }

    /// Number of odd borders the two regions share.
    pub fn shared_odd_borders(&self, r1: usize, r2: usize) -> usize {
        self.borders
            .iter()
            .filter(|b| b.odd && (b.regions == Some((r1, r2)) || b.regions == Some((r2, r1))))
            .count()
    }

    pub fn region_with_colors(&self, colors: ColorSet) -> Vec<usize> {
        (0..self.regions.len())
            .filter(|&i| self.regions[i].colors == colors)
            .collect()
    }

    /// Whether there are three borders and three corners, one per pair and color.
    pub fn is_triangular(&self) -> bool {
        let pairs: std::collections::BTreeSet<ColorSet> = self.borders.iter().map(|b| b.colors).collect();
        let corner_colors: std::collections::BTreeSet<Color> = self.corners.iter().map(|c| c.color).collect();
        self.regions.is_empty()
            && self.borders.len() == 3
            && pairs.len() == 3
            && self.corners.len() == 3
            && corner_colors.len() == 3
    }

    /// Whether there are four free regions with distinct color triples.
    pub fn is_tetrahedral(&self) -> bool {
        let triples: std::collections::BTreeSet<ColorSet> = self.regions.iter().map(|r| r.colors).collect();
        self.regions.len() == 4 && triples.len() == 4 && self.regions.iter().all(|r| r.class == RegionClass::Free)
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }

    /// Groups of `items` by root, ordered by their smallest member.
    fn groups(&mut self, items: &[usize]) -> Vec<Vec<usize>> {
        let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &i in items {
            let r = self.find(i);
            by_root.entry(r).or_default().push(i);
        }
        let mut gs: Vec<Vec<usize>> = by_root.into_values().collect();
        gs.sort();
        gs
    }
}

/// Splits `edge_ids` into paths that meet only at non-corner vertices.
fn split_at_corners(colex: &Colex, edge_ids: &[usize], is_corner: &[bool]) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::new(colex.edges.len());
    let mut at_vertex: HashMap<usize, Vec<usize>> = HashMap::new();
    for &e in edge_ids {
        let edge = &colex.edges[e];
        for v in [edge.a, edge.b] {
            if !is_corner[v] {
                at_vertex.entry(v).or_default().push(e);
            }
        }
    }
    for es in at_vertex.values() {
        for w in es.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    uf.groups(edge_ids)
}

/// Corner endpoints of a border path, as corner indices.
fn endpoint_corners(colex: &Colex, path: &[usize], corner_of: &HashMap<usize, usize>) -> Vec<usize> {
    let mut deg: BTreeMap<usize, usize> = BTreeMap::new();
    for &e in path {
        *deg.entry(colex.edges[e].a).or_default() += 1;
        *deg.entry(colex.edges[e].b).or_default() += 1;
    }
    let mut cs: Vec<usize> = deg
        .iter()
        .filter(|&(v, &d)| d == 1 || corner_of.contains_key(v))
        .filter_map(|(v, _)| corner_of.get(v).copied())
        .collect();
    cs.sort_unstable();
    cs.dedup();
    cs
}

fn corners(colex: &Colex) -> Result<Vec<Corner>> {
    let palette = colex.palette();
    let adj = colex.adjacency();
    let mut out = Vec::new();
    for (v, inc) in adj.iter().enumerate() {
        if inc.len() > colex.dimension {
            continue;
        }
        let present = ColorSet::of(&inc.iter().map(|&(_, c, _)| c).collect::<Vec<_>>());
        let missing = palette.difference(present);
        let color = missing.sole().ok_or_else(|| {
            Error::InvalidColex(format!("vertex {v} misses edges of colors {missing}; corners miss exactly one"))
        })?;
        out.push(Corner { color, vertex: v });
    }
    Ok(out)
}

fn make_borders(
    colex: &Colex,
    groups: Vec<(ColorSet, Option<(usize, usize)>, Vec<usize>)>,
    corners: &[Corner],
) -> Vec<Border> {
    let mut is_corner = vec![false; colex.num_vertices];
    let corner_of: HashMap<usize, usize> = corners.iter().enumerate().map(|(i, c)| (c.vertex, i)).collect();
    for c in corners {
        is_corner[c.vertex] = true;
    }
    let mut borders = Vec::new();
    for (colors, regions, edge_ids) in groups {
        for path in split_at_corners(colex, &edge_ids, &is_corner) {
            let cs = endpoint_corners(colex, &path, &corner_of);
            let odd = cs.len() == 2 && corners[cs[0]].color != corners[cs[1]].color;
            borders.push(Border {
                colors,
                edges: path,
                regions,
                corners: cs,
                odd,
            });
        }
    }
    borders
}

/// Regions, borders and corners of a valid colex.
///
/// A boundary plaquette of pair `P` lying in one cell of triple `T` belongs to
/// a region colored `P` plus the color missing from `T`. Regions are the
/// edge-connected components of boundary plaquettes with equal colors. Borders
/// are the edges, of the two colors the adjoining regions share, lying in
/// plaquettes of both; they are cut at corners, the vertices with a missing
/// edge color. In 2D there are no regions and borders are the boundary edges,
/// grouped by the pair of the missing plaquette.
pub fn boundary_structure(colex: &Colex) -> Result<BoundaryStructure> {
    let report = validate(colex);
    if !report.is_valid() {
        return Err(Error::InvalidColex(report.to_string()));
    }
    let palette = colex.palette();
    let corners = corners(colex)?;
    if colex.dimension == 2 {
        let mut groups: BTreeMap<ColorSet, Vec<usize>> = BTreeMap::new();
        for e in 0..colex.edges.len() {
            let ps = colex.plaquettes_of_edge(e);
            if ps.len() == 1 {
                let third = palette.difference(colex.plaquettes[ps[0]].colors);
                groups
                    .entry(third.with(colex.edges[e].color))
                    .or_default()
                    .push(e);
            }
        }
        let groups = groups.into_iter().map(|(c, es)| (c, None, es)).collect();
        let borders = make_borders(colex, groups, &corners);
        return Ok(BoundaryStructure {
            regions: Vec::new(),
            borders,
            corners,
        });
    }

    // 3D regions
    let mut region_color = vec![None; colex.plaquettes.len()];
    for p in 0..colex.plaquettes.len() {
        let cells = colex.cells_of_plaquette(p);
        if cells.len() == 1 {
            let missing = palette.difference(colex.cells[cells[0]].colors);
            region_color[p] = Some(colex.plaquettes[p].colors.union(missing));
        }
    }
    let plaq_edges: Vec<Vec<usize>> = colex.plaquettes.iter().map(|f| colex.face_edges(f)).collect();
    let boundary: Vec<usize> = (0..colex.plaquettes.len()).filter(|&p| region_color[p].is_some()).collect();
    let mut uf = UnionFind::new(colex.plaquettes.len());
    let mut by_edge: HashMap<(usize, ColorSet), Vec<usize>> = HashMap::new();
    for &p in &boundary {
        for &e in &plaq_edges[p] {
            by_edge.entry((e, region_color[p].unwrap())).or_default().push(p);
        }
    }
    for ps in by_edge.values() {
        for w in ps.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    let mut regions: Vec<Region> = uf
        .groups(&boundary)
        .into_iter()
        .map(|plaquettes| {
            let mut vertices: Vec<usize> = plaquettes
                .iter()
                .flat_map(|&p| colex.plaquettes[p].vertices.iter().copied())
                .collect();
            vertices.sort_unstable();
            vertices.dedup();
            Region {
                colors: region_color[plaquettes[0]].unwrap(),
                vertices,
                plaquettes,
                class: RegionClass::Other,
            }
        })
        .collect();
    regions.sort_by(|a, b| (a.colors, a.vertices[0]).cmp(&(b.colors, b.vertices[0])));

    // which regions each edge touches through their plaquettes
    let mut edge_regions: Vec<Vec<usize>> = vec![Vec::new(); colex.edges.len()];
    for (r, region) in regions.iter().enumerate() {
        for &p in &region.plaquettes {
            for &e in &plaq_edges[p] {
                if !edge_regions[e].contains(&r) {
                    edge_regions[e].push(r);
                }
            }
        }
    }
    let mut groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (e, rs) in edge_regions.iter().enumerate() {
        for i in 0..rs.len() {
            for j in i + 1..rs.len() {
                let (a, b) = (rs[i].min(rs[j]), rs[i].max(rs[j]));
                let shared = regions[a].colors.intersection(regions[b].colors);
                if regions[a].colors != regions[b].colors && shared.contains(colex.edges[e].color) {
                    groups.entry((a, b)).or_default().push(e);
                }
            }
        }
    }
    let groups = groups
        .into_iter()
        .map(|((a, b), es)| (regions[a].colors.intersection(regions[b].colors), Some((a, b)), es))
        .collect();
    let borders = make_borders(colex, groups, &corners);

    for (r, region) in regions.iter_mut().enumerate() {
        let mine: Vec<&Border> = borders
            .iter()
            .filter(|b| matches!(b.regions, Some((x, y)) if x == r || y == r))
            .collect();
        let odd_count = |pair: ColorSet| mine.iter().filter(|b| b.odd && b.colors == pair).count();
        region.class = if mine.iter().all(|b| !b.odd) {
            RegionClass::Frozen
        } else if region.colors.pairs().into_iter().all(|p| odd_count(p) % 2 == 1) {
            RegionClass::Free
        } else {
            RegionClass::Other
        };
    }
    Ok(BoundaryStructure {
        regions,
        borders,
        corners,
    })
}
