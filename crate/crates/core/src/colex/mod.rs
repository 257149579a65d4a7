//! Colored cell complexes (2- and 3-colexes).

mod boundary;
mod hex;
mod io;
mod split;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};

pub use boundary::{boundary_structure, Border, BoundaryStructure, Corner, Region, RegionClass};
pub use hex::triangular_hex;
pub use io::{hash, load, load_unchecked, parse, save, to_canonical_json};
pub use split::{dual_edges, split_colex, DualEdge, DualEndpoint, InterfaceCell, Split};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    R,
    G,
    B,
    Y,
}

impl Color {
    pub const ALL: [Color; 4] = [Color::R, Color::G, Color::B, Color::Y];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Color> {
        Self::ALL.get(i).copied()
    }

    pub fn as_char(self) -> char {
        ['r', 'g', 'b', 'y'][self.index()]
    }

    pub fn from_char(c: char) -> Option<Color> {
        match c {
            'r' => Some(Color::R),
            'g' => Some(Color::G),
            'b' => Some(Color::B),
            'y' => Some(Color::Y),
            _ => None,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// An unordered set of colors, e.g. the pair of a plaquette or the triple of a cell.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColorSet(u8);

impl ColorSet {
    pub const RGB: ColorSet = ColorSet(0b0111);
    pub const RGBY: ColorSet = ColorSet(0b1111);

    pub fn of(colors: &[Color]) -> ColorSet {
        ColorSet(colors.iter().fold(0, |m, c| m | 1 << c.index()))
    }

    pub fn single(c: Color) -> ColorSet {
        ColorSet(1 << c.index())
    }

    /// The palette of a `dimension`-colex.
    pub fn palette(dimension: usize) -> ColorSet {
        ColorSet((1u8 << (dimension + 1)) - 1)
    }

    pub fn contains(self, c: Color) -> bool {
        self.0 >> c.index() & 1 == 1
    }

    pub fn is_subset(self, other: ColorSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: ColorSet) -> ColorSet {
        ColorSet(self.0 | other.0)
    }

    pub fn intersection(self, other: ColorSet) -> ColorSet {
        ColorSet(self.0 & other.0)
    }

    pub fn difference(self, other: ColorSet) -> ColorSet {
        ColorSet(self.0 & !other.0)
    }

    pub fn with(self, c: Color) -> ColorSet {
        ColorSet(self.0 | 1 << c.index())
    }

    pub fn iter(self) -> impl Iterator<Item = Color> {
        Color::ALL.into_iter().filter(move |&c| self.contains(c))
    }

    /// The only member of a one-color set.
    pub fn sole(self) -> Option<Color> {
        (self.len() == 1).then(|| self.iter().next().unwrap())
    }

    /// Subsets with exactly two colors, in canonical order.
    pub fn pairs(self) -> Vec<ColorSet> {
        let cs: Vec<Color> = self.iter().collect();
        let mut out = Vec::new();
        for i in 0..cs.len() {
            for j in i + 1..cs.len() {
                out.push(ColorSet::of(&[cs[i], cs[j]]));
            }
        }
        out
    }

    pub fn parse(s: &str) -> Option<ColorSet> {
        let mut set = ColorSet::default();
        for ch in s.chars() {
            let c = Color::from_char(ch)?;
            if set.contains(c) {
                return None;
            }
            set = set.with(c);
        }
        Some(set)
    }
}

impl fmt::Display for ColorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.iter() {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for ColorSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ColorSet::parse(s).ok_or_else(|| Error::InvalidParameter(format!("bad color set \"{s}\"")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub color: Color,
}

impl Edge {
    pub fn new(a: usize, b: usize, color: Color) -> Edge {
        Edge {
            a: a.min(b),
            b: a.max(b),
            color,
        }
    }

    pub fn other(&self, v: usize) -> usize {
        if v == self.a {
            self.b
        } else {
            self.a
        }
    }
}

/// A plaquette or cell: a sorted vertex set with its colors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Face {
    pub vertices: Vec<usize>,
    pub colors: ColorSet,
}

impl Face {
    pub fn new(mut vertices: Vec<usize>, colors: ColorSet) -> Face {
        vertices.sort_unstable();
        vertices.dedup();
        Face { vertices, colors }
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn contains_edge(&self, e: &Edge) -> bool {
        self.colors.contains(e.color) && self.contains_vertex(e.a) && self.contains_vertex(e.b)
    }

    pub fn is_subset_of(&self, other: &Face) -> bool {
        self.colors.is_subset(other.colors) && self.vertices.iter().all(|&v| other.contains_vertex(v))
    }

    fn sort_key(&self) -> (ColorSet, usize, &[usize]) {
        (self.colors, self.vertices.first().copied().unwrap_or(0), &self.vertices)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Colex {
    pub name: String,
    pub dimension: usize,
    pub num_vertices: usize,
    pub edges: Vec<Edge>,
    pub plaquettes: Vec<Face>,
    pub cells: Vec<Face>,
}

impl Colex {
    /// Builds a colex in canonical order: edges by endpoints, faces by (colors, min vertex).
    pub fn new(
        name: impl Into<String>,
        dimension: usize,
        num_vertices: usize,
        edges: Vec<Edge>,
        plaquettes: Vec<Face>,
        cells: Vec<Face>,
    ) -> Colex {
        let mut c = Colex {
            name: name.into(),
            dimension,
            num_vertices,
            edges: edges.into_iter().map(|e| Edge::new(e.a, e.b, e.color)).collect(),
            plaquettes: plaquettes.into_iter().map(|f| Face::new(f.vertices, f.colors)).collect(),
            cells: cells.into_iter().map(|f| Face::new(f.vertices, f.colors)).collect(),
        };
        c.edges.sort();
        c.plaquettes.sort_by(|x, y| x.sort_key().cmp(&y.sort_key()));
        c.cells.sort_by(|x, y| x.sort_key().cmp(&y.sort_key()));
        c
    }

    pub fn palette(&self) -> ColorSet {
        ColorSet::palette(self.dimension)
    }

    /// For each vertex, its incident edges as `(neighbor, color, edge index)`.
    pub fn adjacency(&self) -> Vec<Vec<(usize, Color, usize)>> {
        let mut adj = vec![Vec::new(); self.num_vertices];
        for (i, e) in self.edges.iter().enumerate() {
            if e.a < self.num_vertices && e.b < self.num_vertices {
                adj[e.a].push((e.b, e.color, i));
                adj[e.b].push((e.a, e.color, i));
            }
        }
        adj
    }

    pub fn edge_lookup(&self) -> HashMap<(usize, usize), usize> {
        self.edges
            .iter()
            .enumerate()
            .map(|(i, e)| ((e.a, e.b), i))
            .collect()
    }

    /// Indices of the edges of `face` (both endpoints inside, color in the face's set).
    pub fn face_edges(&self, face: &Face) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&i| face.contains_edge(&self.edges[i]))
            .collect()
    }

    /// Indices of the cells containing plaquette `p`.
    pub fn cells_of_plaquette(&self, p: usize) -> Vec<usize> {
        let plaq = &self.plaquettes[p];
        (0..self.cells.len())
            .filter(|&c| plaq.is_subset_of(&self.cells[c]))
            .collect()
    }

    /// Indices of the plaquettes containing edge `e`.
    pub fn plaquettes_of_edge(&self, e: usize) -> Vec<usize> {
        let edge = &self.edges[e];
        (0..self.plaquettes.len())
            .filter(|&p| self.plaquettes[p].contains_edge(edge))
            .collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.a == v || e.b == v).count()
    }

    /// Sub-complex on `keep` (renumbered in the given order): induced edges, and
    /// the plaquettes and cells lying entirely inside `keep`.
    pub fn restrict(&self, name: impl Into<String>, dimension: usize, keep: &[usize]) -> Colex {
        let local: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let edges = self
            .edges
            .iter()
            .filter_map(|e| Some(Edge::new(*local.get(&e.a)?, *local.get(&e.b)?, e.color)))
            .collect();
        let faces = |fs: &[Face]| -> Vec<Face> {
            fs.iter()
                .filter_map(|f| {
                    let vs: Option<Vec<usize>> = f.vertices.iter().map(|v| local.get(v).copied()).collect();
                    Some(Face::new(vs?, f.colors))
                })
                .collect()
        };
        let cells = if dimension == 3 { faces(&self.cells) } else { Vec::new() };
        Colex::new(name, dimension, keep.len(), edges, faces(&self.plaquettes), cells)
    }

    /// Same complex with every color passed through `f`.
    pub fn recolor(&self, f: impl Fn(Color) -> Color) -> Colex {
        let set = |s: ColorSet| ColorSet::of(&s.iter().map(&f).collect::<Vec<_>>());
        Colex::new(
            self.name.clone(),
            self.dimension,
            self.num_vertices,
            self.edges.iter().map(|e| Edge::new(e.a, e.b, f(e.color))).collect(),
            self.plaquettes.iter().map(|p| Face::new(p.vertices.clone(), set(p.colors))).collect(),
            self.cells.iter().map(|c| Face::new(c.vertices.clone(), set(c.colors))).collect(),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Colex,
    Vertex(usize),
    Edge(usize),
    Plaquette(usize),
    Cell(usize),
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Colex => write!(f, "colex"),
            Element::Vertex(i) => write!(f, "vertex {i}"),
            Element::Edge(i) => write!(f, "edge {i}"),
            Element::Plaquette(i) => write!(f, "plaquette {i}"),
            Element::Cell(i) => write!(f, "cell {i}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub element: Element,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.element, self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn mentions(&self, element: Element) -> bool {
        self.violations.iter().any(|v| v.element == element)
    }

    fn push(&mut self, element: Element, message: impl Into<String>) {
        self.violations.push(Violation {
            element,
            message: message.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Whether the edges `edge_ids` form one cycle through every vertex of `vertices`.
fn is_single_cycle(colex: &Colex, vertices: &[usize], edge_ids: &[usize]) -> bool {
    let mut deg: HashMap<usize, usize> = vertices.iter().map(|&v| (v, 0)).collect();
    for &e in edge_ids {
        *deg.get_mut(&colex.edges[e].a).unwrap() += 1;
        *deg.get_mut(&colex.edges[e].b).unwrap() += 1;
    }
    deg.values().all(|&d| d == 2) && is_connected(colex, vertices, edge_ids)
}

fn is_connected(colex: &Colex, vertices: &[usize], edge_ids: &[usize]) -> bool {
    let Some(&start) = vertices.first() else {
        return true;
    };
    let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for &e in edge_ids {
        let Edge { a, b, .. } = colex.edges[e];
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let mut seen = HashSet::from([start]);
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &w in adj.get(&v).into_iter().flatten() {
            if seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen.len() == vertices.len()
}

/// Checks the structural invariants of a colex; violations are reported, not raised.
pub fn validate(colex: &Colex) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let d = colex.dimension;
    if d != 2 && d != 3 {
        rep.push(Element::Colex, format!("unsupported dimension {d}"));
        return rep;
    }
    let palette = colex.palette();
    let n = colex.num_vertices;

    let mut seen_edges = HashMap::new();
    for (i, e) in colex.edges.iter().enumerate() {
        if e.a >= n || e.b >= n {
            rep.push(Element::Edge(i), format!("references missing vertex (vertices 0..{n})"));
            continue;
        }
        if e.a == e.b {
            rep.push(Element::Edge(i), "is a loop");
        }
        if !palette.contains(e.color) {
            rep.push(Element::Edge(i), format!("color {} not allowed in dimension {d}", e.color));
        }
        if let Some(j) = seen_edges.insert((e.a, e.b), i) {
            rep.push(Element::Edge(i), format!("duplicates edge {j}"));
        }
    }
    if !rep.is_valid() {
        return rep;
    }

    let adj = colex.adjacency();
    for (v, inc) in adj.iter().enumerate() {
        if inc.len() > d + 1 {
            rep.push(Element::Vertex(v), format!("degree {} exceeds {}", inc.len(), d + 1));
        }
        let mut by_color: BTreeMap<Color, Vec<usize>> = BTreeMap::new();
        for &(_, c, e) in inc {
            by_color.entry(c).or_default().push(e);
        }
        for (c, es) in by_color {
            if es.len() > 1 {
                rep.push(Element::Vertex(v), format!("lies in {} {c}-edges {es:?}", es.len()));
            }
        }
    }

    let check_face = |rep: &mut ValidationReport, el: Element, f: &Face, ncolors: usize, cycle: bool| {
        if f.colors.len() != ncolors || !f.colors.is_subset(palette) {
            rep.push(el, format!("color set {} must be {ncolors} colors of {palette}", f.colors));
        }
        if let Some(&v) = f.vertices.iter().find(|&&v| v >= n) {
            rep.push(el, format!("references missing vertex {v}"));
            return;
        }
        let inner: Vec<usize> = (0..colex.edges.len())
            .filter(|&i| {
                let e = &colex.edges[i];
                f.contains_vertex(e.a) && f.contains_vertex(e.b)
            })
            .collect();
        if let Some(&bad) = inner.iter().find(|&&i| !f.colors.contains(colex.edges[i].color)) {
            rep.push(
                el,
                format!("contains edge {bad} of color {} outside {}", colex.edges[bad].color, f.colors),
            );
        }
        if cycle {
            if !is_single_cycle(colex, &f.vertices, &inner) {
                rep.push(el, "its edges do not form a single cycle");
            }
        } else {
            let trivalent = f.vertices.iter().all(|&v| {
                inner.iter().filter(|&&i| colex.edges[i].a == v || colex.edges[i].b == v).count() == 3
            });
            if !trivalent || !is_connected(colex, &f.vertices, &inner) {
                rep.push(el, "its edges do not form a connected trivalent graph");
            }
        }
    };
    for (i, p) in colex.plaquettes.iter().enumerate() {
        check_face(&mut rep, Element::Plaquette(i), p, 2, true);
    }
    if d == 2 && !colex.cells.is_empty() {
        rep.push(Element::Colex, "2-colex must not have cells");
    }
    if d == 3 {
        for (i, c) in colex.cells.iter().enumerate() {
            check_face(&mut rep, Element::Cell(i), c, 3, false);
        }
    }
    let mut seen_faces = HashMap::new();
    for (i, p) in colex.plaquettes.iter().enumerate() {
        if let Some(j) = seen_faces.insert((&p.vertices, p.colors), i) {
            rep.push(Element::Plaquette(i), format!("duplicates plaquette {j}"));
        }
    }
    if !rep.is_valid() {
        return rep;
    }
    for i in 0..colex.edges.len() {
        if colex.plaquettes_of_edge(i).is_empty() {
            rep.push(Element::Edge(i), "lies in no plaquette");
        }
    }
    if d == 3 {
        for p in 0..colex.plaquettes.len() {
            let k = colex.cells_of_plaquette(p).len();
            if k == 0 || k > 2 {
                rep.push(Element::Plaquette(p), format!("lies in {k} cells (expected 1 or 2)"));
            }
        }
    }
    rep
}

/// The minimal simplicial colex: the `(D+1)`-cube without its origin.
///
/// Vertex `i` is the bit vector `i + 1`; the color of an edge is the index of
/// the bit in which its endpoints differ.
pub fn minimal_colex(dimension: usize) -> Result<Colex> {
    if dimension != 2 && dimension != 3 {
        return Err(Error::UnsupportedDimension(dimension));
    }
    let bits = dimension + 1;
    let top = 1usize << bits;
    let idx = |v: usize| v - 1;
    let color = |i: usize| Color::from_index(i).unwrap();
    let mut edges = Vec::new();
    for v in 1..top {
        for i in 0..bits {
            let w = v ^ 1 << i;
            if w != 0 && v < w {
                edges.push(Edge::new(idx(v), idx(w), color(i)));
            }
        }
    }
    // faces spanned by the directions in `free`, with the other coordinates fixed (not all zero)
    let faces = |free: usize| -> Vec<Face> {
        let fixed_dirs: Vec<usize> = (0..bits).filter(|i| free >> i & 1 == 0).collect();
        let colors = ColorSet::of(&(0..bits).filter(|i| free >> i & 1 == 1).map(color).collect::<Vec<_>>());
        (1..1usize << fixed_dirs.len())
            .map(|assign| {
                let base: usize = fixed_dirs
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| assign >> k & 1 == 1)
                    .map(|(_, &i)| 1 << i)
                    .sum();
                let vs = (0..top)
                    .filter(|&v| v & !free == base)
                    .map(idx)
                    .collect();
                Face::new(vs, colors)
            })
            .collect()
    };
    let masks_of_weight = |w: u32| (1..top).filter(move |m: &usize| m.count_ones() == w);
    let plaquettes = masks_of_weight(2).flat_map(faces).collect();
    let cells = if dimension == 3 {
        masks_of_weight(3).flat_map(faces).collect()
    } else {
        Vec::new()
    };
    let name = if dimension == 2 { "tri7" } else { "tetra15" };
    Ok(Colex::new(name, dimension, top - 1, edges, plaquettes, cells))
}

/// Bundled and generated colexes by name.
pub fn builtin(name: &str) -> Result<Colex> {
    match name {
        "tri7" => minimal_colex(2),
        "tetra15" => minimal_colex(3),
        "tri-hex-d3" => triangular_hex(3),
        "tri-hex-d5" => triangular_hex(5),
        "tri-hex-d7" => triangular_hex(7),
        other => Err(Error::InvalidParameter(format!(
            "unknown builtin colex \"{other}\" (expected one of: {})",
            BUILTINS.join(", ")
        ))),
    }
}

pub const BUILTINS: [&str; 5] = ["tri7", "tetra15", "tri-hex-d3", "tri-hex-d5", "tri-hex-d7"];
