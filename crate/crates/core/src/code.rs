//! Color codes on colexes: stabilizer, gauge and logical groups, and region operators.

use std::fmt;

use crate::colex::{boundary_structure, validate, BoundaryStructure, Colex, RegionClass, Split};
use crate::error::{Error, Result};
use crate::gf2::BitVec;
use crate::pauli::{check_stabilizer_condition, PauliGroup, PauliKind, PauliOperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CodeKind {
    Triangular2D,
    Tetrahedral3D,
    Inner3D,
}

impl fmt::Display for CodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CodeKind::Triangular2D => "2d",
            CodeKind::Tetrahedral3D => "3d",
            CodeKind::Inner3D => "inner",
        })
    }
}

/// A self-dual CSS code: every X generator has a Z twin with the same support.
#[derive(Clone, Debug)]
pub struct CodeTriple {
    pub kind: CodeKind,
    pub n: usize,
    pub s: PauliGroup,
    pub g: PauliGroup,
    pub l: PauliGroup,
    /// Qubit of each colex vertex.
    pub qubit_map: Vec<usize>,
    pub colex: Colex,
    /// Supports of the gauge generators of one type, in generator order.
    pub gauge_supports: Vec<BitVec>,
    /// Supports of the stabilizer generators of one type, in generator order.
    pub stabilizer_supports: Vec<BitVec>,
}

fn css_group(n: usize, supports: &[BitVec]) -> PauliGroup {
    let mut gens: Vec<PauliOperator> = supports.iter().map(|s| PauliOperator::of_kind(PauliKind::X, s.clone())).collect();
    gens.extend(supports.iter().map(|s| PauliOperator::of_kind(PauliKind::Z, s.clone())));
    PauliGroup::new(n, gens).expect("supports share n")
}

fn support(n: usize, vertices: &[usize]) -> BitVec {
    BitVec::from_indices(n, vertices.iter().copied())
}

impl CodeTriple {
    fn assemble(
        kind: CodeKind,
        colex: &Colex,
        gauge_supports: Vec<BitVec>,
        stabilizer_supports: Vec<BitVec>,
        logical: bool,
    ) -> Result<CodeTriple> {
        let n = colex.num_vertices;
        let g = css_group(n, &gauge_supports);
        let s = css_group(n, &stabilizer_supports);
        let l = if logical {
            PauliGroup::new(n, vec![PauliOperator::x_on(n, 0..n), PauliOperator::z_on(n, 0..n)])?
        } else {
            PauliGroup::trivial(n)
        };
        check_stabilizer_condition(&s, &g)?;
        for op in l.generators() {
            if let Some(j) = g.generators().iter().position(|h| !op.commutes(h).unwrap()) {
                return Err(Error::Code(format!("logical {op} anticommutes with gauge generator {j}")));
            }
        }
        Ok(CodeTriple {
            kind,
            n,
            s,
            g,
            l,
            qubit_map: (0..n).collect(),
            colex: colex.clone(),
            gauge_supports,
            stabilizer_supports,
        })
    }

    /// Gauge generators of one type, in support order.
    pub fn gauge_of(&self, kind: PauliKind) -> Vec<PauliOperator> {
        self.gauge_supports.iter().map(|s| PauliOperator::of_kind(kind, s.clone())).collect()
    }

    pub fn stabilizers_of(&self, kind: PauliKind) -> Vec<PauliOperator> {
        self.stabilizer_supports.iter().map(|s| PauliOperator::of_kind(kind, s.clone())).collect()
    }

    /// The logical generator of one type, if the code has one.
    pub fn logical_of(&self, kind: PauliKind) -> Option<&PauliOperator> {
        self.l.generators().iter().find(|g| g.is_pure(kind))
    }

    pub fn logical_qubits(&self) -> Result<usize> {
        crate::pauli::logical_qubit_count(&self.s, &self.g)
    }
}

fn checked_boundary(colex: &Colex) -> Result<BoundaryStructure> {
    let rep = validate(colex);
    if !rep.is_valid() {
        return Err(Error::InvalidColex(rep.to_string()));
    }
    boundary_structure(colex)
}

/// 2D color code: plaquettes generate both `S` and `G`.
pub fn build_2d(colex: &Colex) -> Result<CodeTriple> {
    if colex.dimension != 2 {
        return Err(Error::UnsupportedDimension(colex.dimension));
    }
    if !checked_boundary(colex)?.is_triangular() {
        return Err(Error::Code(format!("{} does not have a triangular boundary", colex.name)));
    }
    let n = colex.num_vertices;
    let plaqs: Vec<BitVec> = colex.plaquettes.iter().map(|p| support(n, &p.vertices)).collect();
    CodeTriple::assemble(CodeKind::Triangular2D, colex, plaqs.clone(), plaqs, true)
}

/// 3D gauge color code: plaquettes generate `G`, cells generate `S`.
pub fn build_3d(colex: &Colex) -> Result<CodeTriple> {
    if colex.dimension != 3 {
        return Err(Error::UnsupportedDimension(colex.dimension));
    }
    let bs = checked_boundary(colex)?;
    if !bs.is_tetrahedral() {
        return Err(Error::Code(format!("{} does not have a tetrahedral boundary", colex.name)));
    }
    let n = colex.num_vertices;
    let plaqs = colex.plaquettes.iter().map(|p| support(n, &p.vertices)).collect();
    let cells = colex.cells.iter().map(|c| support(n, &c.vertices)).collect();
    let code = CodeTriple::assemble(CodeKind::Tetrahedral3D, colex, plaqs, cells, true)?;
    for (r, region) in bs.regions.iter().enumerate() {
        let anti = region.vertices.len() % 2 == 1;
        if anti != (region.class == RegionClass::Free) {
            return Err(Error::Code(format!(
                "region {r} ({}) is {:?} but X_R and Z_R {}",
                region.colors,
                region.class,
                if anti { "anticommute" } else { "commute" }
            )));
        }
    }
    Ok(code)
}

/// Inner code of a split: inner plaquettes generate `G`; inner cells and the
/// inner parts of interface cells generate `S`.
pub fn build_inner(split: &Split) -> Result<CodeTriple> {
    let inner = &split.inner;
    checked_boundary(inner)?;
    let n = inner.num_vertices;
    let plaqs = inner.plaquettes.iter().map(|p| support(n, &p.vertices)).collect();
    let mut stabs: Vec<BitVec> = inner.cells.iter().map(|c| support(n, &c.vertices)).collect();
    stabs.extend(split.interface.iter().map(|ic| support(n, &ic.inner_vertices)));
    CodeTriple::assemble(CodeKind::Inner3D, inner, plaqs, stabs, false)
}

/// `X_R` or `Z_R` of region `region` of `bs`.
pub fn region_operator(code: &CodeTriple, bs: &BoundaryStructure, region: usize, kind: PauliKind) -> Result<PauliOperator> {
    let r = bs
        .regions
        .get(region)
        .ok_or_else(|| Error::InvalidParameter(format!("region {region} out of range")))?;
    if let Some(&v) = r.vertices.iter().find(|&&v| v >= code.qubit_map.len()) {
        return Err(Error::InvalidParameter(format!("region vertex {v} is not in the code's colex")));
    }
    Ok(PauliOperator::on(kind, code.n, r.vertices.iter().map(|&v| code.qubit_map[v])))
}

/// Every failure of the region commutation laws: free iff `X_R`, `Z_R`
/// anticommute, and `X_R`, `Z_R'` anticommute iff the regions share an odd
/// number of odd borders.
pub fn region_law_violations(code: &CodeTriple, bs: &BoundaryStructure) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let k = bs.regions.len();
    let xs: Vec<PauliOperator> = (0..k).map(|r| region_operator(code, bs, r, PauliKind::X)).collect::<Result<_>>()?;
    let zs: Vec<PauliOperator> = (0..k).map(|r| region_operator(code, bs, r, PauliKind::Z)).collect::<Result<_>>()?;
    for r in 0..k {
        let anti = !xs[r].commutes(&zs[r])?;
        let free = bs.regions[r].class == RegionClass::Free;
        if anti != free {
            out.push(format!("region {r}: free={free} but X_R/Z_R anticommute={anti}"));
        }
        for r2 in 0..k {
            if r2 == r {
                continue;
            }
            let anti = !xs[r].commutes(&zs[r2])?;
            let odd = bs.shared_odd_borders(r, r2) % 2 == 1;
            if anti != odd {
                out.push(format!("regions {r},{r2}: odd shared odd borders={odd} but anticommute={anti}"));
            }
        }
    }
    Ok(out)
}

/// Whether `X_R` equals the product of the region's plaquettes of the two
/// non-corner colors, for a frozen region whose corners share one color.
pub fn stab_r_identity(code: &CodeTriple, bs: &BoundaryStructure, region: usize, kind: PauliKind) -> Result<bool> {
    let r = bs
        .regions
        .get(region)
        .ok_or_else(|| Error::InvalidParameter(format!("region {region} out of range")))?;
    if r.class != RegionClass::Frozen {
        return Err(Error::InvalidParameter(format!("region {region} is not frozen")));
    }
    let corner_colors: std::collections::BTreeSet<_> = bs
        .corners
        .iter()
        .filter(|c| r.vertices.binary_search(&c.vertex).is_ok())
        .map(|c| c.color)
        .collect();
    let c = match corner_colors.iter().collect::<Vec<_>>().as_slice() {
        [c] if r.colors.contains(**c) => **c,
        _ => {
            return Err(Error::InvalidParameter(format!(
                "region {region} does not have corners of a single color of {}",
                r.colors
            )))
        }
    };
    let pair = r.colors.difference(crate::colex::ColorSet::single(c));
    let mut prod = PauliOperator::identity(code.n);
    for &p in &r.plaquettes {
        let plaq = &code.colex.plaquettes[p];
        if plaq.colors == pair {
            prod = prod.mul(&PauliOperator::on(kind, code.n, plaq.vertices.iter().map(|&v| code.qubit_map[v])))?;
        }
    }
    Ok(prod == region_operator(code, bs, region, kind)?)
}

/// Checks `∏ X_c (cells of the three non-corner colors) · ∏ X_c (cells of
/// `pair` + corner color) = ∏ X_R (regions of `pair` + corner color)` for
/// every pair, in a colex whose corners all share one color. `omit` drops a
/// region from the right-hand side.
pub fn verify_redundancy(code: &CodeTriple, bs: &BoundaryStructure, kind: PauliKind, omit: Option<usize>) -> Result<bool> {
    let colors: std::collections::BTreeSet<_> = bs.corners.iter().map(|c| c.color).collect();
    let c = match colors.iter().collect::<Vec<_>>().as_slice() {
        [c] => **c,
        _ => {
            return Err(Error::InvalidParameter(format!(
                "redundancy identity needs corners of one color, found {}",
                colors.iter().map(|c| c.to_string()).collect::<String>()
            )))
        }
    };
    let palette = code.colex.palette();
    let base = palette.difference(crate::colex::ColorSet::single(c));
    let op = |vs: &[usize]| PauliOperator::on(kind, code.n, vs.iter().map(|&v| code.qubit_map[v]));
    for pair in base.pairs() {
        let triple = pair.with(c);
        let mut lhs = PauliOperator::identity(code.n);
        for cell in &code.colex.cells {
            if cell.colors == base || cell.colors == triple {
                lhs = lhs.mul(&op(&cell.vertices))?;
            }
        }
        let mut rhs = PauliOperator::identity(code.n);
        for (i, r) in bs.regions.iter().enumerate() {
            if r.colors == triple && Some(i) != omit {
                rhs = rhs.mul(&op(&r.vertices))?;
            }
        }
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Restrictions to the outer qubits of the interface plaquette operators of `G₃`.
pub fn restrict_gauge_to_outer(code3: &CodeTriple, split: &Split) -> Result<PauliGroup> {
    if code3.n != split.n3() {
        return Err(Error::SizeMismatch(code3.n, split.n3()));
    }
    let mut is_outer = vec![false; code3.n];
    for &v in &split.outer_vertices {
        is_outer[v] = true;
    }
    let mut supports: Vec<BitVec> = Vec::new();
    for p in &split.colex3.plaquettes {
        let outer: Vec<usize> = p.vertices.iter().filter(|&&v| is_outer[v]).copied().collect();
        if outer.is_empty() || outer.len() == p.vertices.len() {
            continue;
        }
        let local = outer.iter().map(|v| split.outer_vertices.binary_search(v).unwrap());
        let s = BitVec::from_indices(split.n_outer(), local);
        if !supports.contains(&s) {
            supports.push(s);
        }
    }
    Ok(css_group(split.n_outer(), &supports))
}

/// The shared logical representatives: X and Z on every outer qubit.
#[derive(Clone, Debug)]
pub struct SharedLogicals {
    /// On the 3D register.
    pub on3: PauliGroup,
    /// On the outer register.
    pub on2: PauliGroup,
}

pub fn shared_logicals(code3: &CodeTriple, code2: &CodeTriple, split: &Split) -> Result<SharedLogicals> {
    let n2 = split.n_outer();
    if code2.n != n2 {
        return Err(Error::SizeMismatch(code2.n, n2));
    }
    let on2 = PauliGroup::new(n2, vec![PauliOperator::x_on(n2, 0..n2), PauliOperator::z_on(n2, 0..n2)])?;
    let on3 = on2.embed(code3.n, &split.outer_vertices);
    for (grp, code, what) in [(&on3, code3, "3D gauge group"), (&on2, code2, "2D gauge group")] {
        for op in grp.generators() {
            if code.g.generators().iter().any(|h| !op.commutes(h).unwrap()) {
                return Err(Error::Code(format!("outer logical {op} does not commute with the {what}")));
            }
        }
    }
    let (x, z) = (&on2.generators()[0], &on2.generators()[1]);
    if x.commutes(z)? {
        return Err(Error::Code("outer logical X and Z commute".into()));
    }
    for op in on2.generators() {
        if code2.s.contains_up_to_sign(op)? {
            return Err(Error::Code(format!("outer logical {op} lies in the 2D stabilizer")));
        }
    }
    Ok(SharedLogicals { on3, on2 })
}

/// The codes of a split on one register: `(S₂·S_in, G₂·G_in)` over the 3D qubits.
pub fn joint_groups(code2: &CodeTriple, inner: &CodeTriple, split: &Split) -> Result<(PauliGroup, PauliGroup)> {
    let n = split.n3();
    let s = code2.s.embed(n, &split.outer_vertices).product(&inner.s.embed(n, &split.inner_vertices))?;
    let g = code2.g.embed(n, &split.outer_vertices).product(&inner.g.embed(n, &split.inner_vertices))?;
    Ok((s, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colex::{minimal_colex, split_colex, triangular_hex, ColorSet};
    use crate::pauli::{logical_qubit_count, min_weight_logical, DistanceKind};

    fn tetra() -> (CodeTriple, Split) {
        let c = minimal_colex(3).unwrap();
        (build_3d(&c).unwrap(), split_colex(&c, ColorSet::RGB).unwrap())
    }

    #[test]
    fn steane_parameters() {
        let code = build_2d(&minimal_colex(2).unwrap()).unwrap();
        assert_eq!(code.n, 7);
        assert_eq!(logical_qubit_count(&code.s, &code.g).unwrap(), 1);
        let d = min_weight_logical(&code.s, &code.g, &code.l, DistanceKind::Dressed).unwrap();
        assert_eq!(d, Some(3));
    }

    #[test]
    fn hex_codes_encode_one_qubit() {
        for d in [3, 5, 7] {
            let code = build_2d(&triangular_hex(d).unwrap()).unwrap();
            assert_eq!(code.logical_qubits().unwrap(), 1);
        }
        let code = build_2d(&triangular_hex(5).unwrap()).unwrap();
        assert_eq!(min_weight_logical(&code.s, &code.g, &code.l, DistanceKind::Dressed).unwrap(), Some(5));
    }

    #[test]
    fn tetra_parameters() {
        let (code, split) = tetra();
        assert_eq!(code.logical_qubits().unwrap(), 1);
        assert_eq!(code.g.centralizer().rank() - code.s.rank(), 2);
        let inner = build_inner(&split).unwrap();
        assert_eq!(inner.logical_qubits().unwrap(), 0);
        assert!(inner.g.is_abelian());
    }

    #[test]
    fn cell_is_product_of_its_pair_plaquettes() {
        let (code, _) = tetra();
        for cell in &code.colex.cells {
            for pair in cell.colors.pairs() {
                let mut prod = PauliOperator::identity(code.n);
                for p in code.colex.plaquettes.iter().filter(|p| p.colors == pair && p.is_subset_of(cell)) {
                    prod = prod.mul(&PauliOperator::z_on(code.n, p.vertices.iter().copied())).unwrap();
                }
                assert_eq!(prod, PauliOperator::z_on(code.n, cell.vertices.iter().copied()));
            }
        }
    }

    #[test]
    fn gauge_fixing_inclusions() {
        let (code3, split) = tetra();
        let code2 = build_2d(&split.outer).unwrap();
        let inner = build_inner(&split).unwrap();
        let (s, g) = joint_groups(&code2, &inner, &split).unwrap();
        assert!(code3.s.is_subgroup_of(&s).unwrap());
        assert!(g.is_subgroup_of(&code3.g).unwrap());
    }

    #[test]
    fn restricted_gauge_is_edges() {
        let (code3, split) = tetra();
        let g32 = restrict_gauge_to_outer(&code3, &split).unwrap();
        let edges: Vec<(usize, usize)> = split.outer.edges.iter().map(|e| (e.a, e.b)).collect();
        for gen in g32.generators() {
            let s = gen.support().to_indices();
            assert_eq!(s.len(), 2);
            assert!(edges.contains(&(s[0], s[1])));
        }
        assert_eq!(g32.len(), 2 * split.outer.edges.len());
        let code2 = build_2d(&split.outer).unwrap();
        assert!(code2.g.is_subgroup_up_to_sign(&g32).unwrap());
    }

    #[test]
    fn shared_logicals_hold() {
        let (code3, split) = tetra();
        let code2 = build_2d(&split.outer).unwrap();
        let l = shared_logicals(&code3, &code2, &split).unwrap();
        assert_eq!(l.on2.generators()[0].weight(), 7);
    }

    #[test]
    fn region_laws_and_identities() {
        let (code3, split) = tetra();
        let bs = boundary_structure(&code3.colex).unwrap();
        assert!(region_law_violations(&code3, &bs).unwrap().is_empty());
        assert!(verify_redundancy(&code3, &bs, PauliKind::X, None).is_err());

        let inner = build_inner(&split).unwrap();
        let ibs = boundary_structure(&inner.colex).unwrap();
        assert!(region_law_violations(&inner, &ibs).unwrap().is_empty());
        for kind in [PauliKind::X, PauliKind::Z] {
            assert!(verify_redundancy(&inner, &ibs, kind, None).unwrap());
            assert!(!verify_redundancy(&inner, &ibs, kind, Some(0)).unwrap());
            for r in 0..ibs.regions.len() {
                assert!(stab_r_identity(&inner, &ibs, r, kind).unwrap());
                assert!(inner.s.contains_up_to_sign(&region_operator(&inner, &ibs, r, kind).unwrap()).unwrap());
            }
        }
    }
}
