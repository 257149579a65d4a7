//! Symplectic Pauli arithmetic over GF(2) with ±1 signs.
//!
//! A Pauli operator on `n` qubits is stored as two packed bit rows `x` and `z`
//! plus a sign bit. The single-qubit operator for `(x, z) = (1, 1)` is the
//! Hermitian `Y`, so every stored operator is Hermitian. Products that pick up
//! a factor of `i` are reported through [`Phased`].

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gf2::{self, BitVec, Echelon};

/// Hard limit for the exhaustive distance search.
pub const MAX_BRUTE_FORCE_QUBITS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliKind {
    X,
    Z,
}

impl PauliKind {
    pub fn dual(self) -> PauliKind {
        match self {
            PauliKind::X => PauliKind::Z,
            PauliKind::Z => PauliKind::X,
        }
    }
}

impl fmt::Display for PauliKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PauliKind::X => "X",
            PauliKind::Z => "Z",
        })
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    x: BitVec,
    z: BitVec,
    negative: bool,
}

/// A product of Paulis: `i^(imaginary) * (-1)^(op.negative) * op`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Phased {
    pub op: PauliOperator,
    pub imaginary: bool,
}

/// Exponent of `i` (mod 4) in the product of two sign-free Paulis given as bit rows.
pub(crate) fn product_phase(x1: &BitVec, z1: &BitVec, x2: &BitVec, z2: &BitVec) -> u8 {
    let mut plus = 0u32;
    let mut minus = 0u32;
    for (((&a, &b), &c), &d) in x1
        .words()
        .iter()
        .zip(z1.words())
        .zip(x2.words())
        .zip(z2.words())
    {
        let (y1, xo1, zo1) = (a & b, a & !b, !a & b);
        let (y2, xo2, zo2) = (c & d, c & !d, !c & d);
        plus += ((y1 & zo2) | (xo1 & y2) | (zo1 & xo2)).count_ones();
        minus += ((y1 & xo2) | (xo1 & zo2) | (zo1 & y2)).count_ones();
    }
    ((plus + 4 * minus - minus) % 4) as u8
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        Self {
            x: BitVec::zeros(n),
            z: BitVec::zeros(n),
            negative: false,
        }
    }

    pub fn from_parts(x: BitVec, z: BitVec, negative: bool) -> Self {
        assert_eq!(x.len(), z.len(), "x and z parts differ in length");
        Self { x, z, negative }
    }

    /// Product of single-qubit `kind` operators over `qubits`.
    pub fn on(kind: PauliKind, n: usize, qubits: impl IntoIterator<Item = usize>) -> Self {
        let bits = BitVec::from_indices(n, qubits);
        match kind {
            PauliKind::X => Self::from_parts(bits, BitVec::zeros(n), false),
            PauliKind::Z => Self::from_parts(BitVec::zeros(n), bits, false),
        }
    }

    pub fn x_on(n: usize, qubits: impl IntoIterator<Item = usize>) -> Self {
        Self::on(PauliKind::X, n, qubits)
    }

    pub fn z_on(n: usize, qubits: impl IntoIterator<Item = usize>) -> Self {
        Self::on(PauliKind::Z, n, qubits)
    }

    pub fn of_kind(kind: PauliKind, bits: BitVec) -> Self {
        let n = bits.len();
        match kind {
            PauliKind::X => Self::from_parts(bits, BitVec::zeros(n), false),
            PauliKind::Z => Self::from_parts(BitVec::zeros(n), bits, false),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.x.len()
    }

    pub fn x_bits(&self) -> &BitVec {
        &self.x
    }

    pub fn z_bits(&self) -> &BitVec {
        &self.z
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn with_sign(mut self, negative: bool) -> Self {
        self.negative = negative;
        self
    }

    pub fn negated(mut self) -> Self {
        self.negative = !self.negative;
        self
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// Whether the operator is a product of `kind` operators only.
    pub fn is_pure(&self, kind: PauliKind) -> bool {
        match kind {
            PauliKind::X => self.z.is_zero(),
            PauliKind::Z => self.x.is_zero(),
        }
    }

    pub fn support(&self) -> BitVec {
        self.x.or(&self.z)
    }

    pub fn weight(&self) -> usize {
        self.support().count_ones()
    }

    /// Concatenated `x || z` row, the symplectic coordinate vector.
    pub fn symplectic(&self) -> BitVec {
        self.x.concat(&self.z)
    }

    pub fn from_symplectic(v: &BitVec, negative: bool) -> Self {
        let n = v.len() / 2;
        Self::from_parts(v.slice(0, n), v.slice(n, n), negative)
    }

    pub(crate) fn anticommutes_unchecked(&self, other: &PauliOperator) -> bool {
        self.x.dot(&other.z) ^ self.z.dot(&other.x)
    }

    pub fn commutes(&self, other: &PauliOperator) -> Result<bool> {
        if self.num_qubits() != other.num_qubits() {
            return Err(Error::SizeMismatch(self.num_qubits(), other.num_qubits()));
        }
        Ok(!self.anticommutes_unchecked(other))
    }

    /// `self * other`, including the phase.
    pub fn product(&self, other: &PauliOperator) -> Result<Phased> {
        if self.num_qubits() != other.num_qubits() {
            return Err(Error::SizeMismatch(self.num_qubits(), other.num_qubits()));
        }
        let e = (product_phase(&self.x, &self.z, &other.x, &other.z)
            + 2 * (self.negative as u8)
            + 2 * (other.negative as u8))
            % 4;
        Ok(Phased {
            op: PauliOperator {
                x: self.x.xor(&other.x),
                z: self.z.xor(&other.z),
                negative: e >= 2,
            },
            imaginary: e % 2 == 1,
        })
    }

    /// Product of two commuting operators.
    pub fn mul(&self, other: &PauliOperator) -> Result<PauliOperator> {
        let p = self.product(other)?;
        if p.imaginary {
            return Err(Error::InvalidParameter(format!(
                "product of anticommuting operators {self} and {other} is not Hermitian"
            )));
        }
        Ok(p.op)
    }

    /// Restriction to `qubits`, renumbered in the given order.
    pub fn restrict(&self, qubits: &[usize]) -> PauliOperator {
        let m = qubits.len();
        let mut x = BitVec::zeros(m);
        let mut z = BitVec::zeros(m);
        for (i, &q) in qubits.iter().enumerate() {
            x.set(i, self.x.get(q));
            z.set(i, self.z.get(q));
        }
        PauliOperator::from_parts(x, z, self.negative)
    }

    /// Places qubit `i` of `self` on qubit `map[i]` of an `n`-qubit register.
    pub fn embed(&self, n: usize, map: &[usize]) -> PauliOperator {
        assert_eq!(map.len(), self.num_qubits());
        let mut x = BitVec::zeros(n);
        let mut z = BitVec::zeros(n);
        for (i, &q) in map.iter().enumerate() {
            x.set(q, self.x.get(i));
            z.set(q, self.z.get(i));
        }
        PauliOperator::from_parts(x, z, self.negative)
    }

    fn letter(&self, q: usize) -> char {
        match (self.x.get(q), self.z.get(q)) {
            (false, false) => 'I',
            (true, false) => 'X',
            (false, true) => 'Z',
            (true, true) => 'Y',
        }
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.negative { "-" } else { "+" })?;
        for q in 0..self.num_qubits() {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for PauliOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (negative, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        let n = body.chars().count();
        let mut x = BitVec::zeros(n);
        let mut z = BitVec::zeros(n);
        for (q, c) in body.chars().enumerate() {
            match c {
                'I' | '_' => {}
                'X' => x.set(q, true),
                'Z' => z.set(q, true),
                'Y' => {
                    x.set(q, true);
                    z.set(q, true);
                }
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown Pauli letter '{other}' in \"{s}\""
                    )))
                }
            }
        }
        Ok(PauliOperator::from_parts(x, z, negative))
    }
}

/// A Pauli group given by generators over a common qubit set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliGroup {
    n: usize,
    generators: Vec<PauliOperator>,
}

impl PauliGroup {
    pub fn new(n: usize, generators: Vec<PauliOperator>) -> Result<Self> {
        if let Some(bad) = generators.iter().find(|g| g.num_qubits() != n) {
            return Err(Error::SizeMismatch(n, bad.num_qubits()));
        }
        Ok(Self { n, generators })
    }

    pub fn trivial(n: usize) -> Self {
        Self {
            n,
            generators: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliOperator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    fn check_size(&self, other_n: usize) -> Result<()> {
        if self.n != other_n {
            Err(Error::SizeMismatch(self.n, other_n))
        } else {
            Ok(())
        }
    }

    /// The group generated by both generator lists.
    pub fn product(&self, other: &PauliGroup) -> Result<PauliGroup> {
        self.check_size(other.n)?;
        let mut gens = self.generators.clone();
        gens.extend(other.generators.iter().cloned());
        Ok(PauliGroup { n: self.n, generators: gens })
    }

    /// Places qubit `i` on qubit `map[i]` of an `n`-qubit register.
    pub fn embed(&self, n: usize, map: &[usize]) -> PauliGroup {
        PauliGroup {
            n,
            generators: self.generators.iter().map(|g| g.embed(n, map)).collect(),
        }
    }

    /// Generators of one kind only.
    pub fn of_kind(&self, kind: PauliKind) -> Vec<&PauliOperator> {
        self.generators
            .iter()
            .filter(|g| g.is_pure(kind) && !g.is_identity())
            .collect()
    }

    pub fn symplectic_rows(&self) -> Vec<BitVec> {
        self.generators.iter().map(|g| g.symplectic()).collect()
    }

    pub(crate) fn echelon(&self) -> Echelon {
        Echelon::new(&self.symplectic_rows(), 2 * self.n)
    }

    pub fn rank(&self) -> usize {
        self.echelon().rank()
    }

    pub fn is_abelian(&self) -> bool {
        self.generators.iter().enumerate().all(|(i, a)| {
            self.generators[i + 1..]
                .iter()
                .all(|b| !a.anticommutes_unchecked(b))
        })
    }

    /// Ordered product of the generators selected by `combo`.
    fn word(&self, combo: &BitVec) -> Phased {
        let mut acc = Phased {
            op: PauliOperator::identity(self.n),
            imaginary: false,
        };
        for i in combo.iter_ones() {
            let p = acc.op.product(&self.generators[i]).expect("sizes checked");
            let imaginary = acc.imaginary ^ p.imaginary;
            // i * i = -1
            let negative = p.op.negative ^ (acc.imaginary && p.imaginary);
            acc = Phased {
                op: p.op.with_sign(negative),
                imaginary,
            };
        }
        acc
    }

    /// Whether `p` belongs to the group, sign included.
    ///
    /// In a non-abelian group `-1` is an element, so only the parity of the
    /// `i` exponent is constrained.
    pub fn is_member(&self, p: &PauliOperator) -> Result<bool> {
        self.check_size(p.num_qubits())?;
        let Some(combo) = self.echelon().express(&p.symplectic()) else {
            return Ok(false);
        };
        let w = self.word(&combo);
        if w.imaginary {
            return Ok(false);
        }
        if !self.is_abelian() {
            return Ok(true);
        }
        if self.contains_minus_identity() {
            return Ok(true);
        }
        Ok(w.op.negative == p.negative)
    }

    /// Membership ignoring signs.
    pub fn contains_up_to_sign(&self, p: &PauliOperator) -> Result<bool> {
        self.check_size(p.num_qubits())?;
        Ok(self.echelon().contains(&p.symplectic()))
    }

    /// Whether `self ⊆ other`, signs included.
    pub fn is_subgroup_of(&self, other: &PauliGroup) -> Result<bool> {
        self.check_size(other.n)?;
        for g in &self.generators {
            if !other.is_member(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether `self ⊆ other` as GF(2) subspaces.
    pub fn is_subgroup_up_to_sign(&self, other: &PauliGroup) -> Result<bool> {
        self.check_size(other.n)?;
        let ech = other.echelon();
        Ok(self.generators.iter().all(|g| ech.contains(&g.symplectic())))
    }

    /// Whether some product of generators equals `-1`.
    pub fn contains_minus_identity(&self) -> bool {
        if !self.is_abelian() {
            return true;
        }
        self.echelon()
            .dependencies()
            .iter()
            .any(|dep| self.word(dep).op.negative)
    }

    /// All Paulis (up to phase) commuting with every generator.
    pub fn centralizer(&self) -> PauliGroup {
        // rows (z | x) so that a kernel vector (a | b) means x = a, z = b
        let rows: Vec<BitVec> = self
            .generators
            .iter()
            .map(|g| g.z_bits().concat(g.x_bits()))
            .collect();
        let gens = gf2::kernel(&rows, 2 * self.n)
            .into_iter()
            .map(|v| PauliOperator::from_symplectic(&v, false))
            .collect();
        PauliGroup { n: self.n, generators: gens }
    }

    /// `G ∩ C(G)`, generators with `+` signs.
    pub fn center(&self) -> PauliGroup {
        let ech = self.echelon();
        let independent: Vec<PauliOperator> = ech
            .rows()
            .iter()
            .map(|r| PauliOperator::from_symplectic(r, false))
            .collect();
        let gram: Vec<BitVec> = independent
            .iter()
            .map(|a| {
                BitVec::from_bools(
                    &independent
                        .iter()
                        .map(|b| a.anticommutes_unchecked(b))
                        .collect::<Vec<_>>(),
                )
            })
            .collect();
        let gens = gf2::kernel(&gram, independent.len())
            .into_iter()
            .map(|a| {
                let mut v = BitVec::zeros(2 * self.n);
                for i in a.iter_ones() {
                    v.xor_assign(&independent[i].symplectic());
                }
                PauliOperator::from_symplectic(&v, false)
            })
            .collect();
        PauliGroup { n: self.n, generators: gens }
    }

    /// Row-reduced generators (binary part only, `+` signs).
    pub fn canonical(&self) -> PauliGroup {
        let ech = self.echelon();
        let mut rows: Vec<(usize, BitVec)> = ech
            .pivots()
            .iter()
            .copied()
            .zip(ech.rows().iter().cloned())
            .collect();
        rows.sort_by_key(|(p, _)| *p);
        PauliGroup {
            n: self.n,
            generators: rows
                .into_iter()
                .map(|(_, r)| PauliOperator::from_symplectic(&r, false))
                .collect(),
        }
    }

    /// Plain-text `X|Z` check matrix of the canonical generators, one row per line.
    pub fn check_matrix_text(&self) -> String {
        let mut out = String::new();
        for g in self.canonical().generators {
            out.push_str(&format!("{}|{}\n", g.x_bits(), g.z_bits()));
        }
        out
    }
}

/// Checks `-1 ∉ S` and `S ∝ G ∩ C(G)`.
pub fn check_stabilizer_condition(s: &PauliGroup, g: &PauliGroup) -> Result<()> {
    s.check_size(g.n)?;
    if !s.is_abelian() {
        return Err(Error::StabilizerCondition(
            "stabilizer generators do not commute".into(),
        ));
    }
    if s.contains_minus_identity() {
        return Err(Error::StabilizerCondition("-1 belongs to the stabilizer".into()));
    }
    let gech = g.echelon();
    for (i, gen) in s.generators.iter().enumerate() {
        if !gech.contains(&gen.symplectic()) {
            return Err(Error::StabilizerCondition(format!(
                "stabilizer generator {i} ({gen}) is not in the gauge group"
            )));
        }
        if let Some(j) = g.generators.iter().position(|h| gen.anticommutes_unchecked(h)) {
            return Err(Error::StabilizerCondition(format!(
                "stabilizer generator {i} ({gen}) anticommutes with gauge generator {j}"
            )));
        }
    }
    let center = g.center();
    if center.rank() != s.rank() {
        let sech = s.echelon();
        let missing = center
            .generators
            .iter()
            .find(|c| !sech.contains(&c.symplectic()))
            .map(|c| c.to_string())
            .unwrap_or_default();
        return Err(Error::StabilizerCondition(format!(
            "G ∩ C(G) has rank {} but S has rank {}; e.g. {missing} is missing from S",
            center.rank(),
            s.rank()
        )));
    }
    Ok(())
}

/// Number of logical qubits, `(rank C(G) - rank S) / 2`.
pub fn logical_qubit_count(s: &PauliGroup, g: &PauliGroup) -> Result<usize> {
    check_stabilizer_condition(s, g)?;
    let c = g.centralizer().rank();
    Ok((c - s.rank()) / 2)
}

/// Which operators count as logical in [`min_weight_logical`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistanceKind {
    /// Paulis in `C(S)` acting nontrivially on `L` (dressed logicals).
    Dressed,
    /// Paulis in `C(G)` acting nontrivially on `L`.
    Bare,
}

/// Minimum weight of a logical operator, by exhaustive search in order of weight.
///
/// Returns `None` when no logical operator exists (e.g. `L` is empty).
pub fn min_weight_logical(
    s: &PauliGroup,
    g: &PauliGroup,
    l: &PauliGroup,
    kind: DistanceKind,
) -> Result<Option<usize>> {
    let n = s.n;
    g.check_size(n)?;
    l.check_size(n)?;
    if n > MAX_BRUTE_FORCE_QUBITS {
        return Err(Error::TooLarge {
            what: "qubits for brute-force distance",
            n,
            max: MAX_BRUTE_FORCE_QUBITS,
        });
    }
    let to_masks = |p: &PauliOperator| -> (u32, u32) {
        let m = |b: &BitVec| b.iter_ones().fold(0u32, |acc, q| acc | 1 << q);
        (m(p.x_bits()), m(p.z_bits()))
    };
    let constraints: Vec<(u32, u32)> = match kind {
        DistanceKind::Dressed => s.generators.iter().map(to_masks).collect(),
        DistanceKind::Bare => g.generators.iter().map(to_masks).collect(),
    };
    let logicals: Vec<(u32, u32)> = l.generators.iter().map(to_masks).collect();
    if logicals.is_empty() {
        return Ok(None);
    }
    let anti = |(x1, z1): (u32, u32), (x2, z2): (u32, u32)| ((x1 & z2) ^ (z1 & x2)).count_ones() & 1 == 1;

    for w in 1..=n {
        let mut support: u32 = (1u32 << w) - 1;
        let limit: u32 = if n == 32 { u32::MAX } else { 1u32 << n };
        while support < limit {
            let qubits: Vec<u32> = (0..n as u32).filter(|q| support >> q & 1 == 1).collect();
            let total = 3usize.pow(w as u32);
            for code in 0..total {
                let (mut x, mut z) = (0u32, 0u32);
                let mut c = code;
                for &q in &qubits {
                    match c % 3 {
                        0 => x |= 1 << q,
                        1 => z |= 1 << q,
                        _ => {
                            x |= 1 << q;
                            z |= 1 << q;
                        }
                    }
                    c /= 3;
                }
                let p = (x, z);
                if constraints.iter().all(|&h| !anti(p, h)) && logicals.iter().any(|&h| anti(p, h)) {
                    return Ok(Some(w));
                }
            }
            // Gosper's hack: next mask with the same popcount
            let c = support & support.wrapping_neg();
            let r = support + c;
            support = (((r ^ support) >> 2) / c) | r;
        }
    }
    Ok(None)
}
