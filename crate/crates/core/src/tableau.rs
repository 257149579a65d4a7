//! Stabilizer-state simulation with destabilizer bookkeeping.
//!
//! Rows `0..n` are destabilizers and rows `n..2n` stabilizers. Only Pauli
//! operations and Pauli measurements are supported; that is all the
//! gauge-fixing protocols require.

use rand::RngCore;

use crate::error::{Error, Result};
use crate::gf2::{self, BitVec};
use crate::pauli::{product_phase, PauliGroup, PauliKind, PauliOperator};

/// Source of fair coin flips for random measurement outcomes.
pub trait OutcomeSource {
    fn random_bit(&mut self) -> bool;
}

impl<R: RngCore + ?Sized> OutcomeSource for R {
    fn random_bit(&mut self) -> bool {
        self.next_u32() & 1 == 1
    }
}

/// Replays a fixed list of outcomes, then answers `false`, counting draws.
///
/// Walking [`ScriptedOutcomes::next_branch`] enumerates every sequence of
/// random outcomes of a deterministic procedure exactly once.
#[derive(Clone, Debug, Default)]
pub struct ScriptedOutcomes {
    script: Vec<bool>,
    drawn: usize,
}

impl ScriptedOutcomes {
    pub fn new(script: Vec<bool>) -> Self {
        Self { script, drawn: 0 }
    }

    pub fn draws(&self) -> usize {
        self.drawn
    }

    /// Outcomes consumed so far, with unscripted draws recorded as `false`.
    pub fn consumed(&self) -> Vec<bool> {
        let mut v: Vec<bool> = self.script.iter().take(self.drawn).copied().collect();
        v.resize(self.drawn, false);
        v
    }

    /// Probability of the branch just replayed.
    pub fn probability(&self) -> f64 {
        0.5f64.powi(self.drawn as i32)
    }

    /// Script for the next branch in depth-first order, or `None` when done.
    pub fn next_branch(&self) -> Option<ScriptedOutcomes> {
        let mut v = self.consumed();
        while let Some(last) = v.pop() {
            if !last {
                v.push(true);
                return Some(ScriptedOutcomes::new(v));
            }
        }
        None
    }
}

impl OutcomeSource for ScriptedOutcomes {
    fn random_bit(&mut self) -> bool {
        let b = self.script.get(self.drawn).copied().unwrap_or(false);
        self.drawn += 1;
        b
    }
}

/// Runs `f` once per branch of its random outcomes and collects `(probability, value)`.
pub fn enumerate_branches<T>(
    mut f: impl FnMut(&mut ScriptedOutcomes) -> Result<T>,
) -> Result<Vec<(f64, T)>> {
    let mut out = Vec::new();
    let mut src = ScriptedOutcomes::default();
    loop {
        let v = f(&mut src)?;
        out.push((src.probability(), v));
        match src.next_branch() {
            Some(next) => src = next,
            None => return Ok(out),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expectation {
    Plus,
    Minus,
    Indeterminate,
}

/// Which logical eigenstate to prepare: each operator (with its sign) becomes a stabilizer.
#[derive(Clone, Debug, Default)]
pub struct LogicalStateSpec {
    pub fixed: Vec<PauliOperator>,
}

impl LogicalStateSpec {
    pub fn new(fixed: Vec<PauliOperator>) -> Self {
        Self { fixed }
    }

    /// The `+1` eigenstate of the first logical operator of `kind` in `l`.
    pub fn eigenstate_of(l: &PauliGroup, kind: PauliKind) -> Result<Self> {
        let op = l
            .generators()
            .iter()
            .find(|g| g.is_pure(kind) && !g.is_identity())
            .ok_or_else(|| Error::Code(format!("no logical {kind} operator")))?;
        Ok(Self::new(vec![op.clone().with_sign(false)]))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tableau {
    n: usize,
    x: Vec<BitVec>,
    z: Vec<BitVec>,
    r: Vec<bool>,
}

impl Tableau {
    /// The all-zeros computational basis state.
    pub fn zero_state(n: usize) -> Self {
        let mut x = vec![BitVec::zeros(n); 2 * n];
        let mut z = vec![BitVec::zeros(n); 2 * n];
        for q in 0..n {
            x[q].set(q, true);
            z[n + q].set(q, true);
        }
        Self {
            n,
            x,
            z,
            r: vec![false; 2 * n],
        }
    }

    /// The state stabilized by `gens` (independent, commuting, exactly `n` of them).
    pub fn from_stabilizers(n: usize, gens: &[PauliOperator]) -> Result<Self> {
        if let Some(bad) = gens.iter().find(|g| g.num_qubits() != n) {
            return Err(Error::SizeMismatch(n, bad.num_qubits()));
        }
        let group = PauliGroup::new(n, gens.to_vec())?;
        if !group.is_abelian() {
            return Err(Error::StabilizerCondition("state generators do not commute".into()));
        }
        if gens.len() != n || group.rank() != n {
            return Err(Error::StabilizerCondition(format!(
                "{} generators of rank {} cannot fix a state on {n} qubits",
                gens.len(),
                group.rank()
            )));
        }
        let mut t = Self::zero_state(n);
        let mut plus = ScriptedOutcomes::default();
        let mut wrong = BitVec::zeros(n);
        for (i, g) in gens.iter().enumerate() {
            if t.measure(g, &mut plus)? {
                wrong.set(i, true);
            }
        }
        if !wrong.is_zero() {
            // Q with ω(Q, g_i) = wrong_i flips exactly the wrong signs.
            let rows: Vec<BitVec> = gens.iter().map(|g| g.z_bits().concat(g.x_bits())).collect();
            let sol = gf2::solve(&rows, 2 * n, &wrong).ok_or_else(|| {
                Error::StabilizerCondition("sign pattern is not realizable".into())
            })?;
            t.apply(&PauliOperator::from_symplectic(&sol, false))?;
        }
        Ok(t)
    }

    /// Encoded state of a code: `S`, the logical choices in `spec`, then gauge
    /// elements picked first-fit from the row-reduced `G`, X-type rows first.
    pub fn encoded(
        s: &PauliGroup,
        g: &PauliGroup,
        spec: &LogicalStateSpec,
    ) -> Result<Self> {
        let n = s.num_qubits();
        let mut chosen: Vec<PauliOperator> = Vec::new();
        let mut ech_rows: Vec<BitVec> = Vec::new();
        let mut try_add = |p: &PauliOperator, chosen: &mut Vec<PauliOperator>| -> Result<bool> {
            if p.num_qubits() != n {
                return Err(Error::SizeMismatch(n, p.num_qubits()));
            }
            if chosen.iter().any(|c| c.anticommutes_unchecked(p)) {
                return Ok(false);
            }
            let mut rows = ech_rows.clone();
            rows.push(p.symplectic());
            if gf2::rank(&rows, 2 * n) < rows.len() {
                return Ok(false);
            }
            ech_rows = rows;
            chosen.push(p.clone());
            Ok(true)
        };
        for gen in s.generators() {
            try_add(gen, &mut chosen)?;
        }
        for op in &spec.fixed {
            if !try_add(op, &mut chosen)? {
                return Err(Error::Code(format!(
                    "logical state operator {op} is dependent on or anticommutes with the stabilizer"
                )));
            }
        }
        let mut gauge = g.canonical().generators().to_vec();
        gauge.sort_by_key(|p| !p.is_pure(PauliKind::X));
        for gen in &gauge {
            try_add(gen, &mut chosen)?;
        }
        for q in 0..n {
            if chosen.len() == n {
                break;
            }
            try_add(&PauliOperator::z_on(n, [q]), &mut chosen)?;
            try_add(&PauliOperator::x_on(n, [q]), &mut chosen)?;
        }
        Self::from_stabilizers(n, &chosen)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    fn row(&self, i: usize) -> PauliOperator {
        PauliOperator::from_parts(self.x[i].clone(), self.z[i].clone(), self.r[i])
    }

    pub fn stabilizers(&self) -> Vec<PauliOperator> {
        (self.n..2 * self.n).map(|i| self.row(i)).collect()
    }

    pub fn destabilizers(&self) -> Vec<PauliOperator> {
        (0..self.n).map(|i| self.row(i)).collect()
    }

    pub fn stabilizer_group(&self) -> PauliGroup {
        PauliGroup::new(self.n, self.stabilizers()).expect("rows share n")
    }

    fn check(&self, p: &PauliOperator) -> Result<()> {
        if p.num_qubits() != self.n {
            return Err(Error::SizeMismatch(self.n, p.num_qubits()));
        }
        Ok(())
    }

    fn anticommutes_row(&self, i: usize, p: &PauliOperator) -> bool {
        self.x[i].dot(p.z_bits()) ^ self.z[i].dot(p.x_bits())
    }

    /// Row `h` := row `i` · row `h`, tracking the sign.
    fn rowsum(&mut self, h: usize, i: usize) {
        let e = product_phase(&self.x[i], &self.z[i], &self.x[h], &self.z[h])
            + 2 * (self.r[i] as u8 + self.r[h] as u8);
        self.r[h] = e % 4 == 2;
        let (xi, zi) = (self.x[i].clone(), self.z[i].clone());
        self.x[h].xor_assign(&xi);
        self.z[h].xor_assign(&zi);
    }

    /// Conjugates the state by `p` (sign of `p` is irrelevant).
    pub fn apply(&mut self, p: &PauliOperator) -> Result<()> {
        self.check(p)?;
        for i in 0..2 * self.n {
            if self.anticommutes_row(i, p) {
                self.r[i] = !self.r[i];
            }
        }
        Ok(())
    }

    /// Sign of `p` if it is in the stabilizer group up to sign.
    fn deterministic_sign(&self, p: &PauliOperator) -> bool {
        let n = self.n;
        let mut acc_x = BitVec::zeros(n);
        let mut acc_z = BitVec::zeros(n);
        let mut acc_r = false;
        for i in 0..n {
            if self.anticommutes_row(i, p) {
                let s = n + i;
                let e = product_phase(&self.x[s], &self.z[s], &acc_x, &acc_z)
                    + 2 * (self.r[s] as u8 + acc_r as u8);
                acc_r = e % 4 == 2;
                acc_x.xor_assign(&self.x[s]);
                acc_z.xor_assign(&self.z[s]);
            }
        }
        debug_assert!(acc_x == *p.x_bits() && acc_z == *p.z_bits());
        acc_r ^ p.is_negative()
    }

    /// Measures `p`; returns `true` for outcome `-1`.
    pub fn measure<S: OutcomeSource + ?Sized>(&mut self, p: &PauliOperator, src: &mut S) -> Result<bool> {
        self.check(p)?;
        let n = self.n;
        let Some(pivot) = (n..2 * n).find(|&i| self.anticommutes_row(i, p)) else {
            return Ok(self.deterministic_sign(p));
        };
        for i in 0..2 * n {
            if i != pivot && i != pivot - n && self.anticommutes_row(i, p) {
                self.rowsum(i, pivot);
            }
        }
        self.x[pivot - n] = self.x[pivot].clone();
        self.z[pivot - n] = self.z[pivot].clone();
        self.r[pivot - n] = self.r[pivot];
        let outcome = src.random_bit();
        self.x[pivot] = p.x_bits().clone();
        self.z[pivot] = p.z_bits().clone();
        self.r[pivot] = p.is_negative() ^ outcome;
        Ok(outcome)
    }

    pub fn expect(&self, p: &PauliOperator) -> Result<Expectation> {
        self.check(p)?;
        if (self.n..2 * self.n).any(|i| self.anticommutes_row(i, p)) {
            return Ok(Expectation::Indeterminate);
        }
        Ok(if self.deterministic_sign(p) {
            Expectation::Minus
        } else {
            Expectation::Plus
        })
    }

    /// Product state `self ⊗ other`, with `other`'s qubits appended.
    pub fn tensor(&self, other: &Tableau) -> Tableau {
        let n = self.n + other.n;
        let lift = |t: &Tableau, i: usize, offset: usize| -> PauliOperator {
            let map: Vec<usize> = (0..t.n).map(|q| q + offset).collect();
            t.row(i).embed(n, &map)
        };
        let mut rows = Vec::with_capacity(2 * n);
        for i in 0..self.n {
            rows.push(lift(self, i, 0));
        }
        for i in 0..other.n {
            rows.push(lift(other, i, self.n));
        }
        for i in 0..self.n {
            rows.push(lift(self, self.n + i, 0));
        }
        for i in 0..other.n {
            rows.push(lift(other, other.n + i, self.n));
        }
        Tableau {
            n,
            x: rows.iter().map(|p| p.x_bits().clone()).collect(),
            z: rows.iter().map(|p| p.z_bits().clone()).collect(),
            r: rows.iter().map(|p| p.is_negative()).collect(),
        }
    }

    /// The same state with qubit `i` moved to `map[i]` (a permutation).
    pub fn relabel(&self, map: &[usize]) -> Result<Tableau> {
        let n = self.n;
        if map.len() != n {
            return Err(Error::SizeMismatch(n, map.len()));
        }
        let mut seen = vec![false; n];
        for &q in map {
            if q >= n || std::mem::replace(&mut seen[q], true) {
                return Err(Error::InvalidParameter(format!("relabeling {map:?} is not a permutation")));
            }
        }
        let rows: Vec<PauliOperator> = (0..2 * n).map(|i| self.row(i).embed(n, map)).collect();
        Ok(Tableau {
            n,
            x: rows.iter().map(|p| p.x_bits().clone()).collect(),
            z: rows.iter().map(|p| p.z_bits().clone()).collect(),
            r: rows.iter().map(|p| p.is_negative()).collect(),
        })
    }

    /// Measures every qubit in `discard` in the Z basis and returns the state
    /// of the remaining qubits, in increasing index order.
    pub fn trace_out<S: OutcomeSource + ?Sized>(&self, discard: &[usize], src: &mut S) -> Result<Tableau> {
        let n = self.n;
        let mut t = self.clone();
        let mut gone = vec![false; n];
        for &q in discard {
            if q >= n {
                return Err(Error::InvalidParameter(format!("qubit {q} out of range {n}")));
            }
            gone[q] = true;
            t.measure(&PauliOperator::z_on(n, [q]), src)?;
        }
        // Every stabilizer now has x = 0 on discarded qubits; clear their z columns.
        let mut used = vec![false; 2 * n];
        for q in (0..n).filter(|&q| gone[q]) {
            let Some(p) = (n..2 * n).find(|&i| !used[i] && t.z[i].get(q)) else {
                continue;
            };
            used[p] = true;
            for i in n..2 * n {
                if i != p && t.z[i].get(q) {
                    t.rowsum(i, p);
                }
            }
        }
        let keep: Vec<usize> = (0..n).filter(|&q| !gone[q]).collect();
        let gens: Vec<PauliOperator> = (n..2 * n)
            .filter(|&i| !used[i])
            .map(|i| t.row(i).restrict(&keep))
            .collect();
        Tableau::from_stabilizers(keep.len(), &gens)
    }

    /// Internal consistency: symplectic pairing of destabilizers and stabilizers.
    pub fn is_consistent(&self) -> bool {
        let n = self.n;
        (0..2 * n).all(|i| {
            (0..2 * n).all(|j| {
                let w = self.x[i].dot(&self.z[j]) ^ self.z[i].dot(&self.x[j]);
                w == (i + n == j || j + n == i)
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    #[test]
    fn zero_state_expectations() {
        let t = Tableau::zero_state(2);
        assert_eq!(t.expect(&p("ZI")).unwrap(), Expectation::Plus);
        assert_eq!(t.expect(&p("-ZZ")).unwrap(), Expectation::Minus);
        assert_eq!(t.expect(&p("XI")).unwrap(), Expectation::Indeterminate);
        assert!(t.is_consistent());
    }

    #[test]
    fn relabel_moves_qubits() {
        let t = Tableau::from_stabilizers(3, &[p("-ZII"), p("IXI"), p("IIY")]).unwrap();
        let r = t.relabel(&[2, 0, 1]).unwrap();
        assert_eq!(r.expect(&p("IIZ")).unwrap(), Expectation::Minus);
        assert_eq!(r.expect(&p("XII")).unwrap(), Expectation::Plus);
        assert_eq!(r.expect(&p("IYI")).unwrap(), Expectation::Plus);
        assert!(r.is_consistent());
        assert!(t.relabel(&[0, 0, 1]).is_err());
    }

    #[test]
    fn measurement_collapses_and_repeats() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut t = Tableau::zero_state(3);
        let first = t.measure(&p("XXX"), &mut rng).unwrap();
        for _ in 0..5 {
            assert_eq!(t.measure(&p("XXX"), &mut rng).unwrap(), first);
        }
        assert_eq!(t.expect(&p("ZZI")).unwrap(), Expectation::Plus);
        assert_eq!(t.expect(&p("ZII")).unwrap(), Expectation::Indeterminate);
        assert!(t.is_consistent());
    }

    #[test]
    fn pauli_application_flips_anticommuting_signs() {
        let mut t = Tableau::from_stabilizers(2, &[p("XX"), p("ZZ")]).unwrap();
        t.apply(&p("XI")).unwrap();
        assert_eq!(t.expect(&p("XX")).unwrap(), Expectation::Plus);
        assert_eq!(t.expect(&p("ZZ")).unwrap(), Expectation::Minus);
        assert_eq!(t.expect(&p("YY")).unwrap(), Expectation::Plus);
    }

    #[test]
    fn from_stabilizers_honours_signs() {
        let t = Tableau::from_stabilizers(3, &[p("-XXX"), p("ZZI"), p("-IZZ")]).unwrap();
        assert_eq!(t.expect(&p("XXX")).unwrap(), Expectation::Minus);
        assert_eq!(t.expect(&p("ZZI")).unwrap(), Expectation::Plus);
        assert_eq!(t.expect(&p("IZZ")).unwrap(), Expectation::Minus);
        assert!(Tableau::from_stabilizers(2, &[p("XI"), p("ZI")]).is_err());
        assert!(Tableau::from_stabilizers(2, &[p("XI")]).is_err());
    }

    #[test]
    fn branch_enumeration_is_complete() {
        let branches = enumerate_branches(|src| {
            let mut t = Tableau::zero_state(2);
            let a = t.measure(&p("XI"), src)?;
            let b = t.measure(&p("IX"), src)?;
            let c = t.measure(&p("XX"), src)?;
            Ok((a, b, c))
        })
        .unwrap();
        assert_eq!(branches.len(), 4);
        let total: f64 = branches.iter().map(|(w, _)| w).sum();
        assert!((total - 1.0).abs() < 1e-12);
        for (_, (a, b, c)) in branches {
            assert_eq!(c, a ^ b);
        }
    }

    #[test]
    fn tensor_and_trace_out() {
        let bell = Tableau::from_stabilizers(2, &[p("XX"), p("ZZ")]).unwrap();
        let one = Tableau::from_stabilizers(1, &[p("-Z")]).unwrap();
        let t = bell.tensor(&one);
        assert!(t.is_consistent());
        assert_eq!(t.expect(&p("XXI")).unwrap(), Expectation::Plus);
        assert_eq!(t.expect(&p("IIZ")).unwrap(), Expectation::Minus);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rest = t.trace_out(&[2], &mut rng).unwrap();
        assert_eq!(rest, Tableau::from_stabilizers(2, &[p("XX"), p("ZZ")]).unwrap());
        let half = t.trace_out(&[0], &mut rng).unwrap();
        assert_eq!(half.num_qubits(), 2);
        assert_eq!(half.expect(&p("IZ")).unwrap(), Expectation::Minus);
    }

    #[test]
    fn encoded_state_fixes_logical() {
        let s = PauliGroup::new(3, vec![p("ZZI"), p("IZZ")]).unwrap();
        let l = PauliGroup::new(3, vec![p("XXX"), p("ZII")]).unwrap();
        let zero = Tableau::encoded(&s, &s, &LogicalStateSpec::eigenstate_of(&l, PauliKind::Z).unwrap()).unwrap();
        assert_eq!(zero.expect(&p("ZII")).unwrap(), Expectation::Plus);
        let plus = Tableau::encoded(&s, &s, &LogicalStateSpec::eigenstate_of(&l, PauliKind::X).unwrap()).unwrap();
        assert_eq!(plus.expect(&p("XXX")).unwrap(), Expectation::Plus);
        assert_eq!(plus.expect(&p("IZZ")).unwrap(), Expectation::Plus);
    }
}
