//! Lookup-table decoding for small codes.

use std::collections::HashMap;

use crate::code::CodeTriple;
use crate::error::{Error, Result};
use crate::gf2::{self, BitVec};
use crate::pauli::{PauliKind, PauliOperator};
use crate::tableau::{Expectation, Tableau};

/// Largest number of error patterns a table build may examine.
pub const MAX_PATTERNS: usize = 1 << 22;

/// For every reachable syndrome of a parity-check matrix, the lowest-weight
/// bit pattern producing it. Ties go to the pattern whose sorted index list
/// comes first lexicographically.
#[derive(Clone, Debug)]
pub struct CosetTable {
    n: usize,
    checks: Vec<BitVec>,
    leaders: HashMap<BitVec, BitVec>,
}

impl CosetTable {
    pub fn new(checks: &[BitVec], n: usize) -> Result<CosetTable> {
        let target = 1usize << gf2::rank(checks, n).min(usize::BITS as usize - 1);
        let mut leaders = HashMap::new();
        let m = checks.len();
        leaders.insert(BitVec::zeros(m), BitVec::zeros(n));
        // columns of the check matrix, so a syndrome is a xor of columns
        let cols = gf2::transpose(checks, n);
        let mut examined = 1usize;
        let mut w = 1;
        while leaders.len() < target && w <= n {
            let mut idx: Vec<usize> = (0..w).collect();
            loop {
                examined += 1;
                if examined > MAX_PATTERNS {
                    return Err(Error::TooLarge {
                        what: "decoder table patterns",
                        n: examined,
                        max: MAX_PATTERNS,
                    });
                }
                let mut s = BitVec::zeros(m);
                for &i in &idx {
                    s.xor_assign(&cols[i]);
                }
                leaders.entry(s).or_insert_with(|| BitVec::from_indices(n, idx.iter().copied()));
                // next combination in lexicographic order
                let mut k = w;
                while k > 0 && idx[k - 1] == n - w + k - 1 {
                    k -= 1;
                }
                if k == 0 {
                    break;
                }
                idx[k - 1] += 1;
                for j in k..w {
                    idx[j] = idx[j - 1] + 1;
                }
            }
            w += 1;
        }
        Ok(CosetTable {
            n,
            checks: checks.to_vec(),
            leaders,
        })
    }

    pub fn syndrome(&self, e: &BitVec) -> BitVec {
        BitVec::from_bools(&self.checks.iter().map(|c| c.dot(e)).collect::<Vec<_>>())
    }

    pub fn lookup(&self, syndrome: &BitVec) -> Option<&BitVec> {
        self.leaders.get(syndrome)
    }

    pub fn len(&self) -> usize {
        self.leaders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaders.is_empty()
    }

    pub fn num_checks(&self) -> usize {
        self.checks.len()
    }

    pub fn num_bits(&self) -> usize {
        self.n
    }

    /// Smallest weight in the coset `e + span(generators)`.
    pub fn min_coset_weight(e: &BitVec, generators: &[BitVec]) -> Result<usize> {
        let basis: Vec<BitVec> = gf2::Echelon::new(generators, e.len()).rows().to_vec();
        if basis.len() > 24 {
            return Err(Error::TooLarge {
                what: "coset basis",
                n: basis.len(),
                max: 24,
            });
        }
        let mut best = e.count_ones();
        let mut cur = e.clone();
        // Gray-code walk over the span
        for i in 1u32..(1 << basis.len()) {
            cur.xor_assign(&basis[i.trailing_zeros() as usize]);
            best = best.min(cur.count_ones());
        }
        Ok(best)
    }
}

/// Syndrome-table decoder for a CSS code with identical X and Z stabilizer supports.
#[derive(Clone, Debug)]
pub struct IdealDecoder {
    n: usize,
    supports: Vec<BitVec>,
    table: CosetTable,
}

impl IdealDecoder {
    pub fn new(code: &CodeTriple) -> Result<IdealDecoder> {
        Ok(IdealDecoder {
            n: code.n,
            supports: code.stabilizer_supports.clone(),
            table: CosetTable::new(&code.stabilizer_supports, code.n)?,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Minimum-weight correction of `kind` for the syndrome of the opposite
    /// stabilizer type.
    pub fn correction(&self, kind: PauliKind, syndrome: &BitVec) -> Result<PauliOperator> {
        let e = self
            .table
            .lookup(syndrome)
            .ok_or_else(|| Error::NoCorrection(format!("{kind} syndrome {syndrome:?}")))?;
        Ok(PauliOperator::of_kind(kind, e.clone()))
    }

    /// Reads the stabilizer syndrome of a state without disturbing it.
    pub fn read_syndrome(&self, state: &Tableau, measured: PauliKind) -> Result<BitVec> {
        let mut bits = Vec::with_capacity(self.supports.len());
        for s in &self.supports {
            let op = PauliOperator::of_kind(measured, s.clone());
            bits.push(match state.expect(&op)? {
                Expectation::Plus => false,
                Expectation::Minus => true,
                Expectation::Indeterminate => {
                    return Err(Error::NoCorrection(format!("stabilizer {op} is not determined")));
                }
            });
        }
        Ok(BitVec::from_bools(&bits))
    }

    /// Noiseless syndrome extraction and correction of both error types.
    /// Returns the applied correction.
    pub fn decode(&self, state: &mut Tableau) -> Result<PauliOperator> {
        if state.num_qubits() != self.n {
            return Err(Error::SizeMismatch(self.n, state.num_qubits()));
        }
        let x = self.correction(PauliKind::X, &self.read_syndrome(state, PauliKind::Z)?)?;
        let z = self.correction(PauliKind::Z, &self.read_syndrome(state, PauliKind::X)?)?;
        let total = PauliOperator::from_parts(x.x_bits().clone(), z.z_bits().clone(), false);
        state.apply(&total)?;
        Ok(total)
    }

    /// The table for one error type (both types share it).
    pub fn table(&self) -> &CosetTable {
        &self.table
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{build_2d, build_3d};
    use crate::colex::minimal_colex;
    use crate::tableau::LogicalStateSpec;
    use rand::SeedableRng;

    #[test]
    fn steane_table_corrects_single_errors() {
        let code = build_2d(&minimal_colex(2).unwrap()).unwrap();
        let dec = IdealDecoder::new(&code).unwrap();
        assert_eq!(dec.table().len(), 8);
        for q in 0..7 {
            let e = BitVec::from_indices(7, [q]);
            assert_eq!(dec.table().lookup(&dec.table().syndrome(&e)), Some(&e));
        }
    }

    #[test]
    fn leaders_are_minimum_weight() {
        let code = build_3d(&minimal_colex(3).unwrap()).unwrap();
        let t = CosetTable::new(&code.stabilizer_supports, 15).unwrap();
        assert_eq!(t.len(), 16);
        // brute-force oracle over all 2^15 patterns
        let mut best: HashMap<BitVec, usize> = HashMap::new();
        for m in 0u32..(1 << 15) {
            let e = BitVec::from_indices(15, (0..15).filter(|i| m >> i & 1 == 1));
            let s = t.syndrome(&e);
            let w = best.entry(s).or_insert(usize::MAX);
            *w = (*w).min(e.count_ones());
        }
        for (s, w) in best {
            assert_eq!(t.lookup(&s).unwrap().count_ones(), w);
        }
    }

    #[test]
    fn decoding_restores_logical_state() {
        let code = build_2d(&minimal_colex(2).unwrap()).unwrap();
        let dec = IdealDecoder::new(&code).unwrap();
        let spec = LogicalStateSpec::eigenstate_of(&code.l, PauliKind::Z).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let base = Tableau::encoded(&code.s, &code.g, &spec).unwrap();
        for q in 0..7 {
            let mut t = base.clone();
            let err = PauliOperator::from_parts(BitVec::from_indices(7, [q]), BitVec::from_indices(7, [(q + 3) % 7]), false);
            t.apply(&err).unwrap();
            dec.decode(&mut t).unwrap();
            assert_eq!(t.expect(code.logical_of(PauliKind::Z).unwrap()).unwrap(), Expectation::Plus);
            let mut probe = t.clone();
            assert!(!probe.measure(code.logical_of(PauliKind::Z).unwrap(), &mut rng).unwrap());
        }
    }

    #[test]
    fn min_coset_weight_of_stabilizer_is_zero() {
        let code = build_2d(&minimal_colex(2).unwrap()).unwrap();
        let e = code.stabilizer_supports[0].xor(&code.stabilizer_supports[1]);
        assert_eq!(CosetTable::min_coset_weight(&e, &code.stabilizer_supports).unwrap(), 0);
        let e = BitVec::ones(7);
        assert_eq!(CosetTable::min_coset_weight(&e, &code.stabilizer_supports).unwrap(), 3);
    }
}
