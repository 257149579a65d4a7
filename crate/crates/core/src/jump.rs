//! Dimensional jumps between a tetrahedral 3D color code and the 2D code on
//! one of its facets.
//!
//! Collapse measures the inner plaquettes of each facet color pair, reads the
//! outcomes as a flux configuration on the dual graph, closes it with a
//! minimum repair, and applies the outer string operator that its outer
//! endpoints call for. Blow-up adds fresh inner qubits and fixes the inner code
//! with single-shot error correction.

use crate::code::{build_2d, build_3d, build_inner, shared_logicals, CodeTriple, SharedLogicals};
use crate::colex::{split_colex, Color, ColorSet, Colex, DualEdge, DualEndpoint, Split};
use crate::decoder::{CosetTable, IdealDecoder};
use crate::error::{Error, Result};
use crate::gf2::{BitVec, Echelon};
use crate::matching::{min_t_join, Graph};
use crate::pauli::{PauliKind, PauliOperator};
use crate::tableau::{Expectation, LogicalStateSpec, OutcomeSource, Tableau};

/// Measurement bases in the order a collapse visits them.
pub const BASES: [PauliKind; 2] = [PauliKind::Z, PauliKind::X];

/// Dual-graph data of one facet color pair.
#[derive(Clone, Debug)]
pub struct PairContext {
    /// Colors in the 3-colex.
    pub pair: ColorSet,
    /// The same pair in the outer 2-colex.
    pub outer_pair: ColorSet,
    pub duals: Vec<DualEdge>,
    /// 3D-register support of each measured inner plaquette, in dual edge order.
    pub supports: Vec<BitVec>,
}

/// A set of dual edges (inner plaquettes with outcome `-1`) of one pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FluxConfiguration {
    pub pair: ColorSet,
    pub edges: BitVec,
}

/// What one `(basis, pair)` step of a collapse saw and did.
#[derive(Clone, Debug)]
pub struct PairRecord {
    /// Type of the measured plaquettes.
    pub basis: PauliKind,
    pub pair: ColorSet,
    /// Outcomes as they came out of the state.
    pub raw: BitVec,
    /// Outcomes after measurement flips.
    pub observed: BitVec,
    /// Repair chosen to close the observed flux.
    pub delta0: BitVec,
    pub gamma_eff: BitVec,
    /// Outer plaquettes (outer colex indices) flagged `-1`.
    pub sigma: Vec<usize>,
    /// Correction on the outer register.
    pub correction: PauliOperator,
}

#[derive(Clone, Debug)]
pub struct CollapseOutcome {
    /// State of the outer register.
    pub state: Tableau,
    /// Product of all corrections, on the outer register.
    pub correction: PauliOperator,
    pub records: Vec<PairRecord>,
}

/// Faults injected into one collapse.
#[derive(Clone, Debug)]
pub struct Faults {
    /// Applied to the 3D register before any measurement.
    pub qubit_error: PauliOperator,
    /// One bit per measurement slot, see [`JumpEngine::measurement_slots`].
    pub flips: BitVec,
}

/// One inner plaquette measurement of a collapse.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Slot {
    pub basis: PauliKind,
    pub pair: usize,
    pub edge: usize,
}

/// Precomputed codes, split and dual graphs for jumps across one facet.
#[derive(Clone, Debug)]
pub struct JumpEngine {
    pub split: Split,
    pub code3: CodeTriple,
    pub code2: CodeTriple,
    pub inner: CodeTriple,
    pub logicals: SharedLogicals,
    pub pairs: Vec<PairContext>,
    /// Whether facet endpoints of the dual graph may absorb repairs.
    pub facet_boundary: bool,
    /// Outer colex plaquette index of each split outer plaquette.
    outer_to_code2: Vec<usize>,
    decoder2: IdealDecoder,
}

impl JumpEngine {
    pub fn new(colex3: &Colex, facet: ColorSet) -> Result<JumpEngine> {
        let split = split_colex(colex3, facet)?;
        let code3 = build_3d(colex3)?;
        let code2 = build_2d(&split.outer)?;
        let inner = build_inner(&split)?;
        let logicals = shared_logicals(&code3, &code2, &split)?;
        let outer_to_code2 = split
            .outer_plaquettes
            .iter()
            .map(|&p3| {
                let mut local: Vec<usize> = colex3.plaquettes[p3]
                    .vertices
                    .iter()
                    .map(|v| split.outer_vertices.binary_search(v).expect("outer plaquette on outer vertices"))
                    .collect();
                local.sort_unstable();
                split.outer.plaquettes.iter().position(|q| q.vertices == local).expect("outer plaquette present")
            })
            .collect();
        let mut pairs = Vec::new();
        for pair in facet.pairs() {
            let duals = split.dual_edges(pair)?;
            let supports = duals
                .iter()
                .map(|d| {
                    let p3 = split.inner_plaquettes[d.plaquette];
                    BitVec::from_indices(split.n3(), colex3.plaquettes[p3].vertices.iter().copied())
                })
                .collect();
            pairs.push(PairContext {
                pair,
                outer_pair: split.outer_pair(pair),
                duals,
                supports,
            });
        }
        let decoder2 = IdealDecoder::new(&code2)?;
        Ok(JumpEngine {
            split,
            code3,
            code2,
            inner,
            logicals,
            pairs,
            facet_boundary: true,
            outer_to_code2,
            decoder2,
        })
    }

    /// Disallows repairs that end on the other facets.
    pub fn without_facet_boundary(mut self) -> JumpEngine {
        self.facet_boundary = false;
        self
    }

    pub fn pair_index(&self, pair: ColorSet) -> Result<usize> {
        self.split.check_pair(pair)?;
        Ok(self.pairs.iter().position(|p| p.pair == pair).expect("facet pairs are all present"))
    }

    pub fn decoder2(&self) -> &IdealDecoder {
        &self.decoder2
    }

    /// Every inner plaquette measurement of a collapse, in the order performed.
    pub fn measurement_slots(&self) -> Vec<Slot> {
        let mut out = Vec::new();
        for basis in BASES {
            for (pair, ctx) in self.pairs.iter().enumerate() {
                for edge in 0..ctx.duals.len() {
                    out.push(Slot { basis, pair, edge });
                }
            }
        }
        out
    }

    /// Outer colex plaquette index of a split outer plaquette.
    pub fn outer_plaquette(&self, split_index: usize) -> usize {
        self.outer_to_code2[split_index]
    }

    /// Measures the inner `pair`-plaquettes of `basis` type; bit set = outcome `-1`.
    pub fn extract_flux<S: OutcomeSource + ?Sized>(
        &self,
        state: &mut Tableau,
        basis: PauliKind,
        pair: usize,
        src: &mut S,
    ) -> Result<FluxConfiguration> {
        if state.num_qubits() != self.split.n3() {
            return Err(Error::SizeMismatch(self.split.n3(), state.num_qubits()));
        }
        let ctx = &self.pairs[pair];
        let mut bits = Vec::with_capacity(ctx.supports.len());
        for s in &ctx.supports {
            bits.push(state.measure(&PauliOperator::of_kind(basis, s.clone()), src)?);
        }
        Ok(FluxConfiguration {
            pair: ctx.pair,
            edges: BitVec::from_bools(&bits),
        })
    }

    /// Inner cells and outer plaquettes (outer colex indices) met an odd number of times.
    pub fn endpoints(&self, pair: usize, gamma: &BitVec) -> (Vec<usize>, Vec<usize>) {
        let mut inner = vec![false; self.split.inner_cells.len()];
        let mut outer = vec![false; self.split.outer_plaquettes.len()];
        for e in gamma.iter_ones() {
            let d = &self.pairs[pair].duals[e];
            for end in [d.a, d.b] {
                match end {
                    DualEndpoint::InnerCell(c) => inner[c] ^= true,
                    DualEndpoint::OuterPlaquette(p) => outer[p] ^= true,
                    DualEndpoint::Facet => {}
                }
            }
        }
        let inner = (0..inner.len()).filter(|&c| inner[c]).collect();
        let mut outer: Vec<usize> = (0..outer.len()).filter(|&p| outer[p]).map(|p| self.outer_to_code2[p]).collect();
        outer.sort_unstable();
        (inner, outer)
    }

    /// Minimum set of dual edges whose flip leaves no inner cell as an endpoint.
    /// Outer plaquettes, and the other facets unless disabled, absorb endpoints.
    pub fn repair_flux(&self, pair: usize, observed: &BitVec) -> Result<BitVec> {
        let ctx = &self.pairs[pair];
        let n_cells = self.split.inner_cells.len();
        let n_outer = self.split.outer_plaquettes.len();
        let facet = n_cells + n_outer;
        let node = |e: DualEndpoint| match e {
            DualEndpoint::InnerCell(c) => c,
            DualEndpoint::OuterPlaquette(p) => n_cells + p,
            DualEndpoint::Facet => facet,
        };
        let mut edge_ids = Vec::new();
        let mut edges = Vec::new();
        for (i, d) in ctx.duals.iter().enumerate() {
            if !self.facet_boundary && (d.a == DualEndpoint::Facet || d.b == DualEndpoint::Facet) {
                continue;
            }
            edge_ids.push(i);
            edges.push((node(d.a), node(d.b)));
        }
        let graph = Graph::new(facet + 1, edges);
        let free: Vec<bool> = (0..=facet).map(|v| v >= n_cells && (v < facet || self.facet_boundary)).collect();
        let (terminals, _) = self.endpoints(pair, observed);
        let join = min_t_join(&graph, &terminals, &free)?;
        Ok(BitVec::from_indices(ctx.duals.len(), join.into_iter().map(|j| edge_ids[j])))
    }

    /// String operator of `kind` on the outer register whose syndrome on the
    /// opposite-type plaquettes is exactly `sigma`, all of color pair `pair`.
    pub fn string_correction(&self, pair: usize, sigma: &[usize], kind: PauliKind) -> Result<PauliOperator> {
        string_correction(&self.code2, self.pairs[pair].outer_pair, sigma, kind)
    }

    /// Expectations of the shared logicals on a 3D-register state.
    pub fn reference(&self, state3: &Tableau) -> Result<Vec<(PauliKind, Expectation)>> {
        logical_expectations(self.logicals.on3.generators(), state3)
    }

    /// Collapse with noiseless direct measurement of the 2D stabilizers.
    pub fn ideal_collapse<S: OutcomeSource + ?Sized>(&self, state3: &Tableau, src: &mut S) -> Result<CollapseOutcome> {
        let mut state = state3.trace_out(&self.split.inner_vertices, src)?;
        let n2 = self.split.n_outer();
        let mut total = PauliOperator::identity(n2);
        let mut records = Vec::new();
        for basis in BASES {
            let mut flagged: Vec<usize> = Vec::new();
            for (i, s) in self.code2.gauge_supports.iter().enumerate() {
                if state.measure(&PauliOperator::of_kind(basis, s.clone()), src)? {
                    flagged.push(i);
                }
            }
            for (pi, ctx) in self.pairs.iter().enumerate() {
                let sigma: Vec<usize> = flagged
                    .iter()
                    .copied()
                    .filter(|&p| self.code2.colex.plaquettes[p].colors == ctx.outer_pair)
                    .collect();
                let e = self.string_correction(pi, &sigma, basis.dual())?;
                total = frame_product(&total, &e);
                records.push(PairRecord {
                    basis,
                    pair: ctx.pair,
                    raw: BitVec::zeros(0),
                    observed: BitVec::zeros(0),
                    delta0: BitVec::zeros(0),
                    gamma_eff: BitVec::zeros(0),
                    sigma,
                    correction: e,
                });
            }
        }
        state.apply(&total)?;
        Ok(CollapseOutcome {
            state,
            correction: total,
            records,
        })
    }

    /// Fault-free collapse.
    pub fn collapse_clean<S: OutcomeSource + ?Sized>(&self, state3: &Tableau, src: &mut S) -> Result<CollapseOutcome> {
        self.collapse_with_faults(state3, &self.no_faults(), src)
    }

    pub fn no_faults(&self) -> Faults {
        Faults {
            qubit_error: PauliOperator::identity(self.split.n3()),
            flips: BitVec::zeros(self.measurement_slots().len()),
        }
    }

    /// Collapse from inner plaquette measurements, with the given faults.
    pub fn collapse_with_faults<S: OutcomeSource + ?Sized>(
        &self,
        state3: &Tableau,
        faults: &Faults,
        src: &mut S,
    ) -> Result<CollapseOutcome> {
        let n3 = self.split.n3();
        if faults.qubit_error.num_qubits() != n3 {
            return Err(Error::SizeMismatch(n3, faults.qubit_error.num_qubits()));
        }
        let slots = self.measurement_slots();
        if faults.flips.len() != slots.len() {
            return Err(Error::SizeMismatch(slots.len(), faults.flips.len()));
        }
        let mut state = state3.clone();
        state.apply(&faults.qubit_error)?;
        let n2 = self.split.n_outer();
        let mut total = PauliOperator::identity(n2);
        let mut records = Vec::new();
        let mut offset = 0;
        for basis in BASES {
            for (pi, ctx) in self.pairs.iter().enumerate() {
                let m = ctx.duals.len();
                let raw = self.extract_flux(&mut state, basis, pi, src)?.edges;
                let observed = raw.xor(&faults.flips.slice(offset, m));
                offset += m;
                let delta0 = self.repair_flux(pi, &observed)?;
                let gamma_eff = observed.xor(&delta0);
                let (_, sigma) = self.endpoints(pi, &gamma_eff);
                let e = self.string_correction(pi, &sigma, basis.dual())?;
                total = frame_product(&total, &e);
                records.push(PairRecord {
                    basis,
                    pair: ctx.pair,
                    raw,
                    observed,
                    delta0,
                    gamma_eff,
                    sigma,
                    correction: e,
                });
            }
        }
        state.apply(&total.embed(n3, &self.split.outer_vertices))?;
        let state = state.trace_out(&self.split.inner_vertices, src)?;
        Ok(CollapseOutcome {
            state,
            correction: total,
            records,
        })
    }

    /// Flips each measurement would see from the inner part of a qubit error.
    pub fn induced_flips(&self, qubit_error: &PauliOperator) -> BitVec {
        let mut bits = Vec::new();
        for basis in BASES {
            for ctx in &self.pairs {
                for s in &ctx.supports {
                    let probe = PauliOperator::of_kind(basis, s.clone());
                    bits.push(probe.anticommutes_unchecked(qubit_error));
                }
            }
        }
        BitVec::from_bools(&bits)
    }

    /// The outer error a faulty collapse leaves behind, relative to a clean one:
    /// the outer part of the qubit error times the string of every `ω = δ + δ₀`,
    /// where `δ` counts both injected flips and flips induced by inner errors.
    pub fn residual(&self, faults: &Faults, outcome: &CollapseOutcome) -> Result<PauliOperator> {
        let delta = faults.flips.xor(&self.induced_flips(&faults.qubit_error));
        let mut res = faults.qubit_error.restrict(&self.split.outer_vertices).with_sign(false);
        let mut offset = 0;
        for (rec, (basis, pi)) in outcome
            .records
            .iter()
            .zip(BASES.iter().flat_map(|&b| (0..self.pairs.len()).map(move |p| (b, p))))
        {
            let m = rec.raw.len();
            let omega = delta.slice(offset, m).xor(&rec.delta0);
            offset += m;
            let (inner, sigma) = self.endpoints(pi, &omega);
            if !inner.is_empty() {
                return Err(Error::NoCorrection(format!("residual flux has inner endpoints {inner:?}")));
            }
            res = frame_product(&res, &self.string_correction(pi, &sigma, basis.dual())?);
        }
        Ok(res)
    }

    /// Smallest weight of `op` times an element of the 2D stabilizer group,
    /// treating the X and Z parts separately.
    pub fn reduced_weight(&self, op: &PauliOperator) -> Result<usize> {
        let s = &self.code2.stabilizer_supports;
        Ok(CosetTable::min_coset_weight(op.x_bits(), s)? + CosetTable::min_coset_weight(op.z_bits(), s)?)
    }

    /// Whether an ideal 2D decoder, applied after an outer error `residual`,
    /// leaves a logical `(flips X̄, flips Z̄)` error: `.0` flips Z̄ expectation
    /// (X-type error), `.1` flips X̄ expectation (Z-type error).
    pub fn residual_is_logical(&self, residual: &PauliOperator) -> Result<(bool, bool)> {
        let s = &self.code2.stabilizer_supports;
        let syn = |e: &BitVec| BitVec::from_bools(&s.iter().map(|r| r.dot(e)).collect::<Vec<_>>());
        let cx = self.decoder2.correction(PauliKind::X, &syn(residual.x_bits()))?;
        let cz = self.decoder2.correction(PauliKind::Z, &syn(residual.z_bits()))?;
        let ex = residual.x_bits().xor(cx.x_bits());
        let ez = residual.z_bits().xor(cz.z_bits());
        // every outer qubit carries both logicals
        Ok((ex.count_ones() % 2 == 1, ez.count_ones() % 2 == 1))
    }

    /// Decodes a copy of an outer state and reports, per determined reference
    /// logical, whether its value flipped.
    pub fn logical_flips(&self, outer: &Tableau, reference: &[(PauliKind, Expectation)]) -> Result<Vec<(PauliKind, bool)>> {
        let mut t = outer.clone();
        self.decoder2.decode(&mut t)?;
        let after = logical_expectations(self.logicals.on2.generators(), &t)?;
        let mut out = Vec::new();
        for (&(k, before), &(_, now)) in reference.iter().zip(after.iter()) {
            if before == Expectation::Indeterminate {
                continue;
            }
            if now == Expectation::Indeterminate {
                return Err(Error::NoCorrection(format!("logical {k} became undetermined")));
            }
            out.push((k, before != now));
        }
        Ok(out)
    }

    /// Encoded 3D state with the logical of `kind` fixed to `+1`.
    pub fn encoded3(&self, kind: PauliKind) -> Result<Tableau> {
        Tableau::encoded(&self.code3.s, &self.code3.g, &LogicalStateSpec::eigenstate_of(&self.code3.l, kind)?)
    }

    /// Encoded 2D state with the logical of `kind` fixed to `+1`.
    pub fn encoded2(&self, kind: PauliKind) -> Result<Tableau> {
        Tableau::encoded(&self.code2.s, &self.code2.g, &LogicalStateSpec::eigenstate_of(&self.code2.l, kind)?)
    }

    /// Single-shot decoder of the inner code on the 3D register.
    pub fn inner_decoder(&self) -> Result<SingleShotDecoder> {
        SingleShotDecoder::new(&self.inner, self.split.n3(), &self.split.inner_vertices)
    }

    /// Grows an outer state into a 3D state: adds inner qubits in `|0⟩`, runs
    /// single-shot correction of the inner code in both bases with the given
    /// gauge measurement flips (Z basis first), then measures the 2D
    /// stabilizers and corrects the outer register.
    pub fn blow_up<S: OutcomeSource + ?Sized>(
        &self,
        state2: &Tableau,
        decoder: &SingleShotDecoder,
        flips: &[BitVec; 2],
        src: &mut S,
    ) -> Result<BlowUpOutcome> {
        let n2 = self.split.n_outer();
        if state2.num_qubits() != n2 {
            return Err(Error::SizeMismatch(n2, state2.num_qubits()));
        }
        let n3 = self.split.n3();
        let map: Vec<usize> = self.split.outer_vertices.iter().chain(self.split.inner_vertices.iter()).copied().collect();
        let mut state = state2.tensor(&Tableau::zero_state(self.split.n_inner())).relabel(&map)?;
        let mut reports = Vec::new();
        for (basis, f) in BASES.into_iter().zip(flips.iter()) {
            reports.push(decoder.run(&mut state, basis, f, src)?);
        }
        let mut outer_fix = PauliOperator::identity(n2);
        for basis in BASES {
            let mut syn = Vec::new();
            for s in &self.code2.stabilizer_supports {
                let op = PauliOperator::of_kind(basis, s.clone()).embed(n3, &self.split.outer_vertices);
                syn.push(state.measure(&op, src)?);
            }
            let c = self.decoder2.correction(basis.dual(), &BitVec::from_bools(&syn))?;
            outer_fix = frame_product(&outer_fix, &c);
        }
        state.apply(&outer_fix.embed(n3, &self.split.outer_vertices))?;
        Ok(BlowUpOutcome {
            state,
            reports,
            outer_correction: outer_fix,
        })
    }

    /// Values of the 3D stabilizer generators not at `+1`, as `(kind, index)`.
    pub fn violated_stabilizers3(&self, state3: &Tableau) -> Result<Vec<(PauliKind, usize)>> {
        let mut out = Vec::new();
        for kind in [PauliKind::X, PauliKind::Z] {
            for (i, op) in self.code3.stabilizers_of(kind).iter().enumerate() {
                if state3.expect(op)? != Expectation::Plus {
                    out.push((kind, i));
                }
            }
        }
        Ok(out)
    }

    /// Color of the strings that end on `pair` plaquettes, in the outer colex.
    pub fn string_color(&self, pair: usize) -> Color {
        ColorSet::RGB.difference(self.pairs[pair].outer_pair).sole().expect("outer pair is a pair")
    }
}

/// Product of two Paulis up to phase, as a correction frame.
pub fn frame_product(a: &PauliOperator, b: &PauliOperator) -> PauliOperator {
    PauliOperator::from_parts(a.x_bits().xor(b.x_bits()), a.z_bits().xor(b.z_bits()), false)
}

fn logical_expectations(gens: &[PauliOperator], state: &Tableau) -> Result<Vec<(PauliKind, Expectation)>> {
    let mut out = Vec::new();
    for kind in [PauliKind::X, PauliKind::Z] {
        let op = gens
            .iter()
            .find(|g| g.is_pure(kind) && !g.is_identity())
            .ok_or_else(|| Error::Code(format!("no logical {kind}")))?;
        out.push((kind, state.expect(op)?));
    }
    Ok(out)
}

/// Minimum-weight string operator of `kind` on a 2D color code whose syndrome
/// is exactly `sigma` (plaquette indices, all of color `pair`).
///
/// Strings run along edges of the third color; each such edge joins the two
/// `pair`-plaquettes containing its ends, or one of them and the boundary.
pub fn string_correction(code2: &CodeTriple, pair: ColorSet, sigma: &[usize], kind: PauliKind) -> Result<PauliOperator> {
    let colex = &code2.colex;
    let string = ColorSet::RGB
        .difference(pair)
        .sole()
        .ok_or_else(|| Error::InvalidParameter(format!("{pair} is not a color pair")))?;
    let nodes: Vec<usize> = (0..colex.plaquettes.len()).filter(|&p| colex.plaquettes[p].colors == pair).collect();
    let mut node_of = vec![usize::MAX; colex.plaquettes.len()];
    for (i, &p) in nodes.iter().enumerate() {
        node_of[p] = i;
    }
    for &p in sigma {
        if p >= colex.plaquettes.len() || node_of[p] == usize::MAX {
            return Err(Error::InvalidParameter(format!("syndrome plaquette {p} is not a {pair} plaquette")));
        }
    }
    let boundary = nodes.len();
    let owner = |v: usize| nodes.iter().position(|&p| colex.plaquettes[p].vertices.binary_search(&v).is_ok()).unwrap_or(boundary);
    let mut edges = Vec::new();
    let mut qubits = Vec::new();
    for e in colex.edges.iter().filter(|e| e.color == string) {
        let (a, b) = (owner(e.a), owner(e.b));
        if a == boundary && b == boundary {
            continue;
        }
        edges.push((a, b));
        qubits.push((e.a, e.b));
    }
    let graph = Graph::new(boundary + 1, edges);
    let mut free = vec![false; boundary + 1];
    free[boundary] = true;
    let terminals: Vec<usize> = sigma.iter().map(|&p| node_of[p]).collect();
    let join = min_t_join(&graph, &terminals, &free)?;
    let mut support = BitVec::zeros(code2.n);
    for j in join {
        support.flip(qubits[j].0);
        support.flip(qubits[j].1);
    }
    let op = PauliOperator::of_kind(kind, support);
    // the string must flag exactly sigma
    let mut want = vec![false; colex.plaquettes.len()];
    for &p in sigma {
        want[p] ^= true;
    }
    for (p, s) in code2.gauge_supports.iter().enumerate() {
        let probe = PauliOperator::of_kind(kind.dual(), s.clone());
        if probe.anticommutes_unchecked(&op) != want[p] {
            return Err(Error::NoCorrection(format!("string for {sigma:?} misses plaquette {p}")));
        }
    }
    Ok(op)
}

/// What blow-up did.
#[derive(Clone, Debug)]
pub struct BlowUpOutcome {
    pub state: Tableau,
    pub reports: Vec<SingleShotReport>,
    pub outer_correction: PauliOperator,
}

/// One round of single-shot correction.
#[derive(Clone, Debug)]
pub struct SingleShotReport {
    pub basis: PauliKind,
    /// Gauge outcomes after measurement flips.
    pub observed: BitVec,
    /// Minimum flip restoring every gauge relation.
    pub repair: BitVec,
    /// Stabilizer syndrome read from the repaired outcomes.
    pub sigma: BitVec,
    /// Applied correction on the register.
    pub correction: PauliOperator,
}

/// Single-shot correction of a subsystem code embedded in a larger register:
/// measure one type of gauge generator, repair the outcomes so that every
/// product relation among them holds, infer the stabilizer syndrome and apply
/// the minimum-weight correction.
#[derive(Clone, Debug)]
pub struct SingleShotDecoder {
    n_register: usize,
    map: Vec<usize>,
    gauge: Vec<BitVec>,
    relations: CosetTable,
    combos: Vec<BitVec>,
    correction: CosetTable,
}

impl SingleShotDecoder {
    pub fn new(code: &CodeTriple, n_register: usize, map: &[usize]) -> Result<SingleShotDecoder> {
        if map.len() != code.n {
            return Err(Error::SizeMismatch(code.n, map.len()));
        }
        let m = code.gauge_supports.len();
        let ech = Echelon::new(&code.gauge_supports, code.n);
        let relations = CosetTable::new(ech.dependencies(), m)?;
        let combos = code
            .stabilizer_supports
            .iter()
            .map(|s| ech.express(s).ok_or_else(|| Error::Code("stabilizer outside the gauge span".into())))
            .collect::<Result<Vec<_>>>()?;
        Ok(SingleShotDecoder {
            n_register,
            map: map.to_vec(),
            gauge: code.gauge_supports.clone(),
            relations,
            combos,
            correction: CosetTable::new(&code.stabilizer_supports, code.n)?,
        })
    }

    pub fn num_gauge(&self) -> usize {
        self.gauge.len()
    }

    /// Number of independent relations among the gauge outcomes.
    pub fn num_relations(&self) -> usize {
        self.relations.num_checks()
    }

    /// Repairs `observed` and returns `(repair, sigma)`.
    pub fn infer(&self, observed: &BitVec) -> Result<(BitVec, BitVec)> {
        let rel = self.relations.syndrome(observed);
        let repair = self
            .relations
            .lookup(&rel)
            .ok_or_else(|| Error::NoCorrection("gauge relations cannot be restored".into()))?
            .clone();
        let fixed = observed.xor(&repair);
        let sigma = BitVec::from_bools(&self.combos.iter().map(|c| c.dot(&fixed)).collect::<Vec<_>>());
        Ok((repair, sigma))
    }

    /// Correction (on code qubits) for a stabilizer syndrome.
    pub fn correction_for(&self, sigma: &BitVec) -> Result<BitVec> {
        self.correction
            .lookup(sigma)
            .cloned()
            .ok_or_else(|| Error::NoCorrection(format!("syndrome {sigma:?}")))
    }

    /// Measures the `basis`-type gauge with `flips` on the outcomes and corrects.
    pub fn run<S: OutcomeSource + ?Sized>(
        &self,
        state: &mut Tableau,
        basis: PauliKind,
        flips: &BitVec,
        src: &mut S,
    ) -> Result<SingleShotReport> {
        if state.num_qubits() != self.n_register {
            return Err(Error::SizeMismatch(self.n_register, state.num_qubits()));
        }
        if flips.len() != self.gauge.len() {
            return Err(Error::SizeMismatch(self.gauge.len(), flips.len()));
        }
        let mut bits = Vec::with_capacity(self.gauge.len());
        for s in &self.gauge {
            let op = PauliOperator::of_kind(basis, s.clone()).embed(self.n_register, &self.map);
            bits.push(state.measure(&op, src)?);
        }
        let observed = BitVec::from_bools(&bits).xor(flips);
        let (repair, sigma) = self.infer(&observed)?;
        let e = PauliOperator::of_kind(basis.dual(), self.correction_for(&sigma)?).embed(self.n_register, &self.map);
        state.apply(&e)?;
        Ok(SingleShotReport {
            basis,
            observed,
            repair,
            sigma,
            correction: e,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colex::minimal_colex;
    use crate::tableau::{enumerate_branches, ScriptedOutcomes};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn engine() -> JumpEngine {
        JumpEngine::new(&minimal_colex(3).unwrap(), ColorSet::RGB).unwrap()
    }

    #[test]
    fn tetra_dual_graphs() {
        let e = engine();
        assert_eq!(e.pairs.len(), 3);
        for ctx in &e.pairs {
            // one cube face per pair between the inner cube and an interface
            // cell, one on the facet boundary
            assert_eq!(ctx.duals.len(), 2);
        }
        assert_eq!(e.measurement_slots().len(), 12);
    }

    #[test]
    fn clean_collapse_preserves_logicals() {
        let e = engine();
        for kind in [PauliKind::Z, PauliKind::X] {
            let s3 = e.encoded3(kind).unwrap();
            let reference = e.reference(&s3).unwrap();
            let branches = enumerate_branches(|src: &mut ScriptedOutcomes| {
                let out = e.collapse_clean(&s3, src)?;
                for s in e.code2.stabilizers_of(PauliKind::X).iter().chain(e.code2.stabilizers_of(PauliKind::Z).iter()) {
                    assert_eq!(out.state.expect(s)?, Expectation::Plus, "stabilizer {s}");
                }
                for r in &out.records {
                    assert!(r.delta0.is_zero());
                }
                e.logical_flips(&out.state, &reference)
            })
            .unwrap();
            let total: f64 = branches.iter().map(|b| b.0).sum();
            assert!((total - 1.0).abs() < 1e-12);
            for (_, flips) in branches {
                assert!(!flips.is_empty());
                assert!(flips.iter().all(|f| !f.1), "{flips:?}");
            }
        }
    }

    #[test]
    fn collapse_corrections_match_their_syndrome() {
        let e = engine();
        let s3 = e.encoded3(PauliKind::Z).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let out = e.collapse_clean(&s3, &mut rng).unwrap();
            for r in &out.records {
                let (inner, sigma) = e.endpoints(e.pair_index(r.pair).unwrap(), &r.gamma_eff);
                assert!(inner.is_empty());
                assert_eq!(sigma, r.sigma);
                for (p, s) in e.code2.gauge_supports.iter().enumerate() {
                    let probe = PauliOperator::of_kind(r.basis, s.clone());
                    let hit = probe.anticommutes_unchecked(&r.correction);
                    let in_pair = e.code2.colex.plaquettes[p].colors == e.split.outer_pair(r.pair);
                    assert_eq!(hit, in_pair && r.sigma.contains(&p));
                }
            }
        }
    }

    #[test]
    fn flux_is_closed_at_inner_cells() {
        let e = engine();
        let s3 = e.encoded3(PauliKind::X).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let mut t = s3.clone();
            for basis in BASES {
                for pi in 0..3 {
                    let flux = e.extract_flux(&mut t, basis, pi, &mut rng).unwrap();
                    let (inner, outer) = e.endpoints(pi, &flux.edges);
                    assert!(inner.is_empty());
                    // an outer plaquette reads -1 exactly when it is an endpoint
                    for ic in &e.split.interface {
                        let p2 = e.outer_plaquette(ic.outer_plaquette);
                        if e.code2.colex.plaquettes[p2].colors != e.pairs[pi].outer_pair {
                            continue;
                        }
                        let op = PauliOperator::of_kind(basis, e.code2.gauge_supports[p2].clone())
                            .embed(e.split.n3(), &e.split.outer_vertices);
                        let want = if outer.contains(&p2) { Expectation::Minus } else { Expectation::Plus };
                        assert_eq!(t.expect(&op).unwrap(), want);
                    }
                }
            }
        }
    }

    #[test]
    fn single_flip_is_absorbed_but_leaves_a_string() {
        let e = engine();
        let s3 = e.encoded3(PauliKind::Z).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let slots = e.measurement_slots();
        for i in 0..slots.len() {
            let mut f = e.no_faults();
            f.flips.set(i, true);
            let out = e.collapse_with_faults(&s3, &f, &mut rng).unwrap();
            let res = e.residual(&f, &out).unwrap();
            let w = e.reduced_weight(&res).unwrap();
            assert!(w == 0 || w == 2, "slot {i}: weight {w}");
        }
    }

    #[test]
    fn outer_qubit_error_survives_collapse_as_itself() {
        let e = engine();
        let s3 = e.encoded3(PauliKind::Z).unwrap();
        let reference = e.reference(&s3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for q in 0..7 {
            let mut f = e.no_faults();
            f.qubit_error = PauliOperator::x_on(15, [e.split.outer_vertices[q]]);
            let out = e.collapse_with_faults(&s3, &f, &mut rng).unwrap();
            let res = e.residual(&f, &out).unwrap();
            assert_eq!(e.reduced_weight(&res).unwrap(), 1);
            let flips = e.logical_flips(&out.state, &reference).unwrap();
            assert!(flips.iter().all(|x| !x.1));
        }
    }

    #[test]
    fn ideal_collapse_keeps_codespace() {
        let e = engine();
        let s3 = e.encoded3(PauliKind::X).unwrap();
        let reference = e.reference(&s3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let out = e.ideal_collapse(&s3, &mut rng).unwrap();
            for s in e.code2.stabilizers_of(PauliKind::Z) {
                assert_eq!(out.state.expect(&s).unwrap(), Expectation::Plus);
            }
            assert!(e.logical_flips(&out.state, &reference).unwrap().iter().all(|x| !x.1));
        }
    }

    #[test]
    fn blow_up_then_collapse_round_trip() {
        let e = engine();
        let dec = e.inner_decoder().unwrap();
        let clean = [BitVec::zeros(dec.num_gauge()), BitVec::zeros(dec.num_gauge())];
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for kind in [PauliKind::Z, PauliKind::X] {
            let s2 = e.encoded2(kind).unwrap();
            let ref2 = logical_expectations(e.logicals.on2.generators(), &s2).unwrap();
            for _ in 0..5 {
                let up = e.blow_up(&s2, &dec, &clean, &mut rng).unwrap();
                assert!(e.violated_stabilizers3(&up.state).unwrap().is_empty());
                let ref3 = e.reference(&up.state).unwrap();
                assert_eq!(ref3, ref2);
                let down = e.collapse_clean(&up.state, &mut rng).unwrap();
                assert!(e.logical_flips(&down.state, &ref2).unwrap().iter().all(|x| !x.1));
            }
        }
    }

    #[test]
    fn string_correction_rejects_wrong_colors() {
        let e = engine();
        let other = (0..e.code2.colex.plaquettes.len())
            .find(|&p| e.code2.colex.plaquettes[p].colors != e.pairs[0].outer_pair)
            .unwrap();
        assert!(e.string_correction(0, &[other], PauliKind::X).is_err());
    }

    #[test]
    fn single_shot_relations_on_tetra() {
        let e = engine();
        let dec = SingleShotDecoder::new(&e.code3, 15, &(0..15).collect::<Vec<_>>()).unwrap();
        assert_eq!(dec.num_gauge(), 18);
        let (repair, sigma) = dec.infer(&BitVec::zeros(18)).unwrap();
        assert!(repair.is_zero() && sigma.is_zero());
        // one flipped outcome always violates some relation and is repaired
        for i in 0..18 {
            let (repair, sigma) = dec.infer(&BitVec::from_indices(18, [i])).unwrap();
            assert_eq!(repair.count_ones(), 1, "flip {i}");
            assert_eq!(sigma.len(), 4);
        }
    }
}
