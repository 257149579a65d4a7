//! Noise models and Monte Carlo harnesses for collapse and single-shot correction.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::code::CodeTriple;
use crate::colex::{Colex, DualEndpoint};
use crate::decoder::{CosetTable, IdealDecoder};
use crate::error::{Error, Result};
use crate::gf2::BitVec;
use crate::jump::{frame_product, Faults, JumpEngine, SingleShotDecoder, BASES};
use crate::pauli::{PauliKind, PauliOperator};
use crate::tableau::{enumerate_branches, Expectation, LogicalStateSpec, OutcomeSource, ScriptedOutcomes, Tableau};

/// Phenomenological iid noise: X and Z each hit every qubit with probability
/// `p_qubit`, and every plaquette outcome is flipped with probability `q_meas`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NoiseSpec {
    pub p_qubit: f64,
    pub q_meas: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(p_qubit: f64, q_meas: f64, seed: u64) -> Result<NoiseSpec> {
        for (name, v) in [("p", p_qubit), ("q", q_meas)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!("{name} = {v} is not a probability")));
            }
        }
        Ok(NoiseSpec { p_qubit, q_meas, seed })
    }

    pub fn noiseless(seed: u64) -> NoiseSpec {
        NoiseSpec {
            p_qubit: 0.0,
            q_meas: 0.0,
            seed,
        }
    }
}

/// Generator of trial `trial`: one ChaCha stream per trial under the run seed,
/// so results do not depend on how trials are spread over workers.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Includes each of `len` edges independently with probability `q`.
pub fn sample_measurement_noise<R: Rng + ?Sized>(q: f64, len: usize, rng: &mut R) -> BitVec {
    BitVec::from_bools(&(0..len).map(|_| q > 0.0 && rng.gen_bool(q)).collect::<Vec<_>>())
}

/// X and Z independently on each of `n` qubits with probability `p`.
pub fn sample_qubit_error<R: Rng + ?Sized>(p: f64, n: usize, rng: &mut R) -> PauliOperator {
    let mut x = Vec::with_capacity(n);
    let mut z = Vec::with_capacity(n);
    for _ in 0..n {
        x.push(p > 0.0 && rng.gen_bool(p));
        z.push(p > 0.0 && rng.gen_bool(p));
    }
    PauliOperator::from_parts(BitVec::from_bools(&x), BitVec::from_bools(&z), false)
}

/// Measurement noise models understood by the α-bound routines.
#[derive(Clone, Debug, PartialEq)]
pub enum MeasurementNoise {
    Iid(f64),
    /// Independent flips with per-edge probabilities.
    PerEdge(Vec<f64>),
}

/// α for which the noise is α-bounded. Only the iid model has a closed form,
/// where the inclusion tail of a set `A` is exactly `q^|A|`.
pub fn alpha_bound_analytic(noise: &MeasurementNoise) -> Result<f64> {
    match noise {
        MeasurementNoise::Iid(q) => Ok(*q),
        MeasurementNoise::PerEdge(_) => Err(Error::InvalidParameter("only iid measurement noise has an analytic α".into())),
    }
}

/// Largest edge count for the exhaustive α check.
pub const MAX_ALPHA_EDGES: usize = 20;

/// Probability of every subset (indexed by bitmask) under independent flips.
pub fn subset_distribution(probs: &[f64]) -> Result<Vec<f64>> {
    let m = probs.len();
    if m > MAX_ALPHA_EDGES {
        return Err(Error::TooLarge {
            what: "edges for exhaustive α check",
            n: m,
            max: MAX_ALPHA_EDGES,
        });
    }
    let mut dist = vec![1.0f64; 1 << m];
    for (mask, p) in dist.iter_mut().enumerate() {
        for (e, &q) in probs.iter().enumerate() {
            *p *= if mask >> e & 1 == 1 { q } else { 1.0 - q };
        }
    }
    Ok(dist)
}

/// Inclusion tails `p̃(A) = Σ_{B ⊇ A} p(B)` for every `A`, by a superset-sum transform.
pub fn inclusion_tails(dist: &[f64]) -> Vec<f64> {
    let mut t = dist.to_vec();
    let m = t.len().trailing_zeros() as usize;
    for e in 0..m {
        for mask in 0..t.len() {
            if mask >> e & 1 == 0 {
                t[mask] += t[mask | 1 << e];
            }
        }
    }
    t
}

/// First subset (bitmask) with `p̃(A) > α^|A|`, beyond a relative rounding slack.
pub fn check_alpha_bounded(dist: &[f64], alpha: f64) -> Option<usize> {
    let tails = inclusion_tails(dist);
    (0..tails.len()).find(|&a| {
        let bound = alpha.powi(a.count_ones() as i32);
        tails[a] > bound * (1.0 + 1e-9) + 1e-15
    })
}

/// Enumeration budget of [`measure_k`].
pub const MAX_K_SUBSETS: u64 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KReport {
    /// `max |supp E_γ| / |γ|`, zero if no closed γ was found.
    pub k_hat: f64,
    /// The maximizing `(support, length)`.
    pub witness: (usize, usize),
    /// Closed flux configurations examined.
    pub closed: u64,
}

/// Measures the constant `K` of one color pair: over every dual edge set `γ`
/// of size at most `cap` without inner endpoints, the largest ratio of the
/// minimal string correction support to `|γ|`.
pub fn measure_k(engine: &JumpEngine, pair: usize, cap: usize) -> Result<KReport> {
    let m = engine.pairs[pair].duals.len();
    let mut count: u64 = 0;
    for k in 1..=cap.min(m) {
        count = count.saturating_add(binomial(m as u64, k as u64));
    }
    if count > MAX_K_SUBSETS {
        return Err(Error::TooLarge {
            what: "flux configurations for K",
            n: count.min(usize::MAX as u64) as usize,
            max: MAX_K_SUBSETS as usize,
        });
    }
    let mut best = KReport {
        k_hat: 0.0,
        witness: (0, 0),
        closed: 0,
    };
    for k in 1..=cap.min(m) {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let gamma = BitVec::from_indices(m, idx.iter().copied());
            let (inner, outer) = engine.endpoints(pair, &gamma);
            if inner.is_empty() {
                best.closed += 1;
                let w = engine.string_correction(pair, &outer, PauliKind::X)?.weight();
                if w * best.witness.1.max(1) > best.witness.0 * k || best.witness.1 == 0 {
                    best.witness = (w, k);
                    best.k_hat = w as f64 / k as f64;
                }
            }
            let mut j = k;
            while j > 0 && idx[j - 1] == m - k + j - 1 {
                j -= 1;
            }
            if j == 0 {
                break;
            }
            idx[j - 1] += 1;
            for t in j..k {
                idx[t] = idx[t - 1] + 1;
            }
        }
    }
    Ok(best)
}

/// [`measure_k`] maximized over every facet pair.
pub fn measure_k_all(engine: &JumpEngine, cap: usize) -> Result<KReport> {
    let mut best: Option<KReport> = None;
    for p in 0..engine.pairs.len() {
        let r = measure_k(engine, p, cap)?;
        best = Some(match best {
            Some(b) if b.k_hat >= r.k_hat => KReport {
                closed: b.closed + r.closed,
                ..b
            },
            Some(b) => KReport {
                closed: b.closed + r.closed,
                ..r
            },
            None => r,
        });
    }
    best.ok_or_else(|| Error::InvalidParameter("no facet pairs".into()))
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Aggregated results of a batch of trials. Index 0 of the per-basis arrays
/// counts `|0̄⟩` trials, index 1 `|+̄⟩` trials.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TrialStats {
    pub trials: u64,
    pub trials_by_state: [u64; 2],
    pub failures_by_state: [u64; 2],
    pub residual_weight_hist: BTreeMap<usize, u64>,
    pub max_residual_component: usize,
    pub delta0_hist: BTreeMap<usize, u64>,
    /// Trials breaking the residual locality bound (collapse only).
    pub locality_violations: u64,
}

impl TrialStats {
    pub fn failures(&self) -> u64 {
        self.failures_by_state.iter().sum()
    }

    pub fn failure_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.failures() as f64 / self.trials as f64
        }
    }

    /// Wilson score interval of the failure rate at `z` standard deviations.
    pub fn wilson(&self, z: f64) -> (f64, f64) {
        wilson_interval(self.failures(), self.trials, z)
    }

    pub fn merge(&mut self, other: &TrialStats) {
        self.trials += other.trials;
        for i in 0..2 {
            self.trials_by_state[i] += other.trials_by_state[i];
            self.failures_by_state[i] += other.failures_by_state[i];
        }
        for (k, v) in &other.residual_weight_hist {
            *self.residual_weight_hist.entry(*k).or_default() += v;
        }
        for (k, v) in &other.delta0_hist {
            *self.delta0_hist.entry(*k).or_default() += v;
        }
        self.max_residual_component = self.max_residual_component.max(other.max_residual_component);
        self.locality_violations += other.locality_violations;
    }

    fn record(&mut self, t: &TrialSummary) {
        let i = t.state_index();
        self.trials += 1;
        self.trials_by_state[i] += 1;
        self.failures_by_state[i] += t.failure as u64;
        *self.residual_weight_hist.entry(t.residual_weight).or_default() += 1;
        *self.delta0_hist.entry(t.delta0_size).or_default() += 1;
        self.max_residual_component = self.max_residual_component.max(t.max_component);
        self.locality_violations += !t.locality_ok as u64;
    }
}

pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Sizes of the connected pieces of `support` in the colex graph.
pub fn support_components(colex: &Colex, support: &BitVec) -> Vec<usize> {
    let n = colex.num_vertices;
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut v: usize) -> usize {
        while p[v] != v {
            p[v] = p[p[v]];
            v = p[v];
        }
        v
    }
    for e in &colex.edges {
        if support.get(e.a) && support.get(e.b) {
            let (a, b) = (find(&mut parent, e.a), find(&mut parent, e.b));
            parent[a] = b;
        }
    }
    let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
    for v in support.iter_ones() {
        *sizes.entry(find(&mut parent, v)).or_default() += 1;
    }
    sizes.into_values().collect()
}

/// Largest connected piece of an edge set in the dual graph of one pair.
fn largest_dual_component(engine: &JumpEngine, pair: usize, edges: &BitVec) -> usize {
    let duals = &engine.pairs[pair].duals;
    let members: Vec<usize> = edges.iter_ones().collect();
    let mut parent: Vec<usize> = (0..members.len()).collect();
    fn find(p: &mut [usize], mut v: usize) -> usize {
        while p[v] != v {
            p[v] = p[p[v]];
            v = p[v];
        }
        v
    }
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            let (a, b) = (&duals[members[i]], &duals[members[j]]);
            let shared = [a.a, a.b].iter().any(|x| *x != DualEndpoint::Facet && (*x == b.a || *x == b.b));
            if shared {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
    for i in 0..members.len() {
        *sizes.entry(find(&mut parent, i)).or_default() += 1;
    }
    sizes.into_values().max().unwrap_or(0)
}

/// One line of a collapse trace.
#[derive(Clone, Debug, Serialize)]
pub struct TraceRecord {
    pub trial: u64,
    pub seed: u64,
    /// `"0"` or `"+"`.
    pub state: &'static str,
    pub qubit_error: String,
    pub flips: Vec<usize>,
    pub steps: Vec<StepTrace>,
    pub correction: String,
    pub residual: String,
    pub residual_weight: usize,
    pub logical_flips: Vec<(String, bool)>,
    pub failure: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct StepTrace {
    pub basis: String,
    pub pair: String,
    pub raw: Vec<usize>,
    pub observed: Vec<usize>,
    pub delta0: Vec<usize>,
    pub gamma_eff: Vec<usize>,
    pub sigma: Vec<usize>,
    pub correction: String,
}

/// Per-trial figures that feed [`TrialStats`].
#[derive(Clone, Debug)]
struct TrialSummary {
    kind: PauliKind,
    failure: bool,
    residual_weight: usize,
    max_component: usize,
    delta0_size: usize,
    locality_ok: bool,
}

impl TrialSummary {
    fn state_index(&self) -> usize {
        match self.kind {
            PauliKind::Z => 0,
            PauliKind::X => 1,
        }
    }
}

/// Logical state of trial `t`: `|0̄⟩` on even trials, `|+̄⟩` on odd ones.
pub fn trial_state(t: u64) -> PauliKind {
    if t.is_multiple_of(2) {
        PauliKind::Z
    } else {
        PauliKind::X
    }
}

fn state_label(kind: PauliKind) -> &'static str {
    match kind {
        PauliKind::Z => "0",
        PauliKind::X => "+",
    }
}

/// Result of a simulation run.
#[derive(Clone, Debug)]
pub struct RunResult<T> {
    pub stats: TrialStats,
    /// Present when traces were requested, in trial order.
    pub traces: Vec<T>,
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))
}

/// Prepared state and reference for both logical states.
struct Prepared {
    states: [Tableau; 2],
    references: [Vec<(PauliKind, Expectation)>; 2],
}

impl Prepared {
    fn collapse(engine: &JumpEngine) -> Result<Prepared> {
        let s0 = engine.encoded3(PauliKind::Z)?;
        let s1 = engine.encoded3(PauliKind::X)?;
        let r0 = engine.reference(&s0)?;
        let r1 = engine.reference(&s1)?;
        Ok(Prepared {
            states: [s0, s1],
            references: [r0, r1],
        })
    }

    fn index(kind: PauliKind) -> usize {
        match kind {
            PauliKind::Z => 0,
            PauliKind::X => 1,
        }
    }
}

/// One noisy collapse trial with explicit faults and outcome source.
fn collapse_trial<S: OutcomeSource + ?Sized>(
    engine: &JumpEngine,
    prep: &Prepared,
    kind: PauliKind,
    faults: &Faults,
    k_hat: f64,
    src: &mut S,
) -> Result<(TrialSummary, crate::jump::CollapseOutcome, PauliOperator, Vec<(PauliKind, bool)>)> {
    let i = Prepared::index(kind);
    let out = engine.collapse_with_faults(&prep.states[i], faults, src)?;
    let flips = engine.logical_flips(&out.state, &prep.references[i])?;
    let failure = flips.iter().any(|f| f.1);
    let residual = engine.residual(faults, &out)?;
    let residual_weight = engine.reduced_weight(&residual)?;
    let max_component = support_components(&engine.code2.colex, &residual.support()).into_iter().max().unwrap_or(0);
    let delta = faults.flips.xor(&engine.induced_flips(&faults.qubit_error));
    let mut offset = 0;
    let mut largest_delta = 0;
    let mut delta0_size = 0;
    for (r, (_, pi)) in out
        .records
        .iter()
        .zip(BASES.iter().flat_map(|&b| (0..engine.pairs.len()).map(move |p| (b, p))))
    {
        let m = r.raw.len();
        largest_delta = largest_delta.max(largest_dual_component(engine, pi, &delta.slice(offset, m)));
        offset += m;
        delta0_size += r.delta0.count_ones();
    }
    let outer_error = faults.qubit_error.restrict(&engine.split.outer_vertices).weight();
    let slack = delta0_size + outer_error;
    let locality_ok = max_component as f64 <= k_hat * (largest_delta + slack) as f64 + outer_error as f64;
    Ok((
        TrialSummary {
            kind,
            failure,
            residual_weight,
            max_component,
            delta0_size,
            locality_ok,
        },
        out,
        residual,
        flips,
    ))
}

fn indices(b: &BitVec) -> Vec<usize> {
    b.iter_ones().collect()
}

/// Monte Carlo collapse: per trial, prepare `|0̄⟩` or `|+̄⟩`, apply iid qubit
/// noise, collapse with iid measurement flips, decode ideally and compare.
pub fn run_collapse_trials(
    engine: &JumpEngine,
    noise: &NoiseSpec,
    trials: u64,
    workers: usize,
    trace: bool,
) -> Result<RunResult<TraceRecord>> {
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial is required".into()));
    }
    let prep = Prepared::collapse(engine)?;
    let k_hat = measure_k_all(engine, 4)?.k_hat;
    let n3 = engine.split.n3();
    let slots = engine.measurement_slots().len();
    let one = |t: u64| -> Result<(TrialSummary, Option<TraceRecord>)> {
        let mut rng = trial_rng(noise.seed, t);
        let kind = trial_state(t);
        let faults = Faults {
            qubit_error: sample_qubit_error(noise.p_qubit, n3, &mut rng),
            flips: sample_measurement_noise(noise.q_meas, slots, &mut rng),
        };
        let (summary, out, residual, flips) = collapse_trial(engine, &prep, kind, &faults, k_hat, &mut rng)?;
        let record = trace.then(|| TraceRecord {
            trial: t,
            seed: noise.seed,
            state: state_label(kind),
            qubit_error: faults.qubit_error.to_string(),
            flips: indices(&faults.flips),
            steps: out
                .records
                .iter()
                .map(|r| StepTrace {
                    basis: r.basis.to_string(),
                    pair: r.pair.to_string(),
                    raw: indices(&r.raw),
                    observed: indices(&r.observed),
                    delta0: indices(&r.delta0),
                    gamma_eff: indices(&r.gamma_eff),
                    sigma: r.sigma.clone(),
                    correction: r.correction.to_string(),
                })
                .collect(),
            correction: out.correction.to_string(),
            residual: residual.to_string(),
            residual_weight: summary.residual_weight,
            logical_flips: flips.iter().map(|(k, f)| (k.to_string(), *f)).collect(),
            failure: summary.failure,
        });
        Ok((summary, record))
    };
    let results: Vec<Result<(TrialSummary, Option<TraceRecord>)>> =
        pool(workers)?.install(|| (0..trials).into_par_iter().map(one).collect());
    let mut stats = TrialStats::default();
    let mut traces = Vec::new();
    for r in results {
        let (s, t) = r?;
        stats.record(&s);
        traces.extend(t);
    }
    Ok(RunResult { stats, traces })
}

/// Which code a single-shot run corrects.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SingleShotTarget {
    /// The full tetrahedral code.
    Tetrahedral,
    /// The inner code of the split (no logical qubit).
    Inner,
}

impl fmt::Display for SingleShotTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SingleShotTarget::Tetrahedral => "tetrahedral",
            SingleShotTarget::Inner => "inner",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SingleShotTrace {
    pub trial: u64,
    pub seed: u64,
    pub state: &'static str,
    pub qubit_error: String,
    pub flips: [Vec<usize>; 2],
    pub repairs: [Vec<usize>; 2],
    pub sigma: [Vec<usize>; 2],
    pub correction: String,
    pub residual: String,
    pub residual_weight: usize,
    pub failure: bool,
}

/// Everything a single-shot trial needs about its code.
pub struct SingleShotSetup {
    pub target: SingleShotTarget,
    pub code: CodeTriple,
    pub decoder: SingleShotDecoder,
    ideal: IdealDecoder,
    states: [Tableau; 2],
}

impl SingleShotSetup {
    pub fn new(engine: &JumpEngine, target: SingleShotTarget) -> Result<SingleShotSetup> {
        let code = match target {
            SingleShotTarget::Tetrahedral => engine.code3.clone(),
            SingleShotTarget::Inner => engine.inner.clone(),
        };
        let map: Vec<usize> = (0..code.n).collect();
        let decoder = SingleShotDecoder::new(&code, code.n, &map)?;
        let ideal = IdealDecoder::new(&code)?;
        let state = |kind: PauliKind| -> Result<Tableau> {
            let spec = if code.l.is_empty() {
                LogicalStateSpec::default()
            } else {
                LogicalStateSpec::eigenstate_of(&code.l, kind)?
            };
            Tableau::encoded(&code.s, &code.g, &spec)
        };
        let states = [state(PauliKind::Z)?, state(PauliKind::X)?];
        Ok(SingleShotSetup {
            target,
            code,
            decoder,
            ideal,
            states,
        })
    }

    pub fn num_gauge(&self) -> usize {
        self.decoder.num_gauge()
    }

    /// Clean encoded state for logical `kind`.
    pub fn state(&self, kind: PauliKind) -> &Tableau {
        &self.states[Prepared::index(kind)]
    }

    /// Runs both correction rounds (Z gauge first) on a copy of the encoded
    /// state hit by `qubit_error`, then judges the result. Returns the applied
    /// correction frame, the reports and whether the trial failed.
    pub fn trial<S: OutcomeSource + ?Sized>(
        &self,
        kind: PauliKind,
        qubit_error: &PauliOperator,
        flips: &[BitVec; 2],
        src: &mut S,
    ) -> Result<(PauliOperator, Vec<crate::jump::SingleShotReport>, bool)> {
        let mut t = self.state(kind).clone();
        t.apply(qubit_error)?;
        let mut frame = PauliOperator::identity(self.code.n);
        let mut reports = Vec::new();
        for (basis, f) in BASES.into_iter().zip(flips.iter()) {
            let r = self.decoder.run(&mut t, basis, f, src)?;
            frame = frame_product(&frame, &r.correction);
            reports.push(r);
        }
        let failure = match self.target {
            SingleShotTarget::Inner => {
                let mut bad = false;
                for k in [PauliKind::X, PauliKind::Z] {
                    for s in self.code.stabilizers_of(k) {
                        bad |= t.expect(&s)? != Expectation::Plus;
                    }
                }
                bad
            }
            SingleShotTarget::Tetrahedral => {
                self.ideal.decode(&mut t)?;
                let op = self.code.logical_of(kind).expect("tetrahedral code has logicals");
                t.expect(op)? != Expectation::Plus
            }
        };
        Ok((frame, reports, failure))
    }

    /// Weight of an error modulo the gauge group, X and Z parts separately.
    pub fn reduced_weight(&self, op: &PauliOperator) -> Result<usize> {
        let g = &self.code.gauge_supports;
        Ok(CosetTable::min_coset_weight(op.x_bits(), g)? + CosetTable::min_coset_weight(op.z_bits(), g)?)
    }
}

/// Monte Carlo single-shot correction of the tetrahedral or inner code.
pub fn run_single_shot_trials(
    engine: &JumpEngine,
    target: SingleShotTarget,
    noise: &NoiseSpec,
    trials: u64,
    workers: usize,
    trace: bool,
) -> Result<RunResult<SingleShotTrace>> {
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial is required".into()));
    }
    let setup = SingleShotSetup::new(engine, target)?;
    let n = setup.code.n;
    let m = setup.num_gauge();
    let one = |t: u64| -> Result<(TrialSummary, Option<SingleShotTrace>)> {
        let mut rng = trial_rng(noise.seed, t);
        let kind = trial_state(t);
        let qubit_error = sample_qubit_error(noise.p_qubit, n, &mut rng);
        let flips = [
            sample_measurement_noise(noise.q_meas, m, &mut rng),
            sample_measurement_noise(noise.q_meas, m, &mut rng),
        ];
        let (frame, reports, failure) = setup.trial(kind, &qubit_error, &flips, &mut rng)?;
        let residual = frame_product(&qubit_error, &frame);
        let residual_weight = setup.reduced_weight(&residual)?;
        let delta0_size = reports.iter().map(|r| r.repair.count_ones()).sum();
        let max_component = support_components(&setup.code.colex, &residual.support()).into_iter().max().unwrap_or(0);
        let summary = TrialSummary {
            kind,
            failure,
            residual_weight,
            max_component,
            delta0_size,
            locality_ok: true,
        };
        let record = trace.then(|| SingleShotTrace {
            trial: t,
            seed: noise.seed,
            state: state_label(kind),
            qubit_error: qubit_error.to_string(),
            flips: [indices(&flips[0]), indices(&flips[1])],
            repairs: [indices(&reports[0].repair), indices(&reports[1].repair)],
            sigma: [indices(&reports[0].sigma), indices(&reports[1].sigma)],
            correction: frame.to_string(),
            residual: residual.to_string(),
            residual_weight,
            failure,
        });
        Ok((summary, record))
    };
    let results: Vec<Result<(TrialSummary, Option<SingleShotTrace>)>> =
        pool(workers)?.install(|| (0..trials).into_par_iter().map(one).collect());
    let mut stats = TrialStats::default();
    let mut traces = Vec::new();
    for r in results {
        let (s, t) = r?;
        stats.record(&s);
        traces.extend(t);
    }
    Ok(RunResult { stats, traces })
}

/// A single fault for exhaustive injection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum SingleFault {
    /// Pauli letter on a qubit of the 3D register that stays.
    OuterQubit { qubit: usize, pauli: char },
    /// Pauli letter on a qubit of the 3D register that is discarded.
    InnerQubit { qubit: usize, pauli: char },
    /// Flip of one measurement slot.
    Measurement { slot: usize },
}

impl fmt::Display for SingleFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SingleFault::OuterQubit { qubit, pauli } => write!(f, "outer {pauli}{qubit}"),
            SingleFault::InnerQubit { qubit, pauli } => write!(f, "inner {pauli}{qubit}"),
            SingleFault::Measurement { slot } => write!(f, "flip {slot}"),
        }
    }
}

/// Outcome of one fault on one logical state, over every measurement branch.
#[derive(Clone, Debug, Serialize)]
pub struct SingleFaultResult {
    pub fault: SingleFault,
    pub state: &'static str,
    pub branches: usize,
    /// Total probability of branches ending in a logical error.
    pub failure_probability: f64,
    /// Largest residual weight (modulo the 2D stabilizer) over branches.
    pub max_residual_weight: usize,
}

/// Every single outer-qubit Pauli, inner-qubit Pauli and measurement flip.
pub fn all_single_faults(engine: &JumpEngine) -> Vec<SingleFault> {
    let mut out = Vec::new();
    for &q in &engine.split.outer_vertices {
        for pauli in ['X', 'Y', 'Z'] {
            out.push(SingleFault::OuterQubit { qubit: q, pauli });
        }
    }
    for &q in &engine.split.inner_vertices {
        for pauli in ['X', 'Y', 'Z'] {
            out.push(SingleFault::InnerQubit { qubit: q, pauli });
        }
    }
    for slot in 0..engine.measurement_slots().len() {
        out.push(SingleFault::Measurement { slot });
    }
    out
}

/// Faults struct for a single fault.
pub fn faults_of(engine: &JumpEngine, fault: &SingleFault) -> Faults {
    let mut f = engine.no_faults();
    let n = engine.split.n3();
    match *fault {
        SingleFault::OuterQubit { qubit, pauli } | SingleFault::InnerQubit { qubit, pauli } => {
            let x = matches!(pauli, 'X' | 'Y');
            let z = matches!(pauli, 'Z' | 'Y');
            f.qubit_error = PauliOperator::from_parts(
                BitVec::from_indices(n, x.then_some(qubit)),
                BitVec::from_indices(n, z.then_some(qubit)),
                false,
            );
        }
        SingleFault::Measurement { slot } => f.flips.set(slot, true),
    }
    f
}

/// Injects every single fault into a collapse of `|0̄⟩` and `|+̄⟩` and follows
/// every measurement branch exactly.
pub fn exhaustive_single_faults(engine: &JumpEngine, workers: usize) -> Result<Vec<SingleFaultResult>> {
    let prep = Prepared::collapse(engine)?;
    let k_hat = measure_k_all(engine, 4)?.k_hat;
    let mut jobs = Vec::new();
    for fault in all_single_faults(engine) {
        for kind in [PauliKind::Z, PauliKind::X] {
            jobs.push((fault.clone(), kind));
        }
    }
    let run = |(fault, kind): &(SingleFault, PauliKind)| -> Result<SingleFaultResult> {
        let faults = faults_of(engine, fault);
        let branches = enumerate_branches(|src: &mut ScriptedOutcomes| {
            let (s, ..) = collapse_trial(engine, &prep, *kind, &faults, k_hat, src)?;
            Ok((s.failure, s.residual_weight))
        })?;
        Ok(SingleFaultResult {
            fault: fault.clone(),
            state: state_label(*kind),
            branches: branches.len(),
            failure_probability: branches.iter().filter(|b| b.1 .0).map(|b| b.0).sum(),
            max_residual_weight: branches.iter().map(|b| b.1 .1).max().unwrap_or(0),
        })
    };
    let results: Vec<Result<SingleFaultResult>> = pool(workers)?.install(|| jobs.par_iter().map(run).collect());
    results.into_iter().collect()
}

/// Writes rows as CSV with a header line.
pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Format(e.to_string()))?;
    for r in rows {
        w.serialize(r).map_err(|e| Error::Format(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a pretty JSON document followed by a newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Writes a header record and then one JSON record per line.
pub fn write_trace<H: Serialize, T: Serialize>(path: &Path, header: &H, records: &[T]) -> Result<()> {
    let fmt_err = |e: serde_json::Error| Error::Format(e.to_string());
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "{}", serde_json::to_string(header).map_err(fmt_err)?)?;
    for r in records {
        writeln!(f, "{}", serde_json::to_string(r).map_err(fmt_err)?)?;
    }
    f.flush()?;
    Ok(())
}
