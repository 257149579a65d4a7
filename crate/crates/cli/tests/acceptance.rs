//! Acceptance checks. Prints one `[PASS]` or `[FAIL]` line per criterion and
//! exits nonzero if any fails.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dimjump_core::code::{
    build_2d, build_3d, build_inner, joint_groups, region_law_violations, region_operator, shared_logicals, stab_r_identity,
    verify_redundancy,
};
use dimjump_core::colex::{self, boundary_structure, split_colex, ColorSet, DualEndpoint, RegionClass};
use dimjump_core::gf2::BitVec;
use dimjump_core::jump::{Faults, JumpEngine, BASES};
use dimjump_core::pauli::{logical_qubit_count, min_weight_logical, DistanceKind, PauliKind};
use dimjump_core::schedule::{self, advance, StackState};
use dimjump_core::sim::{self, NoiseSpec, SingleFault};
use dimjump_core::tableau::Expectation;

// Time budgets.
const BUDGET_1: Duration = Duration::from_secs(10);
const BUDGET_2: Duration = Duration::from_secs(1);
const BUDGET_3: Duration = Duration::from_secs(1);
const BUDGET_4: Duration = Duration::from_secs(30);
const BUDGET_5: Duration = Duration::from_secs(60);
const BUDGET_6: Duration = Duration::from_secs(300);
const BUDGET_7: Duration = Duration::from_secs(10);
const BUDGET_8: Duration = Duration::from_secs(300);
const BUDGET_9: Duration = Duration::from_secs(60);
const BUDGET_10: Duration = Duration::from_secs(60);

const FLUX_TRIALS: u64 = 10_000;
const REPAIR_TRIALS: u64 = 20_000;
const REPAIR_P: f64 = 0.05;
const ROUND_TRIPS: u64 = 100;
const MONOTONE_TRIALS: u64 = 100_000;
const P_LOW: f64 = 0.001;
const P_HIGH: f64 = 0.05;
const WILSON_Z: f64 = 3.0;
const K_CAP: usize = 4;
const SCHEDULE_SEQUENCES: usize = 10_000;
const MAX_SEQUENCE: usize = 1000;
const MAX_STACK: usize = 128;
const SEED: u64 = 20_241_016;

type Check = std::result::Result<String, String>;

fn engine() -> JumpEngine {
    JumpEngine::new(&colex::builtin("tetra15").unwrap(), ColorSet::RGB).unwrap()
}

fn workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn timed(budget: Duration, f: impl FnOnce() -> Check) -> Check {
    let t = Instant::now();
    let r = f();
    let el = t.elapsed();
    let note = |s: String| format!("{s}; {:.2}s of {}s", el.as_secs_f64(), budget.as_secs());
    match r {
        Ok(s) if el <= budget => Ok(note(s)),
        Ok(s) => Err(note(format!("{s}; over time budget"))),
        Err(s) => Err(note(s)),
    }
}

fn ensure(ok: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn c1() -> Check {
    let mut parts = Vec::new();
    for (name, want) in [("tri7", (7, 1, 3)), ("tetra15", (15, 1, 3))] {
        let c = colex::builtin(name).map_err(e)?;
        let t = Instant::now();
        let code = if c.dimension == 2 { build_2d(&c) } else { build_3d(&c) }.map_err(e)?;
        let k = logical_qubit_count(&code.s, &code.g).map_err(e)?;
        let d = min_weight_logical(&code.s, &code.g, &code.l, DistanceKind::Dressed).map_err(e)?;
        let got = (code.n, k, d.unwrap_or(0));
        ensure(got == want, format!("{name}: got n,k,d = {got:?}, want {want:?}"))?;
        ensure(t.elapsed() <= BUDGET_1, format!("{name}: distance took {:?}", t.elapsed()))?;
        parts.push(format!("{name} n={} k={} d={}", got.0, got.1, got.2));
    }
    Ok(parts.join(", "))
}

fn c2() -> Check {
    let c = colex::builtin("tetra15").map_err(e)?;
    let code3 = build_3d(&c).map_err(e)?;
    let split = split_colex(&c, ColorSet::RGB).map_err(e)?;
    let code2 = build_2d(&split.outer).map_err(e)?;
    let inner = build_inner(&split).map_err(e)?;
    let (s, g) = joint_groups(&code2, &inner, &split).map_err(e)?;
    ensure(code3.s.is_subgroup_of(&s).map_err(e)?, "S3 not inside S2*Sin")?;
    ensure(g.is_subgroup_of(&code3.g).map_err(e)?, "G2*Gin not inside G3")?;
    let k_in = inner.logical_qubits().map_err(e)?;
    ensure(k_in == 0, format!("inner k = {k_in}"))?;
    let l = shared_logicals(&code3, &code2, &split).map_err(e)?;
    for op in l.on2.generators() {
        ensure(op.weight() == 7, format!("shared logical {op} has weight {}", op.weight()))?;
    }
    Ok("S3 <= S2*Sin, G2*Gin <= G3, inner k=0, shared L on 7 outer qubits".into())
}

fn c3() -> Check {
    let c = colex::builtin("tetra15").map_err(e)?;
    let code3 = build_3d(&c).map_err(e)?;
    let split = split_colex(&c, ColorSet::RGB).map_err(e)?;
    let inner = build_inner(&split).map_err(e)?;
    let mut identities = 0;
    for code in [&code3, &inner] {
        let bs = boundary_structure(&code.colex).map_err(e)?;
        let v = region_law_violations(code, &bs).map_err(e)?;
        ensure(v.is_empty(), format!("{}: {}", code.colex.name, v.join("; ")))?;
        let one_corner_color = bs.corners.iter().map(|c| c.color).collect::<std::collections::BTreeSet<_>>().len() == 1;
        for kind in [PauliKind::X, PauliKind::Z] {
            for (r, region) in bs.regions.iter().enumerate() {
                if region.class == RegionClass::Frozen {
                    ensure(stab_r_identity(code, &bs, r, kind).map_err(e)?, format!("{}: stabR fails on region {r}", code.colex.name))?;
                    let op = region_operator(code, &bs, r, kind).map_err(e)?;
                    ensure(code.s.contains_up_to_sign(&op).map_err(e)?, format!("{}: region {r} operator not a stabilizer", code.colex.name))?;
                    identities += 1;
                }
            }
            if one_corner_color {
                ensure(
                    verify_redundancy(code, &bs, kind, None).map_err(e)?,
                    format!("{}: redundancy identity fails", code.colex.name),
                )?;
                identities += 1;
            }
        }
    }
    ensure(identities > 0, "no frozen region or single-color corner set found")?;
    Ok(format!("region laws hold on both colexes, {identities} identities checked"))
}

fn c4() -> Check {
    let eng = engine();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut checked = 0u64;
    for t in 0..FLUX_TRIALS {
        let kind = sim::trial_state(t);
        let mut state = eng.encoded3(kind).map_err(e)?;
        for basis in BASES {
            for pi in 0..eng.pairs.len() {
                let flux = eng.extract_flux(&mut state, basis, pi, &mut rng).map_err(e)?;
                let (inner, outer) = eng.endpoints(pi, &flux.edges);
                ensure(inner.is_empty(), format!("trial {t}: {basis} {} flux has inner endpoints {inner:?}", eng.pairs[pi].pair))?;
                // every inner cell touches an even number of flux edges
                let mut degree = vec![0usize; eng.split.inner_cells.len()];
                for i in flux.edges.iter_ones() {
                    let d = &eng.pairs[pi].duals[i];
                    for end in [d.a, d.b] {
                        if let DualEndpoint::InnerCell(c) = end {
                            degree[c] += 1;
                        }
                    }
                }
                ensure(degree.iter().all(|d| d % 2 == 0), format!("trial {t}: flux not closed at inner cells"))?;
                for ic in &eng.split.interface {
                    let p2 = eng.outer_plaquette(ic.outer_plaquette);
                    if eng.code2.colex.plaquettes[p2].colors != eng.pairs[pi].outer_pair {
                        continue;
                    }
                    let op = dimjump_core::pauli::PauliOperator::of_kind(basis, eng.code2.gauge_supports[p2].clone())
                        .embed(eng.split.n3(), &eng.split.outer_vertices);
                    let want = if outer.contains(&p2) { Expectation::Minus } else { Expectation::Plus };
                    let got = state.expect(&op).map_err(e)?;
                    ensure(got == want, format!("trial {t}: outer plaquette {p2} reads {got:?}, endpoint rule says {want:?}"))?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{FLUX_TRIALS} trials, {checked} outer plaquette parities"))
}

fn c5(results: &[sim::SingleFaultResult]) -> Check {
    let failing: Vec<String> = results
        .iter()
        .filter(|r| r.failure_probability > 0.0)
        .map(|r| format!("{} on |{}>", r.fault, r.state))
        .collect();
    let msg = format!("{} fault/state cases, {} with logical failures", results.len(), failing.len());
    if failing.is_empty() {
        Ok(msg)
    } else {
        Err(format!("{msg}: {}", failing.join(", ")))
    }
}

/// Minimum number of dual edges to toggle so the observed flux has no inner endpoint.
fn oracle_repair(eng: &JumpEngine, pi: usize, observed: &BitVec) -> usize {
    let m = observed.len();
    (0u32..1 << m)
        .filter_map(|mask| {
            let mut g = observed.clone();
            for i in 0..m {
                if mask >> i & 1 == 1 {
                    g.flip(i);
                }
            }
            eng.endpoints(pi, &g).0.is_empty().then_some(mask.count_ones() as usize)
        })
        .min()
        .expect("the observed flux itself can always be repaired")
}

/// Connected components of the edges in `set`, two edges touching when they share a non-boundary endpoint.
fn components(eng: &JumpEngine, pi: usize, set: &BitVec) -> Vec<Vec<usize>> {
    let duals = &eng.pairs[pi].duals;
    let edges: Vec<usize> = set.iter_ones().collect();
    let touch = |a: usize, b: usize| {
        let ends = |i: usize| [duals[i].a, duals[i].b];
        ends(a).iter().any(|x| *x != DualEndpoint::Facet && ends(b).contains(x))
    };
    let mut comp: Vec<usize> = (0..edges.len()).collect();
    fn root(c: &mut [usize], i: usize) -> usize {
        if c[i] == i {
            i
        } else {
            let r = root(c, c[i]);
            c[i] = r;
            r
        }
    }
    for i in 0..edges.len() {
        for j in 0..i {
            if touch(edges[i], edges[j]) {
                let (a, b) = (root(&mut comp, i), root(&mut comp, j));
                comp[a] = b;
            }
        }
    }
    let mut out: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..edges.len() {
        let r = root(&mut comp, i);
        out.entry(r).or_default().push(edges[i]);
    }
    out.into_values().collect()
}

fn c6() -> Check {
    let eng = engine();
    let slots = eng.measurement_slots();
    let n3 = eng.split.n3();
    let mut records = 0u64;
    for t in 0..REPAIR_TRIALS {
        let mut rng = sim::trial_rng(SEED, t);
        let kind = sim::trial_state(t);
        let s3 = eng.encoded3(kind).map_err(e)?;
        let faults = Faults {
            qubit_error: sim::sample_qubit_error(REPAIR_P, n3, &mut rng),
            flips: sim::sample_measurement_noise(REPAIR_P, slots.len(), &mut rng),
        };
        let out = eng.collapse_with_faults(&s3, &faults, &mut rng).map_err(e)?;
        let effective = faults.flips.xor(&eng.induced_flips(&faults.qubit_error));
        let mut offset = 0;
        for rec in &out.records {
            let pi = eng.pair_index(rec.pair).map_err(e)?;
            let m = rec.observed.len();
            let want = oracle_repair(&eng, pi, &rec.observed);
            let got = rec.delta0.count_ones();
            ensure(got == want, format!("trial {t} {} {}: |delta0| = {got}, oracle {want}", rec.basis, rec.pair))?;
            let delta = BitVec::from_indices(m, (0..m).filter(|&i| effective.get(offset + i)));
            let omega = delta.xor(&rec.delta0);
            for comp in components(&eng, pi, &omega) {
                let in_delta = comp.iter().filter(|&&i| delta.get(i)).count();
                let in_delta0 = comp.iter().filter(|&&i| rec.delta0.get(i)).count();
                ensure(
                    in_delta >= in_delta0,
                    format!("trial {t} {} {}: component {comp:?} has |delta0+omega| = {in_delta} < |delta0| = {in_delta0}", rec.basis, rec.pair),
                )?;
            }
            offset += m;
            records += 1;
        }
        ensure(offset == slots.len(), "records do not cover every measurement slot")?;
    }
    Ok(format!("{REPAIR_TRIALS} trials at p=q={REPAIR_P}, {records} repairs match the subset oracle"))
}

fn c7() -> Check {
    let eng = engine();
    let dec = eng.inner_decoder().map_err(e)?;
    let zero = [BitVec::zeros(dec.num_gauge()), BitVec::zeros(dec.num_gauge())];
    let mut failures = 0;
    for t in 0..ROUND_TRIPS {
        let kind = sim::trial_state(t);
        let mut rng = sim::trial_rng(SEED, t);
        let reference = eng.reference(&eng.encoded3(kind).map_err(e)?).map_err(e)?;
        let s2 = eng.encoded2(kind).map_err(e)?;
        let up = eng.blow_up(&s2, &dec, &zero, &mut rng).map_err(e)?;
        let down = eng.collapse_clean(&up.state, &mut rng).map_err(e)?;
        if eng.logical_flips(&down.state, &reference).map_err(e)?.iter().any(|f| f.1) {
            failures += 1;
        }
    }
    ensure(failures == 0, format!("{failures}/{ROUND_TRIPS} round trips changed the logical state"))?;
    Ok(format!("{ROUND_TRIPS} round trips over |0> and |+>, zero failures"))
}

fn c8() -> Check {
    let eng = engine();
    let run = |p: f64| -> std::result::Result<sim::TrialStats, String> {
        let noise = NoiseSpec::new(p, p, SEED).map_err(e)?;
        Ok(sim::run_collapse_trials(&eng, &noise, MONOTONE_TRIALS, workers(), false).map_err(e)?.stats)
    };
    let lo = run(P_LOW)?;
    let hi = run(P_HIGH)?;
    let (lo_a, lo_b) = lo.wilson(WILSON_Z);
    let (hi_a, hi_b) = hi.wilson(WILSON_Z);
    let msg = format!(
        "rate {:.5} [{lo_a:.5}, {lo_b:.5}] at p=q={P_LOW} vs {:.5} [{hi_a:.5}, {hi_b:.5}] at p=q={P_HIGH}, {MONOTONE_TRIALS} trials each",
        lo.failure_rate(),
        hi.failure_rate()
    );
    ensure(lo.failure_rate() <= hi.failure_rate() && lo_b < hi_a, msg.clone())?;
    Ok(msg)
}

fn c9(results: &[sim::SingleFaultResult]) -> Check {
    let eng = engine();
    let a = sim::measure_k_all(&eng, K_CAP).map_err(e)?;
    let b = sim::measure_k_all(&eng, K_CAP).map_err(e)?;
    ensure(a == b, format!("measure_K differs between runs: {a:?} vs {b:?}"))?;
    let k = a.k_hat;
    let mut worst = 0;
    let mut over = Vec::new();
    for r in results {
        if let SingleFault::Measurement { .. } = r.fault {
            worst = worst.max(r.max_residual_weight);
            if r.max_residual_weight as f64 > k {
                over.push(format!("{} on |{}> weight {}", r.fault, r.state, r.max_residual_weight));
            }
        }
    }
    let msg = format!("K_hat = {k} (stable), largest single-flip residual weight {worst}");
    if over.is_empty() {
        Ok(msg)
    } else {
        Err(format!("{msg}; exceeding K_hat: {}", over.join(", ")))
    }
}

fn c10() -> Check {
    let state = StackState {
        step: 1,
        labels: vec![1, 2, 3, 4],
        qubit_ids: vec![0, 1, 2, 3],
    };
    let (next, _) = advance(&state, 5).map_err(e)?;
    ensure(next.labels == [2, 3, 5, 4], format!("worked trace gives {:?}", next.labels))?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut steps = 0;
    for i in 0..SCHEDULE_SEQUENCES {
        let stack = rng.gen_range(1..=MAX_STACK);
        let len = rng.gen_range(1..=MAX_SEQUENCE);
        let seq: Vec<usize> = (0..len).map(|_| rng.gen_range(0..stack)).collect();
        let sch = schedule::schedule(&seq, stack, 2).map_err(e)?;
        ensure(sch.steps.len() == len, format!("sequence {i}: {} steps for {len} accesses", sch.steps.len()))?;
        schedule::verify(&sch, &seq).map_err(|v| format!("sequence {i}: step {}: {}", v.step, v.message))?;
        steps += len;
    }
    Ok(format!("worked trace reproduced, {SCHEDULE_SEQUENCES} random sequences ({steps} steps) verify"))
}

fn run_bin(args: &[&str], out: &Path) -> std::result::Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_dimjump"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .stdout(std::process::Stdio::null())
        .status()
        .map_err(e)?;
    ensure(status.success(), format!("dimjump {} exited with {status}", args.join(" ")))
}

fn c11() -> Check {
    let runs: [&[&str]; 5] = [
        &["simulate", "collapse", "--builtin", "tetra15", "--p", "0.02", "--q", "0.02", "--trials", "3000", "--seed", "5", "--trace", "--workers", "3"],
        &["simulate", "collapse", "--builtin", "tetra15", "--exhaustive", "--workers", "2"],
        &["simulate", "singleshot", "--builtin", "tetra15", "--target", "tetra", "--p", "0.02", "--q", "0.02", "--trials", "1000", "--seed", "9", "--trace"],
        &["simulate", "singleshot", "--builtin", "tetra15", "--target", "inner", "--p", "0.02", "--q", "0.02", "--trials", "1000", "--seed", "9", "--trace"],
        &["simulate", "measure-k", "--builtin", "tetra15", "--cap", "4"],
    ];
    let a = tempfile::tempdir().map_err(e)?;
    let b = tempfile::tempdir().map_err(e)?;
    for args in runs {
        run_bin(args, a.path())?;
        run_bin(args, b.path())?;
    }
    let mut files = 0;
    for entry in std::fs::read_dir(a.path()).map_err(e)? {
        let name = entry.map_err(e)?.file_name();
        let x = std::fs::read(a.path().join(&name)).map_err(e)?;
        let y = std::fs::read(b.path().join(&name)).map_err(|err| format!("{name:?} missing in rerun: {err}"))?;
        ensure(x == y, format!("{name:?} differs between reruns"))?;
        files += 1;
    }
    ensure(files >= 10, format!("only {files} output files written"))?;
    Ok(format!("{files} CSV/JSON/trace files byte-identical across reruns"))
}

fn main() -> ExitCode {
    let faults = std::cell::OnceCell::new();
    let exhaustive = || -> std::result::Result<&Vec<sim::SingleFaultResult>, String> {
        faults
            .get_or_init(|| sim::exhaustive_single_faults(&engine(), workers()).map_err(e))
            .as_ref()
            .map_err(|s| s.clone())
    };
    let checks: Vec<(usize, Box<dyn Fn() -> Check + '_>)> = vec![
        (1, Box::new(|| timed(BUDGET_1 * 2, c1))),
        (2, Box::new(|| timed(BUDGET_2, c2))),
        (3, Box::new(|| timed(BUDGET_3, c3))),
        (4, Box::new(|| timed(BUDGET_4, c4))),
        (5, Box::new(|| timed(BUDGET_5, || c5(exhaustive()?)))),
        (6, Box::new(|| timed(BUDGET_6, c6))),
        (7, Box::new(|| timed(BUDGET_7, c7))),
        (8, Box::new(|| timed(BUDGET_8, c8))),
        (9, Box::new(|| timed(BUDGET_9, || c9(exhaustive()?)))),
        (10, Box::new(|| timed(BUDGET_10, c10))),
        (11, Box::new(c11)),
    ];
    let mut failed = 0;
    for (n, check) in checks {
        match check() {
            Ok(msg) => println!("[PASS] criterion {n}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("[FAIL] criterion {n}: {msg}");
            }
        }
    }
    println!("{} of 11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
