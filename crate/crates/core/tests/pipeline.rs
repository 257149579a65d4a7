use dimjump_core::code::{build_2d, build_3d};
use dimjump_core::colex::{self, ColorSet};
use dimjump_core::jump::JumpEngine;
use dimjump_core::pauli::PauliKind;
use dimjump_core::schedule;
use dimjump_core::sim::{self, NoiseSpec};

#[test]
fn saved_colex_reloads_with_same_hash_and_code() {
    let dir = tempfile::tempdir().unwrap();
    for name in colex::BUILTINS {
        let c = colex::builtin(name).unwrap();
        let path = dir.path().join(format!("{name}.json"));
        colex::save(&c, &path).unwrap();
        let back = colex::load(&path).unwrap();
        assert_eq!(colex::hash(&c), colex::hash(&back), "{name}");
        let (a, b) = if c.dimension == 2 {
            (build_2d(&c).unwrap(), build_2d(&back).unwrap())
        } else {
            (build_3d(&c).unwrap(), build_3d(&back).unwrap())
        };
        assert_eq!(a.stabilizer_supports, b.stabilizer_supports);
    }
}

#[test]
fn every_facet_collapses_noiselessly() {
    let c = colex::builtin("tetra15").unwrap();
    for facet in ["rgb", "rgy", "rby", "gby"] {
        let e = JumpEngine::new(&c, ColorSet::parse(facet).unwrap()).unwrap();
        let stats = sim::run_collapse_trials(&e, &NoiseSpec::noiseless(3), 40, 2, false).unwrap().stats;
        assert_eq!(stats.failures(), 0, "facet {facet}");
    }
}

#[test]
fn blow_up_then_collapse_keeps_both_logical_states() {
    let e = JumpEngine::new(&colex::builtin("tetra15").unwrap(), ColorSet::RGB).unwrap();
    let dec = e.inner_decoder().unwrap();
    let zero = [
        dimjump_core::gf2::BitVec::zeros(dec.num_gauge()),
        dimjump_core::gf2::BitVec::zeros(dec.num_gauge()),
    ];
    for t in 0..20 {
        let kind = if t % 2 == 0 { PauliKind::Z } else { PauliKind::X };
        let mut rng = sim::trial_rng(8, t);
        let reference = e.reference(&e.encoded3(kind).unwrap()).unwrap();
        let up = e.blow_up(&e.encoded2(kind).unwrap(), &dec, &zero, &mut rng).unwrap();
        assert!(e.violated_stabilizers3(&up.state).unwrap().is_empty());
        let down = e.collapse_clean(&up.state, &mut rng).unwrap();
        assert!(e.logical_flips(&down.state, &reference).unwrap().iter().all(|f| !f.1));
    }
}

#[test]
fn noisy_runs_are_reproducible_and_written_identically() {
    let e = JumpEngine::new(&colex::builtin("tetra15").unwrap(), ColorSet::RGB).unwrap();
    let noise = NoiseSpec::new(0.03, 0.03, 77).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for (i, workers) in [1, 4].into_iter().enumerate() {
        let r = sim::run_collapse_trials(&e, &noise, 300, workers, true).unwrap();
        let path = dir.path().join(format!("t{i}.jsonl"));
        sim::write_trace(&path, &"header", &r.traces).unwrap();
        texts.push(std::fs::read_to_string(&path).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
    assert_eq!(texts[0].lines().count(), 301);
}

#[test]
fn schedule_parsed_from_text_verifies() {
    let seq = schedule::parse_sequence("# accesses\n3 1 4 1 5\n0,2 3\n").unwrap();
    assert_eq!(seq, vec![3, 1, 4, 1, 5, 0, 2, 3]);
    let sch = schedule::schedule(&seq, 6, 2).unwrap();
    assert_eq!(sch.total_steps(), seq.len());
    schedule::verify(&sch, &seq).unwrap();
}
