//! Constant-depth swapping that keeps the next required qubit on top of a stack.
//!
//! Every stack position carries the step at which its qubit is next needed.
//! After the top qubit is used its label becomes its following use, and two
//! rounds of parallel compare-and-swap restore the order well enough for the
//! qubit of the next step to reach the top. Positions are 1-based throughout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StackState {
    /// Current step, starting at 1.
    pub step: u64,
    /// Next-use label of each position, top first.
    pub labels: Vec<u64>,
    /// Qubit at each position, top first.
    pub qubit_ids: Vec<usize>,
}

/// Swaps of one step, as 1-based position pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepSwaps {
    pub step: u64,
    /// Pairs `(2n+1, 2n+2)`.
    pub round1: Vec<(usize, usize)>,
    /// Pairs `(2n, 2n+1)`.
    pub round2: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwapSchedule {
    pub stack_size: usize,
    /// Qubit order (top first) before the first step.
    pub initial: Vec<usize>,
    pub steps: Vec<StepSwaps>,
}

impl SwapSchedule {
    pub fn total_steps(&self) -> usize {
        self.steps.len()
    }
}

/// Next use after step `s` (1-based) of the qubit used at `s`, or a
/// placeholder beyond the last step that is unique per qubit.
fn next_uses(sequence: &[usize]) -> Vec<u64> {
    let t = sequence.len() as u64;
    let mut next = vec![0; sequence.len()];
    let mut last_seen: std::collections::HashMap<usize, u64> = std::collections::HashMap::new();
    for i in (0..sequence.len()).rev() {
        let q = sequence[i];
        next[i] = last_seen.get(&q).copied().unwrap_or(t + 1 + q as u64);
        last_seen.insert(q, i as u64 + 1);
    }
    next
}

fn check_sequence(sequence: &[usize], stack_size: usize) -> Result<()> {
    if sequence.is_empty() {
        return Err(Error::Schedule("empty access sequence".into()));
    }
    if let Some(&q) = sequence.iter().find(|&&q| q >= stack_size) {
        return Err(Error::Schedule(format!(
            "qubit {q} does not fit in a stack of {stack_size} positions"
        )));
    }
    Ok(())
}

/// Orders qubits `0..stack_size` by first use, labeling each with its first
/// use step; qubits never used get distinct placeholders beyond the last step.
pub fn init_labels(sequence: &[usize], stack_size: usize) -> Result<StackState> {
    check_sequence(sequence, stack_size)?;
    let t = sequence.len() as u64;
    let mut label: Vec<u64> = (0..stack_size).map(|q| t + 1 + q as u64).collect();
    for (i, &q) in sequence.iter().enumerate().rev() {
        label[q] = i as u64 + 1;
    }
    let mut qubits: Vec<usize> = (0..stack_size).collect();
    qubits.sort_by_key(|&q| label[q]);
    Ok(StackState {
        step: 1,
        labels: qubits.iter().map(|&q| label[q]).collect(),
        qubit_ids: qubits,
    })
}

fn swap(state: &mut StackState, i: usize) {
    state.labels.swap(i, i + 1);
    state.qubit_ids.swap(i, i + 1);
}

/// Relabels the top with `next_use_of_top` and runs both swap rounds.
pub fn advance(state: &StackState, next_use_of_top: u64) -> Result<(StackState, StepSwaps)> {
    if next_use_of_top <= state.step {
        return Err(Error::Schedule(format!(
            "next use {next_use_of_top} of the top qubit is not after step {}",
            state.step
        )));
    }
    if state.labels.iter().skip(1).any(|&m| m == next_use_of_top) {
        return Err(Error::Schedule(format!("label {next_use_of_top} is already in use")));
    }
    let mut s = state.clone();
    s.labels[0] = next_use_of_top;
    let mut swaps = StepSwaps {
        step: state.step,
        ..Default::default()
    };
    let n = s.labels.len();
    for i in (0..n.saturating_sub(1)).step_by(2) {
        if s.labels[i] > s.labels[i + 1] {
            swap(&mut s, i);
            swaps.round1.push((i + 1, i + 2));
        }
    }
    for i in (1..n.saturating_sub(1)).step_by(2) {
        if s.labels[i] > s.labels[i + 1] {
            swap(&mut s, i);
            swaps.round2.push((i + 1, i + 2));
        }
    }
    s.step += 1;
    Ok((s, swaps))
}

/// Full swap schedule for `sequence` on a stack of `stack_size` qubits.
pub fn schedule(sequence: &[usize], stack_size: usize, internal_slots: usize) -> Result<SwapSchedule> {
    if internal_slots < 2 {
        return Err(Error::Schedule(format!("need at least 2 internal slots, got {internal_slots}")));
    }
    let mut state = init_labels(sequence, stack_size)?;
    let initial = state.qubit_ids.clone();
    let next = next_uses(sequence);
    let mut steps = Vec::with_capacity(sequence.len());
    for (i, &q) in sequence.iter().enumerate() {
        if state.qubit_ids[0] != q || state.labels[0] != state.step {
            return Err(Error::Schedule(format!(
                "step {}: qubit {} with label {} is on top, expected qubit {q}",
                state.step, state.qubit_ids[0], state.labels[0]
            )));
        }
        let (s, swaps) = advance(&state, next[i])?;
        state = s;
        steps.push(swaps);
    }
    Ok(SwapSchedule {
        stack_size,
        initial,
        steps,
    })
}

/// First broken condition found by [`verify`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub step: u64,
    pub message: String,
}

fn first_unsorted(labels: &[u64], start: usize) -> Option<usize> {
    // position p (0-based) with labels[p] not below every later label, for p = start, start+2, ...
    let n = labels.len();
    let mut suffix_min = vec![u64::MAX; n + 1];
    for i in (0..n).rev() {
        suffix_min[i] = suffix_min[i + 1].min(labels[i]);
    }
    (start..n).step_by(2).find(|&p| labels[p] >= suffix_min[p + 1])
}

fn apply_round(
    labels: &mut [u64],
    qubits: &mut [usize],
    pairs: &[(usize, usize)],
    odd_first: bool,
) -> std::result::Result<(), String> {
    let mut used = vec![false; labels.len() + 2];
    for &(a, b) in pairs {
        if b != a + 1 || a == 0 || b > labels.len() {
            return Err(format!("swap ({a}, {b}) is not a pair of adjacent positions"));
        }
        if (a % 2 == 1) != odd_first {
            return Err(format!("swap ({a}, {b}) does not belong to this round"));
        }
        if used[a] || used[b] {
            return Err(format!("swap ({a}, {b}) overlaps another swap of the round"));
        }
        used[a] = true;
        used[b] = true;
        labels.swap(a - 1, b - 1);
        qubits.swap(a - 1, b - 1);
    }
    Ok(())
}

/// Replays `schedule` on a fresh stack and checks every step: the required
/// qubit on top, `m₁ = s`, `m₁ ≤ mᵢ`, even positions below everything after
/// them before the rounds and after round 2, odd positions likewise after
/// round 1, and disjoint swaps within each round.
pub fn verify(schedule: &SwapSchedule, sequence: &[usize]) -> std::result::Result<(), Violation> {
    let fail = |step: u64, message: String| Err(Violation { step, message });
    if schedule.steps.len() != sequence.len() {
        return fail(0, format!("{} scheduled steps for {} accesses", schedule.steps.len(), sequence.len()));
    }
    let state = match init_labels(sequence, schedule.stack_size) {
        Ok(s) => s,
        Err(e) => return fail(0, e.to_string()),
    };
    if state.qubit_ids != schedule.initial {
        return fail(0, "initial stack order differs from first-use order".into());
    }
    let next = next_uses(sequence);
    let (mut labels, mut qubits) = (state.labels, state.qubit_ids);
    for (i, st) in schedule.steps.iter().enumerate() {
        let s = i as u64 + 1;
        if st.step != s {
            return fail(s, format!("record numbered {} at position {s}", st.step));
        }
        if qubits[0] != sequence[i] {
            return fail(s, format!("qubit {} on top, qubit {} required", qubits[0], sequence[i]));
        }
        if labels[0] != s {
            return fail(s, format!("top label {} differs from the step", labels[0]));
        }
        if labels.iter().any(|&m| m < labels[0]) {
            return fail(s, "top label is not the smallest".into());
        }
        if let Some(p) = first_unsorted(&labels, 1) {
            return fail(s, format!("before the rounds, position {} is not below all later labels", p + 1));
        }
        labels[0] = next[i];
        if let Err(m) = apply_round(&mut labels, &mut qubits, &st.round1, true) {
            return fail(s, format!("round 1: {m}"));
        }
        if let Some(p) = first_unsorted(&labels, 0) {
            return fail(s, format!("after round 1, position {} is not below all later labels", p + 1));
        }
        if let Err(m) = apply_round(&mut labels, &mut qubits, &st.round2, false) {
            return fail(s, format!("round 2: {m}"));
        }
        if labels.iter().any(|&m| m < labels[0]) {
            return fail(s, "after round 2 the top label is not the smallest".into());
        }
        if let Some(p) = first_unsorted(&labels, 1) {
            return fail(s, format!("after round 2, position {} is not below all later labels", p + 1));
        }
    }
    Ok(())
}

/// Parses whitespace or comma separated qubit ids; `#` starts a comment.
pub fn parse_sequence(text: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("");
        for tok in body.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            out.push(
                tok.parse()
                    .map_err(|_| Error::Format(format!("line {}: \"{tok}\" is not a qubit id", ln + 1)))?,
            );
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn worked_example() {
        let state = StackState {
            step: 1,
            labels: vec![1, 2, 3, 4],
            qubit_ids: vec![0, 1, 2, 3],
        };
        let (next, swaps) = advance(&state, 5).unwrap();
        assert_eq!(next.labels, vec![2, 3, 5, 4]);
        assert_eq!(next.step, 2);
        assert_eq!(swaps.round1, vec![(1, 2)]);
        assert_eq!(swaps.round2, vec![(2, 3)]);
    }

    #[test]
    fn init_orders_by_first_use() {
        let s = init_labels(&[0, 1, 2], 3).unwrap();
        assert_eq!(s.labels, vec![1, 2, 3]);
        let s = init_labels(&[0], 1).unwrap();
        assert_eq!(s.labels, vec![1]);
        let s = init_labels(&[1, 0], 2).unwrap();
        assert_eq!(s.qubit_ids[0], 1);
        assert!(init_labels(&[], 2).is_err());
        assert!(init_labels(&[3], 2).is_err());
    }

    #[test]
    fn advance_rejects_collisions() {
        let state = init_labels(&[0, 1, 2], 3).unwrap();
        assert!(advance(&state, 2).is_err());
        assert!(advance(&state, 1).is_err());
    }

    #[test]
    fn single_position_stack() {
        let seq = vec![0; 10];
        let sch = schedule(&seq, 1, 2).unwrap();
        assert!(sch.steps.iter().all(|s| s.round1.is_empty() && s.round2.is_empty()));
        verify(&sch, &seq).unwrap();
    }

    #[test]
    fn sinks_two_positions_per_step() {
        // once used, a qubit with the largest label falls two places per step
        let seq: Vec<usize> = (0..8).collect();
        let sch = schedule(&seq, 8, 2).unwrap();
        assert_eq!(sch.steps[0].round1, vec![(1, 2)]);
        assert_eq!(sch.steps[0].round2, vec![(2, 3)]);
    }

    #[test]
    fn round_robin_and_reverse_reuse() {
        let rr: Vec<usize> = (0..50).map(|i| i % 8).collect();
        verify(&schedule(&rr, 8, 2).unwrap(), &rr).unwrap();
        let mut adv = Vec::new();
        while adv.len() < 1000 {
            adv.extend((0..64).rev());
            adv.extend(0..64);
        }
        adv.truncate(1000);
        verify(&schedule(&adv, 64, 2).unwrap(), &adv).unwrap();
    }

    #[test]
    fn removed_swap_is_caught() {
        let seq: Vec<usize> = (0..30).map(|i| (i * 7) % 10).collect();
        let mut sch = schedule(&seq, 10, 2).unwrap();
        let k = sch.steps.iter().position(|s| !s.round1.is_empty()).unwrap();
        sch.steps[k].round1.pop();
        let v = verify(&sch, &seq).unwrap_err();
        assert!(v.step as usize > k, "{v:?}");
    }

    #[test]
    fn overlapping_swaps_are_rejected() {
        let seq = vec![0, 1, 2, 3];
        let mut sch = schedule(&seq, 4, 2).unwrap();
        sch.steps[0].round1 = vec![(1, 2), (2, 3)];
        assert!(verify(&sch, &seq).is_err());
    }

    #[test]
    fn too_few_internal_slots() {
        assert!(schedule(&[0], 1, 1).is_err());
    }

    #[test]
    fn parses_sequences() {
        assert_eq!(parse_sequence("0 1,2\n# note\n3 # tail\n").unwrap(), vec![0, 1, 2, 3]);
        assert!(parse_sequence("0 x").is_err());
    }

    proptest! {
        #[test]
        fn random_sequences_verify(stack in 1usize..40, raw in proptest::collection::vec(0usize..1000, 1..200)) {
            let seq: Vec<usize> = raw.into_iter().map(|q| q % stack).collect();
            let sch = schedule(&seq, stack, 2).unwrap();
            prop_assert_eq!(sch.steps.len(), seq.len());
            prop_assert!(verify(&sch, &seq).is_ok());
        }
    }
}
