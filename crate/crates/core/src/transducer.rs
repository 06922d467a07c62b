//! Complete deterministic transducers reading base-q digits least significant
//! first, and their output sums.

use std::collections::VecDeque;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::digits::{raw_digits, Block};
use crate::linrep::{rat, unit_vector, JsonRational, LinearRepresentation, Matrix};
use crate::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransducerError {
    #[error("malformed transducer: {0}")]
    Malformed(String),
    #[error("invalid transducer file: {0}")]
    Format(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub next: usize,
    pub output: Rational,
}

/// Exactly one transition per (state, input digit), plus a final output per
/// state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transducer {
    base: u32,
    initial: usize,
    transitions: Vec<Vec<Transition>>,
    final_outputs: Vec<Rational>,
}

/// Outcome of the reset-sequence test for the input word `0^r`.
#[derive(Debug, Clone, Serialize)]
pub struct ResetReport {
    pub r: u32,
    /// All states reach one common state under `0^r`.
    pub has_reset: bool,
    pub reset_target: Option<usize>,
    /// Output sum along `0^r` from each state.
    #[serde(serialize_with = "ser_rationals")]
    pub reset_output_sums: Vec<Rational>,
    /// `0^r` leads every state to the initial state.
    pub leads_to_initial: bool,
    /// The output sum along `0^r` equals the final output, for every state.
    pub reset_output_is_final: bool,
    /// Appending zeros never changes the output sum.
    pub trailing_zeros_neutral: bool,
    /// Every state is reachable from the initial state.
    pub connected: bool,
}

fn ser_rationals<S: serde::Serializer>(xs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|x| x.to_string()))
}

impl ResetReport {
    /// All three conditions hold on a connected transducer, which makes the
    /// output sum quasiadditive with parameter `r`.
    pub fn passes(&self) -> bool {
        self.connected && self.leads_to_initial && self.reset_output_is_final && self.trailing_zeros_neutral
    }
}

impl Transducer {
    pub fn new(
        base: u32,
        initial: usize,
        transitions: Vec<Vec<Transition>>,
        final_outputs: Vec<Rational>,
    ) -> Result<Self, TransducerError> {
        let bad = |msg: String| Err(TransducerError::Malformed(msg));
        if base < 2 {
            return bad(format!("base must be at least 2, got {base}"));
        }
        let m = transitions.len();
        if m == 0 {
            return bad("no states".into());
        }
        if initial >= m {
            return bad(format!("initial state {initial} out of range"));
        }
        if final_outputs.len() != m {
            return bad(format!("{} final outputs for {m} states", final_outputs.len()));
        }
        for (s, row) in transitions.iter().enumerate() {
            if row.len() != base as usize {
                return bad(format!("state {s} has {} transitions, expected {base}", row.len()));
            }
            if let Some(t) = row.iter().find(|t| t.next >= m) {
                return bad(format!("state {s} has a transition to missing state {}", t.next));
            }
        }
        Ok(Transducer {
            base,
            initial,
            transitions,
            final_outputs,
        })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn states(&self) -> usize {
        self.transitions.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn transition(&self, state: usize, digit: u32) -> &Transition {
        &self.transitions[state][digit as usize]
    }

    pub fn final_outputs(&self) -> &[Rational] {
        &self.final_outputs
    }

    /// Reads `digits` (least significant first) from `state`; returns the end
    /// state and the sum of transition outputs.
    pub fn run_from(&self, state: usize, digits: &[u32]) -> (usize, Rational) {
        let mut s = state;
        let mut sum = Rational::zero();
        for &d in digits {
            let t = self.transition(s, d);
            sum += &t.output;
            s = t.next;
        }
        (s, sum)
    }

    /// Outputs along the path of `n`'s expansion from the initial state plus
    /// the final output of the last state.
    pub fn output_sum(&self, n: &BigUint) -> Rational {
        let (end, sum) = self.run_from(self.initial, &raw_digits(n, self.base));
        sum + &self.final_outputs[end]
    }

    /// Output sums from every starting state, via
    /// `b(qn + ε) = N_ε b(n) + δ_ε` with `b(0)` the final outputs.
    pub fn output_vector(&self, n: &BigUint) -> Vec<Rational> {
        raw_digits(n, self.base)
            .iter()
            .rev()
            .fold(self.final_outputs.clone(), |b, &d| {
                (0..self.states())
                    .map(|s| {
                        let t = self.transition(s, d);
                        &b[t.next] + &t.output
                    })
                    .collect()
            })
    }

    /// `N_ε`: the 0/1 adjacency matrix of transitions reading `ε`.
    pub fn adjacency(&self, digit: u32) -> Matrix {
        let m = self.states();
        let mut n = Matrix::zeros(m, m);
        for s in 0..m {
            n[(s, self.transition(s, digit).next)] = Rational::one();
        }
        n
    }

    /// `δ_ε`: outputs of the transitions reading `ε`, indexed by source state.
    pub fn outputs(&self, digit: u32) -> Vec<Rational> {
        (0..self.states())
            .map(|s| self.transition(s, digit).output.clone())
            .collect()
    }

    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.states()];
        seen[self.initial] = true;
        let mut queue = VecDeque::from([self.initial]);
        while let Some(s) = queue.pop_front() {
            for t in &self.transitions[s] {
                if !seen[t.next] {
                    seen[t.next] = true;
                    queue.push_back(t.next);
                }
            }
        }
        seen
    }

    pub fn is_connected(&self) -> bool {
        self.reachable().into_iter().all(|x| x)
    }

    /// Evaluates the three reset-sequence conditions for `0^r`. The third one
    /// is checked state by state as
    /// `final(s) = output(s, 0) + final(next(s, 0))`, which implies the
    /// statement about arbitrarily many appended zeros by induction.
    pub fn check_reset(&self, r: u32) -> ResetReport {
        let zeros = vec![0u32; r as usize];
        let runs: Vec<(usize, Rational)> = (0..self.states()).map(|s| self.run_from(s, &zeros)).collect();
        let first = runs[0].0;
        let has_reset = runs.iter().all(|(end, _)| *end == first);
        let reset_output_is_final = runs
            .iter()
            .zip(&self.final_outputs)
            .all(|((_, sum), fin)| sum == fin);
        let trailing_zeros_neutral = (0..self.states()).all(|s| {
            let t = self.transition(s, 0);
            self.final_outputs[s] == &t.output + &self.final_outputs[t.next]
        });
        ResetReport {
            r,
            has_reset,
            reset_target: has_reset.then_some(first),
            leads_to_initial: has_reset && first == self.initial,
            reset_output_sums: runs.into_iter().map(|(_, sum)| sum).collect(),
            reset_output_is_final,
            trailing_zeros_neutral,
            connected: self.is_connected(),
        }
    }

    /// Least `r ≤ r_max` passing [`check_reset`](Self::check_reset).
    pub fn min_reset_parameter(&self, r_max: u32) -> Option<u32> {
        (0..=r_max).find(|&r| self.check_reset(r).passes())
    }

    /// The `(2m+1)`-dimensional representation
    /// `M_ε = [[N_ε, δ_ε, [ε=0]I], [0, 1, 0], [0, 0, [ε=0]I]]`,
    /// `u = e_1`, `v = (b(0), 1, b(0) - N_0 b(0) - δ_0)` with the initial
    /// state moved to the first coordinate.
    pub fn to_linear_representation(&self) -> LinearRepresentation {
        let m = self.states();
        // order: initial state first, the others in their original order
        let order: Vec<usize> = std::iter::once(self.initial)
            .chain((0..m).filter(|&s| s != self.initial))
            .collect();
        let mut position = vec![0; m];
        for (i, &s) in order.iter().enumerate() {
            position[s] = i;
        }
        let d = 2 * m + 1;
        let b0: Vec<Rational> = order.iter().map(|&s| self.final_outputs[s].clone()).collect();
        let matrices = (0..self.base)
            .map(|eps| {
                let mut mat = Matrix::zeros(d, d);
                for (i, &s) in order.iter().enumerate() {
                    let t = self.transition(s, eps);
                    mat[(i, position[t.next])] = Rational::one();
                    mat[(i, m)] = t.output.clone();
                    if eps == 0 {
                        mat[(i, m + 1 + i)] = Rational::one();
                        mat[(m + 1 + i, m + 1 + i)] = Rational::one();
                    }
                }
                mat[(m, m)] = Rational::one();
                mat
            })
            .collect();
        let mut v = b0.clone();
        v.push(Rational::one());
        for (i, &s) in order.iter().enumerate() {
            let t = self.transition(s, 0);
            v.push(&b0[i] - &b0[position[t.next]] - &t.output);
        }
        LinearRepresentation::new(self.base, unit_vector(d, 0), matrices, v)
            .expect("dimensions are consistent by construction")
    }

    /// The three-state transducer whose output sum is the Hamming weight of
    /// the nonadjacent form.
    pub fn naf_weight() -> Transducer {
        let t = |next, out| Transition {
            next,
            output: rat(out),
        };
        Transducer::new(
            2,
            0,
            vec![
                vec![t(0, 0), t(1, 1)],
                vec![t(0, 0), t(2, 0)],
                vec![t(1, 1), t(2, 0)],
            ],
            vec![rat(0), rat(0), rat(1)],
        )
        .unwrap()
    }

    /// Output sum = base-q sum of digits.
    pub fn digit_sum(base: u32) -> Transducer {
        Transducer::new(
            base,
            0,
            vec![(0..base as i64).map(|d| Transition { next: 0, output: rat(d) }).collect()],
            vec![rat(0)],
        )
        .unwrap()
    }

    /// Output sum = total number of occurrences of the given blocks in the
    /// zero-padded expansion. The state is the window of the last `w` digits
    /// read, `w = max ℓ(B) - 1`; an occurrence is counted when its most
    /// significant digit is read, and the final output accounts for
    /// occurrences reaching into the left padding.
    pub fn block_counter(blocks: &[Block]) -> Result<Transducer, TransducerError> {
        let Some(first) = blocks.first() else {
            return Err(TransducerError::Malformed("no blocks".into()));
        };
        let q = first.base();
        if blocks.iter().any(|b| b.base() != q) {
            return Err(TransducerError::Malformed("blocks use different bases".into()));
        }
        let w = blocks.iter().map(Block::len).max().unwrap() - 1;
        let states = (q as usize)
            .checked_pow(w as u32)
            .filter(|&s| s <= 1 << 20)
            .ok_or_else(|| TransducerError::Malformed("block too long".into()))?;
        let window = |state: usize| -> Vec<u32> {
            let mut s = state;
            (0..w)
                .map(|_| {
                    let d = (s % q as usize) as u32;
                    s /= q as usize;
                    d
                })
                .collect()
        };
        let step = |state: usize, digit: u32| -> (usize, i64) {
            let mut recent = vec![digit];
            recent.extend(window(state));
            let hits = blocks
                .iter()
                .filter(|b| recent[..b.len()] == *b.digits_msb_first())
                .count() as i64;
            let next = if w == 0 {
                0
            } else {
                (digit as usize + q as usize * state) % states
            };
            (next, hits)
        };
        let transitions = (0..states)
            .map(|s| {
                (0..q)
                    .map(|d| {
                        let (next, hits) = step(s, d);
                        Transition { next, output: rat(hits) }
                    })
                    .collect()
            })
            .collect();
        let final_outputs = (0..states)
            .map(|s| {
                let mut state = s;
                let mut total = 0;
                for _ in 0..w {
                    let (next, hits) = step(state, 0);
                    total += hits;
                    state = next;
                }
                rat(total)
            })
            .collect();
        Transducer::new(q, 0, transitions, final_outputs)
    }

    pub fn to_file(&self) -> TransducerFile {
        TransducerFile {
            q: self.base,
            states: self.states(),
            initial: self.initial,
            transitions: self
                .transitions
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|t| TransitionEntry {
                            next: t.next,
                            output: JsonRational(t.output.clone()),
                        })
                        .collect()
                })
                .collect(),
            final_outputs: self.final_outputs.iter().cloned().map(JsonRational).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self, TransducerError> {
        let file: TransducerFile =
            serde_json::from_str(s).map_err(|e| TransducerError::Format(e.to_string()))?;
        Transducer::try_from(file)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionEntry {
    pub next: usize,
    pub output: JsonRational,
}

/// On-disk form: `q`, `states`, `initial`, `transitions[state][digit]` and
/// `final_outputs`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransducerFile {
    pub q: u32,
    pub states: usize,
    pub initial: usize,
    pub transitions: Vec<Vec<TransitionEntry>>,
    pub final_outputs: Vec<JsonRational>,
}

impl TryFrom<TransducerFile> for Transducer {
    type Error = TransducerError;

    fn try_from(file: TransducerFile) -> Result<Self, TransducerError> {
        if file.transitions.len() != file.states {
            return Err(TransducerError::Malformed(format!(
                "states = {} but {} transition rows",
                file.states,
                file.transitions.len()
            )));
        }
        let transitions = file
            .transitions
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|t| Transition {
                        next: t.next,
                        output: t.output.0,
                    })
                    .collect()
            })
            .collect();
        Transducer::new(
            file.q,
            file.initial,
            transitions,
            file.final_outputs.into_iter().map(|x| x.0).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digits::{adjusted_gray, block_count, h_naf};
    use crate::linrep::Matrix;

    fn b(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn naf_transducer_values() {
        let t = Transducer::naf_weight();
        assert_eq!(t.output_sum(&b(27)), rat(3));
        assert_eq!(t.output_sum(&b(314159265)), rat(11));
        assert_eq!(t.output_sum(&b(0)), t.final_outputs()[t.initial()]);
    }

    #[test]
    fn naf_transducer_matrices() {
        let t = Transducer::naf_weight();
        assert_eq!(t.adjacency(0), Matrix::from_i64(&[&[1, 0, 0], &[1, 0, 0], &[0, 1, 0]]));
        assert_eq!(t.adjacency(1), Matrix::from_i64(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 1]]));
        assert_eq!(t.outputs(0), vec![rat(0), rat(0), rat(1)]);
        assert_eq!(t.outputs(1), vec![rat(1), rat(0), rat(0)]);
        assert_eq!(t.final_outputs(), &[rat(0), rat(0), rat(1)]);
    }

    #[test]
    fn reset_conditions() {
        let t = Transducer::naf_weight();
        let two = t.check_reset(2);
        assert!(two.passes());
        assert_eq!(two.reset_output_sums, vec![rat(0), rat(0), rat(1)]);
        let one = t.check_reset(1);
        assert!(!one.leads_to_initial);
        assert!(!one.has_reset);
        assert_eq!(t.min_reset_parameter(8), Some(2));

        let trivial = Transducer::new(2, 0, vec![vec![
            Transition { next: 0, output: rat(0) },
            Transition { next: 0, output: rat(0) },
        ]], vec![rat(0)])
        .unwrap();
        assert!(trivial.check_reset(0).passes());
    }

    #[test]
    fn malformed_transducers_are_rejected() {
        let t = |next| Transition { next, output: rat(0) };
        assert!(Transducer::new(2, 0, vec![vec![t(0)]], vec![rat(0)]).is_err());
        assert!(Transducer::new(2, 0, vec![vec![t(0), t(1)]], vec![rat(0)]).is_err());
        assert!(Transducer::new(2, 1, vec![vec![t(0), t(0)]], vec![rat(0)]).is_err());
        assert!(Transducer::new(2, 0, vec![vec![t(0), t(0)]], vec![]).is_err());
        assert!(Transducer::new(2, 0, vec![], vec![]).is_err());
    }

    #[test]
    fn disconnected_transducer_fails_reset_check() {
        let t = |next| Transition { next, output: rat(0) };
        let tr = Transducer::new(2, 0, vec![vec![t(0), t(0)], vec![t(0), t(0)]], vec![rat(0), rat(0)]).unwrap();
        assert!(!tr.is_connected());
        let report = tr.check_reset(1);
        assert!(report.leads_to_initial && !report.passes());
    }

    #[test]
    fn converted_representation_matches_output_sum() {
        let t = Transducer::naf_weight();
        let rep = t.to_linear_representation();
        assert_eq!(rep.dim(), 7);
        assert!(rep.is_zero_insensitive());
        for n in 0..1024u64 {
            assert_eq!(rep.evaluate(&b(n)), t.output_sum(&b(n)));
        }
    }

    #[test]
    fn conversion_moves_initial_state_first() {
        // NAF transducer with states relabelled so that the initial one is last
        let src = Transducer::naf_weight();
        let relabel = [2usize, 0, 1];
        let mut rows = vec![Vec::new(); 3];
        let mut finals = vec![rat(0); 3];
        for s in 0..3 {
            rows[relabel[s]] = (0..2)
                .map(|d| {
                    let t = src.transition(s, d);
                    Transition { next: relabel[t.next], output: t.output.clone() }
                })
                .collect();
            finals[relabel[s]] = src.final_outputs()[s].clone();
        }
        let moved = Transducer::new(2, 2, rows, finals).unwrap();
        let rep = moved.to_linear_representation();
        for n in 0..512u64 {
            assert_eq!(moved.output_sum(&b(n)), src.output_sum(&b(n)));
            assert_eq!(rep.evaluate(&b(n)), src.output_sum(&b(n)));
        }
    }

    #[test]
    fn zero_output_transducer_is_zero_function() {
        let t = |next| Transition { next, output: rat(0) };
        let tr = Transducer::new(2, 0, vec![vec![t(1), t(0)], vec![t(0), t(1)]], vec![rat(0), rat(0)]).unwrap();
        let rep = tr.to_linear_representation();
        assert_eq!(rep.minimize().unwrap().dim(), 0);
        for n in 0..64u64 {
            assert_eq!(rep.evaluate(&b(n)), rat(0));
        }
    }

    #[test]
    fn block_counter_agrees_with_scan() {
        let blocks = ["0101", "1", "10", "0010", "111"];
        for s in blocks {
            let block = Block::parse(s, 2).unwrap();
            let t = Transducer::block_counter(std::slice::from_ref(&block)).unwrap();
            for n in 0..2048u64 {
                assert_eq!(t.output_sum(&b(n)), rat(block_count(&b(n), &block) as i64), "block {s} at {n}");
            }
        }
        let ternary = Block::parse("20", 3).unwrap();
        let t = Transducer::block_counter(std::slice::from_ref(&ternary)).unwrap();
        for n in 0..729u64 {
            assert_eq!(t.output_sum(&b(n)), rat(block_count(&b(n), &ternary) as i64));
        }
        let gray = Transducer::block_counter(&[Block::parse("01", 2).unwrap(), Block::parse("10", 2).unwrap()]).unwrap();
        for n in 0..2048u64 {
            assert_eq!(gray.output_sum(&b(n)), rat(adjusted_gray(&b(n)) as i64));
        }
        assert_eq!(gray.min_reset_parameter(4), Some(1));
    }

    #[test]
    fn eq6_recursion_matches_paths() {
        let t = Transducer::naf_weight();
        for n in 0..4096u64 {
            let digits = raw_digits(&b(n), 2);
            let vector = t.output_vector(&b(n));
            for (s, value) in vector.iter().enumerate() {
                let (end, sum) = t.run_from(s, &digits);
                assert_eq!(*value, sum + &t.final_outputs()[end]);
            }
            assert_eq!(vector[0], rat(h_naf(&b(n)) as i64));
        }
    }

    #[test]
    fn json_round_trip() {
        let t = Transducer::naf_weight();
        assert_eq!(Transducer::from_json(&t.to_json()).unwrap(), t);
        let bad = r#"{"q":2,"states":2,"initial":0,"transitions":[[{"next":0,"output":0},{"next":0,"output":"1/2"}]],"final_outputs":[0]}"#;
        assert!(matches!(Transducer::from_json(bad), Err(TransducerError::Malformed(_))));
        let unknown = r#"{"q":2,"states":1,"initial":0,"transitions":[],"final_outputs":[],"extra":1}"#;
        assert!(matches!(Transducer::from_json(unknown), Err(TransducerError::Format(_))));
    }
}
