use bitvec::prelude::*;

use super::WindowInputs;

/// Whether an empty clause (no includes) evaluates true.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    /// Empty clauses output 1 so they can start learning.
    Training,
    /// Empty clauses output 0 and never vote.
    Inference,
}

/// A conjunctive clause: one automaton per literal plus cached include bits.
///
/// Literal `i < L` is input `i`; literal `L + i` is its negation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    states: Vec<u16>,
    pos: Vec<u64>,
    neg: Vec<u64>,
    includes: usize,
    polarity: i8,
    n: u16,
}

/// Output of one clause over all window positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseEval {
    pub matched: bool,
    pub matched_windows: Vec<bool>,
}

impl Clause {
    /// All automata start at `n`, the last exclude state.
    pub fn new(inputs: usize, polarity: i8, n: u16) -> Self {
        Self::from_states(vec![n; 2 * inputs], polarity, n)
    }

    pub fn from_states(states: Vec<u16>, polarity: i8, n: u16) -> Self {
        assert!(states.len() % 2 == 0, "literal count must be even");
        assert!(polarity == 1 || polarity == -1);
        let inputs = states.len() / 2;
        let words = inputs.div_ceil(64);
        let mut c = Self {
            pos: vec![0; words],
            neg: vec![0; words],
            states,
            includes: 0,
            polarity,
            n,
        };
        for l in 0..c.states.len() {
            assert!(c.states[l] >= 1 && c.states[l] <= 2 * n, "state out of range");
            if c.states[l] > n {
                c.set_bit(l, true);
            }
        }
        c
    }

    pub fn inputs(&self) -> usize {
        self.states.len() / 2
    }

    pub fn polarity(&self) -> i8 {
        self.polarity
    }

    pub fn states(&self) -> &[u16] {
        &self.states
    }

    pub fn include_count(&self) -> usize {
        self.includes
    }

    pub fn is_included(&self, literal: usize) -> bool {
        self.states[literal] > self.n
    }

    fn set_bit(&mut self, literal: usize, on: bool) {
        let inputs = self.inputs();
        let (words, i) = if literal < inputs {
            (&mut self.pos, literal)
        } else {
            (&mut self.neg, literal - inputs)
        };
        let bit = 1u64 << (i % 64);
        if on {
            words[i / 64] |= bit;
            self.includes += 1;
        } else {
            words[i / 64] &= !bit;
            self.includes -= 1;
        }
    }

    /// Saturating +1.
    pub fn increment(&mut self, literal: usize) {
        let s = self.states[literal];
        if s < 2 * self.n {
            self.states[literal] = s + 1;
            if s == self.n {
                self.set_bit(literal, true);
            }
        }
    }

    /// Saturating -1.
    pub fn decrement(&mut self, literal: usize) {
        let s = self.states[literal];
        if s > 1 {
            self.states[literal] = s - 1;
            if s == self.n + 1 {
                self.set_bit(literal, false);
            }
        }
    }

    /// Include mask of length 2L.
    pub fn include_mask(&self) -> BitVec<u64, Lsb0> {
        self.states.iter().map(|&s| s > self.n).collect()
    }

    /// Fast conjunction test against one packed window.
    pub fn matches_window(&self, window: &[u64], mode: EvalMode) -> bool {
        if self.includes == 0 {
            return mode == EvalMode::Training;
        }
        self.pos
            .iter()
            .zip(&self.neg)
            .zip(window)
            .all(|((&p, &n), &x)| (p & !x) | (n & x) == 0)
    }

    pub fn eval_conv(&self, inputs: &WindowInputs, mode: EvalMode) -> ClauseEval {
        let matched_windows: Vec<bool> = (0..inputs.positions())
            .map(|p| self.matches_window(inputs.window(p), mode))
            .collect();
        ClauseEval {
            matched: matched_windows.iter().any(|&m| m),
            matched_windows,
        }
    }

    /// OR over windows, stopping at the first match.
    pub fn fires(&self, inputs: &WindowInputs, mode: EvalMode) -> bool {
        (0..inputs.positions()).any(|p| self.matches_window(inputs.window(p), mode))
    }
}

/// Include decisions of a clause: bit `i` set iff automaton `i` is above `n`.
pub fn clause_literals(clause: &Clause) -> BitVec<u64, Lsb0> {
    clause.include_mask()
}

/// Reference conjunction over an unpacked window.
pub fn eval_clause_window(mask: &BitSlice<u64, Lsb0>, window: &[bool], mode: EvalMode) -> bool {
    let inputs = window.len();
    assert_eq!(mask.len(), 2 * inputs, "mask must cover 2L literals");
    if mask.not_any() {
        return mode == EvalMode::Training;
    }
    mask.iter_ones().all(|l| if l < inputs { window[l] } else { !window[l - inputs] })
}
