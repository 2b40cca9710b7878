use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

use super::{Clause, CtmModel, EvalMode, WindowInputs};

/// Per-epoch held-out accuracy.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainTrace {
    pub accuracy: Vec<f64>,
}

/// Chance that a clause of a class receives feedback given its clamped sum.
pub fn feedback_probability(threshold: u32, clamped_sum: i32, target: bool) -> f64 {
    let t = threshold as f64;
    let s = clamped_sum as f64;
    if target {
        (t - s) / (2.0 * t)
    } else {
        (t + s) / (2.0 * t)
    }
}

fn literal_value(window: &[u64], inputs: usize, literal: usize) -> bool {
    let i = literal % inputs;
    let x = (window[i / 64] >> (i % 64)) & 1 == 1;
    if literal < inputs {
        x
    } else {
        !x
    }
}

/// Type I feedback. `window` is a matched window chosen by the caller, or
/// `None` when the clause did not fire anywhere.
pub fn type_i_feedback<R: Rng + ?Sized>(clause: &mut Clause, window: Option<&[u64]>, s: f64, rng: &mut R) {
    let literals = 2 * clause.inputs();
    let p_forget = 1.0 / s;
    match window {
        Some(w) => {
            let inputs = clause.inputs();
            let p_memorize = (s - 1.0) / s;
            for l in 0..literals {
                if literal_value(w, inputs, l) {
                    if rng.random_bool(p_memorize) {
                        clause.increment(l);
                    }
                } else if rng.random_bool(p_forget) {
                    clause.decrement(l);
                }
            }
        }
        None => {
            for l in 0..literals {
                if rng.random_bool(p_forget) {
                    clause.decrement(l);
                }
            }
        }
    }
}

/// Type II feedback: include every false, currently excluded literal of
/// the matched window so the clause stops matching it.
pub fn type_ii_feedback(clause: &mut Clause, window: Option<&[u64]>) {
    let Some(w) = window else { return };
    let inputs = clause.inputs();
    for l in 0..2 * inputs {
        if !literal_value(w, inputs, l) && !clause.is_included(l) {
            clause.increment(l);
        }
    }
}

fn give_feedback<R: Rng + ?Sized>(
    model: &mut CtmModel,
    inputs: &WindowInputs,
    class: usize,
    target: bool,
    rng: &mut R,
) {
    let threshold = model.config.threshold;
    let s = model.config.specificity;
    let evals: Vec<Vec<usize>> = model
        .class_clauses(class)
        .iter()
        .map(|c| {
            (0..inputs.positions())
                .filter(|&p| c.matches_window(inputs.window(p), EvalMode::Training))
                .collect()
        })
        .collect();
    let sum: i64 = model
        .class_clauses(class)
        .iter()
        .zip(&evals)
        .filter(|(_, m)| !m.is_empty())
        .map(|(c, _)| c.polarity() as i64)
        .sum();
    let p = feedback_probability(threshold, model.clamp(sum), target);

    for (clause, matched) in model.class_clauses_mut(class).iter_mut().zip(&evals) {
        if !(rng.random::<f64>() < p) {
            continue;
        }
        let window = if matched.is_empty() {
            None
        } else {
            Some(inputs.window(matched[rng.random_range(0..matched.len())]))
        };
        if (clause.polarity() > 0) == target {
            type_i_feedback(clause, window, s, rng);
        } else {
            type_ii_feedback(clause, window);
        }
    }
}

/// One supervised update on a single sample.
pub fn train_step<R: Rng + ?Sized>(
    model: &mut CtmModel,
    inputs: &WindowInputs,
    label: usize,
    rng: &mut R,
) -> Result<()> {
    let classes = model.config.classes;
    if label >= classes {
        return Err(Error::Mismatch(format!("label {label} outside 0..{classes}")));
    }
    if inputs.inputs() != model.inputs() || inputs.positions() != model.positions() {
        return Err(Error::Mismatch("window inputs do not match model".into()));
    }
    give_feedback(model, inputs, label, true, rng);
    if classes > 1 {
        let mut other = rng.random_range(0..classes - 1);
        if other >= label {
            other += 1;
        }
        give_feedback(model, inputs, other, false, rng);
    }
    Ok(())
}

/// Shuffled epochs over `samples`; accuracy on `heldout` after each one
/// (on `samples` itself when `heldout` is empty).
pub fn train<R: Rng + ?Sized>(
    model: &mut CtmModel,
    samples: &[(WindowInputs, usize)],
    heldout: &[(WindowInputs, usize)],
    epochs: usize,
    rng: &mut R,
) -> Result<TrainTrace> {
    if samples.is_empty() {
        return Err(Error::Dataset("training set is empty".into()));
    }
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut trace = TrainTrace::default();
    for _ in 0..epochs {
        order.shuffle(rng);
        for &i in &order {
            let (x, y) = &samples[i];
            train_step(model, x, *y, rng)?;
        }
        let eval = if heldout.is_empty() { samples } else { heldout };
        trace.accuracy.push(model.accuracy(eval));
    }
    Ok(trace)
}
