//! Hard-decision Viterbi decoding on a trellis.
//!
//! A tail-biting trellis is decoded once for every vertex of class 0, keeping
//! only paths that return to that vertex. The closest codeword over all
//! starts wins and ties go to the lexicographically smallest codeword.

use trellis_core::{Trellis, Vector};

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decoded {
    pub codeword: Vector,
    pub distance: usize,
}

type Survivor = Option<(usize, Vec<u32>)>;

fn better(candidate: &(usize, Vec<u32>), current: &Survivor) -> bool {
    match current {
        None => true,
        Some(cur) => candidate < cur,
    }
}

/// Runs Viterbi from `start` in class 0 and returns the best survivor at
/// every vertex of the final class.
fn run_from(t: &Trellis, received: &[u32], start: usize) -> Vec<Survivor> {
    let num = t.num_classes();
    let mut metrics: Vec<Survivor> = vec![None; t.class_size(0)];
    metrics[start] = Some((0, Vec::with_capacity(received.len())));
    for (i, sec) in t.sections().iter().enumerate() {
        let mut next: Vec<Survivor> = vec![None; t.class_size((i + 1) % num)];
        for e in sec {
            if let Some((d, word)) = &metrics[e.from] {
                let mut w = word.clone();
                w.push(e.symbol);
                let cand = (d + usize::from(e.symbol != received[i]), w);
                if better(&cand, &next[e.to]) {
                    next[e.to] = Some(cand);
                }
            }
        }
        metrics = next;
    }
    metrics
}

pub fn decode(t: &Trellis, received: &Vector) -> Result<Decoded> {
    if received.len() != t.depth() {
        return Err(CliError::Argument(format!(
            "received word has {} symbols, trellis depth is {}",
            received.len(),
            t.depth()
        )));
    }
    if received.field() != t.field() {
        return Err(CliError::Argument(format!(
            "received word is not over {}",
            t.field()
        )));
    }
    let r = received.entries();
    let mut best: Survivor = None;
    for start in 0..t.class_size(0) {
        let finals = run_from(t, r, start);
        let end = if t.is_tail_biting() {
            finals.get(start).cloned().flatten()
        } else {
            finals.into_iter().flatten().min()
        };
        if let Some(cand) = end {
            if better(&cand, &best) {
                best = Some(cand);
            }
        }
    }
    let (distance, word) =
        best.ok_or_else(|| CliError::Argument("the trellis has no complete path".into()))?;
    Ok(Decoded {
        codeword: Vector::new(t.field(), word),
        distance,
    })
}
