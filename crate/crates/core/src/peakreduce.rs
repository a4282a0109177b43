//! Lowering a single state-complexity peak of a binary trellis by one.
//!
//! A peak is a unique run of 1, 2 or 3 maximal classes starting at `p`. For
//! each run width there is a recipe choosing the embedded state `alpha` from
//! the states shared by the classes around the peak and a hyperplane of
//! `V_p`; when the guard (size thresholds and side conditions) holds the
//! recipe is known to lower `s_max` by one. Without the guard the same
//! recipes are tried and the outcome is reported as is.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::bcjr::{bcjr, ParityCheckMatrix};
use crate::embedding::{embed, EmbeddingResult, EmbeddingSpec};
use crate::error::{precondition, Error, Result};
use crate::galois::{hyperplanes_avoiding, Subspace, Vector, DEFAULT_ENUMERATION_CAP};
use crate::trellis::Trellis;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PeakKind {
    /// One maximal class.
    Single,
    /// Two maximal classes.
    Plateau2,
    /// Three maximal classes with identical state sets.
    Plateau3Equal,
    /// Three maximal classes whose state sets are not all equal.
    Plateau3Unequal,
}

impl PeakKind {
    /// Number of maximal classes.
    pub fn width(self) -> usize {
        match self {
            PeakKind::Single => 1,
            PeakKind::Plateau2 => 2,
            PeakKind::Plateau3Equal | PeakKind::Plateau3Unequal => 3,
        }
    }

    /// Minimum `|V_{p-1}|` under which the reduction is guaranteed.
    pub fn threshold(self) -> usize {
        match self {
            PeakKind::Single => 4,
            PeakKind::Plateau2 | PeakKind::Plateau3Equal => 8,
            PeakKind::Plateau3Unequal => 16,
        }
    }
}

impl fmt::Display for PeakKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PeakKind::Single => "single",
            PeakKind::Plateau2 => "plateau2",
            PeakKind::Plateau3Equal => "plateau3-equal",
            PeakKind::Plateau3Unequal => "plateau3-unequal",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PeakGuard {
    /// `|V_{p-1}|` reaches the kind's threshold.
    pub threshold_met: bool,
    /// Every class outside `p-1..=p+width` is smaller than `V_{p-1}`.
    pub sides_met: bool,
}

impl PeakGuard {
    pub fn holds(&self) -> bool {
        self.threshold_met && self.sides_met
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PeakPattern {
    pub p: usize,
    pub kind: PeakKind,
    pub guard: PeakGuard,
}

fn require_binary(t: &Trellis) -> Result<()> {
    if !t.field().is_binary() {
        return precondition(format!(
            "peak reduction works over GF(2), not {}",
            t.field()
        ));
    }
    Ok(())
}

/// Finds the peak pattern of a conventional binary trellis, if any.
pub fn classify_peak(t: &Trellis) -> Result<Option<PeakPattern>> {
    require_binary(t)?;
    let sizes = t.class_sizes();
    let n = t.depth();
    let top = *sizes.iter().max().expect("classes are nonempty");
    let at_top: Vec<usize> = (0..sizes.len()).filter(|&i| sizes[i] == top).collect();
    let p = at_top[0];
    let width = at_top.len();
    if at_top[width - 1] != p + width - 1 || p == 0 {
        return Ok(None);
    }
    let kind = match width {
        1 => PeakKind::Single,
        2 => PeakKind::Plateau2,
        3 => {
            let ls = |c: usize| t.labels(c).ok_or(Error::Unlabeled);
            if ls(p)? == ls(p + 1)? && ls(p + 1)? == ls(p + 2)? {
                PeakKind::Plateau3Equal
            } else {
                PeakKind::Plateau3Unequal
            }
        }
        _ => return Ok(None),
    };
    // 1 < p < n - width
    if p <= 1 || p + width >= n {
        return Ok(None);
    }
    let before = sizes[p - 1];
    let sides_met = (0..p - 1)
        .chain(p + width + 1..n)
        .all(|i| sizes[i] < before);
    Ok(Some(PeakPattern {
        p,
        kind,
        guard: PeakGuard {
            threshold_met: before >= kind.threshold(),
            sides_met,
        },
    }))
}

/// `V_{p-1} ∩ ... ∩ V_{p+width}`.
pub fn peak_intersection(h: &ParityCheckMatrix, pattern: &PeakPattern) -> Result<Subspace> {
    let p = pattern.p;
    let mut acc = h.state_space(p - 1)?;
    for i in p..=p + pattern.kind.width() {
        acc = acc.intersection(&h.state_space(i)?);
    }
    Ok(acc)
}

/// `M(S) = S` for the states `S` of class `class`.
pub fn is_forward_stable(t: &Trellis, class: usize, space: &Subspace) -> Result<bool> {
    let set: BTreeSet<Vector> = space
        .elements(DEFAULT_ENUMERATION_CAP)?
        .into_iter()
        .collect();
    Ok(t.image_labels(class, &set, 1)? == set)
}

/// States of class `class - 1` with an edge into `space`, which lives in
/// class `class`.
pub fn backward_image(t: &Trellis, class: usize, space: &Subspace) -> Result<BTreeSet<Vector>> {
    let set: BTreeSet<Vector> = space
        .elements(DEFAULT_ENUMERATION_CAP)?
        .into_iter()
        .collect();
    t.preimage_labels(class, &set, 1)
}

/// A candidate embedding, flagged when it follows the recipe for the
/// pattern rather than the exhaustive fallback.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub spec: EmbeddingSpec,
    pub structured: bool,
}

fn has_self_edge(t: &Trellis, class: usize, state: &Vector) -> Result<bool> {
    let img = t.image_labels(class, &BTreeSet::from([state.clone()]), 1)?;
    Ok(img.contains(state))
}

fn set_as_subspace(t: &Trellis, set: &BTreeSet<Vector>, ambient: usize) -> Option<Subspace> {
    let vs: Vec<Vector> = set.iter().cloned().collect();
    let span = Subspace::span(t.field(), ambient, &vs);
    (span.size() == set.len() as u128).then_some(span)
}

/// Recipe candidates first, then every remaining (alpha, hyperplane) pair
/// with alpha in the peak intersection, then with alpha anywhere in `V_p`.
pub fn candidates(
    h: &ParityCheckMatrix,
    t: &Trellis,
    pattern: &PeakPattern,
) -> Result<Vec<Candidate>> {
    let p = pattern.p;
    let r = h.r();
    let vp = h.state_space(p)?;
    let shared = peak_intersection(h, pattern)?;
    let alphas: Vec<Vector> = shared
        .elements(DEFAULT_ENUMERATION_CAP)?
        .into_iter()
        .filter(|a| !a.is_zero())
        .collect();
    let mut structured: Vec<EmbeddingSpec> = Vec::new();
    let spec = |alpha: &Vector, hyperplane: Subspace| EmbeddingSpec {
        index: p,
        alpha: alpha.clone(),
        hyperplane,
    };

    match pattern.kind {
        PeakKind::Single => {
            for a in &alphas {
                for hp in hyperplanes_avoiding(vp.basis(), a)? {
                    structured.push(spec(a, hp));
                }
            }
        }
        PeakKind::Plateau2 | PeakKind::Plateau3Equal => {
            let next_columns = if pattern.kind == PeakKind::Plateau2 {
                1
            } else {
                2
            };
            let required: Vec<Vector> = (p..p + next_columns)
                .map(|j| h.column(j))
                .filter(|c| vp.contains(c))
                .collect();
            let required_span = Subspace::span(h.field(), r, &required);
            if !required.is_empty() {
                for a in alphas.iter().filter(|a| !required_span.contains(a)) {
                    for hp in hyperplanes_avoiding(vp.basis(), a)? {
                        if required_span.is_subspace_of(&hp) {
                            structured.push(spec(a, hp));
                        }
                    }
                }
            } else {
                for a in &alphas {
                    let mut fixed = true;
                    for c in p..p + next_columns {
                        fixed &= has_self_edge(t, c, a)?;
                    }
                    if fixed {
                        for hp in hyperplanes_avoiding(vp.basis(), a)? {
                            structured.push(spec(a, hp));
                        }
                    }
                }
            }
        }
        PeakKind::Plateau3Unequal => {
            let v1 = h.state_space(p + 1)?;
            let v2 = h.state_space(p + 2)?;
            let h2 = h.column(p + 1);
            if v1 == v2 && !shared.contains(&h2) {
                for a in &alphas {
                    for u in hyperplanes_avoiding(v2.basis(), a)? {
                        if !u.contains(&h2) {
                            continue;
                        }
                        let set: BTreeSet<Vector> =
                            u.elements(DEFAULT_ENUMERATION_CAP)?.into_iter().collect();
                        let pre = t.preimage_labels(p + 2, &set, 2)?;
                        if let Some(hp) = set_as_subspace(t, &pre, r) {
                            if hp.dim() + 1 == vp.dim() && hp.is_subspace_of(&vp) && !hp.contains(a)
                            {
                                structured.push(spec(a, hp));
                            }
                        }
                    }
                }
            } else {
                for a in alphas.iter().filter(|a| **a != h2) {
                    for hp in hyperplanes_avoiding(vp.basis(), a)? {
                        structured.push(spec(a, hp));
                    }
                }
            }
        }
    }

    let mut seen: HashSet<EmbeddingSpec> = HashSet::new();
    let mut out = Vec::new();
    for s in structured {
        if seen.insert(s.clone()) {
            out.push(Candidate {
                spec: s,
                structured: true,
            });
        }
    }
    let rest: Vec<Vector> = vp
        .elements(DEFAULT_ENUMERATION_CAP)?
        .into_iter()
        .filter(|a| !a.is_zero() && !shared.contains(a))
        .collect();
    for a in alphas.iter().chain(&rest) {
        for hp in hyperplanes_avoiding(vp.basis(), a)? {
            let s = spec(a, hp);
            if seen.insert(s.clone()) {
                out.push(Candidate {
                    spec: s,
                    structured: false,
                });
            }
        }
    }
    Ok(out)
}

/// The first recipe candidate: an embedded state and its hyperplane.
pub fn find_alpha(
    h: &ParityCheckMatrix,
    pattern: &PeakPattern,
) -> Result<Option<(Vector, Subspace)>> {
    let t = bcjr(h)?;
    require_binary(&t)?;
    Ok(candidates(h, &t, pattern)?
        .into_iter()
        .find(|c| c.structured)
        .map(|c| (c.spec.alpha, c.spec.hyperplane)))
}

#[derive(Clone, Debug)]
pub struct PeakAttempt {
    pub spec: EmbeddingSpec,
    pub structured: bool,
    pub result: EmbeddingResult,
    pub after: u32,
}

#[derive(Clone, Debug)]
pub struct PeakReduction {
    pub pattern: PeakPattern,
    pub before: u32,
    /// The successful embedding, or the best failed one.
    pub attempt: Option<PeakAttempt>,
    pub success: bool,
    pub candidates_tried: usize,
}

/// Embeds at the peak of `bcjr(h)` so that `s_max` drops by one.
///
/// Candidates are tried in order and the first that lowers `s_max` wins.
pub fn reduce_peak(h: &ParityCheckMatrix) -> Result<PeakReduction> {
    let t = bcjr(h)?;
    require_binary(&t)?;
    let pattern = classify_peak(&t)?.ok_or_else(|| Error::NoPeak(t.scp().to_string()))?;
    let before = t.scp().s_max().expect("binary linear trellis");
    let mut best: Option<PeakAttempt> = None;
    let mut tried = 0;
    for cand in candidates(h, &t, &pattern)? {
        tried += 1;
        let result = embed(h, &cand.spec)?;
        let after = result.tbt.scp().s_max().expect("linear trellis");
        let attempt = PeakAttempt {
            spec: cand.spec,
            structured: cand.structured,
            result,
            after,
        };
        if after < before {
            return Ok(PeakReduction {
                pattern,
                before,
                attempt: Some(attempt),
                success: true,
                candidates_tried: tried,
            });
        }
        if best.as_ref().is_none_or(|b| after < b.after) {
            best = Some(attempt);
        }
    }
    Ok(PeakReduction {
        pattern,
        before,
        attempt: best,
        success: false,
        candidates_tried: tried,
    })
}

/// Every section's source class has uniform out-degree 1 or 2.
pub fn has_binary_out_degrees(t: &Trellis) -> bool {
    t.out_degree_profile()
        .iter()
        .all(|d| matches!(d, Some(1) | Some(2)))
}
