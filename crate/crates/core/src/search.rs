//! Search over sequences of embeddings for tail-biting trellises with small
//! state complexity.
//!
//! After `k` embeddings the extended matrix has size `(r+k) x (n+2k)`. Its
//! BCJR trellis, restricted to classes `k..=n+k` with the first `k` label
//! coordinates removed, is a tail-biting trellis of the original code. The
//! search explores embedding choices level by level, merges states whose
//! induced trellises are isomorphic and keeps the best one by
//! `(s_max, profile, k)`.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use crate::bcjr::{bcjr_with_cap, ParityCheckMatrix};
use crate::embedding::{dagger_matrix, induced_tail_biting, legal_specs, EmbeddingSpec};
use crate::error::{precondition, Error, Result};
use crate::galois::{Vector, DEFAULT_ENUMERATION_CAP};
use crate::trellis::{StateComplexityProfile, Trellis};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Beam {
    /// Width 64 for codes longer than 6, unlimited otherwise.
    Auto,
    Unlimited,
    Width(usize),
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub max_embeddings: usize,
    pub beam: Beam,
    /// Longest code accepted.
    pub max_n: usize,
    /// Upper bound on embeddings performed before giving up on exhaustiveness.
    pub max_expansions: usize,
    pub cap: usize,
    pub parallel: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_embeddings: 3,
            beam: Beam::Auto,
            max_n: 10,
            max_expansions: 20_000,
            cap: DEFAULT_ENUMERATION_CAP,
            parallel: true,
        }
    }
}

impl SearchConfig {
    pub fn with_max_embeddings(mut self, k: usize) -> Self {
        self.max_embeddings = k;
        self
    }

    pub fn with_beam(mut self, beam: Beam) -> Self {
        self.beam = beam;
        self
    }

    fn beam_width(&self, n: usize) -> Option<usize> {
        match self.beam {
            Beam::Auto if n > 6 => Some(64),
            Beam::Auto | Beam::Unlimited => None,
            Beam::Width(w) => Some(w.max(1)),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchState {
    pub matrix: ParityCheckMatrix,
    pub k: usize,
    pub trace: Vec<EmbeddingSpec>,
    pub tbt: Trellis,
}

impl SearchState {
    pub fn scp(&self) -> StateComplexityProfile {
        self.tbt.scp()
    }

    /// Ordering key: largest class, then class sizes, then embeddings used.
    fn objective(&self) -> (usize, &[usize], usize) {
        (self.tbt.scp().max_size(), self.tbt.class_sizes(), self.k)
    }

    fn cmp_objective(&self, other: &SearchState) -> Ordering {
        self.objective().cmp(&other.objective())
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub best: SearchState,
    /// False when the beam or the expansion budget cut the search short.
    pub exhaustive: bool,
    /// Distinct (up to isomorphism) states visited, with their embedding count
    /// and profile.
    pub explored: Vec<(usize, StateComplexityProfile)>,
    pub expansions: usize,
    /// Embeddings whose induced trellis could not be formed.
    pub skipped: usize,
}

fn induced_state(
    matrix: ParityCheckMatrix,
    k: usize,
    n: usize,
    trace: Vec<EmbeddingSpec>,
    cap: usize,
) -> Result<SearchState> {
    let t = bcjr_with_cap(&matrix, cap)?;
    let tbt = induced_tail_biting(&t, k, n)?;
    Ok(SearchState {
        matrix,
        k,
        trace,
        tbt,
    })
}

/// Applies `trace` to `h` and returns the induced tail-biting trellis.
pub fn replay(h: &ParityCheckMatrix, trace: &[EmbeddingSpec]) -> Result<Trellis> {
    replay_with_cap(h, trace, DEFAULT_ENUMERATION_CAP)
}

pub fn replay_with_cap(
    h: &ParityCheckMatrix,
    trace: &[EmbeddingSpec],
    cap: usize,
) -> Result<Trellis> {
    let mut m = h.clone();
    for spec in trace {
        m = dagger_matrix(&m, spec)?;
    }
    Ok(induced_state(m, trace.len(), h.n(), trace.to_vec(), cap)?.tbt)
}

/// Isomorphism-class memo keyed by an invariant hash.
#[derive(Default)]
struct Memo {
    buckets: HashMap<u64, Vec<Trellis>>,
}

impl Memo {
    /// Records `t` and returns true if no isomorphic trellis was seen before.
    fn insert(&mut self, t: &Trellis) -> bool {
        let bucket = self.buckets.entry(t.invariant_signature()).or_default();
        if bucket.iter().any(|s| s.isomorphic(t)) {
            return false;
        }
        bucket.push(t.clone());
        true
    }
}

/// Breadth-first search over embedding sequences of length at most
/// `config.max_embeddings`.
pub fn minimize_tbt(h: &ParityCheckMatrix, config: &SearchConfig) -> Result<SearchOutcome> {
    let n = h.n();
    if n > config.max_n {
        return precondition(format!(
            "code length {n} exceeds the search limit {}",
            config.max_n
        ));
    }
    let beam = config.beam_width(n);
    if beam.is_none() && !h.field().is_binary() {
        return precondition("unlimited search is only supported over GF(2)");
    }
    let code: BTreeSet<Vector> = h.code(config.cap)?.into_iter().collect();

    let root = induced_state(h.clone(), 0, n, Vec::new(), config.cap)?;
    let mut memo = Memo::default();
    memo.insert(&root.tbt);
    let mut explored = vec![(0, root.scp())];
    let mut best = root.clone();
    let mut frontier = vec![root];
    let mut exhaustive = true;
    let mut expansions = 0usize;
    let mut skipped = 0usize;

    for level in 1..=config.max_embeddings {
        let mut jobs: Vec<(usize, EmbeddingSpec)> = Vec::new();
        for (si, state) in frontier.iter().enumerate() {
            let specs = legal_specs(&state.matrix, config.cap)?;
            jobs.extend(
                specs
                    .into_iter()
                    .filter(|s| s.index >= state.k && s.index < state.k + n)
                    .map(|s| (si, s)),
            );
        }
        if expansions + jobs.len() > config.max_expansions {
            exhaustive = false;
            jobs.truncate(config.max_expansions.saturating_sub(expansions));
        }
        expansions += jobs.len();

        let expand = |(si, spec): &(usize, EmbeddingSpec)| -> Result<Option<SearchState>> {
            let parent = &frontier[*si];
            let m = dagger_matrix(&parent.matrix, spec)?;
            let mut trace = parent.trace.clone();
            trace.push(spec.clone());
            match induced_state(m, level, n, trace, config.cap) {
                Ok(child) => {
                    if child.tbt.represented_code(config.cap)? != code {
                        return Err(Error::Construction(format!(
                            "embedding {spec:?} changed the represented code"
                        )));
                    }
                    Ok(Some(child))
                }
                Err(Error::Construction(_)) => Ok(None),
                Err(e) => Err(e),
            }
        };
        let results: Vec<Result<Option<SearchState>>> = if config.parallel {
            jobs.par_iter().map(expand).collect()
        } else {
            jobs.iter().map(expand).collect()
        };

        let mut next = Vec::new();
        for r in results {
            match r? {
                Some(child) => {
                    if memo.insert(&child.tbt) {
                        explored.push((child.k, child.scp()));
                        next.push(child);
                    }
                }
                None => skipped += 1,
            }
        }
        next.sort_by(|a, b| a.cmp_objective(b));
        if let Some(w) = beam {
            if next.len() > w {
                next.truncate(w);
                exhaustive = false;
            }
        }
        if let Some(first) = next.first() {
            if first.cmp_objective(&best) == Ordering::Less {
                best = first.clone();
            }
        }
        frontier = next;
        if frontier.is_empty() || expansions >= config.max_expansions {
            if expansions >= config.max_expansions
                && level < config.max_embeddings
                && !frontier.is_empty()
            {
                exhaustive = false;
            }
            break;
        }
    }

    Ok(SearchOutcome {
        best,
        exhaustive,
        explored,
        expansions,
        skipped,
    })
}
