//! Tail-biting trellises from conventional ones by embedding a state.
//!
//! Given a state `alpha` of class `i` of the BCJR trellis of `H`, and a
//! hyperplane `V_{i,0}` of that state space avoiding `alpha`:
//!
//! 1. `H' = (alpha | H | alpha)`.
//! 2. `H†` is `H'` with one extra parity row that kills every codeword of
//!    `ker H'` whose partial syndrome after `i + 1` symbols leaves `V_{i,0}`.
//! 3. The BCJR trellis of `H†` is cut to classes `1..=n+1`, the first label
//!    coordinate is dropped and class `n + 1` is glued onto class 1.
//!
//! The result is a tail-biting trellis of `ker H` whose class `i` has one
//! dimension fewer.

use std::collections::{BTreeSet, HashMap};

use crate::bcjr::{bcjr_with_cap, ParityCheckMatrix};
use crate::error::{precondition, Error, Result};
use crate::galois::{
    functional_for, hyperplanes_avoiding, Matrix, Subspace, Vector, DEFAULT_ENUMERATION_CAP,
};
use crate::trellis::{Edge, Shape, Trellis};

/// Where to embed: time index, embedded state and hyperplane.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EmbeddingSpec {
    pub index: usize,
    pub alpha: Vector,
    pub hyperplane: Subspace,
}

impl EmbeddingSpec {
    pub fn new(index: usize, alpha: Vector, hyperplane_basis: &[Vector]) -> Self {
        let hyperplane = Subspace::span(alpha.field(), alpha.len(), hyperplane_basis);
        EmbeddingSpec {
            index,
            alpha,
            hyperplane,
        }
    }

    /// Uses the first hyperplane in functional order.
    pub fn auto(h: &ParityCheckMatrix, index: usize, alpha: Vector) -> Result<Self> {
        check_index(h, index)?;
        let space = h.state_space(index)?;
        check_alpha(&space, &alpha, index)?;
        let hyperplane = hyperplanes_avoiding(space.basis(), &alpha)?
            .into_iter()
            .next()
            .expect("a nonzero state always has a hyperplane avoiding it");
        Ok(EmbeddingSpec {
            index,
            alpha,
            hyperplane,
        })
    }

    /// Checks the spec against `h` and returns the state space `V_i`.
    pub fn validate(&self, h: &ParityCheckMatrix) -> Result<Subspace> {
        check_index(h, self.index)?;
        if self.alpha.len() != h.r() || self.hyperplane.ambient() != h.r() {
            return Err(Error::Dimension(format!(
                "states have length {}, matrix has {} rows",
                self.alpha.len(),
                h.r()
            )));
        }
        let space = h.state_space(self.index)?;
        check_alpha(&space, &self.alpha, self.index)?;
        if !self.hyperplane.is_subspace_of(&space) {
            return precondition(format!(
                "{} is not inside V_{} = {space}",
                self.hyperplane, self.index
            ));
        }
        if self.hyperplane.dim() + 1 != space.dim() {
            return precondition(format!(
                "{} has dimension {}, a hyperplane of V_{} needs {}",
                self.hyperplane,
                self.hyperplane.dim(),
                self.index,
                space.dim() - 1
            ));
        }
        if self.hyperplane.contains(&self.alpha) {
            return precondition(format!("alpha {} lies in {}", self.alpha, self.hyperplane));
        }
        Ok(space)
    }

    /// Functional vanishing on the hyperplane with value 1 on `alpha`.
    pub fn functional(&self) -> Result<Vector> {
        functional_for(self.hyperplane.basis(), &self.alpha, self.alpha.len())
    }
}

fn check_index(h: &ParityCheckMatrix, index: usize) -> Result<()> {
    if index >= h.n() {
        return precondition(format!("index {index} out of range for length {}", h.n()));
    }
    Ok(())
}

fn check_alpha(space: &Subspace, alpha: &Vector, index: usize) -> Result<()> {
    if alpha.len() != space.ambient() {
        return Err(Error::Dimension(format!(
            "alpha has length {}, states have length {}",
            alpha.len(),
            space.ambient()
        )));
    }
    if alpha.is_zero() {
        return precondition("alpha must be nonzero");
    }
    if !space.contains(alpha) {
        return precondition(format!(
            "alpha {alpha} is not a state of class {index} (V_{index} = {space})"
        ));
    }
    Ok(())
}

/// Every legal spec for `h`, ordered by index, then alpha, then hyperplane.
pub fn legal_specs(h: &ParityCheckMatrix, cap: usize) -> Result<Vec<EmbeddingSpec>> {
    let mut out = Vec::new();
    for index in 0..h.n() {
        let space = h.state_space(index)?;
        if space.dim() == 0 {
            continue;
        }
        for alpha in space.elements(cap)? {
            if alpha.is_zero() {
                continue;
            }
            for hyperplane in hyperplanes_avoiding(space.basis(), &alpha)? {
                out.push(EmbeddingSpec {
                    index,
                    alpha: alpha.clone(),
                    hyperplane,
                });
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct EmbeddingResult {
    pub h_prime: ParityCheckMatrix,
    pub h_dagger: ParityCheckMatrix,
    pub t_dagger: Trellis,
    pub tbt: Trellis,
}

/// `(alpha | h | alpha)`.
pub fn extend_matrix(h: &ParityCheckMatrix, alpha: &Vector) -> Result<ParityCheckMatrix> {
    if alpha.len() != h.r() {
        return Err(Error::Dimension(format!(
            "alpha has length {}, matrix has {} rows",
            alpha.len(),
            h.r()
        )));
    }
    let mut cols = Vec::with_capacity(h.n() + 2);
    cols.push(alpha.clone());
    cols.extend(h.matrix().columns());
    cols.push(alpha.clone());
    Ok(ParityCheckMatrix::new(Matrix::from_columns(
        h.field(),
        h.r(),
        &cols,
    )?))
}

/// Extra parity row: `x_j = phi . h'_j` for the first `i + 1` columns of
/// `h_prime`, zero afterwards.
pub fn dagger_row(h_prime: &ParityCheckMatrix, i: usize, phi: &Vector) -> Result<Vector> {
    let f = h_prime.field();
    if phi.len() != h_prime.r() {
        return Err(Error::Dimension(
            "functional length differs from row count".into(),
        ));
    }
    if i + 1 >= h_prime.n() {
        return precondition(format!(
            "index {i} out of range for extended length {}",
            h_prime.n()
        ));
    }
    let alpha = h_prime.column(0);
    if phi.dot(&alpha) != 1 {
        return precondition(format!(
            "functional {phi} takes value {} on alpha {alpha}, not 1",
            phi.dot(&alpha)
        ));
    }
    let mut x = Vector::zeros(f, h_prime.n());
    for j in 0..=i {
        x.set(j, phi.dot(&h_prime.column(j)));
    }
    Ok(x)
}

/// `H†`: the dagger row stacked above `H'`.
pub fn dagger_matrix(h: &ParityCheckMatrix, spec: &EmbeddingSpec) -> Result<ParityCheckMatrix> {
    spec.validate(h)?;
    let h_prime = extend_matrix(h, &spec.alpha)?;
    dagger_from_prime(&h_prime, spec)
}

fn dagger_from_prime(
    h_prime: &ParityCheckMatrix,
    spec: &EmbeddingSpec,
) -> Result<ParityCheckMatrix> {
    let phi = spec.functional()?;
    let row = dagger_row(h_prime, spec.index, &phi)?;
    let h_dagger = ParityCheckMatrix::new(h_prime.matrix().prepend_row(&row)?);
    if h_dagger.rank() != h_prime.rank() + 1 {
        return Err(Error::Construction(
            "extra parity row is dependent on H'".into(),
        ));
    }
    Ok(h_dagger)
}

pub fn embed(h: &ParityCheckMatrix, spec: &EmbeddingSpec) -> Result<EmbeddingResult> {
    embed_with_cap(h, spec, DEFAULT_ENUMERATION_CAP)
}

/// Runs the full embedding.
///
/// Over fields larger than GF(2) the cycle code of the result is enumerated
/// and compared with `ker h`.
pub fn embed_with_cap(
    h: &ParityCheckMatrix,
    spec: &EmbeddingSpec,
    cap: usize,
) -> Result<EmbeddingResult> {
    spec.validate(h)?;
    let h_prime = extend_matrix(h, &spec.alpha)?;
    let h_dagger = dagger_from_prime(&h_prime, spec)?;
    let t_dagger = bcjr_with_cap(&h_dagger, cap)?;
    let tbt = induced_tail_biting(&t_dagger, 1, h.n())?;
    if !h.field().is_binary() {
        let expected: BTreeSet<Vector> = h.code(cap)?.into_iter().collect();
        if tbt.represented_code(cap)? != expected {
            return Err(Error::Construction(
                "tail-biting trellis does not represent ker H".into(),
            ));
        }
    }
    Ok(EmbeddingResult {
        h_prime,
        h_dagger,
        t_dagger,
        tbt,
    })
}

/// Tail-biting trellis of depth `n` read off classes `k..=n+k` of a labeled
/// conventional trellis of depth `n + 2k`. Labels lose their first `k`
/// coordinates and class `n + k` is glued onto class `k` by label.
pub fn induced_tail_biting(t: &Trellis, k: usize, n: usize) -> Result<Trellis> {
    if t.is_tail_biting() || t.depth() != n + 2 * k || n == 0 {
        return Err(Error::Dimension(format!(
            "need a conventional trellis of depth {}, got depth {}",
            n + 2 * k,
            t.depth()
        )));
    }
    let strip = |class: usize| -> Result<Vec<Vector>> {
        let ls = t.labels(class).ok_or(Error::Unlabeled)?;
        let stripped: Vec<Vector> = ls.iter().map(|l| l.strip_front(k)).collect();
        let distinct: BTreeSet<&Vector> = stripped.iter().collect();
        if distinct.len() != stripped.len() {
            return Err(Error::Construction(format!(
                "stripped labels of class {class} collide"
            )));
        }
        Ok(stripped)
    };
    let classes: Vec<Vec<Vector>> = (k..n + k).map(strip).collect::<Result<_>>()?;
    let closing = strip(n + k)?;
    let start_set: BTreeSet<&Vector> = classes[0].iter().collect();
    let end_set: BTreeSet<&Vector> = closing.iter().collect();
    if start_set != end_set {
        return Err(Error::Construction(format!(
            "stripped label sets of classes {k} and {} differ",
            n + k
        )));
    }
    let start_index: HashMap<&Vector, usize> =
        classes[0].iter().enumerate().map(|(i, l)| (l, i)).collect();
    let glue: Vec<usize> = closing.iter().map(|l| start_index[l]).collect();

    let mut sections: Vec<Vec<Edge>> = (k..n + k).map(|s| t.section(s).to_vec()).collect();
    for e in sections[n - 1].iter_mut() {
        e.to = glue[e.to];
    }
    let sizes = classes.iter().map(Vec::len).collect();
    Trellis::new(t.field(), Shape::TailBiting, sizes, sections, Some(classes))
}

/// Basis of `C_t`: codewords of `ker h_prime` whose partial syndrome after
/// `i + 1` symbols lies in the hyperplane. Found by enumeration.
pub fn subcode_ct(
    h_prime: &ParityCheckMatrix,
    i: usize,
    hyperplane: &Subspace,
    cap: usize,
) -> Result<Vec<Vector>> {
    let kept: Vec<Vector> = h_prime
        .code(cap)?
        .into_iter()
        .filter(|c| hyperplane.contains(&h_prime.partial_syndrome(c, i + 1)))
        .collect();
    let span = Subspace::span(h_prime.field(), h_prime.n(), &kept);
    if span.size() != kept.len() as u128 {
        return Err(Error::Construction(
            "filtered codewords are not closed under addition".into(),
        ));
    }
    Ok(span.basis().to_vec())
}

/// How the class `r` steps after the embedding index is obtained from the
/// forward images of the original state spaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ImageCase {
    /// `M^r(V_i) = M^r(V_{i,0})` contains alpha: the class is `M^r(V_i)`.
    FullImage,
    /// `M^r(V_i) = M^r(V_{i,0})` misses alpha: `span(M^r(V_i) ∪ {alpha})`.
    FullImageWithAlpha,
    /// The images differ and every `M^r(alpha) - alpha` lies in
    /// `M^r(V_{i,0})`: the class is `M^r(V_{i,0})`.
    HyperplaneImage,
    /// Otherwise: `span(M^r(V_{i,0}) ∪ {M^r(alpha) - alpha})`.
    HyperplaneImageWithShift,
}

impl ImageCase {
    /// Position in the order listed above, starting at 1.
    pub fn number(self) -> u8 {
        match self {
            ImageCase::FullImage => 1,
            ImageCase::FullImageWithAlpha => 2,
            ImageCase::HyperplaneImage => 3,
            ImageCase::HyperplaneImageWithShift => 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StatePrediction {
    pub case: ImageCase,
    pub space: Subspace,
    /// The image of alpha used for the shift, in the last case.
    pub witness: Option<Vector>,
}

fn span_of(t: &Trellis, set: &BTreeSet<Vector>, ambient: usize) -> Subspace {
    let vs: Vec<Vector> = set.iter().cloned().collect();
    Subspace::span(t.field(), ambient, &vs)
}

/// Predicts the stripped class `i + r` of the embedded trellis from forward
/// images in `t = bcjr(h)`, without building the embedding.
pub fn predict_state_space(t: &Trellis, spec: &EmbeddingSpec, r: usize) -> Result<StatePrediction> {
    let i = spec.index;
    let n = t.depth();
    if t.is_tail_biting() || r == 0 || i + r >= n {
        return precondition(format!(
            "offset {r} from index {i} is outside 0 < i + r < {n}"
        ));
    }
    let cap = DEFAULT_ENUMERATION_CAP;
    let ambient = spec.alpha.len();
    let states: BTreeSet<Vector> = t
        .labels(i)
        .ok_or(Error::Unlabeled)?
        .iter()
        .cloned()
        .collect();
    let hyper: BTreeSet<Vector> = spec.hyperplane.elements(cap)?.into_iter().collect();
    if !hyper.is_subset(&states) || !states.contains(&spec.alpha) {
        return precondition("spec does not match the states of the trellis");
    }
    let image = span_of(t, &t.image_labels(i, &states, r)?, ambient);
    let hyper_image = span_of(t, &t.image_labels(i, &hyper, r)?, ambient);
    let alpha_images = t.image_labels(i, &BTreeSet::from([spec.alpha.clone()]), r)?;
    let alpha = &spec.alpha;

    if image == hyper_image {
        if hyper_image.contains(alpha) {
            return Ok(StatePrediction {
                case: ImageCase::FullImage,
                space: image,
                witness: None,
            });
        }
        return Ok(StatePrediction {
            case: ImageCase::FullImageWithAlpha,
            space: image.with_vector(alpha),
            witness: None,
        });
    }
    let shifted: Vec<(Vector, Vector)> = alpha_images
        .iter()
        .map(|m| (m.clone(), m - alpha))
        .collect();
    match shifted.into_iter().find(|(_, d)| !hyper_image.contains(d)) {
        None => Ok(StatePrediction {
            case: ImageCase::HyperplaneImage,
            space: hyper_image,
            witness: None,
        }),
        Some((m, d)) => Ok(StatePrediction {
            case: ImageCase::HyperplaneImageWithShift,
            space: hyper_image.with_vector(&d),
            witness: Some(m),
        }),
    }
}

/// Whether class `spec.index` lost exactly one dimension.
pub fn dimension_drop_check(t: &Trellis, spec: &EmbeddingSpec, result: &EmbeddingResult) -> bool {
    let before = t.scp().values()[spec.index];
    let after = result.tbt.scp().values()[spec.index];
    matches!((before, after), (Some(b), Some(a)) if b >= 1 && a == b - 1)
}
