//! Minimal conventional trellises from parity-check matrices.
//!
//! Vertices at depth `i` are the partial syndromes `h_1 c_1 + ... + h_i c_i`
//! of codeword prefixes. Labels keep all `r` rows of `H`, including redundant
//! ones.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::galois::{
    check_cap, enumerate_span, Field, Matrix, Subspace, Vector, DEFAULT_ENUMERATION_CAP,
};
use crate::trellis::{Edge, Shape, Trellis};

/// A parity-check matrix `H = (h_1, ..., h_n)`; its code is the right kernel.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParityCheckMatrix(Matrix);

impl ParityCheckMatrix {
    pub fn new(m: Matrix) -> Self {
        ParityCheckMatrix(m)
    }

    pub fn from_digit_rows(field: Field, rows: &[&str]) -> Result<Self> {
        Matrix::from_digit_rows(field, rows).map(Self)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn field(&self) -> Field {
        self.0.field()
    }

    /// Code length.
    pub fn n(&self) -> usize {
        self.0.cols()
    }

    /// Number of rows, i.e. the label length.
    pub fn r(&self) -> usize {
        self.0.rows()
    }

    pub fn column(&self, j: usize) -> Vector {
        self.0.column(j)
    }

    pub fn rank(&self) -> usize {
        self.0.rank()
    }

    pub fn dimension(&self) -> usize {
        self.n() - self.rank()
    }

    pub fn kernel_basis(&self) -> Vec<Vector> {
        self.0.kernel_basis()
    }

    pub fn syndrome(&self, c: &Vector) -> Vector {
        self.0.mul_vec(c)
    }

    /// `h_1 c_1 + ... + h_i c_i`.
    pub fn partial_syndrome(&self, c: &Vector, i: usize) -> Vector {
        let f = self.field();
        let entries = (0..self.r())
            .map(|row| (0..i).fold(0, |acc, j| f.add(acc, f.mul(self.0.get(row, j), c.get(j)))))
            .collect();
        Vector::new(f, entries)
    }

    /// All codewords, sorted.
    pub fn code(&self, cap: usize) -> Result<Vec<Vector>> {
        enumerate_span(self.field(), self.n(), &self.kernel_basis(), cap)
    }

    /// `V_i = span(h_1..h_i) ∩ span(h_{i+1}..h_n)`, the label set of class `i`
    /// of the BCJR trellis.
    pub fn state_space(&self, i: usize) -> Result<Subspace> {
        if i > self.n() {
            return Err(Error::Dimension(format!(
                "index {i} beyond length {}",
                self.n()
            )));
        }
        let cols = self.0.columns();
        let past = Subspace::span(self.field(), self.r(), &cols[..i]);
        let future = Subspace::span(self.field(), self.r(), &cols[i..]);
        Ok(past.intersection(&future))
    }

    /// Nonzero rows of the reduced row-echelon form, which span the same row
    /// space. A zero matrix reduces to a single zero row.
    pub fn row_reduced(&self) -> ParityCheckMatrix {
        let rref = self.0.rref();
        let mut rows: Vec<Vector> = (0..rref.rank).map(|r| rref.reduced.row(r)).collect();
        if rows.is_empty() {
            rows.push(Vector::zeros(self.field(), self.n()));
        }
        ParityCheckMatrix(
            Matrix::from_rows(self.field(), self.n(), &rows).expect("rows share length"),
        )
    }
}

impl std::fmt::Display for ParityCheckMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// BCJR trellis with the default enumeration cap.
pub fn bcjr(h: &ParityCheckMatrix) -> Result<Trellis> {
    bcjr_with_cap(h, DEFAULT_ENUMERATION_CAP)
}

/// BCJR trellis of `h`.
///
/// The map `c -> (S_i(c), c_{i+1})` is linear, so the edge set of section `i`
/// is the span of the images of a kernel basis; only realized states and
/// edges are ever produced. `cap` bounds the number of edges per section.
pub fn bcjr_with_cap(h: &ParityCheckMatrix, cap: usize) -> Result<Trellis> {
    let field = h.field();
    let n = h.n();
    let r = h.r();
    if n == 0 {
        return Err(Error::Dimension(
            "parity-check matrix has no columns".into(),
        ));
    }
    let basis = h.kernel_basis();
    let columns = h.matrix().columns();

    let mut classes: Vec<Vec<Vector>> = Vec::with_capacity(n + 1);
    let mut raw_edges: Vec<Vec<(Vector, u32, Vector)>> = Vec::with_capacity(n);
    // Partial syndromes of the basis codewords, advanced one column at a time.
    let mut syndromes: Vec<Vector> = vec![Vector::zeros(field, r); basis.len()];
    for (i, column) in columns.iter().enumerate() {
        let images: Vec<Vector> = basis
            .iter()
            .zip(&syndromes)
            .map(|(b, s)| s.concat(&Vector::new(field, vec![b.get(i)])))
            .collect();
        let space = Subspace::span(field, r + 1, &images);
        check_cap("trellis edges", space.size(), cap)?;
        let mut sources = BTreeSet::new();
        let mut sec = Vec::with_capacity(space.size() as usize);
        for e in space.elements(cap)? {
            let state = e.slice(0..r);
            let symbol = e.get(r);
            let next = &state + &column.scale(symbol);
            sources.insert(state.clone());
            sec.push((state, symbol, next));
        }
        classes.push(sources.into_iter().collect());
        raw_edges.push(sec);
        for (s, b) in syndromes.iter_mut().zip(&basis) {
            *s = &*s + &column.scale(b.get(i));
        }
    }
    classes.push(vec![Vector::zeros(field, r)]);

    let index: Vec<HashMap<&Vector, usize>> = classes
        .iter()
        .map(|c| c.iter().enumerate().map(|(k, l)| (l, k)).collect())
        .collect();
    let sections: Vec<Vec<Edge>> = raw_edges
        .iter()
        .enumerate()
        .map(|(i, sec)| {
            sec.iter()
                .map(|(a, s, b)| Edge::new(index[i][a], *s, index[i + 1][b]))
                .collect()
        })
        .collect();
    let sizes = classes.iter().map(Vec::len).collect();
    Trellis::new(field, Shape::Conventional, sizes, sections, Some(classes))
}

/// Pass/fail for each property a minimal conventional trellis must have.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimalityReport {
    pub reduced: bool,
    pub biproper: bool,
    pub nonmergeable: bool,
    pub linear: bool,
    pub isomorphic_to_reference: bool,
}

impl MinimalityReport {
    pub fn passes(&self) -> bool {
        self.reduced
            && self.biproper
            && self.nonmergeable
            && self.linear
            && self.isomorphic_to_reference
    }
}

/// Checks `t` against the minimality properties and against `reference`.
pub fn minimality_signature(
    t: &Trellis,
    reference: &Trellis,
    cap: usize,
) -> Result<MinimalityReport> {
    let linear = if t.is_labeled() {
        t.is_linear(cap)?
    } else {
        false
    };
    Ok(MinimalityReport {
        reduced: t.is_reduced(),
        biproper: t.is_biproper(),
        nonmergeable: !t.is_mergeable(cap)?,
        linear,
        isomorphic_to_reference: t.isomorphic(reference),
    })
}

/// Builds `bcjr(h)` and compares it with the trellis of the row-reduced
/// matrix, which spans the same row space.
pub fn check_bcjr_minimality_signature(h: &ParityCheckMatrix) -> Result<MinimalityReport> {
    let t = bcjr(h)?;
    let reference = bcjr(&h.row_reduced())?;
    minimality_signature(&t, &reference, DEFAULT_ENUMERATION_CAP)
}
