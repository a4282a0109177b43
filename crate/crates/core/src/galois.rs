//! Arithmetic and linear algebra over prime fields GF(q).
//!
//! Vectors and matrices store one `u32` digit per entry. Gaussian elimination
//! over GF(2) runs on bit-packed rows; every other field uses the digit
//! representation directly. Both paths produce the same canonical reduced
//! row-echelon form.
//!
//! All set-valued results (span enumerations, hyperplane lists) come back in a
//! fixed lexicographic order so constructions built on top of them are
//! reproducible.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{precondition, Error, Result};

/// Default upper bound on the number of elements any enumeration may produce.
pub const DEFAULT_ENUMERATION_CAP: usize = 1 << 20;

fn is_prime(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= q as u64 {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `q^exp`, saturating at `u128::MAX`.
pub(crate) fn pow_count(q: u32, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(q as u128);
    }
    acc
}

pub(crate) fn check_cap(what: &'static str, needed: u128, cap: usize) -> Result<()> {
    if needed > cap as u128 {
        Err(Error::CapExceeded { what, needed, cap })
    } else {
        Ok(())
    }
}

/// A prime field GF(q).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Field {
    q: u32,
}

impl Field {
    pub fn new(q: u32) -> Result<Self> {
        if is_prime(q) {
            Ok(Field { q })
        } else {
            Err(Error::InvalidField(q))
        }
    }

    pub const fn binary() -> Self {
        Field { q: 2 }
    }

    #[inline]
    pub fn order(self) -> u32 {
        self.q
    }

    #[inline]
    pub fn is_binary(self) -> bool {
        self.q == 2
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.q as u64) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(self, a: u32) -> u32 {
        assert!(
            !a.is_multiple_of(self.q),
            "zero has no inverse in GF({})",
            self.q
        );
        // Fermat: a^(q-2)
        let mut base = a as u64 % self.q as u64;
        let mut exp = self.q - 2;
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % self.q as u64;
            }
            base = base * base % self.q as u64;
            exp >>= 1;
        }
        acc as u32
    }

    #[inline]
    pub fn reduce(self, x: u64) -> u32 {
        (x % self.q as u64) as u32
    }

    pub fn elements(self) -> impl Iterator<Item = u32> {
        0..self.q
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.q)
    }
}

/// A fixed-length vector over a prime field.
///
/// Ordering is lexicographic on the entries, which is the order used for every
/// deterministic tie-break in this crate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vector {
    field: Field,
    entries: Vec<u32>,
}

impl Vector {
    pub fn new(field: Field, entries: Vec<u32>) -> Self {
        let q = field.order();
        let entries = entries.into_iter().map(|e| e % q).collect();
        Vector { field, entries }
    }

    pub fn zeros(field: Field, len: usize) -> Self {
        Vector {
            field,
            entries: vec![0; len],
        }
    }

    pub fn unit(field: Field, len: usize, i: usize) -> Self {
        let mut v = Self::zeros(field, len);
        v.entries[i] = 1;
        v
    }

    /// Parses a digit string such as `"0110"`; every digit must be below `q`.
    pub fn from_digits(field: Field, digits: &str) -> Result<Self> {
        let mut entries = Vec::with_capacity(digits.len());
        for (i, ch) in digits.chars().enumerate() {
            let d = ch.to_digit(10).ok_or_else(|| {
                Error::Precondition(format!("'{ch}' at position {i} is not a digit"))
            })?;
            if d >= field.order() {
                return precondition(format!(
                    "digit {d} at position {i} is not an element of {field}"
                ));
            }
            entries.push(d);
        }
        Ok(Vector { field, entries })
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    #[inline]
    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize) -> u32 {
        self.entries[i]
    }

    pub fn set(&mut self, i: usize, value: u32) {
        self.entries[i] = value % self.field.order();
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    pub fn scale(&self, c: u32) -> Vector {
        let f = self.field;
        Vector {
            field: f,
            entries: self.entries.iter().map(|&e| f.mul(e, c)).collect(),
        }
    }

    pub fn dot(&self, other: &Vector) -> u32 {
        debug_assert_eq!(self.len(), other.len());
        let q = self.field.order() as u64;
        let s = self
            .entries
            .iter()
            .zip(&other.entries)
            .fold(0u64, |acc, (&a, &b)| (acc + a as u64 * b as u64) % q);
        s as u32
    }

    /// Drops the first `k` coordinates.
    pub fn strip_front(&self, k: usize) -> Vector {
        Vector {
            field: self.field,
            entries: self.entries[k..].to_vec(),
        }
    }

    /// Keeps coordinates `range`.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Vector {
        Vector {
            field: self.field,
            entries: self.entries[range].to_vec(),
        }
    }

    pub fn concat(&self, other: &Vector) -> Vector {
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Vector {
            field: self.field,
            entries,
        }
    }

    /// Digit-string rendering, most significant (first) coordinate first.
    pub fn to_digits(&self) -> String {
        if self.field.order() <= 10 {
            self.entries
                .iter()
                .map(|&e| char::from_digit(e, 10).unwrap())
                .collect()
        } else {
            self.entries
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(",")
        }
    }

    fn pack(&self) -> Vec<u64> {
        let mut words = vec![0u64; self.len().div_ceil(64)];
        for (i, &e) in self.entries.iter().enumerate() {
            if e & 1 == 1 {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        words
    }

    fn unpack(field: Field, words: &[u64], len: usize) -> Vector {
        let entries = (0..len)
            .map(|i| ((words[i / 64] >> (i % 64)) & 1) as u32)
            .collect();
        Vector { field, entries }
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_digits())
    }
}

impl Add for &Vector {
    type Output = Vector;

    fn add(self, rhs: &Vector) -> Vector {
        debug_assert_eq!(self.len(), rhs.len());
        let f = self.field;
        Vector {
            field: f,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        }
    }
}

impl Sub for &Vector {
    type Output = Vector;

    fn sub(self, rhs: &Vector) -> Vector {
        debug_assert_eq!(self.len(), rhs.len());
        let f = self.field;
        Vector {
            field: f,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(&a, &b)| f.sub(a, b))
                .collect(),
        }
    }
}

impl Neg for &Vector {
    type Output = Vector;

    fn neg(self) -> Vector {
        let f = self.field;
        Vector {
            field: f,
            entries: self.entries.iter().map(|&a| f.neg(a)).collect(),
        }
    }
}

/// Row-major matrix over a prime field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

/// Output of [`Matrix::rref`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub reduced: Matrix,
    pub rank: usize,
    pub pivot_cols: Vec<usize>,
}

/// Which elimination kernel to run. Packed is only valid over GF(2).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Elimination {
    Packed,
    Digits,
}

impl Matrix {
    pub fn new(field: Field, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        let q = field.order();
        let data = data.into_iter().map(|e| e % q).collect();
        Ok(Matrix {
            field,
            rows,
            cols,
            data,
        })
    }

    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Stacks `rows` (all of length `cols`) into a matrix.
    pub fn from_rows(field: Field, cols: usize, rows: &[Vector]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::Dimension(format!(
                    "row {i} has length {}, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r.entries());
        }
        Self::new(field, rows.len(), cols, data)
    }

    /// Builds a matrix from digit strings, one per row.
    pub fn from_digit_rows(field: Field, rows: &[&str]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let vecs = rows
            .iter()
            .map(|r| Vector::from_digits(field, r))
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(field, cols, &vecs)
    }

    pub fn from_columns(field: Field, rows: usize, columns: &[Vector]) -> Result<Self> {
        let mut m = Self::zeros(field, rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::Dimension(format!(
                    "column {j} has length {}, expected {rows}",
                    c.len()
                )));
            }
            for i in 0..rows {
                m.data[i * m.cols + j] = c.get(i);
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: u32) {
        self.data[r * self.cols + c] = value % self.field.order();
    }

    pub fn row(&self, r: usize) -> Vector {
        Vector {
            field: self.field,
            entries: self.data[r * self.cols..(r + 1) * self.cols].to_vec(),
        }
    }

    pub fn column(&self, c: usize) -> Vector {
        Vector {
            field: self.field,
            entries: (0..self.rows).map(|r| self.get(r, c)).collect(),
        }
    }

    pub fn row_vectors(&self) -> Vec<Vector> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    /// `self · v` for a column vector `v`.
    pub fn mul_vec(&self, v: &Vector) -> Vector {
        debug_assert_eq!(v.len(), self.cols);
        Vector {
            field: self.field,
            entries: (0..self.rows).map(|r| self.row(r).dot(v)).collect(),
        }
    }

    /// Returns a copy with `row` inserted above the first row.
    pub fn prepend_row(&self, row: &Vector) -> Result<Matrix> {
        if row.len() != self.cols {
            return Err(Error::Dimension(format!(
                "row of length {} for a matrix with {} columns",
                row.len(),
                self.cols
            )));
        }
        let mut data = row.entries().to_vec();
        data.extend_from_slice(&self.data);
        Ok(Matrix {
            field: self.field,
            rows: self.rows + 1,
            cols: self.cols,
            data,
        })
    }

    pub fn rref(&self) -> Rref {
        if self.field.is_binary() {
            self.rref_with(Elimination::Packed)
        } else {
            self.rref_with(Elimination::Digits)
        }
    }

    pub(crate) fn rref_with(&self, kernel: Elimination) -> Rref {
        match kernel {
            Elimination::Packed => {
                assert!(self.field.is_binary(), "packed elimination needs GF(2)");
                self.rref_packed()
            }
            Elimination::Digits => self.rref_digits(),
        }
    }

    fn rref_digits(&self) -> Rref {
        let f = self.field;
        let mut a = self.clone();
        let mut rank = 0;
        let mut pivot_cols = Vec::new();
        for c in 0..a.cols {
            if rank == a.rows {
                break;
            }
            let Some(pr) = (rank..a.rows).find(|&r| a.get(r, c) != 0) else {
                continue;
            };
            a.swap_rows(rank, pr);
            let inv = f.inv(a.get(rank, c));
            for k in 0..a.cols {
                let v = f.mul(a.get(rank, k), inv);
                a.data[rank * a.cols + k] = v;
            }
            for r in 0..a.rows {
                if r == rank {
                    continue;
                }
                let factor = a.get(r, c);
                if factor == 0 {
                    continue;
                }
                for k in 0..a.cols {
                    let v = f.sub(a.get(r, k), f.mul(factor, a.get(rank, k)));
                    a.data[r * a.cols + k] = v;
                }
            }
            pivot_cols.push(c);
            rank += 1;
        }
        Rref {
            reduced: a,
            rank,
            pivot_cols,
        }
    }

    fn rref_packed(&self) -> Rref {
        let mut rows: Vec<Vec<u64>> = (0..self.rows).map(|r| self.row(r).pack()).collect();
        let mut rank = 0;
        let mut pivot_cols = Vec::new();
        for c in 0..self.cols {
            if rank == rows.len() {
                break;
            }
            let (w, bit) = (c / 64, 1u64 << (c % 64));
            let Some(pr) = (rank..rows.len()).find(|&r| rows[r][w] & bit != 0) else {
                continue;
            };
            rows.swap(rank, pr);
            let pivot = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row[w] & bit != 0 {
                    for (x, p) in row.iter_mut().zip(&pivot) {
                        *x ^= p;
                    }
                }
            }
            pivot_cols.push(c);
            rank += 1;
        }
        let mut data = Vec::with_capacity(self.rows * self.cols);
        for r in &rows {
            data.extend_from_slice(Vector::unpack(self.field, r, self.cols).entries());
        }
        Rref {
            reduced: Matrix {
                field: self.field,
                rows: self.rows,
                cols: self.cols,
                data,
            },
            rank,
            pivot_cols,
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.cols {
            self.data.swap(a * self.cols + k, b * self.cols + k);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Basis of the right kernel `{v : self · v = 0}`, one vector per free
    /// column in ascending column order.
    pub fn kernel_basis(&self) -> Vec<Vector> {
        let Rref {
            reduced,
            rank,
            pivot_cols,
        } = self.rref();
        let f = self.field;
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivot_cols {
            is_pivot[p] = true;
        }
        let mut basis = Vec::with_capacity(self.cols - rank);
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = Vector::zeros(f, self.cols);
            v.entries[free] = 1;
            for (r, &p) in pivot_cols.iter().enumerate() {
                v.entries[p] = f.neg(reduced.get(r, free));
            }
            basis.push(v);
        }
        basis
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            writeln!(f, "{}", self.row(r))?;
        }
        Ok(())
    }
}

/// A linear subspace of GF(q)^ambient, stored as its canonical RREF basis.
///
/// Two subspaces are equal exactly when their canonical bases are equal, so
/// the derived `Eq` is set equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    field: Field,
    ambient: usize,
    basis: Vec<Vector>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn span(field: Field, ambient: usize, vectors: &[Vector]) -> Self {
        if vectors.is_empty() {
            return Self::zero(field, ambient);
        }
        let m =
            Matrix::from_rows(field, ambient, vectors).expect("vectors share the ambient length");
        let rref = m.rref();
        let basis = (0..rref.rank).map(|r| rref.reduced.row(r)).collect();
        Subspace {
            field,
            ambient,
            basis,
            pivots: rref.pivot_cols,
        }
    }

    pub fn zero(field: Field, ambient: usize) -> Self {
        Subspace {
            field,
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: Field, ambient: usize) -> Self {
        let vs: Vec<_> = (0..ambient)
            .map(|i| Vector::unit(field, ambient, i))
            .collect();
        Self::span(field, ambient, &vs)
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }

    #[inline]
    pub fn ambient(&self) -> usize {
        self.ambient
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Canonical (RREF) basis.
    #[inline]
    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    /// Number of elements, `q^dim`.
    pub fn size(&self) -> u128 {
        pow_count(self.field.order(), self.dim())
    }

    /// Reduces `v` against the canonical basis; the remainder is zero iff
    /// `v` lies in the subspace.
    fn residual(&self, v: &Vector) -> Vector {
        let f = self.field;
        let mut r = v.clone();
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            let c = r.get(p);
            if c != 0 {
                for k in 0..self.ambient {
                    r.entries[k] = f.sub(r.entries[k], f.mul(c, b.get(k)));
                }
            }
        }
        r
    }

    pub fn contains(&self, v: &Vector) -> bool {
        v.len() == self.ambient && self.residual(v).is_zero()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|b| other.contains(b))
    }

    pub fn with_vector(&self, v: &Vector) -> Subspace {
        let mut vs = self.basis.clone();
        vs.push(v.clone());
        Self::span(self.field, self.ambient, &vs)
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut vs = self.basis.clone();
        vs.extend(other.basis.iter().cloned());
        Self::span(self.field, self.ambient, &vs)
    }

    pub fn intersection(&self, other: &Subspace) -> Subspace {
        if self.dim() == 0 || other.dim() == 0 {
            return Self::zero(self.field, self.ambient);
        }
        // Solve sum a_k u_k - sum b_l w_l = 0 and map (a, b) back through u.
        let mut cols: Vec<Vector> = self.basis.clone();
        cols.extend(other.basis.iter().map(|w| -w));
        let m = Matrix::from_columns(self.field, self.ambient, &cols).expect("consistent lengths");
        let du = self.dim();
        let vs: Vec<Vector> = m
            .kernel_basis()
            .iter()
            .map(|k| {
                let mut acc = Vector::zeros(self.field, self.ambient);
                for (coef, u) in k.entries()[..du].iter().zip(&self.basis) {
                    acc = &acc + &u.scale(*coef);
                }
                acc
            })
            .collect();
        Self::span(self.field, self.ambient, &vs)
    }

    /// All `q^dim` elements, sorted lexicographically.
    pub fn elements(&self, cap: usize) -> Result<Vec<Vector>> {
        check_cap("subspace elements", self.size(), cap)?;
        let q = self.field.order();
        let mut out = Vec::with_capacity(self.size() as usize);
        let mut coeffs = vec![0u32; self.dim()];
        loop {
            let mut v = Vector::zeros(self.field, self.ambient);
            for (c, b) in coeffs.iter().zip(&self.basis) {
                if *c != 0 {
                    v = &v + &b.scale(*c);
                }
            }
            out.push(v);
            // odometer increment
            let mut i = 0;
            loop {
                if i == coeffs.len() {
                    out.sort();
                    return Ok(out);
                }
                coeffs[i] += 1;
                if coeffs[i] < q {
                    break;
                }
                coeffs[i] = 0;
                i += 1;
            }
        }
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.basis.is_empty() {
            return write!(f, "{{0}}");
        }
        let parts: Vec<String> = self.basis.iter().map(|b| b.to_digits()).collect();
        write!(f, "span{{{}}}", parts.join(","))
    }
}

/// All vectors in the span of `basis`, sorted lexicographically.
///
/// `len` is the ambient length, needed when `basis` is empty.
pub fn enumerate_span(
    field: Field,
    len: usize,
    basis: &[Vector],
    cap: usize,
) -> Result<Vec<Vector>> {
    if let Some(bad) = basis.iter().find(|b| b.len() != len) {
        return Err(Error::Dimension(format!(
            "basis vector of length {} in ambient length {len}",
            bad.len()
        )));
    }
    check_cap("span", pow_count(field.order(), basis.len()), cap)?;
    Subspace::span(field, len, basis).elements(cap)
}

/// Whether `A x = b` has a solution, where `A` has rows `eqs`.
fn consistent(field: Field, width: usize, eqs: &[Vector], rhs: &[u32]) -> bool {
    let a = Matrix::from_rows(field, width, eqs).expect("consistent lengths");
    let aug: Vec<Vector> = eqs
        .iter()
        .zip(rhs)
        .map(|(e, &b)| e.concat(&Vector::new(field, vec![b])))
        .collect();
    let ab = Matrix::from_rows(field, width + 1, &aug).expect("consistent lengths");
    a.rank() == ab.rank()
}

/// The lexicographically smallest functional `phi` on GF(q)^ambient that
/// vanishes on the hyperplane and takes the value 1 on `alpha`.
pub fn functional_for(
    hyperplane_basis: &[Vector],
    alpha: &Vector,
    ambient_dim: usize,
) -> Result<Vector> {
    let field = alpha.field();
    if alpha.len() != ambient_dim || hyperplane_basis.iter().any(|b| b.len() != ambient_dim) {
        return Err(Error::Dimension(
            "functional inputs disagree on ambient length".into(),
        ));
    }
    let hyper = Subspace::span(field, ambient_dim, hyperplane_basis);
    if hyper.contains(alpha) {
        return precondition(format!("alpha {alpha} lies in the hyperplane {hyper}"));
    }
    let mut eqs: Vec<Vector> = hyper.basis().to_vec();
    let mut rhs = vec![0u32; eqs.len()];
    eqs.push(alpha.clone());
    rhs.push(1);
    let mut phi = Vec::with_capacity(ambient_dim);
    for j in 0..ambient_dim {
        eqs.push(Vector::unit(field, ambient_dim, j));
        let chosen = field.elements().find(|&val| {
            rhs.push(val);
            let ok = consistent(field, ambient_dim, &eqs, &rhs);
            rhs.pop();
            ok
        });
        let val = chosen.expect("system stays consistent while fixing coordinates greedily");
        rhs.push(val);
        phi.push(val);
    }
    Ok(Vector::new(field, phi))
}

/// Every codimension-one subspace of `span(space_basis)` that avoids `alpha`.
///
/// There are `q^(s-1)` of them for an `s`-dimensional space. They are ordered
/// by the lexicographic order of their separating functional
/// (see [`functional_for`]), which is the ordering used for automatic
/// hyperplane selection.
pub fn hyperplanes_avoiding(space_basis: &[Vector], alpha: &Vector) -> Result<Vec<Subspace>> {
    let field = alpha.field();
    let ambient = alpha.len();
    if space_basis.iter().any(|b| b.len() != ambient) {
        return Err(Error::Dimension(
            "space basis and alpha disagree on length".into(),
        ));
    }
    if alpha.is_zero() {
        return precondition("alpha must be nonzero");
    }
    let space = Subspace::span(field, ambient, space_basis);
    if !space.contains(alpha) {
        return precondition(format!("alpha {alpha} is not in the space {space}"));
    }
    let mut acc = Subspace::span(field, ambient, std::slice::from_ref(alpha));
    let mut complement = Vec::new();
    for b in space.basis() {
        if !acc.contains(b) {
            complement.push(b.clone());
            acc = acc.with_vector(b);
        }
    }
    let count = pow_count(field.order(), complement.len());
    check_cap("hyperplanes", count, DEFAULT_ENUMERATION_CAP)?;

    let q = field.order();
    let mut out = Vec::with_capacity(count as usize);
    let mut assignment = vec![0u32; complement.len()];
    loop {
        let vs: Vec<Vector> = complement
            .iter()
            .zip(&assignment)
            .map(|(b, &c)| b - &alpha.scale(c))
            .collect();
        let h = Subspace::span(field, ambient, &vs);
        let phi = functional_for(h.basis(), alpha, ambient)?;
        out.push((phi, h));
        let mut i = 0;
        loop {
            if i == assignment.len() {
                out.sort();
                return Ok(out.into_iter().map(|(_, h)| h).collect());
            }
            assignment[i] += 1;
            if assignment[i] < q {
                break;
            }
            assignment[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf2() -> Field {
        Field::binary()
    }

    fn v2(s: &str) -> Vector {
        Vector::from_digits(gf2(), s).unwrap()
    }

    #[test]
    fn field_rejects_composites() {
        assert_eq!(Field::new(4), Err(Error::InvalidField(4)));
        assert_eq!(Field::new(1), Err(Error::InvalidField(1)));
        assert!(Field::new(7).is_ok());
        let f = Field::new(7).unwrap();
        for a in 1..7 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
        }
    }

    #[test]
    fn rref_zero_matrix() {
        let m = Matrix::zeros(gf2(), 2, 4);
        let r = m.rref();
        assert_eq!(r.rank, 0);
        assert!(r.pivot_cols.is_empty());
        assert_eq!(r.reduced, m);
    }

    #[test]
    fn rref_identity() {
        let m = Matrix::identity(gf2(), 3);
        let r = m.rref();
        assert_eq!(r.rank, 3);
        assert_eq!(r.reduced, m);
    }

    #[test]
    fn rref_self_dual_code() {
        // [[0,1,1,0],[1,0,0,1]] needs one swap: rows become 1001 / 0110.
        let m = Matrix::from_digit_rows(gf2(), &["0110", "1001"]).unwrap();
        let r = m.rref();
        assert_eq!(r.rank, 2);
        assert_eq!(r.pivot_cols, vec![0, 1]);
        assert_eq!(
            r.reduced,
            Matrix::from_digit_rows(gf2(), &["1001", "0110"]).unwrap()
        );
        assert_eq!(m.rref_with(Elimination::Digits), r);
    }

    fn brute_kernel(m: &Matrix) -> Vec<Vector> {
        let n = m.cols();
        let all = Subspace::full(m.field(), n)
            .elements(DEFAULT_ENUMERATION_CAP)
            .unwrap();
        all.into_iter().filter(|v| m.mul_vec(v).is_zero()).collect()
    }

    #[test]
    fn kernel_of_self_dual_code() {
        let m = Matrix::from_digit_rows(gf2(), &["0110", "1001"]).unwrap();
        let basis = m.kernel_basis();
        let span = enumerate_span(gf2(), 4, &basis, DEFAULT_ENUMERATION_CAP).unwrap();
        let expected: Vec<Vector> = ["0000", "0110", "1001", "1111"]
            .iter()
            .map(|s| v2(s))
            .collect();
        assert_eq!(span, expected);
        assert_eq!(brute_kernel(&m), expected);
    }

    #[test]
    fn kernel_of_identity_is_trivial() {
        assert!(Matrix::identity(gf2(), 3).kernel_basis().is_empty());
    }

    #[test]
    fn kernel_of_hamming_code() {
        let h = Matrix::from_digit_rows(gf2(), &["1100101", "1110010", "0111001"]).unwrap();
        let basis = h.kernel_basis();
        assert_eq!(basis.len(), 4);
        let span = enumerate_span(gf2(), 7, &basis, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(span.len(), 16);
        assert_eq!(span, brute_kernel(&h));
    }

    #[test]
    fn enumerate_span_edge_cases() {
        let zero = enumerate_span(gf2(), 3, &[], DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(zero, vec![v2("000")]);
        let full =
            enumerate_span(gf2(), 2, &[v2("01"), v2("10")], DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(full.len(), 4);
        let err = enumerate_span(gf2(), 2, &[v2("01"), v2("10")], 3).unwrap_err();
        assert!(matches!(
            err,
            Error::CapExceeded {
                needed: 4,
                cap: 3,
                ..
            }
        ));
    }

    #[test]
    fn hyperplanes_in_the_plane() {
        let hs = hyperplanes_avoiding(&[v2("10"), v2("01")], &v2("01")).unwrap();
        let bases: Vec<Vec<Vector>> = hs.iter().map(|h| h.basis().to_vec()).collect();
        assert_eq!(bases, vec![vec![v2("10")], vec![v2("11")]]);
    }

    #[test]
    fn hyperplane_of_a_line_is_zero() {
        let hs = hyperplanes_avoiding(&[v2("01")], &v2("01")).unwrap();
        assert_eq!(hs.len(), 1);
        assert_eq!(hs[0].dim(), 0);
    }

    #[test]
    fn hyperplanes_of_gf2_cubed() {
        // Oracle: all 7 hyperplanes of GF(2)^3 are kernels of the 7 nonzero
        // functionals; exactly those with phi(alpha) = 1 avoid alpha.
        let full = Subspace::full(gf2(), 3);
        let all = full.elements(64).unwrap();
        for alpha in all.iter().filter(|a| !a.is_zero()) {
            let expected: Vec<Subspace> = all
                .iter()
                .filter(|phi| !phi.is_zero() && phi.dot(alpha) == 1)
                .map(|phi| {
                    let members: Vec<Vector> =
                        all.iter().filter(|v| phi.dot(v) == 0).cloned().collect();
                    Subspace::span(gf2(), 3, &members)
                })
                .collect();
            let got = hyperplanes_avoiding(full.basis(), alpha).unwrap();
            assert_eq!(got.len(), 4);
            for h in &expected {
                assert!(got.contains(h));
            }
        }
    }

    #[test]
    fn hyperplane_preconditions() {
        assert!(matches!(
            hyperplanes_avoiding(&[v2("10")], &v2("00")),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            hyperplanes_avoiding(&[v2("10")], &v2("01")),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn functionals_match_worked_examples() {
        assert_eq!(functional_for(&[v2("10")], &v2("01"), 2).unwrap(), v2("01"));
        assert_eq!(functional_for(&[v2("11")], &v2("01"), 2).unwrap(), v2("11"));
        let h = [v2("000"), v2("001"), v2("100"), v2("101")];
        assert_eq!(functional_for(&h, &v2("110"), 3).unwrap(), v2("010"));
        assert!(functional_for(&[v2("10")], &v2("10"), 2).is_err());
    }

    #[test]
    fn functional_over_gf3() {
        let f = Field::new(3).unwrap();
        let h = [Vector::new(f, vec![1, 1, 0])];
        let alpha = Vector::new(f, vec![0, 0, 2]);
        let phi = functional_for(&h, &alpha, 3).unwrap();
        assert_eq!(phi.dot(&h[0]), 0);
        assert_eq!(phi.dot(&alpha), 1);
        // smallest: phi = (0,0,2) since 2*2 = 4 = 1 mod 3
        assert_eq!(phi, Vector::new(f, vec![0, 0, 2]));
    }

    #[test]
    fn intersection_of_planes() {
        let a = Subspace::span(gf2(), 3, &[v2("100"), v2("010")]);
        let b = Subspace::span(gf2(), 3, &[v2("010"), v2("001")]);
        assert_eq!(a.intersection(&b), Subspace::span(gf2(), 3, &[v2("010")]));
    }

    fn arb_matrix(q: u32) -> impl Strategy<Value = Matrix> {
        (1usize..6, 1usize..9).prop_flat_map(move |(r, c)| {
            proptest::collection::vec(0..q, r * c)
                .prop_map(move |d| Matrix::new(Field::new(q).unwrap(), r, c, d).unwrap())
        })
    }

    proptest! {
        #[test]
        fn rref_is_idempotent(m in arb_matrix(3)) {
            let once = m.rref().reduced;
            prop_assert_eq!(once.rref().reduced, once.clone());
        }

        #[test]
        fn rank_nullity(m in arb_matrix(5)) {
            prop_assert_eq!(m.rank() + m.kernel_basis().len(), m.cols());
            for v in m.kernel_basis() {
                prop_assert!(m.mul_vec(&v).is_zero());
            }
        }

        #[test]
        fn packed_and_digit_elimination_agree(m in arb_matrix(2)) {
            prop_assert_eq!(m.rref_with(Elimination::Packed), m.rref_with(Elimination::Digits));
        }

        #[test]
        fn hyperplanes_exclude_alpha_multiples(m in arb_matrix(3)) {
            let field = m.field();
            let space = Subspace::span(field, m.cols(), &m.row_vectors());
            prop_assume!(space.dim() >= 1 && space.dim() <= 3);
            let alpha = space.basis()[space.dim() - 1].clone();
            let hs = hyperplanes_avoiding(space.basis(), &alpha).unwrap();
            prop_assert_eq!(hs.len() as u128, pow_count(3, space.dim() - 1));
            for h in &hs {
                prop_assert_eq!(h.dim() + 1, space.dim());
                prop_assert!(h.is_subspace_of(&space));
                let members = h.elements(DEFAULT_ENUMERATION_CAP).unwrap();
                for c in 1..3 {
                    prop_assert!(!members.contains(&alpha.scale(c)));
                }
            }
        }

        #[test]
        fn functional_separates_cosets(m in arb_matrix(3)) {
            let field = m.field();
            let space = Subspace::span(field, m.cols(), &m.row_vectors());
            prop_assume!(space.dim() >= 1 && space.dim() <= 3);
            let alpha = space.basis()[0].clone();
            for h in hyperplanes_avoiding(space.basis(), &alpha).unwrap() {
                let phi = functional_for(h.basis(), &alpha, m.cols()).unwrap();
                let big = h.with_vector(&alpha);
                for w in big.elements(DEFAULT_ENUMERATION_CAP).unwrap() {
                    prop_assert_eq!(phi.dot(&w) == 0, h.contains(&w));
                }
            }
        }
    }
}
