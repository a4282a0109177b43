#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;
use trellis_core::bcjr::ParityCheckMatrix;
use trellis_core::galois::{Field, Matrix, Vector};
use trellis_core::trellis::{Edge, Shape, Trellis};

pub const CAP: usize = 1 << 20;

pub fn bin(s: &str) -> Vector {
    Vector::from_digits(Field::binary(), s).unwrap()
}

pub fn matrix(rows: &[&str]) -> ParityCheckMatrix {
    ParityCheckMatrix::from_digit_rows(Field::binary(), rows).unwrap()
}

pub fn rows(h: &ParityCheckMatrix) -> Vec<String> {
    h.matrix()
        .row_vectors()
        .iter()
        .map(Vector::to_digits)
        .collect()
}

/// All words of length n over GF(q) with zero syndrome, by brute force.
pub fn kernel_oracle(h: &ParityCheckMatrix) -> BTreeSet<Vector> {
    let f = h.field();
    let q = f.order() as u64;
    let n = h.n();
    (0..q.pow(n as u32))
        .map(|mut x| {
            let mut e = vec![0u32; n];
            for slot in e.iter_mut().rev() {
                *slot = (x % q) as u32;
                x /= q;
            }
            Vector::new(f, e)
        })
        .filter(|c| {
            (0..h.r()).all(|row| {
                (0..n).fold(0u32, |acc, j| {
                    f.add(acc, f.mul(h.matrix().get(row, j), c.get(j)))
                }) == 0
            })
        })
        .collect()
}

pub fn random_binary_matrix(
    rng: &mut impl Rng,
    max_r: usize,
    n_range: std::ops::RangeInclusive<usize>,
) -> ParityCheckMatrix {
    let n = rng.gen_range(n_range);
    let r = rng.gen_range(1..=max_r.min(n));
    let data = (0..r * n).map(|_| rng.gen_range(0..2)).collect();
    ParityCheckMatrix::new(Matrix::new(Field::binary(), r, n, data).unwrap())
}

/// Mergeability by trying every merger and re-enumerating the code.
pub fn brute_force_mergeable(t: &Trellis) -> bool {
    let code = t.represented_code(CAP).unwrap();
    (0..t.num_classes()).any(|c| {
        let size = t.class_size(c);
        (0..size).any(|a| {
            (a + 1..size).any(|b| {
                t.merge_vertices(c, a, b)
                    .unwrap()
                    .represented_code(CAP)
                    .unwrap()
                    == code
            })
        })
    })
}

/// A random (not necessarily linear or reduced) binary trellis.
pub fn random_trellis(rng: &mut impl Rng, shape: Shape) -> Trellis {
    let n = rng.gen_range(2..=5);
    let classes = if shape == Shape::Conventional {
        n + 1
    } else {
        n
    };
    let sizes: Vec<usize> = (0..classes)
        .map(|c| {
            if shape == Shape::Conventional && (c == 0 || c == n) {
                1
            } else {
                rng.gen_range(1..=3)
            }
        })
        .collect();
    let sections = (0..n)
        .map(|i| {
            let next = sizes[(i + 1) % classes];
            let mut sec = Vec::new();
            for from in 0..sizes[i] {
                for symbol in 0..2 {
                    for to in 0..next {
                        if rng.gen_bool(0.45) {
                            sec.push(Edge::new(from, symbol, to));
                        }
                    }
                }
            }
            sec
        })
        .collect();
    Trellis::new(Field::binary(), shape, sizes, sections, None).unwrap()
}

/// Same trellis with vertex indices shuffled inside every class.
pub fn shuffle_vertices(rng: &mut impl Rng, t: &Trellis) -> Trellis {
    use rand::seq::SliceRandom;
    let perms: Vec<Vec<usize>> = t
        .class_sizes()
        .iter()
        .map(|&s| {
            let mut p: Vec<usize> = (0..s).collect();
            p.shuffle(rng);
            p
        })
        .collect();
    let num = t.num_classes();
    let sections = t
        .sections()
        .iter()
        .enumerate()
        .map(|(i, sec)| {
            sec.iter()
                .map(|e| Edge::new(perms[i][e.from], e.symbol, perms[(i + 1) % num][e.to]))
                .collect()
        })
        .collect();
    Trellis::new(
        t.field(),
        t.shape(),
        t.class_sizes().to_vec(),
        sections,
        None,
    )
    .unwrap()
}
