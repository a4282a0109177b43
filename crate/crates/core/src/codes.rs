//! Small parity-check matrices used throughout examples and tests.

use crate::bcjr::ParityCheckMatrix;
use crate::galois::{Field, Matrix};

/// The (7,4) binary Hamming code.
pub fn hamming_7_4() -> ParityCheckMatrix {
    ParityCheckMatrix::from_digit_rows(Field::binary(), &["1100101", "1110010", "0111001"])
        .expect("valid digits")
}

/// The (4,2) binary code {0000, 0110, 1001, 1111}.
pub fn self_dual_4_2() -> ParityCheckMatrix {
    ParityCheckMatrix::from_digit_rows(Field::binary(), &["0110", "1001"]).expect("valid digits")
}

/// The binary repetition code of length `n >= 2`.
pub fn repetition(n: usize) -> ParityCheckMatrix {
    assert!(n >= 2, "repetition code needs length at least 2");
    let mut m = Matrix::zeros(Field::binary(), n - 1, n);
    for r in 0..n - 1 {
        m.set(r, 0, 1);
        m.set(r, r + 1, 1);
    }
    ParityCheckMatrix::new(m)
}
