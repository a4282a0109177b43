//! Acceptance suite. Prints one PASS/FAIL line per criterion with its
//! tolerance and exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::fmt::Debug;
use std::panic::{self, AssertUnwindSafe};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trellis_cli::decode::decode;
use trellis_core::bcjr::bcjr;
use trellis_core::codes::{hamming_7_4, self_dual_4_2};
use trellis_core::embedding::{
    dagger_matrix, dimension_drop_check, embed, legal_specs, predict_state_space, EmbeddingSpec,
};
use trellis_core::peakreduce::{classify_peak, has_binary_out_degrees, reduce_peak, PeakKind};
use trellis_core::search::{minimize_tbt, replay, SearchConfig};
use trellis_core::{Field, Matrix, ParityCheckMatrix, Trellis, Vector};

const CAP: usize = 1 << 20;
const SAMPLE_SEED: u64 = 0x5eed_0001;
const SAMPLE_SIZE: usize = 200;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn same<T: PartialEq + Debug>(what: &str, got: T, want: T) -> Result<(), String> {
    ensure(got == want, || {
        format!("{what}: got {got:?}, want {want:?}")
    })
}

fn bin(s: &str) -> Vector {
    Vector::from_digits(Field::binary(), s).unwrap()
}

fn matrix(rows: &[&str]) -> ParityCheckMatrix {
    ParityCheckMatrix::from_digit_rows(Field::binary(), rows).unwrap()
}

fn rows(h: &ParityCheckMatrix) -> Vec<String> {
    h.matrix()
        .row_vectors()
        .iter()
        .map(Vector::to_digits)
        .collect()
}

fn owned(rows: &[&str]) -> Vec<String> {
    rows.iter().map(|r| r.to_string()).collect()
}

fn spec(index: usize, alpha: &str, basis: &[&str]) -> EmbeddingSpec {
    let b: Vec<Vector> = basis.iter().map(|s| bin(s)).collect();
    EmbeddingSpec::new(index, bin(alpha), &b)
}

fn scp(t: &Trellis) -> Vec<u32> {
    t.scp().exact_values().expect("binary linear trellis")
}

/// Binary words of length n with zero syndrome, by brute force.
fn kernel_oracle(h: &ParityCheckMatrix) -> BTreeSet<Vector> {
    let n = h.n();
    (0u32..1 << n)
        .map(|x| {
            Vector::new(
                Field::binary(),
                (0..n).map(|j| (x >> (n - 1 - j)) & 1).collect(),
            )
        })
        .filter(|c| h.syndrome(c).is_zero())
        .collect()
}

fn code_of(t: &Trellis) -> BTreeSet<Vector> {
    t.represented_code(CAP).unwrap()
}

/// Seeded random binary parity check matrices with n <= 6.
fn sample() -> Vec<ParityCheckMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    (0..SAMPLE_SIZE)
        .map(|_| {
            let n = rng.gen_range(2..=6);
            let r = rng.gen_range(1..=n);
            let data = (0..r * n).map(|_| rng.gen_range(0..2)).collect();
            ParityCheckMatrix::new(Matrix::new(Field::binary(), r, n, data).unwrap())
        })
        .collect()
}

fn bcjr_fixtures() -> Outcome {
    let t = bcjr(&self_dual_4_2()).unwrap();
    same("(4,2) profile", scp(&t), vec![0, 1, 2, 1, 0])?;
    let h = hamming_7_4();
    let t = bcjr(&h).unwrap();
    same("(7,4) profile", scp(&t), vec![0, 1, 2, 3, 3, 2, 1, 0])?;
    let code = code_of(&t);
    same("(7,4) code size", code.len(), 16)?;
    same("(7,4) code vs kernel", code, kernel_oracle(&h))?;
    Ok("(4,2): 0 1 2 1 0; (7,4): 0 1 2 3 3 2 1 0 with the 16 kernel words".into())
}

fn embedding_matrices() -> Outcome {
    let h = self_dual_4_2();
    same(
        "(4,2) hyperplane {10}",
        rows(&dagger_matrix(&h, &spec(2, "01", &["10"])).unwrap()),
        owned(&["110000", "001100", "110011"]),
    )?;
    same(
        "(4,2) hyperplane {11}",
        rows(&dagger_matrix(&h, &spec(2, "01", &["11"])).unwrap()),
        owned(&["111000", "001100", "110011"]),
    )?;
    let h = hamming_7_4();
    same(
        "(7,4) alpha 110",
        rows(&dagger_matrix(&h, &spec(3, "110", &["001", "100"])).unwrap()),
        owned(&["111100000", "111001011", "111100101", "001110010"]),
    )?;
    let red = reduce_peak(&h).unwrap();
    let att = red.attempt.ok_or("reduce_peak found no embedding")?;
    same(
        "(7,4) peak reduction",
        rows(&att.result.h_dagger),
        owned(&["111100000", "111001011", "111100101", "101110011"]),
    )?;
    Ok("3x6, 3x6, 4x9 and the 4x9 peak-reduction matrix bit-exact".into())
}

fn embedding_trellises() -> Outcome {
    let h = self_dual_4_2();
    let t = embed(&h, &spec(2, "01", &["10"])).unwrap().tbt;
    same("(4,2) profile", scp(&t), vec![1, 0, 1, 0])?;
    same(
        "(4,2) code",
        code_of(&t),
        ["0000", "0110", "1001", "1111"]
            .iter()
            .map(|s| bin(s))
            .collect(),
    )?;
    let alt = embed(&h, &spec(2, "01", &["11"])).unwrap().tbt;
    same("(4,2) alternate profile", scp(&alt), vec![1, 1, 1, 1])?;
    let h = hamming_7_4();
    let t = embed(&h, &spec(3, "110", &["001", "100"])).unwrap().tbt;
    same("(7,4) s_max", t.scp().s_max(), Some(2))?;
    same("(7,4) |class 0|", t.class_size(0), 2)?;
    same("(7,4) code", code_of(&t), kernel_oracle(&h))?;
    Ok("1 0 1 0 / 1 1 1 1 on (4,2); s_max 2, |V_0| = 2, 16 words on (7,4)".into())
}

fn double_embeddings() -> Outcome {
    let small = matrix(&["11110000", "01100000", "10011001", "01100110"]);
    same(
        "4x8 dim at class 4",
        bcjr(&small).unwrap().scp().values()[4],
        Some(0),
    )?;
    let large = matrix(&[
        "10001000000",
        "01111000000",
        "11110010111",
        "01111001010",
        "10011100101",
    ]);
    let v = bcjr(&large).unwrap().scp().values();
    same(
        "5x11 dims at classes 5, 6",
        (v[5], v[6]),
        (Some(1), Some(1)),
    )?;
    Ok("dim V_4 = 0 (4x8); dim V_5 = dim V_6 = 1 (5x11)".into())
}

fn embedded_trellises_are_minimal() -> Outcome {
    let mut specs = 0;
    for h in sample() {
        let code = kernel_oracle(&h);
        for s in legal_specs(&h, CAP).unwrap() {
            let t = embed(&h, &s).unwrap().tbt;
            let ctx = || format!("{h} {s:?}");
            ensure(t.is_linear(CAP).unwrap(), || {
                format!("not linear: {}", ctx())
            })?;
            ensure(!t.is_mergeable(CAP).unwrap(), || {
                format!("mergeable: {}", ctx())
            })?;
            ensure(t.is_biproper(), || format!("not biproper: {}", ctx()))?;
            ensure(t.is_reduced(), || format!("not reduced: {}", ctx()))?;
            ensure(code_of(&t) == code, || format!("code differs: {}", ctx()))?;
            specs += 1;
        }
    }
    Ok(format!(
        "{SAMPLE_SIZE} codes, {specs} embeddings, 0 failures"
    ))
}

fn state_prediction() -> Outcome {
    let mut codes = sample();
    codes.push(self_dual_4_2());
    codes.push(hamming_7_4());
    let mut checks = 0;
    for h in codes {
        let t = bcjr(&h).unwrap();
        for s in legal_specs(&h, CAP).unwrap() {
            let res = embed(&h, &s).unwrap();
            for r in 1..h.n() - s.index {
                let p = predict_state_space(&t, &s, r).unwrap();
                let got: BTreeSet<Vector> = p.space.elements(CAP).unwrap().into_iter().collect();
                let want: BTreeSet<Vector> = res
                    .tbt
                    .labels(s.index + r)
                    .unwrap()
                    .iter()
                    .cloned()
                    .collect();
                ensure(got == want, || {
                    format!("{h} {s:?} r={r}: predicted {}", p.space)
                })?;
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} (spec, offset) pairs, set equality"))
}

fn dimension_drop() -> Outcome {
    let mut specs = 0;
    for h in sample() {
        let t = bcjr(&h).unwrap();
        for s in legal_specs(&h, CAP).unwrap() {
            let res = embed(&h, &s).unwrap();
            ensure(dimension_drop_check(&t, &s, &res), || format!("{h} {s:?}"))?;
            specs += 1;
        }
    }
    Ok(format!("{specs} embeddings drop exactly one dimension"))
}

fn out_degrees() -> Outcome {
    for h in sample() {
        let t = bcjr(&h).unwrap();
        ensure(has_binary_out_degrees(&t), || {
            format!("{h}: {:?}", t.out_degree_profile())
        })?;
    }
    Ok(format!(
        "{SAMPLE_SIZE} trellises, every class uniform with degree 1 or 2"
    ))
}

fn peak_reduction() -> Outcome {
    let h = hamming_7_4();
    let red = reduce_peak(&h).unwrap();
    let att = red.attempt.ok_or("no attempt on (7,4)")?;
    same("(7,4) s_max", (red.before, att.after), (3, 2))?;
    same("(7,4) code", code_of(&att.result.tbt), kernel_oracle(&h))?;

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
    let mut guarded = 0;
    for _ in 0..50_000 {
        if guarded == 100 {
            break;
        }
        let n = rng.gen_range(4..=8);
        let r = rng.gen_range(2..=n - 1);
        let data = (0..r * n).map(|_| rng.gen_range(0..2)).collect();
        let h = ParityCheckMatrix::new(Matrix::new(Field::binary(), r, n, data).unwrap());
        let t = bcjr(&h).unwrap();
        let Some(pat) = classify_peak(&t).unwrap() else {
            continue;
        };
        if pat.kind != PeakKind::Single || !pat.guard.holds() {
            continue;
        }
        guarded += 1;
        let red = reduce_peak(&h).unwrap();
        let after = red.attempt.as_ref().map(|a| a.after);
        same(&format!("{h} s_max"), after, Some(red.before - 1))?;
        same(
            &format!("{h} code"),
            code_of(&red.attempt.unwrap().result.tbt),
            kernel_oracle(&h),
        )?;
    }
    ensure(guarded == 100, || {
        format!("only {guarded} guarded single-peak codes found")
    })?;
    Ok("(7,4): 3 -> 2; 100 guarded single-peak codes (n <= 8) all drop by 1".into())
}

fn isomorphic_embeddings() -> Outcome {
    let h = self_dual_4_2();
    let ts: Vec<Trellis> = [
        spec(1, "01", &[]),
        spec(2, "01", &["10"]),
        spec(3, "01", &[]),
    ]
    .iter()
    .map(|s| embed(&h, s).unwrap().tbt)
    .collect();
    for i in 0..3 {
        for j in i + 1..3 {
            ensure(ts[i].isomorphic(&ts[j]), || {
                format!("embeddings {i} and {j} differ")
            })?;
        }
    }
    Ok("indices 1, 2, 3 with alpha 01 pairwise isomorphic".into())
}

fn search() -> Outcome {
    let cfg = SearchConfig::default().with_max_embeddings(1);
    let mut reached = Vec::new();
    for h in [self_dual_4_2(), hamming_7_4()] {
        let a = minimize_tbt(&h, &cfg).unwrap();
        let b = minimize_tbt(&h, &cfg).unwrap();
        same(
            "determinism",
            (&a.best.trace, &a.explored),
            (&b.best.trace, &b.explored),
        )?;
        same(
            "replay",
            replay(&h, &a.best.trace).unwrap(),
            a.best.tbt.clone(),
        )?;
        same("code", code_of(&a.best.tbt), kernel_oracle(&h))?;
        reached.push(a.best.scp().s_max());
    }
    same("s_max reached", reached, vec![Some(1), Some(2)])?;
    Ok("(4,2) -> 1, (7,4) -> 2, deterministic, replay exact".into())
}

fn decoding() -> Outcome {
    let sd = self_dual_4_2();
    let hm = hamming_7_4();
    let fixtures = vec![
        bcjr(&sd).unwrap(),
        bcjr(&hm).unwrap(),
        embed(&sd, &spec(2, "01", &["10"])).unwrap().tbt,
        embed(&sd, &spec(2, "01", &["11"])).unwrap().tbt,
        embed(&hm, &spec(3, "110", &["001", "100"])).unwrap().tbt,
        reduce_peak(&hm).unwrap().attempt.unwrap().result.tbt,
    ];
    let nearest = |t: &Trellis, r: &Vector| {
        code_of(t)
            .into_iter()
            .map(|c| ((0..r.len()).filter(|&i| c.get(i) != r.get(i)).count(), c))
            .min()
            .unwrap()
    };
    let check = |t: &Trellis, r: &Vector| -> Result<(), String> {
        let d = decode(t, r).map_err(|e| e.to_string())?;
        same(
            &format!("decode {r}"),
            (d.distance, d.codeword),
            nearest(t, r),
        )
    };
    let mut words = 0;
    for t in &fixtures {
        for c in code_of(t) {
            check(t, &c)?;
            words += 1;
        }
        check(t, &Vector::zeros(Field::binary(), t.depth()))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0012);
    for _ in 0..100 {
        let t = &fixtures[rng.gen_range(0..fixtures.len())];
        let code: Vec<Vector> = code_of(t).into_iter().collect();
        let mut e = code[rng.gen_range(0..code.len())].entries().to_vec();
        let pos = rng.gen_range(0..e.len());
        e[pos] ^= 1;
        check(t, &Vector::new(Field::binary(), e))?;
    }
    Ok(format!(
        "{} fixtures, {words} codewords, 100 single errors, 0 mismatches",
        fixtures.len()
    ))
}

struct Criterion {
    name: &'static str,
    tolerance: &'static str,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion {
            name: "conventional trellis fixtures",
            tolerance: "exact",
            run: bcjr_fixtures,
        },
        Criterion {
            name: "extended parity check matrices",
            tolerance: "bit-exact",
            run: embedding_matrices,
        },
        Criterion {
            name: "tail-biting trellis fixtures",
            tolerance: "exact",
            run: embedding_trellises,
        },
        Criterion {
            name: "double embedding state dimensions",
            tolerance: "exact",
            run: double_embeddings,
        },
        Criterion {
            name: "embedded trellises are minimal",
            tolerance: "zero failures",
            run: embedded_trellises_are_minimal,
        },
        Criterion {
            name: "state space prediction",
            tolerance: "set equality",
            run: state_prediction,
        },
        Criterion {
            name: "dimension drop at the index",
            tolerance: "exactly 1",
            run: dimension_drop,
        },
        Criterion {
            name: "out-degrees one or two",
            tolerance: "zero failures",
            run: out_degrees,
        },
        Criterion {
            name: "peak reduction",
            tolerance: "exactly 1",
            run: peak_reduction,
        },
        Criterion {
            name: "equivalent embeddings isomorphic",
            tolerance: "exact",
            run: isomorphic_embeddings,
        },
        Criterion {
            name: "embedding search",
            tolerance: "exact",
            run: search,
        },
        Criterion {
            name: "tail-biting decoding",
            tolerance: "zero mismatches",
            run: decoding,
        },
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let (status, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "criterion {:>2} {status} [{}] {}: {detail}",
            i + 1,
            c.tolerance,
            c.name
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
