use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trellis_cli::decode::decode;
use trellis_cli::document::TrellisDocument;
use trellis_core::embedding::legal_specs;
use trellis_core::{
    bcjr, embed, Field, Matrix, ParityCheckMatrix, Trellis, Vector, DEFAULT_ENUMERATION_CAP,
};

fn random_code(rng: &mut ChaCha8Rng, q: u32) -> ParityCheckMatrix {
    let n = rng.gen_range(2..=7);
    let r = rng.gen_range(1..n);
    let data = (0..r * n).map(|_| rng.gen_range(0..q)).collect();
    ParityCheckMatrix::new(Matrix::new(Field::new(q).unwrap(), r, n, data).unwrap())
}

/// A conventional trellis and, when one exists, a tail-biting one.
fn trellises(rng: &mut ChaCha8Rng, h: &ParityCheckMatrix) -> Vec<Trellis> {
    let mut out = vec![bcjr(h).unwrap()];
    let specs = legal_specs(h, DEFAULT_ENUMERATION_CAP).unwrap();
    if !specs.is_empty() {
        let spec = &specs[rng.gen_range(0..specs.len())];
        out.push(embed(h, spec).unwrap().tbt);
    }
    out
}

fn nearest(t: &Trellis, r: &Vector) -> (usize, Vector) {
    t.represented_code(DEFAULT_ENUMERATION_CAP)
        .unwrap()
        .into_iter()
        .map(|c| ((0..r.len()).filter(|&i| c.get(i) != r.get(i)).count(), c))
        .min()
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decode_matches_exhaustive_search(seed in any::<u64>(), ternary in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = if ternary { 3 } else { 2 };
        let h = random_code(&mut rng, q);
        for t in trellises(&mut rng, &h) {
            let r = Vector::new(h.field(), (0..h.n()).map(|_| rng.gen_range(0..q)).collect());
            let d = decode(&t, &r).unwrap();
            let (dist, word) = nearest(&t, &r);
            prop_assert_eq!(d.distance, dist);
            prop_assert_eq!(d.codeword, word);
        }
    }

    #[test]
    fn documents_round_trip(seed in any::<u64>(), ternary in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_code(&mut rng, if ternary { 3 } else { 2 });
        for t in trellises(&mut rng, &h) {
            let doc = TrellisDocument::from_trellis(&t).unwrap();
            let back = TrellisDocument::from_json(&doc.to_json()).unwrap();
            prop_assert_eq!(&back, &doc);
            prop_assert_eq!(back.to_trellis().unwrap(), t);
        }
    }
}
