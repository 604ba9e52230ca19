use graphcode::code::{failure_sets, OracleDecoder};
use graphcode::double::DoublePrimeCode;
use graphcode::extreme::{check_extreme, construct_extreme};
use graphcode::{Error, ExtremeCode, Field, GraphCode, LabeledGraph, SingleParityCode, TripleCode};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gf(q: u32) -> Field {
    Field::new(q).unwrap()
}

fn random_info(code: &dyn GraphCode, seed: u64) -> Vec<u32> {
    let q = code.spec().field().order();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..code.info_len()).map(|_| rng.gen_range(0..q)).collect()
}

#[test]
fn dimension_matches_info_length() {
    let codes: Vec<Box<dyn GraphCode>> = vec![
        Box::new(SingleParityCode::new(9, &gf(3)).unwrap()),
        Box::new(DoublePrimeCode::new(11).unwrap()),
        Box::new(TripleCode::new(9, &gf(11)).unwrap()),
        Box::new(ExtremeCode::construct(6, &gf(3), 0).unwrap()),
    ];
    for c in &codes {
        assert_eq!(c.spec().dimension(), c.info_len(), "{}", c.spec().family());
    }
}

/// The oracle succeeds exactly when the erased columns are independent.
#[test]
fn rank_predicate_agrees_with_oracle() {
    let codes: Vec<Box<dyn GraphCode>> = vec![
        Box::new(SingleParityCode::new(6, &gf(2)).unwrap()),
        Box::new(DoublePrimeCode::new(7).unwrap()),
        Box::new(DoublePrimeCode::new(11).unwrap()),
        Box::new(TripleCode::new(7, &gf(8)).unwrap()),
        Box::new(TripleCode::new(10, &gf(11)).unwrap()),
        Box::new(ExtremeCode::construct(5, &gf(2), 0).unwrap()),
    ];
    for code in &codes {
        let spec = code.spec();
        let word = code.encode(&random_info(code.as_ref(), 1)).unwrap();
        for rho in 1..=3 {
            for failed in failure_sets(spec.n(), rho) {
                let predicted = spec.corrects(&failed).unwrap();
                let result = spec.oracle_decode(&word.apply_erasure(&failed).unwrap());
                match result {
                    Ok(r) => {
                        assert!(predicted, "{failed:?}");
                        assert_eq!(r.graph, word);
                    }
                    Err(e) => {
                        assert!(!predicted, "{failed:?}");
                        assert_eq!(e, Error::Underdetermined);
                    }
                }
            }
        }
    }
}

#[test]
fn oracle_reports_inconsistency() {
    let code = DoublePrimeCode::new(7).unwrap();
    let word = code.encode(&random_info(&code, 2)).unwrap();
    let mut g = word.apply_erasure(&[0]).unwrap();
    let e = graphcode::EdgeId::new(5, 4);
    let flipped = g.label(e).unwrap() ^ 1;
    g.set_label(e, flipped).unwrap();
    let oracle = OracleDecoder::new(code.spec(), g.erased_mask());
    assert_eq!(oracle.decode(&g).unwrap_err(), Error::Inconsistent);
}

fn double_case() -> impl Strategy<Value = (usize, usize, usize, u64)> {
    prop::sample::select(vec![5usize, 7, 11, 13, 17]).prop_flat_map(|n| (Just(n), 0..n, 0..n, any::<u64>()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn double_decodes_any_pair((n, a, b, seed) in double_case()) {
        prop_assume!(a != b);
        let code = DoublePrimeCode::new(n).unwrap();
        let word = code.encode(&random_info(&code, seed)).unwrap();
        let erased = word.apply_erasure(&[a, b]).unwrap();
        let r = code.decode(&erased).unwrap();
        prop_assert_eq!(&r.graph, &word);
        prop_assert_eq!(r.graph, code.spec().oracle_decode(&erased).unwrap().graph);
    }

    #[test]
    fn triple_decodes_any_triple(n in 5usize..14, picks in prop::collection::btree_set(0usize..13, 3), seed in any::<u64>()) {
        let failed: Vec<usize> = picks.into_iter().collect();
        prop_assume!(failed[2] < n);
        let q = graphcode::field::smallest_prime_power_at_least(n as u32 + 1).unwrap();
        let code = TripleCode::new(n, &gf(q)).unwrap();
        let word = code.encode(&random_info(&code, seed)).unwrap();
        let r = code.decode(&word.apply_erasure(&failed).unwrap()).unwrap();
        prop_assert_eq!(r.graph, word);
    }

    #[test]
    fn extreme_construction_valid(seed in any::<u64>(), q in prop::sample::select(vec![2u32, 3, 4, 5])) {
        let n = (q * q + q + 1) as usize;
        let gen = construct_extreme(n.min(12), &gf(q), seed).unwrap();
        prop_assert!(check_extreme(&gen));
    }

    #[test]
    fn single_decodes_any_node(n in 3usize..30, v in 0usize..30, seed in any::<u64>()) {
        prop_assume!(v < n);
        let code = SingleParityCode::new(n, &gf(7)).unwrap();
        let word = code.encode(&random_info(&code, seed)).unwrap();
        prop_assert_eq!(code.decode(&word.apply_erasure(&[v]).unwrap()).unwrap().graph, word);
    }

    #[test]
    fn file_format_preserves_erased_codewords(seed in any::<u64>(), a in 0usize..7, b in 0usize..7) {
        let code = TripleCode::new(7, &gf(8)).unwrap();
        let word = code.encode(&random_info(&code, seed)).unwrap();
        let erased = word.apply_erasure(&[a, b]).unwrap();
        let back = LabeledGraph::parse(&erased.to_text()).unwrap();
        prop_assert_eq!(&back, &erased);
        prop_assert_eq!(code.decode(&back).unwrap().graph, word);
    }
}
