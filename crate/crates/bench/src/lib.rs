//! Fixtures shared by the benchmarks: one code per family and a random
//! codeword with a failure pattern applied.

use graphcode::double::DoublePrimeCode;
use graphcode::{ExtremeCode, Field, GraphCode, LabeledGraph, SingleParityCode, TripleCode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Fixture {
    pub name: &'static str,
    pub code: Box<dyn GraphCode>,
    pub info: Vec<u32>,
    pub word: LabeledGraph,
    pub erased: LabeledGraph,
}

impl Fixture {
    fn new(name: &'static str, code: Box<dyn GraphCode>, failed: &[usize], seed: u64) -> Self {
        let q = code.spec().field().order();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let info: Vec<u32> = (0..code.info_len()).map(|_| rng.gen_range(0..q)).collect();
        let word = code.encode(&info).expect("encode");
        let erased = word.apply_erasure(failed).expect("erase");
        Self { name, code, info, word, erased }
    }
}

pub fn single(n: usize, q: u32) -> Fixture {
    let code = SingleParityCode::new(n, &Field::new(q).unwrap()).unwrap();
    Fixture::new("single", Box::new(code), &[n / 2], 1)
}

pub fn double(n: usize) -> Fixture {
    let code = DoublePrimeCode::new(n).unwrap();
    Fixture::new("double", Box::new(code), &[1, n / 2], 2)
}

pub fn triple(n: usize, q: u32) -> Fixture {
    let code = TripleCode::new(n, &Field::new(q).unwrap()).unwrap();
    Fixture::new("triple", Box::new(code), &[0, n / 2, n - 1], 3)
}

pub fn extreme(n: usize, q: u32) -> Fixture {
    let code = ExtremeCode::construct(n, &Field::new(q).unwrap(), 0).unwrap();
    let failed: Vec<usize> = (2..n).collect();
    Fixture::new("extreme", Box::new(code), &failed, 4)
}
