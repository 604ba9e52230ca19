//! Dimension-3 codes that survive the loss of all but two nodes.
//!
//! A `3 × C(n+1, 2)` generator matrix with columns `g_{i,j}` recovers the
//! message from nodes `i` and `j` alone exactly when `g_{i,i}`, `g_{i,j}`,
//! `g_{j,j}` are linearly independent. Such a matrix exists iff the
//! projective plane over GF(q) has at least `n` points.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::code::{Constraint, DecodeReport, Family, GraphCode, GraphCodeSpec, Recovery, Stage};
use crate::error::{Error, Result};
use crate::field::{Field, FieldElement, FieldMatrix};
use crate::graph::{edge_count, EdgeId, LabeledGraph};

type Col = [FieldElement; 3];

#[derive(Clone, Debug, PartialEq)]
pub struct ExtremeGenerator {
    n: usize,
    field: Field,
    g: FieldMatrix,
}

impl ExtremeGenerator {
    pub fn new(n: usize, field: &Field, g: FieldMatrix) -> Result<Self> {
        if g.rows() != 3 || g.cols() != edge_count(n) {
            return Err(Error::Shape(format!("generator must be 3 x {}", edge_count(n))));
        }
        if let Some(&bad) = g.data().iter().find(|&&v| !field.contains(v)) {
            return Err(Error::NotInField { value: bad, q: field.order() });
        }
        Ok(Self { n, field: field.clone(), g })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn matrix(&self) -> &FieldMatrix {
        &self.g
    }

    pub fn column(&self, e: EdgeId) -> Col {
        let k = e.index();
        [self.g.get(0, k), self.g.get(1, k), self.g.get(2, k)]
    }

    /// `u · G` as a labeled graph.
    pub fn encode(&self, u: &[FieldElement]) -> Result<LabeledGraph> {
        if u.len() != 3 {
            return Err(Error::InfoLength { expected: 3, got: u.len() });
        }
        for &v in u {
            self.field.check(v)?;
        }
        LabeledGraph::from_labels(self.n, &self.field, self.g.vec_mul(&self.field, u)?)
    }

    /// JSON with the field string and the three rows.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Rec<'a> {
            n: usize,
            field: String,
            rows: Vec<&'a [FieldElement]>,
        }
        let rows = (0..3).map(|r| self.g.row(r)).collect();
        serde_json::to_string(&Rec { n: self.n, field: self.field.to_string(), rows }).expect("generator serializes")
    }
}

fn pair_ok(f: &Field, g: &FieldMatrix, i: usize, j: usize) -> bool {
    let col = |e: EdgeId| {
        let k = e.index();
        [g.get(0, k), g.get(1, k), g.get(2, k)]
    };
    f.det3(col(EdgeId::new(i, i)), col(EdgeId::new(j, i)), col(EdgeId::new(j, j))) != 0
}

fn matrix_ok(f: &Field, g: &FieldMatrix, n: usize) -> bool {
    (0..n).all(|j| (0..j).all(|i| pair_ok(f, g, i, j)))
}

pub fn check_extreme(gen: &ExtremeGenerator) -> bool {
    matrix_ok(&gen.field, &gen.g, gen.n)
}

/// Number of points of the projective plane over GF(q).
fn plane_points(q: u64) -> u64 {
    q * q + q + 1
}

pub fn exists_extreme(n: usize, q: u32) -> bool {
    plane_points(q as u64) > n as u64 - 1
}

/// The vector with base-`q` digits of `code` (least significant first).
fn digits(code: u64, q: u32) -> Col {
    let q = q as u64;
    [(code % q) as u32, (code / q % q) as u32, (code / (q * q)) as u32]
}

/// Canonical projective representatives (first nonzero coordinate 1) in
/// increasing code order.
fn projective_points(q: u32) -> impl Iterator<Item = Col> {
    (1..(q as u64).pow(3)).map(move |c| digits(c, q)).filter(|v| v.iter().find(|&&x| x != 0) == Some(&1))
}

pub fn construct_extreme(n: usize, field: &Field, seed: u64) -> Result<ExtremeGenerator> {
    let q = field.order();
    if n < 3 {
        return Err(Error::NodeCount(n));
    }
    if !exists_extreme(n, q) {
        return Err(Error::NoSuchCode { n, q });
    }
    let mut g = FieldMatrix::zeros(3, edge_count(n));
    let put = |g: &mut FieldMatrix, e: EdgeId, v: Col| {
        for (r, x) in v.into_iter().enumerate() {
            g.set(r, e.index(), x);
        }
    };
    for (i, p) in projective_points(q).take(n).enumerate() {
        put(&mut g, EdgeId::new(i, i), p);
    }
    let diag = |g: &FieldMatrix, i: usize| {
        let k = EdgeId::new(i, i).index();
        [g.get(0, k), g.get(1, k), g.get(2, k)]
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = (q as u64).pow(3);
    for j in 0..n {
        for i in 0..j {
            let (a, b) = (diag(&g, i), diag(&g, j));
            let v = if seed == 0 {
                (1..total).map(|c| digits(c, q)).find(|&v| field.det3(a, v, b) != 0)
            } else {
                std::iter::repeat_with(|| [rng.gen_range(0..q), rng.gen_range(0..q), rng.gen_range(0..q)])
                    .find(|&v| field.det3(a, v, b) != 0)
            };
            put(&mut g, EdgeId::new(j, i), v.expect("distinct points leave room outside their span"));
        }
    }
    ExtremeGenerator::new(n, field, g)
}

/// Recovers the message from the three labels that survive when only
/// nodes `i` and `j` remain.
pub fn decode_extreme(
    gen: &ExtremeGenerator,
    i: usize,
    j: usize,
    c_ii: FieldElement,
    c_ij: FieldElement,
    c_jj: FieldElement,
) -> Result<[FieldElement; 3]> {
    let (i, j) = (i.min(j), i.max(j));
    if j >= gen.n {
        return Err(Error::NodeOutOfRange { node: j, n: gen.n });
    }
    let rows = [gen.column(EdgeId::new(i, i)), gen.column(EdgeId::new(j, i)), gen.column(EdgeId::new(j, j))];
    let a = FieldMatrix::from_rows(&rows)?;
    let u = crate::field::solve(&gen.field, &a, &[c_ii, c_ij, c_jj]).map_err(|_| Error::SingularSystem(i, j))?;
    Ok([u[0], u[1], u[2]])
}

#[derive(Clone, Debug)]
pub struct ExtremeCode {
    gen: ExtremeGenerator,
    spec: GraphCodeSpec,
}

impl ExtremeCode {
    pub fn new(gen: ExtremeGenerator) -> Result<Self> {
        let h = gen.g.null_space(&gen.field);
        let rows = h.rows();
        let spec = GraphCodeSpec::with_row_labels(
            gen.n,
            &gen.field,
            h,
            vec![Constraint::System; rows],
            Family::Extreme,
            None,
        )?;
        Ok(Self { gen, spec })
    }

    pub fn construct(n: usize, field: &Field, seed: u64) -> Result<Self> {
        Self::new(construct_extreme(n, field, seed)?)
    }

    pub fn generator(&self) -> &ExtremeGenerator {
        &self.gen
    }

    fn check_input(&self, g: &LabeledGraph) -> Result<()> {
        if g.field() != &self.gen.field {
            return Err(Error::FieldMismatch);
        }
        if g.n() != self.gen.n {
            return Err(Error::Shape(format!("graph on {} nodes, code on {}", g.n(), self.gen.n)));
        }
        Ok(())
    }

    /// Message recovery through the first two surviving nodes, followed by
    /// re-encoding. Other erasure shapes go to the oracle.
    pub fn decode_message(&self, g: &LabeledGraph) -> Result<[FieldElement; 3]> {
        self.check_input(g)?;
        let failed = g.failure_pattern().ok_or(Error::Underdetermined)?;
        let mut alive = (0..g.n()).filter(|v| !failed.contains(v));
        let (Some(i), Some(j)) = (alive.next(), alive.next()) else {
            return Err(Error::Underdetermined);
        };
        let l = |a, b| g.label(EdgeId::new(a, b));
        decode_extreme(&self.gen, i, j, l(i, i)?, l(j, i)?, l(j, j)?)
    }
}

impl GraphCode for ExtremeCode {
    fn spec(&self) -> &GraphCodeSpec {
        &self.spec
    }

    fn info_len(&self) -> usize {
        3
    }

    fn encode(&self, info: &[FieldElement]) -> Result<LabeledGraph> {
        self.gen.encode(info)
    }

    fn decode(&self, g: &LabeledGraph) -> Result<DecodeReport> {
        self.check_input(g)?;
        let usable = g.failure_pattern().is_some_and(|f| f.len() + 2 <= g.n());
        if !usable {
            return self.spec.oracle_decode(g);
        }
        let u = self.decode_message(g)?;
        let word = self.gen.encode(&u)?;
        let mut provenance = Vec::new();
        for k in 0..word.labels().len() {
            let e = EdgeId::from_index(k);
            if g.is_erased(e) {
                provenance.push(Recovery {
                    edge: e,
                    constraint: Constraint::Generator,
                    stage: Stage::Message,
                    t: None,
                });
            } else if g.labels()[k] != word.labels()[k] {
                return Err(Error::CorruptedInput);
            }
        }
        Ok(DecodeReport { graph: word, provenance })
    }
}

/// `q^{2 C(n,2)} (q-1)^{C(n+1,2)} (q^2+q+1)! / (q^2+q+1-n)!`: the number of
/// valid generator matrices.
pub fn count_extreme_formula(n: usize, q: u32) -> Result<BigUint> {
    if !exists_extreme(n, q) {
        return Err(Error::NoSuchCode { n, q });
    }
    let qb = BigUint::from(q);
    let pairs = (n * (n - 1) / 2) as u32;
    let mut out = qb.pow(2 * pairs) * (&qb - 1u32).pow(edge_count(n) as u32);
    let points = plane_points(q as u64);
    for k in 0..n as u64 {
        out *= points - k;
    }
    Ok(out)
}

/// `|GL_3(q)|`, the number of generator matrices per code.
pub fn gl3_order(q: u32) -> BigUint {
    let q3 = BigUint::from(q).pow(3);
    (&q3 - 1u32) * (&q3 - q) * (&q3 - q * q)
}

/// Valid matrices up to change of message basis.
pub fn count_extreme_codes(n: usize, q: u32) -> Result<BigUint> {
    Ok(count_extreme_formula(n, q)? / gl3_order(q))
}

/// Upper limit on `q^{3 C(n+1,2)}` for exhaustive counting.
pub const EXHAUSTIVE_LIMIT: u128 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMode {
    Exhaustive,
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CountResult {
    Exhaustive { total: u128, valid: u64 },
    MonteCarlo { samples: u64, accepted: u64, rate: f64, std_error: f64 },
}

fn candidate_total(n: usize, q: u32) -> Option<u128> {
    (q as u128).checked_pow(3 * edge_count(n) as u32)
}

/// Fraction of all `3 × C(n+1,2)` matrices that are valid, from the formula.
pub fn formula_rate(n: usize, q: u32) -> Result<f64> {
    let valid = count_extreme_formula(n, q)?;
    let total = BigUint::from(q).pow(3 * edge_count(n) as u32);
    // both fit comfortably in f64 range for the sizes this is used at
    let ratio = valid * BigUint::from(1u64 << 53) / total;
    Ok(ratio.to_u64_digits().first().copied().unwrap_or(0) as f64 / (1u64 << 53) as f64)
}

const SHARD: u64 = 1 << 14;

pub fn count_extreme_bruteforce(n: usize, field: &Field, mode: CountMode) -> Result<CountResult> {
    let q = field.order();
    let cols = edge_count(n);
    match mode {
        CountMode::Exhaustive => {
            let total = candidate_total(n, q)
                .filter(|&t| t <= EXHAUSTIVE_LIMIT)
                .ok_or_else(|| Error::TooLarge(candidate_total(n, q).unwrap_or(u128::MAX)))?;
            let valid = (0..total as u64)
                .into_par_iter()
                .filter(|&w| {
                    let mut w = w;
                    let mut g = FieldMatrix::zeros(3, cols);
                    for k in 0..3 * cols {
                        g.set(k % 3, k / 3, (w % q as u64) as u32);
                        w /= q as u64;
                    }
                    matrix_ok(field, &g, n)
                })
                .count() as u64;
            Ok(CountResult::Exhaustive { total, valid })
        }
        CountMode::MonteCarlo { samples, seed } => {
            let shards = samples.div_ceil(SHARD);
            let accepted: u64 = (0..shards)
                .into_par_iter()
                .map(|s| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ s.wrapping_mul(0x9E37_79B9_7F4A_7C15));
                    let mut g = FieldMatrix::zeros(3, cols);
                    let count = SHARD.min(samples - s * SHARD);
                    (0..count)
                        .filter(|_| {
                            for k in 0..3 * cols {
                                g.set(k % 3, k / 3, rng.gen_range(0..q));
                            }
                            matrix_ok(field, &g, n)
                        })
                        .count() as u64
                })
                .sum();
            let rate = accepted as f64 / samples as f64;
            let std_error = (rate * (1.0 - rate) / samples as f64).sqrt();
            Ok(CountResult::MonteCarlo { samples, accepted, rate, std_error })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u32) -> Field {
        Field::new(q).unwrap()
    }

    fn from_cols(n: usize, f: &Field, cols: &[Col]) -> ExtremeGenerator {
        ExtremeGenerator::new(n, f, FieldMatrix::from_columns(cols).unwrap()).unwrap()
    }

    #[test]
    fn checker_examples() {
        let f = gf(2);
        // lexicographic edges: (0,0) (1,0) (1,1) (2,0) (2,1) (2,2)
        let e = |k: usize| {
            let mut v = [0; 3];
            v[k] = 1;
            v
        };
        let ones = [1, 1, 1];
        let good = from_cols(3, &f, &[e(0), ones, e(1), ones, ones, e(2)]);
        assert!(check_extreme(&good));
        let parallel = from_cols(3, &f, &[e(0), ones, e(0), ones, ones, e(2)]);
        assert!(!check_extreme(&parallel));
        let zero = from_cols(3, &f, &[[0; 3], ones, e(1), ones, ones, e(2)]);
        assert!(!check_extreme(&zero));
        assert_eq!(decode_extreme(&parallel, 0, 1, 0, 0, 0), Err(Error::SingularSystem(0, 1)));
    }

    #[test]
    fn existence() {
        assert!((3..=7).all(|n| exists_extreme(n, 2)));
        assert!(!exists_extreme(8, 2));
        assert!(exists_extreme(13, 3));
        assert!(!exists_extreme(14, 3));
    }

    #[test]
    fn construction() {
        assert!(check_extreme(&construct_extreme(7, &gf(2), 0).unwrap()));
        assert_eq!(construct_extreme(8, &gf(2), 0).unwrap_err(), Error::NoSuchCode { n: 8, q: 2 });
        let a = construct_extreme(5, &gf(3), 0).unwrap();
        assert_eq!(a, construct_extreme(5, &gf(3), 0).unwrap());
        assert!(check_extreme(&a));
        for seed in 1..20 {
            for (n, q) in [(7, 2), (13, 3), (21, 4), (10, 5)] {
                assert!(check_extreme(&construct_extreme(n, &gf(q), seed).unwrap()));
            }
        }
        assert_eq!(construct_extreme(4, &gf(3), 9).unwrap(), construct_extreme(4, &gf(3), 9).unwrap());
    }

    #[test]
    fn round_trip_all_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (n, q) in [(7, 2), (10, 3), (10, 4)] {
            let gen = construct_extreme(n, &gf(q), 0).unwrap();
            for _ in 0..100 {
                let u = [rng.gen_range(0..q), rng.gen_range(0..q), rng.gen_range(0..q)];
                let c = gen.encode(&u).unwrap();
                for j in 0..n {
                    for i in 0..j {
                        let l = |a, b| c.label(EdgeId::new(a, b)).unwrap();
                        assert_eq!(decode_extreme(&gen, i, j, l(i, i), l(j, i), l(j, j)).unwrap(), u);
                    }
                }
            }
            assert_eq!(decode_extreme(&gen, 0, 1, 0, 0, 0).unwrap(), [0; 3]);
        }
    }

    #[test]
    fn perturbed_matrix_fails_exactly_where_checker_does() {
        let f = gf(2);
        let gen = construct_extreme(5, &f, 0).unwrap();
        let mut m = gen.matrix().clone();
        let k = EdgeId::new(3, 1).index();
        // copy g_{1,1} into g_{3,1}: pair (1,3) becomes singular
        for r in 0..3 {
            m.set(r, k, m.get(r, EdgeId::new(1, 1).index()));
        }
        let bad = ExtremeGenerator::new(5, &f, m).unwrap();
        assert!(!check_extreme(&bad));
        for j in 0..5 {
            for i in 0..j {
                let ok = decode_extreme(&bad, i, j, 0, 0, 0).is_ok();
                assert_eq!(ok, (i, j) != (1, 3));
            }
        }
    }

    #[test]
    fn code_decodes_n_minus_two_failures() {
        let code = ExtremeCode::construct(6, &gf(3), 0).unwrap();
        assert_eq!(code.spec().rank(), edge_count(6) - 3);
        let r = crate::code::verify_exhaustive(
            &code,
            4,
            &crate::code::VerifyOptions { trials: 10, compare_oracle: true, ..Default::default() },
        );
        assert!(r.all_ok(), "{:?}", r.failures);
        let w = code.encode(&[1, 2, 0]).unwrap();
        assert_eq!(code.decode(&w.apply_erasure(&[0, 1, 2, 3, 4]).unwrap()), Err(Error::Underdetermined));
    }

    #[test]
    fn formula_values() {
        assert_eq!(count_extreme_formula(3, 2).unwrap(), BigUint::from(13440u32));
        assert_eq!(count_extreme_formula(4, 2).unwrap(), BigUint::from(3_440_640u32));
        assert_eq!(count_extreme_formula(3, 3).unwrap(), BigUint::from(80_061_696u32));
        assert_eq!(count_extreme_codes(3, 2).unwrap(), BigUint::from(80u32));
        assert_eq!(count_extreme_formula(8, 2), Err(Error::NoSuchCode { n: 8, q: 2 }));
        assert!((formula_rate(3, 2).unwrap() - 13440.0 / 262144.0).abs() < 1e-12);
    }

    #[test]
    fn too_large_for_exhaustive() {
        assert!(matches!(count_extreme_bruteforce(4, &gf(2), CountMode::Exhaustive), Err(Error::TooLarge(_))));
    }

    #[test]
    fn montecarlo_small() {
        let r = count_extreme_bruteforce(3, &gf(2), CountMode::MonteCarlo { samples: 100_000, seed: 4 }).unwrap();
        let CountResult::MonteCarlo { rate, std_error, .. } = r else { panic!() };
        assert!((rate - 13440.0 / 262144.0).abs() < 4.0 * std_error);
    }
}
