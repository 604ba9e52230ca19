//! Binary double-node-erasure correction for prime `n >= 5`.
//!
//! Parity is taken over two families of edge sets:
//!
//! * `S_m`, `m in [n-1]`: for `m < n-2` the edges joining `v_m` to
//!   `v_0, ..., v_{n-2}`; `S_{n-2}` holds the self loops of those nodes.
//! * `D_m`, `m in [n]`: every edge `(v_k, v_l)` with `k, l != n-2` and
//!   `k + l = m (mod n)`, plus the shared edge `(v_{n-1}, v_{n-2})`.
//!
//! The code has `2n - 1` independent checks, which meets the redundancy
//! lower bound for two failures. When both failed nodes lie in `[n-2]` the
//! decoder walks two zig-zag chains alternating between `D` and `S`
//! constraints, then finishes the three edges the chains cannot reach.
//! Failures touching `v_{n-2}` or `v_{n-1}` are decoded by the oracle.

pub mod checks;

use std::collections::BTreeSet;

use crate::code::{solve_single_unknown, Constraint, DecodeReport, Family, GraphCode, GraphCodeSpec, Recovery, Stage};
use crate::error::{Error, Result};
use crate::field::{is_prime, Field, FieldElement, FieldMatrix};
use crate::graph::{edge_count, EdgeId, EdgeSet, LabeledGraph};

/// `a mod n` in `[0, n)`.
pub(crate) fn modn(a: i64, n: usize) -> usize {
    a.rem_euclid(n as i64) as usize
}

fn check_prime(n: usize) -> Result<()> {
    if n >= 5 && is_prime(n as u64) {
        Ok(())
    } else {
        Err(Error::NonPrimeN(n))
    }
}

/// The `S` and `D` edge sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintFamily {
    n: usize,
    s: Vec<EdgeSet>,
    d: Vec<EdgeSet>,
}

pub fn build_sets(n: usize) -> Result<ConstraintFamily> {
    check_prime(n)?;
    let mut s = Vec::with_capacity(n - 1);
    for m in 0..n - 2 {
        s.push((0..n - 1).map(|l| EdgeId::new(m, l)).collect());
    }
    s.push((0..n - 1).map(|l| EdgeId::new(l, l)).collect());

    let special = EdgeId::new(n - 1, n - 2);
    let mut d = vec![EdgeSet::new(); n];
    for k in (0..n).filter(|&k| k != n - 2) {
        for l in (0..=k).filter(|&l| l != n - 2) {
            d[(k + l) % n].insert(EdgeId::new(k, l));
        }
    }
    for set in &mut d {
        set.insert(special);
    }
    Ok(ConstraintFamily { n, s, d })
}

impl ConstraintFamily {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self, m: usize) -> &EdgeSet {
        &self.s[m]
    }

    pub fn d(&self, m: usize) -> &EdgeSet {
        &self.d[m]
    }

    pub fn members(&self, c: Constraint) -> &EdgeSet {
        match c {
            Constraint::Single(m) => &self.s[m],
            Constraint::Diagonal(m) => &self.d[m],
            other => panic!("{other} is not a double-erasure constraint"),
        }
    }

    /// All constraints in parity-row order: `S_0..S_{n-2}` then `D_0..D_{n-1}`.
    pub fn constraints(&self) -> Vec<Constraint> {
        (0..self.n - 1).map(Constraint::Single).chain((0..self.n).map(Constraint::Diagonal)).collect()
    }
}

pub fn build_double_spec(n: usize) -> Result<GraphCodeSpec> {
    let family = build_sets(n)?;
    spec_from_family(&family)
}

fn spec_from_family(family: &ConstraintFamily) -> Result<GraphCodeSpec> {
    let n = family.n;
    let constraints = family.constraints();
    let mut h = FieldMatrix::zeros(constraints.len(), edge_count(n));
    for (r, &c) in constraints.iter().enumerate() {
        for e in family.members(c).iter() {
            h.set(r, e.index(), 1);
        }
    }
    let f2 = Field::new(2)?;
    GraphCodeSpec::with_row_labels(n, &f2, h, constraints, Family::DoublePrime, Some(n - 2))
}

/// Loop parameters of the zig-zag decoder for failed nodes `i < j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeSchedule {
    pub n: usize,
    pub i: usize,
    pub j: usize,
    /// `<j - i>_n`
    pub d: usize,
    /// `<-1 - d^{-1}>_n`, the last index of the first loop.
    pub x: usize,
    /// `<-1 + d^{-1}>_n`, the last index of the second loop.
    pub y: usize,
    /// `(s1, s2)` for `t = 0..=x`.
    pub first: Vec<(usize, usize)>,
    /// `(s1, s2)` for `t = 0..=y`.
    pub second: Vec<(usize, usize)>,
}

impl DecodeSchedule {
    /// Nodes visited by the first loop.
    pub fn visits_first(&self) -> BTreeSet<usize> {
        self.first.iter().map(|&(s1, _)| s1).collect()
    }

    pub fn visits_second(&self) -> BTreeSet<usize> {
        self.second.iter().map(|&(s1, _)| s1).collect()
    }
}

fn inverse_mod(a: usize, n: usize) -> usize {
    // n is prime
    let (mut r, mut b, mut e) = (1u64, a as u64 % n as u64, n as u64 - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % n as u64;
        }
        b = b * b % n as u64;
        e >>= 1;
    }
    r as usize
}

pub fn make_schedule(n: usize, i: usize, j: usize) -> Result<DecodeSchedule> {
    check_prime(n)?;
    if !(i < j && j < n - 2) {
        return Err(Error::OutsideAlgorithmDomain(i, j));
    }
    let d = j - i;
    let dinv = inverse_mod(d, n) as i64;
    let x = modn(-1 - dinv, n);
    let y = modn(-1 + dinv, n);
    let (di, ii, ji) = (d as i64, i as i64, j as i64);
    let first = (0..=x as i64)
        .map(|t| {
            let s1 = modn(-di * (t + 1) - 2, n);
            (s1, modn(s1 as i64 + ji, n))
        })
        .collect();
    let second = (0..=y as i64)
        .map(|t| {
            let s1 = modn(di * (t + 1) - 2, n);
            (s1, modn(s1 as i64 + ii, n))
        })
        .collect();
    Ok(DecodeSchedule { n, i, j, d, x, y, first, second })
}

/// Constraint sums over surviving edges only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Syndromes {
    /// `S^_m` for `m in [n-1]`; `None` at the failed nodes.
    pub s: Vec<Option<FieldElement>>,
    /// `D^_m` for `m in [n]`.
    pub d: Vec<FieldElement>,
}

pub fn compute_syndromes(family: &ConstraintFamily, g: &LabeledGraph, i: usize, j: usize) -> Syndromes {
    let surviving_sum =
        |set: &EdgeSet| set.iter().filter(|&e| !g.is_erased(e)).fold(0, |acc, e| acc ^ g.labels()[e.index()]);
    let s = (0..family.n - 1).map(|m| (m != i && m != j).then(|| surviving_sum(&family.s[m]))).collect();
    let d = family.d.iter().map(surviving_sum).collect();
    Syndromes { s, d }
}

/// Zig-zag decode details, for inspection and tests.
#[derive(Clone, Debug)]
pub struct ZigZagTrace {
    pub schedule: DecodeSchedule,
    /// Edges still erased after both loops.
    pub residual: EdgeSet,
}

#[derive(Clone, Debug)]
pub struct DoublePrimeCode {
    family: ConstraintFamily,
    spec: GraphCodeSpec,
}

impl DoublePrimeCode {
    pub fn new(n: usize) -> Result<Self> {
        let family = build_sets(n)?;
        let spec = spec_from_family(&family)?;
        Ok(Self { family, spec })
    }

    pub fn family(&self) -> &ConstraintFamily {
        &self.family
    }

    fn n(&self) -> usize {
        self.family.n
    }

    /// Fills `edge` from `constraint` after checking that it is the
    /// constraint's only unresolved member and that `value` agrees with a
    /// direct evaluation.
    #[allow(clippy::too_many_arguments)]
    fn fill(
        &self,
        g: &mut LabeledGraph,
        prov: &mut Vec<Recovery>,
        edge: EdgeId,
        value: FieldElement,
        constraint: Constraint,
        stage: Stage,
        t: Option<usize>,
    ) -> Result<()> {
        let members = self.family.members(constraint).iter().map(|e| (e, 1));
        let direct = solve_single_unknown(g, members, edge)
            .map_err(|e| Error::ScheduleViolation(format!("{constraint}: {e}")))?;
        if direct != value {
            return Err(Error::ScheduleViolation(format!("{constraint} disagrees on {edge}")));
        }
        g.set_label(edge, value)?;
        prov.push(Recovery { edge, constraint, stage, t });
        Ok(())
    }

    /// Fills `edge` from the current state of `constraint`.
    fn fill_direct(
        &self,
        g: &mut LabeledGraph,
        prov: &mut Vec<Recovery>,
        edge: EdgeId,
        constraint: Constraint,
        stage: Stage,
    ) -> Result<()> {
        let members = self.family.members(constraint).iter().map(|e| (e, 1));
        let v = solve_single_unknown(g, members, edge)?;
        g.set_label(edge, v)?;
        prov.push(Recovery { edge, constraint, stage, t: None });
        Ok(())
    }

    fn zigzag(&self, g: &LabeledGraph, i: usize, j: usize) -> Result<(DecodeReport, ZigZagTrace)> {
        let n = self.n();
        let sched = make_schedule(n, i, j)?;
        let syn = compute_syndromes(&self.family, g, i, j);
        let s_hat = |m: usize| syn.s[m].expect("S syndrome at a surviving node");
        let loops = n - 2;
        let mut work = g.clone();
        let mut prov = Vec::with_capacity(2 * n - 1);
        let e = EdgeId::new;

        // first loop: chains through column j
        let mut b_prev = 0;
        for (t, &(s1, s2)) in sched.first.iter().enumerate() {
            let t = Some(t);
            if s1 != i && s1 != j && s1 != n - 1 {
                let a = syn.d[s2] ^ b_prev;
                self.fill(&mut work, &mut prov, e(s1, j), a, Constraint::Diagonal(s2), Stage::Loop1, t)?;
                let b = s_hat(s1) ^ a;
                self.fill(&mut work, &mut prov, e(s1, i), b, Constraint::Single(s1), Stage::Loop1, t)?;
                b_prev = b;
            }
            if s1 == j {
                let a = syn.d[s2] ^ b_prev;
                self.fill(&mut work, &mut prov, e(j, j), a, Constraint::Diagonal(s2), Stage::Loop1, t)?;
                let b = s_hat(loops) ^ a;
                self.fill(&mut work, &mut prov, e(i, i), b, Constraint::Single(loops), Stage::Loop1, t)?;
                b_prev = b;
            }
            if s1 == n - 1 {
                let a = syn.d[s2] ^ b_prev;
                self.fill(&mut work, &mut prov, e(s1, j), a, Constraint::Diagonal(s2), Stage::Loop1, t)?;
            }
        }

        // second loop: the same with i and j exchanged
        b_prev = 0;
        for (t, &(s1, s2)) in sched.second.iter().enumerate() {
            let t = Some(t);
            if s1 != i && s1 != j && s1 != n - 1 {
                let a = syn.d[s2] ^ b_prev;
                self.fill(&mut work, &mut prov, e(s1, i), a, Constraint::Diagonal(s2), Stage::Loop2, t)?;
                let b = s_hat(s1) ^ a;
                self.fill(&mut work, &mut prov, e(s1, j), b, Constraint::Single(s1), Stage::Loop2, t)?;
                b_prev = b;
            }
            if s1 == i {
                let a = syn.d[s2] ^ b_prev;
                self.fill(&mut work, &mut prov, e(i, i), a, Constraint::Diagonal(s2), Stage::Loop2, t)?;
                let b = s_hat(loops) ^ a;
                self.fill(&mut work, &mut prov, e(j, j), b, Constraint::Single(loops), Stage::Loop2, t)?;
                b_prev = b;
            }
            if s1 == n - 1 {
                let a = syn.d[s2] ^ b_prev;
                self.fill(&mut work, &mut prov, e(s1, i), a, Constraint::Diagonal(s2), Stage::Loop2, t)?;
            }
        }

        let residual = work.erased_edges();

        // (i, j) is the only erased edge on its diagonal; the two edges to
        // v_{n-2} then close the rows S_i and S_j.
        let diag = Constraint::Diagonal((i + j) % n);
        self.fill(&mut work, &mut prov, e(j, i), syn.d[(i + j) % n], diag, Stage::Finish, None)?;
        self.fill_direct(&mut work, &mut prov, e(n - 2, i), Constraint::Single(i), Stage::Finish)?;
        self.fill_direct(&mut work, &mut prov, e(n - 2, j), Constraint::Single(j), Stage::Finish)?;

        if work.has_erasures() {
            return Err(Error::ScheduleViolation(format!("{} edges left", work.erased_edges().len())));
        }
        self.check_constraints(&work)?;
        Ok((DecodeReport { graph: work, provenance: prov }, ZigZagTrace { schedule: sched, residual }))
    }

    fn check_constraints(&self, g: &LabeledGraph) -> Result<()> {
        for c in self.family.constraints() {
            let sum = self.family.members(c).iter().fold(0, |acc, e| acc ^ g.labels()[e.index()]);
            if sum != 0 {
                return Err(Error::CorruptedInput);
            }
        }
        Ok(())
    }

    /// Decodes a two-node failure with the zig-zag schedule, also returning
    /// the schedule and the residual edge set. Only valid when both failed
    /// nodes lie in `[n-2]`.
    pub fn decode_traced(&self, g: &LabeledGraph) -> Result<(DecodeReport, ZigZagTrace)> {
        self.check_input(g)?;
        match g.failure_pattern().as_deref() {
            Some(&[i, j]) => self.zigzag(g, i, j),
            _ => Err(Error::Shape("zig-zag decoding needs exactly two failed nodes".into())),
        }
    }

    fn check_input(&self, g: &LabeledGraph) -> Result<()> {
        if g.field() != self.spec.field() {
            return Err(Error::FieldMismatch);
        }
        if g.n() != self.n() {
            return Err(Error::Shape(format!("graph on {} nodes, code on {}", g.n(), self.n())));
        }
        Ok(())
    }

    pub fn decode_double(&self, g: &LabeledGraph) -> Result<DecodeReport> {
        self.check_input(g)?;
        let n = self.n();
        match g.failure_pattern().as_deref() {
            Some([]) => Ok(DecodeReport { graph: g.clone(), provenance: Vec::new() }),
            Some(&[i, j]) if j < n - 2 => self.zigzag(g, i, j).map(|(r, _)| r),
            _ => self.spec.oracle_decode(g),
        }
    }

    /// Staged systematic encoder. `info` holds the edges among the first
    /// `n - 2` nodes in lexicographic order; every redundancy edge is the
    /// single unknown of exactly one constraint when filled in this order.
    pub fn encode_double(&self, info: &[FieldElement]) -> Result<LabeledGraph> {
        let n = self.n();
        let expected = edge_count(n - 2);
        if info.len() != expected {
            return Err(Error::InfoLength { expected, got: info.len() });
        }
        let mut labels = info.to_vec();
        labels.resize(edge_count(n), 0);
        let mut g = LabeledGraph::from_labels(n, self.spec.field(), labels)?.apply_erasure(&[n - 2, n - 1])?;
        let mut prov = Vec::new();
        let e = EdgeId::new;
        for l in 0..n - 2 {
            self.fill_direct(&mut g, &mut prov, e(n - 2, l), Constraint::Single(l), Stage::Parity)?;
        }
        self.fill_direct(&mut g, &mut prov, e(n - 2, n - 2), Constraint::Single(n - 2), Stage::Parity)?;
        self.fill_direct(&mut g, &mut prov, e(n - 1, n - 2), Constraint::Diagonal(n - 3), Stage::Parity)?;
        for l in (0..n).filter(|&l| l != n - 2) {
            let row = Constraint::Diagonal((n - 1 + l) % n);
            self.fill_direct(&mut g, &mut prov, e(n - 1, l), row, Stage::Parity)?;
        }
        Ok(g)
    }
}

impl GraphCode for DoublePrimeCode {
    fn spec(&self) -> &GraphCodeSpec {
        &self.spec
    }

    fn info_len(&self) -> usize {
        edge_count(self.n() - 2)
    }

    fn encode(&self, info: &[FieldElement]) -> Result<LabeledGraph> {
        self.encode_double(info)
    }

    fn decode(&self, g: &LabeledGraph) -> Result<DecodeReport> {
        self.decode_double(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{code_metrics, verify_exhaustive, VerifyOptions};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e(i: usize, j: usize) -> EdgeId {
        EdgeId::new(i, j)
    }

    #[test]
    fn sets_for_seven() {
        let fam = build_sets(7).unwrap();
        for m in 0..6 {
            assert_eq!(fam.s(m).len(), 6);
        }
        for m in 0..7 {
            assert_eq!(fam.d(m).len(), 4);
        }
        let d0: EdgeSet = [e(0, 0), e(6, 1), e(4, 3), e(6, 5)].into_iter().collect();
        assert_eq!(fam.d(0), &d0);
        let loops: EdgeSet = (0..6).map(|l| e(l, l)).collect();
        assert_eq!(fam.s(5), &loops);
        assert_eq!(build_sets(6).unwrap_err(), Error::NonPrimeN(6));
        assert_eq!(build_sets(3).unwrap_err(), Error::NonPrimeN(3));
    }

    #[test]
    fn spec_shape_and_rank() {
        let spec = build_double_spec(5).unwrap();
        assert_eq!(spec.parity().rows(), 9);
        assert_eq!(spec.edges(), 15);
        assert_eq!(spec.rank(), 9);
        assert_eq!(spec.dimension(), 6);
        for n in [5, 7, 11, 13, 17, 19, 23] {
            let spec = build_double_spec(n).unwrap();
            assert_eq!(spec.rank(), 2 * n - 1);
            assert_eq!(spec.dimension(), (n - 1) * (n - 2) / 2);
        }
        let m = code_metrics(&build_double_spec(11).unwrap(), 2);
        assert_eq!((m.redundancy, m.optimality_gap), (21, 0));
        assert_eq!(build_double_spec(9).unwrap_err(), Error::NonPrimeN(9));
    }

    #[test]
    fn random_graph_codeword_probability() {
        // 2n - 1 independent binary checks
        let spec = build_double_spec(5).unwrap();
        let f = spec.field().clone();
        let mut hits = 0u32;
        for w in 0u32..(1 << 15) {
            let labels = (0..15).map(|b| w >> b & 1).collect();
            if spec.is_codeword(&LabeledGraph::from_labels(5, &f, labels).unwrap()) {
                hits += 1;
            }
        }
        assert_eq!(hits, 1 << 6);
    }

    #[test]
    fn example_schedule() {
        let s = make_schedule(11, 3, 5).unwrap();
        assert_eq!((s.d, s.x, s.y), (2, 4, 5));
        assert_eq!(s.first[0].0, 7);
        assert_eq!(s.first[4].0, 10);
        assert_eq!(s.second[0].0, 0);
        assert_eq!(s.second[5].0, 10);
        assert_eq!(make_schedule(11, 3, 9), Err(Error::OutsideAlgorithmDomain(3, 9)));
        assert_eq!(make_schedule(11, 5, 3), Err(Error::OutsideAlgorithmDomain(5, 3)));
    }

    #[test]
    fn example_trace() {
        let code = DoublePrimeCode::new(11).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let info: Vec<u32> = (0..code.info_len()).map(|_| rng.gen_range(0..2)).collect();
        let g = code.encode(&info).unwrap();
        let (r, trace) = code.decode_traced(&g.apply_erasure(&[3, 5]).unwrap()).unwrap();
        assert_eq!(r.graph, g);
        let expected: EdgeSet = [e(5, 3), e(9, 3), e(9, 5)].into_iter().collect();
        assert_eq!(trace.residual, expected);
        let first = r.provenance[0];
        assert_eq!(first.edge, e(7, 5));
        assert!(matches!(first.constraint, Constraint::Diagonal(_)));
        assert_eq!(r.provenance.len(), 21);
    }

    #[test]
    fn syndromes_of_single_edge() {
        let code = DoublePrimeCode::new(7).unwrap();
        let f2 = Field::new(2).unwrap();
        let fam = code.family();
        let z = LabeledGraph::zero(7, &f2).unwrap();
        let syn = compute_syndromes(fam, &z.apply_erasure(&[1, 2]).unwrap(), 1, 2);
        assert!(syn.d.iter().all(|&v| v == 0));
        assert!(syn.s.iter().flatten().all(|&v| v == 0));
        assert_eq!(syn.s[1], None);
        for k in 0..edge_count(7) {
            let edge = EdgeId::from_index(k);
            if edge.touches(1) || edge.touches(2) {
                continue;
            }
            let mut g = z.clone();
            g.set_label(edge, 1).unwrap();
            let syn = compute_syndromes(fam, &g.apply_erasure(&[1, 2]).unwrap(), 1, 2);
            for m in 0..6 {
                if m != 1 && m != 2 {
                    assert_eq!(syn.s[m], Some(fam.s(m).contains(edge) as u32));
                }
            }
            for m in 0..7 {
                assert_eq!(syn.d[m], fam.d(m).contains(edge) as u32);
            }
        }
    }

    #[test]
    fn staged_encoder_matches_generic() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [5, 7, 11, 13] {
            let code = DoublePrimeCode::new(n).unwrap();
            assert_eq!(
                code.encode(&vec![0; code.info_len()]).unwrap(),
                LabeledGraph::zero(n, code.spec().field()).unwrap()
            );
            for _ in 0..20 {
                let info: Vec<u32> = (0..code.info_len()).map(|_| rng.gen_range(0..2)).collect();
                let g = code.encode(&info).unwrap();
                assert!(code.spec().is_codeword(&g));
                assert_eq!(&g.labels()[..info.len()], &info[..]);
                assert_eq!(g, code.spec().encode_systematic(&info).unwrap());
            }
        }
    }

    #[test]
    fn zero_codeword_any_pair() {
        let code = DoublePrimeCode::new(7).unwrap();
        let z = LabeledGraph::zero(7, code.spec().field()).unwrap();
        for i in 0..7 {
            for j in i + 1..7 {
                assert_eq!(code.decode(&z.apply_erasure(&[i, j]).unwrap()).unwrap().graph, z);
            }
        }
    }

    #[test]
    fn exhaustive_seven() {
        let code = DoublePrimeCode::new(7).unwrap();
        let opts = VerifyOptions { trials: 20, compare_oracle: true, ..Default::default() };
        let r = verify_exhaustive(&code, 2, &opts);
        assert_eq!((r.patterns_total, r.patterns_ok), (21, 21), "{:?}", r.failures);
        let r3 = verify_exhaustive(&code, 3, &VerifyOptions { trials: 1, ..Default::default() });
        assert_eq!(r3.patterns_ok, 0);
        assert!(r3.failures.iter().all(|f| f.reason == Error::Underdetermined.to_string()));
    }

    #[test]
    fn oracle_fallback_for_last_two_nodes() {
        let code = DoublePrimeCode::new(7).unwrap();
        let g = code.encode(&[1; 15]).unwrap();
        let r = code.decode(&g.apply_erasure(&[2, 5]).unwrap()).unwrap();
        assert_eq!(r.graph, g);
        assert!(r.provenance.iter().all(|p| p.stage == Stage::Oracle));
    }
}
