//! q-ary triple-node-erasure correction for `q >= n + 1`.
//!
//! Every neighborhood `N_m`, `m in [n-2]`, is a word of an `[n, n-3, 4]`
//! Reed-Solomon code with parity check `H_N[t][l] = alpha_l^t`, where
//! coordinate `l` of `N_m` is the edge `(v_m, v_l)`. The cross-edge word
//! collects the non-loop edges among the first `n - 2` nodes together with
//! `(v_{n-2}, v_{n-2})`, `(v_{n-1}, v_{n-2})` and `(v_{n-1}, v_{n-1})`; an
//! edge `(v_i, v_j)` contributes the column `(1, a, a^2)` with
//! `a = alpha_{<i+j>_n}` and the three appended edges contribute unit
//! columns.
//!
//! Decoding runs in three stages: surviving neighborhoods, then the
//! cross-edge word, then the neighborhoods of failed nodes.

use serde::Serialize;

use crate::code::{Constraint, DecodeReport, Family, GraphCode, GraphCodeSpec, Recovery, Stage};
use crate::error::{Error, Result};
use crate::field::{vandermonde_parity, Field, FieldElement, FieldMatrix, LinearSolver};
use crate::graph::{edge_count, failure_edges, neighborhood, EdgeId, LabeledGraph};

#[derive(Clone, Debug)]
pub struct TripleCodeParams {
    n: usize,
    field: Field,
    alphas: Vec<FieldElement>,
    h_n: FieldMatrix,
    cross: Vec<EdgeId>,
    h_p: FieldMatrix,
}

/// Serialized form: enough to rebuild the code bit-exactly.
#[derive(Serialize)]
struct ParamsRecord<'a> {
    n: usize,
    field: String,
    alphas: &'a [FieldElement],
}

pub fn build_triple_params(n: usize, field: &Field) -> Result<TripleCodeParams> {
    if n < 5 {
        return Err(Error::NodeCount(n));
    }
    let q = field.order();
    if (q as usize) < n + 1 {
        return Err(Error::FieldTooSmall { n, q });
    }
    let alphas: Vec<FieldElement> = (1..=n as u32).collect();
    let h_n = vandermonde_parity(field, &alphas, 3)?;

    let mut cross = Vec::with_capacity(edge_count(n - 3) + 3);
    for i in 0..n - 2 {
        for j in 0..i {
            cross.push(EdgeId::new(i, j));
        }
    }
    let pairs = cross.len();
    cross.extend([EdgeId::new(n - 2, n - 2), EdgeId::new(n - 1, n - 2), EdgeId::new(n - 1, n - 1)]);
    let mut h_p = FieldMatrix::zeros(3, cross.len());
    for (c, e) in cross[..pairs].iter().enumerate() {
        let col = (e.i + e.j) % n;
        for t in 0..3 {
            h_p.set(t, c, h_n.get(t, col));
        }
    }
    for u in 0..3 {
        h_p.set(u, pairs + u, 1);
    }
    Ok(TripleCodeParams { n, field: field.clone(), alphas, h_n, cross, h_p })
}

impl TripleCodeParams {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn alphas(&self) -> &[FieldElement] {
        &self.alphas
    }

    /// The `3 × n` neighborhood check.
    pub fn h_n(&self) -> &FieldMatrix {
        &self.h_n
    }

    /// Edges of the cross-edge word, in column order of [`Self::h_p`].
    pub fn cross_edges(&self) -> &[EdgeId] {
        &self.cross
    }

    pub fn h_p(&self) -> &FieldMatrix {
        &self.h_p
    }

    /// Column of `h_p` holding `e`, if `e` is a cross edge.
    pub fn cross_column(&self, e: EdgeId) -> Option<usize> {
        self.cross.iter().position(|&c| c == e)
    }

    pub fn to_json(&self) -> String {
        let rec = ParamsRecord { n: self.n, field: self.field.to_string(), alphas: &self.alphas };
        serde_json::to_string(&rec).expect("params serialize")
    }
}

pub fn build_triple_spec(params: &TripleCodeParams) -> Result<GraphCodeSpec> {
    let n = params.n;
    let mut h = FieldMatrix::zeros(3 * (n - 2) + 3, edge_count(n));
    let mut labels = Vec::with_capacity(h.rows());
    for m in 0..n - 2 {
        for t in 0..3 {
            for l in 0..n {
                h.set(3 * m + t, EdgeId::new(m, l).index(), params.h_n.get(t, l));
            }
            labels.push(Constraint::Neighborhood(m));
        }
    }
    let base = 3 * (n - 2);
    for t in 0..3 {
        for (c, e) in params.cross.iter().enumerate() {
            h.set(base + t, e.index(), params.h_p.get(t, c));
        }
        labels.push(Constraint::CrossEdges);
    }
    GraphCodeSpec::with_row_labels(n, &params.field, h, labels, Family::TripleQary, Some(n - 3))
}

#[derive(Clone, Debug)]
pub struct TripleCode {
    params: TripleCodeParams,
    spec: GraphCodeSpec,
}

impl TripleCode {
    pub fn new(n: usize, field: &Field) -> Result<Self> {
        let params = build_triple_params(n, field)?;
        let spec = build_triple_spec(&params)?;
        Ok(Self { params, spec })
    }

    pub fn params(&self) -> &TripleCodeParams {
        &self.params
    }

    /// Solves one local word (`h` applied to the labels of `edges`) for its
    /// erased entries and writes them back.
    fn solve_local(
        &self,
        g: &mut LabeledGraph,
        h: &FieldMatrix,
        edges: &[EdgeId],
        constraint: Constraint,
        stage: Stage,
        prov: &mut Vec<Recovery>,
    ) -> Result<()> {
        let f = &self.params.field;
        let unknown: Vec<usize> = (0..edges.len()).filter(|&c| g.is_erased(edges[c])).collect();
        if unknown.is_empty() {
            return Ok(());
        }
        let mut rhs = vec![0; h.rows()];
        for (c, &e) in edges.iter().enumerate() {
            if !g.is_erased(e) {
                let v = g.labels()[e.index()];
                for (t, r) in rhs.iter_mut().enumerate() {
                    *r = f.sub(*r, f.mul(h.get(t, c), v));
                }
            }
        }
        let x = LinearSolver::new(f, &h.select_columns(&unknown)).solve(&rhs).map_err(|e| match e {
            Error::InconsistentSystem => Error::CorruptedInput,
            _ => Error::ScheduleViolation(format!("{constraint}: {} unknowns", unknown.len())),
        })?;
        for (&c, v) in unknown.iter().zip(x) {
            g.set_label(edges[c], v)?;
            prov.push(Recovery { edge: edges[c], constraint, stage, t: None });
        }
        Ok(())
    }

    fn neighborhood_edges(&self, m: usize) -> Vec<EdgeId> {
        (0..self.params.n).map(|l| EdgeId::new(m, l)).collect()
    }

    /// Three-stage fill of every edge incident to `failed`.
    fn staged(&self, g: &mut LabeledGraph, failed: &[usize]) -> Result<Vec<Recovery>> {
        let n = self.params.n;
        let mut prov = Vec::new();
        let h_n = &self.params.h_n;
        for m in (0..n - 2).filter(|m| !failed.contains(m)) {
            let edges = self.neighborhood_edges(m);
            self.solve_local(g, h_n, &edges, Constraint::Neighborhood(m), Stage::Stage1, &mut prov)?;
        }
        self.solve_local(g, &self.params.h_p, &self.params.cross, Constraint::CrossEdges, Stage::Stage2, &mut prov)?;
        for &m in failed.iter().filter(|&&m| m < n - 2) {
            let edges = self.neighborhood_edges(m);
            self.solve_local(g, h_n, &edges, Constraint::Neighborhood(m), Stage::Stage3, &mut prov)?;
        }
        if g.has_erasures() {
            return Err(Error::ScheduleViolation(format!("{} edges left", g.erased_edges().len())));
        }
        Ok(prov)
    }

    /// Staged systematic encoder. `info` holds the edges among the first
    /// `n - 3` nodes in lexicographic order.
    pub fn encode_triple(&self, info: &[FieldElement]) -> Result<LabeledGraph> {
        let n = self.params.n;
        let expected = edge_count(n - 3);
        if info.len() != expected {
            return Err(Error::InfoLength { expected, got: info.len() });
        }
        let mut labels = info.to_vec();
        labels.resize(edge_count(n), 0);
        let redundancy = [n - 3, n - 2, n - 1];
        let mut g = LabeledGraph::from_labels(n, &self.params.field, labels)?.apply_erasure(&redundancy)?;
        self.staged(&mut g, &redundancy)?;
        Ok(g)
    }

    pub fn decode_triple(&self, g: &LabeledGraph) -> Result<DecodeReport> {
        if g.field() != &self.params.field {
            return Err(Error::FieldMismatch);
        }
        if g.n() != self.params.n {
            return Err(Error::Shape(format!("graph on {} nodes, code on {}", g.n(), self.params.n)));
        }
        match g.failure_pattern() {
            Some(failed) if failed.is_empty() => Ok(DecodeReport { graph: g.clone(), provenance: Vec::new() }),
            Some(failed) if failed.len() == 3 => {
                let mut graph = g.clone();
                let provenance = self.staged(&mut graph, &failed)?;
                Ok(DecodeReport { graph, provenance })
            }
            _ => self.spec.oracle_decode(g),
        }
    }
}

impl GraphCode for TripleCode {
    fn spec(&self) -> &GraphCodeSpec {
        &self.spec
    }

    fn info_len(&self) -> usize {
        edge_count(self.params.n - 3)
    }

    fn encode(&self, info: &[FieldElement]) -> Result<LabeledGraph> {
        self.encode_triple(info)
    }

    fn decode(&self, g: &LabeledGraph) -> Result<DecodeReport> {
        self.decode_triple(g)
    }
}

/// Checks that for `i < j < k` among the first `n - 2` nodes the cross-edge
/// columns of `(i,j)`, `(i,k)`, `(j,k)` are independent and their pair sums
/// are distinct mod `n`.
pub fn cross_column_violations(params: &TripleCodeParams) -> Vec<String> {
    let n = params.n;
    let mut out = Vec::new();
    for i in 0..n - 2 {
        for j in i + 1..n - 2 {
            for k in j + 1..n - 2 {
                let sums = [(i + j) % n, (i + k) % n, (j + k) % n];
                if sums[0] == sums[1] || sums[0] == sums[2] || sums[1] == sums[2] {
                    out.push(format!("({i},{j},{k}): pair sums {sums:?} collide"));
                }
                let cols: Vec<usize> = [(i, j), (i, k), (j, k)]
                    .iter()
                    .map(|&(a, b)| params.cross_column(EdgeId::new(a, b)).expect("cross edge"))
                    .collect();
                let rank = params.h_p.select_columns(&cols).rank(&params.field);
                if rank != 3 {
                    out.push(format!("({i},{j},{k}): rank {rank}"));
                }
            }
        }
    }
    out
}

/// Checks `|N_m ∩ (F_i ∪ F_j ∪ F_k)| = 3` for every triple and every `m`
/// outside it.
pub fn neighborhood_overlap_violations(n: usize) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let f = failure_edges(n, &[i, j, k])?;
                for m in (0..n).filter(|&m| m != i && m != j && m != k) {
                    let c = neighborhood(n, m)?.intersection(&f).len();
                    if c != 3 {
                        out.push(format!("N_{m} meets F_{{{i},{j},{k}}} in {c} edges"));
                    }
                }
            }
        }
    }
    Ok(out)
}
