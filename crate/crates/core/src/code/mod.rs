//! Linear codes over graphs as parity-check systems on edge coordinates.
//!
//! [`GraphCodeSpec`] holds the parity-check matrix (columns indexed by
//! [`EdgeId::index`]) and provides the generic machinery: syndromes, the
//! Gaussian-elimination oracle decoder, systematic encoding by solving for
//! the redundancy edges, and metrics. Concrete families wrap a spec and
//! implement [`GraphCode`] with their own structured encoder and decoder;
//! the oracle is the reference those decoders are checked against.

mod verify;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement, FieldMatrix, LinearSolver};
use crate::graph::{binom2, edge_count, EdgeId, LabeledGraph};

pub use verify::{failure_sets, pattern_seed, verify_exhaustive, PatternFailure, VerifyOptions, VerifyReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Single,
    DoublePrime,
    TripleQary,
    Extreme,
    Custom,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Single => "single",
            Family::DoublePrime => "double",
            Family::TripleQary => "triple",
            Family::Extreme => "extreme",
            Family::Custom => "custom",
        })
    }
}

/// Which parity constraint recovered an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Constraint {
    /// Row constraint `S_m` of the double-erasure code; `S_{n-2}` covers the
    /// self loops.
    Single(usize),
    /// Diagonal constraint `D_m` of the double-erasure code.
    Diagonal(usize),
    /// The local check on the neighborhood of node `m`.
    Neighborhood(usize),
    /// The check on the cross-edge word of the triple-erasure code.
    CrossEdges,
    /// Joint solve over every parity row.
    System,
    /// Message recovery through the generator matrix.
    Generator,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Single(m) => write!(f, "S_{m}"),
            Constraint::Diagonal(m) => write!(f, "D_{m}"),
            Constraint::Neighborhood(m) => write!(f, "N_{m}"),
            Constraint::CrossEdges => f.write_str("P3"),
            Constraint::System => f.write_str("H"),
            Constraint::Generator => f.write_str("G"),
        }
    }
}

impl Serialize for Constraint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Decoder phase that produced a recovery.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stage {
    /// First zig-zag loop.
    Loop1,
    /// Second zig-zag loop.
    Loop2,
    /// Residual edges after both zig-zag loops.
    Finish,
    Oracle,
    Parity,
    Stage1,
    Stage2,
    Stage3,
    Message,
}

impl Serialize for Stage {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Stage::Loop1 => s.serialize_u8(1),
            Stage::Loop2 => s.serialize_u8(2),
            Stage::Finish => s.serialize_str("finish"),
            Stage::Oracle => s.serialize_str("oracle"),
            Stage::Parity => s.serialize_str("parity"),
            Stage::Stage1 => s.serialize_str("stage1"),
            Stage::Stage2 => s.serialize_str("stage2"),
            Stage::Stage3 => s.serialize_str("stage3"),
            Stage::Message => s.serialize_str("message"),
        }
    }
}

fn edge_str<S: Serializer>(e: &EdgeId, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(e)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Recovery {
    #[serde(serialize_with = "edge_str")]
    pub edge: EdgeId,
    pub constraint: Constraint,
    #[serde(rename = "loop")]
    pub stage: Stage,
    pub t: Option<usize>,
}

/// A successful decode: the fully recovered graph and the order in which
/// erased edges were filled in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeReport {
    pub graph: LabeledGraph,
    pub provenance: Vec<Recovery>,
}

impl DecodeReport {
    pub fn provenance_json(&self) -> String {
        serde_json::to_string_pretty(&self.provenance).expect("provenance serializes")
    }
}

/// A linear code over graphs given by its parity-check matrix.
#[derive(Clone, Debug)]
pub struct GraphCodeSpec {
    n: usize,
    field: Field,
    parity: FieldMatrix,
    row_labels: Vec<Constraint>,
    family: Family,
    info_nodes: Option<usize>,
    rank: OnceLock<usize>,
    systematic: OnceLock<Result<LinearSolver>>,
}

impl GraphCodeSpec {
    pub fn new(
        n: usize,
        field: &Field,
        parity: FieldMatrix,
        family: Family,
        info_nodes: Option<usize>,
    ) -> Result<Self> {
        let labels = vec![Constraint::System; parity.rows()];
        Self::with_row_labels(n, field, parity, labels, family, info_nodes)
    }

    pub fn with_row_labels(
        n: usize,
        field: &Field,
        parity: FieldMatrix,
        row_labels: Vec<Constraint>,
        family: Family,
        info_nodes: Option<usize>,
    ) -> Result<Self> {
        if parity.cols() != edge_count(n) {
            return Err(Error::Shape(format!(
                "parity check has {} columns, graph has {} edges",
                parity.cols(),
                edge_count(n)
            )));
        }
        if row_labels.len() != parity.rows() {
            return Err(Error::Shape("one label per parity row required".into()));
        }
        if let Some(k) = info_nodes {
            if k > n {
                return Err(Error::NodeOutOfRange { node: k, n });
            }
        }
        if let Some(&bad) = parity.data().iter().find(|&&v| !field.contains(v)) {
            return Err(Error::NotInField { value: bad, q: field.order() });
        }
        Ok(Self {
            n,
            field: field.clone(),
            parity,
            row_labels,
            family,
            info_nodes,
            rank: OnceLock::new(),
            systematic: OnceLock::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn parity(&self) -> &FieldMatrix {
        &self.parity
    }

    pub fn row_labels(&self) -> &[Constraint] {
        &self.row_labels
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn info_nodes(&self) -> Option<usize> {
        self.info_nodes
    }

    pub fn edges(&self) -> usize {
        edge_count(self.n)
    }

    pub fn rank(&self) -> usize {
        *self.rank.get_or_init(|| self.parity.rank(&self.field))
    }

    /// `k_G = C(n+1, 2) - rank(H)`.
    pub fn dimension(&self) -> usize {
        self.edges() - self.rank()
    }

    pub fn redundancy(&self) -> usize {
        self.rank()
    }

    fn check_graph(&self, g: &LabeledGraph) -> Result<()> {
        if g.field() != &self.field {
            return Err(Error::FieldMismatch);
        }
        if g.n() != self.n {
            return Err(Error::Shape(format!("graph on {} nodes, code on {}", g.n(), self.n)));
        }
        Ok(())
    }

    /// `H · c` for an unerased graph.
    pub fn syndrome(&self, g: &LabeledGraph) -> Result<Vec<FieldElement>> {
        self.check_graph(g)?;
        g.check_unerased()?;
        self.parity.mul_vec(&self.field, g.labels())
    }

    pub fn is_codeword(&self, g: &LabeledGraph) -> bool {
        self.syndrome(g).map(|s| s.iter().all(|&v| v == 0)).unwrap_or(false)
    }

    /// Whether the columns of `H` on the edges erased by `failed` are
    /// linearly independent (the oracle succeeds exactly when they are).
    pub fn corrects(&self, failed: &[usize]) -> Result<bool> {
        let cols = crate::graph::failure_edges(self.n, failed)?.indices();
        Ok(self.parity.select_columns(&cols).rank(&self.field) == cols.len())
    }

    /// Ground-truth erasure decoder: solves for all erased labels at once.
    pub fn oracle_decode(&self, g: &LabeledGraph) -> Result<DecodeReport> {
        self.check_graph(g)?;
        OracleDecoder::new(self, g.erased_mask()).decode(g)
    }

    /// Systematic encoding: `info` holds the labels of the edges among the
    /// first `k` nodes in lexicographic order (these are exactly the first
    /// `C(k+1, 2)` coordinates).
    pub fn encode_systematic(&self, info: &[FieldElement]) -> Result<LabeledGraph> {
        let k = self.info_nodes.ok_or(Error::NotSystematic(0))?;
        let kinfo = edge_count(k);
        if info.len() != kinfo {
            return Err(Error::InfoLength { expected: kinfo, got: info.len() });
        }
        for &v in info {
            self.field.check(v)?;
        }
        let solver = self
            .systematic
            .get_or_init(|| {
                let red: Vec<usize> = (kinfo..self.edges()).collect();
                let solver = LinearSolver::new(&self.field, &self.parity.select_columns(&red));
                if solver.is_unique() {
                    Ok(solver)
                } else {
                    Err(Error::NotSystematic(k))
                }
            })
            .as_ref()
            .map_err(Clone::clone)?;
        let mut padded = info.to_vec();
        padded.resize(self.edges(), 0);
        let rhs: Vec<_> = self.parity.mul_vec(&self.field, &padded)?.into_iter().map(|v| self.field.neg(v)).collect();
        let red = solver.solve(&rhs).map_err(|e| match e {
            Error::InconsistentSystem => Error::NotSystematic(k),
            other => other,
        })?;
        padded[kinfo..].copy_from_slice(&red);
        LabeledGraph::from_labels(self.n, &self.field, padded)
    }

    /// Systematic encoding from an explicit edge map, which must cover the
    /// information edges exactly.
    pub fn encode_systematic_map(&self, info: &BTreeMap<EdgeId, FieldElement>) -> Result<LabeledGraph> {
        let k = self.info_nodes.ok_or(Error::NotSystematic(0))?;
        info_map_to_vec(k, info).and_then(|v| self.encode_systematic(&v))
    }
}

/// Flattens a map over the edges among the first `k` nodes into
/// lexicographic order.
pub fn info_map_to_vec(k: usize, info: &BTreeMap<EdgeId, FieldElement>) -> Result<Vec<FieldElement>> {
    if info.len() != edge_count(k) || info.keys().any(|e| e.i >= k) {
        return Err(Error::InfoEdges(k));
    }
    // BTreeMap order on EdgeId is lexicographic
    Ok(info.values().copied().collect())
}

/// Oracle decoder prepared for one erasure mask, reusable across graphs.
pub struct OracleDecoder<'a> {
    spec: &'a GraphCodeSpec,
    mask: Vec<bool>,
    erased: Vec<usize>,
    solver: LinearSolver,
}

impl<'a> OracleDecoder<'a> {
    pub fn new(spec: &'a GraphCodeSpec, mask: &[bool]) -> Self {
        let erased: Vec<usize> = (0..mask.len()).filter(|&k| mask[k]).collect();
        let solver = LinearSolver::new(spec.field(), &spec.parity.select_columns(&erased));
        Self { spec, mask: mask.to_vec(), erased, solver }
    }

    pub fn for_failure(spec: &'a GraphCodeSpec, failed: &[usize]) -> Result<Self> {
        let mut mask = vec![false; spec.edges()];
        for k in crate::graph::failure_edges(spec.n, failed)?.indices() {
            mask[k] = true;
        }
        Ok(Self::new(spec, &mask))
    }

    pub fn is_unique(&self) -> bool {
        self.solver.is_unique()
    }

    pub fn decode(&self, g: &LabeledGraph) -> Result<DecodeReport> {
        self.spec.check_graph(g)?;
        if g.erased_mask() != self.mask.as_slice() {
            return Err(Error::Shape("graph erasures differ from the prepared pattern".into()));
        }
        let field = self.spec.field();
        let mut known = g.labels().to_vec();
        for &k in &self.erased {
            known[k] = 0;
        }
        let rhs: Vec<_> = self.spec.parity.mul_vec(field, &known)?.into_iter().map(|v| field.neg(v)).collect();
        let x = self.solver.solve(&rhs).map_err(|e| match e {
            Error::UnderdeterminedSystem => Error::Underdetermined,
            Error::InconsistentSystem => Error::Inconsistent,
            other => other,
        })?;
        let mut graph = g.clone();
        let mut provenance = Vec::with_capacity(x.len());
        for (&k, &v) in self.erased.iter().zip(&x) {
            let edge = EdgeId::from_index(k);
            graph.set_label(edge, v)?;
            provenance.push(Recovery { edge, constraint: Constraint::System, stage: Stage::Oracle, t: None });
        }
        Ok(DecodeReport { graph, provenance })
    }
}

/// A code family with its own encoder and erasure decoder.
pub trait GraphCode: Send + Sync {
    fn spec(&self) -> &GraphCodeSpec;

    /// Number of free information symbols accepted by [`GraphCode::encode`].
    fn info_len(&self) -> usize;

    fn encode(&self, info: &[FieldElement]) -> Result<LabeledGraph>;

    /// Recovers every erased edge. Patterns outside the family's structured
    /// decoder are handed to the oracle.
    fn decode(&self, g: &LabeledGraph) -> Result<DecodeReport>;
}

impl GraphCode for GraphCodeSpec {
    fn spec(&self) -> &GraphCodeSpec {
        self
    }

    fn info_len(&self) -> usize {
        self.info_nodes.map_or(0, edge_count)
    }

    fn encode(&self, info: &[FieldElement]) -> Result<LabeledGraph> {
        self.encode_systematic(info)
    }

    fn decode(&self, g: &LabeledGraph) -> Result<DecodeReport> {
        self.oracle_decode(g)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CodeMetrics {
    pub n: usize,
    pub q: u32,
    pub edges: usize,
    pub dimension: usize,
    pub redundancy: usize,
    pub rate: f64,
    pub rho: usize,
    /// `rho * n - C(rho, 2)`, the least redundancy of any code correcting
    /// `rho` node failures.
    pub optimal_bound: usize,
    pub optimality_gap: i64,
}

pub fn optimal_redundancy(n: usize, rho: usize) -> usize {
    rho * n - binom2(rho)
}

pub fn code_metrics(spec: &GraphCodeSpec, rho: usize) -> CodeMetrics {
    let bound = optimal_redundancy(spec.n, rho);
    CodeMetrics {
        n: spec.n,
        q: spec.field.order(),
        edges: spec.edges(),
        dimension: spec.dimension(),
        redundancy: spec.redundancy(),
        rate: spec.dimension() as f64 / spec.edges() as f64,
        rho,
        optimal_bound: bound,
        optimality_gap: spec.redundancy() as i64 - bound as i64,
    }
}

/// Solves one parity constraint for its only unknown edge. `members` lists
/// the constraint's edges with their coefficients.
pub(crate) fn solve_single_unknown(
    g: &LabeledGraph,
    members: impl IntoIterator<Item = (EdgeId, FieldElement)>,
    target: EdgeId,
) -> Result<FieldElement> {
    let field = g.field();
    let mut acc = 0;
    let mut coeff = None;
    for (e, c) in members {
        if e == target {
            coeff = Some(c);
        } else if g.is_erased(e) {
            return Err(Error::ScheduleViolation(format!("{e} unresolved while solving {target}")));
        } else {
            acc = field.add(acc, field.mul(c, g.label(e)?));
        }
    }
    let c = coeff.ok_or_else(|| Error::ScheduleViolation(format!("{target} not in constraint")))?;
    field.div(field.neg(acc), c)
}
