//! Single-node-erasure correction: every neighborhood sums to zero.
//!
//! Node `n - 1` is the redundancy node. An edge `(i, l)` of a failed node
//! `i` is recovered from the parity of the surviving node `l`; the self loop
//! `(i, i)` appears only in the failed node's own parity and goes last.

use crate::code::{solve_single_unknown, Constraint, DecodeReport, Family, GraphCode, GraphCodeSpec, Recovery, Stage};
use crate::error::{Error, Result};
use crate::field::{Field, FieldElement, FieldMatrix};
use crate::graph::{edge_count, EdgeId, LabeledGraph};

pub fn build_single_spec(n: usize, field: &Field) -> Result<GraphCodeSpec> {
    if n < 3 {
        return Err(Error::NodeCount(n));
    }
    let mut h = FieldMatrix::zeros(n, edge_count(n));
    for m in 0..n {
        for l in 0..n {
            h.set(m, EdgeId::new(m, l).index(), 1);
        }
    }
    let labels = (0..n).map(Constraint::Neighborhood).collect();
    GraphCodeSpec::with_row_labels(n, field, h, labels, Family::Single, Some(n - 1))
}

#[derive(Clone, Debug)]
pub struct SingleParityCode {
    spec: GraphCodeSpec,
}

impl SingleParityCode {
    pub fn new(n: usize, field: &Field) -> Result<Self> {
        Ok(Self { spec: build_single_spec(n, field)? })
    }

    fn parity_members(&self, m: usize) -> impl Iterator<Item = (EdgeId, FieldElement)> {
        (0..self.spec.n()).map(move |l| (EdgeId::new(m, l), 1))
    }

    /// Recovers the neighborhood of node `i` in place.
    fn recover_node(&self, g: &mut LabeledGraph, i: usize) -> Result<Vec<Recovery>> {
        let n = self.spec.n();
        let mut provenance = Vec::with_capacity(n);
        let order = (0..n).filter(|&l| l != i).chain(std::iter::once(i));
        for l in order {
            let edge = EdgeId::new(i, l);
            let v = solve_single_unknown(g, self.parity_members(l), edge)?;
            g.set_label(edge, v)?;
            provenance.push(Recovery { edge, constraint: Constraint::Neighborhood(l), stage: Stage::Parity, t: None });
        }
        Ok(provenance)
    }

    pub fn decode_single(&self, g: &LabeledGraph) -> Result<DecodeReport> {
        match g.failure_pattern().as_deref() {
            Some([]) => Ok(DecodeReport { graph: g.clone(), provenance: Vec::new() }),
            Some(&[i]) if g.n() == self.spec.n() && g.field() == self.spec.field() => {
                let mut graph = g.clone();
                let provenance = self.recover_node(&mut graph, i)?;
                Ok(DecodeReport { graph, provenance })
            }
            _ => self.spec.oracle_decode(g),
        }
    }
}

impl GraphCode for SingleParityCode {
    fn spec(&self) -> &GraphCodeSpec {
        &self.spec
    }

    fn info_len(&self) -> usize {
        edge_count(self.spec.n() - 1)
    }

    fn encode(&self, info: &[FieldElement]) -> Result<LabeledGraph> {
        let n = self.spec.n();
        if info.len() != self.info_len() {
            return Err(Error::InfoLength { expected: self.info_len(), got: info.len() });
        }
        let mut labels = info.to_vec();
        labels.resize(edge_count(n), 0);
        let mut g = LabeledGraph::from_labels(n, self.spec.field(), labels)?.apply_erasure(&[n - 1])?;
        self.recover_node(&mut g, n - 1)?;
        Ok(g)
    }

    fn decode(&self, g: &LabeledGraph) -> Result<DecodeReport> {
        self.decode_single(g)
    }
}
