//! Canonical certificates, isomorphism tests and automorphism groups of
//! biplanes, computed on the two-colored incidence graph.

pub mod perm;
pub mod refine;
pub mod search;

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bitrow::BitRow;
use crate::error::{Error, Result};
use crate::matrix::IncidenceMatrix;
use crate::params::BiplaneParams;

pub use perm::{Perm, StabChain};
pub use refine::ColoredGraph;
pub use search::SearchStats;

/// Bipartite incidence graph: vertices `0..v` are points (matrix rows),
/// `v..2v` are lines (matrix columns). The two sides carry different colors.
#[derive(Clone, Debug)]
pub struct IncidenceGraph {
    params: BiplaneParams,
    graph: ColoredGraph,
}

impl IncidenceGraph {
    pub fn new(m: &IncidenceMatrix) -> Self {
        let v = m.params().v;
        let mut colors = vec![0u32; 2 * v];
        colors[v..].fill(1);
        let mut graph = ColoredGraph::new(2 * v, colors);
        for (r, row) in m.rows().iter().enumerate() {
            for c in row.ones() {
                graph.add_edge(r, v + c);
            }
        }
        IncidenceGraph {
            params: m.params(),
            graph,
        }
    }

    pub fn params(&self) -> BiplaneParams {
        self.params
    }

    pub fn graph(&self) -> &ColoredGraph {
        &self.graph
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// True if `p` preserves both sides and every incidence.
    pub fn is_automorphism(&self, p: &Perm) -> bool {
        search::is_automorphism(&self.graph, p)
    }
}

/// Canonical byte string of an incidence structure: the order, then the
/// canonically relabeled `v x v` incidence matrix packed row by row.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Certificate(#[serde(with = "hex_bytes")] Vec<u8>);

mod hex_bytes {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let s = String::deserialize(d)?;
        hex::decode(s).map_err(serde::de::Error::custom)
    }
}

impl Certificate {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        hex::decode(s.trim())
            .map(Certificate)
            .map_err(|e| Error::Catalog(format!("bad certificate hex: {e}")))
    }

    /// Short stable key: sha256 of the certificate bytes, lowercase hex.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(&self.0))
    }

    /// The canonical representative matrix encoded in the certificate.
    pub fn matrix(&self) -> Result<IncidenceMatrix> {
        let order = *self
            .0
            .first()
            .ok_or_else(|| Error::Catalog("empty certificate".into()))? as usize;
        let params = BiplaneParams::from_order(order)?;
        let v = params.v;
        let stride = v.div_ceil(8);
        if self.0.len() != 1 + v * stride {
            return Err(Error::Catalog("certificate length does not match its order".into()));
        }
        let rows = (0..v)
            .map(|r| {
                let bytes = &self.0[1 + r * stride..1 + (r + 1) * stride];
                BitRow::from_ones(v, (0..v).filter(|&c| bytes[c / 8] >> (7 - c % 8) & 1 == 1))
            })
            .collect();
        IncidenceMatrix::new(params, rows)
    }
}

impl fmt::Debug for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Certificate({})", &self.digest()[..16])
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

#[derive(Clone, Debug)]
pub struct AutResult {
    pub group_order: u128,
    /// Permutations of the `2v` graph vertices, each checked to preserve incidence.
    pub generators: Vec<Perm>,
}

/// Everything one search produces.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub certificate: Certificate,
    pub aut: AutResult,
    /// `labeling[p]` is the graph vertex at canonical position `p`.
    pub labeling: Vec<usize>,
    pub stats: SearchStats,
}

pub fn analyze_graph(g: &IncidenceGraph) -> Analysis {
    let l = search::search(&g.graph);
    for p in &l.generators {
        assert!(g.is_automorphism(p), "search returned a non-automorphism");
    }
    let v = g.params.v;
    let stride = v.div_ceil(8);
    let mut bytes = vec![0u8; 1 + v * stride];
    bytes[0] = g.params.order as u8;
    for r in 0..v {
        let row = &l.graph[r];
        for c in 0..v {
            if refine::test_bit(row, v + c) {
                bytes[1 + r * stride + c / 8] |= 0x80 >> (c % 8);
            }
        }
    }
    Analysis {
        certificate: Certificate(bytes),
        aut: AutResult {
            group_order: l.group_order,
            generators: l.generators,
        },
        labeling: l.lab,
        stats: l.stats,
    }
}

pub fn analyze(m: &IncidenceMatrix) -> Analysis {
    analyze_graph(&IncidenceGraph::new(m))
}

pub fn canonical_certificate(m: &IncidenceMatrix) -> Certificate {
    analyze(m).certificate
}

pub fn aut_order(m: &IncidenceMatrix) -> AutResult {
    analyze(m).aut
}

/// Isomorphism with points and lines kept apart; with `allow_dual` the
/// dual of `m2` is accepted as well.
pub fn are_isomorphic(m1: &IncidenceMatrix, m2: &IncidenceMatrix, allow_dual: bool) -> Result<bool> {
    if m1.params() != m2.params() {
        return Err(Error::ParamMismatch(format!(
            "order {} vs order {}",
            m1.params().order,
            m2.params().order
        )));
    }
    let c1 = canonical_certificate(m1);
    if c1 == canonical_certificate(m2) {
        return Ok(true);
    }
    Ok(allow_dual && c1 == canonical_certificate(&m2.dual()))
}
