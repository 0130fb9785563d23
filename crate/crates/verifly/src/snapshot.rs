//! Analysis-graph persistence: a versioned, length-prefixed binary
//! container (magic header `CIAOGRAPH\0`) around a canonical JSON payload,
//! or the bare JSON document. Saves are deterministic byte for byte.

use crate::engine::{AnalysisGraph, DepArc, NodeInfo, NodeKey, Stats};
use crate::domains::DomainKind;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

pub const MAGIC: &[u8; 10] = b"CIAOGRAPH\0";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnapshotFormat {
    Bin,
    Json,
}

impl SnapshotFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "bin" => Some(SnapshotFormat::Bin),
            "json" => Some(SnapshotFormat::Json),
            _ => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("not a snapshot: bad magic header")]
    BadMagic,
    #[error("unsupported snapshot version {0}")]
    BadVersion(u32),
    #[error("truncated snapshot")]
    Truncated,
    #[error("stale snapshot: fingerprint {found:#018x} does not match program {expected:#018x}")]
    Stale { expected: u64, found: u64 },
    #[error("malformed snapshot payload: {0}")]
    Payload(#[from] serde_json::Error),
}

#[derive(Debug, Serialize, Deserialize)]
struct SnapshotDoc {
    version: u32,
    domain: DomainKind,
    fingerprint: u64,
    entry_keys: Vec<NodeKey>,
    nodes: Vec<(NodeKey, NodeInfo)>,
    arcs: Vec<DepArc>,
    stats: Stats,
}

fn to_doc(graph: &AnalysisGraph) -> SnapshotDoc {
    SnapshotDoc {
        version: VERSION,
        domain: graph.domain,
        fingerprint: graph.fingerprint,
        entry_keys: graph.entry_keys.clone(),
        nodes: graph.nodes.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
        arcs: graph
            .arcs
            .iter()
            .map(|(from, to)| DepArc { from: from.clone(), to: to.clone() })
            .collect(),
        stats: graph.stats,
    }
}

fn from_doc(doc: SnapshotDoc) -> AnalysisGraph {
    let mut graph = AnalysisGraph::new(doc.domain);
    graph.fingerprint = doc.fingerprint;
    graph.entry_keys = doc.entry_keys;
    graph.nodes = doc.nodes.into_iter().collect::<BTreeMap<_, _>>();
    graph.arcs = doc.arcs.into_iter().map(|a| (a.from, a.to)).collect::<BTreeMap<_, _>>();
    graph.stats = doc.stats;
    graph.rebuild_rev_index();
    graph
}

pub fn save_snapshot(graph: &AnalysisGraph, format: SnapshotFormat) -> Vec<u8> {
    let payload = serde_json::to_vec(&to_doc(graph)).expect("graph serialization cannot fail");
    match format {
        SnapshotFormat::Json => payload,
        SnapshotFormat::Bin => {
            let mut out = Vec::with_capacity(payload.len() + 22);
            out.extend_from_slice(MAGIC);
            out.extend_from_slice(&VERSION.to_le_bytes());
            out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
            out.extend_from_slice(&payload);
            out
        }
    }
}

/// Loads a snapshot in either format and refuses stale ones: the stored
/// fingerprint must equal `expected_fingerprint` of the current program.
pub fn load_snapshot(
    bytes: &[u8],
    expected_fingerprint: u64,
) -> Result<AnalysisGraph, SnapshotError> {
    let graph = load_snapshot_unchecked(bytes)?;
    if graph.fingerprint != expected_fingerprint {
        return Err(SnapshotError::Stale {
            expected: expected_fingerprint,
            found: graph.fingerprint,
        });
    }
    Ok(graph)
}

pub fn load_snapshot_unchecked(bytes: &[u8]) -> Result<AnalysisGraph, SnapshotError> {
    let payload: &[u8] = if bytes.starts_with(MAGIC) {
        let rest = &bytes[MAGIC.len()..];
        if rest.len() < 12 {
            return Err(SnapshotError::Truncated);
        }
        let version = u32::from_le_bytes(rest[0..4].try_into().unwrap());
        if version != VERSION {
            return Err(SnapshotError::BadVersion(version));
        }
        let len = u64::from_le_bytes(rest[4..12].try_into().unwrap()) as usize;
        let body = &rest[12..];
        if body.len() < len {
            return Err(SnapshotError::Truncated);
        }
        &body[..len]
    } else if bytes.starts_with(b"{") {
        bytes
    } else {
        return Err(SnapshotError::BadMagic);
    };
    let doc: SnapshotDoc = serde_json::from_slice(payload)?;
    if doc.version != VERSION {
        return Err(SnapshotError::BadVersion(doc.version));
    }
    Ok(from_doc(doc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chc::normalize_one;
    use crate::diag::FileId;
    use crate::engine::{analyze, entries_of, CancelToken};
    use crate::syntax::parse_program;

    fn app_graph() -> AnalysisGraph {
        let prog = normalize_one(&parse_program(
            ":- entry app(X,Y,Z) : (ground(X), ground(Y)).\napp([],Y,Y).\napp([X|Xs],Y,[X|Z]) :- app(Xs,Y,Z).\n",
            FileId(0),
        ));
        let (entries, _) = entries_of(&prog, DomainKind::Product);
        analyze(&prog, &entries, DomainKind::Product, &CancelToken::new()).unwrap()
    }

    #[test]
    fn roundtrip_bin_and_json() {
        let g = app_graph();
        for fmt in [SnapshotFormat::Bin, SnapshotFormat::Json] {
            let bytes = save_snapshot(&g, fmt);
            let g2 = load_snapshot(&bytes, g.fingerprint).unwrap();
            assert!(g.same_result(&g2));
            assert_eq!(g.stats, g2.stats);
        }
    }

    #[test]
    fn stale_snapshot_refused() {
        let g = app_graph();
        let bytes = save_snapshot(&g, SnapshotFormat::Bin);
        let err = load_snapshot(&bytes, g.fingerprint ^ 1).unwrap_err();
        assert!(matches!(err, SnapshotError::Stale { .. }));
    }

    #[test]
    fn empty_graph_roundtrips() {
        let g = AnalysisGraph::new(DomainKind::Modes);
        let bytes = save_snapshot(&g, SnapshotFormat::Bin);
        let g2 = load_snapshot(&bytes, 0).unwrap();
        assert!(g.same_result(&g2));
    }

    #[test]
    fn garbage_rejected() {
        assert!(load_snapshot_unchecked(b"garbage").is_err());
        assert!(load_snapshot_unchecked(b"CIAOGRAPH\0xx").is_err());
    }

    #[test]
    fn saves_are_deterministic() {
        let a = save_snapshot(&app_graph(), SnapshotFormat::Bin);
        let b = save_snapshot(&app_graph(), SnapshotFormat::Bin);
        assert_eq!(a, b);
    }
}
