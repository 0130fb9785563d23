//! Incremental fixpoint update: applies a clause-level delta to a
//! fixpointed analysis graph, invalidating exactly the affected region and
//! re-running the worklist so the result structurally equals a from-scratch
//! analysis of the new program.

use crate::chc::{ChcProgram, PredId, ProgramDelta};
use crate::engine::{entries_of, AnalysisGraph, Analyzer, CancelToken, NodeKey};
use serde::Serialize;
use std::collections::{BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaReason {
    Additive,
    Destructive,
    AssertionOnly,
    EntryChange,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvalidationReport {
    pub deleted_nodes: BTreeSet<NodeKey>,
    pub reused_nodes: usize,
    pub reanalysis_seeds: Vec<NodeKey>,
    pub reason: DeltaReason,
}

#[derive(Debug, Error)]
pub enum IncrementalError {
    #[error("graph fingerprint {graph:#018x} does not match the delta's base program {expected:#018x}; scratch analysis required")]
    FingerprintMismatch { expected: u64, graph: u64 },
    #[error("analysis cancelled")]
    Cancelled,
}

/// Kind of re-analysis a delta requires.
pub fn classify(delta: &ProgramDelta) -> DeltaReason {
    if delta.added_clauses.is_empty() && delta.deleted_clauses.is_empty() && !delta.entry_changed {
        DeltaReason::AssertionOnly
    } else if delta.entry_changed {
        DeltaReason::EntryChange
    } else if delta.deleted_clauses.is_empty() {
        DeltaReason::Additive
    } else {
        DeltaReason::Destructive
    }
}

/// Updates `graph` (owned exclusively; at fixpoint for the delta's base
/// program) to the fixpoint of `new_prog`. On cancellation the graph is
/// consumed; callers that need the pre-delta state keep their own copy.
pub fn apply_delta(
    graph: AnalysisGraph,
    new_prog: &ChcProgram,
    delta: &ProgramDelta,
    cancel: &CancelToken,
) -> Result<(AnalysisGraph, InvalidationReport), IncrementalError> {
    apply_delta_traced(graph, new_prog, delta, cancel, false)
}

pub fn apply_delta_traced(
    graph: AnalysisGraph,
    new_prog: &ChcProgram,
    delta: &ProgramDelta,
    cancel: &CancelToken,
    trace: bool,
) -> Result<(AnalysisGraph, InvalidationReport), IncrementalError> {
    if graph.fingerprint != delta.old_fingerprint {
        return Err(IncrementalError::FingerprintMismatch {
            expected: delta.old_fingerprint,
            graph: graph.fingerprint,
        });
    }
    let reason = classify(delta);
    match reason {
        DeltaReason::AssertionOnly => {
            // "no changes are required in the analysis": reuse as is
            let mut graph = graph;
            graph.fingerprint = delta.new_fingerprint;
            let reused = graph.nodes.len();
            Ok((
                graph,
                InvalidationReport {
                    deleted_nodes: BTreeSet::new(),
                    reused_nodes: reused,
                    reanalysis_seeds: Vec::new(),
                    reason,
                },
            ))
        }
        DeltaReason::Additive if delta.new_preds.is_empty() => {
            apply_additive(graph, new_prog, delta, cancel, trace)
        }
        // a brand-new predicate invalidates the Top nodes its callers saw
        // for it as an unknown predicate, so it takes the destructive route
        _ => apply_destructive(graph, new_prog, delta, cancel, trace, reason),
    }
}

fn apply_additive(
    graph: AnalysisGraph,
    new_prog: &ChcProgram,
    delta: &ProgramDelta,
    cancel: &CancelToken,
    trace: bool,
) -> Result<(AnalysisGraph, InvalidationReport), IncrementalError> {
    let pre_keys: BTreeSet<NodeKey> = graph.nodes.keys().cloned().collect();
    let mut graph = graph;
    graph.fingerprint = delta.new_fingerprint;
    let mut added_keys: HashMap<&PredId, BTreeSet<u64>> = HashMap::new();
    for (pred, key) in &delta.added_clauses {
        added_keys.entry(pred).or_default().insert(*key);
    }
    let mut seeds: Vec<NodeKey> = Vec::new();
    for pred in &delta.changed_preds {
        for (key, _) in graph.nodes_of(pred) {
            seeds.push(key.clone());
        }
    }
    let mut analyzer = Analyzer::new(new_prog, graph, trace);
    for key in &seeds {
        if let Some(added) = added_keys.get(&key.pred) {
            let clauses = &new_prog.preds[&key.pred];
            for (i, c) in clauses.iter().enumerate() {
                if added.contains(&c.clause_key) {
                    analyzer.enqueue(key.clone(), i);
                }
            }
        }
    }
    reseed_entries(&mut analyzer, new_prog);
    analyzer.run(cancel).map_err(|_| IncrementalError::Cancelled)?;
    let mut graph = analyzer.graph;
    graph.prune_unreachable();
    let pruned: BTreeSet<NodeKey> =
        pre_keys.iter().filter(|k| !graph.nodes.contains_key(*k)).cloned().collect();
    let reused = pre_keys.len() - pruned.len();
    Ok((
        graph,
        InvalidationReport {
            deleted_nodes: pruned,
            reused_nodes: reused,
            reanalysis_seeds: seeds,
            reason: DeltaReason::Additive,
        },
    ))
}

fn apply_destructive(
    graph: AnalysisGraph,
    new_prog: &ChcProgram,
    delta: &ProgramDelta,
    cancel: &CancelToken,
    trace: bool,
    reason: DeltaReason,
) -> Result<(AnalysisGraph, InvalidationReport), IncrementalError> {
    let mut graph = graph;
    let pre_keys: BTreeSet<NodeKey> = graph.nodes.keys().cloned().collect();
    let dirty_preds: BTreeSet<&PredId> =
        delta.changed_preds.iter().chain(delta.entry_changed_preds.iter()).collect();
    // transitive closure over reverse arcs: every node whose success
    // computation consumed a dirty node is deleted too
    let mut to_delete: BTreeSet<NodeKey> = graph
        .nodes
        .keys()
        .filter(|k| dirty_preds.contains(&k.pred))
        .cloned()
        .collect();
    let mut stack: Vec<NodeKey> = to_delete.iter().cloned().collect();
    while let Some(k) = stack.pop() {
        let consumers: Vec<NodeKey> =
            graph.dependents(&k).map(|(node, _, _)| node.clone()).collect();
        for c in consumers {
            if to_delete.insert(c.clone()) {
                stack.push(c);
            }
        }
    }
    graph.remove_arcs_touching(&to_delete);
    for k in &to_delete {
        graph.nodes.remove(k);
    }
    graph.entry_keys.clear();
    graph.fingerprint = delta.new_fingerprint;

    let mut analyzer = Analyzer::new(new_prog, graph, trace);
    let seeds = reseed_entries(&mut analyzer, new_prog);
    analyzer.run(cancel).map_err(|_| IncrementalError::Cancelled)?;
    let mut graph = analyzer.graph;
    graph.prune_unreachable();
    let mut deleted = to_delete;
    for k in &pre_keys {
        if !graph.nodes.contains_key(k) {
            deleted.insert(k.clone());
        }
    }
    let reused = graph.nodes.keys().filter(|k| pre_keys.contains(*k)).count();
    Ok((
        graph,
        InvalidationReport { deleted_nodes: deleted, reused_nodes: reused, reanalysis_seeds: seeds, reason },
    ))
}

/// Recomputes the entry set for the new program and seeds any entry whose
/// node is missing. Returns the keys that were (re)created.
fn reseed_entries(analyzer: &mut Analyzer<'_>, new_prog: &ChcProgram) -> Vec<NodeKey> {
    let domain = analyzer.graph.domain;
    let (entries, _) = entries_of(new_prog, domain);
    let mut created = Vec::new();
    analyzer.graph.entry_keys.clear();
    for (pred, call) in entries {
        let key = NodeKey { pred: pred.clone(), call: call.clone() };
        let existed = analyzer.graph.nodes.contains_key(&key);
        analyzer.seed_entry(pred, call);
        if !existed {
            created.push(key);
        }
    }
    created
}
