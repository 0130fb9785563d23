//! Goal-dependent, multivariant fixpoint engine. Builds the analysis graph
//! of call/success patterns and dependency arcs from the entry points,
//! deterministically and to a least fixed point.

use crate::chc::{fingerprint, pred_name, BodyStep, ChcProgram, PredId};
use crate::diag::{Diagnostic, Severity};
use crate::domains::{abstract_props, AbsSub, DomainKind};
use crate::syntax::Term;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

/// Cooperative cancellation flag polled between node recomputations.
#[derive(Debug, Clone, Default)]
pub struct CancelToken(Arc<AtomicBool>);

impl CancelToken {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, Ordering::SeqCst);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(Ordering::SeqCst)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cancelled;

/// One analysis node: a predicate under a canonical call pattern (over
/// argument positions `0..arity`). Renamed-apart identical calls collide.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeKey {
    pub pred: PredId,
    pub call: AbsSub,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeState {
    InProgress,
    Fixpointed,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeInfo {
    pub success: AbsSub,
    pub state: NodeState,
    /// Set for nodes created for calls to predicates with no clauses; their
    /// success is Top (unknown code guarantees nothing).
    pub unknown: bool,
}

/// Source endpoint of a dependency arc: the consuming node, the clause (by
/// content key), and the body position of the call. Each source has at most
/// one outgoing arc; re-evaluating a clause overwrites its stale arcs.
pub type ArcSource = (NodeKey, u64, u32);

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DepArc {
    pub from: ArcSource,
    pub to: NodeKey,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Stats {
    pub nodes_created: u64,
    /// Clause evaluations that strictly grew some node's success.
    pub node_recomputations: u64,
    pub body_steps: u64,
}

#[derive(Debug, Clone)]
pub struct AnalysisGraph {
    pub domain: DomainKind,
    pub fingerprint: u64,
    pub nodes: BTreeMap<NodeKey, NodeInfo>,
    pub arcs: BTreeMap<ArcSource, NodeKey>,
    pub entry_keys: Vec<NodeKey>,
    pub stats: Stats,
    /// Reverse-arc index: callee -> consuming arc sources. Derived from
    /// `arcs`; maintained eagerly, rebuilt on snapshot load.
    rev: HashMap<NodeKey, BTreeSet<ArcSource>>,
}

impl AnalysisGraph {
    pub fn new(domain: DomainKind) -> Self {
        AnalysisGraph {
            domain,
            fingerprint: 0,
            nodes: BTreeMap::new(),
            arcs: BTreeMap::new(),
            entry_keys: Vec::new(),
            stats: Stats::default(),
            rev: HashMap::new(),
        }
    }

    pub fn add_arc(&mut self, from: ArcSource, to: NodeKey) {
        if let Some(old_to) = self.arcs.insert(from.clone(), to.clone()) {
            if old_to == to {
                return;
            }
            if let Some(set) = self.rev.get_mut(&old_to) {
                set.remove(&from);
                if set.is_empty() {
                    self.rev.remove(&old_to);
                }
            }
        }
        self.rev.entry(to).or_default().insert(from);
    }

    pub fn remove_arcs_touching(&mut self, dead: &BTreeSet<NodeKey>) {
        let (keep, drop): (BTreeMap<ArcSource, NodeKey>, BTreeMap<ArcSource, NodeKey>) =
            std::mem::take(&mut self.arcs)
                .into_iter()
                .partition(|(from, to)| !dead.contains(&from.0) && !dead.contains(to));
        self.arcs = keep;
        for (from, to) in drop {
            if let Some(set) = self.rev.get_mut(&to) {
                set.remove(&from);
                if set.is_empty() {
                    self.rev.remove(&to);
                }
            }
        }
    }

    /// Drops every node (and its arcs) unreachable from the entries. Runs
    /// at the end of each analysis so transient call patterns visited on
    /// the way to the fixpoint never linger in the result.
    pub fn prune_unreachable(&mut self) {
        let mut fwd: HashMap<&NodeKey, Vec<&NodeKey>> = HashMap::new();
        for (from, to) in &self.arcs {
            fwd.entry(&from.0).or_default().push(to);
        }
        let mut reachable: BTreeSet<NodeKey> = BTreeSet::new();
        let mut stack: Vec<&NodeKey> = self.entry_keys.iter().collect();
        while let Some(k) = stack.pop() {
            if reachable.insert(k.clone()) {
                if let Some(next) = fwd.get(k) {
                    stack.extend(next.iter().copied());
                }
            }
        }
        let dead: BTreeSet<NodeKey> =
            self.nodes.keys().filter(|k| !reachable.contains(k)).cloned().collect();
        if dead.is_empty() {
            return;
        }
        self.remove_arcs_touching(&dead);
        for k in &dead {
            self.nodes.remove(k);
        }
    }

    pub fn dependents(&self, key: &NodeKey) -> impl Iterator<Item = &ArcSource> {
        self.rev.get(key).into_iter().flatten()
    }

    pub fn rebuild_rev_index(&mut self) {
        self.rev.clear();
        for (from, to) in &self.arcs {
            self.rev.entry(to.clone()).or_default().insert(from.clone());
        }
    }

    /// Structural equality of the analysis result: nodes with successes,
    /// arcs, and the entry set. Stats are not part of the result.
    pub fn same_result(&self, other: &AnalysisGraph) -> bool {
        self.domain == other.domain
            && self.nodes == other.nodes
            && self.arcs == other.arcs
            && self.entry_keys.iter().collect::<BTreeSet<_>>()
                == other.entry_keys.iter().collect::<BTreeSet<_>>()
    }

    /// Nodes of one predicate, in key order.
    pub fn nodes_of<'a>(&'a self, pred: &'a PredId) -> impl Iterator<Item = (&'a NodeKey, &'a NodeInfo)> {
        self.nodes.range(
            NodeKey { pred: pred.clone(), call: AbsSub::Bottom }..,
        )
        .take_while(move |(k, _)| &k.pred == pred)
    }
}

/// Builds the initial call patterns. One entry per entry declaration; if
/// there are none, every predicate never called inside the program gets a
/// Top entry.
pub fn entries_of(
    prog: &ChcProgram,
    domain: DomainKind,
) -> (Vec<(PredId, AbsSub)>, Vec<Diagnostic>) {
    let mut out = Vec::new();
    let mut diags = Vec::new();
    for entry in &prog.entries {
        let Some((name, arity)) = entry.head.functor() else { continue };
        let pred = (name.to_string(), arity);
        let scope: Vec<String> = entry
            .head
            .args()
            .iter()
            .enumerate()
            .map(|(i, a)| match a {
                Term::Var(v) => v.clone(),
                _ => format!("%arg{i}"),
            })
            .collect();
        let mut issues = Vec::new();
        let p = abstract_props(&entry.pre.0, &scope, domain, &mut issues);
        for issue in issues {
            diags.push(Diagnostic::new(
                entry.span,
                Severity::Warning,
                "entry",
                format!("entry for {}: {issue}", pred_name(&pred)),
            ));
        }
        out.push((pred, p.abs));
    }
    if out.is_empty() {
        let mut called: BTreeSet<PredId> = BTreeSet::new();
        for clauses in prog.preds.values() {
            for c in clauses {
                for step in &c.body {
                    if let BodyStep::Call(p, _) = step {
                        called.insert(p.clone());
                    }
                }
            }
        }
        for pred in prog.preds.keys() {
            if !called.contains(pred) {
                out.push((pred.clone(), AbsSub::top(domain, pred.1)));
            }
        }
    }
    (out, diags)
}

pub(crate) struct Analyzer<'p> {
    pub prog: &'p ChcProgram,
    pub graph: AnalysisGraph,
    queue: VecDeque<(NodeKey, usize)>,
    queued: HashSet<(NodeKey, usize)>,
    clause_index: HashMap<(PredId, u64), usize>,
    pub trace: bool,
}

impl<'p> Analyzer<'p> {
    pub fn new(prog: &'p ChcProgram, graph: AnalysisGraph, trace: bool) -> Self {
        let mut clause_index = HashMap::new();
        for (pred, clauses) in &prog.preds {
            for (i, c) in clauses.iter().enumerate() {
                // duplicates map to their first occurrence; they contribute
                // identically so evaluating one copy is enough
                clause_index.entry((pred.clone(), c.clause_key)).or_insert(i);
            }
        }
        Analyzer { prog, graph, queue: VecDeque::new(), queued: HashSet::new(), clause_index, trace }
    }

    pub fn enqueue(&mut self, key: NodeKey, clause_idx: usize) {
        if self.queued.insert((key.clone(), clause_idx)) {
            self.queue.push_back((key, clause_idx));
        }
    }

    pub fn enqueue_all_clauses(&mut self, key: &NodeKey) {
        let n = self.prog.preds.get(&key.pred).map(|c| c.len()).unwrap_or(0);
        for i in 0..n {
            self.enqueue(key.clone(), i);
        }
    }

    /// Looks up or creates the node for a call pattern, returning its
    /// current success. New nodes of known predicates start at Bottom and
    /// have their clauses scheduled; unknown predicates get Top.
    fn get_or_create(&mut self, key: &NodeKey) -> AbsSub {
        if let Some(info) = self.graph.nodes.get(key) {
            return info.success.clone();
        }
        self.graph.stats.nodes_created += 1;
        if self.prog.preds.contains_key(&key.pred) {
            self.graph.nodes.insert(
                key.clone(),
                NodeInfo { success: AbsSub::Bottom, state: NodeState::InProgress, unknown: false },
            );
            self.enqueue_all_clauses(key);
            AbsSub::Bottom
        } else {
            let top = AbsSub::top(self.graph.domain, key.pred.1);
            self.graph.nodes.insert(
                key.clone(),
                NodeInfo { success: top.clone(), state: NodeState::Fixpointed, unknown: true },
            );
            top
        }
    }

    pub fn seed_entry(&mut self, pred: PredId, call: AbsSub) {
        let key = NodeKey { pred, call };
        self.get_or_create(&key);
        if !self.graph.entry_keys.contains(&key) {
            self.graph.entry_keys.push(key);
        }
    }

    /// FIFO worklist loop; re-enqueues dependents whenever a node's success
    /// strictly grows. Terminates: finite lattices, monotone updates.
    pub fn run(&mut self, cancel: &CancelToken) -> Result<(), Cancelled> {
        while let Some((key, ci)) = self.queue.pop_front() {
            self.queued.remove(&(key.clone(), ci));
            if cancel.is_cancelled() {
                return Err(Cancelled);
            }
            self.eval_clause(&key, ci);
        }
        for info in self.graph.nodes.values_mut() {
            info.state = NodeState::Fixpointed;
        }
        Ok(())
    }

    fn eval_clause(&mut self, key: &NodeKey, ci: usize) {
        let clause = &self.prog.preds[&key.pred][ci];
        let mut sub = key.call.extend(clause.nvars as usize);
        let body = &clause.body;
        // one forward pass computes the call patterns from their prefix
        // stores (goal-dependent semantics)
        for (i, step) in body.iter().enumerate() {
            if sub.is_bottom() {
                break;
            }
            match step {
                BodyStep::Call(pred, args) => {
                    let callee = NodeKey { pred: pred.clone(), call: sub.project(args) };
                    self.graph
                        .add_arc((key.clone(), clause.clause_key, i as u32), callee.clone());
                    let succ = self.get_or_create(&callee);
                    sub = apply_success(&sub, &succ, args);
                }
                _ => {
                    self.graph.stats.body_steps += 1;
                    sub = sub.amgu(step);
                }
            }
        }
        // then the unification/builtin constraints are replayed on the exit
        // store to a local fixed point: a call's success can ground
        // variables that an earlier head binding then propagates (e.g.
        // Z = [X|Zs] written before the recursive call that grounds Zs)
        while !sub.is_bottom() {
            let prev = sub.clone();
            for step in body {
                if matches!(step, BodyStep::Call(..)) {
                    continue;
                }
                self.graph.stats.body_steps += 1;
                sub = sub.amgu(step);
                if sub.is_bottom() {
                    break;
                }
            }
            if sub == prev {
                break;
            }
        }
        let contrib = if sub.is_bottom() {
            AbsSub::Bottom
        } else {
            sub.project(&clause.head_vars).glb(&key.call)
        };
        let info = self.graph.nodes.get_mut(key).expect("node exists while queued");
        let new = info.success.lub(&contrib);
        if new != info.success {
            info.success = new;
            self.graph.stats.node_recomputations += 1;
            if self.trace {
                let arg_names: Vec<String> = (1..=key.pred.1).map(|i| format!("v{i}")).collect();
                eprintln!(
                    "RECOMP {} {} -> {}",
                    pred_name(&key.pred),
                    key.call.render(&arg_names),
                    self.graph.nodes[key].success.render(&arg_names)
                );
            }
            // schedule every consumer of this node
            let deps: Vec<(NodeKey, u64)> = self
                .graph
                .dependents(key)
                .map(|(node, ck, _)| (node.clone(), *ck))
                .collect();
            for (node, ck) in deps {
                if let Some(&idx) = self.clause_index.get(&(node.pred.clone(), ck)) {
                    self.enqueue(node, idx);
                }
            }
        }
    }
}

/// Folds a callee's success (over `0..arity`) back into the caller's
/// substitution at the call site.
pub(crate) fn apply_success(sub: &AbsSub, succ: &AbsSub, args: &[u32]) -> AbsSub {
    if succ.is_bottom() || sub.is_bottom() {
        return AbsSub::Bottom;
    }
    let mut out = sub.clone();
    for (i, &a) in args.iter().enumerate() {
        if succ.is_ground(i as u32) {
            out.set_ground(a);
        }
        if !out.meet_type(a, succ.type_of(i as u32)) {
            return AbsSub::Bottom;
        }
    }
    out
}

/// Analyzes a normalized program from the given entry points to a least
/// fixed point.
pub fn analyze(
    prog: &ChcProgram,
    entries: &[(PredId, AbsSub)],
    domain: DomainKind,
    cancel: &CancelToken,
) -> Result<AnalysisGraph, Cancelled> {
    analyze_traced(prog, entries, domain, cancel, false)
}

pub fn analyze_traced(
    prog: &ChcProgram,
    entries: &[(PredId, AbsSub)],
    domain: DomainKind,
    cancel: &CancelToken,
    trace: bool,
) -> Result<AnalysisGraph, Cancelled> {
    let mut graph = AnalysisGraph::new(domain);
    graph.fingerprint = fingerprint(prog);
    let mut analyzer = Analyzer::new(prog, graph, trace);
    for (pred, call) in entries {
        analyzer.seed_entry(pred.clone(), call.clone());
    }
    analyzer.run(cancel)?;
    let mut graph = analyzer.graph;
    graph.prune_unreachable();
    Ok(graph)
}
