//! Synthetic corpus generator, random edit scripts, and the benchmark
//! runner comparing incremental updates against from-scratch analysis.

use crate::chc::{diff, fingerprint, normalize, ChcProgram};
use crate::diag::FileTable;
use crate::domains::DomainKind;
use crate::engine::{analyze, entries_of, CancelToken};
use crate::incremental::apply_delta;
use crate::syntax::parse_program;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::Write;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Chain,
    Tree,
    Dense,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub seed: u64,
    pub files: usize,
    pub clauses_total: usize,
    pub preds: usize,
    pub shape: Shape,
    pub assertion_density: f64,
}

#[derive(Debug)]
pub struct SpecError(pub String);

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "infeasible corpus spec: {}", self.0)
    }
}

impl std::error::Error for SpecError {}

impl CorpusSpec {
    fn validate(&self) -> Result<(), SpecError> {
        if self.preds == 0 || self.files == 0 {
            return Err(SpecError("need at least one predicate and one file".into()));
        }
        if self.clauses_total < self.preds {
            return Err(SpecError(format!(
                "clauses_total {} < preds {}",
                self.clauses_total, self.preds
            )));
        }
        if !(0.0..=1.0).contains(&self.assertion_density) {
            return Err(SpecError(format!("density {} outside [0,1]", self.assertion_density)));
        }
        Ok(())
    }
}

/// Generates the corpus: one source text per file. Deterministic per seed.
///
/// Every predicate is a structural recursion over its first (list) argument
/// — terminating by construction — that calls its callees on the tail.
/// Predicate 0 is a hub reached from most others so destructive edits fan
/// out. With assertions at the given density, plus one ground entry.
pub fn gen_program(spec: &CorpusSpec) -> Result<Vec<String>, SpecError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.preds;
    // callee sets per predicate, acyclic (callee index < caller) so the
    // call graph is layered; shape controls the fan-out
    let mut callees: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 1..n {
        let mut picks: Vec<usize> = match spec.shape {
            Shape::Chain => vec![i - 1],
            Shape::Tree => {
                let k = 1 + (rng.next_u32() as usize % 2);
                (0..k).map(|_| rng.next_u32() as usize % i).collect()
            }
            Shape::Dense => {
                let k = 1 + (rng.next_u32() as usize % 4.min(i));
                (0..k).map(|_| rng.next_u32() as usize % i).collect()
            }
        };
        if i > 1 && matches!(spec.shape, Shape::Dense) && rng.next_u32() % 3 == 0 {
            picks.push(0); // the hub
        }
        picks.sort_unstable();
        picks.dedup();
        callees[i] = picks;
    }

    let mut clauses_of: Vec<Vec<String>> = vec![Vec::new(); n];
    for (i, cs) in clauses_of.iter_mut().enumerate() {
        // base case
        cs.push(format!("w{i}([],[])."));
        // recursive case calling the callees on the tail
        let calls: String = callees[i]
            .iter()
            .map(|&j| format!(", w{j}(Xs,_)"))
            .collect();
        cs.push(format!("w{i}([X|Xs],[X|Ys]) :- w{i}(Xs,Ys){calls}."));
    }
    // pad with extra ground-fact clauses, spread round-robin
    let mut extra = spec.clauses_total.saturating_sub(2 * n);
    let mut i = 0;
    while extra > 0 {
        let c = rng.next_u32() % 2;
        clauses_of[i % n].push(format!("w{}([{}],[{}]).", i % n, c, c));
        extra -= 1;
        i += 1;
    }

    let mut texts = vec![String::new(); spec.files];
    for (i, cs) in clauses_of.iter().enumerate() {
        let file = &mut texts[i % spec.files];
        if rng.gen_bool(spec.assertion_density.clamp(0.0, 1.0)) {
            file.push_str(&format!(
                ":- pred w{i}(X,Y) : (ground(X), list(X)) => (ground(Y), list(Y)).\n"
            ));
        }
        for c in cs {
            file.push_str(c);
            file.push('\n');
        }
    }
    // entry on the top of the layering so analysis reaches everything
    texts[0].insert_str(
        0,
        &format!(":- entry w{}(X,Y) : (ground(X), list(X)).\n", n - 1),
    );
    Ok(texts)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Edit {
    AddClause { pred: usize },
    DeleteClause { pred: usize, index: usize },
    ModifyClause { pred: usize, index: usize },
    EditAssertion { index: usize },
}

impl Edit {
    pub fn kind(&self) -> &'static str {
        match self {
            Edit::AddClause { .. } => "add_clause",
            Edit::DeleteClause { .. } => "delete_clause",
            Edit::ModifyClause { .. } => "modify_clause",
            Edit::EditAssertion { .. } => "edit_assertion",
        }
    }
}

pub type EditScript = Vec<Edit>;

/// A corpus as mutable lines of source, addressable by the edit script
/// vocabulary.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub texts: Vec<String>,
    pub preds: usize,
    serial: usize,
}

impl Corpus {
    pub fn new(texts: Vec<String>, preds: usize) -> Self {
        Corpus { texts, preds, serial: 0 }
    }

    fn clause_lines(&self, pred: usize) -> Vec<(usize, usize)> {
        let head = format!("w{pred}(");
        let mut out = Vec::new();
        for (fi, text) in self.texts.iter().enumerate() {
            for (li, line) in text.lines().enumerate() {
                if line.starts_with(&head) {
                    out.push((fi, li));
                }
            }
        }
        out
    }

    fn assertion_lines(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (fi, text) in self.texts.iter().enumerate() {
            for (li, line) in text.lines().enumerate() {
                if line.starts_with(":- pred ") {
                    out.push((fi, li));
                }
            }
        }
        out
    }

    fn replace_line(&mut self, file: usize, line: usize, new: Option<String>) {
        let mut lines: Vec<String> = self.texts[file].lines().map(str::to_string).collect();
        match new {
            Some(l) => lines[line] = l,
            None => {
                lines.remove(line);
            }
        }
        self.texts[file] = lines.join("\n") + "\n";
    }

    pub fn apply(&mut self, edit: &Edit) {
        self.serial += 1;
        let s = self.serial;
        match edit {
            Edit::AddClause { pred } => {
                let file = pred % self.texts.len();
                self.texts[file].push_str(&format!("w{pred}([{s},{s}],[{s},{s}]).\n"));
            }
            Edit::DeleteClause { pred, index } => {
                let lines = self.clause_lines(*pred);
                let (f, l) = lines[index % lines.len()];
                self.replace_line(f, l, None);
            }
            Edit::ModifyClause { pred, index } => {
                let lines = self.clause_lines(*pred);
                let (f, l) = lines[index % lines.len()];
                self.replace_line(f, l, Some(format!("w{pred}([{s}],[{s}]).")));
            }
            Edit::EditAssertion { index } => {
                let lines = self.assertion_lines();
                if lines.is_empty() {
                    return;
                }
                let (f, l) = lines[index % lines.len()];
                let pred = self.texts[f]
                    .lines()
                    .nth(l)
                    .and_then(|line| line.split('w').nth(1))
                    .and_then(|rest| rest.split('(').next())
                    .and_then(|d| d.parse::<usize>().ok())
                    .unwrap_or(0);
                self.replace_line(
                    f,
                    l,
                    Some(format!(":- pred w{pred}(X,Y) : ground(X) => ground(Y). % v{s}")),
                );
            }
        }
    }
}

/// Random edit script, valid against the corpus at each position.
pub fn gen_edit_script(seed: u64, corpus: &Corpus, len: usize) -> Result<EditScript, SpecError> {
    if corpus.texts.iter().all(|t| t.is_empty()) {
        return Err(SpecError("empty program".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let has_assertions = !corpus.assertion_lines().is_empty();
    let mut script = Vec::with_capacity(len);
    let mut probe = corpus.clone();
    for _ in 0..len {
        let edit = loop {
            let pred = rng.next_u32() as usize % corpus.preds;
            let candidate = match rng.next_u32() % 4 {
                0 => Edit::AddClause { pred },
                1 => Edit::DeleteClause { pred, index: rng.next_u32() as usize },
                2 => Edit::ModifyClause { pred, index: rng.next_u32() as usize },
                _ if has_assertions => Edit::EditAssertion { index: rng.next_u32() as usize },
                _ => Edit::AddClause { pred },
            };
            // keep at least one clause per predicate so deletes stay valid
            if let Edit::DeleteClause { pred, .. } = &candidate {
                if probe.clause_lines(*pred).len() <= 1 {
                    continue;
                }
            }
            break candidate;
        };
        probe.apply(&edit);
        script.push(edit);
    }
    Ok(script)
}

// --- benchmark runner ------------------------------------------------------

pub const CSV_HEADER: &str =
    "edit_kind,scratch_ms,incremental_ms,speedup,nodes_reused,nodes_recomputed,graphs_equal";

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub edit_kind: &'static str,
    pub scratch_ms: f64,
    pub incremental_ms: f64,
    pub speedup: f64,
    pub nodes_reused: usize,
    pub nodes_recomputed: u64,
    pub graphs_equal: bool,
}

fn parse_corpus(corpus: &Corpus) -> ChcProgram {
    let mut files = FileTable::new();
    let asts: Vec<_> = corpus
        .texts
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let id = files.intern(&format!("gen{i}.pl"));
            parse_program(t, id)
        })
        .collect();
    normalize(&asts)
}

fn timed<T>(reps: usize, mut f: impl FnMut() -> T) -> (f64, T) {
    let mut times: Vec<f64> = Vec::with_capacity(reps);
    let mut last = None;
    for _ in 0..reps {
        let t = Instant::now();
        last = Some(f());
        times.push(t.elapsed().as_secs_f64() * 1000.0);
    }
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    (times[times.len() / 2], last.unwrap())
}

/// Runs one edit script over the corpus, timing incremental vs scratch at
/// every step (median of `reps`), verifying structural equality.
pub fn run_bench(
    corpus: &Corpus,
    script: &EditScript,
    domain: DomainKind,
    reps: usize,
) -> Result<Vec<BenchRow>, SpecError> {
    let mut corpus = corpus.clone();
    let mut prog = parse_corpus(&corpus);
    let (entries, _) = entries_of(&prog, domain);
    let cancel = CancelToken::new();
    let mut graph = analyze(&prog, &entries, domain, &cancel)
        .map_err(|_| SpecError("cancelled".into()))?;
    let mut rows = Vec::new();
    for edit in script {
        corpus.apply(edit);
        let new_prog = parse_corpus(&corpus);
        let delta = diff(&prog, &new_prog);
        let (incremental_ms, inc_result) = timed(reps, || {
            apply_delta(graph.clone(), &new_prog, &delta, &cancel)
                .map_err(|e| SpecError(e.to_string()))
        });
        let (new_graph, report) = inc_result?;
        let (scratch_ms, scratch_graph) = timed(reps, || {
            let (entries, _) = entries_of(&new_prog, domain);
            analyze(&new_prog, &entries, domain, &cancel).expect("not cancelled")
        });
        let graphs_equal = new_graph.same_result(&scratch_graph);
        rows.push(BenchRow {
            edit_kind: edit.kind(),
            scratch_ms,
            incremental_ms,
            speedup: if incremental_ms > 0.0 { scratch_ms / incremental_ms } else { f64::INFINITY },
            nodes_reused: report.reused_nodes,
            nodes_recomputed: new_graph.stats.node_recomputations
                - graph.stats.node_recomputations,
            graphs_equal,
        });
        if !graphs_equal {
            return Err(SpecError(format!(
                "incremental result diverged from scratch after {} (fingerprint {:#x})",
                edit.kind(),
                fingerprint(&new_prog)
            )));
        }
        prog = new_prog;
        graph = new_graph;
    }
    Ok(rows)
}

pub fn write_csv(rows: &[BenchRow], out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{:.3},{:.3},{:.2},{},{},{}",
            r.edit_kind,
            r.scratch_ms,
            r.incremental_ms,
            r.speedup,
            r.nodes_reused,
            r.nodes_recomputed,
            r.graphs_equal
        )?;
    }
    Ok(())
}

/// The desk-scale mirror of the paper's experiment: 27 files, ~5k clauses,
/// dense call graph with a hub.
pub fn desk_scale_spec(seed: u64) -> CorpusSpec {
    CorpusSpec {
        seed,
        files: 27,
        clauses_total: 5200,
        preds: 260,
        shape: Shape::Dense,
        assertion_density: 0.3,
    }
}
