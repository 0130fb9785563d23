//! Workspace state, the one-shot batch checker, and the stdio daemon that
//! debounces edits, keeps the analysis graph up to date incrementally, and
//! emits diagnostics over a line-delimited JSON protocol.

use crate::chc::{diff, dump_chc, fingerprint, normalize, ChcProgram};
use crate::checker::{check_all, render_verdict, verdict_to_diagnostic};
use crate::diag::{Diagnostic, FileTable, Severity};
use crate::domains::{auto_select_domain, DomainKind};
use crate::engine::{analyze_traced, entries_of, AnalysisGraph, CancelToken};
use crate::incremental::{apply_delta_traced, InvalidationReport};
use crate::snapshot::{load_snapshot_unchecked, save_snapshot, SnapshotFormat};
use crate::syntax::{parse_program, SourceAst};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::sync::mpsc;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, Serialize, Default, PartialEq, Eq)]
pub struct TimingStats {
    pub load_ms: u64,
    pub analysis_ms: u64,
    pub check_ms: u64,
    pub incremental: bool,
    pub nodes_reused: u64,
    pub nodes_recomputed: u64,
}

/// Diagnostic in wire form: path instead of file id, explicit span fields.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct WireDiag {
    pub file: String,
    pub line_start: u32,
    pub col_start: u32,
    pub line_end: u32,
    pub col_end: u32,
    pub severity: Severity,
    pub code: String,
    pub message: String,
}

pub fn wire_diagnostics(diags: &[Diagnostic], files: &FileTable) -> Vec<WireDiag> {
    diags
        .iter()
        .map(|d| WireDiag {
            file: files.path(d.span.file).to_string(),
            line_start: d.span.start_line,
            col_start: d.span.start_col,
            line_end: d.span.end_line,
            col_end: d.span.end_col,
            severity: d.severity,
            code: d.code.clone(),
            message: d.message.clone(),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DomainChoice {
    #[default]
    Auto,
    Fixed(DomainKind),
}

impl DomainChoice {
    pub fn parse(s: &str) -> Option<Self> {
        if s == "auto" {
            return Some(DomainChoice::Auto);
        }
        DomainKind::parse(s).map(DomainChoice::Fixed)
    }

    fn resolve(self, prog: &ChcProgram) -> DomainKind {
        match self {
            DomainChoice::Fixed(k) => k,
            DomainChoice::Auto => {
                let lits = prog
                    .assertions
                    .iter()
                    .flat_map(|a| a.pre.0.iter().chain(a.post.0.iter()))
                    .chain(prog.entries.iter().flat_map(|e| e.pre.0.iter()));
                auto_select_domain(lits)
            }
        }
    }
}

pub struct Outcome {
    pub prog: ChcProgram,
    pub graph: AnalysisGraph,
    pub diagnostics: Vec<Diagnostic>,
    pub stats: TimingStats,
    pub report: Option<InvalidationReport>,
}

/// Parses, normalizes, analyzes (incrementally when a previous fixpoint for
/// a matching program version is supplied), and checks. The single pipeline
/// behind both the batch CLI and the daemon.
pub fn run_analysis(
    sources: &[(String, String)],
    files: &mut FileTable,
    prev: Option<(&ChcProgram, AnalysisGraph)>,
    warm: Option<AnalysisGraph>,
    choice: DomainChoice,
    cancel: &CancelToken,
    trace_fixpoint: bool,
    trace_incremental: bool,
) -> Option<Outcome> {
    let t0 = Instant::now();
    let mut asts: Vec<SourceAst> = Vec::new();
    let mut diagnostics: Vec<Diagnostic> = Vec::new();
    for (path, text) in sources {
        let id = files.intern(path);
        let ast = parse_program(text, id);
        diagnostics.extend(ast.syntax_errors.iter().cloned());
        asts.push(ast);
    }
    let prog = normalize(&asts);
    diagnostics.extend(prog.diagnostics.iter().cloned());
    let domain = choice.resolve(&prog);
    let load_ms = t0.elapsed().as_millis() as u64;

    let t1 = Instant::now();
    let mut incremental = false;
    let mut nodes_reused = 0u64;
    let mut report = None;
    // warm start: a snapshot of this exact program version stands in for the
    // whole fixpoint computation
    let warm_hit = warm.filter(|w| w.domain == domain && w.fingerprint == fingerprint(&prog));
    let (graph, recomputed) = match (warm_hit, prev) {
        (Some(w), _) => {
            incremental = true;
            nodes_reused = w.nodes.len() as u64;
            (w, 0)
        }
        (None, Some((old_prog, old_graph)))
            if old_graph.domain == domain && old_graph.fingerprint == fingerprint(old_prog) =>
        {
            let delta = diff(old_prog, &prog);
            let recomp_before = old_graph.stats.node_recomputations;
            match apply_delta_traced(old_graph, &prog, &delta, cancel, trace_fixpoint) {
                Ok((graph, rep)) => {
                    incremental = true;
                    nodes_reused = rep.reused_nodes as u64;
                    if trace_incremental {
                        eprintln!(
                            "INCR {}",
                            serde_json::to_string(&rep).expect("report serializes")
                        );
                    }
                    let recomputed = graph.stats.node_recomputations - recomp_before;
                    report = Some(rep);
                    (graph, recomputed)
                }
                Err(crate::incremental::IncrementalError::Cancelled) => return None,
                Err(_) => scratch(&prog, domain, cancel, trace_fixpoint, &mut diagnostics)?,
            }
        }
        (None, _) => scratch(&prog, domain, cancel, trace_fixpoint, &mut diagnostics)?,
    };
    let analysis_ms = t1.elapsed().as_millis() as u64;

    let t2 = Instant::now();
    let verdicts = check_all(&graph, &prog);
    diagnostics.extend(verdicts.iter().map(verdict_to_diagnostic));
    diagnostics.sort();
    let check_ms = t2.elapsed().as_millis() as u64;

    Some(Outcome {
        prog,
        graph,
        diagnostics,
        stats: TimingStats {
            load_ms,
            analysis_ms,
            check_ms,
            incremental,
            nodes_reused,
            nodes_recomputed: recomputed,
        },
        report,
    })
}

fn scratch(
    prog: &ChcProgram,
    domain: DomainKind,
    cancel: &CancelToken,
    trace: bool,
    diagnostics: &mut Vec<Diagnostic>,
) -> Option<(AnalysisGraph, u64)> {
    let (entries, entry_diags) = entries_of(prog, domain);
    diagnostics.extend(entry_diags);
    let graph = analyze_traced(prog, &entries, domain, cancel, trace).ok()?;
    let recomputed = graph.stats.node_recomputations;
    Some((graph, recomputed))
}

// --- batch mode ------------------------------------------------------------

#[derive(Debug, Clone, Default)]
pub struct BatchOptions {
    pub domain: DomainChoice,
    pub json: bool,
    pub dump_chc: bool,
    pub trace_fixpoint: bool,
    pub trace_incremental: bool,
}

/// One-shot check of a set of files. Exit code: 0 clean, 1 if any `false`
/// verdict, 2 on syntax or usage errors.
pub fn run_batch(paths: &[PathBuf], opts: &BatchOptions, out: &mut impl Write) -> i32 {
    let mut sources = Vec::new();
    for p in paths {
        match std::fs::read_to_string(p) {
            Ok(text) => sources.push((p.display().to_string(), text)),
            Err(e) => {
                eprintln!("verifly: cannot read {}: {e}", p.display());
                return 2;
            }
        }
    }
    let mut files = FileTable::new();
    let outcome = run_analysis(
        &sources,
        &mut files,
        None,
        None,
        opts.domain,
        &CancelToken::new(),
        opts.trace_fixpoint,
        opts.trace_incremental,
    )
    .expect("batch analysis is never cancelled");
    if opts.dump_chc {
        let _ = writeln!(out, "{}", dump_chc(&outcome.prog));
    }
    if opts.json {
        let doc = serde_json::json!({
            "diagnostics": wire_diagnostics(&outcome.diagnostics, &files),
            "stats": outcome.stats,
        });
        let _ = writeln!(out, "{doc}");
    } else {
        let verdicts = check_all(&outcome.graph, &outcome.prog);
        for d in &outcome.diagnostics {
            if d.code.starts_with("assrt.") {
                continue;
            }
            let _ = writeln!(
                out,
                "{}:{}:{}: {}: {}",
                files.path(d.span.file),
                d.span.start_line,
                d.span.start_col,
                d.severity,
                d.message
            );
        }
        for v in &verdicts {
            let _ = writeln!(out, "{}", render_verdict(v, &files));
        }
    }
    let syntax_errors = outcome.diagnostics.iter().any(|d| d.code == "syntax");
    let any_false = outcome.diagnostics.iter().any(|d| d.code == "assrt.false");
    if syntax_errors {
        2
    } else if any_false {
        1
    } else {
        0
    }
}

// --- daemon ----------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ServeConfig {
    pub debounce: Duration,
    pub snapshot: Option<PathBuf>,
    pub snapshot_format: SnapshotFormat,
    pub domain: DomainChoice,
}

impl Default for ServeConfig {
    fn default() -> Self {
        ServeConfig {
            debounce: Duration::from_millis(300),
            snapshot: None,
            snapshot_format: SnapshotFormat::Bin,
            domain: DomainChoice::Auto,
        }
    }
}

#[derive(Debug, Deserialize)]
struct Request {
    seq: Option<i64>,
    method: Option<String>,
    file: Option<String>,
    text: Option<String>,
}

/// The daemon state machine, synchronous and transport-free so tests can
/// drive it directly. [`serve`] adds the stdio transport and debounce
/// timing on top.
pub struct Daemon {
    cfg: ServeConfig,
    sources: Vec<(String, String)>,
    files: FileTable,
    prog: Option<ChcProgram>,
    graph: Option<AnalysisGraph>,
    warm: Option<AnalysisGraph>,
    stats: TimingStats,
    diagnostics: Vec<Diagnostic>,
    pub generation: u64,
    /// Seq of the last open/edit awaiting its debounced response.
    pending_seq: Option<i64>,
    shutting_down: bool,
}

impl Daemon {
    pub fn new(cfg: ServeConfig) -> Self {
        let warm = cfg
            .snapshot
            .as_ref()
            .and_then(|p| std::fs::read(p).ok())
            .and_then(|bytes| load_snapshot_unchecked(&bytes).ok());
        Daemon {
            cfg,
            sources: Vec::new(),
            files: FileTable::new(),
            prog: None,
            graph: None,
            warm,
            stats: TimingStats::default(),
            diagnostics: Vec::new(),
            generation: 0,
            pending_seq: None,
            shutting_down: false,
        }
    }

    pub fn wants_flush(&self) -> bool {
        self.pending_seq.is_some()
    }

    pub fn is_shutting_down(&self) -> bool {
        self.shutting_down
    }

    /// Handles one protocol line, appending any immediate responses.
    /// Debounced work is signalled via [`Self::wants_flush`]; the transport
    /// calls [`Self::flush`] when the quiet period elapses.
    pub fn handle_line(&mut self, line: &str, out: &mut Vec<String>) {
        let line = line.trim();
        if line.is_empty() {
            return;
        }
        let req: Request = match serde_json::from_str(line) {
            Ok(r) => r,
            Err(e) => {
                out.push(error_response(0, "proto.malformed", &format!("bad request: {e}")));
                return;
            }
        };
        let seq = req.seq.unwrap_or(0);
        match req.method.as_deref() {
            Some("open") | Some("edit") => match (req.file, req.text) {
                (Some(file), Some(text)) => {
                    match self.sources.iter_mut().find(|(p, _)| *p == file) {
                        Some(slot) => slot.1 = text,
                        None => self.sources.push((file, text)),
                    }
                    self.generation += 1;
                    self.pending_seq = Some(seq);
                }
                _ => out.push(error_response(
                    seq,
                    "proto.malformed",
                    "open/edit require \"file\" and \"text\"",
                )),
            },
            Some("check") => {
                self.analyze_now();
                out.push(self.diagnostics_response(seq));
                self.pending_seq = None;
            }
            Some("stats") => {
                out.push(self.stats_response(seq));
            }
            Some("shutdown") => {
                self.save_snapshot_if_configured();
                out.push(self.stats_response(seq));
                self.shutting_down = true;
            }
            Some(other) => {
                out.push(error_response(seq, "proto.unknown", &format!("unknown method {other:?}")))
            }
            None => out.push(error_response(seq, "proto.malformed", "missing \"method\"")),
        }
    }

    /// Runs the debounced analysis and emits the response for the last
    /// open/edit.
    pub fn flush(&mut self, out: &mut Vec<String>) {
        if let Some(seq) = self.pending_seq.take() {
            self.analyze_now();
            out.push(self.diagnostics_response(seq));
        }
    }

    fn analyze_now(&mut self) {
        let prev = match (self.prog.take(), self.graph.take()) {
            (Some(p), Some(g)) => Some((p, g)),
            _ => None,
        };
        let warm = if prev.is_none() { self.warm.take() } else { None };
        let outcome = run_analysis(
            &self.sources,
            &mut self.files,
            prev.as_ref().map(|(p, g)| (p, g.clone())),
            warm,
            self.cfg.domain,
            &CancelToken::new(),
            false,
            false,
        )
        .expect("synchronous analysis is never cancelled");
        self.prog = Some(outcome.prog);
        self.graph = Some(outcome.graph);
        self.diagnostics = outcome.diagnostics;
        self.stats = outcome.stats;
    }

    fn diagnostics_response(&self, seq: i64) -> String {
        serde_json::json!({
            "seq": seq,
            "generation": self.generation,
            "diagnostics": wire_diagnostics(&self.diagnostics, &self.files),
            "stats": self.stats,
        })
        .to_string()
    }

    fn stats_response(&self, seq: i64) -> String {
        serde_json::json!({
            "seq": seq,
            "generation": self.generation,
            "diagnostics": [],
            "stats": self.stats,
        })
        .to_string()
    }

    fn save_snapshot_if_configured(&mut self) {
        if let (Some(path), Some(graph)) = (&self.cfg.snapshot, &self.graph) {
            let bytes = save_snapshot(graph, self.cfg.snapshot_format);
            if let Err(e) = std::fs::write(path, bytes) {
                log::warn!("failed to write snapshot {}: {e}", path.display());
            }
        }
    }
}

fn error_response(seq: i64, code: &str, message: &str) -> String {
    serde_json::json!({ "seq": seq, "error": { "code": code, "message": message } }).to_string()
}

/// Stdio transport: a reader thread feeds lines into the request loop,
/// which debounces open/edit bursts with `recv_timeout` and flushes when
/// the quiet period elapses. EOF acts as shutdown.
pub fn serve(cfg: ServeConfig, input: impl BufRead + Send + 'static, mut output: impl Write) {
    let (tx, rx) = mpsc::channel::<Option<String>>();
    std::thread::spawn(move || {
        for line in input.lines() {
            match line {
                Ok(l) => {
                    if tx.send(Some(l)).is_err() {
                        return;
                    }
                }
                Err(_) => break,
            }
        }
        let _ = tx.send(None);
    });
    let mut daemon = Daemon::new(cfg.clone());
    let mut responses = Vec::new();
    let mut deadline: Option<Instant> = None;
    loop {
        let msg = match deadline {
            Some(d) => {
                let now = Instant::now();
                if now >= d {
                    deadline = None;
                    daemon.flush(&mut responses);
                    emit(&mut output, &mut responses);
                    continue;
                }
                match rx.recv_timeout(d - now) {
                    Ok(m) => m,
                    Err(mpsc::RecvTimeoutError::Timeout) => continue,
                    Err(mpsc::RecvTimeoutError::Disconnected) => None,
                }
            }
            None => match rx.recv() {
                Ok(m) => m,
                Err(_) => None,
            },
        };
        match msg {
            Some(line) => {
                let was_pending = daemon.wants_flush();
                daemon.handle_line(&line, &mut responses);
                emit(&mut output, &mut responses);
                if daemon.is_shutting_down() {
                    return;
                }
                if daemon.wants_flush() {
                    // each edit restarts the quiet period
                    deadline = Some(Instant::now() + cfg.debounce);
                } else if was_pending && !daemon.wants_flush() {
                    deadline = None;
                }
            }
            None => {
                // EOF: flush pending work, save state, exit
                daemon.flush(&mut responses);
                daemon.save_snapshot_if_configured();
                emit(&mut output, &mut responses);
                return;
            }
        }
    }
}

fn emit(output: &mut impl Write, responses: &mut Vec<String>) {
    for r in responses.drain(..) {
        let _ = writeln!(output, "{r}");
    }
    let _ = output.flush();
}
