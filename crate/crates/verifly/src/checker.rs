//! Assertion checking: compares the analysis fixpoint against every `pred`
//! assertion and assigns each part (calls, success) a status of checked,
//! false, or check. Statuses written in the source are ignored; the checker
//! always recomputes them.

use crate::chc::{pred_name, ChcProgram, PredId};
use crate::diag::{Diagnostic, FileTable, Severity, Span};
use crate::domains::{abstract_props, entails_props, AbsSub, Entailment, PropAbstraction};
use crate::engine::AnalysisGraph;
use crate::syntax::{AssertStatus, AssertionDecl, Term};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AssertPart {
    Calls,
    Success,
}

impl AssertPart {
    pub fn render(self) -> &'static str {
        match self {
            AssertPart::Calls => "calls",
            AssertPart::Success => "success",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssertionVerdict {
    pub span: Span,
    pub pred: PredId,
    pub part: AssertPart,
    pub status: AssertStatus,
    pub message: String,
    /// Rendering of the offending abstract value, when there is one.
    pub witness: Option<String>,
}

/// Argument names for rendering abstract values: the assertion head's
/// variable names where present, positional placeholders otherwise.
fn head_names(head: &Term) -> Vec<String> {
    head.args()
        .iter()
        .enumerate()
        .map(|(i, a)| match a {
            Term::Var(v) => v.clone(),
            _ => format!("_A{}", i + 1),
        })
        .collect()
}

fn abstract_pre(a: &AssertionDecl, graph: &AnalysisGraph, scope: &[String]) -> PropAbstraction {
    let mut issues = Vec::new();
    abstract_props(&a.pre.0, scope, graph.domain, &mut issues)
}

/// One calls-verdict for a predicate: is every inferred call pattern within
/// the union of the asserted preconditions?
pub fn check_calls(
    graph: &AnalysisGraph,
    pred: &PredId,
    assertions: &[&AssertionDecl],
) -> AssertionVerdict {
    let first = assertions[0];
    let scope = head_names(&first.head);
    let span = first.span;
    let mut calls = AbsSub::Bottom;
    let mut reached = false;
    for (key, _) in graph.nodes_of(pred) {
        calls = calls.lub(&key.call);
        reached = true;
    }
    if !reached {
        return AssertionVerdict {
            span,
            pred: pred.clone(),
            part: AssertPart::Calls,
            status: AssertStatus::Checked,
            message: format!("{}: no calls reachable from the entries", pred_name(pred)),
            witness: None,
        };
    }
    let mut pre = AbsSub::Bottom;
    let mut exact = true;
    for a in assertions {
        let p = abstract_pre(a, graph, &scope);
        exact &= p.exact;
        pre = pre.lub(&p.abs);
    }
    let (status, message, witness) = if exact && calls.leq(&pre) {
        (
            AssertStatus::Checked,
            format!("all calls to {} satisfy the asserted preconditions", pred_name(pred)),
            None,
        )
    } else if !calls.is_bottom() && calls.glb(&pre).is_bottom() {
        (
            AssertStatus::False,
            format!(
                "{} is called in a way incompatible with every asserted precondition",
                pred_name(pred)
            ),
            Some(calls.render(&scope)),
        )
    } else {
        let why = if exact {
            "inferred calls are not within the asserted preconditions"
        } else {
            "precondition uses properties the domain cannot prove"
        };
        (
            AssertStatus::Check,
            format!("cannot verify calls to {}: {}", pred_name(pred), why),
            Some(calls.render(&scope)),
        )
    };
    AssertionVerdict { span, pred: pred.clone(), part: AssertPart::Calls, status, message, witness }
}

/// One success-verdict for an assertion: under calls compatible with its
/// precondition, does every success satisfy the postcondition?
pub fn check_success(graph: &AnalysisGraph, assertion: &AssertionDecl) -> AssertionVerdict {
    let (name, arity) = assertion.head.functor().unwrap_or(("", 0));
    let pred: PredId = (name.to_string(), arity);
    let scope = head_names(&assertion.head);
    let pre = abstract_pre(assertion, graph, &scope);
    let mut issues = Vec::new();
    let post = abstract_props(&assertion.post.0, &scope, graph.domain, &mut issues);
    let mut succ = AbsSub::Bottom;
    for (key, info) in graph.nodes_of(&pred) {
        if key.call.glb(&pre.abs).is_bottom() {
            continue;
        }
        succ = succ.lub(&info.success.glb(&pre.abs));
    }
    if succ.is_bottom() {
        return AssertionVerdict {
            span: assertion.span,
            pred,
            part: AssertPart::Success,
            status: AssertStatus::Checked,
            message: format!(
                "{}: no success under this precondition is reachable",
                pred_name(&(name.to_string(), arity))
            ),
            witness: None,
        };
    }
    let (status, message, witness) = match entails_props(&succ, &post) {
        Entailment::Yes => (
            AssertStatus::Checked,
            format!("every success of {} satisfies the postcondition", pred_name(&pred)),
            None,
        ),
        Entailment::No => (
            AssertStatus::False,
            format!("successes of {} contradict the postcondition", pred_name(&pred)),
            Some(succ.render(&scope)),
        ),
        Entailment::Maybe => {
            let why = if post.exact {
                "inferred successes are not within the postcondition"
            } else {
                "postcondition uses properties the domain cannot prove"
            };
            (
                AssertStatus::Check,
                format!("cannot verify successes of {}: {}", pred_name(&pred), why),
                Some(succ.render(&scope)),
            )
        }
    };
    AssertionVerdict { span: assertion.span, pred, part: AssertPart::Success, status, message, witness }
}

/// Checks every assertion in the program: one calls-verdict per asserted
/// predicate plus one success-verdict per assertion, sorted by (file, span,
/// part).
pub fn check_all(graph: &AnalysisGraph, prog: &ChcProgram) -> Vec<AssertionVerdict> {
    let mut by_pred: BTreeMap<PredId, Vec<&AssertionDecl>> = BTreeMap::new();
    for a in &prog.assertions {
        let Some((name, arity)) = a.head.functor() else { continue };
        by_pred.entry((name.to_string(), arity)).or_default().push(a);
    }
    let mut out = Vec::new();
    for (pred, asserts) in &by_pred {
        out.push(check_calls(graph, pred, asserts));
        for a in asserts {
            out.push(check_success(graph, a));
        }
    }
    out.sort_by(|a, b| {
        (a.span, a.part, &a.pred).cmp(&(b.span, b.part, &b.pred))
    });
    out
}

/// Text rendering: `FILE:LINE:COL: [status] pred/arity (part): MESSAGE`.
pub fn render_verdict(v: &AssertionVerdict, files: &FileTable) -> String {
    let mut line = format!(
        "{}:{}:{}: [{}] {} ({}): {}",
        files.path(v.span.file),
        v.span.start_line,
        v.span.start_col,
        v.status.keyword(),
        pred_name(&v.pred),
        v.part.render(),
        v.message
    );
    if let Some(w) = &v.witness {
        line.push_str(&format!(" [inferred: {w}]"));
    }
    line
}

pub fn verdict_to_diagnostic(v: &AssertionVerdict) -> Diagnostic {
    let (severity, code) = match v.status {
        AssertStatus::Checked => (Severity::Verified, "assrt.checked"),
        AssertStatus::False => (Severity::Error, "assrt.false"),
        AssertStatus::Check => (Severity::Warning, "assrt.check"),
    };
    let mut message = format!("{} ({}): {}", pred_name(&v.pred), v.part.render(), v.message);
    if let Some(w) = &v.witness {
        message.push_str(&format!(" [inferred: {w}]"));
    }
    Diagnostic::new(v.span, severity, code, message)
}
