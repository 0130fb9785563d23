//! CHC intermediate representation: normalization of the AST into clauses
//! with variable-only call arguments and explicit unification steps, stable
//! renaming-invariant clause identities, and clause-level deltas between
//! program versions.

use crate::diag::{Diagnostic, Severity, Span};
use crate::syntax::{AssertionDecl, ClauseDecl, CmpOp, EntryDecl, GoalKind, SourceAst, Term};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

pub type PredId = (String, usize);

pub fn pred_name(p: &PredId) -> String {
    format!("{}/{}", p.0, p.1)
}

/// Term over clause-local variable ids.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ChcTerm {
    Var(u32),
    Atom(String),
    Int(i64),
    Compound(String, Vec<ChcTerm>),
}

impl ChcTerm {
    pub fn vars_into(&self, out: &mut Vec<u32>) {
        match self {
            ChcTerm::Var(v) => {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
            ChcTerm::Compound(_, args) => {
                for a in args {
                    a.vars_into(out);
                }
            }
            _ => {}
        }
    }

    pub fn vars(&self) -> Vec<u32> {
        let mut v = Vec::new();
        self.vars_into(&mut v);
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BuiltinKind {
    Is,
    Cmp(CmpOp),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BodyStep {
    /// `V = T`
    Unify(u32, ChcTerm),
    /// `is`/comparison step; for `Is` the args are `[lhs, rhs-expression]`.
    Builtin(BuiltinKind, Vec<ChcTerm>),
    /// Predicate call with variable-only arguments.
    Call(PredId, Vec<u32>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChcClause {
    pub pred: PredId,
    /// Total number of variables; ids `0..arity` are the fresh head vars.
    pub nvars: u32,
    pub head_vars: Vec<u32>,
    pub body: Vec<BodyStep>,
    pub clause_key: u64,
    pub span: Span,
}

#[derive(Debug, Clone, Default)]
pub struct ChcProgram {
    pub preds: BTreeMap<PredId, Vec<ChcClause>>,
    pub assertions: Vec<AssertionDecl>,
    pub entries: Vec<EntryDecl>,
    /// Unknown-predicate warnings found during normalization.
    pub diagnostics: Vec<Diagnostic>,
}

// --- normalization ---------------------------------------------------------

struct NormCtx {
    map: HashMap<String, u32>,
    next: u32,
}

impl NormCtx {
    fn fresh(&mut self) -> u32 {
        let v = self.next;
        self.next += 1;
        v
    }

    fn var(&mut self, name: &str) -> u32 {
        if let Some(&v) = self.map.get(name) {
            v
        } else {
            let v = self.fresh();
            self.map.insert(name.to_string(), v);
            v
        }
    }

    fn conv(&mut self, t: &Term) -> ChcTerm {
        match t {
            Term::Var(v) => ChcTerm::Var(self.var(v)),
            Term::Atom(a) => ChcTerm::Atom(a.clone()),
            Term::Int(i) => ChcTerm::Int(*i),
            Term::Compound(f, args) => {
                ChcTerm::Compound(f.clone(), args.iter().map(|a| self.conv(a)).collect())
            }
        }
    }
}

fn normalize_clause(decl: &ClauseDecl) -> ChcClause {
    let (name, arity) = decl
        .head
        .functor()
        .map(|(f, a)| (f.to_string(), a))
        .expect("parser guarantees clause heads are atoms or compounds");
    let mut ctx = NormCtx { map: HashMap::new(), next: arity as u32 };
    let mut body = Vec::new();
    // head arguments: first occurrence of a variable is renamed to the fresh
    // head var; everything else becomes a leading unification
    for (i, arg) in decl.head.args().iter().enumerate() {
        match arg {
            Term::Var(v) if !ctx.map.contains_key(v) => {
                ctx.map.insert(v.clone(), i as u32);
            }
            other => {
                let t = ctx.conv(other);
                body.push(BodyStep::Unify(i as u32, t));
            }
        }
    }
    for goal in &decl.body {
        match &goal.kind {
            GoalKind::Unify(a, b) => emit_unify(&mut ctx, &mut body, a, b),
            GoalKind::Is(a, b) => {
                let l = ctx.conv(a);
                let r = ctx.conv(b);
                body.push(BodyStep::Builtin(BuiltinKind::Is, vec![l, r]));
            }
            GoalKind::Cmp(op, a, b) => {
                let l = ctx.conv(a);
                let r = ctx.conv(b);
                body.push(BodyStep::Builtin(BuiltinKind::Cmp(*op), vec![l, r]));
            }
            GoalKind::Call(t) => {
                let (f, a) = t.functor().expect("parser guarantees calls are atoms or compounds");
                let pred = (f.to_string(), a);
                let mut args = Vec::with_capacity(a);
                for arg in t.args() {
                    match arg {
                        Term::Var(v) => args.push(ctx.var(v)),
                        other => {
                            let v = ctx.fresh();
                            let t = ctx.conv(other);
                            body.push(BodyStep::Unify(v, t));
                            args.push(v);
                        }
                    }
                }
                body.push(BodyStep::Call(pred, args));
            }
        }
    }
    let mut clause = ChcClause {
        pred: (name, arity),
        nvars: ctx.next,
        head_vars: (0..arity as u32).collect(),
        body,
        clause_key: 0,
        span: decl.span,
    };
    clause.clause_key = clause_key(&clause);
    clause
}

fn emit_unify(ctx: &mut NormCtx, body: &mut Vec<BodyStep>, a: &Term, b: &Term) {
    match (a, b) {
        (Term::Var(v), _) => {
            let x = ctx.var(v);
            let t = ctx.conv(b);
            body.push(BodyStep::Unify(x, t));
        }
        (_, Term::Var(v)) => {
            let x = ctx.var(v);
            let t = ctx.conv(a);
            body.push(BodyStep::Unify(x, t));
        }
        _ => {
            let v = ctx.fresh();
            let ta = ctx.conv(a);
            let tb = ctx.conv(b);
            body.push(BodyStep::Unify(v, ta));
            body.push(BodyStep::Unify(v, tb));
        }
    }
}

/// Normalizes parsed files (in order) into one flat-namespace program.
pub fn normalize(asts: &[SourceAst]) -> ChcProgram {
    let mut prog = ChcProgram::default();
    for ast in asts {
        for decl in &ast.clauses {
            let clause = normalize_clause(decl);
            prog.preds.entry(clause.pred.clone()).or_default().push(clause);
        }
        prog.assertions.extend(ast.assertions.iter().cloned());
        prog.entries.extend(ast.entries.iter().cloned());
    }
    // flag calls to predicates with no clauses
    let mut seen: BTreeSet<PredId> = BTreeSet::new();
    for clauses in prog.preds.values() {
        for clause in clauses {
            for step in &clause.body {
                if let BodyStep::Call(target, _) = step {
                    if !prog.preds.contains_key(target) && seen.insert(target.clone()) {
                        prog.diagnostics.push(Diagnostic::new(
                            clause.span,
                            Severity::Warning,
                            "unknown-pred",
                            format!("call to unknown predicate {}", pred_name(target)),
                        ));
                    }
                }
            }
        }
    }
    prog
}

pub fn normalize_one(ast: &SourceAst) -> ChcProgram {
    normalize(std::slice::from_ref(ast))
}

// --- clause identity -------------------------------------------------------

/// FNV-1a, 64-bit. Stable across runs and platforms.
#[derive(Clone, Copy)]
pub struct Fnv64(u64);

impl Fnv64 {
    pub fn new() -> Self {
        Fnv64(0xcbf29ce484222325)
    }

    pub fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x100000001b3);
        }
    }

    pub fn write_u64(&mut self, v: u64) {
        self.write(&v.to_le_bytes());
    }

    pub fn finish(self) -> u64 {
        self.0
    }
}

impl Default for Fnv64 {
    fn default() -> Self {
        Self::new()
    }
}

struct KeyCanon {
    // non-head variables renumbered by first occurrence
    map: HashMap<u32, u32>,
    next: u32,
}

impl KeyCanon {
    fn canon(&mut self, v: u32, arity: u32) -> u32 {
        if v < arity {
            return v;
        }
        if let Some(&c) = self.map.get(&v) {
            c
        } else {
            let c = self.next;
            self.next += 1;
            self.map.insert(v, c);
            c
        }
    }

    fn hash_term(&mut self, t: &ChcTerm, arity: u32, h: &mut Fnv64) {
        match t {
            ChcTerm::Var(v) => {
                h.write(b"v");
                h.write_u64(self.canon(*v, arity) as u64);
            }
            ChcTerm::Atom(a) => {
                h.write(b"a");
                h.write(a.as_bytes());
                h.write(&[0]);
            }
            ChcTerm::Int(i) => {
                h.write(b"i");
                h.write(&i.to_le_bytes());
            }
            ChcTerm::Compound(f, args) => {
                h.write(b"c");
                h.write(f.as_bytes());
                h.write(&[0]);
                h.write_u64(args.len() as u64);
                for a in args {
                    self.hash_term(a, arity, h);
                }
            }
        }
    }
}

/// Content hash of a normalized clause, invariant under renaming of
/// non-head variables (head vars are canonical by construction).
pub fn clause_key(clause: &ChcClause) -> u64 {
    let arity = clause.pred.1 as u32;
    let mut h = Fnv64::new();
    let mut canon = KeyCanon { map: HashMap::new(), next: arity };
    h.write(clause.pred.0.as_bytes());
    h.write(&[0]);
    h.write_u64(arity as u64);
    for step in &clause.body {
        match step {
            BodyStep::Unify(v, t) => {
                h.write(b"U");
                h.write_u64(canon.canon(*v, arity) as u64);
                canon.hash_term(t, arity, &mut h);
            }
            BodyStep::Builtin(kind, args) => {
                h.write(b"B");
                h.write(format!("{kind:?}").as_bytes());
                for a in args {
                    canon.hash_term(a, arity, &mut h);
                }
            }
            BodyStep::Call(pred, args) => {
                h.write(b"C");
                h.write(pred.0.as_bytes());
                h.write(&[0]);
                h.write_u64(pred.1 as u64);
                for &a in args {
                    h.write_u64(canon.canon(a, arity) as u64);
                }
            }
        }
    }
    h.finish()
}

// --- program fingerprint ---------------------------------------------------

/// Hash of all clause keys plus the assertion and entry declarations; used
/// to detect snapshot staleness.
pub fn fingerprint(prog: &ChcProgram) -> u64 {
    let mut h = Fnv64::new();
    for (pred, clauses) in &prog.preds {
        h.write(pred.0.as_bytes());
        h.write(&[0]);
        h.write_u64(pred.1 as u64);
        let mut keys: Vec<u64> = clauses.iter().map(|c| c.clause_key).collect();
        keys.sort_unstable();
        for k in keys {
            h.write_u64(k);
        }
    }
    let mut decls: Vec<String> = prog.assertions.iter().map(|a| a.to_string()).collect();
    decls.sort();
    for d in &decls {
        h.write(d.as_bytes());
        h.write(&[1]);
    }
    let mut entries: Vec<String> = prog.entries.iter().map(|e| e.to_string()).collect();
    entries.sort();
    for e in &entries {
        h.write(e.as_bytes());
        h.write(&[2]);
    }
    h.finish()
}

// --- deltas ----------------------------------------------------------------

#[derive(Debug, Clone, Default)]
pub struct ProgramDelta {
    pub added_clauses: Vec<(PredId, u64)>,
    pub deleted_clauses: Vec<(PredId, u64)>,
    pub changed_preds: BTreeSet<PredId>,
    pub assertion_changed: bool,
    pub entry_changed: bool,
    /// Predicates whose entry declarations changed.
    pub entry_changed_preds: BTreeSet<PredId>,
    /// Changed predicates that did not exist in the old program (their
    /// callers saw an unknown predicate before this delta).
    pub new_preds: BTreeSet<PredId>,
    pub old_fingerprint: u64,
    pub new_fingerprint: u64,
}

impl ProgramDelta {
    pub fn is_empty(&self) -> bool {
        self.added_clauses.is_empty()
            && self.deleted_clauses.is_empty()
            && !self.assertion_changed
            && !self.entry_changed
    }
}

fn key_multiset(clauses: &[ChcClause]) -> BTreeMap<u64, usize> {
    let mut m = BTreeMap::new();
    for c in clauses {
        *m.entry(c.clause_key).or_insert(0) += 1;
    }
    m
}

fn entry_preds(prog: &ChcProgram) -> BTreeMap<PredId, Vec<String>> {
    let mut m: BTreeMap<PredId, Vec<String>> = BTreeMap::new();
    for e in &prog.entries {
        if let Some((f, a)) = e.head.functor() {
            m.entry((f.to_string(), a)).or_default().push(e.to_string());
        }
    }
    for v in m.values_mut() {
        v.sort();
    }
    m
}

/// Minimal clause-level delta under renaming-invariant key matching; a
/// modified clause appears as one deletion plus one addition.
pub fn diff(old: &ChcProgram, new: &ChcProgram) -> ProgramDelta {
    let mut delta = ProgramDelta {
        old_fingerprint: fingerprint(old),
        new_fingerprint: fingerprint(new),
        ..Default::default()
    };
    let empty: Vec<ChcClause> = Vec::new();
    let all_preds: BTreeSet<&PredId> = old.preds.keys().chain(new.preds.keys()).collect();
    for pred in all_preds {
        let o = key_multiset(old.preds.get(pred).unwrap_or(&empty));
        let n = key_multiset(new.preds.get(pred).unwrap_or(&empty));
        for (&k, &cnt) in &n {
            let extra = cnt.saturating_sub(o.get(&k).copied().unwrap_or(0));
            for _ in 0..extra {
                delta.added_clauses.push((pred.clone(), k));
            }
        }
        for (&k, &cnt) in &o {
            let missing = cnt.saturating_sub(n.get(&k).copied().unwrap_or(0));
            for _ in 0..missing {
                delta.deleted_clauses.push((pred.clone(), k));
            }
        }
    }
    for (p, _) in delta.added_clauses.iter().chain(delta.deleted_clauses.iter()) {
        delta.changed_preds.insert(p.clone());
        if !old.preds.contains_key(p) {
            delta.new_preds.insert(p.clone());
        }
    }
    let old_asserts: BTreeMap<String, usize> = count_strings(old.assertions.iter().map(|a| a.to_string()));
    let new_asserts: BTreeMap<String, usize> = count_strings(new.assertions.iter().map(|a| a.to_string()));
    delta.assertion_changed = old_asserts != new_asserts;
    let oe = entry_preds(old);
    let ne = entry_preds(new);
    let entry_pred_ids: BTreeSet<&PredId> = oe.keys().chain(ne.keys()).collect();
    for p in entry_pred_ids {
        if oe.get(p) != ne.get(p) {
            delta.entry_changed_preds.insert(p.clone());
        }
    }
    delta.entry_changed = !delta.entry_changed_preds.is_empty();
    delta
}

fn count_strings(it: impl Iterator<Item = String>) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for s in it {
        *m.entry(s).or_insert(0) += 1;
    }
    m
}

// --- rendering (--dump-chc) ------------------------------------------------

struct VarName(u32);

impl fmt::Display for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_V{}", self.0)
    }
}

fn render_term(t: &ChcTerm, out: &mut String) {
    match t {
        ChcTerm::Var(v) => out.push_str(&VarName(*v).to_string()),
        ChcTerm::Atom(a) => out.push_str(a),
        ChcTerm::Int(i) => out.push_str(&i.to_string()),
        ChcTerm::Compound(f, args) if f == "." && args.len() == 2 => {
            out.push('[');
            render_term(&args[0], out);
            let mut tail = &args[1];
            loop {
                match tail {
                    ChcTerm::Atom(a) if a == "[]" => break,
                    ChcTerm::Compound(f2, args2) if f2 == "." && args2.len() == 2 => {
                        out.push(',');
                        render_term(&args2[0], out);
                        tail = &args2[1];
                    }
                    other => {
                        out.push('|');
                        render_term(other, out);
                        break;
                    }
                }
            }
            out.push(']');
        }
        ChcTerm::Compound(f, args) if args.len() == 2 && matches!(f.as_str(), "+" | "-" | "*" | "/") => {
            out.push('(');
            render_term(&args[0], out);
            out.push_str(f);
            render_term(&args[1], out);
            out.push(')');
        }
        ChcTerm::Compound(f, args) => {
            out.push_str(f);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                render_term(a, out);
            }
            out.push(')');
        }
    }
}

pub fn render_clause(clause: &ChcClause) -> String {
    let mut s = String::new();
    s.push_str(&clause.pred.0);
    if clause.pred.1 > 0 {
        s.push('(');
        for i in 0..clause.pred.1 {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&VarName(i as u32).to_string());
        }
        s.push(')');
    }
    if !clause.body.is_empty() {
        s.push_str(" :- ");
        for (i, step) in clause.body.iter().enumerate() {
            if i > 0 {
                s.push_str(", ");
            }
            match step {
                BodyStep::Unify(v, t) => {
                    s.push_str(&VarName(*v).to_string());
                    s.push_str(" = ");
                    render_term(t, &mut s);
                }
                BodyStep::Builtin(BuiltinKind::Is, args) => {
                    render_term(&args[0], &mut s);
                    s.push_str(" is ");
                    render_term(&args[1], &mut s);
                }
                BodyStep::Builtin(BuiltinKind::Cmp(op), args) => {
                    render_term(&args[0], &mut s);
                    s.push(' ');
                    s.push_str(op.symbol());
                    s.push(' ');
                    render_term(&args[1], &mut s);
                }
                BodyStep::Call(pred, args) => {
                    s.push_str(&pred.0);
                    if !args.is_empty() {
                        s.push('(');
                        for (j, a) in args.iter().enumerate() {
                            if j > 0 {
                                s.push(',');
                            }
                            s.push_str(&VarName(*a).to_string());
                        }
                        s.push(')');
                    }
                }
            }
        }
    }
    s.push('.');
    s
}

/// Emits the normalized program as text, one clause per line.
pub fn dump_chc(prog: &ChcProgram) -> String {
    let mut out = String::new();
    for clauses in prog.preds.values() {
        for c in clauses {
            out.push_str(&render_clause(c));
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::FileId;
    use crate::syntax::parse_program;

    fn norm(text: &str) -> ChcProgram {
        normalize_one(&parse_program(text, FileId(0)))
    }

    #[test]
    fn shared_head_var_collapses_to_one_unification() {
        let p = norm("app([],Ys,Ys).");
        let c = &p.preds[&("app".to_string(), 3)][0];
        assert_eq!(
            c.body,
            vec![
                BodyStep::Unify(0, ChcTerm::Atom("[]".into())),
                BodyStep::Unify(2, ChcTerm::Var(1)),
            ]
        );
    }

    #[test]
    fn pow_base_clause() {
        let p = norm("pow(_, 0, 1).");
        let c = &p.preds[&("pow".to_string(), 3)][0];
        assert_eq!(
            c.body,
            vec![BodyStep::Unify(1, ChcTerm::Int(0)), BodyStep::Unify(2, ChcTerm::Int(1))]
        );
    }

    #[test]
    fn nonvar_call_args_are_hoisted() {
        let p = norm("p(X) :- q(f(X)).");
        let c = &p.preds[&("p".to_string(), 1)][0];
        assert_eq!(
            c.body,
            vec![
                BodyStep::Unify(1, ChcTerm::Compound("f".into(), vec![ChcTerm::Var(0)])),
                BodyStep::Call(("q".to_string(), 1), vec![1]),
            ]
        );
    }

    #[test]
    fn clause_key_invariant_under_renaming() {
        let a = norm("p(A) :- A = 1.");
        let b = norm("p(B) :- B = 1.");
        let ka = a.preds[&("p".to_string(), 1)][0].clause_key;
        let kb = b.preds[&("p".to_string(), 1)][0].clause_key;
        assert_eq!(ka, kb);
        let c = norm("p(A) :- A = 2.");
        assert_ne!(ka, c.preds[&("p".to_string(), 1)][0].clause_key);
    }

    #[test]
    fn duplicate_clauses_hash_equal() {
        let p = norm("p(a).\np(a).\n");
        let cs = &p.preds[&("p".to_string(), 1)];
        assert_eq!(cs.len(), 2);
        assert_eq!(cs[0].clause_key, cs[1].clause_key);
    }

    #[test]
    fn diff_identity_is_empty() {
        let p = norm("app([],Y,Y).\napp([X|Xs],Y,[X|Z]) :- app(Xs,Y,Z).\n");
        let d = diff(&p, &p);
        assert!(d.is_empty());
        assert!(d.changed_preds.is_empty());
    }

    #[test]
    fn diff_one_added_clause() {
        let old = norm("app([],Y,Y).\n");
        let new = norm("app([],Y,Y).\napp([X|Xs],Y,[X|Z]) :- app(Xs,Y,Z).\n");
        let d = diff(&old, &new);
        assert_eq!(d.added_clauses.len(), 1);
        assert!(d.deleted_clauses.is_empty());
        assert_eq!(d.changed_preds.iter().collect::<Vec<_>>(), vec![&("app".to_string(), 3)]);
    }

    #[test]
    fn assertion_only_edit() {
        let old = norm("p(a).\n:- pred p(X) => ground(X).\n");
        let new = norm("p(a).\n:- pred p(X) => int(X).\n");
        let d = diff(&old, &new);
        assert!(d.added_clauses.is_empty() && d.deleted_clauses.is_empty());
        assert!(d.assertion_changed);
        assert!(!d.entry_changed);
    }

    #[test]
    fn unknown_pred_flagged() {
        let p = norm("p(X) :- q(X).");
        assert_eq!(p.diagnostics.len(), 1);
        assert_eq!(p.diagnostics[0].code, "unknown-pred");
    }

    #[test]
    fn normalize_is_idempotent_via_dump() {
        let p = norm("app([],Y,Y).\napp([X|Xs],Y,[X|Z]) :- app(Xs,Y,Z).\npow(_,0,1).\npow(X,N,P) :- N > 0, N1 is N - 1, pow(X,N1,P0), P is X * P0.\n");
        let dumped = dump_chc(&p);
        let p2 = norm(&dumped);
        let keys =
            |prog: &ChcProgram| -> Vec<(PredId, u64)> {
                prog.preds
                    .iter()
                    .flat_map(|(p, cs)| cs.iter().map(move |c| (p.clone(), c.clause_key)))
                    .collect()
            };
        assert_eq!(keys(&p), keys(&p2));
    }
}
