//! Declaration-level AST for the mini Horn-clause language.

use crate::diag::{Diagnostic, Span};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Atom(String),
    Int(i64),
    Compound(String, Vec<Term>),
}

impl Term {
    pub fn functor(&self) -> Option<(&str, usize)> {
        match self {
            Term::Atom(a) => Some((a, 0)),
            Term::Compound(f, args) => Some((f, args.len())),
            _ => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Compound(_, args) => args,
            _ => &[],
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    /// Collects variable names in first-occurrence order.
    pub fn vars_into(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !out.iter().any(|x| x == v) {
                    out.push(v.clone());
                }
            }
            Term::Compound(_, args) => {
                for a in args {
                    a.vars_into(out);
                }
            }
            _ => {}
        }
    }

    pub fn list(items: Vec<Term>, tail: Term) -> Term {
        let mut t = tail;
        for item in items.into_iter().rev() {
            t = Term::Compound(".".to_string(), vec![item, t]);
        }
        t
    }

    pub fn nil() -> Term {
        Term::Atom("[]".to_string())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Atom(a) => write!(f, "{a}"),
            Term::Int(i) => write!(f, "{i}"),
            Term::Compound(fun, args) if fun == "." && args.len() == 2 => {
                // list sugar
                write!(f, "[")?;
                let mut head = &args[0];
                let mut tail = &args[1];
                write!(f, "{head}")?;
                loop {
                    match tail {
                        Term::Atom(a) if a == "[]" => break,
                        Term::Compound(fun2, args2) if fun2 == "." && args2.len() == 2 => {
                            head = &args2[0];
                            tail = &args2[1];
                            write!(f, ",{head}")?;
                        }
                        other => {
                            write!(f, "|{other}")?;
                            break;
                        }
                    }
                }
                write!(f, "]")
            }
            Term::Compound(fun, args) => {
                // infix rendering for arithmetic and comparison functors
                if args.len() == 2 && is_infix(fun) {
                    return write!(f, "({} {} {})", args[0], fun, args[1]);
                }
                write!(f, "{fun}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

fn is_infix(f: &str) -> bool {
    matches!(f, "+" | "-" | "*" | "/" | "<" | ">" | "=<" | ">=" | "=:=" | "=\\=" | "=" | "is")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CmpOp {
    Lt,
    Gt,
    Le,
    Ge,
    NumEq,
    NumNe,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Gt => ">",
            CmpOp::Le => "=<",
            CmpOp::Ge => ">=",
            CmpOp::NumEq => "=:=",
            CmpOp::NumNe => "=\\=",
        }
    }

    pub fn from_symbol(s: &str) -> Option<CmpOp> {
        Some(match s {
            "<" => CmpOp::Lt,
            ">" => CmpOp::Gt,
            "=<" => CmpOp::Le,
            ">=" => CmpOp::Ge,
            "=:=" => CmpOp::NumEq,
            "=\\=" => CmpOp::NumNe,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GoalKind {
    /// Predicate call: an Atom or Compound term.
    Call(Term),
    /// `T1 = T2`
    Unify(Term, Term),
    /// `X is Expr`
    Is(Term, Term),
    /// Arithmetic comparison.
    Cmp(CmpOp, Term, Term),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Goal {
    pub kind: GoalKind,
    pub span: Span,
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            GoalKind::Call(t) => write!(f, "{t}"),
            GoalKind::Unify(a, b) => write!(f, "{a} = {b}"),
            GoalKind::Is(a, b) => write!(f, "{a} is {b}"),
            GoalKind::Cmp(op, a, b) => write!(f, "{a} {} {b}", op.symbol()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseDecl {
    pub head: Term,
    pub body: Vec<Goal>,
    pub span: Span,
}

impl fmt::Display for ClauseDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            write!(f, " :- ")?;
            for (i, g) in self.body.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{g}")?;
            }
        }
        write!(f, ".")
    }
}

/// A conjunction of property literals. Each literal is an Atom, a Compound,
/// or an infix constraint rendered as a Compound (e.g. `>=`/2).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PropConj(pub Vec<Term>);

impl PropConj {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for PropConj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AssertStatus {
    Check,
    Checked,
    False,
}

impl AssertStatus {
    pub fn keyword(self) -> &'static str {
        match self {
            AssertStatus::Check => "check",
            AssertStatus::Checked => "checked",
            AssertStatus::False => "false",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssertionDecl {
    pub status: AssertStatus,
    pub head: Term,
    pub pre: PropConj,
    pub post: PropConj,
    pub span: Span,
}

impl fmt::Display for AssertionDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, ":- {} pred {}", self.status.keyword(), self.head)?;
        if !self.pre.is_empty() {
            write!(f, " : {}", self.pre)?;
        }
        if !self.post.is_empty() {
            write!(f, " => {}", self.post)?;
        }
        write!(f, ".")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntryDecl {
    pub head: Term,
    pub pre: PropConj,
    pub span: Span,
}

impl fmt::Display for EntryDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, ":- entry {}", self.head)?;
        if !self.pre.is_empty() {
            write!(f, " : {}", self.pre)?;
        }
        write!(f, ".")
    }
}

/// Parse result for one file. Malformed declarations are dropped and
/// reported through `syntax_errors`; parsing never aborts the file.
#[derive(Debug, Clone, Default)]
pub struct SourceAst {
    pub clauses: Vec<ClauseDecl>,
    pub assertions: Vec<AssertionDecl>,
    pub entries: Vec<EntryDecl>,
    pub syntax_errors: Vec<Diagnostic>,
}

impl SourceAst {
    /// Canonical textual form; reparsing it yields a structurally equal AST
    /// (modulo spans).
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        for a in &self.assertions {
            out.push_str(&a.to_string());
            out.push('\n');
        }
        for e in &self.entries {
            out.push_str(&e.to_string());
            out.push('\n');
        }
        for c in &self.clauses {
            out.push_str(&c.to_string());
            out.push('\n');
        }
        out
    }
}
