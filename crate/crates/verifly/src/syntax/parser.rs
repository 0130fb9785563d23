//! Recursive-descent parser with per-declaration error recovery: a
//! malformed declaration is dropped, reported, and parsing resumes at the
//! token after the next `.`.

use super::ast::*;
use super::lexer::{tokenize, Token, TokenKind};
use crate::diag::{Diagnostic, FileId, Severity, Span};

pub fn parse_program(text: &str, file: FileId) -> SourceAst {
    let toks = tokenize(text, file);
    let mut ast = SourceAst::default();
    let mut fresh = 0u32; // counter for renaming anonymous variables apart
    let mut i = 0;
    while i < toks.len() {
        // one declaration candidate: tokens up to and including the next End
        let start = i;
        while i < toks.len() && toks[i].kind != TokenKind::End {
            i += 1;
        }
        let has_end = i < toks.len();
        let end = if has_end { i + 1 } else { i };
        i = end;
        let slice = &toks[start..end];
        if slice.is_empty() {
            continue;
        }
        let decl_span = slice[0].span.join(slice[slice.len() - 1].span);
        if !has_end {
            ast.syntax_errors.push(Diagnostic::new(
                decl_span,
                Severity::Error,
                "syntax",
                "declaration not terminated by '.'",
            ));
            continue;
        }
        let mut p = DeclParser { toks: slice, i: 0, fresh: &mut fresh };
        match p.parse_decl(decl_span) {
            Ok(Decl::Clause(c)) => ast.clauses.push(c),
            Ok(Decl::Assertion(a)) => ast.assertions.push(a),
            Ok(Decl::Entry(e)) => ast.entries.push(e),
            Err(msg) => {
                ast.syntax_errors.push(Diagnostic::new(decl_span, Severity::Error, "syntax", msg));
            }
        }
    }
    ast
}

enum Decl {
    Clause(ClauseDecl),
    Assertion(AssertionDecl),
    Entry(EntryDecl),
}

struct DeclParser<'a> {
    toks: &'a [Token],
    i: usize,
    fresh: &'a mut u32,
}

type PResult<T> = Result<T, String>;

impl<'a> DeclParser<'a> {
    fn peek(&self) -> &TokenKind {
        // the slice always ends with End, so peeking past it is harmless
        self.toks.get(self.i).map(|t| &t.kind).unwrap_or(&TokenKind::End)
    }

    fn bump(&mut self) -> &Token {
        let t = &self.toks[self.i.min(self.toks.len() - 1)];
        self.i += 1;
        t
    }

    fn span_here(&self) -> Span {
        self.toks[self.i.min(self.toks.len() - 1)].span
    }

    fn expect(&mut self, kind: &TokenKind, what: &str) -> PResult<()> {
        if self.peek() == kind {
            self.bump();
            Ok(())
        } else {
            Err(format!("expected {what}, found {:?}", self.peek()))
        }
    }

    fn parse_decl(&mut self, decl_span: Span) -> PResult<Decl> {
        if matches!(self.peek(), TokenKind::Neck) && self.i == 0 {
            self.bump();
            return self.parse_directive(decl_span);
        }
        // clause: Head [:- Body] .
        let head = self.parse_term()?;
        if head.is_var() || matches!(head, Term::Int(_)) {
            return Err("clause head must be an atom or compound term".into());
        }
        let mut body = Vec::new();
        if matches!(self.peek(), TokenKind::Neck) {
            self.bump();
            loop {
                body.push(self.parse_goal()?);
                match self.peek() {
                    TokenKind::Comma => {
                        self.bump();
                    }
                    TokenKind::End => break,
                    other => return Err(format!("expected ',' or '.', found {other:?}")),
                }
            }
        }
        self.expect(&TokenKind::End, "'.'")?;
        if self.i != self.toks.len() {
            return Err("unexpected tokens after '.'".into());
        }
        Ok(Decl::Clause(ClauseDecl { head, body, span: decl_span }))
    }

    fn parse_directive(&mut self, decl_span: Span) -> PResult<Decl> {
        let status = match self.peek() {
            TokenKind::Atom(a) if a == "check" => {
                self.bump();
                Some(AssertStatus::Check)
            }
            TokenKind::Atom(a) if a == "checked" => {
                self.bump();
                Some(AssertStatus::Checked)
            }
            TokenKind::Atom(a) if a == "false" => {
                self.bump();
                Some(AssertStatus::False)
            }
            _ => None,
        };
        match self.peek() {
            TokenKind::Atom(a) if a == "pred" => {
                self.bump();
                let head = self.parse_term()?;
                if head.functor().is_none() {
                    return Err("assertion head must be an atom or compound term".into());
                }
                let mut pre = PropConj::default();
                let mut post = PropConj::default();
                if matches!(self.peek(), TokenKind::Colon) {
                    self.bump();
                    pre = self.parse_prop_conj()?;
                }
                if matches!(self.peek(), TokenKind::Arrow) {
                    self.bump();
                    post = self.parse_prop_conj()?;
                }
                self.expect(&TokenKind::End, "'.'")?;
                Ok(Decl::Assertion(AssertionDecl {
                    status: status.unwrap_or(AssertStatus::Check),
                    head,
                    pre,
                    post,
                    span: decl_span,
                }))
            }
            TokenKind::Atom(a) if a == "entry" && status.is_none() => {
                self.bump();
                let head = self.parse_term()?;
                if head.functor().is_none() {
                    return Err("entry head must be an atom or compound term".into());
                }
                let mut pre = PropConj::default();
                if matches!(self.peek(), TokenKind::Colon) {
                    self.bump();
                    pre = self.parse_prop_conj()?;
                }
                self.expect(&TokenKind::End, "'.'")?;
                Ok(Decl::Entry(EntryDecl { head, pre, span: decl_span }))
            }
            other => Err(format!("unknown directive starting with {other:?}")),
        }
    }

    fn parse_goal(&mut self) -> PResult<Goal> {
        let start = self.span_here();
        let lhs = self.parse_term()?;
        let kind = match self.peek().clone() {
            TokenKind::Op(op) if op == "=" => {
                self.bump();
                GoalKind::Unify(lhs, self.parse_term()?)
            }
            TokenKind::Op(op) if op == "is" => {
                self.bump();
                GoalKind::Is(lhs, self.parse_term()?)
            }
            TokenKind::Op(op) if CmpOp::from_symbol(&op).is_some() => {
                self.bump();
                GoalKind::Cmp(CmpOp::from_symbol(&op).unwrap(), lhs, self.parse_term()?)
            }
            _ => {
                if lhs.functor().is_none() {
                    return Err(format!("goal must be a call, unification, 'is', or comparison, found {lhs}"));
                }
                GoalKind::Call(lhs)
            }
        };
        let span = start.join(self.last_span());
        Ok(Goal { kind, span })
    }

    fn last_span(&self) -> Span {
        self.toks[self.i.saturating_sub(1).min(self.toks.len() - 1)].span
    }

    /// A conjunction of property literals: `lit`, `lit, lit`, or a
    /// parenthesized group `(lit, lit)` (flattened).
    fn parse_prop_conj(&mut self) -> PResult<PropConj> {
        let mut lits = Vec::new();
        loop {
            self.parse_prop_group(&mut lits)?;
            if matches!(self.peek(), TokenKind::Comma) {
                self.bump();
            } else {
                break;
            }
        }
        Ok(PropConj(lits))
    }

    fn parse_prop_group(&mut self, out: &mut Vec<Term>) -> PResult<()> {
        if matches!(self.peek(), TokenKind::LParen) {
            self.bump();
            loop {
                self.parse_prop_group(out)?;
                match self.peek() {
                    TokenKind::Comma => {
                        self.bump();
                    }
                    TokenKind::RParen => {
                        self.bump();
                        break;
                    }
                    other => return Err(format!("expected ',' or ')' in conjunction, found {other:?}")),
                }
            }
            return Ok(());
        }
        out.push(self.parse_prop_literal()?);
        Ok(())
    }

    fn parse_prop_literal(&mut self) -> PResult<Term> {
        let lhs = self.parse_term()?;
        match self.peek().clone() {
            TokenKind::Op(op) if op == "=" || op == "is" || CmpOp::from_symbol(&op).is_some() => {
                self.bump();
                let rhs = self.parse_term()?;
                Ok(Term::Compound(op, vec![lhs, rhs]))
            }
            _ => {
                if lhs.functor().is_none() {
                    return Err(format!("property literal must be a predicate or constraint, found {lhs}"));
                }
                Ok(lhs)
            }
        }
    }

    // terms / arithmetic expressions: `+ -` < `* /` < unary minus < primary
    fn parse_term(&mut self) -> PResult<Term> {
        let mut t = self.parse_mul()?;
        loop {
            match self.peek().clone() {
                TokenKind::Op(op) if op == "+" || op == "-" => {
                    self.bump();
                    let rhs = self.parse_mul()?;
                    t = Term::Compound(op, vec![t, rhs]);
                }
                _ => return Ok(t),
            }
        }
    }

    fn parse_mul(&mut self) -> PResult<Term> {
        let mut t = self.parse_unary()?;
        loop {
            match self.peek().clone() {
                TokenKind::Op(op) if op == "*" || op == "/" => {
                    self.bump();
                    let rhs = self.parse_unary()?;
                    t = Term::Compound(op, vec![t, rhs]);
                }
                _ => return Ok(t),
            }
        }
    }

    fn parse_unary(&mut self) -> PResult<Term> {
        if matches!(self.peek(), TokenKind::Op(op) if op == "-") {
            self.bump();
            let t = self.parse_unary()?;
            return Ok(match t {
                Term::Int(n) => Term::Int(-n),
                other => Term::Compound("-".to_string(), vec![other]),
            });
        }
        self.parse_primary()
    }

    fn parse_primary(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            TokenKind::Var(v) => {
                self.bump();
                if v == "_" {
                    *self.fresh += 1;
                    Ok(Term::Var(format!("_G{}", *self.fresh)))
                } else {
                    Ok(Term::Var(v))
                }
            }
            TokenKind::Int(n) => {
                self.bump();
                Ok(Term::Int(n))
            }
            TokenKind::Atom(a) => {
                self.bump();
                if matches!(self.peek(), TokenKind::LParen) {
                    self.bump();
                    let mut args = Vec::new();
                    loop {
                        args.push(self.parse_term()?);
                        match self.peek() {
                            TokenKind::Comma => {
                                self.bump();
                            }
                            TokenKind::RParen => {
                                self.bump();
                                break;
                            }
                            other => return Err(format!("expected ',' or ')', found {other:?}")),
                        }
                    }
                    Ok(Term::Compound(a, args))
                } else {
                    Ok(Term::Atom(a))
                }
            }
            TokenKind::LBracket => {
                self.bump();
                if matches!(self.peek(), TokenKind::RBracket) {
                    self.bump();
                    return Ok(Term::nil());
                }
                let mut items = Vec::new();
                loop {
                    items.push(self.parse_term()?);
                    match self.peek() {
                        TokenKind::Comma => {
                            self.bump();
                        }
                        TokenKind::Bar => {
                            self.bump();
                            let tail = self.parse_term()?;
                            self.expect(&TokenKind::RBracket, "']'")?;
                            return Ok(Term::list(items, tail));
                        }
                        TokenKind::RBracket => {
                            self.bump();
                            return Ok(Term::list(items, Term::nil()));
                        }
                        other => return Err(format!("expected ',', '|' or ']', found {other:?}")),
                    }
                }
            }
            TokenKind::LParen => {
                self.bump();
                let t = self.parse_term()?;
                self.expect(&TokenKind::RParen, "')'")?;
                Ok(t)
            }
            other => Err(format!("expected a term, found {other:?}")),
        }
    }
}
