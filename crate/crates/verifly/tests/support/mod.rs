//! Shared test support: a bounded concrete SLD interpreter over the clause
//! IR and γ-membership checks against abstract substitutions. Used as the
//! soundness oracle for the engine and checker.

#![allow(dead_code)]

use std::collections::HashMap;
use verifly::chc::{BodyStep, BuiltinKind, ChcProgram, ChcTerm, PredId};
use verifly::domains::{AbsSub, TypeElem};
use verifly::syntax::CmpOp;

/// Concrete term with numbered logic variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CTerm {
    Var(usize),
    Atom(String),
    Int(i64),
    Comp(String, Vec<CTerm>),
}

impl CTerm {
    pub fn atom(s: &str) -> CTerm {
        CTerm::Atom(s.to_string())
    }

    pub fn list(items: &[CTerm]) -> CTerm {
        items.iter().rev().fold(CTerm::Atom("[]".into()), |acc, it| {
            CTerm::Comp(".".into(), vec![it.clone(), acc])
        })
    }

    pub fn is_ground(&self, store: &Store) -> bool {
        match store.walk(self) {
            CTerm::Var(_) => false,
            CTerm::Atom(_) | CTerm::Int(_) => true,
            CTerm::Comp(_, args) => args.iter().all(|a| a.is_ground(store)),
        }
    }

    /// Depth-0 shape, mirroring the type domain's abstraction of bound terms.
    fn shape(&self) -> TypeElem {
        match self {
            CTerm::Var(_) => TypeElem::Any,
            CTerm::Int(_) => TypeElem::Int,
            CTerm::Atom(a) if a == "[]" => TypeElem::Lst,
            CTerm::Atom(_) => TypeElem::Atm,
            CTerm::Comp(f, args) if f == "." && args.len() == 2 => TypeElem::Lst,
            CTerm::Comp(..) => TypeElem::Struct,
        }
    }
}

/// Triangular substitution: resolve variables by repeated lookup.
#[derive(Debug, Clone, Default)]
pub struct Store {
    bindings: HashMap<usize, CTerm>,
    next_var: usize,
}

impl Store {
    pub fn fresh(&mut self) -> CTerm {
        self.next_var += 1;
        CTerm::Var(self.next_var - 1)
    }

    fn fresh_block(&mut self, n: usize) -> usize {
        let base = self.next_var;
        self.next_var += n;
        base
    }

    /// Dereferences the root until it is a non-variable or unbound.
    fn walk(&self, t: &CTerm) -> CTerm {
        let mut t = t.clone();
        while let CTerm::Var(v) = t {
            match self.bindings.get(&v) {
                Some(next) => t = next.clone(),
                None => return CTerm::Var(v),
            }
        }
        t
    }

    /// Full recursive dereference.
    pub fn resolve(&self, t: &CTerm) -> CTerm {
        match self.walk(t) {
            CTerm::Comp(f, args) => {
                CTerm::Comp(f, args.iter().map(|a| self.resolve(a)).collect())
            }
            other => other,
        }
    }

    fn unify(&mut self, a: &CTerm, b: &CTerm) -> bool {
        let a = self.walk(a);
        let b = self.walk(b);
        match (a, b) {
            (CTerm::Var(x), CTerm::Var(y)) if x == y => true,
            (CTerm::Var(x), t) | (t, CTerm::Var(x)) => {
                self.bindings.insert(x, t);
                true
            }
            (CTerm::Atom(x), CTerm::Atom(y)) => x == y,
            (CTerm::Int(x), CTerm::Int(y)) => x == y,
            (CTerm::Comp(f, xs), CTerm::Comp(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(&ys).all(|(x, y)| self.unify(x, y))
            }
            _ => false,
        }
    }
}

fn instantiate(t: &ChcTerm, base: usize) -> CTerm {
    match t {
        ChcTerm::Var(v) => CTerm::Var(base + *v as usize),
        ChcTerm::Atom(a) => CTerm::Atom(a.clone()),
        ChcTerm::Int(i) => CTerm::Int(*i),
        ChcTerm::Compound(f, args) => {
            CTerm::Comp(f.clone(), args.iter().map(|a| instantiate(a, base)).collect())
        }
    }
}

fn eval_arith(t: &CTerm, store: &Store) -> Option<i64> {
    match store.walk(t) {
        CTerm::Int(i) => Some(i),
        CTerm::Comp(op, args) if args.len() == 2 => {
            let l = eval_arith(&args[0], store)?;
            let r = eval_arith(&args[1], store)?;
            match op.as_str() {
                "+" => Some(l + r),
                "-" => Some(l - r),
                "*" => Some(l * r),
                "/" => (r != 0).then(|| l / r),
                _ => None,
            }
        }
        CTerm::Comp(op, args) if op == "-" && args.len() == 1 => {
            eval_arith(&args[0], store).map(|v| -v)
        }
        _ => None,
    }
}

pub struct Interp<'p> {
    prog: &'p ChcProgram,
    pub max_depth: usize,
    pub max_solutions: usize,
}

impl<'p> Interp<'p> {
    pub fn new(prog: &'p ChcProgram) -> Self {
        Interp { prog, max_depth: 6, max_solutions: 500 }
    }

    /// All bounded successes of `pred(args)`: the fully resolved argument
    /// vectors at each success, truncated at the depth/solution caps.
    /// Unknown predicates produce no successes (the abstract Top node
    /// over-approximates whatever they would do).
    pub fn solve(&self, pred: &PredId, args: &[CTerm]) -> Vec<Vec<CTerm>> {
        let mut store = Store::default();
        // reserve ids used by the query terms
        let mut max_v = 0;
        for a in args {
            collect_max_var(a, &mut max_v);
        }
        store.next_var = max_v + 1;
        let mut out = Vec::new();
        self.call(pred, args, &mut store, self.max_depth, &mut |st| {
            if out.len() < self.max_solutions {
                out.push(args.iter().map(|a| st.resolve(a)).collect());
            }
        });
        out
    }

    fn call(
        &self,
        pred: &PredId,
        args: &[CTerm],
        store: &mut Store,
        depth: usize,
        on_success: &mut dyn FnMut(&Store),
    ) {
        if depth == 0 {
            return;
        }
        let Some(clauses) = self.prog.preds.get(pred) else { return };
        for clause in clauses {
            let snapshot = store.clone();
            let base = store.fresh_block(clause.nvars as usize);
            let mut ok = true;
            for (i, &hv) in clause.head_vars.iter().enumerate() {
                if !store.unify(&CTerm::Var(base + hv as usize), &args[i]) {
                    ok = false;
                    break;
                }
            }
            if ok {
                self.body(&clause.body, 0, base, store, depth, on_success);
            }
            *store = snapshot;
        }
    }

    fn body(
        &self,
        steps: &[BodyStep],
        i: usize,
        base: usize,
        store: &mut Store,
        depth: usize,
        on_success: &mut dyn FnMut(&Store),
    ) {
        if i == steps.len() {
            on_success(store);
            return;
        }
        match &steps[i] {
            BodyStep::Unify(v, t) => {
                let snapshot = store.clone();
                if store.unify(&CTerm::Var(base + *v as usize), &instantiate(t, base)) {
                    self.body(steps, i + 1, base, store, depth, on_success);
                }
                *store = snapshot;
            }
            BodyStep::Builtin(BuiltinKind::Is, args) => {
                let Some(val) = eval_arith(&instantiate(&args[1], base), store) else { return };
                let snapshot = store.clone();
                if store.unify(&instantiate(&args[0], base), &CTerm::Int(val)) {
                    self.body(steps, i + 1, base, store, depth, on_success);
                }
                *store = snapshot;
            }
            BodyStep::Builtin(BuiltinKind::Cmp(op), args) => {
                let l = eval_arith(&instantiate(&args[0], base), store);
                let r = eval_arith(&instantiate(&args[1], base), store);
                let (Some(l), Some(r)) = (l, r) else { return };
                let holds = match op {
                    CmpOp::Lt => l < r,
                    CmpOp::Gt => l > r,
                    CmpOp::Le => l <= r,
                    CmpOp::Ge => l >= r,
                    CmpOp::NumEq => l == r,
                    CmpOp::NumNe => l != r,
                };
                if holds {
                    self.body(steps, i + 1, base, store, depth, on_success);
                }
            }
            BodyStep::Call(pred, vars) => {
                let call_args: Vec<CTerm> =
                    vars.iter().map(|v| CTerm::Var(base + *v as usize)).collect();
                self.call(pred, &call_args, store, depth - 1, &mut |st| {
                    let mut st2 = st.clone();
                    self.body(steps, i + 1, base, &mut st2, depth, on_success);
                });
            }
        }
    }
}

fn collect_max_var(t: &CTerm, max: &mut usize) {
    match t {
        CTerm::Var(v) => *max = (*max).max(*v),
        CTerm::Comp(_, args) => args.iter().for_each(|a| collect_max_var(a, max)),
        _ => {}
    }
}

// --- γ membership ----------------------------------------------------------

/// Is the concrete argument vector inside the concretization of the
/// abstract substitution? (Groundness and depth-0 type components.)
pub fn in_gamma(args: &[CTerm], abs: &AbsSub) -> bool {
    if abs.is_bottom() {
        return false;
    }
    let store = Store::default();
    for (i, arg) in args.iter().enumerate() {
        let v = i as u32;
        if abs.is_ground(v) && !arg.is_ground(&store) {
            return false;
        }
        let ty = abs.type_of(v);
        if ty != TypeElem::Any {
            // strict reading: an elem below Any means the argument is bound
            // with that shape
            let shape = store.resolve(arg).shape();
            if shape == TypeElem::Any || !shape.leq(ty) {
                return false;
            }
        }
    }
    true
}

/// Sample of ground/partial terms used to enumerate concrete calls:
/// constants {a, b, 0, 1} and lists of length ≤ 3 over {a, 0}.
pub fn term_pool() -> Vec<CTerm> {
    let mut pool = vec![
        CTerm::atom("a"),
        CTerm::atom("b"),
        CTerm::Int(0),
        CTerm::Int(1),
        CTerm::list(&[]),
        CTerm::list(&[CTerm::atom("a")]),
        CTerm::list(&[CTerm::Int(0)]),
        CTerm::list(&[CTerm::atom("a"), CTerm::Int(0)]),
        CTerm::list(&[CTerm::atom("a"), CTerm::atom("a"), CTerm::Int(0)]),
    ];
    pool.push(CTerm::Comp("f".into(), vec![CTerm::atom("a")]));
    pool
}

/// All argument vectors for a call pattern: positions the pattern grounds
/// or types draw compatible pool terms, unconstrained positions get a free
/// variable. Capped to keep enumeration tractable.
pub fn enumerate_calls(abs: &AbsSub, arity: usize, cap: usize) -> Vec<Vec<CTerm>> {
    let pool = term_pool();
    let mut out: Vec<Vec<CTerm>> = vec![Vec::new()];
    for i in 0..arity {
        let v = i as u32;
        let constrained = abs.is_ground(v) || abs.type_of(v) != TypeElem::Any;
        let options: Vec<CTerm> = if constrained {
            pool.iter()
                .filter(|t| {
                    let single = AbsSub::top(abs.kind().expect("non-bottom"), 1);
                    // reuse in_gamma on a single-position projection
                    let mut one = single;
                    if abs.is_ground(v) {
                        one = one.with_ground(0);
                    }
                    one = one.with_type(0, abs.type_of(v));
                    in_gamma(std::slice::from_ref(t), &one)
                })
                .cloned()
                .collect()
        } else {
            vec![CTerm::Var(900 + i)] // distinct free variables
        };
        let mut next = Vec::new();
        for prefix in &out {
            for o in &options {
                if next.len() >= cap {
                    break;
                }
                let mut p = prefix.clone();
                p.push(o.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out.truncate(cap);
    out
}
