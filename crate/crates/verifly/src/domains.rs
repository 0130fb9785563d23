//! Abstract domains: groundness ("modes"), depth-0 shape types, and their
//! product, plus the bridge between assertion property literals and
//! abstract values.
//!
//! Substitutions live over an indexed scope `0..n`. Both component lattices
//! are finite over a finite scope, so fixpoints terminate without widening;
//! none is implemented anywhere.

use crate::chc::{BodyStep, BuiltinKind, ChcTerm};
use crate::syntax::Term;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Finite shape lattice: ⊥ < {int, atm, lst, struct} < any, with the four
/// middle elements pairwise incomparable. An element e < any means "the
/// variable is bound and its binding's principal shape is covered by e".
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TypeElem {
    Bot,
    Int,
    Atm,
    Lst,
    Struct,
    Any,
}

impl TypeElem {
    pub fn leq(self, other: TypeElem) -> bool {
        self == TypeElem::Bot || other == TypeElem::Any || self == other
    }

    pub fn lub(self, other: TypeElem) -> TypeElem {
        if self.leq(other) {
            other
        } else if other.leq(self) {
            self
        } else {
            TypeElem::Any
        }
    }

    pub fn glb(self, other: TypeElem) -> TypeElem {
        if self.leq(other) {
            self
        } else if other.leq(self) {
            other
        } else {
            TypeElem::Bot
        }
    }

    pub fn render(self) -> &'static str {
        match self {
            TypeElem::Bot => "bot",
            TypeElem::Int => "int",
            TypeElem::Atm => "atm",
            TypeElem::Lst => "lst",
            TypeElem::Struct => "struct",
            TypeElem::Any => "any",
        }
    }
}

/// Which abstract domain an analysis run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    Modes,
    Types,
    Product,
}

impl DomainKind {
    pub fn parse(s: &str) -> Option<DomainKind> {
        match s {
            "modes" => Some(DomainKind::Modes),
            "types" => Some(DomainKind::Types),
            "product" => Some(DomainKind::Product),
            _ => None,
        }
    }
}

/// A domain element over a fixed scope `0..n`, or Bottom (unreachable).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AbsSub {
    Bottom,
    Modes { n: u32, ground: BTreeSet<u32> },
    Types { tys: Vec<TypeElem> },
    Product { ground: BTreeSet<u32>, tys: Vec<TypeElem> },
}

use AbsSub::*;

fn scope_mismatch(op: &str) -> ! {
    panic!("domain/scope mismatch in AbsSub::{op}; caller must supply matching substitutions")
}

impl AbsSub {
    pub fn top(kind: DomainKind, n: usize) -> AbsSub {
        match kind {
            DomainKind::Modes => Modes { n: n as u32, ground: BTreeSet::new() },
            DomainKind::Types => Types { tys: vec![TypeElem::Any; n] },
            DomainKind::Product => {
                Product { ground: BTreeSet::new(), tys: vec![TypeElem::Any; n] }
            }
        }
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, Bottom)
    }

    pub fn scope_len(&self) -> Option<usize> {
        match self {
            Bottom => None,
            Modes { n, .. } => Some(*n as usize),
            Types { tys } | Product { tys, .. } => Some(tys.len()),
        }
    }

    pub fn kind(&self) -> Option<DomainKind> {
        match self {
            Bottom => None,
            Modes { .. } => Some(DomainKind::Modes),
            Types { .. } => Some(DomainKind::Types),
            Product { .. } => Some(DomainKind::Product),
        }
    }

    pub fn is_ground(&self, v: u32) -> bool {
        match self {
            Bottom => true,
            Modes { ground, .. } | Product { ground, .. } => ground.contains(&v),
            Types { .. } => false,
        }
    }

    pub fn type_of(&self, v: u32) -> TypeElem {
        match self {
            Bottom => TypeElem::Bot,
            Types { tys } | Product { tys, .. } => tys[v as usize],
            Modes { .. } => TypeElem::Any,
        }
    }

    /// Partial order. Bottom ≤ everything; Modes: superset of ground vars;
    /// Types: pointwise.
    pub fn leq(&self, other: &AbsSub) -> bool {
        match (self, other) {
            (Bottom, _) => true,
            (_, Bottom) => false,
            (Modes { n: na, ground: ga }, Modes { n: nb, ground: gb }) => {
                if na != nb {
                    scope_mismatch("leq");
                }
                gb.is_subset(ga)
            }
            (Types { tys: ta }, Types { tys: tb }) => {
                if ta.len() != tb.len() {
                    scope_mismatch("leq");
                }
                ta.iter().zip(tb).all(|(a, b)| a.leq(*b))
            }
            (Product { ground: ga, tys: ta }, Product { ground: gb, tys: tb }) => {
                if ta.len() != tb.len() {
                    scope_mismatch("leq");
                }
                gb.is_subset(ga) && ta.iter().zip(tb).all(|(a, b)| a.leq(*b))
            }
            _ => scope_mismatch("leq"),
        }
    }

    pub fn lub(&self, other: &AbsSub) -> AbsSub {
        match (self, other) {
            (Bottom, x) | (x, Bottom) => x.clone(),
            (Modes { n: na, ground: ga }, Modes { n: nb, ground: gb }) => {
                if na != nb {
                    scope_mismatch("lub");
                }
                Modes { n: *na, ground: ga.intersection(gb).copied().collect() }
            }
            (Types { tys: ta }, Types { tys: tb }) => {
                if ta.len() != tb.len() {
                    scope_mismatch("lub");
                }
                Types { tys: ta.iter().zip(tb).map(|(a, b)| a.lub(*b)).collect() }
            }
            (Product { ground: ga, tys: ta }, Product { ground: gb, tys: tb }) => {
                if ta.len() != tb.len() {
                    scope_mismatch("lub");
                }
                Product {
                    ground: ga.intersection(gb).copied().collect(),
                    tys: ta.iter().zip(tb).map(|(a, b)| a.lub(*b)).collect(),
                }
            }
            _ => scope_mismatch("lub"),
        }
    }

    pub fn glb(&self, other: &AbsSub) -> AbsSub {
        match (self, other) {
            (Bottom, _) | (_, Bottom) => Bottom,
            (Modes { n: na, ground: ga }, Modes { n: nb, ground: gb }) => {
                if na != nb {
                    scope_mismatch("glb");
                }
                Modes { n: *na, ground: ga.union(gb).copied().collect() }
            }
            (Types { tys: ta }, Types { tys: tb }) => {
                if ta.len() != tb.len() {
                    scope_mismatch("glb");
                }
                let tys: Vec<TypeElem> = ta.iter().zip(tb).map(|(a, b)| a.glb(*b)).collect();
                if tys.contains(&TypeElem::Bot) {
                    Bottom
                } else {
                    Types { tys }
                }
            }
            (Product { ground: ga, tys: ta }, Product { ground: gb, tys: tb }) => {
                if ta.len() != tb.len() {
                    scope_mismatch("glb");
                }
                let tys: Vec<TypeElem> = ta.iter().zip(tb).map(|(a, b)| a.glb(*b)).collect();
                if tys.contains(&TypeElem::Bot) {
                    Bottom
                } else {
                    Product { ground: ga.union(gb).copied().collect(), tys }
                }
            }
            _ => scope_mismatch("glb"),
        }
    }

    /// Restricts to the given variables; result scope index `i` corresponds
    /// to `onto[i]`. Repeated variables are allowed.
    pub fn project(&self, onto: &[u32]) -> AbsSub {
        match self {
            Bottom => Bottom,
            Modes { ground, .. } => Modes {
                n: onto.len() as u32,
                ground: onto
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| ground.contains(v))
                    .map(|(i, _)| i as u32)
                    .collect(),
            },
            Types { tys } => {
                Types { tys: onto.iter().map(|&v| tys[v as usize]).collect() }
            }
            Product { ground, tys } => Product {
                ground: onto
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| ground.contains(v))
                    .map(|(i, _)| i as u32)
                    .collect(),
                tys: onto.iter().map(|&v| tys[v as usize]).collect(),
            },
        }
    }

    /// Grows the scope to `new_n`; fresh variables are locally Top (not
    /// ground, type any).
    pub fn extend(&self, new_n: usize) -> AbsSub {
        match self {
            Bottom => Bottom,
            Modes { n, ground } => {
                assert!(new_n >= *n as usize, "extend must not shrink the scope");
                Modes { n: new_n as u32, ground: ground.clone() }
            }
            Types { tys } => {
                assert!(new_n >= tys.len());
                let mut t = tys.clone();
                t.resize(new_n, TypeElem::Any);
                Types { tys: t }
            }
            Product { ground, tys } => {
                assert!(new_n >= tys.len());
                let mut t = tys.clone();
                t.resize(new_n, TypeElem::Any);
                Product { ground: ground.clone(), tys: t }
            }
        }
    }

    /// Builder form of [`Self::set_ground`].
    pub fn with_ground(mut self, v: u32) -> AbsSub {
        self.set_ground(v);
        self
    }

    /// Builder form of [`Self::meet_type`]; ⊥ results collapse to Bottom.
    pub fn with_type(mut self, v: u32, e: TypeElem) -> AbsSub {
        if self.meet_type(v, e) {
            self
        } else {
            Bottom
        }
    }

    pub(crate) fn set_ground(&mut self, v: u32) -> bool {
        match self {
            Modes { ground, .. } | Product { ground, .. } => ground.insert(v),
            _ => false,
        }
    }

    /// Meets variable `v`'s type with `e`; returns false if the result is ⊥
    /// (the whole substitution must then become Bottom).
    pub(crate) fn meet_type(&mut self, v: u32, e: TypeElem) -> bool {
        match self {
            Types { tys } | Product { tys, .. } => {
                let m = tys[v as usize].glb(e);
                tys[v as usize] = m;
                m != TypeElem::Bot
            }
            _ => true,
        }
    }

    fn all_ground(&self, vars: &[u32]) -> bool {
        vars.iter().all(|&v| self.is_ground(v))
    }

    /// Principal shape of a non-variable term.
    fn shape_of(t: &ChcTerm) -> TypeElem {
        match t {
            ChcTerm::Int(_) => TypeElem::Int,
            ChcTerm::Atom(a) if a == "[]" => TypeElem::Lst,
            ChcTerm::Atom(_) => TypeElem::Atm,
            ChcTerm::Compound(f, args) if f == "." && args.len() == 2 => TypeElem::Lst,
            ChcTerm::Compound(..) => TypeElem::Struct,
            ChcTerm::Var(_) => TypeElem::Any,
        }
    }

    /// Abstract transfer for one unification or builtin step. Sound
    /// over-approximation of concrete unification/evaluation; Bottom is
    /// absorbing.
    pub fn amgu(&self, step: &BodyStep) -> AbsSub {
        if self.is_bottom() {
            return Bottom;
        }
        let mut out = self.clone();
        let ok = match step {
            BodyStep::Unify(x, t) => out.amgu_unify(*x, t),
            BodyStep::Builtin(BuiltinKind::Is, args) => {
                // X is E: X becomes ground iff vars(E) are all ground, and
                // numeric, so its type meets int
                let lhs = &args[0];
                let rhs_vars = args[1].vars();
                let mut ok = true;
                if let ChcTerm::Var(x) = lhs {
                    if out.all_ground(&rhs_vars) {
                        out.set_ground(*x);
                    }
                    ok = out.meet_type(*x, TypeElem::Int);
                }
                ok
            }
            // comparisons cannot bind
            BodyStep::Builtin(BuiltinKind::Cmp(_), _) => true,
            BodyStep::Call(..) => panic!("amgu does not handle Call steps"),
        };
        if ok {
            out
        } else {
            Bottom
        }
    }

    fn amgu_unify(&mut self, x: u32, t: &ChcTerm) -> bool {
        // groundness: either side grounds the other
        let tvars = t.vars();
        if self.is_ground(x) {
            for v in &tvars {
                self.set_ground(*v);
            }
        } else if self.all_ground(&tvars) {
            self.set_ground(x);
        }
        // types: variable-variable unification meets both sides; otherwise
        // the bound shape of t constrains x (depth-0: t's argument
        // variables are unconstrained)
        match t {
            ChcTerm::Var(y) => {
                let m = self.type_of(x).glb(self.type_of(*y));
                self.meet_type(x, m) && self.meet_type(*y, m)
            }
            other => self.meet_type(x, Self::shape_of(other)),
        }
    }

    /// Canonical rendering for tooltips and the CLI:
    /// `ground(X,Y), type(Z)=lst`, or `bottom`, or `true` when nothing is
    /// known.
    pub fn render(&self, names: &[String]) -> String {
        match self {
            Bottom => "bottom".to_string(),
            _ => {
                let n = self.scope_len().unwrap_or(0);
                let name =
                    |i: usize| names.get(i).cloned().unwrap_or_else(|| format!("_V{i}"));
                let mut parts = Vec::new();
                let grounds: Vec<String> =
                    (0..n).filter(|&i| self.is_ground(i as u32)).map(name).collect();
                if !grounds.is_empty() {
                    parts.push(format!("ground({})", grounds.join(",")));
                }
                if matches!(self, Types { .. } | Product { .. }) {
                    for i in 0..n {
                        let t = self.type_of(i as u32);
                        if t != TypeElem::Any {
                            parts.push(format!("type({})={}", name(i), t.render()));
                        }
                    }
                }
                if parts.is_empty() {
                    "true".to_string()
                } else {
                    parts.join(", ")
                }
            }
        }
    }
}

// --- assertion property bridge ---------------------------------------------

/// Abstraction of a property conjunction: the abstract value plus whether
/// every literal was native (exactly representable) in the chosen domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropAbstraction {
    pub abs: AbsSub,
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Entailment {
    Yes,
    No,
    Maybe,
}

/// Abstracts a conjunction of property literals over the head argument
/// variables (`scope_vars[i]` is the name of argument `i`). Native literals
/// are abstracted exactly; anything else contributes Top and clears
/// `exact`. Malformed literals are reported through `issues`.
pub fn abstract_props(
    conj: &[Term],
    scope_vars: &[String],
    kind: DomainKind,
    issues: &mut Vec<String>,
) -> PropAbstraction {
    let n = scope_vars.len();
    let mut abs = AbsSub::top(kind, n);
    let mut exact = true;
    let arg_index = |t: &Term| -> Option<u32> {
        match t {
            Term::Var(v) => scope_vars.iter().position(|s| s == v).map(|i| i as u32),
            _ => None,
        }
    };
    for lit in conj {
        let Some((f, arity)) = lit.functor() else {
            issues.push(format!("property literal {lit} is not a predicate"));
            exact = false;
            continue;
        };
        let native_type = match f {
            "int" | "num" => Some(TypeElem::Int),
            "atm" => Some(TypeElem::Atm),
            "list" => Some(TypeElem::Lst),
            "struct" => Some(TypeElem::Struct),
            _ => None,
        };
        let is_native_name = f == "ground" || native_type.is_some();
        if is_native_name && arity != 1 {
            issues.push(format!("property {f}/{arity} has unexpected arity (expected {f}/1)"));
            exact = false;
            continue;
        }
        if f == "ground" {
            match arg_index(&lit.args()[0]) {
                Some(i) if matches!(kind, DomainKind::Modes | DomainKind::Product) => {
                    abs.set_ground(i);
                }
                Some(_) => exact = false, // groundness not representable in Types
                None => {
                    // constant or unknown variable: not exactly representable
                    if !lit.args()[0].is_var() {
                        exact = false;
                    } else {
                        issues.push(format!(
                            "property argument {} is not a head variable",
                            lit.args()[0]
                        ));
                        exact = false;
                    }
                }
            }
        } else if let Some(te) = native_type {
            match arg_index(&lit.args()[0]) {
                Some(i) if matches!(kind, DomainKind::Types | DomainKind::Product) => {
                    if !abs.meet_type(i, te) {
                        abs = Bottom;
                    }
                }
                Some(_) => exact = false,
                None => {
                    if !lit.args()[0].is_var() {
                        exact = false;
                    } else {
                        issues.push(format!(
                            "property argument {} is not a head variable",
                            lit.args()[0]
                        ));
                        exact = false;
                    }
                }
            }
        } else {
            // non-native property (even/1, var/1, arithmetic constraints, ...)
            exact = false;
        }
        if abs.is_bottom() {
            // contradictory native properties; keep scanning for issues
            exact = exact && true;
        }
    }
    PropAbstraction { abs, exact }
}

/// Three-valued comparison of an inferred substitution against an abstracted
/// property conjunction. `Yes` requires exactness; `No` is sound even for
/// inexact properties because the abstraction over-approximates them.
pub fn entails_props(a: &AbsSub, p: &PropAbstraction) -> Entailment {
    if p.exact && a.leq(&p.abs) {
        return Entailment::Yes;
    }
    if !a.is_bottom() && a.glb(&p.abs).is_bottom() {
        return Entailment::No;
    }
    Entailment::Maybe
}

/// Scans assertion/entry literals and picks the domain: groundness if only
/// groundness-native literals appear, types if only type-native ones, the
/// product if both, groundness if none.
pub fn auto_select_domain<'a>(literals: impl Iterator<Item = &'a Term>) -> DomainKind {
    let mut modes = false;
    let mut types = false;
    for lit in literals {
        if let Some((f, 1)) = lit.functor() {
            match f {
                "ground" => modes = true,
                "int" | "num" | "atm" | "list" | "struct" => types = true,
                _ => {}
            }
        }
    }
    match (modes, types) {
        (_, false) => DomainKind::Modes,
        (false, true) => DomainKind::Types,
        (true, true) => DomainKind::Product,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn modes(n: usize, ground: &[u32]) -> AbsSub {
        Modes { n: n as u32, ground: ground.iter().copied().collect() }
    }

    fn types(tys: &[TypeElem]) -> AbsSub {
        Types { tys: tys.to_vec() }
    }

    #[test]
    fn leq_examples() {
        assert!(modes(2, &[0, 1]).leq(&modes(2, &[0])));
        assert!(Bottom.leq(&AbsSub::top(DomainKind::Modes, 3)));
        assert!(types(&[TypeElem::Int]).leq(&types(&[TypeElem::Any])));
        assert!(!types(&[TypeElem::Any]).leq(&types(&[TypeElem::Int])));
    }

    #[test]
    fn lub_glb_examples() {
        // lub of groundness sets is intersection
        assert_eq!(modes(3, &[0, 1]).lub(&modes(3, &[0, 2])), modes(3, &[0]));
        // incomparable type meet is bottom and absorbs the substitution
        assert_eq!(types(&[TypeElem::Int]).glb(&types(&[TypeElem::Lst])), Bottom);
        let a = modes(2, &[1]);
        assert_eq!(a.lub(&Bottom), a);
        assert_eq!(modes(3, &[0]).glb(&modes(3, &[1])), modes(3, &[0, 1]));
    }

    #[test]
    fn amgu_grounds_term_vars() {
        // {X} after X = f(Y,Z) -> {X,Y,Z}
        let a = modes(3, &[0]);
        let step = BodyStep::Unify(
            0,
            ChcTerm::Compound("f".into(), vec![ChcTerm::Var(1), ChcTerm::Var(2)]),
        );
        assert_eq!(a.amgu(&step), modes(3, &[0, 1, 2]));
    }

    #[test]
    fn amgu_replay_reaches_local_fixpoint() {
        // X=Y then Y=a: one forward pass misses X; replaying stabilizes it
        let steps = [
            BodyStep::Unify(0, ChcTerm::Var(1)),
            BodyStep::Unify(1, ChcTerm::Atom("a".into())),
        ];
        let mut a = modes(2, &[]);
        loop {
            let mut next = a.clone();
            for s in &steps {
                next = next.amgu(s);
            }
            if next == a {
                break;
            }
            a = next;
        }
        assert_eq!(a, modes(2, &[0, 1]));
    }

    #[test]
    fn amgu_list_cell_types() {
        let a = types(&[TypeElem::Any, TypeElem::Any, TypeElem::Any]);
        let step = BodyStep::Unify(
            0,
            ChcTerm::Compound(".".into(), vec![ChcTerm::Var(1), ChcTerm::Var(2)]),
        );
        assert_eq!(a.amgu(&step).type_of(0), TypeElem::Lst);
    }

    #[test]
    fn amgu_conflicting_shapes_is_bottom() {
        let a = types(&[TypeElem::Int]);
        let step = BodyStep::Unify(0, ChcTerm::Atom("foo".into()));
        assert!(a.amgu(&step).is_bottom());
    }

    #[test]
    fn project_extend() {
        let a = modes(3, &[0, 1]);
        assert_eq!(a.project(&[0]), modes(1, &[0]));
        assert_eq!(modes(1, &[0]).extend(2), modes(2, &[0]));
        assert_eq!(Bottom.project(&[0, 1]), Bottom);
        // extend(project(a,S), n) loses information only
        let p = a.project(&[0, 2]);
        assert_eq!(p, modes(2, &[0]));
    }

    #[test]
    fn abstract_props_native_and_nonnative() {
        let scope = vec!["X".to_string(), "Z".to_string()];
        let mut issues = Vec::new();
        let conj = vec![
            Term::Compound("ground".into(), vec![Term::Var("X".into())]),
            Term::Compound("list".into(), vec![Term::Var("Z".into())]),
        ];
        let p = abstract_props(&conj, &scope, DomainKind::Product, &mut issues);
        assert!(p.exact && issues.is_empty());
        assert_eq!(
            p.abs,
            Product {
                ground: [0u32].into_iter().collect(),
                tys: vec![TypeElem::Any, TypeElem::Lst]
            }
        );
    }

    #[test]
    fn pow_pre_is_inexact() {
        // (int(X), even(N)): even/1 is non-native
        let scope = vec!["X".to_string(), "N".to_string(), "P".to_string()];
        let mut issues = Vec::new();
        let conj = vec![
            Term::Compound("int".into(), vec![Term::Var("X".into())]),
            Term::Compound("even".into(), vec![Term::Var("N".into())]),
        ];
        let p = abstract_props(&conj, &scope, DomainKind::Types, &mut issues);
        assert!(!p.exact);
        assert_eq!(p.abs.type_of(0), TypeElem::Int);
        assert_eq!(p.abs.type_of(1), TypeElem::Any);
    }

    #[test]
    fn empty_conjunction_is_exact_top() {
        let mut issues = Vec::new();
        let p = abstract_props(&[], &["X".to_string()], DomainKind::Product, &mut issues);
        assert!(p.exact);
        assert_eq!(p.abs, AbsSub::top(DomainKind::Product, 1));
    }

    #[test]
    fn entails_examples() {
        let scope = vec!["Z".to_string()];
        let mut issues = Vec::new();
        let p = abstract_props(
            &[
                Term::Compound("ground".into(), vec![Term::Var("Z".into())]),
                Term::Compound("list".into(), vec![Term::Var("Z".into())]),
            ],
            &scope,
            DomainKind::Product,
            &mut issues,
        );
        let a = Product { ground: [0u32].into_iter().collect(), tys: vec![TypeElem::Lst] };
        assert_eq!(entails_props(&a, &p), Entailment::Yes);

        let pint = abstract_props(
            &[Term::Compound("int".into(), vec![Term::Var("Z".into())])],
            &scope,
            DomainKind::Types,
            &mut issues,
        );
        let alst = types(&[TypeElem::Lst]);
        assert_eq!(entails_props(&alst, &pint), Entailment::No);

        // inexact properties can never be entailed
        let inexact = PropAbstraction { abs: AbsSub::top(DomainKind::Types, 1), exact: false };
        assert_ne!(entails_props(&alst, &inexact), Entailment::Yes);
    }

    #[test]
    fn auto_selection() {
        let g = Term::Compound("ground".into(), vec![Term::Var("X".into())]);
        let l = Term::Compound("list".into(), vec![Term::Var("X".into())]);
        let e = Term::Compound("even".into(), vec![Term::Var("X".into())]);
        assert_eq!(auto_select_domain([&g].into_iter()), DomainKind::Modes);
        assert_eq!(auto_select_domain([&l].into_iter()), DomainKind::Types);
        assert_eq!(auto_select_domain([&g, &l].into_iter()), DomainKind::Product);
        assert_eq!(auto_select_domain([&e].into_iter()), DomainKind::Modes);
        assert_eq!(auto_select_domain([].into_iter()), DomainKind::Modes);
    }

    #[test]
    fn render_canonical_form() {
        let names = vec!["X".to_string(), "Y".to_string(), "Z".to_string()];
        let a = Product {
            ground: [0u32, 1].into_iter().collect(),
            tys: vec![TypeElem::Any, TypeElem::Any, TypeElem::Lst],
        };
        assert_eq!(a.render(&names), "ground(X,Y), type(Z)=lst");
        assert_eq!(Bottom.render(&names), "bottom");
    }
}
