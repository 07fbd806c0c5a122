//! Knowledge base syntax: names, concepts, axioms, TBoxes, ABoxes and
//! counting queries, plus the text format, normal forms and fragment
//! detection.

mod fragment;
mod normalize;
mod parser;
mod printer;

pub use fragment::{detect_fragment, fragment_le, Fragment};
pub use normalize::{normalize, NormalizeOutcome};
pub use parser::{parse_kb, ParseError};
pub use printer::serialize_kb;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// Namespace reserved for fresh names introduced by normalization.
pub const NF_PREFIX: &str = "_nf_";
/// Namespace reserved for binary-counter concepts emitted by the realizers.
pub const CTR_PREFIX: &str = "_ctr_";

macro_rules! name_type {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(Arc<str>);

        impl $name {
            pub fn new(s: impl AsRef<str>) -> Self {
                let s = s.as_ref();
                assert!(!s.is_empty(), concat!(stringify!($name), " must be non-empty"));
                Self(Arc::from(s))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!(stringify!($name), "({})"), self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self::new(s)
            }
        }
    };
}

name_type!(
    /// A concept name.
    ConceptName
);
name_type!(
    /// A role name (never carries the inversion flag; see [`Role`]).
    RoleName
);
name_type!(
    /// An individual name.
    Individual
);

/// A role occurrence: a role name, possibly inverted.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Role {
    pub name: RoleName,
    pub inverted: bool,
}

impl Role {
    pub fn plain(name: impl Into<RoleName>) -> Self {
        Role { name: name.into(), inverted: false }
    }

    pub fn inverse_of(name: impl Into<RoleName>) -> Self {
        Role { name: name.into(), inverted: true }
    }

    /// Inverting twice yields the original.
    pub fn inverse(&self) -> Role {
        Role { name: self.name.clone(), inverted: !self.inverted }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverted {
            write!(f, "{}-", self.name)
        } else {
            write!(f, "{}", self.name)
        }
    }
}

impl fmt::Debug for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Role({self})")
    }
}

/// A concept expression. `Bot`, `Or`, `Forall` and unqualified `Exists` are
/// parse-time sugar: `bot` is `not top`, `C | D` is not in the grammar,
/// `forall r.C` is `not exists r.(not C)` and `exists r` is `exists r.top`.
///
/// Conjunctions are kept flattened, deduplicated and sorted so structural
/// equality is canonical; build them with [`Concept::and`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Concept {
    Top,
    Name(ConceptName),
    Not(Box<Concept>),
    And(Vec<Concept>),
    Exists(Role, Box<Concept>),
}

impl Concept {
    pub fn name(n: impl Into<ConceptName>) -> Self {
        Concept::Name(n.into())
    }

    pub fn bot() -> Self {
        Concept::Not(Box::new(Concept::Top))
    }

    pub fn is_bot(&self) -> bool {
        matches!(self, Concept::Not(inner) if **inner == Concept::Top)
    }

    pub fn not(c: Concept) -> Self {
        Concept::Not(Box::new(c))
    }

    pub fn exists(role: Role, filler: Concept) -> Self {
        Concept::Exists(role, Box::new(filler))
    }

    pub fn exists_top(role: Role) -> Self {
        Concept::exists(role, Concept::Top)
    }

    pub fn forall(role: Role, filler: Concept) -> Self {
        Concept::not(Concept::exists(role, Concept::not(filler)))
    }

    pub fn or(a: Concept, b: Concept) -> Self {
        Concept::not(Concept::and([Concept::not(a), Concept::not(b)]))
    }

    /// Disjunction as sugar: the empty disjunction is `bot`, a singleton is
    /// its member.
    pub fn or_all(parts: impl IntoIterator<Item = Concept>) -> Self {
        let mut parts: Vec<Concept> = parts.into_iter().collect();
        match parts.len() {
            0 => Concept::bot(),
            1 => parts.pop().unwrap(),
            _ => Concept::not(Concept::and(parts.into_iter().map(Concept::not))),
        }
    }

    /// Views this concept as a disjunction of names: `bot` is the empty
    /// disjunction, a name is a singleton, otherwise `not (not A & ...)`.
    pub fn as_name_disjunction(&self) -> Option<Vec<ConceptName>> {
        match self {
            Concept::Name(n) => Some(vec![n.clone()]),
            Concept::Not(inner) if **inner == Concept::Top => Some(vec![]),
            Concept::Not(inner) => match &**inner {
                Concept::And(parts) => {
                    let mut out = Vec::new();
                    for p in parts {
                        match p {
                            Concept::Not(q) => match &**q {
                                Concept::Name(n) => out.push(n.clone()),
                                _ => return None,
                            },
                            _ => return None,
                        }
                    }
                    Some(out)
                }
                _ => None,
            },
            _ => None,
        }
    }

    /// Flattening, deduplicating, sorting conjunction constructor. An empty
    /// conjunction is `Top`; a singleton is its only member.
    pub fn and(parts: impl IntoIterator<Item = Concept>) -> Self {
        let mut flat: BTreeSet<Concept> = BTreeSet::new();
        fn push(c: Concept, out: &mut BTreeSet<Concept>) {
            match c {
                Concept::And(inner) => {
                    for p in inner {
                        push(p, out);
                    }
                }
                Concept::Top => {}
                other => {
                    out.insert(other);
                }
            }
        }
        for p in parts {
            push(p, &mut flat);
        }
        let mut v: Vec<Concept> = flat.into_iter().collect();
        match v.len() {
            0 => Concept::Top,
            1 => v.pop().unwrap(),
            _ => Concept::And(v),
        }
    }

    /// Views this concept as a conjunction of concept names, if it is one.
    /// `Top` is the empty conjunction.
    pub fn as_name_conjunction(&self) -> Option<BTreeSet<ConceptName>> {
        match self {
            Concept::Top => Some(BTreeSet::new()),
            Concept::Name(n) => Some([n.clone()].into()),
            Concept::And(parts) => {
                let mut out = BTreeSet::new();
                for p in parts {
                    match p {
                        Concept::Name(n) => {
                            out.insert(n.clone());
                        }
                        _ => return None,
                    }
                }
                Some(out)
            }
            _ => None,
        }
    }

    pub fn conjunction_of(names: impl IntoIterator<Item = ConceptName>) -> Concept {
        Concept::and(names.into_iter().map(Concept::Name))
    }

    /// `forall r.C` viewed structurally, i.e. `not exists r.(not C)`; also
    /// recognizes `not exists r.A` as `forall r.(not A)`.
    pub fn as_forall(&self) -> Option<(Role, Concept)> {
        match self {
            Concept::Not(inner) => match &**inner {
                Concept::Exists(r, filler) => match &**filler {
                    Concept::Not(f) => Some((r.clone(), (**f).clone())),
                    other => Some((r.clone(), Concept::not(other.clone()))),
                },
                _ => None,
            },
            _ => None,
        }
    }

    pub fn visit_roles(&self, f: &mut impl FnMut(&Role)) {
        match self {
            Concept::Top | Concept::Name(_) => {}
            Concept::Not(c) => c.visit_roles(f),
            Concept::And(parts) => parts.iter().for_each(|c| c.visit_roles(f)),
            Concept::Exists(r, c) => {
                f(r);
                c.visit_roles(f);
            }
        }
    }

    pub fn visit_concept_names(&self, f: &mut impl FnMut(&ConceptName)) {
        match self {
            Concept::Top => {}
            Concept::Name(n) => f(n),
            Concept::Not(c) => c.visit_concept_names(f),
            Concept::And(parts) => parts.iter().for_each(|c| c.visit_concept_names(f)),
            Concept::Exists(_, c) => c.visit_concept_names(f),
        }
    }
}

impl fmt::Debug for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", printer::concept_to_string(self))
    }
}

/// A TBox axiom: a concept inclusion or a (qualified) functionality
/// restriction `guard ⊑ ≤1 role.filler`. The unqualified case has
/// `guard = filler = ⊤`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    Ci { lhs: Concept, rhs: Concept },
    Funct { guard: Concept, role: Role, filler: Concept },
}

impl Axiom {
    pub fn ci(lhs: Concept, rhs: Concept) -> Self {
        Axiom::Ci { lhs, rhs }
    }

    pub fn funct(guard: Concept, role: Role, filler: Concept) -> Self {
        Axiom::Funct { guard, role, filler }
    }

    pub fn funct_unqualified(role: Role) -> Self {
        Axiom::Funct { guard: Concept::Top, role, filler: Concept::Top }
    }
}

impl fmt::Debug for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", printer::axiom_to_string(self))
    }
}

/// An ABox assertion. Role assertions always use a plain role name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Assertion {
    Concept(ConceptName, Individual),
    Role(RoleName, Individual, Individual),
}

impl fmt::Debug for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Assertion::Concept(c, a) => write!(f, "{c}({a})"),
            Assertion::Role(r, a, b) => write!(f, "{r}({a},{b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TBox {
    pub axioms: BTreeSet<Axiom>,
}

impl TBox {
    pub fn new(axioms: impl IntoIterator<Item = Axiom>) -> Self {
        TBox { axioms: axioms.into_iter().collect() }
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.axioms.len()
    }

    pub fn insert(&mut self, ax: Axiom) -> bool {
        self.axioms.insert(ax)
    }

    /// Concept names occurring in the TBox, sorted.
    pub fn concept_names(&self) -> BTreeSet<ConceptName> {
        let mut out = BTreeSet::new();
        let mut add = |n: &ConceptName| {
            out.insert(n.clone());
        };
        for ax in &self.axioms {
            match ax {
                Axiom::Ci { lhs, rhs } => {
                    lhs.visit_concept_names(&mut add);
                    rhs.visit_concept_names(&mut add);
                }
                Axiom::Funct { guard, filler, .. } => {
                    guard.visit_concept_names(&mut add);
                    filler.visit_concept_names(&mut add);
                }
            }
        }
        out
    }

    /// Role names occurring in the TBox, sorted.
    pub fn role_names(&self) -> BTreeSet<RoleName> {
        let mut out = BTreeSet::new();
        let mut add = |r: &Role| {
            out.insert(r.name.clone());
        };
        for ax in &self.axioms {
            match ax {
                Axiom::Ci { lhs, rhs } => {
                    lhs.visit_roles(&mut add);
                    rhs.visit_roles(&mut add);
                }
                Axiom::Funct { guard, role, filler } => {
                    add(role);
                    guard.visit_roles(&mut add);
                    filler.visit_roles(&mut add);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ABox {
    pub assertions: BTreeSet<Assertion>,
}

impl ABox {
    pub fn new(assertions: impl IntoIterator<Item = Assertion>) -> Self {
        ABox { assertions: assertions.into_iter().collect() }
    }

    pub fn is_empty(&self) -> bool {
        self.assertions.is_empty()
    }

    /// `Ind(A)`: the individuals used in the ABox, sorted.
    pub fn individuals(&self) -> BTreeSet<Individual> {
        let mut out = BTreeSet::new();
        for a in &self.assertions {
            match a {
                Assertion::Concept(_, x) => {
                    out.insert(x.clone());
                }
                Assertion::Role(_, x, y) => {
                    out.insert(x.clone());
                    out.insert(y.clone());
                }
            }
        }
        out
    }

    pub fn concept_names(&self) -> BTreeSet<ConceptName> {
        self.assertions
            .iter()
            .filter_map(|a| match a {
                Assertion::Concept(c, _) => Some(c.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn role_names(&self) -> BTreeSet<RoleName> {
        self.assertions
            .iter()
            .filter_map(|a| match a {
                Assertion::Role(r, _, _) => Some(r.clone()),
                _ => None,
            })
            .collect()
    }
}

/// A knowledge base: TBox plus ABox. The fragment tag is derived on demand
/// by [`detect_fragment`]. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Kb {
    pub tbox: TBox,
    pub abox: ABox,
}

impl Kb {
    pub fn new(tbox: TBox, abox: ABox) -> Self {
        Kb { tbox, abox }
    }

    pub fn fragment(&self) -> Fragment {
        detect_fragment(self)
    }

    pub fn concept_names(&self) -> BTreeSet<ConceptName> {
        let mut out = self.tbox.concept_names();
        out.extend(self.abox.concept_names());
        out
    }

    pub fn role_names(&self) -> BTreeSet<RoleName> {
        let mut out = self.tbox.role_names();
        out.extend(self.abox.role_names());
        out
    }

    /// True if any name in the KB lives in the reserved fresh-name namespace.
    pub fn uses_reserved_names(&self) -> bool {
        self.concept_names().iter().any(|n| n.as_str().starts_with(NF_PREFIX))
    }
}

/// A term of a counting query.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Ind(Individual),
    Var(String),
    CountVar(String),
}

/// An atom of a counting query.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QueryAtom {
    Concept(ConceptName, Term),
    Role(RoleName, Term, Term),
}

impl QueryAtom {
    fn terms(&self) -> Vec<&Term> {
        match self {
            QueryAtom::Concept(_, t) => vec![t],
            QueryAtom::Role(_, s, t) => vec![s, t],
        }
    }
}

/// A Boolean counting conjunctive query: a conjunction of atoms over
/// individuals, existential variables and counting variables. Answer
/// variables are assumed substituted away.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ccq {
    pub atoms: Vec<QueryAtom>,
}

impl Ccq {
    pub fn new(atoms: impl IntoIterator<Item = QueryAtom>) -> Self {
        Ccq { atoms: atoms.into_iter().collect() }
    }

    pub fn variables(&self) -> BTreeSet<Term> {
        self.atoms
            .iter()
            .flat_map(|a| a.terms().into_iter().cloned())
            .filter(|t| matches!(t, Term::Var(_) | Term::CountVar(_)))
            .collect()
    }

    pub fn counting_variables(&self) -> BTreeSet<String> {
        self.atoms
            .iter()
            .flat_map(|a| a.terms().into_iter())
            .filter_map(|t| match t {
                Term::CountVar(z) => Some(z.clone()),
                _ => None,
            })
            .collect()
    }

    /// No atom mentions an individual.
    pub fn is_individual_free(&self) -> bool {
        self.atoms.iter().all(|a| a.terms().into_iter().all(|t| !matches!(t, Term::Ind(_))))
    }

    /// Connectivity of the Gaifman graph on the query's terms.
    pub fn is_connected(&self) -> bool {
        let terms: Vec<Term> =
            self.atoms.iter().flat_map(|a| a.terms().into_iter().cloned()).collect::<BTreeSet<_>>().into_iter().collect();
        if terms.len() <= 1 {
            return true;
        }
        let index = |t: &Term| terms.iter().position(|u| u == t).unwrap();
        let mut adj = vec![BTreeSet::new(); terms.len()];
        for a in &self.atoms {
            let ts = a.terms();
            for i in 0..ts.len() {
                for j in i + 1..ts.len() {
                    let (x, y) = (index(ts[i]), index(ts[j]));
                    adj[x].insert(y);
                    adj[y].insert(x);
                }
            }
        }
        let mut seen = vec![false; terms.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// An atomic cardinality query: `q_C = ∃z C(z)` or `q_r = ∃z1 ∃z2 r(z1,z2)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CardinalityQuery {
    ConceptCard(ConceptName),
    RoleCard(RoleName),
}

impl CardinalityQuery {
    pub fn concept(name: impl Into<ConceptName>) -> Self {
        CardinalityQuery::ConceptCard(name.into())
    }

    pub fn role(name: impl Into<RoleName>) -> Self {
        CardinalityQuery::RoleCard(name.into())
    }

    /// The query as a Boolean CCQ with counting variables.
    pub fn to_ccq(&self) -> Ccq {
        match self {
            CardinalityQuery::ConceptCard(c) => {
                Ccq::new([QueryAtom::Concept(c.clone(), Term::CountVar("z".into()))])
            }
            CardinalityQuery::RoleCard(r) => Ccq::new([QueryAtom::Role(
                r.clone(),
                Term::CountVar("z1".into()),
                Term::CountVar("z2".into()),
            )]),
        }
    }
}

impl fmt::Display for CardinalityQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CardinalityQuery::ConceptCard(c) => write!(f, "#{c}"),
            CardinalityQuery::RoleCard(r) => write!(f, "#{r}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn role_double_inverse() {
        let r = Role::plain("r");
        assert_eq!(r.inverse().inverse(), r);
        assert_ne!(r.inverse(), r);
    }

    #[test]
    fn conjunction_canonical() {
        let a = Concept::name("A");
        let b = Concept::name("B");
        let c1 = Concept::and([a.clone(), Concept::and([b.clone(), a.clone()])]);
        let c2 = Concept::and([b.clone(), a.clone()]);
        assert_eq!(c1, c2);
        assert_eq!(Concept::and([a.clone()]), a);
        assert_eq!(Concept::and(Vec::<Concept>::new()), Concept::Top);
        assert_eq!(Concept::and([Concept::Top, b.clone()]), b);
    }

    #[test]
    fn name_conjunction_views() {
        let c = Concept::and([Concept::name("B"), Concept::name("A")]);
        let names = c.as_name_conjunction().unwrap();
        assert_eq!(names.len(), 2);
        assert_eq!(Concept::Top.as_name_conjunction().unwrap().len(), 0);
        assert!(Concept::exists(Role::plain("r"), Concept::Top).as_name_conjunction().is_none());
    }

    #[test]
    fn forall_pattern() {
        let f = Concept::forall(Role::plain("r"), Concept::name("C"));
        let (role, filler) = f.as_forall().unwrap();
        assert_eq!(role, Role::plain("r"));
        assert_eq!(filler, Concept::name("C"));
    }

    #[test]
    fn ccq_shape_predicates() {
        let q = CardinalityQuery::role("r").to_ccq();
        assert!(q.is_connected());
        assert!(q.is_individual_free());
        assert_eq!(q.counting_variables().len(), 2);

        // Example query: two friendOf atoms sharing an individual are
        // connected but not individual-free.
        let alice = Term::Ind(Individual::new("alice"));
        let q2 = Ccq::new([
            QueryAtom::Role(RoleName::new("friendOf"), Term::CountVar("z1".into()), alice.clone()),
            QueryAtom::Role(RoleName::new("friendOf"), Term::CountVar("z2".into()), alice),
        ]);
        assert!(q2.is_connected());
        assert!(!q2.is_individual_free());

        let disconnected = Ccq::new([
            QueryAtom::Concept(ConceptName::new("A"), Term::CountVar("z1".into())),
            QueryAtom::Concept(ConceptName::new("B"), Term::CountVar("z2".into())),
        ]);
        assert!(!disconnected.is_connected());
    }
}
