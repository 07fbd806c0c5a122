//! Finite interpretations: model checking, counting-query evaluation,
//! disjoint unions and the brute-force enumeration oracle.

mod enumerate;

pub use enumerate::{enumerate_models, oracle_membership, EnumerateOpts, OracleOutcome, SearchBudget};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::kb::{
    Assertion, Axiom, Ccq, Concept, ConceptName, Individual, Kb, QueryAtom, Role, RoleName, Term,
};

pub type ElemId = u32;

/// A finite interpretation with dense element ids. Named individuals occupy
/// the low id range. Immutable by convention after construction.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Interpretation {
    /// Display labels, one per element.
    pub labels: Vec<String>,
    pub named: BTreeMap<Individual, ElemId>,
    pub concepts: BTreeMap<ConceptName, BTreeSet<ElemId>>,
    pub roles: BTreeMap<RoleName, BTreeSet<(ElemId, ElemId)>>,
}

/// An unmet existential obligation `(element, role, target type)` promised to
/// be satisfiable by an infinite tree continuation. Produced by the Horn
/// model completion when it truncates its witness trees.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FrontierCertificate {
    pub pending: BTreeSet<(ElemId, Role, BTreeSet<ConceptName>)>,
}

impl FrontierCertificate {
    pub fn is_empty(&self) -> bool {
        self.pending.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InterpError {
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("argument is not a model: {0}")]
    NotAModel(String),
    #[error("work budget exceeded")]
    BudgetExceeded,
}

/// One reported constraint violation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Ci { axiom: Axiom, witness: ElemId },
    Funct { axiom: Axiom, witness: ElemId, successors: (ElemId, ElemId) },
    Assertion { assertion: Assertion },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Ci { axiom, witness } => write!(f, "{axiom:?} violated at element {witness}"),
            Violation::Funct { axiom, witness, successors } => write!(
                f,
                "{axiom:?} violated at element {witness} with successors {} and {}",
                successors.0, successors.1
            ),
            Violation::Assertion { assertion } => write!(f, "assertion {assertion:?} not satisfied"),
        }
    }
}

impl Interpretation {
    pub fn domain_size(&self) -> usize {
        self.labels.len()
    }

    pub fn elements(&self) -> impl Iterator<Item = ElemId> {
        0..self.labels.len() as ElemId
    }

    pub fn concept_ext(&self, name: &ConceptName) -> BTreeSet<ElemId> {
        self.concepts.get(name).cloned().unwrap_or_default()
    }

    pub fn role_pairs(&self, name: &RoleName) -> BTreeSet<(ElemId, ElemId)> {
        self.roles.get(name).cloned().unwrap_or_default()
    }

    fn has_role_edge(&self, role: &Role, src: ElemId, dst: ElemId) -> bool {
        let set = match self.roles.get(&role.name) {
            Some(s) => s,
            None => return false,
        };
        if role.inverted {
            set.contains(&(dst, src))
        } else {
            set.contains(&(src, dst))
        }
    }

    /// Successors of `d` under `role` (respecting inversion).
    pub fn successors(&self, role: &Role, d: ElemId) -> Vec<ElemId> {
        let set = match self.roles.get(&role.name) {
            Some(s) => s,
            None => return Vec::new(),
        };
        let mut out = Vec::new();
        for &(x, y) in set {
            if role.inverted {
                if y == d {
                    out.push(x);
                }
            } else if x == d {
                out.push(y);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Extension of an arbitrary concept.
    pub fn eval(&self, c: &Concept) -> BTreeSet<ElemId> {
        let all: BTreeSet<ElemId> = self.elements().collect();
        match c {
            Concept::Top => all,
            Concept::Name(n) => self.concept_ext(n),
            Concept::Not(inner) => {
                let inner_ext = self.eval(inner);
                all.difference(&inner_ext).copied().collect()
            }
            Concept::And(parts) => {
                let mut it = parts.iter();
                let mut acc = match it.next() {
                    Some(p) => self.eval(p),
                    None => all,
                };
                for p in it {
                    let e = self.eval(p);
                    acc = acc.intersection(&e).copied().collect();
                }
                acc
            }
            Concept::Exists(role, filler) => {
                let filler_ext = self.eval(filler);
                self.elements()
                    .filter(|&d| self.successors(role, d).iter().any(|e| filler_ext.contains(e)))
                    .collect()
            }
        }
    }

    /// True when a pending obligation provides a virtual witness for
    /// `exists role.filler` at `d`. Only name-conjunction fillers can be
    /// discharged by a certificate.
    fn virtual_witness(
        &self,
        cert: &FrontierCertificate,
        d: ElemId,
        role: &Role,
        filler: &Concept,
    ) -> bool {
        let Some(needed) = filler.as_name_conjunction() else {
            return false;
        };
        cert.pending
            .iter()
            .any(|(e, r, t)| *e == d && r == role && needed.iter().all(|n| t.contains(n)))
    }

    fn satisfies_ci_at(
        &self,
        cert: &FrontierCertificate,
        rhs: &Concept,
        d: ElemId,
        lhs_ext: &BTreeSet<ElemId>,
        rhs_ext: &BTreeSet<ElemId>,
    ) -> bool {
        if !lhs_ext.contains(&d) {
            return true;
        }
        if rhs_ext.contains(&d) {
            return true;
        }
        // A certificate can discharge a missing existential witness.
        if let Concept::Exists(role, filler) = rhs {
            if self.virtual_witness(cert, d, role, filler) {
                return true;
            }
        }
        false
    }
}

/// Check an interpretation (optionally extended by a frontier certificate)
/// against a knowledge base, returning the list of violations. Every ABox
/// individual must be named in the interpretation.
pub fn check_model(
    interp: &Interpretation,
    kb: &Kb,
    cert: Option<&FrontierCertificate>,
) -> Result<Vec<Violation>, InterpError> {
    let empty = FrontierCertificate::default();
    let cert = cert.unwrap_or(&empty);
    for ind in kb.abox.individuals() {
        if !interp.named.contains_key(&ind) {
            return Err(InterpError::SignatureMismatch(format!(
                "individual `{ind}` is not named in the interpretation"
            )));
        }
    }
    if interp.labels.is_empty() {
        return Err(InterpError::SignatureMismatch("interpretation domain is empty".into()));
    }

    let mut out = Vec::new();
    for ax in &kb.tbox.axioms {
        match ax {
            Axiom::Ci { lhs, rhs } => {
                let lhs_ext = interp.eval(lhs);
                let rhs_ext = interp.eval(rhs);
                for d in interp.elements() {
                    if !interp.satisfies_ci_at(cert, rhs, d, &lhs_ext, &rhs_ext) {
                        out.push(Violation::Ci { axiom: ax.clone(), witness: d });
                    }
                }
            }
            Axiom::Funct { guard, role, filler } => {
                let guard_ext = interp.eval(guard);
                let filler_ext = interp.eval(filler);
                let filler_names = filler.as_name_conjunction();
                for d in guard_ext {
                    let mut hits: Vec<ElemId> =
                        interp.successors(role, d).into_iter().filter(|e| filler_ext.contains(e)).collect();
                    // Virtual successors count against functionality too.
                    let virtual_hits = match &filler_names {
                        Some(needed) => cert
                            .pending
                            .iter()
                            .filter(|(e, r, t)| *e == d && r == role && needed.iter().all(|n| t.contains(n)))
                            .count(),
                        None => 0,
                    };
                    if hits.len() + virtual_hits > 1 {
                        hits.extend(std::iter::repeat(u32::MAX).take(virtual_hits));
                        out.push(Violation::Funct {
                            axiom: ax.clone(),
                            witness: d,
                            successors: (hits[0], hits[1]),
                        });
                    }
                }
            }
        }
    }
    for a in &kb.abox.assertions {
        let ok = match a {
            Assertion::Concept(c, x) => {
                let d = interp.named[x];
                interp.concept_ext(c).contains(&d)
            }
            Assertion::Role(r, x, y) => {
                let (dx, dy) = (interp.named[x], interp.named[y]);
                interp.has_role_edge(&Role::plain(r.as_str()), dx, dy)
            }
        };
        if !ok {
            out.push(Violation::Assertion { assertion: a.clone() });
        }
    }
    Ok(out)
}

/// Number of distinct counting-variable projections of homomorphisms from the
/// query into the interpretation. The query must be Boolean.
pub fn count_answers(interp: &Interpretation, q: &Ccq) -> Result<u64, InterpError> {
    let vars: Vec<Term> = q.variables().into_iter().collect();
    let counting: Vec<String> = q.counting_variables().into_iter().collect();
    let resolve_ind = |ind: &Individual| -> Result<ElemId, InterpError> {
        interp
            .named
            .get(ind)
            .copied()
            .ok_or_else(|| InterpError::SignatureMismatch(format!("individual `{ind}` not named")))
    };

    let mut projections: BTreeSet<Vec<ElemId>> = BTreeSet::new();
    let mut assignment: BTreeMap<Term, ElemId> = BTreeMap::new();

    fn atom_holds(
        interp: &Interpretation,
        atom: &QueryAtom,
        assignment: &BTreeMap<Term, ElemId>,
        resolve: &impl Fn(&Term) -> Option<ElemId>,
    ) -> Option<bool> {
        let val = |t: &Term| -> Option<ElemId> {
            match t {
                Term::Ind(_) => resolve(t),
                _ => assignment.get(t).copied(),
            }
        };
        match atom {
            QueryAtom::Concept(c, t) => val(t).map(|d| interp.concept_ext(c).contains(&d)),
            QueryAtom::Role(r, s, t) => match (val(s), val(t)) {
                (Some(ds), Some(dt)) => {
                    Some(interp.has_role_edge(&Role::plain(r.as_str()), ds, dt))
                }
                _ => None,
            },
        }
    }

    // Resolve individuals once up front so missing names error out.
    let mut ind_ids: BTreeMap<Term, ElemId> = BTreeMap::new();
    for atom in &q.atoms {
        let terms = match atom {
            QueryAtom::Concept(_, t) => vec![t],
            QueryAtom::Role(_, s, t) => vec![s, t],
        };
        for t in terms {
            if let Term::Ind(i) = t {
                ind_ids.insert(t.clone(), resolve_ind(i)?);
            }
        }
    }
    let resolve = |t: &Term| ind_ids.get(t).copied();

    fn recurse(
        interp: &Interpretation,
        q: &Ccq,
        vars: &[Term],
        idx: usize,
        assignment: &mut BTreeMap<Term, ElemId>,
        counting: &[String],
        projections: &mut BTreeSet<Vec<ElemId>>,
        resolve: &impl Fn(&Term) -> Option<ElemId>,
    ) {
        // Prune on any decided-false atom.
        for atom in &q.atoms {
            if atom_holds(interp, atom, assignment, resolve) == Some(false) {
                return;
            }
        }
        if idx == vars.len() {
            let proj: Vec<ElemId> = counting
                .iter()
                .map(|z| assignment[&Term::CountVar(z.clone())])
                .collect();
            projections.insert(proj);
            return;
        }
        for d in interp.elements() {
            assignment.insert(vars[idx].clone(), d);
            recurse(interp, q, vars, idx + 1, assignment, counting, projections, resolve);
        }
        assignment.remove(&vars[idx]);
    }

    recurse(interp, q, &vars, 0, &mut assignment, &counting, &mut projections, &resolve);
    Ok(projections.len() as u64)
}

/// Disjoint union of two models of `kb`. Named individuals resolve into the
/// first copy. For connected individual-free queries the answer count is the
/// sum of the components' counts.
pub fn disjoint_union(
    i1: &Interpretation,
    i2: &Interpretation,
    kb: &Kb,
) -> Result<Interpretation, InterpError> {
    // The second component carries no ABox individuals; it only needs to
    // satisfy the TBox.
    let tbox_only = Kb::new(kb.tbox.clone(), Default::default());
    for (idx, (i, against)) in [(i1, kb), (i2, &tbox_only)].into_iter().enumerate() {
        let violations = check_model(i, against, None)?;
        if !violations.is_empty() {
            return Err(InterpError::NotAModel(format!(
                "component {} violates: {}",
                idx + 1,
                violations[0]
            )));
        }
    }
    let offset = i1.labels.len() as ElemId;
    let mut labels = i1.labels.clone();
    let used: BTreeSet<&String> = i1.labels.iter().collect();
    for l in &i2.labels {
        let mut candidate = l.clone();
        while used.contains(&candidate) || labels.contains(&candidate) {
            candidate.push('\'');
        }
        labels.push(candidate);
    }
    let mut concepts = i1.concepts.clone();
    for (c, ext) in &i2.concepts {
        let shifted: BTreeSet<ElemId> = ext.iter().map(|&e| e + offset).collect();
        concepts.entry(c.clone()).or_default().extend(shifted);
    }
    let mut roles = i1.roles.clone();
    for (r, pairs) in &i2.roles {
        let shifted: BTreeSet<(ElemId, ElemId)> = pairs.iter().map(|&(x, y)| (x + offset, y + offset)).collect();
        roles.entry(r.clone()).or_default().extend(shifted);
    }
    Ok(Interpretation { labels, named: i1.named.clone(), concepts, roles })
}

/// JSON wire format for models, used by the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelJson {
    pub domain: Vec<String>,
    #[serde(default)]
    pub named: BTreeMap<String, String>,
    #[serde(default)]
    pub concepts: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub roles: BTreeMap<String, Vec<(String, String)>>,
}

impl From<&Interpretation> for ModelJson {
    fn from(i: &Interpretation) -> Self {
        let label = |e: ElemId| i.labels[e as usize].clone();
        ModelJson {
            domain: i.labels.clone(),
            named: i.named.iter().map(|(k, &v)| (k.to_string(), label(v))).collect(),
            concepts: i
                .concepts
                .iter()
                .filter(|(_, ext)| !ext.is_empty())
                .map(|(c, ext)| (c.to_string(), ext.iter().map(|&e| label(e)).collect()))
                .collect(),
            roles: i
                .roles
                .iter()
                .filter(|(_, pairs)| !pairs.is_empty())
                .map(|(r, pairs)| {
                    (r.to_string(), pairs.iter().map(|&(x, y)| (label(x), label(y))).collect())
                })
                .collect(),
        }
    }
}

impl TryFrom<&ModelJson> for Interpretation {
    type Error = InterpError;

    fn try_from(m: &ModelJson) -> Result<Self, InterpError> {
        let index: BTreeMap<&String, ElemId> =
            m.domain.iter().enumerate().map(|(i, l)| (l, i as ElemId)).collect();
        if index.len() != m.domain.len() {
            return Err(InterpError::SignatureMismatch("duplicate domain labels".into()));
        }
        let lookup = |l: &String| -> Result<ElemId, InterpError> {
            index
                .get(l)
                .copied()
                .ok_or_else(|| InterpError::SignatureMismatch(format!("unknown element `{l}`")))
        };
        let mut named = BTreeMap::new();
        for (ind, l) in &m.named {
            named.insert(Individual::new(ind), lookup(l)?);
        }
        let mut concepts = BTreeMap::new();
        for (c, ext) in &m.concepts {
            let ids: Result<BTreeSet<ElemId>, _> = ext.iter().map(&lookup).collect();
            concepts.insert(ConceptName::new(c), ids?);
        }
        let mut roles = BTreeMap::new();
        for (r, pairs) in &m.roles {
            let ids: Result<BTreeSet<(ElemId, ElemId)>, _> =
                pairs.iter().map(|(x, y)| Ok((lookup(x)?, lookup(y)?))).collect();
            roles.insert(RoleName::new(r), ids?);
        }
        Ok(Interpretation { labels: m.domain.clone(), named, concepts, roles })
    }
}

/// Convenience constructor: an interpretation holding exactly the ABox of
/// `kb` over its individuals (minimal concept/role extensions).
pub fn abox_interpretation(kb: &Kb) -> Interpretation {
    let individuals: Vec<Individual> = kb.abox.individuals().into_iter().collect();
    let named: BTreeMap<Individual, ElemId> =
        individuals.iter().enumerate().map(|(i, ind)| (ind.clone(), i as ElemId)).collect();
    let mut concepts: BTreeMap<ConceptName, BTreeSet<ElemId>> = BTreeMap::new();
    let mut roles: BTreeMap<RoleName, BTreeSet<(ElemId, ElemId)>> = BTreeMap::new();
    for a in &kb.abox.assertions {
        match a {
            Assertion::Concept(c, x) => {
                concepts.entry(c.clone()).or_default().insert(named[x]);
            }
            Assertion::Role(r, x, y) => {
                roles.entry(r.clone()).or_default().insert((named[x], named[y]));
            }
        }
    }
    Interpretation {
        labels: individuals.iter().map(|i| i.to_string()).collect(),
        named,
        concepts,
        roles,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::parse_kb;

    fn ex3_kb() -> Kb {
        parse_kb(
            "[tbox]\nC <= exists r\nexists r- <= C\ntop <= func r-.top\n[abox]\nr(a,a)\nr(a,b)\n",
        )
        .unwrap()
    }

    #[test]
    fn example3_abox_interpretation_violations() {
        let kb = ex3_kb();
        let mut i = abox_interpretation(&kb);
        i.concepts.insert(ConceptName::new("C"), [0, 1].into());
        let violations = check_model(&i, &kb, None).unwrap();
        // b (element 1) is in C but has no r-successor; everything else holds.
        assert_eq!(violations.len(), 1);
        match &violations[0] {
            Violation::Ci { witness, .. } => assert_eq!(*witness, 1),
            other => panic!("unexpected violation {other}"),
        }
    }

    #[test]
    fn one_element_reflexive_all_true_satisfies_elif() {
        // A universal reflexive point satisfies any ELIF TBox with a
        // one-individual ABox.
        let kb = parse_kb(
            "[tbox]\nC <= exists r.C\nA <= exists s-.B\nA <= func r.B\n[abox]\nC(a)\n",
        )
        .unwrap();
        let mut i = abox_interpretation(&kb);
        for c in ["A", "B", "C"] {
            i.concepts.insert(ConceptName::new(c), [0].into());
        }
        for r in ["r", "s"] {
            i.roles.insert(RoleName::new(r), [(0, 0)].into());
        }
        assert!(check_model(&i, &kb, None).unwrap().is_empty());
    }

    #[test]
    fn empty_tbox_abox_match_is_model() {
        let kb = parse_kb("[tbox]\n[abox]\nC(a)\nr(a,b)\n").unwrap();
        let i = abox_interpretation(&kb);
        assert!(check_model(&i, &kb, None).unwrap().is_empty());
    }

    #[test]
    fn certificate_discharges_existential() {
        let kb = parse_kb("[tbox]\nC <= exists r.C\n[abox]\nC(a)\n").unwrap();
        let i = abox_interpretation(&kb);
        // Without certificate: a lacks its r-successor.
        assert_eq!(check_model(&i, &kb, None).unwrap().len(), 1);
        let cert = FrontierCertificate {
            pending: [(0, Role::plain("r"), [ConceptName::new("C")].into())].into(),
        };
        assert!(check_model(&i, &kb, Some(&cert)).unwrap().is_empty());
    }

    #[test]
    fn counting_concept_and_role() {
        let kb = parse_kb("[tbox]\n[abox]\nC(a)\nC(b)\nr(a,b)\nr(b,a)\nr(a,a)\n").unwrap();
        let i = abox_interpretation(&kb);
        let qc = crate::kb::CardinalityQuery::concept("C").to_ccq();
        assert_eq!(count_answers(&i, &qc).unwrap(), 2);
        let qr = crate::kb::CardinalityQuery::role("r").to_ccq();
        assert_eq!(count_answers(&i, &qr).unwrap(), 3);
    }

    #[test]
    fn counting_squares_example() {
        // Two friends of alice; pairs (z1, z2) count 4.
        let kb = parse_kb("[tbox]\n[abox]\nfriendOf(b,alice)\nfriendOf(c,alice)\n").unwrap();
        let i = abox_interpretation(&kb);
        let q = Ccq::new([
            QueryAtom::Role(RoleName::new("friendOf"), Term::CountVar("z1".into()), Term::Ind(Individual::new("alice"))),
            QueryAtom::Role(RoleName::new("friendOf"), Term::CountVar("z2".into()), Term::Ind(Individual::new("alice"))),
        ]);
        assert_eq!(count_answers(&i, &q).unwrap(), 4);
    }

    #[test]
    fn disjoint_union_adds_counts() {
        let kb = parse_kb("[tbox]\n[abox]\nC(a)\nC(b)\n").unwrap();
        let i1 = abox_interpretation(&kb);
        // Second component: three anonymous C elements.
        let i2 = Interpretation {
            labels: vec!["e0".into(), "e1".into(), "e2".into()],
            named: BTreeMap::new(),
            concepts: [(ConceptName::new("C"), [0, 1, 2].into())].into(),
            roles: BTreeMap::new(),
        };
        let u = disjoint_union(&i1, &i2, &kb).unwrap();
        let q = crate::kb::CardinalityQuery::concept("C").to_ccq();
        assert_eq!(count_answers(&u, &q).unwrap(), 5);
        assert_eq!(u.named.len(), 2);
        assert!(check_model(&u, &kb, None).unwrap().is_empty());
    }

    #[test]
    fn model_json_round_trip() {
        let kb = parse_kb("[tbox]\n[abox]\nC(a)\nr(a,b)\n").unwrap();
        let i = abox_interpretation(&kb);
        let j = ModelJson::from(&i);
        let back = Interpretation::try_from(&j).unwrap();
        assert_eq!(back, i);
    }
}
