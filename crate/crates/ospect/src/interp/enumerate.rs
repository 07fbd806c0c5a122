//! Bounded brute-force model search over small domains.
//!
//! The search assigns truth values to concept-membership and role-edge bits
//! in a fixed lexicographic order (role adjacency matrices in the outer
//! positions, concept bitmasks innermost) and evaluates axioms under Kleene
//! three-valued semantics to prune definite violations early. When every
//! axiom is definitely satisfied the remaining unknown bits can be completed
//! arbitrarily, which gives witness searches an early exit; full enumeration
//! visits every leaf.

use std::collections::{BTreeMap, BTreeSet};

use crate::kb::{
    Assertion, Axiom, CardinalityQuery, Concept, ConceptName, Individual, Kb, Role, RoleName,
};

use super::{check_model, count_answers, ElemId, InterpError, Interpretation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_nodes: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_nodes: 1_000_000 }
    }
}

#[derive(Debug, Clone, Default)]
pub struct EnumerateOpts {
    pub max_domain: usize,
    pub budget: Option<SearchBudget>,
    /// Names outside the KB signature that the models must interpret
    /// (typically the query predicate).
    pub extra_concepts: Vec<ConceptName>,
    pub extra_roles: Vec<RoleName>,
}

impl EnumerateOpts {
    pub fn with_max_domain(max_domain: usize) -> Self {
        EnumerateOpts { max_domain, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tri {
    False,
    Unknown,
    True,
}

impl Tri {
    fn not(self) -> Tri {
        match self {
            Tri::False => Tri::True,
            Tri::Unknown => Tri::Unknown,
            Tri::True => Tri::False,
        }
    }
}

struct Space {
    n: usize,
    concepts: Vec<ConceptName>,
    roles: Vec<RoleName>,
    named: BTreeMap<Individual, ElemId>,
    axioms: Vec<Axiom>,
    role_var_count: usize,
    var_count: usize,
}

impl Space {
    fn role_bit(&self, role_idx: usize, src: usize, dst: usize) -> usize {
        role_idx * self.n * self.n + src * self.n + dst
    }

    fn concept_bit(&self, concept_idx: usize, elem: usize) -> usize {
        self.role_var_count + concept_idx * self.n + elem
    }

    fn concept_index(&self, name: &ConceptName) -> Option<usize> {
        self.concepts.iter().position(|c| c == name)
    }

    fn role_index(&self, name: &RoleName) -> Option<usize> {
        self.roles.iter().position(|r| r == name)
    }
}

struct State<'a> {
    space: &'a Space,
    bits: Vec<Tri>,
    fixed: Vec<bool>,
}

impl<'a> State<'a> {
    fn role_edge(&self, role: &Role, src: usize, dst: usize) -> Tri {
        let Some(idx) = self.space.role_index(&role.name) else {
            return Tri::False;
        };
        let (s, d) = if role.inverted { (dst, src) } else { (src, dst) };
        self.bits[self.space.role_bit(idx, s, d)]
    }

    fn concept_member(&self, name: &ConceptName, elem: usize) -> Tri {
        match self.space.concept_index(name) {
            Some(idx) => self.bits[self.space.concept_bit(idx, elem)],
            None => Tri::False,
        }
    }

    fn eval(&self, c: &Concept, elem: usize) -> Tri {
        match c {
            Concept::Top => Tri::True,
            Concept::Name(n) => self.concept_member(n, elem),
            Concept::Not(inner) => self.eval(inner, elem).not(),
            Concept::And(parts) => {
                let mut acc = Tri::True;
                for p in parts {
                    match self.eval(p, elem) {
                        Tri::False => return Tri::False,
                        Tri::Unknown => acc = Tri::Unknown,
                        Tri::True => {}
                    }
                }
                acc
            }
            Concept::Exists(role, filler) => {
                let mut acc = Tri::False;
                for e in 0..self.space.n {
                    let edge = self.role_edge(role, elem, e);
                    if edge == Tri::False {
                        continue;
                    }
                    match (edge, self.eval(filler, e)) {
                        (Tri::True, Tri::True) => return Tri::True,
                        (_, Tri::False) => {}
                        _ => acc = Tri::Unknown,
                    }
                }
                acc
            }
        }
    }

    /// (definitely violated, definitely satisfied).
    fn axiom_status(&self, ax: &Axiom) -> (bool, bool) {
        match ax {
            Axiom::Ci { lhs, rhs } => {
                let mut all_true = true;
                for d in 0..self.space.n {
                    match (self.eval(lhs, d), self.eval(rhs, d)) {
                        (Tri::True, Tri::False) => return (true, false),
                        (Tri::False, _) | (_, Tri::True) => {}
                        _ => all_true = false,
                    }
                }
                (false, all_true)
            }
            Axiom::Funct { guard, role, filler } => {
                let mut all_true = true;
                for d in 0..self.space.n {
                    let g = self.eval(guard, d);
                    if g == Tri::False {
                        continue;
                    }
                    let mut definite = 0usize;
                    let mut possible = 0usize;
                    for e in 0..self.space.n {
                        let edge = self.role_edge(role, d, e);
                        if edge == Tri::False {
                            continue;
                        }
                        match (edge, self.eval(filler, e)) {
                            (_, Tri::False) => {}
                            (Tri::True, Tri::True) => {
                                definite += 1;
                                possible += 1;
                            }
                            _ => possible += 1,
                        }
                    }
                    if g == Tri::True && definite > 1 {
                        return (true, false);
                    }
                    if possible > 1 {
                        all_true = false;
                    }
                }
                (false, all_true)
            }
        }
    }

    /// (any axiom violated, all axioms definitely satisfied).
    fn overall(&self, axioms: &[Axiom]) -> (bool, bool) {
        let mut all = true;
        for ax in axioms {
            let (violated, satisfied) = self.axiom_status(ax);
            if violated {
                return (true, false);
            }
            all &= satisfied;
        }
        (false, all)
    }

    fn to_interpretation(&self) -> Interpretation {
        let space = self.space;
        let mut labels: Vec<String> = vec![String::new(); space.n];
        for (ind, &id) in &space.named {
            labels[id as usize] = ind.to_string();
        }
        let taken: BTreeSet<String> = labels.iter().cloned().collect();
        for (i, l) in labels.iter_mut().enumerate() {
            if l.is_empty() {
                let mut cand = format!("d{i}");
                while taken.contains(&cand) {
                    cand.push('x');
                }
                *l = cand;
            }
        }
        let mut concepts = BTreeMap::new();
        for (ci, c) in space.concepts.iter().enumerate() {
            let ext: BTreeSet<ElemId> = (0..space.n)
                .filter(|&e| self.bits[space.concept_bit(ci, e)] == Tri::True)
                .map(|e| e as ElemId)
                .collect();
            if !ext.is_empty() {
                concepts.insert(c.clone(), ext);
            }
        }
        let mut roles = BTreeMap::new();
        for (ri, r) in space.roles.iter().enumerate() {
            let mut pairs = BTreeSet::new();
            for s in 0..space.n {
                for d in 0..space.n {
                    if self.bits[space.role_bit(ri, s, d)] == Tri::True {
                        pairs.insert((s as ElemId, d as ElemId));
                    }
                }
            }
            if !pairs.is_empty() {
                roles.insert(r.clone(), pairs);
            }
        }
        Interpretation { labels, named: space.named.clone(), concepts, roles }
    }
}

/// Which bits a count target ranges over.
#[derive(Debug, Clone, Copy)]
enum CountKind {
    Concept(usize),
    Role(usize),
}

struct CountTarget {
    kind: CountKind,
    n: u64,
}

impl CountTarget {
    fn bit_range(&self, space: &Space) -> std::ops::Range<usize> {
        match self.kind {
            CountKind::Concept(ci) => {
                let start = space.concept_bit(ci, 0);
                start..start + space.n
            }
            CountKind::Role(ri) => {
                let start = space.role_bit(ri, 0, 0);
                start..start + space.n * space.n
            }
        }
    }

    /// (definitely true, unknown) counts.
    fn tally(&self, state: &State) -> (u64, u64) {
        let mut t = 0;
        let mut u = 0;
        for i in self.bit_range(state.space) {
            match state.bits[i] {
                Tri::True => t += 1,
                Tri::Unknown => u += 1,
                Tri::False => {}
            }
        }
        (t, u)
    }
}

fn build_space(kb: &Kb, n: usize, opts: &EnumerateOpts) -> Space {
    let mut concepts: BTreeSet<ConceptName> = kb.concept_names();
    concepts.extend(opts.extra_concepts.iter().cloned());
    let mut roles: BTreeSet<RoleName> = kb.role_names();
    roles.extend(opts.extra_roles.iter().cloned());
    let concepts: Vec<ConceptName> = concepts.into_iter().collect();
    let roles: Vec<RoleName> = roles.into_iter().collect();
    let named: BTreeMap<Individual, ElemId> = kb
        .abox
        .individuals()
        .into_iter()
        .enumerate()
        .map(|(i, ind)| (ind, i as ElemId))
        .collect();
    let role_var_count = roles.len() * n * n;
    let var_count = role_var_count + concepts.len() * n;
    Space {
        n,
        concepts,
        roles,
        named,
        axioms: kb.tbox.axioms.iter().cloned().collect(),
        role_var_count,
        var_count,
    }
}

fn init_state<'a>(space: &'a Space, kb: &Kb) -> State<'a> {
    let mut st = State {
        space,
        bits: vec![Tri::Unknown; space.var_count],
        fixed: vec![false; space.var_count],
    };
    for a in &kb.abox.assertions {
        match a {
            Assertion::Concept(c, x) => {
                let ci = space.concept_index(c).expect("signature covers ABox");
                let bit = space.concept_bit(ci, space.named[x] as usize);
                st.bits[bit] = Tri::True;
                st.fixed[bit] = true;
            }
            Assertion::Role(r, x, y) => {
                let ri = space.role_index(r).expect("signature covers ABox");
                let bit = space.role_bit(ri, space.named[x] as usize, space.named[y] as usize);
                st.bits[bit] = Tri::True;
                st.fixed[bit] = true;
            }
        }
    }
    st
}

enum SearchMode {
    /// Visit every completed model.
    Enumerate,
    /// Stop at the first model (subject to the optional count target).
    FindOne(Option<CountTarget>),
}

struct Driver<'a> {
    state: State<'a>,
    mode: SearchMode,
    nodes: u64,
    max_nodes: u64,
}

enum DriveOutcome {
    Exhausted,
    Found(Interpretation),
    Stopped,
}

impl<'a> Driver<'a> {
    fn run(
        &mut self,
        on_model: &mut dyn FnMut(Interpretation) -> bool,
    ) -> Result<DriveOutcome, InterpError> {
        self.recurse(0, on_model)
    }

    fn recurse(
        &mut self,
        var: usize,
        on_model: &mut dyn FnMut(Interpretation) -> bool,
    ) -> Result<DriveOutcome, InterpError> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(InterpError::BudgetExceeded);
        }
        let (violated, all_true) = self.state.overall(&self.state.space.axioms);
        if violated {
            return Ok(DriveOutcome::Exhausted);
        }
        if let SearchMode::FindOne(target) = &self.mode {
            if let Some(t) = target {
                let (definite, unknown) = t.tally(&self.state);
                if definite > t.n || definite + unknown < t.n {
                    return Ok(DriveOutcome::Exhausted);
                }
                if all_true {
                    // Complete: raise the counted predicate to the target,
                    // everything else to false. Definitely-satisfied axioms
                    // stay satisfied under any completion.
                    let mut need = t.n - definite;
                    let range = t.bit_range(self.state.space);
                    for i in range {
                        if self.state.bits[i] == Tri::Unknown && need > 0 {
                            self.state.bits[i] = Tri::True;
                            need -= 1;
                        }
                    }
                    let snapshot: Vec<Tri> = self.state.bits.clone();
                    for b in self.state.bits.iter_mut() {
                        if *b == Tri::Unknown {
                            *b = Tri::False;
                        }
                    }
                    let interp = self.state.to_interpretation();
                    self.state.bits = snapshot;
                    return Ok(DriveOutcome::Found(interp));
                }
            } else if all_true {
                let snapshot: Vec<Tri> = self.state.bits.clone();
                for b in self.state.bits.iter_mut() {
                    if *b == Tri::Unknown {
                        *b = Tri::False;
                    }
                }
                let interp = self.state.to_interpretation();
                self.state.bits = snapshot;
                return Ok(DriveOutcome::Found(interp));
            }
        }
        // Advance past fixed/assigned variables.
        let mut var = var;
        while var < self.state.space.var_count && self.state.bits[var] != Tri::Unknown {
            var += 1;
        }
        if var == self.state.space.var_count {
            // Leaf: fully assigned, nothing violated.
            match &self.mode {
                SearchMode::Enumerate => {
                    if all_true {
                        if !on_model(self.state.to_interpretation()) {
                            return Ok(DriveOutcome::Stopped);
                        }
                    }
                    return Ok(DriveOutcome::Exhausted);
                }
                SearchMode::FindOne(target) => {
                    let count_ok = match target {
                        Some(t) => t.tally(&self.state).0 == t.n,
                        None => true,
                    };
                    if all_true && count_ok {
                        return Ok(DriveOutcome::Found(self.state.to_interpretation()));
                    }
                    return Ok(DriveOutcome::Exhausted);
                }
            }
        }
        for value in [Tri::False, Tri::True] {
            self.state.bits[var] = value;
            match self.recurse(var + 1, on_model)? {
                DriveOutcome::Exhausted => {}
                other => {
                    self.state.bits[var] = Tri::Unknown;
                    return Ok(other);
                }
            }
        }
        self.state.bits[var] = Tri::Unknown;
        Ok(DriveOutcome::Exhausted)
    }
}

fn domain_sizes(kb: &Kb, max_domain: usize) -> Vec<usize> {
    let named = kb.abox.individuals().len();
    let lo = named.max(1);
    if max_domain < lo {
        return Vec::new();
    }
    (lo..=max_domain).collect()
}

/// All models of `kb` with domain size at most `max_domain` (and containing
/// the ABox individuals as named elements), in the deterministic search
/// order. Duplicate structures may appear under different element labelings;
/// no isomorphism reduction is performed.
pub fn enumerate_models(kb: &Kb, opts: &EnumerateOpts) -> Result<Vec<Interpretation>, InterpError> {
    let mut out = Vec::new();
    for_each_model(kb, opts, |m| {
        out.push(m);
        true
    })?;
    Ok(out)
}

/// Streaming version of [`enumerate_models`]; the callback returns `false`
/// to stop early.
pub fn for_each_model(
    kb: &Kb,
    opts: &EnumerateOpts,
    mut f: impl FnMut(Interpretation) -> bool,
) -> Result<(), InterpError> {
    let budget = opts.budget.unwrap_or_default();
    let mut nodes_used = 0;
    for n in domain_sizes(kb, opts.max_domain) {
        let space = build_space(kb, n, opts);
        let state = init_state(&space, kb);
        let mut driver = Driver {
            state,
            mode: SearchMode::Enumerate,
            nodes: nodes_used,
            max_nodes: budget.max_nodes,
        };
        match driver.run(&mut f)? {
            DriveOutcome::Stopped => return Ok(()),
            _ => {}
        }
        nodes_used = driver.nodes;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleOutcome {
    /// A model with exactly the requested count, re-checked and re-counted.
    FoundWitness(Interpretation),
    /// No witness within the domain bound; NOT a semantic "no".
    NoWitnessWithinBound,
}

/// Yes-side oracle: search for a model of `kb` with exactly `n` answers to
/// the atomic query `q`, over domains of size at most `max_domain`.
pub fn oracle_membership(
    kb: &Kb,
    q: &CardinalityQuery,
    n: u64,
    max_domain: usize,
    budget: Option<SearchBudget>,
) -> Result<OracleOutcome, InterpError> {
    let mut opts = EnumerateOpts { max_domain, budget, ..Default::default() };
    match q {
        CardinalityQuery::ConceptCard(c) => opts.extra_concepts.push(c.clone()),
        CardinalityQuery::RoleCard(r) => opts.extra_roles.push(r.clone()),
    }
    let budget = opts.budget.unwrap_or_default();
    let mut nodes_used = 0;
    for size in domain_sizes(kb, max_domain) {
        let space = build_space(kb, size, &opts);
        let target = match q {
            CardinalityQuery::ConceptCard(c) => CountTarget {
                kind: CountKind::Concept(space.concept_index(c).expect("query concept in signature")),
                n,
            },
            CardinalityQuery::RoleCard(r) => CountTarget {
                kind: CountKind::Role(space.role_index(r).expect("query role in signature")),
                n,
            },
        };
        let state = init_state(&space, kb);
        let mut driver = Driver {
            state,
            mode: SearchMode::FindOne(Some(target)),
            nodes: nodes_used,
            max_nodes: budget.max_nodes,
        };
        let mut sink = |_: Interpretation| true;
        if let DriveOutcome::Found(interp) = driver.run(&mut sink)? {
            // Defense in depth: a found witness must re-check and re-count.
            let violations = check_model(&interp, kb, None)?;
            debug_assert!(violations.is_empty(), "witness fails model check: {violations:?}");
            let recount = count_answers(&interp, &q.to_ccq())?;
            debug_assert_eq!(recount, n, "witness count mismatch");
            if violations.is_empty() && recount == n {
                return Ok(OracleOutcome::FoundWitness(interp));
            }
        }
        nodes_used = driver.nodes;
    }
    Ok(OracleOutcome::NoWitnessWithinBound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::parse_kb;

    #[test]
    fn single_forced_model() {
        // One concept, no roles, top <= C: exactly one model per domain size.
        let kb = parse_kb("[tbox]\ntop <= C\n[abox]\n").unwrap();
        let models = enumerate_models(&kb, &EnumerateOpts::with_max_domain(1)).unwrap();
        assert_eq!(models.len(), 1);
        assert_eq!(models[0].concept_ext(&ConceptName::new("C")).len(), 1);
    }

    #[test]
    fn enumerated_models_all_check() {
        let kb = parse_kb("[tbox]\nA <= exists r.B\n[abox]\nA(a)\n").unwrap();
        let models = enumerate_models(&kb, &EnumerateOpts::with_max_domain(2)).unwrap();
        assert!(!models.is_empty());
        for m in &models {
            assert!(check_model(&m, &kb, None).unwrap().is_empty());
        }
    }

    #[test]
    fn oracle_trivial_empty_kb() {
        let kb = parse_kb("[tbox]\n[abox]\n").unwrap();
        let q = CardinalityQuery::concept("C");
        match oracle_membership(&kb, &q, 3, 3, None).unwrap() {
            OracleOutcome::FoundWitness(m) => {
                assert_eq!(count_answers(&m, &q.to_ccq()).unwrap(), 3);
            }
            other => panic!("expected witness, got {other:?}"),
        }
    }

    #[test]
    fn oracle_role_count() {
        let kb = parse_kb("[tbox]\n[abox]\n").unwrap();
        let q = CardinalityQuery::role("r");
        match oracle_membership(&kb, &q, 2, 2, None).unwrap() {
            OracleOutcome::FoundWitness(m) => {
                assert_eq!(count_answers(&m, &q.to_ccq()).unwrap(), 2);
            }
            other => panic!("expected witness, got {other:?}"),
        }
    }

    #[test]
    fn even_cycle_tbox_has_no_odd_models() {
        // The period-two TBox: every model has even domain size, and
        // |C| = |domain|.
        let text = "[tbox]\n\
                    top <= C\n\
                    A <= exists r.(not A)\n\
                    not A <= exists r.A\n\
                    top <= func r.top\n\
                    top <= func r-.top\n\
                    [abox]\n";
        let kb = parse_kb(text).unwrap();
        let q = CardinalityQuery::concept("C");
        for n in 0..=3u64 {
            let found = matches!(
                oracle_membership(&kb, &q, n, 3, None).unwrap(),
                OracleOutcome::FoundWitness(_)
            );
            assert_eq!(found, n != 0 && n % 2 == 0, "n = {n}");
        }
        // Exhaustive scan: no model with odd C-count at domain <= 3.
        let models = enumerate_models(&kb, &EnumerateOpts::with_max_domain(3)).unwrap();
        assert!(!models.is_empty());
        for m in &models {
            assert_eq!(m.concept_ext(&ConceptName::new("C")).len() % 2, 0);
        }
    }
}
