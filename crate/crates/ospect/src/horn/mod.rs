//! Reasoning machinery for the Horn fragments (up to ELIF with concept
//! disjointness): saturation-based entailment, realizable types, the
//! generation/dependency type graph, inverse functional paths and cycle
//! reversion, and the rule-based model completion that produces finite
//! witnesses for safe concepts.

mod chase;
mod cycles;
mod ils;
mod types;

pub use chase::{ChaseOutcome, ChaseSeed};
pub use cycles::{Cycle, Ifp};
pub use ils::{duplicate_plus_one, CompletionResult, ModelPair};
pub use types::{HType, TypeGraph};

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};

use crate::kb::{normalize, ABox, Axiom, Concept, ConceptName, Kb, Role, RoleName, TBox};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HornError {
    #[error("TBox is not in Horn normal form: {0:?}")]
    NotNormalForm(Axiom),
    #[error("TBox is unsatisfiable (no realizable type)")]
    UnsatisfiableTBox,
    #[error("knowledge base is unsatisfiable")]
    UnsatisfiableKb,
    #[error("no model with a finite nonzero extension exists")]
    NoFiniteExtension,
    #[error("role is functional or inverse functional; use the concept reduction")]
    FunctionalRole,
    #[error("the class order is not a strict partial order (engine bug)")]
    PartialOrderViolation,
    #[error("work budget exceeded")]
    BudgetExceeded,
    #[error("{0}")]
    Internal(String),
}

/// Bitmask over the engine's concept-name universe.
pub type Mask = u128;

/// The concept names the engine reasons over, in sorted order; a mask bit `i`
/// stands for `names[i]`. At most 128 names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Universe {
    names: Vec<ConceptName>,
}

impl Universe {
    pub fn new(names: impl IntoIterator<Item = ConceptName>) -> Result<Self, HornError> {
        let names: BTreeSet<ConceptName> = names.into_iter().collect();
        if names.len() > 128 {
            return Err(HornError::Internal(format!(
                "too many concept names for the Horn engine: {}",
                names.len()
            )));
        }
        Ok(Universe { names: names.into_iter().collect() })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[ConceptName] {
        &self.names
    }

    pub fn bit(&self, name: &ConceptName) -> Option<u32> {
        self.names.binary_search(name).ok().map(|i| i as u32)
    }

    pub fn mask_of<'a>(&self, names: impl IntoIterator<Item = &'a ConceptName>) -> Option<Mask> {
        let mut m: Mask = 0;
        for n in names {
            m |= 1u128 << self.bit(n)?;
        }
        Some(m)
    }

    pub fn set_of(&self, mask: Mask) -> BTreeSet<ConceptName> {
        self.names
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1u128 << i) != 0)
            .map(|(_, n)| n.clone())
            .collect()
    }

    pub fn concept_of(&self, mask: Mask) -> Concept {
        Concept::conjunction_of(self.set_of(mask))
    }
}

/// A Horn-normal axiom, indexed against a universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormAxiom {
    /// K <= A
    Sub { lhs: Mask, rhs: u32 },
    /// K <= bot
    SubBot { lhs: Mask },
    /// K <= exists r.K'
    Ex { lhs: Mask, role: Role, filler: Mask },
    /// exists r.K <= K'
    InvEx { role: Role, filler: Mask, rhs: Mask },
    /// K <= func r.K'
    Funct { guard: Mask, role: Role, filler: Mask },
}

/// A normalized Horn TBox with its universe, plus memoized reasoning state.
pub struct HornEngine {
    pub universe: Universe,
    pub tbox: TBox,
    axioms: Vec<NormAxiom>,
    roles: Vec<Role>,
    node_probe_cache: RefCell<BTreeMap<Mask, Option<Mask>>>,
    exists_cache: RefCell<BTreeMap<(Mask, Role, Mask), bool>>,
    funct_cache: RefCell<BTreeMap<(Mask, Role, Mask), bool>>,
    types_cache: RefCell<Option<Vec<Mask>>>,
}

impl HornEngine {
    /// Build an engine from a TBox already in Horn normal form. Extra names
    /// (for instance the query concept) can be forced into the universe.
    pub fn new(tbox: &TBox, extra_names: &[ConceptName]) -> Result<Self, HornError> {
        let mut names = tbox.concept_names();
        names.extend(extra_names.iter().cloned());
        let universe = Universe::new(names)?;

        let mut axioms = Vec::new();
        for ax in &tbox.axioms {
            if let Some(indexed) = index_axiom(ax, &universe)? {
                axioms.push(indexed);
            }
        }
        let mut roles: BTreeSet<Role> = BTreeSet::new();
        for r in tbox.role_names() {
            roles.insert(Role::plain(r.as_str()));
            roles.insert(Role::inverse_of(r.as_str()));
        }
        Ok(HornEngine {
            universe,
            tbox: tbox.clone(),
            axioms,
            roles: roles.into_iter().collect(),
            node_probe_cache: RefCell::new(BTreeMap::new()),
            exists_cache: RefCell::new(BTreeMap::new()),
            funct_cache: RefCell::new(BTreeMap::new()),
            types_cache: RefCell::new(None),
        })
    }

    /// Normalize an arbitrary Horn TBox first, then build the engine.
    pub fn from_kb(kb: &Kb, extra_names: &[ConceptName]) -> Result<Self, HornError> {
        let out = normalize(&kb.tbox);
        let mut extras: Vec<ConceptName> = extra_names.to_vec();
        extras.extend(kb.abox.concept_names());
        HornEngine::new(&out.tbox, &extras)
    }

    pub fn axioms(&self) -> &[NormAxiom] {
        &self.axioms
    }

    /// All roles (both orientations) occurring in the TBox.
    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn role_names(&self) -> BTreeSet<RoleName> {
        self.roles.iter().map(|r| r.name.clone()).collect()
    }

    /// Saturated label of a single seeded element, or `None` when the seed is
    /// inconsistent with the TBox.
    pub fn saturate_node(&self, seed: Mask) -> Option<Mask> {
        if let Some(hit) = self.node_probe_cache.borrow().get(&seed) {
            return *hit;
        }
        let outcome = chase::chase(self, &ChaseSeed::single_anonymous(seed), chase::DEFAULT_NODE_BUDGET)
            .expect("single-node probe exceeded the chase budget");
        let result = match outcome {
            ChaseOutcome::Sat(model) => Some(model.node_label(model.seed_nodes()[0])),
            ChaseOutcome::Unsat => None,
        };
        self.node_probe_cache.borrow_mut().insert(seed, result);
        result
    }

    /// `T |= K1 <= K2` by the canonical-model criterion.
    pub fn entails_subsumption(&self, k1: Mask, k2: Mask) -> bool {
        match self.saturate_node(k1) {
            None => true,
            Some(label) => k2 & !label == 0,
        }
    }

    /// `T |= K <= exists role.K2`.
    pub fn entails_exists(&self, k: Mask, role: &Role, k2: Mask) -> bool {
        let key = (k, role.clone(), k2);
        if let Some(hit) = self.exists_cache.borrow().get(&key) {
            return *hit;
        }
        let outcome = chase::chase(self, &ChaseSeed::single_anonymous(k), chase::DEFAULT_NODE_BUDGET)
            .expect("single-node probe exceeded the chase budget");
        let result = match outcome {
            ChaseOutcome::Sat(model) => {
                let root = model.seed_nodes()[0];
                model.successors(root, role).into_iter().any(|n| k2 & !model.node_label(n) == 0)
            }
            ChaseOutcome::Unsat => true,
        };
        self.exists_cache.borrow_mut().insert(key, result);
        result
    }

    /// `T |= guard <= func role.filler`, decided by unsatisfiability of the
    /// two-successor probe: a guard element with two distinct named
    /// role-successors both in the filler. Standard names make the two fresh
    /// individuals distinct.
    pub fn entails_functionality(&self, guard: Mask, role: &Role, filler: Mask) -> bool {
        let key = (guard, role.clone(), filler);
        if let Some(hit) = self.funct_cache.borrow().get(&key) {
            return *hit;
        }
        let seed = ChaseSeed::functionality_probe(guard, role, filler);
        let outcome = chase::chase(self, &seed, chase::DEFAULT_NODE_BUDGET)
            .expect("functionality probe exceeded the chase budget");
        let result = matches!(outcome, ChaseOutcome::Unsat);
        self.funct_cache.borrow_mut().insert(key, result);
        result
    }

    /// Satisfiability of `(T, A)`.
    pub fn is_satisfiable(&self, abox: &ABox) -> Result<bool, HornError> {
        let seed = ChaseSeed::from_abox(self, abox)?;
        match chase::chase(self, &seed, chase::DEFAULT_NODE_BUDGET)? {
            ChaseOutcome::Sat(_) => Ok(true),
            ChaseOutcome::Unsat => Ok(false),
        }
    }

    /// Certain concept memberships of the named individuals of `(T, A)`, or
    /// `None` if unsatisfiable.
    pub fn certain_types(&self, abox: &ABox) -> Result<Option<BTreeMap<crate::kb::Individual, Mask>>, HornError> {
        let seed = ChaseSeed::from_abox(self, abox)?;
        match chase::chase(self, &seed, chase::DEFAULT_NODE_BUDGET)? {
            ChaseOutcome::Unsat => Ok(None),
            ChaseOutcome::Sat(model) => Ok(Some(model.named_labels())),
        }
    }

    /// The realizable types of the TBox (memoized).
    pub fn types(&self) -> Result<Vec<Mask>, HornError> {
        if let Some(t) = self.types_cache.borrow().as_ref() {
            return Ok(t.clone());
        }
        let t = types::compute_types(self)?;
        *self.types_cache.borrow_mut() = Some(t.clone());
        Ok(t)
    }
}

fn index_axiom(ax: &Axiom, universe: &Universe) -> Result<Option<NormAxiom>, HornError> {
    let conj = |c: &Concept| -> Result<Mask, HornError> {
        c.as_name_conjunction()
            .and_then(|names| universe.mask_of(names.iter()))
            .ok_or_else(|| HornError::NotNormalForm(ax.clone()))
    };
    match ax {
        Axiom::Funct { guard, role, filler } => Ok(Some(NormAxiom::Funct {
            guard: conj(guard)?,
            role: role.clone(),
            filler: conj(filler)?,
        })),
        Axiom::Ci { lhs, rhs } => {
            if let Some(lhs_mask) = lhs.as_name_conjunction().and_then(|n| universe.mask_of(n.iter())) {
                if rhs.is_bot() {
                    return Ok(Some(NormAxiom::SubBot { lhs: lhs_mask }));
                }
                match rhs {
                    Concept::Name(n) => {
                        let bit = universe
                            .bit(n)
                            .ok_or_else(|| HornError::NotNormalForm(ax.clone()))?;
                        return Ok(Some(NormAxiom::Sub { lhs: lhs_mask, rhs: bit }));
                    }
                    Concept::Exists(role, filler) => {
                        return Ok(Some(NormAxiom::Ex {
                            lhs: lhs_mask,
                            role: role.clone(),
                            filler: conj(filler)?,
                        }));
                    }
                    // K <= top is trivially true.
                    Concept::Top => return Ok(None),
                    _ => return Err(HornError::NotNormalForm(ax.clone())),
                }
            }
            if let Concept::Exists(role, filler) = lhs {
                let filler_mask = conj(filler)?;
                let rhs_mask = conj(rhs)?;
                return Ok(Some(NormAxiom::InvEx {
                    role: role.clone(),
                    filler: filler_mask,
                    rhs: rhs_mask,
                }));
            }
            Err(HornError::NotNormalForm(ax.clone()))
        }
    }
}
