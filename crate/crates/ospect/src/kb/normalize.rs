//! TBox normal forms.
//!
//! Horn-family TBoxes are rewritten into the four shapes
//! `K <= A`, `K <= exists r.K'`, `exists r.K <= K'` and `K <= func r.K'`
//! over conjunctions of concept names. ALC-family TBoxes go to clausal form:
//! `⊓names <= ⊔names`, `A <= exists r.B`, `exists r.A <= B` and
//! functionality over names.
//!
//! Fresh names live in the reserved `_nf_` namespace and are introduced
//! definitionally (both inclusion directions), so every model of the input
//! extends in exactly one way to the fresh names and restricting back is the
//! inverse. Spectra of queries over original names are therefore preserved.

use std::collections::{BTreeMap, BTreeSet};

use super::{Axiom, Concept, ConceptName, Role, TBox, NF_PREFIX};

/// Which normal form was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalForm {
    Horn,
    Clausal,
}

#[derive(Debug, Clone)]
pub struct NormalizeOutcome {
    pub tbox: TBox,
    pub form: NormalForm,
    pub fresh_names: BTreeSet<ConceptName>,
}

struct FreshNames {
    counter: usize,
    defs: BTreeMap<Concept, ConceptName>,
    created: BTreeSet<ConceptName>,
}

impl FreshNames {
    fn new(tbox: &TBox) -> Self {
        // Avoid collisions with fresh names from earlier normalization runs.
        let counter = tbox
            .concept_names()
            .iter()
            .filter_map(|n| n.as_str().strip_prefix(NF_PREFIX)?.parse::<usize>().ok())
            .map(|k| k + 1)
            .max()
            .unwrap_or(0);
        FreshNames { counter, defs: BTreeMap::new(), created: BTreeSet::new() }
    }

    fn for_concept(&mut self, key: &Concept) -> (ConceptName, bool) {
        if let Some(n) = self.defs.get(key) {
            return (n.clone(), false);
        }
        let name = ConceptName::new(format!("{NF_PREFIX}{}", self.counter));
        self.counter += 1;
        self.defs.insert(key.clone(), name.clone());
        self.created.insert(name.clone());
        (name, true)
    }
}

// ---------------------------------------------------------------------------
// Horn normal form
// ---------------------------------------------------------------------------

fn is_name_conjunction(c: &Concept) -> bool {
    c.as_name_conjunction().is_some()
}

/// Recognizes the four Horn shapes (liberal on conjunction right-hand sides
/// of role propagation; strict emission below always splits).
pub(crate) fn is_horn_normal_axiom(ax: &Axiom) -> bool {
    match ax {
        Axiom::Funct { guard, filler, .. } => is_name_conjunction(guard) && is_name_conjunction(filler),
        Axiom::Ci { lhs, rhs } => {
            let lhs_conj = is_name_conjunction(lhs);
            let lhs_exists = matches!(lhs, Concept::Exists(_, f) if is_name_conjunction(f));
            let rhs_name = matches!(rhs, Concept::Name(_)) || rhs.is_bot() || *rhs == Concept::Top;
            let rhs_exists = matches!(rhs, Concept::Exists(_, f) if is_name_conjunction(f));
            (lhs_conj && (rhs_name || rhs_exists)) || (lhs_exists && (rhs_name || is_name_conjunction(rhs)))
        }
    }
}

pub(crate) fn tbox_is_horn_normal(tbox: &TBox) -> bool {
    tbox.axioms.iter().all(is_horn_normal_axiom)
}

/// Positive existential concepts only (after universal unfolding).
fn horn_expressible(c: &Concept) -> bool {
    match c {
        Concept::Top | Concept::Name(_) => true,
        Concept::And(parts) => parts.iter().all(horn_expressible),
        Concept::Exists(_, f) => horn_expressible(f),
        Concept::Not(inner) => **inner == Concept::Top,
    }
}

struct HornCtx {
    fresh: FreshNames,
    out: TBox,
}

impl HornCtx {
    /// Reduce an EL concept to an equivalent conjunction of names, emitting
    /// definitional axioms for each existential subconcept.
    fn nameify(&mut self, c: &Concept) -> BTreeSet<ConceptName> {
        match c {
            Concept::Top => BTreeSet::new(),
            Concept::Name(n) => [n.clone()].into(),
            Concept::And(parts) => {
                let mut out = BTreeSet::new();
                for p in parts {
                    out.extend(self.nameify(p));
                }
                out
            }
            Concept::Exists(role, filler) => {
                let filler_names = self.nameify(filler);
                let key = Concept::exists(role.clone(), Concept::conjunction_of(filler_names.iter().cloned()));
                let (name, new) = self.fresh.for_concept(&key);
                if new {
                    let filler_conj = Concept::conjunction_of(filler_names.iter().cloned());
                    self.out.insert(Axiom::ci(
                        Concept::Name(name.clone()),
                        Concept::exists(role.clone(), filler_conj.clone()),
                    ));
                    self.out.insert(Axiom::ci(
                        Concept::exists(role.clone(), filler_conj),
                        Concept::Name(name.clone()),
                    ));
                }
                [name].into()
            }
            Concept::Not(_) => unreachable!("nameify is only called on EL concepts"),
        }
    }

    fn emit_ci(&mut self, lhs: &Concept, rhs: &Concept) {
        // Universal right-hand sides: C <= forall r.D  ~>  exists r-.C <= D.
        if let Some((role, filler)) = rhs.as_forall() {
            let flipped = Concept::exists(role.inverse(), lhs.clone());
            self.emit_ci(&flipped, &filler);
            return;
        }
        if let Concept::And(parts) = rhs {
            for p in parts.clone() {
                self.emit_ci(lhs, &p);
            }
            return;
        }
        if *rhs == Concept::Top {
            return;
        }

        // Left side: a conjunction of names, or a single existential over one.
        let lhs_out: Concept = match lhs {
            Concept::Exists(role, filler) if is_name_conjunction(filler) => {
                Concept::exists(role.clone(), (**filler).clone())
            }
            Concept::Exists(role, filler) => {
                let inner = self.nameify(filler);
                Concept::exists(role.clone(), Concept::conjunction_of(inner))
            }
            other => Concept::conjunction_of(self.nameify(other)),
        };

        match rhs {
            Concept::Name(_) => {
                self.out.insert(Axiom::ci(lhs_out, rhs.clone()));
            }
            c if c.is_bot() => {
                self.out.insert(Axiom::ci(lhs_out, Concept::bot()));
            }
            Concept::Exists(role, filler) => {
                // Right-hand existentials keep their shape; the left side
                // must be a plain conjunction for this shape, so an
                // existential left side gets named first.
                let lhs_conj = match &lhs_out {
                    Concept::Exists(..) => {
                        let names = self.nameify(&lhs_out);
                        Concept::conjunction_of(names)
                    }
                    other => other.clone(),
                };
                let filler_conj = if is_name_conjunction(filler) {
                    (**filler).clone()
                } else {
                    Concept::conjunction_of(self.nameify(filler))
                };
                self.out.insert(Axiom::ci(lhs_conj, Concept::exists(role.clone(), filler_conj)));
            }
            _ => unreachable!("horn_expressible right-hand side"),
        }
    }
}

fn normalize_horn(tbox: &TBox) -> NormalizeOutcome {
    let mut ctx = HornCtx { fresh: FreshNames::new(tbox), out: TBox::default() };
    for ax in &tbox.axioms {
        if is_horn_normal_axiom(ax) {
            // Split liberal conjunction right-hand sides of kept axioms.
            match ax {
                Axiom::Ci { lhs, rhs } if rhs.as_name_conjunction().map(|s| s.len() > 1).unwrap_or(false) => {
                    for name in rhs.as_name_conjunction().unwrap() {
                        ctx.out.insert(Axiom::ci(lhs.clone(), Concept::Name(name)));
                    }
                }
                other => {
                    ctx.out.insert(other.clone());
                }
            }
            continue;
        }
        match ax {
            Axiom::Funct { guard, role, filler } => {
                let g = Concept::conjunction_of(ctx.nameify(guard));
                let f = Concept::conjunction_of(ctx.nameify(filler));
                ctx.out.insert(Axiom::funct(g, role.clone(), f));
            }
            Axiom::Ci { lhs, rhs } => ctx.emit_ci(lhs, rhs),
        }
    }
    NormalizeOutcome { tbox: ctx.out, form: NormalForm::Horn, fresh_names: ctx.fresh.created }
}

// ---------------------------------------------------------------------------
// Clausal normal form (ALC family)
// ---------------------------------------------------------------------------

pub(crate) fn is_clausal_normal_axiom(ax: &Axiom) -> bool {
    match ax {
        Axiom::Funct { guard, filler, .. } => is_name_conjunction(guard) && is_name_conjunction(filler),
        Axiom::Ci { lhs, rhs } => {
            let clause = is_name_conjunction(lhs) && rhs.as_name_disjunction().is_some();
            let ex_rhs = matches!(lhs, Concept::Name(_) | Concept::Top)
                && matches!(rhs, Concept::Exists(_, f) if matches!(&**f, Concept::Name(_)));
            let ex_lhs = matches!(lhs, Concept::Exists(_, f) if matches!(&**f, Concept::Name(_)))
                && matches!(rhs, Concept::Name(_));
            clause || ex_rhs || ex_lhs
        }
    }
}

struct ClausalCtx {
    fresh: FreshNames,
    out: TBox,
}

impl ClausalCtx {
    /// Name of the definitional proxy for an arbitrary concept; emits the
    /// defining clauses on first use. `top` has no proxy (`None`).
    fn proxy(&mut self, c: &Concept) -> Option<ConceptName> {
        match c {
            Concept::Top => None,
            Concept::Name(n) => Some(n.clone()),
            Concept::Not(inner) => {
                let (name, new) = self.fresh.for_concept(c);
                if new {
                    match self.proxy(inner) {
                        Some(d) => {
                            // name ≡ ¬d.
                            self.out.insert(Axiom::ci(
                                Concept::and([Concept::Name(name.clone()), Concept::Name(d.clone())]),
                                Concept::bot(),
                            ));
                            self.out.insert(Axiom::ci(
                                Concept::Top,
                                Concept::or_all([Concept::Name(name.clone()), Concept::Name(d)]),
                            ));
                        }
                        None => {
                            // name ≡ ¬top = bot.
                            self.out.insert(Axiom::ci(Concept::Name(name.clone()), Concept::bot()));
                        }
                    }
                }
                Some(name)
            }
            Concept::And(parts) => {
                let (name, new) = self.fresh.for_concept(c);
                if new {
                    let proxies: Vec<ConceptName> = parts.iter().filter_map(|p| self.proxy(p)).collect();
                    for p in &proxies {
                        self.out.insert(Axiom::ci(Concept::Name(name.clone()), Concept::Name(p.clone())));
                    }
                    self.out.insert(Axiom::ci(
                        Concept::conjunction_of(proxies),
                        Concept::Name(name.clone()),
                    ));
                }
                Some(name)
            }
            Concept::Exists(role, filler) => {
                let (name, new) = self.fresh.for_concept(c);
                if new {
                    let f = self.filler_name(filler, role);
                    self.out.insert(Axiom::ci(
                        Concept::Name(name.clone()),
                        Concept::exists(role.clone(), Concept::Name(f.clone())),
                    ));
                    self.out.insert(Axiom::ci(
                        Concept::exists(role.clone(), Concept::Name(f)),
                        Concept::Name(name.clone()),
                    ));
                }
                Some(name)
            }
        }
    }

    /// Existential fillers must be names; `top` gets a universal proxy.
    fn filler_name(&mut self, filler: &Concept, _role: &Role) -> ConceptName {
        match self.proxy(filler) {
            Some(n) => n,
            None => {
                let (name, new) = self.fresh.for_concept(&Concept::Top);
                if new {
                    self.out.insert(Axiom::ci(Concept::Top, Concept::Name(name.clone())));
                }
                name
            }
        }
    }
}

fn normalize_clausal(tbox: &TBox) -> NormalizeOutcome {
    let mut ctx = ClausalCtx { fresh: FreshNames::new(tbox), out: TBox::default() };
    for ax in &tbox.axioms {
        if is_clausal_normal_axiom(ax) {
            ctx.out.insert(ax.clone());
            continue;
        }
        match ax {
            Axiom::Funct { guard, role, filler } => {
                let g = ctx.proxy(guard).map(Concept::Name).unwrap_or(Concept::Top);
                let f = ctx.proxy(filler).map(Concept::Name).unwrap_or(Concept::Top);
                ctx.out.insert(Axiom::funct(g, role.clone(), f));
            }
            Axiom::Ci { lhs, rhs } => {
                // Peephole for single-clause axioms C <= D1 | ... | Dn where C
                // and the Di are names: emitted directly. General case uses
                // proxies on both sides.
                let l = ctx.proxy(lhs).map(Concept::Name).unwrap_or(Concept::Top);
                let r = ctx.proxy(rhs).map(Concept::Name).unwrap_or(Concept::Top);
                if r == Concept::Top {
                    continue;
                }
                ctx.out.insert(Axiom::ci(l, Concept::or_all([r])));
            }
        }
    }
    NormalizeOutcome { tbox: ctx.out, form: NormalForm::Clausal, fresh_names: ctx.fresh.created }
}

/// Whether every axiom is Horn after universal unfolding.
pub(crate) fn tbox_is_horn(tbox: &TBox) -> bool {
    fn ci_is_horn(lhs: &Concept, rhs: &Concept) -> bool {
        if let Some((role, filler)) = rhs.as_forall() {
            return ci_is_horn(&Concept::exists(role.inverse(), lhs.clone()), &filler);
        }
        if let Concept::And(parts) = rhs {
            return parts.iter().all(|p| ci_is_horn(lhs, p));
        }
        horn_expressible(lhs) && (horn_expressible(rhs) || rhs.is_bot())
    }
    tbox.axioms.iter().all(|ax| match ax {
        Axiom::Funct { guard, filler, .. } => horn_expressible(guard) && horn_expressible(filler),
        Axiom::Ci { lhs, rhs } => ci_is_horn(lhs, rhs),
    })
}

/// Normalize a TBox, choosing the Horn four-shape form when every axiom is
/// Horn-expressible and the clausal form otherwise.
pub fn normalize(tbox: &TBox) -> NormalizeOutcome {
    if tbox_is_horn(tbox) {
        normalize_horn(tbox)
    } else {
        normalize_clausal(tbox)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse_kb, serialize_kb, ABox, Kb};
    use super::*;

    fn tbox(text: &str) -> TBox {
        parse_kb(&format!("[tbox]\n{text}[abox]\n")).unwrap().tbox
    }

    #[test]
    fn structural_transformation_example() {
        let t = tbox("A <= exists r.(B & exists s.C)\n");
        let out = normalize(&t);
        assert_eq!(out.form, NormalForm::Horn);
        assert!(tbox_is_horn_normal(&out.tbox), "{:?}", out.tbox);
        // A reaches an r-successor satisfying B and an s-successor of it C:
        // the fresh filler name is constrained both ways.
        assert!(!out.fresh_names.is_empty());
        let text = serialize_kb(&Kb::new(out.tbox.clone(), ABox::default()));
        assert!(text.contains("exists r."));
        assert!(text.contains("exists s."));
    }

    #[test]
    fn idempotent_on_normal_elifbot() {
        let t = tbox(
            "A <= B\nA & B <= exists r.(A & B)\nexists r-.A <= B\nA <= func r.B\nA & B <= bot\n",
        );
        assert!(tbox_is_horn_normal(&t));
        let out = normalize(&t);
        assert_eq!(out.tbox, t);
        assert!(out.fresh_names.is_empty());
        // And again.
        let out2 = normalize(&out.tbox);
        assert_eq!(out2.tbox, t);
    }

    #[test]
    fn forall_flips_to_inverse_existential() {
        let t = tbox("A <= forall r.B\n");
        let out = normalize(&t);
        assert_eq!(out.form, NormalForm::Horn);
        let expected = Axiom::ci(
            Concept::exists(Role::inverse_of("r"), Concept::name("A")),
            Concept::name("B"),
        );
        assert!(out.tbox.axioms.contains(&expected), "{:?}", out.tbox);
    }

    #[test]
    fn alc_tbox_goes_clausal_with_one_fresh_name() {
        let t = tbox("not C <= forall r.C\n");
        let out = normalize(&t);
        assert_eq!(out.form, NormalForm::Clausal);
        assert!(out.tbox.axioms.iter().all(is_clausal_normal_axiom), "{:?}", out.tbox);
        for ax in &out.tbox.axioms {
            if let Axiom::Funct { .. } = ax {
                panic!("no functionality expected");
            }
        }
    }

    #[test]
    fn clausal_recognizer() {
        let t = tbox("A & B <= bot\ntop <= C\nA <= exists r.B\nexists r.A <= B\n");
        assert!(t.axioms.iter().all(is_clausal_normal_axiom));
    }

    #[test]
    fn fresh_names_avoid_collisions() {
        let t = tbox("_nf_3 <= exists r.(A & exists s.B)\n");
        let out = normalize(&t);
        for n in &out.fresh_names {
            assert_ne!(n.as_str(), "_nf_3");
        }
    }

    #[test]
    fn conjunctive_rhs_split() {
        let t = tbox("top <= C & exists r.A1 & exists r.A2\n");
        let out = normalize(&t);
        assert!(tbox_is_horn_normal(&out.tbox));
        assert!(out.tbox.axioms.contains(&Axiom::ci(Concept::Top, Concept::name("C"))));
        assert!(out
            .tbox
            .axioms
            .contains(&Axiom::ci(Concept::Top, Concept::exists(Role::plain("r"), Concept::name("A1")))));
    }
}
