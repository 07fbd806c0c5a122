//! Description logic fragments and minimal-fragment detection.

use serde::{Deserialize, Serialize};

use super::{Axiom, Concept, Kb, Role};

/// The investigated fragments. `AlcfStar` is ALCF restricted to unqualified
/// functionality (`top <= func r.top` with a plain role name).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fragment {
    DlLiteCore,
    DlLiteF,
    El,
    Elf,
    Eli,
    Elif,
    ElBot,
    ElfBot,
    EliBot,
    ElifBot,
    Alc,
    AlcfStar,
    Alci,
    Alcf,
    Alcif,
}

impl Fragment {
    pub const ALL: [Fragment; 15] = [
        Fragment::DlLiteCore,
        Fragment::DlLiteF,
        Fragment::El,
        Fragment::Elf,
        Fragment::Eli,
        Fragment::Elif,
        Fragment::ElBot,
        Fragment::ElfBot,
        Fragment::EliBot,
        Fragment::ElifBot,
        Fragment::Alc,
        Fragment::AlcfStar,
        Fragment::Alci,
        Fragment::Alcf,
        Fragment::Alcif,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Fragment::DlLiteCore => "dl-lite-core",
            Fragment::DlLiteF => "dl-lite-f",
            Fragment::El => "el",
            Fragment::Elf => "elf",
            Fragment::Eli => "eli",
            Fragment::Elif => "elif",
            Fragment::ElBot => "el-bot",
            Fragment::ElfBot => "elf-bot",
            Fragment::EliBot => "eli-bot",
            Fragment::ElifBot => "elif-bot",
            Fragment::Alc => "alc",
            Fragment::AlcfStar => "alcf-star",
            Fragment::Alci => "alci",
            Fragment::Alcf => "alcf",
            Fragment::Alcif => "alcif",
        }
    }

    pub fn parse(s: &str) -> Option<Fragment> {
        Fragment::ALL.into_iter().find(|f| f.name() == s)
    }

    /// Whole Horn family: everything outside the ALC fragments.
    pub fn is_horn(self) -> bool {
        !matches!(self, Fragment::Alc | Fragment::Alci | Fragment::Alcf | Fragment::AlcfStar | Fragment::Alcif)
    }

    /// Fragments that can express both inverse roles and functionality, the
    /// combination that defeats the finite model property.
    pub fn has_inverse_functionality(self) -> bool {
        matches!(self, Fragment::DlLiteF | Fragment::Elif | Fragment::ElifBot | Fragment::Alcif)
    }
}

impl std::fmt::Display for Fragment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Direct edges of the fragment lattice (lower subsumed by higher).
const LATTICE_EDGES: &[(Fragment, Fragment)] = &[
    (Fragment::DlLiteCore, Fragment::DlLiteF),
    (Fragment::DlLiteCore, Fragment::EliBot),
    (Fragment::DlLiteF, Fragment::ElifBot),
    (Fragment::El, Fragment::Eli),
    (Fragment::El, Fragment::Elf),
    (Fragment::El, Fragment::ElBot),
    (Fragment::El, Fragment::Alc),
    (Fragment::Eli, Fragment::Elif),
    (Fragment::Eli, Fragment::EliBot),
    (Fragment::Eli, Fragment::Alci),
    (Fragment::Elf, Fragment::Elif),
    (Fragment::Elf, Fragment::ElfBot),
    (Fragment::Elf, Fragment::Alcf),
    (Fragment::Elif, Fragment::ElifBot),
    (Fragment::Elif, Fragment::Alcif),
    (Fragment::ElBot, Fragment::EliBot),
    (Fragment::ElBot, Fragment::ElfBot),
    (Fragment::ElBot, Fragment::Alc),
    (Fragment::EliBot, Fragment::ElifBot),
    (Fragment::EliBot, Fragment::Alci),
    (Fragment::ElfBot, Fragment::ElifBot),
    (Fragment::ElfBot, Fragment::Alcf),
    (Fragment::ElifBot, Fragment::Alcif),
    (Fragment::Alc, Fragment::Alci),
    (Fragment::Alc, Fragment::AlcfStar),
    (Fragment::AlcfStar, Fragment::Alcf),
    (Fragment::Alci, Fragment::Alcif),
    (Fragment::Alcf, Fragment::Alcif),
];

/// Lattice order: `a <= b` iff every `a` KB is a `b` KB.
pub fn fragment_le(a: Fragment, b: Fragment) -> bool {
    if a == b {
        return true;
    }
    let mut frontier = vec![a];
    let mut seen = [false; 15];
    while let Some(x) = frontier.pop() {
        for &(lo, hi) in LATTICE_EDGES {
            if lo == x && !seen[hi as usize] {
                if hi == b {
                    return true;
                }
                seen[hi as usize] = true;
                frontier.push(hi);
            }
        }
    }
    false
}

/// A positive existential concept: no negation anywhere.
fn is_el_concept(c: &Concept, saw_inverse: &mut bool) -> bool {
    match c {
        Concept::Top => true,
        Concept::Name(_) => true,
        Concept::Not(_) => false,
        Concept::And(parts) => parts.iter().all(|p| is_el_concept(p, saw_inverse)),
        Concept::Exists(r, filler) => {
            if r.inverted {
                *saw_inverse = true;
            }
            is_el_concept(filler, saw_inverse)
        }
    }
}

/// Basic DL-Lite concept: `A` or `exists r` (with either orientation).
fn is_dl_lite_basic(c: &Concept, saw_inverse: &mut bool) -> bool {
    match c {
        Concept::Name(_) => true,
        Concept::Exists(r, filler) if **filler == Concept::Top => {
            if r.inverted {
                *saw_inverse = true;
            }
            true
        }
        _ => false,
    }
}

#[derive(Default)]
struct Features {
    inverse: bool,
    funct: bool,
    qualified_funct: bool,
    bot_rhs: bool,
    full_negation: bool,
    non_dl_lite: bool,
}

/// Classify one axiom, preferring the Horn reading: `C <= forall r.D` is
/// treated as `exists r-.C <= D` when both sides are positive, and a CI with
/// a `bot` right-hand side counts as a concept disjointness.
fn classify(ax: &Axiom, f: &mut Features) {
    match ax {
        Axiom::Funct { guard, role, filler } => {
            f.funct = true;
            if role.inverted {
                f.inverse = true;
            }
            if *guard != Concept::Top || *filler != Concept::Top {
                f.qualified_funct = true;
                let mut inv = f.inverse;
                if !is_el_concept(guard, &mut inv) || !is_el_concept(filler, &mut inv) {
                    f.full_negation = true;
                }
                f.inverse = inv;
            }
            f.non_dl_lite = f.non_dl_lite || *guard != Concept::Top || *filler != Concept::Top;
        }
        Axiom::Ci { lhs, rhs } => {
            classify_ci(lhs, rhs, f);
        }
    }
}

fn classify_ci(lhs: &Concept, rhs: &Concept, f: &mut Features) {
    // Universal right-hand sides have the Horn reading
    // `C <= forall r.D  ~  exists r-.C <= D`; use it only when it stays
    // positive, otherwise judge the original syntax.
    if let Some((role, filler)) = rhs.as_forall() {
        let flipped_lhs = Concept::exists(role.inverse(), lhs.clone());
        let mut probe = false;
        if is_el_concept(&flipped_lhs, &mut probe) && is_el_concept(&filler, &mut probe) {
            f.non_dl_lite = true;
            classify_ci(&flipped_lhs, &filler, f);
            return;
        }
    }
    // Split conjunctive right-hand sides.
    if let Concept::And(parts) = rhs {
        f.non_dl_lite = true;
        for p in parts {
            classify_ci(lhs, p, f);
        }
        return;
    }

    let mut inv = false;
    let el_lhs = is_el_concept(lhs, &mut inv);
    let el_rhs = is_el_concept(rhs, &mut inv);
    if el_lhs && el_rhs {
        f.inverse |= inv;
        let mut dl_inv = false;
        let dl = is_dl_lite_basic(lhs, &mut dl_inv) && is_dl_lite_basic(rhs, &mut dl_inv);
        if dl {
            f.inverse |= dl_inv;
        } else {
            f.non_dl_lite = true;
        }
        return;
    }
    if el_lhs && rhs.is_bot() {
        // Concept disjointness; DL-Lite allows it over basic concepts.
        f.inverse |= inv;
        f.bot_rhs = true;
        let mut dl_inv = false;
        let dl_disjoint = match lhs {
            Concept::And(parts) => parts.iter().all(|p| is_dl_lite_basic(p, &mut dl_inv)),
            other => is_dl_lite_basic(other, &mut dl_inv),
        };
        if dl_disjoint {
            f.inverse |= dl_inv;
        } else {
            f.non_dl_lite = true;
        }
        return;
    }
    // Anything else needs full negation.
    f.full_negation = true;
    f.non_dl_lite = true;
    let mut count_inverse = |r: &Role| {
        if r.inverted {
            f.inverse = true;
        }
    };
    lhs.visit_roles(&mut count_inverse);
    rhs.visit_roles(&mut count_inverse);
}

fn admits(features: &Features, fragment: Fragment) -> bool {
    let Features { inverse, funct, qualified_funct, bot_rhs, full_negation, non_dl_lite } = features;
    match fragment {
        Fragment::DlLiteCore => !non_dl_lite && !funct && !full_negation,
        Fragment::DlLiteF => !non_dl_lite && !qualified_funct && !full_negation,
        Fragment::El => !full_negation && !bot_rhs && !inverse && !funct,
        Fragment::Eli => !full_negation && !bot_rhs && !funct,
        Fragment::Elf => !full_negation && !bot_rhs && !inverse,
        Fragment::Elif => !full_negation && !bot_rhs,
        Fragment::ElBot => !full_negation && !inverse && !funct,
        Fragment::EliBot => !full_negation && !funct,
        Fragment::ElfBot => !full_negation && !inverse,
        Fragment::ElifBot => !full_negation,
        Fragment::Alc => !inverse && !funct,
        Fragment::AlcfStar => !inverse && !qualified_funct,
        Fragment::Alci => !funct,
        Fragment::Alcf => !inverse,
        Fragment::Alcif => true,
    }
}

/// The minimal fragment admitting every axiom of the KB. Ties between
/// incomparable fragments are resolved by the fixed linearization of
/// [`Fragment::ALL`] (DL-Lite before the EL family before the ALC family).
pub fn detect_fragment(kb: &Kb) -> Fragment {
    let mut features = Features::default();
    for ax in &kb.tbox.axioms {
        classify(ax, &mut features);
    }
    for f in Fragment::ALL {
        if admits(&features, f) {
            return f;
        }
    }
    Fragment::Alcif
}

#[cfg(test)]
mod tests {
    use super::super::parse_kb;
    use super::*;

    fn detect(text: &str) -> Fragment {
        detect_fragment(&parse_kb(text).unwrap())
    }

    #[test]
    fn lattice_sanity() {
        assert!(fragment_le(Fragment::El, Fragment::Alcif));
        assert!(fragment_le(Fragment::DlLiteCore, Fragment::ElifBot));
        assert!(fragment_le(Fragment::DlLiteF, Fragment::Alcif));
        assert!(!fragment_le(Fragment::Alci, Fragment::Alcf));
        assert!(!fragment_le(Fragment::ElifBot, Fragment::Alcf));
        assert!(fragment_le(Fragment::Alc, Fragment::AlcfStar));
        // The detection order is a linear extension of the lattice.
        for (i, a) in Fragment::ALL.iter().enumerate() {
            for b in &Fragment::ALL[..i] {
                assert!(!fragment_le(*a, *b) || a == b, "{a} listed after {b}");
            }
        }
    }

    #[test]
    fn example_three_is_dl_lite_f() {
        let f = detect(
            "[tbox]\nC <= exists r\nexists r- <= C\ntop <= func r-.top\n[abox]\nr(a,a)\nr(a,b)\n",
        );
        assert_eq!(f, Fragment::DlLiteF);
    }

    #[test]
    fn example_two_is_elif_bot() {
        let f = detect(
            "[tbox]\n\
             top <= C & exists r.A1 & exists r.A2\n\
             top <= func s-.top\n\
             exists r.X <= Y\n\
             exists r.Y <= X\n\
             Y <= exists s.X\n\
             X <= exists s.Y\n\
             A1 & A2 <= bot\n\
             X & Y <= bot\n\
             [abox]\n",
        );
        assert_eq!(f, Fragment::ElifBot);
    }

    #[test]
    fn top_subsumption_is_el() {
        assert_eq!(detect("[tbox]\ntop <= C\n[abox]\n"), Fragment::El);
    }

    #[test]
    fn negation_goes_alc() {
        assert_eq!(detect("[tbox]\nnot C <= forall r . C\n[abox]\n"), Fragment::Alc);
        assert_eq!(detect("[tbox]\nnot C <= forall r- . C\n[abox]\n"), Fragment::Alci);
    }

    #[test]
    fn positive_forall_stays_horn() {
        // A <= forall r.B is exists r-.A <= B, an ELI axiom.
        assert_eq!(detect("[tbox]\nA <= forall r . B\n[abox]\n"), Fragment::Eli);
        // With an inverse role it only needs plain EL.
        assert_eq!(detect("[tbox]\nA <= forall r- . B\n[abox]\n"), Fragment::El);
    }

    #[test]
    fn functionality_variants() {
        assert_eq!(detect("[tbox]\ntop <= func r.top\nA <= exists r.B\n[abox]\n"), Fragment::Elf);
        assert_eq!(
            detect("[tbox]\nA <= func r.B\nA <= exists r.B\n[abox]\n"),
            Fragment::Elf
        );
        assert_eq!(detect("[tbox]\ntop <= func r.top\nnot A <= B\n[abox]\n"), Fragment::AlcfStar);
        assert_eq!(detect("[tbox]\nA <= func r.B\nnot A <= B\n[abox]\n"), Fragment::Alcf);
    }

    #[test]
    fn monotone_under_axiom_addition() {
        let base = "[tbox]\nA <= B\n";
        let additions = [
            "A <= exists r.B\n",
            "A & B <= bot\n",
            "top <= func r.top\n",
            "A <= exists r-.B\n",
            "not A <= B\n",
        ];
        let mut text = String::from(base);
        let mut prev = detect(&format!("{text}[abox]\n"));
        for add in additions {
            text.push_str(add);
            let next = detect(&format!("{text}[abox]\n"));
            // Never strictly downward; sideways moves between incomparable
            // fragments are fine.
            assert!(
                !(fragment_le(next, prev) && next != prev),
                "{prev} moved down to {next}"
            );
            prev = next;
        }
    }
}
