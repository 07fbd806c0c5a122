//! Canonical text output for knowledge bases. `parse_kb(serialize_kb(kb))`
//! is structurally equal to `kb`.

use std::fmt::Write;

use super::{Assertion, Axiom, Concept, Kb};

fn needs_parens_under_prefix(c: &Concept) -> bool {
    matches!(c, Concept::And(_))
}

pub(super) fn concept_to_string(c: &Concept) -> String {
    let mut out = String::new();
    write_concept(&mut out, c);
    out
}

fn write_concept(out: &mut String, c: &Concept) {
    match c {
        Concept::Top => out.push_str("top"),
        Concept::Name(n) => out.push_str(n.as_str()),
        Concept::Not(inner) if **inner == Concept::Top => out.push_str("bot"),
        Concept::Not(inner) => {
            out.push_str("not ");
            write_prefix_operand(out, inner);
        }
        Concept::And(parts) => {
            for (i, p) in parts.iter().enumerate() {
                if i > 0 {
                    out.push_str(" & ");
                }
                write_prefix_operand(out, p);
            }
        }
        Concept::Exists(role, filler) => {
            if **filler == Concept::Top {
                let _ = write!(out, "exists {role}");
            } else {
                let _ = write!(out, "exists {role}.");
                write_prefix_operand(out, filler);
            }
        }
    }
}

fn write_prefix_operand(out: &mut String, c: &Concept) {
    if needs_parens_under_prefix(c) {
        out.push('(');
        write_concept(out, c);
        out.push(')');
    } else {
        write_concept(out, c);
    }
}

pub(super) fn axiom_to_string(ax: &Axiom) -> String {
    match ax {
        Axiom::Ci { lhs, rhs } => format!("{} <= {}", concept_to_string(lhs), concept_to_string(rhs)),
        Axiom::Funct { guard, role, filler } => format!(
            "{} <= func {role}.{}",
            concept_to_string(guard),
            {
                let mut s = String::new();
                write_prefix_operand(&mut s, filler);
                s
            }
        ),
    }
}

/// Canonical `.dl` text: sorted axioms, then sorted assertions.
pub fn serialize_kb(kb: &Kb) -> String {
    let mut out = String::from("[tbox]\n");
    for ax in &kb.tbox.axioms {
        out.push_str(&axiom_to_string(ax));
        out.push('\n');
    }
    out.push_str("[abox]\n");
    for a in &kb.abox.assertions {
        match a {
            Assertion::Concept(c, x) => {
                let _ = writeln!(out, "{c}({x})");
            }
            Assertion::Role(r, x, y) => {
                let _ = writeln!(out, "{r}({x},{y})");
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::{parse_kb, Role};
    use super::*;

    #[test]
    fn empty_kb_prints_sections() {
        let kb = Kb::default();
        assert_eq!(serialize_kb(&kb), "[tbox]\n[abox]\n");
    }

    #[test]
    fn bot_and_exists_top_compact() {
        let c = Concept::exists(Role::plain("r"), Concept::Top);
        assert_eq!(concept_to_string(&c), "exists r");
        assert_eq!(concept_to_string(&Concept::bot()), "bot");
        let nested = Concept::not(Concept::and([Concept::name("A"), Concept::name("B")]));
        assert_eq!(concept_to_string(&nested), "not (A & B)");
    }

    #[test]
    fn parse_print_fixpoint() {
        let text = "[tbox]\nA <= exists r.(B & exists s-.C)\n[abox]\nA(a)\n";
        let kb = parse_kb(text).unwrap();
        let printed = serialize_kb(&kb);
        assert_eq!(parse_kb(&printed).unwrap(), kb);
    }
}
