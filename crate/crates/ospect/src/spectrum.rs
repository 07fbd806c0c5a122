//! Effective representations of spectra: ultimately periodic subsets of
//! N ∪ {∞} given by a finite sporadic set, an optional arithmetic tail and an
//! infinity flag.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A value in N ∪ {∞}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Card {
    Fin(u64),
    Inf,
}

impl Card {
    pub fn is_finite(self) -> bool {
        matches!(self, Card::Fin(_))
    }

    pub fn checked_add(self, other: Card) -> Card {
        match (self, other) {
            (Card::Fin(a), Card::Fin(b)) => Card::Fin(a + b),
            _ => Card::Inf,
        }
    }
}

impl From<u64> for Card {
    fn from(n: u64) -> Self {
        Card::Fin(n)
    }
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Card::Fin(n) => write!(f, "{n}"),
            Card::Inf => write!(f, "inf"),
        }
    }
}

impl Serialize for Card {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Card::Fin(n) => s.serialize_u64(*n),
            Card::Inf => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Card {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(n) => Ok(Card::Fin(n)),
            Raw::Str(s) if s == "inf" => Ok(Card::Inf),
            Raw::Str(s) => Err(D::Error::custom(format!("expected number or \"inf\", got {s:?}"))),
        }
    }
}

/// Arithmetic tail `{start + period * n | n in N}` with `period >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tail {
    pub start: u64,
    pub period: u64,
}

/// Canonical representation of an ultimately periodic subset of N ∪ {∞}.
///
/// Canonical form: when a tail is present every sporadic element lies below
/// `tail.start`, `tail.start` is the least point from which the set is exactly
/// the arithmetic progression, and the period is least. The empty set is
/// `Empty`, never a `Set` with no members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpectrumRep {
    Empty,
    Set {
        sporadic: BTreeSet<u64>,
        tail: Option<Tail>,
        has_infinity: bool,
    },
}

/// The paper-facing triple (S, M, alpha) with S ⊆ N∞ and M, alpha ∈ N∞.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Triple {
    Empty,
    Rep {
        sporadic: BTreeSet<Card>,
        start: Card,
        period: Card,
    },
}

impl SpectrumRep {
    pub fn empty() -> Self {
        SpectrumRep::Empty
    }

    /// The set {v}.
    pub fn singleton(v: Card) -> Self {
        match v {
            Card::Fin(n) => canonicalize([n], None, false),
            Card::Inf => canonicalize([], None, true),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, SpectrumRep::Empty)
    }

    pub fn has_infinity(&self) -> bool {
        match self {
            SpectrumRep::Empty => false,
            SpectrumRep::Set { has_infinity, .. } => *has_infinity,
        }
    }

    /// Membership test; linear in the number of sporadic values.
    pub fn member(&self, v: Card) -> bool {
        match self {
            SpectrumRep::Empty => false,
            SpectrumRep::Set { sporadic, tail, has_infinity } => match v {
                Card::Inf => *has_infinity,
                Card::Fin(n) => {
                    sporadic.contains(&n)
                        || tail
                            .map(|t| n >= t.start && (n - t.start) % t.period == 0)
                            .unwrap_or(false)
                }
            },
        }
    }

    /// All finite members up to and including `bound`, ascending.
    pub fn finite_members_upto(&self, bound: u64) -> Vec<u64> {
        (0..=bound).filter(|&n| self.member(Card::Fin(n))).collect()
    }

    /// Largest finite value that matters for canonical-form reasoning.
    pub fn horizon(&self) -> u64 {
        match self {
            SpectrumRep::Empty => 0,
            SpectrumRep::Set { sporadic, tail, .. } => {
                let sp = sporadic.iter().next_back().copied().unwrap_or(0);
                let ts = tail.map(|t| t.start + 2 * t.period).unwrap_or(0);
                sp.max(ts)
            }
        }
    }

    /// The paper's (S, M, alpha) encoding. `∞ ∈ S` encodes the infinity flag
    /// when a finite tail exists; `M = ∞, alpha = 0` encodes an `{∞}`-only
    /// tail; a finite set without a tail uses its maximum as `M` with
    /// `alpha = 0`.
    pub fn to_triple(&self) -> Triple {
        match self {
            SpectrumRep::Empty => Triple::Empty,
            SpectrumRep::Set { sporadic, tail, has_infinity } => {
                let mut s: BTreeSet<Card> = sporadic.iter().map(|&n| Card::Fin(n)).collect();
                match tail {
                    Some(t) => {
                        if *has_infinity {
                            s.insert(Card::Inf);
                        }
                        Triple::Rep { sporadic: s, start: Card::Fin(t.start), period: Card::Fin(t.period) }
                    }
                    None => {
                        if *has_infinity {
                            Triple::Rep { sporadic: s, start: Card::Inf, period: Card::Fin(0) }
                        } else {
                            // Nonempty finite set: peel off the maximum as the
                            // degenerate one-point tail (alpha = 0).
                            let max = *sporadic.iter().next_back().expect("canonical Set is nonempty");
                            s.remove(&Card::Fin(max));
                            Triple::Rep { sporadic: s, start: Card::Fin(max), period: Card::Fin(0) }
                        }
                    }
                }
            }
        }
    }

    /// Exact closure-under-addition test. `probe_bound` must be at least
    /// twice (tail start + largest sporadic value); sums of two members above
    /// the probed range land in the tail, where membership is a congruence
    /// check, so probing pairs of small members is complete.
    pub fn is_closed_under_addition(&self, probe_bound: u64) -> bool {
        match self {
            SpectrumRep::Empty => true,
            SpectrumRep::Set { has_infinity, .. } => {
                let members = self.finite_members_upto(probe_bound);
                for (i, &x) in members.iter().enumerate() {
                    for &y in &members[i..] {
                        if !self.member(Card::Fin(x + y)) {
                            return false;
                        }
                    }
                    if *has_infinity {
                        // x + ∞ = ∞ is a member by assumption.
                    }
                }
                true
            }
        }
    }

    /// Default probe bound for `is_closed_under_addition`.
    pub fn default_probe_bound(&self) -> u64 {
        match self {
            SpectrumRep::Empty => 4,
            SpectrumRep::Set { sporadic, tail, .. } => {
                let sp = sporadic.iter().next_back().copied().unwrap_or(0);
                let (m, a) = tail.map(|t| (t.start, t.period)).unwrap_or((0, 1));
                4 * (m + sp + a)
            }
        }
    }

    /// A finite generating set, per the stabilization argument: the sporadic
    /// values together with `start, start+period, ..., start+start*period`
    /// generate the whole tail. Fails if the set is not closed under
    /// addition.
    pub fn generators(&self) -> Result<BTreeSet<Card>, NotASemigroup> {
        if !self.is_closed_under_addition(self.default_probe_bound()) {
            return Err(NotASemigroup);
        }
        match self {
            SpectrumRep::Empty => Ok(BTreeSet::new()),
            SpectrumRep::Set { sporadic, tail, has_infinity } => {
                let mut g: BTreeSet<Card> = sporadic.iter().map(|&n| Card::Fin(n)).collect();
                if let Some(t) = tail {
                    // Closure forces the start to be a multiple of the
                    // period, so the tail is period * [start/period, ∞); the
                    // first start/period + 2 of its elements generate it.
                    for i in 0..=(t.start / t.period + 1) {
                        g.insert(Card::Fin(t.start + i * t.period));
                    }
                }
                if *has_infinity {
                    g.insert(Card::Inf);
                }
                Ok(g)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NotASemigroup;

impl fmt::Display for NotASemigroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "set is not closed under addition")
    }
}

impl std::error::Error for NotASemigroup {}

/// Build the canonical representation of
/// `sporadic ∪ tail ∪ (has_infinity ? {∞} : ∅)`.
pub fn canonicalize(
    sporadic: impl IntoIterator<Item = u64>,
    tail: Option<Tail>,
    has_infinity: bool,
) -> SpectrumRep {
    let sporadic: BTreeSet<u64> = sporadic.into_iter().collect();
    let Some(tail) = tail else {
        if sporadic.is_empty() && !has_infinity {
            return SpectrumRep::Empty;
        }
        return SpectrumRep::Set { sporadic, tail: None, has_infinity };
    };
    assert!(tail.period >= 1, "tail period must be at least 1");

    let max_sp = sporadic.iter().next_back().copied().unwrap_or(0);
    // Beyond this point the set is exactly the input progression.
    let horizon = max_sp.max(tail.start) + 2 * tail.period + 1;
    let member = |n: u64| -> bool {
        sporadic.contains(&n) || (n >= tail.start && (n - tail.start) % tail.period == 0)
    };

    // Least start from which the set is exactly an arithmetic progression
    // with the input period. The candidate start must itself be a member.
    let alpha = tail.period;
    let mut best_start = None;
    'outer: for m in 0..=horizon {
        if !member(m) {
            continue;
        }
        let mut n = m;
        while n <= horizon {
            if member(n) != ((n - m) % alpha == 0) {
                continue 'outer;
            }
            n += 1;
        }
        best_start = Some(m);
        break;
    }
    let start = best_start.expect("an ultimately periodic set has a tail start below its horizon");
    let kept: BTreeSet<u64> = (0..start).filter(|&n| member(n)).collect();
    SpectrumRep::Set { sporadic: kept, tail: Some(Tail { start, period: alpha }), has_infinity }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// The subsemigroup of (N∞, +) generated by `g`; the empty set generates the
/// empty set. Zero and infinity are absorbed as extra elements, positive
/// generators are scaled by their gcd and closed by dynamic programming, with
/// the tail start detected as the first run of `min` consecutive sums.
pub fn from_generators(g: impl IntoIterator<Item = Card>) -> SpectrumRep {
    let g: BTreeSet<Card> = g.into_iter().collect();
    let has_inf = g.contains(&Card::Inf);
    let has_zero = g.contains(&Card::Fin(0));
    let positives: Vec<u64> = g
        .iter()
        .filter_map(|c| match c {
            Card::Fin(n) if *n > 0 => Some(*n),
            _ => None,
        })
        .collect();

    if positives.is_empty() {
        let sporadic: Vec<u64> = if has_zero { vec![0] } else { vec![] };
        return canonicalize(sporadic, None, has_inf);
    }

    let d = positives.iter().copied().fold(0, gcd);
    let scaled: Vec<u64> = positives.iter().map(|&p| p / d).collect();
    let amin = *scaled.iter().min().unwrap();
    let amax = *scaled.iter().max().unwrap();

    // Reachable sums of the scaled (gcd 1) generators, grown until a run of
    // `amin` consecutive reachable values certifies the tail.
    let mut bound = (amin * amax + 2 * amin + 2) as usize;
    let (reach, tail_start) = loop {
        let mut reach = vec![false; bound + 1];
        for &a in &scaled {
            let a = a as usize;
            if a <= bound {
                reach[a] = true;
            }
        }
        for i in 1..=bound {
            if reach[i] {
                for &a in &scaled {
                    let j = i + a as usize;
                    if j <= bound {
                        reach[j] = true;
                    }
                }
            }
        }
        let mut run = 0usize;
        let mut found = None;
        for (i, &r) in reach.iter().enumerate().skip(1) {
            if r {
                run += 1;
                if run >= amin as usize {
                    found = Some(i + 1 - run);
                    break;
                }
            } else {
                run = 0;
            }
        }
        match found {
            Some(start) => break (reach, start),
            None => bound *= 2,
        }
    };

    let mut sporadic: Vec<u64> = (1..tail_start).filter(|&i| reach[i]).map(|i| i as u64 * d).collect();
    if has_zero {
        sporadic.push(0);
    }
    canonicalize(sporadic, Some(Tail { start: tail_start as u64 * d, period: d }), has_inf)
}

/// Serialized form used by the CLI and the solver trace:
/// `{"status":"empty"}` or
/// `{"status":"ok","sporadic":[...],"tail":{"start":..,"period":..},"infinity":..}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum SpectrumJson {
    Empty,
    Ok {
        sporadic: Vec<u64>,
        tail: Option<Tail>,
        infinity: bool,
    },
}

impl From<&SpectrumRep> for SpectrumJson {
    fn from(rep: &SpectrumRep) -> Self {
        match rep {
            SpectrumRep::Empty => SpectrumJson::Empty,
            SpectrumRep::Set { sporadic, tail, has_infinity } => SpectrumJson::Ok {
                sporadic: sporadic.iter().copied().collect(),
                tail: *tail,
                infinity: *has_infinity,
            },
        }
    }
}

impl From<SpectrumJson> for SpectrumRep {
    fn from(j: SpectrumJson) -> Self {
        match j {
            SpectrumJson::Empty => SpectrumRep::Empty,
            SpectrumJson::Ok { sporadic, tail, infinity } => canonicalize(sporadic, tail, infinity),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: closure of the generators under addition, by
    /// saturating sums within a bound. Used to freeze expected values.
    fn closure_oracle(gens: &[u64], bound: u64) -> BTreeSet<u64> {
        let mut set: BTreeSet<u64> = gens.iter().copied().filter(|&g| g <= bound).collect();
        loop {
            let mut next = set.clone();
            for &a in &set {
                for &b in &set {
                    if a + b <= bound {
                        next.insert(a + b);
                    }
                }
            }
            if next == set {
                break set;
            }
            set = next;
        }
    }

    fn rep(sporadic: &[u64], tail: Option<(u64, u64)>, inf: bool) -> SpectrumRep {
        canonicalize(sporadic.iter().copied(), tail.map(|(start, period)| Tail { start, period }), inf)
    }

    #[test]
    fn member_example_two_shape() {
        // ({4}, 6, 1) with infinity.
        let r = rep(&[4], Some((6, 1)), true);
        assert!(!r.member(Card::Fin(5)));
        assert!(r.member(Card::Fin(4)));
        assert!(r.member(Card::Inf));
        assert!(r.member(Card::Fin(6)));
        assert!(r.member(Card::Fin(123456)));
        assert!(!r.member(Card::Fin(0)));
    }

    #[test]
    fn member_empty_and_even() {
        assert!(!SpectrumRep::Empty.member(Card::Fin(0)));
        assert!(!SpectrumRep::Empty.member(Card::Inf));
        // 2N ∪ {∞} as (∅, 0, 2) with infinity.
        let r = rep(&[], Some((0, 2)), true);
        assert!(r.member(Card::Fin(10)));
        assert!(!r.member(Card::Fin(7)));
        assert!(r.member(Card::Fin(0)));
        assert!(r.member(Card::Inf));
    }

    #[test]
    fn canonicalize_absorbs_duplicate_sporadic() {
        let r = rep(&[6], Some((6, 1)), false);
        assert_eq!(r, rep(&[], Some((6, 1)), false));
    }

    #[test]
    fn canonicalize_merges_progressions() {
        // {0,2,4} ∪ {6,8,...} is 2N; expected computed by set equality up to 30.
        let merged = rep(&[0, 2, 4], Some((6, 2)), false);
        assert_eq!(merged, rep(&[], Some((0, 2)), false));
        for n in 0..=30 {
            assert_eq!(merged.member(Card::Fin(n)), n % 2 == 0, "n={n}");
        }
    }

    #[test]
    fn canonicalize_already_canonical() {
        let r = rep(&[3, 5, 6], Some((8, 1)), false);
        match &r {
            SpectrumRep::Set { sporadic, tail, .. } => {
                assert_eq!(sporadic.iter().copied().collect::<Vec<_>>(), vec![3, 5, 6]);
                assert_eq!(*tail, Some(Tail { start: 8, period: 1 }));
            }
            _ => panic!("expected set"),
        }
    }

    #[test]
    fn canonicalize_moves_start_up_past_stray_sporadics() {
        // {6,7,8,10,12,...}: progression of period 2 only holds from 10.
        let r = rep(&[7], Some((6, 2)), false);
        assert_eq!(r, rep(&[6, 7, 8], Some((10, 2)), false));
    }

    #[test]
    fn canonicalize_idempotent_and_preserving() {
        let inputs: Vec<(Vec<u64>, Option<(u64, u64)>, bool)> = vec![
            (vec![], None, false),
            (vec![0], None, false),
            (vec![1, 2, 3], Some((9, 3)), true),
            (vec![5, 10], Some((11, 1)), false),
            (vec![0, 2, 4, 6], Some((8, 2)), false),
            (vec![], Some((4, 4)), true),
        ];
        for (sp, tail, inf) in inputs {
            let r1 = rep(&sp, tail, inf);
            let probe = 3 * (r1.horizon() + 1);
            let raw = rep(&sp, tail, inf);
            for n in 0..=probe {
                let base = sp.contains(&n)
                    || tail.map(|(m, a)| n >= m && (n - m) % a == 0).unwrap_or(false);
                assert_eq!(raw.member(Card::Fin(n)), base, "membership changed at {n}");
            }
            // Idempotence: re-canonicalizing the canonical data is identity.
            if let SpectrumRep::Set { sporadic, tail, has_infinity } = &r1 {
                let r2 = canonicalize(sporadic.iter().copied(), *tail, *has_infinity);
                assert_eq!(r1, r2);
            }
        }
    }

    #[test]
    fn generators_of_empty_and_zero() {
        assert_eq!(from_generators([]), SpectrumRep::Empty);
        let zero = from_generators([Card::Fin(0)]);
        assert_eq!(zero, rep(&[0], None, false));
        assert_eq!(zero.generators().unwrap().into_iter().collect::<Vec<_>>(), vec![Card::Fin(0)]);
    }

    #[test]
    fn from_generators_two_three() {
        // Oracle: sums of {2,3} up to 12 are {2,3,4,...}.
        let oracle = closure_oracle(&[2, 3], 12);
        let r = from_generators([Card::Fin(2), Card::Fin(3)]);
        for n in 0..=12 {
            assert_eq!(r.member(Card::Fin(n)), oracle.contains(&n), "n={n}");
        }
        assert_eq!(r, rep(&[], Some((2, 1)), false));
    }

    #[test]
    fn from_generators_three_five() {
        // Oracle: sums of {3,5} up to 30; Frobenius(3,5)=7 is excluded.
        let oracle = closure_oracle(&[3, 5], 30);
        let r = from_generators([Card::Fin(3), Card::Fin(5)]);
        for n in 0..=30 {
            assert_eq!(r.member(Card::Fin(n)), oracle.contains(&n), "n={n}");
        }
        assert_eq!(r, rep(&[3, 5, 6], Some((8, 1)), false));
        assert!(!r.member(Card::Fin(7)));
    }

    #[test]
    fn from_generators_infinity_only() {
        let r = from_generators([Card::Inf]);
        assert_eq!(r, rep(&[], None, true));
        assert!(r.member(Card::Inf));
        assert!(!r.member(Card::Fin(0)));
    }

    #[test]
    fn from_generators_scaled_by_gcd() {
        let oracle = closure_oracle(&[6, 10, 15], 80);
        let r = from_generators([Card::Fin(6), Card::Fin(10), Card::Fin(15)]);
        for n in 0..=80 {
            assert_eq!(r.member(Card::Fin(n)), oracle.contains(&n), "n={n}");
        }
    }

    #[test]
    fn closure_checks() {
        let ex2 = rep(&[4], Some((6, 1)), true);
        assert!(ex2.is_closed_under_addition(ex2.default_probe_bound()));
        let not_closed = rep(&[1], None, false);
        assert!(!not_closed.is_closed_under_addition(8));
        let even = rep(&[], Some((0, 2)), false);
        assert!(even.is_closed_under_addition(20));
    }

    #[test]
    fn generators_round_trip() {
        let cases = vec![
            rep(&[], Some((2, 1)), false),
            rep(&[0], None, false),
            rep(&[4], Some((6, 1)), true),
            rep(&[], Some((0, 2)), true),
            rep(&[3, 5, 6], Some((8, 1)), false),
            rep(&[], None, true),
            rep(&[0], None, true),
        ];
        for r in cases {
            let g = r.generators().expect("closed set has generators");
            let back = from_generators(g.iter().copied());
            assert_eq!(back, r, "round trip failed for {r:?}");
            // Round-trip stability: generators ∘ from_generators is stable.
            let g2 = back.generators().unwrap();
            assert_eq!(from_generators(g2.iter().copied()), back);
        }
    }

    #[test]
    fn triple_encodings() {
        assert_eq!(SpectrumRep::Empty.to_triple(), Triple::Empty);
        // {0} is (∅, 0, 0).
        let zero = rep(&[0], None, false);
        assert_eq!(
            zero.to_triple(),
            Triple::Rep { sporadic: BTreeSet::new(), start: Card::Fin(0), period: Card::Fin(0) }
        );
        // {∞} is (∅, ∞, 0).
        let inf = rep(&[], None, true);
        assert_eq!(
            inf.to_triple(),
            Triple::Rep { sporadic: BTreeSet::new(), start: Card::Inf, period: Card::Fin(0) }
        );
        // ({4}, 6, 1) with ∞ carries ∞ in the sporadic part of the triple.
        let ex2 = rep(&[4], Some((6, 1)), true);
        assert_eq!(
            ex2.to_triple(),
            Triple::Rep {
                sporadic: [Card::Fin(4), Card::Inf].into_iter().collect(),
                start: Card::Fin(6),
                period: Card::Fin(1),
            }
        );
    }

    #[test]
    fn json_round_trip() {
        let r = rep(&[4], Some((6, 1)), true);
        let j = SpectrumJson::from(&r);
        let text = serde_json::to_string(&j).unwrap();
        assert_eq!(
            text,
            r#"{"status":"ok","sporadic":[4],"tail":{"start":6,"period":1},"infinity":true}"#
        );
        let back: SpectrumJson = serde_json::from_str(&text).unwrap();
        assert_eq!(SpectrumRep::from(back), r);
        assert_eq!(serde_json::to_string(&SpectrumJson::from(&SpectrumRep::Empty)).unwrap(), r#"{"status":"empty"}"#);
    }

    #[test]
    fn from_generators_always_closed() {
        let cases: Vec<Vec<Card>> = vec![
            vec![Card::Fin(2)],
            vec![Card::Fin(3), Card::Fin(7)],
            vec![Card::Fin(4), Card::Fin(6), Card::Inf],
            vec![Card::Fin(0), Card::Fin(5)],
            vec![Card::Fin(1)],
        ];
        for gens in cases {
            let r = from_generators(gens.iter().copied());
            assert!(
                r.is_closed_under_addition(r.default_probe_bound()),
                "not closed for {gens:?}"
            );
        }
    }
}
