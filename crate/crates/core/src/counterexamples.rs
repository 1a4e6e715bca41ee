//! Example densities that separate the axioms, for use as positive and
//! negative controls of the axiom suite.
//!
//! "Infinite at truncation `N`" means certified divergent under the counting
//! weight, or, without a certificate, an element in `(N/2, N]`; heuristic
//! decisions set the `flagged` bit of the result.
//!
//! The atom of the rich-but-not-atomless example is the union of the
//! alternating blocks `[b_{2n}, b_{2n+1}]`, `b_n = n!`. The union of all the
//! blocks `[b_n, b_{n+1}]` would be cofinite, leaving `ud_{ℕ∖B}` undefined.

use alloc::{sync::Arc, vec, vec::Vec};

use crate::densities::{relative_upper, upper_asymptotic};
use crate::ideals::{certify, Cert, WeightFn};
use crate::intset::{BlockSchedule, Registry, Schedule};
use crate::{Error, Result, SetExpr};

/// `ud` values at or below this are read as 0.
pub const ZERO_THRESHOLD: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub flagged: bool,
}

impl Evaluation {
    fn exact(value: f64) -> Self {
        Evaluation { value, flagged: false }
    }
}

/// Infinitude of `S` at truncation `N`; the second component is `true`
/// when the answer is heuristic.
pub fn infinite_at(s: &SetExpr, n: u64) -> (bool, bool) {
    match certify(s, &WeightFn::One) {
        Some((Cert::InIdeal, _)) => (false, false),
        Some((Cert::Divergent, _)) => (true, false),
        None => (s.next_in(n / 2 + 1, n).is_some(), true),
    }
}

/// 0 on finite sets, 1 on infinite ones.
pub fn zero_one(s: &SetExpr, n: u64) -> Evaluation {
    let (inf, flagged) = infinite_at(s, n);
    Evaluation { value: if inf { 1.0 } else { 0.0 }, flagged }
}

/// Evens, odds, multiples of 4 and numbers `≡ 2 (mod 4)`.
pub fn evens() -> SetExpr {
    SetExpr::Ap { first: 2, step: 2 }
}

pub fn odds() -> SetExpr {
    SetExpr::Ap { first: 1, step: 2 }
}

pub fn fours() -> SetExpr {
    SetExpr::Ap { first: 4, step: 4 }
}

pub fn twos_mod_four() -> SetExpr {
    SetExpr::Ap { first: 2, step: 4 }
}

/// Monotonicity fails, subadditivity holds: 0 on finite sets, 1 when the odd
/// part is infinite or exactly one of the two even classes is, 1/2 when only
/// both even classes are infinite.
pub fn prop1ii(s: &SetExpr, n: u64) -> Evaluation {
    let (inf, f0) = infinite_at(s, n);
    if !inf {
        return Evaluation { value: 0.0, flagged: f0 };
    }
    let part = |x: SetExpr| infinite_at(&SetExpr::inter(s.clone(), x), n);
    let (o, f1) = part(odds());
    let (e1, f2) = part(fours());
    let (e2, f3) = part(twos_mod_four());
    let value = if o || e1 != e2 { 1.0 } else if e1 && e2 { 0.5 } else { 1.0 };
    Evaluation { value, flagged: f0 || f1 || f2 || f3 }
}

/// `(1 + ud(S))/2` when `ud(S) > 0`, else 0; its range misses `(0, 1/2]`.
pub fn atomless_not_rich(s: &SetExpr, n: u64) -> Result<Evaluation> {
    if let Some((Cert::InIdeal, _)) = certify(s, &WeightFn::One) {
        return Ok(Evaluation::exact(0.0));
    }
    let ud = upper_asymptotic(s, n)?.value;
    Ok(Evaluation { value: if ud > ZERO_THRESHOLD { (1.0 + ud) / 2.0 } else { 0.0 }, flagged: true })
}

/// The atom `B = ∪ [b_{2n}, b_{2n+1}]`, `b_n = n!`.
pub fn atom() -> SetExpr {
    SetExpr::Blocks(Arc::new(BlockSchedule::new("ex3", Schedule::Example3).expect("valid name")))
}

/// Every other block of [`atom`].
pub fn atom_half() -> SetExpr {
    SetExpr::Blocks(Arc::new(BlockSchedule::new("ex3alt", Schedule::Example3Alt).expect("valid name")))
}

/// `max(δ_B(S), ud_{ℕ∖B}(S))` with `δ_B` the 0/1 threshold of `ud_B`.
pub fn rich_not_atomless(s: &SetExpr, n: u64) -> Result<Evaluation> {
    if let Some((Cert::InIdeal, _)) = certify(s, &WeightFn::One) {
        return Ok(Evaluation::exact(0.0));
    }
    let b = atom();
    let on_b = match relative_upper(s, &b, n) {
        Ok(e) => e.value,
        Err(Error::EmptyReference(_)) => 0.0,
        Err(e) => return Err(e),
    };
    let off_b = relative_upper(s, &SetExpr::compl(b), n)?.value;
    let atom_part: f64 = if on_b > ZERO_THRESHOLD { 1.0 } else { 0.0 };
    Ok(Evaluation { value: atom_part.max(off_b), flagged: true })
}

/// `A = ∪ (a_{2n}, a_{2n+1}]` with `a_n = 2^(n²)`.
pub fn prop1i_set() -> SetExpr {
    SetExpr::Blocks(Arc::new(BlockSchedule::new("prop1i", Schedule::Prop1i).expect("valid name")))
}

/// Which properties a gallery density is known to have; `None` when the
/// suite does not assert anything.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Profile {
    pub normalization: Option<bool>,
    pub finite_vanishing: Option<bool>,
    pub monotonicity: Option<bool>,
    pub subadditivity: Option<bool>,
    pub translation: Option<bool>,
    pub rich: Option<bool>,
    pub atomless: Option<bool>,
}

impl Profile {
    pub fn expects(&self, axiom: crate::axioms::Axiom) -> Option<bool> {
        use crate::axioms::Axiom::*;
        match axiom {
            Normalization => self.normalization,
            FiniteVanishing => self.finite_vanishing,
            Monotonicity => self.monotonicity,
            Subadditivity => self.subadditivity,
            Translation => self.translation,
        }
    }
}

pub type Evaluator = fn(&SetExpr, u64) -> Result<Evaluation>;

#[derive(Clone, Copy, Debug)]
pub struct NamedDensity {
    pub name: &'static str,
    pub eval: Evaluator,
    pub expected: Profile,
}

fn zero_one_eval(s: &SetExpr, n: u64) -> Result<Evaluation> {
    Ok(zero_one(s, n))
}

fn prop1ii_eval(s: &SetExpr, n: u64) -> Result<Evaluation> {
    Ok(prop1ii(s, n))
}

pub fn gallery() -> Vec<NamedDensity> {
    let all = Some(true);
    vec![
        NamedDensity {
            name: "zero_one",
            eval: zero_one_eval,
            expected: Profile {
                normalization: all,
                finite_vanishing: all,
                monotonicity: all,
                subadditivity: all,
                translation: all,
                rich: Some(false),
                atomless: Some(false),
            },
        },
        NamedDensity {
            name: "prop1ii",
            eval: prop1ii_eval,
            expected: Profile {
                normalization: all,
                finite_vanishing: all,
                monotonicity: Some(false),
                subadditivity: all,
                translation: None,
                rich: None,
                atomless: None,
            },
        },
        NamedDensity {
            name: "atomless_not_rich",
            eval: atomless_not_rich,
            expected: Profile {
                normalization: all,
                finite_vanishing: all,
                monotonicity: all,
                subadditivity: all,
                translation: all,
                rich: Some(false),
                atomless: all,
            },
        },
        NamedDensity {
            name: "rich_not_atomless",
            eval: rich_not_atomless,
            expected: Profile {
                normalization: all,
                finite_vanishing: all,
                monotonicity: all,
                subadditivity: all,
                translation: all,
                rich: all,
                atomless: Some(false),
            },
        },
    ]
}

pub fn by_name(name: &str) -> Option<NamedDensity> {
    gallery().into_iter().find(|d| d.name == name)
}

/// Sets exercising the gallery: parity classes and their mixtures, finite
/// sets, and block sets. The class `≡ 2 (mod 4)` is left out so that the
/// only non-monotone subset pair for `prop1ii` is (multiples of 4, evens).
pub fn gallery_corpus(registry: &Registry) -> Result<Vec<SetExpr>> {
    let f = SetExpr::finite([1, 2, 3])?;
    let mut out = vec![
        evens(),
        fours(),
        odds(),
        SetExpr::nat(),
        SetExpr::union(odds(), fours()),
        SetExpr::union(odds(), evens()),
        f.clone(),
        SetExpr::union(f.clone(), odds()),
        SetExpr::union(f, fours()),
        SetExpr::finite(5..=50)?,
        SetExpr::ap(3, 10)?,
        SetExpr::ap(1, 3)?,
    ];
    for name in ["ex3", "ex3alt", "cuberamp"] {
        if let Some(e) = registry.expr(name) {
            out.push(e);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const N: u64 = 1_000_000;

    #[test]
    fn zero_one_examples() {
        assert_eq!(zero_one(&SetExpr::finite([1, 2, 3]).unwrap(), N).value, 0.0);
        assert_eq!(zero_one(&SetExpr::nat(), N).value, 1.0);
        assert_eq!(zero_one(&SetExpr::ap(1_000_000, 1).unwrap(), N).value, 1.0);
    }

    #[test]
    fn prop1ii_examples() {
        assert_eq!(prop1ii(&fours(), N).value, 1.0);
        assert_eq!(prop1ii(&evens(), N).value, 0.5);
        assert_eq!(prop1ii(&odds(), N).value, 1.0);
        assert_eq!(prop1ii(&SetExpr::finite([4, 8]).unwrap(), N).value, 0.0);
    }

    #[test]
    fn atomless_examples() {
        assert_eq!(atomless_not_rich(&SetExpr::nat(), N).unwrap().value, 1.0);
        assert!((atomless_not_rich(&evens(), N).unwrap().value - 0.75).abs() < 1e-9);
        // ud(squares) ≈ 1/√N exceeds the threshold until N is about 10⁶.
        let sq = SetExpr::enumerator(crate::Enumerator::Squares);
        assert!(atomless_not_rich(&sq, N).unwrap().value > 0.5);
        assert_eq!(atomless_not_rich(&sq, 4_000_000).unwrap().value, 0.0);
    }

    #[test]
    fn atom_examples() {
        assert_eq!(rich_not_atomless(&atom(), N).unwrap().value, 1.0);
        assert_eq!(rich_not_atomless(&atom_half(), N).unwrap().value, 1.0);
        assert_eq!(rich_not_atomless(&SetExpr::finite([1, 2, 3]).unwrap(), N).unwrap().value, 0.0);
        let v = rich_not_atomless(&evens(), N).unwrap().value;
        assert!((v - 1.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn prop1i_shape() {
        let a = prop1i_set();
        assert!(a.contains(17) && a.contains(512) && !a.contains(513) && !a.contains(16));
    }
}
