//! Summable ideals `I_f = {A : Σ_{a∈A} f(a) < ∞}`: weights, membership
//! diagnostics, translated almost-disjointness, and the diagonal set of a
//! decreasing chain.
//!
//! The chain passed to [`dip_diagonal`] is decreasing in the sense
//! `B_{n+1} ⊆_I B_n`, i.e. `B_{n+1} ∖ B_n ∈ I`. The usual write-up of the
//! diagonal argument states the difference the other way round; the
//! orientation used here is the one the definition requires.

use alloc::{format, string::String, sync::Arc, vec::Vec};

use crate::intset::{Enumerator, Schedule, SetExpr};
use crate::numeric::CompensatedSum;
use crate::{Error, Result};

/// Outcome of a structural membership proof.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cert {
    InIdeal,
    Divergent,
}

/// A non-increasing weight with divergent series.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightFn {
    /// `f ≡ 1`; the ideal of finite sets.
    One,
    /// `f(n) = 1/n`.
    Reciprocal,
    /// Tabulated values `f(1), f(2), ...`; the last value repeats forever.
    Table { name: String, values: Arc<[f64]> },
}

impl WeightFn {
    /// Validates a tabulated weight: finite, positive, non-increasing.
    pub fn table(name: &str, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("weight table is empty".into()));
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidArgument(format!("weight f({}) = {v} is not positive", i + 1)));
            }
            if i > 0 && v > values[i - 1] {
                return Err(Error::InvalidArgument(format!("weight increases at n = {}", i + 1)));
            }
        }
        Ok(WeightFn::Table { name: name.into(), values: values.into() })
    }

    pub fn name(&self) -> &str {
        match self {
            WeightFn::One => "one",
            WeightFn::Reciprocal => "reciprocal",
            WeightFn::Table { name, .. } => name,
        }
    }

    /// `f(n)` for `n ≥ 1`.
    pub fn eval(&self, n: u64) -> f64 {
        match self {
            WeightFn::One => 1.0,
            WeightFn::Reciprocal => 1.0 / n.max(1) as f64,
            WeightFn::Table { values, .. } => {
                let i = (n.max(1) - 1).min(values.len() as u64 - 1);
                values[i as usize]
            }
        }
    }

    /// Number of explicitly tabulated points, if any.
    pub fn tabulated_len(&self) -> Option<u64> {
        match self {
            WeightFn::Table { values, .. } => Some(values.len() as u64),
            _ => None,
        }
    }

    /// Checks monotonicity on `[1, upto]`.
    pub fn is_non_increasing(&self, upto: u64) -> bool {
        (2..=upto).all(|n| self.eval(n) <= self.eval(n - 1))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    InIdealCertified,
    DivergesCertified,
    InIdealHeuristic,
    DivergesHeuristic,
    Unknown,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::InIdealCertified => "in_ideal_certified",
            Verdict::DivergesCertified => "diverges_certified",
            Verdict::InIdealHeuristic => "in_ideal_heuristic",
            Verdict::DivergesHeuristic => "diverges_heuristic",
            Verdict::Unknown => "unknown",
        }
    }

    pub fn in_ideal(&self) -> bool {
        matches!(self, Verdict::InIdealCertified | Verdict::InIdealHeuristic)
    }

    pub fn diverges(&self) -> bool {
        matches!(self, Verdict::DivergesCertified | Verdict::DivergesHeuristic)
    }

    pub fn certified(&self) -> bool {
        matches!(self, Verdict::InIdealCertified | Verdict::DivergesCertified)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdealVerdict {
    pub verdict: Verdict,
    pub partial_sum: f64,
    pub milestones_hit: u64,
    pub evidence: String,
}

/// Milestone count above which a partial sum is read as divergent.
pub const HEURISTIC_MILESTONES: u64 = 3;

/// Tail mass, relative to the milestone, below which a set is read as
/// belonging to the ideal.
pub const HEURISTIC_TAIL_FRACTION: f64 = 1e-3;

fn both<T>(a: Option<T>, b: Option<T>) -> Option<(T, T)> {
    Some((a?, b?))
}

fn union_rule(a: Option<Cert>, b: Option<Cert>) -> Option<Cert> {
    match (a, b) {
        (Some(Cert::Divergent), _) | (_, Some(Cert::Divergent)) => Some(Cert::Divergent),
        (Some(Cert::InIdeal), Some(Cert::InIdeal)) => Some(Cert::InIdeal),
        _ => None,
    }
}

fn leaf_enum(e: &Enumerator, w: &WeightFn) -> Option<(Cert, &'static str)> {
    match w {
        WeightFn::One => Some((Cert::Divergent, "infinite enumerated set")),
        WeightFn::Reciprocal => Some(match e {
            Enumerator::Squares => (Cert::InIdeal, "comparison with the convergent series of n^-2"),
            Enumerator::Factorial => (Cert::InIdeal, "n! >= 2^(n-1): comparison with a geometric series"),
            Enumerator::Pow2Sq => (Cert::InIdeal, "2^(n^2) >= 2^n: comparison with a geometric series"),
            Enumerator::PhiLogLog(_) => {
                (Cert::Divergent, "n log log n <= n log n and the series of 1/(n log n) diverges")
            }
        }),
        WeightFn::Table { .. } => None,
    }
}

/// Structural membership certificate for `S` in `I_f`, with the rule that
/// decided it at the root.
pub fn certify(s: &SetExpr, w: &WeightFn) -> Option<(Cert, &'static str)> {
    match s {
        SetExpr::Finite(_) => Some((Cert::InIdeal, "finite set")),
        SetExpr::Ap { .. } => {
            Some((Cert::Divergent, "arithmetic progression: its f-mass bounds a tail of the f-series"))
        }
        SetExpr::Enum(e) => leaf_enum(e, w),
        SetExpr::Blocks(b) => match b.schedule() {
            Schedule::Table(t) => t.cert(w.name()).map(|c| (c, "certificate attached to the table")),
            _ => match w {
                WeightFn::One => Some((Cert::Divergent, "infinitely many nonempty blocks")),
                WeightFn::Reciprocal => {
                    Some((Cert::Divergent, "harmonic mass of the blocks is bounded below"))
                }
                WeightFn::Table { .. } => None,
            },
        },
        SetExpr::Union(a, b) => {
            union_rule(certify(a, w).map(|c| c.0), certify(b, w).map(|c| c.0)).map(|c| (c, "union rule"))
        }
        SetExpr::Inter(a, b) => certify_inter(a, b, w),
        SetExpr::Diff(a, b) => {
            let ca = certify(a, w);
            if matches!(ca, Some((Cert::InIdeal, _))) {
                return Some((Cert::InIdeal, "subset of a set in the ideal"));
            }
            if b.is_cofinite() {
                return Some((Cert::InIdeal, "difference with a cofinite set is finite"));
            }
            match certify(b, w) {
                Some((Cert::InIdeal, _)) => ca.map(|c| (c.0, "removing an ideal set keeps the verdict")),
                _ => None,
            }
        }
        SetExpr::Compl(a) => {
            if let SetExpr::Compl(inner) = &**a {
                return certify(inner, w);
            }
            if a.is_cofinite() {
                return Some((Cert::InIdeal, "complement of a cofinite set"));
            }
            match certify(a, w) {
                Some((Cert::InIdeal, _)) => Some((Cert::Divergent, "complement of a set in the ideal")),
                _ => None,
            }
        }
        SetExpr::Shift(a, _) => certify(a, w).map(|c| (c.0, "the ideal is translation invariant")),
    }
}

fn certify_inter(a: &SetExpr, b: &SetExpr, w: &WeightFn) -> Option<(Cert, &'static str)> {
    for (x, y) in [(a, b), (b, a)] {
        if let SetExpr::Union(p, q) = y {
            let l = certify_inter(x, p, w).map(|c| c.0);
            let r = certify_inter(x, q, w).map(|c| c.0);
            return union_rule(l, r).map(|c| (c, "intersection distributed over a union"));
        }
    }
    let ca = certify(a, w);
    let cb = certify(b, w);
    if matches!(ca, Some((Cert::InIdeal, _))) || matches!(cb, Some((Cert::InIdeal, _))) {
        return Some((Cert::InIdeal, "subset of a set in the ideal"));
    }
    if a.is_cofinite() {
        return cb.map(|c| (c.0, "intersection with a cofinite set"));
    }
    if b.is_cofinite() {
        return ca.map(|c| (c.0, "intersection with a cofinite set"));
    }
    if let Some(((ta, ka), (tb, kb))) = both(a.member_tag(), b.member_tag()) {
        if ta.family == tb.family && ta.verified && tb.verified {
            if !ta.same_branch(tb) || ka != kb {
                return Some((
                    Cert::InIdeal,
                    "translates of members of a verified almost-disjoint family meet finitely",
                ));
            }
            if ta.exact {
                return cb.map(|c| (c.0, "subset of a family member"));
            }
            if tb.exact {
                return ca.map(|c| (c.0, "subset of a family member"));
            }
        }
    }
    None
}

/// Both halves when `e` is a union, possibly under translations.
fn split_union(e: &SetExpr) -> Option<(SetExpr, SetExpr)> {
    match e {
        SetExpr::Union(p, q) => Some(((**p).clone(), (**q).clone())),
        SetExpr::Shift(inner, k) => {
            split_union(inner).map(|(p, q)| (SetExpr::shift(p, *k), SetExpr::shift(q, *k)))
        }
        _ => None,
    }
}

/// `S` with the parts accepted by `in_ideal` removed; the result differs
/// from `S` by a finite union of accepted sets. `None` when nothing is left.
fn strip<P: Fn(&SetExpr) -> bool>(s: &SetExpr, in_ideal: &P) -> Option<SetExpr> {
    if in_ideal(s) {
        return None;
    }
    let joined = |x: Option<SetExpr>, y: Option<SetExpr>| match (x, y) {
        (Some(x), Some(y)) => Some(SetExpr::union(x, y)),
        (x, y) => x.or(y),
    };
    if let Some((p, q)) = split_union(s) {
        return joined(strip(&p, in_ideal), strip(&q, in_ideal));
    }
    if let SetExpr::Inter(a, b) = s {
        for (x, y) in [(a, b), (b, a)] {
            if let Some((p, q)) = split_union(y) {
                let left = SetExpr::inter((**x).clone(), p);
                let right = SetExpr::inter((**x).clone(), q);
                return joined(strip(&left, in_ideal), strip(&right, in_ideal));
            }
        }
    }
    Some(s.clone())
}

/// `S` with its parts certified in `I_f` removed.
pub fn residual(s: &SetExpr, w: &WeightFn) -> Option<SetExpr> {
    strip(s, &|e: &SetExpr| matches!(certify(e, w), Some((Cert::InIdeal, _))))
}

/// `S` with every part that [`membership_diagnose`] places in `I_f`
/// (certified or heuristic) removed.
pub fn diagnosed_residual(s: &SetExpr, w: &WeightFn, n: u64, milestone: f64) -> Option<SetExpr> {
    strip(s, &|e: &SetExpr| membership_diagnose(w, e, n, milestone).verdict.in_ideal())
}

/// Diagnoses `S ∈ I_f` at truncation `N`.
///
/// Without a certificate for `S`, parts of `S` certified in the ideal are
/// dropped first; the heuristic then reads the partial sum of what remains.
pub fn membership_diagnose(w: &WeightFn, s: &SetExpr, n: u64, milestone: f64) -> IdealVerdict {
    let mass = |e: &SetExpr| {
        let mut total = CompensatedSum::default();
        let mut tail = CompensatedSum::default();
        for a in e.iter_range(1, n) {
            let v = w.eval(a);
            total.add(v);
            if a > n / 2 {
                tail.add(v);
            }
        }
        (total.value(), tail.value())
    };
    let (p, t) = mass(s);
    let hits_of = |p: f64| if milestone > 0.0 { libm::floor(p / milestone) as u64 } else { 0 };
    let mut hits = hits_of(p);
    let (verdict, evidence) = match certify(s, w) {
        Some((Cert::InIdeal, why)) => (Verdict::InIdealCertified, String::from(why)),
        Some((Cert::Divergent, why)) => (Verdict::DivergesCertified, String::from(why)),
        None => match residual(s, w) {
            None => (Verdict::InIdealCertified, String::from("every part is certified in the ideal")),
            Some(r) => match certify(&r, w) {
                Some((Cert::Divergent, why)) => {
                    (Verdict::DivergesCertified, format!("after dropping parts in the ideal: {why}"))
                }
                _ => {
                    let (rp, rt) = if r == *s { (p, t) } else { mass(&r) };
                    hits = hits_of(rp);
                    if hits > HEURISTIC_MILESTONES {
                        (
                            Verdict::DivergesHeuristic,
                            format!("{hits} milestones of {milestone} passed and mass {rt:.3e} above N/2"),
                        )
                    } else if rt < HEURISTIC_TAIL_FRACTION * milestone {
                        (Verdict::InIdealHeuristic, format!("mass {rt:.3e} above N/2 is negligible"))
                    } else {
                        (Verdict::Unknown, format!("{hits} milestones passed, mass {rt:.3e} above N/2"))
                    }
                }
            },
        },
    };
    IdealVerdict { verdict, partial_sum: p, milestones_hit: hits, evidence }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TadOutcome {
    Tad,
    NotTad,
    Unknown,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TadReport {
    pub per_shift: Vec<(i64, IdealVerdict)>,
    pub outcome: TadOutcome,
}

/// Checks `(A + k) ∩ B ∈ I_f` for every `|k| ≤ K`.
pub fn is_tad_pair(w: &WeightFn, a: &SetExpr, b: &SetExpr, k_max: u64, n: u64) -> TadReport {
    let k_max = k_max as i64;
    let mut per_shift = Vec::with_capacity(2 * k_max as usize + 1);
    for k in -k_max..=k_max {
        let shifted = if k == 0 { a.clone() } else { SetExpr::shift(a.clone(), k) };
        let v = membership_diagnose(w, &SetExpr::inter(shifted, b.clone()), n, 1.0);
        per_shift.push((k, v));
    }
    let outcome = if per_shift.iter().any(|(_, v)| v.verdict.diverges()) {
        TadOutcome::NotTad
    } else if per_shift.iter().all(|(_, v)| v.verdict.in_ideal()) {
        TadOutcome::Tad
    } else {
        TadOutcome::Unknown
    };
    TadReport { per_shift, outcome }
}

/// Default number of candidates scanned per diagonal stage.
pub const DIP_SCAN_BOUND: u64 = 100_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct DipResult {
    pub elements: Vec<u64>,
    /// `n(s)`: number of elements chosen through stage `s` (1-based stages).
    pub stage_ends: Vec<usize>,
    pub stage_sums: Vec<f64>,
}

impl DipResult {
    /// Stage (1-based) at which element `i` was chosen.
    pub fn stage_of(&self, i: usize) -> usize {
        self.stage_ends.partition_point(|&end| end <= i) + 1
    }

    /// `Σ_{i ≤ n(t)} f(a_i) ≥ t` for every stage `t`, up to `tol`.
    pub fn milestones_hold(&self, w: &WeightFn, tol: f64) -> bool {
        let mut acc = CompensatedSum::default();
        let mut next = 0usize;
        for (t, &end) in self.stage_ends.iter().enumerate() {
            while next < end {
                acc.add(w.eval(self.elements[next]));
                next += 1;
            }
            if acc.value() < (t + 1) as f64 - tol {
                return false;
            }
        }
        true
    }
}

/// Chooses `a_1 < a_2 < ...` stage by stage from `B_1 ∩ ... ∩ B_s` until each
/// stage carries f-mass at least 1. Chains shorter than `stages` reuse their
/// full intersection for the remaining stages.
pub fn dip_diagonal(w: &WeightFn, chain: &[SetExpr], stages: usize, scan_bound: u64) -> Result<DipResult> {
    if chain.is_empty() {
        return Err(Error::InvalidArgument("the chain is empty".into()));
    }
    let mut elements = Vec::new();
    let mut stage_ends = Vec::with_capacity(stages);
    let mut stage_sums = Vec::with_capacity(stages);
    let mut next = 1u64;
    for s in 1..=stages {
        let upto = s.min(chain.len());
        let meet = chain[1..upto]
            .iter()
            .fold(chain[0].clone(), |acc, b| SetExpr::inter(acc, b.clone()));
        let start = next;
        let limit = start.saturating_add(scan_bound.saturating_sub(1));
        let mut mass = CompensatedSum::default();
        while mass.value() < 1.0 {
            match meet.next_in(next, limit) {
                Some(x) => {
                    mass.add(w.eval(x));
                    elements.push(x);
                    next = x + 1;
                }
                None => return Err(Error::DipStage { stage: s, mass: mass.value() }),
            }
        }
        stage_ends.push(elements.len());
        stage_sums.push(mass.value());
    }
    Ok(DipResult { elements, stage_ends, stage_sums })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intset::{parse, Registry};
    use alloc::vec;

    fn p(s: &str) -> SetExpr {
        parse(s, &Registry::with_builtins()).unwrap()
    }

    #[test]
    fn certified_parts_are_dropped_before_the_heuristic() {
        let s = p("union({1,2,3,4,5,6,7,8,9,10},inter(ap(2,2),ap(1,2)))");
        let v = membership_diagnose(&WeightFn::One, &s, 10_000, 1.0);
        assert_eq!(v.verdict, Verdict::InIdealHeuristic);
        assert_eq!(v.partial_sum, 10.0);
        let grown = p("inter(shift(union({4,9},ap(3,3)),2),ap(1,1))");
        assert_eq!(membership_diagnose(&WeightFn::One, &grown, 1000, 1.0).verdict, Verdict::DivergesCertified);
    }

    fn harmonic(n: u64) -> f64 {
        let mut s = CompensatedSum::default();
        for k in 1..=n {
            s.add(1.0 / k as f64);
        }
        s.value()
    }

    #[test]
    fn squares_are_certified_in_rcp() {
        let v = membership_diagnose(&WeightFn::Reciprocal, &p("squares"), 1_000_000, 1.0);
        assert_eq!(v.verdict, Verdict::InIdealCertified);
        // Σ_{k ≤ 1000} k⁻² by direct summation.
        let oracle: f64 = (1..=1000u64).map(|k| 1.0 / (k * k) as f64).sum();
        assert!((v.partial_sum - oracle).abs() < 1e-12);
    }

    #[test]
    fn fin_diverges_once_the_count_passes_three() {
        let w = WeightFn::One;
        let three = membership_diagnose(&w, &p("inter(ap(1,1),{1,2,3})"), 100, 1.0);
        assert!(three.verdict.in_ideal());
        let many = membership_diagnose(&w, &p("inter(ap(2,2),compl({}))"), 100, 1.0);
        assert!(many.verdict.diverges());
        assert_eq!(many.milestones_hit, 50);
    }

    #[test]
    fn harmonic_progression_partial_sum() {
        let v = membership_diagnose(&WeightFn::Reciprocal, &SetExpr::nat(), 1_000_000, 1.0);
        assert!(v.verdict.diverges());
        assert!((v.partial_sum - harmonic(1_000_000)).abs() < 1e-12);
        assert_eq!(v.milestones_hit, 14);
    }

    #[test]
    fn tad_pair_examples() {
        let r = is_tad_pair(&WeightFn::One, &p("ap(2,2)"), &p("ap(4,4)"), 0, 10_000);
        assert_eq!(r.outcome, TadOutcome::NotTad);
        let r = is_tad_pair(&WeightFn::One, &p("{1,5}"), &p("ap(1,1)"), 3, 10_000);
        assert_eq!(r.outcome, TadOutcome::Tad);
        assert_eq!(r.per_shift.len(), 7);
    }

    #[test]
    fn complement_and_difference_rules() {
        let w = WeightFn::Reciprocal;
        assert_eq!(certify(&p("compl(squares)"), &w).unwrap().0, Cert::Divergent);
        assert_eq!(certify(&p("compl(compl(squares))"), &w).unwrap().0, Cert::InIdeal);
        assert_eq!(certify(&p("diff(squares,ap(2,2))"), &w).unwrap().0, Cert::InIdeal);
        assert_eq!(certify(&p("diff(ap(3,3),squares)"), &w).unwrap().0, Cert::Divergent);
        assert_eq!(certify(&p("inter(ap(1,1),philoglog(15))"), &w).unwrap().0, Cert::Divergent);
        assert_eq!(certify(&p("compl(ap(2,1))"), &w).unwrap().0, Cert::InIdeal);
        assert!(certify(&p("inter(ap(2,2),ap(3,3))"), &w).is_none());
    }

    #[test]
    fn dip_on_constant_chain_under_fin() {
        let r = dip_diagonal(&WeightFn::One, &[SetExpr::nat()], 3, DIP_SCAN_BOUND).unwrap();
        assert_eq!(r.elements, vec![1, 2, 3]);
        assert_eq!(r.stage_ends, vec![1, 2, 3]);
    }

    #[test]
    fn dip_on_tails_of_nat() {
        let chain: Vec<SetExpr> = (1..=2).map(|n| SetExpr::ap(n, 1).unwrap()).collect();
        let r = dip_diagonal(&WeightFn::Reciprocal, &chain, 2, DIP_SCAN_BOUND).unwrap();
        let total: f64 = r.elements.iter().map(|&a| 1.0 / a as f64).sum();
        assert!(total >= 2.0);
        assert!(r.milestones_hold(&WeightFn::Reciprocal, 1e-9));
    }

    #[test]
    fn dip_on_dyadic_progressions() {
        let chain: Vec<SetExpr> = (1..=2).map(|n| SetExpr::ap(1 << n, 1 << n).unwrap()).collect();
        let r = dip_diagonal(&WeightFn::Reciprocal, &chain, 2, DIP_SCAN_BOUND).unwrap();
        assert_eq!(&r.elements[..r.stage_ends[0]], &[2, 4, 6, 8]);
        let outside = r.elements.iter().filter(|&&a| !chain[1].contains(a)).count();
        assert!(outside <= r.stage_ends[0]);
        for (i, &a) in r.elements.iter().enumerate() {
            if r.stage_of(i) >= 2 {
                assert!(chain[1].contains(a));
            }
        }
    }

    #[test]
    fn dip_reports_the_failing_stage() {
        let chain = [p("{1,2}")];
        let err = dip_diagonal(&WeightFn::Reciprocal, &chain, 2, 1000).unwrap_err();
        assert!(matches!(err, Error::DipStage { stage: 2, .. }));
    }

    #[test]
    fn tables_validate_monotonicity() {
        assert!(WeightFn::table("t", vec![1.0, 0.5, 0.5]).is_ok());
        assert!(WeightFn::table("t", vec![1.0, 2.0]).is_err());
        assert!(WeightFn::table("t", vec![1.0, 0.0]).is_err());
        let t = WeightFn::table("t", vec![1.0, 0.5]).unwrap();
        assert_eq!(t.eval(7), 0.5);
        assert!(WeightFn::Reciprocal.is_non_increasing(100_000));
    }
}
