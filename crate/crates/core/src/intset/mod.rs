//! Lazy subsets of ℕ = {1, 2, ...} with exact counting.

mod blocks;
mod enumerator;
mod parse;

use alloc::{sync::Arc, vec::Vec};

pub use blocks::{BlockSchedule, MemberTag, Schedule, Table};
pub use enumerator::{phi, Enumerator, PHILOGLOG_MIN_OFFSET, PHI_ARG_LIMIT};
pub use parse::{parse, Registry};

use crate::{Error, Result};

/// Candidate budget for [`SetExpr::enumerate`] on expressions that scan.
pub const ENUMERATE_SCAN_LIMIT: u64 = 100_000_000;

/// An immutable subset of ℕ. Cloning is cheap; subtrees are shared.
#[derive(Clone, Debug, PartialEq)]
pub enum SetExpr {
    /// Sorted, deduplicated, all elements `≥ 1`.
    Finite(Arc<[u64]>),
    /// `{first, first + step, ...}` restricted to ℕ.
    Ap { first: u64, step: u64 },
    Enum(Enumerator),
    Blocks(Arc<BlockSchedule>),
    Union(Arc<SetExpr>, Arc<SetExpr>),
    Inter(Arc<SetExpr>, Arc<SetExpr>),
    Diff(Arc<SetExpr>, Arc<SetExpr>),
    Compl(Arc<SetExpr>),
    /// Rightward translation for `k > 0`, leftward for `k < 0`.
    Shift(Arc<SetExpr>, i64),
}

impl SetExpr {
    pub fn finite<I: IntoIterator<Item = u64>>(items: I) -> Result<Self> {
        let mut v: Vec<u64> = items.into_iter().collect();
        if v.contains(&0) {
            return Err(Error::InvalidArgument("0 is not a natural number here".into()));
        }
        v.sort_unstable();
        v.dedup();
        Ok(SetExpr::Finite(v.into()))
    }

    pub fn ap(first: u64, step: u64) -> Result<Self> {
        if step == 0 {
            return Err(Error::InvalidArgument("progression step must be at least 1".into()));
        }
        Ok(SetExpr::Ap { first, step })
    }

    /// All of ℕ.
    pub fn nat() -> Self {
        SetExpr::Ap { first: 1, step: 1 }
    }

    pub fn enumerator(e: Enumerator) -> Self {
        SetExpr::Enum(e)
    }

    pub fn blocks(s: Arc<BlockSchedule>) -> Self {
        SetExpr::Blocks(s)
    }

    pub fn union(a: SetExpr, b: SetExpr) -> Self {
        SetExpr::Union(Arc::new(a), Arc::new(b))
    }

    pub fn inter(a: SetExpr, b: SetExpr) -> Self {
        SetExpr::Inter(Arc::new(a), Arc::new(b))
    }

    pub fn diff(a: SetExpr, b: SetExpr) -> Self {
        SetExpr::Diff(Arc::new(a), Arc::new(b))
    }

    pub fn compl(a: SetExpr) -> Self {
        SetExpr::Compl(Arc::new(a))
    }

    pub fn shift(a: SetExpr, k: i64) -> Self {
        SetExpr::Shift(Arc::new(a), k)
    }

    /// Membership of `n`; always false for `n = 0`.
    pub fn contains(&self, n: u64) -> bool {
        if n == 0 {
            return false;
        }
        match self {
            SetExpr::Finite(v) => v.binary_search(&n).is_ok(),
            SetExpr::Ap { first, step } => n >= *first && (n - first).is_multiple_of(*step),
            SetExpr::Enum(e) => {
                let i = e.count_le(n);
                i > 0 && e.gen(i) == Some(n)
            }
            SetExpr::Blocks(s) => s.contains(n),
            SetExpr::Union(a, b) => a.contains(n) || b.contains(n),
            SetExpr::Inter(a, b) => a.contains(n) && b.contains(n),
            SetExpr::Diff(a, b) => a.contains(n) && !b.contains(n),
            SetExpr::Compl(a) => !a.contains(n),
            SetExpr::Shift(a, k) => match shift_back(n, *k) {
                Some(m) => a.contains(m),
                None => false,
            },
        }
    }

    /// Smallest element in `[lo, hi]`.
    pub fn next_in(&self, lo: u64, hi: u64) -> Option<u64> {
        let lo = lo.max(1);
        if lo > hi {
            return None;
        }
        match self {
            SetExpr::Finite(v) => {
                let i = v.partition_point(|&x| x < lo);
                v.get(i).copied().filter(|&x| x <= hi)
            }
            SetExpr::Ap { first, step } => {
                let c = if lo <= *first {
                    *first
                } else {
                    let j = (lo - first).div_ceil(*step);
                    first.checked_add(j.checked_mul(*step)?)?
                };
                (c <= hi).then_some(c)
            }
            SetExpr::Enum(e) => {
                let v = e.gen(e.count_le(lo - 1) + 1)?;
                (v <= hi).then_some(v)
            }
            SetExpr::Blocks(s) => s.next_in(lo, hi),
            SetExpr::Union(a, b) => match (a.next_in(lo, hi), b.next_in(lo, hi)) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, y) => x.or(y),
            },
            SetExpr::Inter(a, b) => {
                let mut x = lo;
                loop {
                    let p = a.next_in(x, hi)?;
                    let q = b.next_in(p, hi)?;
                    if p == q {
                        return Some(p);
                    }
                    x = q;
                }
            }
            SetExpr::Diff(a, b) => {
                let mut x = lo;
                loop {
                    let p = a.next_in(x, hi)?;
                    if !b.contains(p) {
                        return Some(p);
                    }
                    x = b.next_absent(p, hi)?;
                }
            }
            SetExpr::Compl(a) => a.next_absent(lo, hi),
            SetExpr::Shift(a, k) => {
                let (l2, h2) = shift_range_back(lo, hi, *k)?;
                let y = a.next_in(l2, h2)?;
                shift_forward(y, *k)
            }
        }
    }

    /// Smallest `x ∈ [lo, hi]` that is not a member.
    pub fn next_absent(&self, lo: u64, hi: u64) -> Option<u64> {
        let lo = lo.max(1);
        if lo > hi {
            return None;
        }
        match self {
            SetExpr::Blocks(s) => s.next_absent(lo, hi),
            SetExpr::Ap { first, step: 1 } => {
                let x = if lo < *first { lo } else { return None };
                (x <= hi).then_some(x)
            }
            SetExpr::Compl(a) => a.next_in(lo, hi),
            // Runs of members are skipped a run at a time.
            SetExpr::Union(a, b) => {
                let mut x = lo;
                loop {
                    x = a.next_absent(x, hi)?;
                    if !b.contains(x) {
                        return Some(x);
                    }
                    x = b.next_absent(x, hi)?;
                    if !a.contains(x) {
                        return Some(x);
                    }
                }
            }
            SetExpr::Inter(a, b) => min_some(a.next_absent(lo, hi), b.next_absent(lo, hi)),
            SetExpr::Diff(a, b) => min_some(a.next_absent(lo, hi), b.next_in(lo, hi)),
            SetExpr::Shift(a, k) => {
                if *k > 0 && lo <= *k as u64 {
                    return Some(lo);
                }
                let (l2, h2) = shift_range_back(lo, hi, *k)?;
                a.next_absent(l2, h2).and_then(|y| shift_forward(y, *k))
            }
            _ => {
                let mut x = lo;
                loop {
                    if !self.contains(x) {
                        return Some(x);
                    }
                    if x == hi {
                        return None;
                    }
                    x += 1;
                }
            }
        }
    }

    /// `|S ∩ [a, b]|`, exact.
    pub fn count(&self, a: u64, b: u64) -> Result<u64> {
        if a > b {
            return Err(Error::EmptyRange { a, b });
        }
        Ok(self.count_unchecked(a.max(1), b))
    }

    /// `S(n) = |S ∩ [1, n]|`; zero for `n = 0`.
    pub fn count_upto(&self, n: u64) -> u64 {
        if n == 0 {
            0
        } else {
            self.count_unchecked(1, n)
        }
    }

    fn count_unchecked(&self, a: u64, b: u64) -> u64 {
        if a > b {
            return 0;
        }
        match self {
            SetExpr::Finite(v) => {
                (v.partition_point(|&x| x <= b) - v.partition_point(|&x| x < a)) as u64
            }
            SetExpr::Ap { first, step } => {
                let upto = |x: u64| -> u64 {
                    if x < *first || x == 0 {
                        0
                    } else {
                        // Elements first + j·step ≤ x, dropping 0 when first = 0.
                        (x - first) / step + 1 - u64::from(*first == 0)
                    }
                };
                upto(b) - upto(a - 1)
            }
            SetExpr::Enum(e) => e.count_le(b) - e.count_le(a - 1),
            SetExpr::Blocks(s) => s.count(a, b),
            SetExpr::Compl(x) => (b - a + 1) - x.count_unchecked(a, b),
            SetExpr::Shift(x, k) => match shift_range_back(a, b, *k) {
                Some((l2, h2)) => x.count_unchecked(l2, h2),
                None => 0,
            },
            SetExpr::Union(..) | SetExpr::Inter(..) | SetExpr::Diff(..) => {
                self.iter_range(a, b).count() as u64
            }
        }
    }

    /// Members of `[a, b]` in increasing order.
    pub fn iter_range(&self, a: u64, b: u64) -> RangeIter<'_> {
        RangeIter { set: self, next: a.max(1), hi: b, done: a.max(1) > b }
    }

    /// The first `limit` elements, or fewer when the set is finite.
    pub fn enumerate(&self, limit: usize) -> Result<Vec<u64>> {
        let bound = self.max_bound();
        let scans = self.scans();
        let mut out = Vec::with_capacity(limit.min(1 << 16));
        let mut x = 1u64;
        while out.len() < limit {
            let hard = bound.unwrap_or(u64::MAX);
            let hi = if scans && bound.is_none() {
                hard.min(x.saturating_add(ENUMERATE_SCAN_LIMIT - 1))
            } else {
                hard
            };
            match self.next_in(x, hi) {
                Some(y) => {
                    out.push(y);
                    match y.checked_add(1) {
                        Some(n) => x = n,
                        None => break,
                    }
                }
                None if hi == hard => break,
                None => return Err(Error::ScanExhausted { from: x, scanned: ENUMERATE_SCAN_LIMIT }),
            }
        }
        Ok(out)
    }

    /// An upper bound on the elements when the set is structurally finite.
    pub fn max_bound(&self) -> Option<u64> {
        match self {
            SetExpr::Finite(v) => Some(v.last().copied().unwrap_or(0)),
            SetExpr::Ap { .. } | SetExpr::Enum(_) | SetExpr::Compl(_) => None,
            SetExpr::Blocks(s) => match s.schedule() {
                // Tagged tables are prefixes of infinite family members.
                Schedule::Table(t) if t.tag.is_none() => Some(s.max_element().unwrap_or(0)),
                _ => None,
            },
            SetExpr::Union(a, b) => Some(a.max_bound()?.max(b.max_bound()?)),
            SetExpr::Inter(a, b) => match (a.max_bound(), b.max_bound()) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, y) => x.or(y),
            },
            SetExpr::Diff(a, _) => a.max_bound(),
            SetExpr::Shift(a, k) => {
                let m = a.max_bound()?;
                Some(if *k >= 0 {
                    m.saturating_add(*k as u64)
                } else {
                    m.saturating_sub(k.unsigned_abs())
                })
            }
        }
    }

    /// True when the complement is structurally finite.
    pub fn is_cofinite(&self) -> bool {
        match self {
            SetExpr::Ap { step: 1, .. } => true,
            SetExpr::Compl(a) => a.max_bound().is_some(),
            SetExpr::Union(a, b) => a.is_cofinite() || b.is_cofinite(),
            SetExpr::Inter(a, b) => a.is_cofinite() && b.is_cofinite(),
            SetExpr::Diff(a, b) => a.is_cofinite() && b.max_bound().is_some(),
            SetExpr::Shift(a, _) => a.is_cofinite(),
            _ => false,
        }
    }

    /// Whether enumeration may need to test candidates one at a time.
    fn scans(&self) -> bool {
        match self {
            SetExpr::Inter(..) | SetExpr::Diff(..) | SetExpr::Compl(_) => true,
            SetExpr::Union(a, b) => a.scans() || b.scans(),
            SetExpr::Shift(a, _) => a.scans(),
            _ => false,
        }
    }

    /// Peels nested shifts: the innermost expression and the net offset.
    pub fn unshifted(&self) -> (&SetExpr, i64) {
        let mut cur = self;
        let mut k = 0i64;
        while let SetExpr::Shift(inner, s) = cur {
            k += s;
            cur = inner;
        }
        (cur, k)
    }

    /// The member tag of a (possibly shifted) tagged table.
    pub fn member_tag(&self) -> Option<(&MemberTag, i64)> {
        let (base, k) = self.unshifted();
        match base {
            SetExpr::Blocks(s) => s.table()?.tag.as_ref().map(|t| (t, k)),
            _ => None,
        }
    }
}

/// Preimage of `n` under translation by `k`.
fn min_some(x: Option<u64>, y: Option<u64>) -> Option<u64> {
    match (x, y) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    }
}

fn shift_back(n: u64, k: i64) -> Option<u64> {
    if k >= 0 {
        n.checked_sub(k as u64).filter(|&m| m >= 1)
    } else {
        n.checked_add(k.unsigned_abs())
    }
}

fn shift_forward(y: u64, k: i64) -> Option<u64> {
    if k >= 0 {
        y.checked_add(k as u64)
    } else {
        y.checked_sub(k.unsigned_abs()).filter(|&m| m >= 1)
    }
}

/// Preimage of `[lo, hi]` (with `lo ≥ 1`) under translation by `k`.
fn shift_range_back(lo: u64, hi: u64, k: i64) -> Option<(u64, u64)> {
    if k >= 0 {
        let k = k as u64;
        let h2 = hi.checked_sub(k).filter(|&h| h >= 1)?;
        Some((lo.saturating_sub(k).max(1), h2))
    } else {
        let m = k.unsigned_abs();
        Some((lo.checked_add(m)?, hi.saturating_add(m)))
    }
}

/// Increasing iterator over `S ∩ [a, b]`.
pub struct RangeIter<'a> {
    set: &'a SetExpr,
    next: u64,
    hi: u64,
    done: bool,
}

impl Iterator for RangeIter<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.done {
            return None;
        }
        match self.set.next_in(self.next, self.hi) {
            Some(x) => {
                match x.checked_add(1) {
                    Some(n) if n <= self.hi => self.next = n,
                    _ => self.done = true,
                }
                Some(x)
            }
            None => {
                self.done = true;
                None
            }
        }
    }
}

impl core::fmt::Display for SetExpr {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SetExpr::Finite(v) => {
                f.write_str("{")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str("}")
            }
            SetExpr::Ap { first, step } => write!(f, "ap({first},{step})"),
            SetExpr::Enum(Enumerator::PhiLogLog(s)) => write!(f, "philoglog({s})"),
            SetExpr::Enum(e) => f.write_str(e.name()),
            SetExpr::Blocks(s) => write!(f, "blocks({})", s.name()),
            SetExpr::Union(a, b) => write!(f, "union({a},{b})"),
            SetExpr::Inter(a, b) => write!(f, "inter({a},{b})"),
            SetExpr::Diff(a, b) => write!(f, "diff({a},{b})"),
            SetExpr::Compl(a) => write!(f, "compl({a})"),
            SetExpr::Shift(a, k) => write!(f, "shift({a},{k})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn nat() -> SetExpr {
        SetExpr::nat()
    }

    #[test]
    fn membership_examples() {
        let evens = SetExpr::ap(2, 2).unwrap();
        assert!(evens.contains(4));
        assert!(!SetExpr::shift(evens.clone(), 1).contains(4));
        assert!(!SetExpr::compl(SetExpr::Enum(Enumerator::Squares)).contains(9));
    }

    #[test]
    fn count_examples() {
        assert_eq!(SetExpr::ap(2, 2).unwrap().count(1, 10).unwrap(), 5);
        assert_eq!(SetExpr::Enum(Enumerator::Squares).count(1, 100).unwrap(), 10);
        let part = SetExpr::union(SetExpr::ap(1, 2).unwrap(), SetExpr::ap(2, 2).unwrap());
        for n in [1u64, 2, 17, 1000] {
            assert_eq!(part.count(1, n).unwrap(), n);
        }
        assert!(matches!(nat().count(5, 4), Err(Error::EmptyRange { .. })));
    }

    #[test]
    fn enumerate_examples() {
        let f = SetExpr::finite([3, 1, 2]).unwrap();
        assert_eq!(f.enumerate(10).unwrap(), vec![1, 2, 3]);
        let lcm = SetExpr::inter(SetExpr::ap(2, 2).unwrap(), SetExpr::ap(3, 3).unwrap());
        assert_eq!(lcm.enumerate(3).unwrap(), vec![6, 12, 18]);
        let dd = SetExpr::diff(nat(), SetExpr::compl(SetExpr::finite([5]).unwrap()));
        assert_eq!(dd.enumerate(1).unwrap(), vec![5]);
    }

    #[test]
    fn enumerate_reports_exhaustion_on_empty_scans() {
        let empty = SetExpr::inter(SetExpr::ap(1, 2).unwrap(), SetExpr::ap(2, 2).unwrap());
        assert!(matches!(empty.enumerate(1), Err(Error::ScanExhausted { .. })));
    }

    #[test]
    fn ap_from_zero_skips_zero() {
        let s = SetExpr::ap(0, 3).unwrap();
        assert_eq!(s.enumerate(3).unwrap(), vec![3, 6, 9]);
        assert_eq!(s.count(1, 9).unwrap(), 3);
    }

    #[test]
    fn next_absent_matches_membership_scan() {
        let ex3 = || SetExpr::Blocks(BlockSchedule::new("ex3", Schedule::Example3).unwrap().into());
        let exprs = [
            SetExpr::union(SetExpr::ap(1, 2).unwrap(), SetExpr::ap(4, 4).unwrap()),
            SetExpr::inter(SetExpr::compl(SetExpr::ap(3, 3).unwrap()), ex3()),
            SetExpr::diff(ex3(), SetExpr::ap(5, 5).unwrap()),
            SetExpr::shift(ex3(), 3),
            SetExpr::shift(ex3(), -4),
            SetExpr::union(SetExpr::shift(ex3(), -1), SetExpr::compl(SetExpr::Enum(Enumerator::Squares))),
        ];
        for e in &exprs {
            for lo in 1..200u64 {
                let hi = lo + 150;
                let brute = (lo..=hi).find(|&x| !e.contains(x));
                assert_eq!(e.next_absent(lo, hi), brute, "{e:?} at {lo}");
            }
        }
    }

    #[test]
    fn leftward_shift_drops_elements() {
        let s = SetExpr::shift(SetExpr::finite([1, 2, 5]).unwrap(), -2);
        assert_eq!(s.enumerate(10).unwrap(), vec![3]);
        assert_eq!(s.count(1, 10).unwrap(), 1);
    }

    #[test]
    fn expressions_are_shareable() {
        fn check<T: Send + Sync>() {}
        check::<SetExpr>();
    }

    #[test]
    fn cofinite_detection() {
        assert!(nat().is_cofinite());
        assert!(SetExpr::compl(SetExpr::finite([4]).unwrap()).is_cofinite());
        assert!(SetExpr::shift(nat(), 7).is_cofinite());
        assert!(!SetExpr::ap(2, 2).unwrap().is_cofinite());
    }
}
