//! Skeletons `(g, h, n_m)` and prefixes of the translation-almost-disjoint
//! family `{A_σ}` built from them.
//!
//! The construction lives on `{0, 1, ...}`; every emitted element is moved
//! up by one so that families live in ℕ = {1, 2, ...}. Weights are therefore
//! evaluated at `x + 1` for a construction value `x`.
//!
//! Whether `g` and `h` can coincide for a generic summable ideal is not
//! known. Constructed skeletons always build them separately; only the closed
//! forms for `fin` and `rcp` reuse one function for both.
//!
//! Stage `m` fills the windows `n_m + i` for `0 < i < n_{m+1} − n_m` and then
//! the branching window `n_{m+1}`.

use alloc::{format, string::String, sync::Arc, vec, vec::Vec};

use crate::ideals::{Cert, WeightFn};
use crate::intset::{phi, BlockSchedule, MemberTag, Schedule, SetExpr, Table};
use crate::numeric::CompensatedSum;
use crate::{Error, Result};

/// Default number of progression terms scanned per residue by [`select_i0`].
pub const SELECT_SCAN: u64 = 100_000;

/// Residue classes are scanned explicitly only up to this many. Beyond it the
/// weight's monotonicity decides: every term of residue 0 dominates the
/// matching term of any other residue, so 0 is the maximiser.
pub const RESIDUE_SCAN_CAP: u64 = 64;

/// Offset in the closed form `g = h = φ(n + 15)`.
pub const RCP_OFFSET: u64 = 15;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Constructed,
    ClosedFormFin,
    ClosedFormRcp,
    /// Hand-made or loaded skeletons, e.g. negative controls.
    Custom,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Constructed => "constructed",
            Provenance::ClosedFormFin => "closed_form_fin",
            Provenance::ClosedFormRcp => "closed_form_rcp",
            Provenance::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "constructed" => Provenance::Constructed,
            "closed_form_fin" => Provenance::ClosedFormFin,
            "closed_form_rcp" => Provenance::ClosedFormRcp,
            "custom" => Provenance::Custom,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TadSkeleton {
    pub weight: WeightFn,
    /// `g(0), g(1), ...` on the tabulated range.
    pub g: Arc<[u64]>,
    pub h: Arc<[u64]>,
    /// Milestones of `h`; `n_m[0] = 0`.
    pub n_m: Vec<u64>,
    /// Milestones of `g`; `l_m[0] = 0`.
    pub l_m: Vec<u64>,
    pub provenance: Provenance,
}

/// Residue `i₀ ∈ [0, 2d)` whose progression `base + i₀ + 2dk`, `k ∈ [2, scan]`,
/// carries the most weight; ties go to the smallest residue. The weight
/// returns `None` past the end of its domain, which ends that residue's sum.
pub fn select_i0<F: FnMut(u64) -> Option<f64>>(mut weight: F, base: u64, d: u64, scan: u64) -> u64 {
    let mut best = (0u64, f64::NEG_INFINITY);
    for i0 in 0..2 * d {
        let mut s = CompensatedSum::default();
        for k in 2..=scan {
            let Some(x) = (2 * d).checked_mul(k).and_then(|t| t.checked_add(base + i0)) else { break };
            match weight(x) {
                Some(v) => s.add(v),
                None => break,
            }
        }
        if s.value() > best.1 {
            best = (i0, s.value());
        }
    }
    best.0
}

/// One run of the inductive construction: values and milestone indices.
#[derive(Clone, Debug)]
struct Construction {
    values: Vec<u64>,
    milestones: Vec<u64>,
}

impl Construction {
    fn new() -> Self {
        Construction { values: vec![0], milestones: vec![0] }
    }

    fn stages(&self) -> usize {
        self.milestones.len() - 1
    }

    /// Extends by one stage, never beyond index `budget`.
    fn advance<F: FnMut(u64) -> Option<f64>>(
        &mut self,
        weight: &mut F,
        budget: u64,
        scan: u64,
        part: &'static str,
    ) -> Result<()> {
        let stage = self.stages();
        let l = *self.milestones.last().expect("milestones start at 0");
        let base = self.values[l as usize];
        // d = g(l_m) − g(l_m − 1), reading g(−1) as −1 so that d = 1 at stage 0.
        let d = if l == 0 { 1 } else { base - self.values[l as usize - 1] };
        let exhausted = |detail: String| Error::BudgetExhausted { part, stage, detail };
        let two_d = d.checked_mul(2).ok_or_else(|| exhausted("gap overflow".into()))?;
        let i0 = if two_d <= RESIDUE_SCAN_CAP { select_i0(&mut *weight, base, d, scan) } else { 0 };
        let term = |k: u64| two_d.checked_mul(k).and_then(|t| t.checked_add(base + i0));
        let mut mass = CompensatedSum::default();
        let mut k = 1u64;
        while mass.value() < 1.0 {
            k += 1;
            if l + k + 1 > budget {
                return Err(exhausted(format!("index {} exceeds the budget {budget}", l + k + 1)));
            }
            let x = term(k).ok_or_else(|| exhausted("value overflow".into()))?;
            let w = weight(x).ok_or_else(|| exhausted(format!("weight unavailable at {x}")))?;
            mass.add(w);
        }
        self.values.push(if i0 >= d { base + i0 } else { base + d });
        for j in 1..=k {
            self.values.push(term(j).expect("checked above"));
        }
        self.milestones.push(l + k + 1);
        Ok(())
    }
}

impl TadSkeleton {
    /// Builds `g`, `l_m`, `h` and `n_m` with `M` stages of `h`, keeping every
    /// tabulated index at most `budget`.
    pub fn build(weight: &WeightFn, stages: usize, budget: u64) -> Result<Self> {
        Self::build_with_scan(weight, stages, budget, SELECT_SCAN)
    }

    pub fn build_with_scan(weight: &WeightFn, stages: usize, budget: u64, scan: u64) -> Result<Self> {
        let mut g = Construction::new();
        let mut g_weight = |x: u64| x.checked_add(1).map(|y| weight.eval(y));
        let mut g_failed: Option<Error> = None;
        let mut h = Construction::new();
        while h.stages() < stages {
            let mut h_weight = |x: u64| -> Option<f64> {
                while g.values.len() as u64 <= x {
                    if g_failed.is_some() {
                        return None;
                    }
                    if let Err(e) = g.advance(&mut g_weight, budget, scan, "g") {
                        g_failed = Some(e);
                        return None;
                    }
                }
                Some(weight.eval(g.values[x as usize] + 1))
            };
            let res = h.advance(&mut h_weight, budget, scan, "h");
            if let Err(e) = res {
                return Err(match (e, &g_failed) {
                    (Error::BudgetExhausted { stage, detail, .. }, Some(ge)) => Error::BudgetExhausted {
                        part: "h",
                        stage,
                        detail: format!("{detail}; g stopped: {ge}"),
                    },
                    (e, _) => e,
                });
            }
        }
        // g must cover every h value used by the family windows.
        let need = *h.values.last().expect("nonempty");
        while (g.values.len() as u64) <= need {
            g.advance(&mut g_weight, budget, scan, "g")?;
        }
        Ok(TadSkeleton {
            weight: weight.clone(),
            g: g.values.into(),
            h: h.values.into(),
            n_m: h.milestones,
            l_m: g.milestones,
            provenance: Provenance::Constructed,
        })
    }

    /// `g = h = n²` on `[0, len]` for the weight `f ≡ 1`.
    pub fn closed_form_fin(len: u64) -> Self {
        let table: Arc<[u64]> = (0..=len).map(|n| n * n).collect();
        Self::from_unified(WeightFn::One, table, Provenance::ClosedFormFin)
    }

    /// `g = h = φ(n + 15)` on `[0, len]` for the weight `f(n) = 1/n`.
    pub fn closed_form_rcp(len: u64) -> Self {
        let table: Arc<[u64]> = (0..=len).map_while(|n| phi(n + RCP_OFFSET)).collect();
        Self::from_unified(WeightFn::Reciprocal, table, Provenance::ClosedFormRcp)
    }

    /// Skeleton with `g = h = table` and milestones read off the gaps.
    pub fn from_unified(weight: WeightFn, table: Arc<[u64]>, provenance: Provenance) -> Self {
        let milestones = gap_milestones(&table);
        TadSkeleton { weight, g: table.clone(), h: table, n_m: milestones.clone(), l_m: milestones, provenance }
    }

    /// A stable identifier for tagging family members.
    pub fn id(&self) -> String {
        format!(
            "{}/{}/{}/{}/{}",
            self.provenance.as_str(),
            self.weight.name(),
            self.g.len(),
            self.h.len(),
            self.n_m.len()
        )
    }

    /// Highest depth for which member prefixes can be generated.
    pub fn max_depth(&self) -> usize {
        (1..self.n_m.len())
            .take_while(|&m| {
                let n = self.n_m[m] as usize;
                n < self.h.len() && (self.h[n] as usize) < self.g.len()
            })
            .last()
            .unwrap_or(0)
    }

    /// Window `n ≥ 1` in shifted coordinates: `[g(h(n−1)) + 1, g(h(n))]`.
    pub fn window(&self, n: u64) -> Option<(u64, u64)> {
        let a = *self.g.get(*self.h.get(n as usize - 1)? as usize)?;
        let b = *self.g.get(*self.h.get(n as usize)? as usize)?;
        Some((a + 1, b))
    }
}

/// `m_0 = 0`; `m_k` is the first index after `m_{k−1}` with gap `≥ 2^k`.
fn gap_milestones(table: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64];
    let mut need = 2u64;
    for n in 1..table.len() {
        if table[n] - table[n - 1] >= need {
            out.push(n as u64);
            match need.checked_mul(2) {
                Some(x) => need = x,
                None => break,
            }
        }
    }
    out
}

/// A finite branch `σ ∈ {0,1}^m`, `m ≥ 1`, read with zero padding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaString(Vec<u8>);

impl SigmaString {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() || bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidArgument("a branch is a nonempty string of bits".into()));
        }
        Ok(SigmaString(bits))
    }

    pub fn parse(s: &str) -> Result<Self> {
        let bits = s
            .bytes()
            .map(|c| match c {
                b'0' => Ok(0),
                b'1' => Ok(1),
                _ => Err(Error::InvalidArgument(format!("branch {s:?} contains a non-bit"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        SigmaString::new(bits)
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bit(&self, i: usize) -> u8 {
        self.0.get(i).copied().unwrap_or(0)
    }

    /// Little-endian value of `σ↾m`.
    pub fn le_int(&self, m: usize) -> u64 {
        (0..m.min(64)).map(|i| u64::from(self.bit(i)) << i).sum()
    }

    /// First position (1-based) where the padded branches differ.
    pub fn first_difference(&self, other: &SigmaString) -> Option<usize> {
        (0..self.len().max(other.len())).find(|&i| self.bit(i) != other.bit(i)).map(|i| i + 1)
    }
}

impl core::fmt::Display for SigmaString {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// Prefix of `A_σ` through window `n_depth`: one element of `range(g)` per
/// window, shifted into ℕ.
///
/// Windows below `n_1` take their smallest element of `range(g)`; from
/// `n_1` on, window `n ∈ (n_m, n_{m+1})` takes index `σ↾m` and window
/// `n_{m+1}` takes index `σ↾(m+1)`, both read little-endian.
pub fn family_member(sk: &TadSkeleton, sigma: &SigmaString, depth: usize) -> Result<Vec<u64>> {
    if depth == 0 || depth > sk.max_depth() {
        return Err(Error::InvalidArgument(format!(
            "depth {depth} outside [1, {}] for this skeleton",
            sk.max_depth()
        )));
    }
    if sigma.len() < depth {
        return Err(Error::InvalidArgument(format!("branch {sigma} is shorter than depth {depth}")));
    }
    let last = sk.n_m[depth];
    let mut out = Vec::with_capacity(last as usize);
    let mut m = 0usize;
    for n in 1..=last {
        while m + 1 < sk.n_m.len() && sk.n_m[m + 1] < n {
            m += 1;
        }
        // n lies in (n_m, n_{m+1}].
        let (idx, needed) = if n < sk.n_m[m + 1] {
            (sigma.le_int(m), 1u64 << m)
        } else {
            (sigma.le_int(m + 1), 1u64 << (m + 1))
        };
        let lo = sk.h[n as usize - 1];
        let available = sk.h[n as usize] - lo;
        if available < needed {
            return Err(Error::WindowTooSmall { window: n, available, needed });
        }
        out.push(sk.g[(lo + idx) as usize] + 1);
    }
    Ok(out)
}

/// Upper end of the range on which a depth-`depth` prefix is exact.
pub fn prefix_horizon(sk: &TadSkeleton, depth: usize) -> u64 {
    sk.g[sk.h[sk.n_m[depth] as usize] as usize]
}

/// A family member as a tagged table carrying its divergence certificates.
pub fn member_expr(
    sk: &TadSkeleton,
    sigma: &SigmaString,
    depth: usize,
    name: &str,
    verified: bool,
) -> Result<(SetExpr, BlockSchedule)> {
    let elements = family_member(sk, sigma, depth)?;
    let mut table = Table::from_elements(&elements, prefix_horizon(sk, depth))?
        .with_cert(sk.weight.name(), Cert::Divergent)
        .with_tag(MemberTag { family: sk.id(), sigma: sigma.bits().to_vec(), exact: true, verified });
    if sk.weight.name() != "one" {
        table = table.with_cert("one", Cert::Divergent);
    }
    let schedule = BlockSchedule::new(name, Schedule::Table(table))?;
    Ok((SetExpr::Blocks(Arc::new(schedule.clone())), schedule))
}

#[derive(Clone, Debug, PartialEq)]
pub enum TadViolation {
    /// A prefix could not be generated.
    Prefix { sigma: String, error: String },
    /// A window holds a number of prefix elements other than one.
    Window { sigma: String, window: u64, count: u64 },
    /// No tabulated gap of `g` exceeds `k`, so `G ∩ (G + k)` is not shown finite.
    Gap { k: u64 },
    /// `(A_σ + k) ∩ A_τ` has an element above the predicted bound.
    Intersection { sigma: String, tau: String, k: i64, element: u64, bound: u64 },
    /// The two branches agree on every generated bit.
    Indistinct { sigma: String, tau: String },
    /// Prefix f-mass falls below the per-window lower bound.
    Divergence { sigma: String, mass: f64, bound: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct TadVerifyReport {
    pub depth: usize,
    pub pairs_checked: usize,
    pub violations: Vec<TadViolation>,
}

impl TadVerifyReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// First index `j ≥ 1` with `g(j) − g(j−1) > k`.
fn first_gap_above(g: &[u64], k: u64) -> Option<usize> {
    (1..g.len()).find(|&j| g[j] - g[j - 1] > k)
}

/// Exhaustive check of window uniqueness, pairwise translated intersections
/// and the gap condition on generated prefixes.
pub fn verify_tad(sk: &TadSkeleton, sigmas: &[SigmaString], depth: usize, k_max: u64) -> TadVerifyReport {
    let mut violations = Vec::new();
    for k in 1..=k_max {
        if first_gap_above(&sk.g, k).is_none() {
            violations.push(TadViolation::Gap { k });
        }
    }
    let mut prefixes = Vec::new();
    for s in sigmas {
        match family_member(sk, s, depth) {
            Ok(p) => prefixes.push((s, p)),
            Err(e) => violations.push(TadViolation::Prefix { sigma: format!("{s}"), error: format!("{e}") }),
        }
    }
    if prefixes.len() < sigmas.len() {
        return TadVerifyReport { depth, pairs_checked: 0, violations };
    }
    let horizon = prefix_horizon(sk, depth);
    for (s, p) in &prefixes {
        for n in 1..=sk.n_m[depth] {
            let (a, b) = sk.window(n).expect("tabulated through depth");
            let count = p.iter().filter(|&&x| (a..=b).contains(&x)).count() as u64;
            if count != 1 {
                violations.push(TadViolation::Window { sigma: format!("{s}"), window: n, count });
            }
        }
        let mut mass = CompensatedSum::default();
        p.iter().for_each(|&a| mass.add(sk.weight.eval(a)));
        let mut bound = CompensatedSum::default();
        for n in 2..=sk.n_m[depth] {
            bound.add(sk.weight.eval(sk.g[sk.h[n as usize] as usize] + 1));
        }
        if mass.value() < bound.value() - 1e-9 {
            violations.push(TadViolation::Divergence {
                sigma: format!("{s}"),
                mass: mass.value(),
                bound: bound.value(),
            });
        }
    }
    let k_max = k_max as i64;
    let mut pairs_checked = 0;
    for i in 0..prefixes.len() {
        for j in i..prefixes.len() {
            let (s, ps) = &prefixes[i];
            let (t, pt) = &prefixes[j];
            let distinct = i != j;
            if distinct && s.first_difference(t).is_none_or(|m| m > depth) {
                violations.push(TadViolation::Indistinct { sigma: format!("{s}"), tau: format!("{t}") });
                continue;
            }
            for k in -k_max..=k_max {
                if k == 0 && !distinct {
                    continue;
                }
                // Both directions: (A_σ + k) ∩ A_τ and (A_τ + k) ∩ A_σ.
                for (a, b) in [(ps, pt), (pt, ps)] {
                    pairs_checked += 1;
                    let bound = if k == 0 {
                        let m = s.first_difference(t).expect("distinct");
                        sk.g[sk.h[sk.n_m[m] as usize - 1] as usize] + 1
                    } else {
                        match first_gap_above(&sk.g, k.unsigned_abs()) {
                            Some(js) => sk.g[js - 1] + k.unsigned_abs() + 1,
                            None => continue,
                        }
                    };
                    let limit = horizon.saturating_sub(if k < 0 { k.unsigned_abs() } else { 0 });
                    for &x in a.iter() {
                        let Some(y) = x.checked_add_signed(k) else { continue };
                        if y == 0 || y > limit {
                            continue;
                        }
                        if b.binary_search(&y).is_ok() && y > bound {
                            violations.push(TadViolation::Intersection {
                                sigma: format!("{s}"),
                                tau: format!("{t}"),
                                k,
                                element: y,
                                bound,
                            });
                        }
                    }
                }
            }
        }
    }
    TadVerifyReport { depth, pairs_checked, violations }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvariantReport {
    pub nondecreasing_gaps: bool,
    pub unbounded_gaps: bool,
    pub milestone_gaps: bool,
    pub divergent_composition: bool,
    pub details: Vec<String>,
}

impl InvariantReport {
    pub fn all_pass(&self) -> bool {
        self.nondecreasing_gaps && self.unbounded_gaps && self.milestone_gaps && self.divergent_composition
    }
}

fn first_gap_decrease(t: &[u64]) -> Option<usize> {
    (2..t.len()).find(|&n| t[n] - t[n - 1] < t[n - 1] - t[n - 2])
}

/// The four skeleton properties, checked on the tabulated range for `M`
/// milestone stages.
pub fn check_invariants(sk: &TadSkeleton, stages: usize) -> InvariantReport {
    let mut details = Vec::new();
    let mut nondecreasing_gaps = true;
    for (name, t) in [("g", &sk.g), ("h", &sk.h)] {
        if let Some(n) = first_gap_decrease(t) {
            nondecreasing_gaps = false;
            details.push(format!("{name}-gaps decrease at n = {n}"));
        }
    }
    let mut unbounded_gaps = sk.l_m.len() > stages;
    if !unbounded_gaps {
        details.push(format!("only {} g-milestones tabulated, need {}", sk.l_m.len(), stages + 1));
    }
    let gap = |n: u64| sk.g[n as usize] - if n == 0 { 0 } else { sk.g[n as usize - 1] };
    for w in sk.l_m.windows(2) {
        if w[0] > 0 && gap(w[1]) <= gap(w[0]) {
            unbounded_gaps = false;
            details.push(format!("g-gap at l = {} does not exceed the gap at l = {}", w[1], w[0]));
        }
    }
    let mut milestone_gaps = sk.n_m.len() > stages;
    if !milestone_gaps {
        details.push(format!("only {} h-milestones tabulated, need {}", sk.n_m.len(), stages + 1));
    }
    for m in 1..sk.n_m.len().min(stages + 1) {
        let n = sk.n_m[m] as usize;
        if sk.h[n] - sk.h[n - 1] < 1 << m {
            milestone_gaps = false;
            details.push(format!("h(n_{m}) - h(n_{m} - 1) < 2^{m}"));
        }
    }
    let mut divergent_composition = false;
    let last = sk.n_m.get(stages).copied().unwrap_or((sk.h.len() - 1) as u64);
    let mut mass = CompensatedSum::default();
    for n in 0..=last as usize {
        match sk.h.get(n).and_then(|&x| sk.g.get(x as usize)) {
            Some(&v) => mass.add(sk.weight.eval(v + 1)),
            None => break,
        }
    }
    if mass.value() >= stages as f64 {
        divergent_composition = true;
    } else {
        details.push(format!("f(g(h(n))) sums to {:.6} over the tabulated range, below {stages}", mass.value()));
    }
    InvariantReport { nondecreasing_gaps, unbounded_gaps, milestone_gaps, divergent_composition, details }
}

/// First `n ≥ from` with `φ(n+1) − φ(n) < φ(n) − φ(n−1)`, scanning to `to`.
pub fn phi_increment_decrease(from: u64, to: u64) -> Option<u64> {
    let mut prev = phi(from)? - phi(from - 1)?;
    for n in from + 1..=to {
        let inc = phi(n)? - phi(n - 1)?;
        if inc < prev {
            return Some(n - 1);
        }
        prev = inc;
    }
    None
}

/// Partial sum of `1/φ(φ(n))` over `n ≤ upto`, skipping indices where the
/// term is undefined or infinite, and the first `n` where it exceeds
/// `threshold`.
pub fn phi_phi_partial_sum(upto: u64, threshold: f64) -> (f64, Option<u64>) {
    let mut s = CompensatedSum::default();
    let mut crossing = None;
    for n in 3..=upto {
        if let Some(v) = phi(n).and_then(phi).filter(|&v| v > 0) {
            s.add(1.0 / v as f64);
            if crossing.is_none() && s.value() > threshold {
                crossing = Some(n);
            }
        }
    }
    (s.value(), crossing)
}

/// Negative control: `g(n) = 2n` has constant gaps, so `G` meets `G + 2`
/// infinitely often; `h(n) = n²` keeps the windows large.
pub fn constant_gap_skeleton(len: u64) -> TadSkeleton {
    let g: Arc<[u64]> = (0..=len * len).map(|n| 2 * n).collect();
    let h: Arc<[u64]> = (0..=len).map(|n| n * n).collect();
    let n_m = gap_milestones(&h);
    TadSkeleton {
        weight: WeightFn::One,
        g,
        h,
        n_m: n_m.clone(),
        l_m: n_m,
        provenance: Provenance::Custom,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(s: &str) -> SigmaString {
        SigmaString::parse(s).unwrap()
    }

    #[test]
    fn select_i0_examples() {
        assert_eq!(select_i0(|_| Some(1.0), 17, 3, 100), 0);
        // Residues 0 and 1 of 1/x over x = 2k + i0 + 1, by direct summation.
        let w = |x: u64| Some(1.0 / (x + 1) as f64);
        let r0: f64 = (2..=10_000u64).map(|k| 1.0 / (2 * k + 1) as f64).sum();
        let r1: f64 = (2..=10_000u64).map(|k| 1.0 / (2 * k + 2) as f64).sum();
        assert!(r0 > r1);
        assert_eq!(select_i0(w, 0, 1, 10_000), 0);
        let only_one_mod_four = |x: u64| Some(if x % 4 == 1 { 1.0 } else { 0.0 });
        assert_eq!(select_i0(only_one_mod_four, 0, 2, 1000), 1);
    }

    #[test]
    fn constructed_fin_skeleton() {
        let sk = TadSkeleton::build(&WeightFn::One, 5, 1_000_000).unwrap();
        assert_eq!(&sk.h[..16], &[0, 1, 2, 4, 6, 8, 12, 16, 20, 28, 36, 44, 60, 76, 92, 124]);
        assert_eq!(sk.n_m, vec![0, 3, 6, 9, 12, 15]);
        assert_eq!(sk.l_m[..3], [0, 3, 6]);
        let report = check_invariants(&sk, 5);
        assert!(report.all_pass(), "{report:?}");
    }

    #[test]
    fn stage_zero_base() {
        let sk = TadSkeleton::build(&WeightFn::One, 1, 100).unwrap();
        assert_eq!(sk.l_m[0], 0);
        assert_eq!(sk.g[0], 0);
        assert_eq!(sk.n_m.len(), 2);
    }

    #[test]
    fn budget_exhaustion_names_the_stage() {
        let err = TadSkeleton::build(&WeightFn::One, 5, 10).unwrap_err();
        assert!(matches!(err, Error::BudgetExhausted { .. }), "{err}");
    }

    #[test]
    fn closed_form_fin_milestones() {
        let sk = TadSkeleton::closed_form_fin(2000);
        assert_eq!(sk.n_m[..7], [0, 2, 3, 5, 9, 17, 33]);
        assert!(check_invariants(&sk, 5).all_pass());
    }

    #[test]
    fn depth_one_prefix_covers_the_base_windows() {
        let sk = TadSkeleton::closed_form_fin(2000);
        let p = family_member(&sk, &sig("0"), 1).unwrap();
        // n_1 = 2: window [1, 1] holds 1; window [2, 16] branches on bit 0.
        assert_eq!(p, vec![1, 2]);
        assert_eq!(family_member(&sk, &sig("1"), 1).unwrap(), vec![1, 5]);
        let built = TadSkeleton::build(&WeightFn::One, 3, 1_000_000).unwrap();
        let q = family_member(&built, &sig("1"), 1).unwrap();
        assert_eq!(q.len() as u64, built.n_m[1]);
    }

    #[test]
    fn branches_split_at_the_first_difference() {
        let sk = TadSkeleton::closed_form_fin(2000);
        let a = family_member(&sk, &sig("010"), 3).unwrap();
        let b = family_member(&sk, &sig("011"), 3).unwrap();
        let bound = sk.g[sk.h[sk.n_m[3] as usize - 1] as usize] + 1;
        for x in a.iter().filter(|x| b.contains(x)) {
            assert!(*x <= bound);
        }
        // Identical through window n_3 − 1, different at the branching window.
        let split = sk.n_m[3] as usize - 1;
        assert_eq!(a[..split], b[..split]);
        assert_ne!(a[split], b[split]);
    }

    #[test]
    fn verify_clean_on_fin_and_dirty_on_control() {
        let sk = TadSkeleton::closed_form_fin(2000);
        let sigmas: Vec<SigmaString> =
            ["000000", "100000", "010000", "110000", "001000", "000001", "111111", "101010"]
                .iter()
                .map(|s| sig(s))
                .collect();
        let r = verify_tad(&sk, &sigmas, 6, 3);
        assert!(r.is_clean(), "{:?}", r.violations);
        let bad = constant_gap_skeleton(100);
        let r = verify_tad(&bad, &sigmas[..2], 2, 3);
        assert!(!r.is_clean());
    }

    #[test]
    fn phi_claims() {
        // The increments of φ are not monotone from 16 on.
        assert!(phi_increment_decrease(16, 100_000).is_some());
        let rcp = TadSkeleton::closed_form_rcp(100_000);
        assert_eq!(rcp.g[0], 14);
        assert!(!check_invariants(&rcp, 5).nondecreasing_gaps);
    }
}
