//! The upper density `δ(B) = max_α δ_α(B)` over a finite witness family.
//!
//! Witness `n` contributes `δ_n(B) = 0` when `B` is translation-almost
//! disjoint from `A_n`, and otherwise
//! `1/(n+1) + 1/(n(n+1)) · max_{|k| ≤ K} ud_{A_n + k}(B)`. Binary detectors
//! stand in for the components indexed by infinite ordinals; there are none
//! by default.
//!
//! Richness has a gap at `λ = 0`: a subset of `A_{n₀}` with relative upper
//! density 0 may lie in the ideal. [`decompose_rich`] never produces `λ = 0`,
//! which keeps the construction clear of that case without closing the gap.

use alloc::{format, string::String, sync::Arc, vec::Vec};

use num_rational::Ratio;

use crate::densities::relative_upper;
use crate::ideals::{diagnosed_residual, is_tad_pair, Cert, TadOutcome, WeightFn};
use crate::intset::{BlockSchedule, MemberTag, Registry, Schedule, SetExpr, Table};
use crate::tad::{member_expr, prefix_horizon, verify_tad, SigmaString, TadSkeleton};
use crate::{Error, Result};

/// Default shift radius for the sup over translates.
pub const DEFAULT_K_SHIFT: u64 = 25;

/// Branches of the default witness family, all of length 6.
pub const DEFAULT_SIGMAS: [&str; 8] =
    ["000000", "100000", "010000", "110000", "001000", "101010", "011111", "111111"];

pub const DEFAULT_DEPTH: usize = 6;

#[derive(Clone, Debug)]
pub struct DensityWitnessFamily {
    pub weight: WeightFn,
    pub witnesses: Vec<SetExpr>,
    pub detectors: Vec<SetExpr>,
    pub k_shift: u64,
    pub n: u64,
    /// Whether the witnesses passed [`verify_tad`] at `k_shift`.
    pub verified: bool,
}

impl DensityWitnessFamily {
    pub fn new(
        weight: WeightFn,
        witnesses: Vec<SetExpr>,
        detectors: Vec<SetExpr>,
        k_shift: u64,
        n: u64,
    ) -> Result<Self> {
        if witnesses.is_empty() {
            return Err(Error::InvalidArgument("a witness family needs at least one witness".into()));
        }
        if n < crate::densities::MIN_TRUNCATION {
            return Err(Error::InvalidArgument(format!("truncation {n} below {}", crate::densities::MIN_TRUNCATION)));
        }
        Ok(DensityWitnessFamily { weight, witnesses, detectors, k_shift, n, verified: false })
    }

    /// Witnesses `A_σ` for the given branches, registered as `w1, w2, ...`.
    /// Tags are marked verified only when [`verify_tad`] is clean.
    pub fn from_skeleton(
        sk: &TadSkeleton,
        sigmas: &[SigmaString],
        depth: usize,
        k_shift: u64,
        n: u64,
        registry: &mut Registry,
    ) -> Result<Self> {
        if depth == 0 || depth > sk.max_depth() {
            return Err(Error::InvalidArgument(format!("depth {depth} not tabulated by the skeleton")));
        }
        let horizon = prefix_horizon(sk, depth);
        if horizon < n + k_shift {
            return Err(Error::InvalidArgument(format!(
                "prefixes are exact only up to {horizon}, below N + K = {}",
                n + k_shift
            )));
        }
        let verified = verify_tad(sk, sigmas, depth, k_shift).is_clean();
        let mut witnesses = Vec::with_capacity(sigmas.len());
        for (i, s) in sigmas.iter().enumerate() {
            let (expr, schedule) = member_expr(sk, s, depth, &format!("w{}", i + 1), verified)?;
            registry.insert(schedule);
            witnesses.push(expr);
        }
        let mut fam = Self::new(sk.weight.clone(), witnesses, Vec::new(), k_shift, n)?;
        fam.verified = verified;
        Ok(fam)
    }

    /// Eight depth-6 witnesses on the `n²` skeleton with `K = 25`.
    pub fn default_fin(n: u64, registry: &mut Registry) -> Result<Self> {
        let sk = TadSkeleton::closed_form_fin(2000);
        let sigmas = DEFAULT_SIGMAS.iter().map(|s| SigmaString::parse(s)).collect::<Result<Vec<_>>>()?;
        Self::from_skeleton(&sk, &sigmas, DEFAULT_DEPTH, DEFAULT_K_SHIFT, n, registry)
    }

    pub fn len(&self) -> usize {
        self.witnesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.witnesses.is_empty()
    }

    pub fn witness(&self, n: usize) -> Result<&SetExpr> {
        n.checked_sub(1).and_then(|i| self.witnesses.get(i)).ok_or(Error::WitnessUnavailable(n))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComponentKind {
    Witness,
    Detector,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    /// 1-based index within its kind.
    pub index: usize,
    pub kind: ComponentKind,
    pub value: f64,
    pub outcome: TadOutcome,
    /// Set when the pair's TAD status was unknown and the value was computed
    /// as if the pair were not TAD.
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaValue {
    pub value: f64,
    pub argmax: Option<(usize, ComponentKind)>,
    pub per_component: Vec<Component>,
}

impl DeltaValue {
    pub fn flagged(&self) -> bool {
        self.per_component.iter().any(|c| c.flagged)
    }
}

/// Component `δ_n(B)` for witness `n` (1-based).
pub fn delta_n(fam: &DensityWitnessFamily, n: usize, b: &SetExpr) -> Result<Component> {
    let a = fam.witness(n)?;
    let report = is_tad_pair(&fam.weight, a, b, fam.k_shift, fam.n);
    let flagged = report.outcome == TadOutcome::Unknown;
    let value = if report.outcome == TadOutcome::Tad {
        0.0
    } else {
        // Parts of (A + k) ∩ B that the diagnostic places in the ideal are
        // treated as finite, as in the almost-disjointness test, and do not
        // count towards ud_{A+k}(B).
        let k_max = fam.k_shift as i64;
        let mut best = 0.0f64;
        for k in -k_max..=k_max {
            let shifted = if k == 0 { a.clone() } else { SetExpr::shift(a.clone(), k) };
            let meet = SetExpr::inter(shifted.clone(), b.clone());
            let Some(kept) = diagnosed_residual(&meet, &fam.weight, fam.n, 1.0) else { continue };
            match relative_upper(&kept, &shifted, fam.n) {
                Ok(e) => best = best.max(e.value),
                Err(Error::EmptyReference(_)) => {}
                Err(e) => return Err(e),
            }
        }
        let n = n as f64;
        1.0 / (n + 1.0) + best / (n * (n + 1.0))
    };
    Ok(Component { index: n, kind: ComponentKind::Witness, value, outcome: report.outcome, flagged })
}

/// `δ(B)`: the largest witness or detector component.
pub fn delta(fam: &DensityWitnessFamily, b: &SetExpr) -> Result<DeltaValue> {
    let mut per_component = Vec::with_capacity(fam.witnesses.len() + fam.detectors.len());
    for n in 1..=fam.witnesses.len() {
        per_component.push(delta_n(fam, n, b)?);
    }
    for (i, d) in fam.detectors.iter().enumerate() {
        let outcome = is_tad_pair(&fam.weight, d, b, fam.k_shift, fam.n).outcome;
        per_component.push(Component {
            index: i + 1,
            kind: ComponentKind::Detector,
            value: if outcome == TadOutcome::Tad { 0.0 } else { 1.0 },
            outcome,
            flagged: outcome == TadOutcome::Unknown,
        });
    }
    let mut value = 0.0;
    let mut argmax = None;
    for c in &per_component {
        if c.value > value {
            value = c.value;
            argmax = Some((c.index, c.kind));
        }
    }
    Ok(DeltaValue { value, argmax, per_component })
}

/// Splits `r ∈ (0, 1]` as `1/(n₀+1) + λ/(n₀(n₀+1))` with `n₀` the least `n`
/// having `1/(n+1) < r`. Then `λ ∈ (0, 1]`, and `r = 1/n` maps to
/// `(n, 1)`.
pub fn decompose_rich(r: Ratio<u64>) -> Result<(u64, Ratio<u64>)> {
    if *r.numer() == 0 || r > Ratio::from_integer(1) {
        return Err(Error::InvalidArgument(format!("r = {r} outside (0, 1]")));
    }
    // 1/(n+1) < p/q  ⇔  n + 1 > q/p.
    let n0 = r.recip().to_integer();
    let n0 = n0.max(1);
    let lambda = (r - Ratio::new(1, n0 + 1)) * Ratio::from_integer(n0 * (n0 + 1));
    Ok((n0, lambda))
}

/// Parses `0.15`, `3/20` or `1` into an exact ratio.
pub fn parse_rational(s: &str) -> Result<Ratio<u64>> {
    let bad = || Error::InvalidArgument(format!("cannot read {s:?} as a rational in [0, 1]"));
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: u64 = p.trim().parse().map_err(|_| bad())?;
        let q: u64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(p, q));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if frac.len() > 18 || (int.is_empty() && frac.is_empty()) {
        return Err(bad());
    }
    let digits = |t: &str| t.is_empty() || t.bytes().all(|c| c.is_ascii_digit());
    if !digits(int) || !digits(frac) {
        return Err(bad());
    }
    let scale = 10u64.pow(frac.len() as u32);
    let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
    let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    let numer = int.checked_mul(scale).and_then(|x| x.checked_add(frac)).ok_or_else(bad)?;
    Ok(Ratio::new(numer, scale))
}

#[derive(Clone, Debug)]
pub struct RichResult {
    pub n0: u64,
    pub lambda: Ratio<u64>,
    pub set: SetExpr,
    pub delta: DeltaValue,
}

/// `B ⊆ A_{n₀}` of relative density `λ`, chosen greedily along the witness,
/// together with the achieved `δ(B)`.
pub fn rich_construct(fam: &DensityWitnessFamily, r: Ratio<u64>) -> Result<RichResult> {
    let (n0, lambda) = decompose_rich(r)?;
    let witness = fam.witness(n0 as usize)?;
    let SetExpr::Blocks(schedule) = witness else {
        return Err(Error::InvalidArgument(format!("witness {n0} is not a tabulated prefix")));
    };
    let table = schedule
        .table()
        .ok_or_else(|| Error::InvalidArgument(format!("witness {n0} is not a tabulated prefix")))?;
    let elements: Vec<u64> = table.blocks().iter().flat_map(|&(l, r)| l..=r).collect();
    let (p, q) = (*lambda.numer(), *lambda.denom());
    let mut chosen = Vec::new();
    for (i, &x) in elements.iter().enumerate() {
        if (chosen.len() as u64) * q < p * (i as u64 + 1) {
            chosen.push(x);
        }
    }
    let mut sub = Table::from_elements(&chosen, table.horizon)?.with_cert("one", Cert::Divergent);
    if fam.weight == WeightFn::One {
        sub = sub.with_cert(fam.weight.name(), Cert::Divergent);
    }
    if let Some(tag) = &table.tag {
        sub = sub.with_tag(MemberTag { exact: false, ..tag.clone() });
    }
    let name = format!("{}_g{p}_{q}", schedule.name());
    let set = SetExpr::Blocks(Arc::new(BlockSchedule::new(&name, Schedule::Table(sub))?));
    let delta = delta(fam, &set)?;
    Ok(RichResult { n0, lambda, set, delta })
}

/// Human-readable summary of one component.
pub fn describe(c: &Component) -> String {
    let kind = match c.kind {
        ComponentKind::Witness => "witness",
        ComponentKind::Detector => "detector",
    };
    format!("{kind} {}: {:.6}{}", c.index, c.value, if c.flagged { " (unknown TAD status)" } else { "" })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(n: u64) -> (DensityWitnessFamily, Registry) {
        let mut reg = Registry::with_builtins();
        let f = DensityWitnessFamily::default_fin(n, &mut reg).unwrap();
        (f, reg)
    }

    #[test]
    fn decomposition_identity() {
        for (num, den) in [(1u64, 1u64), (1, 2), (7, 10), (3, 20), (3, 10), (11, 20), (9, 10), (1, 3), (1, 7)] {
            let r = Ratio::new(num, den);
            let (n0, lambda) = decompose_rich(r).unwrap();
            assert!(lambda > Ratio::from_integer(0) && lambda <= Ratio::from_integer(1));
            assert_eq!(Ratio::new(1, n0 + 1) + lambda / Ratio::from_integer(n0 * (n0 + 1)), r);
        }
        assert_eq!(decompose_rich(Ratio::new(1, 1)).unwrap(), (1, Ratio::from_integer(1)));
        assert_eq!(decompose_rich(Ratio::new(1, 2)).unwrap(), (2, Ratio::from_integer(1)));
        assert_eq!(decompose_rich(Ratio::new(7, 10)).unwrap(), (1, Ratio::new(2, 5)));
        assert_eq!(decompose_rich(Ratio::new(3, 20)).unwrap(), (6, Ratio::new(3, 10)));
        assert!(decompose_rich(Ratio::new(0, 1)).is_err());
        assert!(decompose_rich(Ratio::new(3, 2)).is_err());
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("0.15").unwrap(), Ratio::new(3, 20));
        assert_eq!(parse_rational("1").unwrap(), Ratio::from_integer(1));
        assert_eq!(parse_rational("3/4").unwrap(), Ratio::new(3, 4));
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn delta_examples() {
        let (f, reg) = fam(100_000);
        assert!(f.verified);
        let nat = SetExpr::nat();
        let d1 = delta_n(&f, 1, &nat).unwrap();
        assert_eq!(d1.value, 1.0);
        assert_eq!(delta(&f, &nat).unwrap().value, 1.0);
        let fin = SetExpr::finite(1..=10).unwrap();
        assert_eq!(delta(&f, &fin).unwrap().value, 0.0);
        let a2 = reg.expr("w2").unwrap();
        assert_eq!(delta_n(&f, 2, &a2).unwrap().value, 1.0 / 3.0 + 1.0 / 6.0);
        let d = delta(&f, &reg.expr("w3").unwrap()).unwrap();
        assert!(d.value >= 0.25);
        assert_eq!(d.per_component[2].value, 0.25 + 1.0 / 12.0);
        assert!(matches!(delta_n(&f, 9, &nat), Err(Error::WitnessUnavailable(9))));
    }

    #[test]
    fn rich_endpoint() {
        let (f, _) = fam(100_000);
        let res = rich_construct(&f, Ratio::from_integer(1)).unwrap();
        assert_eq!(res.n0, 1);
        assert_eq!(res.delta.value, 1.0);
    }
}
