//! Checks of the abstract upper density axioms for any evaluator over a
//! corpus of sets: `δ(ℕ) = 1`, vanishing on finite sets, monotonicity,
//! subadditivity and translation invariance.

use alloc::{format, string::String, vec, vec::Vec};

use crate::{Result, SetExpr};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    Normalization,
    FiniteVanishing,
    Monotonicity,
    Subadditivity,
    Translation,
}

impl Axiom {
    pub const ALL: [Axiom; 5] =
        [Axiom::Normalization, Axiom::FiniteVanishing, Axiom::Monotonicity, Axiom::Subadditivity, Axiom::Translation];

    pub fn as_str(&self) -> &'static str {
        match self {
            Axiom::Normalization => "normalization",
            Axiom::FiniteVanishing => "finite_vanishing",
            Axiom::Monotonicity => "monotonicity",
            Axiom::Subadditivity => "subadditivity",
            Axiom::Translation => "translation",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxiomConfig {
    /// Truncation used for subset detection.
    pub n: u64,
    pub exact_tol: f64,
    pub monotone_tol: f64,
    pub subadditive_tol: f64,
    pub translation_tol: f64,
    /// Shifts `m` tested as `δ(S + m)` against `δ(S)`; negative values shift left.
    pub shifts: Vec<i64>,
    /// Every integer up to here is tested before the full subset scan.
    pub fuzz_upto: u64,
}

impl AxiomConfig {
    pub fn new(n: u64) -> Self {
        AxiomConfig {
            n,
            exact_tol: 1e-9,
            monotone_tol: 1e-9,
            subadditive_tol: 1e-6,
            translation_tol: 0.05,
            shifts: vec![1, -1, 7, -7, 20, -20],
            fuzz_upto: 10_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    /// Printed forms of the sets involved, in the order the inequality reads.
    pub sets: Vec<String>,
    pub values: Vec<f64>,
    /// By how much the inequality fails.
    pub excess: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxiomReport {
    /// Evaluator value on each corpus member.
    pub values: Vec<f64>,
    pub checked: Vec<(Axiom, usize)>,
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn violations_of(&self, axiom: Axiom) -> impl Iterator<Item = &AxiomViolation> {
        self.violations.iter().filter(move |v| v.axiom == axiom)
    }

    pub fn holds(&self, axiom: Axiom) -> bool {
        self.violations_of(axiom).next().is_none()
    }

    pub fn checked(&self, axiom: Axiom) -> usize {
        self.checked.iter().find(|c| c.0 == axiom).map_or(0, |c| c.1)
    }
}

fn bitmap(s: &SetExpr, upto: u64) -> Vec<u64> {
    let mut bits = vec![0u64; (upto as usize >> 6) + 1];
    for x in s.iter_range(1, upto) {
        bits[x as usize >> 6] |= 1 << (x & 63);
    }
    bits
}

/// `A ∩ [1, n] ⊆ B`.
pub fn subset_on(a: &SetExpr, b: &SetExpr, n: u64) -> bool {
    SetExpr::diff(a.clone(), b.clone()).next_in(1, n).is_none()
}

/// Ordered pairs `(i, j)`, `i ≠ j`, with `corpus[i] ⊆ corpus[j]` on `[1, n]`.
pub fn subset_pairs(corpus: &[SetExpr], n: u64, fuzz_upto: u64) -> Vec<(usize, usize)> {
    let fuzz = fuzz_upto.min(n);
    let maps: Vec<Vec<u64>> = corpus.iter().map(|s| bitmap(s, fuzz)).collect();
    let mut out = Vec::new();
    for i in 0..corpus.len() {
        for j in 0..corpus.len() {
            if i == j || maps[i].iter().zip(&maps[j]).any(|(a, b)| a & !b != 0) {
                continue;
            }
            if subset_on(&corpus[i], &corpus[j], n) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Runs every axiom check. Subadditivity is tested on `union_pairs`,
/// monotonicity on every subset pair found in the corpus.
pub fn axiom_suite<F>(
    mut eval: F,
    corpus: &[SetExpr],
    union_pairs: &[(usize, usize)],
    cfg: &AxiomConfig,
) -> Result<AxiomReport>
where
    F: FnMut(&SetExpr) -> Result<f64>,
{
    let values = corpus.iter().map(&mut eval).collect::<Result<Vec<f64>>>()?;
    let name = |i: usize| format!("{}", corpus[i]);
    let mut violations = Vec::new();
    let mut checked = Vec::new();

    let nat = eval(&SetExpr::nat())?;
    if (nat - 1.0).abs() > cfg.exact_tol {
        violations.push(AxiomViolation {
            axiom: Axiom::Normalization,
            sets: vec![String::from("ap(1,1)")],
            values: vec![nat],
            excess: (nat - 1.0).abs(),
        });
    }
    checked.push((Axiom::Normalization, 1));

    let mut finite = 0;
    for (i, s) in corpus.iter().enumerate() {
        if s.max_bound().is_some() {
            finite += 1;
            if values[i].abs() > cfg.exact_tol {
                violations.push(AxiomViolation {
                    axiom: Axiom::FiniteVanishing,
                    sets: vec![name(i)],
                    values: vec![values[i]],
                    excess: values[i].abs(),
                });
            }
        }
    }
    checked.push((Axiom::FiniteVanishing, finite));

    let pairs = subset_pairs(corpus, cfg.n, cfg.fuzz_upto);
    for &(i, j) in &pairs {
        if values[i] > values[j] + cfg.monotone_tol {
            violations.push(AxiomViolation {
                axiom: Axiom::Monotonicity,
                sets: vec![name(i), name(j)],
                values: vec![values[i], values[j]],
                excess: values[i] - values[j],
            });
        }
    }
    checked.push((Axiom::Monotonicity, pairs.len()));

    for &(i, j) in union_pairs {
        let u = eval(&SetExpr::union(corpus[i].clone(), corpus[j].clone()))?;
        if u > values[i] + values[j] + cfg.subadditive_tol {
            violations.push(AxiomViolation {
                axiom: Axiom::Subadditivity,
                sets: vec![name(i), name(j)],
                values: vec![u, values[i], values[j]],
                excess: u - values[i] - values[j],
            });
        }
    }
    checked.push((Axiom::Subadditivity, union_pairs.len()));

    let mut translations = 0;
    for (i, s) in corpus.iter().enumerate() {
        for &m in &cfg.shifts {
            translations += 1;
            let v = eval(&SetExpr::shift(s.clone(), m))?;
            if (v - values[i]).abs() > cfg.translation_tol {
                violations.push(AxiomViolation {
                    axiom: Axiom::Translation,
                    sets: vec![format!("shift({},{m})", corpus[i]), name(i)],
                    values: vec![v, values[i]],
                    excess: (v - values[i]).abs(),
                });
            }
        }
    }
    checked.push((Axiom::Translation, translations));

    Ok(AxiomReport { values, checked, violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::lower_asymptotic;
    use crate::intset::{parse, Registry};

    #[test]
    fn lower_density_is_not_subadditive_on_prop1i() {
        let reg = Registry::with_builtins();
        let a = parse("blocks(prop1i)", &reg).unwrap();
        let corpus = vec![a.clone(), SetExpr::compl(a)];
        let mut cfg = AxiomConfig::new(1_000_000);
        cfg.shifts.clear();
        let report = axiom_suite(|s| Ok(lower_asymptotic(s, 1_000_000)?.value), &corpus, &[(0, 1)], &cfg).unwrap();
        assert!(!report.holds(Axiom::Subadditivity));
        assert!(report.holds(Axiom::Normalization));
    }

    #[test]
    fn subset_pairs_follow_structure() {
        let reg = Registry::empty();
        let corpus: Vec<SetExpr> =
            ["ap(4,4)", "ap(2,2)", "ap(1,2)", "{4,8}"].iter().map(|s| parse(s, &reg).unwrap()).collect();
        let pairs = subset_pairs(&corpus, 10_000, 1000);
        assert_eq!(pairs, vec![(0, 1), (3, 0), (3, 1)]);
    }
}
