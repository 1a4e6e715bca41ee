//! Seeded random set expressions and the hand-built corpora of the
//! acceptance suite.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sumideal::intset::{Enumerator, Registry};
use sumideal::SetExpr;

const BLOCK_LEAVES: [&str; 3] = ["cuberamp", "prop1i", "ex3"];

fn leaf<R: Rng>(rng: &mut R, registry: &Registry) -> SetExpr {
    match rng.gen_range(0..10) {
        0 => {
            let k = rng.gen_range(1..8);
            SetExpr::finite((0..k).map(|_| rng.gen_range(1..200u64))).expect("positive elements")
        }
        1..=3 => SetExpr::ap(rng.gen_range(1..30), rng.gen_range(1..12)).expect("positive step"),
        4 => SetExpr::enumerator(Enumerator::Squares),
        5 => SetExpr::enumerator(Enumerator::philoglog(rng.gen_range(3..10)).expect("valid offset")),
        6 => SetExpr::enumerator(if rng.gen_bool(0.5) { Enumerator::Factorial } else { Enumerator::Pow2Sq }),
        _ => registry.expr(BLOCK_LEAVES.choose(rng).expect("nonempty")).expect("builtin schedule"),
    }
}

/// A random expression of combinator depth at most `depth`.
pub fn random_expr<R: Rng>(rng: &mut R, depth: u32, registry: &Registry) -> SetExpr {
    if depth == 0 || rng.gen_bool(0.3) {
        return leaf(rng, registry);
    }
    let sub = |rng: &mut R| random_expr(rng, depth - 1, registry);
    match rng.gen_range(0..5) {
        0 => SetExpr::union(sub(rng), sub(rng)),
        1 => SetExpr::inter(sub(rng), sub(rng)),
        2 => SetExpr::diff(sub(rng), sub(rng)),
        3 => SetExpr::compl(sub(rng)),
        _ => {
            let k = rng.gen_range(-20..=20);
            SetExpr::shift(sub(rng), k)
        }
    }
}

/// `count` random expressions of depth ≤ 3 from `seed`.
pub fn seeded(seed: u64, count: usize, registry: &Registry) -> Vec<SetExpr> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_expr(&mut rng, 3, registry)).collect()
}

/// `count` random index pairs `(i, j)` into a corpus of length `len`.
pub fn random_pairs(seed: u64, len: usize, count: usize) -> Vec<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    (0..count).map(|_| (rng.gen_range(0..len), rng.gen_range(0..len))).collect()
}

/// Every unordered pair, including `(i, i)`.
pub fn all_pairs(len: usize) -> Vec<(usize, usize)> {
    (0..len).flat_map(|i| (i..len).map(move |j| (i, j))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_corpus_is_reproducible() {
        let reg = Registry::with_builtins();
        let a = seeded(0, 50, &reg);
        let b = seeded(0, 50, &reg);
        assert_eq!(a, b);
        assert_ne!(a, seeded(1, 50, &reg));
        let printed: Vec<String> = a.iter().map(|e| e.to_string()).collect();
        for (e, p) in a.iter().zip(&printed) {
            assert_eq!(&sumideal::intset::parse(p, &reg).unwrap(), e);
        }
    }
}
