use num_rational::Ratio;
use proptest::prelude::*;
use sumideal::densities::{
    lower_asymptotic, lower_banach, lower_log, schnirelmann, upper_asymptotic, upper_banach, upper_log,
};
use sumideal::intset::{parse, Enumerator, Registry, SetExpr};
use sumideal::tad::SigmaString;
use sumideal::thm1::decompose_rich;

const TRUNC: u64 = 4000;

fn leaf() -> impl Strategy<Value = SetExpr> {
    let reg = Registry::with_builtins();
    prop_oneof![
        (0u64..20, 1u64..12).prop_map(|(a, d)| SetExpr::ap(a, d).unwrap()),
        prop::collection::vec(1u64..300, 0..8).prop_map(|v| SetExpr::finite(v).unwrap()),
        Just(SetExpr::Enum(Enumerator::Squares)),
        Just(SetExpr::Enum(Enumerator::Factorial)),
        (9u64..40).prop_map(|s| SetExpr::Enum(Enumerator::philoglog(s).unwrap())),
        Just(reg.expr("ex3").unwrap()),
        Just(reg.expr("cuberamp").unwrap()),
    ]
}

fn expr() -> impl Strategy<Value = SetExpr> {
    leaf().prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| SetExpr::union(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| SetExpr::inter(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| SetExpr::diff(a, b)),
            inner.clone().prop_map(SetExpr::compl),
            (inner, -30i64..30).prop_map(|(a, k)| SetExpr::shift(a, k)),
        ]
    })
}

fn brute_count(s: &SetExpr, a: u64, b: u64) -> u64 {
    (a..=b).filter(|&x| s.contains(x)).count() as u64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn count_agrees_with_membership(s in expr(), a in 1u64..500, len in 0u64..1500) {
        prop_assert_eq!(s.count(a, a + len).unwrap(), brute_count(&s, a, a + len));
    }

    #[test]
    fn cursors_agree_with_membership(s in expr(), lo in 1u64..800, len in 0u64..400) {
        let hi = lo + len;
        prop_assert_eq!(s.next_in(lo, hi), (lo..=hi).find(|&x| s.contains(x)));
        prop_assert_eq!(s.next_absent(lo, hi), (lo..=hi).find(|&x| !s.contains(x)));
    }

    #[test]
    fn iteration_lists_exactly_the_members(s in expr()) {
        let listed: Vec<u64> = s.iter_range(1, 600).collect();
        let scanned: Vec<u64> = (1..=600).filter(|&x| s.contains(x)).collect();
        prop_assert_eq!(listed, scanned);
    }

    #[test]
    fn complement_partitions_every_prefix(s in expr(), n in 1u64..3000) {
        let c = SetExpr::compl(s.clone());
        prop_assert_eq!(s.count(1, n).unwrap() + c.count(1, n).unwrap(), n);
    }

    #[test]
    fn printed_form_parses_back(s in expr()) {
        let reg = Registry::with_builtins();
        let back = parse(&s.to_string(), &reg).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn density_chain_holds(s in expr()) {
        let tol = 1e-9;
        let ud = upper_asymptotic(&s, TRUNC).unwrap().value;
        let ld = lower_asymptotic(&s, TRUNC).unwrap().value;
        let ubd = upper_banach(&s, TRUNC, TRUNC).unwrap().value;
        let lbd = lower_banach(&s, TRUNC, TRUNC).unwrap().value;
        let sch = schnirelmann(&s, TRUNC).unwrap().value;
        prop_assert!(sch <= ld + tol, "sch {} > ld {}", sch, ld);
        prop_assert!(ld <= ud + tol, "ld {} > ud {}", ld, ud);
        prop_assert!(ud <= ubd + tol, "ud {} > ubd {}", ud, ubd);
        prop_assert!(lbd <= ld + tol, "lbd {} > ld {}", lbd, ld);
        for v in [ud, ld, ubd, lbd, sch] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn log_densities_are_ordered(s in expr()) {
        let uld = upper_log(&s, TRUNC).unwrap().value;
        let lld = lower_log(&s, TRUNC).unwrap().value;
        prop_assert!(lld <= uld + 1e-9);
    }

    #[test]
    fn translation_moves_upper_density_boundedly(s in expr(), m in 1i64..100) {
        let half = TRUNC.div_ceil(2) as f64;
        let base = upper_asymptotic(&s, TRUNC).unwrap().value;
        for k in [m, -m] {
            let moved = upper_asymptotic(&SetExpr::shift(s.clone(), k), TRUNC).unwrap().value;
            prop_assert!((moved - base).abs() <= m as f64 / half + 1e-9, "shift {}: {} vs {}", k, moved, base);
        }
    }

    #[test]
    fn rich_decomposition_is_exact(q in 1u64..10_000, p_frac in 0.0f64..1.0) {
        let p = ((p_frac * q as f64).ceil() as u64).clamp(1, q);
        let r = Ratio::new(p, q);
        let (n0, lambda) = decompose_rich(r).unwrap();
        prop_assert!(n0 >= 1);
        prop_assert!(lambda > Ratio::from_integer(0) && lambda <= Ratio::from_integer(1));
        prop_assert_eq!(Ratio::new(1, n0 + 1) + lambda / Ratio::from_integer(n0 * (n0 + 1)), r);
    }

    #[test]
    fn window_indices_separate_branches(a in prop::collection::vec(0u8..2, 1..12), b in prop::collection::vec(0u8..2, 1..12)) {
        let (sa, sb) = (SigmaString::new(a).unwrap(), SigmaString::new(b).unwrap());
        if let Some(m) = sa.first_difference(&sb) {
            prop_assert!(sa.le_int(m) != sb.le_int(m));
            prop_assert_eq!(sa.le_int(m - 1), sb.le_int(m - 1));
        } else {
            prop_assert_eq!(sa.le_int(12), sb.le_int(12));
        }
    }
}
