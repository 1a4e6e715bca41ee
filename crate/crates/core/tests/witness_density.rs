use num_rational::Ratio;
use sumideal::intset::{parse, Registry, SetExpr};
use sumideal::thm1::{delta, delta_n, rich_construct, DensityWitnessFamily};

const TRUNC: u64 = 200_000;

fn family() -> (DensityWitnessFamily, Registry) {
    let mut reg = Registry::with_builtins();
    let fam = DensityWitnessFamily::default_fin(TRUNC, &mut reg).unwrap();
    (fam, reg)
}

#[test]
fn whole_line_has_density_one() {
    let (fam, _) = family();
    assert!(fam.verified);
    let d = delta(&fam, &SetExpr::nat()).unwrap();
    assert_eq!(d.value, 1.0);
    assert_eq!(delta_n(&fam, 1, &SetExpr::nat()).unwrap().value, 1.0);
}

#[test]
fn finite_sets_vanish() {
    let (fam, reg) = family();
    for src in ["{1,2,3}", "{5,99,1000}", "inter(ap(2,2),ap(1,2))"] {
        let s = parse(src, &reg).unwrap();
        assert_eq!(delta(&fam, &s).unwrap().value, 0.0, "{src}");
    }
}

#[test]
fn witnesses_fire_their_own_component() {
    let (fam, _) = family();
    for n in 1..=fam.len() {
        let w = fam.witness(n).unwrap().clone();
        let c = delta_n(&fam, n, &w).unwrap();
        let expect = 1.0 / (n as f64 + 1.0) + 1.0 / (n as f64 * (n as f64 + 1.0));
        assert!((c.value - expect).abs() < 1e-12, "witness {n}: {}", c.value);
        assert!(delta(&fam, &w).unwrap().value >= 1.0 / (n as f64 + 1.0));
    }
}

#[test]
fn each_component_lies_in_its_band() {
    let (fam, reg) = family();
    let s = parse("union(blocks(w3),ap(1,3))", &reg).unwrap();
    let d = delta(&fam, &s).unwrap();
    for c in &d.per_component {
        let n = c.index as f64;
        assert!(c.value == 0.0 || (1.0 / (n + 1.0) - 1e-12..=1.0 / n + 1e-12).contains(&c.value));
    }
    let top = d.per_component.iter().map(|c| c.value).fold(0.0, f64::max);
    assert_eq!(d.value, top);
}

#[test]
fn rich_subsets_hit_their_targets() {
    let (fam, _) = family();
    for (p, q) in [(3u64, 10u64), (7, 10), (1, 1)] {
        let res = rich_construct(&fam, Ratio::new(p, q)).unwrap();
        let target = p as f64 / q as f64;
        assert!((res.delta.value - target).abs() <= 0.05, "r = {target}: {}", res.delta.value);
    }
}
