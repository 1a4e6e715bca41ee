//! Truncated estimators for asymptotic, Banach, logarithmic, Schnirelmann
//! and relative densities.
//!
//! A limsup is estimated as the maximum of the ratio over a geometric
//! checkpoint ladder restricted to the tail window `[⌈N/2⌉, N]`; a liminf as
//! the minimum. `stability` is the spread of the ratio over the last half
//! of the checkpoints and exposes sequences that have not settled.

use alloc::{format, vec, vec::Vec};

use crate::intset::SetExpr;
use crate::numeric::CompensatedSum;
use crate::{Error, Result};

/// Growth factor of the checkpoint ladder.
pub const LADDER_RATIO: f64 = 1.05;
/// Growth factor for Banach window lengths below the tail.
pub const BANACH_SHORT_RATIO: f64 = 1.5;
/// Schnirelmann density inspects every `n` up to this bound.
pub const SCHNIRELMANN_DENSE_UPTO: u64 = 10_000;
/// Smallest truncation accepted by the tail estimators.
pub const MIN_TRUNCATION: u64 = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Limsup,
    Liminf,
    Limit,
    Inf,
}

impl Kind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Kind::Limsup => "limsup",
            Kind::Liminf => "liminf",
            Kind::Limit => "limit",
            Kind::Inf => "inf",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityEstimate {
    pub value: f64,
    pub kind: Kind,
    /// `(n, ratio)` with strictly increasing `n`.
    pub checkpoints: Vec<(u64, f64)>,
    pub tail_window: (u64, u64),
    pub stability: f64,
}

/// `⌈r^j⌉` for `j = 0, 1, ...` below `n_max`, deduplicated, then `n_max`.
pub fn ladder(n_max: u64, ratio: f64) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    let mut j = 0i32;
    loop {
        let x = libm::ceil(libm::pow(ratio, f64::from(j))) as u64;
        if x >= n_max {
            break;
        }
        if out.last() != Some(&x) {
            out.push(x);
        }
        j += 1;
    }
    out.push(n_max);
    out
}

pub fn tail_window(n: u64) -> (u64, u64) {
    (n.div_ceil(2), n)
}

fn stability(checkpoints: &[(u64, f64)]) -> f64 {
    let half = &checkpoints[checkpoints.len() / 2..];
    let (lo, hi) = half
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, r)| (lo.min(r), hi.max(r)));
    if half.is_empty() {
        0.0
    } else {
        hi - lo
    }
}

fn extremum(checkpoints: &[(u64, f64)], window: (u64, u64), kind: Kind) -> f64 {
    let inside = checkpoints.iter().filter(|(n, _)| (window.0..=window.1).contains(n)).map(|&(_, r)| r);
    match kind {
        Kind::Limsup => inside.fold(0.0, f64::max),
        _ => inside.fold(1.0, f64::min),
    }
}

fn estimate(checkpoints: Vec<(u64, f64)>, window: (u64, u64), kind: Kind) -> DensityEstimate {
    let value = extremum(&checkpoints, window, kind);
    let stability = stability(&checkpoints);
    DensityEstimate { value, kind, checkpoints, tail_window: window, stability }
}

fn require_truncation(n: u64) -> Result<()> {
    if n < MIN_TRUNCATION {
        return Err(Error::InvalidArgument(format!("truncation N = {n} is below {MIN_TRUNCATION}")));
    }
    Ok(())
}

/// True when prefix counts come from closed forms rather than iteration.
fn counts_in_closed_form(s: &SetExpr) -> bool {
    match s {
        SetExpr::Union(..) | SetExpr::Inter(..) | SetExpr::Diff(..) => false,
        SetExpr::Compl(a) | SetExpr::Shift(a, _) => counts_in_closed_form(a),
        _ => true,
    }
}

/// `S(n)` at each of the increasing `points`.
pub fn prefix_counts(s: &SetExpr, points: &[u64]) -> Vec<u64> {
    if counts_in_closed_form(s) {
        return points.iter().map(|&n| s.count_upto(n)).collect();
    }
    let last = points.last().copied().unwrap_or(0);
    let mut out = Vec::with_capacity(points.len());
    let mut count = 0u64;
    let mut it = s.iter_range(1, last).peekable();
    for &p in points {
        while it.next_if(|&x| x <= p).is_some() {
            count += 1;
        }
        out.push(count);
    }
    out
}

fn asymptotic_checkpoints(s: &SetExpr, n: u64) -> Vec<(u64, f64)> {
    let points = ladder(n, LADDER_RATIO);
    let counts = prefix_counts(s, &points);
    points.iter().zip(counts).map(|(&p, c)| (p, c as f64 / p as f64)).collect()
}

/// Upper asymptotic density, `limsup S(n)/n`.
pub fn upper_asymptotic(s: &SetExpr, n: u64) -> Result<DensityEstimate> {
    require_truncation(n)?;
    Ok(estimate(asymptotic_checkpoints(s, n), tail_window(n), Kind::Limsup))
}

/// Lower asymptotic density, `liminf S(n)/n`.
pub fn lower_asymptotic(s: &SetExpr, n: u64) -> Result<DensityEstimate> {
    require_truncation(n)?;
    Ok(estimate(asymptotic_checkpoints(s, n), tail_window(n), Kind::Liminf))
}

/// Window lengths for the Banach estimators: a coarse ladder below
/// `⌈W/2⌉`, then the asymptotic ladder inside `[⌈W/2⌉, W]`.
pub fn banach_lengths(w: u64) -> Vec<u64> {
    let (lo, _) = tail_window(w);
    let mut out: Vec<u64> = ladder(w, BANACH_SHORT_RATIO).into_iter().filter(|&l| l < lo).collect();
    out.extend(ladder(w, LADDER_RATIO).into_iter().filter(|&l| l >= lo));
    out
}

fn banach(s: &SetExpr, n: u64, w: u64, kind: Kind) -> Result<DensityEstimate> {
    if w == 0 || w > n {
        return Err(Error::InvalidArgument(format!("window bound W = {w} must lie in [1, N = {n}]")));
    }
    let len = usize::try_from(n).map_err(|_| Error::InvalidArgument("N too large".into()))?;
    let mut pc: Vec<u32> = vec![0; len + 1];
    for x in s.iter_range(1, n) {
        pc[x as usize] = 1;
    }
    for i in 1..=len {
        pc[i] += pc[i - 1];
    }
    let checkpoints = banach_lengths(w)
        .into_iter()
        .map(|l| {
            let l_us = l as usize;
            let windows = (0..=len - l_us).map(|k| pc[k + l_us] - pc[k]);
            let best = match kind {
                Kind::Limsup => windows.max().unwrap_or(0),
                _ => windows.min().unwrap_or(0),
            };
            (l, f64::from(best) / l as f64)
        })
        .collect();
    Ok(estimate(checkpoints, tail_window(w), kind))
}

/// Upper Banach density: window lengths `L ≤ W`, positions `k + L ≤ N`.
pub fn upper_banach(s: &SetExpr, n: u64, w: u64) -> Result<DensityEstimate> {
    banach(s, n, w, Kind::Limsup)
}

/// Lower Banach density, the dual of [`upper_banach`].
pub fn lower_banach(s: &SetExpr, n: u64, w: u64) -> Result<DensityEstimate> {
    banach(s, n, w, Kind::Liminf)
}

fn log_checkpoints(s: &SetExpr, n: u64) -> Vec<(u64, f64)> {
    let points = ladder(n, LADDER_RATIO);
    let mut harmonic = Vec::with_capacity(points.len());
    let mut h = CompensatedSum::default();
    let mut next = 0usize;
    for k in 1..=n {
        h.add(1.0 / k as f64);
        if points[next] == k {
            harmonic.push(h.value());
            next += 1;
        }
    }
    let mut partial = CompensatedSum::default();
    let mut it = s.iter_range(1, n).peekable();
    points
        .iter()
        .zip(harmonic)
        .map(|(&p, hp)| {
            while let Some(a) = it.next_if(|&x| x <= p) {
                partial.add(1.0 / a as f64);
            }
            (p, partial.value() / hp)
        })
        .collect()
}

/// Upper logarithmic density.
pub fn upper_log(s: &SetExpr, n: u64) -> Result<DensityEstimate> {
    require_truncation(n)?;
    Ok(estimate(log_checkpoints(s, n), tail_window(n), Kind::Limsup))
}

/// Lower logarithmic density.
pub fn lower_log(s: &SetExpr, n: u64) -> Result<DensityEstimate> {
    require_truncation(n)?;
    Ok(estimate(log_checkpoints(s, n), tail_window(n), Kind::Liminf))
}

/// Schnirelmann density `inf_{n ≥ 1} S(n)/n` over `[1, N]`.
pub fn schnirelmann(s: &SetExpr, n: u64) -> Result<DensityEstimate> {
    if n == 0 {
        return Err(Error::InvalidArgument("truncation N must be positive".into()));
    }
    let mut points: Vec<u64> = (1..=n.min(SCHNIRELMANN_DENSE_UPTO)).collect();
    points.extend(ladder(n, LADDER_RATIO).into_iter().filter(|&p| p > SCHNIRELMANN_DENSE_UPTO));
    let counts = prefix_counts(s, &points);
    let checkpoints: Vec<(u64, f64)> =
        points.iter().zip(counts).map(|(&p, c)| (p, c as f64 / p as f64)).collect();
    Ok(estimate(checkpoints, (1, n), Kind::Inf))
}

/// Upper density of `S` relative to `X`: `limsup (S ∩ X)(n) / X(n)`.
pub fn relative_upper(s: &SetExpr, x: &SetExpr, n: u64) -> Result<DensityEstimate> {
    require_truncation(n)?;
    let points = ladder(n, LADDER_RATIO);
    let mut checkpoints = Vec::new();
    let (mut in_x, mut in_both) = (0u64, 0u64);
    let mut it = x.iter_range(1, n).peekable();
    for &p in &points {
        while let Some(e) = it.next_if(|&e| e <= p) {
            in_x += 1;
            if s.contains(e) {
                in_both += 1;
            }
        }
        if in_x > 0 {
            checkpoints.push((p, in_both as f64 / in_x as f64));
        }
    }
    if in_x == 0 {
        return Err(Error::EmptyReference(n));
    }
    Ok(estimate(checkpoints, tail_window(n), Kind::Limsup))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intset::{parse, Registry};

    fn p(s: &str) -> SetExpr {
        parse(s, &Registry::with_builtins()).unwrap()
    }

    /// Ratios `S(n)/n` recomputed by a membership scan.
    fn scan_ratios(s: &SetExpr, points: &[u64]) -> Vec<f64> {
        let mut count = 0u64;
        let mut out = Vec::new();
        let mut next = 0;
        for k in 1..=*points.last().unwrap() {
            if s.contains(k) {
                count += 1;
            }
            if points[next] == k {
                out.push(count as f64 / k as f64);
                next += 1;
            }
        }
        out
    }

    #[test]
    fn ladder_shape() {
        let l = ladder(1000, LADDER_RATIO);
        assert_eq!(l[..3], [1, 2, 3]);
        assert_eq!(*l.last().unwrap(), 1000);
        assert!(l.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn evens_have_density_one_half() {
        let e = upper_asymptotic(&p("ap(2,2)"), 1_000_000).unwrap();
        assert!((e.value - 0.5).abs() < 1e-3);
        assert_eq!(e.tail_window, (500_000, 1_000_000));
        let l = lower_asymptotic(&p("ap(2,2)"), 1_000_000).unwrap();
        assert!((l.value - 0.5).abs() < 1e-3);
    }

    #[test]
    fn squares_are_sparse() {
        assert!(upper_asymptotic(&p("squares"), 1_000_000).unwrap().value <= 2e-3);
    }

    #[test]
    fn prop1i_matches_membership_scan() {
        let s = p("blocks(prop1i)");
        let e = upper_asymptotic(&s, 1_000_000).unwrap();
        let pts: Vec<u64> = e.checkpoints.iter().map(|c| c.0).collect();
        let oracle = scan_ratios(&s, &pts);
        for ((_, r), o) in e.checkpoints.iter().zip(oracle) {
            assert_eq!(*r, o);
        }
    }

    #[test]
    fn nat_has_lower_density_one() {
        assert_eq!(lower_asymptotic(&SetExpr::nat(), 1_000_000).unwrap().value, 1.0);
    }

    #[test]
    fn banach_of_a_progression() {
        let e = upper_banach(&p("ap(5,7)"), 100_000, 1000).unwrap();
        assert!((e.value - 1.0 / 7.0).abs() <= 1e-2);
        let l = lower_banach(&p("ap(2,2)"), 100_000, 1000).unwrap();
        assert!((l.value - 0.5).abs() <= 1e-2);
        assert_eq!(lower_banach(&SetExpr::nat(), 10_000, 100).unwrap().value, 1.0);
    }

    #[test]
    fn banach_on_long_blocks_and_long_gaps() {
        let s = p("blocks(cuberamp)");
        let up = upper_banach(&s, 1_000_000, 1000).unwrap();
        assert!(up.value >= 0.99);
        let low = lower_banach(&s, 1_000_000, 1000).unwrap();
        assert!(low.value <= 1e-2);
        // Oracle: a direct scan of every window of the longest length.
        let l = 1000u64;
        let best = (0..=1_000_000 - l).step_by(97).map(|k| s.count(k + 1, k + l).unwrap()).max().unwrap();
        assert_eq!(best, l);
    }

    #[test]
    fn banach_of_a_short_finite_set() {
        let s = SetExpr::finite(1..=100).unwrap();
        let e = upper_banach(&s, 100_000, 1000).unwrap();
        let at_w = e.checkpoints.iter().find(|c| c.0 == 1000).unwrap().1;
        assert!(at_w <= 0.1);
        assert!(upper_banach(&s, 100, 1000).is_err());
    }

    #[test]
    fn log_density() {
        // The even-number log ratio at n is H(n/2) / (2 H(n)), which approaches
        // 1/2 only at rate 1/log n: about 0.476 at 10⁶.
        let e = upper_log(&p("ap(2,2)"), 1_000_000).unwrap();
        let h = |m: u64| (1..=m).map(|k| 1.0 / k as f64).sum::<f64>();
        let (at, _) = *e.checkpoints.iter().find(|c| c.1 == e.value).unwrap();
        assert!((e.value - h(at / 2) / (2.0 * h(at))).abs() < 1e-12);
        assert!((e.value - 0.5).abs() < 3e-2);
        assert_eq!(upper_log(&SetExpr::nat(), 1_000_000).unwrap().value, 1.0);
        // π²/6 over H(10⁶) is about 0.114; the ratio drops below 0.1 near 8·10⁶,
        // so the tail window clears it from N = 2·10⁷.
        let sq = upper_log(&p("squares"), 1_000_000).unwrap();
        assert!(sq.value <= 0.12);
        assert!(upper_log(&p("squares"), 20_000_000).unwrap().value <= 0.1);
        let tail: Vec<f64> = sq.checkpoints.iter().filter(|c| c.0 >= 1000).map(|c| c.1).collect();
        assert!(tail.windows(2).all(|w| w[1] <= w[0]));
        // Oracle for the last checkpoint by direct summation.
        let num: f64 = (1..=1000u64).map(|k| 1.0 / (k * k) as f64).sum();
        let den: f64 = (1..=1_000_000u64).map(|k| 1.0 / k as f64).sum();
        assert!((sq.checkpoints.last().unwrap().1 - num / den).abs() < 1e-12);
    }

    #[test]
    fn schnirelmann_examples() {
        assert_eq!(schnirelmann(&SetExpr::nat(), 1000).unwrap().value, 1.0);
        assert_eq!(schnirelmann(&p("ap(2,2)"), 1000).unwrap().value, 0.0);
        let odds = schnirelmann(&p("ap(1,2)"), 1000).unwrap();
        let oracle = (1..=1000u64).map(|n| n.div_ceil(2) as f64 / n as f64).fold(1.0, f64::min);
        assert_eq!(odds.value, oracle);
        assert_eq!(odds.value, 0.5);
    }

    #[test]
    fn relative_density_examples() {
        let evens = p("ap(2,2)");
        assert_eq!(relative_upper(&evens, &evens, 1_000_000).unwrap().value, 1.0);
        let fours = p("inter(ap(4,4),ap(2,2))");
        assert!((relative_upper(&fours, &evens, 1_000_000).unwrap().value - 0.5).abs() < 1e-3);
        assert!(matches!(
            relative_upper(&evens, &p("{5000}"), 1000),
            Err(Error::EmptyReference(1000))
        ));
    }

    #[test]
    fn complement_ratios_sum_to_one() {
        let s = p("union(squares,blocks(ex3))");
        let a = upper_asymptotic(&s, 100_000).unwrap();
        let b = upper_asymptotic(&SetExpr::compl(s), 100_000).unwrap();
        for (x, y) in a.checkpoints.iter().zip(&b.checkpoints) {
            let (ca, cb) = ((x.1 * x.0 as f64).round(), (y.1 * y.0 as f64).round());
            assert_eq!(ca + cb, x.0 as f64);
        }
    }
}
