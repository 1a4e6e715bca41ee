use alloc::format;

use crate::{Error, Result};

/// Arguments of `phi` above this bound are refused: beyond it the `f64`
/// evaluation no longer separates consecutive integers.
pub const PHI_ARG_LIMIT: u64 = 1 << 50;

/// Smallest offset for which `philoglog(s)` starts at a positive value.
pub const PHILOGLOG_MIN_OFFSET: u64 = 3;

/// `⌊x · ln ln x⌋` for `3 ≤ x ≤ PHI_ARG_LIMIT`.
pub fn phi(x: u64) -> Option<u64> {
    if !(3..=PHI_ARG_LIMIT).contains(&x) {
        return None;
    }
    let xf = x as f64;
    let v = libm::floor(xf * libm::log(libm::log(xf)));
    Some(v as u64)
}

/// Built-in strictly increasing generators, indexed from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Enumerator {
    /// `n²`
    Squares,
    /// `⌊(n+s)·ln ln(n+s)⌋`
    PhiLogLog(u64),
    /// `n!`
    Factorial,
    /// `2^(n²)`
    Pow2Sq,
}

impl Enumerator {
    /// Builds `philoglog(s)`, checking positivity and strict growth on the
    /// first `10⁴` indices.
    pub fn philoglog(s: u64) -> Result<Self> {
        if s < PHILOGLOG_MIN_OFFSET {
            return Err(Error::InvalidArgument(format!(
                "philoglog offset must be at least {PHILOGLOG_MIN_OFFSET}, got {s}"
            )));
        }
        let e = Enumerator::PhiLogLog(s);
        e.check_increasing(10_000)?;
        Ok(e)
    }

    fn check_increasing(&self, upto: u64) -> Result<()> {
        let mut prev = 0u64;
        for n in 1..=upto {
            let Some(v) = self.gen(n) else { break };
            if v <= prev {
                return Err(Error::InvalidArgument(format!(
                    "enumerator {} is not strictly increasing at index {n}",
                    self.name()
                )));
            }
            prev = v;
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            Enumerator::Squares => "squares",
            Enumerator::PhiLogLog(_) => "philoglog",
            Enumerator::Factorial => "factorial",
            Enumerator::Pow2Sq => "pow2sq",
        }
    }

    /// Value at index `n ≥ 1`; `None` once it leaves `u64`.
    pub fn gen(&self, n: u64) -> Option<u64> {
        if n == 0 {
            return None;
        }
        match *self {
            Enumerator::Squares => n.checked_mul(n),
            Enumerator::PhiLogLog(s) => phi(n.checked_add(s)?),
            Enumerator::Factorial => (1..=n).try_fold(1u64, |acc, k| acc.checked_mul(k)),
            Enumerator::Pow2Sq => {
                let e = n.checked_mul(n)?;
                if e < 64 {
                    Some(1u64 << e)
                } else {
                    None
                }
            }
        }
    }

    /// Number of indices `n ≥ 1` with `gen(n) ≤ x`.
    pub fn count_le(&self, x: u64) -> u64 {
        match *self {
            Enumerator::Squares => x.isqrt(),
            Enumerator::Factorial | Enumerator::Pow2Sq => {
                let mut n = 0;
                while matches!(self.gen(n + 1), Some(v) if v <= x) {
                    n += 1;
                }
                n
            }
            Enumerator::PhiLogLog(s) => {
                // gen(n) ≥ n, so the answer lies in [0, x].
                let mut lo = 0u64;
                let mut hi = x.min(PHI_ARG_LIMIT - s);
                while lo < hi {
                    let mid = lo + (hi - lo).div_ceil(2);
                    match self.gen(mid) {
                        Some(v) if v <= x => lo = mid,
                        _ => hi = mid - 1,
                    }
                }
                lo
            }
        }
    }
}
