use alloc::{format, string::String, vec::Vec};

use crate::ideals::Cert;
use crate::{Error, Result};

/// Marks a table as a prefix of a member of a verified almost-disjoint
/// family, or as a subset of one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemberTag {
    /// Identifies the skeleton the member was generated from.
    pub family: String,
    /// Branch bits; trailing zeros are insignificant.
    pub sigma: Vec<u8>,
    /// `true` for the member itself, `false` for a subset of it.
    pub exact: bool,
    /// Whether the family passed `verify_tad` before tagging.
    pub verified: bool,
}

impl MemberTag {
    /// Equality of the infinite branches, padding with zeros.
    pub fn same_branch(&self, other: &MemberTag) -> bool {
        let n = self.sigma.len().max(other.sigma.len());
        (0..n).all(|i| {
            self.sigma.get(i).copied().unwrap_or(0) == other.sigma.get(i).copied().unwrap_or(0)
        })
    }
}

/// Finite list of disjoint blocks with optional ideal certificates.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    blocks: Vec<(u64, u64)>,
    /// The table describes its intended set exactly on `[1, horizon]`.
    pub horizon: u64,
    /// Certificates keyed by weight name.
    pub certs: Vec<(String, Cert)>,
    pub tag: Option<MemberTag>,
}

impl Table {
    pub fn new(blocks: Vec<(u64, u64)>, horizon: u64) -> Result<Self> {
        for (i, &(l, r)) in blocks.iter().enumerate() {
            if l == 0 || l > r {
                return Err(Error::InvalidArgument(format!("malformed block [{l}, {r}]")));
            }
            if i > 0 && blocks[i - 1].1 >= l {
                return Err(Error::InvalidArgument(format!(
                    "block [{l}, {r}] overlaps or precedes its predecessor"
                )));
            }
        }
        Ok(Table { blocks, horizon, certs: Vec::new(), tag: None })
    }

    /// Singleton blocks for a strictly increasing list.
    pub fn from_elements(elements: &[u64], horizon: u64) -> Result<Self> {
        Table::new(elements.iter().map(|&x| (x, x)).collect(), horizon)
    }

    pub fn with_cert(mut self, weight: &str, cert: Cert) -> Self {
        self.certs.push((weight.into(), cert));
        self
    }

    pub fn with_tag(mut self, tag: MemberTag) -> Self {
        self.tag = Some(tag);
        self
    }

    pub fn blocks(&self) -> &[(u64, u64)] {
        &self.blocks
    }

    pub fn cert(&self, weight: &str) -> Option<Cert> {
        self.certs.iter().find(|(w, _)| w == weight).map(|&(_, c)| c)
    }
}

/// Block layouts: closed forms plus explicit tables.
#[derive(Clone, Debug, PartialEq)]
pub enum Schedule {
    /// `(a_{2n}, a_{2n+1}]` with `a_n = 2^(n²)`, `n ≥ 1`.
    Prop1i,
    /// `[b_{2n}, b_{2n+1}]` with `b_n = n!`, `n ≥ 1`.
    Example3,
    /// Every other block of [`Schedule::Example3`], starting with the first.
    Example3Alt,
    /// `[n³, n³ + n²]`, `n ≥ 1`: block lengths and gaps both grow without bound.
    CubeRamp,
    Table(Table),
}

fn pow2(e: u64) -> Option<u64> {
    (e < 64).then(|| 1u64 << e)
}

fn factorial(n: u64) -> Option<u64> {
    (1..=n).try_fold(1u64, |acc, k| acc.checked_mul(k))
}

impl Schedule {
    fn closed_block(&self, i: usize) -> Option<(u64, u64)> {
        let n = i as u64 + 1;
        match self {
            Schedule::Prop1i => {
                let l = pow2((2 * n) * (2 * n))?.checked_add(1)?;
                let r = pow2((2 * n + 1) * (2 * n + 1))?;
                Some((l, r))
            }
            Schedule::Example3 => Some((factorial(2 * n)?, factorial(2 * n + 1)?)),
            Schedule::Example3Alt => {
                let m = 2 * n - 1;
                Some((factorial(2 * m)?, factorial(2 * m + 1)?))
            }
            Schedule::CubeRamp => {
                let c = n.checked_mul(n)?.checked_mul(n)?;
                Some((c, c.checked_add(n * n)?))
            }
            Schedule::Table(t) => t.blocks.get(i).copied(),
        }
    }

    fn closed_len(&self) -> usize {
        if let Schedule::Table(t) = self {
            return t.blocks.len();
        }
        // Blocks exist for a prefix of indices; find its length.
        let mut hi = 1usize;
        while self.closed_block(hi).is_some() {
            hi *= 2;
        }
        let mut lo = 0usize;
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.closed_block(mid).is_some() {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

/// A named union of disjoint intervals `[l_i, r_i]` with `r_i < l_{i+1}`.
#[derive(Clone, Debug)]
pub struct BlockSchedule {
    name: String,
    schedule: Schedule,
    len: usize,
}

impl PartialEq for BlockSchedule {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.schedule == other.schedule
    }
}

pub(crate) fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name.bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_')
        && name.as_bytes()[0].is_ascii_lowercase()
}

impl BlockSchedule {
    pub fn new(name: &str, schedule: Schedule) -> Result<Self> {
        if !valid_name(name) {
            return Err(Error::InvalidArgument(format!("invalid schedule name {name:?}")));
        }
        let len = schedule.closed_len();
        Ok(BlockSchedule { name: name.into(), schedule, len })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn table(&self) -> Option<&Table> {
        match &self.schedule {
            Schedule::Table(t) => Some(t),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn block(&self, i: usize) -> Option<(u64, u64)> {
        if i < self.len {
            self.schedule.closed_block(i)
        } else {
            None
        }
    }

    /// Index of the first block whose right end is `≥ x`.
    fn first_reaching(&self, x: u64) -> usize {
        let (mut lo, mut hi) = (0usize, self.len);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            let (_, r) = self.block(mid).expect("index below len");
            if r < x {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }

    pub fn contains(&self, n: u64) -> bool {
        self.block(self.first_reaching(n)).is_some_and(|(l, _)| l <= n)
    }

    pub fn next_in(&self, lo: u64, hi: u64) -> Option<u64> {
        let (l, _) = self.block(self.first_reaching(lo))?;
        let x = l.max(lo);
        (x <= hi).then_some(x)
    }

    /// Smallest `x ∈ [lo, hi]` outside every block.
    pub fn next_absent(&self, lo: u64, hi: u64) -> Option<u64> {
        let x = match self.block(self.first_reaching(lo)) {
            Some((l, r)) if l <= lo => r.checked_add(1)?,
            _ => lo,
        };
        (x <= hi).then_some(x)
    }

    pub fn count(&self, a: u64, b: u64) -> u64 {
        let mut i = self.first_reaching(a);
        let mut total = 0;
        while let Some((l, r)) = self.block(i) {
            if l > b {
                break;
            }
            total += r.min(b) - l.max(a) + 1;
            i += 1;
        }
        total
    }

    pub fn max_element(&self) -> Option<u64> {
        self.len.checked_sub(1).and_then(|i| self.block(i)).map(|(_, r)| r)
    }
}
