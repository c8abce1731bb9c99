//! Element sets over `[n]`, rank sets, and the lexicographic order `≺_L`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::binomial::choose;
use crate::error::{Error, Result};

/// Largest supported universe. Element `x` lives in bit `x - 1` of a `u64`.
pub const MAX_UNIVERSE: usize = 62;

pub(crate) fn check_universe(n: usize) -> Result<()> {
    if n == 0 || n > MAX_UNIVERSE {
        return Err(Error::Universe(n));
    }
    Ok(())
}

pub(crate) fn universe_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// A subset of `[n] = {1, ..., n}` with bit-indexed membership.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ElementSet {
    bits: u64,
    n: u8,
}

impl ElementSet {
    pub fn new<I: IntoIterator<Item = usize>>(n: usize, members: I) -> Result<Self> {
        check_universe(n)?;
        let mut bits = 0u64;
        for x in members {
            if x == 0 || x > n {
                return Err(Error::Element { element: x, n });
            }
            bits |= 1 << (x - 1);
        }
        Ok(Self { bits, n: n as u8 })
    }

    pub fn from_bits(n: usize, bits: u64) -> Result<Self> {
        check_universe(n)?;
        if bits & !universe_mask(n) != 0 {
            let element = 64 - bits.leading_zeros() as usize;
            return Err(Error::Element { element, n });
        }
        Ok(Self { bits, n: n as u8 })
    }

    /// Caller guarantees `bits` fits in `[n]`.
    pub(crate) fn from_bits_unchecked(n: usize, bits: u64) -> Self {
        debug_assert!(bits & !universe_mask(n) == 0);
        Self { bits, n: n as u8 }
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::from_bits(n, 0)
    }

    /// `[k] = {1, ..., k}`.
    pub fn prefix(n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::Element { element: k, n });
        }
        Self::from_bits(n, universe_mask(k))
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn universe(&self) -> usize {
        self.n as usize
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, x: usize) -> bool {
        (1..=64).contains(&x) && self.bits & (1 << (x - 1)) != 0
    }

    pub fn smallest(&self) -> Option<usize> {
        (self.bits != 0).then(|| self.bits.trailing_zeros() as usize + 1)
    }

    pub fn largest(&self) -> Option<usize> {
        (self.bits != 0).then(|| 64 - self.bits.leading_zeros() as usize)
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> {
        let mut rest = self.bits;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let x = rest.trailing_zeros() as usize + 1;
            rest &= rest - 1;
            Some(x)
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn with(&self, x: usize) -> Self {
        debug_assert!(x >= 1 && x <= self.universe());
        Self::from_bits_unchecked(self.universe(), self.bits | 1 << (x - 1))
    }

    pub fn without(&self, x: usize) -> Self {
        debug_assert!(x >= 1 && x <= self.universe());
        Self::from_bits_unchecked(self.universe(), self.bits & !(1 << (x - 1)))
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::from_bits_unchecked(self.universe(), self.bits | other.bits)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self::from_bits_unchecked(self.universe(), self.bits & other.bits)
    }

    pub fn difference(&self, other: &Self) -> Self {
        Self::from_bits_unchecked(self.universe(), self.bits & !other.bits)
    }

    /// `[n] \ self`.
    pub fn complement(&self) -> Self {
        Self::from_bits_unchecked(self.universe(), !self.bits & universe_mask(self.universe()))
    }

    pub fn intersection_len(&self, other: &Self) -> usize {
        (self.bits & other.bits).count_ones() as usize
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.bits & !other.bits == 0
    }

    /// `self ≺_L other` extended to sets of any size: the smaller element of
    /// the symmetric difference decides. On a single layer this is `≺_L`.
    pub(crate) fn lex_cmp(&self, other: &Self) -> Ordering {
        other.bits.reverse_bits().cmp(&self.bits.reverse_bits())
    }

    /// All supersets of `self` of cardinality `size`, in `≺_L` order.
    pub fn supersets_of_size(&self, size: usize) -> impl Iterator<Item = ElementSet> {
        let base = *self;
        let extra = size.checked_sub(self.len());
        let pool: Vec<usize> = self.complement().iter().collect();
        let n = self.universe();
        Subsets::new(pool, extra).map(move |bits| ElementSet::from_bits_unchecked(n, base.bits | bits))
    }
}

impl Ord for ElementSet {
    /// Cardinality first, then `≺_L` within a layer.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.lex_cmp(other))
            .then_with(|| self.n.cmp(&other.n))
    }
}

impl PartialOrd for ElementSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for ElementSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

/// Iterator over the `k`-subsets of a sorted pool of elements, yielded as bit
/// masks in lexicographic order of the sorted member lists.
pub(crate) struct Subsets {
    pool: Vec<usize>,
    idx: Vec<usize>,
    done: bool,
}

impl Subsets {
    pub(crate) fn new(pool: Vec<usize>, k: Option<usize>) -> Self {
        match k {
            Some(k) if k <= pool.len() => Self {
                idx: (0..k).collect(),
                pool,
                done: false,
            },
            _ => Self {
                pool,
                idx: Vec::new(),
                done: true,
            },
        }
    }
}

impl Iterator for Subsets {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.done {
            return None;
        }
        let bits = self.idx.iter().fold(0u64, |b, &i| b | 1 << (self.pool[i] - 1));
        let k = self.idx.len();
        let p = self.pool.len();
        // advance to the next index combination
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < p - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(bits)
    }
}

/// All `k`-subsets of `[n]` in `≺_L` order.
pub fn k_subsets(n: usize, k: usize) -> impl Iterator<Item = ElementSet> {
    Subsets::new((1..=n).collect(), Some(k)).map(move |bits| ElementSet::from_bits_unchecked(n, bits))
}

/// Compare two sets of equal cardinality under `≺_L`:
/// `A ≺_L B` iff `min(A \ B) < min(B \ A)`.
pub fn lex_compare(a: &ElementSet, b: &ElementSet) -> Result<Ordering> {
    if a.len() != b.len() {
        return Err(Error::InvalidComparison {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.universe() != b.universe() {
        return Err(Error::Parameter(format!(
            "sets over different universes ({} vs {})",
            a.universe(),
            b.universe()
        )));
    }
    Ok(a.lex_cmp(b))
}

/// The `index`-th (1-based) `k`-subset of `[n]` in `≺_L` order.
pub fn lex_unrank(n: usize, k: usize, index: u128) -> Result<ElementSet> {
    check_universe(n)?;
    if k == 0 || k > n {
        return Err(Error::Range {
            what: "k",
            value: k as u128,
            expected: format!("1..={n}"),
        });
    }
    let total = choose(n, k);
    if index == 0 || index > total {
        return Err(Error::Range {
            what: "index",
            value: index,
            expected: format!("1..={total}"),
        });
    }
    let mut rest = index - 1;
    let mut bits = 0u64;
    let mut need = k;
    let mut x = 1;
    while need > 0 {
        // sets whose next member is x
        let with_x = choose(n - x, need - 1);
        if rest < with_x {
            bits |= 1 << (x - 1);
            need -= 1;
        } else {
            rest -= with_x;
        }
        x += 1;
    }
    Ok(ElementSet::from_bits_unchecked(n, bits))
}

/// 1-based position of `set` among the `|set|`-subsets of its universe under `≺_L`.
pub fn lex_rank(set: &ElementSet) -> Result<u128> {
    let n = set.universe();
    let k = set.len();
    if k == 0 {
        return Err(Error::Parameter("the empty set has no lex rank".into()));
    }
    let mut rank = 0u128;
    let mut need = k;
    for x in 1..=n {
        if need == 0 {
            break;
        }
        if set.contains(x) {
            need -= 1;
        } else {
            rank += choose(n - x, need - 1);
        }
    }
    Ok(rank + 1)
}

/// A non-empty set of allowed cardinalities, stored in increasing order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RankSet(Vec<usize>);

impl RankSet {
    pub fn new<I: IntoIterator<Item = usize>>(ranks: I) -> Result<Self> {
        let mut v: Vec<usize> = ranks.into_iter().collect();
        v.sort_unstable();
        if v.is_empty() {
            return Err(Error::Parameter("rank set must be non-empty".into()));
        }
        if v.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Parameter(format!("rank set {v:?} has repeated ranks")));
        }
        if v[0] == 0 {
            return Err(Error::Parameter("ranks must be at least 1".into()));
        }
        Ok(Self(v))
    }

    pub fn single(k: usize) -> Result<Self> {
        Self::new([k])
    }

    /// Fails unless every rank lies in `[1, n]`.
    pub fn check_within(&self, n: usize) -> Result<()> {
        if self.largest() > n {
            return Err(Error::Parameter(format!("rank {} exceeds n = {n}", self.largest())));
        }
        Ok(())
    }

    pub fn largest(&self) -> usize {
        *self.0.last().expect("non-empty")
    }

    pub fn smallest(&self) -> usize {
        self.0[0]
    }

    pub fn contains(&self, r: usize) -> bool {
        self.0.binary_search(&r).is_ok()
    }

    /// Ranks in increasing order.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_singleton(&self) -> bool {
        self.0.len() == 1
    }
}

impl fmt::Debug for RankSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

/// Comma-separated, largest rank first (`"3,2"`).
impl fmt::Display for RankSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.0.iter().rev().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

impl FromStr for RankSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let ranks = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parameter(format!("bad rank {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(ranks)
    }
}

impl Serialize for RankSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.0.iter().rev())
    }
}

/// Parse a rank list such as `"3,2;2;1"` into one rank set per family.
pub fn parse_rank_list(s: &str) -> Result<Vec<RankSet>> {
    s.split(';').map(str::parse).collect()
}

pub fn format_rank_list(ranks: &[RankSet]) -> String {
    ranks.iter().map(ToString::to_string).collect::<Vec<_>>().join(";")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, xs: &[usize]) -> ElementSet {
        ElementSet::new(n, xs.iter().copied()).unwrap()
    }

    #[test]
    fn lex_compare_examples() {
        assert_eq!(lex_compare(&set(4, &[1, 2]), &set(4, &[1, 3])).unwrap(), Ordering::Less);
        assert_eq!(lex_compare(&set(4, &[1, 4]), &set(4, &[2, 3])).unwrap(), Ordering::Less);
        assert_eq!(lex_compare(&set(4, &[2, 3]), &set(4, &[2, 3])).unwrap(), Ordering::Equal);
    }

    #[test]
    fn lex_compare_rejects_mixed_cardinality() {
        let err = lex_compare(&set(4, &[1]), &set(4, &[1, 2])).unwrap_err();
        assert_eq!(err, Error::InvalidComparison { left: 1, right: 2 });
    }

    /// Brute-force reading of the definition on member lists.
    fn lex_by_definition(a: &ElementSet, b: &ElementSet) -> Ordering {
        let a_only = a.iter().find(|x| !b.contains(*x));
        let b_only = b.iter().find(|x| !a.contains(*x));
        match (a_only, b_only) {
            (None, None) => Ordering::Equal,
            (Some(x), Some(y)) => x.cmp(&y),
            _ => unreachable!("equal cardinalities"),
        }
    }

    #[test]
    fn lex_is_a_strict_total_order_on_layers() {
        for n in 1..=7 {
            for k in 1..=n {
                let layer: Vec<_> = k_subsets(n, k).collect();
                assert_eq!(layer.len() as u128, choose(n, k));
                for a in &layer {
                    for b in &layer {
                        let ab = lex_compare(a, b).unwrap();
                        assert_eq!(ab, lex_by_definition(a, b));
                        assert_eq!(ab, lex_compare(b, a).unwrap().reverse());
                        assert_eq!(ab == Ordering::Equal, a == b);
                        for c in &layer {
                            if ab == Ordering::Less && lex_compare(b, c).unwrap() == Ordering::Less {
                                assert_eq!(lex_compare(a, c).unwrap(), Ordering::Less);
                            }
                        }
                    }
                }
                // enumeration order is strictly increasing
                assert!(layer.windows(2).all(|w| w[0].lex_cmp(&w[1]) == Ordering::Less));
            }
        }
    }

    #[test]
    fn unrank_examples() {
        assert_eq!(lex_unrank(4, 2, 1).unwrap(), set(4, &[1, 2]));
        assert_eq!(lex_unrank(4, 2, 4).unwrap(), set(4, &[2, 3]));
        assert_eq!(lex_rank(&lex_unrank(5, 3, 7).unwrap()).unwrap(), 7);
    }

    #[test]
    fn unrank_matches_enumeration() {
        for n in 1..=8 {
            for k in 1..=n {
                for (i, s) in k_subsets(n, k).enumerate() {
                    let idx = i as u128 + 1;
                    assert_eq!(lex_unrank(n, k, idx).unwrap(), s);
                    assert_eq!(lex_rank(&s).unwrap(), idx);
                }
            }
        }
    }

    #[test]
    fn unrank_out_of_range() {
        assert!(matches!(lex_unrank(4, 2, 0), Err(Error::Range { .. })));
        assert!(matches!(lex_unrank(4, 2, 7), Err(Error::Range { .. })));
        assert!(matches!(lex_unrank(4, 5, 1), Err(Error::Range { .. })));
    }

    #[test]
    fn element_set_bounds() {
        assert!(ElementSet::new(3, [4]).is_err());
        assert!(ElementSet::new(3, [0]).is_err());
        assert!(ElementSet::new(63, [1]).is_err());
        assert!(ElementSet::new(62, [62]).is_ok());
        let s = set(6, &[2, 5]);
        assert_eq!(s.len(), 2);
        assert_eq!(s.smallest(), Some(2));
        assert_eq!(s.largest(), Some(5));
        assert_eq!(s.complement(), set(6, &[1, 3, 4, 6]));
        assert_eq!(s.to_string(), "{2,5}");
    }

    #[test]
    fn supersets_are_enumerated_once() {
        let s = set(5, &[2]);
        let sups: Vec<_> = s.supersets_of_size(3).collect();
        assert_eq!(sups.len(), 6);
        assert!(sups.iter().all(|t| s.is_subset(t) && t.len() == 3));
        assert_eq!(s.supersets_of_size(0).count(), 0);
        assert_eq!(s.supersets_of_size(1).collect::<Vec<_>>(), vec![s]);
    }

    #[test]
    fn rank_list_round_trip() {
        let ranks = parse_rank_list("3,2;2").unwrap();
        assert_eq!(ranks[0].as_slice(), &[2, 3]);
        assert_eq!(ranks[1].as_slice(), &[2]);
        assert_eq!(format_rank_list(&ranks), "3,2;2");
        assert!(parse_rank_list("3,3").is_err());
        assert!(parse_rank_list("").is_err());
        assert!(parse_rank_list("0").is_err());
    }
}
