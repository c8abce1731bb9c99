//! Set families, family tuples, problem instances and the family text format.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::binomial::choose;
use crate::error::{Error, Result};
use crate::set::{self, check_universe, ElementSet, RankSet};

/// A finite collection of distinct subsets of `[n]`.
///
/// Members are kept sorted by cardinality and then by `≺_L`, so every layer
/// `(F)_r` is a contiguous, lex-ordered slice.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SetFamily {
    n: usize,
    sets: Vec<ElementSet>,
}

impl SetFamily {
    pub fn empty(n: usize) -> Result<Self> {
        check_universe(n)?;
        Ok(Self { n, sets: Vec::new() })
    }

    /// Builds a family, dropping duplicates. All sets must live over `[n]`.
    pub fn new<I: IntoIterator<Item = ElementSet>>(n: usize, sets: I) -> Result<Self> {
        check_universe(n)?;
        let mut sets: Vec<ElementSet> = sets.into_iter().collect();
        if let Some(bad) = sets.iter().find(|s| s.universe() != n) {
            return Err(Error::Parameter(format!(
                "set {bad} lives over [{}] but the family is over [{n}]",
                bad.universe()
            )));
        }
        sets.sort_unstable();
        sets.dedup();
        Ok(Self { n, sets })
    }

    /// Convenience constructor from member lists.
    pub fn from_lists(n: usize, lists: &[&[usize]]) -> Result<Self> {
        let sets = lists
            .iter()
            .map(|l| ElementSet::new(n, l.iter().copied()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, sets)
    }

    pub(crate) fn from_sorted_unchecked(n: usize, sets: Vec<ElementSet>) -> Self {
        debug_assert!(sets.windows(2).all(|w| w[0] < w[1]));
        Self { n, sets }
    }

    /// `binom([n], k)`.
    pub fn full_layer(n: usize, k: usize) -> Result<Self> {
        check_universe(n)?;
        Ok(Self {
            n,
            sets: set::k_subsets(n, k).collect(),
        })
    }

    /// `binom([n], R)`.
    pub fn full(n: usize, ranks: &RankSet) -> Result<Self> {
        check_universe(n)?;
        ranks.check_within(n)?;
        Ok(Self {
            n,
            sets: ranks.iter().flat_map(|k| set::k_subsets(n, k)).collect(),
        })
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn contains(&self, set: &ElementSet) -> bool {
        self.sets.binary_search(set).is_ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ElementSet> {
        self.sets.iter()
    }

    pub fn as_slice(&self) -> &[ElementSet] {
        &self.sets
    }

    /// The `r`-element members, in `≺_L` order.
    pub fn layer_slice(&self, r: usize) -> &[ElementSet] {
        let lo = self.sets.partition_point(|s| s.len() < r);
        let hi = self.sets.partition_point(|s| s.len() <= r);
        &self.sets[lo..hi]
    }

    /// `(F)_r`.
    pub fn layer(&self, r: usize) -> SetFamily {
        Self {
            n: self.n,
            sets: self.layer_slice(r).to_vec(),
        }
    }

    /// Distinct member cardinalities, increasing.
    pub fn cardinalities(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.sets.iter().map(ElementSet::len).collect();
        out.dedup();
        out
    }

    /// Fails if some member has a cardinality outside `ranks`.
    pub fn check_ranks(&self, ranks: &RankSet) -> Result<()> {
        match self.cardinalities().into_iter().find(|r| !ranks.contains(*r)) {
            Some(cardinality) => Err(Error::Rank {
                cardinality,
                ranks: ranks.to_string(),
            }),
            None => Ok(()),
        }
    }

    pub fn union(&self, other: &SetFamily) -> SetFamily {
        let mut sets = self.sets.clone();
        sets.extend(other.sets.iter().copied());
        sets.sort_unstable();
        sets.dedup();
        Self { n: self.n, sets }
    }

    pub fn difference(&self, other: &SetFamily) -> SetFamily {
        Self {
            n: self.n,
            sets: self.sets.iter().filter(|s| !other.contains(s)).copied().collect(),
        }
    }

    pub fn is_subfamily(&self, other: &SetFamily) -> bool {
        self.sets.iter().all(|s| other.contains(s))
    }

    /// `{[n] \ A : A in F}`.
    pub fn complements(&self) -> SetFamily {
        let sets = self.sets.iter().map(ElementSet::complement);
        Self::new(self.n, sets).expect("same universe")
    }

    /// Parses the family text format (see [`SetFamily::to_text`]).
    pub fn parse(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut sets = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let Some(n) = n else {
                let value = line
                    .strip_prefix("n=")
                    .ok_or_else(|| parse_err(format!("expected `n=<n>`, found {line:?}")))?;
                let value: usize = value
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(format!("bad universe size {value:?}")))?;
                check_universe(value).map_err(|e| parse_err(e.to_string()))?;
                n = Some(value);
                continue;
            };
            let members = line
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|_| parse_err(format!("bad element {t:?}"))))
                .collect::<Result<Vec<_>>>()?;
            if members.windows(2).any(|w| w[0] >= w[1]) {
                return Err(parse_err(format!("elements must be strictly increasing: {line:?}")));
            }
            sets.push(ElementSet::new(n, members).map_err(|e| parse_err(e.to_string()))?);
        }
        let n = n.ok_or(Error::Parse {
            line: 0,
            message: "missing `n=<n>` header".into(),
        })?;
        Self::new(n, sets)
    }

    /// Family text format: a `n=<n>` header, then one set per line as
    /// ascending space-separated integers. `#` starts a comment.
    pub fn to_text(&self) -> String {
        let mut out = format!("n={}\n", self.n);
        for s in &self.sets {
            let line: Vec<String> = s.iter().map(|x| x.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

impl<'a> IntoIterator for &'a SetFamily {
    type Item = &'a ElementSet;
    type IntoIter = std::slice::Iter<'a, ElementSet>;

    fn into_iter(self) -> Self::IntoIter {
        self.sets.iter()
    }
}

impl fmt::Debug for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, s) in self.sets.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for SetFamily {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.sets.iter())
    }
}

/// True iff `|A ∩ B| >= t` for all `A in f`, `B in g`. Vacuous if either is empty.
pub fn is_cross_intersecting(f: &SetFamily, g: &SetFamily, t: usize) -> bool {
    f.iter()
        .all(|a| g.iter().all(|b| a.intersection_len(b) >= t))
}

/// True iff every two distinct members meet in at least `t` elements.
pub fn is_intersecting(f: &SetFamily, t: usize) -> bool {
    let sets = f.as_slice();
    sets.iter()
        .enumerate()
        .all(|(i, a)| sets[i + 1..].iter().all(|b| a.intersection_len(b) >= t))
}

/// The first `s` sets of `binom([n], k)` under `≺_L`.
pub fn l_initial(n: usize, k: usize, s: u128) -> Result<SetFamily> {
    check_universe(n)?;
    let total = choose(n, k);
    if s > total {
        return Err(Error::Range {
            what: "s",
            value: s,
            expected: format!("0..={total}"),
        });
    }
    let sets = set::k_subsets(n, k).take(s as usize).collect();
    Ok(SetFamily::from_sorted_unchecked(n, sets))
}

/// `(F_1, ..., F_m)` with `F_j ⊆ binom([n], R_j)`.
#[derive(Clone, PartialEq, Eq, Serialize)]
pub struct FamilyTuple {
    n: usize,
    ranks: Vec<RankSet>,
    families: Vec<SetFamily>,
}

impl FamilyTuple {
    pub fn new(n: usize, ranks: Vec<RankSet>, families: Vec<SetFamily>) -> Result<Self> {
        check_universe(n)?;
        if ranks.len() != families.len() {
            return Err(Error::Parameter(format!(
                "{} rank sets for {} families",
                ranks.len(),
                families.len()
            )));
        }
        for (r, f) in ranks.iter().zip(&families) {
            r.check_within(n)?;
            if f.universe() != n {
                return Err(Error::Parameter(format!(
                    "family over [{}] in a tuple over [{n}]",
                    f.universe()
                )));
            }
            f.check_ranks(r)?;
        }
        Ok(Self { n, ranks, families })
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.families.len()
    }

    pub fn is_empty(&self) -> bool {
        self.families.is_empty()
    }

    pub fn families(&self) -> &[SetFamily] {
        &self.families
    }

    pub fn family(&self, j: usize) -> &SetFamily {
        &self.families[j]
    }

    pub fn ranks(&self) -> &[RankSet] {
        &self.ranks
    }

    pub fn total(&self) -> u128 {
        self.families.iter().map(|f| f.len() as u128).sum()
    }

    pub fn all_non_empty(&self) -> bool {
        self.families.iter().all(|f| !f.is_empty())
    }

    /// Pairwise cross-`t`-intersecting.
    pub fn is_cross_intersecting(&self, t: usize) -> bool {
        let fs = &self.families;
        (0..fs.len()).all(|i| (i + 1..fs.len()).all(|j| is_cross_intersecting(&fs[i], &fs[j], t)))
    }

    /// Per family, the layer sizes `(rank, |(F_j)_rank|)` in decreasing rank.
    pub fn profile(&self) -> Vec<Vec<(usize, usize)>> {
        self.ranks
            .iter()
            .zip(&self.families)
            .map(|(r, f)| r.iter().rev().map(|a| (a, f.layer_slice(a).len())).collect())
            .collect()
    }
}

impl fmt::Debug for FamilyTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.families.iter()).finish()
    }
}

/// A maximisation problem: universe `[n]`, intersection depth `t`, and one
/// rank set per family.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Instance {
    pub n: usize,
    pub t: usize,
    pub ranks: Vec<RankSet>,
}

impl Instance {
    pub fn new(n: usize, t: usize, ranks: Vec<RankSet>) -> Result<Self> {
        check_universe(n)?;
        if ranks.len() < 2 {
            return Err(Error::Parameter(format!("need at least two families, got {}", ranks.len())));
        }
        if t == 0 {
            return Err(Error::Parameter("intersection depth t must be at least 1".into()));
        }
        for r in &ranks {
            r.check_within(n)?;
        }
        Ok(Self { n, t, ranks })
    }

    /// `t = 1` instance from the rank-list syntax, e.g. `"3,2;2"`.
    pub fn parse(n: usize, ranks: &str) -> Result<Self> {
        Self::new(n, 1, set::parse_rank_list(ranks)?)
    }

    pub fn m(&self) -> usize {
        self.ranks.len()
    }

    /// Largest and second largest of `max(R_1), ..., max(R_m)` (as a multiset).
    pub fn top_ranks(&self) -> (usize, usize) {
        top_two(&self.ranks)
    }

    pub fn k_min(&self, gamma: usize) -> usize {
        k_min(&self.ranks, gamma)
    }

    /// `n >= k1 + k2`.
    pub fn is_valid(&self) -> bool {
        let (k1, k2) = self.top_ranks();
        self.n >= k1 + k2
    }
}

impl fmt::Debug for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} ranks={}", self.n, set::format_rank_list(&self.ranks))?;
        if self.t != 1 {
            write!(f, " t={}", self.t)?;
        }
        Ok(())
    }
}

pub(crate) fn top_two(ranks: &[RankSet]) -> (usize, usize) {
    let mut tops: Vec<usize> = ranks.iter().map(RankSet::largest).collect();
    tops.sort_unstable_by(|a, b| b.cmp(a));
    (tops[0], tops.get(1).copied().unwrap_or(0))
}

/// Smallest cardinality allowed in any family other than `gamma`.
pub(crate) fn k_min(ranks: &[RankSet], gamma: usize) -> usize {
    ranks
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != gamma)
        .map(|(_, r)| r.smallest())
        .min()
        .expect("at least two families")
}
