//! Exact maximisation of `Σ_j |F_j|` over non-empty cross-`t`-intersecting tuples.
//!
//! Two independent searches are provided. [`linitial_oracle`] works on layer
//! size profiles: for `t = 1` every layer may be taken L-initial, and two
//! L-initial layers cross-intersect iff their sizes lie below a frontier that
//! is tabulated once per rank pair. [`exhaustive_oracle`] searches over
//! arbitrary families with bitmask compatibility tables and is only usable
//! on micro instances.

use std::collections::HashMap;
use std::time::Instant;

use serde::Serialize;

use crate::binomial::choose;
use crate::bounds::{theorem_bound, EqualityCase};
use crate::error::{Error, Result};
use crate::extremal::classify;
use crate::family::{l_initial, FamilyTuple, Instance, SetFamily};
use crate::set::{check_universe, lex_rank, ElementSet, Subsets};

/// Search guards.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    /// Largest universe the profile search accepts.
    pub max_n: usize,
    /// Largest number of free include/exclude decisions in the exhaustive search.
    pub max_exhaustive_exponent: u32,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            max_n: 12,
            max_exhaustive_exponent: 24,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    LInitial,
    Exhaustive,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub wall_ms: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleResult {
    pub maximum: u128,
    /// Per family, `(rank, layer size)` in decreasing rank.
    pub profile: Vec<Vec<(usize, usize)>>,
    pub witness: FamilyTuple,
    pub method: Method,
    pub stats: SearchStats,
}

/// Lex-first `b`-set meeting `a` in fewer than `t` elements, if any.
fn first_non_transversal(n: usize, a: u64, b: usize, t: usize) -> Option<u64> {
    let mut rest_in = a.count_ones() as usize;
    let mut rest_out = n - rest_in;
    if b > rest_out + rest_in.min(t - 1) {
        return None;
    }
    let (mut chosen, mut inside, mut out) = (0usize, 0usize, 0u64);
    for x in 0..n {
        let in_a = a >> x & 1 == 1;
        if in_a {
            rest_in -= 1;
        } else {
            rest_out -= 1;
        }
        let (c, i) = (chosen + 1, inside + in_a as usize);
        if c <= b && i < t && c + rest_out + rest_in.min(t - 1 - i) >= b {
            out |= 1 << x;
            chosen = c;
            inside = i;
        }
    }
    Some(out)
}

/// `table[s]` for `0 <= s <= C(n, a)`: how many lex-first `b`-sets are
/// cross-`t`-intersecting with the first `s` lex `a`-sets.
fn frontier_table(n: usize, a: usize, b: usize, t: usize) -> Vec<u64> {
    let all_b = choose(n, b) as u64;
    let mut table = Vec::with_capacity(choose(n, a) as usize + 1);
    table.push(all_b);
    let mut current = all_b;
    for bits in Subsets::new((1..=n).collect(), Some(a)) {
        if let Some(miss) = first_non_transversal(n, bits, b, t) {
            let rank = lex_rank(&ElementSet::from_bits_unchecked(n, miss)).expect("non-empty") as u64;
            current = current.min(rank - 1);
        }
        table.push(current);
    }
    table
}

/// The largest `f` such that the first `f` `b`-sets under `≺_L` each meet
/// every member of `l_initial(n, a, s)` in at least `t` elements.
pub fn transversal_frontier(n: usize, a: usize, s: u128, b: usize, t: usize) -> Result<u128> {
    check_universe(n)?;
    if t == 0 {
        return Err(Error::Parameter("t must be at least 1".into()));
    }
    for (what, r) in [("a", a), ("b", b)] {
        if r == 0 || r > n {
            return Err(Error::Range {
                what,
                value: r as u128,
                expected: format!("1..={n}"),
            });
        }
    }
    let total = choose(n, a);
    if s > total {
        return Err(Error::Range {
            what: "s",
            value: s,
            expected: format!("0..={total}"),
        });
    }
    let all_b = choose(n, b);
    if s == 0 {
        return Ok(all_b);
    }
    let mut current = all_b;
    for bits in Subsets::new((1..=n).collect(), Some(a)).take(s as usize) {
        if let Some(miss) = first_non_transversal(n, bits, b, t) {
            current = current.min(lex_rank(&ElementSet::from_bits_unchecked(n, miss))? - 1);
        }
    }
    Ok(current)
}

struct Layer {
    family: usize,
    rank: usize,
}

struct ProfileSearch {
    layers: Vec<Layer>,
    /// `tables[p][q]`: frontier of layer `q` as a function of the size of layer `p`.
    tables: Vec<Vec<Option<std::rc::Rc<Vec<u64>>>>>,
    candidates: Vec<Vec<u64>>,
    free: usize,
    values: Vec<u64>,
    ub: Vec<u64>,
    saved: Vec<Vec<u64>>,
    nodes: u64,
    best: u64,
    best_values: Option<Vec<u64>>,
    ascending: bool,
}

impl ProfileSearch {
    fn new(instance: &Instance) -> Self {
        let n = instance.n;
        let layers: Vec<Layer> = instance
            .ranks
            .iter()
            .enumerate()
            .flat_map(|(j, r)| r.iter().rev().map(move |a| Layer { family: j, rank: a }))
            .collect();
        let mut cache: HashMap<(usize, usize), std::rc::Rc<Vec<u64>>> = HashMap::new();
        let tables: Vec<Vec<_>> = layers
            .iter()
            .map(|p| {
                layers
                    .iter()
                    .map(|q| {
                        (p.family != q.family).then(|| {
                            cache
                                .entry((p.rank, q.rank))
                                .or_insert_with(|| std::rc::Rc::new(frontier_table(n, p.rank, q.rank, 1)))
                                .clone()
                        })
                    })
                    .collect()
            })
            .collect();
        // an optimal size is either the whole layer or a point where some frontier drops
        let candidates = layers
            .iter()
            .enumerate()
            .map(|(p, layer)| {
                let full = choose(n, layer.rank) as u64;
                (0..=full)
                    .filter(|&s| {
                        s == full
                            || tables[p]
                                .iter()
                                .flatten()
                                .any(|tab| tab[s as usize + 1] < tab[s as usize])
                    })
                    .collect()
            })
            .collect();
        let last = instance.m() - 1;
        let free = layers.iter().take_while(|l| l.family != last).count();
        let ub = layers.iter().map(|l| choose(n, l.rank) as u64).collect();
        let depth = layers.len();
        Self {
            values: vec![0; depth],
            saved: vec![vec![0; depth]; depth + 1],
            layers,
            tables,
            candidates,
            free,
            ub,
            nodes: 0,
            best: 0,
            best_values: None,
            ascending: false,
        }
    }

    fn family_done_empty(&self, pos: usize) -> bool {
        let fam = self.layers[pos].family;
        let ends = pos + 1 == self.layers.len() || self.layers[pos + 1].family != fam;
        ends && (0..=pos)
            .rev()
            .take_while(|&p| self.layers[p].family == fam)
            .all(|p| self.values[p] == 0)
    }

    /// Returns true once the ascending phase has found its target.
    fn dfs(&mut self, pos: usize, current: u64) -> bool {
        self.nodes += 1;
        if pos == self.free {
            let tail: u64 = self.ub[pos..].iter().sum();
            if tail == 0 {
                return false;
            }
            let total = current + tail;
            let better = if self.ascending { total == self.best } else { total > self.best };
            if better {
                self.best = total;
                let mut values = self.values.clone();
                values[pos..].copy_from_slice(&self.ub[pos..]);
                self.best_values = Some(values);
                return self.ascending;
            }
            return false;
        }
        let bound = current + self.ub[pos..].iter().sum::<u64>();
        if (self.ascending && bound < self.best) || (!self.ascending && bound <= self.best) {
            return false;
        }
        let cap = self.ub[pos];
        let cands: Vec<u64> = {
            let all = &self.candidates[pos];
            let upto = all.partition_point(|&s| s <= cap);
            let mut c = all[..upto].to_vec();
            if c.last() != Some(&cap) {
                c.push(cap);
            }
            if !self.ascending {
                c.reverse();
            }
            c
        };
        let fam = self.layers[pos].family;
        let mut saved = std::mem::take(&mut self.saved[pos]);
        saved.copy_from_slice(&self.ub);
        for s in cands {
            self.values[pos] = s;
            if s == 0 && self.family_done_empty(pos) {
                continue;
            }
            if s > 0 {
                for q in pos + 1..self.layers.len() {
                    if self.layers[q].family != fam {
                        let tab = self.tables[pos][q].as_ref().expect("different families");
                        self.ub[q] = saved[q].min(tab[s as usize]);
                    }
                }
            } else {
                self.ub.copy_from_slice(&saved);
            }
            if self.dfs(pos + 1, current + s) {
                self.saved[pos] = saved;
                return true;
            }
        }
        self.ub.copy_from_slice(&saved);
        self.values[pos] = 0;
        self.saved[pos] = saved;
        false
    }
}

fn check_instance(instance: &Instance, config: &OracleConfig) -> Result<()> {
    Instance::new(instance.n, instance.t, instance.ranks.clone())?;
    if instance.n > config.max_n {
        return Err(Error::ScaleGuard(format!(
            "n = {} exceeds the configured limit {}",
            instance.n, config.max_n
        )));
    }
    Ok(())
}

fn no_tuple(instance: &Instance) -> Error {
    Error::Precondition(format!("{instance} admits no non-empty cross-intersecting tuple"))
}

/// Profile search over L-initial layers; exact for `t = 1`.
///
/// Among all maximising profiles the lexicographically least one (families
/// in index order, ranks decreasing) is reported.
pub fn linitial_oracle(instance: &Instance, config: &OracleConfig) -> Result<OracleResult> {
    check_instance(instance, config)?;
    if instance.t != 1 {
        return Err(Error::UnsupportedDepth(instance.t));
    }
    let start = Instant::now();
    let mut search = ProfileSearch::new(instance);
    search.dfs(0, 0);
    if search.best_values.is_none() {
        return Err(no_tuple(instance));
    }
    search.ascending = true;
    search.best_values = None;
    search.ub = search.layers.iter().map(|l| choose(instance.n, l.rank) as u64).collect();
    search.dfs(0, 0);
    let values = search.best_values.take().expect("the maximum is attained");

    let n = instance.n;
    let mut families = vec![Vec::new(); instance.m()];
    for (layer, &s) in search.layers.iter().zip(&values) {
        families[layer.family].extend(l_initial(n, layer.rank, s as u128)?.iter().copied());
    }
    let families = families
        .into_iter()
        .map(|sets| SetFamily::new(n, sets))
        .collect::<Result<Vec<_>>>()?;
    let witness = FamilyTuple::new(n, instance.ranks.clone(), families)?;
    Ok(OracleResult {
        maximum: search.best as u128,
        profile: witness.profile(),
        witness,
        method: Method::LInitial,
        stats: SearchStats {
            nodes: search.nodes,
            wall_ms: start.elapsed().as_millis(),
        },
    })
}

struct SubsetSearch {
    /// Decision positions `(family, candidate index)`; the `last` family is never decided.
    positions: Vec<(usize, usize)>,
    sizes: Vec<usize>,
    /// `compat[j][i][g]`: candidates of family `g` meeting candidate `i` of family `j` in `>= t` elements.
    compat: Vec<Vec<Vec<u128>>>,
    last: usize,
    allowed: Vec<u128>,
    chosen: Vec<u128>,
    nodes: u64,
    best: u32,
    best_chosen: Option<Vec<u128>>,
}

fn low_mask(k: usize) -> u128 {
    if k == 128 {
        u128::MAX
    } else {
        (1u128 << k) - 1
    }
}

impl SubsetSearch {
    fn dfs(&mut self, pos: usize, current: u32) {
        self.nodes += 1;
        if pos == self.positions.len() {
            let tail = self.allowed[self.last].count_ones();
            if tail > 0 && current + tail > self.best {
                self.best = current + tail;
                let mut chosen = self.chosen.clone();
                chosen[self.last] = self.allowed[self.last];
                self.best_chosen = Some(chosen);
            }
            return;
        }
        let (fam, idx) = self.positions[pos];
        let mut bound = current + self.allowed[self.last].count_ones();
        bound += (self.allowed[fam] & !low_mask(idx)).count_ones();
        let mut seen = fam;
        for &(g, _) in &self.positions[pos..] {
            if g != seen {
                bound += self.allowed[g].count_ones();
                seen = g;
            }
        }
        if bound <= self.best {
            return;
        }
        let closes = idx + 1 == self.sizes[fam];
        let bit = 1u128 << idx;
        if self.allowed[fam] & bit != 0 {
            let saved = self.allowed.clone();
            self.chosen[fam] |= bit;
            for g in 0..self.allowed.len() {
                if g != fam {
                    self.allowed[g] &= self.compat[fam][idx][g];
                }
            }
            self.dfs(pos + 1, current + 1);
            self.chosen[fam] &= !bit;
            self.allowed = saved;
        }
        if !(closes && self.chosen[fam] == 0) {
            self.dfs(pos + 1, current);
        }
    }
}

/// Branch and bound over all subfamilies; exact for every `t`.
pub fn exhaustive_oracle(instance: &Instance, config: &OracleConfig) -> Result<OracleResult> {
    check_instance(instance, config)?;
    let (n, t, m) = (instance.n, instance.t, instance.m());
    let pools: Vec<SetFamily> = instance
        .ranks
        .iter()
        .map(|r| SetFamily::full(n, r))
        .collect::<Result<_>>()?;
    let sizes: Vec<usize> = pools.iter().map(SetFamily::len).collect();
    if let Some(big) = sizes.iter().find(|&&s| s > 128) {
        return Err(Error::ScaleGuard(format!("a family has {big} candidate sets (limit 128)")));
    }
    let last = (0..m).rev().max_by_key(|&j| sizes[j]).expect("m >= 2");
    let exponent: usize = sizes.iter().sum::<usize>() - sizes[last];
    if exponent > config.max_exhaustive_exponent as usize {
        return Err(Error::ScaleGuard(format!(
            "about 2^{exponent} subfamilies to search (limit 2^{})",
            config.max_exhaustive_exponent
        )));
    }
    let start = Instant::now();
    let compat = pools
        .iter()
        .map(|p| {
            p.iter()
                .map(|a| {
                    pools
                        .iter()
                        .map(|q| {
                            q.iter()
                                .enumerate()
                                .filter(|(_, b)| a.intersection_len(b) >= t)
                                .fold(0u128, |mask, (i, _)| mask | 1 << i)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let positions = (0..m)
        .filter(|&j| j != last)
        .flat_map(|j| (0..sizes[j]).map(move |i| (j, i)))
        .collect();
    let mut search = SubsetSearch {
        positions,
        compat,
        last,
        allowed: sizes.iter().map(|&s| low_mask(s)).collect(),
        chosen: vec![0; m],
        sizes,
        nodes: 0,
        best: 0,
        best_chosen: None,
    };
    search.dfs(0, 0);
    let chosen = search.best_chosen.ok_or_else(|| no_tuple(instance))?;
    let families = pools
        .iter()
        .zip(&chosen)
        .map(|(pool, mask)| {
            SetFamily::new(
                n,
                pool.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, s)| *s),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let witness = FamilyTuple::new(n, instance.ranks.clone(), families)?;
    Ok(OracleResult {
        maximum: search.best as u128,
        profile: witness.profile(),
        witness,
        method: Method::Exhaustive,
        stats: SearchStats {
            nodes: search.nodes,
            wall_ms: start.elapsed().as_millis(),
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationEntry {
    pub instance: Instance,
    pub oracle_max: u128,
    pub bound_max: u128,
    pub equal: bool,
    pub witness_profile: Vec<Vec<(usize, usize)>>,
    /// Equality cases the witness matches; empty means none matched.
    pub classified_case: Vec<EqualityCase>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification_error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SkippedInstance {
    pub instance: Instance,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub entries: Vec<VerificationEntry>,
    pub skipped: Vec<SkippedInstance>,
    pub mismatches: usize,
}

/// Runs [`linitial_oracle`] and [`theorem_bound`] on every instance of the
/// grid, sorted by instance.
pub fn verify_sweep(grid: &[Instance], config: &OracleConfig) -> VerificationReport {
    let mut grid = grid.to_vec();
    grid.sort();
    grid.dedup();
    let mut report = VerificationReport::default();
    for instance in grid {
        let skip = |reason: String| SkippedInstance {
            instance: instance.clone(),
            reason,
        };
        if instance.t != 1 {
            report.skipped.push(skip(format!("t = {} is not supported by the sweep", instance.t)));
            continue;
        }
        if !instance.is_valid() {
            let (k1, k2) = instance.top_ranks();
            report.skipped.push(skip(format!("n = {} < k1 + k2 = {}", instance.n, k1 + k2)));
            continue;
        }
        let bound = match theorem_bound(instance.n, &instance.ranks) {
            Ok(b) => b.maximum,
            Err(e) => {
                report.skipped.push(skip(e.to_string()));
                continue;
            }
        };
        let result = match linitial_oracle(&instance, config) {
            Ok(r) => r,
            Err(e) => {
                report.skipped.push(skip(e.to_string()));
                continue;
            }
        };
        let (classified_case, classification_error) = match classify(&result.witness) {
            Ok(found) => (found.into_iter().map(|c| c.case).collect(), None),
            Err(e) => (Vec::new(), Some(e.to_string())),
        };
        let equal = result.maximum == bound;
        report.mismatches += usize::from(!equal);
        report.entries.push(VerificationEntry {
            instance,
            oracle_max: result.maximum,
            bound_max: bound,
            equal,
            witness_profile: result.profile,
            classified_case,
            classification_error,
        });
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::set::{k_subsets, parse_rank_list};

    fn inst(n: usize, ranks: &str, t: usize) -> Instance {
        Instance::new(n, t, parse_rank_list(ranks).unwrap()).unwrap()
    }

    /// Scan `≺_L` order directly.
    fn frontier_by_scan(n: usize, a: usize, s: u128, b: usize, t: usize) -> u128 {
        let first: Vec<_> = k_subsets(n, a).take(s as usize).collect();
        k_subsets(n, b)
            .take_while(|bb| first.iter().all(|aa| aa.intersection_len(bb) >= t))
            .count() as u128
    }

    #[test]
    fn frontier_examples() {
        assert_eq!(transversal_frontier(4, 2, 1, 2, 1).unwrap(), 5);
        assert_eq!(transversal_frontier(6, 3, 10, 2, 1).unwrap(), 5);
        for n in 1..=6 {
            for b in 1..=n {
                assert_eq!(transversal_frontier(n, 1, 0, b, 1).unwrap(), choose(n, b));
            }
        }
        assert!(transversal_frontier(4, 2, 7, 2, 1).is_err());
        assert!(transversal_frontier(4, 2, 1, 2, 0).is_err());
        assert!(transversal_frontier(4, 0, 1, 2, 1).is_err());
    }

    #[test]
    fn frontier_matches_scan() {
        for n in 1..=7 {
            for a in 1..=n {
                for b in 1..=n {
                    for t in 1..=3 {
                        let table = frontier_table(n, a, b, t);
                        for s in 0..=choose(n, a) {
                            let want = frontier_by_scan(n, a, s, b, t);
                            assert_eq!(transversal_frontier(n, a, s, b, t).unwrap(), want, "{n} {a} {s} {b} {t}");
                            assert_eq!(table[s as usize] as u128, want);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn linitial_examples() {
        let cfg = OracleConfig::default();
        let r = linitial_oracle(&inst(6, "3;2", 1), &cfg).unwrap();
        assert_eq!(r.maximum, 17);
        assert_eq!(r.witness.total(), 17);
        assert!(r.witness.is_cross_intersecting(1));
        assert!(r.witness.all_non_empty());
        assert_eq!(linitial_oracle(&inst(4, "2;2", 1), &cfg).unwrap().maximum, 6);
        assert_eq!(linitial_oracle(&inst(6, "3;3", 1), &cfg).unwrap().maximum, 20);
        assert_eq!(
            linitial_oracle(&inst(6, "3;3", 2), &cfg).unwrap_err(),
            Error::UnsupportedDepth(2)
        );
        assert!(matches!(
            linitial_oracle(&inst(13, "2;2", 1), &cfg),
            Err(Error::ScaleGuard(_))
        ));
    }

    #[test]
    fn linitial_reports_lex_least_profile() {
        // several profiles reach 20; the least puts a single set in the first family
        let r = linitial_oracle(&inst(6, "3;3", 1), &OracleConfig::default()).unwrap();
        assert_eq!(r.maximum, 20);
        assert_eq!(r.profile, vec![vec![(3, 1)], vec![(3, 19)]]);
    }

    #[test]
    fn exhaustive_examples() {
        let cfg = OracleConfig::default();
        assert_eq!(exhaustive_oracle(&inst(4, "2;2", 1), &cfg).unwrap().maximum, 6);
        let r = exhaustive_oracle(&inst(5, "2;2", 2), &cfg).unwrap();
        assert_eq!(r.maximum, 2);
        assert_eq!(r.witness.family(0), r.witness.family(1));
        assert_eq!(exhaustive_oracle(&inst(4, "2;1", 1), &cfg).unwrap().maximum, 4);
        assert!(matches!(
            exhaustive_oracle(&inst(8, "4;4", 1), &cfg),
            Err(Error::ScaleGuard(_))
        ));
        assert!(matches!(
            exhaustive_oracle(&inst(4, "1;1", 2), &cfg),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn oracles_agree_on_micro_instances() {
        let cfg = OracleConfig::default();
        for n in 2..=5 {
            for spec in ["1;1", "2;1", "2;2", "2,1;1", "2,1;2", "1;1;1", "2;2;1", "3;1", "3,1;2"] {
                let Ok(i) = Instance::parse(n, spec) else { continue };
                let Ok(ex) = exhaustive_oracle(&i, &cfg) else { continue };
                let li = linitial_oracle(&i, &cfg).unwrap();
                assert_eq!(ex.maximum, li.maximum, "{i}");
            }
        }
    }

    #[test]
    fn sweep_small_grid() {
        let grid: Vec<Instance> = (5..=6)
            .flat_map(|n| ["3;2", "2;2", "2,1;1", "3;2;2"].map(move |s| Instance::parse(n, s).unwrap()))
            .chain([Instance::parse(4, "3;3").unwrap()])
            .collect();
        let report = verify_sweep(&grid, &OracleConfig::default());
        assert_eq!(report.mismatches, 0);
        assert_eq!(report.skipped.len(), 1);
        assert_eq!(report.entries.len(), 8);
        assert!(report.entries.windows(2).all(|w| w[0].instance < w[1].instance));
        assert!(report.entries.iter().all(|e| !e.classified_case.is_empty()), "{report:#?}");
        assert_eq!(verify_sweep(&[], &OracleConfig::default()), VerificationReport::default());
    }
}
