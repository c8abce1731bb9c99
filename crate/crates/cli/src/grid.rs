//! Instance grids for `xfam verify`.
//!
//! Inline form: `n=5..8 m=2 maxk=4 [shape=singleton|subsets] [t=1]`.
//! File form: one instance per line, `<n> <ranks> [<t>]`, e.g. `6 3,2;2`.
//! `#` starts a comment in files.

use xfam::set::parse_rank_list;
use xfam::{Instance, RankSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    /// every rank set is `{k}` with `k <= maxk`
    Singleton,
    /// every non-empty subset of `[maxk]`
    Subsets,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridSpec {
    pub n_lo: usize,
    pub n_hi: usize,
    pub m: usize,
    pub maxk: usize,
    pub shape: Shape,
    pub t: usize,
}

fn parse_range(value: &str) -> Result<(usize, usize), String> {
    let bad = || format!("bad range {value:?}");
    match value.split_once("..") {
        Some((lo, hi)) => {
            let hi = hi.strip_prefix('=').unwrap_or(hi);
            let (lo, hi) = (lo.parse().map_err(|_| bad())?, hi.parse().map_err(|_| bad())?);
            if lo > hi {
                return Err(bad());
            }
            Ok((lo, hi))
        }
        None => {
            let v = value.parse().map_err(|_| bad())?;
            Ok((v, v))
        }
    }
}

impl GridSpec {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut spec = GridSpec {
            n_lo: 0,
            n_hi: 0,
            m: 2,
            maxk: 0,
            shape: Shape::Singleton,
            t: 1,
        };
        let (mut seen_n, mut seen_k) = (false, false);
        for token in text.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, found {token:?}"))?;
            let number = || value.parse::<usize>().map_err(|_| format!("bad value in {token:?}"));
            match key {
                "n" => {
                    (spec.n_lo, spec.n_hi) = parse_range(value)?;
                    seen_n = true;
                }
                "m" => spec.m = number()?,
                "maxk" => {
                    spec.maxk = number()?;
                    seen_k = true;
                }
                "t" => spec.t = number()?,
                "shape" => {
                    spec.shape = match value {
                        "singleton" => Shape::Singleton,
                        "subsets" => Shape::Subsets,
                        _ => return Err(format!("unknown shape {value:?}")),
                    }
                }
                _ => return Err(format!("unknown grid key {key:?}")),
            }
        }
        if !seen_n || !seen_k {
            return Err("grid needs both n=.. and maxk=..".into());
        }
        if spec.m < 2 || spec.maxk == 0 || spec.n_lo == 0 {
            return Err("grid needs m >= 2, maxk >= 1 and n >= 1".into());
        }
        Ok(spec)
    }

    fn rank_pool(&self) -> Vec<RankSet> {
        match self.shape {
            Shape::Singleton => (1..=self.maxk).map(|k| RankSet::single(k).unwrap()).collect(),
            Shape::Subsets => (1u32..(1 << self.maxk))
                .map(|mask| RankSet::new((1..=self.maxk).filter(|k| mask & (1 << (k - 1)) != 0)).unwrap())
                .collect(),
        }
    }

    /// Rank tuples are taken up to reordering; instances with `n < k1 + k2`
    /// are left out.
    pub fn instances(&self) -> Result<Vec<Instance>, String> {
        let pool = self.rank_pool();
        let mut out = Vec::new();
        let mut idx = vec![0usize; self.m];
        loop {
            let ranks: Vec<RankSet> = idx.iter().map(|&i| pool[i].clone()).collect();
            let mut tops: Vec<usize> = ranks.iter().map(RankSet::largest).collect();
            tops.sort_unstable_by(|a, b| b.cmp(a));
            for n in self.n_lo..=self.n_hi {
                if n >= tops[0] + tops[1] {
                    out.push(Instance::new(n, self.t, ranks.clone()).map_err(|e| e.to_string())?);
                }
            }
            // next non-decreasing index tuple
            let Some(pos) = (0..self.m).rev().find(|&p| idx[p] + 1 < pool.len()) else {
                break;
            };
            let next = idx[pos] + 1;
            for slot in &mut idx[pos..] {
                *slot = next;
            }
        }
        out.sort();
        Ok(out)
    }
}

pub fn parse_instance_file(text: &str) -> Result<Vec<Instance>, String> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |m: String| format!("line {}: {m}", i + 1);
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(err(format!("expected `<n> <ranks> [<t>]`, found {line:?}")));
        }
        let n = fields[0].parse().map_err(|_| err(format!("bad n {:?}", fields[0])))?;
        let ranks = parse_rank_list(fields[1]).map_err(|e| err(e.to_string()))?;
        let t = match fields.get(2) {
            Some(t) => t.parse().map_err(|_| err(format!("bad t {t:?}")))?,
            None => 1,
        };
        out.push(Instance::new(n, t, ranks).map_err(|e| err(e.to_string()))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inline_singleton_grid() {
        let spec = GridSpec::parse("n=5..8 m=2 maxk=4").unwrap();
        assert_eq!(spec.shape, Shape::Singleton);
        let grid = spec.instances().unwrap();
        // pairs k1 >= k2 up to reordering with k1 + k2 <= n
        let brute: usize = (5..=8)
            .map(|n| (1..=4).flat_map(|a| (a..=4).map(move |b| (a, b))).filter(|(a, b)| a + b <= n).count())
            .sum();
        assert_eq!(grid.len(), brute);
        assert!(grid.iter().all(|i| i.is_valid()));
    }

    #[test]
    fn subsets_shape_counts() {
        let spec = GridSpec::parse("n=6 m=3 maxk=2 shape=subsets").unwrap();
        // 3 rank sets, multisets of size 3
        assert_eq!(spec.instances().unwrap().len(), 10);
    }

    #[test]
    fn bad_specs() {
        assert!(GridSpec::parse("n=5..8").is_err());
        assert!(GridSpec::parse("n=8..5 maxk=2").is_err());
        assert!(GridSpec::parse("n=5 maxk=2 shape=odd").is_err());
        assert!(GridSpec::parse("n=5 maxk=2 q=1").is_err());
        assert!(GridSpec::parse("n=5 maxk=2 m=1").is_err());
    }

    #[test]
    fn instance_file() {
        let text = "# grid\n6 3;2\n\n4 2;2 1 # trailing\n";
        let grid = parse_instance_file(text).unwrap();
        assert_eq!(grid.len(), 2);
        assert_eq!(grid[0].n, 6);
        assert_eq!(grid[1].ranks.len(), 2);
        assert!(parse_instance_file("6").is_err());
        assert!(parse_instance_file("6 3;x").is_err());
    }
}
