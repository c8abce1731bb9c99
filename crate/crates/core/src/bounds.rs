//! Closed-form sizes and bounds.
//!
//! All arithmetic is exact integer arithmetic; `C(x, y)` is zero outside
//! `0 <= y <= x`, which also encodes the empty-cell convention for layers
//! that are too small to contain a prefix `[l]`.

use std::cmp::Ordering;

use serde::Serialize;

use crate::binomial::{binom, choose};
use crate::error::{Error, Result};
use crate::family::{k_min, top_two};
use crate::set::RankSet;

fn check_ranks(n: usize, ranks: &[RankSet]) -> Result<()> {
    crate::set::check_universe(n)?;
    if ranks.len() < 2 {
        return Err(Error::Parameter(format!("need at least two families, got {}", ranks.len())));
    }
    ranks.iter().try_for_each(|r| r.check_within(n))
}

/// `|S(n, R)| = Σ_{a∈R} C(n-1, a-1)`.
pub fn size_star(n: usize, ranks: &RankSet) -> u128 {
    ranks.iter().map(|a| binom(n as i64 - 1, a as i64 - 1)).sum()
}

/// `|M1(n, R, [k])| = Σ_{a∈R} (C(n, a) - C(n-k, a))`: the `R`-sets meeting `[k]`.
pub fn size_m1(n: usize, ranks: &RankSet, k: usize) -> u128 {
    ranks
        .iter()
        .map(|a| choose(n, a) - binom(n as i64 - k as i64, a as i64))
        .sum()
}

/// `|M2(n, R, [k])| = Σ_{b∈R} C(n-k, b-k)`: the `R`-sets containing `[k]`.
pub fn size_m2(n: usize, ranks: &RankSet, k: usize) -> u128 {
    ranks
        .iter()
        .map(|b| binom(n as i64 - k as i64, b as i64 - k as i64))
        .sum()
}

/// `F_γ(l) = |M1(n, R_γ, [l])| + Σ_{α≠γ} |M2(n, R_α, [l])|` for `1 <= l <= k_min(γ)`.
pub fn f_gamma(n: usize, ranks: &[RankSet], gamma: usize, l: usize) -> Result<u128> {
    check_ranks(n, ranks)?;
    check_gamma(ranks, gamma)?;
    let top = k_min(ranks, gamma);
    if l == 0 || l > top {
        return Err(Error::Range {
            what: "l",
            value: l as u128,
            expected: format!("1..={top}"),
        });
    }
    Ok(f_gamma_unchecked(n, ranks, gamma, l))
}

fn f_gamma_unchecked(n: usize, ranks: &[RankSet], gamma: usize, l: usize) -> u128 {
    let others: u128 = ranks
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != gamma)
        .map(|(_, r)| size_m2(n, r, l))
        .sum();
    size_m1(n, &ranks[gamma], l) + others
}

/// `F_γ(l)` for every admissible `l`.
pub fn f_gamma_curve(n: usize, ranks: &[RankSet], gamma: usize) -> Result<Vec<(usize, u128)>> {
    check_ranks(n, ranks)?;
    check_gamma(ranks, gamma)?;
    Ok((1..=k_min(ranks, gamma))
        .map(|l| (l, f_gamma_unchecked(n, ranks, gamma, l)))
        .collect())
}

fn check_gamma(ranks: &[RankSet], gamma: usize) -> Result<()> {
    if gamma >= ranks.len() {
        return Err(Error::Parameter(format!(
            "family index {gamma} out of range for {} families",
            ranks.len()
        )));
    }
    Ok(())
}

/// One `γ` candidate `F_γ(k_min(γ))` of the maximum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Candidate {
    /// 0-based family index.
    pub gamma: usize,
    pub k_min: usize,
    pub value: u128,
}

/// A construction attaining the maximum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Achiever {
    Star,
    Gamma { gamma: usize },
}

/// The four equality cases of the non-uniform bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "case")]
pub enum EqualityCase {
    /// every family is the star at 1
    #[serde(rename = "i")]
    Stars,
    /// `F_γ = M1(n, R_γ, [k_min(γ)])`, the rest `M2(n, R_α, [k_min(γ)])`
    #[serde(rename = "ii")]
    Hub { gamma: usize },
    /// `n = k1 + k2`, two singleton rank sets, `F_1 = binom([n], k1)` minus complements of `F_2`
    #[serde(rename = "iii")]
    Complementary,
    /// `n = 2k`, `m >= 3`, all ranks `{k}`, all families one intersecting family of size `C(n-1, k-1)`
    #[serde(rename = "iv")]
    Repeated,
}

impl EqualityCase {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Stars => "i",
            Self::Hub { .. } => "ii",
            Self::Complementary => "iii",
            Self::Repeated => "iv",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub ranks: Vec<RankSet>,
    pub star_total: u128,
    pub candidates: Vec<Candidate>,
    pub maximum: u128,
    pub argmax: Vec<Achiever>,
    /// `n >= k1 + k2`; the bound is only asserted when this holds.
    pub valid: bool,
    pub predicted_cases: Vec<EqualityCase>,
}

/// Evaluates `max{Σ_j |S(n, R_j)|, F_γ(k_min(γ)) : γ ∈ [m]}` together with
/// every candidate attaining it and the equality cases it predicts.
pub fn theorem_bound(n: usize, ranks: &[RankSet]) -> Result<BoundReport> {
    check_ranks(n, ranks)?;
    let m = ranks.len();
    let star_total: u128 = ranks.iter().map(|r| size_star(n, r)).sum();
    let candidates: Vec<Candidate> = (0..m)
        .map(|gamma| {
            let k = k_min(ranks, gamma);
            Candidate {
                gamma,
                k_min: k,
                value: f_gamma_unchecked(n, ranks, gamma, k),
            }
        })
        .collect();
    let maximum = candidates.iter().map(|c| c.value).fold(star_total, u128::max);
    let mut argmax = Vec::new();
    if star_total == maximum {
        argmax.push(Achiever::Star);
    }
    argmax.extend(
        candidates
            .iter()
            .filter(|c| c.value == maximum)
            .map(|c| Achiever::Gamma { gamma: c.gamma }),
    );

    let (k1, k2) = top_two(ranks);
    let valid = n >= k1 + k2;
    let mut predicted_cases: Vec<EqualityCase> = argmax
        .iter()
        .map(|a| match a {
            Achiever::Star => EqualityCase::Stars,
            Achiever::Gamma { gamma } => EqualityCase::Hub { gamma: *gamma },
        })
        .collect();
    if n == k1 + k2 {
        if m == 2 && ranks.iter().all(RankSet::is_singleton) {
            predicted_cases.push(EqualityCase::Complementary);
        }
        if m >= 3 && ranks.iter().all(|r| r.is_singleton() && *r == ranks[0]) {
            predicted_cases.push(EqualityCase::Repeated);
        }
    }
    Ok(BoundReport {
        n,
        ranks: ranks.to_vec(),
        star_total,
        candidates,
        maximum,
        argmax,
        valid,
        predicted_cases,
    })
}

/// Earlier bounds that the non-uniform maximum specialises to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassicBound {
    /// intersecting `F ⊆ binom([n], k)`, `n >= 2k`
    ErdosKoRado { n: usize, k: usize },
    /// two non-empty cross-intersecting `k`-uniform families, `n >= 2k`
    HiltonMilner { n: usize, k: usize },
    /// `F_1 ⊆ binom([n], <= r)`, `F_2 ⊆ binom([n], <= s)`, `1 <= r <= s`
    BorgFeghali { n: usize, r: usize, s: usize },
    /// `m` non-empty cross-intersecting `k`-uniform families, `n >= 2k`
    ShiFranklQian { n: usize, k: usize, m: usize },
    /// uniform families of sizes `k_1 >= ... >= k_m`, `n >= k_1 + k_2`
    MixedUniform { n: usize, ks: Vec<usize> },
}

pub fn classic_bound(kind: &ClassicBound) -> Result<u128> {
    let c = |n: usize, k: usize| choose(n, k);
    let c_sub = |n: usize, d: usize, k: usize| binom(n as i64 - d as i64, k as i64);
    let need = |ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(Error::Parameter(format!("{kind:?}: requires {what}")))
        }
    };
    match *kind {
        ClassicBound::ErdosKoRado { n, k } => {
            need(k >= 1 && n >= 2 * k, "1 <= k, n >= 2k")?;
            Ok(c(n - 1, k - 1))
        }
        ClassicBound::HiltonMilner { n, k } => {
            need(k >= 1 && n >= 2 * k, "1 <= k, n >= 2k")?;
            Ok(1 + c(n, k) - c_sub(n, k, k))
        }
        ClassicBound::BorgFeghali { n, r, s } => {
            need(n >= 1 && 1 <= r && r <= s, "n >= 1, 1 <= r <= s")?;
            Ok(1 + (1..=s).map(|i| c(n, i) - c_sub(n, r, i)).sum::<u128>())
        }
        ClassicBound::ShiFranklQian { n, k, m } => {
            need(k >= 1 && n >= 2 * k && m >= 2, "1 <= k, n >= 2k, m >= 2")?;
            let stars = m as u128 * c(n - 1, k - 1);
            let hub = c(n, k) - c_sub(n, k, k) + m as u128 - 1;
            Ok(stars.max(hub))
        }
        ClassicBound::MixedUniform { n, ref ks } => {
            need(ks.len() >= 2, "at least two families")?;
            need(ks.windows(2).all(|w| w[0] >= w[1]), "k_1 >= k_2 >= ... >= k_m")?;
            need(ks[ks.len() - 1] >= 1 && n >= ks[0] + ks[1], "k_m >= 1, n >= k_1 + k_2")?;
            let km = ks[ks.len() - 1];
            let stars: u128 = ks.iter().map(|&k| c(n - 1, k - 1)).sum();
            let hub = c(n, ks[0]) - c_sub(n, km, ks[0])
                + ks[1..].iter().map(|&k| c_sub(n, km, k - km)).sum::<u128>();
            Ok(stars.max(hub))
        }
    }
}

/// `F_γ(l) <= max(F_γ(1), F_γ(k_min(γ)))` for every admissible `l`.
pub fn endpoint_check(n: usize, ranks: &[RankSet], gamma: usize) -> Result<bool> {
    let curve = f_gamma_curve(n, ranks, gamma)?;
    let ends = curve[0].1.max(curve[curve.len() - 1].1);
    Ok(curve.iter().all(|&(_, v)| v <= ends))
}

/// Compares `C(n-l, b-(l+1-u)) · C(n-l, a-u)` with
/// `C(n-l, b-(l+1-u)+1) · C(n-l, a-u+1)`.
pub fn logconcavity_check(n: usize, l: usize, u: usize, a: usize, b: usize) -> Ordering {
    let (free, dual) = (n as i64 - l as i64, l as i64 + 1 - u as i64);
    let (a, b, u) = (a as i64, b as i64, u as i64);
    let left = binom(free, b - dual) * binom(free, a - u);
    let right = binom(free, b - dual + 1) * binom(free, a - u + 1);
    left.cmp(&right)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossTBound {
    pub t: usize,
    pub k3: usize,
    /// `(r, Σ_j Σ_{a∈R_j} Σ_{r<=i<=2r} C(t+2r, t+i) C(n-t-2r, a-t-i))`
    pub frontier: Vec<(usize, u128)>,
    pub candidates: Vec<Candidate>,
    pub maximum: u128,
}

/// The conjectured maximum for non-empty cross-`t`-intersecting families.
pub fn cross_t_conjecture_bound(n: usize, ranks: &[RankSet], t: usize) -> Result<CrossTBound> {
    check_ranks(n, ranks)?;
    if t == 0 {
        return Err(Error::Parameter("t must be at least 1".into()));
    }
    let (k1, k2) = top_two(ranks);
    if n + t < k1 + k2 + 1 {
        return Err(Error::Parameter(format!(
            "requires n >= k1 + k2 - t + 1 = {}",
            (k1 + k2 + 1).saturating_sub(t)
        )));
    }
    let k3 = ranks.iter().map(RankSet::smallest).min().expect("non-empty");
    let (n_, t_) = (n as i64, t as i64);
    let frontier: Vec<(usize, u128)> = (0..=k3.saturating_sub(t))
        .filter(|_| k3 >= t)
        .map(|r| {
            let r_ = r as i64;
            let value = ranks
                .iter()
                .flat_map(|rs| rs.iter())
                .map(|a| {
                    (r_..=2 * r_)
                        .map(|i| binom(t_ + 2 * r_, t_ + i) * binom(n_ - t_ - 2 * r_, a as i64 - t_ - i))
                        .sum::<u128>()
                })
                .sum();
            (r, value)
        })
        .collect();
    let candidates: Vec<Candidate> = (0..ranks.len())
        .map(|gamma| {
            let k = k_min(ranks, gamma) as i64;
            let hub: u128 = ranks[gamma]
                .iter()
                .map(|a| {
                    (t_..=a as i64)
                        .map(|c| binom(k, c) * binom(n_ - k, a as i64 - c))
                        .sum::<u128>()
                })
                .sum();
            let spokes: u128 = ranks
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != gamma)
                .flat_map(|(_, r)| r.iter())
                .map(|b| binom(n_ - k, b as i64 - k))
                .sum();
            Candidate {
                gamma,
                k_min: k as usize,
                value: hub + spokes,
            }
        })
        .collect();
    let maximum = frontier
        .iter()
        .map(|&(_, v)| v)
        .chain(candidates.iter().map(|c| c.value))
        .max()
        .unwrap_or(0);
    Ok(CrossTBound {
        t,
        k3,
        frontier,
        candidates,
        maximum,
    })
}
