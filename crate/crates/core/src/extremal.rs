//! Extremal constructions and the equality-case classifier.

use serde::Serialize;

use crate::binomial::choose;
use crate::bounds::{theorem_bound, EqualityCase};
use crate::error::{Error, Result};
use crate::family::{is_intersecting, k_min, top_two, FamilyTuple, SetFamily};
use crate::set::{ElementSet, RankSet};

fn filtered(n: usize, ranks: &RankSet, keep: impl Fn(&ElementSet) -> bool) -> Result<SetFamily> {
    let full = SetFamily::full(n, ranks)?;
    Ok(SetFamily::from_sorted_unchecked(
        n,
        full.iter().filter(|s| keep(s)).copied().collect(),
    ))
}

fn prefix(n: usize, k: usize) -> Result<ElementSet> {
    if k == 0 || k > n {
        return Err(Error::Parameter(format!("need 1 <= k <= n = {n}, got k = {k}")));
    }
    ElementSet::prefix(n, k)
}

/// `S(n, R)`: every `R`-set containing 1.
pub fn star(n: usize, ranks: &RankSet) -> Result<SetFamily> {
    filtered(n, ranks, |s| s.contains(1))
}

/// `M1(n, R, [k])`: every `R`-set meeting `[k]`.
pub fn m1(n: usize, ranks: &RankSet, k: usize) -> Result<SetFamily> {
    let p = prefix(n, k)?;
    filtered(n, ranks, |s| s.intersection_len(&p) > 0)
}

/// `M2(n, R, [k])`: every `R`-set containing `[k]`.
pub fn m2(n: usize, ranks: &RankSet, k: usize) -> Result<SetFamily> {
    let p = prefix(n, k)?;
    filtered(n, ranks, |s| p.is_subset(s))
}

/// `(S(n, R_1), ..., S(n, R_m))`.
pub fn star_tuple(n: usize, ranks: &[RankSet]) -> Result<FamilyTuple> {
    let families = ranks.iter().map(|r| star(n, r)).collect::<Result<_>>()?;
    FamilyTuple::new(n, ranks.to_vec(), families)
}

/// `M1(n, R_γ, [k])` in position `γ`, `M2(n, R_α, [k])` elsewhere.
pub fn hub_tuple(n: usize, ranks: &[RankSet], gamma: usize, k: usize) -> Result<FamilyTuple> {
    if gamma >= ranks.len() {
        return Err(Error::Parameter(format!("family index {gamma} out of range")));
    }
    let families = ranks
        .iter()
        .enumerate()
        .map(|(j, r)| if j == gamma { m1(n, r, k) } else { m2(n, r, k) })
        .collect::<Result<_>>()?;
    FamilyTuple::new(n, ranks.to_vec(), families)
}

/// `(binom([n], k1) \ {[n] \ B : B ∈ F2}, F2)` for `n = k1 + k2`.
pub fn case_iii(n: usize, k1: usize, k2: usize, f2: &SetFamily) -> Result<FamilyTuple> {
    if k1 == 0 || k2 == 0 || n != k1 + k2 {
        return Err(Error::Parameter(format!("needs n = k1 + k2 with k1, k2 >= 1 (n={n}, k1={k1}, k2={k2})")));
    }
    if f2.universe() != n {
        return Err(Error::Parameter(format!("F2 lives over [{}], not [{n}]", f2.universe())));
    }
    let r2 = RankSet::single(k2)?;
    f2.check_ranks(&r2)?;
    let top = choose(n, k2);
    if f2.is_empty() || f2.len() as u128 >= top {
        return Err(Error::Parameter(format!("needs 0 < |F2| < {top}, got {}", f2.len())));
    }
    let f1 = SetFamily::full_layer(n, k1)?.difference(&f2.complements());
    FamilyTuple::new(n, vec![RankSet::single(k1)?, r2], vec![f1, f2.clone()])
}

/// `m` copies of an intersecting `F ⊆ binom([2k], k)` with `|F| = C(2k-1, k-1)`.
pub fn case_iv(n: usize, k: usize, m: usize, f: &SetFamily) -> Result<FamilyTuple> {
    if k == 0 || n != 2 * k || m < 3 {
        return Err(Error::Parameter(format!("needs n = 2k and m >= 3 (n={n}, k={k}, m={m})")));
    }
    if f.universe() != n {
        return Err(Error::Parameter(format!("F lives over [{}], not [{n}]", f.universe())));
    }
    let r = RankSet::single(k)?;
    f.check_ranks(&r)?;
    let want = choose(n - 1, k - 1);
    if f.len() as u128 != want {
        return Err(Error::Validation(format!("|F| = {} but must be {want}", f.len())));
    }
    if !is_intersecting(f, 1) {
        return Err(Error::Validation("F is not intersecting".into()));
    }
    FamilyTuple::new(n, vec![r; m], vec![f.clone(); m])
}

/// Parameters for [`construct`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Construction {
    Star { n: usize, ranks: RankSet },
    M1 { n: usize, ranks: RankSet, k: usize },
    M2 { n: usize, ranks: RankSet, k: usize },
    CaseIii { n: usize, k1: usize, k2: usize, f2: SetFamily },
    CaseIv { n: usize, k: usize, m: usize, f: SetFamily },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Constructed {
    Family(SetFamily),
    Tuple(FamilyTuple),
}

pub fn construct(kind: &Construction) -> Result<Constructed> {
    Ok(match kind {
        Construction::Star { n, ranks } => Constructed::Family(star(*n, ranks)?),
        Construction::M1 { n, ranks, k } => Constructed::Family(m1(*n, ranks, *k)?),
        Construction::M2 { n, ranks, k } => Constructed::Family(m2(*n, ranks, *k)?),
        Construction::CaseIii { n, k1, k2, f2 } => Constructed::Tuple(case_iii(*n, *k1, *k2, f2)?),
        Construction::CaseIv { n, k, m, f } => Constructed::Tuple(case_iv(*n, *k, *m, f)?),
    })
}

/// One matched equality case. `witness_permutation[x - 1]` is the image of
/// `x` under a relabelling carrying the reference construction onto the tuple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseMatch {
    #[serde(flatten)]
    pub case: EqualityCase,
    pub witness_permutation: Option<Vec<usize>>,
}

/// Every equality case that `tuple` realises. An empty result means none does.
pub fn classify(tuple: &FamilyTuple) -> Result<Vec<CaseMatch>> {
    let (n, ranks, m) = (tuple.universe(), tuple.ranks(), tuple.len());
    let (k1, k2) = top_two(ranks);
    if n < k1 + k2 {
        return Err(Error::Precondition(format!("n = {n} < k1 + k2 = {}", k1 + k2)));
    }
    if !tuple.all_non_empty() {
        return Err(Error::Precondition("tuple has an empty family".into()));
    }
    if !tuple.is_cross_intersecting(1) {
        return Err(Error::Precondition("tuple is not cross-intersecting".into()));
    }
    let maximum = theorem_bound(n, ranks)?.maximum;
    let total = tuple.total();
    if total != maximum {
        return Err(Error::NotMaximal { total, maximum });
    }

    let mut found = Vec::new();
    if let Some(p) = are_isomorphic(&star_tuple(n, ranks)?, tuple)? {
        found.push(CaseMatch {
            case: EqualityCase::Stars,
            witness_permutation: Some(p),
        });
    }
    for gamma in 0..m {
        let reference = hub_tuple(n, ranks, gamma, k_min(ranks, gamma))?;
        if let Some(p) = are_isomorphic(&reference, tuple)? {
            found.push(CaseMatch {
                case: EqualityCase::Hub { gamma },
                witness_permutation: Some(p),
            });
        }
    }
    let singletons = ranks.iter().all(RankSet::is_singleton);
    if n == k1 + k2 && m == 2 && singletons {
        let (f1, f2) = (tuple.family(0), tuple.family(1));
        let layer = SetFamily::full_layer(n, ranks[0].largest())?;
        let top = choose(n, ranks[1].largest());
        if *f1 == layer.difference(&f2.complements()) && (f2.len() as u128) < top {
            found.push(CaseMatch {
                case: EqualityCase::Complementary,
                witness_permutation: None,
            });
        }
    }
    if n == k1 + k2 && m >= 3 && singletons && ranks.iter().all(|r| *r == ranks[0]) {
        let f = tuple.family(0);
        let k = ranks[0].largest();
        if tuple.families().iter().all(|g| g == f)
            && f.len() as u128 == choose(n - 1, k - 1)
            && is_intersecting(f, 1)
        {
            found.push(CaseMatch {
                case: EqualityCase::Repeated,
                witness_permutation: None,
            });
        }
    }
    Ok(found)
}

/// Which families and cardinalities contain `x`, as a comparable signature.
fn signatures(t: &FamilyTuple) -> Vec<Vec<usize>> {
    let n = t.universe();
    (1..=n)
        .map(|x| {
            t.ranks()
                .iter()
                .zip(t.families())
                .flat_map(|(r, f)| r.iter().map(move |a| f.layer_slice(a).iter().filter(|s| s.contains(x)).count()))
                .collect()
        })
        .collect()
}

struct IsoSearch<'a> {
    n: usize,
    /// Elements of `A` in assignment order.
    order: Vec<usize>,
    /// `closing[i]`: `(family, bits)` of members of `A` whose last element in `order` is `order[i]`.
    closing: Vec<Vec<(usize, u64)>>,
    b: &'a FamilyTuple,
    options: Vec<Vec<usize>>,
    image: Vec<usize>,
    used: u64,
}

impl IsoSearch<'_> {
    fn map_bits(&self, bits: u64) -> u64 {
        (0..self.n)
            .filter(|i| bits >> i & 1 == 1)
            .fold(0, |acc, i| acc | 1 << (self.image[i + 1] - 1))
    }

    fn run(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let x = self.order[depth];
        for y in self.options[x - 1].clone() {
            if self.used >> (y - 1) & 1 == 1 {
                continue;
            }
            self.image[x] = y;
            self.used |= 1 << (y - 1);
            let ok = self.closing[depth].iter().all(|&(j, bits)| {
                let mapped = ElementSet::from_bits_unchecked(self.n, self.map_bits(bits));
                self.b.family(j).contains(&mapped)
            });
            if ok && self.run(depth + 1) {
                return true;
            }
            self.used &= !(1 << (y - 1));
        }
        false
    }
}

/// A permutation `π` of `[n]` with `π(A_j) = B_j` for every `j`, if one exists.
/// The result lists `π(1), ..., π(n)`.
pub fn are_isomorphic(a: &FamilyTuple, b: &FamilyTuple) -> Result<Option<Vec<usize>>> {
    if a.universe() != b.universe() || a.len() != b.len() || a.ranks() != b.ranks() {
        return Err(Error::Parameter("tuples differ in n, m or rank sets".into()));
    }
    let n = a.universe();
    if a.profile() != b.profile() {
        return Ok(None);
    }
    let (sa, sb) = (signatures(a), signatures(b));
    let options: Vec<Vec<usize>> = sa
        .iter()
        .map(|sig| (1..=n).filter(|&y| sb[y - 1] == *sig).collect())
        .collect();
    if options.iter().any(Vec::is_empty) {
        return Ok(None);
    }
    let mut order: Vec<usize> = (1..=n).collect();
    order.sort_by_key(|&x| (options[x - 1].len(), x));
    let mut position = vec![0; n + 1];
    for (i, &x) in order.iter().enumerate() {
        position[x] = i;
    }
    let mut closing = vec![Vec::new(); n];
    for (j, f) in a.families().iter().enumerate() {
        for s in f {
            let last = s.iter().map(|x| position[x]).max().unwrap_or(0);
            closing[last].push((j, s.bits()));
        }
    }
    let mut search = IsoSearch {
        n,
        order,
        closing,
        b,
        options,
        image: vec![0; n + 1],
        used: 0,
    };
    Ok(search.run(0).then(|| search.image[1..].to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{size_m1, size_m2, size_star};
    use crate::set::parse_rank_list;

    fn fam(n: usize, lists: &[&[usize]]) -> SetFamily {
        SetFamily::from_lists(n, lists).unwrap()
    }

    fn r(xs: &[usize]) -> RankSet {
        RankSet::new(xs.iter().copied()).unwrap()
    }

    fn tuple(n: usize, ranks: &str, fams: Vec<SetFamily>) -> FamilyTuple {
        FamilyTuple::new(n, parse_rank_list(ranks).unwrap(), fams).unwrap()
    }

    /// Tries every permutation of `[n]`.
    fn iso_brute(a: &FamilyTuple, b: &FamilyTuple) -> bool {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(n - 1) {
                for pos in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(pos, n);
                    out.push(q);
                }
            }
            out
        }
        let n = a.universe();
        perms(n).into_iter().any(|p| {
            a.families().iter().zip(b.families()).all(|(fa, fb)| {
                let img = SetFamily::new(n, fa.iter().map(|s| ElementSet::new(n, s.iter().map(|x| p[x - 1])).unwrap())).unwrap();
                img == *fb
            })
        })
    }

    #[test]
    fn constructor_examples() {
        assert_eq!(star(4, &r(&[2])).unwrap(), fam(4, &[&[1, 2], &[1, 3], &[1, 4]]));
        assert_eq!(star(4, &r(&[1, 2])).unwrap().layer(1), fam(4, &[&[1]]));
        assert_eq!(
            m2(6, &r(&[3]), 2).unwrap(),
            fam(6, &[&[1, 2, 3], &[1, 2, 4], &[1, 2, 5], &[1, 2, 6]])
        );
        let t = case_iii(6, 3, 3, &star(6, &r(&[3])).unwrap()).unwrap();
        assert_eq!(t.family(0).len(), 10);
        assert_eq!(t.total(), 20);
        assert!(m1(4, &r(&[2]), 0).is_err());
        assert!(m2(4, &r(&[2]), 5).is_err());
    }

    #[test]
    fn constructed_sizes_match_formulas() {
        for n in 1..=10 {
            for mask in 1u32..16 {
                let ranks = RankSet::new((1..=4).filter(|a| mask >> (a - 1) & 1 == 1)).unwrap();
                if ranks.largest() > n {
                    continue;
                }
                assert_eq!(star(n, &ranks).unwrap().len() as u128, size_star(n, &ranks));
                for k in 1..=n.min(5) {
                    assert_eq!(m1(n, &ranks, k).unwrap().len() as u128, size_m1(n, &ranks, k));
                    assert_eq!(m2(n, &ranks, k).unwrap().len() as u128, size_m2(n, &ranks, k));
                }
            }
        }
    }

    #[test]
    fn hub_tuples_cross_intersect() {
        for n in 2..=8 {
            for spec in ["3;2", "3,1;2", "2;2;1", "4,2;3;3,2"] {
                let ranks = parse_rank_list(spec).unwrap();
                if ranks.iter().any(|r| r.largest() > n) {
                    continue;
                }
                for gamma in 0..ranks.len() {
                    for k in 1..=k_min(&ranks, gamma) {
                        assert!(hub_tuple(n, &ranks, gamma, k).unwrap().is_cross_intersecting(1));
                    }
                }
            }
        }
    }

    #[test]
    fn case_constructor_errors() {
        let s = star(6, &r(&[3])).unwrap();
        assert!(matches!(case_iii(7, 3, 3, &s), Err(Error::Parameter(_))));
        assert!(matches!(case_iii(6, 3, 3, &SetFamily::empty(6).unwrap()), Err(Error::Parameter(_))));
        assert!(matches!(case_iii(6, 3, 3, &SetFamily::full_layer(6, 3).unwrap()), Err(Error::Parameter(_))));
        let tri = fam(4, &[&[1, 2], &[1, 3], &[2, 3]]);
        assert!(case_iv(4, 2, 3, &tri).is_ok());
        assert!(matches!(case_iv(4, 2, 2, &tri), Err(Error::Parameter(_))));
        assert!(matches!(
            case_iv(4, 2, 3, &fam(4, &[&[1, 2], &[1, 3]])),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            case_iv(4, 2, 3, &fam(4, &[&[1, 2], &[3, 4], &[1, 3]])),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn case_iii_sums_to_layer() {
        let n = 6;
        let layer = SetFamily::full_layer(n, 2).unwrap();
        for take in 1..layer.len() {
            let f2 = SetFamily::new(n, layer.iter().take(take).copied()).unwrap();
            let t = case_iii(n, 4, 2, &f2).unwrap();
            assert_eq!(t.total(), choose(6, 4));
            assert!(t.is_cross_intersecting(1));
        }
    }

    #[test]
    fn isomorphism_examples() {
        let a = tuple(4, "2;2", vec![star(4, &r(&[2])).unwrap(), star(4, &r(&[2])).unwrap()]);
        let at2 = fam(4, &[&[1, 2], &[2, 3], &[2, 4]]);
        let b = tuple(4, "2;2", vec![at2.clone(), at2]);
        let p = are_isomorphic(&a, &b).unwrap().unwrap();
        assert_eq!((p[0], p[1]), (2, 1));

        let m2t = tuple(4, "2;2", vec![fam(4, &[&[1, 2]]), fam(4, &[&[1, 2]])]);
        assert_eq!(are_isomorphic(&a, &m2t).unwrap(), None);

        let s = fam(4, &[&[1, 2], &[1, 3], &[1, 4]]);
        let tri = fam(4, &[&[1, 2], &[1, 3], &[2, 3]]);
        let x = tuple(4, "2;2", vec![s.clone(), s]);
        let y = tuple(4, "2;2", vec![tri.clone(), tri]);
        assert_eq!(are_isomorphic(&x, &y).unwrap(), None);
        assert!(!iso_brute(&x, &y));

        let z = tuple(5, "2;2", vec![fam(5, &[&[1, 2]]), fam(5, &[&[1, 2]])]);
        assert!(matches!(are_isomorphic(&x, &z), Err(Error::Parameter(_))));
    }

    #[test]
    fn isomorphism_agrees_with_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let n = rng.gen_range(2..=5);
            let pick = |rng: &mut rand_chacha::ChaCha8Rng| {
                let layer = SetFamily::full_layer(n, 2).unwrap();
                SetFamily::new(n, layer.iter().filter(|_| rng.gen_bool(0.4)).copied()).unwrap()
            };
            let a = tuple(n, "2;2", vec![pick(&mut rng), pick(&mut rng)]);
            // half of the time compare against a relabelled copy
            let b = if rng.gen_bool(0.5) {
                let mut p: Vec<usize> = (1..=n).collect();
                for i in (1..n).rev() {
                    p.swap(i, rng.gen_range(0..=i));
                }
                let relabel = |f: &SetFamily| {
                    SetFamily::new(n, f.iter().map(|s| ElementSet::new(n, s.iter().map(|x| p[x - 1])).unwrap())).unwrap()
                };
                tuple(n, "2;2", vec![relabel(a.family(0)), relabel(a.family(1))])
            } else {
                tuple(n, "2;2", vec![pick(&mut rng), pick(&mut rng)])
            };
            let fast = are_isomorphic(&a, &b).unwrap();
            assert_eq!(fast.is_some(), iso_brute(&a, &b), "{a:?} vs {b:?}");
            if let Some(p) = fast {
                for (fa, fb) in a.families().iter().zip(b.families()) {
                    let img = SetFamily::new(n, fa.iter().map(|s| ElementSet::new(n, s.iter().map(|x| p[x - 1])).unwrap())).unwrap();
                    assert_eq!(img, *fb);
                }
            }
        }
    }

    fn cases(t: &FamilyTuple) -> Vec<EqualityCase> {
        classify(t).unwrap().into_iter().map(|c| c.case).collect()
    }

    #[test]
    fn classify_examples() {
        let ranks = parse_rank_list("3;2").unwrap();
        assert!(matches!(classify(&star_tuple(7, &ranks).unwrap()), Err(Error::NotMaximal { total: 21, maximum: 26 })));
        assert!(matches!(classify(&star_tuple(6, &ranks).unwrap()), Err(Error::NotMaximal { total: 15, maximum: 17 })));
        let hub = hub_tuple(6, &ranks, 0, 2).unwrap();
        assert_eq!(cases(&hub), vec![EqualityCase::Hub { gamma: 0 }]);

        let n6 = parse_rank_list("3;3").unwrap();
        assert_eq!(
            cases(&star_tuple(6, &n6).unwrap()),
            vec![EqualityCase::Stars, EqualityCase::Complementary]
        );
        let worked = tuple(
            6,
            "3;3",
            vec![
                crate::compress::upset(&fam(6, &[&[1], &[2, 3]]), &r(&[3])).unwrap(),
                crate::compress::upset(&fam(6, &[&[1, 2], &[1, 3]]), &r(&[3])).unwrap(),
            ],
        );
        assert_eq!(worked.total(), 20);
        assert_eq!(cases(&worked), vec![EqualityCase::Complementary]);

        let tri = fam(4, &[&[1, 2], &[1, 3], &[2, 3]]);
        assert_eq!(cases(&case_iv(4, 2, 3, &tri).unwrap()), vec![EqualityCase::Repeated]);
        let k2 = parse_rank_list("2;2;2").unwrap();
        assert_eq!(
            cases(&star_tuple(4, &k2).unwrap()),
            vec![EqualityCase::Stars, EqualityCase::Repeated]
        );
    }

    #[test]
    fn classify_rejects_bad_tuples() {
        let ranks = parse_rank_list("2;2").unwrap();
        let empty = FamilyTuple::new(4, ranks.clone(), vec![star(4, &r(&[2])).unwrap(), SetFamily::empty(4).unwrap()]).unwrap();
        assert!(matches!(classify(&empty), Err(Error::Precondition(_))));
        let apart = tuple(4, "2;2", vec![fam(4, &[&[1, 2]]), fam(4, &[&[3, 4]])]);
        assert!(matches!(classify(&apart), Err(Error::Precondition(_))));
        let invalid = tuple(4, "3;2", vec![fam(4, &[&[1, 2, 3]]), fam(4, &[&[1, 2]])]);
        assert!(matches!(classify(&invalid), Err(Error::Precondition(_))));
    }

    #[test]
    fn case_match_json() {
        let ranks = parse_rank_list("3;2").unwrap();
        let found = classify(&hub_tuple(6, &ranks, 0, 2).unwrap()).unwrap();
        let v = serde_json::to_value(&found[0]).unwrap();
        assert_eq!(v["case"], "ii");
        assert_eq!(v["gamma"], 0);
        assert_eq!(v["witness_permutation"].as_array().unwrap().len(), 6);
    }
}
