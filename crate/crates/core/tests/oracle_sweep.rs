use proptest::prelude::*;
use xfam::bounds::{theorem_bound, Achiever, EqualityCase};
use xfam::extremal::{classify, hub_tuple, star_tuple};
use xfam::oracle::*;
use xfam::set::lex_rank;
use xfam::{Error, Instance, RankSet};

fn pool() -> Vec<RankSet> {
    ["1", "2", "3", "2,1", "3,2"].iter().map(|s| s.parse().unwrap()).collect()
}

fn grid_m2_singletons() -> Vec<Instance> {
    let mut grid = Vec::new();
    for n in 5..=8 {
        for k1 in 1..=4 {
            for k2 in 1..=4 {
                if k1 + k2 <= n {
                    let ranks = vec![RankSet::single(k1).unwrap(), RankSet::single(k2).unwrap()];
                    grid.push(Instance::new(n, 1, ranks).unwrap());
                }
            }
        }
    }
    grid
}

fn grid_m3() -> Vec<Instance> {
    let pool = pool();
    let mut grid = Vec::new();
    for n in 6..=8 {
        for a in &pool {
            for b in &pool {
                for c in &pool {
                    grid.push(Instance::new(n, 1, vec![a.clone(), b.clone(), c.clone()]).unwrap());
                }
            }
        }
    }
    grid
}

#[test]
fn singleton_grid_has_no_mismatches() {
    let report = verify_sweep(&grid_m2_singletons(), &OracleConfig::default());
    assert!(report.skipped.is_empty());
    assert_eq!(report.mismatches, 0);
    for e in &report.entries {
        assert!(e.equal);
        assert!(!e.classified_case.is_empty(), "{} unclassified", e.instance);
    }
}

#[test]
fn three_family_grid_mismatches() {
    let report = verify_sweep(&grid_m3(), &OracleConfig::default());
    assert_eq!(report.entries.len(), 375);
    assert_eq!(report.mismatches, 33);
    for e in report.entries.iter().filter(|e| !e.equal) {
        assert!(e.oracle_max > e.bound_max, "{}", e.instance);
    }
    let first = report
        .entries
        .iter()
        .find(|e| e.instance.n == 6 && e.instance.ranks == xfam::set::parse_rank_list("2,1;2;3,2").unwrap())
        .unwrap();
    assert_eq!((first.oracle_max, first.bound_max), (27, 26));
}

#[test]
fn witnesses_are_valid_and_linitial() {
    let config = OracleConfig::default();
    for instance in grid_m3().into_iter().step_by(7) {
        let result = linitial_oracle(&instance, &config).unwrap();
        let w = &result.witness;
        assert!(w.all_non_empty() && w.is_cross_intersecting(1));
        assert_eq!(w.total(), result.maximum);
        assert_eq!(w.ranks(), &instance.ranks[..]);
        for (j, layers) in result.profile.iter().enumerate() {
            for &(r, size) in layers {
                let layer = w.family(j).layer(r);
                assert_eq!(layer.len(), size);
                let ranks: Vec<u128> = layer.iter().map(|s| lex_rank(s).unwrap()).collect();
                assert_eq!(ranks, (1..=size as u128).collect::<Vec<_>>());
            }
        }
        let bound = theorem_bound(instance.n, &instance.ranks).unwrap();
        if bound.valid {
            assert!(result.maximum >= bound.maximum, "{instance}");
        }
    }
}

#[test]
fn oracles_agree_on_micro_instances() {
    let config = OracleConfig::default();
    let ranks: Vec<RankSet> = ["1", "2", "2,1", "3", "3,1"].iter().map(|s| s.parse().unwrap()).collect();
    let mut compared = 0;
    for n in 2..=5 {
        for a in &ranks {
            for b in &ranks {
                let Ok(instance) = Instance::new(n, 1, vec![a.clone(), b.clone()]) else { continue };
                match exhaustive_oracle(&instance, &config) {
                    Ok(ex) => {
                        let li = linitial_oracle(&instance, &config).unwrap();
                        assert_eq!(ex.maximum, li.maximum, "{instance}");
                        compared += 1;
                    }
                    Err(Error::ScaleGuard(_)) => {}
                    Err(e) => panic!("{instance}: {e}"),
                }
            }
        }
    }
    assert!(compared > 20);
}

#[test]
fn extremal_constructions_classify_as_predicted() {
    for n in 4..=8 {
        for a in &pool() {
            for b in &pool() {
                let ranks = vec![a.clone(), b.clone()];
                let bound = theorem_bound(n, &ranks).unwrap();
                if !bound.valid {
                    continue;
                }
                let instance = Instance::new(n, 1, ranks.clone()).unwrap();
                for achiever in &bound.argmax {
                    let (tuple, case) = match *achiever {
                        Achiever::Star => (star_tuple(n, &ranks).unwrap(), EqualityCase::Stars),
                        Achiever::Gamma { gamma } => (
                            hub_tuple(n, &ranks, gamma, instance.k_min(gamma)).unwrap(),
                            EqualityCase::Hub { gamma },
                        ),
                    };
                    assert_eq!(tuple.total(), bound.maximum);
                    let cases: Vec<_> = classify(&tuple).unwrap().into_iter().map(|c| c.case).collect();
                    assert!(cases.contains(&case), "{instance}: {cases:?}");
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn frontier_is_monotone(n in 2..=9usize, a in 1..=5usize, b in 1..=5usize, frac in 0.0..1.0f64) {
        prop_assume!(a <= n && b <= n);
        let total = xfam::binomial::choose(n, a);
        let s = ((total as f64) * frac) as u128;
        let here = transversal_frontier(n, a, s, b, 1).unwrap();
        if s < total {
            prop_assert!(transversal_frontier(n, a, s + 1, b, 1).unwrap() <= here);
        }
        prop_assert!(transversal_frontier(n, a, s, b, 2).unwrap() <= here);
        prop_assert!(here <= xfam::binomial::choose(n, b));
    }
}
