//! Shifting operators `s_{i,j}`, left-compression and up-sets.

use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::set::{ElementSet, RankSet};

fn check_pair(i: usize, j: usize, n: usize) -> Result<()> {
    if i == 0 || i >= j || j > n {
        return Err(Error::Parameter(format!(
            "shift s_{{{i},{j}}} needs 1 <= i < j <= {n}"
        )));
    }
    Ok(())
}

/// `(A \ {j}) ∪ {i}` if `j ∈ A`, `i ∉ A`; `A` otherwise. Ignores the host family.
pub fn swap(set: &ElementSet, i: usize, j: usize) -> ElementSet {
    if set.contains(j) && !set.contains(i) {
        set.without(j).with(i)
    } else {
        *set
    }
}

fn shift_unchecked(set: &ElementSet, i: usize, j: usize, host: &SetFamily) -> ElementSet {
    let moved = swap(set, i, j);
    if moved != *set && !host.contains(&moved) {
        moved
    } else {
        *set
    }
}

/// `s_{i,j}(A)` relative to the host family `F ∋ A`.
pub fn shift_set(set: &ElementSet, i: usize, j: usize, host: &SetFamily) -> Result<ElementSet> {
    check_pair(i, j, host.universe())?;
    if !host.contains(set) {
        return Err(Error::Membership(set.to_string()));
    }
    Ok(shift_unchecked(set, i, j, host))
}

/// `s_{i,j}(F) = {s_{i,j}(A) : A ∈ F}`.
pub fn shift_family(family: &SetFamily, i: usize, j: usize) -> Result<SetFamily> {
    check_pair(i, j, family.universe())?;
    Ok(shift_family_unchecked(family, i, j))
}

fn shift_family_unchecked(family: &SetFamily, i: usize, j: usize) -> SetFamily {
    let image = family.iter().map(|a| shift_unchecked(a, i, j, family));
    SetFamily::new(family.universe(), image).expect("shifts stay inside the universe")
}

/// Applies every `s_{i,j}` (sweeping `j` upwards, then `i` upwards) until a
/// full pass changes nothing.
pub fn left_compress(family: &SetFamily) -> SetFamily {
    let n = family.universe();
    let mut current = family.clone();
    loop {
        let mut changed = false;
        for j in 2..=n {
            for i in 1..j {
                let next = shift_family_unchecked(&current, i, j);
                if next != current {
                    changed = true;
                    current = next;
                }
            }
        }
        if !changed {
            return current;
        }
    }
}

/// True iff `s_{i,j}(F) = F` for all `1 <= i < j <= n`.
pub fn is_left_compressed(family: &SetFamily) -> bool {
    let n = family.universe();
    family.iter().all(|a| {
        (2..=n).all(|j| (1..j).all(|i| {
            let moved = swap(a, i, j);
            moved == *a || family.contains(&moved)
        }))
    })
}

/// `⟨A⟩_R`: every set with cardinality in `R` containing some member of `A`.
pub fn upset(sets: &SetFamily, ranks: &RankSet) -> Result<SetFamily> {
    let n = sets.universe();
    ranks.check_within(n)?;
    if let Some(big) = sets.iter().find(|s| s.len() > ranks.largest()) {
        return Err(Error::Rank {
            cardinality: big.len(),
            ranks: ranks.to_string(),
        });
    }
    let mut out = Vec::new();
    for a in sets {
        for r in ranks.iter().filter(|&r| r >= a.len()) {
            out.extend(a.supersets_of_size(r));
        }
    }
    SetFamily::new(n, out)
}

/// True iff `A ∈ F`, `A ⊆ B`, `|B| ∈ R` imply `B ∈ F`.
pub fn is_monotone(family: &SetFamily, ranks: &RankSet) -> Result<bool> {
    family.check_ranks(ranks)?;
    ranks.check_within(family.universe())?;
    for a in family {
        for r in ranks.iter().filter(|&r| r > a.len()) {
            if !a.supersets_of_size(r).all(|b| family.contains(&b)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Inclusion-minimal members of a family.
pub fn minimal_members(family: &SetFamily) -> SetFamily {
    let sets = family.as_slice();
    let minimal = sets
        .iter()
        .filter(|a| !sets.iter().any(|b| b != *a && b.is_subset(a)))
        .copied()
        .collect::<Vec<_>>();
    SetFamily::new(family.universe(), minimal).expect("same universe")
}
