//! Generating families of monotone families, the cells `D_R(E)`, and the
//! boundary surgery that trades sets between the families of a
//! cross-intersecting tuple.
//!
//! For a monotone `F ⊆ binom([n], R)` a generating set is an inclusion-minimal
//! non-empty `E` with `⟨E⟩_R ⊆ F`; the generating family collects all of them
//! and its extent is the largest element any generator uses. When `F` is also
//! left-compressed, the cells `D_R(E) = {A : |A| ∈ R, A ∩ [max E] = E}` over
//! the generators partition `F`.

use std::collections::HashMap;

use serde::Serialize;

use crate::binomial::binom;
use crate::compress::{is_left_compressed, is_monotone, upset};
use crate::error::{Error, Result};
use crate::family::{top_two, FamilyTuple, SetFamily};
use crate::set::{ElementSet, RankSet, Subsets};

/// An antichain of generators together with the rank set they generate in.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct GeneratingFamily {
    generators: SetFamily,
    ranks: RankSet,
}

impl GeneratingFamily {
    pub fn new(generators: SetFamily, ranks: RankSet) -> Result<Self> {
        if let Some(big) = generators.iter().find(|g| g.len() > ranks.largest()) {
            return Err(Error::Rank {
                cardinality: big.len(),
                ranks: ranks.to_string(),
            });
        }
        let gens = generators.as_slice();
        for (i, a) in gens.iter().enumerate() {
            if a.is_empty() {
                return Err(Error::Parameter("generators must be non-empty".into()));
            }
            if let Some(b) = gens.iter().enumerate().find(|&(j, b)| j != i && a.is_subset(b)) {
                return Err(Error::Parameter(format!("generator {a} is contained in {}", b.1)));
            }
        }
        Ok(Self { generators, ranks })
    }

    pub fn generators(&self) -> &SetFamily {
        &self.generators
    }

    pub fn ranks(&self) -> &RankSet {
        &self.ranks
    }

    pub fn universe(&self) -> usize {
        self.generators.universe()
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn contains(&self, e: &ElementSet) -> bool {
        self.generators.contains(e)
    }

    /// `⟨G⟩_R`.
    pub fn upset(&self) -> SetFamily {
        upset(&self.generators, &self.ranks).expect("generators fit the rank set")
    }

    /// Generators of cardinality `u`.
    pub fn layer(&self, u: usize) -> &[ElementSet] {
        self.generators.layer_slice(u)
    }
}

/// `⟨{E}⟩_R ⊆ F`, checked by counting: each layer `r` of `F` must hold all
/// `C(n - |E|, r - |E|)` supersets of `E`.
fn generates_within(e: &ElementSet, family: &SetFamily, ranks: &RankSet) -> bool {
    let n = family.universe() as i64;
    let size = e.len() as i64;
    ranks.iter().filter(|&r| r >= e.len()).all(|r| {
        let present = family.layer_slice(r).iter().filter(|a| e.is_subset(a)).count();
        present as u128 == binom(n - size, r as i64 - size)
    })
}

fn require_monotone(family: &SetFamily, ranks: &RankSet) -> Result<()> {
    if !is_monotone(family, ranks)? {
        return Err(Error::NotMonotone);
    }
    Ok(())
}

/// Is `e` a generating set of the monotone family `family`?
pub fn is_generating(e: &ElementSet, family: &SetFamily, ranks: &RankSet) -> Result<bool> {
    require_monotone(family, ranks)?;
    if e.len() > ranks.largest() {
        return Err(Error::Rank {
            cardinality: e.len(),
            ranks: ranks.to_string(),
        });
    }
    if e.is_empty() || !generates_within(e, family, ranks) {
        return Ok(false);
    }
    // ⟨E'⟩ shrinks as E' grows, so checking the maximal proper subsets suffices
    Ok(e.len() == 1 || e.iter().all(|x| !generates_within(&e.without(x), family, ranks)))
}

/// All generating sets of a monotone family.
///
/// Every generator is a subset of a member, so a downward walk from the
/// members through sets that still generate inside `F` reaches all of them;
/// generation checks are memoised on the set's bits.
pub fn generating_family(family: &SetFamily, ranks: &RankSet) -> Result<GeneratingFamily> {
    require_monotone(family, ranks)?;
    let mut memo: HashMap<u64, bool> = HashMap::new();
    let check = |e: &ElementSet, memo: &mut HashMap<u64, bool>| -> bool {
        if e.is_empty() {
            return false;
        }
        *memo
            .entry(e.bits())
            .or_insert_with(|| generates_within(e, family, ranks))
    };
    let mut stack: Vec<ElementSet> = family.iter().copied().collect();
    let mut seen: HashMap<u64, ()> = HashMap::new();
    let mut generators = Vec::new();
    while let Some(e) = stack.pop() {
        if seen.insert(e.bits(), ()).is_some() {
            continue;
        }
        let mut minimal = true;
        for x in e.iter() {
            let smaller = e.without(x);
            if check(&smaller, &mut memo) {
                minimal = false;
                stack.push(smaller);
            }
        }
        if minimal {
            generators.push(e);
        }
    }
    let generators = SetFamily::new(family.universe(), generators)?;
    Ok(GeneratingFamily {
        generators,
        ranks: ranks.clone(),
    })
}

/// Largest element appearing in any generator.
pub fn extent(g: &GeneratingFamily) -> Result<usize> {
    g.generators
        .iter()
        .filter_map(ElementSet::largest)
        .max()
        .ok_or(Error::UndefinedExtent)
}

/// `D_R(E) = {A ∈ binom([n], R) : A ∩ [max E] = E}`.
pub fn cell(e: &ElementSet, ranks: &RankSet, n: usize) -> Result<SetFamily> {
    let top = e
        .largest()
        .ok_or_else(|| Error::Parameter("cells are defined for non-empty sets only".into()))?;
    if e.universe() != n {
        return Err(Error::Parameter(format!("set over [{}] but n = {n}", e.universe())));
    }
    ranks.check_within(n)?;
    let tail: Vec<usize> = (top + 1..=n).collect();
    let mut sets = Vec::new();
    for r in ranks.iter().filter(|&r| r >= e.len()) {
        for bits in Subsets::new(tail.clone(), Some(r - e.len())) {
            sets.push(ElementSet::from_bits(n, e.bits() | bits)?);
        }
    }
    SetFamily::new(n, sets)
}

/// Union of the cells of several sets.
pub fn cells_union<'a, I>(sets: I, ranks: &RankSet, n: usize) -> Result<SetFamily>
where
    I: IntoIterator<Item = &'a ElementSet>,
{
    let mut out = SetFamily::empty(n)?;
    for e in sets {
        out = out.union(&cell(e, ranks, n)?);
    }
    Ok(out)
}

/// One generator and its cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub generator: ElementSet,
    pub sets: SetFamily,
}

/// Splits a monotone, left-compressed family into the cells of its generators.
pub fn decompose(family: &SetFamily, ranks: &RankSet) -> Result<Vec<Cell>> {
    require_monotone(family, ranks)?;
    if !is_left_compressed(family) {
        return Err(Error::NotLeftCompressed);
    }
    let g = generating_family(family, ranks)?;
    g.generators
        .iter()
        .map(|e| {
            Ok(Cell {
                generator: *e,
                sets: cell(e, ranks, family.universe())?,
            })
        })
        .collect()
}

/// `Ḡ`: generators that contain `l`.
pub fn boundary_family(g: &GeneratingFamily, l: usize) -> GeneratingFamily {
    let sets = g.generators.iter().filter(|e| e.contains(l)).copied();
    GeneratingFamily {
        generators: SetFamily::new(g.universe(), sets).expect("same universe"),
        ranks: g.ranks.clone(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryLayerCount {
    pub u: usize,
    /// `|(Ḡ_i)_u|`
    pub left: usize,
    /// `|(Ḡ_j)_{l+1-u}|`
    pub right: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualityReport {
    pub holds: bool,
    /// Pairs meeting exactly in `{l}` without covering `[l]` with `l + 1` elements.
    pub violations: Vec<(ElementSet, ElementSet)>,
    pub layer_counts: Vec<BoundaryLayerCount>,
}

/// Checks that generators `E ∈ G_i`, `F ∈ G_j` with `E ∩ F = {l}` always
/// satisfy `E ∪ F = [l]` and `|E| + |F| = l + 1`, and tabulates the boundary
/// layer sizes that should pair up.
pub fn check_boundary_duality(gi: &GeneratingFamily, gj: &GeneratingFamily, l: usize) -> Result<DualityReport> {
    let n = gi.universe();
    if l == 0 || l > n {
        return Err(Error::Parameter(format!("l = {l} must lie in [1, {n}]")));
    }
    let only_l = ElementSet::new(n, [l])?;
    let prefix = ElementSet::prefix(n, l)?;
    let mut violations = Vec::new();
    for e in gi.generators.iter() {
        for f in gj.generators.iter() {
            if e.intersection(f) == only_l && (e.union(f) != prefix || e.len() + f.len() != l + 1) {
                violations.push((*e, *f));
            }
        }
    }
    let (bi, bj) = (boundary_family(gi, l), boundary_family(gj, l));
    let layer_counts = (1..=l)
        .map(|u| BoundaryLayerCount {
            u,
            left: bi.layer(u).len(),
            right: bj.layer(l + 1 - u).len(),
        })
        .collect();
    Ok(DualityReport {
        holds: violations.is_empty(),
        violations,
        layer_counts,
    })
}

/// Validated inputs shared by the two surgeries.
struct Surgery<'a> {
    tuple: &'a FamilyTuple,
    gamma: usize,
    u: usize,
    l: usize,
    boundaries: Vec<GeneratingFamily>,
}

impl<'a> Surgery<'a> {
    fn prepare(tuple: &'a FamilyTuple, gamma: usize, u: usize, l: usize) -> Result<Self> {
        let m = tuple.len();
        if gamma >= m {
            return Err(Error::Parameter(format!("family index {gamma} out of range for {m} families")));
        }
        if !(1 < u && u < l) {
            return Err(Error::Parameter(format!("need 1 < u < l, got u = {u}, l = {l}")));
        }
        let n = tuple.universe();
        let (k1, k2) = top_two(tuple.ranks());
        if n < k1 + k2 {
            return Err(Error::Precondition(format!("n = {n} < k1 + k2 = {}", k1 + k2)));
        }
        for (f, r) in tuple.families().iter().zip(tuple.ranks()) {
            require_monotone(f, r)?;
            if !is_left_compressed(f) {
                return Err(Error::NotLeftCompressed);
            }
        }
        if !tuple.is_cross_intersecting(1) {
            return Err(Error::Precondition("tuple is not cross-intersecting".into()));
        }
        let gens = tuple
            .families()
            .iter()
            .zip(tuple.ranks())
            .map(|(f, r)| generating_family(f, r))
            .collect::<Result<Vec<_>>>()?;
        let max_extent = gens.iter().filter_map(|g| extent(g).ok()).max().unwrap_or(0);
        if max_extent != l {
            return Err(Error::Precondition(format!("l = {l} but the largest extent is {max_extent}")));
        }
        let boundaries: Vec<_> = gens.iter().map(|g| boundary_family(g, l)).collect();
        if boundaries[gamma].layer(u).is_empty() {
            return Err(Error::Precondition(format!(
                "family {gamma} has no boundary generator of size {u}"
            )));
        }
        Ok(Self {
            tuple,
            gamma,
            u,
            l,
            boundaries,
        })
    }

    fn n(&self) -> usize {
        self.tuple.universe()
    }

    /// `(Ḡ_j)_v`
    fn boundary_layer(&self, j: usize, v: usize) -> &[ElementSet] {
        self.boundaries[j].layer(v)
    }

    /// `(Ḡ_j)_v'`: the boundary generators with `l` removed.
    fn trimmed(&self, j: usize, v: usize) -> Vec<ElementSet> {
        self.boundary_layer(j, v).iter().map(|e| e.without(self.l)).collect()
    }

    fn others(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.tuple.len()).filter(move |&j| j != self.gamma)
    }

    fn dual(&self) -> usize {
        self.l + 1 - self.u
    }

    fn rebuild(&self, families: Vec<SetFamily>) -> Result<FamilyTuple> {
        FamilyTuple::new(self.n(), self.tuple.ranks().to_vec(), families)
    }

    /// `Σ_{a ∈ R_j} count · C(n - l, a - shift)` where `shift` may exceed `a`.
    fn weighted(&self, j: usize, count: usize, shift: i64) -> i128 {
        let free = (self.n() - self.l) as i64;
        self.tuple.ranks()[j]
            .iter()
            .map(|a| count as i128 * binom(free, a as i64 - shift) as i128)
            .sum()
    }
}

/// Grows `F_γ` by the cells of its trimmed boundary generators of size `u`
/// and removes the cells of the dual boundary layer `l + 1 - u` from every
/// other family.
pub fn tilde_transform(tuple: &FamilyTuple, gamma: usize, u: usize, l: usize) -> Result<FamilyTuple> {
    let s = Surgery::prepare(tuple, gamma, u, l)?;
    let n = s.n();
    let mut families = tuple.families().to_vec();
    let grown = cells_union(&s.trimmed(gamma, u), &tuple.ranks()[gamma], n)?;
    families[gamma] = families[gamma].union(&grown);
    for a in s.others() {
        let removed = cells_union(s.boundary_layer(a, s.dual()), &tuple.ranks()[a], n)?;
        families[a] = families[a].difference(&removed);
    }
    s.rebuild(families)
}

/// Mirror image of [`tilde_transform`]: shrinks `F_γ` and grows the others.
/// Requires `{1}` to be a generator of `F_γ`.
pub fn hat_transform(tuple: &FamilyTuple, gamma: usize, u: usize, l: usize) -> Result<FamilyTuple> {
    let s = Surgery::prepare(tuple, gamma, u, l)?;
    require_singleton_one(tuple, gamma)?;
    let n = s.n();
    let mut families = tuple.families().to_vec();
    let removed = cells_union(s.boundary_layer(gamma, u), &tuple.ranks()[gamma], n)?;
    families[gamma] = families[gamma].difference(&removed);
    for a in s.others() {
        let grown = cells_union(&s.trimmed(a, s.dual()), &tuple.ranks()[a], n)?;
        families[a] = families[a].union(&grown);
    }
    s.rebuild(families)
}

fn require_singleton_one(tuple: &FamilyTuple, gamma: usize) -> Result<()> {
    let n = tuple.universe();
    let g = generating_family(tuple.family(gamma), &tuple.ranks()[gamma])?;
    if !g.contains(&ElementSet::new(n, [1])?) {
        return Err(Error::Precondition(format!("{{1}} is not a generator of family {gamma}")));
    }
    Ok(())
}

/// Predicted change of `Σ|F_j|` under [`tilde_transform`]:
/// `Σ_{a∈R_γ} |(Ḡ_γ)_u| C(n-l, a-u+1) − Σ_{α≠γ} Σ_{b∈R_α} |(Ḡ_α)_{l+1-u}| C(n-l, b-(l+1-u))`.
pub fn tilde_size_delta(tuple: &FamilyTuple, gamma: usize, u: usize, l: usize) -> Result<i128> {
    let s = Surgery::prepare(tuple, gamma, u, l)?;
    let dual = s.dual();
    let gain = s.weighted(gamma, s.boundary_layer(gamma, u).len(), u as i64 - 1);
    let loss: i128 = s
        .others()
        .map(|a| s.weighted(a, s.boundary_layer(a, dual).len(), dual as i64))
        .sum();
    Ok(gain - loss)
}

/// Predicted change of `Σ|F_j|` under [`hat_transform`]:
/// `Σ_{α≠γ} Σ_{b∈R_α} |(Ḡ_α)_{l+1-u}| C(n-l, b-(l+1-u)+1) − Σ_{a∈R_γ} |(Ḡ_γ)_u| C(n-l, a-u)`.
pub fn hat_size_delta(tuple: &FamilyTuple, gamma: usize, u: usize, l: usize) -> Result<i128> {
    let s = Surgery::prepare(tuple, gamma, u, l)?;
    require_singleton_one(tuple, gamma)?;
    let dual = s.dual();
    let gain: i128 = s
        .others()
        .map(|a| s.weighted(a, s.boundary_layer(a, dual).len(), dual as i64 - 1))
        .sum();
    let loss = s.weighted(gamma, s.boundary_layer(gamma, u).len(), u as i64);
    Ok(gain - loss)
}
