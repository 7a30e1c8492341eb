//! Ideals of finite rings as explicit element sets, the full ideal lattice,
//! and the prime / primary / quasi-primary classifiers.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::ring::{FiniteRing, RingHom};

/// Largest ideal lattice enumerated unless a caller raises it.
pub const DEFAULT_IDEAL_CAP: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdealError {
    #[error("ideal lattice has more than {cap} members")]
    IdealCountCapExceeded { cap: usize },
    #[error("ideals belong to different rings")]
    MixedRings,
    #[error("the unit ideal has no minimal primes")]
    ImproperIdeal,
    #[error("element set is not an ideal (witness {0})")]
    NotAnIdeal(usize),
    #[error("ideal is not in the lattice")]
    NotInLattice,
}

/// An ideal stored as its element set, with a lazily filled radical.
#[derive(Clone)]
pub struct Ideal {
    ring: Arc<FiniteRing>,
    members: FixedBitSet,
    radical: OnceLock<FixedBitSet>,
}

impl PartialEq for Ideal {
    fn eq(&self, other: &Self) -> bool {
        self.ring.id() == other.ring.id() && self.members == other.members
    }
}

impl Eq for Ideal {}

impl Hash for Ideal {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ring.id().hash(state);
        self.members.hash(state);
    }
}

impl fmt::Debug for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_elements(&self.elements()))
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_elements(&self.elements()))
    }
}

/// `{0,4,8}` style rendering used in every text and DOT output.
pub fn format_elements(elements: &[usize]) -> String {
    let parts: Vec<String> = elements.iter().map(|e| e.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

fn additive_closure(ring: &FiniteRing, gens: impl IntoIterator<Item = usize>) -> FixedBitSet {
    let gens: Vec<usize> = {
        let mut seen = FixedBitSet::with_capacity(ring.order());
        gens.into_iter()
            .filter(|&g| g != 0 && !seen.put(g))
            .collect()
    };
    let mut members = FixedBitSet::with_capacity(ring.order());
    members.insert(0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for &g in &gens {
            let y = ring.add(x, g);
            if !members.put(y) {
                queue.push_back(y);
            }
        }
    }
    members
}

impl Ideal {
    pub(crate) fn from_members_unchecked(ring: Arc<FiniteRing>, members: FixedBitSet) -> Self {
        Ideal {
            ring,
            members,
            radical: OnceLock::new(),
        }
    }

    /// Wraps an element set after checking the ideal axioms.
    pub fn from_elements(ring: &Arc<FiniteRing>, elements: &[usize]) -> Result<Self, IdealError> {
        let mut members = FixedBitSet::with_capacity(ring.order());
        for &e in elements {
            if e >= ring.order() {
                return Err(IdealError::NotAnIdeal(e));
            }
            members.insert(e);
        }
        if !members.contains(0) {
            return Err(IdealError::NotAnIdeal(0));
        }
        for a in members.ones() {
            for b in members.ones() {
                if !members.contains(ring.add(a, b)) {
                    return Err(IdealError::NotAnIdeal(ring.add(a, b)));
                }
            }
            for r in ring.elements() {
                if !members.contains(ring.mul(r, a)) {
                    return Err(IdealError::NotAnIdeal(ring.mul(r, a)));
                }
            }
        }
        Ok(Self::from_members_unchecked(ring.clone(), members))
    }

    pub fn zero(ring: &Arc<FiniteRing>) -> Self {
        generate(ring, &[])
    }

    pub fn unit(ring: &Arc<FiniteRing>) -> Self {
        let mut members = FixedBitSet::with_capacity(ring.order());
        members.insert_range(..);
        Self::from_members_unchecked(ring.clone(), members)
    }

    pub fn ring(&self) -> &Arc<FiniteRing> {
        &self.ring
    }

    pub fn members(&self) -> &FixedBitSet {
        &self.members
    }

    pub fn elements(&self) -> Vec<usize> {
        self.members.ones().collect()
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.contains(x)
    }

    pub fn is_subset(&self, other: &Ideal) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn is_proper(&self) -> bool {
        !self.members.contains(self.ring.one())
    }

    fn same_ring(&self, other: &Ideal) -> Result<(), IdealError> {
        if self.ring.id() == other.ring.id() {
            Ok(())
        } else {
            Err(IdealError::MixedRings)
        }
    }

    pub fn sum(&self, other: &Ideal) -> Result<Ideal, IdealError> {
        self.same_ring(other)?;
        if other.is_subset(self) {
            return Ok(self.clone());
        }
        if self.is_subset(other) {
            return Ok(other.clone());
        }
        let mut members = FixedBitSet::with_capacity(self.ring.order());
        for a in self.members.ones() {
            for b in other.members.ones() {
                members.insert(self.ring.add(a, b));
            }
        }
        Ok(Self::from_members_unchecked(self.ring.clone(), members))
    }

    pub fn product(&self, other: &Ideal) -> Result<Ideal, IdealError> {
        self.same_ring(other)?;
        let ring = &self.ring;
        let mut products = FixedBitSet::with_capacity(ring.order());
        for a in self.members.ones() {
            for b in other.members.ones() {
                products.insert(ring.mul(a, b));
            }
        }
        // {ab} is already closed under multiplication by R, so its additive
        // closure is the product ideal
        let members = additive_closure(ring, products.ones());
        Ok(Self::from_members_unchecked(ring.clone(), members))
    }

    pub fn intersect(&self, other: &Ideal) -> Result<Ideal, IdealError> {
        self.same_ring(other)?;
        let mut members = self.members.clone();
        members.intersect_with(&other.members);
        Ok(Self::from_members_unchecked(self.ring.clone(), members))
    }

    fn radical_members(&self) -> &FixedBitSet {
        self.radical.get_or_init(|| {
            let ring = &self.ring;
            let mut rad = FixedBitSet::with_capacity(ring.order());
            let mut seen = FixedBitSet::with_capacity(ring.order());
            for x in ring.elements() {
                seen.clear();
                let mut p = x;
                // walk the power sequence until it lands in I or cycles
                loop {
                    if self.members.contains(p) {
                        rad.insert(x);
                        break;
                    }
                    if seen.put(p) {
                        break;
                    }
                    p = ring.mul(p, x);
                }
            }
            rad
        })
    }

    pub fn radical(&self) -> Ideal {
        let rad = self.radical_members().clone();
        let ideal = Self::from_members_unchecked(self.ring.clone(), rad.clone());
        // radical of a radical is itself
        let _ = ideal.radical.set(rad);
        ideal
    }

    pub fn is_prime(&self) -> bool {
        if !self.is_proper() {
            return false;
        }
        let outside: Vec<usize> = self.members.zeroes().collect();
        for (i, &a) in outside.iter().enumerate() {
            for &b in &outside[i..] {
                if self.members.contains(self.ring.mul(a, b)) {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_primary(&self) -> bool {
        if !self.is_proper() {
            return false;
        }
        let rad = self.radical_members();
        for a in self.members.zeroes() {
            for b in rad.zeroes() {
                if self.members.contains(self.ring.mul(a, b)) {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_quasi_primary(&self) -> bool {
        self.is_proper() && self.radical().is_prime()
    }

    /// Extension along a hom: the ideal of the target generated by the image.
    pub fn extend(&self, hom: &RingHom) -> Ideal {
        let image: Vec<usize> = self.members.ones().map(|x| hom.apply(x)).collect();
        generate(hom.target(), &image)
    }

    /// `R/I` with the least element of each coset as its representative, and
    /// the canonical surjection.
    pub fn quotient_map(&self) -> (Arc<FiniteRing>, RingHom) {
        let ring = &self.ring;
        let n = ring.order();
        let mut class = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for x in ring.elements() {
            if class[x] != usize::MAX {
                continue;
            }
            let id = reps.len();
            reps.push(x);
            for i in self.members.ones() {
                class[ring.add(x, i)] = id;
            }
        }
        let m = reps.len();
        let mut add = Vec::with_capacity(m * m);
        let mut mul = Vec::with_capacity(m * m);
        for &a in &reps {
            for &b in &reps {
                add.push(class[ring.add(a, b)] as u32);
                mul.push(class[ring.mul(a, b)] as u32);
            }
        }
        let label = format!("{}/{}", ring.label(), self);
        let quotient = Arc::new(FiniteRing::from_tables(
            m,
            add,
            mul,
            class[ring.one()],
            label,
        ));
        let hom = RingHom::new_unchecked(ring.clone(), quotient.clone(), class);
        (quotient, hom)
    }
}

/// Smallest ideal containing `gens`.
pub fn generate(ring: &Arc<FiniteRing>, gens: &[usize]) -> Ideal {
    let mut multiples = FixedBitSet::with_capacity(ring.order());
    for &g in gens {
        for r in ring.elements() {
            multiples.insert(ring.mul(r, g));
        }
    }
    let members = additive_closure(ring, multiples.ones());
    Ideal::from_members_unchecked(ring.clone(), members)
}

/// `{r : φ(r) ∈ J}`.
pub fn preimage_ideal(hom: &RingHom, target_ideal: &Ideal) -> Ideal {
    let source = hom.source();
    let mut members = FixedBitSet::with_capacity(source.order());
    for r in source.elements() {
        if target_ideal.contains(hom.apply(r)) {
            members.insert(r);
        }
    }
    Ideal::from_members_unchecked(source.clone(), members)
}

pub fn quotient_map(ideal: &Ideal) -> (Arc<FiniteRing>, RingHom) {
    ideal.quotient_map()
}

/// Every ideal of a finite ring, in canonical order (lexicographic on the
/// ascending element lists), with containment and classification tables.
pub struct IdealLattice {
    ring: Arc<FiniteRing>,
    ideals: Vec<Ideal>,
    index: HashMap<FixedBitSet, usize>,
    /// `subsets[i]` has bit `j` set iff ideal `j` is contained in ideal `i`.
    subsets: Vec<FixedBitSet>,
    radical: Vec<usize>,
    prime: Vec<bool>,
    primary: Vec<bool>,
    quasi_primary: Vec<bool>,
}

impl fmt::Debug for IdealLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IdealLattice")
            .field("ring", &self.ring.label())
            .field("ideals", &self.ideals)
            .finish()
    }
}

pub fn all_ideals(ring: &Arc<FiniteRing>) -> Result<IdealLattice, IdealError> {
    all_ideals_with_cap(ring, DEFAULT_IDEAL_CAP)
}

/// Closes the principal ideals under pairwise sums. Every ideal of a finite
/// ring is a finite sum of principal ideals, so the fixpoint is complete.
pub fn all_ideals_with_cap(ring: &Arc<FiniteRing>, cap: usize) -> Result<IdealLattice, IdealError> {
    let mut principal: Vec<Ideal> = Vec::new();
    let mut found: HashMap<FixedBitSet, Ideal> = HashMap::new();
    for a in ring.elements() {
        let ideal = generate(ring, &[a]);
        if !found.contains_key(ideal.members()) {
            found.insert(ideal.members().clone(), ideal.clone());
            principal.push(ideal);
        }
    }
    if found.len() > cap {
        return Err(IdealError::IdealCountCapExceeded { cap });
    }
    let mut queue: VecDeque<Ideal> = principal.iter().cloned().collect();
    while let Some(ideal) = queue.pop_front() {
        for p in &principal {
            let s = ideal.sum(p).expect("same ring");
            if !found.contains_key(s.members()) {
                found.insert(s.members().clone(), s.clone());
                if found.len() > cap {
                    return Err(IdealError::IdealCountCapExceeded { cap });
                }
                queue.push_back(s);
            }
        }
    }
    let mut ideals: Vec<Ideal> = found.into_values().collect();
    ideals.sort_by_cached_key(|i| i.elements());
    Ok(IdealLattice::from_sorted(ring.clone(), ideals))
}

impl IdealLattice {
    fn from_sorted(ring: Arc<FiniteRing>, ideals: Vec<Ideal>) -> Self {
        let index: HashMap<FixedBitSet, usize> = ideals
            .iter()
            .enumerate()
            .map(|(i, ideal)| (ideal.members().clone(), i))
            .collect();
        let k = ideals.len();
        let subsets = ideals
            .iter()
            .map(|big| {
                let mut row = FixedBitSet::with_capacity(k);
                for (j, small) in ideals.iter().enumerate() {
                    if small.is_subset(big) {
                        row.insert(j);
                    }
                }
                row
            })
            .collect();
        let radical = ideals
            .iter()
            .map(|i| index[i.radical_members()])
            .collect::<Vec<_>>();
        let prime: Vec<bool> = ideals.iter().map(Ideal::is_prime).collect();
        let primary = ideals.iter().map(Ideal::is_primary).collect();
        let quasi_primary = ideals
            .iter()
            .enumerate()
            .map(|(i, ideal)| ideal.is_proper() && prime[radical[i]])
            .collect();
        IdealLattice {
            ring,
            ideals,
            index,
            subsets,
            radical,
            prime,
            primary,
            quasi_primary,
        }
    }

    pub fn ring(&self) -> &Arc<FiniteRing> {
        &self.ring
    }

    pub fn ideals(&self) -> &[Ideal] {
        &self.ideals
    }

    pub fn len(&self) -> usize {
        self.ideals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ideals.is_empty()
    }

    pub fn get(&self, i: usize) -> &Ideal {
        &self.ideals[i]
    }

    pub fn index_of(&self, ideal: &Ideal) -> Option<usize> {
        if ideal.ring().id() != self.ring.id() {
            return None;
        }
        self.index.get(ideal.members()).copied()
    }

    pub fn index_of_elements(&self, elements: &[usize]) -> Result<usize, IdealError> {
        let ideal = Ideal::from_elements(&self.ring, elements)?;
        self.index_of(&ideal).ok_or(IdealError::NotInLattice)
    }

    /// Lattice index of the ideal generated by `gens`.
    pub fn generated(&self, gens: &[usize]) -> usize {
        let ideal = generate(&self.ring, gens);
        self.index[ideal.members()]
    }

    pub fn zero_ideal(&self) -> usize {
        0
    }

    pub fn unit_ideal(&self) -> usize {
        self.index[Ideal::unit(&self.ring).members()]
    }

    /// Whether ideal `i` is contained in ideal `j`.
    pub fn is_subset(&self, i: usize, j: usize) -> bool {
        self.subsets[j].contains(i)
    }

    pub fn radical(&self, i: usize) -> usize {
        self.radical[i]
    }

    pub fn nilradical(&self) -> usize {
        self.radical[self.zero_ideal()]
    }

    pub fn is_prime(&self, i: usize) -> bool {
        self.prime[i]
    }

    pub fn is_primary(&self, i: usize) -> bool {
        self.primary[i]
    }

    pub fn is_quasi_primary(&self, i: usize) -> bool {
        self.quasi_primary[i]
    }

    pub fn is_proper(&self, i: usize) -> bool {
        self.ideals[i].is_proper()
    }

    pub fn primes(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.prime[i]).collect()
    }

    pub fn sum(&self, i: usize, j: usize) -> usize {
        self.index[self.ideals[i]
            .sum(&self.ideals[j])
            .expect("same ring")
            .members()]
    }

    pub fn product(&self, i: usize, j: usize) -> usize {
        self.index[self.ideals[i]
            .product(&self.ideals[j])
            .expect("same ring")
            .members()]
    }

    pub fn intersect(&self, i: usize, j: usize) -> usize {
        self.index[self.ideals[i]
            .intersect(&self.ideals[j])
            .expect("same ring")
            .members()]
    }

    /// Minimal primes containing ideal `i`, in lattice order.
    pub fn minimal_primes_over(&self, i: usize) -> Result<Vec<usize>, IdealError> {
        if !self.is_proper(i) {
            return Err(IdealError::ImproperIdeal);
        }
        let over: Vec<usize> = self
            .primes()
            .into_iter()
            .filter(|&p| self.is_subset(i, p))
            .collect();
        Ok(over
            .iter()
            .copied()
            .filter(|&p| !over.iter().any(|&q| q != p && self.is_subset(q, p)))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{build_hom, build_ring, RingSpec};

    fn z(n: usize) -> Arc<FiniteRing> {
        build_ring(&RingSpec::zmod(n)).unwrap()
    }

    fn els(ideal: &Ideal) -> Vec<usize> {
        ideal.elements()
    }

    #[test]
    fn generate_examples() {
        let r = z(12);
        assert_eq!(els(&generate(&r, &[4])), vec![0, 4, 8]);
        assert_eq!(els(&generate(&r, &[])), vec![0]);
        assert_eq!(els(&generate(&r, &[4, 6])), vec![0, 2, 4, 6, 8, 10]);
    }

    #[test]
    fn z12_has_six_ideals() {
        let r = z(12);
        let lat = all_ideals(&r).unwrap();
        let lists: Vec<Vec<usize>> = lat.ideals().iter().map(els).collect();
        assert_eq!(
            lists,
            vec![
                vec![0],
                (0..12).collect(),
                vec![0, 2, 4, 6, 8, 10],
                vec![0, 3, 6, 9],
                vec![0, 4, 8],
                vec![0, 6],
            ]
        );
    }

    #[test]
    fn small_lattice_sizes() {
        assert_eq!(all_ideals(&z(7)).unwrap().len(), 2);
        let v4 = build_ring(&RingSpec::product(vec![
            RingSpec::zmod(2),
            RingSpec::zmod(2),
        ]))
        .unwrap();
        assert_eq!(all_ideals(&v4).unwrap().len(), 4);
        assert_eq!(all_ideals(&z(1)).unwrap().len(), 1);
    }

    #[test]
    fn ideal_cap_errors() {
        let spec = RingSpec::product(vec![RingSpec::zmod(2); 5]);
        let r = build_ring(&spec).unwrap();
        assert_eq!(
            all_ideals_with_cap(&r, 16).unwrap_err(),
            IdealError::IdealCountCapExceeded { cap: 16 }
        );
        assert_eq!(all_ideals_with_cap(&r, 32).unwrap().len(), 32);
    }

    #[test]
    fn arithmetic_in_z12() {
        let r = z(12);
        let i4 = generate(&r, &[4]);
        let i2 = generate(&r, &[2]);
        let i6 = generate(&r, &[6]);
        assert_eq!(els(&i4.product(&i2).unwrap()), vec![0, 4, 8]);
        assert_eq!(i4.sum(&Ideal::zero(&r)).unwrap(), i4);
        assert_eq!(els(&i4.intersect(&i6).unwrap()), vec![0]);
        let other = generate(&z(12), &[4]);
        assert_eq!(i4.sum(&other).unwrap_err(), IdealError::MixedRings);
    }

    #[test]
    fn radicals_in_z12() {
        let r = z(12);
        assert_eq!(els(&generate(&r, &[4]).radical()), vec![0, 2, 4, 6, 8, 10]);
        assert_eq!(els(&Ideal::zero(&r).radical()), vec![0, 6]);
        assert_eq!(Ideal::unit(&r).radical(), Ideal::unit(&r));
    }

    #[test]
    fn classifiers_in_z12() {
        let r = z(12);
        let i4 = generate(&r, &[4]);
        assert!(!i4.is_prime() && i4.is_primary() && i4.is_quasi_primary());
        let i6 = generate(&r, &[6]);
        assert!(!i6.is_quasi_primary() && !i6.is_primary());
        let unit = Ideal::unit(&r);
        assert!(!unit.is_prime() && !unit.is_primary() && !unit.is_quasi_primary());
        assert!(generate(&r, &[3]).is_prime());
    }

    #[test]
    fn zero_ring_has_no_proper_ideals() {
        let r = z(1);
        let zero = Ideal::zero(&r);
        assert!(!zero.is_proper());
        assert!(!zero.is_quasi_primary());
    }

    #[test]
    fn minimal_primes_in_z12() {
        let r = z(12);
        let lat = all_ideals(&r).unwrap();
        let names = |v: Vec<usize>| v.into_iter().map(|i| els(lat.get(i))).collect::<Vec<_>>();
        assert_eq!(
            names(lat.minimal_primes_over(0).unwrap()),
            vec![vec![0, 2, 4, 6, 8, 10], vec![0, 3, 6, 9]]
        );
        let i4 = lat.generated(&[4]);
        assert_eq!(
            names(lat.minimal_primes_over(i4).unwrap()),
            vec![vec![0, 2, 4, 6, 8, 10]]
        );
        assert_eq!(
            lat.minimal_primes_over(lat.unit_ideal()),
            Err(IdealError::ImproperIdeal)
        );
    }

    #[test]
    fn preimages_along_reduction() {
        let r12 = z(12);
        let r4 = z(4);
        let hom = build_hom(&r12, &r4, (0..12).map(|x| x % 4).collect()).unwrap();
        assert_eq!(
            els(&preimage_ideal(&hom, &generate(&r4, &[2]))),
            vec![0, 2, 4, 6, 8, 10]
        );
        assert_eq!(els(&preimage_ideal(&hom, &Ideal::zero(&r4))), vec![0, 4, 8]);
        let id = RingHom::identity(&r12);
        let j = generate(&r12, &[3]);
        assert_eq!(preimage_ideal(&id, &j), j);
    }

    #[test]
    fn quotient_by_four_is_z4() {
        let r = z(12);
        let (q, hom) = generate(&r, &[4]).quotient_map();
        assert_eq!(q.order(), 4);
        assert_eq!(hom.kernel(), vec![0, 4, 8]);
        q.verify_axioms().unwrap();
        assert_eq!(q.characteristic(), 4);
        let (same, hom0) = Ideal::zero(&r).quotient_map();
        assert_eq!(same.order(), 12);
        assert!(hom0.is_bijective());
    }

    #[test]
    fn from_elements_rejects_non_ideals() {
        let r = z(12);
        assert!(Ideal::from_elements(&r, &[0, 4]).is_err());
        assert!(Ideal::from_elements(&r, &[4, 8]).is_err());
        assert!(Ideal::from_elements(&r, &[0, 4, 8]).is_ok());
    }
}
