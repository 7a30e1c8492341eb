//! Brute-force oracles that use nothing from the library beyond the raw
//! addition and multiplication tables of a ring.

#![allow(dead_code)]

use std::collections::BTreeSet;

use qprim::FiniteRing;

pub type Set = BTreeSet<usize>;

/// Every subset containing 0 that is closed under `+` and under
/// multiplication by arbitrary elements.
pub fn subset_ideals(r: &FiniteRing) -> Vec<Vec<usize>> {
    let n = r.order();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << (n - 1)) {
        let has = |x: usize| x == 0 || mask >> (x - 1) & 1 == 1;
        let members: Vec<usize> = (0..n).filter(|&x| has(x)).collect();
        let ok = members.iter().all(|&x| {
            members.iter().all(|&y| has(r.add(x, y))) && (0..n).all(|s| has(r.mul(s, x)))
        });
        if ok {
            out.push(members);
        }
    }
    out.sort();
    out
}

pub fn power(r: &FiniteRing, x: usize, k: usize) -> usize {
    (0..k).fold(r.one(), |acc, _| r.mul(acc, x))
}

/// `{x : x^k ∈ I for some 1 ≤ k ≤ |R|}`.
pub fn radical(r: &FiniteRing, ideal: &Set) -> Set {
    (0..r.order())
        .filter(|&x| (1..=r.order()).any(|k| ideal.contains(&power(r, x, k))))
        .collect()
}

pub fn is_prime(r: &FiniteRing, ideal: &Set) -> bool {
    ideal.len() < r.order()
        && (0..r.order()).all(|a| {
            (0..r.order())
                .all(|b| !ideal.contains(&r.mul(a, b)) || ideal.contains(&a) || ideal.contains(&b))
        })
}

pub fn is_quasi_primary(r: &FiniteRing, ideal: &Set) -> bool {
    ideal.len() < r.order() && is_prime(r, &radical(r, ideal))
}

pub fn is_unit(r: &FiniteRing, x: usize) -> bool {
    (0..r.order()).any(|y| r.mul(x, y) == r.one())
}

/// A nonzero ring is local iff its non-units are closed under addition.
pub fn is_local(r: &FiniteRing) -> bool {
    let non_units: Vec<usize> = (0..r.order()).filter(|&x| !is_unit(r, x)).collect();
    r.order() > 1
        && non_units
            .iter()
            .all(|&x| non_units.iter().all(|&y| !is_unit(r, r.add(x, y))))
}

/// Quasi-primary points of `r` and the distinct sets `V(I) = {Q : I ⊆ √Q}`,
/// each as a set of point positions.
pub fn qprim_and_closed_sets(r: &FiniteRing) -> (Vec<Set>, BTreeSet<Vec<usize>>) {
    let ideals: Vec<Set> = subset_ideals(r)
        .into_iter()
        .map(|i| i.into_iter().collect())
        .collect();
    let points: Vec<Set> = ideals
        .iter()
        .filter(|i| is_quasi_primary(r, i))
        .cloned()
        .collect();
    let radicals: Vec<Set> = points.iter().map(|q| radical(r, q)).collect();
    let closed = ideals
        .iter()
        .map(|i| {
            (0..points.len())
                .filter(|&p| i.is_subset(&radicals[p]))
                .collect()
        })
        .collect();
    (points, closed)
}

/// Size of `R / {r : sr = 0 for some s ∈ S}` for the multiplicative closure `S` of `gens`.
pub fn localization_order(r: &FiniteRing, gens: &[usize]) -> usize {
    let mut s: Set = [r.one()].into_iter().collect();
    loop {
        let next: Set = s
            .iter()
            .flat_map(|&x| gens.iter().map(move |&g| (x, g)))
            .map(|(x, g)| r.mul(x, g))
            .collect();
        let before = s.len();
        s.extend(next);
        if s.len() == before {
            break;
        }
    }
    let kernel = (0..r.order())
        .filter(|&x| s.iter().any(|&t| r.mul(t, x) == 0))
        .count();
    r.order() / kernel
}
