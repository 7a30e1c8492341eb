//! Localizations of finite rings and the sheaf `U_a ↦ R_a` on a spectrum.
//!
//! For a finite ring, `R_S` is realized as `R / {r : sr = 0 for some s ∈ S}`:
//! every element of `S` becomes a non-zero-divisor in that quotient, and a
//! non-zero-divisor of a finite ring is a unit. Sections over an arbitrary
//! open are compatible tuples over the canonical basic opens it contains.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex};

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::ideal::{preimage_ideal, Ideal};
use crate::iso::ring_isomorphic;
use crate::ring::{FiniteRing, RingError, RingHom};
use crate::topology::{Spectrum, SpectrumKind, TopologyError};

/// Largest number of candidate opens whose subsets are enumerated as covers.
pub const DEFAULT_COVER_CANDIDATES_LOG2: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SheafError {
    #[error("ideal is not prime")]
    NotPrime,
    #[error("open set is not contained in the larger one")]
    NotContained,
    #[error("isomorphism search on order {order} exceeds the cap {cap}")]
    SearchCapExceeded { order: usize, cap: usize },
    #[error("homomorphism does not factor through the localization")]
    NoFactorization,
    #[error("internal consistency check failed: {0}")]
    Inconsistent(&'static str),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

/// `{1, s, s', ss', …}`: the multiplicative closure of `gens` together with 1.
pub fn multiplicative_closure(ring: &FiniteRing, gens: &[usize]) -> FixedBitSet {
    let mut set = FixedBitSet::with_capacity(ring.order());
    set.insert(ring.one());
    let mut frontier = vec![ring.one()];
    while let Some(x) = frontier.pop() {
        for &g in gens {
            let y = ring.mul(x, g);
            if !set.put(y) {
                frontier.push(y);
            }
        }
    }
    set
}

/// `R_S` as a quotient of `R`, with the canonical map.
#[derive(Debug, Clone)]
pub struct LocalizedRing {
    source: Arc<FiniteRing>,
    mult_set: FixedBitSet,
    ring: Arc<FiniteRing>,
    hom: RingHom,
}

impl LocalizedRing {
    pub fn source(&self) -> &Arc<FiniteRing> {
        &self.source
    }

    pub fn mult_set(&self) -> &FixedBitSet {
        &self.mult_set
    }

    pub fn ring(&self) -> &Arc<FiniteRing> {
        &self.ring
    }

    pub fn hom(&self) -> &RingHom {
        &self.hom
    }

    pub fn order(&self) -> usize {
        self.ring.order()
    }

    pub fn kernel(&self) -> Vec<usize> {
        self.hom.kernel()
    }

    /// Image of `s` in the localization, inverted.
    pub fn inverse_of(&self, s: usize) -> Option<usize> {
        self.ring.inverse(self.hom.apply(s))
    }

    /// The unique `ψ'` with `ψ = ψ' ∘ canonical`, for `ψ` sending the
    /// multiplicative set to units.
    pub fn factor_through(&self, psi: &RingHom) -> Result<RingHom, SheafError> {
        if psi.source().id() != self.source.id() {
            return Err(SheafError::Ring(RingError::MixedRings));
        }
        let target = psi.target();
        if self.mult_set.ones().any(|s| !target.is_unit(psi.apply(s))) {
            return Err(SheafError::NoFactorization);
        }
        let mut map = vec![usize::MAX; self.ring.order()];
        for r in self.source.elements() {
            let c = self.hom.apply(r);
            if map[c] == usize::MAX {
                map[c] = psi.apply(r);
            } else if map[c] != psi.apply(r) {
                return Err(SheafError::NoFactorization);
            }
        }
        // the canonical map is onto, so a factorization is unique when it exists
        Ok(RingHom::new(self.ring.clone(), target.clone(), map)?)
    }
}

pub fn localize_multset(ring: &Arc<FiniteRing>, s: &[usize]) -> Result<LocalizedRing, SheafError> {
    let mult_set = multiplicative_closure(ring, s);
    let mut kernel = FixedBitSet::with_capacity(ring.order());
    for r in ring.elements() {
        if mult_set.ones().any(|s| ring.mul(s, r) == 0) {
            kernel.insert(r);
        }
    }
    let (quotient, hom) = Ideal::from_members_unchecked(ring.clone(), kernel).quotient_map();
    let names: Vec<String> = s.iter().map(|x| x.to_string()).collect();
    let quotient = Arc::new((*quotient).clone().with_label(format!(
        "{}[1/{{{}}}]",
        ring.label(),
        names.join(",")
    )));
    let hom = RingHom::new_unchecked(ring.clone(), quotient.clone(), hom.map().to_vec());
    if mult_set.ones().any(|x| !quotient.is_unit(hom.apply(x))) {
        return Err(SheafError::Inconsistent("multiplicative set not inverted"));
    }
    Ok(LocalizedRing {
        source: ring.clone(),
        mult_set,
        ring: quotient,
        hom,
    })
}

/// `R_a` realized twice: as a kernel quotient and as the ideal `eR` with
/// identity `e`, where `e` is the idempotent power of `a`.
#[derive(Debug, Clone)]
pub struct ElementLocalization {
    pub localized: LocalizedRing,
    pub idempotent: usize,
    pub exponent: u64,
    /// Elements of `eR` in ascending order; carrier index `i` is `carrier_elements[i]`.
    pub carrier_elements: Vec<usize>,
    pub carrier: Arc<FiniteRing>,
    /// `r ↦ re`.
    pub carrier_map: RingHom,
    /// Isomorphism from the kernel quotient to the carrier commuting with
    /// both canonical maps.
    pub comparison: RingHom,
}

pub fn localize_element(
    ring: &Arc<FiniteRing>,
    a: usize,
) -> Result<ElementLocalization, SheafError> {
    let localized = localize_multset(ring, &[a])?;
    let (e, exponent) = ring.idempotent_power(a);
    let mut carrier_elements: Vec<usize> = ring.elements().map(|r| ring.mul(e, r)).collect();
    carrier_elements.sort_unstable();
    carrier_elements.dedup();
    let mut pos = vec![usize::MAX; ring.order()];
    for (i, &x) in carrier_elements.iter().enumerate() {
        pos[x] = i;
    }
    let m = carrier_elements.len();
    let mut add = Vec::with_capacity(m * m);
    let mut mul = Vec::with_capacity(m * m);
    for &x in &carrier_elements {
        for &y in &carrier_elements {
            add.push(pos[ring.add(x, y)] as u32);
            mul.push(pos[ring.mul(x, y)] as u32);
        }
    }
    let carrier = Arc::new(FiniteRing::from_tables(
        m,
        add,
        mul,
        pos[e],
        format!("{}*{}", e, ring.label()),
    ));
    let carrier_map = RingHom::new(
        ring.clone(),
        carrier.clone(),
        ring.elements().map(|r| pos[ring.mul(r, e)]).collect(),
    )?;
    let mut map = vec![usize::MAX; localized.order()];
    for r in ring.elements() {
        let c = localized.hom.apply(r);
        let img = carrier_map.apply(r);
        if map[c] == usize::MAX {
            map[c] = img;
        } else if map[c] != img {
            return Err(SheafError::Inconsistent(
                "kernel and idempotent realizations disagree",
            ));
        }
    }
    let comparison = RingHom::new(localized.ring.clone(), carrier.clone(), map)?;
    if !comparison.is_bijective() {
        return Err(SheafError::Inconsistent(
            "kernel and idempotent realizations disagree",
        ));
    }
    Ok(ElementLocalization {
        localized,
        idempotent: e,
        exponent,
        carrier_elements,
        carrier,
        carrier_map,
        comparison,
    })
}

/// `R_P = (R \ P)⁻¹ R`, checked to be local.
pub fn localize_prime(ring: &Arc<FiniteRing>, prime: &Ideal) -> Result<LocalizedRing, SheafError> {
    if !prime.is_prime() {
        return Err(SheafError::NotPrime);
    }
    let complement: Vec<usize> = prime.members().zeroes().collect();
    let loc = localize_multset(ring, &complement)?;
    if !is_local(&loc.ring) {
        return Err(SheafError::Inconsistent(
            "localization at a prime is not local",
        ));
    }
    Ok(loc)
}

/// A nonzero finite ring is local exactly when its non-units form an ideal.
pub fn is_local(ring: &FiniteRing) -> bool {
    if ring.is_zero_ring() {
        return false;
    }
    let non_units: Vec<usize> = ring.elements().filter(|&x| !ring.is_unit(x)).collect();
    non_units
        .iter()
        .all(|&x| non_units.iter().all(|&y| !ring.is_unit(ring.add(x, y))))
}

/// Outcome of comparing `QPrim(R_S)` with the subspace `U_S` of `QPrim(R)`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct LocalizationReport {
    pub localized_points: usize,
    pub subspace_points: usize,
    pub contractions_quasi_primary: bool,
    pub extensions_quasi_primary: bool,
    pub bijective: bool,
    pub continuous: bool,
    pub inverse_continuous: bool,
}

impl LocalizationReport {
    pub fn holds(&self) -> bool {
        self.contractions_quasi_primary
            && self.extensions_quasi_primary
            && self.bijective
            && self.continuous
            && self.inverse_continuous
    }
}

/// Contraction and extension of quasi-primary ideals along `R → R_S`, and
/// the homeomorphism `QPrim(R_S) ≅ U_S` they realize.
pub fn contraction_extension_checks(
    space: &Spectrum,
    s: &[usize],
) -> Result<LocalizationReport, SheafError> {
    let ring = space.ring();
    let loc = localize_multset(ring, s)?;
    let local_space = crate::topology::spectrum(&loc.ring, space.kind())?;
    let lattice = space.lattice();

    let mut u_s = space.empty_set();
    for p in 0..space.len() {
        if !space
            .point_radical(p)
            .members()
            .ones()
            .any(|x| loc.mult_set.contains(x))
        {
            u_s.insert(p);
        }
    }

    let mut contractions_quasi_primary = true;
    let mut contraction = Vec::with_capacity(local_space.len());
    for q in 0..local_space.len() {
        let pre = preimage_ideal(&loc.hom, local_space.point_ideal(q));
        if !pre.is_quasi_primary() {
            contractions_quasi_primary = false;
        }
        contraction.push(lattice.index_of(&pre).and_then(|i| space.point_of(i)));
    }

    let mut extensions_quasi_primary = true;
    let mut round_trip = true;
    for p in u_s.ones() {
        let ext = space.point_ideal(p).extend(&loc.hom);
        if !ext.is_quasi_primary() {
            extensions_quasi_primary = false;
        }
        let back = local_space
            .lattice()
            .index_of(&ext)
            .and_then(|i| local_space.point_of(i));
        if back.and_then(|q| contraction[q]) != Some(p) {
            round_trip = false;
        }
    }

    let image: HashSet<usize> = contraction.iter().flatten().copied().collect();
    let bijective = round_trip
        && contraction
            .iter()
            .all(|c| c.is_some_and(|p| u_s.contains(p)))
        && image.len() == local_space.len()
        && image.len() == u_s.count_ones(..);

    let mut continuous = bijective;
    let mut inverse_continuous = bijective;
    if bijective {
        let contraction: Vec<usize> = contraction.into_iter().flatten().collect();
        let traces: HashSet<Vec<usize>> = space
            .topology()
            .closed_sets()
            .iter()
            .map(|c| {
                let mut t = c.points.clone();
                t.intersect_with(&u_s);
                t.ones().collect()
            })
            .collect();
        let local_topo = local_space.topology();
        for trace in &traces {
            let mut pulled = local_space.empty_set();
            for (q, &p) in contraction.iter().enumerate() {
                if trace.contains(&p) {
                    pulled.insert(q);
                }
            }
            if !local_topo.is_closed(&pulled) {
                continuous = false;
            }
        }
        for c in local_topo.closed_sets() {
            let mut pushed: Vec<usize> = c.points.ones().map(|q| contraction[q]).collect();
            pushed.sort_unstable();
            if !traces.contains(&pushed) {
                inverse_continuous = false;
            }
        }
    }

    Ok(LocalizationReport {
        localized_points: local_space.len(),
        subspace_points: u_s.count_ones(..),
        contractions_quasi_primary,
        extensions_quasi_primary,
        bijective,
        continuous,
        inverse_continuous,
    })
}

/// One basic open `U_a` per distinct point set, with `a` the least element
/// giving that set.
#[derive(Debug, Clone)]
pub struct BasicRep {
    pub element: usize,
    pub open: FixedBitSet,
    pub local: LocalizedRing,
}

/// `F(U)` as a finite ring of compatible tuples.
#[derive(Debug)]
pub struct SectionRing {
    pub open: FixedBitSet,
    /// Representative indices (ascending) of the basic opens inside `open`.
    pub reps: Vec<usize>,
    /// Elements of the ring, as tuples over `reps`, in lexicographic order.
    pub tuples: Vec<Vec<usize>>,
    lookup: HashMap<Vec<usize>, usize>,
    pub ring: Arc<FiniteRing>,
}

impl SectionRing {
    pub fn index_of(&self, tuple: &[usize]) -> Option<usize> {
        self.lookup.get(tuple).copied()
    }

    pub fn order(&self) -> usize {
        self.tuples.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    pub open: FixedBitSet,
    pub reps: Vec<usize>,
    pub values: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct CoverCheck {
    pub identity: bool,
    pub gluing: bool,
    pub compatible_families: usize,
}

#[derive(Debug, Clone, Default)]
pub struct SheafAxiomReport {
    pub opens: usize,
    pub covers: usize,
    /// Opens whose candidate covers exceeded the enumeration cap.
    pub truncated: Vec<FixedBitSet>,
    pub failures: Vec<(FixedBitSet, Vec<FixedBitSet>, CoverCheck)>,
}

/// The assignment `U_a ↦ R_a` with restriction maps, on a spectrum.
pub struct Sheaf {
    space: Arc<Spectrum>,
    reps: Vec<BasicRep>,
    rep_of: Vec<usize>,
    /// `below[i]` has bit `j` iff `U_j ⊆ U_i`.
    below: Vec<FixedBitSet>,
    restrictions: HashMap<(usize, usize), Vec<usize>>,
    sections: Mutex<HashMap<FixedBitSet, Arc<SectionRing>>>,
}

impl std::fmt::Debug for Sheaf {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let reps: Vec<usize> = self.reps.iter().map(|r| r.element).collect();
        f.debug_struct("Sheaf")
            .field("space", &self.space)
            .field("reps", &reps)
            .finish()
    }
}

impl Sheaf {
    pub fn new(space: Arc<Spectrum>) -> Result<Self, SheafError> {
        let ring = space.ring().clone();
        let mut reps: Vec<BasicRep> = Vec::new();
        let mut by_open: HashMap<FixedBitSet, usize> = HashMap::new();
        let mut rep_of = Vec::with_capacity(ring.order());
        for a in ring.elements() {
            let open = space.basic_open(a).points;
            let idx = match by_open.get(&open) {
                Some(&i) => i,
                None => {
                    let local = localize_multset(&ring, &[a])?;
                    by_open.insert(open.clone(), reps.len());
                    reps.push(BasicRep {
                        element: a,
                        open,
                        local,
                    });
                    reps.len() - 1
                }
            };
            rep_of.push(idx);
        }
        let k = reps.len();
        let mut below = vec![FixedBitSet::with_capacity(k); k];
        let mut restrictions = HashMap::new();
        for i in 0..k {
            for j in 0..k {
                if !reps[j].open.is_subset(&reps[i].open) {
                    continue;
                }
                below[i].insert(j);
                let (src, dst) = (&reps[i].local, &reps[j].local);
                let mut map = vec![usize::MAX; src.order()];
                for r in ring.elements() {
                    let c = src.hom.apply(r);
                    let img = dst.hom.apply(r);
                    if map[c] == usize::MAX {
                        map[c] = img;
                    } else if map[c] != img {
                        return Err(SheafError::Inconsistent("restriction is not well defined"));
                    }
                }
                restrictions.insert((i, j), map);
            }
        }
        Ok(Sheaf {
            space,
            reps,
            rep_of,
            below,
            restrictions,
            sections: Mutex::new(HashMap::new()),
        })
    }

    pub fn space(&self) -> &Arc<Spectrum> {
        &self.space
    }

    pub fn reps(&self) -> &[BasicRep] {
        &self.reps
    }

    pub fn rep_of(&self, a: usize) -> usize {
        self.rep_of[a]
    }

    pub fn rep_below(&self, i: usize, j: usize) -> bool {
        self.below[i].contains(j)
    }

    /// Restriction `R_i → R_j` between representatives with `U_j ⊆ U_i`.
    pub fn rep_restriction(&self, i: usize, j: usize) -> Option<&[usize]> {
        self.restrictions.get(&(i, j)).map(Vec::as_slice)
    }

    /// `res: R_b → R_a` for `U_a ⊆ U_b`, determined by compatibility with
    /// the canonical maps out of `R`.
    pub fn restriction_map(&self, b: usize, a: usize) -> Result<RingHom, SheafError> {
        let ring = self.space.ring();
        if !self.space.basis_containment(a, b) {
            return Err(SheafError::NotContained);
        }
        let rb = localize_multset(ring, &[b])?;
        let ra = localize_multset(ring, &[a])?;
        let psi = ra.hom.clone();
        rb.factor_through(&psi)
    }

    /// Checks the explicit fraction formula `r/b^m ↦ t^m r / a^{nm}` against
    /// [`Sheaf::restriction_map`] for every witness `a^n = t b` with `n` up to
    /// one past the least exponent, every `r` and `m ≤ 2`.
    pub fn fraction_formula_agrees(&self, b: usize, a: usize) -> Result<bool, SheafError> {
        let ring = self.space.ring();
        let res = self.restriction_map(b, a)?;
        let rb = localize_multset(ring, &[b])?;
        let ra = localize_multset(ring, &[a])?;
        let (inv_b, inv_a) = match (rb.inverse_of(b), ra.inverse_of(a)) {
            (Some(x), Some(y)) => (x, y),
            _ => return Ok(false),
        };
        let witnesses = |n: u64| -> Vec<usize> {
            let an = ring.pow(a, n);
            ring.elements().filter(|&t| ring.mul(t, b) == an).collect()
        };
        let least = (1..=ring.order() as u64 + 1).find(|&n| !witnesses(n).is_empty());
        let Some(least) = least else { return Ok(false) };
        let (lb, la) = (rb.ring(), ra.ring());
        for n in least..=least + 1 {
            for t in witnesses(n) {
                for m in 0..=2u64 {
                    for r in ring.elements() {
                        let frac_b = lb.mul(rb.hom.apply(r), lb.pow(inv_b, m));
                        let lhs = res.apply(frac_b);
                        let num = ra.hom.apply(ring.mul(ring.pow(t, m), r));
                        let rhs = la.mul(num, la.pow(inv_a, n * m));
                        if lhs != rhs {
                            return Ok(false);
                        }
                    }
                }
            }
        }
        Ok(true)
    }

    /// For `U_a` equal to its representative's open, the canonical map
    /// `R_a → R_rep` is an isomorphism commuting with all restrictions.
    pub fn representative_consistent(&self, a: usize) -> Result<bool, SheafError> {
        let ring = self.space.ring();
        let i = self.rep_of[a];
        let la = localize_multset(ring, &[a])?;
        let rep = &self.reps[i].local;
        let iso = match la.factor_through(&rep.hom) {
            Ok(h) => h,
            Err(SheafError::NoFactorization) => return Ok(false),
            Err(e) => return Err(e),
        };
        if !iso.is_bijective() {
            return Ok(false);
        }
        for j in self.below[i].ones() {
            let res = &self.restrictions[&(i, j)];
            let direct = la.factor_through(&self.reps[j].local.hom)?;
            if (0..la.order()).any(|x| res[iso.apply(x)] != direct.apply(x)) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// First `(i, j, k)` breaking `res_ii = id` or `res_jk ∘ res_ij = res_ik`.
    pub fn presheaf_violation(&self) -> Option<(usize, usize, usize)> {
        let k = self.reps.len();
        for i in 0..k {
            let id = &self.restrictions[&(i, i)];
            if id.iter().enumerate().any(|(x, &y)| x != y) {
                return Some((i, i, i));
            }
            for j in self.below[i].ones() {
                for l in self.below[j].ones() {
                    let (ij, jl, il) = (
                        &self.restrictions[&(i, j)],
                        &self.restrictions[&(j, l)],
                        &self.restrictions[&(i, l)],
                    );
                    if (0..ij.len()).any(|x| jl[ij[x]] != il[x]) {
                        return Some((i, j, l));
                    }
                }
            }
        }
        None
    }

    fn reps_inside(&self, open: &FixedBitSet) -> Vec<usize> {
        (0..self.reps.len())
            .filter(|&i| self.reps[i].open.is_subset(open))
            .collect()
    }

    /// `F(U)`: restriction-compatible tuples over the basic opens inside `U`.
    pub fn sections(&self, open: &FixedBitSet) -> Arc<SectionRing> {
        if let Some(s) = self.sections.lock().expect("section cache").get(open) {
            return s.clone();
        }
        let built = Arc::new(self.build_sections(open));
        self.sections
            .lock()
            .expect("section cache")
            .entry(open.clone())
            .or_insert(built)
            .clone()
    }

    fn build_sections(&self, open: &FixedBitSet) -> SectionRing {
        let reps = self.reps_inside(open);
        // larger opens first, so every constraint points at an assigned slot
        let mut order: Vec<usize> = (0..reps.len()).collect();
        order.sort_by_key(|&p| (std::cmp::Reverse(self.reps[reps[p]].open.count_ones(..)), p));
        let parents: Vec<Vec<usize>> = order
            .iter()
            .enumerate()
            .map(|(step, &p)| {
                order[..step]
                    .iter()
                    .copied()
                    .filter(|&q| self.below[reps[q]].contains(reps[p]))
                    .collect()
            })
            .collect();

        let mut tuples = Vec::new();
        let mut current = vec![0usize; reps.len()];
        self.enumerate_limit(&reps, &order, &parents, 0, &mut current, &mut tuples);
        tuples.sort();
        let lookup: HashMap<Vec<usize>, usize> = tuples
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();

        let m = tuples.len();
        let mut add = Vec::with_capacity(m * m);
        let mut mul = Vec::with_capacity(m * m);
        let mut buf = vec![0usize; reps.len()];
        for x in &tuples {
            for y in &tuples {
                for (k, &i) in reps.iter().enumerate() {
                    buf[k] = self.reps[i].local.ring.add(x[k], y[k]);
                }
                add.push(lookup[&buf] as u32);
                for (k, &i) in reps.iter().enumerate() {
                    buf[k] = self.reps[i].local.ring.mul(x[k], y[k]);
                }
                mul.push(lookup[&buf] as u32);
            }
        }
        let one_tuple: Vec<usize> = reps
            .iter()
            .map(|&i| self.reps[i].local.ring.one())
            .collect();
        let label = format!("F({} points)", open.count_ones(..));
        let ring = Arc::new(FiniteRing::from_tables(
            m,
            add,
            mul,
            lookup[&one_tuple],
            label,
        ));
        SectionRing {
            open: open.clone(),
            reps,
            tuples,
            lookup,
            ring,
        }
    }

    fn enumerate_limit(
        &self,
        reps: &[usize],
        order: &[usize],
        parents: &[Vec<usize>],
        step: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if step == order.len() {
            out.push(current.clone());
            return;
        }
        let p = order[step];
        let forced: Vec<usize> = parents[step]
            .iter()
            .map(|&q| self.restrictions[&(reps[q], reps[p])][current[q]])
            .collect();
        if let Some(&value) = forced.first() {
            if forced.iter().all(|&v| v == value) {
                current[p] = value;
                self.enumerate_limit(reps, order, parents, step + 1, current, out);
            }
            return;
        }
        for value in 0..self.reps[reps[p]].local.order() {
            current[p] = value;
            self.enumerate_limit(reps, order, parents, step + 1, current, out);
        }
    }

    /// `res_{V,U}: F(V) → F(U)`, the subfamily projection.
    pub fn restrict(
        &self,
        larger: &FixedBitSet,
        smaller: &FixedBitSet,
    ) -> Result<RingHom, SheafError> {
        if !smaller.is_subset(larger) {
            return Err(SheafError::NotContained);
        }
        let (fv, fu) = (self.sections(larger), self.sections(smaller));
        let positions =
            positions_in(&fu.reps, &fv.reps).ok_or(SheafError::Inconsistent("missing rep"))?;
        let map = fv
            .tuples
            .iter()
            .map(|t| {
                let proj: Vec<usize> = positions.iter().map(|&k| t[k]).collect();
                fu.index_of(&proj)
                    .ok_or(SheafError::Inconsistent("projection leaves F(U)"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RingHom::new(fv.ring.clone(), fu.ring.clone(), map)?)
    }

    pub fn section(&self, open: &FixedBitSet, index: usize) -> Section {
        let f = self.sections(open);
        Section {
            open: open.clone(),
            reps: f.reps.clone(),
            values: f.tuples[index].clone(),
        }
    }

    pub fn restrict_section(
        &self,
        section: &Section,
        smaller: &FixedBitSet,
    ) -> Result<Section, SheafError> {
        if !smaller.is_subset(&section.open) {
            return Err(SheafError::NotContained);
        }
        let fu = self.sections(smaller);
        let positions =
            positions_in(&fu.reps, &section.reps).ok_or(SheafError::Inconsistent("missing rep"))?;
        Ok(Section {
            open: smaller.clone(),
            reps: fu.reps.clone(),
            values: positions.iter().map(|&k| section.values[k]).collect(),
        })
    }

    /// Identity and gluing for one cover of `open`.
    pub fn check_cover(&self, open: &FixedBitSet, cover: &[FixedBitSet]) -> CoverCheck {
        let fu = self.sections(open);
        let members: Vec<Arc<SectionRing>> = cover.iter().map(|c| self.sections(c)).collect();
        let projections: Vec<Vec<usize>> = members
            .iter()
            .map(|m| positions_in(&m.reps, &fu.reps).unwrap_or_default())
            .collect();

        let mut images: HashSet<Vec<usize>> = HashSet::new();
        let mut injective = true;
        for t in &fu.tuples {
            let family: Vec<usize> = members
                .iter()
                .zip(&projections)
                .map(|(m, pos)| {
                    let proj: Vec<usize> = pos.iter().map(|&k| t[k]).collect();
                    m.index_of(&proj).unwrap_or(usize::MAX)
                })
                .collect();
            if !images.insert(family) {
                injective = false;
            }
        }

        // shared representative positions for each pair of members
        let shared: Vec<Vec<Vec<(usize, usize)>>> = members
            .iter()
            .map(|a| {
                members
                    .iter()
                    .map(|b| {
                        a.reps
                            .iter()
                            .enumerate()
                            .filter_map(|(ka, r)| {
                                b.reps.iter().position(|x| x == r).map(|kb| (ka, kb))
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let mut families = 0usize;
        let mut all_glue = true;
        let mut chosen = Vec::with_capacity(members.len());
        glue_search(&members, &shared, &mut chosen, &mut |family| {
            families += 1;
            if !images.contains(family) {
                all_glue = false;
            }
        });
        CoverCheck {
            identity: injective,
            gluing: all_glue,
            compatible_families: families,
        }
    }

    /// Covers of `open` by opens of the topology, enumerated as subsets of
    /// the nonempty opens inside it. Returns whether enumeration was cut off.
    pub fn covers_of(&self, open: &FixedBitSet, cap_log2: usize) -> (Vec<Vec<FixedBitSet>>, bool) {
        if open.is_clear() {
            return (vec![Vec::new()], false);
        }
        let candidates: Vec<FixedBitSet> = self
            .space
            .topology()
            .open_sets()
            .into_iter()
            .map(|o| o.points)
            .filter(|o| !o.is_clear() && o.is_subset(open))
            .collect();
        let truncated = candidates.len() > cap_log2;
        let limit: u64 = 1u64 << candidates.len().min(cap_log2);
        let mut covers = Vec::new();
        for mask in 1..limit {
            let members: Vec<FixedBitSet> = candidates
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, c)| c.clone())
                .collect();
            let mut union = self.space.empty_set();
            members.iter().for_each(|m| union.union_with(m));
            if union == *open {
                covers.push(members);
            }
        }
        (covers, truncated)
    }

    pub fn check_sheaf_axioms(&self, cap_log2: usize) -> SheafAxiomReport {
        let mut report = SheafAxiomReport::default();
        for open in self.space.topology().open_sets() {
            report.opens += 1;
            let (covers, truncated) = self.covers_of(&open.points, cap_log2);
            if truncated {
                report.truncated.push(open.points.clone());
            }
            for cover in covers {
                report.covers += 1;
                let check = self.check_cover(&open.points, &cover);
                if !(check.identity && check.gluing) {
                    report.failures.push((open.points.clone(), cover, check));
                }
            }
        }
        report
    }

    /// Direct limit of `F(U_a)` over the basic opens containing point `p`.
    pub fn stalk(&self, p: usize) -> Result<Stalk, SheafError> {
        let containing: Vec<usize> = (0..self.reps.len())
            .filter(|&i| self.reps[i].open.contains(p))
            .collect();
        let mut offsets = Vec::with_capacity(containing.len());
        let mut total = 0;
        for &i in &containing {
            offsets.push(total);
            total += self.reps[i].local.order();
        }
        let mut dsu = UnionFind::new(total);
        for (ci, &i) in containing.iter().enumerate() {
            for (cj, &j) in containing.iter().enumerate() {
                if let Some(res) = self.rep_restriction(i, j) {
                    for (x, &y) in res.iter().enumerate() {
                        dsu.union(offsets[ci] + x, offsets[cj] + y);
                    }
                }
            }
        }
        let least = containing
            .iter()
            .position(|&i| containing.iter().all(|&j| self.below[j].contains(i)))
            .ok_or(SheafError::Inconsistent(
                "basic opens at a point have no least member",
            ))?;
        let classes: HashSet<usize> = (0..total).map(|x| dsu.find(x)).collect();
        let least_ring = self.reps[containing[least]].local.ring.clone();
        let least_classes: HashSet<usize> = (0..least_ring.order())
            .map(|x| dsu.find(offsets[least] + x))
            .collect();
        if classes.len() != least_ring.order() || least_classes.len() != least_ring.order() {
            return Err(SheafError::Inconsistent("direct limit does not stabilize"));
        }
        let ring = Arc::new(
            (*least_ring)
                .clone()
                .with_label(format!("stalk at {}", self.space.point_ideal(p))),
        );
        Ok(Stalk {
            point: p,
            least_rep: containing[least],
            opens: containing.len(),
            ring,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Stalk {
    pub point: usize,
    /// Representative of the smallest basic open containing the point.
    pub least_rep: usize,
    /// Number of basic opens the limit ran over.
    pub opens: usize,
    pub ring: Arc<FiniteRing>,
}

fn positions_in(sub: &[usize], sup: &[usize]) -> Option<Vec<usize>> {
    sub.iter()
        .map(|r| sup.iter().position(|x| x == r))
        .collect()
}

fn glue_search(
    members: &[Arc<SectionRing>],
    shared: &[Vec<Vec<(usize, usize)>>],
    chosen: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    let k = chosen.len();
    if k == members.len() {
        visit(chosen);
        return;
    }
    for (idx, t) in members[k].tuples.iter().enumerate() {
        let compatible = chosen.iter().enumerate().all(|(j, &cj)| {
            let other = &members[j].tuples[cj];
            shared[k][j].iter().all(|&(a, b)| t[a] == other[b])
        });
        if compatible {
            chosen.push(idx);
            glue_search(members, shared, chosen, visit);
            chosen.pop();
        }
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            cur = std::mem::replace(&mut self.parent[cur], root);
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Whether the stalk at `p` is local and isomorphic to `R` localized at `√Q`.
pub fn stalk_matches_prime(sheaf: &Sheaf, p: usize) -> Result<bool, SheafError> {
    let stalk = sheaf.stalk(p)?;
    let space = sheaf.space();
    let at_prime = localize_prime(space.ring(), space.point_radical(p))?;
    Ok(is_local(&stalk.ring) && ring_isomorphic(&stalk.ring, at_prime.ring())?.is_some())
}

/// `F` on QPrim(R) against the structure sheaf `O` on Spec(R) pushed
/// forward along the inclusion.
pub struct DirectImage {
    pub qprim: Sheaf,
    pub spec: Sheaf,
    /// QPrim point index of each Spec point.
    pub inclusion: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct DirectImageReport {
    pub opens: usize,
    pub inclusion_continuous: bool,
    pub basic_preimages: bool,
    pub isomorphic_opens: usize,
    pub natural: bool,
    pub global_sections: bool,
}

impl DirectImageReport {
    pub fn holds(&self) -> bool {
        self.inclusion_continuous
            && self.basic_preimages
            && self.isomorphic_opens == self.opens
            && self.natural
            && self.global_sections
    }
}

impl DirectImage {
    pub fn new(qprim: Arc<Spectrum>, spec: Arc<Spectrum>) -> Result<Self, SheafError> {
        if qprim.kind() != SpectrumKind::QPrim
            || spec.kind() != SpectrumKind::Spec
            || qprim.ring().id() != spec.ring().id()
        {
            return Err(SheafError::Topology(TopologyError::MismatchedSpectra));
        }
        let inclusion = spec
            .points()
            .iter()
            .map(|pt| {
                qprim
                    .point_of(pt.ideal)
                    .ok_or(SheafError::Inconsistent("prime missing from QPrim"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DirectImage {
            qprim: Sheaf::new(qprim)?,
            spec: Sheaf::new(spec)?,
            inclusion,
        })
    }

    /// `ι⁻¹(U)` as a Spec point set.
    pub fn pullback(&self, open: &FixedBitSet) -> FixedBitSet {
        let mut out = self.spec.space().empty_set();
        for (s, &q) in self.inclusion.iter().enumerate() {
            if open.contains(q) {
                out.insert(s);
            }
        }
        out
    }

    pub fn inclusion_continuous(&self) -> bool {
        let spec_topo = self.spec.space().topology();
        self.qprim
            .space()
            .topology()
            .closed_sets()
            .iter()
            .all(|c| spec_topo.is_closed(&self.pullback(&c.points)))
    }

    /// `ι⁻¹(U_a) = {P : a ∉ P}`.
    pub fn basic_preimage_holds(&self, a: usize) -> bool {
        let pulled = self.pullback(&self.qprim.space().basic_open(a).points);
        let spec = self.spec.space();
        let mut direct = spec.empty_set();
        for p in 0..spec.len() {
            if !spec.point_ideal(p).contains(a) {
                direct.insert(p);
            }
        }
        pulled == direct
    }

    /// The natural map `F(U) → O(ι⁻¹(U))`, matching coordinates by the
    /// representative element.
    pub fn comparison(&self, open: &FixedBitSet) -> Result<RingHom, SheafError> {
        let f = self.qprim.sections(open);
        let o = self.spec.sections(&self.pullback(open));
        let f_elements: Vec<usize> = f
            .reps
            .iter()
            .map(|&i| self.qprim.reps()[i].element)
            .collect();
        let o_elements: Vec<usize> = o
            .reps
            .iter()
            .map(|&i| self.spec.reps()[i].element)
            .collect();
        let positions = positions_in(&o_elements, &f_elements)
            .ok_or(SheafError::Inconsistent("index sets differ"))?;
        let map = f
            .tuples
            .iter()
            .map(|t| {
                let proj: Vec<usize> = positions.iter().map(|&k| t[k]).collect();
                o.index_of(&proj)
                    .ok_or(SheafError::Inconsistent("comparison leaves O(U)"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RingHom::new(f.ring.clone(), o.ring.clone(), map)?)
    }

    pub fn open_isomorphic(&self, open: &FixedBitSet) -> bool {
        self.comparison(open).is_ok_and(|h| h.is_bijective())
    }

    /// `η_U ∘ res^F_{V,U} = res^O ∘ η_V` on every element.
    pub fn natural_on(
        &self,
        larger: &FixedBitSet,
        smaller: &FixedBitSet,
    ) -> Result<bool, SheafError> {
        let f_res = self.qprim.restrict(larger, smaller)?;
        let o_res = self
            .spec
            .restrict(&self.pullback(larger), &self.pullback(smaller))?;
        let (eta_v, eta_u) = (self.comparison(larger)?, self.comparison(smaller)?);
        Ok(f_res
            .source()
            .elements()
            .all(|x| eta_u.apply(f_res.apply(x)) == o_res.apply(eta_v.apply(x))))
    }

    pub fn report(&self) -> Result<DirectImageReport, SheafError> {
        let opens: Vec<FixedBitSet> = self
            .qprim
            .space()
            .topology()
            .open_sets()
            .into_iter()
            .map(|o| o.points)
            .collect();
        let ring = self.qprim.space().ring();
        let mut natural = true;
        for v in &opens {
            for u in opens.iter().filter(|u| u.is_subset(v)) {
                natural &= self.natural_on(v, u)?;
            }
        }
        Ok(DirectImageReport {
            opens: opens.len(),
            inclusion_continuous: self.inclusion_continuous(),
            basic_preimages: ring.elements().all(|a| self.basic_preimage_holds(a)),
            isomorphic_opens: opens.iter().filter(|u| self.open_isomorphic(u)).count(),
            natural,
            global_sections: global_sections_iso(&self.qprim)?.is_bijective(),
        })
    }
}

/// `r ↦ (r/1)_a`, the map `R → F(whole space)`.
pub fn global_sections_iso(sheaf: &Sheaf) -> Result<RingHom, SheafError> {
    let space = sheaf.space();
    let ring = space.ring();
    let full = sections_full(sheaf);
    let map = ring
        .elements()
        .map(|r| {
            let t: Vec<usize> = full
                .reps
                .iter()
                .map(|&i| sheaf.reps()[i].local.hom().apply(r))
                .collect();
            full.index_of(&t)
                .ok_or(SheafError::Inconsistent("r/1 is not compatible"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RingHom::new(ring.clone(), full.ring.clone(), map)?)
}

fn sections_full(sheaf: &Sheaf) -> Arc<SectionRing> {
    sheaf.sections(&sheaf.space().full_set())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideal::generate;
    use crate::ring::{build_ring, RingSpec};
    use crate::topology::spectrum;

    fn z(n: usize) -> Arc<FiniteRing> {
        build_ring(&RingSpec::zmod(n)).unwrap()
    }

    fn qprim_sheaf(r: &Arc<FiniteRing>) -> Sheaf {
        Sheaf::new(Arc::new(spectrum(r, SpectrumKind::QPrim).unwrap())).unwrap()
    }

    #[test]
    fn localizations_of_z12() {
        let r = z(12);
        let at2 = localize_multset(&r, &[2]).unwrap();
        assert_eq!(at2.order(), 3);
        assert_eq!(at2.kernel(), vec![0, 3, 6, 9]);
        let trivial = localize_multset(&r, &[1]).unwrap();
        assert_eq!(trivial.order(), 12);
        let odds: Vec<usize> = (1..12).step_by(2).collect();
        let at_odds = localize_multset(&r, &odds).unwrap();
        assert_eq!(at_odds.order(), 4);
        assert_eq!(at_odds.kernel(), vec![0, 4, 8]);
        assert_eq!(localize_multset(&r, &[0]).unwrap().order(), 1);
    }

    #[test]
    fn element_localization_two_ways() {
        let r = z(12);
        let l2 = localize_element(&r, 2).unwrap();
        assert_eq!((l2.localized.order(), l2.idempotent), (3, 4));
        assert_eq!(l2.carrier_elements, vec![0, 4, 8]);
        let l3 = localize_element(&r, 3).unwrap();
        assert_eq!((l3.localized.order(), l3.idempotent), (4, 9));
        assert_eq!(l3.carrier_elements, vec![0, 3, 6, 9]);
        assert_eq!(l3.localized.kernel(), vec![0, 4, 8]);
        let l1 = localize_element(&r, 1).unwrap();
        assert_eq!(l1.localized.order(), 12);
    }

    #[test]
    fn localizations_at_primes_are_local() {
        let r = z(12);
        let at2 = localize_prime(&r, &generate(&r, &[2])).unwrap();
        assert!(ring_isomorphic(at2.ring(), &z(4)).unwrap().is_some());
        let at3 = localize_prime(&r, &generate(&r, &[3])).unwrap();
        assert_eq!(at3.order(), 3);
        assert_eq!(at3.ring().units().len(), 2);
        let f = z(5);
        assert_eq!(localize_prime(&f, &Ideal::zero(&f)).unwrap().order(), 5);
        assert_eq!(
            localize_prime(&r, &generate(&r, &[4])).unwrap_err(),
            SheafError::NotPrime
        );
    }

    #[test]
    fn universal_property_factorization() {
        let r = z(12);
        let r3 = z(3);
        let at2 = localize_multset(&r, &[2]).unwrap();
        let psi = crate::ring::build_hom(&r, &r3, (0..12).map(|x| x % 3).collect()).unwrap();
        let f = at2.factor_through(&psi).unwrap();
        assert!(f.is_bijective());
        let r4 = z(4);
        let mod4 = crate::ring::build_hom(&r, &r4, (0..12).map(|x| x % 4).collect()).unwrap();
        assert_eq!(
            at2.factor_through(&mod4).unwrap_err(),
            SheafError::NoFactorization
        );
    }

    #[test]
    fn contraction_extension_in_z12() {
        let r = z(12);
        let q = spectrum(&r, SpectrumKind::QPrim).unwrap();
        let at2 = contraction_extension_checks(&q, &[2]).unwrap();
        assert_eq!((at2.localized_points, at2.subspace_points), (1, 1));
        assert!(at2.holds());
        let at3 = contraction_extension_checks(&q, &[3]).unwrap();
        assert_eq!((at3.localized_points, at3.subspace_points), (2, 2));
        assert!(at3.holds());
        let unit = contraction_extension_checks(&q, &[5]).unwrap();
        assert_eq!(unit.subspace_points, 3);
        assert!(unit.holds());
    }

    #[test]
    fn restriction_maps_in_z12() {
        let r = z(12);
        let sheaf = qprim_sheaf(&r);
        let res = sheaf.restriction_map(1, 2).unwrap();
        let l2 = localize_element(&r, 2).unwrap();
        // in idempotent form the image of 1 is the local identity e = 4
        let one_image = res.apply(r.one());
        assert_eq!(l2.carrier_elements[l2.comparison.apply(one_image)], 4);
        assert!(sheaf.restriction_map(2, 2).unwrap().is_bijective());
        let there = sheaf.restriction_map(2, 4).unwrap();
        let back = sheaf.restriction_map(4, 2).unwrap();
        assert!((0..3).all(|x| back.apply(there.apply(x)) == x));
        assert_eq!(
            sheaf.restriction_map(2, 3).unwrap_err(),
            SheafError::NotContained
        );
        assert!(sheaf.fraction_formula_agrees(2, 4).unwrap());
        assert!(sheaf.fraction_formula_agrees(1, 3).unwrap());
        assert!(sheaf.presheaf_violation().is_none());
    }

    #[test]
    fn sections_over_z12() {
        let r = z(12);
        let sheaf = qprim_sheaf(&r);
        let space = sheaf.space().clone();
        assert_eq!(sheaf.sections(&space.full_set()).order(), 12);
        assert_eq!(sheaf.sections(&space.empty_set()).order(), 1);
        assert_eq!(sheaf.sections(&space.basic_open(3).points).order(), 4);
        assert!(global_sections_iso(&sheaf).unwrap().is_bijective());

        let u2 = space.basic_open(2).points;
        let res = sheaf.restrict(&space.full_set(), &u2).unwrap();
        assert_eq!(res.target().order(), 3);
        assert!(res.is_surjective());
        assert!(sheaf.restrict(&u2, &u2).unwrap().is_bijective());
        let to_empty = sheaf
            .restrict(&space.full_set(), &space.empty_set())
            .unwrap();
        assert!(to_empty.map().iter().all(|&x| x == 0));
        assert_eq!(
            sheaf.restrict(&u2, &space.full_set()).unwrap_err(),
            SheafError::NotContained
        );

        let s = sheaf.section(&space.full_set(), 5);
        let down = sheaf.restrict_section(&s, &u2).unwrap();
        let twice = sheaf
            .restrict_section(
                &sheaf.restrict_section(&s, &u2).unwrap(),
                &space.empty_set(),
            )
            .unwrap();
        assert_eq!(
            twice,
            sheaf.restrict_section(&s, &space.empty_set()).unwrap()
        );
        assert_eq!(down.values.len(), down.reps.len());
    }

    #[test]
    fn sheaf_axioms_on_small_rings() {
        for n in [12usize, 4, 36] {
            let sheaf = qprim_sheaf(&z(n));
            let report = sheaf.check_sheaf_axioms(DEFAULT_COVER_CANDIDATES_LOG2);
            assert!(report.failures.is_empty(), "Z/{n}: {:?}", report.failures);
            assert!(report.covers >= report.opens);
        }
        let sheaf = qprim_sheaf(&z(12));
        let space = sheaf.space().clone();
        let cover = [space.basic_open(2).points, space.basic_open(3).points];
        let check = sheaf.check_cover(&space.full_set(), &cover);
        assert!(check.identity && check.gluing);
        assert_eq!(check.compatible_families, 12);
    }

    #[test]
    fn stalks_in_z12() {
        let r = z(12);
        let sheaf = qprim_sheaf(&r);
        // points: 0 = (2), 1 = (3), 2 = (4)
        let at4 = sheaf.stalk(2).unwrap();
        assert_eq!(at4.ring.order(), 4);
        assert!(is_local(&at4.ring));
        let at3 = sheaf.stalk(1).unwrap();
        assert_eq!(at3.ring.order(), 3);
        assert_eq!(at3.ring.units().len(), 2);
        for p in 0..3 {
            assert!(stalk_matches_prime(&sheaf, p).unwrap());
        }
        let f = z(7);
        let fs = qprim_sheaf(&f);
        assert_eq!(fs.stalk(0).unwrap().ring.order(), 7);
    }

    #[test]
    fn direct_image_on_z12_and_z4() {
        for n in [12usize, 4] {
            let r = z(n);
            let q = Arc::new(spectrum(&r, SpectrumKind::QPrim).unwrap());
            let s = Arc::new(spectrum(&r, SpectrumKind::Spec).unwrap());
            let di = DirectImage::new(q.clone(), s).unwrap();
            let report = di.report().unwrap();
            assert!(report.holds(), "Z/{n}: {report:?}");
            if n == 12 {
                let u2 = q.basic_open(2).points;
                let pulled = di.pullback(&u2);
                assert_eq!(pulled.ones().collect::<Vec<_>>(), vec![1]);
                assert_eq!(di.spec.sections(&pulled).order(), 3);
            } else {
                assert_eq!(q.len(), 2);
                assert_eq!(di.qprim.sections(&q.full_set()).order(), 4);
            }
        }
    }
}
