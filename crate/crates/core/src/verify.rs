//! Registry of executable checks run over a corpus of rings.
//!
//! Every check expands into a list of [`Predicate`]s, each a small claim
//! about one ring with its arguments spelled out (ideals as element lists,
//! spectrum points as QPrim point indices). A failing predicate is the
//! counterexample; [`replay`] evaluates it again from its serialized form.

use std::collections::BTreeSet;
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use fixedbitset::FixedBitSet;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::ideal::{all_ideals, Ideal, IdealError, IdealLattice};
use crate::ring::{build_ring, FiniteRing, RingError, RingHom, RingSpec};
use crate::sheaf::{
    contraction_extension_checks, global_sections_iso, localize_element, localize_multset,
    stalk_matches_prime, DirectImage, Sheaf, SheafError, DEFAULT_COVER_CANDIDATES_LOG2,
};
use crate::topology::{
    disjoint_decomposition, AssociatedMap, Spectrum, SpectrumKind, TopologyError,
};

/// Lattices with at most this many ideals get exhaustive pair/triple checks.
pub const EXHAUSTIVE_LATTICE_SIZE: usize = 64;
pub const SAMPLED_TUPLES: usize = 2000;
pub const DEFAULT_SEED: u64 = 0x5eed_0001;
/// Largest order for the subset-filtering ideal oracle.
pub const ORACLE_MAX_ORDER: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Sheaf(#[from] SheafError),
    #[error("counterexample does not fit this ring: {0}")]
    BadArgument(String),
    #[error("cannot read corpus: {0}")]
    Corpus(String),
}

impl VerifyError {
    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            VerifyError::Ring(RingError::OrderCapExceeded { .. })
                | VerifyError::Ideal(IdealError::IdealCountCapExceeded { .. })
                | VerifyError::Topology(TopologyError::Ideal(
                    IdealError::IdealCountCapExceeded { .. }
                ))
                | VerifyError::Sheaf(SheafError::SearchCapExceeded { .. })
                | VerifyError::Sheaf(SheafError::Ring(RingError::OrderCapExceeded { .. }))
                | VerifyError::Sheaf(SheafError::Topology(TopologyError::Ideal(
                    IdealError::IdealCountCapExceeded { .. }
                )))
        )
    }
}

pub fn default_corpus() -> Vec<RingSpec> {
    let mut corpus: Vec<RingSpec> = [2, 3, 4, 6, 8, 9, 12, 16, 24, 36, 60]
        .into_iter()
        .map(RingSpec::zmod)
        .collect();
    corpus.extend([
        RingSpec::poly_quotient(2, vec![0, 0, 1]),
        RingSpec::poly_quotient(2, vec![0, 0, 0, 1]),
        RingSpec::poly_quotient(3, vec![0, 0, 1]),
        RingSpec::poly_quotient(2, vec![1, 1, 1]),
        RingSpec::product(vec![RingSpec::zmod(2), RingSpec::zmod(2)]),
        RingSpec::product(vec![RingSpec::zmod(4), RingSpec::zmod(3)]),
        RingSpec::product(vec![
            RingSpec::zmod(2),
            RingSpec::zmod(2),
            RingSpec::zmod(3),
        ]),
        RingSpec::product(vec![
            RingSpec::zmod(4),
            RingSpec::poly_quotient(2, vec![0, 0, 1]),
        ]),
    ]);
    corpus
}

/// A corpus file is a JSON array of ring specs.
pub fn parse_corpus(text: &str) -> Result<Vec<RingSpec>, VerifyError> {
    serde_json::from_str(text).map_err(|e| VerifyError::Corpus(e.to_string()))
}

/// Everything the checks share for one ring.
pub struct RingContext {
    pub index: usize,
    pub spec: RingSpec,
    pub ring: Arc<FiniteRing>,
    pub lattice: Arc<IdealLattice>,
    pub qprim: Arc<Spectrum>,
    direct_image: OnceLock<Result<Arc<DirectImage>, SheafError>>,
}

impl RingContext {
    pub fn new(index: usize, spec: &RingSpec) -> Result<Self, VerifyError> {
        let ring = build_ring(spec)?;
        let lattice = Arc::new(all_ideals(&ring)?);
        let qprim = Arc::new(Spectrum::new(lattice.clone(), SpectrumKind::QPrim));
        Ok(RingContext {
            index,
            spec: spec.clone(),
            ring,
            lattice,
            qprim,
            direct_image: OnceLock::new(),
        })
    }

    pub fn spectrum(&self, kind: SpectrumKind) -> Spectrum {
        Spectrum::new(self.lattice.clone(), kind)
    }

    pub fn direct_image(&self) -> Result<Arc<DirectImage>, VerifyError> {
        self.direct_image
            .get_or_init(|| {
                let spec = Arc::new(self.spectrum(SpectrumKind::Spec));
                DirectImage::new(self.qprim.clone(), spec).map(Arc::new)
            })
            .clone()
            .map_err(VerifyError::from)
    }

    fn ideal(&self, elements: &[usize]) -> Result<usize, VerifyError> {
        self.lattice
            .index_of_elements(elements)
            .map_err(|_| VerifyError::BadArgument(format!("{elements:?} is not an ideal")))
    }

    fn elements(&self, i: usize) -> Vec<usize> {
        self.lattice.get(i).elements()
    }

    fn element(&self, a: usize) -> Result<usize, VerifyError> {
        if a < self.ring.order() {
            Ok(a)
        } else {
            Err(VerifyError::BadArgument(format!("{a} is not an element")))
        }
    }

    fn point(&self, p: usize) -> Result<usize, VerifyError> {
        if p < self.qprim.len() {
            Ok(p)
        } else {
            Err(VerifyError::BadArgument(format!("{p} is not a point")))
        }
    }

    fn point_set(&self, points: &[usize]) -> Result<FixedBitSet, VerifyError> {
        let mut bits = self.qprim.empty_set();
        for &p in points {
            bits.insert(self.point(p)?);
        }
        Ok(bits)
    }

    fn v(&self, i: usize) -> FixedBitSet {
        self.qprim.v_ideal(i).points
    }
}

/// Homomorphisms out of the ring, named so they can be rebuilt on replay.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum HomSpec {
    Identity,
    Quotient { ideal: Vec<usize> },
    Localization { elements: Vec<usize> },
}

/// One claim about one ring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "predicate", rename_all = "snake_case")]
pub enum Predicate {
    VqAntitone {
        i: Vec<usize>,
        j: Vec<usize>,
    },
    VqUnionIntersection {
        i: Vec<usize>,
        j: Vec<usize>,
    },
    VqSum {
        ideals: Vec<Vec<usize>>,
    },
    VqRadical {
        i: Vec<usize>,
    },
    VqExtremes,
    RadicalProduct {
        i: Vec<usize>,
        j: Vec<usize>,
    },
    ClosedPair {
        i: Vec<usize>,
        j: Vec<usize>,
    },
    ClosedExtremes,
    OpenIsBasicUnion {
        complement_of: Vec<usize>,
    },
    BasisContainment {
        a: usize,
        b: usize,
    },
    FiniteSubcover {
        a: usize,
    },
    BasicOpenPair {
        a: usize,
        b: usize,
    },
    BasicOpenSingle {
        a: usize,
    },
    PrimeChain {
        i: Vec<usize>,
    },
    UniqueMinimalPrime {
        i: Vec<usize>,
    },
    LocalizationSubspace {
        s: Vec<usize>,
    },
    LocalizationAgreement {
        a: usize,
    },
    UniversalProperty {
        s: Vec<usize>,
        t: Vec<usize>,
    },
    ProductQuasiPrimary {
        q1: Vec<usize>,
        q2: Vec<usize>,
    },
    ProductInClosed {
        q1: Vec<usize>,
        q2: Vec<usize>,
        i: Vec<usize>,
    },
    Closure {
        point: usize,
    },
    IrreducibleSpace,
    Correspondence {
        i: Vec<usize>,
    },
    Decompose {
        i: Vec<usize>,
    },
    GenericPoints {
        i: Vec<usize>,
    },
    Components,
    DisjointUnion,
    Connectedness,
    IdempotentSplit {
        e: usize,
    },
    ChainDimension,
    Subspace {
        kind: SpectrumKind,
    },
    AssociatedMap {
        hom: HomSpec,
    },
    SheafCover {
        open: Vec<usize>,
        cover: Vec<Vec<usize>>,
    },
    PresheafLaws,
    Representative {
        a: usize,
    },
    FractionFormula {
        b: usize,
        a: usize,
    },
    Stalk {
        point: usize,
    },
    DirectImage,
    GlobalSections,
    QuasiPrimaryIffPrimary {
        i: Vec<usize>,
    },
    LatticeOracle,
}

fn union(a: &FixedBitSet, b: &FixedBitSet) -> FixedBitSet {
    let mut u = a.clone();
    u.union_with(b);
    u
}

fn intersection(a: &FixedBitSet, b: &FixedBitSet) -> FixedBitSet {
    let mut u = a.clone();
    u.intersect_with(b);
    u
}

/// Irreducibility straight from the definition over the closed-set list.
fn irreducible_by_definition(closed: &[FixedBitSet], set: &FixedBitSet) -> bool {
    if set.is_clear() {
        return false;
    }
    let proper: Vec<&FixedBitSet> = closed
        .iter()
        .filter(|c| c.is_subset(set) && *c != set)
        .collect();
    !proper
        .iter()
        .any(|a| proper.iter().any(|b| union(a, b) == *set))
}

/// All subsets containing 0 that are closed under addition and under
/// multiplication by ring elements.
pub fn ideals_by_subset_filtering(ring: &FiniteRing) -> Vec<Vec<usize>> {
    let n = ring.order();
    assert!(n <= 24, "subset filtering is exponential in the order");
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << (n - 1)) {
        let members: Vec<usize> = std::iter::once(0)
            .chain((1..n).filter(|&x| mask >> (x - 1) & 1 == 1))
            .collect();
        let inside = |x: usize| x == 0 || mask >> (x - 1) & 1 == 1;
        let closed = members.iter().all(|&x| {
            members.iter().all(|&y| inside(ring.add(x, y)))
                && ring.elements().all(|r| inside(ring.mul(r, x)))
        });
        if closed {
            out.push(members);
        }
    }
    out.sort();
    out
}

impl Predicate {
    /// Evaluates the claim. `Ok(false)` and non-cap errors both count as failure.
    pub fn holds(&self, ctx: &RingContext) -> Result<bool, VerifyError> {
        let lat = &ctx.lattice;
        let space = &ctx.qprim;
        let topo = space.topology();
        Ok(match self {
            Predicate::VqAntitone { i, j } => {
                let (i, j) = (ctx.ideal(i)?, ctx.ideal(j)?);
                !lat.is_subset(i, j) || ctx.v(j).is_subset(&ctx.v(i))
            }
            Predicate::VqUnionIntersection { i, j } => {
                let (i, j) = (ctx.ideal(i)?, ctx.ideal(j)?);
                let u = union(&ctx.v(i), &ctx.v(j));
                ctx.v(lat.intersect(i, j)) == u && ctx.v(lat.product(i, j)) == u
            }
            Predicate::VqSum { ideals } => {
                let idx = ideals
                    .iter()
                    .map(|i| ctx.ideal(i))
                    .collect::<Result<Vec<_>, _>>()?;
                let sum = idx.iter().fold(lat.zero_ideal(), |acc, &i| lat.sum(acc, i));
                let meet = idx
                    .iter()
                    .fold(space.full_set(), |acc, &i| intersection(&acc, &ctx.v(i)));
                ctx.v(sum) == meet
            }
            Predicate::VqRadical { i } => {
                let i = ctx.ideal(i)?;
                ctx.v(i) == ctx.v(lat.radical(i))
            }
            Predicate::VqExtremes => {
                ctx.v(lat.zero_ideal()) == space.full_set() && ctx.v(lat.unit_ideal()).is_clear()
            }
            Predicate::RadicalProduct { i, j } => {
                let (i, j) = (ctx.ideal(i)?, ctx.ideal(j)?);
                let r = lat.radical(lat.product(i, j));
                r == lat.radical(lat.intersect(i, j))
                    && r == lat.intersect(lat.radical(i), lat.radical(j))
            }
            Predicate::ClosedPair { i, j } => {
                let (a, b) = (ctx.v(ctx.ideal(i)?), ctx.v(ctx.ideal(j)?));
                topo.is_closed(&union(&a, &b)) && topo.is_closed(&intersection(&a, &b))
            }
            Predicate::ClosedExtremes => {
                topo.is_closed(&space.empty_set()) && topo.is_closed(&space.full_set())
            }
            Predicate::OpenIsBasicUnion { complement_of } => {
                let mut open = ctx.v(ctx.ideal(complement_of)?);
                open.toggle_range(..);
                let mut covered = space.empty_set();
                for a in ctx.ring.elements() {
                    let u = space.basic_open(a).points;
                    if u.is_subset(&open) {
                        covered.union_with(&u);
                    }
                }
                covered == open
            }
            Predicate::BasisContainment { a, b } => {
                let (a, b) = (ctx.element(*a)?, ctx.element(*b)?);
                space.basis_containment(a, b)
                    == space
                        .basic_open(a)
                        .points
                        .is_subset(&space.basic_open(b).points)
            }
            Predicate::FiniteSubcover { a } => {
                let ua = space.basic_open(ctx.element(*a)?).points;
                let family: Vec<FixedBitSet> = ctx
                    .ring
                    .elements()
                    .map(|b| space.basic_open(b).points)
                    .filter(|u| u.is_subset(&ua) && !u.is_clear())
                    .collect();
                let mut chosen: Vec<&FixedBitSet> = Vec::new();
                for p in ua.ones() {
                    if !chosen.iter().any(|u| u.contains(p)) {
                        match family.iter().find(|u| u.contains(p)) {
                            Some(u) => chosen.push(u),
                            None => return Ok(false),
                        }
                    }
                }
                let covered = chosen
                    .iter()
                    .fold(space.empty_set(), |acc, u| union(&acc, u));
                covered == ua && chosen.len() <= ua.count_ones(..)
            }
            Predicate::BasicOpenPair { a, b } => {
                let (a, b) = (ctx.element(*a)?, ctx.element(*b)?);
                let (ua, ub) = (space.basic_open(a).points, space.basic_open(b).points);
                let same_radical =
                    lat.radical(lat.generated(&[a])) == lat.radical(lat.generated(&[b]));
                (ua == ub) == same_radical
                    && space.basic_open(ctx.ring.mul(a, b)).points == intersection(&ua, &ub)
            }
            Predicate::BasicOpenSingle { a } => {
                let a = ctx.element(*a)?;
                let ua = space.basic_open(a).points;
                ua.is_clear() == ctx.ring.is_nilpotent(a)
                    && (!ctx.ring.is_unit(a) || ua == space.full_set())
            }
            Predicate::PrimeChain { i } => {
                let i = ctx.ideal(i)?;
                (!lat.is_prime(i) || lat.is_primary(i))
                    && (!lat.is_primary(i) || lat.is_quasi_primary(i))
            }
            Predicate::UniqueMinimalPrime { i } => {
                let i = ctx.ideal(i)?;
                !lat.is_quasi_primary(i) || lat.minimal_primes_over(i)? == vec![lat.radical(i)]
            }
            Predicate::LocalizationSubspace { s } => {
                s.iter().try_for_each(|&x| ctx.element(x).map(drop))?;
                contraction_extension_checks(space, s)?.holds()
            }
            Predicate::LocalizationAgreement { a } => {
                match localize_element(&ctx.ring, ctx.element(*a)?) {
                    Ok(l) => l.comparison.is_bijective(),
                    Err(SheafError::Inconsistent(_)) => false,
                    Err(e) => return Err(e.into()),
                }
            }
            Predicate::UniversalProperty { s, t } => {
                let ls = localize_multset(&ctx.ring, s)?;
                let all: Vec<usize> = s.iter().chain(t).copied().collect();
                let psi = localize_multset(&ctx.ring, &all)?.hom().clone();
                match ls.factor_through(&psi) {
                    Ok(f) => {
                        ls.hom().is_surjective()
                            && ctx
                                .ring
                                .elements()
                                .all(|r| f.apply(ls.hom().apply(r)) == psi.apply(r))
                    }
                    Err(SheafError::NoFactorization) => false,
                    Err(e) => return Err(e.into()),
                }
            }
            Predicate::ProductQuasiPrimary { q1, q2 } => {
                let (a, b) = (ctx.ideal(q1)?, ctx.ideal(q2)?);
                if !(lat.is_quasi_primary(a)
                    && lat.is_quasi_primary(b)
                    && lat.is_subset(lat.radical(a), lat.radical(b)))
                {
                    return Ok(true);
                }
                let p = lat.product(a, b);
                lat.is_quasi_primary(p) && lat.radical(p) == lat.radical(a)
            }
            Predicate::ProductInClosed { q1, q2, i } => {
                let (a, b, i) = (ctx.ideal(q1)?, ctx.ideal(q2)?, ctx.ideal(i)?);
                if !(lat.is_quasi_primary(a) && lat.is_quasi_primary(b) && lat.is_subset(a, b)) {
                    return Ok(true);
                }
                if !lat.is_subset(i, lat.radical(a)) {
                    return Ok(true);
                }
                let p = lat.product(a, b);
                lat.is_quasi_primary(p) && lat.is_subset(i, lat.radical(p))
            }
            Predicate::Closure { point } => {
                let p = ctx.point(*point)?;
                let q = space.point_ideal(p);
                let mut direct = space.empty_set();
                for r in 0..space.len() {
                    if q.is_subset(space.point_radical(r)) {
                        direct.insert(r);
                    }
                }
                let closure = space.closure(p).points;
                closure == direct
                    && closure == space.closure_by_intersection(p)
                    && closure.contains(p)
            }
            Predicate::IrreducibleSpace => {
                let closed: Vec<FixedBitSet> = topo
                    .closed_sets()
                    .iter()
                    .map(|c| c.points.clone())
                    .collect();
                let by_def = irreducible_by_definition(&closed, &space.full_set());
                let nil_qp = lat.is_quasi_primary(lat.nilradical());
                by_def == nil_qp && space.is_space_irreducible() == by_def
            }
            Predicate::Correspondence { i } => {
                let c = ctx.v(ctx.ideal(i)?);
                let closed: Vec<FixedBitSet> = topo
                    .closed_sets()
                    .iter()
                    .map(|c| c.points.clone())
                    .collect();
                let by_def = irreducible_by_definition(&closed, &c);
                let is_point_closure = (0..space.len()).any(|p| space.closure(p).points == c);
                by_def == is_point_closure && space.is_irreducible(&c) == by_def
            }
            Predicate::Decompose { i } => {
                let i = ctx.ideal(i)?;
                let c = space.v_ideal(i);
                let pieces = space.decompose_closed(&c);
                let covered = pieces
                    .iter()
                    .fold(space.empty_set(), |acc, p| union(&acc, &p.points));
                let minimal: Vec<FixedBitSet> = if lat.is_proper(i) {
                    lat.minimal_primes_over(i)?
                        .into_iter()
                        .map(|p| ctx.v(p))
                        .collect()
                } else {
                    Vec::new()
                };
                let irredundant = pieces.iter().enumerate().all(|(a, x)| {
                    pieces
                        .iter()
                        .enumerate()
                        .all(|(b, y)| a == b || !x.points.is_subset(&y.points))
                });
                covered == c.points
                    && irredundant
                    && pieces
                        .iter()
                        .all(|p| minimal.contains(&p.points) && space.is_irreducible(&p.points))
            }
            Predicate::GenericPoints { i } => {
                let c = space.v_ideal(ctx.ideal(i)?);
                let expected: Vec<usize> = c
                    .points
                    .ones()
                    .filter(|&p| space.closure(p).points == c.points)
                    .collect();
                match space.generic_points(&c) {
                    Ok(found) => !found.is_empty() && found == expected,
                    Err(TopologyError::NotIrreducible) => expected.is_empty(),
                    Err(e) => return Err(e.into()),
                }
            }
            Predicate::Components => {
                let closed: Vec<FixedBitSet> = topo
                    .closed_sets()
                    .iter()
                    .map(|c| c.points.clone())
                    .collect();
                let irreducible: Vec<&FixedBitSet> = closed
                    .iter()
                    .filter(|c| irreducible_by_definition(&closed, c))
                    .collect();
                let maximal: BTreeSet<Vec<usize>> = irreducible
                    .iter()
                    .filter(|c| !irreducible.iter().any(|d| d != *c && c.is_subset(d)))
                    .map(|c| c.ones().collect())
                    .collect();
                let from_primes: BTreeSet<Vec<usize>> = if ctx.ring.is_zero_ring() {
                    BTreeSet::new()
                } else {
                    lat.minimal_primes_over(lat.zero_ideal())?
                        .into_iter()
                        .map(|p| ctx.v(p).ones().collect())
                        .collect()
                };
                let comps = space.irreducible_components();
                let computed: BTreeSet<Vec<usize>> =
                    comps.iter().map(|c| c.points.ones().collect()).collect();
                let generic = comps
                    .iter()
                    .all(|c| space.generic_points(c).is_ok_and(|g| !g.is_empty()));
                computed == maximal && computed == from_primes && generic
            }
            Predicate::DisjointUnion => disjoint_decomposition(space)?.verified(),
            Predicate::Connectedness => {
                let full = space.full_set();
                let split = topo.closed_sets().iter().any(|c| {
                    let mut rest = full.clone();
                    rest.difference_with(&c.points);
                    !c.points.is_clear() && !rest.is_clear() && topo.is_closed(&rest)
                });
                space.is_connected() == !split
                    && split == !ctx.ring.nontrivial_idempotents().is_empty()
            }
            Predicate::IdempotentSplit { e } => {
                let e = ctx.element(*e)?;
                if !ctx.ring.is_idempotent(e) || e == 0 || e == ctx.ring.one() {
                    return Ok(true);
                }
                let f = ctx.ring.sub(ctx.ring.one(), e);
                let (ve, vf) = (space.v_q(&[e]).points, space.v_q(&[f]).points);
                !ve.is_clear()
                    && !vf.is_clear()
                    && intersection(&ve, &vf).is_clear()
                    && union(&ve, &vf) == space.full_set()
            }
            Predicate::ChainDimension => {
                let dim = space.chain_dimension()?;
                let closed: Vec<FixedBitSet> = topo
                    .closed_sets()
                    .iter()
                    .map(|c| c.points.clone())
                    .collect();
                let irreducible: Vec<&FixedBitSet> = closed
                    .iter()
                    .filter(|c| irreducible_by_definition(&closed, c))
                    .collect();
                fn longest(from: &FixedBitSet, sets: &[&FixedBitSet]) -> usize {
                    1 + sets
                        .iter()
                        .filter(|s| **s != from && from.is_subset(s))
                        .map(|s| longest(s, sets))
                        .max()
                        .unwrap_or(0)
                }
                let terms = irreducible
                    .iter()
                    .map(|c| longest(c, &irreducible))
                    .max()
                    .unwrap_or(0);
                dim.terms == terms && dim.krull + 1 == dim.terms && dim.terms <= space.len()
            }
            Predicate::Subspace { kind } => {
                let sub = ctx.spectrum(*kind);
                let inclusion: Vec<usize> = sub
                    .points()
                    .iter()
                    .map(|pt| {
                        space
                            .point_of(pt.ideal)
                            .ok_or_else(|| VerifyError::BadArgument("point outside QPrim".into()))
                    })
                    .collect::<Result<_, _>>()?;
                let traces: BTreeSet<Vec<usize>> = topo
                    .closed_sets()
                    .iter()
                    .map(|c| {
                        (0..sub.len())
                            .filter(|&s| c.points.contains(inclusion[s]))
                            .collect()
                    })
                    .collect();
                let native: BTreeSet<Vec<usize>> = sub
                    .topology()
                    .closed_sets()
                    .iter()
                    .map(|c| c.points.ones().collect())
                    .collect();
                traces == native
            }
            Predicate::AssociatedMap { hom } => {
                let hom = build_spec_hom(ctx, hom)?;
                let target = crate::topology::spectrum(hom.target(), SpectrumKind::QPrim)?;
                let map = match AssociatedMap::new(&hom, space, &target) {
                    Ok(m) => m,
                    Err(TopologyError::NotAPoint(_)) => return Ok(false),
                    Err(e) => return Err(e.into()),
                };
                let target_topo = target.topology();
                map.continuity_violation(&hom, space, &target).is_none()
                    && topo
                        .closed_sets()
                        .iter()
                        .all(|c| target_topo.is_closed(&map.preimage(&c.points)))
            }
            Predicate::SheafCover { open, cover } => {
                let di = ctx.direct_image()?;
                let sheaf: &Sheaf = &di.qprim;
                let open = ctx.point_set(open)?;
                let cover = cover
                    .iter()
                    .map(|c| ctx.point_set(c))
                    .collect::<Result<Vec<_>, _>>()?;
                let union_all = cover
                    .iter()
                    .fold(space.empty_set(), |acc, c| union(&acc, c));
                if union_all != open
                    || !topo.is_open(&open)
                    || !cover.iter().all(|c| topo.is_open(c))
                {
                    return Err(VerifyError::BadArgument("not an open cover".into()));
                }
                let check = sheaf.check_cover(&open, &cover);
                check.identity && check.gluing
            }
            Predicate::PresheafLaws => {
                let di = ctx.direct_image()?;
                di.qprim.presheaf_violation().is_none()
            }
            Predicate::Representative { a } => {
                let di = ctx.direct_image()?;
                di.qprim.representative_consistent(ctx.element(*a)?)?
            }
            Predicate::FractionFormula { b, a } => {
                let (b, a) = (ctx.element(*b)?, ctx.element(*a)?);
                if !space.basis_containment(a, b) {
                    return Ok(true);
                }
                let di = ctx.direct_image()?;
                di.qprim.fraction_formula_agrees(b, a)?
            }
            Predicate::Stalk { point } => {
                let di = ctx.direct_image()?;
                stalk_matches_prime(&di.qprim, ctx.point(*point)?)?
            }
            Predicate::DirectImage => ctx.direct_image()?.report()?.holds(),
            Predicate::GlobalSections => {
                let di = ctx.direct_image()?;
                global_sections_iso(&di.qprim)?.is_bijective()
            }
            Predicate::QuasiPrimaryIffPrimary { i } => {
                let i = ctx.ideal(i)?;
                lat.is_quasi_primary(i) == lat.is_primary(i)
            }
            Predicate::LatticeOracle => {
                let mut computed: Vec<Vec<usize>> =
                    lat.ideals().iter().map(Ideal::elements).collect();
                computed.sort();
                computed == ideals_by_subset_filtering(&ctx.ring)
            }
        })
    }
}

fn build_spec_hom(ctx: &RingContext, hom: &HomSpec) -> Result<RingHom, VerifyError> {
    Ok(match hom {
        HomSpec::Identity => RingHom::identity(&ctx.ring),
        HomSpec::Quotient { ideal } => ctx.lattice.get(ctx.ideal(ideal)?).quotient_map().1,
        HomSpec::Localization { elements } => {
            elements
                .iter()
                .try_for_each(|&x| ctx.element(x).map(drop))?;
            localize_multset(&ctx.ring, elements)?.hom().clone()
        }
    })
}

/// Rebuilds the ring and evaluates a counterexample again.
pub fn replay(spec: &RingSpec, predicate: &Predicate) -> Result<bool, VerifyError> {
    predicate.holds(&RingContext::new(0, spec)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Sampling {
    Exhaustive {
        tuples: usize,
    },
    Sampled {
        tuples: usize,
        population: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub ring: RingSpec,
    pub check: &'static str,
    pub status: Status,
    pub anchor: &'static str,
    pub counterexample: Option<Predicate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub cap_exceeded: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampling: Option<Sampling>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub info: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ms: Option<u64>,
}

/// What a check expands into for one ring.
struct Plan {
    predicates: Vec<Predicate>,
    sampling: Option<Sampling>,
    info: Option<Value>,
}

impl Plan {
    fn of(predicates: Vec<Predicate>) -> Self {
        Plan {
            predicates,
            sampling: None,
            info: None,
        }
    }
}

enum Planned {
    Run(Plan),
    NotApplicable(&'static str),
}

type Planner = fn(&RingContext, u64) -> Result<Planned, VerifyError>;

pub struct CheckSpec {
    pub id: &'static str,
    pub anchor: &'static str,
    planner: Planner,
}

pub fn registry() -> &'static [CheckSpec] {
    &REGISTRY
}

static REGISTRY: [CheckSpec; 22] = [
    CheckSpec {
        id: "C01_VQ_IDENTITIES",
        anchor: "I ⊆ J ⇒ V(J) ⊆ V(I); V(I∩J) = V(IJ) = V(I) ∪ V(J); V(I+J+…) = ⋂ V; V(I) = V(√I); V(0) full, V(R) empty",
        planner: plan_c01,
    },
    CheckSpec {
        id: "C02_CLOSED_SET_AXIOMS",
        anchor: "the sets V(I) contain ∅ and the whole space and are closed under finite unions and intersections",
        planner: plan_c02,
    },
    CheckSpec {
        id: "C03_BASIS",
        anchor: "every open set is a union of basic opens U_a; U_a ⊆ U_b ⇔ a ∈ √(b); basic covers have finite subcovers",
        planner: plan_c03,
    },
    CheckSpec {
        id: "C04_BASIC_OPENS",
        anchor: "U_a = U_b ⇔ √(a) = √(b); U_ab = U_a ∩ U_b; U_a = ∅ ⇔ a nilpotent; U_u = whole space for units u",
        planner: plan_c04,
    },
    CheckSpec {
        id: "C05_QUASI_PRIMARY_LEMMA",
        anchor: "prime ⇒ primary ⇒ quasi-primary; a quasi-primary ideal has exactly one minimal prime, its radical",
        planner: plan_c05,
    },
    CheckSpec {
        id: "C06_LOCALIZATION",
        anchor: "contraction from R_S and extension to R_S preserve quasi-primary ideals and identify QPrim(R_S) with U_S",
        planner: plan_c06,
    },
    CheckSpec {
        id: "C07_PRODUCT_QUASI_PRIMARY",
        anchor: "quasi-primary Q1, Q2 with √Q1 ⊆ √Q2 ⇒ Q1Q2 quasi-primary with radical √Q1",
        planner: plan_c07,
    },
    CheckSpec {
        id: "C08_PRODUCT_IN_CLOSED",
        anchor: "quasi-primary Q1 ⊆ Q2 and Q1 ∈ V(I) ⇒ Q1Q2 ∈ V(I)",
        planner: plan_c08,
    },
    CheckSpec {
        id: "C09_CLOSURE",
        anchor: "the closure of a point Q is V(Q)",
        planner: plan_c09,
    },
    CheckSpec {
        id: "C10_IRREDUCIBLE_SPACE",
        anchor: "the space is irreducible ⇔ the nilradical is quasi-primary",
        planner: plan_c10,
    },
    CheckSpec {
        id: "C11_CORRESPONDENCE",
        anchor: "a closed set is irreducible ⇔ it is V(Q) for a point Q",
        planner: plan_c11,
    },
    CheckSpec {
        id: "C12_DECOMPOSE_CLOSED",
        anchor: "V(I) is the irredundant union of V(P) over the minimal primes P over I",
        planner: plan_c12,
    },
    CheckSpec {
        id: "C13_GENERIC_POINTS",
        anchor: "every irreducible closed set has a generic point",
        planner: plan_c13,
    },
    CheckSpec {
        id: "C14_COMPONENTS",
        anchor: "irreducible components are V(P) for the minimal primes P of R",
        planner: plan_c14,
    },
    CheckSpec {
        id: "C15_PRODUCT_DECOMPOSITION",
        anchor: "QPrim of a finite product splits into clopen blocks homeomorphic to QPrim of the factors",
        planner: plan_c15,
    },
    CheckSpec {
        id: "C16_CONNECTEDNESS",
        anchor: "the space is disconnected ⇔ R has an idempotent other than 0 and 1",
        planner: plan_c16,
    },
    CheckSpec {
        id: "C17_DIMENSION_SUBSPACE",
        anchor: "chains of irreducible closed sets are finite; Spec and Prim carry the subspace topology",
        planner: plan_c17,
    },
    CheckSpec {
        id: "C18_ASSOCIATED_MAP",
        anchor: "Q ↦ φ⁻¹(Q) maps quasi-primary ideals to quasi-primary ideals and is continuous",
        planner: plan_c18,
    },
    CheckSpec {
        id: "C19_SHEAF",
        anchor: "U_a ↦ R_a extends to a sheaf of rings whose stalk at Q is local and isomorphic to R localized at √Q",
        planner: plan_c19,
    },
    CheckSpec {
        id: "C20_DIRECT_IMAGE",
        anchor: "F(U) ≅ O(ι⁻¹U) naturally for the inclusion ι of Spec; global sections are R",
        planner: plan_c20,
    },
    CheckSpec {
        id: "C21_QUASI_PRIMARY_IFF_PRIMARY",
        anchor: "in a finite ring an ideal is quasi-primary ⇔ it is primary",
        planner: plan_c21,
    },
    CheckSpec {
        id: "C22_LATTICE_ORACLE",
        anchor: "the ideal lattice equals the set of subsets satisfying the ideal axioms",
        planner: plan_c22,
    },
];

fn all_ideal_elements(ctx: &RingContext) -> Vec<Vec<usize>> {
    (0..ctx.lattice.len()).map(|i| ctx.elements(i)).collect()
}

/// `arity`-tuples over `0..n`: all of them when the lattice is small,
/// otherwise a seeded sample of [`SAMPLED_TUPLES`] distinct tuples.
fn tuples(ctx: &RingContext, n: usize, arity: u32, seed: u64) -> (Vec<Vec<usize>>, Sampling) {
    let population = n.pow(arity);
    let decode = |mut code: usize| {
        let mut t = Vec::with_capacity(arity as usize);
        for _ in 0..arity {
            t.push(code % n);
            code /= n;
        }
        t.reverse();
        t
    };
    if ctx.lattice.len() <= EXHAUSTIVE_LATTICE_SIZE || population <= SAMPLED_TUPLES {
        (
            (0..population).map(decode).collect(),
            Sampling::Exhaustive { tuples: population },
        )
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut codes = sample(&mut rng, population, SAMPLED_TUPLES).into_vec();
        codes.sort_unstable();
        (
            codes.into_iter().map(decode).collect(),
            Sampling::Sampled {
                tuples: SAMPLED_TUPLES,
                population,
                seed,
            },
        )
    }
}

fn plan_c01(ctx: &RingContext, seed: u64) -> Result<Planned, VerifyError> {
    let ideals = all_ideal_elements(ctx);
    let n = ideals.len();
    let (pairs, sampling) = tuples(ctx, n, 2, seed);
    let (triples, _) = tuples(ctx, n, 3, seed ^ 0x3);
    let mut preds = vec![Predicate::VqExtremes];
    preds.extend(ideals.iter().map(|i| Predicate::VqRadical { i: i.clone() }));
    for t in &pairs {
        let (i, j) = (ideals[t[0]].clone(), ideals[t[1]].clone());
        preds.push(Predicate::VqAntitone {
            i: i.clone(),
            j: j.clone(),
        });
        preds.push(Predicate::VqUnionIntersection {
            i: i.clone(),
            j: j.clone(),
        });
        preds.push(Predicate::RadicalProduct {
            i: i.clone(),
            j: j.clone(),
        });
        preds.push(Predicate::VqSum { ideals: vec![i, j] });
    }
    for t in &triples {
        preds.push(Predicate::VqSum {
            ideals: t.iter().map(|&k| ideals[k].clone()).collect(),
        });
    }
    Ok(Planned::Run(Plan {
        predicates: preds,
        sampling: Some(sampling),
        info: None,
    }))
}

fn plan_c02(ctx: &RingContext, seed: u64) -> Result<Planned, VerifyError> {
    let ideals = all_ideal_elements(ctx);
    let (pairs, sampling) = tuples(ctx, ideals.len(), 2, seed);
    let mut preds = vec![Predicate::ClosedExtremes];
    preds.extend(pairs.iter().map(|t| Predicate::ClosedPair {
        i: ideals[t[0]].clone(),
        j: ideals[t[1]].clone(),
    }));
    Ok(Planned::Run(Plan {
        predicates: preds,
        sampling: Some(sampling),
        info: Some(json!({ "closed_sets": ctx.qprim.topology().len() })),
    }))
}

fn plan_c03(ctx: &RingContext, _seed: u64) -> Result<Planned, VerifyError> {
    let mut preds: Vec<Predicate> = ctx
        .qprim
        .topology()
        .closed_sets()
        .iter()
        .map(|c| Predicate::OpenIsBasicUnion {
            complement_of: ctx.elements(c.witness),
        })
        .collect();
    for a in ctx.ring.elements() {
        preds.push(Predicate::FiniteSubcover { a });
        preds.extend(
            ctx.ring
                .elements()
                .map(|b| Predicate::BasisContainment { a, b }),
        );
    }
    Ok(Planned::Run(Plan::of(preds)))
}

fn plan_c04(ctx: &RingContext, _seed: u64) -> Result<Planned, VerifyError> {
    let mut preds = Vec::new();
    for a in ctx.ring.elements() {
        preds.push(Predicate::BasicOpenSingle { a });
        preds.extend(
            ctx.ring
                .elements()
                .map(|b| Predicate::BasicOpenPair { a, b }),
        );
    }
    Ok(Planned::Run(Plan::of(preds)))
}

fn plan_c05(ctx: &RingContext, _seed: u64) -> Result<Planned, VerifyError> {
    let mut preds = Vec::new();
    for i in all_ideal_elements(ctx) {
        preds.push(Predicate::PrimeChain { i: i.clone() });
        preds.push(Predicate::UniqueMinimalPrime { i });
    }
    Ok(Planned::Run(Plan::of(preds)))
}

/// Least element of each distinct basic open.
fn basic_representatives(ctx: &RingContext) -> Vec<usize> {
    let mut seen = BTreeSet::new();
    ctx.ring
        .elements()
        .filter(|&a| seen.insert(ctx.qprim.basic_open(a).points.ones().collect::<Vec<_>>()))
        .collect()
}

fn plan_c06(ctx: &RingContext, _seed: u64) -> Result<Planned, VerifyError> {
    let mut preds = Vec::new();
    for a in ctx.ring.elements() {
        preds.push(Predicate::LocalizationSubspace { s: vec![a] });
        preds.push(Predicate::LocalizationAgreement { a });
    }
    for p in ctx.lattice.primes() {
        let complement: Vec<usize> = ctx.lattice.get(p).members().zeroes().collect();
        preds.push(Predicate::LocalizationSubspace { s: complement });
    }
    let reps = basic_representatives(ctx);
    for &a in &reps {
        for &b in &reps {
            preds.push(Predicate::UniversalProperty {
                s: vec![a],
                t: vec![b],
            });
        }
    }
    Ok(Planned::Run(Plan::of(preds)))
}

type IdealPair = (Vec<usize>, Vec<usize>);

fn point_pairs(ctx: &RingContext, seed: u64) -> (Vec<IdealPair>, Sampling) {
    let pts: Vec<Vec<usize>> = (0..ctx.qprim.len())
        .map(|p| ctx.qprim.point_ideal(p).elements())
        .collect();
    let (pairs, sampling) = tuples(ctx, pts.len(), 2, seed);
    (
        pairs
            .into_iter()
            .map(|t| (pts[t[0]].clone(), pts[t[1]].clone()))
            .collect(),
        sampling,
    )
}

fn plan_c07(ctx: &RingContext, seed: u64) -> Result<Planned, VerifyError> {
    let (pairs, sampling) = point_pairs(ctx, seed);
    Ok(Planned::Run(Plan {
        predicates: pairs
            .into_iter()
            .map(|(q1, q2)| Predicate::ProductQuasiPrimary { q1, q2 })
            .collect(),
        sampling: Some(sampling),
        info: None,
    }))
}

fn plan_c08(ctx: &RingContext, seed: u64) -> Result<Planned, VerifyError> {
    let pts: Vec<Vec<usize>> = (0..ctx.qprim.len())
        .map(|p| ctx.qprim.point_ideal(p).elements())
        .collect();
    let ideals = all_ideal_elements(ctx);
    let (pairs, _) = tuples(ctx, pts.len(), 2, seed);
    let mut preds = Vec::new();
    for t in &pairs {
        for i in &ideals {
            preds.push(Predicate::ProductInClosed {
                q1: pts[t[0]].clone(),
                q2: pts[t[1]].clone(),
                i: i.clone(),
            });
        }
    }
    let count = preds.len();
    let sampling = if ctx.lattice.len() <= EXHAUSTIVE_LATTICE_SIZE || count <= SAMPLED_TUPLES {
        Sampling::Exhaustive { tuples: count }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut keep = sample(&mut rng, count, SAMPLED_TUPLES).into_vec();
        keep.sort_unstable();
        preds = keep.into_iter().map(|k| preds[k].clone()).collect();
        Sampling::Sampled {
            tuples: SAMPLED_TUPLES,
            population: count,
            seed,
        }
    };
    Ok(Planned::Run(Plan {
        predicates: preds,
        sampling: Some(sampling),
        info: None,
    }))
}

fn plan_c09(ctx: &RingContext, _seed: u64) -> Result<Planned, VerifyError> {
    let space = &ctx.qprim;
    let table: Vec<Value> = (0..space.len())
        .map(|p| {
            let closure: Vec<Vec<usize>> = space
                .closure(p)
                .points
                .ones()
                .map(|q| space.point_ideal(q).elements())
                .collect();
            json!({ "point": space.point_ideal(p).elements(), "closure": closure })
        })
        .collect();
    Ok(Planned::Run(Plan {
        predicates: (0..space.len())
            .map(|point| Predicate::Closure { point })
            .collect(),
        sampling: None,
        info: Some(json!({ "closures": table })),
    }))
}

fn plan_c10(ctx: &RingContext, _seed: u64) -> Result<Planned, VerifyError> {
    Ok(Planned::Run(Plan {
        predicates: vec![Predicate::IrreducibleSpace],
        sampling: None,
        info: Some(json!({ "irreducible": ctx.qprim.is_space_irreducible() })),
    }))
}

fn closed_witnesses(ctx: &RingContext) -> Vec<Vec<usize>> {
    ctx.qprim
        .topology()
        .closed_sets()
        .iter()
        .map(|c| ctx.elements(c.witness))
        .collect()
}

fn plan_c11(ctx: &RingContext, _seed: u64) -> Result<Planned, VerifyError> {
    Ok(Planned::Run(Plan::of(
        closed_witnesses(ctx)
            .into_iter()
            .map(|i| Predicate::Correspondence { i })
            .collect(),
    )))
}

fn plan_c12(ctx: &RingContext, _seed: u64) -> Result<Planned, VerifyError> {
    Ok(Planned::Run(Plan::of(
        all_ideal_elements(ctx)
            .into_iter()
            .map(|i| Predicate::Decompose { i })
            .collect(),
    )))
}

fn plan_c13(ctx: &RingContext, _seed: u64) -> Result<Planned, VerifyError> {
    Ok(Planned::Run(Plan::of(
        closed_witnesses(ctx)
            .into_iter()
            .map(|i| Predicate::GenericPoints { i })
            .collect(),
    )))
}

fn plan_c14(ctx: &RingContext, _seed: u64) -> Result<Planned, VerifyError> {
    Ok(Planned::Run(Plan {
        predicates: vec![Predicate::Components],
        sampling: None,
        info: Some(json!({ "components": ctx.qprim.irreducible_components().len() })),
    }))
}

fn plan_c15(ctx: &RingContext, _seed: u64) -> Result<Planned, VerifyError> {
    if ctx.ring.factors().is_empty() {
        return Ok(Planned::NotApplicable(
            "ring is not given by a product spec",
        ));
    }
    let d = disjoint_decomposition(&ctx.qprim)?;
    let note = if d.matches_product {
        "point count also equals the product of the factor counts"
    } else {
        "point count differs from the product of the factor counts; the disjoint-union reading is the one verified"
    };
    Ok(Planned::Run(Plan {
        predicates: vec![Predicate::DisjointUnion],
        sampling: None,
        info: Some(json!({
            "total_points": d.total_points,
            "factor_counts": d.factor_counts,
            "disjoint_union_count": d.disjoint_union_count,
            "product_count": d.product_count,
            "matches_product": d.matches_product,
            "note": note,
        })),
    }))
}

fn plan_c16(ctx: &RingContext, _seed: u64) -> Result<Planned, VerifyError> {
    let mut preds = vec![Predicate::Connectedness];
    preds.extend(
        ctx.ring
            .nontrivial_idempotents()
            .into_iter()
            .map(|e| Predicate::IdempotentSplit { e }),
    );
    Ok(Planned::Run(Plan {
        predicates: preds,
        sampling: None,
        info: Some(json!({
            "connected": ctx.qprim.is_connected(),
            "interpretation": "disconnected means a partition into two disjoint nonempty closed sets; R ≅ R1 × R2 with both factors nonzero",
        })),
    }))
}

fn plan_c17(ctx: &RingContext, _seed: u64) -> Result<Planned, VerifyError> {
    let mut preds = vec![
        Predicate::Subspace {
            kind: SpectrumKind::Spec,
        },
        Predicate::Subspace {
            kind: SpectrumKind::Prim,
        },
    ];
    let info = match ctx.qprim.chain_dimension() {
        Ok(d) => {
            preds.insert(0, Predicate::ChainDimension);
            json!({ "terms": d.terms, "krull": d.krull })
        }
        Err(_) => json!({ "note": "empty spectrum has no chains" }),
    };
    Ok(Planned::Run(Plan {
        predicates: preds,
        sampling: None,
        info: Some(info),
    }))
}

fn plan_c18(ctx: &RingContext, _seed: u64) -> Result<Planned, VerifyError> {
    let mut preds = vec![Predicate::AssociatedMap {
        hom: HomSpec::Identity,
    }];
    preds.extend(
        all_ideal_elements(ctx)
            .into_iter()
            .map(|ideal| Predicate::AssociatedMap {
                hom: HomSpec::Quotient { ideal },
            }),
    );
    preds.extend(
        basic_representatives(ctx)
            .into_iter()
            .map(|a| Predicate::AssociatedMap {
                hom: HomSpec::Localization { elements: vec![a] },
            }),
    );
    Ok(Planned::Run(Plan::of(preds)))
}

fn plan_c19(ctx: &RingContext, _seed: u64) -> Result<Planned, VerifyError> {
    let di = ctx.direct_image()?;
    let sheaf: &Sheaf = &di.qprim;
    let space = &ctx.qprim;
    let mut preds = vec![Predicate::PresheafLaws];
    let mut covers = 0;
    let mut truncated = Vec::new();
    for open in space.topology().open_sets() {
        let (cs, cut) = sheaf.covers_of(&open.points, DEFAULT_COVER_CANDIDATES_LOG2);
        let open_points: Vec<usize> = open.points.ones().collect();
        if cut {
            truncated.push(open_points.clone());
        }
        for cover in cs {
            covers += 1;
            preds.push(Predicate::SheafCover {
                open: open_points.clone(),
                cover: cover.iter().map(|c| c.ones().collect()).collect(),
            });
        }
    }
    preds.extend(ctx.ring.elements().map(|a| Predicate::Representative { a }));
    let reps: Vec<usize> = sheaf.reps().iter().map(|r| r.element).collect();
    for &b in &reps {
        for &a in &reps {
            preds.push(Predicate::FractionFormula { b, a });
        }
    }
    preds.extend((0..space.len()).map(|point| Predicate::Stalk { point }));
    Ok(Planned::Run(Plan {
        predicates: preds,
        sampling: None,
        info: Some(json!({
            "basic_representatives": reps,
            "covers": covers,
            "truncated_opens": truncated,
        })),
    }))
}

fn plan_c20(ctx: &RingContext, _seed: u64) -> Result<Planned, VerifyError> {
    let report = ctx.direct_image()?.report()?;
    Ok(Planned::Run(Plan {
        predicates: vec![Predicate::DirectImage, Predicate::GlobalSections],
        sampling: None,
        info: Some(serde_json::to_value(report).expect("report serializes")),
    }))
}

fn plan_c21(ctx: &RingContext, _seed: u64) -> Result<Planned, VerifyError> {
    Ok(Planned::Run(Plan::of(
        all_ideal_elements(ctx)
            .into_iter()
            .map(|i| Predicate::QuasiPrimaryIffPrimary { i })
            .collect(),
    )))
}

fn plan_c22(ctx: &RingContext, _seed: u64) -> Result<Planned, VerifyError> {
    if ctx.ring.order() > ORACLE_MAX_ORDER {
        return Ok(Planned::NotApplicable(
            "order above the subset-filtering limit",
        ));
    }
    Ok(Planned::Run(Plan {
        predicates: vec![Predicate::LatticeOracle],
        sampling: None,
        info: Some(json!({ "ideals": ctx.lattice.len() })),
    }))
}

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Check-id prefixes to run; empty runs everything.
    pub filter: Vec<String>,
    pub timings: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: DEFAULT_SEED,
            filter: Vec::new(),
            timings: false,
        }
    }
}

impl SuiteOptions {
    fn selects(&self, id: &str) -> bool {
        self.filter.is_empty()
            || self.filter.iter().any(|f| {
                id.to_ascii_uppercase()
                    .starts_with(&f.trim().to_ascii_uppercase())
            })
    }
}

fn skipped(spec: &RingSpec, check: &CheckSpec, reason: String, cap: bool) -> Verdict {
    Verdict {
        ring: spec.clone(),
        check: check.id,
        status: Status::Skipped,
        anchor: check.anchor,
        counterexample: None,
        reason: Some(reason),
        cap_exceeded: cap,
        sampling: None,
        info: None,
        ms: None,
    }
}

fn run_check(ctx: &RingContext, number: usize, check: &CheckSpec, opts: &SuiteOptions) -> Verdict {
    let start = Instant::now();
    let seed = opts.seed ^ ((ctx.index as u64) << 32) ^ number as u64;
    let mut verdict = match evaluate(ctx, check, seed) {
        Ok(v) => v,
        Err(e) if e.is_cap() => skipped(&ctx.spec, check, format!("cap exceeded: {e}"), true),
        Err(e) => Verdict {
            ring: ctx.spec.clone(),
            check: check.id,
            status: Status::Fail,
            anchor: check.anchor,
            counterexample: None,
            reason: Some(format!("planning failed: {e}")),
            cap_exceeded: false,
            sampling: None,
            info: None,
            ms: None,
        },
    };
    if opts.timings {
        verdict.ms = Some(start.elapsed().as_millis() as u64);
    }
    verdict
}

fn evaluate(ctx: &RingContext, check: &CheckSpec, seed: u64) -> Result<Verdict, VerifyError> {
    let plan = match (check.planner)(ctx, seed)? {
        Planned::Run(plan) => plan,
        Planned::NotApplicable(why) => {
            return Ok(skipped(
                &ctx.spec,
                check,
                format!("not applicable: {why}"),
                false,
            ))
        }
    };
    let mut failure = None;
    for p in &plan.predicates {
        match p.holds(ctx) {
            Ok(true) => {}
            Ok(false) => {
                failure = Some((p.clone(), None));
                break;
            }
            Err(e) if e.is_cap() => return Err(e),
            Err(e) => {
                failure = Some((p.clone(), Some(e.to_string())));
                break;
            }
        }
    }
    let status = if failure.is_some() {
        Status::Fail
    } else {
        Status::Pass
    };
    let (counterexample, reason) = match failure {
        Some((p, err)) => (Some(p), err),
        None => (None, None),
    };
    Ok(Verdict {
        ring: ctx.spec.clone(),
        check: check.id,
        status,
        anchor: check.anchor,
        counterexample,
        reason,
        cap_exceeded: false,
        sampling: plan.sampling,
        info: plan.info,
        ms: None,
    })
}

/// Runs the selected checks over the corpus. Verdicts are ordered by
/// (corpus index, check id) whatever the scheduling.
pub fn run_suite(corpus: &[RingSpec], opts: &SuiteOptions) -> Result<Vec<Verdict>, VerifyError> {
    let checks: Vec<(usize, &CheckSpec)> = registry()
        .iter()
        .enumerate()
        .filter(|(_, c)| opts.selects(c.id))
        .collect();
    let contexts: Vec<Result<RingContext, VerifyError>> = corpus
        .par_iter()
        .enumerate()
        .map(|(i, spec)| RingContext::new(i, spec))
        .collect();
    let mut cells = Vec::new();
    for (ctx, spec) in contexts.iter().zip(corpus) {
        match ctx {
            Ok(ctx) => cells.extend(checks.iter().map(|&(n, c)| (Ok(ctx), spec, n, c))),
            Err(e) if e.is_cap() => {
                cells.extend(checks.iter().map(|&(n, c)| (Err(e.clone()), spec, n, c)))
            }
            Err(e) => return Err(e.clone()),
        }
    }
    Ok(cells
        .into_par_iter()
        .map(|(ctx, spec, n, check)| match ctx {
            Ok(ctx) => run_check(ctx, n, check, opts),
            Err(e) => skipped(spec, check, format!("cap exceeded: {e}"), true),
        })
        .collect())
}

pub fn report_json(verdicts: &[Verdict]) -> String {
    let mut s = serde_json::to_string_pretty(verdicts).expect("verdicts serialize");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
    pub capped: usize,
}

pub fn summarize(verdicts: &[Verdict]) -> Summary {
    let mut s = Summary {
        pass: 0,
        fail: 0,
        skipped: 0,
        capped: 0,
    };
    for v in verdicts {
        match v.status {
            Status::Pass => s.pass += 1,
            Status::Fail => s.fail += 1,
            Status::Skipped => s.skipped += 1,
        }
        s.capped += v.cap_exceeded as usize;
    }
    s
}
