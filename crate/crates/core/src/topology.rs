//! Spec, Prim and QPrim of a finite ring with the Zariski-style topology
//! whose closed sets are `V(I) = {Q : I ⊆ √Q}`.
//!
//! Point subsets are bitsets over the point list of a [`Spectrum`]. Closed
//! and open sets carry a witness ideal (an index into the ideal lattice).

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ideal::{
    all_ideals_with_cap, preimage_ideal, IdealError, IdealLattice, DEFAULT_IDEAL_CAP,
};
use crate::ideal::{generate, Ideal};
use crate::ring::{FiniteRing, RingHom};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TopologyError {
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error("closed set is not irreducible")]
    NotIrreducible,
    #[error("spectrum is empty")]
    EmptySpectrum,
    #[error("ring was not built from a product spec")]
    NotAProductSpec,
    #[error("spectra belong to rings that do not match the homomorphism")]
    MismatchedSpectra,
    #[error("ideal {0} is not a point of this spectrum")]
    NotAPoint(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumKind {
    Spec,
    Prim,
    QPrim,
}

impl fmt::Display for SpectrumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpectrumKind::Spec => "Spec",
            SpectrumKind::Prim => "Prim",
            SpectrumKind::QPrim => "QPrim",
        })
    }
}

impl FromStr for SpectrumKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "spec" => Ok(SpectrumKind::Spec),
            "prim" => Ok(SpectrumKind::Prim),
            "qprim" => Ok(SpectrumKind::QPrim),
            other => Err(format!(
                "unknown spectrum kind `{other}` (expected spec, prim or qprim)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpectrumPoint {
    /// Lattice index of the ideal `Q`.
    pub ideal: usize,
    /// Lattice index of `√Q`.
    pub radical: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClosedSet {
    pub points: FixedBitSet,
    /// Lattice index of an ideal `I` with `points = V(I)`.
    pub witness: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OpenSet {
    pub points: FixedBitSet,
    /// Lattice index of `I` with `points` the complement of `V(I)`.
    pub complement_witness: usize,
    /// `a` when this set was built as `U_a`.
    pub basic: Option<usize>,
}

/// All distinct closed sets of a spectrum, first witness kept in lattice order.
#[derive(Debug, Clone)]
pub struct TopologyLattice {
    closed: Vec<ClosedSet>,
    index: HashMap<FixedBitSet, usize>,
}

impl TopologyLattice {
    pub fn closed_sets(&self) -> &[ClosedSet] {
        &self.closed
    }

    pub fn len(&self) -> usize {
        self.closed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.closed.is_empty()
    }

    pub fn find(&self, points: &FixedBitSet) -> Option<&ClosedSet> {
        self.index.get(points).map(|&i| &self.closed[i])
    }

    pub fn is_closed(&self, points: &FixedBitSet) -> bool {
        self.index.contains_key(points)
    }

    /// Complements of the closed sets, in the same order.
    pub fn open_sets(&self) -> Vec<OpenSet> {
        self.closed
            .iter()
            .map(|c| {
                let mut points = c.points.clone();
                points.toggle_range(..);
                OpenSet {
                    points,
                    complement_witness: c.witness,
                    basic: None,
                }
            })
            .collect()
    }

    pub fn is_open(&self, points: &FixedBitSet) -> bool {
        let mut complement = points.clone();
        complement.toggle_range(..);
        self.is_closed(&complement)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChainDimension {
    /// Number of sets in a longest strictly increasing chain of irreducible
    /// closed sets.
    pub terms: usize,
    /// `terms - 1`.
    pub krull: usize,
}

/// The point set of one kind of spectrum together with its topology.
pub struct Spectrum {
    kind: SpectrumKind,
    lattice: Arc<IdealLattice>,
    points: Vec<SpectrumPoint>,
    by_ideal: HashMap<usize, usize>,
    topology: OnceLock<TopologyLattice>,
}

impl fmt::Debug for Spectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pts: Vec<String> = (0..self.len())
            .map(|p| self.point_ideal(p).to_string())
            .collect();
        write!(
            f,
            "{}({}) = [{}]",
            self.kind,
            self.ring().label(),
            pts.join("; ")
        )
    }
}

pub fn spectrum(ring: &Arc<FiniteRing>, kind: SpectrumKind) -> Result<Spectrum, TopologyError> {
    let lattice = Arc::new(all_ideals_with_cap(ring, DEFAULT_IDEAL_CAP)?);
    Ok(Spectrum::new(lattice, kind))
}

impl Spectrum {
    pub fn new(lattice: Arc<IdealLattice>, kind: SpectrumKind) -> Self {
        let qualifies = |i: usize| match kind {
            SpectrumKind::Spec => lattice.is_prime(i),
            SpectrumKind::Prim => lattice.is_primary(i),
            SpectrumKind::QPrim => lattice.is_quasi_primary(i),
        };
        let points: Vec<SpectrumPoint> = (0..lattice.len())
            .filter(|&i| qualifies(i))
            .map(|i| SpectrumPoint {
                ideal: i,
                radical: lattice.radical(i),
            })
            .collect();
        let by_ideal = points
            .iter()
            .enumerate()
            .map(|(p, pt)| (pt.ideal, p))
            .collect();
        Spectrum {
            kind,
            lattice,
            points,
            by_ideal,
            topology: OnceLock::new(),
        }
    }

    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn lattice(&self) -> &Arc<IdealLattice> {
        &self.lattice
    }

    pub fn ring(&self) -> &Arc<FiniteRing> {
        self.lattice.ring()
    }

    pub fn points(&self) -> &[SpectrumPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point_ideal(&self, p: usize) -> &Ideal {
        self.lattice.get(self.points[p].ideal)
    }

    pub fn point_radical(&self, p: usize) -> &Ideal {
        self.lattice.get(self.points[p].radical)
    }

    /// Point index of the ideal with lattice index `ideal`, if it is a point.
    pub fn point_of(&self, ideal: usize) -> Option<usize> {
        self.by_ideal.get(&ideal).copied()
    }

    pub fn empty_set(&self) -> FixedBitSet {
        FixedBitSet::with_capacity(self.len())
    }

    pub fn full_set(&self) -> FixedBitSet {
        let mut s = self.empty_set();
        s.insert_range(..);
        s
    }

    pub fn singleton(&self, p: usize) -> FixedBitSet {
        let mut s = self.empty_set();
        s.insert(p);
        s
    }

    /// `V(I)` for the lattice ideal `i`.
    pub fn v_ideal(&self, i: usize) -> ClosedSet {
        let mut points = self.empty_set();
        for (p, pt) in self.points.iter().enumerate() {
            if self.lattice.is_subset(i, pt.radical) {
                points.insert(p);
            }
        }
        ClosedSet { points, witness: i }
    }

    /// `V(S)` for an element set, witnessed by the ideal `(S)`.
    pub fn v_q(&self, elements: &[usize]) -> ClosedSet {
        self.v_ideal(self.lattice.generated(elements))
    }

    /// `U_a`, the complement of `V(a)`.
    pub fn basic_open(&self, a: usize) -> OpenSet {
        let closed = self.v_q(&[a]);
        let mut points = closed.points;
        points.toggle_range(..);
        OpenSet {
            points,
            complement_witness: closed.witness,
            basic: Some(a),
        }
    }

    pub fn topology(&self) -> &TopologyLattice {
        self.topology.get_or_init(|| {
            let mut closed = Vec::new();
            let mut index = HashMap::new();
            for i in 0..self.lattice.len() {
                let c = self.v_ideal(i);
                if !index.contains_key(&c.points) {
                    index.insert(c.points.clone(), closed.len());
                    closed.push(c);
                }
            }
            TopologyLattice { closed, index }
        })
    }

    pub fn closure(&self, p: usize) -> ClosedSet {
        self.v_ideal(self.points[p].ideal)
    }

    /// Closure as the intersection of every closed set containing the point.
    pub fn closure_by_intersection(&self, p: usize) -> FixedBitSet {
        let mut acc = self.full_set();
        for c in self.topology().closed_sets() {
            if c.points.contains(p) {
                acc.intersect_with(&c.points);
            }
        }
        acc
    }

    /// Whether `U_a ⊆ U_b`, decided as `a ∈ √(b)`.
    pub fn basis_containment(&self, a: usize, b: usize) -> bool {
        basis_containment(self.ring(), a, b)
    }

    fn closed_proper_subsets(&self, points: &FixedBitSet) -> Vec<&ClosedSet> {
        self.topology()
            .closed_sets()
            .iter()
            .filter(|c| c.points.is_subset(points) && c.points != *points)
            .collect()
    }

    /// Nonempty and not the union of two proper closed subsets.
    pub fn is_irreducible(&self, points: &FixedBitSet) -> bool {
        if points.is_clear() {
            return false;
        }
        let proper = self.closed_proper_subsets(points);
        for (i, a) in proper.iter().enumerate() {
            for b in &proper[i..] {
                let mut union = a.points.clone();
                union.union_with(&b.points);
                if union == *points {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_space_irreducible(&self) -> bool {
        self.is_irreducible(&self.full_set())
    }

    pub fn irreducible_closed_sets(&self) -> Vec<&ClosedSet> {
        self.topology()
            .closed_sets()
            .iter()
            .filter(|c| self.is_irreducible(&c.points))
            .collect()
    }

    /// Maximal irreducible closed sets, in topology-lattice order.
    pub fn irreducible_components(&self) -> Vec<ClosedSet> {
        let irreducible = self.irreducible_closed_sets();
        irreducible
            .iter()
            .filter(|c| {
                !irreducible
                    .iter()
                    .any(|d| d.points != c.points && c.points.is_subset(&d.points))
            })
            .map(|c| (*c).clone())
            .collect()
    }

    /// Points whose closure is exactly `closed`.
    pub fn generic_points(&self, closed: &ClosedSet) -> Result<Vec<usize>, TopologyError> {
        if !self.is_irreducible(&closed.points) {
            return Err(TopologyError::NotIrreducible);
        }
        Ok(closed
            .points
            .ones()
            .filter(|&p| self.closure(p).points == closed.points)
            .collect())
    }

    /// `V(I) = V(P_1) ∪ … ∪ V(P_n)` over the minimal primes of the witness,
    /// with redundant members dropped.
    pub fn decompose_closed(&self, closed: &ClosedSet) -> Vec<ClosedSet> {
        let primes = match self.lattice.minimal_primes_over(closed.witness) {
            Ok(p) => p,
            Err(_) => return Vec::new(),
        };
        let parts: Vec<ClosedSet> = primes.into_iter().map(|p| self.v_ideal(p)).collect();
        let mut kept: Vec<ClosedSet> = Vec::new();
        for (i, c) in parts.iter().enumerate() {
            let redundant = parts.iter().enumerate().any(|(j, d)| {
                j != i && c.points.is_subset(&d.points) && (c.points != d.points || j < i)
            });
            if !redundant && !c.points.is_clear() {
                kept.push(c.clone());
            }
        }
        kept
    }

    /// No partition into two disjoint nonempty closed sets.
    pub fn is_connected(&self) -> bool {
        let full = self.full_set();
        let topo = self.topology();
        !topo.closed_sets().iter().any(|c| {
            if c.points.is_clear() || c.points == full {
                return false;
            }
            let mut rest = c.points.clone();
            rest.toggle_range(..);
            topo.is_closed(&rest)
        })
    }

    pub fn chain_dimension(&self) -> Result<ChainDimension, TopologyError> {
        if self.is_empty() {
            return Err(TopologyError::EmptySpectrum);
        }
        let mut irreducible = self.irreducible_closed_sets();
        irreducible.sort_by_key(|c| c.points.count_ones(..));
        let mut longest = vec![1usize; irreducible.len()];
        for i in 0..irreducible.len() {
            for j in 0..i {
                let (small, big) = (&irreducible[j].points, &irreducible[i].points);
                if small != big && small.is_subset(big) {
                    longest[i] = longest[i].max(longest[j] + 1);
                }
            }
        }
        let terms = longest.into_iter().max().unwrap_or(0);
        Ok(ChainDimension {
            terms,
            krull: terms.saturating_sub(1),
        })
    }

    /// Specialization edges `(p, q)` with `q` in the closure of `p`, `p != q`.
    pub fn specialization_edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for p in 0..self.len() {
            for q in self.closure(p).points.ones() {
                if p != q {
                    edges.push((p, q));
                }
            }
        }
        edges
    }
}

pub fn basis_containment(ring: &Arc<FiniteRing>, a: usize, b: usize) -> bool {
    generate(ring, &[b]).radical().contains(a)
}

/// `Q ↦ φ⁻¹(Q)` from the target spectrum of `φ` to its source spectrum.
#[derive(Debug, Clone)]
pub struct AssociatedMap {
    /// Source-spectrum point index for each target-spectrum point.
    pub map: Vec<usize>,
}

impl AssociatedMap {
    pub fn new(hom: &RingHom, source: &Spectrum, target: &Spectrum) -> Result<Self, TopologyError> {
        if hom.source().id() != source.ring().id() || hom.target().id() != target.ring().id() {
            return Err(TopologyError::MismatchedSpectra);
        }
        let map = (0..target.len())
            .map(|p| {
                let pre = preimage_ideal(hom, target.point_ideal(p));
                source
                    .lattice()
                    .index_of(&pre)
                    .and_then(|i| source.point_of(i))
                    .ok_or_else(|| TopologyError::NotAPoint(pre.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(AssociatedMap { map })
    }

    pub fn preimage(&self, source_points: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.map.len());
        for (q, &p) in self.map.iter().enumerate() {
            if source_points.contains(p) {
                out.insert(q);
            }
        }
        out
    }

    /// Lattice index (source ring) of the first ideal `A` whose closed set
    /// violates `(φ^a)⁻¹(V(A)) = V(φ(A))`, if any.
    pub fn continuity_violation(
        &self,
        hom: &RingHom,
        source: &Spectrum,
        target: &Spectrum,
    ) -> Option<usize> {
        (0..source.lattice().len()).find(|&a| {
            let pulled = self.preimage(&source.v_ideal(a).points);
            let image: Vec<usize> = source
                .lattice()
                .get(a)
                .members()
                .ones()
                .map(|x| hom.apply(x))
                .collect();
            pulled != target.v_q(&image).points
        })
    }
}

/// Partition of QPrim of a product ring into one block per factor.
#[derive(Debug, Clone, Serialize)]
pub struct ProductDecomposition {
    /// Point indices of the product spectrum, one block per factor.
    pub blocks: Vec<Vec<usize>>,
    pub factor_counts: Vec<usize>,
    pub total_points: usize,
    pub disjoint_union_count: usize,
    pub product_count: usize,
    pub matches_disjoint_union: bool,
    pub matches_product: bool,
    pub blocks_clopen: bool,
    pub blocks_homeomorphic: bool,
}

impl ProductDecomposition {
    pub fn verified(&self) -> bool {
        self.matches_disjoint_union && self.blocks_clopen && self.blocks_homeomorphic
    }
}

/// Splits `space` (over a ring built from a product spec) into blocks
/// `R_1 × ⋯ × Q_i × ⋯ × R_n` and checks each block against the factor's own
/// spectrum of the same kind.
pub fn disjoint_decomposition(space: &Spectrum) -> Result<ProductDecomposition, TopologyError> {
    let ring = space.ring();
    let factors = ring.factors();
    if factors.is_empty() {
        return Err(TopologyError::NotAProductSpec);
    }
    let factor_spaces = factors
        .iter()
        .map(|f| spectrum(f, space.kind()))
        .collect::<Result<Vec<_>, _>>()?;

    let mut blocks = vec![Vec::new(); factors.len()];
    // factor-point index for every product point, per block
    let mut block_maps: Vec<Vec<usize>> = vec![Vec::new(); factors.len()];
    let mut well_formed = true;
    for p in 0..space.len() {
        let ideal = space.point_ideal(p);
        let mut projections: Vec<Vec<usize>> = vec![Vec::new(); factors.len()];
        for x in ideal.members().ones() {
            for (k, c) in ring.components(x).into_iter().enumerate() {
                projections[k].push(c);
            }
        }
        let projected: Vec<Ideal> = projections
            .iter()
            .zip(factors)
            .map(|(els, f)| {
                let mut els = els.clone();
                els.sort_unstable();
                els.dedup();
                Ideal::from_elements(f, &els)
            })
            .collect::<Result<_, _>>()?;
        let expected: usize = projected.iter().map(Ideal::len).product();
        let proper: Vec<usize> = (0..factors.len())
            .filter(|&k| projected[k].is_proper())
            .collect();
        if expected != ideal.len() || proper.len() != 1 {
            well_formed = false;
            continue;
        }
        let k = proper[0];
        let fp = factor_spaces[k]
            .lattice()
            .index_of(&projected[k])
            .and_then(|i| factor_spaces[k].point_of(i));
        match fp {
            Some(fp) => {
                blocks[k].push(p);
                block_maps[k].push(fp);
            }
            None => well_formed = false,
        }
    }

    let topo = space.topology();
    let mut blocks_clopen = well_formed;
    let mut blocks_homeomorphic = well_formed;
    for (k, block) in blocks.iter().enumerate() {
        let mut bits = space.empty_set();
        block.iter().for_each(|&p| bits.insert(p));
        if !(topo.is_closed(&bits) && topo.is_open(&bits)) {
            blocks_clopen = false;
        }
        let fs = &factor_spaces[k];
        let mut image = block_maps[k].clone();
        image.sort_unstable();
        image.dedup();
        if image.len() != block.len() || image.len() != fs.len() {
            blocks_homeomorphic = false;
            continue;
        }
        // closed sets of the block's subspace topology, carried to the factor
        let mut carried: Vec<FixedBitSet> = topo
            .closed_sets()
            .iter()
            .map(|c| {
                let mut out = fs.empty_set();
                for (pos, &p) in block.iter().enumerate() {
                    if c.points.contains(p) {
                        out.insert(block_maps[k][pos]);
                    }
                }
                out
            })
            .collect();
        let mut native: Vec<FixedBitSet> = fs
            .topology()
            .closed_sets()
            .iter()
            .map(|c| c.points.clone())
            .collect();
        let key = |s: &FixedBitSet| s.ones().collect::<Vec<_>>();
        carried.sort_by_key(key);
        carried.dedup();
        native.sort_by_key(key);
        if carried != native {
            blocks_homeomorphic = false;
        }
    }
    let factor_counts: Vec<usize> = factor_spaces.iter().map(Spectrum::len).collect();
    let disjoint_union_count = factor_counts.iter().sum();
    let product_count = factor_counts.iter().product();
    Ok(ProductDecomposition {
        total_points: space.len(),
        matches_disjoint_union: space.len() == disjoint_union_count,
        matches_product: space.len() == product_count,
        blocks,
        factor_counts,
        disjoint_union_count,
        product_count,
        blocks_clopen,
        blocks_homeomorphic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{build_hom, build_ring, RingSpec};

    fn qprim(spec: RingSpec) -> Spectrum {
        spectrum(&build_ring(&spec).unwrap(), SpectrumKind::QPrim).unwrap()
    }

    fn point_lists(s: &Spectrum, bits: &FixedBitSet) -> Vec<Vec<usize>> {
        bits.ones().map(|p| s.point_ideal(p).elements()).collect()
    }

    const TWO: [usize; 6] = [0, 2, 4, 6, 8, 10];

    #[test]
    fn spectra_of_z12() {
        let r = build_ring(&RingSpec::zmod(12)).unwrap();
        let q = spectrum(&r, SpectrumKind::QPrim).unwrap();
        assert_eq!(
            point_lists(&q, &q.full_set()),
            vec![TWO.to_vec(), vec![0, 3, 6, 9], vec![0, 4, 8]]
        );
        let s = spectrum(&r, SpectrumKind::Spec).unwrap();
        assert_eq!(
            point_lists(&s, &s.full_set()),
            vec![TWO.to_vec(), vec![0, 3, 6, 9]]
        );
        let f = qprim(RingSpec::zmod(5));
        assert_eq!(point_lists(&f, &f.full_set()), vec![vec![0]]);
        assert!(qprim(RingSpec::zmod(1)).is_empty());
    }

    #[test]
    fn closed_and_basic_open_sets() {
        let q = qprim(RingSpec::zmod(12));
        assert_eq!(
            point_lists(&q, &q.v_q(&[2]).points),
            vec![TWO.to_vec(), vec![0, 4, 8]]
        );
        assert_eq!(q.v_q(&[0]).points, q.full_set());
        assert!(q.v_q(&(0..12).collect::<Vec<_>>()).points.is_clear());
        assert_eq!(
            point_lists(&q, &q.basic_open(2).points),
            vec![vec![0, 3, 6, 9]]
        );
        assert!(q.basic_open(0).points.is_clear());
        assert_eq!(q.basic_open(1).points, q.full_set());
        assert_eq!(q.basic_open(5).points, q.full_set());
    }

    #[test]
    fn topology_lattice_sizes() {
        let q = qprim(RingSpec::zmod(12));
        let sets: Vec<Vec<Vec<usize>>> = q
            .topology()
            .closed_sets()
            .iter()
            .map(|c| point_lists(&q, &c.points))
            .collect();
        assert_eq!(sets.len(), 4);
        assert!(sets.contains(&vec![]));
        assert!(sets.contains(&vec![vec![0, 3, 6, 9]]));
        assert!(sets.contains(&vec![TWO.to_vec(), vec![0, 4, 8]]));
        assert_eq!(qprim(RingSpec::zmod(7)).topology().len(), 2);
        let z4 = qprim(RingSpec::zmod(4));
        assert_eq!(z4.len(), 2);
        assert_eq!(z4.topology().len(), 2);
    }

    #[test]
    fn closures_are_not_t0() {
        let q = qprim(RingSpec::zmod(12));
        // points: 0 = (2), 1 = (3), 2 = (4)
        assert_eq!(q.closure(2).points, q.closure(0).points);
        assert_eq!(
            point_lists(&q, &q.closure(2).points),
            vec![TWO.to_vec(), vec![0, 4, 8]]
        );
        for p in 0..q.len() {
            assert_eq!(q.closure(p).points, q.closure_by_intersection(p));
        }
    }

    #[test]
    fn basis_containment_examples() {
        let q = qprim(RingSpec::zmod(12));
        assert!(q.basis_containment(4, 2));
        assert_eq!(q.basic_open(4).points, q.basic_open(2).points);
        assert!(q.basis_containment(7, 7));
        assert!(!q.basis_containment(3, 2));
    }

    #[test]
    fn irreducibility_and_components() {
        let q = qprim(RingSpec::zmod(12));
        assert!(!q.is_space_irreducible());
        assert!(qprim(RingSpec::zmod(4)).is_space_irreducible());
        assert!(q.is_irreducible(&q.singleton(1)));
        let comps: Vec<Vec<Vec<usize>>> = q
            .irreducible_components()
            .iter()
            .map(|c| point_lists(&q, &c.points))
            .collect();
        assert_eq!(comps.len(), 2);
        assert!(comps.contains(&vec![TWO.to_vec(), vec![0, 4, 8]]));
        assert!(comps.contains(&vec![vec![0, 3, 6, 9]]));
        let v4 = qprim(RingSpec::product(vec![
            RingSpec::zmod(2),
            RingSpec::zmod(2),
        ]));
        let comps = v4.irreducible_components();
        assert_eq!(comps.len(), 2);
        assert!(comps.iter().all(|c| c.points.count_ones(..) == 1));
    }

    #[test]
    fn generic_points_are_not_unique() {
        let q = qprim(RingSpec::zmod(12));
        let c = q.v_q(&[2]);
        assert_eq!(q.generic_points(&c).unwrap(), vec![0, 2]);
        assert_eq!(q.generic_points(&q.v_q(&[3])).unwrap(), vec![1]);
        assert_eq!(
            q.generic_points(&q.v_q(&[0])),
            Err(TopologyError::NotIrreducible)
        );
    }

    #[test]
    fn decompositions() {
        let q = qprim(RingSpec::zmod(12));
        let parts = q.decompose_closed(&q.v_q(&[0]));
        assert_eq!(
            parts.iter().map(|c| c.points.clone()).collect::<Vec<_>>(),
            vec![q.v_q(&[2]).points, q.v_q(&[3]).points]
        );
        let p = q.v_q(&[3]);
        assert_eq!(q.decompose_closed(&p), vec![p.clone()]);
        let six = q.decompose_closed(&q.v_q(&[6]));
        assert_eq!(six.len(), 2);
        let mut union = q.empty_set();
        six.iter().for_each(|c| union.union_with(&c.points));
        assert_eq!(union, q.full_set());
    }

    #[test]
    fn connectedness() {
        assert!(!qprim(RingSpec::zmod(12)).is_connected());
        assert!(qprim(RingSpec::zmod(4)).is_connected());
        assert!(qprim(RingSpec::zmod(3)).is_connected());
    }

    #[test]
    fn chain_dimensions() {
        let one = ChainDimension { terms: 1, krull: 0 };
        assert_eq!(qprim(RingSpec::zmod(12)).chain_dimension().unwrap(), one);
        assert_eq!(qprim(RingSpec::zmod(4)).chain_dimension().unwrap(), one);
        assert_eq!(qprim(RingSpec::zmod(2)).chain_dimension().unwrap(), one);
        assert_eq!(
            qprim(RingSpec::zmod(1)).chain_dimension(),
            Err(TopologyError::EmptySpectrum)
        );
    }

    #[test]
    fn associated_map_of_reduction() {
        let r12 = build_ring(&RingSpec::zmod(12)).unwrap();
        let r4 = build_ring(&RingSpec::zmod(4)).unwrap();
        let hom = build_hom(&r12, &r4, (0..12).map(|x| x % 4).collect()).unwrap();
        let src = spectrum(&r12, SpectrumKind::QPrim).unwrap();
        let tgt = spectrum(&r4, SpectrumKind::QPrim).unwrap();
        let map = AssociatedMap::new(&hom, &src, &tgt).unwrap();
        // target points: (0) and (2)
        assert_eq!(tgt.point_ideal(0).elements(), vec![0]);
        assert_eq!(src.point_ideal(map.map[0]).elements(), vec![0, 4, 8]);
        assert_eq!(src.point_ideal(map.map[1]).elements(), TWO.to_vec());
        assert_eq!(map.continuity_violation(&hom, &src, &tgt), None);

        let id = RingHom::identity(&r12);
        let idmap = AssociatedMap::new(&id, &src, &src).unwrap();
        assert_eq!(idmap.map, vec![0, 1, 2]);
    }

    #[test]
    fn product_decompositions() {
        let v4 = qprim(RingSpec::product(vec![
            RingSpec::zmod(2),
            RingSpec::zmod(2),
        ]));
        let d = disjoint_decomposition(&v4).unwrap();
        assert_eq!(d.total_points, 2);
        assert_eq!(d.disjoint_union_count, 2);
        assert_eq!(d.product_count, 1);
        assert!(d.verified() && !d.matches_product);

        let z4z3 = qprim(RingSpec::product(vec![
            RingSpec::zmod(4),
            RingSpec::zmod(3),
        ]));
        let d = disjoint_decomposition(&z4z3).unwrap();
        assert_eq!((d.total_points, d.factor_counts.clone()), (3, vec![2, 1]));
        assert!(d.verified());

        let single = qprim(RingSpec::product(vec![RingSpec::zmod(9)]));
        let d = disjoint_decomposition(&single).unwrap();
        assert_eq!(d.blocks, vec![vec![0, 1]]);
        assert!(d.verified() && d.matches_product);

        let plain = qprim(RingSpec::zmod(12));
        assert_eq!(
            disjoint_decomposition(&plain).unwrap_err(),
            TopologyError::NotAProductSpec
        );
    }
}
