//! Finite commutative rings with identity, stored as explicit operation tables.
//!
//! Every ring carries a canonical element indexing: index 0 is always the
//! additive identity. `Z/n` uses the residue as index, products use a
//! mixed-radix pairing with the first factor most significant, and
//! polynomial quotients use the base-`n` digits of the coefficient vector
//! (constant term least significant).

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest ring order accepted unless a caller raises it.
pub const DEFAULT_ORDER_CAP: usize = 512;

/// Rings up to this order have their axioms checked on every triple.
pub const EXHAUSTIVE_AXIOM_ORDER: usize = 64;

/// Number of random triples checked for rings above [`EXHAUSTIVE_AXIOM_ORDER`].
pub const SAMPLED_AXIOM_TRIPLES: usize = 10_000;

static NEXT_RING_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("ring order {order} exceeds the configured cap {cap}")]
    OrderCapExceeded { order: u128, cap: usize },
    #[error("table is not commutative: {a}*{b} != {b}*{a}")]
    TableNotCommutative { a: usize, b: usize },
    #[error("table has no multiplicative identity")]
    TableNoIdentity,
    #[error("table violates {axiom} at ({a}, {b}, {c})")]
    TableNotRing {
        axiom: &'static str,
        a: usize,
        b: usize,
        c: usize,
    },
    #[error("leading coefficient {leading} of the modulus is not a unit mod {n}")]
    BadModulus { leading: i64, n: usize },
    #[error("malformed ring spec: {0}")]
    InvalidSpec(String),
    #[error("elements belong to different rings")]
    MixedRings,
    #[error("map is not a ring homomorphism (witness {a}, {b})")]
    NotAHom { a: usize, b: usize },
}

/// Declarative description of a finite ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RingSpec {
    Zmod {
        #[serde(alias = "p")]
        n: usize,
    },
    Product {
        factors: Vec<RingSpec>,
    },
    PolyQuotient {
        base: Box<RingSpec>,
        /// Coefficients from the constant term upward.
        modulus: Vec<i64>,
    },
    Table {
        order: usize,
        add: Vec<Vec<usize>>,
        mul: Vec<Vec<usize>>,
    },
}

impl RingSpec {
    pub fn zmod(n: usize) -> Self {
        RingSpec::Zmod { n }
    }

    pub fn product(factors: Vec<RingSpec>) -> Self {
        RingSpec::Product { factors }
    }

    pub fn poly_quotient(n: usize, modulus: Vec<i64>) -> Self {
        RingSpec::PolyQuotient {
            base: Box::new(RingSpec::zmod(n)),
            modulus,
        }
    }

    /// Order of the ring this spec describes, without building it.
    pub fn order(&self) -> Result<u128, RingError> {
        match self {
            RingSpec::Zmod { n } => Ok(*n as u128),
            RingSpec::Product { factors } => factors
                .iter()
                .try_fold(1u128, |acc, f| Ok(acc.saturating_mul(f.order()?))),
            RingSpec::PolyQuotient { base, modulus } => {
                let n = base.order()?;
                let degree = modulus.len().saturating_sub(1) as u32;
                Ok(n.checked_pow(degree).unwrap_or(u128::MAX))
            }
            RingSpec::Table { order, .. } => Ok(*order as u128),
        }
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingSpec::Zmod { n } => write!(f, "Z/{n}"),
            RingSpec::Product { factors } => {
                for (i, factor) in factors.iter().enumerate() {
                    if i > 0 {
                        write!(f, " x ")?;
                    }
                    if matches!(factor, RingSpec::Product { .. }) {
                        write!(f, "({factor})")?;
                    } else {
                        write!(f, "{factor}")?;
                    }
                }
                Ok(())
            }
            RingSpec::PolyQuotient { base, modulus } => {
                let mut terms = Vec::new();
                for (deg, &c) in modulus.iter().enumerate().rev() {
                    if c == 0 {
                        continue;
                    }
                    let coeff = if c == 1 && deg > 0 {
                        String::new()
                    } else {
                        c.to_string()
                    };
                    terms.push(match deg {
                        0 => c.to_string(),
                        1 => format!("{coeff}x"),
                        _ => format!("{coeff}x^{deg}"),
                    });
                }
                write!(f, "{base}[x]/({})", terms.join("+"))
            }
            RingSpec::Table { order, .. } => write!(f, "table({order})"),
        }
    }
}

/// A finite commutative ring with identity.
#[derive(Clone)]
pub struct FiniteRing {
    id: u64,
    order: usize,
    one: usize,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    spec: Option<RingSpec>,
    label: String,
    factors: Vec<Arc<FiniteRing>>,
}

impl fmt::Debug for FiniteRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteRing")
            .field("label", &self.label)
            .field("order", &self.order)
            .field("one", &self.one)
            .finish()
    }
}

pub fn build_ring(spec: &RingSpec) -> Result<Arc<FiniteRing>, RingError> {
    build_ring_with_cap(spec, DEFAULT_ORDER_CAP)
}

pub fn build_ring_with_cap(spec: &RingSpec, cap: usize) -> Result<Arc<FiniteRing>, RingError> {
    let order = spec.order()?;
    if order > cap as u128 {
        return Err(RingError::OrderCapExceeded { order, cap });
    }
    let mut ring = match spec {
        RingSpec::Zmod { n } => zmod(*n)?,
        RingSpec::Product { factors } => {
            if factors.is_empty() {
                return Err(RingError::InvalidSpec(
                    "product needs at least one factor".into(),
                ));
            }
            let built = factors
                .iter()
                .map(|f| build_ring_with_cap(f, cap))
                .collect::<Result<Vec<_>, _>>()?;
            FiniteRing::direct_product(&built, spec.to_string())
        }
        RingSpec::PolyQuotient { base, modulus } => poly_quotient(base, modulus)?,
        RingSpec::Table { order, add, mul } => table(*order, add, mul)?,
    };
    ring.spec = Some(spec.clone());
    ring.label = spec.to_string();
    Ok(Arc::new(ring))
}

fn zmod(n: usize) -> Result<FiniteRing, RingError> {
    if n == 0 {
        return Err(RingError::InvalidSpec("Z/n needs n >= 1".into()));
    }
    let mut add = Vec::with_capacity(n * n);
    let mut mul = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            add.push(((a + b) % n) as u32);
            mul.push(((a * b) % n) as u32);
        }
    }
    Ok(FiniteRing::from_tables(
        n,
        add,
        mul,
        1 % n,
        format!("Z/{n}"),
    ))
}

fn poly_quotient(base: &RingSpec, modulus: &[i64]) -> Result<FiniteRing, RingError> {
    let n = match base {
        RingSpec::Zmod { n } if *n >= 1 => *n,
        _ => {
            return Err(RingError::InvalidSpec(
                "polynomial quotient base must be Z/n with n >= 1".into(),
            ))
        }
    };
    if modulus.len() < 2 {
        return Err(RingError::InvalidSpec(
            "modulus must have degree >= 1".into(),
        ));
    }
    let ni = n as i64;
    let reduced: Vec<usize> = modulus.iter().map(|c| c.rem_euclid(ni) as usize).collect();
    let degree = reduced.len() - 1;
    let leading = reduced[degree];
    let inv_leading =
        (0..n)
            .find(|&x| (x * leading) % n == 1 % n)
            .ok_or(RingError::BadModulus {
                leading: modulus[degree],
                n,
            })?;
    // monic form: x^d = -sum_{j<d} m_j x^j
    let monic: Vec<usize> = reduced[..degree]
        .iter()
        .map(|&c| (c * inv_leading) % n)
        .collect();
    let order = n.pow(degree as u32);

    let digits = |mut idx: usize| -> Vec<usize> {
        let mut out = vec![0; degree];
        for slot in out.iter_mut() {
            *slot = idx % n;
            idx /= n;
        }
        out
    };
    let encode = |coeffs: &[usize]| -> usize { coeffs.iter().rev().fold(0, |acc, &c| acc * n + c) };
    let all: Vec<Vec<usize>> = (0..order).map(digits).collect();

    let mut add = Vec::with_capacity(order * order);
    let mut mul = Vec::with_capacity(order * order);
    let mut prod = vec![0usize; 2 * degree - 1];
    for a in &all {
        for b in &all {
            let sum: Vec<usize> = a.iter().zip(b).map(|(x, y)| (x + y) % n).collect();
            add.push(encode(&sum) as u32);

            prod.iter_mut().for_each(|c| *c = 0);
            for (i, x) in a.iter().enumerate() {
                for (j, y) in b.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + x * y) % n;
                }
            }
            for k in (degree..prod.len()).rev() {
                let c = prod[k];
                if c == 0 {
                    continue;
                }
                prod[k] = 0;
                for (j, m) in monic.iter().enumerate() {
                    let idx = k - degree + j;
                    prod[idx] = (prod[idx] + n - (c * m) % n) % n;
                }
            }
            mul.push(encode(&prod[..degree]) as u32);
        }
    }
    let one = encode(&{
        let mut v = vec![0; degree];
        v[0] = 1 % n;
        v
    });
    Ok(FiniteRing::from_tables(
        order,
        add,
        mul,
        one,
        base.to_string(),
    ))
}

fn table(order: usize, add: &[Vec<usize>], mul: &[Vec<usize>]) -> Result<FiniteRing, RingError> {
    if order == 0 {
        return Err(RingError::InvalidSpec("table order must be >= 1".into()));
    }
    let shape_ok = |m: &[Vec<usize>]| {
        m.len() == order
            && m.iter()
                .all(|row| row.len() == order && row.iter().all(|&x| x < order))
    };
    if !shape_ok(add) || !shape_ok(mul) {
        return Err(RingError::InvalidSpec(format!(
            "add and mul must be {order}x{order} matrices of indices below {order}"
        )));
    }
    let flat = |m: &[Vec<usize>]| m.iter().flatten().map(|&x| x as u32).collect::<Vec<_>>();
    let (add, mul) = (flat(add), flat(mul));
    let at = |t: &[u32], a: usize, b: usize| t[a * order + b] as usize;

    for a in 0..order {
        if at(&add, 0, a) != a || at(&add, a, 0) != a {
            return Err(RingError::TableNotRing {
                axiom: "additive identity at index 0",
                a,
                b: 0,
                c: 0,
            });
        }
        if !(0..order).any(|b| at(&add, a, b) == 0) {
            return Err(RingError::TableNotRing {
                axiom: "additive inverse",
                a,
                b: 0,
                c: 0,
            });
        }
        for b in 0..order {
            if at(&mul, a, b) != at(&mul, b, a) {
                return Err(RingError::TableNotCommutative { a, b });
            }
            if at(&add, a, b) != at(&add, b, a) {
                return Err(RingError::TableNotRing {
                    axiom: "additive commutativity",
                    a,
                    b,
                    c: 0,
                });
            }
        }
    }
    let one = (0..order)
        .find(|&u| (0..order).all(|x| at(&mul, u, x) == x))
        .ok_or(RingError::TableNoIdentity)?;
    let ring = FiniteRing::from_tables(order, add, mul, one, format!("table({order})"));
    ring.check_triples(0..order * order * order)?;
    Ok(ring)
}

impl FiniteRing {
    /// Builds a ring from flattened row-major tables. The tables are trusted;
    /// callers outside this module go through [`build_ring`] or verify with
    /// [`FiniteRing::verify_axioms`].
    pub(crate) fn from_tables(
        order: usize,
        add: Vec<u32>,
        mul: Vec<u32>,
        one: usize,
        label: String,
    ) -> Self {
        let mut neg = vec![0u32; order];
        for a in 0..order {
            for b in 0..order {
                if add[a * order + b] == 0 {
                    neg[a] = b as u32;
                    break;
                }
            }
        }
        FiniteRing {
            id: NEXT_RING_ID.fetch_add(1, Ordering::Relaxed),
            order,
            one,
            add,
            mul,
            neg,
            spec: None,
            label,
            factors: Vec::new(),
        }
    }

    /// Direct product with lexicographic (first factor most significant) indexing.
    pub fn direct_product(factors: &[Arc<FiniteRing>], label: String) -> FiniteRing {
        let orders: Vec<usize> = factors.iter().map(|f| f.order).collect();
        let order: usize = orders.iter().product();
        let decompose = |mut idx: usize| -> Vec<usize> {
            let mut out = vec![0; orders.len()];
            for (slot, &n) in out.iter_mut().zip(&orders).rev() {
                *slot = idx % n;
                idx /= n;
            }
            out
        };
        let compose = |parts: &[usize]| {
            parts
                .iter()
                .zip(&orders)
                .fold(0, |acc, (&p, &n)| acc * n + p)
        };
        let all: Vec<Vec<usize>> = (0..order).map(decompose).collect();
        let mut add = Vec::with_capacity(order * order);
        let mut mul = Vec::with_capacity(order * order);
        let mut buf = vec![0; factors.len()];
        for a in &all {
            for b in &all {
                for (k, f) in factors.iter().enumerate() {
                    buf[k] = f.add(a[k], b[k]);
                }
                add.push(compose(&buf) as u32);
                for (k, f) in factors.iter().enumerate() {
                    buf[k] = f.mul(a[k], b[k]);
                }
                mul.push(compose(&buf) as u32);
            }
        }
        let one = compose(&factors.iter().map(|f| f.one).collect::<Vec<_>>());
        let mut ring = FiniteRing::from_tables(order, add, mul, one, label);
        ring.factors = factors.to_vec();
        ring
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn one(&self) -> usize {
        self.one
    }

    pub fn zero(&self) -> usize {
        0
    }

    pub fn is_zero_ring(&self) -> bool {
        self.order == 1
    }

    pub fn spec(&self) -> Option<&RingSpec> {
        self.spec.as_ref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub(crate) fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Factor rings when this ring was built from a product spec.
    pub fn factors(&self) -> &[Arc<FiniteRing>] {
        &self.factors
    }

    /// Splits an element of a product ring into its factor components.
    pub fn components(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (slot, f) in out.iter_mut().zip(&self.factors).rev() {
            *slot = idx % f.order;
            idx /= f.order;
        }
        out
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.order + b] as usize
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b] as usize
    }

    #[inline]
    pub fn neg(&self, a: usize) -> usize {
        self.neg[a] as usize
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    pub fn pow(&self, a: usize, mut k: u64) -> usize {
        let mut base = a;
        let mut acc = self.one;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    /// `k * a` for a non-negative integer `k`.
    pub fn scale(&self, a: usize, k: usize) -> usize {
        (0..k).fold(0, |acc, _| self.add(acc, a))
    }

    pub fn element(&self, index: usize) -> Option<RingElement<'_>> {
        (index < self.order).then_some(RingElement { ring: self, index })
    }

    pub fn inverse(&self, a: usize) -> Option<usize> {
        self.elements().find(|&b| self.mul(a, b) == self.one)
    }

    pub fn is_unit(&self, a: usize) -> bool {
        self.inverse(a).is_some()
    }

    pub fn is_idempotent(&self, a: usize) -> bool {
        self.mul(a, a) == a
    }

    pub fn is_nilpotent(&self, a: usize) -> bool {
        let mut x = a;
        for _ in 0..=self.order {
            if x == 0 {
                return true;
            }
            x = self.mul(x, a);
        }
        false
    }

    pub fn is_zero_divisor(&self, a: usize) -> bool {
        self.elements().any(|b| b != 0 && self.mul(a, b) == 0)
    }

    pub fn classify_element(&self, a: usize) -> ElementClass {
        ElementClass {
            is_unit: self.is_unit(a),
            is_nilpotent: self.is_nilpotent(a),
            is_idempotent: self.is_idempotent(a),
            is_zero_divisor: self.is_zero_divisor(a),
        }
    }

    pub fn units(&self) -> Vec<usize> {
        self.elements().filter(|&a| self.is_unit(a)).collect()
    }

    pub fn idempotents(&self) -> Vec<usize> {
        self.elements().filter(|&a| self.is_idempotent(a)).collect()
    }

    pub fn nilpotents(&self) -> Vec<usize> {
        self.elements().filter(|&a| self.is_nilpotent(a)).collect()
    }

    /// Idempotents other than 0 and 1.
    pub fn nontrivial_idempotents(&self) -> Vec<usize> {
        self.elements()
            .filter(|&a| a != 0 && a != self.one && self.is_idempotent(a))
            .collect()
    }

    /// Smallest `k >= 1` with `a^k` idempotent, together with that power.
    pub fn idempotent_power(&self, a: usize) -> (usize, u64) {
        let mut x = a;
        let mut k = 1u64;
        loop {
            if self.is_idempotent(x) {
                return (x, k);
            }
            x = self.mul(x, a);
            k += 1;
            // the power sequence is eventually periodic, so some power of
            // exponent at most the order is idempotent
            debug_assert!(k <= 2 * self.order as u64 + 2);
        }
    }

    pub fn additive_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.add(x, a);
            k += 1;
        }
        k
    }

    pub fn characteristic(&self) -> usize {
        self.additive_order(self.one)
    }

    /// Checks ring axioms exhaustively for small rings and on a seeded sample
    /// of triples otherwise.
    pub fn verify_axioms(&self) -> Result<(), RingError> {
        let n = self.order;
        if n <= EXHAUSTIVE_AXIOM_ORDER {
            return self.check_triples(0..n * n * n);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 ^ n as u64);
        let cube = n * n * n;
        let sample: Vec<usize> = (0..SAMPLED_AXIOM_TRIPLES)
            .map(|_| rng.gen_range(0..cube))
            .collect();
        self.check_triples(sample)
    }

    fn check_triples(&self, triples: impl IntoIterator<Item = usize>) -> Result<(), RingError> {
        let n = self.order;
        for t in triples {
            let (a, b, c) = (t / (n * n), (t / n) % n, t % n);
            let fail = |axiom| RingError::TableNotRing { axiom, a, b, c };
            if self.mul(a, b) != self.mul(b, a) {
                return Err(RingError::TableNotCommutative { a, b });
            }
            if self.add(a, b) != self.add(b, a) {
                return Err(fail("additive commutativity"));
            }
            if self.add(self.add(a, b), c) != self.add(a, self.add(b, c)) {
                return Err(fail("additive associativity"));
            }
            if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                return Err(fail("multiplicative associativity"));
            }
            if self.mul(a, self.add(b, c)) != self.add(self.mul(a, b), self.mul(a, c)) {
                return Err(fail("distributivity"));
            }
        }
        for a in self.elements() {
            if self.mul(self.one, a) != a {
                return Err(RingError::TableNoIdentity);
            }
            if self.add(a, self.neg(a)) != 0 || self.add(0, a) != a {
                return Err(RingError::TableNotRing {
                    axiom: "additive inverse",
                    a,
                    b: 0,
                    c: 0,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ElementClass {
    pub is_unit: bool,
    pub is_nilpotent: bool,
    pub is_idempotent: bool,
    pub is_zero_divisor: bool,
}

/// An element tied to its ring; arithmetic across rings is rejected.
#[derive(Clone, Copy)]
pub struct RingElement<'r> {
    ring: &'r FiniteRing,
    index: usize,
}

impl fmt::Debug for RingElement<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.index, self.ring.label)
    }
}

impl PartialEq for RingElement<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.ring.id == other.ring.id && self.index == other.index
    }
}

impl Eq for RingElement<'_> {}

impl<'r> RingElement<'r> {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn ring(&self) -> &'r FiniteRing {
        self.ring
    }

    fn same_ring(&self, other: &Self) -> Result<(), RingError> {
        if self.ring.id == other.ring.id {
            Ok(())
        } else {
            Err(RingError::MixedRings)
        }
    }

    fn wrap(&self, index: usize) -> Self {
        RingElement {
            ring: self.ring,
            index,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, RingError> {
        self.same_ring(other)?;
        Ok(self.wrap(self.ring.add(self.index, other.index)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, RingError> {
        self.same_ring(other)?;
        Ok(self.wrap(self.ring.mul(self.index, other.index)))
    }

    pub fn neg(&self) -> Self {
        self.wrap(self.ring.neg(self.index))
    }

    pub fn pow(&self, k: u64) -> Self {
        self.wrap(self.ring.pow(self.index, k))
    }

    pub fn classify(&self) -> ElementClass {
        self.ring.classify_element(self.index)
    }

    pub fn idempotent_power(&self) -> (Self, u64) {
        let (e, k) = self.ring.idempotent_power(self.index);
        (self.wrap(e), k)
    }
}

/// A verified ring homomorphism between two finite rings.
#[derive(Clone)]
pub struct RingHom {
    source: Arc<FiniteRing>,
    target: Arc<FiniteRing>,
    map: Vec<usize>,
}

impl fmt::Debug for RingHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "RingHom({} -> {}, {:?})",
            self.source.label, self.target.label, self.map
        )
    }
}

impl RingHom {
    /// Verifies that `map` preserves 0, 1, addition and multiplication.
    pub fn new(
        source: Arc<FiniteRing>,
        target: Arc<FiniteRing>,
        map: Vec<usize>,
    ) -> Result<Self, RingError> {
        if map.len() != source.order() || map.iter().any(|&x| x >= target.order()) {
            return Err(RingError::InvalidSpec(format!(
                "hom map must send {} elements into 0..{}",
                source.order(),
                target.order()
            )));
        }
        if map[0] != 0 {
            return Err(RingError::NotAHom { a: 0, b: 0 });
        }
        if map[source.one()] != target.one() {
            return Err(RingError::NotAHom {
                a: source.one(),
                b: source.one(),
            });
        }
        for a in source.elements() {
            for b in source.elements() {
                if map[source.add(a, b)] != target.add(map[a], map[b])
                    || map[source.mul(a, b)] != target.mul(map[a], map[b])
                {
                    return Err(RingError::NotAHom { a, b });
                }
            }
        }
        Ok(RingHom {
            source,
            target,
            map,
        })
    }

    pub(crate) fn new_unchecked(
        source: Arc<FiniteRing>,
        target: Arc<FiniteRing>,
        map: Vec<usize>,
    ) -> Self {
        RingHom {
            source,
            target,
            map,
        }
    }

    pub fn identity(ring: &Arc<FiniteRing>) -> Self {
        RingHom {
            source: ring.clone(),
            target: ring.clone(),
            map: ring.elements().collect(),
        }
    }

    pub fn source(&self) -> &Arc<FiniteRing> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteRing> {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    #[inline]
    pub fn apply(&self, a: usize) -> usize {
        self.map[a]
    }

    pub fn kernel(&self) -> Vec<usize> {
        self.source
            .elements()
            .filter(|&a| self.map[a] == 0)
            .collect()
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.target.order()];
        self.map
            .iter()
            .all(|&y| !std::mem::replace(&mut seen[y], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.target.order()];
        for &y in &self.map {
            seen[y] = true;
        }
        seen.into_iter().all(|s| s)
    }

    pub fn is_bijective(&self) -> bool {
        self.source.order() == self.target.order() && self.is_injective()
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &RingHom) -> Result<RingHom, RingError> {
        if self.target.id() != other.source.id() {
            return Err(RingError::MixedRings);
        }
        Ok(RingHom {
            source: self.source.clone(),
            target: other.target.clone(),
            map: self.map.iter().map(|&x| other.map[x]).collect(),
        })
    }

    pub fn inverse(&self) -> Option<RingHom> {
        if !self.is_bijective() {
            return None;
        }
        let mut inv = vec![0; self.map.len()];
        for (x, &y) in self.map.iter().enumerate() {
            inv[y] = x;
        }
        Some(RingHom {
            source: self.target.clone(),
            target: self.source.clone(),
            map: inv,
        })
    }
}

pub fn build_hom(
    source: &Arc<FiniteRing>,
    target: &Arc<FiniteRing>,
    map: Vec<usize>,
) -> Result<RingHom, RingError> {
    RingHom::new(source.clone(), target.clone(), map)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(spec: RingSpec) -> Arc<FiniteRing> {
        build_ring(&spec).unwrap()
    }

    #[test]
    fn zmod_12_basics() {
        let r = ring(RingSpec::zmod(12));
        assert_eq!(r.order(), 12);
        assert_eq!(r.one(), 1);
        assert_eq!(r.mul(4, 4), 4);
        assert_eq!(r.add(7, r.neg(7)), 0);
        assert_eq!(r.pow(5, 0), 1);
    }

    #[test]
    fn zero_ring_has_identity_zero() {
        let r = ring(RingSpec::zmod(1));
        assert_eq!(r.order(), 1);
        assert_eq!(r.one(), 0);
        assert!(r.verify_axioms().is_ok());
    }

    #[test]
    fn product_of_two_fields_has_two_nontrivial_idempotents() {
        let r = ring(RingSpec::product(vec![
            RingSpec::zmod(2),
            RingSpec::zmod(2),
        ]));
        assert_eq!(r.order(), 4);
        // oracle: scan all four elements for e^2 = e
        let idem: Vec<usize> = (0..4).filter(|&e| r.mul(e, e) == e).collect();
        assert_eq!(idem.len(), 4);
        assert_eq!(r.nontrivial_idempotents().len(), 2);
        assert_eq!(r.one(), 3);
        assert_eq!(r.components(2), vec![1, 0]);
    }

    #[test]
    fn dual_numbers_over_f2() {
        let r = ring(RingSpec::poly_quotient(2, vec![0, 0, 1]));
        assert_eq!(r.order(), 4);
        // index 2 is the coefficient vector (0, 1), i.e. x
        assert_eq!(r.mul(2, 2), 0);
        assert_eq!(r.pow(2, 2), 0);
        assert_eq!(r.one(), 1);
    }

    #[test]
    fn f4_as_quotient_is_a_field() {
        let r = ring(RingSpec::poly_quotient(2, vec![1, 1, 1]));
        assert_eq!(r.units().len(), 3);
        r.verify_axioms().unwrap();
    }

    #[test]
    fn non_monic_modulus_with_unit_leading_coefficient() {
        // 2x^2 + 1 over Z/3: leading 2 is a unit
        let r = ring(RingSpec::poly_quotient(3, vec![1, 0, 2]));
        assert_eq!(r.order(), 9);
        r.verify_axioms().unwrap();
        // x^2 = -1/2 = 1 (mod 3) since 2 x^2 = -1 = 2
        assert_eq!(r.mul(3, 3), 1);
    }

    #[test]
    fn bad_modulus_rejected() {
        let err = build_ring(&RingSpec::poly_quotient(4, vec![1, 0, 2])).unwrap_err();
        assert!(matches!(err, RingError::BadModulus { leading: 2, n: 4 }));
    }

    #[test]
    fn order_cap_is_enforced() {
        let spec = RingSpec::product(vec![RingSpec::zmod(30), RingSpec::zmod(30)]);
        assert!(matches!(
            build_ring(&spec),
            Err(RingError::OrderCapExceeded {
                order: 900,
                cap: 512
            })
        ));
        assert!(build_ring_with_cap(&spec, 1000).is_ok());
    }

    #[test]
    fn table_rejections() {
        // Z/2 tables
        let add = vec![vec![0, 1], vec![1, 0]];
        let mul = vec![vec![0, 0], vec![0, 1]];
        let spec = RingSpec::Table {
            order: 2,
            add: add.clone(),
            mul: mul.clone(),
        };
        assert_eq!(build_ring(&spec).unwrap().one(), 1);

        let no_one = RingSpec::Table {
            order: 2,
            add: add.clone(),
            mul: vec![vec![0, 0], vec![0, 0]],
        };
        assert_eq!(build_ring(&no_one).unwrap_err(), RingError::TableNoIdentity);

        let add3 = vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]];
        let noncomm = RingSpec::Table {
            order: 3,
            add: add3.clone(),
            mul: vec![vec![0, 0, 0], vec![0, 1, 2], vec![0, 1, 2]],
        };
        assert!(matches!(
            build_ring(&noncomm).unwrap_err(),
            RingError::TableNotCommutative { .. }
        ));

        // commutative with identity but not distributive: 2*2 = 2 in Z/3 additive group
        let bad = RingSpec::Table {
            order: 3,
            add: add3,
            mul: vec![vec![0, 0, 0], vec![0, 1, 2], vec![0, 2, 2]],
        };
        assert!(matches!(
            build_ring(&bad).unwrap_err(),
            RingError::TableNotRing { .. }
        ));
    }

    #[test]
    fn classify_elements_of_z12() {
        let r = ring(RingSpec::zmod(12));
        let six = r.classify_element(6);
        assert!(six.is_nilpotent && six.is_zero_divisor && !six.is_unit);
        let four = r.classify_element(4);
        assert!(four.is_idempotent && four.is_zero_divisor && !four.is_nilpotent);
        let one = r.classify_element(1);
        assert!(one.is_unit && one.is_idempotent && !one.is_zero_divisor);
    }

    #[test]
    fn idempotent_powers_in_z12() {
        let r = ring(RingSpec::zmod(12));
        assert_eq!(r.idempotent_power(2), (4, 2));
        assert_eq!(r.idempotent_power(3), (9, 2));
        assert_eq!(r.idempotent_power(1), (1, 1));
        assert_eq!(r.idempotent_power(0), (0, 1));
    }

    #[test]
    fn element_wrapper_rejects_mixed_rings() {
        let a = ring(RingSpec::zmod(12));
        let b = ring(RingSpec::zmod(12));
        let x = a.element(3).unwrap();
        let y = b.element(3).unwrap();
        assert_eq!(x.add(&y).unwrap_err(), RingError::MixedRings);
        assert_eq!(x.mul(&a.element(4).unwrap()).unwrap().index(), 0);
        let z = x.add(&x.neg()).unwrap();
        assert_eq!(z.index(), 0);
    }

    #[test]
    fn reduction_hom_z12_to_z4() {
        let r12 = ring(RingSpec::zmod(12));
        let r4 = ring(RingSpec::zmod(4));
        let hom = build_hom(&r12, &r4, (0..12).map(|r| r % 4).collect()).unwrap();
        assert_eq!(hom.kernel(), vec![0, 4, 8]);
        assert!(hom.is_surjective());
        let bad = build_hom(&r12, &r4, (0..12).map(|r| (2 * r) % 4).collect());
        assert!(matches!(bad, Err(RingError::NotAHom { .. })));
    }

    #[test]
    fn spec_json_shapes() {
        let spec: RingSpec = serde_json::from_str(
            r#"{"type":"poly_quotient","base":{"type":"zmod","p":2},"modulus":[0,0,1]}"#,
        )
        .unwrap();
        assert_eq!(spec, RingSpec::poly_quotient(2, vec![0, 0, 1]));
        let prod: RingSpec = serde_json::from_str(
            r#"{"type":"product","factors":[{"type":"zmod","n":4},{"type":"zmod","n":3}]}"#,
        )
        .unwrap();
        assert_eq!(prod.to_string(), "Z/4 x Z/3");
        assert_eq!(spec.to_string(), "Z/2[x]/(x^2)");
    }
}
