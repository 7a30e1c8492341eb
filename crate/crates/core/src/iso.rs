//! Isomorphism search between finite rings.
//!
//! Cheap invariants rule out most pairs. The remaining search picks additive
//! generators of the source (starting with 1) and backtracks over their
//! images, extending each choice additively and pruning on element
//! signatures, injectivity and multiplicativity.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::ring::{FiniteRing, RingHom, DEFAULT_ORDER_CAP};
use crate::sheaf::SheafError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Signature {
    additive_order: usize,
    unit: bool,
    idempotent: bool,
    nilpotent: bool,
    square_is_zero: bool,
}

fn signatures(ring: &FiniteRing) -> Vec<Signature> {
    ring.elements()
        .map(|x| Signature {
            additive_order: ring.additive_order(x),
            unit: ring.is_unit(x),
            idempotent: ring.is_idempotent(x),
            nilpotent: ring.is_nilpotent(x),
            square_is_zero: ring.mul(x, x) == 0,
        })
        .collect()
}

/// Invariants compared before any search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingProfile {
    pub order: usize,
    pub characteristic: usize,
    pub units: usize,
    pub idempotents: usize,
    pub nilpotents: usize,
    pub additive_orders: BTreeMap<usize, usize>,
}

impl RingProfile {
    pub fn of(ring: &FiniteRing) -> Self {
        let mut additive_orders = BTreeMap::new();
        for x in ring.elements() {
            *additive_orders.entry(ring.additive_order(x)).or_insert(0) += 1;
        }
        RingProfile {
            order: ring.order(),
            characteristic: ring.characteristic(),
            units: ring.units().len(),
            idempotents: ring.idempotents().len(),
            nilpotents: ring.nilpotents().len(),
            additive_orders,
        }
    }
}

/// Finds a ring isomorphism `a → b`, or `None` when none exists.
pub fn ring_isomorphic(
    a: &Arc<FiniteRing>,
    b: &Arc<FiniteRing>,
) -> Result<Option<RingHom>, SheafError> {
    let cap = DEFAULT_ORDER_CAP;
    if a.order() > cap || b.order() > cap {
        return Err(SheafError::SearchCapExceeded {
            order: a.order().max(b.order()),
            cap,
        });
    }
    if a.order() != b.order() {
        return Ok(None);
    }
    if a.id() == b.id() {
        return Ok(Some(RingHom::identity(a)));
    }
    if RingProfile::of(a) != RingProfile::of(b) {
        return Ok(None);
    }
    let sig_a = signatures(a);
    let sig_b = signatures(b);

    // additive generators of a, starting from 1
    let mut gens = Vec::new();
    let mut span = vec![false; a.order()];
    span[0] = true;
    let mut next = Some(a.one());
    while let Some(g) = next {
        gens.push(g);
        let members: Vec<usize> = (0..a.order()).filter(|&x| span[x]).collect();
        let mut m = g;
        while m != 0 {
            for &x in &members {
                span[a.add(x, m)] = true;
            }
            m = a.add(m, g);
        }
        next = (0..a.order())
            .filter(|&x| !span[x])
            .max_by_key(|&x| (sig_a[x].additive_order, std::cmp::Reverse(x)));
    }

    let mut search = Search {
        a,
        b,
        sig_a: &sig_a,
        sig_b: &sig_b,
        gens: &gens,
        map: vec![usize::MAX; a.order()],
        used: vec![false; b.order()],
    };
    search.map[0] = 0;
    search.used[0] = true;
    if search.extend(0) {
        let hom = RingHom::new(a.clone(), b.clone(), search.map)
            .map_err(|_| SheafError::Inconsistent("isomorphism search produced a non-hom"))?;
        Ok(Some(hom))
    } else {
        Ok(None)
    }
}

struct Search<'s> {
    a: &'s FiniteRing,
    b: &'s FiniteRing,
    sig_a: &'s [Signature],
    sig_b: &'s [Signature],
    gens: &'s [usize],
    map: Vec<usize>,
    used: Vec<bool>,
}

impl Search<'_> {
    fn extend(&mut self, level: usize) -> bool {
        if level == self.gens.len() {
            return self.multiplicative();
        }
        let g = self.gens[level];
        let candidates: Vec<usize> = if level == 0 {
            vec![self.b.one()]
        } else {
            (0..self.b.order())
                .filter(|&h| !self.used[h] && self.sig_b[h] == self.sig_a[g])
                .collect()
        };
        for h in candidates {
            let saved_map = self.map.clone();
            let saved_used = self.used.clone();
            if self.assign(g, h) && self.partially_multiplicative() && self.extend(level + 1) {
                return true;
            }
            self.map = saved_map;
            self.used = saved_used;
        }
        false
    }

    /// Extends the additive map from the current domain `H` to `H + <g>`
    /// with `g ↦ h`.
    fn assign(&mut self, g: usize, h: usize) -> bool {
        let domain: Vec<usize> = (0..self.a.order())
            .filter(|&x| self.map[x] != usize::MAX)
            .collect();
        let (mut mg, mut mh) = (g, h);
        while mg != 0 {
            for &x in &domain {
                let y = self.a.add(x, mg);
                let img = self.b.add(self.map[x], mh);
                if self.map[y] == usize::MAX {
                    if self.used[img] || self.sig_a[y] != self.sig_b[img] {
                        return false;
                    }
                    self.map[y] = img;
                    self.used[img] = true;
                } else if self.map[y] != img {
                    return false;
                }
            }
            mg = self.a.add(mg, g);
            mh = self.b.add(mh, h);
        }
        // additive order of h must divide that of g for consistency at the wrap
        mh == 0
    }

    fn partially_multiplicative(&self) -> bool {
        let domain: Vec<usize> = (0..self.a.order())
            .filter(|&x| self.map[x] != usize::MAX)
            .collect();
        for &x in &domain {
            for &y in &domain {
                let p = self.a.mul(x, y);
                if self.map[p] != usize::MAX && self.map[p] != self.b.mul(self.map[x], self.map[y])
                {
                    return false;
                }
            }
        }
        true
    }

    fn multiplicative(&self) -> bool {
        self.map.iter().all(|&x| x != usize::MAX) && self.partially_multiplicative()
    }
}
