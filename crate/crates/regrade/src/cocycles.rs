//! Two-cocycles on finite groups with root-of-unity values.
//!
//! A cocycle `α` stores the multiplication law of a twisted group
//! algebra: the standard basis satisfies `U_g U_h = α(g,h) U_{gh}`.
//! Every constructor checks the cocycle identity
//! `α(g,h) α(gh,k) = α(h,k) α(g,hk)` on all triples, so a value of this
//! type is always a genuine cocycle. Values are kept at one common
//! root-of-unity order.

use crate::cyclo::{lcm, RootOfUnity};
use crate::error::{Error, Result};
use crate::groups::{FiniteGroup, GroupElement};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct Cocycle {
    group: Arc<FiniteGroup>,
    order: u32,
    table: Vec<Vec<RootOfUnity>>,
}

impl Cocycle {
    pub fn new(group: Arc<FiniteGroup>, table: Vec<Vec<RootOfUnity>>) -> Result<Cocycle> {
        let n = group.order();
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(Error::BadCocycle(format!(
                "value table must be {n} x {n}"
            )));
        }
        let order = table
            .iter()
            .flatten()
            .fold(1u32, |a, r| lcm(a, r.order));
        let mut table = table;
        for row in &mut table {
            for v in row.iter_mut() {
                *v = v.change_order(order)?;
            }
        }
        let c = Cocycle { group, order, table };
        c.check_identity()?;
        Ok(c)
    }

    pub fn from_fn(
        group: Arc<FiniteGroup>,
        f: impl Fn(GroupElement, GroupElement) -> RootOfUnity,
    ) -> Result<Cocycle> {
        let n = group.order();
        let table = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| f(GroupElement(a), GroupElement(b)))
                    .collect()
            })
            .collect();
        Cocycle::new(group, table)
    }

    pub fn trivial(group: Arc<FiniteGroup>) -> Cocycle {
        let n = group.order();
        Cocycle {
            group,
            order: 1,
            table: vec![vec![RootOfUnity::one(1); n]; n],
        }
    }

    fn check_identity(&self) -> Result<()> {
        let g = &self.group;
        for a in g.elements() {
            for b in g.elements() {
                for c in g.elements() {
                    let lhs = self.mul2(self.value(a, b), self.value(g.mul(a, b), c));
                    let rhs = self.mul2(self.value(b, c), self.value(a, g.mul(b, c)));
                    if lhs != rhs {
                        return Err(Error::BadCocycle(format!(
                            "cocycle identity fails at ({}, {}, {})",
                            a.0, b.0, c.0
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Multiply two values already at the common order.
    fn mul2(&self, a: RootOfUnity, b: RootOfUnity) -> RootOfUnity {
        a.mul(&b).expect("cocycle values share one order")
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    /// Common root-of-unity order of all values.
    pub fn value_order(&self) -> u32 {
        self.order
    }

    pub fn value(&self, a: GroupElement, b: GroupElement) -> RootOfUnity {
        self.table[a.0][b.0]
    }

    /// A cocycle is normalized when `α(e,e) = 1`; the cocycle identity
    /// then forces `α(g,e) = α(e,g) = 1` for every `g`.
    pub fn is_normalized(&self) -> bool {
        self.value(GroupElement(0), GroupElement(0)).is_one()
    }

    /// Divide the whole table by `α(e,e)`. This preserves the cocycle
    /// identity and the commutation behaviour of the twisted algebra.
    pub fn normalize(&self) -> Cocycle {
        let e = GroupElement(0);
        let c = self.value(e, e);
        if c.is_one() {
            return self.clone();
        }
        let cinv = c.inv();
        let table = self
            .table
            .iter()
            .map(|row| row.iter().map(|&v| self.mul2(v, cinv)).collect())
            .collect();
        Cocycle {
            group: self.group.clone(),
            order: self.order,
            table,
        }
    }

    /// Scalar `s` with `U_g U_h ... = s U_{g h ...}` for a word of
    /// basis monomials, together with the product of the word.
    pub fn word_scalar(&self, word: &[GroupElement]) -> (RootOfUnity, GroupElement) {
        let mut s = RootOfUnity::new(self.order, 0);
        let mut acc = self.group.identity();
        for &w in word {
            s = self.mul2(s, self.value(acc, w));
            acc = self.group.mul(acc, w);
        }
        (s, acc)
    }

    /// Scalar of the inverse monomial: `U_g^{-1} = s U_{g^{-1}}`.
    /// The unit of the algebra is `α(e,e)^{-1} U_e`, so
    /// `s = (α(g, g^{-1}) α(e,e))^{-1}`.
    pub fn inv_scalar(&self, g: GroupElement) -> RootOfUnity {
        let e = GroupElement(0);
        let ginv = self.group.inv(g);
        self.mul2(self.value(g, ginv), self.value(e, e)).inv()
    }

    /// Conjugation by a basis monomial:
    /// `U_t U_g U_t^{-1} = s U_{t g t^{-1}}`; returns `(s, t g t^{-1})`.
    pub fn conj(&self, t: GroupElement, g: GroupElement) -> (RootOfUnity, GroupElement) {
        let tg = self.group.mul(t, g);
        let tinv = self.group.inv(t);
        let s = self.mul2(
            self.mul2(self.value(t, g), self.value(tg, tinv)),
            self.inv_scalar(t),
        );
        (s, self.group.conj(t, g))
    }

    /// Ratio `α(g,h) / α(h,g)` for a commuting pair: the scalar with
    /// `U_g U_h = s U_h U_g`.
    pub fn commutation_ratio(&self, g: GroupElement, h: GroupElement) -> Result<RootOfUnity> {
        if self.group.mul(g, h) != self.group.mul(h, g) {
            return Err(Error::BadCocycle(format!(
                "elements {} and {} do not commute in the group",
                g.0, h.0
            )));
        }
        Ok(self.mul2(self.value(g, h), self.value(h, g).inv()))
    }

    /// Pointwise product of two cocycles on the same group.
    pub fn pointwise_mul(&self, other: &Cocycle) -> Result<Cocycle> {
        if !Arc::ptr_eq(&self.group, &other.group) && self.group.order() != other.group.order() {
            return Err(Error::AlgebraMismatch);
        }
        let order = lcm(self.order, other.order);
        let n = self.group.order();
        let table = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let x = self.table[a][b].change_order(order).unwrap();
                        let y = other.table[a][b].change_order(order).unwrap();
                        x.mul(&y).unwrap()
                    })
                    .collect()
            })
            .collect();
        Cocycle::new(self.group.clone(), table)
    }

    /// Cocycle on the direct product: `γ((g,h),(g',h')) = α(g,g') β(h,h')`.
    pub fn tensor(&self, other: &Cocycle) -> Cocycle {
        let group = FiniteGroup::direct_product(&self.group, &other.group);
        let bo = other.group.order();
        let order = lcm(self.order, other.order);
        let n = group.order();
        let table = (0..n)
            .map(|p| {
                let (g1, h1) = FiniteGroup::unpair_index(bo, GroupElement(p));
                (0..n)
                    .map(|q| {
                        let (g2, h2) = FiniteGroup::unpair_index(bo, GroupElement(q));
                        let x = self.value(g1, g2).change_order(order).unwrap();
                        let y = other.value(h1, h2).change_order(order).unwrap();
                        x.mul(&y).unwrap()
                    })
                    .collect()
            })
            .collect();
        // Both factors satisfy the identity, so the product does; the
        // constructor re-checks anyway out of caution.
        Cocycle::new(group, table).expect("product of cocycles is a cocycle")
    }

    /// Restriction to a subgroup, returned as a cocycle on a standalone
    /// group together with the map new-index -> ambient element.
    pub fn restrict(
        &self,
        subgroup: &[GroupElement],
    ) -> Result<(Cocycle, Vec<GroupElement>)> {
        let (sub, members) = self.group.subgroup_as_group(subgroup)?;
        Ok((self.restrict_with(sub, &members)?, members))
    }

    /// Restriction along an explicit presentation of a subgroup: `map`
    /// sends each index of `sub` to its ambient element and must be an
    /// injective homomorphism.
    pub fn restrict_with(
        &self,
        sub: Arc<FiniteGroup>,
        map: &[GroupElement],
    ) -> Result<Cocycle> {
        let n = sub.order();
        if map.len() != n {
            return Err(Error::BadCocycle(
                "subgroup map length does not match the presented group".into(),
            ));
        }
        let table = (0..n)
            .map(|a| (0..n).map(|b| self.value(map[a], map[b])).collect())
            .collect();
        Cocycle::new(sub, table)
    }
}

/// The staircase cocycle on an abelian group realizing a prescribed
/// commutation between the canonical generators.
///
/// `lower` maps generator index pairs `(i, j)` with `i > j` to the value
/// `η_{ij}`; the cocycle is `α(a, b) = ∏_{i>j} η_{ij}^{a_i b_j}` on
/// residue tuples. Its commutation ratio on a pair of elements is then
/// the alternating bicharacter extending `η_{ij}` (with
/// `η_{ji} = η_{ij}^{-1}` and trivial diagonal). Each `η_{ij}` must have
/// order dividing both invariant factors `n_i` and `n_j`, otherwise the
/// exponents are not well defined.
pub fn staircase_cocycle(
    group: &Arc<FiniteGroup>,
    lower: &BTreeMap<(usize, usize), RootOfUnity>,
) -> Result<Cocycle> {
    let factors = group
        .invariant_factors()
        .ok_or(Error::NotAbelian("staircase_cocycle"))?
        .to_vec();
    let k = factors.len();
    for (&(i, j), v) in lower {
        if i >= k || j >= i {
            return Err(Error::BadCocycle(format!(
                "generator pair ({i}, {j}) is not strictly lower triangular"
            )));
        }
        let ord = v.multiplicative_order();
        if factors[i] % ord != 0 || factors[j] % ord != 0 {
            return Err(Error::BadCocycle(format!(
                "value of order {ord} at pair ({i}, {j}) does not divide \
                 the invariant factors {} and {}",
                factors[i], factors[j]
            )));
        }
    }
    let order = lower.values().fold(1u32, |a, v| lcm(a, v.order));
    let g = group.clone();
    Cocycle::from_fn(group.clone(), move |a, b| {
        let ra = g.residues(a).unwrap();
        let rb = g.residues(b).unwrap();
        let mut acc = RootOfUnity::new(order, 0);
        for (&(i, j), v) in lower {
            let e = (ra[i] as i64) * (rb[j] as i64);
            acc = acc
                .mul(&v.pow(e).change_order(order).unwrap())
                .unwrap();
        }
        acc
    })
}

/// The nontrivial cocycle on the dihedral group of order 8 whose twisted
/// group algebra is the quotient of the group algebra of the quaternion
/// group of order 16 by the central identification `u^4 = -1`.
///
/// With the dihedral presentation `x^4 = y^2 = e`, `y x y^{-1} = x^{-1}`
/// and the section `x^a y^b -> u^a v^b`, the product
/// `u^{a1} v^{b1} u^{a2} v^{b2}` equals `u^A v^B` with
/// `A = a1 + a2 7^{b1} + 4 [b1 + b2 >= 2] (mod 8)`, and the cocycle is
/// `(-1)^{A div 4}`.
pub fn dihedral_quaternion_cocycle() -> Cocycle {
    let g = crate::groups::d8();
    Cocycle::from_fn(g, |p, q| {
        let (a1, b1) = (p.0 % 4, p.0 / 4);
        let (a2, b2) = (q.0 % 4, q.0 / 4);
        let a = (a1 + a2 * if b1 == 1 { 7 } else { 1 } + if b1 + b2 >= 2 { 4 } else { 0 }) % 8;
        RootOfUnity::from_sign(2, if a >= 4 { -1 } else { 1 }).unwrap()
    })
    .expect("quaternion construction yields a cocycle")
}
