//! Bicharacters on abelian groups and commutation functions of regular
//! gradings, stored in realized form.
//!
//! A skew-symmetric bicharacter records, for an abelian grading group,
//! the scalar `θ(g,h)` with `a b = θ(g,h) b a` for homogeneous `a`, `b`
//! of degrees `g`, `h`. The diagonal `ψ(g) = θ(g,g)` is a sign and the
//! map `g -> ψ(g)` is a character.
//!
//! A [`CommutationFunction`] keeps the data that realizes such
//! commutation behaviour concretely (also for nonabelian grading
//! groups): a two-cocycle on the group plus a parity character. The
//! scalar attached to reordering a word of homogeneous elements is then
//! computed from twisted-group-algebra arithmetic and the sign of the
//! permutation restricted to odd positions.

use crate::cocycles::{staircase_cocycle, Cocycle};
use crate::cyclo::{lcm, RootOfUnity};
use crate::error::{Error, Result};
use crate::groups::{smith_normal_form, FiniteGroup, GroupElement};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct Bicharacter {
    group: Arc<FiniteGroup>,
    order: u32,
    table: Vec<Vec<RootOfUnity>>,
}

impl Bicharacter {
    pub fn new(group: Arc<FiniteGroup>, table: Vec<Vec<RootOfUnity>>) -> Result<Bicharacter> {
        if !group.is_abelian() {
            return Err(Error::NotAbelian("bicharacter"));
        }
        let n = group.order();
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(Error::BadBicharacter(format!(
                "value table must be {n} x {n}"
            )));
        }
        let order = table.iter().flatten().fold(1u32, |a, r| lcm(a, r.order));
        let mut table = table;
        for row in &mut table {
            for v in row.iter_mut() {
                *v = v.change_order(order)?;
            }
        }
        let b = Bicharacter { group, order, table };
        b.check_axioms()?;
        Ok(b)
    }

    pub fn from_fn(
        group: Arc<FiniteGroup>,
        f: impl Fn(GroupElement, GroupElement) -> RootOfUnity,
    ) -> Result<Bicharacter> {
        let n = group.order();
        let table = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| f(GroupElement(a), GroupElement(b)))
                    .collect()
            })
            .collect();
        Bicharacter::new(group, table)
    }

    /// Build from values on the canonical generators of an
    /// invariant-factor group: `θ(a, b) = ∏ vals[i][j]^{a_i b_j}`.
    /// The table must be skew (`vals[i][j] vals[j][i] = 1`, signs on the
    /// diagonal) and each entry's order must divide both invariant
    /// factors it touches.
    pub fn from_gen_table(
        group: Arc<FiniteGroup>,
        vals: &[Vec<RootOfUnity>],
    ) -> Result<Bicharacter> {
        let factors = group
            .invariant_factors()
            .ok_or(Error::NotAbelian("from_gen_table"))?
            .to_vec();
        let k = factors.len();
        if vals.len() != k || vals.iter().any(|r| r.len() != k) {
            return Err(Error::BadBicharacter(format!(
                "generator table must be {k} x {k}"
            )));
        }
        for i in 0..k {
            if vals[i][i].as_sign().is_none() {
                return Err(Error::BadBicharacter(format!(
                    "diagonal entry {i} is not a sign"
                )));
            }
            for j in 0..k {
                let ord = vals[i][j].multiplicative_order();
                if factors[i] % ord != 0 || factors[j] % ord != 0 {
                    return Err(Error::BadBicharacter(format!(
                        "entry ({i},{j}) of order {ord} does not divide \
                         the invariant factors {} and {}",
                        factors[i], factors[j]
                    )));
                }
                if !vals[i][j].mul_rescaled(&vals[j][i]).is_one() {
                    return Err(Error::BadBicharacter(format!(
                        "entries ({i},{j}) and ({j},{i}) are not inverse"
                    )));
                }
            }
        }
        let order = vals.iter().flatten().fold(1u32, |a, r| lcm(a, r.order));
        let g = group.clone();
        Bicharacter::from_fn(group, |a, b| {
            let ra = g.residues(a).unwrap();
            let rb = g.residues(b).unwrap();
            let mut acc = RootOfUnity::one(order);
            for i in 0..k {
                for j in 0..k {
                    let e = (ra[i] as i64) * (rb[j] as i64);
                    acc = acc
                        .mul(&vals[i][j].pow(e).change_order(order).unwrap())
                        .unwrap();
                }
            }
            acc
        })
    }

    fn check_axioms(&self) -> Result<()> {
        let g = &self.group;
        for a in g.elements() {
            for b in g.elements() {
                let prod = self.value(a, b).mul(&self.value(b, a)).unwrap();
                if !prod.is_one() {
                    return Err(Error::BadBicharacter(format!(
                        "skew-symmetry fails at ({}, {})",
                        a.0, b.0
                    )));
                }
            }
        }
        // Multiplicativity in the first argument; the second follows
        // from skew-symmetry.
        for a1 in g.elements() {
            for a2 in g.elements() {
                let a12 = g.mul(a1, a2);
                for b in g.elements() {
                    let lhs = self.value(a12, b);
                    let rhs = self.value(a1, b).mul(&self.value(a2, b)).unwrap();
                    if lhs != rhs {
                        return Err(Error::BadBicharacter(format!(
                            "multiplicativity fails at ({}, {}; {})",
                            a1.0, a2.0, b.0
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn value_order(&self) -> u32 {
        self.order
    }

    pub fn value(&self, a: GroupElement, b: GroupElement) -> RootOfUnity {
        self.table[a.0][b.0]
    }

    /// Diagonal sign `ψ(g) = θ(g,g)`.
    pub fn psi(&self, g: GroupElement) -> i8 {
        self.value(g, g)
            .as_sign()
            .expect("the diagonal of a bicharacter is a sign")
    }

    /// Values on the canonical generator pairs, when the group carries
    /// an invariant-factor presentation.
    pub fn gen_values(&self) -> Option<Vec<Vec<RootOfUnity>>> {
        let gens = match self.group.invariant_factors() {
            Some(_) => self.group.generators(),
            None => return None,
        };
        Some(
            gens.iter()
                .map(|&a| gens.iter().map(|&b| self.value(a, b)).collect())
                .collect(),
        )
    }

    /// Elements pairing trivially with the whole group.
    pub fn radical(&self) -> Vec<GroupElement> {
        self.group
            .elements()
            .filter(|&g| self.group.elements().all(|h| self.value(g, h).is_one()))
            .collect()
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.radical().len() == 1
    }

    /// Pointwise equality of values (after aligning root orders); the
    /// groups must use the same element numbering for this to be
    /// meaningful.
    pub fn same_values(&self, other: &Bicharacter) -> bool {
        if self.group.order() != other.group.order() {
            return false;
        }
        let n = self.group.order();
        (0..n).all(|a| {
            (0..n).all(|b| {
                let (x, y) = RootOfUnity::unify(&self.table[a][b], &other.table[a][b]);
                x == y
            })
        })
    }

    /// Bicharacter on the direct product with blockwise values.
    pub fn tensor(&self, other: &Bicharacter) -> Bicharacter {
        let group = FiniteGroup::direct_product(&self.group, &other.group);
        let bo = other.group.order();
        let sa = self.clone();
        let sb = other.clone();
        Bicharacter::from_fn(group, move |p, q| {
            let (g1, h1) = FiniteGroup::unpair_index(bo, p);
            let (g2, h2) = FiniteGroup::unpair_index(bo, q);
            sa.value(g1, g2).mul_rescaled(&sb.value(h1, h2))
        })
        .expect("product of bicharacters is a bicharacter")
    }

    /// Restriction to a subgroup, presented by invariant factors;
    /// returns the restricted bicharacter and the map
    /// new-index -> ambient element.
    pub fn restrict(
        &self,
        subgroup: &[GroupElement],
    ) -> Result<(Bicharacter, Vec<GroupElement>)> {
        let (sub, map) = self.group.abelian_presentation(subgroup)?;
        let b = Bicharacter::from_fn(sub, |a, c| self.value(map[a.0], map[c.0]))?;
        Ok((b, map))
    }

    /// Quotient by the radical.
    ///
    /// The induced bicharacter on the quotient is nondegenerate and
    /// pulls back to the original one along the projection; both facts
    /// are re-verified exactly before returning.
    pub fn radical_and_minimalize(&self) -> Result<MinimalizeReport> {
        let factors = self
            .group
            .invariant_factors()
            .ok_or(Error::NotAbelian("radical_and_minimalize"))?
            .to_vec();
        let k = factors.len();
        let radical = self.radical();
        // Relation lattice of the quotient: the group's own orders plus
        // the radical generators, in residue coordinates.
        let mut rows: Vec<Vec<i64>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| if i == j { factors[i] as i64 } else { 0 })
                    .collect()
            })
            .collect();
        for &r in &radical {
            let res = self.group.residues(r).unwrap();
            rows.push(res.iter().map(|&x| x as i64).collect());
        }
        let (d, v, vinv) = smith_normal_form(&rows, k);
        let keep: Vec<usize> = (0..k).filter(|&i| d[i] > 1).collect();
        let qfactors: Vec<u32> = keep.iter().map(|&i| d[i] as u32).collect();
        let qgroup = FiniteGroup::from_invariant_factors(&qfactors)?;
        let lifts: Vec<GroupElement> = keep
            .iter()
            .map(|&i| self.group.element_from_residues(&vinv[i]).unwrap())
            .collect();
        let vals: Vec<Vec<RootOfUnity>> = lifts
            .iter()
            .map(|&a| lifts.iter().map(|&b| self.value(a, b)).collect())
            .collect();
        let quotient = Bicharacter::from_gen_table(qgroup.clone(), &vals)?;
        // Projection in new coordinates: c = x V, then keep the
        // coordinates of nontrivial invariant factors.
        let mut projection = Vec::with_capacity(self.group.order());
        for g in self.group.elements() {
            let x = self.group.residues(g).unwrap();
            let c: Vec<i64> = (0..k)
                .map(|i| (0..k).map(|j| x[j] as i64 * v[j][i]).sum())
                .collect();
            let qres: Vec<i64> = keep.iter().map(|&i| c[i]).collect();
            projection.push(qgroup.element_from_residues(&qres)?.0);
        }
        if !quotient.is_nondegenerate() {
            return Err(Error::InvariantViolation(
                "quotient by the radical is degenerate".into(),
            ));
        }
        for a in self.group.elements() {
            for b in self.group.elements() {
                let lifted = quotient.value(
                    GroupElement(projection[a.0]),
                    GroupElement(projection[b.0]),
                );
                let (x, y) = RootOfUnity::unify(&self.value(a, b), &lifted);
                if x != y {
                    return Err(Error::InvariantViolation(
                        "projection does not preserve bicharacter values".into(),
                    ));
                }
            }
        }
        Ok(MinimalizeReport {
            radical,
            quotient,
            projection,
        })
    }
}

/// Result of factoring a bicharacter through its radical.
#[derive(Clone, Debug)]
pub struct MinimalizeReport {
    /// Elements of the radical in the ambient group.
    pub radical: Vec<GroupElement>,
    /// The induced nondegenerate bicharacter on the quotient group.
    pub quotient: Bicharacter,
    /// Ambient element index -> quotient element index.
    pub projection: Vec<usize>,
}

/// The sign-flip form: the order-2 group with `θ(x,x) = -1`.
pub fn tau_form() -> Bicharacter {
    let g = FiniteGroup::from_invariant_factors(&[2]).unwrap();
    let m = RootOfUnity::minus_one(2).unwrap();
    Bicharacter::from_gen_table(g, &[vec![m]]).unwrap()
}

/// The hyperbolic form on `(Z_q)^2`, `q = p^m`: generators pair to a
/// primitive q-th root of unity, trivial diagonal.
pub fn eta_form(p: u32, m: u32) -> Result<Bicharacter> {
    let q = check_prime_power(p, m)?;
    let g = FiniteGroup::from_invariant_factors(&[q, q])?;
    let z = RootOfUnity::new(q, 1);
    let one = RootOfUnity::one(q);
    Bicharacter::from_gen_table(g, &[vec![one, z], vec![z.inv(), one]])
}

/// The odd-diagonal variant of the hyperbolic form on `(Z_{2^m})^2`:
/// generators pair to a primitive root, and the second generator has
/// `ψ = -1`.
pub fn epsilon_form(m: u32) -> Result<Bicharacter> {
    let q = check_prime_power(2, m)?;
    let g = FiniteGroup::from_invariant_factors(&[q, q])?;
    let z = RootOfUnity::new(q, 1);
    let one = RootOfUnity::one(q);
    let minus = RootOfUnity::minus_one(q)?;
    Bicharacter::from_gen_table(g, &[vec![one, z], vec![z.inv(), minus]])
}

fn check_prime_power(p: u32, m: u32) -> Result<u32> {
    if p < 2 || (2..p).any(|d| p % d == 0) {
        return Err(Error::Validation(format!("{p} is not prime")));
    }
    if m == 0 {
        return Err(Error::Validation("exponent must be positive".into()));
    }
    let mut q: u64 = 1;
    for _ in 0..m {
        q *= p as u64;
        if q > 1 << 20 {
            return Err(Error::Validation(format!("{p}^{m} is too large")));
        }
    }
    Ok(q as u32)
}

/// A commutation function in realized form: a two-cocycle on the
/// grading group together with a parity character marking the degrees
/// that behave oddly under reordering.
#[derive(Clone, Debug)]
pub struct CommutationFunction {
    cocycle: Cocycle,
    parity: Vec<u8>,
}

impl CommutationFunction {
    pub fn new(cocycle: Cocycle, parity: Vec<u8>) -> Result<CommutationFunction> {
        let g = cocycle.group().clone();
        if parity.len() != g.order() || parity.iter().any(|&p| p > 1) {
            return Err(Error::Validation(
                "parity vector must assign 0 or 1 to every element".into(),
            ));
        }
        for a in g.elements() {
            for b in g.elements() {
                if parity[g.mul(a, b).0] != parity[a.0] ^ parity[b.0] {
                    return Err(Error::Validation(format!(
                        "parity is not a character: fails at ({}, {})",
                        a.0, b.0
                    )));
                }
            }
        }
        Ok(CommutationFunction { cocycle, parity })
    }

    /// A commutation function with no odd degrees.
    pub fn even(cocycle: Cocycle) -> CommutationFunction {
        let n = cocycle.group().order();
        CommutationFunction {
            cocycle,
            parity: vec![0; n],
        }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.cocycle.group()
    }

    pub fn cocycle(&self) -> &Cocycle {
        &self.cocycle
    }

    pub fn parity(&self, g: GroupElement) -> u8 {
        self.parity[g.0]
    }

    /// Diagonal sign `ψ(g)`: the scalar with `a^2`-reordering behaviour
    /// `a b = ψ b a` for two elements of the same degree `g`.
    pub fn psi(&self, g: GroupElement) -> i8 {
        if self.parity[g.0] == 0 {
            1
        } else {
            -1
        }
    }

    /// The subgroup of even degrees.
    pub fn parity_kernel(&self) -> Vec<GroupElement> {
        self.group()
            .elements()
            .filter(|&g| self.parity[g.0] == 0)
            .collect()
    }

    /// Scalar `θ(g,h)` with `a b = θ(g,h) b a` for homogeneous `a`, `b`
    /// of commuting degrees `g`, `h`.
    pub fn commutation_value(&self, g: GroupElement, h: GroupElement) -> Result<RootOfUnity> {
        let ratio = self.cocycle.commutation_ratio(g, h)?;
        let sign = RootOfUnity::from_sign(
            2,
            if self.parity[g.0] == 1 && self.parity[h.0] == 1 {
                -1
            } else {
                1
            },
        )
        .unwrap();
        Ok(ratio.mul_rescaled(&sign))
    }

    /// Scalar attached to reordering a word of homogeneous elements:
    /// `a_1 ... a_n = θ a_{perm[1]} ... a_{perm[n]}` for independent
    /// homogeneous `a_i` of degrees `word[i]`. The permutation must
    /// preserve the product of the word.
    pub fn reordering_value(
        &self,
        word: &[GroupElement],
        perm: &[usize],
    ) -> Result<RootOfUnity> {
        let n = word.len();
        for &w in word {
            self.group().check_element(w)?;
        }
        if perm.len() != n {
            return Err(Error::BadPermutation(format!(
                "permutation length {} does not match word length {n}",
                perm.len()
            )));
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::BadPermutation(format!(
                    "not a permutation of 0..{n}"
                )));
            }
            seen[p] = true;
        }
        let permuted: Vec<GroupElement> = perm.iter().map(|&p| word[p]).collect();
        let (s1, p1) = self.cocycle.word_scalar(word);
        let (s2, p2) = self.cocycle.word_scalar(&permuted);
        if p1 != p2 {
            return Err(Error::BadPermutation(
                "the permutation does not preserve the product of the word".into(),
            ));
        }
        let mut inversions = 0u64;
        for i in 0..n {
            for j in i + 1..n {
                if perm[i] > perm[j]
                    && self.parity[word[perm[i]].0] == 1
                    && self.parity[word[perm[j]].0] == 1
                {
                    inversions += 1;
                }
            }
        }
        let sign = RootOfUnity::from_sign(2, if inversions % 2 == 1 { -1 } else { 1 }).unwrap();
        Ok(s1.mul(&s2.inv()).unwrap().mul_rescaled(&sign))
    }

    /// Extract the bicharacter when the grading group is abelian.
    pub fn to_bicharacter(&self) -> Result<Bicharacter> {
        if !self.group().is_abelian() {
            return Err(Error::NotAbelian("to_bicharacter"));
        }
        let n = self.group().order();
        let mut table = Vec::with_capacity(n);
        for a in 0..n {
            let mut row = Vec::with_capacity(n);
            for b in 0..n {
                row.push(self.commutation_value(GroupElement(a), GroupElement(b))?);
            }
            table.push(row);
        }
        Bicharacter::new(self.group().clone(), table)
    }

    /// Realize an abelian bicharacter: the parity comes from the
    /// diagonal signs, and the even part of the pairing is realized by
    /// a staircase cocycle on the canonical generators.
    pub fn from_bicharacter(b: &Bicharacter) -> Result<CommutationFunction> {
        let group = b.group().clone();
        let factors = group
            .invariant_factors()
            .ok_or(Error::NotAbelian("from_bicharacter"))?
            .to_vec();
        let parity: Vec<u8> = group
            .elements()
            .map(|g| if b.psi(g) == -1 { 1 } else { 0 })
            .collect();
        let gens = group.generators();
        let k = factors.len();
        let mut lower = BTreeMap::new();
        for i in 0..k {
            for j in 0..i {
                let mut v = b.value(gens[i], gens[j]);
                if parity[gens[i].0] == 1 && parity[gens[j].0] == 1 {
                    v = v.mul_rescaled(&RootOfUnity::minus_one(2).unwrap());
                }
                if !v.is_one() {
                    lower.insert((i, j), v);
                }
            }
        }
        let cocycle = staircase_cocycle(&group, &lower)?;
        let out = CommutationFunction::new(cocycle, parity)?;
        // The realized form must reproduce the input exactly.
        let back = out.to_bicharacter()?;
        if !back.same_values(b) {
            return Err(Error::InvariantViolation(
                "realized form does not reproduce the bicharacter".into(),
            ));
        }
        Ok(out)
    }

    /// Commutation function of the product grading on the direct
    /// product group. The realized cocycle acquires a sign correction
    /// interleaving the two parities.
    pub fn tensor(&self, other: &CommutationFunction) -> Result<CommutationFunction> {
        let ga = self.group().clone();
        let gb = other.group().clone();
        let gp = FiniteGroup::direct_product(&ga, &gb);
        let bo = gb.order();
        let ca = self.cocycle.clone();
        let cb = other.cocycle.clone();
        let pa = self.parity.clone();
        let pb = other.parity.clone();
        let order = lcm(lcm(ca.value_order(), cb.value_order()), 2);
        let cocycle = Cocycle::from_fn(gp.clone(), move |x, y| {
            let (g1, h1) = FiniteGroup::unpair_index(bo, x);
            let (g2, h2) = FiniteGroup::unpair_index(bo, y);
            let mut v = ca
                .value(g1, g2)
                .mul_rescaled(&cb.value(h1, h2))
                .change_order(order)
                .unwrap();
            if pb[h1.0] == 1 && pa[g2.0] == 1 {
                v = v.mul(&RootOfUnity::minus_one(order).unwrap()).unwrap();
            }
            v
        })?;
        let parity: Vec<u8> = gp
            .elements()
            .map(|x| {
                let (g, h) = FiniteGroup::unpair_index(bo, x);
                self.parity[g.0] ^ other.parity[h.0]
            })
            .collect();
        CommutationFunction::new(cocycle, parity)
    }

    /// Commutation function of the degree-matched product of two
    /// gradings on the same group: values multiply pointwise.
    pub fn hat(&self, other: &CommutationFunction) -> Result<CommutationFunction> {
        let g = self.group().clone();
        let h = other.group().clone();
        if g.order() != h.order()
            || g.elements().any(|a| {
                g.elements()
                    .any(|b| g.mul(a, b) != h.mul(a, b))
            })
        {
            return Err(Error::AlgebraMismatch);
        }
        let ca = self.cocycle.clone();
        let cb = other.cocycle.clone();
        let pa = self.parity.clone();
        let pb = other.parity.clone();
        let order = lcm(lcm(ca.value_order(), cb.value_order()), 2);
        let cocycle = Cocycle::from_fn(g.clone(), move |x, y| {
            let mut v = ca
                .value(x, y)
                .mul_rescaled(&cb.value(x, y))
                .change_order(order)
                .unwrap();
            if pb[x.0] == 1 && pa[y.0] == 1 {
                v = v.mul(&RootOfUnity::minus_one(order).unwrap()).unwrap();
            }
            v
        })?;
        let parity: Vec<u8> = (0..g.order())
            .map(|i| self.parity[i] ^ other.parity[i])
            .collect();
        CommutationFunction::new(cocycle, parity)
    }

    /// Restriction to a subgroup. Pairwise-commuting subgroups are
    /// re-presented by invariant factors so the restriction supports
    /// the abelian-only operations.
    pub fn restrict(
        &self,
        subgroup: &[GroupElement],
    ) -> Result<(CommutationFunction, Vec<GroupElement>)> {
        let g = self.group().clone();
        let commutes = subgroup
            .iter()
            .all(|&a| subgroup.iter().all(|&b| g.mul(a, b) == g.mul(b, a)));
        let (sub, map) = if commutes {
            g.abelian_presentation(subgroup)?
        } else {
            g.subgroup_as_group(subgroup)?
        };
        let cocycle = self.cocycle.restrict_with(sub, &map)?;
        let parity = map.iter().map(|&m| self.parity[m.0]).collect();
        Ok((CommutationFunction::new(cocycle, parity)?, map))
    }

    /// Degeneracy analysis valid over any grading group.
    ///
    /// An element `g ≠ e` witnesses degeneracy when `θ(g,h) = 1` for
    /// every `h` in its centralizer — the component of degree `g` then
    /// commutes with everything it can be measured against. On abelian
    /// groups this recovers the radical of the associated pairing.
    pub fn nondegeneracy(&self) -> Result<NondegeneracyReport> {
        let group = self.group().clone();
        for g in group.elements() {
            if g == group.identity() {
                continue;
            }
            let mut inert = true;
            for h in group.centralizer(g) {
                if !self.commutation_value(g, h)?.is_one() {
                    inert = false;
                    break;
                }
            }
            if inert {
                return Ok(NondegeneracyReport {
                    nondegenerate: false,
                    witness: Some(g),
                });
            }
        }
        Ok(NondegeneracyReport {
            nondegenerate: true,
            witness: None,
        })
    }

    pub fn is_nondegenerate(&self) -> Result<bool> {
        Ok(self.nondegeneracy()?.nondegenerate)
    }

    /// Direct-sum guard. The componentwise grading on a direct sum of
    /// two graded algebras is regular when both summands carry the same
    /// commutation function, and the sum then inherits that function
    /// unchanged. Group law, parities, and all pairwise reordering
    /// values are compared before the shared function is returned.
    pub fn direct_sum(a: &CommutationFunction, b: &CommutationFunction) -> Result<CommutationFunction> {
        let g = a.group().clone();
        let h = b.group().clone();
        if g.order() != h.order()
            || g.elements()
                .any(|x| g.elements().any(|y| g.mul(x, y) != h.mul(x, y)))
        {
            return Err(Error::AlgebraMismatch);
        }
        if g.elements().any(|x| a.parity(x) != b.parity(x)) {
            return Err(Error::Validation(
                "direct summands carry different parities, so the componentwise \
                 grading on the sum has no single commutation function"
                    .into(),
            ));
        }
        for x in g.elements() {
            for y in g.elements() {
                let va = a.reordering_value(&[x, y], &[1, 0])?;
                let vb = b.reordering_value(&[x, y], &[1, 0])?;
                let (p, q) = RootOfUnity::unify(&va, &vb);
                if p != q {
                    return Err(Error::Validation(
                        "direct summands have different commutation functions, so \
                         the componentwise grading on the sum is not regular"
                            .into(),
                    ));
                }
            }
        }
        Ok(a.clone())
    }
}

/// Degeneracy verdict with the smallest witness when one exists.
pub struct NondegeneracyReport {
    pub nondegenerate: bool,
    /// Smallest-index element whose degree component commutes with its
    /// entire centralizer, if any.
    pub witness: Option<GroupElement>,
}

/// Lift an alternating pairing (trivial diagonal) to a cocycle whose
/// commutation ratio reproduces it exactly.
///
/// A diagonal value of −1 means the component anticommutes with
/// itself, which no plain cocycle can produce; such pairings are
/// realized instead by tensoring with a sign-graded Grassmann-envelope
/// factor, and this function refuses them.
pub fn alternating_cocycle(b: &Bicharacter) -> Result<Cocycle> {
    for g in b.group().elements() {
        if b.psi(g) != 1 {
            return Err(Error::Validation(format!(
                "the pairing takes value -1 on the diagonal at element {}; only \
                 alternating pairings lift to a plain cocycle — odd diagonals \
                 are realized through the Grassmann-envelope tensor route",
                g.0
            )));
        }
    }
    let cocycle = CommutationFunction::from_bicharacter(b)?.cocycle().clone();
    for g in b.group().elements() {
        for h in b.group().elements() {
            let (x, y) = RootOfUnity::unify(&cocycle.commutation_ratio(g, h)?, &b.value(g, h));
            if x != y {
                return Err(Error::InvariantViolation(
                    "constructed cocycle fails to reproduce the pairing".into(),
                ));
            }
        }
    }
    Ok(cocycle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycles::dihedral_quaternion_cocycle;
    use crate::groups::{d8, klein, zn};

    fn xorshift(state: &mut u64) -> u64 {
        let mut x = *state;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        *state = x;
        x
    }

    fn sign(s: i8) -> RootOfUnity {
        RootOfUnity::from_sign(2, s).unwrap()
    }

    #[test]
    fn canonical_forms_validate() {
        let t = tau_form();
        assert_eq!(t.psi(GroupElement(1)), -1);
        assert!(t.is_nondegenerate());

        let e2 = eta_form(2, 1).unwrap();
        assert!(e2.is_nondegenerate());
        assert!(e2.group().elements().all(|g| e2.psi(g) == 1));
        assert_eq!(e2.value(GroupElement(2), GroupElement(1)), sign(-1));

        let e3 = eta_form(3, 1).unwrap();
        assert!(e3.is_nondegenerate());
        assert_eq!(e3.value_order(), 3);

        let eps = epsilon_form(1).unwrap();
        assert!(eps.is_nondegenerate());
        // Residue (1,0) has index 2, residue (0,1) has index 1.
        assert_eq!(eps.psi(GroupElement(2)), 1);
        assert_eq!(eps.psi(GroupElement(1)), -1);
        assert_eq!(eps.psi(GroupElement(3)), -1);

        let eps2 = epsilon_form(2).unwrap();
        assert!(eps2.is_nondegenerate());
        assert_eq!(eps2.group().order(), 16);

        assert!(eta_form(4, 1).is_err());
        assert!(eta_form(3, 0).is_err());
    }

    #[test]
    fn bicharacter_validation_rejects_bad_input() {
        // The symmetric pairing on Z4 has a fourth root on the
        // diagonal, so it is not skew.
        let z4 = zn(4);
        let i = RootOfUnity::new(4, 1);
        let bad = Bicharacter::from_fn(z4, |a, b| i.pow((a.0 * b.0) as i64));
        assert!(bad.is_err(), "symmetric pairing is not skew");

        // Nonabelian groups are rejected outright.
        assert!(Bicharacter::from_fn(d8(), |_, _| RootOfUnity::one(1)).is_err());

        // Generator tables with ill-fitting orders are rejected.
        let g = klein();
        let bad = vec![
            vec![RootOfUnity::one(4), RootOfUnity::new(4, 1)],
            vec![RootOfUnity::new(4, 3), RootOfUnity::one(4)],
        ];
        assert!(Bicharacter::from_gen_table(g.clone(), &bad).is_err());
        // Non-inverse off-diagonal pair.
        let bad = vec![
            vec![RootOfUnity::one(2), sign(-1)],
            vec![RootOfUnity::one(2), RootOfUnity::one(2)],
        ];
        assert!(Bicharacter::from_gen_table(g, &bad).is_err());
    }

    #[test]
    fn radical_and_minimalize_quotients() {
        // Z4 x Z2 with the generators pairing by a sign: the radical is
        // generated by the square of the first generator, and the
        // quotient is the nondegenerate sign pairing on a Klein group.
        let g = FiniteGroup::from_invariant_factors(&[4, 2]).unwrap();
        let vals = vec![
            vec![RootOfUnity::one(2), sign(-1)],
            vec![sign(-1), RootOfUnity::one(2)],
        ];
        let b = Bicharacter::from_gen_table(g.clone(), &vals).unwrap();
        let rep = b.radical_and_minimalize().unwrap();
        let rad: Vec<usize> = rep.radical.iter().map(|e| e.0).collect();
        assert_eq!(rad, vec![0, 4], "radical is {{0, (2,0)}}");
        assert_eq!(
            rep.quotient.group().invariant_factors().unwrap(),
            &[2, 2]
        );
        assert!(rep.quotient.is_nondegenerate());
        assert!(rep.quotient.group().elements().all(|x| rep.quotient.psi(x) == 1));
        // The unique nondegenerate alternating form on Klein pairs the
        // generators by -1.
        let q = &rep.quotient;
        assert_eq!(q.value(GroupElement(2), GroupElement(1)), sign(-1));

        // A nondegenerate form survives untouched.
        let e3 = eta_form(3, 1).unwrap();
        let rep = e3.radical_and_minimalize().unwrap();
        assert_eq!(rep.radical.len(), 1);
        assert_eq!(rep.quotient.group().order(), 9);
        let mut proj = rep.projection.clone();
        proj.sort();
        proj.dedup();
        assert_eq!(proj.len(), 9, "projection is a bijection");

        // The trivial form collapses to the trivial group.
        let triv = Bicharacter::from_fn(zn(4), |_, _| RootOfUnity::one(1)).unwrap();
        let rep = triv.radical_and_minimalize().unwrap();
        assert_eq!(rep.radical.len(), 4);
        assert_eq!(rep.quotient.group().order(), 1);
        assert!(rep.projection.iter().all(|&p| p == 0));
    }

    #[test]
    fn realized_forms_roundtrip() {
        let z4 = RootOfUnity::new(4, 1);
        let z44 = FiniteGroup::from_invariant_factors(&[4, 4]).unwrap();
        let mixed = Bicharacter::from_gen_table(
            z44,
            &[
                vec![RootOfUnity::one(4), z4],
                vec![z4.inv(), RootOfUnity::one(4)],
            ],
        )
        .unwrap();
        let cases = vec![
            tau_form(),
            eta_form(2, 1).unwrap(),
            eta_form(3, 1).unwrap(),
            epsilon_form(1).unwrap(),
            epsilon_form(2).unwrap(),
            mixed,
            eta_form(2, 1).unwrap().tensor(&tau_form()),
        ];
        for b in cases {
            let cf = CommutationFunction::from_bicharacter(&b).unwrap();
            let back = cf.to_bicharacter().unwrap();
            assert!(back.same_values(&b));
            for g in b.group().elements() {
                assert_eq!(cf.psi(g), b.psi(g));
            }
            let kernel = cf.parity_kernel();
            assert!(kernel.iter().all(|&g| b.psi(g) == 1));
        }
    }

    #[test]
    fn reordering_matches_pairwise_oracle() {
        // Independent check: transform the permuted word back to the
        // original by adjacent swaps, multiplying pairwise bicharacter
        // values; the accumulated scalar must invert the reordering
        // value computed from the realized form.
        let forms = vec![
            eta_form(2, 1).unwrap(),
            epsilon_form(1).unwrap(),
            eta_form(3, 1).unwrap(),
            epsilon_form(2).unwrap(),
        ];
        let mut state = 0x9e3779b97f4a7c15u64;
        for b in forms {
            let cf = CommutationFunction::from_bicharacter(&b).unwrap();
            let n = b.group().order();
            for _ in 0..40 {
                let len = 2 + (xorshift(&mut state) % 4) as usize;
                let word: Vec<GroupElement> = (0..len)
                    .map(|_| GroupElement((xorshift(&mut state) % n as u64) as usize))
                    .collect();
                // Random permutation by sorting random keys.
                let mut perm: Vec<usize> = (0..len).collect();
                for i in (1..len).rev() {
                    let j = (xorshift(&mut state) % (i as u64 + 1)) as usize;
                    perm.swap(i, j);
                }
                let theta = cf.reordering_value(&word, &perm).unwrap();

                let mut current: Vec<usize> = perm.clone();
                let mut acc = RootOfUnity::one(b.value_order());
                // Bubble the permuted word back to identity order.
                loop {
                    let mut swapped = false;
                    for i in 0..len - 1 {
                        if current[i] > current[i + 1] {
                            let u = word[current[i]];
                            let v = word[current[i + 1]];
                            acc = acc.mul_rescaled(&b.value(u, v));
                            current.swap(i, i + 1);
                            swapped = true;
                        }
                    }
                    if !swapped {
                        break;
                    }
                }
                let expect = acc.inv();
                let (x, y) = RootOfUnity::unify(&theta, &expect);
                assert_eq!(x, y, "word {word:?} perm {perm:?}");
            }
        }
    }

    #[test]
    fn reordering_on_the_dihedral_form() {
        let cf = CommutationFunction::even(dihedral_quaternion_cocycle());
        let x = GroupElement(1);
        let x2 = GroupElement(2);
        let x3 = GroupElement(3);
        let y = GroupElement(4);
        // x^2 and y anticommute in the realized algebra.
        assert_eq!(cf.commutation_value(x2, y).unwrap(), sign(-1));
        assert_eq!(cf.reordering_value(&[x2, y], &[1, 0]).unwrap(), sign(-1));
        // x and x^3 commute on the nose.
        assert_eq!(cf.reordering_value(&[x, x3], &[1, 0]).unwrap(), sign(1));
        // Swapping x and y changes the product: not a valid reordering.
        assert!(cf.reordering_value(&[x, y], &[1, 0]).is_err());
        assert!(cf.reordering_value(&[x, y], &[0, 0]).is_err());
        assert!(cf.reordering_value(&[x, y], &[0]).is_err());

        // Composition: for permutations fixing the product, the scalar
        // of a composite equals the product of the step scalars.
        let g = cf.group().clone();
        let mut state = 0xdeadbeefcafef00du64;
        let mut tested = 0;
        for _ in 0..400 {
            let len = 3 + (xorshift(&mut state) % 2) as usize;
            let word: Vec<GroupElement> = (0..len)
                .map(|_| GroupElement((xorshift(&mut state) % 8) as usize))
                .collect();
            let mut sigma: Vec<usize> = (0..len).collect();
            let mut tau: Vec<usize> = (0..len).collect();
            for i in (1..len).rev() {
                let j = (xorshift(&mut state) % (i as u64 + 1)) as usize;
                sigma.swap(i, j);
                let k = (xorshift(&mut state) % (i as u64 + 1)) as usize;
                tau.swap(i, k);
            }
            let prod = |w: &[GroupElement]| {
                w.iter()
                    .fold(GroupElement(0), |acc, &e| g.mul(acc, e))
            };
            let after_sigma: Vec<GroupElement> = sigma.iter().map(|&p| word[p]).collect();
            if prod(&word) != prod(&after_sigma) {
                continue;
            }
            let after_both: Vec<GroupElement> = tau.iter().map(|&p| after_sigma[p]).collect();
            if prod(&after_sigma) != prod(&after_both) {
                continue;
            }
            tested += 1;
            let composite: Vec<usize> = tau.iter().map(|&t| sigma[t]).collect();
            let lhs = cf.reordering_value(&word, &composite).unwrap();
            let a = cf.reordering_value(&word, &sigma).unwrap();
            let b = cf.reordering_value(&after_sigma, &tau).unwrap();
            assert_eq!(lhs, a.mul(&b).unwrap());
        }
        assert!(tested > 20, "not enough product-preserving permutations hit");
    }

    #[test]
    fn products_of_realized_forms() {
        let eps = epsilon_form(1).unwrap();
        let cf = CommutationFunction::from_bicharacter(&eps).unwrap();
        // Matched-degree product squares every commutation value.
        let hat = cf.hat(&cf).unwrap();
        let squared = Bicharacter::from_fn(eps.group().clone(), |a, b| {
            let v = eps.value(a, b);
            v.mul(&v).unwrap()
        })
        .unwrap();
        assert!(hat.to_bicharacter().unwrap().same_values(&squared));
        assert!(hat.group().elements().all(|g| hat.psi(g) == 1));

        // Product grading on the direct product, with both parities odd:
        // the correction cocycle is exercised here.
        let t = tau_form();
        let ct = CommutationFunction::from_bicharacter(&t).unwrap();
        let tt = ct.tensor(&ct).unwrap();
        assert!(tt.to_bicharacter().unwrap().same_values(&t.tensor(&t)));

        let e2 = eta_form(2, 1).unwrap();
        let ce2 = CommutationFunction::from_bicharacter(&e2).unwrap();
        let mixed = ce2.tensor(&ct).unwrap();
        assert!(mixed.to_bicharacter().unwrap().same_values(&e2.tensor(&t)));

        // Mismatched groups cannot be matched degree-wise.
        let c4 = CommutationFunction::even(Cocycle::trivial(zn(4)));
        assert!(ct.hat(&c4).is_err());
        assert!(CommutationFunction::direct_sum(&ct, &c4).is_err());

        // Direct sums demand identical commutation functions and then
        // return them unchanged.
        let shared = CommutationFunction::direct_sum(&ce2, &ce2).unwrap();
        assert!(shared
            .to_bicharacter()
            .unwrap()
            .same_values(&e2));
        let ceps = CommutationFunction::from_bicharacter(&epsilon_form(1).unwrap()).unwrap();
        assert!(CommutationFunction::direct_sum(&ce2, &ceps).is_err());
    }

    #[test]
    fn restriction_of_the_dihedral_form() {
        let cf = CommutationFunction::even(dihedral_quaternion_cocycle());
        let k: Vec<GroupElement> = [0usize, 2, 4, 6].iter().map(|&i| GroupElement(i)).collect();
        let (rk, map) = cf.restrict(&k).unwrap();
        assert_eq!(rk.group().invariant_factors().unwrap(), &[2, 2]);
        assert_eq!(map.len(), 4);
        let b = rk.to_bicharacter().unwrap();
        assert!(b.is_nondegenerate());
        assert!(b.same_values(&eta_form(2, 1).unwrap()));
    }

    #[test]
    fn two_torsion_of_the_order_four_symbol_is_inert() {
        // θ((a1,a2),(b1,b2)) = ζ4^(a2 b1 - a1 b2) on doubled arguments
        // gives ζ4 to a multiple of 4, so the square subgroup pairs
        // trivially with itself and the restriction collapses.
        let b = eta_form(2, 2).unwrap();
        let g = b.group().clone();
        let sub: Vec<GroupElement> = [[0i64, 0], [2, 0], [0, 2], [2, 2]]
            .iter()
            .map(|r| g.element_from_residues(r).unwrap())
            .collect();
        for &x in &sub {
            for &y in &sub {
                assert!(b.value(x, y).is_one());
            }
        }
        let (restricted, _) = b.restrict(&sub).unwrap();
        assert_eq!(restricted.radical().len(), 4);
        let report = restricted.radical_and_minimalize().unwrap();
        assert_eq!(report.quotient.group().order(), 1);
    }

    #[test]
    fn alternating_pairings_lift_to_cocycles() {
        for b in [eta_form(2, 1).unwrap(), eta_form(3, 1).unwrap(), eta_form(2, 2).unwrap()] {
            let cocycle = alternating_cocycle(&b).unwrap();
            for g in b.group().elements() {
                for h in b.group().elements() {
                    let ratio = cocycle.commutation_ratio(g, h).unwrap();
                    let (x, y) = RootOfUnity::unify(&ratio, &b.value(g, h));
                    assert_eq!(x, y);
                }
            }
        }

        // Odd diagonals are refused and the message points at the
        // envelope route.
        for b in [tau_form(), epsilon_form(1).unwrap()] {
            let err = alternating_cocycle(&b).unwrap_err();
            assert!(err.to_string().contains("Grassmann"), "{err}");
        }
    }

    #[test]
    fn hat_powers_trivialize_at_the_group_order() {
        let forms = vec![
            CommutationFunction::from_bicharacter(&eta_form(2, 1).unwrap()).unwrap(),
            CommutationFunction::from_bicharacter(&epsilon_form(2).unwrap()).unwrap(),
            CommutationFunction::from_bicharacter(&eta_form(2, 2).unwrap()).unwrap(),
        ];
        for cf in forms {
            let n = cf.group().order();
            let mut acc = cf.clone();
            for _ in 1..n {
                acc = acc.hat(&cf).unwrap();
            }
            assert!(acc.group().elements().all(|g| acc.parity(g) == 0));
            for g in acc.group().elements() {
                for h in acc.group().elements() {
                    if acc.group().mul(g, h) == acc.group().mul(h, g) {
                        assert!(acc.commutation_value(g, h).unwrap().is_one());
                    }
                }
            }
        }
    }

    #[test]
    fn degeneracy_witnesses_on_the_dihedral_group() {
        // With every component even, the rotation x commutes projectively
        // with its whole centralizer: a degeneracy witness.
        let even = CommutationFunction::even(dihedral_quaternion_cocycle());
        let report = even.nondegeneracy().unwrap();
        assert!(!report.nondegenerate);
        assert_eq!(report.witness, Some(GroupElement(1)));

        // Declaring the coset of x odd makes x anticommute with
        // itself, clearing the obstruction.
        let parity: Vec<u8> = (0..8).map(|i| (i % 2) as u8).collect();
        let cf = CommutationFunction::new(dihedral_quaternion_cocycle(), parity).unwrap();
        let report = cf.nondegeneracy().unwrap();
        assert!(report.nondegenerate);
        assert_eq!(report.witness, None);

        // Abelian groups: the general report agrees with the radical.
        let b = eta_form(2, 1).unwrap().tensor(&trivial_pairing(&zn(2)));
        let cf = CommutationFunction::from_bicharacter(&b).unwrap();
        let report = cf.nondegeneracy().unwrap();
        assert!(!report.nondegenerate);
        let smallest_nontrivial = b
            .radical()
            .into_iter()
            .filter(|&g| g != b.group().identity())
            .min();
        assert_eq!(report.witness, smallest_nontrivial);
    }

    fn trivial_pairing(g: &Arc<FiniteGroup>) -> Bicharacter {
        Bicharacter::from_fn(g.clone(), |_, _| RootOfUnity::one(1)).unwrap()
    }
}
