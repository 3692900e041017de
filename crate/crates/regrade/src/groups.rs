//! Finite groups: abelian groups presented by invariant factors, and
//! arbitrary small groups presented by Cayley tables.
//!
//! Elements are indices into a fixed enumeration. For an abelian group
//! with invariant factors `[n1, ..., nk]` the element of index `i` is
//! the mixed-radix tuple of residues with the first factor most
//! significant, so the identity is always index 0. Table groups must
//! place the identity at index 0 as well; the constructor checks the
//! full set of group axioms.

use crate::cyclo::lcm;
use crate::error::{Error, Result};
use serde::Deserialize;
use std::collections::BTreeSet;
use std::sync::Arc;

/// An element of a [`FiniteGroup`], identified by its index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElement(pub usize);

#[derive(Clone, Debug)]
enum GroupKind {
    /// Invariant factors, each at least 2 (the trivial group has none).
    Abelian(Vec<u32>),
    /// Full Cayley table: `table[a][b]` is the index of `a * b`.
    Table(Vec<Vec<usize>>),
}

#[derive(Clone, Debug)]
pub struct FiniteGroup {
    kind: GroupKind,
    order: usize,
    exponent: u32,
    abelian: bool,
    inverses: Vec<usize>,
    name: Option<String>,
}

impl FiniteGroup {
    pub fn from_invariant_factors(factors: &[u32]) -> Result<Arc<FiniteGroup>> {
        if factors.iter().any(|&f| f == 0) {
            return Err(Error::BadGroup("zero invariant factor".into()));
        }
        let factors: Vec<u32> = factors.iter().copied().filter(|&f| f > 1).collect();
        let order: usize = factors.iter().map(|&f| f as usize).product();
        if order > 1 << 20 {
            return Err(Error::BadGroup(format!("group order {order} too large")));
        }
        let exponent = factors.iter().fold(1u32, |a, &b| lcm(a, b));
        let kind = GroupKind::Abelian(factors);
        let inverses = (0..order)
            .map(|i| Self::raw_inv(&kind, order, i))
            .collect();
        Ok(Arc::new(FiniteGroup {
            kind,
            order,
            exponent,
            abelian: true,
            inverses,
            name: None,
        }))
    }

    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Arc<FiniteGroup>> {
        let n = table.len();
        if n == 0 {
            return Err(Error::BadGroup("empty Cayley table".into()));
        }
        for row in &table {
            if row.len() != n || row.iter().any(|&e| e >= n) {
                return Err(Error::BadGroup("Cayley table is not square over 0..n".into()));
            }
        }
        for i in 0..n {
            if table[0][i] != i || table[i][0] != i {
                return Err(Error::BadGroup("index 0 is not an identity".into()));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::BadGroup(format!(
                            "associativity fails at ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        let mut inverses = vec![usize::MAX; n];
        for a in 0..n {
            match (0..n).find(|&b| table[a][b] == 0 && table[b][a] == 0) {
                Some(b) => inverses[a] = b,
                None => return Err(Error::BadGroup(format!("element {a} has no inverse"))),
            }
        }
        let abelian = (0..n).all(|a| (0..n).all(|b| table[a][b] == table[b][a]));
        let kind = GroupKind::Table(table);
        let mut g = FiniteGroup {
            kind,
            order: n,
            exponent: 1,
            abelian,
            inverses,
            name: None,
        };
        g.exponent = (0..n)
            .map(|i| g.element_order(GroupElement(i)))
            .fold(1u32, lcm);
        Ok(Arc::new(g))
    }

    fn with_name(self: Arc<Self>, name: &str) -> Arc<FiniteGroup> {
        let mut g = (*self).clone();
        g.name = Some(name.to_string());
        Arc::new(g)
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_abelian(&self) -> bool {
        self.abelian
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(0)
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> {
        (0..self.order).map(GroupElement)
    }

    pub fn check_element(&self, g: GroupElement) -> Result<()> {
        if g.0 < self.order {
            Ok(())
        } else {
            Err(Error::ForeignElement(g.0, self.order))
        }
    }

    fn raw_mul(kind: &GroupKind, order: usize, a: usize, b: usize) -> usize {
        match kind {
            GroupKind::Table(t) => t[a][b],
            GroupKind::Abelian(factors) => {
                let _ = order;
                let mut out = 0usize;
                let mut ra = a;
                let mut rb = b;
                let mut tail: usize = factors.iter().map(|&f| f as usize).product();
                for &f in factors {
                    let f = f as usize;
                    tail /= f;
                    let xa = ra / tail;
                    let xb = rb / tail;
                    ra %= tail;
                    rb %= tail;
                    out = out * f + (xa + xb) % f;
                }
                out
            }
        }
    }

    fn raw_inv(kind: &GroupKind, order: usize, a: usize) -> usize {
        match kind {
            GroupKind::Table(_) => unreachable!("table inverses are precomputed"),
            GroupKind::Abelian(factors) => {
                let _ = order;
                let mut out = 0usize;
                let mut ra = a;
                let mut tail: usize = factors.iter().map(|&f| f as usize).product();
                for &f in factors {
                    let f = f as usize;
                    tail /= f;
                    let xa = ra / tail;
                    ra %= tail;
                    out = out * f + (f - xa) % f;
                }
                out
            }
        }
    }

    pub fn mul(&self, a: GroupElement, b: GroupElement) -> GroupElement {
        GroupElement(Self::raw_mul(&self.kind, self.order, a.0, b.0))
    }

    pub fn inv(&self, a: GroupElement) -> GroupElement {
        GroupElement(self.inverses[a.0])
    }

    pub fn conj(&self, t: GroupElement, g: GroupElement) -> GroupElement {
        self.mul(self.mul(t, g), self.inv(t))
    }

    pub fn commutator(&self, a: GroupElement, b: GroupElement) -> GroupElement {
        self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))
    }

    pub fn element_order(&self, g: GroupElement) -> u32 {
        let mut k = 1u32;
        let mut acc = g;
        while acc.0 != 0 {
            acc = self.mul(acc, g);
            k += 1;
        }
        k
    }

    pub fn pow(&self, g: GroupElement, k: i64) -> GroupElement {
        let mut e = k.rem_euclid(self.element_order(g) as i64);
        let mut acc = self.identity();
        let mut base = g;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Invariant factors of an abelian group.
    pub fn invariant_factors(&self) -> Option<&[u32]> {
        match &self.kind {
            GroupKind::Abelian(f) => Some(f),
            GroupKind::Table(_) => None,
        }
    }

    /// Residue tuple of an abelian element (one entry per invariant factor).
    pub fn residues(&self, g: GroupElement) -> Option<Vec<u32>> {
        let factors = self.invariant_factors()?;
        let mut out = Vec::with_capacity(factors.len());
        let mut r = g.0;
        let mut tail: usize = factors.iter().map(|&f| f as usize).product();
        for &f in factors {
            tail /= f as usize;
            out.push((r / tail) as u32);
            r %= tail;
        }
        Some(out)
    }

    /// Element from a residue tuple (entries taken mod the factors).
    pub fn element_from_residues(&self, residues: &[i64]) -> Result<GroupElement> {
        let factors = self
            .invariant_factors()
            .ok_or(Error::NotAbelian("element_from_residues"))?;
        if residues.len() != factors.len() {
            return Err(Error::BadGroup(format!(
                "expected {} residues, got {}",
                factors.len(),
                residues.len()
            )));
        }
        let mut idx = 0usize;
        for (&r, &f) in residues.iter().zip(factors) {
            idx = idx * f as usize + r.rem_euclid(f as i64) as usize;
        }
        Ok(GroupElement(idx))
    }

    /// A generating set: the canonical generators for abelian groups,
    /// every element for table groups.
    pub fn generators(&self) -> Vec<GroupElement> {
        match &self.kind {
            GroupKind::Abelian(factors) => {
                let k = factors.len();
                (0..k)
                    .map(|i| {
                        let mut res = vec![0i64; k];
                        res[i] = 1;
                        self.element_from_residues(&res).unwrap()
                    })
                    .collect()
            }
            GroupKind::Table(_) => self.elements().collect(),
        }
    }

    pub fn centralizer(&self, g: GroupElement) -> Vec<GroupElement> {
        self.elements()
            .filter(|&h| self.mul(g, h) == self.mul(h, g))
            .collect()
    }

    pub fn center(&self) -> Vec<GroupElement> {
        self.elements()
            .filter(|&z| self.elements().all(|h| self.mul(z, h) == self.mul(h, z)))
            .collect()
    }

    /// Conjugacy classes, each sorted, ordered by smallest member; the
    /// identity's class comes first.
    pub fn conjugacy_classes(&self) -> Vec<Vec<GroupElement>> {
        let mut seen = vec![false; self.order];
        let mut classes = Vec::new();
        for g in self.elements() {
            if seen[g.0] {
                continue;
            }
            let mut class: BTreeSet<GroupElement> = BTreeSet::new();
            for t in self.elements() {
                class.insert(self.conj(t, g));
            }
            for &c in &class {
                seen[c.0] = true;
            }
            classes.push(class.into_iter().collect());
        }
        classes
    }

    pub fn subgroup_generated(&self, gens: &[GroupElement]) -> Vec<GroupElement> {
        let mut in_set = vec![false; self.order];
        in_set[0] = true;
        let mut frontier = vec![GroupElement(0)];
        while let Some(h) = frontier.pop() {
            for &g in gens {
                for next in [self.mul(h, g), self.mul(h, self.inv(g))] {
                    if !in_set[next.0] {
                        in_set[next.0] = true;
                        frontier.push(next);
                    }
                }
            }
        }
        (0..self.order)
            .filter(|&i| in_set[i])
            .map(GroupElement)
            .collect()
    }

    pub fn is_subgroup(&self, set: &[GroupElement]) -> bool {
        if !set.iter().any(|&g| g.0 == 0) {
            return false;
        }
        let mem: BTreeSet<usize> = set.iter().map(|g| g.0).collect();
        if mem.len() != set.len() || mem.iter().any(|&i| i >= self.order) {
            return false;
        }
        set.iter().all(|&a| {
            set.iter()
                .all(|&b| mem.contains(&self.mul(a, b).0))
        })
    }

    /// Left-coset representatives of a subgroup: the smallest index in
    /// each coset, listed in ascending order (the identity first).
    pub fn coset_reps(&self, subgroup: &[GroupElement]) -> Result<Vec<GroupElement>> {
        if !self.is_subgroup(subgroup) {
            return Err(Error::NotASubgroup(format!(
                "{:?} is not a subgroup",
                subgroup.iter().map(|g| g.0).collect::<Vec<_>>()
            )));
        }
        let mut assigned = vec![false; self.order];
        let mut reps = Vec::new();
        for g in self.elements() {
            if assigned[g.0] {
                continue;
            }
            reps.push(g);
            for &h in subgroup {
                assigned[self.mul(g, h).0] = true;
            }
        }
        Ok(reps)
    }

    /// All subgroups of index 2. These are exactly the kernels of the
    /// surjections onto a 2-element group, computed through the quotient
    /// by squares and commutators (an elementary abelian 2-group).
    pub fn index2_subgroups(&self) -> Vec<Vec<GroupElement>> {
        let mut gens: Vec<GroupElement> = self.elements().map(|g| self.mul(g, g)).collect();
        for a in self.elements() {
            for b in self.elements() {
                gens.push(self.commutator(a, b));
            }
        }
        let d = self.subgroup_generated(&gens);
        // The coset space of D is an elementary abelian 2-group. Any
        // index-2 subgroup contains D, so it is the preimage of an
        // index-2 subgroup of that coset space: a union of half the
        // cosets, containing D, closed under multiplication.
        let reps = self.coset_reps(&d).unwrap();
        let coset_of: Vec<usize> = {
            let mut map = vec![usize::MAX; self.order];
            for (ri, &r) in reps.iter().enumerate() {
                for &h in &d {
                    map[self.mul(r, h).0] = ri;
                }
            }
            map
        };
        let k = reps.len();
        if k == 1 {
            return Vec::new();
        }
        let mut out = Vec::new();
        let half = k / 2;
        for mask in 0usize..(1 << k) {
            if mask & 1 != 1 || mask.count_ones() as usize != half {
                continue;
            }
            let members: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
            let closed = members.iter().all(|&i| {
                members
                    .iter()
                    .all(|&j| mask >> coset_of[self.mul(reps[i], reps[j]).0] & 1 == 1)
            });
            if closed {
                let mut sub: Vec<GroupElement> = Vec::new();
                for &i in &members {
                    for &h in &d {
                        sub.push(self.mul(reps[i], h));
                    }
                }
                sub.sort();
                out.push(sub);
            }
        }
        out.sort();
        out
    }

    pub fn direct_product(a: &Arc<FiniteGroup>, b: &Arc<FiniteGroup>) -> Arc<FiniteGroup> {
        match (&a.kind, &b.kind) {
            (GroupKind::Abelian(fa), GroupKind::Abelian(fb)) => {
                let mut f = fa.clone();
                f.extend_from_slice(fb);
                FiniteGroup::from_invariant_factors(&f).unwrap()
            }
            _ => {
                let n = a.order * b.order;
                let mut table = vec![vec![0usize; n]; n];
                for i1 in 0..a.order {
                    for j1 in 0..b.order {
                        for i2 in 0..a.order {
                            for j2 in 0..b.order {
                                let x = a.mul(GroupElement(i1), GroupElement(i2)).0;
                                let y = b.mul(GroupElement(j1), GroupElement(j2)).0;
                                table[i1 * b.order + j1][i2 * b.order + j2] = x * b.order + y;
                            }
                        }
                    }
                }
                FiniteGroup::from_table(table).unwrap()
            }
        }
    }

    /// Index of the pair `(x, y)` inside a direct product built by
    /// [`FiniteGroup::direct_product`].
    pub fn pair_index(b_order: usize, x: GroupElement, y: GroupElement) -> GroupElement {
        GroupElement(x.0 * b_order + y.0)
    }

    pub fn unpair_index(b_order: usize, g: GroupElement) -> (GroupElement, GroupElement) {
        (GroupElement(g.0 / b_order), GroupElement(g.0 % b_order))
    }

    /// Build a standalone group from a subgroup's element list; returns
    /// the new group together with the map new-index -> ambient element.
    /// The subgroup elements are renumbered in ascending ambient order,
    /// which keeps the identity at index 0.
    pub fn subgroup_as_group(
        &self,
        subgroup: &[GroupElement],
    ) -> Result<(Arc<FiniteGroup>, Vec<GroupElement>)> {
        if !self.is_subgroup(subgroup) {
            return Err(Error::NotASubgroup(format!(
                "{:?} is not a subgroup",
                subgroup.iter().map(|g| g.0).collect::<Vec<_>>()
            )));
        }
        let mut members: Vec<GroupElement> = subgroup.to_vec();
        members.sort();
        let mut back = vec![usize::MAX; self.order];
        for (i, &m) in members.iter().enumerate() {
            back[m.0] = i;
        }
        let n = members.len();
        let mut table = vec![vec![0usize; n]; n];
        for i in 0..n {
            for j in 0..n {
                table[i][j] = back[self.mul(members[i], members[j]).0];
            }
        }
        Ok((FiniteGroup::from_table(table)?, members))
    }

    /// Present a subgroup whose elements commute pairwise by invariant
    /// factors. Returns the abstract group together with the map
    /// new-index -> ambient element, which is an isomorphism onto the
    /// subgroup (the ambient group itself may be nonabelian).
    pub fn abelian_presentation(
        &self,
        subgroup: &[GroupElement],
    ) -> Result<(Arc<FiniteGroup>, Vec<GroupElement>)> {
        if !self.is_subgroup(subgroup) {
            return Err(Error::NotASubgroup(format!(
                "{:?} is not a subgroup",
                subgroup.iter().map(|g| g.0).collect::<Vec<_>>()
            )));
        }
        for &a in subgroup {
            for &b in subgroup {
                if self.mul(a, b) != self.mul(b, a) {
                    return Err(Error::NotAbelian("abelian_presentation"));
                }
            }
        }
        // Greedy generating set, largest element order first so the
        // relation search box below stays small.
        let mut candidates: Vec<GroupElement> = subgroup.to_vec();
        candidates.sort_by_key(|&g| (std::cmp::Reverse(self.element_order(g)), g));
        let mut gens: Vec<GroupElement> = Vec::new();
        let mut span = vec![GroupElement(0)];
        for &c in &candidates {
            if !span.contains(&c) {
                gens.push(c);
                span = self.subgroup_generated(&gens);
                if span.len() == subgroup.len() {
                    break;
                }
            }
        }
        let m = gens.len();
        if m == 0 {
            return Ok((
                FiniteGroup::from_invariant_factors(&[])?,
                vec![GroupElement(0)],
            ));
        }
        let ords: Vec<i64> = gens.iter().map(|&g| self.element_order(g) as i64).collect();
        let box_size: i64 = ords.iter().product();
        if box_size > 1 << 20 {
            return Err(Error::BadGroup(format!(
                "relation search space {box_size} too large"
            )));
        }
        // Relation lattice of the generators: exponent vectors that
        // multiply to the identity, spanned by the order relations plus
        // every representative found in the fundamental box.
        let mut rows: Vec<Vec<i64>> = (0..m)
            .map(|i| (0..m).map(|j| if i == j { ords[i] } else { 0 }).collect())
            .collect();
        let word = |x: &[i64]| -> GroupElement {
            let mut acc = GroupElement(0);
            for (i, &e) in x.iter().enumerate() {
                acc = self.mul(acc, self.pow(gens[i], e));
            }
            acc
        };
        for idx in 0..box_size {
            let mut x = vec![0i64; m];
            let mut r = idx;
            for i in (0..m).rev() {
                x[i] = r % ords[i];
                r /= ords[i];
            }
            if idx != 0 && word(&x) == GroupElement(0) {
                rows.push(x);
            }
        }
        let (d, _, vinv) = smith_normal_form(&rows, m);
        let keep: Vec<usize> = (0..m).filter(|&i| d[i] > 1).collect();
        let factors: Vec<u32> = keep.iter().map(|&i| d[i] as u32).collect();
        let abstract_group = FiniteGroup::from_invariant_factors(&factors)?;
        let ts: Vec<GroupElement> = keep.iter().map(|&i| word(&vinv[i])).collect();
        let mut map = Vec::with_capacity(abstract_group.order());
        for g in abstract_group.elements() {
            let res = abstract_group.residues(g).unwrap();
            let mut acc = GroupElement(0);
            for (t, &r) in ts.iter().zip(&res) {
                acc = self.mul(acc, self.pow(*t, r as i64));
            }
            map.push(acc);
        }
        let mut seen: Vec<GroupElement> = map.clone();
        seen.sort();
        seen.dedup();
        let mut expect: Vec<GroupElement> = subgroup.to_vec();
        expect.sort();
        if seen != expect {
            return Err(Error::InvariantViolation(
                "abelian presentation does not enumerate the subgroup".into(),
            ));
        }
        Ok((abstract_group, map))
    }
}

/// Cyclic group of order n.
pub fn zn(n: u32) -> Arc<FiniteGroup> {
    FiniteGroup::from_invariant_factors(&[n])
        .unwrap()
        .with_name(&format!("z{n}"))
}

/// Klein four-group.
pub fn klein() -> Arc<FiniteGroup> {
    FiniteGroup::from_invariant_factors(&[2, 2])
        .unwrap()
        .with_name("klein")
}

/// Symmetric group on three letters, presented as the dihedral group of
/// the triangle: elements r^a s^b with r^3 = s^2 = e, s r s = r^2.
/// Index = b*3 + a.
pub fn s3() -> Arc<FiniteGroup> {
    let idx = |a: usize, b: usize| b * 3 + a;
    let mut table = vec![vec![0usize; 6]; 6];
    for a1 in 0..3 {
        for b1 in 0..2 {
            for a2 in 0..3 {
                for b2 in 0..2 {
                    // (r^a1 s^b1)(r^a2 s^b2) = r^(a1 + a2*2^b1) s^(b1+b2)
                    let a = (a1 + a2 * if b1 == 1 { 2 } else { 1 }) % 3;
                    let b = (b1 + b2) % 2;
                    table[idx(a1, b1)][idx(a2, b2)] = idx(a, b);
                }
            }
        }
    }
    FiniteGroup::from_table(table).unwrap().with_name("s3")
}

/// Dihedral group of order 8: x^4 = y^2 = e, y x y^{-1} = x^3.
/// Elements x^a y^b with index b*4 + a, so the enumeration is
/// e, x, x^2, x^3, y, xy, x^2y, x^3y.
pub fn d8() -> Arc<FiniteGroup> {
    let idx = |a: usize, b: usize| b * 4 + a;
    let mut table = vec![vec![0usize; 8]; 8];
    for a1 in 0..4 {
        for b1 in 0..2 {
            for a2 in 0..4 {
                for b2 in 0..2 {
                    let a = (a1 + a2 * if b1 == 1 { 3 } else { 1 }) % 4;
                    let b = (b1 + b2) % 2;
                    table[idx(a1, b1)][idx(a2, b2)] = idx(a, b);
                }
            }
        }
    }
    FiniteGroup::from_table(table).unwrap().with_name("d8")
}

/// Generalized quaternion group of order 16:
/// u^8 = e, u^4 = v^2, v u v^{-1} = u^{-1}.
/// Elements u^a v^b with a mod 8, b mod 2, index b*8 + a.
pub fn q16() -> Arc<FiniteGroup> {
    let idx = |a: usize, b: usize| b * 8 + a;
    let mut table = vec![vec![0usize; 16]; 16];
    for a1 in 0..8 {
        for b1 in 0..2 {
            for a2 in 0..8 {
                for b2 in 0..2 {
                    let mut a = a1 + a2 * if b1 == 1 { 7 } else { 1 };
                    let mut b = b1 + b2;
                    if b >= 2 {
                        // v^2 = u^4
                        b -= 2;
                        a += 4;
                    }
                    table[idx(a1, b1)][idx(a2, b2)] = idx(a % 8, b);
                }
            }
        }
    }
    FiniteGroup::from_table(table).unwrap().with_name("q16")
}

/// JSON descriptor for a group: a builtin name, `{"abelian": [...]}`,
/// `{"table": [[...]]}` or `{"product": [d1, d2, ...]}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum GroupDescriptor {
    Name(String),
    Abelian { abelian: Vec<u32> },
    Table { table: Vec<Vec<usize>> },
    Product { product: Vec<GroupDescriptor> },
}

pub fn group_from_descriptor(desc: &GroupDescriptor) -> Result<Arc<FiniteGroup>> {
    match desc {
        GroupDescriptor::Name(name) => group_by_name(name),
        GroupDescriptor::Abelian { abelian } => FiniteGroup::from_invariant_factors(abelian),
        GroupDescriptor::Table { table } => FiniteGroup::from_table(table.clone()),
        GroupDescriptor::Product { product } => {
            if product.is_empty() {
                return Err(Error::BadGroup("empty product".into()));
            }
            let mut acc = group_from_descriptor(&product[0])?;
            for d in &product[1..] {
                let next = group_from_descriptor(d)?;
                acc = FiniteGroup::direct_product(&acc, &next);
            }
            Ok(acc)
        }
    }
}

pub fn group_by_name(name: &str) -> Result<Arc<FiniteGroup>> {
    match name {
        "d8" => Ok(d8()),
        "q16" => Ok(q16()),
        "s3" => Ok(s3()),
        "klein" => Ok(klein()),
        _ => {
            if let Some(n) = name.strip_prefix('z') {
                if let Ok(n) = n.parse::<u32>() {
                    if n >= 1 {
                        return Ok(zn(n));
                    }
                }
            }
            Err(Error::BadGroup(format!("unknown group name: {name}")))
        }
    }
}

/// Smith normal form over Z for the relation matrix of a finite abelian
/// quotient. `rows` span a sublattice of Z^k of full rank; returns
/// `(diag, v, vinv)` where `U * R * V = diag(d)` for unimodular U, V with
/// `d_1 | d_2 | ... | d_k`, and `vinv` is `V^{-1}` (its row `i` expresses
/// the i-th new generator as a word in the old ones, while `x * V` takes
/// old coordinates to new ones).
pub(crate) fn smith_normal_form(
    rows: &[Vec<i64>],
    k: usize,
) -> (Vec<i64>, Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let mut m: Vec<Vec<i64>> = rows.to_vec();
    let nrows = m.len();
    assert!(m.iter().all(|r| r.len() == k));
    // V tracks column operations; VINV tracks the inverse row operations.
    let mut v: Vec<Vec<i64>> = (0..k)
        .map(|i| (0..k).map(|j| i64::from(i == j)).collect())
        .collect();
    let mut vinv = v.clone();

    let col_swap = |m: &mut Vec<Vec<i64>>,
                    v: &mut Vec<Vec<i64>>,
                    vinv: &mut Vec<Vec<i64>>,
                    i: usize,
                    j: usize| {
        for row in m.iter_mut().chain(v.iter_mut()) {
            row.swap(i, j);
        }
        vinv.swap(i, j);
    };
    // col_j += c * col_i  corresponds to  vinv_row_i -= c * vinv_row_j
    let col_addmul = |m: &mut Vec<Vec<i64>>,
                      v: &mut Vec<Vec<i64>>,
                      vinv: &mut Vec<Vec<i64>>,
                      j: usize,
                      i: usize,
                      c: i64| {
        for row in m.iter_mut().chain(v.iter_mut()) {
            row[j] += c * row[i];
        }
        for t in 0..k {
            let w = vinv[j][t];
            vinv[i][t] -= c * w;
        }
    };

    let mut d = vec![0i64; k];
    for t in 0..k {
        loop {
            // Find the smallest-magnitude nonzero entry in the remaining block.
            let mut best: Option<(usize, usize)> = None;
            for r in t..nrows {
                for c in t..k {
                    if m[r][c] != 0
                        && best.map_or(true, |(br, bc)| m[r][c].abs() < m[br][bc].abs())
                    {
                        best = Some((r, c));
                    }
                }
            }
            let (br, bc) = match best {
                Some(p) => p,
                None => panic!("relation lattice is not of full rank"),
            };
            m.swap(t, br);
            if bc != t {
                col_swap(&mut m, &mut v, &mut vinv, t, bc);
            }
            let p = m[t][t];
            // Reduce the row and column against the pivot.
            let mut clean = true;
            for r in t + 1..nrows {
                let q = m[r][t].div_euclid(p);
                if q != 0 {
                    for c in t..k {
                        m[r][c] -= q * m[t][c];
                    }
                }
                if m[r][t] != 0 {
                    clean = false;
                }
            }
            for c in t + 1..k {
                let q = m[t][c].div_euclid(p);
                if q != 0 {
                    col_addmul(&mut m, &mut v, &mut vinv, c, t, -q);
                }
                if m[t][c] != 0 {
                    clean = false;
                }
            }
            if clean {
                d[t] = p.abs();
                break;
            }
        }
    }
    // Enforce the divisibility chain d_1 | d_2 | ... by folding in pairs:
    // diag(a, b) ~ diag(gcd, lcm) under the unimodular row transform
    // T = [[u, w], [-b/g, a/g]] (with u*a + w*b = g) applied to the new
    // generators, matched by the column transform T^{-1} on V.
    loop {
        let mut settled = true;
        for t in 0..k.saturating_sub(1) {
            if d[t + 1] % d[t] != 0 {
                settled = false;
                let a = d[t];
                let b = d[t + 1];
                let (g, u, w) = ext_gcd(a, b);
                let l = a / g * b;
                let row_t = vinv[t].clone();
                let row_t1 = vinv[t + 1].clone();
                for c in 0..k {
                    vinv[t][c] = u * row_t[c] + w * row_t1[c];
                    vinv[t + 1][c] = -(b / g) * row_t[c] + (a / g) * row_t1[c];
                }
                for row in v.iter_mut() {
                    let (x, y) = (row[t], row[t + 1]);
                    row[t] = (a / g) * x + (b / g) * y;
                    row[t + 1] = -w * x + u * y;
                }
                d[t] = g;
                d[t + 1] = l;
            }
        }
        if settled {
            break;
        }
    }
    (d, v, vinv)
}

/// Extended gcd: returns (g, u, v) with u*a + v*b = g >= 0.
pub(crate) fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        if a >= 0 {
            (a, 1, 0)
        } else {
            (-a, -1, 0)
        }
    } else {
        let (g, u, v) = ext_gcd(b, a % b);
        (g, v, u - (a / b) * v)
    }
}
