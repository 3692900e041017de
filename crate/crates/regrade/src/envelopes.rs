//! Finite-dimensional graded algebras given by explicit structure
//! constants: truncated Grassmann algebras and Grassmann envelopes,
//! matched-degree (hat) tensor products, direct sums, built-in
//! examples, regularity checking with recovery of the commutation
//! scalars, sorted normal forms for graded monomials, the coefficient
//! twist `f ↦ f^θ`, and exact bounded-degree graded-identity
//! decisions.

use crate::commfun::CommutationFunction;
use crate::cyclo::{lcm, CycNumber, RootOfUnity};
use crate::error::{Error, Result};
use crate::groups::{FiniteGroup, GroupElement};
use crate::linalg::{CycField, QCyc, SpanBuilder};
use crate::twisted::TwistedAlgebra;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Exterior algebra on `rank` anticommuting square-zero generators,
/// with basis monomials encoded as bitmasks.
#[derive(Clone, Copy)]
pub struct TruncatedGrassmann {
    rank: u32,
}

impl TruncatedGrassmann {
    pub fn new(rank: u32) -> Result<TruncatedGrassmann> {
        if rank > 16 {
            return Err(Error::Validation(format!(
                "Grassmann rank {rank} too large; the basis would have 2^{rank} monomials"
            )));
        }
        Ok(TruncatedGrassmann { rank })
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn dim(&self) -> usize {
        1usize << self.rank
    }

    /// Parity of a basis monomial: the number of generators in it,
    /// modulo 2.
    pub fn parity(&self, mask: u32) -> u8 {
        (mask.count_ones() % 2) as u8
    }

    /// Product of two basis monomials: zero on overlapping supports,
    /// otherwise the union monomial with the sign of the interleaving
    /// permutation.
    pub fn product(&self, a: u32, b: u32) -> Option<(i8, u32)> {
        if a & b != 0 {
            return None;
        }
        let mut inversions = 0u32;
        for j in 0..self.rank {
            if b & (1 << j) != 0 {
                inversions += (a >> (j + 1)).count_ones();
            }
        }
        let sign = if inversions % 2 == 0 { 1 } else { -1 };
        Some((sign, a | b))
    }
}

/// A finite-dimensional algebra with a basis of known degrees and
/// explicit structure constants.
#[derive(Clone)]
pub struct GradedAlgebra {
    group: Arc<FiniteGroup>,
    degree: Vec<GroupElement>,
    /// `products[i][j]` is the expansion of `b_i · b_j` in the basis.
    products: Vec<Vec<Vec<(usize, CycNumber)>>>,
    coeff_order: u32,
}

impl GradedAlgebra {
    /// Validate degrees and structure constants: every product term
    /// must land in the component of the product degree.
    pub fn new(
        group: Arc<FiniteGroup>,
        degree: Vec<GroupElement>,
        products: Vec<Vec<Vec<(usize, CycNumber)>>>,
    ) -> Result<GradedAlgebra> {
        let d = degree.len();
        if d == 0 {
            return Err(Error::Validation("an algebra needs a nonempty basis".into()));
        }
        for &g in &degree {
            group.check_element(g)?;
        }
        if products.len() != d || products.iter().any(|row| row.len() != d) {
            return Err(Error::Validation(format!(
                "structure constants must form a {d}×{d} table"
            )));
        }
        let mut coeff_order = 2;
        for row in &products {
            for cell in row {
                for (k, c) in cell {
                    if *k >= d {
                        return Err(Error::Validation(format!(
                            "product term index {k} out of range"
                        )));
                    }
                    coeff_order = lcm(coeff_order, c.order);
                }
            }
        }
        let mut normalized = Vec::with_capacity(d);
        for (i, row) in products.into_iter().enumerate() {
            let mut out_row = Vec::with_capacity(d);
            for (j, cell) in row.into_iter().enumerate() {
                let target = group.mul(degree[i], degree[j]);
                let mut acc: BTreeMap<usize, CycNumber> = BTreeMap::new();
                for (k, c) in cell {
                    let c = c.change_order(coeff_order)?;
                    let entry = acc
                        .entry(k)
                        .or_insert_with(|| CycNumber::zero(coeff_order));
                    *entry = entry.add(&c);
                }
                let mut clean = Vec::new();
                for (k, c) in acc {
                    if c.is_zero() {
                        continue;
                    }
                    if degree[k] != target {
                        return Err(Error::Validation(format!(
                            "product of basis {i} (degree {}) and {j} (degree {}) has a term \
                             at basis {k} of degree {}, outside the product component {}",
                            degree[i].0, degree[j].0, degree[k].0, target.0
                        )));
                    }
                    clean.push((k, c));
                }
                out_row.push(clean);
            }
            normalized.push(out_row);
        }
        Ok(GradedAlgebra {
            group,
            degree,
            products: normalized,
            coeff_order,
        })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.degree.len()
    }

    pub fn coeff_order(&self) -> u32 {
        self.coeff_order
    }

    pub fn degree(&self, i: usize) -> GroupElement {
        self.degree[i]
    }

    /// Basis indices of the component of degree `g`.
    pub fn component(&self, g: GroupElement) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.degree[i] == g).collect()
    }

    pub fn product(&self, i: usize, j: usize) -> &[(usize, CycNumber)] {
        &self.products[i][j]
    }

    /// Expand a product of basis elements left to right; the result is
    /// a sparse vector in the basis.
    pub fn evaluate_word(&self, word: &[usize]) -> Vec<(usize, CycNumber)> {
        let mut acc: Vec<(usize, CycNumber)> = match word.first() {
            Some(&i) => vec![(i, CycNumber::one(self.coeff_order))],
            None => return Vec::new(),
        };
        for &j in &word[1..] {
            let mut next: BTreeMap<usize, CycNumber> = BTreeMap::new();
            for (k, c) in &acc {
                for (l, s) in &self.products[*k][j] {
                    let entry = next
                        .entry(*l)
                        .or_insert_with(|| CycNumber::zero(self.coeff_order));
                    *entry = entry.add(&c.mul(s));
                }
            }
            acc = next.into_iter().filter(|(_, c)| !c.is_zero()).collect();
            if acc.is_empty() {
                return acc;
            }
        }
        acc
    }
}

fn sparse_is_zero(v: &[(usize, CycNumber)]) -> bool {
    v.iter().all(|(_, c)| c.is_zero())
}

fn sparse_scale_root(v: &[(usize, CycNumber)], s: &RootOfUnity) -> Vec<(usize, CycNumber)> {
    v.iter().map(|(k, c)| (*k, c.mul_root(s))).collect()
}

fn sparse_eq(a: &[(usize, CycNumber)], b: &[(usize, CycNumber)]) -> bool {
    let mut diff: BTreeMap<usize, CycNumber> = BTreeMap::new();
    for (k, c) in a {
        let entry = diff.entry(*k).or_insert_with(|| CycNumber::zero(c.order));
        *entry = entry.add(c);
    }
    for (k, c) in b {
        let entry = diff.entry(*k).or_insert_with(|| CycNumber::zero(c.order));
        *entry = entry.sub(c);
    }
    diff.values().all(|c| c.is_zero())
}

/// The twisted group algebra seen as a graded algebra with
/// one-dimensional components.
pub fn twisted_as_graded(algebra: &Arc<TwistedAlgebra>) -> GradedAlgebra {
    let group = algebra.group().clone();
    let n = group.order();
    let co = algebra.coeff_order();
    let degree: Vec<GroupElement> = group.elements().collect();
    let mut products = vec![vec![Vec::new(); n]; n];
    for g in group.elements() {
        for h in group.elements() {
            let a = algebra
                .cocycle()
                .value(g, h)
                .change_order(co)
                .expect("coefficient order covers the value order");
            products[g.0][h.0] = vec![(group.mul(g, h).0, CycNumber::from_root(&a))];
        }
    }
    GradedAlgebra::new(group, degree, products).expect("twisted structure constants are graded")
}

/// Full matrix algebra `M_n` with its fine grading by `Z_n × Z_n`:
/// the basis monomial of degree `(i, j)` is `X^iY^j` for the usual
/// clock and shift matrices, realized through the staircase twist.
pub fn symbol_algebra(n: u32) -> Result<GradedAlgebra> {
    if n == 0 {
        return Err(Error::Validation("matrix size must be positive".into()));
    }
    let group = FiniteGroup::from_invariant_factors(&[n, n])?;
    let mut lower = BTreeMap::new();
    lower.insert((1usize, 0usize), RootOfUnity::new(n, 1));
    let cocycle = crate::cocycles::staircase_cocycle(&group, &lower)?;
    Ok(twisted_as_graded(&TwistedAlgebra::new(cocycle)))
}

/// `F[x]/(xⁿ − c)` graded by `Z_n` with the component of degree `k`
/// spanned by `x^k`.
pub fn truncated_polynomial_algebra(n: u32, c: CycNumber) -> Result<GradedAlgebra> {
    if n == 0 {
        return Err(Error::Validation("the exponent must be positive".into()));
    }
    let group = crate::groups::zn(n);
    let nn = n as usize;
    let degree: Vec<GroupElement> = group.elements().collect();
    let mut products = vec![vec![Vec::new(); nn]; nn];
    for i in 0..nn {
        for j in 0..nn {
            if i + j < nn {
                products[i][j] = vec![(i + j, CycNumber::one(c.order))];
            } else if !c.is_zero() {
                products[i][j] = vec![(i + j - nn, c.clone())];
            }
        }
    }
    GradedAlgebra::new(group, degree, products)
}

/// The exterior algebra on `rank` generators as a `C2`-graded algebra:
/// even-size monomials in degree 0, odd-size in degree 1.
pub fn grassmann_graded(rank: u32) -> Result<GradedAlgebra> {
    let e = TruncatedGrassmann::new(rank)?;
    let group = crate::groups::zn(2);
    let d = e.dim();
    let degree: Vec<GroupElement> = (0..d)
        .map(|m| GroupElement(e.parity(m as u32) as usize))
        .collect();
    let mut products = vec![vec![Vec::new(); d]; d];
    for a in 0..d {
        for b in 0..d {
            if let Some((sign, m)) = e.product(a as u32, b as u32) {
                products[a][b] = vec![(m as usize, CycNumber::from_int(2, sign as i128))];
            }
        }
    }
    GradedAlgebra::new(group, degree, products)
}

/// `M_2` with the checkerboard `C2`-grading: diagonal matrix units are
/// even, antidiagonal ones odd. The grading is well-defined but not
/// regular.
pub fn checkerboard_m2() -> GradedAlgebra {
    let group = crate::groups::zn(2);
    // Basis order: E11, E22, E12, E21.
    let degree = vec![
        GroupElement(0),
        GroupElement(0),
        GroupElement(1),
        GroupElement(1),
    ];
    let row_of = [0usize, 1, 0, 1];
    let col_of = [0usize, 1, 1, 0];
    let index = |r: usize, c: usize| -> usize {
        match (r, c) {
            (0, 0) => 0,
            (1, 1) => 1,
            (0, 1) => 2,
            _ => 3,
        }
    };
    let mut products = vec![vec![Vec::new(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            if col_of[i] == row_of[j] {
                products[i][j] = vec![(index(row_of[i], col_of[j]), CycNumber::one(2))];
            }
        }
    }
    GradedAlgebra::new(group, degree, products).expect("matrix units respect the grading")
}

/// One-dimensional algebra spanned by the unit, in the identity
/// degree. Components at other degrees are empty.
pub fn unit_algebra(group: Arc<FiniteGroup>) -> GradedAlgebra {
    let degree = vec![group.identity()];
    let products = vec![vec![vec![(0, CycNumber::one(2))]]];
    GradedAlgebra::new(group, degree, products).expect("trivial structure constants")
}

/// Grassmann envelope of a graded algebra along a parity split: the
/// component of degree `g` becomes `E_even ⊗ A_g` when `g` lies in the
/// even subgroup and `E_odd ⊗ A_g` otherwise, multiplied inside
/// `E ⊗ A`.
pub fn grassmann_envelope(
    a: &GradedAlgebra,
    even_subgroup: &[GroupElement],
    e: &TruncatedGrassmann,
) -> Result<GradedAlgebra> {
    let group = a.group().clone();
    if !group.is_subgroup(even_subgroup) {
        return Err(Error::NotASubgroup(
            "the even part of the split must be a subgroup".into(),
        ));
    }
    let index = group.order() / even_subgroup.len();
    if index > 2 {
        return Err(Error::Validation(format!(
            "the even subgroup must have index 1 or 2, got {index}"
        )));
    }
    let mut is_even = vec![false; group.order()];
    for g in even_subgroup {
        is_even[g.0] = true;
    }
    // Enumerate the basis: (mask, algebra index) with matching parity.
    let mut basis: Vec<(u32, usize)> = Vec::new();
    let mut lookup: BTreeMap<(u32, usize), usize> = BTreeMap::new();
    for m in 0..e.dim() as u32 {
        for i in 0..a.dim() {
            let want_odd = !is_even[a.degree(i).0];
            if (e.parity(m) == 1) == want_odd {
                lookup.insert((m, i), basis.len());
                basis.push((m, i));
            }
        }
    }
    let degree: Vec<GroupElement> = basis.iter().map(|&(_, i)| a.degree(i)).collect();
    let d = basis.len();
    let co = lcm(a.coeff_order(), 2);
    let mut products = vec![vec![Vec::new(); d]; d];
    for (p, &(m1, i1)) in basis.iter().enumerate() {
        for (q, &(m2, i2)) in basis.iter().enumerate() {
            let (sign, m) = match e.product(m1, m2) {
                Some(x) => x,
                None => continue,
            };
            let mut cell = Vec::new();
            for (k, c) in a.product(i1, i2) {
                let idx = *lookup
                    .get(&(m, *k))
                    .expect("parity of a product matches its degree's coset");
                let mut coeff = c.change_order(co)?;
                if sign < 0 {
                    coeff = coeff.neg();
                }
                cell.push((idx, coeff));
            }
            products[p][q] = cell;
        }
    }
    GradedAlgebra::new(group, degree, products)
}

/// Matched-degree tensor product of two algebras graded by the same
/// group: the component of degree `g` is `A_g ⊗ B_g`.
pub fn hat_tensor(a: &GradedAlgebra, b: &GradedAlgebra) -> Result<GradedAlgebra> {
    let g = a.group().clone();
    let h = b.group().clone();
    if g.order() != h.order()
        || g.elements()
            .any(|x| g.elements().any(|y| g.mul(x, y) != h.mul(x, y)))
    {
        return Err(Error::AlgebraMismatch);
    }
    let mut basis: Vec<(usize, usize)> = Vec::new();
    let mut lookup: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for i in 0..a.dim() {
        for j in 0..b.dim() {
            if a.degree(i) == b.degree(j) {
                lookup.insert((i, j), basis.len());
                basis.push((i, j));
            }
        }
    }
    if basis.is_empty() {
        return Err(Error::Validation(
            "the matched-degree tensor product has an empty basis".into(),
        ));
    }
    let degree: Vec<GroupElement> = basis.iter().map(|&(i, _)| a.degree(i)).collect();
    let d = basis.len();
    let co = lcm(a.coeff_order(), b.coeff_order());
    let mut products = vec![vec![Vec::new(); d]; d];
    for (p, &(i1, j1)) in basis.iter().enumerate() {
        for (q, &(i2, j2)) in basis.iter().enumerate() {
            let mut cell = Vec::new();
            for (ka, ca) in a.product(i1, i2) {
                for (kb, cb) in b.product(j1, j2) {
                    if let Some(&idx) = lookup.get(&(*ka, *kb)) {
                        let c = ca.change_order(co)?.mul(&cb.change_order(co)?);
                        cell.push((idx, c));
                    }
                }
            }
            products[p][q] = cell;
        }
    }
    GradedAlgebra::new(g, degree, products)
}

/// Direct sum of two algebras graded by the same group, componentwise.
pub fn direct_sum(a: &GradedAlgebra, b: &GradedAlgebra) -> Result<GradedAlgebra> {
    let g = a.group().clone();
    let h = b.group().clone();
    if g.order() != h.order()
        || g.elements()
            .any(|x| g.elements().any(|y| g.mul(x, y) != h.mul(x, y)))
    {
        return Err(Error::AlgebraMismatch);
    }
    let da = a.dim();
    let d = da + b.dim();
    let co = lcm(a.coeff_order(), b.coeff_order());
    let mut degree = Vec::with_capacity(d);
    for i in 0..a.dim() {
        degree.push(a.degree(i));
    }
    for j in 0..b.dim() {
        degree.push(b.degree(j));
    }
    let mut products = vec![vec![Vec::new(); d]; d];
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            products[i][j] = a
                .product(i, j)
                .iter()
                .map(|(k, c)| Ok((*k, c.change_order(co)?)))
                .collect::<Result<Vec<_>>>()?;
        }
    }
    for i in 0..b.dim() {
        for j in 0..b.dim() {
            products[da + i][da + j] = b
                .product(i, j)
                .iter()
                .map(|(k, c)| Ok((da + *k, c.change_order(co)?)))
                .collect::<Result<Vec<_>>>()?;
        }
    }
    GradedAlgebra::new(g, degree, products)
}

/// Verdict of the regularity check: whether every degree word of
/// bounded length admits a nonzero product, and whether a single
/// reordering scalar per degree pair governs all basis products.
pub struct RegularityReport {
    pub regular: bool,
    pub checked_length: usize,
    /// Recovered reordering scalar per ordered degree pair, where at
    /// least one basis product was nonzero.
    pub pairwise: Vec<Vec<Option<RootOfUnity>>>,
    /// First obstruction found, if any.
    pub failure: Option<String>,
}

/// Check the two regularity conditions up to the given word length:
/// (1) every degree word of length ≤ L has some nonzero product of
/// basis elements, and (2) for every ordered pair of degrees one
/// scalar `θ` satisfies `a·b = θ·b·a` across all basis pairs.
pub fn check_regularity(a: &GradedAlgebra, max_length: usize) -> Result<RegularityReport> {
    let group = a.group().clone();
    let n = group.order();
    let scalar_order = lcm(a.coeff_order(), 2);
    let mut pairwise: Vec<Vec<Option<RootOfUnity>>> = vec![vec![None; n]; n];
    let mut failure: Option<String> = None;

    'pairs: for g in group.elements() {
        for h in group.elements() {
            // Swapping a pair only preserves the total degree when the
            // degrees commute; otherwise no pairwise scalar is imposed.
            if group.mul(g, h) != group.mul(h, g) {
                continue;
            }
            let cg = a.component(g);
            let ch = a.component(h);
            let mut theta: Option<RootOfUnity> = None;
            for &i in &cg {
                for &j in &ch {
                    let ab = a.evaluate_word(&[i, j]);
                    let ba = a.evaluate_word(&[j, i]);
                    let ab_zero = sparse_is_zero(&ab);
                    let ba_zero = sparse_is_zero(&ba);
                    if ab_zero && ba_zero {
                        continue;
                    }
                    if ab_zero != ba_zero {
                        failure = Some(format!(
                            "degrees ({}, {}): basis product vanishes in one order only",
                            g.0, h.0
                        ));
                        break 'pairs;
                    }
                    match &theta {
                        Some(t) => {
                            if !sparse_eq(&ab, &sparse_scale_root(&ba, t)) {
                                failure = Some(format!(
                                    "degrees ({}, {}): no single reordering scalar fits",
                                    g.0, h.0
                                ));
                                break 'pairs;
                            }
                        }
                        None => {
                            let mut found = None;
                            for exp in 0..scalar_order {
                                let cand = RootOfUnity::new(scalar_order, exp as i64);
                                if sparse_eq(&ab, &sparse_scale_root(&ba, &cand)) {
                                    found = Some(cand);
                                    break;
                                }
                            }
                            match found {
                                Some(t) => theta = Some(t),
                                None => {
                                    failure = Some(format!(
                                        "degrees ({}, {}): reordering ratio is not a root of \
                                         unity of order dividing {}",
                                        g.0, h.0, scalar_order
                                    ));
                                    break 'pairs;
                                }
                            }
                        }
                    }
                }
            }
            pairwise[g.0][h.0] = theta;
        }
    }

    if failure.is_none() {
        'words: for len in 1..=max_length {
            let mut word = vec![0usize; len];
            loop {
                let degrees: Vec<GroupElement> = word.iter().map(|&x| GroupElement(x)).collect();
                if !has_nonzero_product(a, &degrees) {
                    failure = Some(format!(
                        "degree word {:?} of length {len} has no nonzero product",
                        word
                    ));
                    break 'words;
                }
                // Advance the odometer.
                let mut pos = 0;
                loop {
                    if pos == len {
                        break;
                    }
                    word[pos] += 1;
                    if word[pos] < n {
                        break;
                    }
                    word[pos] = 0;
                    pos += 1;
                }
                if pos == len {
                    break;
                }
            }
        }
    }

    Ok(RegularityReport {
        regular: failure.is_none(),
        checked_length: max_length,
        pairwise,
        failure,
    })
}

fn has_nonzero_product(a: &GradedAlgebra, degrees: &[GroupElement]) -> bool {
    let components: Vec<Vec<usize>> = degrees.iter().map(|&g| a.component(g)).collect();
    if components.iter().any(|c| c.is_empty()) {
        return false;
    }
    let mut choice = vec![0usize; degrees.len()];
    loop {
        let word: Vec<usize> = choice
            .iter()
            .enumerate()
            .map(|(pos, &c)| components[pos][c])
            .collect();
        if !sparse_is_zero(&a.evaluate_word(&word)) {
            return true;
        }
        let mut pos = 0;
        loop {
            if pos == degrees.len() {
                return false;
            }
            choice[pos] += 1;
            if choice[pos] < components[pos].len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// A graded monomial: a scalar times an ordered word of graded
/// variables `x_{g, index}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMonomial {
    pub scalar: RootOfUnity,
    /// Letters in multiplication order: (degree, variable index).
    pub letters: Vec<(GroupElement, usize)>,
}

/// Sort a monomial's letters by (degree index, variable index),
/// accumulating the commutation scalar of the sorting permutation.
/// Two monomials are equal modulo the reordering relations exactly
/// when their normal forms coincide.
pub fn normal_form(m: &GradedMonomial, f: &CommutationFunction) -> Result<GradedMonomial> {
    if f.group().invariant_factors().is_none() {
        return Err(Error::NotAbelian("normal_form"));
    }
    let n = m.letters.len();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.sort_by_key(|&i| (m.letters[i].0 .0, m.letters[i].1, i));
    let degrees: Vec<GroupElement> = m.letters.iter().map(|&(g, _)| g).collect();
    let theta = f.reordering_value(&degrees, &perm)?;
    let letters: Vec<(GroupElement, usize)> = perm.iter().map(|&i| m.letters[i]).collect();
    let (a, b) = RootOfUnity::unify(&m.scalar, &theta);
    Ok(GradedMonomial {
        scalar: a.mul(&b)?,
        letters,
    })
}

/// A strongly homogeneous multilinear polynomial: variables
/// `x_{g_i, i}` for `i = 0..n`, and terms indexed by permutations with
/// the same total degree as the identity arrangement.
#[derive(Clone)]
pub struct MultilinearPolynomial {
    group: Arc<FiniteGroup>,
    signature: Vec<GroupElement>,
    terms: BTreeMap<Vec<usize>, CycNumber>,
}

impl MultilinearPolynomial {
    pub fn new(
        group: Arc<FiniteGroup>,
        signature: Vec<GroupElement>,
        terms: Vec<(Vec<usize>, CycNumber)>,
    ) -> Result<MultilinearPolynomial> {
        if signature.is_empty() {
            return Err(Error::BadPolynomial("empty signature".into()));
        }
        for &g in &signature {
            group.check_element(g)?;
        }
        let n = signature.len();
        let total = word_product(&group, &signature, &(0..n).collect::<Vec<_>>());
        let mut out: BTreeMap<Vec<usize>, CycNumber> = BTreeMap::new();
        for (perm, coeff) in terms {
            if perm.len() != n || {
                let mut seen = vec![false; n];
                perm.iter().any(|&p| {
                    if p >= n || seen[p] {
                        true
                    } else {
                        seen[p] = true;
                        false
                    }
                })
            } {
                return Err(Error::BadPolynomial(format!(
                    "term key {perm:?} is not a permutation of 0..{n}"
                )));
            }
            if word_product(&group, &signature, &perm) != total {
                return Err(Error::BadPolynomial(format!(
                    "term {perm:?} changes the total degree; the polynomial would \
                     not be homogeneous"
                )));
            }
            let entry = out.entry(perm).or_insert_with(|| CycNumber::zero(coeff.order));
            *entry = entry.change_order(lcm(entry.order, coeff.order))?;
            *entry = entry.add(&coeff.change_order(entry.order)?);
        }
        out.retain(|_, c| !c.is_zero());
        Ok(MultilinearPolynomial {
            group,
            signature,
            terms: out,
        })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn signature(&self) -> &[GroupElement] {
        &self.signature
    }

    pub fn degree(&self) -> usize {
        self.signature.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &CycNumber)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Equality as formal linear combinations.
    pub fn eq(&self, other: &MultilinearPolynomial) -> bool {
        if self.signature.len() != other.signature.len()
            || self
                .signature
                .iter()
                .zip(other.signature.iter())
                .any(|(a, b)| a != b)
        {
            return false;
        }
        let keys: std::collections::BTreeSet<&Vec<usize>> =
            self.terms.keys().chain(other.terms.keys()).collect();
        for k in keys {
            let zero_a = CycNumber::zero(2);
            let zero_b = CycNumber::zero(2);
            let a = self.terms.get(k).unwrap_or(&zero_a);
            let b = other.terms.get(k).unwrap_or(&zero_b);
            let order = lcm(a.order, b.order);
            let a = a.change_order(order).expect("lcm covers both");
            let b = b.change_order(order).expect("lcm covers both");
            if !a.eq(&b) {
                return false;
            }
        }
        true
    }

    /// Twist the coefficients: each term is divided by the reordering
    /// value of its permutation, which transports graded identities
    /// across a matched-degree tensor factor with that commutation
    /// function.
    pub fn f_theta(&self, f: &CommutationFunction) -> Result<MultilinearPolynomial> {
        let mut terms = Vec::new();
        for (perm, coeff) in &self.terms {
            let theta = f.reordering_value(&self.signature, perm)?;
            let order = lcm(coeff.order, theta.order);
            let c = coeff.change_order(order)?;
            terms.push((perm.clone(), c.mul_root(&theta.inv().change_order(order)?)));
        }
        MultilinearPolynomial::new(self.group.clone(), self.signature.clone(), terms)
    }

    /// Inverse twist: multiply by the reordering value instead.
    pub fn f_theta_inverse(&self, f: &CommutationFunction) -> Result<MultilinearPolynomial> {
        let mut terms = Vec::new();
        for (perm, coeff) in &self.terms {
            let theta = f.reordering_value(&self.signature, perm)?;
            let order = lcm(coeff.order, theta.order);
            let c = coeff.change_order(order)?;
            terms.push((perm.clone(), c.mul_root(&theta.change_order(order)?)));
        }
        MultilinearPolynomial::new(self.group.clone(), self.signature.clone(), terms)
    }
}

fn word_product(group: &Arc<FiniteGroup>, degrees: &[GroupElement], perm: &[usize]) -> GroupElement {
    let mut acc = group.identity();
    for &p in perm {
        acc = group.mul(acc, degrees[p]);
    }
    acc
}

/// All permutations of the signature that preserve the total degree.
pub fn degree_preserving_permutations(
    group: &Arc<FiniteGroup>,
    signature: &[GroupElement],
) -> Vec<Vec<usize>> {
    let n = signature.len();
    let identity: Vec<usize> = (0..n).collect();
    let total = word_product(group, signature, &identity);
    let mut out = Vec::new();
    let mut perm = identity;
    loop {
        if word_product(group, signature, &perm) == total {
            out.push(perm.clone());
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    out
}

fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// Verdict of an identity check.
pub struct IdentityVerdict {
    pub holds: bool,
    /// True when some variable's degree has an empty component, so the
    /// polynomial vanishes for lack of admissible evaluations.
    pub vacuous: bool,
}

/// Decide whether the polynomial vanishes under every admissible
/// substitution of homogeneous basis elements; by multilinearity this
/// settles all homogeneous substitutions.
pub fn is_graded_identity(
    f: &MultilinearPolynomial,
    a: &GradedAlgebra,
) -> Result<IdentityVerdict> {
    check_same_group(f.group(), a.group())?;
    let n = f.degree();
    let components: Vec<Vec<usize>> = f.signature().iter().map(|&g| a.component(g)).collect();
    if components.iter().any(|c| c.is_empty()) {
        return Ok(IdentityVerdict {
            holds: true,
            vacuous: true,
        });
    }
    let order = lcm(a.coeff_order(), f.terms().map(|(_, c)| c.order).fold(2, lcm));
    let mut choice = vec![0usize; n];
    loop {
        let assignment: Vec<usize> = choice
            .iter()
            .enumerate()
            .map(|(i, &c)| components[i][c])
            .collect();
        let mut acc: BTreeMap<usize, CycNumber> = BTreeMap::new();
        for (perm, coeff) in f.terms() {
            let word: Vec<usize> = perm.iter().map(|&p| assignment[p]).collect();
            let value = a.evaluate_word(&word);
            let coeff = coeff.change_order(order)?;
            for (k, c) in value {
                let entry = acc.entry(k).or_insert_with(|| CycNumber::zero(order));
                *entry = entry.add(&c.change_order(order)?.mul(&coeff));
            }
        }
        if acc.values().any(|c| !c.is_zero()) {
            return Ok(IdentityVerdict {
                holds: false,
                vacuous: false,
            });
        }
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(IdentityVerdict {
                    holds: true,
                    vacuous: false,
                });
            }
            choice[pos] += 1;
            if choice[pos] < components[pos].len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

fn check_same_group(a: &Arc<FiniteGroup>, b: &Arc<FiniteGroup>) -> Result<()> {
    if a.order() != b.order()
        || a.elements()
            .any(|x| a.elements().any(|y| a.mul(x, y) != b.mul(x, y)))
    {
        return Err(Error::AlgebraMismatch);
    }
    Ok(())
}

/// The linear constraints that a coefficient vector must satisfy for
/// the corresponding polynomial to be a graded identity of a fixed
/// algebra, reduced to a row-space basis. Membership tests are then
/// instant, which makes exhaustive sweeps over coefficient choices
/// cheap.
pub struct IdentitySpace {
    field: CycField,
    perms: Vec<Vec<usize>>,
    rows: Vec<Vec<QCyc>>,
    vacuous: bool,
}

impl IdentitySpace {
    pub fn perms(&self) -> &[Vec<usize>] {
        &self.perms
    }

    pub fn vacuous(&self) -> bool {
        self.vacuous
    }

    /// Number of independent constraints on the coefficient vector.
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Whether the polynomial with these coefficients (aligned with
    /// `perms`) is a graded identity.
    pub fn annihilates(&self, coeffs: &[CycNumber]) -> Result<bool> {
        if coeffs.len() != self.perms.len() {
            return Err(Error::Validation(format!(
                "expected {} coefficients, got {}",
                self.perms.len(),
                coeffs.len()
            )));
        }
        let v: Vec<QCyc> = coeffs
            .iter()
            .map(|c| self.field.from_cyc(c))
            .collect::<Result<Vec<_>>>()?;
        for row in &self.rows {
            let mut acc = self.field.zero();
            for (r, x) in row.iter().zip(v.iter()) {
                acc = self.field.add(&acc, &self.field.mul(r, x));
            }
            if !self.field.is_zero(&acc) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Verdict for a polynomial over the same signature.
    pub fn verdict(&self, f: &MultilinearPolynomial) -> Result<bool> {
        if self.vacuous {
            return Ok(true);
        }
        let mut coeffs = vec![CycNumber::zero(2); self.perms.len()];
        for (perm, c) in f.terms() {
            match self.perms.iter().position(|p| p == perm) {
                Some(i) => coeffs[i] = c.clone(),
                None => {
                    return Err(Error::BadPolynomial(format!(
                        "term {perm:?} is outside the degree-preserving permutations \
                         of this signature"
                    )))
                }
            }
        }
        self.annihilates(&coeffs)
    }
}

/// Build the identity constraints of one signature over one algebra by
/// sweeping all admissible basis substitutions once.
pub fn identity_space(a: &GradedAlgebra, signature: &[GroupElement]) -> Result<IdentitySpace> {
    let group = a.group().clone();
    for &g in signature {
        group.check_element(g)?;
    }
    let perms = degree_preserving_permutations(&group, signature);
    let field = CycField::new(lcm(a.coeff_order(), 2));
    let components: Vec<Vec<usize>> = signature.iter().map(|&g| a.component(g)).collect();
    if components.iter().any(|c| c.is_empty()) {
        return Ok(IdentitySpace {
            field,
            perms,
            rows: Vec::new(),
            vacuous: true,
        });
    }
    let n = signature.len();
    let m = perms.len();
    let mut span = SpanBuilder::new(&field);
    let mut choice = vec![0usize; n];
    'sweep: loop {
        let assignment: Vec<usize> = choice
            .iter()
            .enumerate()
            .map(|(i, &c)| components[i][c])
            .collect();
        // One constraint row per basis index appearing in any term's
        // value: the coefficient combination landing there must vanish.
        let mut per_basis: BTreeMap<usize, Vec<CycNumber>> = BTreeMap::new();
        for (t, perm) in perms.iter().enumerate() {
            let word: Vec<usize> = perm.iter().map(|&p| assignment[p]).collect();
            for (k, c) in a.evaluate_word(&word) {
                let row = per_basis
                    .entry(k)
                    .or_insert_with(|| vec![CycNumber::zero(a.coeff_order()); m]);
                row[t] = row[t].add(&c);
            }
        }
        for (_, row) in per_basis {
            if row.iter().all(|c| c.is_zero()) {
                continue;
            }
            let qrow: Vec<QCyc> = row
                .iter()
                .map(|c| field.from_cyc(c))
                .collect::<Result<Vec<_>>>()?;
            span.insert(&qrow);
            if span.dim() == m {
                break 'sweep;
            }
        }
        let mut pos = 0;
        loop {
            if pos == n {
                break 'sweep;
            }
            choice[pos] += 1;
            if choice[pos] < components[pos].len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
    let rows = span.rows().to_vec();
    drop(span);
    Ok(IdentitySpace {
        field,
        perms,
        rows,
        vacuous: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycles::{dihedral_quaternion_cocycle, Cocycle};
    use crate::commfun::{eta_form, tau_form, CommutationFunction};
    use crate::groups::zn;

    fn xorshift(state: &mut u64) -> u64 {
        *state ^= *state << 13;
        *state ^= *state >> 7;
        *state ^= *state << 17;
        *state
    }

    #[test]
    fn grassmann_monomial_arithmetic() {
        let e = TruncatedGrassmann::new(3).unwrap();
        assert_eq!(e.dim(), 8);
        // e1·e1 = 0; e1·e2 = −e2·e1.
        assert!(e.product(0b001, 0b001).is_none());
        assert_eq!(e.product(0b001, 0b010), Some((1, 0b011)));
        assert_eq!(e.product(0b010, 0b001), Some((-1, 0b011)));
        // (e1e2)·e3 has even left factor: no sign either way.
        assert_eq!(e.product(0b011, 0b100), Some((1, 0b111)));
        assert_eq!(e.product(0b100, 0b011), Some((1, 0b111)));
        // Associativity across all triples of monomials.
        for a in 0..8u32 {
            for b in 0..8u32 {
                for c in 0..8u32 {
                    let left = e
                        .product(a, b)
                        .and_then(|(s1, m)| e.product(m, c).map(|(s2, f)| (s1 * s2, f)));
                    let right = e
                        .product(b, c)
                        .and_then(|(s2, m)| e.product(a, m).map(|(s1, f)| (s1 * s2, f)));
                    assert_eq!(left, right);
                }
            }
        }
        let g = grassmann_graded(3).unwrap();
        assert_eq!(g.dim(), 8);
        assert_eq!(g.component(GroupElement(0)).len(), 4);
        assert_eq!(g.component(GroupElement(1)).len(), 4);
    }

    #[test]
    fn builtin_structure_validation() {
        // The full matrix algebra under its fine grading has
        // one-dimensional components and invertible basis monomials.
        let s = symbol_algebra(2).unwrap();
        assert_eq!(s.dim(), 4);
        for g in s.group().elements() {
            assert_eq!(s.component(g).len(), 1);
        }

        // Checkerboard matrix units: E11·E12 = E12 but E12·E11 = 0.
        let c = checkerboard_m2();
        let e11_e12 = c.evaluate_word(&[0, 2]);
        assert_eq!(e11_e12.len(), 1);
        assert_eq!(e11_e12[0].0, 2);
        assert!(sparse_is_zero(&c.evaluate_word(&[2, 0])));

        // Structure constants that leave their component are rejected.
        let bad = GradedAlgebra::new(
            zn(2),
            vec![GroupElement(0), GroupElement(1)],
            vec![
                vec![vec![(0, CycNumber::one(2))], vec![(0, CycNumber::one(2))]],
                vec![vec![(1, CycNumber::one(2))], vec![(0, CycNumber::one(2))]],
            ],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn regularity_verdicts() {
        // Matrix algebra with the fine grading: regular, and the
        // recovered scalars are the staircase commutation values.
        let s = symbol_algebra(3).unwrap();
        let rep = check_regularity(&s, 3).unwrap();
        assert!(rep.regular, "{:?}", rep.failure);
        let g = s.group().clone();
        let z3 = RootOfUnity::new(3, 1);
        for x in g.elements() {
            for y in g.elements() {
                let rx: Vec<i64> = g.residues(x).unwrap().iter().map(|&v| v as i64).collect();
                let ry: Vec<i64> = g.residues(y).unwrap().iter().map(|&v| v as i64).collect();
                let expected = z3.pow(rx[1] * ry[0] - rx[0] * ry[1]);
                let got = rep.pairwise[x.0][y.0].expect("all components meet");
                let (u, v) = RootOfUnity::unify(&got, &expected);
                assert_eq!(u, v);
            }
        }

        // Exterior algebra: regular up to its rank, with the sign
        // scalar on odd pairs; one letter more than the rank kills
        // condition (1).
        let e2 = grassmann_graded(2).unwrap();
        let rep = check_regularity(&e2, 2).unwrap();
        assert!(rep.regular, "{:?}", rep.failure);
        assert_eq!(
            rep.pairwise[1][1].as_ref().and_then(RootOfUnity::as_sign),
            Some(-1)
        );
        assert_eq!(rep.pairwise[0][1].as_ref().and_then(RootOfUnity::as_sign), Some(1));
        let rep = check_regularity(&e2, 3).unwrap();
        assert!(!rep.regular);

        // Nilpotent truncated polynomial algebra: condition (1) fails
        // already on length 2.
        let nil = truncated_polynomial_algebra(2, CycNumber::zero(2)).unwrap();
        let rep = check_regularity(&nil, 2).unwrap();
        assert!(!rep.regular);

        // Invertible constant term: regular with trivial scalars.
        let reg = truncated_polynomial_algebra(4, CycNumber::one(2)).unwrap();
        let rep = check_regularity(&reg, 3).unwrap();
        assert!(rep.regular, "{:?}", rep.failure);
        for row in &rep.pairwise {
            for cell in row {
                assert_eq!(cell.as_ref().and_then(RootOfUnity::as_sign), Some(1));
            }
        }

        // The checkerboard grading is not regular: products of odd
        // units die in one order only.
        let rep = check_regularity(&checkerboard_m2(), 2).unwrap();
        assert!(!rep.regular);
    }

    #[test]
    fn envelopes_realize_their_commutation_functions() {
        // Envelope of the dihedral twist along the Klein subgroup: the
        // recovered reordering scalars agree with the realized
        // commutation function on every ordered pair.
        let alg = TwistedAlgebra::new(dihedral_quaternion_cocycle());
        let base = twisted_as_graded(&alg);
        let k: Vec<GroupElement> = [0usize, 2, 4, 6].iter().map(|&i| GroupElement(i)).collect();
        let e = TruncatedGrassmann::new(4).unwrap();
        let env = grassmann_envelope(&base, &k, &e).unwrap();
        assert_eq!(env.dim(), 8 * 8);
        let rep = check_regularity(&env, 2).unwrap();
        assert!(rep.regular, "{:?}", rep.failure);
        let parity: Vec<u8> = (0..8).map(|i| (i % 2) as u8).collect();
        let f = CommutationFunction::new(dihedral_quaternion_cocycle(), parity).unwrap();
        let dg = f.group().clone();
        for g in dg.elements() {
            for h in dg.elements() {
                if dg.mul(g, h) != dg.mul(h, g) {
                    assert!(rep.pairwise[g.0][h.0].is_none());
                    continue;
                }
                let expected = f.reordering_value(&[g, h], &[1, 0]).unwrap();
                let got = rep.pairwise[g.0][h.0].expect("commuting components meet");
                let (u, v) = RootOfUnity::unify(&got, &expected);
                assert_eq!(u, v, "pair ({}, {})", g.0, h.0);
            }
        }

        // Splitting the group algebra of C2 at the trivial subgroup
        // makes the odd component anticommute with itself.
        let b = twisted_as_graded(&TwistedAlgebra::new(Cocycle::trivial(zn(2))));
        let env = grassmann_envelope(&b, &[GroupElement(0)], &e).unwrap();
        let rep = check_regularity(&env, 2).unwrap();
        assert!(rep.regular, "{:?}", rep.failure);
        assert_eq!(
            rep.pairwise[1][1].as_ref().and_then(RootOfUnity::as_sign),
            Some(-1)
        );

        // A trivial split leaves the even scalars unchanged.
        let all: Vec<GroupElement> = b.group().elements().collect();
        let env = grassmann_envelope(&b, &all, &e).unwrap();
        let rep = check_regularity(&env, 2).unwrap();
        assert!(rep.regular);
        assert_eq!(
            rep.pairwise[1][1].as_ref().and_then(RootOfUnity::as_sign),
            Some(1)
        );

        // Splits that are not index ≤ 2 subgroups are refused.
        let z4 = twisted_as_graded(&TwistedAlgebra::new(Cocycle::trivial(zn(4))));
        assert!(grassmann_envelope(&z4, &[GroupElement(0)], &e).is_err());
        assert!(grassmann_envelope(&z4, &[GroupElement(0), GroupElement(1)], &e).is_err());
    }

    #[test]
    fn tensor_and_sum_constructions() {
        // Matched-degree square of the exterior algebra: regular with
        // all scalars trivial.
        let e4 = grassmann_graded(4).unwrap();
        let sq = hat_tensor(&e4, &e4).unwrap();
        let rep = check_regularity(&sq, 2).unwrap();
        assert!(rep.regular, "{:?}", rep.failure);
        for row in &rep.pairwise {
            for cell in row {
                assert_eq!(cell.as_ref().and_then(RootOfUnity::as_sign), Some(1));
            }
        }

        // Matched-degree square of the Klein-graded matrix algebra:
        // the scalars square away.
        let s = symbol_algebra(2).unwrap();
        let sq = hat_tensor(&s, &s).unwrap();
        let rep = check_regularity(&sq, 2).unwrap();
        assert!(rep.regular, "{:?}", rep.failure);
        for row in &rep.pairwise {
            for cell in row {
                assert_eq!(cell.as_ref().and_then(RootOfUnity::as_sign), Some(1));
            }
        }

        // Tensoring with the one-dimensional-per-degree group algebra
        // keeps the scalars.
        let span = twisted_as_graded(&TwistedAlgebra::new(Cocycle::trivial(zn(2))));
        let e2 = grassmann_graded(2).unwrap();
        let t = hat_tensor(&e2, &span).unwrap();
        let rep_t = check_regularity(&t, 2).unwrap();
        let rep_e = check_regularity(&e2, 2).unwrap();
        assert!(rep_t.regular);
        for g in 0..2 {
            for h in 0..2 {
                let a = rep_t.pairwise[g][h].unwrap();
                let b = rep_e.pairwise[g][h].unwrap();
                let (u, v) = RootOfUnity::unify(&a, &b);
                assert_eq!(u, v);
            }
        }

        // Direct sums stay graded and share each summand's identities.
        let two = direct_sum(&s, &s).unwrap();
        assert_eq!(two.dim(), 8);
        let sig = vec![GroupElement(0), GroupElement(0)];
        let commutator = MultilinearPolynomial::new(
            s.group().clone(),
            sig,
            vec![
                (vec![0, 1], CycNumber::one(2)),
                (vec![1, 0], CycNumber::from_int(2, -1)),
            ],
        )
        .unwrap();
        let va = is_graded_identity(&commutator, &s).unwrap();
        let vb = is_graded_identity(&commutator, &two).unwrap();
        assert_eq!(va.holds, vb.holds);
        assert!(va.holds);

        // Group mismatch is refused.
        let z3span = twisted_as_graded(&TwistedAlgebra::new(Cocycle::trivial(zn(3))));
        assert!(hat_tensor(&e2, &z3span).is_err());
        assert!(direct_sum(&e2, &z3span).is_err());
    }

    #[test]
    fn normal_forms_match_evaluation() {
        // Sorted input: scalar untouched.
        let f = CommutationFunction::from_bicharacter(&eta_form(2, 1).unwrap()).unwrap();
        let sorted = GradedMonomial {
            scalar: RootOfUnity::one(2),
            letters: vec![(GroupElement(1), 0), (GroupElement(2), 0)],
        };
        let nf = normal_form(&sorted, &f).unwrap();
        assert_eq!(nf, sorted);

        // A transposed pair picks up the pairwise value.
        let swapped = GradedMonomial {
            scalar: RootOfUnity::one(2),
            letters: vec![(GroupElement(2), 0), (GroupElement(1), 0)],
        };
        let nf = normal_form(&swapped, &f).unwrap();
        assert_eq!(nf.letters, sorted.letters);
        let expected = f
            .reordering_value(&[GroupElement(2), GroupElement(1)], &[1, 0])
            .unwrap();
        let (u, v) = RootOfUnity::unify(&nf.scalar, &expected);
        assert_eq!(u, v);

        // Identity-degree letters move for free.
        let with_e = GradedMonomial {
            scalar: RootOfUnity::one(2),
            letters: vec![(GroupElement(2), 0), (GroupElement(0), 0)],
        };
        let nf = normal_form(&with_e, &f).unwrap();
        assert!(nf.scalar.is_one());

        // Random monomials: evaluating the original word of basis
        // monomials in the graded matrix algebra equals the normal
        // form's scalar times the sorted word. The function must be
        // the algebra's own: the staircase twist with zero parity.
        let staircase_function = |n: u32| {
            let group = FiniteGroup::from_invariant_factors(&[n, n]).unwrap();
            let mut lower = BTreeMap::new();
            lower.insert((1usize, 0usize), RootOfUnity::new(n, 1));
            let cocycle = crate::cocycles::staircase_cocycle(&group, &lower).unwrap();
            CommutationFunction::new(cocycle, vec![0; (n * n) as usize]).unwrap()
        };
        let algebras = [
            (staircase_function(2), symbol_algebra(2).unwrap()),
            (staircase_function(3), symbol_algebra(3).unwrap()),
        ];
        let mut state = 0x2545f4914f6cdd1du64;
        for (f, alg) in &algebras {
            let n = alg.group().order();
            for _ in 0..60 {
                let len = 1 + (xorshift(&mut state) % 5) as usize;
                let letters: Vec<(GroupElement, usize)> = (0..len)
                    .map(|i| (GroupElement((xorshift(&mut state) % n as u64) as usize), i))
                    .collect();
                let m = GradedMonomial {
                    scalar: RootOfUnity::one(2),
                    letters: letters.clone(),
                };
                let nf = normal_form(&m, f).unwrap();
                // Components are one-dimensional: the degree indexes
                // the basis directly.
                let original: Vec<usize> = letters.iter().map(|&(g, _)| g.0).collect();
                let sorted: Vec<usize> = nf.letters.iter().map(|&(g, _)| g.0).collect();
                let lhs = alg.evaluate_word(&original);
                let rhs = sparse_scale_root(
                    &alg.evaluate_word(&sorted),
                    &nf.scalar.change_order(alg.coeff_order().max(2)).unwrap(),
                );
                assert!(sparse_eq(&lhs, &rhs));
            }
        }
    }

    #[test]
    fn identities_and_coefficient_twists() {
        let s = symbol_algebra(2).unwrap();
        let g = s.group().clone();
        let e = g.identity();
        let a = GroupElement(1);
        let b = GroupElement(2);

        // Scalars commute: the even-even commutator is an identity.
        let commutator = MultilinearPolynomial::new(
            g.clone(),
            vec![e, e],
            vec![
                (vec![0, 1], CycNumber::one(2)),
                (vec![1, 0], CycNumber::from_int(2, -1)),
            ],
        )
        .unwrap();
        assert!(is_graded_identity(&commutator, &s).unwrap().holds);

        // The two-variable binomial with the recovered scalar holds;
        // a bare monomial does not.
        let theta_ab = check_regularity(&s, 2).unwrap().pairwise[a.0][b.0].unwrap();
        let binomial = MultilinearPolynomial::new(
            g.clone(),
            vec![a, b],
            vec![
                (vec![0, 1], CycNumber::one(2)),
                (
                    vec![1, 0],
                    CycNumber::from_root(&theta_ab).neg(),
                ),
            ],
        )
        .unwrap();
        assert!(is_graded_identity(&binomial, &s).unwrap().holds);
        let monomial = MultilinearPolynomial::new(
            g.clone(),
            vec![a, b],
            vec![(vec![0, 1], CycNumber::one(2))],
        )
        .unwrap();
        let v = is_graded_identity(&monomial, &s).unwrap();
        assert!(!v.holds && !v.vacuous);

        // Degrees with empty components give a flagged vacuous truth.
        let unit = unit_algebra(zn(2));
        let odd = MultilinearPolynomial::new(
            zn(2),
            vec![GroupElement(1)],
            vec![(vec![0], CycNumber::one(2))],
        )
        .unwrap();
        let v = is_graded_identity(&odd, &unit).unwrap();
        assert!(v.holds && v.vacuous);

        // The sign twist flips the symmetric two-variable polynomial
        // into the antisymmetric one.
        let tau = CommutationFunction::from_bicharacter(&tau_form()).unwrap();
        let c2 = tau.group().clone();
        let m = GroupElement(1);
        let sym = MultilinearPolynomial::new(
            c2.clone(),
            vec![m, m],
            vec![
                (vec![0, 1], CycNumber::one(2)),
                (vec![1, 0], CycNumber::one(2)),
            ],
        )
        .unwrap();
        let twisted = sym.f_theta(&tau).unwrap();
        let expected = MultilinearPolynomial::new(
            c2.clone(),
            vec![m, m],
            vec![
                (vec![0, 1], CycNumber::one(2)),
                (vec![1, 0], CycNumber::from_int(2, -1)),
            ],
        )
        .unwrap();
        assert!(twisted.eq(&expected));

        // Twist and inverse twist cancel, also at order three.
        let z3 = CommutationFunction::from_bicharacter(&eta_form(3, 1).unwrap()).unwrap();
        let g9 = z3.group().clone();
        let x = GroupElement(1);
        let y = GroupElement(3);
        let f3 = MultilinearPolynomial::new(
            g9.clone(),
            vec![x, y, x],
            vec![
                (vec![0, 1, 2], CycNumber::one(3)),
                (vec![2, 1, 0], CycNumber::from_root(&RootOfUnity::new(3, 1))),
                (vec![1, 0, 2], CycNumber::from_int(3, -1)),
            ],
        )
        .unwrap();
        let round = f3.f_theta(&z3).unwrap().f_theta_inverse(&z3).unwrap();
        assert!(round.eq(&f3));
        assert!(!f3.f_theta(&z3).unwrap().eq(&f3));
    }

    #[test]
    fn identity_transport_across_matched_tensors() {
        // Desk-scale check of the transport rule: for the exterior
        // algebra A over C2 with sign function τ and a graded partner
        // B, a polynomial is an identity of A⊗̂B exactly when its
        // twist is an identity of B. The Grassmann rank is twice the
        // polynomial degree so the odd substitutions never die of
        // generator shortage.
        let a = grassmann_graded(4).unwrap();
        let tau = CommutationFunction::from_bicharacter(&tau_form()).unwrap();
        let partners: Vec<GradedAlgebra> = vec![
            checkerboard_m2(),
            twisted_as_graded(&TwistedAlgebra::new(Cocycle::trivial(zn(2)))),
        ];
        for b in &partners {
            let ab = hat_tensor(&a, b).unwrap();
            let c2 = ab.group().clone();
            let degrees = [GroupElement(0), GroupElement(1)];
            for &d1 in &degrees {
                for &d2 in &degrees {
                    let sig = vec![d1, d2];
                    let perms = degree_preserving_permutations(&c2, &sig);
                    let space_ab = identity_space(&ab, &sig).unwrap();
                    let space_b = identity_space(b, &sig).unwrap();
                    for mask in 1..9usize {
                        let coeffs: Vec<(Vec<usize>, CycNumber)> = perms
                            .iter()
                            .zip([mask / 3, mask % 3])
                            .filter(|(_, c)| *c > 0)
                            .map(|(p, c)| {
                                (
                                    p.clone(),
                                    CycNumber::from_int(2, if c == 1 { 1 } else { -1 }),
                                )
                            })
                            .collect();
                        let f =
                            MultilinearPolynomial::new(c2.clone(), sig.clone(), coeffs).unwrap();
                        let lhs = space_ab.verdict(&f).unwrap();
                        let rhs = space_b.verdict(&f.f_theta(&tau).unwrap()).unwrap();
                        assert_eq!(lhs, rhs, "signature {sig:?}, mask {mask}");
                        // The space verdict agrees with direct
                        // exhaustive evaluation.
                        assert_eq!(lhs, is_graded_identity(&f, &ab).unwrap().holds);
                    }
                }
            }
        }

        // Degree three, all variables odd, rank six: sweep every
        // coefficient vector over {0, ±1} through the constraint
        // spaces.
        let a6 = grassmann_graded(6).unwrap();
        let b = twisted_as_graded(&TwistedAlgebra::new(Cocycle::trivial(zn(2))));
        let ab = hat_tensor(&a6, &b).unwrap();
        let c2 = ab.group().clone();
        let sig = vec![GroupElement(1), GroupElement(1), GroupElement(1)];
        let perms = degree_preserving_permutations(&c2, &sig);
        assert_eq!(perms.len(), 6);
        let space_ab = identity_space(&ab, &sig).unwrap();
        let space_b = identity_space(&b, &sig).unwrap();
        let mut checked_nontrivial = 0u32;
        for mask in 1..3usize.pow(6) {
            let mut digits = Vec::with_capacity(6);
            let mut m = mask;
            for _ in 0..6 {
                digits.push(m % 3);
                m /= 3;
            }
            let coeffs: Vec<(Vec<usize>, CycNumber)> = perms
                .iter()
                .zip(digits.iter())
                .filter(|(_, &c)| c > 0)
                .map(|(p, &c)| {
                    (
                        p.clone(),
                        CycNumber::from_int(2, if c == 1 { 1 } else { -1 }),
                    )
                })
                .collect();
            let f = MultilinearPolynomial::new(c2.clone(), sig.clone(), coeffs).unwrap();
            let lhs = space_ab.verdict(&f).unwrap();
            let rhs = space_b.verdict(&f.f_theta(&tau).unwrap()).unwrap();
            assert_eq!(lhs, rhs, "mask {mask}");
            if lhs {
                checked_nontrivial += 1;
            }
        }
        // The standard polynomial s3 with the sign twist is among the
        // shared identities, so the sweep saw some of each verdict.
        assert!(checked_nontrivial > 0);
        assert!(checked_nontrivial < 3u32.pow(6) - 1);
    }
}
