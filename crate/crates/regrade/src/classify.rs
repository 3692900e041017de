//! Classification of skew-symmetric bicharacters on finite abelian
//! groups: decomposition into basic rank-one-or-two factors with
//! generator witnesses, rewrite rules between the exceptional factors,
//! isomorphism tests (canonical fast path and exhaustive oracle),
//! enumeration of skew bicharacters for sweeps, and the
//! PI-class/exponent report of a nondegenerate commutation function.

use crate::commfun::{epsilon_form, eta_form, tau_form, Bicharacter, CommutationFunction};
use crate::cyclo::RootOfUnity;
use crate::error::{Error, Result};
use crate::groups::{FiniteGroup, GroupElement};
use crate::twisted::{algebra_type, TwistedAlgebra, TypeKind};
use std::collections::BTreeMap;
use std::sync::Arc;

/// A basic indecomposable skew-symmetric pairing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum BasicFactor {
    /// `(Z_{p^m})²` with trivial diagonal and a pairing of order `p^m`.
    Eta { p: u32, m: u32 },
    /// `(Z_{2^m})²` with diagonal `(1, −1)` and a pairing of order `2^m`.
    Epsilon { m: u32 },
    /// `C2` with the sign pairing on the generator.
    Tau,
}

impl BasicFactor {
    /// Invariant factors of the group the factor lives on.
    pub fn group_shape(&self) -> Vec<u32> {
        match self {
            BasicFactor::Eta { p, m } => {
                let q = p.pow(*m);
                vec![q, q]
            }
            BasicFactor::Epsilon { m } => {
                let q = 2u32.pow(*m);
                vec![q, q]
            }
            BasicFactor::Tau => vec![2],
        }
    }

    /// The reference bicharacter of this factor on its own group.
    pub fn bicharacter(&self) -> Result<Bicharacter> {
        match self {
            BasicFactor::Eta { p, m } => eta_form(*p, *m),
            BasicFactor::Epsilon { m } => epsilon_form(*m),
            BasicFactor::Tau => Ok(tau_form()),
        }
    }

    /// Whether the factor is one of the two exceptional kinds that the
    /// canonical form admits at most one of.
    pub fn is_exceptional(&self) -> bool {
        matches!(self, BasicFactor::Epsilon { .. } | BasicFactor::Tau)
    }

    pub fn label(&self) -> String {
        match self {
            BasicFactor::Eta { p, m } => format!("eta({})", p.pow(*m)),
            BasicFactor::Epsilon { m } => format!("eps({})", 2u32.pow(*m)),
            BasicFactor::Tau => "tau".to_string(),
        }
    }
}

/// A sorted multiset of basic factors with at most one exceptional
/// member — the shape every nondegenerate skew-symmetric pairing
/// reduces to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    factors: Vec<BasicFactor>,
}

impl CanonicalForm {
    pub fn new(mut factors: Vec<BasicFactor>) -> Result<CanonicalForm> {
        factors.sort();
        let exceptional = factors.iter().filter(|f| f.is_exceptional()).count();
        if exceptional > 1 {
            return Err(Error::InvariantViolation(format!(
                "canonical form with {exceptional} exceptional factors"
            )));
        }
        Ok(CanonicalForm { factors })
    }

    pub fn factors(&self) -> &[BasicFactor] {
        &self.factors
    }

    pub fn group_order(&self) -> u64 {
        self.factors
            .iter()
            .map(|f| f.group_shape().iter().map(|&x| x as u64).product::<u64>())
            .product()
    }

    pub fn labels(&self) -> Vec<String> {
        self.factors.iter().map(BasicFactor::label).collect()
    }
}

/// Rewrite a factor multiset into canonical shape: two sign factors
/// fuse (τ⊗τ → ε_2); a surviving sign factor absorbs every ε
/// (ε ⊗ τ → η ⊗ τ); without one, all but the smallest ε turn into η
/// (ε_{2^n} ⊗ ε_{2^m} → ε_{2^n} ⊗ η_{2^m} for n ≤ m).
pub fn rewrite_canonical(factors: Vec<BasicFactor>) -> Vec<BasicFactor> {
    let taus = factors
        .iter()
        .filter(|f| matches!(f, BasicFactor::Tau))
        .count();
    let mut out: Vec<BasicFactor> = factors
        .into_iter()
        .filter(|f| !matches!(f, BasicFactor::Tau))
        .collect();
    for _ in 0..taus / 2 {
        out.push(BasicFactor::Epsilon { m: 1 });
    }
    let tau_left = taus % 2 == 1;
    if tau_left {
        for f in out.iter_mut() {
            if let BasicFactor::Epsilon { m } = *f {
                *f = BasicFactor::Eta { p: 2, m };
            }
        }
        out.push(BasicFactor::Tau);
    } else {
        let smallest = out
            .iter()
            .filter_map(|f| match f {
                BasicFactor::Epsilon { m } => Some(*m),
                _ => None,
            })
            .min();
        if let Some(keep) = smallest {
            let mut kept = false;
            for f in out.iter_mut() {
                if let BasicFactor::Epsilon { m } = *f {
                    if m == keep && !kept {
                        kept = true;
                    } else {
                        *f = BasicFactor::Eta { p: 2, m };
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// Result of decomposing a nondegenerate pairing: the canonical form
/// after rewriting, and the raw factors with generator witnesses in
/// the input group.
pub struct Decomposition {
    pub form: CanonicalForm,
    pub raw: Vec<(BasicFactor, Vec<GroupElement>)>,
}

/// Decompose a nondegenerate skew-symmetric bicharacter into basic
/// factors: split by primes, then greedily extract a pair of maximal
/// pairing order (or a lone sign generator) and recurse on its
/// orthogonal complement. Directness and the factor values are
/// certified exhaustively before returning.
pub fn canonical_decomposition(b: &Bicharacter) -> Result<Decomposition> {
    if !b.is_nondegenerate() {
        return Err(Error::Degenerate(
            "the pairing has a nontrivial radical; only nondegenerate pairings decompose".into(),
        ));
    }
    let group = b.group().clone();
    let mut raw: Vec<(BasicFactor, Vec<GroupElement>)> = Vec::new();
    for p in prime_divisors(group.order() as u64) {
        let part: Vec<GroupElement> = group
            .elements()
            .filter(|&g| is_power_of(group.element_order(g), p as u32))
            .collect();
        decompose_within(b, part, &mut raw)?;
    }
    recomposition_check(b, &raw)?;
    let form = CanonicalForm::new(rewrite_canonical(
        raw.iter().map(|(f, _)| *f).collect(),
    ))?;
    Ok(Decomposition { form, raw })
}

fn decompose_within(
    b: &Bicharacter,
    mut part: Vec<GroupElement>,
    out: &mut Vec<(BasicFactor, Vec<GroupElement>)>,
) -> Result<()> {
    let group = b.group().clone();
    while part.len() > 1 {
        // Maximal pairing order over the current block, diagonal
        // included.
        let mut best_r = 1u32;
        for &a in &part {
            for &c in &part {
                best_r = best_r.max(b.value(a, c).multiplicative_order());
            }
        }
        if best_r == 1 {
            return Err(Error::InvariantViolation(
                "a block of a nondegenerate pairing pairs trivially with itself".into(),
            ));
        }
        // Prefer an off-diagonal pair attaining it, nicest diagonal
        // signs first.
        let mut pick: Option<(u8, GroupElement, GroupElement)> = None;
        for &a in &part {
            for &c in &part {
                if a == c || b.value(a, c).multiplicative_order() != best_r {
                    continue;
                }
                let rank = match (b.psi(a) > 0, b.psi(c) > 0) {
                    (true, true) => 0u8,
                    (false, false) => 2,
                    _ => 1,
                };
                if pick.map_or(true, |(r, x, y)| (rank, a.0, c.0) < (r, x.0, y.0)) {
                    pick = Some((rank, a, c));
                }
            }
        }
        let extracted: (BasicFactor, Vec<GroupElement>) = match pick {
            Some((rank, a, c)) if !(rank == 2 && best_r == 2) => {
                let (p, m) = prime_power(best_r).ok_or_else(|| {
                    Error::InvariantViolation(format!(
                        "pairing order {best_r} inside a one-prime block is not a prime power"
                    ))
                })?;
                let (a, c) = match rank {
                    0 => (a, c),
                    1 => {
                        if b.psi(a) > 0 {
                            (a, c)
                        } else {
                            (c, a)
                        }
                    }
                    _ => {
                        // Both diagonals are −1 and the order exceeds
                        // 2: replacing a by ac flips its diagonal and
                        // keeps the pairing order.
                        let ac = group.mul(a, c);
                        if b.psi(ac) != 1
                            || b.value(ac, c).multiplicative_order() != best_r
                        {
                            return Err(Error::InvariantViolation(
                                "diagonal normalization failed on a doubly-odd pair".into(),
                            ));
                        }
                        (ac, c)
                    }
                };
                let factor = if b.psi(a) == 1 && b.psi(c) == 1 {
                    BasicFactor::Eta { p, m }
                } else if b.psi(a) == 1 && b.psi(c) == -1 {
                    if p != 2 {
                        return Err(Error::InvariantViolation(
                            "a sign on the diagonal outside the 2-part".into(),
                        ));
                    }
                    BasicFactor::Epsilon { m }
                } else {
                    return Err(Error::InvariantViolation(
                        "diagonal normalization left an unexpected sign pattern".into(),
                    ));
                };
                let span = generated_subgroup(&group, &[a, c]);
                if span.len() != (best_r as usize) * (best_r as usize) {
                    return Err(Error::InvariantViolation(format!(
                        "witness pair generates a subgroup of size {}, expected {}",
                        span.len(),
                        (best_r as usize).pow(2)
                    )));
                }
                (factor, vec![a, c])
            }
            _ => {
                // Only the diagonal attains the maximum (or every
                // attaining pair is doubly odd at order two): peel one
                // sign generator.
                if best_r != 2 {
                    return Err(Error::InvariantViolation(
                        "a diagonal pairing value of order above two".into(),
                    ));
                }
                let t = part
                    .iter()
                    .copied()
                    .find(|&g| b.psi(g) < 0)
                    .ok_or_else(|| {
                        Error::InvariantViolation(
                            "order-two block without a sign on the diagonal".into(),
                        )
                    })?;
                if group.element_order(t) != 2 {
                    return Err(Error::InvariantViolation(
                        "a sign generator of order above two survived nondegeneracy".into(),
                    ));
                }
                (BasicFactor::Tau, vec![t])
            }
        };
        let (factor, gens) = extracted;
        let span = generated_subgroup(&group, &gens);
        let complement: Vec<GroupElement> = part
            .iter()
            .copied()
            .filter(|&g| gens.iter().all(|&s| b.value(g, s).is_one()))
            .collect();
        if span.len() * complement.len() != part.len()
            || span
                .iter()
                .any(|s| *s != group.identity() && complement.contains(s))
        {
            return Err(Error::InvariantViolation(
                "extracted factor does not split its block directly".into(),
            ));
        }
        out.push((factor, gens));
        part = complement;
    }
    Ok(())
}

/// Verify that the witnessed factors reproduce the pairing: their
/// subgroups decompose the group directly, and the pairing of any two
/// elements is the product of the componentwise pairings.
fn recomposition_check(
    b: &Bicharacter,
    raw: &[(BasicFactor, Vec<GroupElement>)],
) -> Result<()> {
    let group = b.group().clone();
    let locals: Vec<Vec<GroupElement>> = raw
        .iter()
        .map(|(_, gens)| generated_subgroup(&group, gens))
        .collect();
    let mut coords: BTreeMap<usize, Vec<GroupElement>> = BTreeMap::new();
    let mut choice = vec![0usize; locals.len()];
    loop {
        let components: Vec<GroupElement> = choice
            .iter()
            .enumerate()
            .map(|(i, &c)| locals[i][c])
            .collect();
        let product = components
            .iter()
            .fold(group.identity(), |acc, &g| group.mul(acc, g));
        if coords.insert(product.0, components).is_some() {
            return Err(Error::InvariantViolation(
                "factor subgroups overlap; the decomposition is not direct".into(),
            ));
        }
        let mut pos = 0;
        loop {
            if pos == locals.len() {
                break;
            }
            choice[pos] += 1;
            if choice[pos] < locals[pos].len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
        if pos == locals.len() {
            break;
        }
    }
    if coords.len() != group.order() {
        return Err(Error::InvariantViolation(format!(
            "factor subgroups span {} of {} elements",
            coords.len(),
            group.order()
        )));
    }
    for g in group.elements() {
        for h in group.elements() {
            let cg = &coords[&g.0];
            let ch = &coords[&h.0];
            let mut acc = RootOfUnity::one(1);
            for i in 0..cg.len() {
                acc = acc.mul_rescaled(&b.value(cg[i], ch[i]));
            }
            let (x, y) = RootOfUnity::unify(&acc, &b.value(g, h));
            if x != y {
                return Err(Error::InvariantViolation(format!(
                    "componentwise pairing disagrees at ({}, {})",
                    g.0, h.0
                )));
            }
        }
    }
    Ok(())
}

/// The reference bicharacter of a factor list on the direct product of
/// the factor groups.
pub fn tensor_bicharacter(factors: &[BasicFactor]) -> Result<Bicharacter> {
    let mut acc: Option<Bicharacter> = None;
    for f in factors {
        let b = f.bicharacter()?;
        acc = Some(match acc {
            None => b,
            Some(prev) => prev.tensor(&b),
        });
    }
    match acc {
        Some(b) => Ok(b),
        None => Bicharacter::from_fn(crate::groups::zn(1), |_, _| RootOfUnity::one(1)),
    }
}

/// Exhaustive isomorphism test between two pairings on abelian groups:
/// search over generator images preserving orders and pairing values.
pub fn bicharacters_isomorphic_oracle(b1: &Bicharacter, b2: &Bicharacter) -> Result<bool> {
    let g1 = b1.group().clone();
    let g2 = b2.group().clone();
    if g1.order() != g2.order() {
        return Ok(false);
    }
    if g1.order() > 32 {
        return Err(Error::Validation(format!(
            "isomorphism oracle capped at order 32, got {}",
            g1.order()
        )));
    }
    let factors = g1
        .invariant_factors()
        .ok_or(Error::NotAbelian("bicharacters_isomorphic_oracle"))?
        .to_vec();
    g2.invariant_factors()
        .ok_or(Error::NotAbelian("bicharacters_isomorphic_oracle"))?;
    let gens = g1.generators();
    let mut images: Vec<GroupElement> = Vec::new();
    Ok(search_isomorphism(
        b1, b2, &g2, &gens, &factors, &mut images,
    ))
}

fn search_isomorphism(
    b1: &Bicharacter,
    b2: &Bicharacter,
    g2: &Arc<FiniteGroup>,
    gens: &[GroupElement],
    factors: &[u32],
    images: &mut Vec<GroupElement>,
) -> bool {
    let i = images.len();
    if i == gens.len() {
        // All pairings on generators match; the map is a homomorphism
        // preserving the pairing. It is an isomorphism when the images
        // generate.
        return generated_subgroup(g2, images).len() == g2.order();
    }
    for cand in g2.elements() {
        // The image's order must divide the generator's, so powers of
        // the relation collapse correctly.
        if g2.pow(cand, factors[i] as i64) != g2.identity() {
            continue;
        }
        let mut ok = true;
        for (j, &img) in images.iter().enumerate() {
            let (x, y) = RootOfUnity::unify(&b1.value(gens[j], gens[i]), &b2.value(img, cand));
            if x != y {
                ok = false;
                break;
            }
        }
        if ok {
            let (x, y) = RootOfUnity::unify(&b1.value(gens[i], gens[i]), &b2.value(cand, cand));
            ok = x == y;
        }
        if !ok {
            continue;
        }
        images.push(cand);
        if search_isomorphism(b1, b2, g2, gens, factors, images) {
            return true;
        }
        images.pop();
    }
    false
}

/// Isomorphism test: canonical forms when both pairings are
/// nondegenerate, the exhaustive oracle otherwise.
pub fn bicharacters_isomorphic(b1: &Bicharacter, b2: &Bicharacter) -> Result<bool> {
    if b1.group().order() != b2.group().order() {
        return Ok(false);
    }
    if b1.is_nondegenerate() && b2.is_nondegenerate() {
        let d1 = canonical_decomposition(b1)?;
        let d2 = canonical_decomposition(b2)?;
        return Ok(d1.form == d2.form);
    }
    bicharacters_isomorphic_oracle(b1, b2)
}

/// The three matrix-type classes a nondegenerate commutation function
/// realizes, up to identical polynomial identities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PiClass {
    /// Full matrix algebra `M_n(F)`.
    MatrixField { n: u32 },
    /// Supermatrix algebra `M_{2m,m}(E)` over the infinite exterior
    /// algebra.
    MatrixSuper { m: u32 },
    /// Full matrix algebra `M_n(E)` over the infinite exterior algebra.
    MatrixGrassmann { n: u32 },
}

impl PiClass {
    pub fn label(&self) -> String {
        match self {
            PiClass::MatrixField { n } => format!("M_{n}(F)"),
            PiClass::MatrixSuper { m } => format!("M_{{{},{}}}(E)", 2 * m, m),
            PiClass::MatrixGrassmann { n } => format!("M_{n}(E)"),
        }
    }
}

pub struct PiClassReport {
    /// The exponent of the realized algebra: the order of the grading
    /// group.
    pub exp: usize,
    pub class: PiClass,
}

/// Exponent and matrix-type class of the algebra a nondegenerate
/// commutation function realizes.
pub fn pi_class_and_exponent(f: &CommutationFunction) -> Result<PiClassReport> {
    let report = f.nondegeneracy()?;
    if !report.nondegenerate {
        return Err(Error::Degenerate(format!(
            "degenerate commutation function (witness element {:?}); the exponent equals \
             the group order only in the nondegenerate case",
            report.witness.map(|g| g.0)
        )));
    }
    let algebra = TwistedAlgebra::new(f.cocycle().clone());
    let split = f.parity_kernel();
    let t = algebra_type(&algebra, &split)?;
    let n = f.group().order();
    let class = match t.kind {
        TypeKind::One => {
            check_arithmetic((t.parameter as usize).pow(2), n)?;
            PiClass::MatrixField { n: t.parameter }
        }
        TypeKind::Two => {
            check_arithmetic((2 * t.parameter as usize).pow(2), n)?;
            PiClass::MatrixSuper { m: t.parameter }
        }
        TypeKind::Three => {
            check_arithmetic(2 * (t.parameter as usize).pow(2), n)?;
            PiClass::MatrixGrassmann { n: t.parameter }
        }
    };
    Ok(PiClassReport { exp: n, class })
}

fn check_arithmetic(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::InvariantViolation(format!(
            "type parameter accounts for {expected} but the group has order {got}"
        )));
    }
    Ok(())
}

/// Invariant-factor chains `n1 | n2 | …` with product between 2 and
/// `max_order`, each describing one abelian group up to isomorphism.
pub fn abelian_shapes(max_order: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut shape: Vec<u32> = Vec::new();
    fn extend(shape: &mut Vec<u32>, product: usize, max: usize, out: &mut Vec<Vec<u32>>) {
        let last = shape.last().copied().unwrap_or(1);
        let mut n = 2;
        while product * (n as usize) <= max {
            if n % last == 0 {
                shape.push(n);
                out.push(shape.clone());
                extend(shape, product * n as usize, max, out);
                shape.pop();
            }
            n += 1;
        }
    }
    extend(&mut shape, 1, max_order, &mut out);
    out.sort();
    out
}

/// All skew-symmetric bicharacters on an abelian group, enumerated by
/// generator tables: one root choice per generator pair, one sign per
/// even-order generator.
pub fn skew_bicharacters(group: &Arc<FiniteGroup>) -> Result<Vec<Bicharacter>> {
    enumerate_bicharacters(group, true)
}

/// The alternating subset: trivial on the diagonal.
pub fn alternating_bicharacters(group: &Arc<FiniteGroup>) -> Result<Vec<Bicharacter>> {
    enumerate_bicharacters(group, false)
}

fn enumerate_bicharacters(
    group: &Arc<FiniteGroup>,
    with_signs: bool,
) -> Result<Vec<Bicharacter>> {
    let factors = group
        .invariant_factors()
        .ok_or(Error::NotAbelian("bicharacter enumeration"))?
        .to_vec();
    let k = factors.len();
    // Choice ranges: one per unordered generator pair (a root of the
    // gcd order), then one per even generator if signs are on.
    let mut ranges: Vec<u32> = Vec::new();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            pairs.push((i, j));
            ranges.push(crate::cyclo::gcd(factors[i] as u64, factors[j] as u64) as u32);
        }
    }
    let mut sign_slots: Vec<usize> = Vec::new();
    if with_signs {
        for (i, &f) in factors.iter().enumerate() {
            if f % 2 == 0 {
                sign_slots.push(i);
                ranges.push(2);
            }
        }
    }
    let mut out = Vec::new();
    let mut choice: Vec<u32> = vec![0; ranges.len()];
    loop {
        let mut vals = vec![vec![RootOfUnity::one(1); k]; k];
        for (slot, &(i, j)) in pairs.iter().enumerate() {
            let order = ranges[slot];
            let root = RootOfUnity::new(order.max(1), choice[slot] as i64);
            vals[i][j] = root;
            vals[j][i] = root.inv();
        }
        for (slot, &i) in sign_slots.iter().enumerate() {
            let idx = pairs.len() + slot;
            vals[i][i] = if choice[idx] == 0 {
                RootOfUnity::one(1)
            } else {
                RootOfUnity::minus_one(2)?
            };
        }
        out.push(Bicharacter::from_gen_table(group.clone(), &vals)?);
        let mut pos = 0;
        loop {
            if pos == ranges.len() {
                return Ok(out);
            }
            choice[pos] += 1;
            if choice[pos] < ranges[pos] {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// Closure of a generating set inside the group, in element order.
pub fn generated_subgroup(group: &Arc<FiniteGroup>, gens: &[GroupElement]) -> Vec<GroupElement> {
    let mut seen = vec![false; group.order()];
    seen[group.identity().0] = true;
    let mut frontier = vec![group.identity()];
    while let Some(g) = frontier.pop() {
        for &s in gens {
            let next = group.mul(g, s);
            if !seen[next.0] {
                seen[next.0] = true;
                frontier.push(next);
            }
        }
    }
    (0..group.order())
        .filter(|&i| seen[i])
        .map(GroupElement)
        .collect()
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn is_power_of(mut n: u32, p: u32) -> bool {
    while n % p == 0 {
        n /= p;
    }
    n == 1
}

fn prime_power(r: u32) -> Option<(u32, u32)> {
    for p in prime_divisors(r as u64) {
        let p = p as u32;
        if is_power_of(r, p) {
            let mut m = 0;
            let mut x = r;
            while x > 1 {
                x /= p;
                m += 1;
            }
            return Some((p, m));
        }
    }
    None
}
