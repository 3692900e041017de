//! The commutation matrix of a graded algebra: construction from a
//! commutation function, the exact square identity, trace and
//! eigenvalue multiplicities, determinants (scalar and embedded
//! through a representation), characteristic and minimal polynomials,
//! conjugacy, and an explicit kernel vector in the degenerate case.
//!
//! The matrix `M` is indexed by the grading group; its `(g,h)` entry
//! is `τ_{g,h}·U_gU_hU_g⁻¹U_h⁻¹`, a scalar multiple of the basis
//! monomial at the commutator `[g,h]`, where the sign `τ` is −1
//! exactly when both degrees are parity-odd. Over an abelian group
//! every commutator is trivial and `M` is the plain table of
//! commutation values.

use crate::cyclo::{cyc_det, poly_mul, CycNumber, RootOfUnity};
use crate::commfun::CommutationFunction;
use crate::error::{Error, Result};
use crate::groups::{FiniteGroup, GroupElement};
use crate::twisted::{isqrt, TGAElement, TwistedAlgebra};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Commutation matrix with entries stored as (scalar, commutator)
/// pairs meaning `scalar·U_commutator`.
pub struct CommutationMatrix {
    function: CommutationFunction,
    algebra: Arc<TwistedAlgebra>,
    entries: Vec<Vec<(RootOfUnity, GroupElement)>>,
}

/// Exact spectral data of a verified commutation matrix.
pub struct SpectrumReport {
    pub n: usize,
    /// Trace of the matrix as a multiple of `U_e`: 0 or `n`.
    pub trace_scalar: i64,
    /// Multiplicity of the eigenvalue `+√n`.
    pub alpha_plus: usize,
    /// Multiplicity of the eigenvalue `−√n`.
    pub alpha_minus: usize,
    /// Characteristic polynomial, integer coefficients, constant term
    /// first.
    pub char_poly: Vec<i128>,
    /// Minimal polynomial, same convention.
    pub min_poly: Vec<i128>,
    /// Exact determinant when the matrix is a plain scalar table
    /// (abelian grading group).
    pub det_value: Option<CycNumber>,
}

/// Build the commutation matrix of a realized commutation function.
pub fn build_matrix(function: &CommutationFunction) -> Result<CommutationMatrix> {
    let algebra = TwistedAlgebra::new(function.cocycle().clone());
    let group = algebra.group().clone();
    let cocycle = algebra.cocycle();
    let co = algebra.coeff_order();
    let n = group.order();
    let mut entries = Vec::with_capacity(n);
    for g in group.elements() {
        let mut row = Vec::with_capacity(n);
        for h in group.elements() {
            let word = [g, h, group.inv(g), group.inv(h)];
            let (s, c) = cocycle.word_scalar(&word);
            let mut scalar = s
                .mul(&cocycle.inv_scalar(g))?
                .mul(&cocycle.inv_scalar(h))?
                .change_order(co)?;
            if function.parity(g) == 1 && function.parity(h) == 1 {
                scalar = scalar.mul(&RootOfUnity::minus_one(co)?)?;
            }
            row.push((scalar, c));
        }
        entries.push(row);
    }
    Ok(CommutationMatrix {
        function: function.clone(),
        algebra,
        entries,
    })
}

impl CommutationMatrix {
    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.algebra.group()
    }

    pub fn function(&self) -> &CommutationFunction {
        &self.function
    }

    /// The twisted group algebra the entries live in.
    pub fn algebra(&self) -> &Arc<TwistedAlgebra> {
        &self.algebra
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, g: GroupElement, h: GroupElement) -> &(RootOfUnity, GroupElement) {
        &self.entries[g.0][h.0]
    }

    pub fn entry_element(&self, g: GroupElement, h: GroupElement) -> Result<TGAElement> {
        let (s, c) = self.entry(g, h);
        TGAElement::monomial(&self.algebra, *c)?.scale_root(s)
    }

    /// True when every commutator is trivial, i.e. the matrix is a
    /// plain table of scalars.
    pub fn is_scalar(&self) -> bool {
        let e = self.group().identity();
        self.entries
            .iter()
            .flatten()
            .all(|(_, c)| *c == e)
    }

    /// The scalar table of an abelian-group matrix.
    pub fn scalar_table(&self) -> Result<Vec<Vec<RootOfUnity>>> {
        if !self.is_scalar() {
            return Err(Error::Validation(
                "the matrix has nontrivial commutator entries; a scalar table \
                 exists only over an abelian grading group"
                    .into(),
            ));
        }
        Ok(self
            .entries
            .iter()
            .map(|row| row.iter().map(|(s, _)| *s).collect())
            .collect())
    }

    /// Check the exact identity `M·M = |G|·Id·U_e`, the hallmark of a
    /// nondegenerate grading.
    pub fn verify_square(&self) -> Result<bool> {
        let group = self.group().clone();
        let cocycle = self.algebra.cocycle();
        let co = self.algebra.coeff_order();
        let n = self.n() as i128;
        for g in group.elements() {
            for h in group.elements() {
                let mut acc: BTreeMap<GroupElement, CycNumber> = BTreeMap::new();
                for k in group.elements() {
                    let (s1, c1) = &self.entries[g.0][k.0];
                    let (s2, c2) = &self.entries[k.0][h.0];
                    let a = cocycle.value(*c1, *c2).change_order(co)?;
                    let scalar = s1.mul(s2)?.mul(&a)?;
                    let prod = group.mul(*c1, *c2);
                    let entry = acc.entry(prod).or_insert_with(|| CycNumber::zero(co));
                    *entry = entry.add(&CycNumber::from_root(&scalar));
                }
                let mut diagonal_seen = false;
                for (p, coeff) in acc {
                    let expected = if g == h && p == group.identity() {
                        diagonal_seen = true;
                        CycNumber::from_int(co, n)
                    } else {
                        CycNumber::zero(co)
                    };
                    if !coeff.eq(&expected) {
                        return Ok(false);
                    }
                }
                if g == h && !diagonal_seen {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Trace, eigenvalue multiplicities, characteristic and minimal
    /// polynomials, and (over abelian groups) the exact determinant.
    ///
    /// Requires the square identity; a degenerate matrix has no such
    /// spectrum and is reported as an error.
    pub fn spectrum(&self) -> Result<SpectrumReport> {
        if !self.verify_square()? {
            return Err(Error::Degenerate(
                "the matrix fails the square identity; spectral data exists \
                 only for nondegenerate gradings"
                    .into(),
            ));
        }
        let n = self.n();
        let trace: i64 = self
            .group()
            .elements()
            .map(|g| self.function.psi(g) as i64)
            .sum();
        if trace != 0 && trace != n as i64 {
            return Err(Error::InvariantViolation(format!(
                "trace {trace} is neither 0 nor the dimension {n}"
            )));
        }
        let (alpha_plus, alpha_minus, char_poly, min_poly) = if trace == n as i64 {
            let r = isqrt(n as u32) as usize;
            if r * r != n {
                return Err(Error::InvariantViolation(format!(
                    "full trace over a non-square dimension {n}"
                )));
            }
            let ap = (n + r) / 2;
            let am = (n - r) / 2;
            let mut poly = vec![1i128];
            for _ in 0..ap {
                poly = poly_mul(&poly, &[-(r as i128), 1]);
            }
            for _ in 0..am {
                poly = poly_mul(&poly, &[r as i128, 1]);
            }
            let min = if am == 0 {
                vec![-(r as i128), 1]
            } else {
                vec![-(n as i128), 0, 1]
            };
            (ap, am, poly, min)
        } else {
            if n % 2 != 0 {
                return Err(Error::InvariantViolation(format!(
                    "zero trace over odd dimension {n}"
                )));
            }
            let mut poly = vec![1i128];
            for _ in 0..n / 2 {
                poly = poly_mul(&poly, &[-(n as i128), 0, 1]);
            }
            (n / 2, n / 2, poly, vec![-(n as i128), 0, 1])
        };
        let det_value = if self.is_scalar() && n <= 18 {
            Some(self.exact_determinant()?)
        } else {
            None
        };
        Ok(SpectrumReport {
            n,
            trace_scalar: trace,
            alpha_plus,
            alpha_minus,
            char_poly,
            min_poly,
            det_value,
        })
    }

    /// Exact determinant of a scalar (abelian-group) matrix via
    /// fraction-free elimination over the cyclotomic integers.
    pub fn exact_determinant(&self) -> Result<CycNumber> {
        let table = self.scalar_table()?;
        let co = self.algebra.coeff_order();
        let rows: Vec<Vec<CycNumber>> = table
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| {
                        CycNumber::from_root(&s.change_order(co).expect("stored at this order"))
                    })
                    .collect()
            })
            .collect();
        cyc_det(&rows)
    }

    /// Determinant of the matrix pushed through a representation of
    /// the entry algebra: each entry `scalar·U_c` becomes the block
    /// `scalar·ρ(U_c)`, and the determinant of the resulting
    /// `n·d × n·d` scalar matrix is computed exactly.
    pub fn embedded_determinant(&self, rep: &Representation) -> Result<CycNumber> {
        if !Arc::ptr_eq(&self.algebra, rep.algebra()) {
            return Err(Error::AlgebraMismatch);
        }
        let n = self.n();
        let d = rep.dim();
        let co = rep.coeff_order();
        let size = n * d;
        let mut big = vec![vec![CycNumber::zero(co); size]; n * d];
        for g in 0..n {
            for h in 0..n {
                let (s, c) = &self.entries[g][h];
                let scalar = CycNumber::from_root(&s.change_order(co)?);
                let image = rep.image(*c);
                for i in 0..d {
                    for j in 0..d {
                        big[g * d + i][h * d + j] = image[i][j].mul(&scalar);
                    }
                }
            }
        }
        cyc_det(&big)
    }

    /// Whether two matrices are conjugate: both must satisfy the
    /// square identity, and then equal size plus equal trace decide
    /// (each matrix is diagonalizable with spectrum `±√n`).
    pub fn conjugate_to(&self, other: &CommutationMatrix) -> Result<bool> {
        let a = self.spectrum()?;
        let b = other.spectrum()?;
        Ok(a.n == b.n && a.trace_scalar == b.trace_scalar)
    }

    /// Explicit nonzero kernel vector for a degenerate grading.
    ///
    /// With a degeneracy witness `h` (its degree commutes with the
    /// whole centralizer), the class sum `z = Σ U_tU_hU_t⁻¹` over
    /// coset representatives is central, and the vector with `z` at
    /// position `e` and `−s_c·U_c` at each conjugate `c` of `h`
    /// (where `z = Σ s_c·U_c`) satisfies `M·v = 0`: row `g` reads
    /// `z − U_g z U_g⁻¹ = 0`. Both facts are re-verified exactly.
    pub fn degenerate_kernel(&self) -> Result<Vec<TGAElement>> {
        let report = self.function.nondegeneracy()?;
        let witness = report.witness.ok_or(Error::NoKernel)?;
        let group = self.group().clone();
        let cocycle = self.algebra.cocycle();
        let mut v: Vec<TGAElement> = (0..self.n())
            .map(|_| TGAElement::zero(&self.algebra))
            .collect();
        let reps = group.coset_reps(&group.centralizer(witness))?;
        for t in reps {
            let (s, c) = cocycle.conj(t, witness);
            let term = TGAElement::monomial(&self.algebra, c)?.scale_root(&s)?;
            let e = group.identity();
            v[e.0] = v[e.0].add(&term)?;
            v[c.0] = v[c.0].sub(&term)?;
        }
        if v.iter().all(|x| x.is_zero()) {
            return Err(Error::InvariantViolation(
                "constructed kernel vector vanished".into(),
            ));
        }
        for g in group.elements() {
            let mut acc = TGAElement::zero(&self.algebra);
            for h in group.elements() {
                acc = acc.add(&self.entry_element(g, h)?.mul(&v[h.0])?)?;
            }
            if !acc.is_zero() {
                return Err(Error::InvariantViolation(format!(
                    "kernel vector fails at row {}",
                    g.0
                )));
            }
        }
        Ok(v)
    }
}

/// A matrix representation of a twisted group algebra: one matrix per
/// basis monomial, validated to respect the twisted product.
pub struct Representation {
    algebra: Arc<TwistedAlgebra>,
    dim: usize,
    images: Vec<Vec<Vec<CycNumber>>>,
}

impl Representation {
    /// Wrap and validate a family of images: `ρ(U_e) = I` and
    /// `ρ(U_g)ρ(U_h) = α(g,h)·ρ(U_{gh})` for all pairs.
    pub fn new(
        algebra: &Arc<TwistedAlgebra>,
        images: Vec<Vec<Vec<CycNumber>>>,
    ) -> Result<Representation> {
        let group = algebra.group().clone();
        let n = group.order();
        if images.len() != n {
            return Err(Error::Validation(format!(
                "expected {n} images, got {}",
                images.len()
            )));
        }
        let d = images[0].len();
        if d == 0
            || images
                .iter()
                .any(|m| m.len() != d || m.iter().any(|row| row.len() != d))
        {
            return Err(Error::Validation(
                "representation images must be square matrices of one common size".into(),
            ));
        }
        let co = algebra.coeff_order();
        let images: Vec<Vec<Vec<CycNumber>>> = images
            .into_iter()
            .map(|m| {
                m.into_iter()
                    .map(|row| {
                        row.into_iter()
                            .map(|c| c.change_order(co))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let rep = Representation {
            algebra: algebra.clone(),
            dim: d,
            images,
        };
        let e = group.identity();
        if !matrices_equal(rep.image(e), &identity_matrix(d, co)) {
            return Err(Error::Validation(
                "the identity monomial must map to the identity matrix".into(),
            ));
        }
        for g in group.elements() {
            for h in group.elements() {
                let lhs = mat_mul(rep.image(g), rep.image(h));
                let a = algebra.cocycle().value(g, h).change_order(co)?;
                let rhs = scale_matrix(rep.image(group.mul(g, h)), &CycNumber::from_root(&a));
                if !matrices_equal(&lhs, &rhs) {
                    return Err(Error::Validation(format!(
                        "images at elements {} and {} violate the twisted product",
                        g.0, h.0
                    )));
                }
            }
        }
        Ok(rep)
    }

    /// Left-regular representation: `U_g` acts on the basis
    /// `{U_h}` by `U_gU_h = α(g,h)U_{gh}`.
    pub fn regular(algebra: &Arc<TwistedAlgebra>) -> Result<Representation> {
        let group = algebra.group().clone();
        let n = group.order();
        let co = algebra.coeff_order();
        let mut images = Vec::with_capacity(n);
        for g in group.elements() {
            let mut m = vec![vec![CycNumber::zero(co); n]; n];
            for h in group.elements() {
                let a = algebra.cocycle().value(g, h).change_order(co)?;
                let target = group.mul(g, h);
                m[target.0][h.0] = CycNumber::from_root(&a);
            }
            images.push(m);
        }
        Representation::new(algebra, images)
    }

    /// The `n`-dimensional irreducible representation of the staircase
    /// twist on `Z_n × Z_n`: the first generator maps to
    /// `diag(1, ζ, …, ζ^{n−1})` and the second to the inverse cyclic
    /// shift, so that `YX = ζ·XY` matches the staircase value
    /// `ζ^{a₂b₁}`.
    pub fn staircase(algebra: &Arc<TwistedAlgebra>) -> Result<Representation> {
        let group = algebra.group().clone();
        let factors = group
            .invariant_factors()
            .ok_or(Error::NotAbelian("staircase representation"))?
            .to_vec();
        if factors.len() != 2 || factors[0] != factors[1] {
            return Err(Error::Validation(
                "the staircase representation needs a group of square shape \
                 Z_n × Z_n"
                    .into(),
            ));
        }
        let n = factors[0] as usize;
        let co = algebra.coeff_order();
        let zeta = RootOfUnity::new(n as u32, 1).change_order(co)?;
        let mut images = Vec::with_capacity(group.order());
        for g in group.elements() {
            let res = group.residues(g).expect("abelian group");
            let (a1, a2) = (res[0] as usize, res[1] as usize);
            // (X^{a1} Y^{a2})[i][j] = ζ^{a1·i} when i = j − a2 (mod n).
            let mut m = vec![vec![CycNumber::zero(co); n]; n];
            for j in 0..n {
                let i = (j + n - a2 % n) % n;
                let s = zeta.pow((a1 * i) as i64);
                m[i][j] = CycNumber::from_root(&s);
            }
            images.push(m);
        }
        Representation::new(algebra, images)
    }

    pub fn algebra(&self) -> &Arc<TwistedAlgebra> {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeff_order(&self) -> u32 {
        self.algebra.coeff_order()
    }

    pub fn image(&self, g: GroupElement) -> &Vec<Vec<CycNumber>> {
        &self.images[g.0]
    }
}

fn identity_matrix(d: usize, order: u32) -> Vec<Vec<CycNumber>> {
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    if i == j {
                        CycNumber::one(order)
                    } else {
                        CycNumber::zero(order)
                    }
                })
                .collect()
        })
        .collect()
}

fn mat_mul(a: &[Vec<CycNumber>], b: &[Vec<CycNumber>]) -> Vec<Vec<CycNumber>> {
    let d = a.len();
    let order = a[0][0].order;
    let mut out = vec![vec![CycNumber::zero(order); d]; d];
    for i in 0..d {
        for k in 0..d {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..d {
                out[i][j] = out[i][j].add(&a[i][k].mul(&b[k][j]));
            }
        }
    }
    out
}

fn scale_matrix(m: &[Vec<CycNumber>], s: &CycNumber) -> Vec<Vec<CycNumber>> {
    m.iter()
        .map(|row| row.iter().map(|c| c.mul(s)).collect())
        .collect()
}

fn matrices_equal(a: &[Vec<CycNumber>], b: &[Vec<CycNumber>]) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b.iter())
            .all(|(ra, rb)| ra.iter().zip(rb.iter()).all(|(x, y)| x.eq(y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycles::{dihedral_quaternion_cocycle, Cocycle};
    use crate::commfun::{epsilon_form, eta_form, tau_form, Bicharacter};
    use crate::groups::zn;

    fn realized(b: &Bicharacter) -> CommutationFunction {
        CommutationFunction::from_bicharacter(b).unwrap()
    }

    fn envelope_function() -> CommutationFunction {
        let parity: Vec<u8> = (0..8).map(|i| (i % 2) as u8).collect();
        CommutationFunction::new(dihedral_quaternion_cocycle(), parity).unwrap()
    }

    #[test]
    fn known_small_matrices() {
        // Sign pairing on C2.
        let m = build_matrix(&realized(&tau_form())).unwrap();
        assert!(m.is_scalar());
        let t = m.scalar_table().unwrap();
        let signs: Vec<Vec<i8>> = t
            .iter()
            .map(|row| row.iter().map(|s| s.as_sign().unwrap()).collect())
            .collect();
        assert_eq!(signs, vec![vec![1, 1], vec![1, -1]]);

        // Klein pairing in the order e, a, b, ab.
        let b = eta_form(2, 1).unwrap();
        let m = build_matrix(&realized(&b)).unwrap();
        let g = b.group().clone();
        let order: Vec<GroupElement> = [[0i64, 0], [1, 0], [0, 1], [1, 1]]
            .iter()
            .map(|r| g.element_from_residues(r).unwrap())
            .collect();
        let expected = [
            [1, 1, 1, 1],
            [1, 1, -1, -1],
            [1, -1, 1, -1],
            [1, -1, -1, 1],
        ];
        for (i, &x) in order.iter().enumerate() {
            for (j, &y) in order.iter().enumerate() {
                let (s, c) = m.entry(x, y);
                assert_eq!(*c, g.identity());
                assert_eq!(s.as_sign().unwrap(), expected[i][j]);
                // The matrix built through monomial words agrees with
                // the directly tabulated pairing.
                let (u, v) = RootOfUnity::unify(s, &b.value(x, y));
                assert_eq!(u, v);
            }
        }

        // Dihedral envelope grading: the (x, y) entry sits at the
        // commutator x².
        let m = build_matrix(&envelope_function()).unwrap();
        let (s, c) = m.entry(GroupElement(1), GroupElement(4));
        assert_eq!(*c, GroupElement(2));
        assert!(s.as_sign().is_some());
    }

    #[test]
    fn square_identity_over_the_catalog() {
        let mut nondegenerate: Vec<CommutationFunction> = vec![
            realized(&tau_form()),
            realized(&eta_form(2, 1).unwrap()),
            realized(&eta_form(3, 1).unwrap()),
            realized(&eta_form(2, 2).unwrap()),
            realized(&epsilon_form(1).unwrap()),
            realized(&eta_form(2, 1).unwrap().tensor(&eta_form(2, 1).unwrap())),
        ];
        nondegenerate.push(envelope_function());
        for f in &nondegenerate {
            let m = build_matrix(f).unwrap();
            assert!(m.verify_square().unwrap());
        }

        // The trivial pairing on C2 is degenerate and fails.
        let trivial = CommutationFunction::even(Cocycle::trivial(zn(2)));
        let m = build_matrix(&trivial).unwrap();
        assert!(!m.verify_square().unwrap());
        assert!(m.spectrum().is_err());
    }

    #[test]
    fn traces_and_multiplicities() {
        // Full trace with an all-even parity.
        let m = build_matrix(&realized(&eta_form(2, 1).unwrap())).unwrap();
        let s = m.spectrum().unwrap();
        assert_eq!(s.trace_scalar, 4);
        assert_eq!((s.alpha_plus, s.alpha_minus), (3, 1));
        assert_eq!(s.char_poly, vec![-16, 16, 0, -4, 1]);
        assert_eq!(s.min_poly, vec![-4, 0, 1]);

        let m = build_matrix(&realized(&eta_form(3, 1).unwrap())).unwrap();
        let s = m.spectrum().unwrap();
        assert_eq!(s.trace_scalar, 9);
        assert_eq!((s.alpha_plus, s.alpha_minus), (6, 3));

        // Zero trace cases.
        let m = build_matrix(&realized(&tau_form())).unwrap();
        let s = m.spectrum().unwrap();
        assert_eq!(s.trace_scalar, 0);
        assert_eq!((s.alpha_plus, s.alpha_minus), (1, 1));
        assert_eq!(s.char_poly, vec![-2, 0, 1]);
        assert_eq!(s.min_poly, vec![-2, 0, 1]);

        let m = build_matrix(&envelope_function()).unwrap();
        let s = m.spectrum().unwrap();
        assert_eq!(s.trace_scalar, 0);
        assert_eq!((s.alpha_plus, s.alpha_minus), (4, 4));
        assert_eq!(s.char_poly, vec![4096, 0, -2048, 0, 384, 0, -32, 0, 1]);
        assert_eq!(s.min_poly, vec![-8, 0, 1]);

        // Trace equals the dimension exactly when every degree is even.
        for f in [
            realized(&tau_form()),
            realized(&eta_form(2, 1).unwrap()),
            realized(&epsilon_form(2).unwrap()),
            envelope_function(),
        ] {
            let m = build_matrix(&f).unwrap();
            let s = m.spectrum().unwrap();
            let all_even = f.group().elements().all(|g| f.parity(g) == 0);
            assert_eq!(s.trace_scalar == s.n as i64, all_even);
            assert!(s.trace_scalar == 0 || s.trace_scalar == s.n as i64);
        }

        // One-element group edge case.
        let m = build_matrix(&CommutationFunction::even(Cocycle::trivial(zn(1)))).unwrap();
        let s = m.spectrum().unwrap();
        assert_eq!((s.trace_scalar, s.alpha_plus, s.alpha_minus), (1, 1, 0));
        assert_eq!(s.char_poly, vec![-1, 1]);
        assert_eq!(s.min_poly, vec![-1, 1]);
    }

    #[test]
    fn exact_determinants() {
        let m = build_matrix(&realized(&eta_form(2, 1).unwrap())).unwrap();
        assert_eq!(m.exact_determinant().unwrap().as_int(), Some(-16));

        let m = build_matrix(&realized(&eta_form(3, 1).unwrap())).unwrap();
        assert_eq!(m.exact_determinant().unwrap().as_int(), Some(-19683));

        // Every abelian nondegenerate matrix has |det| = n^{n/2},
        // with the sign matching the multiplicity of −√n.
        let cases = vec![
            realized(&tau_form()),
            realized(&eta_form(2, 1).unwrap()),
            realized(&eta_form(3, 1).unwrap()),
            realized(&epsilon_form(1).unwrap()),
            realized(&eta_form(2, 2).unwrap()),
            realized(&eta_form(2, 1).unwrap().tensor(&eta_form(2, 1).unwrap())),
        ];
        for f in cases {
            let m = build_matrix(&f).unwrap();
            let s = m.spectrum().unwrap();
            let det = m.exact_determinant().unwrap();
            let magnitude = if s.n % 2 == 0 {
                (s.n as i128).pow(s.n as u32 / 2)
            } else {
                // An odd nondegenerate dimension is a perfect square.
                (isqrt(s.n as u32) as i128).pow(s.n as u32)
            };
            let sign = if s.alpha_minus % 2 == 1 { -1 } else { 1 };
            assert_eq!(det.as_int(), Some(sign * magnitude));
        }
    }

    #[test]
    fn embedded_determinants() {
        // Klein pairing through the two-dimensional staircase
        // representation: an 8×8 integer matrix of determinant ±2^8.
        let m = build_matrix(&realized(&eta_form(2, 1).unwrap())).unwrap();
        let rep = Representation::staircase(m.algebra()).unwrap();
        assert_eq!(rep.dim(), 2);
        let det = m.embedded_determinant(&rep).unwrap();
        assert_eq!(det.as_int().map(i128::abs), Some(256));

        // Through the regular representation the determinant is the
        // square of the irreducible one (the algebra is two copies of
        // its 2×2 block).
        let reg = Representation::regular(m.algebra()).unwrap();
        assert_eq!(reg.dim(), 4);
        let det_reg = m.embedded_determinant(&reg).unwrap();
        assert_eq!(
            det_reg.as_int(),
            det.as_int().map(|d| d * d),
        );

        // The staircase representation refuses groups that are not of
        // shape Z_n × Z_n.
        let alg = TwistedAlgebra::new(Cocycle::trivial(zn(4)));
        assert!(Representation::staircase(&alg).is_err());

        // Representations are tied to their algebra instance.
        let other = build_matrix(&realized(&eta_form(2, 1).unwrap())).unwrap();
        assert!(other.embedded_determinant(&rep).is_err());
    }

    #[test]
    fn conjugacy_by_size_and_trace() {
        let z4 = RootOfUnity::new(4, 1);
        let g = crate::groups::FiniteGroup::from_invariant_factors(&[4, 4]).unwrap();
        let theta1 = Bicharacter::from_gen_table(
            g.clone(),
            &[
                vec![RootOfUnity::one(4), z4],
                vec![z4.inv(), RootOfUnity::one(4)],
            ],
        )
        .unwrap();
        let theta2 = Bicharacter::from_gen_table(
            g,
            &[
                vec![RootOfUnity::one(4), z4.pow(3)],
                vec![z4.pow(-3), RootOfUnity::one(4)],
            ],
        )
        .unwrap();
        let m1 = build_matrix(&realized(&theta1)).unwrap();
        let m2 = build_matrix(&realized(&theta2)).unwrap();
        assert!(m1.conjugate_to(&m2).unwrap());

        // Same size but different trace: not conjugate.
        let meps = build_matrix(&realized(&epsilon_form(1).unwrap())).unwrap();
        let meta = build_matrix(&realized(&eta_form(2, 1).unwrap())).unwrap();
        assert!(!meps.conjugate_to(&meta).unwrap());

        // Different sizes: not conjugate.
        let mtau = build_matrix(&realized(&tau_form())).unwrap();
        assert!(!mtau.conjugate_to(&meta).unwrap());

        // Conjugacy is only defined for verified matrices.
        let degenerate = build_matrix(&CommutationFunction::even(Cocycle::trivial(zn(2)))).unwrap();
        assert!(degenerate.conjugate_to(&meta).is_err());
    }

    #[test]
    fn matrix_composition_counterparts() {
        // Tensor products of abelian gradings give Kronecker products
        // of matrices.
        let a = eta_form(2, 1).unwrap();
        let bb = eta_form(3, 1).unwrap();
        let fa = realized(&a);
        let fb = realized(&bb);
        let ma = build_matrix(&fa).unwrap();
        let mb = build_matrix(&fb).unwrap();
        let mt = build_matrix(&fa.tensor(&fb).unwrap()).unwrap();
        let bo = fb.group().order();
        for p in mt.group().elements() {
            for q in mt.group().elements() {
                let (p1, p2) = crate::groups::FiniteGroup::unpair_index(bo, p);
                let (q1, q2) = crate::groups::FiniteGroup::unpair_index(bo, q);
                let (st, ct) = mt.entry(p, q);
                assert_eq!(*ct, mt.group().identity());
                let sa = ma.entry(p1, q1).0;
                let sb = mb.entry(p2, q2).0;
                let (lhs, rhs) = RootOfUnity::unify(st, &sa.mul_rescaled(&sb));
                assert_eq!(lhs, rhs);
            }
        }

        // The trace multiplies across tensor factors, including a
        // nonabelian one.
        let fe = envelope_function();
        let me = build_matrix(&fe).unwrap();
        let mixed = build_matrix(&fe.tensor(&fa).unwrap()).unwrap();
        assert!(mixed.verify_square().unwrap());
        let te = me.spectrum().unwrap().trace_scalar;
        let ta = ma.spectrum().unwrap().trace_scalar;
        assert_eq!(mixed.spectrum().unwrap().trace_scalar, te * ta);

        // Matched-degree products give Schur (entrywise) products.
        let g2 = realized(&eta_form(2, 1).unwrap());
        let ge = realized(&epsilon_form(1).unwrap());
        let mh = build_matrix(&g2.hat(&ge).unwrap()).unwrap();
        let m2 = build_matrix(&g2).unwrap();
        let m3 = build_matrix(&ge).unwrap();
        for x in mh.group().elements() {
            for y in mh.group().elements() {
                let (sh, ch) = mh.entry(x, y);
                assert_eq!(*ch, mh.group().identity());
                let prod = m2.entry(x, y).0.mul_rescaled(&m3.entry(x, y).0);
                let (lhs, rhs) = RootOfUnity::unify(sh, &prod);
                assert_eq!(lhs, rhs);
            }
        }

        // Restriction to a subgroup is the corresponding submatrix.
        let big = fa.tensor(&fa).unwrap();
        let mbig = build_matrix(&big).unwrap();
        let first: Vec<GroupElement> = big
            .group()
            .elements()
            .filter(|&p| crate::groups::FiniteGroup::unpair_index(4, p).1 == GroupElement(0))
            .collect();
        let (sub, map) = big.restrict(&first).unwrap();
        let msub = build_matrix(&sub).unwrap();
        for x in msub.group().elements() {
            for y in msub.group().elements() {
                let (ss, cs) = msub.entry(x, y);
                assert_eq!(*cs, msub.group().identity());
                let (sb, _) = mbig.entry(map[x.0], map[y.0]);
                let (lhs, rhs) = RootOfUnity::unify(ss, sb);
                assert_eq!(lhs, rhs);
            }
        }

        // The same holds over a nonabelian group, commutators
        // included.
        let fe = envelope_function();
        let mfull = build_matrix(&fe).unwrap();
        let k: Vec<GroupElement> = [0usize, 2, 4, 6].iter().map(|&i| GroupElement(i)).collect();
        let (fk, kmap) = fe.restrict(&k).unwrap();
        let mk = build_matrix(&fk).unwrap();
        for x in mk.group().elements() {
            for y in mk.group().elements() {
                let (ss, cs) = mk.entry(x, y);
                let (sb, cb) = mfull.entry(kmap[x.0], kmap[y.0]);
                assert_eq!(kmap[cs.0], *cb);
                let (lhs, rhs) = RootOfUnity::unify(ss, sb);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn degenerate_kernels() {
        // Trivial pairing on C2: the classic (1, −1) kernel direction.
        let f = CommutationFunction::even(Cocycle::trivial(zn(2)));
        let m = build_matrix(&f).unwrap();
        let v = m.degenerate_kernel().unwrap();
        assert!(!v[0].is_zero() && !v[1].is_zero());
        let diff = v[0].add(&v[1]).unwrap();
        assert!(diff.is_zero());

        // Trivial pairing on Z3.
        let f = CommutationFunction::even(Cocycle::trivial(zn(3)));
        let m = build_matrix(&f).unwrap();
        let v = m.degenerate_kernel().unwrap();
        assert!(v.iter().any(|x| !x.is_zero()));

        // A pairing that is nondegenerate on one factor and blind on
        // the other.
        let blind = eta_form(2, 1)
            .unwrap()
            .tensor(&Bicharacter::from_fn(zn(2), |_, _| RootOfUnity::one(1)).unwrap());
        let m = build_matrix(&realized(&blind)).unwrap();
        assert!(!m.verify_square().unwrap());
        let v = m.degenerate_kernel().unwrap();
        assert!(v.iter().any(|x| !x.is_zero()));

        // Nonabelian degenerate case: the dihedral twist with all
        // degrees even; the kernel uses the central class sum of x.
        let f = CommutationFunction::even(dihedral_quaternion_cocycle());
        let m = build_matrix(&f).unwrap();
        let v = m.degenerate_kernel().unwrap();
        let e_entry = &v[0];
        assert_eq!(e_entry.support(), vec![GroupElement(1), GroupElement(3)]);

        // Nondegenerate matrices have no kernel.
        let m = build_matrix(&realized(&eta_form(2, 1).unwrap())).unwrap();
        assert!(matches!(m.degenerate_kernel(), Err(Error::NoKernel)));
    }
}
