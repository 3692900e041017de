//! Exact linear algebra over the cyclotomic field `Q(ζ_N)`.
//!
//! Field elements are coordinate vectors over the power basis
//! `1, ζ, …, ζ^{φ(N)-1}` with rational coefficients, reduced modulo the
//! N-th cyclotomic polynomial. This module provides the field
//! operations (including inverses via the extended Euclidean algorithm
//! in `Q[x]`) and dense rank / nullspace computations, used as an
//! independent cross-check for structure results derived by other
//! means.

use crate::cyclo::{cyclotomic_polynomial, CycNumber, RootOfUnity};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// A field element: coefficients over `1, ζ, …, ζ^{deg-1}`.
pub type QCyc = Vec<BigRational>;

fn rat(n: i128) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// The field `Q(ζ_N)` with its cached minimal polynomial.
pub struct CycField {
    order: u32,
    deg: usize,
    // Monic Φ_N as rational coefficients, constant term first.
    phi: Vec<BigRational>,
}

impl CycField {
    pub fn new(order: u32) -> CycField {
        let phi_int = cyclotomic_polynomial(order);
        let phi: Vec<BigRational> = phi_int.iter().map(|&c| rat(c)).collect();
        CycField {
            order,
            deg: phi.len() - 1,
            phi,
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Degree of the field over the rationals.
    pub fn degree(&self) -> usize {
        self.deg
    }

    pub fn zero(&self) -> QCyc {
        vec![BigRational::zero(); self.deg]
    }

    pub fn one(&self) -> QCyc {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i128) -> QCyc {
        let mut v = self.zero();
        v[0] = rat(n);
        self.reduce_in_place(&mut v);
        v
    }

    pub fn from_rational(&self, q: BigRational) -> QCyc {
        let mut v = self.zero();
        v[0] = q;
        self.reduce_in_place(&mut v);
        v
    }

    /// Embed a root of unity; its order must divide the field order.
    pub fn from_root(&self, r: &RootOfUnity) -> Result<QCyc> {
        let r = r.change_order(self.order)?;
        let mut v = vec![BigRational::zero(); (r.exp as usize) + 1];
        let last = v.len() - 1;
        v[last] = BigRational::one();
        self.reduce_in_place(&mut v);
        Ok(v)
    }

    /// Embed an element of `Z[ζ_M]` for `M` dividing the field order.
    pub fn from_cyc(&self, c: &CycNumber) -> Result<QCyc> {
        let c = c.change_order(self.order)?;
        let mut v: Vec<BigRational> = c.coeffs.iter().map(|&k| rat(k)).collect();
        self.reduce_in_place(&mut v);
        Ok(v)
    }

    /// Reduce a coefficient vector modulo Φ_N and resize to `deg`.
    fn reduce_in_place(&self, v: &mut Vec<BigRational>) {
        let d = self.deg;
        let mut i = v.len();
        while i > d {
            i -= 1;
            if v[i].is_zero() {
                continue;
            }
            let c = std::mem::replace(&mut v[i], BigRational::zero());
            // Subtract c·x^{i-d}·Φ; the leading terms cancel.
            for (j, pj) in self.phi.iter().enumerate().take(d) {
                let idx = i - d + j;
                let t = &c * pj;
                v[idx] -= t;
            }
        }
        v.resize(d, BigRational::zero());
    }

    pub fn is_zero(&self, a: &QCyc) -> bool {
        a.iter().all(|c| c.is_zero())
    }

    pub fn eq(&self, a: &QCyc, b: &QCyc) -> bool {
        a.iter().zip(b).all(|(x, y)| x == y)
    }

    pub fn add(&self, a: &QCyc, b: &QCyc) -> QCyc {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn sub(&self, a: &QCyc, b: &QCyc) -> QCyc {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    pub fn neg(&self, a: &QCyc) -> QCyc {
        a.iter().map(|x| -x).collect()
    }

    pub fn mul(&self, a: &QCyc, b: &QCyc) -> QCyc {
        let mut out = vec![BigRational::zero(); 2 * self.deg];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    let t = x * y;
                    out[i + j] += t;
                }
            }
        }
        self.reduce_in_place(&mut out);
        out
    }

    pub fn scale(&self, a: &QCyc, k: &BigRational) -> QCyc {
        a.iter().map(|x| x * k).collect()
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in
    /// `Q[x]` against Φ_N (irreducible, so every nonzero element is a
    /// unit).
    pub fn inv(&self, a: &QCyc) -> Result<QCyc> {
        if self.is_zero(a) {
            return Err(Error::Validation("division by zero in Q(zeta)".into()));
        }
        // Invariant: r0 = s0·a (mod Φ), r1 = s1·a (mod Φ).
        let mut r0: Vec<BigRational> = a.clone();
        trim(&mut r0);
        let mut r1 = self.phi.clone();
        let mut s0 = vec![BigRational::one()];
        let mut s1: Vec<BigRational> = vec![];
        while !r1.is_empty() {
            let q = poly_div(&mut r0, &r1);
            trim(&mut r0);
            let qs = poly_mul_q(&q, &s1);
            s0 = poly_sub(&s0, &qs);
            std::mem::swap(&mut r0, &mut r1);
            std::mem::swap(&mut s0, &mut s1);
        }
        // r0 is a nonzero constant gcd; s0·a ≡ r0 (mod Φ).
        debug_assert_eq!(r0.len(), 1);
        let c = r0[0].recip();
        let mut out: Vec<BigRational> = s0.iter().map(|x| x * &c).collect();
        self.reduce_in_place(&mut out);
        Ok(out)
    }

    pub fn div(&self, a: &QCyc, b: &QCyc) -> Result<QCyc> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// Rank of a dense matrix (rows of equal length).
    pub fn rank(&self, rows: &[Vec<QCyc>]) -> usize {
        let mut m: Vec<Vec<QCyc>> = rows.to_vec();
        self.echelonize(&mut m).len()
    }

    /// Basis of the right kernel `{x : M·x = 0}`.
    pub fn nullspace(&self, rows: &[Vec<QCyc>]) -> Vec<Vec<QCyc>> {
        let ncols = match rows.first() {
            Some(r) => r.len(),
            None => return vec![],
        };
        let mut m: Vec<Vec<QCyc>> = rows.to_vec();
        let pivots = self.echelonize(&mut m);
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..ncols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut x = vec![self.zero(); ncols];
            x[free] = self.one();
            // Back-substitute: each echelon row i with pivot column p
            // gives x[p] = -Σ_{j>p} m[i][j]·x[j]; rows are in reduced
            // form with unit pivots.
            for (i, &p) in pivots.iter().enumerate().rev() {
                let mut acc = self.zero();
                for j in (p + 1)..ncols {
                    if !self.is_zero(&m[i][j]) && !self.is_zero(&x[j]) {
                        acc = self.add(&acc, &self.mul(&m[i][j], &x[j]));
                    }
                }
                x[p] = self.neg(&acc);
            }
            basis.push(x);
        }
        basis
    }

    /// Row reduction to reduced echelon form in place; returns the
    /// pivot column of each surviving row.
    fn echelonize(&self, m: &mut Vec<Vec<QCyc>>) -> Vec<usize> {
        let nrows = m.len();
        let ncols = match m.first() {
            Some(r) => r.len(),
            None => return vec![],
        };
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..ncols {
            let mut pr = None;
            for r in row..nrows {
                if !self.is_zero(&m[r][col]) {
                    pr = Some(r);
                    break;
                }
            }
            let Some(pr) = pr else { continue };
            m.swap(row, pr);
            let inv = self.inv(&m[row][col]).expect("pivot is nonzero");
            for c in col..ncols {
                m[row][c] = self.mul(&m[row][c], &inv);
            }
            for r in 0..nrows {
                if r != row && !self.is_zero(&m[r][col]) {
                    let f = m[r][col].clone();
                    for c in col..ncols {
                        let t = self.mul(&f, &m[row][c]);
                        m[r][c] = self.sub(&m[r][c], &t);
                    }
                }
            }
            pivots.push(col);
            row += 1;
            if row == nrows {
                break;
            }
        }
        m.truncate(row);
        pivots
    }

    pub fn mat_vec(&self, rows: &[Vec<QCyc>], x: &[QCyc]) -> Vec<QCyc> {
        rows.iter()
            .map(|r| {
                let mut acc = self.zero();
                for (a, b) in r.iter().zip(x) {
                    if !self.is_zero(a) && !self.is_zero(b) {
                        acc = self.add(&acc, &self.mul(a, b));
                    }
                }
                acc
            })
            .collect()
    }
}

/// An incremental row space: push vectors, track the dimension of
/// their span. Used for ideal-closure fixed points.
pub struct SpanBuilder<'f> {
    field: &'f CycField,
    // Reduced rows with unit pivots, plus their pivot columns.
    rows: Vec<Vec<QCyc>>,
    pivots: Vec<usize>,
}

impl<'f> SpanBuilder<'f> {
    pub fn new(field: &'f CycField) -> SpanBuilder<'f> {
        SpanBuilder {
            field,
            rows: vec![],
            pivots: vec![],
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// The reduced rows spanning the inserted vectors.
    pub fn rows(&self) -> &[Vec<QCyc>] {
        &self.rows
    }

    /// Reduce `v` against the current span; if a nonzero residue
    /// remains, absorb it and return true.
    pub fn insert(&mut self, v: &[QCyc]) -> bool {
        let f = self.field;
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !f.is_zero(&v[p]) {
                let c = v[p].clone();
                for (x, y) in v.iter_mut().zip(row) {
                    let t = f.mul(&c, y);
                    *x = f.sub(x, &t);
                }
            }
        }
        let Some(p) = v.iter().position(|c| !f.is_zero(c)) else {
            return false;
        };
        let inv = f.inv(&v[p]).expect("pivot is nonzero");
        for x in v.iter_mut() {
            *x = f.mul(x, &inv);
        }
        self.rows.push(v);
        self.pivots.push(p);
        true
    }
}

fn trim(p: &mut Vec<BigRational>) {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
}

/// Divide `num` by `den` in place (num becomes the remainder); returns
/// the quotient. `den` must be trimmed and nonempty.
fn poly_div(num: &mut Vec<BigRational>, den: &[BigRational]) -> Vec<BigRational> {
    let dd = den.len() - 1;
    let lead = den[dd].recip();
    if num.len() < den.len() {
        return vec![];
    }
    let mut q = vec![BigRational::zero(); num.len() - dd];
    for i in (dd..num.len()).rev() {
        if num[i].is_zero() {
            continue;
        }
        let c = &num[i] * &lead;
        for (j, d) in den.iter().enumerate() {
            let t = &c * d;
            num[i - dd + j] -= t;
        }
        q[i - dd] = c;
    }
    q
}

fn poly_mul_q(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            let t = x * y;
            out[i + j] += t;
        }
    }
    out
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    let mut out = out;
    trim(&mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn root(f: &CycField, order: u32, exp: i64) -> QCyc {
        f.from_root(&RootOfUnity::new(order, exp)).unwrap()
    }

    #[test]
    fn field_arithmetic_and_inverses() {
        let f = CycField::new(3);
        assert_eq!(f.degree(), 2);
        // 1 + ζ + ζ² = 0.
        let s = f.add(&f.add(&f.one(), &root(&f, 3, 1)), &root(&f, 3, 2));
        assert!(f.is_zero(&s));
        // (1 + ζ) is a unit.
        let a = f.add(&f.one(), &root(&f, 3, 1));
        let ainv = f.inv(&a).unwrap();
        assert!(f.eq(&f.mul(&a, &ainv), &f.one()));

        let f4 = CycField::new(4);
        // (1+i)(1-i) = 2, and 2^{-1} = 1/2.
        let p = f4.mul(
            &f4.add(&f4.one(), &root(&f4, 4, 1)),
            &f4.sub(&f4.one(), &root(&f4, 4, 1)),
        );
        assert!(f4.eq(&p, &f4.from_int(2)));
        let half = f4.inv(&f4.from_int(2)).unwrap();
        assert!(f4.eq(&f4.mul(&half, &f4.from_int(2)), &f4.one()));
        assert!(f4.inv(&f4.zero()).is_err());

        // Every power of ζ_5 inverts correctly.
        let f5 = CycField::new(5);
        for e in 0..5 {
            let z = root(&f5, 5, e);
            let zi = f5.inv(&z).unwrap();
            assert!(f5.eq(&f5.mul(&z, &zi), &f5.one()));
        }
    }

    #[test]
    fn embedding_from_cyclotomic_integers() {
        let f = CycField::new(3);
        let mut c = CycNumber::zero(3);
        c.coeffs = vec![1, 1, 1];
        assert!(f.is_zero(&f.from_cyc(&c).unwrap()));
        // An order-2 value embeds into Q(ζ_6).
        let f6 = CycField::new(6);
        let m = f6.from_root(&RootOfUnity::minus_one(2).unwrap()).unwrap();
        assert!(f6.eq(&m, &f6.from_int(-1)));
    }

    #[test]
    fn rank_and_nullspace() {
        let f = CycField::new(4);
        let i = root(&f, 4, 1);
        // Second row is -i times the first: rank 1, nullity 1.
        let rows = vec![
            vec![f.one(), i.clone()],
            vec![f.neg(&i), f.one()],
        ];
        assert_eq!(f.rank(&rows), 1);
        let ns = f.nullspace(&rows);
        assert_eq!(ns.len(), 1);
        for v in &ns {
            let mv = f.mat_vec(&rows, v);
            assert!(mv.iter().all(|x| f.is_zero(x)));
            assert!(v.iter().any(|x| !f.is_zero(x)));
        }

        // Vandermonde on distinct fifth roots has full rank.
        let f5 = CycField::new(5);
        let rows: Vec<Vec<QCyc>> = (0..3)
            .map(|r| (0..3).map(|c| root(&f5, 5, (r * c) as i64)).collect())
            .collect();
        assert_eq!(f5.rank(&rows), 3);
        assert!(f5.nullspace(&rows).is_empty());

        // Rank-nullity on a wide matrix.
        let rows = vec![
            vec![f.one(), f.zero(), i.clone(), f.from_int(2)],
            vec![f.zero(), f.one(), f.one(), f.neg(&i)],
        ];
        let ns = f.nullspace(&rows);
        assert_eq!(f.rank(&rows) + ns.len(), 4);
        for v in &ns {
            assert!(f.mat_vec(&rows, v).iter().all(|x| f.is_zero(x)));
        }
    }

    #[test]
    fn span_builder_tracks_dimension() {
        let f = CycField::new(4);
        let i = root(&f, 4, 1);
        let mut sp = SpanBuilder::new(&f);
        assert!(sp.insert(&[f.one(), i.clone()]));
        // A scalar multiple adds nothing.
        assert!(!sp.insert(&[i.clone(), f.neg(&f.one())]));
        assert!(sp.insert(&[f.one(), f.zero()]));
        assert_eq!(sp.dim(), 2);
        assert!(!sp.insert(&[f.zero(), f.one()]));
    }
}
