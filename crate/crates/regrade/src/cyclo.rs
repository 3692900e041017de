//! Exact arithmetic in cyclotomic integer rings.
//!
//! Scalars come in two flavours. [`RootOfUnity`] is a single power of a
//! primitive N-th root of unity, stored as `(order, exponent)` with all
//! arithmetic done on exponents mod N. [`CycNumber`] is a Z-linear
//! combination of such powers, stored as an integer coefficient vector of
//! length N representing a residue in `Z[x]/(x^N - 1)`.
//!
//! The representation `Z[x]/(x^N - 1)` is redundant: the value of a
//! vector under `x -> zeta_N` is zero exactly when the N-th cyclotomic
//! polynomial divides it. All zero tests and equality tests reduce to one
//! exact polynomial remainder against `Phi_N`, which is computed once per
//! order and cached.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

/// gcd on u64, used for order arithmetic.
pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// lcm on u32 orders; orders stay tiny so no overflow handling is needed.
pub(crate) fn lcm(a: u32, b: u32) -> u32 {
    (a as u64 / gcd(a as u64, b as u64) * b as u64) as u32
}

/// A root of unity `zeta_N^k`, with `zeta_N = exp(2*pi*i/N)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RootOfUnity {
    pub order: u32,
    pub exp: u32,
}

impl RootOfUnity {
    pub fn new(order: u32, exp: i64) -> Self {
        assert!(order >= 1, "root of unity needs a positive order");
        let m = order as i64;
        RootOfUnity {
            order,
            exp: (exp.rem_euclid(m)) as u32,
        }
    }

    pub fn one(order: u32) -> Self {
        RootOfUnity::new(order, 0)
    }

    /// `-1` as an element of mu_N; only exists for even N (or N = 1? no:
    /// -1 has multiplicative order 2, so 2 | N is required).
    pub fn minus_one(order: u32) -> Result<Self> {
        if order % 2 != 0 {
            return Err(Error::Validation(format!(
                "-1 is not a root of unity of odd order {order}"
            )));
        }
        Ok(RootOfUnity::new(order, (order / 2) as i64))
    }

    /// A sign (+1/-1) embedded into mu_N.
    pub fn from_sign(order: u32, sign: i8) -> Result<Self> {
        match sign {
            1 => Ok(RootOfUnity::one(order)),
            -1 => RootOfUnity::minus_one(order),
            _ => Err(Error::Validation(format!("not a sign: {sign}"))),
        }
    }

    pub fn is_one(&self) -> bool {
        self.exp == 0
    }

    /// Multiplicative order of this particular root (not the ambient N).
    pub fn multiplicative_order(&self) -> u32 {
        (self.order as u64 / gcd(self.order as u64, self.exp as u64)) as u32
    }

    /// If the value is real (+1 or -1), return it as a machine sign.
    pub fn as_sign(&self) -> Option<i8> {
        if self.exp == 0 {
            Some(1)
        } else if self.order % 2 == 0 && self.exp == self.order / 2 {
            Some(-1)
        } else {
            None
        }
    }

    /// Strict product: both factors must already share an order.
    pub fn mul(&self, other: &RootOfUnity) -> Result<RootOfUnity> {
        if self.order != other.order {
            return Err(Error::OrderMismatch(self.order, other.order));
        }
        Ok(RootOfUnity::new(
            self.order,
            self.exp as i64 + other.exp as i64,
        ))
    }

    pub fn inv(&self) -> RootOfUnity {
        RootOfUnity::new(self.order, -(self.exp as i64))
    }

    pub fn pow(&self, k: i64) -> RootOfUnity {
        let e = (self.exp as i64).checked_mul(k.rem_euclid(self.order as i64));
        RootOfUnity::new(self.order, e.expect("exponent overflow"))
    }

    /// Re-embed into mu_M; M must be a multiple of the current order.
    pub fn change_order(&self, new_order: u32) -> Result<RootOfUnity> {
        if new_order % self.order != 0 {
            return Err(Error::BadOrderChange(self.order, new_order));
        }
        let f = (new_order / self.order) as i64;
        Ok(RootOfUnity::new(new_order, self.exp as i64 * f))
    }

    /// Rescale two roots to their common (lcm) order.
    pub fn unify(a: &RootOfUnity, b: &RootOfUnity) -> (RootOfUnity, RootOfUnity) {
        let m = lcm(a.order, b.order);
        (a.change_order(m).unwrap(), b.change_order(m).unwrap())
    }

    /// Product after rescaling both factors to the lcm order.
    pub fn mul_rescaled(&self, other: &RootOfUnity) -> RootOfUnity {
        let (a, b) = RootOfUnity::unify(self, other);
        a.mul(&b).unwrap()
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_sign() {
            Some(1) => write!(f, "1"),
            Some(-1) => write!(f, "-1"),
            _ => write!(f, "z{}^{}", self.order, self.exp),
        }
    }
}

/// Cyclotomic polynomial Phi_n as a dense integer coefficient vector
/// (constant term first). Computed by dividing `x^n - 1` by the product
/// of all lower-order cyclotomic polynomials, and cached per order.
pub fn cyclotomic_polynomial(n: u32) -> Vec<i128> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Vec<i128>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    let phi = if n == 1 {
        vec![-1, 1]
    } else {
        // x^n - 1
        let mut num = vec![0i128; n as usize + 1];
        num[0] = -1;
        num[n as usize] = 1;
        let mut den = vec![1i128];
        for d in 1..n {
            if n % d == 0 {
                den = poly_mul(&den, &cyclotomic_polynomial(d));
            }
        }
        let (q, r) = poly_divmod(&num, &den);
        assert!(poly_is_zero(&r), "cyclotomic division left a remainder");
        q
    };
    cache.lock().unwrap().insert(n, phi.clone());
    phi
}

pub(crate) fn poly_is_zero(p: &[i128]) -> bool {
    p.iter().all(|&c| c == 0)
}

pub(crate) fn poly_degree(p: &[i128]) -> Option<usize> {
    p.iter().rposition(|&c| c != 0)
}

pub(crate) fn poly_mul(a: &[i128], b: &[i128]) -> Vec<i128> {
    if poly_is_zero(a) || poly_is_zero(b) {
        return vec![0];
    }
    let mut out = vec![0i128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Long division of integer polynomials. Each leading-coefficient
/// division must be exact; this holds for every division performed in
/// this crate (division by monic polynomials, and pivot divisions inside
/// the fraction-free elimination, which are exact by Sylvester's
/// identity).
pub(crate) fn poly_divmod(num: &[i128], den: &[i128]) -> (Vec<i128>, Vec<i128>) {
    let dd = poly_degree(den).expect("division by zero polynomial");
    let lead = den[dd];
    let mut rem: Vec<i128> = num.to_vec();
    let nd = match poly_degree(&rem) {
        None => return (vec![0], vec![0]),
        Some(d) => d,
    };
    if nd < dd {
        return (vec![0], rem);
    }
    let mut quot = vec![0i128; nd - dd + 1];
    for k in (0..=nd - dd).rev() {
        let c = rem[k + dd];
        if c == 0 {
            continue;
        }
        assert!(c % lead == 0, "inexact polynomial division");
        let q = c / lead;
        quot[k] = q;
        for (i, &dc) in den[..=dd].iter().enumerate() {
            rem[k + i] -= q * dc;
        }
    }
    (quot, rem)
}

/// An element of `Z[zeta_N]`, stored as a length-N integer vector giving
/// a representative polynomial in `Z[x]/(x^N - 1)`.
#[derive(Clone, Debug)]
pub struct CycNumber {
    pub order: u32,
    pub coeffs: Vec<i128>,
}

impl CycNumber {
    pub fn zero(order: u32) -> Self {
        assert!(order >= 1);
        CycNumber {
            order,
            coeffs: vec![0; order as usize],
        }
    }

    pub fn from_int(order: u32, n: i128) -> Self {
        let mut c = CycNumber::zero(order);
        c.coeffs[0] = n;
        c
    }

    pub fn one(order: u32) -> Self {
        CycNumber::from_int(order, 1)
    }

    pub fn from_root(r: &RootOfUnity) -> Self {
        let mut c = CycNumber::zero(r.order);
        c.coeffs[r.exp as usize] = 1;
        c
    }

    pub fn is_zero(&self) -> bool {
        if poly_is_zero(&self.coeffs) {
            return true;
        }
        let phi = cyclotomic_polynomial(self.order);
        let (_, r) = poly_divmod(&self.coeffs, &phi);
        poly_is_zero(&r)
    }

    pub fn add(&self, other: &CycNumber) -> CycNumber {
        assert_eq!(self.order, other.order, "order mismatch in cyc add");
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        CycNumber {
            order: self.order,
            coeffs,
        }
    }

    pub fn sub(&self, other: &CycNumber) -> CycNumber {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> CycNumber {
        CycNumber {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, k: i128) -> CycNumber {
        CycNumber {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    /// Product in `Z[x]/(x^N - 1)`: cyclic convolution of coefficients.
    pub fn mul(&self, other: &CycNumber) -> CycNumber {
        assert_eq!(self.order, other.order, "order mismatch in cyc mul");
        let n = self.order as usize;
        let mut out = vec![0i128; n];
        for (i, &x) in self.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in other.coeffs.iter().enumerate() {
                if y != 0 {
                    out[(i + j) % n] += x * y;
                }
            }
        }
        CycNumber {
            order: self.order,
            coeffs: out,
        }
    }

    /// Multiply by a root of unity of the same order (coefficient rotation).
    pub fn mul_root(&self, r: &RootOfUnity) -> CycNumber {
        assert_eq!(self.order, r.order, "order mismatch in cyc rotation");
        let n = self.order as usize;
        let mut out = vec![0i128; n];
        for (i, &x) in self.coeffs.iter().enumerate() {
            out[(i + r.exp as usize) % n] = x;
        }
        CycNumber {
            order: self.order,
            coeffs: out,
        }
    }

    pub fn eq(&self, other: &CycNumber) -> bool {
        self.sub(other).is_zero()
    }

    /// Re-embed into `Z[zeta_M]`; M must be a multiple of the current order.
    pub fn change_order(&self, new_order: u32) -> Result<CycNumber> {
        if new_order % self.order != 0 {
            return Err(Error::BadOrderChange(self.order, new_order));
        }
        let f = (new_order / self.order) as usize;
        let mut out = CycNumber::zero(new_order);
        for (i, &c) in self.coeffs.iter().enumerate() {
            out.coeffs[i * f] += c;
        }
        Ok(out)
    }

    /// Canonical residue modulo Phi_N, degree below phi(N).
    pub fn reduced(&self) -> Vec<i128> {
        let phi = cyclotomic_polynomial(self.order);
        let (_, mut r) = poly_divmod(&self.coeffs, &phi);
        r.truncate(phi.len() - 1);
        while r.len() < phi.len() - 1 {
            r.push(0);
        }
        r
    }

    /// If the value is a rational integer, return it.
    pub fn as_int(&self) -> Option<i128> {
        let r = self.reduced();
        if r.iter().skip(1).all(|&c| c == 0) {
            Some(r[0])
        } else {
            None
        }
    }
}

impl fmt::Display for CycNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = self.as_int() {
            return write!(f, "{n}");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " {} ", if c < 0 { "-" } else { "+" })?;
            } else if c < 0 {
                write!(f, "-")?;
            }
            first = false;
            let a = c.abs();
            if i == 0 {
                write!(f, "{a}")?;
            } else if a == 1 {
                write!(f, "z{}^{}", self.order, i)?;
            } else {
                write!(f, "{a}*z{}^{}", self.order, i)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Exact determinant of a square matrix over `Z[zeta_N]`.
///
/// The entries are lifted to `Z[x]` and eliminated with fraction-free
/// (Bareiss) pivoting; every division is an exact division of integer
/// polynomials, so no rounding and no fractions ever appear. The result
/// is reduced back into `Z[zeta_N]` at the end.
///
/// Intermediate entries are minors of the lifted matrix; for matrices
/// up to 18x18 whose entries are single roots of unity their
/// coefficients fit comfortably in `i128` (a k-minor coefficient is at
/// most k!), which is why larger inputs are rejected.
pub fn cyc_det(matrix: &[Vec<CycNumber>]) -> Result<CycNumber> {
    let n = matrix.len();
    if n == 0 {
        return Ok(CycNumber::one(1));
    }
    let order = matrix[0][0].order;
    if n > 18 {
        return Err(Error::MatrixTooLarge(n, order));
    }
    for row in matrix {
        if row.len() != n {
            return Err(Error::Validation("determinant of a non-square matrix".into()));
        }
        for e in row {
            if e.order != order {
                return Err(Error::OrderMismatch(order, e.order));
            }
        }
    }

    let mut m: Vec<Vec<Vec<i128>>> = matrix
        .iter()
        .map(|row| row.iter().map(|e| e.coeffs.clone()).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev: Vec<i128> = vec![1];

    for k in 0..n {
        if poly_is_zero(&m[k][k]) {
            match (k + 1..n).find(|&i| !poly_is_zero(&m[i][k])) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return Ok(CycNumber::zero(order)),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let a = poly_mul(&m[k][k], &m[i][j]);
                let b = poly_mul(&m[i][k], &m[k][j]);
                let mut num = vec![0i128; a.len().max(b.len())];
                for (t, &x) in a.iter().enumerate() {
                    num[t] += x;
                }
                for (t, &y) in b.iter().enumerate() {
                    num[t] -= y;
                }
                let (q, r) = poly_divmod(&num, &prev);
                assert!(poly_is_zero(&r), "fraction-free elimination divided inexactly");
                m[i][j] = q;
            }
        }
        prev = m[k][k].clone();
    }

    // Reduce the Z[x] determinant back into Z[x]/(x^N - 1).
    let mut out = CycNumber::zero(order);
    for (i, &c) in m[n - 1][n - 1].iter().enumerate() {
        out.coeffs[i % order as usize] += c * sign;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn approx(c: &CycNumber) -> (f64, f64) {
        let n = c.order as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, &a) in c.coeffs.iter().enumerate() {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n;
            re += a as f64 * t.cos();
            im += a as f64 * t.sin();
        }
        (re, im)
    }

    #[test]
    fn cyclotomic_polynomials_match_known_tables() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(cyclotomic_polynomial(3), vec![1, 1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(8), vec![1, 0, 0, 0, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn vanishing_sums_of_roots_are_detected() {
        // 1 + z3 + z3^2 = 0
        let s = CycNumber::one(3)
            .add(&CycNumber::from_root(&RootOfUnity::new(3, 1)))
            .add(&CycNumber::from_root(&RootOfUnity::new(3, 2)));
        assert!(s.is_zero());
        // 1 + z4^2 = 0
        let s = CycNumber::one(4).add(&CycNumber::from_root(&RootOfUnity::new(4, 2)));
        assert!(s.is_zero());
        // 1 + z4 is not zero
        let s = CycNumber::one(4).add(&CycNumber::from_root(&RootOfUnity::new(4, 1)));
        assert!(!s.is_zero());
        // full sum over mu_8 vanishes
        let mut s = CycNumber::zero(8);
        for k in 0..8 {
            s = s.add(&CycNumber::from_root(&RootOfUnity::new(8, k)));
        }
        assert!(s.is_zero());
    }

    #[test]
    fn root_product_requires_matching_orders() {
        let a = RootOfUnity::new(3, 1);
        let b = RootOfUnity::new(4, 1);
        assert!(a.mul(&b).is_err());
        let (ua, ub) = RootOfUnity::unify(&a, &b);
        assert_eq!(ua.order, 12);
        let p = ua.mul(&ub).unwrap();
        assert_eq!(p, RootOfUnity::new(12, 7));
        // float oracle: e^{2 pi i/3} * e^{2 pi i/4} = e^{2 pi i 7/12}
        let (re, im) = approx(&CycNumber::from_root(&p));
        let t = 2.0 * std::f64::consts::PI * 7.0 / 12.0;
        assert!((re - t.cos()).abs() < 1e-9 && (im - t.sin()).abs() < 1e-9);
    }

    #[test]
    fn sign_embedding() {
        assert_eq!(RootOfUnity::one(6).as_sign(), Some(1));
        assert_eq!(RootOfUnity::new(6, 3).as_sign(), Some(-1));
        assert_eq!(RootOfUnity::new(6, 2).as_sign(), None);
        assert!(RootOfUnity::minus_one(5).is_err());
        assert_eq!(RootOfUnity::new(2, 1).multiplicative_order(), 2);
        assert_eq!(RootOfUnity::new(12, 8).multiplicative_order(), 3);
    }

    #[test]
    fn change_order_embeds_and_rejects_non_multiples() {
        let z3 = RootOfUnity::new(3, 1);
        assert_eq!(z3.change_order(12).unwrap(), RootOfUnity::new(12, 4));
        assert!(z3.change_order(8).is_err());
        let c = CycNumber::from_root(&z3);
        let c12 = c.change_order(12).unwrap();
        assert!(c12.eq(&CycNumber::from_root(&RootOfUnity::new(12, 4))));
        assert!(c.change_order(7).is_err());
    }

    fn det_cofactor(m: &[Vec<CycNumber>]) -> CycNumber {
        let n = m.len();
        let order = m[0][0].order;
        if n == 1 {
            return m[0][0].clone();
        }
        let mut acc = CycNumber::zero(order);
        for j in 0..n {
            let minor: Vec<Vec<CycNumber>> = (1..n)
                .map(|i| {
                    (0..n)
                        .filter(|&c| c != j)
                        .map(|c| m[i][c].clone())
                        .collect()
                })
                .collect();
            let mut t = m[0][j].mul(&det_cofactor(&minor));
            if j % 2 == 1 {
                t = t.neg();
            }
            acc = acc.add(&t);
        }
        acc
    }

    #[test]
    fn determinant_agrees_with_cofactor_expansion() {
        // deterministic pseudo-random small matrices over Z[zeta_N]
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for &order in &[1u32, 2, 3, 4, 6] {
            for n in 1..=4usize {
                let m: Vec<Vec<CycNumber>> = (0..n)
                    .map(|_| {
                        (0..n)
                            .map(|_| {
                                let mut c = CycNumber::zero(order);
                                for k in 0..order as usize {
                                    c.coeffs[k] = (next() % 5) as i128 - 2;
                                }
                                c
                            })
                            .collect()
                    })
                    .collect();
                let fast = cyc_det(&m).unwrap();
                let slow = det_cofactor(&m);
                assert!(fast.eq(&slow), "determinant mismatch at n={n} order={order}");
            }
        }
    }

    #[test]
    fn known_small_determinants() {
        // [[1, 1], [1, -1]] has determinant -2
        let one = CycNumber::one(2);
        let m = vec![vec![one.clone(), one.clone()], vec![one.clone(), one.neg()]];
        assert_eq!(cyc_det(&m).unwrap().as_int(), Some(-2));
        // singular matrix over Z[zeta_3]
        let z = CycNumber::from_root(&RootOfUnity::new(3, 1));
        let m = vec![vec![z.clone(), z.clone()], vec![z.clone(), z.clone()]];
        assert!(cyc_det(&m).unwrap().is_zero());
    }

    proptest! {
        #[test]
        fn product_matches_float_oracle(
            order in prop::sample::select(vec![2u32, 3, 4, 6, 8, 12]),
            a in prop::collection::vec(-3i128..=3, 12),
            b in prop::collection::vec(-3i128..=3, 12),
        ) {
            let mk = |v: &[i128]| {
                let mut c = CycNumber::zero(order);
                for k in 0..order as usize {
                    c.coeffs[k] = v[k];
                }
                c
            };
            let x = mk(&a);
            let y = mk(&b);
            let p = x.mul(&y);
            let (xr, xi) = approx(&x);
            let (yr, yi) = approx(&y);
            let (pr, pi) = approx(&p);
            prop_assert!((pr - (xr * yr - xi * yi)).abs() < 1e-9);
            prop_assert!((pi - (xr * yi + xi * yr)).abs() < 1e-9);
        }

        #[test]
        fn zero_test_matches_float_oracle(
            order in prop::sample::select(vec![2u32, 3, 4, 6, 8, 12]),
            a in prop::collection::vec(-3i128..=3, 12),
        ) {
            let mut c = CycNumber::zero(order);
            for k in 0..order as usize {
                c.coeffs[k] = a[k];
            }
            let (re, im) = approx(&c);
            let float_zero = re.abs() < 1e-9 && im.abs() < 1e-9;
            prop_assert_eq!(c.is_zero(), float_zero);
        }
    }
}
