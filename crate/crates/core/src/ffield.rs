//! Arithmetic in GF(q) for prime powers q <= 256.
//!
//! Elements are encoded as integers in `[0, q)`: for `q = p^m` the value
//! `c_0 + c_1 p + ... + c_{m-1} p^{m-1}` stands for the polynomial
//! `c_0 + c_1 x + ... + c_{m-1} x^{m-1}` reduced modulo a fixed irreducible
//! polynomial. Multiplication goes through log/antilog tables.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduction polynomials (Conway polynomials), lowest coefficient first,
/// monic leading coefficient omitted.
const REDUCTION: &[(u32, u32, &[u32])] = &[
    (2, 2, &[1, 1]),
    (2, 3, &[1, 1, 0]),
    (2, 4, &[1, 1, 0, 0]),
    (2, 5, &[1, 0, 1, 0, 0]),
    (2, 6, &[1, 1, 0, 1, 1, 0]),
    (2, 7, &[1, 1, 0, 0, 0, 0, 0]),
    (2, 8, &[1, 0, 1, 1, 1, 0, 0, 0]),
    (3, 2, &[2, 2]),
    (3, 3, &[1, 2, 0]),
    (3, 4, &[2, 0, 0, 2]),
    (3, 5, &[1, 2, 0, 0, 0]),
    (5, 2, &[2, 4]),
    (5, 3, &[3, 3, 0]),
    (7, 2, &[3, 6]),
    (11, 2, &[2, 7]),
    (13, 2, &[2, 12]),
];

/// Splits `q` into `(p, m)` with `q = p^m`, or reports why it cannot.
pub fn prime_power(q: u64) -> Result<(u32, u32)> {
    if q < 2 {
        return Err(Error::NotPrimePower(q));
    }
    let mut p = 2;
    while p * p <= q && q % p != 0 {
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    let mut rest = q;
    let mut m = 0;
    while rest % p == 0 {
        rest /= p;
        m += 1;
    }
    if rest != 1 {
        return Err(Error::NotPrimePower(q));
    }
    Ok((p as u32, m))
}

pub fn is_prime(n: u64) -> bool {
    matches!(prime_power(n), Ok((_, 1)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElement(pub u32);

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Inv,
}

#[derive(Clone)]
pub struct Field {
    q: u32,
    p: u32,
    m: u32,
    reduction: Vec<u32>,
    add: Vec<u8>,
    neg: Vec<u8>,
    // exp has 2(q-1) entries so that log a + log b never needs a reduction
    exp: Vec<u8>,
    log: Vec<u16>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.q)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q
    }
}
impl Eq for Field {}

impl Field {
    pub fn new(q: u64) -> Result<Field> {
        let (p, m) = prime_power(q)?;
        if q > 256 {
            return Err(Error::TooLarge(q));
        }
        let q = q as u32;
        let reduction = if m == 1 {
            Vec::new()
        } else {
            REDUCTION
                .iter()
                .find(|(pp, mm, _)| *pp == p && *mm == m)
                .map(|(_, _, c)| c.to_vec())
                .expect("reduction polynomial table covers every q <= 256")
        };
        let mut field = Field {
            q,
            p,
            m,
            reduction,
            add: vec![0; (q * q) as usize],
            neg: vec![0; q as usize],
            exp: vec![0; 2 * (q as usize - 1)],
            log: vec![0; q as usize],
        };
        for a in 0..q {
            for b in 0..q {
                field.add[(a * q + b) as usize] = field.digit_add(a, b) as u8;
            }
            field.neg[a as usize] = (0..q).find(|&b| field.digit_add(a, b) == 0).unwrap() as u8;
        }
        let generator = (1..q)
            .find(|&g| field.slow_order(g) == q - 1)
            .expect("multiplicative group of a finite field is cyclic");
        let mut acc = 1u32;
        for k in 0..(q - 1) {
            field.exp[k as usize] = acc as u8;
            field.exp[(k + q - 1) as usize] = acc as u8;
            field.log[acc as usize] = k as u16;
            acc = field.poly_mul(acc, generator);
        }
        Ok(field)
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    /// Coefficients of the monic reduction polynomial, lowest first,
    /// including the leading 1. Empty for prime fields.
    pub fn reduction_polynomial(&self) -> Vec<u32> {
        if self.m == 1 {
            return Vec::new();
        }
        let mut c = self.reduction.clone();
        c.push(1);
        c
    }

    fn digit_add(&self, mut a: u32, mut b: u32) -> u32 {
        let (mut out, mut scale) = (0, 1);
        for _ in 0..self.m {
            out += ((a % self.p + b % self.p) % self.p) * scale;
            a /= self.p;
            b /= self.p;
            scale *= self.p;
        }
        out
    }

    fn digits(&self, mut a: u32) -> Vec<u32> {
        (0..self.m)
            .map(|_| {
                let d = a % self.p;
                a /= self.p;
                d
            })
            .collect()
    }

    fn undigits(&self, d: &[u32]) -> u32 {
        d.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    /// Schoolbook polynomial product reduced by the field's modulus; only used
    /// to build the tables.
    fn poly_mul(&self, a: u32, b: u32) -> u32 {
        if self.m == 1 {
            return a * b % self.p;
        }
        let (p, m) = (self.p, self.m as usize);
        let (da, db) = (self.digits(a), self.digits(b));
        let mut prod = vec![0u32; 2 * m - 1];
        for i in 0..m {
            for j in 0..m {
                prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
            }
        }
        for k in (m..prod.len()).rev() {
            let lead = prod[k];
            if lead == 0 {
                continue;
            }
            prod[k] = 0;
            // x^m = -(c_0 + ... + c_{m-1} x^{m-1})
            for (i, &c) in self.reduction.iter().enumerate() {
                let sub = lead * c % p;
                prod[k - m + i] = (prod[k - m + i] + p - sub) % p;
            }
        }
        self.undigits(&prod[..m])
    }

    fn slow_order(&self, g: u32) -> u32 {
        let mut acc = g;
        let mut k = 1;
        while acc != 1 {
            acc = self.poly_mul(acc, g);
            k += 1;
            if k > self.q {
                return 0;
            }
        }
        k
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.add[(a * self.q + b) as usize] as u32
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize] as u32
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize] as u32
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let l = self.log[a as usize] as usize;
        Ok(self.exp[(self.q as usize - 1 - l) % (self.q as usize - 1)] as u32)
    }

    pub fn div(&self, a: u32, b: u32) -> Result<u32> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn element(&self, value: u32) -> Result<FieldElement> {
        if value < self.q {
            Ok(FieldElement(value))
        } else {
            Err(Error::FieldMismatch)
        }
    }

    /// Checked arithmetic on field elements. Unary operations ignore `b`.
    pub fn arith(&self, a: FieldElement, b: FieldElement, op: Op) -> Result<FieldElement> {
        if a.0 >= self.q || b.0 >= self.q {
            return Err(Error::FieldMismatch);
        }
        let v = match op {
            Op::Add => self.add(a.0, b.0),
            Op::Sub => self.sub(a.0, b.0),
            Op::Mul => self.mul(a.0, b.0),
            Op::Div => self.div(a.0, b.0)?,
            Op::Neg => self.neg(a.0),
            Op::Inv => self.inv(a.0)?,
        };
        Ok(FieldElement(v))
    }
}

/// Dense row-major matrix over a field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u32>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Matrix {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        Matrix { rows: rows.len(), cols, data: rows.concat() }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// `self - I` for square matrices.
    pub fn minus_identity(&self, field: &Field) -> Matrix {
        let mut out = self.clone();
        for i in 0..self.rows.min(self.cols) {
            out.set(i, i, field.sub(self.get(i, i), 1));
        }
        out
    }

    /// Reduced row echelon form. Returns the nonzero rows and their pivot columns.
    pub fn rref(&self, field: &Field) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for k in 0..m.cols {
                    m.data.swap(pr * m.cols + k, r * m.cols + k);
                }
            }
            let inv = field.inv(m.get(r, c)).expect("pivot is nonzero");
            for k in 0..m.cols {
                m.set(r, k, field.mul(m.get(r, k), inv));
            }
            for i in 0..m.rows {
                let factor = m.get(i, c);
                if i == r || factor == 0 {
                    continue;
                }
                for k in 0..m.cols {
                    let v = field.sub(m.get(i, k), field.mul(factor, m.get(r, k)));
                    m.set(i, k, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        m.data.truncate(r * m.cols);
        m.rows = r;
        (m, pivots)
    }

    pub fn rank(&self, field: &Field) -> usize {
        self.rref(field).1.len()
    }

    /// Row vector times matrix.
    pub fn left_mul(&self, field: &Field, x: &[u32]) -> Vec<u32> {
        let mut out = vec![0; self.cols];
        for (r, &xr) in x.iter().enumerate() {
            if xr == 0 {
                continue;
            }
            for (c, o) in out.iter_mut().enumerate() {
                *o = field.add(*o, field.mul(xr, self.get(r, c)));
            }
        }
        out
    }
}

pub fn matrix_rank(field: &Field, m: &Matrix) -> usize {
    m.rank(field)
}

/// Rank of a binary matrix whose rows are packed into `u64` words (n <= 64).
pub fn gf2_rank(rows: &mut [u64]) -> usize {
    let mut rank = 0;
    for bit in 0..64 {
        let mask = 1u64 << bit;
        let Some(p) = (rank..rows.len()).find(|&i| rows[i] & mask != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank];
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && *row & mask != 0 {
                *row ^= pivot;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_errors() {
        assert_eq!(Field::new(6).unwrap_err(), Error::NotPrimePower(6));
        assert_eq!(Field::new(1).unwrap_err(), Error::NotPrimePower(1));
        assert_eq!(Field::new(512).unwrap_err(), Error::TooLarge(512));
        assert_eq!(Field::new(257).unwrap_err(), Error::TooLarge(257));
        assert_eq!(Field::new(2 * 2 * 3).unwrap_err(), Error::NotPrimePower(12));
    }

    #[test]
    fn gf2_is_xor() {
        let f = Field::new(2).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                assert_eq!(f.add(a, b), a ^ b);
            }
        }
        assert_eq!(f.arith(FieldElement(1), FieldElement(1), Op::Add).unwrap(), FieldElement(0));
    }

    #[test]
    fn gf4_uses_x2_x_1() {
        let f = Field::new(4).unwrap();
        assert_eq!(f.reduction_polynomial(), vec![1, 1, 1]);
        // x is encoded as 2, x + 1 as 3
        assert_eq!(f.mul(2, 2), 3);
        assert_eq!(f.mul(2, 3), 1);
    }

    #[test]
    fn small_prime_examples() {
        let f = Field::new(5).unwrap();
        assert_eq!(f.arith(FieldElement(3), FieldElement(4), Op::Mul).unwrap(), FieldElement(2));
        assert_eq!(f.arith(FieldElement(3), FieldElement(0), Op::Div), Err(Error::DivisionByZero));
        assert_eq!(f.arith(FieldElement(0), FieldElement(0), Op::Inv), Err(Error::DivisionByZero));
        assert_eq!(f.arith(FieldElement(7), FieldElement(0), Op::Add), Err(Error::FieldMismatch));
    }

    #[test]
    fn every_reduction_polynomial_is_irreducible() {
        // no zero divisors in the table-built multiplication of the polynomial ring quotient
        for &(p, m, _) in REDUCTION {
            let f = Field::new((p as u64).pow(m)).unwrap();
            for a in 1..f.q {
                for b in 1..f.q {
                    assert_ne!(f.poly_mul(a, b), 0, "GF({}^{}) has zero divisors", p, m);
                }
            }
        }
    }

    #[test]
    fn tables_match_polynomial_arithmetic() {
        for q in [4u64, 8, 9, 16, 25, 27, 32, 49, 64, 81, 121, 125, 128, 169, 243, 256] {
            let f = Field::new(q).unwrap();
            for a in 0..f.q {
                for b in 0..f.q {
                    assert_eq!(f.mul(a, b), f.poly_mul(a, b));
                }
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for q in 2..=16u64 {
            let Ok(f) = Field::new(q) else { continue };
            let q = f.q;
            for a in 0..q {
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                assert_eq!(f.add(a, f.neg(a)), 0);
                for b in 0..q {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in 0..q {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                        assert_eq!(f.add(a, f.add(b, c)), f.add(f.add(a, b), c));
                        assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
                    }
                }
            }
        }
    }

    #[test]
    fn rank_examples() {
        let f2 = Field::new(2).unwrap();
        assert_eq!(Matrix::identity(3).rank(&f2), 3);
        let f3 = Field::new(3).unwrap();
        assert_eq!(Matrix::zeros(2, 5).rank(&f3), 0);
        let m = Matrix::from_rows(&[vec![1, 1, 0, 0], vec![0, 1, 1, 0], vec![1, 0, 1, 0]]);
        assert_eq!(m.rank(&f2), 2);
        assert_eq!(m.transpose().rank(&f2), 2);
        let mut packed = [0b0011u64, 0b0110, 0b0101];
        assert_eq!(gf2_rank(&mut packed), 2);
    }
}
