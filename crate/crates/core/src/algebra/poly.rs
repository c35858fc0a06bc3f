use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::field::is_negative;
use super::{AlgebraError, Field, Matrix, Scalar};

/// Univariate polynomial, coefficients stored lowest degree first with no
/// trailing zeros. The zero polynomial has an empty coefficient list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    field: Field,
    coeffs: Vec<Scalar>,
}

/// Roots of a polynomial that lie in its field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSet {
    /// Distinct roots in ascending order with multiplicities.
    pub roots: Vec<(Scalar, usize)>,
    /// The polynomial splits into linear factors over the field.
    pub split: bool,
    /// Monic part left after dividing out every root; constant iff `split`.
    pub cofactor: Poly,
}

impl Poly {
    pub fn new(field: Field, mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        Poly { field, coeffs }
    }

    pub fn from_ints(field: Field, coeffs: &[i64]) -> Self {
        Poly::new(field, coeffs.iter().map(|&c| field.int(c)).collect())
    }

    pub fn zero(field: Field) -> Self {
        Poly { field, coeffs: Vec::new() }
    }

    pub fn constant(c: Scalar) -> Self {
        Poly::new(c.field(), vec![c])
    }

    /// `x - r`
    pub fn linear(r: &Scalar) -> Self {
        let f = r.field();
        Poly::new(f, vec![-r, f.one()])
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some(lc) => self.scale(&lc.inv().expect("nonzero leading coefficient")),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        Poly::new(self.field, self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = self.field.zero();
        let out = (0..n)
            .map(|i| self.coeffs.get(i).unwrap_or(&z) + other.coeffs.get(i).unwrap_or(&z))
            .collect();
        Poly::new(self.field, out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&-&self.field.one()))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.field);
        }
        let mut out = vec![self.field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Poly::new(self.field, out)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lc_inv = divisor.leading().unwrap().inv().unwrap();
        let mut rem = self.coeffs.clone();
        let Some(sd) = self.degree() else {
            return (Poly::zero(self.field), Poly::zero(self.field));
        };
        if sd < dd {
            return (Poly::zero(self.field), self.clone());
        }
        let mut quot = vec![self.field.zero(); sd - dd + 1];
        for k in (0..=sd - dd).rev() {
            let c = &rem[k + dd] * &lc_inv;
            if c.is_zero() {
                continue;
            }
            for (j, b) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = &rem[k + j] - &(&c * b);
            }
            quot[k] = c;
        }
        (Poly::new(self.field, quot), Poly::new(self.field, rem))
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Poly {
        let out = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * &self.field.int(i as i64))
            .collect();
        Poly::new(self.field, out)
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        self.coeffs.iter().rev().fold(self.field.zero(), |acc, c| &(&acc * x) + c)
    }

    /// Horner evaluation at a square matrix.
    pub fn eval_matrix(&self, m: &Matrix) -> Matrix {
        let n = m.rows();
        let mut acc = Matrix::zeros(self.field, n, n);
        for c in self.coeffs.iter().rev() {
            acc = &acc.mul(m) + &Matrix::identity(self.field, n).scale(c);
        }
        acc
    }

    /// Squarefree test via `gcd(p, p')`. Over `GF(p)` the degree must lie
    /// below the characteristic.
    pub fn is_squarefree(&self) -> Result<bool, AlgebraError> {
        let degree = self.degree().ok_or(AlgebraError::ZeroPolynomial)?;
        let ch = self.field.characteristic();
        if ch != 0 && degree as u64 >= ch {
            return Err(AlgebraError::DegreeVsCharacteristic { degree, characteristic: ch });
        }
        Ok(self.squarefree_perfect())
    }

    /// Squarefree test valid over any perfect field: over `GF(p)` a vanishing
    /// derivative means the polynomial is a p-th power.
    pub(crate) fn squarefree_perfect(&self) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            Some(_) => {
                let d = self.derivative();
                !d.is_zero() && self.gcd(&d).degree() == Some(0)
            }
        }
    }

    /// Roots lying in the field. Over `Q` candidates come from the rational
    /// root theorem; over `GF(p)` every residue is tried.
    pub fn roots_in_field(&self) -> Result<RootSet, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::ZeroPolynomial);
        }
        let candidates: Vec<Scalar> = match self.field {
            Field::Prime(_) => {
                let f = self.monic();
                self.field.elements().unwrap().into_iter().filter(|r| f.eval(r).is_zero()).collect()
            }
            Field::Rationals => rational_root_candidates(self),
        };
        let mut rest = self.monic();
        let mut roots = Vec::new();
        for r in candidates {
            let lin = Poly::linear(&r);
            let mut mult = 0;
            loop {
                if rest.degree() == Some(0) {
                    break;
                }
                let (q, rem) = rest.div_rem(&lin);
                if !rem.is_zero() {
                    break;
                }
                rest = q;
                mult += 1;
            }
            if mult > 0 {
                roots.push((r, mult));
            }
        }
        roots.sort();
        Ok(RootSet { split: rest.degree() == Some(0), roots, cofactor: rest })
    }
}

fn rational_root_candidates(p: &Poly) -> Vec<Scalar> {
    let rats: Vec<BigRational> = p.coeffs.iter().map(|c| c.as_rational().unwrap().clone()).collect();
    let lcm = rats.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let mut ints: Vec<BigInt> = rats.iter().map(|q| (q * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let mut out = BTreeSet::new();
    while ints.first().is_some_and(Zero::is_zero) {
        ints.remove(0);
        out.insert(BigRational::zero());
    }
    if ints.len() > 1 {
        let num_divs = divisors(&ints[0].abs());
        let den_divs = divisors(&ints.last().unwrap().abs());
        for a in &num_divs {
            for b in &den_divs {
                let r = BigRational::new(a.clone(), b.clone());
                out.insert(-r.clone());
                out.insert(r);
            }
        }
    }
    out.into_iter().map(Scalar::Rational).collect()
}

/// Positive divisors of a positive integer by trial-division factorization.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    if let Some(mut m) = n.to_u64() {
        let mut q = 2u64;
        while q.saturating_mul(q) <= m {
            let mut e = 0;
            while m % q == 0 {
                m /= q;
                e += 1;
            }
            if e > 0 {
                factors.push((BigInt::from(q), e));
            }
            q += if q == 2 { 1 } else { 2 };
        }
        if m > 1 {
            factors.push((BigInt::from(m), 1));
        }
    } else {
        let mut m = n.clone();
        let mut q = BigInt::from(2);
        while &q * &q <= m {
            let mut e = 0;
            while (&m % &q).is_zero() {
                m /= &q;
                e += 1;
            }
            if e > 0 {
                factors.push((q.clone(), e));
            }
            q += 1;
        }
        if m > BigInt::one() {
            factors.push((m, 1));
        }
    }
    let mut divs = vec![BigInt::one()];
    for (p, e) in factors {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        divs = next;
    }
    divs
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = is_negative(c);
            let mag = if neg { -c } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = k == 0 || !mag.is_one();
            if show_coeff {
                write!(f, "{mag}")?;
                if k > 0 {
                    write!(f, "*")?;
                }
            }
            match k {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rationals
    }

    #[test]
    fn display() {
        assert_eq!(Poly::from_ints(q(), &[-1, 0, 1]).to_string(), "x^2 - 1");
        assert_eq!(Poly::from_ints(q(), &[0, 1]).to_string(), "x");
        assert_eq!(Poly::from_ints(q(), &[2, -3, 1]).to_string(), "x^2 - 3*x + 2");
        assert_eq!(Poly::from_ints(Field::prime(7).unwrap(), &[-2, 0, 1]).to_string(), "x^2 + 5");
    }

    #[test]
    fn roots_over_q() {
        let r = Poly::from_ints(q(), &[-1, 0, 1]).roots_in_field().unwrap();
        assert!(r.split);
        assert_eq!(r.roots, vec![(q().int(-1), 1), (q().int(1), 1)]);

        let r = Poly::from_ints(q(), &[-2, 0, 1]).roots_in_field().unwrap();
        assert!(!r.split);
        assert!(r.roots.is_empty());
        assert_eq!(r.cofactor, Poly::from_ints(q(), &[-2, 0, 1]));

        // 6x^2 - 5x + 1 = (2x - 1)(3x - 1)
        let r = Poly::from_ints(q(), &[1, -5, 6]).roots_in_field().unwrap();
        assert!(r.split);
        assert_eq!(r.roots, vec![(q().parse("1/3").unwrap(), 1), (q().parse("1/2").unwrap(), 1)]);

        // x^3 (x - 2)^2
        let p = Poly::from_ints(q(), &[0, 0, 0, 4, -4, 1]);
        let r = p.roots_in_field().unwrap();
        assert_eq!(r.roots, vec![(q().int(0), 3), (q().int(2), 2)]);
    }

    #[test]
    fn roots_over_gf7() {
        let f7 = Field::prime(7).unwrap();
        let r = Poly::from_ints(f7, &[-2, 0, 1]).roots_in_field().unwrap();
        assert!(r.split);
        assert_eq!(r.roots, vec![(f7.int(3), 1), (f7.int(4), 1)]);
        assert!(Poly::zero(f7).roots_in_field().is_err());
    }

    #[test]
    fn squarefree() {
        assert!(Poly::from_ints(q(), &[-1, 0, 1]).is_squarefree().unwrap());
        assert!(!Poly::from_ints(q(), &[0, 0, 1]).is_squarefree().unwrap());
        // (x-1)^2 (x-2) = x^3 - 4x^2 + 5x - 2
        assert!(!Poly::from_ints(q(), &[-2, 5, -4, 1]).is_squarefree().unwrap());
        let f3 = Field::prime(3).unwrap();
        assert_eq!(
            Poly::from_ints(f3, &[-1, 0, 0, 1]).is_squarefree(),
            Err(AlgebraError::DegreeVsCharacteristic { degree: 3, characteristic: 3 })
        );
        // x^3 - 1 = (x - 1)^3 over GF(3)
        assert!(!Poly::from_ints(f3, &[-1, 0, 0, 1]).squarefree_perfect());
    }

    #[test]
    fn division_identity() {
        let a = Poly::from_ints(q(), &[3, 0, 2, 5, 1]);
        let b = Poly::from_ints(q(), &[1, 2]);
        let (qq, r) = a.div_rem(&b);
        assert_eq!(qq.mul(&b).add(&r), a);
        assert!(r.degree().unwrap_or(0) < 1);
    }
}
