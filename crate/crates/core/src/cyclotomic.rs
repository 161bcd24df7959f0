//! Exact arithmetic in `Z[zeta_p]`.
//!
//! Elements are reduced modulo `Phi_p = 1 + x + ... + x^{p-1}` and stored on
//! the basis `1, zeta, ..., zeta^{p-2}`, so equality is coefficient-wise.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Signed, ToPrimitive, Zero};

/// Coefficient ring for [`Cyclotomic`].
pub trait CycCoeff: Clone + PartialEq + fmt::Debug + Signed + FromPrimitive + ToPrimitive {}

impl<T> CycCoeff for T where T: Clone + PartialEq + fmt::Debug + Signed + FromPrimitive + ToPrimitive {}

/// An element of `Z[zeta_p]` with coefficients in `T`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cyclotomic<T> {
    p: u32,
    coeffs: Vec<T>,
}

impl<T: CycCoeff> Cyclotomic<T> {
    pub fn zero(p: u32) -> Self {
        assert!(p >= 3, "cyclotomic ring needs an odd prime p");
        Cyclotomic {
            p,
            coeffs: vec![T::zero(); (p - 1) as usize],
        }
    }

    pub fn one(p: u32) -> Self {
        Self::from_int(p, T::one())
    }

    pub fn from_int(p: u32, n: T) -> Self {
        let mut z = Self::zero(p);
        z.coeffs[0] = n;
        z
    }

    /// The reduced form of `zeta_p^k`.
    pub fn zeta_pow(p: u32, k: i64) -> Self {
        let k = k.rem_euclid(p as i64) as usize;
        let mut z = Self::zero(p);
        if k + 1 < p as usize {
            z.coeffs[k] = T::one();
        } else {
            // zeta^{p-1} = -(1 + zeta + ... + zeta^{p-2})
            for c in z.coeffs.iter_mut() {
                *c = -T::one();
            }
        }
        z
    }

    /// Builds `sum_k counts[k] * zeta^k` from a length-`p` tally.
    pub fn from_exponent_counts(p: u32, counts: &[u64]) -> Self {
        assert_eq!(counts.len(), p as usize);
        let top = T::from_u64(counts[p as usize - 1]).expect("count fits coefficient type");
        let coeffs = counts[..p as usize - 1]
            .iter()
            .map(|&c| T::from_u64(c).expect("count fits coefficient type") - top.clone())
            .collect();
        Cyclotomic { p, coeffs }
    }

    /// Reduces a length-`p` vector of coefficients of `1, zeta, ..., zeta^{p-1}`.
    fn reduce_full(p: u32, mut full: Vec<T>) -> Self {
        debug_assert_eq!(full.len(), p as usize);
        let top = full.pop().unwrap();
        for c in full.iter_mut() {
            *c = c.clone() - top.clone();
        }
        Cyclotomic { p, coeffs: full }
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// `Some(n)` iff the element is the rational integer `n`.
    pub fn to_integer(&self) -> Option<T> {
        self.coeffs[1..]
            .iter()
            .all(Zero::is_zero)
            .then(|| self.coeffs[0].clone())
    }

    pub fn scale(&self, k: &T) -> Self {
        Cyclotomic {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| c.clone() * k.clone()).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Complex value at `zeta_p = exp(2 pi i / p)`.
    pub fn eval<F: Float>(&self) -> Complex<F> {
        let two_pi = F::from(std::f64::consts::TAU).unwrap();
        let p = F::from(self.p).unwrap();
        self.coeffs
            .iter()
            .enumerate()
            .fold(Complex::new(F::zero(), F::zero()), |acc, (k, c)| {
                let angle = two_pi * F::from(k).unwrap() / p;
                let c = F::from(c.to_f64().unwrap()).unwrap();
                acc + Complex::from_polar(c, angle)
            })
    }

    fn check_same_ring(&self, other: &Self) {
        assert_eq!(self.p, other.p, "mixing Z[zeta_p] for different p");
    }
}

impl<T: CycCoeff> Add for &Cyclotomic<T> {
    type Output = Cyclotomic<T>;

    fn add(self, rhs: &Cyclotomic<T>) -> Cyclotomic<T> {
        self.check_same_ring(rhs);
        Cyclotomic {
            p: self.p,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }
}

impl<T: CycCoeff> Add for Cyclotomic<T> {
    type Output = Cyclotomic<T>;

    fn add(self, rhs: Cyclotomic<T>) -> Cyclotomic<T> {
        &self + &rhs
    }
}

impl<T: CycCoeff> AddAssign<&Cyclotomic<T>> for Cyclotomic<T> {
    fn add_assign(&mut self, rhs: &Cyclotomic<T>) {
        self.check_same_ring(rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a = a.clone() + b.clone();
        }
    }
}

impl<T: CycCoeff> Neg for &Cyclotomic<T> {
    type Output = Cyclotomic<T>;

    fn neg(self) -> Cyclotomic<T> {
        Cyclotomic {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }
}

impl<T: CycCoeff> Neg for Cyclotomic<T> {
    type Output = Cyclotomic<T>;

    fn neg(self) -> Cyclotomic<T> {
        -&self
    }
}

impl<T: CycCoeff> Sub for &Cyclotomic<T> {
    type Output = Cyclotomic<T>;

    fn sub(self, rhs: &Cyclotomic<T>) -> Cyclotomic<T> {
        self + &(-rhs)
    }
}

impl<T: CycCoeff> Sub for Cyclotomic<T> {
    type Output = Cyclotomic<T>;

    fn sub(self, rhs: Cyclotomic<T>) -> Cyclotomic<T> {
        &self - &rhs
    }
}

impl<T: CycCoeff> Mul for &Cyclotomic<T> {
    type Output = Cyclotomic<T>;

    fn mul(self, rhs: &Cyclotomic<T>) -> Cyclotomic<T> {
        self.check_same_ring(rhs);
        let p = self.p as usize;
        // product in Z[x]/(x^p - 1), then fold zeta^{p-1}
        let mut full = vec![T::zero(); p];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let k = (i + j) % p;
                full[k] = full[k].clone() + a.clone() * b.clone();
            }
        }
        Cyclotomic::reduce_full(self.p, full)
    }
}

impl<T: CycCoeff> Mul for Cyclotomic<T> {
    type Output = Cyclotomic<T>;

    fn mul(self, rhs: Cyclotomic<T>) -> Cyclotomic<T> {
        &self * &rhs
    }
}

impl<T: CycCoeff + fmt::Display> fmt::Display for Cyclotomic<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*z")?,
                _ => write!(f, "{c}*z^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Cyclotomic<BigInt> {
    pub fn from_i64(p: u32, n: i64) -> Self {
        Self::from_int(p, BigInt::from(n))
    }
}

/// Tally of exponents `k` for sums `sum zeta_p^{k}`; cheap to merge across
/// threads and converted to a reduced element once at the end.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentTally {
    counts: Vec<u64>,
}

impl ExponentTally {
    pub fn new(p: u32) -> Self {
        ExponentTally {
            counts: vec![0; p as usize],
        }
    }

    #[inline]
    pub fn push(&mut self, k: u32) {
        self.counts[k as usize] += 1;
    }

    #[inline]
    pub fn push_many(&mut self, k: u32, times: u64) {
        self.counts[k as usize] += times;
    }

    pub fn merge(mut self, other: &ExponentTally) -> Self {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn to_cyc<T: CycCoeff>(&self) -> Cyclotomic<T> {
        Cyclotomic::from_exponent_counts(self.counts.len() as u32, &self.counts)
    }
}

/// `num / q^qexp`, the shape of every Haar integral value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QScaled {
    pub num: Cyclotomic<BigInt>,
    pub qexp: u32,
    pub q: u32,
}

impl QScaled {
    /// The value as a rational number if the numerator is a rational integer.
    pub fn to_rational(&self) -> Option<BigRational> {
        let n = self.num.to_integer()?;
        let den = num_traits::pow(BigInt::from(self.q), self.qexp as usize);
        Some(BigRational::new(n, den))
    }

    pub fn eval(&self) -> Complex<f64> {
        self.num.eval::<f64>() / (self.q as f64).powi(self.qexp as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::CycInt;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(p: u32, rng: &mut ChaCha8Rng) -> CycInt {
        let full: Vec<BigInt> = (0..p).map(|_| BigInt::from(rng.gen_range(-20i64..20))).collect();
        Cyclotomic::reduce_full(p, full)
    }

    fn close(a: Complex<f64>, b: Complex<f64>) -> bool {
        (a - b).norm() < 1e-9 * (1.0 + b.norm())
    }

    #[test]
    fn zeta_powers_p3() {
        assert_eq!(CycInt::zeta_pow(3, 0).coeffs(), &[BigInt::from(1), BigInt::from(0)]);
        assert_eq!(CycInt::zeta_pow(3, 2).coeffs(), &[BigInt::from(-1), BigInt::from(-1)]);
        let s = (0..3).fold(CycInt::zero(3), |acc, k| acc + CycInt::zeta_pow(3, k));
        assert!(s.is_zero());
    }

    #[test]
    fn zeta_order_and_vanishing_sum() {
        for p in [3u32, 5, 7, 11, 13] {
            let z = CycInt::zeta_pow(p, 1);
            assert_eq!(z.pow(p), CycInt::one(p));
            let s = (0..p as i64).fold(CycInt::zero(p), |acc, k| acc + CycInt::zeta_pow(p, k));
            assert!(s.is_zero());
        }
    }

    #[test]
    fn square_of_one_plus_two_zeta_matches_float() {
        // (1 + 2 zeta)^2 = 1 + 4 zeta + 4 zeta^2 = -3 + 0 zeta at p = 3
        let a = CycInt::one(3) + CycInt::zeta_pow(3, 1).scale(&BigInt::from(2));
        let sq = &a * &a;
        assert_eq!(sq, CycInt::from_i64(3, -3));
        let z = Complex::from_polar(1.0f64, std::f64::consts::TAU / 3.0);
        let direct = (Complex::new(1.0, 0.0) + z * 2.0).powi(2);
        assert!(close(sq.eval::<f64>(), direct));
    }

    #[test]
    fn to_integer() {
        assert_eq!(CycInt::from_i64(5, 7).to_integer(), Some(BigInt::from(7)));
        assert_eq!(CycInt::zeta_pow(5, 1).to_integer(), None);
        assert_eq!(CycInt::zeta_pow(3, 2).to_integer(), None);
    }

    #[test]
    fn identity_and_distributivity_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [3u32, 5, 7] {
            for _ in 0..50 {
                let a = random(p, &mut rng);
                assert_eq!(&a * &CycInt::one(p), a);
            }
            for _ in 0..100 {
                let (a, b, c) = (random(p, &mut rng), random(p, &mut rng), random(p, &mut rng));
                assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
                assert!(close((&a * &b).eval::<f64>(), a.eval::<f64>() * b.eval::<f64>()));
            }
        }
    }

    #[test]
    fn exponent_tally_matches_explicit_sum() {
        let mut t = ExponentTally::new(5);
        let ks = [0u32, 1, 1, 4, 3, 4, 4, 2];
        let mut explicit = CycInt::zero(5);
        for &k in &ks {
            t.push(k);
            explicit += &CycInt::zeta_pow(5, k as i64);
        }
        assert_eq!(t.to_cyc::<BigInt>(), explicit);
    }

    #[test]
    fn generic_over_machine_integers() {
        let a: Cyclotomic<i64> = Cyclotomic::zeta_pow(7, 3);
        let b: Cyclotomic<i64> = Cyclotomic::zeta_pow(7, 5);
        assert_eq!(&a * &b, Cyclotomic::<i64>::zeta_pow(7, 1));
        let v32 = a.eval::<f32>();
        let v64 = a.eval::<f64>();
        assert!((v32.re as f64 - v64.re).abs() < 1e-5);
    }

    #[test]
    fn qscaled_rational() {
        let v = QScaled {
            num: CycInt::from_i64(3, 6),
            qexp: 2,
            q: 3,
        };
        assert_eq!(
            v.to_rational().unwrap(),
            BigRational::new(BigInt::from(2), BigInt::from(3))
        );
    }
}
