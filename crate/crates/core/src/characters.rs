//! The additive character `psi` of `F_q((1/t))` and exact Haar integrals.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FqElem};
use crate::polyring::Poly;
use crate::{CycInt, QScaled};

/// A finitely supported tail `theta = sum_{i>=1} b_{-i} t^{-i}`; `entries[i-1]`
/// holds `b_{-i}` and trailing zeros are trimmed, so `depth` is the largest
/// index with a nonzero entry.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LaurentTail {
    entries: Vec<FqElem>,
}

impl LaurentTail {
    pub fn zero() -> Self {
        LaurentTail::default()
    }

    /// Tail from `(i, b_{-i})` pairs with `i >= 1`; later pairs overwrite.
    pub fn from_pairs<I: IntoIterator<Item = (usize, FqElem)>>(pairs: I) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, b) in pairs {
            if i == 0 {
                return Err(Error::OutOfRange("tail indices start at 1".into()));
            }
            if entries.len() < i {
                entries.resize(i, FqElem::ZERO);
            }
            entries[i - 1] = b;
        }
        Ok(LaurentTail::from_vec(entries))
    }

    /// Tail from `[b_{-1}, b_{-2}, ...]`.
    pub fn from_vec(mut entries: Vec<FqElem>) -> Self {
        while entries.last().is_some_and(|c| c.is_zero()) {
            entries.pop();
        }
        LaurentTail { entries }
    }

    /// `b_{-i}` (zero outside the support).
    pub fn get(&self, i: usize) -> FqElem {
        if i == 0 {
            return FqElem::ZERO;
        }
        self.entries.get(i - 1).copied().unwrap_or(FqElem::ZERO)
    }

    pub fn depth(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// `-log_q |theta|`, or `None` for the zero tail.
    pub fn order(&self) -> Option<usize> {
        self.entries.iter().position(|c| !c.is_zero()).map(|k| k + 1)
    }

    pub fn entries(&self) -> &[FqElem] {
        &self.entries
    }
}

/// Coefficient of `t^j` (`j <= -1`) in the expansion of `x/r` at infinity.
pub fn laurent_coeff_of_ratio(f: &FieldCtx, x: &Poly, r: &Poly, j: i64) -> Result<FqElem> {
    if j >= 0 {
        return Err(Error::OutOfRange(format!("j = {j} must be negative")));
    }
    let ring = f.poly_ring();
    let shifted = ring.shift(x, (-j) as usize);
    let (quot, _) = ring.divmod(&shifted, r)?;
    Ok(quot.coeff(0))
}

/// Exponent `k` with `psi(x/r) = zeta_p^k`.
pub fn psi_rational(f: &FieldCtx, x: &Poly, r: &Poly) -> Result<u32> {
    let ring = f.poly_ring();
    let rem = ring.rem(x, r)?;
    // only the remainder contributes; its t^{-1} coefficient is
    // lead(rem)/lead(r) when deg rem = deg r - 1
    let (Some(dr), Some(lead_r)) = (r.degree().finite(), r.leading()) else {
        unreachable!("rem succeeded, so r is nonzero");
    };
    match rem.degree().finite() {
        Some(d) if d + 1 == dr => {
            let c = f.mul(rem.leading().unwrap(), f.inv(lead_r)?);
            Ok(f.char_exponent(c))
        }
        _ => Ok(0),
    }
}

/// Laurent coefficients `[c_{-1}, ..., c_{-d}]` of `a/r`, `d = deg r`, so
/// that `psi(a s / r) = e_q(sum_j s_j c_{-1-j})` for every `s` with
/// `deg s < d`.
pub fn psi_functional(f: &FieldCtx, a: &Poly, r: &Poly) -> Result<Vec<FqElem>> {
    let ring = f.poly_ring();
    let d = r.degree().finite().ok_or(Error::DivisionByZero)?;
    let rem = ring.rem(a, r)?;
    let (quot, _) = ring.divmod(&ring.shift(&rem, d), r)?;
    Ok((0..d).map(|k| quot.coeff(d - 1 - k)).collect())
}

/// `sum_j s_j c_j` over `F_q`.
#[inline]
pub fn pair(f: &FieldCtx, s: &[FqElem], c: &[FqElem]) -> FqElem {
    s.iter()
        .zip(c)
        .fold(FqElem::ZERO, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}

/// Exponent of `psi(theta * v)` for a polynomial `v`.
pub fn psi_tail_times(f: &FieldCtx, tail: &LaurentTail, v: &Poly) -> u32 {
    f.char_exponent(pair(f, &tail.entries, v.coeffs()))
}

/// `int_{B(0;M)} F(theta) dtheta` for `M <= 0`, where `F` depends only on
/// `b_{-1}, ..., b_{-D}`.
///
/// The ball `{|theta| <= q^M}` is the set of tails with `b_{-i} = 0` for
/// `i <= -M`; the Haar measure is normalized so `|theta| < 1` has mass one.
pub fn haar_integral<F>(f: &FieldCtx, m: i64, depth: usize, func: F) -> Result<QScaled>
where
    F: Fn(&LaurentTail) -> CycInt + Sync,
{
    if m > 0 {
        return Err(Error::OutOfRange(format!("ball exponent M = {m} must be <= 0")));
    }
    let q = f.q();
    let first = (1 - m) as usize;
    if first > depth {
        return Ok(QScaled {
            num: func(&LaurentTail::zero()),
            qexp: (-m) as u32,
            q,
        });
    }
    let free = depth + 1 - first;
    let count = (q as u64)
        .checked_pow(free as u32)
        .ok_or_else(|| Error::OutOfRange("too many tails".into()))?;

    #[cfg(debug_assertions)]
    {
        let probe = LaurentTail::from_pairs([(depth + 1, FqElem::ONE)]).expect("index >= 1");
        debug_assert_eq!(
            func(&LaurentTail::zero()),
            func(&probe),
            "integrand depends on index beyond the declared depth {depth}"
        );
    }

    let tail_at = |idx: u64| {
        let mut entries = vec![FqElem::ZERO; depth];
        let mut rest = idx;
        for e in entries.iter_mut().skip(first - 1) {
            *e = f.from_index((rest % q as u64) as u32).expect("index < q");
            rest /= q as u64;
        }
        LaurentTail::from_vec(entries)
    };
    let p = f.p();
    let sum = (0..count)
        .into_par_iter()
        .map(|idx| func(&tail_at(idx)))
        .reduce(|| CycInt::zero(p), |a, b| a + b);
    Ok(QScaled {
        num: sum,
        qexp: depth as u32,
        q,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn f3() -> FieldCtx {
        FieldCtx::prime(3).unwrap()
    }

    fn poly(f: &FieldCtx, c: &[i64]) -> Poly {
        Poly::from_ints(f, c)
    }

    #[test]
    fn laurent_coefficients() {
        let f = f3();
        let one = poly(&f, &[1]);
        let t = poly(&f, &[0, 1]);
        assert_eq!(laurent_coeff_of_ratio(&f, &one, &t, -1).unwrap(), FqElem::ONE);
        let t2 = poly(&f, &[0, 0, 1]);
        assert_eq!(laurent_coeff_of_ratio(&f, &one, &t2, -1).unwrap(), FqElem::ZERO);
        // (t+1)/(t^2+1) = t^-1 + t^-2 - t^-3 - t^-4 + ...
        let x = poly(&f, &[1, 1]);
        let r = poly(&f, &[1, 0, 1]);
        let expect = [1, 1, -1, -1, 1, 1];
        for (k, &e) in expect.iter().enumerate() {
            let c = laurent_coeff_of_ratio(&f, &x, &r, -(k as i64) - 1).unwrap();
            assert_eq!(c, f.from_int(e));
        }
        assert!(laurent_coeff_of_ratio(&f, &x, &Poly::zero(), -1).is_err());
        assert!(laurent_coeff_of_ratio(&f, &x, &r, 0).is_err());
    }

    #[test]
    fn psi_basic_values() {
        let f = f3();
        let t = poly(&f, &[0, 1]);
        assert_eq!(psi_rational(&f, &poly(&f, &[1]), &t).unwrap(), 1);
        assert_eq!(psi_rational(&f, &t, &t).unwrap(), 0);
        assert!(psi_rational(&f, &t, &Poly::zero()).is_err());
    }

    #[test]
    fn psi_matches_long_division() {
        let f = FieldCtx::new(3, 2, None).unwrap();
        let ring = f.poly_ring();
        for r in ring.enumerate_below(3).filter(|r| !r.is_zero()) {
            for x in ring.enumerate_below(3) {
                let c = laurent_coeff_of_ratio(&f, &x, &r, -1).unwrap();
                assert_eq!(psi_rational(&f, &x, &r).unwrap(), f.char_exponent(c));
            }
        }
    }

    #[test]
    fn psi_well_defined_and_additive() {
        let f = f3();
        let ring = f.poly_ring();
        for r in ring.enumerate_monic_up_to(2) {
            for x in ring.enumerate_below(3) {
                let px = psi_rational(&f, &x, &r).unwrap();
                for b in ring.enumerate_below(2) {
                    let shifted = ring.add(&x, &ring.mul(&b, &r));
                    assert_eq!(psi_rational(&f, &shifted, &r).unwrap(), px);
                }
                for y in ring.enumerate_below(2) {
                    let py = psi_rational(&f, &y, &r).unwrap();
                    let pxy = psi_rational(&f, &ring.add(&x, &y), &r).unwrap();
                    assert_eq!(pxy, (px + py) % 3);
                }
            }
        }
    }

    #[test]
    fn functional_matches_psi() {
        let f = FieldCtx::new(3, 2, None).unwrap();
        let ring = f.poly_ring();
        for r in ring.enumerate_monic_up_to(2) {
            let d = r.degree().finite().unwrap();
            for a in ring.enumerate_below(3) {
                let c = psi_functional(&f, &a, &r).unwrap();
                for s in ring.enumerate_below(d) {
                    let k = psi_rational(&f, &ring.mul(&a, &s), &r).unwrap();
                    assert_eq!(f.char_exponent(pair(&f, s.coeffs(), &c)), k);
                }
            }
        }
    }

    #[test]
    fn psi_tail_values() {
        let f = f3();
        let t = poly(&f, &[0, 1]);
        assert_eq!(psi_tail_times(&f, &LaurentTail::zero(), &t), 0);
        let tail = LaurentTail::from_pairs([(1, FqElem::ONE)]).unwrap();
        assert_eq!(psi_tail_times(&f, &tail, &Poly::one()), 1);
        let tail = LaurentTail::from_pairs([(2, FqElem::ONE)]).unwrap();
        assert_eq!(psi_tail_times(&f, &tail, &t), 1);
        assert_eq!(tail.depth(), 2);
        assert_eq!(tail.order(), Some(2));
    }

    #[test]
    fn psi_ignores_deep_differences() {
        // tails differing only at depth >= 2 agree on psi of constants
        let f = f3();
        let c = poly(&f, &[2]);
        for b1 in f.elements() {
            let base = LaurentTail::from_pairs([(1, b1)]).unwrap();
            for b2 in f.elements() {
                let other = LaurentTail::from_pairs([(1, b1), (2, b2)]).unwrap();
                assert_eq!(psi_tail_times(&f, &base, &c), psi_tail_times(&f, &other, &c));
            }
        }
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn haar_constant_integrand() {
        let f = f3();
        let v = haar_integral(&f, -2, 0, |_| CycInt::one(3)).unwrap();
        assert_eq!(v.to_rational().unwrap(), rat(1, 9));
        let v = haar_integral(&f, -1, 3, |_| CycInt::one(3)).unwrap();
        assert_eq!(v.to_rational().unwrap(), rat(1, 3));
        assert!(haar_integral(&f, 1, 0, |_| CycInt::one(3)).is_err());
    }

    #[test]
    fn orthogonality() {
        let f = f3();
        let ring = f.poly_ring();
        for x in ring.enumerate_below(5) {
            for mm in 0..=3i64 {
                let depth = 5;
                let v = haar_integral(&f, -mm, depth, |th| {
                    CycInt::zeta_pow(3, psi_tail_times(&f, th, &x) as i64)
                })
                .unwrap()
                .to_rational()
                .unwrap();
                let expect = if x.degree().lt(mm as usize) {
                    rat(1, 3i64.pow(mm as u32))
                } else {
                    rat(0, 1)
                };
                assert_eq!(v, expect, "x = {x:?}, M' = {mm}");
            }
        }
    }
}
