//! Arithmetic and arithmetic functions in `F_q[t]`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FqElem};

/// Degree of a polynomial; the zero polynomial has degree `NegInf`, which
/// orders below every finite degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInf,
    Finite(usize),
}

impl Degree {
    /// Finite degree, or `None` for the zero polynomial.
    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::NegInf => None,
            Degree::Finite(d) => Some(d),
        }
    }

    /// `deg < bound`, which holds for the zero polynomial for every bound.
    pub fn lt(self, bound: usize) -> bool {
        match self {
            Degree::NegInf => true,
            Degree::Finite(d) => d < bound,
        }
    }
}

/// A polynomial in `F_q[t]`; `coeffs[i]` is the coefficient of `t^i` and the
/// vector carries no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<FqElem>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly {
            coeffs: vec![FqElem::ONE],
        }
    }

    /// The variable `t`.
    pub fn t() -> Self {
        Poly::monomial(FqElem::ONE, 1)
    }

    pub fn constant(c: FqElem) -> Self {
        Poly::from_coeffs(vec![c])
    }

    pub fn monomial(c: FqElem, k: usize) -> Self {
        let mut coeffs = vec![FqElem::ZERO; k + 1];
        coeffs[k] = c;
        Poly::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<FqElem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// Polynomial over the prime subfield from integer coefficients, low to high.
    pub fn from_ints(f: &FieldCtx, ints: &[i64]) -> Self {
        Poly::from_coeffs(ints.iter().map(|&k| f.from_int(k)).collect())
    }

    pub fn coeffs(&self) -> &[FqElem] {
        &self.coeffs
    }

    /// Coefficient of `t^i` (zero beyond the degree).
    #[inline]
    pub fn coeff(&self, i: usize) -> FqElem {
        self.coeffs.get(i).copied().unwrap_or(FqElem::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == FqElem::ONE
    }

    pub fn degree(&self) -> Degree {
        match self.coeffs.len() {
            0 => Degree::NegInf,
            n => Degree::Finite(n - 1),
        }
    }

    /// Degree as an index; callers must have excluded zero.
    fn deg(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Option<FqElem> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Some(FqElem::ONE)
    }

    /// `|x| = q^{deg x}`, with `|0| = 0`.
    pub fn abs(&self, q: u32) -> BigUint {
        match self.degree() {
            Degree::NegInf => BigUint::zero(),
            Degree::Finite(d) => num_traits::pow(BigUint::from(q), d),
        }
    }

    /// Position of the polynomial in the enumeration of polynomials of
    /// degree `< len`, base `q` on coefficient indices.
    pub fn index(&self, q: u32) -> u64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, c| acc * q as u64 + c.index() as u64)
    }

    /// Inverse of [`Poly::index`] for polynomials of degree `< len`.
    pub fn from_index(q: u32, len: usize, mut idx: u64) -> Self {
        let mut coeffs = Vec::with_capacity(len);
        for _ in 0..len {
            coeffs.push(FqElem::from_raw((idx % q as u64) as u32));
            idx /= q as u64;
        }
        Poly::from_coeffs(coeffs)
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: by degree, then coefficients from the top down.
impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

/// Factorization `unit * prod factor^mult` into pairwise distinct monic
/// irreducibles, in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: FqElem,
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    /// `phi(r) = prod |w|^{k-1} (|w| - 1)`.
    pub fn euler_phi(&self, q: u32) -> BigUint {
        self.factors
            .iter()
            .map(|(w, k)| {
                let norm = w.abs(q);
                num_traits::pow(norm.clone(), (*k - 1) as usize) * (norm - 1u32)
            })
            .product()
    }

    /// Moebius function: 0 on non-squarefree, else `(-1)^{#factors}`.
    pub fn moebius(&self) -> i8 {
        if self.factors.iter().any(|&(_, k)| k >= 2) {
            0
        } else if self.factors.len() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn is_square_part(&self) -> bool {
        self.factors.iter().all(|&(_, k)| k % 2 == 0)
    }
}

/// Polynomial arithmetic over a fixed field.
#[derive(Clone, Copy, Debug)]
pub struct PolyRing<'a> {
    f: &'a FieldCtx,
}

impl FieldCtx {
    pub fn poly_ring(&self) -> PolyRing<'_> {
        PolyRing { f: self }
    }
}

impl<'a> PolyRing<'a> {
    pub fn new(f: &'a FieldCtx) -> Self {
        PolyRing { f }
    }

    pub fn field(&self) -> &'a FieldCtx {
        self.f
    }

    pub fn add(&self, a: &Poly, b: &Poly) -> Poly {
        let n = a.coeffs.len().max(b.coeffs.len());
        Poly::from_coeffs(
            (0..n)
                .map(|i| self.f.add(a.coeff(i), b.coeff(i)))
                .collect(),
        )
    }

    pub fn neg(&self, a: &Poly) -> Poly {
        Poly {
            coeffs: a.coeffs.iter().map(|&c| self.f.neg(c)).collect(),
        }
    }

    pub fn sub(&self, a: &Poly, b: &Poly) -> Poly {
        let n = a.coeffs.len().max(b.coeffs.len());
        Poly::from_coeffs(
            (0..n)
                .map(|i| self.f.sub(a.coeff(i), b.coeff(i)))
                .collect(),
        )
    }

    pub fn scale(&self, c: FqElem, a: &Poly) -> Poly {
        Poly::from_coeffs(a.coeffs.iter().map(|&x| self.f.mul(c, x)).collect())
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() || b.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![FqElem::ZERO; a.coeffs.len() + b.coeffs.len() - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                out[i + j] = self.f.add(out[i + j], self.f.mul(x, y));
            }
        }
        Poly::from_coeffs(out)
    }

    /// `a * t^k`.
    pub fn shift(&self, a: &Poly, k: usize) -> Poly {
        if a.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![FqElem::ZERO; k];
        coeffs.extend_from_slice(&a.coeffs);
        Poly { coeffs }
    }

    pub fn pow(&self, a: &Poly, mut e: u32) -> Poly {
        let mut base = a.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Quotient and remainder with `deg(rem) < deg(b)`.
    pub fn divmod(&self, a: &Poly, b: &Poly) -> Result<(Poly, Poly)> {
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let db = b.deg();
        if a.coeffs.len() <= db {
            return Ok((Poly::zero(), a.clone()));
        }
        let inv_lead = self.f.inv(b.leading().unwrap())?;
        let mut rem = a.coeffs.clone();
        let mut quot = vec![FqElem::ZERO; a.coeffs.len() - db];
        for k in (db..rem.len()).rev() {
            let c = rem[k];
            if c.is_zero() {
                continue;
            }
            let factor = self.f.mul(c, inv_lead);
            quot[k - db] = factor;
            for (i, &bc) in b.coeffs.iter().enumerate() {
                let idx = k - db + i;
                rem[idx] = self.f.sub(rem[idx], self.f.mul(factor, bc));
            }
        }
        rem.truncate(db);
        Ok((Poly::from_coeffs(quot), Poly::from_coeffs(rem)))
    }

    pub fn rem(&self, a: &Poly, b: &Poly) -> Result<Poly> {
        Ok(self.divmod(a, b)?.1)
    }

    /// Exact quotient; panics in debug builds if `b` does not divide `a`.
    fn div_exact(&self, a: &Poly, b: &Poly) -> Poly {
        let (quot, rem) = self.divmod(a, b).expect("nonzero divisor");
        debug_assert!(rem.is_zero());
        quot
    }

    /// `(lead(a), a / lead(a))`; `a` must be nonzero.
    pub fn monic_part(&self, a: &Poly) -> Result<(FqElem, Poly)> {
        let lead = a.leading().ok_or(Error::ZeroPolynomial)?;
        let inv = self.f.inv(lead)?;
        Ok((lead, self.scale(inv, a)))
    }

    /// Monic generator of `(a, b)`.
    pub fn gcd(&self, a: &Poly, b: &Poly) -> Result<Poly> {
        if a.is_zero() && b.is_zero() {
            return Err(Error::GcdOfZeros);
        }
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let r = self.rem(&x, &y)?;
            x = y;
            y = r;
        }
        Ok(self.monic_part(&x)?.1)
    }

    pub fn coprime(&self, a: &Poly, b: &Poly) -> bool {
        self.gcd(a, b).map(|g| g.is_one()).unwrap_or(false)
    }

    pub fn mulmod(&self, a: &Poly, b: &Poly, m: &Poly) -> Poly {
        self.rem(&self.mul(a, b), m).expect("nonzero modulus")
    }

    /// `a^e mod m` for an arbitrary-precision exponent.
    pub fn powmod(&self, a: &Poly, e: &BigUint, m: &Poly) -> Result<Poly> {
        if m.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let base = self.rem(a, m)?;
        let mut acc = self.rem(&Poly::one(), m)?;
        for i in (0..e.bits()).rev() {
            acc = self.mulmod(&acc, &acc, m);
            if e.bit(i) {
                acc = self.mulmod(&acc, &base, m);
            }
        }
        Ok(acc)
    }

    pub fn derivative(&self, a: &Poly) -> Poly {
        Poly::from_coeffs(
            a.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| self.f.mul(self.f.from_int(i as i64), c))
                .collect(),
        )
    }

    /// The `p`-th root of a polynomial whose derivative vanishes.
    fn pth_root(&self, a: &Poly) -> Poly {
        let p = self.f.p() as usize;
        // c^{1/p} = c^{q/p} in F_q
        let root_exp = (self.f.q() / self.f.p()) as u64;
        Poly::from_coeffs(
            a.coeffs
                .iter()
                .step_by(p)
                .map(|&c| self.f.pow(c, root_exp))
                .collect(),
        )
    }

    /// Square-free decomposition of a monic polynomial: pairs
    /// `(g_i, i)` with `a = prod g_i^i` and each `g_i` square-free.
    fn squarefree(&self, a: &Poly) -> Vec<(Poly, u32)> {
        let mut out = Vec::new();
        let mut c = self.gcd(a, &self.derivative(a)).expect("a nonzero");
        let mut w = self.div_exact(a, &c);
        let mut i = 1u32;
        while !w.is_one() {
            let y = self.gcd(&w, &c).expect("w nonzero");
            let z = self.div_exact(&w, &y);
            if !z.is_one() {
                out.push((z, i));
            }
            i += 1;
            c = self.div_exact(&c, &y);
            w = y;
        }
        if !c.is_one() {
            let root = self.pth_root(&c);
            let p = self.f.p();
            out.extend(
                self.squarefree(&root)
                    .into_iter()
                    .map(|(g, m)| (g, m * p)),
            );
        }
        out
    }

    /// Distinct-degree factorization of a monic square-free polynomial.
    fn distinct_degree(&self, a: &Poly) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        let mut rest = a.clone();
        let q = BigUint::from(self.f.q());
        let t = Poly::t();
        let mut h = t.clone();
        let mut d = 1usize;
        while !rest.is_zero() && rest.deg() >= 2 * d {
            h = self.powmod(&h, &q, &rest).expect("rest nonzero");
            let g = self.gcd(&self.sub(&h, &t), &rest).expect("rest nonzero");
            if !g.is_one() {
                rest = self.div_exact(&rest, &g);
                h = self.rem(&h, &rest).expect("rest nonzero");
                out.push((g, d));
            }
            d += 1;
        }
        if rest.deg() > 0 {
            let deg = rest.deg();
            out.push((rest, deg));
        }
        out
    }

    /// Splits a product of distinct monic irreducibles of degree `d`.
    fn equal_degree(&self, a: &Poly, d: usize, rng: &mut ChaCha8Rng, out: &mut Vec<Poly>) {
        if a.deg() == d {
            out.push(a.clone());
            return;
        }
        let exp = (num_traits::pow(BigUint::from(self.f.q()), d) - 1u32) / 2u32;
        let one = Poly::one();
        loop {
            let r = Poly::from_coeffs(
                (0..a.deg())
                    .map(|_| FqElem::from_raw(rng.gen_range(0..self.f.q())))
                    .collect(),
            );
            if r.degree() == Degree::NegInf || r.deg() == 0 {
                continue;
            }
            let b = self.powmod(&r, &exp, a).expect("a nonzero");
            let g = self.gcd(&self.sub(&b, &one), a).expect("a nonzero");
            if !g.is_one() && g.deg() < a.deg() {
                let h = self.div_exact(a, &g);
                self.equal_degree(&g, d, rng, out);
                self.equal_degree(&h, d, rng, out);
                return;
            }
        }
    }

    /// Complete factorization into monic irreducibles, canonically ordered.
    pub fn factorize(&self, r: &Poly) -> Result<Factorization> {
        let (unit, monic) = self.monic_part(r)?;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f00d);
        let mut factors = Vec::new();
        if monic.deg() > 0 {
            for (sqf, mult) in self.squarefree(&monic) {
                for (block, d) in self.distinct_degree(&sqf) {
                    let mut parts = Vec::new();
                    self.equal_degree(&block, d, &mut rng, &mut parts);
                    factors.extend(parts.into_iter().map(|w| (w, mult)));
                }
            }
        }
        factors.sort();
        Ok(Factorization { unit, factors })
    }

    pub fn is_irreducible(&self, w: &Poly) -> bool {
        if w.is_zero() || w.deg() == 0 {
            return false;
        }
        match self.factorize(w) {
            Ok(fac) => fac.factors.len() == 1 && fac.factors[0].1 == 1,
            Err(_) => false,
        }
    }

    pub fn euler_phi(&self, r: &Poly) -> Result<BigUint> {
        Ok(self.factorize(r)?.euler_phi(self.f.q()))
    }

    pub fn moebius(&self, r: &Poly) -> Result<i8> {
        Ok(self.factorize(r)?.moebius())
    }

    /// Legendre symbol `(a / w)` for monic irreducible `w`, via
    /// `a^{(|w|-1)/2} mod w`.
    pub fn legendre(&self, a: &Poly, w: &Poly) -> Result<i8> {
        let a = self.rem(a, w)?;
        if a.is_zero() {
            return Ok(0);
        }
        let e = (w.abs(self.f.q()) - 1u32) / 2u32;
        let v = self.powmod(&a, &e, w)?;
        if v.is_one() {
            Ok(1)
        } else if v == Poly::constant(self.f.neg(FqElem::ONE)) {
            Ok(-1)
        } else {
            Err(Error::Reducible)
        }
    }

    /// Jacobi symbol `(a / r)` for monic `r` of degree `>= 1`.
    pub fn jacobi_symbol(&self, a: &Poly, r: &Poly) -> Result<i8> {
        let fac = self.factorize_modulus(r)?;
        self.jacobi_with(a, &fac)
    }

    fn factorize_modulus(&self, r: &Poly) -> Result<Factorization> {
        if !r.is_monic() || r.deg() == 0 {
            return Err(Error::InvalidModulus);
        }
        self.factorize(r)
    }

    /// Jacobi symbol against an already factored modulus.
    pub fn jacobi_with(&self, a: &Poly, fac: &Factorization) -> Result<i8> {
        let mut sym = 1i8;
        for (w, k) in &fac.factors {
            let l = self.legendre(a, w)?;
            if l == 0 {
                return Ok(0);
            }
            if l == -1 && k % 2 == 1 {
                sym = -sym;
            }
        }
        Ok(sym)
    }

    /// Square root: `s` with `s^2 = r`, monic when `r` is monic; `None` if
    /// `r` is not a square in `F_q[t]`.
    pub fn square_root(&self, r: &Poly) -> Result<Option<Poly>> {
        let fac = self.factorize(r)?;
        if !fac.is_square_part() {
            return Ok(None);
        }
        let Some(lead_root) = self.f.sqrt_unit(fac.unit) else {
            return Ok(None);
        };
        let mut s = Poly::constant(lead_root);
        for (w, k) in &fac.factors {
            s = self.mul(&s, &self.pow(w, k / 2));
        }
        debug_assert_eq!(&self.mul(&s, &s), r);
        Ok(Some(s))
    }

    /// Monic polynomials of degree `d` in index order of their lower
    /// coefficients.
    pub fn enumerate_monic(&self, d: usize) -> impl Iterator<Item = Poly> + Clone + Send {
        let q = self.f.q();
        let count = (q as u64).pow(d as u32);
        (0..count).map(move |i| {
            let mut p = Poly::from_index(q, d, i);
            p.coeffs.resize(d, FqElem::ZERO);
            p.coeffs.push(FqElem::ONE);
            p
        })
    }

    /// All polynomials of degree `< d` (including zero) in index order.
    pub fn enumerate_below(&self, d: usize) -> impl Iterator<Item = Poly> + Clone + Send {
        let q = self.f.q();
        let count = (q as u64).pow(d as u32);
        (0..count).map(move |i| Poly::from_index(q, d, i))
    }

    /// Monic polynomials of degree `<= d`.
    pub fn enumerate_monic_up_to(&self, d: usize) -> impl Iterator<Item = Poly> + Clone + Send {
        let q = self.f.q();
        (0..=d).flat_map(move |k| {
            let count = (q as u64).pow(k as u32);
            (0..count).map(move |i| {
                let mut p = Poly::from_index(q, k, i);
                p.coeffs.resize(k, FqElem::ZERO);
                p.coeffs.push(FqElem::ONE);
                p
            })
        })
    }

    /// Human-readable form, e.g. `t^2+2t` over `F_3`; coefficients of
    /// extension fields are printed as coordinate tuples `[c0 c1]`.
    pub fn render(&self, a: &Poly) -> String {
        if a.is_zero() {
            return "0".into();
        }
        let mut terms = Vec::new();
        for (i, &c) in a.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let coeff = if self.f.nu() == 1 {
                c.index().to_string()
            } else {
                let parts: Vec<String> = self.f.coords(c).iter().map(u32::to_string).collect();
                format!("[{}]", parts.join(" "))
            };
            let term = match (i, c == FqElem::ONE) {
                (0, _) => coeff,
                (1, true) => "t".into(),
                (1, false) => format!("{coeff}t"),
                (_, true) => format!("t^{i}"),
                (_, false) => format!("{coeff}t^{i}"),
            };
            terms.push(term);
        }
        terms.join("+")
    }

    /// Low-to-high coefficient encoding: integers for prime fields,
    /// coordinate lists otherwise.
    pub fn encode(&self, a: &Poly) -> Vec<Vec<u32>> {
        a.coeffs.iter().map(|&c| self.f.coords(c)).collect()
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInf => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}
