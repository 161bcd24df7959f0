//! The finite field `F_q = F_p[u]/(m(u))` for odd `p`.
//!
//! Elements are stored as their index `c_0 + c_1 p + ... + c_{nu-1} p^{nu-1}`
//! where `c_i` are the coordinates in the power basis of the modulus. The
//! index order is also the order used for deterministic enumeration.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_Q: u64 = 1 << 16;

/// An element of `F_q`, identified by its power-basis coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FqElem(u32);

impl FqElem {
    pub const ZERO: FqElem = FqElem(0);
    pub const ONE: FqElem = FqElem(1);

    /// Index of the element in the canonical enumeration of `F_q`.
    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Unchecked construction from an index already known to be `< q`.
    #[inline]
    pub(crate) fn from_raw(idx: u32) -> FqElem {
        FqElem(idx)
    }
}

impl fmt::Display for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Arithmetic context for `F_{p^nu}`.
///
/// Immutable after construction; multiplication goes through exp/log tables
/// of a primitive element found while validating the modulus.
#[derive(Clone, Debug)]
pub struct FieldCtx {
    p: u32,
    nu: u32,
    q: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    trace: Vec<u32>,
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.nu == other.nu && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_divisors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2u32;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Schoolbook arithmetic in `F_p[u]/(m)` on coordinate vectors, used only
/// while building the tables.
struct SlowRing<'a> {
    p: u64,
    modulus: &'a [u32],
}

impl SlowRing<'_> {
    fn nu(&self) -> usize {
        self.modulus.len() - 1
    }

    fn decode(&self, idx: u32) -> Vec<u64> {
        let mut v = vec![0u64; self.nu()];
        let mut x = idx as u64;
        for c in v.iter_mut() {
            *c = x % self.p;
            x /= self.p;
        }
        v
    }

    fn encode(&self, v: &[u64]) -> u32 {
        v.iter().rev().fold(0u64, |acc, &c| acc * self.p + c) as u32
    }

    fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let nu = self.nu();
        let p = self.p;
        let mut prod = vec![0u64; 2 * nu];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        // reduce with the monic modulus, top degree down
        for k in (nu..2 * nu).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for (i, &m) in self.modulus[..nu].iter().enumerate() {
                let sub = c * m as u64 % p;
                prod[k - nu + i] = (prod[k - nu + i] + p - sub) % p;
            }
        }
        prod.truncate(nu);
        prod
    }

    fn pow(&self, a: &[u64], mut e: u64) -> Vec<u64> {
        let mut one = vec![0u64; self.nu()];
        one[0] = 1;
        let mut base = a.to_vec();
        let mut acc = one;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// A generator of the unit group, if the quotient ring is a field.
    fn primitive_element(&self, q: u32) -> Option<u32> {
        let order = q - 1;
        let primes = prime_divisors(order);
        let one = self.encode(&{
            let mut v = vec![0u64; self.nu()];
            v[0] = 1;
            v
        });
        (1..q).find(|&g| {
            let gv = self.decode(g);
            self.encode(&self.pow(&gv, order as u64)) == one
                && primes
                    .iter()
                    .all(|&l| self.encode(&self.pow(&gv, (order / l) as u64)) != one)
        })
    }
}

impl FieldCtx {
    /// Builds `F_{p^nu}`. Without an explicit modulus the smallest monic
    /// irreducible of degree `nu` in index order is used.
    ///
    /// `modulus` is a low-to-high coefficient list of length `nu + 1` with
    /// leading coefficient 1.
    pub fn new(p: u32, nu: u32, modulus: Option<&[u32]>) -> Result<Self> {
        if p % 2 == 0 {
            return Err(Error::InvalidField(format!(
                "characteristic {p} is even; odd p required"
            )));
        }
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if nu == 0 {
            return Err(Error::InvalidField("extension degree must be >= 1".into()));
        }
        let q = (p as u64)
            .checked_pow(nu)
            .filter(|&q| q <= MAX_Q)
            .ok_or_else(|| Error::InvalidField(format!("q = {p}^{nu} exceeds {MAX_Q}")))?
            as u32;

        let (modulus, generator) = match modulus {
            Some(m) => {
                if m.len() != nu as usize + 1 || m[nu as usize] != 1 {
                    return Err(Error::InvalidField(format!(
                        "modulus must be monic of degree {nu}"
                    )));
                }
                if m.iter().any(|&c| c >= p) {
                    return Err(Error::InvalidField("modulus coefficient out of range".into()));
                }
                let ring = SlowRing { p: p as u64, modulus: m };
                let g = ring.primitive_element(q).ok_or_else(|| {
                    Error::InvalidField("modulus is reducible over F_p".into())
                })?;
                (m.to_vec(), g)
            }
            None => {
                let nu_us = nu as usize;
                let mut found = None;
                for tail in 0..q {
                    let mut m: Vec<u32> = Vec::with_capacity(nu_us + 1);
                    let mut x = tail;
                    for _ in 0..nu_us {
                        m.push(x % p);
                        x /= p;
                    }
                    m.push(1);
                    let ring = SlowRing { p: p as u64, modulus: &m };
                    if let Some(g) = ring.primitive_element(q) {
                        found = Some((m, g));
                        break;
                    }
                }
                found.ok_or_else(|| Error::InvalidField("no irreducible modulus".into()))?
            }
        };

        let ring = SlowRing { p: p as u64, modulus: &modulus };
        let mut exp = vec![0u32; (q - 1) as usize];
        let mut log = vec![0u32; q as usize];
        let gv = ring.decode(generator);
        let mut cur = ring.decode(1);
        for (k, slot) in exp.iter_mut().enumerate() {
            let idx = ring.encode(&cur);
            *slot = idx;
            log[idx as usize] = k as u32;
            cur = ring.mul(&cur, &gv);
        }

        let mut ctx = FieldCtx {
            p,
            nu,
            q,
            modulus,
            exp,
            log,
            trace: Vec::new(),
        };
        ctx.trace = (0..q)
            .map(|a| {
                let mut acc = FqElem::ZERO;
                let mut x = FqElem(a);
                for _ in 0..nu {
                    acc = ctx.add(acc, x);
                    x = ctx.pow(x, p as u64);
                }
                debug_assert!(acc.0 < p, "trace must land in the prime field");
                acc.0
            })
            .collect();
        Ok(ctx)
    }

    /// The prime field `F_p`.
    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, 1, None)
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn nu(&self) -> u32 {
        self.nu
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    /// Low-to-high coefficients of the defining modulus.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = FqElem> + Clone {
        (0..self.q).map(FqElem)
    }

    /// Nonzero elements in index order.
    pub fn units(&self) -> impl Iterator<Item = FqElem> + Clone {
        (1..self.q).map(FqElem)
    }

    /// Element from its index; `None` if out of range.
    pub fn from_index(&self, idx: u32) -> Option<FqElem> {
        (idx < self.q).then_some(FqElem(idx))
    }

    /// Element with the given power-basis coordinates (missing ones are 0).
    pub fn elem(&self, coords: &[u32]) -> Result<FqElem> {
        if coords.len() > self.nu as usize || coords.iter().any(|&c| c >= self.p) {
            return Err(Error::InvalidField(format!(
                "coordinates {coords:?} do not describe an element of F_{}",
                self.q
            )));
        }
        let idx = coords
            .iter()
            .rev()
            .fold(0u32, |acc, &c| acc * self.p + c);
        Ok(FqElem(idx))
    }

    /// The image of an integer in the prime subfield.
    pub fn from_int(&self, k: i64) -> FqElem {
        FqElem(k.rem_euclid(self.p as i64) as u32)
    }

    /// Power-basis coordinates of `a`.
    pub fn coords(&self, a: FqElem) -> Vec<u32> {
        let mut v = Vec::with_capacity(self.nu as usize);
        let mut x = a.0;
        for _ in 0..self.nu {
            v.push(x % self.p);
            x /= self.p;
        }
        v
    }

    #[inline]
    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        if self.nu == 1 {
            let s = a.0 + b.0;
            return FqElem(if s >= self.p { s - self.p } else { s });
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u32;
        let mut scale = 1u32;
        for _ in 0..self.nu {
            let d = (x % self.p + y % self.p) % self.p;
            out += d * scale;
            scale *= self.p;
            x /= self.p;
            y /= self.p;
        }
        FqElem(out)
    }

    #[inline]
    pub fn neg(&self, a: FqElem) -> FqElem {
        if self.nu == 1 {
            return FqElem(if a.0 == 0 { 0 } else { self.p - a.0 });
        }
        let mut x = a.0;
        let mut out = 0u32;
        let mut scale = 1u32;
        for _ in 0..self.nu {
            let d = x % self.p;
            out += ((self.p - d) % self.p) * scale;
            scale *= self.p;
            x /= self.p;
        }
        FqElem(out)
    }

    #[inline]
    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        if a.0 == 0 || b.0 == 0 {
            return FqElem::ZERO;
        }
        let n = self.q - 1;
        let k = self.log[a.0 as usize] + self.log[b.0 as usize];
        FqElem(self.exp[(if k >= n { k - n } else { k }) as usize])
    }

    pub fn inv(&self, a: FqElem) -> Result<FqElem> {
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        let n = self.q - 1;
        let l = self.log[a.0 as usize];
        Ok(FqElem(self.exp[((n - l) % n) as usize]))
    }

    /// `a^e` with `0^0 = 1`.
    pub fn pow(&self, a: FqElem, e: u64) -> FqElem {
        if e == 0 {
            return FqElem::ONE;
        }
        if a.is_zero() {
            return FqElem::ZERO;
        }
        let n = (self.q - 1) as u64;
        let k = (self.log[a.0 as usize] as u64 * (e % n)) % n;
        FqElem(self.exp[k as usize])
    }

    /// `Tr_{F_q/F_p}(a)` as a residue in `[0, p)`.
    #[inline]
    pub fn trace(&self, a: FqElem) -> u32 {
        self.trace[a.0 as usize]
    }

    /// Exponent `k` with `e_q(a) = zeta_p^k`.
    #[inline]
    pub fn char_exponent(&self, a: FqElem) -> u32 {
        self.trace[a.0 as usize]
    }

    /// Euler's criterion on `F_q^x`: `a^{(q-1)/2} == 1`.
    pub fn is_square_unit(&self, a: FqElem) -> Result<bool> {
        if a.is_zero() {
            return Err(Error::ZeroSquareClass);
        }
        Ok(self.pow(a, ((self.q - 1) / 2) as u64) == FqElem::ONE)
    }

    /// A square root of a unit square (the one with smaller log).
    pub fn sqrt_unit(&self, a: FqElem) -> Option<FqElem> {
        if a.is_zero() {
            return Some(FqElem::ZERO);
        }
        let l = self.log[a.0 as usize];
        (l % 2 == 0).then(|| FqElem(self.exp[(l / 2) as usize]))
    }

    /// `(-1)^{(q-1)/2}`, i.e. whether `-1` is a square.
    pub fn minus_one_is_square(&self) -> bool {
        (self.q - 1) % 4 == 0
    }
}
