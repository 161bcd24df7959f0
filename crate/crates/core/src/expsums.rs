//! Quadratic Gauss sums, the sums `S_{a,r}(f)`, `S_r(f)`, `S(alpha)` and the
//! arc integrals `I_r`, each with a direct evaluator and a closed form.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::characters::{haar_integral, psi_functional, psi_rational, psi_tail_times, LaurentTail};
use crate::error::{Error, Result};
use crate::field::{FieldCtx, FqElem};
use crate::polyring::{Factorization, Poly, PolyRing};
use crate::{CycInt, ExponentTally, QScaled};

/// Discriminant class of a diagonal form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseTag {
    /// `n` even and `(-1)^{n/2} det` a square.
    SplitEven,
    /// `n` even and `(-1)^{n/2} det` a non-square.
    NonSplitEven,
    Odd,
}

impl CaseTag {
    pub fn name(self) -> &'static str {
        match self {
            CaseTag::SplitEven => "split_even",
            CaseTag::NonSplitEven => "nonsplit_even",
            CaseTag::Odd => "odd",
        }
    }

    /// The tags that occur for a given number of variables.
    pub fn for_n(n: usize) -> &'static [CaseTag] {
        if n % 2 == 0 {
            &[CaseTag::SplitEven, CaseTag::NonSplitEven]
        } else {
            &[CaseTag::Odd]
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Diagonal form `a_1 x_1^2 + ... + a_n x_n^2` with unit coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadForm {
    coeffs: Vec<FqElem>,
}

impl QuadForm {
    pub fn new(coeffs: Vec<FqElem>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidForm("at least one variable is required".into()));
        }
        if coeffs.iter().any(|c| c.is_zero()) {
            return Err(Error::InvalidForm("coefficients must be units".into()));
        }
        Ok(QuadForm { coeffs })
    }

    /// Form over the prime subfield from integer coefficients.
    pub fn from_ints(f: &FieldCtx, ints: &[i64]) -> Result<Self> {
        QuadForm::new(ints.iter().map(|&k| f.from_int(k)).collect())
    }

    /// A fixed form with the requested tag: all ones, with the last
    /// coefficient switched to a non-square when the tag demands it.
    pub fn representative(f: &FieldCtx, n: usize, tag: CaseTag) -> Result<Self> {
        if n == 0 || (n % 2 == 1) != (tag == CaseTag::Odd) {
            return Err(Error::InvalidForm(format!("no {tag} form with n = {n}")));
        }
        let mut form = QuadForm::new(vec![FqElem::ONE; n])?;
        if form.case_tag(f) != tag {
            let nonsquare = f
                .units()
                .find(|&a| !f.is_square_unit(a).expect("unit"))
                .expect("odd q has non-squares");
            form.coeffs[n - 1] = nonsquare;
        }
        debug_assert_eq!(form.case_tag(f), tag);
        Ok(form)
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[FqElem] {
        &self.coeffs
    }

    pub fn det(&self, f: &FieldCtx) -> FqElem {
        self.coeffs.iter().fold(FqElem::ONE, |acc, &c| f.mul(acc, c))
    }

    /// `(-1)^{n/2} det` for even `n`.
    pub fn signed_det(&self, f: &FieldCtx) -> FqElem {
        let d = self.det(f);
        if (self.n() / 2) % 2 == 1 {
            f.neg(d)
        } else {
            d
        }
    }

    pub fn case_tag(&self, f: &FieldCtx) -> CaseTag {
        if self.n() % 2 == 1 {
            CaseTag::Odd
        } else if f.is_square_unit(self.signed_det(f)).expect("det is a unit") {
            CaseTag::SplitEven
        } else {
            CaseTag::NonSplitEven
        }
    }
}

fn require_monic(r: &Poly) -> Result<usize> {
    if !r.is_monic() {
        return Err(Error::InvalidModulus);
    }
    Ok(r.degree().finite().expect("monic is nonzero"))
}

fn require_irreducible(ring: &PolyRing, w: &Poly, k: u32) -> Result<()> {
    if k == 0 {
        return Err(Error::OutOfRange("prime power exponent must be >= 1".into()));
    }
    if !w.is_monic() || !ring.is_irreducible(w) {
        return Err(Error::Reducible);
    }
    Ok(())
}

/// `tau_r = sum_{|x|<|r|} psi(x^2 / r)`.
pub fn gauss_sum_direct(f: &FieldCtx, r: &Poly) -> Result<CycInt> {
    s_quad_direct(f, &Poly::one(), r)
}

/// `tau_{w^k}` by the prime-power evaluation: `|w|^{k/2}` for even `k`, and
/// `tau_w |w|^{(k-1)/2}` for odd `k`.
pub fn gauss_sum_prime_power_closed(f: &FieldCtx, w: &Poly, k: u32) -> Result<CycInt> {
    let ring = f.poly_ring();
    require_irreducible(&ring, w, k)?;
    let d = w.degree().finite().expect("irreducible") as u32;
    let qpow = |e: u32| BigInt::from(f.q()).pow(e);
    if k % 2 == 0 {
        Ok(CycInt::from_int(f.p(), qpow(d * k / 2)))
    } else {
        Ok(gauss_sum_direct(f, w)?.scale(&qpow(d * (k - 1) / 2)))
    }
}

/// Distinct squares `x^2 mod r` with their multiplicities, shared by the
/// direct sums modulo a fixed `r`.
pub struct ResidueSquares {
    r: Poly,
    values: Vec<Vec<u32>>,
    mult: Vec<u64>,
}

impl ResidueSquares {
    pub fn new(f: &FieldCtx, r: &Poly) -> Result<Self> {
        let d = require_monic(r)?;
        let ring = f.poly_ring();
        let mut hist: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
        for x in ring.enumerate_below(d) {
            let sq = ring.rem(&ring.mul(&x, &x), r)?;
            let mut v: Vec<u32> = sq.coeffs().iter().map(|c| c.index()).collect();
            v.resize(d, 0);
            *hist.entry(v).or_default() += 1;
        }
        let (values, mult) = hist.into_iter().unzip();
        Ok(ResidueSquares { r: r.clone(), values, mult })
    }

    pub fn modulus(&self) -> &Poly {
        &self.r
    }

    /// `e_q`-exponents of `psi(a s / r)` for every distinct square `s`.
    fn phases(&self, f: &FieldCtx, a: &Poly) -> Vec<u32> {
        let c = psi_functional(f, a, &self.r).expect("monic");
        let p = f.p();
        let tables: Vec<Vec<u32>> = c
            .iter()
            .map(|&cj| f.elements().map(|e| f.char_exponent(f.mul(e, cj))).collect())
            .collect();
        self.values
            .iter()
            .map(|s| {
                s.iter()
                    .zip(&tables)
                    .map(|(&sj, t)| t[sj as usize])
                    .sum::<u32>()
                    % p
            })
            .collect()
    }

    /// `S_{a,r}`.
    pub fn s_quad(&self, f: &FieldCtx, a: &Poly) -> CycInt {
        let mut tally = ExponentTally::new(f.p());
        for (k, &m) in self.phases(f, a).into_iter().zip(&self.mult) {
            tally.push_many(k, m);
        }
        tally.to_cyc()
    }

    /// `S_{a,r}(f)`, summed over every tuple `b` grouped by the squares
    /// `b_i^2 mod r`.
    pub fn s_form(&self, f: &FieldCtx, form: &QuadForm, a: &Poly) -> CycInt {
        let ring = f.poly_ring();
        let p = f.p();
        let phases: Vec<Vec<u32>> = form
            .coeffs()
            .iter()
            .map(|&c| self.phases(f, &ring.scale(c, a)))
            .collect();
        let mut counts = vec![0u64; p as usize];
        let mut idx = vec![0usize; form.n()];
        loop {
            let k = idx.iter().zip(&phases).map(|(&i, ph)| ph[i]).sum::<u32>() % p;
            counts[k as usize] += idx.iter().map(|&i| self.mult[i]).product::<u64>();
            if !advance(&mut idx, self.values.len()) {
                break;
            }
        }
        CycInt::from_exponent_counts(p, &counts)
    }

    /// `S_{a,r}` for every residue `a` at once: the character transform of
    /// the square histogram over `F_q^d`, one coordinate at a time.
    pub fn s_quad_all(&self, f: &FieldCtx) -> QuadSpectrum {
        let q = f.q() as usize;
        let p = f.p() as usize;
        let d = self.r.degree().finite().expect("monic");
        let size = q.pow(d as u32);
        let mut grid = vec![0u64; size * p];
        for (v, &m) in self.values.iter().zip(&self.mult) {
            let at = v.iter().rev().fold(0usize, |acc, &c| acc * q + c as usize);
            grid[at * p] += m;
        }
        let phase: Vec<Vec<usize>> = f
            .elements()
            .map(|x| f.elements().map(|y| f.char_exponent(f.mul(x, y)) as usize).collect())
            .collect();
        let mut stride = 1;
        for _ in 0..d {
            let mut next = vec![0u64; size * p];
            for base in (0..size).filter(|i| (i / stride) % q == 0) {
                for (x, row) in phase.iter().enumerate() {
                    let src = &grid[(base + x * stride) * p..][..p];
                    if src.iter().all(|&c| c == 0) {
                        continue;
                    }
                    for (y, &k) in row.iter().enumerate() {
                        let dst = (base + y * stride) * p;
                        for (e, &c) in src.iter().enumerate() {
                            next[dst + (e + k) % p] += c;
                        }
                    }
                }
            }
            grid = next;
            stride *= q;
        }
        QuadSpectrum { r: self.r.clone(), q, p, grid }
    }

    /// `S_r(f)`.
    pub fn s_r_form(&self, f: &FieldCtx, form: &QuadForm) -> CycInt {
        let ring = f.poly_ring();
        let d = self.r.degree().finite().expect("monic");
        let mut total = CycInt::zero(f.p());
        for a in ring.enumerate_below(d).filter(|a| ring.coprime(a, &self.r)) {
            total += &self.s_form(f, form, &a);
        }
        total
    }
}

/// All `S_{a,r}` for a fixed `r`, indexed by the functional of `a`.
pub struct QuadSpectrum {
    r: Poly,
    q: usize,
    p: usize,
    grid: Vec<u64>,
}

impl QuadSpectrum {
    pub fn get(&self, f: &FieldCtx, a: &Poly) -> CycInt {
        let c = psi_functional(f, a, &self.r).expect("monic");
        let at = c.iter().rev().fold(0usize, |acc, e| acc * self.q + e.index() as usize);
        CycInt::from_exponent_counts(self.p as u32, &self.grid[at * self.p..][..self.p])
    }
}

/// `S_{a,r} = sum_{|x|<|r|} psi(a x^2 / r)`; `a` need not be coprime to `r`.
pub fn s_quad_direct(f: &FieldCtx, a: &Poly, r: &Poly) -> Result<CycInt> {
    Ok(ResidueSquares::new(f, r)?.s_quad(f, a))
}

/// `S_{a,w^k} = (a / w^k) tau_{w^k}` for `a` coprime to `w`.
pub fn s_quad_prime_power_closed(f: &FieldCtx, a: &Poly, w: &Poly, k: u32) -> Result<CycInt> {
    let ring = f.poly_ring();
    require_irreducible(&ring, w, k)?;
    if ring.rem(a, w)?.is_zero() {
        return Err(Error::NotCoprime);
    }
    let fac = Factorization { unit: FqElem::ONE, factors: vec![(w.clone(), k)] };
    let symbol = ring.jacobi_with(a, &fac)?;
    let tau = gauss_sum_prime_power_closed(f, w, k)?;
    Ok(if symbol == 1 { tau } else { -tau })
}

/// `S_{a,r}(f) = sum_{|b|<|r|} psi(a f(b) / r)` over all `b` in `(F_q[t]/r)^n`.
pub fn s_form_direct(f: &FieldCtx, form: &QuadForm, a: &Poly, r: &Poly) -> Result<CycInt> {
    Ok(ResidueSquares::new(f, r)?.s_form(f, form, a))
}

/// Odometer step over `[0, base)^n`; false once every tuple was visited.
fn advance(idx: &mut [usize], base: usize) -> bool {
    for slot in idx.iter_mut() {
        *slot += 1;
        if *slot < base {
            return true;
        }
        *slot = 0;
    }
    false
}

/// `S_r(f) = sum_{|a|<|r|, (a,r)=1} S_{a,r}(f)`.
pub fn s_r_form_direct(f: &FieldCtx, form: &QuadForm, r: &Poly) -> Result<CycInt> {
    Ok(ResidueSquares::new(f, r)?.s_r_form(f, form))
}

fn q_pow(q: u32, e: usize) -> BigInt {
    num_traits::pow(BigInt::from(q), e)
}

/// `phi(r) |r|^{n/2}` for `deg r * n` even.
fn phi_times_norm(f: &FieldCtx, fac: &Factorization, deg: usize, n: usize) -> BigInt {
    assert!(deg * n % 2 == 0, "|r|^(n/2) is not integral");
    BigInt::from(fac.euler_phi(f.q())) * q_pow(f.q(), deg * n / 2)
}

/// `S_{w^k}(f)` from the prime-power evaluation.
pub fn s_prime_power_form_closed(
    f: &FieldCtx,
    form: &QuadForm,
    w: &Poly,
    k: u32,
) -> Result<CycInt> {
    let ring = f.poly_ring();
    require_irreducible(&ring, w, k)?;
    let r = ring.pow(w, k);
    Ok(CycInt::from_int(f.p(), s_r_form_closed(f, form, &r)?))
}

/// `S_r(f)`: `((-1)^{n/2} det / r) phi(r) |r|^{n/2}` for even `n`; for odd
/// `n`, `phi(r) |r|^{n/2}` when `r` is a square and zero otherwise.
pub fn s_r_form_closed(f: &FieldCtx, form: &QuadForm, r: &Poly) -> Result<BigInt> {
    let deg = require_monic(r)?;
    let ring = f.poly_ring();
    let fac = ring.factorize(r)?;
    let n = form.n();
    if n % 2 == 0 {
        let base = phi_times_norm(f, &fac, deg, n);
        let disc = Poly::constant(form.signed_det(f));
        let symbol = ring.jacobi_with(&disc, &fac)?;
        Ok(base * symbol)
    } else if fac.is_square_part() {
        Ok(phi_times_norm(f, &fac, deg, n))
    } else {
        Ok(BigInt::zero())
    }
}

/// Per-coordinate tables of `a_i x^2` for every `x` of degree `< P`, each
/// stored as `2P - 1` coefficients.
pub(crate) fn square_tables(f: &FieldCtx, form: &QuadForm, big_p: usize) -> Vec<Vec<Vec<FqElem>>> {
    let ring = f.poly_ring();
    let width = (2 * big_p).saturating_sub(1);
    form.coeffs()
        .iter()
        .map(|&c| {
            ring.enumerate_below(big_p)
                .map(|x| {
                    let mut v = ring.scale(c, &ring.mul(&x, &x)).coeffs().to_vec();
                    v.resize(width, FqElem::ZERO);
                    v
                })
                .collect()
        })
        .collect()
}

/// `S(a/r + theta) = sum_{|x|<q^P} psi((a/r + theta) f(x))`.
pub fn exp_sum_s(
    f: &FieldCtx,
    form: &QuadForm,
    a: &Poly,
    r: &Poly,
    tail: &LaurentTail,
    big_p: usize,
) -> Result<CycInt> {
    require_monic(r)?;
    let ring = f.poly_ring();
    let tables = square_tables(f, form, big_p);
    let width = (2 * big_p).saturating_sub(1);
    let base = tables[0].len();
    let mut tally = ExponentTally::new(f.p());
    let mut idx = vec![0usize; form.n()];
    let mut acc = vec![FqElem::ZERO; width];
    loop {
        acc.iter_mut().for_each(|c| *c = FqElem::ZERO);
        for (table, &i) in tables.iter().zip(&idx) {
            for (s, &v) in acc.iter_mut().zip(&table[i]) {
                *s = f.add(*s, v);
            }
        }
        let value = Poly::from_coeffs(acc.clone());
        let k_rat = if a.is_zero() {
            0
        } else {
            psi_rational(f, &ring.mul(a, &value), r)?
        };
        let k_tail = psi_tail_times(f, tail, &value);
        tally.push((k_rat + k_tail) % f.p());
        if !advance(&mut idx, base) {
            break;
        }
    }
    Ok(tally.to_cyc())
}

/// `I_r = int_{|theta| < 1/(|r| q^P)} S(theta) dtheta`, by exact averaging
/// over tails of depth `2P - 1`.
pub fn i_r_direct(f: &FieldCtx, form: &QuadForm, r: &Poly, big_p: usize) -> Result<QScaled> {
    let rho = require_monic(r)?;
    if rho > big_p {
        return Err(Error::OutOfRange(format!("deg r = {rho} exceeds P = {big_p}")));
    }
    let m = -((rho + big_p) as i64);
    let one = Poly::one();
    let zero = Poly::zero();
    let depth = (2 * big_p).saturating_sub(1);
    haar_integral(f, m, depth, |tail| {
        exp_sum_s(f, form, &zero, &one, tail, big_p).expect("monic denominator")
    })
}

/// `I_r` in closed form: `q^{P(n-2)}` for `deg r = P`, otherwise
/// `|r|^n q^{n+1} q^{-2P} sum_{k=0}^{P-rho-1} q^{nk} S_{t^{P-rho-k-1}}(f)`.
pub fn i_r_closed(f: &FieldCtx, form: &QuadForm, r: &Poly, big_p: usize) -> Result<BigRational> {
    let rho = require_monic(r)?;
    if rho > big_p {
        return Err(Error::OutOfRange(format!("deg r = {rho} exceeds P = {big_p}")));
    }
    let q = f.q();
    let n = form.n();
    if rho == big_p {
        return Ok(BigRational::from_integer(q_pow(q, big_p * (n - 2))));
    }
    let mut sum = BigInt::zero();
    for k in 0..big_p - rho {
        let t_pow = Poly::monomial(FqElem::ONE, big_p - rho - k - 1);
        sum += q_pow(q, n * k) * s_r_form_closed(f, form, &t_pow)?;
    }
    let num = q_pow(q, rho * n + n + 1) * sum;
    Ok(BigRational::new(num, q_pow(q, 2 * big_p)))
}

/// `I_r` as an exact rational if its numerator is rational.
pub fn qscaled_rational(v: &QScaled) -> Result<BigRational> {
    v.to_rational()
        .ok_or_else(|| Error::NonIntegral("integral value is not rational".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use num_traits::One;

    fn f3() -> FieldCtx {
        FieldCtx::prime(3).unwrap()
    }

    fn poly(f: &FieldCtx, c: &[i64]) -> Poly {
        Poly::from_ints(f, c)
    }

    fn cyc(p: u32, c: &[i64]) -> CycInt {
        c.iter()
            .enumerate()
            .fold(CycInt::zero(p), |acc, (k, &v)| {
                acc + CycInt::zeta_pow(p, k as i64).scale(&BigInt::from(v))
            })
    }

    #[test]
    fn case_tags() {
        let f = f3();
        assert_eq!(QuadForm::from_ints(&f, &[1, 1, 1, 1]).unwrap().case_tag(&f), CaseTag::SplitEven);
        assert_eq!(
            QuadForm::from_ints(&f, &[1, 1, 1, 2]).unwrap().case_tag(&f),
            CaseTag::NonSplitEven
        );
        assert_eq!(QuadForm::from_ints(&f, &[1, 2, 1]).unwrap().case_tag(&f), CaseTag::Odd);
        assert!(QuadForm::from_ints(&f, &[1, 0]).is_err());
        assert!(QuadForm::new(vec![]).is_err());
        for q in [3, 5, 7] {
            let f = FieldCtx::prime(q).unwrap();
            for n in 1..=6 {
                for &tag in CaseTag::for_n(n) {
                    let form = QuadForm::representative(&f, n, tag).unwrap();
                    assert_eq!(form.case_tag(&f), tag);
                }
            }
        }
        assert!(QuadForm::representative(&f, 3, CaseTag::SplitEven).is_err());
    }

    #[test]
    fn gauss_sum_examples() {
        let f = f3();
        assert_eq!(gauss_sum_direct(&f, &Poly::one()).unwrap(), CycInt::one(3));
        let t = poly(&f, &[0, 1]);
        let tau_t = gauss_sum_direct(&f, &t).unwrap();
        assert_eq!(tau_t, cyc(3, &[1, 2]));
        let v = tau_t.eval::<f64>();
        assert!((v - Complex64::new(0.0, 3f64.sqrt())).norm() < 1e-9);
        assert_eq!(gauss_sum_direct(&f, &poly(&f, &[0, 0, 1])).unwrap(), CycInt::from_i64(3, 3));
        assert_eq!(gauss_sum_prime_power_closed(&f, &t, 2).unwrap(), CycInt::from_i64(3, 3));
        assert_eq!(gauss_sum_prime_power_closed(&f, &t, 1).unwrap(), tau_t);
        assert_eq!(
            gauss_sum_prime_power_closed(&f, &t, 3).unwrap(),
            tau_t.scale(&BigInt::from(3))
        );
        assert_eq!(
            gauss_sum_prime_power_closed(&f, &poly(&f, &[2, 0, 1]), 1),
            Err(Error::Reducible)
        );
        assert!(gauss_sum_direct(&f, &poly(&f, &[0, 2])).is_err());
    }

    #[test]
    fn s_quad_examples() {
        let f = f3();
        let t = poly(&f, &[0, 1]);
        let t2 = poly(&f, &[0, 0, 1]);
        assert_eq!(s_quad_direct(&f, &Poly::zero(), &t2).unwrap(), CycInt::from_i64(3, 9));
        assert_eq!(s_quad_direct(&f, &Poly::one(), &t).unwrap(), cyc(3, &[1, 2]));
        assert_eq!(s_quad_direct(&f, &poly(&f, &[2]), &t).unwrap(), cyc(3, &[1, 0, 2]));
        let two = poly(&f, &[2]);
        assert_eq!(s_quad_prime_power_closed(&f, &Poly::one(), &t, 2).unwrap(), CycInt::from_i64(3, 3));
        assert_eq!(s_quad_prime_power_closed(&f, &two, &t, 1).unwrap(), -cyc(3, &[1, 2]));
        assert_eq!(s_quad_prime_power_closed(&f, &two, &t, 2).unwrap(), CycInt::from_i64(3, 3));
        assert_eq!(s_quad_prime_power_closed(&f, &t, &t, 1), Err(Error::NotCoprime));
    }

    #[test]
    fn float_shadow() {
        // direct complex summation of the same character sums
        let f = FieldCtx::prime(5).unwrap();
        let ring = f.poly_ring();
        let zeta = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 5.0);
        for r in ring.enumerate_monic_up_to(2) {
            let d = r.degree().finite().unwrap();
            for a in ring.enumerate_below(d.max(1)) {
                let mut z = Complex64::new(0.0, 0.0);
                for x in ring.enumerate_below(d) {
                    let k = psi_rational(&f, &ring.mul(&a, &ring.mul(&x, &x)), &r).unwrap();
                    z += zeta.powu(k);
                }
                let exact = s_quad_direct(&f, &a, &r).unwrap().eval::<f64>();
                assert!((exact - z).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn spectrum_matches_single_sums() {
        for (p, nu) in [(3, 1), (5, 1), (3, 2)] {
            let f = FieldCtx::new(p, nu, None).unwrap();
            let ring = f.poly_ring();
            for r in ring.enumerate_monic_up_to(if nu == 1 { 3 } else { 2 }) {
                let d = r.degree().finite().unwrap();
                let squares = ResidueSquares::new(&f, &r).unwrap();
                let spectrum = squares.s_quad_all(&f);
                for a in ring.enumerate_below(d) {
                    assert_eq!(spectrum.get(&f, &a), squares.s_quad(&f, &a));
                }
            }
        }
    }

    #[test]
    fn s_form_examples() {
        let f = f3();
        let t = poly(&f, &[0, 1]);
        let f2 = QuadForm::from_ints(&f, &[1, 1]).unwrap();
        assert_eq!(s_form_direct(&f, &f2, &Poly::one(), &Poly::one()).unwrap(), CycInt::one(3));
        let tau = cyc(3, &[1, 2]);
        assert_eq!(s_form_direct(&f, &f2, &Poly::one(), &t).unwrap(), &tau * &tau);
        let f3form = QuadForm::from_ints(&f, &[1, 1, 1]).unwrap();
        assert_eq!(s_r_form_direct(&f, &f3form, &Poly::one()).unwrap(), CycInt::one(3));
        assert!(s_r_form_direct(&f, &f3form, &t).unwrap().is_zero());
        let f4 = QuadForm::from_ints(&f, &[1, 1, 1, 1]).unwrap();
        let s = s_r_form_direct(&f, &f4, &t).unwrap();
        assert_eq!(s.to_integer(), Some(BigInt::from(18)));
    }

    #[test]
    fn s_form_is_product() {
        let f = f3();
        let ring = f.poly_ring();
        for coeffs in [&[1][..], &[2, 1], &[1, 1, 2]] {
            let form = QuadForm::from_ints(&f, coeffs).unwrap();
            for r in ring.enumerate_monic_up_to(2) {
                let d = r.degree().finite().unwrap();
                for a in ring.enumerate_below(d).filter(|a| ring.coprime(a, &r)) {
                    let prod = form.coeffs().iter().fold(CycInt::one(3), |acc, &c| {
                        acc * s_quad_direct(&f, &ring.scale(c, &a), &r).unwrap()
                    });
                    assert_eq!(s_form_direct(&f, &form, &a, &r).unwrap(), prod);
                }
            }
        }
    }

    #[test]
    fn s_r_closed_examples() {
        let f = f3();
        let t = poly(&f, &[0, 1]);
        let f4 = QuadForm::from_ints(&f, &[1, 1, 1, 1]).unwrap();
        let f4n = QuadForm::from_ints(&f, &[1, 1, 1, 2]).unwrap();
        let f3form = QuadForm::from_ints(&f, &[1, 1, 1]).unwrap();
        assert_eq!(s_r_form_closed(&f, &f4, &Poly::one()).unwrap(), BigInt::one());
        assert_eq!(s_r_form_closed(&f, &f4, &t).unwrap(), BigInt::from(18));
        assert_eq!(s_r_form_closed(&f, &f4n, &t).unwrap(), BigInt::from(-18));
        assert_eq!(s_prime_power_form_closed(&f, &f4, &t, 1).unwrap(), CycInt::from_i64(3, 18));
        assert!(s_prime_power_form_closed(&f, &f3form, &t, 1).unwrap().is_zero());
        assert_eq!(
            s_prime_power_form_closed(&f, &f3form, &t, 2).unwrap(),
            CycInt::from_i64(3, 162)
        );
        let t2 = poly(&f, &[0, 0, 1]);
        assert_eq!(
            s_r_form_direct(&f, &f3form, &t2).unwrap(),
            CycInt::from_i64(3, 162)
        );
    }

    #[test]
    fn lemma_3_1_examples() {
        let f = f3();
        let t = poly(&f, &[0, 1]);
        let f2 = QuadForm::from_ints(&f, &[1, 1]).unwrap();
        let zero_tail = LaurentTail::zero();
        let s0 = exp_sum_s(&f, &f2, &Poly::zero(), &Poly::one(), &zero_tail, 1).unwrap();
        assert_eq!(s0, CycInt::from_i64(3, 9));
        let lhs = exp_sum_s(&f, &f2, &Poly::one(), &t, &zero_tail, 1).unwrap();
        let tau = cyc(3, &[1, 2]);
        assert_eq!(lhs, &tau * &tau);
        let tail = LaurentTail::from_pairs([(3, f.from_int(2))]).unwrap();
        let lhs = exp_sum_s(&f, &f2, &Poly::one(), &t, &tail, 1).unwrap();
        let s_theta = exp_sum_s(&f, &f2, &Poly::zero(), &Poly::one(), &tail, 1).unwrap();
        let s_ar = s_form_direct(&f, &f2, &Poly::one(), &t).unwrap();
        assert_eq!(lhs.scale(&BigInt::from(9)), s_ar * s_theta);
    }

    #[test]
    fn i_r_examples() {
        let f = f3();
        let f3form = QuadForm::from_ints(&f, &[1, 1, 1]).unwrap();
        let one = Poly::one();
        let direct = qscaled_rational(&i_r_direct(&f, &f3form, &one, 1).unwrap()).unwrap();
        assert_eq!(direct, BigRational::from_integer(9.into()));
        assert_eq!(i_r_closed(&f, &f3form, &one, 1).unwrap(), direct);
        let direct = qscaled_rational(&i_r_direct(&f, &f3form, &one, 2).unwrap()).unwrap();
        assert_eq!(direct, BigRational::from_integer(27.into()));
        assert_eq!(i_r_closed(&f, &f3form, &one, 2).unwrap(), direct);
        let t = poly(&f, &[0, 1]);
        assert_eq!(
            i_r_closed(&f, &f3form, &t, 1).unwrap(),
            BigRational::from_integer(3.into())
        );
        assert!(i_r_closed(&f, &f3form, &poly(&f, &[0, 0, 1]), 1).is_err());
        assert!(i_r_direct(&f, &f3form, &poly(&f, &[0, 0, 1]), 1).is_err());
    }
}
