//! Closed-form point counts `N(P)`, primitive counts, morphism counts and the
//! helper sums over Euler's totient, in exact rational arithmetic.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::expsums::{i_r_closed, s_r_form_closed, CaseTag, QuadForm};
use crate::field::{FieldCtx, FqElem};

/// How a count was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    ExactFormula,
    CircleReassembly,
    BruteForce,
    Convolution,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::ExactFormula => "exact_formula",
            Method::CircleReassembly => "circle_reassembly",
            Method::BruteForce => "brute_force",
            Method::Convolution => "convolution",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One computed count together with its provenance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountReport {
    pub q: u32,
    pub n: usize,
    pub coeffs: Vec<FqElem>,
    pub case: CaseTag,
    pub big_p: usize,
    pub value: BigInt,
    pub method: Method,
    pub runtime_ms: u128,
}

pub fn classify(f: &FieldCtx, form: &QuadForm) -> CaseTag {
    form.case_tag(f)
}

/// Congruence diagonalization of a symmetric nondegenerate Gram matrix
/// (the form is `x^T G x`).
pub fn diagonalize(f: &FieldCtx, gram: &[Vec<FqElem>]) -> Result<QuadForm> {
    let n = gram.len();
    if n == 0 || gram.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidForm("Gram matrix must be square and nonempty".into()));
    }
    for i in 0..n {
        for j in 0..i {
            if gram[i][j] != gram[j][i] {
                return Err(Error::InvalidForm("Gram matrix must be symmetric".into()));
            }
        }
    }
    let mut g: Vec<Vec<FqElem>> = gram.to_vec();
    let mut diag = Vec::with_capacity(n);
    for i in 0..n {
        if g[i][i].is_zero() {
            if let Some(k) = (i + 1..n).find(|&k| !g[k][k].is_zero()) {
                g.swap(i, k);
                for row in g.iter_mut() {
                    row.swap(i, k);
                }
            } else if let Some(j) = (i + 1..n).find(|&j| !g[i][j].is_zero()) {
                // x_i -> x_i + x_j makes the pivot 2 g_ij, nonzero for odd q
                for k in 0..n {
                    g[i][k] = f.add(g[i][k], g[j][k]);
                }
                for k in 0..n {
                    g[k][i] = f.add(g[k][i], g[k][j]);
                }
            } else {
                return Err(Error::Degenerate);
            }
        }
        let pivot = g[i][i];
        let inv = f.inv(pivot)?;
        for k in i + 1..n {
            let factor = f.mul(g[k][i], inv);
            if factor.is_zero() {
                continue;
            }
            for l in i..n {
                g[k][l] = f.sub(g[k][l], f.mul(factor, g[i][l]));
            }
            for l in i..n {
                g[l][k] = f.sub(g[l][k], f.mul(factor, g[l][i]));
            }
        }
        diag.push(pivot);
    }
    QuadForm::new(diag)
}

fn qi(q: u32, e: usize) -> BigInt {
    num_traits::pow(BigInt::from(q), e)
}

/// `q^e` as a rational, `e` of either sign.
fn qr(q: u32, e: i64) -> BigRational {
    let base = BigRational::from_integer(qi(q, e.unsigned_abs() as usize));
    if e >= 0 {
        base
    } else {
        base.recip()
    }
}

fn int(k: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(k))
}

fn sign(k: usize) -> BigRational {
    if k % 2 == 0 {
        int(1)
    } else {
        int(-1)
    }
}

fn integral(v: BigRational, what: &str) -> Result<BigInt> {
    if v.is_integer() {
        Ok(v.to_integer())
    } else {
        Err(Error::NonIntegral(format!("{what} = {v}")))
    }
}

/// `sum_{deg r = rho, r monic} phi(r) = (q-1) q^{2 rho - 1}`, and `1` for
/// `rho = 0`.
pub fn phi_degree_sum(q: u32, rho: usize) -> BigInt {
    if rho == 0 {
        return BigInt::one();
    }
    BigInt::from(q - 1) * qi(q, 2 * rho - 1)
}

/// `sum_{|r| <= q^M, r monic} (+-1)^{deg r} phi(r) / |r|^c`.
pub fn phi_geometric_sum(q: u32, m: usize, c: i64, signed: bool) -> BigRational {
    let qq = int(q as i64);
    let q1 = int(q as i64 - 1);
    let mm = m as i64;
    match (signed, c == 2) {
        (false, true) => int(1) + &q1 / &qq * int(mm),
        (false, false) => {
            let den = int(1) - qr(q, 2 - c);
            (int(1) - qr(q, 1 - c)) / &den - q1 * qr(q, 1 - c) * qr(q, mm * (2 - c)) / den
        }
        (true, true) => {
            if m % 2 == 0 {
                int(1)
            } else {
                qr(q, -1)
            }
        }
        (true, false) => {
            let den = int(1) + qr(q, 2 - c);
            (int(1) + qr(q, 1 - c)) / &den
                + sign(m) * q1 * qr(q, 1 - c) * qr(q, mm * (2 - c)) / den
        }
    }
}

fn check_theorem_range(n: usize, big_p: usize) -> Result<()> {
    if n <= 2 {
        return Err(Error::Unsupported(format!("closed forms need n >= 3, got n = {n}")));
    }
    if big_p == 0 {
        return Err(Error::OutOfRange("P must be >= 1".into()));
    }
    Ok(())
}

fn check_tag(n: usize, tag: CaseTag) -> Result<()> {
    if (n % 2 == 1) != (tag == CaseTag::Odd) {
        return Err(Error::InvalidForm(format!("tag {tag} impossible for n = {n}")));
    }
    Ok(())
}

/// `N(P)` from the closed forms, as a rational before the integrality check.
fn n_closed_rational(q: u32, n: usize, tag: CaseTag, big_p: usize) -> BigRational {
    let qq = int(q as i64);
    let pp = int(big_p as i64);
    let ni = n as i64;
    let pi = big_p as i64;
    let q2m1 = int(q as i64 * q as i64 - 1);
    match (tag, n) {
        (CaseTag::SplitEven, 4) => &q2m1 / &qq * pp * qr(q, 2 * pi) + qr(q, 2 * pi),
        (CaseTag::SplitEven, _) => {
            let den = qr(q, ni / 2 - 1) - &qq;
            (qr(q, ni / 2) - int(1)) / &den * qr(q, pi * (ni - 2))
                - int(q as i64 - 1) * (qr(q, ni / 2 - 1) + int(1)) / den * qr(q, ni * pi / 2)
        }
        (CaseTag::NonSplitEven, 4) => {
            if big_p % 2 == 0 {
                qr(q, 2 * pi)
            } else {
                int(q as i64 * q as i64 - q as i64 + 1) / qq * qr(q, 2 * pi)
            }
        }
        (CaseTag::NonSplitEven, _) => {
            let den = qr(q, ni / 2 - 1) + &qq;
            (qr(q, ni / 2) + int(1)) / &den * qr(q, pi * (ni - 2))
                - sign(big_p) * int(q as i64 - 1) * (qr(q, ni / 2 - 1) - int(1)) / den
                    * qr(q, ni * pi / 2)
        }
        (CaseTag::Odd, 3) => {
            let lead = &q2m1 / (int(2) * &qq) * pp * qr(q, pi);
            if big_p % 2 == 0 {
                lead + qr(q, pi)
            } else {
                lead + int(q as i64 * q as i64 + 1) / (int(2) * qq) * qr(q, pi)
            }
        }
        (CaseTag::Odd, _) => {
            let den = qr(q, ni - 2) - &qq;
            let main = (qr(q, ni - 1) - int(1)) / &den * qr(q, pi * (ni - 2));
            let tail = qr(q, (ni - 1) * pi / 2);
            if big_p % 2 == 0 {
                main - int(q as i64 - 1) * (qr(q, ni - 2) + int(1)) / den * tail
            } else {
                main - q2m1 * qr(q, (ni - 3) / 2) / den * tail
            }
        }
    }
}

/// `N(P)` for given `(q, n, tag)`; counts depend on the form only through
/// these.
pub fn n_exact_params(q: u32, n: usize, tag: CaseTag, big_p: usize) -> Result<BigInt> {
    check_theorem_range(n, big_p)?;
    check_tag(n, tag)?;
    integral(n_closed_rational(q, n, tag, big_p), "N(P)")
}

/// `N(P) = #{x in F_q[t]^n : |x| < q^P, f(x) = 0}` from the closed forms.
pub fn n_exact(f: &FieldCtx, form: &QuadForm, big_p: usize) -> Result<BigInt> {
    n_exact_params(f.q(), form.n(), form.case_tag(f), big_p)
}

/// `sum_{deg r = rho, r monic} S_r(f) |r|^{-n} I_r`.
fn stratum(f: &FieldCtx, form: &QuadForm, rho: usize, big_p: usize) -> Result<BigRational> {
    let ring = f.poly_ring();
    let mut s_sum = BigInt::zero();
    for r in ring.enumerate_monic(rho) {
        s_sum += s_r_form_closed(f, form, &r)?;
    }
    let r0 = ring.enumerate_monic(rho).next().expect("q^rho >= 1 monic polynomials");
    let i_r = i_r_closed(f, form, &r0, big_p)?;
    Ok(BigRational::from_integer(s_sum) * i_r / BigRational::from_integer(qi(f.q(), rho * form.n())))
}

/// `N(P) = sum_{|r| <= q^P, r monic} S_r(f) |r|^{-n} I_r`, evaluated term by
/// term from the closed forms of `S_r(f)` and `I_r`.
pub fn n_circle(f: &FieldCtx, form: &QuadForm, big_p: usize) -> Result<BigInt> {
    let mut total = BigRational::zero();
    for rho in 0..=big_p {
        total += stratum(f, form, rho, big_p)?;
    }
    integral(total, "circle sum")
}

/// The arc sum over `|r| <= q^{P-1}` evaluated term by term.
pub fn low_arc_sum(f: &FieldCtx, form: &QuadForm, big_p: usize) -> Result<BigRational> {
    let mut total = BigRational::zero();
    for rho in 0..big_p {
        total += stratum(f, form, rho, big_p)?;
    }
    Ok(total)
}

/// The arc sum over `|r| <= q^{P-1}` from its closed forms.
pub fn low_arc_sum_closed(f: &FieldCtx, form: &QuadForm, big_p: usize) -> Result<BigRational> {
    low_arc_sum_closed_params(f.q(), form.n(), form.case_tag(f), big_p)
}

pub fn low_arc_sum_closed_params(
    q: u32,
    n: usize,
    tag: CaseTag,
    big_p: usize,
) -> Result<BigRational> {
    check_theorem_range(n, big_p)?;
    check_tag(n, tag)?;
    let qq = int(q as i64);
    let pp = int(big_p as i64);
    let ni = n as i64;
    let pi = big_p as i64;
    let q2m1 = int(q as i64 * q as i64 - 1);
    Ok(match (tag, n) {
        (CaseTag::SplitEven, 4) => &q2m1 / &qq * pp * qr(q, 2 * pi) + qr(q, 2 * pi - 1),
        (CaseTag::SplitEven, _) => {
            (qr(q, ni / 2) - int(1)) / (qr(q, ni / 2 - 1) - &qq) * qr(q, pi * (ni - 2))
                - &q2m1 / (&qq * (int(1) - qr(q, 2 - ni / 2))) * qr(q, ni * pi / 2)
        }
        (CaseTag::NonSplitEven, 4) => {
            if big_p % 2 == 0 {
                qr(q, 2 * pi - 1)
            } else {
                qr(q, 2 * pi + 1)
            }
        }
        (CaseTag::NonSplitEven, _) => {
            (qr(q, ni / 2) + int(1)) / (qr(q, ni / 2 - 1) + &qq) * qr(q, pi * (ni - 2))
                - sign(big_p) * &q2m1 / (&qq * (int(1) + qr(q, 2 - ni / 2)))
                    * qr(q, ni * pi / 2)
        }
        (CaseTag::Odd, 3) => {
            let lead = &q2m1 / (int(2) * &qq) * pp * qr(q, pi);
            if big_p % 2 == 0 {
                lead + qr(q, pi - 1)
            } else {
                lead + int(q as i64 * q as i64 + 1) / (int(2) * qq) * qr(q, pi)
            }
        }
        (CaseTag::Odd, _) => {
            let main = (&qq - qr(q, 2 - ni)) / (int(1) - qr(q, 3 - ni)) * qr(q, pi * (ni - 2));
            let den = qr(q, ni - 2) - &qq;
            let inner = if big_p % 2 == 0 {
                qr(q, ni - 3)
            } else {
                qr(q, (ni - 3) / 2)
            };
            main - q2m1 * inner / den * qr(q, (ni - 1) * pi / 2)
        }
    })
}

/// `N(P)` with the convention `N(0) = 1`.
fn n_or_base(q: u32, n: usize, tag: CaseTag, big_p: usize) -> Result<BigInt> {
    if big_p == 0 {
        Ok(BigInt::one())
    } else {
        n_exact_params(q, n, tag, big_p)
    }
}

/// `~N(P) = (N(P) - q N(P-1)) / (q - 1) + 1`.
pub fn primitive_from_counts(n_p: &BigInt, n_prev: &BigInt, q: u32) -> Result<BigInt> {
    let num = n_p - BigInt::from(q) * n_prev;
    let (quot, rem) = num.div_rem(&BigInt::from(q - 1));
    if !rem.is_zero() {
        return Err(Error::Inconsistent(format!("{num} is not divisible by q - 1")));
    }
    Ok(quot + 1)
}

/// Projective primitive count `~N(P)` from the closed forms.
pub fn n_primitive(f: &FieldCtx, form: &QuadForm, big_p: usize) -> Result<BigInt> {
    let (q, n, tag) = (f.q(), form.n(), form.case_tag(f));
    check_theorem_range(n, big_p)?;
    primitive_from_counts(
        &n_exact_params(q, n, tag, big_p)?,
        &n_or_base(q, n, tag, big_p - 1)?,
        q,
    )
}

/// `(N(P+1) - (q+1) N(P) + q N(P-1)) / (q - 1)`.
pub fn mor_from_counts(n_plus: &BigInt, n_0: &BigInt, n_minus: &BigInt, q: u32) -> Result<BigInt> {
    let qb = BigInt::from(q);
    let num: BigInt = n_plus - (&qb + 1u32) * n_0 + &qb * n_minus;
    let (quot, rem) = num.div_rem(&BigInt::from(q - 1));
    if !rem.is_zero() {
        return Err(Error::Inconsistent(format!("{num} is not divisible by q - 1")));
    }
    if quot.is_negative() {
        return Err(Error::Inconsistent(format!("negative morphism count {quot}")));
    }
    Ok(quot)
}

fn mor_closed_rational(q: u32, n: usize, tag: CaseTag, big_p: usize) -> BigRational {
    let qq = int(q as i64);
    let pp = int(big_p as i64);
    let ni = n as i64;
    let pi = big_p as i64;
    let q2m1 = int(q as i64 * q as i64 - 1);
    let q1 = int(q as i64 - 1);
    match (tag, n) {
        (CaseTag::SplitEven, 4) => {
            let q2 = qr(q, 2);
            &q2m1 * &q2m1 / &q2 * pp * qr(q, 2 * pi)
                + &q2m1 * int((q as i64 + 1).pow(2)) / q2 * qr(q, 2 * pi)
        }
        (CaseTag::SplitEven, _) => {
            let a = (qr(q, ni / 2) - int(1)) * (qr(q, ni - 2) - int(1)) * (qr(q, ni - 3) - int(1))
                / (qr(q, ni - 2) * (qr(q, ni / 2 - 2) - int(1)) * q1);
            let b = (qr(q, ni - 2) - int(1)) * (qr(q, ni / 2) - int(1))
                / (qr(q, ni / 2) * (qr(q, ni / 2 - 2) - int(1)));
            a * qr(q, pi * (ni - 2)) - b * qr(q, ni * pi / 2)
        }
        (CaseTag::NonSplitEven, 4) => {
            if big_p % 2 == 0 {
                (qr(q, 4) - int(1)) / qr(q, 2) * qr(q, 2 * pi)
            } else {
                BigRational::zero()
            }
        }
        (CaseTag::NonSplitEven, _) => {
            let a = (qr(q, ni / 2) + int(1)) * (qr(q, ni - 2) - int(1)) * (qr(q, ni - 3) - int(1))
                / (qr(q, ni - 2) * (qr(q, ni / 2 - 2) + int(1)) * q1);
            let b = (qr(q, ni - 2) - int(1)) * (qr(q, ni / 2) + int(1))
                / (qr(q, ni / 2) * (qr(q, ni / 2 - 2) + int(1)));
            a * qr(q, pi * (ni - 2)) + sign(big_p) * b * qr(q, ni * pi / 2)
        }
        (CaseTag::Odd, 3) => {
            if big_p % 2 == 0 {
                q2m1 / qq * qr(q, pi)
            } else {
                BigRational::zero()
            }
        }
        (CaseTag::Odd, _) => {
            let main = (qr(q, ni - 1) - int(1)) * (qr(q, ni - 2) - int(1)) / (qr(q, ni - 2) * q1)
                * qr(q, pi * (ni - 2));
            if big_p % 2 == 0 {
                main
            } else {
                main - (qr(q, ni - 1) - int(1)) / qr(q, (ni - 1) / 2) * qr(q, (ni - 1) * pi / 2)
            }
        }
    }
}

pub fn mor_exact_params(q: u32, n: usize, tag: CaseTag, big_p: usize) -> Result<BigInt> {
    check_theorem_range(n, big_p)?;
    check_tag(n, tag)?;
    integral(mor_closed_rational(q, n, tag, big_p), "#Mor_P")
}

/// `#Mor_P(P^1, X)(F_q)` from the closed forms.
pub fn mor_exact(f: &FieldCtx, form: &QuadForm, big_p: usize) -> Result<BigInt> {
    mor_exact_params(f.q(), form.n(), form.case_tag(f), big_p)
}

/// `#Mor_P` by inserting closed-form `N` values into the difference identity.
pub fn mor_via_counts(f: &FieldCtx, form: &QuadForm, big_p: usize) -> Result<BigInt> {
    let (q, n, tag) = (f.q(), form.n(), form.case_tag(f));
    check_theorem_range(n, big_p)?;
    mor_from_counts(
        &n_exact_params(q, n, tag, big_p + 1)?,
        &n_exact_params(q, n, tag, big_p)?,
        &n_or_base(q, n, tag, big_p - 1)?,
        q,
    )
}
