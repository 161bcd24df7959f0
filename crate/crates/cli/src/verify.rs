//! Verification suites: every closed form against its direct evaluator or
//! an enumeration oracle, one [`Check`] per identity instance.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use qcircle::characters::LaurentTail;
use qcircle::expsums::{
    exp_sum_s, gauss_sum_prime_power_closed, i_r_closed, i_r_direct, qscaled_rational,
    s_quad_prime_power_closed, s_r_form_closed, s_form_direct, ResidueSquares,
};
use qcircle::formulas::{
    mor_exact, mor_from_counts, mor_via_counts, n_circle, n_exact, phi_degree_sum,
    phi_geometric_sum,
};
use qcircle::oracle::{brute_mor, count_n};
use qcircle::{CaseTag, CycInt, Error, FieldCtx, FqElem, Poly, QuadForm};

use crate::CliError;

pub const SUITES: [&str; 7] = ["gauss", "srf", "lemma31", "lemma32", "counts", "mor", "phis"];

/// Parameter caps; unset caps take per-suite defaults.
#[derive(Clone, Debug, Serialize)]
pub struct Bounds {
    pub q: u32,
    pub maxdeg: Option<usize>,
    pub maxk: Option<u32>,
    pub nmax: Option<usize>,
    pub pmax: Option<usize>,
    pub n: Option<usize>,
    pub mmax: Option<usize>,
    #[serde(skip)]
    pub budget: u128,
}

impl Bounds {
    pub fn new(q: u32) -> Self {
        Bounds {
            q,
            maxdeg: None,
            maxk: None,
            nmax: None,
            pmax: None,
            n: None,
            mmax: None,
            budget: qcircle::oracle::default_budget(),
        }
    }

    /// Values of `n` to test: `--n` alone if given, else `lo..=nmax`.
    fn ns(&self, lo: usize, nmax: usize) -> Vec<usize> {
        match self.n {
            Some(n) => vec![n],
            None => (lo..=self.nmax.unwrap_or(nmax)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub check: String,
    pub case: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

impl Check {
    fn eq<T: PartialEq + ToString>(check: &str, case: String, expected: &T, actual: &T) -> Check {
        Check {
            check: check.into(),
            case,
            expected: expected.to_string(),
            actual: actual.to_string(),
            pass: expected == actual,
        }
    }
}

/// `q = p^nu` with the default modulus.
pub fn field_for_q(q: u32) -> Result<FieldCtx, CliError> {
    let p = (2..=q)
        .find(|d| q % d == 0)
        .ok_or_else(|| CliError::Usage(format!("q = {q} is not a prime power")))?;
    let mut nu = 0;
    let mut rest = q;
    while rest % p == 0 {
        rest /= p;
        nu += 1;
    }
    if rest != 1 {
        return Err(CliError::Usage(format!("q = {q} is not a prime power")));
    }
    Ok(FieldCtx::new(p, nu, None)?)
}

pub fn run_suite(name: &str, b: &Bounds) -> Result<Vec<Check>, CliError> {
    let f = field_for_q(b.q)?;
    let checks = match name {
        "gauss" => gauss(&f, b)?,
        "srf" => srf(&f, b)?,
        "lemma31" => lemma31(&f, b)?,
        "lemma32" => lemma32(&f, b)?,
        "counts" => counts(&f, b)?,
        "mor" => mor(&f, b)?,
        "phis" => phis(&f, b)?,
        other => {
            return Err(CliError::Usage(format!(
                "unknown suite '{other}' (expected one of {})",
                SUITES.join(", ")
            )))
        }
    };
    Ok(checks)
}

fn forms(f: &FieldCtx, n: usize) -> Result<Vec<QuadForm>, Error> {
    CaseTag::for_n(n)
        .iter()
        .map(|&tag| QuadForm::representative(f, n, tag))
        .collect()
}

fn form_label(f: &FieldCtx, form: &QuadForm) -> String {
    let cs: Vec<String> = form.coeffs().iter().map(|&c| crate::jobs::render_elem(f, c)).collect();
    format!("n={} {} [{}]", form.n(), form.case_tag(f), cs.join(","))
}

fn gauss(f: &FieldCtx, b: &Bounds) -> Result<Vec<Check>, CliError> {
    let ring = f.poly_ring();
    let mut out = Vec::new();
    for d in 1..=b.maxdeg.unwrap_or(2) {
        for w in ring.enumerate_monic(d).filter(|w| ring.is_irreducible(w)) {
            for k in 1..=b.maxk.unwrap_or(3) {
                let r = ring.pow(&w, k);
                let squares = ResidueSquares::new(f, &r)?;
                let case = format!("w={} k={k}", ring.render(&w));
                let closed = gauss_sum_prime_power_closed(f, &w, k)?;
                out.push(Check::eq("tau", case.clone(), &closed, &squares.s_quad(f, &Poly::one())));
                let residues: Vec<Poly> = ring
                    .enumerate_below(d * k as usize)
                    .filter(|a| ring.coprime(a, &w))
                    .collect();
                let spectrum = squares.s_quad_all(f);
                let mismatched = residues
                    .par_iter()
                    .map(|a| {
                        let closed = s_quad_prime_power_closed(f, a, &w, k)?;
                        Ok(usize::from(closed != spectrum.get(f, a)))
                    })
                    .sum::<Result<usize, Error>>()?;
                out.push(Check::eq(
                    "s_quad",
                    case,
                    &format!("{} agree", residues.len()),
                    &format!("{} agree", residues.len() - mismatched),
                ));
            }
        }
    }
    Ok(out)
}

fn srf(f: &FieldCtx, b: &Bounds) -> Result<Vec<Check>, CliError> {
    let ring = f.poly_ring();
    let maxdeg = b.maxdeg.unwrap_or(2);
    let moduli: Vec<Poly> = ring.enumerate_monic_up_to(maxdeg).collect();
    let mut out = Vec::new();
    for n in b.ns(1, 4) {
        for form in forms(f, n)? {
            let label = form_label(f, &form);
            let mut direct: BTreeMap<Poly, CycInt> = BTreeMap::new();
            let mut direct_of = |r: &Poly| -> Result<CycInt, Error> {
                if let Some(v) = direct.get(r) {
                    return Ok(v.clone());
                }
                let v = ResidueSquares::new(f, r)?.s_r_form(f, &form);
                direct.insert(r.clone(), v.clone());
                Ok(v)
            };
            for r in &moduli {
                let case = format!("{label} r={}", ring.render(r));
                let closed = CycInt::from_int(f.p(), s_r_form_closed(f, &form, r)?);
                let value = direct_of(r)?;
                out.push(Check::eq("theorem", case.clone(), &closed, &value));
                if n % 2 == 1 && !ring.factorize(r)?.is_square_part() {
                    out.push(Check::eq("odd_vanishing", case, &CycInt::zero(f.p()), &value));
                }
            }
            for (i, r1) in moduli.iter().enumerate().filter(|(_, r)| !r.is_one()) {
                for r2 in moduli[i + 1..].iter().filter(|r| ring.coprime(r1, r)) {
                    let r12 = ring.mul(r1, r2);
                    let case = format!("{label} r1={} r2={}", ring.render(r1), ring.render(r2));
                    let closed = s_r_form_closed(f, &form, r1)? * s_r_form_closed(f, &form, r2)?;
                    out.push(Check::eq(
                        "multiplicative_closed",
                        case.clone(),
                        &closed,
                        &s_r_form_closed(f, &form, &r12)?,
                    ));
                    let product = direct_of(r1)? * direct_of(r2)?;
                    out.push(Check::eq("multiplicative_direct", case, &product, &direct_of(&r12)?));
                }
            }
        }
    }
    Ok(out)
}

/// Tails supported on `t^{-i}` for `lo <= i <= hi`.
fn tails(f: &FieldCtx, lo: usize, hi: usize) -> Vec<LaurentTail> {
    let mut out = vec![LaurentTail::zero()];
    for i in lo..=hi {
        out = out
            .into_iter()
            .flat_map(|t| {
                f.elements().map(move |c| {
                    let mut e = t.entries().to_vec();
                    e.resize(i, FqElem::ZERO);
                    e[i - 1] = c;
                    LaurentTail::from_vec(e)
                })
            })
            .collect();
    }
    out
}

fn lemma31(f: &FieldCtx, b: &Bounds) -> Result<Vec<Check>, CliError> {
    let ring = f.poly_ring();
    let mut out = Vec::new();
    let qb = BigInt::from(f.q());
    for n in b.ns(1, 3) {
        for form in forms(f, n)? {
            let label = form_label(f, &form);
            for big_p in 1..=b.pmax.unwrap_or(2) {
                for r in ring.enumerate_monic_up_to(big_p) {
                    let rho = r.degree().finite().expect("monic");
                    // |theta| < 1/(|r| q^P); one index past the depth 2P-1
                    let thetas = tails(f, rho + big_p + 1, 2 * big_p);
                    let scale = qb.pow((rho * n) as u32);
                    for a in ring.enumerate_below(rho).filter(|a| ring.coprime(a, &r)) {
                        let s_ar = s_form_direct(f, &form, &a, &r)?;
                        for theta in &thetas {
                            let lhs = exp_sum_s(f, &form, &a, &r, theta, big_p)?;
                            let s_theta = exp_sum_s(f, &form, &Poly::zero(), &Poly::one(), theta, big_p)?;
                            let case = format!(
                                "{label} P={big_p} r={} a={} theta={:?}",
                                ring.render(&r),
                                ring.render(&a),
                                theta.entries().iter().map(|c| c.index()).collect::<Vec<_>>()
                            );
                            out.push(Check::eq("lemma31", case, &(&s_ar * &s_theta), &lhs.scale(&scale)));
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

fn lemma32(f: &FieldCtx, b: &Bounds) -> Result<Vec<Check>, CliError> {
    let ring = f.poly_ring();
    let mut out = Vec::new();
    for n in b.ns(2, 4) {
        for form in forms(f, n)? {
            let label = form_label(f, &form);
            for big_p in 1..=b.pmax.unwrap_or(2) {
                for r in ring.enumerate_monic_up_to(big_p) {
                    let direct = qscaled_rational(&i_r_direct(f, &form, &r, big_p)?)?;
                    let closed = i_r_closed(f, &form, &r, big_p)?;
                    let case = format!("{label} P={big_p} r={}", ring.render(&r));
                    out.push(Check::eq("i_r", case, &closed, &direct));
                }
            }
        }
    }
    Ok(out)
}

fn counts(f: &FieldCtx, b: &Bounds) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    for n in b.ns(3, 4) {
        for form in forms(f, n)? {
            let label = form_label(f, &form);
            for big_p in 1..=b.pmax.unwrap_or(2) {
                let exact = n_exact(f, &form, big_p)?;
                let (oracle, method) = count_n(f, &form, big_p, b.budget)?;
                let circle = n_circle(f, &form, big_p)?;
                let case = format!("{label} P={big_p}");
                out.push(Check::eq(method.name(), case.clone(), &exact, &oracle));
                out.push(Check::eq("circle_reassembly", case, &exact, &circle));
            }
        }
    }
    Ok(out)
}

/// `Mor_P` by enumeration, or from convolution counts past the budget.
pub fn oracle_mor(f: &FieldCtx, form: &QuadForm, big_p: usize, budget: u128) -> Result<BigInt, Error> {
    match brute_mor(f, form, big_p, budget) {
        Err(Error::BudgetExceeded { .. }) => {
            let n = |p| count_n(f, form, p, budget).map(|(v, _)| v);
            mor_from_counts(&n(big_p + 1)?, &n(big_p)?, &n(big_p - 1)?, f.q())
        }
        other => other,
    }
}

fn mor(f: &FieldCtx, b: &Bounds) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    for n in b.ns(3, 4) {
        for form in forms(f, n)? {
            let label = form_label(f, &form);
            for big_p in 1..=b.pmax.unwrap_or(2) {
                let case = format!("{label} P={big_p}");
                let exact = mor_exact(f, &form, big_p)?;
                let oracle = oracle_mor(f, &form, big_p, b.budget)?;
                out.push(Check::eq("oracle", case.clone(), &exact, &oracle));
                out.push(Check::eq(
                    "difference_identity",
                    case.clone(),
                    &exact,
                    &mor_via_counts(f, &form, big_p)?,
                ));
                let vanishing = big_p % 2 == 1
                    && (n == 3 || (n == 4 && form.case_tag(f) == CaseTag::NonSplitEven));
                if vanishing {
                    let zero = BigInt::zero();
                    out.push(Check::eq("parity_exact", case.clone(), &zero, &exact));
                    out.push(Check::eq("parity_oracle", case, &zero, &oracle));
                }
            }
        }
    }
    Ok(out)
}

fn phis(f: &FieldCtx, b: &Bounds) -> Result<Vec<Check>, CliError> {
    let ring = f.poly_ring();
    let q = f.q();
    let maxdeg = b.maxdeg.unwrap_or(3);
    let mmax = b.mmax.unwrap_or(4);
    let mut phi_sums = Vec::new();
    let mut out = Vec::new();
    for rho in 0..=maxdeg.max(mmax) {
        let mut phi = BigInt::zero();
        let mut mu = 0i64;
        for r in ring.enumerate_monic(rho) {
            let fac = ring.factorize(&r)?;
            phi += BigInt::from(fac.euler_phi(q));
            mu += fac.moebius() as i64;
        }
        if rho <= maxdeg {
            let case = format!("q={q} rho={rho}");
            out.push(Check::eq("phi_degree_sum", case.clone(), &phi, &phi_degree_sum(q, rho)));
            let expect = match rho {
                0 => 1,
                1 => -(q as i64),
                _ => 0,
            };
            out.push(Check::eq("moebius_degree_sum", case, &expect, &mu));
        }
        phi_sums.push(phi);
    }
    let qb = BigInt::from(q);
    for signed in [false, true] {
        for c in 1..=4i64 {
            for m in 0..=mmax {
                let brute = (0..=m).fold(BigRational::zero(), |acc, rho| {
                    let sign = if signed && rho % 2 == 1 { -BigInt::one() } else { BigInt::one() };
                    let den = qb.pow(c as u32 * rho as u32);
                    acc + BigRational::new(sign * &phi_sums[rho], den)
                });
                let case = format!("q={q} c={c} M={m} signed={signed}");
                out.push(Check::eq("phi_geometric_sum", case, &brute, &phi_geometric_sum(q, m, c, signed)));
            }
        }
    }
    Ok(out)
}
