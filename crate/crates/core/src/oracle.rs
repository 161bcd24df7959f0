//! Ground-truth counters: exhaustive enumeration and a histogram
//! convolution over the additive group of truncated polynomials.

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expsums::QuadForm;
use crate::field::{FieldCtx, FqElem};
use crate::formulas::Method;
use crate::polyring::Poly;

/// Default cap on enumerated tuples.
pub const DEFAULT_BUDGET: u128 = 100_000_000;
/// Default cap on convolution counters.
pub const DEFAULT_MEMORY: u128 = 1 << 26;
/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "QCIRCLE_BUDGET";

/// Which solutions to count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolutionFilter {
    All,
    Primitive,
}

/// Parses `100000000` or `1e8`.
pub fn parse_budget(s: &str) -> Option<u128> {
    let s = s.trim();
    s.parse::<u128>().ok().or_else(|| {
        let v: f64 = s.parse().ok()?;
        (v.is_finite() && v >= 0.0).then_some(v as u128)
    })
}

/// The enumeration budget, honouring the environment override.
pub fn default_budget() -> u128 {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|s| parse_budget(&s))
        .unwrap_or(DEFAULT_BUDGET)
}

fn tuple_count(q: u32, n: usize, big_p: usize) -> u128 {
    (q as u128).checked_pow((n * big_p) as u32).unwrap_or(u128::MAX)
}

fn check_budget(needed: u128, budget: u128) -> Result<()> {
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(())
}

/// Packed `F_p` digit vectors in 8-bit lanes, added lane-wise mod `p`.
#[derive(Clone, Copy)]
struct Swar {
    p: u64,
    ones: u64,
    bias: u64,
}

impl Swar {
    fn new(p: u32, lanes: usize) -> Self {
        let ones = (0..lanes).fold(0u64, |acc, i| acc | 1 << (8 * i));
        Swar {
            p: p as u64,
            ones,
            bias: (128 - p as u64) * ones,
        }
    }

    #[inline(always)]
    fn add(self, a: u64, b: u64) -> u64 {
        let t = a + b;
        let ge = ((t + self.bias) >> 7) & self.ones;
        t - ge * self.p
    }
}

/// Coefficient vector of `a x^2` (degree `< 2P - 1`) for each `x` of
/// degree `< P`, as `F_p` digits.
fn digit_tables(f: &FieldCtx, form: &QuadForm, big_p: usize) -> Vec<Vec<Vec<u32>>> {
    let ring = f.poly_ring();
    let width = (2 * big_p).saturating_sub(1);
    form.coeffs()
        .iter()
        .map(|&c| {
            ring.enumerate_below(big_p)
                .map(|x| {
                    let v = ring.scale(c, &ring.mul(&x, &x));
                    (0..width).flat_map(|k| f.coords(v.coeff(k))).collect()
                })
                .collect()
        })
        .collect()
}

/// For each `x` of degree `< P`: bit `j` set iff the `j`-th monic irreducible
/// of degree `< P` divides `x`; the zero polynomial has every bit set, plus
/// bit 127 so that the all-zero tuple is never primitive.
fn divisor_masks(f: &FieldCtx, big_p: usize) -> Option<Vec<u128>> {
    let ring = f.poly_ring();
    let irreducibles: Vec<Poly> = ring
        .enumerate_monic_up_to(big_p.saturating_sub(1))
        .filter(|w| ring.is_irreducible(w))
        .collect();
    if irreducibles.len() > 127 {
        return None;
    }
    Some(
        ring.enumerate_below(big_p)
            .map(|x| {
                if x.is_zero() {
                    return u128::MAX;
                }
                irreducibles
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| ring.rem(&x, w).expect("monic").is_zero())
                    .fold(0u128, |m, (j, _)| m | 1 << j)
            })
            .collect(),
    )
}

struct Enumerator<'a> {
    swar: Swar,
    /// `vals[i][x]`: packed value of `a_i x^2`.
    vals: Vec<Vec<u64>>,
    masks: Option<&'a [u128]>,
}

impl Enumerator<'_> {
    fn count(&self, level: usize, partial: u64, mask: u128) -> u64 {
        let row = &self.vals[level];
        if level + 1 == self.vals.len() {
            let mut hits = 0u64;
            match self.masks {
                None => {
                    for &v in row {
                        hits += (self.swar.add(partial, v) == 0) as u64;
                    }
                }
                Some(masks) => {
                    for (x, &v) in row.iter().enumerate() {
                        if self.swar.add(partial, v) == 0 && mask & masks[x] == 0 {
                            hits += 1;
                        }
                    }
                }
            }
            return hits;
        }
        row.iter()
            .enumerate()
            .map(|(x, &v)| {
                let m = self.masks.map_or(0, |ms| mask & ms[x]);
                self.count(level + 1, self.swar.add(partial, v), m)
            })
            .sum()
    }

    fn count_all(&self) -> u64 {
        let first = &self.vals[0];
        if self.vals.len() == 1 {
            return match self.masks {
                None => first.iter().filter(|&&v| v == 0).count() as u64,
                Some(ms) => first
                    .iter()
                    .zip(ms)
                    .filter(|(&v, &m)| v == 0 && m == 0)
                    .count() as u64,
            };
        }
        (0..first.len())
            .into_par_iter()
            .map(|x| {
                let m = self.masks.map_or(0, |ms| ms[x]);
                self.count(1, first[x], m)
            })
            .sum()
    }
}

/// Exhaustive count over `(F_q[t]_{<P})^n`, SWAR fast path when every digit
/// fits a lane.
fn enumerate(
    f: &FieldCtx,
    form: &QuadForm,
    big_p: usize,
    filter: SolutionFilter,
    budget: u128,
) -> Result<u64> {
    check_budget(tuple_count(f.q(), form.n(), big_p), budget)?;
    if big_p == 0 {
        return Ok(match filter {
            SolutionFilter::All => 1,
            SolutionFilter::Primitive => 0,
        });
    }
    let tables = digit_tables(f, form, big_p);
    let lanes = tables[0][0].len();
    let masks = match filter {
        SolutionFilter::All => None,
        SolutionFilter::Primitive => divisor_masks(f, big_p),
    };
    if f.p() < 128 && lanes <= 8 && (filter == SolutionFilter::All || masks.is_some()) {
        let pack = |digits: &Vec<u32>| {
            digits
                .iter()
                .enumerate()
                .fold(0u64, |acc, (i, &d)| acc | (d as u64) << (8 * i))
        };
        let e = Enumerator {
            swar: Swar::new(f.p(), lanes),
            vals: tables.iter().map(|t| t.iter().map(pack).collect()).collect(),
            masks: masks.as_deref(),
        };
        return Ok(e.count_all());
    }
    Ok(enumerate_generic(f, form, big_p, filter))
}

/// Slow path on polynomials, for wide digit vectors or many small primes.
fn enumerate_generic(f: &FieldCtx, form: &QuadForm, big_p: usize, filter: SolutionFilter) -> u64 {
    let ring = f.poly_ring();
    let xs: Vec<Poly> = ring.enumerate_below(big_p).collect();
    let terms: Vec<Vec<Poly>> = form
        .coeffs()
        .iter()
        .map(|&c| xs.iter().map(|x| ring.scale(c, &ring.mul(x, x))).collect())
        .collect();
    let n = form.n();
    let base = xs.len();
    (0..base)
        .into_par_iter()
        .map(|x0| {
            let mut idx = vec![0usize; n];
            idx[0] = x0;
            let mut hits = 0u64;
            loop {
                let value = idx
                    .iter()
                    .enumerate()
                    .fold(Poly::zero(), |acc, (i, &x)| ring.add(&acc, &terms[i][x]));
                if value.is_zero() {
                    let keep = match filter {
                        SolutionFilter::All => true,
                        SolutionFilter::Primitive => idx
                            .iter()
                            .map(|&x| &xs[x])
                            .filter(|x| !x.is_zero())
                            .try_fold(Poly::zero(), |g, x| ring.gcd(&g, x))
                            .map(|g| g.is_one())
                            .unwrap_or(false),
                    };
                    hits += keep as u64;
                }
                if !advance_tail(&mut idx, base) {
                    break;
                }
            }
            hits
        })
        .sum()
}

/// Odometer over all slots except the first.
fn advance_tail(idx: &mut [usize], base: usize) -> bool {
    for slot in idx.iter_mut().skip(1) {
        *slot += 1;
        if *slot < base {
            return true;
        }
        *slot = 0;
    }
    false
}

/// `N(P)` by enumeration; `P = 0` gives 1.
pub fn brute_n(f: &FieldCtx, form: &QuadForm, big_p: usize, budget: u128) -> Result<BigInt> {
    enumerate(f, form, big_p, SolutionFilter::All, budget).map(BigInt::from)
}

/// `~N(P)`: primitive solutions counted up to the `q - 1` unit scalings.
pub fn brute_primitive(f: &FieldCtx, form: &QuadForm, big_p: usize, budget: u128) -> Result<BigInt> {
    if big_p == 0 {
        return Err(Error::OutOfRange("P must be >= 1".into()));
    }
    let total = enumerate(f, form, big_p, SolutionFilter::Primitive, budget)?;
    let units = (f.q() - 1) as u64;
    if total % units != 0 {
        return Err(Error::Inconsistent(format!(
            "{total} primitive solutions is not a multiple of q - 1"
        )));
    }
    Ok(BigInt::from(total / units))
}

/// `#Mor_P = ~N(P+1) - ~N(P)` from enumerated primitive counts.
pub fn brute_mor(f: &FieldCtx, form: &QuadForm, big_p: usize, budget: u128) -> Result<BigInt> {
    if big_p == 0 {
        return Err(Error::OutOfRange("P must be >= 1".into()));
    }
    check_budget(tuple_count(f.q(), form.n(), big_p + 1), budget)?;
    Ok(brute_primitive(f, form, big_p + 1, budget)? - brute_primitive(f, form, big_p, budget)?)
}

/// Solutions of `x^T G x = 0` with `|x| < q^P`, by enumeration.
pub fn brute_n_gram(f: &FieldCtx, gram: &[Vec<FqElem>], big_p: usize, budget: u128) -> Result<BigInt> {
    let n = gram.len();
    if n == 0 || gram.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidForm("Gram matrix must be square and nonempty".into()));
    }
    check_budget(tuple_count(f.q(), n, big_p), budget)?;
    let ring = f.poly_ring();
    let xs: Vec<Poly> = ring.enumerate_below(big_p).collect();
    let base = xs.len() as u64;
    let total = base.pow(n as u32);
    let hits = (0..total)
        .into_par_iter()
        .filter(|&code| {
            let mut rest = code;
            let x: Vec<&Poly> = (0..n)
                .map(|_| {
                    let v = &xs[(rest % base) as usize];
                    rest /= base;
                    v
                })
                .collect();
            let mut value = Poly::zero();
            for i in 0..n {
                for j in 0..n {
                    if !gram[i][j].is_zero() {
                        let term = ring.scale(gram[i][j], &ring.mul(x[i], x[j]));
                        value = ring.add(&value, &term);
                    }
                }
            }
            value.is_zero()
        })
        .count();
    Ok(BigInt::from(hits))
}

/// `N(P)` by convolving per-variable histograms of `a_i x^2` over the
/// additive group `F_q[t]_{<2P-1}` and reading the mass at zero.
pub fn convolution_count(f: &FieldCtx, form: &QuadForm, big_p: usize, memory: u128) -> Result<BigInt> {
    if big_p == 0 {
        return Ok(BigInt::from(1));
    }
    let width = 2 * big_p - 1;
    let digits = width * f.nu() as usize;
    let p = f.p() as usize;
    let size = (p as u128).checked_pow(digits as u32).unwrap_or(u128::MAX);
    if size > memory {
        return Err(Error::MemoryExceeded { needed: size, budget: memory });
    }
    let size = size as usize;
    // group elements as base-p integers; digits added mod p
    let decode = |mut g: usize| -> Vec<usize> {
        (0..digits)
            .map(|_| {
                let d = g % p;
                g /= p;
                d
            })
            .collect()
    };
    let encode = |ds: &[u32]| ds.iter().rev().fold(0usize, |acc, &d| acc * p + d as usize);
    let group: Vec<Vec<usize>> = (0..size).map(decode).collect();
    let mut dist = vec![0u128; size];
    dist[0] = 1;
    for table in digit_tables(f, form, big_p) {
        let mut hist = std::collections::BTreeMap::<usize, u128>::new();
        for v in &table {
            *hist.entry(encode(v)).or_default() += 1;
        }
        let support: Vec<(Vec<usize>, u128)> =
            hist.into_iter().map(|(v, c)| (group[v].clone(), c)).collect();
        dist = (0..size)
            .into_par_iter()
            .map(|target| {
                let t = &group[target];
                support
                    .iter()
                    .map(|(v, c)| {
                        // source = target - v
                        let src = t
                            .iter()
                            .zip(v)
                            .rev()
                            .fold(0usize, |acc, (&a, &b)| acc * p + (a + p - b) % p);
                        dist[src] * c
                    })
                    .sum()
            })
            .collect();
    }
    Ok(BigInt::from(dist[0]))
}

/// `N(P)` by enumeration when it fits the budget, else by convolution.
pub fn count_n(f: &FieldCtx, form: &QuadForm, big_p: usize, budget: u128) -> Result<(BigInt, Method)> {
    match brute_n(f, form, big_p, budget) {
        Ok(v) => Ok((v, Method::BruteForce)),
        Err(Error::BudgetExceeded { .. }) => {
            Ok((convolution_count(f, form, big_p, DEFAULT_MEMORY)?, Method::Convolution))
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(k: i64) -> BigInt {
        BigInt::from(k)
    }

    fn f3() -> FieldCtx {
        FieldCtx::prime(3).unwrap()
    }

    #[test]
    fn swar_addition() {
        for p in [3u32, 5, 7, 127] {
            let s = Swar::new(p, 8);
            for a in 0..p as u64 {
                for b in 0..p as u64 {
                    let pa = a * s.ones;
                    let pb = b * s.ones;
                    assert_eq!(s.add(pa, pb), ((a + b) % p as u64) * s.ones);
                }
            }
        }
    }

    #[test]
    fn brute_examples() {
        let f = f3();
        let form = |c: &[i64]| QuadForm::from_ints(&f, c).unwrap();
        assert_eq!(brute_n(&f, &form(&[1, 1, 1]), 0, DEFAULT_BUDGET).unwrap(), big(1));
        assert_eq!(brute_n(&f, &form(&[1, 1, 1]), 1, DEFAULT_BUDGET).unwrap(), big(9));
        assert_eq!(brute_n(&f, &form(&[1, 1, 1, 2]), 1, DEFAULT_BUDGET).unwrap(), big(21));
        assert_eq!(brute_n(&f, &form(&[1, 1, 1]), 2, DEFAULT_BUDGET).unwrap(), big(33));
        assert!(matches!(
            brute_n(&f, &form(&[1, 1, 1]), 3, 100),
            Err(Error::BudgetExceeded { needed: 19683, budget: 100 })
        ));
    }

    #[test]
    fn primitive_and_mor() {
        let f = f3();
        let form = |c: &[i64]| QuadForm::from_ints(&f, c).unwrap();
        let b = DEFAULT_BUDGET;
        assert_eq!(brute_primitive(&f, &form(&[1, 1, 1]), 1, b).unwrap(), big(4));
        assert_eq!(brute_primitive(&f, &form(&[1, 1, 1]), 2, b).unwrap(), big(4));
        assert_eq!(brute_primitive(&f, &form(&[1, 1, 1, 1]), 1, b).unwrap(), big(16));
        assert_eq!(brute_mor(&f, &form(&[1, 1, 1]), 1, b).unwrap(), big(0));
        assert_eq!(brute_mor(&f, &form(&[1, 1, 1]), 2, b).unwrap(), big(24));
        assert_eq!(brute_mor(&f, &form(&[1, 1, 1, 2]), 1, b).unwrap(), big(0));
    }

    #[test]
    fn fast_and_generic_paths_agree() {
        for (p, nu) in [(3, 1), (5, 1), (3, 2)] {
            let f = FieldCtx::new(p, nu, None).unwrap();
            for n in 2..=4 {
                for &tag in crate::CaseTag::for_n(n) {
                    let form = QuadForm::representative(&f, n, tag).unwrap();
                    for big_p in 1..=2 {
                        if tuple_count(f.q(), n, big_p) > 200_000 {
                            continue;
                        }
                        for filter in [SolutionFilter::All, SolutionFilter::Primitive] {
                            let fast = enumerate(&f, &form, big_p, filter, u128::MAX).unwrap();
                            let slow = enumerate_generic(&f, &form, big_p, filter);
                            assert_eq!(fast, slow, "q={} n={n} P={big_p} {filter:?}", f.q());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn convolution_matches_brute() {
        let f = f3();
        for n in 1..=4 {
            for &tag in crate::CaseTag::for_n(n) {
                let form = QuadForm::representative(&f, n, tag).unwrap();
                for big_p in 0..=2 {
                    assert_eq!(
                        convolution_count(&f, &form, big_p, DEFAULT_MEMORY).unwrap(),
                        brute_n(&f, &form, big_p, DEFAULT_BUDGET).unwrap()
                    );
                }
            }
        }
        let f9 = FieldCtx::new(3, 2, None).unwrap();
        let form = QuadForm::from_ints(&f9, &[1, 1, 1]).unwrap();
        assert_eq!(
            convolution_count(&f9, &form, 1, DEFAULT_MEMORY).unwrap(),
            brute_n(&f9, &form, 1, DEFAULT_BUDGET).unwrap()
        );
        assert!(matches!(
            convolution_count(&f, &QuadForm::from_ints(&f, &[1, 1, 1]).unwrap(), 3, 10),
            Err(Error::MemoryExceeded { .. })
        ));
    }

    #[test]
    fn invariance_under_permutation_and_square_scaling() {
        let f = FieldCtx::prime(5).unwrap();
        let base = QuadForm::from_ints(&f, &[1, 2, 3]).unwrap();
        let permuted = QuadForm::from_ints(&f, &[3, 1, 2]).unwrap();
        // 4 = 2^2 is a square
        let scaled = QuadForm::from_ints(&f, &[4, 2, 3]).unwrap();
        for big_p in 1..=2 {
            let v = brute_n(&f, &base, big_p, DEFAULT_BUDGET).unwrap();
            assert_eq!(brute_n(&f, &permuted, big_p, DEFAULT_BUDGET).unwrap(), v);
            assert_eq!(brute_n(&f, &scaled, big_p, DEFAULT_BUDGET).unwrap(), v);
        }
    }

    #[test]
    fn gram_counts() {
        let f = f3();
        let e = |k: i64| f.from_int(k);
        let gram = vec![vec![e(1), e(0)], vec![e(0), e(1)]];
        let form = QuadForm::from_ints(&f, &[1, 1]).unwrap();
        for big_p in 1..=2 {
            assert_eq!(
                brute_n_gram(&f, &gram, big_p, DEFAULT_BUDGET).unwrap(),
                brute_n(&f, &form, big_p, DEFAULT_BUDGET).unwrap()
            );
        }
    }

    #[test]
    fn budget_parsing() {
        assert_eq!(parse_budget("1000"), Some(1000));
        assert_eq!(parse_budget("1e8"), Some(100_000_000));
        assert_eq!(parse_budget("x"), None);
    }
}
