use num_bigint::BigInt;
use proptest::prelude::*;
use qcircle::expsums::{s_r_form_closed, s_r_form_direct};
use qcircle::*;

fn field(choice: u8) -> FieldCtx {
    match choice % 4 {
        0 => FieldCtx::prime(3).unwrap(),
        1 => FieldCtx::prime(5).unwrap(),
        2 => FieldCtx::prime(7).unwrap(),
        _ => FieldCtx::new(3, 2, None).unwrap(),
    }
}

fn poly_from(f: &FieldCtx, raw: &[u32]) -> Poly {
    Poly::from_coeffs(raw.iter().map(|&c| f.from_index(c % f.q()).unwrap()).collect())
}

proptest! {
    #[test]
    fn divmod_reconstructs(choice: u8, a in prop::collection::vec(0u32..100, 0..9),
                           b in prop::collection::vec(0u32..100, 1..6)) {
        let f = field(choice);
        let ring = f.poly_ring();
        let a = poly_from(&f, &a);
        let b = poly_from(&f, &b);
        prop_assume!(!b.is_zero());
        let (qt, rm) = ring.divmod(&a, &b).unwrap();
        prop_assert_eq!(ring.add(&ring.mul(&qt, &b), &rm), a);
        prop_assert!(rm.degree() < b.degree());
    }

    #[test]
    fn factorization_reassembles(choice: u8, raw in prop::collection::vec(0u32..100, 2..10)) {
        let f = field(choice);
        let ring = f.poly_ring();
        let r = poly_from(&f, &raw);
        prop_assume!(!r.is_zero());
        let fac = ring.factorize(&r).unwrap();
        let back = fac.factors.iter().fold(Poly::constant(fac.unit), |acc, (w, k)| {
            ring.mul(&acc, &ring.pow(w, *k))
        });
        prop_assert_eq!(back, r);
        for (w, _) in &fac.factors {
            prop_assert!(w.is_monic());
            // irreducible: w has no root-free splitting detectable by gcd with t^{q^k} - t
            let d = w.degree().finite().unwrap();
            let mut h = Poly::t();
            for _ in 1..=d / 2 {
                h = ring.powmod(&h, &num_bigint::BigUint::from(f.q()), w).unwrap();
                let g = ring.gcd(&ring.sub(&h, &Poly::t()), w).unwrap();
                prop_assert!(g.is_one());
            }
        }
    }

    #[test]
    fn jacobi_is_multiplicative(choice: u8, a in prop::collection::vec(0u32..100, 0..4),
                                b in prop::collection::vec(0u32..100, 0..4),
                                r in prop::collection::vec(0u32..100, 1..4)) {
        let f = field(choice);
        let ring = f.poly_ring();
        let a = poly_from(&f, &a);
        let b = poly_from(&f, &b);
        let mut coeffs: Vec<FqElem> = r.iter().map(|&c| f.from_index(c % f.q()).unwrap()).collect();
        coeffs.push(FqElem::ONE);
        let r = Poly::from_coeffs(coeffs);
        let lhs = ring.jacobi_symbol(&ring.mul(&a, &b), &r).unwrap();
        let rhs = ring.jacobi_symbol(&a, &r).unwrap() * ring.jacobi_symbol(&b, &r).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(lhs == 0, !ring.coprime(&ring.mul(&a, &b), &r));
    }

    #[test]
    fn square_roots_invert_squaring(choice: u8, raw in prop::collection::vec(0u32..100, 1..5)) {
        let f = field(choice);
        let ring = f.poly_ring();
        let s = poly_from(&f, &raw);
        prop_assume!(!s.is_zero());
        let sq = ring.mul(&s, &s);
        let root = ring.square_root(&sq).unwrap().unwrap();
        prop_assert_eq!(ring.mul(&root, &root), sq);
    }

    #[test]
    fn cyclotomic_ring_laws(p in prop::sample::select(vec![3u32, 5, 7]),
                            a in prop::collection::vec(-20i64..20, 7),
                            b in prop::collection::vec(-20i64..20, 7),
                            c in prop::collection::vec(-20i64..20, 7)) {
        let mk = |v: &[i64]| v.iter().enumerate().fold(CycInt::zero(p), |acc, (k, &x)| {
            acc + CycInt::zeta_pow(p, k as i64).scale(&BigInt::from(x))
        });
        let (a, b, c) = (mk(&a), mk(&b), mk(&c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        let z = (&a * &b).eval::<f64>();
        let w = a.eval::<f64>() * b.eval::<f64>();
        prop_assert!((z - w).norm() < 1e-6 * (1.0 + w.norm()));
    }
}

#[test]
fn s_r_closed_matches_direct_over_f5() {
    let f = FieldCtx::prime(5).unwrap();
    let ring = f.poly_ring();
    for n in 1..=3 {
        for &tag in CaseTag::for_n(n) {
            let form = QuadForm::representative(&f, n, tag).unwrap();
            for r in ring.enumerate_monic_up_to(2) {
                let direct = s_r_form_direct(&f, &form, &r).unwrap();
                let closed = s_r_form_closed(&f, &form, &r).unwrap();
                assert_eq!(direct.to_integer(), Some(closed), "n={n} r={}", ring.render(&r));
            }
        }
    }
}

#[test]
fn extension_field_counts() {
    let f = FieldCtx::new(3, 2, None).unwrap();
    for n in 3..=4 {
        for &tag in CaseTag::for_n(n) {
            let form = QuadForm::representative(&f, n, tag).unwrap();
            let brute = oracle::brute_n(&f, &form, 1, oracle::DEFAULT_BUDGET).unwrap();
            assert_eq!(formulas::n_exact(&f, &form, 1).unwrap(), brute);
            assert_eq!(formulas::n_circle(&f, &form, 1).unwrap(), brute);
        }
    }
}

#[test]
fn diagonalization_preserves_counts() {
    use rand::{Rng, SeedableRng};
    let f = FieldCtx::prime(5).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let mut tried = 0;
    while tried < 20 {
        let mut g = vec![vec![FqElem::ZERO; 3]; 3];
        for i in 0..3 {
            for j in i..3 {
                let v = f.from_index(rng.gen_range(0..5)).unwrap();
                g[i][j] = v;
                g[j][i] = v;
            }
        }
        let Ok(diag) = formulas::diagonalize(&f, &g) else { continue };
        tried += 1;
        for big_p in 1..=2 {
            assert_eq!(
                oracle::brute_n_gram(&f, &g, big_p, oracle::DEFAULT_BUDGET).unwrap(),
                oracle::brute_n(&f, &diag, big_p, oracle::DEFAULT_BUDGET).unwrap()
            );
        }
    }
}
