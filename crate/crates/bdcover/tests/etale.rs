use bdcover::etale::*;
use bdcover::localfield::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn q(p: u64) -> LocalField {
    LocalField::base(p, 32).unwrap()
}
fn e(f: LocalField, n: i64) -> FieldElement {
    FieldElement::from_int(f, n)
}

#[test]
fn hilbert90_examples() {
    let f = q(5);
    let a = e(f, 7);
    let x = NormOneElement::split_from(f, &a).unwrap();
    let w = hilbert90_solve(&x).unwrap();
    assert!(w.approx_eq(&EtaleElement::Split(a, FieldElement::one(f))));

    let k = QuadEtale::field(f, SquareClass::P).unwrap();
    let one = NormOneElement::new(k, k.one()).unwrap();
    assert!(hilbert90_solve(&one)
        .unwrap()
        .div(&k.one())
        .unwrap()
        .approx_eq(&k.from_base(&e(f, 2))));
    let minus = NormOneElement::new(k, k.one().neg()).unwrap();
    let w = hilbert90_solve(&minus).unwrap();
    assert!(w.approx_eq(&k.sqrt_d()));
    assert!(w.norm().approx_eq(&-k.d_elem()));
}

#[test]
fn iota_examples() {
    let f7 = q(7);
    let x = NormOneElement::split_from(f7, &e(f7, 2)).unwrap();
    assert!(iota(2, &x).unwrap().elem().approx_eq(&x.elem()));
    let y = iota(6, &x).unwrap();
    assert!(y.elem().approx_eq(&EtaleElement::Split(
        e(f7, 8),
        FieldElement::from_rational(f7, 1, 8).unwrap()
    )));
    let f5 = q(5);
    let k = QuadEtale::field(f5, SquareClass::U).unwrap();
    let m1 = NormOneElement::new(k, k.one().neg()).unwrap();
    assert!(iota(4, &m1).unwrap().elem().is_one());
    assert_eq!(
        (iota_exponent(1), iota_exponent(2), iota_exponent(4), iota_exponent(6)),
        (1, 1, 2, 3)
    );
}

/// |μ_{m0} ∩ K¹|, counted from the residue data.
fn kernel_size(k: &QuadEtale, m: u64) -> u64 {
    let m0 = iota_exponent(m) as u64;
    let p = k.base().p();
    let g = |a: u64, b: u64| (1..=a.min(b)).rev().find(|d| a.is_multiple_of(*d) && b.is_multiple_of(*d)).unwrap();
    match k {
        QuadEtale::Split(_) => g(m0, p - 1),
        QuadEtale::Field(kf) if kf.is_ramified() => g(m0, 2),
        QuadEtale::Field(_) => g(m0, p + 1),
    }
}

/// All elements of the subgroup generated by `gens`.
fn span(k: &QuadEtale, gens: &[NormOneElement]) -> Vec<EtaleElement> {
    let mut out = vec![k.one()];
    let mut i = 0;
    while i < out.len() {
        for g in gens {
            let n = out[i].mul(&g.elem());
            if !out.iter().any(|o| o.approx_eq(&n)) {
                out.push(n);
            }
        }
        i += 1;
    }
    out
}

#[test]
fn iota_kernel_examples() {
    let f7 = q(7);
    let ker = iota_kernel(6, &QuadEtale::split(f7)).unwrap();
    assert_eq!(span(&QuadEtale::split(f7), &ker).len(), 3);
    let f5 = q(5);
    let k = QuadEtale::field(f5, SquareClass::U).unwrap();
    assert_eq!(span(&k, &iota_kernel(2, &k).unwrap()).len(), 1);
    let ker = span(&k, &iota_kernel(4, &k).unwrap());
    assert_eq!(ker.len(), 2);
    assert!(ker.iter().any(|x| x.is_minus_one()));
    assert!(iota_kernel(3, &k).is_err());
}

#[test]
fn iota_kernel_sizes() {
    for p in [3u64, 5, 7, 11, 13] {
        let f = q(p);
        let algebras = [
            QuadEtale::split(f),
            QuadEtale::field(f, SquareClass::U).unwrap(),
            QuadEtale::field(f, SquareClass::P).unwrap(),
            QuadEtale::field(f, SquareClass::UP).unwrap(),
        ];
        for m in [1u64, 2, 3, 4, 6, 12] {
            if (p - 1) % m != 0 {
                continue;
            }
            for k in &algebras {
                let gens = iota_kernel(m, k).unwrap();
                let all = span(k, &gens);
                assert_eq!(all.len() as u64, kernel_size(k, m), "p={p} m={m} {}", k.label());
                for x in &gens {
                    assert!(iota(m, x).unwrap().elem().is_one());
                }
            }
        }
    }
}

#[test]
fn norm_one_rejects_other_norms() {
    let f = q(5);
    let k = QuadEtale::field(f, SquareClass::U).unwrap();
    assert!(NormOneElement::new(k, k.from_base(&e(f, 2))).is_err());
    assert!(NormOneElement::new(k, k.sqrt_d()).is_err());
}

fn algebras(p: u64) -> Vec<QuadEtale> {
    let f = q(p);
    let mut v = vec![QuadEtale::split(f)];
    for c in [SquareClass::U, SquareClass::P, SquareClass::UP] {
        v.push(QuadEtale::field(f, c).unwrap());
    }
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hilbert90_solves(seed in any::<u64>(), p in prop::sample::select(vec![3u64, 5, 7, 11, 13]), which in 0usize..4) {
        let k = algebras(p)[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = k.sample_norm_one(&mut rng);
        let w = hilbert90_solve(&x).unwrap();
        prop_assert!(w.div(&w.tau()).unwrap().approx_eq(&x.elem()));
    }

    #[test]
    fn iota_is_a_homomorphism(seed in any::<u64>(), cfg in prop::sample::select(vec![(5u64, 4u64), (7, 6), (7, 3), (13, 12), (11, 10)]), which in 0usize..4) {
        let (p, m) = cfg;
        let k = algebras(p)[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = k.sample_norm_one(&mut rng);
        let y = k.sample_norm_one(&mut rng);
        let lhs = iota(m, &x.mul(&y)).unwrap();
        let rhs = iota(m, &x).unwrap().mul(&iota(m, &y).unwrap());
        prop_assert!(lhs.elem().approx_eq(&rhs.elem()));
        prop_assert!(x.elem().norm().approx_eq(&FieldElement::one(k.base())));
    }

    #[test]
    fn algebra_laws(seed in any::<u64>(), p in prop::sample::select(vec![3u64, 5, 7, 11, 13]), which in 0usize..4) {
        let k = algebras(p)[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = k.random_nonzero(&mut rng, -2, 2);
        let y = k.random_nonzero(&mut rng, -2, 2);
        prop_assert!(x.mul(&y).norm().approx_eq(&(x.norm() * y.norm())));
        prop_assert!(x.mul(&y).tau().approx_eq(&x.tau().mul(&y.tau())));
        prop_assert!(x.mul(&x.tau()).approx_eq(&k.from_base(&x.norm())));
        prop_assert!(x.add(&x.tau()).approx_eq(&k.from_base(&x.trace())));
        prop_assert!(x.mul(&x.inv().unwrap()).is_one());
    }
}
