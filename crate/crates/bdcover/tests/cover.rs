use bdcover::cover::*;
use bdcover::etale::*;
use bdcover::localfield::*;
use bdcover::symbols::{hilbert2, hilbert_m};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(p: u64) -> LocalField {
    LocalField::base(p, 32).unwrap()
}
fn e(f: LocalField, n: i64) -> FieldElement {
    FieldElement::from_int(f, n)
}

fn rand_gl2(f: LocalField, rng: &mut ChaCha8Rng) -> GL2Element {
    loop {
        let mut x = || {
            if rng.gen_bool(0.15) {
                FieldElement::zero(f)
            } else {
                FieldElement::random_nonzero(f, rng, -2, 2)
            }
        };
        let (a, b, c, d) = (x(), x(), x(), x());
        if let Ok(g) = GL2Element::new(a, b, c, d) {
            return g;
        }
    }
}

#[test]
fn cocycle_examples() {
    let f = q(5);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let g = rand_gl2(f, &mut rng);
    assert!(kubota_c(&GL2Element::identity(f), &g, 4).unwrap().is_one());

    let d = GL2Element::from_ints(f, 5, 0, 0, 1).unwrap();
    let w = GL2Element::from_ints(f, 0, -1, 1, 0).unwrap();
    // x(d) = 1, x(w) = 1, x(dw) = 1, det d = 5: the symbol is (1, 5) = 1.
    assert!(kubota_c(&d, &w, 2).unwrap().is_one());
    for _ in 0..20 {
        let g3 = rand_gl2(f, &mut rng);
        let lhs = kubota_c(&d, &w, 2).unwrap().mul(&kubota_c(&d.mul(&w), &g3, 2).unwrap());
        let rhs = kubota_c(&d, &w.mul(&g3), 2)
            .unwrap()
            .mul(&kubota_c(&w, &g3, 2).unwrap());
        assert_eq!(lhs, rhs);
    }
    // x(diag(a, d)) = d, so c(diag(a,1), diag(1,b)) = (b⁻¹, a)^{-1} = (a, b)^{-1}.
    let (a, b) = (e(f, 5), e(f, 2));
    let one = FieldElement::one(f);
    let c = kubota_c(&GL2Element::diag(&a, &one), &GL2Element::diag(&one, &b), 4).unwrap();
    assert_eq!(c, hilbert_m(f, 4, &a, &b).unwrap().inv());
    assert!(!c.is_one());
}

#[test]
fn cover_group_examples() {
    let f = q(7);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for m in [2u64, 3, 6] {
        let a = CoverElement::section(rand_gl2(f, &mut rng), m).translate(&MuM::new(m, 1));
        let id = a.mul(&a.inv().unwrap()).unwrap();
        assert!(id.approx_eq(&CoverElement::identity(f, m)));
        let b = CoverElement::section(rand_gl2(f, &mut rng), m);
        let z = CoverElement::identity(f, m).translate(&MuM::new(m, 1));
        assert!(z.mul(&b).unwrap().approx_eq(&b.mul(&z).unwrap()));
        let h = rand_gl2(f, &mut rng);
        let g = rand_gl2(f, &mut rng);
        let lhs = CoverElement::section(g.conj_by(&h).unwrap(), m).pow(m).unwrap();
        let rhs = CoverElement::section(g, m).pow(m).unwrap().conj(&h).unwrap();
        assert!(lhs.approx_eq(&rhs));
    }
}

#[test]
fn commutator_examples() {
    let f3 = q(3);
    let gamma = CoverElement::section(
        GL2Element::diag(&e(f3, 3), &FieldElement::from_rational(f3, 1, 3).unwrap()),
        2,
    );
    let g = GL2Element::diag(&FieldElement::one(f3), &e(f3, 3));
    let c = commutator(&g, &gamma).unwrap();
    assert_eq!(c.to_root().as_sign(), Some(-1));
    assert_eq!(hilbert2(f3, &e(f3, 3), &e(f3, 3)).unwrap(), -1);

    let f7 = q(7);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let central = CoverElement::section(GL2Element::scalar(&-FieldElement::one(f7)), 3);
        assert!(commutator(&rand_gl2(f7, &mut rng), &central).unwrap().is_one());
    }
    let h = GL2Element::from_ints(f7, 1, 1, 0, 1).unwrap();
    assert_eq!(
        commutator(&h, &gamma_for(f7)).unwrap_err(),
        bdcover::Error::NotCommuting
    );
}

fn gamma_for(f: LocalField) -> CoverElement {
    CoverElement::section(GL2Element::diag(&e(f, 2), &e(f, 4)), 3)
}

#[test]
fn flicker_examples() {
    let f3 = q(3);
    let split = QuadEtale::split(f3);
    let x = EtaleElement::Split(e(f3, 3), FieldElement::from_rational(f3, 1, 3).unwrap());
    let u = EtaleElement::Split(FieldElement::one(f3), e(f3, 3));
    assert_eq!(
        flicker_commutator(&split, 2, &x, &u).unwrap().to_root().as_sign(),
        Some(-1)
    );
}

#[test]
fn good_examples() {
    let f7 = q(7);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for k in [
        QuadEtale::split(f7),
        QuadEtale::field(f7, SquareClass::U).unwrap(),
        QuadEtale::field(f7, SquareClass::P).unwrap(),
    ] {
        for _ in 0..20 {
            let x = k.sample_norm_one(&mut rng);
            if x.is_regular() {
                assert!(is_good(&x, 2).unwrap());
            }
        }
    }
    let x = NormOneElement::split_from(f7, &e(f7, 7)).unwrap();
    assert!(!is_good(&x, 3).unwrap());
    assert!(!good_by_symbols(&x, 3).unwrap());
    let x3 = NormOneElement::split_from(f7, &e(f7, 343)).unwrap();
    assert!(is_good(&x3, 3).unwrap());
    assert!(good_by_symbols(&x3, 3).unwrap());
    let m1 = NormOneElement::split_from(f7, &e(f7, -1)).unwrap();
    assert_eq!(is_good(&m1, 3).unwrap_err(), bdcover::Error::NotRegular);
}

#[test]
fn minus_one_examples() {
    for p in [3u64, 5, 7, 13] {
        let f = q(p);
        let psi = AdditiveCharacter::standard(f, 0);
        let mo = GL2Element::scalar(&-FieldElement::one(f));
        for m in [1u64, 2, 3, 4, 6, 12] {
            if (p - 1) % m != 0 {
                continue;
            }
            let r = minus_one_tilde(f, m, Some(&psi), 1).unwrap().0;
            let c = kubota_c(&mo, &mo, m).unwrap().to_root();
            assert!(r.pow(2).mul(&c).is_one(), "p={p} m={m}");
            if m % 2 == 1 {
                assert!(r.is_one());
            }
            if m % 4 == 2 {
                for cv in 1..p as i64 {
                    let c = e(f, cv);
                    let r2 = minus_one_tilde(f, m, Some(&psi.twisted(&c).unwrap()), 3).unwrap().0;
                    let r1 = minus_one_tilde(f, m, Some(&psi), 3).unwrap().0;
                    let s = hilbert_m(f, m, &-FieldElement::one(f), &c).unwrap().pow(3).to_root();
                    assert_eq!(r2, r1.mul(&s));
                }
            }
        }
    }
    assert!(minus_one_tilde(q(5), 2, None, 1).is_err());
    assert!(minus_one_tilde(q(5), 3, None, 1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn cocycle_identity(seed in any::<u64>(), cfg in prop::sample::select(vec![(3u64, 2u64), (5, 4), (7, 6), (7, 3), (13, 12)])) {
        let (p, m) = cfg;
        let f = q(p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b, c) = (rand_gl2(f, &mut rng), rand_gl2(f, &mut rng), rand_gl2(f, &mut rng));
        let lhs = kubota_c(&a, &b, m).unwrap().mul(&kubota_c(&a.mul(&b), &c, m).unwrap());
        let rhs = kubota_c(&a, &b.mul(&c), m).unwrap().mul(&kubota_c(&b, &c, m).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn minus_one_adjoint(seed in any::<u64>(), cfg in prop::sample::select(vec![(3u64, 2u64), (5, 4), (7, 6), (13, 12), (13, 3)])) {
        let (p, m) = cfg;
        let f = q(p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = rand_gl2(f, &mut rng);
        let mo = CoverElement::section(GL2Element::scalar(&-FieldElement::one(f)), m);
        let c = commutator(&g, &mo).unwrap();
        prop_assert_eq!(c, hilbert_m(f, m, &-FieldElement::one(f), &g.det()).unwrap());
    }

    #[test]
    fn good_matches_symbol_criterion(seed in any::<u64>(), cfg in prop::sample::select(vec![(5u64, 4u64), (7, 6), (7, 3), (13, 12), (13, 4)]), which in 0usize..4) {
        let (p, m) = cfg;
        let f = q(p);
        let k = [QuadEtale::split(f), QuadEtale::field(f, SquareClass::U).unwrap(),
                 QuadEtale::field(f, SquareClass::P).unwrap(), QuadEtale::field(f, SquareClass::UP).unwrap()][which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = k.sample_norm_one(&mut rng);
        prop_assume!(x.is_regular());
        prop_assert_eq!(is_good(&x, m).unwrap(), good_by_symbols(&x, m).unwrap());
    }

    #[test]
    fn torus_commutator_matches_symbol(seed in any::<u64>(), cfg in prop::sample::select(vec![(7u64, 3u64), (13, 4), (13, 12), (7, 6)])) {
        let (p, m) = cfg;
        let f = q(p);
        let k = QuadEtale::field(f, SquareClass::U).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = FieldElement::random_nonzero(f, &mut rng, -1, 1);
        let x = k.sample_norm_one(&mut rng);
        prop_assume!(x.is_regular());
        let u = k.sample_norm_one(&mut rng);
        let gamma = CoverElement::section(torus_matrix(&k, &c, &x.elem()).unwrap(), m);
        let g = torus_matrix(&k, &c, &u.elem()).unwrap();
        let comm = commutator(&g, &gamma).unwrap();
        prop_assert_eq!(comm, flicker_commutator(&k, m, &x.elem(), &u.elem()).unwrap());
    }
}
