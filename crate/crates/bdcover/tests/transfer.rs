mod common;

use bdcover::cover::{CoverElement, GL2Element};
use bdcover::etale::*;
use bdcover::localfield::*;
use bdcover::stabconj::*;
use bdcover::transfer::*;
use common::{e, gauss_oracle, q, r};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn one_block(k: QuadEtale, c: &FieldElement) -> TorusParam {
    TorusParam::new(k.base(), vec![TorusBlock::new(k, *c).unwrap()]).unwrap()
}

fn rand_sl2(f: LocalField, rng: &mut ChaCha8Rng) -> GL2Element {
    loop {
        let mut x = || FieldElement::random_nonzero(f, rng, -2, 2);
        if let Ok(g) = GL2Element::new(x(), x(), x(), x()) {
            return g.mul(&GL2Element::diag(&FieldElement::one(f), &g.det().inv().unwrap()));
        }
    }
}

fn rand_delta0(k: &QuadEtale, m: u64, rng: &mut ChaCha8Rng) -> NormOneElement {
    loop {
        let x = k.sample_norm_one(rng);
        if iota(m, &x).unwrap().is_regular() {
            return x;
        }
    }
}

fn algebra(f: LocalField, i: usize) -> QuadEtale {
    [
        QuadEtale::split(f),
        QuadEtale::field(f, SquareClass::U).unwrap(),
        QuadEtale::field(f, SquareClass::P).unwrap(),
        QuadEtale::field(f, SquareClass::UP).unwrap(),
    ][i]
}

#[test]
fn delta_plus_split_square_norm() {
    let f = q(5);
    let psi = AdditiveCharacter::standard(f, 0);
    let torus = one_block(QuadEtale::split(f), &FieldElement::one(f));
    let d0 = NormOneElement::split_from(f, &e(f, 25)).unwrap();
    let elem = CalibratedElement::new(2, &torus, vec![d0], SignVector::plus(1), MuM::one(2)).unwrap();
    assert!(elem.tilde.blocks[0].approx_eq(&GL2Element::diag(&e(f, 25), &r(f, 1, 25))));
    assert!(delta_plus(2, Some(&psi), &elem, None).unwrap().is_one());
    let shifted = elem.translate(&MuM::from_sign(2, -1));
    assert_eq!(delta_plus(2, Some(&psi), &shifted, None).unwrap().as_sign(), Some(-1));
}

#[test]
fn delta_requirements() {
    let f = q(5);
    let k = QuadEtale::field(f, SquareClass::U).unwrap();
    let torus = one_block(k, &FieldElement::one(f));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let elem = CalibratedElement::new(
        2,
        &torus,
        vec![rand_delta0(&k, 2, &mut rng)],
        SignVector::plus(1),
        MuM::one(2),
    )
    .unwrap();
    assert!(delta_plus(2, None, &elem, None).is_err());
    let wrong = k.one();
    assert!(delta_plus(2, Some(&AdditiveCharacter::standard(f, 0)), &elem, Some(wrong)).is_err());
    let e4 = CalibratedElement::new(
        4,
        &torus,
        vec![rand_delta0(&k, 4, &mut rng)],
        SignVector::plus(1),
        MuM::one(4),
    )
    .unwrap();
    assert!(delta_plus(4, None, &e4, None).is_ok());
    assert!(delta_minus(4, None, &e4, None).is_err());
}

#[test]
fn delta_minus_by_definition() {
    for p in [3u64, 5, 7] {
        let f = q(p);
        let psi = AdditiveCharacter::standard(f, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(p);
        for i in 0..4 {
            let k = algebra(f, i);
            let torus = one_block(k, &FieldElement::one(f));
            let d0 = rand_delta0(&k, 2, &mut rng);
            let elem = CalibratedElement::new(2, &torus, vec![d0], SignVector::plus(1), MuM::one(2)).unwrap();
            // s(−1)δ̃ paired with −δ₀ is a calibrated element of T̃⁺ again.
            let minus = CalibratedElement::new(2, &torus, vec![d0.neg()], SignVector::plus(1), MuM::one(2)).unwrap();
            let s_minus = CoverElement::section(GL2Element::identity(f).neg(), 2);
            let shifted = s_minus.mul(&elem.tilde.block(0)).unwrap();
            assert!(shifted.g.approx_eq(&minus.tilde.blocks[0]));
            let minus = minus.translate(&shifted.z);
            let g1 = bdcover::quadforms::gamma(&psi, &FieldElement::one(f)).unwrap();
            let expect = g1.pow(2).mul(&delta_plus(2, Some(&psi), &minus, None).unwrap());
            assert_eq!(delta_minus(2, Some(&psi), &elem, None).unwrap(), expect);
        }
    }
}

#[test]
fn nabla_example() {
    let f = q(5);
    let psi = AdditiveCharacter::standard(f, 0);
    let w = CoverElement::section(GL2Element::from_ints(f, 0, -1, 1, 0).unwrap(), 2);
    let expect = gauss_oracle(5, -1).mul(&gauss_oracle(5, 2));
    assert_eq!(nabla_rank1(&psi, &w).unwrap(), expect);
    let scalar = CoverElement::section(GL2Element::identity(f).neg(), 2);
    assert_eq!(nabla_rank1(&psi, &scalar).unwrap_err(), bdcover::Error::NotRegular);
    let gl = CoverElement::section(GL2Element::diag(&e(f, 2), &e(f, 1)), 2);
    assert!(nabla_rank1(&psi, &gl).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn m2_comparison(seed in any::<u64>(), p in prop::sample::select(vec![3u64, 5, 7, 11, 13]), which in 0usize..4) {
        let f = q(p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = algebra(f, which);
        let torus = one_block(k, &FieldElement::random_nonzero(f, &mut rng, -1, 1));
        let psi = AdditiveCharacter::standard(f, rng.gen_range(-1..2));
        let z = MuM::new(2, rng.gen_range(0..2));
        let elem = CalibratedElement::new(2, &torus, vec![rand_delta0(&k, 2, &mut rng)], SignVector::plus(1), z).unwrap();
        let rep = m2_compare(&psi, &elem).unwrap();
        prop_assert!(rep.equal, "{:?}", rep);
    }

    #[test]
    fn omega_independence_and_genuineness(seed in any::<u64>(), cfg in prop::sample::select(vec![(5u64, 2u64), (5, 4), (13, 4), (7, 6), (13, 12), (11, 10)]), which in 0usize..4) {
        let (p, m) = cfg;
        let f = q(p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = algebra(f, which);
        let torus = one_block(k, &FieldElement::random_nonzero(f, &mut rng, -1, 1));
        let psi = AdditiveCharacter::standard(f, 0);
        let d0 = rand_delta0(&k, m, &mut rng);
        let elem = CalibratedElement::new(m, &torus, vec![d0], SignVector::plus(1), MuM::one(m)).unwrap();
        let w = hilbert90_solve(&d0).unwrap();
        let t = FieldElement::random_nonzero(f, &mut rng, -2, 2);
        let w2 = w.mul(&k.from_base(&t));
        let a = delta_plus(m, Some(&psi), &elem, Some(w)).unwrap();
        prop_assert_eq!(a, delta_plus(m, Some(&psi), &elem, Some(w2)).unwrap());
        let zeta = MuM::new(m, rng.gen_range(0..m as i64));
        prop_assert_eq!(delta_plus(m, Some(&psi), &elem.translate(&zeta), None).unwrap(), zeta.to_root().mul(&a));
    }

    #[test]
    fn sl2_conjugation_invariance(seed in any::<u64>(), cfg in prop::sample::select(vec![(5u64, 2u64), (13, 4), (7, 6), (13, 12)]), which in 0usize..4) {
        let (p, m) = cfg;
        let f = q(p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = algebra(f, which);
        let torus = one_block(k, &FieldElement::one(f));
        let psi = AdditiveCharacter::standard(f, 0);
        let sign = if m % 4 == 0 { -1 } else { 1 };
        let elem = CalibratedElement::new(m, &torus, vec![rand_delta0(&k, m, &mut rng)], SignVector::plus(1), MuM::one(m)).unwrap();
        let g = rand_sl2(f, &mut rng);
        let moved = cad_sigma(&[g], &elem).unwrap();
        prop_assert_eq!(delta_plus(m, Some(&psi), &elem, None).unwrap(), delta_plus(m, Some(&psi), &moved, None).unwrap());
        let elem_m = CalibratedElement::new(m, &torus, vec![rand_delta0(&k, m, &mut rng)], SignVector(vec![sign]), MuM::one(m)).unwrap();
        let moved_m = cad_sigma(&[g], &elem_m).unwrap();
        prop_assert_eq!(delta_minus(m, Some(&psi), &elem_m, None).unwrap(), delta_minus(m, Some(&psi), &moved_m, None).unwrap());
    }

    #[test]
    fn nabla_transforms_by_calibration(seed in any::<u64>(), p in prop::sample::select(vec![3u64, 5, 7, 11, 13]), which in 0usize..4) {
        let f = q(p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = algebra(f, which);
        let torus = one_block(k, &FieldElement::one(f));
        let psi = AdditiveCharacter::standard(f, 0);
        let d0 = rand_delta0(&k, 2, &mut rng);
        let elem = CalibratedElement::new(2, &torus, vec![d0], SignVector::plus(1), MuM::one(2)).unwrap();
        let gt = elem.tilde.block(0);
        let g = loop {
            let mut x = || FieldElement::random_nonzero(f, &mut rng, -2, 2);
            if let Ok(g) = GL2Element::new(x(), x(), x(), x()) { break g; }
        };
        let lhs = nabla_rank1(&psi, &gt.conj(&g).unwrap()).unwrap();
        let c = cali_factor(2, &g.det(), &d0).unwrap();
        prop_assert_eq!(lhs, nabla_rank1(&psi, &gt).unwrap().mul(&RootOfUnity::from_sign(c)));
    }
}
