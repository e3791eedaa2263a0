mod common;

use bdcover::cover::{CoverElement, GL2Element};
use bdcover::etale::*;
use bdcover::localfield::*;
use bdcover::stabconj::*;
use bdcover::symbols::hilbert2;
use common::{e, q, r};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q3_sqrt3() -> QuadEtale {
    QuadEtale::field(q(3), SquareClass::P).unwrap()
}

fn one_block(k: QuadEtale, c: i64) -> TorusParam {
    let f = k.base();
    TorusParam::new(f, vec![TorusBlock::new(k, e(f, c)).unwrap()]).unwrap()
}

fn rand_gl2(f: LocalField, rng: &mut ChaCha8Rng) -> GL2Element {
    loop {
        let mut x = || FieldElement::random_nonzero(f, rng, -2, 2);
        if let Ok(g) = GL2Element::new(x(), x(), x(), x()) {
            return g;
        }
    }
}

fn rand_sl2(f: LocalField, rng: &mut ChaCha8Rng) -> GL2Element {
    let g = rand_gl2(f, rng);
    g.mul(&GL2Element::diag(&FieldElement::one(f), &g.det().inv().unwrap()))
}

fn rand_delta0(k: &QuadEtale, m: u64, rng: &mut ChaCha8Rng) -> NormOneElement {
    loop {
        let x = k.sample_norm_one(rng);
        if iota(m, &x).unwrap().is_regular() {
            return x;
        }
    }
}

#[test]
fn inv_examples() {
    let f = q(3);
    let torus = one_block(q3_sqrt3(), 1);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let inv = inv_of(&torus, &[rand_sl2(f, &mut rng)]).unwrap();
    assert!(inv.is_trivial(&torus).unwrap());
    let nu = e(f, 2);
    let inv = inv_of(&torus, &[GL2Element::diag(&FieldElement::one(f), &nu)]).unwrap();
    assert!(inv.nus[0].unwrap().approx_eq(&nu));
    assert_eq!(inv.signs(&torus).unwrap(), vec![hilbert2(f, &nu, &e(f, 3)).unwrap()]);
    assert_eq!(inv.signs(&torus).unwrap(), vec![-1]);
    let split = one_block(QuadEtale::split(f), 1);
    assert!(inv_of(&split, &[GL2Element::diag(&FieldElement::one(f), &nu)])
        .unwrap()
        .nus[0]
        .is_none());
}

#[test]
fn kappa_examples() {
    let f = q(3);
    let torus = one_block(q3_sqrt3(), 1);
    let g = GL2Element::diag(&FieldElement::one(f), &e(f, 2));
    let inv = inv_of(&torus, &[g]).unwrap();
    let triv = inv_of(&torus, &[GL2Element::identity(f)]).unwrap();
    assert_eq!(kappa_eval(KappaSign::Plus, &torus, &inv).unwrap(), 1);
    assert_eq!(kappa_eval(KappaSign::Minus, &torus, &triv).unwrap(), 1);
    assert_eq!(kappa_eval(KappaSign::Minus, &torus, &inv).unwrap(), -1);
}

#[test]
fn cali_examples() {
    let f = q(3);
    let k = q3_sqrt3();
    let g0 = NormOneElement::new(k, k.one().neg()).unwrap();
    assert!(hilbert90_solve(&g0).unwrap().approx_eq(&k.sqrt_d()));
    assert_eq!(cali_factor(2, &e(f, 3), &g0).unwrap(), 1);
    assert_eq!(hilbert2(f, &e(f, -3), &e(f, 3)).unwrap(), 1);
    assert_eq!(cali_factor(2, &e(f, 4), &g0).unwrap(), 1);
    assert_eq!(
        cali_factor(2, &e(f, 2), &g0).unwrap(),
        hilbert2(f, &e(f, -3), &e(f, 2)).unwrap()
    );
    let f7 = q(7);
    let k7 = QuadEtale::field(f7, SquareClass::U).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..10 {
        let x = k7.sample_norm_one(&mut rng);
        let nu = FieldElement::random_nonzero(f7, &mut rng, -2, 2);
        assert_eq!(cali_factor(3, &nu, &x).unwrap(), 1);
        assert_eq!(cali_factor(6, &(nu * nu), &x).unwrap(), 1);
    }
}

#[test]
fn cad_examples() {
    let (p, m) = (13u64, 4u64);
    let f = q(p);
    let k = QuadEtale::field(f, SquareClass::U).unwrap();
    let torus = one_block(k, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let d0 = rand_delta0(&k, m, &mut rng);
        let elem = CalibratedElement::new(m, &torus, vec![d0], SignVector::plus(1), MuM::new(m, 1)).unwrap();
        let g = rand_sl2(f, &mut rng);
        let out = cad_sigma(&[g], &elem).unwrap();
        let plain = elem.tilde.block(0).translate(&elem.tilde.z).conj(&g).unwrap();
        assert!(out.tilde.block(0).translate(&out.tilde.z).approx_eq(&plain));

        let t = torus.blocks[0].matrix(&k.random_nonzero(&mut rng, -2, 2)).unwrap();
        assert!(cad_sigma(&[t], &elem).unwrap().approx_eq(&elem));

        let (g1, g2) = (rand_gl2(f, &mut rng), rand_gl2(f, &mut rng));
        let lhs = cad_sigma(&[g1], &cad_sigma(&[g2], &elem).unwrap()).unwrap();
        assert!(lhs.approx_eq(&cad_sigma(&[g1.mul(&g2)], &elem).unwrap()));
    }
    let d0 = rand_delta0(&k, 2, &mut rng);
    assert!(CalibratedElement::new(2, &torus, vec![d0], SignVector(vec![-1]), MuM::one(2)).is_err());
}

#[test]
fn equiv_examples() {
    let f = q(3);
    let k = q3_sqrt3();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let x = k.sample_norm_one(&mut rng);
    let a = RegClassParam::new(one_block(k, 1), vec![x]).unwrap();
    assert!(equiv_params(&a, &a).unwrap());
    // N(1 + √3) = -2 and N(√3) = -3 are norms; 2 is not.
    for (c, expect) in [(-2, true), (-3, true), (6, true), (2, false), (-1, false)] {
        let b = RegClassParam::new(one_block(k, c), vec![x]).unwrap();
        assert_eq!(equiv_params(&a, &b).unwrap(), expect, "c={c}");
        assert_eq!(sgn_oracle(f, c), if expect { 1 } else { -1 });
    }
    let flipped = RegClassParam::new(one_block(k, -1), vec![NormOneElement::new(k, x.elem().tau()).unwrap()]).unwrap();
    assert!(equiv_params(&a, &flipped).unwrap());
}

fn sgn_oracle(f: LocalField, c: i64) -> i8 {
    hilbert2(f, &e(f, c), &e(f, 3)).unwrap()
}

#[test]
fn conjugated_torus_parameter() {
    let f = q(5);
    let k = QuadEtale::field(f, SquareClass::U).unwrap();
    let block = TorusBlock::new(k, r(f, 1, 3)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..10 {
        // diag(1, ν) rescales the model: c ↦ cν; a torus factor changes nothing.
        let nu = FieldElement::random_nonzero(f, &mut rng, -2, 2);
        let t = block.matrix(&k.random_nonzero(&mut rng, -2, 2)).unwrap();
        let g = GL2Element::diag(&FieldElement::one(f), &nu).mul(&t);
        let c2 = conjugated_c(&block, &g).unwrap();
        assert!(c2.approx_eq(&(block.c * nu)));
        let moved = TorusBlock::new(k, c2).unwrap();
        let x = k.random_nonzero(&mut rng, -2, 2);
        assert!(block
            .matrix(&x)
            .unwrap()
            .conj_by(&g)
            .unwrap()
            .approx_eq(&moved.matrix(&x).unwrap()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn ad1_ad2(seed in any::<u64>(), cfg in prop::sample::select(vec![(5u64, 4u64), (13, 4), (7, 6), (13, 12), (7, 2)])) {
        let (p, m) = cfg;
        let f = q(p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = [QuadEtale::split(f), QuadEtale::field(f, SquareClass::U).unwrap(), QuadEtale::field(f, SquareClass::P).unwrap()][rng.gen_range(0..3)];
        let torus = one_block(k, rng.gen_range(1..p as i64));
        let sign = if m % 4 == 0 && rng.gen_bool(0.5) { -1 } else { 1 };
        let d0 = rand_delta0(&k, m, &mut rng);
        let zeta = MuM::new(m, rng.gen_range(0..m as i64));
        let elem = CalibratedElement::new(m, &torus, vec![d0], SignVector(vec![sign]), MuM::one(m)).unwrap();
        let g = rand_gl2(f, &mut rng);
        prop_assert!(cad_sigma(&[g], &elem.translate(&zeta)).unwrap().approx_eq(&cad_sigma(&[g], &elem).unwrap().translate(&zeta)));
        let e1 = CalibratedElement::new(m, &torus, vec![rand_delta0(&k, m, &mut rng)], SignVector::plus(1), MuM::one(m)).unwrap();
        let e2 = CalibratedElement::new(m, &torus, vec![rand_delta0(&k, m, &mut rng)], SignVector::plus(1), MuM::one(m)).unwrap();
        let prod = e1.mul(&e2).unwrap();
        let lhs = cad_sigma(&[g], &prod).unwrap();
        let rhs = cad_sigma(&[g], &e1).unwrap().mul(&cad_sigma(&[g], &e2).unwrap()).unwrap();
        prop_assert!(lhs.approx_eq(&rhs));
    }

    #[test]
    fn unipotent_elements_have_trivial_calibration(seed in any::<u64>(), p in prop::sample::select(vec![3u64, 5, 7, 11, 13])) {
        let f = q(p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = [QuadEtale::field(f, SquareClass::U).unwrap(), QuadEtale::field(f, SquareClass::P).unwrap(), QuadEtale::split(f)][rng.gen_range(0..3)];
        let x = k.sample_norm_one(&mut rng);
        // x^{q-1}·(p-power) lands in the pro-p part; squaring keeps it there.
        let qq = k.ext().map_or(f.q(), |kf| kf.q()) as i64;
        let u = x.pow(qq - 1).unwrap();
        let nu = FieldElement::random_nonzero(f, &mut rng, -2, 2);
        prop_assert_eq!(cali_factor(2, &nu, &u).unwrap(), 1);
    }

    #[test]
    fn sl2_conjugation_preserves_cover_element(seed in any::<u64>(), cfg in prop::sample::select(vec![(5u64, 4u64), (7, 6), (13, 12)])) {
        let (p, m) = cfg;
        let f = q(p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = QuadEtale::field(f, SquareClass::U).unwrap();
        let torus = one_block(k, 1);
        let elem = CalibratedElement::new(m, &torus, vec![rand_delta0(&k, m, &mut rng)], SignVector::plus(1), MuM::one(m)).unwrap();
        let g = rand_sl2(f, &mut rng);
        let direct = CoverElement::section(elem.tilde.blocks[0], m).conj(&g).unwrap();
        let out = cad_sigma(&[g], &elem).unwrap();
        prop_assert!(out.tilde.block(0).translate(&out.tilde.z).approx_eq(&direct));
    }
}
