//! Randomized property suites run by `selftest`. Every suite owns a ChaCha8
//! stream seeded from SHA-256(name ‖ seed), so suites can run on separate
//! threads and still give byte-identical reports.

use crate::cover::{
    commutator, flicker_commutator, good_by_symbols, is_good, kubota_c, minus_one_tilde, torus_matrix,
    BlockCoverElement, CoverElement, GL2Element,
};
use crate::error::Result;
use crate::etale::{hilbert90_solve, iota, iota_exponent, iota_kernel, EtaleElement, NormOneElement, QuadEtale};
use crate::localfield::{
    teichmuller, AdditiveCharacter, FieldElement, LocalField, MuM, RootOfUnity, SquareClass, DEFAULT_PRECISION,
};
use crate::packetdata::{
    block_sgn, block_space, dagger_char, epsilon_char, mm_eigen_check, mm_space, toral_invariant, DaggerMethod,
    RootOrbit, Side, TorsionPoint, YParam,
};
use crate::quadforms::{gamma, weil_index, DiagQuadForm};
use crate::stabconj::{
    cad_sigma, cali_factor, conjugated_c, equiv_params, CalibratedElement, RegClassParam, SignVector, TorusBlock,
    TorusParam,
};
use crate::symbols::{chi_c, hilbert2, hilbert_m, hilbert_m_alg, product_formula_check, sgn_quadratic};
use crate::transfer::{delta_minus, delta_plus, m2_compare, nabla_rank1};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

pub const PRIMES: [u64; 5] = [3, 5, 7, 11, 13];
pub const MODULI: [u64; 5] = [1, 2, 3, 4, 6];

pub const SUITES: [&str; 11] = [
    "localfield",
    "hilbert",
    "weil",
    "etale",
    "cover",
    "good",
    "calibration",
    "transfer",
    "dagger",
    "moment_map",
    "product_formula",
];

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SuiteReport {
    pub name: String,
    pub passed: u64,
    pub failed: u64,
    pub first_counterexample: Option<String>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SelftestReport {
    pub seed: u64,
    pub iters: u64,
    pub suites: Vec<SuiteReport>,
    pub failures: u64,
}

/// The (p, m) pairs with m | p − 1.
pub fn configs() -> Vec<(u64, u64)> {
    PRIMES
        .iter()
        .flat_map(|&p| MODULI.iter().filter(move |&&m| (p - 1) % m == 0).map(move |&m| (p, m)))
        .collect()
}

pub fn suite_rng(name: &str, seed: u64) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(name.as_bytes());
    h.update(seed.to_le_bytes());
    ChaCha8Rng::from_seed(h.finalize().into())
}

pub fn run_suite(name: &str, seed: u64, iters: u64) -> Option<SuiteReport> {
    run_suite_counted(name, seed, iters).map(|(rep, _)| rep)
}

/// Checks performed, keyed by property and then by scope (a configuration
/// label such as `p=7 m=3`, a torus kind, or a block count).
pub type CheckCounts = BTreeMap<&'static str, BTreeMap<String, u64>>;

/// `run_suite` plus the number of instances each property was checked on.
pub fn run_suite_counted(name: &str, seed: u64, iters: u64) -> Option<(SuiteReport, CheckCounts)> {
    let mut rng = suite_rng(name, seed);
    let mut t = Tally::new(name);
    let run: fn(&mut Tally, &mut ChaCha8Rng, u64) = match name {
        "localfield" => localfield_suite,
        "hilbert" => hilbert_suite,
        "weil" => weil_suite,
        "etale" => etale_suite,
        "cover" => cover_suite,
        "good" => good_suite,
        "calibration" => calibration_suite,
        "transfer" => transfer_suite,
        "dagger" => dagger_suite,
        "moment_map" => moment_map_suite,
        "product_formula" => product_formula_suite,
        _ => return None,
    };
    run(&mut t, &mut rng, iters);
    Some((t.rep, t.counts))
}

/// Runs every suite, one thread each.
pub fn run_all(seed: u64, iters: u64) -> SelftestReport {
    let suites: Vec<SuiteReport> = std::thread::scope(|s| {
        let handles: Vec<_> = SUITES
            .iter()
            .map(|n| s.spawn(move || run_suite(n, seed, iters).expect("known suite")))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("suite thread panicked"))
            .collect()
    });
    let failures = suites.iter().map(|r| r.failed).sum();
    SelftestReport {
        seed,
        iters,
        suites,
        failures,
    }
}

struct Tally {
    rep: SuiteReport,
    counts: CheckCounts,
    scope: String,
}

impl Tally {
    fn new(name: &str) -> Self {
        Tally {
            rep: SuiteReport {
                name: name.into(),
                passed: 0,
                failed: 0,
                first_counterexample: None,
            },
            counts: BTreeMap::new(),
            scope: String::new(),
        }
    }

    fn scope(&mut self, s: String) {
        self.scope = s;
    }

    fn check(&mut self, prop: &'static str, r: Result<bool>, ctx: impl FnOnce() -> String) {
        *self
            .counts
            .entry(prop)
            .or_default()
            .entry(self.scope.clone())
            .or_default() += 1;
        let msg = match r {
            Ok(true) => {
                self.rep.passed += 1;
                return;
            }
            Ok(false) => format!("{prop}: {}", ctx()),
            Err(e) => format!("{prop}: error `{e}` at {}", ctx()),
        };
        self.rep.failed += 1;
        if self.rep.first_counterexample.is_none() {
            self.rep.first_counterexample = Some(msg);
        }
    }
}

fn base(p: u64) -> LocalField {
    LocalField::base(p, DEFAULT_PRECISION).expect("supported prime")
}

fn fields(p: u64) -> Vec<LocalField> {
    let mut v = vec![base(p)];
    for c in [SquareClass::U, SquareClass::P, SquareClass::UP] {
        v.push(LocalField::quadratic(p, c, DEFAULT_PRECISION).expect("supported class"));
    }
    v
}

fn algebras(p: u64) -> Vec<QuadEtale> {
    let f = base(p);
    let mut v = vec![QuadEtale::split(f)];
    for c in [SquareClass::U, SquareClass::P, SquareClass::UP] {
        v.push(QuadEtale::field(f, c).expect("supported class"));
    }
    v
}

fn rand_elem<R: Rng>(f: LocalField, rng: &mut R) -> FieldElement {
    FieldElement::random_nonzero(f, rng, -2, 3)
}

fn rand_mu<R: Rng>(m: u64, rng: &mut R) -> MuM {
    MuM::new(m, rng.gen_range(0..m as i64))
}

fn rand_gl2<R: Rng>(f: LocalField, rng: &mut R) -> GL2Element {
    loop {
        let mut e = || {
            if rng.gen_ratio(1, 5) {
                FieldElement::zero(f)
            } else {
                FieldElement::random_nonzero(f, rng, -1, 2)
            }
        };
        let (a, b, c, d) = (e(), e(), e(), e());
        if let Ok(g) = GL2Element::new(a, b, c, d) {
            if g.det().valuation().is_ok() {
                return g;
            }
        }
    }
}

fn rand_sl2<R: Rng>(f: LocalField, rng: &mut R) -> GL2Element {
    let a = FieldElement::random_nonzero(f, rng, -1, 2);
    let b = FieldElement::random_nonzero(f, rng, -1, 2);
    let c = if rng.gen_ratio(1, 4) {
        FieldElement::zero(f)
    } else {
        FieldElement::random_nonzero(f, rng, -1, 2)
    };
    let d = (FieldElement::one(f) + b * c).div(&a).expect("a is nonzero");
    GL2Element { a, b, c, d }
}

fn rand_c<R: Rng>(f: LocalField, rng: &mut R) -> FieldElement {
    FieldElement::random_nonzero(f, rng, -1, 2)
}

/// δ₀ ∈ K¹ with ι(δ₀) regular.
fn rand_delta0<R: Rng>(k: &QuadEtale, m: u64, rng: &mut R) -> NormOneElement {
    loop {
        let x = k.sample_norm_one(rng);
        if iota(m, &x).map(|y| y.is_regular()).unwrap_or(false) {
            return x;
        }
    }
}

fn rand_sigma<R: Rng>(m: u64, rng: &mut R) -> i8 {
    if m.is_multiple_of(4) && rng.gen_bool(0.5) {
        -1
    } else {
        1
    }
}

fn ext_of(k: &QuadEtale, x: &FieldElement) -> EtaleElement {
    k.from_base(x)
}

fn sign_mu(m: u64, s: i8) -> MuM {
    if s == 1 {
        MuM::one(m)
    } else {
        MuM::from_sign(m, -1)
    }
}

/// (x, y)_{F,gcd(2,m)} pushed into μ_m.
fn gcd2_symbol(f: LocalField, m: u64, x: &FieldElement, y: &FieldElement) -> Result<MuM> {
    if m % 2 == 1 {
        return Ok(MuM::one(m));
    }
    Ok(sign_mu(m, hilbert2(f, x, y)?))
}

fn plain_conj(gs: &[GL2Element], t: &BlockCoverElement) -> Result<BlockCoverElement> {
    let mut z = t.z;
    let mut blocks = Vec::new();
    for (g, b) in gs.iter().zip(&t.blocks) {
        let c = CoverElement::section(*b, z.m).conj(g)?;
        z = z.mul(&c.z);
        blocks.push(c.g);
    }
    Ok(BlockCoverElement { blocks, z })
}

// ---------------------------------------------------------------- localfield

fn localfield_suite(t: &mut Tally, rng: &mut ChaCha8Rng, iters: u64) {
    for p in PRIMES {
        for f in fields(p) {
            let psi = AdditiveCharacter::standard(base(p), rng.gen_range(-1..=1));
            let rf = f.residue_field();
            for _ in 0..iters {
                let (x, y, z) = (rand_elem(f, rng), rand_elem(f, rng), rand_elem(f, rng));
                let ctx = || format!("F={f:?} x={} y={} z={}", x.to_text(), y.to_text(), z.to_text());
                t.check("add-assoc", Ok(((x + y) + z).approx_eq(&(x + (y + z)))), ctx);
                t.check("distributive", Ok((x * (y + z)).approx_eq(&(x * y + x * z))), ctx);
                t.check(
                    "valuation-mult",
                    (|| {
                        let (vx, ux) = x.valuation_unit()?;
                        let (vy, uy) = y.valuation_unit()?;
                        let (vxy, uxy) = (x * y).valuation_unit()?;
                        Ok(vxy == vx + vy && uxy.approx_eq(&(ux * uy)))
                    })(),
                    ctx,
                );
                let (r1, r2) = (x.unit_residue().unwrap(), y.unit_residue().unwrap());
                t.check(
                    "teichmuller",
                    (|| {
                        let (w1, w2) = (teichmuller(f, r1)?, teichmuller(f, r2)?);
                        let w12 = teichmuller(f, rf.mul(r1, r2))?;
                        let torsion = w1.pow(rf.q() as i64 - 1)?.approx_eq(&FieldElement::one(f));
                        Ok(torsion && w12.approx_eq(&(w1 * w2)))
                    })(),
                    ctx,
                );
                if f.is_base() {
                    let c = rand_elem(f, rng);
                    t.check(
                        "psi-additive-twist",
                        (|| {
                            let add = psi.eval(&(x + y))? == psi.eval(&x)?.mul(&psi.eval(&y)?);
                            let tw = psi.twisted(&c)?.eval(&x)? == psi.eval(&(c * x))?;
                            Ok(add && tw)
                        })(),
                        || format!("{} c={}", ctx(), c.to_text()),
                    );
                }
            }
        }
    }
}

// ------------------------------------------------------------------- hilbert

/// (a, b)_{F,2} over a base field by solving z² = a x² + b y² primitively
/// modulo p² after reducing a, b to (p^{v mod 2}·unit mod p²).
pub fn hilbert2_oracle(a: &FieldElement, b: &FieldElement) -> i8 {
    let f = a.field();
    let p = f.p() as i128;
    let p2 = p * p;
    let reduce = |x: &FieldElement| -> i128 {
        let (s, u, _, _) = x.raw().expect("nonzero");
        let unit = (u % p2 as u128) as i128;
        if s.rem_euclid(2) == 1 {
            (unit * p) % p2
        } else {
            unit
        }
    };
    let (ra, rb) = (reduce(a), reduce(b));
    let mut is_sq = vec![false; p2 as usize];
    for z in 0..p2 {
        is_sq[(z * z % p2) as usize] = true;
    }
    let vals: Vec<(i128, bool)> = (0..p2).map(|x| (x * x % p2, x % p == 0)).collect();
    let mut seen = std::collections::HashSet::new();
    for &(x2, xz) in &vals {
        for &(y2, yz) in &vals {
            if xz && yz || !seen.insert((x2, y2, xz && yz)) {
                continue;
            }
            if is_sq[((ra * x2 + rb * y2) % p2) as usize] {
                return 1;
            }
        }
    }
    -1
}

fn hilbert_suite(t: &mut Tally, rng: &mut ChaCha8Rng, iters: u64) {
    for (p, m) in configs() {
        let fs = fields(p);
        let algs = algebras(p);
        let f0 = base(p);
        t.scope(format!("p={p} m={m}"));
        for _ in 0..iters {
            let f = *fs.choose(rng).unwrap();
            let (a, a2, b) = (rand_elem(f, rng), rand_elem(f, rng), rand_elem(f, rng));
            let ctx = || {
                format!(
                    "p={p} m={m} F={f:?} a={} a'={} b={}",
                    a.to_text(),
                    a2.to_text(),
                    b.to_text()
                )
            };
            let h = |x: &FieldElement, y: &FieldElement| hilbert_m(f, m, x, y);
            t.check(
                "bimultiplicative",
                (|| Ok(h(&(a * a2), &b)? == h(&a, &b)?.mul(&h(&a2, &b)?)))(),
                ctx,
            );
            t.check("antisymmetric", (|| Ok(h(&a, &b)?.mul(&h(&b, &a)?).is_one()))(), ctx);
            t.check(
                "x,-x",
                (|| Ok(h(&a, &-a)?.is_one() && hilbert2(f, &a, &-a)? == 1))(),
                ctx,
            );
            let one_minus = FieldElement::one(f) - a;
            if !one_minus.is_zero_like() {
                t.check("steinberg", (|| Ok(h(&a, &one_minus)?.is_one()))(), ctx);
            }
            for d in (1..=m).filter(|d| m % d == 0) {
                t.check(
                    "norm-residue",
                    (|| Ok(h(&a, &b)?.pow(d as i64).to_root() == hilbert_m(f, m / d, &a, &b)?.to_root()))(),
                    || format!("{} d={d}", ctx()),
                );
            }
            let (x, y) = (rand_elem(f0, rng), rand_elem(f0, rng));
            let octx = || format!("p={p} a={} b={}", x.to_text(), y.to_text());
            t.check(
                "hilbert2-oracle",
                (|| Ok(hilbert2(f0, &x, &y)? == hilbert2_oracle(&x, &y)))(),
                octx,
            );
            let k = *algs.choose(rng).unwrap();
            let bk = k.random_nonzero(rng, -2, 3);
            let pctx = || format!("p={p} m={m} K={} a={} b={}", k.label(), x.to_text(), bk.to_text());
            t.check(
                "projection",
                (|| Ok(hilbert_m_alg(&k, m, &ext_of(&k, &x), &bk)? == hilbert_m(f0, m, &x, &bk.norm())?))(),
                pctx,
            );
            let c = rand_elem(f0, rng);
            t.check(
                "chi-multiplicative",
                (|| Ok(chi_c(f0, &c, &(x * y))? == chi_c(f0, &c, &x)? * chi_c(f0, &c, &y)?))(),
                || format!("{} c={}", octx(), c.to_text()),
            );
        }
    }
}

// ---------------------------------------------------------------------- weil

fn weil_suite(t: &mut Tally, rng: &mut ChaCha8Rng, iters: u64) {
    for p in PRIMES {
        let f0 = base(p);
        for f in fields(p) {
            for level in -1..=1 {
                let psi = AdditiveCharacter::standard(f0, level);
                t.scope(format!("{f:?} level={level}"));
                let g1 = match gamma(&psi, &FieldElement::one(f)) {
                    Ok(g) => g,
                    Err(e) => {
                        t.check("gamma-one", Err(e), || format!("F={f:?} level={level}"));
                        continue;
                    }
                };
                for i in 0..iters {
                    let (a, b) = (rand_elem(f, rng), rand_elem(f, rng));
                    let ctx = || format!("F={f:?} level={level} a={} b={}", a.to_text(), b.to_text());
                    t.check(
                        "weil-hilbert",
                        (|| {
                            let rhs = gamma(&psi, &(a * b))?
                                .mul(&g1)
                                .mul(&gamma(&psi, &a)?.mul(&gamma(&psi, &b)?).inv());
                            Ok(
                                rhs == RootOfUnity::from_sign(hilbert2(f, &a, &b)?)
                                    && 8 % gamma(&psi, &a)?.order() == 0,
                            )
                        })(),
                        ctx,
                    );
                    if i % 4 != 0 || !f.is_base() {
                        continue;
                    }
                    let s = rand_elem(f, rng);
                    t.check(
                        "square-class",
                        (|| Ok(gamma(&psi, &(a * s * s))? == gamma(&psi, &a)?))(),
                        ctx,
                    );
                    t.check(
                        "twist-by-square",
                        (|| Ok(gamma(&psi.twisted(&(s * s))?, &a)? == gamma(&psi, &a)?))(),
                        ctx,
                    );
                    let q =
                        DiagQuadForm::new(f, (0..rng.gen_range(1..=3)).map(|_| rand_elem(f, rng)).collect()).unwrap();
                    let h = DiagQuadForm::new(f, vec![b, -b]).unwrap();
                    t.check(
                        "witt",
                        (|| Ok(weil_index(&psi, &q.direct_sum(&h))? == weil_index(&psi, &q)?))(),
                        ctx,
                    );
                    let q3 = DiagQuadForm::new(f, (0..3).map(|_| rand_elem(f, rng)).collect()).unwrap();
                    t.check(
                        "hasse-weil",
                        (|| {
                            let r = weil_index(&psi, &q3)?
                                .mul(&g1.pow(-2))
                                .mul(&gamma(&psi, &q3.det())?.inv());
                            Ok(r == RootOfUnity::from_sign(q3.hasse()?))
                        })(),
                        || {
                            format!(
                                "{} q={:?}",
                                ctx(),
                                q3.entries().iter().map(|e| e.to_text()).collect::<Vec<_>>()
                            )
                        },
                    );
                }
            }
        }
    }
}

// --------------------------------------------------------------------- etale

fn etale_suite(t: &mut Tally, rng: &mut ChaCha8Rng, iters: u64) {
    for (p, m) in configs() {
        for k in algebras(p) {
            let kernel = iota_kernel(m, &k);
            t.check("kernel-generators", kernel_matches_torsion(&k, m, kernel), || {
                format!("p={p} m={m} K={}", k.label())
            });
            for _ in 0..iters / 4 + 1 {
                let (x, y) = (k.sample_norm_one(rng), k.sample_norm_one(rng));
                let ctx = || {
                    format!(
                        "p={p} m={m} K={} x={} y={}",
                        k.label(),
                        x.elem().to_text(),
                        y.elem().to_text()
                    )
                };
                t.check(
                    "hilbert90",
                    (|| {
                        let w = hilbert90_solve(&x)?;
                        let exact = w.div(&w.tau())?.approx_eq(&x.elem());
                        let r = k.random_nonzero(rng, -1, 2);
                        let w2 = r.add(&x.elem().mul(&r.tau()));
                        if w2.is_zero_like() {
                            return Ok(exact);
                        }
                        let ok2 = w2.div(&w2.tau())?.approx_eq(&x.elem());
                        Ok(exact && ok2 && w.norm().div(&w2.norm())?.square_class()? == SquareClass::One)
                    })(),
                    ctx,
                );
                t.check(
                    "iota-hom",
                    (|| {
                        Ok(iota(m, &x.mul(&y))?
                            .elem()
                            .approx_eq(&iota(m, &x)?.mul(&iota(m, &y)?).elem()))
                    })(),
                    ctx,
                );
                let disjoint = !k.is_split() && m % 4 == 0;
                t.check(
                    "pm-coset",
                    (|| {
                        let neg = iota(m, &x)?.neg();
                        Ok(crate::cover::in_iota_image(&neg, m)? != disjoint)
                    })(),
                    ctx,
                );
            }
        }
    }
}

/// The torsion of K¹ killed by ι, from Teichmüller lifts, against the
/// subgroup generated by `iota_kernel`.
fn kernel_matches_torsion(k: &QuadEtale, m: u64, gens: Result<Vec<NormOneElement>>) -> Result<bool> {
    let gens = gens?;
    let m0 = iota_exponent(m);
    for g in &gens {
        if !iota(m, g)?.elem().is_one() {
            return Ok(false);
        }
    }
    let f = k.base();
    let mut torsion: Vec<EtaleElement> = Vec::new();
    match k {
        QuadEtale::Split(_) => {
            let rf = f.residue_field();
            for r in rf.elements().into_iter().filter(|r| !r.is_zero()) {
                if rf.pow(r, m0)? == rf.one() {
                    let w = teichmuller(f, r)?;
                    torsion.push(EtaleElement::Split(w, w.inv()?));
                }
            }
        }
        QuadEtale::Field(kf) => {
            let rf = kf.residue_field();
            let h = if kf.is_ramified() { 2 } else { kf.p() as i64 + 1 };
            for r in rf.elements().into_iter().filter(|r| !r.is_zero()) {
                if rf.pow(r, h)? == rf.one() && rf.pow(r, m0)? == rf.one() {
                    torsion.push(EtaleElement::Field(teichmuller(*kf, r)?));
                }
            }
        }
    }
    let mut group = vec![k.one()];
    loop {
        let mut grew = false;
        for g in &gens {
            for i in 0..group.len() {
                let e = group[i].mul(&g.elem());
                if !group.iter().any(|h| h.approx_eq(&e)) {
                    group.push(e);
                    grew = true;
                }
            }
        }
        if !grew || group.len() > torsion.len() {
            break;
        }
    }
    Ok(group.len() == torsion.len() && torsion.iter().all(|x| group.iter().any(|g| g.approx_eq(x))))
}

// --------------------------------------------------------------------- cover

fn cover_suite(t: &mut Tally, rng: &mut ChaCha8Rng, iters: u64) {
    for (p, m) in configs() {
        let f = base(p);
        let psi = AdditiveCharacter::standard(f, 0);
        t.scope(format!("p={p} m={m}"));
        for _ in 0..iters {
            let (g1, g2, g3) = (rand_gl2(f, rng), rand_gl2(f, rng), rand_gl2(f, rng));
            t.check(
                "cocycle",
                (|| {
                    let l = kubota_c(&g1, &g2, m)?.mul(&kubota_c(&g1.mul(&g2), &g3, m)?);
                    let r = kubota_c(&g1, &g2.mul(&g3), m)?.mul(&kubota_c(&g2, &g3, m)?);
                    Ok(l == r)
                })(),
                || format!("p={p} m={m} {g1:?} {g2:?} {g3:?}"),
            );
            let l = CoverElement {
                g: GL2Element::identity(f).neg(),
                z: rand_mu(m, rng),
            };
            t.check(
                "minus-one-adjoint",
                (|| Ok(commutator(&g1, &l)? == hilbert_m(f, m, &-FieldElement::one(f), &g1.det())?))(),
                || format!("p={p} m={m} g={g1:?}"),
            );
        }
        let n = rng.gen_range(1..=3u32);
        let c = rand_elem(f, rng);
        t.check(
            "minus-one-square",
            (|| {
                let k = minus_one_tilde(f, m, Some(&psi), 1)?.0;
                let mi = GL2Element::identity(f).neg();
                Ok(k.pow(2).mul(&kubota_c(&mi, &mi, m)?.to_root()).is_one())
            })(),
            || format!("p={p} m={m}"),
        );
        if m % 4 == 2 {
            t.check(
                "splitting-variance",
                (|| {
                    let a = minus_one_tilde(f, m, Some(&psi), n)?.0;
                    let b = minus_one_tilde(f, m, Some(&psi.twisted(&c)?), n)?.0;
                    let s = hilbert_m(f, m, &-FieldElement::one(f), &c)?.pow(n as i64);
                    Ok(b == a.mul(&s.to_root()))
                })(),
                || format!("p={p} m={m} n={n} c={}", c.to_text()),
            );
        }
        for k in algebras(p) {
            t.scope(k.label().into());
            for _ in 0..iters {
                let cc = rand_c(f, rng);
                let x = k.sample_norm_one(rng);
                let u = k.random_nonzero(rng, -2, 3);
                let lam = rand_elem(f, rng);
                let ctx = || {
                    format!(
                        "p={p} m={m} K={} c={} x={} u={}",
                        k.label(),
                        cc.to_text(),
                        x.elem().to_text(),
                        u.to_text()
                    )
                };
                let xk = k.random_nonzero(rng, -2, 3);
                t.check(
                    "flicker",
                    (|| {
                        let gam = torus_matrix(&k, &cc, &xk)?;
                        let g = torus_matrix(&k, &cc, &u)?;
                        Ok(commutator(&g, &CoverElement::section(gam, m))? == flicker_commutator(&k, m, &xk, &u)?)
                    })(),
                    || format!("{} x'={}", ctx(), xk.to_text()),
                );
                t.check(
                    "commutator-gl2-t",
                    (|| {
                        let gam = torus_matrix(&k, &cc, &iota(m, &x)?.elem())?;
                        let g = torus_matrix(&k, &cc, &u)?;
                        let lhs = commutator(&g, &CoverElement::section(gam, m))?;
                        let w = hilbert90_solve(&x)?;
                        let w2 = w.mul(&k.from_base(&lam));
                        let r1 = gcd2_symbol(f, m, &w.norm(), &g.det())?;
                        let r2 = gcd2_symbol(f, m, &w2.norm(), &g.det())?;
                        Ok(lhs == r1 && r1 == r2)
                    })(),
                    ctx,
                );
            }
        }
    }
}

// ---------------------------------------------------------------------- good

fn good_suite(t: &mut Tally, rng: &mut ChaCha8Rng, iters: u64) {
    for (p, m) in configs() {
        t.scope(format!("p={p} m={m}"));
        for k in algebras(p) {
            for i in 0..iters {
                let x = if i % 3 == 0 {
                    let y = k.sample_norm_one(rng);
                    let z = iota(m, &y).unwrap();
                    if rng.gen_bool(0.5) {
                        z.neg()
                    } else {
                        z
                    }
                } else {
                    k.sample_norm_one(rng)
                };
                if !x.is_regular() {
                    continue;
                }
                let ctx = || format!("p={p} m={m} K={} x={}", k.label(), x.elem().to_text());
                t.check(
                    "good-vs-symbols",
                    (|| Ok(is_good(&x, m)? == good_by_symbols(&x, m)?))(),
                    ctx,
                );
                if i % 3 == 0 {
                    t.check("image-is-good", is_good(&x, m), ctx);
                }
                if m == 2 {
                    t.check("m2-all-good", is_good(&x, m), ctx);
                }
            }
        }
    }
}

// --------------------------------------------------------------- calibration

fn rand_torus<R: Rng>(p: u64, n: usize, fields_only: bool, rng: &mut R) -> TorusParam {
    let f = base(p);
    let algs = algebras(p);
    let pool = if fields_only { &algs[1..] } else { &algs[..] };
    let blocks = (0..n)
        .map(|_| TorusBlock::new(*pool.choose(rng).unwrap(), rand_c(f, rng)).unwrap())
        .collect();
    TorusParam::new(f, blocks).unwrap()
}

fn rand_calibrated<R: Rng>(m: u64, torus: &TorusParam, sigma: Vec<i8>, rng: &mut R) -> CalibratedElement {
    let d0 = torus.blocks.iter().map(|b| rand_delta0(&b.k, m, rng)).collect();
    CalibratedElement::new(m, torus, d0, SignVector(sigma), rand_mu(m, rng)).unwrap()
}

fn rand_torus_elem<R: Rng>(torus: &TorusParam, rng: &mut R) -> Vec<GL2Element> {
    torus
        .blocks
        .iter()
        .map(|b| b.matrix(&b.k.random_nonzero(rng, -2, 3)).unwrap())
        .collect()
}

fn calibration_suite(t: &mut Tally, rng: &mut ChaCha8Rng, iters: u64) {
    for (p, m) in configs() {
        let f = base(p);
        t.scope(format!("p={p} m={m}"));
        for _ in 0..iters {
            let n = rng.gen_range(1..=2);
            let torus = rand_torus(p, n, false, rng);
            let sigma: Vec<i8> = (0..n).map(|_| rand_sigma(m, rng)).collect();
            let e = rand_calibrated(m, &torus, sigma.clone(), rng);
            let gs: Vec<GL2Element> = (0..n).map(|_| rand_gl2(f, rng)).collect();
            let hs: Vec<GL2Element> = (0..n).map(|_| rand_gl2(f, rng)).collect();
            let ctx = || format!("p={p} m={m} torus={:?} elem={:?} g={gs:?}", torus, e);
            let zeta = rand_mu(m, rng);
            t.check(
                "AD.1",
                (|| Ok(cad_sigma(&gs, &e.translate(&zeta))?.approx_eq(&cad_sigma(&gs, &e)?.translate(&zeta))))(),
                ctx,
            );
            let e1 = rand_calibrated(m, &torus, vec![1; n], rng);
            let e2 = rand_calibrated(m, &torus, vec![1; n], rng);
            t.check(
                "AD.2",
                (|| Ok(cad_sigma(&gs, &e1.mul(&e2)?)?.approx_eq(&cad_sigma(&gs, &e1)?.mul(&cad_sigma(&gs, &e2)?)?)))(),
                ctx,
            );
            let ss: Vec<GL2Element> = (0..n).map(|_| rand_sl2(f, rng)).collect();
            t.check(
                "AD.3-sl2",
                (|| Ok(cad_sigma(&ss, &e)?.tilde.approx_eq(&plain_conj(&ss, &e.tilde)?)))(),
                ctx,
            );
            let ts = rand_torus_elem(&torus, rng);
            t.check("AD.3-torus", (|| Ok(cad_sigma(&ts, &e)?.approx_eq(&e)))(), ctx);
            t.check(
                "AD.4",
                (|| {
                    let gh: Vec<GL2Element> = gs.iter().zip(&hs).map(|(g, h)| g.mul(h)).collect();
                    Ok(cad_sigma(&gs, &cad_sigma(&hs, &e)?)?.approx_eq(&cad_sigma(&gh, &e)?))
                })(),
                ctx,
            );
            t.check(
                "factorization-pair",
                (|| {
                    let gt: Vec<GL2Element> = gs.iter().zip(&ts).map(|(g, t)| g.mul(t)).collect();
                    Ok(cad_sigma(&gt, &e)?.approx_eq(&cad_sigma(&gs, &e)?))
                })(),
                ctx,
            );
            // single-block statements
            let b0 = torus.blocks[0];
            let t1 = TorusParam::new(f, vec![b0]).unwrap();
            let g = gs[0];
            let nu = g.det();
            if m % 4 != 0 {
                let e = rand_calibrated(m, &t1, vec![1], rng);
                let l = CoverElement {
                    g: GL2Element::identity(f).neg(),
                    z: rand_mu(m, rng),
                };
                t.check(
                    "cad-minus-1",
                    (|| {
                        let shifted = l.mul(&e.tilde.block(0).translate(&e.tilde.z))?;
                        let e2 = CalibratedElement {
                            tilde: BlockCoverElement {
                                blocks: vec![shifted.g],
                                z: shifted.z,
                            },
                            delta0: vec![e.delta0[0].neg()],
                            delta0_mat: vec![e.delta0_mat[0].neg()],
                            sigma: e.sigma.clone(),
                        };
                        let lhs = cad_sigma(&[g], &e2)?;
                        let base_img = cad_sigma(&[g], &e)?;
                        let mut rhs = l.mul(&base_img.tilde.block(0).translate(&base_img.tilde.z))?;
                        if m % 2 == 0 {
                            rhs = rhs.translate(&sign_mu(m, sgn_quadratic(&b0.k, &nu)?));
                        }
                        Ok(lhs.tilde.block(0).translate(&lhs.tilde.z).approx_eq(&rhs))
                    })(),
                    || format!("p={p} m={m} block={b0:?} g={g:?}"),
                );
            }
            let sig = rand_sigma(m, rng);
            let e = rand_calibrated(m, &t1, vec![sig], rng);
            let negate = !b0.k.is_split() && m % 4 == 0;
            let eta = if negate {
                Some(e.delta0[0].neg())
            } else {
                iota_kernel(m, &b0.k).ok().and_then(|ks| {
                    ks.first()
                        .map(|k0| e.delta0[0].mul(&k0.pow(rng.gen_range(0..6)).unwrap()))
                })
            };
            if let Some(d1) = eta {
                t.check(
                    "dependence-on-delta0",
                    (|| {
                        let e2 = CalibratedElement::new(m, &t1, vec![d1], e.sigma.clone(), e.tilde.z)?;
                        if !e2.tilde.approx_eq(&e.tilde) {
                            return Ok(false);
                        }
                        let a = cad_sigma(&[g], &e2)?;
                        let b = cad_sigma(&[g], &e)?;
                        let defect = if negate {
                            sign_mu(m, sgn_quadratic(&b0.k, &nu)?)
                        } else {
                            MuM::one(m)
                        };
                        Ok(a.tilde.approx_eq(&b.tilde.translate(&defect)))
                    })(),
                    || format!("p={p} m={m} block={b0:?} g={g:?} delta0={:?}", e.delta0),
                );
            }
            let w = match b0.k {
                QuadEtale::Split(_) => EtaleElement::Split(
                    FieldElement::random_one_plus_p(f, rng),
                    FieldElement::random_one_plus_p(f, rng),
                ),
                QuadEtale::Field(kf) => EtaleElement::Field(FieldElement::random_one_plus_p(kf, rng)),
            };
            let nu2 = rand_elem(f, rng);
            t.check(
                "top-unipotent",
                (|| {
                    let x0 = NormOneElement::new(b0.k, w.div(&w.tau())?)?;
                    Ok(cali_factor(m, &nu2, &x0)? == 1)
                })(),
                || format!("p={p} m={m} K={} w={}", b0.k.label(), w.to_text()),
            );
        }
    }
}

// ------------------------------------------------------------------ transfer

fn transfer_suite(t: &mut Tally, rng: &mut ChaCha8Rng, iters: u64) {
    for (p, m) in configs().into_iter().filter(|&(_, m)| m % 2 == 0) {
        let f = base(p);
        t.scope(format!("p={p} m={m}"));
        for _ in 0..iters {
            let psi = AdditiveCharacter::new(f, rng.gen_range(-1..=1), FieldElement::random_unit(f, rng)).unwrap();
            let torus = rand_torus(p, 1, false, rng);
            let k = torus.blocks[0].k;
            let plus = rand_calibrated(m, &torus, vec![1], rng);
            let minus = if m % 4 == 0 {
                rand_calibrated(m, &torus, vec![-1], rng)
            } else {
                plus.clone()
            };
            let h = rand_sl2(f, rng);
            let g = rand_gl2(f, rng);
            let ctx = || format!("p={p} m={m} psi={psi:?} K={} elem={plus:?} h={h:?} g={g:?}", k.label());
            let dp = |e: &CalibratedElement| delta_plus(m, Some(&psi), e, None);
            let dm = |e: &CalibratedElement| delta_minus(m, Some(&psi), e, None);
            t.check(
                "hi-invariance+",
                (|| Ok(dp(&cad_sigma(&[h], &plus)?)? == dp(&plus)?))(),
                ctx,
            );
            t.check(
                "hi-invariance-",
                (|| Ok(dm(&cad_sigma(&[h], &minus)?)? == dm(&minus)?))(),
                ctx,
            );
            t.check(
                "hi-cocycle+",
                (|| Ok(dp(&cad_sigma(&[g], &plus)?)? == dp(&plus)?))(),
                ctx,
            );
            t.check(
                "hi-cocycle-",
                (|| {
                    let kappa = if m % 4 == 2 { sgn_quadratic(&k, &g.det())? } else { 1 };
                    Ok(dm(&cad_sigma(&[g], &minus)?)? == dm(&minus)?.mul(&RootOfUnity::from_sign(kappa)))
                })(),
                ctx,
            );
            let z = rand_mu(m, rng);
            t.check(
                "genuine",
                (|| Ok(dp(&plus.translate(&z))? == dp(&plus)?.mul(&z.to_root())))(),
                ctx,
            );
            if m % 4 == 0 {
                let lam = k.from_base(&rand_elem(f, rng));
                t.check(
                    "omega-independence",
                    (|| {
                        let w = hilbert90_solve(&plus.delta0[0])?.mul(&lam);
                        Ok(delta_plus(m, None, &plus, Some(w))? == delta_plus(m, None, &plus, None)?)
                    })(),
                    ctx,
                );
            }
            if m == 2 {
                t.check("m2-compare", (|| Ok(m2_compare(&psi, &plus)?.equal))(), ctx);
                t.check(
                    "nabla-2",
                    (|| {
                        let gt = plus.tilde.block(0).translate(&plus.tilde.z);
                        let c2 = cali_factor(2, &g.det(), &plus.delta0[0])?;
                        Ok(nabla_rank1(&psi, &gt.conj(&g)?)?
                            == nabla_rank1(&psi, &gt)?.mul(&RootOfUnity::from_sign(c2)))
                    })(),
                    ctx,
                );
            }
        }
    }
}

// -------------------------------------------------------------------- dagger

fn rand_y<R: Rng>(torus: &TorusParam, rng: &mut R) -> YParam {
    loop {
        let y = (0..torus.n()).map(|_| rand_c(torus.base, rng)).collect();
        if let Ok(y) = YParam::new(torus, y) {
            return y;
        }
    }
}

fn dagger_suite(t: &mut Tally, rng: &mut ChaCha8Rng, iters: u64) {
    for p in PRIMES {
        let f = base(p);
        for i in 0..iters {
            let n = rng.gen_range(1..=3);
            t.scope(format!("n={n}"));
            let torus = rand_torus(p, n, true, rng);
            let y = rand_y(&torus, rng);
            let ctx = || {
                format!(
                    "p={p} torus={torus:?} y={:?}",
                    y.y.iter().map(|e| e.to_text()).collect::<Vec<_>>()
                )
            };
            let g0s = TorsionPoint::all(n);
            let g0 = g0s.choose(rng).unwrap().clone();
            let hasse = |tp: &TorusParam, yp: &YParam, g: &TorsionPoint| dagger_char(2, tp, yp, g, DaggerMethod::Hasse);
            for level in [0, 1] {
                let psi = AdditiveCharacter::new(f, level, FieldElement::random_unit(f, rng)).unwrap();
                t.check(
                    "method-agreement",
                    (|| Ok(dagger_char(6, &torus, &y, &g0, DaggerMethod::Weil(&psi))? == hasse(&torus, &y, &g0)?))(),
                    || format!("{} g0={g0:?} psi={psi:?}", ctx()),
                );
            }
            t.check(
                "interplay",
                (|| {
                    for g in &g0s {
                        let r = epsilon_char(Side::SO, &torus, &y, g)? * epsilon_char(Side::Sp, &torus, &y, g)?;
                        if r != hasse(&torus, &y, g)? {
                            return Ok(false);
                        }
                    }
                    Ok(true)
                })(),
                ctx,
            );
            let ds: Vec<FieldElement> = (0..n).map(|_| rand_elem(f, rng)).collect();
            t.check(
                "dagger-variance",
                (|| {
                    let y2 = YParam::new(&torus, y.y.iter().zip(&ds).map(|(a, d)| *a * *d).collect())?;
                    let mut blocks = torus.blocks.clone();
                    for (b, d) in blocks.iter_mut().zip(&ds) {
                        b.c = b.c * *d;
                    }
                    let t2 = TorusParam::new(f, blocks)?;
                    #[allow(clippy::needless_range_loop)]
                    for j in 0..n {
                        let e = TorsionPoint((0..n).map(|k| if k == j { -1 } else { 1 }).collect());
                        let s = block_sgn(&torus, j, &ds[j])?;
                        let v = hasse(&torus, &y, &e)?;
                        if hasse(&torus, &y2, &e)? != s * v || hasse(&t2, &y, &e)? != s * v {
                            return Ok(false);
                        }
                    }
                    Ok(true)
                })(),
                || format!("{} d={:?}", ctx(), ds.iter().map(|e| e.to_text()).collect::<Vec<_>>()),
            );
            t.check(
                "dagger-indep",
                (|| {
                    let y2 = YParam::new(
                        &torus,
                        y.y.iter()
                            .map(|a| *a * FieldElement::random_one_plus_p(f, rng))
                            .collect(),
                    )?;
                    for g in &g0s {
                        if hasse(&torus, &y2, g)? != hasse(&torus, &y, g)? {
                            return Ok(false);
                        }
                    }
                    Ok(true)
                })(),
                ctx,
            );
            for j in 0..n {
                t.check(
                    "soshort-isotropy",
                    (|| {
                        let v = block_space(&torus, &y, j)?;
                        let (_, hyp) = v.witt_decompose()?;
                        Ok((toral_invariant(RootOrbit::SoShort(j), &torus, Some(&y))? == 1) == (hyp >= 1))
                    })(),
                    ctx,
                );
            }
            // equivalent parameters: norm rescaling of c and a block permutation
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(rng);
            t.check(
                "equivalence-invariance",
                (|| {
                    let xs: Vec<NormOneElement> = torus.blocks.iter().map(|b| rand_delta0(&b.k, 2, rng)).collect();
                    let blocks2: Vec<TorusBlock> = perm
                        .iter()
                        .map(|&j| {
                            let b = torus.blocks[j];
                            TorusBlock {
                                k: b.k,
                                c: b.c * b.k.random_nonzero(rng, -1, 2).norm(),
                            }
                        })
                        .collect();
                    let t2 = TorusParam::new(f, blocks2)?;
                    let y2 = YParam::new(&t2, perm.iter().map(|&j| y.y[j]).collect())?;
                    let a = RegClassParam::new(torus.clone(), xs.clone())?;
                    let b = RegClassParam::new(t2.clone(), perm.iter().map(|&j| xs[j]).collect())?;
                    if !equiv_params(&a, &b)? {
                        return Ok(false);
                    }
                    for g in &g0s {
                        let g2 = TorsionPoint(perm.iter().map(|&j| g.0[j]).collect());
                        if hasse(&torus, &y, g)? != hasse(&t2, &y2, &g2)?
                            || epsilon_char(Side::SO, &torus, &y, g)? != epsilon_char(Side::SO, &t2, &y2, &g2)?
                        {
                            return Ok(false);
                        }
                    }
                    Ok(true)
                })(),
                ctx,
            );
            if i % 2 == 0 {
                let g = rand_gl2(f, rng);
                let b0 = torus.blocks[0];
                t.check(
                    "ss2-kernel",
                    (|| {
                        let c2 = conjugated_c(&b0, &g)?;
                        let s = sgn_quadratic(&b0.k, &g.det())?;
                        let x = rand_delta0(&b0.k, 2, rng);
                        let a = RegClassParam::new(TorusParam::new(f, vec![b0])?, vec![x])?;
                        let bp = RegClassParam::new(TorusParam::new(f, vec![TorusBlock::new(b0.k, c2)?])?, vec![x])?;
                        let ratio = sgn_quadratic(&b0.k, &c2.div(&b0.c)?)?;
                        Ok(ratio == s && equiv_params(&a, &bp)? == (s == 1))
                    })(),
                    || format!("p={p} block={b0:?} g={g:?}"),
                );
            }
        }
    }
}

// ---------------------------------------------------------------- moment map

fn moment_map_suite(t: &mut Tally, rng: &mut ChaCha8Rng, iters: u64) {
    for p in PRIMES {
        for _ in 0..iters {
            let n = rng.gen_range(1..=3);
            t.scope(format!("n={n}"));
            let torus = rand_torus(p, n, false, rng);
            let y = rand_y(&torus, rng);
            let ctx = || {
                format!(
                    "p={p} torus={torus:?} y={:?}",
                    y.y.iter().map(|e| e.to_text()).collect::<Vec<_>>()
                )
            };
            t.check(
                "mm-disc",
                (|| Ok(mm_space(&torus, &y)?.disc_pm()? == SquareClass::One))(),
                ctx,
            );
            t.check("mm-eigen", (|| Ok(mm_eigen_check(&torus, &y)?.pass))(), ctx);
        }
    }
}

// ----------------------------------------------------------- product formula

fn product_formula_suite(t: &mut Tally, rng: &mut ChaCha8Rng, iters: u64) {
    let r = |rng: &mut ChaCha8Rng| {
        let mut n = 0;
        while n == 0 {
            n = rng.gen_range(-1000..=1000);
        }
        (n, rng.gen_range(1..=1000))
    };
    for _ in 0..iters {
        let (a, b) = (r(rng), r(rng));
        t.check(
            "product-formula",
            product_formula_check(a, b).map(|rep| rep.product == 1),
            || format!("a={a:?} b={b:?}"),
        );
    }
}
