//! Verification suites: seeded randomized and exhaustive identity checks
//! over every module, with machine-readable reports and greedy shrinking of
//! failing inputs.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::berezin::{self, BerSection, IntegralForm};
use crate::coord::{Dims, Var};
use crate::coord_change::{self, SuperCoordMap, Transport};
use crate::forms::{self, FormElem, FormMonomial};
use crate::grammar;
use crate::poincare::{self, TruncationWindow};
use crate::polyfields::{self, PolyElem, PolyMonomial, VectorField};
use crate::scalar::{self, Scalar};
use crate::superpoly::{self, SuperMonomial, SuperPoly};
use crate::universal::{self, SpencerElem, UdrCoElem, UdrElem};
use crate::virtual_double::{self, VirtualForm};
use crate::weyl::{DerMonomial, WeylOp};

pub const SUITES: &[&str] = &[
    "nilpotency",
    "leibniz",
    "homotopy-dr",
    "homotopy-spencer",
    "lie",
    "e-x",
    "invariance",
    "ber-action",
    "double-complex",
    "poincare-integral",
];

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub suite: String,
    pub p: usize,
    pub q: usize,
    pub max_deg: u32,
    pub max_z: u32,
    pub trials: usize,
    pub maps: usize,
    pub seed: u64,
    pub exhaustive: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            suite: "all".into(),
            p: 1,
            q: 1,
            max_deg: 2,
            max_z: 2,
            trials: 25,
            maps: 5,
            seed: 0,
            exhaustive: false,
        }
    }
}

impl RunConfig {
    pub fn dims(&self) -> Dims {
        Dims::new(self.p, self.q)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub input: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

impl Check {
    fn pass(name: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            input: String::new(),
            expected: String::new(),
            actual: String::new(),
            pass: true,
        }
    }

    fn of(name: impl Into<String>, input: String, expected: String, actual: String) -> Check {
        let pass = expected == actual;
        Check {
            name: name.into(),
            input,
            expected,
            actual,
            pass,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub params: BTreeMap<String, String>,
    pub checks: Vec<Check>,
    pub seed: u64,
    pub version: String,
    #[serde(skip)]
    pub elapsed_ms: u128,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Runs one named suite (or `all`).
pub fn run_verify(cfg: &RunConfig) -> Result<Report, String> {
    let start = std::time::Instant::now();
    let mut checks = Vec::new();
    let names: Vec<&str> = if cfg.suite == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&cfg.suite.as_str()) {
        vec![cfg.suite.as_str()]
    } else {
        return Err(format!(
            "unknown suite `{}`; available: {}",
            cfg.suite,
            SUITES.join(", ")
        ));
    };
    for name in names {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let suite_checks = match name {
            "nilpotency" => nilpotency_suite(cfg, &mut rng),
            "leibniz" => leibniz_suite(cfg, &mut rng),
            "homotopy-dr" => homotopy_dr_suite(cfg, &mut rng),
            "homotopy-spencer" => homotopy_spencer_suite(cfg, &mut rng),
            "lie" => lie_suite(cfg, &mut rng),
            "e-x" => e_x_suite(cfg, &mut rng),
            "invariance" => invariance_suite(cfg, &mut rng),
            "ber-action" => ber_action_suite(cfg, &mut rng),
            "double-complex" => double_complex_suite(cfg, &mut rng),
            "poincare-integral" => poincare_integral_suite(cfg, &mut rng),
            _ => unreachable!(),
        };
        checks.extend(suite_checks);
    }
    let mut params = BTreeMap::new();
    params.insert("p".into(), cfg.p.to_string());
    params.insert("q".into(), cfg.q.to_string());
    params.insert("maxdeg".into(), cfg.max_deg.to_string());
    params.insert("maxz".into(), cfg.max_z.to_string());
    params.insert("trials".into(), cfg.trials.to_string());
    params.insert("maps".into(), cfg.maps.to_string());
    params.insert("exhaustive".into(), cfg.exhaustive.to_string());
    Ok(Report {
        suite: cfg.suite.clone(),
        params,
        checks,
        seed: cfg.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        elapsed_ms: start.elapsed().as_millis(),
    })
}

// ---------------------------------------------------------------------------
// random element generators

pub fn rand_scalar(rng: &mut ChaCha8Rng) -> Scalar {
    scalar::int(*[1i64, -1, 2, -2, 3].get(rng.gen_range(0..5)).unwrap())
}

pub fn rand_super_mono(dims: Dims, max_deg: u32, rng: &mut ChaCha8Rng) -> SuperMonomial {
    let mut m = SuperMonomial::unit(dims);
    let mut left = max_deg;
    for i in 0..dims.p {
        let e = rng.gen_range(0..=left.min(2));
        m.z[i] = e as u8;
        left -= e;
    }
    for a in 0..dims.q {
        if rng.gen_bool(0.5) {
            m.theta |= 1 << a;
        }
    }
    m
}

pub fn rand_super_poly(dims: Dims, max_deg: u32, rng: &mut ChaCha8Rng) -> SuperPoly {
    let mut f = SuperPoly::zero(dims);
    for _ in 0..rng.gen_range(1..=3) {
        f.add_term(rand_super_mono(dims, max_deg, rng), rand_scalar(rng));
    }
    f
}

/// Random parity-homogeneous polynomial of the requested parity.
pub fn rand_homog_poly(
    dims: Dims,
    max_deg: u32,
    parity: bool,
    rng: &mut ChaCha8Rng,
) -> SuperPoly {
    let mut f = SuperPoly::zero(dims);
    for _ in 0..8 {
        let m = rand_super_mono(dims, max_deg, rng);
        if m.is_odd() == parity {
            f.add_term(m, rand_scalar(rng));
        }
        if !f.is_zero() && rng.gen_bool(0.5) {
            break;
        }
    }
    if f.is_zero() && parity && dims.q > 0 {
        f.add_term(SuperMonomial::var(dims, Var::Theta(0)), scalar::one());
    }
    if f.is_zero() {
        f = SuperPoly::one(dims);
    }
    f
}

pub fn rand_der_mono(dims: Dims, max_deg: u32, rng: &mut ChaCha8Rng) -> DerMonomial {
    let mut m = DerMonomial::unit(dims);
    let mut left = max_deg;
    for i in 0..dims.p {
        let e = rng.gen_range(0..=left.min(2));
        m.dz[i] = e as u8;
        left -= e;
    }
    for a in 0..dims.q {
        if rng.gen_bool(0.4) {
            m.dth |= 1 << a;
        }
    }
    m
}

pub fn rand_weyl(dims: Dims, max_deg: u32, rng: &mut ChaCha8Rng) -> WeylOp {
    let mut op = WeylOp::zero(dims);
    for _ in 0..rng.gen_range(1..=3) {
        op.add_term(
            rand_super_mono(dims, max_deg, rng),
            rand_der_mono(dims, max_deg, rng),
            rand_scalar(rng),
        );
    }
    op
}

pub fn rand_form_mono(dims: Dims, max_deg: u32, rng: &mut ChaCha8Rng) -> FormMonomial {
    let mut m = FormMonomial::unit(dims);
    let mut left = max_deg;
    for a in 0..dims.q {
        let e = rng.gen_range(0..=left.min(2));
        m.dth[a] = e as u8;
        left -= e;
    }
    for i in 0..dims.p {
        if rng.gen_bool(0.4) {
            m.dz |= 1 << i;
        }
    }
    m
}

pub fn rand_form(dims: Dims, max_deg: u32, rng: &mut ChaCha8Rng) -> FormElem {
    let mut e = FormElem::zero(dims);
    for _ in 0..rng.gen_range(1..=3) {
        e.add_term(
            rand_form_mono(dims, max_deg, rng),
            rand_super_poly(dims, max_deg, rng),
        );
    }
    e
}

/// Random form whose total parity is homogeneous.
pub fn rand_homog_form(dims: Dims, max_deg: u32, parity: bool, rng: &mut ChaCha8Rng) -> FormElem {
    let mut e = FormElem::zero(dims);
    for _ in 0..6 {
        let m = rand_form_mono(dims, max_deg, rng);
        let coeff = rand_homog_poly(dims, max_deg, parity ^ m.is_odd(), rng);
        e.add_term(m, coeff);
        if !e.is_zero() && rng.gen_bool(0.6) {
            break;
        }
    }
    e
}

pub fn rand_poly_mono(dims: Dims, max_deg: u32, rng: &mut ChaCha8Rng) -> PolyMonomial {
    let mut m = PolyMonomial::unit(dims);
    let mut left = max_deg;
    for a in 0..dims.q {
        let e = rng.gen_range(0..=left.min(2));
        m.pth[a] = e as u8;
        left -= e;
    }
    for i in 0..dims.p {
        if rng.gen_bool(0.4) {
            m.pz |= 1 << i;
        }
    }
    m
}

pub fn rand_poly_elem(dims: Dims, max_deg: u32, rng: &mut ChaCha8Rng) -> PolyElem {
    let mut e = PolyElem::zero(dims);
    for _ in 0..rng.gen_range(1..=3) {
        e.add_term(
            rand_poly_mono(dims, max_deg, rng),
            rand_super_poly(dims, max_deg, rng),
        );
    }
    e
}

pub fn rand_homog_poly_elem(
    dims: Dims,
    max_deg: u32,
    parity: bool,
    rng: &mut ChaCha8Rng,
) -> PolyElem {
    let mut e = PolyElem::zero(dims);
    for _ in 0..6 {
        let m = rand_poly_mono(dims, max_deg, rng);
        let coeff = rand_homog_poly(dims, max_deg, parity ^ m.is_odd(), rng);
        e.add_term(m, coeff);
        if !e.is_zero() && rng.gen_bool(0.6) {
            break;
        }
    }
    e
}

/// Random parity-homogeneous vector field.
pub fn rand_vector_field(dims: Dims, max_deg: u32, rng: &mut ChaCha8Rng) -> VectorField {
    let parity = rng.gen_bool(0.5);
    let mut x = VectorField::zero(dims);
    for v in dims.vars() {
        if rng.gen_bool(0.6) {
            let comp = rand_homog_poly(dims, max_deg, parity ^ v.is_odd(), rng);
            if !comp.is_zero() {
                x.comps.insert(v, comp);
            }
        }
    }
    if x.comps.is_empty() {
        x.comps.insert(
            Var::Z(0),
            rand_homog_poly(dims, max_deg, parity, rng),
        );
    }
    x
}

pub fn rand_udr(dims: Dims, max_deg: u32, rng: &mut ChaCha8Rng) -> UdrElem {
    let mut e = UdrElem::zero(dims);
    for _ in 0..rng.gen_range(1..=3) {
        e.add_term(
            rand_form_mono(dims, max_deg, rng),
            rand_super_mono(dims, max_deg, rng),
            rand_der_mono(dims, max_deg, rng),
            rand_scalar(rng),
        );
    }
    e
}

pub fn rand_spencer(dims: Dims, max_deg: u32, rng: &mut ChaCha8Rng) -> SpencerElem {
    let mut e = SpencerElem::zero(dims);
    for _ in 0..rng.gen_range(1..=3) {
        e.add_term(
            rand_super_mono(dims, max_deg, rng),
            rand_der_mono(dims, max_deg, rng),
            rand_poly_mono(dims, max_deg, rng),
            rand_scalar(rng),
        );
    }
    e
}

pub fn rand_virtual(dims: Dims, max_deg: u32, rng: &mut ChaCha8Rng) -> VirtualForm {
    let mut e = VirtualForm::zero(dims);
    for _ in 0..rng.gen_range(1..=3) {
        e.add_term(
            rand_form_mono(dims, max_deg, rng),
            rand_super_mono(dims, max_deg, rng),
            rand_der_mono(dims, max_deg, rng),
            rand_poly_mono(dims, max_deg, rng),
            rand_scalar(rng),
        );
    }
    e
}

pub fn rand_integral(dims: Dims, max_deg: u32, rng: &mut ChaCha8Rng) -> IntegralForm {
    let mut e = IntegralForm::zero(dims);
    for _ in 0..rng.gen_range(1..=3) {
        e.add_term(
            rand_poly_mono(dims, max_deg, rng),
            rand_super_poly(dims, max_deg, rng),
        );
    }
    e
}

// ---------------------------------------------------------------------------
// greedy shrinking

/// Greedily removes terms while the predicate keeps failing.
pub fn shrink_terms<T, K>(
    mut value: T,
    keys: impl Fn(&T) -> Vec<K>,
    without: impl Fn(&T, &K) -> T,
    fails: impl Fn(&T) -> bool,
) -> T {
    loop {
        let mut improved = false;
        for k in keys(&value) {
            let candidate = without(&value, &k);
            if fails(&candidate) {
                value = candidate;
                improved = true;
                break;
            }
        }
        if !improved {
            return value;
        }
    }
}

pub fn shrink_virtual(v: VirtualForm, fails: impl Fn(&VirtualForm) -> bool) -> VirtualForm {
    shrink_terms(
        v,
        |x| x.terms.keys().cloned().collect::<Vec<_>>(),
        |x, k| {
            let mut y = x.clone();
            y.terms.remove(k);
            y
        },
        fails,
    )
}

pub fn shrink_spencer(v: SpencerElem, fails: impl Fn(&SpencerElem) -> bool) -> SpencerElem {
    shrink_terms(
        v,
        |x| x.terms.keys().cloned().collect::<Vec<_>>(),
        |x, k| {
            let mut y = x.clone();
            y.terms.remove(k);
            y
        },
        fails,
    )
}

pub fn shrink_udr(v: UdrElem, fails: impl Fn(&UdrElem) -> bool) -> UdrElem {
    shrink_terms(
        v,
        |x| x.terms.keys().cloned().collect::<Vec<_>>(),
        |x, k| {
            let mut y = x.clone();
            y.terms.remove(k);
            y
        },
        fails,
    )
}

// ---------------------------------------------------------------------------
// suites

fn zero_check<T: PartialEq + std::fmt::Debug>(
    name: impl Into<String>,
    input: String,
    result: &T,
    zero: &T,
    render: impl Fn(&T) -> String,
) -> Check {
    Check::of(
        name,
        input,
        "0".to_string(),
        if result == zero {
            "0".to_string()
        } else {
            render(result)
        },
    )
}

fn nilpotency_suite(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let dims = cfg.dims();
    let mut checks = Vec::new();
    if cfg.exhaustive {
        checks.extend(exhaustive_nilpotency(dims, cfg.max_deg));
    }
    for t in 0..cfg.trials {
        let e = rand_udr(dims, cfg.max_deg, rng);
        let dd = e.big_d().big_d();
        if !dd.is_zero() {
            let bad = shrink_udr(e, |x| !x.big_d().big_d().is_zero());
            checks.push(Check::of(
                format!("bigD^2[{t}]"),
                grammar::render_udr(&bad),
                "0".into(),
                grammar::render_udr(&bad.big_d().big_d()),
            ));
        } else {
            checks.push(Check::pass(format!("bigD^2[{t}]")));
        }
        let s = rand_spencer(dims, cfg.max_deg, rng);
        let dd = s.spencer_delta().spencer_delta();
        if !dd.is_zero() {
            let bad = shrink_spencer(s, |x| !x.spencer_delta().spencer_delta().is_zero());
            checks.push(Check::of(
                format!("delta^2[{t}]"),
                grammar::render_spencer(&bad),
                "0".into(),
                grammar::render_spencer(&bad.spencer_delta().spencer_delta()),
            ));
        } else {
            checks.push(Check::pass(format!("delta^2[{t}]")));
        }
        let v = rand_virtual(dims, cfg.max_deg, rng);
        for (label, result) in [
            ("dhat^2", v.d_hat().d_hat()),
            ("deltahat^2", v.delta_hat().delta_hat()),
            ("totalD^2", v.total_d().total_d()),
            (
                "anticommute",
                v.d_hat().delta_hat().add(&v.delta_hat().d_hat()),
            ),
            (
                "corcomm",
                v.d_hat().delta_plain().sub(&v.delta_plain().d_hat()),
            ),
        ] {
            if !result.is_zero() {
                let bad = shrink_virtual(v.clone(), |x| match label {
                    "dhat^2" => !x.d_hat().d_hat().is_zero(),
                    "deltahat^2" => !x.delta_hat().delta_hat().is_zero(),
                    "totalD^2" => !x.total_d().total_d().is_zero(),
                    "anticommute" => !x.d_hat().delta_hat().add(&x.delta_hat().d_hat()).is_zero(),
                    _ => !x.d_hat().delta_plain().sub(&x.delta_plain().d_hat()).is_zero(),
                });
                checks.push(Check::of(
                    format!("{label}[{t}]"),
                    grammar::render_virtual(&bad),
                    "0".into(),
                    "nonzero".into(),
                ));
            } else {
                checks.push(Check::pass(format!("{label}[{t}]")));
            }
        }
        // D = D1 + D2 on the plain tensor product
        let free = universal::FreeUdr::from_pairs(
            dims,
            &[(rand_form(dims, cfg.max_deg, rng), rand_weyl(dims, cfg.max_deg, rng))],
        );
        let anti = free.d1().d2().add(&free.d2().d1());
        checks.push(zero_check(
            format!("[D1,D2][{t}]"),
            String::new(),
            &anti.is_zero(),
            &true,
            |_| "nonzero".into(),
        ));
    }
    checks
}

/// Exhaustive nilpotency window used by the acceptance gate; parallel over
/// basis monomials.
pub fn exhaustive_nilpotency(dims: Dims, max_deg: u32) -> Vec<Check> {
    let forms = forms::enumerate_monomials(dims, max_deg);
    let supers = superpoly::enumerate_monomials(dims, max_deg);
    let ders = universal::enumerate_der_monomials(dims, max_deg);
    let polys = polyfields::enumerate_monomials(dims, max_deg);
    // virtual basis
    let mut keys = Vec::new();
    for fm in &forms {
        for xm in &supers {
            for dm in &ders {
                for pm in &polys {
                    keys.push((fm.clone(), xm.clone(), dm.clone(), pm.clone()));
                }
            }
        }
    }
    let failures: Vec<String> = keys
        .par_iter()
        .filter_map(|(fm, xm, dm, pm)| {
            let mut v = VirtualForm::zero(dims);
            v.add_term(fm.clone(), xm.clone(), dm.clone(), pm.clone(), scalar::one());
            let ok = v.d_hat().d_hat().is_zero()
                && v.delta_hat().delta_hat().is_zero()
                && v.d_hat().delta_hat().add(&v.delta_hat().d_hat()).is_zero()
                && v.d_hat().delta_plain().sub(&v.delta_plain().d_hat()).is_zero();
            (!ok).then(|| grammar::render_virtual(&v))
        })
        .collect();
    let mut checks = vec![Check::of(
        format!("exhaustive-nilpotency[{} monomials]", keys.len()),
        String::new(),
        "0 failures".into(),
        format!("{} failures{}", failures.len(), failures.first().map(|s| format!(" ({s})")).unwrap_or_default()),
    )];
    // total differential squared on the whole window follows from the three
    // identities above; spot-check it on a sample anyway
    let sample: Vec<_> = keys.iter().step_by(101.max(keys.len() / 500)).collect();
    let bad = sample
        .par_iter()
        .filter(|(fm, xm, dm, pm)| {
            let mut v = VirtualForm::zero(dims);
            v.add_term(fm.clone(), xm.clone(), dm.clone(), pm.clone(), scalar::one());
            !v.total_d().total_d().is_zero()
        })
        .count();
    checks.push(Check::of(
        format!("exhaustive-totalD^2[{} sampled]", sample.len()),
        String::new(),
        "0 failures".into(),
        format!("{bad} failures"),
    ));
    checks
}

fn leibniz_suite(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let dims = cfg.dims();
    let mut checks = Vec::new();
    for t in 0..cfg.trials {
        // partials
        let f = rand_homog_poly(dims, cfg.max_deg, rng.gen_bool(0.5), rng);
        let g = rand_super_poly(dims, cfg.max_deg, rng);
        for v in dims.vars() {
            let lhs = f.mul(&g).partial(v);
            let mut second = f.mul(&g.partial(v));
            if v.is_odd() && f.parity() == Some(true) {
                second = second.neg();
            }
            let rhs = f.partial(v).mul(&g).add(&second);
            checks.push(zero_check(
                format!("partial-leibniz[{t},{v:?}]"),
                grammar::render_poly(&f),
                &lhs.sub(&rhs).is_zero(),
                &true,
                |_| "nonzero".into(),
            ));
        }
        // exterior derivative
        let parity = rng.gen_bool(0.5);
        let omega = rand_homog_form(dims, cfg.max_deg, parity, rng);
        let eta = rand_form(dims, cfg.max_deg, rng);
        let lhs = omega.mul(&eta).exterior_d();
        let mut second = omega.mul(&eta.exterior_d());
        if parity {
            second = second.neg();
        }
        let rhs = omega.exterior_d().mul(&eta).add(&second);
        checks.push(zero_check(
            format!("exterior-leibniz[{t}]"),
            grammar::render_form(&omega),
            &lhs.sub(&rhs).is_zero(),
            &true,
            |_| "nonzero".into(),
        ));
        // contraction is a superderivation
        let v = *[
            Var::Z(0),
            Var::Theta(0),
            Var::Z(dims.p - 1),
            Var::Theta(dims.q - 1),
        ]
        .get(rng.gen_range(0..4))
        .unwrap();
        let one_form_parity = rng.gen_bool(0.5);
        let mut omega1 = FormElem::zero(dims);
        omega1.add_term(
            FormMonomial::gen(dims, v),
            rand_homog_poly(dims, cfg.max_deg, one_form_parity ^ !v.is_odd(), rng),
        );
        let t1_parity = rng.gen_bool(0.5);
        let tau1 = rand_homog_poly_elem(dims, cfg.max_deg, t1_parity, rng);
        let tau2 = rand_poly_elem(dims, cfg.max_deg, rng);
        let lhs = omega1.contract_one(&tau1.mul(&tau2)).unwrap();
        let mut second = tau1.mul(&omega1.contract_one(&tau2).unwrap());
        if one_form_parity && t1_parity {
            second = second.neg();
        }
        let rhs = omega1.contract_one(&tau1).unwrap().mul(&tau2).add(&second);
        checks.push(zero_check(
            format!("contract-superderivation[{t}]"),
            grammar::render_form(&omega1),
            &lhs.sub(&rhs).is_zero(),
            &true,
            |_| "nonzero".into(),
        ));
    }
    // <df, pi X> = (-1)^{(|X|+1)(|f|+1)} X(f) for all coordinates
    for f_var in dims.vars() {
        for x_var in dims.vars() {
            let f = SuperPoly::var(dims, f_var);
            let df = FormElem::from_poly(&f).exterior_d();
            let x = VectorField::coordinate(dims, x_var);
            let lhs = df.contract_one(&x.to_pi()).unwrap();
            let mut rhs = PolyElem::from_poly(&x.apply(&f));
            if (x_var.is_odd() ^ true) && (f_var.is_odd() ^ true) {
                rhs = rhs.neg();
            }
            checks.push(zero_check(
                format!("pairing-cross-check[{f_var:?},{x_var:?}]"),
                String::new(),
                &lhs.sub(&rhs).is_zero(),
                &true,
                |_| "nonzero".into(),
            ));
        }
    }
    checks
}

/// Exhaustive de Rham homotopy eigenvalue window on the co-normal basis;
/// returns (checked count, failures).
pub fn de_rham_eigen_window(dims: Dims, max_deg: u32) -> (usize, Vec<String>) {
    let forms = forms::enumerate_monomials(dims, max_deg);
    let ders = universal::enumerate_der_monomials(dims, max_deg);
    let supers = superpoly::enumerate_monomials(dims, max_deg);
    let mut keys = Vec::new();
    for fm in &forms {
        for j in &ders {
            for xm in &supers {
                keys.push((fm.clone(), j.clone(), xm.clone()));
            }
        }
    }
    let failures: Vec<String> = keys
        .par_iter()
        .filter_map(|(fm, j, xm)| {
            let m = UdrCoElem::monomial(dims, fm.clone(), j.clone(), xm.clone());
            let c = universal::eigenvalue_c(dims, fm, j);
            let lhs = m.big_d().homotopy_h().add(&m.homotopy_h().big_d());
            let ok = lhs == m.scale(&scalar::int(c))
                && ((c == 0) == universal::in_c_kernel_locus(dims, fm, j));
            (!ok).then(|| format!("({fm:?},{j:?},{xm:?})"))
        })
        .collect();
    (keys.len(), failures)
}

fn homotopy_dr_suite(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let dims = cfg.dims();
    let mut checks = Vec::new();
    if cfg.exhaustive {
        let (count, failures) = de_rham_eigen_window(dims, cfg.max_deg);
        checks.push(Check::of(
            format!("eigenvalue-window[{count} monomials]"),
            String::new(),
            "0 failures".into(),
            format!("{} failures{}", failures.len(), failures.first().cloned().unwrap_or_default()),
        ));
    } else {
        for t in 0..cfg.trials {
            let fm = rand_form_mono(dims, cfg.max_deg, rng);
            let j = rand_der_mono(dims, cfg.max_deg, rng);
            let xm = rand_super_mono(dims, cfg.max_deg, rng);
            let m = UdrCoElem::monomial(dims, fm.clone(), j.clone(), xm);
            let c = universal::eigenvalue_c(dims, &fm, &j);
            let lhs = m.big_d().homotopy_h().add(&m.homotopy_h().big_d());
            checks.push(zero_check(
                format!("eigenvalue[{t}] c={c}"),
                String::new(),
                &(lhs == m.scale(&scalar::int(c))),
                &true,
                |_| "mismatch".into(),
            ));
        }
    }
    checks
}

/// Exhaustive Spencer homotopy eigenvalue window on the canonical basis.
pub fn spencer_eigen_window(dims: Dims, max_deg: u32) -> (usize, Vec<String>) {
    let supers = superpoly::enumerate_monomials(dims, max_deg);
    let ders = universal::enumerate_der_monomials(dims, max_deg);
    let polys = polyfields::enumerate_monomials(dims, max_deg);
    let mut keys = Vec::new();
    for xm in &supers {
        for dm in &ders {
            for pm in &polys {
                keys.push((xm.clone(), dm.clone(), pm.clone()));
            }
        }
    }
    let failures: Vec<String> = keys
        .par_iter()
        .filter_map(|(xm, dm, pm)| {
            let m = SpencerElem::monomial(dims, xm.clone(), dm.clone(), pm.clone());
            let e = universal::spencer_eigenvalue(dm, pm);
            let lhs = m.spencer_delta().homotopy_k().add(&m.homotopy_k().spencer_delta());
            let kernel_ok = (e == 0) == (dm.degree() == 0 && pm.poly_degree() == 0);
            let ok = lhs == m.scale(&scalar::int(e)) && kernel_ok;
            (!ok).then(|| grammar::render_spencer(&m))
        })
        .collect();
    (keys.len(), failures)
}

fn homotopy_spencer_suite(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let dims = cfg.dims();
    let mut checks = Vec::new();
    if cfg.exhaustive {
        let (count, failures) = spencer_eigen_window(dims, cfg.max_deg);
        checks.push(Check::of(
            format!("spencer-eigenvalue-window[{count} monomials]"),
            String::new(),
            "0 failures".into(),
            format!("{} failures{}", failures.len(), failures.first().cloned().unwrap_or_default()),
        ));
    } else {
        for t in 0..cfg.trials {
            let xm = rand_super_mono(dims, cfg.max_deg, rng);
            let dm = rand_der_mono(dims, cfg.max_deg, rng);
            let pm = rand_poly_mono(dims, cfg.max_deg, rng);
            let m = SpencerElem::monomial(dims, xm, dm.clone(), pm.clone());
            let e = universal::spencer_eigenvalue(&dm, &pm);
            let lhs = m.spencer_delta().homotopy_k().add(&m.homotopy_k().spencer_delta());
            checks.push(zero_check(
                format!("spencer-eigenvalue[{t}] e={e}"),
                grammar::render_spencer(&m),
                &(lhs == m.scale(&scalar::int(e))),
                &true,
                |_| "mismatch".into(),
            ));
        }
    }
    checks
}

fn lie_suite(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let dims = cfg.dims();
    let mut checks = Vec::new();
    for t in 0..cfg.trials {
        let x = rand_vector_field(dims, cfg.max_deg, rng);
        let px = x.parity().unwrap();
        // (2) super Leibniz
        let t1_parity = rng.gen_bool(0.5);
        let tau1 = rand_homog_poly_elem(dims, cfg.max_deg, t1_parity, rng);
        let tau2 = rand_poly_elem(dims, cfg.max_deg, rng);
        let lhs = polyfields::lie_derivative(&x, &tau1.mul(&tau2));
        let mut second = tau1.mul(&polyfields::lie_derivative(&x, &tau2));
        if px && t1_parity {
            second = second.neg();
        }
        let rhs = polyfields::lie_derivative(&x, &tau1).mul(&tau2).add(&second);
        checks.push(zero_check(
            format!("prop-lie-2[{t}]"),
            grammar::render_polyfield(&tau1),
            &lhs.sub(&rhs).is_zero(),
            &true,
            |_| "nonzero".into(),
        ));
        // (3) L_{fX} = f L_X + (-1)^{|X||f|} pi X <df, tau>
        let pf = rng.gen_bool(0.5);
        let f = rand_homog_poly(dims, cfg.max_deg, pf, rng);
        let tau = rand_poly_elem(dims, cfg.max_deg, rng);
        let fx = {
            let mut fx = VectorField::zero(dims);
            for (v, comp) in &x.comps {
                let c = f.mul(comp);
                if !c.is_zero() {
                    fx.comps.insert(*v, c);
                }
            }
            fx
        };
        let lhs = polyfields::lie_derivative(&fx, &tau);
        let df = FormElem::from_poly(&f).exterior_d();
        let mut second = x.to_pi().mul(&df.contract_one(&tau).unwrap());
        if px && pf {
            second = second.neg();
        }
        let rhs = polyfields::lie_derivative(&x, &tau)
            .mul_fn_left(&f)
            .add(&second);
        checks.push(zero_check(
            format!("prop-lie-3[{t}]"),
            grammar::render_poly(&f),
            &lhs.sub(&rhs).is_zero(),
            &true,
            |_| "nonzero".into(),
        ));
        // (1) degree-one closed form against the recursion base
        let tau_deg1 = {
            let mut e = PolyElem::zero(dims);
            let v = if rng.gen_bool(0.5) {
                Var::Z(rng.gen_range(0..dims.p))
            } else {
                Var::Theta(rng.gen_range(0..dims.q))
            };
            e.add_term(
                PolyMonomial::gen(dims, v),
                rand_homog_poly(dims, cfg.max_deg, rng.gen_bool(0.5), rng),
            );
            e
        };
        let got = polyfields::lie_derivative(&x, &tau_deg1);
        // independent route: bracket in the Weyl algebra
        let pi_tau_op = {
            let mut op = WeylOp::zero(dims);
            for (pm, coeff) in &tau_deg1.terms {
                let v = pm.factors()[0];
                op = op.add(&WeylOp::derivative(dims, v).left_mul_poly(coeff));
            }
            op
        };
        let bracket = x.to_weyl().super_commutator(&pi_tau_op);
        let expect = VectorField::from_weyl(&bracket)
            .map(|f| f.to_pi())
            .unwrap_or_else(|| PolyElem::zero(dims));
        checks.push(zero_check(
            format!("prop-lie-1[{t}]"),
            grammar::render_polyfield(&tau_deg1),
            &got.sub(&expect).is_zero(),
            &true,
            |_| "nonzero".into(),
        ));
        // defining recursion with the 1-form surrogate, degree <= 3
        let omega1 = {
            let mut e = FormElem::zero(dims);
            let v = if rng.gen_bool(0.5) {
                Var::Z(rng.gen_range(0..dims.p))
            } else {
                Var::Theta(rng.gen_range(0..dims.q))
            };
            e.add_term(
                FormMonomial::gen(dims, v),
                rand_homog_poly(dims, cfg.max_deg, rng.gen_bool(0.5), rng),
            );
            e
        };
        let p_omega = omega1.parity().unwrap_or(false);
        let tau = rand_homog_poly_elem(dims, 3, rng.gen_bool(0.5), rng);
        let lhs = polyfields::lie_derivative(&x, &omega1.contract_one(&tau).unwrap());
        let mut second = polyfields::lie_on_one_form(&x, &omega1)
            .contract_one(&tau)
            .unwrap()
            .add(&{
                let mut inner = omega1
                    .contract_one(&polyfields::lie_derivative(&x, &tau))
                    .unwrap();
                if p_omega && px {
                    inner = inner.neg();
                }
                inner
            });
        let defect = lhs.sub(&second);
        second = PolyElem::zero(dims);
        let _ = second;
        checks.push(zero_check(
            format!("lie-star-recursion[{t}]"),
            grammar::render_form(&omega1),
            &defect.is_zero(),
            &true,
            |_| "nonzero".into(),
        ));
    }
    checks
}

fn e_x_suite(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let dims = cfg.dims();
    let mut checks = Vec::new();
    for t in 0..cfg.trials {
        let pf = rng.gen_bool(0.5);
        let f = rand_homog_poly(dims, cfg.max_deg, pf, rng);
        let tau = rand_poly_elem(dims, cfg.max_deg, rng);
        // e_x(f tau) = (-1)^{|f|} f e_x(tau)
        //              + sum_a (-1)^{|f|(|x_a|+1)} (D_a f) <dx_a, tau>
        let lhs = polyfields::e_x(&tau.mul_fn_left(&f));
        let mut rhs = polyfields::e_x(&tau).mul_fn_left(&f);
        if pf {
            rhs = rhs.neg();
        }
        for a in dims.vars() {
            let da_f = f.partial(a);
            if da_f.is_zero() {
                continue;
            }
            let mut term = FormElem::gen(dims, a)
                .contract_one(&tau)
                .unwrap()
                .mul_fn_left(&da_f);
            if pf && !a.is_odd() {
                term = term.neg();
            }
            rhs = rhs.add(&term);
        }
        checks.push(zero_check(
            format!("prop-e[{t}]"),
            grammar::render_poly(&f),
            &lhs.sub(&rhs).is_zero(),
            &true,
            |_| "nonzero".into(),
        ));
    }
    checks
}

fn invariance_suite(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let dims = cfg.dims();
    let mut checks = Vec::new();
    let mut delta1_witness: Option<String> = None;
    for m in 0..cfg.maps {
        let g = coord_change::random_map(dims, rng);
        let t = match Transport::new(&g) {
            Ok(t) => t,
            Err(e) => {
                checks.push(Check::of(
                    format!("map[{m}]-invertible"),
                    render_map(&g),
                    "invertible".into(),
                    e.to_string(),
                ));
                continue;
            }
        };
        // D commutes with transport
        let e = rand_udr(dims, cfg.max_deg, rng);
        let lhs = t.udr(&e.big_d());
        let rhs = t.udr(&e).big_d();
        checks.push(zero_check(
            format!("D-invariance[{m}]"),
            render_map(&g),
            &lhs.sub(&rhs).is_zero(),
            &true,
            |_| "nonzero".into(),
        ));
        // delta commutes with transport
        let s = rand_spencer(dims, cfg.max_deg, rng);
        let lhs = t.spencer(&s.spencer_delta());
        let rhs = t.spencer(&s).spencer_delta();
        checks.push(zero_check(
            format!("delta-invariance[{m}]"),
            render_map(&g),
            &lhs.sub(&rhs).is_zero(),
            &true,
            |_| "nonzero".into(),
        ));
        // delta_1 alone must fail for some map and element
        if delta1_witness.is_none() {
            for _ in 0..3 {
                let pairs = vec![(
                    rand_weyl(dims, cfg.max_deg, rng),
                    rand_poly_elem(dims, cfg.max_deg, rng),
                )];
                if let Some(w) = delta1_witness_for(dims, &t, &g, &pairs) {
                    delta1_witness = Some(w);
                    break;
                }
            }
        }
    }
    // a dilation-type map with coordinate-dependent Jacobian exhibits the
    // cancellation deterministically
    if delta1_witness.is_none() && dims.q >= 2 {
        if let Some(g) = dilation_map(dims) {
            if let Ok(t) = Transport::new(&g) {
                'outer: for v in dims.vars() {
                    for w in dims.vars() {
                        let pairs = vec![(
                            WeylOp::derivative(dims, v),
                            PolyElem::gen(dims, w),
                        )];
                        if let Some(found) = delta1_witness_for(dims, &t, &g, &pairs) {
                            delta1_witness = Some(found);
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    checks.push(Check::of(
        "delta1-alone-fails-witness",
        delta1_witness.clone().unwrap_or_default(),
        "found".into(),
        if delta1_witness.is_some() {
            "found".into()
        } else {
            "not found".into()
        },
    ));
    // e_x is not invariant: the correction term of the chart change is
    // nonzero for some map
    let mut ex_witness = false;
    let mut rng2 = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    let mut candidates: Vec<SuperCoordMap> = dilation_map(dims).into_iter().collect();
    for _ in 0..cfg.maps.max(10) {
        candidates.push(coord_change::random_map(dims, &mut rng2));
    }
    'search: for g in candidates {
        if let Ok(t) = Transport::new(&g) {
            for v in dims.vars() {
                let tau = PolyElem::gen(dims, v);
                let lhs = t.polyfield(&polyfields::e_x(&tau));
                let rhs = polyfields::e_x(&t.polyfield(&tau));
                if !lhs.sub(&rhs).is_zero() {
                    ex_witness = true;
                    break 'search;
                }
            }
            let tau = rand_poly_elem(dims, cfg.max_deg, &mut rng2);
            let lhs = t.polyfield(&polyfields::e_x(&tau));
            let rhs = polyfields::e_x(&t.polyfield(&tau));
            if !lhs.sub(&rhs).is_zero() {
                ex_witness = true;
                break 'search;
            }
        }
    }
    checks.push(Check::of(
        "e-x-non-invariance-witness",
        String::new(),
        "found".into(),
        if ex_witness { "found".into() } else { "not found".into() },
    ));
    checks
}

/// Checks whether `delta_1` fails to commute with the transport on the
/// given presentation while the full differential commutes; returns the
/// logged witness on success.
fn delta1_witness_for(
    dims: Dims,
    t: &Transport,
    g: &SuperCoordMap,
    pairs: &[(WeylOp, PolyElem)],
) -> Option<String> {
    let lhs = t.spencer(&coord_change::spencer_delta_1_pairs(dims, pairs));
    let transported = t.spencer_pairs(pairs);
    let rhs = coord_change::spencer_delta_1_pairs(dims, &transported);
    if lhs.sub(&rhs).is_zero() {
        return None;
    }
    let full_l = t.spencer(&universal::spencer_delta_pairs(dims, pairs));
    let full_r = universal::spencer_delta_pairs(dims, &transported);
    full_l.sub(&full_r).is_zero().then(|| render_map(g))
}

/// `z_1' = z_1 + z_1 th_1 th_2`, identity elsewhere: its inverse Jacobian
/// depends on the coordinates, which drives the `e_x` correction term.
fn dilation_map(dims: Dims) -> Option<SuperCoordMap> {
    if dims.q < 2 {
        return None;
    }
    let mut targets: Vec<SuperPoly> = dims.vars().map(|v| SuperPoly::var(dims, v)).collect();
    let bump = SuperPoly::var(dims, Var::Z(0))
        .mul(&SuperPoly::var(dims, Var::Theta(0)))
        .mul(&SuperPoly::var(dims, Var::Theta(1)));
    targets[0] = targets[0].add(&bump);
    SuperCoordMap::new(dims, targets).ok()
}

fn render_map(g: &SuperCoordMap) -> String {
    let mut lines = Vec::new();
    for (i, v) in g.dims.vars().enumerate() {
        let name = match v {
            Var::Z(k) => format!("z{}", k + 1),
            Var::Theta(k) => format!("th{}", k + 1),
        };
        lines.push(format!("{name}' = {}", grammar::render_poly(&g.targets[i])));
    }
    lines.join("; ")
}

fn ber_action_suite(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let dims = cfg.dims();
    let mut checks = Vec::new();
    let phi = BerSection::generator(dims);
    for v in dims.vars() {
        checks.push(zero_check(
            format!("phi-kills-derivative[{v:?}]"),
            String::new(),
            &berezin::ber_right_action(&phi, &WeylOp::derivative(dims, v)).is_zero(),
            &true,
            |_| "nonzero".into(),
        ));
    }
    for t in 0..cfg.trials {
        // phi f . X matches the explicit Lie-derivative formula
        let pf = rng.gen_bool(0.5);
        let f = rand_homog_poly(dims, cfg.max_deg, pf, rng);
        let s = BerSection::new(f.clone());
        let x = rand_vector_field(dims, cfg.max_deg, rng);
        let lhs = berezin::ber_right_action(&s, &x.to_weyl());
        // action formula: -phi sum_a (-1)^{|x_a|(|X^a|+|f|)} D_a(f X^a)
        let mut rhs = SuperPoly::zero(dims);
        for (a, comp) in &x.comps {
            let pcomp = x.parity().unwrap() ^ a.is_odd();
            let term = f.mul(comp).partial(*a);
            let neg = a.is_odd() && (pcomp ^ pf);
            rhs = rhs.add(&if neg { term.neg() } else { term });
        }
        let rhs = BerSection::new(rhs.neg());
        checks.push(zero_check(
            format!("action-lie-formula[{t}]"),
            grammar::render_ber(&s),
            &(lhs == rhs),
            &true,
            |_| "mismatch".into(),
        ));
        // consistency with the Lie derivative
        let mut expect = berezin::ber_lie(&x, &s).neg();
        if s.parity().unwrap() && x.parity().unwrap() {
            expect = expect.neg();
        }
        checks.push(zero_check(
            format!("action-equals-lie[{t}]"),
            grammar::render_ber(&s),
            &(lhs == expect),
            &true,
            |_| "mismatch".into(),
        ));
        // right module law
        let a = rand_weyl(dims, 2, rng);
        let b = rand_weyl(dims, 2, rng);
        let s = BerSection::new(rand_super_poly(dims, cfg.max_deg, rng));
        let stepwise = berezin::ber_right_action(&berezin::ber_right_action(&s, &a), &b);
        let product = berezin::ber_right_action(&s, &a.compose(&b));
        checks.push(zero_check(
            format!("right-module-law[{t}]"),
            grammar::render_ber(&s),
            &(stepwise == product),
            &true,
            |_| "mismatch".into(),
        ));
    }
    checks
}

fn double_complex_suite(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let dims = cfg.dims();
    let mut checks = Vec::new();
    for t in 0..cfg.trials {
        let v = rand_virtual(dims, cfg.max_deg, rng);
        checks.push(zero_check(
            format!("plain-commutation[{t}]"),
            String::new(),
            &v.d_hat().delta_plain().sub(&v.delta_plain().d_hat()).is_zero(),
            &true,
            |_| "nonzero".into(),
        ));
        // bidegree bookkeeping
        let mut single = VirtualForm::zero(dims);
        let fm = rand_form_mono(dims, cfg.max_deg, rng);
        let xm = rand_super_mono(dims, cfg.max_deg, rng);
        let dm = rand_der_mono(dims, cfg.max_deg, rng);
        let pm = rand_poly_mono(dims, cfg.max_deg, rng);
        let bideg = (-(pm.poly_degree() as i64), fm.form_degree() as i64);
        single.add_term(fm, xm, dm, pm, scalar::one());
        let dh = single.d_hat();
        let dh_ok = dh
            .bidegrees()
            .iter()
            .all(|&(a, b)| (a, b) == (bideg.0, bideg.1 + 1));
        let del = single.delta_hat();
        let del_ok = del
            .bidegrees()
            .iter()
            .all(|&(a, b)| (a, b) == (bideg.0 + 1, bideg.1));
        checks.push(Check::of(
            format!("bidegree-shifts[{t}]"),
            grammar::render_virtual(&single),
            "d^:(0,1) delta^:(1,0)".into(),
            if dh_ok && del_ok {
                "d^:(0,1) delta^:(1,0)".into()
            } else {
                "wrong shift".into()
            },
        ));
        // K-witness exactness for nonzero Spencer eigenvalues
        let closed = v.delta_hat();
        let mut witness_ok = true;
        for (eig, part) in closed.spencer_eigen_split() {
            if eig == 0 {
                witness_ok &= part.is_zero();
                continue;
            }
            let witness = part.k_hat().scale(&scalar::frac(1, eig));
            witness_ok &= witness.delta_hat() == part;
        }
        checks.push(Check::of(
            format!("k-witness[{t}]"),
            grammar::render_virtual(&v),
            "exact".into(),
            if witness_ok { "exact".into() } else { "failed".into() },
        ));
    }
    // induced differentials on page-one representatives
    for t in 0..cfg.trials {
        let omega = rand_form(dims, cfg.max_deg, rng);
        let ok = virtual_double::induced_form_d(&omega) == Some(omega.exterior_d());
        checks.push(Check::of(
            format!("e1-omega-induced[{t}]"),
            grammar::render_form(&omega),
            "exteriorD".into(),
            if ok { "exteriorD".into() } else { "mismatch".into() },
        ));
        let s = rand_integral(dims, cfg.max_deg, rng);
        let ok = virtual_double::induced_integral_delta(&s)
            == Some(berezin::integral_delta(&s));
        checks.push(Check::of(
            format!("e1-sigma-induced[{t}]"),
            grammar::render_integral(&s),
            "integralDelta".into(),
            if ok { "integralDelta".into() } else { "mismatch".into() },
        ));
    }
    checks
}

fn poincare_integral_suite(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let dims = cfg.dims();
    let mut checks = Vec::new();
    if cfg.exhaustive {
        let (count, failures) = poincare_window(dims, cfg.max_z);
        checks.push(Check::of(
            format!("homotopy-window[{count} monomials]"),
            String::new(),
            "0 failures".into(),
            format!("{} failures{}", failures.len(), failures.first().cloned().unwrap_or_default()),
        ));
    } else {
        for t in 0..cfg.trials {
            let s = rand_integral(dims, cfg.max_z, rng);
            let defect = poincare::homotopy_defect(&s);
            checks.push(Check::of(
                format!("homotopy-identity[{t}]"),
                grammar::render_integral(&s),
                "0".into(),
                match defect {
                    Ok(d) if d.is_zero() => "0".into(),
                    Ok(d) => grammar::render_integral(&d),
                    Err(e) => e.to_string(),
                },
            ));
        }
    }
    // s0 closed and not exact; table
    let window = TruncationWindow {
        dims,
        max_z: cfg.max_z,
    };
    checks.push(zero_check(
        "s0-closed",
        grammar::render_integral(&berezin::s0(dims)),
        &berezin::integral_delta(&berezin::s0(dims)).is_zero(),
        &true,
        |_| "nonzero".into(),
    ));
    checks.push(Check::of(
        "s0-not-exact",
        String::new(),
        "true".into(),
        poincare::integral_h0_generated_by_s0(&window).to_string(),
    ));
    let table = poincare::integral_cohomology(&window);
    let ok = table
        .entries
        .iter()
        .all(|e| (e.degree == 0 && (e.even, e.odd) == (1, 0)) || (e.degree != 0 && (e.even, e.odd) == (0, 0)));
    checks.push(Check::of(
        "truncated-table",
        format!("max_z={}", cfg.max_z),
        "H^0 = 1|0, else 0".into(),
        if ok {
            "H^0 = 1|0, else 0".into()
        } else {
            format!("{:?}", table.entries)
        },
    ));
    checks
}

/// Exhaustive integral-form homotopy window; parallel over basis monomials.
pub fn poincare_window(dims: Dims, max_z: u32) -> (usize, Vec<String>) {
    let polys = polyfields::enumerate_monomials(dims, max_z);
    let supers = superpoly::enumerate_monomials(dims, max_z);
    let mut keys = Vec::new();
    for pm in &polys {
        for fm in &supers {
            keys.push((pm.clone(), fm.clone()));
        }
    }
    let failures: Vec<String> = keys
        .par_iter()
        .filter_map(|(pm, fm)| {
            let s = IntegralForm::new(
                dims,
                SuperPoly::monomial(dims, fm.clone(), scalar::one()),
                pm.clone(),
            );
            match poincare::homotopy_defect(&s) {
                Ok(d) if d.is_zero() => None,
                Ok(_) => Some(grammar::render_integral(&s)),
                Err(e) => Some(format!("{e} on {}", grammar::render_integral(&s))),
            }
        })
        .collect();
    (keys.len(), failures)
}
