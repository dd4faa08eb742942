//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line. Everything is exact rational arithmetic; the only tolerances are
//! the runtime targets, asserted where stated.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use superforms::berezin::{self, BerSection, IntegralForm};
use superforms::coord::{Dims, Var};
use superforms::coord_change::{self, Transport};
use superforms::forms::{self, FormElem};
use superforms::poincare::{self, TruncationWindow};
use superforms::polyfields::{self, PolyElem, PolyMonomial, VectorField};
use superforms::scalar;
use superforms::specseq;
use superforms::superpoly::{self, SuperPoly};
use superforms::universal::{self, FreeUdr, SpencerElem, UdrElem};
use superforms::verify::{self, RunConfig};
use superforms::virtual_double::{self, VirtualForm};
use superforms::weyl::WeylOp;

fn small_dims() -> Vec<Dims> {
    vec![
        Dims::new(1, 1),
        Dims::new(1, 2),
        Dims::new(2, 1),
        Dims::new(2, 2),
    ]
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

/// Criterion 1: every differential squares to zero, the two lifted
/// differentials anticommute, the plain ones commute, and `D_1`, `D_2`
/// anticommute on the free presentation; exhaustive at `p,q <= 2` with all
/// degrees `<= 3`, plus 200 seeded random elements at `p = q = 3`;
/// runtime under 60 s.
#[test]
fn criterion_1_nilpotency_and_commutation() {
    let start = Instant::now();
    let mut failures = 0usize;
    let mut checked = 0usize;
    for dims in small_dims() {
        let forms_basis = forms::enumerate_monomials(dims, 3);
        let supers = superpoly::enumerate_monomials(dims, 3);
        let ders = universal::enumerate_der_monomials(dims, 3);
        let polys = polyfields::enumerate_monomials(dims, 3);
        // universal de Rham and Spencer squares on the canonical bases
        let udr_fail = forms_basis
            .par_iter()
            .map(|fm| {
                let mut bad = 0usize;
                for xm in &supers {
                    for dm in &ders {
                        let mut e = UdrElem::zero(dims);
                        e.add_term(fm.clone(), xm.clone(), dm.clone(), scalar::one());
                        if !e.big_d().big_d().is_zero() {
                            bad += 1;
                        }
                    }
                }
                bad
            })
            .sum::<usize>();
        let spencer_fail = supers
            .par_iter()
            .map(|xm| {
                let mut bad = 0usize;
                for dm in &ders {
                    for pm in &polys {
                        let e = SpencerElem::monomial(dims, xm.clone(), dm.clone(), pm.clone());
                        if !e.spencer_delta().spencer_delta().is_zero() {
                            bad += 1;
                        }
                    }
                }
                bad
            })
            .sum::<usize>();
        // virtual double complex on the full window
        let mut keys = Vec::new();
        for fm in &forms_basis {
            for xm in &supers {
                for dm in &ders {
                    keys.push((fm.clone(), xm.clone(), dm.clone()));
                }
            }
        }
        let virt_fail = keys
            .par_iter()
            .map(|(fm, xm, dm)| {
                let mut bad = 0usize;
                for pm in &polys {
                    let mut v = VirtualForm::zero(dims);
                    v.add_term(
                        fm.clone(),
                        xm.clone(),
                        dm.clone(),
                        pm.clone(),
                        scalar::one(),
                    );
                    let a = v.d_hat();
                    let b = v.delta_hat();
                    let c = v.delta_plain();
                    let dd = a.d_hat();
                    let bb = b.delta_hat();
                    let mixed = a.delta_hat().add(&b.d_hat());
                    let total = dd.add(&bb).add(&mixed);
                    let corcomm = a.delta_plain().sub(&c.d_hat());
                    if !(dd.is_zero()
                        && bb.is_zero()
                        && mixed.is_zero()
                        && total.is_zero()
                        && corcomm.is_zero())
                    {
                        bad += 1;
                    }
                }
                bad
            })
            .sum::<usize>();
        // [D1, D2] = 0 on the plain tensor presentation
        let mut free_pairs = Vec::new();
        for fm in &forms_basis {
            for cm in &supers {
                free_pairs.push((fm.clone(), cm.clone()));
            }
        }
        let free_fail = free_pairs
            .par_iter()
            .map(|(fm, cm)| {
                let mut bad = 0usize;
                for xm in &supers {
                    for dm in &ders {
                        let mut e = FreeUdr::zero(dims);
                        e.add_term(
                            fm.clone(),
                            cm.clone(),
                            xm.clone(),
                            dm.clone(),
                            scalar::one(),
                        );
                        if !e.d1().d2().add(&e.d2().d1()).is_zero() {
                            bad += 1;
                        }
                    }
                }
                bad
            })
            .sum::<usize>();
        checked += forms_basis.len() * supers.len() * ders.len() * (1 + polys.len())
            + supers.len() * ders.len() * polys.len()
            + free_pairs.len() * supers.len() * ders.len();
        failures += udr_fail + spencer_fail + virt_fail + free_fail;
    }
    // 200 seeded random elements at p = q = 3
    let dims = Dims::new(3, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..200 {
        let v = verify::rand_virtual(dims, 3, &mut rng);
        let e = verify::rand_udr(dims, 3, &mut rng);
        let s = verify::rand_spencer(dims, 3, &mut rng);
        let ok = v.d_hat().d_hat().is_zero()
            && v.delta_hat().delta_hat().is_zero()
            && v.total_d().total_d().is_zero()
            && v.d_hat().delta_hat().add(&v.delta_hat().d_hat()).is_zero()
            && v.d_hat().delta_plain().sub(&v.delta_plain().d_hat()).is_zero()
            && e.big_d().big_d().is_zero()
            && s.spencer_delta().spencer_delta().is_zero();
        if !ok {
            failures += 1;
        }
        checked += 7;
    }
    let elapsed = start.elapsed();
    report(
        "1 (nilpotency/commutation)",
        failures == 0 && elapsed.as_secs() < 60,
        &format!("{checked} identities, {failures} failures, {elapsed:.2?}"),
    );
}

/// Criterion 2: the de Rham homotopy eigenvalue identity and its kernel
/// locus, exhaustive at `p,q <= 2`, degrees `<= 3`.
#[test]
fn criterion_2_de_rham_homotopy_eigenvalue() {
    let mut total = 0usize;
    let mut failures = Vec::new();
    for dims in small_dims() {
        let (count, fails) = verify::de_rham_eigen_window(dims, 3);
        total += count;
        failures.extend(fails);
    }
    report(
        "2 (de Rham homotopy eigenvalue)",
        failures.is_empty(),
        &format!("{total} monomials, {} failures", failures.len()),
    );
}

/// Criterion 3: the Spencer homotopy eigenvalue identity with kernel
/// exactly the function-function slice, exhaustive at the same bounds.
#[test]
fn criterion_3_spencer_homotopy_eigenvalue() {
    let mut total = 0usize;
    let mut failures = Vec::new();
    for dims in small_dims() {
        let (count, fails) = verify::spencer_eigen_window(dims, 3);
        total += count;
        failures.extend(fails);
    }
    report(
        "3 (Spencer homotopy eigenvalue)",
        failures.is_empty(),
        &format!("{total} monomials, {} failures", failures.len()),
    );
}

/// Criterion 4: the Berezinian right action: `phi . D_a = 0` for every
/// coordinate, and agreement with the explicit action formula on 50 seeded
/// random homogeneous fields at each `p,q <= 2`.
#[test]
fn criterion_4_ber_right_action() {
    let mut failures = 0usize;
    let mut checked = 0usize;
    for dims in small_dims() {
        let phi = BerSection::generator(dims);
        for v in dims.vars() {
            checked += 1;
            if !berezin::ber_right_action(&phi, &WeylOp::derivative(dims, v)).is_zero() {
                failures += 1;
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let pf = rand::Rng::gen_bool(&mut rng, 0.5);
            let f = verify::rand_homog_poly(dims, 2, pf, &mut rng);
            let s = BerSection::new(f.clone());
            let x = verify::rand_vector_field(dims, 2, &mut rng);
            let lhs = berezin::ber_right_action(&s, &x.to_weyl());
            // action formula: -phi sum_a (-1)^{|x_a|(|X^a|+|f|)} D_a(f X^a)
            let mut rhs = SuperPoly::zero(dims);
            let px = x.parity().unwrap();
            for (a, comp) in &x.comps {
                let pcomp = px ^ a.is_odd();
                let term = f.mul(comp).partial(*a);
                let neg = a.is_odd() && (pcomp ^ pf);
                rhs = rhs.add(&if neg { term.neg() } else { term });
            }
            checked += 1;
            if lhs != BerSection::new(rhs.neg()) {
                failures += 1;
            }
        }
    }
    report(
        "4 (Berezinian right action)",
        failures == 0,
        &format!("{checked} checks, {failures} failures"),
    );
}

/// Criterion 5: Lie-derivative properties (1)-(3) and the `e_x` identity on
/// 100 seeded random homogeneous instances at each `p,q <= 2`.
#[test]
fn criterion_5_prop_lie_and_e_x() {
    let mut failures = 0usize;
    let mut checked = 0usize;
    for dims in small_dims() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let x = verify::rand_vector_field(dims, 2, &mut rng);
            let px = x.parity().unwrap();
            // (1) on degree-one polyfields, against the Weyl bracket
            let v = if rand::Rng::gen_bool(&mut rng, 0.5) {
                Var::Z(rand::Rng::gen_range(&mut rng, 0..dims.p))
            } else {
                Var::Theta(rand::Rng::gen_range(&mut rng, 0..dims.q))
            };
            let coeff = verify::rand_homog_poly(dims, 2, rand::Rng::gen_bool(&mut rng, 0.5), &mut rng);
            let mut tau1deg = PolyElem::zero(dims);
            tau1deg.add_term(PolyMonomial::gen(dims, v), coeff.clone());
            let got = polyfields::lie_derivative(&x, &tau1deg);
            let bracket = x
                .to_weyl()
                .super_commutator(&WeylOp::derivative(dims, v).left_mul_poly(&coeff));
            let expect = VectorField::from_weyl(&bracket)
                .map(|f| f.to_pi())
                .unwrap_or_else(|| PolyElem::zero(dims));
            checked += 1;
            if got != expect {
                failures += 1;
            }
            // (2) super Leibniz
            let p1 = rand::Rng::gen_bool(&mut rng, 0.5);
            let tau1 = verify::rand_homog_poly_elem(dims, 2, p1, &mut rng);
            let tau2 = verify::rand_poly_elem(dims, 2, &mut rng);
            let lhs = polyfields::lie_derivative(&x, &tau1.mul(&tau2));
            let mut second = tau1.mul(&polyfields::lie_derivative(&x, &tau2));
            if px && p1 {
                second = second.neg();
            }
            let rhs = polyfields::lie_derivative(&x, &tau1).mul(&tau2).add(&second);
            checked += 1;
            if lhs != rhs {
                failures += 1;
            }
            // (3) module twist
            let pf = rand::Rng::gen_bool(&mut rng, 0.5);
            let f = verify::rand_homog_poly(dims, 2, pf, &mut rng);
            let tau = verify::rand_poly_elem(dims, 2, &mut rng);
            let mut fx = VectorField::zero(dims);
            for (w, comp) in &x.comps {
                let c = f.mul(comp);
                if !c.is_zero() {
                    fx.comps.insert(*w, c);
                }
            }
            let lhs = polyfields::lie_derivative(&fx, &tau);
            let df = FormElem::from_poly(&f).exterior_d();
            let mut second = x.to_pi().mul(&df.contract_one(&tau).unwrap());
            if px && pf {
                second = second.neg();
            }
            let rhs = polyfields::lie_derivative(&x, &tau)
                .mul_fn_left(&f)
                .add(&second);
            checked += 1;
            if lhs != rhs {
                failures += 1;
            }
            // e_x identity (with the coefficient in the first summand)
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
            checked += 1;
            if lhs != rhs {
                failures += 1;
            }
        }
    }
    report(
        "5 (Lie derivative properties)",
        failures == 0,
        &format!("{checked} checks, {failures} failures"),
    );
}

/// Criterion 6: transport along 20 seeded random nilpotent-correction maps
/// at `p = q = 2` commutes with `D` and `delta`; one witness where the
/// first Spencer summand alone fails while the full differential passes.
#[test]
fn criterion_6_coordinate_invariance() {
    let dims = Dims::new(2, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut failures = 0usize;
    let mut witness = false;
    for _ in 0..20 {
        let g = coord_change::random_map(dims, &mut rng);
        let t = Transport::new(&g).expect("admissible maps invert");
        let e = verify::rand_udr(dims, 2, &mut rng);
        if t.udr(&e.big_d()) != t.udr(&e).big_d() {
            failures += 1;
        }
        let s = verify::rand_spencer(dims, 2, &mut rng);
        if t.spencer(&s.spencer_delta()) != t.spencer(&s).spencer_delta() {
            failures += 1;
        }
        if !witness {
            for _ in 0..3 {
                let pairs = vec![(
                    verify::rand_weyl(dims, 2, &mut rng),
                    verify::rand_poly_elem(dims, 2, &mut rng),
                )];
                let lhs = t.spencer(&coord_change::spencer_delta_1_pairs(dims, &pairs));
                let transported = t.spencer_pairs(&pairs);
                let rhs = coord_change::spencer_delta_1_pairs(dims, &transported);
                if lhs != rhs {
                    let full_l = t.spencer(&universal::spencer_delta_pairs(dims, &pairs));
                    let full_r = universal::spencer_delta_pairs(dims, &transported);
                    if full_l == full_r {
                        witness = true;
                        break;
                    }
                }
            }
        }
    }
    report(
        "6 (coordinate invariance)",
        failures == 0 && witness,
        &format!(
            "20 maps, {failures} invariance failures, delta_1 witness {}",
            if witness { "found" } else { "missing" }
        ),
    );
}

/// Criterion 7: Poincaré lemma for integral forms: the homotopy identity
/// exhaustively at `p,q <= 2`, z-degree `<= 3`, and the truncated homology
/// table with `H^0` spanned by `s_0`; runtime under 60 s.
#[test]
fn criterion_7_poincare_integral() {
    let start = Instant::now();
    let mut failures = 0usize;
    let mut checked = 0usize;
    for dims in small_dims() {
        let (count, fails) = verify::poincare_window(dims, 3);
        checked += count;
        failures += fails.len();
        let max_z = if dims.p + dims.q <= 3 { 3 } else { 2 };
        let window = TruncationWindow { dims, max_z };
        let table = poincare::integral_cohomology(&window);
        for e in &table.entries {
            checked += 1;
            let expect = if e.degree == 0 { (1, 0) } else { (0, 0) };
            if (e.even, e.odd) != expect {
                failures += 1;
            }
        }
        checked += 1;
        if !poincare::integral_h0_generated_by_s0(&window) {
            failures += 1;
        }
        // de Rham side: the scaling homotopy gives the matching table
        let dr = poincare::de_rham_cohomology(&window, 4);
        for e in &dr.entries {
            checked += 1;
            let expect = if e.degree == 0 { (1, 0) } else { (0, 0) };
            if (e.even, e.odd) != expect {
                failures += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    report(
        "7 (Poincare lemma for integral forms)",
        failures == 0 && elapsed.as_secs() < 60,
        &format!("{checked} checks, {failures} failures, {elapsed:.2?}"),
    );
}

/// Criterion 8: page-one identifications: every `delta^`-closed windowed
/// element with nonzero Spencer eigenvalue is `delta^`-exact through the
/// lifted homotopy, and the induced differentials on page-one
/// representatives are exactly the exterior derivative and the
/// integral-form differential.
#[test]
fn criterion_8_page_one_identifications() {
    let mut failures = 0usize;
    let mut checked = 0usize;
    for dims in small_dims() {
        let forms_basis = forms::enumerate_monomials(dims, 2);
        let supers = superpoly::enumerate_monomials(dims, 2);
        let ders = universal::enumerate_der_monomials(dims, 2);
        let polys = polyfields::enumerate_monomials(dims, 2);
        // (i) closed-with-nonzero-eigenvalue => exact with K-witness: the
        // delta^-image of every basis monomial is closed, and each nonzero
        // eigencomponent must be hit by the witness; basis monomials in the
        // zero eigenspace must be closed themselves
        let keys: Vec<_> = forms_basis
            .iter()
            .flat_map(|fm| {
                let supers = &supers;
                let ders = &ders;
                let polys = &polys;
                ders.iter().flat_map(move |dm| {
                    polys.iter().map(move |pm| {
                        (fm.clone(), supers[0].clone(), dm.clone(), pm.clone())
                    })
                })
            })
            .collect();
        let window_failures: usize = keys
            .par_iter()
            .map(|(fm, _, dm, pm)| {
                let mut bad = 0usize;
                for xm in &supers {
                    let mut v = VirtualForm::zero(dims);
                    v.add_term(
                        fm.clone(),
                        xm.clone(),
                        dm.clone(),
                        pm.clone(),
                        scalar::one(),
                    );
                    let closed = v.delta_hat();
                    for (eig, part) in closed.spencer_eigen_split() {
                        if eig == 0 {
                            if !part.delta_hat().is_zero() {
                                bad += 1;
                            }
                            continue;
                        }
                        let witness = part.k_hat().scale(&scalar::frac(1, eig));
                        if witness.delta_hat() != part {
                            bad += 1;
                        }
                    }
                    // basis monomials with zero eigenvalue are the page-one
                    // representatives: they are delta^-closed
                    if universal::spencer_eigenvalue(dm, pm) == 0 && !v.delta_hat().is_zero() {
                        bad += 1;
                    }
                }
                bad
            })
            .sum();
        checked += keys.len() * supers.len();
        failures += window_failures;
        // (ii) induced differential on E1-Omega representatives
        for fm in &forms_basis {
            for xm in &supers {
                let mut omega = FormElem::zero(dims);
                omega.add_term(
                    fm.clone(),
                    SuperPoly::monomial(dims, xm.clone(), scalar::one()),
                );
                checked += 1;
                if virtual_double::induced_form_d(&omega) != Some(omega.exterior_d()) {
                    failures += 1;
                }
            }
        }
        // (ii') induced differential on E1-Sigma representatives equals the
        // integral-form differential (untwisted normalization), and the
        // twisted one differs exactly by the section parity
        for pm in &polys {
            for xm in &supers {
                let s = IntegralForm::new(
                    dims,
                    SuperPoly::monomial(dims, xm.clone(), scalar::one()),
                    pm.clone(),
                );
                checked += 1;
                if virtual_double::induced_integral_delta(&s)
                    != Some(berezin::integral_delta(&s))
                {
                    failures += 1;
                }
                let twisted = virtual_double::embed_integral(&s)
                    .delta_hat()
                    .to_co()
                    .c_zero_part()
                    .extract_integral();
                let expect = match s.parity() {
                    Some(true) => berezin::integral_delta(&s).neg(),
                    _ => berezin::integral_delta(&s),
                };
                checked += 1;
                if twisted != Some(expect) {
                    failures += 1;
                }
                // representatives are d^-closed
                checked += 1;
                if !virtual_double::embed_integral(&s).d_hat().is_zero() {
                    failures += 1;
                }
            }
        }
    }
    report(
        "8 (page-one identifications)",
        failures == 0,
        &format!("{checked} checks, {failures} failures"),
    );
}

/// Criterion 9: the super-elliptic-curve example with 6 truncation columns:
/// the page-two table, nonzero `d_1` in every column up to the quarantine
/// edge, vanishing `d_2`, and degree totals 1, 2, 1; runtime under 5 s.
#[test]
fn criterion_9_super_elliptic_curve() {
    let start = Instant::now();
    let k = 6usize;
    let table = specseq::e2_table(k).expect("fixture builds");
    let entry = |p: i64, q: i64| table.get(&(p, q)).cloned().unwrap_or_default();
    let mut failures = Vec::new();
    let expect: Vec<((i64, i64), (usize, usize), &str)> = vec![
        ((0, 0), (1, 0), "1"),
        ((1, 0), (0, 1), "dz"),
        ((0, 1), (0, 1), "dz̄"),
        ((1, 1), (1, 0), "dz dz̄"),
    ];
    for ((p, q), dims, label) in expect {
        let vs = entry(p, q);
        if (vs.even, vs.odd) != dims {
            failures.push(format!("E2({p},{q}) = {}|{}", vs.even, vs.odd));
        }
        let labels: Vec<&String> = vs.even_labels.iter().chain(vs.odd_labels.iter()).collect();
        if labels != vec![label] {
            failures.push(format!("E2({p},{q}) labels {labels:?}"));
        }
    }
    for p in 2..=(k as i64 - 2) {
        for q in 0..=1 {
            if !entry(p, q).is_zero() {
                failures.push(format!("E2({p},{q}) nonzero"));
            }
        }
    }
    for q_row in 0..=1usize {
        let ranks = specseq::se_d1_ranks(k, q_row).expect("page one");
        for (col, rank) in ranks.iter().enumerate().take(k - 1) {
            if *rank == 0 {
                failures.push(format!("d1 rank zero at column {col}, row {q_row}"));
            }
        }
    }
    if !specseq::se_d2_vanishes(&table) {
        failures.push("d2 does not vanish".into());
    }
    let total = |n: i64| -> usize { (0..=n).map(|p| entry(p, n - p).total()).sum() };
    if (total(0), total(1), total(2)) != (1, 2, 1) {
        failures.push(format!(
            "degree totals {:?}",
            (total(0), total(1), total(2))
        ));
    }
    let elapsed = start.elapsed();
    report(
        "9 (super elliptic curve)",
        failures.is_empty() && elapsed.as_secs() < 5,
        &format!("{} failures, {elapsed:.2?}", failures.len()),
    );
}

/// The verification CLI driver must execute every suite cleanly with the
/// default configuration at p = q = 2.
#[test]
fn verify_driver_runs_all_suites() {
    let cfg = RunConfig {
        suite: "all".into(),
        p: 2,
        q: 2,
        max_deg: 2,
        max_z: 2,
        trials: 8,
        maps: 5,
        seed: 1,
        exhaustive: false,
    };
    let rep = verify::run_verify(&cfg).expect("suites run");
    let failed: Vec<String> = rep
        .checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| c.name.clone())
        .collect();
    assert!(failed.is_empty(), "failed checks: {failed:?}");
}
