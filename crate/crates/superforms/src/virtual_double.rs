//! Virtual superforms: the triple tensor `Omega (x) D (x) Omega^*` with the
//! lifted differentials `d^` and `delta^` and total differential, plus the
//! page-one machinery connecting it to forms and integral forms.

use std::collections::BTreeMap;

use num::Zero;

use crate::berezin::IntegralForm;
use crate::coord::{self, Dims, Var};
use crate::forms::{FormElem, FormMonomial};
use crate::polyfields::{PolyElem, PolyMonomial};
use crate::scalar::{self, Scalar};
use crate::superpoly::{SuperMonomial, SuperPoly};
use crate::universal::{append_der_right, eigenvalue_c, spencer_eigenvalue};
use crate::weyl::{CoWeylOp, DerMonomial, WeylOp};

pub type VirtualKey = (FormMonomial, SuperMonomial, DerMonomial, PolyMonomial);

/// Canonical-form element: unit coefficients on the outer slots, every
/// function absorbed into the normal-ordered Weyl slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VirtualForm {
    pub dims: Dims,
    pub terms: BTreeMap<VirtualKey, Scalar>,
}

fn term_parity(key: &VirtualKey) -> bool {
    key.0.is_odd() ^ key.1.is_odd() ^ key.2.is_odd() ^ key.3.is_odd()
}

impl VirtualForm {
    pub fn zero(dims: Dims) -> Self {
        VirtualForm {
            dims,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(dims: Dims) -> Self {
        let mut e = Self::zero(dims);
        e.add_term(
            FormMonomial::unit(dims),
            SuperMonomial::unit(dims),
            DerMonomial::unit(dims),
            PolyMonomial::unit(dims),
            scalar::one(),
        );
        e
    }

    pub fn add_term(
        &mut self,
        f: FormMonomial,
        xm: SuperMonomial,
        dm: DerMonomial,
        pm: PolyMonomial,
        c: Scalar,
    ) {
        if c.is_zero() {
            return;
        }
        let entry = self
            .terms
            .entry((f, xm, dm, pm))
            .or_insert_with(scalar::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &VirtualForm) -> VirtualForm {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.0.clone(), k.1.clone(), k.2.clone(), k.3.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &VirtualForm) -> VirtualForm {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> VirtualForm {
        let mut out = VirtualForm::zero(self.dims);
        for (k, c) in &self.terms {
            out.add_term(k.0.clone(), k.1.clone(), k.2.clone(), k.3.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> VirtualForm {
        let mut out = VirtualForm::zero(self.dims);
        for (k, v) in &self.terms {
            out.add_term(k.0.clone(), k.1.clone(), k.2.clone(), k.3.clone(), v * c);
        }
        out
    }

    /// Bidegrees `(-poly degree, form degree)` present in the element.
    pub fn bidegrees(&self) -> Vec<(i64, i64)> {
        let mut out: Vec<(i64, i64)> = self
            .terms
            .keys()
            .map(|k| (-(k.3.poly_degree() as i64), k.0.form_degree() as i64))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Canonicalizes an arbitrary coefficient placement: form coefficients
    /// enter the Weyl slot from the left, polyfield coefficients from the
    /// right.
    pub fn normalize(dims: Dims, triples: &[(FormElem, WeylOp, PolyElem)]) -> VirtualForm {
        let mut out = VirtualForm::zero(dims);
        for (omega, op, tau) in triples {
            for (fm, fcoeff) in &omega.terms {
                let left_done = op.left_mul_poly(fcoeff);
                for (pm, pcoeff) in &tau.terms {
                    let both = left_done.compose(&WeylOp::from_poly(pcoeff));
                    for ((xm, dm), c) in &both.terms {
                        out.add_term(fm.clone(), xm.clone(), dm.clone(), pm.clone(), c.clone());
                    }
                }
            }
        }
        out
    }

    /// `d^ = D (x) 1`.
    pub fn d_hat(&self) -> VirtualForm {
        let mut out = VirtualForm::zero(self.dims);
        for ((fm, xm, dm, pm), c) in &self.terms {
            let mut single = WeylOp::zero(self.dims);
            single.add_term(xm.clone(), dm.clone(), c.clone());
            for v in self.dims.vars() {
                let Some((fm2, neg)) = fm.mul_dx_left(v) else {
                    continue;
                };
                let moved = single.left_mul_der(v);
                let flip = neg ^ (fm.is_odd() && v.is_odd());
                for ((xm2, dm2), c2) in &moved.terms {
                    let mut c3 = c2.clone();
                    scalar::negate_if(&mut c3, flip);
                    out.add_term(fm2.clone(), xm2.clone(), dm2.clone(), pm.clone(), c3);
                }
            }
        }
        out
    }

    /// Plain `1 (x) delta`, no parity twist; applies the Spencer
    /// differential to the last two slots.
    pub fn delta_plain(&self) -> VirtualForm {
        let mut out = VirtualForm::zero(self.dims);
        for ((fm, xm, dm, pm), c) in &self.terms {
            for v in self.dims.vars() {
                let Some((pm2, pair)) = crate::forms::contract_monomial(v, pm) else {
                    continue;
                };
                let Some((dm2, neg_append)) = append_der_right(dm, v) else {
                    continue;
                };
                let mut c2 = c * &pair;
                scalar::negate_if(&mut c2, neg_append ^ pm.is_odd());
                out.add_term(fm.clone(), xm.clone(), dm2, pm2, c2);
            }
        }
        out
    }

    /// `delta^(omega (x) F (x) tau) =
    /// (-1)^{|omega|+|F|+|tau|} (1 (x) delta)`.
    pub fn delta_hat(&self) -> VirtualForm {
        self.twist().delta_plain()
    }

    /// Diagonal parity twist `(-1)^{|term|}`.
    pub fn twist(&self) -> VirtualForm {
        let mut out = VirtualForm::zero(self.dims);
        for (k, c) in &self.terms {
            let mut c2 = c.clone();
            scalar::negate_if(&mut c2, term_parity(k));
            out.add_term(k.0.clone(), k.1.clone(), k.2.clone(), k.3.clone(), c2);
        }
        out
    }

    /// Total differential of the double complex.
    pub fn total_d(&self) -> VirtualForm {
        self.d_hat().add(&self.delta_hat())
    }

    /// Spencer homotopy lifted to virtual forms with the compensating
    /// twist, so that `delta^ k^ + k^ delta^ = (deg F + deg tau) id`.
    pub fn k_hat(&self) -> VirtualForm {
        let twisted = self.twist();
        let mut out = VirtualForm::zero(self.dims);
        for ((fm, xm, dm, pm), c) in &twisted.terms {
            let mut single = WeylOp::zero(self.dims);
            single.add_term(xm.clone(), dm.clone(), c.clone());
            for v in self.dims.vars() {
                let Some((pm2, neg_ins)) = pm.mul_gen_left(v) else {
                    continue;
                };
                let x_v = WeylOp::from_poly(&SuperPoly::var(self.dims, v));
                let bracket = single.super_commutator(&x_v);
                for ((xm2, dm2), c2) in &bracket.terms {
                    let mut c3 = -c2.clone();
                    scalar::negate_if(&mut c3, neg_ins ^ pm.is_odd());
                    out.add_term(fm.clone(), xm2.clone(), dm2.clone(), pm2.clone(), c3);
                }
            }
        }
        out
    }

    /// Groups terms by the Spencer eigenvalue of the last two slots.
    pub fn spencer_eigen_split(&self) -> BTreeMap<i64, VirtualForm> {
        let mut out: BTreeMap<i64, VirtualForm> = BTreeMap::new();
        for (k, c) in &self.terms {
            out.entry(spencer_eigenvalue(&k.2, &k.3))
                .or_insert_with(|| VirtualForm::zero(self.dims))
                .add_term(k.0.clone(), k.1.clone(), k.2.clone(), k.3.clone(), c.clone());
        }
        out
    }

    /// Embeds a differential form as a page-one representative
    /// `omega (x) f (x) 1`.
    pub fn embed_form(omega: &FormElem) -> VirtualForm {
        let dims = omega.dims;
        let mut out = VirtualForm::zero(dims);
        for (fm, coeff) in &omega.terms {
            for (xm, c) in &coeff.terms {
                out.add_term(
                    fm.clone(),
                    xm.clone(),
                    DerMonomial::unit(dims),
                    PolyMonomial::unit(dims),
                    c.clone(),
                );
            }
        }
        out
    }

    /// Reads back a form from a Spencer-eigenvalue-zero element.
    pub fn extract_form(&self) -> Option<FormElem> {
        let mut out = FormElem::zero(self.dims);
        for ((fm, xm, dm, pm), c) in &self.terms {
            if !dm.is_unit() || !pm.is_unit() {
                return None;
            }
            out.add_term(
                fm.clone(),
                SuperPoly::monomial(self.dims, xm.clone(), c.clone()),
            );
        }
        Some(out)
    }

    /// Projection of the induced page-one differential on the form side:
    /// the Spencer-eigenvalue-zero part (the nonzero part is `delta^`-exact).
    pub fn spencer_zero_part(&self) -> VirtualForm {
        self.spencer_eigen_split()
            .remove(&0)
            .unwrap_or_else(|| VirtualForm::zero(self.dims))
    }

    pub fn to_co(&self) -> CoVirtual {
        let mut out = CoVirtual::zero(self.dims);
        for ((fm, xm, dm, pm), c) in &self.terms {
            let mut single = WeylOp::zero(self.dims);
            single.add_term(xm.clone(), dm.clone(), c.clone());
            for ((j, m), c2) in &single.co_normal().terms {
                out.add_term(fm.clone(), j.clone(), m.clone(), pm.clone(), c2.clone());
            }
        }
        out
    }
}

/// Virtual forms with the Weyl slot on the co-normal basis `D^J x^M`; the
/// carrier of the de Rham homotopy and of the `E_1` projection onto
/// integral forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoVirtual {
    pub dims: Dims,
    pub terms: BTreeMap<(FormMonomial, DerMonomial, SuperMonomial, PolyMonomial), Scalar>,
}

impl CoVirtual {
    pub fn zero(dims: Dims) -> Self {
        CoVirtual {
            dims,
            terms: BTreeMap::new(),
        }
    }

    pub fn add_term(
        &mut self,
        f: FormMonomial,
        j: DerMonomial,
        xm: SuperMonomial,
        pm: PolyMonomial,
        c: Scalar,
    ) {
        if c.is_zero() {
            return;
        }
        let entry = self
            .terms
            .entry((f, j, xm, pm))
            .or_insert_with(scalar::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &CoVirtual) -> CoVirtual {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.0.clone(), k.1.clone(), k.2.clone(), k.3.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &CoVirtual) -> CoVirtual {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.0.clone(), k.1.clone(), k.2.clone(), k.3.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> CoVirtual {
        let mut out = CoVirtual::zero(self.dims);
        for (k, v) in &self.terms {
            out.add_term(k.0.clone(), k.1.clone(), k.2.clone(), k.3.clone(), v * c);
        }
        out
    }

    /// `d^` in the co-normal presentation.
    pub fn d_hat(&self) -> CoVirtual {
        let mut out = CoVirtual::zero(self.dims);
        for ((fm, j, xm, pm), c) in &self.terms {
            for v in self.dims.vars() {
                let Some((fm2, neg_f)) = fm.mul_dx_left(v) else {
                    continue;
                };
                let extended = match v {
                    Var::Z(i) => {
                        let mut j2 = j.clone();
                        j2.dz[i] += 1;
                        Some((j2, false))
                    }
                    Var::Theta(a) => coord::insert_from_left(j.dth, a).map(|(dth, neg)| {
                        (
                            DerMonomial {
                                dz: j.dz.clone(),
                                dth,
                            },
                            neg,
                        )
                    }),
                };
                let Some((j2, neg_j)) = extended else {
                    continue;
                };
                let mut c2 = c.clone();
                scalar::negate_if(&mut c2, neg_f ^ neg_j ^ (fm.is_odd() && v.is_odd()));
                out.add_term(fm2, j2, xm.clone(), pm.clone(), c2);
            }
        }
        out
    }

    /// `H (x) 1`: the de Rham homotopy on the first two slots.
    pub fn h_hat(&self) -> CoVirtual {
        let mut out = CoVirtual::zero(self.dims);
        for ((fm, j, xm, pm), c) in &self.terms {
            for v in self.dims.vars() {
                let Some((fm2, cf)) = fm.partial_dx(v) else {
                    continue;
                };
                let Some((j2, cj)) = crate::weyl::der_commutator_with_var(j, v) else {
                    continue;
                };
                let neg = v.is_odd() && !(fm.is_odd() ^ j.is_odd());
                let mut c2 = c * cf * cj;
                scalar::negate_if(&mut c2, neg);
                out.add_term(fm2.clone(), j2, xm.clone(), pm.clone(), c2);
            }
        }
        out
    }

    /// Groups terms by the de Rham homotopy eigenvalue of `(omega, D^J)`.
    pub fn c_eigen_split(&self) -> BTreeMap<i64, CoVirtual> {
        let mut out: BTreeMap<i64, CoVirtual> = BTreeMap::new();
        for (k, c) in &self.terms {
            out.entry(eigenvalue_c(self.dims, &k.0, &k.1))
                .or_insert_with(|| CoVirtual::zero(self.dims))
                .add_term(k.0.clone(), k.1.clone(), k.2.clone(), k.3.clone(), c.clone());
        }
        out
    }

    /// The `c = 0` part, spanned by Berezinian-type representatives.
    pub fn c_zero_part(&self) -> CoVirtual {
        let mut out = CoVirtual::zero(self.dims);
        for (k, c) in &self.terms {
            if eigenvalue_c(self.dims, &k.0, &k.1) == 0 {
                out.add_term(k.0.clone(), k.1.clone(), k.2.clone(), k.3.clone(), c.clone());
            }
        }
        out
    }

    pub fn to_canonical(&self) -> VirtualForm {
        let mut out = VirtualForm::zero(self.dims);
        for ((fm, j, xm, pm), c) in &self.terms {
            let mut co = CoWeylOp::zero(self.dims);
            co.add_term(j.clone(), xm.clone(), c.clone());
            for ((xm2, dm2), c2) in &co.to_normal().terms {
                out.add_term(fm.clone(), xm2.clone(), dm2.clone(), pm.clone(), c2.clone());
            }
        }
        out
    }

    /// Reads back an integral form from a `c = 0` element, through the
    /// identification `dz_1..dz_p (x) Dth_1..Dth_q f (x) P^I = phi f (x) P^I`.
    pub fn extract_integral(&self) -> Option<IntegralForm> {
        let dims = self.dims;
        let dz_all: u16 = ((1u32 << dims.p) - 1) as u16;
        let dth_all: u16 = ((1u32 << dims.q) - 1) as u16;
        let mut out = IntegralForm::zero(dims);
        for ((fm, j, xm, pm), c) in &self.terms {
            if fm.dz != dz_all
                || fm.even_gen_degree() != 0
                || j.dth != dth_all
                || j.even_gen_degree() != 0
            {
                return None;
            }
            out.add_term(
                pm.clone(),
                SuperPoly::monomial(dims, xm.clone(), c.clone()),
            );
        }
        Some(out)
    }
}

/// Embeds an integral form as the page-one representative
/// `dz_1..dz_p (x) Dth_1..Dth_q . f (x) P^I` (canonical form).
pub fn embed_integral(s: &IntegralForm) -> VirtualForm {
    let dims = s.dims;
    let mut fm = FormMonomial::unit(dims);
    fm.dz = ((1u32 << dims.p) - 1) as u16;
    let mut dth_word = DerMonomial::unit(dims);
    dth_word.dth = ((1u32 << dims.q) - 1) as u16;
    let mut ber_op = WeylOp::zero(dims);
    ber_op.add_term(SuperMonomial::unit(dims), dth_word, scalar::one());
    let mut out = VirtualForm::zero(dims);
    for (pm, f) in &s.terms {
        let shifted = ber_op.compose(&WeylOp::from_poly(f));
        for ((xm, dm), c) in &shifted.terms {
            out.add_term(fm.clone(), xm.clone(), dm.clone(), pm.clone(), c.clone());
        }
    }
    out
}

/// The page-one differential induced on integral-form representatives: the
/// plain `1 (x) delta` followed by the projection onto the `c = 0` slice.
pub fn induced_integral_delta(s: &IntegralForm) -> Option<IntegralForm> {
    embed_integral(s)
        .delta_plain()
        .to_co()
        .c_zero_part()
        .extract_integral()
}

/// The page-one differential induced on form representatives: `d^` followed
/// by the projection onto the Spencer-eigenvalue-zero slice.
pub fn induced_form_d(omega: &FormElem) -> Option<FormElem> {
    VirtualForm::embed_form(omega)
        .d_hat()
        .spencer_zero_part()
        .extract_form()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn d11() -> Dims {
        Dims::new(1, 1)
    }

    #[test]
    fn normalize_examples() {
        let d = d11();
        let z = SuperPoly::var(d, Var::Z(0));
        let th = SuperPoly::var(d, Var::Theta(0));
        // (dz . z) (x) 1 (x) Pth == dz (x) z (x) Pth
        let mut omega = FormElem::zero(d);
        omega.add_term(FormMonomial::gen(d, Var::Z(0)), z.clone());
        let got = VirtualForm::normalize(
            d,
            &[(omega, WeylOp::one(d), PolyElem::gen(d, Var::Theta(0)))],
        );
        let mut expect = VirtualForm::zero(d);
        expect.add_term(
            FormMonomial::gen(d, Var::Z(0)),
            SuperMonomial::var(d, Var::Z(0)),
            DerMonomial::unit(d),
            PolyMonomial::gen(d, Var::Theta(0)),
            int(1),
        );
        assert_eq!(got, expect);
        // 1 (x) Dth th (x) 1 == 1 (x) (1 - th Dth) (x) 1
        let op = WeylOp::derivative(d, Var::Theta(0)).compose(&WeylOp::from_poly(&th));
        let got = VirtualForm::normalize(
            d,
            &[(FormElem::one(d), op, PolyElem::from_poly(&SuperPoly::one(d)))],
        );
        let mut expect = VirtualForm::one(d);
        expect.add_term(
            FormMonomial::unit(d),
            SuperMonomial::var(d, Var::Theta(0)),
            DerMonomial::var(d, Var::Theta(0)),
            PolyMonomial::unit(d),
            int(-1),
        );
        assert_eq!(got, expect);
        // 1 (x) 1 (x) th Pz == 1 (x) th (x) Pz
        let tau = PolyElem::gen(d, Var::Z(0)).mul_fn_left(&th);
        let got = VirtualForm::normalize(d, &[(FormElem::one(d), WeylOp::one(d), tau)]);
        let mut expect = VirtualForm::zero(d);
        expect.add_term(
            FormMonomial::unit(d),
            SuperMonomial::var(d, Var::Theta(0)),
            DerMonomial::unit(d),
            PolyMonomial::gen(d, Var::Z(0)),
            int(1),
        );
        assert_eq!(got, expect);
        // normalize is idempotent through round trips
        let again = VirtualForm::normalize(
            d,
            &[(
                FormElem::one(d),
                {
                    let mut w = WeylOp::zero(d);
                    w.add_term(
                        SuperMonomial::var(d, Var::Theta(0)),
                        DerMonomial::unit(d),
                        int(1),
                    );
                    w
                },
                PolyElem::gen(d, Var::Z(0)),
            )],
        );
        assert_eq!(again, expect);
    }

    #[test]
    fn delta_hat_examples() {
        let d = d11();
        assert!(VirtualForm::one(d).delta_hat().is_zero());
        // 1 (x) 1 (x) Pz -> -(1 (x) Dz (x) 1)
        let mut e = VirtualForm::zero(d);
        e.add_term(
            FormMonomial::unit(d),
            SuperMonomial::unit(d),
            DerMonomial::unit(d),
            PolyMonomial::gen(d, Var::Z(0)),
            int(1),
        );
        let mut expect = VirtualForm::zero(d);
        expect.add_term(
            FormMonomial::unit(d),
            SuperMonomial::unit(d),
            DerMonomial::var(d, Var::Z(0)),
            PolyMonomial::unit(d),
            int(-1),
        );
        assert_eq!(e.delta_hat(), expect);
        // 1 (x) 1 (x) Pth -> 1 (x) Dth (x) 1
        let mut e = VirtualForm::zero(d);
        e.add_term(
            FormMonomial::unit(d),
            SuperMonomial::unit(d),
            DerMonomial::unit(d),
            PolyMonomial::gen(d, Var::Theta(0)),
            int(1),
        );
        let mut expect = VirtualForm::zero(d);
        expect.add_term(
            FormMonomial::unit(d),
            SuperMonomial::unit(d),
            DerMonomial::var(d, Var::Theta(0)),
            PolyMonomial::unit(d),
            int(1),
        );
        assert_eq!(e.delta_hat(), expect);
    }

    #[test]
    fn d_hat_examples() {
        let d = d11();
        // 1 (x) 1 (x) Pz -> dz (x) Dz (x) Pz + dth (x) Dth (x) Pz
        let mut e = VirtualForm::zero(d);
        e.add_term(
            FormMonomial::unit(d),
            SuperMonomial::unit(d),
            DerMonomial::unit(d),
            PolyMonomial::gen(d, Var::Z(0)),
            int(1),
        );
        let got = e.d_hat();
        assert_eq!(got.terms.len(), 2);
        // dz (x) Dth (x) 1 is closed
        let mut e = VirtualForm::zero(d);
        e.add_term(
            FormMonomial::gen(d, Var::Z(0)),
            SuperMonomial::unit(d),
            DerMonomial::var(d, Var::Theta(0)),
            PolyMonomial::unit(d),
            int(1),
        );
        assert!(e.d_hat().is_zero());
    }

    #[test]
    fn differentials_anticommute_and_square_to_zero() {
        let d = d11();
        let z = SuperPoly::var(d, Var::Z(0));
        let th = SuperPoly::var(d, Var::Theta(0));
        let op = WeylOp::derivative(d, Var::Theta(0))
            .left_mul_poly(&z)
            .add(&WeylOp::derivative(d, Var::Z(0)));
        let tau = PolyElem::gen(d, Var::Z(0))
            .mul(&PolyElem::gen(d, Var::Theta(0)))
            .mul_fn_left(&th.add(&SuperPoly::one(d)));
        let mut omega = FormElem::gen(d, Var::Theta(0));
        omega.add_term(FormMonomial::gen(d, Var::Z(0)), z.clone());
        let v = VirtualForm::normalize(d, &[(omega, op, tau)]);
        assert!(v.d_hat().d_hat().is_zero());
        assert!(v.delta_hat().delta_hat().is_zero());
        assert!(v.total_d().total_d().is_zero());
        assert!(v
            .d_hat()
            .delta_hat()
            .add(&v.delta_hat().d_hat())
            .is_zero());
        // plain operators commute exactly
        assert_eq!(
            v.d_hat().delta_plain(),
            v.delta_plain().d_hat()
        );
    }

    #[test]
    fn k_hat_inverts_delta_hat_on_nonzero_eigenvalues() {
        let d = d11();
        let mut e = VirtualForm::zero(d);
        e.add_term(
            FormMonomial::gen(d, Var::Theta(0)),
            SuperMonomial::var(d, Var::Z(0)),
            DerMonomial::var(d, Var::Z(0)),
            PolyMonomial::gen(d, Var::Theta(0)),
            int(1),
        );
        let closed = e.delta_hat();
        assert!(!closed.is_zero());
        for (eig, part) in closed.spencer_eigen_split() {
            assert_ne!(eig, 0);
            let witness = part.k_hat().scale(&crate::scalar::frac(1, eig));
            assert_eq!(witness.delta_hat(), part);
        }
    }

    #[test]
    fn induced_form_differential_is_exterior_d() {
        let d = d11();
        let z = SuperPoly::var(d, Var::Z(0));
        let th = SuperPoly::var(d, Var::Theta(0));
        let mut omega = FormElem::zero(d);
        omega.add_term(FormMonomial::gen(d, Var::Theta(0)), z.mul(&th));
        omega.add_term(FormMonomial::unit(d), z.mul(&z));
        // representatives are delta^-closed
        assert!(VirtualForm::embed_form(&omega).delta_hat().is_zero());
        assert_eq!(induced_form_d(&omega), Some(omega.exterior_d()));
    }

    #[test]
    fn induced_integral_differential_matches_delta() {
        let d = d11();
        let z = SuperPoly::var(d, Var::Z(0));
        // phi z (x) Pz, an odd section; the untwisted induced differential
        // reproduces the integral-form differential exactly
        let s = IntegralForm::new(d, z.clone(), PolyMonomial::gen(d, Var::Z(0)));
        assert_eq!(
            induced_integral_delta(&s),
            Some(crate::berezin::integral_delta(&s))
        );
        // representatives are d^-closed
        assert!(embed_integral(&s).d_hat().is_zero());
        // an even section
        let th = SuperPoly::var(d, Var::Theta(0));
        let s = IntegralForm::new(d, th.mul(&z), PolyMonomial::gen(d, Var::Z(0)));
        assert_eq!(
            induced_integral_delta(&s),
            Some(crate::berezin::integral_delta(&s))
        );
    }
}
