//! The Berezinian module and integral forms.
//!
//! `Ber` is represented through its local generator
//! `phi(x) = [dz_1..dz_p (x) Dth_1..Dth_q]`, a right module over functions
//! and over the Weyl algebra. Integral forms are `phi f (x) P^I` sums with
//! the polyfield monomial carrying unit coefficient.

use std::collections::BTreeMap;

use crate::coord::Dims;
use crate::forms;
use crate::polyfields::PolyMonomial;
use crate::scalar::{self, Scalar};
use crate::superpoly::SuperPoly;
use crate::weyl::WeylOp;
use crate::polyfields::VectorField;

/// Parity of the generator `phi(x)`: `p + q mod 2`.
pub fn phi_parity(dims: Dims) -> bool {
    (dims.p + dims.q) % 2 == 1
}

/// A section `phi(x) . f` of the Berezinian.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BerSection {
    pub dims: Dims,
    pub coeff: SuperPoly,
}

impl BerSection {
    pub fn new(coeff: SuperPoly) -> Self {
        BerSection {
            dims: coeff.dims,
            coeff,
        }
    }

    pub fn generator(dims: Dims) -> Self {
        Self::new(SuperPoly::one(dims))
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn add(&self, other: &BerSection) -> BerSection {
        BerSection::new(self.coeff.add(&other.coeff))
    }

    pub fn neg(&self) -> BerSection {
        BerSection::new(self.coeff.neg())
    }

    /// Right multiplication by a function.
    pub fn mul_fn(&self, f: &SuperPoly) -> BerSection {
        BerSection::new(self.coeff.mul(f))
    }

    pub fn parity(&self) -> Option<bool> {
        self.coeff.parity().map(|p| p ^ phi_parity(self.dims))
    }
}

/// An integral form `sum_I phi f_I (x) P^I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralForm {
    pub dims: Dims,
    pub terms: BTreeMap<PolyMonomial, SuperPoly>,
}

impl IntegralForm {
    pub fn zero(dims: Dims) -> Self {
        IntegralForm {
            dims,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_section(s: &BerSection) -> Self {
        let mut out = Self::zero(s.dims);
        out.add_term(PolyMonomial::unit(s.dims), s.coeff.clone());
        out
    }

    pub fn new(dims: Dims, coeff: SuperPoly, m: PolyMonomial) -> Self {
        let mut out = Self::zero(dims);
        out.add_term(m, coeff);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: PolyMonomial, f: SuperPoly) {
        if f.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(f);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&f);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &IntegralForm) -> IntegralForm {
        assert_eq!(self.dims, other.dims);
        let mut out = self.clone();
        for (m, f) in &other.terms {
            out.add_term(m.clone(), f.clone());
        }
        out
    }

    pub fn sub(&self, other: &IntegralForm) -> IntegralForm {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> IntegralForm {
        let mut out = IntegralForm::zero(self.dims);
        for (m, f) in &self.terms {
            out.add_term(m.clone(), f.neg());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> IntegralForm {
        let mut out = IntegralForm::zero(self.dims);
        for (m, f) in &self.terms {
            out.add_term(m.clone(), f.scale(c));
        }
        out
    }

    /// Term parity: `p+q + |f| + |P^I| mod 2`.
    pub fn parity(&self) -> Option<bool> {
        let phi = phi_parity(self.dims);
        let mut parities = self.terms.iter().flat_map(|(m, f)| {
            f.terms
                .keys()
                .map(move |fm| phi ^ m.is_odd() ^ fm.is_odd())
        });
        let first = parities.next()?;
        parities.all(|p| p == first).then_some(first)
    }
}

/// The integral-form differential, written on left-moved coefficients:
/// `delta(phi f (x) P^I) = -sum_a (-1)^{|x_a||f| + |P^I|}
/// phi (D_a f) (x) <dx_a, P^I>`.
pub fn integral_delta(s: &IntegralForm) -> IntegralForm {
    let dims = s.dims;
    let mut out = IntegralForm::zero(dims);
    for (im, f) in &s.terms {
        for (fm, c) in &f.terms {
            for v in dims.vars() {
                let df = SuperPoly::monomial(dims, fm.clone(), c.clone()).partial(v);
                if df.is_zero() {
                    continue;
                }
                let Some((im2, pair)) = forms::contract_monomial(v, im) else {
                    continue;
                };
                let neg = (v.is_odd() && fm.is_odd()) ^ im.is_odd() ^ true;
                let mut coeff = df.scale(&pair);
                if neg {
                    coeff = coeff.neg();
                }
                out.add_term(im2.clone(), coeff);
            }
        }
    }
    out
}

/// Lie derivative of a Berezinian section along a homogeneous vector field:
/// `L_X(phi f) = (-1)^{|phi(x)||X|} phi sum_a (-1)^{|X^a|(|x_a|+|f|)}
/// D_a(f X^a)`.
pub fn ber_lie(x: &VectorField, s: &BerSection) -> BerSection {
    let dims = s.dims;
    let px = x.parity().unwrap_or(false);
    let mut out = SuperPoly::zero(dims);
    let (f_even, f_odd) = s.coeff.parity_parts();
    for (f, pf) in [(f_even, false), (f_odd, true)] {
        if f.is_zero() {
            continue;
        }
        for (v, comp) in &x.comps {
            let pcomp = px ^ v.is_odd();
            let term = f.mul(comp).partial(*v);
            let neg = (pcomp && (v.is_odd() ^ pf)) ^ (phi_parity(dims) && px);
            out = out.add(&if neg { term.neg() } else { term });
        }
    }
    BerSection::new(out)
}

/// Right action of the Weyl algebra on Berezinian sections, generated by
/// `phi g . D_a = -(-1)^{|x_a||g|} phi D_a(g)` and right multiplication.
pub fn ber_right_action(s: &BerSection, op: &WeylOp) -> BerSection {
    let dims = s.dims;
    let mut out = SuperPoly::zero(dims);
    for ((xm, dm), c) in &op.terms {
        let mut cur = s
            .coeff
            .mul(&SuperPoly::monomial(dims, xm.clone(), c.clone()));
        for v in dm.factors() {
            let (even, odd) = cur.parity_parts();
            let mut next = even.partial(v).neg();
            let odd_part = odd.partial(v);
            next = next.add(&if v.is_odd() { odd_part } else { odd_part.neg() });
            cur = next;
        }
        out = out.add(&cur);
    }
    BerSection::new(out)
}

/// The closed generator `s_0 = phi th_1..th_q (x) Pz_1..Pz_p`.
pub fn s0(dims: Dims) -> IntegralForm {
    let mut theta_top = crate::superpoly::SuperMonomial::unit(dims);
    theta_top.theta = ((1u32 << dims.q) - 1) as u16;
    let mut pm = PolyMonomial::unit(dims);
    pm.pz = ((1u32 << dims.p) - 1) as u16;
    IntegralForm::new(
        dims,
        SuperPoly::monomial(dims, theta_top, scalar::one()),
        pm,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coord::Var;
    use crate::scalar::int;

    fn d11() -> Dims {
        Dims::new(1, 1)
    }

    fn z(d: Dims) -> SuperPoly {
        SuperPoly::var(d, Var::Z(0))
    }

    fn th(d: Dims) -> SuperPoly {
        SuperPoly::var(d, Var::Theta(0))
    }

    #[test]
    fn delta_examples() {
        let d = d11();
        let pz = PolyMonomial::gen(d, Var::Z(0));
        // phi . 1 (x) Pz |-> 0
        let s = IntegralForm::new(d, SuperPoly::one(d), pz.clone());
        assert!(integral_delta(&s).is_zero());
        // phi . z (x) Pz |-> -phi (x) 1
        let s = IntegralForm::new(d, z(d), pz.clone());
        let expect = IntegralForm::new(d, SuperPoly::one(d), PolyMonomial::unit(d)).neg();
        assert_eq!(integral_delta(&s), expect);
        // phi . th (x) Pz is closed
        let s = IntegralForm::new(d, th(d), pz);
        assert!(integral_delta(&s).is_zero());
    }

    #[test]
    fn delta_squared_zero() {
        let d = Dims::new(2, 2);
        for im in crate::polyfields::enumerate_monomials(d, 2) {
            for fm in crate::superpoly::enumerate_monomials(d, 3) {
                let s = IntegralForm::new(d, SuperPoly::monomial(d, fm, int(1)), im.clone());
                assert!(integral_delta(&integral_delta(&s)).is_zero());
            }
        }
    }

    #[test]
    fn lie_examples() {
        let d = d11();
        let phi = BerSection::generator(d);
        assert!(ber_lie(&VectorField::coordinate(d, Var::Z(0)), &phi).is_zero());
        // L_{z Dz}(phi) = phi
        let euler = VectorField::single(d, Var::Z(0), z(d));
        assert_eq!(ber_lie(&euler, &phi), phi);
        // L_{th Dth}(phi) = -phi
        let x = VectorField::single(d, Var::Theta(0), th(d));
        assert_eq!(ber_lie(&x, &phi), phi.neg());
    }

    #[test]
    fn right_action_examples() {
        let d = d11();
        let phi = BerSection::generator(d);
        for v in [Var::Z(0), Var::Theta(0)] {
            assert!(ber_right_action(&phi, &WeylOp::derivative(d, v)).is_zero());
        }
        // phi . (z Dz) = -phi
        let op = WeylOp::derivative(d, Var::Z(0)).left_mul_poly(&z(d));
        assert_eq!(ber_right_action(&phi, &op), phi.neg());
    }

    #[test]
    fn right_action_is_module_action() {
        let d = Dims::new(1, 2);
        let phi = BerSection::new(
            z(d).add(&SuperPoly::var(d, Var::Theta(1)).mul(&th(d))),
        );
        let a = WeylOp::derivative(d, Var::Theta(0))
            .left_mul_poly(&z(d))
            .add(&WeylOp::derivative(d, Var::Z(0)));
        let b = WeylOp::derivative(d, Var::Theta(1)).left_mul_poly(&th(d));
        let via_product = ber_right_action(&phi, &a.compose(&b));
        let stepwise = ber_right_action(&ber_right_action(&phi, &a), &b);
        assert_eq!(via_product, stepwise);
    }

    #[test]
    fn action_matches_lie_derivative() {
        // phi f . X = -(-1)^{|phi f||X|} L_X(phi f) on homogeneous sections
        let d = Dims::new(1, 2);
        let sections = [
            SuperPoly::one(d),
            z(d),
            th(d),
            th(d).mul(&SuperPoly::var(d, Var::Theta(1))),
        ];
        let fields = [
            VectorField::single(d, Var::Z(0), z(d).mul(&z(d))),
            VectorField::single(d, Var::Theta(1), th(d).mul(&z(d))),
            VectorField::single(d, Var::Z(0), th(d)),
            VectorField::single(d, Var::Theta(0), SuperPoly::one(d)),
        ];
        for f in &sections {
            let s = BerSection::new(f.clone());
            for x in &fields {
                let lhs = ber_right_action(&s, &x.to_weyl());
                let mut rhs = ber_lie(x, &s).neg();
                if s.parity().unwrap() && x.parity().unwrap() {
                    rhs = rhs.neg();
                }
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn s0_is_closed() {
        for d in [Dims::new(1, 1), Dims::new(2, 2), Dims::new(2, 1)] {
            assert!(integral_delta(&s0(d)).is_zero());
        }
    }
}
