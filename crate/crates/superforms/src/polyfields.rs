//! Polyvector fields `S^. PiT`: `Pth` even, `Pz` odd, coefficients on the
//! left; the Lie derivative and the local operator `e_x`.

use std::collections::BTreeMap;

use crate::coord::{self, Dims, OddSet, Var};
use crate::forms::{self, FormElem, FormMonomial};
use crate::scalar::Scalar;
use crate::superpoly::SuperPoly;
use crate::weyl::WeylOp;

/// A polyfield monomial `Pth^K Pz_T`, the `Pz` factors ascending.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PolyMonomial {
    pub pth: Vec<u8>,
    pub pz: OddSet,
}

impl PolyMonomial {
    pub fn unit(dims: Dims) -> Self {
        PolyMonomial {
            pth: vec![0; dims.q],
            pz: 0,
        }
    }

    pub fn gen(dims: Dims, v: Var) -> Self {
        let mut m = Self::unit(dims);
        match v {
            Var::Z(i) => m.pz = 1 << i,
            Var::Theta(a) => m.pth[a] = 1,
        }
        m
    }

    pub fn is_unit(&self) -> bool {
        self.pz == 0 && self.pth.iter().all(|&e| e == 0)
    }

    pub fn is_odd(&self) -> bool {
        coord::set_len(self.pz) % 2 == 1
    }

    pub fn poly_degree(&self) -> u32 {
        self.pth_degree() + self.pz_degree()
    }

    pub fn pth_degree(&self) -> u32 {
        self.pth.iter().map(|&e| e as u32).sum()
    }

    pub fn pz_degree(&self) -> u32 {
        coord::set_len(self.pz)
    }

    pub fn mul(&self, other: &PolyMonomial) -> Option<(PolyMonomial, bool)> {
        let (pz, neg) = coord::merge_sets(self.pz, other.pz)?;
        let pth = self
            .pth
            .iter()
            .zip(&other.pth)
            .map(|(a, b)| a + b)
            .collect();
        Some((PolyMonomial { pth, pz }, neg))
    }

    /// Multiplies by `P_v` from the left.
    pub fn mul_gen_left(&self, v: Var) -> Option<(PolyMonomial, bool)> {
        match v {
            Var::Theta(a) => {
                let mut m = self.clone();
                m.pth[a] += 1;
                Some((m, false))
            }
            Var::Z(i) => {
                let (pz, neg) = coord::insert_from_left(self.pz, i)?;
                Some((
                    PolyMonomial {
                        pth: self.pth.clone(),
                        pz,
                    },
                    neg,
                ))
            }
        }
    }

    /// Degree-one factors in canonical order (`Pth` ascending with
    /// multiplicity, then `Pz` ascending).
    pub fn factors(&self) -> Vec<Var> {
        let mut out = Vec::new();
        for (a, &e) in self.pth.iter().enumerate() {
            for _ in 0..e {
                out.push(Var::Theta(a));
            }
        }
        out.extend(coord::set_iter(self.pz).map(Var::Z));
        out
    }
}

/// All polyfield monomials with `pth`-exponent sum at most `max_pth`.
pub fn enumerate_monomials(dims: Dims, max_pth: u32) -> Vec<PolyMonomial> {
    let mut out = Vec::new();
    for pth in coord::bounded_exps(dims.q, max_pth) {
        for pz in coord::all_subsets(dims.p) {
            out.push(PolyMonomial { pth: pth.clone(), pz });
        }
    }
    out
}

/// A polyvector field, coefficients on the left: `sum_I f_I . P^I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyElem {
    pub dims: Dims,
    pub terms: BTreeMap<PolyMonomial, SuperPoly>,
}

impl PolyElem {
    pub fn zero(dims: Dims) -> Self {
        PolyElem {
            dims,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_poly(f: &SuperPoly) -> Self {
        let mut e = Self::zero(f.dims);
        e.add_term(PolyMonomial::unit(f.dims), f.clone());
        e
    }

    pub fn gen(dims: Dims, v: Var) -> Self {
        let mut e = Self::zero(dims);
        e.add_term(PolyMonomial::gen(dims, v), SuperPoly::one(dims));
        e
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

    pub fn add(&self, other: &PolyElem) -> PolyElem {
        assert_eq!(self.dims, other.dims);
        let mut out = self.clone();
        for (m, f) in &other.terms {
            out.add_term(m.clone(), f.clone());
        }
        out
    }

    pub fn sub(&self, other: &PolyElem) -> PolyElem {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> PolyElem {
        let mut out = PolyElem::zero(self.dims);
        for (m, f) in &self.terms {
            out.add_term(m.clone(), f.neg());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> PolyElem {
        let mut out = PolyElem::zero(self.dims);
        for (m, f) in &self.terms {
            out.add_term(m.clone(), f.scale(c));
        }
        out
    }

    /// Left multiplication by a function.
    pub fn mul_fn_left(&self, f: &SuperPoly) -> PolyElem {
        let mut out = PolyElem::zero(self.dims);
        for (m, g) in &self.terms {
            out.add_term(m.clone(), f.mul(g));
        }
        out
    }

    pub fn parity(&self) -> Option<bool> {
        let mut parities = self.terms.iter().flat_map(|(m, f)| {
            f.terms
                .keys()
                .map(move |fm| m.is_odd() ^ fm.is_odd())
        });
        let first = parities.next()?;
        parities.all(|p| p == first).then_some(first)
    }

    /// Supercommutative product: `(f I)(g J) = (-1)^{|I||g|} (f g)(I J)`.
    pub fn mul(&self, other: &PolyElem) -> PolyElem {
        assert_eq!(self.dims, other.dims);
        let mut out = PolyElem::zero(self.dims);
        for (ma, fa) in &self.terms {
            for (mb, fb) in &other.terms {
                let Some((m, neg_m)) = ma.mul(mb) else {
                    continue;
                };
                let (fb_even, fb_odd) = fb.parity_parts();
                for (right, extra_neg) in [(fb_even, false), (fb_odd, ma.is_odd())] {
                    if right.is_zero() {
                        continue;
                    }
                    let mut prod = fa.mul(&right);
                    if neg_m ^ extra_neg {
                        prod = prod.neg();
                    }
                    out.add_term(m.clone(), prod);
                }
            }
        }
        out
    }

    pub fn poly_degree_parts(&self) -> BTreeMap<u32, PolyElem> {
        let mut out: BTreeMap<u32, PolyElem> = BTreeMap::new();
        for (m, f) in &self.terms {
            out.entry(m.poly_degree())
                .or_insert_with(|| PolyElem::zero(self.dims))
                .add_term(m.clone(), f.clone());
        }
        out
    }
}

/// A vector field `X = sum_a X^a D_a`, components on the left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    pub dims: Dims,
    pub comps: BTreeMap<Var, SuperPoly>,
}

impl VectorField {
    pub fn zero(dims: Dims) -> Self {
        VectorField {
            dims,
            comps: BTreeMap::new(),
        }
    }

    pub fn coordinate(dims: Dims, v: Var) -> Self {
        let mut x = Self::zero(dims);
        x.comps.insert(v, SuperPoly::one(dims));
        x
    }

    pub fn single(dims: Dims, v: Var, coeff: SuperPoly) -> Self {
        let mut x = Self::zero(dims);
        if !coeff.is_zero() {
            x.comps.insert(v, coeff);
        }
        x
    }

    /// Parity when homogeneous: `|X^a| + |x_a|` constant over components.
    pub fn parity(&self) -> Option<bool> {
        let mut parities = self.comps.iter().flat_map(|(v, f)| {
            f.terms
                .keys()
                .map(move |m| m.is_odd() ^ v.is_odd())
        });
        let first = parities.next()?;
        parities.all(|p| p == first).then_some(first)
    }

    pub fn apply(&self, f: &SuperPoly) -> SuperPoly {
        let mut out = SuperPoly::zero(self.dims);
        for (v, comp) in &self.comps {
            out = out.add(&comp.mul(&f.partial(*v)));
        }
        out
    }

    pub fn to_weyl(&self) -> WeylOp {
        let mut op = WeylOp::zero(self.dims);
        for (v, comp) in &self.comps {
            op = op.add(&WeylOp::derivative(self.dims, *v).left_mul_poly(comp));
        }
        op
    }

    /// Reads a first-order operator without constant term back as a field.
    pub fn from_weyl(op: &WeylOp) -> Option<VectorField> {
        let mut x = VectorField::zero(op.dims);
        for ((xm, dm), c) in &op.terms {
            if dm.degree() != 1 {
                return None;
            }
            let v = dm.factors()[0];
            let entry = x
                .comps
                .entry(v)
                .or_insert_with(|| SuperPoly::zero(op.dims));
            *entry = entry.add(&SuperPoly::monomial(op.dims, xm.clone(), c.clone()));
        }
        x.comps.retain(|_, f| !f.is_zero());
        Some(x)
    }

    /// As the degree-one polyfield `pi X`.
    pub fn to_pi(&self) -> PolyElem {
        let mut out = PolyElem::zero(self.dims);
        for (v, comp) in &self.comps {
            out.add_term(PolyMonomial::gen(self.dims, *v), comp.clone());
        }
        out
    }
}

/// `L_X(P_v) = pi [X, D_v]`, the degree-one Lie derivative.
fn lie_on_gen(x: &VectorField, v: Var) -> PolyElem {
    let bracket = x
        .to_weyl()
        .super_commutator(&WeylOp::derivative(x.dims, v));
    if bracket.is_zero() {
        return PolyElem::zero(x.dims);
    }
    VectorField::from_weyl(&bracket)
        .expect("bracket of vector fields is a vector field")
        .to_pi()
}

/// Lie derivative on polyfields, computed by the closed forms: `X(f)` on
/// degree zero, `pi [X, pi tau]` on degree one, extended as a
/// superderivation.
pub fn lie_derivative(x: &VectorField, tau: &PolyElem) -> PolyElem {
    let px = x.parity().unwrap_or(false);
    let mut out = PolyElem::zero(tau.dims);
    for (m, f) in &tau.terms {
        for (fm, c) in &f.terms {
            // X(f) . m
            let coeff = SuperPoly::monomial(tau.dims, fm.clone(), c.clone());
            out.add_term(m.clone(), x.apply(&coeff));
            // Leibniz across the degree-one factors of m
            let factors = m.factors();
            let mut acc_parity = fm.is_odd();
            for (j, v) in factors.iter().enumerate() {
                let lm = lie_on_gen(x, *v);
                if !lm.is_zero() {
                    let mut piece = PolyElem::from_poly(&coeff);
                    for w in &factors[..j] {
                        piece = piece.mul(&PolyElem::gen(tau.dims, *w));
                    }
                    piece = piece.mul(&lm);
                    for w in &factors[j + 1..] {
                        piece = piece.mul(&PolyElem::gen(tau.dims, *w));
                    }
                    if px && acc_parity {
                        piece = piece.neg();
                    }
                    out = out.add(&piece);
                }
                // the generator P_v has parity |x_v| + 1
                acc_parity ^= !v.is_odd();
            }
        }
    }
    out
}

/// `e_x(tau) = sum_a <dx_a, L_{D_a}(tau)>`, the sum running over all
/// coordinates.
pub fn e_x(tau: &PolyElem) -> PolyElem {
    let mut out = PolyElem::zero(tau.dims);
    for v in tau.dims.vars() {
        let lie = lie_derivative(&VectorField::coordinate(tau.dims, v), tau);
        let form = FormElem::gen(tau.dims, v);
        out = out.add(&form.contract_one(&lie).expect("1-form"));
    }
    out
}

/// Contraction `<dx_v, P^I>` exposed on monomials.
pub fn contract_der(v: Var, m: &PolyMonomial, dims: Dims) -> PolyElem {
    let mut out = PolyElem::zero(dims);
    if let Some((m2, c)) = forms::contract_monomial(v, m) {
        out.add_term(m2, SuperPoly::constant(dims, c));
    }
    out
}

/// Lie derivative on 1-forms: `L_X(dx_a) := (-1)^{|X|} d(X^a)`, extended by
/// `L_X(dx_a . g) = L_X(dx_a) . g + (-1)^{|X|(|x_a|+1)} dx_a . X(g)`.
pub fn lie_on_one_form(x: &VectorField, omega: &FormElem) -> FormElem {
    let px = x.parity().unwrap_or(false);
    let mut out = FormElem::zero(omega.dims);
    for (m, g) in &omega.terms {
        assert_eq!(m.form_degree(), 1, "lie_on_one_form expects 1-forms");
        let v = if m.dz != 0 {
            Var::Z(coord::set_iter(m.dz).next().unwrap())
        } else {
            Var::Theta(m.dth.iter().position(|&e| e == 1).unwrap())
        };
        let comp = x
            .comps
            .get(&v)
            .cloned()
            .unwrap_or_else(|| SuperPoly::zero(omega.dims));
        let mut lead = FormElem::from_poly(&comp).exterior_d();
        if px {
            lead = lead.neg();
        }
        out = out.add(&lead.mul(&FormElem::from_poly(g)));
        let mut trail = x.apply(g);
        if px && !v.is_odd() {
            trail = trail.neg();
        }
        out.add_term(FormMonomial::gen(omega.dims, v), trail);
    }
    out
}

/// Iterated contraction, leftmost 1-form factor applied first:
/// `<m1 m2 .. g, tau> = <m2 .., <m1, g tau>>`.
pub fn contract_iterated(omega: &FormElem, tau: &PolyElem) -> PolyElem {
    let dims = omega.dims;
    let mut out = PolyElem::zero(dims);
    for (m, g) in &omega.terms {
        let mut factors: Vec<Var> = Vec::new();
        for (a, &e) in m.dth.iter().enumerate() {
            for _ in 0..e {
                factors.push(Var::Theta(a));
            }
        }
        factors.extend(coord::set_iter(m.dz).map(Var::Z));
        let mut cur = tau.mul_fn_left(g);
        for v in factors {
            cur = FormElem::gen(dims, v)
                .contract_one(&cur)
                .expect("generator is a 1-form");
        }
        out = out.add(&cur);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
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
    fn lie_examples() {
        let d = d11();
        // constant fields commute
        let x = VectorField::coordinate(d, Var::Z(0));
        assert!(lie_derivative(&x, &PolyElem::gen(d, Var::Theta(0))).is_zero());
        // L_{z Dz}(Pz) = -Pz
        let euler = VectorField::single(d, Var::Z(0), z(d));
        assert_eq!(
            lie_derivative(&euler, &PolyElem::gen(d, Var::Z(0))),
            PolyElem::gen(d, Var::Z(0)).neg()
        );
        // L_{th Dz}(Pth) = Pz
        let x = VectorField::single(d, Var::Z(0), th(d));
        assert_eq!(
            lie_derivative(&x, &PolyElem::gen(d, Var::Theta(0))),
            PolyElem::gen(d, Var::Z(0))
        );
    }

    #[test]
    fn e_x_examples() {
        let d = d11();
        assert!(e_x(&PolyElem::gen(d, Var::Z(0))).is_zero());
        let tau = PolyElem::gen(d, Var::Z(0)).mul_fn_left(&z(d));
        assert_eq!(
            e_x(&tau),
            PolyElem::from_poly(&SuperPoly::one(d)).neg()
        );
        let tau = PolyElem::gen(d, Var::Theta(0)).mul_fn_left(&th(d));
        assert_eq!(e_x(&tau), PolyElem::from_poly(&SuperPoly::one(d)));
    }

    #[test]
    fn contract_der_examples() {
        let d = d11();
        let pz = PolyMonomial::gen(d, Var::Z(0));
        assert_eq!(
            contract_der(Var::Z(0), &pz, d),
            PolyElem::from_poly(&SuperPoly::one(d)).neg()
        );
        let mut pth2 = PolyMonomial::unit(d);
        pth2.pth[0] = 2;
        assert_eq!(
            contract_der(Var::Theta(0), &pth2, d),
            PolyElem::gen(d, Var::Theta(0)).scale(&int(2))
        );
        assert!(contract_der(Var::Theta(0), &pz, d).is_zero());
    }

    #[test]
    fn iterated_contraction_well_defined() {
        // contraction operators by different 1-forms supercommute, so the
        // leftmost-first reading does not depend on the factorization
        let d = Dims::new(2, 1);
        let dz1 = FormElem::gen(d, Var::Z(0));
        let dz2 = FormElem::gen(d, Var::Z(1));
        let tau = PolyElem::gen(d, Var::Z(0))
            .mul(&PolyElem::gen(d, Var::Z(1)))
            .mul(&PolyElem::gen(d, Var::Theta(0)));
        let a = contract_iterated(&dz1.mul(&dz2), &tau);
        let b = contract_iterated(&dz2.mul(&dz1), &tau).neg();
        assert_eq!(a, b);
        assert!(!a.is_zero());
    }
}
