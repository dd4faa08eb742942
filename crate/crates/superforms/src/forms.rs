//! Differential superforms: `dth` even, `dz` odd, coefficients on the right.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::coord::{self, Dims, OddSet, Var};
use crate::polyfields::{PolyElem, PolyMonomial};
use crate::scalar::{self, Scalar};
use crate::superpoly::SuperPoly;

/// A form monomial `dth^D dz_S`, the `dz` factors ascending.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FormMonomial {
    pub dth: Vec<u8>,
    pub dz: OddSet,
}

impl FormMonomial {
    pub fn unit(dims: Dims) -> Self {
        FormMonomial {
            dth: vec![0; dims.q],
            dz: 0,
        }
    }

    pub fn gen(dims: Dims, v: Var) -> Self {
        let mut m = Self::unit(dims);
        match v {
            Var::Z(i) => m.dz = 1 << i,
            Var::Theta(a) => m.dth[a] = 1,
        }
        m
    }

    pub fn is_unit(&self) -> bool {
        self.dz == 0 && self.dth.iter().all(|&e| e == 0)
    }

    pub fn is_odd(&self) -> bool {
        coord::set_len(self.dz) % 2 == 1
    }

    pub fn form_degree(&self) -> u32 {
        self.even_gen_degree() + self.odd_gen_degree()
    }

    /// Count of even generators (`dth`).
    pub fn even_gen_degree(&self) -> u32 {
        self.dth.iter().map(|&e| e as u32).sum()
    }

    /// Count of odd generators (`dz`).
    pub fn odd_gen_degree(&self) -> u32 {
        coord::set_len(self.dz)
    }

    /// Multiplies by `dx_v` from the left.
    pub fn mul_dx_left(&self, v: Var) -> Option<(FormMonomial, bool)> {
        match v {
            Var::Theta(a) => {
                let mut m = self.clone();
                m.dth[a] += 1;
                Some((m, false))
            }
            Var::Z(i) => {
                let (dz, neg) = coord::insert_from_left(self.dz, i)?;
                Some((
                    FormMonomial {
                        dth: self.dth.clone(),
                        dz,
                    },
                    neg,
                ))
            }
        }
    }

    /// Multiplies by `dx_v` from the right.
    pub fn mul_dx_right(&self, v: Var) -> Option<(FormMonomial, bool)> {
        match v {
            Var::Theta(a) => {
                let mut m = self.clone();
                m.dth[a] += 1;
                Some((m, false))
            }
            Var::Z(i) => {
                let (dz, neg) = coord::insert_from_right(self.dz, i)?;
                Some((
                    FormMonomial {
                        dth: self.dth.clone(),
                        dz,
                    },
                    neg,
                ))
            }
        }
    }

    /// Left superderivation dual to multiplication by `dx_v`.
    pub fn partial_dx(&self, v: Var) -> Option<(FormMonomial, Scalar)> {
        match v {
            Var::Theta(a) => {
                if self.dth[a] == 0 {
                    return None;
                }
                let mut m = self.clone();
                m.dth[a] -= 1;
                Some((m, scalar::int(self.dth[a] as i64)))
            }
            Var::Z(i) => {
                let (dz, neg) = coord::remove_from_left(self.dz, i)?;
                let mut c = scalar::one();
                scalar::negate_if(&mut c, neg);
                Some((
                    FormMonomial {
                        dth: self.dth.clone(),
                        dz,
                    },
                    c,
                ))
            }
        }
    }

    pub fn mul(&self, other: &FormMonomial) -> Option<(FormMonomial, bool)> {
        let (dz, neg) = coord::merge_sets(self.dz, other.dz)?;
        let dth = self
            .dth
            .iter()
            .zip(&other.dth)
            .map(|(a, b)| a + b)
            .collect();
        Some((FormMonomial { dth, dz }, neg))
    }
}

/// All form monomials with `dth`-exponent sum at most `max_dth` (all `dz`
/// subsets).
pub fn enumerate_monomials(dims: Dims, max_dth: u32) -> Vec<FormMonomial> {
    let mut out = Vec::new();
    for dth in coord::bounded_exps(dims.q, max_dth) {
        for dz in coord::all_subsets(dims.p) {
            out.push(FormMonomial { dth: dth.clone(), dz });
        }
    }
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormError {
    #[error("contraction expects a 1-form, got degree {0}")]
    DegreeMismatch(u32),
}

/// A differential superform, coefficients written to the right of the
/// monomial: `sum_m m . f_m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormElem {
    pub dims: Dims,
    pub terms: BTreeMap<FormMonomial, SuperPoly>,
}

impl FormElem {
    pub fn zero(dims: Dims) -> Self {
        FormElem {
            dims,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(dims: Dims) -> Self {
        Self::from_poly(&SuperPoly::one(dims))
    }

    pub fn from_poly(f: &SuperPoly) -> Self {
        let mut e = Self::zero(f.dims);
        e.add_term(FormMonomial::unit(f.dims), f.clone());
        e
    }

    pub fn gen(dims: Dims, v: Var) -> Self {
        let mut e = Self::zero(dims);
        e.add_term(FormMonomial::gen(dims, v), SuperPoly::one(dims));
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: FormMonomial, f: SuperPoly) {
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

    pub fn add(&self, other: &FormElem) -> FormElem {
        assert_eq!(self.dims, other.dims);
        let mut out = self.clone();
        for (m, f) in &other.terms {
            out.add_term(m.clone(), f.clone());
        }
        out
    }

    pub fn sub(&self, other: &FormElem) -> FormElem {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> FormElem {
        let mut out = FormElem::zero(self.dims);
        for (m, f) in &self.terms {
            out.add_term(m.clone(), f.neg());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> FormElem {
        let mut out = FormElem::zero(self.dims);
        for (m, f) in &self.terms {
            out.add_term(m.clone(), f.scale(c));
        }
        out
    }

    /// Total parity (monomial plus coefficient) when homogeneous.
    pub fn parity(&self) -> Option<bool> {
        let mut parities = self.terms.iter().flat_map(|(m, f)| {
            f.terms
                .keys()
                .map(move |fm| m.is_odd() ^ fm.is_odd())
        });
        let first = parities.next()?;
        parities.all(|p| p == first).then_some(first)
    }

    /// Supercommutative product; the Koszul sign is generated here, when the
    /// left coefficient crosses the right monomial.
    pub fn mul(&self, other: &FormElem) -> FormElem {
        assert_eq!(self.dims, other.dims);
        let mut out = FormElem::zero(self.dims);
        for (ma, fa) in &self.terms {
            for (mb, fb) in &other.terms {
                let Some((m, neg_m)) = ma.mul(mb) else {
                    continue;
                };
                let (fa_even, fa_odd) = fa.parity_parts();
                for (coeff, extra_neg) in [(fa_even, false), (fa_odd, mb.is_odd())] {
                    if coeff.is_zero() {
                        continue;
                    }
                    let mut prod = coeff.mul(fb);
                    if neg_m ^ extra_neg {
                        prod = prod.neg();
                    }
                    out.add_term(m.clone(), prod);
                }
            }
        }
        out
    }

    /// Exterior derivative: `d(m . f) = (-1)^{|m|} sum_a (m dx_a) . D_a f`.
    pub fn exterior_d(&self) -> FormElem {
        let mut out = FormElem::zero(self.dims);
        for (m, f) in &self.terms {
            for v in self.dims.vars() {
                let df = f.partial(v);
                if df.is_zero() {
                    continue;
                }
                if let Some((m2, neg)) = m.mul_dx_right(v) {
                    let mut term = df;
                    if neg ^ m.is_odd() {
                        term = term.neg();
                    }
                    out.add_term(m2, term);
                }
            }
        }
        out
    }

    /// Contraction of a 1-form against a polyfield, extending the base
    /// pairing `<dx_a, P_b> = (-1)^{(|x_a|+1)(|x_b|+1)} delta_ab` as a
    /// superderivation.
    pub fn contract_one(&self, tau: &PolyElem) -> Result<PolyElem, FormError> {
        let mut out = PolyElem::zero(self.dims);
        for (m, g) in &self.terms {
            if m.form_degree() != 1 {
                return Err(FormError::DegreeMismatch(m.form_degree()));
            }
            let v = if m.dz != 0 {
                Var::Z(coord::set_iter(m.dz).next().unwrap())
            } else {
                Var::Theta(m.dth.iter().position(|&e| e == 1).unwrap())
            };
            for (im, f) in &tau.terms {
                let Some((im2, c)) = contract_monomial(v, im) else {
                    continue;
                };
                // <dx_a g, f I> = <dx_a, (g f) I> = (-1)^{|dx_a||g f|} (g f) <dx_a, I>
                let gf = g.mul(f);
                let (even, odd) = gf.parity_parts();
                let dx_odd = !v.is_odd();
                for (coeff, neg) in [(even, false), (odd, dx_odd)] {
                    if coeff.is_zero() {
                        continue;
                    }
                    let mut c2 = coeff.scale(&c);
                    if neg {
                        c2 = c2.neg();
                    }
                    out.add_term(im2.clone(), c2);
                }
            }
        }
        Ok(out)
    }
}

/// Pairing of `dx_v` against a polyfield monomial, with the sign
/// `(-1)^{(|x_a|+1)(|x_b|+1)}` of the base contraction.
pub fn contract_monomial(v: Var, im: &PolyMonomial) -> Option<(PolyMonomial, Scalar)> {
    match v {
        Var::Theta(a) => {
            if im.pth[a] == 0 {
                return None;
            }
            let mut m = im.clone();
            m.pth[a] -= 1;
            Some((m, scalar::int(im.pth[a] as i64)))
        }
        Var::Z(i) => {
            let (pz, neg) = coord::remove_from_left(im.pz, i)?;
            // base pairing <dz, Pz> = -1, and dz passes only even Pth factors
            let mut c = scalar::int(-1);
            scalar::negate_if(&mut c, neg);
            Some((
                PolyMonomial {
                    pth: im.pth.clone(),
                    pz,
                },
                c,
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyfields::PolyElem;
    use crate::scalar::int;

    fn d22() -> Dims {
        Dims::new(2, 2)
    }

    fn d11() -> Dims {
        Dims::new(1, 1)
    }

    #[test]
    fn generator_products() {
        let d = d22();
        let dz1 = FormElem::gen(d, Var::Z(0));
        let dz2 = FormElem::gen(d, Var::Z(1));
        let dth1 = FormElem::gen(d, Var::Theta(0));
        assert_eq!(dz2.mul(&dz1), dz1.mul(&dz2).neg());
        assert!(dz1.mul(&dz1).is_zero());
        assert!(!dth1.mul(&dth1).is_zero());
    }

    #[test]
    fn exterior_d_examples() {
        let d = d11();
        let z = SuperPoly::var(d, Var::Z(0));
        let th = SuperPoly::var(d, Var::Theta(0));
        assert_eq!(
            FormElem::from_poly(&z).exterior_d(),
            FormElem::gen(d, Var::Z(0))
        );
        // d(z th) = dz th + dth z
        let mut expect = FormElem::zero(d);
        expect.add_term(FormMonomial::gen(d, Var::Z(0)), th.clone());
        expect.add_term(FormMonomial::gen(d, Var::Theta(0)), z.clone());
        assert_eq!(FormElem::from_poly(&z.mul(&th)).exterior_d(), expect);
        // d(dth . z) = dth dz
        let mut start = FormElem::zero(d);
        start.add_term(FormMonomial::gen(d, Var::Theta(0)), z);
        let mut expect = FormElem::zero(d);
        let (m, neg) = FormMonomial::gen(d, Var::Theta(0))
            .mul(&FormMonomial::gen(d, Var::Z(0)))
            .unwrap();
        assert!(!neg);
        expect.add_term(m, SuperPoly::one(d));
        assert_eq!(start.exterior_d(), expect);
    }

    #[test]
    fn d_squared_zero_small_window() {
        let d = d22();
        // all monomials of form degree <= 3 with coefficient degree <= 3
        let mut count = 0;
        for m in enumerate_monomials(d, 3) {
            for fm in crate::superpoly::enumerate_monomials(d, 3) {
                let mut e = FormElem::zero(d);
                e.add_term(m.clone(), SuperPoly::monomial(d, fm, int(1)));
                assert!(e.exterior_d().exterior_d().is_zero());
                count += 1;
            }
        }
        assert!(count > 1000);
    }

    #[test]
    fn base_pairing_signs() {
        let d = d11();
        let dz = FormElem::gen(d, Var::Z(0));
        let dth = FormElem::gen(d, Var::Theta(0));
        let pz = PolyElem::gen(d, Var::Z(0));
        let pth = PolyElem::gen(d, Var::Theta(0));
        assert_eq!(
            dz.contract_one(&pz).unwrap(),
            PolyElem::from_poly(&SuperPoly::one(d)).neg()
        );
        assert_eq!(
            dth.contract_one(&pth).unwrap(),
            PolyElem::from_poly(&SuperPoly::one(d))
        );
        assert!(dz.contract_one(&pth).unwrap().is_zero());
        // <df, pi X> = (-1)^{(|X|+1)(|f|+1)} X(f) for f = z, X = Dz
        let f = SuperPoly::var(d, Var::Z(0));
        let df = FormElem::from_poly(&f).exterior_d();
        assert_eq!(
            df.contract_one(&pz).unwrap(),
            PolyElem::from_poly(&SuperPoly::one(d)).neg()
        );
    }
}
