//! The Weyl superalgebra of linear differential operators on `K^{p|q}`.
//!
//! Operators are stored in normal order: all coordinate factors to the left
//! of all derivative factors, with the relations `[D_a, x_b] = delta_ab`
//! (supercommutators) folded in at normalization time. The co-normal basis,
//! with every derivative left of every coordinate, is available as a derived
//! view used by the de Rham homotopy operator.

use std::collections::BTreeMap;

use num::Zero;

use crate::coord::{self, Dims, OddSet, Var};
use crate::scalar::{self, Scalar};
use crate::superpoly::{SuperMonomial, SuperPoly};

/// A derivative monomial `Dz^e Dth_T`, theta-derivatives ascending.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DerMonomial {
    pub dz: Vec<u8>,
    pub dth: OddSet,
}

impl DerMonomial {
    pub fn unit(dims: Dims) -> Self {
        DerMonomial {
            dz: vec![0; dims.p],
            dth: 0,
        }
    }

    pub fn var(dims: Dims, v: Var) -> Self {
        let mut d = Self::unit(dims);
        match v {
            Var::Z(i) => d.dz[i] = 1,
            Var::Theta(a) => d.dth = 1 << a,
        }
        d
    }

    pub fn is_unit(&self) -> bool {
        self.dth == 0 && self.dz.iter().all(|&e| e == 0)
    }

    pub fn is_odd(&self) -> bool {
        coord::set_len(self.dth) % 2 == 1
    }

    /// Filtration degree: total number of derivative factors.
    pub fn degree(&self) -> u32 {
        self.dz.iter().map(|&e| e as u32).sum::<u32>() + coord::set_len(self.dth)
    }

    /// Count of even-generator factors (`Dz`).
    pub fn even_gen_degree(&self) -> u32 {
        self.dz.iter().map(|&e| e as u32).sum()
    }

    /// Count of odd-generator factors (`Dth`).
    pub fn odd_gen_degree(&self) -> u32 {
        coord::set_len(self.dth)
    }

    /// Word of single-derivative factors, left to right.
    pub fn factors(&self) -> Vec<Var> {
        let mut out = Vec::new();
        for (i, &e) in self.dz.iter().enumerate() {
            for _ in 0..e {
                out.push(Var::Z(i));
            }
        }
        out.extend(coord::set_iter(self.dth).map(Var::Theta));
        out
    }
}

pub type WeylKey = (SuperMonomial, DerMonomial);

/// Normal-ordered element of the Weyl superalgebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylOp {
    pub dims: Dims,
    pub terms: BTreeMap<WeylKey, Scalar>,
}

impl WeylOp {
    pub fn zero(dims: Dims) -> Self {
        WeylOp {
            dims,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(dims: Dims) -> Self {
        let mut op = Self::zero(dims);
        op.add_term(
            SuperMonomial::unit(dims),
            DerMonomial::unit(dims),
            scalar::one(),
        );
        op
    }

    pub fn from_poly(f: &SuperPoly) -> Self {
        let mut op = Self::zero(f.dims);
        for (m, c) in &f.terms {
            op.add_term(m.clone(), DerMonomial::unit(f.dims), c.clone());
        }
        op
    }

    pub fn derivative(dims: Dims, v: Var) -> Self {
        let mut op = Self::zero(dims);
        op.add_term(
            SuperMonomial::unit(dims),
            DerMonomial::var(dims, v),
            scalar::one(),
        );
        op
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, xm: SuperMonomial, dm: DerMonomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((xm, dm)).or_insert_with(scalar::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &WeylOp) -> WeylOp {
        assert_eq!(self.dims, other.dims);
        let mut out = self.clone();
        for ((xm, dm), c) in &other.terms {
            out.add_term(xm.clone(), dm.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &WeylOp) -> WeylOp {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> WeylOp {
        let mut out = WeylOp::zero(self.dims);
        for ((xm, dm), c) in &self.terms {
            out.add_term(xm.clone(), dm.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> WeylOp {
        let mut out = WeylOp::zero(self.dims);
        for ((xm, dm), v) in &self.terms {
            out.add_term(xm.clone(), dm.clone(), v * c);
        }
        out
    }

    /// Parity when homogeneous.
    pub fn parity(&self) -> Option<bool> {
        let mut it = self.terms.keys().map(|(xm, dm)| xm.is_odd() ^ dm.is_odd());
        let first = it.next()?;
        it.all(|p| p == first).then_some(first)
    }

    pub fn parity_parts(&self) -> (WeylOp, WeylOp) {
        let mut even = WeylOp::zero(self.dims);
        let mut odd = WeylOp::zero(self.dims);
        for ((xm, dm), c) in &self.terms {
            let target = if xm.is_odd() ^ dm.is_odd() {
                &mut odd
            } else {
                &mut even
            };
            target.add_term(xm.clone(), dm.clone(), c.clone());
        }
        (even, odd)
    }

    /// Max derivative count over the terms.
    pub fn filtration_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|(_, dm)| dm.degree())
            .max()
            .unwrap_or(0)
    }

    /// Left multiplication by the coordinate `v`.
    pub fn left_mul_var(&self, v: Var) -> WeylOp {
        let mut out = WeylOp::zero(self.dims);
        for ((xm, dm), c) in &self.terms {
            match v {
                Var::Z(i) => {
                    let mut xm2 = xm.clone();
                    xm2.z[i] += 1;
                    out.add_term(xm2, dm.clone(), c.clone());
                }
                Var::Theta(a) => {
                    if let Some((theta, neg)) = coord::insert_from_left(xm.theta, a) {
                        let mut c2 = c.clone();
                        scalar::negate_if(&mut c2, neg);
                        out.add_term(
                            SuperMonomial {
                                z: xm.z.clone(),
                                theta,
                            },
                            dm.clone(),
                            c2,
                        );
                    }
                }
            }
        }
        out
    }

    /// Left multiplication by the polynomial `f`.
    pub fn left_mul_poly(&self, f: &SuperPoly) -> WeylOp {
        let mut out = WeylOp::zero(self.dims);
        for (fm, fc) in &f.terms {
            for ((xm, dm), c) in &self.terms {
                if let Some((m, neg)) = fm.mul(xm) {
                    let mut c2 = fc * c;
                    scalar::negate_if(&mut c2, neg);
                    out.add_term(m, dm.clone(), c2);
                }
            }
        }
        out
    }

    /// Left multiplication by the derivative `D_v`, re-normal-ordered via
    /// `D_a x^M = (D_a x^M) + (-1)^{|a||x^M|} x^M D_a`.
    pub fn left_mul_der(&self, v: Var) -> WeylOp {
        let mut out = WeylOp::zero(self.dims);
        for ((xm, dm), c) in &self.terms {
            // derivative hits the coordinate part
            match v {
                Var::Z(i) => {
                    if xm.z[i] > 0 {
                        let mut xm2 = xm.clone();
                        xm2.z[i] -= 1;
                        out.add_term(xm2, dm.clone(), c * scalar::int(xm.z[i] as i64));
                    }
                }
                Var::Theta(a) => {
                    if let Some((theta, neg)) = coord::remove_from_left(xm.theta, a) {
                        let mut c2 = c.clone();
                        scalar::negate_if(&mut c2, neg);
                        out.add_term(
                            SuperMonomial {
                                z: xm.z.clone(),
                                theta,
                            },
                            dm.clone(),
                            c2,
                        );
                    }
                }
            }
            // derivative passes the coordinate part
            let pass_neg = v.is_odd() && xm.is_odd();
            match v {
                Var::Z(i) => {
                    let mut dm2 = dm.clone();
                    dm2.dz[i] += 1;
                    let mut c2 = c.clone();
                    scalar::negate_if(&mut c2, pass_neg);
                    out.add_term(xm.clone(), dm2, c2);
                }
                Var::Theta(a) => {
                    if let Some((dth, neg)) = coord::insert_from_left(dm.dth, a) {
                        let mut c2 = c.clone();
                        scalar::negate_if(&mut c2, pass_neg ^ neg);
                        out.add_term(
                            xm.clone(),
                            DerMonomial {
                                dz: dm.dz.clone(),
                                dth,
                            },
                            c2,
                        );
                    }
                }
            }
        }
        out
    }

    /// Associative product in normal form.
    pub fn compose(&self, other: &WeylOp) -> WeylOp {
        assert_eq!(self.dims, other.dims);
        let mut out = WeylOp::zero(self.dims);
        for ((xm, dm), c) in &self.terms {
            let mut w = other.clone();
            let mut factors = dm.factors();
            factors.reverse();
            for v in factors {
                w = w.left_mul_der(v);
            }
            w = w.left_mul_poly(&SuperPoly::monomial(self.dims, xm.clone(), c.clone()));
            out = out.add(&w);
        }
        out
    }

    /// Action on a polynomial.
    pub fn apply_to(&self, f: &SuperPoly) -> SuperPoly {
        assert_eq!(self.dims, f.dims);
        let mut out = SuperPoly::zero(self.dims);
        for ((xm, dm), c) in &self.terms {
            let mut g = f.clone();
            let mut factors = dm.factors();
            factors.reverse();
            for v in factors {
                g = g.partial(v);
            }
            let front = SuperPoly::monomial(self.dims, xm.clone(), c.clone());
            out = out.add(&front.mul(&g));
        }
        out
    }

    /// `AB - (-1)^{|A||B|} BA` for parity-homogeneous arguments.
    pub fn super_commutator(&self, other: &WeylOp) -> WeylOp {
        if self.is_zero() || other.is_zero() {
            return WeylOp::zero(self.dims);
        }
        let pa = self.parity().expect("commutator needs homogeneous left arg");
        let pb = other
            .parity()
            .expect("commutator needs homogeneous right arg");
        let ab = self.compose(other);
        let ba = other.compose(self);
        if pa && pb {
            ab.add(&ba)
        } else {
            ab.sub(&ba)
        }
    }

    /// Re-expression on the co-normal basis (derivatives left of functions).
    pub fn co_normal(&self) -> CoWeylOp {
        let mut out = CoWeylOp::zero(self.dims);
        for ((xm, dm), c) in &self.terms {
            let mut w = CoWeylOp::from_monomial(self.dims, xm.clone(), c.clone());
            for v in dm.factors() {
                w = w.right_mul_der(v);
            }
            out = out.add(&w);
        }
        out
    }

    /// Top filtration part as a map, for symbol computations.
    pub fn top_symbol(&self) -> BTreeMap<WeylKey, Scalar> {
        let top = self.filtration_degree();
        self.terms
            .iter()
            .filter(|((_, dm), _)| dm.degree() == top)
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }
}

/// Element written on the basis `D^J x^M` (all derivatives to the left).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoWeylOp {
    pub dims: Dims,
    pub terms: BTreeMap<(DerMonomial, SuperMonomial), Scalar>,
}

impl CoWeylOp {
    pub fn zero(dims: Dims) -> Self {
        CoWeylOp {
            dims,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_monomial(dims: Dims, xm: SuperMonomial, c: Scalar) -> Self {
        let mut w = Self::zero(dims);
        w.add_term(DerMonomial::unit(dims), xm, c);
        w
    }

    pub fn add_term(&mut self, dm: DerMonomial, xm: SuperMonomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((dm, xm)).or_insert_with(scalar::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &CoWeylOp) -> CoWeylOp {
        let mut out = self.clone();
        for ((dm, xm), c) in &other.terms {
            out.add_term(dm.clone(), xm.clone(), c.clone());
        }
        out
    }

    /// Right multiplication by `D_v`, using
    /// `x^M D_a = (-1)^{|a||x^M|} (D_a x^M - (D_a x^M))`.
    pub fn right_mul_der(&self, v: Var) -> CoWeylOp {
        let mut out = CoWeylOp::zero(self.dims);
        for ((dm, xm), c) in &self.terms {
            let pass_neg = v.is_odd() && xm.is_odd();
            // derivative joins the derivative word from the right
            match v {
                Var::Z(i) => {
                    let mut dm2 = dm.clone();
                    dm2.dz[i] += 1;
                    let mut c2 = c.clone();
                    scalar::negate_if(&mut c2, pass_neg);
                    out.add_term(dm2, xm.clone(), c2);
                }
                Var::Theta(a) => {
                    if let Some((dth, neg)) = coord::insert_from_right(dm.dth, a) {
                        let mut c2 = c.clone();
                        scalar::negate_if(&mut c2, pass_neg ^ neg);
                        out.add_term(
                            DerMonomial {
                                dz: dm.dz.clone(),
                                dth,
                            },
                            xm.clone(),
                            c2,
                        );
                    }
                }
            }
            // derivative consumed by the coordinate part
            let poly = SuperPoly::monomial(self.dims, xm.clone(), c.clone()).partial(v);
            for (m2, c2) in poly.terms {
                let mut c3 = c2;
                scalar::negate_if(&mut c3, pass_neg ^ true);
                out.add_term(dm.clone(), m2, c3);
            }
        }
        out
    }

    /// Round-trip back to normal order.
    pub fn to_normal(&self) -> WeylOp {
        let mut out = WeylOp::zero(self.dims);
        for ((dm, xm), c) in &self.terms {
            let mut w = WeylOp::from_poly(&SuperPoly::monomial(self.dims, xm.clone(), c.clone()));
            let mut factors = dm.factors();
            factors.reverse();
            for v in factors {
                w = w.left_mul_der(v);
            }
            out = out.add(&w);
        }
        out
    }
}

/// `[D^J, x_a]` as a scaled derivative monomial, or zero.
pub fn der_commutator_with_var(dm: &DerMonomial, v: Var) -> Option<(DerMonomial, Scalar)> {
    match v {
        Var::Z(i) => {
            if dm.dz[i] == 0 {
                return None;
            }
            let mut dm2 = dm.clone();
            dm2.dz[i] -= 1;
            Some((dm2, scalar::int(dm.dz[i] as i64)))
        }
        Var::Theta(a) => {
            let (dth, neg) = coord::remove_from_right(dm.dth, a)?;
            let mut c = scalar::one();
            scalar::negate_if(&mut c, neg);
            Some((
                DerMonomial {
                    dz: dm.dz.clone(),
                    dth,
                },
                c,
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn d11() -> Dims {
        Dims::new(1, 1)
    }

    fn dz(d: Dims) -> WeylOp {
        WeylOp::derivative(d, Var::Z(0))
    }

    fn dth(d: Dims) -> WeylOp {
        WeylOp::derivative(d, Var::Theta(0))
    }

    fn zop(d: Dims) -> WeylOp {
        WeylOp::from_poly(&SuperPoly::var(d, Var::Z(0)))
    }

    fn thop(d: Dims) -> WeylOp {
        WeylOp::from_poly(&SuperPoly::var(d, Var::Theta(0)))
    }

    #[test]
    fn dz_z_relation() {
        let d = d11();
        let zdz = zop(d).compose(&dz(d));
        assert_eq!(dz(d).compose(&zop(d)), zdz.add(&WeylOp::one(d)));
    }

    #[test]
    fn dth_th_relation() {
        let d = d11();
        let expect = WeylOp::one(d).sub(&thop(d).compose(&dth(d)));
        assert_eq!(dth(d).compose(&thop(d)), expect);
    }

    #[test]
    fn euler_operator_square() {
        // (z Dz)^2 = z^2 Dz^2 + z Dz, checked against the action on powers of z.
        let d = d11();
        let euler = zop(d).compose(&dz(d));
        let sq = euler.compose(&euler);
        let z = SuperPoly::var(d, Var::Z(0));
        let mut zn = SuperPoly::one(d);
        for n in 0..=5i64 {
            assert_eq!(sq.apply_to(&zn), zn.scale(&int(n * n)));
            assert_eq!(
                sq.apply_to(&zn),
                euler.apply_to(&euler.apply_to(&zn)),
                "action is multiplicative at n={n}"
            );
            zn = zn.mul(&z);
        }
    }

    #[test]
    fn apply_matches_iterated_partials() {
        let d = d11();
        let op = dz(d).compose(&dth(d));
        let f = SuperPoly::var(d, Var::Z(0)).mul(&SuperPoly::var(d, Var::Theta(0)));
        assert_eq!(op.apply_to(&f), SuperPoly::one(d));
        assert_eq!(f.partial(Var::Theta(0)).partial(Var::Z(0)), SuperPoly::one(d));
    }

    #[test]
    fn commutator_examples() {
        let d = d11();
        assert_eq!(dz(d).super_commutator(&zop(d)), WeylOp::one(d));
        assert_eq!(dth(d).super_commutator(&thop(d)), WeylOp::one(d));
        let euler = zop(d).compose(&dz(d));
        assert_eq!(euler.super_commutator(&dz(d)), dz(d).neg());
    }

    #[test]
    fn co_normal_examples() {
        let d = d11();
        // z Dz + 1 = Dz z
        let e = zop(d).compose(&dz(d)).add(&WeylOp::one(d));
        let co = e.co_normal();
        assert_eq!(co.terms.len(), 1);
        let ((dm, xm), c) = co.terms.iter().next().unwrap();
        assert_eq!(dm.dz[0], 1);
        assert_eq!(xm.z[0], 1);
        assert_eq!(*c, int(1));
        // pure derivatives are fixed
        assert_eq!(dth(d).co_normal().to_normal(), dth(d));
        // th Dth = 1 - Dth th
        let e = thop(d).compose(&dth(d));
        let co = e.co_normal();
        let mut expect = CoWeylOp::from_monomial(d, SuperMonomial::unit(d), int(1));
        expect.add_term(
            DerMonomial::var(d, Var::Theta(0)),
            SuperMonomial::var(d, Var::Theta(0)),
            int(-1),
        );
        assert_eq!(co, expect);
        assert_eq!(co.to_normal(), e);
    }

    #[test]
    fn filtration_subadditive() {
        let d = d11();
        let a = zop(d).compose(&dz(d)).add(&dth(d));
        let b = dz(d).compose(&dz(d));
        let ab = a.compose(&b);
        assert!(ab.filtration_degree() <= a.filtration_degree() + b.filtration_degree());
    }

    #[test]
    fn der_commutator_signs() {
        let d2 = Dims::new(1, 2);
        let mut dm = DerMonomial::unit(d2);
        dm.dth = 0b11;
        // [Dth1 Dth2, th1] = -Dth2, [Dth1 Dth2, th2] = Dth1
        let (m, c) = der_commutator_with_var(&dm, Var::Theta(0)).unwrap();
        assert_eq!((m.dth, c), (0b10, int(-1)));
        let (m, c) = der_commutator_with_var(&dm, Var::Theta(1)).unwrap();
        assert_eq!((m.dth, c), (0b01, int(1)));
        let mut dm = DerMonomial::unit(d2);
        dm.dz[0] = 2;
        let (m, c) = der_commutator_with_var(&dm, Var::Z(0)).unwrap();
        assert_eq!((m.dz[0], c), (1, int(2)));
    }
}
