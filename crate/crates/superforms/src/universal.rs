//! The universal de Rham complex `(Omega (x) D, D)` and the universal
//! Spencer complex `(D (x) Omega^*, delta)`, with their homotopy operators
//! and eigenvalue bookkeeping.
//!
//! Canonical storage keeps all functions inside the Weyl slot. The de Rham
//! homotopy `H` is stated on the co-normal Weyl basis `D^J x^M`, so a
//! co-normal representation of the same elements is provided alongside, with
//! exact round-trip conversions.

use std::collections::BTreeMap;

use num::Zero;

use crate::coord::{self, Dims, Var};
use crate::forms::{FormElem, FormMonomial};
use crate::polyfields::{self, PolyElem, PolyMonomial};
use crate::scalar::{self, Scalar};
use crate::superpoly::{SuperMonomial, SuperPoly};
use crate::weyl::{der_commutator_with_var, CoWeylOp, DerMonomial, WeylOp};

/// Element of the universal de Rham sheaf in canonical form: unit form
/// coefficients, all functions absorbed into the normal-ordered Weyl slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UdrElem {
    pub dims: Dims,
    pub terms: BTreeMap<(FormMonomial, SuperMonomial, DerMonomial), Scalar>,
}

impl UdrElem {
    pub fn zero(dims: Dims) -> Self {
        UdrElem {
            dims,
            terms: BTreeMap::new(),
        }
    }

    pub fn add_term(
        &mut self,
        f: FormMonomial,
        xm: SuperMonomial,
        dm: DerMonomial,
        c: Scalar,
    ) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((f, xm, dm)).or_insert_with(scalar::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &UdrElem) -> UdrElem {
        let mut out = self.clone();
        for ((f, xm, dm), c) in &other.terms {
            out.add_term(f.clone(), xm.clone(), dm.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &UdrElem) -> UdrElem {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> UdrElem {
        let mut out = UdrElem::zero(self.dims);
        for ((f, xm, dm), c) in &self.terms {
            out.add_term(f.clone(), xm.clone(), dm.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> UdrElem {
        let mut out = UdrElem::zero(self.dims);
        for ((f, xm, dm), v) in &self.terms {
            out.add_term(f.clone(), xm.clone(), dm.clone(), v * c);
        }
        out
    }

    /// Canonicalizes a sum of `omega (x) F` pairs, moving every form
    /// coefficient into the Weyl slot from the left.
    pub fn normalize(dims: Dims, pairs: &[(FormElem, WeylOp)]) -> UdrElem {
        let mut out = UdrElem::zero(dims);
        for (omega, op) in pairs {
            for (fm, coeff) in &omega.terms {
                let shifted = op.left_mul_poly(coeff);
                for ((xm, dm), c) in &shifted.terms {
                    out.add_term(fm.clone(), xm.clone(), dm.clone(), c.clone());
                }
            }
        }
        out
    }

    /// `D(omega (x) F) = sum_a (-1)^{|omega||x_a|} dx_a omega (x) D_a F`
    /// (the `d omega` part vanishes on unit-coefficient monomials).
    pub fn big_d(&self) -> UdrElem {
        let mut out = UdrElem::zero(self.dims);
        for ((fm, xm, dm), c) in &self.terms {
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
                    out.add_term(fm2.clone(), xm2.clone(), dm2.clone(), c3);
                }
            }
        }
        out
    }

    /// Re-expresses every Weyl slot on the co-normal basis.
    pub fn to_co(&self) -> UdrCoElem {
        let mut out = UdrCoElem::zero(self.dims);
        for ((fm, xm, dm), c) in &self.terms {
            let mut single = WeylOp::zero(self.dims);
            single.add_term(xm.clone(), dm.clone(), c.clone());
            for ((j, m), c2) in &single.co_normal().terms {
                out.add_term(fm.clone(), j.clone(), m.clone(), c2.clone());
            }
        }
        out
    }
}

/// The same elements with the Weyl slot written as `D^J x^M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UdrCoElem {
    pub dims: Dims,
    pub terms: BTreeMap<(FormMonomial, DerMonomial, SuperMonomial), Scalar>,
}

impl UdrCoElem {
    pub fn zero(dims: Dims) -> Self {
        UdrCoElem {
            dims,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(
        dims: Dims,
        f: FormMonomial,
        j: DerMonomial,
        xm: SuperMonomial,
    ) -> Self {
        let mut e = Self::zero(dims);
        e.add_term(f, j, xm, scalar::one());
        e
    }

    pub fn add_term(&mut self, f: FormMonomial, j: DerMonomial, xm: SuperMonomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((f, j, xm)).or_insert_with(scalar::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &UdrCoElem) -> UdrCoElem {
        let mut out = self.clone();
        for ((f, j, xm), c) in &other.terms {
            out.add_term(f.clone(), j.clone(), xm.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &UdrCoElem) -> UdrCoElem {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> UdrCoElem {
        let mut out = UdrCoElem::zero(self.dims);
        for ((f, j, xm), c) in &self.terms {
            out.add_term(f.clone(), j.clone(), xm.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> UdrCoElem {
        let mut out = UdrCoElem::zero(self.dims);
        for ((f, j, xm), v) in &self.terms {
            out.add_term(f.clone(), j.clone(), xm.clone(), v * c);
        }
        out
    }

    /// `D` in the co-normal presentation: left-composing with `D_a` only
    /// extends the derivative word.
    pub fn big_d(&self) -> UdrCoElem {
        let mut out = UdrCoElem::zero(self.dims);
        for ((fm, j, xm), c) in &self.terms {
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
                out.add_term(fm2, j2, xm.clone(), c2);
            }
        }
        out
    }

    /// The de Rham homotopy
    /// `H(omega (x) D^J f) = sum_a (-1)^{|x_a|(|omega|+|D^J|+1)}
    /// (d/d dx_a) omega (x) [D^J, x_a] f`.
    pub fn homotopy_h(&self) -> UdrCoElem {
        let mut out = UdrCoElem::zero(self.dims);
        for ((fm, j, xm), c) in &self.terms {
            for v in self.dims.vars() {
                let Some((fm2, cf)) = fm.partial_dx(v) else {
                    continue;
                };
                let Some((j2, cj)) = der_commutator_with_var(j, v) else {
                    continue;
                };
                let neg = v.is_odd() && !(fm.is_odd() ^ j.is_odd());
                let mut c2 = c * cf * cj;
                scalar::negate_if(&mut c2, neg);
                out.add_term(fm2.clone(), j2, xm.clone(), c2);
            }
        }
        out
    }

    /// Round-trip back to canonical normal order.
    pub fn to_canonical(&self) -> UdrElem {
        let mut out = UdrElem::zero(self.dims);
        for ((fm, j, xm), c) in &self.terms {
            let mut co = CoWeylOp::zero(self.dims);
            co.add_term(j.clone(), xm.clone(), c.clone());
            for ((xm2, dm2), c2) in &co.to_normal().terms {
                out.add_term(fm.clone(), xm2.clone(), dm2.clone(), c2.clone());
            }
        }
        out
    }

    /// Groups terms by the homotopy eigenvalue of their `(omega, D^J)` part.
    pub fn eigen_split(&self) -> BTreeMap<i64, UdrCoElem> {
        let mut out: BTreeMap<i64, UdrCoElem> = BTreeMap::new();
        for ((fm, j, xm), c) in &self.terms {
            out.entry(eigenvalue_c(self.dims, fm, j))
                .or_insert_with(|| UdrCoElem::zero(self.dims))
                .add_term(fm.clone(), j.clone(), xm.clone(), c.clone());
        }
        out
    }
}

/// `c = p + q + deg0(omega) + deg0(D^J) - deg1(omega) - deg1(D^J)`.
pub fn eigenvalue_c(dims: Dims, omega: &FormMonomial, j: &DerMonomial) -> i64 {
    (dims.p + dims.q) as i64 + omega.even_gen_degree() as i64 + j.even_gen_degree() as i64
        - omega.odd_gen_degree() as i64
        - j.odd_gen_degree() as i64
}

/// Whether `(omega, D^J)` sits in the kernel locus of the homotopy
/// eigenvalue: no even generators on either side, all `dz` and all `Dth`
/// present.
pub fn in_c_kernel_locus(dims: Dims, omega: &FormMonomial, j: &DerMonomial) -> bool {
    omega.even_gen_degree() == 0
        && j.even_gen_degree() == 0
        && omega.odd_gen_degree() == dims.p as u32
        && j.odd_gen_degree() == dims.q as u32
}

/// Element of the universal de Rham sheaf over the plain tensor product
/// (no balancing), used to exercise `D = D_1 + D_2` as separate operators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeUdr {
    pub dims: Dims,
    pub terms: BTreeMap<(FormMonomial, SuperMonomial, SuperMonomial, DerMonomial), Scalar>,
}

impl FreeUdr {
    pub fn zero(dims: Dims) -> Self {
        FreeUdr {
            dims,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_pairs(dims: Dims, pairs: &[(FormElem, WeylOp)]) -> FreeUdr {
        let mut out = Self::zero(dims);
        for (omega, op) in pairs {
            for (fm, coeff) in &omega.terms {
                for (cm, cc) in &coeff.terms {
                    for ((xm, dm), c) in &op.terms {
                        out.add_term(
                            fm.clone(),
                            cm.clone(),
                            xm.clone(),
                            dm.clone(),
                            cc * c,
                        );
                    }
                }
            }
        }
        out
    }

    pub fn add_term(
        &mut self,
        f: FormMonomial,
        fc: SuperMonomial,
        xm: SuperMonomial,
        dm: DerMonomial,
        c: Scalar,
    ) {
        if c.is_zero() {
            return;
        }
        let entry = self
            .terms
            .entry((f, fc, xm, dm))
            .or_insert_with(scalar::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &FreeUdr) -> FreeUdr {
        let mut out = self.clone();
        for ((f, fc, xm, dm), c) in &other.terms {
            out.add_term(f.clone(), fc.clone(), xm.clone(), dm.clone(), c.clone());
        }
        out
    }

    /// `D_1 = d (x) 1`: exterior derivative of the form side.
    pub fn d1(&self) -> FreeUdr {
        let mut out = FreeUdr::zero(self.dims);
        for ((fm, fc, xm, dm), c) in &self.terms {
            let mut omega = FormElem::zero(self.dims);
            omega.add_term(
                fm.clone(),
                SuperPoly::monomial(self.dims, fc.clone(), c.clone()),
            );
            for (fm2, coeff) in &omega.exterior_d().terms {
                for (cm2, c2) in &coeff.terms {
                    out.add_term(fm2.clone(), cm2.clone(), xm.clone(), dm.clone(), c2.clone());
                }
            }
        }
        out
    }

    /// `D_2 = sum_a dx_a (x) D_a` with the sign of the form-side parity.
    pub fn d2(&self) -> FreeUdr {
        let mut out = FreeUdr::zero(self.dims);
        for ((fm, fc, xm, dm), c) in &self.terms {
            let omega_parity = fm.is_odd() ^ fc.is_odd();
            let mut single = WeylOp::zero(self.dims);
            single.add_term(xm.clone(), dm.clone(), c.clone());
            for v in self.dims.vars() {
                // dx_a multiplies the form monomial from the left; the
                // coefficient stays to its right.
                let Some((fm2, neg)) = fm.mul_dx_left(v) else {
                    continue;
                };
                let moved = single.left_mul_der(v);
                let flip = neg ^ (omega_parity && v.is_odd());
                for ((xm2, dm2), c2) in &moved.terms {
                    let mut c3 = c2.clone();
                    scalar::negate_if(&mut c3, flip);
                    out.add_term(fm2.clone(), fc.clone(), xm2.clone(), dm2.clone(), c3);
                }
            }
        }
        out
    }

    /// Image in the balanced module: form coefficients absorbed left into
    /// the Weyl slot.
    pub fn canonical(&self) -> UdrElem {
        let mut out = UdrElem::zero(self.dims);
        for ((fm, fc, xm, dm), c) in &self.terms {
            let mut single = WeylOp::zero(self.dims);
            single.add_term(xm.clone(), dm.clone(), c.clone());
            let moved =
                single.left_mul_poly(&SuperPoly::monomial(self.dims, fc.clone(), scalar::one()));
            for ((xm2, dm2), c2) in &moved.terms {
                out.add_term(fm.clone(), xm2.clone(), dm2.clone(), c2.clone());
            }
        }
        out
    }
}

/// Element of the universal Spencer sheaf in canonical form: Weyl slot
/// normal-ordered and carrying all functions, polyfield monomials with unit
/// coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpencerElem {
    pub dims: Dims,
    pub terms: BTreeMap<(SuperMonomial, DerMonomial, PolyMonomial), Scalar>,
}

impl SpencerElem {
    pub fn zero(dims: Dims) -> Self {
        SpencerElem {
            dims,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(dims: Dims, xm: SuperMonomial, dm: DerMonomial, pm: PolyMonomial) -> Self {
        let mut e = Self::zero(dims);
        e.add_term(xm, dm, pm, scalar::one());
        e
    }

    pub fn add_term(&mut self, xm: SuperMonomial, dm: DerMonomial, pm: PolyMonomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((xm, dm, pm)).or_insert_with(scalar::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &SpencerElem) -> SpencerElem {
        let mut out = self.clone();
        for ((xm, dm, pm), c) in &other.terms {
            out.add_term(xm.clone(), dm.clone(), pm.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &SpencerElem) -> SpencerElem {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> SpencerElem {
        let mut out = SpencerElem::zero(self.dims);
        for ((xm, dm, pm), c) in &self.terms {
            out.add_term(xm.clone(), dm.clone(), pm.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> SpencerElem {
        let mut out = SpencerElem::zero(self.dims);
        for ((xm, dm, pm), v) in &self.terms {
            out.add_term(xm.clone(), dm.clone(), pm.clone(), v * c);
        }
        out
    }

    /// Canonicalizes a sum of `F (x) tau` pairs, moving every polyfield
    /// coefficient into the Weyl slot from the right.
    pub fn normalize(dims: Dims, pairs: &[(WeylOp, PolyElem)]) -> SpencerElem {
        let mut out = SpencerElem::zero(dims);
        for (op, tau) in pairs {
            for (pm, coeff) in &tau.terms {
                let shifted = op.compose(&WeylOp::from_poly(coeff));
                for ((xm, dm), c) in &shifted.terms {
                    out.add_term(xm.clone(), dm.clone(), pm.clone(), c.clone());
                }
            }
        }
        out
    }

    /// `delta(F (x) P^I) = (-1)^{|P^I|} sum_a F D_a (x) <dx_a, P^I>`;
    /// the `e_x` summand vanishes on unit polyfield coefficients.
    pub fn spencer_delta(&self) -> SpencerElem {
        let mut out = SpencerElem::zero(self.dims);
        for ((xm, dm, pm), c) in &self.terms {
            for v in self.dims.vars() {
                let Some((pm2, pair)) = crate::forms::contract_monomial(v, pm) else {
                    continue;
                };
                let Some((dm2, neg_append)) = append_der_right(dm, v) else {
                    continue;
                };
                let mut c2 = c * &pair;
                scalar::negate_if(&mut c2, neg_append ^ pm.is_odd());
                out.add_term(xm.clone(), dm2, pm2, c2);
            }
        }
        out
    }

    /// The Spencer homotopy `K(F (x) tau) = (-1)^{|tau|} sum_a
    /// [F, x_a] (x) P_a tau`.
    pub fn homotopy_k(&self) -> SpencerElem {
        let mut out = SpencerElem::zero(self.dims);
        for ((xm, dm, pm), c) in &self.terms {
            let mut single = WeylOp::zero(self.dims);
            single.add_term(xm.clone(), dm.clone(), c.clone());
            for v in self.dims.vars() {
                let Some((pm2, neg_ins)) = pm.mul_gen_left(v) else {
                    continue;
                };
                let x_v = WeylOp::from_poly(&SuperPoly::var(self.dims, v));
                let bracket = single.super_commutator(&x_v);
                for ((xm2, dm2), c2) in &bracket.terms {
                    let mut c3 = c2.clone();
                    scalar::negate_if(&mut c3, neg_ins ^ pm.is_odd());
                    out.add_term(xm2.clone(), dm2.clone(), pm2.clone(), c3);
                }
            }
        }
        out
    }

    /// Groups terms by the Spencer eigenvalue `deg F + deg tau`.
    pub fn eigen_split(&self) -> BTreeMap<i64, SpencerElem> {
        let mut out: BTreeMap<i64, SpencerElem> = BTreeMap::new();
        for ((xm, dm, pm), c) in &self.terms {
            out.entry(spencer_eigenvalue(dm, pm))
                .or_insert_with(|| SpencerElem::zero(self.dims))
                .add_term(xm.clone(), dm.clone(), pm.clone(), c.clone());
        }
        out
    }
}

/// Appends `D_v` to a derivative word from the right.
pub fn append_der_right(dm: &DerMonomial, v: Var) -> Option<(DerMonomial, bool)> {
    match v {
        Var::Z(i) => {
            let mut dm2 = dm.clone();
            dm2.dz[i] += 1;
            Some((dm2, false))
        }
        Var::Theta(a) => coord::insert_from_right(dm.dth, a).map(|(dth, neg)| {
            (
                DerMonomial {
                    dz: dm.dz.clone(),
                    dth,
                },
                neg,
            )
        }),
    }
}

/// `deg F + deg tau` for a Spencer basis term.
pub fn spencer_eigenvalue(dm: &DerMonomial, pm: &PolyMonomial) -> i64 {
    dm.degree() as i64 + pm.poly_degree() as i64
}

/// Full Spencer differential on an arbitrary presentation, including the
/// `e_x` summand: `delta(F (x) tau) = (-1)^{|tau|} (sum_a F D_a (x)
/// <dx_a, tau> - F (x) e_x(tau))` per parity-homogeneous piece of `tau`.
pub fn spencer_delta_pairs(dims: Dims, pairs: &[(WeylOp, PolyElem)]) -> SpencerElem {
    let mut out_pairs: Vec<(WeylOp, PolyElem)> = Vec::new();
    for (op, tau) in pairs {
        for (pm, coeff) in &tau.terms {
            let (even, odd) = coeff.parity_parts();
            for (part, coeff_parity) in [(even, false), (odd, true)] {
                if part.is_zero() {
                    continue;
                }
                let parity = coeff_parity ^ pm.is_odd();
                let mut piece = PolyElem::zero(dims);
                piece.add_term(pm.clone(), part);
                for v in dims.vars() {
                    let contraction = FormElem::gen(dims, v)
                        .contract_one(&piece)
                        .expect("1-form");
                    if contraction.is_zero() {
                        continue;
                    }
                    let signed = if parity {
                        contraction.neg()
                    } else {
                        contraction
                    };
                    out_pairs.push((op.compose(&WeylOp::derivative(dims, v)), signed));
                }
                let e = polyfields::e_x(&piece);
                if !e.is_zero() {
                    let signed = if parity { e } else { e.neg() };
                    out_pairs.push((op.clone(), signed));
                }
            }
        }
    }
    SpencerElem::normalize(dims, &out_pairs)
}

/// All Weyl derivative monomials with `dz`-exponent sum at most `max_dz`.
pub fn enumerate_der_monomials(dims: Dims, max_dz: u32) -> Vec<DerMonomial> {
    let mut out = Vec::new();
    for dz in coord::bounded_exps(dims.p, max_dz) {
        for dth in coord::all_subsets(dims.q) {
            out.push(DerMonomial { dz: dz.clone(), dth });
        }
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

    fn unit_f(d: Dims) -> FormMonomial {
        FormMonomial::unit(d)
    }

    fn dz_m(d: Dims) -> FormMonomial {
        FormMonomial::gen(d, Var::Z(0))
    }

    fn dth_m(d: Dims) -> FormMonomial {
        FormMonomial::gen(d, Var::Theta(0))
    }

    #[test]
    fn big_d_on_unit() {
        let d = d11();
        let mut e = UdrElem::zero(d);
        e.add_term(
            unit_f(d),
            SuperMonomial::unit(d),
            DerMonomial::unit(d),
            int(1),
        );
        let mut expect = UdrElem::zero(d);
        expect.add_term(
            dz_m(d),
            SuperMonomial::unit(d),
            DerMonomial::var(d, Var::Z(0)),
            int(1),
        );
        expect.add_term(
            dth_m(d),
            SuperMonomial::unit(d),
            DerMonomial::var(d, Var::Theta(0)),
            int(1),
        );
        assert_eq!(e.big_d(), expect);
    }

    #[test]
    fn berezin_generator_is_closed() {
        let d = d11();
        let mut e = UdrElem::zero(d);
        e.add_term(
            dz_m(d),
            SuperMonomial::unit(d),
            DerMonomial::var(d, Var::Theta(0)),
            int(1),
        );
        assert!(e.big_d().is_zero());
    }

    #[test]
    fn big_d_balances_function() {
        // z (x) 1, presented with the coordinate on the form side
        let d = d11();
        let z = SuperPoly::var(d, Var::Z(0));
        let e = UdrElem::normalize(
            d,
            &[(FormElem::from_poly(&z), WeylOp::one(d))],
        );
        let got = e.big_d();
        // dz (x) 1 + dz (x) z Dz + dth (x) z Dth
        let mut expect = UdrElem::zero(d);
        expect.add_term(
            dz_m(d),
            SuperMonomial::unit(d),
            DerMonomial::unit(d),
            int(1),
        );
        expect.add_term(
            dz_m(d),
            SuperMonomial::var(d, Var::Z(0)),
            DerMonomial::var(d, Var::Z(0)),
            int(1),
        );
        expect.add_term(
            dth_m(d),
            SuperMonomial::var(d, Var::Z(0)),
            DerMonomial::var(d, Var::Theta(0)),
            int(1),
        );
        assert_eq!(got, expect);
    }

    #[test]
    fn homotopy_h_examples() {
        let d = d11();
        let e = UdrCoElem::monomial(d, unit_f(d), DerMonomial::unit(d), SuperMonomial::unit(d));
        assert!(e.homotopy_h().is_zero());
        let e = UdrCoElem::monomial(d, dz_m(d), DerMonomial::unit(d), SuperMonomial::unit(d));
        assert!(e.homotopy_h().is_zero());
        // H(dth (x) Dth) = 1 (x) 1 from [Dth, th] = 1
        let e = UdrCoElem::monomial(
            d,
            dth_m(d),
            DerMonomial::var(d, Var::Theta(0)),
            SuperMonomial::unit(d),
        );
        let expect =
            UdrCoElem::monomial(d, unit_f(d), DerMonomial::unit(d), SuperMonomial::unit(d));
        assert_eq!(e.homotopy_h(), expect);
    }

    #[test]
    fn eigenvalue_examples() {
        let d = d11();
        assert_eq!(
            eigenvalue_c(d, &dz_m(d), &DerMonomial::var(d, Var::Theta(0))),
            0
        );
        assert!(in_c_kernel_locus(d, &dz_m(d), &DerMonomial::var(d, Var::Theta(0))));
        assert_eq!(eigenvalue_c(d, &unit_f(d), &DerMonomial::unit(d)), 2);
        assert_eq!(eigenvalue_c(d, &dz_m(d), &DerMonomial::unit(d)), 1);
    }

    #[test]
    fn homotopy_identity_spot_check() {
        // (H D2 + D2 H) = c on a handful of co-normal monomials
        let d = d11();
        for (fm, j) in [
            (unit_f(d), DerMonomial::unit(d)),
            (dz_m(d), DerMonomial::unit(d)),
            (dth_m(d), DerMonomial::var(d, Var::Theta(0))),
            (dz_m(d), DerMonomial::var(d, Var::Z(0))),
        ] {
            let mut xm = SuperMonomial::unit(d);
            xm.z[0] = 1;
            let m = UdrCoElem::monomial(d, fm.clone(), j.clone(), xm);
            let lhs = m.big_d().homotopy_h().add(&m.homotopy_h().big_d());
            let c = eigenvalue_c(d, &fm, &j);
            assert_eq!(lhs, m.scale(&int(c)), "monomial ({fm:?}, {j:?})");
        }
    }

    #[test]
    fn co_normal_round_trip_commutes_with_d() {
        let d = Dims::new(1, 2);
        let mut xm = SuperMonomial::unit(d);
        xm.theta = 0b01;
        xm.z[0] = 2;
        let mut dm = DerMonomial::unit(d);
        dm.dth = 0b10;
        let mut e = UdrElem::zero(d);
        e.add_term(dth_m_of(d, 1), xm, dm, int(3));
        let via_co = e.to_co().big_d().to_canonical();
        assert_eq!(via_co, e.big_d());
        assert_eq!(e.to_co().to_canonical(), e);
    }

    fn dth_m_of(d: Dims, a: usize) -> FormMonomial {
        FormMonomial::gen(d, Var::Theta(a))
    }

    #[test]
    fn spencer_delta_examples() {
        let d = d11();
        let e = SpencerElem::monomial(
            d,
            SuperMonomial::unit(d),
            DerMonomial::unit(d),
            PolyMonomial::unit(d),
        );
        assert!(e.spencer_delta().is_zero());
        // 1 (x) Pz -> Dz (x) 1
        let e = SpencerElem::monomial(
            d,
            SuperMonomial::unit(d),
            DerMonomial::unit(d),
            PolyMonomial::gen(d, Var::Z(0)),
        );
        let expect = SpencerElem::monomial(
            d,
            SuperMonomial::unit(d),
            DerMonomial::var(d, Var::Z(0)),
            PolyMonomial::unit(d),
        );
        assert_eq!(e.spencer_delta(), expect);
        // 1 (x) Pth -> Dth (x) 1: the sign (-1)^{|tau|} reads the parity of
        // Pth, which is even, and the pairing <dth, Pth> = +1.
        let e = SpencerElem::monomial(
            d,
            SuperMonomial::unit(d),
            DerMonomial::unit(d),
            PolyMonomial::gen(d, Var::Theta(0)),
        );
        let expect = SpencerElem::monomial(
            d,
            SuperMonomial::unit(d),
            DerMonomial::var(d, Var::Theta(0)),
            PolyMonomial::unit(d),
        );
        assert_eq!(e.spencer_delta(), expect);
    }

    #[test]
    fn homotopy_k_examples() {
        let d = d11();
        let unit = SpencerElem::monomial(
            d,
            SuperMonomial::unit(d),
            DerMonomial::unit(d),
            PolyMonomial::unit(d),
        );
        assert!(unit.homotopy_k().is_zero());
        for v in [Var::Z(0), Var::Theta(0)] {
            let e = SpencerElem::monomial(
                d,
                SuperMonomial::unit(d),
                DerMonomial::var(d, v),
                PolyMonomial::unit(d),
            );
            let expect = SpencerElem::monomial(
                d,
                SuperMonomial::unit(d),
                DerMonomial::unit(d),
                PolyMonomial::gen(d, v),
            );
            assert_eq!(e.homotopy_k(), expect, "K(D_{v:?} (x) 1)");
        }
    }

    #[test]
    fn spencer_eigenvalue_assembly() {
        let d = d11();
        // (K delta + delta K)(Dz (x) 1) = 1 . (Dz (x) 1)
        let e = SpencerElem::monomial(
            d,
            SuperMonomial::unit(d),
            DerMonomial::var(d, Var::Z(0)),
            PolyMonomial::unit(d),
        );
        let lhs = e.spencer_delta().homotopy_k().add(&e.homotopy_k().spencer_delta());
        assert_eq!(lhs, e);
        // degree-zero slice is the kernel
        assert_eq!(
            spencer_eigenvalue(&DerMonomial::unit(d), &PolyMonomial::unit(d)),
            0
        );
        // (F = z Dz, I = Pth) has eigenvalue 2 and the assembly confirms it
        let e = SpencerElem::monomial(
            d,
            SuperMonomial::var(d, Var::Z(0)),
            DerMonomial::var(d, Var::Z(0)),
            PolyMonomial::gen(d, Var::Theta(0)),
        );
        let lhs = e.spencer_delta().homotopy_k().add(&e.homotopy_k().spencer_delta());
        assert_eq!(lhs, e.scale(&int(2)));
    }

    #[test]
    fn o_balance_of_delta() {
        // delta(F f (x) tau) = delta(F (x) f tau)
        let d = Dims::new(1, 2);
        let f = SuperPoly::var(d, Var::Theta(0))
            .mul(&SuperPoly::var(d, Var::Z(0)))
            .add(&SuperPoly::one(d));
        let op = WeylOp::derivative(d, Var::Z(0))
            .compose(&WeylOp::derivative(d, Var::Theta(1)))
            .left_mul_poly(&SuperPoly::var(d, Var::Theta(1)));
        let tau = PolyElem::gen(d, Var::Z(0))
            .mul(&PolyElem::gen(d, Var::Theta(0)))
            .mul_fn_left(&SuperPoly::var(d, Var::Z(0)));
        let left = spencer_delta_pairs(d, &[(op.compose(&WeylOp::from_poly(&f)), tau.clone())]);
        let right = spencer_delta_pairs(d, &[(op.clone(), tau.mul_fn_left(&f))]);
        assert_eq!(left, right);
        // and both agree with the canonical fast path
        let canonical = SpencerElem::normalize(d, &[(op, tau.mul_fn_left(&f))]);
        assert_eq!(left, canonical.spencer_delta());
    }
}
