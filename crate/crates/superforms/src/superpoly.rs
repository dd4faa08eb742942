//! The graded-commutative polynomial algebra `K[z_1..z_p | th_1..th_q]`.

use std::collections::BTreeMap;

use num::Zero;
use thiserror::Error;

use crate::coord::{self, Dims, OddSet, Var};
use crate::scalar::{self, Scalar};

/// A monomial `z^e th_S` with the odd factors in ascending index order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SuperMonomial {
    pub z: Vec<u8>,
    pub theta: OddSet,
}

impl SuperMonomial {
    pub fn unit(dims: Dims) -> Self {
        SuperMonomial {
            z: vec![0; dims.p],
            theta: 0,
        }
    }

    pub fn var(dims: Dims, v: Var) -> Self {
        let mut m = Self::unit(dims);
        match v {
            Var::Z(i) => m.z[i] = 1,
            Var::Theta(a) => m.theta = 1 << a,
        }
        m
    }

    pub fn is_odd(&self) -> bool {
        coord::set_len(self.theta) % 2 == 1
    }

    pub fn even_degree(&self) -> u32 {
        self.z.iter().map(|&e| e as u32).sum()
    }

    pub fn theta_degree(&self) -> u32 {
        coord::set_len(self.theta)
    }

    pub fn total_degree(&self) -> u32 {
        self.even_degree() + self.theta_degree()
    }

    /// Product of two monomials; `None` when an odd factor repeats.
    pub fn mul(&self, other: &SuperMonomial) -> Option<(SuperMonomial, bool)> {
        let (theta, neg) = coord::merge_sets(self.theta, other.theta)?;
        let z = self
            .z
            .iter()
            .zip(&other.z)
            .map(|(a, b)| a + b)
            .collect();
        Some((SuperMonomial { z, theta }, neg))
    }
}

/// All monomials with even-exponent sum at most `max_z` (all theta subsets).
pub fn enumerate_monomials(dims: Dims, max_z: u32) -> Vec<SuperMonomial> {
    let mut out = Vec::new();
    for z in coord::bounded_exps(dims.p, max_z) {
        for theta in coord::all_subsets(dims.q) {
            out.push(SuperMonomial { z: z.clone(), theta });
        }
    }
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("divergent scaling integral on monomial of degree {degree} with exponent {q}")]
    DivergentIntegral { q: i64, degree: u32 },
}

/// An element of the polynomial superalgebra; no zero coefficients stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperPoly {
    pub dims: Dims,
    pub terms: BTreeMap<SuperMonomial, Scalar>,
}

impl SuperPoly {
    pub fn zero(dims: Dims) -> Self {
        SuperPoly {
            dims,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(dims: Dims) -> Self {
        Self::constant(dims, scalar::one())
    }

    pub fn constant(dims: Dims, c: Scalar) -> Self {
        let mut f = Self::zero(dims);
        f.add_term(SuperMonomial::unit(dims), c);
        f
    }

    pub fn var(dims: Dims, v: Var) -> Self {
        let mut f = Self::zero(dims);
        f.add_term(SuperMonomial::var(dims, v), scalar::one());
        f
    }

    pub fn monomial(dims: Dims, m: SuperMonomial, c: Scalar) -> Self {
        let mut f = Self::zero(dims);
        f.add_term(m, c);
        f
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: SuperMonomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(scalar::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &SuperPoly) -> SuperPoly {
        assert_eq!(self.dims, other.dims);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &SuperPoly) -> SuperPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> SuperPoly {
        let mut out = SuperPoly::zero(self.dims);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> SuperPoly {
        let mut out = SuperPoly::zero(self.dims);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    /// Graded-commutative product; Koszul signs arise from reordering the
    /// odd factors into ascending order.
    pub fn mul(&self, other: &SuperPoly) -> SuperPoly {
        assert_eq!(self.dims, other.dims);
        let mut out = SuperPoly::zero(self.dims);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, neg)) = ma.mul(mb) {
                    let mut c = ca * cb;
                    scalar::negate_if(&mut c, neg);
                    out.add_term(m, c);
                }
            }
        }
        out
    }

    /// Left super-derivative with respect to the coordinate `v`.
    pub fn partial(&self, v: Var) -> SuperPoly {
        let mut out = SuperPoly::zero(self.dims);
        for (m, c) in &self.terms {
            match v {
                Var::Z(i) => {
                    if m.z[i] > 0 {
                        let mut m2 = m.clone();
                        m2.z[i] -= 1;
                        out.add_term(m2, c * scalar::int(m.z[i] as i64));
                    }
                }
                Var::Theta(a) => {
                    if let Some((theta, neg)) = coord::remove_from_left(m.theta, a) {
                        let mut c2 = c.clone();
                        scalar::negate_if(&mut c2, neg);
                        out.add_term(
                            SuperMonomial {
                                z: m.z.clone(),
                                theta,
                            },
                            c2,
                        );
                    }
                }
            }
        }
        out
    }

    /// Exact value of `\int_0^1 t^Q f(t x) dt`, computed per monomial as
    /// `coeff / (Q + deg m + 1)`.
    pub fn scaling_integral(&self, q: i64) -> Result<SuperPoly, PolyError> {
        let mut out = SuperPoly::zero(self.dims);
        for (m, c) in &self.terms {
            let denom = q + m.total_degree() as i64 + 1;
            if denom <= 0 {
                return Err(PolyError::DivergentIntegral {
                    q,
                    degree: m.total_degree(),
                });
            }
            out.add_term(m.clone(), c / scalar::int(denom));
        }
        Ok(out)
    }

    /// Keeps the pure-theta part `f(0|th)`.
    pub fn eval_odd_sector(&self) -> SuperPoly {
        let mut out = SuperPoly::zero(self.dims);
        for (m, c) in &self.terms {
            if m.even_degree() == 0 {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    /// Parity when homogeneous, `None` for mixed or zero elements.
    pub fn parity(&self) -> Option<bool> {
        let mut parities = self.terms.keys().map(|m| m.is_odd());
        let first = parities.next()?;
        if parities.all(|p| p == first) {
            Some(first)
        } else {
            None
        }
    }

    /// Splits into (even part, odd part).
    pub fn parity_parts(&self) -> (SuperPoly, SuperPoly) {
        let mut even = SuperPoly::zero(self.dims);
        let mut odd = SuperPoly::zero(self.dims);
        for (m, c) in &self.terms {
            if m.is_odd() {
                odd.add_term(m.clone(), c.clone());
            } else {
                even.add_term(m.clone(), c.clone());
            }
        }
        (even, odd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{frac, int};

    fn d11() -> Dims {
        Dims::new(1, 1)
    }

    fn d12() -> Dims {
        Dims::new(1, 2)
    }

    fn th(dims: Dims, a: usize) -> SuperPoly {
        SuperPoly::var(dims, Var::Theta(a))
    }

    fn z(dims: Dims) -> SuperPoly {
        SuperPoly::var(dims, Var::Z(0))
    }

    #[test]
    fn odd_products_anticommute() {
        let d = d12();
        let t1t2 = th(d, 0).mul(&th(d, 1));
        assert_eq!(th(d, 1).mul(&th(d, 0)), t1t2.neg());
        assert!(th(d, 0).mul(&th(d, 0)).is_zero());
    }

    #[test]
    fn difference_of_squares_kills_theta() {
        let d = d11();
        let a = z(d).add(&th(d, 0));
        let b = z(d).sub(&th(d, 0));
        assert_eq!(a.mul(&b), z(d).mul(&z(d)));
    }

    #[test]
    fn left_theta_derivative() {
        let d = d12();
        let t1t2 = th(d, 0).mul(&th(d, 1));
        assert_eq!(t1t2.partial(Var::Theta(0)), th(d, 1));
        assert_eq!(t1t2.partial(Var::Theta(1)), th(d, 0).neg());
    }

    #[test]
    fn even_derivative() {
        let d = d11();
        let f = z(d).mul(&z(d)).mul(&th(d, 0));
        assert_eq!(f.partial(Var::Z(0)), z(d).mul(&th(d, 0)).scale(&int(2)));
    }

    #[test]
    fn scaling_integral_examples() {
        let d = d11();
        let z2 = z(d).mul(&z(d));
        assert_eq!(z2.scaling_integral(0).unwrap(), z2.scale(&frac(1, 3)));
        assert_eq!(
            SuperPoly::one(d).scaling_integral(2).unwrap(),
            SuperPoly::constant(d, frac(1, 3))
        );
        assert_eq!(th(d, 0).scaling_integral(-1).unwrap(), th(d, 0));
        assert!(SuperPoly::one(d).scaling_integral(-1).is_err());
    }

    #[test]
    fn odd_sector() {
        let d = d12();
        let f = z(d).add(&th(d, 0));
        assert_eq!(f.eval_odd_sector(), th(d, 0));
        assert!(z(d).mul(&th(d, 0)).mul(&th(d, 1)).eval_odd_sector().is_zero());
        let g = SuperPoly::constant(d, int(3)).add(&th(d, 0).mul(&th(d, 1)).scale(&int(2)));
        assert_eq!(g.eval_odd_sector(), g);
    }

    #[test]
    fn leibniz_rule() {
        let d = d12();
        let f = th(d, 0).mul(&z(d)); // odd
        let g = z(d).add(&th(d, 0).mul(&th(d, 1)));
        for v in [Var::Z(0), Var::Theta(0), Var::Theta(1)] {
            let lhs = f.mul(&g).partial(v);
            let sign_flip = v.is_odd() && f.parity() == Some(true);
            let mut second = f.mul(&g.partial(v));
            if sign_flip {
                second = second.neg();
            }
            assert_eq!(lhs, f.partial(v).mul(&g).add(&second), "var {v:?}");
        }
    }

    #[test]
    fn derivatives_supercommute() {
        let d = d12();
        let f = z(d).mul(&th(d, 0)).mul(&th(d, 1)).add(&z(d).mul(&z(d)));
        for a in [Var::Z(0), Var::Theta(0), Var::Theta(1)] {
            for b in [Var::Z(0), Var::Theta(0), Var::Theta(1)] {
                let ab = f.partial(b).partial(a);
                let mut ba = f.partial(a).partial(b);
                if a.is_odd() && b.is_odd() {
                    ba = ba.neg();
                }
                assert_eq!(ab, ba);
            }
        }
    }
}
