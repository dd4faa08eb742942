//! Polynomial super coordinate changes with nilpotent nonlinear part, and
//! the transport of functions, forms, vector fields, Weyl operators and
//! tensor elements between charts.
//!
//! A map `g` stores the new coordinates as polynomials in the old ones. Its
//! nonlinear corrections must all contain a theta factor, which makes the
//! inverse an exact polynomial map (computed by fixed-point iteration in the
//! nilpotent ideal).

use thiserror::Error;

use crate::coord::{Dims, Var};
use crate::forms::{FormElem, FormMonomial};
use crate::linalg::QMatrix;
use crate::polyfields::{PolyElem, VectorField};
use crate::scalar::{self};
use crate::superpoly::SuperPoly;
use crate::universal::{SpencerElem, UdrElem};
use crate::virtual_double::VirtualForm;
use crate::weyl::WeylOp;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MapError {
    #[error("target for {0:?} has wrong parity")]
    ParityMismatch(Var),
    #[error("nonlinear correction without theta factor in target for {0:?}")]
    NotNilpotent(Var),
    #[error("linear part is singular")]
    SingularLinearPart,
    #[error("fixed-point inversion did not stabilize")]
    NoPolynomialInverse,
}

/// A coordinate change `x' = g(x)`: one polynomial per new coordinate, in
/// the order `z_1..z_p, th_1..th_q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperCoordMap {
    pub dims: Dims,
    pub targets: Vec<SuperPoly>,
}

impl SuperCoordMap {
    pub fn identity(dims: Dims) -> Self {
        let targets = dims.vars().map(|v| SuperPoly::var(dims, v)).collect();
        SuperCoordMap { dims, targets }
    }

    /// Validates parity, invertible linear part and nilpotent corrections.
    pub fn new(dims: Dims, targets: Vec<SuperPoly>) -> Result<Self, MapError> {
        assert_eq!(targets.len(), dims.p + dims.q);
        let map = SuperCoordMap { dims, targets };
        for (a, v) in dims.vars().enumerate() {
            let t = &map.targets[a];
            if t.parity() != Some(v.is_odd()) && !t.is_zero() {
                return Err(MapError::ParityMismatch(v));
            }
            for m in map.correction(a).terms.keys() {
                if m.theta == 0 {
                    return Err(MapError::NotNilpotent(v));
                }
            }
        }
        if map.linear_part().inverse().is_none() {
            return Err(MapError::SingularLinearPart);
        }
        Ok(map)
    }

    fn var_index(dims: Dims, v: Var) -> usize {
        match v {
            Var::Z(i) => i,
            Var::Theta(a) => dims.p + a,
        }
    }

    pub fn target(&self, v: Var) -> &SuperPoly {
        &self.targets[Self::var_index(self.dims, v)]
    }

    /// Degree-one constant-coefficient part as a `(p+q)` square matrix,
    /// block diagonal by parity; entry `(b, a)` multiplies old variable `a`
    /// in the target of new coordinate `b`.
    pub fn linear_part(&self) -> QMatrix {
        let n = self.dims.p + self.dims.q;
        let mut m = QMatrix::zero(n, n);
        for (b, target) in self.targets.iter().enumerate() {
            for (mono, c) in &target.terms {
                if mono.total_degree() != 1 {
                    continue;
                }
                let a = if mono.even_degree() == 1 {
                    mono.z.iter().position(|&e| e == 1).unwrap()
                } else {
                    self.dims.p + crate::coord::set_iter(mono.theta).next().unwrap()
                };
                m.set(b, a, c.clone());
            }
        }
        m
    }

    /// Target minus its degree-one part.
    fn correction(&self, index: usize) -> SuperPoly {
        let mut out = SuperPoly::zero(self.dims);
        for (m, c) in &self.targets[index].terms {
            if m.total_degree() != 1 {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    /// Substitutes this map's expressions for the variables of `f`.
    pub fn substitute(&self, f: &SuperPoly) -> SuperPoly {
        let mut out = SuperPoly::zero(self.dims);
        for (m, c) in &f.terms {
            let mut acc = SuperPoly::constant(self.dims, c.clone());
            for (i, &e) in m.z.iter().enumerate() {
                for _ in 0..e {
                    acc = acc.mul(self.target(Var::Z(i)));
                }
            }
            for a in crate::coord::set_iter(m.theta) {
                acc = acc.mul(self.target(Var::Theta(a)));
            }
            out = out.add(&acc);
        }
        out
    }

    /// `self` after `inner`: substitutes `inner`'s expressions into the
    /// targets of `self`.
    pub fn compose(&self, inner: &SuperCoordMap) -> SuperCoordMap {
        SuperCoordMap {
            dims: self.dims,
            targets: self
                .targets
                .iter()
                .map(|t| inner.substitute(t))
                .collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self == &SuperCoordMap::identity(self.dims)
    }

    /// Exact polynomial inverse: `g.compose(&g.invert()?)` is the identity.
    pub fn invert(&self) -> Result<SuperCoordMap, MapError> {
        let linear = self.linear_part();
        let inv = linear.inverse().ok_or(MapError::SingularLinearPart)?;
        let n = self.dims.p + self.dims.q;
        // start from the inverse linear map, iterate x = L^-1 (x' - N(x))
        let linear_inverse = |vals: &[SuperPoly]| -> Vec<SuperPoly> {
            (0..n)
                .map(|a| {
                    let mut acc = SuperPoly::zero(self.dims);
                    for (b, val) in vals.iter().enumerate() {
                        let c = inv.get(a, b);
                        if !num::Zero::is_zero(c) {
                            acc = acc.add(&val.scale(c));
                        }
                    }
                    acc
                })
                .collect()
        };
        let primed: Vec<SuperPoly> = self
            .dims
            .vars()
            .map(|v| SuperPoly::var(self.dims, v))
            .collect();
        let mut h = SuperCoordMap {
            dims: self.dims,
            targets: linear_inverse(&primed),
        };
        for _ in 0..=(self.dims.q + 4) {
            if self.compose(&h).is_identity() {
                return Ok(h);
            }
            let shifted: Vec<SuperPoly> = (0..n)
                .map(|a| primed[a].sub(&h.substitute(&self.correction(a))))
                .collect();
            h = SuperCoordMap {
                dims: self.dims,
                targets: linear_inverse(&shifted),
            };
        }
        if self.compose(&h).is_identity() {
            Ok(h)
        } else {
            Err(MapError::NoPolynomialInverse)
        }
    }

    /// Jacobian entry `D_a g_b` (left derivative, old variable `a`, new
    /// coordinate `b`).
    pub fn jacobian(&self, a: Var, b: Var) -> SuperPoly {
        self.target(b).partial(a)
    }
}

/// Pull-back of a function through `g`: rewrites an expression in the new
/// coordinates as one in the old (`f |-> f o g`).
pub fn pullback_fn(g: &SuperCoordMap, f: &SuperPoly) -> SuperPoly {
    g.substitute(f)
}

/// Transport of chart-dependent objects along `g` (old chart to new chart).
/// Holds the inverse map and the substitution data both directions.
pub struct Transport {
    pub g: SuperCoordMap,
    pub g_inv: SuperCoordMap,
}

impl Transport {
    pub fn new(g: &SuperCoordMap) -> Result<Self, MapError> {
        Ok(Transport {
            g: g.clone(),
            g_inv: g.invert()?,
        })
    }

    pub fn dims(&self) -> Dims {
        self.g.dims
    }

    /// Functions move by substituting the inverse expressions.
    pub fn function(&self, f: &SuperPoly) -> SuperPoly {
        self.g_inv.substitute(f)
    }

    /// `D_a = sum_b (D_a g_b)(old) D'_b`, then coefficients pulled to the
    /// new chart.
    pub fn vector_field(&self, x: &VectorField) -> VectorField {
        let dims = self.dims();
        let mut out = VectorField::zero(dims);
        for b in dims.vars() {
            let mut comp = SuperPoly::zero(dims);
            for (a, x_a) in &x.comps {
                comp = comp.add(&x_a.mul(&self.g.jacobian(*a, b)));
            }
            let comp = self.function(&comp);
            if !comp.is_zero() {
                out.comps.insert(b, comp);
            }
        }
        out
    }

    /// Weyl operators transport multiplicatively over their factors.
    pub fn weyl(&self, op: &WeylOp) -> WeylOp {
        let dims = self.dims();
        let mut out = WeylOp::zero(dims);
        for ((xm, dm), c) in &op.terms {
            let mut acc = WeylOp::from_poly(&self.function(&SuperPoly::monomial(
                dims,
                xm.clone(),
                c.clone(),
            )));
            for v in dm.factors() {
                let der = self.vector_field(&VectorField::coordinate(dims, v));
                acc = acc.compose(&der.to_weyl());
            }
            out = out.add(&acc);
        }
        out
    }

    /// `dx_a = sum_b dx'_b (D'_b g^-1_a)(new)`, extended multiplicatively
    /// with right coefficients.
    pub fn form(&self, omega: &FormElem) -> FormElem {
        let dims = self.dims();
        let mut out = FormElem::zero(dims);
        for (fm, coeff) in &omega.terms {
            let mut acc = FormElem::one(dims);
            for (a, &e) in fm.dth.iter().enumerate() {
                for _ in 0..e {
                    acc = acc.mul(&self.gen_form(Var::Theta(a)));
                }
            }
            for i in crate::coord::set_iter(fm.dz) {
                acc = acc.mul(&self.gen_form(Var::Z(i)));
            }
            acc = acc.mul(&FormElem::from_poly(&self.function(coeff)));
            out = out.add(&acc);
        }
        out
    }

    fn gen_form(&self, a: Var) -> FormElem {
        let dims = self.dims();
        let mut out = FormElem::zero(dims);
        for b in dims.vars() {
            out.add_term(
                FormMonomial::gen(dims, b),
                self.g_inv.jacobian(b, a),
            );
        }
        out
    }

    /// Polyfields transport like vector fields with the parity shift,
    /// extended multiplicatively with left coefficients.
    pub fn polyfield(&self, tau: &PolyElem) -> PolyElem {
        let dims = self.dims();
        let mut out = PolyElem::zero(dims);
        for (pm, coeff) in &tau.terms {
            let mut acc = PolyElem::from_poly(&self.function(coeff));
            for v in pm.factors() {
                let der = self.vector_field(&VectorField::coordinate(dims, v));
                acc = acc.mul(&der.to_pi());
            }
            out = out.add(&acc);
        }
        out
    }

    pub fn udr(&self, e: &UdrElem) -> UdrElem {
        let dims = self.dims();
        let mut pairs = Vec::new();
        for ((fm, xm, dm), c) in &e.terms {
            let mut omega = FormElem::zero(dims);
            omega.add_term(fm.clone(), SuperPoly::one(dims));
            let mut single = WeylOp::zero(dims);
            single.add_term(xm.clone(), dm.clone(), c.clone());
            pairs.push((self.form(&omega), self.weyl(&single)));
        }
        UdrElem::normalize(dims, &pairs)
    }

    pub fn spencer(&self, e: &SpencerElem) -> SpencerElem {
        let dims = self.dims();
        let mut pairs = Vec::new();
        for ((xm, dm, pm), c) in &e.terms {
            let mut single = WeylOp::zero(dims);
            single.add_term(xm.clone(), dm.clone(), c.clone());
            let mut tau = PolyElem::zero(dims);
            tau.add_term(pm.clone(), SuperPoly::one(dims));
            pairs.push((self.weyl(&single), self.polyfield(&tau)));
        }
        SpencerElem::normalize(dims, &pairs)
    }

    pub fn virtual_form(&self, e: &VirtualForm) -> VirtualForm {
        let dims = self.dims();
        let mut triples = Vec::new();
        for ((fm, xm, dm, pm), c) in &e.terms {
            let mut omega = FormElem::zero(dims);
            omega.add_term(fm.clone(), SuperPoly::one(dims));
            let mut single = WeylOp::zero(dims);
            single.add_term(xm.clone(), dm.clone(), c.clone());
            let mut tau = PolyElem::zero(dims);
            tau.add_term(pm.clone(), SuperPoly::one(dims));
            triples.push((self.form(&omega), self.weyl(&single), self.polyfield(&tau)));
        }
        VirtualForm::normalize(dims, &triples)
    }

    /// Transport of an explicit `(F, tau)` presentation without
    /// normalization, for operators like `delta_1` that are only defined at
    /// presentation level.
    pub fn spencer_pairs(&self, pairs: &[(WeylOp, PolyElem)]) -> Vec<(WeylOp, PolyElem)> {
        pairs
            .iter()
            .map(|(op, tau)| (self.weyl(op), self.polyfield(tau)))
            .collect()
    }
}

/// First Spencer summand alone on an explicit `(F, tau)` presentation:
/// `delta_1(F (x) tau) = (-1)^{|tau|} sum_a F D_a (x) <dx_a, tau>`.
/// Not chart-invariant by itself; used to exhibit the cancellation.
pub fn spencer_delta_1_pairs(dims: Dims, pairs: &[(WeylOp, PolyElem)]) -> SpencerElem {
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
            }
        }
    }
    SpencerElem::normalize(dims, &out_pairs)
}

/// Parses assignment lines of the shared grammar into a map, e.g.
/// `z1' = z1 + th1*th2`.
pub fn parse_map(dims: Dims, text: &str) -> Result<SuperCoordMap, String> {
    let mut targets: Vec<Option<SuperPoly>> = vec![None; dims.p + dims.q];
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (lhs, rhs) = line
            .split_once('=')
            .ok_or_else(|| format!("expected `var' = expr`, got `{line}`"))?;
        let lhs = lhs.trim().trim_end_matches('\'');
        let v = crate::grammar::parse_var(lhs).ok_or_else(|| format!("unknown variable `{lhs}`"))?;
        let idx = match v {
            Var::Z(i) => i,
            Var::Theta(a) => dims.p + a,
        };
        if idx >= targets.len() {
            return Err(format!("variable `{lhs}` out of range for {dims:?}"));
        }
        targets[idx] = Some(crate::grammar::parse_poly(dims, rhs)?);
    }
    let targets: Vec<SuperPoly> = targets
        .into_iter()
        .enumerate()
        .map(|(i, t)| {
            t.unwrap_or_else(|| {
                let v = if i < dims.p {
                    Var::Z(i)
                } else {
                    Var::Theta(i - dims.p)
                };
                SuperPoly::var(dims, v)
            })
        })
        .collect();
    SuperCoordMap::new(dims, targets).map_err(|e| e.to_string())
}

/// Generates a random admissible map: invertible small-integer linear
/// blocks plus sparse nilpotent corrections.
pub fn random_map(dims: Dims, rng: &mut impl rand::Rng) -> SuperCoordMap {
    use rand::seq::SliceRandom;
    loop {
        let n = dims.p + dims.q;
        let mut targets: Vec<SuperPoly> = Vec::with_capacity(n);
        for v in dims.vars() {
            let mut t = SuperPoly::var(dims, v);
            // small linear mixing within the same parity
            let peers: Vec<Var> = dims
                .vars()
                .filter(|w| w.is_odd() == v.is_odd() && *w != v)
                .collect();
            if let Some(w) = peers.choose(rng) {
                if rng.gen_bool(0.5) {
                    let c = scalar::int(*[1i64, -1, 2].choose(rng).unwrap());
                    t = t.add(&SuperPoly::var(dims, *w).scale(&c));
                }
            }
            // nilpotent corrections built from theta pairs or z-theta mixes
            for _ in 0..2 {
                if rng.gen_bool(0.6) {
                    let c = scalar::int(*[1i64, -1, 2, -2].choose(rng).unwrap());
                    let correction = if v.is_odd() {
                        let i = rng.gen_range(0..dims.p);
                        let a = rng.gen_range(0..dims.q);
                        SuperPoly::var(dims, Var::Z(i))
                            .mul(&SuperPoly::var(dims, Var::Theta(a)))
                    } else {
                        if dims.q < 2 {
                            continue;
                        }
                        let a = rng.gen_range(0..dims.q);
                        let b = (a + 1 + rng.gen_range(0..dims.q - 1)) % dims.q;
                        let (a, b) = (a.min(b), a.max(b));
                        let pair = SuperPoly::var(dims, Var::Theta(a))
                            .mul(&SuperPoly::var(dims, Var::Theta(b)));
                        if rng.gen_bool(0.4) {
                            pair.mul(&SuperPoly::var(dims, Var::Z(rng.gen_range(0..dims.p))))
                        } else {
                            pair
                        }
                    };
                    t = t.add(&correction.scale(&c));
                }
            }
            targets.push(t);
        }
        if let Ok(map) = SuperCoordMap::new(dims, targets) {
            if map.invert().is_ok() {
                return map;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn d12() -> Dims {
        Dims::new(1, 2)
    }

    fn zv(d: Dims) -> SuperPoly {
        SuperPoly::var(d, Var::Z(0))
    }

    fn thv(d: Dims, a: usize) -> SuperPoly {
        SuperPoly::var(d, Var::Theta(a))
    }

    #[test]
    fn nilpotent_shift_inverse() {
        let d = d12();
        let g = SuperCoordMap::new(
            d,
            vec![zv(d).add(&thv(d, 0).mul(&thv(d, 1))), thv(d, 0), thv(d, 1)],
        )
        .unwrap();
        let h = g.invert().unwrap();
        assert!(g.compose(&h).is_identity());
        assert!(h.compose(&g).is_identity());
        // z = z' - th1' th2'
        assert_eq!(
            h.targets[0],
            zv(d).sub(&thv(d, 0).mul(&thv(d, 1)))
        );
    }

    #[test]
    fn linear_map_inverse() {
        let d = d12();
        let g = SuperCoordMap::new(
            d,
            vec![
                zv(d).scale(&int(2)),
                thv(d, 0).add(&thv(d, 1)),
                thv(d, 1),
            ],
        )
        .unwrap();
        let h = g.invert().unwrap();
        assert!(g.compose(&h).is_identity());
    }

    #[test]
    fn mixed_inverse_round_trip() {
        let d = d12();
        // z' = 2z, th1' = th1 + z th2, th2' = th2
        let g = SuperCoordMap::new(
            d,
            vec![
                zv(d).scale(&int(2)),
                thv(d, 0).add(&zv(d).mul(&thv(d, 1))),
                thv(d, 1),
            ],
        )
        .unwrap();
        let h = g.invert().unwrap();
        assert!(g.compose(&h).is_identity());
        assert!(h.compose(&g).is_identity());
    }

    #[test]
    fn pullback_is_algebra_map() {
        let d = d12();
        let g = SuperCoordMap::new(
            d,
            vec![zv(d).add(&thv(d, 0).mul(&thv(d, 1))), thv(d, 0), thv(d, 1)],
        )
        .unwrap();
        // f = z' substitutes to z + th1 th2
        let f = zv(d);
        assert_eq!(
            pullback_fn(&g, &f),
            zv(d).add(&thv(d, 0).mul(&thv(d, 1)))
        );
        let a = zv(d).mul(&thv(d, 0));
        let b = thv(d, 1).add(&zv(d));
        assert_eq!(
            pullback_fn(&g, &a.mul(&b)),
            pullback_fn(&g, &a).mul(&pullback_fn(&g, &b))
        );
    }

    #[test]
    fn contravariance() {
        let d = d12();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        use rand::SeedableRng;
        let g = random_map(d, &mut rng);
        let h = random_map(d, &mut rng);
        let f = zv(d).mul(&thv(d, 0)).add(&thv(d, 1).scale(&int(3)));
        let gh = g.compose(&h);
        assert_eq!(
            pullback_fn(&gh, &f),
            pullback_fn(&h, &pullback_fn(&g, &f))
        );
    }

    #[test]
    fn transport_commutes_with_exterior_d() {
        let d = d12();
        let g = SuperCoordMap::new(
            d,
            vec![zv(d).add(&thv(d, 0).mul(&thv(d, 1))), thv(d, 0), thv(d, 1)],
        )
        .unwrap();
        let t = Transport::new(&g).unwrap();
        for v in d.vars() {
            let f = SuperPoly::var(d, v);
            let lhs = t.form(&FormElem::from_poly(&f).exterior_d());
            let rhs = FormElem::from_poly(&t.function(&f)).exterior_d();
            assert_eq!(lhs, rhs, "coordinate {v:?}");
        }
        // and on a nonlinear function
        let f = zv(d).mul(&zv(d)).mul(&thv(d, 0));
        assert_eq!(
            t.form(&FormElem::from_poly(&f).exterior_d()),
            FormElem::from_poly(&t.function(&f)).exterior_d()
        );
    }

    #[test]
    fn transport_of_derivative_under_linear_map() {
        let d = d12();
        let g = SuperCoordMap::new(d, vec![zv(d).scale(&int(2)), thv(d, 0), thv(d, 1)]).unwrap();
        let t = Transport::new(&g).unwrap();
        let x = t.vector_field(&VectorField::coordinate(d, Var::Z(0)));
        // D_z = 2 D_z'
        assert_eq!(x.comps.len(), 1);
        assert_eq!(x.comps[&Var::Z(0)], SuperPoly::constant(d, int(2)));
    }

    #[test]
    fn transport_respects_weyl_product() {
        use rand::SeedableRng;
        let d = d12();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let g = random_map(d, &mut rng);
        let t = Transport::new(&g).unwrap();
        let a = WeylOp::derivative(d, Var::Theta(0)).left_mul_poly(&zv(d));
        let b = WeylOp::derivative(d, Var::Z(0))
            .left_mul_poly(&thv(d, 1))
            .add(&WeylOp::from_poly(&zv(d)));
        assert_eq!(
            t.weyl(&a.compose(&b)),
            t.weyl(&a).compose(&t.weyl(&b))
        );
    }

    #[test]
    fn transport_identity_is_identity() {
        let d = d12();
        let t = Transport::new(&SuperCoordMap::identity(d)).unwrap();
        let mut e = SpencerElem::zero(d);
        e.add_term(
            crate::superpoly::SuperMonomial::unit(d),
            crate::weyl::DerMonomial::unit(d),
            crate::polyfields::PolyMonomial::gen(d, Var::Z(0)),
            int(1),
        );
        assert_eq!(t.spencer(&e), e);
    }

    #[test]
    fn weyl_action_compatible_with_transport() {
        use rand::SeedableRng;
        let d = d12();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let g = random_map(d, &mut rng);
        let t = Transport::new(&g).unwrap();
        let op = WeylOp::derivative(d, Var::Z(0))
            .compose(&WeylOp::derivative(d, Var::Theta(1)))
            .left_mul_poly(&thv(d, 0));
        let f = zv(d).mul(&thv(d, 1)).add(&zv(d).mul(&zv(d)));
        assert_eq!(
            t.function(&op.apply_to(&f)),
            t.weyl(&op).apply_to(&t.function(&f))
        );
    }
}
