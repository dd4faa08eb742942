//! Homotopy operators for the Poincaré lemmas and truncated cohomology by
//! exact linear algebra.
//!
//! The integral-form homotopy follows the scaling construction with the
//! exponent `Q_s`, evaluated in closed form per monomial. Its `P_b`
//! insertion carries the dual-basis sign `(-1)^{|x_b|+1}` compensating the
//! pairing normalization of the differential, so that
//! `(delta h + h delta) = id - P_0` holds exactly.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::berezin::{self, IntegralForm};
use crate::coord::Dims;
#[cfg(test)]
use crate::coord::Var;
use crate::forms::{FormElem, FormMonomial};
use crate::linalg::{QMatrix, Subspace};
use crate::polyfields::{self, PolyMonomial};
use crate::scalar::{self, Scalar};
use crate::superpoly::{self, PolyError, SuperMonomial, SuperPoly};

/// Finite slice of the windowed bases: coefficients with `z`-degree at most
/// `max_z`; identities are checked per monomial, never across the boundary.
#[derive(Clone, Copy, Debug)]
pub struct TruncationWindow {
    pub dims: Dims,
    pub max_z: u32,
}

/// `Q_s = p + q + deg_pth(F) - deg_pz(F) - 2 deg_th(f) - 1` for a
/// theta-homogeneous coefficient.
pub fn q_exponent(dims: Dims, theta_deg: u32, f_mono: &PolyMonomial) -> i64 {
    (dims.p + dims.q) as i64 + f_mono.pth_degree() as i64
        - f_mono.pz_degree() as i64
        - 2 * theta_deg as i64
        - 1
}

/// The integral-form homotopy, per coefficient monomial `m`:
/// `h(phi c m (x) F) = (-1)^{|m|+|F|} sum_b (-1)^{|m|(|x_b|+1)}
/// sigma_b  phi (c x_b m / (Q_s + deg m + 1)) (x) P_b F`,
/// with `sigma_b = (-1)^{|x_b|+1}`.
pub fn poincare_h(s: &IntegralForm) -> Result<IntegralForm, PolyError> {
    let dims = s.dims;
    let mut out = IntegralForm::zero(dims);
    for (im, f) in &s.terms {
        for (fm, c) in &f.terms {
            let q = q_exponent(dims, fm.theta_degree(), im);
            for b in dims.vars() {
                let Some((im2, neg_ins)) = im.mul_gen_left(b) else {
                    continue;
                };
                let xb = SuperMonomial::var(dims, b);
                let Some((fm2, neg_mul)) = xb.mul(fm) else {
                    continue;
                };
                let denom = q + fm.total_degree() as i64 + 1;
                if denom <= 0 {
                    return Err(PolyError::DivergentIntegral {
                        q,
                        degree: fm.total_degree(),
                    });
                }
                let mut neg = neg_ins ^ neg_mul;
                // (-1)^{|m|+|F|}
                neg ^= fm.is_odd() ^ im.is_odd();
                // (-1)^{|m|(|x_b|+1)}
                neg ^= fm.is_odd() && !b.is_odd();
                // sigma_b
                neg ^= !b.is_odd();
                let mut c2 = c / scalar::int(denom);
                scalar::negate_if(&mut c2, neg);
                out.add_term(im2, SuperPoly::monomial(dims, fm2, c2));
            }
        }
    }
    Ok(out)
}

/// Projection onto the span of `s_0`: keeps monomials with no `Pth`
/// factors, all `Pz` factors, the full theta top and no even variables.
pub fn p0(s: &IntegralForm) -> IntegralForm {
    let dims = s.dims;
    let mut out = IntegralForm::zero(dims);
    for (im, f) in &s.terms {
        if im.pth_degree() != 0 || im.pz_degree() != dims.p as u32 {
            continue;
        }
        for (fm, c) in &f.terms {
            if fm.even_degree() == 0 && fm.theta_degree() == dims.q as u32 {
                out.add_term(im.clone(), SuperPoly::monomial(dims, fm.clone(), c.clone()));
            }
        }
    }
    out
}

/// `(delta h + h delta)(s) - (s - P_0 s)`, which must vanish identically.
pub fn homotopy_defect(s: &IntegralForm) -> Result<IntegralForm, PolyError> {
    let lhs = berezin::integral_delta(&poincare_h(s)?).add(&poincare_h(&berezin::integral_delta(s))?);
    Ok(lhs.sub(&s.sub(&p0(s))))
}

/// The classical scaling homotopy on polynomial superforms: per monomial of
/// total weight `w` (form degree plus coefficient degree),
/// `K = sum_a x_a (d/d dx_a) / w`, and zero on the constants.
pub fn scaling_homotopy(omega: &FormElem) -> FormElem {
    let dims = omega.dims;
    let mut out = FormElem::zero(dims);
    for (m, f) in &omega.terms {
        for (fm, c) in &f.terms {
            let w = m.form_degree() as i64 + fm.total_degree() as i64;
            if w == 0 {
                continue;
            }
            for a in dims.vars() {
                let Some((m2, cf)) = m.partial_dx(a) else {
                    continue;
                };
                let xa = SuperMonomial::var(dims, a);
                let Some((fm2, neg_mul)) = xa.mul(fm) else {
                    continue;
                };
                let mut c2 = c * cf / scalar::int(w);
                scalar::negate_if(&mut c2, neg_mul ^ (a.is_odd() && m.is_odd()));
                out.add_term(m2, SuperPoly::monomial(dims, fm2, c2));
            }
        }
    }
    out
}

/// Projection onto degree-zero forms with constant coefficient.
pub fn eval_at_origin(omega: &FormElem) -> FormElem {
    let dims = omega.dims;
    let mut out = FormElem::zero(dims);
    if let Some(f) = omega.terms.get(&FormMonomial::unit(dims)) {
        if let Some(c) = f.terms.get(&SuperMonomial::unit(dims)) {
            out.add_term(
                FormMonomial::unit(dims),
                SuperPoly::constant(dims, c.clone()),
            );
        }
    }
    out
}

/// `(d K + K d)(omega) - (omega - omega(0))`, which must vanish.
pub fn de_rham_homotopy_defect(omega: &FormElem) -> FormElem {
    let lhs = scaling_homotopy(omega)
        .exterior_d()
        .add(&scaling_homotopy(&omega.exterior_d()));
    lhs.sub(&omega.sub(&eval_at_origin(omega)))
}

/// One homology slot of a truncated table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeEntry {
    /// Complex degree as reported (integral side: `p - k`; de Rham: form
    /// degree).
    pub degree: i64,
    pub even: usize,
    pub odd: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CohomologyTable {
    pub side: String,
    pub p: usize,
    pub q: usize,
    pub max_z: u32,
    pub entries: Vec<DegreeEntry>,
}

struct SectorBasis<K: Ord + Clone> {
    index: BTreeMap<K, usize>,
    keys: Vec<K>,
    /// marks basis vectors inside the inner (non-enlarged) window
    inner: Vec<bool>,
}

impl<K: Ord + Clone> SectorBasis<K> {
    fn new() -> Self {
        SectorBasis {
            index: BTreeMap::new(),
            keys: Vec::new(),
            inner: Vec::new(),
        }
    }

    fn push(&mut self, key: K, inner: bool) {
        if !self.index.contains_key(&key) {
            self.index.insert(key.clone(), self.keys.len());
            self.keys.push(key);
            self.inner.push(inner);
        }
    }

    fn len(&self) -> usize {
        self.keys.len()
    }

    fn inner_subspace(&self) -> Subspace {
        let vectors: Vec<Vec<Scalar>> = (0..self.len())
            .filter(|&i| self.inner[i])
            .map(|i| {
                let mut v = vec![scalar::zero(); self.len()];
                v[i] = scalar::one();
                v
            })
            .collect();
        Subspace::span(self.len(), &vectors)
    }
}

/// Homology dimensions of one differential step computed on an enlarged
/// window: kernel from the inner basis, boundaries from the enlarged one.
fn sector_homology<K: Ord + Clone>(
    basis_k: &SectorBasis<K>,
    basis_kp1: &SectorBasis<K>,
    d_k: &QMatrix,
    d_kp1: &QMatrix,
) -> (usize, Subspace, Subspace) {
    let inner_k = basis_k.inner_subspace();
    let zero_target = Subspace::zero(d_k.rows.max(1));
    let kernel = if d_k.rows == 0 {
        inner_k.clone()
    } else {
        inner_k.preimage_in(d_k, &zero_target)
    };
    let boundaries_all = if basis_kp1.len() == 0 {
        Subspace::zero(basis_k.len().max(1))
    } else {
        Subspace::full(basis_kp1.len()).image(d_kp1)
    };
    // boundaries that lie inside the inner window
    let boundaries = if basis_k.len() == 0 {
        Subspace::zero(1)
    } else {
        boundaries_all.preimage_in(&QMatrix::identity(basis_k.len()), &inner_k)
    };
    let dim = kernel.dim() - intersect_dim(&kernel, &boundaries);
    (dim, kernel, boundaries)
}

fn intersect_dim(a: &Subspace, b: &Subspace) -> usize {
    if a.ambient == 0 {
        return 0;
    }
    a.preimage_in(&QMatrix::identity(a.ambient), b).dim()
}

/// Truncated homology of the integral-form complex. Entries are reported by
/// complex degree `p - k`. The homotopy witness of an in-window cycle gains
/// at most one `z` and one `Pth` factor, so boundaries are taken from a
/// once-enlarged window and the table is exact inside the inner one.
pub fn integral_cohomology(window: &TruncationWindow) -> CohomologyTable {
    let dims = window.dims;
    let phi = berezin::phi_parity(dims);
    // bases per (poly degree, parity sector), over the enlarged window
    let mut bases: BTreeMap<(u32, bool), SectorBasis<(PolyMonomial, SuperMonomial)>> =
        BTreeMap::new();
    for im in polyfields::enumerate_monomials(dims, window.max_z + 1) {
        for fm in superpoly::enumerate_monomials(dims, window.max_z + 1) {
            let parity = phi ^ im.is_odd() ^ fm.is_odd();
            let inner =
                fm.even_degree() <= window.max_z && im.pth_degree() <= window.max_z;
            bases
                .entry((im.poly_degree(), parity))
                .or_insert_with(SectorBasis::new)
                .push((im.clone(), fm.clone()), inner);
        }
    }
    let empty = SectorBasis::new();
    let max_inner_k = dims.p as u32 + window.max_z;
    let matrix_for = |k: u32, parity: bool| -> QMatrix {
        let source = bases.get(&(k, parity)).unwrap_or(&empty);
        let target = if k == 0 {
            &empty
        } else {
            bases.get(&(k - 1, !parity)).unwrap_or(&empty)
        };
        let mut m = QMatrix::zero(target.len(), source.len());
        for (j, (im, fm)) in source.keys.iter().enumerate() {
            let s = IntegralForm::new(
                dims,
                SuperPoly::monomial(dims, fm.clone(), scalar::one()),
                im.clone(),
            );
            for (im2, f2) in berezin::integral_delta(&s).terms {
                for (fm2, c) in f2.terms {
                    let i = *target
                        .index
                        .get(&(im2.clone(), fm2))
                        .expect("delta stays inside the enlarged window");
                    m.set(i, j, c);
                }
            }
        }
        m
    };
    let mut entries = Vec::new();
    for k in 0..=max_inner_k {
        let mut dims_pair = [0usize; 2];
        for (si, parity) in [false, true].into_iter().enumerate() {
            let basis_k = bases.get(&(k, parity)).unwrap_or(&empty);
            if basis_k.len() == 0 {
                continue;
            }
            let basis_kp1 = bases.get(&(k + 1, !parity)).unwrap_or(&empty);
            let d_k = matrix_for(k, parity);
            let d_kp1 = matrix_for(k + 1, !parity);
            let (dim, _, _) = sector_homology(basis_k, basis_kp1, &d_k, &d_kp1);
            dims_pair[si] = dim;
        }
        entries.push(DegreeEntry {
            degree: dims.p as i64 - k as i64,
            even: dims_pair[0],
            odd: dims_pair[1],
        });
    }
    entries.sort_by_key(|e| e.degree);
    CohomologyTable {
        side: "integral".into(),
        p: dims.p,
        q: dims.q,
        max_z: window.max_z,
        entries,
    }
}

/// Checks that the degree-zero homology is spanned by `s_0`: `s_0` is a
/// cycle, is not a boundary, and together with the boundaries spans the
/// in-window cycles.
pub fn integral_h0_generated_by_s0(window: &TruncationWindow) -> bool {
    let dims = window.dims;
    let phi = berezin::phi_parity(dims);
    let s0 = berezin::s0(dims);
    if !berezin::integral_delta(&s0).is_zero() {
        return false;
    }
    let k = dims.p as u32;
    let parity = phi ^ (dims.p % 2 == 1) ^ (dims.q % 2 == 1);
    // rebuild the sector containing s0, over the enlarged window
    let mut basis = SectorBasis::new();
    for im in polyfields::enumerate_monomials(dims, window.max_z + 1) {
        if im.poly_degree() != k {
            continue;
        }
        for fm in superpoly::enumerate_monomials(dims, window.max_z + 1) {
            if phi ^ im.is_odd() ^ fm.is_odd() != parity {
                continue;
            }
            basis.push((im.clone(), fm.clone()), fm.even_degree() <= window.max_z);
        }
    }
    let mut basis_kp1 = SectorBasis::new();
    for im in polyfields::enumerate_monomials(dims, window.max_z + 1) {
        if im.poly_degree() != k + 1 {
            continue;
        }
        for fm in superpoly::enumerate_monomials(dims, window.max_z + 1) {
            if phi ^ im.is_odd() ^ fm.is_odd() != !parity {
                continue;
            }
            basis_kp1.push((im.clone(), fm.clone()), true);
        }
    }
    let mut d_kp1 = QMatrix::zero(basis.len(), basis_kp1.len());
    for (j, (im, fm)) in basis_kp1.keys.iter().enumerate() {
        let s = IntegralForm::new(dims, SuperPoly::monomial(dims, fm.clone(), scalar::one()), im.clone());
        for (im2, f2) in berezin::integral_delta(&s).terms {
            for (fm2, c) in f2.terms {
                if let Some(&i) = basis.index.get(&(im2.clone(), fm2)) {
                    d_kp1.set(i, j, c);
                }
            }
        }
    }
    let boundaries = Subspace::full(basis_kp1.len().max(1)).image(&d_kp1);
    // coordinates of s0
    let (im0, f0) = s0.terms.iter().next().unwrap();
    let fm0 = f0.terms.keys().next().unwrap();
    let idx = basis.index[&(im0.clone(), fm0.clone())];
    let mut v = vec![scalar::zero(); basis.len()];
    v[idx] = scalar::one();
    !boundaries.contains(&v)
}

/// Truncated de Rham cohomology (form degrees up to `max_form`), computed
/// the same way with the scaling homotopy supplying the window enlargement.
pub fn de_rham_cohomology(window: &TruncationWindow, max_form: u32) -> CohomologyTable {
    let dims = window.dims;
    let mut bases: BTreeMap<(u32, bool), SectorBasis<(FormMonomial, SuperMonomial)>> =
        BTreeMap::new();
    for m in crate::forms::enumerate_monomials(dims, max_form) {
        if m.form_degree() > max_form {
            continue;
        }
        for fm in superpoly::enumerate_monomials(dims, window.max_z + 1) {
            let parity = m.is_odd() ^ fm.is_odd();
            let inner = fm.even_degree() <= window.max_z;
            bases
                .entry((m.form_degree(), parity))
                .or_insert_with(SectorBasis::new)
                .push((m.clone(), fm.clone()), inner);
        }
    }
    let empty = SectorBasis::new();
    let matrix_for = |k: u32, parity: bool| -> QMatrix {
        // d: degree k -> k+1 flips parity
        let source = bases.get(&(k, parity)).unwrap_or(&empty);
        let target = bases.get(&(k + 1, !parity)).unwrap_or(&empty);
        let mut m = QMatrix::zero(target.len(), source.len());
        for (j, (mono, fm)) in source.keys.iter().enumerate() {
            let mut omega = FormElem::zero(dims);
            omega.add_term(mono.clone(), SuperPoly::monomial(dims, fm.clone(), scalar::one()));
            for (m2, f2) in omega.exterior_d().terms {
                if m2.form_degree() > max_form {
                    continue;
                }
                for (fm2, c) in f2.terms {
                    let i = *target
                        .index
                        .get(&(m2.clone(), fm2))
                        .expect("d stays inside the window");
                    m.set(i, j, c);
                }
            }
        }
        m
    };
    let mut entries = Vec::new();
    for k in 0..max_form {
        let mut dims_pair = [0usize; 2];
        for (si, parity) in [false, true].into_iter().enumerate() {
            let basis_k = bases.get(&(k, parity)).unwrap_or(&empty);
            if basis_k.len() == 0 {
                continue;
            }
            // kernel of d_k on the inner window
            let d_k = matrix_for(k, parity);
            let inner_k = basis_k.inner_subspace();
            let kernel = if d_k.rows == 0 {
                inner_k.clone()
            } else {
                inner_k.preimage_in(&d_k, &Subspace::zero(d_k.rows))
            };
            // boundaries from degree k-1 (enlarged window)
            let boundaries_all = if k == 0 {
                Subspace::zero(basis_k.len())
            } else {
                let d_km1 = matrix_for(k - 1, !parity);
                let source_len = bases
                    .get(&(k - 1, !parity))
                    .map(|b| b.len())
                    .unwrap_or(0);
                if source_len == 0 {
                    Subspace::zero(basis_k.len())
                } else {
                    Subspace::full(source_len).image(&d_km1)
                }
            };
            let boundaries =
                boundaries_all.preimage_in(&QMatrix::identity(basis_k.len()), &inner_k);
            dims_pair[si] = kernel.dim() - intersect_dim(&kernel, &boundaries);
        }
        entries.push(DegreeEntry {
            degree: k as i64,
            even: dims_pair[0],
            odd: dims_pair[1],
        });
    }
    CohomologyTable {
        side: "deRham".into(),
        p: dims.p,
        q: dims.q,
        max_z: window.max_z,
        entries,
    }
}
