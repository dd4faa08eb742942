//! Exact spectral sequences of bounded double complexes of super vector
//! spaces, computed from the column filtration of the total complex with
//! rational linear algebra, plus the super-elliptic-curve fixture
//! reproducing the Hodge-to-de-Rham page-two table.

use std::collections::BTreeMap;

use num::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::coord::{Dims, Var};
use crate::forms::{FormElem, FormMonomial};
use crate::linalg::{QMatrix, Subspace};
use crate::scalar::{self, Scalar};
use crate::superpoly::{SuperMonomial, SuperPoly};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpecSeqError {
    #[error("ill-formed: {0}")]
    IllFormed(String),
}

/// A finite-dimensional super vector space with optional basis labels.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SuperVS {
    pub even: usize,
    pub odd: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub even_labels: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub odd_labels: Vec<String>,
}

impl SuperVS {
    pub fn new(even: usize, odd: usize) -> Self {
        SuperVS {
            even,
            odd,
            even_labels: Vec::new(),
            odd_labels: Vec::new(),
        }
    }

    pub fn labeled(even_labels: Vec<String>, odd_labels: Vec<String>) -> Self {
        SuperVS {
            even: even_labels.len(),
            odd: odd_labels.len(),
            even_labels,
            odd_labels,
        }
    }

    pub fn total(&self) -> usize {
        self.even + self.odd
    }

    pub fn is_zero(&self) -> bool {
        self.total() == 0
    }
}

/// A parity-homogeneous linear map between graded spaces, stored over the
/// concatenated basis (even block first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap {
    /// `true` for an odd map (exchanges parity blocks).
    pub odd: bool,
    pub matrix: QMatrix,
}

impl GradedMap {
    pub fn zero(odd: bool, target: &SuperVS, source: &SuperVS) -> Self {
        GradedMap {
            odd,
            matrix: QMatrix::zero(target.total(), source.total()),
        }
    }

    /// Verifies that the matrix respects the declared parity.
    pub fn check_parity(&self, target: &SuperVS, source: &SuperVS) -> Result<(), SpecSeqError> {
        for i in 0..self.matrix.rows {
            for j in 0..self.matrix.cols {
                if self.matrix.get(i, j).is_zero() {
                    continue;
                }
                let row_odd = i >= target.even;
                let col_odd = j >= source.even;
                let expect_flip = self.odd;
                if (row_odd != col_odd) != expect_flip {
                    return Err(SpecSeqError::IllFormed(format!(
                        "map entry ({i},{j}) violates parity"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn scale(&self, c: &Scalar) -> GradedMap {
        let mut m = self.matrix.clone();
        for v in m.data.iter_mut() {
            *v = &*v * c;
        }
        GradedMap {
            odd: self.odd,
            matrix: m,
        }
    }
}

/// A bounded double complex of super vector spaces. `horiz` maps
/// `(p,q) -> (p+1,q)`, `vert` maps `(p,q) -> (p,q+1)`. When `anticommute`
/// is false the assembly twists the vertical maps by `(-1)^p`.
#[derive(Clone, Debug, Default)]
pub struct DoubleComplexFD {
    pub objects: BTreeMap<(i64, i64), SuperVS>,
    pub horiz: BTreeMap<(i64, i64), GradedMap>,
    pub vert: BTreeMap<(i64, i64), GradedMap>,
    pub anticommute: bool,
}

impl DoubleComplexFD {
    pub fn object(&self, key: (i64, i64)) -> SuperVS {
        self.objects.get(&key).cloned().unwrap_or_default()
    }

    /// Checks squares and (anti)commutation of the raw data.
    pub fn validate(&self) -> Result<(), SpecSeqError> {
        for (&(p, q), m) in &self.horiz {
            m.check_parity(&self.object((p + 1, q)), &self.object((p, q)))?;
            if let Some(n) = self.horiz.get(&(p + 1, q)) {
                if !n.matrix.mul(&m.matrix).data.iter().all(|c| c.is_zero()) {
                    return Err(SpecSeqError::IllFormed(format!(
                        "horizontal square at ({p},{q}) is nonzero"
                    )));
                }
            }
        }
        for (&(p, q), m) in &self.vert {
            m.check_parity(&self.object((p, q + 1)), &self.object((p, q)))?;
            if let Some(n) = self.vert.get(&(p, q + 1)) {
                if !n.matrix.mul(&m.matrix).data.iter().all(|c| c.is_zero()) {
                    return Err(SpecSeqError::IllFormed(format!(
                        "vertical square at ({p},{q}) is nonzero"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Swaps rows and columns (for the other filtration).
    pub fn transpose(&self) -> DoubleComplexFD {
        DoubleComplexFD {
            objects: self
                .objects
                .iter()
                .map(|(&(p, q), v)| ((q, p), v.clone()))
                .collect(),
            horiz: self
                .vert
                .iter()
                .map(|(&(p, q), m)| ((q, p), m.clone()))
                .collect(),
            vert: self
                .horiz
                .iter()
                .map(|(&(p, q), m)| ((q, p), m.clone()))
                .collect(),
            anticommute: self.anticommute,
        }
    }
}

/// Basis entry of the total complex: object bidegree, parity within the
/// object, local index and label.
#[derive(Clone, Debug)]
struct TotalEntry {
    p: i64,
    q: i64,
    odd: bool,
    local: usize,
    label: String,
}

/// The filtered total complex of a double complex, with everything needed
/// to evaluate the page formulas exactly. Filtration is by columns `p`.
#[derive(Clone, Debug)]
pub struct SpectralSequence {
    /// per (total degree, sector parity): basis entries
    bases: BTreeMap<(i64, bool), Vec<TotalEntry>>,
    /// per (total degree, sector parity): the total differential into
    /// `(n+1, flipped-or-same sector)`
    diffs: BTreeMap<(i64, bool), QMatrix>,
    /// parity of the total differential
    d_odd: bool,
}

impl SpectralSequence {
    pub fn new(dc: &DoubleComplexFD) -> Result<Self, SpecSeqError> {
        dc.validate()?;
        let d_odd = dc
            .horiz
            .values()
            .chain(dc.vert.values())
            .map(|m| m.odd)
            .next()
            .unwrap_or(true);
        if dc
            .horiz
            .values()
            .chain(dc.vert.values())
            .any(|m| m.odd != d_odd)
        {
            return Err(SpecSeqError::IllFormed(
                "mixed differential parities".into(),
            ));
        }
        let mut bases: BTreeMap<(i64, bool), Vec<TotalEntry>> = BTreeMap::new();
        for (&(p, q), vs) in &dc.objects {
            let n = p + q;
            for (odd, count, labels) in [
                (false, vs.even, &vs.even_labels),
                (true, vs.odd, &vs.odd_labels),
            ] {
                for local in 0..count {
                    let label = labels.get(local).cloned().unwrap_or_default();
                    bases.entry((n, odd)).or_default().push(TotalEntry {
                        p,
                        q,
                        odd,
                        local,
                        label,
                    });
                }
            }
        }
        for v in bases.values_mut() {
            v.sort_by_key(|e| (e.p, e.q, e.odd, e.local));
        }
        // position lookup
        let pos = |bases: &BTreeMap<(i64, bool), Vec<TotalEntry>>,
                   n: i64,
                   p: i64,
                   q: i64,
                   odd: bool,
                   local: usize|
         -> Option<usize> {
            bases.get(&(n, odd))?.iter().position(|e| {
                e.p == p && e.q == q && e.odd == odd && e.local == local
            })
        };
        let mut diffs = BTreeMap::new();
        let keys: Vec<(i64, bool)> = bases.keys().cloned().collect();
        for &(n, sector) in &keys {
            let source = &bases[&(n, sector)];
            let target_sector = sector ^ d_odd;
            let target_len = bases
                .get(&(n + 1, target_sector))
                .map(|v| v.len())
                .unwrap_or(0);
            let mut m = QMatrix::zero(target_len, source.len());
            for (j, e) in source.iter().enumerate() {
                let src_vs = dc.object((e.p, e.q));
                let col = if e.odd { src_vs.even + e.local } else { e.local };
                // horizontal component
                if let Some(gm) = dc.horiz.get(&(e.p, e.q)) {
                    let tgt_vs = dc.object((e.p + 1, e.q));
                    for row in 0..gm.matrix.rows {
                        let c = gm.matrix.get(row, col);
                        if c.is_zero() {
                            continue;
                        }
                        let (odd, local) = if row < tgt_vs.even {
                            (false, row)
                        } else {
                            (true, row - tgt_vs.even)
                        };
                        let i = pos(&bases, n + 1, e.p + 1, e.q, odd, local)
                            .expect("target entry exists");
                        m.set(i, j, m.get(i, j) + c);
                    }
                }
                // vertical component, twisted when the squares commute
                if let Some(gm) = dc.vert.get(&(e.p, e.q)) {
                    let tgt_vs = dc.object((e.p, e.q + 1));
                    let twist = !dc.anticommute && e.p.rem_euclid(2) == 1;
                    for row in 0..gm.matrix.rows {
                        let c = gm.matrix.get(row, col);
                        if c.is_zero() {
                            continue;
                        }
                        let c = if twist { -c.clone() } else { c.clone() };
                        let (odd, local) = if row < tgt_vs.even {
                            (false, row)
                        } else {
                            (true, row - tgt_vs.even)
                        };
                        let i = pos(&bases, n + 1, e.p, e.q + 1, odd, local)
                            .expect("target entry exists");
                        m.set(i, j, m.get(i, j) + c);
                    }
                }
            }
            diffs.insert((n, sector), m);
        }
        let ss = SpectralSequence { bases, diffs, d_odd };
        // the assembled total differential must square to zero
        for &(n, sector) in &keys {
            let d1 = &ss.diffs[&(n, sector)];
            if let Some(d2) = ss.diffs.get(&(n + 1, sector ^ d_odd)) {
                if d1.rows == d2.cols && !d2.mul(d1).data.iter().all(|c| c.is_zero()) {
                    return Err(SpecSeqError::IllFormed(format!(
                        "total differential does not square to zero at degree {n}"
                    )));
                }
            }
        }
        Ok(ss)
    }

    fn sector_len(&self, n: i64, sector: bool) -> usize {
        self.bases.get(&(n, sector)).map(|v| v.len()).unwrap_or(0)
    }

    fn d_matrix(&self, n: i64, sector: bool) -> QMatrix {
        self.diffs
            .get(&(n, sector))
            .cloned()
            .unwrap_or_else(|| QMatrix::zero(self.sector_len(n + 1, sector ^ self.d_odd), 0))
    }

    /// Coordinate subspace of filtration at least `p`.
    fn filtration(&self, n: i64, sector: bool, p: i64) -> Subspace {
        let len = self.sector_len(n, sector);
        let Some(basis) = self.bases.get(&(n, sector)) else {
            return Subspace::zero(len.max(1));
        };
        let vectors: Vec<Vec<Scalar>> = basis
            .iter()
            .enumerate()
            .filter(|(_, e)| e.p >= p)
            .map(|(i, _)| {
                let mut v = vec![scalar::zero(); len];
                v[i] = scalar::one();
                v
            })
            .collect();
        Subspace::span(len.max(1), &vectors)
    }

    /// `Z_r^{p,q} = F_p T^n  intersect  d^{-1} F_{p+r} T^{n+1}` per sector.
    fn z_space(&self, p: i64, q: i64, r: i64, sector: bool) -> Subspace {
        let n = p + q;
        let fp = self.filtration(n, sector, p);
        let d = self.d_matrix(n, sector);
        if d.rows == 0 {
            return fp;
        }
        let target = self.filtration(n + 1, sector ^ self.d_odd, p + r);
        fp.preimage_in(&d, &target)
    }

    /// Numerator and denominator of `E_r^{p,q}` in one sector.
    fn page_spaces(&self, p: i64, q: i64, r: i64, sector: bool) -> (Subspace, Subspace) {
        let n = p + q;
        let z = self.z_space(p, q, r, sector);
        let z_higher = self.z_space(p + 1, q - 1, r - 1, sector);
        // d Z_{r-1}^{p-r+1, q+r-2}
        let prev = self.z_space(p - r + 1, q + r - 2, r - 1, sector ^ self.d_odd);
        let d_prev = if self.sector_len(n - 1, sector ^ self.d_odd) == 0 {
            Subspace::zero(self.sector_len(n, sector).max(1))
        } else {
            prev.image(&self.d_matrix(n - 1, sector ^ self.d_odd))
        };
        let denom = z_higher.sum(&d_prev);
        (z, denom)
    }

    /// Computes page `r >= 1` with representative labels and differential
    /// ranks; checks the induced maps are well defined.
    pub fn page(&self, r: i64) -> Result<SpectralPage, SpecSeqError> {
        assert!(r >= 1);
        let bidegrees: Vec<(i64, i64)> = {
            let mut v: Vec<(i64, i64)> = self
                .bases
                .values()
                .flatten()
                .map(|e| (e.p, e.q))
                .collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        let mut entries = BTreeMap::new();
        let mut spaces: BTreeMap<(i64, i64, bool), (Subspace, Subspace)> = BTreeMap::new();
        for &(p, q) in &bidegrees {
            for sector in [false, true] {
                spaces.insert((p, q, sector), self.page_spaces(p, q, r, sector));
            }
        }
        // also spaces at differential targets outside the object support
        for &(p, q) in &bidegrees {
            let key = (p + r, q - r + 1);
            for sector in [false, true] {
                spaces
                    .entry((key.0, key.1, sector))
                    .or_insert_with(|| self.page_spaces(key.0, key.1, r, sector));
            }
        }
        for &(p, q) in &bidegrees {
            let mut even = 0;
            let mut odd = 0;
            let mut even_labels = Vec::new();
            let mut odd_labels = Vec::new();
            for sector in [false, true] {
                let (z, denom) = &spaces[&(p, q, sector)];
                let reps = z.quotient_representatives(denom);
                // labels resolve only when a representative is supported on a
                // single basis vector of this object
                let n = p + q;
                let basis = self.bases.get(&(n, sector));
                let mut labels = Vec::new();
                for rep in &reps {
                    let nonzero: Vec<usize> = rep
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| !c.is_zero())
                        .map(|(i, _)| i)
                        .collect();
                    let label = if nonzero.len() == 1 {
                        basis
                            .and_then(|b| b.get(nonzero[0]))
                            .map(|e| e.label.clone())
                            .unwrap_or_default()
                    } else {
                        String::new()
                    };
                    labels.push(label);
                }
                // a rep's parity equals the sector, but the object-level
                // parity at (p,q) is the entry parity itself
                let count = reps.len();
                if !sector {
                    even = count;
                    even_labels = labels;
                } else {
                    odd = count;
                    odd_labels = labels;
                }
            }
            if even + odd > 0 {
                entries.insert(
                    (p, q),
                    SuperVS {
                        even,
                        odd,
                        even_labels,
                        odd_labels,
                    },
                );
            }
        }
        // induced differentials
        let mut diffs = BTreeMap::new();
        for &(p, q) in &bidegrees {
            let n = p + q;
            let mut ranks = DiffRanks::default();
            let mut any = false;
            for sector in [false, true] {
                let (z, denom) = &spaces[&(p, q, sector)];
                if z.dim() == 0 {
                    continue;
                }
                let d = self.d_matrix(n, sector);
                if d.rows == 0 {
                    continue;
                }
                let t_sector = sector ^ self.d_odd;
                let (tz, tdenom) = &spaces[&(p + r, q - r + 1, t_sector)];
                // well-definedness: d(denominator) inside target denominator
                for b in &denom.basis {
                    let image = d.mul_vec(b);
                    if !tdenom.contains(&image) {
                        return Err(SpecSeqError::IllFormed(format!(
                            "induced differential not well defined at ({p},{q})"
                        )));
                    }
                }
                // rank of the induced map
                let dz = z.image(&d);
                for b in &dz.basis {
                    if !tz.contains(b) {
                        return Err(SpecSeqError::IllFormed(format!(
                            "differential leaves the cycle space at ({p},{q})"
                        )));
                    }
                }
                let rank = dz.sum(tdenom).dim() - tdenom.dim();
                if sector == false {
                    ranks.from_even = rank;
                } else {
                    ranks.from_odd = rank;
                }
                any = any || rank > 0 || z.dim() > denom.dim();
            }
            if any {
                diffs.insert((p, q), ranks);
            }
        }
        Ok(SpectralPage {
            r,
            entries,
            diffs,
            backing: Some(Box::new(self.clone())),
        })
    }
}

/// Per-sector ranks of an induced differential out of one bidegree.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DiffRanks {
    pub from_even: usize,
    pub from_odd: usize,
}

impl DiffRanks {
    pub fn total(&self) -> usize {
        self.from_even + self.from_odd
    }
}

/// One page of a spectral sequence: objects, differential ranks of
/// `d_r : (p,q) -> (p+r, q-r+1)`, and (when built from a double complex)
/// the backing filtered complex that lets the next page be induced.
#[derive(Clone, Debug)]
pub struct SpectralPage {
    pub r: i64,
    pub entries: BTreeMap<(i64, i64), SuperVS>,
    pub diffs: BTreeMap<(i64, i64), DiffRanks>,
    backing: Option<Box<SpectralSequence>>,
}

impl SpectralPage {
    /// A standalone page (no backing complex).
    pub fn standalone(
        r: i64,
        entries: BTreeMap<(i64, i64), SuperVS>,
        diffs: BTreeMap<(i64, i64), DiffRanks>,
    ) -> Self {
        SpectralPage {
            r,
            entries,
            diffs,
            backing: None,
        }
    }

    pub fn dim(&self, p: i64, q: i64) -> (usize, usize) {
        self.entries
            .get(&(p, q))
            .map(|v| (v.even, v.odd))
            .unwrap_or((0, 0))
    }

    /// Alternating sum of total dimensions over the total degree; equal on
    /// consecutive pages.
    pub fn euler_characteristic(&self) -> i64 {
        let mut acc = 0i64;
        for (&(p, q), v) in &self.entries {
            let sign = if (p + q).rem_euclid(2) == 0 { 1 } else { -1 };
            acc += sign * v.total() as i64;
        }
        acc
    }

    /// Homology with respect to `d_r`. With a backing complex the new
    /// differential is induced on representatives (and checked); a
    /// standalone page requires every candidate `d_{r+1}` to vanish by
    /// dimension count.
    pub fn next_page(&self) -> Result<SpectralPage, SpecSeqError> {
        if let Some(ss) = &self.backing {
            return ss.page(self.r + 1);
        }
        // dimension arithmetic: E' = ker/im per sector
        let r = self.r;
        let mut entries: BTreeMap<(i64, i64), SuperVS> = BTreeMap::new();
        for (&(p, q), vs) in &self.entries {
            let out = self.diffs.get(&(p, q)).copied().unwrap_or_default();
            let inc = self
                .diffs
                .get(&(p - r, q + r - 1))
                .copied()
                .unwrap_or_default();
            // d_r is odd: images from even sources land in odd targets
            let even = vs
                .even
                .checked_sub(out.from_even + inc.from_odd)
                .ok_or_else(|| {
                    SpecSeqError::IllFormed(format!("negative dimension at ({p},{q})"))
                })?;
            let odd = vs
                .odd
                .checked_sub(out.from_odd + inc.from_even)
                .ok_or_else(|| {
                    SpecSeqError::IllFormed(format!("negative dimension at ({p},{q})"))
                })?;
            if even + odd > 0 {
                entries.insert((p, q), SuperVS::new(even, odd));
            }
        }
        // the next differential must be forced to vanish
        for (&(p, q), _) in &entries {
            let target = (p + r + 1, q - r);
            if entries.get(&target).map(|v| !v.is_zero()).unwrap_or(false) {
                return Err(SpecSeqError::IllFormed(format!(
                    "cannot induce d_{} from page data alone: ({p},{q}) -> {target:?} \
                     has nonzero ends",
                    r + 1
                )));
            }
        }
        Ok(SpectralPage::standalone(r + 1, entries, BTreeMap::new()))
    }
}

// ---------------------------------------------------------------------------
// JSON output

#[derive(Serialize)]
pub struct EntryJson {
    pub p: i64,
    pub q: i64,
    #[serde(rename = "evenDim")]
    pub even_dim: usize,
    #[serde(rename = "oddDim")]
    pub odd_dim: usize,
    pub labels: Vec<String>,
}

#[derive(Serialize)]
pub struct DiffJson {
    pub from: [i64; 2],
    pub to: [i64; 2],
    pub rank: usize,
}

#[derive(Serialize)]
pub struct PageJson {
    pub page: i64,
    pub entries: Vec<EntryJson>,
    pub differentials: Vec<DiffJson>,
}

impl SpectralPage {
    pub fn to_json(&self) -> PageJson {
        PageJson {
            page: self.r,
            entries: self
                .entries
                .iter()
                .map(|(&(p, q), v)| EntryJson {
                    p,
                    q,
                    even_dim: v.even,
                    odd_dim: v.odd,
                    labels: v
                        .even_labels
                        .iter()
                        .chain(v.odd_labels.iter())
                        .cloned()
                        .collect(),
                })
                .collect(),
            differentials: self
                .diffs
                .iter()
                .filter(|(_, ranks)| ranks.total() > 0)
                .map(|(&(p, q), ranks)| DiffJson {
                    from: [p, q],
                    to: [p + self.r, q - self.r + 1],
                    rank: ranks.total(),
                })
                .collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// the super-elliptic-curve fixture

/// Sheaf-cohomology generator of the fixture: a global form representative
/// together with its printed label and parity.
struct SeGenerator {
    label: String,
    odd: bool,
    rep: FormElem,
}

fn se_generators(dims: Dims, column: usize, q_row: usize) -> Vec<SeGenerator> {
    let theta = SuperPoly::var(dims, Var::Theta(0));
    let one = SuperPoly::one(dims);
    let mono = |dth: u8, dz: bool| -> FormMonomial {
        let mut m = FormMonomial::unit(dims);
        m.dth[0] = dth;
        if dz {
            m.dz = 1;
        }
        m
    };
    let elem = |m: FormMonomial, c: &SuperPoly| -> FormElem {
        let mut e = FormElem::zero(dims);
        e.add_term(m, c.clone());
        e
    };
    let dth_label = |i: usize| -> String {
        match i {
            0 => String::new(),
            1 => "dth".to_string(),
            _ => format!("dth^{i}"),
        }
    };
    let compose_label = |parts: &[&str]| -> String {
        let joined: Vec<&str> = parts.iter().copied().filter(|s| !s.is_empty()).collect();
        if joined.is_empty() {
            "1".to_string()
        } else {
            joined.join(" ")
        }
    };
    let mut gens = Vec::new();
    if column == 0 {
        gens.push(SeGenerator {
            label: "1".into(),
            odd: false,
            rep: elem(mono(0, false), &one),
        });
        gens.push(SeGenerator {
            label: "th".into(),
            odd: true,
            rep: elem(mono(0, false), &theta),
        });
    } else {
        let i = column;
        gens.push(SeGenerator {
            label: compose_label(&[&dth_label(i)]),
            odd: false,
            rep: elem(mono(i as u8, false), &one),
        });
        gens.push(SeGenerator {
            label: compose_label(&["th dz", &dth_label(i - 1)]),
            odd: false,
            rep: elem(mono(i as u8 - 1, true), &theta),
        });
        gens.push(SeGenerator {
            label: compose_label(&["dz", &dth_label(i - 1)]),
            odd: true,
            rep: elem(mono(i as u8 - 1, true), &one),
        });
        gens.push(SeGenerator {
            label: compose_label(&["th", &dth_label(i)]),
            odd: true,
            rep: elem(mono(i as u8, false), &theta),
        });
    }
    if q_row == 1 {
        // multiply every generator on the right by the closed odd constant
        // dz-bar of the reduced curve: labels gain the suffix, parities flip,
        // the induced differential matrix is unchanged.
        for g in &mut gens {
            g.odd = !g.odd;
            g.label = if g.label == "1" {
                "dz̄".to_string()
            } else {
                format!("{} dz̄", g.label)
            };
        }
    }
    gens
}

/// Builds the page-one row `q_row` of the Hodge-to-de-Rham spectral
/// sequence of the super elliptic curve as a one-row double complex with
/// `K+1` columns; the `d_1` matrices are synthesized by applying the
/// exterior derivative to the generator representatives.
pub fn build_super_elliptic(k: usize, q_row: usize) -> DoubleComplexFD {
    assert!(k >= 2, "need at least two columns");
    assert!(q_row <= 1);
    let dims = Dims::new(1, 1);
    let mut dc = DoubleComplexFD {
        anticommute: true,
        ..Default::default()
    };
    let columns: Vec<Vec<SeGenerator>> =
        (0..=k).map(|i| se_generators(dims, i, q_row)).collect();
    for (i, gens) in columns.iter().enumerate() {
        let even_labels: Vec<String> = gens
            .iter()
            .filter(|g| !g.odd)
            .map(|g| g.label.clone())
            .collect();
        let odd_labels: Vec<String> = gens
            .iter()
            .filter(|g| g.odd)
            .map(|g| g.label.clone())
            .collect();
        dc.objects.insert(
            (i as i64, q_row as i64),
            SuperVS::labeled(even_labels, odd_labels),
        );
    }
    // index the target monomial expansions
    for i in 0..k {
        let source: Vec<&SeGenerator> = {
            let mut v: Vec<&SeGenerator> =
                columns[i].iter().filter(|g| !g.odd).collect();
            v.extend(columns[i].iter().filter(|g| g.odd));
            v
        };
        let target: Vec<&SeGenerator> = {
            let mut v: Vec<&SeGenerator> =
                columns[i + 1].iter().filter(|g| !g.odd).collect();
            v.extend(columns[i + 1].iter().filter(|g| g.odd));
            v
        };
        let target_even = columns[i + 1].iter().filter(|g| !g.odd).count();
        let mut index: BTreeMap<(FormMonomial, SuperMonomial), usize> = BTreeMap::new();
        for (ti, g) in target.iter().enumerate() {
            for (m, c) in &g.rep.terms {
                for (fm, _) in &c.terms {
                    index.insert((m.clone(), fm.clone()), ti);
                }
            }
        }
        let source_vs = dc.object((i as i64, q_row as i64));
        let target_vs = dc.object(((i + 1) as i64, q_row as i64));
        let mut m = QMatrix::zero(target_vs.total(), source_vs.total());
        for (j, g) in source.iter().enumerate() {
            // d(g dz-bar) = (dg) dz-bar: the matrix is the same for both rows
            let image = g.rep.exterior_d();
            for (fm, coeff) in &image.terms {
                for (sm, c) in &coeff.terms {
                    let ti = *index
                        .get(&(fm.clone(), sm.clone()))
                        .expect("image lies in the next column's generators");
                    m.set(ti, j, c.clone());
                }
            }
        }
        let _ = target_even;
        dc.horiz.insert(
            (i as i64, q_row as i64),
            GradedMap { odd: true, matrix: m },
        );
    }
    dc
}

/// The page-two table of the fixture over both rows: objects keyed
/// `(column, q_row)` with generator labels.
pub fn e2_table(k: usize) -> Result<BTreeMap<(i64, i64), SuperVS>, SpecSeqError> {
    assert!(k >= 4);
    let mut out = BTreeMap::new();
    for q_row in 0..=1usize {
        let dc = build_super_elliptic(k, q_row);
        let ss = SpectralSequence::new(&dc)?;
        let page2 = ss.page(2)?;
        for ((p, q), vs) in page2.entries {
            out.insert((p, q), vs);
        }
    }
    Ok(out)
}

/// `d_1` ranks per column of one fixture row.
pub fn se_d1_ranks(k: usize, q_row: usize) -> Result<Vec<usize>, SpecSeqError> {
    let dc = build_super_elliptic(k, q_row);
    let ss = SpectralSequence::new(&dc)?;
    let page1 = ss.page(1)?;
    Ok((0..k as i64)
        .map(|p| {
            page1
                .diffs
                .get(&(p, q_row as i64))
                .map(|r| r.total())
                .unwrap_or(0)
        })
        .collect())
}

/// Checks that every candidate `d_2` on the assembled table vanishes by
/// dimension count.
pub fn se_d2_vanishes(table: &BTreeMap<(i64, i64), SuperVS>) -> bool {
    table.iter().all(|(&(p, q), v)| {
        v.is_zero()
            || table
                .get(&(p + 2, q - 1))
                .map(|w| w.is_zero())
                .unwrap_or(true)
    })
}
