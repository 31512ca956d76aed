//! Generalized Gell-Mann basis of su(d) and its structure constants.
//!
//! Generators are ordered as the d(d−1)/2 symmetric off-diagonal matrices,
//! then the d(d−1)/2 antisymmetric off-diagonal matrices, then the d−1
//! diagonal matrices. Off-diagonal pairs (j, k), j < k, are enumerated in
//! lexicographic order. With this ordering d = 2 gives (σx, σy, σz).

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{trace_product, CMatrix};

/// Magnitude below which computed structure constants are stored as zero.
pub const STRUCTURE_ZERO_FLOOR: f64 = 1e-13;

/// Ordered traceless Hermitian basis with `Tr(σ_a σ_b) = 2 δ_ab`.
#[derive(Debug, Clone)]
pub struct SuBasis {
    dim: usize,
    generators: Vec<CMatrix>,
}

impl SuBasis {
    /// Builds the generalized Gell-Mann basis for `dim ≥ 2`.
    pub fn generate(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);

        let pairs: Vec<(usize, usize)> = (0..dim)
            .flat_map(|j| ((j + 1)..dim).map(move |k| (j, k)))
            .collect();

        let mut generators = Vec::with_capacity(dim * dim - 1);
        for &(j, k) in &pairs {
            let mut m = CMatrix::from_element(dim, dim, zero);
            m[(j, k)] = one;
            m[(k, j)] = one;
            generators.push(m);
        }
        for &(j, k) in &pairs {
            let mut m = CMatrix::from_element(dim, dim, zero);
            m[(j, k)] = -i;
            m[(k, j)] = i;
            generators.push(m);
        }
        for l in 1..dim {
            let lf = l as f64;
            let scale = (2.0 / (lf * (lf + 1.0))).sqrt();
            let mut m = CMatrix::from_element(dim, dim, zero);
            for jj in 0..l {
                m[(jj, jj)] = Complex64::new(scale, 0.0);
            }
            m[(l, l)] = Complex64::new(-lf * scale, 0.0);
            generators.push(m);
        }
        Ok(Self { dim, generators })
    }

    /// Wraps arbitrary generators. Only shapes are checked; use
    /// [`verify_basis_relations`] to test the algebraic relations.
    pub fn from_generators(dim: usize, generators: Vec<CMatrix>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        if generators.len() != dim * dim - 1 {
            return Err(Error::DimensionMismatch {
                expected: dim * dim - 1,
                found: generators.len(),
            });
        }
        for g in &generators {
            if g.nrows() != dim || g.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: g.nrows().max(g.ncols()),
                });
            }
        }
        Ok(Self { dim, generators })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of generators, d² − 1.
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    pub fn generator(&self, a: usize) -> &CMatrix {
        &self.generators[a]
    }

    /// `Σ_a c_a σ_a` for real coefficients.
    pub fn combine(&self, coeffs: &[f64]) -> Result<CMatrix> {
        if coeffs.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: coeffs.len(),
            });
        }
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (c, g) in coeffs.iter().zip(&self.generators) {
            if *c != 0.0 {
                m += g.map(|z| z * *c);
            }
        }
        Ok(m)
    }

    /// `Tr(M σ_a) / 2` for each generator: the real coordinates of the
    /// traceless Hermitian part of `m`.
    pub fn coordinates(&self, m: &CMatrix) -> Result<Vec<f64>> {
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: m.nrows(),
            });
        }
        Ok(self
            .generators
            .iter()
            .map(|g| trace_product(m, g).re / 2.0)
            .collect())
    }
}

/// One stored constant: 0-based sorted indices `a ≤ b ≤ c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureEntry {
    pub indices: [usize; 3],
    pub d: f64,
    pub f: f64,
}

/// Totally symmetric `d_abc` and totally antisymmetric `f_abc`, stored
/// sparsely by sorted index triple.
#[derive(Debug, Clone)]
pub struct StructureConstants {
    dim: usize,
    entries: BTreeMap<[usize; 3], (f64, f64)>,
    /// All index orderings (a, b, c) with nonzero d_abc, for contractions.
    d_expanded: Vec<(usize, usize, usize, f64)>,
}

/// Sorts a triple and returns the permutation parity (+1 even, −1 odd).
fn sort_triple(mut t: [usize; 3]) -> ([usize; 3], f64) {
    let mut sign = 1.0;
    for i in 0..2 {
        for j in 0..(2 - i) {
            if t[j] > t[j + 1] {
                t.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    (t, sign)
}

impl StructureConstants {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `d_abc` for any index order (0-based).
    pub fn d(&self, a: usize, b: usize, c: usize) -> f64 {
        let (key, _) = sort_triple([a, b, c]);
        self.entries.get(&key).map_or(0.0, |e| e.0)
    }

    /// `f_abc` for any index order (0-based), with the permutation sign.
    pub fn f(&self, a: usize, b: usize, c: usize) -> f64 {
        let (key, sign) = sort_triple([a, b, c]);
        self.entries.get(&key).map_or(0.0, |e| sign * e.1)
    }

    /// Stored nonzero entries in sorted-key order.
    pub fn entries(&self) -> impl Iterator<Item = StructureEntry> + '_ {
        self.entries
            .iter()
            .map(|(k, &(d, f))| StructureEntry { indices: *k, d, f })
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Every ordered (a, b, c) with nonzero d_abc.
    pub fn d_terms(&self) -> &[(usize, usize, usize, f64)] {
        &self.d_expanded
    }

    /// Rebuilds constants from sparse entries keyed by sorted triples.
    pub fn from_entries(dim: usize, entries: impl IntoIterator<Item = StructureEntry>) -> Self {
        let mut map = BTreeMap::new();
        for e in entries {
            let (key, sign) = sort_triple(e.indices);
            map.insert(key, (e.d, sign * e.f));
        }
        Self::from_map(dim, map)
    }

    fn from_map(dim: usize, entries: BTreeMap<[usize; 3], (f64, f64)>) -> Self {
        let mut d_expanded = Vec::new();
        for (k, &(d, _)) in &entries {
            if d == 0.0 {
                continue;
            }
            let [a, b, c] = *k;
            let mut perms = vec![
                (a, b, c),
                (a, c, b),
                (b, a, c),
                (b, c, a),
                (c, a, b),
                (c, b, a),
            ];
            perms.sort_unstable();
            perms.dedup();
            d_expanded.extend(perms.into_iter().map(|(x, y, z)| (x, y, z, d)));
        }
        Self {
            dim,
            entries,
            d_expanded,
        }
    }
}

/// `d_abc = Re Tr(σ_a σ_b σ_c) / 2`, `f_abc = Im Tr(σ_a σ_b σ_c) / 2`.
pub fn structure_constants(basis: &SuBasis) -> StructureConstants {
    let n = basis.len();
    let g = basis.generators();
    let mut entries = BTreeMap::new();
    for a in 0..n {
        for b in a..n {
            let ab = &g[a] * &g[b];
            for c in b..n {
                let t = trace_product(&ab, &g[c]);
                let mut d = t.re / 2.0;
                let mut f = t.im / 2.0;
                if d.abs() < STRUCTURE_ZERO_FLOOR {
                    d = 0.0;
                }
                if f.abs() < STRUCTURE_ZERO_FLOOR {
                    f = 0.0;
                }
                if d != 0.0 || f != 0.0 {
                    entries.insert([a, b, c], (d, f));
                }
            }
        }
    }
    StructureConstants::from_map(basis.dim(), entries)
}

/// Maximum residuals of the commutator, anticommutator and Gram relations.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisReport {
    pub commutator_residual: f64,
    pub anticommutator_residual: f64,
    pub gram_residual: f64,
    /// 0-based (a, b) where the Gram residual is largest.
    pub worst_gram_pair: (usize, usize),
    pub tol: f64,
}

impl BasisReport {
    pub fn passed(&self) -> bool {
        self.commutator_residual <= self.tol
            && self.anticommutator_residual <= self.tol
            && self.gram_residual <= self.tol
    }
}

/// Checks `[σa,σb] = 2i f_abc σc`, `{σa,σb} = (4/d)δ_ab I + 2 d_abc σc` and
/// `Tr(σa σb) = 2δ_ab`. Relation residuals are Frobenius norms.
pub fn verify_basis_relations(
    basis: &SuBasis,
    sc: &StructureConstants,
    tol: f64,
) -> Result<BasisReport> {
    if basis.dim() != sc.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: sc.dim(),
        });
    }
    let dim = basis.dim();
    let n = basis.len();
    let g = basis.generators();
    let two_i = Complex64::new(0.0, 2.0);
    let identity = CMatrix::identity(dim, dim);

    let mut report = BasisReport {
        commutator_residual: 0.0,
        anticommutator_residual: 0.0,
        gram_residual: 0.0,
        worst_gram_pair: (0, 0),
        tol,
    };

    for a in 0..n {
        for b in a..n {
            let ab = &g[a] * &g[b];
            let ba = &g[b] * &g[a];
            let mut comm = &ab - &ba;
            let mut anti = &ab + &ba;
            if a == b {
                anti -= identity.map(|z| z * (4.0 / dim as f64));
            }
            for (c, gc) in g.iter().enumerate() {
                let f = sc.f(a, b, c);
                if f != 0.0 {
                    comm -= gc.map(|z| z * two_i * f);
                }
                let d = sc.d(a, b, c);
                if d != 0.0 {
                    anti -= gc.map(|z| z * (2.0 * d));
                }
            }
            report.commutator_residual = report.commutator_residual.max(comm.norm());
            report.anticommutator_residual = report.anticommutator_residual.max(anti.norm());

            let target = if a == b { 2.0 } else { 0.0 };
            let gram = (trace_product(&g[a], &g[b]) - Complex64::new(target, 0.0)).norm();
            if gram > report.gram_residual {
                report.gram_residual = gram;
                report.worst_gram_pair = (a, b);
            }
        }
    }
    Ok(report)
}
