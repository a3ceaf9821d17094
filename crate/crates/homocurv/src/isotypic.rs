//! Invariant irreducible decompositions of the reductive complement and the
//! coefficient tables derived from them.
//!
//! The splitter is randomized simultaneous block diagonalization: build the
//! matrices of the isotropy action on `m`, solve the linear commutation
//! system for a basis of the symmetric commutant, eigen-decompose a random
//! commutant element, and refine until every block's symmetric commutant is
//! scalar. A block with scalar symmetric commutant is irreducible, because
//! the orthogonal projector onto any proper invariant subspace would be a
//! nontrivial symmetric intertwiner.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::lie::{LieAlgebra, Subspace};
use crate::linalg;
use crate::{Error, Result, DEFAULT_TOL};

/// Ordered orthogonal decomposition of the reductive complement `m` into
/// invariant irreducible blocks, stored as an adapted orthonormal basis in
/// ambient coordinates.
#[derive(Debug, Clone)]
pub struct Decomposition {
    basis: DMatrix<f64>,
    block_dims: Vec<usize>,
    offsets: Vec<usize>,
    notes: Vec<String>,
    seed: Option<u64>,
    tol: f64,
}

impl Decomposition {
    /// Wrap an explicit adapted basis. The columns must be orthonormal and
    /// the block dimensions must sum to the column count.
    pub fn new(basis: DMatrix<f64>, block_dims: Vec<usize>) -> Result<Self> {
        let total: usize = block_dims.iter().sum();
        if total != basis.ncols() {
            return Err(Error::Invalid(format!(
                "block dims sum to {total} but the basis has {} columns",
                basis.ncols()
            )));
        }
        let gram = basis.transpose() * &basis;
        let id = DMatrix::<f64>::identity(total, total);
        if (gram - id).norm() > DEFAULT_TOL {
            return Err(Error::Invalid("adapted basis is not orthonormal".into()));
        }
        let offsets = offsets_of(&block_dims);
        Ok(Self { basis, block_dims, offsets, notes: Vec::new(), seed: None, tol: DEFAULT_TOL })
    }

    pub fn blocks(&self) -> usize {
        self.block_dims.len()
    }

    pub fn dim_m(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn block_dim(&self, i: usize) -> usize {
        self.block_dims[i]
    }

    /// Adapted-basis index range of block `i`.
    pub fn block_range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i] + self.block_dims[i]
    }

    /// Block index owning adapted-basis position `alpha`.
    pub fn block_of(&self, alpha: usize) -> usize {
        match self.offsets.binary_search(&alpha) {
            Ok(i) => i,
            Err(i) => i - 1,
        }
    }

    /// Adapted basis as ambient columns.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn basis_vector(&self, alpha: usize) -> DVector<f64> {
        self.basis.column(alpha).clone_owned()
    }

    /// The whole complement `m` as a subspace.
    pub fn m_subspace(&self) -> Subspace {
        Subspace::new_unchecked(self.basis.clone(), "m")
    }

    /// Span of the listed blocks as an ambient subspace.
    pub fn span_of_blocks(&self, blocks: &[usize], label: impl Into<String>) -> Subspace {
        let mut cols = Vec::new();
        for &b in blocks {
            for alpha in self.block_range(b) {
                cols.push(self.basis.column(alpha).clone_owned());
            }
        }
        Subspace::new_unchecked(linalg::from_columns(self.ambient_dim(), &cols), label)
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn to_json(&self) -> DecompositionJson {
        DecompositionJson {
            ambient_dim: self.ambient_dim(),
            basis_row_major: self.basis.transpose().as_slice().to_vec(),
            block_dims: self.block_dims.clone(),
            provenance: Provenance {
                seed: self.seed,
                tolerance: self.tol,
                notes: self.notes.clone(),
            },
        }
    }

    pub fn from_json(json: &DecompositionJson) -> Result<Self> {
        let n = json.ambient_dim;
        let m = json.basis_row_major.len() / n.max(1);
        if n * m != json.basis_row_major.len() {
            return Err(Error::Invalid("basis length is not a multiple of ambient_dim".into()));
        }
        let basis = DMatrix::from_row_slice(n, m, &json.basis_row_major);
        let mut dec = Self::new(basis, json.block_dims.clone())?;
        dec.seed = json.provenance.seed;
        dec.tol = json.provenance.tolerance;
        dec.notes = json.provenance.notes.clone();
        Ok(dec)
    }
}

fn offsets_of(dims: &[usize]) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(dims.len());
    let mut acc = 0;
    for &d in dims {
        offsets.push(acc);
        acc += d;
    }
    offsets
}

/// Serialized form: basis matrix in row-major order plus provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub ambient_dim: usize,
    pub basis_row_major: Vec<f64>,
    pub block_dims: Vec<usize>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: Option<u64>,
    pub tolerance: f64,
    pub notes: Vec<String>,
}

/// The `Q`-orthogonal complement of the isotropy subalgebra.
pub fn orthogonal_complement(algebra: &LieAlgebra, h: &Subspace) -> Result<Subspace> {
    if h.ambient_dim() != algebra.dim() {
        return Err(Error::DimensionMismatch { expected: algebra.dim(), got: h.ambient_dim() });
    }
    Ok(h.orthogonal_complement("m"))
}

/// Matrices of the isotropy action on `m` (in `m_basis` coordinates):
/// `ad(z)` for each basis vector of `h`, plus the restrictions of any
/// supplied ambient component-group matrices.
fn action_on_m(
    algebra: &LieAlgebra,
    h: &Subspace,
    extras: &[DMatrix<f64>],
    m_basis: &DMatrix<f64>,
) -> Result<Vec<DMatrix<f64>>> {
    let n = algebra.dim();
    let mut gens = Vec::new();
    for z in 0..h.dim() {
        let adz = algebra.ad(&h.basis().column(z).clone_owned());
        let restricted = m_basis.transpose() * &adz * m_basis;
        // the action must preserve m
        let full = &adz * m_basis;
        let back = m_basis * &restricted;
        if (&full - &back).norm() > DEFAULT_TOL {
            return Err(Error::Precondition("ad(h) does not preserve the complement m".into()));
        }
        gens.push(restricted);
    }
    for (idx, g) in extras.iter().enumerate() {
        if g.nrows() != n || g.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: g.nrows() });
        }
        let restricted = m_basis.transpose() * g * m_basis;
        let full = g * m_basis;
        let back = m_basis * &restricted;
        if (&full - &back).norm() > DEFAULT_TOL {
            return Err(Error::Precondition(format!(
                "component generator {idx} does not preserve the complement m"
            )));
        }
        gens.push(restricted);
    }
    Ok(gens)
}

/// Basis of the symmetric commutant `{X = Xᵀ : XA = AX for all A}` on the
/// space the generators act on.
fn symmetric_commutant(generators: &[DMatrix<f64>], dim: usize) -> Vec<DMatrix<f64>> {
    let params: Vec<(usize, usize)> =
        (0..dim).flat_map(|p| (p..dim).map(move |q| (p, q))).collect();
    let np = params.len();
    if generators.is_empty() {
        // everything symmetric commutes with nothing
        return params
            .iter()
            .map(|&(p, q)| {
                let mut e = DMatrix::zeros(dim, dim);
                e[(p, q)] = 1.0;
                e[(q, p)] = 1.0;
                e
            })
            .collect();
    }
    let mut rows = DMatrix::zeros(generators.len() * dim * dim, np);
    for (gi, a) in generators.iter().enumerate() {
        for (col, &(p, q)) in params.iter().enumerate() {
            let mut e = DMatrix::zeros(dim, dim);
            e[(p, q)] = 1.0;
            e[(q, p)] = 1.0;
            let c = &e * a - a * &e;
            for r in 0..dim {
                for s in 0..dim {
                    rows[(gi * dim * dim + r * dim + s, col)] = c[(r, s)];
                }
            }
        }
    }
    let kernel = linalg::nullspace(&rows, 1e-10);
    (0..kernel.ncols())
        .map(|j| {
            let mut x = DMatrix::zeros(dim, dim);
            for (row, &(p, q)) in params.iter().enumerate() {
                x[(p, q)] = kernel[(row, j)];
                x[(q, p)] = kernel[(row, j)];
            }
            x
        })
        .collect()
}

/// Split `m` into invariant irreducible blocks under the isotropy action.
///
/// Blocks are sorted by (dimension, Casimir eigenvalue, lexicographic first
/// basis vector) so results are deterministic for a given seed. With a
/// trivial action (no isotropy, no component generators) nothing is fixed
/// canonically; the conventional answer is one-dimensional blocks along the
/// complement's coordinate directions, with an explanatory note.
pub fn decompose(
    algebra: &LieAlgebra,
    h: &Subspace,
    extras: &[DMatrix<f64>],
    seed: u64,
    tol: f64,
) -> Result<Decomposition> {
    let check = algebra.is_subalgebra(h);
    if !check.closed {
        return Err(Error::NotSubalgebra { residual: check.residual });
    }
    let m = h.orthogonal_complement("m");
    let dim_m = m.dim();
    let gens = action_on_m(algebra, h, extras, m.basis())?;
    let trivial_action = gens.iter().all(|g| {
        // orthogonal component generators equal to the identity carry no
        // information either
        (g - DMatrix::<f64>::identity(dim_m, dim_m)).norm() < tol || g.norm() < tol
    });
    if trivial_action {
        let mut dec = Decomposition::new(m.basis().clone(), vec![1; dim_m])?;
        dec.seed = Some(seed);
        dec.tol = tol;
        dec.notes.push(
            "trivial isotropy action: irreducibility is not meaningful, returning \
             one-dimensional blocks by convention; supply an explicit decomposition instead"
                .into(),
        );
        return Ok(dec);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // each entry: orthonormal columns (m-coordinates) spanning a candidate
    // block, plus a flag marking verified irreducibility
    let mut blocks: Vec<(DMatrix<f64>, bool)> =
        vec![(DMatrix::identity(dim_m, dim_m), false)];
    let max_rounds = 64;
    for _round in 0..max_rounds {
        if blocks.iter().all(|(_, done)| *done) {
            break;
        }
        let mut next = Vec::new();
        for (span, done) in std::mem::take(&mut blocks) {
            if done {
                next.push((span, true));
                continue;
            }
            let d = span.ncols();
            let restricted: Vec<DMatrix<f64>> =
                gens.iter().map(|g| span.transpose() * g * &span).collect();
            let comm = symmetric_commutant(&restricted, d);
            if comm.len() <= 1 {
                next.push((span, true));
                continue;
            }
            // random symmetric commutant element; its eigenspaces are
            // invariant and refine the block
            let mut w = DMatrix::zeros(d, d);
            for k in &comm {
                w += k * rng.gen_range(-1.0..1.0_f64);
            }
            let (values, vectors) = linalg::sym_eigen_sorted(&w);
            let scale = values.iter().fold(1.0_f64, |a, &v| a.max(v.abs()));
            let mut start = 0;
            let mut split_any = false;
            for idx in 1..=d {
                let boundary =
                    idx == d || (values[idx] - values[idx - 1]).abs() > 1e-6 * scale;
                if boundary {
                    let sub = vectors.columns(start, idx - start).clone_owned();
                    next.push((&span * sub, false));
                    if idx - start < d {
                        split_any = true;
                    }
                    start = idx;
                }
            }
            if !split_any {
                // eigenvalues failed to separate; retry with another sample
                // next round
            }
        }
        blocks = next;
    }
    if !blocks.iter().all(|(_, done)| *done) {
        return Err(Error::Decomposition(format!(
            "failed to certify irreducibility of all blocks after {max_rounds} rounds"
        )));
    }

    // verify invariance of every block under every generator
    for (span, _) in &blocks {
        let p = span * span.transpose();
        let id = DMatrix::<f64>::identity(dim_m, dim_m);
        for g in &gens {
            let escape = (&id - &p) * g * span;
            if escape.norm() > tol {
                return Err(Error::Decomposition(format!(
                    "computed block is not invariant (residual {:.3e})",
                    escape.norm()
                )));
            }
        }
    }

    // canonical in-block bases and deterministic ordering
    let casimir_m = casimir_matrix_on(algebra, h, m.basis());
    let mut finished: Vec<(usize, f64, DMatrix<f64>)> = blocks
        .into_iter()
        .map(|(span, _)| {
            let canon = canonical_basis(&span);
            let c_block = canon.transpose() * &casimir_m * &canon;
            let c_mean = c_block.trace() / canon.ncols() as f64;
            (canon.ncols(), c_mean, canon)
        })
        .collect();
    finished.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then(a.1.total_cmp(&b.1))
            .then_with(|| lex_cmp(&a.2.column(0).clone_owned(), &b.2.column(0).clone_owned()))
    });

    let mut cols = Vec::new();
    let mut dims = Vec::new();
    for (d, _, canon) in &finished {
        dims.push(*d);
        for j in 0..canon.ncols() {
            cols.push(m.basis() * canon.column(j).clone_owned());
        }
    }
    let basis = linalg::from_columns(algebra.dim(), &cols);
    let mut dec = Decomposition::new(basis, dims)?;
    dec.seed = Some(seed);
    dec.tol = tol;
    Ok(dec)
}

/// Deterministic orthonormal basis of a subspace given by (any) orthonormal
/// columns: greedy pivoting on the projector's columns, so the result
/// depends only on the subspace.
fn canonical_basis(span: &DMatrix<f64>) -> DMatrix<f64> {
    let p = span * span.transpose();
    let n = p.nrows();
    let d = span.ncols();
    let mut chosen: Vec<DVector<f64>> = Vec::new();
    let mut remaining: Vec<DVector<f64>> = (0..n).map(|j| p.column(j).clone_owned()).collect();
    while chosen.len() < d {
        // pick the residual column with the largest norm
        let mut best = 0;
        let mut best_norm = -1.0;
        for (j, c) in remaining.iter().enumerate() {
            let norm = c.norm();
            if norm > best_norm + 1e-12 {
                best_norm = norm;
                best = j;
            }
        }
        let mut v = remaining.swap_remove(best);
        for u in &chosen {
            let c = u.dot(&v);
            v -= u * c;
        }
        let norm = v.norm();
        if norm < 1e-10 {
            continue;
        }
        v /= norm;
        // fix the overall sign: first significant coordinate positive
        if let Some(lead) = v.iter().find(|x| x.abs() > 1e-9) {
            if *lead < 0.0 {
                v = -v;
            }
        }
        for w in remaining.iter_mut() {
            let c = v.dot(w);
            *w -= &v * c;
        }
        chosen.push(v);
    }
    linalg::from_columns(n, &chosen)
}

fn lex_cmp(a: &DVector<f64>, b: &DVector<f64>) -> std::cmp::Ordering {
    for i in 0..a.len() {
        let ord = a[i].total_cmp(&b[i]);
        if ord != std::cmp::Ordering::Equal {
            return ord;
        }
    }
    std::cmp::Ordering::Equal
}

fn casimir_matrix_on(algebra: &LieAlgebra, h: &Subspace, m_basis: &DMatrix<f64>) -> DMatrix<f64> {
    let n = algebra.dim();
    let mut amb = DMatrix::zeros(n, n);
    for z in 0..h.dim() {
        let adz = algebra.ad(&h.basis().column(z).clone_owned());
        amb -= &adz * &adz;
    }
    m_basis.transpose() * amb * m_basis
}

/// The decomposition-dependent coefficients: the symmetric triple tensor,
/// the Casimir constants `c_i`, the Killing constants `b_i`, and their trace
/// `b_{G/H} = Σ dᵢbᵢ`, together with the residual of the identity
/// `dᵢbᵢ = 2dᵢcᵢ + Σⱼₖ [ijk]`.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    ell: usize,
    dims: Vec<usize>,
    triples: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub b_gh: f64,
    pub dbc_residual: f64,
}

impl CoefficientTable {
    pub fn blocks(&self) -> usize {
        self.ell
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, i: usize) -> usize {
        self.dims[i]
    }

    /// The symmetric coefficient `[ijk]` (sum of squared bracket projections
    /// over one adapted orthonormal basis choice per block).
    pub fn triple(&self, i: usize, j: usize, k: usize) -> f64 {
        self.triples[(i * self.ell + j) * self.ell + k]
    }

    /// Nonzero independent entries with `i ≤ j ≤ k`.
    pub fn independent_triples(&self) -> Vec<TripleEntry> {
        let mut out = Vec::new();
        for i in 0..self.ell {
            for j in i..self.ell {
                for k in j..self.ell {
                    let value = self.triple(i, j, k);
                    if value.abs() > 1e-12 {
                        out.push(TripleEntry { i, j, k, value });
                    }
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> CoefficientTableJson {
        CoefficientTableJson {
            block_dims: self.dims.clone(),
            triples: self.independent_triples(),
            b: self.b.clone(),
            c: self.c.clone(),
            b_gh: self.b_gh,
            dbc_residual: self.dbc_residual,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TripleEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoefficientTableJson {
    pub block_dims: Vec<usize>,
    pub triples: Vec<TripleEntry>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub b_gh: f64,
    pub dbc_residual: f64,
}

/// Compute the coefficient table of a decomposition by direct summation over
/// the adapted basis.
pub fn coefficients(
    algebra: &LieAlgebra,
    h: &Subspace,
    decomp: &Decomposition,
) -> Result<CoefficientTable> {
    let ell = decomp.blocks();
    let dims = decomp.block_dims().to_vec();
    let dm = decomp.dim_m();
    let mut triples = vec![0.0; ell * ell * ell];
    for alpha in 0..dm {
        let ba = decomp.block_of(alpha);
        let ea = decomp.basis_vector(alpha);
        for beta in 0..dm {
            let bb = decomp.block_of(beta);
            let w = algebra.bracket(&ea, &decomp.basis_vector(beta))?;
            let comps = decomp.basis().transpose() * &w;
            for k in 0..ell {
                let mut acc = 0.0;
                for gamma in decomp.block_range(k) {
                    acc += comps[gamma] * comps[gamma];
                }
                triples[(ba * ell + bb) * ell + k] += acc;
            }
        }
    }

    // Casimir constants: block means of the Casimir operator, with a
    // block-constancy check
    let casimir = casimir_matrix_on(algebra, h, decomp.basis());
    let mut c = Vec::with_capacity(ell);
    for i in 0..ell {
        let range = decomp.block_range(i);
        let vals: Vec<f64> = range.clone().map(|a| casimir[(a, a)]).collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        for a in range.clone() {
            for b in range.clone() {
                let expected = if a == b { mean } else { 0.0 };
                if (casimir[(a, b)] - expected).abs() > 1e-7 {
                    return Err(Error::Decomposition(format!(
                        "Casimir operator is not scalar on block {i}"
                    )));
                }
            }
        }
        c.push(mean);
    }

    // Killing constants from the restriction of -B
    let killing = algebra.killing_form();
    let minus_b = decomp.basis().transpose() * (-&killing) * decomp.basis();
    let mut b = Vec::with_capacity(ell);
    for i in 0..ell {
        let range = decomp.block_range(i);
        let vals: Vec<f64> = range.clone().map(|a| minus_b[(a, a)]).collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        for a in range.clone() {
            for bb in range.clone() {
                let expected = if a == bb { mean } else { 0.0 };
                if (minus_b[(a, bb)] - expected).abs() > 1e-7 {
                    return Err(Error::Decomposition(format!(
                        "Killing form is not scalar on block {i}"
                    )));
                }
            }
        }
        b.push(mean);
    }
    let b_gh: f64 = dims.iter().zip(&b).map(|(&d, &bi)| d as f64 * bi).sum();

    let mut table = CoefficientTable { ell, dims, triples, b, c, b_gh, dbc_residual: 0.0 };
    let mut residual = 0.0_f64;
    for i in 0..ell {
        let d = table.dims[i] as f64;
        let sum: f64 = (0..ell)
            .flat_map(|j| (0..ell).map(move |k| (j, k)))
            .map(|(j, k)| table.triple(i, j, k))
            .sum();
        residual = residual.max((d * table.b[i] - 2.0 * d * table.c[i] - sum).abs());
    }
    table.dbc_residual = residual;
    if residual > 1e-7 {
        return Err(Error::Decomposition(format!(
            "coefficient identity d·b = 2d·c + Σ[ijk] fails (residual {residual:.3e}); \
             the decomposition is inconsistent"
        )));
    }
    Ok(table)
}

/// Dimensions of the intertwiner spaces `Hom_H(m_i, m_j)` between blocks,
/// from the kernel of the coupled commutation equations. Nonzero
/// off-diagonal entries certify equivalent modules.
pub fn module_equivalences(
    algebra: &LieAlgebra,
    h: &Subspace,
    extras: &[DMatrix<f64>],
    decomp: &Decomposition,
) -> Result<Vec<Vec<usize>>> {
    let m = decomp.m_subspace();
    let gens = action_on_m(algebra, h, extras, m.basis())?;
    let ell = decomp.blocks();
    // block restrictions of every generator
    let rep: Vec<Vec<DMatrix<f64>>> = (0..ell)
        .map(|i| {
            let range = decomp.block_range(i);
            gens.iter()
                .map(|g| g.view((range.start, range.start), (range.len(), range.len())).into_owned())
                .collect()
        })
        .collect();
    let mut out = vec![vec![0usize; ell]; ell];
    for i in 0..ell {
        for j in 0..ell {
            let (di, dj) = (decomp.block_dim(i), decomp.block_dim(j));
            if gens.is_empty() {
                out[i][j] = di * dj;
                continue;
            }
            let mut rows = DMatrix::zeros(gens.len() * dj * di, dj * di);
            for (gi, _) in gens.iter().enumerate() {
                let ai = &rep[i][gi];
                let aj = &rep[j][gi];
                // unknown T is dj×di, column-major parameters t[(r,s)]
                for s in 0..di {
                    for r in 0..dj {
                        let col = s * dj + r;
                        // (T·Ai − Aj·T)[p, q] entries touched by t[(r, s)]
                        for q in 0..di {
                            rows[(gi * dj * di + q * dj + r, col)] += ai[(s, q)];
                        }
                        for p in 0..dj {
                            rows[(gi * dj * di + s * dj + p, col)] -= aj[(p, r)];
                        }
                    }
                }
            }
            out[i][j] = linalg::nullspace(&rows, 1e-9).ncols();
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn stiefel() -> (LieAlgebra, Subspace) {
        (catalog::so5_algebra(), Subspace::from_axes(10, &[0], "so(2)"))
    }

    #[test]
    fn complement_dimensions() {
        let (so5, h) = stiefel();
        let m = orthogonal_complement(&so5, &h).unwrap();
        assert_eq!(m.dim(), 9);
        let zero = Subspace::zero(3);
        let su2 = catalog::su2_algebra();
        assert_eq!(orthogonal_complement(&su2, &zero).unwrap().dim(), 3);
        let full = Subspace::full(3, "g");
        assert_eq!(orthogonal_complement(&su2, &full).unwrap().dim(), 0);
    }

    #[test]
    fn stiefel_auto_decomposition_block_dims() {
        let (so5, h) = stiefel();
        let dec = decompose(&so5, &h, &[], 7, 1e-9).unwrap();
        let mut dims = dec.block_dims().to_vec();
        dims.sort();
        assert_eq!(dims, vec![1, 1, 1, 2, 2, 2]);
        // deterministic: same seed, same result
        let dec2 = decompose(&so5, &h, &[], 7, 1e-9).unwrap();
        assert!((dec.basis() - dec2.basis()).norm() < 1e-14);
    }

    #[test]
    fn s1xs2_decomposition_is_one_plus_two() {
        let alg = catalog::s1xs2_algebra();
        let h = Subspace::from_axes(4, &[1], "h");
        let dec = decompose(&alg, &h, &[], 7, 1e-9).unwrap();
        assert_eq!(dec.block_dims(), &[1, 2]);
        // the 1-dim block is the central direction
        let m1 = dec.span_of_blocks(&[0], "m1");
        assert!(m1.contains(&nalgebra::DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]), 1e-9));
    }

    #[test]
    fn trivial_isotropy_returns_singletons_with_note() {
        let su2 = catalog::su2_algebra();
        let dec = decompose(&su2, &Subspace::zero(3), &[], 7, 1e-9).unwrap();
        assert_eq!(dec.block_dims(), &[1, 1, 1]);
        assert!(!dec.notes().is_empty());
    }

    #[test]
    fn component_generator_splits_su2_into_berger_blocks() {
        // a rotation about the X1 axis acts on m = su(2) and groups span(X1)
        // apart from span(X2, X3)
        let su2 = catalog::su2_algebra();
        let theta: f64 = 1.0;
        let rot = DMatrix::from_row_slice(
            3,
            3,
            &[
                1.0, 0.0, 0.0,
                0.0, theta.cos(), -theta.sin(),
                0.0, theta.sin(), theta.cos(),
            ],
        );
        let dec = decompose(&su2, &Subspace::zero(3), &[rot], 7, 1e-9).unwrap();
        assert_eq!(dec.block_dims(), &[1, 2]);
    }

    #[test]
    fn stiefel_reference_coefficients() {
        let space = catalog::so5_stiefel();
        let coeffs = space.coefficients();
        assert_eq!(coeffs.dims(), &[1, 2, 2, 2, 1, 1]);
        for (i, &ci) in coeffs.c.iter().enumerate() {
            let expected = [0.0, 1.0, 1.0, 1.0, 0.0, 0.0][i];
            assert!((ci - expected).abs() < 1e-12);
        }
        for &bi in &coeffs.b {
            assert!((bi - 6.0).abs() < 1e-12);
        }
        let mut nonzero = coeffs.independent_triples();
        nonzero.sort_by_key(|t| (t.i, t.j, t.k));
        let got: Vec<(usize, usize, usize, f64)> =
            nonzero.iter().map(|t| (t.i, t.j, t.k, t.value)).collect();
        assert_eq!(got.len(), 4);
        let expect = [(0, 1, 2, 2.0), (0, 4, 5, 1.0), (1, 3, 4, 2.0), (2, 3, 5, 2.0)];
        for ((i, j, k, v), (ei, ej, ek, ev)) in got.iter().zip(expect.iter()) {
            assert_eq!((i, j, k), (ei, ej, ek));
            assert!((v - ev).abs() < 1e-9);
        }
        assert!(coeffs.dbc_residual < 1e-9);
        assert!((coeffs.b_gh - 54.0).abs() < 1e-9);
    }

    #[test]
    fn abelian_coefficients_vanish() {
        let alg = LieAlgebra::abelian("t4", 4);
        let h = Subspace::zero(4);
        let dec = decompose(&alg, &h, &[], 7, 1e-9).unwrap();
        let coeffs = coefficients(&alg, &h, &dec).unwrap();
        assert!(coeffs.b.iter().all(|&x| x.abs() < 1e-12));
        assert!(coeffs.independent_triples().is_empty());
    }

    #[test]
    fn su2_split_blocks_give_triple_eight() {
        let space = catalog::su2_berger();
        let coeffs = space.coefficients();
        // blocks (span X1, span{X2,X3}): the only nonzero independent triple
        assert!((coeffs.triple(0, 1, 1) - 8.0).abs() < 1e-12);
        assert!((coeffs.triple(1, 0, 1) - 8.0).abs() < 1e-12);
        assert!((coeffs.triple(0, 0, 0)).abs() < 1e-12);
        assert!(coeffs.dbc_residual < 1e-9);
    }

    #[test]
    fn triples_invariant_under_in_block_rotations() {
        use rand::{Rng, SeedableRng};
        let space = catalog::so5_stiefel();
        let dec = space.decomposition();
        let coeffs = space.coefficients();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _trial in 0..5 {
            // rotate each 2-dimensional block by a random angle and flip
            // signs of the 1-dimensional ones
            let mut cols = Vec::new();
            for i in 0..dec.blocks() {
                let range = dec.block_range(i);
                if range.len() == 1 {
                    let sign = if rng.gen_bool(0.5) { -1.0 } else { 1.0 };
                    cols.push(dec.basis_vector(range.start) * sign);
                } else {
                    let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                    let u = dec.basis_vector(range.start);
                    let v = dec.basis_vector(range.start + 1);
                    cols.push(&u * a.cos() + &v * a.sin());
                    cols.push(-&u * a.sin() + &v * a.cos());
                }
            }
            let basis = crate::linalg::from_columns(10, &cols);
            let rotated = Decomposition::new(basis, dec.block_dims().to_vec()).unwrap();
            let rotated_coeffs =
                coefficients(space.algebra(), space.isotropy(), &rotated).unwrap();
            for i in 0..dec.blocks() {
                for j in 0..dec.blocks() {
                    for k in 0..dec.blocks() {
                        assert!(
                            (coeffs.triple(i, j, k) - rotated_coeffs.triple(i, j, k)).abs()
                                < 1e-9
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn stiefel_module_equivalences() {
        let space = catalog::so5_stiefel();
        let eq = module_equivalences(
            space.algebra(),
            space.isotropy(),
            &[],
            space.decomposition(),
        )
        .unwrap();
        // diagonal entries at least 1
        for i in 0..6 {
            assert!(eq[i][i] >= 1);
        }
        // the three standard modules are mutually equivalent
        assert!(eq[1][2] >= 1 && eq[1][3] >= 1 && eq[2][3] >= 1);
        // trivial modules are mutually equivalent
        assert!(eq[0][4] >= 1 && eq[0][5] >= 1);
        // trivial vs standard: no intertwiners
        assert_eq!(eq[0][1], 0);
        assert_eq!(eq[4][2], 0);
    }

    #[test]
    fn redecomposition_is_idempotent_on_dims() {
        let (so5, h) = stiefel();
        let dec = decompose(&so5, &h, &[], 7, 1e-9).unwrap();
        let again = decompose(&so5, &h, &[], 13, 1e-9).unwrap();
        let mut a = dec.block_dims().to_vec();
        let mut b = again.block_dims().to_vec();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }
}
