//! Sectional, Ricci and scalar curvature of invariant metrics, the full
//! curvature operator on bivectors, and second fundamental forms.
//!
//! Two independent routes are kept side by side: fast closed-form
//! expressions for diagonal metrics driven by the coefficient table, and a
//! slow oracle for arbitrary invariant metrics built from the symmetric
//! tensor `U` and the one-sum sectional curvature formula. The assembled
//! curvature tensor uses the canonical homogeneous connection
//! `Λ(X)Y = ½[X,Y]_m + U(X,Y)` with
//! `R(X,Y) = [Λ(X),Λ(Y)] − Λ([X,Y]_m) − ad([X,Y]_h)|_m`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::lie::Subspace;
use crate::metric::{DiagonalMetric, GeneralMetric};
use crate::space::HomogeneousSpace;
use crate::{Error, Result};

/// Curvature summary of one metric.
#[derive(Debug, Clone, Serialize)]
pub struct CurvatureReport {
    /// diagonal Ricci coefficients per block
    pub ric: Vec<f64>,
    pub scal: f64,
    pub ric_norm: f64,
    pub traceless_ric_norm: f64,
    pub rm_norm: f64,
    /// `|Rm|/|Ric|`, absent when `|Ric|` vanishes
    pub rm_ric_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rm_matrix: Option<Vec<Vec<f64>>>,
}

/// The symmetric tensor `U` at one pair of m-vectors, defined by
/// `2g(U(X,Y), Z) = g([Z,X]_m, Y) + g([Z,Y]_m, X)` for all `Z`.
pub fn u_tensor(
    space: &HomogeneousSpace,
    metric: &GeneralMetric,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> DVector<f64> {
    let dm = space.dim_m();
    let mut w = DVector::zeros(dm);
    for c in 0..dm {
        let mut zx = DVector::zeros(dm);
        let mut zy = DVector::zeros(dm);
        for alpha in 0..dm {
            if x[alpha] != 0.0 {
                zx += space.bracket_m(c, alpha) * x[alpha];
            }
            if y[alpha] != 0.0 {
                zy += space.bracket_m(c, alpha) * y[alpha];
            }
        }
        w[c] = (zx.transpose() * &metric.a * y)[(0, 0)] + (zy.transpose() * &metric.a * x)[(0, 0)];
    }
    let lu = metric.a.clone().lu();
    lu.solve(&(w * 0.5)).expect("metric matrix is invertible")
}

fn g_inner(metric: &GeneralMetric, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    (x.transpose() * &metric.a * y)[(0, 0)]
}

/// Sectional curvature of the plane spanned by two m-vectors, for any
/// invariant metric, via the five-term formula in the ambient inner product.
/// The plane is g-orthonormalized internally.
pub fn sectional_oracle(
    space: &HomogeneousSpace,
    metric: &GeneralMetric,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> Result<f64> {
    let nx = g_inner(metric, x, x).sqrt();
    if nx < 1e-12 {
        return Err(Error::DegeneratePlane);
    }
    let e1 = x / nx;
    let mut u = y - &e1 * g_inner(metric, &e1, y);
    let nu = g_inner(metric, &u, &u).sqrt();
    if nu < 1e-10 {
        return Err(Error::DegeneratePlane);
    }
    u /= nu;
    sectional_unit_pair(space, metric, &e1, &u)
}

fn sectional_unit_pair(
    space: &HomogeneousSpace,
    metric: &GeneralMetric,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> Result<f64> {
    let b = space.decomposition().basis();
    let alg = space.algebra();
    let x_amb = b * x;
    let y_amb = b * y;
    let full = alg.bracket(&x_amb, &y_amb)?;
    let bm = b.transpose() * &full;
    let t1 = -0.75 * g_inner(metric, &bm, &bm);
    let xxy = b.transpose() * alg.bracket(&x_amb, &full)?;
    let t2 = -0.5 * g_inner(metric, &xxy, y);
    let yyx = b.transpose() * alg.bracket(&y_amb, &alg.bracket(&y_amb, &x_amb)?)?;
    let t3 = -0.5 * g_inner(metric, &yyx, x);
    let uxy = u_tensor(space, metric, x, y);
    let uxx = u_tensor(space, metric, x, x);
    let uyy = u_tensor(space, metric, y, y);
    let t4 = g_inner(metric, &uxy, &uxy);
    let t5 = -g_inner(metric, &uxx, &uyy);
    Ok(t1 + t2 + t3 + t4 + t5)
}

/// Sectional curvature of a diagonal metric on an adapted plane, by the
/// closed forms: for `X, Y` orthonormal in blocks `i = j`
///
/// `sec = |[X,Y]_h|²/λᵢ + Σₖ (4λᵢ − 3λₖ)/(4λᵢ²)·|[X,Y]_{m_k}|²`
///
/// and for `i ≠ j`
///
/// `sec = Σₖ (λᵢ² + λⱼ² − 3λₖ² − 2λᵢλⱼ + 2λᵢλₖ + 2λⱼλₖ)/(4λᵢλⱼλₖ)·|[X,Y]_{m_k}|²`.
pub fn sectional_diagonal(
    space: &HomogeneousSpace,
    g: &DiagonalMetric,
    i: usize,
    j: usize,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> Result<f64> {
    g.check_against(space)?;
    let dec = space.decomposition();
    for (block, v) in [(i, x), (j, y)] {
        let range = dec.block_range(block);
        for alpha in 0..space.dim_m() {
            if !range.contains(&alpha) && v[alpha].abs() > 1e-12 {
                return Err(Error::Precondition(format!(
                    "vector is not supported in block {block}"
                )));
            }
        }
    }
    let bm = space.bracket_m_vec(x, y);
    let bh = space.bracket_h_vec(x, y);
    let lam = &g.lambdas;
    let (li, lj) = (lam[i], lam[j]);
    let mut sec = 0.0;
    if i == j {
        sec += bh.norm_squared() / li;
        for k in 0..space.blocks() {
            let lk = lam[k];
            let mut nk = 0.0;
            for alpha in dec.block_range(k) {
                nk += bm[alpha] * bm[alpha];
            }
            sec += (4.0 * li - 3.0 * lk) / (4.0 * li * li) * nk;
        }
    } else {
        for k in 0..space.blocks() {
            let lk = lam[k];
            let mut nk = 0.0;
            for alpha in dec.block_range(k) {
                nk += bm[alpha] * bm[alpha];
            }
            sec += (li * li + lj * lj - 3.0 * lk * lk - 2.0 * li * lj
                + 2.0 * li * lk
                + 2.0 * lj * lk)
                / (4.0 * li * lj * lk)
                * nk;
        }
    }
    Ok(sec)
}

/// Diagonal Ricci coefficients of a diagonal metric:
///
/// `ricᵢ = bᵢ/(2λᵢ) − 1/(2dᵢ)·Σⱼₖ [ijk]·λₖ/(λᵢλⱼ) + 1/(4dᵢ)·Σⱼₖ [ijk]·λᵢ/(λⱼλₖ)`.
///
/// When equivalent blocks are present the full Ricci tensor may also carry
/// off-blocks between them; these coefficients are always the diagonal of
/// the Ricci operator in the adapted basis.
pub fn ricci_diagonal(space: &HomogeneousSpace, g: &DiagonalMetric) -> Result<Vec<f64>> {
    g.check_against(space)?;
    let coeffs = space.coefficients();
    let ell = space.blocks();
    let lam = &g.lambdas;
    let mut out = Vec::with_capacity(ell);
    for i in 0..ell {
        let d = coeffs.dim(i) as f64;
        let mut second = 0.0;
        let mut third = 0.0;
        for j in 0..ell {
            for k in 0..ell {
                let t = coeffs.triple(i, j, k);
                if t == 0.0 {
                    continue;
                }
                second += t * lam[k] / (lam[i] * lam[j]);
                third += t * lam[i] / (lam[j] * lam[k]);
            }
        }
        out.push(coeffs.b[i] / (2.0 * lam[i]) - second / (2.0 * d) + third / (4.0 * d));
    }
    Ok(out)
}

/// Scalar curvature of a diagonal metric:
/// `scal = ½Σ dᵢbᵢ/λᵢ − ¼Σ [ijk]·λᵢ/(λⱼλₖ)`.
pub fn scalar_curvature(space: &HomogeneousSpace, g: &DiagonalMetric) -> Result<f64> {
    g.check_against(space)?;
    let coeffs = space.coefficients();
    let ell = space.blocks();
    let lam = &g.lambdas;
    let mut scal = 0.0;
    for i in 0..ell {
        scal += 0.5 * coeffs.dim(i) as f64 * coeffs.b[i] / lam[i];
        for j in 0..ell {
            for k in 0..ell {
                let t = coeffs.triple(i, j, k);
                if t != 0.0 {
                    scal -= 0.25 * t * lam[i] / (lam[j] * lam[k]);
                }
            }
        }
    }
    Ok(scal)
}

/// Matrix of the connection operator `Λ(x) = ½[x,·]_m + U(x,·)`.
fn connection_operator(
    space: &HomogeneousSpace,
    metric: &GeneralMetric,
    x: &DVector<f64>,
) -> DMatrix<f64> {
    let dm = space.dim_m();
    let mut m = DMatrix::zeros(dm, dm);
    for beta in 0..dm {
        let mut e = DVector::zeros(dm);
        e[beta] = 1.0;
        let col = space.bracket_m_vec(x, &e) * 0.5 + u_tensor(space, metric, x, &e);
        m.set_column(beta, &col);
    }
    m
}

/// A g-orthonormal frame on `m` as columns: exact per-column scaling for
/// (numerically) diagonal metrics, the inverse symmetric square root
/// otherwise.
fn orthonormal_frame(metric: &GeneralMetric) -> DMatrix<f64> {
    let dm = metric.a.nrows();
    let mut off = 0.0_f64;
    for r in 0..dm {
        for c in 0..dm {
            if r != c {
                off = off.max(metric.a[(r, c)].abs());
            }
        }
    }
    if off < 1e-13 {
        let mut f = DMatrix::zeros(dm, dm);
        for i in 0..dm {
            f[(i, i)] = 1.0 / metric.a[(i, i)].sqrt();
        }
        f
    } else {
        crate::linalg::spd_inv_sqrt(&metric.a)
    }
}

/// The curvature endomorphisms `R(f_a, f_b)` of a g-orthonormal frame, for
/// all pairs `a < b`, as matrices in m-coordinates.
fn curvature_endomorphisms(
    space: &HomogeneousSpace,
    metric: &GeneralMetric,
) -> (DMatrix<f64>, Vec<(usize, usize)>, Vec<DMatrix<f64>>) {
    let dm = space.dim_m();
    let frame = orthonormal_frame(metric);
    let lambdas_ops: Vec<DMatrix<f64>> = (0..dm)
        .map(|a| connection_operator(space, metric, &frame.column(a).clone_owned()))
        .collect();
    let pairs = bivector_pairs(dm);
    let mut ops = Vec::with_capacity(pairs.len());
    for &(a, b) in &pairs {
        let fa = frame.column(a).clone_owned();
        let fb = frame.column(b).clone_owned();
        let bm = space.bracket_m_vec(&fa, &fb);
        let bh = space.bracket_h_vec(&fa, &fb);
        let mut r = &lambdas_ops[a] * &lambdas_ops[b] - &lambdas_ops[b] * &lambdas_ops[a];
        r -= connection_operator(space, metric, &bm);
        if space.isotropy().dim() > 0 {
            let h_amb = space.isotropy().basis() * bh;
            r -= space.ad_on_m(&h_amb);
        }
        ops.push(r);
    }
    (frame, pairs, ops)
}

pub fn bivector_pairs(dm: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(dm * (dm - 1) / 2);
    for a in 0..dm {
        for b in (a + 1)..dm {
            pairs.push((a, b));
        }
    }
    pairs
}

/// The curvature operator on bivectors in a g-orthonormal frame. Entries
/// are `⟨Rm(f_a∧f_b), f_c∧f_d⟩`; the diagonal is the sectional curvature of
/// the frame planes and the Frobenius norm is the curvature norm `|Rm|_g`.
#[derive(Debug, Clone)]
pub struct CurvatureOperator {
    pub pairs: Vec<(usize, usize)>,
    pub matrix: DMatrix<f64>,
}

impl CurvatureOperator {
    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm()
    }

    pub fn symmetry_residual(&self) -> f64 {
        (&self.matrix - self.matrix.transpose()).norm()
    }

    pub fn entry(&self, ab: (usize, usize), cd: (usize, usize)) -> f64 {
        let i = self.pairs.iter().position(|&p| p == ab).expect("pair in range");
        let j = self.pairs.iter().position(|&p| p == cd).expect("pair in range");
        self.matrix[(i, j)]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.matrix.nrows())
            .map(|r| self.matrix.row(r).iter().cloned().collect())
            .collect()
    }
}

/// Assemble the curvature operator of any invariant metric.
pub fn curvature_operator(space: &HomogeneousSpace, metric: &GeneralMetric) -> CurvatureOperator {
    let (frame, pairs, ops) = curvature_endomorphisms(space, metric);
    let np = pairs.len();
    let mut matrix = DMatrix::zeros(np, np);
    for (row, op) in ops.iter().enumerate() {
        // column (c,d): ⟨R(f_a,f_b) f_d, f_c⟩_g
        let gr = &metric.a * op;
        for (col, &(c, d)) in pairs.iter().enumerate() {
            let fc = frame.column(c);
            let fd = frame.column(d);
            matrix[(row, col)] = (fc.transpose() * &gr * fd)[(0, 0)];
        }
    }
    CurvatureOperator { pairs, matrix }
}

/// Ricci tensor in the g-orthonormal frame, contracted from the assembled
/// curvature tensor: `Ric(x, y) = Σ_a ⟨R(f_a, x)y, f_a⟩_g`.
pub fn ricci_from_curvature(space: &HomogeneousSpace, metric: &GeneralMetric) -> DMatrix<f64> {
    let dm = space.dim_m();
    let frame = orthonormal_frame(metric);
    let lambdas_ops: Vec<DMatrix<f64>> = (0..dm)
        .map(|a| connection_operator(space, metric, &frame.column(a).clone_owned()))
        .collect();
    let mut ric = DMatrix::zeros(dm, dm);
    for a in 0..dm {
        let fa = frame.column(a).clone_owned();
        for c in 0..dm {
            if c == a {
                continue;
            }
            let fc = frame.column(c).clone_owned();
            let bm = space.bracket_m_vec(&fa, &fc);
            let bh = space.bracket_h_vec(&fa, &fc);
            let mut r = &lambdas_ops[a] * &lambdas_ops[c] - &lambdas_ops[c] * &lambdas_ops[a];
            r -= connection_operator(space, metric, &bm);
            if space.isotropy().dim() > 0 {
                let h_amb = space.isotropy().basis() * bh;
                r -= space.ad_on_m(&h_amb);
            }
            let gr = &metric.a * &r;
            for d in 0..dm {
                let fd = frame.column(d);
                ric[(c, d)] += (fa.transpose() * &gr * fd)[(0, 0)];
            }
        }
    }
    // symmetrize away the last rounding
    (&ric + ric.transpose()) * 0.5
}

/// Curvature norms of a diagonal metric: `|Ric|_g`, the traceless part
/// `|Ric°|_g`, the operator norm `|Rm|_g`, and their ratio.
pub fn norms(space: &HomogeneousSpace, g: &DiagonalMetric) -> Result<CurvatureReport> {
    curvature_report(space, g, false)
}

/// Full curvature summary; optionally retains the operator matrix.
pub fn curvature_report(
    space: &HomogeneousSpace,
    g: &DiagonalMetric,
    keep_operator: bool,
) -> Result<CurvatureReport> {
    let ric = ricci_diagonal(space, g)?;
    let dims = space.block_dims();
    let scal: f64 = ric.iter().zip(dims).map(|(&r, &d)| d as f64 * r).sum();
    let m = space.dim_m() as f64;
    let mut ric_norm2 = 0.0;
    let mut traceless2 = 0.0;
    for (&r, &d) in ric.iter().zip(dims) {
        ric_norm2 += d as f64 * r * r;
        let dev = r - scal / m;
        traceless2 += d as f64 * dev * dev;
    }
    let op = curvature_operator(space, &g.to_general(space));
    let rm_norm = op.frobenius_norm();
    let ric_norm = ric_norm2.sqrt();
    let rm_ric_ratio = if ric_norm > 1e-12 { Some(rm_norm / ric_norm) } else { None };
    Ok(CurvatureReport {
        ric,
        scal,
        ric_norm,
        traceless_ric_norm: traceless2.sqrt(),
        rm_norm,
        rm_ric_ratio,
        rm_matrix: keep_operator.then(|| op.rows()),
    })
}

/// Largest second-fundamental-form entry `|g(∇_{X1}X2, X3)|` of the fiber
/// subspace determined by an intermediate subalgebra, over the fiber basis
/// `X1, X2` and the complement basis `X3`. Requires the metric to vanish
/// between the fiber part and its complement; fibers of such metrics are
/// totally geodesic, so the result should be zero up to rounding.
pub fn second_fundamental_form(
    space: &HomogeneousSpace,
    metric: &GeneralMetric,
    k: &Subspace,
) -> Result<f64> {
    let (m_k, m_k_perp) = space.fibration_split(k)?;
    let b = space.decomposition().basis();
    let ck = b.transpose() * m_k.basis();
    let cp = b.transpose() * m_k_perp.basis();
    let off = (ck.transpose() * &metric.a * &cp).norm();
    if off > 1e-9 {
        return Err(Error::Precondition(format!(
            "metric couples the fiber and base blocks (residual {off:.3e})"
        )));
    }
    let mut max = 0.0_f64;
    for a in 0..ck.ncols() {
        let xa = ck.column(a).clone_owned();
        let lam = connection_operator(space, metric, &xa);
        for bidx in 0..ck.ncols() {
            let xb = ck.column(bidx).clone_owned();
            let nab = &lam * &xb;
            for c in 0..cp.ncols() {
                let xc = cp.column(c).clone_owned();
                max = max.max(g_inner(metric, &nab, &xc).abs());
            }
        }
    }
    Ok(max)
}
