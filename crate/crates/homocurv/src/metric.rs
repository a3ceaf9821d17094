//! The space of invariant metrics: diagonal and general metrics, relative
//! volume, traceless unit directions, and geodesics through the normal
//! metric.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::isotypic::Decomposition;
use crate::lie::Subspace;
use crate::space::HomogeneousSpace;
use crate::{isotypic, Error, Result, DEFAULT_TOL};

/// Invariant metric diagonal in the space's decomposition: one positive
/// eigenvalue per block, as a dimensionless multiple of the normal metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalMetric {
    pub lambdas: Vec<f64>,
}

impl DiagonalMetric {
    pub fn new(lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::Invalid("metric eigenvalues must be positive".into()));
        }
        Ok(Self { lambdas })
    }

    /// The normal metric itself (all eigenvalues one).
    pub fn normal(blocks: usize) -> Self {
        Self { lambdas: vec![1.0; blocks] }
    }

    pub fn check_against(&self, space: &HomogeneousSpace) -> Result<()> {
        if self.lambdas.len() != space.blocks() {
            return Err(Error::DimensionMismatch {
                expected: space.blocks(),
                got: self.lambdas.len(),
            });
        }
        Ok(())
    }

    /// Relative volume `Π λᵢ^dᵢ`, normalized so the normal metric has
    /// volume one.
    pub fn relative_volume(&self, space: &HomogeneousSpace) -> f64 {
        self.lambdas
            .iter()
            .zip(space.block_dims())
            .map(|(&l, &d)| l.powi(d as i32))
            .product()
    }

    /// Eigenvalue at an adapted-basis position.
    pub fn lambda_at(&self, space: &HomogeneousSpace, alpha: usize) -> f64 {
        self.lambdas[space.decomposition().block_of(alpha)]
    }

    /// The metric matrix on `m` in the adapted basis.
    pub fn to_general(&self, space: &HomogeneousSpace) -> GeneralMetric {
        let dm = space.dim_m();
        let mut a = DMatrix::zeros(dm, dm);
        for alpha in 0..dm {
            a[(alpha, alpha)] = self.lambda_at(space, alpha);
        }
        GeneralMetric { a }
    }
}

/// Invariant metric as a symmetric positive definite matrix on `m` in the
/// adapted orthonormal basis.
#[derive(Debug, Clone)]
pub struct GeneralMetric {
    pub a: DMatrix<f64>,
}

impl GeneralMetric {
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::Invalid("metric matrix must be square".into()));
        }
        Ok(Self { a })
    }

    /// Residuals of the defining conditions: symmetry, positive
    /// definiteness (smallest eigenvalue), and commutation with the isotropy
    /// action and component generators.
    pub fn invariance_report(&self, space: &HomogeneousSpace) -> InvarianceReport {
        let symmetry = (&self.a - self.a.transpose()).norm();
        let (values, _) = crate::linalg::sym_eigen_sorted(&self.a);
        let min_eigenvalue = values.first().copied().unwrap_or(0.0);
        let mut commutation = 0.0_f64;
        let h = space.isotropy();
        for z in 0..h.dim() {
            let adz = space.ad_on_m(&h.basis().column(z).clone_owned());
            commutation = commutation.max((&self.a * &adz - &adz * &self.a).norm());
        }
        for g in space.component_generators() {
            let gm = space.decomposition().basis().transpose() * g * space.decomposition().basis();
            commutation = commutation.max((&self.a * &gm - &gm * &self.a).norm());
        }
        InvarianceReport { symmetry, min_eigenvalue, commutation }
    }

    pub fn is_invariant(&self, space: &HomogeneousSpace, tol: f64) -> bool {
        let r = self.invariance_report(space);
        r.symmetry < tol && r.min_eigenvalue > 0.0 && r.commutation < tol
    }

    /// A decomposition in which this metric is diagonal, obtained by
    /// adjoining the metric matrix to the commuting set of the isotropy
    /// splitter.
    pub fn good_decomposition(&self, space: &HomogeneousSpace, seed: u64) -> Result<Decomposition> {
        // the metric in ambient coordinates acts on m and fixes nothing else
        let b = space.decomposition().basis();
        let ambient = b * &self.a * b.transpose();
        let mut extras = space.component_generators().to_vec();
        extras.push(ambient);
        isotypic::decompose(space.algebra(), space.isotropy(), &extras, seed, DEFAULT_TOL)
    }

    /// Eigenvalues per block of a decomposition in which the metric is
    /// diagonal.
    pub fn to_diagonal(&self, space: &HomogeneousSpace, dec: &Decomposition) -> Result<DiagonalMetric> {
        let b_space = space.decomposition().basis();
        let ambient = b_space * &self.a * b_space.transpose();
        let mut lambdas = Vec::with_capacity(dec.blocks());
        for i in 0..dec.blocks() {
            let block = dec.span_of_blocks(&[i], "block");
            let restricted = block.basis().transpose() * &ambient * block.basis();
            let d = block.dim() as f64;
            let mean = restricted.trace() / d;
            let id = DMatrix::<f64>::identity(block.dim(), block.dim());
            if (&restricted - id * mean).norm() > 1e-7 {
                return Err(Error::Precondition(
                    "metric is not scalar on a block of the given decomposition".into(),
                ));
            }
            lambdas.push(mean);
        }
        DiagonalMetric::new(lambdas)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct InvarianceReport {
    pub symmetry: f64,
    pub min_eigenvalue: f64,
    pub commutation: f64,
}

/// A per-block symmetric direction at the normal metric. On the unit sphere
/// of traceless directions it satisfies `Σ dᵢvᵢ = 0` and `Σ dᵢvᵢ² = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentDirection {
    pub v: Vec<f64>,
}

impl TangentDirection {
    pub fn new(v: Vec<f64>) -> Self {
        Self { v }
    }

    /// Residuals of the two sphere constraints `(|Σdᵢvᵢ|, |Σdᵢvᵢ² − 1|)`.
    pub fn sigma_residuals(&self, space: &HomogeneousSpace) -> (f64, f64) {
        let dims = space.block_dims();
        let trace: f64 = self.v.iter().zip(dims).map(|(&v, &d)| d as f64 * v).sum();
        let norm2: f64 = self.v.iter().zip(dims).map(|(&v, &d)| d as f64 * v * v).sum();
        (trace.abs(), (norm2 - 1.0).abs())
    }

    pub fn on_sigma(&self, space: &HomogeneousSpace, tol: f64) -> bool {
        let (t, n) = self.sigma_residuals(space);
        t < tol && n < tol
    }

    /// Scale to unit norm, keeping the trace. Errors on the zero direction.
    pub fn normalized(&self, space: &HomogeneousSpace) -> Result<Self> {
        let dims = space.block_dims();
        let norm2: f64 = self.v.iter().zip(dims).map(|(&v, &d)| d as f64 * v * v).sum();
        if norm2 <= 0.0 {
            return Err(Error::Invalid("cannot normalize the zero direction".into()));
        }
        let s = norm2.sqrt();
        Ok(Self { v: self.v.iter().map(|&x| x / s).collect() })
    }
}

/// The unit-volume geodesic ray from the normal metric tangent to `v`:
/// block eigenvalues `λᵢ(t) = exp(t·vᵢ)`.
pub fn geodesic(space: &HomogeneousSpace, v: &TangentDirection, t: f64) -> Result<DiagonalMetric> {
    if v.v.len() != space.blocks() {
        return Err(Error::DimensionMismatch { expected: space.blocks(), got: v.v.len() });
    }
    DiagonalMetric::new(v.v.iter().map(|&vi| (t * vi).exp()).collect())
}

/// Recover the unit direction and arc-length parameter of a unit-volume
/// diagonal metric: `vᵢ = log λᵢ / t` with `t = sqrt(Σ dᵢ log²λᵢ)`.
pub fn direction_and_time(
    space: &HomogeneousSpace,
    g: &DiagonalMetric,
) -> Result<(TangentDirection, f64)> {
    g.check_against(space)?;
    let vol = g.relative_volume(space);
    if (vol - 1.0).abs() > 1e-9 {
        return Err(Error::NonUnitVolume(vol));
    }
    let dims = space.block_dims();
    let logs: Vec<f64> = g.lambdas.iter().map(|&l| l.ln()).collect();
    let t2: f64 = logs.iter().zip(dims).map(|(&l, &d)| d as f64 * l * l).sum();
    let t = t2.sqrt();
    if t < 1e-12 {
        return Err(Error::BasePoint);
    }
    Ok((TangentDirection::new(logs.iter().map(|&l| l / t).collect()), t))
}

/// Rescale to unit relative volume.
pub fn normalize_volume(space: &HomogeneousSpace, g: &DiagonalMetric) -> Result<DiagonalMetric> {
    g.check_against(space)?;
    let vol = g.relative_volume(space);
    let scale = vol.powf(-1.0 / space.dim_m() as f64);
    DiagonalMetric::new(g.lambdas.iter().map(|&l| l * scale).collect())
}

/// Verdict of the submersion-metric test for an intermediate subalgebra:
/// the metric must vanish between the fiber part `m_k` and its complement,
/// and restrict on the complement to something equivariant under `ad(k)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SubmersionCheck {
    pub is_submersion: bool,
    pub off_block_residual: f64,
    pub equivariance_residual: f64,
}

/// Test whether a metric is adapted to the fibration induced by the
/// `H`-subalgebra `k`.
pub fn is_submersion_metric(
    space: &HomogeneousSpace,
    metric: &GeneralMetric,
    k: &Subspace,
    tol: f64,
) -> Result<SubmersionCheck> {
    let (m_k, m_k_perp) = space.fibration_split(k)?;
    // coordinates of the two parts in the adapted basis
    let b = space.decomposition().basis();
    let ck = b.transpose() * m_k.basis();
    let cp = b.transpose() * m_k_perp.basis();
    let off_block_residual = (ck.transpose() * &metric.a * &cp).norm();
    let a_perp = cp.transpose() * &metric.a * &cp;
    let mut equivariance_residual = 0.0_f64;
    for j in 0..k.dim() {
        let ad_full = space.ad_on_m(&k.basis().column(j).clone_owned());
        let ad_perp = cp.transpose() * &ad_full * &cp;
        equivariance_residual =
            equivariance_residual.max((&a_perp * &ad_perp - &ad_perp * &a_perp).norm());
    }
    Ok(SubmersionCheck {
        is_submersion: off_block_residual < tol && equivariance_residual < tol,
        off_block_residual,
        equivariance_residual,
    })
}

/// Diagonal-metric convenience wrapper around [`is_submersion_metric`].
pub fn is_submersion_metric_diagonal(
    space: &HomogeneousSpace,
    g: &DiagonalMetric,
    k: &Subspace,
    tol: f64,
) -> Result<SubmersionCheck> {
    g.check_against(space)?;
    is_submersion_metric(space, &g.to_general(space), k, tol)
}

/// Serialized metric: either block eigenvalues or a full matrix (row-major).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricJson {
    Diagonal { lambdas: Vec<f64>, #[serde(default)] decomposition_ref: Option<String> },
    General { a: Vec<Vec<f64>> },
}

impl MetricJson {
    pub fn to_general(&self, space: &HomogeneousSpace) -> Result<GeneralMetric> {
        match self {
            MetricJson::Diagonal { lambdas, .. } => {
                let g = DiagonalMetric::new(lambdas.clone())?;
                g.check_against(space)?;
                Ok(g.to_general(space))
            }
            MetricJson::General { a } => {
                let dm = space.dim_m();
                if a.len() != dm || a.iter().any(|row| row.len() != dm) {
                    return Err(Error::DimensionMismatch { expected: dm, got: a.len() });
                }
                let flat: Vec<f64> = a.iter().flatten().cloned().collect();
                GeneralMetric::new(DMatrix::from_row_slice(dm, dm, &flat))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn berger_direction() -> TangentDirection {
        let s = 6.0_f64.sqrt();
        TangentDirection::new(vec![-s / 3.0, s / 6.0])
    }

    #[test]
    fn geodesic_at_zero_is_normal_metric() {
        let space = catalog::su2_berger();
        let g = geodesic(&space, &berger_direction(), 0.0).unwrap();
        assert_eq!(g.lambdas, vec![1.0, 1.0]);
    }

    #[test]
    fn berger_geodesic_eigenvalues() {
        let space = catalog::su2_berger();
        let s = 6.0_f64.sqrt();
        for t in [0.5, 1.0, 3.0] {
            let g = geodesic(&space, &berger_direction(), t).unwrap();
            assert!((g.lambdas[0] - (-s / 3.0 * t).exp()).abs() < 1e-12);
            assert!((g.lambdas[1] - (s / 6.0 * t).exp()).abs() < 1e-12);
            assert!((g.relative_volume(&space) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn sigma_membership() {
        let space = catalog::su2_berger();
        assert!(berger_direction().on_sigma(&space, 1e-12));
        let zero = TangentDirection::new(vec![0.0, 0.0]);
        assert!(!zero.on_sigma(&space, 1e-12));
        assert!(zero.normalized(&space).is_err());
    }

    #[test]
    fn direction_time_roundtrip() {
        let space = catalog::so5_stiefel();
        // unit-volume direction on the 6-block space
        let dims = space.block_dims();
        let mut v = vec![-1.0, 0.3, -0.2, 0.5, 0.1, 0.0];
        let trace: f64 = v.iter().zip(dims).map(|(&x, &d)| d as f64 * x).sum();
        let total: f64 = dims.iter().map(|&d| d as f64).sum();
        for (x, &d) in v.iter_mut().zip(dims) {
            let _ = d;
            *x -= trace / total;
        }
        let v = TangentDirection::new(v).normalized(&space).unwrap();
        let t = 3.7;
        let g = geodesic(&space, &v, t).unwrap();
        let (v2, t2) = direction_and_time(&space, &g).unwrap();
        assert!((t - t2).abs() < 1e-10);
        for (a, b) in v.v.iter().zip(&v2.v) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn direction_of_base_point_fails() {
        let space = catalog::su2_berger();
        let g = DiagonalMetric::normal(2);
        assert!(matches!(direction_and_time(&space, &g), Err(Error::BasePoint)));
        let g = DiagonalMetric::new(vec![2.0, 1.0]).unwrap();
        assert!(matches!(direction_and_time(&space, &g), Err(Error::NonUnitVolume(_))));
    }

    #[test]
    fn stiefel_sequence_direction_ordering() {
        // eigenvalues (1/64, 1, 1, 2, 4, 4) at n = 2 have unit volume and a
        // direction with the most-shrinking block first
        let space = catalog::so5_stiefel();
        let g = DiagonalMetric::new(vec![1.0 / 64.0, 1.0, 1.0, 2.0, 4.0, 4.0]).unwrap();
        assert!((g.relative_volume(&space) - 1.0).abs() < 1e-12);
        let (v, t) = direction_and_time(&space, &g).unwrap();
        assert!(t > 0.0);
        assert!(v.v[0] < 0.0);
        assert!(v.v[3] > 0.0);
        assert!(v.v[3] <= v.v[4] + 1e-12);
        assert!((v.v[4] - v.v[5]).abs() < 1e-12);
    }

    #[test]
    fn volume_normalization() {
        let space = catalog::so5_stiefel();
        let g = DiagonalMetric::new(vec![4.0; 6]).unwrap();
        let n = normalize_volume(&space, &g).unwrap();
        for l in &n.lambdas {
            assert!((l - 1.0).abs() < 1e-12);
        }
        let g = DiagonalMetric::new(vec![2.0, 1.0, 1.0, 1.0, 1.0, 1.0]).unwrap();
        let n = normalize_volume(&space, &g).unwrap();
        let expected = 2.0 * 2.0_f64.powf(-1.0 / 9.0);
        assert!((n.lambdas[0] - expected).abs() < 1e-12);
        assert!((n.relative_volume(&space) - 1.0).abs() < 1e-12);
        let already = DiagonalMetric::new(vec![1.0 / 64.0, 1.0, 1.0, 2.0, 4.0, 4.0]).unwrap();
        let renorm = normalize_volume(&space, &already).unwrap();
        for (a, b) in already.lambdas.iter().zip(&renorm.lambdas) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_metric_passes_general_invariants() {
        let space = catalog::so5_stiefel();
        let g = DiagonalMetric::new(vec![0.5, 1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let general = g.to_general(&space);
        let report = general.invariance_report(&space);
        assert!(report.symmetry < 1e-12);
        assert!(report.min_eigenvalue > 0.0);
        assert!(report.commutation < 1e-12);
        // and converts back on the same decomposition
        let back = general.to_diagonal(&space, space.decomposition()).unwrap();
        for (a, b) in g.lambdas.iter().zip(&back.lambdas) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn submersion_metric_checks_on_stiefel() {
        let space = catalog::so5_stiefel();
        let k1 = Subspace::from_axes(10, &[0, 1], "k1");
        let k2 = Subspace::from_axes(10, &[0, 1, 2, 3, 4, 5], "k2");
        let n = 2.0_f64;
        let g = DiagonalMetric::new(vec![1.0 / (4.0 * n.powi(4)), 1.0, 1.0, n, 2.0 * n, 2.0 * n])
            .unwrap();
        let check = is_submersion_metric_diagonal(&space, &g, &k1, 1e-9).unwrap();
        assert!(check.is_submersion);
        // the normal metric is a submersion metric for every H-subalgebra
        let q = DiagonalMetric::normal(6);
        assert!(is_submersion_metric_diagonal(&space, &q, &k1, 1e-9).unwrap().is_submersion);
        assert!(is_submersion_metric_diagonal(&space, &q, &k2, 1e-9).unwrap().is_submersion);
        // λ₄ ≠ λ₅ breaks ad(m₂)-equivariance on the complement of k₂
        let check = is_submersion_metric_diagonal(&space, &g, &k2, 1e-9).unwrap();
        assert!(!check.is_submersion);
        assert!(check.equivariance_residual > 1e-3);
    }

    #[test]
    fn submersion_metric_rejects_non_subalgebra() {
        let space = catalog::so5_stiefel();
        // span(E, X2) is not closed: [E, X2] = X3 escapes
        let bad = Subspace::from_axes(10, &[0, 2], "bad");
        let g = DiagonalMetric::normal(6);
        assert!(is_submersion_metric_diagonal(&space, &g, &bad, 1e-9).is_err());
    }
}
