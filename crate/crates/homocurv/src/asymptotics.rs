//! Asymptotics of diverging metric families: eigenvalue partitions,
//! submersion directions and flags, curvature scans along geodesic rays,
//! and the classifier extracting the subalgebra structure of a diverging
//! sequence.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::curvature;
use crate::lie::Subspace;
use crate::metric::{self, DiagonalMetric, TangentDirection};
use crate::space::HomogeneousSpace;
use crate::{Error, Result, DEFAULT_CLUSTER_TOL, DEFAULT_TOL};

/// Partition of the blocks of a tangent direction into classes of equal
/// eigenvalue, in ascending order.
#[derive(Debug, Clone, Serialize)]
pub struct IndexPartition {
    /// sorted position -> original block index
    pub order: Vec<usize>,
    /// eigenvalues in ascending order
    pub sorted_values: Vec<f64>,
    /// distinct eigenvalues, ascending
    pub distinct: Vec<f64>,
    /// cumulative class boundaries: `r[0] = 0`, class `s` (1-based) covers
    /// sorted positions `r[s-1]..r[s]`
    pub r: Vec<usize>,
    pub cluster_tol: f64,
}

impl IndexPartition {
    pub fn class_count(&self) -> usize {
        self.distinct.len()
    }

    /// Sorted positions belonging to class `s` (0-based class index).
    pub fn class_positions(&self, s: usize) -> std::ops::Range<usize> {
        self.r[s]..self.r[s + 1]
    }

    /// Original block indices of class `s`.
    pub fn class_blocks(&self, s: usize) -> Vec<usize> {
        self.class_positions(s).map(|p| self.order[p]).collect()
    }

    /// Class index (0-based) of a sorted position.
    pub fn class_of_position(&self, pos: usize) -> usize {
        self.r
            .iter()
            .position(|&boundary| boundary > pos)
            .map(|s| s - 1)
            .unwrap_or(self.class_count() - 1)
    }

    /// Whether all eigenvalues fall in a single class (no separation).
    pub fn is_degenerate(&self) -> bool {
        self.class_count() == 1
    }
}

/// Cluster the eigenvalues of `v` into equal-value classes. Ties in the
/// sort are broken by original block index; two consecutive sorted values
/// join the same class when they differ by less than `cluster_tol` relative
/// to their magnitude.
pub fn partition(
    space: &HomogeneousSpace,
    v: &TangentDirection,
    cluster_tol: f64,
) -> Result<IndexPartition> {
    if v.v.len() != space.blocks() {
        return Err(Error::DimensionMismatch { expected: space.blocks(), got: v.v.len() });
    }
    if v.v.iter().all(|&x| x == 0.0) {
        return Err(Error::Invalid("cannot partition the zero direction".into()));
    }
    let mut order: Vec<usize> = (0..v.v.len()).collect();
    order.sort_by(|&a, &b| v.v[a].total_cmp(&v.v[b]).then(a.cmp(&b)));
    let sorted_values: Vec<f64> = order.iter().map(|&i| v.v[i]).collect();
    let mut distinct = vec![sorted_values[0]];
    let mut r = vec![0usize];
    for (pos, &val) in sorted_values.iter().enumerate().skip(1) {
        let prev = *distinct.last().unwrap();
        let scale = prev.abs().max(val.abs()).max(1.0);
        if (val - prev).abs() > cluster_tol * scale {
            r.push(pos);
            distinct.push(val);
        }
    }
    r.push(sorted_values.len());
    Ok(IndexPartition { order, sorted_values, distinct, r, cluster_tol })
}

/// Verdict of the submersion-direction test with the violating triples
/// (original block indices).
#[derive(Debug, Clone, Serialize)]
pub struct SubmersionDirectionCheck {
    pub is_submersion_direction: bool,
    pub witnesses: Vec<(usize, usize, usize)>,
}

/// Test whether a triple coefficient forces growth along the ray: `v` is a
/// submersion direction iff `[ijk] > 0` implies `vᵢ − vⱼ − vₖ + v̂₁ ≤ 0`
/// for every ordered triple, where `v̂₁` is the smallest eigenvalue.
pub fn is_submersion_direction(
    space: &HomogeneousSpace,
    v: &TangentDirection,
    tol: f64,
) -> Result<SubmersionDirectionCheck> {
    if v.v.len() != space.blocks() {
        return Err(Error::DimensionMismatch { expected: space.blocks(), got: v.v.len() });
    }
    let coeffs = space.coefficients();
    let vmin = v.v.iter().cloned().fold(f64::INFINITY, f64::min);
    let ell = space.blocks();
    let mut witnesses = Vec::new();
    for i in 0..ell {
        for j in 0..ell {
            for k in 0..ell {
                if coeffs.triple(i, j, k) > tol && v.v[i] - v.v[j] - v.v[k] + vmin > tol {
                    witnesses.push((i, j, k));
                }
            }
        }
    }
    Ok(SubmersionDirectionCheck { is_submersion_direction: witnesses.is_empty(), witnesses })
}

/// The subalgebra induced by a submersion direction, plus the largest
/// cross-class coefficient `[I₁ I_j I_k]` (which must vanish).
#[derive(Debug, Clone)]
pub struct InducedSubalgebra {
    pub subalgebra: Subspace,
    pub most_shrinking_blocks: Vec<usize>,
    pub cross_coefficient_max: f64,
}

/// For a submersion direction, the isotropy plus the most-shrinking
/// eigenvalue blocks span an intermediate subalgebra.
pub fn induced_subalgebra(
    space: &HomogeneousSpace,
    v: &TangentDirection,
) -> Result<InducedSubalgebra> {
    let check = is_submersion_direction(space, v, DEFAULT_TOL)?;
    if !check.is_submersion_direction {
        return Err(Error::Precondition(format!(
            "not a submersion direction; witness triples {:?}",
            check.witnesses
        )));
    }
    let part = partition(space, v, DEFAULT_CLUSTER_TOL)?;
    if part.is_degenerate() {
        return Err(Error::Precondition(
            "direction has a single eigenvalue class; it is not traceless".into(),
        ));
    }
    let blocks = part.class_blocks(0);
    let coeffs = space.coefficients();
    let mut cross = 0.0_f64;
    for s1 in 1..part.class_count() {
        for s2 in (s1 + 1)..part.class_count() {
            for &i in &blocks {
                for j in part.class_blocks(s1) {
                    for k in part.class_blocks(s2) {
                        cross = cross.max(coeffs.triple(i, j, k).abs());
                    }
                }
            }
        }
    }
    let span = space
        .decomposition()
        .span_of_blocks(&blocks, "m_k1")
        .sum(space.isotropy(), "k1");
    let sub_check = space.algebra().is_subalgebra(&span);
    if !sub_check.closed {
        return Err(Error::NotSubalgebra { residual: sub_check.residual });
    }
    Ok(InducedSubalgebra {
        subalgebra: span,
        most_shrinking_blocks: blocks,
        cross_coefficient_max: cross,
    })
}

/// Verdict of the flag-membership test for a direction.
#[derive(Debug, Clone, Serialize)]
pub struct FlagCheck {
    pub verdict: bool,
    /// the flag members match `h + m_{I₁..I_q}` as subspaces
    pub spans_match: bool,
    /// class triples violating the eigenvalue inequalities: `(q, i, j, k)`
    /// in 1-based class labels
    pub violations: Vec<(usize, usize, usize, usize)>,
    /// worst submersion-metric residual of `γ_v(t)` over the flag at
    /// sampled times (populated when the verdict holds)
    pub submersion_residual: f64,
}

/// Test whether `v` is adapted to a strictly nested flag of intermediate
/// subalgebras: the flag members must be spanned by the leading eigenvalue
/// classes, and for every `q` the class-level inequality
/// `[IᵢIⱼIₖ] > 0 ⟹ v̂ᵢ − v̂ⱼ − v̂ₖ + v̂_q ≤ 0` must hold on classes `≥ q`.
/// When it does, the whole geodesic ray consists of submersion metrics for
/// every member, which is verified at sampled times.
pub fn flag_check(
    space: &HomogeneousSpace,
    v: &TangentDirection,
    flag: &[Subspace],
    tol: f64,
) -> Result<FlagCheck> {
    if flag.is_empty() {
        return Err(Error::Precondition("empty flag".into()));
    }
    for w in flag.windows(2) {
        if !(w[0].dim() < w[1].dim() && w[1].contains_subspace(&w[0], DEFAULT_TOL)) {
            return Err(Error::Precondition("flag is not strictly nested".into()));
        }
    }
    for k in flag {
        let check = space.algebra().is_subalgebra(k);
        if !check.closed {
            return Err(Error::NotSubalgebra { residual: check.residual });
        }
        if !k.contains_subspace(space.isotropy(), DEFAULT_TOL) {
            return Err(Error::Precondition("flag member does not contain the isotropy".into()));
        }
    }
    let part = partition(space, v, DEFAULT_CLUSTER_TOL)?;
    let p = flag.len();
    if p > part.class_count() {
        return Err(Error::Precondition("flag is longer than the number of classes".into()));
    }
    // condition (i): members are unions of leading classes over the isotropy
    let mut spans_match = true;
    let mut acc: Vec<usize> = Vec::new();
    for (q, k) in flag.iter().enumerate() {
        acc.extend(part.class_blocks(q));
        let expected = space
            .decomposition()
            .span_of_blocks(&acc, "m_flag")
            .sum(space.isotropy(), "k_q");
        if !expected.same_span(k, DEFAULT_TOL) {
            spans_match = false;
        }
    }
    // condition (ii) on class-level coefficients
    let coeffs = space.coefficients();
    let lv = part.class_count();
    let class_triple = |si: usize, sj: usize, sk: usize| -> f64 {
        let mut acc = 0.0;
        for i in part.class_blocks(si) {
            for j in part.class_blocks(sj) {
                for k in part.class_blocks(sk) {
                    acc += coeffs.triple(i, j, k);
                }
            }
        }
        acc
    };
    let mut violations = Vec::new();
    for q in 0..p {
        for si in q..lv {
            for sj in q..lv {
                for sk in q..lv {
                    if class_triple(si, sj, sk) > tol {
                        let lhs = part.distinct[si] - part.distinct[sj] - part.distinct[sk]
                            + part.distinct[q];
                        if lhs > tol {
                            violations.push((q + 1, si + 1, sj + 1, sk + 1));
                        }
                    }
                }
            }
        }
    }
    let verdict = spans_match && violations.is_empty();
    let mut submersion_residual = 0.0_f64;
    if verdict {
        for &t in &[0.5, 1.0, 5.0] {
            let g = metric::geodesic(space, v, t)?;
            for k in flag {
                let check = metric::is_submersion_metric_diagonal(space, &g, k, tol)?;
                submersion_residual = submersion_residual
                    .max(check.off_block_residual)
                    .max(check.equivariance_residual);
            }
        }
    }
    Ok(FlagCheck { verdict, spans_match, violations, submersion_residual })
}

/// Scalar curvature along the ray `γ_v(t)` in closed form:
/// `½Σ dᵢbᵢ e^{−tvᵢ} − ¼Σ [ijk] e^{t(vᵢ−vⱼ−vₖ)}`.
pub fn scal_along_geodesic(space: &HomogeneousSpace, v: &TangentDirection, t: f64) -> f64 {
    let coeffs = space.coefficients();
    let ell = space.blocks();
    let mut scal = 0.0;
    for i in 0..ell {
        scal += 0.5 * coeffs.dim(i) as f64 * coeffs.b[i] * (-t * v.v[i]).exp();
    }
    for i in 0..ell {
        for j in 0..ell {
            for k in 0..ell {
                let c = coeffs.triple(i, j, k);
                if c != 0.0 {
                    scal -= 0.25 * c * (t * (v.v[i] - v.v[j] - v.v[k])).exp();
                }
            }
        }
    }
    scal
}

/// One row of a curvature scan.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScanRow {
    pub t: f64,
    pub scal: f64,
    pub ric_norm: f64,
    pub traceless_ric_norm: f64,
    pub rm_norm: f64,
}

/// Qualitative tail behaviour of one scanned quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailTrend {
    DivergesUp,
    DivergesDown,
    DecaysToZero,
    Bounded,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
    pub scal_trend: TailTrend,
    pub ric_trend: TailTrend,
    pub rm_trend: TailTrend,
}

/// Evaluate curvature summaries along the ray at the given times, with a
/// coarse trend classification over the tail quarter of the grid.
pub fn geodesic_scan(
    space: &HomogeneousSpace,
    v: &TangentDirection,
    t_grid: &[f64],
) -> Result<ScanReport> {
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let g = metric::geodesic(space, v, t)?;
        let report = curvature::norms(space, &g)?;
        rows.push(ScanRow {
            t,
            scal: report.scal,
            ric_norm: report.ric_norm,
            traceless_ric_norm: report.traceless_ric_norm,
            rm_norm: report.rm_norm,
        });
    }
    let tail = rows.len().saturating_sub(rows.len() / 4).min(rows.len().saturating_sub(1));
    let trend = |f: &dyn Fn(&ScanRow) -> f64, signed: bool| -> TailTrend {
        if rows.len() < 2 {
            return TailTrend::Bounded;
        }
        let last = f(rows.last().unwrap());
        let at_tail = f(&rows[tail.max(1) - 1]);
        if !last.is_finite() || last.abs() > 1e6 {
            if signed && last < 0.0 {
                return TailTrend::DivergesDown;
            }
            return TailTrend::DivergesUp;
        }
        if last.abs() < 1e-3 && last.abs() <= at_tail.abs() + 1e-12 {
            return TailTrend::DecaysToZero;
        }
        TailTrend::Bounded
    };
    Ok(ScanReport {
        scal_trend: trend(&|r: &ScanRow| r.scal, true),
        ric_trend: trend(&|r: &ScanRow| r.ric_norm, false),
        rm_trend: trend(&|r: &ScanRow| r.rm_norm, false),
        rows,
    })
}

/// Enumerate the candidate directions of a grid search over the traceless
/// unit sphere. Exact for two blocks (two points); a circle grid for three;
/// larger block counts are out of scope for enumeration.
pub fn sigma_grid(space: &HomogeneousSpace, resolution: usize) -> Result<Vec<TangentDirection>> {
    let dims: Vec<f64> = space.block_dims().iter().map(|&d| d as f64).collect();
    match dims.len() {
        0 | 1 => Ok(Vec::new()),
        2 => {
            let (d1, d2) = (dims[0], dims[1]);
            let v1 = (d2 / (d1 * (d1 + d2))).sqrt();
            let v2 = -d1 * v1 / d2;
            Ok(vec![
                TangentDirection::new(vec![v1, v2]),
                TangentDirection::new(vec![-v1, -v2]),
            ])
        }
        3 => {
            // d-orthonormal basis of the trace-zero plane
            let u1 = DVector::from_vec(vec![1.0 / dims[0], -1.0 / dims[1], 0.0]);
            let u2 = DVector::from_vec(vec![1.0 / dims[0], 1.0 / dims[1], -2.0 / dims[2]]);
            let d_dot = |a: &DVector<f64>, b: &DVector<f64>| -> f64 {
                (0..3).map(|i| dims[i] * a[i] * b[i]).sum()
            };
            let e1 = &u1 / d_dot(&u1, &u1).sqrt();
            let mut e2 = u2.clone() - &e1 * d_dot(&e1, &u2);
            e2 /= d_dot(&e2, &e2).sqrt();
            let mut out = Vec::with_capacity(resolution);
            for s in 0..resolution {
                let theta = std::f64::consts::TAU * s as f64 / resolution as f64;
                let v = &e1 * theta.cos() + &e2 * theta.sin();
                out.push(TangentDirection::new(v.iter().cloned().collect()));
            }
            Ok(out)
        }
        n => Err(Error::Invalid(format!("grid search is not supported for {n} blocks"))),
    }
}

/// Search the grid for submersion directions.
pub fn grid_search_submersion_directions(
    space: &HomogeneousSpace,
    resolution: usize,
) -> Result<Vec<TangentDirection>> {
    let mut out = Vec::new();
    for v in sigma_grid(space, resolution)? {
        if is_submersion_direction(space, &v, DEFAULT_TOL)?.is_submersion_direction {
            out.push(v);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// diverging sequences
// ---------------------------------------------------------------------------

/// A one-parameter family of diagonal metrics: either the power-law model
/// `λᵢ(n) = cᵢ·n^{aᵢ}` or a table of samples.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum SequenceSpec {
    Power {
        blocks: Vec<PowerBlock>,
        #[serde(default = "default_true")]
        unit_volume: bool,
    },
    Samples {
        /// rows `[n, λ₁, …, λ_ℓ]`
        rows: Vec<Vec<f64>>,
        #[serde(default)]
        unit_volume: bool,
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PowerBlock {
    pub c: f64,
    pub a: f64,
}

fn default_true() -> bool {
    true
}

impl SequenceSpec {
    pub fn power_law(c: Vec<f64>, a: Vec<f64>, unit_volume: bool) -> Self {
        SequenceSpec::Power {
            blocks: c.into_iter().zip(a).map(|(c, a)| PowerBlock { c, a }).collect(),
            unit_volume,
        }
    }

    pub fn unit_volume(&self) -> bool {
        match self {
            SequenceSpec::Power { unit_volume, .. } => *unit_volume,
            SequenceSpec::Samples { unit_volume, .. } => *unit_volume,
        }
    }

    pub fn blocks(&self) -> usize {
        match self {
            SequenceSpec::Power { blocks, .. } => blocks.len(),
            SequenceSpec::Samples { rows, .. } => {
                rows.first().map(|r| r.len().saturating_sub(1)).unwrap_or(0)
            }
        }
    }

    /// Eigenvalues at parameter `n` (power model evaluates the law; sample
    /// tables interpolate nothing and pick the nearest row).
    pub fn lambdas_at(&self, n: f64) -> Vec<f64> {
        match self {
            SequenceSpec::Power { blocks, .. } => {
                blocks.iter().map(|b| b.c * n.powf(b.a)).collect()
            }
            SequenceSpec::Samples { rows, .. } => {
                let row = rows
                    .iter()
                    .min_by(|a, b| (a[0] - n).abs().total_cmp(&(b[0] - n).abs()))
                    .expect("sample table is nonempty");
                row[1..].to_vec()
            }
        }
    }

    /// The power-law data `(c, a)`: direct for the power model, fitted by
    /// log-log least squares over the trailing half of the samples with an
    /// R² quality gate otherwise.
    pub fn power_data(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        match self {
            SequenceSpec::Power { blocks, .. } => {
                if blocks.iter().any(|b| b.c <= 0.0) {
                    return Err(Error::Invalid("power-law coefficients must be positive".into()));
                }
                Ok((blocks.iter().map(|b| b.c).collect(), blocks.iter().map(|b| b.a).collect()))
            }
            SequenceSpec::Samples { rows, .. } => {
                let ell = self.blocks();
                if rows.len() < 4 {
                    return Err(Error::Invalid("need at least 4 sample rows to fit".into()));
                }
                let start = rows.len() / 2;
                let tail = &rows[start..];
                let mut c = Vec::with_capacity(ell);
                let mut a = Vec::with_capacity(ell);
                for i in 0..ell {
                    let xs: Vec<f64> = tail.iter().map(|r| r[0].ln()).collect();
                    let ys: Vec<f64> = tail.iter().map(|r| r[i + 1].ln()).collect();
                    let (slope, intercept, r2) = linear_fit(&xs, &ys);
                    if r2 < 0.999 {
                        return Err(Error::Invalid(format!(
                            "block {} does not follow a power law (R² = {r2:.6})",
                            i + 1
                        )));
                    }
                    a.push(slope);
                    c.push(intercept.exp());
                }
                Ok((c, a))
            }
        }
    }
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return (0.0, my, 1.0);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy < 1e-20 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (slope, intercept, r2)
}

/// A limit in `[0, +∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitValue {
    Finite(f64),
    Infinite,
}

impl Serialize for LimitValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            LimitValue::Finite(x) => s.serialize_f64(*x),
            LimitValue::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Limit classification of the scalar curvature along a sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalLimit {
    Finite(f64),
    NegInfinite,
    PosInfinite,
}

impl Serialize for ScalLimit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ScalLimit::Finite(x) => s.serialize_f64(*x),
            ScalLimit::NegInfinite => s.serialize_str("-inf"),
            ScalLimit::PosInfinite => s.serialize_str("+inf"),
        }
    }
}

/// One member of the flag extracted from a sequence.
#[derive(Debug, Clone, Serialize)]
pub struct FlagMember {
    pub dim: usize,
    pub toral: bool,
    pub subalgebra_residual: f64,
    /// 1-based sorted block positions spanned together with the isotropy
    pub blocks: Vec<usize>,
    #[serde(skip)]
    pub subspace: Subspace,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionVerdict {
    pub holds: bool,
    /// violating triples `(i, j, k)` in 1-based sorted positions with the
    /// offending eigenvalue-ratio limit `p_kj`
    pub violations: Vec<BViolation>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BViolation {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub p_kj: f64,
}

/// Full classifier output for a diverging sequence. Block indices in this
/// report are 1-based positions in the eigenvalue-sorted order recorded in
/// `order`.
#[derive(Debug, Clone, Serialize)]
pub struct SequenceReport {
    /// sorted position (0-based vector index) -> original block index
    pub order: Vec<usize>,
    pub exponents: Vec<f64>,
    pub coefficients: Vec<f64>,
    pub limit_direction: Vec<f64>,
    /// 1-based sorted positions of the shrinking eigenvalues
    pub i_sh: Vec<usize>,
    /// 1-based sorted positions of the generalized bounded eigenvalues
    pub i_gb: Vec<usize>,
    /// eigenvalue-ratio limits `p[i][j] = lim λᵢ/λⱼ` in sorted positions
    pub p_inf: Vec<Vec<LimitValue>>,
    /// the flag `k₁ ⊊ … ⊊ k_{p−1} ⊊ l'`
    pub flag: Vec<FlagMember>,
    /// `l = h + (shrinking blocks)`
    pub l: FlagMember,
    /// `l' = h + (generalized bounded blocks)`, the last flag member
    pub l_prime: FlagMember,
    /// whether the limit direction satisfies the flag inequalities
    pub zeta_membership: bool,
    pub condition_a: ConditionVerdict,
    pub condition_b: ConditionVerdict,
    pub extended_b_on_igb: ConditionVerdict,
    pub scal_limit: ScalLimit,
}

/// Classify a diverging sequence of diagonal metrics in a fixed
/// decomposition: extract the shrinking and generalized-bounded index sets,
/// the induced flag of intermediate subalgebras with toral verdicts, the
/// ratio-limit conditions, and the scalar curvature limit.
pub fn classify_sequence(space: &HomogeneousSpace, seq: &SequenceSpec) -> Result<SequenceReport> {
    let ell = space.blocks();
    if seq.blocks() != ell {
        return Err(Error::DimensionMismatch { expected: ell, got: seq.blocks() });
    }
    let (c_raw, a_raw) = seq.power_data()?;
    let dims: Vec<f64> = space.block_dims().iter().map(|&d| d as f64).collect();
    if seq.unit_volume() {
        let trace: f64 = a_raw.iter().zip(&dims).map(|(&a, &d)| d * a).sum();
        let vol: f64 = c_raw.iter().zip(&dims).map(|(&c, &d)| c.powf(d)).product();
        if trace.abs() > 1e-9 || (vol - 1.0).abs() > 1e-9 {
            return Err(Error::Invalid(format!(
                "sequence is flagged unit-volume but Σd·a = {trace:.3e}, Πc^d = {vol:.6}"
            )));
        }
    }
    if a_raw.iter().all(|&a| a.abs() < 1e-12) {
        return Err(Error::NotDivergent);
    }

    // sort blocks by (exponent, coefficient, index): the asymptotic
    // eigenvalue order
    let mut order: Vec<usize> = (0..ell).collect();
    order.sort_by(|&x, &y| {
        a_raw[x].total_cmp(&a_raw[y]).then(c_raw[x].total_cmp(&c_raw[y])).then(x.cmp(&y))
    });
    let a: Vec<f64> = order.iter().map(|&i| a_raw[i]).collect();
    let c: Vec<f64> = order.iter().map(|&i| c_raw[i]).collect();
    let d: Vec<f64> = order.iter().map(|&i| dims[i]).collect();
    let triple =
        |i: usize, j: usize, k: usize| space.coefficients().triple(order[i], order[j], order[k]);
    let b_sorted: Vec<f64> = order.iter().map(|&i| space.coefficients().b[i]).collect();

    // limit direction and its classes
    let norm: f64 = a.iter().zip(&d).map(|(&ai, &di)| di * ai * ai).sum::<f64>().sqrt();
    let v_inf: Vec<f64> = a.iter().map(|&ai| ai / norm).collect();
    let mut class_start = vec![0usize];
    for pos in 1..ell {
        let scale = a[pos].abs().max(a[pos - 1].abs()).max(1.0);
        if (a[pos] - a[pos - 1]).abs() > DEFAULT_CLUSTER_TOL * scale {
            class_start.push(pos);
        }
    }
    class_start.push(ell);
    let lv = class_start.len() - 1;
    let class_range = |s: usize| class_start[s]..class_start[s + 1];
    let class_exponent = |s: usize| a[class_start[s]];

    // shrinking and generalized-bounded sets
    let r_tilde = (0..ell).take_while(|&pos| a[pos] < -1e-12).count();
    let p = (0..lv).take_while(|&s| class_exponent(s) <= 1e-12).count();
    if r_tilde == 0 || p == 0 {
        return Err(Error::Invalid(
            "sequence has no shrinking eigenvalues; it does not diverge with unit volume".into(),
        ));
    }
    let i_sh: Vec<usize> = (1..=r_tilde).collect();
    let r_p = class_start[p];
    let i_gb: Vec<usize> = (1..=r_p).collect();

    // ratio limits
    let p_limit = |k: usize, j: usize| -> LimitValue {
        if (a[k] - a[j]).abs() < 1e-12 {
            LimitValue::Finite(c[k] / c[j])
        } else if a[k] > a[j] {
            LimitValue::Infinite
        } else {
            LimitValue::Finite(0.0)
        }
    };
    let p_inf: Vec<Vec<LimitValue>> =
        (0..ell).map(|i| (0..ell).map(|j| p_limit(i, j)).collect()).collect();

    // flag members k_q = h + classes 1..q, l' = k_p, l = h + shrinking
    let member = |positions: std::ops::Range<usize>| -> FlagMember {
        let blocks: Vec<usize> = positions.clone().map(|pos| order[pos]).collect();
        let span = space
            .decomposition()
            .span_of_blocks(&blocks, "m_part")
            .sum(space.isotropy(), "member");
        let sub = space.algebra().is_subalgebra(&span);
        let toral = space
            .algebra()
            .is_toral(space.isotropy(), &span)
            .map(|t| t.toral)
            .unwrap_or(false);
        FlagMember {
            dim: span.dim(),
            toral,
            subalgebra_residual: sub.residual,
            blocks: positions.map(|pos| pos + 1).collect(),
            subspace: span,
        }
    };
    let flag: Vec<FlagMember> = (1..=p).map(|q| member(0..class_start[q])).collect();
    let l = member(0..r_tilde);
    let l_prime = flag.last().expect("p ≥ 1").clone();

    // flag-inequality membership of the limit direction
    let mut zeta_membership = true;
    for q in 0..p {
        for si in q..lv {
            for sj in q..lv {
                for sk in q..lv {
                    let mut coeff = 0.0;
                    for i in class_range(si) {
                        for j in class_range(sj) {
                            for k in class_range(sk) {
                                coeff += triple(i, j, k);
                            }
                        }
                    }
                    if coeff > DEFAULT_TOL {
                        let lhs = (class_exponent(si) - class_exponent(sj) - class_exponent(sk)
                            + class_exponent(q))
                            / norm;
                        if lhs > DEFAULT_TOL {
                            zeta_membership = false;
                        }
                    }
                }
            }
        }
    }

    // condition A: with a fixed decomposition the coefficients are
    // n-independent, so vanishing limits are automatic
    let condition_a = ConditionVerdict { holds: true, violations: Vec::new() };

    // condition B on a set S: [S j k] > 0 forces the ratio limit to be 1
    let condition_b_on = |set: &[usize]| -> ConditionVerdict {
        let mut violations = Vec::new();
        for j in 0..ell {
            for k in (j + 1)..ell {
                let coeff: f64 = set.iter().map(|&pos1| triple(pos1 - 1, j, k)).sum();
                if coeff > DEFAULT_TOL {
                    let ratio = p_limit(k, j);
                    let bad = match ratio {
                        LimitValue::Finite(x) => (x - 1.0).abs() > 1e-9,
                        LimitValue::Infinite => true,
                    };
                    if bad {
                        let i = set
                            .iter()
                            .copied()
                            .find(|&pos1| triple(pos1 - 1, j, k) > DEFAULT_TOL)
                            .unwrap_or(set[0]);
                        let p_kj = match ratio {
                            LimitValue::Finite(x) => x,
                            LimitValue::Infinite => f64::INFINITY,
                        };
                        violations.push(BViolation { i, j: j + 1, k: k + 1, p_kj });
                    }
                }
            }
        }
        ConditionVerdict { holds: violations.is_empty(), violations }
    };
    let condition_b = condition_b_on(&i_sh);
    let extended_b_on_igb = condition_b_on(&i_gb);

    // scalar curvature limit by exponent bookkeeping
    let mut terms: Vec<(f64, f64)> = Vec::new();
    for i in 0..ell {
        terms.push((-a[i], 0.5 * d[i] * b_sorted[i] / c[i]));
    }
    for i in 0..ell {
        for j in 0..ell {
            for k in 0..ell {
                let t = triple(i, j, k);
                if t != 0.0 {
                    terms.push((a[i] - a[j] - a[k], -0.25 * t * c[i] / (c[j] * c[k])));
                }
            }
        }
    }
    let scal_limit = limit_of_terms(&terms);

    Ok(SequenceReport {
        order,
        exponents: a,
        coefficients: c,
        limit_direction: v_inf,
        i_sh,
        i_gb,
        p_inf,
        flag,
        l,
        l_prime,
        zeta_membership,
        condition_a,
        condition_b,
        extended_b_on_igb,
        scal_limit,
    })
}

/// Limit of `Σ coeffᵢ·n^{expᵢ}` as `n → ∞`, with exact cancellation of
/// equal-exponent groups.
fn limit_of_terms(terms: &[(f64, f64)]) -> ScalLimit {
    let mut sorted: Vec<(f64, f64)> = terms.to_vec();
    sorted.sort_by(|x, y| y.0.total_cmp(&x.0));
    let mut idx = 0;
    while idx < sorted.len() {
        let expo = sorted[idx].0;
        let mut sum = 0.0;
        let mut abs_sum = 0.0;
        let mut end = idx;
        while end < sorted.len() && (sorted[end].0 - expo).abs() < 1e-9 {
            sum += sorted[end].1;
            abs_sum += sorted[end].1.abs();
            end += 1;
        }
        if sum.abs() > 1e-9 * abs_sum.max(1e-300) {
            if expo > 1e-12 {
                return if sum > 0.0 { ScalLimit::PosInfinite } else { ScalLimit::NegInfinite };
            }
            if expo.abs() <= 1e-12 {
                return ScalLimit::Finite(sum);
            }
            return ScalLimit::Finite(0.0);
        }
        idx = end;
    }
    ScalLimit::Finite(0.0)
}

/// Report of the toral tail estimate: at each sampled `n` the scalar
/// curvature must lie below the tail sums over blocks past the toral flag
/// member.
#[derive(Debug, Clone, Serialize)]
pub struct ToralEstimate {
    pub vacuous: bool,
    pub rows: Vec<ToralEstimateRow>,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ToralEstimateRow {
    pub n: f64,
    pub scal: f64,
    pub tail_bound: f64,
    pub margin: f64,
}

/// Check the tail estimate numerically for the `q`-th flag member
/// (1-based), which must be toral.
pub fn toral_scal_estimate_check(
    space: &HomogeneousSpace,
    seq: &SequenceSpec,
    q: usize,
    n_grid: &[f64],
) -> Result<ToralEstimate> {
    let report = classify_sequence(space, seq)?;
    if q == 0 || q > report.flag.len() {
        return Err(Error::Precondition(format!(
            "flag position {q} out of range 1..={}",
            report.flag.len()
        )));
    }
    let member = &report.flag[q - 1];
    if !member.toral {
        return Err(Error::Precondition(format!(
            "flag member {q} is not toral; the estimate is not claimed"
        )));
    }
    let r_q = *member.blocks.last().expect("member spans at least one block");
    let ell = space.blocks();
    if r_q >= ell {
        return Ok(ToralEstimate { vacuous: true, rows: Vec::new(), holds: true });
    }
    let coeffs = space.coefficients();
    let mut rows = Vec::with_capacity(n_grid.len());
    let mut holds = true;
    for &n in n_grid {
        let lam_raw = seq.lambdas_at(n);
        let lam: Vec<f64> = report.order.iter().map(|&i| lam_raw[i]).collect();
        let g = DiagonalMetric::new(lam_raw.clone())?;
        let scal = curvature::scalar_curvature(space, &g)?;
        let mut bound = 0.0;
        for pos in r_q..ell {
            let orig = report.order[pos];
            bound += 0.5 * coeffs.dim(orig) as f64 * coeffs.b[orig] / lam[pos];
        }
        for i in r_q..ell {
            for j in r_q..ell {
                for k in r_q..ell {
                    let t = coeffs.triple(report.order[i], report.order[j], report.order[k]);
                    if t != 0.0 {
                        bound -= 0.25 * t * lam[i] / (lam[j] * lam[k]);
                    }
                }
            }
        }
        let margin = bound - scal;
        if margin < -1e-9 {
            holds = false;
        }
        rows.push(ToralEstimateRow { n, scal, tail_bound: bound, margin });
    }
    Ok(ToralEstimate { vacuous: false, rows, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn berger_v() -> TangentDirection {
        let s = 6.0_f64.sqrt();
        TangentDirection::new(vec![-s / 3.0, s / 6.0])
    }

    #[test]
    fn partition_berger() {
        let space = catalog::su2_berger();
        let part = partition(&space, &berger_v(), 1e-8).unwrap();
        assert_eq!(part.class_count(), 2);
        assert_eq!(part.class_blocks(0), vec![0]);
        assert_eq!(part.class_blocks(1), vec![1]);
        let s = 6.0_f64.sqrt();
        assert!((part.distinct[0] + s / 3.0).abs() < 1e-12);
    }

    #[test]
    fn partition_stiefel_limit_direction() {
        let space = catalog::so5_stiefel();
        let s20 = 20.0_f64.sqrt();
        let v = TangentDirection::new(vec![
            -4.0 / s20,
            0.0,
            0.0,
            1.0 / s20,
            1.0 / s20,
            1.0 / s20,
        ]);
        assert!(v.on_sigma(&space, 1e-12));
        let part = partition(&space, &v, 1e-8).unwrap();
        assert_eq!(part.class_count(), 3);
        assert_eq!(part.class_blocks(0), vec![0]);
        assert_eq!(part.class_blocks(1), vec![1, 2]);
        assert_eq!(part.class_blocks(2), vec![3, 4, 5]);
    }

    #[test]
    fn partition_rejects_zero_flags_degenerate() {
        let space = catalog::su2_berger();
        assert!(partition(&space, &TangentDirection::new(vec![0.0, 0.0]), 1e-8).is_err());
        let flat = TangentDirection::new(vec![0.5, 0.5]);
        let part = partition(&space, &flat, 1e-8).unwrap();
        assert!(part.is_degenerate());
    }

    #[test]
    fn berger_direction_is_the_only_submersion_direction() {
        let space = catalog::su2_berger();
        let accepted = grid_search_submersion_directions(&space, 2).unwrap();
        assert_eq!(accepted.len(), 1);
        let s = 6.0_f64.sqrt();
        assert!((accepted[0].v[0] + s / 3.0).abs() < 1e-9);
        // the reversed direction fails with the expected witness
        let reversed = TangentDirection::new(vec![s / 3.0, -s / 6.0]);
        let check = is_submersion_direction(&space, &reversed, 1e-9).unwrap();
        assert!(!check.is_submersion_direction);
        assert!(check.witnesses.contains(&(0, 1, 1)));
    }

    #[test]
    fn induced_subalgebra_berger_and_stiefel() {
        let space = catalog::su2_berger();
        let induced = induced_subalgebra(&space, &berger_v()).unwrap();
        assert_eq!(induced.subalgebra.dim(), 1);
        assert!(induced.cross_coefficient_max < 1e-12);
        assert!(space
            .algebra()
            .is_toral(space.isotropy(), &induced.subalgebra)
            .unwrap()
            .toral);

        let space = catalog::so5_stiefel();
        let s20 = 20.0_f64.sqrt();
        let v = TangentDirection::new(vec![
            -4.0 / s20,
            0.0,
            0.0,
            1.0 / s20,
            1.0 / s20,
            1.0 / s20,
        ]);
        let induced = induced_subalgebra(&space, &v).unwrap();
        assert_eq!(induced.subalgebra.dim(), 2);
        assert_eq!(induced.most_shrinking_blocks, vec![0]);
    }

    #[test]
    fn flag_checks_on_stiefel() {
        let space = catalog::so5_stiefel();
        let k1 = Subspace::from_axes(10, &[0, 1], "k1");
        let k2 = Subspace::from_axes(10, &[0, 1, 2, 3, 4, 5], "k2");
        let s20 = 20.0_f64.sqrt();
        let v_inf = TangentDirection::new(vec![
            -4.0 / s20,
            0.0,
            0.0,
            1.0 / s20,
            1.0 / s20,
            1.0 / s20,
        ]);
        let check = flag_check(&space, &v_inf, &[k1.clone()], 1e-9).unwrap();
        assert!(check.verdict, "violations {:?}", check.violations);
        assert!(check.submersion_residual < 1e-9);
        let check = flag_check(&space, &v_inf, &[k1.clone(), k2.clone()], 1e-9).unwrap();
        assert!(check.verdict);

        // the finite-n direction is adapted to k1 but not to (k1, k2)
        let n = 2.0_f64;
        let g = DiagonalMetric::new(vec![1.0 / (4.0 * n.powi(4)), 1.0, 1.0, n, 2.0 * n, 2.0 * n])
            .unwrap();
        let (v_n, _) = metric::direction_and_time(&space, &g).unwrap();
        let check = flag_check(&space, &v_n, &[k1.clone()], 1e-9).unwrap();
        assert!(check.verdict);
        let check = flag_check(&space, &v_n, &[k1, k2], 1e-9).unwrap();
        assert!(!check.verdict);
        assert!(!check.violations.is_empty());
    }

    #[test]
    fn flag_check_rejects_bad_nesting() {
        let space = catalog::so5_stiefel();
        let k1 = Subspace::from_axes(10, &[0, 1], "k1");
        let k2 = Subspace::from_axes(10, &[0, 1, 2, 3, 4, 5], "k2");
        assert!(flag_check(&space, &berger_v_on(&space), &[k2, k1], 1e-9).is_err());
    }

    fn berger_v_on(space: &HomogeneousSpace) -> TangentDirection {
        let ell = space.blocks();
        let mut v = vec![1.0; ell];
        v[0] = -1.0;
        TangentDirection::new(v)
    }

    #[test]
    fn scal_closed_form_matches_direct_evaluation() {
        let space = catalog::so5_stiefel();
        let s20 = 20.0_f64.sqrt();
        let v = TangentDirection::new(vec![
            -4.0 / s20,
            0.0,
            0.0,
            1.0 / s20,
            1.0 / s20,
            1.0 / s20,
        ]);
        for t in [0.0, 0.7, 3.0, 11.0] {
            let direct = curvature::scalar_curvature(
                &space,
                &metric::geodesic(&space, &v, t).unwrap(),
            )
            .unwrap();
            let closed = scal_along_geodesic(&space, &v, t);
            assert!((direct - closed).abs() < 1e-9 * direct.abs().max(1.0));
        }
        // t = 0 gives the normal metric's scalar curvature
        let q = curvature::scalar_curvature(&space, &DiagonalMetric::normal(6)).unwrap();
        assert!((scal_along_geodesic(&space, &v, 0.0) - q).abs() < 1e-12);
    }

    #[test]
    fn classify_stiefel_sequence() {
        let space = catalog::so5_stiefel();
        let seq = catalog::reference_sequence("so5_stiefel").unwrap();
        let report = classify_sequence(&space, &seq).unwrap();
        assert_eq!(report.i_sh, vec![1]);
        assert_eq!(report.i_gb, vec![1, 2, 3]);
        assert_eq!(report.l.dim, 2);
        assert!(report.l.toral);
        assert_eq!(report.l_prime.dim, 6);
        assert!(!report.l_prime.toral);
        assert!(report.zeta_membership);
        assert!(report.condition_a.holds);
        assert!(report.condition_b.holds);
        assert!(!report.extended_b_on_igb.holds);
        let witness = report
            .extended_b_on_igb
            .violations
            .iter()
            .find(|w| (w.i, w.j, w.k) == (2, 4, 5))
            .expect("canonical witness triple present");
        assert!((witness.p_kj - 2.0).abs() < 1e-12);
        match report.scal_limit {
            ScalLimit::Finite(x) => assert!((x - 7.0).abs() < 1e-9),
            other => panic!("expected finite limit, got {other:?}"),
        }
    }

    #[test]
    fn classify_berger_sequence() {
        let space = catalog::su2_berger();
        let seq = catalog::reference_sequence("su2_berger").unwrap();
        let report = classify_sequence(&space, &seq).unwrap();
        assert_eq!(report.i_sh, vec![1]);
        assert_eq!(report.l.dim, 1);
        assert!(report.l.toral);
        assert!(report.l_prime.toral);
        match report.scal_limit {
            ScalLimit::Finite(x) => assert!(x <= 1e-9),
            other => panic!("expected non-positive finite limit, got {other:?}"),
        }
    }

    #[test]
    fn classify_rejects_constant_sequence() {
        let space = catalog::su2_berger();
        let seq = SequenceSpec::power_law(vec![1.0, 1.0], vec![0.0, 0.0], true);
        assert!(matches!(classify_sequence(&space, &seq), Err(Error::NotDivergent)));
    }

    #[test]
    fn classify_fits_sample_tables() {
        let space = catalog::s1xs2();
        let rows: Vec<Vec<f64>> = (1..=16)
            .map(|n| {
                let n = n as f64;
                vec![n, 1.0 / (n * n), n]
            })
            .collect();
        let seq = SequenceSpec::Samples { rows, unit_volume: true };
        let report = classify_sequence(&space, &seq).unwrap();
        assert_eq!(report.i_sh, vec![1]);
        assert!((report.exponents[0] + 2.0).abs() < 1e-9);
        assert!(report.l.toral);
    }

    #[test]
    fn sample_fit_rejects_non_power_law() {
        let space = catalog::s1xs2();
        let rows: Vec<Vec<f64>> = (1..=16)
            .map(|n| {
                let n = n as f64;
                vec![n, (n).exp(), n]
            })
            .collect();
        let seq = SequenceSpec::Samples { rows, unit_volume: false };
        assert!(classify_sequence(&space, &seq).is_err());
    }

    #[test]
    fn toral_estimate_on_stiefel() {
        let space = catalog::so5_stiefel();
        let seq = catalog::reference_sequence("so5_stiefel").unwrap();
        let est = toral_scal_estimate_check(&space, &seq, 1, &[1.0, 2.0, 5.0, 10.0, 100.0])
            .unwrap();
        assert!(!est.vacuous);
        assert!(est.holds);
        for row in &est.rows {
            assert!(row.margin > 0.0, "margin {} at n {}", row.margin, row.n);
        }
        // position 2 is l' = k2, non-toral: the estimate is not claimed
        assert!(toral_scal_estimate_check(&space, &seq, 2, &[2.0]).is_err());
    }

    #[test]
    fn toral_estimate_vacuous_when_no_tail() {
        // on s1xs2 the single flag member spans everything: empty tail
        let space = catalog::s1xs2();
        let seq = catalog::reference_sequence("s1xs2").unwrap();
        let report = classify_sequence(&space, &seq).unwrap();
        assert_eq!(report.flag.len(), 1);
        let est = toral_scal_estimate_check(&space, &seq, 1, &[2.0]).unwrap();
        // l' = h + m1 leaves m2 in the tail here, so this is not vacuous;
        // the estimate itself must hold
        assert!(est.vacuous || est.holds);
    }

    #[test]
    fn scan_trends_berger() {
        let space = catalog::su2_berger();
        let grid: Vec<f64> = (0..=60).map(|i| i as f64).collect();
        let scan = geodesic_scan(&space, &berger_v(), &grid).unwrap();
        assert_eq!(scan.rows.len(), 61);
        assert_eq!(scan.rm_trend, TailTrend::DecaysToZero);
        let last = scan.rows.last().unwrap();
        assert!(last.rm_norm < 1e-3);
    }

    #[test]
    fn limit_bookkeeping_handles_cancellation() {
        // +n² − n² + 3 − 5/n → 3
        let terms = vec![(2.0, 1.0), (2.0, -1.0), (0.0, 3.0), (-1.0, -5.0)];
        assert_eq!(limit_of_terms(&terms), ScalLimit::Finite(3.0));
        let terms = vec![(2.0, 1.0), (0.0, 3.0)];
        assert_eq!(limit_of_terms(&terms), ScalLimit::PosInfinite);
        let terms = vec![(1.0, -0.5), (0.0, 3.0)];
        assert_eq!(limit_of_terms(&terms), ScalLimit::NegInfinite);
        let terms = vec![(-1.0, 4.0)];
        assert_eq!(limit_of_terms(&terms), ScalLimit::Finite(0.0));
    }
}
