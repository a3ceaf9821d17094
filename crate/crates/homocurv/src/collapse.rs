//! Bracket norms along metric sequences and the algebraic collapse
//! classification.
//!
//! The squared bracket norm splits into an isotropy part that does not
//! depend on the metric, a fiber part measuring brackets falling into the
//! isotropy, and a horizontal part measuring brackets between complement
//! blocks. A sequence collapses algebraically when the metric-dependent
//! parts blow up. Sums here run over ordered index pairs.

use serde::Serialize;

use crate::asymptotics::SequenceSpec;
use crate::metric::DiagonalMetric;
use crate::space::HomogeneousSpace;
use crate::Result;

/// Bracket norms of one metric.
#[derive(Debug, Clone, Serialize)]
pub struct CollapseReport {
    /// `|μ restricted to h∧g|²`: independent of the metric
    pub isotropy_part: f64,
    /// `Σ dᵢcᵢ/λᵢ`: squared norm of the isotropy-valued bracket component
    pub mu_h: f64,
    /// `Σ [ijk]·λₖ/(λᵢλⱼ)`: squared norm of the complement-valued part
    pub mu_m: f64,
    pub total: f64,
}

/// Evaluate the closed-form bracket norms of a diagonal metric.
pub fn bracket_norms(space: &HomogeneousSpace, g: &DiagonalMetric) -> Result<CollapseReport> {
    g.check_against(space)?;
    let coeffs = space.coefficients();
    let ell = space.blocks();
    let lam = &g.lambdas;
    let mut mu_h = 0.0;
    for i in 0..ell {
        mu_h += coeffs.dim(i) as f64 * coeffs.c[i] / lam[i];
    }
    let mut mu_m = 0.0;
    for i in 0..ell {
        for j in 0..ell {
            for k in 0..ell {
                let t = coeffs.triple(i, j, k);
                if t != 0.0 {
                    mu_m += t * lam[k] / (lam[i] * lam[j]);
                }
            }
        }
    }
    let isotropy_part = isotropy_bracket_norm(space) + {
        let mut acc = 0.0;
        for i in 0..ell {
            acc += coeffs.dim(i) as f64 * coeffs.c[i];
        }
        acc
    };
    Ok(CollapseReport { isotropy_part, mu_h, mu_m, total: isotropy_part + mu_h + mu_m })
}

/// `|μ restricted to h∧h|²` over unordered isotropy basis pairs.
fn isotropy_bracket_norm(space: &HomogeneousSpace) -> f64 {
    let h = space.isotropy();
    let mut acc = 0.0;
    for a in 0..h.dim() {
        for b in (a + 1)..h.dim() {
            let w = space
                .algebra()
                .bracket(&h.basis().column(a).clone_owned(), &h.basis().column(b).clone_owned())
                .expect("dims");
            acc += w.norm_squared();
        }
    }
    acc
}

/// One term of the collapse exponent analysis.
#[derive(Debug, Clone, Serialize)]
pub struct CollapseTerm {
    pub part: &'static str,
    /// block indices: `[i]` for fiber terms, `[i, j, k]` for horizontal ones
    pub blocks: Vec<usize>,
    pub coefficient: f64,
    pub exponent: f64,
}

/// Limit classification of the bracket norms along a sequence.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CollapseVerdict {
    Collapsed { dominant_exponent: f64 },
    NonCollapsed,
    /// sample tables only certify boundedness over the observed rows
    BoundedSoFar { max_total: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct CollapseLimitReport {
    pub verdict: CollapseVerdict,
    pub terms: Vec<CollapseTerm>,
}

/// Classify a sequence as algebraically collapsed or not. In the power-law
/// model every term of `|μ_h|² + |μ_m|²` is a nonnegative coefficient times
/// a power of `n`, so the limit blows up exactly when some present term has
/// a positive exponent.
pub fn collapse_limit(space: &HomogeneousSpace, seq: &SequenceSpec) -> Result<CollapseLimitReport> {
    if let SequenceSpec::Samples { rows, .. } = seq {
        let mut max_total = 0.0_f64;
        for row in rows {
            let g = DiagonalMetric::new(row[1..].to_vec())?;
            let report = bracket_norms(space, &g)?;
            max_total = max_total.max(report.mu_h + report.mu_m);
        }
        return Ok(CollapseLimitReport {
            verdict: CollapseVerdict::BoundedSoFar { max_total },
            terms: Vec::new(),
        });
    }
    let (c, a) = seq.power_data()?;
    let coeffs = space.coefficients();
    let ell = space.blocks();
    let mut terms = Vec::new();
    for i in 0..ell {
        let coefficient = coeffs.dim(i) as f64 * coeffs.c[i] / c[i];
        if coefficient > 0.0 {
            terms.push(CollapseTerm {
                part: "mu_h",
                blocks: vec![i + 1],
                coefficient,
                exponent: -a[i],
            });
        }
    }
    for i in 0..ell {
        for j in 0..ell {
            for k in 0..ell {
                let t = coeffs.triple(i, j, k);
                if t > 0.0 {
                    terms.push(CollapseTerm {
                        part: "mu_m",
                        blocks: vec![i + 1, j + 1, k + 1],
                        coefficient: t * c[k] / (c[i] * c[j]),
                        exponent: a[k] - a[i] - a[j],
                    });
                }
            }
        }
    }
    let dominant = terms
        .iter()
        .filter(|t| t.coefficient > 1e-12)
        .map(|t| t.exponent)
        .fold(f64::NEG_INFINITY, f64::max);
    let verdict = if dominant > 1e-12 {
        CollapseVerdict::Collapsed { dominant_exponent: dominant }
    } else {
        CollapseVerdict::NonCollapsed
    };
    Ok(CollapseLimitReport { verdict, terms })
}

/// Rescale so the asymptotically most-shrinking block has unit scale:
/// divide the power law by `λ_min(n)`; rescale each row by its minimum in
/// sample mode. The unit-volume flag is cleared.
pub fn normalize_most_shrinking(seq: &SequenceSpec) -> SequenceSpec {
    match seq {
        SequenceSpec::Power { blocks, .. } => {
            let min = blocks
                .iter()
                .cloned()
                .reduce(|best, b| {
                    if (b.a, b.c) < (best.a, best.c) {
                        b
                    } else {
                        best
                    }
                })
                .expect("nonempty");
            SequenceSpec::Power {
                blocks: blocks
                    .iter()
                    .map(|b| crate::asymptotics::PowerBlock { c: b.c / min.c, a: b.a - min.a })
                    .collect(),
                unit_volume: false,
            }
        }
        SequenceSpec::Samples { rows, .. } => SequenceSpec::Samples {
            rows: rows
                .iter()
                .map(|row| {
                    let min = row[1..].iter().cloned().fold(f64::INFINITY, f64::min);
                    let mut out = vec![row[0]];
                    out.extend(row[1..].iter().map(|&l| l / min));
                    out
                })
                .collect(),
            unit_volume: false,
        },
    }
}
