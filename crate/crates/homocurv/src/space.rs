//! The central context object: a homogeneous space described at the Lie
//! algebra level, with its decomposition and coefficient table precomputed.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::isotypic::{self, CoefficientTable, Decomposition, DecompositionJson};
use crate::lie::{LieAlgebra, LieAlgebraSpec, Subspace};
use crate::{Error, Result, DEFAULT_SEED, DEFAULT_TOL};

/// A compact homogeneous space `G/H` given by structure constants, the
/// isotropy subalgebra, and an invariant irreducible decomposition of the
/// reductive complement. Construction validates the structural hypotheses
/// and precomputes the bracket tables every curvature formula consumes.
#[derive(Debug, Clone)]
pub struct HomogeneousSpace {
    name: String,
    algebra: LieAlgebra,
    isotropy: Subspace,
    component_generators: Vec<DMatrix<f64>>,
    decomposition: Decomposition,
    coefficients: CoefficientTable,
    pi1_finite: bool,
    /// m- and h-components of `[e_alpha, e_beta]` for all adapted pairs
    bracket_m: Vec<DVector<f64>>,
    bracket_h: Vec<DVector<f64>>,
}

impl HomogeneousSpace {
    /// Assemble and validate a space. When `decomposition` is `None` the
    /// automatic splitter runs with the given seed.
    pub fn new(
        name: impl Into<String>,
        algebra: LieAlgebra,
        isotropy: Subspace,
        component_generators: Vec<DMatrix<f64>>,
        decomposition: Option<Decomposition>,
        pi1_finite: bool,
        seed: u64,
        tol: f64,
    ) -> Result<Self> {
        let name = name.into();
        let report = algebra.validate(tol);
        if !report.passed() {
            return Err(Error::Invalid(format!(
                "structure constants fail validation: antisymmetry {:.3e}, jacobi {:.3e}, \
                 total antisymmetry {:.3e}",
                report.antisymmetry, report.jacobi, report.total_antisymmetry
            )));
        }
        let closure = algebra.is_subalgebra(&isotropy);
        if !closure.closed {
            return Err(Error::NotSubalgebra { residual: closure.residual });
        }
        // almost-effectivity: the largest ideal of g inside h must vanish
        let ideal = largest_ideal_within(&algebra, &isotropy);
        if ideal.dim() > 0 {
            return Err(Error::Invalid(format!(
                "isotropy contains a {}-dimensional ideal of the ambient algebra; \
                 the action is not almost effective",
                ideal.dim()
            )));
        }
        let decomposition = match decomposition {
            Some(dec) => {
                validate_supplied_decomposition(&algebra, &isotropy, &component_generators, &dec)?;
                dec
            }
            None => isotypic::decompose(&algebra, &isotropy, &component_generators, seed, tol)?,
        };
        let coefficients = isotypic::coefficients(&algebra, &isotropy, &decomposition)?;

        let dm = decomposition.dim_m();
        let mut bracket_m = Vec::with_capacity(dm * dm);
        let mut bracket_h = Vec::with_capacity(dm * dm);
        for alpha in 0..dm {
            let ea = decomposition.basis_vector(alpha);
            for beta in 0..dm {
                let w = algebra.bracket(&ea, &decomposition.basis_vector(beta))?;
                bracket_m.push(decomposition.basis().transpose() * &w);
                bracket_h.push(isotropy.basis().transpose() * &w);
            }
        }

        Ok(Self {
            name,
            algebra,
            isotropy,
            component_generators,
            decomposition,
            coefficients,
            pi1_finite,
            bracket_m,
            bracket_h,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn isotropy(&self) -> &Subspace {
        &self.isotropy
    }

    pub fn component_generators(&self) -> &[DMatrix<f64>] {
        &self.component_generators
    }

    pub fn decomposition(&self) -> &Decomposition {
        &self.decomposition
    }

    pub fn coefficients(&self) -> &CoefficientTable {
        &self.coefficients
    }

    pub fn pi1_finite(&self) -> bool {
        self.pi1_finite
    }

    /// Number of irreducible blocks.
    pub fn blocks(&self) -> usize {
        self.decomposition.blocks()
    }

    /// Dimension of the space `G/H` itself (that of the complement `m`).
    pub fn dim_m(&self) -> usize {
        self.decomposition.dim_m()
    }

    pub fn block_dims(&self) -> &[usize] {
        self.decomposition.block_dims()
    }

    /// m-components of `[e_alpha, e_beta]` in the adapted basis.
    #[inline]
    pub fn bracket_m(&self, alpha: usize, beta: usize) -> &DVector<f64> {
        &self.bracket_m[alpha * self.dim_m() + beta]
    }

    /// h-components of `[e_alpha, e_beta]` in the isotropy basis.
    #[inline]
    pub fn bracket_h(&self, alpha: usize, beta: usize) -> &DVector<f64> {
        &self.bracket_h[alpha * self.dim_m() + beta]
    }

    /// m-component of a bracket of two m-coordinate vectors.
    pub fn bracket_m_vec(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let dm = self.dim_m();
        let mut out = DVector::zeros(dm);
        for a in 0..dm {
            let xa = x[a];
            if xa == 0.0 {
                continue;
            }
            for b in 0..dm {
                let f = xa * y[b];
                if f == 0.0 {
                    continue;
                }
                out += self.bracket_m(a, b) * f;
            }
        }
        out
    }

    /// h-component of a bracket of two m-coordinate vectors.
    pub fn bracket_h_vec(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let dm = self.dim_m();
        let mut out = DVector::zeros(self.isotropy.dim());
        for a in 0..dm {
            let xa = x[a];
            if xa == 0.0 {
                continue;
            }
            for b in 0..dm {
                let f = xa * y[b];
                if f == 0.0 {
                    continue;
                }
                out += self.bracket_h(a, b) * f;
            }
        }
        out
    }

    /// Matrix of `ad(w)|_m` in the adapted basis, for an ambient `w`.
    pub fn ad_on_m(&self, w: &DVector<f64>) -> DMatrix<f64> {
        self.decomposition.basis().transpose() * self.algebra.ad(w) * self.decomposition.basis()
    }

    /// The subspace `m_k = k ⊖ h` of the complement determined by an
    /// intermediate subalgebra, together with its orthogonal complement in
    /// `m`. Errors if `k` is not an `H`-subalgebra (closed, containing `h`,
    /// invariant under the component generators).
    pub fn fibration_split(&self, k: &Subspace) -> Result<(Subspace, Subspace)> {
        let check = self.algebra.is_subalgebra(k);
        if !check.closed {
            return Err(Error::NotSubalgebra { residual: check.residual });
        }
        if !k.contains_subspace(&self.isotropy, DEFAULT_TOL) {
            return Err(Error::Precondition("k does not contain the isotropy algebra".into()));
        }
        for (idx, g) in self.component_generators.iter().enumerate() {
            let moved = g * k.basis();
            for j in 0..k.dim() {
                if !k.contains(&moved.column(j).clone_owned(), DEFAULT_TOL) {
                    return Err(Error::Precondition(format!(
                        "k is not invariant under component generator {idx}"
                    )));
                }
            }
        }
        let m_k = k.complement_within(&self.isotropy, "m_k");
        let m = self.decomposition.m_subspace();
        let m_k_perp = m.complement_within(&m_k, "m_k_perp");
        Ok((m_k, m_k_perp))
    }

    pub fn to_json(&self) -> SpaceSpecJson {
        SpaceSpecJson {
            name: self.name.clone(),
            pi1_finite: self.pi1_finite,
            algebra: self.algebra.to_spec(),
            isotropy_basis: matrix_rows(self.isotropy.basis()),
            component_generators: self
                .component_generators
                .iter()
                .map(matrix_rows)
                .collect(),
            decomposition: Some(self.decomposition.to_json()),
        }
    }

    pub fn from_json(json: &SpaceSpecJson, seed: u64, tol: f64) -> Result<Self> {
        let algebra = LieAlgebra::from_spec(&json.algebra)?;
        let n = algebra.dim();
        let isotropy = Subspace::new(rows_matrix(n, &json.isotropy_basis)?, "h")?;
        let extras = json
            .component_generators
            .iter()
            .map(|g| rows_matrix(n, g))
            .collect::<Result<Vec<_>>>()?;
        let decomposition =
            json.decomposition.as_ref().map(Decomposition::from_json).transpose()?;
        Self::new(
            json.name.clone(),
            algebra,
            isotropy,
            extras,
            decomposition,
            json.pi1_finite,
            seed,
            tol,
        )
    }
}

/// JSON form of a space: algebra spec, isotropy basis (one row per basis
/// vector), optional component-group generator matrices (rows), optional
/// explicit decomposition.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceSpecJson {
    pub name: String,
    pub pi1_finite: bool,
    pub algebra: LieAlgebraSpec,
    pub isotropy_basis: Vec<Vec<f64>>,
    #[serde(default)]
    pub component_generators: Vec<Vec<Vec<f64>>>,
    #[serde(default)]
    pub decomposition: Option<DecompositionJson>,
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    // columns are the vectors; emit one row per vector
    (0..m.ncols()).map(|j| m.column(j).iter().cloned().collect()).collect()
}

fn rows_matrix(n: usize, rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let mut m = DMatrix::zeros(n, rows.len());
    for (j, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: row.len() });
        }
        for (i, &v) in row.iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    Ok(m)
}

/// Largest subspace of `h` that is an ideal of the ambient algebra:
/// the greatest fixed point of `W ↦ {x ∈ W : [g, x] ⊆ W}`.
fn largest_ideal_within(algebra: &LieAlgebra, h: &Subspace) -> Subspace {
    let n = algebra.dim();
    let mut w = h.clone();
    loop {
        if w.dim() == 0 {
            return w;
        }
        let p = w.projector();
        let id = DMatrix::<f64>::identity(n, n);
        let outside = &id - &p;
        // rows: x ↦ proj_{W^⊥} [e_b, x] for every ambient direction b
        let mut rows = DMatrix::zeros(n * n, w.dim());
        for col in 0..w.dim() {
            let xc = w.basis().column(col).clone_owned();
            for b in 0..n {
                let mut e = DVector::zeros(n);
                e[b] = 1.0;
                let img = &outside * algebra.bracket(&e, &xc).expect("dims");
                for r in 0..n {
                    rows[(b * n + r, col)] = img[r];
                }
            }
        }
        let kernel = crate::linalg::nullspace(&rows, 1e-9);
        let next_dim = kernel.ncols();
        let next = Subspace::new_unchecked(w.basis() * kernel, "ideal-candidate");
        if next_dim == w.dim() {
            return next;
        }
        w = next;
    }
}

fn validate_supplied_decomposition(
    algebra: &LieAlgebra,
    h: &Subspace,
    extras: &[DMatrix<f64>],
    dec: &Decomposition,
) -> Result<()> {
    if dec.ambient_dim() != algebra.dim() {
        return Err(Error::DimensionMismatch { expected: algebra.dim(), got: dec.ambient_dim() });
    }
    if dec.dim_m() + h.dim() != algebra.dim() {
        return Err(Error::Invalid(format!(
            "decomposition spans {} dimensions but the complement has {}",
            dec.dim_m(),
            algebra.dim() - h.dim()
        )));
    }
    // orthogonal to h
    if (h.basis().transpose() * dec.basis()).norm() > DEFAULT_TOL {
        return Err(Error::Invalid("adapted basis is not orthogonal to the isotropy".into()));
    }
    // every block invariant under ad(h) and the component generators
    let mut actions: Vec<DMatrix<f64>> =
        (0..h.dim()).map(|z| algebra.ad(&h.basis().column(z).clone_owned())).collect();
    actions.extend(extras.iter().cloned());
    for i in 0..dec.blocks() {
        let block = dec.span_of_blocks(&[i], "block");
        let p = block.projector();
        let id = DMatrix::<f64>::identity(algebra.dim(), algebra.dim());
        for a in &actions {
            let escape = (&id - &p) * a * block.basis();
            if escape.norm() > DEFAULT_TOL {
                return Err(Error::Invalid(format!(
                    "supplied decomposition block {i} is not invariant \
                     (residual {:.3e})",
                    escape.norm()
                )));
            }
        }
    }
    Ok(())
}

/// Convenience constructor used by the catalog and tests: defaults for seed
/// and tolerance.
pub fn space(
    name: &str,
    algebra: LieAlgebra,
    isotropy: Subspace,
    decomposition: Option<Decomposition>,
    pi1_finite: bool,
) -> Result<HomogeneousSpace> {
    HomogeneousSpace::new(
        name,
        algebra,
        isotropy,
        Vec::new(),
        decomposition,
        pi1_finite,
        DEFAULT_SEED,
        DEFAULT_TOL,
    )
}
