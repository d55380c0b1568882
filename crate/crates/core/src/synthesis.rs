//! Per-symbol weight synthesis.
//!
//! For composite symbol `m` the weights minimize the sidelobe mismatch
//! `‖p_SL − wᴴ S_SL‖₂` subject to the exact mainlobe constraint
//! `wᴴ S_ML = p_ML`. The Lagrange solution is
//!
//! ```text
//! w = G⁻¹ (S_SL p_SLᴴ − S_ML λ),
//! λ = (S_MLᴴ G⁻¹ S_ML)⁻¹ (S_MLᴴ G⁻¹ S_SL p_SLᴴ − p_MLᴴ),
//! G = S_SL S_SLᴴ + ε I.
//! ```
//!
//! Neither inverse is formed. `G = L Lᴴ` is factorized once per design, the
//! reduced constraint matrix is assembled as `Yᴴ Y` with `Y = L⁻¹ S_ML` and
//! factorized once as well; each symbol then costs a handful of triangular
//! solves.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{norm2, CMatrix, Cholesky};
use crate::modulation::{build_targets, enumerate_symbols, SymbolIndex, TargetSet};
use crate::num::Real;
use crate::steering::{full_steering, ArrayGeometry, Direction, PolarizationState};

/// Tolerance (degrees) used when checking that mainlobe and sidelobe grids are disjoint.
pub const DIRECTION_TOLERANCE_DEG: f64 = 1e-9;

/// Complete description of one design problem.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignSpec<T> {
    pub geometry: ArrayGeometry<T>,
    pub pol1: PolarizationState<T>,
    pub pol2: PolarizationState<T>,
    pub mainlobe_dirs: Vec<Direction<T>>,
    pub sidelobe_dirs: Vec<Direction<T>>,
    pub constellation_magnitude: T,
    pub sidelobe_magnitude: T,
    pub modulation_order: usize,
    pub seed: u64,
    pub diagonal_loading: T,
}

impl<T: Real> DesignSpec<T> {
    pub fn element_count(&self) -> usize {
        self.geometry.len()
    }

    /// Total sampled directions, mainlobe plus sidelobe.
    pub fn sample_count(&self) -> usize {
        self.mainlobe_dirs.len() + self.sidelobe_dirs.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.modulation_order < 2 {
            return Err(Error::invalid("modulation_order", format!("{} < 2", self.modulation_order)));
        }
        if self.mainlobe_dirs.is_empty() {
            return Err(Error::invalid("mainlobe", "mainlobe grid is empty"));
        }
        if self.mainlobe_dirs.len() > self.element_count() {
            return Err(Error::invalid(
                "mainlobe",
                format!(
                    "{} mainlobe constraints exceed {} weights",
                    2 * self.mainlobe_dirs.len(),
                    2 * self.element_count()
                ),
            ));
        }
        if !(self.constellation_magnitude > T::zero()) || !self.constellation_magnitude.is_finite() {
            return Err(Error::invalid("constellation_magnitude", "must be positive and finite"));
        }
        if !(self.sidelobe_magnitude >= T::zero()) || !self.sidelobe_magnitude.is_finite() {
            return Err(Error::invalid("sidelobe_magnitude", "must be nonnegative and finite"));
        }
        if !(self.diagonal_loading >= T::zero()) || !self.diagonal_loading.is_finite() {
            return Err(Error::invalid("diagonal_loading", "must be nonnegative and finite"));
        }
        let tol = T::lit(DIRECTION_TOLERANCE_DEG);
        for (i, ml) in self.mainlobe_dirs.iter().enumerate() {
            if let Some(j) = self.sidelobe_dirs.iter().position(|sl| sl.coincides(ml, tol)) {
                return Err(Error::invalid(
                    "sidelobe",
                    format!(
                        "sidelobe direction {j} (theta {}, phi {}) overlaps mainlobe direction {i}",
                        self.sidelobe_dirs[j].theta_deg(),
                        self.sidelobe_dirs[j].phi_deg()
                    ),
                ));
            }
        }
        Ok(())
    }
}

/// Mainlobe and sidelobe steering matrices.
///
/// Columns are the first-polarisation steering vectors over the direction
/// grid followed by the second-polarisation ones.
#[derive(Clone, Debug)]
pub struct SteeringMatrices<T> {
    pub mainlobe: CMatrix<T>,
    pub sidelobe: CMatrix<T>,
}

fn stack_columns<T: Real>(
    geometry: &ArrayGeometry<T>,
    dirs: &[Direction<T>],
    pols: [&PolarizationState<T>; 2],
) -> CMatrix<T> {
    let columns = pols
        .into_iter()
        .flat_map(|p| dirs.iter().map(move |d| full_steering(geometry, d, p)));
    CMatrix::from_columns(2 * geometry.len(), columns)
}

pub fn assemble_matrices<T: Real>(spec: &DesignSpec<T>) -> Result<SteeringMatrices<T>> {
    if spec.mainlobe_dirs.is_empty() {
        return Err(Error::invalid("mainlobe", "mainlobe grid is empty"));
    }
    let pols = [&spec.pol1, &spec.pol2];
    Ok(SteeringMatrices {
        mainlobe: stack_columns(&spec.geometry, &spec.mainlobe_dirs, pols),
        sidelobe: stack_columns(&spec.geometry, &spec.sidelobe_dirs, pols),
    })
}

/// `G = S_SL S_SLᴴ + loading·I`.
pub fn gram<T: Real>(sidelobe: &CMatrix<T>, diagonal_loading: T) -> CMatrix<T> {
    sidelobe.outer_gram(diagonal_loading)
}

/// Fallback loading `1e-10·trace(G)/2N` for a Gram matrix that will not factorize.
pub fn recommended_loading<T: Real>(gram: &CMatrix<T>) -> T {
    let n = gram.rows().max(1);
    let tr = gram.trace().re;
    if tr > T::zero() {
        T::lit(1e-10) * tr / T::lit(n as f64)
    } else {
        T::lit(1e-10)
    }
}

/// Factorizations shared by every symbol of one design.
#[derive(Clone, Debug)]
pub struct Solver<T> {
    matrices: SteeringMatrices<T>,
    gram: Cholesky<T>,
    /// `G⁻¹ S_ML`
    gram_inv_mainlobe: CMatrix<T>,
    /// factor of `S_MLᴴ G⁻¹ S_ML`
    reduced: Cholesky<T>,
}

impl<T: Real> Solver<T> {
    pub fn new(matrices: SteeringMatrices<T>, diagonal_loading: T) -> Result<Self> {
        let dim = matrices.mainlobe.rows();
        if matrices.sidelobe.rows() != dim {
            return Err(Error::DimensionMismatch {
                what: "sidelobe steering matrix rows",
                expected: dim,
                actual: matrices.sidelobe.rows(),
            });
        }
        if matrices.mainlobe.cols() == 0 {
            return Err(Error::invalid("mainlobe", "mainlobe grid is empty"));
        }
        let g = gram(&matrices.sidelobe, diagonal_loading);
        let gram_chol = Cholesky::factor(&g)
            .map_err(|e| Error::SingularGram { pivot: e.pivot, dim: e.dim })?;
        let y = gram_chol.forward_columns(&matrices.mainlobe);
        let reduced_matrix = y.adjoint_mul(&y);
        let reduced = Cholesky::factor(&reduced_matrix)
            .map_err(|e| Error::DegenerateConstraint { pivot: e.pivot, dim: e.dim })?;
        let gram_inv_mainlobe = gram_chol.backward_columns(&y);
        Ok(Self {
            matrices,
            gram: gram_chol,
            gram_inv_mainlobe,
            reduced,
        })
    }

    pub fn matrices(&self) -> &SteeringMatrices<T> {
        &self.matrices
    }

    /// Number of weights, 2N.
    pub fn dim(&self) -> usize {
        self.matrices.mainlobe.rows()
    }

    /// Degrees of freedom left after the mainlobe constraints.
    pub fn free_dimensions(&self) -> usize {
        self.dim() - self.matrices.mainlobe.cols()
    }

    pub fn solve(&self, targets: &TargetSet<T>) -> Result<Vec<Complex<T>>> {
        let sl = &self.matrices.sidelobe;
        let ml = &self.matrices.mainlobe;
        if targets.sidelobe.len() != sl.cols() {
            return Err(Error::DimensionMismatch {
                what: "sidelobe targets",
                expected: sl.cols(),
                actual: targets.sidelobe.len(),
            });
        }
        if targets.mainlobe.len() != ml.cols() {
            return Err(Error::DimensionMismatch {
                what: "mainlobe targets",
                expected: ml.cols(),
                actual: targets.mainlobe.len(),
            });
        }
        let p_sl_h: Vec<_> = targets.sidelobe.iter().map(|z| z.conj()).collect();
        let b = sl.mul_vec(&p_sl_h);
        let gb = self.gram.solve(&b);
        let mut rhs = ml.adjoint_mul_vec(&gb);
        for (r, p) in rhs.iter_mut().zip(&targets.mainlobe) {
            *r = *r - p.conj();
        }
        let lambda = self.reduced.solve(&rhs);
        let correction = self.gram_inv_mainlobe.mul_vec(&lambda);
        let w: Vec<_> = gb.iter().zip(&correction).map(|(a, c)| a - c).collect();
        if w.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::SingularGram { pivot: 0, dim: self.dim() });
        }
        Ok(w)
    }
}

/// Solves one symbol from scratch. Use [`Solver`] to amortize the factorizations.
pub fn solve_weights<T: Real>(
    matrices: &SteeringMatrices<T>,
    targets: &TargetSet<T>,
    diagonal_loading: T,
) -> Result<Vec<Complex<T>>> {
    Solver::new(matrices.clone(), diagonal_loading)?.solve(targets)
}

/// `w ↦ wᴴ A` as a row of responses.
pub fn responses<T: Real>(w: &[Complex<T>], a: &CMatrix<T>) -> Vec<Complex<T>> {
    a.adjoint_mul_vec(w).into_iter().map(|z| z.conj()).collect()
}

/// `‖p_SL − wᴴ S_SL‖₂`
pub fn sidelobe_objective<T: Real>(w: &[Complex<T>], sidelobe: &CMatrix<T>, targets: &[Complex<T>]) -> T {
    let diff: Vec<_> = responses(w, sidelobe)
        .into_iter()
        .zip(targets)
        .map(|(r, p)| p - r)
        .collect();
    norm2(&diff)
}

/// `max |wᴴ S_ML − p_ML|` over entries.
pub fn constraint_residual<T: Real>(w: &[Complex<T>], mainlobe: &CMatrix<T>, targets: &[Complex<T>]) -> T {
    responses(w, mainlobe)
        .into_iter()
        .zip(targets)
        .map(|(r, p)| (r - p).norm())
        .fold(T::zero(), T::max)
}

/// Norm of the objective gradient `2 S_SL (S_SLᴴ w − p_SLᴴ)` after projecting
/// out the span of the mainlobe columns. Zero at a constrained optimum.
pub fn stationarity_residual<T: Real>(
    w: &[Complex<T>],
    matrices: &SteeringMatrices<T>,
    targets: &TargetSet<T>,
) -> Result<T> {
    let sl = &matrices.sidelobe;
    let ml = &matrices.mainlobe;
    let mut misfit = sl.adjoint_mul_vec(w);
    for (m, p) in misfit.iter_mut().zip(&targets.sidelobe) {
        *m = *m - p.conj();
    }
    let two = T::lit(2.0);
    let grad: Vec<_> = sl.mul_vec(&misfit).into_iter().map(|z| z * two).collect();
    let normal = ml.adjoint_mul(ml);
    let chol = Cholesky::factor(&normal)
        .map_err(|e| Error::DegenerateConstraint { pivot: e.pivot, dim: e.dim })?;
    let coeffs = chol.solve(&ml.adjoint_mul_vec(&grad));
    let in_span = ml.mul_vec(&coeffs);
    let projected: Vec<_> = grad.iter().zip(&in_span).map(|(g, s)| g - s).collect();
    Ok(norm2(&projected))
}

/// Weight vectors for every composite symbol of a design.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSet<T> {
    pub modulation_order: usize,
    pub seed: u64,
    pub symbols: Vec<SymbolIndex>,
    /// One 2N vector per symbol, x-dipole block then y-dipole block.
    pub weights: Vec<Vec<Complex<T>>>,
    /// Achieved `‖p_SL − wᴴ S_SL‖₂` per symbol.
    pub objective_values: Vec<T>,
    /// Achieved `max |wᴴ S_ML − p_ML|` per symbol.
    pub constraint_residuals: Vec<T>,
    pub free_dimensions: usize,
}

impl<T: Real> WeightSet<T> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn element_count(&self) -> usize {
        self.weights.first().map_or(0, |w| w.len() / 2)
    }

    pub fn max_constraint_residual(&self) -> T {
        self.constraint_residuals.iter().copied().fold(T::zero(), T::max)
    }

    /// Bank of all-zero weights with the shape of `spec`.
    pub fn zeros(spec: &DesignSpec<T>) -> Result<Self> {
        let symbols = enumerate_symbols(spec.modulation_order)?;
        let dim = 2 * spec.element_count();
        Ok(Self {
            modulation_order: spec.modulation_order,
            seed: spec.seed,
            weights: vec![vec![Complex::zero(); dim]; symbols.len()],
            objective_values: vec![T::zero(); symbols.len()],
            constraint_residuals: vec![T::zero(); symbols.len()],
            symbols,
            free_dimensions: dim.saturating_sub(2 * spec.mainlobe_dirs.len()),
        })
    }
}

/// Synthesizes the full bank of M² weight vectors.
pub fn synthesize_bank<T: Real>(spec: &DesignSpec<T>) -> Result<WeightSet<T>> {
    spec.validate()?;
    let symbols = enumerate_symbols(spec.modulation_order)?;
    let order = spec.modulation_order;
    let annotate = |s: &SymbolIndex, e: Error| Error::Symbol {
        index: s.m,
        label: s.label(order),
        source: Box::new(e),
    };
    let matrices = assemble_matrices(spec)?;
    let solver = Solver::new(matrices, spec.diagonal_loading).map_err(|e| annotate(&symbols[0], e))?;

    let mut weights = Vec::with_capacity(symbols.len());
    let mut objective_values = Vec::with_capacity(symbols.len());
    let mut constraint_residuals = Vec::with_capacity(symbols.len());
    for s in &symbols {
        let targets = build_targets(*s, spec, spec.seed)?;
        let w = solver.solve(&targets).map_err(|e| annotate(s, e))?;
        let m = solver.matrices();
        objective_values.push(sidelobe_objective(&w, &m.sidelobe, &targets.sidelobe));
        constraint_residuals.push(constraint_residual(&w, &m.mainlobe, &targets.mainlobe));
        weights.push(w);
    }
    Ok(WeightSet {
        modulation_order: order,
        seed: spec.seed,
        symbols,
        weights,
        objective_values,
        constraint_residuals,
        free_dimensions: solver.free_dimensions(),
    })
}
