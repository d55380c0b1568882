//! Reference solver for the equality-constrained least-squares problem,
//! built on nalgebra's SVD and sharing no code with the closed-form solver.
//!
//! Feasible points are `w = w₀ + B z` where `w₀` is the minimum-norm solution
//! of `S_MLᴴ w = p_MLᴴ` and the columns of `B` span the null space of
//! `S_MLᴴ`. The sidelobe misfit is then an unconstrained least-squares
//! problem in `z`.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use xpol_dm::modulation::TargetSet;
use xpol_dm::steering::{ArrayGeometry, Direction, PolarizationState};
use xpol_dm::synthesis::{DesignSpec, SteeringMatrices};
use xpol_dm::CMatrix;

pub type C = Complex<f64>;

pub fn to_na(m: &CMatrix) -> DMatrix<C> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

fn adjoint(m: &DMatrix<C>) -> DMatrix<C> {
    m.adjoint()
}

/// Orthonormal basis of the null space of `a` (rows × cols, rows ≤ cols).
pub fn null_space(a: &DMatrix<C>) -> DMatrix<C> {
    let n = a.ncols();
    let mut padded = DMatrix::<C>::zeros(n, n);
    padded.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors");
    let smax = svd.singular_values.max();
    let tol = smax * 1e-10;
    let keep: Vec<usize> = (0..n).filter(|&i| svd.singular_values[i] <= tol).collect();
    let mut basis = DMatrix::<C>::zeros(n, keep.len());
    for (k, &i) in keep.iter().enumerate() {
        let row = v_t.row(i).adjoint();
        basis.column_mut(k).copy_from(&row);
    }
    basis
}

/// Solves `min ‖p_SL − wᴴ S_SL‖² + loading·‖w‖²` subject to `wᴴ S_ML = p_ML`
/// by eliminating the constraint.
pub fn constraint_elimination(m: &SteeringMatrices<f64>, t: &TargetSet<f64>, loading: f64) -> Vec<C> {
    let s_ml = to_na(&m.mainlobe);
    let s_sl = to_na(&m.sidelobe);
    let a = adjoint(&s_ml);
    let b = DVector::from_iterator(t.mainlobe.len(), t.mainlobe.iter().map(|z| z.conj()));
    let w0 = a
        .clone()
        .svd(true, true)
        .solve(&b, 1e-13)
        .expect("min-norm feasible point");
    let basis = null_space(&a);
    if basis.ncols() == 0 {
        return w0.iter().copied().collect();
    }
    let p = DVector::from_iterator(t.sidelobe.len(), t.sidelobe.iter().map(|z| z.conj()));
    let s_sl_h = adjoint(&s_sl);
    let mut lhs = &s_sl_h * &basis;
    let mut rhs = p - &s_sl_h * &w0;
    if loading > 0.0 {
        let k = basis.ncols();
        let root = loading.sqrt();
        let extra_lhs = &basis * C::new(root, 0.0);
        let extra_rhs = -&w0 * C::new(root, 0.0);
        let rows = lhs.nrows();
        lhs = lhs.resize_vertically(rows + basis.nrows(), C::new(0.0, 0.0));
        lhs.view_mut((rows, 0), (basis.nrows(), k)).copy_from(&extra_lhs);
        rhs = rhs.resize_vertically(rows + basis.nrows(), C::new(0.0, 0.0));
        rhs.rows_mut(rows, basis.nrows()).copy_from(&extra_rhs);
    }
    let z = lhs.svd(true, true).solve(&rhs, 1e-14).expect("least squares");
    let w = w0 + basis * z;
    w.iter().copied().collect()
}

/// `‖P (2 S_SL (S_SLᴴ w − p_SLᴴ))‖` with `P` the projector onto null(S_MLᴴ).
pub fn projected_gradient_norm(m: &SteeringMatrices<f64>, t: &TargetSet<f64>, w: &[C]) -> f64 {
    let s_sl = to_na(&m.sidelobe);
    let w = DVector::from_column_slice(w);
    let p = DVector::from_iterator(t.sidelobe.len(), t.sidelobe.iter().map(|z| z.conj()));
    let grad = (&s_sl * (s_sl.adjoint() * &w - p)) * C::new(2.0, 0.0);
    let basis = null_space(&to_na(&m.mainlobe).adjoint());
    (&basis * (basis.adjoint() * grad)).norm()
}

/// Minimum-norm point satisfying the mainlobe constraint, `S_ML (S_MLᴴ S_ML)⁻¹ p_MLᴴ`.
pub fn min_norm_feasible(m: &SteeringMatrices<f64>, t: &TargetSet<f64>) -> Vec<C> {
    let s_ml = to_na(&m.mainlobe);
    let b = DVector::from_iterator(t.mainlobe.len(), t.mainlobe.iter().map(|z| z.conj()));
    let normal = s_ml.adjoint() * &s_ml;
    let coeffs = normal.lu().solve(&b).expect("independent mainlobe columns");
    (s_ml * coeffs).iter().copied().collect()
}

/// `max |wᴴ S_ML − p_ML|`, evaluated with nalgebra.
pub fn constraint_error(m: &SteeringMatrices<f64>, t: &TargetSet<f64>, w: &[C]) -> f64 {
    let s_ml = to_na(&m.mainlobe);
    let w = DVector::from_column_slice(w);
    let resp = s_ml.adjoint() * w;
    resp.iter()
        .zip(&t.mainlobe)
        .map(|(r, p)| (r.conj() - p).norm())
        .fold(0.0, f64::max)
}

pub fn relative_error(a: &[C], b: &[C]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    let scale: f64 = b.iter().map(|y| y.norm_sqr()).sum::<f64>().sqrt();
    diff / scale.max(f64::MIN_POSITIVE)
}

/// SplitMix64, enough to draw reproducible test instances.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + (hi - lo) * u
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}

pub struct Instance {
    pub spec: DesignSpec<f64>,
    pub targets: TargetSet<f64>,
}

/// Random small problem: `N ∈ {2, 3, 4}`, one mainlobe direction, enough
/// sidelobe directions (up to 6) for the Gram matrix to have full rank,
/// random polarisation pair and random targets.
pub fn random_instance(rng: &mut Rng) -> Instance {
    let n = 2 + rng.below(3);
    let n_sl = n.max(2) + rng.below(7 - n.max(2));
    let spacing = rng.uniform(0.3, 0.7);
    let dir = |rng: &mut Rng| Direction::new(rng.uniform(0.0, 180.0), rng.uniform(0.0, 360.0)).unwrap();
    let pol = |rng: &mut Rng| PolarizationState::new(rng.uniform(0.0, 90.0), rng.uniform(-180.0, 180.0)).unwrap();
    let mainlobe = dir(rng);
    let sidelobe: Vec<_> = (0..n_sl).map(|_| dir(rng)).collect();
    let spec = DesignSpec {
        geometry: ArrayGeometry::uniform(n, spacing).unwrap(),
        pol1: pol(rng),
        pol2: pol(rng),
        mainlobe_dirs: vec![mainlobe],
        sidelobe_dirs: sidelobe,
        constellation_magnitude: 1.0,
        sidelobe_magnitude: 0.1,
        modulation_order: 4,
        seed: 0,
        diagonal_loading: 0.0,
    };
    let c = |rng: &mut Rng, scale: f64| C::from_polar(scale * rng.uniform(0.5, 1.5), rng.uniform(0.0, std::f64::consts::TAU));
    let targets = TargetSet {
        mainlobe: (0..2).map(|_| c(rng, 1.0)).collect(),
        sidelobe: (0..2 * n_sl).map(|_| c(rng, 0.1)).collect(),
        seed: 0,
    };
    Instance { spec, targets }
}
