//! Zero-mean Gaussian states described by their covariance matrix.
//!
//! Everything is in shot-noise units (vacuum variance 1) with the quadratures
//! ordered `x_1 .. x_N, p_1 .. p_N`. A two-mode squeezed vacuum of parameter
//! `r` has local variance `cosh r`.

use nalgebra::linalg::Schur;
use nalgebra::{Complex, DMatrix, Matrix2};

use crate::error::{Error, Result};

/// Relative tolerance used when matching the conjugate eigenvalue pairs
/// `±iν` of `Ω γ`.
pub const PAIRING_TOLERANCE: f64 = 1e-8;

/// Symplectic eigenvalues below `1 - PHYSICALITY_TOLERANCE` are unphysical.
/// States that went through large intermediate entries get the wider
/// round-off allowance of [`GaussianState::physicality_tolerance`].
pub const PHYSICALITY_TOLERANCE: f64 = 1e-9;

/// Multiple of `ε_mach × magnitude` accepted as round-off below unit
/// symplectic eigenvalue.
const ROUNDOFF_FACTOR: f64 = 16.0;

const SYMMETRY_TOLERANCE: f64 = 1e-12;
const PINV_CUTOFF: f64 = 1e-12;
const SCHUR_MAX_ITER: usize = 10_000;
/// Per-dimension budget for the unshifted attempt; it either converges
/// quickly or stalls indefinitely.
const SCHUR_FAST_ITER_PER_DIM: usize = 30;

/// Canonical symplectic form `[[0, I], [-I, 0]]` for `n` modes.
pub fn symplectic_form(n: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        omega[(k, n + k)] = 1.0;
        omega[(n + k, k)] = -1.0;
    }
    omega
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quadrature {
    X,
    P,
}

/// A homodyne measurement of one quadrature of one mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadratureSelector {
    pub mode: usize,
    pub quadrature: Quadrature,
}

impl QuadratureSelector {
    pub fn new(mode: usize, quadrature: Quadrature) -> Self {
        Self { mode, quadrature }
    }

    pub fn x(mode: usize) -> Self {
        Self::new(mode, Quadrature::X)
    }

    pub fn p(mode: usize) -> Self {
        Self::new(mode, Quadrature::P)
    }
}

#[derive(Debug, Clone)]
pub struct GaussianState {
    n_modes: usize,
    cov: DMatrix<f64>,
    /// Largest covariance entry seen by this state or any state it was
    /// derived from. Bounds the absolute round-off carried by `cov`.
    magnitude: f64,
}

impl PartialEq for GaussianState {
    fn eq(&self, other: &Self) -> bool {
        self.n_modes == other.n_modes && self.cov == other.cov
    }
}

impl GaussianState {
    /// Wraps a covariance matrix after checking its shape and symmetry.
    pub fn from_covariance(cov: DMatrix<f64>) -> Result<Self> {
        if cov.nrows() != cov.ncols() || cov.nrows() == 0 || !cov.nrows().is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "covariance must be a non-empty 2N x 2N matrix, got {}x{}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        if cov.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("covariance has non-finite entries"));
        }
        let scale = cov.amax().max(1.0);
        let asym = (&cov - cov.transpose()).amax();
        if asym > SYMMETRY_TOLERANCE * scale {
            return Err(Error::invalid(format!(
                "covariance is not symmetric (max deviation {asym:e})"
            )));
        }
        Ok(Self::wrap(symmetrize(cov), 0.0))
    }

    /// Single-mode thermal state with both quadrature variances equal to `nu`.
    pub fn thermal(nu: f64) -> Result<Self> {
        if !(nu.is_finite() && nu >= 1.0) {
            return Err(Error::invalid(format!(
                "thermal variance must be >= 1, got {nu}"
            )));
        }
        Ok(Self::wrap(DMatrix::identity(2, 2) * nu, 0.0))
    }

    fn wrap(cov: DMatrix<f64>, inherited: f64) -> Self {
        let magnitude = cov.amax().max(inherited);
        Self {
            n_modes: cov.nrows() / 2,
            cov,
            magnitude,
        }
    }

    /// Allowed shortfall of a symplectic eigenvalue below one.
    pub fn physicality_tolerance(&self) -> f64 {
        PHYSICALITY_TOLERANCE.max(ROUNDOFF_FACTOR * f64::EPSILON * self.magnitude)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Row/column index of a quadrature in the covariance matrix.
    pub fn index(&self, sel: QuadratureSelector) -> usize {
        match sel.quadrature {
            Quadrature::X => sel.mode,
            Quadrature::P => self.n_modes + sel.mode,
        }
    }

    /// Covariance between two quadratures.
    pub fn entry(&self, a: QuadratureSelector, b: QuadratureSelector) -> f64 {
        self.cov[(self.index(a), self.index(b))]
    }

    /// Block-diagonal combination: modes of `self` first, then those of `other`.
    pub fn direct_sum(&self, other: &GaussianState) -> GaussianState {
        let (n1, n2) = (self.n_modes, other.n_modes);
        let n = n1 + n2;
        let mut cov = DMatrix::zeros(2 * n, 2 * n);
        let place = |cov: &mut DMatrix<f64>, src: &DMatrix<f64>, m: usize, off: usize| {
            for i in 0..2 * m {
                for j in 0..2 * m {
                    let (qi, ki) = (i / m, i % m);
                    let (qj, kj) = (j / m, j % m);
                    cov[(qi * n + off + ki, qj * n + off + kj)] = src[(i, j)];
                }
            }
        };
        place(&mut cov, &self.cov, n1, 0);
        place(&mut cov, &other.cov, n2, n1);
        GaussianState::wrap(cov, self.magnitude.max(other.magnitude))
    }

    /// True when every symplectic eigenvalue is at least `1 - physicality_tolerance()`.
    pub fn is_physical(&self) -> bool {
        let tol = self.physicality_tolerance();
        raw_symplectic_eigenvalues(self)
            .map(|nu| nu.iter().all(|&v| v >= 1.0 - tol))
            .unwrap_or(false)
    }
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    let t = m.transpose();
    (m + t) * 0.5
}

/// A linear symplectic map on `2N` quadratures.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticTransform {
    matrix: DMatrix<f64>,
}

impl SymplecticTransform {
    /// Validates `S Ω Sᵀ = Ω` to `1e-12`, scaled by the squared norm of `S`.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols()
            || matrix.nrows() == 0
            || !matrix.nrows().is_multiple_of(2)
        {
            return Err(Error::invalid("symplectic matrix must be 2N x 2N"));
        }
        let t = Self { matrix };
        let scale = t.matrix.amax().max(1.0).powi(2);
        if t.symplectic_defect() > 1e-12 * scale {
            return Err(Error::invalid(
                "matrix does not preserve the symplectic form",
            ));
        }
        Ok(t)
    }

    pub fn identity(n_modes: usize) -> Self {
        Self {
            matrix: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    /// Beam splitter of the given transmittivity between `mode_a` and `mode_b`.
    ///
    /// Acts the same way on both quadratures:
    /// `a' = √T a + √(1-T) b`, `b' = -√(1-T) a + √T b`.
    pub fn beam_splitter(
        transmittivity: f64,
        mode_a: usize,
        mode_b: usize,
        n_modes: usize,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&transmittivity) {
            return Err(Error::invalid(format!(
                "transmittivity must lie in [0, 1], got {transmittivity}"
            )));
        }
        check_pair(mode_a, mode_b, n_modes)?;
        let t = transmittivity.sqrt();
        let r = (1.0 - transmittivity).sqrt();
        let mut s = DMatrix::identity(2 * n_modes, 2 * n_modes);
        for off in [0, n_modes] {
            let (a, b) = (off + mode_a, off + mode_b);
            s[(a, a)] = t;
            s[(a, b)] = r;
            s[(b, a)] = -r;
            s[(b, b)] = t;
        }
        Ok(Self { matrix: s })
    }

    /// Two-mode squeezer that turns a vacuum pair into a two-mode squeezed
    /// vacuum with local variance `cosh r`.
    pub fn two_mode_squeezer(r: f64, mode_a: usize, mode_b: usize, n_modes: usize) -> Result<Self> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::invalid(format!(
                "squeezing must be finite and >= 0, got {r}"
            )));
        }
        check_pair(mode_a, mode_b, n_modes)?;
        // cosh(2s) = cosh(r)
        let (c, sh) = ((r / 2.0).cosh(), (r / 2.0).sinh());
        let mut s = DMatrix::identity(2 * n_modes, 2 * n_modes);
        let (a, b) = (mode_a, mode_b);
        s[(a, a)] = c;
        s[(a, b)] = sh;
        s[(b, a)] = sh;
        s[(b, b)] = c;
        let (pa, pb) = (n_modes + a, n_modes + b);
        s[(pa, pa)] = c;
        s[(pa, pb)] = -sh;
        s[(pb, pa)] = -sh;
        s[(pb, pb)] = c;
        Ok(Self { matrix: s })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    /// `other` applied after `self`.
    pub fn then(&self, other: &SymplecticTransform) -> Result<Self> {
        if self.matrix.nrows() != other.matrix.nrows() {
            return Err(Error::invalid(
                "cannot compose transforms of different sizes",
            ));
        }
        Ok(Self {
            matrix: &other.matrix * &self.matrix,
        })
    }

    /// Largest entry of `|S Ω Sᵀ - Ω|`.
    pub fn symplectic_defect(&self) -> f64 {
        let omega = symplectic_form(self.n_modes());
        (&self.matrix * &omega * self.matrix.transpose() - omega).amax()
    }
}

fn check_pair(a: usize, b: usize, n: usize) -> Result<()> {
    if a == b {
        return Err(Error::invalid(format!(
            "mode indices must differ, got {a} twice"
        )));
    }
    if a >= n || b >= n {
        return Err(Error::invalid(format!(
            "mode index out of range for {n} modes"
        )));
    }
    Ok(())
}

pub fn vacuum_state(n: usize) -> Result<GaussianState> {
    if n == 0 {
        return Err(Error::invalid("vacuum state needs at least one mode"));
    }
    Ok(GaussianState::wrap(DMatrix::identity(2 * n, 2 * n), 0.0))
}

/// Two-mode squeezed vacuum with local variance `cosh r`.
pub fn two_mode_squeezed(r: f64) -> Result<GaussianState> {
    let s = SymplecticTransform::two_mode_squeezer(r, 0, 1, 2)?;
    apply(&s, &vacuum_state(2)?)
}

/// `cov' = S cov Sᵀ`, symmetrized.
pub fn apply(transform: &SymplecticTransform, state: &GaussianState) -> Result<GaussianState> {
    if transform.matrix.nrows() != state.cov.nrows() {
        return Err(Error::invalid(format!(
            "transform acts on {} modes but state has {}",
            transform.n_modes(),
            state.n_modes
        )));
    }
    let cov = &transform.matrix * &state.cov * transform.matrix.transpose();
    Ok(GaussianState::wrap(symmetrize(cov), state.magnitude))
}

/// Reduced state on `keep`, re-indexed in the given order.
pub fn partial_trace(state: &GaussianState, keep: &[usize]) -> Result<GaussianState> {
    if keep.is_empty() {
        return Err(Error::invalid("partial trace must keep at least one mode"));
    }
    for (i, &m) in keep.iter().enumerate() {
        if m >= state.n_modes {
            return Err(Error::invalid(format!("mode {m} out of range")));
        }
        if keep[..i].contains(&m) {
            return Err(Error::invalid(format!("mode {m} listed twice")));
        }
    }
    let n = state.n_modes;
    let idx: Vec<usize> = keep
        .iter()
        .copied()
        .chain(keep.iter().map(|m| n + m))
        .collect();
    let k = idx.len();
    let cov = DMatrix::from_fn(k, k, |i, j| state.cov[(idx[i], idx[j])]);
    Ok(GaussianState::wrap(cov, state.magnitude))
}

/// Conditional state after a homodyne measurement of `sel`; the measured mode
/// is removed. Outcome independent, so no outcome is taken.
pub fn condition_on_quadrature(
    state: &GaussianState,
    sel: QuadratureSelector,
) -> Result<GaussianState> {
    let n = state.n_modes;
    if sel.mode >= n {
        return Err(Error::invalid(format!(
            "mode {} out of range for {n} modes",
            sel.mode
        )));
    }
    if n == 1 {
        return Err(Error::invalid(
            "cannot condition a single-mode state on itself",
        ));
    }
    let rest: Vec<usize> = (0..n).filter(|&m| m != sel.mode).collect();
    let rest_idx: Vec<usize> = rest
        .iter()
        .copied()
        .chain(rest.iter().map(|m| n + m))
        .collect();
    let b_idx = [sel.mode, n + sel.mode];
    let k = rest_idx.len();

    let cov_a = DMatrix::from_fn(k, k, |i, j| state.cov[(rest_idx[i], rest_idx[j])]);
    let cross = DMatrix::from_fn(k, 2, |i, j| state.cov[(rest_idx[i], b_idx[j])]);
    let cov_b = Matrix2::from_fn(|i, j| state.cov[(b_idx[i], b_idx[j])]);

    let proj = match sel.quadrature {
        Quadrature::X => Matrix2::new(1.0, 0.0, 0.0, 0.0),
        Quadrature::P => Matrix2::new(0.0, 0.0, 0.0, 1.0),
    };
    let projected = proj * cov_b * proj;
    let largest = projected.singular_values().max();
    let pinv = if largest > 0.0 {
        projected
            .pseudo_inverse(PINV_CUTOFF * largest)
            .map_err(|e| Error::numerical(format!("pseudoinverse failed: {e}")))?
    } else {
        Matrix2::zeros()
    };
    let pinv = DMatrix::from_fn(2, 2, |i, j| pinv[(i, j)]);
    let cov = cov_a - &cross * pinv * cross.transpose();
    Ok(GaussianState::wrap(symmetrize(cov), state.magnitude))
}

/// Symplectic eigenvalues in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticSpectrum {
    values: Vec<f64>,
}

impl SymplecticSpectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        self.values.iter().all(|v| (v - 1.0).abs() <= tol)
    }
}

/// Eigenvalues of a matrix whose spectrum lies on the imaginary axis, plus
/// the real shift they carry.
///
/// Deflation in the QR iteration is tested relative to the diagonal, which is
/// zero for Ωγ whenever x and p are uncorrelated; some such matrices never
/// converge. Those are retried on `M + σI` with σ = ‖M‖∞, which makes the
/// test norm-relative. The unshifted iteration is kept as the first choice
/// because it is far more accurate for strongly squeezed states.
fn imaginary_axis_eigenvalues(m: DMatrix<f64>) -> Result<(Vec<Complex<f64>>, f64)> {
    let dim = m.nrows();
    if let Some(schur) = Schur::try_new(m.clone(), f64::EPSILON, SCHUR_FAST_ITER_PER_DIM * dim) {
        return Ok((schur.complex_eigenvalues().iter().copied().collect(), 0.0));
    }
    let shift = m.row_iter().map(|r| r.abs().sum()).fold(1.0, f64::max);
    let shifted = m + DMatrix::identity(dim, dim) * shift;
    let schur = Schur::try_new(shifted, f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or_else(|| Error::numerical("Schur decomposition did not converge"))?;
    Ok((schur.complex_eigenvalues().iter().copied().collect(), shift))
}

fn raw_symplectic_eigenvalues(state: &GaussianState) -> Result<Vec<f64>> {
    let n = state.n_modes;
    let m = symplectic_form(n) * &state.cov;
    let (eig, shift) = imaginary_axis_eigenvalues(m)?;

    // Ωγ has eigenvalues ±iν_k.
    let mut mags: Vec<f64> = Vec::with_capacity(2 * n);
    for z in eig.iter() {
        let re = z.re - shift;
        if re.abs()
            > PAIRING_TOLERANCE * z.im.abs().max(1.0) + ROUNDOFF_FACTOR * f64::EPSILON * shift
        {
            return Err(Error::numerical(format!(
                "eigenvalue {z} of Ωγ is not imaginary"
            )));
        }
        mags.push(z.im.abs());
    }
    mags.sort_by(|x, y| y.total_cmp(x));

    let mut values = Vec::with_capacity(n);
    for pair in mags.chunks_exact(2) {
        let (hi, lo) = (pair[0], pair[1]);
        if hi - lo > PAIRING_TOLERANCE * hi {
            return Err(Error::numerical(format!(
                "unpaired eigenvalues ±i{hi}, ±i{lo} of Ωγ"
            )));
        }
        values.push(0.5 * (hi + lo));
    }
    Ok(values)
}

pub fn symplectic_eigenvalues(state: &GaussianState) -> Result<SymplecticSpectrum> {
    let values = raw_symplectic_eigenvalues(state)?;
    if let Some(v) = values
        .iter()
        .find(|&&v| v < 1.0 - state.physicality_tolerance())
    {
        return Err(Error::invalid(format!(
            "unphysical state: symplectic eigenvalue {v}"
        )));
    }
    Ok(SymplecticSpectrum { values })
}

/// Entropy (nats) of a thermal mode with symplectic eigenvalue `nu`.
pub fn entropy_g(nu: f64) -> Result<f64> {
    if nu.is_nan() || nu < 1.0 - PHYSICALITY_TOLERANCE {
        return Err(Error::invalid(format!(
            "symplectic eigenvalue {nu} below 1"
        )));
    }
    if nu - 1.0 < 1e-12 {
        return Ok(0.0);
    }
    let plus = 0.5 * (nu + 1.0);
    let minus = 0.5 * (nu - 1.0);
    Ok(plus * plus.ln() - minus * minus.ln())
}

/// Von Neumann entropy in nats.
pub fn von_neumann_entropy(state: &GaussianState) -> Result<f64> {
    symplectic_eigenvalues(state)?
        .values
        .iter()
        .map(|&nu| entropy_g(nu.max(1.0)))
        .sum()
}
