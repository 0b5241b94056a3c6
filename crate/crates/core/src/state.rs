//! Two-qubit spin states in the Pauli (Fano) parameterization.
//!
//! # Basis and sign conventions
//!
//! All 4×4 matrices are written in the helicity product basis
//!
//! ```text
//! index 0: |RR⟩,  index 1: |RL⟩,  index 2: |LR⟩,  index 3: |LL⟩
//! ```
//!
//! where the first label belongs to the negatively charged fermion (particle
//! "+" and "−" below refer to the *decay side*: `+` is the positively charged
//! parent). `R`/`L` are helicity labels; with the quantization axis along the
//! triad z-axis, `R` is the spin-**down** eigenstate and `L` the spin-up one.
//! That choice makes the separable state `|RL⟩` satisfy the textbook
//! single-sided probability `P(↑n̂) = (1 − n_z)/2` on the first particle.
//!
//! Consequently every Pauli contraction on stored matrices uses the
//! helicity-ordered representation [`crate::linalg::pauli_helicity`] (the
//! standard matrices conjugated by the basis swap); see
//! [`crate::witness::spin_projector`] for the one place where the
//! conventional spin-basis matrices appear instead.
//!
//! # Fano decomposition
//!
//! Any two-qubit density matrix can be expanded as
//!
//! ```text
//! ρ = ¼ [ 1⊗1 + Σᵢ B⁺ᵢ (σᵢ⊗1) + Σⱼ B⁻ⱼ (1⊗σⱼ) + Σᵢⱼ Cᵢⱼ (σᵢ⊗σⱼ) ]
//! ```
//!
//! with real polarization vectors `B±` (Pauli averages, in [−1, 1]) and a
//! real correlation matrix `C` ([`FanoParameters`]). Note these are Pauli
//! averages: spin averages are `⟨sᵢ⟩ = Bᵢ/2`. The map between `ρ` and
//! `(B⁺, B⁻, C)` is linear and exactly invertible; positivity of `ρ` is a
//! separate, non-linear condition checked by [`validate_matrix`] /
//! [`DensityMatrix::validate`].

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::frame::{helicity_rotation, Frame};
use crate::linalg::{c64, hermitian_eigen_desc, hermiticity_defect, identity2, pauli_helicity};

/// Hermiticity tolerance enforced when constructing a [`DensityMatrix`].
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Trace tolerance enforced when constructing a [`DensityMatrix`].
pub const TRACE_TOL: f64 = 1e-12;
/// Trace tolerance used by [`validate_matrix`] when judging physicality of an
/// arbitrary matrix (looser than the constructor: estimates drift).
pub const TRACE_REPORT_TOL: f64 = 1e-9;
/// How far a squared amplitude norm may be from 1 before [`PureState::new`]
/// refuses to renormalize silently.
pub const AMPLITUDE_NORM_TOL: f64 = 1e-9;
const UNIT_NORM_TOL: f64 = 1e-12;

// ---------------------------------------------------------------------------
// UnitVector3
// ---------------------------------------------------------------------------

/// A real 3-vector of unit Euclidean norm: a spin-measurement direction or a
/// decay-product direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitVector3 {
    v: Vector3<f64>,
}

impl UnitVector3 {
    /// Builds from components that are already unit-norm within `1e-12`;
    /// the stored vector is renormalized to remove the residual rounding.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let v = Vector3::new(x, y, z);
        let norm = v.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::NotUnitNorm { norm });
        }
        Ok(Self { v: v / norm })
    }

    /// Normalizes an arbitrary non-tiny vector to unit length.
    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self> {
        let v = Vector3::new(x, y, z);
        let norm = v.norm();
        if !norm.is_finite() || norm < UNIT_NORM_TOL {
            return Err(Error::ZeroNorm { norm });
        }
        Ok(Self { v: v / norm })
    }

    /// Internal constructor for vectors that are unit-norm by construction
    /// (analytic sphere sampling, rotated unit vectors, ...).
    pub(crate) fn from_unit_unchecked(v: Vector3<f64>) -> Self {
        Self { v }
    }

    pub fn x(&self) -> f64 {
        self.v.x
    }

    pub fn y(&self) -> f64 {
        self.v.y
    }

    pub fn z(&self) -> f64 {
        self.v.z
    }

    /// Borrow the underlying `nalgebra` vector.
    pub fn as_vector(&self) -> &Vector3<f64> {
        &self.v
    }

    pub fn dot(&self, other: &UnitVector3) -> f64 {
        self.v.dot(&other.v)
    }

    pub fn x_axis() -> Self {
        Self { v: Vector3::x() }
    }

    pub fn y_axis() -> Self {
        Self { v: Vector3::y() }
    }

    pub fn z_axis() -> Self {
        Self { v: Vector3::z() }
    }
}

impl std::ops::Neg for UnitVector3 {
    type Output = UnitVector3;

    fn neg(self) -> UnitVector3 {
        UnitVector3 { v: -self.v }
    }
}

// ---------------------------------------------------------------------------
// ScatteringAngle
// ---------------------------------------------------------------------------

/// The production scattering angle `Θ ∈ [0, π]` of the positively charged
/// fermion in the center-of-mass frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScatteringAngle {
    theta: f64,
}

impl ScatteringAngle {
    /// Wraps an angle in radians; rejects values outside `[0, π]`.
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() || !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(Error::AngleOutOfRange { theta });
        }
        Ok(Self { theta })
    }

    /// Builds from `cos Θ ∈ [−1, 1]`.
    pub fn from_cos(cos_theta: f64) -> Result<Self> {
        if !cos_theta.is_finite() || cos_theta.abs() > 1.0 {
            return Err(Error::CosineOutOfRange { value: cos_theta });
        }
        Ok(Self {
            theta: cos_theta.acos(),
        })
    }

    pub fn radians(&self) -> f64 {
        self.theta
    }

    pub fn cos(&self) -> f64 {
        self.theta.cos()
    }

    /// `sin Θ ≥ 0` on the allowed range.
    pub fn sin(&self) -> f64 {
        self.theta.sin()
    }
}

// ---------------------------------------------------------------------------
// PureState
// ---------------------------------------------------------------------------

/// A normalized pure two-qubit state `Σᵢ ζᵢ |i⟩` in the basis ordering
/// `|RR⟩, |RL⟩, |LR⟩, |LL⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PureState {
    amp: Vector4<Complex64>,
}

impl PureState {
    /// Builds from four amplitudes; rejects inputs whose squared norm is more
    /// than `1e-9` away from 1, otherwise renormalizes exactly.
    pub fn new(amplitudes: [Complex64; 4]) -> Result<Self> {
        let amp = Vector4::from_row_slice(&amplitudes);
        let norm_sq: f64 = amp.iter().map(|z| z.norm_sqr()).sum();
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > AMPLITUDE_NORM_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self {
            amp: amp / c64(norm_sq.sqrt(), 0.0),
        })
    }

    pub fn amplitudes(&self) -> &Vector4<Complex64> {
        &self.amp
    }

    /// The rank-one density matrix `|ψ⟩⟨ψ|`.
    pub fn density(&self) -> DensityMatrix {
        let mut m = Matrix4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m[(i, j)] = self.amp[i] * self.amp[j].conj();
            }
        }
        DensityMatrix::from_matrix(m).expect("outer product is Hermitian with unit trace")
    }

    /// Closed-form concurrence `2 |ζ₀ζ₃ − ζ₁ζ₂|`, valid for pure states only.
    /// Serves as an independent cross-check of the spin-flip construction in
    /// [`crate::witness::concurrence`].
    pub fn concurrence(&self) -> f64 {
        2.0 * (self.amp[0] * self.amp[3] - self.amp[1] * self.amp[2]).norm()
    }
}

// ---------------------------------------------------------------------------
// FanoParameters
// ---------------------------------------------------------------------------

/// The coefficients of the Fano expansion: polarization vectors `B⁺` (first
/// particle) and `B⁻` (second particle) and the 3×3 spin-correlation matrix
/// `C`.
///
/// Physical states satisfy `|B±| ≤ 1` and `|Cᵢⱼ| ≤ 1`, but the fields are
/// deliberately unconstrained because method-of-moments *estimates* of these
/// quantities routinely fall outside the physical range; use
/// [`FanoParameters::well_formed`] or validate the reconstructed matrix when
/// physicality matters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FanoParameters {
    pub bplus: Vector3<f64>,
    pub bminus: Vector3<f64>,
    pub c: Matrix3<f64>,
}

impl FanoParameters {
    /// All coefficients zero: the maximally mixed state.
    pub fn zero() -> Self {
        Self {
            bplus: Vector3::zeros(),
            bminus: Vector3::zeros(),
            c: Matrix3::zeros(),
        }
    }

    /// Necessary (not sufficient) physicality bounds: `|B±| ≤ 1 + tol` and
    /// every entry of `C` in `[−1 − tol, 1 + tol]`.
    pub fn well_formed(&self, tol: f64) -> bool {
        self.bplus.norm() <= 1.0 + tol
            && self.bminus.norm() <= 1.0 + tol
            && self.c.iter().all(|x| x.abs() <= 1.0 + tol)
    }

    /// Reconstructs the density matrix
    /// `ρ = ¼[1⊗1 + B⁺·(σ⊗1) + B⁻·(1⊗σ) + Σ Cᵢⱼ σᵢ⊗σⱼ]`.
    ///
    /// The output is Hermitian with unit trace for *any* input, but positive
    /// semidefinite only for physical parameters — callers validate.
    pub fn to_density(&self) -> DensityMatrix {
        let pauli = pauli_helicity();
        let id = identity2();
        let mut m = id.kronecker(&id);
        for i in 0..3 {
            m += pauli[i].kronecker(&id) * c64(self.bplus[i], 0.0);
            m += id.kronecker(&pauli[i]) * c64(self.bminus[i], 0.0);
            for j in 0..3 {
                m += pauli[i].kronecker(&pauli[j]) * c64(self.c[(i, j)], 0.0);
            }
        }
        DensityMatrix::from_matrix(m * c64(0.25, 0.0))
            .expect("Fano expansion is Hermitian with unit trace by construction")
    }

    /// Re-expresses the parameters in a rotated basis: `B → R B`,
    /// `C → R C Rᵀ`. `rotation` columns are the old axes written in the new
    /// basis (see [`crate::frame::helicity_rotation`]).
    pub fn rotated(&self, rotation: &Matrix3<f64>) -> Self {
        Self {
            bplus: rotation * self.bplus,
            bminus: rotation * self.bminus,
            c: rotation * self.c * rotation.transpose(),
        }
    }
}

// ---------------------------------------------------------------------------
// DensityMatrix
// ---------------------------------------------------------------------------

/// A 4×4 complex matrix that is Hermitian with unit trace (enforced at
/// construction within `1e-12`). Positive semidefiniteness is *not* enforced
/// here — tomographic estimates legitimately leave the physical set — and is
/// checked separately through [`DensityMatrix::validate`] and repaired with
/// [`DensityMatrix::project_to_physical`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix {
    m: Matrix4<Complex64>,
}

impl DensityMatrix {
    /// Validates Hermiticity and unit trace, then stores the Hermitian part
    /// (which differs from the input only below the tolerance).
    pub fn from_matrix(m: Matrix4<Complex64>) -> Result<Self> {
        let defect = hermiticity_defect(&m);
        if !defect.is_finite() || defect > HERMITICITY_TOL {
            return Err(Error::NotHermitian { defect });
        }
        let deviation = (m.trace() - c64(1.0, 0.0)).norm();
        if deviation > TRACE_TOL {
            return Err(Error::WrongTrace { deviation });
        }
        Ok(Self {
            m: crate::linalg::hermitize(&m),
        })
    }

    /// The maximally mixed state `1/4`.
    pub fn maximally_mixed() -> Self {
        Self {
            m: Matrix4::identity() * c64(0.25, 0.0),
        }
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.m
    }

    /// Extracts the Fano coefficients `B⁺ᵢ = Tr[ρ(σᵢ⊗1)]`,
    /// `B⁻ⱼ = Tr[ρ(1⊗σⱼ)]`, `Cᵢⱼ = Tr[ρ(σᵢ⊗σⱼ)]` — the exact inverse of
    /// [`FanoParameters::to_density`].
    pub fn fano(&self) -> FanoParameters {
        let pauli = pauli_helicity();
        let id = identity2();
        let mut f = FanoParameters::zero();
        for i in 0..3 {
            f.bplus[i] = self.expectation(&pauli[i].kronecker(&id));
            f.bminus[i] = self.expectation(&id.kronecker(&pauli[i]));
            for j in 0..3 {
                f.c[(i, j)] = self.expectation(&pauli[i].kronecker(&pauli[j]));
            }
        }
        f
    }

    /// `Re Tr[ρ · op]` (real automatically when `op` is Hermitian).
    pub fn expectation(&self, op: &Matrix4<Complex64>) -> f64 {
        (self.m * op).trace().re
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        hermitian_eigen_desc(&self.m).0
    }

    /// Full validation report; see [`validate_matrix`].
    pub fn validate(&self, tol_psd: f64) -> ValidationReport {
        validate_matrix(&self.m, tol_psd)
    }

    /// `true` when the smallest eigenvalue is ≥ `−tol_psd`.
    pub fn is_physical(&self, tol_psd: f64) -> bool {
        self.validate(tol_psd).is_physical
    }

    /// Closest positive-semidefinite unit-trace matrix in Frobenius norm:
    /// eigendecompose, clip negative eigenvalues to zero, renormalize the
    /// trace. Idempotent, and the identity on already-physical input.
    pub fn project_to_physical(&self) -> DensityMatrix {
        let (values, vectors) = hermitian_eigen_desc(&self.m);
        let clipped: Vec<f64> = values.iter().map(|&v| v.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        let mut m = Matrix4::zeros();
        for (k, value) in clipped.iter().enumerate() {
            let w = value / total;
            if w == 0.0 {
                continue;
            }
            let col = vectors.column(k);
            for i in 0..4 {
                for j in 0..4 {
                    m[(i, j)] += col[i] * col[j].conj() * c64(w, 0.0);
                }
            }
        }
        DensityMatrix::from_matrix(m)
            .expect("clipped eigendecomposition is Hermitian with unit trace")
    }

    /// Purity `Tr ρ²` (1 for pure states, ¼ for the maximally mixed state).
    pub fn purity(&self) -> f64 {
        (self.m * self.m).trace().re
    }
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// Outcome of checking a candidate density matrix.
#[derive(Clone, Copy, Debug)]
pub struct ValidationReport {
    /// Hermitian within [`HERMITICITY_TOL`].
    pub hermitian: bool,
    /// Largest entrywise deviation `|m_ij − conj(m_ji)|`.
    pub hermiticity_defect: f64,
    /// Signed trace deviation `Re Tr(m) − 1`.
    pub trace_dev: f64,
    /// Eigenvalues of the Hermitian part, descending.
    pub eigenvalues: [f64; 4],
    /// Smallest eigenvalue of the Hermitian part.
    pub min_eigenvalue: f64,
    /// `hermitian ∧ |trace_dev| ≤ 1e-9 ∧ min_eigenvalue ≥ −tol_psd`.
    pub is_physical: bool,
}

/// Validates an arbitrary 4×4 complex matrix as a density-matrix candidate.
///
/// Eigenvalues are computed on the Hermitian part `(m + m†)/2`, so they are
/// only indicative when the Hermiticity check itself fails. The default
/// positivity tolerance is [`crate::DEFAULT_TOL_PSD`].
pub fn validate_matrix(m: &Matrix4<Complex64>, tol_psd: f64) -> ValidationReport {
    let defect = hermiticity_defect(m);
    let hermitian = defect.is_finite() && defect <= HERMITICITY_TOL;
    let trace_dev = m.trace().re - 1.0;
    let (eigenvalues, _) = hermitian_eigen_desc(m);
    let min_eigenvalue = eigenvalues[3];
    ValidationReport {
        hermitian,
        hermiticity_defect: defect,
        trace_dev,
        eigenvalues,
        min_eigenvalue,
        is_physical: hermitian && trace_dev.abs() <= TRACE_REPORT_TOL && min_eigenvalue >= -tol_psd,
    }
}

// ---------------------------------------------------------------------------
// The τ-pair production state
// ---------------------------------------------------------------------------

/// The pure spin state of a fermion pair produced through an (unpolarized)
/// vector coupling at scattering angle `Θ`:
///
/// ```text
/// |Ψ(Θ)⟩ = [ (1+cosΘ) |RL⟩ + (1−cosΘ) |LR⟩ ] / √(2(1+cos²Θ))
/// ```
///
/// Separable at the endpoints `Θ ∈ {0, π}` and maximally entangled at
/// `Θ = π/2`.
pub fn tau_pair_state(theta: ScatteringAngle) -> PureState {
    let c = theta.cos();
    let norm = (2.0 * (1.0 + c * c)).sqrt();
    PureState::new([
        c64(0.0, 0.0),
        c64((1.0 + c) / norm, 0.0),
        c64((1.0 - c) / norm, 0.0),
        c64(0.0, 0.0),
    ])
    .expect("analytically normalized")
}

/// Closed-form Fano coefficients of [`tau_pair_state`] in the helicity triad
/// `(n̂, r̂, k̂)`:
///
/// ```text
/// C = diag(κ, κ, −1),  B⁺ = (0, 0, −2cosΘ/(1+cos²Θ)),  B⁻ = −B⁺,
/// κ = sin²Θ / (1+cos²Θ)   (which also equals the concurrence).
/// ```
pub fn tau_pair_fano(theta: ScatteringAngle) -> FanoParameters {
    let c = theta.cos();
    let denom = 1.0 + c * c;
    let kappa = (1.0 - c * c) / denom;
    let bz = -2.0 * c / denom;
    FanoParameters {
        bplus: Vector3::new(0.0, 0.0, bz),
        bminus: Vector3::new(0.0, 0.0, -bz),
        c: Matrix3::from_diagonal(&Vector3::new(kappa, kappa, -1.0)),
    }
}

// ---------------------------------------------------------------------------
// Convex averaging
// ---------------------------------------------------------------------------

/// Weighted convex combination `ρ̄ = Σ wᵢ ρᵢ / Σ wᵢ` of density matrices.
/// Physical whenever all inputs are physical.
pub fn average_density(weights: &[f64], states: &[DensityMatrix]) -> Result<DensityMatrix> {
    if weights.len() != states.len() {
        return Err(Error::LengthMismatch {
            weights: weights.len(),
            states: states.len(),
        });
    }
    if states.is_empty() {
        return Err(Error::EmptyInput {
            what: "list of states to average",
        });
    }
    for (index, &w) in weights.iter().enumerate() {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::NegativeWeight { index, value: w });
        }
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroWeightSum);
    }
    let mut m = Matrix4::zeros();
    for (w, state) in weights.iter().zip(states) {
        m += state.matrix() * c64(w / total, 0.0);
    }
    DensityMatrix::from_matrix(m)
}

/// The Θ-averaged pair state on an `n_grid`-point midpoint quadrature in
/// `cosΘ` with the tree-level production weight `1 + cos²Θ`.
///
/// In `Frame::FixedLab` every event's Fano coefficients are first rotated
/// into the common lab basis, so the average is the spin state an observer
/// using one fixed triad would assign to the whole ensemble. In
/// `Frame::Helicity` the matrices are averaged in their per-event triads,
/// which yields a *fictitious* state: a useful bookkeeping object that no
/// single measurement basis realizes. The two averages differ substantially.
///
/// A single-point grid (`n_grid = 1`) degenerates to the midpoint
/// `cosΘ = 0`, i.e. the pure maximally entangled state at `Θ = π/2`.
pub fn tau_average_density(n_grid: usize, frame: Frame) -> Result<DensityMatrix> {
    if n_grid < 1 {
        return Err(Error::GridTooSmall {
            got: n_grid,
            need: 1,
        });
    }
    let mut weights = Vec::with_capacity(n_grid);
    let mut states = Vec::with_capacity(n_grid);
    for k in 0..n_grid {
        let cos_theta = -1.0 + (2 * k + 1) as f64 / n_grid as f64;
        let angle = ScatteringAngle::from_cos(cos_theta)?;
        weights.push(1.0 + cos_theta * cos_theta);
        let state = match frame {
            Frame::Helicity => tau_pair_state(angle).density(),
            Frame::FixedLab => tau_pair_fano(angle)
                .rotated(&helicity_rotation(cos_theta))
                .to_density(),
        };
        states.push(state);
    }
    average_density(&weights, &states)
}
