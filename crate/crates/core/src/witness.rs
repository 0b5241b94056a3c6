//! Entanglement and Bell-non-locality witnesses for two-qubit states.
//!
//! Three layers live here:
//!
//! * **Probabilities** — spin projectors and the single/joint outcome
//!   probabilities they induce on a density matrix.
//! * **CHSH** — the four-direction Bell inequality in probability form
//!   (joint vs. marginal probabilities) and in correlation form (contractions
//!   of the correlation matrix `C`), plus the Horodecki criterion: the state
//!   violates CHSH for *some* directions iff the two largest eigenvalues of
//!   `M = CᵀC` sum to more than 1, with maximal value `2√(m₁+m₂)`. The
//!   maximizing directions are constructed analytically from the
//!   eigenvectors of `M`.
//! * **Concurrence** — the Wootters spin-flip entanglement measure,
//!   0 for separable and 1 for maximally entangled states.
//!
//! Probability- and correlation-form results are reported at the *same*
//! correlation-optimal directions; this pairing is a reporting convention,
//! not a mathematical requirement.

use nalgebra::{Matrix2, Matrix3, Matrix4, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c64, dot_pauli, identity2, pauli_helicity, pauli_spin, symmetric_eigen3_desc};
use crate::state::{DensityMatrix, UnitVector3};
use crate::DEFAULT_TOL_PSD;

/// Quantum-mechanical maximum of the CHSH combination (Tsirelson bound).
pub const TSIRELSON_BOUND: f64 = 2.0 * std::f64::consts::SQRT_2;

/// Tolerance on `lhs − rhs` before the probability-form inequality counts as
/// violated; exact-arithmetic cases sit exactly on the bound.
pub const VIOLATION_TOL: f64 = 1e-9;

/// Spin orientation selected by a projector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpinSign {
    Up,
    Down,
}

/// Which particle a single-sided probability refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    First,
    Second,
}

/// The projector `P = ½(1 ± n̂·σ)` onto spin up/down along `n̂`, written in
/// the conventional single-qubit spin basis (first element = spin-up along
/// `ẑ`), so `spin_projector(ẑ, Up) = diag(1, 0)`.
///
/// Stored two-qubit matrices order each factor as `(R, L)` — spin-down
/// first — so embedding a projector into the product space uses the
/// basis-swapped Pauli triple instead; the probability functions below handle
/// that internally.
pub fn spin_projector(n: &UnitVector3, sign: SpinSign) -> Matrix2<Complex64> {
    let s = match sign {
        SpinSign::Up => 1.0,
        SpinSign::Down => -1.0,
    };
    (identity2() + dot_pauli(n.as_vector(), &pauli_spin()) * c64(s, 0.0)) * c64(0.5, 0.0)
}

/// Same projector expressed in the stored `(R, L)` helicity ordering.
fn spin_projector_helicity(n: &UnitVector3, sign: SpinSign) -> Matrix2<Complex64> {
    let s = match sign {
        SpinSign::Up => 1.0,
        SpinSign::Down => -1.0,
    };
    (identity2() + dot_pauli(n.as_vector(), &pauli_helicity()) * c64(s, 0.0)) * c64(0.5, 0.0)
}

fn require_physical(rho: &DensityMatrix) -> Result<()> {
    let report = rho.validate(DEFAULT_TOL_PSD);
    if report.is_physical {
        Ok(())
    } else {
        Err(Error::Unphysical {
            min_eigenvalue: report.min_eigenvalue,
            tol: DEFAULT_TOL_PSD,
        })
    }
}

fn single_probability_unchecked(rho: &DensityMatrix, n: &UnitVector3, side: Side) -> f64 {
    let p = spin_projector_helicity(n, SpinSign::Up);
    let op = match side {
        Side::First => p.kronecker(&identity2()),
        Side::Second => identity2().kronecker(&p),
    };
    rho.expectation(&op)
}

fn joint_probability_signed(
    rho: &DensityMatrix,
    n: &UnitVector3,
    sign_n: SpinSign,
    m: &UnitVector3,
    sign_m: SpinSign,
) -> f64 {
    let op = spin_projector_helicity(n, sign_n).kronecker(&spin_projector_helicity(m, sign_m));
    rho.expectation(&op)
}

/// `P(↑n̂; −)` or `P(−; ↑n̂)`: probability of finding the chosen particle's
/// spin up along `n̂`, disregarding the companion. Equals
/// `Tr[ρ (P_↑n̂ ⊗ 1)]` (or the mirrored embedding). Rejects unphysical `ρ`.
pub fn single_probability(rho: &DensityMatrix, n: &UnitVector3, side: Side) -> Result<f64> {
    require_physical(rho)?;
    Ok(single_probability_unchecked(rho, n, side))
}

/// `P(↑n̂; ↑m̂) = Tr[ρ (P_↑n̂ ⊗ P_↑m̂)]`: both spins up along their respective
/// directions. Rejects unphysical `ρ`.
pub fn joint_probability(rho: &DensityMatrix, n: &UnitVector3, m: &UnitVector3) -> Result<f64> {
    require_physical(rho)?;
    Ok(joint_probability_signed(
        rho,
        n,
        SpinSign::Up,
        m,
        SpinSign::Up,
    ))
}

/// Four spin-measurement directions entering a CHSH evaluation: `n1`, `n3`
/// probe the first particle, `n2`, `n4` the second.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChshDirections {
    pub n1: UnitVector3,
    pub n2: UnitVector3,
    pub n3: UnitVector3,
    pub n4: UnitVector3,
}

impl ChshDirections {
    pub fn new(n1: UnitVector3, n2: UnitVector3, n3: UnitVector3, n4: UnitVector3) -> Self {
        Self { n1, n2, n3, n4 }
    }
}

/// Outcome of the probability-form CHSH inequality
/// `P(↑n1;↑n2) − P(↑n1;↑n4) + P(↑n3;↑n2) + P(↑n3;↑n4) ≤ P(↑n3;−) + P(−;↑n2)`.
#[derive(Clone, Copy, Debug)]
pub struct ProbabilityQuad {
    /// The four-joint-probability combination.
    pub lhs: f64,
    /// Sum of the two single-sided probabilities.
    pub rhs: f64,
    /// `lhs > rhs + 1e-9`: the state is incompatible with local models.
    pub violated: bool,
}

/// Evaluates the probability-form CHSH inequality at the given directions.
/// Every local (deterministic or stochastic) model satisfies `lhs ≤ rhs`.
pub fn chsh_probability_form(rho: &DensityMatrix, d: &ChshDirections) -> Result<ProbabilityQuad> {
    require_physical(rho)?;
    let up = SpinSign::Up;
    let lhs = joint_probability_signed(rho, &d.n1, up, &d.n2, up)
        - joint_probability_signed(rho, &d.n1, up, &d.n4, up)
        + joint_probability_signed(rho, &d.n3, up, &d.n2, up)
        + joint_probability_signed(rho, &d.n3, up, &d.n4, up);
    let rhs = single_probability_unchecked(rho, &d.n3, Side::First)
        + single_probability_unchecked(rho, &d.n2, Side::Second);
    Ok(ProbabilityQuad {
        lhs,
        rhs,
        violated: lhs > rhs + VIOLATION_TOL,
    })
}

/// Correlation-form CHSH combination
/// `|n1·C·(n2 − n4) + n3·C·(n2 + n4)|`, which local models bound by 2.
/// Needs only the correlation matrix, not the full state.
pub fn chsh_correlation_form(c: &Matrix3<f64>, d: &ChshDirections) -> f64 {
    let a = d.n2.as_vector() - d.n4.as_vector();
    let b = d.n2.as_vector() + d.n4.as_vector();
    (d.n1.as_vector().dot(&(c * a)) + d.n3.as_vector().dot(&(c * b))).abs()
}

/// Eigenvalue summary of `M = CᵀC` for the Horodecki criterion.
#[derive(Clone, Copy, Debug)]
pub struct HorodeckiResult {
    /// Largest eigenvalue of `M`.
    pub m1: f64,
    /// Second eigenvalue.
    pub m2: f64,
    /// Smallest eigenvalue.
    pub m3: f64,
    /// `m1 + m2`; the state violates CHSH for some directions iff this
    /// exceeds 1.
    pub m12: f64,
    /// `2√m12`, the maximal CHSH value over all direction choices.
    pub chsh_max: f64,
}

impl HorodeckiResult {
    /// `true` when the criterion certifies non-locality (`m12 > 1`).
    pub fn witnesses_nonlocality(&self) -> bool {
        self.m12 > 1.0
    }
}

/// Applies the Horodecki criterion to a correlation matrix.
pub fn horodecki(c: &Matrix3<f64>) -> HorodeckiResult {
    let m = c.transpose() * c;
    let (values, _) = symmetric_eigen3_desc(&m);
    let m12 = values[0] + values[1];
    HorodeckiResult {
        m1: values[0],
        m2: values[1],
        m3: values[2],
        m12,
        chsh_max: 2.0 * m12.max(0.0).sqrt(),
    }
}

/// Directions achieving the Horodecki maximum, plus the achieved value.
#[derive(Clone, Copy, Debug)]
pub struct OptimalChsh {
    pub directions: ChshDirections,
    /// `chsh_correlation_form` evaluated at `directions`; equals
    /// `2√(m1+m2)` up to rounding.
    pub value: f64,
    /// Set when `C ≈ 0`, where every direction choice gives 0 and the
    /// returned quadruple is an arbitrary orthonormal pick.
    pub degenerate: bool,
}

/// Threshold on `m1` below which the correlation matrix is treated as zero.
const DEGENERATE_M1: f64 = 1e-18;

/// Builds a direction quadruple that attains the Horodecki maximum
/// `2√(m1+m2)`.
///
/// With `u1, u2` the eigenvectors of `M = CᵀC` for its two largest
/// eigenvalues, the second-particle directions are
/// `n2,4 = cosφ·u1 ± sinφ·u2` with `tanφ = √(m2/m1)`, and the first-particle
/// directions are the normalized images `n1 = C·u2/√m2`, `n3 = C·u1/√m1`
/// (so that each `nᵢ·C` term aligns with its partner). When `m2 = 0` the
/// `u2` term drops out and `n1` may be any unit vector orthogonal to `n3`.
/// The returned value is re-evaluated through [`chsh_correlation_form`], so
/// the construction is self-checking.
pub fn optimal_chsh_directions(c: &Matrix3<f64>) -> OptimalChsh {
    let m = c.transpose() * c;
    let (values, vectors) = symmetric_eigen3_desc(&m);
    let m1 = values[0].max(0.0);
    let m2 = values[1].max(0.0);

    if m1 <= DEGENERATE_M1 {
        let directions = ChshDirections::new(
            UnitVector3::x_axis(),
            UnitVector3::y_axis(),
            UnitVector3::z_axis(),
            -UnitVector3::y_axis(),
        );
        return OptimalChsh {
            directions,
            value: chsh_correlation_form(c, &directions),
            degenerate: true,
        };
    }

    let u1: Vector3<f64> = vectors.column(0).into();
    let u2: Vector3<f64> = vectors.column(1).into();
    let n3 = UnitVector3::normalized_from(&(c * u1));
    let n1 = if m2 > DEGENERATE_M1 {
        UnitVector3::normalized_from(&(c * u2))
    } else {
        unit_orthogonal_to(&n3)
    };
    let s = (m1 + m2).sqrt();
    let (cos_phi, sin_phi) = (m1.sqrt() / s, m2.sqrt() / s);
    let n2 = UnitVector3::normalized_from(&(u1 * cos_phi + u2 * sin_phi));
    let n4 = UnitVector3::normalized_from(&(u1 * cos_phi - u2 * sin_phi));

    let directions = ChshDirections::new(n1, n2, n3, n4);
    OptimalChsh {
        directions,
        value: chsh_correlation_form(c, &directions),
        degenerate: false,
    }
}

/// Some unit vector orthogonal to `n`.
fn unit_orthogonal_to(n: &UnitVector3) -> UnitVector3 {
    let v = n.as_vector();
    // Cross with the axis least aligned with n to avoid cancellation.
    let axis = if v.x.abs() <= v.y.abs() && v.x.abs() <= v.z.abs() {
        Vector3::x()
    } else if v.y.abs() <= v.z.abs() {
        Vector3::y()
    } else {
        Vector3::z()
    };
    UnitVector3::normalized_from(&v.cross(&axis))
}

impl UnitVector3 {
    /// Normalizes a generic `nalgebra` vector (internal convenience).
    fn normalized_from(v: &Vector3<f64>) -> UnitVector3 {
        UnitVector3::normalized(v.x, v.y, v.z).expect("vector with positive norm by construction")
    }
}

/// The Wootters concurrence `C[ρ] = max(0, λ₁ − λ₂ − λ₃ − λ₄)`, where `λᵢ`
/// are the descending square roots of the eigenvalues of
/// `ρ · (σy⊗σy) ρ* (σy⊗σy)`.
///
/// Implementation detail: with any factorization `ρ = G G†`, those `λᵢ` are
/// exactly the singular values of `Gᵀ (σy⊗σy) G`. Using the eigenfactor
/// `G = V diag(√max(λ,0))` avoids the loss of precision near zero
/// eigenvalues that squaring-then-rooting would cause, which keeps the
/// result accurate even for (numerically) pure states.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    require_physical(rho)?;
    let (values, vectors) = crate::linalg::hermitian_eigen_desc(rho.matrix());
    let mut g = Matrix4::<Complex64>::zeros();
    for k in 0..4 {
        let root = values[k].max(0.0).sqrt();
        for i in 0..4 {
            g[(i, k)] = vectors[(i, k)] * c64(root, 0.0);
        }
    }
    let n = g.transpose() * spin_flip_operator() * g;
    let mut lambda: Vec<f64> = n.singular_values().iter().copied().collect();
    lambda.sort_by(|a, b| b.partial_cmp(a).expect("singular values are finite"));
    Ok((lambda[0] - lambda[1] - lambda[2] - lambda[3]).clamp(0.0, 1.0))
}

/// `σy ⊗ σy` (identical in the spin and helicity-ordered representations).
fn spin_flip_operator() -> Matrix4<Complex64> {
    let mut y = Matrix4::zeros();
    y[(0, 3)] = c64(-1.0, 0.0);
    y[(1, 2)] = c64(1.0, 0.0);
    y[(2, 1)] = c64(1.0, 0.0);
    y[(3, 0)] = c64(-1.0, 0.0);
    y
}

/// Sanity gate: no physical state may push the CHSH combination past the
/// Tsirelson bound `2√2` (beyond tolerance `1e-9`).
pub fn tsirelson_check(value: f64) -> bool {
    value <= TSIRELSON_BOUND + 1e-9
}

/// Everything the witness layer can say about one state, bundled for
/// reporting.
#[derive(Clone, Copy, Debug)]
pub struct WitnessReport {
    /// Wootters concurrence of the (physical) state.
    pub concurrence: f64,
    /// Horodecki eigenvalue summary of the correlation matrix.
    pub horodecki: HorodeckiResult,
    /// Correlation-optimal CHSH directions.
    pub directions: ChshDirections,
    /// Correlation-form CHSH value at those directions.
    pub optimal_value: f64,
    /// `C ≈ 0`: directions are arbitrary.
    pub degenerate: bool,
    /// Probability-form inequality evaluated at the same directions.
    pub probability: ProbabilityQuad,
    /// Tsirelson sanity gate applied to `optimal_value`.
    pub tsirelson_ok: bool,
}

impl WitnessReport {
    /// Evaluates all witnesses, taking the correlation matrix separately so
    /// callers can pass an unprojected estimate for the Horodecki part while
    /// the probability/concurrence parts use a physical `ρ`.
    pub fn evaluate(rho: &DensityMatrix, c: &Matrix3<f64>) -> Result<Self> {
        let optimal = optimal_chsh_directions(c);
        Ok(WitnessReport {
            concurrence: concurrence(rho)?,
            horodecki: horodecki(c),
            directions: optimal.directions,
            optimal_value: optimal.value,
            degenerate: optimal.degenerate,
            probability: chsh_probability_form(rho, &optimal.directions)?,
            tsirelson_ok: tsirelson_check(optimal.value),
        })
    }

    /// Evaluates all witnesses on one state's own correlation matrix.
    pub fn from_state(rho: &DensityMatrix) -> Result<Self> {
        Self::evaluate(rho, &rho.fano().c)
    }
}
