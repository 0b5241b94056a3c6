//! Method-of-moments spin tomography with bootstrap uncertainties.
//!
//! The decay daughters are self-analyzing: under the joint angular density
//! of the generator module, `E[n̂±ᵢ] = α± B±ᵢ/3` and
//! `E[n̂⁺ᵢ n̂⁻ⱼ] = α⁺α⁻ Cᵢⱼ/9`. Inverting these moment laws on sample means
//! gives closed-form, bias-free estimators of all 15 Fano parameters:
//!
//! ```text
//! B̂±ᵢ = 3·mean(n̂±ᵢ)/α±        Ĉᵢⱼ = 9·mean(n̂⁺ᵢ n̂⁻ⱼ)/(α⁺α⁻)
//! ```
//!
//! Point estimates live *outside* the physical state space whenever the true
//! state sits on its boundary (pure states always do), so the reconstructed
//! `ρ̂` is reported both ways: the raw Fano estimate, and the closest
//! physical state after eigenvalue clipping. Witnesses follow the same
//! split: the Horodecki criterion needs only the correlation matrix and is
//! evaluated on the *unprojected* `Ĉ` (minimal distortion), while the
//! concurrence requires a genuine state and uses the *projected* `ρ̂`.
//!
//! Uncertainties come from a nonparametric bootstrap (resampling events with
//! replacement, re-running the full estimator chain per resample); the
//! cheaper delta-method covariance of the 15 moments is retained in
//! [`TomographyResult::covariance`] as a cross-check.

use nalgebra::SMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::generator::EventRecord;
use crate::linalg::max_abs_diff;
use crate::state::{DensityMatrix, FanoParameters};
use crate::witness::{concurrence, horodecki};

/// Below this many events the moment estimators are too noisy to mean
/// anything; the estimator refuses to run.
pub const MIN_EVENTS: usize = 100;

/// Minimum number of bootstrap resamples.
pub const MIN_RESAMPLES: usize = 100;

/// Default number of bootstrap resamples.
pub const DEFAULT_RESAMPLES: usize = 1000;

/// `|m̂12 − 1|` below this is reported as exactly-critical: the point
/// estimate sits on the non-locality boundary and no sign is claimed.
pub const CRITICAL_TOL: f64 = 1e-12;

/// A point estimate of the spin state, with delta-method errors.
#[derive(Clone, Debug)]
pub struct TomographyResult {
    /// Raw method-of-moments estimate (may be unphysical).
    pub fano_hat: FanoParameters,
    /// Delta-method covariance of the 15 estimates, ordered
    /// `(B⁺x, B⁺y, B⁺z, B⁻x, B⁻y, B⁻z, Cxx, Cxy, …, Czz)`: the sample
    /// covariance of the per-event moment vectors divided by `N`.
    pub covariance: SMatrix<f64, 15, 15>,
    /// Number of events used.
    pub n_events: usize,
    /// Reconstructed state after projection onto the physical set.
    pub rho_hat: DensityMatrix,
    /// Whether projection moved the matrix by more than `1e-12` per entry.
    pub projected: bool,
}

impl TomographyResult {
    /// The 15 estimates as one vector, in covariance order.
    pub fn fano_vector(&self) -> SMatrix<f64, 15, 1> {
        fano_to_vector(&self.fano_hat)
    }
}

fn check_alpha(value: f64) -> Result<()> {
    if value > 0.0 && value <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidAnalyzingPower { value })
    }
}

fn fano_to_vector(f: &FanoParameters) -> SMatrix<f64, 15, 1> {
    let mut v = SMatrix::<f64, 15, 1>::zeros();
    for i in 0..3 {
        v[i] = f.bplus[i];
        v[3 + i] = f.bminus[i];
        for j in 0..3 {
            v[6 + 3 * i + j] = f.c[(i, j)];
        }
    }
    v
}

fn vector_to_fano(v: &SMatrix<f64, 15, 1>) -> FanoParameters {
    let mut f = FanoParameters::zero();
    for i in 0..3 {
        f.bplus[i] = v[i];
        f.bminus[i] = v[3 + i];
        for j in 0..3 {
            f.c[(i, j)] = v[6 + 3 * i + j];
        }
    }
    f
}

/// The per-event moment vector `g` whose mean estimates the Fano vector:
/// `g = (3u/α⁺, 3v/α⁻, 9 u⊗v/(α⁺α⁻))`.
fn event_moments(event: &EventRecord, alpha_plus: f64, alpha_minus: f64) -> SMatrix<f64, 15, 1> {
    let u = event.nhat_plus.as_vector();
    let v = event.nhat_minus.as_vector();
    let mut g = SMatrix::<f64, 15, 1>::zeros();
    for i in 0..3 {
        g[i] = 3.0 * u[i] / alpha_plus;
        g[3 + i] = 3.0 * v[i] / alpha_minus;
        for j in 0..3 {
            g[6 + 3 * i + j] = 9.0 * u[i] * v[j] / (alpha_plus * alpha_minus);
        }
    }
    g
}

/// Method-of-moments reconstruction of the Fano parameters from an event
/// sample, with delta-method covariance and a physicality-projected state.
pub fn estimate_fano(
    events: &[EventRecord],
    alpha_plus: f64,
    alpha_minus: f64,
) -> Result<TomographyResult> {
    check_alpha(alpha_plus)?;
    check_alpha(alpha_minus)?;
    let n = events.len();
    if n < MIN_EVENTS {
        return Err(Error::TooFewEvents {
            got: n,
            need: MIN_EVENTS,
        });
    }

    let mut mean = SMatrix::<f64, 15, 1>::zeros();
    for event in events {
        mean += event_moments(event, alpha_plus, alpha_minus);
    }
    mean /= n as f64;

    // Sample covariance of g, then covariance of the mean = S/N.
    let mut cov = SMatrix::<f64, 15, 15>::zeros();
    for event in events {
        let d = event_moments(event, alpha_plus, alpha_minus) - mean;
        cov += d * d.transpose();
    }
    cov /= (n - 1) as f64 * n as f64;

    let fano_hat = vector_to_fano(&mean);
    let raw = fano_hat.to_density();
    let rho_hat = raw.project_to_physical();
    let projected = max_abs_diff(raw.matrix(), rho_hat.matrix()) > 1e-12;

    Ok(TomographyResult {
        fano_hat,
        covariance: cov,
        n_events: n,
        rho_hat,
        projected,
    })
}

/// Central summary of one bootstrapped scalar: standard deviation and the
/// 16th/84th percentiles (the central 68% interval) across resamples.
#[derive(Clone, Copy, Debug)]
pub struct WitnessInterval {
    pub mean: f64,
    pub sigma: f64,
    pub p16: f64,
    pub p84: f64,
}

impl WitnessInterval {
    fn from_samples(samples: &mut [f64]) -> Self {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        samples.sort_by(|a, b| a.partial_cmp(b).expect("finite bootstrap samples"));
        Self {
            mean,
            sigma: var.max(0.0).sqrt(),
            p16: percentile_sorted(samples, 0.16),
            p84: percentile_sorted(samples, 0.84),
        }
    }

    /// `true` when the interval has (numerically) zero width: resampling
    /// produced identical values up to summation rounding.
    pub fn is_degenerate(&self) -> bool {
        effectively_zero(self.sigma, self.mean)
    }
}

/// Whether a spread is indistinguishable from zero at the scale of its
/// central value (pure floating-point noise from re-summing identical
/// values in different orders).
fn effectively_zero(sigma: f64, scale: f64) -> bool {
    sigma <= 1e-12 * (1.0 + scale.abs())
}

/// Linear-interpolation percentile (the common "type 7" definition) of an
/// ascending slice.
fn percentile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    let frac = h - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// Bootstrap distribution summaries for the estimator chain.
#[derive(Clone, Debug)]
pub struct BootstrapSummary {
    /// Resamples requested.
    pub n_resamples: usize,
    /// Resamples that failed to produce finite estimates (tolerated up to
    /// 1% of the total).
    pub n_failed: usize,
    /// Bootstrap covariance of the 15 Fano estimates (same ordering as
    /// [`TomographyResult::covariance`]).
    pub fano_covariance: SMatrix<f64, 15, 15>,
    /// Horodecki `m₁ + m₂` of the unprojected `Ĉ`.
    pub m12: WitnessInterval,
    /// Wootters concurrence of the projected `ρ̂`.
    pub concurrence: WitnessInterval,
    /// `2√m12` of the unprojected `Ĉ`.
    pub chsh_max: WitnessInterval,
}

/// The RNG substream for bootstrap resample `r` under a master `seed`; the
/// top bit keeps these disjoint from the event-generation substreams.
fn resample_rng(seed: u64, r: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((1 << 63) | r);
    rng
}

/// Nonparametric bootstrap over events: resample with replacement, re-run
/// the full estimator and witness chain, and summarize the resulting
/// distributions. Deterministic given `seed`.
pub fn bootstrap(
    events: &[EventRecord],
    alpha_plus: f64,
    alpha_minus: f64,
    n_resamples: usize,
    seed: u64,
) -> Result<BootstrapSummary> {
    check_alpha(alpha_plus)?;
    check_alpha(alpha_minus)?;
    if events.len() < MIN_EVENTS {
        return Err(Error::TooFewEvents {
            got: events.len(),
            need: MIN_EVENTS,
        });
    }
    if n_resamples < MIN_RESAMPLES {
        return Err(Error::TooFewResamples {
            got: n_resamples,
            need: MIN_RESAMPLES,
        });
    }

    let n = events.len();
    let scale = SMatrix::<f64, 15, 1>::from_fn(|k, _| {
        if k < 3 {
            3.0 / alpha_plus
        } else if k < 6 {
            3.0 / alpha_minus
        } else {
            9.0 / (alpha_plus * alpha_minus)
        }
    });

    let mut fano_samples: Vec<SMatrix<f64, 15, 1>> = Vec::with_capacity(n_resamples);
    let mut m12_samples = Vec::with_capacity(n_resamples);
    let mut conc_samples = Vec::with_capacity(n_resamples);
    let mut chsh_samples = Vec::with_capacity(n_resamples);
    let mut n_failed = 0;

    for r in 0..n_resamples {
        let mut rng = resample_rng(seed, r as u64);
        // Accumulate raw direction moments, then rescale once.
        let mut sums = SMatrix::<f64, 15, 1>::zeros();
        for _ in 0..n {
            let e = &events[rng.random_range(0..n)];
            let u = e.nhat_plus.as_vector();
            let v = e.nhat_minus.as_vector();
            for i in 0..3 {
                sums[i] += u[i];
                sums[3 + i] += v[i];
                for j in 0..3 {
                    sums[6 + 3 * i + j] += u[i] * v[j];
                }
            }
        }
        let fano_vec = sums.component_mul(&scale) / n as f64;
        let fano = vector_to_fano(&fano_vec);

        let h = horodecki(&fano.c);
        let conc = concurrence(&fano.to_density().project_to_physical());
        match conc {
            Ok(conc) if h.m12.is_finite() && conc.is_finite() => {
                fano_samples.push(fano_vec);
                m12_samples.push(h.m12);
                conc_samples.push(conc);
                chsh_samples.push(h.chsh_max);
            }
            _ => n_failed += 1,
        }
    }

    if n_failed * 100 > n_resamples {
        return Err(Error::BootstrapUnstable {
            failed: n_failed,
            total: n_resamples,
        });
    }

    // Bootstrap covariance of the Fano vector across resamples.
    let kept = fano_samples.len() as f64;
    let mut fano_mean = SMatrix::<f64, 15, 1>::zeros();
    for s in &fano_samples {
        fano_mean += s;
    }
    fano_mean /= kept;
    let mut fano_covariance = SMatrix::<f64, 15, 15>::zeros();
    for s in &fano_samples {
        let d = s - fano_mean;
        fano_covariance += d * d.transpose();
    }
    fano_covariance /= kept - 1.0;

    Ok(BootstrapSummary {
        n_resamples,
        n_failed,
        fano_covariance,
        m12: WitnessInterval::from_samples(&mut m12_samples),
        concurrence: WitnessInterval::from_samples(&mut conc_samples),
        chsh_max: WitnessInterval::from_samples(&mut chsh_samples),
    })
}

/// Witness point values with bootstrap errors, expressed as significances.
#[derive(Clone, Copy, Debug)]
pub struct SignificanceReport {
    /// Horodecki `m₁ + m₂` of the unprojected point estimate `Ĉ`.
    pub m12_hat: f64,
    /// Bootstrap standard deviation of `m̂12`.
    pub m12_sigma: f64,
    /// `(m̂12 − 1)/σ`: positive beyond 5 certifies non-locality.
    pub z_nonlocality: f64,
    /// Concurrence of the projected `ρ̂`.
    pub concurrence_hat: f64,
    /// Bootstrap standard deviation of the concurrence.
    pub concurrence_sigma: f64,
    /// `Ĉ[ρ̂]/σ`: positive beyond 5 certifies entanglement.
    pub z_entanglement: f64,
    /// `2√m̂12`.
    pub chsh_max_hat: f64,
    /// Tsirelson sanity gate on `chsh_max_hat`.
    pub tsirelson_ok: bool,
    /// `|m̂12 − 1| < 1e-12`: the point estimate sits exactly on the
    /// non-locality boundary; no sign is claimed for `z_nonlocality`.
    pub exactly_critical: bool,
    /// A zero bootstrap sigma met a nonzero numerator: the reported `z` is
    /// infinite and should not be read as a significance.
    pub degenerate_z: bool,
}

fn z_score(numerator: f64, sigma: f64) -> (f64, bool) {
    if !effectively_zero(sigma, numerator) {
        (numerator / sigma, false)
    } else if numerator == 0.0 {
        (0.0, false)
    } else {
        (f64::INFINITY.copysign(numerator), true)
    }
}

/// Combines a point estimate with its bootstrap to grade the evidence for
/// non-locality and entanglement.
pub fn witness_significance(t: &TomographyResult, boot: &BootstrapSummary) -> SignificanceReport {
    let m12_hat = horodecki(&t.fano_hat.c).m12;
    let concurrence_hat = concurrence(&t.rho_hat).expect("rho_hat is physical by construction");

    let (z_nonlocality, degenerate_m12) = z_score(m12_hat - 1.0, boot.m12.sigma);
    let (z_entanglement, degenerate_conc) = z_score(concurrence_hat, boot.concurrence.sigma);
    let chsh_max_hat = 2.0 * m12_hat.max(0.0).sqrt();

    SignificanceReport {
        m12_hat,
        m12_sigma: boot.m12.sigma,
        z_nonlocality,
        concurrence_hat,
        concurrence_sigma: boot.concurrence.sigma,
        z_entanglement,
        chsh_max_hat,
        tsirelson_ok: crate::witness::tsirelson_check(chsh_max_hat),
        exactly_critical: (m12_hat - 1.0).abs() < CRITICAL_TOL,
        degenerate_z: degenerate_m12 || degenerate_conc,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{generate_events, GeneratorConfig, StateSource, ThetaMode};
    use crate::state::{tau_pair_fano, ScatteringAngle, UnitVector3};
    use nalgebra::{Matrix3, Vector3};
    use std::f64::consts::FRAC_PI_2;

    fn bell_events(n: u64, seed: u64) -> Vec<EventRecord> {
        let mut config = GeneratorConfig::new(n, seed);
        config.theta_mode = ThetaMode::Fixed(ScatteringAngle::new(FRAC_PI_2).unwrap());
        generate_events(config, StateSource::TauPair).unwrap().0
    }

    fn constant_events(n: u64, direction: UnitVector3) -> Vec<EventRecord> {
        (0..n)
            .map(|index| EventRecord {
                index,
                cos_theta_scatter: 0.0,
                nhat_plus: direction,
                nhat_minus: direction,
            })
            .collect()
    }

    #[test]
    fn rejects_bad_inputs() {
        let events = bell_events(200, 1);
        assert!(matches!(
            estimate_fano(&events[..99], 1.0, 1.0),
            Err(Error::TooFewEvents { got: 99, need: 100 })
        ));
        assert!(matches!(
            estimate_fano(&events, 0.0, 1.0),
            Err(Error::InvalidAnalyzingPower { .. })
        ));
        assert!(matches!(
            bootstrap(&events, 1.0, 1.0, 99, 0),
            Err(Error::TooFewResamples { got: 99, need: 100 })
        ));
        assert!(matches!(
            bootstrap(&events[..50], 1.0, 1.0, 1000, 0),
            Err(Error::TooFewEvents { .. })
        ));
    }

    #[test]
    fn degenerate_input_engages_projection() {
        // Every daughter along +ẑ: B̂⁺_z = 3·1 = 3, wildly unphysical.
        let events = constant_events(200, UnitVector3::z_axis());
        let t = estimate_fano(&events, 1.0, 1.0).unwrap();
        assert!((t.fano_hat.bplus[2] - 3.0).abs() < 1e-12);
        assert!((t.fano_hat.bminus[2] - 3.0).abs() < 1e-12);
        assert!((t.fano_hat.c[(2, 2)] - 9.0).abs() < 1e-12);
        assert!(!t.fano_hat.to_density().is_physical(1e-9));
        assert!(t.projected, "projection must engage");
        assert!(t.rho_hat.is_physical(1e-9), "projected state is physical");
        // Constant data ⇒ zero sampling variance.
        assert!(t.covariance.amax() < 1e-20);
    }

    #[test]
    fn bell_closure_within_errors() {
        let events = bell_events(100_000, 7);
        let t = estimate_fano(&events, 1.0, 1.0).unwrap();
        let truth = tau_pair_fano(ScatteringAngle::new(FRAC_PI_2).unwrap());
        let truth_vec = {
            let mut v = [0.0; 15];
            for i in 0..3 {
                v[i] = truth.bplus[i];
                v[3 + i] = truth.bminus[i];
                for j in 0..3 {
                    v[6 + 3 * i + j] = truth.c[(i, j)];
                }
            }
            v
        };
        let estimate = t.fano_vector();
        for k in 0..15 {
            let sigma = t.covariance[(k, k)].sqrt();
            assert!(
                (estimate[k] - truth_vec[k]).abs() < 5.0 * sigma,
                "component {k}: {} vs {} (σ = {sigma})",
                estimate[k],
                truth_vec[k]
            );
        }
        assert_eq!(t.n_events, 100_000);
    }

    #[test]
    fn isotropic_closure_is_null() {
        let mut config = GeneratorConfig::new(50_000, 11);
        config.theta_mode = ThetaMode::Fixed(ScatteringAngle::new(FRAC_PI_2).unwrap());
        let (events, _) =
            generate_events(config, StateSource::Fixed(FanoParameters::zero())).unwrap();
        let t = estimate_fano(&events, 1.0, 1.0).unwrap();
        let estimate = t.fano_vector();
        for k in 0..15 {
            let sigma = t.covariance[(k, k)].sqrt();
            assert!(estimate[k].abs() < 5.0 * sigma, "component {k}");
        }
        // Interior state: no projection needed.
        assert!(!t.projected);
        assert!(max_abs_diff(t.fano_hat.to_density().matrix(), t.rho_hat.matrix()) < 1e-12);
    }

    #[test]
    fn analyzing_powers_are_divided_out() {
        // Generate with α⁺ = 0.6, α⁻ = 0.8 and reconstruct with the same:
        // estimates must still be centered on the true Fano parameters.
        let mut config = GeneratorConfig::new(80_000, 13);
        config.theta_mode = ThetaMode::Fixed(ScatteringAngle::new(FRAC_PI_2).unwrap());
        config.alpha_plus = 0.6;
        config.alpha_minus = 0.8;
        let (events, _) = generate_events(config, StateSource::TauPair).unwrap();
        let t = estimate_fano(&events, 0.6, 0.8).unwrap();
        let truth = tau_pair_fano(ScatteringAngle::new(FRAC_PI_2).unwrap());
        for i in 0..3 {
            for j in 0..3 {
                let sigma = t.covariance[(6 + 3 * i + j, 6 + 3 * i + j)].sqrt();
                assert!(
                    (t.fano_hat.c[(i, j)] - truth.c[(i, j)]).abs() < 5.0 * sigma,
                    "C[{i}{j}]"
                );
            }
        }
    }

    #[test]
    fn covariance_is_symmetric_psd() {
        let events = bell_events(20_000, 17);
        let t = estimate_fano(&events, 1.0, 1.0).unwrap();
        let asym = (t.covariance - t.covariance.transpose()).amax();
        assert!(asym < 1e-15, "exact symmetry by construction");
        let eig = t.covariance.symmetric_eigen();
        assert!(
            eig.eigenvalues.iter().all(|&v| v > -1e-9),
            "PSD within 1e-9"
        );
        // Sanity scale: sigma of a mean of bounded terms at N = 2·10⁴.
        let sigma_czz = t.covariance[(14, 14)].sqrt();
        assert!(sigma_czz > 1e-3 && sigma_czz < 1.0);
    }

    #[test]
    fn bootstrap_constant_dataset_has_zero_width() {
        let direction = UnitVector3::normalized(1.0, 2.0, -0.5).unwrap();
        let events = constant_events(150, direction);
        let boot = bootstrap(&events, 1.0, 1.0, 200, 5).unwrap();
        assert_eq!(boot.n_failed, 0);
        // Every resample sees the same data, so spreads collapse to
        // summation rounding noise.
        assert!(boot.m12.sigma < 1e-10);
        assert!((boot.m12.p84 - boot.m12.p16).abs() < 1e-10);
        assert!(boot.concurrence.sigma < 1e-12);
        assert!(boot.chsh_max.sigma < 1e-11);
        assert!(boot.fano_covariance.amax() < 1e-20);
        assert!(boot.m12.is_degenerate());
        assert!(boot.concurrence.is_degenerate());
    }

    #[test]
    fn bootstrap_is_deterministic() {
        let events = bell_events(2_000, 19);
        let a = bootstrap(&events, 1.0, 1.0, 150, 23).unwrap();
        let b = bootstrap(&events, 1.0, 1.0, 150, 23).unwrap();
        assert_eq!(a.m12.mean, b.m12.mean);
        assert_eq!(a.m12.sigma, b.m12.sigma);
        assert_eq!(a.m12.p16, b.m12.p16);
        assert_eq!(a.concurrence.sigma, b.concurrence.sigma);
        assert_eq!(a.fano_covariance, b.fano_covariance);

        let c = bootstrap(&events, 1.0, 1.0, 150, 24).unwrap();
        assert_ne!(a.m12.mean, c.m12.mean, "different seed, different draw");
    }

    #[test]
    fn bootstrap_tracks_truth_for_bell_sample() {
        let events = bell_events(20_000, 29);
        let t = estimate_fano(&events, 1.0, 1.0).unwrap();
        let boot = bootstrap(&events, 1.0, 1.0, 200, 31).unwrap();
        // Truth: m12 = 2, concurrence = 1, chsh_max = 2√2. At the Bell point
        // CᵀC is the identity, so keeping the two largest eigenvalues of the
        // noisy ĈᵀĈ biases m̂12 upward by O(σ) ≈ +0.05 at this sample size,
        // and the bootstrap mean carries the bias twice (each resample adds
        // the same selection noise on top of the sample's own).
        let m12_hat = horodecki(&t.fano_hat.c).m12;
        assert!(
            (boot.m12.mean - m12_hat).abs() < 3.0 * boot.m12.sigma,
            "bootstrap mean {} vs point estimate {m12_hat}",
            boot.m12.mean
        );
        assert!(
            (boot.m12.mean - 2.0).abs() < 0.25,
            "m12 = {}",
            boot.m12.mean
        );
        assert!(boot.m12.p16 <= boot.m12.mean && boot.m12.mean <= boot.m12.p84);
        assert!(boot.m12.sigma > 0.0 && boot.m12.sigma < 0.1);
        assert!((boot.concurrence.mean - 1.0).abs() < 0.05);
        // chsh_max = 2√m̂12 inherits the m12 bias (≈ +0.08 here).
        assert!((boot.chsh_max.mean - 2.0 * std::f64::consts::SQRT_2).abs() < 0.15);
        assert_eq!(boot.n_failed, 0);
        // Bootstrap covariance agrees with the delta method in scale.
        let ratio = boot.fano_covariance[(14, 14)] / t.covariance[(14, 14)];
        assert!(
            (0.5..2.0).contains(&ratio),
            "C_zz variance ratio bootstrap/delta = {ratio}"
        );
    }

    #[test]
    fn significance_grades_bell_and_product_states() {
        // Bell: decisive non-locality and entanglement.
        let events = bell_events(50_000, 37);
        let t = estimate_fano(&events, 1.0, 1.0).unwrap();
        let boot = bootstrap(&events, 1.0, 1.0, 200, 41).unwrap();
        let report = witness_significance(&t, &boot);
        assert!(report.z_nonlocality > 5.0, "z = {}", report.z_nonlocality);
        assert!(report.z_entanglement > 5.0);
        assert!(report.tsirelson_ok);
        assert!(!report.exactly_critical);
        assert!(!report.degenerate_z);
        assert!((report.chsh_max_hat - 2.0 * report.m12_hat.sqrt()).abs() < 1e-12);

        // Separable |RL⟩: m̂12 statistically consistent with 1.
        let mut config = GeneratorConfig::new(50_000, 43);
        config.theta_mode = ThetaMode::Fixed(ScatteringAngle::new(0.0).unwrap());
        let (events, _) = generate_events(config, StateSource::TauPair).unwrap();
        let t = estimate_fano(&events, 1.0, 1.0).unwrap();
        let boot = bootstrap(&events, 1.0, 1.0, 200, 47).unwrap();
        let report = witness_significance(&t, &boot);
        assert!(
            report.z_nonlocality.abs() < 5.0,
            "z = {}",
            report.z_nonlocality
        );
        assert!(report.concurrence_hat < 0.05);

        // Maximally mixed: m̂12 near 0, strongly sub-critical.
        let mut config = GeneratorConfig::new(50_000, 53);
        config.theta_mode = ThetaMode::Fixed(ScatteringAngle::new(FRAC_PI_2).unwrap());
        let (events, _) =
            generate_events(config, StateSource::Fixed(FanoParameters::zero())).unwrap();
        let t = estimate_fano(&events, 1.0, 1.0).unwrap();
        let boot = bootstrap(&events, 1.0, 1.0, 200, 59).unwrap();
        let report = witness_significance(&t, &boot);
        assert!(report.m12_hat < 0.05);
        assert!(report.z_nonlocality < -5.0);
    }

    #[test]
    fn significance_flags_degenerate_sigma() {
        let events = constant_events(150, UnitVector3::x_axis());
        let t = estimate_fano(&events, 1.0, 1.0).unwrap();
        let boot = bootstrap(&events, 1.0, 1.0, 120, 3).unwrap();
        let report = witness_significance(&t, &boot);
        // m̂12 = 81 with zero bootstrap width: infinite z, flagged.
        assert!((report.m12_hat - 81.0).abs() < 1e-9);
        assert!(report.z_nonlocality.is_infinite() && report.z_nonlocality > 0.0);
        assert!(report.degenerate_z);
        assert!(!report.tsirelson_ok, "2√81 far exceeds 2√2");
    }

    #[test]
    fn werner_interior_state_round_trip() {
        // Werner p = 0.5: physical interior state with concurrence 1/4,
        // m12 = 1/2 (no violation). Closure through generation, estimation,
        // and witnesses.
        let p = 0.5;
        let fano = FanoParameters {
            bplus: Vector3::zeros(),
            bminus: Vector3::zeros(),
            c: Matrix3::from_diagonal(&Vector3::new(p, p, -p)),
        };
        let mut config = GeneratorConfig::new(100_000, 61);
        config.theta_mode = ThetaMode::Fixed(ScatteringAngle::new(FRAC_PI_2).unwrap());
        let (events, _) = generate_events(config, StateSource::Fixed(fano)).unwrap();
        let t = estimate_fano(&events, 1.0, 1.0).unwrap();
        let boot = bootstrap(&events, 1.0, 1.0, 200, 67).unwrap();
        let report = witness_significance(&t, &boot);
        assert!((report.m12_hat - 0.5).abs() < 5.0 * report.m12_sigma);
        assert!(report.z_nonlocality < -5.0, "clearly local");
        assert!((report.concurrence_hat - 0.25).abs() < 5.0 * report.concurrence_sigma.max(1e-3));
    }
}
