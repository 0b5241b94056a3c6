//! Monte Carlo generation of correlated decay events.
//!
//! Each event models one fermion-pair production followed by both one-prong
//! decays: a scattering angle `Θ` fixes the pair's spin state, and the two
//! charged daughters' directions `(n̂⁺, n̂⁻)` are drawn — in each parent's
//! rest frame — from the joint angular density
//!
//! ```text
//! p(n̂⁺, n̂⁻) = (1/16π²) · (1 + α⁺ B⁺·n̂⁺ + α⁻ B⁻·n̂⁻ + α⁺α⁻ n̂⁺ᵀ C n̂⁻)
//! ```
//!
//! so the daughters act as polarimeters: the spin information `B±`, `C` is
//! exactly what the angular moments of the stream encode (`E[n̂±ᵢ] = α± B±ᵢ/3`,
//! `E[n̂⁺ᵢ n̂⁻ⱼ] = α⁺α⁻ Cᵢⱼ/9`), which the tomography module inverts.
//!
//! # Determinism
//!
//! Event `i` is produced from its own RNG substream derived from
//! `(seed, i)`, never from a shared sequential stream. Two consequences:
//! identical configurations give byte-identical streams, and disjoint index
//! ranges can be generated in parallel (or on different machines) and merged
//! by index into exactly the single-threaded stream.

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::frame::{helicity_rotation, Frame};
use crate::linalg::symmetric_eigen3_desc;
use crate::state::{tau_pair_fano, FanoParameters, ScatteringAngle, UnitVector3};

/// How far below zero the decay density may dip (from rounding) before the
/// Fano parameters are rejected as unphysical.
pub const NEGATIVE_DENSITY_TOL: f64 = 1e-9;

/// How the production scattering angle is chosen per event.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ThetaMode {
    /// Draw `cos Θ` per event from the tree-level rate `∝ 1 + cos²Θ`.
    Sampled,
    /// Every event uses the same angle.
    Fixed(ScatteringAngle),
}

/// Full recipe for one reproducible event stream.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorConfig {
    /// Number of events to emit (≥ 1).
    pub n_events: u64,
    /// Master seed; combined with the event index into per-event substreams.
    pub seed: u64,
    /// Scattering-angle handling.
    pub theta_mode: ThetaMode,
    /// Spin-analyzing power of the first particle's decay, in `(0, 1]`.
    /// 1 for the single-pion channel.
    pub alpha_plus: f64,
    /// Same for the second particle.
    pub alpha_minus: f64,
    /// Basis in which spin components and daughter directions are expressed.
    pub frame: Frame,
    /// Optional polar-angle acceptance: keep a decay pair only when both
    /// daughters satisfy `|n̂_z| ≤ cut` (a barrel detector that loses tracks
    /// near the z-axis). `None` means full acceptance. Cutting biases the
    /// angular moments, which is the point: it demonstrates how selection
    /// effects distort reconstructed states.
    pub acceptance_cut: Option<f64>,
}

impl GeneratorConfig {
    /// A full-acceptance, sampled-angle, helicity-frame configuration with
    /// ideal analyzing powers.
    pub fn new(n_events: u64, seed: u64) -> Self {
        Self {
            n_events,
            seed,
            theta_mode: ThetaMode::Sampled,
            alpha_plus: 1.0,
            alpha_minus: 1.0,
            frame: Frame::Helicity,
            acceptance_cut: None,
        }
    }

    /// Checks every invariant; all generation entry points call this first.
    pub fn validate(&self) -> Result<()> {
        if self.n_events == 0 {
            return Err(Error::InvalidConfig {
                reason: "n_events must be at least 1".into(),
            });
        }
        check_alpha(self.alpha_plus)?;
        check_alpha(self.alpha_minus)?;
        if let Some(cut) = self.acceptance_cut {
            if !(cut > 0.0 && cut <= 1.0) {
                return Err(Error::InvalidConfig {
                    reason: format!("acceptance cut must be in (0, 1], got {cut}"),
                });
            }
        }
        Ok(())
    }
}

fn check_alpha(value: f64) -> Result<()> {
    if value > 0.0 && value <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidAnalyzingPower { value })
    }
}

/// Which spin state the decay distributions encode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StateSource {
    /// The Θ-dependent production state of a fermion pair, re-derived per
    /// event from its scattering angle and expressed in the configured frame.
    TauPair,
    /// One fixed set of Fano parameters for every event, taken as already
    /// expressed in the working frame. The scattering angle is still recorded
    /// but no longer influences the spin state.
    Fixed(FanoParameters),
}

/// One generated event.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EventRecord {
    /// Position in the stream; determines the RNG substream.
    pub index: u64,
    /// `cos Θ` of the production scattering angle.
    pub cos_theta_scatter: f64,
    /// Charged-daughter direction in the first parent's rest frame.
    pub nhat_plus: UnitVector3,
    /// Same for the second parent.
    pub nhat_minus: UnitVector3,
}

/// Counters describing how a stream was produced.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenerationStats {
    /// Events emitted.
    pub n_events: u64,
    /// Direction pairs proposed inside the rejection sampler.
    pub n_proposals: u64,
    /// `accepted proposals / n_proposals`; for a constant envelope `K` this
    /// concentrates around `1/K` because the density has unit mean over the
    /// proposal distribution.
    pub acceptance_rate: f64,
    /// Largest rejection envelope seen across the stream.
    pub envelope_max: f64,
    /// Decay pairs discarded by the polar-angle acceptance cut.
    pub cut_rejected: u64,
}

// ---------------------------------------------------------------------------
// Scattering angle
// ---------------------------------------------------------------------------

/// The tree-level production CDF `F(c) = (3c + c³ + 4)/8` on `[−1, 1]`,
/// i.e. the integral of the normalized rate `3(1 + c²)/8`.
pub fn scattering_cdf(cos_theta: f64) -> f64 {
    (3.0 * cos_theta + cos_theta.powi(3) + 4.0) / 8.0
}

/// Inverse of [`scattering_cdf`]: the unique real root of
/// `c³ + 3c + (4 − 8p) = 0`, by Cardano's formula (the discriminant
/// `q²/4 + 1` is strictly positive, so there is exactly one real root).
pub fn scattering_quantile(p: f64) -> f64 {
    let q = 4.0 - 8.0 * p;
    let root = (0.25 * q * q + 1.0).sqrt();
    ((-0.5 * q + root).cbrt() + (-0.5 * q - root).cbrt()).clamp(-1.0, 1.0)
}

/// Draws `Θ` from the tree-level rate `∝ 1 + cos²Θ` by inverse-CDF sampling.
pub fn sample_scattering_angle(rng: &mut impl Rng) -> ScatteringAngle {
    let cos = scattering_quantile(rng.random());
    ScatteringAngle::from_cos(cos).expect("quantile function maps [0,1] into [-1,1]")
}

fn uniform_unit(rng: &mut impl Rng) -> UnitVector3 {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let s = (1.0 - z * z).max(0.0).sqrt();
    UnitVector3::from_unit_unchecked(Vector3::new(s * phi.cos(), s * phi.sin(), z))
}

// ---------------------------------------------------------------------------
// Decay-pair sampling
// ---------------------------------------------------------------------------

/// Rejection sampler for the joint daughter-direction density of one spin
/// state. Holds the analyzing-power-scaled Fano coefficients and the
/// envelope constant `K = 1 + |α⁺B⁺| + |α⁻B⁻| + α⁺α⁻ σ_max(C) ≥ sup density`.
#[derive(Clone, Copy, Debug)]
pub struct DecaySampler {
    bplus: Vector3<f64>,
    bminus: Vector3<f64>,
    c: Matrix3<f64>,
    envelope: f64,
}

impl DecaySampler {
    /// Builds a sampler after verifying the density is non-negative
    /// everywhere (minimum over the sphere-pair found numerically); Fano
    /// parameters of an unphysical state are rejected here, before any event
    /// is emitted.
    pub fn new(fano: &FanoParameters, alpha_plus: f64, alpha_minus: f64) -> Result<Self> {
        check_alpha(alpha_plus)?;
        check_alpha(alpha_minus)?;
        let minimum = decay_density_minimum(fano, alpha_plus, alpha_minus);
        if minimum < -NEGATIVE_DENSITY_TOL {
            return Err(Error::NegativeDensity { minimum });
        }
        Ok(Self::new_unchecked(fano, alpha_plus, alpha_minus))
    }

    /// Skips the non-negativity scan; for states known physical by
    /// construction (the per-event production states).
    pub(crate) fn new_unchecked(fano: &FanoParameters, alpha_plus: f64, alpha_minus: f64) -> Self {
        let bplus = fano.bplus * alpha_plus;
        let bminus = fano.bminus * alpha_minus;
        let c = fano.c * (alpha_plus * alpha_minus);
        let (eig, _) = symmetric_eigen3_desc(&(c.transpose() * c));
        let envelope = 1.0 + bplus.norm() + bminus.norm() + eig[0].max(0.0).sqrt();
        Self {
            bplus,
            bminus,
            c,
            envelope,
        }
    }

    /// The rejection envelope constant `K`.
    pub fn envelope(&self) -> f64 {
        self.envelope
    }

    /// The (unnormalized) density `16π² p(u, v)` at a direction pair.
    fn density(&self, u: &Vector3<f64>, v: &Vector3<f64>) -> f64 {
        1.0 + self.bplus.dot(u) + self.bminus.dot(v) + u.dot(&(self.c * v))
    }

    /// Draws one direction pair; also returns how many uniform proposals the
    /// rejection loop consumed.
    pub fn sample(&self, rng: &mut impl Rng) -> (UnitVector3, UnitVector3, u64) {
        let mut proposals = 0;
        loop {
            proposals += 1;
            let u = uniform_unit(rng);
            let v = uniform_unit(rng);
            let height: f64 = rng.random_range(0.0..self.envelope);
            if height <= self.density(u.as_vector(), v.as_vector()) {
                return (u, v, proposals);
            }
        }
    }
}

/// Draws one daughter-direction pair for the given spin state, verifying
/// first that the state's decay density is a genuine (non-negative) density.
pub fn sample_decay_pair(
    fano: &FanoParameters,
    alpha_plus: f64,
    alpha_minus: f64,
    rng: &mut impl Rng,
) -> Result<(UnitVector3, UnitVector3)> {
    let sampler = DecaySampler::new(fano, alpha_plus, alpha_minus)?;
    let (u, v, _) = sampler.sample(rng);
    Ok((u, v))
}

/// Global minimum (up to search resolution) of the decay density
/// `1 + α⁺B⁺·u + α⁻B⁻·v + α⁺α⁻ uᵀCv` over the pair of spheres.
///
/// The `u` minimization is exact for each `v`: the `u`-dependent part is
/// linear, so `min_u = 1 + α⁻B⁻·v − |α⁺B⁺ + α⁺α⁻Cv|`. The remaining
/// one-sphere problem in `v` is scanned on a Fibonacci lattice and polished
/// by shrinking tangent-step descent from the best lattice point. Physical
/// states have minimum ≥ 0 (pure states typically touch 0 exactly).
pub fn decay_density_minimum(fano: &FanoParameters, alpha_plus: f64, alpha_minus: f64) -> f64 {
    let bplus = fano.bplus * alpha_plus;
    let bminus = fano.bminus * alpha_minus;
    let c = fano.c * (alpha_plus * alpha_minus);
    let g = |v: &Vector3<f64>| 1.0 + bminus.dot(v) - (bplus + c * v).norm();

    // Fibonacci lattice: near-uniform coverage, deterministic.
    const N_LATTICE: usize = 2048;
    let golden = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let mut best_v = Vector3::z();
    let mut best = f64::INFINITY;
    for k in 0..N_LATTICE {
        let z = 1.0 - (2.0 * k as f64 + 1.0) / N_LATTICE as f64;
        let s = (1.0 - z * z).max(0.0).sqrt();
        let phi = std::f64::consts::TAU * (k as f64 / golden).fract();
        let v = Vector3::new(s * phi.cos(), s * phi.sin(), z);
        let value = g(&v);
        if value < best {
            best = value;
            best_v = v;
        }
    }

    // Local polish: try rings of tangent steps with shrinking radius.
    let mut step = (4.0 * std::f64::consts::PI / N_LATTICE as f64).sqrt();
    while step > 1e-9 {
        let mut improved = false;
        let (t1, t2) = tangent_basis(&best_v);
        for k in 0..8 {
            let ang = std::f64::consts::TAU * k as f64 / 8.0;
            let v = (best_v + (t1 * ang.cos() + t2 * ang.sin()) * step).normalize();
            let value = g(&v);
            if value < best {
                best = value;
                best_v = v;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

fn tangent_basis(v: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let axis = if v.x.abs() <= v.y.abs() && v.x.abs() <= v.z.abs() {
        Vector3::x()
    } else if v.y.abs() <= v.z.abs() {
        Vector3::y()
    } else {
        Vector3::z()
    };
    let t1 = v.cross(&axis).normalize();
    let t2 = v.cross(&t1);
    (t1, t2)
}

// ---------------------------------------------------------------------------
// Event streams
// ---------------------------------------------------------------------------

/// The RNG substream that owns event `index` under a master `seed`.
///
/// Bootstrap resampling (in the tomography module) uses stream ids with the
/// top bit set, so generator substreams — plain event indices — never collide
/// with them under the same seed.
pub fn event_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Lazy, deterministic event source. Iterate to drive it; counters are
/// available through [`EventStream::stats`] at any point.
#[derive(Clone, Debug)]
pub struct EventStream {
    config: GeneratorConfig,
    /// Sampler reused across events when the spin state is event-independent;
    /// `None` means per-event production states (tau pair with sampled Θ).
    shared_sampler: Option<DecaySampler>,
    next: u64,
    end: u64,
    emitted: u64,
    proposals: u64,
    cut_rejected: u64,
    envelope_max: f64,
}

impl EventStream {
    /// A stream over the full index range `0..config.n_events`.
    pub fn new(config: GeneratorConfig, source: StateSource) -> Result<Self> {
        Self::with_range(config, source, 0, config.n_events)
    }

    /// A shard covering event indices `start..end` only. Concatenating
    /// shards that partition `0..n_events` (in index order) reproduces the
    /// full stream exactly.
    pub fn with_range(
        config: GeneratorConfig,
        source: StateSource,
        start: u64,
        end: u64,
    ) -> Result<Self> {
        config.validate()?;
        if start > end || end > config.n_events {
            return Err(Error::InvalidConfig {
                reason: format!("shard {start}..{end} is not within 0..{}", config.n_events),
            });
        }
        // Event-independent spin states are checked (and rejected) up front,
        // before any event is emitted.
        let shared_sampler = match (&source, config.theta_mode) {
            (StateSource::Fixed(fano), _) => Some(DecaySampler::new(
                fano,
                config.alpha_plus,
                config.alpha_minus,
            )?),
            (StateSource::TauPair, ThetaMode::Fixed(theta)) => Some(DecaySampler::new_unchecked(
                &production_fano(theta, config.frame),
                config.alpha_plus,
                config.alpha_minus,
            )),
            (StateSource::TauPair, ThetaMode::Sampled) => None,
        };
        Ok(Self {
            config,
            shared_sampler,
            next: start,
            end,
            emitted: 0,
            proposals: 0,
            cut_rejected: 0,
            envelope_max: 0.0,
        })
    }

    /// Counters accumulated so far (complete once the iterator is drained).
    pub fn stats(&self) -> GenerationStats {
        let accepted = self.emitted + self.cut_rejected;
        GenerationStats {
            n_events: self.emitted,
            n_proposals: self.proposals,
            acceptance_rate: if self.proposals == 0 {
                0.0
            } else {
                accepted as f64 / self.proposals as f64
            },
            envelope_max: self.envelope_max,
            cut_rejected: self.cut_rejected,
        }
    }

    fn passes_cut(&self, u: &UnitVector3, v: &UnitVector3) -> bool {
        match self.config.acceptance_cut {
            None => true,
            Some(cut) => u.z().abs() <= cut && v.z().abs() <= cut,
        }
    }
}

/// The production spin state at angle `theta`, expressed in `frame`
/// (helicity-triad components rotated into the lab basis when requested;
/// the production plane fixes the lab azimuth, so no extra angle enters).
fn production_fano(theta: ScatteringAngle, frame: Frame) -> FanoParameters {
    let fano = tau_pair_fano(theta);
    match frame {
        Frame::Helicity => fano,
        Frame::FixedLab => fano.rotated(&helicity_rotation(theta.cos())),
    }
}

impl Iterator for EventStream {
    type Item = EventRecord;

    fn next(&mut self) -> Option<EventRecord> {
        if self.next >= self.end {
            return None;
        }
        let index = self.next;
        self.next += 1;
        let mut rng = event_rng(self.config.seed, index);
        // Acceptance-cut rejections discard the whole event draw (angle
        // included) and redraw within the same substream, so shard merging
        // stays exact.
        loop {
            let cos_theta_scatter;
            let sampler = match (self.shared_sampler, self.config.theta_mode) {
                (Some(shared), mode) => {
                    cos_theta_scatter = match mode {
                        ThetaMode::Fixed(theta) => theta.cos(),
                        ThetaMode::Sampled => sample_scattering_angle(&mut rng).cos(),
                    };
                    shared
                }
                (None, _) => {
                    let theta = sample_scattering_angle(&mut rng);
                    cos_theta_scatter = theta.cos();
                    DecaySampler::new_unchecked(
                        &production_fano(theta, self.config.frame),
                        self.config.alpha_plus,
                        self.config.alpha_minus,
                    )
                }
            };
            self.envelope_max = self.envelope_max.max(sampler.envelope());
            let (nhat_plus, nhat_minus, proposals) = sampler.sample(&mut rng);
            self.proposals += proposals;
            if self.passes_cut(&nhat_plus, &nhat_minus) {
                self.emitted += 1;
                return Some(EventRecord {
                    index,
                    cos_theta_scatter,
                    nhat_plus,
                    nhat_minus,
                });
            }
            self.cut_rejected += 1;
        }
    }
}

/// Generates the whole configured stream eagerly. Fails before producing
/// anything if the configuration or the (fixed) state is rejected.
pub fn generate_events(
    config: GeneratorConfig,
    source: StateSource,
) -> Result<(Vec<EventRecord>, GenerationStats)> {
    let mut stream = EventStream::new(config, source)?;
    let mut events = Vec::with_capacity(config.n_events.min(1 << 24) as usize);
    for event in &mut stream {
        events.push(event);
    }
    Ok((events, stream.stats()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::tau_pair_state;
    use std::f64::consts::FRAC_PI_2;

    fn mean_and_se(samples: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
        let n = samples.clone().count() as f64;
        let mean = samples.clone().sum::<f64>() / n;
        let var = samples.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, (var / n).sqrt())
    }

    #[test]
    fn config_invariants_enforced() {
        assert!(GeneratorConfig::new(1, 0).validate().is_ok());

        let mut config = GeneratorConfig::new(0, 0);
        assert!(matches!(
            config.validate(),
            Err(Error::InvalidConfig { .. })
        ));

        config = GeneratorConfig::new(10, 0);
        config.alpha_plus = 0.0;
        assert!(matches!(
            config.validate(),
            Err(Error::InvalidAnalyzingPower { value }) if value == 0.0
        ));
        config.alpha_plus = 1.2;
        assert!(config.validate().is_err());
        config.alpha_plus = -0.5;
        assert!(config.validate().is_err());
        config.alpha_plus = f64::NAN;
        assert!(config.validate().is_err());

        config = GeneratorConfig::new(10, 0);
        config.acceptance_cut = Some(0.0);
        assert!(config.validate().is_err());
        config.acceptance_cut = Some(1.5);
        assert!(config.validate().is_err());
        config.acceptance_cut = Some(1.0);
        assert!(config.validate().is_ok());
    }

    #[test]
    fn scattering_quantile_inverts_cdf() {
        assert_eq!(scattering_quantile(0.0), -1.0);
        assert_eq!(scattering_quantile(1.0), 1.0);
        assert!(scattering_quantile(0.5).abs() < 1e-15);
        for k in 0..=1000 {
            let p = k as f64 / 1000.0;
            let c = scattering_quantile(p);
            assert!((-1.0..=1.0).contains(&c));
            assert!(
                (scattering_cdf(c) - p).abs() < 1e-12,
                "round trip at p = {p}"
            );
        }
    }

    #[test]
    fn scattering_samples_match_distribution() {
        let mut rng = event_rng(7, 0);
        let n = 100_000;
        let cos: Vec<f64> = (0..n)
            .map(|_| sample_scattering_angle(&mut rng).cos())
            .collect();

        let (mean, se) = mean_and_se(cos.iter().copied());
        assert!(mean.abs() < 5.0 * se, "E[cosΘ] = 0 by symmetry");

        let (mean_sq, se_sq) = mean_and_se(cos.iter().map(|c| c * c));
        assert!(
            (mean_sq - 0.4).abs() < 5.0 * se_sq,
            "E[cos²Θ] = 2/5, got {mean_sq}"
        );

        // Kolmogorov–Smirnov against the analytic CDF (1% critical value).
        let mut sorted = cos;
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut d: f64 = 0.0;
        for (i, c) in sorted.iter().enumerate() {
            let f = scattering_cdf(*c);
            d = d
                .max((f - i as f64 / n as f64).abs())
                .max(((i + 1) as f64 / n as f64 - f).abs());
        }
        assert!(d < 1.63 / (n as f64).sqrt(), "KS statistic {d}");
    }

    #[test]
    fn decay_density_minimum_reference_values() {
        // Pure states saturate zero: |RL⟩ has density (1−u_z)(1+v_z).
        let rl = tau_pair_fano(ScatteringAngle::new(0.0).unwrap());
        let min = decay_density_minimum(&rl, 1.0, 1.0);
        assert!(min.abs() < 1e-9, "separable pure state: min 0, got {min}");

        // Bell state: density 1 − uᵀ(diag(1,1,−1))v ≥ 0, touching 0.
        let bell = tau_pair_fano(ScatteringAngle::new(FRAC_PI_2).unwrap());
        let min = decay_density_minimum(&bell, 1.0, 1.0);
        assert!(min.abs() < 1e-9, "Bell state: min 0, got {min}");

        // Scaling both analyzing powers to 0.5 lifts the minimum to
        // 1 − 0.25 = 0.75 for the Bell correlations.
        let min = decay_density_minimum(&bell, 0.5, 0.5);
        assert!((min - 0.75).abs() < 1e-9);

        // Maximally mixed: constant density 1.
        let min = decay_density_minimum(&FanoParameters::zero(), 1.0, 1.0);
        assert!((min - 1.0).abs() < 1e-12);

        // Polarization of length 2 drives the density to −1.
        let bad = FanoParameters {
            bplus: Vector3::new(0.0, 0.0, 2.0),
            ..FanoParameters::zero()
        };
        let min = decay_density_minimum(&bad, 1.0, 1.0);
        assert!((min + 1.0).abs() < 1e-9);
    }

    #[test]
    fn negative_density_is_rejected_before_generation() {
        let bad = FanoParameters {
            bplus: Vector3::new(0.0, 0.0, 2.0),
            ..FanoParameters::zero()
        };
        assert!(matches!(
            DecaySampler::new(&bad, 1.0, 1.0),
            Err(Error::NegativeDensity { minimum }) if minimum < -0.9
        ));

        let config = GeneratorConfig::new(10, 1);
        assert!(matches!(
            generate_events(config, StateSource::Fixed(bad)),
            Err(Error::NegativeDensity { .. })
        ));

        let mut rng = event_rng(1, 0);
        assert!(sample_decay_pair(&bad, 1.0, 1.0, &mut rng).is_err());
    }

    #[test]
    fn zero_fano_gives_isotropic_daughters() {
        let sampler = DecaySampler::new(&FanoParameters::zero(), 1.0, 1.0).unwrap();
        assert!((sampler.envelope() - 1.0).abs() < 1e-12);
        let mut rng = event_rng(11, 0);
        let n = 50_000;
        let pairs: Vec<_> = (0..n).map(|_| sampler.sample(&mut rng)).collect();
        for axis in 0..3 {
            let (mean, se) = mean_and_se(pairs.iter().map(|(u, _, _)| u.as_vector()[axis]));
            assert!(mean.abs() < 5.0 * se, "isotropy of axis {axis}");
        }
        // Uniform proposals against a constant density are never rejected.
        assert!(pairs.iter().all(|(_, _, p)| *p == 1));
        let (mean_zz, se_zz) = mean_and_se(pairs.iter().map(|(u, _, _)| u.z() * u.z()));
        assert!((mean_zz - 1.0 / 3.0).abs() < 5.0 * se_zz);
    }

    #[test]
    fn polarized_decay_obeys_first_moment_law() {
        // B⁺ = (0,0,−1): E[n̂⁺_z] = −1/3, second side stays isotropic.
        let fano = FanoParameters {
            bplus: Vector3::new(0.0, 0.0, -1.0),
            ..FanoParameters::zero()
        };
        let sampler = DecaySampler::new(&fano, 1.0, 1.0).unwrap();
        let mut rng = event_rng(13, 0);
        let pairs: Vec<_> = (0..100_000).map(|_| sampler.sample(&mut rng)).collect();

        let (mean, se) = mean_and_se(pairs.iter().map(|(u, _, _)| u.z()));
        assert!((mean + 1.0 / 3.0).abs() < 5.0 * se, "got {mean}");
        let (mean_v, se_v) = mean_and_se(pairs.iter().map(|(_, v, _)| v.z()));
        assert!(mean_v.abs() < 5.0 * se_v);

        // Reduced analyzing power scales the observed moment linearly.
        let sampler = DecaySampler::new(&fano, 0.5, 1.0).unwrap();
        let pairs: Vec<_> = (0..100_000).map(|_| sampler.sample(&mut rng)).collect();
        let (mean, se) = mean_and_se(pairs.iter().map(|(u, _, _)| u.z()));
        assert!((mean + 0.5 / 3.0).abs() < 5.0 * se);
    }

    #[test]
    fn correlated_decay_obeys_second_moment_law() {
        // Bell correlations C = diag(1,1,−1): E[n̂⁺ᵢ n̂⁻ⱼ] = Cᵢⱼ/9.
        let bell = tau_pair_fano(ScatteringAngle::new(FRAC_PI_2).unwrap());
        let sampler = DecaySampler::new(&bell, 1.0, 1.0).unwrap();
        let mut rng = event_rng(17, 0);
        let pairs: Vec<_> = (0..100_000).map(|_| sampler.sample(&mut rng)).collect();
        for i in 0..3 {
            for j in 0..3 {
                let (mean, se) = mean_and_se(
                    pairs
                        .iter()
                        .map(|(u, v, _)| u.as_vector()[i] * v.as_vector()[j]),
                );
                let expected = bell.c[(i, j)] / 9.0;
                assert!(
                    (mean - expected).abs() < 5.0 * se,
                    "C[{i}{j}]: mean {mean}, expected {expected}"
                );
            }
        }
    }

    #[test]
    fn streams_are_deterministic_and_shardable() {
        let mut config = GeneratorConfig::new(1000, 42);
        config.theta_mode = ThetaMode::Sampled;

        let (a, stats_a) = generate_events(config, StateSource::TauPair).unwrap();
        let (b, _) = generate_events(config, StateSource::TauPair).unwrap();
        assert_eq!(a, b, "same config, same stream");
        assert_eq!(a.len(), 1000);
        assert_eq!(stats_a.n_events, 1000);

        // Different seed, different stream.
        let mut other = config;
        other.seed = 43;
        let (c, _) = generate_events(other, StateSource::TauPair).unwrap();
        assert_ne!(a, c);

        // Shards over 0..300, 300..1000 concatenate to the full stream.
        let first: Vec<_> = EventStream::with_range(config, StateSource::TauPair, 0, 300)
            .unwrap()
            .collect();
        let second: Vec<_> = EventStream::with_range(config, StateSource::TauPair, 300, 1000)
            .unwrap()
            .collect();
        let merged: Vec<_> = first.into_iter().chain(second).collect();
        assert_eq!(a, merged, "sharded generation merges to the serial stream");

        // Out-of-range shard rejected.
        assert!(EventStream::with_range(config, StateSource::TauPair, 0, 1001).is_err());
    }

    #[test]
    fn events_respect_basic_invariants() {
        let mut config = GeneratorConfig::new(2000, 5);
        config.theta_mode = ThetaMode::Sampled;
        config.frame = Frame::FixedLab;
        let (events, stats) = generate_events(config, StateSource::TauPair).unwrap();
        for (k, e) in events.iter().enumerate() {
            assert_eq!(e.index, k as u64);
            assert!((-1.0..=1.0).contains(&e.cos_theta_scatter));
            assert!((e.nhat_plus.as_vector().norm() - 1.0).abs() < 1e-12);
            assert!((e.nhat_minus.as_vector().norm() - 1.0).abs() < 1e-12);
        }
        // K(Θ) = 2 + 4|cosΘ|/(1 + cos²Θ) for the production state: in [2, 4].
        assert!(stats.envelope_max <= 4.0 + 1e-12);
        assert!(stats.envelope_max >= 2.0 - 1e-12);
        assert!(stats.acceptance_rate > 0.2);
    }

    #[test]
    fn acceptance_rate_tracks_envelope() {
        // Fixed Θ = π/2 (Bell state): envelope 2, so acceptance ≈ 1/2.
        let mut config = GeneratorConfig::new(20_000, 3);
        config.theta_mode = ThetaMode::Fixed(ScatteringAngle::new(FRAC_PI_2).unwrap());
        let (_, stats) = generate_events(config, StateSource::TauPair).unwrap();
        assert!((stats.envelope_max - 2.0).abs() < 1e-12);
        assert!(
            (stats.acceptance_rate - 0.5).abs() < 0.02,
            "rate {} vs 1/K = 0.5",
            stats.acceptance_rate
        );
    }

    #[test]
    fn acceptance_cut_restricts_polar_angles() {
        let mut config = GeneratorConfig::new(5000, 9);
        config.acceptance_cut = Some(0.6);
        let (events, stats) = generate_events(config, StateSource::TauPair).unwrap();
        assert_eq!(events.len(), 5000, "cut does not change the event count");
        assert!(events
            .iter()
            .all(|e| e.nhat_plus.z().abs() <= 0.6 && e.nhat_minus.z().abs() <= 0.6));
        assert!(stats.cut_rejected > 1000, "the cut visibly rejects pairs");

        // The same seed without a cut gives a different (unbiased) stream.
        let mut open = config;
        open.acceptance_cut = None;
        let (unbiased, _) = generate_events(open, StateSource::TauPair).unwrap();
        assert_ne!(events, unbiased);
    }

    #[test]
    fn fixed_source_encodes_requested_state() {
        // A pure |RL⟩-like fixed state: u_z moments follow B⁺_z = −1.
        let fano = tau_pair_fano(ScatteringAngle::new(0.0).unwrap());
        let mut config = GeneratorConfig::new(50_000, 21);
        config.theta_mode = ThetaMode::Fixed(ScatteringAngle::new(FRAC_PI_2).unwrap());
        let (events, _) = generate_events(config, StateSource::Fixed(fano)).unwrap();
        let (mean, se) = mean_and_se(events.iter().map(|e| e.nhat_plus.z()));
        assert!((mean + 1.0 / 3.0).abs() < 5.0 * se);
        // The recorded scattering angle is the configured fixed one.
        assert!(events.iter().all(|e| e.cos_theta_scatter.abs() < 1e-15));
    }

    #[test]
    fn sampled_theta_states_follow_production_density() {
        // In the helicity frame E[C_zz] = −1 for every Θ; check the pooled
        // u_z v_z moment: E[u_z v_z] = E[C_zz]/9 = −1/9.
        let config = GeneratorConfig::new(100_000, 33);
        let (events, _) = generate_events(config, StateSource::TauPair).unwrap();
        let (mean, se) = mean_and_se(events.iter().map(|e| e.nhat_plus.z() * e.nhat_minus.z()));
        assert!((mean + 1.0 / 9.0).abs() < 5.0 * se, "got {mean}");

        // And the sampled angles follow the production rate: E[cos²Θ] = 2/5.
        let (mean_sq, se_sq) = mean_and_se(
            events
                .iter()
                .map(|e| e.cos_theta_scatter * e.cos_theta_scatter),
        );
        assert!((mean_sq - 0.4).abs() < 5.0 * se_sq);
    }

    #[test]
    fn tau_pair_density_never_negative_across_angles() {
        for k in 0..=40 {
            let theta = ScatteringAngle::new(std::f64::consts::PI * k as f64 / 40.0).unwrap();
            for frame in [Frame::Helicity, Frame::FixedLab] {
                let fano = production_fano(theta, frame);
                let min = decay_density_minimum(&fano, 1.0, 1.0);
                assert!(min > -1e-9, "Θ index {k}, {frame:?}: min {min}");
                // Density check agrees with the density-matrix route.
                assert!(tau_pair_state(theta).density().validate(1e-9).is_physical);
            }
        }
    }
}
