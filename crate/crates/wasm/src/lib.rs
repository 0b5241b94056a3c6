//! WebAssembly bindings for the spin-correlation toolkit.
//!
//! Three operations are exported to JavaScript, each returning a JSON
//! string so the page needs no generated TypeScript or custom glue beyond
//! `JSON.parse`:
//!
//! * [`analyze`] — closed-form state, witnesses and optimal CHSH directions
//!   for a fermion pair produced at scattering angle `Θ`.
//! * [`scan`] — the analytic witness curves over a `Θ` grid, for plotting.
//! * [`experiment`] — a full in-browser pseudo-experiment: generate decay
//!   events, reconstruct the state by the method of moments, bootstrap the
//!   uncertainties and report witness significances.
//!
//! Invalid inputs produce `{"error": "..."}` rather than a thrown exception,
//! which keeps the calling page to a single code path. All numeric work is
//! delegated to the `spintomo` core crate; this crate only shapes results
//! for serialization. The JSON builders are plain Rust functions, so the
//! whole surface is unit-tested on the host without a browser.

use serde::Serialize;
use spintomo::{
    bootstrap, chsh_probability_form, estimate_fano, generate_events, optimal_chsh_directions,
    tau_pair_fano, tau_pair_state, witness_significance, ChshDirections, EventRecord, Frame,
    GeneratorConfig, ScatteringAngle, StateSource, ThetaMode, UnitVector3,
};
use wasm_bindgen::prelude::wasm_bindgen;

/// Hard cap on in-browser event counts; keeps a single click comfortably
/// under a second of wasm time even with the bootstrap on top.
const MAX_EVENTS: u32 = 200_000;
/// Cap on bootstrap resamples for the same reason.
const MAX_RESAMPLES: u32 = 1_000;
/// At most this many daughter-direction pairs are shipped to the scatter
/// plot; more adds payload without adding visible structure.
const MAX_SCATTER_POINTS: usize = 2_000;
/// Grid cap for [`scan`]; the curves are smooth, so this is already dense.
const MAX_SCAN_POINTS: u32 = 2_001;

#[derive(Serialize)]
struct ErrorDoc {
    error: String,
}

fn error_json(message: impl Into<String>) -> String {
    serde_json::to_string(&ErrorDoc {
        error: message.into(),
    })
    .expect("an error document always serializes")
}

fn to_json<T: Serialize>(doc: &T) -> String {
    match serde_json::to_string(doc) {
        Ok(s) => s,
        Err(e) => error_json(format!("serialization failed: {e}")),
    }
}

fn vec3(v: &UnitVector3) -> [f64; 3] {
    let v = v.as_vector();
    [v.x, v.y, v.z]
}

#[derive(Serialize)]
struct DirectionsDoc {
    n1: [f64; 3],
    n2: [f64; 3],
    n3: [f64; 3],
    n4: [f64; 3],
}

impl DirectionsDoc {
    fn new(d: &ChshDirections) -> Self {
        Self {
            n1: vec3(&d.n1),
            n2: vec3(&d.n2),
            n3: vec3(&d.n3),
            n4: vec3(&d.n4),
        }
    }
}

#[derive(Serialize)]
struct ProbabilityDoc {
    lhs: f64,
    rhs: f64,
    violated: bool,
}

#[derive(Serialize)]
struct AnalyzeDoc {
    theta: f64,
    /// `(|RR⟩, |RL⟩, |LR⟩, |LL⟩)` amplitudes; real for this production state.
    amplitudes: [f64; 4],
    b_plus: [f64; 3],
    b_minus: [f64; 3],
    c: [[f64; 3]; 3],
    concurrence: f64,
    m12: f64,
    chsh_max: f64,
    optimal_value: f64,
    degenerate: bool,
    directions: DirectionsDoc,
    probability_form: ProbabilityDoc,
}

/// Closed-form analysis of the production spin state at angle `theta`
/// (radians, `[0, π]`). See [`AnalyzeDoc`] for the returned fields.
fn analyze_json(theta: f64) -> String {
    let angle = match ScatteringAngle::new(theta) {
        Ok(a) => a,
        Err(e) => return error_json(e.to_string()),
    };
    let psi = tau_pair_state(angle);
    let fano = tau_pair_fano(angle);
    let horodecki = spintomo::horodecki(&fano.c);
    let optimal = optimal_chsh_directions(&fano.c);
    let rho = fano.to_density();
    let probability = match chsh_probability_form(&rho, &optimal.directions) {
        Ok(p) => p,
        Err(e) => return error_json(e.to_string()),
    };

    let amp = psi.amplitudes();
    let c = &fano.c;
    to_json(&AnalyzeDoc {
        theta,
        amplitudes: [amp[0].re, amp[1].re, amp[2].re, amp[3].re],
        b_plus: [fano.bplus.x, fano.bplus.y, fano.bplus.z],
        b_minus: [fano.bminus.x, fano.bminus.y, fano.bminus.z],
        c: [
            [c[(0, 0)], c[(0, 1)], c[(0, 2)]],
            [c[(1, 0)], c[(1, 1)], c[(1, 2)]],
            [c[(2, 0)], c[(2, 1)], c[(2, 2)]],
        ],
        concurrence: psi.concurrence(),
        m12: horodecki.m12,
        chsh_max: horodecki.chsh_max,
        optimal_value: optimal.value,
        degenerate: optimal.degenerate,
        directions: DirectionsDoc::new(&optimal.directions),
        probability_form: ProbabilityDoc {
            lhs: probability.lhs,
            rhs: probability.rhs,
            violated: probability.violated,
        },
    })
}

#[derive(Serialize)]
struct ScanDoc {
    theta: Vec<f64>,
    concurrence: Vec<f64>,
    m12: Vec<f64>,
    chsh_max: Vec<f64>,
}

/// Analytic witness curves on a uniform `Θ` grid over `[0, π]` with
/// `points ≥ 2` nodes (endpoints included).
fn scan_json(points: u32) -> String {
    if !(2..=MAX_SCAN_POINTS).contains(&points) {
        return error_json(format!(
            "points must be in [2, {MAX_SCAN_POINTS}], got {points}"
        ));
    }
    let n = points as usize;
    let mut doc = ScanDoc {
        theta: Vec::with_capacity(n),
        concurrence: Vec::with_capacity(n),
        m12: Vec::with_capacity(n),
        chsh_max: Vec::with_capacity(n),
    };
    for k in 0..n {
        let theta = std::f64::consts::PI * k as f64 / (n - 1) as f64;
        let angle = ScatteringAngle::new(theta).expect("grid point lies in [0, π]");
        let kappa = tau_pair_state(angle).concurrence();
        let m12 = 1.0 + kappa * kappa;
        doc.theta.push(theta);
        doc.concurrence.push(kappa);
        doc.m12.push(m12);
        doc.chsh_max.push(2.0 * m12.sqrt());
    }
    to_json(&doc)
}

#[derive(Serialize)]
struct IntervalDoc {
    mean: f64,
    sigma: f64,
    p16: f64,
    p84: f64,
}

impl IntervalDoc {
    fn new(w: &spintomo::WitnessInterval) -> Self {
        Self {
            mean: w.mean,
            sigma: w.sigma,
            p16: w.p16,
            p84: w.p84,
        }
    }
}

#[derive(Serialize)]
struct ExperimentDoc {
    theta: f64,
    n_events: u32,
    seed: u32,
    alpha: f64,
    resamples: u32,
    /// Rejection-sampler efficiency (accepted / proposed direction pairs).
    sampler_efficiency: f64,
    b_plus_hat: [f64; 3],
    b_minus_hat: [f64; 3],
    c_hat: [[f64; 3]; 3],
    /// Delta-method standard errors matching `c_hat` entry by entry.
    c_sigma: [[f64; 3]; 3],
    projected: bool,
    m12_hat: f64,
    m12_sigma: f64,
    z_nonlocality: f64,
    concurrence_hat: f64,
    concurrence_sigma: f64,
    z_entanglement: f64,
    chsh_max_hat: f64,
    tsirelson_ok: bool,
    m12_boot: IntervalDoc,
    concurrence_boot: IntervalDoc,
    /// True values at this `Θ`, for drawing the pull on the page.
    m12_true: f64,
    concurrence_true: f64,
    /// Up to [`MAX_SCATTER_POINTS`] `(n̂⁺_z, n̂⁻_z)` pairs for the
    /// daughter-correlation scatter plot.
    scatter: Vec<[f64; 2]>,
}

fn scatter_sample(events: &[EventRecord]) -> Vec<[f64; 2]> {
    events
        .iter()
        .take(MAX_SCATTER_POINTS)
        .map(|e| [e.nhat_plus.as_vector().z, e.nhat_minus.as_vector().z])
        .collect()
}

/// Runs one seeded pseudo-experiment end to end: generate `n_events` decays
/// of a pair produced at fixed `theta`, reconstruct the Fano parameters with
/// analyzing powers `alpha` on both sides, bootstrap the witnesses with
/// `resamples` replicas, and summarize.
fn experiment_json(theta: f64, n_events: u32, seed: u32, alpha: f64, resamples: u32) -> String {
    if n_events > MAX_EVENTS {
        return error_json(format!("n_events must be at most {MAX_EVENTS}"));
    }
    if resamples > MAX_RESAMPLES {
        return error_json(format!("resamples must be at most {MAX_RESAMPLES}"));
    }
    let angle = match ScatteringAngle::new(theta) {
        Ok(a) => a,
        Err(e) => return error_json(e.to_string()),
    };

    let mut config = GeneratorConfig::new(u64::from(n_events), u64::from(seed));
    config.theta_mode = ThetaMode::Fixed(angle);
    config.alpha_plus = alpha;
    config.alpha_minus = alpha;
    // Work in the helicity triad so the reconstructed C is directly
    // comparable with the analytic diag(κ, κ, −1) shown by `analyze`.
    config.frame = Frame::Helicity;

    let run = || -> spintomo::Result<ExperimentDoc> {
        let (events, stats) = generate_events(config, StateSource::TauPair)?;
        let t = estimate_fano(&events, alpha, alpha)?;
        let boot = bootstrap(&events, alpha, alpha, resamples as usize, u64::from(seed))?;
        let sig = witness_significance(&t, &boot);

        let f = &t.fano_hat;
        let mut c_hat = [[0.0; 3]; 3];
        let mut c_sigma = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                c_hat[i][j] = f.c[(i, j)];
                let k = 6 + 3 * i + j;
                c_sigma[i][j] = t.covariance[(k, k)].max(0.0).sqrt();
            }
        }

        let truth = tau_pair_fano(angle);
        let kappa_true = tau_pair_state(angle).concurrence();
        let m12_true = spintomo::horodecki(&truth.c).m12;

        Ok(ExperimentDoc {
            theta,
            n_events,
            seed,
            alpha,
            resamples,
            sampler_efficiency: stats.acceptance_rate,
            b_plus_hat: [f.bplus.x, f.bplus.y, f.bplus.z],
            b_minus_hat: [f.bminus.x, f.bminus.y, f.bminus.z],
            c_hat,
            c_sigma,
            projected: t.projected,
            m12_hat: sig.m12_hat,
            m12_sigma: sig.m12_sigma,
            z_nonlocality: sig.z_nonlocality,
            concurrence_hat: sig.concurrence_hat,
            concurrence_sigma: sig.concurrence_sigma,
            z_entanglement: sig.z_entanglement,
            chsh_max_hat: sig.chsh_max_hat,
            tsirelson_ok: sig.tsirelson_ok,
            m12_boot: IntervalDoc::new(&boot.m12),
            concurrence_boot: IntervalDoc::new(&boot.concurrence),
            m12_true,
            concurrence_true: kappa_true,
            scatter: scatter_sample(&events),
        })
    };
    match run() {
        Ok(doc) => to_json(&doc),
        Err(e) => error_json(e.to_string()),
    }
}

/// Closed-form witnesses for the production state at `theta` radians.
/// Returns a JSON document; on bad input, `{"error": "..."}`.
#[wasm_bindgen]
pub fn analyze(theta: f64) -> String {
    analyze_json(theta)
}

/// Analytic concurrence/m₁₂/CHSH curves on a `points`-node `Θ` grid.
#[wasm_bindgen]
pub fn scan(points: u32) -> String {
    scan_json(points)
}

/// One seeded pseudo-experiment: generate, reconstruct, bootstrap, witness.
#[wasm_bindgen]
pub fn experiment(theta: f64, n_events: u32, seed: u32, alpha: f64, resamples: u32) -> String {
    experiment_json(theta, n_events, seed, alpha, resamples)
}
