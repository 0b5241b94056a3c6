//! The four subcommands. Each one builds its complete output in memory and
//! emits it in a single write, so reruns with identical parameters produce
//! byte-identical artifacts.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write as _};
use std::path::Path;

use spintomo::io::{
    read_events, render_bootstrap, render_generation_stats, render_significance, render_tomography,
    render_witness, write_events, EventFileMeta,
};
use spintomo::witness::WitnessReport;
use spintomo::{
    bootstrap, chsh_probability_form, concurrence, estimate_fano, generate_events, horodecki,
    optimal_chsh_directions, tau_pair_fano, tau_pair_state, witness_significance, ChshDirections,
    GeneratorConfig, ScatteringAngle, StateSource, ThetaMode, UnitVector3, DEFAULT_TOL_PSD,
};

use crate::config::{RunConfig, DEFAULT_RESAMPLES, DEFAULT_SCAN_POINTS, DEFAULT_SEED};
use crate::CliError;

/// Writes `content` to `out`, or to stdout when no path was given.
fn emit(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// demo
// ---------------------------------------------------------------------------

/// Collects report lines and compares every computed number against its
/// closed form within 1e-9.
struct Check {
    report: String,
    failures: usize,
}

const DEMO_TOL: f64 = 1e-9;

impl Check {
    fn new() -> Self {
        Check {
            report: String::new(),
            failures: 0,
        }
    }

    fn section(&mut self, title: &str) {
        if !self.report.is_empty() {
            self.report.push('\n');
        }
        let _ = writeln!(self.report, "[{title}]");
    }

    fn note(&mut self, text: &str) {
        let _ = writeln!(self.report, "{text}");
    }

    fn value(&mut self, label: &str, computed: f64, expected: f64) {
        let ok = (computed - expected).abs() <= DEMO_TOL;
        if !ok {
            self.failures += 1;
        }
        let verdict = if ok { "ok" } else { "MISMATCH" };
        let _ = writeln!(
            self.report,
            "{label:<34} = {computed:+.15e}   [closed form {expected:+.15e}] {verdict}"
        );
    }
}

/// The worked-example measurement quadruple `n1 = ẑ`, `n2 = −(ẑ+x̂)/√2`,
/// `n3 = −x̂`, `n4 = (ẑ−x̂)/√2`.
fn example_directions() -> ChshDirections {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ChshDirections::new(
        UnitVector3::z_axis(),
        UnitVector3::new(-s, 0.0, -s).expect("unit by construction"),
        -UnitVector3::x_axis(),
        UnitVector3::new(-s, 0.0, s).expect("unit by construction"),
    )
}

/// `demo`: the closed-form walkthrough, doubling as the repository's
/// self-test. Exit code 4 if any number drifts beyond 1e-9.
pub fn demo(out: Option<&Path>) -> Result<(), CliError> {
    let mut check = Check::new();

    check.section("pair-state amplitudes in the |RR>, |RL>, |LR>, |LL> basis");
    check.note("|Ψ(Θ)> = [(1+cosΘ)|RL> + (1−cosΘ)|LR>] / sqrt(2(1+cos²Θ))");
    for (name, theta) in [("0", 0.0), ("π/2", FRAC_PI_2), ("π", PI)] {
        let angle = ScatteringAngle::new(theta)?;
        let c = angle.cos();
        let norm = (2.0 * (1.0 + c * c)).sqrt();
        let expected = [0.0, (1.0 + c) / norm, (1.0 - c) / norm, 0.0];
        let state = tau_pair_state(angle);
        for (k, label) in ["RR", "RL", "LR", "LL"].iter().enumerate() {
            let amp = state.amplitudes()[k];
            check.value(&format!("amplitude_{label}(Θ={name})"), amp.re, expected[k]);
            if amp.im != 0.0 {
                check.value(&format!("amplitude_{label}_im(Θ={name})"), amp.im, 0.0);
            }
        }
    }

    check.section("probability-form CHSH at n1=ẑ, n2=−(ẑ+x̂)/√2, n3=−x̂, n4=(ẑ−x̂)/√2");
    check.note("P(n1,n2) − P(n1,n4) + P(n3,n2) + P(n3,n4)  ≤  P(n3;↑) + P(·;n2)");
    let dirs = example_directions();
    let separable = tau_pair_state(ScatteringAngle::new(0.0)?).density();
    let quad = chsh_probability_form(&separable, &dirs)?;
    check.value("separable |RL> lhs", quad.lhs, 0.5);
    check.value("separable |RL> rhs", quad.rhs, 1.0 - 1.0 / (2.0 * SQRT_2));
    check.note(&format!(
        "separable violates: {} (expected false)",
        quad.violated
    ));
    if quad.violated {
        check.failures += 1;
    }
    let bell = tau_pair_state(ScatteringAngle::new(FRAC_PI_2)?).density();
    let quad = chsh_probability_form(&bell, &dirs)?;
    check.value("maximally entangled lhs", quad.lhs, 0.5 + SQRT_2 / 2.0);
    check.value("maximally entangled rhs", quad.rhs, 1.0);
    check.note(&format!(
        "maximally entangled violates: {} (expected true)",
        quad.violated
    ));
    if !quad.violated {
        check.failures += 1;
    }

    check.section("concurrence C[ρ(Θ)] = sin²Θ / (1 + cos²Θ)");
    for (name, theta) in [
        ("0", 0.0),
        ("π/4", PI / 4.0),
        ("π/2", FRAC_PI_2),
        ("3π/4", 3.0 * PI / 4.0),
        ("π", PI),
    ] {
        let angle = ScatteringAngle::new(theta)?;
        let computed = concurrence(&tau_pair_state(angle).density())?;
        let expected = angle.sin().powi(2) / (1.0 + angle.cos().powi(2));
        check.value(&format!("concurrence(Θ={name})"), computed, expected);
    }

    check.section("Horodecki criterion and optimal CHSH");
    for (name, theta, m12, chsh) in [
        ("separable |RL>", 0.0, 1.0, 2.0),
        ("maximally entangled", FRAC_PI_2, 2.0, 2.0 * SQRT_2),
    ] {
        let fano = tau_pair_fano(ScatteringAngle::new(theta)?);
        let h = horodecki(&fano.c);
        check.value(&format!("{name} m12"), h.m12, m12);
        check.value(&format!("{name} chsh_max"), h.chsh_max, chsh);
        let optimal = optimal_chsh_directions(&fano.c);
        check.value(&format!("{name} optimal value"), optimal.value, chsh);
    }

    check.section("result");
    let passed = check.failures == 0;
    check.note(&format!(
        "self-check: {} ({} comparison(s) failed, tolerance {DEMO_TOL:e})",
        if passed { "PASS" } else { "FAIL" },
        check.failures
    ));

    emit(out, &check.report)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Physics(format!(
            "demo self-check failed: {} value(s) drifted beyond {DEMO_TOL:e}",
            check.failures
        )))
    }
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

/// `generate`: produce an ensemble and write the event file. Generation
/// statistics (acceptance rate, envelope) go to stderr so the event stream
/// stays clean.
pub fn generate(rc: &RunConfig) -> Result<(), CliError> {
    let config = rc.generator_config()?;
    let (events, stats) = generate_events(config, StateSource::TauPair)?;
    let meta = EventFileMeta::from_config(&config);
    match &rc.out {
        Some(path) => {
            let file = File::create(path)?;
            let mut writer = BufWriter::new(file);
            write_events(&mut writer, &meta, &events)?;
            writer.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_events(&mut lock, &meta, &events)?;
        }
    }
    eprint!("{}", render_generation_stats(&stats));
    Ok(())
}

// ---------------------------------------------------------------------------
// tomograph
// ---------------------------------------------------------------------------

/// `tomograph`: read an event file, reconstruct the state, and emit the
/// four report documents (tomography, bootstrap, significance, witness).
pub fn tomograph(file: &Path, rc: &RunConfig) -> Result<(), CliError> {
    let handle = File::open(file)
        .map_err(|e| CliError::Data(format!("cannot open {}: {e}", file.display())))?;
    let (meta, events) = read_events(BufReader::new(handle))?;

    // Analyzing powers and the bootstrap seed default to the file's own
    // metadata, so the event file alone reproduces the analysis.
    let alpha_plus = rc.alpha_plus.unwrap_or(meta.alpha_plus);
    let alpha_minus = rc.alpha_minus.unwrap_or(meta.alpha_minus);
    let seed = rc.seed.unwrap_or(meta.seed);

    let t = estimate_fano(&events, alpha_plus, alpha_minus)?;
    let validation = t.rho_hat.validate(rc.tol_psd.unwrap_or(DEFAULT_TOL_PSD));
    if !validation.is_physical {
        return Err(CliError::Physics(format!(
            "reconstructed state failed the physicality gate: min eigenvalue {:.6e}",
            validation.min_eigenvalue
        )));
    }
    let boot = bootstrap(
        &events,
        alpha_plus,
        alpha_minus,
        rc.bootstrap.unwrap_or(DEFAULT_RESAMPLES),
        seed,
    )?;
    let significance = witness_significance(&t, &boot);
    let witness = WitnessReport::from_state(&t.rho_hat)?;

    let mut doc = String::new();
    doc.push_str(&render_tomography(&t));
    doc.push('\n');
    doc.push_str(&render_bootstrap(&boot));
    doc.push('\n');
    doc.push_str(&render_significance(&significance));
    doc.push('\n');
    doc.push_str(&render_witness(&witness));
    emit(rc.out.as_deref(), &doc)
}

// ---------------------------------------------------------------------------
// scan
// ---------------------------------------------------------------------------

/// `scan`: a comma-separated table over the production angle with analytic
/// concurrence, Horodecki sum, and optimal CHSH; passing `--events` adds
/// Monte Carlo reconstruction columns with bootstrap errors.
pub fn scan(rc: &RunConfig) -> Result<(), CliError> {
    let points = rc.theta_points.unwrap_or(DEFAULT_SCAN_POINTS);
    if points < 2 {
        return Err(CliError::Usage(format!(
            "scan grid needs at least 2 points, got {points}"
        )));
    }
    let start = rc.theta_start.unwrap_or(0.0);
    let stop = rc.theta_stop.unwrap_or(PI);
    let monte_carlo = rc.events;

    let mut table = String::from("theta_rad,concurrence,m12,chsh_max");
    if monte_carlo.is_some() {
        table.push_str(",mc_m12,mc_m12_sigma,mc_concurrence,mc_concurrence_sigma");
    }
    table.push('\n');

    for k in 0..points {
        let theta = start + (stop - start) * k as f64 / (points - 1) as f64;
        let angle = ScatteringAngle::new(theta)?;
        let kappa = angle.sin().powi(2) / (1.0 + angle.cos().powi(2));
        let m12 = 1.0 + kappa * kappa;
        let optimal = optimal_chsh_directions(&tau_pair_fano(angle).c);
        let _ = write!(
            table,
            "{theta:.16e},{kappa:.16e},{m12:.16e},{:.16e}",
            optimal.value
        );

        if let Some(n_events) = monte_carlo {
            // Every grid point gets its own master seed, so rows stay
            // statistically independent and individually reproducible.
            let seed = rc.seed.unwrap_or(DEFAULT_SEED).wrapping_add(k as u64);
            let mut config = GeneratorConfig::new(n_events, seed);
            config.theta_mode = ThetaMode::Fixed(angle);
            if let Some(frame) = rc.frame {
                config.frame = frame;
            }
            config.alpha_plus = rc.alpha_plus.unwrap_or(1.0);
            config.alpha_minus = rc.alpha_minus.unwrap_or(1.0);
            config.acceptance_cut = rc.acceptance_cut;
            config.validate()?;
            let (events, _) = generate_events(config, StateSource::TauPair)?;
            let t = estimate_fano(&events, config.alpha_plus, config.alpha_minus)?;
            let boot = bootstrap(
                &events,
                config.alpha_plus,
                config.alpha_minus,
                rc.bootstrap.unwrap_or(DEFAULT_RESAMPLES),
                seed,
            )?;
            let s = witness_significance(&t, &boot);
            let _ = write!(
                table,
                ",{:.16e},{:.16e},{:.16e},{:.16e}",
                s.m12_hat, s.m12_sigma, s.concurrence_hat, s.concurrence_sigma
            );
        }
        table.push('\n');
    }

    emit(rc.out.as_deref(), &table)
}
