//! Built-in studies for the three figures: frequency-domain criterion sweep
//! and lift profile, closed-loop gain comparison, and the
//! disturbance-observer sensitivity comparison. Each writes its data CSVs
//! plus a gnuplot script.

use std::path::Path;

use adaptctl_core::error::Error;
use adaptctl_core::freqresp::bode_table;
use adaptctl_core::kyp::{certify, f_value, transfer_value, FrequencyGrid};
use adaptctl_core::linalg::SymMatrix;
use adaptctl_core::lyapunov::{lift_profile, NominalCertificate};
use adaptctl_core::mat::vec_dot;
use adaptctl_core::regressor::{AffineRow, BetaFamily};
use adaptctl_core::sim::{
    simulate, LinearErrorSystem, NoiseSpec, Sinusoid, Trajectory, UncertaintyModel, UpdateLaw,
};
use adaptctl_core::Mat;

use crate::output::{bode_csv, fmt, log_grid, tag, OutputSet};
use crate::{parallel, CliError};

const SQRT_2: f64 = std::f64::consts::SQRT_2;
/// Frequency of the sinusoidal disturbance component in the study setup.
const OMEGA_R: f64 = 1.7179;
/// Feedthrough gains compared across the studies.
const GAINS: [f64; 3] = [2.5, 5.0, 10.0];

fn study_system() -> Result<LinearErrorSystem, CliError> {
    LinearErrorSystem::second_order(1.0, 1.0 / SQRT_2).map_err(CliError::from_core)
}

fn study_v() -> Vec<f64> {
    vec![1.0, SQRT_2]
}

fn study_certificate(sys: &LinearErrorSystem) -> Result<NominalCertificate, CliError> {
    let p = SymMatrix::from_rows(&[&[2.8 * SQRT_2, 1.0], &[1.0, SQRT_2]])
        .map_err(CliError::from_core)?;
    NominalCertificate::new(p, sys.a(), sys.b()).map_err(CliError::from_core)
}

fn study_noise(seed: u64) -> NoiseSpec {
    NoiseSpec {
        seed,
        sample_dt: 0.01,
        amplitude_bound: 0.01,
        sinusoids: vec![Sinusoid { amplitude: 0.05, frequency: OMEGA_R, phase: 0.0 }],
    }
}

pub fn run(figure: u32, out_dir: &Path, seed: Option<u64>) -> Result<(), CliError> {
    match figure {
        1 => figure1(out_dir),
        2 => figure2(out_dir, seed.unwrap_or(1)),
        3 => figure3(out_dir),
        other => Err(CliError::config(format!("unknown figure id {other} (expected 1, 2 or 3)"))),
    }
}

/// Criterion sweep f(ω) with and without the quadratic gain term, the real
/// part of the transfer function, and the lift profile g(φ).
fn figure1(out_dir: &Path) -> Result<(), CliError> {
    let sys = study_system()?;
    let v = study_v();
    let grid = FrequencyGrid::log_default();
    let verdict =
        certify(sys.a(), sys.b(), &v, 0.75, 0.9, &grid).map_err(CliError::from_core)?;
    let kappa = verdict.kappa;
    let vartheta = kappa * vec_dot(&v, &v);

    let mut sweep = String::from("omega,f_criterion,f_psi_free,re_h\n");
    for &w in grid.omegas() {
        let f_k =
            f_value(w, kappa, vartheta, &v, sys.a(), sys.b()).map_err(CliError::from_core)?;
        let f_0 = f_value(w, 0.0, vartheta, &v, sys.a(), sys.b()).map_err(CliError::from_core)?;
        let re_h = transfer_value(sys.a(), sys.b(), &v, w).map_err(CliError::from_core)?.re;
        sweep += &format!("{},{},{},{}\n", fmt(w), fmt(f_k), fmt(f_0), fmt(re_h));
    }

    let profile = lift_profile(&verdict.lmi.q, &Mat::column(&v), 10.0, 501)
        .map_err(CliError::from_core)?;
    let mut gcsv = String::from("phi,g\n");
    for (phi, g) in &profile.samples {
        gcsv += &format!("{},{}\n", fmt(*phi), fmt(*g));
    }

    let script = r#"set datafile separator ','
set terminal pngcairo size 900,700
set output 'fig1.png'
set multiplot layout 2,1
set logscale x
set xlabel 'omega (rad/s)'
set ylabel 'f(omega)'
plot 'fig1_f_sweep.csv' using 1:2 with lines title 'criterion', \
     'fig1_f_sweep.csv' using 1:3 with lines lc rgb 'red' title 'psi-free', \
     0 with lines dt 2 lc rgb 'black' notitle
unset logscale x
set xlabel 'phi'
set ylabel 'g(phi, Q, PB)'
plot 'fig1_g_profile.csv' using 1:2 with lines title 'eigenvalue lift'
unset multiplot
"#;

    let mut output = OutputSet::new();
    output.note(format!(
        "kappa = {:.6} (0.9 x sup gain {:.6}), psi-free witness at omega = {:?}",
        kappa, verdict.sup_gain, verdict.psi_witness
    ));
    output.stage("fig1_f_sweep.csv", sweep);
    output.stage("fig1_g_profile.csv", gcsv);
    output.stage("fig1.gp", script.to_string());
    output.commit(out_dir)
}

/// Closed-loop runs: position error for three gains of each update law.
fn figure2(out_dir: &Path, base_seed: u64) -> Result<(), CliError> {
    let sys = study_system()?;
    let cert = study_certificate(&sys)?;
    let e0 = [0.0, 1.5];
    let dt = 1e-3;
    let t_final = 60.0;

    struct Job {
        name: String,
        law: UpdateLaw,
        seed: u64,
    }
    let mut jobs_spec = Vec::new();
    for (idx, &k) in GAINS.iter().enumerate() {
        jobs_spec.push(Job {
            name: format!("fig2_traj_static_k{}.csv", tag(k)),
            law: UpdateLaw::Static { base_gain: SymMatrix::identity(2), scaling: k },
            seed: base_seed + idx as u64,
        });
    }
    for (idx, &k) in GAINS.iter().enumerate() {
        jobs_spec.push(Job {
            name: format!("fig2_traj_pi_k{}.csv", tag(k)),
            law: UpdateLaw::Pi {
                feedthrough: SymMatrix::identity(2).scale(k),
                rate: SymMatrix::identity(2).scale(2.0),
                damping: SymMatrix::identity(2).scale(0.2),
            },
            seed: base_seed + 3 + idx as u64,
        });
    }

    let jobs: Vec<Box<dyn FnOnce() -> Result<(String, Trajectory), Error> + Send + '_>> = jobs_spec
        .into_iter()
        .map(|job| {
            let sys = &sys;
            let cert = &cert;
            let b: Box<dyn FnOnce() -> Result<(String, Trajectory), Error> + Send + '_> =
                Box::new(move || {
                    let unc = UncertaintyModel {
                        beta: BetaFamily::Affine(vec![
                            AffineRow::Constant(1.0),
                            AffineRow::State { index: 1, coeff: -1.0 },
                        ]),
                        weights: vec![1.0, 1.0],
                        noise: study_noise(job.seed),
                    };
                    let traj =
                        simulate(sys, cert, &unc, &job.law, &e0, None, t_final, dt)?;
                    Ok((job.name, traj))
                });
            b
        })
        .collect();

    let mut output = OutputSet::new();
    for result in parallel::run_all(jobs) {
        let (name, traj) = result.map_err(CliError::from_core)?;
        output.note(format!("{name}: {} samples", traj.len()));
        output.stage(name, traj.to_csv());
    }
    let script = format!(
        r#"set datafile separator ','
set terminal pngcairo size 900,500
set output 'fig2.png'
set xlabel 't (s)'
set ylabel 'position error e1'
plot 'fig2_traj_static_k{k0}.csv' using 1:2 with lines dt 2 title 'static K={g0}', \
     'fig2_traj_static_k{k1}.csv' using 1:2 with lines dt 2 title 'static K={g1}', \
     'fig2_traj_static_k{k2}.csv' using 1:2 with lines dt 2 title 'static K={g2}', \
     'fig2_traj_pi_k{k0}.csv' using 1:2 with lines title 'PI K={g0}', \
     'fig2_traj_pi_k{k1}.csv' using 1:2 with lines title 'PI K={g1}', \
     'fig2_traj_pi_k{k2}.csv' using 1:2 with lines title 'PI K={g2}'
"#,
        k0 = tag(GAINS[0]),
        k1 = tag(GAINS[1]),
        k2 = tag(GAINS[2]),
        g0 = GAINS[0],
        g1 = GAINS[1],
        g2 = GAINS[2],
    );
    output.stage("fig2.gp", script);
    output.commit(out_dir)
}

/// Sensitivity of the weight estimate against the lumped input disturbance
/// for the purely linear case, three gains per law.
fn figure3(out_dir: &Path) -> Result<(), CliError> {
    let sys = study_system()?;
    let cert = study_certificate(&sys)?;
    let omegas = log_grid(1e-2, 1e2, 400);

    let mut output = OutputSet::new();
    for &k in &GAINS {
        let law = UpdateLaw::Static { base_gain: SymMatrix::scalar(1.0), scaling: k };
        let samples = bode_table(&law, &sys, &cert, &omegas).map_err(CliError::from_core)?;
        output.stage(format!("fig3_bode_static_k{}.csv", tag(k)), bode_csv(&samples));
    }
    for &k in &GAINS {
        let law = UpdateLaw::Pi {
            feedthrough: SymMatrix::scalar(k),
            rate: SymMatrix::scalar(2.0),
            damping: SymMatrix::scalar(0.2),
        };
        let samples = bode_table(&law, &sys, &cert, &omegas).map_err(CliError::from_core)?;
        output.stage(format!("fig3_bode_pi_k{}.csv", tag(k)), bode_csv(&samples));
    }
    let script = format!(
        r#"set datafile separator ','
set terminal pngcairo size 900,700
set output 'fig3.png'
set multiplot layout 2,1
set logscale x
set xlabel 'omega (rad/s)'
set ylabel 'magnitude (dB)'
plot 'fig3_bode_static_k{k0}.csv' using 1:2 with lines dt 2 title 'static K={g0}', \
     'fig3_bode_static_k{k1}.csv' using 1:2 with lines dt 2 title 'static K={g1}', \
     'fig3_bode_static_k{k2}.csv' using 1:2 with lines dt 2 title 'static K={g2}', \
     'fig3_bode_pi_k{k0}.csv' using 1:2 with lines title 'PI K={g0}', \
     'fig3_bode_pi_k{k1}.csv' using 1:2 with lines title 'PI K={g1}', \
     'fig3_bode_pi_k{k2}.csv' using 1:2 with lines title 'PI K={g2}'
set ylabel 'phase (deg)'
plot 'fig3_bode_static_k{k0}.csv' using 1:3 with lines dt 2 title 'static K={g0}', \
     'fig3_bode_static_k{k1}.csv' using 1:3 with lines dt 2 title 'static K={g1}', \
     'fig3_bode_static_k{k2}.csv' using 1:3 with lines dt 2 title 'static K={g2}', \
     'fig3_bode_pi_k{k0}.csv' using 1:3 with lines title 'PI K={g0}', \
     'fig3_bode_pi_k{k1}.csv' using 1:3 with lines title 'PI K={g1}', \
     'fig3_bode_pi_k{k2}.csv' using 1:3 with lines title 'PI K={g2}'
unset multiplot
"#,
        k0 = tag(GAINS[0]),
        k1 = tag(GAINS[1]),
        k2 = tag(GAINS[2]),
        g0 = GAINS[0],
        g1 = GAINS[1],
        g2 = GAINS[2],
    );
    output.stage("fig3.gp", script);
    output.commit(out_dir)
}
