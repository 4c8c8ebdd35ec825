//! The analyze / kyp / simulate / bode commands.

use std::path::Path;

use adaptctl_core::bounds::{
    beta_infimum, convergence_rate, gain_scaling_lower_bound, growth_bound, suboptimal_gamma,
    transient_envelope, ultimate_bound, StaticLawConfig,
};
use adaptctl_core::error::Error;
use adaptctl_core::freqresp::bode_table;
use adaptctl_core::kyp::{certify, f_value, lmi_residual, transfer_value, FrequencyGrid};
use adaptctl_core::linalg::sym_eig;
use adaptctl_core::lyapunov::NominalCertificate;
use adaptctl_core::mat::{vec_dot, vec_norm};
use adaptctl_core::regressor::BetaFamily;
use adaptctl_core::sim::{simulate, verify_uub, LinearErrorSystem, Trajectory, UpdateLaw};

use crate::config::{CertificateSource, ConfigFile, KypSearchBlock};
use crate::output::{bode_csv, fmt, log_grid, OutputSet};
use crate::{parallel, CliError};

/// Resolve the certificate: take the explicit `P` or run the search.
pub fn certificate_for(
    cfg: &ConfigFile,
    sys: &LinearErrorSystem,
) -> Result<NominalCertificate, CliError> {
    match cfg.resolve_certificate_source()? {
        CertificateSource::Explicit(p) => NominalCertificate::new(p, sys.a(), sys.b())
            .map_err(|e| CliError::config(format!("certificate: {e}"))),
        CertificateSource::Search(search) => {
            let grid = FrequencyGrid::log_default();
            let verdict = certify(
                sys.a(),
                sys.b(),
                &search.v,
                search.varrho,
                search.kappa_fraction,
                &grid,
            )
            .map_err(CliError::from_core)?;
            NominalCertificate::new(verdict.lmi.p.clone(), sys.a(), sys.b())
                .map_err(CliError::from_core)
        }
    }
}

fn first_static_law(laws: &[(String, UpdateLaw)]) -> Result<(&str, &adaptctl_core::SymMatrix, f64), CliError> {
    laws.iter()
        .find_map(|(label, law)| match law {
            UpdateLaw::Static { base_gain, scaling } => {
                Some((label.as_str(), base_gain, *scaling))
            }
            UpdateLaw::Pi { .. } => None,
        })
        .ok_or_else(|| CliError::config("analysis requires at least one static law".into()))
}

pub fn cmd_analyze(cfg: &ConfigFile, out_dir: &Path, seed: Option<u64>) -> Result<(), CliError> {
    let sys = cfg.resolve_system()?;
    let cert = certificate_for(cfg, &sys)?;
    let unc = cfg.resolve_uncertainty(sys.dim(), seed)?;
    let laws = cfg.resolve_laws(unc.beta.dim())?;
    let (label, base_gain, scaling) = first_static_law(&laws)?;
    let eta_star = cfg.analysis.eta_star.unwrap_or_else(|| unc.noise.eta_star());

    let floor = beta_infimum(&unc.beta, base_gain).map_err(CliError::from_core)?;
    let law_cfg =
        StaticLawConfig::new(base_gain.clone(), scaling, cfg.analysis.gamma, cfg.analysis.mu, floor)
            .map_err(CliError::from_core)?;

    let lift = cert.has_lift();
    let lift_gap = cert.lift_at(1.0) - cert.lambda_min_q();
    let rate = convergence_rate(&cert, &law_cfg);
    let tau = growth_bound(&cert, scaling, floor).map_err(CliError::from_core)?;

    let mut rows: Vec<(String, String)> = vec![
        ("law".into(), label.to_string()),
        ("beta_floor".into(), fmt(floor)),
        ("eta_star".into(), fmt(eta_star)),
        ("lift".into(), lift.to_string()),
        ("lift_gap".into(), fmt(lift_gap)),
        ("lambda_min_q".into(), fmt(cert.lambda_min_q())),
        ("lambda_max_p".into(), fmt(cert.lambda_max_p())),
        ("convergence_rate".into(), fmt(rate)),
        ("tau".into(), fmt(tau)),
    ];

    if floor > 0.0 {
        let report =
            ultimate_bound(&cert, &law_cfg, &unc.weights, eta_star).map_err(CliError::from_core)?;
        rows.push(("ultimate_bound".into(), fmt(report.ultimate)));
        rows.push(("residual".into(), fmt(report.residual)));
        match gain_scaling_lower_bound(&cert, floor) {
            Ok(bound) => rows.push(("alpha_lower_bound".into(), fmt(bound))),
            Err(Error::NoEigenvalueLift) => {
                rows.push(("alpha_lower_bound".into(), "n/a (no eigenvalue lift)".into()))
            }
            Err(e) => return Err(CliError::from_core(e)),
        }
        match suboptimal_gamma(&cert, &law_cfg) {
            Ok(gamma) => rows.push(("gamma_star".into(), fmt(gamma))),
            Err(Error::NoEigenvalueLift) => {
                rows.push(("gamma_star".into(), "n/a (no eigenvalue lift)".into()))
            }
            Err(Error::InconsistentInputs(msg)) => {
                rows.push(("gamma_star".into(), format!("n/a ({msg})")))
            }
            Err(e) => return Err(CliError::from_core(e)),
        }
    } else {
        let hint = "n/a (regressor floor is zero; augment the regressor with a constant component)";
        rows.push(("ultimate_bound".into(), hint.into()));
        rows.push(("residual".into(), hint.into()));
        rows.push(("alpha_lower_bound".into(), hint.into()));
        rows.push(("gamma_star".into(), hint.into()));
    }

    let mut output = OutputSet::new();
    let mut csv = String::from("name,value\n");
    for (name, value) in &rows {
        output.note(format!("{name:>20}: {value}"));
        csv += &format!("{name},{value}\n");
    }
    output.stage("analyze.csv", csv);
    output.commit(out_dir)
}

pub fn cmd_kyp(cfg: &ConfigFile, out_dir: &Path) -> Result<(), CliError> {
    let sys = cfg.resolve_system()?;
    let search: KypSearchBlock = match cfg.resolve_certificate_source()? {
        CertificateSource::Search(s) => s,
        CertificateSource::Explicit(_) => {
            return Err(CliError::config(
                "the kyp command requires the certificate.kyp block".into(),
            ))
        }
    };
    let grid = FrequencyGrid::log_default();
    let verdict = certify(
        sys.a(),
        sys.b(),
        &search.v,
        search.varrho,
        search.kappa_fraction,
        &grid,
    )
    .map_err(CliError::from_core)?;

    let mut output = OutputSet::new();
    output.note(format!(
        "spr: true (min Re H = {:.6e} at omega = {:.6e}, hf limit = {:.6})",
        verdict.spr.min_re, verdict.spr.min_re_omega, verdict.spr.hf_limit
    ));
    output.note(format!("sup_gain: {:.9}", verdict.sup_gain));
    output.note(format!("kappa: {:.9}", verdict.kappa));
    output.note(format!(
        "criteria: hold (min f = {:.6e}, hf limit = {:.6})",
        verdict.criteria.min_f, verdict.criteria.hf_limit
    ));
    match verdict.psi_witness {
        Some(w) => output.note(format!("psi_free_witness: omega = {w:.6e}")),
        None => output.note("psi_free_witness: none".to_string()),
    }
    output.note(format!("lift_confirmed: {}", verdict.lift_confirmed));
    output.note(format!(
        "grid: {} points plus adaptive refinement ({} evaluations in the criteria scan)",
        verdict.grid_points, verdict.criteria.evaluations
    ));
    let p = &verdict.lmi.p;
    let q = &verdict.lmi.q;
    for i in 0..p.dim() {
        let prow: Vec<String> = (0..p.dim()).map(|j| format!("{:+.6}", p.get(i, j))).collect();
        let qrow: Vec<String> = (0..q.dim()).map(|j| format!("{:+.6}", q.get(i, j))).collect();
        output.note(format!("P[{i}]: [{}]   Q[{i}]: [{}]", prow.join(", "), qrow.join(", ")));
    }
    let residual = lmi_residual(sys.a(), p, &search.v, verdict.kappa, 0.0);
    let eigs = sym_eig(&residual);
    output.note(format!(
        "residual eigenvalues: {:?} (max {:.6e})",
        eigs.values, verdict.lmi.residual_max_eig
    ));

    let vartheta = verdict.kappa * vec_dot(&search.v, &search.v);
    let mut csv = String::from("omega,f_criterion,f_psi_free,re_h\n");
    for &w in grid.omegas() {
        let f_k = f_value(w, verdict.kappa, vartheta, &search.v, sys.a(), sys.b())
            .map_err(CliError::from_core)?;
        let f_0 =
            f_value(w, 0.0, vartheta, &search.v, sys.a(), sys.b()).map_err(CliError::from_core)?;
        let re_h =
            transfer_value(sys.a(), sys.b(), &search.v, w).map_err(CliError::from_core)?.re;
        csv += &format!("{},{},{},{}\n", fmt(w), fmt(f_k), fmt(f_0), fmt(re_h));
    }
    output.stage("kyp_f_sweep.csv", csv);
    output.commit(out_dir)
}

pub fn cmd_simulate(cfg: &ConfigFile, out_dir: &Path, seed: Option<u64>) -> Result<(), CliError> {
    let sys = cfg.resolve_system()?;
    let cert = certificate_for(cfg, &sys)?;
    let unc = cfg.resolve_uncertainty(sys.dim(), seed)?;
    let laws = cfg.resolve_laws(unc.beta.dim())?;
    let run = cfg.run_block()?;
    let eta_star = cfg.analysis.eta_star.unwrap_or_else(|| unc.noise.eta_star());

    let jobs: Vec<Box<dyn FnOnce() -> Result<(String, Trajectory), Error> + Send + '_>> = laws
        .iter()
        .map(|(label, law)| {
            let label = label.clone();
            let law = law.clone();
            let sys = &sys;
            let cert = &cert;
            let unc = &unc;
            let job: Box<dyn FnOnce() -> Result<(String, Trajectory), Error> + Send + '_> =
                Box::new(move || {
                    let traj = simulate(
                        sys,
                        cert,
                        unc,
                        &law,
                        &run.e0,
                        run.z0.as_deref(),
                        run.t_final,
                        run.dt,
                    )?;
                    Ok((label, traj))
                });
            job
        })
        .collect();
    let results = parallel::run_all(jobs);

    let mut output = OutputSet::new();
    for (result, (label, law)) in results.into_iter().zip(&laws) {
        let (_, traj) = result.map_err(CliError::from_core)?;
        output.stage(format!("traj_{label}.csv"), traj.to_csv());
        if let UpdateLaw::Static { base_gain, scaling } = law {
            let floor = beta_infimum(&unc.beta, base_gain).map_err(CliError::from_core)?;
            if floor > 0.0 {
                let law_cfg = StaticLawConfig::new(
                    base_gain.clone(),
                    *scaling,
                    cfg.analysis.gamma,
                    cfg.analysis.mu,
                    floor,
                )
                .map_err(CliError::from_core)?;
                let report = ultimate_bound(&cert, &law_cfg, &unc.weights, eta_star)
                    .map_err(CliError::from_core)?;
                let uub = verify_uub(&traj, report.residual, run.tail_fraction);
                output.note(format!(
                    "{label}: tail max = {:.6}, residual = {:.6}, within = {}, entry = {:?}",
                    uub.tail_max, report.residual, uub.within_bound, uub.entry_time
                ));
                let e0_norm = vec_norm(&run.e0);
                match transient_envelope(0.0, e0_norm, &cert, &law_cfg, &unc.weights, eta_star) {
                    Ok(_) => {
                        let mut csv = String::from("t,envelope,e_norm\n");
                        for k in 0..traj.len() {
                            let env = transient_envelope(
                                traj.times[k],
                                e0_norm,
                                &cert,
                                &law_cfg,
                                &unc.weights,
                                eta_star,
                            )
                            .map_err(CliError::from_core)?;
                            csv += &format!(
                                "{},{},{}\n",
                                fmt(traj.times[k]),
                                fmt(env),
                                fmt(traj.state_norm(k))
                            );
                        }
                        output.stage(format!("envelope_{label}.csv"), csv);
                    }
                    Err(Error::EnvelopeHypothesis { e0_norm, residual }) => {
                        output.note(format!(
                            "{label}: envelope skipped (|e0| = {e0_norm:.6} below residual {residual:.6})"
                        ));
                    }
                    Err(e) => return Err(CliError::from_core(e)),
                }
            } else {
                let uub = verify_uub(&traj, f64::INFINITY, run.tail_fraction);
                output.note(format!(
                    "{label}: tail max = {:.6} (regressor floor 0: no closed-form bound)",
                    uub.tail_max
                ));
            }
        } else {
            let uub = verify_uub(&traj, f64::INFINITY, run.tail_fraction);
            output.note(format!(
                "{label}: tail max = {:.6} (no closed-form bound for the PI law)",
                uub.tail_max
            ));
        }
    }
    output.commit(out_dir)
}

pub fn cmd_bode(cfg: &ConfigFile, out_dir: &Path, seed: Option<u64>) -> Result<(), CliError> {
    let sys = cfg.resolve_system()?;
    let cert = certificate_for(cfg, &sys)?;
    let unc = cfg.resolve_uncertainty(sys.dim(), seed)?;
    match unc.beta {
        BetaFamily::Constant(c) if (c - 1.0).abs() <= 1e-12 => {}
        _ => {
            return Err(CliError::config(
                "bode requires the purely linear case: uncertainty.beta must be constant 1".into(),
            ))
        }
    }
    let laws = cfg.resolve_laws(1)?;
    let omegas = log_grid(cfg.bode.omega_min, cfg.bode.omega_max, cfg.bode.points);

    let mut output = OutputSet::new();
    for (label, law) in &laws {
        let samples = bode_table(law, &sys, &cert, &omegas).map_err(CliError::from_core)?;
        let kind = match law {
            UpdateLaw::Static { .. } => "static",
            UpdateLaw::Pi { .. } => "pi",
        };
        output.note(format!(
            "{label}: {} rows, |S| at omega_min = {:.6}",
            samples.len(),
            samples[0].value.norm()
        ));
        output.stage(format!("bode_{kind}_{label}.csv"), bode_csv(&samples));
    }
    output.commit(out_dir)
}
