//! The five batch commands. Each one loads a validated config, runs the
//! corresponding library operations, writes deterministic CSV/JSON reports
//! into the output directory and returns the exit code: 0 all-pass,
//! 1 config error, 2 runtime/solver error, 3 property-assertion failure.

use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use varreg_core::convergence::{run_r2_experiment, run_r3_experiment, R3Config, DEFAULT_TOL};
use varreg_core::ext::ExtReal;
use varreg_core::kl::{
    borwein_check, counterexample_report, counterexample_sequence, rho2_kl_equivalence_probe,
    KlError,
};
use varreg_core::point::Point;
use varreg_core::scheme::example24_scheme;
use varreg_core::solvers::{
    cross_check_thm23, ivanov_solve, morozov_solve, tikhonov_solve, CheckOutcome,
    CrossCheckLevels, SolveReport,
};
use varreg_core::stepfn::StepFn;

use crate::config::{
    ConvergeConfig, CrosscheckConfig, FamilySpec, Figure1Config, KlConfig, ProblemKind,
    SolveConfig,
};
use crate::output::{ext, ext_json, num, write_atomic, Csv};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_PROPERTY: i32 = 3;

fn fail_runtime(msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    EXIT_RUNTIME
}

fn fail_config(msg: impl std::fmt::Display) -> i32 {
    eprintln!("config error: {msg}");
    EXIT_CONFIG
}

pub fn cmd_solve(cfg: &SolveConfig, out_dir: &Path) -> i32 {
    let scheme = match cfg.scheme.build() {
        Ok(s) => s,
        Err(e) => return fail_config(e),
    };
    let y = match Point::from_slice(&cfg.y) {
        Ok(y) => y,
        Err(e) => return fail_config(e),
    };
    let solver = cfg.solver.build();
    let (name, result) = match cfg.problem {
        ProblemKind::Tikhonov => ("tikhonov", tikhonov_solve(&scheme, &y, cfg.parameter, &solver)),
        ProblemKind::Ivanov => ("ivanov", ivanov_solve(&scheme, &y, cfg.parameter, &solver)),
        ProblemKind::Morozov => ("morozov", morozov_solve(&scheme, &y, cfg.parameter, &solver)),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => return fail_runtime(e),
    };

    let json = solve_report_json(name, cfg.parameter, &report);
    let mut csv = Csv::new(&[
        "problem",
        "parameter",
        "objective",
        "rho",
        "reg",
        "method",
        "iterations",
        "x",
    ]);
    csv.row([
        name.to_string(),
        num(cfg.parameter),
        ext(report.objective),
        ext(report.discrepancy_at_min),
        ext(report.regularizer_at_min),
        report.method.to_string(),
        report.iterations.to_string(),
        point_fields(report.minimizer()),
    ]);
    if write_atomic(&out_dir.join("solve_report.json"), &format!("{json:#}\n")).is_err()
        || write_atomic(&out_dir.join("solve_report.csv"), &csv.finish()).is_err()
    {
        return fail_runtime("cannot write report files");
    }
    println!(
        "{name}: x = {} objective = {} ({})",
        report.minimizer(),
        ext(report.objective),
        report.method
    );
    EXIT_OK
}

fn point_fields(p: &Point) -> String {
    p.as_slice()
        .iter()
        .map(|&v| num(v))
        .collect::<Vec<_>>()
        .join(";")
}

fn solve_report_json(problem: &str, parameter: f64, r: &SolveReport) -> serde_json::Value {
    serde_json::json!({
        "problem": problem,
        "parameter": parameter,
        "minimizers": r.minimizers.iter().map(|m| m.as_slice().to_vec()).collect::<Vec<_>>(),
        "objective": ext_json(r.objective),
        "discrepancy": ext_json(r.discrepancy_at_min),
        "regularizer": ext_json(r.regularizer_at_min),
        "method": r.method.to_string(),
        "iterations": r.iterations,
        "tolerance_achieved": r.tolerance_achieved,
        "truncated": r.truncated,
        "unique": r.is_unique(),
    })
}

/// Curve table of the worked example: misfit, regularizer and the weighted
/// objectives over an x grid, ready for plotting.
pub fn cmd_figure1(cfg: &Figure1Config, out_dir: &Path) -> i32 {
    if cfg.samples < 2 || cfg.xrange[0] >= cfg.xrange[1] {
        return fail_config("need samples >= 2 and xrange.lo < xrange.hi");
    }
    let s = example24_scheme();
    let y = Point::scalar(1.0);
    let mut header: Vec<String> = vec!["x".into(), "rho".into(), "R".into()];
    for alpha in &cfg.alphas {
        header.push(format!("T_{alpha}"));
    }
    let mut csv = Csv::new(&header.iter().map(|s| s.as_str()).collect::<Vec<_>>());
    let (lo, hi) = (cfg.xrange[0], cfg.xrange[1]);
    let step = (hi - lo) / (cfg.samples - 1) as f64;
    for i in 0..cfg.samples {
        let x = if i == cfg.samples - 1 { hi } else { lo + step * i as f64 };
        let p = Point::scalar(x);
        let rho = match s.misfit(&p, &y) {
            Ok(v) => v,
            Err(e) => return fail_runtime(e),
        };
        let reg = s.regularizer().eval(&p);
        let mut fields = vec![num(x), ext(rho), ext(reg)];
        for &alpha in &cfg.alphas {
            match s.objective(&p, &y, alpha) {
                Ok(t) => fields.push(ext(t)),
                Err(e) => return fail_runtime(e),
            }
        }
        csv.row(fields);
    }
    if write_atomic(&out_dir.join("figure1.csv"), &csv.finish()).is_err() {
        return fail_runtime("cannot write figure1.csv");
    }
    println!("figure1: {} rows over [{lo}, {hi}]", cfg.samples);
    EXIT_OK
}

pub fn cmd_crosscheck(cfg: &CrosscheckConfig, out_dir: &Path) -> i32 {
    let scheme = match cfg.scheme.build() {
        Ok(s) => s,
        Err(e) => return fail_config(e),
    };
    let y = match Point::from_slice(&cfg.y) {
        Ok(y) => y,
        Err(e) => return fail_config(e),
    };
    let solver = cfg.solver.build();
    let levels = CrossCheckLevels {
        alpha: cfg.alpha,
        tau: cfg.tau,
        delta: cfg.delta,
    };
    let items = cross_check_thm23(&scheme, &y, levels, &solver);

    let mut csv = Csv::new(&["check", "outcome", "detail"]);
    let mut any_fail = false;
    for item in &items {
        let (outcome, detail) = match &item.outcome {
            CheckOutcome::Pass { agreement } => ("PASS".to_string(), num(*agreement)),
            CheckOutcome::Skip { reason } => ("SKIP".to_string(), reason.clone()),
            CheckOutcome::Fail { detail } => {
                any_fail = true;
                ("FAIL".to_string(), detail.clone())
            }
        };
        println!("{}: {} ({})", item.name, outcome, detail);
        csv.row([item.name.to_string(), outcome, detail]);
    }

    // converse direction: the constrained solution need not be a Tikhonov
    // minimizer for any weight; confirm the gap at the configured weights
    if let Some(alphas) = &cfg.converse_alphas {
        let constrained = match (cfg.tau, cfg.delta) {
            (Some(tau), _) => ivanov_solve(&scheme, &y, tau, &solver),
            (None, Some(delta)) => morozov_solve(&scheme, &y, delta, &solver),
            (None, None) => {
                return fail_config("converse_alphas needs tau or delta");
            }
        };
        let x_c = match constrained {
            Ok(r) => r.minimizer().clone(),
            Err(e) => return fail_runtime(e),
        };
        for &alpha in alphas {
            let rep = match tikhonov_solve(&scheme, &y, alpha, &solver) {
                Ok(r) => r,
                Err(e) => return fail_runtime(e),
            };
            let t_min = rep.objective.value().unwrap_or(f64::INFINITY);
            let t_c = match scheme.objective(&x_c, &y, alpha) {
                Ok(ExtReal::Finite(v)) => v,
                _ => f64::INFINITY,
            };
            let confirmed = t_c >= t_min + 0.01;
            if !confirmed {
                any_fail = true;
            }
            let name = format!("converse_not_tikhonov_alpha_{alpha}");
            let outcome = if confirmed { "PASS" } else { "FAIL" };
            let detail = format!("T(x_c)={} T(x_min)={}", num(t_c), num(t_min));
            println!("{name}: {outcome} ({detail})");
            csv.row([name, outcome.to_string(), detail]);
        }
    }

    if write_atomic(&out_dir.join("crosscheck.csv"), &csv.finish()).is_err() {
        return fail_runtime("cannot write crosscheck.csv");
    }
    if any_fail {
        EXIT_PROPERTY
    } else {
        EXIT_OK
    }
}

pub fn cmd_converge(cfg: &ConvergeConfig, out_dir: &Path, seed_override: Option<u64>) -> i32 {
    match cfg {
        ConvergeConfig::R2 {
            scheme,
            y,
            sequence,
            alpha,
            tol,
            solver,
        } => {
            let s = match scheme.build() {
                Ok(s) => s,
                Err(e) => return fail_config(e),
            };
            let y = match Point::from_slice(y) {
                Ok(y) => y,
                Err(e) => return fail_config(e),
            };
            let seq = match sequence.build(&y) {
                Ok(q) => q,
                Err(e) => return fail_config(e),
            };
            let rep = match run_r2_experiment(&s, &seq, *alpha, &solver.build(), tol.unwrap_or(DEFAULT_TOL)) {
                Ok(r) => r,
                Err(e) => return fail_runtime(e),
            };
            let mut csv = Csv::new(&["n", "distance"]);
            for (i, d) in rep.distances.iter().enumerate() {
                csv.row([(i + 1).to_string(), num(*d)]);
            }
            if write_atomic(&out_dir.join("converge_r2.csv"), &csv.finish()).is_err() {
                return fail_runtime("cannot write converge_r2.csv");
            }
            println!(
                "r2: terminal distance {} converged={}",
                num(rep.verdict.terminal_value),
                rep.verdict.converged
            );
            if rep.verdict.converged {
                EXIT_OK
            } else {
                EXIT_PROPERTY
            }
        }
        ConvergeConfig::R3 {
            scheme,
            x_exact,
            levels,
            rule,
            tol,
            reg_tol,
            solver,
            seed,
        } => {
            let s = match scheme.build() {
                Ok(s) => s,
                Err(e) => return fail_config(e),
            };
            let x_exact = match Point::from_slice(x_exact) {
                Ok(x) => x,
                Err(e) => return fail_config(e),
            };
            if *levels == 0 {
                return fail_config("levels must be positive");
            }
            let r3 = R3Config {
                noise_levels: (1..=*levels as i32).map(|n| 2f64.powi(-n)).collect(),
                rule: rule.build(),
                seed: seed_override.or(*seed).unwrap_or(17),
                tol: tol.unwrap_or(DEFAULT_TOL),
                reg_tol: reg_tol.unwrap_or(1e-3),
            };
            let rep = match run_r3_experiment(&s, &x_exact, None, &solver.build(), &r3) {
                Ok(r) => r,
                Err(e) => return fail_runtime(e),
            };
            let mut csv = Csv::new(&["n", "delta", "alpha", "rho", "R", "err"]);
            for row in &rep.rows {
                csv.row([
                    row.n.to_string(),
                    num(row.delta),
                    num(row.alpha),
                    num(row.rho),
                    num(row.reg),
                    num(row.err),
                ]);
            }
            if write_atomic(&out_dir.join("converge_r3.csv"), &csv.finish()).is_err() {
                return fail_runtime("cannot write converge_r3.csv");
            }
            println!(
                "r3: R(x*) = {} gap = {} passed={}",
                num(rep.reg_at_minimal),
                num(rep.reg_gap),
                rep.passed
            );
            if rep.passed {
                EXIT_OK
            } else {
                EXIT_PROPERTY
            }
        }
    }
}

pub fn cmd_kl(cfg: &KlConfig, out_dir: &Path, seed_override: Option<u64>) -> i32 {
    match cfg {
        KlConfig::Counterexample { n_list, eps } => {
            if n_list.is_empty() {
                return fail_config("n_list must be nonempty");
            }
            let rows = match counterexample_report(n_list, *eps) {
                Ok(rows) => rows,
                Err(KlError::CounterexampleMismatch { detail }) => {
                    eprintln!("property failure: {detail}");
                    return EXIT_PROPERTY;
                }
                Err(e) => return fail_runtime(e),
            };
            let mut csv = Csv::new(&["n", "eps", "dkl_exact", "dkl_closed_form", "l1"]);
            for row in &rows {
                csv.row([
                    row.n.to_string(),
                    num(row.eps),
                    num(row.dkl_exact),
                    num(row.dkl_closed_form),
                    num(row.l1),
                ]);
            }
            if write_atomic(&out_dir.join("kl_counterexample.csv"), &csv.finish()).is_err() {
                return fail_runtime("cannot write kl_counterexample.csv");
            }
            println!(
                "kl counterexample: {} rows; divergence {} -> {} while l1 {} -> {}",
                rows.len(),
                num(rows.first().unwrap().dkl_exact),
                num(rows.last().unwrap().dkl_exact),
                num(rows.first().unwrap().l1),
                num(rows.last().unwrap().l1),
            );
            EXIT_OK
        }
        KlConfig::Borwein { trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed_override.or(*seed).unwrap_or(7));
            let mut csv = Csv::new(&["trial", "lhs", "rhs", "dkl", "holds"]);
            let mut any_fail = false;
            for trial in 0..*trials {
                let z = random_positive_step(&mut rng);
                let y = random_positive_step(&mut rng);
                let rep = match borwein_check(&z, &y) {
                    Ok(r) => r,
                    Err(e) => return fail_runtime(e),
                };
                if !rep.holds {
                    any_fail = true;
                }
                csv.row([
                    trial.to_string(),
                    num(rep.lhs),
                    num(rep.rhs),
                    num(rep.dkl),
                    rep.holds.to_string(),
                ]);
            }
            if write_atomic(&out_dir.join("kl_borwein.csv"), &csv.finish()).is_err() {
                return fail_runtime("cannot write kl_borwein.csv");
            }
            println!("kl borwein: {trials} trials, all_hold={}", !any_fail);
            if any_fail {
                EXIT_PROPERTY
            } else {
                EXIT_OK
            }
        }
        KlConfig::Rho2Probe { family, length, tol } => {
            let lim = StepFn::constant(1.0);
            let seq: Vec<StepFn> = match family {
                FamilySpec::Shrinking => (1..=*length as i32)
                    .map(|n| StepFn::constant(1.0 + 2f64.powi(-n)))
                    .collect(),
                FamilySpec::Spike => match (3..3 + *length as u32)
                    .map(|k| counterexample_sequence(1u64 << k, 1.0))
                    .collect::<Result<Vec<_>, _>>()
                {
                    Ok(v) => v,
                    Err(e) => return fail_config(e),
                },
            };
            let z_bank = [StepFn::constant(2.0), StepFn::constant(0.5)];
            let rep = match rho2_kl_equivalence_probe(&lim, &seq, &z_bank, tol.unwrap_or(DEFAULT_TOL)) {
                Ok(r) => r,
                Err(e) => return fail_runtime(e),
            };
            let mut csv = Csv::new(&["n", "divergence", "max_pairing"]);
            for (i, d) in rep.divergence.trend.iter().enumerate() {
                let max_pairing = rep
                    .pairings
                    .iter()
                    .map(|p| p.trend[i])
                    .fold(0.0f64, f64::max);
                csv.row([(i + 1).to_string(), num(*d), num(max_pairing)]);
            }
            if write_atomic(&out_dir.join("kl_rho2probe.csv"), &csv.finish()).is_err() {
                return fail_runtime("cannot write kl_rho2probe.csv");
            }
            println!(
                "kl rho2probe: divergence_converged={} vacuous={} implication_holds={}",
                rep.divergence.converged, rep.vacuous, rep.implication_holds
            );
            if rep.implication_holds {
                EXIT_OK
            } else {
                EXIT_PROPERTY
            }
        }
    }
}

fn random_positive_step<R: Rng>(rng: &mut R) -> StepFn {
    let cells = rng.gen_range(1..6usize);
    let mut bps = vec![0.0];
    for _ in 0..cells - 1 {
        bps.push(rng.gen_range(0.01..0.99));
    }
    bps.push(1.0);
    bps.sort_unstable_by(f64::total_cmp);
    bps.dedup();
    let values = (0..bps.len() - 1).map(|_| rng.gen_range(0.05..5.0)).collect();
    StepFn::nonnegative(bps, values).expect("generated step function is valid")
}
