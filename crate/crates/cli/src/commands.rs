use crate::config::{CommandKind, Config, XiChoice};
use crate::error::CliError;
use crate::manifest::Manifest;
use crate::svg::{line_plot, Series};
use crate::Log;
use mqs_core::analysis::{
    classify_regime, compare_trajectories, fit_damped_sine, DampedSineFit, Regime,
    RegimeClassification,
};
use mqs_core::bath::{
    discretize_ohmic, effective_frequency_squared, memory_kernel_continuum, memory_kernel_discrete,
    BathRealization, SystemParams,
};
use mqs_core::dynamics::{
    analytic_trajectory, classical_noise, integrate_damped_oscillator, integrate_full_hamiltonian,
    integrate_gle, GleNoise, LangevinParams, MemoryKernel, Method, Trajectory,
};
use mqs_core::io::{
    format_decimal, read_trajectory_csv, write_bath_csv, write_kernel_csv, write_modes_csv,
    write_report_csv, write_samples_csv, write_trajectory_csv, KernelRow,
};
use mqs_core::modes::{build_ground_state, sample_ground_state_seeded, GroundState, PhasePoint};
use mqs_core::potentials::{bohmian_coefficients_unchecked, PotentialsError, XiRule};
use mqs_core::stats::{sample_covariance, MeanEstimate};
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Svg,
    Both,
}

impl Format {
    fn csv(self) -> bool {
        self != Format::Svg
    }

    fn svg(self) -> bool {
        self != Format::Csv
    }
}

pub struct Common<'a> {
    pub out_dir: &'a Path,
    pub format: Format,
    pub log: &'a Log,
}

type Report = Vec<(String, String)>;

fn metric(report: &mut Report, key: impl Into<String>, value: f64) {
    report.push((key.into(), format_decimal(value)));
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    let path = dir.join(name);
    File::create(&path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn prepare_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

fn write_manifest(common: &Common<'_>, manifest: &Manifest<'_>) -> Result<(), CliError> {
    prepare_dir(common.out_dir)?;
    let path = manifest.write(common.out_dir)?;
    common.log.info(&format!("wrote {}", path.display()));
    Ok(())
}

fn build_bath(cfg: &Config) -> Result<(SystemParams, BathRealization), CliError> {
    let params = cfg.system_params()?;
    let bath = discretize_ohmic(&cfg.bath_spec())?;
    Ok((params, bath))
}

/// The Bohmian frequency squared under the configured rule.
struct XiChoiceResult {
    rule: XiRule,
    xi_sq: f64,
    exact_xi_sq: f64,
}

fn choose_xi(
    cfg: &Config,
    gs: &GroundState,
    bath: &BathRealization,
    regime: Regime,
) -> XiChoiceResult {
    let rule = match cfg.xi_rule {
        XiChoice::Rule(r) => r,
        XiChoice::Auto if regime == Regime::Regime1 => XiRule::BathDominated,
        XiChoice::Auto => XiRule::Exact,
    };
    let coeffs = bohmian_coefficients_unchecked(gs, bath);
    XiChoiceResult {
        rule,
        xi_sq: rule.xi_squared(&coeffs, bath),
        exact_xi_sq: coeffs.xi_sq,
    }
}

fn require_positive_xi(xi: &XiChoiceResult) -> Result<f64, CliError> {
    if xi.xi_sq > 0.0 {
        Ok(xi.xi_sq.sqrt())
    } else {
        Err(
            CliError::from(PotentialsError::NegativeXiSq { xi_sq: xi.xi_sq })
                .context(&format!("xi rule {}", xi.rule.as_str())),
        )
    }
}

fn derived_basics(
    params: &SystemParams,
    bath: &BathRealization,
    regime: &RegimeClassification,
) -> Report {
    let mut d = Report::new();
    metric(&mut d, "sum_gamma2_omega2", bath.total_weight());
    metric(
        &mut d,
        "omega_sq",
        effective_frequency_squared(params, bath),
    );
    d.push(("regime".into(), regime.regime.as_str().into()));
    metric(&mut d, "regime_ratio", regime.ratio);
    d
}

fn fit_metrics(report: &mut Report, prefix: &str, fit: &Result<DampedSineFit, CliError>) {
    match fit {
        Ok(f) => {
            metric(report, format!("{prefix}_amplitude"), f.amplitude);
            metric(report, format!("{prefix}_decay_rate"), f.decay_rate);
            metric(report, format!("{prefix}_frequency"), f.frequency);
            metric(report, format!("{prefix}_phase"), f.phase);
            metric(report, format!("{prefix}_residual_rms"), f.residual_rms);
        }
        Err(e) => report.push((format!("{prefix}_fit"), e.to_string())),
    }
}

fn report_text(title: &str, report: &Report) -> String {
    let width = report.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut s = format!("{title}\n");
    for (k, v) in report {
        s.push_str(&format!("  {k:<width$}  {v}\n"));
    }
    s
}

fn emit_report(
    common: &Common<'_>,
    name: &str,
    title: &str,
    report: &Report,
) -> Result<(), CliError> {
    write_report_csv(create(common.out_dir, &format!("{name}.csv"))?, report)?;
    let text = report_text(title, report);
    write_text(common.out_dir, &format!("{name}.txt"), &text)?;
    print!("{text}");
    Ok(())
}

// ---- bath ----

pub fn bath(cfg: &Config, common: &Common<'_>) -> Result<(), CliError> {
    let (params, bath) = build_bath(cfg)?;
    let gs = build_ground_state(&params, &bath)?;
    let regime = classify_regime(cfg.omega0, cfg.omega_c);
    let xi = choose_xi(cfg, &gs, &bath, regime.regime);
    let mut derived = derived_basics(&params, &bath, &regime);
    metric(&mut derived, "xi_sq_exact", xi.exact_xi_sq);
    metric(&mut derived, "xi_sq", xi.xi_sq);
    derived.push(("xi_rule".into(), xi.rule.as_str().into()));

    let manifest = Manifest {
        command: CommandKind::Bath.as_str(),
        config: cfg,
        options: vec![],
        outputs: vec!["bath.csv".into(), "modes.csv".into()],
        derived: derived.clone(),
    };
    write_manifest(common, &manifest)?;
    write_bath_csv(create(common.out_dir, "bath.csv")?, &bath)?;
    write_modes_csv(create(common.out_dir, "modes.csv")?, &gs)?;
    common.log.info("wrote bath.csv, modes.csv");
    print!("{}", report_text("bath", &derived));
    Ok(())
}

// ---- kernel ----

pub fn kernel(cfg: &Config, common: &Common<'_>) -> Result<(), CliError> {
    let (_, bath) = build_bath(cfg)?;
    let steps = (cfg.t_end / cfg.dt).round() as usize;
    let rows: Vec<KernelRow> = (0..=steps)
        .map(|k| {
            let t = k as f64 * cfg.dt;
            KernelRow {
                t,
                discrete: memory_kernel_discrete(&bath, t),
                continuum: memory_kernel_continuum(cfg.lambda_q_prime, cfg.omega_c, t),
            }
        })
        .collect();
    let mut outputs = vec![];
    if common.format.csv() {
        outputs.push("kernel.csv".to_string());
    }
    if common.format.svg() {
        outputs.push("kernel.svg".to_string());
    }
    let mut derived = Report::new();
    metric(&mut derived, "kernel_discrete_t0", rows[0].discrete);
    metric(&mut derived, "kernel_continuum_t0", rows[0].continuum);
    let manifest = Manifest {
        command: CommandKind::Kernel.as_str(),
        config: cfg,
        options: vec![],
        outputs,
        derived,
    };
    write_manifest(common, &manifest)?;
    if common.format.csv() {
        write_kernel_csv(create(common.out_dir, "kernel.csv")?, &rows)?;
        common.log.info("wrote kernel.csv");
    }
    if common.format.svg() {
        let t: Vec<f64> = rows.iter().map(|r| r.t).collect();
        let d: Vec<f64> = rows.iter().map(|r| r.discrete).collect();
        let c: Vec<f64> = rows.iter().map(|r| r.continuum).collect();
        let svg = line_plot(
            "memory kernel",
            "t",
            "T(t)",
            &[
                Series {
                    label: "discrete",
                    x: &t,
                    y: &d,
                },
                Series {
                    label: "continuum",
                    x: &t,
                    y: &c,
                },
            ],
        );
        write_text(common.out_dir, "kernel.svg", &svg)?;
        common.log.info("wrote kernel.svg");
    }
    Ok(())
}

// ---- sample ----

pub struct SampleOptions {
    pub dump_samples: bool,
    pub with_momenta: bool,
}

/// Largest covariance deviation in units of `√(C_ii C_jj)`.
fn normalized_covariance_error(expected: &[Vec<f64>], empirical: &[Vec<f64>]) -> f64 {
    let n = expected.len();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let scale = (expected[i][i] * expected[j][j]).sqrt();
            worst = worst.max((empirical[i][j] - expected[i][j]).abs() / scale);
        }
    }
    worst
}

pub fn sample(cfg: &Config, opts: &SampleOptions, common: &Common<'_>) -> Result<(), CliError> {
    let (params, bath) = build_bath(cfg)?;
    let gs = build_ground_state(&params, &bath)?;
    let regime = classify_regime(cfg.omega0, cfg.omega_c);

    let mut outputs = vec!["report.csv".to_string(), "report.txt".to_string()];
    if opts.dump_samples {
        outputs.push("samples.csv".into());
    }
    let manifest = Manifest {
        command: CommandKind::Sample.as_str(),
        config: cfg,
        options: vec![
            ("dump_samples".into(), opts.dump_samples.to_string()),
            ("with_momenta".into(), opts.with_momenta.to_string()),
        ],
        outputs,
        derived: derived_basics(&params, &bath, &regime),
    };
    write_manifest(common, &manifest)?;

    let samples = sample_ground_state_seeded(&gs, cfg.seed, cfg.sample_count)?;
    let n = bath.len();
    let mut report = Report::new();
    report.push(("sample_count".into(), cfg.sample_count.to_string()));
    report.push(("n_modes".into(), n.to_string()));

    // coordinate and momentum means
    let column = |f: &dyn Fn(&PhasePoint) -> f64| -> MeanEstimate {
        MeanEstimate::from_values(&samples.iter().map(f).collect::<Vec<_>>())
    };
    let mut max_z = column(&|s| s.q).z_score(0.0);
    max_z = max_z.max(column(&|s| s.p).z_score(0.0));
    for a in 0..n {
        max_z = max_z.max(column(&|s| s.x[a]).z_score(0.0));
        max_z = max_z.max(column(&|s| s.p_bath[a]).z_score(0.0));
    }
    let means_ok = max_z < 4.0;
    metric(&mut report, "max_mean_z_score", max_z);
    report.push(("means_within_4_stderr".into(), pass(means_ok).into()));

    // position covariance against (ħ/2) M⁻¹
    let inv = gs
        .precision_core()
        .clone()
        .try_inverse()
        .ok_or_else(|| CliError::Numeric("precision matrix is singular".into()))?;
    let expected: Vec<Vec<f64>> = (0..=n)
        .map(|i| (0..=n).map(|j| 0.5 * cfg.hbar * inv[(i, j)]).collect())
        .collect();
    let rows: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| std::iter::once(s.q).chain(s.x.iter().copied()).collect())
        .collect();
    let cov_err = normalized_covariance_error(&expected, &sample_covariance(&rows));
    let cov_ok = cov_err <= 0.05;
    metric(&mut report, "covariance_max_normalized_error", cov_err);
    report.push(("covariance_within_5_percent".into(), pass(cov_ok).into()));

    let coeffs = bohmian_coefficients_unchecked(&gs, &bath);
    let eta = column(&|s| coeffs.eta(&s.x));
    metric(&mut report, "eta_mean", eta.mean);
    metric(&mut report, "eta_stderr", eta.stderr);
    let mut noise_ok = eta.z_score(0.0) < 4.0;
    for &t in &cfg.probe_times {
        let r = column(&|s| classical_noise(&s.x, &s.p_bath, s.q, &bath, t));
        metric(&mut report, format!("noise_mean_t{t}"), r.mean);
        metric(&mut report, format!("noise_stderr_t{t}"), r.stderr);
        noise_ok &= r.z_score(0.0) < 4.0;
    }
    report.push((
        "eta_and_noise_within_4_stderr".into(),
        pass(noise_ok).into(),
    ));
    report.push((
        "verdict".into(),
        pass(means_ok && cov_ok && noise_ok).into(),
    ));

    emit_report(common, "report", "ground-state sampling", &report)?;
    if opts.dump_samples {
        write_samples_csv(
            create(common.out_dir, "samples.csv")?,
            &samples,
            opts.with_momenta,
        )?;
        common.log.info("wrote samples.csv");
    }
    Ok(())
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

// ---- simulate ----

pub const SIMULATE_METHODS: [Method; 4] = [
    Method::Full,
    Method::Gle,
    Method::MarkovQuantum,
    Method::Bohmian,
];

pub fn parse_methods(list: Option<&[String]>) -> Result<Vec<Method>, CliError> {
    let Some(list) = list else {
        return Ok(SIMULATE_METHODS.to_vec());
    };
    let mut methods = Vec::new();
    for name in list.iter().map(|s| s.trim()).filter(|s| !s.is_empty()) {
        let m: Method = name.parse().map_err(CliError::Config)?;
        if !SIMULATE_METHODS.contains(&m) {
            return Err(CliError::Config(format!(
                "method `{name}` cannot be simulated (choose from full, gle, markov_quantum, bohmian)"
            )));
        }
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    if methods.is_empty() {
        return Err(CliError::Config("empty methods list".into()));
    }
    Ok(methods)
}

fn trajectory_file(m: Method) -> String {
    format!("trajectory_{}.csv", m.as_str())
}

pub fn simulate(cfg: &Config, methods: &[Method], common: &Common<'_>) -> Result<(), CliError> {
    let (params, bath) = build_bath(cfg)?;
    let gs = build_ground_state(&params, &bath)?;
    let regime = classify_regime(cfg.omega0, cfg.omega_c);
    let xi = choose_xi(cfg, &gs, &bath, regime.regime);

    let mut derived = derived_basics(&params, &bath, &regime);
    metric(&mut derived, "xi_sq_exact", xi.exact_xi_sq);
    metric(&mut derived, "xi_sq", xi.xi_sq);
    derived.push(("xi_rule".into(), xi.rule.as_str().into()));

    let mut outputs: Vec<String> = vec![];
    if common.format.csv() {
        outputs.extend(methods.iter().map(|&m| trajectory_file(m)));
        outputs.push("summary.csv".into());
        outputs.push("summary.txt".into());
    }
    if common.format.svg() {
        outputs.push("simulate.svg".into());
    }
    let method_list = methods
        .iter()
        .map(|m| m.as_str())
        .collect::<Vec<_>>()
        .join(",");
    let manifest = Manifest {
        command: CommandKind::Simulate.as_str(),
        config: cfg,
        options: vec![("methods".into(), method_list)],
        outputs,
        derived,
    };
    write_manifest(common, &manifest)?;

    // one ground-state draw supplies the bath; the system starts at (q0, q̇0)
    let mut initial = sample_ground_state_seeded(&gs, cfg.seed, 1)?.remove(0);
    initial.q = cfg.q0;
    initial.p = cfg.qdot0;

    let mut runs: Vec<Trajectory> = Vec::new();
    for &m in methods {
        let ctx = |e: CliError| e.context(&format!("method {}", m.as_str()));
        let traj = match m {
            Method::Full => {
                integrate_full_hamiltonian(&initial, &params, &bath, cfg.dt, cfg.t_end)
                    .map_err(|e| ctx(e.into()))?
                    .trajectory
            }
            Method::Gle => integrate_gle(
                cfg.q0,
                cfg.qdot0,
                cfg.omega0,
                MemoryKernel::Discrete(&bath),
                Some(GleNoise::from_point(&bath, &initial)),
                cfg.dt,
                cfg.t_end,
            )
            .map_err(|e| ctx(e.into()))?,
            Method::MarkovQuantum => integrate_damped_oscillator(
                cfg.omega0,
                cfg.lambda_q,
                cfg.q0,
                cfg.qdot0,
                cfg.dt,
                cfg.t_end,
                Method::MarkovQuantum,
            )
            .map_err(|e| ctx(e.into()))?,
            Method::Bohmian => {
                let xi_value = require_positive_xi(&xi).map_err(ctx)?;
                integrate_damped_oscillator(
                    xi_value,
                    cfg.lambda_b,
                    cfg.q0,
                    cfg.qdot0,
                    cfg.dt,
                    cfg.t_end,
                    Method::Bohmian,
                )
                .map_err(|e| ctx(e.into()))?
            }
            Method::Merged => unreachable!("filtered by parse_methods"),
        };
        common.log.info(&format!("integrated {}", m.as_str()));
        runs.push(traj);
    }

    let mut summary = Report::new();
    for tr in &runs {
        let fit = fit_damped_sine(tr).map_err(CliError::from);
        fit_metrics(&mut summary, tr.label.as_str(), &fit);
    }
    let find = |m: Method| runs.iter().find(|t| t.label == m);
    if let (Some(full), Some(gle)) = (find(Method::Full), find(Method::Gle)) {
        let c = compare_trajectories(full, gle)?;
        metric(&mut summary, "full_vs_gle_relative_l2", c.relative_l2);
        metric(&mut summary, "full_vs_gle_max_abs_diff", c.max_abs_diff);
    }
    if let Some(mq) = find(Method::MarkovQuantum) {
        let closed = LangevinParams::from_initial(cfg.omega0, cfg.lambda_q, cfg.q0, cfg.qdot0)?;
        let exact = analytic_trajectory(&closed, cfg.dt, cfg.t_end, Method::MarkovQuantum)?;
        let worst =
            mq.q.iter()
                .zip(&exact.q)
                .fold(0.0f64, |w, (a, b)| w.max((a - b).abs()));
        metric(
            &mut summary,
            "markov_quantum_vs_closed_form_max_abs_diff",
            worst,
        );
    }

    if common.format.csv() {
        for tr in &runs {
            write_trajectory_csv(
                create(common.out_dir, &trajectory_file(tr.label))?,
                tr,
                Some(cfg.seed),
            )?;
        }
        common
            .log
            .info(&format!("wrote {} trajectories", runs.len()));
        emit_report(common, "summary", "simulation summary", &summary)?;
    } else {
        print!("{}", report_text("simulation summary", &summary));
    }
    if common.format.svg() {
        let times: Vec<Vec<f64>> = runs.iter().map(|t| t.times().collect()).collect();
        let series: Vec<Series<'_>> = runs
            .iter()
            .zip(&times)
            .map(|(tr, t)| Series {
                label: tr.label.as_str(),
                x: t,
                y: &tr.q,
            })
            .collect();
        write_text(
            common.out_dir,
            "simulate.svg",
            &line_plot("q(t)", "t", "q", &series),
        )?;
        common.log.info("wrote simulate.svg");
    }
    Ok(())
}

// ---- compare ----

pub fn compare(cfg: &Config, a: &Path, b: &Path, common: &Common<'_>) -> Result<(), CliError> {
    let load = |p: &Path| -> Result<Trajectory, CliError> {
        let f = File::open(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
        Ok(read_trajectory_csv(f)
            .map_err(|e| CliError::from(e).context(&p.display().to_string()))?
            .0)
    };
    let (ta, tb) = (load(a)?, load(b)?);
    let manifest = Manifest {
        command: CommandKind::Compare.as_str(),
        config: cfg,
        options: vec![
            ("a".into(), a.display().to_string()),
            ("b".into(), b.display().to_string()),
        ],
        outputs: vec!["report.csv".into(), "report.txt".into()],
        derived: vec![],
    };
    write_manifest(common, &manifest)?;

    let c = compare_trajectories(&ta, &tb).map_err(|e| CliError::Config(e.to_string()))?;
    let mut report = Report::new();
    report.push(("a".into(), ta.label.as_str().into()));
    report.push(("b".into(), tb.label.as_str().into()));
    metric(&mut report, "relative_l2", c.relative_l2);
    metric(&mut report, "max_abs_diff", c.max_abs_diff);
    let ratio = |r: Option<f64>| r.map_or_else(|| "n/a".to_string(), format_decimal);
    report.push(("frequency_ratio".into(), ratio(c.frequency_ratio)));
    report.push(("decay_ratio".into(), ratio(c.decay_ratio)));
    for (name, fit) in [("a", &c.fit_a), ("b", &c.fit_b)] {
        let fit = fit.ok_or_else(|| CliError::Numeric("no damped-sine fit".into()));
        fit_metrics(&mut report, name, &fit);
    }
    emit_report(common, "report", "trajectory comparison", &report)
}

// ---- figure 1 ----

pub fn figure1(cfg: &Config, common: &Common<'_>) -> Result<(), CliError> {
    let (params, bath) = build_bath(cfg)?;
    let gs = build_ground_state(&params, &bath)?;
    let regime = classify_regime(cfg.omega0, cfg.omega_c);
    let xi = choose_xi(cfg, &gs, &bath, regime.regime);
    let xi_value = require_positive_xi(&xi)?;

    let quantum = LangevinParams::new(cfg.omega0, cfg.lambda_q, cfg.amplitude_q, cfg.phase_q)?;
    let bohmian = LangevinParams::new(xi_value, cfg.lambda_b, cfg.amplitude_b, cfg.phase_b)?;

    let mut derived = derived_basics(&params, &bath, &regime);
    metric(&mut derived, "xi_sq_exact", xi.exact_xi_sq);
    metric(&mut derived, "xi_sq", xi.xi_sq);
    derived.push(("xi_rule".into(), xi.rule.as_str().into()));
    let mut outputs = vec![];
    if common.format.csv() {
        outputs.extend([
            "figure1_quantum.csv".to_string(),
            "figure1_bohmian.csv".to_string(),
            "figure1_report.csv".to_string(),
            "figure1_report.txt".to_string(),
        ]);
    }
    if common.format.svg() {
        outputs.push("figure1.svg".into());
    }
    let manifest = Manifest {
        command: CommandKind::Figure1.as_str(),
        config: cfg,
        options: vec![],
        outputs,
        derived,
    };
    write_manifest(common, &manifest)?;

    let q_q = analytic_trajectory(&quantum, cfg.dt, cfg.t_end, Method::MarkovQuantum)?;
    let q_b = analytic_trajectory(&bohmian, cfg.dt, cfg.t_end, Method::Bohmian)?;

    // fits use their own, longer window so that the slower curve shows
    // enough extrema
    let fit_q = fit_damped_sine(&analytic_trajectory(
        &quantum,
        cfg.dt,
        cfg.fit_t_end,
        Method::MarkovQuantum,
    )?)
    .map_err(CliError::from);
    let fit_b = fit_damped_sine(&analytic_trajectory(
        &bohmian,
        cfg.dt,
        cfg.fit_t_end,
        Method::Bohmian,
    )?)
    .map_err(CliError::from);

    let mut report = Report::new();
    metric(&mut report, "xi", xi_value);
    report.push(("xi_rule".into(), xi.rule.as_str().into()));
    report.push(("regime".into(), regime.regime.as_str().into()));
    metric(&mut report, "regime_ratio", regime.ratio);
    fit_metrics(&mut report, "quantum", &fit_q);
    fit_metrics(&mut report, "bohmian", &fit_b);
    if let (Ok(fq), Ok(fb)) = (&fit_q, &fit_b) {
        metric(&mut report, "frequency_ratio", fb.frequency / fq.frequency);
        metric(&mut report, "decay_ratio", fb.decay_rate / fq.decay_rate);
    }

    if common.format.csv() {
        write_trajectory_csv(create(common.out_dir, "figure1_quantum.csv")?, &q_q, None)?;
        write_trajectory_csv(create(common.out_dir, "figure1_bohmian.csv")?, &q_b, None)?;
        common
            .log
            .info("wrote figure1_quantum.csv, figure1_bohmian.csv");
        emit_report(common, "figure1_report", "figure 1", &report)?;
    } else {
        print!("{}", report_text("figure 1", &report));
    }
    if common.format.svg() {
        let t: Vec<f64> = q_q.times().collect();
        let svg = line_plot(
            "quantum and Bohmian damped oscillation",
            "t",
            "q(t)",
            &[
                Series {
                    label: "quantum",
                    x: &t,
                    y: &q_q.q,
                },
                Series {
                    label: "bohmian",
                    x: &t,
                    y: &q_b.q,
                },
            ],
        );
        write_text(common.out_dir, "figure1.svg", &svg)?;
        common.log.info("wrote figure1.svg");
    }
    fit_q?;
    fit_b?;
    Ok(())
}
