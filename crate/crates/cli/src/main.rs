//! `dkp`: tables, branch solutions, sweeps, sampled eigenfunctions and
//! verification reports for the scalar DKP bound states.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dkp_core::algebra::{
    curved_trilinear_defect, flat_trilinear_failures, geometry_cross_check, spin_connections,
    spin_connections_commutator_form, tetrad, ALGEBRA_ETA,
};
use dkp_core::ansatz::{enumerate, solve, BranchOutcome, Policy};
use dkp_core::error::Error;
use dkp_core::model::{uniform_grid, BranchSelection, Normalization, PhysicalParams, Regime};
use dkp_core::radial::{
    operator_equivalence_report, OperatorVariant, RadialOperator, EQUIVALENCE_TOLERANCE,
};
use dkp_core::spectrum::{
    decompose_residual, default_grid, eval_wavefunction, ode_residual, ode_residual_of,
    regime_operator, reproduce_table, sweep_energy, AnsatzProfile, SweepVar, DEFAULT_GRID_POINTS,
};
use serde::Serialize;
use serde_json::json;

use output::{csv_text, emit, full, opt, sig6, svg_plot};

const SCHEMA_VERSION: u32 = 1;

const EXIT_FAILURE: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_NO_PHYSICAL: u8 = 3;
const EXIT_VERIFY: u8 = 4;

#[derive(Parser)]
#[command(
    name = "dkp",
    version,
    about = "Scalar DKP bound states in a rotating cosmic-string frame"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Flat and curved beta-matrix algebra, tetrad and spin-connection checks.
    AlgebraCheck {
        #[command(flatten)]
        params: ParamArgs,
        /// Radius at which the curved quantities are evaluated.
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Solve all eight branches for one state and regime.
    Solve {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = State::N0)]
        state: State,
        #[arg(long, value_enum, default_value_t = RegimeArg::Small)]
        regime: RegimeArg,
        #[arg(long, value_enum, default_value_t = PolicyArg::Preset)]
        policy: PolicyArg,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Recompute one of the three energy tables against the printed values.
    Table {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        which: u8,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Energies of one branch across alpha or omega*alpha.
    Sweep {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = SweepArg::Alpha)]
        var: SweepArg,
        #[arg(long, default_value_t = 0.05)]
        from: f64,
        #[arg(long, default_value_t = 1.0)]
        to: f64,
        #[arg(long, default_value_t = 20)]
        points: usize,
        /// Frame rotations, one block of rows each.
        #[arg(long, value_delimiter = ',', default_value = "0,0.01")]
        omegas: Vec<f64>,
        #[arg(long, value_enum, default_value_t = State::N0)]
        state: State,
        #[arg(long, value_enum, default_value_t = RegimeArg::Small)]
        regime: RegimeArg,
        /// Branch id such as "-+3/2".
        #[arg(long, default_value = "-+3/2", allow_hyphen_values = true)]
        branch: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Sample the radial factor of one branch.
    Wavefunction {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = State::N0)]
        state: State,
        #[arg(long, value_enum, default_value_t = RegimeArg::Small)]
        regime: RegimeArg,
        #[arg(long, default_value = "-+3/2", allow_hyphen_values = true)]
        branch: String,
        /// Several deficit parameters on one grid; overrides --alpha.
        #[arg(long, value_delimiter = ',')]
        alphas: Vec<f64>,
        #[arg(long)]
        lo: Option<f64>,
        #[arg(long)]
        hi: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        points: usize,
        #[arg(long, value_enum, default_value_t = NormArg::Max1)]
        normalization: NormArg,
        /// Also write a polyline plot (always peak-normalized).
        #[arg(long)]
        svg: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Derivation-equivalence and residual oracles.
    Verify {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Trial energy for the operator comparison.
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        energy: f64,
        #[command(flatten)]
        out: OutArgs,
    },
}

/// Physical parameters; defaults are the table parameters at alpha = 0.5.
#[derive(Args, Clone, Copy)]
struct ParamArgs {
    /// Rest mass M.
    #[arg(long = "M", default_value_t = 1.0)]
    mass: f64,
    /// Slope of the linear scalar potential.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    q: f64,
    /// DKP oscillator frequency.
    #[arg(long, default_value_t = 0.0)]
    varpi: f64,
    /// Frame rotation.
    #[arg(long, default_value_t = 0.01)]
    omega: f64,
    /// Deficit parameter in (0, 1].
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Azimuthal quantum number.
    #[arg(long = "m", default_value_t = 1, allow_hyphen_values = true)]
    m: i32,
    /// Longitudinal momentum.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    k: f64,
}

impl ParamArgs {
    fn params(&self) -> PhysicalParams {
        PhysicalParams {
            mass: self.mass,
            q: self.q,
            varpi: self.varpi,
            omega: self.omega,
            alpha: self.alpha,
            m: self.m,
            k: self.k,
        }
    }
}

#[derive(Args, Clone)]
struct OutArgs {
    /// Write files here instead of printing to stdout.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

impl OutArgs {
    fn dir(&self) -> Option<&Path> {
        self.out_dir.as_deref()
    }
}

#[derive(ValueEnum, Clone, Copy)]
enum State {
    N0,
    N1,
}

impl State {
    fn n(self) -> u8 {
        match self {
            State::N0 => 0,
            State::N1 => 1,
        }
    }
}

#[derive(ValueEnum, Clone, Copy)]
enum RegimeArg {
    Osc,
    Arbitrary,
    Small,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::Osc => Regime::Oscillator,
            RegimeArg::Arbitrary => Regime::Arbitrary,
            RegimeArg::Small => Regime::Small,
        }
    }
}

#[derive(ValueEnum, Clone, Copy)]
enum PolicyArg {
    Preset,
    FirstPrinciples,
}

impl From<PolicyArg> for Policy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Preset => Policy::Preset,
            PolicyArg::FirstPrinciples => Policy::FirstPrinciples,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, PartialEq)]
enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy)]
enum SweepArg {
    Alpha,
    OmegaAlpha,
}

#[derive(ValueEnum, Clone, Copy)]
enum NormArg {
    Raw,
    Max1,
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NoPhysicalBranch { .. } => EXIT_NO_PHYSICAL,
            Error::InvalidParams(_)
            | Error::RhoGeOne { .. }
            | Error::MassZeroUnsupported
            | Error::QZeroUnsupported
            | Error::DegenerateBranch
            | Error::VariantMismatch(_)
            | Error::InvalidGrid(_)
            | Error::PotentialZeroCrossing { .. }
            | Error::PotentialNonpositive { .. } => EXIT_INVALID,
            Error::Alpha11Singular | Error::ComplexEnergy { .. } => EXIT_FAILURE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_FAILURE,
            message: e.to_string(),
        }
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure {
            code: EXIT_FAILURE,
            message: e.to_string(),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure {
            code: EXIT_FAILURE,
            message: e.to_string(),
        }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INVALID,
        message: message.into(),
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("dkp: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::AlgebraCheck { params, r, out } => algebra_check(&checked(params)?, r, &out),
        Command::Solve {
            params,
            state,
            regime,
            policy,
            format,
            out,
        } => solve_cmd(
            &checked(params)?,
            state.n(),
            regime.into(),
            policy.into(),
            format,
            &out,
        ),
        Command::Table { which, out } => table_cmd(which, &out),
        Command::Sweep {
            params,
            var,
            from,
            to,
            points,
            omegas,
            state,
            regime,
            branch,
            out,
        } => {
            let var = match var {
                SweepArg::Alpha => SweepVar::Alpha,
                SweepArg::OmegaAlpha => SweepVar::OmegaAlpha,
            };
            sweep_cmd(
                &params.params(),
                var,
                from,
                to,
                points,
                &omegas,
                state.n(),
                regime.into(),
                &branch,
                &out,
            )
        }
        Command::Wavefunction {
            params,
            state,
            regime,
            branch,
            alphas,
            lo,
            hi,
            points,
            normalization,
            svg,
            out,
        } => {
            let norm = match normalization {
                NormArg::Raw => Normalization::Raw,
                NormArg::Max1 => Normalization::Max1,
            };
            let request = WaveRequest {
                n: state.n(),
                regime: regime.into(),
                branch,
                lo,
                hi,
                points,
                norm,
                svg,
            };
            wavefunction_cmd(&checked(params)?, &alphas, &request, &out)
        }
        Command::Verify {
            params,
            seed,
            trials,
            energy,
            out,
        } => verify_cmd(&checked(params)?, seed, trials, energy, &out),
    }
}

fn checked(args: ParamArgs) -> Result<PhysicalParams, Failure> {
    let p = args.params();
    p.validate()?;
    Ok(p)
}

fn parse_branch(id: &str) -> Result<BranchSelection, Failure> {
    BranchSelection::parse(id)
        .ok_or_else(|| invalid(format!("unknown branch id {id:?}; expected e.g. \"-+3/2\"")))
}

fn write_json(out: &OutArgs, name: &str, doc: &serde_json::Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(doc)?;
    text.push('\n');
    emit(out.dir(), name, &text)?;
    Ok(())
}

fn algebra_check(p: &PhysicalParams, r: f64, out: &OutArgs) -> Outcome {
    const TOL: f64 = 1e-12;
    let flat = flat_trilinear_failures(ALGEBRA_ETA);
    let curved = curved_trilinear_defect(p, r)?;
    let metric = tetrad(p, r)?.metric_defect(p);
    let printed = spin_connections(p, r)?;
    let commutator = spin_connections_commutator_form(p, r)?;
    let commutator_dev = printed
        .as_array()
        .iter()
        .zip(commutator.as_array())
        .map(|(a, b)| (a - b).amax())
        .fold(0.0, f64::max);
    let static_dev =
        (p.omega > 0.0).then(|| (printed.gamma_phi - printed.gamma_t / p.omega).amax());
    let geometry = geometry_cross_check(p, r, 1e-9)?;

    let pass = flat.is_empty()
        && curved <= TOL
        && metric <= TOL
        && commutator_dev <= TOL
        && static_dev.is_none_or(|d| d <= 1e-14)
        && geometry.all_pass();
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "algebra-check",
        "params": p,
        "r": r,
        "flat_triples_checked": 64,
        "flat_failures": flat,
        "curved_trilinear_defect": curved,
        "tetrad_metric_defect": metric,
        "connection_commutator_deviation": commutator_dev,
        "gamma_phi_minus_gamma_t_over_omega": static_dev,
        "geometry": geometry,
        "tolerance": TOL,
        "pass": pass,
    });
    write_json(out, "algebra_check.json", &doc)?;
    Ok(if pass { 0 } else { EXIT_VERIFY })
}

fn solve_cmd(
    p: &PhysicalParams,
    n: u8,
    regime: Regime,
    policy: Policy,
    format: Format,
    out: &OutArgs,
) -> Outcome {
    let branches = enumerate(p, n, regime, policy)?;
    let physical = branches
        .iter()
        .filter_map(BranchOutcome::solution)
        .filter(|s| s.verdict.physical)
        .count();

    match format {
        Format::Json => {
            let entries: Vec<_> = branches.iter().map(branch_json).collect();
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "solve",
                "params": p,
                "omega_alpha": p.omega_alpha(),
                "state": format!("n{n}"),
                "regime": regime,
                "policy": policy,
                "physical_count": physical,
                "branches": entries,
            });
            write_json(out, "solve.json", &doc)?;
        }
        Format::Csv => {
            let names: Vec<&str> = branches
                .iter()
                .find_map(BranchOutcome::solution)
                .map(|s| s.residuals.iter().map(|r| r.name).collect())
                .unwrap_or_default();
            let mut header: Vec<String> = [
                "omega_alpha",
                "alpha",
                "branch_id",
                "b1",
                "b2",
                "b3",
                "b4",
                "alpha11",
                "kappa2",
                "e_plus",
                "e_minus",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect();
            header.extend(names.iter().map(|n| format!("res_{n}")));
            header.extend(["physical".into(), "reasons".into(), "error".into()]);
            let rows: Vec<Vec<String>> = branches
                .iter()
                .map(|o| {
                    let mut row = vec![full(p.omega_alpha()), full(p.alpha)];
                    match o {
                        BranchOutcome::Solved(s) => {
                            row.push(s.selection.id());
                            row.extend(s.b().map(full));
                            row.push(opt(s.alpha11, full));
                            row.push(full(s.kappa2));
                            row.push(opt(s.energies.map(|e| e.e_plus), full));
                            row.push(opt(s.energies.map(|e| e.e_minus), full));
                            row.extend(names.iter().map(|n| opt(s.residual(n), full)));
                            row.push(s.verdict.physical.to_string());
                            row.push(
                                s.verdict
                                    .reasons
                                    .iter()
                                    .map(|r| r.to_string())
                                    .collect::<Vec<_>>()
                                    .join(";"),
                            );
                            row.push(String::new());
                        }
                        BranchOutcome::Failed { branch, error } => {
                            row.push(branch.id());
                            row.extend(std::iter::repeat_n(String::new(), 8 + names.len()));
                            row.push("false".into());
                            row.push(String::new());
                            row.push(error.clone());
                        }
                    }
                    row
                })
                .collect();
            emit(out.dir(), "solve.csv", &csv_text(&header, &rows)?)?;
        }
    }
    if physical == 0 {
        eprintln!(
            "dkp: {}",
            Error::NoPhysicalBranch {
                policy: policy.to_string()
            }
        );
        return Ok(EXIT_NO_PHYSICAL);
    }
    Ok(0)
}

fn branch_json(o: &BranchOutcome) -> serde_json::Value {
    match o {
        BranchOutcome::Solved(s) => json!({
            "branch_id": s.selection.id(),
            "b1": s.b1,
            "b2": s.b2,
            "b3": s.b3,
            "b4": s.b4,
            "alpha11": s.alpha11,
            "kappa2": s.kappa2,
            "e_plus": s.energies.map(|e| e.e_plus),
            "e_minus": s.energies.map(|e| e.e_minus),
            "system": s.system,
            "residuals": s.residuals,
            "physical": s.verdict.physical,
            "reasons": s.verdict.reasons,
        }),
        BranchOutcome::Failed { branch, error } => json!({
            "branch_id": branch.id(),
            "error": error,
        }),
    }
}

fn table_cmd(which: u8, out: &OutArgs) -> Outcome {
    let rows = reproduce_table(which)?;
    let header: Vec<String> = [
        "table",
        "omega_alpha",
        "alpha",
        "branch_id",
        "alpha11",
        "printed_alpha11",
        "e_plus",
        "printed_e_plus",
        "e_minus",
        "printed_e_minus",
        "typo_flag",
        "max_deviation",
        "matches",
        "alpha11_full",
        "kappa2_full",
        "e_plus_full",
        "e_minus_full",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.table.to_string(),
                full(r.omega_alpha),
                sig6(r.alpha),
                r.branch_id.clone(),
                opt(r.alpha11, sig6),
                opt(r.printed_alpha11, full),
                sig6(r.e_plus),
                opt(r.printed_e_plus, full),
                sig6(r.e_minus),
                opt(r.printed_e_minus, full),
                r.typo_flag.to_string(),
                sig6(r.max_deviation),
                r.matches.to_string(),
                opt(r.alpha11, full),
                full(r.kappa2),
                full(r.e_plus),
                full(r.e_minus),
            ]
        })
        .collect();
    emit(
        out.dir(),
        &format!("table{which}.csv"),
        &csv_text(&header, &body)?,
    )?;
    Ok(if rows.iter().all(|r| r.matches) {
        0
    } else {
        EXIT_VERIFY
    })
}

#[allow(clippy::too_many_arguments)]
fn sweep_cmd(
    template: &PhysicalParams,
    var: SweepVar,
    from: f64,
    to: f64,
    points: usize,
    omegas: &[f64],
    n: u8,
    regime: Regime,
    branch: &str,
    out: &OutArgs,
) -> Outcome {
    if points == 0 || (points > 1 && from.partial_cmp(&to) != Some(std::cmp::Ordering::Less)) {
        return Err(invalid(format!(
            "empty sweep range {from}..{to} with {points} points"
        )));
    }
    let selection = parse_branch(branch)?;
    let grid = uniform_grid(from, to, points);
    let rows = sweep_energy(template, var, &grid, omegas, n, regime, selection);
    let var_name = match var {
        SweepVar::Alpha => "alpha",
        SweepVar::OmegaAlpha => "omega_alpha",
    };
    let header: Vec<String> = [
        var_name,
        "omega",
        "branch_id",
        "e_plus",
        "e_minus",
        "alpha11",
        "error",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let id = selection.id();
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                full(r.value),
                full(r.omega),
                id.clone(),
                opt(r.e_plus, full),
                opt(r.e_minus, full),
                opt(r.alpha11, full),
                r.error.clone().unwrap_or_default(),
            ]
        })
        .collect();
    emit(out.dir(), "sweep.csv", &csv_text(&header, &body)?)?;
    Ok(0)
}

struct WaveRequest {
    n: u8,
    regime: Regime,
    branch: String,
    lo: Option<f64>,
    hi: Option<f64>,
    points: usize,
    norm: Normalization,
    svg: Option<PathBuf>,
}

fn wavefunction_cmd(
    p: &PhysicalParams,
    alphas: &[f64],
    req: &WaveRequest,
    out: &OutArgs,
) -> Outcome {
    let selection = parse_branch(&req.branch)?;
    let alphas = if alphas.is_empty() {
        vec![p.alpha]
    } else {
        alphas.to_vec()
    };
    let mut solutions = Vec::with_capacity(alphas.len());
    for &a in &alphas {
        let pa = p.with_alpha(a);
        pa.validate()?;
        solutions.push((pa, solve(&pa, req.n, req.regime, selection)?));
    }
    let (p0, s0) = &solutions[0];
    let auto = default_grid(s0, p0, req.points.max(2));
    let lo = req.lo.unwrap_or(auto[0]);
    let hi = req.hi.unwrap_or(auto[auto.len() - 1]);
    if !(lo > 0.0 && hi > lo) {
        return Err(invalid(format!(
            "grid bounds must satisfy 0 < lo < hi, got {lo}..{hi}"
        )));
    }
    let grid = uniform_grid(lo, hi, req.points.max(2));

    let mut columns = Vec::with_capacity(solutions.len());
    let mut peak1 = Vec::with_capacity(solutions.len());
    for (pa, s) in &solutions {
        let sample = eval_wavefunction(s, pa, &grid, req.norm)?;
        peak1.push((
            format!("alpha={}", pa.alpha),
            sample.clone().normalized_max1().values,
        ));
        columns.push((pa.alpha, sample.values));
    }

    let mut header = vec!["r".to_string()];
    header.extend(columns.iter().map(|(a, _)| format!("R_alpha_{a}")));
    let body: Vec<Vec<String>> = grid
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let mut row = vec![full(r)];
            row.extend(columns.iter().map(|(_, v)| full(v[i])));
            row
        })
        .collect();
    emit(out.dir(), "wavefunction.csv", &csv_text(&header, &body)?)?;

    if let Some(path) = &req.svg {
        let title = format!(
            "R(r), n={}, branch {}, peak-normalized",
            req.n,
            selection.id()
        );
        if let Some(parent) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(path, svg_plot(&title, &grid, &peak1))?;
    }
    Ok(0)
}

#[derive(Serialize)]
struct OracleCase {
    q: f64,
    k: f64,
    max_abs: f64,
    pass: bool,
}

fn verify_cmd(p: &PhysicalParams, seed: u64, trials: usize, energy: f64, out: &OutArgs) -> Outcome {
    // The user's parameters, plus an oscillator case when none was asked for.
    let mut cases = vec![*p];
    if p.varpi == 0.0 {
        cases.push(p.with_varpi(0.3));
    }
    let mut reports = Vec::with_capacity(cases.len());
    for (i, c) in cases.iter().enumerate() {
        reports.push(operator_equivalence_report(
            c,
            energy,
            trials,
            seed.wrapping_add(i as u64),
        )?);
    }

    let mut oracle = Vec::new();
    for q in [0.5, 1.0, 2.0] {
        for k in [0.0, 1.0] {
            let pz = PhysicalParams {
                mass: 0.0,
                q,
                varpi: 0.0,
                omega: p.omega,
                alpha: p.alpha,
                m: 0,
                k,
            };
            let f = AnsatzProfile {
                b: [0.0, -q / 2.0, 0.5, -0.5],
                node: None,
                mass: 0.0,
                q,
            };
            let op = RadialOperator::with_kappa2(&pz, q, OperatorVariant::FirstComponent)?;
            let res = ode_residual_of(&f, &op, &uniform_grid(0.05, 6.0, 200))?;
            oracle.push(OracleCase {
                q,
                k,
                max_abs: res.max_abs,
                pass: res.max_abs < 1e-10,
            });
        }
    }

    let canonical = PhysicalParams::canonical(0.5);
    let table_branch = BranchSelection::parse("-+3/2").expect("valid id");
    let s = solve(&canonical, 0, Regime::Small, table_branch)?;
    let grid = uniform_grid(0.05, 5.0, 200);
    let res = ode_residual(&s, &canonical, regime_operator(Regime::Small), &grid)?;
    let (c1, c2) = decompose_residual(&s, &canonical, &res.sample)?;
    let d1 = s.residual("inv_r").unwrap_or(f64::NAN);
    let d2 = s.residual("inv_w").unwrap_or(f64::NAN);
    let decomposition_pass = (c1 - d1).abs() <= 1e-10 && (c2 - d2).abs() <= 1e-10;

    let pass =
        reports.iter().all(|r| r.pass) && oracle.iter().all(|o| o.pass) && decomposition_pass;
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        "seed": seed,
        "trials": trials,
        "tolerance": EQUIVALENCE_TOLERANCE,
        "equivalence": reports,
        "exact_solution_oracle": oracle,
        "residual_decomposition": {
            "diagnostic_inv_r": d1,
            "diagnostic_inv_w": d2,
            "fitted_inv_r": c1,
            "fitted_inv_w": c2,
            "residual_max_abs": res.max_abs,
            "residual_rms": res.rms,
            "pass": decomposition_pass,
        },
        "pass": pass,
    });
    write_json(out, "verify.json", &doc)?;
    Ok(if pass { 0 } else { EXIT_VERIFY })
}
