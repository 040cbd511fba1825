//! Command line front end for the `hmsim` binary.
//!
//! Every subcommand produces a [`Table`], rendered either as CSV (header row,
//! floats with 17 significant digits) or as JSON (`{"meta": .., "rows": [..]}`
//! with one object per CSV row). Angles are always in radians.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::analysis::{chsh, scan, theta_grid, ChshSetup, ScanRow};
use crate::operational::{
    classify, vessels_scenario, ClassificationReport, Tolerance, VesselsKind,
};
use crate::singlet::{
    experiment_triple, joint_distribution_analytic, sequential_joint_distribution, simulate,
    JointOutcome, JointTestSpec, Order,
};
use crate::sphere::{outcome_probability, BlochState, Direction, Epsilon};

/// Default `--tolerance`. Angles typed with 7–8 decimals are off by up to
/// ~5e-8 rad, which moves probabilities by a few 1e-9.
pub const DEFAULT_TOLERANCE: f64 = 1e-7;

/// Column order of the `scan` CSV.
pub const SCAN_COLUMNS: [&str; 10] = [
    "epsilon",
    "theta",
    "p1",
    "p2",
    "p3",
    "p4",
    "E",
    "compatible",
    "separated",
    "classical_joint",
];

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] crate::Error),
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
    #[error("json output failed: {0}")]
    Json(#[from] serde_json::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Parser, Serialize)]
#[command(
    name = "hmsim",
    version,
    about = "Elastic sphere model of spin-1/2 and the rod-coupled singlet"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Csv)]
    pub format: Format,

    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "lowercase")]
pub enum Command {
    /// Outcome probabilities of one test on one sphere.
    Single(SingleArgs),
    /// Analytic joint distribution on the singlet.
    Joint(JointArgs),
    /// Monte Carlo joint test on the singlet.
    Simulate(SimulateArgs),
    /// Compatibility / separability / classicality of the singlet tests.
    Classify(ClassifyArgs),
    /// CHSH value for four coplanar settings.
    Chsh(ChshArgs),
    /// Classification over an (epsilon, theta) grid.
    Scan(ScanArgs),
    /// The connected-vessels scenarios.
    Vessels(VesselsArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SingleArgs {
    #[arg(long)]
    pub epsilon: f64,
    /// Distance of the state from the centre, in [0, 1].
    #[arg(long)]
    pub state_r: f64,
    #[arg(long, default_value_t = 0.0)]
    pub state_theta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub state_phi: f64,
    #[arg(long)]
    pub dir_theta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub dir_phi: f64,
}

/// Two measurement directions, either as absolute angle pairs or as a
/// relative angle (`u1` at the north pole, `u2` tilted by `theta` in the
/// `phi = 0` plane).
#[derive(Debug, Clone, Args, Serialize)]
pub struct GeometryArgs {
    #[arg(long)]
    pub epsilon: f64,
    /// Angle between the two settings.
    #[arg(long, conflicts_with_all = ["theta1", "phi1", "theta2", "phi2"])]
    pub theta: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub theta1: f64,
    #[arg(long, default_value_t = 0.0)]
    pub phi1: f64,
    #[arg(long, default_value_t = 0.0)]
    pub theta2: f64,
    #[arg(long, default_value_t = 0.0)]
    pub phi2: f64,
}

impl GeometryArgs {
    fn directions(&self) -> crate::Result<(Direction, Direction, Epsilon)> {
        let eps = Epsilon::new(self.epsilon)?;
        let (u1, u2) = match self.theta {
            Some(theta) => (Direction::in_plane(0.0)?, Direction::in_plane(theta)?),
            None => (
                Direction::from_angles(self.theta1, self.phi1)?,
                Direction::from_angles(self.theta2, self.phi2)?,
            ),
        };
        Ok((u1, u2, eps))
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct JointArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub geometry: GeometryArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderArg {
    LeftFirst,
    RightFirst,
}

impl From<OrderArg> for Order {
    fn from(o: OrderArg) -> Order {
        match o {
            OrderArg::LeftFirst => Order::LeftFirst,
            OrderArg::RightFirst => Order::RightFirst,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub geometry: GeometryArgs,
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    /// Seed of the random stream; required so every run can be repeated.
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = OrderArg::LeftFirst)]
    pub order: OrderArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ClassifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub geometry: GeometryArgs,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ChshArgs {
    #[arg(long)]
    pub epsilon: f64,
    /// Polar angle of the first left setting.
    #[arg(long, default_value_t = ChshSetup::CANONICAL_ANGLES[0])]
    pub a: f64,
    #[arg(long, default_value_t = ChshSetup::CANONICAL_ANGLES[1])]
    pub a_prime: f64,
    #[arg(long, default_value_t = ChshSetup::CANONICAL_ANGLES[2])]
    pub b: f64,
    #[arg(long, default_value_t = ChshSetup::CANONICAL_ANGLES[3])]
    pub b_prime: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScanArgs {
    /// Comma separated epsilon values.
    #[arg(
        long = "epsilon",
        value_delimiter = ',',
        default_value = "0,0.25,0.5,0.75,1"
    )]
    pub epsilons: Vec<f64>,
    /// Number of equally spaced angles from 0 to pi inclusive.
    #[arg(long, default_value_t = 181)]
    pub theta_points: usize,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VesselsArg {
    AlphaAlpha,
    AlphaBeta,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VesselsArgs {
    #[arg(long, value_enum)]
    pub kind: VesselsArg,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
}

/// A single cell of output.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Count(u64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Float(x) => format_float(*x),
            Cell::Count(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Float(x) => json!(x),
            Cell::Count(n) => json!(n),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
        }
    }
}

/// Scientific notation with 17 significant digits; parses back to the same
/// `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn single_row(columns: Vec<&'static str>, row: Vec<Cell>) -> Self {
        Table {
            columns,
            rows: vec![row],
        }
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_csv))?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self, meta: Value) -> Result<String, CliError> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(k, v)| (k.to_string(), v.to_json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut out = serde_json::to_string_pretty(&json!({ "meta": meta, "rows": rows }))?;
        out.push('\n');
        Ok(out)
    }
}

fn report_cells(r: &ClassificationReport) -> Vec<Cell> {
    let mut cells = vec![
        Cell::Bool(r.compatible),
        Cell::Bool(r.separated),
        Cell::Bool(r.classical_left),
        Cell::Bool(r.classical_right),
        Cell::Bool(r.classical_joint),
    ];
    cells.extend(r.compatibility_residuals.iter().map(|&x| Cell::Float(x)));
    cells.extend(r.separability_residuals.iter().map(|&x| Cell::Float(x)));
    cells
}

const REPORT_COLUMNS: [&str; 13] = [
    "compatible",
    "separated",
    "classical_left",
    "classical_right",
    "classical_joint",
    "comp_residual_1",
    "comp_residual_2",
    "comp_residual_3",
    "comp_residual_4",
    "sep_residual_1",
    "sep_residual_2",
    "sep_residual_3",
    "sep_residual_4",
];

pub fn scan_row_cells(r: &ScanRow) -> Vec<Cell> {
    vec![
        Cell::Float(r.epsilon),
        Cell::Float(r.theta),
        Cell::Float(r.p1),
        Cell::Float(r.p2),
        Cell::Float(r.p3),
        Cell::Float(r.p4),
        Cell::Float(r.correlation),
        Cell::Bool(r.compatible),
        Cell::Bool(r.separated),
        Cell::Bool(r.classical_joint),
    ]
}

/// Computes the output table of a subcommand.
pub fn execute(command: &Command) -> Result<Table, CliError> {
    let table = match command {
        Command::Single(a) => {
            let eps = Epsilon::new(a.epsilon)?;
            let state = BlochState::from_polar(a.state_r, a.state_theta, a.state_phi)?;
            let dir = Direction::from_angles(a.dir_theta, a.dir_phi)?;
            let p = outcome_probability(&state, &dir, eps);
            Table::single_row(
                vec!["p_yes", "p_no"],
                vec![Cell::Float(p.p_yes), Cell::Float(p.p_no)],
            )
        }
        Command::Joint(a) => {
            let (u1, u2, eps) = a.geometry.directions()?;
            let j = joint_distribution_analytic(&u1, &u2, eps);
            Table::single_row(
                vec!["p1", "p2", "p3", "p4"],
                j.to_array().iter().map(|&p| Cell::Float(p)).collect(),
            )
        }
        Command::Simulate(a) => {
            let (u1, u2, eps) = a.geometry.directions()?;
            let spec = JointTestSpec::new(u1, u2, eps).with_order(a.order.into());
            let sim = simulate(&spec, a.trials, a.seed)?;
            let analytic = sequential_joint_distribution(&spec).to_array();
            let freqs = sim.frequencies.to_array();
            let rows = JointOutcome::ALL
                .iter()
                .map(|o| {
                    let i = o.index();
                    vec![
                        Cell::Text(o.label().to_string()),
                        Cell::Count(sim.counts[i]),
                        Cell::Float(freqs[i]),
                        Cell::Float(analytic[i]),
                    ]
                })
                .collect();
            Table {
                columns: vec!["outcome", "count", "frequency", "analytic"],
                rows,
            }
        }
        Command::Classify(a) => {
            let (u1, u2, eps) = a.geometry.directions()?;
            let tol = Tolerance::new(a.tolerance)?;
            let report = classify(&experiment_triple(&u1, &u2, eps), tol)?;
            Table::single_row(REPORT_COLUMNS.to_vec(), report_cells(&report))
        }
        Command::Chsh(a) => {
            let eps = Epsilon::new(a.epsilon)?;
            let setup = ChshSetup::coplanar([a.a, a.a_prime, a.b, a.b_prime], eps)?;
            let r = chsh(&setup);
            Table::single_row(
                vec![
                    "E_ab",
                    "E_ab_prime",
                    "E_a_prime_b",
                    "E_a_prime_b_prime",
                    "S",
                ],
                [
                    r.e_ab,
                    r.e_ab_prime,
                    r.e_a_prime_b,
                    r.e_a_prime_b_prime,
                    r.s,
                ]
                .iter()
                .map(|&x| Cell::Float(x))
                .collect(),
            )
        }
        Command::Scan(a) => {
            let tol = Tolerance::new(a.tolerance)?;
            let rows = scan(&a.epsilons, &theta_grid(a.theta_points), tol)?;
            Table {
                columns: SCAN_COLUMNS.to_vec(),
                rows: rows.iter().map(scan_row_cells).collect(),
            }
        }
        Command::Vessels(a) => {
            let kind = match a.kind {
                VesselsArg::AlphaAlpha => VesselsKind::AlphaAlpha,
                VesselsArg::AlphaBeta => VesselsKind::AlphaBeta,
            };
            let tol = Tolerance::new(a.tolerance)?;
            let t = vessels_scenario(kind);
            let report = classify(&t, tol)?;
            let mut columns = vec![
                "left_p_yes",
                "left_p_no",
                "right_p_yes",
                "right_p_no",
                "p1",
                "p2",
                "p3",
                "p4",
            ];
            columns.extend(REPORT_COLUMNS);
            let mut row: Vec<Cell> = [t.left.p_yes, t.left.p_no, t.right.p_yes, t.right.p_no]
                .iter()
                .chain(t.joint.to_array().iter())
                .map(|&x| Cell::Float(x))
                .collect();
            row.extend(report_cells(&report));
            Table {
                columns,
                rows: vec![row],
            }
        }
    };
    Ok(table)
}

fn meta(cli: &Cli) -> Result<Value, CliError> {
    let seed = match &cli.command {
        Command::Simulate(a) => json!(a.seed),
        _ => Value::Null,
    };
    Ok(json!({
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "flags": serde_json::to_value(&cli.command)?,
    }))
}

/// Runs a parsed invocation and returns the rendered output.
pub fn render(cli: &Cli) -> Result<String, CliError> {
    let table = execute(&cli.command)?;
    match cli.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(meta(cli)?),
    }
}

/// Renders the invocation and writes it to `--output` or standard output.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    use std::io::Write;

    let text = render(cli)?;
    match &cli.output {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("hmsim").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn format_float_round_trips() {
        for &x in &[
            0.0,
            0.5,
            1.0 / 3.0,
            2.0 * std::f64::consts::SQRT_2,
            1e-300,
            -0.125,
        ] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_float(0.75), "7.5000000000000000e-1");
    }

    #[test]
    fn theta_conflicts_with_absolute_angles() {
        let r = Cli::try_parse_from([
            "hmsim",
            "joint",
            "--epsilon",
            "1",
            "--theta",
            "1",
            "--theta2",
            "1",
        ]);
        assert!(r.is_err());
    }

    #[test]
    fn simulate_requires_seed() {
        assert!(
            Cli::try_parse_from(["hmsim", "simulate", "--epsilon", "1", "--theta", "1"]).is_err()
        );
    }

    #[test]
    fn absolute_geometry() {
        let cli = parse(&[
            "joint",
            "--epsilon",
            "1",
            "--theta1",
            "0.5",
            "--phi1",
            "1",
            "--theta2",
            "0.5",
            "--phi2",
            "1",
        ]);
        let table = execute(&cli.command).unwrap();
        assert_eq!(
            table.rows[0],
            vec![
                Cell::Float(0.0),
                Cell::Float(0.5),
                Cell::Float(0.5),
                Cell::Float(0.0)
            ]
        );
    }

    #[test]
    fn validation_errors_surface() {
        for args in [
            &[
                "single",
                "--epsilon",
                "2",
                "--state-r",
                "1",
                "--dir-theta",
                "0",
            ][..],
            &[
                "single",
                "--epsilon",
                "1",
                "--state-r",
                "1.5",
                "--dir-theta",
                "0",
            ],
            &["joint", "--epsilon", "1", "--theta", "4"],
            &[
                "classify",
                "--epsilon",
                "1",
                "--theta",
                "1",
                "--tolerance",
                "0",
            ],
            &[
                "simulate",
                "--epsilon",
                "1",
                "--theta",
                "1",
                "--seed",
                "1",
                "--trials",
                "0",
            ],
            &["scan", "--epsilon", "0.5,1.5"],
        ] {
            let cli = parse(args);
            assert!(
                matches!(execute(&cli.command), Err(CliError::Model(_))),
                "{args:?}"
            );
        }
    }

    #[test]
    fn json_meta_block() {
        let cli = parse(&[
            "simulate",
            "--epsilon",
            "1",
            "--theta",
            "1",
            "--seed",
            "9",
            "--trials",
            "10",
            "--format",
            "json",
        ]);
        let v: Value = serde_json::from_str(&render(&cli).unwrap()).unwrap();
        assert_eq!(v["meta"]["seed"], json!(9));
        assert_eq!(v["meta"]["version"], json!(env!("CARGO_PKG_VERSION")));
        assert_eq!(v["meta"]["flags"]["subcommand"], json!("simulate"));
        assert_eq!(v["meta"]["flags"]["trials"], json!(10));
        assert_eq!(v["rows"].as_array().unwrap().len(), 4);
        assert_eq!(v["rows"][0]["outcome"], json!("x1"));
    }
}
