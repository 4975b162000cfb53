//! Command-line front end.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::audit::{
    audit_all, audit_faithe, chsh_max, chsh_optimum, faithe_minimum, teleport_check, AuditConfig, AuditResult,
    Postulate, Status, Witness,
};
use crate::error::GptError;
use crate::kernel::faithful_inverse;
use crate::models::{build, Group, ModelBundle};
use crate::report::{Format, ReportDocument};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "gptaudit", version, about = "Audit toy probabilistic theories for faithfulness, purification, teleportation and CHSH")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every audit on a model.
    Audit(CommonArgs),
    /// Maximal CHSH value with the local, Tsirelson and no-signaling reference lines.
    Chsh(CommonArgs),
    /// Teleportation with the effect alpha Phi^-1.
    Teleport(CommonArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GroupArg {
    O,
    So,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Json,
    Md,
    Table,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// two-box, clock, rebit, spin-factor or classical
    pub model: String,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_enum)]
    pub group: Option<GroupArg>,
    /// Samples per full turn on angular grids.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Falls back to GPTAUDIT_SEED, then to the built-in default.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// key=value file: eps, grid, grid_gamma, seed, purify_samples, search_samples.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

struct Settings {
    cfg: AuditConfig,
    format: Option<Format>,
}

fn usage(msg: impl Into<String>) -> (i32, String) {
    (EXIT_USAGE, msg.into())
}

fn parse_value<T: std::str::FromStr>(value: &str, key: &str, at: &str) -> Result<T, (i32, String)> {
    value.parse().map_err(|_| usage(format!("{at}: bad value for {key}")))
}

fn parse_config(path: &PathBuf, cfg: &mut AuditConfig) -> Result<(), (i32, String)> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| usage(format!("{}:{}: expected key=value", path.display(), k + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        let at = format!("{}:{}", path.display(), k + 1);
        match key {
            "eps" | "tol" => cfg.tol.eps = parse_value(value, key, &at)?,
            "grid" | "grid_angle" => cfg.tol.grid_angle = parse_value(value, key, &at)?,
            "grid_gamma" => cfg.tol.grid_gamma = parse_value(value, key, &at)?,
            "seed" => cfg.seed = parse_value(value, key, &at)?,
            "purify_samples" => cfg.purify_samples = parse_value(value, key, &at)?,
            "search_samples" => cfg.search_samples = parse_value(value, key, &at)?,
            _ => return Err(usage(format!("{}:{}: unknown key {key}", path.display(), k + 1))),
        }
    }
    Ok(())
}

fn settings(a: &CommonArgs) -> Result<Settings, (i32, String)> {
    let mut cfg = AuditConfig::default();
    if let Ok(s) = std::env::var("GPTAUDIT_SEED") {
        cfg.seed = s.trim().parse().map_err(|_| usage(format!("GPTAUDIT_SEED is not an integer: {s}")))?;
    }
    if let Some(p) = &a.config {
        parse_config(p, &mut cfg)?;
    }
    if let Some(g) = a.grid {
        cfg.tol.grid_angle = g;
    }
    if let Some(t) = a.tol {
        cfg.tol.eps = t;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    cfg.tol.validate().map_err(|e| usage(e.to_string()))?;
    let format = a.format.map(|f| match f {
        FormatArg::Json => Format::Json,
        FormatArg::Md => Format::Markdown,
        FormatArg::Table => Format::Table,
    });
    Ok(Settings { cfg, format })
}

fn model(a: &CommonArgs) -> Result<ModelBundle, (i32, String)> {
    let group = a.group.map(|g| match g {
        GroupArg::O => Group::O,
        GroupArg::So => Group::SO,
    });
    build(&a.model, a.n, group).map_err(|e| match e {
        GptError::Numerical(_) => (EXIT_NUMERICAL, e.to_string()),
        _ => usage(e.to_string()),
    })
}

fn fmt_value(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.6}"))
}

fn run_audit(a: &CommonArgs) -> Result<String, (i32, String)> {
    let s = settings(a)?;
    let m = model(a)?;
    let results = audit_all(&m, &s.cfg);
    let doc = ReportDocument::new(&m, s.cfg.tol, s.cfg.seed, results);
    Ok(doc.render(s.format.unwrap_or(Format::Table)))
}

fn run_chsh(a: &CommonArgs) -> Result<String, (i32, String)> {
    let s = settings(a)?;
    let m = model(a)?;
    let opt = chsh_optimum(&m, &s.cfg.tol).map_err(|e| (EXIT_NUMERICAL, e.to_string()))?;
    if let Some(f) = s.format {
        let doc = ReportDocument::new(&m, s.cfg.tol, s.cfg.seed, vec![chsh_max(&m, &s.cfg)]);
        return Ok(doc.render(f));
    }
    let effect = |e: &crate::kernel::EffectVec| {
        e.lambda.iter().map(|x| format!("{:.6}", crate::audit::clean(*x))).collect::<Vec<_>>().join(", ")
    };
    let mut out = format!("CHSH maximum for {}: {:.6}\n", m.name(), opt.value);
    out += &format!("state: {}\n", opt.label);
    for (who, pairs) in [("alice", &opt.setting.alice), ("bob", &opt.setting.bob)] {
        for (x, p) in pairs.iter().enumerate() {
            out += &format!("{who} {x}: ({})\n", effect(&p.0));
        }
    }
    out += "local bound          2.000000\n";
    out += &format!("Tsirelson bound      {:.6}\n", 2.0 * std::f64::consts::SQRT_2);
    out += "no-signaling bound   4.000000\n";
    Ok(out)
}

fn teleport_result(m: &ModelBundle, cfg: &AuditConfig) -> Result<AuditResult, GptError> {
    let phi = m.faithful.as_ref().ok_or_else(|| GptError::Inapplicable("no faithful state".into()))?;
    let inv = faithful_inverse(&phi.phi)?;
    let neg = -&inv;
    let max = -faithe_minimum(m, &neg, &cfg.tol)?.min.value;
    let alpha = 1.0 / max;
    let out = teleport_check(m, &(&inv * alpha), &cfg.tol)?;
    let status = if out.feasible { Status::Holds } else { Status::Fails };
    let mut r = AuditResult::new(Postulate::Teleport, status)
        .with_value(alpha)
        .detail("alpha_candidate", alpha)
        .detail("residual", out.residual)
        .detail("min_value", out.min_value)
        .detail("max_value", out.max_value);
    if let Some((label, w)) = out.witness {
        r = r
            .with_witness(Witness::matrix("bipartite", Some(label.clone()), &w))
            .note(format!("alpha Phi^-1 takes the value {:.6} on {label}", out.min_value));
    }
    let faithe = audit_faithe(m, cfg);
    Ok(r.note(format!("FAITHE {}", faithe.status)))
}

fn run_teleport(a: &CommonArgs) -> Result<String, (i32, String)> {
    let s = settings(a)?;
    let m = model(a)?;
    let r = teleport_result(&m, &s.cfg).map_err(|e| match e {
        GptError::Inapplicable(_) | GptError::Input(_) => usage(e.to_string()),
        _ => (EXIT_NUMERICAL, e.to_string()),
    })?;
    if let Some(f) = s.format {
        return Ok(ReportDocument::new(&m, s.cfg.tol, s.cfg.seed, vec![r]).render(f));
    }
    let mut out = format!(
        "teleportation for {}: {}\n",
        m.name(),
        if r.status == Status::Holds { "feasible" } else { "infeasible" }
    );
    out += &format!("alpha candidate: {}\n", fmt_value(r.details.get("alpha_candidate").copied()));
    out += &format!("residual: {:.3e}\n", r.details["residual"]);
    out += &format!("min over bipartite states: {:.6}\n", r.details["min_value"]);
    out += &format!(
        "witness: {}\n",
        r.witness.as_ref().and_then(|w| w.label.clone()).unwrap_or_else(|| "-".into())
    );
    Ok(out)
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let (args, outcome) = match &cli.command {
        Command::Audit(a) => (a, run_audit(a)),
        Command::Chsh(a) => (a, run_chsh(a)),
        Command::Teleport(a) => (a, run_teleport(a)),
    };
    match outcome {
        Ok(text) => {
            if let Some(path) = &args.out {
                if let Err(e) = std::fs::write(path, &text) {
                    let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
                    return EXIT_USAGE;
                }
            } else {
                let _ = stdout.write_all(text.as_bytes());
            }
            EXIT_OK
        }
        Err((code, msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            code
        }
    }
}
