//! Command-line grammar.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use srl_core::extend::SubadditiveGenerator;
use srl_core::jsr::DEFAULT_BUDGET;

#[derive(Debug, Parser)]
#[command(name = "srl", version, about = "Spectral radii of operator families and linear cocycles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Finite matrix sets.
    #[command(subcommand)]
    Jsr(JsrCommand),
    /// Families of finite-rank plus weighted-shift operators.
    #[command(subcommand)]
    Op(OpCommand),
    /// The weighted extension of a family.
    #[command(subcommand)]
    Extend(ExtendCommand),
    /// Cocycles over shifts and rotations.
    #[command(subcommand)]
    Cocycle(CocycleCommand),
}

#[derive(Debug, Args)]
pub struct Input {
    /// JSON input file.
    #[arg(long, visible_alias = "spec")]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Directory for the CSV files and the manifest.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct Enumeration {
    /// Longest word length to enumerate.
    #[arg(long, default_value_t = 12)]
    pub max_len: usize,
    /// Maximum number of products to evaluate.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

#[derive(Debug, Args)]
pub struct Seeds {
    /// First seed.
    #[arg(long)]
    pub seed: u64,
    /// Number of consecutive seeds starting at `--seed`.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
}

impl Seeds {
    pub fn list(&self) -> Result<Vec<u64>, String> {
        if self.seeds == 0 {
            return Err("--seeds must be at least 1".into());
        }
        let last = self.seed.checked_add(self.seeds - 1).ok_or("seed range overflows u64")?;
        Ok((self.seed..=last).collect())
    }
}

#[derive(Debug, Subcommand)]
pub enum JsrCommand {
    /// Certified upper and lower bounds per word length, with witnesses.
    Bounds {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        enumeration: Enumeration,
        /// Divide the set by its largest member norm first.
        #[arg(long)]
        normalize: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Norm and spectral-radius columns with the gap between them.
    BwReport {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        enumeration: Enumeration,
        #[arg(long)]
        normalize: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Branch-and-bound bracket of the joint spectral radius.
    Gripenberg {
        #[command(flatten)]
        input: Input,
        /// Target bracket width.
        #[arg(long, default_value_t = 0.02)]
        delta: f64,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        #[arg(long)]
        normalize: bool,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Subcommand)]
pub enum OpCommand {
    /// All four radii of an operator family.
    Radii {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        enumeration: Enumeration,
        /// Relative tolerance separating discrete eigenvalues from the essential disk.
        #[arg(long, default_value_t = srl_core::extend::OPERATOR_SPECTRUM_TOL)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Subcommand)]
pub enum ExtendCommand {
    /// Growth rate of a subadditive sequence against its weighted maximum.
    VerifyAlpha {
        /// `linear:SLOPE[,INTERCEPT]`, `neg-quadratic` or `min-linear:S1,C1,S2,C2`.
        #[arg(long)]
        generator: GeneratorArg,
        /// Index at which the two rates are compared.
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
        /// Seed for the subadditivity spot checks.
        #[arg(long)]
        seed: u64,
        /// Decay rate of the weights.
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Radii of a matrix set next to those of its extension.
    Radii {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        enumeration: Enumeration,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Args)]
pub struct Orbit {
    #[command(flatten)]
    pub input: Input,
    /// Orbit length.
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    #[command(flatten)]
    pub seeds: Seeds,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Subcommand)]
pub enum CocycleCommand {
    /// Top exponent track and the exponent spectrum.
    Lyapunov {
        #[command(flatten)]
        orbit: Orbit,
    },
    /// Norm growth against spectral-radius growth, with cone returns and recurrence.
    Cohen {
        #[command(flatten)]
        orbit: Orbit,
        /// Horizon of the finite-time splitting (two-dimensional cocycles).
        #[arg(long, default_value_t = 50)]
        horizon: usize,
        /// Aperture of the target cone.
        #[arg(long, default_value_t = 1.0)]
        delta_cone: f64,
    },
    /// Finite-time splitting along the orbit and its equivariance residual.
    Splitting {
        #[command(flatten)]
        orbit: Orbit,
        #[arg(long, default_value_t = 50)]
        horizon: usize,
    },
}

/// Parsed `--generator` value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorArg(pub SubadditiveGenerator);

impl FromStr for GeneratorArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let nums = if args.is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|a| a.trim().parse::<f64>().map_err(|e| format!("`{a}`: {e}")))
                .collect::<Result<_, _>>()?
        };
        let g = match (name, nums.as_slice()) {
            ("linear", [slope]) => SubadditiveGenerator::Linear { slope: *slope, intercept: 0.0 },
            ("linear", [slope, intercept]) => SubadditiveGenerator::Linear { slope: *slope, intercept: *intercept },
            ("neg-quadratic", []) => SubadditiveGenerator::NegQuadratic,
            ("min-linear", [s1, c1, s2, c2]) => SubadditiveGenerator::MinLinear { s1: *s1, c1: *c1, s2: *s2, c2: *c2 },
            _ => return Err(format!("unrecognized generator `{s}`")),
        };
        Ok(GeneratorArg(g))
    }
}
