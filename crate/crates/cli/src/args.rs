use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::report::OutputFormat;

#[derive(Debug, Parser)]
#[command(
    name = "sftlab",
    version,
    about = "Decision procedures and semi-decisions for shifts of finite type, block codes and effective subshifts"
)]
pub struct Cli {
    /// Report layout.
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: OutputFormat,
    /// Upper bound on worker threads.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub jobs: u32,
    /// Search-node budget for the command.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    pub nodes: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide emptiness of a one-dimensional SFT.
    #[command(name = "check-empty-1d")]
    CheckEmpty1d { file: PathBuf },
    /// Semi-decide emptiness of an SFT or Wang tile set.
    CheckEmpty {
        /// Expected dimension (Wang tile sets are 2-dimensional).
        #[arg(long)]
        dim: Option<usize>,
        /// Largest radius and period to try.
        #[arg(long, default_value_t = 4)]
        fuel: usize,
        file: PathBuf,
    },
    /// Check a periodic certificate against an SFT.
    VerifyCert { sft: PathBuf, cert: PathBuf },
    /// Count admissible patterns on `[0, n-1]^d`.
    Count {
        #[arg(long)]
        n: usize,
        /// Also report the entropy upper bound at `n`.
        #[arg(long)]
        entropy: bool,
        file: PathBuf,
    },
    /// Apply, verify and search sliding block codes.
    #[command(subcommand)]
    Code(CodeCommand),
    /// Image languages of cellular automata.
    #[command(subcommand)]
    Ca(CaCommand),
    /// Stages of effective subshifts on Cantor-space alphabets.
    #[command(subcommand)]
    Eds(EdsCommand),
    /// Images, attractor tests and cylinder encodings of effective maps.
    #[command(subcommand)]
    Attractor(AttractorCommand),
    /// Run regression corpora.
    #[command(subcommand)]
    Corpus(CorpusCommand),
}

#[derive(Debug, Subcommand)]
pub enum CodeCommand {
    /// Apply a block code to a box pattern.
    Apply {
        code: PathBuf,
        /// Symbols in lexicographic site order.
        #[arg(long, allow_hyphen_values = true)]
        pattern: String,
        /// Box shape such as `3x2`; defaults to a word.
        #[arg(long)]
        shape: Option<String>,
    },
    /// Run one factor-verification step.
    Verify {
        code: PathBuf,
        #[command(flatten)]
        pair: ShiftPair,
        /// Radius of the source patterns; defaults to the smallest allowed.
        #[arg(long)]
        r: Option<i64>,
    },
    /// Search for a factor code in increasing window, radius and rule order.
    Search {
        #[command(flatten)]
        pair: ShiftPair,
        #[arg(long, default_value_t = 1)]
        max_k: i64,
        #[arg(long, default_value_t = 6)]
        max_r: i64,
        #[arg(long, default_value_t = 100_000)]
        max_rules: u64,
    },
}

#[derive(Debug, Args)]
pub struct ShiftPair {
    #[arg(long)]
    pub src: PathBuf,
    #[arg(long)]
    pub dst: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum CaCommand {
    /// Pattern languages of the iterated images of a cellular automaton.
    Limit {
        code: PathBuf,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        window: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum EdsCommand {
    /// Stage `k` of one scripted enumerator.
    Stage {
        script: PathBuf,
        #[arg(long)]
        k: u64,
        /// Apply the emptiness guard (one-dimensional scripts only).
        #[arg(long)]
        guard: bool,
    },
    /// Stage `k` of the product of scripted lanes.
    Product {
        #[arg(required = true)]
        scripts: Vec<PathBuf>,
        #[arg(long)]
        k: u64,
    },
    /// Stage `k` of the product of guarded lanes.
    Universal {
        scripts: Vec<PathBuf>,
        #[arg(long)]
        k: u64,
        /// Cap on distinct Cantor bits per lane.
        #[arg(long, default_value_t = 20)]
        cap: usize,
    },
    /// Check that a clopen partition maps a stage into an SFT.
    VerifyPartition {
        stage: PathBuf,
        partition: PathBuf,
        dst: PathBuf,
        #[arg(long)]
        n: i64,
        #[arg(long)]
        r: i64,
    },
}

#[derive(Debug, Subcommand)]
pub enum AttractorCommand {
    /// Approximate the image of a dyadic cell.
    Image {
        map: PathBuf,
        cell: PathBuf,
        #[arg(long)]
        n: u64,
    },
    /// Semi-decide that a cell misses the attractor.
    TestCell {
        map: PathBuf,
        trap: PathBuf,
        cell: PathBuf,
        #[arg(long, default_value_t = 32)]
        fuel: u64,
        /// Precision up to which the trap region is checked first.
        #[arg(long, default_value_t = 4)]
        validate: u64,
    },
    /// Emit forbidden cylinders of the subshift encoding the attractor.
    Encode {
        map: PathBuf,
        trap: PathBuf,
        #[arg(long)]
        fuel: u64,
        #[arg(long, default_value_t = 2)]
        depth_cap: u32,
        #[arg(long, default_value_t = 4)]
        validate: u64,
        /// Also write the cylinders in the cylinder text format.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum CorpusCommand {
    /// Run every case of a corpus file and compare with its expectations.
    Run { file: PathBuf },
}
