use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "lglab", version, about = "Linked Grassmannian fibers and limit linear series numerics")]
pub struct Cli {
    /// Output format. CSV is available for census tables only.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Record wall-clock time in the report (makes output nondeterministic).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build or validate linked chains.
    #[command(subcommand)]
    Chain(ChainCommand),
    /// Invariants of an admissible pair (V_1, V_n).
    Invariants(PairArgs),
    /// Conditions and dimension of one stratum of a fiber.
    Stratum(StratumArgs),
    /// Conditions and dimension of the locus of pairs sharing this pair's data.
    PairLocus(PairArgs),
    /// Upper bound on the fiber dimension over a pair.
    FiberBound(PairArgs),
    /// Count points of a linked Grassmannian, or of one fiber by stratum.
    Enumerate(EnumerateArgs),
    /// Check the stratum formulas against exhaustive counts over nested models.
    Verify(VerifyArgs),
    /// Limit linear series calculators.
    #[command(subcommand)]
    Lls(LlsCommand),
}

#[derive(Debug, Subcommand)]
pub enum ChainCommand {
    /// Build a nested-projection chain.
    Make(MakeArgs),
    /// Check the linked-chain axioms of a chain JSON file.
    Check {
        /// Chain JSON (nested model or explicit maps).
        #[arg(long, visible_alias = "chain")]
        spec: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct MakeArgs {
    /// Field size (a prime below 2^16).
    #[arg(long)]
    pub p: u32,
    /// Ambient dimension of every E_i.
    #[arg(long)]
    pub d: usize,
    /// Nested subsets S_1;S_2;..., each a comma list of 1-based coordinates.
    #[arg(long, conflicts_with = "sizes")]
    pub subsets: Option<String>,
    /// Subset sizes, taking S_i = {1..size_i}.
    #[arg(long)]
    pub sizes: Option<String>,
    /// Conjugate every E_i by a seeded random automorphism.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Chain JSON (nested model, explicit maps, or a `chain make` report).
    #[arg(long)]
    pub chain: PathBuf,
    /// Subspace JSON {"p","ambient","rows"} for V_1.
    #[arg(long)]
    pub v1: PathBuf,
    /// Subspace JSON for V_n.
    #[arg(long)]
    pub vn: PathBuf,
}

#[derive(Debug, Args)]
pub struct StratumArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Stratum key: one "dV1,dVn,dZ" triple per interior index, separated by ';'.
    #[arg(long, required_unless_present = "all")]
    pub spec: Option<String>,
    /// Report every key instead of one.
    #[arg(long)]
    pub all: bool,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    /// Chain JSON (nested model, explicit maps, or a `chain make` report).
    #[arg(long)]
    pub chain: PathBuf,
    /// Subspace rank; taken from --v1 when a pair is given.
    #[arg(long)]
    pub r: Option<usize>,
    /// With --vn, enumerate the fiber over this pair.
    #[arg(long, requires = "vn")]
    pub v1: Option<PathBuf>,
    #[arg(long, requires = "v1")]
    pub vn: Option<PathBuf>,
    /// Include every point in the report.
    #[arg(long)]
    pub points: bool,
    /// Refuse when #G(r, d)(F_p) exceeds this; overrides LGLAB_BUDGET (default 1e6).
    #[arg(long)]
    pub budget: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Nested,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Family::Nested)]
    pub family: Family,
    /// Largest ambient dimension (exact dimension with --sizes).
    #[arg(long)]
    pub d: usize,
    /// Largest chain length.
    #[arg(long)]
    pub n: Option<usize>,
    /// Largest subspace rank (exact rank with --sizes).
    #[arg(long)]
    pub r: usize,
    /// Restrict to the single model with these subset sizes.
    #[arg(long)]
    pub sizes: Option<String>,
    /// Comma list of distinct primes to count over.
    #[arg(long, default_value = "2,3,5,7")]
    pub primes: String,
    /// Extra primes tried while some predicted-nonempty stratum is unseen [default: 11,13].
    #[arg(long)]
    pub escalate: Option<String>,
    /// Same limit as for enumerate; overrides LGLAB_BUDGET.
    #[arg(long)]
    pub budget: Option<String>,
    /// Seed for conjugating the model chains.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum LlsCommand {
    /// Brill-Noether number; with --cases, a seeded additivity sweep.
    Rho(RhoArgs),
    /// Refined, crude or incompatible.
    Classify(PairSeqArgs),
    /// Linked Grassmannian numerics of a pair.
    Translate(TwistArgs),
    /// Fiber dimension bound of a pair.
    Bound(TwistArgs),
    /// Check the crude dimension identity; with --cases, a seeded sweep.
    Identity(IdentityArgs),
    /// Genus-zero non-emptiness by Pieri products.
    Genus0(Genus0Args),
    /// Genus-one base case; with --scan, compare against the direct check.
    Genus1(Genus1Args),
    /// Node gluing profile; with --cases, a seeded sweep.
    Gluing(GluingArgs),
}

#[derive(Debug, Args)]
pub struct RhoArgs {
    #[arg(long, required_unless_present = "cases")]
    pub g: Option<i64>,
    #[arg(long, required_unless_present = "cases")]
    pub r: Option<i64>,
    #[arg(long, required_unless_present = "cases")]
    pub d: Option<i64>,
    /// Vanishing sequence at a marked point (repeatable).
    #[arg(long = "point")]
    pub points: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub cases: Option<usize>,
}

#[derive(Debug, Args, Clone)]
pub struct PairSeqArgs {
    /// JSON file with {"r","d","a_y","a_z","g_y","g_z"}; replaces the flags below.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long)]
    pub d: Option<i64>,
    #[arg(long = "aY")]
    pub a_y: Option<String>,
    #[arg(long = "aZ")]
    pub a_z: Option<String>,
    #[arg(long = "gY", default_value_t = 0)]
    pub g_y: i64,
    #[arg(long = "gZ", default_value_t = 0)]
    pub g_z: i64,
}

#[derive(Debug, Args)]
pub struct TwistArgs {
    #[command(flatten)]
    pub pair: PairSeqArgs,
    /// Twist degree on Y; defaults to the threshold 2d + g_Y + 1.
    #[arg(long = "degDY")]
    pub deg_dy: Option<i64>,
    #[arg(long = "degDZ")]
    pub deg_dz: Option<i64>,
}

#[derive(Debug, Args)]
pub struct IdentityArgs {
    #[command(flatten)]
    pub twist: TwistArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub cases: Option<usize>,
}

#[derive(Debug, Args)]
pub struct Genus0Args {
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub d: i64,
    /// Number of points with ramification 0,1,...,1.
    #[arg(long, default_value_t = 0)]
    pub special: usize,
    /// Further vanishing sequences (repeatable).
    #[arg(long = "point")]
    pub points: Vec<String>,
}

#[derive(Debug, Args)]
pub struct Genus1Args {
    #[arg(long, required_unless_present = "scan")]
    pub r: Option<usize>,
    #[arg(long, required_unless_present = "scan")]
    pub d: Option<i64>,
    /// Vanishing sequence at the marked point.
    #[arg(long, required_unless_present = "scan")]
    pub a: Option<String>,
    /// Scan every sequence with r <= --r-max, d <= --d-max.
    #[arg(long)]
    pub scan: bool,
    #[arg(long, default_value_t = 2)]
    pub r_max: usize,
    #[arg(long, default_value_t = 6)]
    pub d_max: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GluingKindArg {
    Refined,
    ExcessOne,
}

#[derive(Debug, Args)]
pub struct GluingArgs {
    #[command(flatten)]
    pub pair: PairSeqArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub cases: Option<usize>,
    #[arg(long, value_enum, default_value_t = GluingKindArg::Refined)]
    pub kind: GluingKindArg,
}
