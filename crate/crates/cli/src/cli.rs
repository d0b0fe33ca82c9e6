use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "expander", version, about = "Expander families, coverings, spectra and negative kernels on finite graphs")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct Global {
    /// Output format; JSON by default, edge list for `gen`.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for every sampled search.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Numerical tolerance for invariance and certificate checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Largest group order to enumerate.
    #[arg(long, global = true, default_value_t = 2_000_000)]
    pub cap_order: usize,
    /// Largest vertex count for automorphism backtracking.
    #[arg(long, global = true, default_value_t = 16)]
    pub cap_aut: usize,
    /// Exhaustive roundness search while |V|^(2n) stays below this.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    pub cap_exhaustive: u64,
    /// Configurations drawn per size in sampled roundness search.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub cap_samples: usize,
    /// Write the report here instead of stdout.
    #[arg(short, long, global = true)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Dot,
    Text,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Generate a named graph as a canonical edge list.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Markov spectrum, lambda and spectral gap.
    Spectrum { graph: PathBuf },
    /// Cheeger constant, exact by default.
    Cheeger {
        graph: PathBuf,
        #[arg(long, conflicts_with = "heuristic")]
        exact: bool,
        /// Sweep-cut upper bound instead of exhaustive search.
        #[arg(long)]
        heuristic: bool,
    },
    /// Exact expander constant c.
    ExpanderConstant { graph: PathBuf },
    /// Covering-map tools.
    Cover {
        #[command(subcommand)]
        op: CoverOp,
    },
    /// Replace each Cayley-graph vertex by a copy of K_{p,q}.
    ReplaceKpq {
        /// `sl:<dim>:<modulus>` or `cyclic:<n>`.
        #[arg(long)]
        group: String,
        /// Generators for a cyclic group, comma separated (default 1,-1).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        gens: Option<Vec<i64>>,
        #[arg(short)]
        p: usize,
        #[arg(short)]
        q: usize,
        #[arg(long, value_enum, default_value_t = PolicyArg::Matched)]
        policy: PolicyArg,
        /// Also write the merged graph as an edge list.
        #[arg(long)]
        #[serde(skip)]
        graph_out: Option<PathBuf>,
    },
    /// Automorphism group diagnostics.
    Aut {
        #[command(subcommand)]
        op: AutOp,
    },
    /// Negative kernels, invariance, certificates and roundness.
    Kernel {
        #[command(subcommand)]
        op: KernelOp,
    },
    /// Family construction and analysis.
    Family {
        #[command(subcommand)]
        op: FamilyOp,
    },
    /// Smallest vertex-boundary ratio |dF|/|F| up to a size.
    Folner {
        graph: PathBuf,
        #[arg(long)]
        max_size: usize,
        #[arg(long, value_enum, default_value_t = FolnerArg::Auto)]
        mode: FolnerArg,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    Cycle { n: usize },
    Path { n: usize },
    Complete { n: usize },
    Kpq { p: usize, q: usize },
    Torus { a: usize, b: usize },
    TreeBall { k: usize, r: usize },
    Petersen,
    /// Cayley graph of `sl:<dim>:<modulus>` or `cyclic:<n>`.
    Cayley {
        group: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        gens: Option<Vec<i64>>,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverOp {
    /// Check a vertex map (whitespace-separated images) against the axioms.
    Verify { source: PathBuf, target: PathBuf, vmap: PathBuf },
    /// Deck group of a verified cover.
    Deck { source: PathBuf, target: PathBuf, vmap: PathBuf },
    /// Quotient by the action generated by permutations in a JSON file.
    Quotient {
        graph: PathBuf,
        #[command(flatten)]
        action: ActionArgs,
    },
    /// Cover Cay(SL_dim(Z/n)) -> Cay(SL_dim(Z/m)) from reduction mod m.
    Reduction {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u32,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct ActionArgs {
    /// JSON file `{"generators": [[...], ...]}` of vertex permutations.
    #[arg(long, conflicts_with = "left_translation")]
    pub action: Option<PathBuf>,
    /// Left translation by the group whose Cayley graph was given.
    #[arg(long)]
    pub left_translation: Option<String>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub gens: Option<Vec<i64>>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AutOp {
    Group { graph: PathBuf },
    Transitive { graph: PathBuf },
    /// Automorphisms stabilizing a K_{p,q} subgraph and their fixed points.
    Parity {
        graph: PathBuf,
        #[arg(long, value_delimiter = ',')]
        p_class: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        q_class: Vec<usize>,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct KernelInput {
    /// Kernel matrix (whitespace text, or JSON when the name ends in .json).
    #[arg(long, conflicts_with = "graph")]
    pub kernel: Option<PathBuf>,
    /// Use d^p on this graph.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub exponent: f64,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelOp {
    Cnd {
        #[command(flatten)]
        input: KernelInput,
    },
    QuasiTriangle {
        #[command(flatten)]
        input: KernelInput,
    },
    Invariance {
        #[command(flatten)]
        input: KernelInput,
        #[command(flatten)]
        action: ActionArgs,
    },
    BoundCert {
        #[command(flatten)]
        input: KernelInput,
        #[command(flatten)]
        action: ActionArgs,
    },
    SupExponent {
        graph: PathBuf,
        #[arg(long, default_value_t = 1e-4)]
        tol_p: f64,
    },
    Roundness {
        graph: PathBuf,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        #[arg(long, default_value_t = 1e-4)]
        tol_q: f64,
        /// Estimate on balls about this vertex instead of the whole graph.
        #[arg(long)]
        center: Option<usize>,
        #[arg(long, value_delimiter = ',', requires = "center")]
        radii: Option<Vec<u32>>,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct AnalysisArgs {
    #[arg(long, default_value_t = 0.05)]
    pub eps1: f64,
    #[arg(long, default_value_t = 0.05)]
    pub eps2: f64,
    #[arg(long, value_enum, default_value_t = CheegerArg::Auto)]
    pub cheeger: CheegerArg,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyOp {
    /// Build Cay(SL_dim(Z/p^k)), k = 1..depth, verify covers, analyze.
    Tower {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        prime: u32,
        #[arg(long)]
        depth: u32,
        #[command(flatten)]
        analysis: AnalysisArgs,
    },
    Primes {
        #[arg(long)]
        dim: usize,
        #[arg(long, value_delimiter = ',')]
        primes: Vec<u32>,
        #[command(flatten)]
        analysis: AnalysisArgs,
    },
    /// Family from a JSON manifest (edge-list paths, tower or primes).
    Manifest {
        manifest: PathBuf,
        #[command(flatten)]
        analysis: AnalysisArgs,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyArg {
    Literal,
    Matched,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FolnerArg {
    Auto,
    Exhaustive,
    Greedy,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheegerArg {
    Auto,
    Exact,
    Interval,
    Skip,
}
