use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "safekeeper", version, about = "Tamper-evident usage log for people analytics")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verify the store, then serve the HTTP API until interrupted.
    Serve(ServeArgs),
    /// Verify the hash chain of a data directory.
    Verify(VerifyArgs),
    /// Corrupt a data directory on purpose (testing only).
    Tamper(TamperArgs),
    /// Run the three demo tools against an in-process service.
    Demo(DemoArgs),
    /// Query usage entries.
    Query(QueryArgs),
    /// Show the access overview of the calling owner.
    Overview(RemoteArgs),
    /// Show the current chain head (admin).
    Head(RemoteArgs),
    /// Generate an Ed25519 key pair for a tool.
    Keygen(KeygenArgs),
    /// Register a tool's verification key (admin).
    RegisterTool(RegisterToolArgs),
    /// List registered tools (admin).
    Tools(RemoteArgs),
    /// Write a synthetic event fixture as JSON lines.
    Fixture(FixtureArgs),
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides `data_dir` from the config.
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    /// Overrides `listen` from the config.
    #[arg(long)]
    pub listen: Option<String>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, env = "SAFEKEEPER_DATA_DIR", required_unless_present = "config")]
    pub data_dir: Option<PathBuf>,
    /// Read the data directory from a service config instead.
    #[arg(long, conflicts_with = "data_dir")]
    pub config: Option<PathBuf>,
    /// Head hash (hex) of an earlier chain state to check against.
    #[arg(long)]
    pub expected_head: Option<String>,
    /// Length of an earlier chain state to check against.
    #[arg(long)]
    pub expected_length: Option<u64>,
}

#[derive(Debug, Args)]
pub struct TamperArgs {
    #[arg(long, env = "SAFEKEEPER_DATA_DIR")]
    pub data_dir: PathBuf,
    /// alter, remove, insert-fake, truncate or purge.
    #[arg(long)]
    pub attack: String,
    /// Target record; for truncate, the number of records to drop.
    #[arg(long)]
    pub position: Option<u64>,
    /// Required: acknowledges that this destroys data.
    #[arg(long)]
    pub unsafe_test: bool,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Store, keys and report cache live here; reruns reuse them.
    #[arg(long, env = "SAFEKEEPER_DATA_DIR")]
    pub data_dir: PathBuf,
    #[arg(long, default_value = "127.0.0.1:0")]
    pub listen: String,
    /// Stop the service after this many stored entries (needs --unsafe-test).
    #[arg(long, requires = "unsafe_test")]
    pub stop_service_after: Option<u32>,
    #[arg(long)]
    pub unsafe_test: bool,
}

#[derive(Debug, Clone, Args)]
pub struct RemoteArgs {
    #[arg(long, env = "SAFEKEEPER_URL", default_value = "http://127.0.0.1:8700")]
    pub url: String,
    #[arg(long, env = "SAFEKEEPER_TOKEN", hide_env_values = true)]
    pub token: Option<String>,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[command(flatten)]
    pub remote: RemoteArgs,
    #[arg(long)]
    pub owner: Option<String>,
    #[arg(long)]
    pub responsible: Option<String>,
    #[arg(long)]
    pub tool: Option<String>,
    #[arg(long)]
    pub kind: Option<String>,
    /// Case-insensitive search over justifications and data types.
    #[arg(long)]
    pub text: Option<String>,
    /// RFC 3339 time or UNIX seconds.
    #[arg(long)]
    pub from: Option<String>,
    /// RFC 3339 time or UNIX seconds.
    #[arg(long)]
    pub to: Option<String>,
    #[arg(long)]
    pub page_size: Option<u32>,
    #[arg(long)]
    pub page: Option<u32>,
}

#[derive(Debug, Args)]
pub struct KeygenArgs {
    /// Tool id; files are written as `<name>.key` and `<name>.pub`.
    #[arg(long)]
    pub name: String,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct RegisterToolArgs {
    #[command(flatten)]
    pub remote: RemoteArgs,
    #[arg(long)]
    pub tool_id: String,
    /// Path to the tool's `.pub` file.
    #[arg(long)]
    pub public_key: PathBuf,
}

#[derive(Debug, Args)]
pub struct FixtureArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Write here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub owners: Option<usize>,
    #[arg(long)]
    pub consumers: Option<usize>,
    #[arg(long)]
    pub commits: Option<usize>,
    #[arg(long)]
    pub reviews: Option<usize>,
    #[arg(long)]
    pub messages: Option<usize>,
}
