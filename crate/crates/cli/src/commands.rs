use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use monitor_sdk::ApiClient;
use safekeeper_core::analytics::{generate_fixture, FixtureSize};
use safekeeper_core::auth::{generate_signing_key, read_public_key, write_key_pair};
use safekeeper_core::wire::QueryParams;
use safekeeper_core::{ChainWitness, Digest};
use safekeeper_service::{
    apply_attack, verify_dir, Attack, ConfigError, Safekeeper, ServiceConfig, StartupError, SystemClock,
};
use serde_json::json;

use crate::args::{
    FixtureArgs, KeygenArgs, QueryArgs, RegisterToolArgs, RemoteArgs, ServeArgs, TamperArgs, VerifyArgs,
};
use crate::exit::{CliError, CliResult, ExitClass};
use crate::output::{self, Output};

fn api(remote: &RemoteArgs) -> ApiClient {
    ApiClient::new(remote.url.trim_end_matches('/'), remote.token.clone())
}

pub fn startup_error(err: StartupError) -> CliError {
    match err {
        StartupError::Config(e) => CliError::usage(e),
        StartupError::Store(e) => CliError::general(e),
        StartupError::Tampered(report) => {
            let mut human = output::verification(&report, 0, 0);
            human.insert_str(0, "refusing to serve a store that fails verification\n");
            CliError::new(ExitClass::Verification, anyhow::anyhow!(human.trim_end().to_owned()))
        }
    }
}

/// Loads `--config` and applies command-line overrides. `announce` is
/// called with the bound address once the store is verified.
pub fn serve(args: &ServeArgs, announce: impl FnOnce(SocketAddr)) -> CliResult<()> {
    let mut config = ServiceConfig::load(&args.config).map_err(|e| match e {
        ConfigError::Read { .. } | ConfigError::Parse { .. } => CliError::usage(e),
        other => CliError::general(other),
    })?;
    if let Some(dir) = &args.data_dir {
        config.data_dir = dir.clone();
    }
    if let Some(listen) = &args.listen {
        config.listen = listen.clone();
    }
    let addr = config.listen_addr().map_err(CliError::usage)?;
    let app = Arc::new(Safekeeper::from_config(&config, Arc::new(SystemClock)).map_err(startup_error)?);

    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(CliError::general)?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| CliError::general(anyhow::anyhow!("cannot listen on {addr}: {e}")))?;
        let bound = listener.local_addr().map_err(CliError::general)?;
        tracing::info!(%bound, data_dir = %config.data_dir.display(), "serving");
        announce(bound);
        safekeeper_service::server::serve(listener, app, shutdown_signal())
            .await
            .map_err(CliError::general)
    })
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
    tracing::info!("shutting down");
}

pub fn verify(args: &VerifyArgs) -> CliResult<Output> {
    let dir: PathBuf = match (&args.data_dir, &args.config) {
        (Some(d), _) => d.clone(),
        (None, Some(c)) => ServiceConfig::load(c).map_err(CliError::usage)?.data_dir,
        (None, None) => return Err(CliError::usage("--data-dir or --config is required")),
    };
    if !dir.is_dir() {
        return Err(CliError::usage(format!("{} is not a directory", dir.display())));
    }
    let head = args
        .expected_head
        .as_deref()
        .map(|h| Digest::from_hex(h.trim()).map_err(|e| CliError::usage(format!("--expected-head: {e}"))))
        .transpose()?;
    let witness = ChainWitness {
        head,
        length: args.expected_length,
    };
    let has_witness = head.is_some() || args.expected_length.is_some();
    let result = verify_dir(&dir, has_witness.then_some(&witness)).map_err(CliError::general)?;
    let human = output::verification(&result.report, result.records, result.torn_tail_bytes);
    let out = Output::new(&result, human);
    Ok(if result.report.ok {
        out
    } else {
        out.failing(ExitClass::Verification)
    })
}

pub fn tamper(args: &TamperArgs) -> CliResult<Output> {
    if !args.unsafe_test {
        return Err(CliError::usage(
            "tamper destroys log data; pass --unsafe-test to confirm this is a test store",
        ));
    }
    let attack: Attack = args.attack.parse().map_err(CliError::usage)?;
    let outcome = apply_attack(&args.data_dir, attack, args.position).map_err(|e| match e {
        safekeeper_service::TamperError::OutOfRange { .. } | safekeeper_service::TamperError::Empty(_) => {
            CliError::usage(e)
        }
        other => CliError::general(other),
    })?;
    let human = format!(
        "{}\nbefore: length {} head {}\nafter:  {} records\n",
        outcome.description, outcome.before.length, outcome.before.head_hash, outcome.records_after
    );
    Ok(Output::new(&outcome, human))
}

pub fn query(args: &QueryArgs) -> CliResult<Output> {
    let time = |s: &Option<String>, flag: &str| {
        s.as_deref()
            .map(|v| output::parse_time(v).map_err(|e| CliError::usage(format!("{flag}: {e}"))))
            .transpose()
    };
    let params = QueryParams {
        owner: args.owner.clone(),
        responsible: args.responsible.clone(),
        tool: args.tool.clone(),
        kind: args.kind.clone(),
        text: args.text.clone(),
        from: time(&args.from, "--from")?,
        to: time(&args.to, "--to")?,
        page_size: args.page_size,
        page_index: args.page,
    };
    let page = api(&args.remote).query(&params)?;
    let human = output::page(&page);
    Ok(Output::new(&page, human))
}

pub fn overview(args: &RemoteArgs) -> CliResult<Output> {
    let stats = api(args).overview()?;
    let human = output::overview(&stats);
    Ok(Output::new(&stats, human))
}

pub fn head(args: &RemoteArgs) -> CliResult<Output> {
    let state = api(args).chain_head()?;
    let human = output::chain_state(&state);
    Ok(Output::new(&state, human))
}

pub fn keygen(args: &KeygenArgs) -> CliResult<Output> {
    fs::create_dir_all(&args.out_dir).map_err(CliError::general)?;
    let key_path = args.out_dir.join(format!("{}.key", args.name));
    if key_path.exists() {
        return Err(CliError::usage(format!("{} already exists", key_path.display())));
    }
    let key = generate_signing_key();
    write_key_pair(&args.out_dir, &args.name, &key).map_err(CliError::general)?;
    let pub_path = args.out_dir.join(format!("{}.pub", args.name));
    let public = safekeeper_core::PublicKey(key.verifying_key()).to_hex();
    let human = format!(
        "signing key    {}\npublic key     {}\n               {public}\n",
        key_path.display(),
        pub_path.display()
    );
    Ok(Output::new(
        &json!({ "signing_key": key_path, "public_key": pub_path, "public_key_hex": public }),
        human,
    ))
}

pub fn register_tool(args: &RegisterToolArgs) -> CliResult<Output> {
    let key = read_public_key(&args.public_key).map_err(CliError::usage)?;
    let identity = api(&args.remote).register_tool(&args.tool_id, key)?;
    let human = format!("registered {}\n", identity.tool_id);
    Ok(Output::new(&identity, human))
}

pub fn tools(args: &RemoteArgs) -> CliResult<Output> {
    let tools = api(args).tools()?;
    let human: String = tools.iter().map(|t| format!("{}\n", t.tool_id)).collect();
    Ok(Output::new(&tools, human))
}

pub fn fixture(args: &FixtureArgs) -> CliResult<Output> {
    let d = FixtureSize::default();
    let size = FixtureSize {
        owners: args.owners.unwrap_or(d.owners),
        consumers: args.consumers.unwrap_or(d.consumers),
        commits: args.commits.unwrap_or(d.commits),
        reviews: args.reviews.unwrap_or(d.reviews),
        messages: args.messages.unwrap_or(d.messages),
        days: d.days,
    };
    if size.owners == 0 && size.commits + size.reviews + size.messages > 0 {
        return Err(CliError::usage("events need at least one owner"));
    }
    let fixture = generate_fixture(args.seed, size);
    let text = fixture.to_jsonl_string();
    let summary = json!({
        "seed": args.seed,
        "size": size,
        "out": args.out,
    });
    match &args.out {
        Some(path) => {
            fs::write(path, text).map_err(CliError::general)?;
            Ok(Output::new(&summary, format!("wrote {}\n", path.display())))
        }
        None => {
            // The fixture itself is the output, whatever the format.
            std::io::stdout().write_all(text.as_bytes()).map_err(CliError::general)?;
            Ok(Output {
                json: serde_json::Value::Null,
                human: String::new(),
                failure: None,
            })
        }
    }
}
