use std::process::ExitCode;

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .with_writer(std::io::stderr)
        .init();
    let status = pattern_views::cli::run(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr());
    status.into()
}
