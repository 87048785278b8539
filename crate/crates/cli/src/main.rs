use clap::error::ErrorKind;
use clap::Parser;
use gammasum_cli::args::Cli;

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("GAMMASUM_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| format!("GAMMASUM_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        std::process::exit(3);
    }
    let emit = cli.common.emit_config;
    let job = match cli.into_job() {
        Ok(j) => j,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(3);
        }
    };
    if emit {
        print!("{}", job.to_config_string());
        return;
    }
    std::process::exit(gammasum_cli::run(&job));
}
