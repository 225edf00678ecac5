use clap::Parser;

fn main() {
    let cfg = kohn_sphere_cli::RunConfig::parse();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = kohn_sphere_cli::run(&cfg, &mut stdout.lock(), &mut stderr.lock());
    std::process::exit(code);
}
