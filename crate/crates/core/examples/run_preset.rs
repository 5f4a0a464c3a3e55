//! Runs a shipped preset through the configuration runner, as the `nhqc`
//! binary does. Arguments: command (spectrum|gate|prep|sweep|validate),
//! preset name, output directory.

use nhqc::config::preset;
use nhqc::runner::{run, Command, RunOptions};

fn main() -> nhqc::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let command = match args.get(1).map(String::as_str).unwrap_or("spectrum") {
        "gate" => Command::Gate,
        "prep" => Command::Prep,
        "sweep" => Command::Sweep,
        "validate" => Command::Validate,
        _ => Command::Spectrum,
    };
    let cfg = preset(args.get(2).map(String::as_str).unwrap_or("fig6"))?;
    let out = args.get(3).cloned().unwrap_or_else(|| "out".into());
    let summary = run(command, &cfg, &RunOptions { out: out.into(), override_rwa: false, seed: None })?;
    for f in summary.files {
        println!("{f}");
    }
    Ok(())
}
