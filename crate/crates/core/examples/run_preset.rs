//! Runs a preset and writes its CSV files into a directory.
//!
//! `cargo run --release --example run_preset -- fig3 out/ [realizations]`

use std::path::PathBuf;

use mbchaos::harness::{preset, run_experiment_named, write_csv, PRESETS};

fn main() -> mbchaos::Result<()> {
    let mut args = std::env::args().skip(1);
    let Some(name) = args.next() else {
        eprintln!("usage: run_preset <name> [dir] [realizations]");
        for (n, d) in PRESETS {
            eprintln!("  {n:<14} {d}");
        }
        std::process::exit(2);
    };
    let dir = PathBuf::from(args.next().unwrap_or_else(|| ".".into()));
    let mut cfg = preset(&name)?;
    if let Some(r) = args.next().and_then(|s| s.parse().ok()) {
        cfg.realizations = r;
    }
    std::fs::create_dir_all(&dir).map_err(|e| mbchaos::Error::Config(format!("{}: {e}", dir.display())))?;
    let result = run_experiment_named(&cfg, Some(&name))?;
    for path in write_csv(&result, &dir.join(format!("{name}.csv")))? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
