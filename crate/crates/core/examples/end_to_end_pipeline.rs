//! The command-line workflow driven in-process: synthesize a dataset tree,
//! extract features, evaluate Office gallery against Day probes.
//!
//!     cargo run --release --example end_to_end_pipeline

use faceid::cli;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let root = dir.path();
    let p = |name: &str| root.join(name).to_string_lossy().into_owned();
    std::fs::write(
        root.join("run.toml"),
        "descriptor = \"LPQ\"\ngallery_condition = \"office\"\nprobe_condition = \"day\"\nprobes_per_subject = 20\n",
    )?;

    let steps: [&[&str]; 3] = [
        &["synth-dataset", "--out", &p("data"), "--subjects", "10", "--images", "32", "--noise", "30"],
        &["--config", &p("run.toml"), "--jobs", "4", "extract", "--input", &p("data"), "--out", &p("lpq.csv")],
        &[
            "--config", &p("run.toml"), "evaluate", "--gallery", &p("lpq.csv"), "--probes", &p("lpq.csv"),
            "--out", &p("report.csv"),
        ],
    ];
    for args in steps {
        let code = cli::run(std::iter::once("faceid").chain(args.iter().copied()));
        if code != cli::EXIT_OK {
            return Err(format!("faceid {} exited with {code}", args.join(" ")).into());
        }
    }
    print!("{}", std::fs::read_to_string(root.join("report.csv"))?);
    Ok(())
}
