//! Acceptance gate, command-line layer: the scripted scenario must produce
//! byte-identical terminal output and artifact files across independent runs.

use std::path::{Path, PathBuf};
use std::process::Command;

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_qportrait")
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_str()
        .unwrap()
        .to_owned()
}

/// Runs the full scripted scenario into `dir`, returning the concatenated
/// stdout of every step and the paths of the artifacts written.
fn scenario(dir: &Path) -> (String, Vec<PathBuf>) {
    let bell = fixture("bell.json");
    let ghz = fixture("ghz3.json");
    let qubit = fixture("qubit06.json");
    let artifact = |name: &str| dir.join(name);
    let steps: Vec<Vec<String>> = vec![
        vec![
            "portrait".into(),
            "--state".into(),
            bell.clone(),
            "--axes".into(),
            "zz".into(),
            "--out".into(),
            artifact("portrait_bell.txt").to_str().unwrap().into(),
        ],
        vec![
            "portrait".into(),
            "--state".into(),
            qubit.clone(),
            "--sweep".into(),
            "25".into(),
            "--out".into(),
            artifact("sweep_qubit.txt").to_str().unwrap().into(),
        ],
        vec![
            "measure".into(),
            "--state".into(),
            bell.clone(),
            "--axes".into(),
            "zz".into(),
            "--shots".into(),
            "10000".into(),
            "--seed".into(),
            "42".into(),
            "--out".into(),
            artifact("record_bell.txt").to_str().unwrap().into(),
        ],
        vec![
            "measure".into(),
            "--state".into(),
            ghz.clone(),
            "--axes".into(),
            "zzz".into(),
            "--shots".into(),
            "10000".into(),
            "--seed".into(),
            "42".into(),
            "--out".into(),
            artifact("record_ghz.txt").to_str().unwrap().into(),
        ],
        vec![
            "reconstruct".into(),
            "--state".into(),
            bell.clone(),
            "--exact".into(),
            "--out".into(),
            artifact("estimate_bell.json").to_str().unwrap().into(),
        ],
        vec![
            "reconstruct".into(),
            "--state".into(),
            ghz.clone(),
            "--shots".into(),
            "100000".into(),
            "--seed".into(),
            "42".into(),
            "--psd-repair".into(),
            "--out".into(),
            artifact("estimate_ghz.json").to_str().unwrap().into(),
        ],
        vec!["classify".into(), "--state".into(), bell.clone()],
        vec![
            "reduction".into(),
            "--state".into(),
            bell.clone(),
            "--axes-a".into(),
            "zz".into(),
            "--axes-b".into(),
            "xx".into(),
        ],
    ];
    let mut transcript = String::new();
    for step in &steps {
        let output = Command::new(binary()).args(step).output().expect("binary runs");
        assert_eq!(
            output.status.code(),
            Some(0),
            "step {:?} failed: {}",
            step,
            String::from_utf8_lossy(&output.stderr)
        );
        transcript.push_str(&format!("$ qportrait {}\n", step.join(" ")));
        transcript.push_str(&String::from_utf8(output.stdout).expect("stdout is utf-8"));
    }
    let artifacts = vec![
        artifact("portrait_bell.txt"),
        artifact("sweep_qubit.txt"),
        artifact("record_bell.txt"),
        artifact("record_ghz.txt"),
        artifact("estimate_bell.json"),
        artifact("estimate_ghz.json"),
    ];
    (transcript, artifacts)
}

#[test]
fn criterion_10_cli_determinism() {
    let first_dir = tempfile::tempdir().unwrap();
    let second_dir = tempfile::tempdir().unwrap();
    let (first_out, first_files) = scenario(first_dir.path());
    let (second_out, second_files) = scenario(second_dir.path());

    // Absolute paths differ between the runs, so the transcripts are
    // compared after stripping each run's scratch directory prefix.
    let normalize = |text: &str, dir: &Path| text.replace(dir.to_str().unwrap(), "<dir>");
    assert_eq!(
        normalize(&first_out, first_dir.path()),
        normalize(&second_out, second_dir.path()),
        "terminal output diverged between runs"
    );

    assert_eq!(first_files.len(), second_files.len());
    for (a, b) in first_files.iter().zip(&second_files) {
        let left = std::fs::read(a).unwrap_or_else(|_| panic!("missing artifact {}", a.display()));
        let right = std::fs::read(b).unwrap_or_else(|_| panic!("missing artifact {}", b.display()));
        assert_eq!(
            left,
            right,
            "artifact {} diverged between runs",
            a.file_name().unwrap().to_string_lossy()
        );
    }

    // The sampled reconstruction inside the scenario also has to land
    // within the statistical band for its shot count. It reports the
    // last error line of the transcript; the earlier one belongs to the
    // exact inversion.
    let error = first_out
        .lines()
        .filter_map(|l| l.strip_prefix("max_coefficient_error="))
        .last()
        .expect("sampled reconstruction reports its error");
    let error: f64 = error.parse().unwrap();
    assert!(error <= 5.0 / 100000.0f64.sqrt(), "coefficient error {error}");

    println!(
        "criterion 10 cli-determinism: PASS ({} artifacts and {} transcript bytes identical)",
        first_files.len(),
        first_out.len()
    );
}
