//! Command implementations. Every command returns the exact text it
//! prints to stdout; `--out` copies the command's primary artifact to a
//! file. All floats go through the canonical 12-digit form so repeated
//! runs are byte-identical.

use crate::statefile::{parse_layout, LayoutSpec, StateFile};
use qportrait::composite::{classify_entanglement, classify_transform, pair_coefficients, BipartiteLayout};
use qportrait::fmt::float12;
use qportrait::measure::{
    measure_series_stream, measurement_entropy, reduction_measure, FrequencyTable,
    MeasurementRecord,
};
use qportrait::multiqubit::{
    classify_multiqubit_transform, counter_distribution, counter_roi, pauli_coefficients,
    reconstruct_from_distributions, reconstruct_state, Axis, AxisSetting, PauliCoefficients,
    Reconstruction,
};
use qportrait::qudit::{
    portrait_distribution, qubit_portrait, resolution_of_identity, DensityMatrix,
    ResolutionOfIdentity,
};
use qportrait::{Error, Result};
use std::fmt::Write as _;
use std::path::Path;

fn args_error(message: impl Into<String>) -> Error {
    Error::parse("args", None, message)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| {
        Error::parse(path.display().to_string(), None, format!("cannot write file: {e}"))
    })
}

/// Outcome label in qubit order: character `q` is bit `q` of the index.
fn bit_label(k: usize, qubits: usize) -> String {
    (0..qubits).map(|q| if (k >> q) & 1 == 0 { '0' } else { '1' }).collect()
}

/// Parse an axes label and check it addresses the state's dimension.
fn setting_for(axes: &str, dim: usize) -> Result<AxisSetting> {
    let setting = AxisSetting::from_label(axes)?;
    let expected = 1usize << setting.qubits();
    if expected != dim {
        return Err(Error::DimensionMismatch { expected, actual: dim });
    }
    Ok(setting)
}

fn subset_label(key: &[(usize, Axis)]) -> String {
    key.iter()
        .map(|&(q, a)| format!("{q}:{}", a.letter()))
        .collect::<Vec<_>>()
        .join(",")
}

/// Keys in report order: subset size first, then component order.
fn report_keys(c: &PauliCoefficients) -> Vec<Vec<(usize, Axis)>> {
    let mut keys: Vec<Vec<(usize, Axis)>> = c.iter().map(|(k, _)| k.clone()).collect();
    keys.sort_by_key(|k| (k.len(), k.clone()));
    keys
}

pub fn portrait(
    state: &Path,
    axes: Option<&str>,
    sweep: Option<usize>,
    out: Option<&Path>,
) -> Result<String> {
    let file = StateFile::load(state)?;
    let rho = file.density()?;
    let mut body = String::new();
    match (axes, sweep) {
        (Some(_), Some(_)) => {
            return Err(args_error("choose one of --axes or --sweep, not both"))
        }
        (Some(label), None) => {
            let setting = setting_for(label, rho.dim())?;
            let distribution = counter_distribution(&rho, &setting.configuration())?;
            let _ = writeln!(body, "# portrait axes={label} dim={}", rho.dim());
            for (k, p) in distribution.iter().enumerate() {
                let _ = writeln!(body, "{} {}", bit_label(k, setting.qubits()), float12(*p));
            }
        }
        (None, Some(points)) => {
            if rho.dim() != 2 {
                return Err(Error::DimensionMismatch { expected: 2, actual: rho.dim() });
            }
            if points < 2 {
                return Err(args_error("--sweep needs at least two points"));
            }
            let _ = writeln!(body, "# portrait sweep points={points}");
            for i in 0..points {
                let theta = std::f64::consts::PI * i as f64 / (points - 1) as f64;
                let value = qubit_portrait(&rho, [theta.sin(), 0.0, theta.cos()])?;
                let _ = writeln!(body, "{} {}", float12(theta), float12(value));
            }
        }
        (None, None) => {
            let own = resolution_of_identity(rho.matrix())?;
            let distribution = portrait_distribution(&rho, &own)?;
            let _ = writeln!(body, "# portrait own-basis dim={}", rho.dim());
            for (k, p) in distribution.iter().enumerate() {
                let _ = writeln!(body, "{k} {}", float12(*p));
            }
        }
    }
    if let Some(path) = out {
        write_text(path, &body)?;
    }
    Ok(body)
}

/// The counter bank a measurement command runs against: named axes, or
/// the state's own eigenbasis.
fn bank_for(rho: &DensityMatrix, axes: Option<&str>) -> Result<(ResolutionOfIdentity, String, Option<usize>)> {
    match axes {
        Some(label) => {
            let setting = setting_for(label, rho.dim())?;
            let roi = counter_roi(&setting.configuration())?;
            Ok((roi, label.to_string(), Some(setting.qubits())))
        }
        None => Ok((resolution_of_identity(rho.matrix())?, "own".to_string(), None)),
    }
}

pub fn measure(
    state: &Path,
    axes: Option<&str>,
    shots: usize,
    seed: u64,
    out: Option<&Path>,
) -> Result<String> {
    let file = StateFile::load(state)?;
    let rho = file.density()?;
    let (roi, id, qubits) = bank_for(&rho, axes)?;
    let (record, table, _) = measure_series_stream(&rho, &roi, shots, &id, seed, 0)?;
    let mut body = String::new();
    let _ = writeln!(body, "# measure roi={id} shots={shots} seed={seed}");
    for k in 0..table.len() {
        let label = match qubits {
            Some(p) => bit_label(k, p),
            None => k.to_string(),
        };
        let _ = writeln!(body, "{label} {} {}", table.count(k), float12(table.frequency(k)));
    }
    match out {
        Some(path) => write_text(path, &record.to_text())?,
        None => body.push_str(&record.to_text()),
    }
    Ok(body)
}

/// Qubit count for reconstruction: an explicit `--layout p=K`, else the
/// state file's layout, else the power-of-two dimension.
fn resolve_qubits(file: &StateFile, layout: Option<&str>, source: &str) -> Result<usize> {
    let spec = match layout {
        Some(text) => Some(parse_layout(text, "args")?),
        None => file.layout_spec(source)?,
    };
    match spec {
        Some(LayoutSpec::Qubits(p)) => Ok(p),
        // A bipartite annotation describes a split, not the cell count;
        // any power-of-two dimension still reconstructs as qubits.
        Some(LayoutSpec::Bipartite { .. }) | None => {
            if file.dim >= 2 && file.dim.is_power_of_two() {
                Ok(file.dim.trailing_zeros() as usize)
            } else {
                Err(args_error(format!("dimension {} is not a power of two", file.dim)))
            }
        }
    }
}

fn reconstruction_report(
    result: &Reconstruction,
    truth: Option<(&PauliCoefficients, &DensityMatrix)>,
    header: &str,
) -> String {
    let mut body = String::new();
    let _ = writeln!(body, "{header}");
    for key in report_keys(&result.coefficients) {
        let value = result.coefficients.coefficient(&key);
        match truth {
            Some((coeffs, _)) => {
                let err = (value - coeffs.coefficient(&key)).abs();
                let _ = writeln!(
                    body,
                    "S={} d={} err={}",
                    subset_label(&key),
                    float12(value),
                    float12(err)
                );
            }
            None => {
                let _ = writeln!(body, "S={} d={}", subset_label(&key), float12(value));
            }
        }
    }
    let _ = writeln!(body, "min_eigenvalue={}", float12(result.min_eigenvalue));
    if let Some((coeffs, rho)) = truth {
        let _ = writeln!(
            body,
            "max_coefficient_error={}",
            float12(result.coefficients.max_abs_diff(coeffs))
        );
        let _ = writeln!(
            body,
            "max_entry_deviation={}",
            float12(result.estimate.max_abs_diff(rho.matrix()))
        );
    }
    let _ = writeln!(body, "repaired={}", if result.repaired.is_some() { "yes" } else { "no" });
    body
}

#[allow(clippy::too_many_arguments)]
pub fn reconstruct(
    state: Option<&Path>,
    records: Option<&Path>,
    shots: Option<usize>,
    seed: Option<u64>,
    exact: bool,
    repair: bool,
    layout: Option<&str>,
    out: Option<&Path>,
) -> Result<String> {
    let (qubits, result, mut body) = match (state, records) {
        (Some(_), Some(_)) => {
            return Err(args_error("choose one of --state or --records, not both"))
        }
        (None, None) => return Err(args_error("reconstruct needs --state or --records")),
        (Some(path), None) => {
            let file = StateFile::load(path)?;
            let rho = file.density()?;
            let qubits = resolve_qubits(&file, layout, &path.display().to_string())?;
            if 1usize << qubits != rho.dim() {
                return Err(Error::DimensionMismatch { expected: 1 << qubits, actual: rho.dim() });
            }
            let truth = pauli_coefficients(&rho)?;
            let (header, result) = if exact {
                let data: Vec<(AxisSetting, Vec<f64>)> = AxisSetting::all(qubits)
                    .into_iter()
                    .map(|setting| {
                        counter_distribution(&rho, &setting.configuration())
                            .map(|distribution| (setting, distribution))
                    })
                    .collect::<Result<_>>()?;
                let header = format!("# reconstruct qubits={qubits} mode=exact");
                (header, reconstruct_from_distributions(&data, qubits, repair)?)
            } else {
                let shots = shots.ok_or_else(|| args_error("sampled mode needs --shots"))?;
                let seed = seed.ok_or_else(|| args_error("sampled mode needs --seed"))?;
                let mut data = Vec::new();
                for (index, setting) in AxisSetting::all(qubits).into_iter().enumerate() {
                    let roi = counter_roi(&setting.configuration())?;
                    let (_, table, _) = measure_series_stream(
                        &rho,
                        &roi,
                        shots,
                        &setting.label(),
                        seed,
                        index as u64,
                    )?;
                    data.push((setting, table));
                }
                let header =
                    format!("# reconstruct qubits={qubits} mode=sampled shots={shots} seed={seed}");
                (header, reconstruct_state(&data, qubits, repair)?)
            };
            let body = reconstruction_report(&result, Some((&truth, &rho)), &header);
            (qubits, result, body)
        }
        (None, Some(dir)) => {
            let dir_name = dir.display().to_string();
            let mut paths: Vec<std::path::PathBuf> = std::fs::read_dir(dir)
                .map_err(|e| {
                    Error::parse(dir_name.clone(), None, format!("cannot read directory: {e}"))
                })?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| p.is_file())
                .collect();
            paths.sort();
            if paths.is_empty() {
                return Err(Error::parse(dir_name, None, "no record files found"));
            }
            let mut data = Vec::new();
            let mut qubits = None;
            for path in &paths {
                let name = path.display().to_string();
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Error::parse(name.clone(), None, format!("cannot read file: {e}"))
                })?;
                let record = MeasurementRecord::from_text(&text, &name)?;
                let setting = AxisSetting::from_label(&record.settings_id).map_err(|_| {
                    Error::parse(
                        name.clone(),
                        Some(1),
                        format!("record roi `{}` is not an axes label", record.settings_id),
                    )
                })?;
                let p = *qubits.get_or_insert(setting.qubits());
                if setting.qubits() != p {
                    return Err(Error::LengthMismatch { expected: p, actual: setting.qubits() });
                }
                let table = FrequencyTable::from_record(&record, 1 << p)?;
                data.push((setting, table));
            }
            let qubits = qubits.expect("at least one record was parsed");
            let result = reconstruct_state(&data, qubits, repair)?;
            let header = format!("# reconstruct qubits={qubits} mode=records");
            let body = reconstruction_report(&result, None, &header);
            (qubits, result, body)
        }
    };
    let estimate = match &result.repaired {
        Some(state) => state.matrix().clone(),
        None => result.estimate.clone(),
    };
    let estimate_file = StateFile::from_matrix(&estimate, Some(LayoutSpec::Qubits(qubits)));
    match out {
        Some(path) => write_text(path, &estimate_file.to_json())?,
        None => body.push_str(&estimate_file.to_json()),
    }
    Ok(body)
}

pub fn classify(
    state: Option<&Path>,
    unitary: Option<&Path>,
    layout: Option<&str>,
) -> Result<String> {
    match (state, unitary) {
        (Some(_), Some(_)) => Err(args_error("choose one of --state or --unitary, not both")),
        (None, None) => Err(args_error("classify needs --state or --unitary")),
        (Some(path), None) => {
            let file = StateFile::load(path)?;
            let rho = file.density()?;
            if rho.dim() != 4 {
                return Err(Error::DimensionMismatch { expected: 4, actual: rho.dim() });
            }
            let verdict = classify_entanglement(&rho)?;
            let layout22 = BipartiteLayout::new(2, 2)?;
            let coeffs = pair_coefficients(&rho, &layout22)?;
            let (d_l, d_s) = coeffs.qubit_directors().expect("dim 4 uses the 2x2 layout");
            let mut body = String::new();
            let _ = writeln!(body, "class={:?}", verdict.class);
            let _ = writeln!(body, "rank={}", verdict.covariance_rank);
            let _ = writeln!(
                body,
                "sigma={} {} {}",
                float12(verdict.singular_values[0]),
                float12(verdict.singular_values[1]),
                float12(verdict.singular_values[2])
            );
            let _ = writeln!(
                body,
                "director_l={} {} {}",
                float12(d_l[0]),
                float12(d_l[1]),
                float12(d_l[2])
            );
            let _ = writeln!(
                body,
                "director_s={} {} {}",
                float12(d_s[0]),
                float12(d_s[1]),
                float12(d_s[2])
            );
            Ok(body)
        }
        (None, Some(path)) => {
            let file = StateFile::load(path)?;
            let m = file.matrix();
            let spec = match layout {
                Some(text) => Some(parse_layout(text, "args")?),
                None => file.layout_spec(&path.display().to_string())?,
            };
            let class = match spec {
                Some(LayoutSpec::Bipartite { n_l, n_s }) => {
                    classify_transform(&m, &BipartiteLayout::new(n_l, n_s)?)?
                }
                Some(LayoutSpec::Qubits(_)) => classify_multiqubit_transform(&m)?,
                None => {
                    if file.dim >= 2 && file.dim.is_power_of_two() {
                        classify_multiqubit_transform(&m)?
                    } else {
                        return Err(args_error(
                            "transform classification needs --layout for non-qubit dimensions",
                        ));
                    }
                }
            };
            Ok(format!("transform_class={class:?}\n"))
        }
    }
}

pub fn reduction(state: &Path, axes_a: &str, axes_b: &str) -> Result<String> {
    let file = StateFile::load(state)?;
    let rho = file.density()?;
    let bank_a = counter_roi(&setting_for(axes_a, rho.dim())?.configuration())?;
    let bank_b = counter_roi(&setting_for(axes_b, rho.dim())?.configuration())?;
    let measure = reduction_measure(&bank_a, &bank_b)?;
    let distribution = portrait_distribution(&rho, &bank_b)?;
    let entropy = measurement_entropy(&distribution)?;
    let mut body = String::new();
    let _ = writeln!(body, "reduction={}", float12(measure.value));
    let _ = writeln!(body, "moved={}", measure.moved_count);
    let _ = writeln!(body, "entropy={}", float12(entropy));
    Ok(body)
}
