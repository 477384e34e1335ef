//! Seeded measurement acts and series, reduced density matrices, reduction
//! measures between counter banks, and measurement entropy.
//!
//! A single act samples an outcome by the Born rule and applies the
//! projective update `P_k rho P_k / p_k`. A series repeats acts with an
//! explicit ChaCha stream so every run is replayable bit-for-bit; shots may
//! be partitioned across workers only via [`stream_rng`] sub-streams.

use crate::error::{Error, Result};
use crate::linalg::{unitary_eig, CMatrix};
use crate::qudit::{
    portrait_distribution, projectors_identical, transform_matrix, DensityMatrix, Observable,
    ResolutionOfIdentity,
};
use crate::tolerance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Deterministic RNG for a measurement campaign.
pub fn series_rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Sub-stream `stream` of the campaign seeded by `seed`. Distinct streams
/// are independent, so per-setting series can run concurrently and still
/// merge deterministically.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = series_rng(seed);
    rng.set_stream(stream);
    rng
}

/// Ordered outcome log of a measurement series.
///
/// One entry per shot; `None` marks a shot where no counter fired. Missed
/// shots stay in the record but are excluded from frequencies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementRecord {
    pub settings_id: String,
    pub seed: u64,
    pub outcomes: Vec<Option<usize>>,
}

impl MeasurementRecord {
    pub fn shots(&self) -> usize {
        self.outcomes.len()
    }

    /// Serializes to the line format: a `# roi=<id> shots=<K> seed=<s>`
    /// header, then one outcome index (or `miss`) per line.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "# roi={} shots={} seed={}\n",
            self.settings_id,
            self.outcomes.len(),
            self.seed
        );
        for outcome in &self.outcomes {
            match outcome {
                Some(k) => {
                    out.push_str(&k.to_string());
                    out.push('\n');
                }
                None => out.push_str("miss\n"),
            }
        }
        out
    }

    /// Parses the text format; `source_name` labels any parse error.
    pub fn from_text(text: &str, source_name: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::parse(source_name, None, "empty record"))?;
        let bad_header =
            |msg: &str| Error::parse(source_name, Some(1), format!("bad header: {msg}"));
        let rest = header
            .strip_prefix("# ")
            .ok_or_else(|| bad_header("expected `# roi=... shots=... seed=...`"))?;
        let mut settings_id = None;
        let mut shots = None;
        let mut seed = None;
        for token in rest.split_whitespace() {
            if let Some(v) = token.strip_prefix("roi=") {
                settings_id = Some(v.to_string());
            } else if let Some(v) = token.strip_prefix("shots=") {
                shots = Some(
                    v.parse::<usize>()
                        .map_err(|_| bad_header("shots is not an unsigned integer"))?,
                );
            } else if let Some(v) = token.strip_prefix("seed=") {
                seed = Some(
                    v.parse::<u64>()
                        .map_err(|_| bad_header("seed is not an unsigned integer"))?,
                );
            } else {
                return Err(bad_header(&format!("unknown field `{token}`")));
            }
        }
        let settings_id = settings_id.ok_or_else(|| bad_header("missing roi="))?;
        let shots = shots.ok_or_else(|| bad_header("missing shots="))?;
        let seed = seed.ok_or_else(|| bad_header("missing seed="))?;

        let mut outcomes = Vec::with_capacity(shots);
        for (i, line) in lines.enumerate() {
            let line_no = i + 2;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if line == "miss" {
                outcomes.push(None);
            } else {
                let k = line.parse::<usize>().map_err(|_| {
                    Error::parse(
                        source_name,
                        Some(line_no),
                        format!("expected an outcome index or `miss`, got `{line}`"),
                    )
                })?;
                outcomes.push(Some(k));
            }
        }
        if outcomes.len() != shots {
            return Err(Error::parse(
                source_name,
                None,
                format!("header declares {shots} shots but {} lines follow", outcomes.len()),
            ));
        }
        Ok(MeasurementRecord { settings_id, seed, outcomes })
    }
}

/// Outcome counts of a series and the frequencies they define.
///
/// Frequencies are ratios of integer counts over the counted total, so
/// they sum to 1 exactly whenever any shot was counted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyTable {
    counts: Vec<u64>,
    total: u64,
}

impl FrequencyTable {
    pub fn from_counts(counts: Vec<u64>) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::ShotCountZero);
        }
        Ok(FrequencyTable { counts, total })
    }

    /// Tallies a record against a bank of `outcome_count` counters,
    /// skipping missed shots.
    pub fn from_record(record: &MeasurementRecord, outcome_count: usize) -> Result<Self> {
        let mut counts = vec![0u64; outcome_count];
        for outcome in record.outcomes.iter().flatten() {
            if *outcome >= outcome_count {
                return Err(Error::IndexOutOfRange { index: *outcome, bound: outcome_count });
            }
            counts[*outcome] += 1;
        }
        FrequencyTable::from_counts(counts)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn count(&self, k: usize) -> u64 {
        self.counts[k]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Counted shots; excludes misses.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn frequency(&self, k: usize) -> f64 {
        self.counts[k] as f64 / self.total as f64
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.counts.len()).map(|k| self.frequency(k)).collect()
    }

    /// Merges partitioned series by count addition.
    pub fn merge(&self, other: &FrequencyTable) -> Result<FrequencyTable> {
        if self.counts.len() != other.counts.len() {
            return Err(Error::LengthMismatch {
                expected: self.counts.len(),
                actual: other.counts.len(),
            });
        }
        FrequencyTable::from_counts(
            self.counts.iter().zip(&other.counts).map(|(a, b)| a + b).collect(),
        )
    }
}

fn sample_index(p: &[f64], rng: &mut impl Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (k, &pk) in p.iter().enumerate() {
        acc += pk;
        if u < acc {
            return k;
        }
    }
    // Rounding can leave the cumulative sum a hair below 1; the tail
    // belongs to the last outcome that has any probability.
    p.iter().rposition(|&x| x > 0.0).unwrap_or(p.len() - 1)
}

fn luders_update(
    rho: &DensityMatrix,
    roi: &ResolutionOfIdentity,
    k: usize,
    pk: f64,
) -> Result<DensityMatrix> {
    if pk < tolerance::ZERO_PROBABILITY {
        return Err(Error::ZeroProbabilityOutcome { index: k });
    }
    if roi.rank(k) == 1 {
        // P rho P / p equals the projector itself for a rank-1 member.
        return DensityMatrix::new(roi.projector(k).clone());
    }
    let proj = roi.projector(k);
    let wrapped = proj.mul(rho.matrix()).mul(proj);
    let trace = wrapped.trace().re;
    if trace < tolerance::ZERO_PROBABILITY {
        return Err(Error::ZeroProbabilityOutcome { index: k });
    }
    DensityMatrix::new(wrapped.scale_real(1.0 / trace))
}

/// One act of measurement: samples outcome `k` with probability
/// `tr(P_k rho)` and applies the projective update `P_k rho P_k / p_k`.
/// Coarse banks are allowed; the update then genuinely depends on `rho`.
pub fn measure_act(
    rho: &DensityMatrix,
    roi: &ResolutionOfIdentity,
    rng: &mut impl Rng,
) -> Result<(usize, DensityMatrix)> {
    let p = portrait_distribution(rho, roi)?;
    let k = sample_index(&p, rng);
    Ok((k, luders_update(rho, roi, k, p[k])?))
}

/// A series of `shots` independent acts on identically prepared copies,
/// driven by sub-stream `stream` of campaign `seed`.
///
/// Returns the ordered record, the frequency table, and the
/// frequency-weighted average of the post-measurement states; for a
/// rank-1 bank the average is exactly `sum_k nu_k P_k`.
pub fn measure_series_stream(
    rho: &DensityMatrix,
    roi: &ResolutionOfIdentity,
    shots: usize,
    settings_id: &str,
    seed: u64,
    stream: u64,
) -> Result<(MeasurementRecord, FrequencyTable, DensityMatrix)> {
    if shots == 0 {
        return Err(Error::ShotCountZero);
    }
    let p = portrait_distribution(rho, roi)?;
    let mut rng = stream_rng(seed, stream);
    let mut outcomes = Vec::with_capacity(shots);
    let mut counts = vec![0u64; roi.len()];
    for _ in 0..shots {
        let k = sample_index(&p, &mut rng);
        counts[k] += 1;
        outcomes.push(Some(k));
    }
    let table = FrequencyTable::from_counts(counts)?;
    let mut averaged = CMatrix::zeros(rho.dim(), rho.dim());
    for k in 0..roi.len() {
        if table.count(k) > 0 {
            let post = luders_update(rho, roi, k, p[k])?;
            averaged = &averaged + &post.matrix().scale_real(table.frequency(k));
        }
    }
    let record = MeasurementRecord { settings_id: settings_id.to_string(), seed, outcomes };
    Ok((record, table, DensityMatrix::new(averaged)?))
}

/// [`measure_series_stream`] on the campaign's root stream.
pub fn measure_series(
    rho: &DensityMatrix,
    roi: &ResolutionOfIdentity,
    shots: usize,
    settings_id: &str,
    seed: u64,
) -> Result<(MeasurementRecord, FrequencyTable, DensityMatrix)> {
    measure_series_stream(rho, roi, shots, settings_id, seed, 0)
}

/// The reduced density matrix `sum_k p_k P_k` over the observable's
/// eigenbasis: the mathematical expectation of the series-averaged matrix.
///
/// This is the statistics-bearing object of a measurement campaign, not
/// the state left behind by any single act, and the two coincide only for
/// eigenstates.
pub fn reduced_density(rho: &DensityMatrix, a: &Observable) -> Result<DensityMatrix> {
    let p = portrait_distribution(rho, a.resolution())?;
    let mut m = CMatrix::zeros(rho.dim(), rho.dim());
    for (k, &pk) in p.iter().enumerate() {
        if pk != 0.0 {
            m = &m + &a.resolution().projector(k).scale_real(pk);
        }
    }
    DensityMatrix::new(m)
}

/// Non-commutativity measure between two rank-1 counter banks.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionMeasure {
    /// `sqrt(sum phi_n^2)` over the trace-fixed eigenphases of the
    /// transform matrix carrying one bank onto the other.
    pub value: f64,
    /// The trace-fixed eigenphases, in the transform's spectral order.
    pub phases: Vec<f64>,
    /// How many eigendirections the transform actually moves: phases with
    /// magnitude above the reporting cutoff.
    pub moved_count: usize,
}

/// Measures how much one counter bank reduces states prepared diagonal in
/// the other, through the generator of the connecting transform matrix.
///
/// Identical banks (bitwise-equal projectors) short-circuit to an exact
/// zero. The eigenphases live on the principal branch, so the value is a
/// pseudo-metric: transforms differing by non-principal windings compare
/// by their wrapped generators.
pub fn reduction_measure(
    from: &ResolutionOfIdentity,
    to: &ResolutionOfIdentity,
) -> Result<ReductionMeasure> {
    if projectors_identical(from, to) {
        return Ok(ReductionMeasure {
            value: 0.0,
            phases: vec![0.0; from.len()],
            moved_count: 0,
        });
    }
    let u = transform_matrix(from, to)?;
    let dec = unitary_eig(&u)?;
    let mean = dec.phases.iter().sum::<f64>() / dec.phases.len() as f64;
    let phases: Vec<f64> = dec.phases.iter().map(|phi| phi - mean).collect();
    let value = phases.iter().map(|phi| phi * phi).sum::<f64>().sqrt();
    let moved_count = phases
        .iter()
        .filter(|phi| phi.abs() > tolerance::scaled(tolerance::PHASE_REPORT))
        .count();
    Ok(ReductionMeasure { value, phases, moved_count })
}

/// Shannon entropy `-sum p_k log2 p_k` of an outcome distribution, in
/// bits, with `0 log 0 = 0`.
pub fn measurement_entropy(p: &[f64]) -> Result<f64> {
    let slack = tolerance::scaled(tolerance::ENTROPY_INPUT);
    let mut sum = 0.0;
    for &x in p {
        if x < -slack || x > 1.0 + slack {
            return Err(Error::InvalidProbability { value: x });
        }
        sum += x;
    }
    if (sum - 1.0).abs() > slack {
        return Err(Error::NotNormalized { sum });
    }
    Ok(-p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.log2()).sum::<f64>())
}

/// Entropy of the state itself: the measurement entropy against the
/// state's own eigenbasis, which no rank-1 counter bank can undercut.
pub fn state_entropy(rho: &DensityMatrix) -> Result<f64> {
    measurement_entropy(&rho.eigenvalues()?)
}
