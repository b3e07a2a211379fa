//! Sequential projective measurements on an entangled photon pair.
//!
//! Photon `A` may be measured at several times (each measurement collapses
//! it), photon `B` once. Joint outcome probabilities come from applying
//! projector sandwiches `ρ → Π ρ Π` branch by branch in timeline order;
//! shot sampling then draws from those exact branch probabilities.

use std::fmt;
use std::io;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{tensor, ComplexMatrix, C64};
use crate::pauli::Pauli;

/// Shots per independently seeded block. Each shot consumes one 64-bit word
/// at a fixed stream position, so counts do not depend on this value.
pub const SHOT_BATCH: u64 = 1 << 14;

const UNIT_TOL: f64 = 1e-10;

/// Physical carrier. The two-carrier state is ordered `(B, A)`, matching
/// the event order `Q1 = B`, `Q2 = A@t1`, `Q3 = A@t2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Carrier {
    A,
    B,
}

impl Carrier {
    fn embed(self, op: &ComplexMatrix) -> ComplexMatrix {
        let id = ComplexMatrix::identity(2);
        match self {
            Carrier::B => tensor(op, &id),
            Carrier::A => tensor(&id, op),
        }
    }
}

impl fmt::Display for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Carrier::A => write!(f, "A"),
            Carrier::B => write!(f, "B"),
        }
    }
}

/// Unit measurement direction on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct Axis([f64; 3]);

impl Axis {
    pub fn new(v: [f64; 3]) -> Result<Self> {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !n.is_finite() || (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::invalid(format!("axis {v:?} is not a unit vector")));
        }
        Ok(Self(v))
    }

    /// Normalises `v`; fails on the zero vector.
    pub fn normalized(v: [f64; 3]) -> Result<Self> {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::invalid("cannot normalise a zero axis"));
        }
        Ok(Self([v[0] / n, v[1] / n, v[2] / n]))
    }

    pub fn x() -> Self {
        Self([1.0, 0.0, 0.0])
    }

    pub fn y() -> Self {
        Self([0.0, 1.0, 0.0])
    }

    pub fn z() -> Self {
        Self([0.0, 0.0, 1.0])
    }

    pub fn pauli(p: Pauli) -> Result<Self> {
        match p {
            Pauli::X => Ok(Self::x()),
            Pauli::Y => Ok(Self::y()),
            Pauli::Z => Ok(Self::z()),
            Pauli::I => Err(Error::invalid("the identity is not a measurement axis")),
        }
    }

    pub fn vector(&self) -> [f64; 3] {
        self.0
    }

    /// `n·σ`.
    pub fn observable(&self) -> ComplexMatrix {
        let [x, y, z] = self.0;
        ComplexMatrix::from_rows(vec![
            vec![C64::new(z, 0.0), C64::new(x, -y)],
            vec![C64::new(x, y), C64::new(-z, 0.0)],
        ])
        .expect("static 2x2")
    }

    /// `(I + sign·n·σ)/2`.
    pub fn projector(&self, sign: i8) -> ComplexMatrix {
        let s = f64::from(sign);
        (&ComplexMatrix::identity(2) + &self.observable().scale_real(s)).scale_real(0.5)
    }

    fn as_pauli(&self) -> Option<Pauli> {
        [Pauli::X, Pauli::Y, Pauli::Z]
            .into_iter()
            .find(|&p| Axis::pauli(p).map(|a| a.0 == self.0).unwrap_or(false))
    }
}

impl TryFrom<[f64; 3]> for Axis {
    type Error = Error;

    fn try_from(v: [f64; 3]) -> Result<Self> {
        Axis::new(v)
    }
}

impl From<Axis> for [f64; 3] {
    fn from(a: Axis) -> Self {
        a.0
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_pauli() {
            Some(p) => write!(f, "{p}"),
            None => write!(f, "({:.6},{:.6},{:.6})", self.0[0], self.0[1], self.0[2]),
        }
    }
}

/// A projective `±1` measurement of `axis` on `carrier` at time tag `time`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub carrier: Carrier,
    pub time: u32,
    pub axis: Axis,
}

impl Measurement {
    pub fn new(carrier: Carrier, time: u32, axis: Axis) -> Self {
        Self { carrier, time, axis }
    }
}

impl fmt::Display for Measurement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@t{}:{}", self.carrier, self.time, self.axis)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TimelineEvent {
    PrepareUnitary { carrier: Carrier, unitary: ComplexMatrix },
    Measure(Measurement),
}

/// An initial two-carrier state and an ordered list of operations on it.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementTimeline {
    initial_state: ComplexMatrix,
    events: Vec<TimelineEvent>,
}

impl MeasurementTimeline {
    pub fn new(initial_state: ComplexMatrix, events: Vec<TimelineEvent>) -> Result<Self> {
        if initial_state.dims() != (4, 4) {
            return Err(Error::invalid("initial state must be a two-qubit density matrix"));
        }
        if !initial_state.is_hermitian(UNIT_TOL) || (initial_state.trace().re - 1.0).abs() > 1e-8 {
            return Err(Error::invalid("initial state must be Hermitian with unit trace"));
        }
        let mut last_time: [Option<u32>; 2] = [None, None];
        for e in &events {
            match e {
                TimelineEvent::PrepareUnitary { unitary, .. } => {
                    if unitary.dims() != (2, 2) || !unitary.is_unitary(UNIT_TOL) {
                        return Err(Error::invalid("timeline unitary must be a 2x2 unitary"));
                    }
                }
                TimelineEvent::Measure(m) => {
                    let slot = &mut last_time[m.carrier as usize];
                    if let Some(prev) = *slot {
                        if m.time <= prev {
                            return Err(Error::invalid(format!(
                                "measurement {m} is not strictly after t{prev} on carrier {}",
                                m.carrier
                            )));
                        }
                    }
                    *slot = Some(m.time);
                }
            }
        }
        Ok(Self {
            initial_state,
            events,
        })
    }

    /// Convenience: measurements only, no intermediate unitaries.
    pub fn measurements(initial_state: ComplexMatrix, measures: &[Measurement]) -> Result<Self> {
        Self::new(
            initial_state,
            measures.iter().copied().map(TimelineEvent::Measure).collect(),
        )
    }

    pub fn events(&self) -> &[TimelineEvent] {
        &self.events
    }

    pub fn initial_state(&self) -> &ComplexMatrix {
        &self.initial_state
    }

    pub fn measure_events(&self) -> Vec<Measurement> {
        self.events
            .iter()
            .filter_map(|e| match e {
                TimelineEvent::Measure(m) => Some(*m),
                TimelineEvent::PrepareUnitary { .. } => None,
            })
            .collect()
    }

    /// Space-separated measurement labels, e.g. `B@t1:Z A@t1:X`.
    pub fn setting_label(&self) -> String {
        self.measure_events()
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Outcome tuple index: event 0 is the most significant bit, bit 0 means +1.
fn outcome_signs(index: usize, n_events: usize) -> Vec<i8> {
    (0..n_events)
        .map(|k| if (index >> (n_events - 1 - k)) & 1 == 0 { 1 } else { -1 })
        .collect()
}

fn format_outcome(signs: &[i8]) -> String {
    let parts: Vec<&str> = signs.iter().map(|&s| if s > 0 { "+1" } else { "-1" }).collect();
    format!("({})", parts.join(","))
}

/// Joint probabilities of all `±1` outcome tuples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    n_events: usize,
    probabilities: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn n_events(&self) -> usize {
        self.n_events
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn probability(&self, signs: &[i8]) -> f64 {
        let idx = signs
            .iter()
            .fold(0usize, |acc, &s| (acc << 1) | usize::from(s < 0));
        self.probabilities[idx]
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<i8>, f64)> + '_ {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(i, &p)| (outcome_signs(i, self.n_events), p))
    }

    /// Exact `<Π_k o_k>` over the selected events.
    pub fn correlator(&self, which: &[usize]) -> Result<f64> {
        check_selection(which, self.n_events)?;
        Ok(self
            .iter()
            .map(|(signs, p)| p * product(&signs, which))
            .sum())
    }

    /// Distribution of a subset of events, summing out the rest.
    pub fn marginal(&self, keep: &[usize]) -> Result<OutcomeDistribution> {
        check_selection(keep, self.n_events)?;
        let mut probabilities = vec![0.0; 1 << keep.len()];
        for (signs, p) in self.iter() {
            let idx = keep
                .iter()
                .fold(0usize, |acc, &k| (acc << 1) | usize::from(signs[k] < 0));
            probabilities[idx] += p;
        }
        Ok(OutcomeDistribution {
            n_events: keep.len(),
            probabilities,
        })
    }
}

fn product(signs: &[i8], which: &[usize]) -> f64 {
    which.iter().map(|&k| f64::from(signs[k])).product()
}

fn check_selection(which: &[usize], n_events: usize) -> Result<()> {
    if which.is_empty() {
        return Err(Error::invalid("correlator needs at least one event"));
    }
    if let Some(&bad) = which.iter().find(|&&k| k >= n_events) {
        return Err(Error::invalid(format!(
            "event index {bad} out of range for {n_events} measurements"
        )));
    }
    Ok(())
}

pub fn exact_distribution(t: &MeasurementTimeline) -> OutcomeDistribution {
    // Unnormalised branch operators, indexed by the outcomes seen so far.
    let mut branches: Vec<ComplexMatrix> = vec![t.initial_state.clone()];
    let mut n_events = 0;
    for event in &t.events {
        match event {
            TimelineEvent::PrepareUnitary { carrier, unitary } => {
                let u = carrier.embed(unitary);
                for b in &mut branches {
                    *b = b.conjugate_by(&u);
                }
            }
            TimelineEvent::Measure(m) => {
                let plus = m.carrier.embed(&m.axis.projector(1));
                let minus = m.carrier.embed(&m.axis.projector(-1));
                branches = branches
                    .iter()
                    .flat_map(|b| [b.conjugate_by(&plus), b.conjugate_by(&minus)])
                    .collect();
                n_events += 1;
            }
        }
    }
    let mut probabilities: Vec<f64> = branches.iter().map(|b| b.trace().re.max(0.0)).collect();
    let total: f64 = probabilities.iter().sum();
    for p in &mut probabilities {
        *p /= total;
    }
    OutcomeDistribution {
        n_events,
        probabilities,
    }
}

/// Outcome counts for one measurement setting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountsTable {
    pub setting: String,
    n_events: usize,
    counts: Vec<u64>,
    shots: u64,
}

impl CountsTable {
    /// Builds a table from explicit `(outcome tuple, count)` pairs.
    pub fn from_counts(setting: impl Into<String>, n_events: usize, entries: &[(&[i8], u64)]) -> Result<Self> {
        let mut counts = vec![0u64; 1 << n_events];
        for (signs, c) in entries {
            if signs.len() != n_events || signs.iter().any(|s| s.abs() != 1) {
                return Err(Error::invalid(format!("bad outcome tuple {signs:?}")));
            }
            let idx = signs
                .iter()
                .fold(0usize, |acc, &s| (acc << 1) | usize::from(s < 0));
            counts[idx] += c;
        }
        let shots = counts.iter().sum();
        Ok(Self {
            setting: setting.into(),
            n_events,
            counts,
            shots,
        })
    }

    pub fn n_events(&self) -> usize {
        self.n_events
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn count(&self, signs: &[i8]) -> u64 {
        let idx = signs
            .iter()
            .fold(0usize, |acc, &s| (acc << 1) | usize::from(s < 0));
        self.counts[idx]
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<i8>, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &c)| (outcome_signs(i, self.n_events), c))
    }

    /// Multinomial resample with the same number of shots, drawn from the
    /// empirical frequencies (nonparametric bootstrap).
    pub fn resample(&self, rng: &mut impl Rng) -> CountsTable {
        let mut remaining = self.shots;
        let mut mass_left = self.shots;
        let mut counts = vec![0u64; self.counts.len()];
        for (i, &c) in self.counts.iter().enumerate() {
            if remaining == 0 || mass_left == 0 {
                break;
            }
            let draw = if c == mass_left {
                remaining
            } else {
                let p = c as f64 / mass_left as f64;
                Binomial::new(remaining, p).expect("valid binomial").sample(rng)
            };
            counts[i] = draw;
            remaining -= draw;
            mass_left -= c;
        }
        CountsTable {
            setting: self.setting.clone(),
            n_events: self.n_events,
            counts,
            shots: self.shots,
        }
    }

    /// CSV rows `setting,outcome_tuple,count`, without header.
    pub fn write_csv_rows<W: io::Write>(&self, wtr: &mut csv::Writer<W>) -> Result<()> {
        for (signs, c) in self.iter() {
            wtr.write_record([self.setting.clone(), format_outcome(&signs), c.to_string()])?;
        }
        Ok(())
    }
}

/// Writes a set of tables as one CSV document with a header row.
pub fn write_counts_csv<'a, W: io::Write>(w: W, tables: impl IntoIterator<Item = &'a CountsTable>) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["setting", "outcome_tuple", "count"])?;
    for t in tables {
        t.write_csv_rows(&mut wtr)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Uniform in `[0, 1)` from the top 53 bits.
fn unit_interval(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn draw_counts(cdf: &[f64], fallback: usize, seed: u64, stream: u64, start: u64, end: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    // Two 32-bit words per shot.
    rng.set_word_pos(u128::from(start) * 2);
    let mut counts = vec![0u64; cdf.len()];
    for _ in start..end {
        let u = unit_interval(rng.next_u64());
        let idx = cdf.iter().position(|&c| u < c).unwrap_or(fallback);
        counts[idx] += 1;
    }
    counts
}

/// `sample_stream` on stream 0 with the default execution.
pub fn sample(t: &MeasurementTimeline, shots: u64, seed: u64) -> Result<CountsTable> {
    sample_stream(t, shots, seed, 0, Execution::default())
}

/// Draws `shots` i.i.d. outcome tuples. Shot `k` of stream `stream` always
/// uses the same generator word, so the result depends only on
/// `(timeline, shots, seed, stream)`.
pub fn sample_stream(t: &MeasurementTimeline, shots: u64, seed: u64, stream: u64, exec: Execution) -> Result<CountsTable> {
    if shots == 0 {
        return Err(Error::invalid("shots must be positive"));
    }
    let dist = exact_distribution(t);
    let mut acc = 0.0;
    let cdf: Vec<f64> = dist
        .probabilities
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect();
    let fallback = dist
        .probabilities
        .iter()
        .rposition(|&p| p > 0.0)
        .unwrap_or(0);
    let n_batches = shots.div_ceil(SHOT_BATCH);
    let partial = exec.map_range(0..n_batches, |b| {
        let start = b * SHOT_BATCH;
        let end = (start + SHOT_BATCH).min(shots);
        draw_counts(&cdf, fallback, seed, stream, start, end)
    });
    let mut counts = vec![0u64; cdf.len()];
    for p in partial {
        for (c, x) in counts.iter_mut().zip(p) {
            *c += x;
        }
    }
    Ok(CountsTable {
        setting: t.setting_label(),
        n_events: dist.n_events,
        counts,
        shots,
    })
}

/// A correlator value with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

/// Mean of the product of the selected outcomes and its standard error
/// `sd/√shots` (population standard deviation of the `±1` products).
pub fn estimate_correlator(c: &CountsTable, which: &[usize]) -> Result<Estimate> {
    if c.shots == 0 {
        return Err(Error::invalid("counts table is empty"));
    }
    check_selection(which, c.n_events)?;
    let n = c.shots as f64;
    let sum: f64 = c.iter().map(|(s, k)| product(&s, which) * k as f64).sum();
    let mean = sum / n;
    let var = (1.0 - mean * mean).max(0.0);
    Ok(Estimate {
        value: mean,
        stderr: (var / n).sqrt(),
    })
}

/// Per-setting measurement record: either exact probabilities (the
/// infinite-shot limit) or finite counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SettingData {
    Exact(OutcomeDistribution),
    Sampled(CountsTable),
}

impl SettingData {
    pub fn correlator(&self, which: &[usize]) -> Result<Estimate> {
        match self {
            SettingData::Exact(d) => Ok(Estimate {
                value: d.correlator(which)?,
                stderr: 0.0,
            }),
            SettingData::Sampled(c) => estimate_correlator(c, which),
        }
    }

    pub fn n_events(&self) -> usize {
        match self {
            SettingData::Exact(d) => d.n_events(),
            SettingData::Sampled(c) => c.n_events(),
        }
    }

    pub fn counts(&self) -> Option<&CountsTable> {
        match self {
            SettingData::Sampled(c) => Some(c),
            SettingData::Exact(_) => None,
        }
    }
}

/// Fresh generator for derived substreams (bootstrap resamples and similar).
pub fn substream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
