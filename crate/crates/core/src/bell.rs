//! CHSH values and the monogamy relation `C_mk + C_nk <= 4`.
//!
//! For a correlation matrix `T` (rows: side-1 Pauli axis, columns: side-2
//! axis) the correlator for unit directions `a`, `b` is `aᵀ T b`, and
//!
//! ```text
//! S = E(a1,b1) + E(a1,b2) + E(a2,b1) - E(a2,b2)
//! ```
//!
//! The best `S` over all settings is `2 √(m1 + m2)`, with `m1 >= m2` the two
//! largest eigenvalues of `TᵀT`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{hermitian_eig, ComplexMatrix, C64};
use crate::pauli::correlation_3x3;
use crate::sim::{substream_rng, Axis, SettingData};
use crate::tomography::{estimate_table, QuorumData};

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

/// Local-realistic bound on `|S|`, and the right-hand side of the monogamy relation.
pub const CLASSICAL_BOUND: f64 = 2.0;
pub const MONOGAMY_BOUND: f64 = 4.0;

/// Signs of the four correlators in `S`, in the order
/// `(a1,b1), (a1,b2), (a2,b1), (a2,b2)`.
pub const CHSH_SIGNS: [f64; 4] = [1.0, 1.0, 1.0, -1.0];

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn mat_vec(t: &Mat3, v: &Vec3) -> Vec3 {
    [dot(&t[0], v), dot(&t[1], v), dot(&t[2], v)]
}

fn norm(v: &Vec3) -> f64 {
    dot(v, v).sqrt()
}

/// `aᵀ T b`.
pub fn correlator(t: &Mat3, a: &Vec3, b: &Vec3) -> f64 {
    dot(a, &mat_vec(t, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshSettings {
    pub side1: [Axis; 2],
    pub side2: [Axis; 2],
}

impl ChshSettings {
    pub fn new(side1: [Axis; 2], side2: [Axis; 2]) -> Self {
        Self { side1, side2 }
    }

    /// Reaches `2√2` on the singlet (`T = -I`):
    /// `a ∈ {z, x}`, `b ∈ {-(z+x)/√2, (x-z)/√2}`.
    pub fn singlet_default() -> Self {
        Self::new(
            [Axis::z(), Axis::x()],
            [
                Axis::normalized([-1.0, 0.0, -1.0]).expect("static axis"),
                Axis::normalized([1.0, 0.0, -1.0]).expect("static axis"),
            ],
        )
    }

    /// Reaches `2√2` on perfectly correlated pairs (`T = +I`):
    /// `a ∈ {z, x}`, `b ∈ {(z+x)/√2, (z-x)/√2}`.
    pub fn correlated_default() -> Self {
        Self::new(
            [Axis::z(), Axis::x()],
            [
                Axis::normalized([1.0, 0.0, 1.0]).expect("static axis"),
                Axis::normalized([-1.0, 0.0, 1.0]).expect("static axis"),
            ],
        )
    }

    /// The four `(side1, side2)` axis pairs in `CHSH_SIGNS` order.
    pub fn quartet(&self) -> [(Axis, Axis); 4] {
        [
            (self.side1[0], self.side2[0]),
            (self.side1[0], self.side2[1]),
            (self.side1[1], self.side2[0]),
            (self.side1[1], self.side2[1]),
        ]
    }
}

pub fn chsh_value(t: &Mat3, s: &ChshSettings) -> f64 {
    s.quartet()
        .iter()
        .zip(CHSH_SIGNS)
        .map(|((a, b), sign)| sign * correlator(t, &a.vector(), &b.vector()))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalChsh {
    pub value: f64,
    pub settings: ChshSettings,
}

/// Any unit vector orthogonal to `v` (which must be non-zero).
fn orthogonal_unit(v: &Vec3) -> Vec3 {
    let helper = if v[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let cross = [
        v[1] * helper[2] - v[2] * helper[1],
        v[2] * helper[0] - v[0] * helper[2],
        v[0] * helper[1] - v[1] * helper[0],
    ];
    let n = norm(&cross);
    [cross[0] / n, cross[1] / n, cross[2] / n]
}

fn unit_or(v: Vec3, fallback: Vec3) -> Vec3 {
    let n = norm(&v);
    if n > 1e-12 {
        [v[0] / n, v[1] / n, v[2] / n]
    } else {
        fallback
    }
}

/// Maximal CHSH value over all settings, with one maximising quartet.
pub fn chsh_optimal(t: &Mat3) -> OptimalChsh {
    let mut tt = ComplexMatrix::zeros(3, 3);
    for i in 0..3 {
        for j in 0..3 {
            let v: f64 = (0..3).map(|k| t[k][i] * t[k][j]).sum();
            tt[(i, j)] = C64::new(v, 0.0);
        }
    }
    let eig = hermitian_eig(&tt).expect("TᵀT is symmetric");
    let m1 = eig.values[2].max(0.0);
    let m2 = eig.values[1].max(0.0);
    let real_vec = |k: usize| -> Vec3 {
        let v = eig.vector(k);
        unit_or([v[0].re, v[1].re, v[2].re], [0.0, 0.0, 1.0])
    };
    let c1 = real_vec(2);
    let c2 = {
        // Re-orthogonalise against c1; the Jacobi vectors are already
        // orthonormal up to rounding.
        let v = real_vec(1);
        let p = dot(&v, &c1);
        unit_or([v[0] - p * c1[0], v[1] - p * c1[1], v[2] - p * c1[2]], orthogonal_unit(&c1))
    };
    let a1 = unit_or(mat_vec(t, &c1), [0.0, 0.0, 1.0]);
    let a2 = unit_or(mat_vec(t, &c2), orthogonal_unit(&a1));
    let theta = m2.sqrt().atan2(m1.sqrt());
    let (s, c) = theta.sin_cos();
    let b1 = [c * c1[0] + s * c2[0], c * c1[1] + s * c2[1], c * c1[2] + s * c2[2]];
    let b2 = [c * c1[0] - s * c2[0], c * c1[1] - s * c2[1], c * c1[2] - s * c2[2]];
    let axis = |v: Vec3| Axis::normalized(v).expect("non-zero by construction");
    OptimalChsh {
        value: 2.0 * (m1 + m2).sqrt(),
        settings: ChshSettings::new([axis(a1), axis(a2)], [axis(b1), axis(b2)]),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChshSource {
    Exact,
    Counts,
    ReconstructedMarginal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "settings")]
pub enum SettingsUsed {
    Explicit(ChshSettings),
    Optimal(ChshSettings),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshResult {
    pub value: f64,
    pub stderr: f64,
    pub settings: SettingsUsed,
    pub source: ChshSource,
}

/// CHSH value from the four settings of a quartet, each a two-event record
/// in `CHSH_SIGNS` order. Standard errors add in quadrature.
pub fn chsh_from_counts(quartet: &[SettingData], settings: ChshSettings) -> Result<ChshResult> {
    if quartet.len() != 4 {
        return Err(Error::invalid(format!(
            "a CHSH quartet needs 4 settings, got {}",
            quartet.len()
        )));
    }
    let mut value = 0.0;
    let mut var = 0.0;
    let mut exact = true;
    for (data, sign) in quartet.iter().zip(CHSH_SIGNS) {
        if data.n_events() != 2 {
            return Err(Error::invalid("each CHSH setting must record exactly two events"));
        }
        exact &= matches!(data, SettingData::Exact(_));
        let e = data.correlator(&[0, 1])?;
        value += sign * e.value;
        var += e.stderr * e.stderr;
    }
    Ok(ChshResult {
        value,
        stderr: var.sqrt(),
        settings: SettingsUsed::Explicit(settings),
        source: if exact { ChshSource::Exact } else { ChshSource::Counts },
    })
}

/// Optimal CHSH value of a reconstructed two-event marginal, with a
/// bootstrap standard error over multinomial resamples of the quorum counts.
///
/// `slots` are 0-based event slots of the three-event quorum. In exact mode
/// (or with `resamples == 0`) the standard error is zero.
pub fn reconstructed_marginal_chsh(
    data: &QuorumData,
    slots: (usize, usize),
    resamples: u64,
    seed: u64,
    exec: Execution,
) -> Result<ChshResult> {
    let t = correlation_3x3(&estimate_table(data)?, slots.0, slots.1)?;
    let best = chsh_optimal(&t);
    let stderr = if data.is_exact() || resamples == 0 {
        0.0
    } else {
        let values = exec.map_range(0..resamples, |r| -> Result<f64> {
            let mut rng = substream_rng(seed, BOOTSTRAP_STREAM_BASE + r);
            let resampled = data.resample(&mut rng);
            let t = correlation_3x3(&estimate_table(&resampled)?, slots.0, slots.1)?;
            Ok(chsh_optimal(&t).value)
        });
        let values = values.into_iter().collect::<Result<Vec<f64>>>()?;
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        var.sqrt()
    };
    Ok(ChshResult {
        value: best.value,
        stderr,
        settings: SettingsUsed::Optimal(best.settings),
        source: ChshSource::ReconstructedMarginal,
    })
}

/// First generator stream used for bootstrap resamples; quorum and CHSH
/// acquisition streams stay below it.
pub const BOOTSTRAP_STREAM_BASE: u64 = 1 << 32;

/// Two 1-based event slots, e.g. `(1, 2)` for `C12`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Pair(pub u8, pub u8);

impl Pair {
    pub fn shares_event(&self, other: &Pair) -> bool {
        let a = [self.0, self.1];
        a.contains(&other.0) || a.contains(&other.1)
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.0, self.1)
    }
}

impl TryFrom<String> for Pair {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        let d: Vec<u8> = s
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as u8))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::invalid(format!("bad pair label {s:?}")))?;
        match d.as_slice() {
            [a, b] if a != b => Ok(Pair(*a, *b)),
            _ => Err(Error::invalid(format!("bad pair label {s:?}"))),
        }
    }
}

impl From<Pair> for String {
    fn from(p: Pair) -> String {
        p.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonogamySum {
    pub pairs: (Pair, Pair),
    pub sum: f64,
    pub stderr: f64,
    /// `(sum - 4)/stderr`; absent when the standard error is zero.
    pub sigmas: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonogamyReport {
    pub bound: f64,
    pub sums: Vec<MonogamySum>,
}

impl MonogamyReport {
    pub fn get(&self, a: Pair, b: Pair) -> Option<&MonogamySum> {
        self.sums
            .iter()
            .find(|s| s.pairs == (a, b) || s.pairs == (b, a))
    }

    pub fn violated(&self) -> bool {
        self.sums.iter().any(|s| s.sum > self.bound)
    }

    /// CSV summary: `first,second,sum,stderr,sigmas`.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["first", "second", "sum", "stderr", "sigmas"])?;
        for s in &self.sums {
            wtr.write_record([
                format!("C{}", s.pairs.0),
                format!("C{}", s.pairs.1),
                s.sum.to_string(),
                s.stderr.to_string(),
                s.sigmas.map(|x| x.to_string()).unwrap_or_default(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Sums `C_ij + C_kl` for every two results sharing an event.
pub fn monogamy_check(results: &BTreeMap<Pair, ChshResult>) -> Result<MonogamyReport> {
    let entries: Vec<(&Pair, &ChshResult)> = results.iter().collect();
    let mut sums = Vec::new();
    for (i, (p, r)) in entries.iter().enumerate() {
        for (q, s) in &entries[i + 1..] {
            if !p.shares_event(q) {
                continue;
            }
            let sum = r.value + s.value;
            let stderr = (r.stderr * r.stderr + s.stderr * s.stderr).sqrt();
            sums.push(MonogamySum {
                pairs: (**p, **q),
                sum,
                stderr,
                sigmas: (stderr > 0.0).then(|| (sum - MONOGAMY_BOUND) / stderr),
            });
        }
    }
    if sums.is_empty() {
        return Err(Error::invalid("no two CHSH results share an event"));
    }
    Ok(MonogamyReport {
        bound: MONOGAMY_BOUND,
        sums,
    })
}

/// All 16 deterministic local strategies `(a1, a2, b1, b2) ∈ {±1}⁴`.
pub fn deterministic_strategies() -> Vec<[f64; 4]> {
    (0..16u8)
        .map(|bits| {
            let s = |k: u8| if bits >> k & 1 == 0 { 1.0 } else { -1.0 };
            [s(0), s(1), s(2), s(3)]
        })
        .collect()
}

pub fn strategy_chsh(s: &[f64; 4]) -> f64 {
    let [a1, a2, b1, b2] = *s;
    a1 * b1 + a1 * b2 + a2 * b1 - a2 * b2
}

/// Maximum CHSH value over all deterministic local strategies (= 2).
pub fn classical_bound_oracle() -> f64 {
    deterministic_strategies()
        .iter()
        .map(strategy_chsh)
        .fold(f64::NEG_INFINITY, f64::max)
}
