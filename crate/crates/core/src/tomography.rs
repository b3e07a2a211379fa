//! Measurement quorum and PDO reconstruction for the three OTC events.
//!
//! Event slots: `Q1@t1` (photon B), `Q2@t1` (photon A, first measurement),
//! `Q3@t2` (photon A, second measurement). Four ensembles are measured:
//!
//! * `temporal_AA`: all 9 axis pairs on A at t1 and t2,
//! * `spatial_BA_t1`: all 9 pairs on B and A at t1,
//! * `spatial_BA_t2`: all 9 pairs on B and A at t2 (A untouched at t1),
//! * `threepoint`: 9 settings (B axis, A axis) with A measured on the same
//!   axis at t1 and t2.
//!
//! Three-body strings whose two A labels differ cannot be measured without
//! the first measurement disturbing the second; they are zero-filled.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{fidelity_pure_with, ComplexMatrix, Tolerances};
use crate::pauli::{Coefficient, CorrelationTable, Pauli, PauliString};
use crate::pdo::{otc_events, otc_pdo, rotated_singlet_vector, singlet_vector, werner, PseudoDensityOperator, Provenance};
use crate::sim::{
    exact_distribution, sample_stream, Axis, Carrier, Estimate, Measurement, MeasurementTimeline, SettingData,
    TimelineEvent,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EnsembleKind {
    #[serde(rename = "temporal_AA")]
    TemporalAA,
    #[serde(rename = "spatial_BA_t1")]
    SpatialBAt1,
    #[serde(rename = "spatial_BA_t2")]
    SpatialBAt2,
    #[serde(rename = "threepoint")]
    ThreePoint,
}

impl EnsembleKind {
    pub const ALL: [EnsembleKind; 4] = [
        EnsembleKind::TemporalAA,
        EnsembleKind::SpatialBAt1,
        EnsembleKind::SpatialBAt2,
        EnsembleKind::ThreePoint,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EnsembleKind::TemporalAA => "temporal_AA",
            EnsembleKind::SpatialBAt1 => "spatial_BA_t1",
            EnsembleKind::SpatialBAt2 => "spatial_BA_t2",
            EnsembleKind::ThreePoint => "threepoint",
        }
    }
}

/// Pauli axes measured on each OTC event; `None` means not measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QuorumSetting {
    pub ensemble: EnsembleKind,
    pub axes: [Option<Pauli>; 3],
}

impl QuorumSetting {
    /// Measured slots in event order; also the outcome order of the timeline.
    pub fn slots(&self) -> Vec<usize> {
        (0..3).filter(|&s| self.axes[s].is_some()).collect()
    }

    /// Position of `slot` in the outcome tuple.
    fn outcome_index(&self, slot: usize) -> Option<usize> {
        self.slots().iter().position(|&s| s == slot)
    }

    /// Timeline: B and A at t1, then the optional OTC unitary on A, then A at t2.
    pub fn timeline(&self, state: &ComplexMatrix, otc_unitary: Option<&ComplexMatrix>) -> Result<MeasurementTimeline> {
        let measure = |carrier, time, p: Pauli| -> Result<TimelineEvent> {
            Ok(TimelineEvent::Measure(Measurement::new(carrier, time, Axis::pauli(p)?)))
        };
        let mut events = Vec::new();
        if let Some(p) = self.axes[0] {
            events.push(measure(Carrier::B, 1, p)?);
        }
        if let Some(p) = self.axes[1] {
            events.push(measure(Carrier::A, 1, p)?);
        }
        if let Some(u) = otc_unitary {
            events.push(TimelineEvent::PrepareUnitary {
                carrier: Carrier::A,
                unitary: u.clone(),
            });
        }
        if let Some(p) = self.axes[2] {
            events.push(measure(Carrier::A, 2, p)?);
        }
        MeasurementTimeline::new(state.clone(), events)
    }
}

impl fmt::Display for QuorumSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let events = otc_events();
        let parts: Vec<String> = self
            .slots()
            .iter()
            .map(|&s| format!("{}:{}", events[s], self.axes[s].expect("measured slot")))
            .collect();
        write!(f, "{} {}", self.ensemble.name(), parts.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub kind: EnsembleKind,
    pub settings: Vec<QuorumSetting>,
    pub shots_per_setting: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuorumPlan {
    pub ensembles: Vec<Ensemble>,
}

impl QuorumPlan {
    /// All settings in plan order.
    pub fn settings(&self) -> Vec<QuorumSetting> {
        self.ensembles.iter().flat_map(|e| e.settings.iter().copied()).collect()
    }
}

/// The four ensembles, 9 settings each.
pub fn build_quorum(shots_per_setting: u64) -> QuorumPlan {
    let pairs: Vec<(Pauli, Pauli)> = Pauli::AXES
        .iter()
        .flat_map(|&a| Pauli::AXES.iter().map(move |&b| (a, b)))
        .collect();
    let ensemble = |kind: EnsembleKind| {
        let settings = pairs
            .iter()
            .map(|&(a, b)| {
                let axes = match kind {
                    EnsembleKind::TemporalAA => [None, Some(a), Some(b)],
                    EnsembleKind::SpatialBAt1 => [Some(a), Some(b), None],
                    EnsembleKind::SpatialBAt2 => [Some(a), None, Some(b)],
                    EnsembleKind::ThreePoint => [Some(a), Some(b), Some(b)],
                };
                QuorumSetting { ensemble: kind, axes }
            })
            .collect();
        Ensemble {
            kind,
            settings,
            shots_per_setting,
        }
    };
    QuorumPlan {
        ensembles: EnsembleKind::ALL.iter().map(|&k| ensemble(k)).collect(),
    }
}

/// Photon-pair source with visibility `v` and an optional unitary applied
/// to photon A between its two measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct Source {
    pub visibility: f64,
    pub otc_unitary: ComplexMatrix,
}

impl Source {
    pub fn ideal() -> Self {
        Self {
            visibility: 1.0,
            otc_unitary: ComplexMatrix::identity(2),
        }
    }

    pub fn with_visibility(visibility: f64) -> Self {
        Self {
            visibility,
            ..Self::ideal()
        }
    }

    pub fn state(&self) -> Result<ComplexMatrix> {
        werner(self.visibility)
    }

    fn unitary_event(&self) -> Option<&ComplexMatrix> {
        let trivial = self.otc_unitary.max_abs_diff(&ComplexMatrix::identity(2)) == 0.0;
        (!trivial).then_some(&self.otc_unitary)
    }

    pub fn timeline(&self, setting: &QuorumSetting) -> Result<MeasurementTimeline> {
        setting.timeline(&self.state()?, self.unitary_event())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Acquisition {
    /// Infinite-shot limit.
    Exact,
    /// Finite shots; setting `i` of the plan uses generator stream `i`.
    Sampled { seed: u64 },
}

/// Measurement records for (a subset of) the quorum.
#[derive(Debug, Clone, PartialEq)]
pub struct QuorumData {
    pub otc_unitary: ComplexMatrix,
    pub entries: BTreeMap<QuorumSetting, SettingData>,
}

impl QuorumData {
    pub fn is_exact(&self) -> bool {
        self.entries.values().all(|d| matches!(d, SettingData::Exact(_)))
    }

    /// Multinomial resample of every sampled setting.
    pub fn resample(&self, rng: &mut impl Rng) -> QuorumData {
        let entries = self
            .entries
            .iter()
            .map(|(k, d)| {
                let d = match d {
                    SettingData::Sampled(c) => SettingData::Sampled(c.resample(rng)),
                    exact => exact.clone(),
                };
                (*k, d)
            })
            .collect();
        QuorumData {
            otc_unitary: self.otc_unitary.clone(),
            entries,
        }
    }

    pub fn total_shots(&self) -> u64 {
        self.entries
            .values()
            .filter_map(SettingData::counts)
            .map(|c| c.shots())
            .sum()
    }
}

/// Runs every setting of the plan against the source.
pub fn acquire(plan: &QuorumPlan, source: &Source, mode: Acquisition, exec: Execution) -> Result<QuorumData> {
    let jobs: Vec<(u64, QuorumSetting, u64)> = plan
        .ensembles
        .iter()
        .flat_map(|e| e.settings.iter().map(move |s| (*s, e.shots_per_setting)))
        .enumerate()
        .map(|(i, (s, shots))| (i as u64, s, shots))
        .collect();
    let results = exec.map(&jobs, |&(stream, setting, shots)| -> Result<(QuorumSetting, SettingData)> {
        let timeline = source.timeline(&setting)?;
        let data = match mode {
            Acquisition::Exact => SettingData::Exact(exact_distribution(&timeline)),
            Acquisition::Sampled { seed } => {
                let mut counts = sample_stream(&timeline, shots, seed, stream, Execution::Sequential)?;
                counts.setting = setting.to_string();
                SettingData::Sampled(counts)
            }
        };
        Ok((setting, data))
    });
    let entries = results.into_iter().collect::<Result<BTreeMap<_, _>>>()?;
    Ok(QuorumData {
        otc_unitary: source.otc_unitary.clone(),
        entries,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompletionPolicy {
    ZeroFill,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThreePointEstimate {
    pub string: PauliString,
    pub value: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalSummary {
    pub pdo: PseudoDensityOperator,
    pub eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub pdo: PseudoDensityOperator,
    pub eigenvalues: Vec<f64>,
    pub coefficients: CorrelationTable,
    pub max_coefficient_error: f64,
    pub fidelity_12: f64,
    pub fidelity_13: f64,
    pub completion_policy: CompletionPolicy,
    pub zero_filled: Vec<PauliString>,
    pub three_point: Vec<ThreePointEstimate>,
    /// Keyed `12`, `13`, `23`.
    pub marginals: BTreeMap<String, MarginalSummary>,
}

/// Inverse-variance weighted mean. Zero-variance inputs dominate: when any
/// are present their plain mean is returned with zero error.
fn combine(estimates: &[Estimate]) -> Estimate {
    let exact: Vec<f64> = estimates.iter().filter(|e| e.stderr == 0.0).map(|e| e.value).collect();
    if !exact.is_empty() {
        return Estimate {
            value: exact.iter().sum::<f64>() / exact.len() as f64,
            stderr: 0.0,
        };
    }
    let w: f64 = estimates.iter().map(|e| 1.0 / (e.stderr * e.stderr)).sum();
    let value = estimates.iter().map(|e| e.value / (e.stderr * e.stderr)).sum::<f64>() / w;
    Estimate {
        value,
        stderr: w.sqrt().recip(),
    }
}

fn missing_settings(data: &QuorumData) -> Vec<String> {
    build_quorum(1)
        .settings()
        .into_iter()
        .filter(|s| !data.entries.contains_key(s))
        .map(|s| s.to_string())
        .collect()
}

fn coefficient(e: Estimate) -> Coefficient {
    Coefficient::measured(e.value, e.stderr)
}

/// Builds the 3-slot coefficient table from quorum records. Missing
/// three-body strings are zero-filled with no standard error.
pub fn estimate_table(data: &QuorumData) -> Result<CorrelationTable> {
    let missing = missing_settings(data);
    if !missing.is_empty() {
        return Err(Error::IncompleteQuorum { missing });
    }
    let mut table = CorrelationTable::normalised(3);

    // One-body terms. The t2 event only counts when A was not measured at
    // t1: averaging over an earlier measurement is not a partial trace.
    for slot in 0..3 {
        for p in Pauli::AXES {
            let mut estimates = Vec::new();
            for kind in EnsembleKind::ALL {
                for (setting, d) in data.entries.range(lower(kind)..upper(kind)) {
                    if setting.axes[slot] != Some(p) || (slot == 2 && setting.axes[1].is_some()) {
                        continue;
                    }
                    let idx = setting.outcome_index(slot).expect("measured slot");
                    estimates.push(d.correlator(&[idx])?);
                }
            }
            table.insert(PauliString::with(3, &[(slot, p)]), coefficient(combine(&estimates)))?;
        }
    }

    for (setting, d) in &data.entries {
        let s = setting.axes;
        let string = match setting.ensemble {
            EnsembleKind::ThreePoint => PauliString::new(s.iter().map(|p| p.expect("all measured")).collect()),
            _ => PauliString::new(s.iter().map(|p| p.unwrap_or(Pauli::I)).collect()),
        };
        let which: Vec<usize> = (0..setting.slots().len()).collect();
        table.insert(string, coefficient(d.correlator(&which)?))?;
    }

    for s in PauliString::all(3) {
        if table.get(&s).is_none() {
            table.insert(s, Coefficient::exact(0.0))?;
        }
    }
    Ok(table)
}

fn lower(kind: EnsembleKind) -> QuorumSetting {
    QuorumSetting {
        ensemble: kind,
        axes: [None; 3],
    }
}

fn upper(kind: EnsembleKind) -> QuorumSetting {
    QuorumSetting {
        ensemble: kind,
        axes: [Some(Pauli::Z), Some(Pauli::Z), Some(Pauli::Z)],
    }
}

/// Strings left unmeasured by the quorum: three-body with unequal A labels.
pub fn unmeasured_strings() -> Vec<PauliString> {
    PauliString::all(3)
        .into_iter()
        .filter(|s| s.weight() == 3 && s.get(1) != s.get(2))
        .collect()
}

/// Positivity tolerance for a reconstructed two-event marginal: the
/// operator-norm bound `Σ_s |δc_s| / 4` on the statistical perturbation,
/// taken at one standard error per coefficient.
fn marginal_psd_tolerance(table: &CorrelationTable) -> f64 {
    let spread: f64 = table.iter().filter_map(|(_, c)| c.stderr).sum::<f64>() / 4.0;
    spread.max(Tolerances::default().psd)
}

pub fn reconstruct(data: &QuorumData) -> Result<ReconstructionReport> {
    let table = estimate_table(data)?;
    let pdo = PseudoDensityOperator::from_table(otc_events(), &table, Provenance::Reconstructed)?;
    let reference = otc_pdo(&data.otc_unitary)?;
    let max_coefficient_error = table.max_abs_diff(&reference.table());

    let mut marginals = BTreeMap::new();
    for (key, slots) in [("12", [0, 1]), ("13", [0, 2]), ("23", [1, 2])] {
        let m = pdo.marginal_slots(&slots)?;
        let eigenvalues = m.eigenvalues();
        marginals.insert(key.to_string(), MarginalSummary { pdo: m, eigenvalues });
    }
    let fidelity = |key: &str, slots: &[usize], target: Vec<_>| -> Result<f64> {
        let tol = Tolerances {
            psd: marginal_psd_tolerance(&table.marginal(slots)),
            ..Tolerances::default()
        };
        fidelity_pure_with(marginals[key].pdo.matrix(), &target, &tol)
    };
    let fidelity_12 = fidelity("12", &[0, 1], singlet_vector())?;
    let fidelity_13 = fidelity("13", &[0, 2], rotated_singlet_vector(&data.otc_unitary))?;

    let three_point = table
        .iter()
        .filter(|(s, c)| s.weight() == 3 && c.stderr.is_some())
        .map(|(s, c)| ThreePointEstimate {
            string: s.clone(),
            value: c.value,
            stderr: c.stderr.unwrap_or(0.0),
        })
        .collect();

    Ok(ReconstructionReport {
        eigenvalues: pdo.eigenvalues(),
        pdo,
        coefficients: table,
        max_coefficient_error,
        fidelity_12,
        fidelity_13,
        completion_policy: CompletionPolicy::ZeroFill,
        zero_filled: unmeasured_strings(),
        three_point,
        marginals,
    })
}

/// `⟨Z_B Z_A(t2)⟩` without and with an intervening measurement on A at t1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisturbanceReport {
    pub visibility: f64,
    pub intervening_axis: Axis,
    pub undisturbed: f64,
    pub disturbed: f64,
}

/// Ideal source, intervening X measurement.
pub fn disturbance_demo() -> Result<DisturbanceReport> {
    disturbance_with(1.0, Axis::x())
}

pub fn disturbance_with(visibility: f64, intervening: Axis) -> Result<DisturbanceReport> {
    let state = werner(visibility)?;
    let zb = Measurement::new(Carrier::B, 1, Axis::z());
    let za2 = Measurement::new(Carrier::A, 2, Axis::z());
    let direct = MeasurementTimeline::measurements(state.clone(), &[zb, za2])?;
    let undisturbed = exact_distribution(&direct).correlator(&[0, 1])?;
    let with_t1 = MeasurementTimeline::measurements(state, &[zb, Measurement::new(Carrier::A, 1, intervening), za2])?;
    // Averaging over the t1 outcome is the marginal of the 3-outcome distribution.
    let disturbed = exact_distribution(&with_t1).correlator(&[0, 2])?;
    Ok(DisturbanceReport {
        visibility,
        intervening_axis: intervening,
        undisturbed,
        disturbed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::partial_trace;

    fn exact(source: &Source) -> QuorumData {
        acquire(&build_quorum(1), source, Acquisition::Exact, Execution::Sequential).unwrap()
    }

    #[test]
    fn quorum_shape() {
        let plan = build_quorum(10);
        let all = plan.settings();
        assert_eq!(all.len(), 36);
        assert_eq!(plan.ensembles.len(), 4);
        assert!(plan.ensembles.iter().all(|e| e.settings.len() == 9 && e.shots_per_setting == 10));
        assert!(all.contains(&QuorumSetting {
            ensemble: EnsembleKind::TemporalAA,
            axes: [None, Some(Pauli::X), Some(Pauli::Z)],
        }));
        assert!(!all
            .iter()
            .any(|s| s.ensemble == EnsembleKind::ThreePoint && s.axes[1] == Some(Pauli::X) && s.axes[2] == Some(Pauli::Z)));
        assert!(all
            .iter()
            .filter(|s| s.ensemble == EnsembleKind::ThreePoint)
            .all(|s| s.axes[1] == s.axes[2]));
    }

    #[test]
    fn exact_reconstruction_is_closed() {
        let data = exact(&Source::ideal());
        let rep = reconstruct(&data).unwrap();
        assert!(rep.max_coefficient_error < 1e-12, "{}", rep.max_coefficient_error);
        let r = otc_pdo(&ComplexMatrix::identity(2)).unwrap();
        assert!(rep.pdo.matrix().max_abs_diff(r.matrix()) < 1e-12);
        assert!((rep.fidelity_12 - 1.0).abs() < 1e-12);
        assert!((rep.fidelity_13 - 1.0).abs() < 1e-12);
        assert_eq!(rep.zero_filled.len(), 18);
        assert_eq!(rep.three_point.len(), 9);
        assert!(rep.three_point.iter().all(|e| e.value.abs() < 1e-12));
        // Temporal entries: +1 on the diagonal, 0 across axes.
        assert!((rep.coefficients.value(&"IXX".parse().unwrap()) - 1.0).abs() < 1e-12);
        assert!(rep.coefficients.value(&"IXZ".parse().unwrap()).abs() < 1e-12);
        assert!((rep.eigenvalues[0] + 0.25).abs() < 1e-10);
    }

    #[test]
    fn exact_reconstruction_with_unitary() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for u in [
            Pauli::X.matrix(),
            ComplexMatrix::from_real_rows(&[&[h, h], &[h, -h]]).unwrap(),
            ComplexMatrix::from_rows(vec![
                vec![crate::linalg::C64::new(0.6, 0.0), crate::linalg::C64::new(0.0, 0.8)],
                vec![crate::linalg::C64::new(0.0, 0.8), crate::linalg::C64::new(0.6, 0.0)],
            ])
            .unwrap(),
        ] {
            let source = Source {
                visibility: 1.0,
                otc_unitary: u.clone(),
            };
            let rep = reconstruct(&exact(&source)).unwrap();
            assert!(rep.max_coefficient_error < 1e-12);
            assert!((rep.fidelity_13 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn incomplete_quorum_lists_missing() {
        let mut data = exact(&Source::ideal());
        let key = *data.entries.keys().next().unwrap();
        data.entries.remove(&key);
        match reconstruct(&data) {
            Err(Error::IncompleteQuorum { missing }) => {
                assert_eq!(missing, vec![key.to_string()]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sampled_ideal_run() {
        let data = acquire(
            &build_quorum(100_000),
            &Source::ideal(),
            Acquisition::Sampled { seed: 2024 },
            Execution::Parallel,
        )
        .unwrap();
        let rep = reconstruct(&data).unwrap();
        assert!(rep.fidelity_12 >= 0.99 && rep.fidelity_13 >= 0.99, "{} {}", rep.fidelity_12, rep.fidelity_13);
        for e in &rep.three_point {
            assert!(e.value.abs() <= 4.0 * e.stderr, "{e:?}");
        }
        assert!(rep.pdo.matrix().is_hermitian(1e-12));
        assert!((rep.pdo.matrix().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sampled_noisy_fidelities() {
        let data = acquire(
            &build_quorum(100_000),
            &Source::with_visibility(0.952),
            Acquisition::Sampled { seed: 77 },
            Execution::Parallel,
        )
        .unwrap();
        let rep = reconstruct(&data).unwrap();
        assert!((rep.fidelity_12 - 0.964).abs() < 0.005, "{}", rep.fidelity_12);
        assert!((rep.fidelity_13 - 0.963).abs() < 0.005, "{}", rep.fidelity_13);
    }

    #[test]
    fn traced_pdo_matches_direct_13_marginal() {
        let data = acquire(
            &build_quorum(20_000),
            &Source::with_visibility(0.9),
            Acquisition::Sampled { seed: 5 },
            Execution::Parallel,
        )
        .unwrap();
        let rep = reconstruct(&data).unwrap();
        let traced = partial_trace(rep.pdo.matrix(), &[2, 2, 2], &[0, 2]).unwrap();
        let direct = PseudoDensityOperator::from_table(
            vec!["Q1@t1".parse().unwrap(), "Q3@t2".parse().unwrap()],
            &rep.coefficients.marginal(&[0, 2]),
            Provenance::Reconstructed,
        )
        .unwrap();
        assert!(traced.max_abs_diff(direct.matrix()) < 1e-12);
    }

    #[test]
    fn combine_weights() {
        let e = combine(&[
            Estimate { value: 1.0, stderr: 1.0 },
            Estimate { value: 0.0, stderr: 0.5 },
        ]);
        assert!((e.value - 0.2).abs() < 1e-12);
        assert!((e.stderr - (1.0f64 / 5.0).sqrt()).abs() < 1e-12);
        let e = combine(&[Estimate { value: 0.3, stderr: 0.0 }, Estimate { value: 9.0, stderr: 0.1 }]);
        assert_eq!((e.value, e.stderr), (0.3, 0.0));
    }

    #[test]
    fn disturbance_values() {
        let d = disturbance_demo().unwrap();
        assert!((d.undisturbed + 1.0).abs() < 1e-14);
        assert!(d.disturbed.abs() < 1e-14);
        let d = disturbance_with(1.0, Axis::z()).unwrap();
        assert!((d.disturbed + 1.0).abs() < 1e-14);
        for v in [0.0, 0.3, 0.952] {
            let d = disturbance_with(v, Axis::x()).unwrap();
            assert!((d.undisturbed + v).abs() < 1e-14);
            assert!(d.disturbed.abs() < 1e-14);
        }
    }

    #[test]
    fn setting_labels() {
        let s = QuorumSetting {
            ensemble: EnsembleKind::SpatialBAt2,
            axes: [Some(Pauli::Y), None, Some(Pauli::X)],
        };
        assert_eq!(s.to_string(), "spatial_BA_t2 Q1@t1:Y Q3@t2:X");
    }
}
