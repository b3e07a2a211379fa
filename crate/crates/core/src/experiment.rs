//! Declarative experiment descriptions and the end-to-end pipeline.
//!
//! A spec is a JSON document:
//!
//! ```json
//! {
//!   "source": {"visibility": 0.952, "otc_unitary": "identity"},
//!   "shots_per_setting": 100000,
//!   "seed": 42,
//!   "mode": "sampled",
//!   "outputs": ["report_json", "coefficients_csv", "counts_csv"]
//! }
//! ```
//!
//! Every field is optional. `otc_unitary` is a name (`identity`, `x`, `y`,
//! `z`, `hadamard`), `{"rotation": {"axis": [x, y, z], "angle": θ}}` for
//! `exp(-iθ n·σ/2)`, or `{"matrix": {"re": [[..],[..]], "im": [[..],[..]]}}`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bell::{
    chsh_from_counts, chsh_optimal, monogamy_check, reconstructed_marginal_chsh, ChshResult, ChshSettings,
    MonogamyReport, Pair,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{ComplexMatrix, C64};
use crate::pauli::{correlation_3x3, Pauli};
use crate::pdo::{otc_pdo, PhysicalityReport};
use crate::sim::{
    exact_distribution, sample_stream, write_counts_csv, Axis, Carrier, CountsTable, Measurement,
    MeasurementTimeline, SettingData, TimelineEvent,
};
use crate::tomography::{
    acquire, build_quorum, disturbance_with, reconstruct, Acquisition, DisturbanceReport, QuorumData,
    ReconstructionReport, Source,
};

pub const DEFAULT_SHOTS: u64 = 100_000;
pub const BOOTSTRAP_RESAMPLES: u64 = 200;

/// Generator streams of the CHSH quartets; quorum settings use `0..36`.
const QUARTET_STREAM_BASE: u64 = 100;

pub const REPORT_FILE: &str = "report.json";
pub const COEFFICIENTS_FILE: &str = "coefficients.csv";
pub const COUNTS_FILE: &str = "counts.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    #[default]
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    ReportJson,
    CoefficientsCsv,
    CountsCsv,
}

impl OutputKind {
    pub const ALL: [OutputKind; 3] = [OutputKind::ReportJson, OutputKind::CoefficientsCsv, OutputKind::CountsCsv];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rotation {
    pub axis: [f64; 3],
    pub angle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub re: [[f64; 2]; 2],
    pub im: [[f64; 2]; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum UnitarySpec {
    Named(String),
    Rotation { rotation: Rotation },
    Matrix { matrix: MatrixSpec },
}

impl Default for UnitarySpec {
    fn default() -> Self {
        UnitarySpec::Named("identity".into())
    }
}

const UNITARY_NAMES: [&str; 5] = ["identity", "x", "y", "z", "hadamard"];

impl UnitarySpec {
    pub fn matrix(&self) -> Result<ComplexMatrix> {
        const PATH: &str = "source.otc_unitary";
        match self {
            UnitarySpec::Named(name) => match name.as_str() {
                "identity" => Ok(ComplexMatrix::identity(2)),
                "x" => Ok(Pauli::X.matrix()),
                "y" => Ok(Pauli::Y.matrix()),
                "z" => Ok(Pauli::Z.matrix()),
                "hadamard" => Ok((&Pauli::X.matrix() + &Pauli::Z.matrix()).scale_real(std::f64::consts::FRAC_1_SQRT_2)),
                other => Err(spec_error(
                    PATH,
                    format!("unknown unitary name {other:?}; expected one of {}", UNITARY_NAMES.join(", ")),
                )),
            },
            UnitarySpec::Rotation { rotation } => {
                let n = Axis::normalized(rotation.axis)
                    .map_err(|_| spec_error("source.otc_unitary.rotation.axis", "axis must be non-zero and finite"))?;
                if !rotation.angle.is_finite() {
                    return Err(spec_error("source.otc_unitary.rotation.angle", "angle must be finite"));
                }
                let (s, c) = (rotation.angle / 2.0).sin_cos();
                Ok(&ComplexMatrix::identity(2).scale_real(c) - &n.observable().scale(C64::new(0.0, s)))
            }
            UnitarySpec::Matrix { matrix } => {
                let m = ComplexMatrix::from_fn(2, 2, |r, c| C64::new(matrix.re[r][c], matrix.im[r][c]));
                if !m.is_unitary(1e-8) {
                    return Err(spec_error("source.otc_unitary.matrix", "matrix is not unitary"));
                }
                Ok(m)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSpec {
    #[serde(default = "one")]
    pub visibility: f64,
    #[serde(default)]
    pub otc_unitary: UnitarySpec,
}

fn one() -> f64 {
    1.0
}

impl Default for SourceSpec {
    fn default() -> Self {
        Self {
            visibility: 1.0,
            otc_unitary: UnitarySpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default)]
    pub source: SourceSpec,
    #[serde(default = "default_shots")]
    pub shots_per_setting: u64,
    pub seed: u64,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default = "all_outputs")]
    pub outputs: Vec<OutputKind>,
}

fn default_shots() -> u64 {
    DEFAULT_SHOTS
}

fn all_outputs() -> Vec<OutputKind> {
    OutputKind::ALL.to_vec()
}

/// Raw form: identical to [`ExperimentSpec`] except that the seed may be absent.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    #[serde(default)]
    source: SourceSpec,
    #[serde(default = "default_shots")]
    shots_per_setting: u64,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    mode: Mode,
    #[serde(default = "all_outputs")]
    outputs: Vec<OutputKind>,
}

fn spec_error(path: &str, message: impl Into<String>) -> Error {
    Error::Spec {
        path: path.into(),
        message: message.into(),
    }
}

impl ExperimentSpec {
    pub fn new(seed: u64) -> Self {
        Self {
            source: SourceSpec::default(),
            shots_per_setting: DEFAULT_SHOTS,
            seed,
            mode: Mode::default(),
            outputs: all_outputs(),
        }
    }

    /// Semantic checks, reported with the offending field path.
    pub fn validate(&self) -> Result<()> {
        let v = self.source.visibility;
        if !(0.0..=1.0).contains(&v) {
            return Err(spec_error("source.visibility", format!("visibility {v} outside [0, 1]")));
        }
        self.source.otc_unitary.matrix()?;
        if self.mode == Mode::Sampled && self.shots_per_setting == 0 {
            return Err(spec_error("shots_per_setting", "sampled mode needs at least one shot"));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serialises")
    }

    /// SHA-256 of the compact canonical serialisation.
    pub fn hash(&self) -> String {
        let body = serde_json::to_vec(self).expect("spec serialises");
        hex::encode(Sha256::digest(&body))
    }

    pub fn source(&self) -> Result<Source> {
        Ok(Source {
            visibility: self.source.visibility,
            otc_unitary: self.source.otc_unitary.matrix()?,
        })
    }

    pub fn wants(&self, kind: OutputKind) -> bool {
        self.outputs.contains(&kind)
    }
}

/// Parses and validates a spec; a missing seed defaults to 0.
pub fn parse_spec(text: &str) -> Result<ExperimentSpec> {
    parse_spec_with(text, 0)
}

/// As [`parse_spec`], with `fallback_seed` used when the document has no seed.
pub fn parse_spec_with(text: &str, fallback_seed: u64) -> Result<ExperimentSpec> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawSpec = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if inner.is_data() {
            spec_error(&path, strip_position(&inner.to_string()))
        } else {
            Error::SpecSyntax {
                line: inner.line(),
                column: inner.column(),
                message: strip_position(&inner.to_string()),
            }
        }
    })?;
    let spec = ExperimentSpec {
        source: raw.source,
        shots_per_setting: raw.shots_per_setting,
        seed: raw.seed.unwrap_or(fallback_seed),
        mode: raw.mode,
        outputs: raw.outputs,
    };
    spec.validate()?;
    Ok(spec)
}

/// serde_json appends " at line L column C"; the position is reported separately.
fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

/// Which parts of the pipeline to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Full,
    Tomography,
    Bell,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunProvenance {
    pub spec_sha256: String,
    pub seed: u64,
    pub tool_version: String,
    pub mode: Mode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapInfo {
    pub pair: Pair,
    pub resamples: u64,
    pub method: String,
}

impl BootstrapInfo {
    fn for_c13(mode: Mode) -> Self {
        let (resamples, method) = match mode {
            Mode::Exact => (0, "none: exact evaluation has no statistical error"),
            Mode::Sampled => (
                BOOTSTRAP_RESAMPLES,
                "multinomial resample of every quorum setting, full re-estimation of the coefficient table, \
                 sample standard deviation of the optimal CHSH value; intervals are ±1 standard error",
            ),
        };
        Self {
            pair: Pair(1, 3),
            resamples,
            method: method.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub spec: ExperimentSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reconstruction: Option<ReconstructionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chsh: Option<BTreeMap<Pair, ChshResult>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monogamy: Option<MonogamyReport>,
    /// How the standard error of the reconstructed-marginal CHSH value was obtained.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bootstrap: Option<BootstrapInfo>,
    /// Keyed `R123`, `R12`, `R13`, `R23`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub physicality: Option<BTreeMap<String, PhysicalityReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disturbance: Option<DisturbanceReport>,
    pub provenance: RunProvenance,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// A report plus the raw records behind it.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub report: RunReport,
    pub quorum: QuorumData,
    /// CHSH quartet records for pairs (1,2) and (2,3), 4 settings each.
    pub quartets: Vec<SettingData>,
}

impl RunArtifacts {
    /// Writes the requested outputs under `dir`, returning the paths written.
    /// Exact runs have no counts, so `counts.csv` is skipped for them.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let spec = &self.report.spec;
        let mut written = Vec::new();
        if spec.wants(OutputKind::ReportJson) {
            let p = dir.join(REPORT_FILE);
            fs::write(&p, self.report.to_json() + "\n")?;
            written.push(p);
        }
        if let Some(rec) = self.report.reconstruction.as_ref().filter(|_| spec.wants(OutputKind::CoefficientsCsv)) {
            let p = dir.join(COEFFICIENTS_FILE);
            rec.coefficients.write_csv(fs::File::create(&p)?)?;
            written.push(p);
        }
        if spec.wants(OutputKind::CountsCsv) && spec.mode == Mode::Sampled {
            let p = dir.join(COUNTS_FILE);
            let tables: Vec<&CountsTable> = self
                .quorum
                .entries
                .values()
                .chain(&self.quartets)
                .filter_map(SettingData::counts)
                .collect();
            write_counts_csv(fs::File::create(&p)?, tables)?;
            written.push(p);
        }
        Ok(written)
    }
}

pub fn run(spec: &ExperimentSpec) -> Result<RunReport> {
    Ok(run_stage(spec, Stage::Full, Execution::default())?.report)
}

pub fn run_stage(spec: &ExperimentSpec, stage: Stage, exec: Execution) -> Result<RunArtifacts> {
    spec.validate()?;
    let source = spec.source()?;
    let mode = match spec.mode {
        Mode::Exact => Acquisition::Exact,
        Mode::Sampled => Acquisition::Sampled { seed: spec.seed },
    };
    let quorum = acquire(&build_quorum(spec.shots_per_setting), &source, mode, exec)?;

    let mut report = RunReport {
        spec: spec.clone(),
        reconstruction: None,
        chsh: None,
        monogamy: None,
        bootstrap: None,
        physicality: None,
        disturbance: None,
        provenance: RunProvenance {
            spec_sha256: spec.hash(),
            seed: spec.seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            mode: spec.mode,
        },
    };
    let mut quartets = Vec::new();

    if stage != Stage::Bell {
        let rec = reconstruct(&quorum)?;
        let mut phys = BTreeMap::new();
        phys.insert("R123".to_string(), rec.pdo.physicality());
        for (key, m) in &rec.marginals {
            phys.insert(format!("R{key}"), m.pdo.physicality());
        }
        report.physicality = Some(phys);
        report.reconstruction = Some(rec);
    }

    if stage != Stage::Tomography {
        let (c12, q12) = quartet_chsh(&source, Pair(1, 2), mode, spec.shots_per_setting, exec)?;
        let (c23, q23) = quartet_chsh(&source, Pair(2, 3), mode, spec.shots_per_setting, exec)?;
        let c13 = reconstructed_marginal_chsh(&quorum, (0, 2), BOOTSTRAP_RESAMPLES, spec.seed, exec)?;
        quartets.extend(q12);
        quartets.extend(q23);
        let chsh: BTreeMap<Pair, ChshResult> =
            [(Pair(1, 2), c12), (Pair(1, 3), c13), (Pair(2, 3), c23)].into_iter().collect();
        report.monogamy = Some(monogamy_check(&chsh)?);
        report.chsh = Some(chsh);
        report.bootstrap = Some(BootstrapInfo::for_c13(spec.mode));
    }

    if stage == Stage::Full {
        report.disturbance = Some(disturbance_with(source.visibility, Axis::x())?);
    }

    Ok(RunArtifacts {
        report,
        quorum,
        quartets,
    })
}

/// Settings for a directly measured pair. The spatial pair uses the fixed
/// singlet quartet. The temporal pair uses the fixed quartet for a trivial
/// unitary and otherwise the optimal quartet of the ideal marginal.
fn quartet_settings(source: &Source, pair: Pair) -> Result<ChshSettings> {
    if pair == Pair(1, 2) {
        return Ok(ChshSettings::singlet_default());
    }
    if source.otc_unitary.max_abs_diff(&ComplexMatrix::identity(2)) == 0.0 {
        return Ok(ChshSettings::correlated_default());
    }
    let t = correlation_3x3(&otc_pdo(&source.otc_unitary)?.table(), 1, 2)?;
    Ok(chsh_optimal(&t).settings)
}

fn quartet_timeline(source: &Source, pair: Pair, a: Axis, b: Axis) -> Result<MeasurementTimeline> {
    let state = source.state()?;
    let events = if pair == Pair(1, 2) {
        vec![
            TimelineEvent::Measure(Measurement::new(Carrier::B, 1, a)),
            TimelineEvent::Measure(Measurement::new(Carrier::A, 1, b)),
        ]
    } else {
        vec![
            TimelineEvent::Measure(Measurement::new(Carrier::A, 1, a)),
            TimelineEvent::PrepareUnitary {
                carrier: Carrier::A,
                unitary: source.otc_unitary.clone(),
            },
            TimelineEvent::Measure(Measurement::new(Carrier::A, 2, b)),
        ]
    };
    MeasurementTimeline::new(state, events)
}

fn quartet_chsh(
    source: &Source,
    pair: Pair,
    mode: Acquisition,
    shots: u64,
    exec: Execution,
) -> Result<(ChshResult, Vec<SettingData>)> {
    let settings = quartet_settings(source, pair)?;
    let offset = if pair == Pair(1, 2) { 0 } else { 4 };
    let jobs: Vec<(u64, Axis, Axis)> = settings
        .quartet()
        .iter()
        .enumerate()
        .map(|(i, (a, b))| (QUARTET_STREAM_BASE + offset + i as u64, *a, *b))
        .collect();
    let data = exec
        .map(&jobs, |&(stream, a, b)| -> Result<SettingData> {
            let t = quartet_timeline(source, pair, a, b)?;
            Ok(match mode {
                Acquisition::Exact => SettingData::Exact(exact_distribution(&t)),
                Acquisition::Sampled { seed } => {
                    let mut c = sample_stream(&t, shots, seed, stream, Execution::Sequential)?;
                    c.setting = format!("chsh_{pair} {}", t.setting_label());
                    SettingData::Sampled(c)
                }
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok((chsh_from_counts(&data, settings)?, data))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_spec_defaults() {
        let s = parse_spec(r#"{"seed": 7}"#).unwrap();
        assert_eq!(s.seed, 7);
        assert_eq!(s.source.visibility, 1.0);
        assert_eq!(s.mode, Mode::Sampled);
        assert_eq!(s.shots_per_setting, 100_000);
        assert_eq!(s.outputs, OutputKind::ALL.to_vec());
        assert_eq!(s.source.otc_unitary.matrix().unwrap(), ComplexMatrix::identity(2));
    }

    #[test]
    fn calibration_spec() {
        let s = parse_spec(r#"{"source":{"visibility":0.952},"shots_per_setting":100000,"seed":42}"#).unwrap();
        assert_eq!(s.source.visibility, 0.952);
        assert_eq!(s.seed, 42);
    }

    #[test]
    fn semantic_errors_name_the_field() {
        let path_of = |text: &str| match parse_spec(text) {
            Err(Error::Spec { path, .. }) => path,
            other => panic!("expected a spec error, got {other:?}"),
        };
        assert_eq!(path_of(r#"{"source":{"visibility":1.7}}"#), "source.visibility");
        assert_eq!(path_of(r#"{"source":{"otc_unitary":"swap"}}"#), "source.otc_unitary");
        assert_eq!(path_of(r#"{"shots_per_setting":0}"#), "shots_per_setting");
        assert_eq!(path_of(r#"{"mode":"fast"}"#), "mode");
        assert_eq!(path_of(r#"{"seed":-1}"#), "seed");
        assert_eq!(
            path_of(r#"{"source":{"otc_unitary":{"matrix":{"re":[[1,1],[0,1]],"im":[[0,0],[0,0]]}}}}"#),
            "source.otc_unitary.matrix"
        );
        assert!(parse_spec(r#"{"shots_per_setting":0,"mode":"exact"}"#).is_ok());
    }

    #[test]
    fn syntax_error_position() {
        match parse_spec("{\n  \"seed\": 7,\n  oops\n}") {
            Err(Error::SpecSyntax { line, column, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(column, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unitary_forms() {
        let named = UnitarySpec::Named("x".into()).matrix().unwrap();
        let rot = UnitarySpec::Rotation {
            rotation: Rotation {
                axis: [1.0, 0.0, 0.0],
                angle: std::f64::consts::PI,
            },
        }
        .matrix()
        .unwrap();
        // exp(-iπX/2) = -iX
        assert!(rot.max_abs_diff(&named.scale(C64::new(0.0, -1.0))) < 1e-15);
        let s = parse_spec(r#"{"source":{"otc_unitary":{"matrix":{"re":[[0,1],[1,0]],"im":[[0,0],[0,0]]}}}}"#).unwrap();
        assert_eq!(s.source.otc_unitary.matrix().unwrap(), named);
        let h = UnitarySpec::Named("hadamard".into()).matrix().unwrap();
        assert!(h.is_unitary(1e-14) && h.is_hermitian(1e-14));
    }

    #[test]
    fn round_trip_is_idempotent() {
        for text in [
            r#"{"seed": 3}"#,
            r#"{"source":{"visibility":0.5,"otc_unitary":{"rotation":{"axis":[0,1,1],"angle":0.3}}},"mode":"exact","outputs":["report_json"],"seed":9}"#,
        ] {
            let a = parse_spec(text).unwrap();
            let b = parse_spec(&a.to_json()).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.to_json(), b.to_json());
        }
    }

    #[test]
    fn fallback_seed_only_when_absent() {
        assert_eq!(parse_spec_with("{}", 11).unwrap().seed, 11);
        assert_eq!(parse_spec_with(r#"{"seed":5}"#, 11).unwrap().seed, 5);
    }

    #[test]
    fn exact_run_values() {
        let mut spec = ExperimentSpec::new(0);
        spec.mode = Mode::Exact;
        let r = run(&spec).unwrap();
        let root8 = 8f64.sqrt();
        for c in r.chsh.as_ref().unwrap().values() {
            assert!((c.value - root8).abs() < 1e-9, "{c:?}");
            assert_eq!(c.stderr, 0.0);
        }
        for s in &r.monogamy.as_ref().unwrap().sums {
            assert!((s.sum - 2.0 * root8).abs() < 1e-9);
            assert!(s.sigmas.is_none());
        }
        let rec = r.reconstruction.as_ref().unwrap();
        assert!((rec.eigenvalues[0] + 0.25).abs() < 1e-9);
        assert!(rec.coefficients.iter().all(|(_, c)| c.stderr.unwrap_or(0.0) == 0.0));
        assert!(!r.physicality.as_ref().unwrap()["R123"].is_physical);
        assert!(r.physicality.as_ref().unwrap()["R12"].is_physical);
        assert!(!r.physicality.as_ref().unwrap()["R23"].is_physical);
    }

    #[test]
    fn exact_run_with_unitary_keeps_ideal_values() {
        for name in ["x", "hadamard"] {
            let mut spec = ExperimentSpec::new(0);
            spec.mode = Mode::Exact;
            spec.source.otc_unitary = UnitarySpec::Named(name.into());
            let r = run(&spec).unwrap();
            for c in r.chsh.as_ref().unwrap().values() {
                assert!((c.value - 8f64.sqrt()).abs() < 1e-9, "{name} {c:?}");
            }
        }
    }

    #[test]
    fn stages_select_sections() {
        let mut spec = ExperimentSpec::new(0);
        spec.mode = Mode::Exact;
        let t = run_stage(&spec, Stage::Tomography, Execution::Sequential).unwrap().report;
        assert!(t.reconstruction.is_some() && t.chsh.is_none() && t.disturbance.is_none());
        let b = run_stage(&spec, Stage::Bell, Execution::Sequential).unwrap().report;
        assert!(b.reconstruction.is_none() && b.monogamy.is_some());
    }

    #[test]
    fn writes_fixed_filenames() {
        let dir = tempfile::tempdir().unwrap();
        let mut spec = ExperimentSpec::new(1);
        spec.shots_per_setting = 500;
        let art = run_stage(&spec, Stage::Full, Execution::default()).unwrap();
        let written = art.write(dir.path()).unwrap();
        let names: Vec<_> = written.iter().map(|p| p.file_name().unwrap().to_str().unwrap().to_string()).collect();
        assert_eq!(names, [REPORT_FILE, COEFFICIENTS_FILE, COUNTS_FILE]);
        let counts = fs::read_to_string(dir.path().join(COUNTS_FILE)).unwrap();
        assert!(counts.starts_with("setting,outcome_tuple,count"));
        let coeffs = fs::read_to_string(dir.path().join(COEFFICIENTS_FILE)).unwrap();
        assert_eq!(coeffs.lines().count(), 65);

        spec.mode = Mode::Exact;
        let dir = tempfile::tempdir().unwrap();
        let written = run_stage(&spec, Stage::Full, Execution::default()).unwrap().write(dir.path()).unwrap();
        assert_eq!(written.len(), 2);
    }
}
