//! Pseudo-density operators over labelled space-time events.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, partial_trace, tensor_all, ComplexMatrix, C64, ZERO};
use crate::pauli::{assemble, expand, CorrelationTable, Pauli, PauliString};

/// Hermiticity and unit-trace tolerance for every PDO.
pub const PDO_TOL: f64 = 1e-10;
/// Eigenvalues at or above `-PHYSICALITY_TOL` count as non-negative.
pub const PHYSICALITY_TOL: f64 = 1e-8;

/// A carrier observed at a time, written `carrier@time` (e.g. `Q3@t2`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct EventLabel {
    pub carrier: String,
    pub time: String,
}

impl EventLabel {
    pub fn new(carrier: impl Into<String>, time: impl Into<String>) -> Self {
        Self {
            carrier: carrier.into(),
            time: time.into(),
        }
    }
}

impl fmt::Display for EventLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.carrier, self.time)
    }
}

impl FromStr for EventLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once('@') {
            Some((c, t)) if !c.is_empty() && !t.is_empty() => Ok(Self::new(c, t)),
            _ => Err(Error::invalid(format!("event label {s:?} is not of the form carrier@time"))),
        }
    }
}

impl TryFrom<String> for EventLabel {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<EventLabel> for String {
    fn from(e: EventLabel) -> String {
        e.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Canonical,
    Reconstructed,
    Marginal,
}

/// Hermitian, trace-one operator over an ordered list of event slots.
/// Positivity is not required.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoDensityOperator {
    events: Vec<EventLabel>,
    matrix: ComplexMatrix,
    provenance: Provenance,
}

impl PseudoDensityOperator {
    pub fn new(events: Vec<EventLabel>, matrix: ComplexMatrix, provenance: Provenance) -> Result<Self> {
        let n = events.len();
        if n == 0 {
            return Err(Error::invalid("a PDO needs at least one event"));
        }
        if matrix.dims() != (1 << n, 1 << n) {
            return Err(Error::invalid(format!(
                "{n} events need a {0}x{0} matrix, got {1:?}",
                1 << n,
                matrix.dims()
            )));
        }
        for (i, e) in events.iter().enumerate() {
            if events[..i].contains(e) {
                return Err(Error::invalid(format!("duplicate event {e}")));
            }
        }
        let defect = matrix.hermitian_defect();
        if defect > PDO_TOL {
            return Err(Error::invalid(format!("PDO is not Hermitian (defect {defect:.3e})")));
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > PDO_TOL {
            return Err(Error::invalid(format!("PDO trace is {tr}, expected 1")));
        }
        Ok(Self {
            events,
            matrix,
            provenance,
        })
    }

    /// Builds a PDO from its Pauli coefficients.
    pub fn from_table(events: Vec<EventLabel>, table: &CorrelationTable, provenance: Provenance) -> Result<Self> {
        if table.n_slots() != events.len() {
            return Err(Error::invalid("table and event list have different slot counts"));
        }
        Self::new(events, assemble(table)?, provenance)
    }

    pub fn events(&self) -> &[EventLabel] {
        &self.events
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn n_events(&self) -> usize {
        self.events.len()
    }

    pub fn table(&self) -> CorrelationTable {
        expand(&self.matrix).expect("PDO matrices are Hermitian with power-of-two dimension")
    }

    pub fn slot_of(&self, label: &str) -> Result<usize> {
        self.events
            .iter()
            .position(|e| e.to_string() == label)
            .ok_or_else(|| Error::invalid(format!("unknown event {label}")))
    }

    /// Partial trace over every event not named in `keep`.
    pub fn marginal<S: AsRef<str>>(&self, keep: &[S]) -> Result<Self> {
        let slots = keep
            .iter()
            .map(|k| self.slot_of(k.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        self.marginal_slots(&slots)
    }

    pub fn marginal_slots(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::invalid("marginal needs at least one kept event"));
        }
        let mut slots = keep.to_vec();
        slots.sort_unstable();
        slots.dedup();
        if let Some(&bad) = slots.iter().find(|&&s| s >= self.n_events()) {
            return Err(Error::invalid(format!("slot {bad} out of range")));
        }
        let dims = vec![2; self.n_events()];
        let reduced = partial_trace(&self.matrix, &dims, &slots)?;
        let events = slots.iter().map(|&s| self.events[s].clone()).collect();
        Self::new(events, reduced, Provenance::Marginal)
    }

    pub fn physicality(&self) -> PhysicalityReport {
        let eig = hermitian_eig(&self.matrix).expect("PDO matrices are Hermitian");
        PhysicalityReport::from_spectrum(&eig.values)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eig(&self.matrix).expect("PDO matrices are Hermitian").values
    }

    /// Real and imaginary parts as separate dense matrices, for plotting.
    pub fn plot_parts(&self) -> PlotParts {
        PlotParts {
            events: self.events.iter().map(ToString::to_string).collect(),
            re: self.matrix.real_part(),
            im: self.matrix.imag_part(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotParts {
    pub events: Vec<String>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalityReport {
    pub min_eigenvalue: f64,
    pub negative_subspace_dim: usize,
    pub is_physical: bool,
}

impl PhysicalityReport {
    pub fn from_spectrum(values: &[f64]) -> Self {
        let min_eigenvalue = values.iter().copied().fold(f64::INFINITY, f64::min);
        let negative_subspace_dim = values.iter().filter(|&&v| v < -PHYSICALITY_TOL).count();
        Self {
            min_eigenvalue,
            negative_subspace_dim,
            is_physical: min_eigenvalue >= -PHYSICALITY_TOL,
        }
    }
}

/// Events `Q1@t1`, `Q2@t1`, `Q3@t2`: the chronology-respecting qubit, the
/// qubit entering the curve, and its copy emerging from it.
pub fn otc_events() -> Vec<EventLabel> {
    vec![
        EventLabel::new("Q1", "t1"),
        EventLabel::new("Q2", "t1"),
        EventLabel::new("Q3", "t2"),
    ]
}

/// `¼(I + XX + YY + ZZ)`: a maximally mixed qubit measured at two times.
pub fn two_time_mixed() -> PseudoDensityOperator {
    let table = CorrelationTable::from_values(2, [("II", 1.0), ("XX", 1.0), ("YY", 1.0), ("ZZ", 1.0)])
        .expect("static table");
    PseudoDensityOperator::from_table(
        vec![EventLabel::new("Q", "t1"), EventLabel::new("Q", "t2")],
        &table,
        Provenance::Canonical,
    )
    .expect("static PDO")
}

/// Pauli coefficients of `(1/8)(I - Σ12 + Σ23 - Σ13)`.
pub fn otc_table() -> CorrelationTable {
    let mut t = CorrelationTable::normalised(3);
    for (pair, sign) in [((0, 1), -1.0), ((1, 2), 1.0), ((0, 2), -1.0)] {
        for p in Pauli::AXES {
            let s = PauliString::with(3, &[(pair.0, p), (pair.1, p)]);
            t.insert(s, crate::pauli::Coefficient::exact(sign))
                .expect("three-slot string");
        }
    }
    t
}

/// Three-event PDO of the open timelike curve, with an optional unitary
/// acting on the emerging copy: `(I ⊗ I ⊗ u) R (I ⊗ I ⊗ u)†`.
pub fn otc_pdo(u: &ComplexMatrix) -> Result<PseudoDensityOperator> {
    if u.dims() != (2, 2) || !u.is_unitary(PDO_TOL) {
        return Err(Error::invalid("OTC transformation must be a 2x2 unitary"));
    }
    let base = assemble(&otc_table())?;
    let id = ComplexMatrix::identity(2);
    let full_u = tensor_all([&id, &id, u]);
    PseudoDensityOperator::new(otc_events(), base.conjugate_by(&full_u), Provenance::Canonical)
}

/// `(|01> - |10>)/√2`, i.e. `(|HV> - |VH>)/√2`.
pub fn singlet_vector() -> Vec<C64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    vec![ZERO, C64::new(h, 0.0), C64::new(-h, 0.0), ZERO]
}

/// `(I ⊗ u)|ψ⁻>`.
pub fn rotated_singlet_vector(u: &ComplexMatrix) -> Vec<C64> {
    let full = crate::linalg::tensor(&ComplexMatrix::identity(2), u);
    full.mat_vec(&singlet_vector())
}

pub fn singlet() -> ComplexMatrix {
    ComplexMatrix::projector(&singlet_vector())
}

/// `v·|ψ⁻><ψ⁻| + (1 - v)·I/4`.
pub fn werner(v: f64) -> Result<ComplexMatrix> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::invalid(format!("visibility {v} outside [0, 1]")));
    }
    Ok(&singlet().scale_real(v) + &ComplexMatrix::identity(4).scale_real((1.0 - v) / 4.0))
}
