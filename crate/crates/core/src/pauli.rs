//! Pauli-string basis for operators on n event slots.
//!
//! Tables store raw expectations `<s> = Tr(m P_s)`, so the all-identity entry
//! is always 1 and the coefficients read off directly as correlators. The
//! `1/2^n` prefactor is applied by [`assemble`].

use std::collections::BTreeMap;
use std::fmt;
use std::io;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{tensor_all, ComplexMatrix, C64, I, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    pub const AXES: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> ComplexMatrix {
        let rows = match self {
            Pauli::I => vec![vec![ONE, ZERO], vec![ZERO, ONE]],
            Pauli::X => vec![vec![ZERO, ONE], vec![ONE, ZERO]],
            Pauli::Y => vec![vec![ZERO, -I], vec![I, ZERO]],
            Pauli::Z => vec![vec![ONE, ZERO], vec![ZERO, -ONE]],
        };
        ComplexMatrix::from_rows(rows).expect("static 2x2")
    }

    /// Index into a 3-vector: X→0, Y→1, Z→2. `None` for the identity.
    pub fn axis_index(self) -> Option<usize> {
        match self {
            Pauli::I => None,
            Pauli::X => Some(0),
            Pauli::Y => Some(1),
            Pauli::Z => Some(2),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// `(flips_bit, phase on |0>, phase on |1>)`.
    fn action(self) -> (bool, C64, C64) {
        match self {
            Pauli::I => (false, ONE, ONE),
            Pauli::X => (true, ONE, ONE),
            // Y|0> = i|1>, Y|1> = -i|0>
            Pauli::Y => (true, I, -I),
            Pauli::Z => (false, ONE, -ONE),
        }
    }
}

impl TryFrom<char> for Pauli {
    type Error = Error;

    fn try_from(c: char) -> Result<Self> {
        match c.to_ascii_uppercase() {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(Error::invalid(format!("not a Pauli label: {other:?}"))),
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// One Pauli label per event slot, slot 0 first (e.g. `"XYI"`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn new(labels: Vec<Pauli>) -> Self {
        Self(labels)
    }

    pub fn identity(n: usize) -> Self {
        Self(vec![Pauli::I; n])
    }

    /// Identity everywhere except the listed `(slot, label)` pairs.
    pub fn with(n: usize, sites: &[(usize, Pauli)]) -> Self {
        let mut s = Self::identity(n);
        for &(slot, p) in sites {
            s.0[slot] = p;
        }
        s
    }

    /// All `4^n` strings in lexicographic (I < X < Y < Z) order.
    pub fn all(n: usize) -> Vec<PauliString> {
        let mut out = vec![PauliString(Vec::with_capacity(n))];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|s| {
                    Pauli::ALL.iter().map(move |&p| {
                        let mut next = s.0.clone();
                        next.push(p);
                        PauliString(next)
                    })
                })
                .collect();
        }
        out
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn labels(&self) -> &[Pauli] {
        &self.0
    }

    pub fn get(&self, slot: usize) -> Pauli {
        self.0[slot]
    }

    /// Number of non-identity labels.
    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&p| p != Pauli::I).count()
    }

    pub fn is_identity(&self) -> bool {
        self.weight() == 0
    }

    /// Slots carrying a non-identity label.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&s| self.0[s] != Pauli::I).collect()
    }

    /// Restriction to a subset of slots, in the given order.
    pub fn restrict(&self, slots: &[usize]) -> PauliString {
        PauliString(slots.iter().map(|&s| self.0[s]).collect())
    }

    /// `P|j> = phase(j) |j ^ flip_mask>` with slot 0 as the most significant bit.
    fn flip_mask_and_phase(&self, basis: usize) -> (usize, C64) {
        let n = self.len();
        let mut mask = 0;
        let mut phase = ONE;
        for (slot, p) in self.0.iter().enumerate() {
            let bit = n - 1 - slot;
            let (flips, ph0, ph1) = p.action();
            if flips {
                mask |= 1 << bit;
            }
            phase *= if (basis >> bit) & 1 == 0 { ph0 } else { ph1 };
        }
        (mask, phase)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::invalid("empty Pauli string"));
        }
        s.chars().map(Pauli::try_from).collect::<Result<Vec<_>>>().map(PauliString)
    }
}

impl TryFrom<String> for PauliString {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PauliString> for String {
    fn from(s: PauliString) -> String {
        s.to_string()
    }
}

/// Tensor product of single-qubit Paulis in slot order.
pub fn pauli_matrix(s: &PauliString) -> ComplexMatrix {
    let factors: Vec<ComplexMatrix> = s.labels().iter().map(|p| p.matrix()).collect();
    tensor_all(&factors)
}

/// `Tr(m · P_s)` without forming `P_s`.
pub fn pauli_expectation(m: &ComplexMatrix, s: &PauliString) -> C64 {
    let dim = 1usize << s.len();
    assert_eq!(m.rows(), dim, "operator dimension does not match string length");
    // P_s has a single entry per column: P[j ^ mask][j] = phase(j).
    (0..dim)
        .map(|j| {
            let (mask, phase) = s.flip_mask_and_phase(j);
            m[(j, j ^ mask)] * phase
        })
        .sum()
}

/// A correlator estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub value: f64,
    pub stderr: Option<f64>,
}

impl Coefficient {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            stderr: None,
        }
    }

    pub fn measured(value: f64, stderr: f64) -> Self {
        Self {
            value,
            stderr: Some(stderr),
        }
    }
}

/// Pauli-string coefficients of an operator on `n_slots` event slots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTable {
    n_slots: usize,
    entries: BTreeMap<PauliString, Coefficient>,
}

impl CorrelationTable {
    pub fn new(n_slots: usize) -> Self {
        assert!(n_slots >= 1, "a table needs at least one slot");
        Self {
            n_slots,
            entries: BTreeMap::new(),
        }
    }

    /// Table with the all-identity entry set to 1.
    pub fn normalised(n_slots: usize) -> Self {
        let mut t = Self::new(n_slots);
        t.entries
            .insert(PauliString::identity(n_slots), Coefficient::exact(1.0));
        t
    }

    /// Convenience for literals such as `[("XX", -1.0), ...]`.
    pub fn from_values<'a>(n_slots: usize, values: impl IntoIterator<Item = (&'a str, f64)>) -> Result<Self> {
        let mut t = Self::new(n_slots);
        for (s, v) in values {
            t.insert(s.parse()?, Coefficient::exact(v))?;
        }
        Ok(t)
    }

    pub fn n_slots(&self) -> usize {
        self.n_slots
    }

    pub fn insert(&mut self, s: PauliString, c: Coefficient) -> Result<()> {
        if s.len() != self.n_slots {
            return Err(Error::invalid(format!(
                "string {s} has {} slots, table has {}",
                s.len(),
                self.n_slots
            )));
        }
        self.entries.insert(s, c);
        Ok(())
    }

    pub fn get(&self, s: &PauliString) -> Option<&Coefficient> {
        self.entries.get(s)
    }

    /// Value of `s`, with missing strings read as zero.
    pub fn value(&self, s: &PauliString) -> f64 {
        self.entries.get(s).map_or(0.0, |c| c.value)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, &Coefficient)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Strings whose value exceeds `tol` in magnitude.
    pub fn nonzero(&self, tol: f64) -> Vec<(&PauliString, f64)> {
        self.entries
            .iter()
            .filter(|(_, c)| c.value.abs() > tol)
            .map(|(s, c)| (s, c.value))
            .collect()
    }

    /// Largest `|self(s) - other(s)|` over the union of both tables.
    pub fn max_abs_diff(&self, other: &CorrelationTable) -> f64 {
        self.entries
            .keys()
            .chain(other.entries.keys())
            .map(|s| (self.value(s) - other.value(s)).abs())
            .fold(0.0, f64::max)
    }

    /// Restriction to a subset of slots: keeps the strings that are identity
    /// outside `slots`, relabelled onto the smaller slot set.
    pub fn marginal(&self, slots: &[usize]) -> CorrelationTable {
        let mut out = CorrelationTable::new(slots.len());
        for (s, c) in &self.entries {
            let outside_identity = (0..self.n_slots)
                .filter(|i| !slots.contains(i))
                .all(|i| s.get(i) == Pauli::I);
            if outside_identity {
                out.entries.insert(s.restrict(slots), *c);
            }
        }
        out
    }

    pub fn write_csv<W: io::Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["string", "value", "stderr"])?;
        for (s, c) in &self.entries {
            let stderr = c.stderr.map(|e| e.to_string()).unwrap_or_default();
            wtr.write_record([s.to_string(), c.value.to_string(), stderr])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: io::Read>(r: R) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            string: String,
            value: f64,
            stderr: Option<f64>,
        }
        let mut rdr = csv::Reader::from_reader(r);
        let mut table: Option<CorrelationTable> = None;
        for row in rdr.deserialize() {
            let row: Row = row?;
            let s: PauliString = row.string.parse()?;
            let t = table.get_or_insert_with(|| CorrelationTable::new(s.len()));
            t.insert(
                s,
                Coefficient {
                    value: row.value,
                    stderr: row.stderr,
                },
            )?;
        }
        table.ok_or_else(|| Error::invalid("empty coefficient csv"))
    }
}

/// Coefficients `Tr(m P_s)` for all `4^n` strings.
pub fn expand(m: &ComplexMatrix) -> Result<CorrelationTable> {
    if !m.is_square() {
        return Err(Error::invalid("expansion needs a square matrix"));
    }
    let dim = m.rows();
    if !dim.is_power_of_two() || dim < 2 {
        return Err(Error::invalid(format!("dimension {dim} is not a power of two")));
    }
    let defect = m.hermitian_defect();
    if defect > 1e-10 {
        return Err(Error::invalid(format!(
            "expansion needs a Hermitian matrix (max |m - m†| = {defect:.3e})"
        )));
    }
    let n = dim.trailing_zeros() as usize;
    let mut table = CorrelationTable::new(n);
    for s in PauliString::all(n) {
        let c = pauli_expectation(m, &s);
        debug_assert!(c.im.abs() < 1e-10, "imaginary Pauli coefficient {c}");
        table.entries.insert(s, Coefficient::exact(c.re));
    }
    Ok(table)
}

/// `(1/2^n) Σ_s value(s) P_s`; missing strings count as zero.
pub fn assemble(t: &CorrelationTable) -> Result<ComplexMatrix> {
    let n = t.n_slots;
    let id = PauliString::identity(n);
    match t.get(&id) {
        None => return Err(Error::invalid("table has no all-identity entry")),
        Some(c) if (c.value - 1.0).abs() > 1e-10 => {
            return Err(Error::invalid(format!(
                "all-identity entry is {}, expected 1",
                c.value
            )))
        }
        Some(_) => {}
    }
    let dim = 1usize << n;
    let mut m = ComplexMatrix::zeros(dim, dim);
    for (s, c) in &t.entries {
        if c.value == 0.0 {
            continue;
        }
        let w = C64::new(c.value, 0.0);
        for j in 0..dim {
            // Column j of P_s has a single entry at row j ^ mask.
            let (mask, phase) = s.flip_mask_and_phase(j);
            m[(j ^ mask, j)] += w * phase;
        }
    }
    Ok(m.scale_real(1.0 / dim as f64))
}

/// `T[a][b] = <σ_a at slot_a, σ_b at slot_b>` for a, b over X, Y, Z.
pub fn correlation_3x3(t: &CorrelationTable, slot_a: usize, slot_b: usize) -> Result<[[f64; 3]; 3]> {
    let n = t.n_slots;
    if n < 2 {
        return Err(Error::invalid("correlation matrix needs at least two slots"));
    }
    if slot_a >= n || slot_b >= n {
        return Err(Error::invalid(format!(
            "slot out of range for a {n}-slot table"
        )));
    }
    if slot_a == slot_b {
        return Err(Error::invalid("correlation matrix needs two distinct slots"));
    }
    let mut out = [[0.0; 3]; 3];
    for (i, &a) in Pauli::AXES.iter().enumerate() {
        for (j, &b) in Pauli::AXES.iter().enumerate() {
            out[i][j] = t.value(&PauliString::with(n, &[(slot_a, a), (slot_b, b)]));
        }
    }
    Ok(out)
}
