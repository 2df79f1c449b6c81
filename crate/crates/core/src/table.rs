//! Bundled knot table: reduced diagrams whose marked crossing, once replaced
//! by a rational tangle, gives back a tabulated knot.
//!
//! A data directory holds `index.json` plus the PD files it names. Each entry
//! stores the reduced diagram, the crossing standing in for the tangle, and
//! the tangle itself. The tangle's sign selects the checkerboard coloring in
//! which it extends that crossing, so PD files need no coloring annotation.

use crate::diagram::{parse_pd, CrossingId, LinkDiagram};
use crate::error::TableError;
use crate::laurent::LaurentPolynomial;
use crate::qa::{certify, certify_at, verify, QACertificate, QAResult};
use crate::statesum::jones_in_t;
use crate::tait::goeritz_determinant;
use crate::tangle::{epsilon, replace_with_tangle, RationalTangle};
use num_traits::ToPrimitive;
use serde::Deserialize;
use std::fmt;
use std::path::{Path, PathBuf};

/// Node budget used by `table verify`.
pub const TABLE_BUDGET: usize = 1_000_000;

pub const DATA_ENV: &str = "QACERT_DATA";

#[derive(Clone, Debug)]
pub struct TableEntry {
    pub name: String,
    /// Display only; the replaced tangle is marked with asterisks.
    pub conway: String,
    /// Reduced diagram, PD text.
    pub pd: String,
    /// The tabulated knot, PD text.
    pub knot_pd: String,
    pub tangle_crossing: CrossingId,
    pub tangle: RationalTangle,
    pub determinant: u64,
    /// Tabulated Jones polynomial in t.
    pub jones: String,
}

/// A knot that must never be certified.
#[derive(Clone, Debug)]
pub struct NegativeFixture {
    pub name: String,
    pub conway: String,
    pub pd: String,
    pub determinant: u64,
    pub note: String,
}

#[derive(Clone, Debug)]
pub struct Table {
    pub entries: Vec<TableEntry>,
    pub negative: Vec<NegativeFixture>,
}

#[derive(Deserialize)]
struct RawIndex {
    entries: Vec<RawEntry>,
    #[serde(default)]
    negative: Vec<RawNegative>,
}

#[derive(Deserialize)]
struct RawEntry {
    name: String,
    conway: String,
    knot_pd: String,
    reduced_pd: String,
    tangle_crossing: CrossingId,
    tangle: Vec<i64>,
    determinant: u64,
    jones: String,
}

#[derive(Deserialize)]
struct RawNegative {
    name: String,
    conway: String,
    knot_pd: String,
    determinant: u64,
    #[serde(default)]
    note: String,
}

/// The bundled data directory of this source tree.
pub fn bundled_data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/table")
}

/// Explicit directory first, then `QACERT_DATA`, then the bundled copy.
pub fn resolve_data_dir(explicit: Option<&Path>) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    match std::env::var_os(DATA_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => bundled_data_dir(),
    }
}

fn read(dir: &Path, file: &str) -> Result<String, TableError> {
    let path = dir.join(file);
    std::fs::read_to_string(&path).map_err(|_| TableError::MissingDataFile(path.display().to_string()))
}

pub fn load_table(dir: &Path) -> Result<Table, TableError> {
    let raw: RawIndex = serde_json::from_str(&read(dir, "index.json")?)
        .map_err(|e| TableError::BadData(format!("index.json: {e}")))?;
    let mut entries = Vec::new();
    for e in raw.entries {
        entries.push(TableEntry {
            tangle: RationalTangle::new(e.tangle)?,
            pd: read(dir, &e.reduced_pd)?,
            knot_pd: read(dir, &e.knot_pd)?,
            name: e.name,
            conway: e.conway,
            tangle_crossing: e.tangle_crossing,
            determinant: e.determinant,
            jones: e.jones,
        });
    }
    let mut negative = Vec::new();
    for n in raw.negative {
        negative.push(NegativeFixture {
            pd: read(dir, &n.knot_pd)?,
            name: n.name,
            conway: n.conway,
            determinant: n.determinant,
            note: n.note,
        });
    }
    Ok(Table { entries, negative })
}

impl TableEntry {
    /// The reduced diagram, in the coloring where the tangle extends the crossing.
    pub fn reduced_diagram(&self) -> Result<LinkDiagram, TableError> {
        let d = parse_pd(&self.pd)?;
        d.check_crossing(self.tangle_crossing)?;
        let sign = self.tangle.coefficients()[0].signum() as i32;
        Ok(if epsilon(&d, self.tangle_crossing) == sign {
            d
        } else {
            d.rotate_all()
        })
    }
}

#[derive(Clone, Debug)]
pub struct EntryReport {
    pub name: String,
    pub conway: String,
    pub tangle: String,
    pub reduced_crossings: usize,
    pub replaced_crossings: usize,
    pub determinant: u64,
    /// Certificate at the tangle crossing of the reduced diagram.
    pub reduced_certificate: Option<QACertificate>,
    /// Certificate for the diagram after replacement.
    pub certificate: Option<QACertificate>,
    pub failures: Vec<String>,
}

impl EntryReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn same_up_to_mirror(got: &LaurentPolynomial, want: &LaurentPolynomial) -> bool {
    got == want || &got.substitute_power(-1) == want
}

fn det_u64(d: &LinkDiagram) -> u64 {
    goeritz_determinant(d).to_u64().unwrap_or(u64::MAX)
}

/// Certify at the tangle crossing, replace, certify the result, and compare
/// it with the tabulated knot by determinant and Jones polynomial.
pub fn verify_entry(e: &TableEntry, budget: usize) -> EntryReport {
    let mut r = EntryReport {
        name: e.name.clone(),
        conway: e.conway.clone(),
        tangle: e.tangle.to_string(),
        reduced_crossings: 0,
        replaced_crossings: 0,
        determinant: 0,
        reduced_certificate: None,
        certificate: None,
        failures: Vec::new(),
    };
    let d = match e.reduced_diagram() {
        Ok(d) => d,
        Err(err) => {
            r.failures.push(err.to_string());
            return r;
        }
    };
    r.reduced_crossings = d.crossing_count();
    match certify_at(&d, e.tangle_crossing, budget) {
        QAResult::Certified(c) if verify(&c, &d) => r.reduced_certificate = Some(c),
        other => r.failures.push(format!("tangle crossing not certified: {}", other.label())),
    }
    let replaced = match replace_with_tangle(&d, e.tangle_crossing, &e.tangle) {
        Ok(x) => x.diagram,
        Err(err) => {
            r.failures.push(err.to_string());
            return r;
        }
    };
    r.replaced_crossings = replaced.crossing_count();
    if r.replaced_crossings != r.reduced_crossings - 1 + e.tangle.crossing_count() {
        r.failures.push("unexpected crossing count after replacement".into());
    }
    match certify(&replaced, budget) {
        QAResult::Certified(c) if verify(&c, &replaced) => r.certificate = Some(c),
        other => r.failures.push(format!("replaced diagram not certified: {}", other.label())),
    }
    r.determinant = det_u64(&replaced);
    if r.determinant != e.determinant {
        r.failures.push(format!("det {} != tabulated {}", r.determinant, e.determinant));
    }
    match parse_pd(&e.knot_pd) {
        Ok(k) if det_u64(&k) != e.determinant => {
            r.failures.push("tabulated knot has a different det".into())
        }
        Ok(k) => match (
            LaurentPolynomial::parse(&e.jones, "t"),
            jones_in_t(&replaced),
            jones_in_t(&k),
        ) {
            (Some(want), Ok(Some(got)), Ok(Some(knot))) => {
                if !same_up_to_mirror(&got, &want) {
                    r.failures.push("Jones polynomial differs from the table".into());
                }
                if !same_up_to_mirror(&knot, &want) {
                    r.failures.push("tabulated PD disagrees with tabulated Jones".into());
                }
            }
            _ => r.failures.push("Jones polynomial unavailable".into()),
        },
        Err(err) => r.failures.push(err.to_string()),
    }
    r
}

#[derive(Clone, Debug)]
pub struct NegativeReport {
    pub name: String,
    pub determinant: u64,
    pub result: String,
    pub failures: Vec<String>,
}

impl NegativeReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// A negative fixture passes when it is anything but Certified.
pub fn check_negative(n: &NegativeFixture, budget: usize) -> NegativeReport {
    let mut r = NegativeReport {
        name: n.name.clone(),
        determinant: 0,
        result: String::new(),
        failures: Vec::new(),
    };
    match parse_pd(&n.pd) {
        Ok(d) => {
            r.determinant = det_u64(&d);
            if r.determinant != n.determinant {
                r.failures.push(format!("det {} != tabulated {}", r.determinant, n.determinant));
            }
            let res = certify(&d, budget);
            r.result = res.label().to_string();
            if res.is_certified() {
                r.failures.push("certified a knot that is not quasi-alternating".into());
            }
        }
        Err(err) => r.failures.push(err.to_string()),
    }
    r
}

#[derive(Clone, Debug)]
pub struct TableReport {
    pub entries: Vec<EntryReport>,
    pub negative: Vec<NegativeReport>,
}

impl TableReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed()) && self.negative.iter().all(|n| n.passed())
    }
}

impl fmt::Display for TableReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            write!(
                f,
                "{:<7} {:<18} {:<12} {:>2} -> {:>2} crossings  det {:>3}  {}",
                e.name,
                e.conway,
                e.tangle,
                e.reduced_crossings,
                e.replaced_crossings,
                e.determinant,
                if e.passed() { "pass" } else { "FAIL" }
            )?;
            for msg in &e.failures {
                write!(f, "\n        {msg}")?;
            }
            writeln!(f)?;
        }
        for n in &self.negative {
            writeln!(
                f,
                "{:<7} det {:>3}  certify: {:<8} {}",
                n.name,
                n.determinant,
                n.result,
                if n.passed() { "pass (not certified)" } else { "FAIL" }
            )?;
            for msg in &n.failures {
                writeln!(f, "        {msg}")?;
            }
        }
        let total = self.entries.len() + self.negative.len();
        let ok = self.entries.iter().filter(|e| e.passed()).count()
            + self.negative.iter().filter(|n| n.passed()).count();
        write!(f, "{ok}/{total} passed")
    }
}

/// Verify every entry and negative fixture, in parallel, reporting in table order.
pub fn table_verify(dir: &Path, budget: usize) -> Result<TableReport, TableError> {
    let table = load_table(dir)?;
    let (entries, negative) = std::thread::scope(|s| {
        let es: Vec<_> = table
            .entries
            .iter()
            .map(|e| s.spawn(move || verify_entry(e, budget)))
            .collect();
        let ns: Vec<_> = table
            .negative
            .iter()
            .map(|n| s.spawn(move || check_negative(n, budget)))
            .collect();
        (
            es.into_iter().map(|h| h.join().expect("entry worker")).collect(),
            ns.into_iter().map(|h| h.join().expect("fixture worker")).collect(),
        )
    });
    Ok(TableReport { entries, negative })
}
