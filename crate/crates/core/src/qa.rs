//! Quasi-alternating certificates: search, verification, and connected sums.
//!
//! Every certificate node describes a "raw" diagram handed down by its parent
//! (the input at the root, a smoothing otherwise). A `Leaf` replays
//! Reidemeister moves taking the raw diagram to the crossingless unknot: the
//! greedy R1/R2 simplification, plus R3 moves when that stalls at det 1. A `Branch`
//! is about the canonical form of the simplified raw diagram: `key` names it
//! and `crossing` indexes it; the children are its two smoothings.

use crate::diagram::{CrossingId, LinkDiagram, Move, Smoothing};
use crate::error::QaError;
use crate::families::{classify_pretzel, pretzel_diagram, PretzelLabel, PretzelSpec};
use crate::tait::{goeritz_determinant, tait_determinant};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

pub const DEFAULT_NODE_BUDGET: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum QACertificate {
    Branch {
        key: String,
        crossing: CrossingId,
        det: u64,
        det0: u64,
        #[serde(rename = "detInf")]
        det_inf: u64,
        zero: Box<QACertificate>,
        inf: Box<QACertificate>,
    },
    Leaf {
        trace: Vec<String>,
    },
}

impl QACertificate {
    pub fn det(&self) -> u64 {
        match self {
            QACertificate::Branch { det, .. } => *det,
            QACertificate::Leaf { .. } => 1,
        }
    }
    pub fn node_count(&self) -> usize {
        match self {
            QACertificate::Branch { zero, inf, .. } => 1 + zero.node_count() + inf.node_count(),
            QACertificate::Leaf { .. } => 1,
        }
    }
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }
    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NotQaReason {
    DeterminantZero,
    Theorem32Part2,
    LspaceCriterion,
}

impl fmt::Display for NotQaReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NotQaReason::DeterminantZero => "determinant is zero",
            NotQaReason::Theorem32Part2 => "Theorem 3.2(2)",
            NotQaReason::LspaceCriterion => "L-space criterion",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QAResult {
    Certified(QACertificate),
    NotQA(NotQaReason),
    Unknown(String),
}

impl QAResult {
    pub fn is_certified(&self) -> bool {
        matches!(self, QAResult::Certified(_))
    }
    pub fn certificate(&self) -> Option<&QACertificate> {
        match self {
            QAResult::Certified(c) => Some(c),
            _ => None,
        }
    }
    /// Coarse classification for comparisons.
    pub fn label(&self) -> &'static str {
        match self {
            QAResult::Certified(_) => "Certified",
            QAResult::NotQA(_) => "NotQA",
            QAResult::Unknown(_) => "Unknown",
        }
    }
}

fn is_unknot(d: &LinkDiagram) -> bool {
    d.crossing_count() == 0 && d.free_loops() == 1
}

fn fast_det(d: &LinkDiagram) -> u64 {
    tait_determinant(d).to_u64().unwrap_or(u64::MAX)
}

/// Diagrams visited when looking for an R3 route to the unknot.
const R3_SEARCH_LIMIT: usize = 2_000;

/// Moves taking a stuck det-1 diagram to the unknot: breadth-first over R3
/// moves, each followed by greedy simplification.
fn r3_unknot_trace(d: &LinkDiagram) -> Option<Vec<Move>> {
    let mut seen = std::collections::HashSet::new();
    let mut queue = std::collections::VecDeque::from([(d.clone(), Vec::new())]);
    seen.insert(d.canonical_key());
    while let Some((cur, trace)) = queue.pop_front() {
        for m in cur.r3_moves() {
            let (moved, _) = cur.apply_move(&m).expect("listed moves apply");
            let simp = moved.simplify();
            let mut t = trace.clone();
            t.push(m);
            t.extend(simp.trace);
            if is_unknot(&simp.diagram) {
                return Some(t);
            }
            if seen.len() >= R3_SEARCH_LIMIT {
                return None;
            }
            if seen.insert(simp.diagram.canonical_key()) {
                queue.push_back((simp.diagram, t));
            }
        }
    }
    None
}

#[derive(Debug)]
struct Exhausted;

/// Memoized depth-first search over det-additive crossings.
pub struct Certifier {
    budget: usize,
    nodes_used: usize,
    use_memo: bool,
    memo: HashMap<String, Option<QACertificate>>,
    r3_memo: HashMap<LinkDiagram, Option<Vec<Move>>>,
}

impl Certifier {
    pub fn new(budget: usize) -> Self {
        Certifier {
            budget,
            nodes_used: 0,
            use_memo: true,
            memo: HashMap::new(),
            r3_memo: HashMap::new(),
        }
    }
    pub fn without_memo(mut self) -> Self {
        self.use_memo = false;
        self
    }
    pub fn nodes_used(&self) -> usize {
        self.nodes_used
    }

    pub fn certify(&mut self, d: &LinkDiagram) -> QAResult {
        self.run(d, None)
    }

    /// Certify with the root branch forced at crossing `c` of `d`.
    pub fn certify_at(&mut self, d: &LinkDiagram, c: CrossingId) -> QAResult {
        if c >= d.crossing_count() {
            return QAResult::Unknown(format!("crossing {c} does not exist"));
        }
        self.run(d, Some(c))
    }

    fn run(&mut self, d: &LinkDiagram, forced: Option<CrossingId>) -> QAResult {
        if goeritz_determinant(d) == 0u32.into() {
            return QAResult::NotQA(NotQaReason::DeterminantZero);
        }
        match self.node(d, forced) {
            Ok(Some(cert)) => QAResult::Certified(cert),
            Ok(None) => QAResult::Unknown(match forced {
                Some(c) => format!("no certificate with root crossing {c}"),
                None => "no certificate found in the searched diagrams".into(),
            }),
            Err(Exhausted) => QAResult::Unknown(format!("node budget {} exhausted", self.budget)),
        }
    }

    fn node(
        &mut self,
        raw: &LinkDiagram,
        forced: Option<CrossingId>,
    ) -> Result<Option<QACertificate>, Exhausted> {
        let simp = raw.simplify();
        if is_unknot(&simp.diagram) {
            return Ok(Some(QACertificate::Leaf {
                trace: simp.trace.iter().map(|m| m.to_string()).collect(),
            }));
        }
        if forced.is_none() && !simp.diagram.is_split() && fast_det(&simp.diagram) == 1 {
            let extra = match self.r3_memo.get(&simp.diagram) {
                Some(hit) => hit.clone(),
                None => {
                    self.nodes_used += 1;
                    if self.nodes_used > self.budget {
                        return Err(Exhausted);
                    }
                    let found = r3_unknot_trace(&simp.diagram);
                    self.r3_memo.insert(simp.diagram.clone(), found.clone());
                    found
                }
            };
            return Ok(extra.map(|extra| {
                let mut trace: Vec<String> = simp.trace.iter().map(|m| m.to_string()).collect();
                trace.extend(extra.iter().map(|m| m.to_string()));
                QACertificate::Leaf { trace }
            }));
        }
        let canon = simp.diagram.canonical();
        let forced_c = match forced {
            Some(x) => match simp.map[x] {
                Some(y) => Some(canon.map[y]),
                None => return Ok(None),
            },
            None => None,
        };
        let memoize = self.use_memo && forced.is_none();
        if memoize {
            if let Some(hit) = self.memo.get(&canon.key) {
                return Ok(hit.clone());
            }
        }
        self.nodes_used += 1;
        if self.nodes_used > self.budget {
            return Err(Exhausted);
        }
        let d = &canon.diagram;
        let result = if d.is_split() {
            None
        } else {
            self.search(d, &canon.key, forced_c)?
        };
        if memoize {
            self.memo.insert(canon.key, result.clone());
        }
        Ok(result)
    }

    fn search(
        &mut self,
        d: &LinkDiagram,
        key: &str,
        forced: Option<CrossingId>,
    ) -> Result<Option<QACertificate>, Exhausted> {
        let det = fast_det(d);
        if det <= 1 {
            return Ok(None);
        }
        let candidates: Vec<CrossingId> = match forced {
            Some(c) => vec![c],
            None => (0..d.crossing_count()).collect(),
        };
        for c in candidates {
            let d0 = d.smooth(c, Smoothing::Zero);
            let di = d.smooth(c, Smoothing::Infinity);
            let (det0, det_inf) = (fast_det(&d0), fast_det(&di));
            if det0 == 0 || det_inf == 0 || det0 + det_inf != det {
                continue;
            }
            let Some(zero) = self.node(&d0, None)? else {
                continue;
            };
            let Some(inf) = self.node(&di, None)? else {
                continue;
            };
            return Ok(Some(QACertificate::Branch {
                key: key.to_string(),
                crossing: c,
                det,
                det0,
                det_inf,
                zero: Box::new(zero),
                inf: Box::new(inf),
            }));
        }
        Ok(None)
    }
}

pub fn certify(d: &LinkDiagram, budget: usize) -> QAResult {
    Certifier::new(budget).certify(d)
}

pub fn certify_at(d: &LinkDiagram, c: CrossingId, budget: usize) -> QAResult {
    Certifier::new(budget).certify_at(d, c)
}

/// Pretzel links: arithmetic obstructions first, then the search.
pub fn certify_pretzel(s: &PretzelSpec, budget: usize) -> QAResult {
    match classify_pretzel(s) {
        PretzelLabel::NotQaThm32_2 => QAResult::NotQA(NotQaReason::Theorem32Part2),
        PretzelLabel::NotQaLspace => QAResult::NotQA(NotQaReason::LspaceCriterion),
        PretzelLabel::NotQaDetZero => QAResult::NotQA(NotQaReason::DeterminantZero),
        _ => certify(&pretzel_diagram(s), budget),
    }
}

fn det_of(d: &LinkDiagram) -> Option<u64> {
    goeritz_determinant(d).to_u64()
}

/// Replay a certificate against `d`, recomputing every determinant with the
/// Goeritz engine.
pub fn verify(cert: &QACertificate, d: &LinkDiagram) -> bool {
    match cert {
        QACertificate::Leaf { trace } => {
            let mut cur = d.clone();
            for m in trace {
                let Ok(mv) = m.parse::<Move>() else {
                    return false;
                };
                match cur.apply_move(&mv) {
                    Ok((next, _)) => cur = next,
                    Err(_) => return false,
                }
            }
            is_unknot(&cur) && det_of(d) == Some(1)
        }
        QACertificate::Branch {
            key,
            crossing,
            det,
            det0,
            det_inf,
            zero,
            inf,
        } => {
            let canon = d.simplify().diagram.canonical();
            if &canon.key != key || *crossing >= canon.diagram.crossing_count() {
                return false;
            }
            let dd = &canon.diagram;
            let d0 = dd.smooth(*crossing, Smoothing::Zero);
            let di = dd.smooth(*crossing, Smoothing::Infinity);
            let ok = det_of(dd) == Some(*det)
                && det_of(d) == Some(*det)
                && det_of(&d0) == Some(*det0)
                && det_of(&di) == Some(*det_inf)
                && *det0 >= 1
                && *det_inf >= 1
                && det0 + det_inf == *det;
            ok && verify(zero, &d0) && verify(inf, &di)
        }
    }
}

/// Certificate for `a # b` (the default connected sum) from certificates of
/// the summands: the branch tree of `cert_a` is replayed with `b` attached,
/// and `cert_b` is reused where the `a` side reaches the unknot.
pub fn qa_connected_sum(
    cert_a: &QACertificate,
    a: &LinkDiagram,
    cert_b: &QACertificate,
    b: &LinkDiagram,
) -> Result<QACertificate, QaError> {
    if !verify(cert_a, a) || !verify(cert_b, b) {
        return Err(QaError::InvalidInputCertificate);
    }
    if a.crossing_count() == 0 {
        return Ok(cert_b.clone());
    }
    let sum = a.connected_sum(b);
    if b.crossing_count() == 0 {
        return Ok(cert_a.clone());
    }
    let b_key = b.simplify().diagram.canonical_key();
    let ident: Vec<usize> = (0..a.crossing_count()).collect();
    let mut ctx = SumReplay {
        cert_b,
        b_key,
        fallback: Certifier::new(DEFAULT_NODE_BUDGET),
    };
    if let Some(c) = ctx.replay(cert_a, a, &sum, &ident) {
        if verify(&c, &sum) {
            return Ok(c);
        }
    }
    match Certifier::new(DEFAULT_NODE_BUDGET).certify(&sum) {
        QAResult::Certified(c) => Ok(c),
        // the inputs verified, so this only happens if the search budget is too small
        _ => Err(QaError::InvalidInputCertificate),
    }
}

struct SumReplay<'a> {
    cert_b: &'a QACertificate,
    b_key: String,
    fallback: Certifier,
}

impl SumReplay<'_> {
    /// `a_raw` is the raw diagram at this node of `cert`; `x_raw` is the
    /// corresponding raw diagram of the sum, with `m` mapping crossings of
    /// `a_raw` to crossings of `x_raw`.
    fn replay(
        &mut self,
        cert: &QACertificate,
        a_raw: &LinkDiagram,
        x_raw: &LinkDiagram,
        m: &[usize],
    ) -> Option<QACertificate> {
        let xs = x_raw.simplify();
        let xc = xs.diagram.canonical();
        let QACertificate::Branch {
            crossing,
            det0: a0,
            det_inf: ai,
            zero,
            inf,
            ..
        } = cert
        else {
            if xc.key == self.b_key {
                return Some(self.cert_b.clone());
            }
            return self.fallback.certify(x_raw).certificate().cloned();
        };
        let as_ = a_raw.simplify();
        let ac = as_.diagram.canonical();
        // crossing of the canonical A diagram -> crossing of the canonical sum
        let to_x: Vec<Option<usize>> = {
            let mut v = vec![None; ac.diagram.crossing_count()];
            for (a, &x) in m.iter().enumerate() {
                if let (Some(sa), Some(sx)) = (as_.map[a], xs.map[x]) {
                    v[ac.map[sa]] = Some(xc.map[sx]);
                }
            }
            v
        };
        let cx = to_x[*crossing]?;
        let dx = &xc.diagram;
        let x0 = dx.smooth_with(cx, Smoothing::Zero, &dx.checkerboard());
        let xi = dx.smooth_with(cx, Smoothing::Infinity, &dx.checkerboard());
        let (det, det0, det_inf) = (fast_det(dx), fast_det(&x0.0), fast_det(&xi.0));
        let a0d = ac.diagram.smooth_with(*crossing, Smoothing::Zero, &ac.diagram.checkerboard());
        let aid = ac.diagram.smooth_with(*crossing, Smoothing::Infinity, &ac.diagram.checkerboard());
        let scale = det / (a0 + ai).max(1);
        let mut pairings = vec![];
        if det0 == a0 * scale && det_inf == ai * scale {
            pairings.push(false);
        }
        if det0 == ai * scale && det_inf == a0 * scale {
            pairings.push(true);
        }
        for swapped in pairings {
            let (xa, xb) = if swapped { (&xi, &x0) } else { (&x0, &xi) };
            let child = |ad: &(LinkDiagram, Vec<Option<usize>>), xd: &(LinkDiagram, Vec<Option<usize>>)| {
                let mut mm = vec![0; ad.0.crossing_count()];
                for (old, new) in ad.1.iter().enumerate() {
                    if let Some(n) = new {
                        mm[*n] = xd.1[to_x[old]?]?;
                    }
                }
                Some(mm)
            };
            let (Some(m0), Some(mi)) = (child(&a0d, xa), child(&aid, xb)) else {
                continue;
            };
            let Some(z) = self.replay(zero, &a0d.0, &xa.0, &m0) else {
                continue;
            };
            let Some(i) = self.replay(inf, &aid.0, &xb.0, &mi) else {
                continue;
            };
            let (zc, ic) = if swapped { (i, z) } else { (z, i) };
            return Some(QACertificate::Branch {
                key: xc.key.clone(),
                crossing: cx,
                det,
                det0,
                det_inf,
                zero: Box::new(zc),
                inf: Box::new(ic),
            });
        }
        None
    }
}
