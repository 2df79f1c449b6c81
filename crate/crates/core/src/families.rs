//! Pretzel, torus and Montesinos diagrams built from signed plane graphs, and
//! the arithmetic pretzel classifier.

use crate::diagram::{LinkDiagram, Smoothing};
use crate::error::{DiagramError, FamilyError};
use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use std::fmt;
use std::str::FromStr;

/// An edge end: (edge index, 0 for the first endpoint, 1 for the second).
pub type EdgeEnd = (usize, u8);

/// Connected plane multigraph with signed edges and a counterclockwise
/// rotation at each vertex.
#[derive(Clone, Debug, Default)]
pub struct PlaneGraph {
    edges: Vec<(usize, usize, i8)>,
    rotation: Vec<Vec<EdgeEnd>>,
}

impl PlaneGraph {
    pub fn new(vertices: usize) -> Self {
        PlaneGraph {
            edges: vec![],
            rotation: vec![vec![]; vertices],
        }
    }
    pub fn add_vertex(&mut self) -> usize {
        self.rotation.push(vec![]);
        self.rotation.len() - 1
    }
    pub fn add_edge(&mut self, a: usize, b: usize, sign: i8) -> usize {
        self.edges.push((a, b, sign));
        self.edges.len() - 1
    }
    pub fn set_rotation(&mut self, v: usize, rot: Vec<EdgeEnd>) {
        self.rotation[v] = rot;
    }
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Medial diagram whose default coloring shades the vertices and whose Tait
    /// edge signs are the graph's signs.
    pub fn to_diagram(&self) -> Result<LinkDiagram, DiagramError> {
        let n = self.edges.len();
        if n == 0 {
            return Ok(LinkDiagram::unknot());
        }
        // crossing e: 0 = SW, 1 = SE, 2 = NE, 3 = NW; end 0 sits south
        let left = |(e, end): EdgeEnd| 4 * e + if end == 0 { 0 } else { 2 };
        let right = |(e, end): EdgeEnd| 4 * e + if end == 0 { 1 } else { 3 };
        let mut partner = vec![usize::MAX; 4 * n];
        for (v, rot) in self.rotation.iter().enumerate() {
            for &(e, end) in rot {
                let (a, b, _) = self.edges[e];
                if (if end == 0 { a } else { b }) != v {
                    return Err(DiagramError::MalformedSyntax(format!(
                        "rotation at {v} lists an end of edge {e} not at {v}"
                    )));
                }
            }
            for i in 0..rot.len() {
                let (x, y) = (left(rot[i]), right(rot[(i + 1) % rot.len()]));
                partner[x] = y;
                partner[y] = x;
            }
        }
        if partner.contains(&usize::MAX) {
            return Err(DiagramError::MalformedSyntax(
                "rotation system misses an edge end".into(),
            ));
        }
        let under = self.edges.iter().map(|e| e.2 < 0).collect();
        let d = LinkDiagram::from_partners(&partner, under, 0, None);
        if d.piece_count() != 1 {
            return Err(DiagramError::DisconnectedDiagram);
        }
        let faces = d.faces().len();
        if faces != n + 2 {
            return Err(DiagramError::NotPlanar {
                faces,
                expected: n + 2,
            });
        }
        Ok(d)
    }
}

/// Two-terminal series-parallel network of signed edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Network {
    Edge(i8),
    Series(Vec<Network>),
    Parallel(Vec<Network>),
}

impl Network {
    /// Network of all-`sign` edges with conductance p/q (p, q > 0).
    pub fn from_fraction(p: u64, q: u64, sign: i8) -> Network {
        assert!(p > 0 && q > 0);
        if p >= q {
            let mut parts: Vec<Network> = (0..p / q).map(|_| Network::Edge(sign)).collect();
            if !p.is_multiple_of(q) {
                parts.push(Network::from_fraction(p % q, q, sign));
            }
            flatten(Network::Parallel(parts))
        } else {
            let mut parts: Vec<Network> = (0..q / p).map(|_| Network::Edge(sign)).collect();
            if !q.is_multiple_of(p) {
                parts.push(Network::from_fraction(p, q % p, sign));
            }
            flatten(Network::Series(parts))
        }
    }

    pub fn edge_count(&self) -> usize {
        match self {
            Network::Edge(_) => 1,
            Network::Series(v) | Network::Parallel(v) => v.iter().map(|c| c.edge_count()).sum(),
        }
    }

    /// Embed between `top` and `bottom`; returns edge ends at each terminal
    /// ordered left to right.
    fn embed(&self, g: &mut PlaneGraph, top: usize, bottom: usize) -> (Vec<EdgeEnd>, Vec<EdgeEnd>) {
        match self {
            Network::Edge(s) => {
                let e = g.add_edge(top, bottom, *s);
                (vec![(e, 0)], vec![(e, 1)])
            }
            Network::Parallel(children) => {
                let (mut t, mut b) = (vec![], vec![]);
                for c in children {
                    let (ct, cb) = c.embed(g, top, bottom);
                    t.extend(ct);
                    b.extend(cb);
                }
                (t, b)
            }
            Network::Series(children) => {
                let r = children.len();
                let mut verts = vec![top];
                for _ in 1..r {
                    verts.push(g.add_vertex());
                }
                verts.push(bottom);
                let mut ends = vec![];
                for (i, c) in children.iter().enumerate() {
                    ends.push(c.embed(g, verts[i], verts[i + 1]));
                }
                for i in 1..r {
                    // down-going edges west to east, then up-going east to west
                    let mut rot = ends[i].0.clone();
                    rot.extend(ends[i - 1].1.iter().rev());
                    g.set_rotation(verts[i], rot);
                }
                (ends[0].0.clone(), ends[r - 1].1.clone())
            }
        }
    }

    /// Plane graph with terminals 0 (top) and 1 (bottom).
    pub fn to_plane_graph(&self) -> PlaneGraph {
        let mut g = PlaneGraph::new(2);
        let (t, b) = self.embed(&mut g, 0, 1);
        g.set_rotation(0, t);
        g.set_rotation(1, b.into_iter().rev().collect());
        g
    }

    pub fn to_diagram(&self) -> LinkDiagram {
        self.to_plane_graph()
            .to_diagram()
            .expect("series-parallel embeddings are planar")
    }
}

fn flatten(n: Network) -> Network {
    match n {
        Network::Series(mut v) | Network::Parallel(mut v) if v.len() == 1 => flatten(v.remove(0)),
        other => other,
    }
}

/// P(a_1, ..., a_k): entries are signed twist counts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PretzelSpec {
    strands: Vec<i64>,
}

impl PretzelSpec {
    pub fn new(strands: Vec<i64>) -> Result<Self, FamilyError> {
        if strands.is_empty() {
            return Err(FamilyError::Malformed("no strands".into()));
        }
        if strands.contains(&0) {
            return Err(FamilyError::Malformed("entries must be nonzero".into()));
        }
        Ok(PretzelSpec { strands })
    }
    pub fn strands(&self) -> &[i64] {
        &self.strands
    }
    pub fn crossing_count(&self) -> usize {
        self.strands.iter().map(|a| a.unsigned_abs() as usize).sum()
    }
    pub fn negated(&self) -> Self {
        PretzelSpec {
            strands: self.strands.iter().map(|a| -a).collect(),
        }
    }
    fn network(&self) -> Network {
        Network::Parallel(
            self.strands
                .iter()
                .map(|&a| {
                    let s = if a > 0 { 1 } else { -1 };
                    Network::Series((0..a.abs()).map(|_| Network::Edge(s)).collect())
                })
                .collect(),
        )
    }
}

impl FromStr for PretzelSpec {
    type Err = FamilyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s
            .trim()
            .strip_prefix("P(")
            .and_then(|r| r.strip_suffix(')'))
            .unwrap_or(s.trim());
        let v = inner
            .split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| FamilyError::Malformed(s.to_string()))?;
        PretzelSpec::new(v)
    }
}

impl fmt::Display for PretzelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.strands.iter().map(|a| a.to_string()).collect();
        write!(f, "P({})", parts.join(","))
    }
}

/// Standard pretzel diagram: column i is a vertical twist of |a_i| crossings.
/// Crossings are numbered column by column.
pub fn pretzel_diagram(s: &PretzelSpec) -> LinkDiagram {
    s.network().to_diagram()
}

/// |sum_i sign(a_i) prod_{j != i} |a_j||
pub fn pretzel_determinant(s: &PretzelSpec) -> BigUint {
    let mut acc = BigInt::zero();
    for (i, &a) in s.strands.iter().enumerate() {
        let mut term = BigInt::from(a.signum());
        for (j, &b) in s.strands.iter().enumerate() {
            if i != j {
                term *= BigInt::from(b.abs());
            }
        }
        acc += term;
    }
    acc.abs().to_biguint().unwrap()
}

/// Standard diagram of the (2, k) torus link.
pub fn torus2(k: i64) -> LinkDiagram {
    assert!(k != 0, "torus2 needs k != 0");
    let s = if k > 0 { 1 } else { -1 };
    Network::Parallel((0..k.abs()).map(|_| Network::Edge(s)).collect()).to_diagram()
}

/// Montesinos link from signed tangle fractions p/q (the tangles' Tait
/// conductances), combined in parallel.
pub fn montesinos_diagram(fractions: &[(i64, u64)]) -> LinkDiagram {
    Network::Parallel(
        fractions
            .iter()
            .map(|&(p, q)| Network::from_fraction(p.unsigned_abs(), q, if p > 0 { 1 } else { -1 }))
            .collect(),
    )
    .to_diagram()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PretzelLabel {
    Alternating,
    QaThm32_1,
    NotQaThm32_2,
    NotQaLspace,
    NotQaDetZero,
    Open,
}

impl PretzelLabel {
    pub fn is_not_qa(self) -> bool {
        matches!(
            self,
            PretzelLabel::NotQaThm32_2 | PretzelLabel::NotQaLspace | PretzelLabel::NotQaDetZero
        )
    }
    /// Human-readable form used by the CLI.
    pub fn describe(self) -> &'static str {
        match self {
            PretzelLabel::Alternating => "Alternating",
            PretzelLabel::QaThm32_1 => "QA (Theorem 3.2(1))",
            PretzelLabel::NotQaThm32_2 => "NotQA (Theorem 3.2(2))",
            PretzelLabel::NotQaLspace => "NotQA (L-space criterion)",
            PretzelLabel::NotQaDetZero => "NotQA (determinant zero)",
            PretzelLabel::Open => "Open",
        }
    }
}

impl fmt::Display for PretzelLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PretzelLabel::Alternating => "Alternating",
            PretzelLabel::QaThm32_1 => "QA-Thm3.2(1)",
            PretzelLabel::NotQaThm32_2 => "NotQA-Thm3.2(2)",
            PretzelLabel::NotQaLspace => "NotQA-Lspace",
            PretzelLabel::NotQaDetZero => "NotQA-DetZero",
            PretzelLabel::Open => "Open",
        })
    }
}

/// Arithmetic classification; depends only on the multisets of positive and
/// negative entries, so it is invariant under permutation and reflection.
pub fn classify_pretzel(s: &PretzelSpec) -> PretzelLabel {
    let pos: Vec<i64> = s.strands.iter().filter(|&&a| a > 0).copied().collect();
    let neg: Vec<i64> = s.strands.iter().filter(|&&a| a < 0).map(|a| -a).collect();
    if pos.is_empty() || neg.is_empty() {
        return PretzelLabel::Alternating;
    }
    if pos.len() >= 2 && neg.len() >= 2 && s.strands.iter().all(|a| a.abs() >= 2) {
        return PretzelLabel::NotQaThm32_2;
    }
    let one_beats_min = |single: &[i64], many: &[i64]| {
        single.len() == 1 && single[0] > *many.iter().min().unwrap()
    };
    if one_beats_min(&neg, &pos) || one_beats_min(&pos, &neg) {
        return PretzelLabel::QaThm32_1;
    }
    let lspace_fails = |single: &[i64], pair: &[i64]| {
        if single.len() != 1 || pair.len() != 2 {
            return false;
        }
        let q = single[0];
        let (lo, hi) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
        if lo < 2 || q < 2 {
            return false;
        }
        let cond1 = q >= lo;
        let cond2 = q == lo - 1 && hi <= 2 * q + 1;
        !cond1 && !cond2
    };
    if lspace_fails(&neg, &pos) || lspace_fails(&pos, &neg) {
        return PretzelLabel::NotQaLspace;
    }
    if pretzel_determinant(s).is_zero() {
        return PretzelLabel::NotQaDetZero;
    }
    PretzelLabel::Open
}

fn check_theorem31_spec(s: &PretzelSpec) -> Result<(usize, i64), FamilyError> {
    let a = &s.strands;
    let k = a.len();
    if k < 2 || a[k - 2] != 1 || a[k - 1] >= 0 || a[..k - 2].iter().any(|&p| p <= 0) {
        return Err(FamilyError::Precondition(format!(
            "expected (p1,...,pn,1,-q), got {s}"
        )));
    }
    Ok((k - 2, a[k - 1]))
}

/// Zero smoothing of the single crossing in the (n+1)-th column of
/// P(p_1, ..., p_n, 1, -q).
pub fn theorem31_connected_sum_smoothing(s: &PretzelSpec) -> Result<LinkDiagram, FamilyError> {
    let (n, _) = check_theorem31_spec(s)?;
    let c: usize = s.strands[..n].iter().map(|&p| p as usize).sum();
    Ok(pretzel_diagram(s).smooth(c, Smoothing::Zero))
}

/// The connected sum T(2,p_1) # ... # T(2,p_n) # T(2,-q) laid out as cycles
/// around one vertex, nested the way the smoothing above leaves them.
pub fn torus_sum_bouquet(s: &PretzelSpec) -> Result<LinkDiagram, FamilyError> {
    let (n, q) = check_theorem31_spec(s)?;
    let mut g = PlaneGraph::new(1);
    let cycle = |g: &mut PlaneGraph, len: i64| -> (EdgeEnd, EdgeEnd) {
        let sign = if len > 0 { 1 } else { -1 };
        let len = len.unsigned_abs() as usize;
        let mut prev = 0;
        let mut first = None;
        let mut last_in: Option<EdgeEnd> = None;
        for i in 0..len {
            let next = if i + 1 == len { 0 } else { g.add_vertex() };
            let e = g.add_edge(prev, next, sign);
            if let Some(li) = last_in {
                g.set_rotation(prev, vec![(e, 0), li]);
            } else {
                first = Some((e, 0));
            }
            last_in = Some((e, 1));
            prev = next;
        }
        (first.unwrap(), last_in.unwrap())
    };
    let mut starts = vec![];
    let mut ends = vec![];
    for &p in &s.strands[..n] {
        let (a, b) = cycle(&mut g, p);
        starts.push(a);
        ends.push(b);
    }
    let (qa, qb) = cycle(&mut g, q);
    let mut rot = starts;
    rot.extend(ends.into_iter().rev());
    rot.push(qb);
    rot.push(qa);
    g.set_rotation(0, rot);
    Ok(g.to_diagram()?)
}
