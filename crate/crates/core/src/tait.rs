//! Checkerboard colorings, signed Tait graphs and determinant engines.

use crate::diagram::{a_corner_parity, LinkDiagram};
use crate::error::TaitError;
use crate::linalg;
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::{BTreeMap, HashMap};

pub use crate::diagram::{Coloring, CrossingId};

pub const DEFAULT_TREE_BUDGET: u64 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaitEdge {
    pub ends: (usize, usize),
    /// +1 or -1.
    pub sign: i8,
    pub crossing: CrossingId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaitGraph {
    pub vertex_count: usize,
    pub edges: Vec<TaitEdge>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpanningTreeProfile {
    /// v -> number of spanning trees with exactly v positive edges.
    pub counts: BTreeMap<usize, BigUint>,
}

impl SpanningTreeProfile {
    pub fn total(&self) -> BigUint {
        self.counts.values().sum()
    }
    pub fn get(&self, v: usize) -> BigUint {
        self.counts.get(&v).cloned().unwrap_or_default()
    }
    /// |sum_v (-1)^v s_v|
    pub fn determinant(&self) -> BigUint {
        let mut acc = BigInt::zero();
        for (&v, s) in &self.counts {
            let s = BigInt::from(s.clone());
            if v % 2 == 0 {
                acc += s;
            } else {
                acc -= s;
            }
        }
        acc.abs().to_biguint().unwrap()
    }
    /// Shift every v by `k` (positive only).
    pub fn shifted(&self, k: usize) -> SpanningTreeProfile {
        SpanningTreeProfile {
            counts: self.counts.iter().map(|(v, s)| (v + k, s.clone())).collect(),
        }
    }
}

/// Face index of each corner.
fn corner_faces(d: &LinkDiagram) -> (Vec<usize>, usize) {
    let faces = d.faces();
    let mut of = vec![0; 4 * d.crossing_count()];
    for (i, f) in faces.iter().enumerate() {
        for &c in f {
            of[c] = i;
        }
    }
    (of, faces.len())
}

/// Graph on the faces of one color: `shaded` picks which. Edge sign is +1 when
/// the chosen corners are the A-corners of the crossing.
fn face_graph(d: &LinkDiagram, col: &Coloring, shaded: bool) -> TaitGraph {
    if d.crossing_count() == 0 {
        let v = if shaded { d.free_loops() } else { d.free_loops().min(1) };
        return TaitGraph {
            vertex_count: v,
            edges: vec![],
        };
    }
    let (of, nf) = corner_faces(d);
    let faces = d.faces();
    let mut vid = vec![usize::MAX; nf];
    let mut count = 0;
    for (i, f) in faces.iter().enumerate() {
        let c = f[0];
        if col.is_shaded(c / 4, c % 4) == shaded {
            vid[i] = count;
            count += 1;
        }
    }
    let edges = d
        .crossings()
        .iter()
        .enumerate()
        .map(|(x, c)| {
            let s = if shaded {
                col.shaded_parity(x)
            } else {
                1 - col.shaded_parity(x)
            };
            let (a, b) = (vid[of[4 * x + s]], vid[of[4 * x + s + 2]]);
            TaitEdge {
                ends: (a, b),
                sign: if s == a_corner_parity(c.under_even) { 1 } else { -1 },
                crossing: x,
            }
        })
        .collect();
    // free loops beside crossings give isolated vertices (split link)
    TaitGraph {
        vertex_count: count + d.free_loops(),
        edges,
    }
}

/// The default checkerboard coloring.
pub fn checkerboard(d: &LinkDiagram) -> Coloring {
    d.checkerboard()
}

pub fn tait_graph(d: &LinkDiagram, col: &Coloring) -> TaitGraph {
    face_graph(d, col, true)
}

impl TaitGraph {
    pub fn is_connected(&self) -> bool {
        if self.vertex_count == 0 {
            return false;
        }
        let mut uf: Vec<usize> = (0..self.vertex_count).collect();
        let mut comps = self.vertex_count;
        for e in &self.edges {
            let (a, b) = (root(&mut uf, e.ends.0), root(&mut uf, e.ends.1));
            if a != b {
                uf[a] = b;
                comps -= 1;
            }
        }
        comps == 1
    }

    pub fn positive_edges(&self) -> usize {
        self.edges.iter().filter(|e| e.sign > 0).count()
    }

    pub fn all_signs_equal(&self) -> bool {
        self.edges.windows(2).all(|w| w[0].sign == w[1].sign)
    }

    /// Reduced Laplacian; `signed` weights edges by their sign.
    fn reduced_laplacian(&self, signed: bool) -> Vec<Vec<i64>> {
        let n = self.vertex_count;
        let mut m = vec![vec![0i64; n]; n];
        for e in &self.edges {
            let (a, b) = e.ends;
            if a == b {
                continue;
            }
            let w = if signed { e.sign as i64 } else { 1 };
            m[a][a] += w;
            m[b][b] += w;
            m[a][b] -= w;
            m[b][a] -= w;
        }
        m.into_iter()
            .skip(1)
            .map(|r| r.into_iter().skip(1).collect())
            .collect()
    }

    /// Matrix-Tree count of spanning trees.
    pub fn kirchhoff_count(&self) -> BigUint {
        if self.vertex_count == 0 {
            return BigUint::zero();
        }
        linalg::determinant(&self.reduced_laplacian(false))
            .abs()
            .to_biguint()
            .unwrap()
    }

    /// |det| of the signed reduced Laplacian.
    pub fn signed_kirchhoff(&self) -> BigUint {
        if self.vertex_count == 0 {
            return BigUint::zero();
        }
        linalg::determinant(&self.reduced_laplacian(true))
            .abs()
            .to_biguint()
            .unwrap()
    }
}

fn root(uf: &mut [usize], mut x: usize) -> usize {
    while uf[x] != x {
        uf[x] = uf[uf[x]];
        x = uf[x];
    }
    x
}

/// Dense polynomial in x with natural-number coefficients.
type Poly = Vec<BigUint>;

fn padd(a: &Poly, b: &Poly) -> Poly {
    let mut r = vec![BigUint::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        r[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        r[i] += c;
    }
    r
}

fn pmul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut r = vec![BigUint::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            r[i + j] += x * y;
        }
    }
    r
}

/// Multigraph with polynomial edge weights, parallel edges merged.
#[derive(Clone)]
struct WGraph {
    n: usize,
    edges: BTreeMap<(usize, usize), Poly>,
}

impl WGraph {
    fn add(&mut self, a: usize, b: usize, w: Poly) {
        if a == b {
            return;
        }
        let k = (a.min(b), a.max(b));
        let e = self.edges.entry(k).or_default();
        *e = padd(e, &w);
    }

    /// Remove vertex v and renumber (v's edges must already be gone).
    fn without_vertex(&self, v: usize) -> WGraph {
        let f = |x: usize| if x > v { x - 1 } else { x };
        let mut g = WGraph {
            n: self.n - 1,
            edges: BTreeMap::new(),
        };
        for (&(a, b), w) in &self.edges {
            if a != v && b != v {
                g.add(f(a), f(b), w.clone());
            }
        }
        g
    }

    /// Identify b into a (edge between them dropped).
    fn contract(&self, a: usize, b: usize) -> WGraph {
        let mut h = WGraph {
            n: self.n,
            edges: BTreeMap::new(),
        };
        for (&(x, y), w) in &self.edges {
            let x = if x == b { a } else { x };
            let y = if y == b { a } else { y };
            h.add(x, y, w.clone());
        }
        h.without_vertex(b)
    }

    fn key(&self) -> Vec<u8> {
        let mut k = Vec::new();
        k.extend_from_slice(&(self.n as u32).to_le_bytes());
        for (&(a, b), w) in &self.edges {
            k.extend_from_slice(&(a as u32).to_le_bytes());
            k.extend_from_slice(&(b as u32).to_le_bytes());
            for c in w {
                let bytes = c.to_bytes_le();
                k.push(bytes.len() as u8);
                k.extend(bytes);
            }
            k.push(255);
        }
        k
    }
}

/// Spanning-tree generating polynomial by deletion/contraction.
fn tree_poly(g: WGraph, memo: &mut HashMap<Vec<u8>, Poly>) -> Poly {
    if g.n <= 1 {
        return vec![BigUint::one()];
    }
    let mut deg = vec![0usize; g.n];
    for &(a, b) in g.edges.keys() {
        deg[a] += 1;
        deg[b] += 1;
    }
    if deg.contains(&0) {
        return vec![];
    }
    // pendant vertex: its edge is in every tree
    if let Some(v) = (0..g.n).find(|&v| deg[v] == 1) {
        let (&(a, b), w) = g.edges.iter().find(|(&(a, b), _)| a == v || b == v).unwrap();
        let w = w.clone();
        let other = if a == v { b } else { a };
        let _ = other;
        return pmul(&w, &tree_poly(g.without_vertex(v), memo));
    }
    let key = g.key();
    if let Some(r) = memo.get(&key) {
        return r.clone();
    }
    // branch on an edge at a minimum-degree vertex
    let v = (0..g.n).min_by_key(|&v| deg[v]).unwrap();
    let (&(a, b), w) = g.edges.iter().find(|(&(a, b), _)| a == v || b == v).unwrap();
    let w = w.clone();
    let mut deleted = g.clone();
    deleted.edges.remove(&(a, b));
    let r = padd(
        &tree_poly(deleted, memo),
        &pmul(&w, &tree_poly(g.contract(a, b), memo)),
    );
    memo.insert(key, r.clone());
    r
}

/// Exact spanning-tree profile. Disconnected graphs give the empty profile.
pub fn spanning_tree_profile(g: &TaitGraph) -> Result<SpanningTreeProfile, TaitError> {
    spanning_tree_profile_with_budget(g, DEFAULT_TREE_BUDGET)
}

pub fn spanning_tree_profile_with_budget(
    g: &TaitGraph,
    budget: u64,
) -> Result<SpanningTreeProfile, TaitError> {
    if !g.is_connected() {
        return Ok(SpanningTreeProfile::default());
    }
    let total = g.kirchhoff_count();
    if total > BigUint::from(budget) {
        return Err(TaitError::TooManyTrees {
            count: total.to_string(),
            budget,
        });
    }
    let mut wg = WGraph {
        n: g.vertex_count,
        edges: BTreeMap::new(),
    };
    for e in &g.edges {
        let w = if e.sign > 0 {
            vec![BigUint::zero(), BigUint::one()]
        } else {
            vec![BigUint::one()]
        };
        wg.add(e.ends.0, e.ends.1, w);
    }
    let poly = tree_poly(wg, &mut HashMap::new());
    let counts = poly
        .into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .collect();
    Ok(SpanningTreeProfile { counts })
}

/// Determinant from a spanning-tree profile.
pub fn determinant_tree(p: &SpanningTreeProfile) -> BigUint {
    p.determinant()
}

/// Profile of the default Tait graph of `d`.
pub fn diagram_profile(d: &LinkDiagram) -> Result<SpanningTreeProfile, TaitError> {
    spanning_tree_profile(&tait_graph(d, &d.checkerboard()))
}

/// Goeritz matrix determinant of the unshaded regions.
pub fn goeritz_determinant(d: &LinkDiagram) -> BigUint {
    if d.is_split() {
        return BigUint::zero();
    }
    if d.crossing_count() == 0 {
        return BigUint::one();
    }
    face_graph(d, &d.checkerboard(), false).signed_kirchhoff()
}

/// Signed Kirchhoff determinant of the shaded Tait graph (fast path).
pub fn tait_determinant(d: &LinkDiagram) -> BigUint {
    if d.is_split() {
        return BigUint::zero();
    }
    if d.crossing_count() == 0 {
        return BigUint::one();
    }
    tait_graph(d, &d.checkerboard()).signed_kirchhoff()
}

/// Convenience: determinant as u64 (panics only on absurdly large values).
pub fn det_u64(d: &LinkDiagram) -> u64 {
    tait_determinant(d).to_u64().expect("determinant fits in u64")
}
