//! Planar link diagrams stored as PD codes.
//!
//! A diagram is a list of crossings, each a counterclockwise 4-tuple of arc
//! labels. Half-edge `4x + p` is position `p` of crossing `x`; the corner
//! `4x + k` is the wedge between positions `k` and `k + 1`. Faces, strands and
//! checkerboard colorings are all recovered from this rotation system.

use crate::error::DiagramError;
use regex::Regex;
use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

pub type CrossingId = usize;

/// Which smoothing of a crossing. `Zero` merges the two shaded corners of the
/// checkerboard coloring (contracts the Tait edge), `Infinity` merges the
/// unshaded ones (deletes it).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Smoothing {
    Zero,
    Infinity,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Crossing {
    /// Arc labels, counterclockwise.
    pub arcs: [usize; 4],
    /// True when the under-strand occupies positions 0 and 2.
    pub under_even: bool,
}

impl Crossing {
    pub fn is_under(&self, pos: usize) -> bool {
        pos.is_multiple_of(2) == self.under_even
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinkDiagram {
    crossings: Vec<Crossing>,
    free_loops: usize,
    marked: Option<CrossingId>,
}

/// Checkerboard coloring, stored per crossing as "is corner 0 shaded".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    base: Vec<bool>,
}

impl Coloring {
    pub fn from_corner0(base: Vec<bool>) -> Self {
        Coloring { base }
    }
    pub fn is_shaded(&self, x: CrossingId, corner: usize) -> bool {
        self.base[x] ^ (corner % 2 == 1)
    }
    /// Parity (0 or 1) of the shaded corners at `x`.
    pub fn shaded_parity(&self, x: CrossingId) -> usize {
        if self.base[x] {
            0
        } else {
            1
        }
    }
    pub fn dual(&self) -> Coloring {
        Coloring {
            base: self.base.iter().map(|b| !b).collect(),
        }
    }
    pub fn corner0(&self) -> &[bool] {
        &self.base
    }
    /// Indices (into `d.faces()`) of the shaded faces.
    pub fn shaded_faces(&self, d: &LinkDiagram) -> Vec<usize> {
        if d.crossings.is_empty() {
            return if d.free_loops > 0 { vec![0] } else { vec![] };
        }
        d.faces()
            .iter()
            .enumerate()
            .filter(|(_, f)| self.is_shaded(f[0] / 4, f[0] % 4))
            .map(|(i, _)| i)
            .collect()
    }
    /// Restrict along an old-to-new crossing map (used after smoothing).
    pub fn induced(&self, map: &[Option<usize>], new_len: usize) -> Coloring {
        let mut base = vec![true; new_len];
        for (old, m) in map.iter().enumerate() {
            if let Some(n) = m {
                base[*n] = self.base[old];
            }
        }
        Coloring { base }
    }
}

/// A Reidemeister move. `simplify` only uses R1 and R2; an R3 is named by
/// the triangle corner `4 * crossing + corner`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    R1 { crossing: CrossingId },
    R2 { first: CrossingId, second: CrossingId },
    R3 { crossing: CrossingId, corner: usize },
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::R1 { crossing } => write!(f, "R1:{crossing}"),
            Move::R2 { first, second } => write!(f, "R2:{first},{second}"),
            Move::R3 { crossing, corner } => write!(f, "R3:{crossing}.{corner}"),
        }
    }
}

impl FromStr for Move {
    type Err = DiagramError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DiagramError::InvalidMove(s.to_string());
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        if kind == "R3" {
            let (c, k) = rest.split_once('.').ok_or_else(bad)?;
            let crossing = c.trim().parse().map_err(|_| bad())?;
            let corner: usize = k.trim().parse().map_err(|_| bad())?;
            if corner > 3 {
                return Err(bad());
            }
            return Ok(Move::R3 { crossing, corner });
        }
        let nums: Vec<usize> = rest
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad())?;
        match (kind, nums.as_slice()) {
            ("R1", [c]) => Ok(Move::R1 { crossing: *c }),
            ("R2", [a, b]) => Ok(Move::R2 {
                first: *a,
                second: *b,
            }),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Simplified {
    pub diagram: LinkDiagram,
    pub trace: Vec<Move>,
    /// Old crossing index to new crossing index, `None` if removed.
    pub map: Vec<Option<usize>>,
}

#[derive(Clone, Debug)]
pub struct Canonical {
    pub diagram: LinkDiagram,
    /// Old crossing index to canonical index.
    pub map: Vec<usize>,
    pub key: String,
}

const STRAIGHT: [usize; 4] = [2, 3, 0, 1];

/// Pairing that merges corners `m` and `m + 2`.
pub(crate) fn merge_pairing(m: usize) -> [usize; 4] {
    let (a, b, c, d) = ((m + 1) % 4, (m + 2) % 4, (m + 3) % 4, m % 4);
    let mut arr = [0; 4];
    arr[a] = b;
    arr[b] = a;
    arr[c] = d;
    arr[d] = c;
    arr
}

/// Corners swept by the A-smoothing have this parity.
pub(crate) fn a_corner_parity(under_even: bool) -> usize {
    if under_even {
        1
    } else {
        0
    }
}

fn find(uf: &mut [usize], mut x: usize) -> usize {
    while uf[x] != x {
        uf[x] = uf[uf[x]];
        x = uf[x];
    }
    x
}

fn pd_term_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"X\[\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\]").unwrap()
    })
}

/// Parse a PD code. Accepts whitespace-separated `X[a,b,c,d]` terms
/// (optionally wrapped in `PD[...]`) or a nested list `[[a,b,c,d],...]`.
/// `#` starts a line comment.
pub fn parse_pd(text: &str) -> Result<LinkDiagram, DiagramError> {
    let body: String = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .collect::<Vec<_>>()
        .join("\n");
    let trimmed = body.trim();
    let mut tuples: Vec<[u64; 4]> = Vec::new();
    if trimmed.starts_with('[') {
        tuples = serde_json::from_str(trimmed)
            .map_err(|e| DiagramError::MalformedSyntax(e.to_string()))?;
    } else if !trimmed.is_empty() {
        let re = pd_term_regex();
        for cap in re.captures_iter(trimmed) {
            let mut t = [0u64; 4];
            for (i, slot) in t.iter_mut().enumerate() {
                *slot = cap[i + 1]
                    .parse()
                    .map_err(|_| DiagramError::MalformedSyntax(cap[0].to_string()))?;
            }
            tuples.push(t);
        }
        let mut rest = re.replace_all(trimmed, " ").into_owned();
        if let Some(inner) = rest.trim().strip_prefix("PD[") {
            rest = inner.trim_end().strip_suffix(']').unwrap_or("?").to_string();
        }
        if let Some(junk) = rest
            .split(|c: char| c.is_whitespace() || c == ',')
            .find(|t| !t.is_empty())
        {
            return Err(DiagramError::MalformedSyntax(format!(
                "unexpected text {junk:?}"
            )));
        }
    }
    if tuples.iter().flatten().any(|&a| a == 0) {
        return Err(DiagramError::MalformedSyntax(
            "arc labels must be positive".into(),
        ));
    }
    from_tuples(&tuples, vec![true; tuples.len()])
}

/// Build and validate a diagram from raw arc tuples.
fn from_tuples(tuples: &[[u64; 4]], under_even: Vec<bool>) -> Result<LinkDiagram, DiagramError> {
    if tuples.is_empty() {
        return Ok(LinkDiagram::unknot());
    }
    let mut uses: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (x, t) in tuples.iter().enumerate() {
        for (p, &a) in t.iter().enumerate() {
            uses.entry(a).or_default().push(4 * x + p);
        }
    }
    if let Some((&a, _)) = uses.iter().find(|(_, v)| v.len() != 2) {
        return Err(DiagramError::ArcUsedNotTwice(a));
    }
    let mut partner = vec![0; 4 * tuples.len()];
    for v in uses.values() {
        partner[v[0]] = v[1];
        partner[v[1]] = v[0];
    }
    let d = LinkDiagram::from_partners(&partner, under_even, 0, None);
    if d.piece_count() > 1 {
        return Err(DiagramError::DisconnectedDiagram);
    }
    let faces = d.faces().len();
    if faces != d.crossings.len() + 2 {
        return Err(DiagramError::NotPlanar {
            faces,
            expected: d.crossings.len() + 2,
        });
    }
    Ok(d)
}

impl LinkDiagram {
    /// The crossingless unknot.
    pub fn unknot() -> Self {
        LinkDiagram {
            crossings: Vec::new(),
            free_loops: 1,
            marked: None,
        }
    }

    /// Validated construction from explicit crossings (labels need not be normalized).
    pub fn from_crossings(crossings: Vec<Crossing>) -> Result<Self, DiagramError> {
        let tuples: Vec<[u64; 4]> = crossings
            .iter()
            .map(|c| c.arcs.map(|a| a as u64))
            .collect();
        from_tuples(&tuples, crossings.iter().map(|c| c.under_even).collect())
    }

    /// Unvalidated construction from a half-edge involution. Arc labels are
    /// assigned by first appearance.
    pub(crate) fn from_partners(
        partner: &[usize],
        under_even: Vec<bool>,
        free_loops: usize,
        marked: Option<CrossingId>,
    ) -> Self {
        let n = under_even.len();
        debug_assert_eq!(partner.len(), 4 * n);
        let mut label = vec![0usize; 4 * n];
        let mut next = 1;
        for h in 0..4 * n {
            if label[h] == 0 {
                label[h] = next;
                label[partner[h]] = next;
                next += 1;
            }
        }
        let crossings = (0..n)
            .map(|x| Crossing {
                arcs: [label[4 * x], label[4 * x + 1], label[4 * x + 2], label[4 * x + 3]],
                under_even: under_even[x],
            })
            .collect();
        LinkDiagram {
            crossings,
            free_loops,
            marked,
        }
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }
    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }
    pub fn free_loops(&self) -> usize {
        self.free_loops
    }
    pub fn marked(&self) -> Option<CrossingId> {
        self.marked
    }
    pub fn with_marked(mut self, c: Option<CrossingId>) -> Self {
        self.marked = c;
        self
    }
    pub fn arc_count(&self) -> usize {
        2 * self.crossings.len() + self.free_loops
    }
    pub(crate) fn under_flags(&self) -> Vec<bool> {
        self.crossings.iter().map(|c| c.under_even).collect()
    }

    pub fn check_crossing(&self, c: CrossingId) -> Result<(), DiagramError> {
        if c < self.crossings.len() {
            Ok(())
        } else {
            Err(DiagramError::NoSuchCrossing(c))
        }
    }

    /// Half-edge involution: `partner[h]` is the other end of h's arc.
    pub(crate) fn partners(&self) -> Vec<usize> {
        let n = self.crossings.len();
        let mut first = vec![usize::MAX; 2 * n + 1];
        let mut partner = vec![0; 4 * n];
        for x in 0..n {
            for p in 0..4 {
                let h = 4 * x + p;
                let a = self.crossings[x].arcs[p];
                if first[a] == usize::MAX {
                    first[a] = h;
                } else {
                    partner[h] = first[a];
                    partner[first[a]] = h;
                }
            }
        }
        partner
    }

    /// Connected pieces of the crossing graph, as a piece id per crossing.
    pub(crate) fn piece_ids(&self) -> (Vec<usize>, usize) {
        let n = self.crossings.len();
        let partner = self.partners();
        let mut uf: Vec<usize> = (0..n).collect();
        for h in 0..4 * n {
            let (a, b) = (find(&mut uf, h / 4), find(&mut uf, partner[h] / 4));
            if a != b {
                uf[a.max(b)] = a.min(b);
            }
        }
        let mut id = vec![usize::MAX; n];
        let mut roots: BTreeMap<usize, usize> = BTreeMap::new();
        for x in 0..n {
            let r = find(&mut uf, x);
            let k = roots.len();
            id[x] = *roots.entry(r).or_insert(k);
        }
        (id, roots.len())
    }

    pub fn piece_count(&self) -> usize {
        self.piece_ids().1
    }

    /// True for split diagrams (more than one piece, or free loops beside crossings).
    pub fn is_split(&self) -> bool {
        self.piece_count() + self.free_loops > 1
    }

    /// Faces as lists of corner ids `4x + k`. A crossingless diagram reports none.
    pub fn faces(&self) -> Vec<Vec<usize>> {
        let n = self.crossings.len();
        let partner = self.partners();
        let mut seen = vec![false; 4 * n];
        let mut faces = Vec::new();
        for c in 0..4 * n {
            if seen[c] {
                continue;
            }
            let mut face = Vec::new();
            let mut k = c;
            while !seen[k] {
                seen[k] = true;
                face.push(k);
                k = partner[4 * (k / 4) + (k % 4 + 1) % 4];
            }
            faces.push(face);
        }
        faces
    }

    /// Number of link components.
    pub fn component_count(&self) -> usize {
        self.strand_orbits().len() / 2 + self.free_loops
    }

    /// Orbits of "follow the arc, go straight through".
    fn strand_orbits(&self) -> Vec<Vec<usize>> {
        let n = self.crossings.len();
        let partner = self.partners();
        let mut seen = vec![false; 4 * n];
        let mut out = Vec::new();
        for h in 0..4 * n {
            if seen[h] {
                continue;
            }
            let mut orbit = Vec::new();
            let mut k = h;
            while !seen[k] {
                seen[k] = true;
                orbit.push(k);
                let p = partner[k];
                k = 4 * (p / 4) + (p % 4 + 2) % 4;
            }
            out.push(orbit);
        }
        out
    }

    /// Deterministic orientation: `outgoing[h]` is true when the strand leaves
    /// its crossing through half-edge h.
    pub fn orientation(&self) -> Vec<bool> {
        let n = self.crossings.len();
        let partner = self.partners();
        let mut assigned = vec![false; 4 * n];
        let mut outgoing = vec![false; 4 * n];
        for h in 0..4 * n {
            if assigned[h] {
                continue;
            }
            let mut k = h;
            while !assigned[k] {
                assigned[k] = true;
                outgoing[k] = true;
                assigned[partner[k]] = true;
                let p = partner[k];
                k = 4 * (p / 4) + (p % 4 + 2) % 4;
            }
        }
        outgoing
    }

    /// Crossing signs (+1 right-handed, -1 left-handed) under `orientation`.
    pub fn crossing_signs(&self) -> Vec<i32> {
        let out = self.orientation();
        self.crossings
            .iter()
            .enumerate()
            .map(|(x, c)| {
                let (u, o) = if c.under_even { (0, 1) } else { (1, 0) };
                let u_in = if out[4 * x + u] { u + 2 } else { u };
                let o_in = if out[4 * x + o] { o + 2 } else { o };
                if o_in == (u_in + 3) % 4 {
                    1
                } else {
                    -1
                }
            })
            .collect()
    }

    pub fn writhe(&self) -> i64 {
        self.crossing_signs().iter().map(|&s| s as i64).sum()
    }

    /// Default checkerboard coloring: in each piece, corner 0 of its first
    /// crossing is shaded.
    pub fn checkerboard(&self) -> Coloring {
        self.checkerboard_with(true)
    }

    pub fn checkerboard_with(&self, corner0_shaded: bool) -> Coloring {
        let n = self.crossings.len();
        let partner = self.partners();
        let mut base: Vec<Option<bool>> = vec![None; n];
        for root in 0..n {
            if base[root].is_some() {
                continue;
            }
            base[root] = Some(corner0_shaded);
            let mut q = VecDeque::from([root]);
            while let Some(x) = q.pop_front() {
                let bx = base[x].unwrap();
                for k in 0..4 {
                    let c = partner[4 * x + (k + 1) % 4];
                    let (y, j) = (c / 4, c % 4);
                    if base[y].is_none() {
                        base[y] = Some(bx ^ (k % 2 == 1) ^ (j % 2 == 1));
                        q.push_back(y);
                    }
                }
            }
        }
        Coloring {
            base: base.into_iter().map(|b| b.unwrap()).collect(),
        }
    }

    /// Remove crossings, reconnecting their positions by the given pairings.
    /// Returns the new diagram and the old-to-new crossing map.
    pub(crate) fn resolve(&self, pair: &[Option<[usize; 4]>]) -> (LinkDiagram, Vec<Option<usize>>) {
        let n = self.crossings.len();
        let partner = self.partners();
        let mut map = vec![None; n];
        let mut kept = Vec::new();
        for x in 0..n {
            if pair[x].is_none() {
                map[x] = Some(kept.len());
                kept.push(x);
            }
        }
        let k = kept.len();
        let mut newp = vec![0; 4 * k];
        let mut visited = vec![false; 4 * n];
        for (nx, &x) in kept.iter().enumerate() {
            for pos in 0..4 {
                let mut p = partner[4 * x + pos];
                while let Some(pr) = pair[p / 4] {
                    visited[p] = true;
                    let q = 4 * (p / 4) + pr[p % 4];
                    visited[q] = true;
                    p = partner[q];
                }
                newp[4 * nx + pos] = 4 * map[p / 4].unwrap() + p % 4;
            }
        }
        let mut loops = self.free_loops;
        for h in 0..4 * n {
            if visited[h] || pair[h / 4].is_none() {
                continue;
            }
            let mut p = h;
            loop {
                visited[p] = true;
                let q = 4 * (p / 4) + pair[p / 4].unwrap()[p % 4];
                visited[q] = true;
                p = partner[q];
                if p == h {
                    break;
                }
            }
            loops += 1;
        }
        let under = kept.iter().map(|&x| self.crossings[x].under_even).collect();
        let marked = self.marked.and_then(|m| map[m]);
        (LinkDiagram::from_partners(&newp, under, loops, marked), map)
    }

    /// Smooth crossing `c` relative to the default coloring.
    pub fn smooth(&self, c: CrossingId, kind: Smoothing) -> LinkDiagram {
        self.smooth_with(c, kind, &self.checkerboard()).0
    }

    /// Smooth relative to an explicit coloring; also returns the crossing map.
    pub fn smooth_with(
        &self,
        c: CrossingId,
        kind: Smoothing,
        col: &Coloring,
    ) -> (LinkDiagram, Vec<Option<usize>>) {
        assert!(c < self.crossings.len(), "crossing {c} out of range");
        let s = col.shaded_parity(c);
        let m = match kind {
            Smoothing::Zero => s,
            Smoothing::Infinity => s + 1,
        };
        let mut pair = vec![None; self.crossings.len()];
        pair[c] = Some(merge_pairing(m));
        self.resolve(&pair)
    }

    /// Swap over and under everywhere.
    pub fn mirror(&self) -> LinkDiagram {
        let mut d = self.clone();
        for c in &mut d.crossings {
            c.under_even = !c.under_even;
        }
        d
    }

    /// Rotate every tuple by one position and flip its flag: the same diagram,
    /// but the default checkerboard coloring is swapped.
    pub fn rotate_all(&self) -> LinkDiagram {
        let mut d = self.clone();
        for c in &mut d.crossings {
            c.arcs = [c.arcs[1], c.arcs[2], c.arcs[3], c.arcs[0]];
            c.under_even = !c.under_even;
        }
        let partner = d.partners();
        LinkDiagram::from_partners(&partner, d.under_flags(), d.free_loops, d.marked)
    }

    /// Reorder crossings: new crossing `i` is old crossing `order[i]`.
    pub fn permute(&self, order: &[CrossingId]) -> LinkDiagram {
        let n = self.crossings.len();
        let mut inv = vec![0; n];
        for (i, &o) in order.iter().enumerate() {
            inv[o] = i;
        }
        let partner = self.partners();
        let mut newp = vec![0; 4 * n];
        for (i, &o) in order.iter().enumerate() {
            for p in 0..4 {
                let q = partner[4 * o + p];
                newp[4 * i + p] = 4 * inv[q / 4] + q % 4;
            }
        }
        let under = order.iter().map(|&o| self.crossings[o].under_even).collect();
        LinkDiagram::from_partners(&newp, under, self.free_loops, self.marked.map(|m| inv[m]))
    }

    /// Connected sum along the highest-numbered arc of each diagram.
    pub fn connected_sum(&self, other: &LinkDiagram) -> LinkDiagram {
        let (a, b) = (self.arc_count(), other.arc_count());
        self.connected_sum_at(a, other, b)
            .expect("highest arcs always exist")
    }

    /// Connected sum along arc `arc_a` of self and `arc_b` of other.
    pub fn connected_sum_at(
        &self,
        arc_a: usize,
        other: &LinkDiagram,
        arc_b: usize,
    ) -> Result<LinkDiagram, DiagramError> {
        if self.crossings.is_empty() {
            return Ok(other.clone());
        }
        if other.crossings.is_empty() {
            return Ok(self.clone());
        }
        let ends = |d: &LinkDiagram, arc: usize| -> Result<(usize, usize), DiagramError> {
            let hs: Vec<usize> = (0..4 * d.crossings.len())
                .filter(|&h| d.crossings[h / 4].arcs[h % 4] == arc)
                .collect();
            if hs.len() == 2 {
                Ok((hs[0], hs[1]))
            } else {
                Err(DiagramError::NoSuchArc(arc))
            }
        };
        let (h1, h2) = ends(self, arc_a)?;
        let (g1, g2) = ends(other, arc_b)?;
        let off = 4 * self.crossings.len();
        let (g1, g2) = (g1 + off, g2 + off);
        let mut base: Vec<usize> = self.partners();
        base.extend(other.partners().iter().map(|&p| p + off));
        let mut under = self.under_flags();
        under.extend(other.under_flags());
        let loops = self.free_loops + other.free_loops;
        let mut fallback = None;
        for (x, y) in [(g1, g2), (g2, g1)] {
            let mut p = base.clone();
            p[h1] = x;
            p[x] = h1;
            p[h2] = y;
            p[y] = h2;
            let d = LinkDiagram::from_partners(&p, under.clone(), loops, self.marked);
            if d.piece_count() == 1 && d.faces().len() == d.crossings.len() + 2 {
                return Ok(d);
            }
            fallback.get_or_insert(d);
        }
        // only reachable for split inputs
        Ok(fallback.unwrap())
    }

    fn is_r1(&self, partner: &[usize], x: usize) -> bool {
        (0..4).any(|p| partner[4 * x + p] == 4 * x + (p + 1) % 4)
    }

    /// A bigon between distinct crossings x, y whose strands pass over/under
    /// consistently, i.e. a Reidemeister II configuration.
    fn r2_partner(&self, partner: &[usize], x: usize) -> Option<usize> {
        for k in 0..4 {
            let c = partner[4 * x + (k + 1) % 4];
            let (y, j) = (c / 4, c % 4);
            if y == x {
                continue;
            }
            let back = partner[4 * y + (j + 1) % 4];
            if back != 4 * x + k {
                continue;
            }
            if self.crossings[x].is_under((k + 1) % 4) == self.crossings[y].is_under(j) {
                return Some(y);
            }
        }
        None
    }

    /// Half-edge swaps realizing R3 on the triangle face at corner 4x+k, if
    /// that face is a triangle on three crossings with a strand passing over
    /// (or under) both of its triangle crossings.
    fn r3_swaps(&self, partner: &[usize], x: usize, k: usize) -> Option<[(usize, usize); 3]> {
        let h1 = partner[4 * x + (k + 1) % 4];
        let (y, j) = (h1 / 4, h1 % 4);
        let h2 = partner[4 * y + (j + 1) % 4];
        let (z, l) = (h2 / 4, h2 % 4);
        if x == y || y == z || z == x || partner[4 * z + (l + 1) % 4] != 4 * x + k {
            return None;
        }
        let under = |c: usize, p: usize| self.crossings[c].is_under(p % 4);
        let slides = under(x, k + 1) == under(y, j)
            || under(y, j + 1) == under(z, l)
            || under(z, l + 1) == under(x, k);
        if !slides {
            return None;
        }
        let at = |c: usize, p: usize| 4 * c + p % 4;
        let outer = [at(x, k + 2), at(x, k + 3), at(y, j + 2), at(y, j + 3), at(z, l + 2), at(z, l + 3)];
        if outer.iter().any(|h| outer.contains(&partner[*h])) {
            return None;
        }
        // each strand's two outer ends trade their outside neighbours
        Some([
            (at(x, k + 2), at(z, l + 3)),
            (at(x, k + 3), at(y, j + 2)),
            (at(y, j + 3), at(z, l + 2)),
        ])
    }

    /// Every available R3 move, one per triangle corner.
    pub fn r3_moves(&self) -> Vec<Move> {
        let partner = self.partners();
        (0..4 * self.crossings.len())
            .filter(|&h| self.r3_swaps(&partner, h / 4, h % 4).is_some())
            .map(|h| Move::R3 {
                crossing: h / 4,
                corner: h % 4,
            })
            .collect()
    }

    /// First available move: any R1 in crossing order, then any R2.
    pub fn find_move(&self) -> Option<Move> {
        let partner = self.partners();
        let n = self.crossings.len();
        if let Some(x) = (0..n).find(|&x| self.is_r1(&partner, x)) {
            return Some(Move::R1 { crossing: x });
        }
        (0..n).find_map(|x| {
            self.r2_partner(&partner, x).map(|y| Move::R2 {
                first: x.min(y),
                second: x.max(y),
            })
        })
    }

    /// Apply a move after checking it is available.
    pub fn apply_move(&self, m: &Move) -> Result<(LinkDiagram, Vec<Option<usize>>), DiagramError> {
        let n = self.crossings.len();
        let partner = self.partners();
        let bad = || DiagramError::InvalidMove(m.to_string());
        let mut pair = vec![None; n];
        match *m {
            Move::R1 { crossing } => {
                if crossing >= n || !self.is_r1(&partner, crossing) {
                    return Err(bad());
                }
                pair[crossing] = Some(STRAIGHT);
            }
            Move::R2 { first, second } => {
                if first >= n || second >= n || first == second {
                    return Err(bad());
                }
                let ok = (0..4).any(|k| {
                    let c = partner[4 * first + (k + 1) % 4];
                    let (y, j) = (c / 4, c % 4);
                    y == second
                        && partner[4 * y + (j + 1) % 4] == 4 * first + k
                        && self.crossings[first].is_under((k + 1) % 4)
                            == self.crossings[y].is_under(j)
                });
                if !ok {
                    return Err(bad());
                }
                pair[first] = Some(STRAIGHT);
                pair[second] = Some(STRAIGHT);
            }
            Move::R3 { crossing, corner } => {
                if crossing >= n {
                    return Err(bad());
                }
                let swaps = self.r3_swaps(&partner, crossing, corner).ok_or_else(bad)?;
                let mut next = partner.clone();
                for (a, b) in swaps {
                    let (pa, pb) = (partner[a], partner[b]);
                    next[a] = pb;
                    next[pb] = a;
                    next[b] = pa;
                    next[pa] = b;
                }
                let d = LinkDiagram::from_partners(&next, self.under_flags(), self.free_loops, self.marked);
                return Ok((d, (0..n).map(Some).collect()));
            }
        }
        Ok(self.resolve(&pair))
    }

    /// Greedy Reidemeister I/II reduction to a fixpoint.
    pub fn simplify(&self) -> Simplified {
        let mut d = self.clone();
        let mut map: Vec<Option<usize>> = (0..self.crossings.len()).map(Some).collect();
        let mut trace = Vec::new();
        while let Some(m) = d.find_move() {
            let (next, step) = d.apply_move(&m).expect("found moves apply");
            for slot in map.iter_mut() {
                *slot = slot.and_then(|i| step[i]);
            }
            trace.push(m);
            d = next;
        }
        Simplified {
            diagram: d,
            trace,
            map,
        }
    }

    /// BFS encoding of one piece from a rooted, rotated start.
    fn encode_from(
        &self,
        partner: &[usize],
        start: usize,
        offset: usize,
        best: Option<&[usize]>,
    ) -> Option<(Vec<usize>, Vec<usize>)> {
        let n = self.crossings.len();
        let mut label = vec![usize::MAX; n];
        let mut off = vec![0; n];
        let mut order = vec![start];
        label[start] = 0;
        off[start] = offset;
        let mut enc = Vec::new();
        let mut i = 0;
        let mut smaller = false;
        while i < order.len() {
            let x = order[i];
            let mut chunk = [0usize; 5];
            chunk[0] = (self.crossings[x].under_even ^ (off[x] % 2 == 1)) as usize;
            for r in 0..4 {
                let q = partner[4 * x + (off[x] + r) % 4];
                let (y, j) = (q / 4, q % 4);
                if label[y] == usize::MAX {
                    label[y] = order.len();
                    off[y] = j;
                    order.push(y);
                }
                chunk[r + 1] = label[y] * 4 + (j + 4 - off[y]) % 4;
            }
            for v in chunk {
                if !smaller {
                    if let Some(b) = best {
                        let bv = b[enc.len()];
                        if v > bv {
                            return None;
                        }
                        if v < bv {
                            smaller = true;
                        }
                    }
                }
                enc.push(v);
            }
            i += 1;
        }
        Some((enc, order))
    }

    /// Canonical form: relabeling- and reordering-invariant.
    pub fn canonical(&self) -> Canonical {
        let n = self.crossings.len();
        if n == 0 {
            let key = match self.free_loops {
                1 => "unknot".to_string(),
                k => format!("unlink{k}"),
            };
            return Canonical {
                diagram: self.clone(),
                map: vec![],
                key,
            };
        }
        let partner = self.partners();
        let (pid, pieces) = self.piece_ids();
        let mut encs: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        for piece in 0..pieces {
            let mut best: Option<(Vec<usize>, Vec<usize>)> = None;
            for x in (0..n).filter(|&x| pid[x] == piece) {
                for o in 0..4 {
                    if let Some(r) =
                        self.encode_from(&partner, x, o, best.as_ref().map(|b| b.0.as_slice()))
                    {
                        if best.as_ref().is_none_or(|b| r.0 < b.0) {
                            best = Some(r);
                        }
                    }
                }
            }
            encs.push(best.unwrap());
        }
        encs.sort();
        let mut map = vec![0; n];
        let mut newp = vec![0; 4 * n];
        let mut under = vec![false; n];
        let mut base = 0;
        for (enc, order) in &encs {
            for (i, &x) in order.iter().enumerate() {
                map[x] = base + i;
                let chunk = &enc[5 * i..5 * i + 5];
                under[base + i] = chunk[0] == 1;
                for r in 0..4 {
                    let t = chunk[r + 1];
                    newp[4 * (base + i) + r] = 4 * (base + t / 4) + t % 4;
                }
            }
            base += order.len();
        }
        let mut key = encs
            .iter()
            .map(|(e, _)| {
                e.iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect::<Vec<_>>()
            .join("|");
        if self.free_loops > 0 {
            key.push_str(&format!("+o{}", self.free_loops));
        }
        let diagram = LinkDiagram::from_partners(
            &newp,
            under,
            self.free_loops,
            self.marked.map(|m| map[m]),
        );
        Canonical { diagram, map, key }
    }

    pub fn canonical_key(&self) -> String {
        self.canonical().key
    }

    /// PD code with arcs numbered along each oriented component and each tuple
    /// starting at the incoming under-strand.
    pub fn to_pd(&self) -> Result<String, DiagramError> {
        let n = self.crossings.len();
        if n == 0 {
            return if self.free_loops == 1 {
                Ok(String::new())
            } else {
                Err(DiagramError::NotRepresentable)
            };
        }
        if self.free_loops > 0 {
            return Err(DiagramError::NotRepresentable);
        }
        let partner = self.partners();
        let out = self.orientation();
        let mut label = vec![0usize; 4 * n];
        let mut next = 1;
        for h in 0..4 * n {
            if !out[h] || label[h] != 0 {
                continue;
            }
            let mut k = h;
            while label[k] == 0 {
                label[k] = next;
                label[partner[k]] = next;
                next += 1;
                let p = partner[k];
                k = 4 * (p / 4) + (p % 4 + 2) % 4;
            }
        }
        let terms: Vec<String> = self
            .crossings
            .iter()
            .enumerate()
            .map(|(x, c)| {
                let u = if c.under_even { 0 } else { 1 };
                let start = if out[4 * x + u] { u + 2 } else { u };
                let t: Vec<String> = (0..4)
                    .map(|r| label[4 * x + (start + r) % 4].to_string())
                    .collect();
                format!("X[{}]", t.join(","))
            })
            .collect();
        Ok(terms.join(" "))
    }
}

impl fmt::Display for LinkDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_pd() {
            Ok(s) => f.write_str(&s),
            Err(_) => {
                let terms: Vec<String> = self
                    .crossings
                    .iter()
                    .map(|c| format!("X[{},{},{},{}]", c.arcs[0], c.arcs[1], c.arcs[2], c.arcs[3]))
                    .collect();
                write!(f, "{} + {} free loop(s)", terms.join(" "), self.free_loops)
            }
        }
    }
}

impl FromStr for LinkDiagram {
    type Err = DiagramError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_pd(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const TREFOIL: &str = "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]";

    #[test]
    fn parses_trefoil() {
        let d = parse_pd(TREFOIL).unwrap();
        assert_eq!(d.crossing_count(), 3);
        assert_eq!(d.component_count(), 1);
        assert_eq!(d.faces().len(), 5);
    }

    #[test]
    fn empty_is_unknot() {
        let d = parse_pd("  # nothing\n").unwrap();
        assert_eq!(d.crossing_count(), 0);
        assert_eq!(d.component_count(), 1);
        assert_eq!(d.canonical_key(), "unknot");
    }

    #[test]
    fn parse_errors() {
        assert_eq!(
            parse_pd("X[1,1,2,3]"),
            Err(DiagramError::ArcUsedNotTwice(2))
        );
        assert!(matches!(
            parse_pd("X[1,2,3]"),
            Err(DiagramError::MalformedSyntax(_))
        ));
        assert!(matches!(
            parse_pd("X[1,2,3,4] foo"),
            Err(DiagramError::MalformedSyntax(_))
        ));
        // two disjoint kinks
        assert_eq!(
            parse_pd("X[1,1,2,2] X[3,3,4,4]"),
            Err(DiagramError::DisconnectedDiagram)
        );
    }

    #[test]
    fn nested_list_syntax() {
        let a = parse_pd("[[1,4,2,5],[3,6,4,1],[5,2,6,3]]").unwrap();
        let b = parse_pd(&format!("PD[{}]", TREFOIL.replace(' ', ", "))).unwrap();
        assert_eq!(a, parse_pd(TREFOIL).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn kink_simplifies_to_unknot() {
        let d = parse_pd("X[1,1,2,2]").unwrap();
        let s = d.simplify();
        assert_eq!(s.diagram.crossing_count(), 0);
        assert_eq!(s.diagram.free_loops(), 1);
        assert_eq!(s.trace, vec![Move::R1 { crossing: 0 }]);
    }

    #[test]
    fn smoothing_counts() {
        let d = parse_pd(TREFOIL).unwrap();
        for c in 0..3 {
            for k in [Smoothing::Zero, Smoothing::Infinity] {
                let s = d.smooth(c, k);
                assert_eq!(s.crossing_count(), 2);
                assert!(!s.is_split());
            }
            let inf = d.smooth(c, Smoothing::Infinity).simplify();
            assert_eq!(inf.diagram.canonical_key(), "unknot");
            assert_eq!(inf.trace.len(), 2);
            let zero = d.smooth(c, Smoothing::Zero);
            assert_eq!(zero.component_count(), 2);
            assert_eq!(zero.simplify().diagram.crossing_count(), 2);
        }
        let kink = parse_pd("X[1,1,2,2]").unwrap();
        for k in [Smoothing::Zero, Smoothing::Infinity] {
            assert_eq!(kink.smooth(0, k).crossing_count(), 0);
        }
    }

    #[test]
    fn mirror_is_involution() {
        let d = parse_pd(TREFOIL).unwrap();
        assert_eq!(d.mirror().mirror(), d);
        assert_ne!(d.mirror().canonical_key(), d.canonical_key());
        assert_eq!(LinkDiagram::unknot().mirror(), LinkDiagram::unknot());
    }

    #[test]
    fn trefoil_sign() {
        // this PD is the left-handed trefoil
        let d = parse_pd(TREFOIL).unwrap();
        assert_eq!(d.writhe(), -3);
        assert_eq!(d.mirror().writhe(), 3);
    }

    #[test]
    fn pd_round_trip() {
        let d = parse_pd(TREFOIL).unwrap();
        let pd = d.to_pd().unwrap();
        let e = parse_pd(&pd).unwrap();
        assert_eq!(e.canonical_key(), d.canonical_key());
        let m = d.mirror();
        assert_eq!(parse_pd(&m.to_pd().unwrap()).unwrap().canonical_key(), m.canonical_key());
    }

    #[test]
    fn canonical_key_ignores_relabeling() {
        let d = parse_pd(TREFOIL).unwrap();
        let e = parse_pd("X[6,3,1,4] X[2,5,3,6] X[4,1,5,2]").unwrap();
        assert_eq!(d.canonical_key(), e.canonical_key());
        assert_eq!(d.permute(&[2, 0, 1]).canonical_key(), d.canonical_key());
        let fig8 = parse_pd("X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]").unwrap();
        assert_ne!(fig8.canonical_key(), d.canonical_key());
        let c = d.canonical();
        assert_eq!(c.diagram.canonical_key(), c.key);
    }

    #[test]
    fn connected_sum_counts() {
        let d = parse_pd(TREFOIL).unwrap();
        let s = d.connected_sum(&d);
        assert_eq!(s.crossing_count(), 6);
        assert_eq!(s.component_count(), 1);
        assert!(!s.is_split());
        assert_eq!(LinkDiagram::unknot().connected_sum(&d), d);
    }

    #[test]
    fn moves_parse() {
        for m in [
            Move::R1 { crossing: 3 },
            Move::R2 { first: 1, second: 4 },
            Move::R3 { crossing: 2, corner: 3 },
        ] {
            assert_eq!(m.to_string().parse::<Move>().unwrap(), m);
        }
        assert!("R3:1".parse::<Move>().is_err());
        assert!("R3:1.4".parse::<Move>().is_err());
    }

    #[test]
    fn invalid_move_rejected() {
        let d = parse_pd(TREFOIL).unwrap();
        assert!(d.apply_move(&Move::R1 { crossing: 0 }).is_err());
        assert!(d.apply_move(&Move::R2 { first: 0, second: 1 }).is_err());
    }
}
