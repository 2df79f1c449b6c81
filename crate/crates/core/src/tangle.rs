//! Rational tangles, crossing signs, twisting and tangle replacement.

use crate::diagram::{CrossingId, LinkDiagram};
use crate::error::TangleError;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::fmt;
use std::str::FromStr;

/// Conway notation C(a1, ..., am).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalTangle {
    coefficients: Vec<i64>,
}

impl RationalTangle {
    pub fn new(coefficients: Vec<i64>) -> Result<Self, TangleError> {
        if coefficients.is_empty() {
            return Err(TangleError::Malformed("empty tangle".into()));
        }
        if coefficients.contains(&0) {
            return Err(TangleError::Malformed("coefficients must be nonzero".into()));
        }
        Ok(RationalTangle { coefficients })
    }
    pub fn coefficients(&self) -> &[i64] {
        &self.coefficients
    }
    pub fn crossing_count(&self) -> usize {
        self.coefficients.iter().map(|a| a.unsigned_abs() as usize).sum()
    }
    pub fn negated(&self) -> Self {
        RationalTangle {
            coefficients: self.coefficients.iter().map(|a| -a).collect(),
        }
    }
    /// Continued fraction [a_m; a_{m-1}, ..., a_1] as numerator/denominator.
    pub fn fraction(&self) -> (BigInt, BigInt) {
        let (mut p, mut q) = (BigInt::one(), BigInt::zero());
        for &a in &self.coefficients {
            // x -> a + 1/x
            let np = BigInt::from(a) * &p + &q;
            q = p;
            p = np;
        }
        (p, q)
    }
}

impl fmt::Display for RationalTangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coefficients.iter().map(|a| a.to_string()).collect();
        write!(f, "C({})", parts.join(","))
    }
}

impl FromStr for RationalTangle {
    type Err = TangleError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s
            .trim()
            .strip_prefix("C(")
            .and_then(|r| r.strip_suffix(')'))
            .unwrap_or(s.trim());
        let coeffs = inner
            .split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| TangleError::Malformed(s.to_string()))?;
        RationalTangle::new(coeffs)
    }
}

/// Sign of the crossing's Tait edge in the default coloring. Positive means
/// the Zero smoothing is the A-smoothing.
pub fn epsilon(d: &LinkDiagram, c: CrossingId) -> i32 {
    let col = d.checkerboard();
    let s = col.shaded_parity(c);
    if s == crate::diagram::a_corner_parity(d.crossings()[c].under_even) {
        1
    } else {
        -1
    }
}

/// Insert |n| crossings at `c`, forming a twist region with it. For n > 0 the
/// new bigons are shaded (the Tait edge is subdivided), for n < 0 they are
/// unshaded (parallel Tait edges). The last inserted crossing is marked.
pub fn twist(d: &LinkDiagram, c: CrossingId, n: i64) -> LinkDiagram {
    if n == 0 {
        return d.clone();
    }
    let nc = d.crossing_count();
    assert!(c < nc, "crossing {c} out of range");
    let s = d.checkerboard().shaded_parity(c);
    let k = if n > 0 { s } else { s + 1 };
    let m = n.unsigned_abs() as usize;
    let chain: Vec<usize> = std::iter::once(c).chain(nc..nc + m).collect();
    let far = chain[m];
    let pos = |x: usize, p: usize| 4 * x + p % 4;
    // positions k+2, k+3 of c move to the far end of the chain
    let moved = |h: usize| -> usize {
        if h / 4 == c && ((h % 4 + 4 - k % 4) % 4) >= 2 {
            pos(far, h % 4)
        } else {
            h
        }
    };
    let old = d.partners();
    let mut partner = vec![0; 4 * (nc + m)];
    for h in 0..4 * nc {
        partner[moved(h)] = moved(old[h]);
    }
    for i in 1..=m {
        let (a, b) = (chain[i - 1], chain[i]);
        for (x, y) in [(pos(a, k + 3), pos(b, k)), (pos(a, k + 2), pos(b, k + 1))] {
            partner[x] = y;
            partner[y] = x;
        }
    }
    let flag = d.crossings()[c].under_even;
    let mut under = d.under_flags();
    under.extend(std::iter::repeat_n(flag, m));
    LinkDiagram::from_partners(&partner, under, d.free_loops(), Some(far))
}

/// First coefficient index (1-based) violating eps * a_i >= 1.
pub fn validate_extension(eps: i32, t: &RationalTangle) -> Result<(), usize> {
    match t.coefficients.iter().position(|&a| eps as i64 * a < 1) {
        Some(i) => Err(i + 1),
        None => Ok(()),
    }
}

/// Twist exponents realizing C(a1..am) at a crossing of sign `eps`, in the
/// order they are applied: (-1)^(m-i+1) a_i for i = m..1 with a_1 - eps in
/// place of a_1. Coefficients are taken relative to eps = +1.
pub fn twist_exponents(eps: i32, t: &RationalTangle) -> Vec<i64> {
    let a: Vec<i64> = t.coefficients.iter().map(|&x| x * eps as i64).collect();
    let m = a.len();
    (1..=m)
        .rev()
        .map(|i| {
            let ai = if i == 1 { a[0] - 1 } else { a[i - 1] };
            if (m - i + 1) % 2 == 1 {
                -ai
            } else {
                ai
            }
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct Replacement {
    pub diagram: LinkDiagram,
    /// Exponents applied, zeros included.
    pub exponents: Vec<i64>,
}

/// Replace crossing `c` by the rational tangle `t` through iterated twisting.
pub fn replace_with_tangle(
    d: &LinkDiagram,
    c: CrossingId,
    t: &RationalTangle,
) -> Result<Replacement, TangleError> {
    d.check_crossing(c)?;
    let eps = epsilon(d, c);
    validate_extension(eps, t).map_err(|index| TangleError::ExtensionViolated { index })?;
    // twist() treats both signs alike, so the eps = -1 case (mirror, replace
    // by -t, mirror back) reduces to the same exponent sequence
    let exponents = twist_exponents(eps, t);
    let mut cur = d.clone().with_marked(Some(c));
    for &e in &exponents {
        let at = cur.marked().expect("marked crossing survives twisting");
        cur = twist(&cur, at, e);
        if e == 0 {
            cur = cur.with_marked(Some(at));
        }
    }
    Ok(Replacement {
        diagram: cur,
        exponents,
    })
}
