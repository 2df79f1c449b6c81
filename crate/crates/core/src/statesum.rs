//! Kauffman bracket state sum, the Jones polynomial, adequacy and Turaev genus.

use crate::diagram::{a_corner_parity, merge_pairing, LinkDiagram};
use crate::error::StateSumError;
use crate::laurent::LaurentPolynomial;
use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;

pub const DEFAULT_BRACKET_BUDGET: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StateSummary {
    pub all_a_circles: usize,
    pub all_b_circles: usize,
    pub plus_adequate: bool,
    pub minus_adequate: bool,
}

impl StateSummary {
    pub fn adequate(&self) -> bool {
        self.plus_adequate && self.minus_adequate
    }
}

/// Per-crossing position pairings for the A and B smoothings.
fn smoothing_tables(d: &LinkDiagram) -> Vec<[[usize; 4]; 2]> {
    d.crossings()
        .iter()
        .map(|c| {
            let a = a_corner_parity(c.under_even);
            [merge_pairing(a), merge_pairing(a + 1)]
        })
        .collect()
}

/// Circle count of a state; bit x of `state` set means crossing x is B-smoothed.
fn circles(partner: &[usize], tables: &[[[usize; 4]; 2]], state: u64, seen: &mut [bool]) -> usize {
    seen.iter_mut().for_each(|s| *s = false);
    let mut orbits = 0;
    for h in 0..partner.len() {
        if seen[h] {
            continue;
        }
        orbits += 1;
        let mut k = h;
        while !seen[k] {
            seen[k] = true;
            let p = partner[k];
            let x = p / 4;
            let t = &tables[x][((state >> x) & 1) as usize];
            k = 4 * x + t[p % 4];
        }
    }
    orbits / 2
}

/// Histogram of states by (#A - #B, circles).
fn state_histogram(d: &LinkDiagram) -> BTreeMap<(i64, usize), u64> {
    let n = d.crossing_count();
    let partner = d.partners();
    let tables = smoothing_tables(d);
    let mut seen = vec![false; 4 * n];
    let mut hist = BTreeMap::new();
    for state in 0..(1u64 << n) {
        let b = state.count_ones() as i64;
        let loops = circles(&partner, &tables, state, &mut seen) + d.free_loops();
        *hist.entry((n as i64 - 2 * b, loops)).or_insert(0) += 1;
    }
    hist
}

fn check_budget(d: &LinkDiagram, budget: usize) -> Result<(), StateSumError> {
    if d.crossing_count() > budget {
        Err(StateSumError::BudgetExceeded {
            crossings: d.crossing_count(),
            budget,
        })
    } else {
        Ok(())
    }
}

/// Kauffman bracket in A, normalized so the crossingless unknot is 1.
pub fn kauffman_bracket(d: &LinkDiagram) -> Result<LaurentPolynomial, StateSumError> {
    kauffman_bracket_with_budget(d, DEFAULT_BRACKET_BUDGET)
}

pub fn kauffman_bracket_with_budget(
    d: &LinkDiagram,
    budget: usize,
) -> Result<LaurentPolynomial, StateSumError> {
    check_budget(d, budget)?;
    let hist = state_histogram(d);
    let delta = &(-&LaurentPolynomial::monomial(1, 2)) - &LaurentPolynomial::monomial(1, -2);
    let max_loops = hist.keys().map(|k| k.1).max().unwrap_or(1);
    let mut powers = vec![LaurentPolynomial::one()];
    for i in 1..max_loops {
        let next = &powers[i - 1] * &delta;
        powers.push(next);
    }
    let mut r = LaurentPolynomial::zero();
    for (&(e, loops), &count) in &hist {
        let term = powers[loops - 1].shift(e).scale(&BigInt::from(count));
        r = &r + &term;
    }
    Ok(r)
}

/// Jones polynomial in the variable t^(1/2): the key of each coefficient is
/// twice the t-exponent.
pub fn jones_polynomial(d: &LinkDiagram) -> Result<LaurentPolynomial, StateSumError> {
    let br = kauffman_bracket(d)?;
    let w = d.writhe();
    // f(A) = (-A^3)^(-w) <D>, then t = A^(-4)
    let sign = if w.rem_euclid(2) == 0 { 1 } else { -1 };
    let f = br.shift(-3 * w).scale(&BigInt::from(sign));
    let mut v = LaurentPolynomial::zero();
    for (e, c) in f.coeffs() {
        debug_assert!(e % 2 == 0);
        v.add_term(-e / 2, c.clone());
    }
    Ok(v)
}

/// Jones polynomial with integer t-exponents, when it has them (odd component count).
pub fn jones_in_t(d: &LinkDiagram) -> Result<Option<LaurentPolynomial>, StateSumError> {
    Ok(jones_polynomial(d)?.compress(2))
}

/// |V(-1)| straight from the bracket; the writhe factor has modulus one there.
pub fn determinant_jones(d: &LinkDiagram) -> Result<BigUint, StateSumError> {
    let br = kauffman_bracket(d)?;
    let r = match br.min_exp() {
        Some(r) => r,
        None => return Ok(BigUint::zero()),
    };
    let mut acc = BigInt::zero();
    for (e, c) in br.coeffs() {
        let q = (e - r) / 4;
        debug_assert_eq!((e - r) % 4, 0);
        if q % 2 == 0 {
            acc += c;
        } else {
            acc -= c;
        }
    }
    Ok(acc.abs().to_biguint().unwrap())
}

/// Circle ids of the all-A (or all-B) state by union-find over half-edges.
fn state_circle_ids(d: &LinkDiagram, b_state: bool) -> (Vec<usize>, usize) {
    let n = d.crossing_count();
    let partner = d.partners();
    let tables = smoothing_tables(d);
    let mut uf: Vec<usize> = (0..4 * n).collect();
    fn find(uf: &mut [usize], mut x: usize) -> usize {
        while uf[x] != x {
            uf[x] = uf[uf[x]];
            x = uf[x];
        }
        x
    }
    let union = |uf: &mut Vec<usize>, a: usize, b: usize| {
        let (ra, rb) = (find(uf, a), find(uf, b));
        if ra != rb {
            uf[ra] = rb;
        }
    };
    for h in 0..4 * n {
        union(&mut uf, h, partner[h]);
        let x = h / 4;
        union(&mut uf, h, 4 * x + tables[x][b_state as usize][h % 4]);
    }
    let ids: Vec<usize> = (0..4 * n).map(|h| find(&mut uf, h)).collect();
    let mut roots = ids.clone();
    roots.sort_unstable();
    roots.dedup();
    (ids, roots.len() + d.free_loops())
}

pub fn state_summary(d: &LinkDiagram) -> StateSummary {
    let tables = smoothing_tables(d);
    let mut out = [(0usize, true); 2];
    for (i, slot) in out.iter_mut().enumerate() {
        let (ids, count) = state_circle_ids(d, i == 1);
        // arc through position 0 vs the other arc of the smoothing
        let adequate = (0..d.crossing_count()).all(|x| {
            let t = tables[x][i];
            let other = (0..4).find(|&p| p != 0 && p != t[0]).unwrap();
            ids[4 * x] != ids[4 * x + other]
        });
        *slot = (count, adequate);
    }
    StateSummary {
        all_a_circles: out[0].0,
        all_b_circles: out[1].0,
        plus_adequate: out[0].1,
        minus_adequate: out[1].1,
    }
}

pub fn turaev_genus(d: &LinkDiagram) -> usize {
    let s = state_summary(d);
    let g = 2 + d.crossing_count() as i64 - s.all_a_circles as i64 - s.all_b_circles as i64;
    debug_assert!(g >= 0 && g % 2 == 0, "connected diagrams have integral genus");
    (g.max(0) / 2) as usize
}
