//! Exact Laurent polynomials over the integers.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use regex::Regex;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LaurentPolynomial {
    coeffs: BTreeMap<i64, BigInt>,
}

impl LaurentPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }
    pub fn one() -> Self {
        Self::monomial(1, 0)
    }
    pub fn monomial(c: impl Into<BigInt>, e: i64) -> Self {
        let mut p = Self::default();
        p.add_term(e, c.into());
        p
    }
    pub fn add_term(&mut self, e: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(e).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&e);
        }
    }
    pub fn coeffs(&self) -> &BTreeMap<i64, BigInt> {
        &self.coeffs
    }
    pub fn coeff(&self, e: i64) -> BigInt {
        self.coeffs.get(&e).cloned().unwrap_or_default()
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }
    pub fn max_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }
    /// Multiply by x^k.
    pub fn shift(&self, k: i64) -> Self {
        LaurentPolynomial {
            coeffs: self.coeffs.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }
    pub fn scale(&self, s: &BigInt) -> Self {
        let mut r = Self::default();
        for (e, c) in &self.coeffs {
            r.add_term(*e, c * s);
        }
        r
    }
    /// Substitute x -> x^k (k may be negative).
    pub fn substitute_power(&self, k: i64) -> Self {
        let mut r = Self::default();
        for (e, c) in &self.coeffs {
            r.add_term(e * k, c.clone());
        }
        r
    }
    pub fn pow(&self, n: u32) -> Self {
        let mut r = Self::one();
        for _ in 0..n {
            r = &r * self;
        }
        r
    }
    /// Exact quotient by x^d when every exponent is divisible by d.
    pub fn compress(&self, d: i64) -> Option<Self> {
        if self.coeffs.keys().any(|e| e.rem_euclid(d) != 0) {
            return None;
        }
        Some(LaurentPolynomial {
            coeffs: self.coeffs.iter().map(|(e, c)| (e / d, c.clone())).collect(),
        })
    }

    /// Render in variable `var`, KnotInfo-like: `-t^(-4)+t^(-3)+t^(-1)`.
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (e, c)) in self.coeffs.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if neg {
                s.push('-');
            } else if i > 0 {
                s.push('+');
            }
            let mono = match *e {
                0 => String::new(),
                1 => var.to_string(),
                e if e < 0 => format!("{var}^({e})"),
                e => format!("{var}^{e}"),
            };
            if mono.is_empty() {
                s.push_str(&a.to_string());
            } else if a.is_one() {
                s.push_str(&mono);
            } else {
                s.push_str(&format!("{a}*{mono}"));
            }
        }
        s
    }

    /// Parse sums of terms like `3*t^(-2)`, `- t^3`, `t`, `5`.
    pub fn parse(text: &str, var: &str) -> Option<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return None;
        }
        let v = regex::escape(var);
        let re = Regex::new(&format!(
            r"([+-]?)(\d*)(\*?)(?:({v})(?:\^\(?(-?\d+)\)?)?)?"
        ))
        .ok()?;
        let mut p = Self::default();
        let mut pos = 0;
        while pos < compact.len() {
            let cap = re.captures_at(&compact, pos)?;
            let m = cap.get(0)?;
            if m.start() != pos || m.end() == pos {
                return None;
            }
            let digits = cap.get(2).map_or("", |g| g.as_str());
            let has_var = cap.get(4).is_some();
            if digits.is_empty() && !has_var {
                return None;
            }
            if cap.get(3).is_some_and(|g| !g.as_str().is_empty()) && (!has_var || digits.is_empty()) {
                return None;
            }
            let mut c: BigInt = if digits.is_empty() {
                BigInt::one()
            } else {
                digits.parse().ok()?
            };
            if &cap[1] == "-" {
                c = -c;
            }
            let e: i64 = if has_var {
                cap.get(5).map_or(Some(1), |g| g.as_str().parse().ok())?
            } else {
                0
            };
            p.add_term(e, c);
            pos = m.end();
        }
        Some(p)
    }
}

impl Add for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn add(self, o: &LaurentPolynomial) -> LaurentPolynomial {
        let mut r = self.clone();
        for (e, c) in &o.coeffs {
            r.add_term(*e, c.clone());
        }
        r
    }
}

impl Sub for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn sub(self, o: &LaurentPolynomial) -> LaurentPolynomial {
        self + &(-o)
    }
}

impl Neg for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn neg(self) -> LaurentPolynomial {
        LaurentPolynomial {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Mul for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn mul(self, o: &LaurentPolynomial) -> LaurentPolynomial {
        let mut r = LaurentPolynomial::default();
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &o.coeffs {
                r.add_term(e1 + e2, c1 * c2);
            }
        }
        r
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("A"))
    }
}
