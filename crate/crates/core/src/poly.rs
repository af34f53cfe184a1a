//! Dense integer polynomials.
//!
//! Coefficients are i64 and every product or sum that could overflow is
//! checked — divisibility verdicts drive tiling decisions, so a silent wrap
//! would corrupt answers rather than crash. Polynomials are kept normalized:
//! no trailing zero coefficient, and the zero polynomial is the empty vector.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntPoly {
    /// coeffs[i] is the coefficient of X^i; empty means zero; the last
    /// entry, when present, is nonzero.
    coeffs: Vec<i64>,
}

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPoly { coeffs: vec![1] }
    }

    /// Build from low-to-high coefficients, trimming trailing zeros.
    pub fn from_coeffs(coeffs: impl Into<Vec<i64>>) -> Self {
        let mut coeffs = coeffs.into();
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    /// c · X^d.
    pub fn monomial(c: i64, d: usize) -> Self {
        if c == 0 {
            return IntPoly::zero();
        }
        let mut coeffs = vec![0; d + 1];
        coeffs[d] = c;
        IntPoly { coeffs }
    }

    /// X^n − 1.
    pub fn x_pow_minus_one(n: usize) -> Self {
        assert!(n > 0, "X^0 - 1 is the zero polynomial; ask for n >= 1");
        let mut coeffs = vec![0; n + 1];
        coeffs[0] = -1;
        coeffs[n] = 1;
        IntPoly { coeffs }
    }

    /// The mask of a set of exponents: Σ X^e over distinct e.
    /// Repeated exponents accumulate (useful for folded masks).
    pub fn mask(exponents: &[u64]) -> Result<Self> {
        let mut coeffs: Vec<i64> = Vec::new();
        for &e in exponents {
            let e = usize::try_from(e)
                .map_err(|_| Error::domain("mask: exponent exceeds usize"))?;
            if e >= coeffs.len() {
                coeffs.resize(e + 1, 0);
            }
            coeffs[e] += 1;
        }
        Ok(IntPoly::from_coeffs(coeffs))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Low-to-high coefficients (no trailing zero).
    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// Coefficient of X^i (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> i64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// Leading coefficient; zero only for the zero polynomial.
    pub fn leading(&self) -> i64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    /// Exact product, with overflow checked coefficient by coefficient.
    pub fn multiply(&self, g: &IntPoly) -> Result<IntPoly> {
        if self.is_zero() || g.is_zero() {
            return Ok(IntPoly::zero());
        }
        let mut out = vec![0i64; self.coeffs.len() + g.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in g.coeffs.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                let prod = a.checked_mul(b).ok_or(Error::Overflow("multiply"))?;
                out[i + j] = out[i + j]
                    .checked_add(prod)
                    .ok_or(Error::Overflow("multiply"))?;
            }
        }
        Ok(IntPoly::from_coeffs(out))
    }

    /// Exact quotient over the integers: `Some(q)` with `self = q · g` when
    /// such an integer polynomial exists, `None` when it does not.
    ///
    /// Long division from the top: if an integer quotient exists, each
    /// partial remainder's leading coefficient is an exact multiple of
    /// `g`'s, so one pass either constructs q or proves there is none.
    /// Dividing by zero is a domain error.
    pub fn exact_divide(&self, g: &IntPoly) -> Result<Option<IntPoly>> {
        if g.is_zero() {
            return Err(Error::domain("exact_divide: division by zero"));
        }
        if self.is_zero() {
            return Ok(Some(IntPoly::zero()));
        }
        let (df, dg) = (self.degree().unwrap(), g.degree().unwrap());
        if df < dg {
            return Ok(None);
        }
        let lead_g = g.leading();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0i64; df - dg + 1];
        for k in (0..quot.len()).rev() {
            let top = rem[k + dg];
            if top == 0 {
                continue;
            }
            if top % lead_g != 0 {
                return Ok(None);
            }
            let q = top / lead_g;
            quot[k] = q;
            for (i, &gc) in g.coeffs.iter().enumerate() {
                if gc == 0 {
                    continue;
                }
                let sub = q.checked_mul(gc).ok_or(Error::Overflow("exact_divide"))?;
                rem[k + i] = rem[k + i]
                    .checked_sub(sub)
                    .ok_or(Error::Overflow("exact_divide"))?;
            }
        }
        if rem.iter().any(|&c| c != 0) {
            return Ok(None);
        }
        Ok(Some(IntPoly::from_coeffs(quot)))
    }

    /// Whether `g` divides `self` over the integers.
    pub fn divisible_by(&self, g: &IntPoly) -> Result<bool> {
        Ok(self.exact_divide(g)?.is_some())
    }

    /// Reduce modulo X^n − 1 by folding exponent i onto i mod n.
    pub fn reduce_cyclic(&self, n: usize) -> Result<IntPoly> {
        if n == 0 {
            return Err(Error::domain("reduce_cyclic: modulus must be positive"));
        }
        let mut out = vec![0i64; n.min(self.coeffs.len())];
        if out.is_empty() {
            return Ok(IntPoly::zero());
        }
        out.resize(n, 0);
        for (i, &c) in self.coeffs.iter().enumerate() {
            let slot = i % n;
            out[slot] = out[slot]
                .checked_add(c)
                .ok_or(Error::Overflow("reduce_cyclic"))?;
        }
        Ok(IntPoly::from_coeffs(out))
    }

    /// The coefficient sum, i.e. the value at X = 1.
    pub fn eval_at_one(&self) -> Result<i64> {
        let mut acc = 0i64;
        for &c in &self.coeffs {
            acc = acc.checked_add(c).ok_or(Error::Overflow("eval_at_one"))?;
        }
        Ok(acc)
    }
}

impl fmt::Display for IntPoly {
    /// Renders low-degree first, omitting zero terms: `-1 + X^2`, `1 + 2*X`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " {} ", if c < 0 { '-' } else { '+' })?;
            } else if c < 0 {
                write!(f, "-")?;
            }
            first = false;
            let mag = c.unsigned_abs();
            match (mag, i) {
                (_, 0) => write!(f, "{mag}")?,
                (1, 1) => write!(f, "X")?,
                (1, _) => write!(f, "X^{i}")?,
                (_, 1) => write!(f, "{mag}*X")?,
                (_, _) => write!(f, "{mag}*X^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly({self})")
    }
}
