//! Monomial bases for graded pieces of the polynomial ring in n+1
//! variables, plus linear forms with exact coefficients.

use super::field::Field;

/// All exponent vectors of total degree d in n+1 variables, ordered with
/// the first exponent descending.  Degree 0 yields the single constant
/// monomial; negative degrees yield nothing.
pub fn monomials(n: u32, d: i64) -> Vec<Vec<u32>> {
    let vars = (n + 1) as usize;
    let mut out = Vec::new();
    if d < 0 {
        return out;
    }
    let mut cur = vec![0u32; vars];
    fill(&mut out, &mut cur, 0, d as u32);
    out
}

fn fill(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, pos: usize, rem: u32) {
    if pos + 1 == cur.len() {
        cur[pos] = rem;
        out.push(cur.clone());
        return;
    }
    for e in (0..=rem).rev() {
        cur[pos] = e;
        fill(out, cur, pos + 1, rem - e);
        cur[pos] = 0;
    }
}

/// Number of monomials of degree d in n+1 variables.
pub fn monomial_count(n: u32, d: i64) -> usize {
    monomials(n, d).len()
}

/// Position of an exponent vector in the `monomials(n, d)` ordering.
pub fn monomial_index(n: u32, d: i64, expt: &[u32]) -> Option<usize> {
    monomials(n, d).iter().position(|m| m == expt)
}

/// A linear form sum c_i x_i, one coefficient per variable.
#[derive(Clone, Debug, PartialEq)]
pub struct LinForm<F: Field> {
    pub coeffs: Vec<F::Elem>,
}

impl<F: Field> LinForm<F> {
    pub fn zero(f: &F, n: u32) -> LinForm<F> {
        LinForm {
            coeffs: vec![f.zero(); (n + 1) as usize],
        }
    }

    /// The coordinate form x_i.
    pub fn var(f: &F, n: u32, i: usize) -> LinForm<F> {
        let mut l = LinForm::zero(f, n);
        l.coeffs[i] = f.one();
        l
    }

    pub fn from_i64(f: &F, coeffs: &[i64]) -> LinForm<F> {
        LinForm {
            coeffs: coeffs.iter().map(|&c| f.from_i64(c)).collect(),
        }
    }

    pub fn is_zero(&self, f: &F) -> bool {
        self.coeffs.iter().all(|c| f.is_zero(c))
    }

    /// Evaluate at a point with one coordinate per variable.
    pub fn eval(&self, f: &F, point: &[F::Elem]) -> F::Elem {
        let mut acc = f.zero();
        for (c, x) in self.coeffs.iter().zip(point) {
            acc = f.add(&acc, &f.mul(c, x));
        }
        acc
    }

    pub fn format(&self, f: &F) -> String {
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !f.is_zero(c) {
                parts.push(format!("{}*x{}", f.format_elem(c), i));
            }
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}
