//! Bernoulli divergences and the `x ln x` building blocks of the blockmodel
//! likelihoods. Natural logarithms throughout; `0 ln 0 = 0`.

use crate::error::{domain, Result};

#[inline]
pub fn xlnx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Negative binary entropy `t ln t + (1 - t) ln(1 - t)`.
#[inline]
pub fn neg_entropy(t: f64) -> f64 {
    xlnx(t) + xlnx(1.0 - t)
}

/// Profile log-likelihood contribution of a block with `n` pairs and `e` edges:
/// `n * neg_entropy(e / n)`, zero for an empty block.
#[inline]
pub fn block_term(n: u64, e: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let (nf, ef) = (n as f64, e as f64);
    let mut s = 0.0;
    if e > 0 {
        s += ef * (ef / nf).ln();
    }
    if e < n {
        let r = nf - ef;
        s += r * (r / nf).ln();
    }
    s
}

/// Divergence of Bernoulli(q) from Bernoulli(p), `D(p || q)`.
///
/// Returns `+inf` when `q` sits on the boundary and `p` differs from it.
pub fn bernoulli_kl(p: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) {
        return domain(format!("bernoulli_kl arguments ({p}, {q}) outside [0, 1]"));
    }
    Ok(bernoulli_kl_unchecked(p, q))
}

pub(crate) fn bernoulli_kl_unchecked(p: f64, q: f64) -> f64 {
    let mut d = 0.0;
    if p > 0.0 {
        if q <= 0.0 {
            return f64::INFINITY;
        }
        d += p * (p / q).ln();
    }
    if p < 1.0 {
        if q >= 1.0 {
            return f64::INFINITY;
        }
        d += (1.0 - p) * ((1.0 - p) / (1.0 - q)).ln();
    }
    // Rounding can leave a tiny negative residue when p == q.
    d.max(0.0)
}

/// Precomputed `x ln x` for integer `x` up to a bound, used by the sampler's
/// inner loop.
#[derive(Debug, Clone)]
pub(crate) struct XlnxTable {
    values: Vec<f64>,
}

impl XlnxTable {
    pub fn new(max: u64) -> Self {
        let values = (0..=max).map(|x| xlnx(x as f64)).collect();
        Self { values }
    }

    #[inline]
    pub fn get(&self, x: u64) -> f64 {
        match self.values.get(x as usize) {
            Some(&v) => v,
            None => xlnx(x as f64),
        }
    }

    /// Same quantity as [`block_term`], via table lookups.
    #[inline]
    pub fn block_term(&self, n: u64, e: u64) -> f64 {
        self.get(e) + self.get(n - e) - self.get(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kl_examples() {
        assert_eq!(bernoulli_kl(0.3, 0.3).unwrap(), 0.0);
        // 0.5 ln 2 + 0.5 ln(2/3)
        let expected = 0.5 * 2f64.ln() + 0.5 * (0.5f64 / 0.75).ln();
        assert_relative_eq!(bernoulli_kl(0.5, 0.25).unwrap(), expected, epsilon = 1e-15);
        assert_relative_eq!(bernoulli_kl(0.5, 0.25).unwrap(), 0.143841, epsilon = 1e-6);
        assert_eq!(bernoulli_kl(0.0, 1.0).unwrap(), f64::INFINITY);
        assert_eq!(bernoulli_kl(1.0, 0.0).unwrap(), f64::INFINITY);
        assert_eq!(bernoulli_kl(0.0, 0.0).unwrap(), 0.0);
        assert_relative_eq!(bernoulli_kl(0.0, 0.5).unwrap(), 2f64.ln(), epsilon = 1e-15);
        assert!(bernoulli_kl(-0.1, 0.5).is_err());
        assert!(bernoulli_kl(0.5, 1.1).is_err());
    }

    #[test]
    fn block_term_forms_agree() {
        let table = XlnxTable::new(100);
        for n in 0..40u64 {
            for e in 0..=n {
                let direct = block_term(n, e);
                let via = if n == 0 { 0.0 } else { n as f64 * neg_entropy(e as f64 / n as f64) };
                assert_relative_eq!(direct, via, epsilon = 1e-12, max_relative = 1e-12);
                assert_relative_eq!(table.block_term(n, e), direct, epsilon = 1e-11);
            }
        }
    }
}
