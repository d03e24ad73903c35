use super::design::PairDesign;
use crate::error::{domain, Result, SbmError};
use crate::netcore::{pairs, BlockMatrix, ClassAssignment, Graph, PairMask};

/// `ln(1 + e^x)` without overflow.
#[inline]
pub(crate) fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

#[inline]
pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Logit blockmodel parameters: block log-odds `theta_tilde`, covariate
/// coefficients `beta` (effects-coded, see [`PairDesign`]) and the class
/// assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct LogitModel {
    pub k: usize,
    pub theta_tilde: BlockMatrix,
    pub beta: Vec<f64>,
    pub z: ClassAssignment,
}

impl LogitModel {
    pub fn new(theta_tilde: BlockMatrix, beta: Vec<f64>, z: ClassAssignment) -> Result<Self> {
        if theta_tilde.k() != z.k() {
            return Err(SbmError::DimensionMismatch("theta_tilde and z disagree on K".into()));
        }
        if (0..z.k()).any(|a| (0..z.k()).any(|b| !theta_tilde.get(a, b).is_some_and(f64::is_finite))) {
            return domain("theta_tilde entries must be finite");
        }
        Ok(Self { k: z.k(), theta_tilde, beta, z })
    }

    fn check(&self, g: &Graph, design: &PairDesign) -> Result<()> {
        if g.n_nodes() != self.z.n_nodes() || design.n_nodes() != g.n_nodes() {
            return Err(SbmError::DimensionMismatch("graph, design and assignment sizes differ".into()));
        }
        if self.beta.len() != design.dim_beta() {
            return Err(SbmError::DimensionMismatch(format!(
                "beta has {} entries, design needs {}",
                self.beta.len(),
                design.dim_beta()
            )));
        }
        Ok(())
    }

    /// Predicted edge probability for the pair `(i, j)`.
    pub fn probability(&self, design: &PairDesign, i: usize, j: usize) -> f64 {
        sigmoid(self.linear_predictor(design, i, j))
    }

    pub fn linear_predictor(&self, design: &PairDesign, i: usize, j: usize) -> f64 {
        let x = design.features(i, j);
        self.theta_tilde.get_or(self.z.label(i), self.z.label(j), 0.0)
            + x.iter().zip(&self.beta).map(|(a, b)| a * b).sum::<f64>()
    }
}

/// Walks all observed pairs with their edge indicator and linear predictor.
fn for_each_pair(
    g: &Graph,
    mask: Option<&PairMask>,
    m: &LogitModel,
    design: &PairDesign,
    mut f: impl FnMut(usize, usize, f64, f64),
) {
    let offsets = design.offsets(&m.beta);
    let labels = m.z.labels();
    for (idx, (i, j)) in pairs(g.n_nodes()).enumerate() {
        if mask.is_some_and(|mk| mk.is_held_out_index(idx)) {
            continue;
        }
        let a = if g.has_edge(i, j) { 1.0 } else { 0.0 };
        let eta = m.theta_tilde.get_or(labels[i], labels[j], 0.0) + offsets[idx];
        f(i, j, a, eta);
    }
}

/// `sum_{i<j} { A_ij eta_ij - ln(1 + exp(eta_ij)) }`.
pub fn logit_log_likelihood(g: &Graph, m: &LogitModel, design: &PairDesign) -> Result<f64> {
    logit_log_likelihood_observed(g, None, m, design)
}

pub fn logit_log_likelihood_observed(
    g: &Graph,
    mask: Option<&PairMask>,
    m: &LogitModel,
    design: &PairDesign,
) -> Result<f64> {
    m.check(g, design)?;
    let mut total = 0.0;
    for_each_pair(g, mask, m, design, |_, _, a, eta| total += a * eta - softplus(eta));
    Ok(total)
}

/// Gradient of [`logit_log_likelihood`].
#[derive(Debug, Clone, PartialEq)]
pub struct LogitGradient {
    /// Derivative with respect to the shared value `theta_tilde[a][b] = theta_tilde[b][a]`.
    pub theta_tilde: BlockMatrix,
    pub beta: Vec<f64>,
}

impl LogitGradient {
    pub fn max_norm(&self) -> f64 {
        let k = self.theta_tilde.k();
        let t = (0..k)
            .flat_map(|a| (0..k).map(move |b| (a, b)))
            .map(|(a, b)| self.theta_tilde.get_or(a, b, 0.0).abs())
            .fold(0.0, f64::max);
        self.beta.iter().fold(t, |acc, v| acc.max(v.abs()))
    }
}

pub fn logit_gradient(g: &Graph, m: &LogitModel, design: &PairDesign) -> Result<LogitGradient> {
    logit_gradient_observed(g, None, m, design)
}

pub fn logit_gradient_observed(
    g: &Graph,
    mask: Option<&PairMask>,
    m: &LogitModel,
    design: &PairDesign,
) -> Result<LogitGradient> {
    m.check(g, design)?;
    let k = m.k;
    let labels = m.z.labels();
    let mut gt = vec![0.0; k * k];
    let mut gb = vec![0.0; design.dim_beta()];
    for_each_pair(g, mask, m, design, |i, j, a, eta| {
        let r = a - sigmoid(eta);
        let (x, y) = (labels[i].min(labels[j]), labels[i].max(labels[j]));
        gt[x * k + y] += r;
        for (gbi, xi) in gb.iter_mut().zip(design.features(i, j)) {
            *gbi += r * xi;
        }
    });
    Ok(LogitGradient {
        theta_tilde: BlockMatrix::from_fn(k, |a, b| Some(gt[a * k + b])),
        beta: gb,
    })
}
