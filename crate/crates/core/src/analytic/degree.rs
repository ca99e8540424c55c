//! Expected bgp-degrees `D(i|x)` for each topology family.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{check_probability, informed_count, informed_unchecked, ModelParams, StepContext};
use crate::scalar::Real;

/// Which closed form to use for configuration-model degrees.
///
/// Both share `D(1|x)`, the residual mean degrees `mu_d(j|x)` and the
/// structure `D(1|x) prod A(j|x) + sum (mu_d(j|x) - 1) prod A(m|x)`; they
/// differ only in the denominator of `A(j|x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CmrgForm {
    /// `A(j|x) = 1 - mu_d(j|x) / (N - n(j|x))`: the exact unrolling of the
    /// step recursion `D(i) = D(i-1) - 1 + mu_d(i-1) (1 - D(i-1)/(N - n(i-1)))`.
    /// Its fixed point is `D = N - n`, so the last step has degree ~1.
    #[default]
    Unrolled,
    /// `A(j|x) = 1 - mu_d(j|x) / (N - n(j|x) - 1)`. Its fixed point is
    /// `D = N - n - 1`, which drives the final step to ~0.
    AsPrinted,
}

impl CmrgForm {
    fn a_denominator(self, n_total: usize, informed: usize) -> isize {
        let base = n_total as isize - informed as isize;
        match self {
            CmrgForm::Unrolled => base,
            CmrgForm::AsPrinted => base - 1,
        }
    }
}

fn real<F: Real>(n: usize) -> F {
    F::count(n)
}

/// Full mesh: `D(i|x) = N - n(i|x)`.
pub fn degree_full_mesh<T: crate::scalar::Field>(ctx: StepContext, params: &ModelParams<T>) -> Result<usize> {
    Ok(params.n_total - informed_count(ctx, params)?)
}

/// Erdős–Rényi graph: `E[D(i|x)] = (N - n) (1 - (1 - p)^n)`.
pub fn degree_poisson<F: Real>(ctx: StepContext, params: &ModelParams<F>, p_edge: F) -> Result<F> {
    check_probability("p_edge", p_edge)?;
    let n = informed_count(ctx, params)?;
    Ok(poisson_unchecked(params.n_total, n, p_edge))
}

#[inline]
pub(crate) fn poisson_unchecked<F: Real>(n_total: usize, informed: usize, p_edge: F) -> F {
    let miss = (F::one() - p_edge).powi(informed as i32);
    real::<F>(n_total - informed) * (F::one() - miss)
}

fn check_cmrg_inputs<F: Real>(params: &ModelParams<F>, mu_d: F, cv_d: Option<F>) -> Result<()> {
    params.validate()?;
    if !(mu_d > F::zero()) {
        return Err(Error::domain(format!("mu_d must be positive, got {mu_d}")));
    }
    if let Some(cv) = cv_d {
        if !(cv >= F::zero()) {
            return Err(Error::domain(format!("cv_d must be nonnegative, got {cv}")));
        }
    }
    Ok(())
}

/// First-step configuration-model degree: `mu_d` when the announcer is
/// outside the cluster, `(N - k) mu_d ln(N / (N - k))` when it is inside.
pub fn degree_cmrg_first<F: Real>(x: usize, params: &ModelParams<F>, mu_d: F) -> Result<F> {
    check_cmrg_inputs(params, mu_d, None)?;
    let steps = params.steps();
    if steps == 0 {
        return Err(Error::domain("no steps remain: cluster covers the whole network"));
    }
    if x > steps {
        return Err(Error::domain(format!("x = {x} outside [0, N-k = {steps}]")));
    }
    Ok(cmrg_first_unchecked(x, params, mu_d))
}

fn cmrg_first_unchecked<F: Real>(x: usize, params: &ModelParams<F>, mu_d: F) -> F {
    if x > 0 {
        mu_d
    } else {
        let n: F = real(params.n_total);
        let rest: F = real(params.steps());
        rest * mu_d * (n / rest).ln()
    }
}

/// Residual mean degree of still-uninformed nodes,
/// `mu_d prod_{m=1}^{j-1} (1 - cv_d^2 / (N - n(m|x) - 1))`.
pub fn mean_residual_degree<F: Real>(j: usize, x: usize, params: &ModelParams<F>, mu_d: F, cv_d: F) -> Result<F> {
    check_cmrg_inputs(params, mu_d, Some(cv_d))?;
    if j < 1 {
        return Err(Error::domain("j must be at least 1"));
    }
    if j == 1 {
        return Ok(mu_d);
    }
    let steps = params.steps();
    if x > steps || j - 1 > steps {
        return Err(Error::domain(format!(
            "(j = {j}, x = {x}) outside the step range of N-k = {steps}"
        )));
    }
    Ok(residual_means(params, mu_d, cv_d, x, j)?[j - 1])
}

/// `mu_d(j|x)` for `j = 1..=len`.
fn residual_means<F: Real>(params: &ModelParams<F>, mu_d: F, cv_d: F, x: usize, len: usize) -> Result<Vec<F>> {
    let cv2 = cv_d * cv_d;
    let mut out = Vec::with_capacity(len);
    let mut current = mu_d;
    for j in 1..=len {
        out.push(current);
        if j < len {
            let informed = informed_unchecked(j, x, params.k_cluster);
            let denom = params.n_total as isize - informed as isize - 1;
            if denom <= 0 {
                return Err(Error::domain(format!(
                    "degenerate tail: N - n({j}|{x}) - 1 = {denom} in residual degree product"
                )));
            }
            current = current * (F::one() - cv2 / real::<F>(denom as usize));
        }
    }
    Ok(out)
}

fn a_factors<F: Real>(params: &ModelParams<F>, residual: &[F], x: usize, form: CmrgForm) -> Result<Vec<F>> {
    residual
        .iter()
        .enumerate()
        .map(|(idx, &mu_j)| {
            let j = idx + 1;
            let denom = form.a_denominator(params.n_total, informed_unchecked(j, x, params.k_cluster));
            if denom <= 0 {
                return Err(Error::domain(format!(
                    "degenerate tail: A({j}|{x}) denominator is {denom}"
                )));
            }
            Ok(F::one() - mu_j / real::<F>(denom as usize))
        })
        .collect()
}

/// Configuration-model degree evaluated literally from the closed form
/// (explicit products and sums), without any floor.
pub fn cmrg_closed_form<F: Real>(
    ctx: StepContext,
    params: &ModelParams<F>,
    mu_d: F,
    cv_d: F,
    form: CmrgForm,
) -> Result<F> {
    check_cmrg_inputs(params, mu_d, Some(cv_d))?;
    ctx.validate(params)?;
    let (i, x) = (ctx.step, ctx.sdn_hit_step);
    let d1 = cmrg_first_unchecked(x, params, mu_d);
    if i == 1 {
        return Ok(d1);
    }
    let residual = residual_means(params, mu_d, cv_d, x, i - 1)?;
    let a = a_factors(params, &residual, x, form)?;
    // a[j - 1] holds A(j|x)
    let prod = |from: usize, to: usize| (from..=to).fold(F::one(), |acc, m| acc * a[m - 1]);
    let mut value = d1 * prod(1, i - 1);
    for j in 1..i {
        value = value + (residual[j - 1] - F::one()) * prod(j + 1, i - 1);
    }
    Ok(value)
}

/// `E[D(i|x)]` for every step `i` at fixed `x`, via the Horner form
/// `E_i = E_{i-1} A(i-1|x) + mu_d(i-1|x) - 1`.
pub(crate) fn cmrg_row<F: Real>(params: &ModelParams<F>, mu_d: F, cv_d: F, x: usize, form: CmrgForm) -> Result<Vec<F>> {
    let steps = params.steps();
    if steps == 0 {
        return Ok(Vec::new());
    }
    let residual = residual_means(params, mu_d, cv_d, x, steps)?;
    let a = a_factors(params, &residual[..steps - 1], x, form)?;
    let mut row = Vec::with_capacity(steps);
    let mut value = cmrg_first_unchecked(x, params, mu_d);
    row.push(value);
    for j in 1..steps {
        value = value * a[j - 1] + residual[j - 1] - F::one();
        row.push(value);
    }
    Ok(row)
}

/// The step recursion itself, evaluated directly. Kept as a diagnostic
/// cross-check of [`CmrgForm::Unrolled`].
pub fn cmrg_recursion<F: Real>(params: &ModelParams<F>, mu_d: F, cv_d: F, x: usize) -> Result<Vec<F>> {
    check_cmrg_inputs(params, mu_d, Some(cv_d))?;
    let steps = params.steps();
    if steps == 0 {
        return Ok(Vec::new());
    }
    if x > steps {
        return Err(Error::domain(format!("x = {x} outside [0, N-k = {steps}]")));
    }
    let residual = residual_means(params, mu_d, cv_d, x, steps)?;
    let mut out = vec![cmrg_first_unchecked(x, params, mu_d)];
    for i in 2..=steps {
        let prev = out[i - 2];
        let uninformed = real::<F>(params.n_total - informed_unchecked(i - 1, x, params.k_cluster));
        out.push(prev - F::one() + residual[i - 2] * (F::one() - prev / uninformed));
    }
    Ok(out)
}
