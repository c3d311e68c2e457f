//! Riemann–Liouville kernel, backward differences and the discrete
//! convolution calculus shared by the Rothe scheme and the property suites.
//!
//! All convolutions use the right-endpoint product rule on a uniform grid:
//!
//! ```text
//! (κ * z)^c_i = Σ_{ℓ=1..i} κ_{i+1-ℓ} z_ℓ τ
//! ```
//!
//! The kernel is never sampled at `t = 0`, where `g_γ` is singular.

use crate::error::{Error, Result};
use crate::gamma;

/// Uniform time grid `t_i = i T / n`, `i = 0..=n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    final_time: f64,
    steps: usize,
    tau: f64,
}

impl TimeGrid {
    pub fn new(final_time: f64, steps: usize) -> Result<Self> {
        if !(final_time > 0.0 && final_time.is_finite()) {
            return Err(Error::domain(format!("final time must be > 0, got {final_time}")));
        }
        if steps == 0 {
            return Err(Error::domain("time grid needs at least one step"));
        }
        Ok(TimeGrid {
            final_time,
            steps,
            tau: final_time / steps as f64,
        })
    }

    pub fn final_time(&self) -> f64 {
        self.final_time
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `t_i`; the last node is exactly `T`.
    pub fn node(&self, i: usize) -> f64 {
        if i == self.steps {
            self.final_time
        } else {
            i as f64 * self.tau
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.steps).map(|i| self.node(i)).collect()
    }

    /// Same final time, twice the steps.
    pub fn refined(&self) -> Self {
        TimeGrid::new(self.final_time, 2 * self.steps).expect("refining a valid grid")
    }
}

/// Scalar samples `z_0..z_n` of a function on a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl SampledPath {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.steps() + 1 {
            return Err(Error::domain(format!(
                "path has {} samples, grid needs {}",
                values.len(),
                grid.steps() + 1
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!("non-finite sample at node {i}")));
        }
        Ok(SampledPath { grid, values })
    }

    /// Samples `f(t_i)`.
    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        SampledPath::new(grid, grid.nodes().into_iter().map(f).collect())
    }

    pub fn zeros(grid: TimeGrid) -> Self {
        SampledPath {
            grid,
            values: vec![0.0; grid.steps() + 1],
        }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Max-norm distance over all nodes.
    pub fn max_abs_diff(&self, other: &SampledPath) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Kernel samples `κ_1..κ_n`, `κ_ℓ = κ(t_ℓ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSamples {
    gamma: Option<f64>,
    grid: TimeGrid,
    values: Vec<f64>,
}

impl KernelSamples {
    /// Samples of `g_γ` at `t_1..t_n`.
    pub fn riemann_liouville(gamma: f64, grid: TimeGrid) -> Result<Self> {
        check_order(gamma)?;
        let values = (1..=grid.steps())
            .map(|l| rl_kernel(gamma, grid.node(l)))
            .collect::<Result<Vec<_>>>()?;
        Ok(KernelSamples {
            gamma: Some(gamma),
            grid,
            values,
        })
    }

    /// An arbitrary kernel given by its samples `κ_1..κ_n`.
    pub fn from_values(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.steps() {
            return Err(Error::domain(format!(
                "kernel has {} samples, grid needs {}",
                values.len(),
                grid.steps()
            )));
        }
        Ok(KernelSamples {
            gamma: None,
            grid,
            values,
        })
    }

    pub fn gamma(&self) -> Option<f64> {
        self.gamma
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// `κ_ℓ` for `1 ≤ ℓ ≤ n`.
    pub fn at(&self, l: usize) -> f64 {
        self.values[l - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `Σ_ℓ κ_ℓ τ`, the discrete L¹ mass of the kernel.
    pub fn l1_mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.tau()
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }
}

fn check_order(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("kernel order must lie in (0,1), got {gamma}")))
    }
}

/// `g_γ(t) = t^{-γ} / Γ(1-γ)`.
pub fn rl_kernel(gamma: f64, t: f64) -> Result<f64> {
    check_order(gamma)?;
    if !(t > 0.0) {
        return Err(Error::domain(format!("kernel evaluated at t = {t} <= 0")));
    }
    Ok(t.powf(-gamma) * gamma::recip_gamma(1.0 - gamma))
}

fn check_index(i: usize, n: usize) -> Result<()> {
    if i == 0 || i > n {
        Err(Error::Index { index: i, lo: 1, hi: n })
    } else {
        Ok(())
    }
}

/// Backward difference `δz_i = (z_i − z_{i−1}) / τ`.
pub fn delta(path: &SampledPath, i: usize) -> Result<f64> {
    check_index(i, path.grid.steps())?;
    Ok((path.values[i] - path.values[i - 1]) / path.grid.tau())
}

/// Second backward difference `δ²z_i = (δz_i − δz_{i−1}) / τ` with `δz_0` seeded.
pub fn delta2(path: &SampledPath, prior_delta0: f64, i: usize) -> Result<f64> {
    check_index(i, path.grid.steps())?;
    let prev = if i == 1 {
        prior_delta0
    } else {
        delta(path, i - 1)?
    };
    Ok((delta(path, i)? - prev) / path.grid.tau())
}

/// Backward differences of a whole path, `δz_0 := prior_delta0`.
pub fn delta_path(path: &SampledPath, prior_delta0: f64) -> SampledPath {
    let tau = path.grid.tau();
    let mut values = Vec::with_capacity(path.values.len());
    values.push(prior_delta0);
    values.extend(path.values.windows(2).map(|w| (w[1] - w[0]) / tau));
    SampledPath {
        grid: path.grid,
        values,
    }
}

/// `(κ * z)^c_i`. At `i = 0` the value is defined (as 0) only when `z_0 = 0`.
pub fn discrete_conv(kernel: &KernelSamples, z: &SampledPath, i: usize) -> Result<f64> {
    let n = z.grid.steps();
    if i > n || i > kernel.values.len() {
        return Err(Error::Index {
            index: i,
            lo: 0,
            hi: n.min(kernel.values.len()),
        });
    }
    if i == 0 {
        return if z.values[0] == 0.0 {
            Ok(0.0)
        } else {
            Err(Error::Contract(
                "discrete convolution at node 0 requires z_0 = 0".into(),
            ))
        };
    }
    Ok(conv_at(&kernel.values, &z.values, i) * z.grid.tau())
}

/// `Σ_{ℓ=1..i} κ_{i+1-ℓ} z_ℓ` (no τ factor); `kernel[0]` holds `κ_1`.
pub(crate) fn conv_at(kernel: &[f64], z: &[f64], i: usize) -> f64 {
    (1..=i).map(|l| kernel[i - l] * z[l]).sum()
}

/// `(κ * z)^c_i` for every node, node 0 set to 0 (the `z_0` sample is not used).
pub fn conv_path(kernel: &KernelSamples, z: &SampledPath) -> SampledPath {
    let n = z.grid.steps();
    let tau = z.grid.tau();
    let mut values = vec![0.0; n + 1];
    for (i, v) in values.iter_mut().enumerate().skip(1) {
        *v = conv_at(&kernel.values, &z.values, i) * tau;
    }
    SampledPath {
        grid: z.grid,
        values,
    }
}

/// Discrete Riemann–Liouville integral `I^α z` (right-endpoint rule), node 0 set to 0.
///
/// For `α ≥ 1` this is `I^{⌊α⌋} ∘ I^{α−⌊α⌋}` with `I¹` the cumulative
/// right-endpoint sum.
pub fn frac_integral(alpha: f64, z: &SampledPath) -> Result<SampledPath> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::domain(format!("integration order must be > 0, got {alpha}")));
    }
    let whole = alpha.floor();
    let frac = alpha - whole;
    let mut out = if frac > 0.0 {
        let kernel = KernelSamples::riemann_liouville(1.0 - frac, z.grid)?;
        conv_path(&kernel, z)
    } else {
        z.clone()
    };
    let tau = z.grid.tau();
    for _ in 0..whole as usize {
        let mut acc = 0.0;
        out.values[0] = 0.0;
        for v in out.values.iter_mut().skip(1) {
            acc += *v * tau;
            *v = acc;
        }
    }
    out.values[0] = 0.0;
    Ok(out)
}

/// Discrete Caputo derivative `δ(g_α * (z − z_0))^c_i` at every node, node 0 = 0.
pub fn caputo_discrete(alpha: f64, z: &SampledPath) -> Result<SampledPath> {
    let kernel = KernelSamples::riemann_liouville(alpha, z.grid)?;
    Ok(caputo_with_kernel(&kernel, z))
}

/// [`caputo_discrete`] with precomputed kernel samples.
pub fn caputo_with_kernel(kernel: &KernelSamples, z: &SampledPath) -> SampledPath {
    let z0 = z.values[0];
    let shifted = SampledPath {
        grid: z.grid,
        values: z.values.iter().map(|v| v - z0).collect(),
    };
    let conv = conv_path(kernel, &shifted);
    let tau = z.grid.tau();
    let mut values = vec![0.0; conv.values.len()];
    for i in 1..values.len() {
        values[i] = (conv.values[i] - conv.values[i - 1]) / tau;
    }
    SampledPath {
        grid: z.grid,
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(t: f64, n: usize) -> TimeGrid {
        TimeGrid::new(t, n).unwrap()
    }

    #[test]
    fn kernel_values() {
        assert!((rl_kernel(0.5, 1.0).unwrap() - 1.0 / PI.sqrt()).abs() < 1e-15);
        for g in [0.1, 0.3, 0.9] {
            let want = 1.0 / gamma::gamma(1.0 - g);
            assert!((rl_kernel(g, 1.0).unwrap() - want).abs() < 1e-15);
        }
        assert!(rl_kernel(0.3, 2.0).unwrap() < rl_kernel(0.3, 1.0).unwrap());
    }

    #[test]
    fn kernel_domain_errors() {
        assert!(rl_kernel(0.5, 0.0).is_err());
        assert!(rl_kernel(0.5, -1.0).is_err());
        assert!(rl_kernel(0.0, 1.0).is_err());
        assert!(rl_kernel(1.0, 1.0).is_err());
    }

    #[test]
    fn kernel_samples_decrease_and_respect_lower_bound() {
        for (t, g) in [(0.5, 0.3), (1.0, 0.5), (4.0, 0.8)] {
            let k = KernelSamples::riemann_liouville(g, grid(t, 64)).unwrap();
            assert!(k.values().windows(2).all(|w| w[1] < w[0]));
            let lower = 1f64.min(t.powf(-g)) / gamma::gamma(1.0 - g);
            assert!(k.values().iter().all(|&v| v >= lower * (1.0 - 1e-15)));
        }
    }

    #[test]
    fn time_grid_nodes() {
        let g = grid(1.0, 3);
        assert_eq!(g.node(3), 1.0);
        assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
        assert!((g.tau() * 3.0 - 1.0).abs() < 1e-15);
        assert!(TimeGrid::new(0.0, 3).is_err());
        assert!(TimeGrid::new(1.0, 0).is_err());
    }

    #[test]
    fn delta_examples() {
        let g = grid(1.0, 8);
        let c = SampledPath::from_fn(g, |_| 3.0).unwrap();
        let id = SampledPath::from_fn(g, |t| t).unwrap();
        for i in 1..=8 {
            assert_eq!(delta(&c, i).unwrap(), 0.0);
            assert!((delta(&id, i).unwrap() - 1.0).abs() < 1e-12);
        }
        let p = SampledPath::new(grid(1.0, 2), vec![0.0, 1.0, 3.0]).unwrap();
        assert_eq!(delta(&p, 2).unwrap(), 4.0);
        assert!(matches!(delta(&p, 0), Err(Error::Index { .. })));
        assert!(matches!(delta(&p, 3), Err(Error::Index { .. })));
    }

    #[test]
    fn delta2_examples() {
        let g = grid(1.0, 8);
        let id = SampledPath::from_fn(g, |t| t).unwrap();
        let zero = SampledPath::zeros(g);
        for i in 1..=8 {
            assert!(delta2(&id, 1.0, i).unwrap().abs() < 1e-10);
            assert_eq!(delta2(&zero, 0.0, i).unwrap(), 0.0);
        }
        let sq = SampledPath::from_fn(grid(1.0, 4), |t| t * t).unwrap();
        assert!((delta2(&sq, 0.0, 1).unwrap() - 1.0).abs() < 1e-15);
        assert!(delta2(&sq, 0.0, 5).is_err());
    }

    #[test]
    fn discrete_conv_examples() {
        let g = grid(2.0, 5);
        let ones = KernelSamples::from_values(g, vec![1.0; 5]).unwrap();
        let z = SampledPath::from_fn(g, |_| 1.0).unwrap();
        for i in 1..=5 {
            assert!((discrete_conv(&ones, &z, i).unwrap() - i as f64 * g.tau()).abs() < 1e-14);
        }
        // z_0 = 1: node 0 is undefined
        assert!(matches!(discrete_conv(&ones, &z, 0), Err(Error::Contract(_))));
        let zero = SampledPath::zeros(g);
        for i in 0..=5 {
            assert_eq!(discrete_conv(&ones, &zero, i).unwrap(), 0.0);
        }
        let g3 = grid(3.0, 3);
        let k = KernelSamples::from_values(g3, vec![3.0, 2.0, 1.0]).unwrap();
        let z = SampledPath::new(g3, vec![0.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(discrete_conv(&k, &z, 3).unwrap(), 6.0);
    }

    #[test]
    fn frac_integral_examples() {
        let g = grid(1.0, 16);
        let zero = SampledPath::zeros(g);
        assert_eq!(frac_integral(0.7, &zero).unwrap().max_abs(), 0.0);
        let one = SampledPath::from_fn(g, |_| 1.0).unwrap();
        let i1 = frac_integral(1.0, &one).unwrap();
        for (i, v) in i1.values().iter().enumerate() {
            assert!((v - i as f64 * g.tau()).abs() < 1e-14);
        }
        assert!(frac_integral(0.0, &one).is_err());
        assert!(frac_integral(-1.0, &one).is_err());
    }

    #[test]
    fn half_integral_twice_approaches_plain_integral() {
        let mut prev = f64::INFINITY;
        for n in [16, 32, 64, 128, 256] {
            let g = grid(1.0, n);
            let one = SampledPath::from_fn(g, |_| 1.0).unwrap();
            let twice = frac_integral(0.5, &frac_integral(0.5, &one).unwrap()).unwrap();
            let t = SampledPath::from_fn(g, |t| t).unwrap();
            let err = twice.max_abs_diff(&t);
            assert!(err < prev, "n = {n}: {err} >= {prev}");
            prev = err;
        }
    }

    #[test]
    fn caputo_of_constant_is_zero() {
        let g = grid(1.0, 32);
        let c = SampledPath::from_fn(g, |_| 2.5).unwrap();
        assert_eq!(caputo_discrete(0.4, &c).unwrap().max_abs(), 0.0);
        assert!(caputo_discrete(1.2, &c).is_err());
    }

    #[test]
    fn caputo_of_identity_converges_to_closed_form() {
        // D^{1/2} t = 2 sqrt(t / π)
        let mut prev = f64::INFINITY;
        for n in [16, 32, 64, 128, 256] {
            let g = grid(1.0, n);
            let id = SampledPath::from_fn(g, |t| t).unwrap();
            let d = caputo_discrete(0.5, &id).unwrap();
            let exact = SampledPath::from_fn(g, |t| 2.0 * (t / PI).sqrt()).unwrap();
            let err = d.values()[1..]
                .iter()
                .zip(&exact.values()[1..])
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            assert!(err < prev, "n = {n}");
            prev = err;
        }
    }

    #[test]
    fn caputo_equals_convolution_of_differences() {
        let g = grid(1.5, 20);
        let z = SampledPath::from_fn(g, |t| (3.0 * t).sin() + t * t).unwrap();
        let k = KernelSamples::riemann_liouville(0.35, g).unwrap();
        let lhs = caputo_with_kernel(&k, &z);
        let dz = delta_path(&z, 0.0);
        let rhs = conv_path(&k, &dz);
        for i in 1..=20 {
            assert!((lhs.values()[i] - rhs.values()[i]).abs() < 1e-12 * rhs.max_abs().max(1.0));
        }
    }
}
