//! Expected-utility portfolio choice with a piecewise linear Bernoulli
//! utility: evaluation, the Lipschitz bound on the objective, projected
//! subgradient ascent and a sampled Clarke stationarity certificate.
//!
//! The objective is `F(α) = sum_k p_k u(α · a_k)` over portfolios `α` with
//! `π · α ≤ W`, optionally inside a box.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{dot, norm2};
use crate::parallel::par_map;
use crate::random::{derive_seed, rng};
use crate::solver::{solve_lp, LinearProgram, LpSolution, Relation};

/// Finitely many return vectors with their probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub returns: Vec<Vec<f64>>,
    pub probs: Vec<f64>,
}

impl Scenario {
    pub fn new(returns: Vec<Vec<f64>>, probs: Vec<f64>) -> Result<Self> {
        let s = Scenario { returns, probs };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.returns.is_empty() {
            return Err(Error::DimensionMismatch("a scenario needs at least one outcome".into()));
        }
        if self.returns.len() != self.probs.len() {
            return Err(Error::LengthMismatch {
                expected: self.returns.len(),
                got: self.probs.len(),
            });
        }
        let n = self.returns[0].len();
        if let Some(r) = self.returns.iter().find(|r| r.len() != n) {
            return Err(Error::LengthMismatch { expected: n, got: r.len() });
        }
        if self.returns.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::DimensionMismatch("return entries must be finite".into()));
        }
        if self.probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidProbability("scenario probabilities must be nonnegative".into()));
        }
        let total: f64 = self.probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 * self.probs.len() as f64 {
            return Err(Error::InvalidProbability(format!("scenario probabilities sum to {total}")));
        }
        Ok(())
    }

    /// Number of assets.
    pub fn dim(&self) -> usize {
        self.returns[0].len()
    }
}

/// Continuous piecewise linear utility. `slopes[0]` applies left of the
/// first breakpoint and `slopes[i]` right of breakpoint `i - 1`; the value
/// at zero is `offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiecewiseLinearUtility {
    pub breakpoints: Vec<f64>,
    pub slopes: Vec<f64>,
    #[serde(default)]
    pub offset: f64,
}

impl PiecewiseLinearUtility {
    pub fn new(breakpoints: Vec<f64>, slopes: Vec<f64>, offset: f64) -> Result<Self> {
        let u = PiecewiseLinearUtility {
            breakpoints,
            slopes,
            offset,
        };
        u.validate()?;
        Ok(u)
    }

    pub fn linear(slope: f64) -> Self {
        PiecewiseLinearUtility {
            breakpoints: Vec::new(),
            slopes: vec![slope],
            offset: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.slopes.len() != self.breakpoints.len() + 1 {
            return Err(Error::LengthMismatch {
                expected: self.breakpoints.len() + 1,
                got: self.slopes.len(),
            });
        }
        let finite = self.breakpoints.iter().chain(&self.slopes).all(|x| x.is_finite()) && self.offset.is_finite();
        if !finite {
            return Err(Error::DimensionMismatch("utility parameters must be finite".into()));
        }
        if self.breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::DimensionMismatch("breakpoints must be strictly increasing".into()));
        }
        Ok(())
    }

    fn segment(&self, i: usize) -> (f64, f64) {
        let lo = if i == 0 { f64::NEG_INFINITY } else { self.breakpoints[i - 1] };
        let hi = self.breakpoints.get(i).copied().unwrap_or(f64::INFINITY);
        (lo, hi)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (a, b, sign) = if x >= 0.0 { (0.0, x, 1.0) } else { (x, 0.0, -1.0) };
        let mut acc = 0.0;
        for (i, s) in self.slopes.iter().enumerate() {
            let (lo, hi) = self.segment(i);
            let overlap = b.min(hi) - a.max(lo);
            if overlap > 0.0 {
                acc += s * overlap;
            }
        }
        self.offset + sign * acc
    }

    /// Largest absolute slope.
    pub fn lip(&self) -> f64 {
        self.slopes.iter().fold(0.0, |m, s| m.max(s.abs()))
    }

    pub fn is_concave(&self) -> bool {
        self.slopes.windows(2).all(|w| w[0] >= w[1])
    }

    fn kink_at(&self, x: f64) -> Option<usize> {
        self.breakpoints.iter().position(|b| (x - b).abs() <= 1e-12 * (1.0 + b.abs()))
    }

    /// A slope active at `x`; at a breakpoint, the mean of the two adjacent
    /// slopes.
    pub fn subgradient(&self, x: f64) -> f64 {
        if let Some(i) = self.kink_at(x) {
            return 0.5 * (self.slopes[i] + self.slopes[i + 1]);
        }
        let i = self.breakpoints.partition_point(|b| *b <= x);
        self.slopes[i]
    }

    /// The generalized gradient of `u` at `x`: one slope away from the
    /// breakpoints, the interval between adjacent slopes on them.
    pub fn clarke_interval(&self, x: f64) -> (f64, f64) {
        if let Some(i) = self.kink_at(x) {
            let (a, b) = (self.slopes[i], self.slopes[i + 1]);
            return (a.min(b), a.max(b));
        }
        let s = self.subgradient(x);
        (s, s)
    }

    /// `u(t) / t` as `t → ±∞`: the outer slopes.
    fn outer_slopes(&self) -> (f64, f64) {
        (self.slopes[0], self.slopes[self.slopes.len() - 1])
    }
}

fn ensure_dim(alpha: &[f64], scenario: &Scenario) -> Result<()> {
    if alpha.len() != scenario.dim() {
        return Err(Error::DimensionMismatch(format!(
            "portfolio has {} assets, scenario has {}",
            alpha.len(),
            scenario.dim()
        )));
    }
    Ok(())
}

/// `F(α) = sum_k p_k u(α · a_k)`.
pub fn eval_f(alpha: &[f64], scenario: &Scenario, u: &PiecewiseLinearUtility) -> Result<f64> {
    ensure_dim(alpha, scenario)?;
    Ok(scenario
        .returns
        .iter()
        .zip(&scenario.probs)
        .map(|(a, p)| p * u.eval(dot(alpha, a)))
        .sum())
}

/// `sum_k p_k s_k a_k` with `s_k` the selected slope at `α · a_k`.
pub fn subgradient_f(alpha: &[f64], scenario: &Scenario, u: &PiecewiseLinearUtility) -> Result<Vec<f64>> {
    ensure_dim(alpha, scenario)?;
    let mut g = vec![0.0; alpha.len()];
    for (a, p) in scenario.returns.iter().zip(&scenario.probs) {
        let s = p * u.subgradient(dot(alpha, a));
        g.iter_mut().zip(a).for_each(|(gi, ai)| *gi += s * ai);
    }
    Ok(g)
}

/// `K = L(u) · sum_k p_k ‖a_k‖`, so that `|F(α) - F(β)| ≤ K ‖α - β‖`.
pub fn lipschitz_bound_f(scenario: &Scenario, u: &PiecewiseLinearUtility) -> f64 {
    u.lip() * scenario.returns.iter().zip(&scenario.probs).map(|(a, p)| p * norm2(a)).sum::<f64>()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortfolioOptions {
    pub iterations: usize,
    /// Per-asset `(lower, upper)` holdings. Required for non-concave `u`.
    pub bounding_box: Option<Vec<(f64, f64)>>,
    /// Multistart count for non-concave `u`.
    pub starts: usize,
    pub seed: u64,
}

impl Default for PortfolioOptions {
    fn default() -> Self {
        PortfolioOptions {
            iterations: 10_000,
            bounding_box: None,
            starts: 8,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PortfolioSolution {
    pub alpha: Vec<f64>,
    pub value: f64,
    /// Euclidean norm of the best convex combination of sampled nearby
    /// subgradients, after subtracting the normal cone of the active
    /// constraints.
    pub certificate_norm: f64,
    /// `certificate_norm ≤ 1e-4 · K`.
    pub certified: bool,
    pub lipschitz_bound: f64,
    pub concave: bool,
    pub best_start: usize,
    /// Best value so far, recorded every 100 iterations of the winning start.
    pub history: Vec<f64>,
}

/// Feasible set `{α : π · α ≤ W}`, optionally intersected with a box.
struct Feasible<'a> {
    prices: &'a [f64],
    wealth: f64,
    bounds: Option<&'a [(f64, f64)]>,
}

impl Feasible<'_> {
    fn clip(&self, y: &[f64]) -> Vec<f64> {
        match self.bounds {
            Some(b) => y.iter().zip(b).map(|(v, (lo, hi))| v.clamp(*lo, *hi)).collect(),
            None => y.to_vec(),
        }
    }

    fn project(&self, y: &[f64]) -> Vec<f64> {
        let x = self.clip(y);
        if dot(self.prices, &x) <= self.wealth {
            return x;
        }
        if self.bounds.is_none() {
            let excess = (dot(self.prices, y) - self.wealth) / dot(self.prices, self.prices);
            return y.iter().zip(self.prices).map(|(v, p)| v - excess * p).collect();
        }
        // π · clip(y - θπ) is nonincreasing in θ; bracket then bisect.
        let at = |theta: f64| {
            let shifted: Vec<f64> = y.iter().zip(self.prices).map(|(v, p)| v - theta * p).collect();
            self.clip(&shifted)
        };
        let mut hi = 1.0;
        while dot(self.prices, &at(hi)) > self.wealth && hi < 1e300 {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if dot(self.prices, &at(mid)) > self.wealth {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-16 * hi {
                break;
            }
        }
        at(hi)
    }

    fn min_budget(&self) -> f64 {
        match self.bounds {
            Some(b) => self
                .prices
                .iter()
                .zip(b)
                .map(|(p, (lo, hi))| if *p > 0.0 { p * lo } else { p * hi })
                .sum(),
            None => f64::NEG_INFINITY,
        }
    }
}

/// Whether some direction `d` with `π · d ≤ 0` increases `F` without bound,
/// for concave `u` without a box.
fn unbounded_direction(scenario: &Scenario, u: &PiecewiseLinearUtility, prices: &[f64]) -> Result<bool> {
    let n = scenario.dim();
    let m = scenario.returns.len();
    let (left, right) = u.outer_slopes();
    // Variables (d, z): max sum p_k z_k, z_k ≤ s · (d · a_k) for both outer
    // slopes, π · d ≤ 0, -1 ≤ d ≤ 1.
    let mut obj = vec![0.0; n];
    obj.extend(scenario.probs.iter().copied());
    let mut lp = LinearProgram::maximize(obj);
    lp.set_all_free();
    for (k, a) in scenario.returns.iter().enumerate() {
        for s in [left, right] {
            let mut row: Vec<f64> = a.iter().map(|x| -s * x).collect();
            row.extend((0..m).map(|j| if j == k { 1.0 } else { 0.0 }));
            lp.add(row, Relation::Le, 0.0);
        }
    }
    let mut row = prices.to_vec();
    row.extend(vec![0.0; m]);
    lp.add(row, Relation::Le, 0.0);
    for i in 0..n {
        let mut row = vec![0.0; n + m];
        row[i] = 1.0;
        lp.add(row.clone(), Relation::Le, 1.0);
        lp.add(row, Relation::Ge, -1.0);
    }
    match solve_lp(&lp)? {
        LpSolution::Optimal(opt) => Ok(opt.objective > 1e-9 * (1.0 + lipschitz_bound_f(scenario, u))),
        _ => Err(Error::NumericalBreakdown("recession program did not solve".into())),
    }
}

struct Run {
    alpha: Vec<f64>,
    value: f64,
    history: Vec<f64>,
}

/// Projected subgradient ascent with normalized steps: `1/√t` for the first
/// half, then geometric decay restarted from the best iterate.
fn ascend(x0: Vec<f64>, scenario: &Scenario, u: &PiecewiseLinearUtility, set: &Feasible, scale: f64, iterations: usize) -> Result<Run> {
    let mut x = set.project(&x0);
    let mut best_x = x.clone();
    let mut best = eval_f(&x, scenario, u)?;
    let mut history = vec![best];
    let t1 = iterations / 2;
    let t2 = iterations - t1;
    let decay = (1e-6f64.ln() / t2.max(1) as f64).exp();
    let s0 = scale / (t1.max(1) as f64).sqrt();
    for t in 1..=iterations {
        if t == t1 + 1 {
            x = best_x.clone();
        }
        let step = if t <= t1 {
            scale / (t as f64).sqrt()
        } else {
            s0 * decay.powi((t - t1 - 1) as i32)
        };
        let g = subgradient_f(&x, scenario, u)?;
        let gn = norm2(&g);
        if gn == 0.0 {
            break;
        }
        let y: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi + step * gi / gn).collect();
        x = set.project(&y);
        let v = eval_f(&x, scenario, u)?;
        if v > best {
            best = v;
            best_x = x.clone();
        }
        if t % 100 == 0 {
            history.push(best);
        }
    }
    Ok(Run {
        alpha: best_x,
        value: best,
        history,
    })
}

/// Smallest residual `‖sum_j λ_j g_j - sum_k μ_k ν_k‖` over convex weights
/// `λ` on subgradients sampled around `x` and nonnegative weights `μ` on
/// the outward normals `ν_k` of the constraints active at `x`.
fn clarke_certificate(x: &[f64], scenario: &Scenario, u: &PiecewiseLinearUtility, set: &Feasible, scale: f64, seed: u64) -> Result<f64> {
    let n = x.len();
    let radius = 1e-6 * scale;
    let mut r = rng(derive_seed(seed, "clarke"));
    let mut grads = vec![subgradient_f(x, scenario, u)?];
    for _ in 0..4 * (n + 1) {
        let y: Vec<f64> = x.iter().map(|xi| xi + radius * (2.0 * r.gen::<f64>() - 1.0)).collect();
        grads.push(subgradient_f(&y, scenario, u)?);
    }
    let mut normals: Vec<Vec<f64>> = Vec::new();
    let pn = norm2(set.prices);
    if set.wealth - dot(set.prices, x) <= radius * pn {
        normals.push(set.prices.to_vec());
    }
    if let Some(b) = set.bounds {
        for (i, (lo, hi)) in b.iter().enumerate() {
            let mut e = vec![0.0; n];
            if x[i] - lo <= radius {
                e[i] = -1.0;
                normals.push(e.clone());
            }
            if hi - x[i] <= radius {
                e[i] = 1.0;
                normals.push(e);
            }
        }
    }
    // Variables (λ, μ, t): min t with -t ≤ residual_i ≤ t.
    let (nl, nm) = (grads.len(), normals.len());
    let mut obj = vec![0.0; nl + nm];
    obj.push(1.0);
    let mut lp = LinearProgram::minimize(obj);
    for i in 0..n {
        let mut row: Vec<f64> = grads.iter().map(|g| g[i]).collect();
        row.extend(normals.iter().map(|v| -v[i]));
        let mut up = row.clone();
        up.push(-1.0);
        lp.add(up, Relation::Le, 0.0);
        row.push(1.0);
        lp.add(row, Relation::Ge, 0.0);
    }
    let mut simplex = vec![1.0; nl];
    simplex.extend(vec![0.0; nm + 1]);
    lp.add(simplex, Relation::Eq, 1.0);
    match solve_lp(&lp)? {
        LpSolution::Optimal(opt) => {
            let w = &opt.primal;
            let resid: Vec<f64> = (0..n)
                .map(|i| {
                    grads.iter().zip(&w[..nl]).map(|(g, l)| l * g[i]).sum::<f64>()
                        - normals.iter().zip(&w[nl..nl + nm]).map(|(v, m)| m * v[i]).sum::<f64>()
                })
                .collect();
            Ok(norm2(&resid))
        }
        _ => Err(Error::NumericalBreakdown("certificate program did not solve".into())),
    }
}

/// Maximize `F` over `π · α ≤ W` (and the box, when given).
pub fn maximize_portfolio(
    scenario: &Scenario,
    u: &PiecewiseLinearUtility,
    prices: &[f64],
    wealth: f64,
    options: &PortfolioOptions,
) -> Result<PortfolioSolution> {
    scenario.validate()?;
    u.validate()?;
    let n = scenario.dim();
    ensure_dim(prices, scenario)?;
    if !wealth.is_finite() || prices.iter().any(|p| !p.is_finite()) {
        return Err(Error::DimensionMismatch("prices and wealth must be finite".into()));
    }
    if !prices.iter().any(|p| *p > 0.0) {
        return Err(Error::PreconditionViolated("at least one price must be positive".into()));
    }
    let bounds = options.bounding_box.as_deref();
    if let Some(b) = bounds {
        ensure_dim(&b.iter().map(|_| 0.0).collect::<Vec<_>>(), scenario)?;
        if b.iter().any(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo <= hi)) {
            return Err(Error::DimensionMismatch("box bounds must be finite with lower ≤ upper".into()));
        }
    }
    let concave = u.is_concave();
    if !concave && bounds.is_none() {
        return Err(Error::BoxRequired);
    }
    let set = Feasible { prices, wealth, bounds };
    if set.min_budget() > wealth {
        return Err(Error::Infeasible);
    }
    if bounds.is_none() && unbounded_direction(scenario, u, prices)? {
        return Err(Error::Unbounded);
    }
    let min_price = prices.iter().filter(|p| **p > 0.0).fold(f64::INFINITY, |m, p| m.min(*p));
    let mut scale = 1.0f64.max(wealth.abs() / min_price);
    if let Some(b) = bounds {
        scale = b.iter().fold(scale, |s, (lo, hi)| s.max(hi - lo));
    }
    let center: Vec<f64> = match bounds {
        Some(b) => b.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect(),
        None => vec![0.0; n],
    };
    let mut starts = vec![center];
    if !concave {
        let b = bounds.expect("checked above");
        for i in 1..options.starts.max(1) {
            let mut r = rng(derive_seed(options.seed, &format!("start{i}")));
            starts.push(b.iter().map(|(lo, hi)| lo + (hi - lo) * r.gen::<f64>()).collect());
        }
    }
    let runs = par_map(&starts, |x0| ascend(x0.clone(), scenario, u, &set, scale, options.iterations));
    let mut best: Option<(usize, Run)> = None;
    for (i, run) in runs.into_iter().enumerate() {
        let run = run?;
        if best.as_ref().is_none_or(|(_, b)| run.value > b.value) {
            best = Some((i, run));
        }
    }
    let (best_start, run) = best.expect("at least one start");
    let k = lipschitz_bound_f(scenario, u);
    let certificate_norm = clarke_certificate(&run.alpha, scenario, u, &set, scale, options.seed)?;
    Ok(PortfolioSolution {
        certified: certificate_norm <= 1e-4 * k,
        alpha: run.alpha,
        value: run.value,
        certificate_norm,
        lipschitz_bound: k,
        concave,
        best_start,
        history: run.history,
    })
}

/// Dense grid search for one asset over `[lo, hi]`, refined twice around
/// the best grid point.
pub fn grid_oracle_1d(scenario: &Scenario, u: &PiecewiseLinearUtility, lo: f64, hi: f64) -> Result<(f64, f64)> {
    if scenario.dim() != 1 {
        return Err(Error::DimensionMismatch("the grid search handles one asset".into()));
    }
    let f = |x: f64| eval_f(&[x], scenario, u);
    let (mut a, mut b) = (lo, hi);
    let mut best = (lo, f(lo)?);
    for points in [20_001usize, 2_001, 2_001] {
        let h = (b - a) / (points - 1) as f64;
        for i in 0..points {
            let x = a + h * i as f64;
            let v = f(x)?;
            if v > best.1 {
                best = (x, v);
            }
        }
        a = (best.0 - 2.0 * h).max(lo);
        b = (best.0 + 2.0 * h).min(hi);
    }
    Ok(best)
}

fn constraint_rows(lp: &mut LinearProgram, prices: &[f64], wealth: f64, bounds: Option<&[(f64, f64)]>, width: usize) {
    let n = prices.len();
    let mut row = prices.to_vec();
    row.resize(width, 0.0);
    lp.add(row, Relation::Le, wealth);
    if let Some(b) = bounds {
        for (i, (lo, hi)) in b.iter().enumerate().take(n) {
            let mut row = vec![0.0; width];
            row[i] = 1.0;
            lp.add(row.clone(), Relation::Le, *hi);
            lp.add(row, Relation::Ge, *lo);
        }
    }
}

/// For linear `u`: `F` is linear in `α` and the problem is one LP.
pub fn linear_oracle(
    scenario: &Scenario,
    u: &PiecewiseLinearUtility,
    prices: &[f64],
    wealth: f64,
    bounds: Option<&[(f64, f64)]>,
) -> Result<(Vec<f64>, f64)> {
    if !u.breakpoints.is_empty() {
        return Err(Error::PreconditionViolated("the linear oracle needs a utility without breakpoints".into()));
    }
    let n = scenario.dim();
    let s = u.slopes[0];
    let mut c = vec![0.0; n];
    for (a, p) in scenario.returns.iter().zip(&scenario.probs) {
        c.iter_mut().zip(a).for_each(|(ci, ai)| *ci += s * p * ai);
    }
    let mut lp = LinearProgram::maximize(c);
    lp.set_all_free();
    constraint_rows(&mut lp, prices, wealth, bounds, n);
    match solve_lp(&lp)? {
        LpSolution::Optimal(opt) => Ok((opt.primal, opt.objective + u.offset)),
        LpSolution::Unbounded(_) => Err(Error::Unbounded),
        LpSolution::Infeasible(_) => Err(Error::Infeasible),
    }
}

/// For concave `u`: maximize `sum_k p_k z_k` with `z_k` below every affine
/// piece of `u` at `α · a_k`.
pub fn epigraph_oracle(
    scenario: &Scenario,
    u: &PiecewiseLinearUtility,
    prices: &[f64],
    wealth: f64,
    bounds: Option<&[(f64, f64)]>,
) -> Result<(Vec<f64>, f64)> {
    if !u.is_concave() {
        return Err(Error::PreconditionViolated("the epigraph program needs a concave utility".into()));
    }
    let n = scenario.dim();
    let m = scenario.returns.len();
    let mut obj = vec![0.0; n];
    obj.extend(scenario.probs.iter().copied());
    let mut lp = LinearProgram::maximize(obj);
    lp.set_all_free();
    for (j, s) in u.slopes.iter().enumerate() {
        let anchor = if j == 0 {
            u.breakpoints.first().copied().unwrap_or(0.0)
        } else {
            u.breakpoints[j - 1]
        };
        let intercept = u.eval(anchor) - s * anchor;
        for (k, a) in scenario.returns.iter().enumerate() {
            let mut row: Vec<f64> = a.iter().map(|x| -s * x).collect();
            row.extend((0..m).map(|i| if i == k { 1.0 } else { 0.0 }));
            lp.add(row, Relation::Le, intercept);
        }
    }
    constraint_rows(&mut lp, prices, wealth, bounds, n + m);
    match solve_lp(&lp)? {
        LpSolution::Optimal(opt) => Ok((opt.primal[..n].to_vec(), opt.objective)),
        LpSolution::Unbounded(_) => Err(Error::Unbounded),
        LpSolution::Infeasible(_) => Err(Error::Infeasible),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinked() -> PiecewiseLinearUtility {
        PiecewiseLinearUtility::new(vec![1.0], vec![1.0, 0.2], 0.0).unwrap()
    }

    #[test]
    fn utility_pieces() {
        let u = PiecewiseLinearUtility::new(vec![-1.0, 2.0], vec![3.0, 1.0, -0.5], 0.5).unwrap();
        assert_eq!(u.eval(0.0), 0.5);
        assert_eq!(u.eval(2.0), 2.5);
        assert_eq!(u.eval(4.0), 1.5);
        assert_eq!(u.eval(-1.0), -0.5);
        assert_eq!(u.eval(-2.0), -3.5);
        assert_eq!(u.lip(), 3.0);
        assert!(u.is_concave());
        assert_eq!(u.subgradient(2.0), 0.25);
        assert_eq!(u.clarke_interval(2.0), (-0.5, 1.0));
        assert_eq!(u.subgradient(1.0), 1.0);
        assert!(PiecewiseLinearUtility::new(vec![1.0, 0.0], vec![1.0, 1.0, 1.0], 0.0).is_err());
        assert!(PiecewiseLinearUtility::new(vec![1.0], vec![1.0], 0.0).is_err());
    }

    #[test]
    fn objective_values() {
        let id = PiecewiseLinearUtility::linear(1.0);
        let sc = Scenario::new(vec![vec![1.0, 2.0], vec![-1.0, 0.5]], vec![0.25, 0.75]).unwrap();
        assert_eq!(eval_f(&[0.0, 0.0], &sc, &id).unwrap(), 0.0);
        // 0.25 * (1 + 4) + 0.75 * (-1 + 1) = 1.25
        assert_eq!(eval_f(&[1.0, 2.0], &sc, &id).unwrap(), 1.25);
        let u = kinked();
        // 0.25 * u(5) + 0.75 * u(0) = 0.25 * (1 + 0.8)
        assert!((eval_f(&[1.0, 2.0], &sc, &u).unwrap() - 0.45).abs() < 1e-15);
        let one = Scenario::new(vec![vec![0.6, 0.8]], vec![1.0]).unwrap();
        assert_eq!(lipschitz_bound_f(&one, &id), 1.0);
        let zero = Scenario::new(vec![vec![0.0, 0.0]], vec![1.0]).unwrap();
        assert_eq!(lipschitz_bound_f(&zero, &u), 0.0);
        assert!(matches!(eval_f(&[1.0], &sc, &u), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn one_asset_with_a_kink_matches_the_grid() {
        let sc = Scenario::new(vec![vec![1.5], vec![0.5]], vec![0.5, 0.5]).unwrap();
        let u = kinked();
        let sol = maximize_portfolio(&sc, &u, &[1.0], 2.0, &PortfolioOptions::default()).unwrap();
        let (x, v) = grid_oracle_1d(&sc, &u, -10.0, 2.0).unwrap();
        assert!((sol.value - v).abs() <= 1e-4 * (1.0 + v.abs()), "{} vs {}", sol.value, v);
        assert!((sol.alpha[0] - x).abs() < 1e-3);
        let (_, lp) = epigraph_oracle(&sc, &u, &[1.0], 2.0, None).unwrap();
        assert!((lp - v).abs() < 1e-6);
        assert!(sol.certified, "{}", sol.certificate_norm);
        assert!(sol.history.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn linear_utility_matches_the_lp() {
        let sc = Scenario::new(vec![vec![1.2, 0.9, 1.0], vec![0.8, 1.3, 1.0]], vec![0.5, 0.5]).unwrap();
        let u = PiecewiseLinearUtility::linear(1.0);
        let opts = PortfolioOptions {
            bounding_box: Some(vec![(0.0, 1.0); 3]),
            ..PortfolioOptions::default()
        };
        let prices = [1.0, 1.0, 0.5];
        let sol = maximize_portfolio(&sc, &u, &prices, 1.5, &opts).unwrap();
        let (_, v) = linear_oracle(&sc, &u, &prices, 1.5, opts.bounding_box.as_deref()).unwrap();
        assert!((sol.value - v).abs() <= 1e-4 * (1.0 + v.abs()), "{} vs {}", sol.value, v);
    }

    #[test]
    fn zero_wealth_keeps_the_empty_portfolio() {
        let sc = Scenario::new(vec![vec![1.0], vec![-1.0]], vec![0.5, 0.5]).unwrap();
        let u = PiecewiseLinearUtility::new(vec![0.0], vec![2.0, 1.0], 0.0).unwrap();
        let sol = maximize_portfolio(&sc, &u, &[1.0], 0.0, &PortfolioOptions::default()).unwrap();
        assert!(sol.alpha[0].abs() < 1e-6, "{:?}", sol.alpha);
        assert!(sol.value.abs() < 1e-6);
    }

    #[test]
    fn unbounded_and_unsupported_cases() {
        let sc = Scenario::new(vec![vec![1.0, 2.0]], vec![1.0]).unwrap();
        let id = PiecewiseLinearUtility::linear(1.0);
        // Short the first asset, buy the second: π · d = 0 but F grows.
        assert_eq!(
            maximize_portfolio(&sc, &id, &[1.0, 1.0], 1.0, &PortfolioOptions::default()).unwrap_err(),
            Error::Unbounded
        );
        let convex = PiecewiseLinearUtility::new(vec![0.0], vec![0.5, 1.0], 0.0).unwrap();
        assert_eq!(
            maximize_portfolio(&sc, &convex, &[1.0, 1.0], 1.0, &PortfolioOptions::default()).unwrap_err(),
            Error::BoxRequired
        );
        let boxed = PortfolioOptions {
            bounding_box: Some(vec![(1.0, 2.0), (1.0, 2.0)]),
            ..PortfolioOptions::default()
        };
        assert_eq!(
            maximize_portfolio(&sc, &id, &[1.0, 1.0], 1.0, &boxed).unwrap_err(),
            Error::Infeasible
        );
    }

    #[test]
    fn non_concave_multistart_is_deterministic() {
        let sc = Scenario::new(vec![vec![1.0, -0.5], vec![-0.3, 1.0]], vec![0.5, 0.5]).unwrap();
        let u = PiecewiseLinearUtility::new(vec![-0.5, 0.5], vec![1.0, 0.2, 1.5], 0.0).unwrap();
        let opts = PortfolioOptions {
            bounding_box: Some(vec![(-1.0, 1.0), (-1.0, 1.0)]),
            ..PortfolioOptions::default()
        };
        let a = maximize_portfolio(&sc, &u, &[1.0, 1.0], 1.0, &opts).unwrap();
        let b = maximize_portfolio(&sc, &u, &[1.0, 1.0], 1.0, &opts).unwrap();
        assert_eq!(a, b);
        assert!(!a.concave);
        assert!(a.alpha.iter().all(|x| (-1.0..=1.0).contains(x)));
        assert!(a.alpha.iter().sum::<f64>() <= 1.0 + 1e-12);
    }
}
