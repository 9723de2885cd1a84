//! Solutions of the half-normal Stein equation `f'(x) - x f(x) = h(x) - mu(h)`
//! on `[0, inf)`, the auxiliary functions used to bound them, and grid
//! certification of those bounds.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::{normal_sf, phi, HalfNormal, INV_SQRT_2PI, SQRT_2_OVER_PI, Z_075};
use crate::error::{domain, Error, Result};
use crate::quadrature::integrate;
use crate::search::{golden_section_max, sup_search, SearchOptions, Supremum};

/// Upper truncation offset for the right-tail integral; `phi(x + 12) / phi(x) < 1e-31`.
const TAIL_SPAN: f64 = 12.0;
const QUAD_TOL: f64 = 1e-13;
/// Central-difference step for first derivatives.
pub const FD_STEP: f64 = 1e-5;
/// Central-difference step for second derivatives.
pub const FD2_STEP: f64 = 1e-3;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A test function `h` on `[0, inf)`.
#[derive(Clone)]
pub enum TestFunction {
    /// Lipschitz `h` with known constant. `range` holds `(inf h, sup h)` when
    /// `h` is bounded.
    Lipschitz {
        name: String,
        h: RealFn,
        lipschitz_constant: f64,
        range: Option<(f64, f64)>,
    },
    /// `h_z = 1_{(-inf, z]}`.
    HalfLineIndicator { z: f64 },
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFunction::Lipschitz {
                name,
                lipschitz_constant,
                ..
            } => write!(f, "Lipschitz({name}, L = {lipschitz_constant})"),
            TestFunction::HalfLineIndicator { z } => write!(f, "HalfLineIndicator({z})"),
        }
    }
}

impl TestFunction {
    pub fn lipschitz(
        name: impl Into<String>,
        lipschitz_constant: f64,
        h: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        TestFunction::Lipschitz {
            name: name.into(),
            h: Arc::new(h),
            lipschitz_constant,
            range: None,
        }
    }

    /// Attaches `(inf h, sup h)` to a Lipschitz function.
    pub fn with_range(self, lo: f64, hi: f64) -> Self {
        match self {
            TestFunction::Lipschitz {
                name,
                h,
                lipschitz_constant,
                ..
            } => TestFunction::Lipschitz {
                name,
                h,
                lipschitz_constant,
                range: Some((lo, hi)),
            },
            other => other,
        }
    }

    pub fn indicator(z: f64) -> Result<Self> {
        if !(z >= 0.0 && z.is_finite()) {
            return domain(format!(
                "indicator threshold must be finite and >= 0, got {z}"
            ));
        }
        Ok(TestFunction::HalfLineIndicator { z })
    }

    /// `h(x) = x`.
    pub fn identity() -> Self {
        TestFunction::lipschitz("identity", 1.0, |x| x)
    }

    /// `h(x) = min(x, 1)`.
    pub fn min_one() -> Self {
        TestFunction::lipschitz("min(x,1)", 1.0, |x: f64| x.min(1.0)).with_range(0.0, 1.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            TestFunction::Lipschitz { h, .. } => h(x),
            TestFunction::HalfLineIndicator { z } => {
                if x <= *z {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            TestFunction::Lipschitz { name, .. } => name.clone(),
            TestFunction::HalfLineIndicator { z } => format!("indicator(z={z})"),
        }
    }
}

/// `mu(h) = E[h(Y)]` for half-normal `Y`.
pub fn mu_h(h: &TestFunction) -> f64 {
    match h {
        TestFunction::HalfLineIndicator { z } => HalfNormal::cdf(*z),
        TestFunction::Lipschitz { h, .. } => {
            integrate(|t| h(t) * 2.0 * phi(t), 0.0, TAIL_SPAN, 1e-13).value
        }
    }
}

/// Closed-form `f_z(x) = (F(x ^ z) - F(x) F(z)) / p(x)` for the indicator `h_z`.
pub fn fz(z: f64, x: f64) -> f64 {
    if x <= 0.0 || z <= 0.0 {
        return 0.0;
    }
    if x <= z {
        HalfNormal::sf(z) * aux_m(x)
    } else {
        HalfNormal::cdf(z) * aux_n(x)
    }
}

/// Which one-sided limit to take at the jump of `f_z'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// `f_z'(x) = x f_z(x) + 1_{x <= z} - F(z)`. At `x = z` the derivative
/// jumps; [`Error::Jump`] carries both one-sided values.
pub fn fz_prime(z: f64, x: f64) -> Result<f64> {
    if x < 0.0 || z < 0.0 {
        return domain(format!("f_z' needs z, x >= 0, got z = {z}, x = {x}"));
    }
    if x == z {
        return Err(Error::Jump {
            left: fz_prime_one_sided(z, x, Side::Left),
            right: fz_prime_one_sided(z, x, Side::Right),
        });
    }
    Ok(x * fz(z, x) + if x < z { 1.0 } else { 0.0 } - HalfNormal::cdf(z))
}

/// One-sided derivative of `f_z` at `x`.
pub fn fz_prime_one_sided(z: f64, x: f64, side: Side) -> f64 {
    let below = match side {
        Side::Left => x <= z,
        Side::Right => x < z,
    };
    if below {
        x * fz(z, x) + HalfNormal::sf(z)
    } else {
        x * fz(z, x) - HalfNormal::cdf(z)
    }
}

/// `f_z'` through `(1 - F(z)) H(x) / p(x)` (left of `z`) or `-F(z) G(x) / p(x)`.
pub fn fz_prime_hg(z: f64, x: f64, side: Side) -> f64 {
    let below = match side {
        Side::Left => x <= z,
        Side::Right => x < z,
    };
    let p = 2.0 * phi(x);
    if below {
        HalfNormal::sf(z) * aux_h(x) / p
    } else {
        -HalfNormal::cdf(z) * aux_g(x) / p
    }
}

/// The standard solution `f_h` with `mu(h)` cached.
#[derive(Debug, Clone)]
pub struct SteinSolution {
    test_function: TestFunction,
    mu: f64,
}

impl SteinSolution {
    pub fn new(test_function: TestFunction) -> Self {
        let mu = mu_h(&test_function);
        SteinSolution { test_function, mu }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn test_function(&self) -> &TestFunction {
        &self.test_function
    }

    /// `f_h(x)`; zero for `x <= 0`.
    pub fn value(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match &self.test_function {
            TestFunction::HalfLineIndicator { z } => fz(*z, x),
            TestFunction::Lipschitz { h, .. } => {
                let mu = self.mu;
                if x <= Z_075 {
                    // phi(t)/phi(x) = exp((x - t)(x + t)/2)
                    integrate(
                        |t| (h(t) - mu) * ((x - t) * (x + t) * 0.5).exp(),
                        0.0,
                        x,
                        QUAD_TOL,
                    )
                    .value
                } else {
                    -integrate(
                        |t| (h(t) - mu) * (-(t - x) * (t + x) * 0.5).exp(),
                        x,
                        x + TAIL_SPAN,
                        QUAD_TOL,
                    )
                    .value
                }
            }
        }
    }

    /// `f_h'(x)`: closed form for indicators (left limit at the jump),
    /// central differences otherwise.
    pub fn derivative(&self, x: f64) -> f64 {
        match &self.test_function {
            TestFunction::HalfLineIndicator { z } => fz_prime_one_sided(*z, x, Side::Left),
            TestFunction::Lipschitz { .. } => {
                (self.value(x + FD_STEP) - self.value(x - FD_STEP)) / (2.0 * FD_STEP)
            }
        }
    }

    /// `f_h''(x)` by the second central difference with step [`FD2_STEP`].
    pub fn second_derivative(&self, x: f64) -> f64 {
        let h = FD2_STEP;
        (self.value(x + h) - 2.0 * self.value(x) + self.value(x - h)) / (h * h)
    }

    /// `f'(x) - x f(x) - (h(x) - mu(h))`.
    pub fn residual(&self, x: f64) -> f64 {
        self.derivative(x) - x * self.value(x) - (self.test_function.eval(x) - self.mu)
    }
}

/// Entry point mirroring the operation table: `f_h(x)` for `x >= 0`.
pub fn solve_fh(h: &TestFunction, x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return domain(format!("f_h is evaluated on [0, inf), got x = {x}"));
    }
    Ok(SteinSolution::new(h.clone()).value(x))
}

/// Auxiliary functions of the bound proofs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Aux {
    M,
    N,
    H,
    G,
    U,
    /// The auxiliary `V(x)`; unrelated to the random variable `V_n`.
    V,
    S,
    D1,
    D2,
}

impl std::str::FromStr for Aux {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "M" => Aux::M,
            "N" => Aux::N,
            "H" => Aux::H,
            "G" => Aux::G,
            "U" => Aux::U,
            "V" => Aux::V,
            "S" => Aux::S,
            "D1" => Aux::D1,
            "D2" => Aux::D2,
            other => return domain(format!("unknown auxiliary function {other}")),
        })
    }
}

fn aux_m(x: f64) -> f64 {
    HalfNormal::cdf(x) / (2.0 * phi(x))
}

fn aux_n(x: f64) -> f64 {
    normal_sf(x) / phi(x)
}

fn aux_h(x: f64) -> f64 {
    2.0 * phi(x) + x * HalfNormal::cdf(x)
}

fn aux_g(x: f64) -> f64 {
    2.0 * (phi(x) - x * normal_sf(x))
}

/// Evaluates a named auxiliary function at `x >= 0`.
pub fn aux_eval(name: Aux, x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return domain(format!(
            "auxiliary function {name:?} needs finite x >= 0, got {x}"
        ));
    }
    let density = phi(x);
    let tail = normal_sf(x);
    let cdf = HalfNormal::cdf(x);
    Ok(match name {
        Aux::M => aux_m(x),
        Aux::N => aux_n(x),
        Aux::H => aux_h(x),
        Aux::G => aux_g(x),
        Aux::U => 2.0 * x * density - 2.0 * tail * (1.0 + x * x),
        Aux::V => -cdf * (1.0 + x * x) - 2.0 * x * density,
        Aux::S => {
            4.0 * (density - x * tail) * (density + 0.5 * x * cdf - 0.5 * INV_SQRT_2PI) / density
        }
        Aux::D1 => 0.5 * density - tail * cdf,
        Aux::D2 => -0.5 * x + 1.0 - 4.0 * tail,
    })
}

/// Uniform grid `lo, lo + step, ..., hi` with `points` entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, points: usize) -> Self {
        Grid { lo, hi, points }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points <= 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i == self.points - 1 {
                    self.hi
                } else {
                    self.lo + step * i as f64
                }
            })
            .collect()
    }
}

/// One observed supremum against its proved constant.
#[derive(Debug, Clone, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub observed: f64,
    pub bound: f64,
    pub margin: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl BoundCheck {
    pub fn new(name: impl Into<String>, observed: f64, bound: f64, tolerance: f64) -> Self {
        BoundCheck {
            name: name.into(),
            observed,
            bound,
            margin: bound - observed,
            tolerance,
            passed: observed <= bound + tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub kind: String,
    pub checks: Vec<BoundCheck>,
    /// Named observed values that have no proved bound attached (suprema
    /// locations, refined constants).
    pub observations: Vec<(String, f64)>,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn observation(&self, name: &str) -> Option<f64> {
        self.observations
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
    }
}

/// Which family of test functions to certify.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Lipschitz,
    Indicator,
}

/// `sup_x |f_z'(x)|` over a grid that also includes both one-sided values at `x = z`.
fn fz_prime_sup_over(z: f64, xs: &[f64]) -> f64 {
    let mut sup = fz_prime_one_sided(z, z, Side::Left)
        .abs()
        .max(fz_prime_one_sided(z, z, Side::Right).abs());
    for &x in xs {
        sup = sup
            .max(fz_prime_one_sided(z, x, Side::Left).abs())
            .max(fz_prime_one_sided(z, x, Side::Right).abs());
    }
    sup
}

/// Certifies `||f_z|| <= 1/2`, `||f_z'|| <= 1` and the bounded-`h` constants
/// on a `z x x` grid, then refines `sup_z ||f_z||` along the diagonal.
pub fn verify_indicator_bounds(grid: Grid) -> BoundReport {
    let zs = grid.values();
    let xs = grid.values();
    let c_f = 1.0 / (4.0 * phi(Z_075));

    struct Row {
        z: f64,
        sup_f: f64,
        sup_fp: f64,
        centered: f64,
    }
    let rows: Vec<Row> = zs
        .par_iter()
        .map(|&z| {
            let sup_f = xs
                .iter()
                .map(|&x| fz(z, x).abs())
                .fold(fz(z, z).abs(), f64::max);
            let sup_fp = fz_prime_sup_over(z, &xs);
            let f_z = HalfNormal::cdf(z);
            let centered = f_z.max(1.0 - f_z);
            Row {
                z,
                sup_f,
                sup_fp,
                centered,
            }
        })
        .collect();

    let grid_sup_f = rows.iter().map(|r| r.sup_f).fold(0.0, f64::max);
    let grid_sup_fp = rows.iter().map(|r| r.sup_fp).fold(0.0, f64::max);
    let worst_i_a = rows
        .iter()
        .min_by(|a, b| (a.centered * c_f - a.sup_f).total_cmp(&(b.centered * c_f - b.sup_f)))
        .expect("non-empty grid");
    let worst_i_b = rows
        .iter()
        .min_by(|a, b| (2.0 * a.centered - a.sup_fp).total_cmp(&(2.0 * b.centered - b.sup_fp)))
        .expect("non-empty grid");

    let diagonal = sup_search(
        |z| fz(z, z),
        grid.lo,
        grid.hi,
        SearchOptions {
            grid_points: grid.points,
            resolution: 1e-9,
        },
    )
    .expect("grid interval is valid");

    let mut observations = vec![
        ("grid_sup_fz".to_string(), grid_sup_f),
        ("refined_sup_fz".to_string(), diagonal.max),
        ("refined_argmax_z".to_string(), diagonal.argmax),
        ("grid_sup_fz_prime".to_string(), grid_sup_fp),
    ];
    if let Some(last) = rows.last() {
        observations.push((format!("sup_fz_prime_at_z={}", last.z), last.sup_fp));
    }

    BoundReport {
        kind: "indicator".into(),
        checks: vec![
            BoundCheck::new("sup |f_z| <= 1/2", diagonal.max.max(grid_sup_f), 0.5, 0.0),
            BoundCheck::new("sup |f_z'| <= 1", grid_sup_fp, 1.0, 0.0),
            BoundCheck::new(
                "|f_z| <= ||h_z - mu|| / (4 phi(z_0.75))",
                worst_i_a.sup_f,
                worst_i_a.centered * c_f,
                0.0,
            ),
            BoundCheck::new(
                "|f_z'| <= 2 ||h_z - mu||",
                worst_i_b.sup_fp,
                2.0 * worst_i_b.centered,
                0.0,
            ),
        ],
        observations,
    }
}

/// Finite-difference tolerance used when certifying second-derivative bounds.
pub const FD2_TOLERANCE: f64 = 1e-4;

/// Certifies the Lipschitz-`h` bounds `||f|| <= L`, `||f'|| <= sqrt(2/pi) L`,
/// `||f''|| <= 2 L`, plus the bounded-`h` bounds when `h` carries a range.
pub fn verify_lipschitz_bounds(h: &TestFunction, grid: Grid) -> BoundReport {
    let (lip, range) = match h {
        TestFunction::Lipschitz {
            lipschitz_constant,
            range,
            ..
        } => (*lipschitz_constant, *range),
        TestFunction::HalfLineIndicator { .. } => {
            return verify_indicator_bounds(grid);
        }
    };
    let solution = SteinSolution::new(h.clone());
    let xs: Vec<f64> = grid
        .values()
        .into_iter()
        .filter(|&x| x > FD2_STEP)
        .collect();
    let sampled: Vec<(f64, f64, f64)> = xs
        .par_iter()
        .map(|&x| {
            (
                solution.value(x).abs(),
                solution.derivative(x).abs(),
                solution.second_derivative(x).abs(),
            )
        })
        .collect();
    let sup_f = sampled.iter().map(|s| s.0).fold(0.0, f64::max);
    let sup_fp = sampled.iter().map(|s| s.1).fold(0.0, f64::max);
    let sup_fpp = sampled.iter().map(|s| s.2).fold(0.0, f64::max);

    let mut checks = vec![
        BoundCheck::new("||f_h|| <= ||h'||", sup_f, lip, 0.0),
        BoundCheck::new(
            "||f_h'|| <= sqrt(2/pi) ||h'||",
            sup_fp,
            SQRT_2_OVER_PI * lip,
            1e-7,
        ),
        BoundCheck::new("||f_h''|| <= 2 ||h'||", sup_fpp, 2.0 * lip, FD2_TOLERANCE),
    ];
    if let Some((lo, hi)) = range {
        let mu = solution.mu();
        let centered = (hi - mu).max(mu - lo);
        checks.push(BoundCheck::new(
            "||f_h|| <= ||h - mu|| / (4 phi(z_0.75))",
            sup_f,
            centered / (4.0 * phi(Z_075)),
            0.0,
        ));
        checks.push(BoundCheck::new(
            "||f_h'|| <= 2 ||h - mu||",
            sup_fp,
            2.0 * centered,
            1e-7,
        ));
    }
    BoundReport {
        kind: format!("lipschitz:{}", h.label()),
        checks,
        observations: vec![("mu_h".into(), solution.mu())],
    }
}

/// Runs the default certification suite for `kind`: the indicator family on
/// `grid x grid`, or `h = identity` and `h = min(x, 1)` on `grid`.
pub fn verify_lemma_bounds(kind: BoundKind, grid: Grid) -> Vec<BoundReport> {
    match kind {
        BoundKind::Indicator => vec![verify_indicator_bounds(grid)],
        BoundKind::Lipschitz => [TestFunction::identity(), TestFunction::min_one()]
            .iter()
            .map(|h| verify_lipschitz_bounds(h, grid))
            .collect(),
    }
}

/// True iff `x f_z(x)` is nondecreasing along `xs`.
pub fn verify_monotone_xfz(z: f64, xs: &[f64]) -> bool {
    xs.windows(2)
        .all(|w| w[0] * fz(z, w[0]) <= w[1] * fz(z, w[1]))
}

/// `sup_{z >= 0} f_z(z)`, refined by golden section.
pub fn sup_fz_diagonal() -> Supremum {
    let coarse =
        sup_search(|z| fz(z, z), 0.0, 8.0, SearchOptions::default()).expect("valid interval");
    golden_section_max(
        &|z| fz(z, z),
        (coarse.argmax - 0.05).max(0.0),
        coarse.argmax + 0.05,
        1e-10,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn mu_examples() {
        let median = TestFunction::indicator(Z_075).unwrap();
        assert!((mu_h(&median) - 0.5).abs() < 1e-15);
        assert!((mu_h(&TestFunction::identity()) - SQRT_2_OVER_PI).abs() < 1e-10);
        assert_eq!(mu_h(&TestFunction::indicator(0.0).unwrap()), 0.0);
        assert!(TestFunction::indicator(-1.0).is_err());
    }

    #[test]
    fn indicator_evaluates_half_line() {
        let h = TestFunction::indicator(1.5).unwrap();
        assert_eq!(h.eval(0.0), 1.0);
        assert_eq!(h.eval(1.5), 1.0);
        assert_eq!(h.eval(1.5000001), 0.0);
    }

    #[test]
    fn solve_fh_examples() {
        assert_eq!(solve_fh(&TestFunction::identity(), 0.0).unwrap(), 0.0);
        let h1 = TestFunction::indicator(1.0).unwrap();
        let expected = normal_sf(1.0) * (2.0 * crate::distributions::cap_phi(1.0) - 1.0) / phi(1.0);
        assert_relative_eq!(solve_fh(&h1, 1.0).unwrap(), expected, max_relative = 1e-14);
        assert!(solve_fh(&h1, -0.1).is_err());
    }

    #[test]
    fn identity_residual_small() {
        let sol = SteinSolution::new(TestFunction::identity());
        for x in [0.5, 1.0, 2.0] {
            let lhs = sol.derivative(x) - x * sol.value(x);
            assert!((lhs - (x - SQRT_2_OVER_PI)).abs() < 1e-7, "x = {x}");
        }
    }

    #[test]
    fn fz_examples() {
        for z in [0.3, 1.0, 2.5] {
            let expected = normal_sf(z) * (2.0 * crate::distributions::cap_phi(z) - 1.0) / phi(z);
            assert_relative_eq!(fz(z, z), expected, max_relative = 1e-13);
        }
        for x in [0.0, 0.5, 3.0] {
            assert_eq!(fz(0.0, x), 0.0);
        }
        assert_relative_eq!(
            fz(1.0, 0.3),
            (1.0 - HalfNormal::cdf(1.0)) * aux_eval(Aux::M, 0.3).unwrap(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn fz_prime_signs_and_jump() {
        assert!(fz_prime(2.0, 1.0).unwrap() > 0.0);
        assert!(fz_prime(2.0, 3.0).unwrap() < 0.0);
        assert_relative_eq!(
            fz_prime(1.0, 0.0).unwrap(),
            2.0 * normal_sf(1.0),
            max_relative = 1e-15
        );
        match fz_prime(1.0, 1.0) {
            Err(Error::Jump { left, right }) => assert!((left - right - 1.0).abs() < 1e-15),
            other => panic!("expected jump, got {other:?}"),
        }
    }

    #[test]
    fn fz_prime_forms_agree() {
        for z in [0.2, 1.0, 3.0] {
            for i in 0..60 {
                let x = 0.1 * i as f64;
                for side in [Side::Left, Side::Right] {
                    let a = fz_prime_one_sided(z, x, side);
                    let b = fz_prime_hg(z, x, side);
                    assert!((a - b).abs() < 1e-12, "z={z} x={x}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn aux_examples() {
        assert_relative_eq!(
            aux_eval(Aux::S, 0.0).unwrap(),
            SQRT_2_OVER_PI,
            max_relative = 1e-15
        );
        let x0 = (32.0 / std::f64::consts::PI).ln().sqrt();
        assert!((aux_eval(Aux::D2, x0).unwrap() + 0.01701).abs() < 5e-5);
        for x in [0.1, 1.0, 3.0] {
            assert!(aux_eval(Aux::U, x).unwrap() <= 0.0);
            assert!(aux_eval(Aux::V, x).unwrap() <= 0.0);
        }
        assert_eq!(aux_eval(Aux::M, 0.0).unwrap(), 0.0);
        assert_relative_eq!(
            aux_eval(Aux::N, 0.0).unwrap(),
            (std::f64::consts::PI / 2.0).sqrt(),
            max_relative = 1e-15
        );
        assert!(aux_eval(Aux::G, -1.0).is_err());
        assert_eq!("D2".parse::<Aux>().unwrap(), Aux::D2);
    }

    #[test]
    fn sup_search_examples() {
        let s = sup_fz_diagonal();
        assert!((s.max - 0.456_296).abs() < 5e-4);
        let s = sup_search(
            |x| aux_eval(Aux::S, x).unwrap(),
            0.0,
            10.0,
            SearchOptions::default(),
        )
        .unwrap();
        assert_eq!(s.argmax, 0.0);
        assert_relative_eq!(s.max, SQRT_2_OVER_PI, max_relative = 1e-15);
        let s = sup_search(
            |x| aux_eval(Aux::D2, x).unwrap(),
            0.0,
            5.0,
            SearchOptions::default(),
        )
        .unwrap();
        assert!((s.argmax - 1.52348).abs() < 1e-3);
    }

    #[test]
    fn monotone_xfz_examples() {
        let grid = |hi: f64, step: f64| -> Vec<f64> {
            (0..=((hi / step).round() as usize))
                .map(|i| i as f64 * step)
                .collect()
        };
        assert!(verify_monotone_xfz(1.0, &grid(6.0, 0.01)));
        assert!(verify_monotone_xfz(0.0, &grid(6.0, 0.01)));
        assert!(verify_monotone_xfz(3.0, &grid(10.0, 0.01)));
    }

    #[test]
    fn identity_bound_report() {
        let report = verify_lipschitz_bounds(&TestFunction::identity(), Grid::new(0.0, 8.0, 161));
        assert!(report.passed(), "{report:#?}");
    }
}
