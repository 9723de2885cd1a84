//! Kolmogorov and Wasserstein-1 distances between lattice laws and the
//! half-normal, plus the closed-form bounds they are checked against.
//!
//! Laws are cumulated in exact rationals and rounded once per atom. The
//! Wasserstein distance is evaluated piecewise in closed form; an independent
//! quantile-side quadrature serves as its oracle.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::{inv_normal_sf, normal_sf_integral, HalfNormal, SQRT_2_OVER_PI};
use crate::error::{domain, Error, Result};
use crate::quadrature::GaussLegendre;
use crate::srw_laws::{mean_exact, pmf_for, pmf_halfmax, pmf_max, ratio_to_f64, ExactPmf};
use crate::statistic::Statistic;
use crate::stein_core::BoundCheck;

/// An exact pmf on `{a..b}` placed on the lattice `scale * k`.
#[derive(Debug, Clone)]
pub struct ScaledLaw {
    base: ExactPmf,
    scale: f64,
}

impl ScaledLaw {
    pub fn new(base: ExactPmf, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return domain(format!("lattice scale must be positive, got {scale}"));
        }
        if base.lower() < 0 {
            return domain("lattice law must live on [0, inf)");
        }
        Ok(ScaledLaw { base, scale })
    }

    /// The normalized statistic: `K_n/sqrt(n)`, `M_n/sqrt(n)`, `2N_n/sqrt(n)`
    /// or `2C_n/sqrt(n)`.
    pub fn for_statistic(statistic: Statistic, n: u64) -> Result<Self> {
        ScaledLaw::new(pmf_for(statistic, n)?, statistic.scale(n))
    }

    pub fn base(&self) -> &ExactPmf {
        &self.base
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn atom(&self, k: i64) -> f64 {
        self.scale * k as f64
    }

    /// Per atom `k`: `(x_k, P(X > k), P(X >= k))`, each correctly rounded.
    fn survival_table(&self) -> Vec<(f64, f64, f64)> {
        let den = self.base.denominator();
        let above = self.base.sf_numerators();
        self.base
            .support()
            .zip(above.iter().zip(self.base.numerators()))
            .map(|(k, (gt, mass))| {
                let geq = gt + mass;
                (self.atom(k), ratio_to_f64(gt, den), ratio_to_f64(&geq, den))
            })
            .collect()
    }
}

/// `sup_z |P(law <= z) - P(Y <= z)|`.
///
/// The supremum sits at an atom, approached from the right or the left. Each
/// difference is taken on whichever side (CDF or survival) is smaller, so
/// neither the origin nor the tail loses accuracy to cancellation.
pub fn kolmogorov_exact(law: &ScaledLaw) -> f64 {
    let den = law.base.denominator();
    let below = law.base.cdf_numerators();
    law.survival_table()
        .into_iter()
        .zip(below.iter().zip(law.base.numerators()))
        .map(|((x, gt, geq), (le, mass))| {
            let sy = HalfNormal::sf(x);
            if sy > 0.5 {
                let fy = HalfNormal::cdf(x);
                let lt = ratio_to_f64(&(le - mass), den);
                (ratio_to_f64(le, den) - fy).abs().max((lt - fy).abs())
            } else {
                (gt - sy).abs().max((geq - sy).abs())
            }
        })
        .fold(0.0, f64::max)
}

/// `int_u^v |sc - 2(1 - Phi(t))| dt` for `0 <= u <= v`.
fn survival_gap(u: f64, v: f64, sc: f64) -> f64 {
    if v <= u {
        return 0.0;
    }
    let b = |t: f64| 2.0 * normal_sf_integral(t);
    // signed integral of (2Q - sc) over [p, q]
    let signed = |p: f64, q: f64| b(p) - b(q) - sc * (q - p);
    if sc >= 1.0 {
        return -signed(u, v);
    }
    // below the smallest normal double the crossing lies past t = 37.5,
    // where 2Q is itself subnormal
    if sc < 2.0 * f64::MIN_POSITIVE {
        return signed(u, v);
    }
    let crossing = inv_normal_sf(0.5 * sc).expect("0 < sc/2 < 1/2");
    if crossing <= u {
        -signed(u, v)
    } else if crossing >= v {
        signed(u, v)
    } else {
        signed(u, crossing) - signed(crossing, v)
    }
}

/// `int_0^inf |P(law > t) - P(Y > t)| dt`, evaluated in closed form between
/// atoms with the crossing point found by the upper normal quantile.
pub fn wasserstein_exact(law: &ScaledLaw) -> f64 {
    let table = law.survival_table();
    let mut prev = 0.0;
    let mut total = 0.0;
    for &(x, _, geq) in &table {
        total += survival_gap(prev, x, geq);
        prev = x;
    }
    total + 2.0 * normal_sf_integral(prev)
}

/// `y(v)` with `P(Y > y) = v`.
fn half_normal_upper_quantile(v: f64) -> f64 {
    if v >= 1.0 {
        0.0
    } else {
        inv_normal_sf((0.5 * v).max(f64::MIN_POSITIVE)).expect("0 < v < 1")
    }
}

const QUANTILE_MAX_DEPTH: u32 = 40;
/// `v = v_hi e^{-tau}`: beyond this `tau` the remaining mass is below 1e-26.
const LOG_TAIL_SPAN: f64 = 60.0;

fn adaptive<F: Fn(f64) -> f64>(
    rule: &GaussLegendre,
    f: &F,
    a: f64,
    b: f64,
    whole: f64,
    depth: u32,
) -> f64 {
    let mid = 0.5 * (a + b);
    let left = rule.integrate(f, a, mid);
    let right = rule.integrate(f, mid, b);
    let halves = left + right;
    let tol = 1e-16 + 1e-13 * halves.abs();
    if depth >= QUANTILE_MAX_DEPTH || (halves - whole).abs() <= tol {
        return halves;
    }
    adaptive(rule, f, a, mid, left, depth + 1) + adaptive(rule, f, mid, b, right, depth + 1)
}

fn integrate_adaptive<F: Fn(f64) -> f64>(rule: &GaussLegendre, f: F, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let whole = rule.integrate(&f, a, b);
    adaptive(rule, &f, a, b, whole, 0)
}

/// `int_lo^hi g(v) dv`, switching to `v = hi e^{-tau}` when the interval
/// spans several orders of magnitude or touches zero.
fn integrate_survival_side<G: Fn(f64) -> f64>(rule: &GaussLegendre, g: G, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    if lo > 0.25 * hi {
        return integrate_adaptive(rule, g, lo, hi);
    }
    let span = if lo > 0.0 {
        (hi / lo).ln()
    } else {
        LOG_TAIL_SPAN
    };
    integrate_adaptive(
        rule,
        |tau| {
            let v = hi * (-tau).exp();
            g(v) * v
        },
        0.0,
        span,
    )
}

/// Independent oracle for [`wasserstein_exact`]: `int_0^1 |Q_law(u) - Q_Y(u)| du`
/// by adaptive Gauss-Legendre with `nodes` points per panel, split at the
/// known breakpoints of the step quantile and at each kink.
pub fn wasserstein_quantile(law: &ScaledLaw, nodes: usize) -> Result<f64> {
    if nodes < 64 {
        return domain(format!(
            "quantile oracle needs at least 64 nodes, got {nodes}"
        ));
    }
    let rule = GaussLegendre::new(nodes);
    // In the survival variable v = 1 - u the atom x_k occupies [P(X > k), P(X >= k)).
    let total = law
        .survival_table()
        .into_par_iter()
        .map(|(x, lo, hi)| {
            if hi <= lo {
                return 0.0;
            }
            let gap = |v: f64| (x - half_normal_upper_quantile(v)).abs();
            let kink = HalfNormal::sf(x);
            if kink > lo && kink < hi {
                integrate_survival_side(&rule, gap, lo, kink)
                    + integrate_survival_side(&rule, gap, kink, hi)
            } else {
                integrate_survival_side(&rule, gap, lo, hi)
            }
        })
        .sum();
    Ok(total)
}

/// Exact distances between two laws on the same lattice `scale * Z`:
/// `(sup_k |F_a(k) - F_b(k)|, sum_k |F_a(k) - F_b(k)|)`. The Wasserstein
/// distance is the second entry times the lattice spacing.
pub fn lattice_distances(a: &ExactPmf, b: &ExactPmf) -> (BigRational, BigRational) {
    let lo = a.lower().min(b.lower());
    let hi = a.upper().max(b.upper());
    // CDFs as integers over the common denominator den_a * den_b
    let (den_a, den_b) = (
        BigInt::from(a.denominator().clone()),
        BigInt::from(b.denominator().clone()),
    );
    let cumulative = |p: &ExactPmf, other_den: &BigInt| -> Vec<BigInt> {
        let cdf = p.cdf_numerators();
        let full = BigInt::from(p.denominator().clone()) * other_den;
        (lo..=hi)
            .map(|k| {
                if k < p.lower() {
                    BigInt::zero()
                } else if k > p.upper() {
                    full.clone()
                } else {
                    BigInt::from(cdf[(k - p.lower()) as usize].clone()) * other_den
                }
            })
            .collect()
    };
    let fa = cumulative(a, &den_b);
    let fb = cumulative(b, &den_a);
    let mut sup = BigInt::zero();
    let mut sum = BigInt::zero();
    for (x, y) in fa.iter().zip(&fb) {
        let gap = (x - y).abs();
        sum += &gap;
        if gap > sup {
            sup = gap;
        }
    }
    let den = den_a * den_b;
    (
        BigRational::new(sup, den.clone()),
        BigRational::new(sum, den),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Metric {
    #[serde(rename = "K")]
    Kolmogorov,
    #[serde(rename = "W")]
    Wasserstein,
}

impl Metric {
    pub const BOTH: [Metric; 2] = [Metric::Kolmogorov, Metric::Wasserstein];
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Kolmogorov => "K",
            Metric::Wasserstein => "W",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "k" | "kolmogorov" => Ok(Metric::Kolmogorov),
            "w" | "wasserstein" => Ok(Metric::Wasserstein),
            other => Err(Error::Domain(format!(
                "unknown metric {other:?} (expected K or W)"
            ))),
        }
    }
}

/// Right-hand side of the distance bound for the normalized statistic at
/// walk length `n`. The maximum, returns and sign changes carry their own
/// bounds; `halfmax` (the variable `V`) uses the bound on `d(V, Y)`.
pub fn theorem_bound(statistic: Statistic, n: u64, metric: Metric) -> Result<f64> {
    statistic.m_for_n(n)?;
    let pi = std::f64::consts::PI;
    let nf = n as f64;
    let root = nf.sqrt();
    let s2pi = SQRT_2_OVER_PI;
    Ok(match (statistic, metric) {
        (Statistic::Max, Metric::Wasserstein) => (3.0 + 2.0 / pi) / root,
        (Statistic::Max, Metric::Kolmogorov) => (4.0 * s2pi + 0.5) / root + 2.0 / nf,
        (Statistic::Returns, Metric::Wasserstein) => (2.0 / pi + 2.0) / root + s2pi / nf,
        (Statistic::Returns, Metric::Kolmogorov) => {
            ((3.0 + 2.0 * 2f64.sqrt()) / (2.0 * pi).sqrt() + 0.75) / root + 1.5 / nf
        }
        (Statistic::SignChanges, Metric::Wasserstein) => {
            (4.0 + 2.0 / pi) / root + s2pi / nf + 2.0 * 2f64.sqrt() / (pi * nf * root)
        }
        (Statistic::SignChanges, Metric::Kolmogorov) => {
            ((2.0 * 2f64.sqrt() + 4.0) / pi.sqrt() + 1.5) / root
                + 3.0 / nf
                + 4.0 / (pi.sqrt() * nf * root)
        }
        (Statistic::HalfMax, Metric::Wasserstein) => (2.0 + 4.0 / pi) / root + 2.0 * s2pi / nf,
        (Statistic::HalfMax, Metric::Kolmogorov) => (3.0 * s2pi + 0.5) / root + 2.0 / nf,
    })
}

/// Distances of one normalized statistic to `Y` against their bounds.
#[derive(Debug, Clone, Serialize)]
pub struct DistanceReport {
    pub statistic: Statistic,
    pub n: u64,
    pub kolmogorov: f64,
    pub wasserstein: f64,
    pub bound_k: f64,
    pub bound_w: f64,
    pub margin_k: f64,
    pub margin_w: f64,
    pub sqrtn_scaled: (f64, f64),
}

impl DistanceReport {
    pub fn passed(&self) -> bool {
        self.margin_k >= 0.0 && self.margin_w >= 0.0
    }
}

pub fn bound_check(statistic: Statistic, n: u64) -> Result<DistanceReport> {
    let law = ScaledLaw::for_statistic(statistic, n)?;
    let kolmogorov = kolmogorov_exact(&law);
    let wasserstein = wasserstein_exact(&law);
    let bound_k = theorem_bound(statistic, n, Metric::Kolmogorov)?;
    let bound_w = theorem_bound(statistic, n, Metric::Wasserstein)?;
    let root = (n as f64).sqrt();
    Ok(DistanceReport {
        statistic,
        n,
        kolmogorov,
        wasserstein,
        bound_k,
        bound_w,
        margin_k: bound_k - kolmogorov,
        margin_w: bound_w - wasserstein,
        sqrtn_scaled: (root * kolmogorov, root * wasserstein),
    })
}

/// [`bound_check`] over many `n`, in parallel, results in input order.
pub fn sweep(statistic: Statistic, ns: &[u64]) -> Result<Vec<DistanceReport>> {
    ns.par_iter().map(|&n| bound_check(statistic, n)).collect()
}

/// One row of a convergence-rate table.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RateRow {
    pub n: u64,
    pub sqrtn_d_k: f64,
    pub sqrtn_d_w: f64,
    /// `sqrt(n) P(statistic = 0)`.
    pub sqrtn_p0: f64,
    /// `sqrt(n) |E[W] - E[Y]|`.
    pub sqrtn_mean_gap: f64,
}

pub fn rate_row(statistic: Statistic, n: u64) -> Result<RateRow> {
    let law = ScaledLaw::for_statistic(statistic, n)?;
    let root = (n as f64).sqrt();
    let base = law.base();
    let p0 = ratio_to_f64(
        base.numerators()
            .first()
            .filter(|_| base.lower() == 0)
            .unwrap_or(&BigUint::zero()),
        base.denominator(),
    );
    let mean = mean_exact(base).to_f64().unwrap_or(f64::NAN) * law.scale();
    Ok(RateRow {
        n,
        sqrtn_d_k: root * kolmogorov_exact(&law),
        sqrtn_d_w: root * wasserstein_exact(&law),
        sqrtn_p0: root * p0,
        sqrtn_mean_gap: root * (mean - SQRT_2_OVER_PI).abs(),
    })
}

pub fn rate_table(statistic: Statistic, ns: &[u64]) -> Result<Vec<RateRow>> {
    if ns.is_empty() {
        return domain("rate table needs at least one n");
    }
    ns.par_iter().map(|&n| rate_row(statistic, n)).collect()
}

/// Distances among `W = M_n/sqrt(n)`, `V = 2N_n/sqrt(n)` and `Y` at `n = 2m`.
#[derive(Debug, Clone, Serialize)]
pub struct AuxiliaryReport {
    pub m: u64,
    pub n: u64,
    /// Exact `d_K(V, W)` as `p/q`.
    pub d_k_vw_exact: String,
    /// Exact `sqrt(n) d_W(V, W)` as `p/q`.
    pub sqrtn_d_w_vw_exact: String,
    pub d_k_vw: f64,
    pub d_w_vw: f64,
    pub d_k_vy: f64,
    pub d_w_vy: f64,
    pub d_k_wy: f64,
    pub d_w_wy: f64,
    /// `P(2N_n <= 2k) = P(M_n <= 2k)` for every `k`, exactly.
    pub even_cdf_agreement: bool,
    pub checks: Vec<BoundCheck>,
}

impl AuxiliaryReport {
    pub fn passed(&self) -> bool {
        self.even_cdf_agreement && self.checks.iter().all(|c| c.passed)
    }
}

pub fn auxiliary_bounds(m: u64) -> Result<AuxiliaryReport> {
    if m == 0 {
        return domain("auxiliary bounds need m >= 1");
    }
    let n = 2 * m;
    let nf = n as f64;
    let root = nf.sqrt();
    let max_law = pmf_max(n)?;
    let halfmax = pmf_halfmax(m)?;
    let doubled = halfmax.push_forward(|s| 2 * s);

    let even_cdf_agreement = {
        let (ca, cb) = (doubled.cdf_numerators(), max_law.cdf_numerators());
        (0..=m as usize)
            .all(|k| &ca[2 * k] * max_law.denominator() == &cb[2 * k] * doubled.denominator())
    };
    let (sup_vw, sum_vw) = lattice_distances(&doubled, &max_law);
    let d_k_vw = sup_vw.to_f64().unwrap_or(f64::NAN);
    let d_w_vw = sum_vw.to_f64().unwrap_or(f64::NAN) / root;

    let v = ScaledLaw::new(halfmax, 2.0 / root)?;
    let w = ScaledLaw::new(max_law, 1.0 / root)?;
    let (d_k_vy, d_w_vy) = (kolmogorov_exact(&v), wasserstein_exact(&v));
    let (d_k_wy, d_w_wy) = (kolmogorov_exact(&w), wasserstein_exact(&w));

    // sqrt(n) d_W(V, W) <= 1 is a rational comparison; d_K(V, W)^2 n <= 2/pi
    // is compared with the rational rounded up.
    let sqrt_n_dw_exact = sum_vw.clone();
    let dk_sq_n = (&sup_vw * &sup_vw * BigRational::from_integer(BigInt::from(n)))
        .to_f64()
        .unwrap_or(f64::NAN);
    let two_over_pi = 2.0 / std::f64::consts::PI;
    let rounding = 1e-12;
    let checks = vec![
        BoundCheck::new(
            "n d_K(V,W)^2 <= 2/pi",
            dk_sq_n.next_up(),
            two_over_pi.next_down(),
            0.0,
        ),
        BoundCheck::new(
            "sqrt(n) d_W(V,W) <= 1",
            sqrt_n_dw_exact.to_f64().unwrap_or(f64::NAN),
            1.0,
            0.0,
        ),
        BoundCheck::new(
            "d_K(V,Y) bound",
            d_k_vy,
            theorem_bound(Statistic::HalfMax, n, Metric::Kolmogorov)?,
            0.0,
        ),
        BoundCheck::new(
            "d_W(V,Y) bound",
            d_w_vy,
            theorem_bound(Statistic::HalfMax, n, Metric::Wasserstein)?,
            0.0,
        ),
        BoundCheck::new(
            "d_K(W,Y) <= d_K(W,V) + d_K(V,Y)",
            d_k_wy,
            d_k_vw + d_k_vy,
            rounding,
        ),
        BoundCheck::new(
            "d_W(W,Y) <= d_W(W,V) + d_W(V,Y)",
            d_w_wy,
            d_w_vw + d_w_vy,
            rounding,
        ),
    ];
    let rational_dw_ok = sqrt_n_dw_exact <= BigRational::from_integer(BigInt::from(1));
    let mut checks = checks;
    checks[1].passed &= rational_dw_ok;

    Ok(AuxiliaryReport {
        m,
        n,
        d_k_vw_exact: sup_vw.to_string(),
        sqrtn_d_w_vw_exact: sum_vw.to_string(),
        d_k_vw,
        d_w_vw,
        d_k_vy,
        d_w_vy,
        d_k_wy,
        d_w_wy,
        even_cdf_agreement,
        checks,
    })
}
