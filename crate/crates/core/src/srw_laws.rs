//! Exact laws of simple-random-walk statistics.
//!
//! Every mass is an exact rational. The formula laws all live over the
//! dyadic denominator `2^(2m)` and are generated by multiplicative binomial
//! recurrences, so building the law for `n = 4096` costs `O(n)` small-operand
//! big-integer operations.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::distributions::SQRT_2_OVER_PI;
use crate::error::{domain, Error, Result};
use crate::statistic::Statistic;

/// Largest walk length accepted by [`brute_force_pmf`].
pub const ENUMERATION_LIMIT: u32 = 22;

/// A probability mass function on the integer interval `[lower, upper]`,
/// stored as integer numerators over one common denominator.
#[derive(Clone)]
pub struct ExactPmf {
    lower: i64,
    numerators: Vec<BigUint>,
    denominator: BigUint,
    statistic: Option<Statistic>,
}

impl fmt::Debug for ExactPmf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let masses: Vec<String> = self.masses().iter().map(|q| q.to_string()).collect();
        f.debug_struct("ExactPmf")
            .field("lower", &self.lower)
            .field("upper", &self.upper())
            .field("statistic", &self.statistic)
            .field("mass", &masses)
            .finish()
    }
}

impl PartialEq for ExactPmf {
    /// Equality of laws: same support and equal masses as rationals.
    fn eq(&self, other: &Self) -> bool {
        self.lower == other.lower
            && self.numerators.len() == other.numerators.len()
            && self
                .numerators
                .iter()
                .zip(&other.numerators)
                .all(|(a, b)| a * &other.denominator == b * &self.denominator)
    }
}

impl ExactPmf {
    /// Builds a pmf from numerators over a common denominator. The numerators
    /// must sum to the denominator.
    pub fn from_numerators(
        lower: i64,
        numerators: Vec<BigUint>,
        denominator: BigUint,
    ) -> Result<Self> {
        if numerators.is_empty() {
            return domain("a pmf needs at least one atom");
        }
        if denominator.is_zero() {
            return domain("pmf denominator is zero");
        }
        let total: BigUint = numerators.iter().sum();
        if total != denominator {
            return domain("pmf masses do not sum to one");
        }
        Ok(ExactPmf {
            lower,
            numerators,
            denominator,
            statistic: None,
        })
    }

    /// Builds a pmf from rational masses on `[lower, lower + masses.len() - 1]`.
    pub fn from_masses(lower: i64, masses: &[BigRational]) -> Result<Self> {
        if masses.iter().any(|q| q < &BigRational::zero()) {
            return domain("negative mass");
        }
        let denominator = masses
            .iter()
            .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let numerators = masses
            .iter()
            .map(|q| {
                (q.numer() * (&denominator / q.denom()))
                    .to_biguint()
                    .expect("nonnegative mass")
            })
            .collect();
        ExactPmf::from_numerators(
            lower,
            numerators,
            denominator.to_biguint().expect("positive denominator"),
        )
    }

    /// Point mass at `k`.
    pub fn point_mass(k: i64) -> Self {
        ExactPmf {
            lower: k,
            numerators: vec![BigUint::one()],
            denominator: BigUint::one(),
            statistic: None,
        }
    }

    fn tagged(mut self, statistic: Statistic) -> Self {
        self.statistic = Some(statistic);
        self
    }

    pub fn statistic(&self) -> Option<Statistic> {
        self.statistic
    }

    pub fn lower(&self) -> i64 {
        self.lower
    }

    pub fn upper(&self) -> i64 {
        self.lower + self.numerators.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.numerators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numerators.is_empty()
    }

    pub fn support(&self) -> std::ops::RangeInclusive<i64> {
        self.lower..=self.upper()
    }

    pub fn numerators(&self) -> &[BigUint] {
        &self.numerators
    }

    pub fn denominator(&self) -> &BigUint {
        &self.denominator
    }

    /// `P(X = k)`; zero outside the support.
    pub fn mass(&self, k: i64) -> BigRational {
        match self.index(k) {
            Some(i) => ratio(&self.numerators[i], &self.denominator),
            None => BigRational::zero(),
        }
    }

    pub fn masses(&self) -> Vec<BigRational> {
        self.numerators
            .iter()
            .map(|num| ratio(num, &self.denominator))
            .collect()
    }

    fn index(&self, k: i64) -> Option<usize> {
        if k < self.lower || k > self.upper() {
            None
        } else {
            Some((k - self.lower) as usize)
        }
    }

    /// `P(X <= k)` for each atom, exact numerators over [`Self::denominator`].
    pub fn cdf_numerators(&self) -> Vec<BigUint> {
        let mut acc = BigUint::zero();
        self.numerators
            .iter()
            .map(|num| {
                acc += num;
                acc.clone()
            })
            .collect()
    }

    /// `P(X > k)` for each atom, accumulated from the top.
    pub fn sf_numerators(&self) -> Vec<BigUint> {
        let mut acc = BigUint::zero();
        let mut out: Vec<BigUint> = self
            .numerators
            .iter()
            .rev()
            .map(|num| {
                let above = acc.clone();
                acc += num;
                above
            })
            .collect();
        out.reverse();
        out
    }

    /// `P(X <= k)`, exact.
    pub fn cdf(&self, k: i64) -> BigRational {
        if k < self.lower {
            return BigRational::zero();
        }
        let top = k.min(self.upper());
        let sum: BigUint = self.numerators[..=(top - self.lower) as usize].iter().sum();
        ratio(&sum, &self.denominator)
    }

    pub fn mass_f64(&self) -> Vec<f64> {
        self.numerators
            .iter()
            .map(|num| ratio_to_f64(num, &self.denominator))
            .collect()
    }

    /// Correctly rounded `P(X <= k)` per atom.
    pub fn cdf_f64(&self) -> Vec<f64> {
        self.cdf_numerators()
            .iter()
            .map(|num| ratio_to_f64(num, &self.denominator))
            .collect()
    }

    /// Correctly rounded `P(X > k)` per atom.
    pub fn sf_f64(&self) -> Vec<f64> {
        self.sf_numerators()
            .iter()
            .map(|num| ratio_to_f64(num, &self.denominator))
            .collect()
    }

    /// Applies `k -> map(k)` (assumed nondecreasing) and merges atoms.
    pub fn push_forward(&self, map: impl Fn(i64) -> i64) -> ExactPmf {
        let lower = map(self.lower);
        let upper = map(self.upper());
        let mut numerators = vec![BigUint::zero(); (upper - lower + 1) as usize];
        for (k, num) in self.support().zip(&self.numerators) {
            numerators[(map(k) - lower) as usize] += num;
        }
        ExactPmf {
            lower,
            numerators,
            denominator: self.denominator.clone(),
            statistic: None,
        }
    }
}

fn ratio(num: &BigUint, den: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

/// Correctly rounded `num / den` as `f64`.
pub fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    if den.count_ones() == 1 {
        let exp = den.bits() as i64 - 1;
        let bits = num.bits();
        if bits <= 64 {
            let v = num.to_u64().expect("fits in 64 bits") as f64;
            return scale_by_pow2(v, -exp);
        }
        let shift = bits - 64;
        let mut top = (num >> shift).to_u64().expect("64 leading bits");
        if num.trailing_zeros().unwrap_or(0) < shift {
            // sticky bit below the rounding position
            top |= 1;
        }
        return scale_by_pow2(top as f64, shift as i64 - exp);
    }
    ratio(num, den).to_f64().unwrap_or(f64::NAN)
}

fn scale_by_pow2(v: f64, exp: i64) -> f64 {
    libm::ldexp(v, exp.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
}

/// `P(S_n = k) = binom(n, (n + k)/2) 2^-n`, zero off the parity lattice.
pub fn position_prob(n: u64, k: i64) -> BigRational {
    let n_i = n as i64;
    if (n_i + k) % 2 != 0 || k.abs() > n_i {
        return BigRational::zero();
    }
    let j = ((n_i + k) / 2) as u64;
    BigRational::new(BigInt::from(binomial(n, j)), BigInt::one() << (n as usize))
}

/// `binom(n, k)` by the multiplicative recurrence.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `binom(2m, m + j)` for `j = 0..=m`, walking outward from the centre.
fn central_binomial_half_row(m: u64) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(m as usize + 1);
    let mut current = binomial(2 * m, m);
    row.push(current.clone());
    for j in 0..m {
        current *= m - j;
        current /= m + j + 1;
        row.push(current.clone());
    }
    row
}

fn require_m(m: u64, what: &str) -> Result<()> {
    if m == 0 {
        return domain(format!("{what} needs m >= 1"));
    }
    Ok(())
}

fn pow2(exp: u64) -> BigUint {
    BigUint::one() << (exp as usize)
}

/// Law of the number of returns `K_{2m}`:
/// `P(K = r) = binom(2m - r, m) 2^-(2m - r)` on `[0, m]`.
pub fn pmf_returns(m: u64) -> Result<ExactPmf> {
    require_m(m, "pmf_returns")?;
    // numerator over 4^m: binom(2m - r, m) 2^r
    let mut numerators = Vec::with_capacity(m as usize + 1);
    let mut current = binomial(2 * m, m);
    numerators.push(current.clone());
    for r in 0..m {
        current *= m - r;
        current /= 2 * m - r;
        current <<= 1;
        numerators.push(current.clone());
    }
    Ok(ExactPmf {
        lower: 0,
        numerators,
        denominator: pow2(2 * m),
        statistic: None,
    }
    .tagged(Statistic::Returns))
}

/// Law of the maximum `M_n`, `n` even: `P(M = r) = p_{n,r} + p_{n,r+1}` on `[0, n]`.
pub fn pmf_max(n: u64) -> Result<ExactPmf> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::Parity {
            statistic: "max",
            n,
        });
    }
    let m = n / 2;
    let half = central_binomial_half_row(m);
    // r = 2j and r = 2j - 1 both carry binom(2m, m + j).
    let numerators = (0..=n)
        .map(|r| half[r.div_ceil(2) as usize].clone())
        .collect();
    Ok(ExactPmf {
        lower: 0,
        numerators,
        denominator: pow2(n),
        statistic: None,
    }
    .tagged(Statistic::Max))
}

/// Law of `N_n = floor((M_n + 1) / 2)` for `n = 2m`:
/// `q(0) = binom(2m, m) 4^-m` and `q(s) = 2 binom(2m, m + s) 4^-m` for `s >= 1`.
pub fn pmf_halfmax(m: u64) -> Result<ExactPmf> {
    require_m(m, "pmf_halfmax")?;
    let half = central_binomial_half_row(m);
    let numerators = half
        .into_iter()
        .enumerate()
        .map(|(s, b)| if s == 0 { b } else { b << 1 })
        .collect();
    Ok(ExactPmf {
        lower: 0,
        numerators,
        denominator: pow2(2 * m),
        statistic: None,
    }
    .tagged(Statistic::HalfMax))
}

/// Law of the sign changes `C_{2m+1}`: `P(C = s) = 2 p_{2m+1, 2s+1}` on `[0, m]`.
pub fn pmf_signchanges(m: u64) -> Result<ExactPmf> {
    require_m(m, "pmf_signchanges")?;
    // numerator over 4^m: binom(2m + 1, m + 1 + s)
    let n = 2 * m + 1;
    let mut numerators = Vec::with_capacity(m as usize + 1);
    let mut current = binomial(n, m + 1);
    numerators.push(current.clone());
    for s in 0..m {
        let j = m + 1 + s;
        current *= n - j;
        current /= j + 1;
        numerators.push(current.clone());
    }
    Ok(ExactPmf {
        lower: 0,
        numerators,
        denominator: pow2(2 * m),
        statistic: None,
    }
    .tagged(Statistic::SignChanges))
}

/// Formula law of `statistic` for walk length `n` (parity checked).
pub fn pmf_for(statistic: Statistic, n: u64) -> Result<ExactPmf> {
    let m = statistic.m_for_n(n)?;
    match statistic {
        Statistic::Returns => pmf_returns(m),
        Statistic::Max => pmf_max(n),
        Statistic::HalfMax => pmf_halfmax(m),
        Statistic::SignChanges => pmf_signchanges(m),
    }
}

/// `E[X]`, exact.
pub fn mean_exact(pmf: &ExactPmf) -> BigRational {
    let total = pmf
        .support()
        .zip(pmf.numerators())
        .fold(BigInt::zero(), |acc, (k, num)| {
            acc + BigInt::from(k) * BigInt::from(num.clone())
        });
    BigRational::new(total, BigInt::from(pmf.denominator().clone()))
}

/// Statistic value of one path given as step bits (bit `i` set means `+1`
/// at step `i + 1`).
pub fn path_statistic(statistic: Statistic, bits: u64, n: u32) -> u64 {
    let mut s: i64 = 0;
    let mut prev: i64 = 0;
    let mut max: i64 = 0;
    let mut returns = 0u64;
    let mut changes = 0u64;
    for i in 0..n {
        let next = s + if (bits >> i) & 1 == 1 { 1 } else { -1 };
        if i >= 1 && prev * next < 0 {
            // k = i, comparing S_{k-1} and S_{k+1}
            changes += 1;
        }
        prev = s;
        s = next;
        max = max.max(s);
        if s == 0 {
            returns += 1;
        }
    }
    match statistic {
        Statistic::Returns => returns,
        Statistic::Max => max as u64,
        Statistic::HalfMax => ((max + 1) / 2) as u64,
        Statistic::SignChanges => changes,
    }
}

/// Law of `statistic` by enumerating all `2^n` paths. Independent of the
/// closed forms above.
pub fn brute_force_pmf(statistic: Statistic, n: u32) -> Result<ExactPmf> {
    if n > ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge {
            n,
            limit: ENUMERATION_LIMIT,
        });
    }
    if n == 0 {
        return domain("enumeration needs n >= 1");
    }
    let top = statistic.max_value(n as u64) as usize;
    let mut counts = vec![0u64; top + 1];
    for bits in 0..(1u64 << n) {
        counts[path_statistic(statistic, bits, n) as usize] += 1;
    }
    Ok(ExactPmf {
        lower: 0,
        numerators: counts.into_iter().map(BigUint::from).collect(),
        denominator: pow2(n as u64),
        statistic: None,
    }
    .tagged(statistic))
}

/// One moment inequality: exact expectation against a real bound.
#[derive(Debug, Clone, Serialize)]
pub struct MomentCheck {
    pub name: &'static str,
    pub exact: String,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentReport {
    pub m: u64,
    pub checks: Vec<MomentCheck>,
}

impl MomentReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn outward_check(name: &'static str, exact: BigRational, bound: f64) -> MomentCheck {
    let value = exact.to_f64().unwrap_or(f64::NAN);
    // Round the expectation up and the bound down before comparing.
    let hi = value.next_up();
    let lo = (bound * (1.0 - 4.0 * f64::EPSILON)).next_down();
    MomentCheck {
        name,
        exact: exact.to_string(),
        value,
        bound,
        passed: hi <= lo,
    }
}

/// Checks `E[K_n] <= sqrt(2/pi) sqrt(n)`, `E[V] <= sqrt(2/pi)` and
/// `E[C_{2m+1}] <= sqrt(m/pi) + 1 / (2 sqrt(pi m))`.
pub fn moment_bounds_check(m: u64) -> Result<MomentReport> {
    require_m(m, "moment_bounds_check")?;
    let n = 2 * m;
    let pi = std::f64::consts::PI;
    let mf = m as f64;

    let e_returns = mean_exact(&pmf_returns(m)?);
    let e_halfmax = mean_exact(&pmf_halfmax(m)?);
    let e_changes = mean_exact(&pmf_signchanges(m)?);

    Ok(MomentReport {
        m,
        checks: vec![
            outward_check(
                "E[K_n] <= sqrt(2/pi) sqrt(n)",
                e_returns,
                SQRT_2_OVER_PI * (n as f64).sqrt(),
            ),
            // E[V] = 2 E[N_n] / sqrt(n), compared after multiplying through by sqrt(n).
            outward_check(
                "E[V] <= sqrt(2/pi)",
                e_halfmax * BigRational::new(BigInt::from(2), BigInt::one()),
                SQRT_2_OVER_PI * (n as f64).sqrt(),
            ),
            outward_check(
                "E[C_2m+1] <= sqrt(m/pi) + 1/(2 sqrt(pi m))",
                e_changes,
                (mf / pi).sqrt() + 0.5 / (pi * mf).sqrt(),
            ),
        ],
    })
}
