//! Discrete Stein characterizations of laws on a finite integer interval.
//!
//! For a pmf `p` positive on `I = [a, b]` and any weight `c` nonzero on `I`,
//! `X ~ p` iff `E[c(X-1) Δg(X-1) + γ(X) g(X)] = 0` for every `g` with
//! `g(a-1) = 0`, where `ψ = Δp / p` and `γ = c ψ + Δc(· - 1)`. Everything
//! here is exact rational arithmetic; "residual zero" is a literal equality.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::srw_laws::{pmf_halfmax, pmf_returns, pmf_signchanges, ExactPmf};
use crate::statistic::Statistic;

/// An integer sequence `g: Z -> Q`.
#[derive(Clone)]
pub enum TestSequence {
    /// `g_j(k) = 1{k >= j}`.
    Indicator(i64),
    Function(Arc<dyn Fn(i64) -> BigRational + Send + Sync>),
}

impl fmt::Debug for TestSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestSequence::Indicator(j) => write!(f, "Indicator(k >= {j})"),
            TestSequence::Function(_) => f.write_str("Function(..)"),
        }
    }
}

impl TestSequence {
    pub fn indicator(j: i64) -> Self {
        TestSequence::Indicator(j)
    }

    pub fn from_fn(g: impl Fn(i64) -> BigRational + Send + Sync + 'static) -> Self {
        TestSequence::Function(Arc::new(g))
    }

    pub fn constant(value: BigRational) -> Self {
        TestSequence::from_fn(move |_| value.clone())
    }

    pub fn identity() -> Self {
        TestSequence::from_fn(|k| BigRational::from_integer(BigInt::from(k)))
    }

    pub fn eval(&self, k: i64) -> BigRational {
        match self {
            TestSequence::Indicator(j) => {
                if k >= *j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }
            TestSequence::Function(g) => g(k),
        }
    }
}

/// `Δg(k) = g(k+1) - g(k)`.
pub fn forward_diff(g: &TestSequence, k: i64) -> BigRational {
    g.eval(k + 1) - g.eval(k)
}

/// The pair `(c, γ)` on `[a, b]`, without the pmf it was derived from.
#[derive(Debug, Clone, PartialEq)]
pub struct SteinOperator {
    pub lower: i64,
    pub upper: i64,
    /// `c(k)` for `k = a-1 ..= b`.
    pub c: Vec<BigRational>,
    /// `γ(k)` for `k = a ..= b`.
    pub gamma: Vec<BigRational>,
}

impl SteinOperator {
    pub fn c_at(&self, k: i64) -> &BigRational {
        &self.c[(k - self.lower + 1) as usize]
    }

    pub fn gamma_at(&self, k: i64) -> &BigRational {
        &self.gamma[(k - self.lower) as usize]
    }
}

/// A pmf together with its weight function `c` and the derived `ψ`, `γ`.
#[derive(Debug, Clone)]
pub struct CharacterizationSpec {
    pmf: ExactPmf,
    psi: Vec<BigRational>,
    operator: SteinOperator,
}

impl CharacterizationSpec {
    /// Builds the characterization of `pmf` with weight `c` given on `[a-1, b]`.
    pub fn new(pmf: ExactPmf, c: impl Fn(i64) -> BigRational) -> Result<Self> {
        let (a, b) = (pmf.lower(), pmf.upper());
        let masses = pmf.masses();
        if masses.iter().any(|p| !p.is_positive()) {
            return domain("characterization needs a pmf positive on its whole interval");
        }
        let c_values: Vec<BigRational> = ((a - 1)..=b).map(&c).collect();
        if c_values[1..].iter().any(Zero::is_zero) {
            return domain("weight c must be nonzero on the support");
        }
        let psi: Vec<BigRational> = (0..masses.len())
            .map(|i| {
                let next = masses.get(i + 1).cloned().unwrap_or_else(BigRational::zero);
                (next - &masses[i]) / &masses[i]
            })
            .collect();
        let gamma = (0..masses.len())
            .map(|i| &c_values[i + 1] * &psi[i] + &c_values[i + 1] - &c_values[i])
            .collect();
        Ok(CharacterizationSpec {
            pmf,
            psi,
            operator: SteinOperator {
                lower: a,
                upper: b,
                c: c_values,
                gamma,
            },
        })
    }

    pub fn pmf(&self) -> &ExactPmf {
        &self.pmf
    }

    pub fn operator(&self) -> &SteinOperator {
        &self.operator
    }

    pub fn lower(&self) -> i64 {
        self.operator.lower
    }

    pub fn upper(&self) -> i64 {
        self.operator.upper
    }

    pub fn c_at(&self, k: i64) -> &BigRational {
        self.operator.c_at(k)
    }

    /// `ψ(k) = (p(k+1) - p(k)) / p(k)` on `[a, b]` (`ψ(b) = -1`).
    pub fn psi_at(&self, k: i64) -> &BigRational {
        &self.psi[(k - self.lower()) as usize]
    }

    pub fn gamma_at(&self, k: i64) -> &BigRational {
        self.operator.gamma_at(k)
    }
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// The characterization used for each statistic with parameter `m`:
/// returns `c(r) = 2m - r`, halfmax `c(s) = m + s + 1`, sign changes
/// `c(s) = m + s + 2`. The running maximum is handled through `halfmax`.
pub fn make_spec(statistic: Statistic, m: u64) -> Result<CharacterizationSpec> {
    let mi = m as i64;
    match statistic {
        Statistic::Returns => CharacterizationSpec::new(pmf_returns(m)?, |r| int(2 * mi - r)),
        Statistic::HalfMax => CharacterizationSpec::new(pmf_halfmax(m)?, |s| int(mi + s + 1)),
        Statistic::SignChanges => {
            CharacterizationSpec::new(pmf_signchanges(m)?, |s| int(mi + s + 2))
        }
        Statistic::Max => Err(Error::Domain(
            "the maximum has no characterization of its own (psi vanishes on odd r); use halfmax"
                .into(),
        )),
    }
}

/// `E[c(X-1) Δg(X-1) + γ(X) g(X)]` under the spec's pmf.
pub fn stein_residual(spec: &CharacterizationSpec, g: &TestSequence) -> Result<BigRational> {
    let (a, b) = (spec.lower(), spec.upper());
    let g_prev = g.eval(a - 1);
    if !g_prev.is_zero() {
        return domain(format!("test sequence must vanish at a - 1 = {}", a - 1));
    }
    let values: Vec<BigRational> = (a..=b).map(|k| g.eval(k)).collect();
    let mut weights = Vec::with_capacity(values.len());
    let mut prev = g_prev;
    for (k, gk) in (a..=b).zip(&values) {
        let w = spec.c_at(k - 1) * (gk - &prev) + spec.gamma_at(k) * gk;
        weights.push(w);
        prev = gk.clone();
    }
    let pmf = spec.pmf();
    let den = BigInt::from(pmf.denominator().clone());
    if weights.iter().all(|w| w.is_integer()) {
        let total = weights
            .iter()
            .zip(pmf.numerators())
            .fold(BigInt::zero(), |acc, (w, num)| {
                acc + w.numer() * BigInt::from(num.clone())
            });
        return Ok(BigRational::new(total, den));
    }
    let total = weights
        .iter()
        .zip(pmf.numerators())
        .fold(BigRational::zero(), |acc, (w, num)| {
            acc + w * BigRational::from_integer(BigInt::from(num.clone()))
        });
    Ok(total / BigRational::from_integer(den))
}

/// Residuals for every indicator basis element `g_j = 1{k >= j}`, `j` in `[a, b]`.
pub fn basis_residuals(spec: &CharacterizationSpec) -> Vec<(i64, BigRational)> {
    (spec.lower()..=spec.upper())
        .into_par_iter()
        .map(|j| {
            let r = stein_residual(spec, &TestSequence::indicator(j))
                .expect("indicators with j >= a vanish at a - 1");
            (j, r)
        })
        .collect()
}

/// Recovers the unique pmf on `[a, b]` annihilated by the operator on the
/// indicator basis, by exact elimination and normalization.
pub fn recover_pmf(operator: &SteinOperator) -> Result<ExactPmf> {
    let (a, b) = (operator.lower, operator.upper);
    if b < a {
        return domain("empty interval");
    }
    if (a..=b).any(|k| operator.c_at(k).is_zero()) {
        return domain("weight c must be nonzero on the support");
    }
    let size = (b - a + 1) as usize;
    // row j: c(j-1) p(j) + sum_{k >= j} γ(k) p(k) = 0
    let mut rows: Vec<Vec<BigRational>> = (a..=b)
        .map(|j| {
            (a..=b)
                .map(|k| {
                    let mut entry = BigRational::zero();
                    if k == j {
                        entry += operator.c_at(j - 1);
                    }
                    if k >= j {
                        entry += operator.gamma_at(k);
                    }
                    entry
                })
                .collect()
        })
        .collect();

    let pivots = row_reduce(&mut rows, size);
    let nullity = size - pivots.len();
    if nullity != 1 {
        return Err(Error::SingularSystem { nullity });
    }
    let free = (0..size)
        .find(|col| !pivots.iter().any(|(_, pc)| pc == col))
        .expect("one free column");
    let mut solution = vec![BigRational::zero(); size];
    solution[free] = BigRational::one();
    for (row, col) in &pivots {
        solution[*col] = -rows[*row][free].clone();
    }
    let total: BigRational = solution.iter().cloned().sum();
    if total.is_zero() {
        return Err(Error::SingularSystem { nullity });
    }
    let masses: Vec<BigRational> = solution.into_iter().map(|v| v / &total).collect();
    ExactPmf::from_masses(a, &masses)
}

/// Reduced row echelon form in place; returns `(row, pivot column)` pairs.
fn row_reduce(rows: &mut [Vec<BigRational>], cols: usize) -> Vec<(usize, usize)> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].recip();
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &factor * pv;
                }
            }
        }
        pivots.push((r, col));
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

/// Outcome of checking a characterization on its indicator basis and
/// recovering the pmf from the operator alone.
#[derive(Debug, Clone, Serialize)]
pub struct CharacterizationReport {
    pub statistic: Option<Statistic>,
    pub basis_size: usize,
    /// Basis indices `j` with a nonzero residual, and the residual as `p/q`.
    pub nonzero_residuals: Vec<(i64, String)>,
    pub recovered_exactly: bool,
}

impl CharacterizationReport {
    pub fn passed(&self) -> bool {
        self.nonzero_residuals.is_empty() && self.recovered_exactly
    }
}

pub fn verify_characterization(spec: &CharacterizationSpec) -> CharacterizationReport {
    let residuals = basis_residuals(spec);
    let recovered_exactly = matches!(recover_pmf(spec.operator()), Ok(p) if &p == spec.pmf());
    CharacterizationReport {
        statistic: spec.pmf().statistic(),
        basis_size: residuals.len(),
        nonzero_residuals: residuals
            .into_iter()
            .filter(|(_, r)| !r.is_zero())
            .map(|(j, r)| (j, r.to_string()))
            .collect(),
        recovered_exactly,
    }
}

/// `E[X]` read off the identity with `g = 1{k >= a}`, when `γ` is affine on
/// `[a+1, b]` (as for all three statistics). Needs `b >= a + 2`.
pub fn mean_via_identity(spec: &CharacterizationSpec) -> Option<BigRational> {
    let (a, b) = (spec.lower(), spec.upper());
    if b < a + 2 {
        return None;
    }
    let alpha = spec.gamma_at(a + 2) - spec.gamma_at(a + 1);
    if alpha.is_zero() {
        return None;
    }
    let beta = spec.gamma_at(a + 1) - &alpha * int(a + 1);
    if ((a + 1)..=b).any(|k| spec.gamma_at(k) != &(&alpha * int(k) + &beta)) {
        return None;
    }
    let pa = spec.pmf().mass(a);
    // 0 = c(a-1) p(a) + γ(a) p(a) + α (E[X] - a p(a)) + β (1 - p(a))
    let rest = (spec.c_at(a - 1) + spec.gamma_at(a)) * &pa - &alpha * int(a) * &pa
        + &beta * (BigRational::one() - &pa);
    Some(-rest / alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::srw_laws::mean_exact;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn forward_diff_examples() {
        let constant = TestSequence::constant(q(7, 3));
        let identity = TestSequence::identity();
        let step = TestSequence::indicator(0);
        for k in -3..5 {
            assert!(forward_diff(&constant, k).is_zero());
            assert_eq!(forward_diff(&identity, k), q(1, 1));
        }
        assert_eq!(forward_diff(&step, -1), q(1, 1));
        for k in 0..5 {
            assert!(forward_diff(&step, k).is_zero());
        }
    }

    #[test]
    fn returns_spec_matches_closed_forms() {
        for m in 1..=20u64 {
            let spec = make_spec(Statistic::Returns, m).unwrap();
            let mi = m as i64;
            for r in 0..=mi {
                assert_eq!(spec.psi_at(r), &q(-r, 2 * mi - r));
                assert_eq!(spec.gamma_at(r), &q(-(r + 1), 1));
            }
        }
        let spec = make_spec(Statistic::Returns, 1).unwrap();
        assert_eq!(spec.gamma_at(0), &q(-1, 1));
        assert_eq!(spec.gamma_at(1), &q(-2, 1));
    }

    #[test]
    fn halfmax_spec_matches_closed_forms() {
        for m in 1..=20u64 {
            let spec = make_spec(Statistic::HalfMax, m).unwrap();
            let mi = m as i64;
            for s in 1..=mi {
                assert_eq!(spec.psi_at(s), &q(-(2 * s + 1), mi + s + 1));
                assert_eq!(spec.gamma_at(s), &q(-2 * s, 1));
            }
            // the atom at zero carries half the weight of its neighbours
            assert_eq!(spec.psi_at(0), &q(mi - 1, mi + 1));
            assert_eq!(spec.gamma_at(0), &q(mi, 1));
        }
    }

    #[test]
    fn signchange_spec_operator() {
        for m in 1..=20u64 {
            let spec = make_spec(Statistic::SignChanges, m).unwrap();
            let mi = m as i64;
            for s in 0..=mi {
                assert_eq!(spec.c_at(s - 1), &q(mi + 1 + s, 1));
                assert_eq!(spec.gamma_at(s), &q(-(2 * s + 1), 1));
            }
        }
    }

    #[test]
    fn max_has_no_spec() {
        assert!(make_spec(Statistic::Max, 3).is_err());
    }

    #[test]
    fn residual_zero_on_basis() {
        for stat in [
            Statistic::Returns,
            Statistic::HalfMax,
            Statistic::SignChanges,
        ] {
            for m in 1..=15 {
                let spec = make_spec(stat, m).unwrap();
                for (j, r) in basis_residuals(&spec) {
                    assert!(r.is_zero(), "{stat} m={m} j={j}: {r}");
                }
            }
        }
    }

    #[test]
    fn residual_requires_membership() {
        let spec = make_spec(Statistic::Returns, 3).unwrap();
        assert!(stein_residual(&spec, &TestSequence::indicator(-1)).is_err());
    }

    #[test]
    fn residual_detects_perturbation() {
        let spec = make_spec(Statistic::Returns, 4).unwrap();
        let mut masses = spec.pmf().masses();
        masses[0] -= q(1, 1000);
        masses[1] += q(1, 1000);
        let perturbed = ExactPmf::from_masses(0, &masses).unwrap();
        let fake = CharacterizationSpec {
            pmf: perturbed,
            psi: spec.psi.clone(),
            operator: spec.operator.clone(),
        };
        let r = stein_residual(&fake, &TestSequence::indicator(0)).unwrap();
        assert!(!r.is_zero());
    }

    #[test]
    fn rational_test_sequences() {
        let spec = make_spec(Statistic::SignChanges, 6).unwrap();
        let g = TestSequence::from_fn(|k| if k < 0 { q(0, 1) } else { q(k * k + 1, 3) });
        assert!(stein_residual(&spec, &g).unwrap().is_zero());
    }

    #[test]
    fn recover_examples() {
        let spec = make_spec(Statistic::Returns, 2).unwrap();
        let got = recover_pmf(spec.operator()).unwrap();
        assert_eq!(got.masses(), vec![q(3, 8), q(3, 8), q(1, 4)]);
        let got = recover_pmf(make_spec(Statistic::HalfMax, 1).unwrap().operator()).unwrap();
        assert_eq!(got.masses(), vec![q(1, 2), q(1, 2)]);
        let got = recover_pmf(make_spec(Statistic::SignChanges, 1).unwrap().operator()).unwrap();
        assert_eq!(got.masses(), vec![q(3, 4), q(1, 4)]);
    }

    #[test]
    fn characterization_report() {
        let report = verify_characterization(&make_spec(Statistic::HalfMax, 64).unwrap());
        assert_eq!(report.basis_size, 65);
        assert!(report.passed());
    }

    #[test]
    fn recover_reports_singular_system() {
        // γ ≡ 0 and c(b-1) ≠ 0 forces p = 0 everywhere.
        let op = SteinOperator {
            lower: 0,
            upper: 2,
            c: vec![q(1, 1); 4],
            gamma: vec![q(0, 1); 3],
        };
        assert!(matches!(
            recover_pmf(&op),
            Err(Error::SingularSystem { .. })
        ));
    }

    #[test]
    fn mean_drops_out_of_identity() {
        for stat in [
            Statistic::Returns,
            Statistic::HalfMax,
            Statistic::SignChanges,
        ] {
            for m in 2..=30 {
                let spec = make_spec(stat, m).unwrap();
                assert_eq!(
                    mean_via_identity(&spec).unwrap(),
                    mean_exact(spec.pmf()),
                    "{stat} m={m}"
                );
            }
        }
    }
}
