//! Supremum search on an interval: uniform grid scan followed by
//! golden-section refinement around the best grid point.

use crate::error::{domain, Result};

const INV_GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Location and value of a numerically located supremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Supremum {
    pub argmax: f64,
    pub max: f64,
}

/// Grid density and refinement width for [`sup_search`].
#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub grid_points: usize,
    pub resolution: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            grid_points: 400,
            resolution: 1e-6,
        }
    }
}

/// Locates `sup f` on `[lo, hi]`.
///
/// Exact for unimodal `f` up to `resolution`; for general `f` the result is
/// the grid maximum refined within its neighbouring cells.
pub fn sup_search<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    options: SearchOptions,
) -> Result<Supremum> {
    if !(lo.is_finite() && hi.is_finite()) || hi < lo {
        return domain(format!("empty or unbounded search interval [{lo}, {hi}]"));
    }
    if hi == lo {
        return Ok(Supremum {
            argmax: lo,
            max: f(lo),
        });
    }
    let points = options.grid_points.max(2);
    let step = (hi - lo) / (points - 1) as f64;
    let mut best = Supremum {
        argmax: lo,
        max: f(lo),
    };
    for i in 1..points {
        let x = if i == points - 1 {
            hi
        } else {
            lo + step * i as f64
        };
        let v = f(x);
        if v > best.max {
            best = Supremum { argmax: x, max: v };
        }
    }

    let left = (best.argmax - step).max(lo);
    let right = (best.argmax + step).min(hi);
    let refined = golden_section_max(&f, left, right, options.resolution);
    if refined.max > best.max {
        best = refined;
    }
    Ok(best)
}

/// Golden-section maximisation on `[a, b]` until the bracket is narrower
/// than `tol`. Endpoints are included as candidates.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Supremum {
    let (mut a, mut b) = (a, b);
    let mut best = {
        let (fa, fb) = (f(a), f(b));
        if fa >= fb {
            Supremum { argmax: a, max: fa }
        } else {
            Supremum { argmax: b, max: fb }
        }
    };
    let mut c = b - INV_GOLDEN * (b - a);
    let mut d = a + INV_GOLDEN * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a) > tol.max(f64::EPSILON * (a.abs() + b.abs())) {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_GOLDEN * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_GOLDEN * (b - a);
            fd = f(d);
        }
    }
    for (x, v) in [(c, fc), (d, fd)] {
        if v > best.max {
            best = Supremum { argmax: x, max: v };
        }
    }
    best
}
