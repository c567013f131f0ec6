//! Bracketing root finding and unimodal maximization on an interval.

/// Root of an increasing function `f` on `[lo, hi]` with `f(lo) <= 0 <= f(hi)`.
///
/// Bisects until the bracket can no longer shrink in floating point or is
/// narrower than `tol`.
pub fn bisect_increasing(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= tol {
            break;
        }
        if f(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section search for the maximizer of a unimodal `f` on `[lo, hi]`.
///
/// Returns `(argmax, max)`. The endpoints are compared too, so a monotone `f`
/// yields the better endpoint.
pub fn golden_section_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        if c >= d {
            break;
        }
    }
    let mid = 0.5 * (a + b);
    [(mid, f(mid)), (lo, f(lo)), (hi, f(hi))]
        .into_iter()
        .fold((mid, f64::NEG_INFINITY), |best, cand| if cand.1 > best.1 { cand } else { best })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_finds_sqrt_two() {
        let r = bisect_increasing(|x| x * x - 2.0, 0.0, 2.0, 0.0);
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn golden_section_on_parabola() {
        let (x, fx) = golden_section_max(|x| -(x - 0.3) * (x - 0.3) + 1.0, 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((fx - 1.0).abs() < 1e-12);
    }

    #[test]
    fn golden_section_monotone_returns_endpoint() {
        let (x, _) = golden_section_max(|x| x, 0.0, 2.0, 1e-10);
        assert_eq!(x, 2.0);
    }
}
