//! Derivative-free scalar maximisation on an interval.

/// Golden-section search for the maximum of a unimodal function on
/// `[lo, hi]`, shrinking the bracket to `tol` and returning its midpoint.
pub fn golden_section_max<F>(f: F, lo: f64, hi: f64, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    debug_assert!(lo <= hi);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let inv_phi2 = 1.0 - inv_phi;
    let mut a = lo;
    let mut b = hi;
    let mut x1 = a + inv_phi2 * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + inv_phi2 * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_maximum() {
        let x = golden_section_max(|x| -(x - 2.0) * (x - 2.0), 0.0, 5.0, 1e-10);
        assert!((x - 2.0).abs() < 1e-8);
    }

    #[test]
    fn boundary_maxima() {
        let left = golden_section_max(|x| -x, 0.0, 3.0, 1e-10);
        assert!(left < 1e-8);
        let right = golden_section_max(|x| x, 0.0, 3.0, 1e-10);
        assert!((right - 3.0).abs() < 1e-8);
    }

    #[test]
    fn concave_power_objective() {
        // max of 4*sqrt(x) - x at x = 4
        let x = golden_section_max(|x: f64| 4.0 * x.sqrt() - x, 0.0, 10.0, 1e-10);
        assert!((x - 4.0).abs() < 1e-7);
    }
}
