//! Composite Simpson quadrature on uniform samples.

use num_complex::Complex64;

/// Threshold below which an integrand is considered negligible at the ends.
pub const TAIL_TOLERANCE: f64 = 1e-16;

/// Composite Simpson rule for an odd number of uniformly spaced samples.
/// With an even count the last interval is closed by a cubic correction.
pub fn simpson(v: &[f64], h: f64) -> f64 {
    let n = v.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (v[0] + v[1]),
        3 => h / 3.0 * (v[0] + 4.0 * v[1] + v[2]),
        _ if n % 2 == 1 => {
            let mut s = v[0] + v[n - 1];
            for (j, x) in v.iter().enumerate().take(n - 1).skip(1) {
                s += if j % 2 == 1 { 4.0 * x } else { 2.0 * x };
            }
            s * h / 3.0
        }
        _ => {
            // Simpson on the first n-1 samples plus a cubic rule for the last interval.
            let k = n - 1;
            let tail = h / 24.0 * (v[k - 3] - 5.0 * v[k - 2] + 19.0 * v[k - 1] + 9.0 * v[k]);
            simpson(&v[..k], h) + tail
        }
    }
}

/// Simpson rule for complex samples.
pub fn simpson_complex(v: &[Complex64], h: f64) -> Complex64 {
    let re: Vec<f64> = v.iter().map(|z| z.re).collect();
    let im: Vec<f64> = v.iter().map(|z| z.im).collect();
    Complex64::new(simpson(&re, h), simpson(&im, h))
}

/// Simpson approximation of the integral of a product a*b.
pub fn dot(a: &[f64], b: &[f64], h: f64) -> f64 {
    let prod: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
    simpson(&prod, h)
}

/// Simpson approximation of Re of the integral of a * conj(b).
pub fn real_pairing(a: &[Complex64], b: &[Complex64], h: f64) -> f64 {
    let prod: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x * y.conj()).re).collect();
    simpson(&prod, h)
}

/// Integrates `f` over [a, b] with `n` Simpson panels (n rounded up to even).
pub fn simpson_fn(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n.max(2) + n % 2;
    let h = (b - a) / n as f64;
    let samples: Vec<f64> = (0..=n).map(|j| f(a + j as f64 * h)).collect();
    simpson(&samples, h)
}

/// True when both end samples are below the tail tolerance.
pub fn tails_negligible(v: &[f64]) -> bool {
    match (v.first(), v.last()) {
        (Some(a), Some(b)) => a.abs() < TAIL_TOLERANCE && b.abs() < TAIL_TOLERANCE,
        _ => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_cubics() {
        let h = 0.25;
        let v: Vec<f64> = (0..9).map(|j| (j as f64 * h).powi(3)).collect();
        assert!((simpson(&v, h) - 2.0f64.powi(4) / 4.0).abs() < 1e-13);
        let w: Vec<f64> = (0..10).map(|j| (j as f64 * h).powi(3)).collect();
        assert!((simpson(&w, h) - 2.25f64.powi(4) / 4.0).abs() < 1e-13);
    }

    #[test]
    fn gaussian_integral() {
        let s = simpson_fn(|x| (-x * x).exp(), -10.0, 10.0, 2000);
        assert!((s - std::f64::consts::PI.sqrt()).abs() < 1e-13);
    }
}
