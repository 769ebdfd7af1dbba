//! Gauss-Legendre rules.

/// Points and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "quadrature needs at least one point");
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        points[i] = -x;
        points[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        points[n / 2] = 0.0;
    }
    (points, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, dp)
}

/// Tensor-product rule on `[-1, 1]^2` as `(xi, eta, weight)`.
pub fn gauss_square(n: usize) -> Vec<(f64, f64, f64)> {
    let (p, w) = gauss_legendre(n);
    let mut out = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            out.push((p[i], p[j], w[i] * w[j]));
        }
    }
    out
}

/// Rule mapped onto `[lo, hi]`, returned as `(z, weight)`.
pub fn gauss_interval(n: usize, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let (p, w) = gauss_legendre(n);
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    p.iter().zip(&w).map(|(&x, &wx)| (mid + half * x, half * wx)).collect()
}

/// Composite Gauss rule on `[lo, hi]` for a vector integrand. A panel is
/// bisected until its two halves agree with it to `tol` times `∫|f|` over the
/// whole interval, or `max_depth` bisections are reached.
pub fn integrate_adaptive<const M: usize, E>(
    f: &mut impl FnMut(f64) -> Result<[f64; M], E>,
    lo: f64,
    hi: f64,
    points: usize,
    tol: f64,
    max_depth: usize,
) -> Result<[f64; M], E> {
    let (p, w) = gauss_legendre(points);
    let mut panel = |a: f64, b: f64| -> Result<([f64; M], f64), E> {
        let (half, mid) = (0.5 * (b - a), 0.5 * (b + a));
        let mut sum = [0.0; M];
        let mut abs = 0.0;
        for (x, wx) in p.iter().zip(&w) {
            let v = f(mid + half * x)?;
            for c in 0..M {
                sum[c] += half * wx * v[c];
                abs += (half * wx * v[c]).abs();
            }
        }
        Ok((sum, abs))
    };
    let (whole, scale) = panel(lo, hi)?;
    let mut stack = vec![(lo, hi, whole, 0usize)];
    let mut total = [0.0; M];
    while let Some((a, b, est, depth)) = stack.pop() {
        let m = 0.5 * (a + b);
        let (left, _) = panel(a, m)?;
        let (right, _) = panel(m, b)?;
        let diff = (0..M).map(|c| (left[c] + right[c] - est[c]).abs()).fold(0.0, f64::max);
        if depth >= max_depth || diff <= tol * scale {
            for c in 0..M {
                total[c] += left[c] + right[c];
            }
        } else {
            stack.push((m, b, right, depth + 1));
            stack.push((a, m, left, depth + 1));
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn three_point_rule() {
        let (p, w) = gauss_legendre(3);
        let r = (0.6f64).sqrt();
        assert_relative_eq!(p[0], -r, max_relative = 1e-15);
        assert_eq!(p[1], 0.0);
        assert_relative_eq!(p[2], r, max_relative = 1e-15);
        assert_relative_eq!(w[0], 5.0 / 9.0, max_relative = 1e-15);
        assert_relative_eq!(w[1], 8.0 / 9.0, max_relative = 1e-15);
    }

    #[test]
    fn rules_integrate_polynomials_exactly() {
        for n in 1..=10 {
            let (p, w) = gauss_legendre(n);
            for deg in 0..2 * n {
                let q: f64 = p.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-14, "n={n} deg={deg}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn interval_mapping() {
        let s: f64 = gauss_interval(4, 1.0, 3.0).iter().map(|(z, w)| w * z * z * z).sum();
        assert_relative_eq!(s, (81.0 - 1.0) / 4.0, max_relative = 1e-14);
    }

    #[test]
    fn adaptive_rule_resolves_a_near_pole() {
        // ∫_0^1 dx / (x + 1e-3) = ln(1001 / 1)
        let mut f = |x: f64| -> Result<[f64; 1], ()> { Ok([1.0 / (x + 1e-3)]) };
        let v = integrate_adaptive(&mut f, 0.0, 1.0, 8, 1e-13, 30).unwrap();
        assert_relative_eq!(v[0], 1001.0f64.ln(), max_relative = 1e-12);
        let single: f64 = gauss_interval(8, 0.0, 1.0).iter().map(|(x, w)| w / (x + 1e-3)).sum();
        assert!((single - 1001.0f64.ln()).abs() > 1e-3);
    }
}
