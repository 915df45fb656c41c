//! Oscillator special functions: normalized Hermite functions, generalized
//! Laguerre polynomials and Fock-space matrix elements of the displacement
//! operator `D(z) = exp(z a† − z* a)`.

use num_complex::Complex64;

/// Normalized Hermite function `h_n(ξ) = (2ⁿ n! √π)^{-1/2} H_n(ξ) e^{-ξ²/2}`,
/// evaluated with the stable three-term recurrence
/// `h_{n+1} = √(2/(n+1)) ξ h_n − √(n/(n+1)) h_{n−1}`.
pub fn hermite_function(n: usize, xi: f64) -> f64 {
    let h0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * xi * xi).exp();
    if n == 0 {
        return h0;
    }
    let mut prev = h0;
    let mut cur = std::f64::consts::SQRT_2 * xi * h0;
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * xi * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// All normalized Hermite functions `h_0 … h_{count-1}` at `ξ`.
pub fn hermite_functions(count: usize, xi: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    out.push(std::f64::consts::PI.powf(-0.25) * (-0.5 * xi * xi).exp());
    if count > 1 {
        out.push(std::f64::consts::SQRT_2 * xi * out[0]);
    }
    for k in 1..count.saturating_sub(1) {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * xi * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// Landau-level mode `v_n(u) = ℓ^{-1/2} h_n(u/ℓ)` of width `ell`, normalized
/// so that `∫ v_n(u)² du = 1`.
pub fn landau_mode(n: usize, u: f64, ell: f64) -> f64 {
    hermite_function(n, u / ell) / ell.sqrt()
}

/// Generalized Laguerre polynomial `L_n^{(α)}(x)` by upward recurrence.
pub fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `⟨n| exp(z a† − z* a) |n'⟩` in the number basis where `a|n⟩ = √n |n−1⟩`.
pub fn displacement_element(n: usize, np: usize, z: Complex64) -> Complex64 {
    let x = z.norm_sqr();
    let gauss = (-0.5 * x).exp();
    if n >= np {
        let d = n - np;
        let ratio = factorial_ratio_sqrt(np, n);
        z.powu(d as u32) * (ratio * gauss * laguerre(np, d as f64, x))
    } else {
        let d = np - n;
        let ratio = factorial_ratio_sqrt(n, np);
        (-z.conj()).powu(d as u32) * (ratio * gauss * laguerre(n, d as f64, x))
    }
}

/// `√(small!/large!)` for `small ≤ large`.
fn factorial_ratio_sqrt(small: usize, large: usize) -> f64 {
    let mut r = 1.0;
    for k in (small + 1)..=large {
        r /= k as f64;
    }
    r.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peak_and_node_values() {
        let ell = 0.7;
        let peak = landau_mode(0, 0.0, ell);
        assert!((peak - (std::f64::consts::PI * ell * ell).powf(-0.25)).abs() < 1e-14);
        assert!(landau_mode(1, 0.0, ell).abs() < 1e-15);
    }

    #[test]
    fn quadrature_normalization_of_second_mode() {
        let ell = 1.3;
        let h = 0.01;
        let mut s = 0.0;
        let mut u = -15.0;
        while u <= 15.0 {
            s += landau_mode(2, u, ell).powi(2) * h;
            u += h;
        }
        assert!((s - 1.0).abs() < 1e-10, "{s}");
    }

    #[test]
    fn physicist_recurrence_holds() {
        // H_{n+1} = 2ξ H_n − 2n H_{n−1} rewritten for normalized functions.
        for &xi in &[-2.3, -0.4, 0.0, 0.9, 3.1] {
            let h = hermite_functions(8, xi);
            for n in 1..7 {
                let nf = n as f64;
                let lhs = h[n + 1];
                let rhs = (2.0 / (nf + 1.0)).sqrt() * xi * h[n] - (nf / (nf + 1.0)).sqrt() * h[n - 1];
                assert!((lhs - rhs).abs() < 1e-12);
                assert!((hermite_function(n, xi) - h[n]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn laguerre_low_orders() {
        let x = 0.37;
        assert!((laguerre(1, 2.0, x) - (3.0 - x)).abs() < 1e-14);
        let l2 = 0.5 * (x * x - 2.0 * (2.0 + 2.0) * x + (2.0 + 1.0) * (2.0 + 2.0));
        assert!((laguerre(2, 2.0, x) - l2).abs() < 1e-14);
    }

    #[test]
    fn displacement_is_unitary_on_large_block() {
        let z = Complex64::new(0.3, -0.45);
        let dim = 40;
        for i in 0..5 {
            for j in 0..5 {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..dim {
                    s += displacement_element(k, i, z).conj() * displacement_element(k, j, z);
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((s - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn displacement_matches_position_space_overlap() {
        // ⟨h_n| e^{d∂} e^{iqξ} |h_m⟩ = e^{iqd/2} ⟨n|D(z)|m⟩ with z = (−d + iq)/√2.
        let (d, q) = (0.6, -0.8);
        let z = Complex64::new(-d, q) / std::f64::consts::SQRT_2;
        for n in 0..4 {
            for m in 0..4 {
                let h = 0.005;
                let mut s = Complex64::new(0.0, 0.0);
                let mut xi = -14.0;
                while xi <= 14.0 {
                    s += hermite_function(n, xi - d) * Complex64::from_polar(1.0, q * xi) * hermite_function(m, xi) * h;
                    xi += h;
                }
                let expect = Complex64::from_polar(1.0, 0.5 * q * d) * displacement_element(n, m, z);
                assert!((s - expect).norm() < 1e-10, "n={n} m={m} {s} {expect}");
            }
        }
    }
}
