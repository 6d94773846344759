//! Independent numerical oracles shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

/// Tanh-sinh quadrature of `f` over `[a, b]`; `f` receives the point and its
/// distances to both endpoints so log singularities stay accurate.
pub fn tanh_sinh(a: f64, b: f64, f: impl Fn(f64, f64, f64) -> f64) -> f64 {
    let h = 1.0 / 128.0;
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for k in -(6 * 128)..=(6 * 128) {
        let u = k as f64 * h;
        let s = FRAC_PI_2 * u.sinh();
        let w = FRAC_PI_2 * u.cosh() / s.cosh().powi(2);
        if w < 1e-300 {
            continue;
        }
        let to_b = half * 2.0 / ((2.0 * s).exp() + 1.0);
        let to_a = half * 2.0 / ((-2.0 * s).exp() + 1.0);
        if to_a <= 0.0 || to_b <= 0.0 {
            continue;
        }
        let x = if to_a < to_b { a + to_a } else { b - to_b };
        sum += w * f(x, to_a, to_b);
    }
    sum * half * h
}

pub fn lobachevsky_by_quadrature(x: f64) -> f64 {
    // log|2 sin t| with sin evaluated from the nearer of 0 and π
    -tanh_sinh(0.0, x, |t, to_zero, _| {
        let s = if t < FRAC_PI_2 { to_zero.sin() } else { (PI - t).sin() };
        (2.0 * s).ln()
    })
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            (0.5 * (x + 1.0), 0.5 * w)
        })
        .collect()
}

pub type V4 = [f64; 4];

pub fn mink(u: &V4, v: &V4) -> f64 {
    -u[0] * v[0] + u[1] * v[1] + u[2] * v[2] + u[3] * v[3]
}

pub fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// A vector Minkowski-orthogonal to the three given ones (cofactor expansion
/// against the lowered vectors).
pub fn orthogonal_to(a: &V4, b: &V4, c: &V4) -> V4 {
    let low = |v: &V4| [-v[0], v[1], v[2], v[3]];
    let rows = [low(a), low(b), low(c)];
    let mut out = [0.0; 4];
    for (i, slot) in out.iter_mut().enumerate() {
        let cols: Vec<usize> = (0..4).filter(|&j| j != i).collect();
        let m = [0, 1, 2].map(|r| [rows[r][cols[0]], rows[r][cols[1]], rows[r][cols[2]]]);
        *slot = if i % 2 == 0 { det3(m) } else { -det3(m) };
    }
    out
}

/// Volume of the orthoscheme by integrating the Klein-model density
/// `(1 - |x|²)^{-2}` over its straight tetrahedron.
pub fn orthoscheme_by_integration(alpha: f64, beta: f64, gamma: f64, rule: &[(f64, f64)]) -> f64 {
    let z2 = (1.0 - (beta.cos() / alpha.sin()).powi(2)).sqrt();
    let z3 = -gamma.cos() / z2;
    let t3 = (z3 * z3 - 1.0).sqrt();
    let n: [V4; 4] = [
        [0.0, 1.0, 0.0, 0.0],
        [0.0, -alpha.cos(), alpha.sin(), 0.0],
        [0.0, 0.0, -beta.cos() / alpha.sin(), z2],
        [t3, 0.0, 0.0, z3],
    ];
    // Gram matrix sanity: the construction must reproduce the angles
    assert!((mink(&n[0], &n[1]) + alpha.cos()).abs() < 1e-12);
    assert!((mink(&n[1], &n[2]) + beta.cos()).abs() < 1e-12);
    assert!((mink(&n[2], &n[3]) + gamma.cos()).abs() < 1e-12);
    assert!(mink(&n[0], &n[2]).abs() < 1e-12 && mink(&n[0], &n[3]).abs() < 1e-12 && mink(&n[1], &n[3]).abs() < 1e-12);

    let mut klein = [[0.0; 3]; 4];
    let mut sheet = 0.0;
    for i in 0..4 {
        let o: Vec<&V4> = (0..4).filter(|&j| j != i).map(|j| &n[j]).collect();
        let mut p = orthogonal_to(o[0], o[1], o[2]);
        if mink(&p, &n[i]) > 0.0 {
            p = p.map(|x| -x);
        }
        assert!(mink(&p, &p) < 0.0, "vertex {i} is not finite");
        if i == 0 {
            sheet = p[0].signum();
        }
        assert_eq!(p[0].signum(), sheet, "vertices on different sheets");
        klein[i] = [p[1] / p[0], p[2] / p[0], p[3] / p[0]];
    }
    let [a, b, c, d] = klein;
    let e = |q: [f64; 3]| [q[0] - a[0], q[1] - a[1], q[2] - a[2]];
    let (eb, ec, ed) = (e(b), e(c), e(d));
    let jac = det3([eb, ec, ed]).abs();
    let mut sum = 0.0;
    for &(s, ws) in rule {
        for &(t, wt) in rule {
            for &(r, wr) in rule {
                // collapsed coordinates onto the unit simplex
                let (u, v, w) = (s, (1.0 - s) * t, (1.0 - s) * (1.0 - t) * r);
                let weight = ws * wt * wr * (1.0 - s).powi(2) * (1.0 - t);
                let x: [f64; 3] = [0, 1, 2].map(|k| a[k] + u * eb[k] + v * ec[k] + w * ed[k]);
                let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                sum += weight / (1.0 - r2).powi(2);
            }
        }
    }
    sum * jac
}
