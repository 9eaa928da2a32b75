//! Independent numerical oracles for the test suites.
//!
//! Everything here evaluates in `f64` by routes that share nothing with the
//! exact code paths: adaptive tensor Gauss-Hermite quadrature with
//! Newton-refined nodes, orthonormal Hermite functions from their own
//! stable recurrence, and fourth-order central finite differences.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::basis::{HermiteBasis, Weight};
use crate::poly::Polynomial;

/// Nodes and weights of the `m`-point Gauss-Hermite rule for `e^{-x^2}`.
pub fn gauss_hermite(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let pim4 = libm::pow(PI, -0.25);
    let mut z = 0.0f64;
    for i in 0..m.div_ceil(2) {
        z = match i {
            0 => libm::sqrt((2 * m + 1) as f64) - 1.85575 * libm::pow((2 * m + 1) as f64, -1.0 / 6.0),
            1 => z - 1.14 * libm::pow(m as f64, 0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            // orthonormal recurrence at z
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..m {
                let p3 = p2;
                p2 = p1;
                p1 = z * libm::sqrt(2.0 / (j + 1) as f64) * p2
                    - libm::sqrt(j as f64 / (j + 1) as f64) * p3;
            }
            pp = libm::sqrt(2.0 * m as f64) * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if libm::fabs(z - z1) <= 1e-15 * libm::fabs(z).max(1.0) {
                break;
            }
        }
        nodes[i] = z;
        nodes[m - 1 - i] = -z;
        weights[i] = 2.0 / (pp * pp);
        weights[m - 1 - i] = weights[i];
    }
    (nodes, weights)
}

fn rule(weight: Weight, m: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_hermite(m);
    match weight {
        Weight::Unnormalized => (x, w),
        Weight::StandardGaussian => (
            x.iter().map(|t| t * core::f64::consts::SQRT_2).collect(),
            w.iter().map(|v| v / libm::sqrt(PI)).collect(),
        ),
    }
}

fn tensor_rule(dims: usize, nodes: &[f64], weights: &[f64], f: &dyn Fn(&[f64]) -> f64) -> f64 {
    let m = nodes.len();
    let total = m.pow(dims as u32);
    let mut point = vec![0.0; dims];
    let mut sum = 0.0;
    for flat in 0..total {
        let mut rest = flat;
        let mut w = 1.0;
        for d in 0..dims {
            let k = rest % m;
            rest /= m;
            point[d] = nodes[k];
            w *= weights[k];
        }
        sum += w * f(&point);
    }
    sum
}

/// `int f d mu` over `R^dims`, refining the rule until two successive
/// estimates agree.
pub fn quad(dims: usize, weight: Weight, f: &dyn Fn(&[f64]) -> f64) -> f64 {
    let max_nodes = match dims {
        1 | 2 => 48,
        3 => 24,
        _ => 14,
    };
    let step = if dims <= 2 { 4 } else { 2 };
    let mut m = 4;
    let (x, w) = rule(weight, m);
    let mut prev = tensor_rule(dims, &x, &w, f);
    loop {
        m += step;
        let (x, w) = rule(weight, m);
        let cur = tensor_rule(dims, &x, &w, f);
        let scale = libm::fabs(cur).max(1.0);
        if libm::fabs(cur - prev) <= 1e-13 * scale || m >= max_nodes {
            return cur;
        }
        prev = cur;
    }
}

/// Orthonormal 1D Hermite functions `phi_0..=phi_a` at `x` for `weight`.
fn orthonormal_1d(weight: Weight, a: u32, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(a as usize + 1);
    match weight {
        Weight::Unnormalized => {
            out.push(libm::pow(PI, -0.25));
            if a >= 1 {
                out.push(core::f64::consts::SQRT_2 * x * out[0]);
            }
            for k in 1..a as usize {
                let kf = k as f64;
                let next = libm::sqrt(2.0 / (kf + 1.0)) * x * out[k]
                    - libm::sqrt(kf / (kf + 1.0)) * out[k - 1];
                out.push(next);
            }
        }
        Weight::StandardGaussian => {
            out.push(1.0);
            if a >= 1 {
                out.push(x);
            }
            for k in 1..a as usize {
                let kf = k as f64;
                let next = (x * out[k] - libm::sqrt(kf) * out[k - 1]) / libm::sqrt(kf + 1.0);
                out.push(next);
            }
        }
    }
    out
}

/// Orthonormal basis element `e_i` evaluated at `x` (ignores the basis's
/// normalization flag).
pub fn eval_element(b: &HermiteBasis, i: usize, x: &[f64]) -> f64 {
    let weight = b.spec().weight;
    b.graded()
        .multi_index(i)
        .exponents()
        .iter()
        .zip(x)
        .map(|(&a, &t)| orthonormal_1d(weight, a, t)[a as usize])
        .product()
}

/// `d e_i / d x_var` at `x`, from `phi_a' = c_a phi_{a-1}`.
pub fn eval_element_derivative(b: &HermiteBasis, i: usize, var: usize, x: &[f64]) -> f64 {
    let weight = b.spec().weight;
    let m = b.graded().multi_index(i);
    let mut acc = 1.0;
    for (v, (&a, &t)) in m.exponents().iter().zip(x).enumerate() {
        let table = orthonormal_1d(weight, a, t);
        if v == var {
            if a == 0 {
                return 0.0;
            }
            let c = match weight {
                Weight::Unnormalized => libm::sqrt(2.0 * a as f64),
                Weight::StandardGaussian => libm::sqrt(a as f64),
            };
            acc *= c * table[a as usize - 1];
        } else {
            acc *= table[a as usize];
        }
    }
    acc
}

pub fn quad_inner(
    b: &HermiteBasis,
    f: &dyn Fn(&[f64]) -> f64,
    g: &dyn Fn(&[f64]) -> f64,
) -> f64 {
    quad(2 * b.dim_n(), b.spec().weight, &|x| f(x) * g(x))
}

/// Fourth-order central difference of `f` along `var`.
pub fn fd_partial(f: &Polynomial, var: usize, x: &[f64]) -> f64 {
    let h = 1e-3;
    let at = |shift: f64| {
        let mut y = x.to_vec();
        y[var] += shift;
        f.eval_f64(&y)
    };
    (-at(2.0 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2.0 * h)) / (12.0 * h)
}

/// `{f, g}` at `x` from finite differences of point evaluations.
pub fn fd_bracket(f: &Polynomial, g: &Polynomial, x: &[f64]) -> f64 {
    let n = f.dim_n();
    (0..n)
        .map(|k| {
            fd_partial(f, k, x) * fd_partial(g, n + k, x)
                - fd_partial(f, n + k, x) * fd_partial(g, k, x)
        })
        .sum()
}

/// `<{h, e_j}, e_i>` by quadrature.
pub fn quad_q_entry(b: &HermiteBasis, h: &Polynomial, i: usize, j: usize) -> f64 {
    let n = b.dim_n();
    quad(2 * n, b.spec().weight, &|x| {
        let bracket: f64 = (0..n)
            .map(|k| {
                fd_partial(h, k, x) * eval_element_derivative(b, j, n + k, x)
                    - fd_partial(h, n + k, x) * eval_element_derivative(b, j, k, x)
            })
            .sum();
        bracket * eval_element(b, i, x)
    })
}

/// `<h e_j, e_i>` by quadrature.
pub fn quad_r_entry(b: &HermiteBasis, h: &Polynomial, i: usize, j: usize) -> f64 {
    quad(2 * b.dim_n(), b.spec().weight, &|x| {
        h.eval_f64(x) * eval_element(b, j, x) * eval_element(b, i, x)
    })
}

/// Relative agreement with an absolute floor of `tol` for values below 1.
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    libm::fabs(a - b) <= tol * libm::fabs(a).max(libm::fabs(b)).max(1.0)
}
