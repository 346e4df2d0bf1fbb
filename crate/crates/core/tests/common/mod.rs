//! Independent oracles shared by the integration tests. Nothing here calls
//! into the integrator or quadrature code paths under test.
#![allow(dead_code)]

use igame_core::{Matrix, Vector};

/// exp(A) by scaling and squaring of a degree-24 Taylor polynomial.
pub fn expm(a: &Matrix) -> Matrix {
    let norm = a.iter().map(|x| x.abs()).sum::<f64>();
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let scaled = a * scale;
    let n = a.nrows();
    let mut term = Matrix::identity(n, n);
    let mut sum = Matrix::identity(n, n);
    for k in 1..=24 {
        term = &term * &scaled / k as f64;
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Solution at `t` of `z' = M z + w`, `z(0) = z0`, via the homogeneous
/// augmentation `[[M, w], [0, 0]]`.
pub fn affine_flow(m: &Matrix, w: &Vector, z0: &Vector, t: f64) -> Vector {
    let n = m.nrows();
    let mut aug = Matrix::zeros(n + 1, n + 1);
    aug.view_mut((0, 0), (n, n)).copy_from(m);
    aug.view_mut((0, n), (n, 1)).copy_from(w);
    let e = expm(&(aug * t));
    let mut z = Vector::zeros(n + 1);
    z.rows_mut(0, n).copy_from(z0);
    z[n] = 1.0;
    (e * z).rows(0, n).into_owned()
}

/// Trapezoid integral written as interior sum plus half endpoints.
pub fn trapezoid_integral(values: &[f64], dt: f64) -> f64 {
    let n = values.len();
    assert!(n >= 2);
    let interior: f64 = values[1..n - 1].iter().sum();
    dt * (interior + 0.5 * (values[0] + values[n - 1]))
}

pub fn trapezoid_average(values: &[f64], dt: f64) -> f64 {
    trapezoid_integral(values, dt) / ((values.len() - 1) as f64 * dt)
}

/// Scalar memory-feedback game simulated with the memory integrals evaluated
/// by direct quadrature of the stored history.
///
/// φ̇ = base(φ, u₁, u₂), uᵢ = u°ᵢ(t) + Σⱼ cᵢⱼ ∫₀ᵗ e^{−λᵢⱼ(t−τ)} gᵢ(φ(τ)) dτ.
///
/// Each RK4 stage rebuilds the convolution at the stage time from the grid
/// history (trapezoid) plus a trapezoid panel from the last grid point to the
/// stage point.
pub struct QuadratureMemoryGame<'a> {
    pub base: &'a dyn Fn(f64, f64, f64) -> f64,
    pub u_free: [&'a dyn Fn(f64) -> f64; 2],
    pub kernels: [Vec<(f64, f64)>; 2],
    pub observe: [&'a dyn Fn(f64) -> f64; 2],
}

impl QuadratureMemoryGame<'_> {
    pub fn simulate(&self, phi0: f64, t_end: f64, dt: f64) -> Vec<f64> {
        let steps = (t_end / dt + 1e-9).floor() as usize;
        let mut phi = vec![phi0];
        // decay tables e^{-λ k dt}
        let tables: Vec<Vec<Vec<f64>>> = self
            .kernels
            .iter()
            .map(|ks| {
                ks.iter()
                    .map(|&(_, lam)| {
                        (0..=steps + 1)
                            .map(|k| (-lam * k as f64 * dt).exp())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        for n in 0..steps {
            let t = n as f64 * dt;
            // History integrals I_ij(t_n) by trapezoid over grid samples 0..=n.
            let mut history = [
                vec![0.0; self.kernels[0].len()],
                vec![0.0; self.kernels[1].len()],
            ];
            for p in 0..2 {
                let g: Vec<f64> = phi.iter().map(|&x| (self.observe[p])(x)).collect();
                for (j, _) in self.kernels[p].iter().enumerate() {
                    let w = &tables[p][j];
                    if n > 0 {
                        let mut acc = 0.5 * (w[n] * g[0] + w[0] * g[n]);
                        for k in 1..n {
                            acc += w[n - k] * g[k];
                        }
                        history[p][j] = acc * dt;
                    }
                }
            }
            let phi_n = phi[n];
            let rate = |s: f64, phi_s: f64| -> f64 {
                let mut u = [0.0; 2];
                for p in 0..2 {
                    let mut z = 0.0;
                    for (j, &(c, lam)) in self.kernels[p].iter().enumerate() {
                        let decay = (-lam * s).exp();
                        let panel =
                            0.5 * s * (decay * (self.observe[p])(phi_n) + (self.observe[p])(phi_s));
                        z += c * (decay * history[p][j] + panel);
                    }
                    // Free controls are zero-order held, as in the integrator contract.
                    u[p] = (self.u_free[p])(t) + z;
                }
                (self.base)(phi_s, u[0], u[1])
            };
            let h = dt;
            let k1 = rate(0.0, phi_n);
            let k2 = rate(0.5 * h, phi_n + 0.5 * h * k1);
            let k3 = rate(0.5 * h, phi_n + 0.5 * h * k2);
            let k4 = rate(h, phi_n + h * k3);
            phi.push(phi_n + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
        }
        phi
    }
}
