//! Trapezoid rule for 1-periodic integrands with nested node doubling.
//!
//! For smooth periodic integrands the rule converges geometrically, so the
//! change between successive levels bounds the error of the finer level.

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};

/// A converged quadrature value and the node count that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: Complex64,
    pub nodes: usize,
    pub last_change: f64,
}

/// Mean of `f` over one period `[0, 1)`, starting with `start` equispaced
/// nodes and doubling until successive estimates differ by less than `tol`.
/// `max_nodes` caps the node count.
pub fn periodic_mean<F>(mut f: F, start: usize, max_nodes: usize, tol: f64) -> Result<Quadrature>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let mut n = start.max(1);
    let mut sum = Complex64::zero();
    for k in 0..n {
        sum += f(k as f64 / n as f64)?;
    }
    let mut estimate = sum / n as f64;
    let mut last_change = f64::INFINITY;
    while 2 * n <= max_nodes {
        let step = 1.0 / (2 * n) as f64;
        for k in 0..n {
            sum += f((2 * k + 1) as f64 * step)?;
        }
        n *= 2;
        let next = sum / n as f64;
        last_change = (next - estimate).norm();
        estimate = next;
        if last_change < tol {
            return Ok(Quadrature {
                value: estimate,
                nodes: n,
                last_change,
            });
        }
    }
    Err(Error::QuadratureNotConverged {
        nodes: n,
        last_change,
    })
}

/// Mean of `f(u, v)` over the unit square with both axes doubled together.
pub fn periodic_mean_2d<F>(
    mut f: F,
    start: usize,
    max_per_axis: usize,
    tol: f64,
) -> Result<Quadrature>
where
    F: FnMut(f64, f64) -> Result<Complex64>,
{
    let mut n = start.max(1);
    let mut sum = Complex64::zero();
    for i in 0..n {
        for j in 0..n {
            sum += f(i as f64 / n as f64, j as f64 / n as f64)?;
        }
    }
    let mut estimate = sum / (n * n) as f64;
    let mut last_change = f64::INFINITY;
    while 2 * n <= max_per_axis {
        let m = 2 * n;
        let h = 1.0 / m as f64;
        for i in 0..m {
            for j in 0..m {
                if i % 2 == 0 && j % 2 == 0 {
                    continue;
                }
                sum += f(i as f64 * h, j as f64 * h)?;
            }
        }
        n = m;
        let next = sum / (n * n) as f64;
        last_change = (next - estimate).norm();
        estimate = next;
        if last_change < tol {
            return Ok(Quadrature {
                value: estimate,
                nodes: n,
                last_change,
            });
        }
    }
    Err(Error::QuadratureNotConverged {
        nodes: n,
        last_change,
    })
}
