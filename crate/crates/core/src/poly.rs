//! Dense complex polynomials, simultaneous (Aberth–Ehrlich) root refinement
//! and grouping of approximate roots into multiple roots.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{Float, Zero};

use crate::error::{Error, Result};

pub const MAX_ROOT_ITERATIONS: usize = 200;

/// Roots closer than this (relative to `max(1, |z|)`) are merged without
/// further tests.
pub const TIGHT_CLUSTER: f64 = 1e-7;
/// Linkage radius within which approximate roots are candidates for being one
/// multiple root. Candidates are only merged if the refined center passes the
/// numerical multiplicity test.
const LOOSE_CLUSTER: f64 = 2e-2;
/// Relative size below which the Taylor coefficients `t_0..t_{m-1}` count as
/// vanishing at an `m`-fold root.
const MULTIPLICITY_TOL: f64 = 1e-12;

/// A polynomial with complex coefficients, lowest degree first. Trailing zero
/// coefficients are removed; the zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// `lead * prod (z - r)`.
    pub fn from_roots(lead: Complex64, roots: &[Complex64]) -> Self {
        let mut coeffs = vec![lead];
        for &r in roots {
            let mut next = vec![Complex64::zero(); coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * r;
            }
            coeffs = next;
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or_else(Complex64::zero)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::zero(), |acc, &c| acc * z + c)
    }

    /// `(p(z), p'(z))` by a single Horner sweep.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::zero();
        let mut dp = Complex64::zero();
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Evaluates the degree-`d` homogenization `sum c_k x^k y^(d-k)`.
    pub fn eval_homogeneous(&self, x: Complex64, y: Complex64, d: usize) -> Complex64 {
        debug_assert!(d >= self.degree());
        let mut acc = Complex64::zero();
        let mut ypow = Complex64::new(1.0, 0.0);
        let len = self.coeffs.len();
        for k in (0..=d).rev() {
            let c = if k < len {
                self.coeffs[k]
            } else {
                Complex64::zero()
            };
            acc = acc * x + c * ypow;
            ypow *= y;
        }
        acc
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::new(Vec::new());
        }
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::new(Vec::new());
        }
        let mut out = vec![Complex64::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &Polynomial, k: usize| p.coeffs.get(k).copied().unwrap_or_else(Complex64::zero);
        Polynomial::new((0..n).map(|k| get(self, k) - get(other, k)).collect())
    }

    pub fn scale(&self, s: Complex64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// `z^d p(1/z)` for `d >= deg p`.
    pub fn reversed(&self, d: usize) -> Polynomial {
        let mut out = vec![Complex64::zero(); d + 1];
        for (k, &c) in self.coeffs.iter().enumerate() {
            out[d - k] = c;
        }
        Polynomial::new(out)
    }

    /// Quotient and remainder of long division by a nonzero polynomial.
    pub fn div_rem(&self, divisor: &Polynomial) -> (Polynomial, Polynomial) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let dd = divisor.degree();
        if self.is_zero() || self.degree() < dd {
            return (Polynomial::new(Vec::new()), self.clone());
        }
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Complex64::zero(); self.degree() - dd + 1];
        for k in (0..quot.len()).rev() {
            let q = rem[k + dd] / lead;
            quot[k] = q;
            for (j, &c) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= q * c;
            }
        }
        rem.truncate(dd);
        (Polynomial::new(quot), Polynomial::new(rem))
    }

    /// Rounding-error scale `sum |c_k| |z|^k` of evaluating at `z`.
    pub fn abs_eval(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    /// Taylor coefficients at `c`: `p(z) = sum t_k (z - c)^k`.
    pub fn taylor_shift(&self, c: Complex64) -> Vec<Complex64> {
        let mut t = self.coeffs.clone();
        let n = t.len();
        for i in 0..n {
            for k in (i..n - 1).rev() {
                let carry = t[k + 1] * c;
                t[k] += carry;
            }
        }
        t
    }

    /// Approximate roots with multiplicity, one entry per root counted once.
    /// Exact zero roots (vanishing low coefficients) are returned exactly.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial("root finding"));
        }
        let zeros_at_origin = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        let mut out = vec![Complex64::zero(); zeros_at_origin];
        let rest = Polynomial::new(self.coeffs[zeros_at_origin..].to_vec());
        match rest.degree() {
            0 => {}
            1 => out.push(-rest.coeffs[0] / rest.coeffs[1]),
            _ => out.extend(aberth(&rest)?),
        }
        Ok(out)
    }

    /// Distinct roots with multiplicities, see [`cluster_roots`].
    pub fn root_clusters(&self) -> Result<Vec<(Complex64, usize)>> {
        let roots = self.roots()?;
        Ok(cluster_roots(self, &roots))
    }
}

/// Aberth–Ehrlich simultaneous iteration for a polynomial of degree at least
/// two with nonzero constant term, started from a perturbed circle.
fn aberth(p: &Polynomial) -> Result<Vec<Complex64>> {
    let n = p.degree();
    let lead = p.leading().norm();
    let radius = p.coeffs[..n]
        .iter()
        .enumerate()
        .map(|(k, c)| (c.norm() / lead).powf(1.0 / (n - k) as f64))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut z: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(radius, 2.0 * PI * j as f64 / n as f64 + 0.4))
        .collect();
    let mut done = vec![false; n];
    let error_scale = 8.0 * (n as f64 + 1.0) * f64::EPSILON;

    for _ in 0..MAX_ROOT_ITERATIONS {
        if done.iter().all(|&d| d) {
            return Ok(z);
        }
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (val, der) = p.eval_with_derivative(z[i]);
            if val.norm() <= error_scale * p.abs_eval(z[i]) {
                done[i] = true;
                continue;
            }
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let newton = if der.is_zero() {
                // Stationary point of p: step along an arbitrary direction.
                Complex64::new(radius * 1e-3, radius * 1e-3)
            } else {
                val / der
            };
            let step = newton / (Complex64::new(1.0, 0.0) - newton * repulsion);
            if !step.is_finite() {
                continue;
            }
            z[i] -= step;
            if step.norm() <= 2.0 * f64::EPSILON * z[i].norm() {
                done[i] = true;
            }
        }
    }
    if done.iter().all(|&d| d) {
        Ok(z)
    } else {
        Err(Error::RootFindingFailed {
            iterations: MAX_ROOT_ITERATIONS,
        })
    }
}

fn scale_of(z: Complex64) -> f64 {
    z.norm().max(1.0)
}

/// Groups approximate roots into distinct roots with multiplicities.
///
/// Roots within [`TIGHT_CLUSTER`] of each other are merged directly. Looser
/// groups are merged only if Newton refinement on `p^(m-1)` lands on a point
/// where the first `m` Taylor coefficients vanish to working precision; a
/// group that fails is split at its longest spanning-tree edge and the halves
/// are retried. The output is sorted by real, then imaginary part.
pub fn cluster_roots(p: &Polynomial, roots: &[Complex64]) -> Vec<(Complex64, usize)> {
    let n = roots.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let tol = LOOSE_CLUSTER * scale_of(roots[i]).max(scale_of(roots[j]));
            if (roots[i] - roots[j]).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        match slot[r] {
            Some(g) => groups[g].push(i),
            None => {
                slot[r] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }
    let mut out = Vec::new();
    for g in groups {
        let pts: Vec<Complex64> = g.iter().map(|&i| roots[i]).collect();
        resolve_group(p, &pts, &mut out);
    }
    out.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    out
}

fn resolve_group(p: &Polynomial, pts: &[Complex64], out: &mut Vec<(Complex64, usize)>) {
    let m = pts.len();
    if m == 1 {
        out.push((pts[0], 1));
        return;
    }
    let mean = pts.iter().sum::<Complex64>() / m as f64;
    let diameter = pts
        .iter()
        .flat_map(|a| pts.iter().map(move |b| (a - b).norm()))
        .fold(0.0, f64::max);
    if diameter <= TIGHT_CLUSTER * scale_of(mean) {
        out.push((mean, m));
        return;
    }
    let center = refine_multiple_root(p, mean, m, diameter);
    if is_numerically_multiple(p, center, m) {
        out.push((center, m));
        return;
    }
    let (left, right) = split_at_longest_edge(pts);
    resolve_group(p, &left, out);
    resolve_group(p, &right, out);
}

/// Newton iteration on `p^(m-1)`, which has a simple root at an `m`-fold root
/// of `p`. Falls back to `start` if the iteration wanders off.
fn refine_multiple_root(p: &Polynomial, start: Complex64, m: usize, spread: f64) -> Complex64 {
    let mut d = p.clone();
    for _ in 1..m {
        d = d.derivative();
    }
    let dd = d.derivative();
    let mut z = start;
    for _ in 0..50 {
        let der = dd.eval(z);
        if der.is_zero() {
            break;
        }
        let step = d.eval(z) / der;
        if !step.is_finite() {
            break;
        }
        z -= step;
        if step.norm() <= 4.0 * f64::EPSILON * scale_of(z) {
            break;
        }
    }
    if (z - start).norm() <= 2.0 * spread + f64::EPSILON {
        z
    } else {
        start
    }
}

fn is_numerically_multiple(p: &Polynomial, c: Complex64, m: usize) -> bool {
    let t = p.taylor_shift(c);
    let abs = Polynomial::new(p.coeffs.iter().map(|x| Complex64::new(x.norm(), 0.0)).collect());
    let s = abs.taylor_shift(Complex64::new(c.norm(), 0.0));
    (0..m).all(|k| t[k].norm() <= MULTIPLICITY_TOL * s[k].norm())
}

fn split_at_longest_edge(pts: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
    let n = pts.len();
    // Prim's algorithm on the complete graph.
    let mut in_tree = vec![false; n];
    let mut best = vec![(f64::INFINITY, 0usize); n];
    let mut edges: Vec<(usize, usize, f64)> = Vec::with_capacity(n - 1);
    in_tree[0] = true;
    for j in 1..n {
        best[j] = ((pts[0] - pts[j]).norm(), 0);
    }
    for _ in 1..n {
        let (next, _) = (0..n)
            .filter(|&j| !in_tree[j])
            .map(|j| (j, best[j].0))
            .fold((usize::MAX, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        in_tree[next] = true;
        edges.push((best[next].1, next, best[next].0));
        for j in 0..n {
            if !in_tree[j] {
                let d = (pts[next] - pts[j]).norm();
                if d < best[j].0 {
                    best[j] = (d, next);
                }
            }
        }
    }
    let cut = edges
        .iter()
        .enumerate()
        .fold((0, -1.0), |acc, (i, e)| if e.2 > acc.1 { (i, e.2) } else { acc })
        .0;
    // Flood fill from vertex 0 without the cut edge.
    let mut side = vec![false; n];
    side[0] = true;
    let mut changed = true;
    while changed {
        changed = false;
        for (i, &(a, b, _)) in edges.iter().enumerate() {
            if i != cut && side[a] != side[b] {
                side[a] = true;
                side[b] = true;
                changed = true;
            }
        }
    }
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (i, &z) in pts.iter().enumerate() {
        if side[i] {
            left.push(z);
        } else {
            right.push(z);
        }
    }
    (left, right)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_clusters(got: &[(Complex64, usize)], want: &[(Complex64, usize)], tol: f64) {
        assert_eq!(got.len(), want.len(), "{got:?} vs {want:?}");
        for (w, m) in want {
            assert!(
                got.iter().any(|(z, k)| k == m && (z - w).norm() < tol),
                "missing {w} x{m} in {got:?}"
            );
        }
    }

    #[test]
    fn horner_and_derivative() {
        let p = Polynomial::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(3.0, 0.0)]);
        let (v, d) = p.eval_with_derivative(c(2.0, 0.0));
        assert_eq!(v, c(13.0, 0.0));
        assert_eq!(d, c(12.0, 0.0));
        assert_eq!(p.derivative(), Polynomial::new(vec![c(0.0, 0.0), c(6.0, 0.0)]));
    }

    #[test]
    fn homogeneous_evaluation_matches_affine() {
        let p = Polynomial::new(vec![c(1.0, 2.0), c(-1.0, 0.5), c(0.25, 0.0)]);
        let z = c(0.3, -0.7);
        let h = p.eval_homogeneous(z, c(1.0, 0.0), 4);
        assert!((h - p.eval(z)).norm() < 1e-15);
        // At [1 : w] the degree-4 homogenization is w^4 p(1/w).
        let w = c(0.2, 0.1);
        let h = p.eval_homogeneous(c(1.0, 0.0), w, 4);
        assert!((h - w.powi(4) * p.eval(w.inv())).norm() < 1e-13);
    }

    #[test]
    fn division_recovers_factor() {
        let a = Polynomial::from_roots(c(2.0, 0.0), &[c(1.0, 0.0), c(-2.0, 1.0)]);
        let b = Polynomial::from_roots(c(1.0, 0.0), &[c(0.5, 0.0)]);
        let (q, r) = a.mul(&b).div_rem(&b);
        assert!(r.coeffs().iter().all(|x| x.norm() < 1e-13));
        for (x, y) in q.coeffs().iter().zip(a.coeffs()) {
            assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn taylor_shift_expands_around_center() {
        let p = Polynomial::from_roots(c(1.0, 0.0), &[c(1.0, 0.0), c(1.0, 0.0), c(3.0, 0.0)]);
        let t = p.taylor_shift(c(1.0, 0.0));
        // (z-1)^2 (z-3) = (z-1)^3 - 2 (z-1)^2
        let want = [c(0.0, 0.0), c(0.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0)];
        for (x, y) in t.iter().zip(want.iter()) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn simple_roots_of_quartic() {
        let p = Polynomial::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let want: Vec<_> = (0..4)
            .map(|k| (Complex64::from_polar(1.0, PI / 4.0 + k as f64 * PI / 2.0), 1))
            .collect();
        assert_clusters(&p.root_clusters().unwrap(), &want, 1e-14);
    }

    #[test]
    fn exact_roots_at_origin() {
        let p = Polynomial::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(p.root_clusters().unwrap(), vec![(c(0.0, 0.0), 4)]);
    }

    #[test]
    fn triple_root_is_grouped() {
        let p = Polynomial::from_roots(c(1.0, 0.0), &[c(1.0, 0.0); 3]).mul(
            &Polynomial::from_roots(c(1.0, 0.0), &[c(-2.0, 0.0)]),
        );
        assert_clusters(
            &p.root_clusters().unwrap(),
            &[(c(1.0, 0.0), 3), (c(-2.0, 0.0), 1)],
            1e-10,
        );
    }

    #[test]
    fn quadruple_complex_root_is_grouped() {
        let r = c(0.3, -0.8);
        let p = Polynomial::from_roots(c(2.0, 1.0), &[r, r, r, r, c(0.5, 0.5)]);
        assert_clusters(&p.root_clusters().unwrap(), &[(r, 4), (c(0.5, 0.5), 1)], 1e-9);
    }

    #[test]
    fn nearby_distinct_roots_stay_apart() {
        let p = Polynomial::from_roots(c(1.0, 0.0), &[c(1.0, 0.0), c(1.001, 0.0), c(-1.0, 0.0)]);
        assert_clusters(
            &p.root_clusters().unwrap(),
            &[(c(1.0, 0.0), 1), (c(1.001, 0.0), 1), (c(-1.0, 0.0), 1)],
            1e-10,
        );
    }

    #[test]
    fn zero_polynomial_has_no_roots() {
        assert!(Polynomial::new(vec![c(0.0, 0.0)]).roots().is_err());
    }
}
