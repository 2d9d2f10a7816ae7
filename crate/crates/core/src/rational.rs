//! Rational functions on the Riemann sphere, their divisors, and the
//! multiplier of a function that is projectively invariant under a Moebius
//! map.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::sampling;
use crate::sphere::{chordal_distance, Chart, MoebiusMap, PointCP1};
use crate::winding;

/// Coefficients at or below this modulus are trimmed from the top.
pub const COEFF_FLOOR: f64 = 1e-12;
/// Numerator and denominator roots closer than this (chordal) are a common
/// factor.
pub const COPRIME_GAP: f64 = 1e-9;
/// Largest degree accepted when building a rational function.
pub const MAX_DEGREE: usize = 64;
/// Largest degree accepted by [`rat_divisor`].
pub const MAX_DIVISOR_DEGREE: usize = 32;
/// Relative tolerance of the multiplier check `g(phi z) = mu g(z)`.
pub const INVARIANCE_TOL: f64 = 1e-9;

/// `num / den` with the denominator's leading coefficient scaled to one and no
/// common roots. The zero function is representable (it arises as the
/// derivative of a constant) but has no divisor.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
    num_roots: Vec<(Complex64, usize)>,
    den_roots: Vec<(Complex64, usize)>,
}

fn trim(mut coeffs: Vec<Complex64>) -> Vec<Complex64> {
    while coeffs.last().is_some_and(|c| c.norm() <= COEFF_FLOOR) {
        coeffs.pop();
    }
    coeffs
}

impl RationalFunction {
    pub fn new(num: Vec<Complex64>, den: Vec<Complex64>) -> Result<Self> {
        let num = trim(num);
        if num.is_empty() {
            return Err(Error::ZeroPolynomial("numerator"));
        }
        Self::build(num, den)
    }

    pub fn polynomial(coeffs: Vec<Complex64>) -> Result<Self> {
        Self::new(coeffs, vec![Complex64::new(1.0, 0.0)])
    }

    pub fn constant(c: Complex64) -> Result<Self> {
        Self::polynomial(vec![c])
    }

    /// `lead * prod (z - zeros) / prod (z - poles)`.
    pub fn from_roots(lead: Complex64, zeros: &[Complex64], poles: &[Complex64]) -> Result<Self> {
        let one = Complex64::new(1.0, 0.0);
        Self::new(
            Polynomial::from_roots(lead, zeros).coeffs().to_vec(),
            Polynomial::from_roots(one, poles).coeffs().to_vec(),
        )
    }

    pub fn zero() -> Self {
        RationalFunction {
            num: Polynomial::new(Vec::new()),
            den: Polynomial::constant(Complex64::new(1.0, 0.0)),
            num_roots: Vec::new(),
            den_roots: Vec::new(),
        }
    }

    fn build(num: Vec<Complex64>, den: Vec<Complex64>) -> Result<Self> {
        let den = trim(den);
        let Some(&lead) = den.last() else {
            return Err(Error::ZeroPolynomial("denominator"));
        };
        for p in [&num, &den] {
            if p.len() - 1 > MAX_DEGREE {
                return Err(Error::DegreeTooHigh {
                    degree: p.len() - 1,
                    max: MAX_DEGREE,
                });
            }
        }
        if num.iter().chain(den.iter()).any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        let num = Polynomial::new(num.into_iter().map(|c| c / lead).collect());
        let den = Polynomial::new(den.into_iter().map(|c| c / lead).collect());
        let num_roots = if num.degree() > 0 {
            num.root_clusters()?
        } else {
            Vec::new()
        };
        let den_roots = if den.degree() > 0 {
            den.root_clusters()?
        } else {
            Vec::new()
        };
        for (a, _) in &num_roots {
            for (b, _) in &den_roots {
                let pa = PointCP1::finite(*a);
                if chordal_distance(&pa, &PointCP1::finite(*b)) < COPRIME_GAP {
                    return Err(Error::CommonRoot(pa));
                }
            }
        }
        Ok(RationalFunction {
            num,
            den,
            num_roots,
            den_roots,
        })
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.degree() == 0 && self.den.degree() == 0
    }

    /// Distinct finite zeros with multiplicities.
    pub fn zeros(&self) -> &[(Complex64, usize)] {
        &self.num_roots
    }

    /// Distinct finite poles with multiplicities.
    pub fn poles(&self) -> &[(Complex64, usize)] {
        &self.den_roots
    }

    /// `deg(den) - deg(num)`, the order at infinity.
    pub fn order_at_infinity(&self) -> i64 {
        self.den.degree() as i64 - self.num.degree() as i64
    }

    /// Divisor support as sphere points: finite zeros and poles, then
    /// infinity when the order there is nonzero.
    pub fn divisor_support(&self) -> Vec<PointCP1> {
        let mut pts: Vec<PointCP1> = self
            .num_roots
            .iter()
            .chain(self.den_roots.iter())
            .map(|(z, _)| PointCP1::finite(*z))
            .collect();
        if !self.is_zero() && self.order_at_infinity() != 0 {
            pts.push(PointCP1::INFINITY);
        }
        pts
    }

    /// Smallest chordal distance from `p` to a zero or pole.
    pub fn distance_to_divisor(&self, p: &PointCP1) -> f64 {
        self.divisor_support()
            .iter()
            .map(|q| chordal_distance(p, q))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn eval(&self, p: &PointCP1) -> PointCP1 {
        rat_eval(self, p)
    }

    /// Value at a finite `z`; poles give an infinite complex number.
    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.num.eval(z) / self.den.eval(z)
    }

    /// `f'(z) / f(z)` at a finite point that is neither a zero nor a pole.
    pub fn log_derivative(&self, z: Complex64) -> Complex64 {
        let (n, dn) = self.num.eval_with_derivative(z);
        let (d, dd) = self.den.eval_with_derivative(z);
        dn / n - dd / d
    }

    /// `c * f`; a zero factor yields the zero function.
    pub fn scaled(&self, c: Complex64) -> RationalFunction {
        if c.is_zero() {
            return RationalFunction::zero();
        }
        RationalFunction {
            num: self.num.scale(c),
            den: self.den.clone(),
            num_roots: self.num_roots.clone(),
            den_roots: self.den_roots.clone(),
        }
    }

    /// `F(w) = f(1/w)`, the function in the chart around infinity.
    pub fn in_infinity_chart(&self) -> RationalFunction {
        if self.is_zero() {
            return RationalFunction::zero();
        }
        let d = self.num.degree().max(self.den.degree());
        let num = self.num.reversed(d);
        let den = self.den.reversed(d);
        let lead = den.leading();
        let invert = |roots: &[(Complex64, usize)], extra: usize| {
            // Roots at the origin move to infinity, where F has no root.
            let mut out: Vec<(Complex64, usize)> = roots
                .iter()
                .filter(|(z, _)| !z.is_zero())
                .map(|(z, m)| (z.inv(), *m))
                .collect();
            if extra > 0 {
                out.push((Complex64::zero(), extra));
            }
            out.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
            out
        };
        RationalFunction {
            num: num.scale(lead.inv()),
            den: den.scale(lead.inv()),
            num_roots: invert(&self.num_roots, d - self.num.degree()),
            den_roots: invert(&self.den_roots, d - self.den.degree()),
        }
    }

    /// The function in the coordinate of `chart`.
    pub fn in_chart(&self, chart: Chart) -> RationalFunction {
        match chart {
            Chart::Standard => self.clone(),
            Chart::Infinity => self.in_infinity_chart(),
        }
    }

    pub fn derivative(&self) -> Result<RationalFunction> {
        rat_derivative(self)
    }
}

/// Value of `f` at a sphere point, through the homogenization of numerator and
/// denominator to their common degree.
pub fn rat_eval(f: &RationalFunction, p: &PointCP1) -> PointCP1 {
    let (x, y) = p.homogeneous();
    let d = f.num.degree().max(f.den.degree());
    let n = f.num.eval_homogeneous(x, y, d);
    let m = f.den.eval_homogeneous(x, y, d);
    PointCP1::from_homogeneous(n, m)
}

/// Quotient-rule derivative. When the denominator has repeated roots the
/// common factor `gcd(den, den')` is cancelled so that the result stays in
/// lowest terms.
pub fn rat_derivative(f: &RationalFunction) -> Result<RationalFunction> {
    if f.is_zero() || f.is_constant() {
        return Ok(RationalFunction::zero());
    }
    let n = &f.num;
    let d = &f.den;
    let dn = n.derivative();
    let dd = d.derivative();
    let (num, den) = if f.den_roots.iter().all(|(_, m)| *m == 1) {
        (dn.mul(d).sub(&n.mul(&dd)), d.mul(d))
    } else {
        let distinct: Vec<Complex64> = f.den_roots.iter().map(|(z, _)| *z).collect();
        let square_free = Polynomial::from_roots(Complex64::new(1.0, 0.0), &distinct);
        let (common, _) = d.div_rem(&square_free);
        let (cofactor, _) = dd.div_rem(&common);
        (
            dn.mul(&square_free).sub(&n.mul(&cofactor)),
            square_free.mul(d),
        )
    };
    let num = trim(num.coeffs().to_vec());
    if num.is_empty() {
        return Ok(RationalFunction::zero());
    }
    RationalFunction::build(num, den.coeffs().to_vec())
}

/// Zeros (positive orders) and poles (negative orders) of `f`, including the
/// point at infinity. Every multiplicity found by root clustering is
/// confirmed by a winding integral.
pub fn rat_divisor(f: &RationalFunction) -> Result<Vec<(PointCP1, i64)>> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial("numerator"));
    }
    for p in [&f.num, &f.den] {
        if p.degree() > MAX_DIVISOR_DEGREE {
            return Err(Error::DegreeTooHigh {
                degree: p.degree(),
                max: MAX_DIVISOR_DEGREE,
            });
        }
    }
    let mut candidates: Vec<(PointCP1, i64)> = f
        .num_roots
        .iter()
        .map(|(z, m)| (PointCP1::finite(*z), *m as i64))
        .chain(
            f.den_roots
                .iter()
                .map(|(z, m)| (PointCP1::finite(*z), -(*m as i64))),
        )
        .collect();
    if f.order_at_infinity() != 0 {
        candidates.push((PointCP1::INFINITY, f.order_at_infinity()));
    }
    let support: Vec<PointCP1> = candidates.iter().map(|(p, _)| *p).collect();
    let mut out = Vec::with_capacity(candidates.len());
    for (i, (point, order)) in candidates.iter().enumerate() {
        let chart = point.chart();
        let center = point.value();
        let gap = support
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .filter_map(|(_, q)| q.coordinate_in(chart))
            .map(|w| (w - center).norm())
            .fold(f64::INFINITY, f64::min);
        let radius = (0.5 * gap).min(0.5);
        let found = winding::winding_with_support(
            f,
            point,
            radius,
            &support,
            winding::DEFAULT_SNAP,
        )?
        .order;
        if found != *order {
            return Err(Error::MultiplicityAmbiguous {
                point: *point,
                clustered: *order,
                winding: found,
            });
        }
        out.push((*point, *order));
    }
    out.sort_by(|a, b| a.0.lexicographic_cmp(&b.0));
    Ok(out)
}

/// Sum of all orders of the divisor; zero for every nonzero rational function.
pub fn divisor_degree_check(f: &RationalFunction) -> Result<i64> {
    Ok(rat_divisor(f)?.iter().map(|(_, m)| m).sum())
}

/// Sample points at which `g` is finite, nonzero and of moderate size.
fn usable_samples(g: &RationalFunction, count: usize) -> Vec<(Complex64, Complex64)> {
    let mut out = Vec::with_capacity(count);
    let mut k = 0;
    while out.len() < count && k < 64 * count {
        let z = sampling::plane_point(k);
        k += 1;
        let gz = g.eval_complex(z);
        let m = gz.norm();
        if gz.is_finite() && (1e-6..=1e6).contains(&m) {
            out.push((z, gz));
        }
    }
    out
}

fn relative_mismatch(g: &RationalFunction, phi: &MoebiusMap, z: Complex64, gz: Complex64, mu: Complex64) -> f64 {
    let image = phi.apply(&PointCP1::finite(z));
    match rat_eval(g, &image).to_complex() {
        Some(w) => (w - mu * gz).norm() / gz.norm().max(1.0),
        None => f64::INFINITY,
    }
}

/// The constant `mu` with `g(phi(z)) = mu g(z)`, validated at `samples` sample
/// points.
pub fn invariance_multiplier(g: &RationalFunction, phi: &MoebiusMap, samples: usize) -> Result<Complex64> {
    if samples < 8 {
        return Err(Error::InvalidArgument("invariance_multiplier needs at least 8 samples".into()));
    }
    if g.is_zero() {
        return Err(Error::ZeroPolynomial("numerator"));
    }
    let pts = usable_samples(g, samples);
    let (z0, gz0) = pts[0];
    let mu = match rat_eval(g, &phi.apply(&PointCP1::finite(z0))).to_complex() {
        Some(w) => w / gz0,
        None => {
            return Err(Error::NotProjectivelyInvariant {
                sample: 0,
                residual: f64::INFINITY,
            })
        }
    };
    if mu.is_zero() || !mu.is_finite() {
        return Err(Error::NotProjectivelyInvariant {
            sample: 0,
            residual: f64::INFINITY,
        });
    }
    check_multiplier(g, phi, mu, samples)?;
    Ok(mu)
}

/// Largest relative mismatch of `g(phi z) = mu g(z)` over the sample points;
/// an error if any exceeds [`INVARIANCE_TOL`].
pub fn check_multiplier(g: &RationalFunction, phi: &MoebiusMap, mu: Complex64, samples: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (k, (z, gz)) in usable_samples(g, samples).into_iter().enumerate() {
        let r = relative_mismatch(g, phi, z, gz, mu);
        if !(r < INVARIANCE_TOL) {
            return Err(Error::NotProjectivelyInvariant {
                sample: k,
                residual: r,
            });
        }
        worst = worst.max(r);
    }
    Ok(worst)
}
