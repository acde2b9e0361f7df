use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex scalar. Serializes as `[re, im]`.
pub type C = Complex64;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn cr(re: f64) -> C {
    C::new(re, 0.0)
}

/// Column vector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vec2(pub [C; 2]);

/// 2x2 matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mat2(pub [[C; 2]; 2]);

impl Vec2 {
    pub fn new(a: C, b: C) -> Self {
        Vec2([a, b])
    }

    pub fn real(a: f64, b: f64) -> Self {
        Vec2([cr(a), cr(b)])
    }

    pub fn scale(self, t: C) -> Self {
        Vec2([self.0[0] * t, self.0[1] * t])
    }

    pub fn norm(self) -> f64 {
        self.0[0].norm().max(self.0[1].norm())
    }

    pub fn max_diff(self, o: Vec2) -> f64 {
        (self.0[0] - o.0[0]).norm().max((self.0[1] - o.0[1]).norm())
    }

    pub fn is_zero(self) -> bool {
        self.norm() == 0.0
    }
}

pub fn det2(u: Vec2, v: Vec2) -> C {
    u.0[0] * v.0[1] - u.0[1] * v.0[0]
}

impl Mat2 {
    pub fn new(a: C, b: C, c: C, d: C) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2::new(cr(a), cr(b), cr(c), cr(d))
    }

    pub fn identity() -> Self {
        Mat2::real(1.0, 0.0, 0.0, 1.0)
    }

    pub fn zero() -> Self {
        Mat2::real(0.0, 0.0, 0.0, 0.0)
    }

    /// Matrix with the given columns.
    pub fn from_columns(u: Vec2, v: Vec2) -> Self {
        Mat2::new(u.0[0], v.0[0], u.0[1], v.0[1])
    }

    pub fn det(&self) -> C {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> C {
        self.0[0][0] + self.0[1][1]
    }

    /// Adjugate; equals the inverse when det = 1.
    pub fn adj(&self) -> Self {
        let m = &self.0;
        Mat2::new(m[1][1], -m[0][1], -m[1][0], m[0][0])
    }

    pub fn inv(&self) -> Result<Self> {
        let d = self.det();
        if d.norm() < crate::DEGEN_TOL * self.norm().powi(2).max(1.0) {
            return Err(Error::SingularMatrix);
        }
        Ok(self.adj().scale(d.inv()))
    }

    pub fn scale(&self, t: C) -> Self {
        let m = &self.0;
        Mat2::new(m[0][0] * t, m[0][1] * t, m[1][0] * t, m[1][1] * t)
    }

    /// `self^e` for `e = +-1` (inverse via adjugate; only for det = 1).
    pub fn pow_sign(&self, e: i8) -> Self {
        if e > 0 {
            *self
        } else {
            self.adj()
        }
    }

    pub fn apply(&self, v: Vec2) -> Vec2 {
        let m = &self.0;
        Vec2([m[0][0] * v.0[0] + m[0][1] * v.0[1], m[1][0] * v.0[0] + m[1][1] * v.0[1]])
    }

    /// Max-entry norm.
    pub fn norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_diff(&self, o: &Mat2) -> f64 {
        (*self - *o).norm()
    }

    /// Distance to the nearer of +Id and -Id, with the sign chosen.
    pub fn dist_pm_identity(&self) -> (f64, i8) {
        let p = self.max_diff(&Mat2::identity());
        let m = self.max_diff(&-Mat2::identity());
        if p <= m {
            (p, 1)
        } else {
            (m, -1)
        }
    }

    pub fn conj(&self) -> Self {
        let m = &self.0;
        Mat2::new(m[0][0].conj(), m[0][1].conj(), m[1][0].conj(), m[1][1].conj())
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        let e = |i: usize, j: usize| a[i][0] * b[0][j] + a[i][1] * b[1][j];
        Mat2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }
}

impl Mul<Vec2> for Mat2 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        self.apply(v)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2::new(a[0][0] + b[0][0], a[0][1] + b[0][1], a[1][0] + b[1][0], a[1][1] + b[1][1])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + (-o)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(cr(-1.0))
    }
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    *a * *b
}

pub fn mat_inv(a: &Mat2) -> Result<Mat2> {
    a.inv()
}

pub fn mat_trace(a: &Mat2) -> C {
    a.trace()
}

pub fn mat_apply(a: &Mat2, v: Vec2) -> Vec2 {
    a.apply(v)
}

/// |a - b| relative to the larger operand (absolute near zero).
pub fn rel_err(a: C, b: C) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

/// Even Bernoulli numbers B_2 .. B_34 as (numerator, denominator).
const BERNOULLI_EVEN: [(f64, f64); 17] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
    (8553103.0, 6.0),
    (-23749461029.0, 870.0),
    (8615841276005.0, 14322.0),
    (-7709321041217.0, 510.0),
    (2577687858367.0, 6.0),
];

/// Li_2 via the Bernoulli series in u = -log(1-w); accurate for |u| well below 2 pi.
fn li2_series(w: C) -> C {
    let u = -(cr(1.0) - w).ln();
    let u2 = u * u;
    // B_0 u + B_1 u^2 / 2
    let mut sum = u - u2 * 0.25;
    let mut pow = u; // u^(n+1) for n = 2k
    let mut fact = 1.0; // (n+1)!
    for (k, (num, den)) in BERNOULLI_EVEN.iter().enumerate() {
        let n = 2 * (k + 1);
        pow *= u2;
        fact *= (n * (n + 1)) as f64;
        sum += pow * (num / den / fact);
    }
    sum
}

/// Bloch–Wigner dilogarithm D(z) = Im Li_2(z) + arg(1-z) log|z|.
pub fn bloch_wigner(z: C) -> Result<f64> {
    if !(z.re.is_finite() && z.im.is_finite()) || z.norm() < 1e-12 || (z - 1.0).norm() < 1e-12 {
        return Err(Error::DegenerateShape(format!("{z}")));
    }
    let one = cr(1.0);
    // The six-element orbit with the sign of D on each.
    let orbit = [
        (z, 1.0),
        (one / (one - z), 1.0),
        (one - one / z, 1.0),
        (one / z, -1.0),
        (one - z, -1.0),
        (z / (z - one), -1.0),
    ];
    let (w, s) = orbit
        .iter()
        .filter(|(w, _)| w.re <= 0.5 + 1e-12)
        .min_by(|a, b| a.0.norm().total_cmp(&b.0.norm()))
        .copied()
        .expect("orbit always meets Re <= 1/2");
    let d = li2_series(w).im + (one - w).arg() * w.norm().ln();
    Ok(s * d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lam() -> C {
        c(0.5, 3f64.sqrt() / 2.0)
    }

    #[test]
    fn det2_examples() {
        assert_eq!(det2(Vec2::real(1.0, 0.0), Vec2::real(0.0, 1.0)), cr(1.0));
        assert_eq!(det2(Vec2::real(1.0, 0.0), Vec2::real(-1.0, 0.0)), cr(0.0));
        assert_eq!(det2(Vec2::real(1.0, 0.0), Vec2::real(3.0, 1.0)), cr(1.0));
    }

    #[test]
    fn g5_inverse_moves_h2_to_h3() {
        let l = lam();
        let g5 = Mat2::new(cr(-2.0), l, l - 1.0, cr(0.0));
        assert!((g5.det() - 1.0).norm() < 1e-15);
        let h3 = g5.inv().unwrap().apply(Vec2::real(-1.0, 0.0));
        assert!(h3.max_diff(Vec2::new(cr(0.0), l - 1.0)) < 1e-15);
        let g4 = Mat2::new(-l - 1.0, l, -l, l - 1.0);
        assert!((g4.trace() + 2.0).norm() < 1e-15);
    }

    #[test]
    fn singular_inverse_errors() {
        assert_eq!(Mat2::real(1.0, 2.0, 2.0, 4.0).inv(), Err(Error::SingularMatrix));
    }

    #[test]
    fn bloch_wigner_maximum() {
        // Clausen-series oracle: D(e^{i pi/3}) = sum sin(n pi/3)/n^2.
        let z = C::from_polar(1.0, std::f64::consts::FRAC_PI_3);
        let d = bloch_wigner(z).unwrap();
        assert!((d - 1.0149416064096536).abs() < 1e-13, "{d}");
    }

    #[test]
    fn bloch_wigner_real_axis_and_degenerate() {
        for x in [0.1, 0.5, 0.9, -3.0, 7.0] {
            assert!(bloch_wigner(cr(x)).unwrap().abs() < 1e-14);
        }
        assert!(matches!(bloch_wigner(cr(0.0)), Err(Error::DegenerateShape(_))));
        assert!(matches!(bloch_wigner(cr(1.0)), Err(Error::DegenerateShape(_))));
    }

    #[test]
    fn bloch_wigner_matches_direct_series_inside_disk() {
        // Direct power series Li_2(z) = sum z^n/n^2 for |z| = 0.5.
        for k in 0..12 {
            let z = C::from_polar(0.5, 0.3 + k as f64 * 0.5);
            let mut li = cr(0.0);
            let mut p = cr(1.0);
            for n in 1..200 {
                p *= z;
                li += p / (n * n) as f64;
            }
            let direct = li.im + (cr(1.0) - z).arg() * z.norm().ln();
            assert!((bloch_wigner(z).unwrap() - direct).abs() < 1e-13);
        }
    }
}
