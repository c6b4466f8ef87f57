//! Linear algebra of Minkowski 3-space with the metric `-dx1^2 + dx2^2 + dx3^2`.

use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

/// Default threshold for treating `<v, v>` as zero on unit-scale vectors.
pub const DEFAULT_EPS_NULL: f64 = 1e-9;

/// A vector of E^3_1 in rectangular coordinates `(x1, x2, x3)`, `x1` timelike.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const E1: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const E2: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const E3: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    pub const fn new(c1: f64, c2: f64, c3: f64) -> Self {
        Self { c1, c2, c3 }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.c1, self.c2, self.c3]
    }

    pub fn is_finite(&self) -> bool {
        self.c1.is_finite() && self.c2.is_finite() && self.c3.is_finite()
    }

    /// Lorentzian inner product `-x1 y1 + x2 y2 + x3 y3`.
    pub fn dot(&self, other: &Vec3) -> f64 {
        lorentz_dot(self, other)
    }

    /// Lorentzian vector product, see [`lorentz_cross`].
    pub fn cross(&self, other: &Vec3) -> Vec3 {
        lorentz_cross(self, other)
    }

    /// `<v, v>` under the Lorentz metric. Can be negative.
    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    /// Ordinary Euclidean length of the coordinate triple; used for deviations.
    pub fn euclid_norm(&self) -> f64 {
        (self.c1 * self.c1 + self.c2 * self.c2 + self.c3 * self.c3).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.c1.abs().max(self.c2.abs()).max(self.c3.abs())
    }

    pub fn is_zero(&self) -> bool {
        self.c1 == 0.0 && self.c2 == 0.0 && self.c3 == 0.0
    }

    pub fn causal_character(&self, eps_null: f64) -> CausalCharacter {
        causal_character(self, eps_null)
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        v.to_array()
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.c1,
            1 => &self.c2,
            2 => &self.c3,
            _ => panic!("Vec3 index {i} out of range"),
        }
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.c1 + o.c1, self.c2 + o.c2, self.c3 + o.c3)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.c1 - o.c1, self.c2 - o.c2, self.c3 - o.c3)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl SubAssign for Vec3 {
    fn sub_assign(&mut self, o: Vec3) {
        *self = *self - o;
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.c1, -self.c2, -self.c3)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, k: f64) -> Vec3 {
        Vec3::new(self.c1 * k, self.c2 * k, self.c3 * k)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, k: f64) -> Vec3 {
        Vec3::new(self.c1 / k, self.c2 / k, self.c3 / k)
    }
}

impl std::iter::Sum for Vec3 {
    fn sum<I: Iterator<Item = Vec3>>(iter: I) -> Vec3 {
        iter.fold(Vec3::ZERO, |acc, v| acc + v)
    }
}

/// Causal character of a vector. The zero vector counts as spacelike.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CausalCharacter {
    Spacelike,
    Timelike,
    Null,
}

pub fn lorentz_dot(x: &Vec3, y: &Vec3) -> f64 {
    -x.c1 * y.c1 + x.c2 * y.c2 + x.c3 * y.c3
}

/// Vector product of E^3_1:
/// `x ∧ y = (x2 y3 - x3 y2, x1 y3 - x3 y1, x2 y1 - x1 y2)`.
///
/// The result is Lorentz-orthogonal to both factors and reproduces
/// `e1 ∧ e2 = -e3`, `e2 ∧ e3 = e1`, `e3 ∧ e1 = -e2`.
pub fn lorentz_cross(x: &Vec3, y: &Vec3) -> Vec3 {
    Vec3::new(
        x.c2 * y.c3 - x.c3 * y.c2,
        x.c1 * y.c3 - x.c3 * y.c1,
        x.c2 * y.c1 - x.c1 * y.c2,
    )
}

/// Classify with an absolute threshold on `<v, v>`.
pub fn causal_character(v: &Vec3, eps_null: f64) -> CausalCharacter {
    let q = v.norm_sq();
    if q < -eps_null {
        CausalCharacter::Timelike
    } else if q.abs() <= eps_null && v.max_abs() > eps_null {
        CausalCharacter::Null
    } else {
        CausalCharacter::Spacelike
    }
}

/// Classify with the threshold scaled by `max|v_i|^2`, for vectors far from unit size.
pub fn causal_character_relative(v: &Vec3, eps_rel: f64) -> CausalCharacter {
    let scale = v.max_abs();
    if scale == 0.0 {
        return CausalCharacter::Spacelike;
    }
    causal_character(&(*v / scale), eps_rel)
}

/// A linear map of E^3_1 stored as a row-major 3x3 matrix.
///
/// The constructors produce proper orthochronous isometries, which preserve
/// both the metric and the vector product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzTransform {
    pub m: [[f64; 3]; 3],
}

impl LorentzTransform {
    pub const IDENTITY: LorentzTransform = LorentzTransform {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    /// Spatial rotation by `angle` in the (x2, x3) plane.
    pub fn rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self {
            m: [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]],
        }
    }

    /// Boost with the given rapidity along x2.
    pub fn boost_x2(rapidity: f64) -> Self {
        let (ch, sh) = (rapidity.cosh(), rapidity.sinh());
        Self {
            m: [[ch, sh, 0.0], [sh, ch, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    /// Boost with the given rapidity along x3.
    pub fn boost_x3(rapidity: f64) -> Self {
        let (ch, sh) = (rapidity.cosh(), rapidity.sinh());
        Self {
            m: [[ch, 0.0, sh], [0.0, 1.0, 0.0], [sh, 0.0, ch]],
        }
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        let r = |i: usize| self.m[i][0] * v.c1 + self.m[i][1] * v.c2 + self.m[i][2] * v.c3;
        Vec3::new(r(0), r(1), r(2))
    }

    pub fn compose(&self, other: &LorentzTransform) -> LorentzTransform {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3).map(|k| self.m[i][k] * other.m[k][j]).sum();
            }
        }
        LorentzTransform { m }
    }
}
