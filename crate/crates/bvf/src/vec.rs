//! Small fixed-dimension vector and rotation helpers.
//!
//! Everything in this crate lives in dimension 2 or 3. Points are stored as
//! `[f64; 3]` with unused trailing components equal to zero, so hot loops
//! stay allocation-free; the active dimension travels alongside the data.

use crate::error::{Error, Result};

pub const MAX_D: usize = 3;

pub type Point = [f64; 3];

#[inline]
pub fn pt2(x: f64, y: f64) -> Point {
    [x, y, 0.0]
}

#[inline]
pub fn pt3(x: f64, y: f64, z: f64) -> Point {
    [x, y, z]
}

#[inline]
pub fn dot(a: &Point, b: &Point, d: usize) -> f64 {
    let mut s = 0.0;
    for k in 0..d {
        s += a[k] * b[k];
    }
    s
}

#[inline]
pub fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add(a: &Point, b: &Point) -> Point {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn scale(a: &Point, s: f64) -> Point {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn norm(a: &Point, d: usize) -> f64 {
    dot(a, a, d).sqrt()
}

#[inline]
pub fn dist(a: &Point, b: &Point, d: usize) -> f64 {
    let v = sub(a, b);
    norm(&v, d)
}

/// 2D cross product (z component of the 3D cross).
#[inline]
pub fn cross2(a: &Point, b: &Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Rotation stored as a row-major matrix, padded to 3x3 with the identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation {
    pub m: [[f64; 3]; 3],
    pub d: usize,
}

impl Rotation {
    pub fn identity(d: usize) -> Self {
        let mut m = [[0.0; 3]; 3];
        for (k, row) in m.iter_mut().enumerate() {
            row[k] = 1.0;
        }
        Rotation { m, d }
    }

    pub fn from_angle_2d(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Rotation {
            m: [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]],
            d: 2,
        }
    }

    /// Rotation about a coordinate axis in 3D.
    pub fn from_axis_angle_3d(axis: usize, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let m = match axis {
            0 => [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]],
            1 => [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]],
            _ => [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]],
        };
        Rotation { m, d: 3 }
    }

    /// Rotation matrix from a unit quaternion (w, x, y, z).
    pub fn from_quaternion(w: f64, x: f64, y: f64, z: f64) -> Self {
        let m = [
            [
                1.0 - 2.0 * (y * y + z * z),
                2.0 * (x * y - w * z),
                2.0 * (x * z + w * y),
            ],
            [
                2.0 * (x * y + w * z),
                1.0 - 2.0 * (x * x + z * z),
                2.0 * (y * z - w * x),
            ],
            [
                2.0 * (x * z - w * y),
                2.0 * (y * z + w * x),
                1.0 - 2.0 * (x * x + y * y),
            ],
        ];
        Rotation { m, d: 3 }
    }

    pub fn from_rows(rows: &[f64], d: usize) -> Result<Self> {
        if rows.len() != d * d {
            return Err(Error::InvalidInput(format!(
                "rotation needs {} entries for d = {d}, got {}",
                d * d,
                rows.len()
            )));
        }
        let mut r = Rotation::identity(d);
        for i in 0..d {
            for j in 0..d {
                r.m[i][j] = rows[i * d + j];
            }
        }
        r.validate()?;
        Ok(r)
    }

    pub fn rows(&self) -> Vec<f64> {
        let d = self.d;
        let mut out = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                out.push(self.m[i][j]);
            }
        }
        out
    }

    /// Checks orthogonality and det = +1 to 1e-10.
    pub fn validate(&self) -> Result<()> {
        let d = self.d;
        for i in 0..d {
            for j in 0..d {
                let mut s = 0.0;
                for k in 0..d {
                    s += self.m[k][i] * self.m[k][j];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                if (s - target).abs() > 1e-10 {
                    return Err(Error::InvalidInput(
                        "rotation matrix is not orthogonal".into(),
                    ));
                }
            }
        }
        let det = if d == 2 {
            self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
        } else {
            self.m[0][0] * (self.m[1][1] * self.m[2][2] - self.m[1][2] * self.m[2][1])
                - self.m[0][1] * (self.m[1][0] * self.m[2][2] - self.m[1][2] * self.m[2][0])
                + self.m[0][2] * (self.m[1][0] * self.m[2][1] - self.m[1][1] * self.m[2][0])
        };
        if (det - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidInput(
                "rotation matrix must have determinant +1".into(),
            ));
        }
        Ok(())
    }

    #[inline]
    pub fn apply(&self, p: &Point) -> Point {
        let m = &self.m;
        [
            m[0][0] * p[0] + m[0][1] * p[1] + m[0][2] * p[2],
            m[1][0] * p[0] + m[1][1] * p[1] + m[1][2] * p[2],
            m[2][0] * p[0] + m[2][1] * p[1] + m[2][2] * p[2],
        ]
    }

    /// Applies the inverse rotation (transpose).
    #[inline]
    pub fn apply_t(&self, p: &Point) -> Point {
        let m = &self.m;
        [
            m[0][0] * p[0] + m[1][0] * p[1] + m[2][0] * p[2],
            m[0][1] * p[0] + m[1][1] * p[1] + m[2][1] * p[2],
            m[0][2] * p[0] + m[1][2] * p[1] + m[2][2] * p[2],
        ]
    }

    pub fn is_identity(&self) -> bool {
        let mut dev: f64 = 0.0;
        for i in 0..self.d {
            for j in 0..self.d {
                let target = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((self.m[i][j] - target).abs());
            }
        }
        dev < 1e-14
    }
}

/// Surface measure of the unit sphere S^{d-1}.
pub fn sphere_surface(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI,
        _ => unreachable!("dimension {d} unsupported"),
    }
}

/// Volume of the unit ball in R^d.
pub fn ball_volume(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI / 3.0,
        _ => unreachable!("dimension {d} unsupported"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_roundtrip_2d() {
        let r = Rotation::from_angle_2d(0.7);
        r.validate().unwrap();
        let p = pt2(1.3, -0.4);
        let q = r.apply(&p);
        let back = r.apply_t(&q);
        assert!(dist(&p, &back, 2) < 1e-14);
    }

    #[test]
    fn quaternion_rotation_is_orthogonal() {
        let n = (0.9f64 * 0.9 + 0.1 * 0.1 + 0.3 * 0.3 + 0.2 * 0.2).sqrt();
        let r = Rotation::from_quaternion(0.9 / n, 0.1 / n, 0.3 / n, 0.2 / n);
        r.validate().unwrap();
    }
}
