//! Points, vectors and the L1 plane, plus orthogonal frames built from the
//! eight signed axis permutations.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    pub x: Scalar,
    pub y: Scalar,
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vector {
    pub dx: Scalar,
    pub dy: Scalar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

impl Point {
    pub fn new(x: Scalar, y: Scalar) -> Self {
        Point { x, y }
    }

    pub fn origin() -> Self {
        Point::new(Scalar::zero(), Scalar::zero())
    }

    pub fn int(x: i64, y: i64) -> Self {
        Point::new(Scalar::from_int(x), Scalar::from_int(y))
    }

    pub fn x_aligned(&self, other: &Point) -> bool {
        self.x == other.x
    }

    pub fn y_aligned(&self, other: &Point) -> bool {
        self.y == other.y
    }

    /// Shares at least one coordinate with `other`.
    pub fn aligned(&self, other: &Point) -> bool {
        self.x_aligned(other) || self.y_aligned(other)
    }

    /// `self + t·(other − self)`.
    pub fn lerp(&self, other: &Point, t: &Scalar) -> Point {
        Point::new(
            &self.x + t * (&other.x - &self.x),
            &self.y + t * (&other.y - &self.y),
        )
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Vector {
    pub fn new(dx: Scalar, dy: Scalar) -> Self {
        Vector { dx, dy }
    }

    pub fn zero() -> Self {
        Vector::new(Scalar::zero(), Scalar::zero())
    }

    pub fn int(dx: i64, dy: i64) -> Self {
        Vector::new(Scalar::from_int(dx), Scalar::from_int(dy))
    }

    pub fn is_zero(&self) -> bool {
        self.dx.is_zero() && self.dy.is_zero()
    }

    pub fn l1_norm(&self) -> Scalar {
        self.dx.abs() + self.dy.abs()
    }

    /// The axis this vector runs along, if exactly one component is nonzero.
    pub fn axis(&self) -> Option<Axis> {
        match (self.dx.is_zero(), self.dy.is_zero()) {
            (false, true) => Some(Axis::X),
            (true, false) => Some(Axis::Y),
            _ => None,
        }
    }

    pub fn scale(&self, k: &Scalar) -> Vector {
        Vector::new(&self.dx * k, &self.dy * k)
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}>", self.dx, self.dy)
    }
}

impl Add<&Vector> for &Point {
    type Output = Point;
    fn add(self, v: &Vector) -> Point {
        Point::new(&self.x + &v.dx, &self.y + &v.dy)
    }
}

impl Sub<&Point> for &Point {
    type Output = Vector;
    fn sub(self, q: &Point) -> Vector {
        Vector::new(&self.x - &q.x, &self.y - &q.y)
    }
}

impl Add<&Vector> for &Vector {
    type Output = Vector;
    fn add(self, v: &Vector) -> Vector {
        Vector::new(&self.dx + &v.dx, &self.dy + &v.dy)
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        Vector::new(-&self.dx, -&self.dy)
    }
}

impl Mul<&Scalar> for &Vector {
    type Output = Vector;
    fn mul(self, k: &Scalar) -> Vector {
        self.scale(k)
    }
}

pub fn l1_distance(p: &Point, q: &Point) -> Scalar {
    (p - q).l1_norm()
}

/// The eight linear isometries of the plane that map axes to axes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignedPerm {
    /// `(x, y)`
    Id,
    /// `(−y, x)`, counter-clockwise quarter turn
    Rot90,
    /// `(−x, −y)`
    Rot180,
    /// `(y, −x)`
    Rot270,
    /// `(−x, y)`, mirror across the y-axis
    FlipX,
    /// `(x, −y)`
    FlipY,
    /// `(y, x)`
    Swap,
    /// `(−y, −x)`
    AntiSwap,
}

impl SignedPerm {
    /// Fixed tie-break ordering used when several orientations qualify.
    pub const ALL: [SignedPerm; 8] = [
        SignedPerm::Id,
        SignedPerm::Rot90,
        SignedPerm::Rot180,
        SignedPerm::Rot270,
        SignedPerm::FlipX,
        SignedPerm::FlipY,
        SignedPerm::Swap,
        SignedPerm::AntiSwap,
    ];

    fn matrix(self) -> [[i8; 2]; 2] {
        match self {
            SignedPerm::Id => [[1, 0], [0, 1]],
            SignedPerm::Rot90 => [[0, -1], [1, 0]],
            SignedPerm::Rot180 => [[-1, 0], [0, -1]],
            SignedPerm::Rot270 => [[0, 1], [-1, 0]],
            SignedPerm::FlipX => [[-1, 0], [0, 1]],
            SignedPerm::FlipY => [[1, 0], [0, -1]],
            SignedPerm::Swap => [[0, 1], [1, 0]],
            SignedPerm::AntiSwap => [[0, -1], [-1, 0]],
        }
    }

    fn from_matrix(m: [[i8; 2]; 2]) -> SignedPerm {
        *SignedPerm::ALL
            .iter()
            .find(|p| p.matrix() == m)
            .expect("signed permutation matrices are closed under products")
    }

    pub fn name(self) -> &'static str {
        match self {
            SignedPerm::Id => "id",
            SignedPerm::Rot90 => "rot90",
            SignedPerm::Rot180 => "rot180",
            SignedPerm::Rot270 => "rot270",
            SignedPerm::FlipX => "flip_x",
            SignedPerm::FlipY => "flip_y",
            SignedPerm::Swap => "swap",
            SignedPerm::AntiSwap => "anti_swap",
        }
    }

    pub fn apply(self, v: &Vector) -> Vector {
        let m = self.matrix();
        let comp = |row: [i8; 2]| {
            let term = |c: i8, s: &Scalar| match c {
                1 => s.clone(),
                -1 => -s,
                _ => Scalar::zero(),
            };
            term(row[0], &v.dx) + term(row[1], &v.dy)
        };
        Vector::new(comp(m[0]), comp(m[1]))
    }

    /// `self ∘ other`.
    pub fn compose(self, other: SignedPerm) -> SignedPerm {
        let a = self.matrix();
        let b = other.matrix();
        let mut c = [[0i8; 2]; 2];
        for (i, row) in c.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        SignedPerm::from_matrix(c)
    }

    pub fn inverse(self) -> SignedPerm {
        let m = self.matrix();
        SignedPerm::from_matrix([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }
}

/// An L1 isometry `p ↦ linear(p) + translation`.
///
/// In the engine a frame maps world coordinates to the canonical coordinates
/// of the current cycle.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Frame {
    #[serde(rename = "perm")]
    pub linear: SignedPerm,
    #[serde(rename = "t")]
    pub translation: Vector,
}

impl Frame {
    pub fn identity() -> Self {
        Frame {
            linear: SignedPerm::Id,
            translation: Vector::zero(),
        }
    }

    pub fn new(linear: SignedPerm, translation: Vector) -> Self {
        Frame {
            linear,
            translation,
        }
    }

    /// The frame `p ↦ linear(p − origin)`, which sends `origin` to `(0, 0)`.
    pub fn centered(linear: SignedPerm, origin: &Point) -> Self {
        let o = &Point::origin() - origin;
        Frame::new(linear, linear.apply(&o))
    }

    pub fn apply(&self, p: &Point) -> Point {
        let v = self.linear.apply(&(p - &Point::origin()));
        Point::new(v.dx + &self.translation.dx, v.dy + &self.translation.dy)
    }

    pub fn apply_vector(&self, v: &Vector) -> Vector {
        self.linear.apply(v)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Frame) -> Frame {
        Frame {
            linear: self.linear.compose(other.linear),
            translation: &self.linear.apply(&other.translation) + &self.translation,
        }
    }

    pub fn invert(&self) -> Frame {
        let inv = self.linear.inverse();
        Frame {
            linear: inv,
            translation: -&inv.apply(&self.translation),
        }
    }
}

impl fmt::Debug for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Frame({} + {:?})", self.linear.name(), self.translation)
    }
}

pub fn frame_apply(f: &Frame, p: &Point) -> Point {
    f.apply(p)
}

pub fn frame_compose(f: &Frame, g: &Frame) -> Frame {
    f.compose(g)
}

pub fn frame_invert(f: &Frame) -> Frame {
    f.invert()
}
