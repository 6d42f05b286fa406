use std::fmt;

use crate::error::{check_len, invalid, Error, Result};
use crate::Scalar;

/// Image height and width in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Shape {
    pub height: usize,
    pub width: usize,
}

impl Shape {
    pub const fn new(height: usize, width: usize) -> Self {
        Self { height, width }
    }

    pub const fn len(&self) -> usize {
        self.height * self.width
    }

    pub const fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.height, self.width)
    }
}

/// Single-channel image stored row-major.
///
/// Values are unconstrained reals; the nominal `[0, 1]` range is only
/// enforced when writing to disk.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid<T> {
    shape: Shape,
    values: Vec<T>,
}

impl<T: Scalar> ImageGrid<T> {
    pub fn new(shape: Shape, values: Vec<T>) -> Result<Self> {
        if shape.height == 0 || shape.width == 0 {
            return invalid(format!("image shape {shape} has a zero side"));
        }
        check_len("image values", shape.len(), values.len())?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("image contains non-finite values".into()));
        }
        Ok(Self { shape, values })
    }

    /// Wraps values produced by an in-crate operation on a valid image.
    pub(crate) fn from_raw(shape: Shape, values: Vec<T>) -> Self {
        debug_assert_eq!(shape.len(), values.len());
        Self { shape, values }
    }

    pub fn zeros(shape: Shape) -> Self {
        Self::filled(shape, T::zero())
    }

    pub fn filled(shape: Shape, value: T) -> Self {
        assert!(shape.height > 0 && shape.width > 0, "empty image shape");
        Self { shape, values: vec![value; shape.len()] }
    }

    /// Builds an image by evaluating `f(row, col)` at every pixel.
    pub fn from_fn(shape: Shape, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut values = Vec::with_capacity(shape.len());
        for i in 0..shape.height {
            for j in 0..shape.width {
                values.push(f(i, j));
            }
        }
        Self { shape, values }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn height(&self) -> usize {
        self.shape.height
    }

    pub fn width(&self) -> usize {
        self.shape.width
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.values[row * self.shape.width + col]
    }

    pub fn min_max(&self) -> (T, T) {
        self.values.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
    }
}
