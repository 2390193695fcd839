//! Arithmetic backends for the running-sum filter.
//!
//! The fast path is written once against [`Arith`]. [`Plain`] compiles down to
//! ordinary float ops; [`Counting`] tallies every addition and multiplication
//! and attributes it to the output pixel being computed.

/// Which pass of a separable filter a line belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    Row,
    Column,
}

pub trait Arith {
    /// Announces the line about to be filtered.
    #[inline(always)]
    fn begin_line(&mut self, _axis: Axis, _index: usize) {}

    /// Attributes subsequent ops to sample `pos` of the current line, or to
    /// boundary bookkeeping when `None`.
    #[inline(always)]
    fn at(&mut self, _pos: Option<usize>) {}

    fn add(&mut self, a: f64, b: f64) -> f64;
    fn sub(&mut self, a: f64, b: f64) -> f64;
    fn mul(&mut self, a: f64, b: f64) -> f64;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Plain;

impl Arith for Plain {
    #[inline(always)]
    fn add(&mut self, a: f64, b: f64) -> f64 {
        a + b
    }
    #[inline(always)]
    fn sub(&mut self, a: f64, b: f64) -> f64 {
        a - b
    }
    #[inline(always)]
    fn mul(&mut self, a: f64, b: f64) -> f64 {
        a * b
    }
}

/// Counts ops of a 2D separable pass over a `width × height` image.
///
/// Ops are attributed to pixel `(x, y)`; a pixel is interior when every
/// slice window around it stays inside the image in both directions, i.e.
/// `x ∈ [margin, width - margin)` with `margin = max_radius + 1` on the left
/// and `max_radius` on the right (same for `y`).
#[derive(Clone, Debug)]
pub struct Counting {
    width: usize,
    height: usize,
    max_radius: usize,
    axis: Axis,
    line: usize,
    interior: bool,
    pub interior_additions: u64,
    pub interior_multiplications: u64,
    pub total_additions: u64,
    pub total_multiplications: u64,
}

impl Counting {
    pub fn new(width: usize, height: usize, max_radius: usize) -> Self {
        Self {
            width,
            height,
            max_radius,
            axis: Axis::Row,
            line: 0,
            interior: false,
            interior_additions: 0,
            interior_multiplications: 0,
            total_additions: 0,
            total_multiplications: 0,
        }
    }

    fn inside(&self, pos: usize, len: usize) -> bool {
        pos > self.max_radius && pos + self.max_radius < len
    }

    /// Number of interior pixels under the definition above.
    pub fn interior_pixels(&self) -> u64 {
        let span = |len: usize| (0..len).filter(|&p| self.inside(p, len)).count() as u64;
        span(self.width) * span(self.height)
    }

    #[inline]
    fn tally_add(&mut self) {
        self.total_additions += 1;
        if self.interior {
            self.interior_additions += 1;
        }
    }

    #[inline]
    fn tally_mul(&mut self) {
        self.total_multiplications += 1;
        if self.interior {
            self.interior_multiplications += 1;
        }
    }
}

impl Arith for Counting {
    fn begin_line(&mut self, axis: Axis, index: usize) {
        self.axis = axis;
        self.line = index;
        self.interior = false;
    }

    fn at(&mut self, pos: Option<usize>) {
        self.interior = match (pos, self.axis) {
            (None, _) => false,
            (Some(x), Axis::Row) => {
                self.inside(x, self.width) && self.inside(self.line, self.height)
            }
            (Some(y), Axis::Column) => {
                self.inside(self.line, self.width) && self.inside(y, self.height)
            }
        };
    }

    fn add(&mut self, a: f64, b: f64) -> f64 {
        self.tally_add();
        a + b
    }

    fn sub(&mut self, a: f64, b: f64) -> f64 {
        self.tally_add();
        a - b
    }

    fn mul(&mut self, a: f64, b: f64) -> f64 {
        self.tally_mul();
        a * b
    }
}
