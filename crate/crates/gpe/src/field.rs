//! Scalar field abstraction.
//!
//! Every solver in this crate runs over either real or complex grid
//! functions: non-rotating problems discretized with finite differences or
//! the sine basis are real, rotating problems on periodic grids are complex.
//! The [`Field`] trait captures the handful of scalar operations the energy
//! evaluators and the sphere-constrained optimizers need, so the whole
//! pipeline is written once and monomorphized for `f64` and `Complex64`.
//!
//! Inner products follow the real-geometry convention used throughout:
//! the directional derivative of an objective along `D` is `Re(D^* G)`,
//! so [`re_dot`] is the inner product the optimizers care about, while
//! [`cdot`] keeps the full complex value where the algebra needs it.

use num_complex::Complex64;

/// Scalar type of a grid function: `f64` or [`Complex64`].
pub trait Field:
    Copy + Clone + PartialEq + std::fmt::Debug + Send + Sync + 'static
{
    /// Whether this field carries an imaginary part.
    const IS_COMPLEX: bool;
    /// Additive identity.
    const ZERO: Self;

    /// Embeds a real number.
    fn from_re(re: f64) -> Self;
    /// Converts from a complex value, failing when the imaginary part
    /// cannot be represented.
    fn try_from_complex(z: Complex64) -> Option<Self>;
    /// Converts from a complex value, discarding an unrepresentable
    /// imaginary part. Used on transform outputs whose imaginary part is
    /// zero in exact arithmetic.
    fn from_complex_lossy(z: Complex64) -> Self;
    /// Embeds into the complex plane.
    fn to_complex(self) -> Complex64;

    /// Complex conjugate (identity for `f64`).
    fn conj(self) -> Self;
    /// Real part.
    fn re(self) -> f64;
    /// Squared modulus `|x|^2`.
    fn abs_sqr(self) -> f64;
    /// `Re(conj(self) * rhs)`.
    fn re_inner(self, rhs: Self) -> f64;
    /// Multiplication by a real scalar.
    fn scale(self, s: f64) -> Self;
    /// Multiplication by a complex scalar; the scalar must be real when
    /// `Self = f64` (its imaginary part is exactly zero in every call site).
    fn mul_c(self, s: Complex64) -> Self;
    /// Field multiplication.
    fn mul(self, rhs: Self) -> Self;
    /// Field addition.
    fn add(self, rhs: Self) -> Self;
    /// Field subtraction.
    fn sub(self, rhs: Self) -> Self;
    /// True when all components are finite.
    fn is_finite(self) -> bool;
}

impl Field for f64 {
    const IS_COMPLEX: bool = false;
    const ZERO: Self = 0.0;

    #[inline]
    fn from_re(re: f64) -> Self {
        re
    }
    #[inline]
    fn try_from_complex(z: Complex64) -> Option<Self> {
        (z.im == 0.0).then_some(z.re)
    }
    #[inline]
    fn from_complex_lossy(z: Complex64) -> Self {
        z.re
    }
    #[inline]
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn re(self) -> f64 {
        self
    }
    #[inline]
    fn abs_sqr(self) -> f64 {
        self * self
    }
    #[inline]
    fn re_inner(self, rhs: Self) -> f64 {
        self * rhs
    }
    #[inline]
    fn scale(self, s: f64) -> Self {
        self * s
    }
    #[inline]
    fn mul_c(self, s: Complex64) -> Self {
        self * s.re
    }
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        self * rhs
    }
    #[inline]
    fn add(self, rhs: Self) -> Self {
        self + rhs
    }
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        self - rhs
    }
    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl Field for Complex64 {
    const IS_COMPLEX: bool = true;
    const ZERO: Self = Complex64::new(0.0, 0.0);

    #[inline]
    fn from_re(re: f64) -> Self {
        Complex64::new(re, 0.0)
    }
    #[inline]
    fn try_from_complex(z: Complex64) -> Option<Self> {
        Some(z)
    }
    #[inline]
    fn from_complex_lossy(z: Complex64) -> Self {
        z
    }
    #[inline]
    fn to_complex(self) -> Complex64 {
        self
    }
    #[inline]
    fn conj(self) -> Self {
        Complex64::new(self.re, -self.im)
    }
    #[inline]
    fn re(self) -> f64 {
        self.re
    }
    #[inline]
    fn abs_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }
    #[inline]
    fn re_inner(self, rhs: Self) -> f64 {
        self.re * rhs.re + self.im * rhs.im
    }
    #[inline]
    fn scale(self, s: f64) -> Self {
        Complex64::new(self.re * s, self.im * s)
    }
    #[inline]
    fn mul_c(self, s: Complex64) -> Self {
        self * s
    }
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        self * rhs
    }
    #[inline]
    fn add(self, rhs: Self) -> Self {
        self + rhs
    }
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        self - rhs
    }
    #[inline]
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Real inner product `sum_j Re(conj(a_j) b_j)`, accumulated blockwise
/// for accuracy; the summation order is fixed, so results are
/// reproducible run to run.
pub fn re_dot<T: Field>(a: &[T], b: &[T]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    block_sum(a.len(), |j| a[j].re_inner(b[j]))
}

/// Fixed-order blockwise summation: chunks of 256 accumulate locally and
/// the partial sums combine pairwise, bounding roundoff growth at
/// O(log n) instead of O(n).
pub(crate) fn block_sum(n: usize, term: impl Fn(usize) -> f64) -> f64 {
    const BLOCK: usize = 256;
    if n <= BLOCK {
        return (0..n).map(term).sum();
    }
    let mut partials: Vec<f64> = (0..n.div_ceil(BLOCK))
        .map(|b| {
            let end = ((b + 1) * BLOCK).min(n);
            (b * BLOCK..end).map(&term).sum()
        })
        .collect();
    while partials.len() > 1 {
        let mut next = Vec::with_capacity(partials.len().div_ceil(2));
        for pair in partials.chunks(2) {
            next.push(pair.iter().sum());
        }
        partials = next;
    }
    partials[0]
}

/// Complex inner product `sum_j conj(a_j) b_j` (exactly real for `f64` data).
pub fn cdot<T: Field>(a: &[T], b: &[T]) -> Complex64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&x, &y)| x.conj().to_complex() * y.to_complex())
        .fold(Complex64::new(0.0, 0.0), |acc, z| acc + z)
}

/// Squared Euclidean norm.
pub fn norm_sqr<T: Field>(a: &[T]) -> f64 {
    block_sum(a.len(), |j| a[j].abs_sqr())
}

/// Euclidean norm.
pub fn norm<T: Field>(a: &[T]) -> f64 {
    norm_sqr(a).sqrt()
}

/// `max_j |a_j - b_j|`.
pub fn inf_norm_diff<T: Field>(a: &[T], b: &[T]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&x, &y)| x.sub(y).abs_sqr().sqrt())
        .fold(0.0, f64::max)
}

/// Writes `out_j = c1 a_j + c2 b_j` with real coefficients.
pub fn lin_comb<T: Field>(out: &mut [T], c1: f64, a: &[T], c2: f64, b: &[T]) {
    debug_assert_eq!(out.len(), a.len());
    debug_assert_eq!(out.len(), b.len());
    for ((o, &x), &y) in out.iter_mut().zip(a).zip(b) {
        *o = x.scale(c1).add(y.scale(c2));
    }
}

/// Scales a vector in place by a real factor.
pub fn scale_in_place<T: Field>(a: &mut [T], s: f64) {
    for x in a {
        *x = x.scale(s);
    }
}
