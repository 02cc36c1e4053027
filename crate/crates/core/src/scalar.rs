//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating point scalar: `f32` or `f64`.
///
/// The default tolerances in [`crate::SolverConfig`] are tuned for `f64`; an
/// `f32` instantiation needs a config with looser tolerances.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over a [`Real`] scalar.
pub type Cx<T> = Complex<T>;

/// Argument in `[0, π]` for points of the closed upper half-plane.
///
/// Signed zeros on the negative real axis map to `π`, never `-π`.
pub(crate) fn upper_arg<T: Real>(w: Cx<T>) -> T {
    if w.im == T::zero() {
        if w.re < T::zero() {
            T::PI()
        } else {
            T::zero()
        }
    } else {
        w.im.atan2(w.re)
    }
}

/// Square root of `q` on the branch with non-negative imaginary part.
///
/// On the positive real axis both roots are real; `real_sign` picks the one
/// whose real part has the sign of `real_sign`.
pub(crate) fn upper_sqrt<T: Real>(q: Cx<T>, real_sign: T) -> Cx<T> {
    let s = q.sqrt();
    if s.im < T::zero() {
        -s
    } else if s.im == T::zero() && real_sign < T::zero() {
        Cx::new(-s.re, T::zero())
    } else {
        s
    }
}

/// Wraps an angle into `(-π, π]`.
pub(crate) fn wrap_angle<T: Real>(mut a: T) -> T {
    let two_pi = T::PI() + T::PI();
    while a > T::PI() {
        a -= two_pi;
    }
    while a <= -T::PI() {
        a += two_pi;
    }
    a
}

/// `-conj(z)`: reflection in the imaginary axis.
#[inline]
pub fn reflect<T: Real>(z: Cx<T>) -> Cx<T> {
    Cx::new(-z.re, z.im)
}
