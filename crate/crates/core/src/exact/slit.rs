//! The vertical-slit map `g(z, t) = √(z² + 4t)` and its inverse.

use crate::error::{LoewnerError, Result};
use crate::scalar::{upper_sqrt, Cx, Real};

/// `√(z² + 4t)` on the branch mapping `ℍ \ [0, i2√t]` onto `ℍ`.
///
/// Real points keep the sign of their real part, so `sqrt_map(x, 0) = x`.
pub fn sqrt_map<T: Real>(z: Cx<T>, t: T) -> Result<Cx<T>> {
    if t < T::zero() {
        return Err(LoewnerError::Domain(format!("negative time {t}")));
    }
    if z.im < T::zero() {
        return Err(LoewnerError::Domain(format!("{z} is below the real axis")));
    }
    let height = T::lit(2.0) * t.sqrt();
    if t > T::zero() && z.re == T::zero() && z.im < height {
        return Err(LoewnerError::OnSlit { re: z.re.to_f64_lossy(), im: z.im.to_f64_lossy() });
    }
    Ok(upper_sqrt(z * z + T::lit(4.0) * t, z.re))
}

/// `√(w² − 4t)` with image in the closed upper half-plane. Real `w` with
/// `|w| < 2√t` lands on the slit.
pub fn sqrt_map_inverse<T: Real>(w: Cx<T>, t: T) -> Result<Cx<T>> {
    if t < T::zero() {
        return Err(LoewnerError::Domain(format!("negative time {t}")));
    }
    if w.im < T::zero() {
        return Err(LoewnerError::Domain(format!("{w} is below the real axis")));
    }
    Ok(upper_sqrt(w * w - T::lit(4.0) * t, w.re))
}

/// Distance from `z` to the closed segment `[0, i·height]`.
pub fn distance_to_slit<T: Real>(z: Cx<T>, height: T) -> T {
    if z.im < T::zero() {
        z.norm()
    } else if z.im > height {
        Cx::new(z.re, z.im - height).norm()
    } else {
        z.re.abs()
    }
}
