/// 2/√π, the derivative of `erf` at zero.
pub const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// Error function. Odd symmetry is exact: the magnitude is computed on |x|
/// and the sign reapplied.
#[inline]
pub fn erf(x: f64) -> f64 {
    let y = libm::erf(x.abs());
    if x < 0.0 {
        -y
    } else {
        y
    }
}

/// d/dx erf(x) = 2/√π · exp(−x²).
#[inline]
pub fn erf_derivative(x: f64) -> f64 {
    FRAC_2_SQRT_PI * (-x * x).exp()
}
