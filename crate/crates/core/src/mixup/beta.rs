//! Beta(α, α) and Gamma variates.
//!
//! For α ≤ 1 Jöhnk's rejection method is used, evaluated in log space so
//! that `U^(1/α)` does not underflow for small α. For α > 1 the variate is
//! `G₁ / (G₁ + G₂)` with Marsaglia–Tsang gamma draws.

use rand::Rng;

use super::MixupError;

/// Uniform on (0, 1].
fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u = open_unit(rng);
    let v = rng.random::<f64>();
    libm::sqrt(-2.0 * libm::log(u)) * libm::cos(core::f64::consts::TAU * v)
}

/// Gamma(shape, 1) for `shape ≥ 1`.
pub fn sample_gamma<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    debug_assert!(shape >= 1.0);
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / libm::sqrt(9.0 * d);
    loop {
        let x = standard_normal(rng);
        let t = 1.0 + c * x;
        if t <= 0.0 {
            continue;
        }
        let v = t * t * t;
        let u = open_unit(rng);
        if libm::log(u) < 0.5 * x * x + d - d * v + d * libm::log(v) {
            return d * v;
        }
    }
}

fn johnk<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    loop {
        let log_x = libm::log(open_unit(rng)) / alpha;
        let log_y = libm::log(open_unit(rng)) / alpha;
        let hi = log_x.max(log_y);
        let log_sum = hi + libm::log(libm::exp(log_x - hi) + libm::exp(log_y - hi));
        if log_sum <= 0.0 {
            return libm::exp(log_x - log_sum);
        }
    }
}

/// Draw λ ~ Beta(α, α).
pub fn sample_lambda<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> Result<f64, MixupError> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(MixupError::InvalidAlpha(alpha));
    }
    if alpha <= 1.0 {
        return Ok(johnk(alpha, rng));
    }
    let g1 = sample_gamma(alpha, rng);
    let g2 = sample_gamma(alpha, rng);
    Ok(g1 / (g1 + g2))
}
