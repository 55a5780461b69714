//! Smooth steps built from `σ(u) = exp(−1/u)`.

/// `σ(u) = exp(−1/u)` for `u > 0`, zero otherwise.
pub fn sigma(u: f64) -> f64 {
    if u > 0.0 {
        (-1.0 / u).exp()
    } else {
        0.0
    }
}

/// Derivative of [`sigma`].
pub fn sigma_prime(u: f64) -> f64 {
    if u > 0.0 {
        sigma(u) / (u * u)
    } else {
        0.0
    }
}

/// Smooth step `s(u) = σ(u) / (σ(u) + σ(1 − u))`, clamped to 0 below the unit
/// interval and 1 above it. All derivatives vanish at both ends and
/// `s(1 − u) = 1 − s(u)`.
pub fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let a = sigma(u);
        let b = sigma(1.0 - u);
        a / (a + b)
    }
}

/// Derivative of [`smooth_step`].
pub fn smooth_step_prime(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        return 0.0;
    }
    let a = sigma(u);
    let b = sigma(1.0 - u);
    let da = sigma_prime(u);
    let db = -sigma_prime(1.0 - u);
    (da * b - a * db) / ((a + b) * (a + b))
}
