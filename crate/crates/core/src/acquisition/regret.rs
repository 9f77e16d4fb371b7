/// `C₁ = 8 / ln(1 + σ⁻²)`.
pub fn regret_constant(noise_var: f64) -> f64 {
    8.0 / (1.0 / noise_var).ln_1p()
}

/// High-probability cumulative-regret bound `sqrt(n C₁ T β_T γ_T)`, where `n`
/// is the largest adaptive factor seen during the run (`n = 1` gives the
/// plain GP-UCB bound).
pub fn regret_bound(t: usize, beta_t: f64, gamma_t: f64, n: f64, noise_var: f64) -> f64 {
    (n * regret_constant(noise_var) * t as f64 * beta_t * gamma_t).sqrt()
}
