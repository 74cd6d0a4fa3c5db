//! Re χ̃(ω) = (1/π) P∫₀^∞ 2xJ(x)/(x² − ω²) dx by pole subtraction.

/// ∫₀^∞ [g(x) − g(ω)]/(x² − ω²) dx / π with g = 2xJ, mapped to t ∈ (0, 1)
/// by x = scale·t/(1 − t) and integrated with composite Simpson.
/// `density` must decay so that g(x)/x² → 0.
pub fn real_part(density: impl Fn(f64) -> f64, omega: f64, scale: f64) -> f64 {
    let g = |x: f64| 2.0 * x * density(x);
    let gw = g(omega);
    let f = |t: f64| {
        if t >= 1.0 {
            return -gw / scale;
        }
        let x = scale * t / (1.0 - t);
        let jac = scale / ((1.0 - t) * (1.0 - t));
        let mut den = x * x - omega * omega;
        let mut gx = g(x);
        if den.abs() < 1e-9 * omega * omega {
            let x2 = x * (1.0 + 1e-6);
            den = x2 * x2 - omega * omega;
            gx = g(x2);
        }
        (gx - gw) / den * jac
    };
    let n = 400_000usize;
    let h = 1.0 / n as f64;
    let mut sum = f(0.0) + f(1.0);
    for i in 1..n {
        sum += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0 / std::f64::consts::PI
}
