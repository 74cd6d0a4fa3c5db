use rand::Rng;
use thermoprobe::star::StarSystem;

/// Star with n bath modes in (0.1, 5), couplings of magnitude 0.1..0.5
/// and random signs, ω₀ ∈ (0.5, 2), G ∈ (0.2, 3).
pub fn star<R: Rng>(rng: &mut R, n: usize) -> StarSystem<f64> {
    let freqs: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..5.0)).collect();
    let couplings: Vec<f64> = (0..n)
        .map(|_| rng.gen_range(0.1..0.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
        .collect();
    StarSystem::new(rng.gen_range(0.5..2.0), freqs, couplings, rng.gen_range(0.2..3.0))
        .expect("valid random star")
}
