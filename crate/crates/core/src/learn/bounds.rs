/// Draws per pair after which the empirical model is within `delta` of the
/// truth entrywise, with matching support, with probability above `1 − eps`.
///
/// Accuracy is clipped to `p_min` so that the support is recovered as well.
pub fn required_samples(
    delta: f64,
    eps: f64,
    p_min: f64,
    num_states: usize,
    num_actions: usize,
) -> u128 {
    let d = delta.min(p_min);
    let n = (num_states * num_states * num_actions) as f64;
    let x = (2.0 * n / eps).ln() / (d * d);
    // Float-to-int casts saturate, so astronomically small `d` gives u128::MAX.
    x.ceil() as u128
}

/// Entrywise accuracy that keeps optimal limit-average values within `eps`.
///
/// Combines a bound on absorption probabilities with one on component gains;
/// `beta` lower-bounds both the smallest transition probability and the
/// reciprocal of the mixing time.
pub fn delta_for_accuracy(eps: f64, num_states: usize, beta: f64) -> f64 {
    let n = num_states as f64;
    let e = eps / (2.0 * n);
    let d1 = e * (1.0 - beta.powi(num_states as i32)).ln() / (6.0 * n * n * (e / 6.0).ln());
    let rounds = (4.0 / e).log2().ceil();
    let d2 = (e * e / (24.0 * n * rounds / beta)).powi(2);
    d1.min(d2)
}
