use nalgebra::{DMatrix, DVector};

use super::linear::solve;
use crate::components::sccs;
use crate::error::{Error, Result};

pub const MIXING_STEP_CAP: u64 = 1_000_000;

/// Stationary distribution of an irreducible chain.
pub fn stationary_distribution(p: &DMatrix<f64>) -> Result<DVector<f64>> {
    let n = p.nrows();
    if !irreducible(p) {
        return Err(Error::NotIrreducible);
    }
    // πP = π with the last balance equation replaced by Σπ = 1.
    let mut a = p.transpose() - DMatrix::<f64>::identity(n, n);
    let mut b = DVector::zeros(n);
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    b[n - 1] = 1.0;
    solve(a, b, "stationary")
}

fn irreducible(p: &DMatrix<f64>) -> bool {
    let n = p.nrows();
    let nodes: Vec<usize> = (0..n).collect();
    n > 0 && sccs(&nodes, |i| (0..n).filter(|&j| p[(i, j)] > 0.0).collect()).len() == 1
}

/// Least `t` such that every row of `M̂^t` is within total variation `ε` of
/// the stationary distribution, where `M̂ = (M + I)/2`.
pub fn ergodic_mixing_time(p: &DMatrix<f64>, eps: f64) -> Result<u64> {
    let n = p.nrows();
    if p.ncols() != n {
        return Err(Error::InvalidArgument(
            "transition matrix must be square".into(),
        ));
    }
    let lazy = (p + DMatrix::<f64>::identity(n, n)).scale(0.5);
    let pi = stationary_distribution(&lazy)?;
    let distance = |d: &DMatrix<f64>| -> f64 {
        (0..n)
            .map(|x| 0.5 * (0..n).map(|y| (d[(x, y)] - pi[y]).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    let mut d = DMatrix::<f64>::identity(n, n);
    let mut t = 0;
    while distance(&d) > eps + 1e-12 {
        if t >= MIXING_STEP_CAP {
            return Err(Error::cap("mixing steps", t, MIXING_STEP_CAP));
        }
        d = &d * &lazy;
        t += 1;
    }
    Ok(t)
}

/// `αM + (1−α)I` together with its expected one-step rewards when the added
/// self-loop mass earns nothing and original transitions keep `rewards`.
pub fn lazy_chain(
    p: &DMatrix<f64>,
    rewards: &DMatrix<f64>,
    alpha: f64,
) -> (DMatrix<f64>, DVector<f64>) {
    let n = p.nrows();
    let hat = p.scale(alpha) + DMatrix::<f64>::identity(n, n).scale(1.0 - alpha);
    let r = DVector::from_fn(n, |i, _| {
        alpha * (0..n).map(|j| p[(i, j)] * rewards[(i, j)]).sum::<f64>()
    });
    (hat, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluate::gain_of_chain;

    #[test]
    fn trivial_chain_is_mixed() {
        let p = DMatrix::from_element(1, 1, 1.0);
        assert_eq!(ergodic_mixing_time(&p, 0.25).unwrap(), 0);
    }

    #[test]
    fn flip_chain_mixes_in_one_step() {
        let p = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert_eq!(ergodic_mixing_time(&p, 0.25).unwrap(), 1);
    }

    #[test]
    fn reducible_chain_is_rejected() {
        let p = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.5, 0.5]);
        assert!(matches!(
            ergodic_mixing_time(&p, 0.25),
            Err(Error::NotIrreducible)
        ));
    }

    #[test]
    fn lazy_chain_scales_gain() {
        let p = DMatrix::from_row_slice(3, 3, &[0.0, 0.7, 0.3, 0.2, 0.0, 0.8, 1.0, 0.0, 0.0]);
        let rw = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.2, 0.5, 0.0, 0.9, 0.3, 0.0, 0.0]);
        let r = DVector::from_fn(3, |i, _| {
            (0..3).map(|j| p[(i, j)] * rw[(i, j)]).sum::<f64>()
        });
        let (g, _) = gain_of_chain(&p, &r).unwrap();
        for alpha in [0.25, 0.5, 0.75] {
            let (hat, rh) = lazy_chain(&p, &rw, alpha);
            let (gh, _) = gain_of_chain(&hat, &rh).unwrap();
            assert!((gh - alpha * g).abs() < 1e-9);
        }
    }
}
