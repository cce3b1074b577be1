//! Sample fan-out. With the `parallel` feature the map runs on the rayon
//! pool; without it, or with [`Strategy::Sequential`], it is a plain loop.
//! Results are collected in input order either way, so both paths produce
//! bit-identical output.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Sequential,
    #[default]
    Parallel,
}

impl Strategy {
    /// Whether this strategy will actually fan out in the current build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Strategy::Parallel
    }
}

/// Maps `f` over `points`, short-circuiting on the first error in order.
pub fn try_map<T, E, F>(strategy: Strategy, points: &[f64], f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(f64) -> Result<T, E> + Sync,
{
    #[cfg(feature = "parallel")]
    if strategy == Strategy::Parallel {
        use rayon::prelude::*;
        return points.par_iter().map(|&x| f(x)).collect();
    }
    let _ = strategy;
    points.iter().map(|&x| f(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_strategies_agree() {
        let pts: Vec<f64> = (0..1000).map(|i| i as f64 * 0.01).collect();
        let f = |x: f64| Ok::<_, ()>(x.sin() * x.cos());
        let a = try_map(Strategy::Sequential, &pts, f).unwrap();
        let b = try_map(Strategy::Parallel, &pts, f).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn first_error_wins() {
        let pts = [0.0, 1.0, 2.0, 3.0];
        let r = try_map(Strategy::Parallel, &pts, |x| if x >= 2.0 { Err(x) } else { Ok(x) });
        assert!(r.is_err());
    }
}
