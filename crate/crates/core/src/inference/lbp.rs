use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::image::LabelMask;
use crate::mrf::EnergyModel;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct LbpConfig {
    /// Weight of the previous message in each update, in `[0, 1)`.
    pub damping: f64,
    /// Stop once no message moves by this much in an iteration.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Belief gaps this small count as ties (resolved to label 0). Costs are
    /// integers, so beliefs at a fixed point differ by whole units.
    pub tie_tolerance: f64,
}

impl Default for LbpConfig {
    fn default() -> Self {
        Self {
            damping: 0.5,
            tolerance: 1e-3,
            max_iterations: 100,
            tie_tolerance: 0.5,
        }
    }
}

impl LbpConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.damping) {
            return Err(Error::InvalidParameter {
                name: "damping",
                reason: "must lie in [0, 1)",
            });
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "tolerance",
                reason: "must be positive",
            });
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter {
                name: "max_iterations",
                reason: "must be at least 1",
            });
        }
        if self.tie_tolerance.is_nan() || self.tie_tolerance < 0.0 {
            return Err(Error::InvalidParameter {
                name: "tie_tolerance",
                reason: "must be non-negative",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LbpStats {
    pub iterations: usize,
    pub converged: bool,
    /// Largest message change in the last iteration.
    pub final_change: f64,
}

// Outgoing message directions.
const LEFT: usize = 0;
const RIGHT: usize = 1;
const UP: usize = 2;
const DOWN: usize = 3;

/// Min-sum belief propagation on the 4-connected grid.
///
/// With two labels and a Potts term every normalized message is fully
/// described by `m(1) - m(0)`, which is what the planes store. The message
/// from `p` to `q` is the clamp of `p`'s belief difference, minus what `q`
/// sent, into `[-λ, λ]`. Updates are synchronous and damped.
pub fn solve_lbp(model: &EnergyModel, cfg: &LbpConfig) -> Result<LabelMask> {
    Ok(lbp_with_stats(model, cfg)?.0)
}

pub fn lbp_with_stats(model: &EnergyModel, cfg: &LbpConfig) -> Result<(LabelMask, LbpStats)> {
    cfg.validate()?;
    let (w, h) = model.dims();
    let n = model.len();
    let lambda = model.potts_weight() as f64;
    let data: Vec<f64> = model.unary().iter().map(|u| (u[1] - u[0]) as f64).collect();

    // msg[dir][p]: message from p to its neighbour in direction dir.
    let mut msg = vec![vec![0.0f64; n]; 4];
    let mut next = msg.clone();
    let mut stats = LbpStats::default();

    let belief = |msg: &[Vec<f64>], p: usize| -> f64 {
        let (x, y) = (p % w, p / w);
        let mut b = data[p];
        if x > 0 {
            b += msg[RIGHT][p - 1];
        }
        if x + 1 < w {
            b += msg[LEFT][p + 1];
        }
        if y > 0 {
            b += msg[DOWN][p - w];
        }
        if y + 1 < h {
            b += msg[UP][p + w];
        }
        b
    };

    for iter in 1..=cfg.max_iterations {
        let mut change = 0.0f64;
        for p in 0..n {
            let (x, y) = (p % w, p / w);
            let b = belief(&msg, p);
            // (direction, neighbour, what the neighbour sent back to p)
            let links = [
                (LEFT, x > 0, p.wrapping_sub(1), RIGHT),
                (RIGHT, x + 1 < w, p + 1, LEFT),
                (UP, y > 0, p.wrapping_sub(w), DOWN),
                (DOWN, y + 1 < h, p + w, UP),
            ];
            for (dir, exists, q, back) in links {
                if !exists {
                    continue;
                }
                let fresh = (b - msg[back][q]).clamp(-lambda, lambda);
                let old = msg[dir][p];
                let damped = cfg.damping * old + (1.0 - cfg.damping) * fresh;
                change = change.max((damped - old).abs());
                next[dir][p] = damped;
            }
        }
        core::mem::swap(&mut msg, &mut next);
        stats.iterations = iter;
        stats.final_change = change;
        if change < cfg.tolerance {
            stats.converged = true;
            break;
        }
    }

    let labels = (0..n)
        .map(|p| belief(&msg, p) < -cfg.tie_tolerance)
        .collect();
    let mask = LabelMask::new(w, h, labels).expect("model dims are valid");
    Ok((mask, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_weight_is_unary_argmin() {
        let unary = vec![[5, 4], [4, 5], [7, 7], [-3, -10], [0, 255], [100, -5]];
        let m = EnergyModel::new(3, 2, unary, 0).unwrap();
        let (mask, stats) = lbp_with_stats(&m, &LbpConfig::default()).unwrap();
        assert_eq!(mask, m.unary_argmin());
        assert!(stats.converged);
        assert_eq!(stats.iterations, 1);
    }

    #[test]
    fn chain_majority() {
        let m = EnergyModel::new(3, 1, vec![[0, 100], [10, 0], [0, 100]], 20).unwrap();
        assert_eq!(
            solve_lbp(&m, &LbpConfig::default()).unwrap().as_slice(),
            &[false; 3]
        );
    }

    #[test]
    fn rejects_bad_config() {
        let m = EnergyModel::new(1, 1, vec![[0, 0]], 0).unwrap();
        let bad = LbpConfig {
            damping: 1.0,
            ..Default::default()
        };
        assert!(solve_lbp(&m, &bad).is_err());
        let bad = LbpConfig {
            max_iterations: 0,
            ..Default::default()
        };
        assert!(solve_lbp(&m, &bad).is_err());
    }
}
