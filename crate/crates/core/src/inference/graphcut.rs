use alloc::vec::Vec;

use super::flow::{FlowNetwork, FlowStats};
use crate::image::LabelMask;
use crate::mrf::EnergyModel;

/// s-t network for a binary Potts model. Pixel `p` is node `p`, the source
/// is node `len` and the sink `len + 1`.
///
/// `source -> p` carries the label-0 cost and `p -> sink` the label-1 cost,
/// both lifted by `max(0, -min(cost0, cost1))` so capacities are
/// nonnegative; each 4-neighbour pair gets a two-way arc of weight λ.
pub fn build_network(model: &EnergyModel) -> FlowNetwork {
    let (w, h) = model.dims();
    let n = model.len();
    let (s, t) = (n, n + 1);
    let mut net = FlowNetwork::new(n + 2);
    for (p, &[c0, c1]) in model.unary().iter().enumerate() {
        let lift = 0.max(-c0.min(c1));
        net.add_arc(s, p, c0 + lift);
        net.add_arc(p, t, c1 + lift);
    }
    let lambda = model.potts_weight();
    for y in 0..h {
        for x in 0..w {
            let p = y * w + x;
            if x + 1 < w {
                net.add_edge(p, p + 1, lambda);
            }
            if y + 1 < h {
                net.add_edge(p, p + w, lambda);
            }
        }
    }
    net
}

/// Globally optimal labeling by minimum cut. Pixels left on the source side
/// take label 1; among several optima the one with the fewest spot pixels
/// is returned.
pub fn solve_graphcut(model: &EnergyModel) -> LabelMask {
    graphcut_with_stats(model).0
}

pub fn graphcut_with_stats(model: &EnergyModel) -> (LabelMask, FlowStats) {
    let n = model.len();
    let mut net = build_network(model);
    let stats = net.max_flow(n, n + 1);
    let side = net.source_side(n);
    let labels: Vec<bool> = side[..n].to_vec();
    let mask = LabelMask::new(model.width(), model.height(), labels).expect("model dims are valid");
    (mask, stats)
}
