//! FIFO push-relabel maximum flow with gap and global relabeling.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

pub type Capacity = i64;

#[derive(Debug, Clone, Copy)]
struct Arc {
    to: u32,
    /// Index of the paired arc in `adj[to]`.
    rev: u32,
    /// Residual capacity.
    cap: Capacity,
}

/// Directed network with nonnegative integer capacities.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    adj: Vec<Vec<Arc>>,
    arcs: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FlowStats {
    pub flow: Capacity,
    pub pushes: u64,
    pub relabels: u64,
    pub global_relabels: u64,
    pub gaps: u64,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        Self {
            adj: vec![Vec::new(); nodes],
            arcs: 0,
        }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    /// Number of declared directed arcs (a two-way edge counts twice).
    pub fn arc_count(&self) -> usize {
        self.arcs
    }

    fn pair(&mut self, u: usize, v: usize, cap_uv: Capacity, cap_vu: Capacity) {
        assert!(
            cap_uv >= 0 && cap_vu >= 0,
            "capacities must be non-negative"
        );
        assert!(u != v, "self loops carry no flow");
        let ru = self.adj[v].len() as u32;
        let rv = self.adj[u].len() as u32;
        self.adj[u].push(Arc {
            to: v as u32,
            rev: ru,
            cap: cap_uv,
        });
        self.adj[v].push(Arc {
            to: u as u32,
            rev: rv,
            cap: cap_vu,
        });
    }

    pub fn add_arc(&mut self, u: usize, v: usize, cap: Capacity) {
        self.pair(u, v, cap, 0);
        self.arcs += 1;
    }

    /// Arc pair `u -> v` and `v -> u`, both with capacity `cap`.
    pub fn add_edge(&mut self, u: usize, v: usize, cap: Capacity) {
        self.pair(u, v, cap, cap);
        self.arcs += 2;
    }

    /// Capacity of the cut `(S, V \ S)` in the original network, where
    /// `in_source[v]` marks membership of `S`. Only meaningful before
    /// [`max_flow`](Self::max_flow) mutates residuals.
    pub fn cut_capacity(&self, in_source: &[bool]) -> Capacity {
        let mut total = 0;
        for (u, arcs) in self.adj.iter().enumerate() {
            if !in_source[u] {
                continue;
            }
            for a in arcs {
                if !in_source[a.to as usize] {
                    total += a.cap;
                }
            }
        }
        total
    }

    /// Runs push-relabel to a maximum flow from `s` to `t`, leaving the
    /// residual capacities in place for [`source_side`](Self::source_side).
    pub fn max_flow(&mut self, s: usize, t: usize) -> FlowStats {
        assert!(s != t);
        PushRelabel::new(self, s, t).run()
    }

    /// Nodes reachable from `s` through arcs with residual capacity. After
    /// [`max_flow`](Self::max_flow) this is the smallest source side of a
    /// minimum cut.
    pub fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(u) = stack.pop() {
            for a in &self.adj[u] {
                let v = a.to as usize;
                if a.cap > 0 && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }
}

struct PushRelabel<'a> {
    net: &'a mut FlowNetwork,
    s: usize,
    t: usize,
    n: usize,
    excess: Vec<Capacity>,
    height: Vec<usize>,
    current: Vec<usize>,
    /// Number of nodes at each height below `n`.
    count: Vec<usize>,
    queue: VecDeque<usize>,
    queued: Vec<bool>,
    stats: FlowStats,
}

impl<'a> PushRelabel<'a> {
    fn new(net: &'a mut FlowNetwork, s: usize, t: usize) -> Self {
        let n = net.adj.len();
        Self {
            net,
            s,
            t,
            n,
            excess: vec![0; n],
            height: vec![0; n],
            current: vec![0; n],
            count: vec![0; n + 1],
            queue: VecDeque::new(),
            queued: vec![false; n],
            stats: FlowStats::default(),
        }
    }

    fn run(mut self) -> FlowStats {
        self.global_relabel();
        let s = self.s;
        for i in 0..self.net.adj[s].len() {
            let a = self.net.adj[s][i];
            if a.cap > 0 {
                self.push(s, i, a.cap);
            }
        }
        let mut discharges = 0usize;
        while let Some(u) = self.queue.pop_front() {
            self.queued[u] = false;
            self.discharge(u);
            discharges += 1;
            if discharges % self.n == 0 {
                self.global_relabel();
            }
        }
        self.stats.flow = self.excess[self.t];
        self.stats
    }

    fn activate(&mut self, v: usize) {
        if v != self.s && v != self.t && !self.queued[v] && self.excess[v] > 0 {
            self.queued[v] = true;
            self.queue.push_back(v);
        }
    }

    fn push(&mut self, u: usize, i: usize, delta: Capacity) {
        let Arc { to, rev, .. } = self.net.adj[u][i];
        let v = to as usize;
        self.net.adj[u][i].cap -= delta;
        self.net.adj[v][rev as usize].cap += delta;
        self.excess[u] -= delta;
        self.excess[v] += delta;
        self.stats.pushes += 1;
        self.activate(v);
    }

    fn set_height(&mut self, v: usize, h: usize) {
        if self.height[v] < self.n {
            self.count[self.height[v]] -= 1;
        }
        self.height[v] = h;
        if h < self.n {
            self.count[h] += 1;
        }
    }

    fn discharge(&mut self, u: usize) {
        while self.excess[u] > 0 {
            if self.current[u] == self.net.adj[u].len() {
                self.relabel(u);
                if self.height[u] >= 2 * self.n {
                    // No residual arc left; cannot happen for a valid preflow.
                    break;
                }
                continue;
            }
            let i = self.current[u];
            let a = self.net.adj[u][i];
            if a.cap > 0 && self.height[u] == self.height[a.to as usize] + 1 {
                let delta = self.excess[u].min(a.cap);
                self.push(u, i, delta);
            } else {
                self.current[u] += 1;
            }
        }
    }

    fn relabel(&mut self, u: usize) {
        self.stats.relabels += 1;
        let old = self.height[u];
        let min = self.net.adj[u]
            .iter()
            .filter(|a| a.cap > 0)
            .map(|a| self.height[a.to as usize])
            .min();
        let new = min.map_or(2 * self.n, |h| h + 1);
        self.set_height(u, new);
        self.current[u] = 0;
        if old < self.n && self.count[old] == 0 {
            self.gap(old);
        }
    }

    /// No node sits at height `h < n`, so nothing above it can reach the
    /// sink; lift those nodes out of the sink-reaching range.
    fn gap(&mut self, h: usize) {
        self.stats.gaps += 1;
        for v in 0..self.n {
            let hv = self.height[v];
            if hv > h && hv < self.n && v != self.s {
                self.set_height(v, self.n + 1);
                self.current[v] = 0;
            }
        }
    }

    /// Exact distance labels: residual distance to `t`, or `n` plus the
    /// residual distance to `s` for nodes cut off from `t`.
    fn global_relabel(&mut self) {
        self.stats.global_relabels += 1;
        let n = self.n;
        let unset = usize::MAX;
        let mut height = vec![unset; n];
        // Pin the source first so sink distances never route through it.
        height[self.s] = n;
        self.bfs_to(self.t, 0, &mut height);
        self.bfs_to(self.s, n, &mut height);
        for h in height.iter_mut() {
            if *h == unset {
                *h = 2 * n;
            }
        }
        self.count.iter_mut().for_each(|c| *c = 0);
        for (v, &h) in height.iter().enumerate() {
            if h < n {
                self.count[h] += 1;
            }
            self.height[v] = h;
            self.current[v] = 0;
        }
    }

    /// Backward BFS from `root` over residual arcs `v -> u`, labeling
    /// unlabeled nodes with `base + distance`.
    fn bfs_to(&self, root: usize, base: usize, height: &mut [usize]) {
        let mut queue = VecDeque::new();
        height[root] = base;
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            for a in &self.net.adj[u] {
                let v = a.to as usize;
                let back = self.net.adj[v][a.rev as usize].cap;
                if back > 0 && height[v] == usize::MAX {
                    height[v] = height[u] + 1;
                    queue.push_back(v);
                }
            }
        }
    }
}
