//! Random k-regular simple graphs: the homogeneous substrate the epidemic
//! runs on.
//!
//! Generation uses the configuration model (pair k stubs per node uniformly
//! at random) followed by local edge-swap repair of self-loops and duplicate
//! edges, then rejects samples that are not connected. Nodes are dense
//! indices `0..n-1`; adjacency is one flat array with the neighbors of node
//! `v` at `[v*k, (v+1)*k)`.

use std::io::{self, BufRead, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("odd degree sum: n={n} * k={k} is odd")]
    OddDegreeSum { n: usize, k: usize },
    #[error("infeasible: need n > k >= 1, got n={n}, k={k}")]
    Infeasible { n: usize, k: usize },
    #[error("pairing repair did not converge to a simple graph")]
    PairingExhausted,
    #[error("no connected sample after {0} attempts")]
    ConnectivityExhausted(usize),
    #[error("bad edge list: {0}")]
    BadEdgeList(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

const CONNECTIVITY_ATTEMPTS: usize = 100;

/// A k-regular simple graph on `n` nodes.
#[derive(Debug, Clone)]
pub struct RegularNetwork {
    n: usize,
    k: usize,
    adj: Vec<u32>,
    seed: Option<u64>,
}

impl RegularNetwork {
    /// Generate a random connected k-regular simple graph.
    ///
    /// Non-connected samples are rejected and regenerated (random regular
    /// graphs with `k >= 3` are connected with high probability, so this
    /// rarely retries).
    pub fn generate(n: usize, k: usize, rng: &mut impl Rng) -> Result<Self, NetworkError> {
        if k < 1 || n <= k {
            return Err(NetworkError::Infeasible { n, k });
        }
        if !(n * k).is_multiple_of(2) {
            return Err(NetworkError::OddDegreeSum { n, k });
        }
        for _ in 0..CONNECTIVITY_ATTEMPTS {
            let net = Self::pair_and_repair(n, k, rng)?;
            if net.is_connected() {
                return Ok(net);
            }
        }
        Err(NetworkError::ConnectivityExhausted(CONNECTIVITY_ATTEMPTS))
    }

    /// Seeded convenience wrapper around [`Self::generate`].
    pub fn from_seed(n: usize, k: usize, seed: u64) -> Result<Self, NetworkError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut net = Self::generate(n, k, &mut rng)?;
        net.seed = Some(seed);
        Ok(net)
    }

    /// Graph with `n` nodes and no edges (degree 0). Useful for isolated-node
    /// setups; `generate` itself requires `k >= 1`.
    pub fn edgeless(n: usize) -> Self {
        Self {
            n,
            k: 0,
            adj: Vec::new(),
            seed: None,
        }
    }

    fn pair_and_repair(n: usize, k: usize, rng: &mut impl Rng) -> Result<Self, NetworkError> {
        // k stubs per node, shuffled, paired half-against-half
        let mut stubs: Vec<u32> = (0..n as u32).flat_map(|v| std::iter::repeat_n(v, k)).collect();
        stubs.shuffle(rng);
        let m = stubs.len() / 2;
        let mut edges: Vec<(u32, u32)> = (0..m).map(|i| (stubs[i], stubs[i + m])).collect();

        // Swap repair: exchange one endpoint of each bad pair (self-loop or
        // duplicate) with a uniformly chosen other pair until simple. A
        // whole-shuffle restart would almost never produce a simple graph at
        // k = 10 (the expected collision count is ~(k-1)/2 + (k-1)^2/4), so
        // collisions are repaired in place instead.
        let mut seen = std::collections::HashSet::with_capacity(m * 2);
        let key = |a: u32, b: u32| (a.min(b), a.max(b));
        let mut bad: Vec<usize> = Vec::new();
        for (i, &(a, b)) in edges.iter().enumerate() {
            if a == b || !seen.insert(key(a, b)) {
                bad.push(i);
            }
        }
        let mut budget = 200 * n * k + 10_000;
        while let Some(&i) = bad.last() {
            if budget == 0 {
                return Err(NetworkError::PairingExhausted);
            }
            budget -= 1;
            let (a, b) = edges[i];
            let j = rng.random_range(0..m);
            if j == i || bad.contains(&j) {
                continue;
            }
            let (c, d) = edges[j];
            // propose (a, d) and (c, b)
            if a == d || c == b {
                continue;
            }
            let kd = key(a, d);
            let kb = key(c, b);
            if kd == kb || seen.contains(&kd) || seen.contains(&kb) {
                continue;
            }
            seen.remove(&key(c, d));
            seen.insert(kd);
            seen.insert(kb);
            edges[i] = (a, d);
            edges[j] = (c, b);
            bad.pop();
        }

        let mut net = Self {
            n,
            k,
            adj: vec![0; n * k],
            seed: None,
        };
        let mut fill = vec![0usize; n];
        for (a, b) in edges {
            let (a, b) = (a as usize, b as usize);
            net.adj[a * k + fill[a]] = b as u32;
            net.adj[b * k + fill[b]] = a as u32;
            fill[a] += 1;
            fill[b] += 1;
        }
        debug_assert!(fill.iter().all(|&f| f == k));
        net.canonicalize();
        Ok(net)
    }

    // Neighbor lists are kept sorted so the same graph behaves identically
    // no matter how it was constructed (generation vs edge-list import).
    fn canonicalize(&mut self) {
        for v in 0..self.n {
            self.adj[v * self.k..(v + 1) * self.k].sort_unstable();
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    /// Average degree; exactly `k` for a regular graph.
    pub fn mean_degree(&self) -> f64 {
        self.k as f64
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v * self.k..(v + 1) * self.k]
    }

    /// Sorted `u < v` edge list.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.n * self.k / 2);
        for v in 0..self.n {
            for &u in self.neighbors(v) {
                if (v as u32) < u {
                    out.push((v as u32, u));
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        if self.k == 0 {
            return self.n == 1;
        }
        let mut visited = vec![false; self.n];
        let mut stack = vec![0usize];
        visited[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &u in self.neighbors(v) {
                let u = u as usize;
                if !visited[u] {
                    visited[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == self.n
    }

    /// Write the `# n k seed` header and one `u v` line per edge, `u < v`.
    pub fn write_edge_list(&self, mut w: impl Write) -> io::Result<()> {
        let seed = self
            .seed
            .map_or_else(|| "-".to_string(), |s| s.to_string());
        writeln!(w, "# {} {} {}", self.n, self.k, seed)?;
        for (u, v) in self.edges() {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    }

    /// Read a graph back from the edge-list format, validating regularity.
    pub fn read_edge_list(r: impl BufRead) -> Result<Self, NetworkError> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| NetworkError::BadEdgeList("empty file".into()))??;
        let fields: Vec<&str> = header.trim_start_matches('#').split_whitespace().collect();
        if fields.len() != 3 {
            return Err(NetworkError::BadEdgeList(format!(
                "header must be `# n k seed`, got `{header}`"
            )));
        }
        let n: usize = fields[0]
            .parse()
            .map_err(|_| NetworkError::BadEdgeList("bad n".into()))?;
        let k: usize = fields[1]
            .parse()
            .map_err(|_| NetworkError::BadEdgeList("bad k".into()))?;
        let seed = fields[2].parse::<u64>().ok();

        let mut adj = vec![0u32; n * k];
        let mut fill = vec![0usize; n];
        for line in lines {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let (u, v) = match (it.next(), it.next()) {
                (Some(u), Some(v)) => (u, v),
                _ => return Err(NetworkError::BadEdgeList(format!("bad edge `{line}`"))),
            };
            let u: usize = u
                .parse()
                .map_err(|_| NetworkError::BadEdgeList(format!("bad node `{u}`")))?;
            let v: usize = v
                .parse()
                .map_err(|_| NetworkError::BadEdgeList(format!("bad node `{v}`")))?;
            if u >= n || v >= n || u == v {
                return Err(NetworkError::BadEdgeList(format!("edge {u} {v} out of range")));
            }
            if fill[u] >= k || fill[v] >= k {
                return Err(NetworkError::BadEdgeList(format!(
                    "node degree exceeds k={k} at edge {u} {v}"
                )));
            }
            adj[u * k + fill[u]] = v as u32;
            adj[v * k + fill[v]] = u as u32;
            fill[u] += 1;
            fill[v] += 1;
        }
        if fill.iter().any(|&f| f != k) {
            return Err(NetworkError::BadEdgeList("graph is not k-regular".into()));
        }
        let mut net = Self { n, k, adj, seed };
        net.canonicalize();
        Ok(net)
    }
}
