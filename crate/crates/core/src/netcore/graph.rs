use super::pairs::PairMask;
use crate::error::{domain, Result};

/// Simple undirected graph on nodes `0..n` stored as sorted neighbor lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    neighbors: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self { n, neighbors: vec![Vec::new(); n], edge_count: 0 }
    }

    pub fn complete(n: usize) -> Self {
        let neighbors = (0..n)
            .map(|i| (0..n).filter(|&j| j != i).collect())
            .collect();
        Self { n, neighbors, edge_count: n * n.saturating_sub(1) / 2 }
    }

    /// Builds a graph from unordered edges. Self-loops, out-of-range ids and
    /// repeated pairs are rejected.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut neighbors = vec![Vec::new(); n];
        for (i, j) in edges {
            if i >= n || j >= n {
                return domain(format!("edge ({i}, {j}) out of range for {n} nodes"));
            }
            if i == j {
                return domain(format!("self-loop at node {i}"));
            }
            neighbors[i].push(j);
            neighbors[j].push(i);
        }
        let mut twice = 0;
        for (i, list) in neighbors.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return domain(format!("duplicate edge ({i}, {})", w[0]));
            }
            twice += list.len();
        }
        Ok(Self { n, neighbors, edge_count: twice / 2 })
    }

    /// Builds from edges already known to be valid and visited in increasing
    /// `(i, j)` order, which leaves every neighbor list sorted.
    pub(crate) fn from_sorted_pairs(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut neighbors = vec![Vec::new(); n];
        for &(i, j) in edges {
            neighbors[i].push(j);
            neighbors[j].push(i);
        }
        debug_assert!(neighbors.iter().all(|l| l.windows(2).all(|w| w[0] < w[1])));
        Self { n, neighbors, edge_count: edges.len() }
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.neighbors.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let (a, b) = if self.neighbors[i].len() <= self.neighbors[j].len() { (i, j) } else { (j, i) };
        self.neighbors[a].binary_search(&b).is_ok()
    }

    /// Edges as `(i, j)` with `i < j`, in increasing order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.neighbors
            .iter()
            .enumerate()
            .flat_map(|(i, l)| l.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    /// Copy of the graph without the edges that fall on held-out pairs.
    pub fn without_held_out(&self, mask: &PairMask) -> Graph {
        let kept: Vec<_> = self.edges().filter(|&(i, j)| !mask.is_held_out(i, j)).collect();
        Graph::from_sorted_pairs(self.n, &kept)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_edges() {
        assert!(Graph::from_edges(3, [(0, 0)]).is_err());
        assert!(Graph::from_edges(3, [(0, 3)]).is_err());
        assert!(Graph::from_edges(3, [(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn structural_symmetry() {
        let g = Graph::from_edges(4, [(2, 0), (1, 3), (0, 1)]).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert!(g.has_edge(0, 2) && g.has_edge(2, 0));
        assert!(!g.has_edge(2, 3));
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (1, 3)]);
        assert_eq!(g.degrees(), vec![2, 2, 1, 1]);
    }

    #[test]
    fn complete_graph_counts() {
        let g = Graph::complete(5);
        assert_eq!(g.edge_count(), 10);
        assert_eq!(g.edges().count(), 10);
    }
}
