//! Restricted breadth-first traversal shared by every closure computation.

use crate::graph::Adjacency;

/// Reusable scratch space for repeated traversals over one node range.
///
/// Visited marks are epoch stamps, so starting a new traversal costs O(1)
/// instead of clearing a per-node array.
pub(crate) struct Traversal {
    stamp: Vec<u32>,
    epoch: u32,
    queue: Vec<usize>,
}

impl Traversal {
    pub(crate) fn new(nodes: usize) -> Self {
        Traversal {
            stamp: vec![0; nodes],
            epoch: 0,
            queue: Vec::new(),
        }
    }

    /// Calls `hit` once for every node reachable from `source` by a path of
    /// length at least one whose intermediate nodes are not `blocked`.
    ///
    /// Blocked nodes are reported when reached but never expanded. The source
    /// is expanded at the start regardless of its own mark, and is reported
    /// only if a cycle leads back to it.
    pub(crate) fn run(
        &mut self,
        adj: &Adjacency,
        blocked: &[bool],
        source: usize,
        mut hit: impl FnMut(usize),
    ) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        let epoch = self.epoch;
        self.queue.clear();
        self.queue.push(source);
        let mut head = 0;
        let mut expanded_source = false;
        while head < self.queue.len() {
            let v = self.queue[head];
            head += 1;
            if v == source {
                // The source is queued a second time only when a cycle reaches
                // it; one expansion is enough.
                if expanded_source {
                    continue;
                }
                expanded_source = true;
            }
            for &w in adj.successors(v) {
                if self.stamp[w] == epoch {
                    continue;
                }
                self.stamp[w] = epoch;
                hit(w);
                if !blocked[w] {
                    self.queue.push(w);
                }
            }
        }
    }
}
