//! Enumeration of connected induced subsets (ESU, Wernicke 2006) over an
//! abstract adjacency, with element weights and caller-driven pruning.
//!
//! Every connected set whose smallest element lies in the anchor range is
//! produced exactly once. A visitor returning `false` skips all extensions of
//! the set, so that predicate must be inherited by supersets.

use std::ops::Range;

pub(crate) trait Adjacency {
    fn size(&self) -> usize;
    fn for_each_neighbor(&self, v: usize, f: &mut dyn FnMut(usize));
}

struct State {
    set: Vec<usize>,
    in_set: Vec<bool>,
    near: Vec<u32>,
    weight: usize,
}

impl State {
    fn push<A: Adjacency + ?Sized>(&mut self, adj: &A, v: usize, w: usize) {
        self.set.push(v);
        self.in_set[v] = true;
        self.near[v] += 1;
        let near = &mut self.near;
        adj.for_each_neighbor(v, &mut |u| near[u] += 1);
        self.weight += w;
    }

    fn pop<A: Adjacency + ?Sized>(&mut self, adj: &A, w: usize) {
        let v = self.set.pop().expect("non-empty set");
        self.in_set[v] = false;
        self.near[v] -= 1;
        let near = &mut self.near;
        adj.for_each_neighbor(v, &mut |u| near[u] -= 1);
        self.weight -= w;
    }
}

/// Visits every connected set whose minimum element is in `anchors` and whose
/// total weight is at most `max_weight(anchor)`. The visitor sees the set (in insertion
/// order) and its weight.
pub(crate) fn connected_sets<A, M, W, V>(
    adj: &A,
    anchors: Range<usize>,
    max_weight: M,
    weight: W,
    mut visit: V,
)
where
    A: Adjacency + ?Sized,
    M: Fn(usize) -> usize,
    W: Fn(usize) -> usize,
    V: FnMut(&[usize], usize) -> bool,
{
    let n = adj.size();
    let mut st = State {
        set: Vec::new(),
        in_set: vec![false; n],
        near: vec![0; n],
        weight: 0,
    };
    for anchor in anchors {
        let max_weight = max_weight(anchor);
        let w = weight(anchor);
        if w > max_weight {
            continue;
        }
        st.push(adj, anchor, w);
        let mut ext = Vec::new();
        adj.for_each_neighbor(anchor, &mut |u| {
            if u > anchor {
                ext.push(u)
            }
        });
        extend(adj, anchor, ext, &mut st, max_weight, &weight, &mut visit);
        st.pop(adj, w);
    }
}

fn extend<A, W, V>(
    adj: &A,
    anchor: usize,
    mut ext: Vec<usize>,
    st: &mut State,
    max_weight: usize,
    weight: &W,
    visit: &mut V,
)
where
    A: Adjacency + ?Sized,
    W: Fn(usize) -> usize,
    V: FnMut(&[usize], usize) -> bool,
{
    if !visit(&st.set, st.weight) {
        return;
    }
    while let Some(w) = ext.pop() {
        let ww = weight(w);
        if st.weight + ww > max_weight {
            continue;
        }
        let mut next = ext.clone();
        {
            let (near, in_set) = (&st.near, &st.in_set);
            adj.for_each_neighbor(w, &mut |u| {
                if u > anchor && near[u] == 0 && !in_set[u] {
                    next.push(u);
                }
            });
        }
        st.push(adj, w, ww);
        extend(adj, anchor, next, st, max_weight, weight, visit);
        st.pop(adj, ww);
    }
}
