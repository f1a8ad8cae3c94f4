use super::NetworkDescription;

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Connected components of the graph restricted to in-service lines.
///
/// Islands are returned sorted by their lowest node index, nodes within an
/// island in increasing order; every node appears in exactly one island.
pub fn island_decomposition(network: &NetworkDescription, line_status: &[bool]) -> Vec<Vec<usize>> {
    components(network.num_nodes(), network.lines.iter().map(|l| (l.from, l.to)), line_status)
}

pub(crate) fn components(
    nodes: usize,
    edges: impl Iterator<Item = (usize, usize)>,
    status: &[bool],
) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..nodes).collect();
    for ((a, b), &up) in edges.zip(status) {
        if up {
            let ra = find(&mut parent, a);
            let rb = find(&mut parent, b);
            if ra != rb {
                let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
                parent[hi] = lo;
            }
        }
    }
    let mut root_slot = vec![usize::MAX; nodes];
    let mut out: Vec<Vec<usize>> = Vec::new();
    for node in 0..nodes {
        let r = find(&mut parent, node);
        if root_slot[r] == usize::MAX {
            root_slot[r] = out.len();
            out.push(Vec::new());
        }
        out[root_slot[r]].push(node);
    }
    out
}
