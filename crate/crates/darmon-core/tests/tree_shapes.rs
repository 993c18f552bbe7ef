use std::collections::VecDeque;

use darmon_core::bttree::{find_local_embedding, BruhatTitsTree, LocalEmbeddingData};
use darmon_core::nfield::{make_field, splitting_type, Splitting};

fn bfs(tree: &BruhatTitsTree, start: usize) -> Vec<u32> {
    let mut dist = vec![u32::MAX; tree.vertices().len()];
    dist[start] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(i) = queue.pop_front() {
        for &j in tree.adjacent(i) {
            if dist[j] == u32::MAX {
                dist[j] = dist[i] + 1;
                queue.push_back(j);
            }
        }
    }
    dist
}

/// Level-zero subgraph counted by hand from the adjacency lists.
fn shape_by_hand(tree: &BruhatTitsTree, levels: &[u32]) -> (usize, usize, usize) {
    let zero: Vec<usize> = (0..levels.len()).filter(|&i| levels[i] == 0).collect();
    let mut edges = 0;
    let mut max_deg = 0;
    for &i in &zero {
        let mut deg = 0;
        for &j in tree.adjacent(i) {
            if levels[j] == 0 {
                deg += 1;
                if i < j {
                    edges += 1;
                }
            }
        }
        max_deg = max_deg.max(deg);
    }
    (zero.len(), edges, max_deg)
}

#[test]
fn level_zero_sets_have_the_expected_shapes() {
    let f = make_field(5).unwrap();
    let depth = 4;
    for p in [2u64, 3, 5] {
        let prime = splitting_type(&f, p).unwrap().primes[0].clone();
        let tree = BruhatTitsTree::new(&f, &prime, depth).unwrap();
        let dist = bfs(&tree, 0);
        for (i, v) in tree.vertices().iter().enumerate() {
            assert_eq!(dist[i], v.k);
        }
        let d = tree.depth() as usize;
        for kind in [Splitting::Split, Splitting::Inert, Splitting::Ramified] {
            let emb = find_local_embedding(&f, &prime, kind).unwrap();
            let levels = tree.levels(&emb);
            for i in 0..levels.len() {
                for &j in tree.adjacent(i) {
                    assert!(levels[i].abs_diff(levels[j]) <= 1);
                }
            }
            let (n, e, deg) = shape_by_hand(&tree, &levels);
            let shape = tree.level_zero_shape(&levels);
            assert_eq!((shape.vertices, shape.edges, shape.max_degree), (n, e, deg));
            match kind {
                Splitting::Split => assert_eq!((n, e, deg), (2 * d + 1, 2 * d, 2), "line at p = {p}"),
                Splitting::Inert => assert_eq!((n, e), (1, 0), "point at p = {p}"),
                Splitting::Ramified => assert_eq!((n, e), (2, 1), "edge at p = {p}"),
            }
        }
    }
}

#[test]
fn split_orbits_and_atkin_lehner_swap() {
    let f = make_field(5).unwrap();
    for p in [2u64, 3, 5] {
        let prime = splitting_type(&f, p).unwrap().primes[0].clone();
        let tree = BruhatTitsTree::new(&f, &prime, 4).unwrap();
        let emb = LocalEmbeddingData::split(&f, &prime).unwrap();
        assert_eq!(tree.orbit_count(&emb, 0).unwrap(), 1);
        assert_eq!(tree.orbit_count(&emb, 1).unwrap(), 2);
        assert_eq!(tree.orbit_count(&emb, 2).unwrap(), 2);
        assert!(tree.atkin_lehner_swaps(&emb, 1).unwrap());
    }
}
