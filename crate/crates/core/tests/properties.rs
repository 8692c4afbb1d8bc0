use std::collections::BTreeSet;

use evasion::cctree::{supersat_hypergraph, CCTree, NodeCase, SupersatParams};
use evasion::container::{build_containers, container_of, ContainerParams};
use evasion::experiments::{
    count_general_position, count_general_position_oracle, edges_are_krsets, sample_supersat_input,
};
use evasion::field::FieldCtx;
use evasion::geom::{self, PointSet, Space};
use evasion::hyper::Hypergraph;
use evasion::report;
use evasion::rng::RandomStream;
use proptest::prelude::*;
use serde_json::json;

const ORDERS: [u64; 12] = [2, 3, 4, 5, 7, 8, 9, 11, 16, 25, 27, 49];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn field_axioms(qi in 0..ORDERS.len(), a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let f = FieldCtx::from_order(ORDERS[qi]).unwrap();
        let q = f.q();
        let (a, b, c) = (f.elem(a % q), f.elem(b % q), f.elem(c % q));
        let zero = f.elem(0);
        let one = f.elem(1);
        prop_assert_eq!(f.add(a, f.add(b, c)), f.add(f.add(a, b), c));
        prop_assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), zero);
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        prop_assert_eq!(f.mul(a, one), a);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a)), one);
            prop_assert_eq!(f.pow(a, q as u64 - 1), one);
            prop_assert_eq!(f.mul(f.div(b, a), a), b);
        } else {
            prop_assert!(f.checked_inv(a).is_none());
        }
    }

    #[test]
    fn bucket_count_matches_brute_force(qi in 0..4usize, seed in any::<u64>(), density in 0.05f64..1.0) {
        let q = [3u64, 4, 5, 7][qi];
        let space = Space::new(FieldCtx::from_order(q).unwrap(), 2).unwrap();
        let mut rng = RandomStream::new(seed);
        let idx: Vec<u32> = (0..space.size()).filter(|_| rng.unit() < density).collect();
        let p = PointSet::from_indices(space, idx);
        prop_assert_eq!(geom::count_collinear_triples(&p).unwrap(), geom::count_collinear_triples_brute(&p).unwrap());
    }

    #[test]
    fn traced_container_is_in_family(n in 6usize..13, seed in any::<u64>(), tau in 0.05f64..0.45, c in 0.05f64..0.9) {
        let mut rng = RandomStream::new(seed);
        let edges: Vec<Vec<u32>> = geom::combinations(n, 3)
            .into_iter()
            .filter(|_| rng.unit() < 0.3)
            .map(|e| e.into_iter().map(|v| v as u32).collect())
            .collect();
        prop_assume!(!edges.is_empty());
        let h = Hypergraph::new(3, n, edges).unwrap();
        let params = ContainerParams::new(tau, c);
        let fam = build_containers(&h, &params).unwrap();
        let set = h.random_maximal_independent(&mut rng);
        let (fp, container, _) = container_of(&h, &params, &set).unwrap();
        let pos = fam.fingerprints.iter().position(|f| *f == fp);
        prop_assert!(pos.is_some());
        prop_assert_eq!(&fam.containers[pos.unwrap()], &container);
        prop_assert!(set.iter().all(|v| container.binary_search(v).is_ok()));
    }

    #[test]
    fn supersat_edges_are_distinct_krsets(seed in any::<u64>(), frac in 0.3f64..0.8) {
        let space = Space::new(FieldCtx::from_order(11).unwrap(), 2).unwrap();
        let m = (frac * space.size() as f64) as usize;
        let params = SupersatParams::new(1, 3, 1.0, 0.01);
        let mut rng = RandomStream::new(seed);
        let (p, _) = sample_supersat_input(&space, m, &params, &mut rng, 1000).unwrap();
        let (h, cert) = supersat_hypergraph(&p, &params, &mut rng).unwrap();
        prop_assert!(edges_are_krsets(&h, &space, 1));
        let distinct: BTreeSet<Vec<u32>> = h.edges().map(|e| e.to_vec()).collect();
        prop_assert_eq!(distinct.len(), h.num_edges());
        prop_assert_eq!(cert.edges, h.num_edges());
        prop_assert!(h.labels().iter().all(|&l| p.contains(l)));
    }

    #[test]
    fn cctree_text_round_trip(shape in prop::collection::vec((0usize..64, 1usize..6, 0usize..3), 0..40)) {
        let mut t = CCTree::root((0..30).collect());
        for (parent, size, cliques) in shape {
            let parent = parent % t.len();
            let c0: Vec<u32> = (0..size as u32).collect();
            let appended: Vec<Vec<u32>> = (0..cliques as u32).map(|i| vec![i, i + 10, i + 20]).collect();
            let case = if appended.is_empty() { NodeCase::Container } else { NodeCase::Deletion };
            t.push_child(parent, case, c0, appended);
        }
        let text = t.to_text(3).unwrap();
        let back = CCTree::parse_text(&text).unwrap();
        prop_assert_eq!(&back, &t);
        prop_assert_eq!(back.to_text(3).unwrap(), text);
    }

    #[test]
    fn report_csv_round_trip(rows in prop::collection::vec((any::<i32>(), any::<bool>(), "[a-z]{1,8}"), 0..20), q in 2u32..100) {
        let rows: Vec<_> = rows.into_iter().map(|(a, b, s)| json!({"alpha": a, "exact": b, "mode": s})).collect();
        let v = json!({"q": q, "rows": rows});
        let csv = report::to_csv(&v, "rows", &["alpha", "exact", "mode"]).unwrap();
        prop_assert_eq!(report::csv_to_value(&csv, "rows").unwrap(), v);
    }
}

/// Brute force over all subsets with the determinant test written out
/// directly on coordinates mod p.
fn general_position_by_determinants(p: i64, n: usize) -> u64 {
    let pts: Vec<Vec<i64>> = (0..p.pow(n as u32))
        .map(|mut x| {
            let mut c = vec![0; n];
            for i in (0..n).rev() {
                c[i] = x % p;
                x /= p;
            }
            c
        })
        .collect();
    let det = |m: &[Vec<i64>]| -> i64 {
        match m.len() {
            2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
            3 => {
                m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                    - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                    + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
            }
            _ => unreachable!(),
        }
    };
    let bad = |s: &[usize]| -> bool {
        let rows: Vec<Vec<i64>> = s[1..]
            .iter()
            .map(|&i| (0..n).map(|j| pts[i][j] - pts[s[0]][j]).collect())
            .collect();
        det(&rows).rem_euclid(p) == 0
    };
    let total = pts.len();
    let mut count = 0;
    'mask: for mask in 0u32..(1 << total) {
        let s: Vec<usize> = (0..total).filter(|i| mask >> i & 1 == 1).collect();
        for c in geom::combinations(s.len(), n + 1) {
            let sub: Vec<usize> = c.iter().map(|&i| s[i]).collect();
            if bad(&sub) {
                continue 'mask;
            }
        }
        count += 1;
    }
    count
}

#[test]
fn general_position_counts_frozen() {
    assert_eq!(general_position_by_determinants(3, 2), 172);
    assert_eq!(general_position_by_determinants(2, 3), 149);
    assert_eq!(general_position_by_determinants(2, 2), 16);
    for (p, n, want) in [(3u64, 2usize, 172u128), (2, 3, 149), (2, 2, 16)] {
        let f = FieldCtx::new(p, 1).unwrap();
        assert_eq!(count_general_position(&f, n).unwrap(), want);
        assert_eq!(count_general_position_oracle(&f, n).unwrap(), want);
    }
}

#[test]
fn triple_count_of_full_plane() {
    for q in [3u64, 4, 5, 7, 8, 9] {
        let space = Space::new(FieldCtx::from_order(q).unwrap(), 2).unwrap();
        let full = PointSet::full(space);
        let want = (q * q + q) * q * (q - 1) * (q - 2) / 6;
        assert_eq!(geom::count_collinear_triples(&full).unwrap(), want);
    }
}
