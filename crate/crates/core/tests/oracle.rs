mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sqldist::meta::build_meta_info;
use sqldist::oracle::{ucs_explicit, ucs_implicit, ExplicitGraph};
use sqldist::search::{search, Problem, SearchOptions};
use sqldist::default_edit_set;

use common::{exhaustive, random_sql, random_walk, schema};

fn graph() -> impl Strategy<Value = (ExplicitGraph<u32>, usize, usize)> {
    (1usize..=12).prop_flat_map(|n| {
        (
            proptest::collection::vec((0..n, 0..n, 0u32..6), 0..(n * 3)),
            0..n,
            0..n,
        )
            .prop_map(move |(edges, s, d)| (ExplicitGraph::new(n, edges), s, d))
    })
}

proptest! {
    #[test]
    fn explicit_matches_enumeration((g, s, d) in graph()) {
        let got = ucs_explicit(&g, s, d);
        prop_assert_eq!(got.as_ref().map(|r| r.0), exhaustive(&g, s, d));
        if let Some((cost, path)) = got {
            prop_assert_eq!(path.first(), Some(&s));
            prop_assert_eq!(path.last(), Some(&d));
            let mut sum = 0;
            for w in path.windows(2) {
                sum += g.edges.iter().filter(|e| e.0 == w[0] && e.1 == w[1]).map(|e| e.2).min().unwrap();
            }
            prop_assert_eq!(sum, cost);
        }
    }
}

#[test]
fn lazy_search_matches_eager_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let schema = schema();
    let edits = default_edit_set();
    for _ in 0..40 {
        let dest = common::q(&random_sql(&mut rng, &schema));
        let meta = build_meta_info(&dest, &schema, 1);
        let start = random_walk(&mut rng, &dest, &edits, &schema, &meta, 2);
        let options = SearchOptions::new().start(start.clone()).schema(schema.clone());
        let problem = Problem::new(&dest, &options).unwrap();
        let lazy = search(&problem, &mut ());
        let eager = ucs_implicit(&problem);
        assert_eq!(lazy.distance, eager.distance, "{} -> {}", start, dest);
        assert_eq!(lazy.status, eager.status);
    }
}
