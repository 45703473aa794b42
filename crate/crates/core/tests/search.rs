mod common;

use std::collections::BTreeMap;

use sqldist::edits::{register_edit, Edit, EditCategory};
use sqldist::meta::build_meta_info;
use sqldist::oracle::ucs_implicit;
use sqldist::search::{search, Problem, SearchOptions, SearchStatus};
use sqldist::{default_edit_set, difficulty, shortest_distance, Query};

use common::{greedy_removal, problem, q, replays, schema, Audit, DESTINATIONS, PAIRS};

#[test]
fn corpus_pairs_have_their_distances() {
    for &(start, dest, expected) in PAIRS {
        let p = problem(start, dest, 1);
        let mut audit = Audit::default();
        let r = search(&p, &mut audit);
        assert_eq!(r.distance, Some(expected), "{start} -> {dest}");
        assert!(replays(&p, &r), "{start} -> {dest}: path does not replay");
        let v = audit.violations(&r, p.edits.len());
        assert!(v.is_empty(), "{start} -> {dest}: {v:?}");
    }
}

#[test]
fn corpus_pairs_match_the_oracle() {
    for &(start, dest, _) in PAIRS {
        let p = problem(start, dest, 1);
        assert_eq!(search(&p, &mut ()).distance, ucs_implicit(&p).distance, "{start} -> {dest}");
    }
}

#[test]
fn more_slack_does_not_shorten_paths() {
    for &(start, dest, _) in PAIRS {
        let narrow = search(&problem(start, dest, 1), &mut ()).distance;
        let wide = search(&problem(start, dest, 3), &mut ()).distance;
        assert_eq!(narrow, wide, "{start} -> {dest}");
    }
}

#[test]
fn greedy_removal_empties_every_corpus_query() {
    let s = schema();
    let edits = default_edit_set();
    let starts = PAIRS.iter().map(|p| p.0);
    for sql in DESTINATIONS.iter().copied().chain(starts) {
        let query = q(sql);
        let steps = greedy_removal(&query, &edits, &s).unwrap_or_else(|| panic!("stuck removing from {sql}"));
        assert!(steps <= query.component_count(), "{sql}: {steps} steps");
    }
}

#[test]
fn atomic_edits_alone_rebuild_each_destination() {
    let atomic = default_edit_set().filtered(|e| e.category() == EditCategory::Atomic);
    for sql in DESTINATIONS {
        let options = SearchOptions::new().schema(schema()).edits(atomic.clone());
        let r = shortest_distance(&q(sql), &options).unwrap();
        assert!(r.is_found(), "{sql}");
        assert!(r.path.iter().all(|s| s.edit.starts_with("add") || s.edit.starts_with("set")), "{sql}");
    }
}

#[test]
fn shortcuts_never_beat_their_atomic_route() {
    let s = schema();
    let all = default_edit_set();
    let atomic = all.filtered(|e| e.category() == EditCategory::Atomic);
    let shortcuts: Vec<&Edit> = all
        .edits()
        .iter()
        .filter(|e| matches!(e.category(), EditCategory::Horizontal | EditCategory::Shortcut))
        .collect();
    let mut checked = 0;
    for &(start, dest, _) in PAIRS {
        let node = q(start);
        let meta = problem(start, dest, 1).meta;
        for e in &shortcuts {
            for out in sqldist::apply_edit(e, &node, &s, &meta) {
                // The output need not be executable, so no validation here.
                let p = Problem {
                    start: node.clone(),
                    meta: build_meta_info(&out, &s, 1),
                    destination: out,
                    schema: s.clone(),
                    edits: atomic.clone(),
                    max_distance: Some(e.cost().saturating_sub(1)),
                };
                let r = search(&p, &mut ());
                assert!(!r.is_found() || e.cost() == 0, "{} from {start}", e.name());
                checked += 1;
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn every_destination_has_a_finite_difficulty() {
    let s = schema();
    let edits = default_edit_set();
    for sql in DESTINATIONS {
        let d = difficulty(&q(sql), &s, &edits).unwrap();
        assert!(d >= 1, "{sql}");
    }
}

#[test]
fn cost_overrides_change_distances() {
    let base = default_edit_set();
    let free: BTreeMap<String, i64> = [("setDistinct".to_owned(), 0)].into();
    let options = SearchOptions::new()
        .start(q("SELECT id FROM students"))
        .schema(schema())
        .edits(base.configure_costs(&free).unwrap());
    let r = shortest_distance(&q("SELECT DISTINCT id FROM students"), &options).unwrap();
    assert_eq!(r.distance, Some(0));

    let pricey: BTreeMap<String, i64> = [("comparisonFlip".to_owned(), 5)].into();
    let options = SearchOptions::new()
        .start(q("SELECT * FROM students WHERE 21 < age"))
        .schema(schema())
        .edits(base.configure_costs(&pricey).unwrap());
    let r = shortest_distance(&q("SELECT * FROM students WHERE age > 21"), &options).unwrap();
    assert_ne!(r.distance, Some(0));
    let p = Problem::new(&q("SELECT * FROM students WHERE age > 21"), &options).unwrap();
    assert_eq!(r.distance, ucs_implicit(&p).distance);
}

#[test]
fn an_overpriced_shortcut_changes_nothing() {
    let jump = Edit::new("replaceWithDestination", "Replace the whole query", 50, EditCategory::Shortcut, |q, _, m| {
        let _ = m;
        if q.is_empty() {
            Vec::new()
        } else {
            vec![Query::empty()]
        }
    });
    let edits = register_edit(&default_edit_set(), jump).unwrap();
    for &(start, dest, expected) in PAIRS {
        let options = SearchOptions::new().start(q(start)).schema(schema()).edits(edits.clone());
        let r = shortest_distance(&q(dest), &options).unwrap();
        assert_eq!(r.distance, Some(expected), "{start} -> {dest}");
    }
}

#[test]
fn searches_are_deterministic() {
    for &(start, dest, _) in PAIRS {
        let a = search(&problem(start, dest, 1), &mut ());
        let b = search(&problem(start, dest, 1), &mut ());
        assert_eq!(a, b);
    }
}

#[test]
fn bound_below_distance_reports_exceeded() {
    let p = Problem {
        max_distance: Some(0),
        ..problem("SELECT id FROM students", "SELECT DISTINCT name FROM students", 1)
    };
    let r = search(&p, &mut ());
    assert_eq!(r.status, SearchStatus::ExceededMaxDistance);
    assert_eq!(ucs_implicit(&p).status, SearchStatus::ExceededMaxDistance);
}
