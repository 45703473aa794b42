mod common;

use std::collections::BTreeMap;

use rand::SeedableRng;
use rusqlite::types::Value;
use rusqlite::Connection;

use sqldist::edits::EditCategory;
use sqldist::meta::build_meta_info;
use sqldist::{apply_edit, default_edit_set, Query};

use common::{q, random_sql, schema, Rng};

const FIXTURE: &str = "
CREATE TABLE students (id INTEGER PRIMARY KEY, name TEXT, age INTEGER);
CREATE TABLE teachers (id INTEGER PRIMARY KEY, name TEXT);
INSERT INTO students VALUES (1, 'Ann', 21), (2, 'Bo', 18), (3, 'Ann', 30), (4, NULL, 21), (5, 'Cy', NULL);
INSERT INTO teachers VALUES (1, 'Bo'), (3, 'Dee'), (4, 'Ann'), (6, NULL);
";

/// Queries chosen so that every equivalence edit applies to at least one.
const SEEDS: &[&str] = &[
    "SELECT age + id, age * 2 FROM students",
    "SELECT * FROM students WHERE age > 18 AND name = 'Ann' AND id < 5",
    "SELECT * FROM students WHERE age > 18 OR name = 'Ann' OR id < 2",
    "SELECT * FROM students WHERE NOT (age > 18 AND name = 'Bo')",
    "SELECT * FROM students WHERE NOT NOT age > 18",
    "SELECT * FROM students WHERE age > 18 AND age > 18",
    "SELECT name FROM students WHERE NOT age = 21",
    "SELECT * FROM students JOIN teachers ON students.id = teachers.id",
    "SELECT * FROM students, teachers WHERE students.id = teachers.id AND students.age > 18",
    "SELECT students.name FROM students JOIN teachers ON students.id = teachers.id LEFT JOIN teachers t ON t.id = students.id",
    "SELECT DISTINCT id, name FROM students",
    "SELECT id, name FROM students",
    "SELECT age, COUNT(*) FROM students GROUP BY age, name",
    "SELECT * FROM students WHERE 21 < age",
];

fn rows(conn: &Connection, sql: &str) -> Vec<Vec<String>> {
    let mut stmt = conn.prepare(sql).unwrap_or_else(|e| panic!("{sql}: {e}"));
    let n = stmt.column_count();
    let mut out: Vec<Vec<String>> = stmt
        .query_map([], |r| {
            (0..n)
                .map(|i| r.get::<_, Value>(i).map(|v| format!("{v:?}")))
                .collect()
        })
        .unwrap()
        .map(Result::unwrap)
        .collect();
    out.sort();
    out
}

#[test]
fn equivalence_edits_preserve_results() {
    let conn = Connection::open_in_memory().unwrap();
    conn.execute_batch(FIXTURE).unwrap();
    let s = schema();
    let edits = default_edit_set();
    let equivalences: Vec<_> = edits
        .edits()
        .iter()
        .filter(|e| e.category() == EditCategory::Equivalence)
        .collect();

    let mut inputs: Vec<Query> = SEEDS.iter().map(|sql| q(sql)).collect();
    let mut r = Rng::seed_from_u64(3);
    inputs.extend((0..150).map(|_| q(&random_sql(&mut r, &s))));

    let mut exercised: BTreeMap<&str, usize> = equivalences.iter().map(|e| (e.name(), 0)).collect();
    for input in &inputs {
        let mut meta = build_meta_info(input, &s, 3);
        // Let size-increasing rewrites fire too.
        meta.exact = meta.depth.clone();
        let before = rows(&conn, &input.render_inline());
        for e in &equivalences {
            for out in apply_edit(e, input, &s, &meta) {
                if out.has_hole() {
                    continue;
                }
                let after = rows(&conn, &out.render_inline());
                assert_eq!(before, after, "{}: {} vs {}", e.name(), input, out);
                *exercised.get_mut(e.name()).unwrap() += 1;
            }
        }
    }
    let idle: Vec<_> = exercised.iter().filter(|(_, &n)| n == 0).map(|(k, _)| *k).collect();
    assert!(idle.is_empty(), "never applied: {idle:?}");
}

#[test]
fn non_equivalent_listing_differs() {
    let conn = Connection::open_in_memory().unwrap();
    conn.execute_batch(FIXTURE).unwrap();
    assert_ne!(
        rows(&conn, "SELECT * FROM students WHERE age > 21"),
        rows(&conn, "SELECT * FROM students WHERE age < 21")
    );
}
