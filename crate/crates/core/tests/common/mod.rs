#![allow(dead_code)]

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_chacha::ChaCha8Rng;
use sqldist::edits::{apply_edit, EditCategory};
use sqldist::meta::{build_meta_info, MetaInfo};
use sqldist::oracle::ExplicitGraph;
use sqldist::search::{Problem, SearchObserver, SearchOptions, SearchResult};
use sqldist::schema::check_executable;
use sqldist::{parse_query, parse_schema, EditSet, Query, Schema};

pub type Rng = ChaCha8Rng;

pub const SCHEMA: &str = "students(*id, name, age)\nteachers(*id, name)";

/// Destinations whose difficulty stays within reach of an exhaustive search.
pub const DESTINATIONS: &[&str] = &[
    "SELECT DISTINCT name FROM students",
    "SELECT id FROM students",
    "SELECT AVG(age) FROM students",
    "SELECT COUNT(*) FROM students",
    "SELECT s.id FROM students s",
    "SELECT name FROM students ORDER BY name",
    "SELECT name FROM teachers ORDER BY name DESC",
    "SELECT * FROM students WHERE age > 21",
    "SELECT * FROM students JOIN teachers ON students.id = teachers.id",
];

/// (start, destination, distance under the default costs)
pub const PAIRS: &[(&str, &str, u32)] = &[
    // id is a key, so DISTINCT comes and goes for free around it.
    ("SELECT id FROM students", "SELECT DISTINCT name FROM students", 1),
    ("SELECT DISTINCT name FROM students", "SELECT id FROM students", 1),
    ("SELECT name FROM students", "SELECT DISTINCT name FROM students", 2),
    ("SELECT AVG( ) FROM students", "SELECT AVG(age) FROM students", 1),
    ("SELECT MAX(age) FROM students", "SELECT AVG(age) FROM students", 1),
    ("SELECT COUNT(id) FROM students", "SELECT COUNT(*) FROM students", 2),
    ("SELECT stud.id FROM students stud", "SELECT s.id FROM students s", 0),
    ("SELECT id FROM students", "SELECT s.id FROM students s", 2),
    ("SELECT name FROM students", "SELECT name FROM students ORDER BY name", 2),
    ("SELECT name FROM students ORDER BY name", "SELECT name FROM teachers ORDER BY name DESC", 2),
    ("SELECT * FROM students WHERE 21 < age", "SELECT * FROM students WHERE age > 21", 0),
    ("SELECT * FROM students WHERE age < 21", "SELECT * FROM students WHERE age > 21", 1),
    ("SELECT DISTINCT id FROM students", "SELECT id FROM students", 0),
    (
        "SELECT * FROM students, teachers WHERE students.id = teachers.id",
        "SELECT * FROM students JOIN teachers ON students.id = teachers.id",
        0,
    ),
    (
        "SELECT * FROM students LEFT JOIN teachers ON students.id = teachers.id",
        "SELECT * FROM students JOIN teachers ON students.id = teachers.id",
        1,
    ),
];

pub fn q(sql: &str) -> Query {
    parse_query(sql).unwrap_or_else(|e| panic!("{sql}: {e}"))
}

pub fn schema() -> Schema {
    parse_schema(SCHEMA).unwrap()
}

const TABLES: &[(&str, &[&str])] = &[("students", &["id", "name", "age"]), ("teachers", &["id", "name"])];

fn constant_for(rng: &mut Rng, column: &str) -> String {
    match column {
        "name" => ["'Ann'", "'Bo'"].choose(rng).unwrap().to_string(),
        _ => [18, 21].choose(rng).unwrap().to_string(),
    }
}

/// Random executable query text: at most 3 select elements, 2 FROM
/// elements and expression height 2.
pub fn random_sql(rng: &mut Rng, schema: &Schema) -> String {
    random_sql_aliased(rng, schema, ["s", "t"])
}

/// [`random_sql`] with the given FROM aliases. The same generator state
/// gives the same query up to alias spelling.
pub fn random_sql_aliased(rng: &mut Rng, schema: &Schema, aliases: [&str; 2]) -> String {
    loop {
        let sql = random_candidate(rng, aliases);
        if parse_query(&sql).is_ok_and(|q| check_executable(&q, schema).is_ok()) {
            return sql;
        }
    }
}

fn random_candidate<'a>(rng: &mut Rng, aliases: [&'a str; 2]) -> String {
    let two = rng.gen_bool(0.3);
    let mut chosen: Vec<(&str, &[&str], Option<&'a str>)> = Vec::new();
    if two {
        for (i, (t, cols)) in TABLES.iter().enumerate() {
            chosen.push((t, cols, rng.gen_bool(0.3).then_some(aliases[i])));
        }
    } else {
        let i = rng.gen_range(0..TABLES.len());
        let (t, cols) = TABLES[i];
        chosen.push((t, cols, rng.gen_bool(0.3).then_some(aliases[i])));
    }
    let qualify = two || rng.gen_bool(0.3);
    let column = |rng: &mut Rng| {
        let (t, cols, a) = chosen.choose(rng).unwrap();
        let c = *cols.choose(rng).unwrap();
        let name = if qualify { format!("{}.{c}", a.unwrap_or(t)) } else { c.to_owned() };
        (name, c)
    };
    let comparison = |rng: &mut Rng| {
        let (name, c) = column(rng);
        let op = ["=", "<", ">", "<>"].choose(rng).unwrap();
        format!("{name} {op} {}", constant_for(rng, c))
    };

    let mut sql = String::from("SELECT ");
    let mut order = None;
    match rng.gen_range(0..10) {
        0 => sql.push('*'),
        1..=2 => {
            let aggs = ["COUNT(*)", "AVG(age)", "MAX(age)", "MIN(name)"];
            let n = rng.gen_range(1..=2);
            let picked: Vec<&str> = aggs.choose_multiple(rng, n).copied().collect();
            sql.push_str(&picked.join(", "));
        }
        _ => {
            if rng.gen_bool(0.25) {
                sql.push_str("DISTINCT ");
            }
            let n = rng.gen_range(1..=3);
            let cols: Vec<String> = (0..n).map(|_| column(rng).0).collect();
            if rng.gen_bool(0.3) {
                let dir = if rng.gen_bool(0.5) { " DESC" } else { "" };
                order = Some(format!("{}{dir}", cols.choose(rng).unwrap()));
            }
            sql.push_str(&cols.join(", "));
        }
    }
    sql.push_str(" FROM ");
    for (i, (t, _, a)) in chosen.iter().enumerate() {
        if i > 0 {
            sql.push_str(if rng.gen_bool(0.5) { ", " } else { " JOIN " });
        }
        sql.push_str(t);
        if let Some(a) = a {
            sql.push(' ');
            sql.push_str(a);
        }
    }
    if sql.contains(" JOIN ") {
        let (s, t) = (chosen[0].2.unwrap_or("students"), chosen[1].2.unwrap_or("teachers"));
        sql.push_str(&format!(" ON {s}.id = {t}.id"));
    }
    if rng.gen_bool(0.5) {
        let cond = match rng.gen_range(0..4) {
            0 => format!("NOT {}", comparison(rng)),
            1 => format!("{} AND {}", comparison(rng), comparison(rng)),
            2 => format!("{} OR {}", comparison(rng), comparison(rng)),
            _ => comparison(rng),
        };
        sql.push_str(" WHERE ");
        sql.push_str(&cond);
    }
    if let Some(o) = order {
        sql.push_str(" ORDER BY ");
        sql.push_str(&o);
    }
    sql
}

/// Applies up to `steps` randomly chosen applicable edits.
pub fn random_walk(
    rng: &mut Rng,
    from: &Query,
    edits: &EditSet,
    schema: &Schema,
    meta: &MetaInfo,
    steps: usize,
) -> Query {
    let mut current = from.clone();
    let mut order: Vec<usize> = (0..edits.len()).collect();
    for _ in 0..steps {
        order.shuffle(rng);
        let next = order.iter().find_map(|&i| {
            let out = apply_edit(&edits.edits()[i], &current, schema, meta);
            out.choose(rng).cloned()
        });
        match next {
            Some(n) => current = n,
            None => break,
        }
    }
    current
}

/// Records what a search does so invariants can be checked afterwards.
#[derive(Default)]
pub struct Audit {
    pub dequeues: HashMap<usize, usize>,
    pub priorities: Vec<u32>,
    pub visits: HashMap<usize, usize>,
}

impl SearchObserver for Audit {
    fn on_extract(&mut self, priority: u32, node: usize, _edit_index: usize) {
        *self.dequeues.entry(node).or_default() += 1;
        if self.priorities.last() != Some(&priority) {
            self.priorities.push(priority);
        }
    }

    fn on_visit(&mut self, node: usize, _query: &Query, _dist: u32) {
        *self.visits.entry(node).or_default() += 1;
    }
}

impl Audit {
    /// Problems found in the recorded run, empty if none.
    pub fn violations(&self, result: &SearchResult, edit_count: usize) -> Vec<String> {
        let mut out = Vec::new();
        if let Some((n, c)) = self.dequeues.iter().find(|(_, &c)| c > edit_count) {
            out.push(format!("node {n} dequeued {c} times"));
        }
        if self.priorities.windows(2).any(|w| w[0] > w[1]) {
            out.push(format!("priorities went down: {:?}", self.priorities));
        }
        if self.visits.values().any(|&v| v > 1) {
            out.push("a node got a second distance".into());
        }
        if result.expanded_count > result.visited_count * edit_count {
            out.push("expansion ceiling tripped".into());
        }
        out
    }
}

/// Whether replaying the path from the start reaches the destination with
/// step costs summing to the distance.
pub fn replays(problem: &Problem, result: &SearchResult) -> bool {
    let Some(distance) = result.distance else {
        return false;
    };
    let mut at = problem.start.clone();
    let mut total = 0;
    for step in &result.path {
        let Some(edit) = problem.edits.get(&step.edit) else {
            return false;
        };
        if !step.from.equals_canonical(&at) {
            return false;
        }
        let outs = apply_edit(edit, &at, &problem.schema, &problem.meta);
        if !outs.iter().any(|o| o.equals_canonical(&step.to)) {
            return false;
        }
        total += edit.cost();
        at = step.to.clone();
    }
    total == distance && at.equals_canonical(&problem.destination)
}

pub fn problem(start: &str, destination: &str, slack: usize) -> Problem {
    let options = SearchOptions::new().start(q(start)).schema(schema()).slack(slack);
    Problem::new(&q(destination), &options).unwrap()
}

/// Removes one component at a time with atomic remove/unset edits until
/// the query is empty. Returns the number of steps, or `None` if stuck.
pub fn greedy_removal(query: &Query, edits: &EditSet, schema: &Schema) -> Option<usize> {
    let meta = build_meta_info(query, schema, 0);
    let removals: Vec<_> = edits
        .edits()
        .iter()
        .filter(|e| e.category() == EditCategory::Atomic && (e.name().starts_with("remove") || e.name().starts_with("unset")))
        .collect();
    let mut at = query.clone();
    let mut steps = 0;
    while !at.is_empty() {
        let next = removals
            .iter()
            .find_map(|e| apply_edit(e, &at, schema, &meta).into_iter().next())?;
        if next.component_count() >= at.component_count() {
            return None;
        }
        at = next;
        steps += 1;
    }
    Some(steps)
}

/// Cheapest simple path by brute force.
pub fn exhaustive(g: &ExplicitGraph<u32>, start: usize, destination: usize) -> Option<u32> {
    fn go(g: &ExplicitGraph<u32>, at: usize, dest: usize, cost: u32, seen: &mut Vec<bool>, best: &mut Option<u32>) {
        if at == dest {
            *best = Some(best.map_or(cost, |b| b.min(cost)));
            return;
        }
        for &(a, b, c) in &g.edges {
            if a == at && !seen[b] {
                seen[b] = true;
                go(g, b, dest, cost + c, seen, best);
                seen[b] = false;
            }
        }
    }
    let mut seen = vec![false; g.nodes];
    seen[start] = true;
    let mut best = None;
    go(g, start, destination, 0, &mut seen, &mut best);
    best
}
