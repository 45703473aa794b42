use super::*;
use crate::parser::{parse_query, parse_schema};

fn options(start: &str, schema: &str) -> SearchOptions {
    SearchOptions::new()
        .start(parse_query(start).unwrap())
        .schema(parse_schema(schema).unwrap())
}

#[test]
fn worked_example() {
    let dest = parse_query("SELECT DISTINCT name FROM students").unwrap();
    let r = shortest_distance(&dest, &options("SELECT id FROM students", "students(id, name, age)")).unwrap();
    assert_eq!(r.status, SearchStatus::Found);
    assert_eq!(r.distance, Some(3));
    let mut names: Vec<&str> = r.path.iter().map(|s| s.edit.as_str()).collect();
    names.sort_unstable();
    assert_eq!(names, ["changeSelectColumnReferenceColumn", "setDistinct"]);
}

#[test]
fn bounded_below_the_distance() {
    let dest = parse_query("SELECT DISTINCT name FROM students").unwrap();
    let opts = options("SELECT id FROM students", "students(id, name, age)").max_distance(2);
    let r = shortest_distance(&dest, &opts).unwrap();
    assert_eq!(r.status, SearchStatus::ExceededMaxDistance);
    assert_eq!(r.distance, None);
}

#[test]
fn start_equals_destination() {
    let dest = parse_query("SELECT id FROM students").unwrap();
    let r = shortest_distance(&dest, &options("SELECT id FROM students", "students(id)")).unwrap();
    assert_eq!(r.distance, Some(0));
    assert!(r.path.is_empty());
}

#[test]
fn errors() {
    let dest = parse_query("SELECT nope FROM students").unwrap();
    let opts = SearchOptions::new().schema(parse_schema("students(id)").unwrap());
    assert!(matches!(
        shortest_distance(&dest, &opts),
        Err(SearchError::NonExecutableDestination(_))
    ));
    let dest = parse_query("SELECT id FROM students, teachers").unwrap();
    assert!(matches!(
        shortest_distance(&dest, &SearchOptions::new()),
        Err(SearchError::SchemaDeductionFailed(_))
    ));
}

#[test]
fn difficulty_of_empty_and_simple() {
    let schema = parse_schema("students(id)").unwrap();
    let set = default_edit_set();
    let d = difficulty(&parse_query("SELECT id FROM students").unwrap(), &schema, &set).unwrap();
    // addSelectElement, addFromElement, addSelectColumnReference
    assert_eq!(d, 3);
}

#[test]
fn progress_values() {
    assert_eq!(progress(3, Some(10)), 0.3);
    assert_eq!(progress(0, None), 0.0);
    assert!((progress(2, None) - (1.0 - (-2.0f64).exp())).abs() < 1e-12);
    assert_eq!(progress(20, Some(10)), 1.0);
    assert_eq!(progress_fraction(3.0f32, Some(10.0)), 0.3f32);
}
