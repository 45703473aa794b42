use super::ParseError;
use crate::schema::{Schema, SchemaError, Table};

/// Parses one table per line: `name(col1, col2, ...)`. A leading `*` marks a
/// primary-key column. Blank lines and `--` comments are ignored.
pub fn parse_schema(text: &str) -> Result<Schema, ParseError> {
    let mut tables = Vec::new();
    let mut line_start = 0;
    for (line_no, raw) in text.split('\n').enumerate() {
        let offset = line_start;
        line_start += raw.len() + 1;
        let line = match raw.find("--") {
            Some(i) => &raw[..i],
            None => raw,
        };
        if line.trim().is_empty() {
            continue;
        }
        let at = |col: usize, msg: String| {
            ParseError::new(offset + col, format!("line {}: {msg}", line_no + 1))
        };
        let lead = line.len() - line.trim_start().len();
        let line = line.trim();
        let (Some(open), true) = (line.find('('), line.ends_with(')')) else {
            return Err(at(lead, "expected 'table(column, ...)'".to_owned()));
        };
        let name = line[..open].trim();
        if !is_identifier(name) {
            return Err(at(lead, format!("invalid table name '{name}'")));
        }
        let body = &line[open + 1..line.len() - 1];
        let mut columns = Vec::new();
        let mut primary_key = Vec::new();
        if !body.trim().is_empty() {
            let mut col_offset = lead + open + 1;
            for part in body.split(',') {
                let trimmed = part.trim();
                let (is_key, column) = match trimmed.strip_prefix('*') {
                    Some(rest) => (true, rest.trim()),
                    None => (false, trimmed),
                };
                if !is_identifier(column) {
                    return Err(at(col_offset, format!("invalid column name '{trimmed}'")));
                }
                if is_key {
                    primary_key.push(column.to_owned());
                }
                columns.push(column.to_owned());
                col_offset += part.len() + 1;
            }
        }
        if tables.iter().any(|t: &Table| t.name().as_ref() == name) {
            return Err(at(lead, SchemaError::DuplicateTable(name.to_owned()).to_string()));
        }
        let table = Table::new(name, columns, primary_key).map_err(|e| at(lead, e.to_string()))?;
        tables.push(table);
    }
    Schema::new(tables).map_err(|e| ParseError::new(0, e.to_string()))
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_table() {
        let s = parse_schema("students(id, name, age)").unwrap();
        let t = s.table("students").unwrap();
        let cols: Vec<&str> = t.columns().iter().map(|c| c.as_ref()).collect();
        assert_eq!(cols, ["id", "name", "age"]);
        assert!(t.primary_key().is_empty());
    }

    #[test]
    fn primary_keys_and_round_trip() {
        let text = "students(*id, name, age)\nteachers(*id)";
        let s = parse_schema(text).unwrap();
        assert_eq!(s.tables().len(), 2);
        assert_eq!(s.table("teachers").unwrap().primary_key()[0].as_ref(), "id");
        assert_eq!(s.to_string(), text);
        assert_eq!(parse_schema(&s.to_string()).unwrap(), s);
    }

    #[test]
    fn blank_input() {
        assert!(parse_schema("").unwrap().tables().is_empty());
        assert!(parse_schema("\n  \n-- c\n").unwrap().tables().is_empty());
    }

    #[test]
    fn malformed_lines() {
        let e = parse_schema("a(x)\nstudents id, name").unwrap_err();
        assert_eq!(e.position, 5);
        assert!(e.message.contains("line 2"));
        assert!(parse_schema("t(a, 1b)").is_err());
        assert!(parse_schema("t(a, a)").is_err());
        let e = parse_schema("t(a)\nu(b)\nt(c)").unwrap_err();
        assert_eq!(e.position, 10);
    }
}
